//! Critical commuting pairs, their renormalization, the Moebius-normalized
//! distance and glueing back into circle maps.

mod glue;
mod metric;
mod mobius;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{closest_returns, CircleLift};

pub use glue::{glue, pair_rotation_number, GluedMap, SEAM_TOLERANCE};
pub use metric::{metric_d, metric_d_checked, MetricValue};
pub use mobius::{composition_gap_bound, mobius_apply, mobius_pole, pole_gap_lower_bound, MobiusNormalizer};

type JetFn = dyn Fn(f64) -> (f64, f64) + Send + Sync;

/// One branch of a commuting pair, kept as an expression tree so deep
/// compositions are evaluated by iterating the underlying lift.
#[derive(Clone)]
pub enum Branch {
    /// `T^{-p} F^q`.
    Iterate {
        lift: Arc<dyn CircleLift>,
        q: u64,
        p: u64,
    },
    /// `u -> inner(c u) / c`.
    Conj { inner: Arc<Branch>, c: f64 },
    /// `inner` applied `r` times.
    Power { inner: Arc<Branch>, r: u64 },
    /// `outer o inner`.
    Compose { outer: Arc<Branch>, inner: Arc<Branch> },
    /// Closed-form map returning value and first derivative.
    Analytic { f: Arc<JetFn>, label: String },
}

impl fmt::Debug for Branch {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Iterate { lift, q, p } => write!(fm, "T^-{p} {}^{q}", lift.label()),
            Branch::Conj { inner, c } => write!(fm, "conj[{c}]({inner:?})"),
            Branch::Power { inner, r } => write!(fm, "({inner:?})^{r}"),
            Branch::Compose { outer, inner } => write!(fm, "{outer:?} o {inner:?}"),
            Branch::Analytic { label, .. } => write!(fm, "{label}"),
        }
    }
}

impl Branch {
    pub fn analytic(label: &str, f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Branch::Analytic {
            f: Arc::new(f),
            label: label.to_string(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Branch::Iterate { lift, q, p } => {
                let mut x = t;
                for _ in 0..*q {
                    x = lift.eval(x);
                }
                x - *p as f64
            }
            Branch::Conj { inner, c } => inner.eval(c * t) / c,
            Branch::Power { inner, r } => (0..*r).fold(t, |x, _| inner.eval(x)),
            Branch::Compose { outer, inner } => outer.eval(inner.eval(t)),
            Branch::Analytic { f, .. } => f(t).0,
        }
    }

    /// Value and first derivative, by the chain rule.
    pub fn eval_jet(&self, t: f64) -> (f64, f64) {
        match self {
            Branch::Iterate { lift, q, p } => {
                let (mut x, mut d) = (t, 1.0);
                for _ in 0..*q {
                    d *= lift.deriv(x, 1);
                    x = lift.eval(x);
                }
                (x - *p as f64, d)
            }
            Branch::Conj { inner, c } => {
                let (v, d) = inner.eval_jet(c * t);
                (v / c, d)
            }
            Branch::Power { inner, r } => (0..*r).fold((t, 1.0), |(x, d), _| {
                let (v, dv) = inner.eval_jet(x);
                (v, d * dv)
            }),
            Branch::Compose { outer, inner } => {
                let (v, dv) = inner.eval_jet(t);
                let (w, dw) = outer.eval_jet(v);
                (w, dv * dw)
            }
            Branch::Analytic { f, .. } => f(t),
        }
    }

    /// `u -> self(c u)/c`, merging nested conjugations.
    pub fn conjugate(&self, c: f64) -> Branch {
        match self {
            Branch::Conj { inner, c: c0 } => {
                let cc = c * c0;
                if cc == 1.0 {
                    (**inner).clone()
                } else {
                    Branch::Conj {
                        inner: inner.clone(),
                        c: cc,
                    }
                }
            }
            _ if c == 1.0 => self.clone(),
            _ => Branch::Conj {
                inner: Arc::new(self.clone()),
                c,
            },
        }
    }

    pub fn power(&self, r: u64) -> Branch {
        match r {
            1 => self.clone(),
            _ => Branch::Power {
                inner: Arc::new(self.clone()),
                r,
            },
        }
    }

    /// `outer o self`.
    pub fn then(&self, outer: &Branch) -> Branch {
        Branch::Compose {
            outer: Arc::new(outer.clone()),
            inner: Arc::new(self.clone()),
        }
    }
}

/// Where a pair came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    /// Level `n` of `pair_from_lift`, advanced by renormalization.
    pub level: Option<usize>,
    /// Return times of the branches when built from a lift.
    pub q_eta: Option<u64>,
    pub q_xi: Option<u64>,
    /// Factor `c` with `branch(u) = T^{-p} F^q(c u) / c` for lift-built pairs.
    pub lift_scale: Option<f64>,
    pub renormalizations: usize,
}

impl Provenance {
    pub fn analytic(source: &str) -> Self {
        Provenance {
            source: source.to_string(),
            level: None,
            q_eta: None,
            q_xi: None,
            lift_scale: None,
            renormalizations: 0,
        }
    }
}

/// Pair `(eta, xi)` with `eta` on `[0, xi(0)]` and `xi` on `[eta(0), 0]`.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    pub eta: Branch,
    pub xi: Branch,
    eta0: f64,
    xi0: f64,
    pub provenance: Provenance,
}

/// Height of a pair: the number of `eta` steps needed to cross 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Height {
    Finite(u64),
    Infinite,
}

/// Iterates of `eta` closer than this to 0, relative to the pair's span,
/// make the height undecidable.
pub const HEIGHT_ZERO_GUARD: f64 = 1e-12;
const MAX_HEIGHT: u64 = 1_000_000;

impl CommutingPair {
    pub fn new(eta: Branch, xi: Branch, provenance: Provenance) -> Result<Self> {
        let eta0 = eta.eval(0.0);
        let xi0 = xi.eval(0.0);
        if !(eta0 < 0.0 && xi0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "pair needs eta(0) < 0 < xi(0), got {eta0}, {xi0}"
            )));
        }
        Ok(Self {
            eta,
            xi,
            eta0,
            xi0,
            provenance,
        })
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn is_normalized(&self) -> bool {
        (self.eta0 + 1.0).abs() < 1e-12
    }

    /// Length of the glued circle, `xi(0) - eta(0)`.
    pub fn span(&self) -> f64 {
        self.xi0 - self.eta0
    }

    /// `|eta(xi(0)) - xi(eta(0))|`.
    pub fn commutator_residual(&self) -> f64 {
        (self.eta.eval(self.xi0) - self.xi.eval(self.eta0)).abs()
    }

    /// Conjugate by `t = c u`. A negative `c` reverses orientation, so the
    /// branches swap roles.
    pub fn conjugate(&self, c: f64) -> Result<Self> {
        let mut prov = self.provenance.clone();
        prov.lift_scale = prov.lift_scale.map(|s| s * c);
        if c > 0.0 {
            Self::new(self.eta.conjugate(c), self.xi.conjugate(c), prov)
        } else {
            std::mem::swap(&mut prov.q_eta, &mut prov.q_xi);
            Self::new(self.xi.conjugate(c), self.eta.conjugate(c), prov)
        }
    }

    /// Rescale so that `eta(0) = -1`.
    pub fn normalize(&self) -> Result<Self> {
        if self.is_normalized() {
            return Ok(self.clone());
        }
        self.conjugate(-self.eta0)
    }

    /// The pair's height `chi`.
    pub fn height(&self) -> Result<Height> {
        let base = if self.xi.eval(self.eta0) > 0.0 {
            self.clone()
        } else {
            self.conjugate(-1.0)?
        };
        base.height_upper().map(|(h, _)| h)
    }

    /// Height and `eta^r(xi(0))` when `xi(eta(0))` lies in the domain of `eta`.
    fn height_upper(&self) -> Result<(Height, f64)> {
        let guard = HEIGHT_ZERO_GUARD * self.span();
        let mut x = self.xi0;
        for r in 0..MAX_HEIGHT {
            let y = self.eta.eval(x);
            if y.abs() < guard {
                return Err(Error::PrecisionExhausted(format!(
                    "eta^{}(xi(0)) = {y:e} is within the zero guard",
                    r + 1
                )));
            }
            if y < 0.0 {
                return Ok((Height::Finite(r), x));
            }
            if y >= x {
                return Ok((Height::Infinite, x));
            }
            x = y;
        }
        Ok((Height::Infinite, x))
    }

    /// One renormalization step: `(eta^r o xi, eta)` restricted and rescaled,
    /// returned normalized.
    pub fn renormalize(&self) -> Result<Self> {
        let base = if self.xi.eval(self.eta0) > 0.0 {
            self.clone()
        } else {
            self.conjugate(-1.0)?
        };
        let (h, x_r) = base.height_upper()?;
        let r = match h {
            Height::Finite(r) if r > 0 => r,
            Height::Finite(_) => {
                return Err(Error::InvalidInput("height zero: not a commuting pair".into()))
            }
            Height::Infinite => {
                return Err(Error::InvalidInput("infinite height: renormalization undefined".into()))
            }
        };
        let long = base.xi.then(&base.eta.power(r));
        let c = -x_r;
        let p = &base.provenance;
        let prov = Provenance {
            source: p.source.clone(),
            level: p.level.map(|l| l + 1),
            q_eta: p.q_eta.zip(p.q_xi).map(|(qe, qx)| r * qe + qx),
            q_xi: p.q_eta,
            lift_scale: p.lift_scale.map(|s| s * c),
            renormalizations: p.renormalizations + 1,
        };
        Self::new(long.conjugate(c), base.eta.conjugate(c), prov)
    }
}

/// The pair `(T^{-p_{n+1}} F^{q_{n+1}} on I_n, T^{-p_n} F^{q_n} on I_{n+1})`,
/// reflected when `d_n < 0` so that `eta(0) < 0 < xi(0)`.
pub fn pair_from_lift(lift: Arc<dyn CircleLift>, n: usize) -> Result<CommutingPair> {
    let cr = closest_returns(lift.as_ref(), n + 1)?;
    let eta = Branch::Iterate {
        lift: lift.clone(),
        q: cr.q[n + 1],
        p: cr.p[n + 1],
    };
    let xi = Branch::Iterate {
        lift: lift.clone(),
        q: cr.q[n],
        p: cr.p[n],
    };
    let c = if cr.d[n] > 0.0 { 1.0 } else { -1.0 };
    let prov = Provenance {
        source: lift.label(),
        level: Some(n),
        q_eta: Some(cr.q[n + 1]),
        q_xi: Some(cr.q[n]),
        lift_scale: Some(c),
        renormalizations: 0,
    };
    CommutingPair::new(eta.conjugate(c), xi.conjugate(c), prov)
}

/// Normalized `n`-th renormalization `R^n f = (f^{q_n} on I_{n-1}, f^{q_{n-1}} on I_n)`.
pub fn renormalization_of_lift(lift: Arc<dyn CircleLift>, n: usize) -> Result<CommutingPair> {
    if n == 0 {
        return Err(Error::InvalidInput("renormalization level starts at 1".into()));
    }
    pair_from_lift(lift, n - 1)?.normalize()
}
