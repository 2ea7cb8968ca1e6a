//! Critical circle map families, rotation numbers, closest returns and
//! parameter tuning.
//!
//! Every lift is normalized so that the critical point projects from 0.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{convergents_upto, ContinuedFraction, Convergents};
use crate::error::{Error, Result};

/// Default cap on the return times used while tuning.
pub const DEFAULT_Q_CAP: u64 = 1 << 18;

/// Degree-one lift of an orientation-preserving circle homeomorphism.
pub trait CircleHomeo: Send + Sync {
    fn eval(&self, x: f64) -> f64;
}

/// Smooth lift with derivative oracles of order 1 to 3.
pub trait CircleLift: CircleHomeo + fmt::Debug {
    fn deriv(&self, x: f64, order: u8) -> f64;

    /// Short human-readable identifier.
    fn label(&self) -> String;

    /// `f(x) - f(0)`, which should stay accurate relative to its size near
    /// the critical point.
    fn excess(&self, x: f64) -> f64 {
        self.eval(x) - self.eval(0.0)
    }

    /// True when `f = A + f(0)` for the model map `A`.
    fn is_model_translate(&self) -> bool {
        false
    }
}

/// Model map `A(x) = x - sin(2 pi x)/(2 pi)` and its derivative, with full
/// relative accuracy near the critical points `x = k`.
pub fn model_lift(x: f64) -> (f64, f64) {
    let k = x.round();
    let r = x - k;
    let s = (PI * r).sin();
    let d = 2.0 * s * s;
    let u = 2.0 * PI * r;
    if u.abs() > 0.35 {
        return (x - u.sin() / (2.0 * PI), d);
    }
    // (u - sin u)/(2 pi) as an alternating series.
    let u2 = u * u;
    let mut term = u * u2 / 6.0;
    let mut sum = term;
    for m in 2..10 {
        let m = m as f64;
        term *= -u2 / ((2.0 * m) * (2.0 * m + 1.0));
        sum += term;
    }
    (k + sum / (2.0 * PI), d)
}

/// `x + a - sin(2 pi x)/(2 pi)`.
pub fn arnold_lift_eval(a: f64, x: f64, order: u8) -> f64 {
    let t = 2.0 * PI * x;
    match order {
        0 => x + a - t.sin() / (2.0 * PI),
        1 => {
            let s = (PI * x).sin();
            2.0 * s * s
        }
        2 => 2.0 * PI * t.sin(),
        3 => 4.0 * PI * PI * t.cos(),
        _ => panic!("derivative order {order} not supported"),
    }
}

/// Lift of `z -> e^{2 pi i gamma} z^2 (z - 3)/(1 - 3z)` on the unit circle.
///
/// The argument of `(z - 3)/(1 - 3z)` on `|z| = 1` reduces to
/// `2 arg(1 - z/3) - 2 pi x`, and `1 - z/3` stays in the right half-plane, so
/// the principal branch of `atan2` is already continuous.
pub fn blaschke_lift_eval(gamma: f64, x: f64, order: u8) -> f64 {
    let t = 2.0 * PI * x;
    let (sin_t, cos_t) = t.sin_cos();
    let s = (PI * x).sin();
    // 5 - 3 cos t, written without cancellation near t = 0.
    let den = 2.0 + 6.0 * s * s;
    match order {
        0 => gamma + x - sin_t.atan2(3.0 - cos_t) / PI,
        1 => 12.0 * s * s / den,
        2 => 2.0 * PI * 12.0 * sin_t / (den * den),
        3 => {
            let num = cos_t * den - 6.0 * sin_t * sin_t;
            4.0 * PI * PI * 12.0 * num / (den * den * den)
        }
        _ => panic!("derivative order {order} not supported"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArnoldLift {
    pub a: f64,
}

impl CircleHomeo for ArnoldLift {
    fn eval(&self, x: f64) -> f64 {
        arnold_lift_eval(self.a, x, 0)
    }
}

impl CircleLift for ArnoldLift {
    fn deriv(&self, x: f64, order: u8) -> f64 {
        arnold_lift_eval(self.a, x, order)
    }

    fn label(&self) -> String {
        format!("arnold(a={})", self.a)
    }

    fn excess(&self, x: f64) -> f64 {
        model_lift(x).0
    }

    fn is_model_translate(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeLift {
    pub gamma: f64,
}

impl CircleHomeo for BlaschkeLift {
    fn eval(&self, x: f64) -> f64 {
        blaschke_lift_eval(self.gamma, x, 0)
    }
}

impl CircleLift for BlaschkeLift {
    fn deriv(&self, x: f64, order: u8) -> f64 {
        blaschke_lift_eval(self.gamma, x, order)
    }

    fn label(&self) -> String {
        format!("blaschke(gamma={})", self.gamma)
    }

    fn excess(&self, x: f64) -> f64 {
        // Cancellation-free form with t = tan(pi r).
        let k = x.round();
        let t = (PI * (x - k)).tan();
        k + (2.0 * t * t * t / (1.0 + 3.0 * t * t)).atan() / PI
    }
}

/// Rigid rotation `x + theta`. Not critical; used as a control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidRotation {
    pub theta: f64,
}

impl CircleHomeo for RigidRotation {
    fn eval(&self, x: f64) -> f64 {
        x + self.theta
    }
}

impl CircleLift for RigidRotation {
    fn deriv(&self, _x: f64, order: u8) -> f64 {
        if order == 1 {
            1.0
        } else {
            0.0
        }
    }

    fn label(&self) -> String {
        format!("rigid(theta={})", self.theta)
    }
}

/// One-parameter families monotone in their parameter on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Arnold,
    Blaschke,
    Rigid,
}

impl Family {
    pub fn lift(self, param: f64) -> Arc<dyn CircleLift> {
        match self {
            Family::Arnold => Arc::new(ArnoldLift { a: param }),
            Family::Blaschke => Arc::new(BlaschkeLift { gamma: param }),
            Family::Rigid => Arc::new(RigidRotation { theta: param }),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "arnold" => Ok(Family::Arnold),
            "blaschke" => Ok(Family::Blaschke),
            "rigid" => Ok(Family::Rigid),
            other => Err(Error::InvalidInput(format!("unknown family '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Arnold => "arnold",
            Family::Blaschke => "blaschke",
            Family::Rigid => "rigid",
        }
    }
}

/// `F^n(x)`.
pub fn iterate(f: &dyn CircleHomeo, x: f64, n: u64) -> f64 {
    (0..n).fold(x, |y, _| f.eval(y))
}

/// Derivative of `F^n` at `x`, as the product of `F'` along the orbit.
pub fn iterate_deriv(f: &dyn CircleLift, x: f64, n: u64) -> f64 {
    let mut y = x;
    let mut d = 1.0;
    for _ in 0..n {
        d *= f.deriv(y, 1);
        y = f.eval(y);
    }
    d
}

/// Birkhoff estimate of the rotation number with its enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `F^N(0)/N`; the true rotation number lies within `1/N` of it.
pub fn rotation_number(f: &dyn CircleHomeo, n: u64) -> RotationEstimate {
    assert!(n > 0, "iteration count must be positive");
    let value = iterate(f, 0.0, n) / n as f64;
    let w = 1.0 / n as f64;
    RotationEstimate {
        value,
        lower: value - w,
        upper: value + w,
    }
}

/// Closest returns of the critical orbit, `d_k = F^{q_k}(0) - p_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosestReturns {
    /// Partial quotients read off the dynamics, `a_0..a_{depth-1}`.
    pub a: Vec<u64>,
    pub q: Vec<u64>,
    pub p: Vec<u64>,
    pub d: Vec<f64>,
}

impl ClosestReturns {
    pub fn depth(&self) -> usize {
        self.d.len() - 1
    }
}

const MAX_STEPS_PER_LEVEL: u64 = 1 << 22;

/// Closest returns for levels `0..=depth`, with the combinatorics derived from
/// the orbit itself: `a_k` is the number of times `T^{-p_k} F^{q_k}` can be
/// applied to `d_{k-1}` before the sign flips.
pub fn closest_returns(f: &dyn CircleHomeo, depth: usize) -> Result<ClosestReturns> {
    let d0 = f.eval(0.0);
    if !(d0 > 0.0 && d0 < 1.0) {
        return Err(Error::CombinatoricsMismatch {
            level: 0,
            detail: format!("F(0) = {d0} not in (0, 1)"),
        });
    }
    // Level -1 is (q, p, d) = (0, 1, -1).
    let mut q = vec![0u64, 1];
    let mut p = vec![1u64, 0];
    let mut d = vec![-1.0, d0];
    let mut a = Vec::with_capacity(depth);
    for k in 1..=depth {
        let (qk, pk) = (q[k], p[k]);
        let (prev, cur) = (d[k - 1], d[k]);
        let step = |x: f64| iterate(f, x, qk) - pk as f64;
        let mut x = prev;
        let mut j = 0u64;
        loop {
            let y = step(x);
            if y == 0.0 {
                return Err(Error::CombinatoricsMismatch {
                    level: k,
                    detail: "critical orbit is periodic".into(),
                });
            }
            if (y > 0.0) != (prev > 0.0) {
                break;
            }
            x = y;
            j += 1;
            if j.saturating_mul(qk) > MAX_STEPS_PER_LEVEL {
                return Err(Error::CombinatoricsMismatch {
                    level: k,
                    detail: format!("no sign change after {j} returns"),
                });
            }
        }
        // Returns on the same side nest; opposite sides need not be ordered.
        if j == 0 || x.abs() >= prev.abs() || (x > 0.0) == (cur > 0.0) {
            return Err(Error::CombinatoricsMismatch {
                level: k,
                detail: format!("return {x} does not nest inside {prev}"),
            });
        }
        let (qn, pn) = j
            .checked_mul(qk)
            .and_then(|v| v.checked_add(q[k - 1]))
            .zip(j.checked_mul(pk).and_then(|v| v.checked_add(p[k - 1])))
            .ok_or(Error::IntegerOverflow { largest_valid: k })?;
        a.push(j);
        q.push(qn);
        p.push(pn);
        d.push(x);
    }
    Ok(ClosestReturns {
        a,
        q: q[1..].to_vec(),
        p: p[1..].to_vec(),
        d: d[1..].to_vec(),
    })
}

/// First level `k <= K` at which `sign(F^{q_k}(0) - p_k)` differs from the
/// rigid rotation sign `(-1)^k`, or `None` if all agree.
pub fn first_violation(f: &dyn CircleHomeo, conv: &Convergents) -> Option<usize> {
    let mut x = 0.0;
    let mut j = 0u64;
    for k in 0..conv.len() {
        x = iterate(f, x, conv.q[k] - j);
        j = conv.q[k];
        let dk = x - conv.p[k] as f64;
        let ok = if k % 2 == 0 { dk > 0.0 } else { dk < 0.0 };
        if !ok {
            return Some(k);
        }
    }
    None
}

/// Result of combinatorial bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuned {
    pub family: Family,
    pub param: f64,
    pub bracket: (f64, f64),
    /// Deepest level whose sign was checked and matched at `param`.
    pub matched_depth: usize,
    /// Deepest matched level whose closest return stays above the noise floor.
    pub certified_depth: usize,
    pub iterations: usize,
}

impl Tuned {
    pub fn lift(&self) -> Arc<dyn CircleLift> {
        self.family.lift(self.param)
    }
}

/// Noise floor for closest returns, in units of machine epsilon.
pub const RETURN_NOISE_FLOOR: f64 = 1e3 * f64::EPSILON;

/// Bisect the family parameter on the orbit order of the critical point until
/// the combinatorics of `target` are reproduced through every level with
/// `q_k <= q_cap`, or the bracket collapses to adjacent doubles.
pub fn tune_parameter(family: Family, target: &ContinuedFraction, depth: usize, q_cap: u64) -> Result<Tuned> {
    let conv = convergents_upto(target, q_cap);
    if let Some(n) = target.available() {
        if n <= depth {
            let msg = format!("rotation number has {n} known terms, depth {depth} needs more");
            return Err(if target.is_exact() {
                Error::InvalidInput(format!("{msg}; rational rotation numbers cannot be tuned"))
            } else {
                Error::PrecisionExhausted(msg)
            });
        }
    }
    if conv.len() <= depth {
        return Err(Error::InvalidInput(format!(
            "depth {depth} needs q beyond the cap {q_cap}"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iterations = 0;
    let mut hit = None;
    while iterations < 200 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        match first_violation(family.lift(mid).as_ref(), &conv) {
            Some(k) if k % 2 == 0 => lo = mid,
            Some(_) => hi = mid,
            None => {
                hit = Some(mid);
                break;
            }
        }
    }
    let param = hit.unwrap_or(lo + 0.5 * (hi - lo));
    let lift = family.lift(param);
    let matched_depth = match first_violation(lift.as_ref(), &conv) {
        None => conv.len() - 1,
        Some(0) => return Err(Error::BisectionStall { deepest_matched: 0 }),
        Some(k) => k - 1,
    };
    if matched_depth < depth {
        return Err(Error::BisectionStall {
            deepest_matched: matched_depth,
        });
    }
    let mut x = 0.0;
    let mut j = 0;
    let mut certified_depth = 0;
    for k in 0..=matched_depth {
        x = iterate(lift.as_ref(), x, conv.q[k] - j);
        j = conv.q[k];
        if (x - conv.p[k] as f64).abs() <= RETURN_NOISE_FLOOR {
            break;
        }
        certified_depth = k;
    }
    if certified_depth < depth {
        return Err(Error::PrecisionExhausted(format!(
            "closest returns reach the noise floor at level {}",
            certified_depth + 1
        )));
    }
    Ok(Tuned {
        family,
        param,
        bracket: (lo, hi),
        matched_depth,
        certified_depth,
        iterations,
    })
}
