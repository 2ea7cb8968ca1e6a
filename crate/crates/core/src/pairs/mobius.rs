use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closest admissible approach to the pole, relative to `1 + |t|`.
const POLE_GUARD: f64 = 1e-9;

/// Pole of the Moebius map fixing -1 and 0 and sending `alpha` to 1.
pub fn mobius_pole(alpha: f64) -> f64 {
    alpha + alpha * (1.0 + alpha) / (1.0 - alpha)
}

/// `T_alpha(t) = (alpha + 1) t / (2 alpha + (alpha - 1) t)`.
pub fn mobius_apply(alpha: f64, t: f64) -> Result<f64> {
    let den = 2.0 * alpha + (alpha - 1.0) * t;
    if den.abs() <= POLE_GUARD * (1.0 + t.abs()) * (1.0 + alpha.abs()) {
        return Err(Error::PoleProximity {
            distance: (t - mobius_pole(alpha)).abs(),
        });
    }
    Ok((alpha + 1.0) * t / den)
}

/// Lower bound `(1/K)(K+1)/(K-1)` for `p_alpha - alpha` when
/// `alpha` lies in `[1/K, K/(K+2)]`.
pub fn pole_gap_lower_bound(k: f64) -> f64 {
    (k + 1.0) / (k * (k - 1.0))
}

/// `(sum_{j<n} B^j) eps`: sup distance between `n`-fold compositions of maps
/// that are `eps`-close, when every map is `B`-Lipschitz.
pub fn composition_gap_bound(b: f64, n: u32, eps: f64) -> f64 {
    let mut s = 0.0;
    let mut bj = 1.0;
    for _ in 0..n {
        s += bj;
        bj *= b;
    }
    s * eps
}

/// The Moebius map `A` with `A(eta0) = -1`, `A(0) = 0`, `A(xi0) = 1`,
/// factored as `T_alpha(t / |eta0|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusNormalizer {
    pub scale: f64,
    pub alpha: f64,
}

impl MobiusNormalizer {
    pub fn new(eta0: f64, xi0: f64) -> Result<Self> {
        if !(eta0 < 0.0 && xi0 > 0.0) {
            return Err(Error::InvalidInput(format!("need eta0 < 0 < xi0, got {eta0}, {xi0}")));
        }
        Ok(Self {
            scale: -eta0,
            alpha: xi0 / -eta0,
        })
    }

    pub fn pole(&self) -> f64 {
        mobius_pole(self.alpha) * self.scale
    }

    /// `A(t)` and `A'(t)`.
    pub fn apply(&self, t: f64) -> Result<(f64, f64)> {
        let a = self.alpha;
        let u = t / self.scale;
        let den = 2.0 * a + (a - 1.0) * u;
        if den.abs() <= POLE_GUARD * (1.0 + u.abs()) * (1.0 + a) {
            return Err(Error::PoleProximity {
                distance: (t - self.pole()).abs(),
            });
        }
        let v = (a + 1.0) * u / den;
        let d = 2.0 * a * (a + 1.0) / (den * den) / self.scale;
        Ok((v, d))
    }

    /// `A^{-1}(s)` and its derivative.
    pub fn invert(&self, s: f64) -> (f64, f64) {
        let a = self.alpha;
        let den = (a + 1.0) - (a - 1.0) * s;
        let u = 2.0 * a * s / den;
        let d = 2.0 * a * (a + 1.0) / (den * den);
        (u * self.scale, d * self.scale)
    }
}
