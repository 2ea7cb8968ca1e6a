use std::sync::Arc;

use num_complex::Complex64;

use super::interp::{model_map, Identity, InterpolationExtension, ModelChart, RealMap, Translation, DEFAULT_ORDER};
use super::jet::WirtingerJet;
use crate::error::{Error, Result};
use crate::maps::CircleLift;

/// Target half-height of the band on which the extension is used.
pub const DEFAULT_BAND: f64 = 0.05;
const MIN_BAND: f64 = 1e-4;

/// Factor a critical lift as `f = h2 o A o h1` with the model map `A`,
/// `h1 = A^{-1} o (f - f(0))` and `h2` the translation by `f(0)`.
pub fn decompose(lift: Arc<dyn CircleLift>) -> (Arc<dyn RealMap>, Arc<dyn RealMap>) {
    let h2 = Arc::new(Translation(lift.eval(0.0)));
    if lift.is_model_translate() {
        (Arc::new(Identity), h2)
    } else {
        (Arc::new(ModelChart { lift }), h2)
    }
}

/// `F = H2 o A o H1` on the band `|Im z| < band`.
#[derive(Debug, Clone)]
pub struct ExtendedLift {
    pub base: Arc<dyn CircleLift>,
    pub h1: InterpolationExtension,
    pub h2: InterpolationExtension,
    pub band: f64,
}

impl ExtendedLift {
    /// Extension with the band shrunk from [`DEFAULT_BAND`] until both
    /// factors have positive Jacobian over the band. When both factors are
    /// translations the extension is exact and the band is unbounded.
    pub fn new(base: Arc<dyn CircleLift>) -> Result<Self> {
        let (h1, h2) = decompose(base.clone());
        let mut ext = Self {
            base,
            h1: InterpolationExtension::new(h1, DEFAULT_ORDER),
            h2: InterpolationExtension::new(h2, DEFAULT_ORDER),
            band: DEFAULT_BAND,
        };
        if ext.factors_are_translations()? {
            ext.band = f64::INFINITY;
            return Ok(ext);
        }
        while !ext.factors_are_diffeos_on_band()? {
            ext.band *= 0.5;
            if ext.band < MIN_BAND {
                return Err(Error::InvalidInput("no band keeps H1 and H2 diffeomorphisms".into()));
            }
        }
        Ok(ext)
    }

    fn factors_are_translations(&self) -> Result<bool> {
        for i in 0..64 {
            let x = i as f64 / 64.0;
            for h in [&self.h1, &self.h2] {
                if (h.h.deriv(x)? - 1.0).abs() > 1e-12 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn factors_are_diffeos_on_band(&self) -> Result<bool> {
        for i in 0..64 {
            let x = i as f64 / 64.0;
            for frac in [-1.0, -0.5, 0.5, 1.0] {
                let j1 = self.h1.jet(Complex64::new(x, frac * self.band))?;
                let (w, _) = model_map(j1.value);
                if j1.jacobian() <= 0.0 || self.h2.jet(w)?.jacobian() <= 0.0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn jet(&self, z: Complex64) -> Result<WirtingerJet> {
        if z.im.abs() >= self.band {
            return Err(Error::BandExceeded { band: self.band });
        }
        let j1 = self.h1.jet(z)?;
        let (a, da) = model_map(j1.value);
        let ja = j1.then(&WirtingerJet::holomorphic(a, da));
        Ok(ja.then(&self.h2.jet(a)?))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.jet(z)?.value)
    }

    /// Jet of `F^n` at `z`, failing if the orbit leaves the band.
    pub fn iterate_jet(&self, z: Complex64, n: u64) -> Result<WirtingerJet> {
        let mut acc = WirtingerJet::identity(z);
        for _ in 0..n {
            acc = acc.then(&self.jet(acc.value)?);
        }
        Ok(acc)
    }

    /// Preimage of `target` by one step of `F`, seeded from the real inverse
    /// of `Re target` in `[lo, hi]`.
    pub fn inverse_near(&self, target: Complex64, lo: f64, hi: f64) -> Result<Complex64> {
        let k = lo.min(hi).floor();
        let (target, lo, hi) = (target - k, lo - k, hi - k);
        let x = self.real_inverse(target.re, lo, hi)?;
        let d = self.base.deriv(x, 1);
        let mut w = Complex64::new(x, target.im / d);
        let scale = (hi - lo).abs().max(target.im.abs());
        let tol = NEWTON_TOL * scale + 4.0 * f64::EPSILON * (1.0 + target.norm());
        for _ in 0..NEWTON_MAX_ITER {
            let j = self.jet(w)?;
            let r = target - j.value;
            if r.norm() <= tol {
                return Ok(w + k);
            }
            let step = j
                .solve_increment(r)
                .ok_or_else(|| Error::NewtonDivergence(format!("singular Jacobian at {w}")))?;
            w += step;
        }
        Err(Error::NewtonDivergence(format!("no convergence towards {}", target + k)))
    }

    fn real_inverse(&self, y: f64, lo: f64, hi: f64) -> Result<f64> {
        let (mut a, mut b) = (lo.min(hi), lo.max(hi));
        let w = b - a;
        let mut grow = 0;
        while self.base.eval(a) > y || self.base.eval(b) < y {
            a -= w;
            b += w;
            grow += 1;
            if grow > 60 {
                return Err(Error::RootFindFailure(format!("cannot bracket preimage of {y}")));
            }
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.base.eval(m) < y {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }
}

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

/// `F(z)` for the extended lift.
pub fn extended_lift_eval(f: &ExtendedLift, z: Complex64) -> Result<Complex64> {
    f.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{ArnoldLift, BlaschkeLift, CircleHomeo};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn restricts_to_the_lift_on_the_line() {
        let lift = Arc::new(BlaschkeLift { gamma: 0.37 });
        let f = ExtendedLift::new(lift.clone()).unwrap();
        for x in [-0.4, 0.0, 0.13, 0.5, 0.9] {
            let v = f.eval(c(x, 0.0)).unwrap();
            assert!((v.re - lift.eval(x)).abs() < 1e-13);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn arnold_extension_is_entire() {
        let a = 0.27;
        let f = ExtendedLift::new(Arc::new(ArnoldLift { a })).unwrap();
        let z = c(0.31, 0.02);
        let j = f.jet(z).unwrap();
        let (m, dm) = model_map(z);
        assert!((j.value - (m + a)).norm() < 1e-13);
        assert!((j.dz - dm).norm() < 1e-12);
        assert_eq!(j.dzbar.norm(), 0.0);
        assert!(f.eval(c(0.2, 0.7)).is_ok());
    }

    #[test]
    fn commutes_with_integer_translation() {
        let f = ExtendedLift::new(Arc::new(BlaschkeLift { gamma: 0.2 })).unwrap();
        let z = c(0.41, 0.01);
        let d = f.eval(z + 1.0).unwrap() - f.eval(z).unwrap();
        assert!((d - 1.0).norm() < 1e-12);
    }

    #[test]
    fn band_is_enforced() {
        let f = ExtendedLift::new(Arc::new(BlaschkeLift { gamma: 0.2 })).unwrap();
        assert!(matches!(f.eval(c(0.1, 0.2)), Err(Error::BandExceeded { .. })));
    }

    #[test]
    fn critical_value_derivative_limit() {
        let lift: Arc<dyn CircleLift> = Arc::new(BlaschkeLift { gamma: 0.3 });
        let (h1, h2) = decompose(lift.clone());
        assert_eq!(h2.value(0.25).unwrap(), 0.25 + lift.eval(0.0));
        let limit = (lift.deriv(0.0, 3) / (4.0 * std::f64::consts::PI.powi(2))).cbrt();
        assert!((h1.deriv(0.0).unwrap() - limit).abs() < 1e-12);
        for e in [1e-3, -1e-5, 1e-9, -1e-12] {
            assert!((h1.deriv(e).unwrap() - limit).abs() < 10.0 * e.abs(), "e = {e}");
            assert!((h1.value(e).unwrap() / e - limit).abs() < 10.0 * e.abs(), "e = {e}");
        }
    }

    #[test]
    fn inverse_branch_recovers_point() {
        let f = ExtendedLift::new(Arc::new(BlaschkeLift { gamma: 0.3 })).unwrap();
        let w = c(0.45, 0.003);
        let z = f.eval(w).unwrap();
        let back = f.inverse_near(z, 0.4, 0.5).unwrap();
        assert!((back - w).norm() < 1e-11);
    }
}
