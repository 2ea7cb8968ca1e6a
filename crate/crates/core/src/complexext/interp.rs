use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::jet::WirtingerJet;
use crate::error::{Error, Result};
use crate::maps::{model_lift, CircleLift};

/// Interpolation order of the default extension.
pub const DEFAULT_ORDER: usize = 3;

/// A real map of the line with a first-derivative oracle.
pub trait RealMap: Send + Sync + fmt::Debug {
    fn value(&self, x: f64) -> Result<f64>;
    fn deriv(&self, x: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy)]
pub struct Identity;

impl RealMap for Identity {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(x)
    }

    fn deriv(&self, _x: f64) -> Result<f64> {
        Ok(1.0)
    }
}

/// Real map given by closed-form value and derivative.
pub struct FnMap<F: Fn(f64) -> (f64, f64) + Send + Sync>(pub F);

impl<F: Fn(f64) -> (f64, f64) + Send + Sync> fmt::Debug for FnMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnMap")
    }
}

impl<F: Fn(f64) -> (f64, f64) + Send + Sync> RealMap for FnMap<F> {
    fn value(&self, x: f64) -> Result<f64> {
        Ok((self.0)(x).0)
    }

    fn deriv(&self, x: f64) -> Result<f64> {
        Ok((self.0)(x).1)
    }
}

/// Model map `t - sin(2 pi t)/(2 pi)` at a complex point: value and derivative.
pub fn model_map(z: Complex64) -> (Complex64, Complex64) {
    let w = 2.0 * PI * z;
    (z - w.sin() / (2.0 * PI), 1.0 - w.cos())
}

fn model_real(x: f64) -> (f64, f64) {
    model_lift(x)
}

const INVERSE_MAX_ITER: usize = 80;
const INVERSE_RESIDUAL: f64 = 1e-12;

/// Inverse of the model map on the line, by safeguarded Newton with a
/// bisection fallback. Accurate relative to the distance from the nearest
/// critical value.
pub fn model_inverse(y: f64) -> Result<f64> {
    let k = y.round();
    let y0 = y - k;
    if y0 == 0.0 {
        return Ok(k);
    }
    // |x - A(x)| <= 1/(2 pi) < 0.2.
    let (mut lo, mut hi) = (y0 - 0.2, y0 + 0.2);
    let mut x = if y0.abs() < 1e-3 {
        (6.0 * y0 / (4.0 * PI * PI)).cbrt()
    } else {
        y0
    };
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    for _ in 0..INVERSE_MAX_ITER {
        let (fx, dfx) = model_real(x);
        let r = fx - y0;
        if r == 0.0 {
            break;
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton_out = dfx == 0.0 || (x - r / dfx - lo) * (x - r / dfx - hi) > 0.0;
        if newton_out || (2.0 * r).abs() > (dx_old * dfx).abs() {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = r / dfx;
            x -= dx;
        }
        if dx.abs() <= f64::EPSILON * x.abs() || hi - lo <= 2.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    let resid = (model_real(x).0 - y0).abs();
    if resid > INVERSE_RESIDUAL * y0.abs() {
        return Err(Error::RootFindFailure(format!(
            "model inverse at {y}: residual {resid:e}"
        )));
    }
    Ok(x + k)
}

/// `A^{-1} o (f - f(0))`: the smooth chart that straightens a critical lift
/// onto the model map, so that `f = A o h + f(0)`.
#[derive(Debug, Clone)]
pub struct ModelChart {
    pub lift: Arc<dyn CircleLift>,
}

impl ModelChart {
    /// `h(r)` for `x = k + r` with `|r| <= 1/2`; `h(x) = k + h(r)`.
    fn reduced(&self, x: f64) -> Result<(f64, f64, f64)> {
        let k = x.round();
        let r = x - k;
        Ok((k, r, model_inverse(self.lift.excess(r))?))
    }
}

impl RealMap for ModelChart {
    fn value(&self, x: f64) -> Result<f64> {
        let (k, _, h) = self.reduced(x)?;
        Ok(k + h)
    }

    fn deriv(&self, x: f64) -> Result<f64> {
        let (_, r, h) = self.reduced(x)?;
        let da = model_real(h).1;
        if da == 0.0 {
            // Cubic tangency of f and A at the critical point.
            return Ok((self.lift.deriv(r, 3) / (4.0 * PI * PI)).cbrt());
        }
        Ok(self.lift.deriv(r, 1) / da)
    }
}

/// `x + shift`.
#[derive(Debug, Clone, Copy)]
pub struct Translation(pub f64);

impl RealMap for Translation {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(x + self.0)
    }

    fn deriv(&self, _x: f64) -> Result<f64> {
        Ok(1.0)
    }
}

/// Extension of a real map to the plane by complex evaluation of its Lagrange
/// interpolant on the nodes `x + j y / r`, symmetrized under conjugation.
#[derive(Debug, Clone)]
pub struct InterpolationExtension {
    pub h: Arc<dyn RealMap>,
    pub order: usize,
    /// `(-1)^j C(r, j) / (1 + i j / r)`, normalized to sum 1.
    weights: Vec<Complex64>,
    /// `(-1)^j C(r, j) / N`, the weights of `d/dzbar`.
    bar_weights: Vec<Complex64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl InterpolationExtension {
    pub fn new(h: Arc<dyn RealMap>, order: usize) -> Self {
        assert!(order >= 1, "interpolation order must be positive");
        let r = order as f64;
        let raw: Vec<Complex64> = (0..=order)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(order, j) / Complex64::new(1.0, j as f64 / r)
            })
            .collect();
        let norm: Complex64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / norm).collect();
        let bar_weights = (0..=order)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * binomial(order, j), 0.0) / norm
            })
            .collect();
        Self {
            h,
            order,
            weights,
            bar_weights,
        }
    }

    /// Unsymmetrized extension at `z`.
    pub fn raw_jet(&self, z: Complex64) -> Result<WirtingerJet> {
        if z.im == 0.0 {
            return Ok(WirtingerJet::holomorphic(
                Complex64::new(self.h.value(z.re)?, 0.0),
                Complex64::new(self.h.deriv(z.re)?, 0.0),
            ));
        }
        let r = self.order as f64;
        let mut value = Complex64::new(0.0, 0.0);
        let mut dz = Complex64::new(0.0, 0.0);
        let mut dzbar = Complex64::new(0.0, 0.0);
        for j in 0..=self.order {
            let x = z.re + j as f64 * z.im / r;
            let (hv, hd) = (self.h.value(x)?, self.h.deriv(x)?);
            value += self.weights[j] * hv;
            dz += self.weights[j] * Complex64::new(1.0, -(j as f64) / r) * (0.5 * hd);
            dzbar += self.bar_weights[j] * (0.5 * hd);
        }
        Ok(WirtingerJet { value, dz, dzbar })
    }

    /// `(H(z) + conj(H(conj z)))/2` and its Wirtinger derivatives.
    pub fn jet(&self, z: Complex64) -> Result<WirtingerJet> {
        if z.im == 0.0 {
            return self.raw_jet(z);
        }
        let a = self.raw_jet(z)?;
        let b = self.raw_jet(z.conj())?;
        Ok(WirtingerJet {
            value: 0.5 * (a.value + b.value.conj()),
            dz: 0.5 * (a.dz + b.dz.conj()),
            dzbar: 0.5 * (a.dzbar + b.dzbar.conj()),
        })
    }
}

/// Order-3 symmetrized extension of `h` evaluated at `z`.
pub fn interp_extend(h: Arc<dyn RealMap>, z: Complex64) -> Result<WirtingerJet> {
    InterpolationExtension::new(h, DEFAULT_ORDER).jet(z)
}
