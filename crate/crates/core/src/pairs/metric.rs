use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mobius::MobiusNormalizer;
use super::CommutingPair;
use crate::error::{Error, Result};

/// Relative agreement required between the `N` and `4N` grids.
pub const GRID_AGREEMENT: f64 = 0.01;
/// Values below this are treated as zero when checking grid agreement.
pub const GRID_AGREEMENT_FLOOR: f64 = 1e-12;

/// Samples of `A o zeta o A^{-1}` on one branch.
struct Profile {
    values: Vec<f64>,
    derivs: Vec<f64>,
}

/// Grid on one branch of `[-1, 1]`: `N` uniform points excluding 0.
fn branch_grid(n: usize, left: bool) -> Vec<f64> {
    let h = 1.0 / n as f64;
    if left {
        (0..n).map(|k| -1.0 + k as f64 * h).collect()
    } else {
        (1..=n).map(|k| k as f64 * h).collect()
    }
}

fn profile(pair: &CommutingPair, n: usize, left: bool, with_deriv: bool) -> Result<Profile> {
    let a = MobiusNormalizer::new(pair.eta0(), pair.xi0())?;
    let branch = if left { &pair.xi } else { &pair.eta };
    let pts = branch_grid(n, left);
    let samples: Vec<Result<(f64, f64)>> = pts
        .par_iter()
        .map(|&s| {
            let (t, dt) = a.invert(s);
            if with_deriv {
                let (v, dv) = branch.eval_jet(t);
                let (w, dw) = a.apply(v)?;
                Ok((w, dw * dv * dt))
            } else {
                Ok((a.apply(branch.eval(t))?.0, 0.0))
            }
        })
        .collect();
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    for s in samples {
        let (v, d) = s?;
        values.push(v);
        derivs.push(d);
    }
    Ok(Profile { values, derivs })
}

/// Second derivative from first-derivative samples: centered differences
/// inside, one-sided at the ends.
fn second_derivative(d: &[f64], h: f64) -> Vec<f64> {
    let n = d.len();
    (0..n)
        .map(|k| match k {
            0 => (d[1] - d[0]) / h,
            k if k == n - 1 => (d[n - 1] - d[n - 2]) / h,
            k => (d[k + 1] - d[k - 1]) / (2.0 * h),
        })
        .collect()
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Distance `d_r` between two pairs for `r` in 0..=2, on `n` grid points per
/// branch. Pairs need not be normalized; the Moebius normalization absorbs
/// homotheties.
pub fn metric_d(r: u8, z1: &CommutingPair, z2: &CommutingPair, n: usize) -> Result<f64> {
    if r > 2 {
        return Err(Error::InvalidInput(format!("order {r} not supported")));
    }
    if n < 3 {
        return Err(Error::InvalidInput("need at least 3 grid points".into()));
    }
    let ratio = (z1.xi0() / z1.eta0() - z2.xi0() / z2.eta0()).abs();
    let h = 1.0 / n as f64;
    let mut dist = ratio;
    for left in [true, false] {
        let p1 = profile(z1, n, left, r >= 1)?;
        let p2 = profile(z2, n, left, r >= 1)?;
        dist = dist.max(sup_diff(&p1.values, &p2.values));
        if r >= 1 {
            dist = dist.max(sup_diff(&p1.derivs, &p2.derivs));
        }
        if r >= 2 {
            let s1 = second_derivative(&p1.derivs, h);
            let s2 = second_derivative(&p2.derivs, h);
            dist = dist.max(sup_diff(&s1, &s2));
        }
    }
    Ok(dist)
}

/// A distance evaluated on two grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub coarse: f64,
    pub n: usize,
    pub agrees: bool,
}

/// `d_r` on `4n` points, certified against the `n`-point value.
pub fn metric_d_checked(r: u8, z1: &CommutingPair, z2: &CommutingPair, n: usize) -> Result<MetricValue> {
    let coarse = metric_d(r, z1, z2, n)?;
    let value = metric_d(r, z1, z2, 4 * n)?;
    let agrees = (value - coarse).abs() <= GRID_AGREEMENT * value.abs().max(coarse.abs())
        || value.max(coarse) < GRID_AGREEMENT_FLOOR;
    Ok(MetricValue {
        value,
        coarse,
        n: 4 * n,
        agrees,
    })
}
