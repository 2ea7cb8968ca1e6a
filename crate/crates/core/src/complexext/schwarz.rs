use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extended::ExtendedLift;
use super::poincare::{poincare_diam, view_angle, PoincareDisk};
use crate::error::{Error, Result};
use crate::maps::{closest_returns, iterate};

/// One pull-back from `f^j(I_n)` to `f^{j-1}(I_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzStep {
    pub j: u64,
    pub theta_in: f64,
    /// Largest angle whose disk contains every pulled-back boundary point.
    pub theta_out: f64,
    /// `theta_out - theta_in`; negative values are a loss of angle.
    pub margin: f64,
    /// `(theta_in - theta_out) / (|J| diam D_theta(J))` for the target interval `J`.
    pub schwarz_constant: f64,
    /// Boundary points whose inverse did not converge or left the band;
    /// excluded from `theta_out`.
    pub failed_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzReport {
    pub level: usize,
    pub theta: f64,
    pub steps: Vec<SchwarzStep>,
    pub theta_final: f64,
    pub worst_margin: f64,
    pub max_schwarz_constant: f64,
}

fn interval(f: &ExtendedLift, d: f64, j: u64) -> (f64, f64) {
    let a = iterate(f.base.as_ref(), 0.0, j);
    let b = iterate(f.base.as_ref(), d, j);
    (a.min(b), a.max(b))
}

/// Pull the boundary of `D_theta(f^j(I_n))` back through the inverse branches
/// of `F` for `j = q_{n+1}, ..., 2`, refitting the angle at every step.
pub fn schwarz_inclusion_check(
    f: &ExtendedLift,
    n: usize,
    theta: f64,
    boundary_samples: usize,
) -> Result<SchwarzReport> {
    let cr = closest_returns(f.base.as_ref(), n + 1)?;
    let d = cr.d[n];
    let q = cr.q[n + 1];
    let mut steps = Vec::new();
    let mut th = theta;
    for j in (2..=q).rev() {
        let (a, b) = interval(f, d, j);
        let (pa, pb) = interval(f, d, j - 1);
        let disk = PoincareDisk::new(a, b, th);
        let pts = disk.boundary_points(boundary_samples.div_ceil(2));
        let pulled: Vec<Result<f64>> = pts
            .par_iter()
            .map(|&z| f.inverse_near(z, pa, pb).map(|w| view_angle(w, pa, pb)))
            .collect();
        let mut out = std::f64::consts::PI;
        let mut failed_points = 0;
        let mut last_failure = None;
        for angle in pulled {
            match angle {
                Ok(a) => out = out.min(a),
                Err(e @ (Error::NewtonDivergence(_) | Error::BandExceeded { .. })) => {
                    failed_points += 1;
                    last_failure = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        if failed_points == pts.len() {
            return Err(last_failure.expect("at least one boundary point"));
        }
        let loss = th - out;
        steps.push(SchwarzStep {
            j,
            theta_in: th,
            theta_out: out,
            margin: out - th,
            schwarz_constant: loss / ((pb - pa) * poincare_diam(th, pa, pb)),
            failed_points,
        });
        th = out;
    }
    let worst_margin = steps.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    let max_schwarz_constant = steps.iter().map(|s| s.schwarz_constant).fold(f64::NEG_INFINITY, f64::max);
    Ok(SchwarzReport {
        level: n,
        theta,
        theta_final: th,
        steps,
        worst_margin,
        max_schwarz_constant,
    })
}
