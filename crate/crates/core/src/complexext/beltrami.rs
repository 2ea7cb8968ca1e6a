use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extended::ExtendedLift;
use crate::error::{Error, Result};
use crate::maps::closest_returns;

/// Default relative size of the complex neighbourhood `N_alpha(I)`.
pub const DEFAULT_ALPHA: f64 = 0.25;
/// Fraction of samples whose orbit must stay in the band.
pub const MIN_VALID_FRACTION: f64 = 0.9;
const REAL_SAMPLES: usize = 32;

/// Sup of `|mu|` over `N_alpha` of the branch domains at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltramiRecord {
    pub level: usize,
    pub sup_mu_eta: f64,
    pub sup_mu_xi: f64,
    pub skipped_fraction: f64,
    /// Sup of `|mu|` on real samples of the domains.
    pub sup_mu_real: f64,
    /// Fewer than 90% of the samples stayed in the band.
    pub flagged: bool,
}

impl BeltramiRecord {
    pub fn sup_mu(&self) -> f64 {
        self.sup_mu_eta.max(self.sup_mu_xi)
    }
}

/// Samples of `{z : dist(z, [a, b]) < alpha |b - a|}`, excluding 0.
///
/// A quarter of the points lie just inside the boundary at equal arc length
/// from a random phase, where `|mu|` peaks. The rest are jittered over a grid
/// of cells covering the bounding box, visited in random order.
pub fn neighbourhood_samples(a: f64, b: f64, alpha: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let (lo, hi) = (a.min(b), a.max(b));
    let r = alpha * (hi - lo);
    let (w, h) = (hi - lo + 2.0 * r, 2.0 * r);
    let area = (hi - lo) * h + std::f64::consts::PI * r * r;
    let cells = (count as f64 * w * h / area).ceil().max(1.0);
    let ny = (cells * h / w).sqrt().ceil().max(1.0) as usize;
    let nx = (cells / ny as f64).ceil().max(1.0) as usize;
    let mut out = boundary_samples(lo, hi, r * (1.0 - 1e-9), count / 4, rng);
    let count = count - out.len();
    let mut order: Vec<usize> = (0..nx * ny).collect();
    let mut interior = Vec::with_capacity(count);
    while interior.len() < count {
        order.shuffle(rng);
        for &c in &order {
            let (i, j) = (c % nx, c / nx);
            let z = Complex64::new(
                lo - r + w * (i as f64 + rng.gen::<f64>()) / nx as f64,
                -r + h * (j as f64 + rng.gen::<f64>()) / ny as f64,
            );
            let dx = (lo - z.re).max(z.re - hi).max(0.0);
            if dx.hypot(z.im) < r && z != Complex64::new(0.0, 0.0) {
                interior.push(z);
                if interior.len() == count {
                    break;
                }
            }
        }
    }
    out.append(&mut interior);
    out
}

/// Equally spaced points on the stadium `dist(z, [lo, hi]) = r`.
fn boundary_samples(lo: f64, hi: f64, r: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let pi = std::f64::consts::PI;
    let len = hi - lo;
    let perimeter = 2.0 * len + 2.0 * pi * r;
    let phase: f64 = rng.gen();
    (0..count)
        .map(|k| {
            let mut s = perimeter * ((k as f64 + phase) / count as f64);
            if s < len {
                return Complex64::new(lo + s, r);
            }
            s -= len;
            if s < pi * r {
                return Complex64::new(lo, 0.0) + Complex64::from_polar(r, pi / 2.0 + s / r);
            }
            s -= pi * r;
            if s < len {
                return Complex64::new(hi - s, -r);
            }
            s -= len;
            Complex64::new(hi, 0.0) + Complex64::from_polar(r, -pi / 2.0 + s / r)
        })
        .collect()
}

struct BranchStats {
    sup: f64,
    skipped: usize,
    real_sup: f64,
}

fn branch_stats(f: &ExtendedLift, d: f64, q: u64, alpha: f64, samples: usize, rng: &mut ChaCha8Rng) -> Result<BranchStats> {
    let pts = neighbourhood_samples(0.0, d, alpha, samples, rng);
    let mus: Vec<Result<Option<f64>>> = pts
        .par_iter()
        .map(|&z| match f.iterate_jet(z, q) {
            Ok(j) => Ok(Some(j.mu().norm())),
            Err(Error::BandExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut sup = 0.0f64;
    let mut skipped = 0;
    for m in mus {
        match m? {
            Some(v) => sup = sup.max(v),
            None => skipped += 1,
        }
    }
    let mut real_sup = 0.0f64;
    for k in 1..=REAL_SAMPLES {
        let x = d * k as f64 / REAL_SAMPLES as f64;
        real_sup = real_sup.max(f.iterate_jet(Complex64::new(x, 0.0), q)?.mu().norm());
    }
    Ok(BranchStats { sup, skipped, real_sup })
}

/// `sup |mu|` of the extended branches `eta_n = F^{q_n}` on `N_alpha(I_{n-1})`
/// and `xi_n = F^{q_{n-1}}` on `N_alpha(I_n)` for each requested level `n`.
/// Samples whose orbit leaves the band are skipped.
pub fn beltrami_decay(
    f: &ExtendedLift,
    levels: &[usize],
    samples: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<BeltramiRecord>> {
    let deepest = levels.iter().copied().max().unwrap_or(0);
    if levels.contains(&0) {
        return Err(Error::InvalidInput("levels start at 1".into()));
    }
    let cr = closest_returns(f.base.as_ref(), deepest)?;
    let mut out = Vec::with_capacity(levels.len());
    for &n in levels {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let eta = branch_stats(f, cr.d[n - 1], cr.q[n], alpha, samples, &mut rng)?;
        let xi = branch_stats(f, cr.d[n], cr.q[n - 1], alpha, samples, &mut rng)?;
        let skipped_fraction = (eta.skipped + xi.skipped) as f64 / (2 * samples) as f64;
        out.push(BeltramiRecord {
            level: n,
            sup_mu_eta: eta.sup,
            sup_mu_xi: xi.sup,
            skipped_fraction,
            sup_mu_real: eta.real_sup.max(xi.real_sup),
            flagged: skipped_fraction > 1.0 - MIN_VALID_FRACTION,
        });
    }
    Ok(out)
}
