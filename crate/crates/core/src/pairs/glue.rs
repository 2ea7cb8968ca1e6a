use super::{CommutingPair, Height};
use crate::error::{Error, Result};
use crate::maps::CircleHomeo;

/// Seam tolerance relative to the pair's span.
pub const SEAM_TOLERANCE: f64 = 1e-10;

/// Circle map obtained by identifying `eta(0)` with `xi(0)`, rescaled to a
/// circle of length 1 starting at `eta(0)`.
#[derive(Debug, Clone)]
pub struct GluedMap {
    pair: CommutingPair,
    /// Commutator residual measured when glueing.
    pub seam_residual: f64,
}

impl GluedMap {
    /// Circumference of the glued circle before rescaling.
    pub fn length(&self) -> f64 {
        self.pair.span()
    }
}

impl CircleHomeo for GluedMap {
    fn eval(&self, s: f64) -> f64 {
        let len = self.pair.span();
        let e0 = self.pair.eta0();
        let k = s.floor();
        let t = e0 + (s - k) * len;
        let v = if t < 0.0 {
            self.pair.xi.eval(t)
        } else {
            self.pair.eta.eval(t) + len
        };
        k + (v - e0) / len
    }
}

/// Glue a pair into a circle map, checking the commutator at the seam.
pub fn glue(pair: &CommutingPair) -> Result<GluedMap> {
    let residual = pair.commutator_residual();
    if residual > SEAM_TOLERANCE * pair.span() {
        return Err(Error::SeamDiscontinuity { residual });
    }
    Ok(GluedMap {
        pair: pair.clone(),
        seam_residual: residual,
    })
}

/// Rotation number `[chi(z), chi(R z), ...]` of a pair from `depth` heights.
/// The glued map of such a pair rotates by `1/(1 + rho)` in the orientation
/// used by [`GluedMap`].
pub fn pair_rotation_number(pair: &CommutingPair, depth: usize) -> Result<(Vec<u64>, f64)> {
    let mut heights = Vec::with_capacity(depth);
    let mut z = pair.clone();
    for k in 0..depth {
        match z.height()? {
            Height::Finite(r) if r > 0 => heights.push(r),
            _ => break,
        }
        if k + 1 < depth {
            z = z.renormalize()?;
        }
    }
    let rho = heights.iter().rev().fold(0.0, |x, &a| 1.0 / (a as f64 + x));
    Ok((heights, rho))
}
