//! Dynamical partitions `P_n` of the critical orbit and real-bounds
//! statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{closest_returns, iterate_deriv, CircleLift};

/// Samples per interval for distortion estimates.
pub const DISTORTION_SAMPLES: usize = 32;
/// Allowed defect in the tiling of the circle.
pub const TILING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtomKind {
    /// `f^j(I_n)`, `0 <= j < q_{n+1}`.
    Long,
    /// `f^j(I_{n+1})`, `0 <= j < q_n`.
    Short,
}

/// One atom, labelled by the orbit index `j` of its iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub kind: AtomKind,
    pub j: u64,
    /// Position of the counter-clockwise endpoint on `[0, 1)`.
    pub start: f64,
    pub length: f64,
    /// Orbit indices of the endpoints in circular order.
    pub ends: (u64, u64),
}

/// Atoms of `P_n` in circular order starting at the critical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalPartition {
    pub level: usize,
    pub q_n: u64,
    pub q_next: u64,
    pub atoms: Vec<Atom>,
}

impl DynamicalPartition {
    pub fn total_length(&self) -> f64 {
        self.atoms.iter().map(|a| a.length).sum()
    }

    pub fn max_atom(&self) -> f64 {
        self.atoms.iter().map(|a| a.length).fold(0.0, f64::max)
    }

    /// The atom `f^j(I)` of the given family.
    pub fn atom(&self, kind: AtomKind, j: u64) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.kind == kind && a.j == j)
    }

    /// Atoms of `finer` contained in `atom`, by endpoint positions.
    pub fn atoms_inside<'a>(&self, atom: &Atom, finer: &'a DynamicalPartition) -> Vec<&'a Atom> {
        let eps = 1e-12;
        finer
            .atoms
            .iter()
            .filter(|b| {
                let off = (b.start - atom.start).rem_euclid(1.0);
                off + b.length <= atom.length + eps
            })
            .collect()
    }
}

/// Build `P_n` from the first `q_n + q_{n+1}` points of the critical orbit.
pub fn build_partition(lift: &dyn CircleLift, n: usize) -> Result<DynamicalPartition> {
    if n == 0 {
        return Err(Error::InvalidInput("partitions start at level 1".into()));
    }
    let cr = closest_returns(lift, n + 1)?;
    let (qn, qm) = (cr.q[n], cr.q[n + 1]);
    let total = (qn + qm) as usize;
    let mut pos = Vec::with_capacity(total);
    let mut x = 0.0f64;
    for _ in 0..total {
        pos.push(x.rem_euclid(1.0));
        x = lift.eval(x);
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| pos[a].total_cmp(&pos[b]));
    let start = order.iter().position(|&i| i == 0).unwrap();
    order.rotate_left(start);
    let mut atoms = Vec::with_capacity(total);
    for k in 0..total {
        let (i1, i2) = (order[k] as u64, order[(k + 1) % total] as u64);
        let (lo, diff) = (i1.min(i2), i1.abs_diff(i2));
        let kind = if diff == qn && lo < qm {
            AtomKind::Long
        } else if diff == qm && lo < qn {
            AtomKind::Short
        } else {
            return Err(Error::CombinatoricsMismatch {
                level: n,
                detail: format!("orbit points {i1} and {i2} are adjacent"),
            });
        };
        let mut length = (pos[i2 as usize] - pos[i1 as usize]).rem_euclid(1.0);
        if total == 1 {
            length = 1.0;
        }
        atoms.push(Atom {
            kind,
            j: lo,
            start: pos[i1 as usize],
            length,
            ends: (i1, i2),
        });
    }
    let part = DynamicalPartition {
        level: n,
        q_n: qn,
        q_next: qm,
        atoms,
    };
    let defect = (part.total_length() - 1.0).abs();
    if defect > TILING_TOLERANCE {
        return Err(Error::CombinatoricsMismatch {
            level: n,
            detail: format!("atoms cover the circle up to {defect:e}"),
        });
    }
    Ok(part)
}

/// Largest and smallest `max(|I|, |J|) / min(|I|, |J|)` over circularly
/// adjacent atoms `I`, `J`. The ratio ignores orientation, so levels of both
/// parities are comparable.
pub fn adjacency_ratios(part: &DynamicalPartition) -> (f64, f64) {
    let n = part.atoms.len();
    let mut hi = f64::MIN;
    let mut lo = f64::MAX;
    for k in 0..n {
        let (a, b) = (part.atoms[k].length, part.atoms[(k + 1) % n].length);
        let r = a.max(b) / a.min(b);
        hi = hi.max(r);
        lo = lo.min(r);
    }
    (hi, lo)
}

fn derivative_spread(lift: &dyn CircleLift, a: f64, b: f64, m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut hi = f64::MIN;
    let mut lo = f64::MAX;
    for i in 0..DISTORTION_SAMPLES {
        let x = a + (b - a) * i as f64 / (DISTORTION_SAMPLES - 1) as f64;
        let d = iterate_deriv(lift, x, m).abs();
        hi = hi.max(d);
        lo = lo.min(d);
    }
    hi / lo
}

/// Distortion `sup |Df^m(x)| / |Df^m(y)|` of `f^{q_{n+1}-1}` on `f(I_n)` (long)
/// and of `f^{q_n-1}` on `f(I_{n+1})` (short).
pub fn distortion_ratios(lift: &dyn CircleLift, n: usize) -> Result<(f64, f64)> {
    let cr = closest_returns(lift, n + 1)?;
    let f0 = lift.eval(0.0);
    let long = derivative_spread(lift, f0, lift.eval(cr.d[n]), cr.q[n + 1] - 1);
    let short = derivative_spread(lift, f0, lift.eval(cr.d[n + 1]), cr.q[n] - 1);
    Ok((long, short))
}

/// Real-bounds summary of one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub level: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub max_atom: f64,
    pub distortion_long: f64,
    pub distortion_short: f64,
}

pub fn bounds_record(lift: &dyn CircleLift, n: usize) -> Result<BoundsRecord> {
    let part = build_partition(lift, n)?;
    let (max_ratio, min_ratio) = adjacency_ratios(&part);
    let (distortion_long, distortion_short) = distortion_ratios(lift, n)?;
    Ok(BoundsRecord {
        level: n,
        max_ratio,
        min_ratio,
        max_atom: part.max_atom(),
        distortion_long,
        distortion_short,
    })
}
