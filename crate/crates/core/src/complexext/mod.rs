//! Asymptotically holomorphic extensions of critical lifts: Wirtinger jets,
//! interpolation extensions, Poincare disks, Beltrami decay along
//! renormalization and the almost-Schwarz inclusion.

mod beltrami;
mod extended;
mod interp;
mod jet;
mod poincare;
mod schwarz;

pub use beltrami::{beltrami_decay, neighbourhood_samples, BeltramiRecord, DEFAULT_ALPHA, MIN_VALID_FRACTION};
pub use extended::{decompose, extended_lift_eval, ExtendedLift, DEFAULT_BAND};
pub use interp::{
    interp_extend, model_inverse, model_map, FnMap, Identity, InterpolationExtension, ModelChart, RealMap, Translation,
    DEFAULT_ORDER,
};
pub use jet::WirtingerJet;
pub use poincare::{diam_factor, hyperbolic_radius, poincare_contains, poincare_diam, view_angle, PoincareDisk};
pub use schwarz::{schwarz_inclusion_check, SchwarzReport, SchwarzStep};
