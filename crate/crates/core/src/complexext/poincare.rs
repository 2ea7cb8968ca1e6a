use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The set `D_theta(a, b)` of points seeing `(a, b)` under an angle greater
/// than `theta`, together with the open interval itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareDisk {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

/// `max(1, (1 + cos theta)/sin theta)`.
pub fn diam_factor(theta: f64) -> f64 {
    ((1.0 + theta.cos()) / theta.sin()).max(1.0)
}

/// Euclidean diameter of `D_theta(a, b)`.
pub fn poincare_diam(theta: f64, a: f64, b: f64) -> f64 {
    diam_factor(theta) * (b - a).abs()
}

/// Hyperbolic radius of `D_theta(a, b)` about `(a, b)` in the slit plane.
pub fn hyperbolic_radius(theta: f64) -> f64 {
    (PI / 2.0 - theta / 4.0).tan().ln()
}

/// Angle under which `z` sees the segment `[a, b]`, in `[0, pi]`.
pub fn view_angle(z: Complex64, a: f64, b: f64) -> f64 {
    ((Complex64::new(a, 0.0) - z) / (Complex64::new(b, 0.0) - z)).arg().abs()
}

impl PoincareDisk {
    pub fn new(a: f64, b: f64, theta: f64) -> Self {
        assert!(theta > 0.0 && theta < PI, "theta must lie in (0, pi)");
        Self {
            a: a.min(b),
            b: a.max(b),
            theta,
        }
    }

    /// Center and radius of the upper bounding circle.
    pub fn upper_circle(&self) -> (Complex64, f64) {
        let w = self.b - self.a;
        let center = Complex64::new(0.5 * (self.a + self.b), w / (2.0 * self.theta.tan()));
        (center, w / (2.0 * self.theta.sin()))
    }

    pub fn diam(&self) -> f64 {
        poincare_diam(self.theta, self.a, self.b)
    }

    /// Membership by the explicit two-disk construction.
    pub fn contains(&self, z: Complex64) -> bool {
        if z.im == 0.0 {
            return z.re > self.a && z.re < self.b;
        }
        let (c, r) = self.upper_circle();
        let w = if z.im > 0.0 { z } else { z.conj() };
        (w - c).norm() < r
    }

    /// `m` points on the upper boundary arc followed by their conjugates.
    pub fn boundary_points(&self, m: usize) -> Vec<Complex64> {
        let (c, r) = self.upper_circle();
        let phi_b = (Complex64::new(self.b, 0.0) - c).arg();
        let mut phi_a = (Complex64::new(self.a, 0.0) - c).arg();
        if phi_a < phi_b {
            phi_a += 2.0 * PI;
        }
        let upper: Vec<Complex64> = (0..m)
            .map(|k| {
                let phi = phi_b + (k as f64 + 0.5) / m as f64 * (phi_a - phi_b);
                c + r * Complex64::from_polar(1.0, phi)
            })
            .collect();
        let lower: Vec<Complex64> = upper.iter().map(|z| z.conj()).collect();
        upper.into_iter().chain(lower).collect()
    }
}

/// Membership test `z in D_theta(a, b)`.
pub fn poincare_contains(disk: &PoincareDisk, z: Complex64) -> bool {
    disk.contains(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn right_angle_is_the_diameter_disk() {
        let d = PoincareDisk::new(0.0, 1.0, PI / 2.0);
        assert!((d.diam() - 1.0).abs() < 1e-15);
        assert!(d.contains(Complex64::new(0.5, 0.49)));
        assert!(!d.contains(Complex64::new(0.5, 0.51)));
        assert!(!d.contains(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn boundary_sees_the_interval_at_theta() {
        for theta in [0.3, PI / 2.0, 2.5] {
            let d = PoincareDisk::new(-0.2, 0.7, theta);
            for z in d.boundary_points(16) {
                assert!((view_angle(z, d.a, d.b) - theta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_has_constant_hyperbolic_distance() {
        // sqrt((1 + z)/(1 - z)) sends the slit plane of (-1, 1) to the right
        // half-plane with the interval on the positive axis.
        for theta in [0.4, 1.2, PI / 2.0, 2.4] {
            let d = PoincareDisk::new(-1.0, 1.0, theta);
            for z in d.boundary_points(8) {
                let w = ((1.0 + z) / (1.0 - z)).sqrt();
                let psi = w.arg().abs();
                let dist = (PI / 4.0 + psi / 2.0).tan().ln();
                assert!((dist - hyperbolic_radius(theta)).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn membership_agrees_with_view_angle(
            x in -1.0f64..2.0, y in -1.5f64..1.5, theta in 0.1f64..3.0
        ) {
            prop_assume!(y.abs() > 1e-9);
            let d = PoincareDisk::new(0.0, 1.0, theta);
            let z = Complex64::new(x, y);
            let angle = view_angle(z, 0.0, 1.0);
            prop_assume!((angle - theta).abs() > 1e-9);
            prop_assert_eq!(d.contains(z), angle > theta);
        }

        #[test]
        fn diameter_bounds_the_boundary(theta in 0.05f64..3.1) {
            let d = PoincareDisk::new(0.0, 1.0, theta);
            let pts = d.boundary_points(64);
            let mut far: f64 = 1.0;
            for p in &pts {
                for q in &pts {
                    far = far.max((p - q).norm());
                }
            }
            prop_assert!(far <= d.diam() * (1.0 + 1e-9));
            prop_assert!(far >= d.diam() * 0.99);
        }
    }
}
