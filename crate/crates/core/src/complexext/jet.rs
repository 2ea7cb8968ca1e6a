use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Value and Wirtinger derivatives `d/dz = (d/dx - i d/dy)/2`,
/// `d/dzbar = (d/dx + i d/dy)/2` of a map of the plane at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WirtingerJet {
    pub value: Complex64,
    pub dz: Complex64,
    pub dzbar: Complex64,
}

impl WirtingerJet {
    /// Identity map at `z`.
    pub fn identity(z: Complex64) -> Self {
        Self {
            value: z,
            dz: Complex64::new(1.0, 0.0),
            dzbar: Complex64::new(0.0, 0.0),
        }
    }

    pub fn holomorphic(value: Complex64, deriv: Complex64) -> Self {
        Self {
            value,
            dz: deriv,
            dzbar: Complex64::new(0.0, 0.0),
        }
    }

    /// Jet of `outer o self`, where `outer` is taken at `self.value`.
    pub fn then(&self, outer: &WirtingerJet) -> WirtingerJet {
        WirtingerJet {
            value: outer.value,
            dz: outer.dz * self.dz + outer.dzbar * self.dzbar.conj(),
            dzbar: outer.dz * self.dzbar + outer.dzbar * self.dz.conj(),
        }
    }

    /// Beltrami coefficient `dzbar / dz`.
    pub fn mu(&self) -> Complex64 {
        self.dzbar / self.dz
    }

    /// Real Jacobian `|dz|^2 - |dzbar|^2`.
    pub fn jacobian(&self) -> f64 {
        self.dz.norm_sqr() - self.dzbar.norm_sqr()
    }

    /// Real 2x2 Jacobian `[[u_x, u_y], [v_x, v_y]]`.
    pub fn real_jacobian(&self) -> [[f64; 2]; 2] {
        let fx = self.dz + self.dzbar;
        let fy = Complex64::i() * (self.dz - self.dzbar);
        [[fx.re, fy.re], [fx.im, fy.im]]
    }

    /// Solve `dz * d + dzbar * conj(d) = r` for the increment `d`.
    pub fn solve_increment(&self, r: Complex64) -> Option<Complex64> {
        let det = self.jacobian();
        if det.abs() < f64::MIN_POSITIVE {
            return None;
        }
        Some((r * self.dz.conj() - self.dzbar * r.conj()) / det)
    }
}
