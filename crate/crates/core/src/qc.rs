//! First-order solutions of the Beltrami equation normalized at 0, 1 and
//! infinity, and the kernel constant `C(U)`.
//!
//! Integrals over a domain are split by a smooth partition of unity: a cutoff
//! disk around each pole of the kernel is integrated in polar coordinates
//! centred at the pole, where the Jacobian absorbs the `1/|w - p|` growth,
//! and the remainder is smooth and integrated by Gauss-Legendre panels.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum angular nodes of each pole disk.
pub const POLE_ANGULAR_NODES: usize = 64;
/// Relative disagreement between resolutions that counts as nonconvergence.
pub const CONVERGENCE_TOLERANCE: f64 = 0.01;

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// `1/(w - z) - z/(w - 1) + (z - 1)/w`.
pub fn kernel_s(w: Complex64, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if w == Complex64::new(0.0, 0.0) || w == one || w == z {
        return Err(Error::PoleHit);
    }
    Ok(1.0 / (w - z) - z / (w - one) + (z - one) / w)
}

/// `z(z - 1)/(w(w - 1)(w - z))`, the product form of the same kernel.
pub fn kernel_s_product(w: Complex64, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if w == Complex64::new(0.0, 0.0) || w == one || w == z {
        return Err(Error::PoleHit);
    }
    Ok(z * (z - one) / (w * (w - one) * (w - z)))
}

fn kernel_unchecked(w: Complex64, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    z * (z - one) / (w * (w - one) * (w - z))
}

/// Bounded convex region of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlaneDomain {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disk { cx: f64, cy: f64, r: f64 },
}

impl PlaneDomain {
    /// `rect:x0,x1,y0,y1` or `disk:cx,cy,r`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad domain '{spec}'"));
        let (kind, body) = spec.trim().split_once(':').ok_or_else(bad)?;
        let v: Vec<f64> = body
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let d = match (kind, v.as_slice()) {
            ("rect", &[x0, x1, y0, y1]) if x0 < x1 && y0 < y1 => PlaneDomain::Rect { x0, x1, y0, y1 },
            ("disk", &[cx, cy, r]) if r > 0.0 => PlaneDomain::Disk { cx, cy, r },
            _ => return Err(bad()),
        };
        Ok(d)
    }

    pub fn contains(&self, w: Complex64) -> bool {
        match *self {
            PlaneDomain::Rect { x0, x1, y0, y1 } => w.re >= x0 && w.re <= x1 && w.im >= y0 && w.im <= y1,
            PlaneDomain::Disk { cx, cy, r } => (w - Complex64::new(cx, cy)).norm() <= r,
        }
    }

    /// Distance from `w` to the domain (0 inside).
    pub fn distance(&self, w: Complex64) -> f64 {
        match *self {
            PlaneDomain::Rect { x0, x1, y0, y1 } => {
                let dx = (x0 - w.re).max(w.re - x1).max(0.0);
                let dy = (y0 - w.im).max(w.im - y1).max(0.0);
                dx.hypot(dy)
            }
            PlaneDomain::Disk { cx, cy, r } => ((w - Complex64::new(cx, cy)).norm() - r).max(0.0),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            PlaneDomain::Rect { x0, x1, y0, y1 } => (x1 - x0).min(y1 - y0),
            PlaneDomain::Disk { r, .. } => 2.0 * r,
        }
    }

    /// Parameters `t >= 0` with `p + t e^{i phi}` in the domain.
    fn ray(&self, p: Complex64, phi: f64) -> Option<(f64, f64)> {
        let (dx, dy) = (phi.cos(), phi.sin());
        match *self {
            PlaneDomain::Rect { x0, x1, y0, y1 } => {
                let mut t0 = 0.0f64;
                let mut t1 = f64::INFINITY;
                for (o, d, lo, hi) in [(p.re, dx, x0, x1), (p.im, dy, y0, y1)] {
                    if d.abs() < 1e-300 {
                        if o < lo || o > hi {
                            return None;
                        }
                    } else {
                        let (a, b) = ((lo - o) / d, (hi - o) / d);
                        t0 = t0.max(a.min(b));
                        t1 = t1.min(a.max(b));
                    }
                }
                (t0 < t1).then_some((t0, t1))
            }
            PlaneDomain::Disk { cx, cy, r } => {
                let (ox, oy) = (p.re - cx, p.im - cy);
                let b = ox * dx + oy * dy;
                let c = ox * ox + oy * oy - r * r;
                let disc = b * b - c;
                if disc <= 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                let (t0, t1) = ((-b - s).max(0.0), -b + s);
                (t0 < t1).then_some((t0, t1))
            }
        }
    }
}

/// Smooth step: 1 at 0, 0 on `[1, inf)`.
fn cutoff(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let t = s;
    let a = (-1.0 / (1.0 - t)).exp();
    let b = (-1.0 / t).exp();
    a / (a + b)
}

/// Integrand values are complex; real integrands use the real part.
type Integrand<'a> = dyn Fn(Complex64) -> Complex64 + Sync + 'a;

/// `iint_U g dA` for `g` with integrable `1/|w - p|` singularities at `poles`.
fn integrate(domain: &PlaneDomain, poles: &[Complex64], g: &Integrand, resolution: usize) -> Complex64 {
    let mut near: Vec<Complex64> = Vec::new();
    for &p in poles {
        if !near.contains(&p) {
            near.push(p);
        }
    }
    let mut sep = f64::INFINITY;
    for i in 0..near.len() {
        for j in 0..i {
            sep = sep.min((near[i] - near[j]).norm());
        }
    }
    let rho = (0.25 * domain.scale()).min(0.45 * sep);
    near.retain(|&p| domain.distance(p) < rho);
    let smooth = |w: Complex64| {
        let mut keep = 1.0;
        for &p in &near {
            keep -= cutoff((w - p).norm() / rho);
        }
        if keep <= 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            g(w) * keep
        }
    };
    let mut total = global_part(domain, &smooth, resolution);
    for &p in &near {
        total += pole_part(domain, p, rho, g, resolution);
    }
    total
}

fn gl_panels(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(4 * panels);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in GL4 {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

fn global_part(domain: &PlaneDomain, f: &(dyn Fn(Complex64) -> Complex64 + Sync), resolution: usize) -> Complex64 {
    let panels = (resolution / 4).max(1);
    match *domain {
        PlaneDomain::Rect { x0, x1, y0, y1 } => {
            let xs = gl_panels(x0, x1, panels);
            let ys = gl_panels(y0, y1, panels);
            xs.iter()
                .map(|&(x, wx)| {
                    ys.iter()
                        .map(|&(y, wy)| f(Complex64::new(x, y)) * (wx * wy))
                        .sum::<Complex64>()
                })
                .sum()
        }
        PlaneDomain::Disk { cx, cy, r } => {
            let rs = gl_panels(0.0, r, panels);
            let m = 4 * panels;
            let dphi = 2.0 * PI / m as f64;
            let c = Complex64::new(cx, cy);
            rs.iter()
                .map(|&(rr, wr)| {
                    (0..m)
                        .map(|k| f(c + Complex64::from_polar(rr, k as f64 * dphi)))
                        .sum::<Complex64>()
                        * (wr * rr * dphi)
                })
                .sum()
        }
    }
}

fn pole_part(domain: &PlaneDomain, p: Complex64, rho: f64, g: &Integrand, resolution: usize) -> Complex64 {
    let angular = POLE_ANGULAR_NODES.max(resolution);
    let radial = (resolution / 16).max(3);
    let dphi = 2.0 * PI / angular as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..angular {
        let phi = (k as f64 + 0.5) * dphi;
        let Some((t0, t1)) = domain.ray(p, phi) else { continue };
        let (a, b) = (t0.min(rho), t1.min(rho));
        if b <= a {
            continue;
        }
        let dir = Complex64::from_polar(1.0, phi);
        let h = (b - a) / radial as f64;
        let mut line = Complex64::new(0.0, 0.0);
        for panel in 0..radial {
            let mid = a + (panel as f64 + 0.5) * h;
            for (x, w) in GL8 {
                let r = mid + 0.5 * h * x;
                line += g(p + dir * r) * (cutoff(r / rho) * r * 0.5 * h * w);
            }
        }
        total += line * dphi;
    }
    total
}

/// A Beltrami coefficient supported on a bounded domain.
#[derive(Clone)]
pub struct BeltramiField {
    pub domain: PlaneDomain,
    mu: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

impl std::fmt::Debug for BeltramiField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BeltramiField({:?})", self.domain)
    }
}

impl BeltramiField {
    pub fn new(domain: PlaneDomain, mu: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            domain,
            mu: Arc::new(mu),
        }
    }

    pub fn constant(domain: PlaneDomain, k: Complex64) -> Result<Self> {
        if k.norm() >= 1.0 {
            return Err(Error::InvalidInput(format!("|mu| = {} is not below 1", k.norm())));
        }
        Ok(Self::new(domain, move |_| k))
    }

    pub fn at(&self, w: Complex64) -> Complex64 {
        if self.domain.contains(w) {
            (self.mu)(w)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// First variation `-(1/pi) iint mu(w) S(w, z) dA` of the normalized solution.
pub fn first_variation(mu: &BeltramiField, z: Complex64, resolution: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z == Complex64::new(0.0, 0.0) || z == one {
        return Complex64::new(0.0, 0.0);
    }
    let poles = [Complex64::new(0.0, 0.0), one, z];
    let g = |w: Complex64| (mu.mu)(w) * kernel_unchecked(w, z);
    -integrate(&mu.domain, &poles, &g, resolution) / PI
}

/// [`first_variation`] at `resolution`, certified against `2 * resolution`.
pub fn first_variation_checked(mu: &BeltramiField, z: Complex64, resolution: usize) -> Result<Complex64> {
    let coarse = first_variation(mu, z, resolution);
    let fine = first_variation(mu, z, 2 * resolution);
    let scale = fine.norm().max(coarse.norm());
    if (fine - coarse).norm() > CONVERGENCE_TOLERANCE * scale && scale > 1e-14 {
        return Err(Error::QuadratureNonconvergence {
            coarse: coarse.norm(),
            fine: fine.norm(),
        });
    }
    Ok(fine)
}

/// `z + first_variation(z)`: the solution to first order in `mu`.
pub fn approx_solution(mu: &BeltramiField, z: Complex64, resolution: usize) -> Complex64 {
    z + first_variation(mu, z, resolution)
}

/// `iint_U |S(w, z)| dA`.
pub fn kernel_mass(domain: &PlaneDomain, z: Complex64, resolution: usize) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    if z == Complex64::new(0.0, 0.0) || z == one {
        return 0.0;
    }
    let poles = [Complex64::new(0.0, 0.0), one, z];
    let g = |w: Complex64| Complex64::new(kernel_unchecked(w, z).norm(), 0.0);
    integrate(domain, &poles, &g, resolution).re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstant {
    /// `(4/pi) sup_z iint_U |S(w, z)| dA`.
    pub value: f64,
    pub argmax: (f64, f64),
    /// Same sup evaluated at doubled resolution.
    pub fine: f64,
}

fn candidate_points(domain: &PlaneDomain, m: usize) -> Vec<Complex64> {
    let mut pts = Vec::new();
    match *domain {
        PlaneDomain::Rect { x0, x1, y0, y1 } => {
            for i in 0..=m {
                for j in 0..=m {
                    let x = x0 + (x1 - x0) * i as f64 / m as f64;
                    let y = y0 + (y1 - y0) * j as f64 / m as f64;
                    pts.push(Complex64::new(x, y));
                }
            }
        }
        PlaneDomain::Disk { cx, cy, r } => {
            let c = Complex64::new(cx, cy);
            pts.push(c);
            for i in 1..=m {
                let rr = r * i as f64 / m as f64;
                for k in 0..(4 * i) {
                    pts.push(c + Complex64::from_polar(rr, 2.0 * PI * k as f64 / (4 * i) as f64));
                }
            }
        }
    }
    pts
}

/// `C(U)`: grid search over `z` followed by a compass refinement of the best
/// point, with the maximum re-evaluated at doubled resolution.
pub fn constant_cu(domain: &PlaneDomain, resolution: usize) -> Result<KernelConstant> {
    let pts = candidate_points(domain, 12);
    let masses: Vec<f64> = pts.par_iter().map(|&z| kernel_mass(domain, z, resolution)).collect();
    let (mut best, mut best_mass) = (pts[0], masses[0]);
    for (z, m) in pts.iter().zip(&masses) {
        if *m > best_mass {
            best = *z;
            best_mass = *m;
        }
    }
    let mut step = 0.5 * domain.scale() / 12.0;
    for _ in 0..24 {
        let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
        let trials: Vec<(Complex64, f64)> = dirs
            .par_iter()
            .filter_map(|&(dx, dy)| {
                let z = best + Complex64::new(dx * step, dy * step);
                domain.contains(z).then(|| (z, kernel_mass(domain, z, resolution)))
            })
            .collect();
        match trials.iter().copied().fold(None, |acc: Option<(Complex64, f64)>, t| match acc {
            Some(a) if a.1 >= t.1 => Some(a),
            _ => Some(t),
        }) {
            Some((z, m)) if m > best_mass => {
                best = z;
                best_mass = m;
            }
            _ => step *= 0.5,
        }
    }
    let fine_mass = kernel_mass(domain, best, 2 * resolution);
    if (fine_mass - best_mass).abs() > CONVERGENCE_TOLERANCE * fine_mass {
        return Err(Error::QuadratureNonconvergence {
            coarse: best_mass,
            fine: fine_mass,
        });
    }
    Ok(KernelConstant {
        value: 4.0 / PI * best_mass,
        argmax: (best.re, best.im),
        fine: 4.0 / PI * fine_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_vanishes_at_normalization_points() {
        for w in [c(0.3, 0.4), c(-2.0, 1.0), c(5.0, -3.0)] {
            assert_eq!(kernel_s(w, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
            assert_eq!(kernel_s_product(w, c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        }
        assert_eq!(kernel_s(c(0.0, 0.0), c(0.5, 0.5)), Err(Error::PoleHit));
        assert_eq!(kernel_s(c(0.5, 0.5), c(0.5, 0.5)), Err(Error::PoleHit));
    }

    #[test]
    fn cauchy_transform_of_a_disk() {
        // iint_{|w|<R} dA/(w - a) = -pi conj(a) for |a| < R.
        let d = PlaneDomain::Disk { cx: 0.0, cy: 0.0, r: 2.0 };
        let a = c(0.4, -0.7);
        let g = |w: Complex64| 1.0 / (w - a);
        let v = integrate(&d, &[a], &g, 256);
        assert!((v + PI * a.conj()).norm() < 1e-11, "{v}");
    }

    #[test]
    fn rect_area_and_clipped_pole() {
        let d = PlaneDomain::Rect { x0: 0.0, x1: 2.0, y0: -1.0, y1: 1.0 };
        let one = |_: Complex64| c(1.0, 0.0);
        let v = integrate(&d, &[c(0.0, 0.0), c(2.0, 1.0)], &one, 256);
        assert!((v.re - 4.0).abs() < 1e-9);
        // 1/|w| over the square [0,1]^2 is 2 ln(1 + sqrt 2).
        let sq = PlaneDomain::Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        let inv = |w: Complex64| c(1.0 / w.norm(), 0.0);
        let v = integrate(&sq, &[c(0.0, 0.0)], &inv, 256);
        assert!((v.re - 2.0 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-9);
    }

    #[test]
    fn constant_mu_first_variation_is_exact_on_centred_disks() {
        let d = PlaneDomain::Disk { cx: 0.0, cy: 0.0, r: 2.0 };
        let k = c(0.01, 0.0);
        let mu = BeltramiField::constant(d, k).unwrap();
        for z in [c(0.5, 0.5), c(-0.3, 0.8), c(0.0, -1.0)] {
            let v = first_variation(&mu, z, 256);
            assert!((v - k * (z.conj() - z)).norm() < 1e-10, "{z}: {v}");
        }
    }

    #[test]
    fn domain_parsing() {
        assert_eq!(
            PlaneDomain::parse("rect:-1,2,-1,1").unwrap(),
            PlaneDomain::Rect { x0: -1.0, x1: 2.0, y0: -1.0, y1: 1.0 }
        );
        assert!(PlaneDomain::parse("rect:1,0,0,1").is_err());
        assert!(PlaneDomain::parse("disk:0,0").is_err());
    }
}
