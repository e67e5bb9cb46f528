//! Points of the symmetrized bidisc: the symmetrization map, its inverse and
//! region classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::Tolerances;

/// A point `(s, p)` of C^2, read as `(z1 + z2, z1 z2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub s: Complex64,
    pub p: Complex64,
}

impl GammaPoint {
    pub fn new(s: Complex64, p: Complex64) -> Self {
        Self { s, p }
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.p.is_finite()
    }

    /// `s^2 - 4p`, whose square root is `z1 - z2`.
    pub fn discriminant(&self) -> Complex64 {
        self.s * self.s - self.p * 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegionTag {
    /// Open symmetrized bidisc G.
    InteriorG,
    /// Topological boundary of G, off the distinguished boundary.
    BoundaryNotBgamma,
    /// Distinguished boundary, off its diagonal.
    BgammaNotBdgamma,
    /// Diagonal `(2z, z^2)`, `|z| = 1`.
    Bdgamma,
    Outside,
}

impl RegionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::InteriorG => "INTERIOR_G",
            RegionTag::BoundaryNotBgamma => "BOUNDARY_NOT_BGAMMA",
            RegionTag::BgammaNotBdgamma => "BGAMMA_NOT_BDGAMMA",
            RegionTag::Bdgamma => "BDGAMMA",
            RegionTag::Outside => "OUTSIDE",
        }
    }

    /// Member of the distinguished boundary bGamma.
    pub fn in_bgamma(&self) -> bool {
        matches!(self, RegionTag::BgammaNotBdgamma | RegionTag::Bdgamma)
    }

    /// Member of the closed set Gamma.
    pub fn in_gamma(&self) -> bool {
        !matches!(self, RegionTag::Outside)
    }
}

impl std::fmt::Display for RegionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn symmetrize_point(z1: Complex64, z2: Complex64) -> GammaPoint {
    GammaPoint::new(z1 + z2, z1 * z2)
}

/// Both roots of `z^2 - s z + p`, sorted by modulus then argument.
pub fn point_roots(pt: &GammaPoint) -> (Complex64, Complex64) {
    let d = pt.discriminant().sqrt();
    // Pick the sign of the root that avoids cancellation in s +- d.
    let d = if (pt.s.conj() * d).re >= 0.0 { d } else { -d };
    let big = (pt.s + d) * 0.5;
    let small = if big.norm() > 0.0 { pt.p / big } else { (pt.s - d) * 0.5 };
    let key = |z: &Complex64| (z.norm(), z.arg());
    let (a, b) = (key(&big), key(&small));
    if a.0 < b.0 || (a.0 == b.0 && a.1 <= b.1) {
        (big, small)
    } else {
        (small, big)
    }
}

/// Classifies a point by the moduli of its roots.
///
/// Roots count as coincident when `|s^2 - 4p| <= psd_tol`; the moduli of a
/// near-double root are then read from `s/2`, which is well conditioned
/// where the root formula is not.
pub fn classify_point(pt: &GammaPoint, tol: &Tolerances) -> RegionTag {
    let eps = tol.psd_tol;
    let coincident = pt.discriminant().norm() <= eps * (1.0 + pt.s.norm_sqr());
    let (m1, m2) = if coincident {
        let m = (pt.s * 0.5).norm();
        (m, m)
    } else {
        let (z1, z2) = point_roots(pt);
        (z1.norm(), z2.norm())
    };
    let hi = m1.max(m2);
    if hi > 1.0 + eps {
        return RegionTag::Outside;
    }
    if hi < 1.0 - eps {
        return RegionTag::InteriorG;
    }
    let both_unimodular = (m1 - 1.0).abs() <= eps && (m2 - 1.0).abs() <= eps;
    match (both_unimodular, coincident) {
        (true, true) => RegionTag::Bdgamma,
        (true, false) => RegionTag::BgammaNotBdgamma,
        _ => RegionTag::BoundaryNotBgamma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn symmetrize_examples() {
        let pt = symmetrize_point(c64(0.5, 0.0), c64(-0.5, 0.0));
        assert_eq!(pt, GammaPoint::new(c64(0.0, 0.0), c64(-0.25, 0.0)));
        let pt = symmetrize_point(c64(1.0, 0.0), c64(1.0, 0.0));
        assert_eq!(pt, GammaPoint::new(c64(2.0, 0.0), c64(1.0, 0.0)));
        let pt = symmetrize_point(c64(0.0, 0.0), c64(0.0, 0.0));
        assert_eq!(pt, GammaPoint::new(c64(0.0, 0.0), c64(0.0, 0.0)));
    }

    #[test]
    fn roots_examples() {
        let (a, b) = point_roots(&GammaPoint::new(c64(0.0, 0.0), c64(-0.25, 0.0)));
        // equal moduli, so argument decides: 0.5 (arg 0) before -0.5 (arg pi)
        assert!(close(a, c64(0.5, 0.0), 1e-15) && close(b, c64(-0.5, 0.0), 1e-15));
        let (a, b) = point_roots(&GammaPoint::new(c64(2.0, 0.0), c64(1.0, 0.0)));
        assert!(close(a, c64(1.0, 0.0), 1e-15) && close(b, c64(1.0, 0.0), 1e-15));
        let (a, b) = point_roots(&GammaPoint::new(c64(1.0, 0.0), c64(0.25, 0.0)));
        assert!(close(a, c64(0.5, 0.0), 1e-15) && close(b, c64(0.5, 0.0), 1e-15));
    }

    #[test]
    fn classify_examples() {
        let tol = Tolerances::default();
        let at = |s: f64, p: f64| classify_point(&GammaPoint::new(c64(s, 0.0), c64(p, 0.0)), &tol);
        assert_eq!(at(1.0, 0.0), RegionTag::BoundaryNotBgamma);
        assert_eq!(at(2.0, 1.0), RegionTag::Bdgamma);
        assert_eq!(at(0.0, 0.0), RegionTag::InteriorG);
        assert_eq!(at(3.0, 0.0), RegionTag::Outside);
        assert_eq!(at(0.0, -1.0), RegionTag::BgammaNotBdgamma);
    }

    fn random_disc_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
        let r = radius * rng.random::<f64>().sqrt();
        Complex64::from_polar(r, rng.random::<f64>() * std::f64::consts::TAU)
    }

    #[test]
    fn open_bidisc_maps_to_interior() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let z1 = random_disc_point(&mut rng, 0.999_999);
            let z2 = random_disc_point(&mut rng, 0.999_999);
            assert_eq!(classify_point(&symmetrize_point(z1, z2), &tol), RegionTag::InteriorG);
        }
    }

    #[test]
    fn torus_maps_to_distinguished_boundary() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for k in 0..10_000 {
            let t1 = rng.random::<f64>() * std::f64::consts::TAU;
            // every tenth sample sits exactly on the diagonal
            let t2 = if k % 10 == 0 { t1 } else { rng.random::<f64>() * std::f64::consts::TAU };
            let pt = symmetrize_point(Complex64::from_polar(1.0, t1), Complex64::from_polar(1.0, t2));
            let tag = classify_point(&pt, &tol);
            let gap = (Complex64::from_polar(1.0, t1) - Complex64::from_polar(1.0, t2)).norm();
            if k % 10 == 0 {
                assert_eq!(tag, RegionTag::Bdgamma);
            } else if gap > 1e-3 {
                assert_eq!(tag, RegionTag::BgammaNotBdgamma, "theta {t1} {t2}");
            } else {
                assert!(tag.in_bgamma());
            }
        }
    }

    #[test]
    fn roots_invert_symmetrization() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let z1 = random_disc_point(&mut rng, 2.0);
            let z2 = random_disc_point(&mut rng, 2.0);
            let pt = symmetrize_point(z1, z2);
            let (a, b) = point_roots(&pt);
            let back = symmetrize_point(a, b);
            let scale = 1.0 + pt.s.norm() + pt.p.norm();
            assert!(close(back.s, pt.s, 1e-12 * scale) && close(back.p, pt.p, 1e-12 * scale));
            let direct = (a - z1).norm().max((b - z2).norm());
            let swapped = (a - z2).norm().max((b - z1).norm());
            // root extraction loses accuracy like 1/|z1 - z2|
            let cond = 1.0 + 1.0 / (z1 - z2).norm().max(1e-6);
            assert!(direct.min(swapped) <= 1e-10 * cond);
        }
    }
}
