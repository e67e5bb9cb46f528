//! Determinantal varieties `{(s, p) : det(A + p A* - s I) = 0}`.
//!
//! Membership and fibers are computed from eigenvalues of `A + p A*` rather
//! than from the determinant itself, which under- or overflows with
//! dimension. On the circle `|p| = 1` the fiber comes from the Hermitian matrix
//! `e^{-i theta/2} A + e^{i theta/2} A*`, whose real eigenvalues `mu` give the
//! boundary points `(e^{i theta/2} mu, e^{i theta})`.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify_point, GammaPoint, RegionTag};
use crate::numerics::{eigenvalues, hermitian_eigen, numerical_radius, op_norm, ComplexMatrix, Tolerances};

/// Total degree cap for the symmetrized polynomial `p(z,w) p(w,z)`.
pub const SYMMETRIC_DEGREE_CAP: usize = 16;

/// Number of radii per angle in the exit-point scan.
pub const EXIT_RADII: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantalVariety {
    a: ComplexMatrix,
    nr: f64,
}

impl DeterminantalVariety {
    pub fn new(a: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let nr = numerical_radius(&a, tol)?;
        Ok(Self { a, nr })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    /// Cached numerical radius of the defining matrix.
    pub fn nr(&self) -> f64 {
        self.nr
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// The complex-conjugate variety `{(conj s, conj p)}`, defined by `A*`.
    pub fn adjoint(&self) -> Self {
        Self {
            a: self.a.adjoint(),
            nr: self.nr,
        }
    }

    /// A `0 x 0` matrix stands for the slice `{s = 0}` (rank-zero fundamental operator).
    pub fn is_degenerate(&self) -> bool {
        self.a.nrows() == 0
    }

    fn pencil(&self, p: Complex64) -> ComplexMatrix {
        &self.a + self.a.adjoint() * p
    }
}

/// `true` iff some eigenvalue of `A + p A*` lies within `residual_tol (1 + ||A||)` of `s`.
pub fn variety_membership(v: &DeterminantalVariety, pt: &GammaPoint, tol: &Tolerances) -> bool {
    let bound = tol.residual_tol * (1.0 + op_norm(&v.a));
    fiber_at_p(v, pt.p).iter().any(|&lambda| (lambda - pt.s).norm() <= bound)
}

/// The `s`-values over a fixed `p`: eigenvalues of `A + p A*`.
pub fn fiber_at_p(v: &DeterminantalVariety, p: Complex64) -> Vec<Complex64> {
    if v.is_degenerate() {
        return vec![Complex64::new(0.0, 0.0)];
    }
    if (p.norm() - 1.0).abs() <= 1e-12 {
        let (theta, half) = (p.arg(), Complex64::from_polar(1.0, p.arg() / 2.0));
        return unit_fiber(v, theta).into_iter().map(|mu| half * mu).collect();
    }
    eigenvalues(&v.pencil(p))
}

/// Real eigenvalues of `e^{-i theta/2} A + e^{i theta/2} A*`, ascending.
fn unit_fiber(v: &DeterminantalVariety, theta: f64) -> Vec<f64> {
    let half = Complex64::from_polar(1.0, theta / 2.0);
    let normal = v.a.map(|z| z * half.conj()) + v.a.adjoint().map(|z| z * half);
    hermitian_eigen(&normal).values
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub point: GammaPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    pub points: Vec<BoundaryPoint>,
    pub max_abs_s: f64,
}

impl BoundarySample {
    /// Distance `2 - max |s|` of the sample from the diagonal circle bD_Gamma.
    pub fn delta(&self) -> f64 {
        2.0 - self.max_abs_s
    }
}

/// Points of the variety over `p = e^{i theta_k}`, `theta_k = 2 pi k / m`.
pub fn boundary_sample(v: &DeterminantalVariety, m: usize) -> BoundarySample {
    let mut points = Vec::with_capacity(m * v.dim().max(1));
    for k in 0..m {
        let theta = std::f64::consts::TAU * k as f64 / m as f64;
        let p = Complex64::from_polar(1.0, theta);
        let half = Complex64::from_polar(1.0, theta / 2.0);
        if v.is_degenerate() {
            points.push(BoundaryPoint {
                theta,
                point: GammaPoint::new(Complex64::new(0.0, 0.0), p),
            });
            continue;
        }
        for mu in unit_fiber(v, theta) {
            points.push(BoundaryPoint {
                theta,
                point: GammaPoint::new(half * mu, p),
            });
        }
    }
    let max_abs_s = points.iter().map(|b| b.point.s.norm()).fold(0.0, f64::max);
    BoundarySample { points, max_abs_s }
}

/// Writes `theta,re_s,im_s,re_p,im_p,region_tag` rows.
pub fn write_boundary_csv<W: Write>(out: &mut W, sample: &BoundarySample, tol: &Tolerances) -> io::Result<()> {
    writeln!(out, "theta,re_s,im_s,re_p,im_p,region_tag")?;
    for b in &sample.points {
        let tag = classify_point(&b.point, tol);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            b.theta, b.point.s.re, b.point.s.im, b.point.p.re, b.point.p.im, tag
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DistinguishedStatus {
    DistinguishedCertified,
    NotDistinguishedCertified,
    DistinguishedEmpirical,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguishedVerdict {
    pub status: DistinguishedStatus,
    /// Name of the criterion that decided the status.
    pub criterion: String,
    pub witness: Option<GammaPoint>,
    pub nr: f64,
    /// `2 - max |s|` over the boundary sample, when one was taken.
    pub boundary_delta: Option<f64>,
}

/// Decides whether the variety is distinguished.
///
/// Certified answers come only from `w(A) < 1` (distinguished) or from an
/// eigenvalue of `A` on the unit circle (not distinguished). Otherwise the
/// verdict is empirical: the unit-circle fibers at `m` angles must lie in
/// bGamma, and fibers over `p = r e^{i theta}` with `1 - r` geometric down to
/// `1e-6` must not touch the boundary of G outside bGamma.
pub fn classify_distinguished(v: &DeterminantalVariety, tol: &Tolerances, m: usize) -> DistinguishedVerdict {
    let m = m.max(1);
    let sample = boundary_sample(v, m);
    let verdict = |status, criterion: &str, witness| DistinguishedVerdict {
        status,
        criterion: criterion.to_string(),
        witness,
        nr: v.nr,
        boundary_delta: Some(sample.delta()),
    };

    if v.nr < 1.0 - tol.psd_tol {
        return verdict(DistinguishedStatus::DistinguishedCertified, "numerical_radius_below_one", None);
    }
    if let Some(&alpha) = eigenvalues(&v.a)
        .iter()
        .find(|z| (z.norm() - 1.0).abs() <= tol.psd_tol)
    {
        return verdict(
            DistinguishedStatus::NotDistinguishedCertified,
            "unimodular_eigenvalue",
            Some(GammaPoint::new(alpha, Complex64::new(0.0, 0.0))),
        );
    }

    if let Some(b) = sample
        .points
        .iter()
        .find(|b| !classify_point(&b.point, tol).in_bgamma())
    {
        return verdict(DistinguishedStatus::Inconclusive, "boundary_fiber_outside_bgamma", Some(b.point));
    }
    for k in 0..m {
        let theta = std::f64::consts::TAU * k as f64 / m as f64;
        for j in 0..EXIT_RADII {
            let r = 1.0 - 10f64.powf(-6.0 * (j + 1) as f64 / EXIT_RADII as f64);
            let p = Complex64::from_polar(r, theta);
            for s in fiber_at_p(v, p) {
                let pt = GammaPoint::new(s, p);
                if classify_point(&pt, tol) == RegionTag::BoundaryNotBgamma {
                    return verdict(DistinguishedStatus::Inconclusive, "exit_point_off_bgamma", Some(pt));
                }
            }
        }
    }
    verdict(DistinguishedStatus::DistinguishedEmpirical, "boundary_and_exit_sampling", None)
}

/// Bivariate polynomial `sum c[i][j] x^i y^j` with complex coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivarPolynomial {
    coeffs: Vec<Vec<Complex64>>,
}

impl BivarPolynomial {
    /// Builds from a (possibly ragged) coefficient grid; trailing zeros are trimmed.
    pub fn new(coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        if coeffs.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
        }
        let mut poly = Self { coeffs };
        poly.trim();
        Ok(poly)
    }

    pub fn from_terms(terms: &[(usize, usize, Complex64)]) -> Result<Self> {
        let rows = terms.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let cols = terms.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); cols]; rows];
        for &(i, j, c) in terms {
            coeffs[i][j] += c;
        }
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        let cols = self.coeffs.iter().map(|row| row.len()).max().unwrap_or(0);
        for row in &mut self.coeffs {
            row.resize(cols, Complex64::new(0.0, 0.0));
        }
        let zero = Complex64::new(0.0, 0.0);
        while self.coeffs.last().is_some_and(|row| row.iter().all(|&c| c == zero)) {
            self.coeffs.pop();
        }
        let cols = (0..cols)
            .rev()
            .find(|&j| self.coeffs.iter().any(|row| row[j] != zero))
            .map_or(0, |j| j + 1);
        for row in &mut self.coeffs {
            row.truncate(cols);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^i y^j` (zero outside the stored grid).
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// `(deg_x, deg_y)`; `(0, 0)` for the zero polynomial.
    pub fn degrees(&self) -> (usize, usize) {
        if self.is_zero() {
            return (0, 0);
        }
        (self.coeffs.len() - 1, self.coeffs[0].len() - 1)
    }

    pub fn total_degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
                .map(move |(j, &c)| (i, j, c))
        })
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms().map(|(i, j, c)| c * x.powu(i as u32) * y.powu(j as u32)).sum()
    }

    /// `sum |c_ij| |x|^i |y|^j`, the natural scale of a floating-point evaluation.
    pub fn eval_magnitude(&self, x: Complex64, y: Complex64) -> f64 {
        self.terms()
            .map(|(i, j, c)| c.norm() * x.norm().powi(i as i32) * y.norm().powi(j as i32))
            .sum()
    }

    /// `q(x, y) = p(y, x)`.
    pub fn swapped(&self) -> Self {
        let terms: Vec<_> = self.terms().map(|(i, j, c)| (j, i, c)).collect();
        Self::from_terms(&terms).expect("finite coefficients")
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                terms.push((i + k, j + l, a * b));
            }
        }
        Self::from_terms(&terms).expect("finite coefficients")
    }
}

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for k in 1..=n {
        let prev = &rows[k - 1];
        let mut row = vec![1.0; k + 1];
        for i in 1..k {
            row[i] = prev[i - 1] + prev[i];
        }
        rows.push(row);
    }
    rows
}

/// Image of a bidisc variety `{p(z, w) = 0}` under the symmetrization map.
///
/// Forms `p(z, w) p(w, z)`, which is symmetric, and rewrites it as `q(s, p)`
/// with `q(z + w, zw) = p(z, w) p(w, z)` by peeling off leading terms in
/// graded-lex order: a leading monomial `z^i w^j` (`i >= j`) is removed by
/// `c (z + w)^(i-j) (zw)^j`, contributing `c s^(i-j) p^j` to `q`.
/// The result is checked at 200 random points of the bidisc.
pub fn symmetrize_bidisc_variety(poly: &BivarPolynomial) -> Result<BivarPolynomial> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let symmetric = poly.mul(&poly.swapped());
    let degree = symmetric.total_degree();
    if degree > SYMMETRIC_DEGREE_CAP {
        return Err(Error::DegreeTooLarge {
            degree,
            cap: SYMMETRIC_DEGREE_CAP,
        });
    }

    let size = degree + 1;
    let mut work = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for (i, j, c) in symmetric.terms() {
        work[i][j] = c;
    }
    let binom = binomials(degree);
    let mut q_terms = Vec::new();
    for d in (0..=degree).rev() {
        for i in (d.div_ceil(2)..=d).rev() {
            let j = d - i;
            let c = work[i][j];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let a = i - j;
            // subtract c (z + w)^a (zw)^j
            for k in 0..=a {
                work[k + j][a - k + j] -= c * binom[a][k];
            }
            work[i][j] = Complex64::new(0.0, 0.0);
            q_terms.push((a, j, c));
        }
    }
    let q = BivarPolynomial::from_terms(&q_terms)?;

    let max_rel_error = reduction_error(&symmetric, &q, 200, 0x5eed);
    if max_rel_error > 1e-10 {
        return Err(Error::VerificationFailed { max_rel_error });
    }
    Ok(q)
}

/// Largest `|q(z + w, zw) - sym(z, w)|` relative to the evaluation scale of
/// `sym`, over random points of the closed bidisc.
pub fn reduction_error(symmetric: &BivarPolynomial, q: &BivarPolynomial, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
        let w = Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
        let lhs = q.eval(z + w, z * w);
        let rhs = symmetric.eval(z, w);
        let scale = symmetric.eval_magnitude(z, w).max(f64::MIN_POSITIVE);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    worst
}
