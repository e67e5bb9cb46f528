//! Matrix-valued polynomials in `(s, p)`, the variety attached to a
//! Gamma-contraction through its fundamental operator, and the numerical check
//! of the bound `||f(S, P)|| <= max ||f(s, p)||` over the distinguished
//! boundary part of a variety.
//!
//! With `phi(z) = F* + z F`, the model gives
//! `||f(S, P)|| <= max_theta ||f^cup(phi(e^{i theta}), e^{i theta})||`, and the
//! spectrum of `phi(e^{i theta})` is the fiber of `Lambda = {det(F* + pF - sI) = 0}`.
//! Undoing the `cup` conjugates the points, so the bound for `f` itself is a
//! maximum over the conjugate variety `{det(F + pF* - sI) = 0}`. That is what
//! [`vn_report`] samples; [`boundary_max`] on `Lambda` itself is kept for comparison.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::solve_fundamental;
use crate::gamma_pairs::OperatorPair;
use crate::numerics::{op_norm, ComplexMatrix, Tolerances};
use crate::varieties::{boundary_sample, DeterminantalVariety};

/// Multiplicative slack allowed on the right-hand side.
pub const VN_SLACK: f64 = 1e-6;

/// Largest sampling density the refinement loop tries before reporting a violation.
pub const MAX_SAMPLES: usize = 1 << 16;

/// `f(s, p) = sum C[i][j] s^i p^j` with `k x k` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    size: usize,
    coeffs: Vec<Vec<ComplexMatrix>>,
}

impl MatrixPolynomial {
    pub fn zero(size: usize) -> Self {
        Self {
            size,
            coeffs: Vec::new(),
        }
    }

    /// Sums the given `(i, j, C)` terms; every `C` must be `size x size` and finite.
    pub fn from_terms(size: usize, terms: Vec<(usize, usize, ComplexMatrix)>) -> Result<Self> {
        let mut poly = Self::zero(size);
        for (i, j, c) in terms {
            poly.add_term(i, j, &c)?;
        }
        Ok(poly)
    }

    pub fn monomial(i: usize, j: usize, coeff: ComplexMatrix) -> Result<Self> {
        Self::from_terms(coeff.nrows(), vec![(i, j, coeff)])
    }

    pub fn constant(coeff: ComplexMatrix) -> Result<Self> {
        Self::monomial(0, 0, coeff)
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: &ComplexMatrix) -> Result<()> {
        if c.shape() != (self.size, self.size) {
            return Err(Error::ShapeMismatch {
                expected: (self.size, self.size),
                found: c.shape(),
            });
        }
        crate::numerics::ensure_finite(c)?;
        let (rows, cols) = self.grid_shape();
        let rows = rows.max(i + 1);
        let cols = cols.max(j + 1);
        self.coeffs.resize_with(rows, Vec::new);
        for row in &mut self.coeffs {
            row.resize_with(cols, || ComplexMatrix::zeros(self.size, self.size));
        }
        self.coeffs[i][j] += c;
        Ok(())
    }

    fn grid_shape(&self) -> (usize, usize) {
        (self.coeffs.len(), self.coeffs.first().map_or(0, Vec::len))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Coefficient of `s^i p^j`, zero when absent.
    pub fn coeff(&self, i: usize, j: usize) -> ComplexMatrix {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.size, self.size))
    }

    /// Nonzero terms `(i, j, C)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &ComplexMatrix)> {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| c.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
                .map(move |(j, c)| (i, j, c))
        })
    }

    pub fn degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    fn max_powers(&self) -> (usize, usize) {
        self.terms()
            .fold((0, 0), |(a, b), (i, j, _)| (a.max(i), b.max(j)))
    }

    /// `f(s, p)` for scalar arguments.
    pub fn eval_scalar(&self, s: Complex64, p: Complex64) -> ComplexMatrix {
        let (ds, dp) = self.max_powers();
        let s_pow = powers(s, ds);
        let p_pow = powers(p, dp);
        let mut out = ComplexMatrix::zeros(self.size, self.size);
        for (i, j, c) in self.terms() {
            out += c * (s_pow[i] * p_pow[j]);
        }
        out
    }
}

fn powers(x: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(acc);
        acc *= x;
    }
    out
}

/// Operator norm with closed forms for the `1 x 1` and `2 x 2` cases that
/// dominate boundary sweeps.
fn small_norm(m: &ComplexMatrix) -> f64 {
    match m.shape() {
        (1, 1) => m[(0, 0)].norm(),
        (2, 2) => {
            let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let fro = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
            let det = (a * d - b * c).norm();
            let gap = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
            ((fro + gap) / 2.0).sqrt()
        }
        _ => op_norm(m),
    }
}

/// `sum C[i][j] (x) S^i P^j` as a block matrix on (coefficient space) (x) (state space).
pub fn evaluate_pair(f: &MatrixPolynomial, pair: &OperatorPair) -> Result<ComplexMatrix> {
    let n = pair.dim();
    let k = f.size();
    let (ds, dp) = f.max_powers();
    let mut s_pow = vec![ComplexMatrix::identity(n, n)];
    for i in 1..=ds {
        s_pow.push(&s_pow[i - 1] * pair.s());
    }
    let mut p_pow = vec![ComplexMatrix::identity(n, n)];
    for j in 1..=dp {
        p_pow.push(&p_pow[j - 1] * pair.p());
    }

    let mut out = ComplexMatrix::zeros(k * n, k * n);
    for (i, j, c) in f.terms() {
        let term = &s_pow[i] * &p_pow[j];
        for a in 0..k {
            for b in 0..k {
                let w = c[(a, b)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut block = out.view_mut((a * n, b * n), (n, n));
                block += &term * w;
            }
        }
    }
    Ok(out)
}

/// `f^cup`, defined by `f^cup(A, B) = f(A*, B*)*`: adjoint of every coefficient.
pub fn cup_transform(f: &MatrixPolynomial) -> MatrixPolynomial {
    MatrixPolynomial {
        size: f.size,
        coeffs: f
            .coeffs
            .iter()
            .map(|row| row.iter().map(|c| c.adjoint()).collect())
            .collect(),
    }
}

/// The variety `det(F* + p F - s I) = 0`, i.e. the determinantal variety of `A = F*`.
pub fn lambda_variety(pair: &OperatorPair, tol: &Tolerances) -> Result<DeterminantalVariety> {
    let fo = solve_fundamental(pair, tol)?;
    DeterminantalVariety::new(fo.f.adjoint(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgMax {
    pub theta: f64,
    pub s: Complex64,
    pub p: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VNReport {
    /// `||f(S, P)||`.
    pub lhs: f64,
    /// Max of `||f(s, p)||` over the sampled boundary of the variety.
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    /// Sampling density actually used (after any refinement).
    pub m: usize,
    pub sample_count: usize,
    pub argmax: ArgMax,
    /// The fundamental operator had rank zero and the slice `{s = 0}` was used.
    pub degenerate: bool,
}

/// Max of `||f(s, p)||` over the boundary points of `v` at density `m`.
pub fn boundary_max(f: &MatrixPolynomial, v: &DeterminantalVariety, m: usize) -> (f64, ArgMax, usize) {
    let sample = boundary_sample(v, m);
    let mut best = (
        f64::NEG_INFINITY,
        ArgMax {
            theta: 0.0,
            s: Complex64::new(0.0, 0.0),
            p: Complex64::new(1.0, 0.0),
        },
    );
    for b in &sample.points {
        let value = small_norm(&f.eval_scalar(b.point.s, b.point.p));
        if value > best.0 {
            best = (
                value,
                ArgMax {
                    theta: b.theta,
                    s: b.point.s,
                    p: b.point.p,
                },
            );
        }
    }
    (best.0.max(0.0), best.1, sample.points.len())
}

/// Compares `||f(S, P)||` against the maximum over the boundary of the
/// conjugate of [`lambda_variety`], doubling `m` up to [`MAX_SAMPLES`] while
/// the inequality appears violated.
pub fn vn_report(f: &MatrixPolynomial, pair: &OperatorPair, m: usize, tol: &Tolerances) -> Result<VNReport> {
    let variety = lambda_variety(pair, tol)?;
    vn_report_with_variety(f, pair, &variety, m)
}

/// [`vn_report`] with `lambda_variety(pair)` supplied, so several polynomials can share one solve.
pub fn vn_report_with_variety(
    f: &MatrixPolynomial,
    pair: &OperatorPair,
    lambda: &DeterminantalVariety,
    m: usize,
) -> Result<VNReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let variety = &lambda.adjoint();
    let lhs = op_norm(&evaluate_pair(f, pair)?);
    let mut m = m;
    loop {
        let (rhs, argmax, sample_count) = boundary_max(f, variety, m);
        let holds = lhs <= rhs * (1.0 + VN_SLACK);
        if holds || m >= MAX_SAMPLES {
            let ratio = if rhs > 0.0 {
                lhs / rhs
            } else if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            return Ok(VNReport {
                lhs,
                rhs,
                ratio,
                holds,
                m,
                sample_count,
                argmax,
                degenerate: variety.is_degenerate(),
            });
        }
        m = (m * 2).min(MAX_SAMPLES);
    }
}
