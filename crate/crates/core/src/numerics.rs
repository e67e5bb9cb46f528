//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on [`ComplexMatrix`] (a dense `nalgebra` matrix of
//! `Complex64`). Hermitian eigendecompositions, Schur forms and SVDs come from
//! `nalgebra`; the numerical radius sweep, simultaneous triangularization and
//! the Schur-based principal square root are implemented here.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix, row and column counts carried by the matrix itself.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Absolute accuracy, in radians, of the golden-section refinement of circle sweeps.
pub const ANGLE_ACCURACY: f64 = 1e-10;

/// Numeric thresholds shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub psd_tol: f64,
    pub rank_tol: f64,
    pub residual_tol: f64,
    pub grid_angular: usize,
    pub grid_radial: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_tol: 1e-9,
            rank_tol: 1e-10,
            residual_tol: 1e-8,
            grid_angular: 1024,
            grid_radial: 21,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("psd_tol", self.psd_tol),
            ("rank_tol", self.rank_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::InvalidTolerances(format!(
                    "{name} must be a finite nonnegative number, got {value}"
                )));
            }
        }
        if self.grid_angular < 2 || self.grid_radial < 2 {
            return Err(Error::InvalidTolerances(format!(
                "grid sizes must be at least 2, got angular {} radial {}",
                self.grid_angular, self.grid_radial
            )));
        }
        Ok(())
    }

    /// Doubles both grid resolutions.
    pub fn refined(&self) -> Self {
        Self {
            grid_angular: self.grid_angular * 2,
            grid_radial: self.grid_radial * 2 - 1,
            ..*self
        }
    }
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    ensure_finite(m)?;
    Ok(m.nrows())
}

pub fn ensure_same_shape(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            found: b.shape(),
        });
    }
    Ok(())
}

/// Spectral (operator 2-) norm. Zero for empty matrices.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&(a * b - b * a))
}

/// Eigenvalues in ascending order with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Operator norm of the decomposed matrix.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }
}

/// Eigendecomposition of the Hermitian part of `h` (inputs are symmetrized first).
pub fn hermitian_eigen(h: &ComplexMatrix) -> HermitianEigen {
    let n = h.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Eigenvalues of the Hermitian part of `h`, ascending, without eigenvectors.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    if h.is_empty() {
        return Vec::new();
    }
    let mut values: Vec<f64> = hermitian_part(h).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(h: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(h).last().copied().unwrap_or(0.0)
}

/// Scale-relative positive-semidefiniteness test: `lambda_min >= -psd_tol (1 + ||H||)`.
pub fn is_psd(h: &ComplexMatrix, tol: &Tolerances) -> bool {
    let eig = hermitian_eigen(h);
    eig.min() >= -tol.psd_tol * (1.0 + eig.norm())
}

/// Complex Schur form `M = Q T Q*`, returned as `(Q, T)`.
pub fn schur(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    if m.is_empty() {
        return (ComplexMatrix::zeros(0, 0), ComplexMatrix::zeros(0, 0));
    }
    let (q, t) = Schur::new(m.clone()).unpack();
    // nalgebra leaves round-off below the diagonal; the triangular factor is exact by definition.
    let t = ComplexMatrix::from_fn(t.nrows(), t.ncols(), |r, c| {
        if r > c {
            Complex64::new(0.0, 0.0)
        } else {
            t[(r, c)]
        }
    });
    (q, t)
}

/// Eigenvalues of a general complex square matrix, read off its Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    let (_, t) = schur(m);
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

pub fn spectral_radius(m: &ComplexMatrix) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Norm of the strictly lower triangular part.
fn lower_norm(t: &ComplexMatrix) -> f64 {
    let lower = ComplexMatrix::from_fn(t.nrows(), t.ncols(), |r, c| {
        if r > c {
            t[(r, c)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    op_norm(&lower)
}

/// Maximizes `f` over the circle: evaluate on `grid` equispaced angles, then
/// golden-section search around the best few local maxima of the grid.
///
/// Returns `(theta, value)` with `theta` in `[0, 2pi)`.
pub fn maximize_on_circle<F>(f: F, grid: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let grid = grid.max(3);
    let step = std::f64::consts::TAU / grid as f64;
    let values: Vec<f64> = (0..grid).map(|k| f(k as f64 * step)).collect();

    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&k| {
            let prev = values[(k + grid - 1) % grid];
            let next = values[(k + 1) % grid];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(4);

    let mut best = peaks
        .first()
        .map(|&k| (k as f64 * step, values[k]))
        .unwrap_or((0.0, values[0]));
    for &k in &peaks {
        let center = k as f64 * step;
        let (theta, value) = golden_section_max(&f, center - step, center + step);
        if value > best.1 {
            best = (theta.rem_euclid(std::f64::consts::TAU), value);
        }
    }
    best
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, to [`ANGLE_ACCURACY`].
pub fn golden_section_max<F>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > ANGLE_ACCURACY {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Hermitian part of `e^{i theta} A`.
pub fn rotated_hermitian_part(a: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let rot = Complex64::from_polar(1.0, theta);
    hermitian_part(&a.map(|z| z * rot))
}

/// Numerical radius `w(A) = max_theta lambda_max(Re(e^{i theta} A))`.
pub fn numerical_radius(a: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    let n = ensure_square(a)?;
    if n == 0 {
        return Ok(0.0);
    }
    let (_, value) = maximize_on_circle(|t| lambda_max(&rotated_hermitian_part(a, t)), tol.grid_angular);
    Ok(value.max(0.0))
}

/// Joint eigenvalues of a commuting pair, obtained from one unitary basis that
/// makes both matrices upper triangular. Sorted lexicographically.
pub fn joint_spectrum(
    s: &ComplexMatrix,
    p: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<Vec<(Complex64, Complex64)>> {
    ensure_square(s)?;
    ensure_square(p)?;
    ensure_same_shape(s, p)?;
    let defect = commutator_norm(s, p);
    let bound = tol.residual_tol * (1.0 + op_norm(s) * op_norm(p));
    if defect > bound {
        return Err(Error::NonCommuting { defect, bound });
    }

    let check = |q: &ComplexMatrix| {
        let ts = q.adjoint() * s * q;
        let tp = q.adjoint() * p * q;
        let residual = (lower_norm(&ts) / (1.0 + op_norm(s))).max(lower_norm(&tp) / (1.0 + op_norm(p)));
        (ts, tp, residual)
    };

    let (q, _) = schur(s);
    let (mut ts, mut tp, mut residual) = check(&q);
    if residual > tol.residual_tol {
        // Degenerate eigenvalues of S: a generic combination separates the joint invariant subspaces.
        for mix in [c64(1e-8, 0.0), c64(1e-6, 0.0), c64(0.6180339887, 0.3819660113)] {
            let (q, _) = schur(&(s + p * mix));
            let attempt = check(&q);
            if attempt.2 <= tol.residual_tol {
                (ts, tp, residual) = attempt;
                break;
            }
            residual = residual.min(attempt.2);
        }
        if residual > tol.residual_tol {
            return Err(Error::Triangularization { residual });
        }
    }

    let mut pairs: Vec<(Complex64, Complex64)> = (0..s.nrows()).map(|i| (ts[(i, i)], tp[(i, i)])).collect();
    pairs.sort_by(|a, b| {
        a.0.re
            .total_cmp(&b.0.re)
            .then(a.0.im.total_cmp(&b.0.im))
            .then(a.1.re.total_cmp(&b.1.re))
            .then(a.1.im.total_cmp(&b.1.im))
    });
    Ok(pairs)
}

/// Square root of a PSD matrix; negative eigenvalues are clamped to zero.
pub fn psd_sqrt(h: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eigen(h);
    let n = h.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let v = eig.vectors.column(k);
        out += (v * v.adjoint()).scale(root);
    }
    out
}

/// Moore-Penrose pseudoinverse via the SVD, singular values at or below `rank_tol` dropped.
pub fn pseudoinverse(m: &ComplexMatrix, rank_tol: f64) -> ComplexMatrix {
    if m.is_empty() {
        return ComplexMatrix::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut out = ComplexMatrix::zeros(m.ncols(), m.nrows());
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > rank_tol {
            out += (vt.row(k).adjoint() * u.column(k).adjoint()).scale(1.0 / sigma);
        }
    }
    out
}

/// Principal square root through the Schur form (upper-triangular recurrence).
///
/// Fails with [`Error::NoSquareRoot`] when a zero eigenvalue sits in a
/// defective block, i.e. the recurrence would divide a nonzero numerator by
/// `r_ii + r_jj = 0`.
pub fn principal_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let (q, t) = schur(m);
    let scale = 1.0 + op_norm(&t);
    let mut r = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        // `+ 0.0` folds a negative zero imaginary part so equal eigenvalues share a branch.
        let lambda = c64(t[(i, i)].re + 0.0, t[(i, i)].im + 0.0);
        r[(i, i)] = lambda.sqrt();
    }
    for gap in 1..n {
        for i in 0..n - gap {
            let j = i + gap;
            let mut numer = t[(i, j)];
            for k in i + 1..j {
                numer -= r[(i, k)] * r[(k, j)];
            }
            let denom = r[(i, i)] + r[(j, j)];
            if denom.norm() <= 1e-13 * scale.sqrt() {
                if numer.norm() <= 1e-7 * scale {
                    r[(i, j)] = c64(0.0, 0.0);
                    continue;
                }
                return Err(Error::NoSquareRoot);
            }
            r[(i, j)] = numer / denom;
        }
    }
    Ok(&q * r * q.adjoint())
}
