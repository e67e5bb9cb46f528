//! Defect operators, the fundamental equation `S - S*P = D_P X D_P`, and the
//! converse construction of a Gamma-contraction with a prescribed fundamental
//! operator.

use crate::error::{Error, Result};
use crate::gamma_pairs::OperatorPair;
use crate::numerics::{ensure_square, hermitian_eigen, numerical_radius, op_norm, ComplexMatrix, Tolerances};

/// `D_P = (I - P*P)^{1/2}` together with an orthonormal basis of its range.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectData {
    pub d: ComplexMatrix,
    /// `n x rank`, orthonormal columns spanning the defect space.
    pub basis: ComplexMatrix,
    /// Eigenvalues of `D_P` on the basis vectors, in basis order.
    pub singular: Vec<f64>,
    pub rank: usize,
}

impl DefectData {
    /// Lifts a `rank x rank` operator on the defect space to the ambient space.
    pub fn embed(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.basis * x * self.basis.adjoint()
    }

    /// Coordinates on the defect basis of an ambient operator.
    pub fn compress(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.basis.adjoint() * x * &self.basis
    }
}

pub fn defect_operator(p: &ComplexMatrix, tol: &Tolerances) -> Result<DefectData> {
    let n = ensure_square(p)?;
    let norm = op_norm(p);
    if norm > 1.0 + tol.psd_tol {
        return Err(Error::NotContraction { norm });
    }
    let eig = hermitian_eigen(&(ComplexMatrix::identity(n, n) - p.adjoint() * p));
    let mut d = ComplexMatrix::zeros(n, n);
    let mut kept = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        let lambda = lambda.max(0.0);
        let v = eig.vectors.column(k);
        if lambda > 0.0 {
            d += (v * v.adjoint()).scale(lambda.sqrt());
        }
        if lambda > tol.rank_tol {
            kept.push((k, lambda.sqrt()));
        }
    }
    let rank = kept.len();
    let basis = ComplexMatrix::from_fn(n, rank, |r, c| eig.vectors[(r, kept[c].0)]);
    Ok(DefectData {
        d,
        basis,
        singular: kept.iter().map(|&(_, sigma)| sigma).collect(),
        rank,
    })
}

/// Solution of the fundamental equation, in coordinates of the defect basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalOperator {
    pub f: ComplexMatrix,
    pub residual: f64,
    pub nr: f64,
    pub defect: DefectData,
}

impl FundamentalOperator {
    pub fn rank(&self) -> usize {
        self.defect.rank
    }

    /// `basis F basis*` on the ambient space.
    pub fn embedded(&self) -> ComplexMatrix {
        self.defect.embed(&self.f)
    }

    /// Fails when `w(F) > 1 + psd_tol`; only meaningful for verified Gamma-contractions.
    pub fn ensure_nr_bound(&self, tol: &Tolerances) -> Result<()> {
        if self.nr > 1.0 + tol.psd_tol {
            return Err(Error::NumericalRadiusExceeded { nr: self.nr });
        }
        Ok(())
    }
}

/// `F = D_P^+ (S - S*P) D_P^+` restricted to the defect space.
///
/// When `P` is unitary the defect space is trivial: `F` is `0 x 0` and the
/// residual is `||S - S*P||`.
pub fn solve_fundamental(pair: &OperatorPair, tol: &Tolerances) -> Result<FundamentalOperator> {
    let (s, p) = (pair.s(), pair.p());
    let defect = defect_operator(p, tol)?;
    let rhs = s - s.adjoint() * p;

    let coords = defect.compress(&rhs);
    let f = ComplexMatrix::from_fn(defect.rank, defect.rank, |r, c| {
        coords[(r, c)] / (defect.singular[r] * defect.singular[c])
    });
    let residual = op_norm(&(&rhs - &defect.d * defect.embed(&f) * &defect.d));
    let bound = tol.residual_tol * pair.scale();
    if residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }
    let nr = numerical_radius(&f, tol)?;
    Ok(FundamentalOperator { f, residual, nr, defect })
}

/// Block operators on `E^N` realizing `F_hat` as a fundamental operator:
/// `S` has `F_hat` on the diagonal and `F_hat*` on the first superdiagonal,
/// `P` is the block backward shift.
///
/// This is the compression of the Toeplitz pair `(T*_{F* + F z}, T*_z)` to
/// the first `N` coefficient blocks, a co-invariant subspace, so the pair is
/// exact rather than approximate.
pub fn truncated_model_from_f(f_hat: &ComplexMatrix, n_blocks: usize, tol: &Tolerances) -> Result<OperatorPair> {
    let k = ensure_square(f_hat)?;
    if n_blocks == 0 {
        return Err(Error::InvalidArgument("number of blocks must be positive".into()));
    }
    let nr = numerical_radius(f_hat, tol)?;
    if nr > 1.0 + tol.psd_tol {
        return Err(Error::NumericalRadiusExceeded { nr });
    }
    let dim = k * n_blocks;
    let f_adj = f_hat.adjoint();
    let mut s = ComplexMatrix::zeros(dim, dim);
    let mut p = ComplexMatrix::zeros(dim, dim);
    for b in 0..n_blocks {
        s.view_mut((b * k, b * k), (k, k)).copy_from(f_hat);
        if b + 1 < n_blocks {
            s.view_mut((b * k, (b + 1) * k), (k, k)).copy_from(&f_adj);
            p.view_mut((b * k, (b + 1) * k), (k, k)).fill_with_identity();
        }
    }
    OperatorPair::new(s, p, tol)
}
