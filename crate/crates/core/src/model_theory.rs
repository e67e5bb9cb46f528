//! Truncated functional model of a pure Gamma-contraction.
//!
//! For pure `P` the map `W h = (D_{P*} P*^n h)_n` is an isometry into
//! `l^2(D_{P*})` and intertwines `(S*, P*)` with the adjoint of the pair
//! `(I (x) F_** + M_z (x) F_*, M_z (x) I)`, where `F_*` is the fundamental
//! operator of `(S*, P*)`. Everything here works on the first `N` blocks of
//! that space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::{defect_operator, solve_fundamental};
use crate::gamma_pairs::{check_pure, OperatorPair};
use crate::numerics::{ensure_square, maximize_on_circle, op_norm, ComplexMatrix, Tolerances};

/// `||P*^N||` must fall below this before a model is accepted.
pub const TAIL_TARGET: f64 = 1e-8;

/// Largest truncation level tried by [`build_model`].
pub const MAX_BLOCKS: usize = 4096;

/// Absolute floor added to every residual bound.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;

/// Taylor coefficients of the characteristic function of `P`, in defect-basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFnCoeffs {
    /// `Theta_k`, each `rank(D_{P*}) x rank(D_P)`.
    pub coeffs: Vec<ComplexMatrix>,
    /// `n x rank(D_P)` orthonormal basis of the defect space of `P`.
    pub domain_basis: ComplexMatrix,
    /// `n x rank(D_{P*})` orthonormal basis of the defect space of `P*`.
    pub codomain_basis: ComplexMatrix,
}

/// `Theta_0 = -P` and `Theta_k = D_{P*} P*^{k-1} D_P` for `k >= 1`, compressed to defect bases.
pub fn characteristic_coeffs(p: &ComplexMatrix, n_terms: usize, tol: &Tolerances) -> Result<CharFnCoeffs> {
    ensure_square(p)?;
    if n_terms == 0 {
        return Err(Error::InvalidArgument("number of coefficients must be positive".into()));
    }
    let dom = defect_operator(p, tol)?;
    let cod = defect_operator(&p.adjoint(), tol)?;
    let p_adj = p.adjoint();
    let right = &dom.d * &dom.basis;
    let left = cod.basis.adjoint() * &cod.d;

    let mut coeffs = vec![-(cod.basis.adjoint() * p * &dom.basis)];
    let mut power = right;
    for _ in 1..n_terms {
        coeffs.push(&left * &power);
        power = &p_adj * power;
    }
    Ok(CharFnCoeffs {
        coeffs,
        domain_basis: dom.basis,
        codomain_basis: cod.basis,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedModel {
    pub n_blocks: usize,
    /// Dimension of the defect space of `P*`, i.e. of each block.
    pub block_dim: usize,
    /// `F_*^*` on diagonal blocks, `F_*` on the first subdiagonal.
    pub t: ComplexMatrix,
    /// Block forward shift.
    pub v: ComplexMatrix,
    /// `(N * block_dim) x n` embedding of the state space.
    pub w: ComplexMatrix,
    /// `||P*^N||`.
    pub tail: f64,
    pub f_star: ComplexMatrix,
}

impl TruncatedModel {
    pub fn dim(&self) -> usize {
        self.n_blocks * self.block_dim
    }
}

/// Builds the model at the smallest `N = n_blocks * 2^j` with `||P*^N|| <= 1e-8`.
pub fn build_model(pair: &OperatorPair, n_blocks: usize, tol: &Tolerances) -> Result<TruncatedModel> {
    if n_blocks == 0 {
        return Err(Error::InvalidArgument("number of blocks must be positive".into()));
    }
    if !check_pure(pair.p(), tol)? {
        return Err(Error::NotPure);
    }
    let mut n = n_blocks.min(MAX_BLOCKS);
    loop {
        let tail = op_norm(&adjoint_power(pair.p(), n));
        if tail <= TAIL_TARGET {
            return build_model_at(pair, n, tol);
        }
        if n >= MAX_BLOCKS {
            return Err(Error::TailNotReached { n_blocks: n, tail });
        }
        n = (n * 2).min(MAX_BLOCKS);
    }
}

fn adjoint_power(p: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let n = p.nrows();
    let mut out = ComplexMatrix::identity(n, n);
    let mut base = p.adjoint();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = &out * &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    out
}

/// Builds the model at exactly `n_blocks` blocks, whatever the tail.
pub fn build_model_at(pair: &OperatorPair, n_blocks: usize, tol: &Tolerances) -> Result<TruncatedModel> {
    if n_blocks == 0 {
        return Err(Error::InvalidArgument("number of blocks must be positive".into()));
    }
    let fo = solve_fundamental(&pair.adjoint(), tol)?;
    let k = fo.rank();
    let n = pair.dim();
    let f_star = fo.f.clone();
    let f_star_adj = f_star.adjoint();
    let dim = n_blocks * k;

    let mut t = ComplexMatrix::zeros(dim, dim);
    let mut v = ComplexMatrix::zeros(dim, dim);
    let mut w = ComplexMatrix::zeros(dim, n);
    let p_adj = pair.p().adjoint();
    let mut row = fo.defect.basis.adjoint() * &fo.defect.d;
    for b in 0..n_blocks {
        t.view_mut((b * k, b * k), (k, k)).copy_from(&f_star_adj);
        if b + 1 < n_blocks {
            t.view_mut(((b + 1) * k, b * k), (k, k)).copy_from(&f_star);
            v.view_mut(((b + 1) * k, b * k), (k, k)).fill_with_identity();
        }
        w.view_mut((b * k, 0), (k, n)).copy_from(&row);
        row = &row * &p_adj;
    }
    let tail = op_norm(&adjoint_power(pair.p(), n_blocks));
    Ok(TruncatedModel {
        n_blocks,
        block_dim: k,
        t,
        v,
        w,
        tail,
        f_star,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    /// `max ||W* T^m V^n W - S^m P^n||` over `m <= m_max`, `n <= n_max`.
    pub residual: f64,
    /// `||W*W - I||`.
    pub isometry_defect: f64,
    /// `||W P* - V* W||`.
    pub shift_residual: f64,
    /// `||W S* - T* W||`.
    pub symbol_residual: f64,
    pub tail: f64,
    /// `(1 + ||S||)(1 + m_max + n_max)`.
    pub constant: f64,
    pub n_blocks: usize,
}

impl DilationReport {
    /// `C tail`, plus a roundoff floor.
    pub fn bound(&self) -> f64 {
        self.constant * self.tail + ROUNDOFF_FLOOR
    }

    /// Every residual is within [`DilationReport::bound`] and `W` is isometric up to `tail^2`.
    pub fn passes(&self) -> bool {
        let bound = self.bound();
        self.residual <= bound
            && self.shift_residual <= bound
            && self.symbol_residual <= bound
            && self.isometry_defect <= self.tail * self.tail + ROUNDOFF_FLOOR
    }
}

/// Checks `P_H T^m V^n |_H = S^m P^n` and the co-isometric extension identities.
pub fn dilation_check(model: &TruncatedModel, pair: &OperatorPair, m_max: usize, n_max: usize) -> Result<DilationReport> {
    let n = pair.dim();
    if model.w.shape() != (model.dim(), n) {
        return Err(Error::ShapeMismatch {
            expected: (model.dim(), n),
            found: model.w.shape(),
        });
    }
    let w = &model.w;
    let w_adj = w.adjoint();

    // columns: V^j W for j <= n_max, then T^i applied on top
    let mut residual: f64 = 0.0;
    let mut vw = w.clone();
    let mut p_pow = ComplexMatrix::identity(n, n);
    for _ in 0..=n_max {
        let mut tvw = vw.clone();
        let mut sp = p_pow.clone();
        for _ in 0..=m_max {
            residual = residual.max(op_norm(&(&w_adj * &tvw - &sp)));
            tvw = &model.t * tvw;
            sp = pair.s() * sp;
        }
        vw = &model.v * vw;
        p_pow = pair.p() * p_pow;
    }

    let isometry_defect = op_norm(&(&w_adj * w - ComplexMatrix::identity(n, n)));
    let shift_residual = op_norm(&(w * pair.p().adjoint() - model.v.adjoint() * w));
    let symbol_residual = op_norm(&(w * pair.s().adjoint() - model.t.adjoint() * w));
    let constant = (1.0 + op_norm(pair.s())) * (1 + m_max + n_max) as f64;
    Ok(DilationReport {
        residual,
        isometry_defect,
        shift_residual,
        symbol_residual,
        tail: model.tail,
        constant,
        n_blocks: model.n_blocks,
    })
}

/// `max_theta ||F_*^* + F_* e^{i theta}||`, the sup norm of the model multiplier.
pub fn multiplier_sup_norm(f_star: &ComplexMatrix, grid: usize) -> f64 {
    if f_star.nrows() == 0 {
        return 0.0;
    }
    let f_adj = f_star.adjoint();
    maximize_on_circle(
        |theta| op_norm(&(&f_adj + f_star * num_complex::Complex64::from_polar(1.0, theta))),
        grid,
    )
    .1
}
