use thiserror::Error;

/// Errors raised by the operator-theoretic routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("operators do not commute: defect {defect:.3e} exceeds {bound:.3e}")]
    NonCommuting { defect: f64, bound: f64 },
    #[error("simultaneous triangularization failed: residual {residual:.3e}")]
    Triangularization { residual: f64 },
    #[error("operator is not a contraction: norm {norm}")]
    NotContraction { norm: f64 },
    #[error("numerical radius {nr} exceeds 1")]
    NumericalRadiusExceeded { nr: f64 },
    #[error("S^2 - 4P has no principal square root (defective zero eigenvalue)")]
    NoSquareRoot,
    #[error("principal square root does not commute with the pair: defect {defect:.3e}")]
    NonCommutingRoot { defect: f64 },
    #[error("fundamental equation residual {residual:.3e} exceeds {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("contraction is not pure")]
    NotPure,
    #[error("model truncation tail {tail:.3e} still above target at N = {n_blocks}")]
    TailNotReached { n_blocks: usize, tail: f64 },
    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },
    #[error("symmetric reduction failed verification: relative error {max_rel_error:.3e}")]
    VerificationFailed { max_rel_error: f64 },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
