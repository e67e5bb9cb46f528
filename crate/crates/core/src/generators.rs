//! Seeded random instances: commuting contractions, Gamma-contractions of
//! several families, matrices with prescribed numerical radius, and random
//! polynomials.
//!
//! Every generator draws from a caller-supplied [`ChaCha8Rng`], so a single
//! `u64` seed reproduces an entire experiment on any platform.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fundamental::truncated_model_from_f;
use crate::gamma_pairs::{symmetrize_pair, OperatorPair};
use crate::numerics::{numerical_radius, op_norm, ComplexMatrix, Tolerances};
use crate::varieties::BivarPolynomial;
use crate::von_neumann::MatrixPolynomial;

/// Norms of generated contractions are drawn from this range.
pub const CONTRACTION_NORMS: (f64, f64) = (0.5, 0.98);

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for z in m.iter_mut() {
        *z = gaussian(rng);
    }
    m
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s diagonal absorbed.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, k)] *= phase;
        }
    }
    q
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..=hi)
}

fn with_norm(m: ComplexMatrix, target: f64) -> ComplexMatrix {
    let norm = op_norm(&m);
    if norm > 0.0 {
        m * Complex64::new(target / norm, 0.0)
    } else {
        m
    }
}

fn polynomial_in(u: &ComplexMatrix, coeffs: &[Complex64]) -> ComplexMatrix {
    let n = u.nrows();
    let mut acc = ComplexMatrix::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = &acc * u + ComplexMatrix::identity(n, n) * c;
    }
    acc
}

/// Two commuting contractions with norms in [`CONTRACTION_NORMS`].
///
/// Both are polynomials in one random upper-triangular matrix, conjugated by
/// a Haar unitary so they are not simultaneously triangular in the standard basis.
pub fn commuting_contractions(rng: &mut ChaCha8Rng, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let u = ginibre(rng, n, n).upper_triangle();
    let make = |rng: &mut ChaCha8Rng| {
        let degree = rng.random_range(1..=3);
        let coeffs: Vec<_> = (0..=degree).map(|_| gaussian(rng)).collect();
        let m = polynomial_in(&u, &coeffs);
        let target = uniform(rng, CONTRACTION_NORMS);
        with_norm(m, target)
    };
    let t1 = make(rng);
    let t2 = make(rng);
    let w = haar_unitary(rng, n);
    let wa = w.adjoint();
    (&w * t1 * &wa, &w * t2 * &wa)
}

/// `(T1 + T2, T1 T2)` for a random commuting pair of contractions.
pub fn symmetrized_pair(rng: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Result<OperatorPair> {
    let (t1, t2) = commuting_contractions(rng, n);
    symmetrize_pair(&t1, &t2, tol)
}

/// Rescales `a` to have numerical radius `target`.
pub fn with_numerical_radius(a: ComplexMatrix, target: f64, tol: &Tolerances) -> Result<ComplexMatrix> {
    let nr = numerical_radius(&a, tol)?;
    Ok(if nr > 0.0 { a * Complex64::new(target / nr, 0.0) } else { a })
}

/// Ginibre matrix scaled to a numerical radius drawn uniformly from `range`.
pub fn matrix_with_nr(rng: &mut ChaCha8Rng, n: usize, range: (f64, f64), tol: &Tolerances) -> Result<ComplexMatrix> {
    let target = uniform(rng, range);
    with_numerical_radius(ginibre(rng, n, n), target, tol)
}

/// Pair built by the converse construction from a random `F_hat` of size `k`.
///
/// The numerical radius of `F_hat` is drawn from `[0.2, 1 - 1e-6]` to stay
/// clear of the `w <= 1` validation boundary.
pub fn truncated_model_pair(
    rng: &mut ChaCha8Rng,
    k: usize,
    n_blocks: usize,
    tol: &Tolerances,
) -> Result<(ComplexMatrix, OperatorPair)> {
    let f_hat = matrix_with_nr(rng, k, (0.2, 1.0 - 1e-6), tol)?;
    let pair = truncated_model_from_f(&f_hat, n_blocks, tol)?;
    Ok((f_hat, pair))
}

/// `(r S, r^2 P)` for a random symmetrized pair.
pub fn strict_pair(rng: &mut ChaCha8Rng, n: usize, r: f64, tol: &Tolerances) -> Result<OperatorPair> {
    Ok(symmetrized_pair(rng, n, tol)?.scaled(r))
}

/// A random matrix with an eigenvalue on the unit circle.
pub fn planted_unimodular(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut t = ginibre(rng, n, n).upper_triangle() * Complex64::new(0.5, 0.0);
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    t[(0, 0)] = Complex64::from_polar(1.0, theta);
    let w = haar_unitary(rng, n);
    &w * t * w.adjoint()
}

/// Random `k x k` matrix polynomial, `k <= max_size`, total degree `<= max_degree`.
///
/// Every monomial of degree at most the drawn degree is present with
/// probability 0.6 and a Gaussian coefficient; a zero draw falls back to the
/// constant identity.
pub fn matrix_polynomial(rng: &mut ChaCha8Rng, max_size: usize, max_degree: usize) -> MatrixPolynomial {
    let k = rng.random_range(1..=max_size.max(1));
    let degree = rng.random_range(0..=max_degree);
    let mut poly = MatrixPolynomial::zero(k);
    let mut any = false;
    for total in 0..=degree {
        for i in 0..=total {
            if rng.random::<f64>() < 0.6 {
                poly.add_term(i, total - i, &ginibre(rng, k, k)).expect("shape and finiteness by construction");
                any = true;
            }
        }
    }
    if !any {
        poly.add_term(0, 0, &ComplexMatrix::identity(k, k)).expect("identity coefficient");
    }
    poly
}

/// Random polynomial of bidegree at most `(dx, dy)` with Gaussian coefficients on a random support.
pub fn bivar_polynomial(rng: &mut ChaCha8Rng, dx: usize, dy: usize) -> BivarPolynomial {
    let (dx, dy) = (rng.random_range(0..=dx), rng.random_range(0..=dy));
    let mut terms = Vec::new();
    for i in 0..=dx {
        for j in 0..=dy {
            if rng.random::<f64>() < 0.7 {
                terms.push((i, j, gaussian(rng)));
            }
        }
    }
    if terms.is_empty() {
        terms.push((dx, dy, Complex64::new(1.0, 0.0)));
    }
    BivarPolynomial::from_terms(&terms).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_pairs::check_gamma_contraction;
    use crate::numerics::commutator_norm;
    use rand::SeedableRng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let u = haar_unitary(&mut rng, n);
            assert!((u.adjoint() * &u - ComplexMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn contractions_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..7 {
            let (t1, t2) = commuting_contractions(&mut rng, n);
            assert!(commutator_norm(&t1, &t2) < 1e-12);
            for t in [&t1, &t2] {
                let norm = op_norm(t);
                assert!((CONTRACTION_NORMS.0 - 1e-12..=CONTRACTION_NORMS.1 + 1e-12).contains(&norm));
            }
        }
    }

    #[test]
    fn families_are_gamma_contractions() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..5 {
            assert!(check_gamma_contraction(&symmetrized_pair(&mut rng, n, &tol).unwrap(), &tol).unwrap().is_member);
            let (_, pair) = truncated_model_pair(&mut rng, n, 3, &tol).unwrap();
            assert!(check_gamma_contraction(&pair, &tol).unwrap().is_member);
        }
    }

    #[test]
    fn planted_eigenvalue_is_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = planted_unimodular(&mut rng, 4);
        let eig = crate::numerics::eigenvalues(&a);
        assert!(eig.iter().any(|z| (z.norm() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn deterministic() {
        let a = ginibre(&mut ChaCha8Rng::seed_from_u64(9), 3, 3);
        let b = ginibre(&mut ChaCha8Rng::seed_from_u64(9), 3, 3);
        assert_eq!(a, b);
    }
}
