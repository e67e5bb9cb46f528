//! Commuting operator pairs and their classification: the rho pencil,
//! Gamma-contractivity on a polar grid, strictness, Gamma-isometries, purity,
//! and (de)symmetrization of commuting pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify_point, GammaPoint};
use crate::numerics::{
    commutator_norm, ensure_same_shape, ensure_square, golden_section_max, hermitian_eigen, hermitian_eigenvalues, hermitian_part,
    joint_spectrum, op_norm, principal_sqrt, spectral_radius, ComplexMatrix, Tolerances,
};

/// A commuting pair `(S, P)` of square matrices of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPair {
    s: ComplexMatrix,
    p: ComplexMatrix,
    commutator_defect: f64,
}

impl OperatorPair {
    /// Validates shapes, finiteness and `||SP - PS|| <= residual_tol (1 + ||S|| ||P||)`.
    pub fn new(s: ComplexMatrix, p: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        ensure_square(&s)?;
        ensure_square(&p)?;
        ensure_same_shape(&s, &p)?;
        let commutator_defect = commutator_norm(&s, &p);
        let bound = tol.residual_tol * (1.0 + op_norm(&s) * op_norm(&p));
        if commutator_defect > bound {
            return Err(Error::NonCommuting {
                defect: commutator_defect,
                bound,
            });
        }
        Ok(Self {
            s,
            p,
            commutator_defect,
        })
    }

    /// Scalar pair on C^1.
    pub fn scalar(s: Complex64, p: Complex64) -> Self {
        Self {
            s: ComplexMatrix::from_element(1, 1, s),
            p: ComplexMatrix::from_element(1, 1, p),
            commutator_defect: 0.0,
        }
    }

    pub fn s(&self) -> &ComplexMatrix {
        &self.s
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn commutator_defect(&self) -> f64 {
        self.commutator_defect
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// `1 + ||S|| + ||P||`, the scale residual tolerances are measured against.
    pub fn scale(&self) -> f64 {
        1.0 + op_norm(&self.s) + op_norm(&self.p)
    }

    /// `(S*, P*)`.
    pub fn adjoint(&self) -> Self {
        Self {
            s: self.s.adjoint(),
            p: self.p.adjoint(),
            commutator_defect: self.commutator_defect,
        }
    }

    /// `(r S, r^2 P)`.
    pub fn scaled(&self, r: f64) -> Self {
        let s = self.s.scale(r);
        let p = self.p.scale(r * r);
        let commutator_defect = commutator_norm(&s, &p);
        Self {
            s,
            p,
            commutator_defect,
        }
    }

    /// Conjugates both operators by a unitary `U`: `(U S U*, U P U*)`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        let s = u * &self.s * u.adjoint();
        let p = u * &self.p * u.adjoint();
        let commutator_defect = commutator_norm(&s, &p);
        Self {
            s,
            p,
            commutator_defect,
        }
    }

    pub fn into_parts(self) -> (ComplexMatrix, ComplexMatrix) {
        (self.s, self.p)
    }
}

/// Point of the parameter disc where a pencil attained its smallest eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub alpha: Complex64,
    pub eigenvector: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub is_member: bool,
    /// Smallest sampled eigenvalue (for isometry checks: minus the worst residual).
    pub margin: f64,
    /// The verdict is `margin >= -psd_tol * scale`.
    pub scale: f64,
    pub witness: Option<Witness>,
}

/// `rho(S, P) = 2(I - P*P) - (S - S*P) - (S* - P*S)`, symmetrized on return.
pub fn rho_pencil(pair: &OperatorPair) -> ComplexMatrix {
    let n = pair.dim();
    let (s, p) = (&pair.s, &pair.p);
    let x = s - s.adjoint() * p;
    let rho = (ComplexMatrix::identity(n, n) - p.adjoint() * p).scale(2.0) - &x - x.adjoint();
    hermitian_part(&rho)
}

/// Precomputed pieces of `alpha -> rho(alpha S, alpha^2 P)`.
///
/// With `X = S - |alpha|^2 S*P`, the pencil is
/// `2(I - |alpha|^4 P*P) - 2 Re(alpha X)`.
struct ScaledPencil {
    s: ComplexMatrix,
    s_adj_p: ComplexMatrix,
    p_adj_p: ComplexMatrix,
    identity: ComplexMatrix,
}

impl ScaledPencil {
    fn new(pair: &OperatorPair) -> Self {
        let n = pair.dim();
        Self {
            s: pair.s.clone(),
            s_adj_p: pair.s.adjoint() * &pair.p,
            p_adj_p: pair.p.adjoint() * &pair.p,
            identity: ComplexMatrix::identity(n, n),
        }
    }

    fn at(&self, alpha: Complex64) -> ComplexMatrix {
        let r2 = alpha.norm_sqr();
        let x = (&self.s - self.s_adj_p.scale(r2)) * alpha;
        let rho = (&self.identity - self.p_adj_p.scale(r2 * r2)).scale(2.0) - &x - x.adjoint();
        hermitian_part(&rho)
    }

    /// `(lambda_min, ||rho||)` at `alpha`.
    fn min_eigen(&self, alpha: Complex64) -> (f64, f64) {
        let values = hermitian_eigenvalues(&self.at(alpha));
        let (lo, hi) = (values[0], values[values.len() - 1]);
        (lo, lo.abs().max(hi.abs()))
    }

    /// `||X||` at `|alpha| = r`, the Lipschitz constant of the pencil in angle up to a factor 2.
    fn x_norm(&self, r: f64) -> f64 {
        r * op_norm(&(&self.s - self.s_adj_p.scale(r * r)))
    }

    fn witness(&self, alpha: Complex64) -> Witness {
        let eig = hermitian_eigen(&self.at(alpha));
        Witness {
            alpha,
            eigenvector: eig.vectors.column(0).iter().copied().collect(),
        }
    }
}

struct SweepResult {
    min: f64,
    max_norm: f64,
    argmin: (usize, usize),
    witness: Witness,
}

fn polar_alpha(radial: usize, angular: usize, j: usize, k: usize) -> Complex64 {
    let r = j as f64 / (radial - 1) as f64;
    Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / angular as f64)
}

/// Running minimum and norm maximum of a grid sweep.
struct SweepState {
    best: (f64, (usize, usize)),
    max_norm: f64,
}

impl SweepState {
    fn record(&mut self, lmin: f64, norm: f64, at: (usize, usize)) {
        self.max_norm = self.max_norm.max(norm);
        if lmin < self.best.0 || (lmin == self.best.0 && at < self.best.1) {
            self.best = (lmin, at);
        }
    }
}

/// Smallest eigenvalue of the pencil over the closed-disc polar grid (radius 1 included).
///
/// On a circle of radius `r` the pencil is `A_r - 2 Re(e^{i theta} X_r)`, so
/// both `lambda_min` and the norm move by at most `2 ||X_r||` per radian.
/// Grid points whose bounds from already evaluated neighbours cannot beat the
/// running extremes are skipped; the result equals a full scan.
fn sweep(pencil: &ScaledPencil, tol: &Tolerances) -> SweepResult {
    const STRIDE: usize = 16;
    let (radial, angular) = (tol.grid_radial, tol.grid_angular);
    let (lmin, norm) = pencil.min_eigen(Complex64::new(0.0, 0.0));
    let mut state = SweepState {
        best: (lmin, (0, 0)),
        max_norm: norm,
    };
    let dt = std::f64::consts::TAU / angular as f64;
    for j in 1..radial {
        let r = j as f64 / (radial - 1) as f64;
        let step = 2.0 * pencil.x_norm(r) * dt;
        let mut values = vec![(0.0, 0.0); angular];
        let eval = |k: usize, state: &mut SweepState, values: &mut [(f64, f64)]| {
            let (lmin, norm) = pencil.min_eigen(polar_alpha(radial, angular, j, k));
            state.record(lmin, norm, (j, k));
            values[k] = (lmin, norm);
        };
        let coarse: Vec<usize> = (0..angular).step_by(STRIDE).collect();
        for &k in &coarse {
            eval(k, &mut state, &mut values);
        }
        let mut stack: Vec<(usize, usize)> = coarse.iter().map(|&a| (a, (a + STRIDE).min(angular))).collect();
        while let Some((a, b)) = stack.pop() {
            if b - a <= 1 {
                continue;
            }
            let ((la, na), (lb, nb)) = (values[a], values[b % angular]);
            let span = step * (b - a) as f64;
            let slack = 1e-12 * (1.0 + state.max_norm);
            let lower = (la + lb - span) / 2.0;
            let upper = (na + nb + span) / 2.0;
            if lower > state.best.0 + slack && upper + slack < state.max_norm {
                continue;
            }
            let mid = (a + b) / 2;
            eval(mid, &mut state, &mut values);
            stack.push((a, mid));
            stack.push((mid, b));
        }
    }
    let (min, argmin) = state.best;
    SweepResult {
        min,
        max_norm: state.max_norm,
        argmin,
        witness: pencil.witness(polar_alpha(radial, angular, argmin.0, argmin.1)),
    }
}

fn ensure_ready(pair: &OperatorPair, tol: &Tolerances) -> Result<()> {
    tol.validate()?;
    let bound = tol.residual_tol * (1.0 + op_norm(&pair.s) * op_norm(&pair.p));
    if pair.commutator_defect > bound {
        return Err(Error::NonCommuting {
            defect: pair.commutator_defect,
            bound,
        });
    }
    Ok(())
}

/// Grid certificate of Gamma-contractivity: `rho(alpha S, alpha^2 P) >= 0`
/// at every sampled `alpha` of the closed unit disc.
pub fn check_gamma_contraction(pair: &OperatorPair, tol: &Tolerances) -> Result<PairVerdict> {
    ensure_ready(pair, tol)?;
    if pair.dim() == 0 {
        return Ok(PairVerdict {
            is_member: true,
            margin: 0.0,
            scale: 1.0,
            witness: None,
        });
    }
    let result = sweep(&ScaledPencil::new(pair), tol);
    let scale = 1.0 + result.max_norm;
    Ok(PairVerdict {
        is_member: result.min >= -tol.psd_tol * scale,
        margin: result.min,
        scale,
        witness: Some(result.witness),
    })
}

/// Uniform lower bound `c` with `rho(alpha S, alpha^2 P) >= c I` on the closed disc.
///
/// The grid minimum is polished by alternating golden-section searches in
/// angle and radius around the minimizing grid cell, so the returned value is
/// never above the plain grid minimum.
pub fn strictness_constant(pair: &OperatorPair, tol: &Tolerances) -> Result<f64> {
    ensure_ready(pair, tol)?;
    if pair.dim() == 0 {
        return Ok(0.0);
    }
    let pencil = ScaledPencil::new(pair);
    let result = sweep(&pencil, tol);
    let (j, k) = result.argmin;
    let dr = 1.0 / (tol.grid_radial - 1) as f64;
    let dt = std::f64::consts::TAU / tol.grid_angular as f64;
    let lmin = |r: f64, t: f64| pencil.min_eigen(Complex64::from_polar(r, t)).0;

    let mut r = j as f64 * dr;
    let mut t = k as f64 * dt;
    let mut best = result.min;
    for _ in 0..3 {
        let (tt, v) = golden_section_max(&|x| -lmin(r, x), t - dt, t + dt);
        if -v < best {
            best = -v;
            t = tt;
        }
        let (lo, hi) = ((r - dr).max(0.0), (r + dr).min(1.0));
        let (rr, v) = golden_section_max(&|x| -lmin(x, t), lo, hi);
        if -v < best {
            best = -v;
            r = rr;
        }
        // the radial search never reaches the endpoints themselves
        let edge = lmin(hi, t);
        if edge < best {
            best = edge;
            r = hi;
        }
    }
    Ok(best)
}

/// A pair is strict when its strictness constant exceeds `psd_tol`.
pub fn is_strict(pair: &OperatorPair, tol: &Tolerances) -> Result<bool> {
    Ok(strictness_constant(pair, tol)? > tol.psd_tol)
}

/// Gamma-isometry test: `P` isometric, `S = S*P`, `r(S) <= 2`. In finite
/// dimensions such a pair is a Gamma-unitary, so its joint spectrum must lie
/// in the distinguished boundary as well.
pub fn check_gamma_isometry(pair: &OperatorPair, tol: &Tolerances) -> Result<PairVerdict> {
    ensure_ready(pair, tol)?;
    let n = pair.dim();
    let (s, p) = (&pair.s, &pair.p);
    let isometry_defect = op_norm(&(p.adjoint() * p - ComplexMatrix::identity(n, n)));
    let symmetry_defect = op_norm(&(s - s.adjoint() * p));
    let radius_excess = (spectral_radius(s) - 2.0).max(0.0);
    let worst = isometry_defect.max(symmetry_defect).max(radius_excess);

    let mut is_member =
        isometry_defect <= tol.residual_tol && symmetry_defect <= tol.residual_tol && radius_excess <= tol.psd_tol;
    if is_member {
        let spectrum = joint_spectrum(s, p, tol)?;
        is_member = spectrum
            .iter()
            .all(|&(a, b)| classify_point(&GammaPoint::new(a, b), tol).in_bgamma());
    }
    Ok(PairVerdict {
        is_member,
        margin: -worst,
        scale: 1.0,
        witness: None,
    })
}

/// Finite-dimensional purity: powers of `P` decay to zero.
pub fn check_pure(p: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    ensure_square(p)?;
    let norm = op_norm(p);
    if norm > 1.0 + tol.psd_tol {
        return Err(Error::NotContraction { norm });
    }
    if spectral_radius(p) <= 1.0 - tol.rank_tol {
        return Ok(true);
    }
    let mut power = p.clone();
    let mut exponent = 1usize;
    while exponent <= 512 {
        if op_norm(&power) <= 1e-8 {
            return Ok(true);
        }
        power = &power * &power;
        exponent *= 2;
    }
    Ok(false)
}

/// `(T1 + T2, T1 T2)` for commuting contractions.
pub fn symmetrize_pair(t1: &ComplexMatrix, t2: &ComplexMatrix, tol: &Tolerances) -> Result<OperatorPair> {
    ensure_square(t1)?;
    ensure_square(t2)?;
    ensure_same_shape(t1, t2)?;
    for t in [t1, t2] {
        let norm = op_norm(t);
        if norm > 1.0 + tol.psd_tol {
            return Err(Error::NotContraction { norm });
        }
    }
    let defect = commutator_norm(t1, t2);
    if defect > tol.residual_tol {
        return Err(Error::NonCommuting {
            defect,
            bound: tol.residual_tol,
        });
    }
    OperatorPair::new(t1 + t2, t1 * t2, tol)
}

/// Splits `(S, P)` as `((S + R)/2, (S - R)/2)` with `R` the principal square
/// root of `S^2 - 4P`. Failure does not prove that no commuting square root exists.
pub fn desymmetrize_pair(pair: &OperatorPair, tol: &Tolerances) -> Result<(ComplexMatrix, ComplexMatrix)> {
    ensure_ready(pair, tol)?;
    let (s, p) = (&pair.s, &pair.p);
    let disc = s * s - p.scale(4.0);
    let root = principal_sqrt(&disc)?;
    let scale = (1.0 + op_norm(&root)) * pair.scale();
    let defect = commutator_norm(&root, s).max(commutator_norm(&root, p));
    if defect > tol.residual_tol * scale {
        return Err(Error::NonCommutingRoot { defect });
    }
    let t1 = (s + &root).scale(0.5);
    let t2 = (s - &root).scale(0.5);
    Ok((t1, t2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn e(n: usize, i: usize, j: usize, v: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(i, j)] = c64(v, 0.0);
        m
    }

    fn pair(s: ComplexMatrix, p: ComplexMatrix) -> OperatorPair {
        OperatorPair::new(s, p, &Tolerances::default()).unwrap()
    }

    fn scalar(s: f64, p: f64) -> OperatorPair {
        OperatorPair::scalar(c64(s, 0.0), c64(p, 0.0))
    }

    /// Brute-force minimum of the smallest eigenvalue of the pencil, evaluated
    /// straight from the defining formula on a fine polar grid.
    fn pencil_min_oracle(pr: &OperatorPair, radial: usize, angular: usize) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..=radial {
            for k in 0..angular {
                let alpha = Complex64::from_polar(j as f64 / radial as f64, std::f64::consts::TAU * k as f64 / angular as f64);
                let scaled = OperatorPair::new(pr.s() * alpha, pr.p() * (alpha * alpha), &Tolerances::default()).unwrap();
                best = best.min(hermitian_eigen(&rho_pencil(&scaled)).min());
            }
        }
        best
    }

    #[test]
    fn pruned_sweep_matches_full_scan() {
        use rand::SeedableRng;
        let tol = Tolerances {
            grid_angular: 256,
            grid_radial: 6,
            ..Tolerances::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for n in 1..6 {
            for r in [0.7, 1.0, 1.4] {
                let base = crate::generators::symmetrized_pair(&mut rng, n, &tol).unwrap();
                let pr = base.scaled(r);
                let pencil = ScaledPencil::new(&pr);
                let fast = sweep(&pencil, &tol);
                let (mut min, mut max_norm) = (f64::INFINITY, 0.0f64);
                for j in 0..tol.grid_radial {
                    for k in 0..tol.grid_angular {
                        let (l, nrm) = pencil.min_eigen(polar_alpha(tol.grid_radial, tol.grid_angular, j, k));
                        min = min.min(l);
                        max_norm = max_norm.max(nrm);
                    }
                }
                assert_eq!(fast.min, min);
                assert_eq!(fast.max_norm, max_norm);
            }
        }
    }

    #[test]
    fn rho_examples() {
        let zero = pair(ComplexMatrix::zeros(3, 3), ComplexMatrix::zeros(3, 3));
        assert!((rho_pencil(&zero) - ComplexMatrix::identity(3, 3).scale(2.0)).norm() < 1e-15);
        assert!(rho_pencil(&scalar(2.0, 1.0)).norm() < 1e-15);
        assert!((rho_pencil(&scalar(1.0, 0.25))[(0, 0)].re - 0.375).abs() < 1e-15);
    }

    #[test]
    fn contraction_examples() {
        let tol = Tolerances::default();
        let zero = pair(ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2));
        let v = check_gamma_contraction(&zero, &tol).unwrap();
        assert!(v.is_member && (v.margin - 2.0).abs() < 1e-14);

        let nil = pair(e(2, 0, 1, 2.0), ComplexMatrix::zeros(2, 2));
        let oracle = pencil_min_oracle(&nil, 10, 64);
        assert!(oracle.abs() < 1e-12);
        let v = check_gamma_contraction(&nil, &tol).unwrap();
        assert!(v.is_member && v.margin.abs() < 1e-12, "{v:?}");

        let v = check_gamma_contraction(&scalar(3.0, 0.0), &tol).unwrap();
        assert!(!v.is_member);
        let w = v.witness.unwrap();
        assert!((w.alpha - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((v.margin + 4.0).abs() < 1e-12);
    }

    #[test]
    fn strictness_examples() {
        let tol = Tolerances::default();
        let zero = pair(ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2));
        assert!((strictness_constant(&zero, &tol).unwrap() - 2.0).abs() < 1e-14);

        let half = pair(e(2, 0, 1, 1.0), ComplexMatrix::zeros(2, 2));
        let oracle = pencil_min_oracle(&half, 10, 64);
        assert!((oracle - 1.0).abs() < 1e-12);
        assert!((strictness_constant(&half, &tol).unwrap() - 1.0).abs() < 1e-12);

        let c = strictness_constant(&scalar(2.0, 1.0), &tol).unwrap();
        assert!(c.abs() < 1e-12);
        assert!(!is_strict(&scalar(2.0, 1.0), &tol).unwrap());
    }

    #[test]
    fn strictness_refinement_goes_below_grid() {
        // the minimum sits at alpha = e^{i theta} with theta off every grid angle
        let tol = Tolerances {
            grid_angular: 16,
            grid_radial: 3,
            ..Tolerances::default()
        };
        let rot = Complex64::from_polar(1.0, 0.123);
        let pr = OperatorPair::scalar(rot * 0.8, c64(0.0, 0.0));
        let c = strictness_constant(&pr, &tol).unwrap();
        // rho(alpha s, 0) = 2 - 2 Re(alpha s), minimized at |alpha| = 1: 2 - 1.6
        assert!((c - 0.4).abs() < 1e-12, "{c}");
    }

    #[test]
    fn isometry_examples() {
        let tol = Tolerances::default();
        assert!(check_gamma_isometry(&scalar(2.0, 1.0), &tol).unwrap().is_member);
        assert!(!check_gamma_isometry(&scalar(0.0, 0.0), &tol).unwrap().is_member);
        assert!(check_gamma_isometry(&scalar(0.0, -1.0), &tol).unwrap().is_member);
        // isometric P but S outside the spectral bound
        assert!(!check_gamma_isometry(&scalar(3.0, 1.0), &tol).unwrap().is_member);
    }

    #[test]
    fn purity_examples() {
        let tol = Tolerances::default();
        assert!(check_pure(&ComplexMatrix::zeros(2, 2), &tol).unwrap());
        assert!(!check_pure(&ComplexMatrix::identity(1, 1), &tol).unwrap());
        assert!(check_pure(&ComplexMatrix::from_element(1, 1, c64(0.5, 0.0)), &tol).unwrap());
        assert!(check_pure(&e(3, 0, 1, 1.0), &tol).unwrap());
        assert!(matches!(
            check_pure(&ComplexMatrix::from_element(1, 1, c64(1.5, 0.0)), &tol),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn symmetrize_examples() {
        let tol = Tolerances::default();
        let z = ComplexMatrix::zeros(2, 2);
        let pr = symmetrize_pair(&z, &z, &tol).unwrap();
        assert!(pr.s().norm() == 0.0 && pr.p().norm() == 0.0);

        let n = e(2, 0, 1, 1.0);
        let pr = symmetrize_pair(&n, &n, &tol).unwrap();
        assert_eq!(pr.s(), &e(2, 0, 1, 2.0));
        assert!(pr.p().norm() == 0.0);

        let h = ComplexMatrix::from_element(1, 1, c64(0.5, 0.0));
        let pr = symmetrize_pair(&h, &h, &tol).unwrap();
        assert!((pr.s()[(0, 0)].re - 1.0).abs() < 1e-15 && (pr.p()[(0, 0)].re - 0.25).abs() < 1e-15);

        assert!(matches!(
            symmetrize_pair(&n, &e(2, 1, 0, 1.0), &tol),
            Err(Error::NonCommuting { .. })
        ));
        let big = ComplexMatrix::identity(2, 2).scale(1.1);
        assert!(matches!(symmetrize_pair(&big, &z, &tol), Err(Error::NotContraction { .. })));
    }

    #[test]
    fn desymmetrize_examples() {
        let tol = Tolerances::default();
        let id = ComplexMatrix::identity(2, 2);
        let (t1, t2) = desymmetrize_pair(&pair(ComplexMatrix::zeros(2, 2), -&id), &tol).unwrap();
        assert!((t1 - &id).norm() < 1e-12 && (t2 + &id).norm() < 1e-12);

        let (t1, t2) = desymmetrize_pair(&scalar(1.0, 0.25), &tol).unwrap();
        assert!((t1[(0, 0)].re - 0.5).abs() < 1e-12 && (t2[(0, 0)].re - 0.5).abs() < 1e-12);

        let nil = pair(ComplexMatrix::zeros(2, 2), e(2, 0, 1, -0.25));
        assert_eq!(desymmetrize_pair(&nil, &tol), Err(Error::NoSquareRoot));
        // still a Gamma-contraction: the failure is about the square root, not membership
        assert!(pencil_min_oracle(&nil, 10, 64) >= 0.0);
        assert!(check_gamma_contraction(&nil, &tol).unwrap().is_member);
    }

    #[test]
    fn pair_constructor_validates() {
        let tol = Tolerances::default();
        assert!(matches!(
            OperatorPair::new(ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(3, 3), &tol),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            OperatorPair::new(e(2, 0, 1, 1.0), e(2, 1, 0, 1.0), &tol),
            Err(Error::NonCommuting { .. })
        ));
    }
}
