use gamma_core::fundamental::{solve_fundamental, truncated_model_from_f};
use gamma_core::gamma_pairs::{
    check_gamma_contraction, desymmetrize_pair, rho_pencil, strictness_constant, symmetrize_pair,
};
use gamma_core::generators::{
    commuting_contractions, gaussian, ginibre, haar_unitary, matrix_polynomial, matrix_with_nr, strict_pair,
    symmetrized_pair, truncated_model_pair,
};
use gamma_core::geometry::{classify_point, point_roots};
use gamma_core::model_theory::{build_model, dilation_check, multiplier_sup_norm};
use gamma_core::numerics::{
    c64, hermitian_eigen, joint_spectrum, maximize_on_circle, numerical_radius, op_norm, singular_values,
    spectral_radius,
};
use gamma_core::varieties::{
    boundary_sample, classify_distinguished, fiber_at_p, variety_membership, DeterminantalVariety,
    DistinguishedStatus,
};
use gamma_core::von_neumann::{boundary_max, cup_transform, evaluate_pair, lambda_variety};
use gamma_core::{ComplexMatrix, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// numerics

#[test]
fn numerical_radius_between_half_norm_and_norm() {
    let mut rng = rng(1);
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let a = ginibre(&mut rng, n, n);
        let nr = numerical_radius(&a, &tol()).unwrap();
        let norm = op_norm(&a);
        assert!(nr <= norm * (1.0 + 1e-12) && norm <= 2.0 * nr * (1.0 + 1e-12), "{nr} {norm}");
    }
}

#[test]
fn rotated_sum_peaks_at_twice_numerical_radius() {
    let mut rng = rng(2);
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let a = ginibre(&mut rng, n, n);
        let peak = maximize_on_circle(
            |t| {
                let u = Complex64::from_polar(1.0, t);
                op_norm(&(&a * u + a.adjoint() * u.conj()))
            },
            1024,
        )
        .1;
        let nr = numerical_radius(&a, &tol()).unwrap();
        assert!((peak - 2.0 * nr).abs() <= 1e-8 * (1.0 + nr));
    }
}

#[test]
fn joint_spectrum_of_diagonal_functions() {
    let mut rng = rng(3);
    let d: Vec<Complex64> = (0..5).map(|_| gaussian(&mut rng)).collect();
    let f = |z: Complex64| z * z + 1.0;
    let g = |z: Complex64| z * 3.0 - c64(0.0, 1.0);
    let s = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(5, d.iter().map(|&z| f(z))));
    let p = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(5, d.iter().map(|&z| g(z))));
    let spectrum = joint_spectrum(&s, &p, &tol()).unwrap();
    let mut want: Vec<(Complex64, Complex64)> = d.iter().map(|&z| (f(z), g(z))).collect();
    want.sort_by(|a, b| {
        (a.0.re, a.0.im, a.1.re, a.1.im)
            .partial_cmp(&(b.0.re, b.0.im, b.1.re, b.1.im))
            .unwrap()
    });
    assert_eq!(spectrum, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn numerical_radius_rotation_invariant(seed in any::<u64>(), n in 1usize..6, theta in 0.0f64..std::f64::consts::TAU) {
        let a = ginibre(&mut rng(seed), n, n);
        let u = Complex64::from_polar(1.0, theta);
        let lhs = numerical_radius(&(&a * u), &tol()).unwrap();
        let rhs = numerical_radius(&a, &tol()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }
}

// geometry

#[test]
fn joint_spectrum_of_symmetrized_pair_in_gamma() {
    let mut rng = rng(4);
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        let pair = symmetrized_pair(&mut rng, n, &tol()).unwrap();
        for (s, p) in joint_spectrum(pair.s(), pair.p(), &tol()).unwrap() {
            let pt = gamma_core::geometry::GammaPoint::new(s, p);
            assert!(classify_point(&pt, &tol()).in_gamma());
            let (z1, z2) = point_roots(&pt);
            assert!(z1.norm() <= 1.0 && z2.norm() <= 1.0);
        }
    }
}

// gamma pairs

#[test]
fn symmetrized_commuting_contractions_are_gamma_contractions() {
    let mut rng = rng(5);
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let (t1, t2) = commuting_contractions(&mut rng, n);
        let pair = symmetrize_pair(&t1, &t2, &tol()).unwrap();
        assert!(check_gamma_contraction(&pair, &tol()).unwrap().is_member);
    }
}

#[test]
fn adjoint_closure_and_norm_bounds() {
    let t = tol();
    let mut rng = rng(6);
    for i in 0..60 {
        let n = rng.random_range(2..=4);
        let pair = if i % 2 == 0 {
            symmetrized_pair(&mut rng, n, &t).unwrap()
        } else {
            truncated_model_pair(&mut rng, 1 + i % 3, 2, &t).unwrap().1
        };
        assert!(check_gamma_contraction(&pair, &t).unwrap().is_member);
        assert!(check_gamma_contraction(&pair.adjoint(), &t).unwrap().is_member);
        assert!(op_norm(pair.s()) <= 2.0 + t.psd_tol && op_norm(pair.p()) <= 1.0 + t.psd_tol);
    }
}

#[test]
fn defect_identity_from_pencils() {
    let mut rng = rng(7);
    for _ in 0..50 {
        let n = rng.random_range(1..=5);
        let pair = symmetrized_pair(&mut rng, n, &tol()).unwrap();
        let lhs = (ComplexMatrix::identity(n, n) - pair.p().adjoint() * pair.p()) * c64(4.0, 0.0);
        let rhs = rho_pencil(&pair.scaled(-1.0)) + rho_pencil(&pair);
        assert!((lhs - rhs).norm() <= 1e-12);
    }
}

#[test]
fn strict_pairs_have_strict_p() {
    let mut rng = rng(8);
    for i in 0..30 {
        let r = [0.5, 0.8, 0.95][i % 3];
        let pair = strict_pair(&mut rng, 3, r, &tol()).unwrap();
        if strictness_constant(&pair, &tol()).unwrap() > 0.0 {
            assert!(op_norm(pair.p()) < 1.0);
        }
    }
}

#[test]
fn desymmetrize_round_trip() {
    let mut rng = rng(9);
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        let pair = symmetrized_pair(&mut rng, n, &tol()).unwrap();
        if let Ok((t1, t2)) = desymmetrize_pair(&pair, &tol()) {
            assert!((&t1 + &t2 - pair.s()).norm() <= 1e-8 && (&t1 * &t2 - pair.p()).norm() <= 1e-8);
            // the principal branch need not split into contractions
            if op_norm(&t1) <= 1.0 + 1e-9 && op_norm(&t2) <= 1.0 + 1e-9 {
                let loose = Tolerances {
                    residual_tol: 1e-6,
                    ..tol()
                };
                let back = symmetrize_pair(&t1, &t2, &loose).unwrap();
                assert!((back.s() - pair.s()).norm() <= 1e-8 && (back.p() - pair.p()).norm() <= 1e-8);
            }
        }
    }
}

// fundamental operator

#[test]
fn fundamental_operator_is_unique() {
    let mut rng = rng(10);
    for i in 0..100 {
        let n = rng.random_range(2..=4);
        let pair = if i % 2 == 0 {
            symmetrized_pair(&mut rng, n, &tol()).unwrap()
        } else {
            truncated_model_pair(&mut rng, 2, 2, &tol()).unwrap().1
        };
        let fo = solve_fundamental(&pair, &tol()).unwrap();
        let d = &fo.defect.d;
        let rhs = pair.s() - pair.s().adjoint() * pair.p();
        let residual = |f: &ComplexMatrix| op_norm(&(&rhs - d * fo.defect.embed(f) * d));
        let k = fo.rank();
        let x = ginibre(&mut rng, k, 1);
        let y = ginibre(&mut rng, k, 1);
        let rank_one = &x * y.adjoint();
        let perturbation = &rank_one * c64(1e-3 / op_norm(&rank_one), 0.0);
        assert!(residual(&(&fo.f + perturbation)) > residual(&fo.f));
    }
}

#[test]
fn fundamental_operator_unitary_covariance() {
    let mut rng = rng(11);
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        let pair = symmetrized_pair(&mut rng, n, &tol()).unwrap();
        let u = haar_unitary(&mut rng, n);
        let moved = pair.conjugated(&u);
        let (f, g) = (solve_fundamental(&pair, &tol()).unwrap(), solve_fundamental(&moved, &tol()).unwrap());
        for (a, b) in singular_values(&f.f).iter().zip(singular_values(&g.f)) {
            assert!((a - b).abs() <= 1e-9);
        }
        assert!((f.nr - g.nr).abs() <= 1e-9);
    }
}

#[test]
fn converse_models_are_gamma_contractions() {
    let mut rng = rng(12);
    for _ in 0..50 {
        let k = rng.random_range(1..=4);
        let n_blocks = rng.random_range(1..=6);
        let f_hat = matrix_with_nr(&mut rng, k, (0.1, 1.0), &tol()).unwrap();
        let pair = truncated_model_from_f(&f_hat, n_blocks, &tol()).unwrap();
        assert!(check_gamma_contraction(&pair, &tol()).unwrap().is_member);
    }
}

// varieties

#[test]
fn fibers_are_members() {
    let mut rng = rng(13);
    for _ in 0..100 {
        let n = rng.random_range(1..=5);
        let v = DeterminantalVariety::new(ginibre(&mut rng, n, n), &tol()).unwrap();
        let p = gaussian(&mut rng);
        for s in fiber_at_p(&v, p) {
            assert!(variety_membership(&v, &gamma_core::geometry::GammaPoint::new(s, p), &tol()));
        }
    }
}

#[test]
fn boundary_points_satisfy_automorphism_identity() {
    let mut rng = rng(14);
    for _ in 0..40 {
        let n = rng.random_range(1..=4);
        let a = matrix_with_nr(&mut rng, n, (0.2, 0.95), &tol()).unwrap();
        for k in 0..32 {
            let theta = std::f64::consts::TAU * k as f64 / 32.0;
            let half = Complex64::from_polar(1.0, theta / 2.0);
            let normal = &a * half.conj() + a.adjoint() * half;
            let eig = hermitian_eigen(&normal);
            for (j, &mu) in eig.values.iter().enumerate() {
                let v = eig.vectors.column(j);
                let alpha = (v.adjoint() * &a * v)[(0, 0)];
                assert!(alpha.norm() < 1.0);
                let pt = gamma_core::geometry::GammaPoint::new(half * mu, Complex64::from_polar(1.0, theta));
                let (z1, z2) = point_roots(&pt);
                for (x, y) in [(z1, z2), (z2, z1)] {
                    let lhs = (x - alpha) / (Complex64::new(1.0, 0.0) - alpha.conj() * x);
                    assert!((lhs + y).norm() <= 1e-8, "{lhs} {y}");
                }
            }
        }
    }
}

#[test]
fn boundary_sample_lies_in_distinguished_boundary() {
    let mut rng = rng(15);
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let v = DeterminantalVariety::new(matrix_with_nr(&mut rng, n, (0.1, 0.99), &tol()).unwrap(), &tol()).unwrap();
        let sample = boundary_sample(&v, 256);
        for b in &sample.points {
            assert!((b.point.p.norm() - 1.0).abs() <= 1e-15);
            assert!(classify_point(&b.point, &tol()).in_bgamma());
        }
        assert!(sample.delta() > 0.0);
    }
}

// von Neumann

#[test]
fn cup_identity_on_random_instances() {
    let mut rng = rng(16);
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let pair = symmetrized_pair(&mut rng, n, &tol()).unwrap();
        let f = matrix_polynomial(&mut rng, 2, 3);
        assert_eq!(cup_transform(&cup_transform(&f)), f);
        let lhs = evaluate_pair(&cup_transform(&f), &pair).unwrap();
        let rhs = evaluate_pair(&f, &pair.adjoint()).unwrap().adjoint();
        assert!((lhs - rhs).norm() <= 1e-10);
    }
}

#[test]
fn boundary_maximum_grows_along_nested_grids() {
    let mut rng = rng(17);
    for _ in 0..40 {
        let pair = symmetrized_pair(&mut rng, 3, &tol()).unwrap();
        let v = lambda_variety(&pair, &tol()).unwrap();
        let f = matrix_polynomial(&mut rng, 2, 3);
        let maxima: Vec<f64> = [256, 512, 1024, 2048].iter().map(|&m| boundary_max(&f, &v, m).0).collect();
        assert!(maxima.windows(2).all(|w| w[0] <= w[1]), "{maxima:?}");
    }
}

#[test]
fn lambda_variety_is_distinguished_when_radius_below_one() {
    let mut rng = rng(18);
    for _ in 0..40 {
        let pair = strict_pair(&mut rng, 3, 0.9, &tol()).unwrap();
        let v = lambda_variety(&pair, &tol()).unwrap();
        assert!(v.nr() < 1.0);
        let verdict = classify_distinguished(&v, &tol(), 128);
        assert_eq!(verdict.status, DistinguishedStatus::DistinguishedCertified);
    }
}

// model

#[test]
fn multiplier_norm_at_most_two() {
    let mut rng = rng(19);
    for _ in 0..50 {
        let k = rng.random_range(1..=4);
        let f = matrix_with_nr(&mut rng, k, (0.1, 1.0), &tol()).unwrap();
        assert!(multiplier_sup_norm(&f, 1024) <= 2.0 + 1e-9);
    }
}

#[test]
fn dilation_residual_within_tail_bound() {
    let mut rng = rng(20);
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let mut pair = symmetrized_pair(&mut rng, n, &tol()).unwrap();
        let rp = spectral_radius(pair.p());
        if rp > 0.8 {
            pair = pair.scaled((0.8 / rp).sqrt());
        }
        let model = build_model(&pair, 4, &tol()).unwrap();
        let report = dilation_check(&model, &pair, 3, 3).unwrap();
        assert!(report.tail <= 1e-8);
        assert!(report.passes(), "{report:?}");
        assert!(report.shift_residual <= report.tail + 1e-12);
        assert!(multiplier_sup_norm(&model.f_star, 512) <= 2.0 + 1e-9);
    }
}

#[test]
fn model_of_converse_pair_is_unitarily_equivalent() {
    // Procrustes: align an orthonormal basis of ran W with W itself and compare compressions
    let mut rng = rng(21);
    for _ in 0..20 {
        let k = rng.random_range(1..=3);
        let n_blocks = rng.random_range(2..=4);
        let (_, pair) = truncated_model_pair(&mut rng, k, n_blocks, &tol()).unwrap();
        let model = build_model(&pair, 1, &tol()).unwrap();
        assert_eq!(model.tail, 0.0);
        let svd = model.w.clone().svd(true, true);
        let rank = svd.singular_values.iter().filter(|&&x| x > 1e-8).count();
        assert_eq!(rank, pair.dim());
        let q = svd.u.unwrap().columns(0, rank).into_owned();
        let m = q.adjoint() * &model.w;
        let polar = m.clone().svd(true, true);
        let u = polar.u.unwrap() * polar.v_t.unwrap();
        assert!((&q * &u - &model.w).norm() <= 1e-7);
        let s_model = u.adjoint() * q.adjoint() * model.t.adjoint() * &q * &u;
        let p_model = u.adjoint() * q.adjoint() * model.v.adjoint() * &q * &u;
        assert!((s_model - pair.s().adjoint()).norm() <= 1e-7);
        assert!((p_model - pair.p().adjoint()).norm() <= 1e-7);
    }
}
