mod common;

use common::{cofactor_det, random_matrix, rng};
use parsimony::densela::{
    cholesky, det, inverse, lu_factor, pinv_frr, pinv_via_polar, polar, solve, sqrt_psd, sym_eig, LinalgError, Matrix,
};
use parsimony::oracle::mp_axiom_check;
use proptest::prelude::*;

fn well_conditioned(n: usize, seed: u64) -> Matrix {
    // diagonal shift keeps the random matrix away from singularity
    let m = random_matrix(&mut rng(seed), n, n);
    Matrix::from_fn(n, n, |i, j| m[(i, j)] + if i == j { n as f64 } else { 0.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_matches_cofactor_expansion(n in 1usize..=6, seed in any::<u64>()) {
        let m = random_matrix(&mut rng(seed), n, n);
        let lu = det(&m).unwrap();
        let oracle = cofactor_det(&m);
        prop_assert!((lu - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()), "{lu} vs {oracle}");
    }

    #[test]
    fn lu_reconstructs(n in 1usize..=6, seed in any::<u64>()) {
        let a = well_conditioned(n, seed);
        let f = lu_factor(&a).unwrap();
        let pa = Matrix::from_fn(n, n, |i, j| a[(f.permutation()[i], j)]);
        prop_assert!((&f.l() * &f.u()).max_abs_diff(&pa) < 1e-12 * a.max_abs());
    }

    #[test]
    fn inverse_and_solve(n in 1usize..=6, seed in any::<u64>()) {
        let a = well_conditioned(n, seed);
        let inv = inverse(&a).unwrap();
        prop_assert!((&a * &inv).max_abs_diff(&Matrix::identity(n)) < 1e-12);
        let b = random_matrix(&mut rng(seed ^ 1), n, 2);
        let x = solve(&a, &b).unwrap();
        prop_assert!((&a * &x).max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn eigen_decomposition_reconstructs(n in 1usize..=6, seed in any::<u64>()) {
        let m = random_matrix(&mut rng(seed), n, n).symmetrized();
        let e = sym_eig(&m).unwrap();
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let v = &e.eigenvectors;
        let back = &(v * &Matrix::from_diag(&e.eigenvalues)) * &v.transpose();
        prop_assert!(back.max_abs_diff(&m) < 1e-12);
        prop_assert!((&v.transpose() * v).max_abs_diff(&Matrix::identity(n)) < 1e-12);
    }

    #[test]
    fn psd_square_root(n in 1usize..=6, seed in any::<u64>()) {
        let a = random_matrix(&mut rng(seed), n, n + 2);
        let s = a.gram_rows();
        let r = sqrt_psd(&s).unwrap();
        prop_assert!(r.max_abs_diff(&r.transpose()) < 1e-14 * (1.0 + r.max_abs()));
        prop_assert!((&r * &r).max_abs_diff(&s) < 1e-10 * (1.0 + s.max_abs()));
    }

    #[test]
    fn polar_and_pseudoinverse(n in 1usize..=6, extra in 0usize..=2, seed in any::<u64>()) {
        let p = (n + extra).min(8);
        let sigma = random_matrix(&mut rng(seed), n, p);
        let f = match polar(&sigma) {
            Ok(f) => f,
            Err(LinalgError::RankDeficient { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!((&f.p * &f.u).max_abs_diff(&sigma) < 1e-9);
        prop_assert!((&f.u * &f.u.transpose()).max_abs_diff(&Matrix::identity(n)) < 1e-9);
        prop_assert!(f.p.max_abs_diff(&f.p.transpose()) < 1e-12);
        prop_assert!(cholesky(&f.p).is_ok());
        let a = pinv_frr(&sigma).unwrap();
        let b = pinv_via_polar(&sigma).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-8 * (1.0 + a.max_abs()));
        prop_assert!(mp_axiom_check(&sigma, &a).unwrap() < 1e-10 * (1.0 + a.max_abs()).powi(2));
    }
}

#[test]
fn singular_matrices_are_reported() {
    let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
    assert_eq!(det(&m).unwrap(), 0.0);
    assert!(matches!(inverse(&m), Err(LinalgError::Singular { .. })));
    assert!(lu_factor(&m).unwrap().log_abs_det().is_none());
    let wide = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
    assert!(matches!(pinv_frr(&wide), Err(LinalgError::Singular { .. }) | Err(LinalgError::RankDeficient { .. })));
    assert!(matches!(polar(&wide), Err(LinalgError::RankDeficient { .. })));
}

#[test]
fn square_polar_determinant() {
    let sigma = well_conditioned(5, 11);
    let f = polar(&sigma).unwrap();
    assert!((f.log_det_p() - det(&sigma).unwrap().abs().ln()).abs() < 1e-12);
    assert!((pinv_frr(&sigma).unwrap()).max_abs_diff(&inverse(&sigma).unwrap()) < 1e-12);
}

#[test]
fn rejects_bad_shapes() {
    assert!(matches!(det(&Matrix::zeros(2, 3)), Err(LinalgError::Dimension(_))));
    assert!(matches!(polar(&random_matrix(&mut rng(3), 3, 2)), Err(LinalgError::Dimension(_))));
    assert!(Matrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
    assert!(Matrix::identity(2).matmul(&Matrix::zeros(3, 1)).is_err());
}
