mod common;

use common::*;
use parsimony::densela::{cholesky, inverse, pinv_via_polar, Matrix};
use parsimony::partialmat::{evaluate, PartialMatrix, Pattern};
use parsimony::solver::{
    apply_completion, dempster_spd, dual_solve, entropy, multistart, newton, DempsterError, DualFailure, DualInit,
    DualParameters, NewtonFailure, Side, Solution, SolverConfig,
};
use proptest::prelude::*;
use rand::Rng;

fn cfg(starts: usize, seed: u64, range: Option<f64>) -> SolverConfig {
    SolverConfig {
        starts,
        seed,
        start_range: range,
        ..Default::default()
    }
}

#[test]
fn newton_from_near_the_third_completion() {
    let sol = newton(&example2(), &[1.1, 0.9, 1.05, 0.95], &SolverConfig::default()).unwrap();
    assert!(inf_dist(&sol.x, &[1.0; 4]) < 1e-9, "{:?}", sol.x);
    assert!(sol.grad_norm < 1e-10);
    assert!(sol.flags.symmetric && sol.flags.toeplitz && sol.flags.positive_definite);
}

#[test]
fn newton_from_zero_finds_the_dempster_point() {
    let sol = newton(&example1(), &[0.0], &SolverConfig::default()).unwrap();
    assert!((sol.x[0] - X_DEMPSTER).abs() < 1e-9);
}

#[test]
fn newton_fails_on_the_nonsolvable_pattern() {
    let pm = PartialMatrix::new(Pattern::untied(2, 2, vec![((0, 0), 1.0), ((1, 0), 3.0)]).unwrap());
    let mut r = rng(5);
    for _ in 0..50 {
        let x0 = [r.gen_range(-8.0..8.0), r.gen_range(-8.0..8.0)];
        assert!(newton(&pm, &x0, &SolverConfig::default()).is_err());
    }
}

#[test]
fn multistart_on_example1_has_one_solution() {
    let set = multistart(&example1(), &cfg(100, 3, None));
    assert_eq!(set.len(), 1);
    assert!((set.solutions[0].x[0] - X_DEMPSTER).abs() < 1e-9);
}

#[test]
fn multistart_on_fully_specified_input() {
    let s = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
    let set = multistart(&PartialMatrix::new(Pattern::from_matrix(&s)), &SolverConfig::default());
    assert_eq!(set.len(), 1);
    assert_eq!(set.solutions[0].sigma, s);
    let singular = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
    let set = multistart(&PartialMatrix::new(Pattern::from_matrix(&singular)), &SolverConfig::default());
    assert!(set.is_empty());
    assert_eq!(set.stats.failures.get(&NewtonFailure::SingularStart), Some(&1));
}

#[test]
fn multistart_is_independent_of_thread_count() {
    let c = cfg(200, 9, Some(10.0));
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| multistart(&example2(), &c))
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.stats, b.stats);
    assert_eq!(a.len(), b.len());
    for (p, q) in a.solutions.iter().zip(&b.solutions) {
        assert_eq!(p.x, q.x);
        assert_eq!(p.provenance, q.provenance);
    }
}

fn check_set_invariants(pm: &PartialMatrix, c: &SolverConfig) -> Result<(), TestCaseError> {
    let set = multistart(pm, c);
    prop_assert_eq!(set.stats.converged + set.stats.failures.values().sum::<usize>(), c.starts);
    prop_assert_eq!(set.stats.distinct, set.len());
    for w in set.solutions.windows(2) {
        prop_assert!(w[0].objective >= w[1].objective);
    }
    for (n, a) in set.solutions.iter().enumerate() {
        let scale = a.sigma.max_abs().max(1.0);
        prop_assert!(a.grad_norm * scale < c.grad_tol);
        for b in &set.solutions[n + 1..] {
            let norm = |v: &[f64]| v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            prop_assert!(inf_dist(&a.x, &b.x) > c.dedup_tol * norm(&a.x).max(norm(&b.x)));
        }
        if pm.pattern().is_untied() {
            prop_assert!(a.transposed_residual() < 1e-9, "{}", a.transposed_residual());
        }
        // recomputing at the reported x gives the reported numbers
        let again = Solution::at(pm, &a.x).unwrap();
        prop_assert!((again.grad_norm - a.grad_norm).abs() <= 1e-12);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multistart_invariants(seed in any::<u64>(), rect in any::<bool>(), tied in any::<bool>()) {
        let mut r = rng(seed);
        let (rows, cols) = if rect { (2, r.gen_range(3..=4)) } else { let n = r.gen_range(2..=4); (n, n) };
        let unknowns = r.gen_range(1..=3);
        let pm = PartialMatrix::new(random_pattern(&mut r, rows, cols, unknowns, tied));
        check_set_invariants(&pm, &cfg(30, seed, None))?;
    }

    #[test]
    fn dempster_is_a_pd_maximizer(seed in any::<u64>()) {
        // random SPD matrix with some symmetric off-diagonal pairs hidden
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let a = random_matrix(&mut r, n, n + 2);
        let full = a.gram_rows();
        let mut specified = Vec::new();
        let mut classes = Vec::new();
        for i in 0..n {
            specified.push(((i, i), full[(i, i)]));
            for j in i + 1..n {
                if r.gen_bool(0.4) {
                    classes.push(vec![(i, j), (j, i)]);
                } else {
                    specified.push(((i, j), full[(i, j)]));
                    specified.push(((j, i), full[(j, i)]));
                }
            }
        }
        let pm = PartialMatrix::new(Pattern::new(n, n, specified, classes.clone()).unwrap());
        let d = match dempster_spd(&pm, &SolverConfig::default()) {
            Err(DempsterError::NoPdStart) => return Err(TestCaseError::reject("no positive definite start drawn")),
            other => other.unwrap(),
        };
        let sol = &d.solution;
        prop_assert!(cholesky(&sol.sigma).is_ok());
        for class in &classes {
            let (i, j) = class[0];
            prop_assert!(sol.inv[(i, j)].abs() < 1e-9 * (1.0 + sol.inv.max_abs()));
        }
        prop_assert!(d.log_det_trace.windows(2).all(|w| w[1] >= w[0] - 1e-14 * (1.0 + w[0].abs())));
        // the hidden entries of the source matrix are feasible, so log det can only be larger
        let hidden: Vec<f64> = classes.iter().map(|c| full[c[0]]).collect();
        let feasible = evaluate(&pm, &hidden).unwrap().objective;
        prop_assert!(sol.objective >= feasible - 1e-9);
        let recomputed = 0.5 * sol.objective + 0.5 * n as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln());
        prop_assert!((d.entropy - recomputed).abs() < 1e-10);
    }

    #[test]
    fn dual_points_are_stationary(seed in any::<u64>(), rect in any::<bool>()) {
        let mut r = rng(seed);
        let (rows, cols) = if rect { (2, 3) } else { (3, 3) };
        let pm = PartialMatrix::new(random_pattern(&mut r, rows, cols, 2, false));
        if let Ok(sol) = dual_solve(&pm, &cfg(40, seed, None), DualInit::Auto) {
            prop_assert!(sol.grad_norm < 1e-10);
            prop_assert!(sol.transposed_residual() < 1e-9);
        }
    }
}

#[test]
fn dempster_on_the_worked_examples() {
    let d = dempster_spd(&example1(), &SolverConfig::default()).unwrap();
    assert!((d.solution.x[0] - X_DEMPSTER).abs() < 1e-9);
    assert!(d.solution.inv.max_abs_diff(&example1_inverse_dempster()) < 1e-8);
    let d = dempster_spd(&example2_symmetric(), &SolverConfig::default()).unwrap();
    assert!(inf_dist(&d.solution.x, &[1.0, 1.0]) < 1e-9, "{:?}", d.solution.x);
    assert!((d.entropy - entropy(&d.solution.sigma).unwrap()).abs() < 1e-12);
    assert_eq!(
        dempster_spd(&example2(), &SolverConfig::default()).unwrap_err(),
        DempsterError::PatternNotSymmetric
    );
}

#[test]
fn dual_solve_recovers_example2_completions() {
    let pm = example2();
    for (n, x) in example2_completions().iter().enumerate() {
        let sigma = evaluate(&pm, x).unwrap().sigma;
        let mut init = DualParameters::from_completion(&pm, &sigma).unwrap();
        for v in init.values.iter_mut() {
            *v *= 1.0 + 1e-3 * (n as f64 + 1.0);
        }
        let sol = dual_solve(&pm, &SolverConfig::default(), DualInit::Parameters(init)).unwrap();
        assert!(inf_dist(&sol.x, x) < 1e-8, "completion {n}: {:?}", sol.x);
    }
    assert_eq!(
        dual_solve(&example1(), &SolverConfig::default(), DualInit::Auto).unwrap_err(),
        DualFailure::TiedPattern
    );
}

#[test]
fn apply_completion_cases() {
    let sol = Solution::at(&example1(), &[X_DEMPSTER]).unwrap();
    let out = apply_completion(&sol, &Matrix::identity(4), Side::Left).unwrap();
    assert!(out.x.max_abs_diff(&example1_inverse_dempster()) < 1e-8);

    let id = PartialMatrix::new(Pattern::untied(3, 3, (0..3).map(|i| ((i, i), 1.0)).collect()).unwrap());
    let sol = Solution::at(&id, &[0.0; 6]).unwrap();
    let b = random_matrix(&mut rng(1), 3, 2);
    assert_eq!(apply_completion(&sol, &b, Side::Left).unwrap().x, b);
    assert_eq!(apply_completion(&sol, &b.transpose(), Side::Right).unwrap().x, b.transpose());
    assert_eq!(apply_completion(&sol, &b, Side::Left).unwrap().exploited_zeros, 6);

    // first seeded 2x3 instance that has a completion
    let (pm, set) = (0..)
        .map(|s| {
            let pm = PartialMatrix::new(random_pattern(&mut rng(s), 2, 3, 2, false));
            let set = multistart(&pm, &cfg(50, s, None));
            (pm, set)
        })
        .find(|(_, set)| !set.is_empty())
        .unwrap();
    assert_eq!(pm.k(), 2);
    let sol = &set.solutions[0];
    let b = random_matrix(&mut rng(3), 4, 3);
    let oracle = &b * &pinv_via_polar(&sol.sigma).unwrap();
    assert!(apply_completion(sol, &b, Side::Right).unwrap().x.max_abs_diff(&oracle) < 1e-10);
    assert!(apply_completion(sol, &b, Side::Left).is_err());
    assert!(apply_completion(sol, &Matrix::identity(2), Side::Right).is_err());
    assert!(inverse(&sol.sigma).is_err());
}

#[test]
fn config_validation() {
    assert!(SolverConfig::default().validate().is_ok());
    assert!(cfg(0, 0, None).validate().is_err());
    assert!(cfg(1, 0, Some(f64::NAN)).validate().is_err());
}
