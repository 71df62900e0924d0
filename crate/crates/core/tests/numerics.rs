mod common;

use cpt_mechlab::catalog;
use cpt_mechlab::cpt::{cpt_value, Lottery};
use cpt_mechlab::numerics::{
    grid_refine_max, lp_feasible, maximize_piecewise_1d, segment_breakpoints, simplex_grid,
    simplex_grid_len, LinearFeasibilityProblem, LpOutcome,
};
use rand::Rng;

#[test]
fn lp_finds_points_of_feasible_systems() {
    for seed in 0..100 {
        let mut rng = common::rng(seed);
        let (rows, vars) = (rng.gen_range(1..5), rng.gen_range(1..7));
        let x: Vec<f64> = (0..vars)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    0.0
                } else {
                    rng.gen_range(0.0..2.0)
                }
            })
            .collect();
        let a: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..vars).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let b = a
            .iter()
            .map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum())
            .collect();
        let p = LinearFeasibilityProblem::new(a, b).unwrap();
        match lp_feasible(&p).unwrap() {
            LpOutcome::Feasible(y) => {
                assert!(y.iter().all(|&v| v >= -1e-12));
                assert!(p.residual(&y) <= 1e-9);
            }
            other => panic!("seed {seed}: {}", other.describe()),
        }
    }
}

#[test]
fn lp_rejects_contradictions() {
    // x + y = 1 and x + y = 2
    let p = LinearFeasibilityProblem::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0])
        .unwrap();
    assert!(lp_feasible(&p).unwrap().is_infeasible());
    // x = -1 with x >= 0
    let p = LinearFeasibilityProblem::new(vec![vec![1.0]], vec![-1.0]).unwrap();
    assert!(lp_feasible(&p).unwrap().is_infeasible());
}

#[test]
fn piecewise_maximum_beats_a_fine_grid() {
    for seed in 0..50 {
        let mut rng = common::rng(500 + seed);
        let env = common::random_env(&mut rng, [1, 1], 2, 4, false);
        let ty = env.cpt_type(0, 0);
        let p0 = common::sparse_simplex(&mut rng, 4);
        let p1 = common::sparse_simplex(&mut rng, 4);
        let f = |x: f64| {
            let p: Vec<f64> = p0
                .iter()
                .zip(&p1)
                .map(|(a, b)| (1.0 - x) * a + x * b)
                .collect();
            cpt_value(&Lottery::from_dense(&p), ty)
        };
        let bp = segment_breakpoints(&p0, &p1, ty).unwrap();
        let m = maximize_piecewise_1d(f, &bp, 0.0, 1.0).unwrap();
        let grid = (0..=10_000)
            .map(|k| f(k as f64 / 10_000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(m.value >= grid - 1e-9, "seed {seed}: {} < {grid}", m.value);
        for &x in &m.argmax {
            assert!((f(x) - m.value).abs() <= 1e-9);
        }
    }
}

#[test]
fn grid_search_finds_the_mixture_optimum() {
    let ex = catalog::three_type_market::<f64>();
    let uf = ex.env.cpt_type(0, 1);
    // mixing "MF" and "SF" reports against the market lottery family
    let lot = |w: &[f64]| {
        let (x, y) = (w[0], w[1]);
        vec![0.5 * y, 0.5 * x, 0.0, 0.5 * x, 0.5 * y]
    };
    let (best, value) = grid_refine_max(
        |w: &[f64]| cpt_value(&Lottery::from_dense(&lot(w)), uf),
        2,
        20,
        12,
    );
    assert!((value - -66.25).abs() <= 1e-3, "{value}");
    assert!((best[1] - 0.5).abs() <= 1e-3);
}

#[test]
fn simplex_grid_has_the_expected_size() {
    for k in 1..5 {
        for r in 0..6 {
            let g = simplex_grid::<f64>(k, r);
            assert_eq!(g.len() as u128, simplex_grid_len(k, r));
            assert!(g
                .iter()
                .all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
        }
    }
}
