//! Heuristic grid search over a probability simplex.

use crate::scalar::Scalar;

/// All points of the simplex in `R^k` whose coordinates are multiples of `1/resolution`.
/// A resolution of zero is treated as one.
pub fn simplex_grid<T: Scalar>(k: usize, resolution: usize) -> Vec<Vec<T>> {
    let resolution = resolution.max(1);
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    compositions(k, resolution, 0, &mut counts, &mut out);
    let r = T::lit(resolution as f64);
    out.into_iter()
        .map(|c| c.into_iter().map(|x| T::lit(x as f64) / r).collect())
        .collect()
}

fn compositions(
    k: usize,
    left: usize,
    pos: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if k == 0 {
        return;
    }
    if pos == k - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for x in (0..=left).rev() {
        cur[pos] = x;
        compositions(k, left - x, pos + 1, cur, out);
    }
}

/// Number of grid points `simplex_grid(k, resolution)` would produce.
pub fn simplex_grid_len(k: usize, resolution: usize) -> u128 {
    if k == 0 {
        return 0;
    }
    let resolution = resolution.max(1);
    // C(resolution + k - 1, k - 1)
    let (n, r) = ((resolution + k - 1) as u128, (k - 1) as u128);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Best point of a simplex grid, then `rounds` of local pairwise mass transfers
/// with halving step. A lower bound on the true maximum, not a certificate.
pub fn grid_refine_max<T: Scalar, F: Fn(&[T]) -> T>(
    objective: F,
    k: usize,
    resolution: usize,
    rounds: usize,
) -> (Vec<T>, T) {
    let mut best: Vec<T> = Vec::new();
    let mut best_val = T::neg_infinity();
    for p in simplex_grid::<T>(k, resolution.max(1)) {
        let v = objective(&p);
        if v > best_val {
            best_val = v;
            best = p;
        }
    }
    let mut step = T::one() / T::lit(resolution.max(1) as f64);
    for _ in 0..rounds {
        step = step / T::lit(2.0);
        let mut improved = true;
        while improved {
            improved = false;
            for from in 0..k {
                for to in 0..k {
                    if from == to || best[from] <= T::zero() {
                        continue;
                    }
                    let delta = step.min(best[from]);
                    let mut cand = best.clone();
                    cand[from] = cand[from] - delta;
                    cand[to] = cand[to] + delta;
                    let v = objective(&cand);
                    if v > best_val {
                        best_val = v;
                        best = cand;
                        improved = true;
                    }
                }
            }
        }
    }
    (best, best_val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_matches_formula() {
        for k in 1..5 {
            for r in 1..6 {
                assert_eq!(
                    simplex_grid::<f64>(k, r).len() as u128,
                    simplex_grid_len(k, r)
                );
            }
        }
    }

    #[test]
    fn linear_objective_hits_vertex() {
        let (p, v) = grid_refine_max(|x: &[f64]| 3.0 * x[0] + 5.0 * x[1] + 1.0 * x[2], 3, 4, 3);
        assert_eq!(p, vec![0.0, 1.0, 0.0]);
        assert_eq!(v, 5.0);
    }

    #[test]
    fn constant_objective() {
        let (_, v) = grid_refine_max(|_: &[f64]| 2.5, 4, 3, 2);
        assert_eq!(v, 2.5);
    }

    #[test]
    fn refinement_improves_off_grid_peak() {
        let f = |x: &[f64]| -(x[0] - 0.3).abs();
        let (_, coarse) = grid_refine_max(f, 2, 2, 0);
        let (p, fine) = grid_refine_max(f, 2, 2, 8);
        assert!(fine >= coarse);
        assert!((p[0] - 0.3).abs() < 1e-2);
    }
}
