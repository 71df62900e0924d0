//! Exact maximization of piecewise-linear functions of one variable.

use crate::cpt::{CptType, ValueFunction};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMax<T> {
    /// All candidate points attaining the maximum (within `1e-9`), ascending.
    pub argmax: Vec<T>,
    pub value: T,
}

/// Maximizes `f` on `[lo, hi]` given every point where `f` may change slope.
///
/// The maximum of a piecewise-linear function sits at an endpoint or breakpoint,
/// so evaluating those is exact.
pub fn maximize_piecewise_1d<T: Scalar, F: Fn(T) -> T>(
    f: F,
    breakpoints: &[T],
    lo: T,
    hi: T,
) -> Result<PiecewiseMax<T>> {
    if !(lo <= hi) {
        return Err(invalid(format!("empty interval [{lo}, {hi}]")));
    }
    let mut xs: Vec<T> = vec![lo, hi];
    xs.extend(breakpoints.iter().copied().filter(|&x| x > lo && x < hi));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let vals: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    let value = vals.iter().copied().fold(T::neg_infinity(), T::max);
    let tol = T::tol(1e-9);
    let argmax = xs
        .iter()
        .zip(&vals)
        .filter(|(_, &v)| v >= value - tol)
        .map(|(&x, _)| x)
        .collect();
    Ok(PiecewiseMax { argmax, value })
}

/// Solutions in `[lo, hi]` of `c0 + c1 x = k` for each kink `k`.
pub fn affine_crossings<T: Scalar>(c0: T, c1: T, kinks: &[T], lo: T, hi: T) -> Vec<T> {
    if c1 == T::zero() {
        return Vec::new();
    }
    kinks
        .iter()
        .map(|&k| (k - c0) / c1)
        .filter(|&x| x >= lo && x <= hi)
        .collect()
}

/// Breakpoints in `[0,1]` of `x ↦ V((1-x) p0 + x p1)` for dense outcome vectors.
///
/// Ranks depend only on values, so every cumulative probability is affine in `x`
/// and the value has kinks only where one of them crosses a weighting kink.
pub fn segment_breakpoints<T: Scalar>(p0: &[T], p1: &[T], ty: &CptType<T>) -> Result<Vec<T>> {
    if p0.len() != ty.value_fn.len() || p1.len() != ty.value_fn.len() {
        return Err(Error::Dimension(
            "segment endpoints must cover the outcome set".into(),
        ));
    }
    let kinks_gain = ty
        .weight_gain
        .kinks()
        .ok_or_else(|| Error::Unsupported("gain weighting is not piecewise linear".into()))?;
    let kinks_loss = ty
        .weight_loss
        .kinks()
        .ok_or_else(|| Error::Unsupported("loss weighting is not piecewise linear".into()))?;
    let order = value_order(&ty.value_fn);
    let gains = order
        .iter()
        .filter(|&&o| ty.value_fn.get(o) >= T::zero())
        .count();
    let mut out = Vec::new();
    let (mut c0, mut c1) = (T::zero(), T::zero());
    for &o in &order[..gains] {
        c0 = c0 + p0[o];
        c1 = c1 + (p1[o] - p0[o]);
        out.extend(affine_crossings(c0, c1, &kinks_gain, T::zero(), T::one()));
    }
    let (mut c0, mut c1) = (T::zero(), T::zero());
    for &o in order[gains..].iter().rev() {
        c0 = c0 + p0[o];
        c1 = c1 + (p1[o] - p0[o]);
        out.extend(affine_crossings(c0, c1, &kinks_loss, T::zero(), T::one()));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    Ok(out)
}

fn value_order<T: Scalar>(v: &ValueFunction<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v.get(b).partial_cmp(&v.get(a)).unwrap().then(a.cmp(&b)));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_function() {
        let f = |x: f64| 1.0 - (x - 0.3).abs();
        let m = maximize_piecewise_1d(f, &[0.3], 0.0, 1.0).unwrap();
        assert_eq!(m.argmax, vec![0.3]);
        assert!((m.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ties_at_both_ends() {
        let f = |x: f64| (x - 0.5).abs();
        let m = maximize_piecewise_1d(f, &[0.5], 0.0, 1.0).unwrap();
        assert_eq!(m.argmax, vec![0.0, 1.0]);
    }

    #[test]
    fn empty_interval_errors() {
        assert!(maximize_piecewise_1d(|x: f64| x, &[], 1.0, 0.0).is_err());
    }

    #[test]
    fn crossings() {
        let xs = affine_crossings(0.5f64, -0.25, &[0.25, 0.4, 0.9], 0.0, 1.0);
        assert_eq!(xs.len(), 2);
        assert!((xs[0] - 1.0).abs() < 1e-15 && (xs[1] - 0.4).abs() < 1e-15);
    }
}
