//! Cumulative prospect theory evaluation of finite lotteries.

use crate::error::{domain, invalid, Result};
use crate::scalar::Scalar;

const GRID_POINTS: usize = 1001;

/// Probability weighting function `w: [0,1] → [0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightingFunction<T> {
    Linear,
    /// Breakpoints `(p_k, w_k)` from `(0,0)` to `(1,1)`, interpolated linearly.
    PiecewiseLinear(Vec<(T, T)>),
    /// `w(p) = exp(-(-ln p)^alpha)`.
    Prelec(T),
}

impl<T: Scalar> WeightingFunction<T> {
    pub fn piecewise(points: Vec<(T, T)>) -> Result<Self> {
        let w = WeightingFunction::PiecewiseLinear(points);
        w.validate()?;
        Ok(w)
    }

    pub fn prelec(alpha: T) -> Result<Self> {
        let w = WeightingFunction::Prelec(alpha);
        w.validate()?;
        Ok(w)
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, WeightingFunction::Linear)
    }

    /// Checks endpoints, breakpoint ordering and strict increase on a fixed grid.
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightingFunction::Linear => {}
            WeightingFunction::Prelec(a) => {
                if !(a.is_finite() && *a > T::zero()) {
                    return Err(invalid(format!(
                        "prelec exponent must be positive, got {a}"
                    )));
                }
            }
            WeightingFunction::PiecewiseLinear(pts) => {
                if pts.len() < 2 {
                    return Err(invalid("piecewise weighting needs at least two points"));
                }
                let (p0, w0) = pts[0];
                let (pn, wn) = pts[pts.len() - 1];
                if p0 != T::zero() || w0 != T::zero() || pn != T::one() || wn != T::one() {
                    return Err(invalid("piecewise weighting must run from (0,0) to (1,1)"));
                }
                for k in 1..pts.len() {
                    if !(pts[k].0 > pts[k - 1].0 && pts[k].1 > pts[k - 1].1) {
                        return Err(invalid(format!(
                            "piecewise breakpoints not strictly increasing at index {k}"
                        )));
                    }
                }
            }
        }
        let mut prev = self.eval_unchecked(T::zero());
        for k in 1..GRID_POINTS {
            let p = T::lit(k as f64) / T::lit((GRID_POINTS - 1) as f64);
            let cur = self.eval_unchecked(p);
            if !(cur > prev) {
                return Err(invalid(format!(
                    "weighting function not strictly increasing near p={p}"
                )));
            }
            prev = cur;
        }
        Ok(())
    }

    pub fn eval(&self, p: T) -> Result<T> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(domain(format!("probability {p} outside [0,1]")));
        }
        Ok(self.eval_unchecked(p))
    }

    /// Evaluates after clamping `p` into `[0,1]`.
    pub fn eval_unchecked(&self, p: T) -> T {
        let p = p.max(T::zero()).min(T::one());
        if p == T::zero() {
            return T::zero();
        }
        if p == T::one() {
            return T::one();
        }
        match self {
            WeightingFunction::Linear => p,
            WeightingFunction::Prelec(a) => (-(-p.ln()).powf(*a)).exp(),
            WeightingFunction::PiecewiseLinear(pts) => {
                // first breakpoint with p_k >= p
                let k = pts.partition_point(|&(pk, _)| pk < p);
                let (p1, w1) = pts[k];
                if p1 == p {
                    return w1;
                }
                let (p0, w0) = pts[k - 1];
                w0 + (w1 - w0) * (p - p0) / (p1 - p0)
            }
        }
    }

    /// Interior kink locations, or `None` when the function is not piecewise linear.
    pub fn kinks(&self) -> Option<Vec<T>> {
        match self {
            WeightingFunction::Linear => Some(Vec::new()),
            WeightingFunction::PiecewiseLinear(pts) => {
                Some(pts[1..pts.len() - 1].iter().map(|&(p, _)| p).collect())
            }
            WeightingFunction::Prelec(_) => None,
        }
    }
}

/// Value table over one player's outcome indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueFunction<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> ValueFunction<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("value for outcome {k} is not finite")));
        }
        Ok(ValueFunction { values })
    }

    #[inline]
    pub fn get(&self, outcome: usize) -> T {
        self.values[outcome]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Preference content of one player type.
#[derive(Clone, Debug, PartialEq)]
pub struct CptType<T> {
    pub label: String,
    pub value_fn: ValueFunction<T>,
    pub weight_gain: WeightingFunction<T>,
    pub weight_loss: WeightingFunction<T>,
}

impl<T: Scalar> CptType<T> {
    pub fn new(
        label: impl Into<String>,
        values: Vec<T>,
        weight_gain: WeightingFunction<T>,
        weight_loss: WeightingFunction<T>,
    ) -> Result<Self> {
        weight_gain.validate()?;
        weight_loss.validate()?;
        Ok(CptType {
            label: label.into(),
            value_fn: ValueFunction::new(values)?,
            weight_gain,
            weight_loss,
        })
    }

    /// Expected-utility type: linear weights on both sides.
    pub fn eut(label: impl Into<String>, values: Vec<T>) -> Result<Self> {
        Self::new(
            label,
            values,
            WeightingFunction::Linear,
            WeightingFunction::Linear,
        )
    }

    pub fn is_eut(&self) -> bool {
        self.weight_gain.is_linear() && self.weight_loss.is_linear()
    }
}

/// Finite lottery; entries may repeat outcomes or carry zero probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Lottery<T> {
    pub entries: Vec<(T, usize)>,
}

impl<T: Scalar> Lottery<T> {
    pub fn new(entries: Vec<(T, usize)>) -> Result<Self> {
        let tol = T::tol(1e-9);
        let mut total = T::zero();
        for (k, &(p, _)) in entries.iter().enumerate() {
            if !p.is_finite() || p < T::zero() {
                return Err(invalid(format!("lottery entry {k} has probability {p}")));
            }
            total = total + p;
        }
        if entries.is_empty() || (total - T::one()).abs() > tol {
            return Err(invalid(format!("lottery probabilities sum to {total}")));
        }
        Ok(Lottery { entries })
    }

    pub fn degenerate(outcome: usize) -> Self {
        Lottery {
            entries: vec![(T::one(), outcome)],
        }
    }

    /// Lottery with one entry per outcome from a dense probability vector.
    pub fn from_dense(p: &[T]) -> Self {
        Lottery {
            entries: p.iter().enumerate().map(|(k, &x)| (x, k)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionWeights<T> {
    /// Weights of the gain positions in rank order.
    pub pi_plus: Vec<T>,
    /// Weights of the loss positions, aligned with `order[gain_count..]`.
    pub pi_minus: Vec<T>,
    /// Entry indices sorted by value descending, ties by ascending index.
    pub order: Vec<usize>,
    pub gain_count: usize,
}

fn rank<T: Scalar>(lottery: &Lottery<T>, v: &ValueFunction<T>) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = (0..lottery.entries.len()).collect();
    order.sort_by(|&a, &b| {
        let va = v.get(lottery.entries[a].1);
        let vb = v.get(lottery.entries[b].1);
        vb.partial_cmp(&va).unwrap().then(a.cmp(&b))
    });
    let gains = order
        .iter()
        .take_while(|&&j| v.get(lottery.entries[j].1) >= T::zero())
        .count();
    (order, gains)
}

/// Rank positions of the first and last entries with positive probability.
/// A tail reaching past either one holds all the mass, so it is taken as exactly
/// one; summing rounded entries can land a few ulps short, which steep
/// weightings near one amplify.
fn mass_span<T: Scalar>(lottery: &Lottery<T>, order: &[usize]) -> (usize, usize) {
    let pos = |&j: &usize| lottery.entries[j].0 > T::zero();
    let first = order.iter().position(pos).unwrap_or(0);
    let last = order.iter().rposition(pos).unwrap_or(order.len());
    (first, last)
}

fn tail<T: Scalar>(cum: T, whole: bool) -> T {
    if whole {
        T::one()
    } else {
        cum
    }
}

pub fn decision_weights<T: Scalar>(lottery: &Lottery<T>, ty: &CptType<T>) -> DecisionWeights<T> {
    let (order, gain_count) = rank(lottery, &ty.value_fn);
    let mut pi_plus = Vec::with_capacity(gain_count);
    let mut cum = T::zero();
    let mut prev = T::zero();
    let (first, last) = mass_span(lottery, &order);
    for (r, &j) in order[..gain_count].iter().enumerate() {
        cum = cum + lottery.entries[j].0;
        let w = ty.weight_gain.eval_unchecked(tail(cum, r >= last));
        pi_plus.push(w - prev);
        prev = w;
    }
    let losses = &order[gain_count..];
    let mut pi_minus = vec![T::zero(); losses.len()];
    cum = T::zero();
    prev = T::zero();
    for (k, &j) in losses.iter().enumerate().rev() {
        cum = cum + lottery.entries[j].0;
        let w = ty
            .weight_loss
            .eval_unchecked(tail(cum, gain_count + k <= first));
        pi_minus[k] = w - prev;
        prev = w;
    }
    DecisionWeights {
        pi_plus,
        pi_minus,
        order,
        gain_count,
    }
}

/// CPT value as a decision-weighted sum.
pub fn cpt_value<T: Scalar>(lottery: &Lottery<T>, ty: &CptType<T>) -> T {
    let dw = decision_weights(lottery, ty);
    let value = |j: usize| ty.value_fn.get(lottery.entries[j].1);
    let gains: T = dw.order[..dw.gain_count]
        .iter()
        .zip(&dw.pi_plus)
        .map(|(&j, &pi)| pi * value(j))
        .sum();
    let losses: T = dw.order[dw.gain_count..]
        .iter()
        .zip(&dw.pi_minus)
        .map(|(&j, &pi)| pi * value(j))
        .sum();
    gains + losses
}

/// CPT value in telescoped form: value decrements times weighted tail probabilities.
pub fn cpt_value_cumulative<T: Scalar>(lottery: &Lottery<T>, ty: &CptType<T>) -> T {
    let (order, gain_count) = rank(lottery, &ty.value_fn);
    let value = |j: usize| ty.value_fn.get(lottery.entries[j].1);
    let prob = |j: usize| lottery.entries[j].0;
    let (first, last) = mass_span(lottery, &order);
    let mut total = T::zero();
    let mut cum = T::zero();
    for r in 0..gain_count {
        cum = cum + prob(order[r]);
        let next = if r + 1 < gain_count {
            value(order[r + 1])
        } else {
            T::zero()
        };
        total =
            total + (value(order[r]) - next) * ty.weight_gain.eval_unchecked(tail(cum, r >= last));
    }
    cum = T::zero();
    for r in (gain_count..order.len()).rev() {
        cum = cum + prob(order[r]);
        let prev = if r > gain_count {
            value(order[r - 1])
        } else {
            T::zero()
        };
        total =
            total + (value(order[r]) - prev) * ty.weight_loss.eval_unchecked(tail(cum, r <= first));
    }
    total
}

pub fn expected_utility<T: Scalar>(lottery: &Lottery<T>, v: &ValueFunction<T>) -> T {
    lottery.entries.iter().map(|&(p, o)| p * v.get(o)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains_pl() -> WeightingFunction<f64> {
        WeightingFunction::piecewise(vec![
            (0.0, 0.0),
            (7.0 / 32.0, 0.25),
            (25.0 / 32.0, 0.625),
            (1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn prelec_half() {
        let w = WeightingFunction::prelec(0.5f64).unwrap();
        assert!((w.eval(0.5).unwrap() - 0.4349).abs() < 5e-5);
        assert_eq!(w.eval(0.0).unwrap(), 0.0);
        assert_eq!(w.eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn piecewise_exact_at_breakpoint() {
        let w = gains_pl();
        assert_eq!(w.eval(7.0 / 32.0).unwrap(), 0.25);
        // midpoint of the first segment
        assert!((w.eval(7.0 / 64.0).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn linear_identity_and_domain() {
        let w: WeightingFunction<f64> = WeightingFunction::Linear;
        assert_eq!(w.eval(0.37).unwrap(), 0.37);
        assert!(w.eval(1.2).is_err());
        assert!(w.eval(-0.1).is_err());
    }

    #[test]
    fn rejects_bad_weighting() {
        assert!(WeightingFunction::<f64>::prelec(0.0).is_err());
        assert!(WeightingFunction::<f64>::piecewise(vec![
            (0.0, 0.0),
            (0.5, 0.5),
            (0.4, 0.7),
            (1.0, 1.0)
        ])
        .is_err());
        assert!(
            WeightingFunction::<f64>::piecewise(vec![(0.0, 0.0), (0.5, 0.6), (1.0, 0.9)]).is_err()
        );
    }

    #[test]
    fn degenerate_weights() {
        let ty = CptType::eut("t", vec![5.0f64]).unwrap();
        let dw = decision_weights(&Lottery::degenerate(0), &ty);
        assert_eq!(dw.pi_plus, vec![1.0]);
        assert!(dw.pi_minus.is_empty());
        assert_eq!(dw.gain_count, 1);
    }

    #[test]
    fn two_outcome_prelec_weights() {
        let w = WeightingFunction::prelec(0.5).unwrap();
        let ty = CptType::new("t", vec![3.0f64, 1.0], w.clone(), w).unwrap();
        let lot = Lottery::new(vec![(0.5, 1), (0.5, 0)]).unwrap();
        let dw = decision_weights(&lot, &ty);
        assert_eq!(dw.order, vec![1, 0]);
        let w5 = (-(0.5f64.ln().abs()).sqrt()).exp();
        assert!((dw.pi_plus[0] - w5).abs() < 1e-15);
        assert!((dw.pi_plus[1] - (1.0 - w5)).abs() < 1e-15);
    }

    #[test]
    fn mixed_sign_matches_hand_value() {
        // values 10, -5 with probabilities 0.3/0.7, piecewise weights
        let w = gains_pl();
        let ty = CptType::new("t", vec![10.0f64, -5.0], w.clone(), w.clone()).unwrap();
        let lot = Lottery::new(vec![(0.3, 0), (0.7, 1)]).unwrap();
        let hand = 10.0 * w.eval(0.3).unwrap() - 5.0 * w.eval(0.7).unwrap();
        assert!((cpt_value(&lot, &ty) - hand).abs() < 1e-12);
        assert!((cpt_value_cumulative(&lot, &ty) - hand).abs() < 1e-12);
    }

    #[test]
    fn expected_utility_mean() {
        let v = ValueFunction::new(vec![4.0f64, 2.0]).unwrap();
        let lot = Lottery::new(vec![(0.5, 0), (0.5, 1)]).unwrap();
        assert_eq!(expected_utility(&lot, &v), 3.0);
    }

    #[test]
    fn lottery_validation() {
        assert!(Lottery::new(vec![(0.5f64, 0), (0.4, 1)]).is_err());
        assert!(Lottery::new(vec![(1.1f64, 0), (-0.1, 1)]).is_err());
        assert!(Lottery::new(vec![(0.0f64, 0), (1.0, 1)]).is_ok());
    }

    #[test]
    fn works_in_f32() {
        let w = WeightingFunction::<f32>::prelec(0.5).unwrap();
        assert!((w.eval(0.5).unwrap() - 0.4349).abs() < 1e-4);
    }
}
