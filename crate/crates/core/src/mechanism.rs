//! Non-mediated mechanisms, strategies and their equilibrium checks.

use crate::dist::{check_dist, point_mass, uniform, ProfileSpace};
use crate::environment::{Environment, Prior};
use crate::error::{dimension, Result};
use crate::mediated::{
    alloc_lottery, check_belief_dominant_mediated, check_compat, induced_acf_mediated,
    is_bayes_nash_mediated, is_dominant_mediated, InducedAcf, MediatedForm, MediatedStrategy,
    OppView,
};
use crate::numerics::grid::{simplex_grid, simplex_grid_len};
use crate::report::EquilibriumReport;
use crate::scalar::{Scalar, Tolerances};

/// Signal sets and a randomized allocation rule over signal profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Mechanism<T> {
    pub signal_sets: Vec<Vec<String>>,
    /// Allocation distribution per signal profile.
    pub h0: Vec<Vec<T>>,
    space: ProfileSpace,
}

impl<T: Scalar> Mechanism<T> {
    pub fn new(signal_sets: Vec<Vec<String>>, h0: Vec<Vec<T>>) -> Result<Self> {
        let space = ProfileSpace::new(signal_sets.iter().map(|s| s.len()).collect());
        if h0.len() != space.size() {
            return Err(dimension(format!(
                "allocation rule has {} rows, signal profiles number {}",
                h0.len(),
                space.size()
            )));
        }
        let width = h0.first().map_or(0, |r| r.len());
        for (k, row) in h0.iter().enumerate() {
            if row.len() != width {
                return Err(dimension("allocation rows have different widths"));
            }
            check_dist(
                row,
                T::tol(1e-9),
                &format!("h0 at signals {:?}", space.decode(k)),
            )?;
        }
        Ok(Mechanism {
            signal_sets,
            h0,
            space,
        })
    }

    /// Direct mechanism whose allocation rule is `f` itself.
    pub fn direct(env: &Environment<T>, f: &crate::environment::Acf<T>) -> Result<Self> {
        let labels = env
            .type_sets
            .iter()
            .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
            .collect();
        Self::new(labels, f.rows.clone())
    }

    pub fn row(&self, signals: &[usize]) -> &[T] {
        &self.h0[self.space.encode(signals)]
    }
}

impl<T: Scalar> MediatedForm<T> for Mechanism<T> {
    fn n_players(&self) -> usize {
        self.signal_sets.len()
    }
    fn signal_labels(&self, player: usize) -> &[String] {
        &self.signal_sets[player]
    }
    fn signal_space(&self) -> &ProfileSpace {
        &self.space
    }
    fn n_allocations(&self) -> usize {
        self.h0.first().map_or(0, |r| r.len())
    }
    fn n_messages(&self, _player: usize) -> usize {
        1
    }
    fn message_label(&self, _player: usize, _msg: usize) -> String {
        "-".into()
    }
    fn message_marginal(&self, _player: usize, _msg: usize) -> T {
        T::one()
    }
    fn contexts_given(&self, _player: usize, _msg: usize) -> Vec<(T, usize)> {
        vec![(T::one(), 0)]
    }
    fn contexts(&self) -> Vec<(T, usize)> {
        vec![(T::one(), 0)]
    }
    fn context_message(&self, _ctx: usize, _player: usize) -> usize {
        0
    }
    fn h_row(&self, _ctx: usize, signals: usize) -> &[T] {
        &self.h0[signals]
    }
}

/// `sigma_i(theta_i)`: `[player][type][signal]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy<T> {
    pub rows: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> Strategy<T> {
    pub fn new(rows: Vec<Vec<Vec<T>>>) -> Result<Self> {
        for (i, p) in rows.iter().enumerate() {
            for (t, r) in p.iter().enumerate() {
                check_dist(
                    r,
                    T::tol(1e-9),
                    &format!("strategy of player {i}, type {t}"),
                )?;
            }
        }
        Ok(Strategy { rows })
    }

    /// Reports the true type; signals are the type indices.
    pub fn truthful(env: &Environment<T>) -> Self {
        let rows = env
            .type_sets
            .iter()
            .map(|ts| (0..ts.len()).map(|t| point_mass(ts.len(), t)).collect())
            .collect();
        Strategy { rows }
    }

    /// Same strategy for a single (ignored) mediator message.
    pub fn to_mediated(&self) -> MediatedStrategy<T> {
        MediatedStrategy {
            rows: self.rows.iter().map(|p| vec![p.clone()]).collect(),
        }
    }
}

pub fn truthful_strategy<T: Scalar>(env: &Environment<T>) -> Strategy<T> {
    Strategy::truthful(env)
}

/// Signal sets equal type sets, label by label.
pub fn as_direct<T: Scalar>(mech: &Mechanism<T>, env: &Environment<T>) -> bool {
    mech.is_direct(env)
}

/// Beliefs tried by the belief-dominance refuter.
///
/// For `k` opponent signal profiles: every vertex, the uniform belief, all
/// pairwise vertex midpoints, and the simplex grid at `resolution` (lowered until
/// it has at most `max_grid_points` points).
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefCandidates<T> {
    pub resolution: usize,
    pub max_grid_points: usize,
    /// Additional beliefs, used for players whose opponent space has matching size.
    pub extra: Vec<Vec<T>>,
}

impl<T: Scalar> Default for BeliefCandidates<T> {
    fn default() -> Self {
        BeliefCandidates {
            resolution: 10,
            max_grid_points: 20_000,
            extra: Vec::new(),
        }
    }
}

impl<T: Scalar> BeliefCandidates<T> {
    pub fn with_resolution(resolution: usize) -> Self {
        BeliefCandidates {
            resolution: resolution.max(1),
            ..Default::default()
        }
    }

    pub fn generate(&self, k: usize) -> Vec<Vec<T>> {
        let mut out: Vec<Vec<T>> = (0..k).map(|v| point_mass(k, v)).collect();
        out.push(uniform(k));
        let half = T::lit(0.5);
        for a in 0..k {
            for b in a + 1..k {
                let mut p = vec![T::zero(); k];
                p[a] = half;
                p[b] = half;
                out.push(p);
            }
        }
        let mut r = self.resolution;
        while r > 1 && simplex_grid_len(k, r) > self.max_grid_points as u128 {
            r -= 1;
        }
        if r > 1 {
            out.extend(simplex_grid(k, r));
        }
        out.extend(self.extra.iter().filter(|e| e.len() == k).cloned());
        let mut seen: Vec<Vec<T>> = Vec::with_capacity(out.len());
        for p in out {
            if !seen
                .iter()
                .any(|q| crate::dist::max_abs_diff(q, &p) < T::tol(1e-12))
            {
                seen.push(p);
            }
        }
        seen
    }
}

/// Allocation distribution faced by `player` of type `ty` sending `signal`,
/// with prior-conditional beliefs and opponents following `sigma`.
#[allow(clippy::too_many_arguments)]
pub fn induced_belief<T: Scalar>(
    mech: &Mechanism<T>,
    env: &Environment<T>,
    prior: &Prior<T>,
    sigma: &Strategy<T>,
    player: usize,
    ty: usize,
    signal: usize,
) -> Result<Vec<T>> {
    let tau = sigma.to_mediated();
    check_compat(mech, env, &tau)?;
    let cond = prior.conditional(player, ty)?;
    Ok(alloc_lottery(
        mech,
        &tau,
        &env.type_space(),
        player,
        0,
        OppView::Types(&cond),
        signal,
    ))
}

pub fn is_bayes_nash<T: Scalar>(
    mech: &Mechanism<T>,
    env: &Environment<T>,
    prior: &Prior<T>,
    sigma: &Strategy<T>,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    Ok(is_bayes_nash_mediated(mech, env, prior, &sigma.to_mediated(), tol)?.strip_messages())
}

pub fn is_dominant<T: Scalar>(
    mech: &Mechanism<T>,
    env: &Environment<T>,
    sigma: &Strategy<T>,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    Ok(is_dominant_mediated(mech, env, &sigma.to_mediated(), tol)?.strip_messages())
}

pub fn check_belief_dominant<T: Scalar>(
    mech: &Mechanism<T>,
    env: &Environment<T>,
    sigma: &Strategy<T>,
    candidates: &BeliefCandidates<T>,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    Ok(
        check_belief_dominant_mediated(mech, env, &sigma.to_mediated(), candidates, tol)?
            .strip_messages(),
    )
}

pub fn induced_acf<T: Scalar>(
    mech: &Mechanism<T>,
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    sigma: &Strategy<T>,
) -> Result<InducedAcf<T>> {
    induced_acf_mediated(mech, env, prior, &sigma.to_mediated())
}
