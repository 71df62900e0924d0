//! Revelation-principle transforms for mediated and publicly mediated mechanisms,
//! their verification, and the reduction of EUT environments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cpt::CptType;
use crate::dist::{max_abs_diff, support, ProfileSpace};
use crate::environment::{Acf, Environment, Prior};
use crate::error::{domain, Error, Result};
use crate::mechanism::{is_bayes_nash, BeliefCandidates, Mechanism, Strategy};
use crate::mediated::{
    alloc_lottery, check_belief_dominant_mediated, check_compat, induced_acf_mediated,
    is_bayes_nash_mediated, is_dominant_mediated, truthful_mediated_strategy, MediatedForm,
    MediatedMechanism, MediatedStrategy, MessageProfile, OppView, PubliclyMediatedMechanism,
};
use crate::report::EquilibriumReport;
use crate::scalar::{Scalar, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquilibriumKind {
    BayesNash,
    Dominant,
    BeliefDominant,
}

impl EquilibriumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EquilibriumKind::BayesNash => "bayes-nash",
            EquilibriumKind::Dominant => "dominant",
            EquilibriumKind::BeliefDominant => "belief-dominant",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformOptions {
    /// Enumerate only signals in the support of the strategy.
    pub prune: bool,
    /// Maximum number of message profiles in the result.
    pub cap: u128,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            prune: true,
            cap: 1_000_000,
        }
    }
}

/// Where a message of the direct mechanism came from: the original message and
/// the signal the player's strategy picks for each type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageOrigin {
    pub message: usize,
    /// `plan[t]` is the signal sent by type `t`.
    pub plan: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformStats {
    pub messages_per_player: Vec<usize>,
    pub profiles: usize,
    /// Messages per player left out because some planned signal is off the support.
    pub pruned_messages: Vec<u128>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult<T, M> {
    pub mechanism: M,
    pub truthful: MediatedStrategy<T>,
    pub stats: TransformStats,
    /// `origins[i][k]` explains message `k` of player `i`.
    pub origins: Vec<Vec<MessageOrigin>>,
    /// Built by [`to_direct_public`].
    pub public: bool,
}

/// Plans (one signal per type) available to a player at one message, with their probability.
fn plans<T: Scalar>(
    rows: &[Vec<T>],
    n_signals: usize,
    prune: bool,
) -> (Vec<(Vec<usize>, T)>, u128) {
    let choices: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| {
            if prune {
                support(r, T::zero())
            } else {
                (0..n_signals).collect()
            }
        })
        .collect();
    let total = (n_signals as u128).saturating_pow(rows.len() as u32);
    let space = ProfileSpace::new(choices.iter().map(|c| c.len()).collect());
    let out: Vec<(Vec<usize>, T)> = (0..space.size())
        .map(|k| {
            let pick = space.decode(k);
            let plan: Vec<usize> = pick.iter().zip(&choices).map(|(&p, c)| c[p]).collect();
            let prob = plan
                .iter()
                .enumerate()
                .fold(T::one(), |acc, (t, &s)| acc * rows[t][s]);
            (plan, prob)
        })
        .collect();
    let kept = out.len() as u128;
    (out, total.saturating_sub(kept))
}

fn plan_count<T: Scalar>(rows: &[Vec<T>], n_signals: usize, prune: bool) -> u128 {
    rows.iter().fold(1u128, |acc, r| {
        let k = if prune {
            support(r, T::zero()).len()
        } else {
            n_signals
        };
        acc.saturating_mul(k as u128)
    })
}

fn plan_label(labels: &[String], plan: &[usize]) -> String {
    plan.iter()
        .map(|&s| labels[s].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn type_labels<T: Scalar>(env: &Environment<T>) -> Vec<Vec<String>> {
    env.type_sets
        .iter()
        .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
        .collect()
}

/// Allocation rule of the direct mechanism at one context: signals chosen by the plans.
fn direct_rows<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    ctx: usize,
    types: &ProfileSpace,
    plans: &[&[usize]],
) -> Vec<Vec<T>> {
    let signals = m.signal_space();
    (0..types.size())
        .map(|tk| {
            let psi: Vec<usize> = (0..types.len())
                .map(|i| plans[i][types.coord(tk, i)])
                .collect();
            m.h_row(ctx, signals.encode(&psi)).to_vec()
        })
        .collect()
}

fn check_dims<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    tau: &MediatedStrategy<T>,
) -> Result<()> {
    check_compat(m, env, tau)
}

/// Direct mediated mechanism whose truthful strategy reproduces `(m, tau)`.
pub fn to_direct_mediated<T: Scalar>(
    m: &MediatedMechanism<T>,
    env: &Environment<T>,
    tau: &MediatedStrategy<T>,
    opts: &TransformOptions,
) -> Result<TransformResult<T, MediatedMechanism<T>>> {
    check_dims(m, env, tau)?;
    let n = env.n_players();
    let prune = opts.prune;
    let live: Vec<&MessageProfile<T>> = m
        .profiles
        .iter()
        .filter(|p| !prune || p.prob > T::zero())
        .collect();
    let needed = live.iter().fold(0u128, |acc, p| {
        let k = (0..n).fold(1u128, |a, i| {
            a.saturating_mul(plan_count(
                &tau.rows[i][p.messages[i]],
                m.signal_sets[i].len(),
                prune,
            ))
        });
        acc.saturating_add(k)
    });
    if needed > opts.cap {
        return Err(Error::Resource {
            what: "direct mediated mechanism".into(),
            needed,
            cap: opts.cap,
        });
    }

    // per player: message list, and for each original message the range of new indices
    let mut origins: Vec<Vec<MessageOrigin>> = Vec::with_capacity(n);
    let mut weights: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut labels: Vec<Vec<String>> = Vec::with_capacity(n);
    let mut pruned = Vec::with_capacity(n);
    for i in 0..n {
        let (mut o, mut w, mut off, mut l) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut dropped = 0u128;
        for msg in 0..m.message_sets[i].len() {
            off.push(o.len());
            let (ps, d) = plans(&tau.rows[i][msg], m.signal_sets[i].len(), prune);
            dropped += d;
            for (plan, p) in ps {
                l.push(format!(
                    "{}|{}",
                    m.message_sets[i][msg],
                    plan_label(&m.signal_sets[i], &plan)
                ));
                o.push(MessageOrigin { message: msg, plan });
                w.push(p);
            }
        }
        off.push(o.len());
        origins.push(o);
        weights.push(w);
        offsets.push(off);
        labels.push(l);
        pruned.push(dropped);
    }

    let types = env.type_space();
    let mut profiles = Vec::new();
    for (ctx, p) in m.profiles.iter().enumerate() {
        if prune && !(p.prob > T::zero()) {
            continue;
        }
        let ranges: Vec<(usize, usize)> = (0..n)
            .map(|i| (offsets[i][p.messages[i]], offsets[i][p.messages[i] + 1]))
            .collect();
        let combo = ProfileSpace::new(ranges.iter().map(|(a, b)| b - a).collect());
        for k in 0..combo.size() {
            let picks: Vec<usize> = (0..n).map(|i| ranges[i].0 + combo.coord(k, i)).collect();
            let prob = picks
                .iter()
                .enumerate()
                .fold(p.prob, |acc, (i, &q)| acc * weights[i][q]);
            if prune && !(prob > T::zero()) {
                continue;
            }
            let plan_refs: Vec<&[usize]> = picks
                .iter()
                .enumerate()
                .map(|(i, &q)| origins[i][q].plan.as_slice())
                .collect();
            profiles.push(MessageProfile {
                messages: picks,
                prob,
                h: direct_rows(m, ctx, &types, &plan_refs),
            });
        }
    }
    let count = profiles.len();
    let mechanism = MediatedMechanism::new(labels, type_labels(env), profiles)?;
    let truthful = truthful_mediated_strategy(env, &mechanism)?;
    Ok(TransformResult {
        stats: TransformStats {
            messages_per_player: origins.iter().map(|o| o.len()).collect(),
            profiles: count,
            pruned_messages: pruned,
        },
        mechanism,
        truthful,
        origins,
        public: false,
    })
}

/// Direct publicly mediated mechanism whose truthful strategy reproduces `(m, tau)`.
pub fn to_direct_public<T: Scalar>(
    m: &PubliclyMediatedMechanism<T>,
    env: &Environment<T>,
    tau: &MediatedStrategy<T>,
    opts: &TransformOptions,
) -> Result<TransformResult<T, PubliclyMediatedMechanism<T>>> {
    check_dims(m, env, tau)?;
    let n = env.n_players();
    let prune = opts.prune;
    let needed = (0..m.messages.len())
        .filter(|&k| !prune || m.d[k] > T::zero())
        .fold(0u128, |acc, k| {
            let c = (0..n).fold(1u128, |a, i| {
                a.saturating_mul(plan_count(&tau.rows[i][k], m.signal_sets[i].len(), prune))
            });
            acc.saturating_add(c)
        });
    if needed > opts.cap {
        return Err(Error::Resource {
            what: "direct publicly mediated mechanism".into(),
            needed,
            cap: opts.cap,
        });
    }
    let types = env.type_space();
    let mut origins: Vec<Vec<MessageOrigin>> = vec![Vec::new(); n];
    let mut pruned = vec![0u128; n];
    let (mut labels, mut d, mut h) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..m.messages.len() {
        if prune && !(m.d[k] > T::zero()) {
            continue;
        }
        let per: Vec<Vec<(Vec<usize>, T)>> = (0..n)
            .map(|i| {
                let (ps, dropped) = plans(&tau.rows[i][k], m.signal_sets[i].len(), prune);
                pruned[i] += dropped;
                ps
            })
            .collect();
        let combo = ProfileSpace::new(per.iter().map(|p| p.len()).collect());
        for c in 0..combo.size() {
            let picks: Vec<&(Vec<usize>, T)> = (0..n).map(|i| &per[i][combo.coord(c, i)]).collect();
            let prob = picks.iter().fold(m.d[k], |acc, (_, p)| acc * *p);
            if prune && !(prob > T::zero()) {
                continue;
            }
            let plan_refs: Vec<&[usize]> = picks.iter().map(|(p, _)| p.as_slice()).collect();
            let parts: Vec<String> = (0..n)
                .map(|i| plan_label(&m.signal_sets[i], plan_refs[i]))
                .collect();
            labels.push(format!("{}|{}", m.messages[k], parts.join("|")));
            d.push(prob);
            h.push(direct_rows(m, k, &types, &plan_refs));
            for i in 0..n {
                origins[i].push(MessageOrigin {
                    message: k,
                    plan: plan_refs[i].to_vec(),
                });
            }
        }
    }
    let count = labels.len();
    let mechanism = PubliclyMediatedMechanism::new(labels, d, type_labels(env), h)?;
    let truthful = truthful_mediated_strategy(env, &mechanism)?;
    Ok(TransformResult {
        stats: TransformStats {
            messages_per_player: vec![count; n],
            profiles: count,
            pruned_messages: pruned,
        },
        mechanism,
        truthful,
        origins,
        public: true,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions<T> {
    /// Random beliefs per (player, message, report).
    pub samples: usize,
    pub seed: u64,
    pub candidates: BeliefCandidates<T>,
    pub tolerances: Tolerances<T>,
    /// Allowed drift of induced choice functions and the lottery identity.
    pub exact_tol: T,
}

impl<T: Scalar> Default for VerifyOptions<T> {
    fn default() -> Self {
        VerifyOptions {
            samples: 32,
            seed: 0x5eed,
            candidates: BeliefCandidates::default(),
            tolerances: Tolerances::default(),
            exact_tol: T::tol(1e-12),
        }
    }
}

/// A sampled instance of the lottery identity that failed.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityMismatch<T> {
    pub player: usize,
    pub message: usize,
    pub report: usize,
    pub belief: Vec<T>,
    pub direct: Vec<T>,
    pub original: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport<T> {
    pub kind: EquilibriumKind,
    pub acf_max_diff: T,
    /// First type profile where the induced choice functions disagree.
    pub acf_mismatch: Option<Vec<usize>>,
    pub equilibrium: EquilibriumReport<T>,
    pub identity_checks: usize,
    pub identity_max_diff: T,
    pub identity_mismatch: Option<IdentityMismatch<T>>,
}

impl<T: Scalar> VerifyReport<T> {
    pub fn acf_ok(&self) -> bool {
        self.acf_mismatch.is_none()
    }
    pub fn identity_ok(&self) -> bool {
        self.identity_mismatch.is_none()
    }
    pub fn passed(&self) -> bool {
        self.acf_ok() && self.equilibrium.is_ok() && self.identity_ok()
    }
}

fn random_belief<T: Scalar>(rng: &mut ChaCha8Rng, k: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| T::lit(x / total)).collect()
}

/// Lottery the original mechanism induces for `player` at the direct message `origin`,
/// reporting `report`, when opponents' types follow `belief`.
fn original_lottery<T: Scalar, M: MediatedForm<T>>(
    original: &M,
    tau: &MediatedStrategy<T>,
    types: &ProfileSpace,
    origins: &[Vec<MessageOrigin>],
    public: bool,
    player: usize,
    msg: usize,
    report: usize,
    belief: &[T],
) -> Vec<T> {
    let n = types.len();
    let opp_types = types.without(player);
    let signals = original.signal_space();
    let opp_signals = signals.without(player);
    let own = &origins[player][msg];
    let psi_i = own.plan[report];
    let mut out = vec![T::zero(); original.n_allocations()];
    if public {
        let ctx = own.message;
        for (tk, &g) in belief.iter().enumerate() {
            let theta = opp_types.decode(tk);
            let mut psi = Vec::with_capacity(n);
            let mut it = theta.iter();
            for j in 0..n {
                if j == player {
                    psi.push(psi_i);
                } else {
                    psi.push(origins[j][msg].plan[*it.next().unwrap()]);
                }
            }
            for (o, &h) in out
                .iter_mut()
                .zip(original.h_row(ctx, signals.encode(&psi)))
            {
                *o = *o + g * h;
            }
        }
        return out;
    }
    for (w, ctx) in original.contexts_given(player, own.message) {
        for (tk, &g) in belief.iter().enumerate() {
            let theta = opp_types.decode(tk);
            for sk in 0..opp_signals.size() {
                let psi = opp_signals.decode(sk);
                let mut p = w * g;
                let mut pos = 0;
                for j in 0..n {
                    if j == player {
                        continue;
                    }
                    p = p * tau.dist(j, original.context_message(ctx, j), theta[pos])[psi[pos]];
                    pos += 1;
                }
                if p == T::zero() {
                    continue;
                }
                let full = signals.join(player, psi_i, sk);
                for (o, &h) in out.iter_mut().zip(original.h_row(ctx, full)) {
                    *o = *o + p * h;
                }
            }
        }
    }
    out
}

/// Checks a transform: induced choice functions agree, truthful play is an
/// equilibrium of the stated kind, and sampled lottery identities hold.
#[allow(clippy::too_many_arguments)]
pub fn verify_transform<T: Scalar, M: MediatedForm<T>, D: MediatedForm<T>>(
    original: &M,
    tau: &MediatedStrategy<T>,
    result: &TransformResult<T, D>,
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    kind: EquilibriumKind,
    opts: &VerifyOptions<T>,
) -> Result<VerifyReport<T>> {
    let tol = &opts.tolerances;
    let direct = &result.mechanism;
    let before = induced_acf_mediated(original, env, prior, tau)?;
    let after = induced_acf_mediated(direct, env, prior, &result.truthful)?;
    let restrict = kind == EquilibriumKind::BayesNash;
    let mut acf_max_diff = T::zero();
    let mut acf_mismatch = None;
    for (k, (a, b)) in before.acf.rows.iter().zip(&after.acf.rows).enumerate() {
        if restrict && before.unconstrained[k] {
            continue;
        }
        let d = max_abs_diff(a, b);
        if d > acf_max_diff {
            acf_max_diff = d;
        }
        if d > opts.exact_tol && acf_mismatch.is_none() {
            acf_mismatch = Some(before.acf.space.decode(k));
        }
    }

    let equilibrium = match kind {
        EquilibriumKind::BayesNash => {
            let prior = prior.ok_or_else(|| domain("Bayes-Nash verification needs a prior"))?;
            is_bayes_nash_mediated(direct, env, prior, &result.truthful, tol)?
        }
        EquilibriumKind::Dominant => is_dominant_mediated(direct, env, &result.truthful, tol)?,
        EquilibriumKind::BeliefDominant => {
            check_belief_dominant_mediated(direct, env, &result.truthful, &opts.candidates, tol)?
        }
    };

    let types = env.type_space();
    let mut tasks = Vec::new();
    for i in 0..env.n_players() {
        for msg in 0..direct.n_messages(i) {
            if !(direct.message_marginal(i, msg) > tol.support) {
                continue;
            }
            for report in 0..env.type_sets[i].len() {
                tasks.push((i, msg, report));
            }
        }
    }
    let outcomes: Vec<(T, Option<IdentityMismatch<T>>)> = tasks
        .par_iter()
        .map(|&(i, msg, report)| {
            let seed = opts.seed ^ ((i as u64) << 48) ^ ((msg as u64) << 16) ^ report as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = types.without(i).size();
            let mut worst = T::zero();
            let mut bad = None;
            for _ in 0..opts.samples {
                let g: Vec<T> = random_belief(&mut rng, k);
                let lhs = alloc_lottery(
                    direct,
                    &result.truthful,
                    &types,
                    i,
                    msg,
                    OppView::Types(&g),
                    report,
                );
                let rhs = original_lottery(
                    original,
                    tau,
                    &types,
                    &result.origins,
                    result.public,
                    i,
                    msg,
                    report,
                    &g,
                );
                let d = max_abs_diff(&lhs, &rhs);
                if d > worst {
                    worst = d;
                }
                if d > opts.exact_tol && bad.is_none() {
                    bad = Some(IdentityMismatch {
                        player: i,
                        message: msg,
                        report,
                        belief: g,
                        direct: lhs,
                        original: rhs,
                    });
                }
            }
            (worst, bad)
        })
        .collect();
    let mut identity_max_diff = T::zero();
    let mut identity_mismatch = None;
    for (d, bad) in outcomes {
        if d > identity_max_diff {
            identity_max_diff = d;
        }
        if identity_mismatch.is_none() {
            identity_mismatch = bad;
        }
    }
    Ok(VerifyReport {
        kind,
        acf_max_diff,
        acf_mismatch,
        equilibrium,
        identity_checks: tasks.len() * opts.samples,
        identity_max_diff,
        identity_mismatch,
    })
}

/// An EUT environment rewritten so that outcomes are allocations.
#[derive(Clone, Debug, PartialEq)]
pub struct EutReduction<T> {
    pub env: Environment<T>,
    pub prior: Option<Prior<T>>,
    pub mechanism: Mechanism<T>,
    pub sigma: Strategy<T>,
    /// `type_map[i][t]` is the index of the reduced type for type `t` of player `i`.
    pub type_map: Vec<Vec<usize>>,
}

/// Replaces each player's outcome set by the allocation set, with types valuing
/// an allocation by the expected value of its outcome lottery.
pub fn reduce_environment_eut<T: Scalar>(
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    mechanism: &Mechanism<T>,
    sigma: &Strategy<T>,
) -> Result<EutReduction<T>> {
    for (i, ts) in env.type_sets.iter().enumerate() {
        if let Some(t) = ts.iter().find(|t| !t.is_eut()) {
            return Err(domain(format!(
                "type {} of player {i} has non-linear probability weighting",
                t.label
            )));
        }
    }
    let n = env.n_players();
    let k = env.n_allocations();
    let type_sets = (0..n)
        .map(|i| {
            (0..env.type_sets[i].len())
                .map(|t| {
                    let values = (0..k).map(|a| env.utility_u(i, t, a)).collect();
                    CptType::eut(env.type_sets[i][t].label.clone(), values)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let zeta = (0..k).map(|a| vec![(T::one(), vec![a; n])]).collect();
    let reduced = Environment::new(
        type_sets,
        env.allocations.clone(),
        vec![env.allocations.clone(); n],
        zeta,
    )?;
    let type_map = env
        .type_sets
        .iter()
        .map(|ts| (0..ts.len()).collect())
        .collect();
    Ok(EutReduction {
        env: reduced,
        prior: prior.cloned(),
        mechanism: mechanism.clone(),
        sigma: sigma.clone(),
        type_map,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport<T> {
    /// Truthful Bayes-Nash check of each supported message as a plain direct mechanism.
    pub components: Vec<(usize, EquilibriumReport<T>)>,
    /// Distance between the mixture of components and the induced choice function.
    pub mixture_diff: T,
}

impl<T: Scalar> DecompositionReport<T> {
    pub fn passed(&self) -> bool {
        self.components.iter().all(|(_, r)| r.is_ok()) && self.mixture_diff <= T::tol(1e-9)
    }

    pub fn failing_messages(&self) -> Vec<usize> {
        self.components
            .iter()
            .filter(|(_, r)| !r.is_ok())
            .map(|(m, _)| *m)
            .collect()
    }
}

/// Checks that each message of a direct public mechanism is, on its own, a
/// truthfully Bayes-Nash direct mechanism, and that their mixture is the induced rule.
pub fn public_convexity_decomposition_check<T: Scalar>(
    m: &PubliclyMediatedMechanism<T>,
    env: &Environment<T>,
    prior: &Prior<T>,
) -> Result<DecompositionReport<T>> {
    let truthful = truthful_mediated_strategy(env, m)?;
    let tol = Tolerances::default();
    let types = env.type_space();
    let mut components = Vec::new();
    let mut mixture: Vec<Vec<T>> = vec![vec![T::zero(); m.n_allocations()]; types.size()];
    for k in 0..m.messages.len() {
        if !(m.d[k] > tol.support) {
            continue;
        }
        let f = Acf::new(types.clone(), m.h[k].clone())?;
        let mech = Mechanism::direct(env, &f)?;
        let report = is_bayes_nash(&mech, env, prior, &Strategy::truthful(env), &tol)?;
        components.push((k, report));
        for (row, h) in mixture.iter_mut().zip(&m.h[k]) {
            for (x, &y) in row.iter_mut().zip(h) {
                *x = *x + m.d[k] * y;
            }
        }
    }
    let induced = induced_acf_mediated(m, env, Some(prior), &truthful)?;
    let mixture_diff = induced
        .acf
        .rows
        .iter()
        .zip(&mixture)
        .fold(T::zero(), |acc, (a, b)| acc.max(max_abs_diff(a, b)));
    Ok(DecompositionReport {
        components,
        mixture_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::mediated::lift_unmediated;

    #[test]
    fn market_transform_verifies() {
        let ex = catalog::three_type_market::<f64>();
        let m = lift_unmediated(&ex.indirect);
        let tau = ex.sigma.to_mediated();
        let r = to_direct_mediated(&m, &ex.env, &tau, &TransformOptions::default()).unwrap();
        assert_eq!(r.stats.messages_per_player, vec![2, 2]);
        assert_eq!(r.stats.profiles, 4);
        let v = verify_transform(
            &m,
            &tau,
            &r,
            &ex.env,
            Some(&ex.prior),
            EquilibriumKind::BayesNash,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(v.passed(), "{v:?}");
    }

    #[test]
    fn cap_is_enforced() {
        let ex = catalog::three_type_market::<f64>();
        let m = lift_unmediated(&ex.indirect);
        let tau = ex.sigma.to_mediated();
        let opts = TransformOptions {
            prune: false,
            cap: 100,
        };
        match to_direct_mediated(&m, &ex.env, &tau, &opts) {
            Err(Error::Resource { needed, .. }) => assert_eq!(needed, 64 * 64),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_row_is_located() {
        let ex = catalog::three_type_market::<f64>();
        let m = lift_unmediated(&ex.indirect);
        let tau = ex.sigma.to_mediated();
        let mut r = to_direct_mediated(&m, &ex.env, &tau, &TransformOptions::default()).unwrap();
        let mut profiles = r.mechanism.profiles.clone();
        // row of type profile (UF, UF)
        profiles[0].h[4] = vec![1.0, 0.0, 0.0];
        r.mechanism = MediatedMechanism::new(
            r.mechanism.message_sets.clone(),
            r.mechanism.signal_sets.clone(),
            profiles,
        )
        .unwrap();
        let v = verify_transform(
            &m,
            &tau,
            &r,
            &ex.env,
            Some(&ex.prior),
            EquilibriumKind::BayesNash,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(v.acf_mismatch, Some(vec![1, 1]));
        assert!(!v.identity_ok());
    }

    #[test]
    fn eut_rejects_prelec_player() {
        let ex = catalog::dominance_gap::<f64>();
        let err = reduce_environment_eut(&ex.env, None, &ex.mechanism, &ex.sigma).unwrap_err();
        assert!(err.to_string().contains("UP"));
    }
}
