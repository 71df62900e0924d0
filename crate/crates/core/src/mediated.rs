//! Mediated mechanisms and the equilibrium engine shared by every mechanism family.
//!
//! A mechanism is seen through [`MediatedForm`]: a distribution over *contexts*
//! (message profiles), each player's view of which message it received, and an
//! allocation rule per context and signal profile. A plain mechanism is the
//! one-context case; a publicly mediated one gives every player the same message.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::dist::{check_dist, ProfileSpace};
use crate::environment::{Acf, Environment, Prior};
use crate::error::{dimension, domain, invalid, Result};
use crate::mechanism::BeliefCandidates;
use crate::report::{EquilibriumReport, Opponents, Witness};
use crate::scalar::{Scalar, Tolerances};

pub trait MediatedForm<T: Scalar>: Sync {
    fn n_players(&self) -> usize;
    fn signal_labels(&self, player: usize) -> &[String];
    fn signal_space(&self) -> &ProfileSpace;
    fn n_allocations(&self) -> usize;
    fn n_messages(&self, player: usize) -> usize;
    fn message_label(&self, player: usize, msg: usize) -> String;
    /// `D_i(msg)`.
    fn message_marginal(&self, player: usize, msg: usize) -> T;
    /// Contexts with their conditional probability given the player's message.
    fn contexts_given(&self, player: usize, msg: usize) -> Vec<(T, usize)>;
    /// Contexts with their unconditional probability.
    fn contexts(&self) -> Vec<(T, usize)>;
    /// Message that `player` holds in a context.
    fn context_message(&self, ctx: usize, player: usize) -> usize;
    fn h_row(&self, ctx: usize, signals: usize) -> &[T];

    /// Signals coincide with type labels for every player.
    fn is_direct(&self, env: &Environment<T>) -> bool {
        (0..self.n_players()).all(|i| {
            let sig = self.signal_labels(i);
            sig.len() == env.type_sets[i].len()
                && sig
                    .iter()
                    .zip(&env.type_sets[i])
                    .all(|(s, t)| *s == t.label)
        })
    }
}

/// `tau_i(phi_i, theta_i)`: `[player][message][type][signal]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MediatedStrategy<T> {
    pub rows: Vec<Vec<Vec<Vec<T>>>>,
}

impl<T: Scalar> MediatedStrategy<T> {
    pub fn new(rows: Vec<Vec<Vec<Vec<T>>>>) -> Result<Self> {
        for (i, p) in rows.iter().enumerate() {
            for (m, msg) in p.iter().enumerate() {
                for (t, r) in msg.iter().enumerate() {
                    check_dist(
                        r,
                        T::tol(1e-9),
                        &format!("strategy of player {i}, message {m}, type {t}"),
                    )?;
                }
            }
        }
        Ok(MediatedStrategy { rows })
    }

    #[inline]
    pub fn dist(&self, player: usize, msg: usize, ty: usize) -> &[T] {
        &self.rows[player][msg][ty]
    }
}

/// Declared message profile with its probability and allocation rule.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageProfile<T> {
    pub messages: Vec<usize>,
    pub prob: T,
    /// Allocation distribution per signal profile.
    pub h: Vec<Vec<T>>,
}

/// Mediated mechanism with a sparse mediator distribution.
///
/// Message profiles that are not declared have probability zero; the allocation
/// rule is never consulted there.
#[derive(Clone, Debug, PartialEq)]
pub struct MediatedMechanism<T> {
    pub message_sets: Vec<Vec<String>>,
    pub signal_sets: Vec<Vec<String>>,
    pub profiles: Vec<MessageProfile<T>>,
    signal_space: ProfileSpace,
    n_alloc: usize,
    by_message: Vec<Vec<Vec<usize>>>,
    marginals: Vec<Vec<T>>,
}

impl<T: Scalar> MediatedMechanism<T> {
    pub fn new(
        message_sets: Vec<Vec<String>>,
        signal_sets: Vec<Vec<String>>,
        profiles: Vec<MessageProfile<T>>,
    ) -> Result<Self> {
        let n = message_sets.len();
        if signal_sets.len() != n || n == 0 {
            return Err(dimension(
                "message and signal sets must cover the same players",
            ));
        }
        let signal_space = ProfileSpace::new(signal_sets.iter().map(|s| s.len()).collect());
        let probs: Vec<T> = profiles.iter().map(|p| p.prob).collect();
        check_dist(&probs, T::tol(1e-9), "mediator distribution")?;
        let n_alloc = profiles
            .first()
            .and_then(|p| p.h.first())
            .map_or(0, |r| r.len());
        let mut seen = HashMap::new();
        let mut by_message: Vec<Vec<Vec<usize>>> = message_sets
            .iter()
            .map(|m| vec![Vec::new(); m.len()])
            .collect();
        let mut marginals: Vec<Vec<T>> = message_sets
            .iter()
            .map(|m| vec![T::zero(); m.len()])
            .collect();
        for (k, p) in profiles.iter().enumerate() {
            if p.messages.len() != n {
                return Err(dimension(format!("message profile {k} has wrong length")));
            }
            for (i, &m) in p.messages.iter().enumerate() {
                if m >= message_sets[i].len() {
                    return Err(invalid(format!(
                        "message profile {k} names unknown message for player {i}"
                    )));
                }
                by_message[i][m].push(k);
                marginals[i][m] = marginals[i][m] + p.prob;
            }
            if seen.insert(p.messages.clone(), k).is_some() {
                return Err(invalid(format!(
                    "message profile {:?} declared twice",
                    p.messages
                )));
            }
            if p.h.len() != signal_space.size() {
                return Err(dimension(format!(
                    "message profile {k}: allocation rule must cover every signal profile"
                )));
            }
            for (s, row) in p.h.iter().enumerate() {
                if row.len() != n_alloc {
                    return Err(dimension("allocation rows have different widths"));
                }
                check_dist(
                    row,
                    T::tol(1e-9),
                    &format!("h at message profile {k}, signals {s}"),
                )?;
            }
        }
        Ok(MediatedMechanism {
            message_sets,
            signal_sets,
            profiles,
            signal_space,
            n_alloc,
            by_message,
            marginals,
        })
    }

    pub fn message_space(&self) -> ProfileSpace {
        ProfileSpace::new(self.message_sets.iter().map(|m| m.len()).collect())
    }

    /// `D(phi)` for any message profile.
    pub fn prob(&self, messages: &[usize]) -> T {
        self.profiles
            .iter()
            .find(|p| p.messages == messages)
            .map_or(T::zero(), |p| p.prob)
    }

    /// Conditional distribution over opponent message profiles, dense over `Φ_{-i}`.
    pub fn mediator_conditional(&self, player: usize, msg: usize) -> Result<Vec<T>> {
        let marg = self.marginals[player][msg];
        if !(marg > Tolerances::<T>::default().support) {
            return Err(domain(format!(
                "message {msg} of player {player} has zero probability"
            )));
        }
        let space = self.message_space();
        let rest = space.without(player);
        let mut out = vec![T::zero(); rest.size()];
        for &k in &self.by_message[player][msg] {
            let p = &self.profiles[k];
            let r = space.drop_coord(space.encode(&p.messages), player);
            out[r] = out[r] + p.prob / marg;
        }
        Ok(out)
    }
}

impl<T: Scalar> MediatedForm<T> for MediatedMechanism<T> {
    fn n_players(&self) -> usize {
        self.message_sets.len()
    }
    fn signal_labels(&self, player: usize) -> &[String] {
        &self.signal_sets[player]
    }
    fn signal_space(&self) -> &ProfileSpace {
        &self.signal_space
    }
    fn n_allocations(&self) -> usize {
        self.n_alloc
    }
    fn n_messages(&self, player: usize) -> usize {
        self.message_sets[player].len()
    }
    fn message_label(&self, player: usize, msg: usize) -> String {
        self.message_sets[player][msg].clone()
    }
    fn message_marginal(&self, player: usize, msg: usize) -> T {
        self.marginals[player][msg]
    }
    fn contexts_given(&self, player: usize, msg: usize) -> Vec<(T, usize)> {
        let marg = self.marginals[player][msg];
        self.by_message[player][msg]
            .iter()
            .filter(|&&k| self.profiles[k].prob > T::zero())
            .map(|&k| (self.profiles[k].prob / marg, k))
            .collect()
    }
    fn contexts(&self) -> Vec<(T, usize)> {
        self.profiles
            .iter()
            .enumerate()
            .filter(|(_, p)| p.prob > T::zero())
            .map(|(k, p)| (p.prob, k))
            .collect()
    }
    fn context_message(&self, ctx: usize, player: usize) -> usize {
        self.profiles[ctx].messages[player]
    }
    fn h_row(&self, ctx: usize, signals: usize) -> &[T] {
        &self.profiles[ctx].h[signals]
    }
}

/// Mechanism whose mediator sends the same message to every player.
#[derive(Clone, Debug, PartialEq)]
pub struct PubliclyMediatedMechanism<T> {
    pub messages: Vec<String>,
    pub d: Vec<T>,
    pub signal_sets: Vec<Vec<String>>,
    /// `[message][signal profile][allocation]`.
    pub h: Vec<Vec<Vec<T>>>,
    signal_space: ProfileSpace,
}

impl<T: Scalar> PubliclyMediatedMechanism<T> {
    pub fn new(
        messages: Vec<String>,
        d: Vec<T>,
        signal_sets: Vec<Vec<String>>,
        h: Vec<Vec<Vec<T>>>,
    ) -> Result<Self> {
        if messages.len() != d.len() || h.len() != d.len() {
            return Err(dimension(
                "one probability and one allocation rule per message required",
            ));
        }
        check_dist(&d, T::tol(1e-9), "public mediator distribution")?;
        let signal_space = ProfileSpace::new(signal_sets.iter().map(|s| s.len()).collect());
        let width = h.first().and_then(|r| r.first()).map_or(0, |r| r.len());
        for (m, rows) in h.iter().enumerate() {
            if rows.len() != signal_space.size() {
                return Err(dimension(format!(
                    "message {m}: allocation rule must cover every signal profile"
                )));
            }
            for row in rows {
                if row.len() != width {
                    return Err(dimension("allocation rows have different widths"));
                }
                check_dist(row, T::tol(1e-9), &format!("h* at message {}", messages[m]))?;
            }
        }
        Ok(PubliclyMediatedMechanism {
            messages,
            d,
            signal_sets,
            h,
            signal_space,
        })
    }

    /// A plain mechanism as a public one with a single message.
    pub fn from_mechanism(m: &crate::mechanism::Mechanism<T>) -> Self {
        Self::new(
            vec!["-".into()],
            vec![T::one()],
            m.signal_sets.clone(),
            vec![m.h0.clone()],
        )
        .expect("a valid mechanism is a valid one-message public mechanism")
    }
}

impl<T: Scalar> MediatedForm<T> for PubliclyMediatedMechanism<T> {
    fn n_players(&self) -> usize {
        self.signal_sets.len()
    }
    fn signal_labels(&self, player: usize) -> &[String] {
        &self.signal_sets[player]
    }
    fn signal_space(&self) -> &ProfileSpace {
        &self.signal_space
    }
    fn n_allocations(&self) -> usize {
        self.h
            .first()
            .and_then(|r| r.first())
            .map_or(0, |r| r.len())
    }
    fn n_messages(&self, _player: usize) -> usize {
        self.messages.len()
    }
    fn message_label(&self, _player: usize, msg: usize) -> String {
        self.messages[msg].clone()
    }
    fn message_marginal(&self, _player: usize, msg: usize) -> T {
        self.d[msg]
    }
    fn contexts_given(&self, _player: usize, msg: usize) -> Vec<(T, usize)> {
        vec![(T::one(), msg)]
    }
    fn contexts(&self) -> Vec<(T, usize)> {
        self.d
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > T::zero())
            .map(|(k, &p)| (p, k))
            .collect()
    }
    fn context_message(&self, ctx: usize, _player: usize) -> usize {
        ctx
    }
    fn h_row(&self, ctx: usize, signals: usize) -> &[T] {
        &self.h[ctx][signals]
    }
}

/// Embeds a public mechanism as a mediated one with a diagonal mediator.
pub fn lift_public<T: Scalar>(m: &PubliclyMediatedMechanism<T>) -> MediatedMechanism<T> {
    let n = m.signal_sets.len();
    let profiles = (0..m.messages.len())
        .map(|k| MessageProfile {
            messages: vec![k; n],
            prob: m.d[k],
            h: m.h[k].clone(),
        })
        .collect();
    MediatedMechanism::new(vec![m.messages.clone(); n], m.signal_sets.clone(), profiles)
        .expect("a valid public mechanism lifts to a valid mediated one")
}

/// Embeds a plain mechanism with one message per player.
pub fn lift_unmediated<T: Scalar>(m: &crate::mechanism::Mechanism<T>) -> MediatedMechanism<T> {
    let n = m.signal_sets.len();
    let profiles = vec![MessageProfile {
        messages: vec![0; n],
        prob: T::one(),
        h: m.h0.clone(),
    }];
    MediatedMechanism::new(
        vec![vec!["-".to_string()]; n],
        m.signal_sets.clone(),
        profiles,
    )
    .expect("a valid mechanism lifts to a valid mediated one")
}

/// Truthful reporting on every message, including zero-probability ones.
pub fn truthful_mediated_strategy<T: Scalar, M: MediatedForm<T>>(
    env: &Environment<T>,
    m: &M,
) -> Result<MediatedStrategy<T>> {
    if !m.is_direct(env) {
        return Err(domain(
            "truthful strategy needs a direct mechanism (signals equal types)",
        ));
    }
    let rows = (0..env.n_players())
        .map(|i| {
            let k = env.type_sets[i].len();
            let per_type: Vec<Vec<T>> = (0..k).map(|t| crate::dist::point_mass(k, t)).collect();
            vec![per_type; m.n_messages(i)]
        })
        .collect();
    Ok(MediatedStrategy { rows })
}

// ---- engine ----

/// How the deviating player models the others.
#[derive(Clone, Copy, Debug)]
pub enum OppView<'a, T> {
    /// Belief over opponent type profiles; opponents play the strategy.
    Types(&'a [T]),
    /// Belief over opponent signal profiles.
    Signals(&'a [T]),
    /// A pure opponent signal profile.
    Pure(usize),
}

pub(crate) fn check_compat<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    tau: &MediatedStrategy<T>,
) -> Result<()> {
    let n = env.n_players();
    if m.n_players() != n || tau.rows.len() != n {
        return Err(dimension(
            "mechanism, strategy and environment disagree on player count",
        ));
    }
    if m.n_allocations() != env.n_allocations() {
        return Err(dimension(format!(
            "mechanism allocates over {} alternatives, environment has {}",
            m.n_allocations(),
            env.n_allocations()
        )));
    }
    for i in 0..n {
        if tau.rows[i].len() != m.n_messages(i) {
            return Err(dimension(format!(
                "strategy of player {i} does not cover every message"
            )));
        }
        for msg in &tau.rows[i] {
            if msg.len() != env.type_sets[i].len() {
                return Err(dimension(format!(
                    "strategy of player {i} does not cover every type"
                )));
            }
            if msg.iter().any(|r| r.len() != m.signal_labels(i).len()) {
                return Err(dimension(format!(
                    "strategy of player {i} has wrong signal count"
                )));
            }
        }
    }
    Ok(())
}

/// Distribution over opponent signal profiles in one context, given a belief
/// over opponent types.
fn opp_signal_dist<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    tau: &MediatedStrategy<T>,
    types: &ProfileSpace,
    player: usize,
    ctx: usize,
    type_belief: &[T],
) -> Vec<T> {
    let opp_types = types.without(player);
    let opp_signals = m.signal_space().without(player);
    let opponents: Vec<usize> = (0..m.n_players()).filter(|&j| j != player).collect();
    let mut q = vec![T::zero(); opp_signals.size()];
    for (tk, &g) in type_belief.iter().enumerate() {
        if g == T::zero() {
            continue;
        }
        let theta = opp_types.decode(tk);
        let rows: Vec<&[T]> = opponents
            .iter()
            .zip(&theta)
            .map(|(&j, &t)| tau.dist(j, m.context_message(ctx, j), t))
            .collect();
        for (sk, qv) in q.iter_mut().enumerate() {
            let mut p = g;
            for (pos, row) in rows.iter().enumerate() {
                p = p * row[opp_signals.coord(sk, pos)];
                if p == T::zero() {
                    break;
                }
            }
            *qv = *qv + p;
        }
    }
    q
}

fn accumulate<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    player: usize,
    ctx: usize,
    signal: usize,
    weight: T,
    q: &[T],
    out: &mut [T],
) {
    let space = m.signal_space();
    for (sk, &qv) in q.iter().enumerate() {
        if qv == T::zero() {
            continue;
        }
        let row = m.h_row(ctx, space.join(player, signal, sk));
        for (o, &h) in out.iter_mut().zip(row) {
            *o = *o + weight * qv * h;
        }
    }
}

/// Allocation lottery faced by `player` holding `msg` and sending `signal`.
pub fn alloc_lottery<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    tau: &MediatedStrategy<T>,
    types: &ProfileSpace,
    player: usize,
    msg: usize,
    view: OppView<'_, T>,
    signal: usize,
) -> Vec<T> {
    let mut out = vec![T::zero(); m.n_allocations()];
    for (w, ctx) in m.contexts_given(player, msg) {
        match view {
            OppView::Types(g) => {
                let q = opp_signal_dist(m, tau, types, player, ctx, g);
                accumulate(m, player, ctx, signal, w, &q, &mut out);
            }
            OppView::Signals(q) => accumulate(m, player, ctx, signal, w, q, &mut out),
            OppView::Pure(k) => {
                let row = m.h_row(ctx, m.signal_space().join(player, signal, k));
                for (o, &h) in out.iter_mut().zip(row) {
                    *o = *o + w * h;
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    BayesNash,
    Dominant,
    BeliefDominant,
}

struct Task {
    player: usize,
    msg: usize,
    ty: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_checks<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    tau: &MediatedStrategy<T>,
    kind: Kind,
    candidates: Option<&BeliefCandidates<T>>,
    players: &[usize],
    tol: &Tolerances<T>,
) -> Result<Vec<Witness<T>>> {
    check_compat(m, env, tau)?;
    let types = env.type_space();
    let mut tasks = Vec::new();
    for &i in players {
        let marg = prior.map(|p| p.marginal(i));
        for msg in 0..m.n_messages(i) {
            if !(m.message_marginal(i, msg) > tol.support) {
                continue;
            }
            for ty in 0..env.type_sets[i].len() {
                if kind == Kind::BayesNash && !(marg.as_ref().unwrap()[ty] > tol.support) {
                    continue;
                }
                tasks.push(Task { player: i, msg, ty });
            }
        }
    }
    let beliefs: Vec<Vec<Vec<T>>> = (0..env.n_players())
        .map(|i| match (kind, candidates) {
            (Kind::BeliefDominant, Some(c)) => c.generate(m.signal_space().without(i).size()),
            _ => Vec::new(),
        })
        .collect();
    let per_task: Vec<Result<Vec<Witness<T>>>> = tasks
        .par_iter()
        .map(|task| {
            let i = task.player;
            let supported = crate::dist::support(tau.dist(i, task.msg, task.ty), tol.support);
            let n_sig = m.signal_labels(i).len();
            let ty = env.cpt_type(i, task.ty);
            let mut found = Vec::new();
            let mut scan = |view: OppView<'_, T>, opponents: &dyn Fn() -> Opponents<T>| {
                let values: Vec<T> = (0..n_sig)
                    .map(|s| {
                        let mu = alloc_lottery(m, tau, &types, i, task.msg, view, s);
                        crate::cpt::cpt_value(&env.pushforward(i, &mu), ty)
                    })
                    .collect();
                for &s in &supported {
                    for d in 0..n_sig {
                        let gap = values[d] - values[s];
                        if gap > tol.compare {
                            found.push(Witness {
                                player: i,
                                ty: task.ty,
                                message: Some(task.msg),
                                signal: s,
                                deviation: d,
                                opponents: opponents(),
                                on_path_value: values[s],
                                deviation_value: values[d],
                                gap,
                            });
                        }
                    }
                }
            };
            match kind {
                Kind::BayesNash => {
                    let cond = prior.unwrap().conditional(i, task.ty)?;
                    scan(OppView::Types(&cond), &|| Opponents::Prior);
                }
                Kind::Dominant => {
                    for k in 0..m.signal_space().without(i).size() {
                        scan(OppView::Pure(k), &|| Opponents::Pure(k));
                    }
                }
                Kind::BeliefDominant => {
                    for g in &beliefs[i] {
                        scan(OppView::Signals(g), &|| Opponents::Belief(g.clone()));
                    }
                }
            }
            Ok(found)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_task {
        all.extend(r?);
    }
    Ok(all)
}

fn all_players(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Allocation lottery for a player holding `msg`, of type `ty`, sending `signal`,
/// with prior-conditional beliefs about opponents.
#[allow(clippy::too_many_arguments)]
pub fn induced_belief_mediated<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    prior: &Prior<T>,
    tau: &MediatedStrategy<T>,
    player: usize,
    msg: usize,
    ty: usize,
    signal: usize,
) -> Result<Vec<T>> {
    check_compat(m, env, tau)?;
    if !(m.message_marginal(player, msg) > Tolerances::<T>::default().support) {
        return Err(domain(format!(
            "message {msg} of player {player} has zero probability"
        )));
    }
    let cond = prior.conditional(player, ty)?;
    Ok(alloc_lottery(
        m,
        tau,
        &env.type_space(),
        player,
        msg,
        OppView::Types(&cond),
        signal,
    ))
}

pub fn is_bayes_nash_mediated<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    prior: &Prior<T>,
    tau: &MediatedStrategy<T>,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    let w = run_checks(
        m,
        env,
        Some(prior),
        tau,
        Kind::BayesNash,
        None,
        &all_players(env.n_players()),
        tol,
    )?;
    Ok(EquilibriumReport::exact(w))
}

pub fn is_dominant_mediated<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    tau: &MediatedStrategy<T>,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    let w = run_checks(
        m,
        env,
        None,
        tau,
        Kind::Dominant,
        None,
        &all_players(env.n_players()),
        tol,
    )?;
    Ok(EquilibriumReport::exact(w))
}

pub fn check_belief_dominant_mediated<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    tau: &MediatedStrategy<T>,
    candidates: &BeliefCandidates<T>,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    let w = run_checks(
        m,
        env,
        None,
        tau,
        Kind::BeliefDominant,
        Some(candidates),
        &all_players(env.n_players()),
        tol,
    )?;
    Ok(EquilibriumReport::refuter(w))
}

/// Single-player variants used by the incentive-compatibility predicates.
pub(crate) fn check_player<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    tau: &MediatedStrategy<T>,
    kind: crate::revelation::EquilibriumKind,
    candidates: &BeliefCandidates<T>,
    player: usize,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    use crate::revelation::EquilibriumKind as K;
    let players = [player];
    Ok(match kind {
        K::BayesNash => {
            let prior = prior.ok_or_else(|| invalid("Bayes-Nash check needs a prior"))?;
            EquilibriumReport::exact(run_checks(
                m,
                env,
                Some(prior),
                tau,
                Kind::BayesNash,
                None,
                &players,
                tol,
            )?)
        }
        K::Dominant => EquilibriumReport::exact(run_checks(
            m,
            env,
            None,
            tau,
            Kind::Dominant,
            None,
            &players,
            tol,
        )?),
        K::BeliefDominant => EquilibriumReport::refuter(run_checks(
            m,
            env,
            None,
            tau,
            Kind::BeliefDominant,
            Some(candidates),
            &players,
            tol,
        )?),
    })
}

/// Allocation choice function induced by a strategy profile.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedAcf<T> {
    pub acf: Acf<T>,
    /// Rows outside the prior's support: computed, but not constrained by implementation.
    pub unconstrained: Vec<bool>,
}

pub fn induced_acf_mediated<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    tau: &MediatedStrategy<T>,
) -> Result<InducedAcf<T>> {
    check_compat(m, env, tau)?;
    let types = env.type_space();
    let signals = m.signal_space();
    let contexts = m.contexts();
    let rows: Vec<Vec<T>> = (0..types.size())
        .into_par_iter()
        .map(|tk| {
            let theta = types.decode(tk);
            let mut out = vec![T::zero(); m.n_allocations()];
            for &(w, ctx) in &contexts {
                let dists: Vec<&[T]> = (0..m.n_players())
                    .map(|i| tau.dist(i, m.context_message(ctx, i), theta[i]))
                    .collect();
                for sk in 0..signals.size() {
                    let mut p = w;
                    for (i, d) in dists.iter().enumerate() {
                        p = p * d[signals.coord(sk, i)];
                        if p == T::zero() {
                            break;
                        }
                    }
                    if p == T::zero() {
                        continue;
                    }
                    for (o, &h) in out.iter_mut().zip(m.h_row(ctx, sk)) {
                        *o = *o + p * h;
                    }
                }
            }
            out
        })
        .collect();
    let unconstrained = (0..types.size())
        .map(|tk| prior.is_some_and(|p| !p.in_support(tk)))
        .collect();
    Ok(InducedAcf {
        acf: Acf { space: types, rows },
        unconstrained,
    })
}
