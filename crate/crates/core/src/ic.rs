//! Incentive compatibility of allocation choice functions, convex
//! representations, and coupling of per-player representations.

use crate::dist::{max_abs_diff, uniform, ProfileSpace};
use crate::environment::{Acf, Environment, Prior};
use crate::error::{dimension, domain, Error, Result};
use crate::mechanism::{BeliefCandidates, Mechanism, Strategy};
use crate::mediated::{
    check_player, induced_acf_mediated, is_bayes_nash_mediated, truthful_mediated_strategy,
    MediatedForm, MediatedMechanism, MessageProfile, PubliclyMediatedMechanism,
};
use crate::numerics::lp::{lp_feasible, LinearFeasibilityProblem, LpOutcome};
use crate::report::EquilibriumReport;
use crate::revelation::EquilibriumKind;
use crate::scalar::{Scalar, Tolerances};

/// Truthful reporting for `player` under the check of the given kind.
/// Bayes-Nash needs a prior; the others ignore it.
pub fn check_ic<T: Scalar>(
    pi: &Acf<T>,
    player: usize,
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    kind: EquilibriumKind,
    candidates: &BeliefCandidates<T>,
    tol: &Tolerances<T>,
) -> Result<EquilibriumReport<T>> {
    if player >= env.n_players() {
        return Err(dimension(format!("player {player} out of range")));
    }
    let mech = Mechanism::direct(env, pi)?;
    let tau = Strategy::truthful(env).to_mediated();
    Ok(check_player(&mech, env, prior, &tau, kind, candidates, player, tol)?.strip_messages())
}

fn ic_check<T: Scalar>(
    pi: &Acf<T>,
    player: usize,
    env: &Environment<T>,
    prior: Option<&Prior<T>>,
    kind: EquilibriumKind,
    candidates: &BeliefCandidates<T>,
) -> Result<EquilibriumReport<T>> {
    check_ic(
        pi,
        player,
        env,
        prior,
        kind,
        candidates,
        &Tolerances::default(),
    )
}

/// Truthful reporting is a best response for `player` under `prior`, opponents truthful.
pub fn is_f_incentive_compatible<T: Scalar>(
    pi: &Acf<T>,
    player: usize,
    env: &Environment<T>,
    prior: &Prior<T>,
) -> Result<EquilibriumReport<T>> {
    ic_check(
        pi,
        player,
        env,
        Some(prior),
        EquilibriumKind::BayesNash,
        &BeliefCandidates::default(),
    )
}

/// Truthful reporting is optimal against every opponent type profile.
pub fn is_dominant_ic<T: Scalar>(
    pi: &Acf<T>,
    player: usize,
    env: &Environment<T>,
) -> Result<EquilibriumReport<T>> {
    ic_check(
        pi,
        player,
        env,
        None,
        EquilibriumKind::Dominant,
        &BeliefCandidates::default(),
    )
}

/// Refuter: searches candidate beliefs over opponent types for a profitable misreport.
pub fn check_belief_dominant_ic<T: Scalar>(
    pi: &Acf<T>,
    player: usize,
    env: &Environment<T>,
    candidates: &BeliefCandidates<T>,
) -> Result<EquilibriumReport<T>> {
    ic_check(
        pi,
        player,
        env,
        None,
        EquilibriumKind::BeliefDominant,
        candidates,
    )
}

/// Per player, coefficients and component choice functions whose mixture is `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexRepresentation<T> {
    pub per_player: Vec<Vec<(T, Acf<T>)>>,
}

impl<T: Scalar> ConvexRepresentation<T> {
    pub fn n_players(&self) -> usize {
        self.per_player.len()
    }

    /// Component counts per player.
    pub fn dims(&self) -> Vec<usize> {
        self.per_player.iter().map(|p| p.len()).collect()
    }

    /// Checks coefficients and that every player's mixture equals `f`.
    pub fn validate(&self, f: &Acf<T>) -> Result<()> {
        let tol = T::tol(1e-9);
        for (i, comps) in self.per_player.iter().enumerate() {
            if comps.is_empty() {
                return Err(domain(format!("player {i} has no components")));
            }
            let coeffs: Vec<T> = comps.iter().map(|(a, _)| *a).collect();
            crate::dist::check_dist(&coeffs, tol, &format!("coefficients of player {i}"))?;
            for (m, (_, g)) in comps.iter().enumerate() {
                if g.space != f.space
                    || g.rows.first().map(|r| r.len()) != f.rows.first().map(|r| r.len())
                {
                    return Err(dimension(format!(
                        "component {m} of player {i} has a different shape from f"
                    )));
                }
            }
            let mix = mixture(comps);
            for (k, (a, b)) in mix.iter().zip(&f.rows).enumerate() {
                if max_abs_diff(a, b) > tol {
                    return Err(domain(format!(
                        "representation of player {i} does not reproduce f at profile {:?}",
                        f.space.decode(k)
                    )));
                }
            }
        }
        Ok(())
    }
}

fn mixture<T: Scalar>(comps: &[(T, Acf<T>)]) -> Vec<Vec<T>> {
    let rows = comps[0].1.rows.len();
    let width = comps[0].1.rows[0].len();
    let mut out = vec![vec![T::zero(); width]; rows];
    for (a, g) in comps {
        for (o, r) in out.iter_mut().zip(&g.rows) {
            for (x, &y) in o.iter_mut().zip(r) {
                *x = *x + *a * y;
            }
        }
    }
    out
}

fn describe_witness<T: Scalar>(env: &Environment<T>, r: &EquilibriumReport<T>) -> String {
    match r.witnesses.first() {
        Some(w) => format!(
            "player {} of type {} gains {} by reporting {}",
            w.player,
            env.type_sets[w.player][w.ty].label,
            w.gap,
            env.type_sets[w.player][w.deviation].label
        ),
        None => "no witness".into(),
    }
}

/// Direct publicly mediated mechanism drawing component `m` with probability `a^m`.
pub fn build_public_mediated_from_convex<T: Scalar>(
    f: &Acf<T>,
    components: &[(T, Acf<T>)],
    env: &Environment<T>,
    prior: &Prior<T>,
) -> Result<PubliclyMediatedMechanism<T>> {
    if components.is_empty() {
        return Err(domain("no components"));
    }
    ConvexRepresentation {
        per_player: vec![components.to_vec()],
    }
    .validate(f)?;
    for (m, (_, g)) in components.iter().enumerate() {
        for i in 0..env.n_players() {
            let r = is_f_incentive_compatible(g, i, env, prior)?;
            if !r.is_ok() {
                return Err(Error::Precondition(format!(
                    "component {m} is not incentive compatible: {}",
                    describe_witness(env, &r)
                )));
            }
        }
    }
    let labels = env
        .type_sets
        .iter()
        .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
        .collect();
    let mech = PubliclyMediatedMechanism::new(
        (0..components.len()).map(|m| format!("m{m}")).collect(),
        components.iter().map(|(a, _)| *a).collect(),
        labels,
        components.iter().map(|(_, g)| g.rows.clone()).collect(),
    )?;
    verify_truthful(&mech, env, prior, f)?;
    Ok(mech)
}

fn verify_truthful<T: Scalar, M: MediatedForm<T>>(
    m: &M,
    env: &Environment<T>,
    prior: &Prior<T>,
    f: &Acf<T>,
) -> Result<()> {
    let tau = truthful_mediated_strategy(env, m)?;
    let r = is_bayes_nash_mediated(m, env, prior, &tau, &Tolerances::default())?;
    if !r.is_ok() {
        return Err(Error::Precondition(format!(
            "truthful play is not Bayes-Nash: {}",
            describe_witness(env, &r)
        )));
    }
    let induced = induced_acf_mediated(m, env, Some(prior), &tau)?;
    let d = induced.acf.max_abs_diff(f);
    if d > T::tol(1e-9) {
        return Err(Error::Precondition(format!(
            "induced choice function differs from f by {d}"
        )));
    }
    Ok(())
}

/// Nonnegative table over component profiles `m = (m_1, .., m_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix<T> {
    pub space: ProfileSpace,
    pub a: Vec<T>,
}

impl<T: Scalar> CouplingMatrix<T> {
    pub fn get(&self, m: &[usize]) -> T {
        self.a[self.space.encode(m)]
    }

    /// Sum over all other coordinates, for each component of `player`.
    pub fn marginal(&self, player: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.space.dims()[player]];
        for (k, &x) in self.a.iter().enumerate() {
            let m = self.space.coord(k, player);
            out[m] = out[m] + x;
        }
        out
    }

    /// Product of the coefficient vectors.
    pub fn product(rep: &ConvexRepresentation<T>) -> Self {
        let space = ProfileSpace::new(rep.dims());
        let a = (0..space.size())
            .map(|k| {
                (0..space.len()).fold(T::one(), |acc, i| {
                    acc * rep.per_player[i][space.coord(k, i)].0
                })
            })
            .collect();
        CouplingMatrix { space, a }
    }
}

/// `kernel[m]` is a distribution over allocations for component profile `m`.
pub type Kernel<T> = Vec<Vec<T>>;

/// Largest violation of the marginal and kernel equations at profile `theta`.
pub fn coupling_residual<T: Scalar>(
    abar: &CouplingMatrix<T>,
    kernel: &Kernel<T>,
    theta: usize,
    rep: &ConvexRepresentation<T>,
) -> T {
    let space = &abar.space;
    let width = kernel.first().map_or(0, |r| r.len());
    let mut worst = T::zero();
    for (i, comps) in rep.per_player.iter().enumerate() {
        let marg = abar.marginal(i);
        for (mi, (coef, g)) in comps.iter().enumerate() {
            worst = worst.max((marg[mi] - *coef).abs());
            let mut lhs = vec![T::zero(); width];
            for k in 0..space.size() {
                if space.coord(k, i) != mi {
                    continue;
                }
                for (x, &y) in lhs.iter_mut().zip(&kernel[k]) {
                    *x = *x + abar.a[k] * y;
                }
            }
            for (x, &y) in lhs.iter().zip(&g.rows[theta]) {
                worst = worst.max((*x - *coef * y).abs());
            }
        }
    }
    worst
}

/// The coupling built from `xi(m, alpha) = prod_i a_i f_i(alpha) / f(alpha)^(n-1)`.
pub fn canonical_coupling<T: Scalar>(
    theta: usize,
    rep: &ConvexRepresentation<T>,
    f: &Acf<T>,
) -> Result<(CouplingMatrix<T>, Kernel<T>)> {
    rep.validate(f)?;
    if theta >= f.space.size() {
        return Err(dimension(format!(
            "type profile index {theta} out of range"
        )));
    }
    let n = rep.n_players();
    let space = ProfileSpace::new(rep.dims());
    let frow = &f.rows[theta];
    let width = frow.len();
    let support = Tolerances::<T>::default().support;
    let mut a = Vec::with_capacity(space.size());
    let mut kernel = Vec::with_capacity(space.size());
    for k in 0..space.size() {
        let xi: Vec<T> = (0..width)
            .map(|alpha| {
                if !(frow[alpha] > support) {
                    return T::zero();
                }
                let num = (0..n).fold(T::one(), |acc, i| {
                    let (c, g) = &rep.per_player[i][space.coord(k, i)];
                    acc * *c * g.rows[theta][alpha]
                });
                num / frow[alpha].powi(n as i32 - 1)
            })
            .collect();
        let total: T = xi.iter().copied().sum();
        a.push(total);
        kernel.push(if total > T::zero() {
            xi.iter().map(|&x| x / total).collect()
        } else {
            uniform(width)
        });
    }
    Ok((CouplingMatrix { space, a }, kernel))
}

/// Outcome of the two-player necessary-and-sufficient inequality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchellReport {
    /// Row and column sums of the matrix match the coefficients, and both
    /// representations reproduce `f` at the profile.
    pub marginals: bool,
    /// Covering inequalities for player 2 components, player 1 components, and matrix cells.
    pub families: [bool; 3],
}

impl SchellReport {
    pub fn feasible(&self) -> bool {
        self.marginals && self.families.iter().all(|&b| b)
    }
}

pub fn schell_feasible<T: Scalar>(
    abar: &CouplingMatrix<T>,
    theta: usize,
    rep: &ConvexRepresentation<T>,
    f: &Acf<T>,
) -> Result<SchellReport> {
    if rep.n_players() != 2 {
        return Err(Error::Unsupported(format!(
            "inequality test needs exactly two players, got {}",
            rep.n_players()
        )));
    }
    if abar.space.dims() != rep.dims().as_slice() {
        return Err(dimension(
            "coupling matrix shape differs from the representation",
        ));
    }
    let tol = T::tol(1e-9);
    let (r1, r2) = (&rep.per_player[0], &rep.per_player[1]);
    let width = f.rows[theta].len();
    let p1 = |m1: usize, alpha: usize| r1[m1].0 * r1[m1].1.rows[theta][alpha];
    let p2 = |m2: usize, alpha: usize| r2[m2].0 * r2[m2].1.rows[theta][alpha];

    let mut marginals = true;
    for (i, comps) in rep.per_player.iter().enumerate() {
        let marg = abar.marginal(i);
        marginals &= comps
            .iter()
            .zip(&marg)
            .all(|((c, _), &m)| (*c - m).abs() <= tol);
    }
    for alpha in 0..width {
        let s1: T = (0..r1.len()).map(|m| p1(m, alpha)).sum();
        let s2: T = (0..r2.len()).map(|m| p2(m, alpha)).sum();
        marginals &=
            (s1 - f.rows[theta][alpha]).abs() <= tol && (s2 - f.rows[theta][alpha]).abs() <= tol;
    }

    let kappa = |alpha: usize, m1: usize, m2: usize| {
        abar.get(&[m1, m2]).min(p1(m1, alpha)).min(p2(m2, alpha))
    };
    let mut families = [true; 3];
    for alpha in 0..width {
        for m2 in 0..r2.len() {
            let s: T = (0..r1.len()).map(|m1| kappa(alpha, m1, m2)).sum();
            families[0] &= s >= p2(m2, alpha) - tol;
        }
        for m1 in 0..r1.len() {
            let s: T = (0..r2.len()).map(|m2| kappa(alpha, m1, m2)).sum();
            families[1] &= s >= p1(m1, alpha) - tol;
        }
    }
    for m1 in 0..r1.len() {
        for m2 in 0..r2.len() {
            let s: T = (0..width).map(|alpha| kappa(alpha, m1, m2)).sum();
            families[2] &= s >= abar.get(&[m1, m2]) - tol;
        }
    }
    Ok(SchellReport {
        marginals,
        families,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum CouplingOutcome<T> {
    /// A matrix that is a coupling at every profile, with its kernels `kernels[theta][m]`.
    Found {
        abar: CouplingMatrix<T>,
        kernels: Vec<Kernel<T>>,
    },
    Infeasible {
        phase1_optimum: T,
    },
    Indeterminate {
        phase1_optimum: T,
        residual: T,
    },
}

impl<T> CouplingOutcome<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, CouplingOutcome::Found { .. })
    }
    pub fn is_infeasible(&self) -> bool {
        matches!(self, CouplingOutcome::Infeasible { .. })
    }
}

/// Solves for `B(m, theta, alpha) >= 0` whose per-player sums reproduce
/// `a_i f_i(alpha | theta)` and whose mass per `m` is the same at every profile.
pub fn common_coupling_exists<T: Scalar>(
    rep: &ConvexRepresentation<T>,
    f: &Acf<T>,
) -> Result<CouplingOutcome<T>> {
    rep.validate(f)?;
    let space = ProfileSpace::new(rep.dims());
    let n_theta = f.space.size();
    let width = f.rows.first().map_or(0, |r| r.len());
    let n_m = space.size();
    let var = |m: usize, theta: usize, alpha: usize| (m * n_theta + theta) * width + alpha;
    let n_vars = n_m * n_theta * width;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, comps) in rep.per_player.iter().enumerate() {
        for (mi, (coef, g)) in comps.iter().enumerate() {
            for theta in 0..n_theta {
                for alpha in 0..width {
                    let mut row = vec![T::zero(); n_vars];
                    for m in 0..n_m {
                        if space.coord(m, i) == mi {
                            row[var(m, theta, alpha)] = T::one();
                        }
                    }
                    a.push(row);
                    b.push(*coef * g.rows[theta][alpha]);
                }
            }
        }
    }
    for m in 0..n_m {
        for theta in 1..n_theta {
            let mut row = vec![T::zero(); n_vars];
            for alpha in 0..width {
                row[var(m, theta, alpha)] = T::one();
                row[var(m, 0, alpha)] = -T::one();
            }
            a.push(row);
            b.push(T::zero());
        }
    }
    Ok(match lp_feasible(&LinearFeasibilityProblem::new(a, b)?)? {
        LpOutcome::Feasible(x) => {
            let abar: Vec<T> = (0..n_m)
                .map(|m| (0..width).map(|alpha| x[var(m, 0, alpha)]).sum())
                .collect();
            let kernels = (0..n_theta)
                .map(|theta| {
                    (0..n_m)
                        .map(|m| {
                            if abar[m] > T::zero() {
                                let row: Vec<T> =
                                    (0..width).map(|alpha| x[var(m, theta, alpha)]).collect();
                                let s: T = row.iter().copied().sum();
                                row.iter().map(|&v| v / s).collect()
                            } else {
                                uniform(width)
                            }
                        })
                        .collect()
                })
                .collect();
            CouplingOutcome::Found {
                abar: CouplingMatrix { space, a: abar },
                kernels,
            }
        }
        LpOutcome::Infeasible { phase1_optimum } => CouplingOutcome::Infeasible { phase1_optimum },
        LpOutcome::Indeterminate {
            phase1_optimum,
            residual,
        } => CouplingOutcome::Indeterminate {
            phase1_optimum,
            residual,
        },
    })
}

/// Product-mediator mechanism with rule `(1 - n) f + sum_i f_i^{m_i}`.
pub fn h_n_sufficiency<T: Scalar>(
    f: &Acf<T>,
    rep: &ConvexRepresentation<T>,
    env: &Environment<T>,
    prior: &Prior<T>,
) -> Result<MediatedMechanism<T>> {
    rep.validate(f)?;
    let n = env.n_players();
    if rep.n_players() != n {
        return Err(dimension("one representation per player required"));
    }
    let nn = T::lit(n as f64);
    let one_minus_n = T::one() - nn;
    let lo = -T::tol(1e-12);
    let hi = T::one() + T::tol(1e-12);
    for (i, comps) in rep.per_player.iter().enumerate() {
        for (mi, (_, g)) in comps.iter().enumerate() {
            for (k, (r, fr)) in g.rows.iter().zip(&f.rows).enumerate() {
                let row: Vec<T> = r
                    .iter()
                    .zip(fr)
                    .map(|(&p, &q)| nn * p + one_minus_n * q)
                    .collect();
                let sum: T = row.iter().copied().sum();
                if row.iter().any(|&x| x < lo || x > hi) || (sum - T::one()).abs() > T::tol(1e-9) {
                    return Err(Error::Precondition(format!(
                        "component {mi} of player {i} leaves the admissible set at profile {:?}",
                        f.space.decode(k)
                    )));
                }
            }
            let r = is_f_incentive_compatible(g, i, env, prior)?;
            if !r.is_ok() {
                return Err(Error::Precondition(format!(
                    "component {mi} of player {i} is not incentive compatible: {}",
                    describe_witness(env, &r)
                )));
            }
        }
    }
    let space = ProfileSpace::new(rep.dims());
    let profiles = (0..space.size())
        .map(|k| {
            let m = space.decode(k);
            let prob = (0..n).fold(T::one(), |acc, i| acc * rep.per_player[i][m[i]].0);
            let h = f
                .rows
                .iter()
                .enumerate()
                .map(|(t, fr)| {
                    let row: Vec<T> = fr
                        .iter()
                        .enumerate()
                        .map(|(alpha, &q)| {
                            let s: T = (0..n)
                                .map(|i| rep.per_player[i][m[i]].1.rows[t][alpha])
                                .sum();
                            (one_minus_n * q + s).max(T::zero())
                        })
                        .collect();
                    crate::dist::normalized(&row)
                })
                .collect();
            MessageProfile {
                messages: m,
                prob,
                h,
            }
        })
        .collect();
    let labels: Vec<Vec<String>> = env
        .type_sets
        .iter()
        .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
        .collect();
    let messages = rep
        .per_player
        .iter()
        .map(|c| (0..c.len()).map(|m| format!("m{m}")).collect())
        .collect();
    let mech = MediatedMechanism::new(messages, labels, profiles)?;
    verify_truthful(&mech, env, prior, f)?;
    Ok(mech)
}

/// `eta_i(alpha | phi_i, theta) = sum_{phi_-i} D(phi_-i | phi_i) h(alpha | phi, theta)`, per type profile.
pub fn eta<T: Scalar>(m: &MediatedMechanism<T>, player: usize, msg: usize) -> Result<Vec<Vec<T>>> {
    let cond = m.contexts_given(player, msg);
    if cond.is_empty() {
        return Err(domain(format!(
            "message {msg} of player {player} has zero probability"
        )));
    }
    let width = m.n_allocations();
    let rows = m.signal_space().size();
    let mut out = vec![vec![T::zero(); width]; rows];
    for (w, ctx) in cond {
        for (s, o) in out.iter_mut().enumerate() {
            for (x, &y) in o.iter_mut().zip(m.h_row(ctx, s)) {
                *x = *x + w * y;
            }
        }
    }
    Ok(out)
}

/// Folds message `phi_tilde` of `player` into `phi`.
///
/// Both messages must have positive probability and the same `eta`. Where the
/// merged profile has zero probability the rule is uniform over allocations.
pub fn merge_messages<T: Scalar>(
    m: &MediatedMechanism<T>,
    player: usize,
    phi: usize,
    phi_tilde: usize,
) -> Result<MediatedMechanism<T>> {
    if player >= m.message_sets.len()
        || phi >= m.message_sets[player].len()
        || phi_tilde >= m.message_sets[player].len()
    {
        return Err(dimension("player or message out of range"));
    }
    if phi == phi_tilde {
        return Err(domain("cannot merge a message with itself"));
    }
    let e1 = eta(m, player, phi).map_err(|e| Error::Precondition(e.to_string()))?;
    let e2 = eta(m, player, phi_tilde).map_err(|e| Error::Precondition(e.to_string()))?;
    let d = e1
        .iter()
        .zip(&e2)
        .fold(T::zero(), |acc, (a, b)| acc.max(max_abs_diff(a, b)));
    if d > T::tol(1e-9) {
        return Err(Error::Precondition(format!(
            "messages {} and {} of player {player} differ in eta by {d}",
            m.message_sets[player][phi], m.message_sets[player][phi_tilde]
        )));
    }
    let remap = |x: usize| -> usize {
        let x = if x == phi_tilde { phi } else { x };
        if x > phi_tilde {
            x - 1
        } else {
            x
        }
    };
    let width = m.n_allocations();
    let mut merged: Vec<(Vec<usize>, T, Vec<Vec<T>>)> = Vec::new();
    for p in &m.profiles {
        let mut key = p.messages.clone();
        key[player] = remap(key[player]);
        let weighted: Vec<Vec<T>> =
            p.h.iter()
                .map(|r| r.iter().map(|&x| p.prob * x).collect())
                .collect();
        match merged.iter_mut().find(|(k, _, _)| *k == key) {
            Some((_, prob, h)) => {
                *prob = *prob + p.prob;
                for (a, b) in h.iter_mut().zip(&weighted) {
                    for (x, &y) in a.iter_mut().zip(b) {
                        *x = *x + y;
                    }
                }
            }
            None => merged.push((key, p.prob, weighted)),
        }
    }
    let profiles = merged
        .into_iter()
        .map(|(messages, prob, h)| {
            let h = if prob > T::zero() {
                h.iter()
                    .map(|r| r.iter().map(|&x| x / prob).collect())
                    .collect()
            } else {
                vec![uniform(width); h.len()]
            };
            MessageProfile { messages, prob, h }
        })
        .collect();
    let mut message_sets = m.message_sets.clone();
    message_sets[player].remove(phi_tilde);
    MediatedMechanism::new(message_sets, m.signal_sets.clone(), profiles)
}

/// For a single player, a convex combination of incentive-compatible members of
/// `family` equal to `f`, using at most one component per LP row.
pub fn caratheodory_decompose_n1<T: Scalar>(
    f: &Acf<T>,
    family: &[Acf<T>],
    env: &Environment<T>,
    prior: &Prior<T>,
) -> Result<Option<ConvexRepresentation<T>>> {
    if env.n_players() != 1 {
        return Err(Error::Unsupported(format!(
            "needs one player, got {}",
            env.n_players()
        )));
    }
    let mut ic = Vec::new();
    for g in family {
        if g.space != f.space {
            return Err(dimension("family member has a different type space"));
        }
        if is_f_incentive_compatible(g, 0, env, prior)?.is_ok() {
            ic.push(g);
        }
    }
    if ic.is_empty() {
        return Ok(None);
    }
    let width = f.rows.first().map_or(0, |r| r.len());
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (t, fr) in f.rows.iter().enumerate() {
        for (alpha, &q) in fr.iter().enumerate().take(width) {
            a.push(ic.iter().map(|g| g.rows[t][alpha]).collect());
            b.push(q);
        }
    }
    match lp_feasible(&LinearFeasibilityProblem::new(a, b)?)? {
        LpOutcome::Feasible(x) => {
            let support = Tolerances::<T>::default().support;
            let comps: Vec<(T, Acf<T>)> = x
                .iter()
                .zip(&ic)
                .filter(|(&c, _)| c > support)
                .map(|(&c, g)| (c, (*g).clone()))
                .collect();
            let total: T = comps.iter().map(|(c, _)| *c).sum();
            let comps = comps.into_iter().map(|(c, g)| (c / total, g)).collect();
            Ok(Some(ConvexRepresentation {
                per_player: vec![comps],
            }))
        }
        LpOutcome::Infeasible { .. } => Ok(None),
        other => Err(domain(format!(
            "decomposition undecided: {}",
            other.describe()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn printed_tables_have_no_common_coupling() {
        let ex = catalog::coupling_gap::<f64>();
        assert!(common_coupling_exists(&ex.rep, &ex.f)
            .unwrap()
            .is_infeasible());
    }

    #[test]
    fn canonical_coupling_solves_its_equations() {
        let ex = catalog::coupling_gap::<f64>();
        for theta in 0..2 {
            let (abar, k) = canonical_coupling(theta, &ex.rep, &ex.f).unwrap();
            assert!(coupling_residual(&abar, &k, theta, &ex.rep) < 1e-9);
            assert!(schell_feasible(&abar, theta, &ex.rep, &ex.f)
                .unwrap()
                .feasible());
        }
    }

    #[test]
    fn product_matrix_at_lt() {
        let ex = catalog::coupling_gap::<f64>();
        let abar = CouplingMatrix::product(&ex.rep);
        let r = schell_feasible(&abar, 0, &ex.rep, &ex.f).unwrap();
        assert_eq!(r.families, [true, true, true]);
    }

    #[test]
    fn concentrated_matrix_fails_marginals() {
        let ex = catalog::coupling_gap::<f64>();
        let abar = CouplingMatrix {
            space: ProfileSpace::new(vec![2, 2]),
            a: vec![1.0, 0.0, 0.0, 0.0],
        };
        assert!(!schell_feasible(&abar, 0, &ex.rep, &ex.f)
            .unwrap()
            .feasible());
    }

    #[test]
    fn constant_rule_is_ic() {
        let ex = catalog::three_type_market::<f64>();
        let pi = Acf::constant(ex.env.type_space(), vec![0.2, 0.3, 0.5]);
        assert!(is_f_incentive_compatible(&pi, 0, &ex.env, &ex.prior)
            .unwrap()
            .is_ok());
        assert!(is_dominant_ic(&pi, 1, &ex.env).unwrap().is_ok());
    }

    #[test]
    fn dominant_ic_fails_for_player_choice_rule() {
        let ex = catalog::dominant_direct_gap::<f64>();
        let r = is_dominant_ic(&ex.f, 0, &ex.env).unwrap();
        assert!(!r.is_ok());
        let w = &r.witnesses[0];
        assert_eq!((w.ty, w.deviation), (0, 1));
    }
}
