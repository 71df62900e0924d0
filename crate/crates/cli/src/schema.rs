//! JSON file formats and their conversion to and from the library types.
//!
//! Everything is keyed by label. Distributions list only their nonzero entries
//! on output; missing entries read as zero.

use std::path::Path;

use cpt_mechlab::cpt::{CptType, WeightingFunction};
use cpt_mechlab::dist::ProfileSpace;
use cpt_mechlab::environment::{Acf, Environment, Prior};
use cpt_mechlab::ic::ConvexRepresentation;
use cpt_mechlab::mechanism::{Mechanism, Strategy};
use cpt_mechlab::mediated::{
    MediatedMechanism, MediatedStrategy, MessageProfile, PubliclyMediatedMechanism,
};
use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Dist = IndexMap<String, f64>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightingJson {
    Linear,
    Piecewise { points: Vec<[f64; 2]> },
    Prelec { alpha: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeJson {
    pub label: String,
    pub values: IndexMap<String, f64>,
    pub w_gain: WeightingJson,
    pub w_loss: WeightingJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub prob: f64,
    pub outcomes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentJson {
    pub players: usize,
    pub type_sets: Vec<Vec<TypeJson>>,
    pub allocations: Vec<String>,
    pub outcome_sets: Vec<Vec<String>>,
    pub zeta: IndexMap<String, Vec<AtomJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorEntry {
    pub types: Vec<String>,
    pub prob: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorJson {
    pub entries: Vec<PriorEntry>,
}

/// One row of an allocation rule, keyed by signal (or type) labels.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleRow {
    #[serde(alias = "types")]
    pub signals: Vec<String>,
    pub alloc: Dist,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub messages: Vec<String>,
    pub prob: f64,
    pub rule: Vec<RuleRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicMessageJson {
    pub label: String,
    pub prob: f64,
    pub rule: Vec<RuleRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MechanismJson {
    Plain {
        signal_sets: Vec<Vec<String>>,
        rule: Vec<RuleRow>,
    },
    Mediated {
        message_sets: Vec<Vec<String>>,
        signal_sets: Vec<Vec<String>>,
        profiles: Vec<ProfileJson>,
    },
    Public {
        signal_sets: Vec<Vec<String>>,
        messages: Vec<PublicMessageJson>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StrategyJson {
    /// `players[i][type][signal]`
    Plain {
        players: Vec<IndexMap<String, Dist>>,
    },
    /// `players[i][message][type][signal]`
    Mediated {
        players: Vec<IndexMap<String, IndexMap<String, Dist>>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleJson {
    pub rule: Vec<RuleRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub weight: f64,
    pub rule: Vec<RuleRow>,
}

/// A rule together with one convex representation of it per player.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationJson {
    pub type_sets: Vec<Vec<String>>,
    pub allocations: Vec<String>,
    pub rule: Vec<RuleRow>,
    pub components: Vec<Vec<ComponentJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LotteryEntry {
    pub outcome: String,
    pub prob: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LotteryJson {
    pub entries: Vec<LotteryEntry>,
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::input(path, "", e.to_string()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        CliError::input(
            path,
            if at == "." { "" } else { &at },
            e.into_inner().to_string(),
        )
    })
}

/// Conversion errors carry a JSON path relative to the file root.
pub struct Bad {
    pub path: String,
    pub reason: String,
}

fn bad(path: impl Into<String>, reason: impl Into<String>) -> Bad {
    Bad {
        path: path.into(),
        reason: reason.into(),
    }
}

fn lib(path: &str) -> impl Fn(cpt_mechlab::Error) -> Bad + '_ {
    move |e| bad(path, e.to_string())
}

pub fn attach(file: &Path) -> impl Fn(Bad) -> CliError + '_ {
    move |b| CliError::input(file, &b.path, b.reason)
}

fn index_of(labels: &[String], label: &str, path: &str, what: &str) -> Result<usize, Bad> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| bad(path, format!("unknown {what} {label:?}")))
}

fn check_unique(labels: &[String], path: &str) -> Result<(), Bad> {
    for (k, l) in labels.iter().enumerate() {
        if labels[..k].contains(l) {
            return Err(bad(
                format!("{path}[{k}]"),
                format!("duplicate label {l:?}"),
            ));
        }
    }
    Ok(())
}

/// Dense vector from a label-keyed distribution; absent labels are zero.
fn dense(d: &Dist, labels: &[String], path: &str, what: &str) -> Result<Vec<f64>, Bad> {
    let mut out = vec![0.0; labels.len()];
    for (l, &p) in d {
        let at = format!("{path}.{l}");
        if !p.is_finite() || p < 0.0 {
            return Err(bad(
                at,
                format!("probability {p} is not a nonnegative number"),
            ));
        }
        out[index_of(labels, l, &at, what)?] += p;
    }
    let s: f64 = out.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(bad(path, format!("probabilities sum to {s}")));
    }
    Ok(out)
}

fn sparse(p: &[f64], labels: &[String]) -> Dist {
    p.iter()
        .zip(labels)
        .filter(|(&x, _)| x != 0.0)
        .map(|(&x, l)| (l.clone(), x))
        .collect()
}

fn weighting(w: &WeightingJson, path: &str) -> Result<WeightingFunction<f64>, Bad> {
    match w {
        WeightingJson::Linear => Ok(WeightingFunction::Linear),
        WeightingJson::Piecewise { points } => {
            WeightingFunction::piecewise(points.iter().map(|p| (p[0], p[1])).collect())
                .map_err(lib(path))
        }
        WeightingJson::Prelec { alpha } => WeightingFunction::prelec(*alpha).map_err(lib(path)),
    }
}

fn weighting_json(w: &WeightingFunction<f64>) -> WeightingJson {
    match w {
        WeightingFunction::Linear => WeightingJson::Linear,
        WeightingFunction::PiecewiseLinear(pts) => WeightingJson::Piecewise {
            points: pts.iter().map(|&(p, w)| [p, w]).collect(),
        },
        WeightingFunction::Prelec(a) => WeightingJson::Prelec { alpha: *a },
    }
}

pub fn cpt_type(t: &TypeJson, outcomes: &[String], path: &str) -> Result<CptType<f64>, Bad> {
    let mut values = vec![None; outcomes.len()];
    for (o, &v) in &t.values {
        let at = format!("{path}.values.{o}");
        let k = index_of(outcomes, o, &at, "outcome")?;
        if !v.is_finite() {
            return Err(bad(at, "value is not finite"));
        }
        values[k] = Some(v);
    }
    let values = values
        .into_iter()
        .zip(outcomes)
        .map(|(v, o)| {
            v.ok_or_else(|| {
                bad(
                    format!("{path}.values"),
                    format!("no value for outcome {o:?}"),
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    CptType::new(
        t.label.clone(),
        values,
        weighting(&t.w_gain, &format!("{path}.w_gain"))?,
        weighting(&t.w_loss, &format!("{path}.w_loss"))?,
    )
    .map_err(lib(path))
}

pub fn type_json(t: &CptType<f64>, outcomes: &[String]) -> TypeJson {
    TypeJson {
        label: t.label.clone(),
        values: outcomes
            .iter()
            .zip(&t.value_fn.values)
            .map(|(o, &v)| (o.clone(), v))
            .collect(),
        w_gain: weighting_json(&t.weight_gain),
        w_loss: weighting_json(&t.weight_loss),
    }
}

pub fn environment(j: &EnvironmentJson) -> Result<Environment<f64>, Bad> {
    let n = j.players;
    if j.type_sets.len() != n {
        return Err(bad(
            "type_sets",
            format!("{} type sets for {n} players", j.type_sets.len()),
        ));
    }
    if j.outcome_sets.len() != n {
        return Err(bad(
            "outcome_sets",
            format!("{} outcome sets for {n} players", j.outcome_sets.len()),
        ));
    }
    check_unique(&j.allocations, "allocations")?;
    for (i, o) in j.outcome_sets.iter().enumerate() {
        check_unique(o, &format!("outcome_sets[{i}]"))?;
    }
    let mut type_sets = Vec::with_capacity(n);
    for (i, ts) in j.type_sets.iter().enumerate() {
        let labels: Vec<String> = ts.iter().map(|t| t.label.clone()).collect();
        check_unique(&labels, &format!("type_sets[{i}]"))?;
        type_sets.push(
            ts.iter()
                .enumerate()
                .map(|(k, t)| cpt_type(t, &j.outcome_sets[i], &format!("type_sets[{i}][{k}]")))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let mut zeta = vec![None; j.allocations.len()];
    for (a, atoms) in &j.zeta {
        let at = format!("zeta.{a}");
        let k = index_of(&j.allocations, a, &at, "allocation")?;
        let mut row = Vec::with_capacity(atoms.len());
        for (m, atom) in atoms.iter().enumerate() {
            let at = format!("{at}[{m}].outcomes");
            if atom.outcomes.len() != n {
                return Err(bad(
                    at,
                    format!("{} outcomes for {n} players", atom.outcomes.len()),
                ));
            }
            let idx = atom
                .outcomes
                .iter()
                .enumerate()
                .map(|(i, o)| index_of(&j.outcome_sets[i], o, &at, "outcome"))
                .collect::<Result<Vec<_>, _>>()?;
            row.push((atom.prob, idx));
        }
        zeta[k] = Some(row);
    }
    let zeta = zeta
        .into_iter()
        .zip(&j.allocations)
        .map(|(z, a)| {
            z.ok_or_else(|| {
                bad(
                    "zeta",
                    format!("no outcome distribution for allocation {a:?}"),
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Environment::new(
        type_sets,
        j.allocations.clone(),
        j.outcome_sets.clone(),
        zeta,
    )
    .map_err(lib(""))
}

pub fn environment_json(env: &Environment<f64>) -> EnvironmentJson {
    EnvironmentJson {
        players: env.n_players(),
        type_sets: env
            .type_sets
            .iter()
            .zip(&env.outcome_sets)
            .map(|(ts, o)| ts.iter().map(|t| type_json(t, o)).collect())
            .collect(),
        allocations: env.allocations.clone(),
        outcome_sets: env.outcome_sets.clone(),
        zeta: env
            .allocations
            .iter()
            .zip(&env.zeta)
            .map(|(a, atoms)| {
                let atoms = atoms
                    .iter()
                    .map(|(p, o)| AtomJson {
                        prob: *p,
                        outcomes: o
                            .iter()
                            .enumerate()
                            .map(|(i, &k)| env.outcome_sets[i][k].clone())
                            .collect(),
                    })
                    .collect();
                (a.clone(), atoms)
            })
            .collect(),
    }
}

pub fn type_labels(env: &Environment<f64>) -> Vec<Vec<String>> {
    env.type_sets
        .iter()
        .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
        .collect()
}

fn profile_index(
    labels: &[Vec<String>],
    key: &[String],
    path: &str,
    what: &str,
) -> Result<Vec<usize>, Bad> {
    if key.len() != labels.len() {
        return Err(bad(
            path,
            format!("{} labels for {} players", key.len(), labels.len()),
        ));
    }
    key.iter()
        .zip(labels)
        .map(|(k, l)| index_of(l, k, path, what))
        .collect()
}

pub fn prior(j: &PriorJson, env: &Environment<f64>) -> Result<Prior<f64>, Bad> {
    let labels = type_labels(env);
    let space = env.type_space();
    let mut probs = vec![0.0; space.size()];
    let mut seen = vec![false; space.size()];
    for (k, e) in j.entries.iter().enumerate() {
        let at = format!("entries[{k}]");
        let idx = space.encode(&profile_index(
            &labels,
            &e.types,
            &format!("{at}.types"),
            "type",
        )?);
        if seen[idx] {
            return Err(bad(at, "type profile listed twice"));
        }
        seen[idx] = true;
        if !e.prob.is_finite() || e.prob < 0.0 {
            return Err(bad(
                format!("{at}.prob"),
                format!("probability {} is not a nonnegative number", e.prob),
            ));
        }
        probs[idx] = e.prob;
    }
    Prior::new(space, probs).map_err(lib("entries"))
}

pub fn prior_json(p: &Prior<f64>, env: &Environment<f64>) -> PriorJson {
    let labels = type_labels(env);
    PriorJson {
        entries: p
            .probs
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(k, &prob)| PriorEntry {
                types: label_profile(&labels, &p.space.decode(k)),
                prob,
            })
            .collect(),
    }
}

fn label_profile(labels: &[Vec<String>], idx: &[usize]) -> Vec<String> {
    idx.iter()
        .enumerate()
        .map(|(i, &k)| labels[i][k].clone())
        .collect()
}

/// Dense rows over every profile of `labels`; every profile must appear once.
pub fn rule_rows(
    rows: &[RuleRow],
    labels: &[Vec<String>],
    allocations: &[String],
    path: &str,
) -> Result<Vec<Vec<f64>>, Bad> {
    let space = ProfileSpace::new(labels.iter().map(|l| l.len()).collect());
    let mut out: Vec<Option<Vec<f64>>> = vec![None; space.size()];
    for (k, r) in rows.iter().enumerate() {
        let at = format!("{path}[{k}]");
        let idx = space.encode(&profile_index(
            labels,
            &r.signals,
            &format!("{at}.signals"),
            "label",
        )?);
        if out[idx].is_some() {
            return Err(bad(at, "profile listed twice"));
        }
        out[idx] = Some(dense(
            &r.alloc,
            allocations,
            &format!("{at}.alloc"),
            "allocation",
        )?);
    }
    out.into_iter()
        .enumerate()
        .map(|(k, r)| {
            r.ok_or_else(|| {
                bad(
                    path,
                    format!(
                        "no row for profile {:?}",
                        label_profile(labels, &space.decode(k))
                    ),
                )
            })
        })
        .collect()
}

pub fn rule_json(
    rows: &[Vec<f64>],
    labels: &[Vec<String>],
    allocations: &[String],
) -> Vec<RuleRow> {
    let space = ProfileSpace::new(labels.iter().map(|l| l.len()).collect());
    rows.iter()
        .enumerate()
        .map(|(k, r)| RuleRow {
            signals: label_profile(labels, &space.decode(k)),
            alloc: sparse(r, allocations),
        })
        .collect()
}

pub fn acf(j: &RuleJson, env: &Environment<f64>) -> Result<Acf<f64>, Bad> {
    let rows = rule_rows(&j.rule, &type_labels(env), &env.allocations, "rule")?;
    Acf::new(env.type_space(), rows).map_err(lib("rule"))
}

pub fn acf_json(f: &Acf<f64>, env: &Environment<f64>) -> RuleJson {
    RuleJson {
        rule: rule_json(&f.rows, &type_labels(env), &env.allocations),
    }
}

pub enum AnyMechanism {
    Plain(Mechanism<f64>),
    Mediated(MediatedMechanism<f64>),
    Public(PubliclyMediatedMechanism<f64>),
}

impl AnyMechanism {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyMechanism::Plain(_) => "plain",
            AnyMechanism::Mediated(_) => "mediated",
            AnyMechanism::Public(_) => "public",
        }
    }
}

fn check_players(sets: &[Vec<String>], env: &Environment<f64>, path: &str) -> Result<(), Bad> {
    if sets.len() != env.n_players() {
        return Err(bad(
            path,
            format!("{} sets for {} players", sets.len(), env.n_players()),
        ));
    }
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(bad(format!("{path}[{i}]"), "empty set"));
        }
        check_unique(s, &format!("{path}[{i}]"))?;
    }
    Ok(())
}

pub fn mechanism(j: &MechanismJson, env: &Environment<f64>) -> Result<AnyMechanism, Bad> {
    let allocs = &env.allocations;
    match j {
        MechanismJson::Plain { signal_sets, rule } => {
            check_players(signal_sets, env, "signal_sets")?;
            let h0 = rule_rows(rule, signal_sets, allocs, "rule")?;
            Ok(AnyMechanism::Plain(
                Mechanism::new(signal_sets.clone(), h0).map_err(lib("rule"))?,
            ))
        }
        MechanismJson::Mediated {
            message_sets,
            signal_sets,
            profiles,
        } => {
            check_players(signal_sets, env, "signal_sets")?;
            check_players(message_sets, env, "message_sets")?;
            let mut seen = Vec::new();
            let mut out = Vec::with_capacity(profiles.len());
            for (k, p) in profiles.iter().enumerate() {
                let at = format!("profiles[{k}]");
                let messages = profile_index(
                    message_sets,
                    &p.messages,
                    &format!("{at}.messages"),
                    "message",
                )?;
                if seen.contains(&messages) {
                    return Err(bad(at, "message profile listed twice"));
                }
                seen.push(messages.clone());
                let h = rule_rows(&p.rule, signal_sets, allocs, &format!("{at}.rule"))?;
                out.push(MessageProfile {
                    messages,
                    prob: p.prob,
                    h,
                });
            }
            let m = MediatedMechanism::new(message_sets.clone(), signal_sets.clone(), out)
                .map_err(lib("profiles"))?;
            Ok(AnyMechanism::Mediated(m))
        }
        MechanismJson::Public {
            signal_sets,
            messages,
        } => {
            check_players(signal_sets, env, "signal_sets")?;
            let labels: Vec<String> = messages.iter().map(|m| m.label.clone()).collect();
            check_unique(&labels, "messages")?;
            let d = messages.iter().map(|m| m.prob).collect();
            let h = messages
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    rule_rows(&m.rule, signal_sets, allocs, &format!("messages[{k}].rule"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let m = PubliclyMediatedMechanism::new(labels, d, signal_sets.clone(), h)
                .map_err(lib("messages"))?;
            Ok(AnyMechanism::Public(m))
        }
    }
}

pub fn mechanism_json(m: &AnyMechanism, allocations: &[String]) -> MechanismJson {
    match m {
        AnyMechanism::Plain(m) => MechanismJson::Plain {
            signal_sets: m.signal_sets.clone(),
            rule: rule_json(&m.h0, &m.signal_sets, allocations),
        },
        AnyMechanism::Mediated(m) => MechanismJson::Mediated {
            message_sets: m.message_sets.clone(),
            signal_sets: m.signal_sets.clone(),
            profiles: m
                .profiles
                .iter()
                .map(|p| ProfileJson {
                    messages: label_profile(&m.message_sets, &p.messages),
                    prob: p.prob,
                    rule: rule_json(&p.h, &m.signal_sets, allocations),
                })
                .collect(),
        },
        AnyMechanism::Public(m) => MechanismJson::Public {
            signal_sets: m.signal_sets.clone(),
            messages: m
                .messages
                .iter()
                .zip(&m.d)
                .zip(&m.h)
                .map(|((label, &prob), h)| PublicMessageJson {
                    label: label.clone(),
                    prob,
                    rule: rule_json(h, &m.signal_sets, allocations),
                })
                .collect(),
        },
    }
}

/// Message labels per player and signal labels per player of a mechanism.
pub fn mechanism_labels(m: &AnyMechanism) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    match m {
        AnyMechanism::Plain(m) => (
            vec![vec!["-".to_string()]; m.signal_sets.len()],
            m.signal_sets.clone(),
        ),
        AnyMechanism::Mediated(m) => (m.message_sets.clone(), m.signal_sets.clone()),
        AnyMechanism::Public(m) => (
            vec![m.messages.clone(); m.signal_sets.len()],
            m.signal_sets.clone(),
        ),
    }
}

fn strategy_row(
    d: &IndexMap<String, Dist>,
    types: &[String],
    signals: &[String],
    path: &str,
) -> Result<Vec<Vec<f64>>, Bad> {
    let mut rows = vec![None; types.len()];
    for (t, dist) in d {
        let at = format!("{path}.{t}");
        let k = index_of(types, t, &at, "type")?;
        rows[k] = Some(dense(dist, signals, &at, "signal")?);
    }
    rows.into_iter()
        .zip(types)
        .map(|(r, t)| r.ok_or_else(|| bad(path, format!("no strategy for type {t:?}"))))
        .collect()
}

/// Strategy in mediated form; a plain strategy is used after every message.
pub fn strategy(
    j: &StrategyJson,
    env: &Environment<f64>,
    m: &AnyMechanism,
) -> Result<MediatedStrategy<f64>, Bad> {
    let types = type_labels(env);
    let (messages, signals) = mechanism_labels(m);
    let n = env.n_players();
    let players = match j {
        StrategyJson::Plain { players } => players.len(),
        StrategyJson::Mediated { players } => players.len(),
    };
    if players != n {
        return Err(bad("players", format!("{players} entries for {n} players")));
    }
    let rows = match j {
        StrategyJson::Plain { players } => (0..n)
            .map(|i| {
                let r = strategy_row(
                    &players[i],
                    &types[i],
                    &signals[i],
                    &format!("players[{i}]"),
                )?;
                Ok(vec![r; messages[i].len()])
            })
            .collect::<Result<Vec<_>, Bad>>()?,
        StrategyJson::Mediated { players } => (0..n)
            .map(|i| {
                let mut per = vec![None; messages[i].len()];
                for (msg, d) in &players[i] {
                    let at = format!("players[{i}].{msg}");
                    let k = index_of(&messages[i], msg, &at, "message")?;
                    per[k] = Some(strategy_row(d, &types[i], &signals[i], &at)?);
                }
                per.into_iter()
                    .zip(&messages[i])
                    .map(|(r, msg)| {
                        r.ok_or_else(|| {
                            bad(
                                format!("players[{i}]"),
                                format!("no strategy after message {msg:?}"),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, Bad>>()?,
    };
    MediatedStrategy::new(rows).map_err(lib("players"))
}

pub fn plain_strategy(tau: &MediatedStrategy<f64>) -> Option<Strategy<f64>> {
    if tau.rows.iter().any(|p| p.len() != 1) {
        return None;
    }
    Some(Strategy {
        rows: tau.rows.iter().map(|p| p[0].clone()).collect(),
    })
}

pub fn strategy_json(
    tau: &MediatedStrategy<f64>,
    env: &Environment<f64>,
    m: &AnyMechanism,
) -> StrategyJson {
    let types = type_labels(env);
    let (messages, signals) = mechanism_labels(m);
    let row = |i: usize, r: &[Vec<f64>]| -> IndexMap<String, Dist> {
        r.iter()
            .zip(&types[i])
            .map(|(d, t)| (t.clone(), sparse(d, &signals[i])))
            .collect()
    };
    if let AnyMechanism::Plain(_) = m {
        return StrategyJson::Plain {
            players: tau
                .rows
                .iter()
                .enumerate()
                .map(|(i, p)| row(i, &p[0]))
                .collect(),
        };
    }
    StrategyJson::Mediated {
        players: tau
            .rows
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.iter()
                    .zip(&messages[i])
                    .map(|(r, msg)| (msg.clone(), row(i, r)))
                    .collect()
            })
            .collect(),
    }
}

pub fn representation(
    j: &RepresentationJson,
) -> Result<(Acf<f64>, ConvexRepresentation<f64>), Bad> {
    for (i, s) in j.type_sets.iter().enumerate() {
        check_unique(s, &format!("type_sets[{i}]"))?;
    }
    check_unique(&j.allocations, "allocations")?;
    let space = ProfileSpace::new(j.type_sets.iter().map(|s| s.len()).collect());
    let rule = |rows: &[RuleRow], at: &str| -> Result<Acf<f64>, Bad> {
        Acf::new(
            space.clone(),
            rule_rows(rows, &j.type_sets, &j.allocations, at)?,
        )
        .map_err(lib(at))
    };
    let f = rule(&j.rule, "rule")?;
    let per_player = j
        .components
        .iter()
        .enumerate()
        .map(|(i, comps)| {
            comps
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    Ok((
                        c.weight,
                        rule(&c.rule, &format!("components[{i}][{m}].rule"))?,
                    ))
                })
                .collect::<Result<Vec<_>, Bad>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rep = ConvexRepresentation { per_player };
    rep.validate(&f).map_err(lib("components"))?;
    Ok((f, rep))
}

pub fn representation_json(
    type_sets: &[Vec<String>],
    allocations: &[String],
    f: &Acf<f64>,
    rep: &ConvexRepresentation<f64>,
) -> RepresentationJson {
    RepresentationJson {
        type_sets: type_sets.to_vec(),
        allocations: allocations.to_vec(),
        rule: rule_json(&f.rows, type_sets, allocations),
        components: rep
            .per_player
            .iter()
            .map(|comps| {
                comps
                    .iter()
                    .map(|(w, g)| ComponentJson {
                        weight: *w,
                        rule: rule_json(&g.rows, type_sets, allocations),
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn lottery(
    j: &LotteryJson,
    outcomes: &[String],
) -> Result<cpt_mechlab::cpt::Lottery<f64>, Bad> {
    let entries = j
        .entries
        .iter()
        .enumerate()
        .map(|(k, e)| {
            Ok((
                e.prob,
                index_of(
                    outcomes,
                    &e.outcome,
                    &format!("entries[{k}].outcome"),
                    "outcome",
                )?,
            ))
        })
        .collect::<Result<Vec<_>, Bad>>()?;
    cpt_mechlab::cpt::Lottery::new(entries).map_err(lib("entries"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn bundle(name: &str, file: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("bundles")
            .join(name)
            .join(file)
    }

    fn load<T: DeserializeOwned>(p: &Path) -> T {
        read(p).unwrap_or_else(|e| panic!("{e}"))
    }

    fn reparse<S: Serialize, T: DeserializeOwned>(v: &S) -> T {
        serde_json::from_str(&serde_json::to_string(v).unwrap()).unwrap()
    }

    fn close(a: &[Vec<f64>], b: &[Vec<f64>]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!(cpt_mechlab::dist::max_abs_diff(x, y) <= 1e-12);
        }
    }

    #[test]
    fn games_round_trip() {
        for name in [
            "prelec-dominance",
            "prelec-choice",
            "market",
            "market-direct",
            "public-gap",
        ] {
            let env = environment(&load(&bundle(name, "environment.json")))
                .ok()
                .unwrap();
            let env2 = environment(&reparse(&environment_json(&env))).ok().unwrap();
            assert_eq!(env.type_sets, env2.type_sets);
            assert_eq!(env.zeta, env2.zeta);

            let m = mechanism(&load(&bundle(name, "mechanism.json")), &env)
                .ok()
                .unwrap();
            let mj = mechanism_json(&m, &env.allocations);
            let m2 = mechanism(&reparse(&mj), &env).ok().unwrap();
            let (AnyMechanism::Plain(a), AnyMechanism::Plain(b)) = (&m, &m2) else {
                panic!("plain bundles")
            };
            close(&a.h0, &b.h0);

            let tau = strategy(&load(&bundle(name, "strategy.json")), &env, &m)
                .ok()
                .unwrap();
            let tau2 = strategy(&reparse(&strategy_json(&tau, &env, &m)), &env, &m2)
                .ok()
                .unwrap();
            for (x, y) in tau.rows.iter().zip(&tau2.rows) {
                for (p, q) in x.iter().zip(y) {
                    close(p, q);
                }
            }

            let prior_path = bundle(name, "prior.json");
            if prior_path.exists() {
                let p = prior(&load(&prior_path), &env).ok().unwrap();
                let p2 = prior(&reparse(&prior_json(&p, &env)), &env).ok().unwrap();
                close(&[p.probs], &[p2.probs]);
            }
        }
    }

    #[test]
    fn mediated_and_public_mechanisms_round_trip() {
        let env = environment(&load(&bundle("public-gap", "environment.json")))
            .ok()
            .unwrap();
        let labels = type_labels(&env);
        let f = acf(&load(&bundle("public-gap", "rule.json")), &env)
            .ok()
            .unwrap();
        let public = PubliclyMediatedMechanism::new(
            vec!["p".into(), "q".into()],
            vec![0.25, 0.75],
            labels.clone(),
            vec![f.rows.clone(); 2],
        )
        .unwrap();
        let mediated = cpt_mechlab::mediated::lift_public(&public);
        for m in [
            AnyMechanism::Public(public),
            AnyMechanism::Mediated(mediated),
        ] {
            let j = mechanism_json(&m, &env.allocations);
            let back = mechanism(&reparse(&j), &env).ok().unwrap();
            assert_eq!(
                serde_json::to_value(&j).unwrap(),
                serde_json::to_value(mechanism_json(&back, &env.allocations)).unwrap()
            );
        }
    }

    #[test]
    fn representation_round_trips() {
        let j: RepresentationJson = load(&bundle("coupling", "representation.json"));
        let (f, rep) = representation(&j).ok().unwrap();
        let (f2, rep2) = representation(&reparse(&representation_json(
            &j.type_sets,
            &j.allocations,
            &f,
            &rep,
        )))
        .ok()
        .unwrap();
        close(&f.rows, &f2.rows);
        for (a, b) in rep.per_player.iter().zip(&rep2.per_player) {
            for ((wa, ga), (wb, gb)) in a.iter().zip(b) {
                assert!((wa - wb).abs() <= 1e-12);
                close(&ga.rows, &gb.rows);
            }
        }
    }

    #[test]
    fn missing_rule_rows_are_reported() {
        let labels = vec![vec!["a".to_string(), "b".to_string()]];
        let rows = vec![RuleRow {
            signals: vec!["a".into()],
            alloc: [("X".to_string(), 1.0)].into_iter().collect(),
        }];
        let err = rule_rows(&rows, &labels, &["X".to_string()], "rule")
            .err()
            .unwrap();
        assert_eq!(err.path, "rule");
        assert!(err.reason.contains("\"b\""));
    }
}
