//! Random small instances shared by the integration suites.
#![allow(dead_code, clippy::needless_range_loop)]

use cpt_mechlab::cpt::{CptType, WeightingFunction};
use cpt_mechlab::environment::{Environment, Prior};
use cpt_mechlab::mechanism::{Mechanism, Strategy};
use cpt_mechlab::mediated::{
    alloc_lottery, is_bayes_nash_mediated, MediatedForm, MediatedMechanism, MediatedStrategy,
    MessageProfile, OppView, PubliclyMediatedMechanism,
};
use cpt_mechlab::scalar::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

/// Simplex point with some coordinates forced to zero.
pub fn sparse_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let mut p = simplex(rng, k);
        for x in p.iter_mut() {
            if rng.gen_bool(0.3) {
                *x = 0.0;
            }
        }
        let s: f64 = p.iter().sum();
        if s > 0.0 {
            return p.iter().map(|x| x / s).collect();
        }
    }
}

/// Strictly increasing piecewise-linear weighting with up to two interior kinks.
pub fn random_weighting(rng: &mut ChaCha8Rng) -> WeightingFunction<f64> {
    let k = rng.gen_range(0..=2);
    let mut ps: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..0.95)).collect();
    let mut ws: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..0.95)).collect();
    ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pts = vec![(0.0, 0.0)];
    for (p, w) in ps.into_iter().zip(ws) {
        let (lp, lw) = *pts.last().unwrap();
        if p - lp > 1e-3 && w - lw > 1e-3 && 1.0 - p > 1e-3 && 1.0 - w > 1e-3 {
            pts.push((p, w));
        }
    }
    pts.push((1.0, 1.0));
    WeightingFunction::piecewise(pts).unwrap()
}

pub fn random_values(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k)
        .map(|_| (rng.gen_range(-10.0f64..10.0) * 4.0).round() / 4.0)
        .collect()
}

/// Two players; each allocation maps to an independent outcome pair.
pub fn random_env(
    rng: &mut ChaCha8Rng,
    types: [usize; 2],
    allocations: usize,
    outcomes: usize,
    eut: bool,
) -> Environment<f64> {
    let type_sets = (0..2)
        .map(|i| {
            (0..types[i])
                .map(|t| {
                    let values = random_values(rng, outcomes);
                    let label = format!("t{t}");
                    if eut {
                        CptType::eut(label, values).unwrap()
                    } else {
                        CptType::new(label, values, random_weighting(rng), random_weighting(rng))
                            .unwrap()
                    }
                })
                .collect()
        })
        .collect();
    let factors: Vec<Vec<Vec<f64>>> = (0..2)
        .map(|_| {
            (0..allocations)
                .map(|_| sparse_simplex(rng, outcomes))
                .collect()
        })
        .collect();
    Environment::new(
        type_sets,
        (0..allocations).map(|a| format!("a{a}")).collect(),
        vec![(0..outcomes).map(|o| format!("o{o}")).collect(); 2],
        Environment::product_zeta(&factors),
    )
    .unwrap()
}

pub fn random_prior(rng: &mut ChaCha8Rng, env: &Environment<f64>) -> Prior<f64> {
    let space = env.type_space();
    let probs = simplex(rng, space.size());
    Prior::new(space, probs).unwrap()
}

/// Allocation rows per signal profile. When `dup[i]` holds, player `i`'s last
/// signal behaves exactly like its first.
fn random_rule(
    rng: &mut ChaCha8Rng,
    signals: &[usize],
    allocations: usize,
    dup: &[bool],
) -> Vec<Vec<f64>> {
    let space = cpt_mechlab::dist::ProfileSpace::new(signals.to_vec());
    let base: Vec<Vec<f64>> = (0..space.size())
        .map(|_| sparse_simplex(rng, allocations))
        .collect();
    (0..space.size())
        .map(|k| {
            let mut prof = space.decode(k);
            for i in 0..signals.len() {
                if dup[i] && prof[i] == signals[i] - 1 {
                    prof[i] = 0;
                }
            }
            base[space.encode(&prof)].clone()
        })
        .collect()
}

pub struct Shape {
    pub messages: [usize; 2],
    pub signals: [usize; 2],
    pub dup: [bool; 2],
}

pub fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    let signals = [rng.gen_range(1..=3), rng.gen_range(1..=3)];
    Shape {
        messages: [rng.gen_range(1..=2), rng.gen_range(1..=2)],
        signals,
        dup: [
            signals[0] >= 2 && rng.gen_bool(0.5),
            signals[1] >= 2 && rng.gen_bool(0.5),
        ],
    }
}

fn labels(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|j| format!("{prefix}{j}")).collect()
}

pub fn random_mediated(
    rng: &mut ChaCha8Rng,
    shape: &Shape,
    allocations: usize,
) -> MediatedMechanism<f64> {
    let space = cpt_mechlab::dist::ProfileSpace::new(shape.messages.to_vec());
    let d = sparse_simplex(rng, space.size());
    let profiles = (0..space.size())
        .map(|k| MessageProfile {
            messages: space.decode(k),
            prob: d[k],
            h: random_rule(rng, &shape.signals, allocations, &shape.dup),
        })
        .collect();
    MediatedMechanism::new(
        vec![
            labels("m", shape.messages[0]),
            labels("m", shape.messages[1]),
        ],
        vec![labels("s", shape.signals[0]), labels("s", shape.signals[1])],
        profiles,
    )
    .unwrap()
}

pub fn random_public(
    rng: &mut ChaCha8Rng,
    shape: &Shape,
    allocations: usize,
) -> PubliclyMediatedMechanism<f64> {
    let k = shape.messages[0];
    let d = sparse_simplex(rng, k);
    let h = (0..k)
        .map(|_| random_rule(rng, &shape.signals, allocations, &shape.dup))
        .collect();
    PubliclyMediatedMechanism::new(
        labels("m", k),
        d,
        vec![labels("s", shape.signals[0]), labels("s", shape.signals[1])],
        h,
    )
    .unwrap()
}

pub fn random_mechanism(rng: &mut ChaCha8Rng, shape: &Shape, allocations: usize) -> Mechanism<f64> {
    Mechanism::new(
        vec![labels("s", shape.signals[0]), labels("s", shape.signals[1])],
        random_rule(rng, &shape.signals, allocations, &shape.dup),
    )
    .unwrap()
}

/// Pure strategy, one signal per (player, message, type).
pub fn pure_strategy<M: MediatedForm<f64>>(
    m: &M,
    env: &Environment<f64>,
    picks: &[Vec<Vec<usize>>],
) -> MediatedStrategy<f64> {
    let rows = (0..2)
        .map(|i| {
            let k = m.signal_labels(i).len();
            (0..m.n_messages(i))
                .map(|msg| {
                    (0..env.type_sets[i].len())
                        .map(|t| cpt_mechlab::dist::point_mass(k, picks[i][msg][t]))
                        .collect()
                })
                .collect()
        })
        .collect();
    MediatedStrategy::new(rows).unwrap()
}

/// Sequential best-response dynamics from a random pure profile; the result is
/// then certified by the exhaustive Bayes-Nash check. Where a player's pick is a
/// signal with a behavioural duplicate, the strategy mixes over both.
pub fn find_equilibrium<M: MediatedForm<f64>>(
    rng: &mut ChaCha8Rng,
    m: &M,
    env: &Environment<f64>,
    prior: &Prior<f64>,
    dup: &[bool; 2],
) -> Option<MediatedStrategy<f64>> {
    let types = env.type_space();
    let mut picks: Vec<Vec<Vec<usize>>> = (0..2)
        .map(|i| {
            let k = m.signal_labels(i).len();
            (0..m.n_messages(i))
                .map(|_| {
                    (0..env.type_sets[i].len())
                        .map(|_| rng.gen_range(0..k))
                        .collect()
                })
                .collect()
        })
        .collect();
    let support = Tolerances::<f64>::default().support;
    let mut stable = false;
    for _ in 0..50 {
        stable = true;
        for i in 0..2 {
            for msg in 0..m.n_messages(i) {
                if m.message_marginal(i, msg) <= support {
                    continue;
                }
                for t in 0..env.type_sets[i].len() {
                    let Ok(cond) = prior.conditional(i, t) else {
                        continue;
                    };
                    let tau = pure_strategy(m, env, &picks);
                    let vals: Vec<f64> = (0..m.signal_labels(i).len())
                        .map(|s| {
                            let mu =
                                alloc_lottery(m, &tau, &types, i, msg, OppView::Types(&cond), s);
                            env.utility_w(i, t, &mu)
                        })
                        .collect();
                    let cur = vals[picks[i][msg][t]];
                    let (best, bv) =
                        vals.iter()
                            .enumerate()
                            .fold(
                                (0, f64::NEG_INFINITY),
                                |acc, (s, &v)| if v > acc.1 { (s, v) } else { acc },
                            );
                    if bv > cur + 1e-9 {
                        picks[i][msg][t] = best;
                        stable = false;
                    }
                }
            }
        }
        if stable {
            break;
        }
    }
    if !stable {
        return None;
    }
    let mut tau = pure_strategy(m, env, &picks);
    for i in 0..2 {
        if !dup[i] {
            continue;
        }
        let last = m.signal_labels(i).len() - 1;
        for msg in 0..m.n_messages(i) {
            for t in 0..env.type_sets[i].len() {
                if picks[i][msg][t] == 0 {
                    let w: f64 = rng.gen_range(0.1..0.9);
                    let row = &mut tau.rows[i][msg][t];
                    row[0] = w;
                    row[last] = 1.0 - w;
                }
            }
        }
    }
    let report = is_bayes_nash_mediated(m, env, prior, &tau, &Tolerances::default()).ok()?;
    report.is_ok().then_some(tau)
}

/// A plain strategy with one signal per type, chosen at random.
pub fn random_pure_strategy(
    rng: &mut ChaCha8Rng,
    env: &Environment<f64>,
    signals: &[usize; 2],
) -> Strategy<f64> {
    let rows = (0..2)
        .map(|i| {
            (0..env.type_sets[i].len())
                .map(|_| cpt_mechlab::dist::point_mass(signals[i], rng.gen_range(0..signals[i])))
                .collect()
        })
        .collect();
    Strategy::new(rows).unwrap()
}
