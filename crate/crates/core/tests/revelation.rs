#![allow(clippy::needless_range_loop)]

mod common;

use cpt_mechlab::mediated::{induced_acf_mediated, MediatedForm};
use cpt_mechlab::revelation::{
    to_direct_mediated, to_direct_public, verify_transform, EquilibriumKind, TransformOptions,
    VerifyOptions,
};
use cpt_mechlab::{catalog, Error};
use rand::Rng;

fn unpruned() -> TransformOptions {
    TransformOptions {
        prune: false,
        ..TransformOptions::default()
    }
}

#[test]
fn pruning_does_not_change_the_outcome() {
    let mut done = 0;
    for seed in 0..400u64 {
        let mut rng = common::rng(seed);
        let types = [rng.gen_range(1..=2), rng.gen_range(1..=2)];
        let env = common::random_env(&mut rng, types, 2, 3, false);
        let prior = common::random_prior(&mut rng, &env);
        let shape = common::random_shape(&mut rng);
        let m = common::random_mediated(&mut rng, &shape, 2);
        let Some(tau) = common::find_equilibrium(&mut rng, &m, &env, &prior, &shape.dup) else {
            continue;
        };
        let full = to_direct_mediated(&m, &env, &tau, &unpruned()).unwrap();
        let pruned = to_direct_mediated(&m, &env, &tau, &TransformOptions::default()).unwrap();

        for i in 0..2 {
            let plans = shape.signals[i].pow(types[i] as u32);
            assert_eq!(full.stats.messages_per_player[i], shape.messages[i] * plans);
            assert!(pruned.stats.messages_per_player[i] <= full.stats.messages_per_player[i]);
        }
        // support of the new mediator is bounded by the old one times the plan support
        let supp_old = m.profiles.iter().filter(|p| p.prob > 1e-12).count();
        let supp_new = pruned
            .mechanism
            .profiles
            .iter()
            .filter(|p| p.prob > 1e-12)
            .count();
        let max_plans: usize = (0..2)
            .map(|i| shape.signals[i].pow(types[i] as u32))
            .product();
        assert!(supp_new <= supp_old * max_plans);

        let a = induced_acf_mediated(&full.mechanism, &env, Some(&prior), &full.truthful).unwrap();
        let b =
            induced_acf_mediated(&pruned.mechanism, &env, Some(&prior), &pruned.truthful).unwrap();
        assert!(a.acf.max_abs_diff(&b.acf) <= 1e-12);

        let v = verify_transform(
            &m,
            &tau,
            &pruned,
            &env,
            Some(&prior),
            EquilibriumKind::BayesNash,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(v.passed(), "seed {seed}: {v:?}");
        done += 1;
        if done == 25 {
            return;
        }
    }
    panic!("only {done} certified instances");
}

#[test]
fn outcome_is_preserved_off_equilibrium() {
    // the transform reproduces any strategy's outcome, equilibrium or not
    for seed in 0..40u64 {
        let mut rng = common::rng(1000 + seed);
        let env = common::random_env(&mut rng, [2, 2], 3, 3, false);
        let prior = common::random_prior(&mut rng, &env);
        let shape = common::random_shape(&mut rng);
        let m = common::random_public(&mut rng, &shape, 3);
        let picks: Vec<Vec<Vec<usize>>> = (0..2)
            .map(|i| {
                (0..m.n_messages(i))
                    .map(|_| (0..2).map(|_| rng.gen_range(0..shape.signals[i])).collect())
                    .collect()
            })
            .collect();
        let tau = common::pure_strategy(&m, &env, &picks);
        let t = to_direct_public(&m, &env, &tau, &TransformOptions::default()).unwrap();
        assert!(t.public);
        let v = verify_transform(
            &m,
            &tau,
            &t,
            &env,
            Some(&prior),
            EquilibriumKind::BayesNash,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(v.acf_ok() && v.identity_ok(), "seed {seed}: {v:?}");
        if v.equilibrium.is_ok() {
            assert!(v.passed());
        }
    }
}

#[test]
fn announcing_mixed_plans_breaks_the_market_equilibrium() {
    // the outcome survives, but the equilibrium relied on the mixing staying private
    let ex = catalog::three_type_market::<f64>();
    let public = cpt_mechlab::mediated::PubliclyMediatedMechanism::from_mechanism(&ex.indirect);
    let tau = ex.sigma.to_mediated();
    let t = to_direct_public(&public, &ex.env, &tau, &TransformOptions::default()).unwrap();
    assert_eq!(t.origins.len(), 2);
    assert_eq!(t.mechanism.messages.len(), t.stats.profiles);
    let v = verify_transform(
        &public,
        &tau,
        &t,
        &ex.env,
        Some(&ex.prior),
        EquilibriumKind::BayesNash,
        &VerifyOptions::default(),
    )
    .unwrap();
    assert!(v.acf_ok() && v.identity_ok(), "{v:?}");
    assert!(!v.equilibrium.is_ok());
    assert!(v
        .equilibrium
        .witnesses
        .iter()
        .any(|w| w.ty == 0 && w.deviation == 2));
}

#[test]
fn cap_is_reported_as_a_resource_error() {
    let ex = catalog::three_type_market::<f64>();
    let m = cpt_mechlab::mediated::lift_unmediated(&ex.indirect);
    let opts = TransformOptions {
        prune: false,
        cap: 10,
    };
    match to_direct_mediated(&m, &ex.env, &ex.sigma.to_mediated(), &opts) {
        Err(Error::Resource { .. }) => {}
        other => panic!("expected resource error, got {other:?}"),
    }
}

#[test]
fn mismatched_strategy_is_rejected() {
    let ex = catalog::three_type_market::<f64>();
    let m = cpt_mechlab::mediated::lift_unmediated(&ex.indirect);
    let other = catalog::public_gap::<f64>();
    assert!(to_direct_mediated(
        &m,
        &ex.env,
        &other.sigma.to_mediated(),
        &TransformOptions::default()
    )
    .is_err());
}
