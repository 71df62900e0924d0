mod common;

use cpt_mechlab::dist::ProfileSpace;
use cpt_mechlab::environment::{Acf, Environment, Prior};
use cpt_mechlab::ic::{
    build_public_mediated_from_convex, caratheodory_decompose_n1, eta, h_n_sufficiency,
    is_dominant_ic, is_f_incentive_compatible, merge_messages, ConvexRepresentation,
};
use cpt_mechlab::mediated::{
    induced_acf_mediated, is_bayes_nash_mediated, truthful_mediated_strategy, MediatedMechanism,
    MessageProfile,
};
use cpt_mechlab::{catalog, Error, Tolerances};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn single_player(
    rng: &mut ChaCha8Rng,
    types: usize,
    allocations: usize,
) -> (Environment<f64>, Prior<f64>) {
    let tys = (0..types)
        .map(|t| {
            cpt_mechlab::cpt::CptType::new(
                format!("t{t}"),
                common::random_values(rng, 3),
                common::random_weighting(rng),
                common::random_weighting(rng),
            )
            .unwrap()
        })
        .collect();
    let factors = vec![(0..allocations)
        .map(|_| common::sparse_simplex(rng, 3))
        .collect()];
    let env = Environment::new(
        vec![tys],
        (0..allocations).map(|a| format!("a{a}")).collect(),
        vec![vec!["o0".into(), "o1".into(), "o2".into()]],
        Environment::product_zeta(&factors),
    )
    .unwrap();
    let prior = common::random_prior(rng, &env);
    (env, prior)
}

fn constant_family(space: &ProfileSpace, allocations: usize) -> Vec<Acf<f64>> {
    (0..allocations)
        .map(|a| Acf::constant(space.clone(), cpt_mechlab::dist::point_mass(allocations, a)))
        .collect()
}

#[test]
fn constant_rules_are_always_incentive_compatible() {
    for seed in 0..20 {
        let mut rng = common::rng(seed);
        let env = common::random_env(&mut rng, [2, 2], 3, 3, false);
        let prior = common::random_prior(&mut rng, &env);
        let f = Acf::constant(env.type_space(), common::simplex(&mut rng, 3));
        for i in 0..2 {
            assert!(is_f_incentive_compatible(&f, i, &env, &prior)
                .unwrap()
                .is_ok());
            assert!(is_dominant_ic(&f, i, &env).unwrap().is_ok());
        }
    }
}

#[test]
fn caratheodory_recovers_mixtures_of_constant_rules() {
    for seed in 0..30 {
        let mut rng = common::rng(100 + seed);
        let (env, prior) = single_player(&mut rng, 2, 3);
        let family = constant_family(&env.type_space(), 3);
        let weights = common::simplex(&mut rng, 3);
        let f = Acf::constant(env.type_space(), weights.clone());
        let rep = caratheodory_decompose_n1(&f, &family, &env, &prior)
            .unwrap()
            .expect("decomposable");
        rep.validate(&f).unwrap();
        // basic solutions use at most one component per row
        assert!(rep.per_player[0].len() <= f.rows.len() * 3);

        let public =
            build_public_mediated_from_convex(&f, &rep.per_player[0], &env, &prior).unwrap();
        let truthful = truthful_mediated_strategy(&env, &public).unwrap();
        let induced = induced_acf_mediated(&public, &env, Some(&prior), &truthful).unwrap();
        assert!(induced.acf.max_abs_diff(&f) <= 1e-12);
        assert!(
            is_bayes_nash_mediated(&public, &env, &prior, &truthful, &Tolerances::default())
                .unwrap()
                .is_ok()
        );
    }
}

#[test]
fn caratheodory_needs_a_single_player() {
    let ex = catalog::public_gap::<f64>();
    let family = constant_family(&ex.env.type_space(), ex.env.n_allocations());
    match caratheodory_decompose_n1(&ex.f_star, &family, &ex.env, &ex.prior) {
        Err(Error::Unsupported(_)) => {}
        other => panic!("expected unsupported, got {other:?}"),
    }
}

#[test]
fn product_mediator_reproduces_the_rule() {
    for seed in 0..20 {
        let mut rng = common::rng(200 + seed);
        let env = common::random_env(&mut rng, [2, 2], 2, 3, false);
        let prior = common::random_prior(&mut rng, &env);
        let space = env.type_space();
        let f = Acf::constant(space.clone(), vec![0.5, 0.5]);
        let lean = |p: f64| Acf::constant(space.clone(), vec![p, 1.0 - p]);
        let shift = rng.gen_range(0.0..0.25);
        let rep = ConvexRepresentation {
            per_player: vec![
                vec![(0.5, lean(0.5 + shift)), (0.5, lean(0.5 - shift))],
                vec![(1.0, f.clone())],
            ],
        };
        let m = h_n_sufficiency(&f, &rep, &env, &prior).unwrap();
        let truthful = truthful_mediated_strategy(&env, &m).unwrap();
        let induced = induced_acf_mediated(&m, &env, Some(&prior), &truthful).unwrap();
        assert!(induced.acf.max_abs_diff(&f) <= 1e-12);
    }
}

#[test]
fn merging_equivalent_messages_keeps_the_outcome() {
    let ex = catalog::public_gap::<f64>();
    let rows = ex.f_star.rows.clone();
    let labels: Vec<Vec<String>> = ex
        .env
        .type_sets
        .iter()
        .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
        .collect();
    let profiles = vec![
        MessageProfile {
            messages: vec![0, 0],
            prob: 0.25,
            h: rows.clone(),
        },
        MessageProfile {
            messages: vec![1, 0],
            prob: 0.75,
            h: rows.clone(),
        },
    ];
    let m = MediatedMechanism::new(
        vec![vec!["x".into(), "y".into()], vec!["z".into()]],
        labels,
        profiles,
    )
    .unwrap();
    assert_eq!(eta(&m, 0, 0).unwrap(), eta(&m, 0, 1).unwrap());
    let merged = merge_messages(&m, 0, 0, 1).unwrap();
    assert_eq!(merged.message_sets[0], vec!["x".to_string()]);
    let truthful = truthful_mediated_strategy(&ex.env, &merged).unwrap();
    let induced = induced_acf_mediated(&merged, &ex.env, Some(&ex.prior), &truthful).unwrap();
    assert!(induced.acf.max_abs_diff(&ex.f_star) <= 1e-12);
    assert!(merge_messages(&m, 0, 0, 0).is_err());
}

#[test]
fn merging_distinguishable_messages_is_refused() {
    let ex = catalog::public_gap::<f64>();
    let labels: Vec<Vec<String>> = ex
        .env
        .type_sets
        .iter()
        .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
        .collect();
    let profiles = vec![
        MessageProfile {
            messages: vec![0, 0],
            prob: 0.5,
            h: ex.endpoint_acf(0.0).rows,
        },
        MessageProfile {
            messages: vec![1, 0],
            prob: 0.5,
            h: ex.endpoint_acf(1.0).rows,
        },
    ];
    let m = MediatedMechanism::new(
        vec![vec!["x".into(), "y".into()], vec!["z".into()]],
        labels,
        profiles,
    )
    .unwrap();
    assert!(matches!(
        merge_messages(&m, 0, 0, 1),
        Err(Error::Precondition(_))
    ));
}
