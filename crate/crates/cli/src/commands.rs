use std::path::Path;

use cpt_mechlab::cpt::{
    cpt_value, cpt_value_cumulative, decision_weights, expected_utility, Lottery,
};
use cpt_mechlab::environment::{Environment, Prior};
use cpt_mechlab::golden::{self, Group};
use cpt_mechlab::ic::{
    canonical_coupling, check_ic, common_coupling_exists, coupling_residual, schell_feasible,
    CouplingOutcome,
};
use cpt_mechlab::mechanism::{BeliefCandidates, Mechanism, Strategy};
use cpt_mechlab::mediated::{
    check_belief_dominant_mediated, is_bayes_nash_mediated, is_dominant_mediated, lift_public,
    lift_unmediated, MediatedForm, MediatedStrategy, PubliclyMediatedMechanism,
};
use cpt_mechlab::report::EquilibriumReport;
use cpt_mechlab::revelation::{
    reduce_environment_eut, to_direct_mediated, to_direct_public, verify_transform,
    EquilibriumKind, TransformOptions, TransformResult, VerifyOptions, VerifyReport,
};
use cpt_mechlab::scalar::Tolerances;
use cpt_mechlab::{catalog, dist::ProfileSpace};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::render::{self, Labels};
use crate::schema::{self, AnyMechanism};
use crate::{Cli, CliError, Command, GameFiles, Global, Kind};

macro_rules! dispatch {
    ($m:expr, $x:ident => $body:expr) => {
        match $m {
            AnyMechanism::Plain($x) => $body,
            AnyMechanism::Mediated($x) => $body,
            AnyMechanism::Public($x) => $body,
        }
    };
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let g = &cli.global;
    if !(g.tol.is_finite() && g.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            g.tol
        )));
    }
    if g.grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    match &cli.command {
        Command::Eval { lottery, ty } => eval(g, lottery, ty),
        Command::Check { files, mediated } => check(g, files, *mediated),
        Command::Reveal { files, public } => reveal(g, files, *public),
        Command::ReduceEut {
            env,
            prior,
            mechanism,
            strategy,
        } => reduce_eut(g, env, prior.as_deref(), mechanism, strategy),
        Command::Ic {
            env,
            prior,
            rule,
            kind,
            player,
        } => ic(g, env, prior.as_deref(), rule, *kind, *player),
        Command::Couple { rep } => couple(g, rep),
        Command::Examples { which, export } => examples(g, which, *export),
    }
}

fn tolerances(g: &Global) -> Tolerances<f64> {
    Tolerances::default().with_compare(g.tol)
}

fn candidates(g: &Global) -> BeliefCandidates<f64> {
    BeliefCandidates::with_resolution(g.grid)
}

/// Prints the report and, with `--out`, writes its JSON to that file.
fn emit(g: &Global, value: &Value, text: &str) -> Result<(), CliError> {
    if g.json {
        println!("{}", pretty(value));
    } else {
        print!("{text}");
    }
    if let Some(out) = &g.out {
        write(out, value)?;
    }
    Ok(())
}

fn pretty<S: Serialize>(v: &S) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn write<S: Serialize>(path: &Path, v: &S) -> Result<(), CliError> {
    std::fs::write(path, pretty(v) + "\n")
        .map_err(|e| CliError::Output(path.display().to_string(), e))
}

fn out_dir(g: &Global) -> Result<Option<&Path>, CliError> {
    let Some(dir) = g.out.as_deref() else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(dir.display().to_string(), e))?;
    Ok(Some(dir))
}

fn load_env(path: &Path) -> Result<Environment<f64>, CliError> {
    let j: schema::EnvironmentJson = schema::read(path)?;
    schema::environment(&j).map_err(schema::attach(path))
}

fn load_prior(path: Option<&Path>, env: &Environment<f64>) -> Result<Option<Prior<f64>>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let j: schema::PriorJson = schema::read(path)?;
    schema::prior(&j, env)
        .map(Some)
        .map_err(schema::attach(path))
}

fn load_mechanism(path: &Path, env: &Environment<f64>) -> Result<AnyMechanism, CliError> {
    let j: schema::MechanismJson = schema::read(path)?;
    schema::mechanism(&j, env).map_err(schema::attach(path))
}

fn load_strategy(
    path: &Path,
    env: &Environment<f64>,
    m: &AnyMechanism,
) -> Result<MediatedStrategy<f64>, CliError> {
    let j: schema::StrategyJson = schema::read(path)?;
    schema::strategy(&j, env, m).map_err(schema::attach(path))
}

fn require_prior(prior: &Option<Prior<f64>>, kind: Kind) -> Result<Option<&Prior<f64>>, CliError> {
    match (prior, kind) {
        (None, Kind::BayesNash) => Err(CliError::Usage("bayes-nash checks need --prior".into())),
        (p, _) => Ok(p.as_ref()),
    }
}

fn labels(env: &Environment<f64>, m: &AnyMechanism) -> Labels {
    let (messages, signals) = schema::mechanism_labels(m);
    Labels {
        types: schema::type_labels(env),
        messages: (!matches!(m, AnyMechanism::Plain(_))).then_some(messages),
        signals,
    }
}

fn direct_labels(env: &Environment<f64>) -> Labels {
    let types = schema::type_labels(env);
    Labels {
        signals: types.clone(),
        types,
        messages: None,
    }
}

fn run_check<M: MediatedForm<f64>>(
    m: &M,
    env: &Environment<f64>,
    prior: Option<&Prior<f64>>,
    tau: &MediatedStrategy<f64>,
    kind: Kind,
    g: &Global,
) -> Result<EquilibriumReport<f64>, CliError> {
    let tol = tolerances(g);
    Ok(match (kind, prior) {
        (Kind::BayesNash, Some(p)) => is_bayes_nash_mediated(m, env, p, tau, &tol)?,
        (Kind::BayesNash, None) => {
            return Err(CliError::Usage("bayes-nash checks need --prior".into()))
        }
        (Kind::Dominant, _) => is_dominant_mediated(m, env, tau, &tol)?,
        (Kind::BeliefDominant, _) => {
            check_belief_dominant_mediated(m, env, tau, &candidates(g), &tol)?
        }
    })
}

fn eval(g: &Global, lottery: &Path, ty: &Path) -> Result<u8, CliError> {
    let tj: schema::TypeJson = schema::read(ty)?;
    let outcomes: Vec<String> = tj.values.keys().cloned().collect();
    let t = schema::cpt_type(&tj, &outcomes, "").map_err(schema::attach(ty))?;
    let lj: schema::LotteryJson = schema::read(lottery)?;
    let l: Lottery<f64> = schema::lottery(&lj, &outcomes).map_err(schema::attach(lottery))?;
    let value = cpt_value(&l, &t);
    let cumulative = cpt_value_cumulative(&l, &t);
    let eu = expected_utility(&l, &t.value_fn);
    let dw = decision_weights(&l, &t);
    let weights: Vec<Value> = dw
        .order
        .iter()
        .zip(dw.pi_plus.iter().chain(&dw.pi_minus))
        .map(|(&j, &w)| {
            let (p, o) = l.entries[j];
            json!({ "outcome": outcomes[o], "prob": p, "value": t.value_fn.get(o), "weight": w })
        })
        .collect();
    let report = json!({
        "type": t.label,
        "value": value,
        "value_cumulative": cumulative,
        "expected_utility": eu,
        "decision_weights": weights,
    });
    let mut text = format!("type {}\n  CPT value            {value:.6}\n  cumulative form      {cumulative:.6}\n  expected utility     {eu:.6}\n  decision weights (by rank):\n", t.label);
    for w in &weights {
        text.push_str(&format!(
            "    {:<12} p={:.6} v={:<12.6} π={:.6}\n",
            w["outcome"].as_str().unwrap_or_default(),
            w["prob"].as_f64().unwrap_or_default(),
            w["value"].as_f64().unwrap_or_default(),
            w["weight"].as_f64().unwrap_or_default()
        ));
    }
    emit(g, &report, &text)?;
    Ok(0)
}

fn check(g: &Global, f: &GameFiles, mediated: bool) -> Result<u8, CliError> {
    let env = load_env(&f.env)?;
    let prior = load_prior(f.prior.as_deref(), &env)?;
    let prior = require_prior(&prior, f.kind)?;
    let mut mech = load_mechanism(&f.mechanism, &env)?;
    if mediated {
        if let AnyMechanism::Plain(m) = &mech {
            mech = AnyMechanism::Mediated(lift_unmediated(m));
        }
    }
    let tau = load_strategy(&f.strategy, &env, &mech)?;
    let report = dispatch!(&mech, m => run_check(m, &env, prior, &tau, f.kind, g))?;
    let l = labels(&env, &mech);
    let kind = EquilibriumKind::from(f.kind).as_str();
    let mut value = render::equilibrium_json(&report, &l);
    value["kind"] = json!(kind);
    value["mechanism"] = json!(mech.kind());
    emit(
        g,
        &value,
        &format!(
            "{kind} check of a {} mechanism\n{}",
            mech.kind(),
            render::equilibrium_text(&report, &l)
        ),
    )?;
    Ok(if report.is_ok() { 0 } else { 1 })
}

struct Revealed {
    direct: AnyMechanism,
    truthful: MediatedStrategy<f64>,
    verify: VerifyReport<f64>,
    stats: Value,
}

fn stats_json<M>(r: &TransformResult<f64, M>) -> Value {
    json!({
        "messages_per_player": r.stats.messages_per_player,
        "profiles": r.stats.profiles,
        "pruned_messages": r.stats.pruned_messages.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    })
}

fn reveal(g: &Global, f: &GameFiles, public: bool) -> Result<u8, CliError> {
    let env = load_env(&f.env)?;
    let prior = load_prior(f.prior.as_deref(), &env)?;
    let prior = require_prior(&prior, f.kind)?;
    let mech = load_mechanism(&f.mechanism, &env)?;
    let tau = load_strategy(&f.strategy, &env, &mech)?;
    let kind: EquilibriumKind = f.kind.into();

    let input = dispatch!(&mech, m => run_check(m, &env, prior, &tau, f.kind, g))?;
    let l = labels(&env, &mech);
    if !input.is_ok() {
        let mut value = json!({ "input": render::equilibrium_json(&input, &l) });
        value["kind"] = json!(kind.as_str());
        let text = format!(
            "input strategy is not a {} equilibrium; nothing transformed\n{}",
            kind.as_str(),
            render::equilibrium_text(&input, &l)
        );
        emit_report_only(g, &value, &text)?;
        return Ok(1);
    }

    let topts = TransformOptions {
        cap: g.cap,
        ..TransformOptions::default()
    };
    let vopts = VerifyOptions {
        seed: g.seed,
        candidates: candidates(g),
        tolerances: tolerances(g),
        ..VerifyOptions::default()
    };
    let revealed = if public {
        let original: PubliclyMediatedMechanism<f64> = match &mech {
            AnyMechanism::Plain(m) => PubliclyMediatedMechanism::from_mechanism(m),
            AnyMechanism::Public(m) => m.clone(),
            AnyMechanism::Mediated(_) => {
                return Err(CliError::Usage(
                    "--public needs a plain or publicly mediated mechanism".into(),
                ))
            }
        };
        let r = to_direct_public(&original, &env, &tau, &topts)?;
        let verify = verify_transform(&original, &tau, &r, &env, prior, kind, &vopts)?;
        Revealed {
            stats: stats_json(&r),
            truthful: r.truthful,
            direct: AnyMechanism::Public(r.mechanism),
            verify,
        }
    } else {
        let original = match &mech {
            AnyMechanism::Plain(m) => lift_unmediated(m),
            AnyMechanism::Public(m) => lift_public(m),
            AnyMechanism::Mediated(m) => m.clone(),
        };
        let r = to_direct_mediated(&original, &env, &tau, &topts)?;
        let verify = verify_transform(&original, &tau, &r, &env, prior, kind, &vopts)?;
        Revealed {
            stats: stats_json(&r),
            truthful: r.truthful,
            direct: AnyMechanism::Mediated(r.mechanism),
            verify,
        }
    };

    let dl = labels(&env, &revealed.direct);
    let mut value = render::verify_json(&revealed.verify, &l, &dl);
    value["stats"] = revealed.stats.clone();
    value["public"] = json!(public);
    let mut text = format!(
        "direct {} mechanism: {} message profiles, messages per player {}\n",
        if public {
            "publicly mediated"
        } else {
            "mediated"
        },
        revealed.stats["profiles"],
        revealed.stats["messages_per_player"]
    );
    text.push_str(&render::verify_text(&revealed.verify, &dl));
    if g.json {
        println!("{}", pretty(&value));
    } else {
        print!("{text}");
    }
    if let Some(dir) = out_dir(g)? {
        write(
            &dir.join("mechanism.json"),
            &schema::mechanism_json(&revealed.direct, &env.allocations),
        )?;
        write(
            &dir.join("strategy.json"),
            &schema::strategy_json(&revealed.truthful, &env, &revealed.direct),
        )?;
        write(&dir.join("report.json"), &value)?;
    }
    Ok(if revealed.verify.passed() { 0 } else { 1 })
}

/// For commands whose `--out` is a directory: the report goes to `report.json`.
fn emit_report_only(g: &Global, value: &Value, text: &str) -> Result<(), CliError> {
    if g.json {
        println!("{}", pretty(value));
    } else {
        print!("{text}");
    }
    if let Some(dir) = out_dir(g)? {
        write(&dir.join("report.json"), value)?;
    }
    Ok(())
}

fn reduce_eut(
    g: &Global,
    env_path: &Path,
    prior: Option<&Path>,
    mechanism: &Path,
    strategy: &Path,
) -> Result<u8, CliError> {
    let env = load_env(env_path)?;
    let prior = load_prior(prior, &env)?;
    let mech = load_mechanism(mechanism, &env)?;
    let AnyMechanism::Plain(plain) = &mech else {
        return Err(CliError::Usage("reduce-eut needs a plain mechanism".into()));
    };
    let tau = load_strategy(strategy, &env, &mech)?;
    let sigma: Strategy<f64> =
        schema::plain_strategy(&tau).expect("plain mechanisms have one message");
    let red = reduce_environment_eut(&env, prior.as_ref(), plain, &sigma)?;
    let rmech = AnyMechanism::Plain(red.mechanism.clone());
    let bundle = json!({
        "environment": schema::environment_json(&red.env),
        "prior": red.prior.as_ref().map(|p| schema::prior_json(p, &red.env)),
        "mechanism": schema::mechanism_json(&rmech, &red.env.allocations),
        "strategy": schema::strategy_json(&red.sigma.to_mediated(), &red.env, &rmech),
    });
    let mut text = String::from("reduced environment (type values per allocation):\n");
    for (i, ts) in red.env.type_sets.iter().enumerate() {
        for t in ts {
            let vals: Vec<String> = red
                .env
                .allocations
                .iter()
                .zip(&t.value_fn.values)
                .map(|(a, v)| format!("{a}={v:.6}"))
                .collect();
            text.push_str(&format!(
                "  player {} type {}: {}\n",
                i + 1,
                t.label,
                vals.join(", ")
            ));
        }
    }
    if g.json {
        println!("{}", pretty(&bundle));
    } else {
        print!("{text}");
    }
    if let Some(dir) = out_dir(g)? {
        write(&dir.join("environment.json"), &bundle["environment"])?;
        if !bundle["prior"].is_null() {
            write(&dir.join("prior.json"), &bundle["prior"])?;
        }
        write(&dir.join("mechanism.json"), &bundle["mechanism"])?;
        write(&dir.join("strategy.json"), &bundle["strategy"])?;
    }
    Ok(0)
}

fn ic(
    g: &Global,
    env_path: &Path,
    prior: Option<&Path>,
    rule: &Path,
    kind: Kind,
    player: Option<usize>,
) -> Result<u8, CliError> {
    let env = load_env(env_path)?;
    let prior = load_prior(prior, &env)?;
    let prior = require_prior(&prior, kind)?;
    let rj: schema::RuleJson = schema::read(rule)?;
    let f = schema::acf(&rj, &env).map_err(schema::attach(rule))?;
    let players: Vec<usize> = match player {
        Some(p) if p >= 1 && p <= env.n_players() => vec![p - 1],
        Some(p) => {
            return Err(CliError::Usage(format!(
                "--player must be between 1 and {}, got {p}",
                env.n_players()
            )))
        }
        None => (0..env.n_players()).collect(),
    };
    let (tol, cands) = (tolerances(g), candidates(g));
    let reports = players
        .par_iter()
        .map(|&i| check_ic(&f, i, &env, prior, kind.into(), &cands, &tol))
        .collect::<Result<Vec<_>, _>>()?;
    let l = direct_labels(&env);
    let kind_name = EquilibriumKind::from(kind).as_str();
    let mut text = String::new();
    let mut per = Vec::new();
    for (&i, r) in players.iter().zip(&reports) {
        text.push_str(&format!("player {} ({kind_name}) ", i + 1));
        text.push_str(&render::equilibrium_text(r, &l));
        let mut v = render::equilibrium_json(r, &l);
        v["player"] = json!(i + 1);
        per.push(v);
    }
    let ok = reports.iter().all(|r| r.is_ok());
    emit(
        g,
        &json!({ "kind": kind_name, "incentive_compatible": ok, "players": per }),
        &text,
    )?;
    Ok(if ok { 0 } else { 1 })
}

fn couple(g: &Global, rep_path: &Path) -> Result<u8, CliError> {
    let j: schema::RepresentationJson = schema::read(rep_path)?;
    let (f, rep) = schema::representation(&j).map_err(schema::attach(rep_path))?;
    let profile = |k: usize| -> Vec<String> {
        f.space
            .decode(k)
            .iter()
            .enumerate()
            .map(|(i, &t)| j.type_sets[i][t].clone())
            .collect()
    };
    let mut text = String::new();
    let mut profiles = Vec::new();
    for theta in 0..f.space.size() {
        let (abar, kernel) = canonical_coupling(theta, &rep, &f)?;
        let residual = coupling_residual(&abar, &kernel, theta, &rep);
        let mut v = json!({ "types": profile(theta), "canonical_residual": residual });
        text.push_str(&format!(
            "profile ({}): canonical coupling residual {residual:.3e}",
            profile(theta).join(", ")
        ));
        if rep.n_players() == 2 {
            let s = schell_feasible(&abar, theta, &rep, &f)?;
            v["inequalities"] = json!({ "marginals": s.marginals, "families": s.families, "feasible": s.feasible() });
            text.push_str(&format!(
                ", inequality test {}",
                if s.feasible() { "passed" } else { "failed" }
            ));
        }
        text.push('\n');
        profiles.push(v);
    }
    let outcome = common_coupling_exists(&rep, &f)?;
    let common = match &outcome {
        CouplingOutcome::Found { abar, kernels } => {
            let worst = (0..f.space.size())
                .map(|t| coupling_residual(abar, &kernels[t], t, &rep))
                .fold(0.0, f64::max);
            let space = ProfileSpace::new(rep.dims());
            let cells: Vec<Value> = abar
                .a
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(k, &x)| json!({ "components": space.decode(k).iter().map(|c| c + 1).collect::<Vec<_>>(), "mass": x }))
                .collect();
            text.push_str(&format!(
                "common coupling: found (max residual {worst:.3e})\n"
            ));
            json!({ "status": "found", "max_residual": worst, "matrix": cells })
        }
        CouplingOutcome::Infeasible { phase1_optimum } => {
            text.push_str(&format!(
                "common coupling: none exists (phase-1 optimum {phase1_optimum:.3e})\n"
            ));
            json!({ "status": "infeasible", "phase1_optimum": phase1_optimum })
        }
        CouplingOutcome::Indeterminate {
            phase1_optimum,
            residual,
        } => {
            text.push_str(&format!("common coupling: undecided (phase-1 optimum {phase1_optimum:.3e}, residual {residual:.3e})\n"));
            json!({ "status": "indeterminate", "phase1_optimum": phase1_optimum, "residual": residual })
        }
    };
    emit(
        g,
        &json!({ "profiles": profiles, "common_coupling": common }),
        &text,
    )?;
    Ok(if outcome.is_found() { 0 } else { 1 })
}

fn examples(g: &Global, which: &str, export: bool) -> Result<u8, CliError> {
    if export {
        let dir =
            out_dir(g)?.ok_or_else(|| CliError::Usage("--export needs --out <dir>".into()))?;
        export_bundles(dir)?;
        println!("wrote example bundles to {}", dir.display());
        return Ok(0);
    }
    let groups = Group::parse(which).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown example group {which:?}; use prelec, market, public, coupling, 1-3 or all"
        ))
    })?;
    let start = std::time::Instant::now();
    let results = groups
        .par_iter()
        .map(|gr| golden::run(&[*gr]))
        .collect::<Result<Vec<_>, _>>()?;
    let checks: Vec<_> = results.into_iter().flatten().collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    let mut text: String = checks.iter().map(|c| format!("{c}\n")).collect();
    text.push_str(&format!(
        "{passed}/{} checks passed in {:.2?}\n",
        checks.len(),
        start.elapsed()
    ));
    let value = json!({
        "passed": passed,
        "total": checks.len(),
        "checks": checks.iter().map(|c| json!({
            "group": c.group.name(),
            "name": c.name,
            "expected": c.expected,
            "actual": c.actual,
            "passed": c.passed,
        })).collect::<Vec<_>>(),
    });
    emit(g, &value, &text)?;
    Ok(if passed == checks.len() { 0 } else { 1 })
}

fn write_game(
    dir: &Path,
    env: &Environment<f64>,
    prior: Option<&Prior<f64>>,
    mech: &Mechanism<f64>,
    sigma: &Strategy<f64>,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(dir.display().to_string(), e))?;
    let m = AnyMechanism::Plain(mech.clone());
    write(
        &dir.join("environment.json"),
        &schema::environment_json(env),
    )?;
    if let Some(p) = prior {
        write(&dir.join("prior.json"), &schema::prior_json(p, env))?;
    }
    write(
        &dir.join("mechanism.json"),
        &schema::mechanism_json(&m, &env.allocations),
    )?;
    write(
        &dir.join("strategy.json"),
        &schema::strategy_json(&sigma.to_mediated(), env, &m),
    )
}

fn export_bundles(dir: &Path) -> Result<(), CliError> {
    let ex = catalog::dominance_gap::<f64>();
    let d = dir.join("prelec-dominance");
    write_game(&d, &ex.env, Some(&ex.prior), &ex.mechanism, &ex.sigma)?;
    // player 1's UP type facing an even mix of the first two allocations
    let outcomes = &ex.env.outcome_sets[0];
    write(
        &d.join("type-up.json"),
        &schema::type_json(ex.env.cpt_type(0, 0), outcomes),
    )?;
    let mix = ex.env.pushforward_dense(0, &[0.5, 0.5, 0.0]);
    let lottery = schema::LotteryJson {
        entries: mix
            .iter()
            .zip(outcomes)
            .filter(|(&p, _)| p != 0.0)
            .map(|(&prob, o)| schema::LotteryEntry {
                outcome: o.clone(),
                prob,
            })
            .collect(),
    };
    write(&d.join("lottery-mix.json"), &lottery)?;

    let ex = catalog::dominant_direct_gap::<f64>();
    let d = dir.join("prelec-choice");
    write_game(&d, &ex.env, None, &ex.mechanism, &ex.sigma)?;
    write(&d.join("rule.json"), &schema::acf_json(&ex.f, &ex.env))?;

    let ex = catalog::three_type_market::<f64>();
    let d = dir.join("market");
    write_game(&d, &ex.env, Some(&ex.prior), &ex.indirect, &ex.sigma)?;
    write(&d.join("rule.json"), &schema::acf_json(&ex.f_star, &ex.env))?;
    let third = 1.0 / 3.0;
    let direct = Mechanism::direct(&ex.env, &ex.special_acf(third, third, third))?;
    write_game(
        &dir.join("market-direct"),
        &ex.env,
        Some(&ex.prior),
        &direct,
        &Strategy::truthful(&ex.env),
    )?;

    let ex = catalog::public_gap::<f64>();
    let d = dir.join("public-gap");
    write_game(&d, &ex.env, Some(&ex.prior), &ex.mechanism, &ex.sigma)?;
    write(&d.join("rule.json"), &schema::acf_json(&ex.f_star, &ex.env))?;

    let ex = catalog::coupling_gap::<f64>();
    let d = dir.join("coupling");
    std::fs::create_dir_all(&d).map_err(|e| CliError::Output(d.display().to_string(), e))?;
    let rep = schema::representation_json(
        std::slice::from_ref(&ex.profiles),
        &ex.allocations,
        &ex.f,
        &ex.rep,
    );
    write(&d.join("representation.json"), &rep)
}
