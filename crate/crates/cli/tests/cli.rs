use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpt-mechlab"))
}

fn bundle(name: &str, file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("bundles")
        .join(name)
        .join(file)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn game(name: &str, prior: bool) -> Vec<String> {
    let mut v = vec![
        "--env".to_string(),
        bundle(name, "environment.json").display().to_string(),
        "--mechanism".into(),
        bundle(name, "mechanism.json").display().to_string(),
        "--strategy".into(),
        bundle(name, "strategy.json").display().to_string(),
    ];
    if prior {
        v.push("--prior".into());
        v.push(bundle(name, "prior.json").display().to_string());
    }
    v
}

fn run_game(cmd: &str, name: &str, prior: bool, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec![cmd.to_string()];
    args.extend(game(name, prior));
    args.extend(extra.iter().map(|s| s.to_string()));
    bin().args(&args).output().expect("binary runs")
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.display().to_string()
}

#[test]
fn all_examples_pass_quickly() {
    let start = std::time::Instant::now();
    let o = run(&["examples", "all", "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], v["total"]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn public_group_includes_the_player_two_value() {
    let o = run(&["examples", "3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("-32.94"));
}

#[test]
fn coupling_group_reports_infeasibility() {
    let o = run(&["examples", "coupling", "--json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"].as_str().unwrap().contains("coupling")));
}

#[test]
fn unknown_example_group_is_an_input_error() {
    assert_eq!(code(&run(&["examples", "7"])), 2);
}

#[test]
fn eval_mixture_and_degenerate_lotteries() {
    let ty = bundle("prelec-dominance", "type-up.json")
        .display()
        .to_string();
    let o = run(&[
        "eval",
        "--json",
        "--lottery",
        &bundle("prelec-dominance", "lottery-mix.json")
            .display()
            .to_string(),
        "--type",
        &ty,
    ]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!((v["value"].as_f64().unwrap() - 1.9851).abs() < 5e-5);
    assert!((v["value"].as_f64().unwrap() - v["value_cumulative"].as_f64().unwrap()).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let l = write_json(
        dir.path(),
        "l.json",
        &json!({ "entries": [{ "outcome": "III", "prob": 1.0 }] }),
    );
    let v = stdout_json(&run(&["eval", "--json", "--lottery", &l, "--type", &ty]));
    assert_eq!(v["value"].as_f64().unwrap(), 1.99);
}

#[test]
fn eval_rejects_short_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let l = write_json(
        dir.path(),
        "l.json",
        &json!({ "entries": [{ "outcome": "I", "prob": 0.5 }, { "outcome": "II", "prob": 0.4 }] }),
    );
    let ty = bundle("prelec-dominance", "type-up.json")
        .display()
        .to_string();
    let o = run(&["eval", "--lottery", &l, "--type", &ty]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("entries"));
}

#[test]
fn schema_errors_name_the_offending_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut env: Value = serde_json::from_str(
        &std::fs::read_to_string(bundle("market", "environment.json")).unwrap(),
    )
    .unwrap();
    env["type_sets"][1][2]["w_gain"] = json!({ "kind": "cubic" });
    let e = write_json(dir.path(), "env.json", &env);
    let o = bin()
        .args([
            "check",
            "--env",
            &e,
            "--prior",
            &bundle("market", "prior.json").display().to_string(),
        ])
        .args([
            "--mechanism",
            &bundle("market", "mechanism.json").display().to_string(),
        ])
        .args([
            "--strategy",
            &bundle("market", "strategy.json").display().to_string(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("type_sets[1][2].w_gain"), "{err}");

    env["type_sets"][1][2]["w_gain"] = json!({ "kind": "prelec", "alpha": -1.0 });
    let e = write_json(dir.path(), "env.json", &env);
    let o = bin()
        .args([
            "check",
            "--env",
            &e,
            "--prior",
            &bundle("market", "prior.json").display().to_string(),
        ])
        .args([
            "--mechanism",
            &bundle("market", "mechanism.json").display().to_string(),
        ])
        .args([
            "--strategy",
            &bundle("market", "strategy.json").display().to_string(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("type_sets[1][2].w_gain"));
}

#[test]
fn market_equilibrium_holds() {
    let o = run_game("check", "market", true, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn truthful_direct_market_rule_fails() {
    let o = run_game("check", "market-direct", true, &["--json"]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "fails");
    assert!(v["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w["type"] == "MF" && w["deviation"] == "SF"));
}

#[test]
fn belief_dominance_is_refuted_at_the_even_belief() {
    let o = run_game(
        "check",
        "prelec-dominance",
        false,
        &["--kind", "belief-dominant", "--json"],
    );
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "refuted");
    let even = v["witnesses"].as_array().unwrap().iter().find(|w| {
        w["opponents"]["belief"]
            .as_array()
            .is_some_and(|b| b.len() == 2 && b.iter().all(|e| e["prob"] == 0.5))
    });
    let w = even.expect("witness at the even belief");
    assert!((w["deviation_value"].as_f64().unwrap() - 1.99).abs() < 1e-9);
    assert!((w["on_path_value"].as_f64().unwrap() - 1.9851).abs() < 5e-5);

    let o = run_game("check", "prelec-dominance", false, &["--kind", "dominant"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn bayes_nash_needs_a_prior() {
    assert_eq!(code(&run_game("check", "market", false, &[])), 2);
}

#[test]
fn mediated_reveal_writes_a_checkable_mechanism() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rev");
    let o = run_game(
        "reveal",
        "market",
        true,
        &["--out", out.to_str().unwrap(), "--json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    assert!(v["acf_max_diff"].as_f64().unwrap() <= 1e-12);
    assert!(v["identity_max_diff"].as_f64().unwrap() <= 1e-12);
    let o = bin()
        .args([
            "check",
            "--env",
            &bundle("market", "environment.json").display().to_string(),
        ])
        .args([
            "--prior",
            &bundle("market", "prior.json").display().to_string(),
        ])
        .args(["--mechanism", out.join("mechanism.json").to_str().unwrap()])
        .args(["--strategy", out.join("strategy.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn public_reveal_of_the_player_choice_rule() {
    for kind in ["dominant", "belief-dominant"] {
        let o = run_game(
            "reveal",
            "prelec-choice",
            false,
            &["--public", "--kind", kind, "--json"],
        );
        assert_eq!(
            code(&o),
            0,
            "{kind}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
        assert_eq!(stdout_json(&o)["public"], true);
    }
}

#[test]
fn reveal_refuses_non_equilibria() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rev");
    let o = run_game(
        "reveal",
        "market-direct",
        true,
        &["--out", out.to_str().unwrap()],
    );
    assert_eq!(code(&o), 1);
    assert!(!out.join("mechanism.json").exists());
    assert!(out.join("report.json").exists());
}

#[test]
fn reveal_cap_is_exit_three() {
    assert_eq!(
        code(&run_game("reveal", "market", true, &["--cap", "3"])),
        3
    );
}

#[test]
fn reduce_eut_rejects_prospect_theory_types() {
    assert_eq!(
        code(&run_game("reduce-eut", "prelec-choice", false, &[])),
        2
    );
}

fn eut_game(dir: &Path) -> Vec<String> {
    let linear = json!({ "kind": "linear" });
    let ty = |label: &str, a: f64, b: f64| json!({ "label": label, "values": { "x": a, "y": b }, "w_gain": linear, "w_loss": linear });
    let env = json!({
        "players": 2,
        "type_sets": [[ty("lo", 1.0, -1.0), ty("hi", 3.0, 0.5)], [ty("only", 0.0, 2.0)]],
        "allocations": ["A", "B"],
        "outcome_sets": [["x", "y"], ["x", "y"]],
        "zeta": {
            "A": [{ "prob": 0.7, "outcomes": ["x", "y"] }, { "prob": 0.3, "outcomes": ["y", "y"] }],
            "B": [{ "prob": 1.0, "outcomes": ["y", "x"] }]
        }
    });
    let prior = json!({ "entries": [{ "types": ["lo", "only"], "prob": 0.4 }, { "types": ["hi", "only"], "prob": 0.6 }] });
    let mech = json!({
        "kind": "plain",
        "signal_sets": [["l", "h"], ["s"]],
        "rule": [
            { "signals": ["l", "s"], "alloc": { "B": 1.0 } },
            { "signals": ["h", "s"], "alloc": { "A": 0.5, "B": 0.5 } }
        ]
    });
    let strat = json!({ "kind": "plain", "players": [{ "lo": { "l": 1.0 }, "hi": { "h": 1.0 } }, { "only": { "s": 1.0 } }] });
    vec![
        "--env".into(),
        write_json(dir, "env.json", &env),
        "--prior".into(),
        write_json(dir, "prior.json", &prior),
        "--mechanism".into(),
        write_json(dir, "mech.json", &mech),
        "--strategy".into(),
        write_json(dir, "strat.json", &strat),
    ]
}

#[test]
fn reduce_eut_keeps_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let args = eut_game(dir.path());
    let before = bin()
        .arg("check")
        .args(&args)
        .arg("--json")
        .output()
        .unwrap();
    let out = dir.path().join("red");
    let o = bin()
        .arg("reduce-eut")
        .args(&args)
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let after = bin()
        .args(["check", "--json"])
        .args(["--env", out.join("environment.json").to_str().unwrap()])
        .args(["--prior", out.join("prior.json").to_str().unwrap()])
        .args(["--mechanism", out.join("mechanism.json").to_str().unwrap()])
        .args(["--strategy", out.join("strategy.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&before), code(&after));
    assert_eq!(
        stdout_json(&before)["verdict"],
        stdout_json(&after)["verdict"]
    );
}

#[test]
fn ic_of_the_player_choice_rule() {
    let env = bundle("prelec-choice", "environment.json")
        .display()
        .to_string();
    let rule = bundle("prelec-choice", "rule.json").display().to_string();
    let o = run(&[
        "ic", "--kind", "dominant", "--env", &env, "--rule", &rule, "--json",
    ]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["players"][0]["holds"], false);
    assert_eq!(v["players"][1]["holds"], true);
    assert_eq!(
        code(&run(&[
            "ic", "--kind", "dominant", "--player", "2", "--env", &env, "--rule", &rule
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "ic", "--player", "3", "--kind", "dominant", "--env", &env, "--rule", &rule
        ])),
        2
    );
}

#[test]
fn couple_printed_tables_and_trivial_representation() {
    let rep = bundle("coupling", "representation.json");
    let o = run(&["couple", "--json", "--rep", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["common_coupling"]["status"], "infeasible");
    for p in v["profiles"].as_array().unwrap() {
        assert!(p["canonical_residual"].as_f64().unwrap() <= 1e-9);
    }

    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let f = r["rule"].clone();
    for comps in r["components"].as_array_mut().unwrap() {
        for c in comps.as_array_mut().unwrap() {
            c["rule"] = f.clone();
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "rep.json", &r);
    let o = run(&["couple", "--json", "--rep", &p]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["common_coupling"]["status"], "found");
    assert!(v["common_coupling"]["max_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn out_file_receives_the_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run_game("check", "market", true, &["--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "holds");
}

#[test]
fn thread_variable_is_validated() {
    let o = bin()
        .env("CPT_MECHLAB_THREADS", "zero")
        .args(["examples", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = bin()
        .env("CPT_MECHLAB_THREADS", "1")
        .args(["examples", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn output_is_deterministic() {
    let a = run_game("check", "market-direct", true, &["--json"]);
    let b = bin()
        .env("CPT_MECHLAB_THREADS", "3")
        .arg("check")
        .args(game("market-direct", true))
        .arg("--json")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn shipped_bundles_match_a_fresh_export() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "examples",
        "--export",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("bundles");
    for group in std::fs::read_dir(dir.path()).unwrap() {
        let group = group.unwrap().path();
        for file in std::fs::read_dir(&group).unwrap() {
            let file = file.unwrap().path();
            let rel = file.strip_prefix(dir.path()).unwrap();
            let fresh = std::fs::read_to_string(&file).unwrap();
            let old = std::fs::read_to_string(shipped.join(rel)).unwrap_or_default();
            assert_eq!(fresh, old, "{} is stale", rel.display());
        }
    }
}
