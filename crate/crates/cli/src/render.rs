//! Reports as JSON values and as plain text.

use cpt_mechlab::dist::ProfileSpace;
use cpt_mechlab::report::{EquilibriumReport, Opponents, Witness};
use cpt_mechlab::revelation::VerifyReport;
use serde_json::{json, Value};

/// Labels needed to name the entries of a witness.
pub struct Labels {
    pub types: Vec<Vec<String>>,
    /// `None` for mechanisms without a mediator.
    pub messages: Option<Vec<Vec<String>>>,
    pub signals: Vec<Vec<String>>,
}

impl Labels {
    fn opponents(&self, player: usize, k: usize) -> Vec<String> {
        let space =
            ProfileSpace::new(self.signals.iter().map(|s| s.len()).collect()).without(player);
        let others: Vec<&Vec<String>> = self
            .signals
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, s)| s)
            .collect();
        space
            .decode(k)
            .iter()
            .zip(others)
            .map(|(&s, l)| l[s].clone())
            .collect()
    }

    fn message(&self, w: &Witness<f64>) -> Option<String> {
        match (&self.messages, w.message) {
            (Some(m), Some(k)) => Some(m[w.player][k].clone()),
            _ => None,
        }
    }
}

/// Witnesses ordered by player, then type, message, signal and deviation labels.
fn ordered<'a>(r: &'a EquilibriumReport<f64>, l: &Labels) -> Vec<&'a Witness<f64>> {
    let mut ws: Vec<&Witness<f64>> = r.witnesses.iter().collect();
    ws.sort_by(|a, b| {
        let key = |w: &Witness<f64>| {
            (
                w.player,
                l.types[w.player][w.ty].clone(),
                l.message(w),
                l.signals[w.player][w.signal].clone(),
                l.signals[w.player][w.deviation].clone(),
            )
        };
        key(a).cmp(&key(b))
    });
    ws
}

fn opponents_json(w: &Witness<f64>, l: &Labels) -> Value {
    match &w.opponents {
        Opponents::Prior => json!("prior"),
        Opponents::Pure(k) => json!({ "signals": l.opponents(w.player, *k) }),
        Opponents::Belief(b) => {
            let entries: Vec<Value> = b
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(k, &p)| json!({ "signals": l.opponents(w.player, k), "prob": p }))
                .collect();
            json!({ "belief": entries })
        }
    }
}

fn opponents_text(w: &Witness<f64>, l: &Labels) -> String {
    match &w.opponents {
        Opponents::Prior => "under the prior".into(),
        Opponents::Pure(k) => format!("against signals ({})", l.opponents(w.player, *k).join(", ")),
        Opponents::Belief(b) => {
            let parts: Vec<String> = b
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(k, &p)| format!("{p:.6}·({})", l.opponents(w.player, k).join(", ")))
                .collect();
            format!("under belief {}", parts.join(" + "))
        }
    }
}

pub fn equilibrium_json(r: &EquilibriumReport<f64>, l: &Labels) -> Value {
    let witnesses: Vec<Value> = ordered(r, l)
        .into_iter()
        .map(|w| {
            let mut v = json!({
                "player": w.player + 1,
                "type": l.types[w.player][w.ty],
                "signal": l.signals[w.player][w.signal],
                "deviation": l.signals[w.player][w.deviation],
                "opponents": opponents_json(w, l),
                "on_path_value": w.on_path_value,
                "deviation_value": w.deviation_value,
                "gap": w.gap,
            });
            if let Some(m) = l.message(w) {
                v["message"] = json!(m);
            }
            v
        })
        .collect();
    json!({
        "verdict": r.verdict.as_str(),
        "holds": r.is_ok(),
        "witnesses": witnesses,
    })
}

pub fn equilibrium_text(r: &EquilibriumReport<f64>, l: &Labels) -> String {
    let mut out = format!("verdict: {}\n", r.verdict.as_str());
    for w in ordered(r, l) {
        let msg = l
            .message(w)
            .map(|m| format!(" after message {m}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "  player {} type {}{}: sending {} instead of {} gives {:.6} > {:.6} (gap {:.3e}) {}\n",
            w.player + 1,
            l.types[w.player][w.ty],
            msg,
            l.signals[w.player][w.deviation],
            l.signals[w.player][w.signal],
            w.deviation_value,
            w.on_path_value,
            w.gap,
            opponents_text(w, l),
        ));
    }
    out
}

pub fn verify_json(v: &VerifyReport<f64>, l: &Labels, direct: &Labels) -> Value {
    let acf_mismatch = v.acf_mismatch.as_ref().map(|p| {
        p.iter()
            .enumerate()
            .map(|(i, &t)| l.types[i][t].clone())
            .collect::<Vec<_>>()
    });
    let identity_mismatch = v.identity_mismatch.as_ref().map(|m| {
        json!({
            "player": m.player + 1,
            "message": direct.messages.as_ref().map(|ms| ms[m.player][m.message].clone()),
            "report": l.types[m.player][m.report],
            "belief": m.belief,
            "direct": m.direct,
            "original": m.original,
        })
    });
    json!({
        "kind": v.kind.as_str(),
        "passed": v.passed(),
        "acf_max_diff": v.acf_max_diff,
        "acf_mismatch": acf_mismatch,
        "equilibrium": equilibrium_json(&v.equilibrium, direct),
        "identity_checks": v.identity_checks,
        "identity_max_diff": v.identity_max_diff,
        "identity_mismatch": identity_mismatch,
    })
}

pub fn verify_text(v: &VerifyReport<f64>, direct: &Labels) -> String {
    let mut out = format!(
        "verification ({}): {}\n",
        v.kind.as_str(),
        if v.passed() { "passed" } else { "FAILED" }
    );
    out.push_str(&format!(
        "  induced rule drift: {:.3e}{}\n",
        v.acf_max_diff,
        if v.acf_ok() { "" } else { " (too large)" }
    ));
    out.push_str(&format!(
        "  lottery identity: {} samples, max drift {:.3e}{}\n",
        v.identity_checks,
        v.identity_max_diff,
        if v.identity_ok() { "" } else { " (too large)" }
    ));
    out.push_str("  truthful strategy ");
    out.push_str(&equilibrium_text(&v.equilibrium, direct));
    out
}
