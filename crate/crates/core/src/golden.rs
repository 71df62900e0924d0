//! Regression harness over the catalog instances.
//!
//! Each check recomputes a published value through the library and compares it at
//! a declared tolerance. Used by the `examples` command and the test suites.

use std::fmt;

use crate::catalog;
use crate::cpt::{cpt_value, CptType, Lottery};
use crate::environment::Acf;
use crate::ic::{common_coupling_exists, is_dominant_ic};
use crate::mechanism::{
    check_belief_dominant, induced_acf, induced_belief, is_bayes_nash, is_dominant,
    BeliefCandidates, Mechanism, Strategy,
};
use crate::mediated::{lift_unmediated, PubliclyMediatedMechanism};
use crate::numerics::{affine_crossings, maximize_piecewise_1d, segment_breakpoints};
use crate::report::{Opponents, Verdict};
use crate::revelation::{
    public_convexity_decomposition_check, to_direct_mediated, to_direct_public, verify_transform,
    EquilibriumKind, TransformOptions, VerifyOptions,
};
use crate::scalar::Tolerances;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// Prelec player: dominant but not belief-dominant, and the player-choice rule.
    Prelec,
    /// Three-type market with an indirect Bayes-Nash mechanism.
    Market,
    /// Two-type instance separating public mediation from non-mediated mechanisms.
    Public,
    /// Representations without a common coupling.
    Coupling,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::Prelec, Group::Market, Group::Public, Group::Coupling];

    pub fn name(self) -> &'static str {
        match self {
            Group::Prelec => "prelec",
            Group::Market => "market",
            Group::Public => "public",
            Group::Coupling => "coupling",
        }
    }

    /// Accepts the group name or its number.
    pub fn parse(s: &str) -> Option<Vec<Group>> {
        Some(match s {
            "1" | "prelec" => vec![Group::Prelec],
            "2" | "market" => vec![Group::Market],
            "3" | "public" => vec![Group::Public],
            "coupling" => vec![Group::Coupling],
            "all" => Group::ALL.to_vec(),
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenCheck {
    pub group: Group,
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

impl fmt::Display for GoldenCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: expected {}, got {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.group.name(),
            self.name,
            self.expected,
            self.actual
        )
    }
}

struct Sink {
    group: Group,
    out: Vec<GoldenCheck>,
}

impl Sink {
    fn value(&mut self, name: &str, expected: f64, actual: f64, tol: f64) {
        self.out.push(GoldenCheck {
            group: self.group,
            name: name.into(),
            expected: format!("{expected} ± {tol:e}"),
            actual: format!("{actual:.6}"),
            passed: (actual - expected).abs() <= tol,
        });
    }

    fn flag<V: fmt::Debug + PartialEq>(&mut self, name: &str, expected: V, actual: V) {
        self.out.push(GoldenCheck {
            group: self.group,
            name: name.into(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            passed: expected == actual,
        });
    }

    fn holds(&mut self, name: &str, ok: bool, detail: String) {
        self.out.push(GoldenCheck {
            group: self.group,
            name: name.into(),
            expected: "true".into(),
            actual: if ok {
                "true".into()
            } else {
                format!("false ({detail})")
            },
            passed: ok,
        });
    }
}

pub fn run(groups: &[Group]) -> Result<Vec<GoldenCheck>> {
    let mut all = Vec::new();
    for &g in groups {
        let mut s = Sink {
            group: g,
            out: Vec::new(),
        };
        match g {
            Group::Prelec => prelec(&mut s)?,
            Group::Market => market(&mut s)?,
            Group::Public => public(&mut s)?,
            Group::Coupling => coupling(&mut s)?,
        }
        all.extend(s.out);
    }
    Ok(all)
}

fn value_of(p: &[f64], ty: &CptType<f64>) -> f64 {
    cpt_value(&Lottery::from_dense(p), ty)
}

fn affine(p0: &[f64], p1: &[f64], x: f64) -> Vec<f64> {
    p0.iter()
        .zip(p1)
        .map(|(a, b)| (1.0 - x) * a + x * b)
        .collect()
}

/// Exact maximum of `V(base + x dx + y dy)` over `x, y >= 0, x + y <= 1` for
/// piecewise-linear weighting: the value is linear between the lines where a
/// cumulative probability meets a kink, so some arrangement vertex is optimal.
pub fn max_on_triangle(
    base: &[f64],
    dx: &[f64],
    dy: &[f64],
    ty: &CptType<f64>,
) -> Option<(f64, f64, f64)> {
    let kg = ty.weight_gain.kinks()?;
    let kl = ty.weight_loss.kinks()?;
    let n = base.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        ty.value_fn
            .get(b)
            .partial_cmp(&ty.value_fn.get(a))
            .unwrap()
            .then(a.cmp(&b))
    });
    let gains = order.iter().filter(|&&o| ty.value_fn.get(o) >= 0.0).count();
    // lines a x + b y = c
    let mut lines: Vec<(f64, f64, f64)> = vec![(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 1.0, 1.0)];
    let mut push_cum = |idx: &[usize], kinks: &[f64]| {
        let (mut c0, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for &o in idx {
            c0 += base[o];
            cx += dx[o];
            cy += dy[o];
            for &k in kinks {
                lines.push((cx, cy, k - c0));
            }
        }
    };
    push_cum(&order[..gains], &kg);
    let losses: Vec<usize> = order[gains..].iter().rev().copied().collect();
    push_cum(&losses, &kl);
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = lines[i];
            let (a2, b2, c2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-14 {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / det;
            let y = (a1 * c2 - a2 * c1) / det;
            if x < -1e-12 || y < -1e-12 || x + y > 1.0 + 1e-12 {
                continue;
            }
            let (x, y) = (x.max(0.0), y.max(0.0));
            let p: Vec<f64> = (0..n)
                .map(|k| (base[k] + x * dx[k] + y * dy[k]).max(0.0))
                .collect();
            let v = value_of(&p, ty);
            if best.is_none_or(|(bv, _, _)| v > bv) {
                best = Some((v, x, y));
            }
        }
    }
    best
}

fn prelec(s: &mut Sink) -> Result<()> {
    let ex = catalog::dominance_gap::<f64>();
    let up = ex.env.cpt_type(0, 0);
    let w = &up.weight_gain;
    s.value("Prelec w(0.25)", 0.3081, w.eval(0.25)?, 5e-5);
    s.value("Prelec w(0.5)", 0.4349, w.eval(0.5)?, 5e-5);
    s.value("Prelec w(0.75)", 0.5849, w.eval(0.75)?, 5e-5);
    s.value("UP value of sure a", 2.0, ex.env.utility_u(0, 0, 0), 1e-4);
    s.value("UP value of sure b", 2.0, ex.env.utility_u(0, 0, 1), 1e-4);
    s.value("UP value of sure c", 1.99, ex.env.utility_u(0, 0, 2), 1e-12);
    s.value(
        "UP value of even a/b mixture",
        1.9851,
        ex.env.utility_w(0, 0, &[0.5, 0.5, 0.0]),
        5e-5,
    );
    let tol = Tolerances::default();
    s.flag(
        "dominant check",
        Verdict::Holds,
        is_dominant(&ex.mechanism, &ex.env, &ex.sigma, &tol)?.verdict,
    );
    let r = check_belief_dominant(
        &ex.mechanism,
        &ex.env,
        &ex.sigma,
        &BeliefCandidates::default(),
        &tol,
    )?;
    s.flag("belief-dominant check", Verdict::Refuted, r.verdict);
    let w = r.witnesses.iter().find(|w| {
        w.player == 0 && matches!(&w.opponents, Opponents::Belief(b) if (b[0] - 0.5).abs() < 1e-12 && (b[1] - 0.5).abs() < 1e-12)
    });
    s.holds(
        "refuting belief (0.5, 0.5): 1.99 beats 1.9851",
        w.is_some_and(|w| {
            (w.deviation_value - 1.99).abs() < 1e-9 && (w.on_path_value - 1.9851).abs() < 5e-5
        }),
        format!("{w:?}"),
    );

    let dd = catalog::dominant_direct_gap::<f64>();
    s.flag(
        "player-choice rule: dominant",
        Verdict::Holds,
        is_dominant(&dd.mechanism, &dd.env, &dd.sigma, &tol)?.verdict,
    );
    let induced = induced_acf(&dd.mechanism, &dd.env, None, &dd.sigma)?;
    s.value(
        "player-choice rule: induced rule",
        0.0,
        induced.acf.max_abs_diff(&dd.f),
        1e-12,
    );
    let r = is_dominant_ic(&dd.f, 0, &dd.env)?;
    let w = r.witnesses.first();
    s.holds(
        "player-choice rule: truthful UP deviates to DN",
        !r.is_ok() && w.is_some_and(|w| w.ty == 0 && w.deviation == 1),
        format!("{w:?}"),
    );
    let public = PubliclyMediatedMechanism::from_mechanism(&dd.mechanism);
    let tau = dd.sigma.to_mediated();
    let t = to_direct_public(&public, &dd.env, &tau, &TransformOptions::default())?;
    for kind in [EquilibriumKind::Dominant, EquilibriumKind::BeliefDominant] {
        let v = verify_transform(
            &public,
            &tau,
            &t,
            &dd.env,
            None,
            kind,
            &VerifyOptions::default(),
        )?;
        s.holds(
            &format!("public transform verifies ({})", kind.as_str()),
            v.passed(),
            format!("{v:?}"),
        );
    }
    Ok(())
}

fn market(s: &mut Sink) -> Result<()> {
    let ex = catalog::three_type_market::<f64>();
    let (mf, uf, sf) = (0, 1, 2);
    let sig = |name: &str| {
        ex.indirect.signal_sets[0]
            .iter()
            .position(|x| x == name)
            .unwrap()
    };
    let w = |ty: usize, signal: usize| -> Result<f64> {
        let mu = induced_belief(&ex.indirect, &ex.env, &ex.prior, &ex.sigma, 0, ty, signal)?;
        Ok(ex.env.utility_w(0, ty, &mu))
    };
    s.value("UF signalling UF", -227.0312, w(uf, sig("UF"))?, 5e-5);
    s.value("UF signalling MFa", -227.8125, w(uf, sig("MFa"))?, 5e-5);
    s.value("UF signalling MFb", -235.6250, w(uf, sig("MFb"))?, 5e-5);
    s.value("MF signalling MFa", 5.8243, w(mf, sig("MFa"))?, 5e-5);
    s.value("MF signalling MFb", 5.8243, w(mf, sig("MFb"))?, 5e-5);
    s.value("MF signalling UF", 5.6993, w(mf, sig("UF"))?, 5e-5);
    s.value("MF signalling SF", 5.816, w(mf, sig("SF"))?, 5e-5);
    let tol = Tolerances::default();
    s.flag(
        "indirect mechanism Bayes-Nash",
        Verdict::Holds,
        is_bayes_nash(&ex.indirect, &ex.env, &ex.prior, &ex.sigma, &tol)?.verdict,
    );
    let induced = induced_acf(&ex.indirect, &ex.env, Some(&ex.prior), &ex.sigma)?;
    s.value(
        "induced rule equals target",
        0.0,
        induced.acf.max_abs_diff(&ex.f_star),
        1e-12,
    );

    // UF facing (x/2, 1/2 - x/2, 0, 1/2 - x/2, x/2)
    let ufty = ex.env.cpt_type(0, uf);
    let p0 = [0.0, 0.5, 0.0, 0.5, 0.0];
    let p1 = [0.5, 0.0, 0.0, 0.0, 0.5];
    let bp = segment_breakpoints(&p0, &p1, ufty)?;
    let m = maximize_piecewise_1d(|x| value_of(&affine(&p0, &p1, x), ufty), &bp, 0.0, 1.0)?;
    s.flag("UF a/b mixture argmax", vec![0.5], m.argmax.clone());
    s.value("UF a/b mixture max", -66.25, m.value, 5e-3);

    // MF truthful value at (MF, MF) under rule (x', y', z')
    let mfty = ex.env.cpt_type(0, mf);
    let w_plus = &mfty.weight_gain;
    let kinks = w_plus.kinks().unwrap();
    let inner = |z: f64| {
        2.016 * w_plus.eval_unchecked(18.0 / 32.0 + z / 4.0)
            + 2.8 * w_plus.eval_unchecked(14.0 / 32.0 - z / 4.0)
    };
    let mut bp = affine_crossings(18.0 / 32.0, 0.25, &kinks, 0.0, 1.0);
    bp.extend(affine_crossings(14.0 / 32.0, -0.25, &kinks, 0.0, 1.0));
    let m = maximize_piecewise_1d(inner, &bp, 0.0, 1.0)?;
    s.flag(
        "MF inner-outcome term argmax over z'",
        vec![0.0],
        m.argmax.clone(),
    );
    s.value("MF inner-outcome term max", 2.0743, m.value, 5e-5);
    let lot = |x: f64, y: f64, z: f64| {
        vec![
            3.0 / 32.0 + x / 4.0,
            3.0 / 32.0 + y / 4.0,
            1.0 / 8.0 + z / 2.0,
            3.0 / 32.0 + y / 4.0,
            3.0 / 32.0 + x / 4.0,
        ]
    };
    let (q0, q1) = (lot(0.0, 1.0, 0.0), lot(1.0, 0.0, 0.0));
    let bp = segment_breakpoints(&q0, &q1, mfty)?;
    let m = maximize_piecewise_1d(|x| value_of(&affine(&q0, &q1, x), mfty), &bp, 0.0, 1.0)?;
    s.flag(
        "MF truthful value argmax over x' at z' = 0",
        vec![0.0, 1.0],
        m.argmax.clone(),
    );
    s.value("MF truthful value max at z' = 0", 5.7993, m.value, 5e-5);
    let base = lot(0.0, 0.0, 1.0);
    let dx: Vec<f64> = lot(1.0, 0.0, 0.0)
        .iter()
        .zip(&base)
        .map(|(a, b)| a - b)
        .collect();
    let dy: Vec<f64> = lot(0.0, 1.0, 0.0)
        .iter()
        .zip(&base)
        .map(|(a, b)| a - b)
        .collect();
    let (best, _, _) = max_on_triangle(&base, &dx, &dy, mfty).unwrap();
    s.value(
        "max truthful MF value over all (x', y', z')",
        5.7993,
        best,
        5e-5,
    );
    s.holds(
        "max truthful MF value below 5.816",
        best < 5.816,
        format!("{best}"),
    );
    let truthful = Strategy::truthful(&ex.env);
    let mut all_fail = true;
    let mut detail = String::new();
    for k in 0..=10 {
        for j in 0..=(10 - k) {
            let (x, y) = (k as f64 / 10.0, j as f64 / 10.0);
            let f = ex.special_acf(x, y, 1.0 - x - y);
            let r = is_bayes_nash(
                &Mechanism::direct(&ex.env, &f)?,
                &ex.env,
                &ex.prior,
                &truthful,
                &tol,
            )?;
            let mf_to_sf = r.witnesses.iter().any(|w| w.ty == mf && w.deviation == sf);
            if r.is_ok() || !mf_to_sf {
                all_fail = false;
                detail = format!("x'={x}, y'={y}");
            }
        }
    }
    s.holds(
        "truthful direct rules fail with MF deviating to SF",
        all_fail,
        detail,
    );

    let lifted = lift_unmediated(&ex.indirect);
    let tau = ex.sigma.to_mediated();
    let t = to_direct_mediated(&lifted, &ex.env, &tau, &TransformOptions::default())?;
    let v = verify_transform(
        &lifted,
        &tau,
        &t,
        &ex.env,
        Some(&ex.prior),
        EquilibriumKind::BayesNash,
        &VerifyOptions::default(),
    )?;
    s.holds(
        "mediated transform verifies (bayes-nash)",
        v.passed(),
        format!("{v:?}"),
    );
    Ok(())
}

fn public(s: &mut Sink) -> Result<()> {
    let ex = catalog::public_gap::<f64>();
    let (up, dn) = (0, 1);
    let tol = Tolerances::default();
    let w =
        |m: &Mechanism<f64>, sigma: &Strategy<f64>, player: usize, signal: usize| -> Result<f64> {
            let mu = induced_belief(m, &ex.env, &ex.prior, sigma, player, up, signal)?;
            Ok(ex.env.utility_w(player, up, &mu))
        };
    s.value(
        "player 1 UP signalling UPa",
        34.0,
        w(&ex.mechanism, &ex.sigma, 0, 0)?,
        5e-3,
    );
    s.value(
        "player 1 UP signalling UPb",
        34.0,
        w(&ex.mechanism, &ex.sigma, 0, 1)?,
        5e-3,
    );
    s.value(
        "player 1 UP signalling DN",
        34.0,
        w(&ex.mechanism, &ex.sigma, 0, 2)?,
        5e-3,
    );
    s.value(
        "player 2 UP signalling UP",
        -32.94,
        w(&ex.mechanism, &ex.sigma, 1, up)?,
        5e-3,
    );
    s.value(
        "player 2 UP signalling DN",
        -33.0,
        w(&ex.mechanism, &ex.sigma, 1, dn)?,
        5e-3,
    );
    s.flag(
        "non-mediated mechanism Bayes-Nash",
        Verdict::Holds,
        is_bayes_nash(&ex.mechanism, &ex.env, &ex.prior, &ex.sigma, &tol)?.verdict,
    );
    let induced = induced_acf(&ex.mechanism, &ex.env, Some(&ex.prior), &ex.sigma)?;
    s.value(
        "induced rule equals target",
        0.0,
        induced.acf.max_abs_diff(&ex.f_star),
        1e-12,
    );

    let u1 = ex.env.cpt_type(0, up);
    let p0 = [0.0, 3.0 / 8.0, 0.25, 3.0 / 8.0, 0.0];
    let p1 = [3.0 / 8.0, 0.0, 0.25, 0.0, 3.0 / 8.0];
    let truthful_value = |x: f64| value_of(&affine(&p0, &p1, x), u1);
    let bp = segment_breakpoints(&p0, &p1, u1)?;
    let m = maximize_piecewise_1d(truthful_value, &bp, 0.0, 1.0)?;
    s.flag(
        "player 1 truthful value argmax over x",
        vec![0.0, 1.0],
        m.argmax.clone(),
    );
    s.value("player 1 truthful value max", 34.0, m.value, 5e-3);
    s.value(
        "player 1 truthful value at x = 0.583",
        33.38,
        truthful_value(0.583),
        5e-3,
    );

    let truthful = Strategy::truthful(&ex.env);
    for x in [0.0, 1.0] {
        let f = ex.endpoint_acf(x);
        let d = Mechanism::direct(&ex.env, &f)?;
        s.value(
            &format!("player 2 truthful value at x = {x}"),
            -33.48,
            w(&d, &truthful, 1, up)?,
            5e-3,
        );
        let r = is_bayes_nash(&d, &ex.env, &ex.prior, &truthful, &tol)?;
        s.holds(
            &format!("endpoint x = {x}: player 2 UP deviates to DN"),
            r.witnesses
                .iter()
                .any(|w| w.player == 1 && w.ty == up && w.deviation == dn),
            format!("{:?}", r.verdict),
        );
    }
    let mut any_ic = None;
    for k in 0..=1000 {
        let x = k as f64 / 1000.0;
        let d = Mechanism::direct(&ex.env, &ex.endpoint_acf(x))?;
        if is_bayes_nash(&d, &ex.env, &ex.prior, &truthful, &tol)?.is_ok() {
            any_ic = Some(x);
            break;
        }
    }
    s.holds(
        "no admissible component is truthfully Bayes-Nash",
        any_ic.is_none(),
        format!("{any_ic:?}"),
    );
    let comps = [ex.endpoint_acf(1.0), ex.endpoint_acf(0.0)];
    let labels = ex
        .env
        .type_sets
        .iter()
        .map(|ts| ts.iter().map(|t| t.label.clone()).collect())
        .collect();
    let public = PubliclyMediatedMechanism::new(
        vec!["x1".into(), "x0".into()],
        vec![0.5, 0.5],
        labels,
        comps.iter().map(|f: &Acf<f64>| f.rows.clone()).collect(),
    )?;
    let mix = Acf {
        space: ex.f_star.space.clone(),
        rows: comps[0]
            .rows
            .iter()
            .zip(&comps[1].rows)
            .map(|(a, b)| affine(a, b, 0.5))
            .collect(),
    };
    s.value(
        "endpoint mixture reproduces target",
        0.0,
        mix.max_abs_diff(&ex.f_star),
        1e-12,
    );
    let r = public_convexity_decomposition_check(&public, &ex.env, &ex.prior)?;
    s.holds(
        "endpoint decomposition rejected",
        !r.passed() && r.failing_messages() == vec![0, 1],
        format!("{:?}", r.failing_messages()),
    );
    Ok(())
}

fn coupling(s: &mut Sink) -> Result<()> {
    let ex = catalog::coupling_gap::<f64>();
    let out = common_coupling_exists(&ex.rep, &ex.f)?;
    s.holds(
        "no common coupling",
        out.is_infeasible(),
        format!("{out:?}"),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_groups_pass() {
        let checks = run(&Group::ALL).unwrap();
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.to_string())
            .collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
