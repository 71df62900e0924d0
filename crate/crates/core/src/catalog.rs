//! Small worked instances used by tests, the golden harness and the CLI.

use crate::cpt::{CptType, WeightingFunction};
use crate::dist::ProfileSpace;
use crate::environment::{Acf, Environment, Prior};
use crate::ic::ConvexRepresentation;
use crate::mechanism::{Mechanism, Strategy};
use crate::scalar::Scalar;

fn s(x: &str) -> String {
    x.to_string()
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|x| s(x)).collect()
}

fn roman() -> Vec<String> {
    labels(&["I", "II", "III", "IV", "V"])
}

fn lit<T: Scalar>(xs: &[f64]) -> Vec<T> {
    xs.iter().map(|&x| T::lit(x)).collect()
}

/// Gains weighting shared by the three-type market and the public gap.
pub fn market_gain_weights<T: Scalar>() -> WeightingFunction<T> {
    WeightingFunction::piecewise(vec![
        (T::zero(), T::zero()),
        (T::ratio(7, 32), T::ratio(1, 4)),
        (T::ratio(25, 32), T::ratio(5, 8)),
        (T::one(), T::one()),
    ])
    .unwrap()
}

pub fn market_loss_weights<T: Scalar>() -> WeightingFunction<T> {
    WeightingFunction::piecewise(vec![
        (T::zero(), T::zero()),
        (T::ratio(1, 8), T::ratio(3, 16)),
        (T::ratio(3, 4), T::ratio(1, 2)),
        (T::one(), T::one()),
    ])
    .unwrap()
}

/// Allocations a, b, c mapped to the same outcome for both players:
/// a → ½ I ½ V, b → ½ II ½ IV, c → III.
fn diagonal_zeta<T: Scalar>() -> Vec<Vec<(T, Vec<usize>)>> {
    let h = T::lit(0.5);
    vec![
        vec![(h, vec![0, 0]), (h, vec![4, 4])],
        vec![(h, vec![1, 1]), (h, vec![3, 3])],
        vec![(T::one(), vec![2, 2])],
    ]
}

fn abc() -> Vec<String> {
    labels(&["a", "b", "c"])
}

fn mix_ab<T: Scalar>(x: T) -> Vec<T> {
    vec![x, T::one() - x, T::zero()]
}

fn alloc<T: Scalar>(k: usize) -> Vec<T> {
    crate::dist::point_mass(3, k)
}

/// Player 1 has Prelec weights and is indifferent between two risky allocations
/// but strictly prefers a sure one to their even mixture.
pub struct DominanceGap<T> {
    pub env: Environment<T>,
    pub prior: Prior<T>,
    pub mechanism: Mechanism<T>,
    pub sigma: Strategy<T>,
}

/// Environment shared by [`dominance_gap`] and [`dominant_direct_gap`].
pub fn prelec_env<T: Scalar>() -> Environment<T> {
    let w = WeightingFunction::prelec(T::lit(0.5)).unwrap();
    let x = T::one() / w.eval(T::lit(0.5)).unwrap();
    let up1 = vec![x + x, x + T::one(), T::lit(1.99), T::one(), T::zero()];
    let dn1 = lit(&[0.0, 0.0, 1.0, 0.0, 0.0]);
    let p1 = vec![
        CptType::new("UP", up1, w.clone(), WeightingFunction::Linear).unwrap(),
        CptType::new("DN", dn1, w, WeightingFunction::Linear).unwrap(),
    ];
    let p2 = vec![
        CptType::eut("UP", lit(&[1.0, 0.0, 2.0])).unwrap(),
        CptType::eut("DN", lit(&[0.0, 1.0, 2.0])).unwrap(),
    ];
    let h = T::lit(0.5);
    let z = T::zero();
    let o = T::one();
    let zeta1 = vec![
        vec![h, z, z, z, h],
        vec![z, h, z, h, z],
        vec![z, z, o, z, z],
    ];
    let zeta2 = vec![alloc(0), alloc(1), alloc(2)];
    Environment::new(
        vec![p1, p2],
        abc(),
        vec![roman(), abc()],
        Environment::product_zeta(&[zeta1, zeta2]),
    )
    .unwrap()
}

pub fn dominance_gap<T: Scalar>() -> DominanceGap<T> {
    let env = prelec_env::<T>();
    let prior = Prior::uniform(env.type_space());
    // signals UP, DN; (UP,UP) → a, (UP,DN) → b, (DN,·) → c
    let mechanism = Mechanism::new(
        vec![labels(&["UP", "DN"]), labels(&["UP", "DN"])],
        vec![alloc(0), alloc(1), alloc(2), alloc(2)],
    )
    .unwrap();
    let sigma = Strategy::truthful(&env);
    DominanceGap {
        env,
        prior,
        mechanism,
        sigma,
    }
}

/// Player 1 picks the allocation directly and mixes a/b when UP. Dominant, but its
/// direct version is not truthfully dominant.
pub struct DominantDirectGap<T> {
    pub env: Environment<T>,
    pub mechanism: Mechanism<T>,
    pub sigma: Strategy<T>,
    /// The induced allocation choice function.
    pub f: Acf<T>,
}

pub fn dominant_direct_gap<T: Scalar>() -> DominantDirectGap<T> {
    let env = prelec_env::<T>();
    let h0 = vec![alloc(0), alloc(0), alloc(1), alloc(1), alloc(2), alloc(2)];
    let mechanism = Mechanism::new(vec![abc(), labels(&["UP", "DN"])], h0).unwrap();
    let half = T::lit(0.5);
    let sigma = Strategy::new(vec![
        vec![vec![half, half, T::zero()], alloc(2)],
        vec![crate::dist::point_mass(2, 0), crate::dist::point_mass(2, 1)],
    ])
    .unwrap();
    let f = Acf::new(
        env.type_space(),
        vec![mix_ab(half), mix_ab(half), alloc(2), alloc(2)],
    )
    .unwrap();
    DominantDirectGap {
        env,
        mechanism,
        sigma,
        f,
    }
}

/// Three types per player (MF, UF, SF); implementable only through an indirect mechanism.
pub struct ThreeTypeMarket<T> {
    pub env: Environment<T>,
    pub prior: Prior<T>,
    /// Signals MFa, MFb, UF, SF.
    pub indirect: Mechanism<T>,
    pub sigma: Strategy<T>,
    pub f_star: Acf<T>,
}

impl<T: Scalar> ThreeTypeMarket<T> {
    /// Choice function that is `f_star` except at (MF, MF), where it is `(x a, y b, z c)`.
    pub fn special_acf(&self, x: T, y: T, z: T) -> Acf<T> {
        let mut f = self.f_star.clone();
        f.rows[0] = vec![x, y, z];
        f
    }
}

pub fn three_type_market<T: Scalar>() -> ThreeTypeMarket<T> {
    let wg = market_gain_weights::<T>();
    let wl = market_loss_weights::<T>();
    let mk = |l: &str, v: &[f64]| CptType::new(l, lit(v), wg.clone(), wl.clone()).unwrap();
    let types = || {
        vec![
            mk("MF", &[13.616, 8.616, 5.816, 3.8, 0.0]),
            mk("UF", &[-190.0, -100.0, -1000.0, -50.0, 0.0]),
            mk("SF", &[0.0, 0.0, 1e6, 0.0, 0.0]),
        ]
    };
    let env = Environment::new(
        vec![types(), types()],
        abc(),
        vec![roman(), roman()],
        diagonal_zeta(),
    )
    .unwrap();
    let marg = vec![T::ratio(1, 2), T::ratio(3, 8), T::ratio(1, 8)];
    let prior = Prior::independent(&[marg.clone(), marg]).unwrap();
    let half = T::lit(0.5);
    // signals: 0 MFa, 1 MFb, 2 UF, 3 SF
    let rule = |a: usize, b: usize| -> Vec<T> {
        match (a, b) {
            (3, _) | (_, 3) => alloc(2),
            (2, 2) => mix_ab(half),
            (2, k) | (k, 2) => alloc(k),
            (k, j) if k == j => alloc(k),
            _ => mix_ab(half),
        }
    };
    let sig = labels(&["MFa", "MFb", "UF", "SF"]);
    let h0 = (0..16).map(|k| rule(k / 4, k % 4)).collect();
    let indirect = Mechanism::new(vec![sig.clone(), sig], h0).unwrap();
    let z = T::zero();
    let per_type = vec![
        vec![half, half, z, z],
        vec![z, z, T::one(), z],
        vec![z, z, z, T::one()],
    ];
    let sigma = Strategy::new(vec![per_type.clone(), per_type]).unwrap();
    let f_rows = (0..9)
        .map(|k| {
            if k / 3 == 2 || k % 3 == 2 {
                alloc(2)
            } else {
                mix_ab(half)
            }
        })
        .collect();
    let f_star = Acf::new(env.type_space(), f_rows).unwrap();
    ThreeTypeMarket {
        env,
        prior,
        indirect,
        sigma,
        f_star,
    }
}

/// Two types per player (UP, DN) where a non-mediated mechanism implements `f_star`
/// but no mixture of truthfully implementable direct rules does.
pub struct PublicGap<T> {
    pub env: Environment<T>,
    pub prior: Prior<T>,
    /// Signals UPa, UPb, DN for player 1; UP, DN for player 2.
    pub mechanism: Mechanism<T>,
    pub sigma: Strategy<T>,
    pub f_star: Acf<T>,
}

impl<T: Scalar> PublicGap<T> {
    /// `f_star` with (UP, UP) replaced by `x a + (1-x) b`.
    pub fn endpoint_acf(&self, x: T) -> Acf<T> {
        let mut f = self.f_star.clone();
        f.rows[0] = mix_ab(x);
        f
    }
}

pub fn public_gap<T: Scalar>() -> PublicGap<T> {
    let w = market_gain_weights::<T>();
    let mk = |l: &str, v: &[f64]| CptType::new(l, lit(v), w.clone(), w.clone()).unwrap();
    let env = Environment::new(
        vec![
            vec![
                mk("UP", &[80.0, 57.0, 34.0, 17.0, 0.0]),
                mk("DN", &[0.0, 0.0, 100.0, 0.0, 0.0]),
            ],
            vec![
                mk("UP", &[-79.0, -56.0, -33.0, -17.0, 0.0]),
                mk("DN", &[0.0, 0.0, 100.0, 0.0, 0.0]),
            ],
        ],
        abc(),
        vec![roman(), roman()],
        diagonal_zeta(),
    )
    .unwrap();
    let marg = vec![T::ratio(3, 4), T::ratio(1, 4)];
    let prior = Prior::independent(&[marg.clone(), marg]).unwrap();
    // (UPa, UP) → a, (UPb, UP) → b, any DN → c
    let h0 = vec![alloc(0), alloc(2), alloc(1), alloc(2), alloc(2), alloc(2)];
    let mechanism = Mechanism::new(
        vec![labels(&["UPa", "UPb", "DN"]), labels(&["UP", "DN"])],
        h0,
    )
    .unwrap();
    let half = T::lit(0.5);
    let sigma = Strategy::new(vec![
        vec![vec![half, half, T::zero()], alloc(2)],
        vec![crate::dist::point_mass(2, 0), crate::dist::point_mass(2, 1)],
    ])
    .unwrap();
    let f_star = Acf::new(
        env.type_space(),
        vec![mix_ab(half), alloc(2), alloc(2), alloc(2)],
    )
    .unwrap();
    PublicGap {
        env,
        prior,
        mechanism,
        sigma,
        f_star,
    }
}

/// Two type profiles (LT, RT), allocations (UP, DN), and per-player two-term
/// representations of `f` admitting no common coupling.
pub struct CouplingGap<T> {
    pub profiles: Vec<String>,
    pub allocations: Vec<String>,
    pub f: Acf<T>,
    pub rep: ConvexRepresentation<T>,
}

pub fn coupling_gap<T: Scalar>() -> CouplingGap<T> {
    let space = ProfileSpace::new(vec![2]);
    let r = |a: i64, b: i64| T::ratio(a, b);
    let acf = |lt: Vec<T>, rt: Vec<T>| Acf::new(space.clone(), vec![lt, rt]).unwrap();
    let f = acf(vec![r(2, 5), r(3, 5)], vec![r(1, 3), r(2, 3)]);
    let p1 = vec![
        (r(1, 5), acf(vec![r(1, 2), r(1, 2)], vec![r(0, 1), r(1, 1)])),
        (
            r(4, 5),
            acf(vec![r(3, 8), r(5, 8)], vec![r(5, 12), r(7, 12)]),
        ),
    ];
    let p2 = vec![
        (r(1, 3), acf(vec![r(1, 1), r(0, 1)], vec![r(1, 1), r(0, 1)])),
        (
            r(2, 3),
            acf(vec![r(1, 10), r(9, 10)], vec![r(0, 1), r(1, 1)]),
        ),
    ];
    CouplingGap {
        profiles: labels(&["LT", "RT"]),
        allocations: labels(&["UP", "DN"]),
        f,
        rep: ConvexRepresentation {
            per_player: vec![p1, p2],
        },
    }
}
