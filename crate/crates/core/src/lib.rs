//! Mechanism design checks for agents with cumulative prospect theory preferences.
//!
//! Everything is generic over a [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`.

// NaN must fail range checks, so `!(x >= 0)` style guards are deliberate.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::too_many_arguments
)]

pub mod catalog;
pub mod cpt;
pub mod dist;
pub mod environment;
pub mod error;
pub mod golden;
pub mod ic;
pub mod mechanism;
pub mod mediated;
pub mod numerics;
pub mod report;
pub mod revelation;
pub mod scalar;

pub use error::{Error, Result};
pub use report::{Opponents, Verdict};
pub use revelation::{EquilibriumKind, TransformOptions, VerifyOptions};
pub use scalar::Scalar;

pub type Real = f64;

pub type WeightingFunction = cpt::WeightingFunction<Real>;
pub type CptType = cpt::CptType<Real>;
pub type Lottery = cpt::Lottery<Real>;
pub type Environment = environment::Environment<Real>;
pub type Prior = environment::Prior<Real>;
pub type Acf = environment::Acf<Real>;
pub type Scf = environment::Scf<Real>;
pub type Mechanism = mechanism::Mechanism<Real>;
pub type Strategy = mechanism::Strategy<Real>;
pub type BeliefCandidates = mechanism::BeliefCandidates<Real>;
pub type MediatedMechanism = mediated::MediatedMechanism<Real>;
pub type PubliclyMediatedMechanism = mediated::PubliclyMediatedMechanism<Real>;
pub type MediatedStrategy = mediated::MediatedStrategy<Real>;
pub type EquilibriumReport = report::EquilibriumReport<Real>;
pub type Witness = report::Witness<Real>;
pub type Tolerances = scalar::Tolerances<Real>;
pub type ConvexRepresentation = ic::ConvexRepresentation<Real>;
pub type CouplingMatrix = ic::CouplingMatrix<Real>;
