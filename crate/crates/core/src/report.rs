use std::cmp::Ordering;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    /// No violation found on the belief candidates; not a proof over the continuum.
    GridVerified,
    /// A candidate belief exhibits a profitable deviation.
    Refuted,
}

impl Verdict {
    pub fn is_ok(self) -> bool {
        matches!(self, Verdict::Holds | Verdict::GridVerified)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::GridVerified => "grid-verified",
            Verdict::Refuted => "refuted",
        }
    }
}

/// What the deviating player assumed about the others.
#[derive(Clone, Debug, PartialEq)]
pub enum Opponents<T> {
    /// Prior-conditional belief over types, with equilibrium play.
    Prior,
    /// A pure opponent signal profile, as an index into the opponents' signal space.
    Pure(usize),
    /// A belief over opponent signal profiles.
    Belief(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T> {
    pub player: usize,
    pub ty: usize,
    /// Mediator message; `None` for non-mediated mechanisms.
    pub message: Option<usize>,
    /// Signal in the support of the strategy.
    pub signal: usize,
    pub deviation: usize,
    pub opponents: Opponents<T>,
    pub on_path_value: T,
    pub deviation_value: T,
    pub gap: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumReport<T> {
    pub verdict: Verdict,
    /// Violations, largest gap first.
    pub witnesses: Vec<Witness<T>>,
}

impl<T: Scalar> EquilibriumReport<T> {
    pub(crate) fn exact(witnesses: Vec<Witness<T>>) -> Self {
        let verdict = if witnesses.is_empty() {
            Verdict::Holds
        } else {
            Verdict::Fails
        };
        Self::sorted(verdict, witnesses)
    }

    pub(crate) fn refuter(witnesses: Vec<Witness<T>>) -> Self {
        let verdict = if witnesses.is_empty() {
            Verdict::GridVerified
        } else {
            Verdict::Refuted
        };
        Self::sorted(verdict, witnesses)
    }

    fn sorted(verdict: Verdict, mut witnesses: Vec<Witness<T>>) -> Self {
        witnesses.sort_by(|a, b| {
            b.gap
                .partial_cmp(&a.gap)
                .unwrap_or(Ordering::Equal)
                .then(a.player.cmp(&b.player))
                .then(a.ty.cmp(&b.ty))
                .then(a.message.cmp(&b.message))
                .then(a.signal.cmp(&b.signal))
                .then(a.deviation.cmp(&b.deviation))
        });
        EquilibriumReport { verdict, witnesses }
    }

    pub fn is_ok(&self) -> bool {
        self.verdict.is_ok()
    }

    pub(crate) fn strip_messages(mut self) -> Self {
        for w in &mut self.witnesses {
            w.message = None;
        }
        self
    }
}
