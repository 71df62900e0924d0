//! Players, types, allocations, outcome mapping and priors.

use crate::cpt::{cpt_value, CptType, Lottery};
use crate::dist::{check_dist, ProfileSpace};
use crate::error::{dimension, domain, invalid, Error, Result};
use crate::numerics::lp::{lp_feasible, LinearFeasibilityProblem, LpOutcome};
use crate::scalar::{Scalar, Tolerances};

/// One atom of a joint outcome distribution: probability and outcome index per player.
pub type JointAtom<T> = (T, Vec<usize>);

#[derive(Clone, Debug, PartialEq)]
pub struct Environment<T> {
    pub type_sets: Vec<Vec<CptType<T>>>,
    pub allocations: Vec<String>,
    pub outcome_sets: Vec<Vec<String>>,
    /// Joint distribution over outcome profiles for each allocation.
    pub zeta: Vec<Vec<JointAtom<T>>>,
    /// `[player][allocation][outcome]` marginals of `zeta`.
    marginals: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> Environment<T> {
    pub fn new(
        type_sets: Vec<Vec<CptType<T>>>,
        allocations: Vec<String>,
        outcome_sets: Vec<Vec<String>>,
        zeta: Vec<Vec<JointAtom<T>>>,
    ) -> Result<Self> {
        let n = type_sets.len();
        if n == 0 {
            return Err(invalid("environment needs at least one player"));
        }
        if outcome_sets.len() != n {
            return Err(dimension("one outcome set per player required"));
        }
        if allocations.is_empty() {
            return Err(invalid("allocation set is empty"));
        }
        if zeta.len() != allocations.len() {
            return Err(dimension("one zeta row per allocation required"));
        }
        for (i, types) in type_sets.iter().enumerate() {
            if types.is_empty() {
                return Err(invalid(format!("player {i} has no types")));
            }
            for ty in types {
                if ty.value_fn.len() != outcome_sets[i].len() {
                    return Err(invalid(format!(
                        "type {} of player {i} values {} outcomes, player has {}",
                        ty.label,
                        ty.value_fn.len(),
                        outcome_sets[i].len()
                    )));
                }
                ty.weight_gain.validate()?;
                ty.weight_loss.validate()?;
            }
        }
        let tol = T::tol(1e-9);
        let mut marginals = vec![vec![Vec::<T>::new(); allocations.len()]; n];
        for (a, row) in zeta.iter().enumerate() {
            let probs: Vec<T> = row.iter().map(|(p, _)| *p).collect();
            check_dist(&probs, tol, &format!("zeta({})", allocations[a]))?;
            for i in 0..n {
                marginals[i][a] = vec![T::zero(); outcome_sets[i].len()];
            }
            for (p, prof) in row {
                if prof.len() != n {
                    return Err(dimension(format!(
                        "zeta({}) profile length",
                        allocations[a]
                    )));
                }
                for i in 0..n {
                    let g = *prof
                        .get(i)
                        .filter(|&&g| g < outcome_sets[i].len())
                        .ok_or_else(|| {
                            invalid(format!(
                                "zeta({}) names unknown outcome for player {i}",
                                allocations[a]
                            ))
                        })?;
                    marginals[i][a][g] = marginals[i][a][g] + *p;
                }
            }
        }
        Ok(Environment {
            type_sets,
            allocations,
            outcome_sets,
            zeta,
            marginals,
        })
    }

    /// Expands independent per-player factors into a joint `zeta`.
    pub fn product_zeta(factors: &[Vec<Vec<T>>]) -> Vec<Vec<JointAtom<T>>> {
        // factors[i][allocation][outcome]
        let n = factors.len();
        let n_alloc = factors[0].len();
        (0..n_alloc)
            .map(|a| {
                let dims: Vec<usize> = factors.iter().map(|f| f[a].len()).collect();
                let space = ProfileSpace::new(dims);
                space
                    .iter()
                    .filter_map(|prof| {
                        let p = (0..n).fold(T::one(), |acc, i| acc * factors[i][a][prof[i]]);
                        (p > T::zero()).then_some((p, prof))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn n_players(&self) -> usize {
        self.type_sets.len()
    }

    pub fn n_allocations(&self) -> usize {
        self.allocations.len()
    }

    pub fn type_space(&self) -> ProfileSpace {
        ProfileSpace::new(self.type_sets.iter().map(|t| t.len()).collect())
    }

    pub fn outcome_space(&self) -> ProfileSpace {
        ProfileSpace::new(self.outcome_sets.iter().map(|o| o.len()).collect())
    }

    pub fn cpt_type(&self, player: usize, ty: usize) -> &CptType<T> {
        &self.type_sets[player][ty]
    }

    pub fn type_index(&self, player: usize, label: &str) -> Option<usize> {
        self.type_sets[player].iter().position(|t| t.label == label)
    }

    pub fn allocation_index(&self, label: &str) -> Option<usize> {
        self.allocations.iter().position(|a| a == label)
    }

    /// Marginal of `zeta(alpha)` on one player's outcomes, as a dense vector.
    pub fn zeta_marginal_dense(&self, player: usize, alloc: usize) -> &[T] {
        &self.marginals[player][alloc]
    }

    /// Per allocation, the player's outcome lottery.
    pub fn zeta_marginal(&self, player: usize) -> Vec<Lottery<T>> {
        self.marginals[player]
            .iter()
            .map(|m| Lottery::from_dense(m))
            .collect()
    }

    /// Outcome probabilities induced by an allocation distribution.
    pub fn pushforward_dense(&self, player: usize, mu: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.outcome_sets[player].len()];
        for (a, &w) in mu.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            for (o, &z) in out.iter_mut().zip(&self.marginals[player][a]) {
                *o = *o + w * z;
            }
        }
        out
    }

    pub fn pushforward(&self, player: usize, mu: &[T]) -> Lottery<T> {
        Lottery::from_dense(&self.pushforward_dense(player, mu))
    }

    /// CPT value of the outcome lottery induced by `mu`.
    pub fn utility_w(&self, player: usize, ty: usize, mu: &[T]) -> T {
        cpt_value(&self.pushforward(player, mu), &self.type_sets[player][ty])
    }

    /// Value of a sure allocation.
    pub fn utility_u(&self, player: usize, ty: usize, alloc: usize) -> T {
        cpt_value(
            &Lottery::from_dense(&self.marginals[player][alloc]),
            &self.type_sets[player][ty],
        )
    }

    /// Joint outcome distribution, dense over the outcome profile space.
    pub fn zeta_dense(&self, alloc: usize) -> Vec<T> {
        let space = self.outcome_space();
        let mut out = vec![T::zero(); space.size()];
        for (p, prof) in &self.zeta[alloc] {
            let k = space.encode(prof);
            out[k] = out[k] + *p;
        }
        out
    }

    pub fn acf_to_scf(&self, f: &Acf<T>) -> Scf<T> {
        let zetas: Vec<Vec<T>> = (0..self.n_allocations())
            .map(|a| self.zeta_dense(a))
            .collect();
        let rows = f
            .rows
            .iter()
            .map(|row| {
                let mut g = vec![T::zero(); zetas[0].len()];
                for (a, &w) in row.iter().enumerate() {
                    for (o, &z) in g.iter_mut().zip(&zetas[a]) {
                        *o = *o + w * z;
                    }
                }
                g
            })
            .collect();
        Scf {
            space: f.space.clone(),
            outcomes: self.outcome_space(),
            rows,
        }
    }

    /// Finds an allocation choice function inducing `g`, row by row.
    pub fn scf_feasible(&self, g: &Scf<T>) -> Result<Acf<T>> {
        let zetas: Vec<Vec<T>> = (0..self.n_allocations())
            .map(|a| self.zeta_dense(a))
            .collect();
        let mut rows = Vec::with_capacity(g.rows.len());
        for (t, row) in g.rows.iter().enumerate() {
            // variables f(alpha); one equation per outcome profile plus total mass
            let mut a: Vec<Vec<T>> = (0..row.len())
                .map(|k| zetas.iter().map(|z| z[k]).collect())
                .collect();
            let mut b = row.clone();
            a.push(vec![T::one(); zetas.len()]);
            b.push(T::one());
            match lp_feasible(&LinearFeasibilityProblem::new(a, b)?)? {
                LpOutcome::Feasible(x) => rows.push(crate::dist::normalized(&x)),
                other => {
                    return Err(Error::Precondition(format!(
                        "type profile {:?} outside the hull of zeta ({})",
                        g.space.decode(t),
                        other.describe()
                    )))
                }
            }
        }
        Ok(Acf {
            space: g.space.clone(),
            rows,
        })
    }
}

/// Prior over type profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior<T> {
    pub space: ProfileSpace,
    pub probs: Vec<T>,
}

impl<T: Scalar> Prior<T> {
    pub fn new(space: ProfileSpace, probs: Vec<T>) -> Result<Self> {
        if probs.len() != space.size() {
            return Err(dimension(
                "prior table size differs from type profile count",
            ));
        }
        check_dist(&probs, T::tol(1e-9), "prior")?;
        Ok(Prior { space, probs })
    }

    pub fn independent(marginals: &[Vec<T>]) -> Result<Self> {
        let space = ProfileSpace::new(marginals.iter().map(|m| m.len()).collect());
        let probs = space
            .iter()
            .map(|prof| {
                prof.iter()
                    .enumerate()
                    .fold(T::one(), |acc, (i, &t)| acc * marginals[i][t])
            })
            .collect();
        Self::new(space, probs)
    }

    pub fn uniform(space: ProfileSpace) -> Self {
        let probs = crate::dist::uniform(space.size());
        Prior { space, probs }
    }

    pub fn marginal(&self, player: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.space.dims()[player]];
        for (k, &p) in self.probs.iter().enumerate() {
            let t = self.space.coord(k, player);
            out[t] = out[t] + p;
        }
        out
    }

    pub fn in_support(&self, profile: usize) -> bool {
        self.probs[profile] > Tolerances::<T>::default().support
    }

    /// Bayes conditional over opponent type profiles.
    pub fn conditional(&self, player: usize, ty: usize) -> Result<Vec<T>> {
        let marg = self.marginal(player)[ty];
        if !(marg > Tolerances::<T>::default().support) {
            return Err(domain(format!(
                "type {ty} of player {player} has zero prior probability"
            )));
        }
        let rest = self.space.without(player);
        Ok((0..rest.size())
            .map(|r| self.probs[self.space.join(player, ty, r)] / marg)
            .collect())
    }
}

/// Map from type profiles to distributions over allocations.
#[derive(Clone, Debug, PartialEq)]
pub struct Acf<T> {
    pub space: ProfileSpace,
    pub rows: Vec<Vec<T>>,
}

impl<T: Scalar> Acf<T> {
    pub fn new(space: ProfileSpace, rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.len() != space.size() {
            return Err(dimension("one row per type profile required"));
        }
        let width = rows.first().map_or(0, |r| r.len());
        for (k, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(dimension("rows have different widths"));
            }
            check_dist(r, T::tol(1e-9), &format!("row {:?}", space.decode(k)))?;
        }
        Ok(Acf { space, rows })
    }

    pub fn constant(space: ProfileSpace, row: Vec<T>) -> Self {
        let rows = vec![row; space.size()];
        Acf { space, rows }
    }

    pub fn row(&self, profile: &[usize]) -> &[T] {
        &self.rows[self.space.encode(profile)]
    }

    pub fn max_abs_diff(&self, other: &Acf<T>) -> T {
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| crate::dist::max_abs_diff(a, b))
            .fold(T::zero(), T::max)
    }
}

/// Map from type profiles to joint distributions over outcome profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Scf<T> {
    pub space: ProfileSpace,
    pub outcomes: ProfileSpace,
    pub rows: Vec<Vec<T>>,
}

impl<T: Scalar> Scf<T> {
    /// Marginal of a row onto one player's outcomes.
    pub fn marginal(&self, profile: usize, player: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.outcomes.dims()[player]];
        for (k, &p) in self.rows[profile].iter().enumerate() {
            let g = self.outcomes.coord(k, player);
            out[g] = out[g] + p;
        }
        out
    }
}
