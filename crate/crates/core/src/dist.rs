//! Finite product spaces and probability vectors over them.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Mixed-radix indexing of a product of finite sets, player 0 most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProfileSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl ProfileSpace {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        let mut size = 1usize;
        for k in (0..dims.len()).rev() {
            strides[k] = size;
            size = size.saturating_mul(dims[k]);
        }
        ProfileSpace {
            dims,
            strides,
            size,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Number of profiles.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn encode(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.dims.len());
        profile.iter().zip(&self.strides).map(|(p, s)| p * s).sum()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in 0..self.dims.len() {
            out[k] = index / self.strides[k];
            index %= self.strides[k];
        }
        out
    }

    /// Coordinate `k` of the profile with the given index.
    #[inline]
    pub fn coord(&self, index: usize, k: usize) -> usize {
        (index / self.strides[k]) % self.dims[k]
    }

    /// The space with coordinate `k` removed.
    pub fn without(&self, k: usize) -> ProfileSpace {
        let mut dims = self.dims.clone();
        dims.remove(k);
        ProfileSpace::new(dims)
    }

    /// Full-profile index from coordinate `k` and an index into `self.without(k)`.
    pub fn join(&self, k: usize, own: usize, rest: usize) -> usize {
        let high = rest / self.strides[k];
        let low = rest % self.strides[k];
        high * self.strides[k] * self.dims[k] + own * self.strides[k] + low
    }

    /// Index into `self.without(k)` of the full profile `index`.
    pub fn drop_coord(&self, index: usize, k: usize) -> usize {
        let block = self.strides[k] * self.dims[k];
        (index / block) * self.strides[k] + index % self.strides[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size).map(move |i| self.decode(i))
    }
}

/// Checks that `p` is a probability vector within `tol`.
pub fn check_dist<T: Scalar>(p: &[T], tol: T, what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(invalid(format!("{what}: empty distribution")));
    }
    let mut total = T::zero();
    for (k, &x) in p.iter().enumerate() {
        if !x.is_finite() || x < -tol {
            return Err(invalid(format!("{what}: entry {k} is {x}")));
        }
        total = total + x;
    }
    if (total - T::one()).abs() > tol {
        return Err(invalid(format!("{what}: sums to {total}")));
    }
    Ok(())
}

/// Clamps tiny negatives to zero and rescales to sum one.
pub fn normalized<T: Scalar>(p: &[T]) -> Vec<T> {
    let clipped: Vec<T> = p.iter().map(|&x| x.max(T::zero())).collect();
    let total: T = clipped.iter().copied().sum();
    clipped.into_iter().map(|x| x / total).collect()
}

pub fn point_mass<T: Scalar>(len: usize, at: usize) -> Vec<T> {
    let mut v = vec![T::zero(); len];
    v[at] = T::one();
    v
}

pub fn uniform<T: Scalar>(len: usize) -> Vec<T> {
    vec![T::one() / T::lit(len as f64); len]
}

/// `Σ_k w_k p_k` for equal-length vectors.
pub fn mix<T: Scalar>(parts: &[(T, &[T])]) -> Vec<T> {
    let len = parts.first().map_or(0, |(_, p)| p.len());
    let mut out = vec![T::zero(); len];
    for (w, p) in parts {
        for (o, &x) in out.iter_mut().zip(p.iter()) {
            *o = *o + *w * x;
        }
    }
    out
}

pub fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}

/// Indices with probability strictly above `threshold`.
pub fn support<T: Scalar>(p: &[T], threshold: T) -> Vec<usize> {
    p.iter()
        .enumerate()
        .filter(|(_, &x)| x > threshold)
        .map(|(k, _)| k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        let s = ProfileSpace::new(vec![2, 3, 4]);
        assert_eq!(s.size(), 24);
        for i in 0..s.size() {
            assert_eq!(s.encode(&s.decode(i)), i);
        }
        assert_eq!(s.decode(5), vec![0, 1, 1]);
    }

    #[test]
    fn join_and_drop_invert() {
        let s = ProfileSpace::new(vec![2, 3, 4]);
        for k in 0..3 {
            let rest = s.without(k);
            for i in 0..s.size() {
                let own = s.coord(i, k);
                let r = s.drop_coord(i, k);
                assert!(r < rest.size());
                assert_eq!(s.join(k, own, r), i);
                let mut full = rest.decode(r);
                full.insert(k, own);
                assert_eq!(s.encode(&full), i);
            }
        }
    }

    #[test]
    fn empty_space_has_one_profile() {
        let s = ProfileSpace::new(vec![]);
        assert_eq!(s.size(), 1);
        assert_eq!(s.decode(0), Vec::<usize>::new());
    }

    #[test]
    fn dist_checks() {
        assert!(check_dist(&[0.5f64, 0.5], 1e-9, "x").is_ok());
        assert!(check_dist(&[0.5f64, 0.4], 1e-9, "x").is_err());
        assert!(check_dist(&[1.5f64, -0.5], 1e-9, "x").is_err());
    }
}
