//! Probability vectors over alternatives.

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::tournament::AlternativeSet;

/// Distribution over alternatives `0..n`, exact or float depending on `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery<S> {
    probs: Vec<S>,
}

pub type RationalLottery = Lottery<Rational>;
pub type FloatLottery = Lottery<f64>;

impl<S: Scalar> Lottery<S> {
    /// Nonnegative entries summing to one (exactly, or within 1e-12 for floats).
    pub fn new(probs: Vec<S>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidLottery("no entries".into()));
        }
        if let Some(k) = probs.iter().position(|p| *p < S::zero()) {
            return Err(Error::InvalidLottery(format!("entry {k} is negative")));
        }
        let total = probs.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !total.is_unit_total() {
            return Err(Error::InvalidLottery(format!("entries sum to {:?}", total)));
        }
        Ok(Self { probs })
    }

    pub(crate) fn new_unchecked(probs: Vec<S>) -> Self {
        Self { probs }
    }

    pub fn uniform(n: usize) -> Self {
        let w = S::from_counts(1, n as u64);
        Self { probs: vec![w; n] }
    }

    pub fn point_mass(n: usize, x: usize) -> Self {
        let mut probs = vec![S::zero(); n];
        probs[x] = S::one();
        Self { probs }
    }

    /// Uniform over `set`, zero elsewhere.
    pub fn uniform_on(n: usize, set: &AlternativeSet) -> Self {
        let w = S::from_counts(1, set.len() as u64);
        let mut probs = vec![S::zero(); n];
        for x in set.iter() {
            probs[x] = w.clone();
        }
        Self { probs }
    }

    /// Proportions `counts[x] / sum(counts)`.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidLottery("counts sum to zero".into()));
        }
        Ok(Self { probs: counts.iter().map(|&c| S::from_counts(c, total)).collect() })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn get(&self, x: usize) -> &S {
        &self.probs[x]
    }

    pub fn into_inner(self) -> Vec<S> {
        self.probs
    }

    pub fn support(&self) -> AlternativeSet {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > S::zero())
            .map(|(x, _)| x)
            .collect()
    }

    /// Mass of a set of alternatives.
    pub fn mass(&self, xs: impl IntoIterator<Item = usize>) -> S {
        xs.into_iter().fold(S::zero(), |acc, x| acc + self.probs[x].clone())
    }

    pub fn to_f64(&self) -> FloatLottery {
        Lottery { probs: self.probs.iter().map(Scalar::to_f64).collect() }
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.probs.len() == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: n, got: self.probs.len() })
        }
    }
}

impl FloatLottery {
    /// L-infinity distance.
    pub fn distance(&self, other: &FloatLottery) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(RationalLottery::new(vec![Rational::from_counts(1, 2); 2]).is_ok());
        assert!(RationalLottery::new(vec![Rational::from_counts(1, 3); 2]).is_err());
        assert!(FloatLottery::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert!(FloatLottery::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(FloatLottery::new(vec![1.5, -0.5]).is_err());
        assert!(FloatLottery::new(vec![]).is_err());
    }

    #[test]
    fn support_and_mass() {
        let p = RationalLottery::from_counts(&[2, 0, 1, 1]).unwrap();
        assert_eq!(p.support(), [0, 2, 3].into_iter().collect());
        assert_eq!(p.mass([2, 3]), Rational::from_counts(1, 2));
        let q = FloatLottery::point_mass(4, 1);
        assert_eq!(p.to_f64().distance(&q), 1.0);
    }
}
