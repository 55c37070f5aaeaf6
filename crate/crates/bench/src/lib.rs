//! Shared fixtures for the benchmarks.

use tourney_core::{FloatLottery, Lottery, RationalLottery, Rational, Scalar, Tournament};

/// Seeds whose random tournaments have large Top-Cycles.
pub const TOURNAMENT_SEEDS: [u64; 3] = [1, 2, 3];

pub fn random_tournaments(n: usize) -> Vec<Tournament> {
    TOURNAMENT_SEEDS.iter().map(|&s| Tournament::random(n, s).expect("n > 0")).collect()
}

/// Lottery with weights proportional to `1, 2, ..., n`.
pub fn ramp(n: usize) -> RationalLottery {
    let total = (n * (n + 1) / 2) as u64;
    Lottery::new((1..=n as u64).map(|k| Rational::from_counts(k, total)).collect()).expect("sums to one")
}

pub fn ramp_f64(n: usize) -> FloatLottery {
    let total = (n * (n + 1) / 2) as f64;
    Lottery::new((1..=n).map(|k| k as f64 / total).collect()).expect("sums to one")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(random_tournaments(7).len(), 3);
        assert_eq!(ramp(4).to_f64().probs(), ramp_f64(4).probs());
    }
}
