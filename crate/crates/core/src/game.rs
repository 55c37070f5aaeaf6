//! The symmetric zero-sum tournament game.
//!
//! Payoff `g(x, y)` is `+1` when `x` beats `y`, `-1` when `y` beats `x` and `0`
//! on the diagonal. The game has a unique optimal mixed strategy `p*`, found
//! here exactly: candidate supports inside the Top-Cycle are enumerated by
//! increasing odd size (lexicographic within a size), the indifference system
//! is solved in rationals, and the first candidate meeting both sign
//! conditions is returned.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::solve_unique;
use crate::lottery::{Lottery, RationalLottery};
use crate::scalar::{Rational, Scalar};
use crate::tournament::{AlternativeSet, Tournament};

/// Largest tournament the exact solver accepts by default.
pub const DEFAULT_EXACT_LIMIT: usize = 16;

pub fn payoff(t: &Tournament, x: usize, y: usize) -> Result<i64> {
    t.check_index(x)?;
    t.check_index(y)?;
    Ok(sign(t, x, y))
}

#[inline]
fn sign(t: &Tournament, x: usize, y: usize) -> i64 {
    if x == y {
        0
    } else if t.beats(x, y) {
        1
    } else {
        -1
    }
}

/// `g(x, p)`. Lengths are the caller's responsibility.
pub fn payoff_against<S: Scalar>(t: &Tournament, x: usize, p: &Lottery<S>) -> S {
    let mut acc = S::zero();
    for (y, py) in p.probs().iter().enumerate() {
        match sign(t, x, y) {
            1 => acc = acc + py.clone(),
            -1 => acc = acc - py.clone(),
            _ => {}
        }
    }
    acc
}

/// Bilinear payoff `g(p, q) = sum_x p(x) g(x, q)`.
pub fn mixed_payoff<S: Scalar>(t: &Tournament, p: &Lottery<S>, q: &Lottery<S>) -> Result<S> {
    p.check_len(t.n())?;
    q.check_len(t.n())?;
    Ok(p.probs()
        .iter()
        .enumerate()
        .filter(|(_, px)| !px.is_zero())
        .fold(S::zero(), |acc, (x, px)| acc + px.clone() * payoff_against(t, x, q)))
}

/// The unique optimal strategy and its support, the Bipartisan set.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalStrategy {
    pub lottery: RationalLottery,
    pub support: AlternativeSet,
}

/// Per-alternative check of the optimality sign pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<S> {
    /// `g(x, p)` for each alternative.
    pub residuals: Vec<S>,
    /// `p(x) > 0` with `g(x, p) = 0`, or `p(x) = 0` with `g(x, p) < 0`.
    pub holds: Vec<bool>,
    pub optimal: bool,
}

pub fn verify_optimal<S: Scalar>(t: &Tournament, p: &Lottery<S>) -> Result<Verdict<S>> {
    p.check_len(t.n())?;
    let residuals: Vec<S> = (0..t.n()).map(|x| payoff_against(t, x, p)).collect();
    let holds: Vec<bool> = residuals
        .iter()
        .zip(p.probs())
        .map(|(g, px)| {
            if px.is_negligible() {
                *g < S::zero() && !g.is_negligible()
            } else {
                g.is_negligible()
            }
        })
        .collect();
    let optimal = holds.iter().all(|&h| h);
    Ok(Verdict { residuals, holds, optimal })
}

pub fn optimal_strategy(t: &Tournament) -> Result<OptimalStrategy> {
    optimal_strategy_with_limit(t, DEFAULT_EXACT_LIMIT)
}

pub fn optimal_strategy_with_limit(t: &Tournament, limit: usize) -> Result<OptimalStrategy> {
    if t.n() > limit {
        return Err(Error::SolveLimit { n: t.n(), limit });
    }
    let tc = t.top_cycle(&AlternativeSet::all(t.n()))?;
    for size in (1..=tc.len()).step_by(2) {
        let candidates: Vec<Vec<usize>> = tc.iter().combinations(size).collect();
        let found = candidates
            .par_iter()
            .find_map_first(|support| solve_on_support(t, &AlternativeSet::new(support.iter().copied())));
        if let Some(lottery) = found {
            let support = lottery.support();
            return Ok(OptimalStrategy { lottery, support });
        }
    }
    unreachable!("every tournament has an optimal strategy supported in its Top-Cycle")
}

/// The strategy supported exactly on `support` that meets the optimality sign
/// conditions, if there is one.
pub fn solve_on_support(t: &Tournament, support: &AlternativeSet) -> Option<RationalLottery> {
    let ids = support.as_slice();
    let k = ids.len();
    if k == 0 {
        return None;
    }
    let mut a: Vec<Vec<Rational>> = ids
        .iter()
        .map(|&x| ids.iter().map(|&y| Rational::from_i64(sign(t, x, y))).collect())
        .collect();
    let mut b = vec![Rational::from_i64(0); k];
    a.push(vec![Rational::from_i64(1); k]);
    b.push(Rational::from_i64(1));
    let weights = solve_unique(a, b)?;
    if weights.iter().any(|w| *w <= Rational::from_i64(0)) {
        return None;
    }
    let mut probs = vec![Rational::from_i64(0); t.n()];
    for (&x, w) in ids.iter().zip(weights) {
        probs[x] = w;
    }
    let p = Lottery::new_unchecked(probs);
    let zero = Rational::from_i64(0);
    let outsiders_lose = (0..t.n())
        .filter(|&x| !support.contains(x))
        .all(|x| payoff_against(t, x, &p) < zero);
    outsiders_lose.then_some(p)
}

pub fn bipartisan_set(t: &Tournament) -> Result<AlternativeSet> {
    optimal_strategy(t).map(|s| s.support)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: u64, d: u64) -> Rational {
        Rational::from_counts(n, d)
    }

    /// g(x, p) straight from the definition, one term per opponent.
    fn oracle_g(t: &Tournament, x: usize, p: &[Rational]) -> Rational {
        let mut acc = q(0, 1);
        for (y, py) in p.iter().enumerate() {
            if x != y && t.beats(x, y) {
                acc += py;
            } else if x != y {
                acc -= py;
            }
        }
        acc
    }

    #[test]
    fn pure_payoffs_on_three_cycle() {
        let t = Tournament::three_cycle();
        assert_eq!(payoff(&t, 0, 1).unwrap(), 1);
        assert_eq!(payoff(&t, 0, 2).unwrap(), -1);
        assert_eq!(payoff(&t, 1, 1).unwrap(), 0);
        assert!(matches!(payoff(&t, 0, 3), Err(Error::OutOfRange { index: 3, n: 3 })));
    }

    #[test]
    fn mixed_payoffs() {
        let t = Tournament::three_cycle();
        let u = RationalLottery::uniform(3);
        assert_eq!(mixed_payoff(&t, &u, &u).unwrap(), q(0, 1));

        let p = RationalLottery::new(vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        let b = RationalLottery::point_mass(3, 1);
        let expected = oracle_g(&t, 1, p.probs());
        assert_eq!(expected, -q(1, 4));
        assert_eq!(mixed_payoff(&t, &b, &p).unwrap(), expected);

        let c = Tournament::with_condorcet_winner(&Tournament::three_cycle());
        let winner = RationalLottery::point_mass(4, 0);
        let others = RationalLottery::uniform_on(4, &[1, 2, 3].into_iter().collect());
        assert_eq!(mixed_payoff(&c, &winner, &others).unwrap(), q(1, 1));

        assert!(matches!(mixed_payoff(&t, &u, &RationalLottery::uniform(4)), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn optimal_strategy_examples() {
        let s = optimal_strategy(&Tournament::three_cycle()).unwrap();
        assert_eq!(s.lottery, RationalLottery::uniform(3));
        assert_eq!(s.support, AlternativeSet::all(3));

        let c = Tournament::with_condorcet_winner(&Tournament::three_cycle());
        let s = optimal_strategy(&c).unwrap();
        assert_eq!(s.lottery, RationalLottery::point_mass(4, 0));
        assert_eq!(bipartisan_set(&c).unwrap(), AlternativeSet::singleton(0));

        let cy = Tournament::cyclone(5).unwrap();
        let s = optimal_strategy(&cy).unwrap();
        assert_eq!(s.lottery, RationalLottery::uniform(5));
        // Direct evaluation of the indifference conditions on the uniform lottery.
        let u = vec![q(1, 5); 5];
        assert!((0..5).all(|x| oracle_g(&cy, x, &u) == q(0, 1)));
    }

    #[test]
    fn verify_examples() {
        let t = Tournament::three_cycle();
        let v = verify_optimal(&t, &RationalLottery::uniform(3)).unwrap();
        assert!(v.optimal);
        assert!(v.residuals.iter().all(|r| *r == q(0, 1)));

        let p = RationalLottery::new(vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        let v = verify_optimal(&t, &p).unwrap();
        assert!(!v.optimal);
        assert_eq!(v.residuals[1], -q(1, 4));
        assert!(!v.holds[1]);

        let c = Tournament::transitive(4).unwrap();
        let u = RationalLottery::uniform(4);
        let v = verify_optimal(&c, &u).unwrap();
        assert_eq!(v.residuals[0], oracle_g(&c, 0, u.probs()));
        assert!(v.residuals[0] > q(0, 1));
        assert!(!v.optimal);
    }

    #[test]
    fn solve_limit() {
        let t = Tournament::random(20, 1).unwrap();
        assert_eq!(optimal_strategy(&t), Err(Error::SolveLimit { n: 20, limit: 16 }));
        assert!(optimal_strategy_with_limit(&Tournament::three_cycle(), 2).is_err());
    }

    #[test]
    fn random_eleven_structure() {
        let t = Tournament::random(11, 2024).unwrap();
        let s = optimal_strategy(&t).unwrap();
        let tc = t.top_cycle(&AlternativeSet::all(11)).unwrap();
        assert_eq!(s.support.len() % 2, 1);
        assert!(s.support.is_subset(&tc));
        assert!(verify_optimal(&t, &s.lottery).unwrap().optimal);
    }

    #[test]
    fn egalitarian_gain_identity() {
        // 1 + g(x, p) = 2 p(T+(x)) + p(x), exactly.
        for seed in 0..30 {
            let t = Tournament::random(5, seed).unwrap();
            let p = RationalLottery::from_counts(&[seed + 1, 2, 0, 3, seed % 4]).unwrap();
            for x in 0..5 {
                let lhs = q(1, 1) + payoff_against(&t, x, &p);
                let rhs = q(2, 1) * p.mass(t.dominated_by(x)) + p.get(x).clone();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn uniqueness_probe() {
        for n in 1..=7 {
            for seed in 0..15 {
                let t = Tournament::random(n, seed).unwrap();
                let bp = bipartisan_set(&t).unwrap();
                for mask in 1u32..(1 << n) {
                    let s: AlternativeSet = (0..n).filter(|k| mask >> k & 1 == 1).collect();
                    if s != bp {
                        assert!(solve_on_support(&t, &s).is_none(), "n={n} seed={seed} {s}");
                    }
                }
            }
        }
    }
}
