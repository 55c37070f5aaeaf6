//! The comparison Markov chain with sampling distribution `p`.
//!
//! From state `x` a challenger `y ~ p` is drawn and the winner becomes the new
//! state: the chain stays at `x` with probability `p(T+(x) ∪ {x})` and moves to
//! `y ∈ T-(x)` with probability `p(y)`. Starting from `p^[0] = p`, `p^[t]` is
//! the law of the state after `t` comparisons.

use crate::error::{Error, Result};
use crate::game::payoff_against;
use crate::linalg::solve_unique;
use crate::lottery::Lottery;
use crate::scalar::Scalar;
use crate::tournament::{AlternativeSet, Tournament};

/// One transition applied to the state law `current`.
pub fn chain_step<S: Scalar>(t: &Tournament, p: &Lottery<S>, current: &Lottery<S>) -> Result<Lottery<S>> {
    p.check_len(t.n())?;
    current.check_len(t.n())?;
    let next = (0..t.n())
        .map(|x| {
            let stay = p.mass(t.dominated_by(x)) + p.get(x).clone();
            current.get(x).clone() * stay + current.mass(t.dominated_by(x)) * p.get(x).clone()
        })
        .collect();
    Ok(Lottery::new_unchecked(next))
}

/// Law of the winner of two independent draws from `p`: `p(x)(1 + g(x, p))`.
pub fn p2<S: Scalar>(t: &Tournament, p: &Lottery<S>) -> Result<Lottery<S>> {
    p.check_len(t.n())?;
    Ok(Lottery::new_unchecked(
        (0..t.n())
            .map(|x| p.get(x).clone() * (S::one() + payoff_against(t, x, p)))
            .collect(),
    ))
}

/// Law of `max(max(a, b), c)` for `a, b, c` iid `p`:
/// `p(x)(1 + 3/2 g(x,p) + 1/2 g(x,p)^2 + 1/2 sum_y p(y) g(x,y) g(y,p))`.
pub fn p3<S: Scalar>(t: &Tournament, p: &Lottery<S>) -> Result<Lottery<S>> {
    p.check_len(t.n())?;
    let n = t.n();
    let g: Vec<S> = (0..n).map(|x| payoff_against(t, x, p)).collect();
    // weighted[y] = p(y) g(y, p)
    let weighted: Vec<S> = (0..n).map(|y| p.get(y).clone() * g[y].clone()).collect();
    let half = S::from_counts(1, 2);
    let three_halves = S::from_counts(3, 2);
    let out = (0..n)
        .map(|x| {
            let mut cross = S::zero();
            for (y, w) in weighted.iter().enumerate() {
                if y == x {
                    continue;
                }
                if t.beats(x, y) {
                    cross = cross + w.clone();
                } else {
                    cross = cross - w.clone();
                }
            }
            let gx = g[x].clone();
            let factor = S::one()
                + three_halves.clone() * gx.clone()
                + half.clone() * gx.clone() * gx
                + half.clone() * cross;
            p.get(x).clone() * factor
        })
        .collect();
    Ok(Lottery::new_unchecked(out))
}

/// `p^[0], ..., p^[k]`.
pub fn iterate<S: Scalar>(t: &Tournament, p: &Lottery<S>, k: usize) -> Result<Vec<Lottery<S>>> {
    let mut state = ChainState::new(t, p.clone())?;
    let mut out = vec![state.current.clone()];
    for _ in 0..k {
        state.step(t)?;
        out.push(state.current.clone());
    }
    Ok(out)
}

/// Unique stationary law of the chain sampled by `p`.
///
/// Supported on the Top-Cycle of the restriction to `support(p)`, where it
/// solves `pi(T+(x)) p(x) = pi(x) p(T-(x))` with total mass one.
pub fn stationary<S: Scalar>(t: &Tournament, p: &Lottery<S>) -> Result<Lottery<S>> {
    p.check_len(t.n())?;
    let support = p.support();
    if support.is_empty() {
        return Err(Error::EmptySet);
    }
    let core = t.top_cycle(&support)?;
    if core.len() == 1 {
        return Ok(Lottery::point_mass(t.n(), core.as_slice()[0]));
    }
    let ids = core.as_slice();
    let k = ids.len();
    let mut a: Vec<Vec<S>> = ids
        .iter()
        .map(|&y| {
            let leave = p.mass(t.dominators_of(y));
            ids.iter()
                .map(|&x| {
                    if x == y {
                        leave.clone()
                    } else if t.beats(y, x) {
                        // y's mass grows from states x it beats when y is drawn.
                        -p.get(y).clone()
                    } else {
                        S::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut b = vec![S::zero(); k];
    a.push(vec![S::one(); k]);
    b.push(S::one());
    let pi = solve_unique(a, b)
        .ok_or_else(|| Error::Numerical("stationary system is singular".into()))?;
    let mut probs = vec![S::zero(); t.n()];
    for (&x, v) in ids.iter().zip(pi) {
        probs[x] = v;
    }
    Ok(Lottery::new_unchecked(probs))
}

/// Largest violation of the balance equations over `support(p)`.
pub fn balance_residual<S: Scalar>(t: &Tournament, p: &Lottery<S>, pi: &Lottery<S>) -> f64 {
    p.support()
        .iter()
        .map(|x| {
            let lhs = pi.mass(t.dominated_by(x)) * p.get(x).clone();
            let rhs = pi.get(x).clone() * p.mass(t.dominators_of(x));
            (lhs - rhs).to_f64().abs()
        })
        .fold(0.0, f64::max)
}

/// The chain run forward from `p^[0] = sampling`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState<S> {
    pub sampling: Lottery<S>,
    pub current: Lottery<S>,
    pub t: usize,
}

impl<S: Scalar> ChainState<S> {
    pub fn new(t: &Tournament, sampling: Lottery<S>) -> Result<Self> {
        sampling.check_len(t.n())?;
        Ok(Self { current: sampling.clone(), sampling, t: 0 })
    }

    pub fn step(&mut self, t: &Tournament) -> Result<()> {
        self.current = chain_step(t, &self.sampling, &self.current)?;
        self.t += 1;
        Ok(())
    }
}

/// The Top-Cycle of the restriction to `support(p)`; support of the stationary law.
pub fn recurrent_class<S: Scalar>(t: &Tournament, p: &Lottery<S>) -> Result<AlternativeSet> {
    t.top_cycle(&p.support())
}
