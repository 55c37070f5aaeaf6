//! Potential-function diagnostics of the urn process.
//!
//! With `p*` the optimal strategy and an urn holding `n(x)` balls of colour
//! `x` out of `total`, the potential is
//! `mu = sum_x p*(x) * LD[n(x), total]` where `LD[a, b] = -sum_{i=a}^{b-1} 1/i`
//! is a discrete logarithm. Adding one ball of colour `w` changes `mu` by
//! `eps(w) / total` with `eps(x) = p*(x) / ñ(x) - 1`, so all conditional
//! moments below are finite sums over the reinforced colour.
//!
//! Every denominator is the current ball count `total`; with `A` initial balls
//! after `tau` steps that is `A + tau`.
//!
//! The variance step sums over *all* colours, not only the Bipartisan set:
//! colours outside it have `eps = -1` and still carry reinforcement mass.

use crate::chain::{p2, p3, stationary};
use crate::error::{Error, Result};
use crate::game::{mixed_payoff, optimal_strategy, payoff_against, OptimalStrategy};
use crate::lottery::Lottery;
use crate::scalar::{Rational, Scalar};
use crate::tournament::Tournament;
use crate::urn::{ReinforcementRule, Urn};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A tournament together with its optimal strategy.
#[derive(Debug, Clone)]
pub struct DiagnosticsContext {
    tournament: Tournament,
    pstar: OptimalStrategy,
    pstar_f64: Vec<f64>,
    phi: f64,
}

impl DiagnosticsContext {
    pub fn new(tournament: Tournament) -> Result<Self> {
        let pstar = optimal_strategy(&tournament)?;
        Ok(Self::from_strategy(tournament, pstar))
    }

    pub fn from_strategy(tournament: Tournament, pstar: OptimalStrategy) -> Self {
        let pstar_f64 = pstar.lottery.to_f64().into_inner();
        // phi = sum over BP of p* log p*
        let phi = pstar_f64.iter().filter(|p| **p > 0.0).map(|p| p * p.ln()).sum();
        Self { tournament, pstar, pstar_f64, phi }
    }

    pub fn tournament(&self) -> &Tournament {
        &self.tournament
    }

    pub fn pstar(&self) -> &OptimalStrategy {
        &self.pstar
    }

    pub fn pstar_f64(&self) -> &[f64] {
        &self.pstar_f64
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    fn check(&self, u: &Urn) -> Result<()> {
        if u.counts().len() == self.tournament.n() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.tournament.n(), got: u.counts().len() })
        }
    }

    fn pstar_as<S: Scalar>(&self) -> Lottery<S> {
        Lottery::new_unchecked(self.pstar.lottery.probs().iter().map(S::from_ratio).collect())
    }

    /// L-infinity distance from the urn proportions to `p*`.
    pub fn distance(&self, u: &Urn) -> f64 {
        let total = u.total() as f64;
        u.counts()
            .iter()
            .zip(&self.pstar_f64)
            .map(|(&c, p)| (c as f64 / total - p).abs())
            .fold(0.0, f64::max)
    }

    /// Proportion of balls whose colour is outside the Bipartisan set.
    pub fn mass_outside_bp(&self, u: &Urn) -> f64 {
        let outside: u64 = u
            .counts()
            .iter()
            .enumerate()
            .filter(|(x, _)| !self.pstar.support.contains(*x))
            .map(|(_, c)| c)
            .sum();
        outside as f64 / u.total() as f64
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn check_ld(a: u64, b: u64) -> Result<()> {
    if a == 0 || a > b {
        Err(Error::LdRange { a, b })
    } else {
        Ok(())
    }
}

/// `LD[a, b] = -sum_{i=a}^{b-1} 1/i`, for `0 < a <= b`.
pub fn ld(a: u64, b: u64) -> Result<f64> {
    check_ld(a, b)?;
    Ok(-compensated_sum((a..b).map(|i| 1.0 / i as f64)))
}

pub fn ld_exact(a: u64, b: u64) -> Result<Rational> {
    check_ld(a, b)?;
    Ok((a..b).fold(Rational::from_i64(0), |acc, i| acc - Rational::from_counts(1, i)))
}

/// `H_k = sum_{i=1}^{k} 1/i`.
pub fn harmonic(k: u64) -> f64 {
    compensated_sum((1..=k).map(|i| 1.0 / i as f64))
}

/// `sum_{i >= m} 1/i^2`, accurate well below 1e-12 for every `m >= 1`.
pub fn inverse_square_tail(m: u64) -> f64 {
    assert!(m >= 1);
    let cut = m.max(100);
    let head = compensated_sum((m..cut).map(|i| 1.0 / (i as f64 * i as f64)));
    // Euler-Maclaurin remainder at `cut`; the first omitted term is below 1e-19.
    let n = cut as f64;
    let tail = 1.0 / n + 1.0 / (2.0 * n * n) + 1.0 / (6.0 * n.powi(3)) - 1.0 / (30.0 * n.powi(5))
        + 1.0 / (42.0 * n.powi(7));
    head + tail
}

/// Lower and upper bounds on `H_k` from `log(k+1) + gamma` minus half an
/// inverse-square tail starting at `k+1` (lower) or `k+2` (upper).
pub fn harmonic_bounds(k: u64) -> (f64, f64) {
    let base = ((k + 1) as f64).ln() + EULER_GAMMA;
    (base - 0.5 * inverse_square_tail(k + 1), base - 0.5 * inverse_square_tail(k + 2))
}

pub fn mu(ctx: &DiagnosticsContext, u: &Urn) -> Result<f64> {
    ctx.check(u)?;
    let total = u.total();
    let mut acc = 0.0;
    for (x, &c) in u.counts().iter().enumerate() {
        let w = ctx.pstar_f64[x];
        if w > 0.0 {
            acc += w * ld(c, total)?;
        }
    }
    Ok(acc)
}

pub fn mu_exact(ctx: &DiagnosticsContext, u: &Urn) -> Result<Rational> {
    ctx.check(u)?;
    let total = u.total();
    let mut acc = Rational::from_i64(0);
    for (x, &c) in u.counts().iter().enumerate() {
        let w = ctx.pstar.lottery.get(x);
        if *w != Rational::from_i64(0) {
            acc += w * ld_exact(c, total)?;
        }
    }
    Ok(acc)
}

/// `sum_x p*(x) log ñ(x)`, the continuous counterpart of `mu`.
pub fn mu_log(ctx: &DiagnosticsContext, u: &Urn) -> Result<f64> {
    ctx.check(u)?;
    let total = u.total() as f64;
    Ok(u.counts()
        .iter()
        .zip(&ctx.pstar_f64)
        .filter(|(_, p)| **p > 0.0)
        .map(|(&c, p)| p * (c as f64 / total).ln())
        .sum())
}

/// Change of `mu` when one ball of colour `w` is added:
/// `-sum_{v != w} p*(v)/total - p*(w) (1/total - 1/n(w))`.
pub fn increment<S: Scalar>(ctx: &DiagnosticsContext, u: &Urn, w: usize) -> Result<S> {
    ctx.check(u)?;
    ctx.tournament.check_index(w)?;
    let total = u.total();
    let pstar = ctx.pstar_as::<S>();
    let mut acc = S::zero();
    for v in 0..u.counts().len() {
        if v != w {
            acc = acc - pstar.get(v).clone() * S::from_counts(1, total);
        }
    }
    let own = S::from_counts(1, total) - S::from_counts(1, u.counts()[w]);
    Ok(acc - pstar.get(w).clone() * own)
}

/// `E[mu' - mu | urn]` under two-alternatives reinforcement: `g(p*, ñ) / total`.
pub fn drift_two<S: Scalar>(ctx: &DiagnosticsContext, u: &Urn) -> Result<S> {
    ctx.check(u)?;
    let p = u.proportions::<S>();
    let g = mixed_payoff(&ctx.tournament, &ctx.pstar_as::<S>(), &p)?;
    Ok(g / S::from_counts(u.total(), 1))
}

/// `E[mu' - mu | urn]` under three-alternatives reinforcement:
/// `[g(p*, ñ) + 1/2 sum_w g(w, ñ)^2 p*(w) + 1/2 sum_v ñ(v) g(p*, v) (1 + g(v, ñ))] / total`.
/// Every bracketed term is nonnegative.
pub fn drift_three<S: Scalar>(ctx: &DiagnosticsContext, u: &Urn) -> Result<S> {
    ctx.check(u)?;
    let t = &ctx.tournament;
    let p = u.proportions::<S>();
    let pstar = ctx.pstar_as::<S>();
    let half = S::from_counts(1, 2);
    let g_pstar_p = mixed_payoff(t, &pstar, &p)?;
    let mut squares = S::zero();
    let mut cross = S::zero();
    for w in 0..t.n() {
        let gw = payoff_against(t, w, &p);
        squares = squares + gw.clone() * gw.clone() * pstar.get(w).clone();
        // g(p*, w) = -g(w, p*)
        let g_pstar_w = -payoff_against(t, w, &pstar);
        cross = cross + p.get(w).clone() * g_pstar_w * (S::one() + gw);
    }
    let bracket = g_pstar_p + half.clone() * squares + half * cross;
    Ok(bracket / S::from_counts(u.total(), 1))
}

/// Law of the reinforced colour under `rule` for the current urn.
pub fn reinforcement_law<S: Scalar>(t: &Tournament, u: &Urn, rule: ReinforcementRule) -> Result<Lottery<S>> {
    let p = u.proportions::<S>();
    match rule {
        ReinforcementRule::TwoAlternatives => p2(t, &p),
        ReinforcementRule::ThreeAlternatives => p3(t, &p),
        ReinforcementRule::Fast => stationary(t, &p),
    }
}

/// `E[mu' - mu | urn]` for any rule, as `sum_w law(w) * increment(w)`.
pub fn drift<S: Scalar>(ctx: &DiagnosticsContext, u: &Urn, rule: ReinforcementRule) -> Result<S> {
    let law = reinforcement_law::<S>(&ctx.tournament, u, rule)?;
    let mut acc = S::zero();
    for w in 0..u.counts().len() {
        acc = acc + law.get(w).clone() * increment::<S>(ctx, u, w)?;
    }
    Ok(acc)
}

/// `eps(x) = p*(x) / ñ(x) - 1`; exactly `-1` off the Bipartisan set.
pub fn epsilon<S: Scalar>(ctx: &DiagnosticsContext, u: &Urn) -> Result<Vec<S>> {
    ctx.check(u)?;
    let pstar = ctx.pstar_as::<S>();
    let total = u.total();
    Ok(u.counts()
        .iter()
        .enumerate()
        .map(|(x, &c)| pstar.get(x).clone() * S::from_counts(total, c) - S::one())
        .collect())
}

/// `E[(mu' - mu)^2 | urn]` under two-alternatives reinforcement:
/// `(1 / total^2) sum_x ñ^[2](x) eps(x)^2`, summed over every colour.
pub fn variance_step<S: Scalar>(ctx: &DiagnosticsContext, u: &Urn) -> Result<S> {
    let eps = epsilon::<S>(ctx, u)?;
    let law = p2(&ctx.tournament, &u.proportions::<S>())?;
    let total = u.total();
    let sum = eps
        .into_iter()
        .zip(law.probs())
        .fold(S::zero(), |acc, (e, w)| acc + w.clone() * e.clone() * e);
    Ok(sum / S::from_counts(total * total, 1))
}

/// Both sides of the epsilon-control comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonBound {
    /// `sum_{x in BP} (ñ(x) + p*(x)/2) eps(x)^2`.
    pub lhs: f64,
    /// `phi - sum_x p*(x) log ñ(x)`, the Kullback-Leibler divergence of ñ from p*.
    pub rhs_log: f64,
    /// `phi - mu`, with the discrete logarithm.
    pub rhs_ld: f64,
}

impl EpsilonBound {
    pub fn holds_log(&self) -> bool {
        self.lhs <= self.rhs_log
    }

    pub fn holds_ld(&self) -> bool {
        self.lhs <= self.rhs_ld
    }
}

/// Evaluates the epsilon-control inequality without asserting it.
///
/// The inequality `lhs <= rhs_log` does not hold in general: near `p*` the
/// left side is about three times the divergence on the right (for the
/// 3-cycle and urn (2,1,1), `lhs = 1/6` against `rhs_log ≈ 0.0566`). Callers
/// get all three numbers.
pub fn epsilon_bound(ctx: &DiagnosticsContext, u: &Urn) -> Result<EpsilonBound> {
    let eps = epsilon::<f64>(ctx, u)?;
    let total = u.total() as f64;
    let lhs = ctx
        .pstar
        .support
        .iter()
        .map(|x| (u.counts()[x] as f64 / total + ctx.pstar_f64[x] / 2.0) * eps[x] * eps[x])
        .sum();
    Ok(EpsilonBound { lhs, rhs_log: ctx.phi - mu_log(ctx, u)?, rhs_ld: ctx.phi - mu(ctx, u)? })
}
