//! Reinforcement urns.
//!
//! An urn holds a positive number of balls of every colour (alternative). At
//! each step a colour is chosen according to the reinforcement rule and one
//! ball of that colour is added; balls are never removed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::chain::{balance_residual, stationary};
use crate::diagnostics::{mu, DiagnosticsContext};
use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::rng::StreamRng;
use crate::scalar::{Rational, Scalar};
use crate::tournament::Tournament;

/// Largest balance residual accepted for the float stationary law.
pub const FAST_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Urn {
    counts: Vec<u64>,
    total: u64,
    initial_total: u64,
    tau: u64,
}

impl Urn {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidUrn("no colours".into()));
        }
        if let Some(x) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidUrn(format!("colour {x} has no balls")));
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total, initial_total: total, tau: 0 })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn initial_total(&self) -> u64 {
        self.initial_total
    }

    /// Steps taken since construction.
    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn add(&mut self, x: usize) {
        self.counts[x] += 1;
        self.total += 1;
        self.tau += 1;
    }

    /// Proportions `ñ(x) = n(x) / total`.
    pub fn proportions<S: Scalar>(&self) -> Lottery<S> {
        Lottery::new_unchecked(self.counts.iter().map(|&c| S::from_counts(c, self.total)).collect())
    }

    /// Colour of a uniformly drawn ball: a uniform integer in `[0, total)`
    /// mapped through cumulative counts in index order.
    pub fn draw(&self, rng: &mut StreamRng) -> usize {
        let mut r = rng.below(self.total);
        for (x, &c) in self.counts.iter().enumerate() {
            if r < c {
                return x;
            }
            r -= c;
        }
        unreachable!("draw below total")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReinforcementRule {
    /// Winner of two independent draws.
    TwoAlternatives,
    /// Winner of `max(max(a, b), c)` over three independent draws.
    ThreeAlternatives,
    /// A draw from the stationary law of the chain sampled by the urn.
    Fast,
}

impl ReinforcementRule {
    pub const ALL: [ReinforcementRule; 3] = [Self::TwoAlternatives, Self::ThreeAlternatives, Self::Fast];

    pub fn name(self) -> &'static str {
        match self {
            Self::TwoAlternatives => "two",
            Self::ThreeAlternatives => "three",
            Self::Fast => "fast",
        }
    }
}

impl fmt::Display for ReinforcementRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReinforcementRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "two-alternatives" => Ok(Self::TwoAlternatives),
            "three" | "three-alternatives" => Ok(Self::ThreeAlternatives),
            "fast" => Ok(Self::Fast),
            other => Err(Error::Config(format!("unknown rule {other:?} (expected two, three or fast)"))),
        }
    }
}

/// Pick the colour to reinforce without changing the urn.
pub fn choose(
    t: &Tournament,
    u: &Urn,
    rule: ReinforcementRule,
    exact_fast: bool,
    rng: &mut StreamRng,
) -> Result<usize> {
    Ok(match rule {
        ReinforcementRule::TwoAlternatives => {
            let a = u.draw(rng);
            let b = u.draw(rng);
            t.winner(a, b)
        }
        ReinforcementRule::ThreeAlternatives => {
            let a = u.draw(rng);
            let b = u.draw(rng);
            let c = u.draw(rng);
            t.winner(t.winner(a, b), c)
        }
        ReinforcementRule::Fast if exact_fast => sample_exact(&stationary(t, &u.proportions::<Rational>())?, rng),
        ReinforcementRule::Fast => {
            let p = u.proportions::<f64>();
            let pi = stationary(t, &p)?;
            let residual = balance_residual(t, &p, &pi);
            if !(residual < FAST_RESIDUAL_TOL) {
                return Err(Error::Numerical(format!("stationary balance residual {residual:e}")));
            }
            sample_float(&pi, rng)
        }
    })
}

/// Add one ball according to `rule`; returns the reinforced colour.
pub fn step(t: &Tournament, u: &mut Urn, rule: ReinforcementRule, rng: &mut StreamRng) -> Result<usize> {
    let x = choose(t, u, rule, false, rng)?;
    u.add(x);
    Ok(x)
}

fn sample_float(p: &Lottery<f64>, rng: &mut StreamRng) -> usize {
    let r = rng.unit_f64();
    let mut acc = 0.0;
    let mut last = 0;
    for (x, &w) in p.probs().iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = x;
        if r < acc {
            return x;
        }
    }
    last
}

fn sample_exact(p: &Lottery<Rational>, rng: &mut StreamRng) -> usize {
    let den = p.probs().iter().fold(num_bigint::BigInt::one(), |l, r| l.lcm(r.denom()));
    let bound = den.abs().to_biguint().expect("positive");
    let mut r = rng.below_big(&bound);
    for (x, w) in p.probs().iter().enumerate() {
        let share = (w.numer() * (&den / w.denom())).to_biguint().unwrap_or_else(BigUint::zero);
        if r < share {
            return x;
        }
        r -= share;
    }
    unreachable!("draw below common denominator")
}

/// Snapshot times.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Schedule {
    /// 1, 2, 4, 8, ... up to the horizon, plus the horizon.
    #[default]
    Geometric,
    Explicit(Vec<u64>),
}

impl Schedule {
    pub fn times(&self, horizon: u64) -> Result<Vec<u64>> {
        let mut times = match self {
            Schedule::Geometric => {
                let mut v: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(2))
                    .take_while(|&t| t <= horizon)
                    .collect();
                v.push(horizon);
                v
            }
            Schedule::Explicit(v) => {
                if let Some(bad) = v.iter().find(|&&t| t == 0 || t > horizon) {
                    return Err(Error::Config(format!("snapshot time {bad} outside [1, {horizon}]")));
                }
                v.clone()
            }
        };
        times.sort_unstable();
        times.dedup();
        if times.is_empty() {
            return Err(Error::Config("empty snapshot schedule".into()));
        }
        Ok(times)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Geometric => f.write_str("geometric"),
            Schedule::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "geometric" {
            return Ok(Schedule::Geometric);
        }
        s.split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|_| Error::Config(format!("bad snapshot time {p:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Schedule::Explicit)
    }
}

/// One simulation: everything that determines a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub tournament: Tournament,
    pub rule: ReinforcementRule,
    pub initial_counts: Vec<u64>,
    pub horizon: u64,
    pub seed: u64,
    pub schedule: Schedule,
    /// Recompute the fast rule's stationary law in exact rationals.
    pub exact_fast: bool,
}

impl SimConfig {
    pub fn new(tournament: Tournament, rule: ReinforcementRule, initial_counts: Vec<u64>, horizon: u64, seed: u64) -> Self {
        Self { tournament, rule, initial_counts, horizon, seed, schedule: Schedule::Geometric, exact_fast: false }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    fn validate(&self) -> Result<Vec<u64>> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.initial_counts.len() != self.tournament.n() {
            return Err(Error::LengthMismatch { expected: self.tournament.n(), got: self.initial_counts.len() });
        }
        Urn::new(self.initial_counts.clone())?;
        self.schedule.times(self.horizon)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tau: u64,
    pub counts: Vec<u64>,
    pub mu: f64,
    pub distance: f64,
    pub mass_outside_bp: f64,
}

impl Snapshot {
    fn take(ctx: &DiagnosticsContext, u: &Urn) -> Result<Self> {
        Ok(Self {
            tau: u.tau(),
            counts: u.counts().to_vec(),
            mu: mu(ctx, u)?,
            distance: ctx.distance(u),
            mass_outside_bp: ctx.mass_outside_bp(u),
        })
    }

    pub fn proportions(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    /// State before the first step.
    pub initial: Snapshot,
    /// One entry per scheduled time, increasing.
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn at(&self, tau: u64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.tau == tau)
    }
}

/// Run stream 0 of the configured seed.
pub fn run(cfg: &SimConfig) -> Result<Trajectory> {
    let ctx = DiagnosticsContext::new(cfg.tournament.clone())?;
    run_stream(cfg, &ctx, 0)
}

/// Run stream `stream` of the configured seed against a prepared context.
pub fn run_stream(cfg: &SimConfig, ctx: &DiagnosticsContext, stream: u64) -> Result<Trajectory> {
    let times = cfg.validate()?;
    let t = &cfg.tournament;
    let mut rng = StreamRng::new(cfg.seed, stream);
    let mut urn = Urn::new(cfg.initial_counts.clone())?;
    let initial = Snapshot::take(ctx, &urn)?;
    let mut snapshots = Vec::with_capacity(times.len());
    for target in times {
        while urn.tau() < target {
            let x = choose(t, &urn, cfg.rule, cfg.exact_fast, &mut rng)?;
            urn.add(x);
        }
        snapshots.push(Snapshot::take(ctx, &urn)?);
    }
    Ok(Trajectory { seed: cfg.seed, stream, initial, snapshots })
}

/// Trajectories for streams `0..n_seeds`, in stream order.
pub fn run_ensemble(cfg: &SimConfig, n_seeds: usize, parallel: bool) -> Result<Vec<Trajectory>> {
    if n_seeds == 0 {
        return Err(Error::Config("ensemble needs at least one seed".into()));
    }
    cfg.validate()?;
    let ctx = DiagnosticsContext::new(cfg.tournament.clone())?;
    let streams: Vec<u64> = (0..n_seeds as u64).collect();
    if parallel {
        streams.par_iter().map(|&k| run_stream(cfg, &ctx, k)).collect()
    } else {
        streams.iter().map(|&k| run_stream(cfg, &ctx, k)).collect()
    }
}

/// Mean and standard error of a sample.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Quantile by linear interpolation between order statistics
/// (`h = (n - 1) q`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{p2, p3};

    fn q(n: u64, d: u64) -> Rational {
        Rational::from_counts(n, d)
    }

    #[test]
    fn urn_validation() {
        assert!(Urn::new(vec![1, 0]).is_err());
        assert!(Urn::new(vec![]).is_err());
        let mut u = Urn::new(vec![2, 3]).unwrap();
        u.add(0);
        assert_eq!((u.total(), u.initial_total(), u.tau()), (6, 5, 1));
    }

    #[test]
    fn single_colour_draws() {
        let u = Urn::new(vec![5]).unwrap();
        let mut rng = StreamRng::new(1, 0);
        assert!((0..100).all(|_| u.draw(&mut rng) == 0));
        let t = Tournament::transitive(1).unwrap();
        let mut u = u;
        assert_eq!(step(&t, &mut u, ReinforcementRule::TwoAlternatives, &mut rng).unwrap(), 0);
        assert_eq!(u.counts(), &[6]);
    }

    #[test]
    fn draw_frequencies() {
        let u = Urn::new(vec![1, 1, 1]).unwrap();
        let mut rng = StreamRng::new(2024, 0);
        let draws = 300_000;
        let mut seen = [0u64; 3];
        for _ in 0..draws {
            seen[u.draw(&mut rng)] += 1;
        }
        for c in seen {
            assert!((c as f64 / draws as f64 - 1.0 / 3.0).abs() < 0.01);
        }
        let again: Vec<usize> = {
            let mut r = StreamRng::new(2024, 0);
            (0..50).map(|_| u.draw(&mut r)).collect()
        };
        let mut r = StreamRng::new(2024, 0);
        assert_eq!(again, (0..50).map(|_| u.draw(&mut r)).collect::<Vec<_>>());
    }

    #[test]
    fn two_rule_law_on_skewed_urn() {
        let t = Tournament::three_cycle();
        let u = Urn::new(vec![2, 1, 1]).unwrap();
        let mut oracle = vec![q(0, 1); 3];
        for a in 0..3 {
            for b in 0..3 {
                oracle[t.winner(a, b)] += q(u.counts()[a] * u.counts()[b], 16);
            }
        }
        assert_eq!(oracle, vec![q(8, 16), q(3, 16), q(5, 16)]);
        assert_eq!(p2(&t, &u.proportions::<Rational>()).unwrap().probs(), oracle.as_slice());
    }

    #[test]
    fn three_rule_uniform_on_balanced_cycle() {
        let t = Tournament::three_cycle();
        let u = Urn::new(vec![1, 1, 1]).unwrap();
        let mut oracle = vec![0u32; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    oracle[t.winner(t.winner(a, b), c)] += 1;
                }
            }
        }
        assert_eq!(oracle, vec![9, 9, 9]);
        assert_eq!(p3(&t, &u.proportions::<Rational>()).unwrap(), Lottery::uniform(3));
    }

    /// Empirical single-step law within 3 standard errors of the closed form.
    fn check_one_step_law(t: &Tournament, counts: &[u64], rule: ReinforcementRule, exact: bool) {
        let u = Urn::new(counts.to_vec()).unwrap();
        let law = crate::diagnostics::reinforcement_law::<f64>(t, &u, rule).unwrap();
        let replays = 100_000;
        let mut rng = StreamRng::new(77, rule as u64);
        let mut seen = vec![0u64; t.n()];
        for _ in 0..replays {
            seen[choose(t, &u, rule, exact, &mut rng).unwrap()] += 1;
        }
        for (x, &c) in seen.iter().enumerate() {
            let p = *law.get(x);
            let freq = c as f64 / replays as f64;
            let se = (p * (1.0 - p) / replays as f64).sqrt();
            assert!((freq - p).abs() <= 3.0 * se + 1e-12, "{rule} x={x}: {freq} vs {p}");
        }
    }

    #[test]
    fn one_step_laws() {
        let t = Tournament::random(5, 8).unwrap();
        for rule in [ReinforcementRule::TwoAlternatives, ReinforcementRule::ThreeAlternatives] {
            check_one_step_law(&t, &[4, 1, 3, 2, 5], rule, false);
        }
        let small = Tournament::random(4, 1).unwrap();
        check_one_step_law(&small, &[4, 1, 3, 2], ReinforcementRule::Fast, false);
    }

    #[test]
    fn exact_fast_matches_law() {
        let t = Tournament::cyclone(5).unwrap();
        let u = Urn::new(vec![3, 1, 2, 5, 1]).unwrap();
        let law = crate::diagnostics::reinforcement_law::<f64>(&t, &u, ReinforcementRule::Fast).unwrap();
        let mut rng = StreamRng::new(5, 0);
        let replays = 40_000;
        let mut seen = [0u64; 5];
        for _ in 0..replays {
            seen[choose(&t, &u, ReinforcementRule::Fast, true, &mut rng).unwrap()] += 1;
        }
        for x in 0..5 {
            let p = law.get(x);
            let se = (p * (1.0 - p) / replays as f64).sqrt();
            assert!((seen[x] as f64 / replays as f64 - p).abs() <= 4.0 * se);
        }
    }

    #[test]
    fn fast_rule_with_condorcet_winner_always_picks_it() {
        let t = Tournament::with_condorcet_winner(&Tournament::three_cycle());
        let mut u = Urn::new(vec![1, 3, 3, 3]).unwrap();
        let mut rng = StreamRng::new(0, 0);
        for _ in 0..200 {
            assert_eq!(step(&t, &mut u, ReinforcementRule::Fast, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Geometric.times(10).unwrap(), vec![1, 2, 4, 8, 10]);
        assert_eq!(Schedule::Geometric.times(1).unwrap(), vec![1]);
        assert_eq!(Schedule::Explicit(vec![10]).times(10).unwrap(), vec![10]);
        assert!(Schedule::Explicit(vec![11]).times(10).is_err());
        assert!(Schedule::Explicit(vec![0]).times(10).is_err());
        assert_eq!("1,5,3".parse::<Schedule>().unwrap(), Schedule::Explicit(vec![1, 5, 3]));
        assert_eq!("geometric".parse::<Schedule>().unwrap(), Schedule::Geometric);
    }

    #[test]
    fn run_single_snapshot_and_determinism() {
        let cfg = SimConfig::new(Tournament::three_cycle(), ReinforcementRule::ThreeAlternatives, vec![5, 1, 1], 10, 3)
            .with_schedule(Schedule::Explicit(vec![10]));
        let a = run(&cfg).unwrap();
        assert_eq!(a.snapshots.len(), 1);
        assert_eq!(a.snapshots[0].counts.iter().sum::<u64>(), 7 + 10);
        assert_eq!(a, run(&cfg).unwrap());
        assert_eq!(a.initial.tau, 0);
    }

    #[test]
    fn run_errors() {
        let base = SimConfig::new(Tournament::three_cycle(), ReinforcementRule::TwoAlternatives, vec![1, 1, 1], 0, 0);
        assert!(run(&base).is_err());
        let zero = SimConfig { horizon: 5, initial_counts: vec![1, 0, 1], ..base.clone() };
        assert!(run(&zero).is_err());
        let ok = SimConfig { horizon: 5, ..base };
        assert!(run_ensemble(&ok, 0, true).is_err());
    }

    #[test]
    fn ensemble_contract() {
        let cfg = SimConfig::new(Tournament::cyclone(5).unwrap(), ReinforcementRule::TwoAlternatives, vec![1, 2, 1, 1, 3], 2000, 17);
        let one = run_ensemble(&cfg, 1, true).unwrap();
        assert_eq!(one, vec![run(&cfg).unwrap()]);
        let serial = run_ensemble(&cfg, 8, false).unwrap();
        let parallel = run_ensemble(&cfg, 8, true).unwrap();
        assert_eq!(serial, parallel);
        for tr in &serial {
            let mut last = 0;
            for s in &tr.snapshots {
                assert!(s.tau > last);
                last = s.tau;
                assert_eq!(s.counts.iter().sum::<u64>(), 8 + s.tau);
                assert!(s.counts.iter().zip(&tr.initial.counts).all(|(a, b)| a >= b));
            }
        }
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        let (m, se) = mean_and_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
