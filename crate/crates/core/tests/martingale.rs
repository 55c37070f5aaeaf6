//! Sweeps and replays for the urn diagnostics.

use tourney_core::diagnostics::{drift_three, drift_two, harmonic, mu};
use tourney_core::rng::StreamRng;
use tourney_core::urn::{mean_and_stderr, step};
use tourney_core::{DiagnosticsContext, ReinforcementRule, Tournament, Urn};

/// Every count vector with positive entries summing to exactly `total`.
fn compositions(n: usize, total: u64, f: &mut impl FnMut(&[u64])) {
    fn rec(n: usize, left: u64, prefix: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            f(prefix);
            prefix.pop();
            return;
        }
        let rest = (n - prefix.len() - 1) as u64;
        for c in 1..=left - rest {
            prefix.push(c);
            rec(n, left - c, prefix, f);
            prefix.pop();
        }
    }
    rec(n, total, &mut Vec::new(), f);
}

/// `mu <= phi - c / total` with `c = 0.4 (|X| - 1)` for every urn with total
/// up to `max_total`. The library `mu` is used on totals up to
/// `direct_total`; beyond that `mu` is evaluated from prefix harmonic sums,
/// `ld(a, b) = H(a - 1) - H(b - 1)`, checked against it on the smaller totals.
fn gap_sweep(t: Tournament, max_total: u64, direct_total: u64) {
    let n = t.n();
    let ctx = DiagnosticsContext::new(t).unwrap();
    assert_eq!(ctx.pstar().support.len(), n, "Bipartisan set must be everything");
    let pstar = ctx.pstar_f64().to_vec();
    let c = 0.4 * (n as f64 - 1.0);
    let prefix: Vec<f64> = (0..=max_total).map(harmonic).collect();
    for total in n as u64..=max_total {
        let bound = ctx.phi() - c / total as f64;
        compositions(n, total, &mut |counts| {
            let fast: f64 =
                counts.iter().zip(&pstar).map(|(&k, p)| p * (prefix[k as usize - 1] - prefix[total as usize - 1])).sum();
            if total <= direct_total {
                let m = mu(&ctx, &Urn::new(counts.to_vec()).unwrap()).unwrap();
                assert!((m - fast).abs() < 1e-12, "{counts:?}: {m} vs {fast}");
            }
            assert!(fast <= bound, "{counts:?}: mu = {fast}, phi = {}", ctx.phi());
        });
    }
}

#[test]
fn gap_below_phi_three_cycle() {
    gap_sweep(Tournament::three_cycle(), 1000, 120);
}

#[test]
fn gap_below_phi_cyclone_five() {
    gap_sweep(Tournament::cyclone(5).unwrap(), 40, 25);
}

/// Mean one-step change of `mu` over independent replays from `counts`.
fn replay_mean(t: &Tournament, ctx: &DiagnosticsContext, counts: &[u64], rule: ReinforcementRule) -> (f64, f64) {
    let before = Urn::new(counts.to_vec()).unwrap();
    let m0 = mu(ctx, &before).unwrap();
    let incs: Vec<f64> = (0..100_000u64)
        .map(|k| {
            let mut u = before.clone();
            let mut rng = StreamRng::new(77, k);
            step(t, &mut u, rule, &mut rng).unwrap();
            mu(ctx, &u).unwrap() - m0
        })
        .collect();
    mean_and_stderr(&incs)
}

#[test]
fn empirical_drift_matches_closed_forms() {
    let cases = [
        (Tournament::three_cycle(), vec![3, 1, 2]),
        (Tournament::with_condorcet_winner(&Tournament::three_cycle()), vec![1, 2, 2, 3]),
        (Tournament::random(5, 8).unwrap(), vec![2, 1, 4, 1, 3]),
    ];
    for (t, counts) in cases {
        let ctx = DiagnosticsContext::new(t.clone()).unwrap();
        let u = Urn::new(counts.clone()).unwrap();
        for (rule, expected) in [
            (ReinforcementRule::TwoAlternatives, drift_two::<f64>(&ctx, &u).unwrap()),
            (ReinforcementRule::ThreeAlternatives, drift_three::<f64>(&ctx, &u).unwrap()),
        ] {
            assert!(expected >= 0.0);
            let (mean, se) = replay_mean(&t, &ctx, &counts, rule);
            assert!((mean - expected).abs() <= 3.0 * se, "{rule} on {counts:?}: {mean} vs {expected} (se {se})");
        }
    }
}

#[test]
fn two_rule_mu_is_a_martingale_on_the_cycle() {
    // Bipartisan set is everything, so drift_two vanishes on every urn.
    let ctx = DiagnosticsContext::new(Tournament::cyclone(5).unwrap()).unwrap();
    for total in 5..=12 {
        compositions(5, total, &mut |counts| {
            let d = drift_two::<tourney_core::Rational>(&ctx, &Urn::new(counts.to_vec()).unwrap()).unwrap();
            assert_eq!(d, num_traits::Zero::zero(), "{counts:?}");
        });
    }
}
