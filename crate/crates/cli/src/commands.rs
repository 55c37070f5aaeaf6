//! The subcommands, each turning resolved settings into data files.

use serde_json::{json, Value};
use tourney_core::chain::{iterate, stationary};
use tourney_core::diagnostics::{drift, epsilon, epsilon_bound, mu, variance_step};
use tourney_core::game::{optimal_strategy_with_limit, DEFAULT_EXACT_LIMIT};
use tourney_core::urn::{quantile, run, run_ensemble, Snapshot};
use tourney_core::{
    integrate, verify_optimal, AlternativeSet, DiagnosticsContext, Lottery, Rational, ReinforcementRule, Scalar,
    SimConfig, Trajectory, Urn,
};

use crate::config::{Format, Resolver, Settings};
use crate::error::{CliError, Result};
use crate::output::{float, fraction, fraction_pair, indexed, to_json_text, Artifact, Csv};

/// Quantile levels reported in ensemble summaries, besides the median.
pub const SUMMARY_LEVELS: [(&str, f64); 4] = [("q10", 0.1), ("q25", 0.25), ("q75", 0.75), ("q90", 0.9)];

/// Everything a command produced.
#[derive(Debug)]
pub struct Run {
    pub command: &'static str,
    pub seed: u64,
    /// Settings actually used, defaults included.
    pub config: Settings,
    pub artifacts: Vec<Artifact>,
    /// Warnings for stderr.
    pub notes: Vec<String>,
}

struct Common {
    seed: u64,
    format: Format,
}

fn common(r: &mut Resolver) -> Result<Common> {
    Ok(Common { seed: r.parse("seed", "0")?, format: r.parse("format", "csv")? })
}

fn finish(command: &'static str, c: &Common, r: Resolver, artifacts: Vec<Artifact>, notes: Vec<String>) -> Run {
    Run { command, seed: c.seed, config: r.into_used(), artifacts, notes }
}

fn decimals(p: &Lottery<Rational>) -> Vec<f64> {
    p.probs().iter().map(Scalar::to_f64).collect()
}

pub fn solve(settings: &Settings) -> Result<Run> {
    let mut r = Resolver::new(settings);
    let t = r.tournament()?;
    let limit: usize = r.parse("limit", &DEFAULT_EXACT_LIMIT.to_string())?;
    let c = common(&mut r)?;
    let n = t.n();
    let opt = optimal_strategy_with_limit(&t, limit)?;
    let tc = t.top_cycle(&AlternativeSet::all(n))?;
    let verdict = verify_optimal(&t, &opt.lottery)?;
    let pstar = opt.lottery.probs();

    let contents = match c.format {
        Format::Csv => {
            let mut csv = Csv::new(["x", "pstar", "decimal", "in_bp", "in_tc", "residual"]);
            for x in 0..n {
                csv.row([
                    x.to_string(),
                    fraction(&pstar[x]),
                    float(pstar[x].to_f64()),
                    u8::from(opt.support.contains(x)).to_string(),
                    u8::from(tc.contains(x)).to_string(),
                    fraction(&verdict.residuals[x]),
                ]);
            }
            csv.finish()
        }
        Format::Json => to_json_text(&json!({
            "n": n,
            "pstar": pstar.iter().map(fraction_pair).collect::<Vec<_>>(),
            "decimal": decimals(&opt.lottery),
            "bipartisan_set": opt.support.as_slice(),
            "top_cycle": tc.as_slice(),
            "residuals": verdict.residuals.iter().map(fraction_pair).collect::<Vec<_>>(),
            "optimal": verdict.optimal,
        })),
    };
    let name = format!("solve.{}", c.format.extension());
    Ok(finish("solve", &c, r, vec![Artifact::new(name, contents)], Vec::new()))
}

pub fn chain(settings: &Settings) -> Result<Run> {
    let mut r = Resolver::new(settings);
    let t = r.tournament()?;
    let p = r.rational_lottery("sampling", t.n())?;
    let steps: usize = r.parse("steps", "10")?;
    let c = common(&mut r)?;
    let seq = iterate(&t, &p, steps)?;
    let pi = stationary(&t, &p)?;

    let contents = match c.format {
        Format::Csv => {
            let mut csv = Csv::new(std::iter::once("t".to_string()).chain(indexed("p", t.n())));
            for (k, q) in seq.iter().enumerate() {
                csv.row(std::iter::once(k.to_string()).chain(decimals(q).into_iter().map(float)));
            }
            csv.row(std::iter::once("stationary".to_string()).chain(decimals(&pi).into_iter().map(float)));
            csv.finish()
        }
        Format::Json => {
            let entry = |q: &Lottery<Rational>| {
                json!({
                    "exact": q.probs().iter().map(fraction).collect::<Vec<_>>(),
                    "decimal": decimals(q),
                })
            };
            to_json_text(&json!({
                "sampling": p.probs().iter().map(fraction).collect::<Vec<_>>(),
                "sequence": seq.iter().map(entry).collect::<Vec<_>>(),
                "stationary": entry(&pi),
            }))
        }
    };
    let name = format!("chain.{}", c.format.extension());
    Ok(finish("chain", &c, r, vec![Artifact::new(name, contents)], Vec::new()))
}

fn sim_config(r: &mut Resolver, seed: u64) -> Result<SimConfig> {
    let t = r.tournament()?;
    let rule = r.rule()?;
    let initial = r.counts("initial", t.n())?;
    let horizon: u64 = r.parse("horizon", "1000")?;
    let schedule = r.schedule()?;
    let exact_fast: bool = r.parse("exact_fast", "false")?;
    let mut cfg = SimConfig::new(t, rule, initial, horizon, seed).with_schedule(schedule);
    cfg.exact_fast = exact_fast;
    Ok(cfg)
}

/// Column names of a trajectory table for `n` alternatives.
pub fn trajectory_header(n: usize) -> Vec<String> {
    std::iter::once("tau".to_string())
        .chain(indexed("p", n))
        .chain(["mu", "dist_pstar", "mass_outside_bp"].map(String::from))
        .collect()
}

fn trajectory_file(traj: &Trajectory, n: usize, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut csv = Csv::new(trajectory_header(n));
            for s in &traj.snapshots {
                csv.row(
                    std::iter::once(s.tau.to_string())
                        .chain(s.proportions().into_iter().map(float))
                        .chain([s.mu, s.distance, s.mass_outside_bp].map(float)),
                );
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = traj
                .snapshots
                .iter()
                .map(|s| {
                    json!({
                        "tau": s.tau,
                        "p": s.proportions(),
                        "mu": s.mu,
                        "dist_pstar": s.distance,
                        "mass_outside_bp": s.mass_outside_bp,
                    })
                })
                .collect();
            to_json_text(&json!({ "seed": traj.seed, "stream": traj.stream, "rows": rows }))
        }
    }
}

pub fn simulate(settings: &Settings) -> Result<Run> {
    let mut r = Resolver::new(settings);
    let c = common(&mut r)?;
    let cfg = sim_config(&mut r, c.seed)?;
    let traj = run(&cfg)?;
    let name = format!("trajectory.{}", c.format.extension());
    let contents = trajectory_file(&traj, cfg.tournament.n(), c.format);
    Ok(finish("simulate", &c, r, vec![Artifact::new(name, contents)], Vec::new()))
}

/// Median and quantiles of a sample, in summary column order.
pub fn summarize(values: &mut [f64]) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    std::iter::once(quantile(values, 0.5)).chain(SUMMARY_LEVELS.iter().map(|&(_, q)| quantile(values, q))).collect()
}

pub fn summary_header() -> Vec<String> {
    let stats: Vec<&str> = std::iter::once("median").chain(SUMMARY_LEVELS.iter().map(|&(name, _)| name)).collect();
    std::iter::once("tau".to_string())
        .chain(stats.iter().map(|s| format!("dist_{s}")))
        .chain(stats.iter().map(|s| format!("outside_{s}")))
        .collect()
}

fn summary_file(trajs: &[Trajectory], format: Format) -> String {
    let header = summary_header();
    let rows: Vec<Vec<f64>> = (0..trajs[0].snapshots.len())
        .map(|i| {
            let column = |f: fn(&Snapshot) -> f64| trajs.iter().map(|t| f(&t.snapshots[i])).collect::<Vec<_>>();
            let mut row = summarize(&mut column(|s| s.distance));
            row.extend(summarize(&mut column(|s| s.mass_outside_bp)));
            row
        })
        .collect();
    let taus = trajs[0].snapshots.iter().map(|s| s.tau);
    match format {
        Format::Csv => {
            let mut csv = Csv::new(&header);
            for (tau, row) in taus.zip(&rows) {
                csv.row(std::iter::once(tau.to_string()).chain(row.iter().map(|&v| float(v))));
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = taus
                .zip(&rows)
                .map(|(tau, row)| {
                    let mut obj = serde_json::Map::new();
                    obj.insert(header[0].clone(), json!(tau));
                    for (k, v) in header[1..].iter().zip(row) {
                        obj.insert(k.clone(), json!(v));
                    }
                    Value::Object(obj)
                })
                .collect();
            to_json_text(&json!({ "rows": rows }))
        }
    }
}

/// `threads`: `Some(1)` runs serially, `Some(k)` on a pool of `k` workers,
/// `None` on the global pool. Outputs do not depend on it.
pub fn ensemble(settings: &Settings, threads: Option<usize>) -> Result<Run> {
    let mut r = Resolver::new(settings);
    let c = common(&mut r)?;
    let cfg = sim_config(&mut r, c.seed)?;
    let n_seeds: usize = r.parse("n_seeds", "8")?;
    let trajs = match threads {
        Some(1) => run_ensemble(&cfg, n_seeds, false)?,
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::config(format!("threads = {k}: {e}")))?
            .install(|| run_ensemble(&cfg, n_seeds, true))?,
        None => run_ensemble(&cfg, n_seeds, true)?,
    };
    let ext = c.format.extension();
    let n = cfg.tournament.n();
    let mut artifacts: Vec<Artifact> = trajs
        .iter()
        .map(|tr| Artifact::new(format!("trajectory_{:03}.{ext}", tr.stream), trajectory_file(tr, n, c.format)))
        .collect();
    artifacts.push(Artifact::new(format!("summary.{ext}"), summary_file(&trajs, c.format)));
    Ok(finish("ensemble", &c, r, artifacts, Vec::new()))
}

pub fn flow(settings: &Settings) -> Result<Run> {
    let mut r = Resolver::new(settings);
    let t = r.tournament()?;
    let rule = r.rule()?;
    if rule == ReinforcementRule::Fast {
        return Err(CliError::config("the fast rule has no mean-field flow"));
    }
    let p0 = r.float_lottery("p0", t.n())?;
    let s_end: f64 = r.parse("s_end", "20")?;
    let step: f64 = r.parse("step", "0.01")?;
    let sample_every: f64 = r.parse("sample_every", "0.1")?;
    let c = common(&mut r)?;
    let path = integrate(&t, rule, &p0, s_end, step, sample_every)?;
    let mut notes = Vec::new();
    if path.last.boundary_contact {
        notes.push("flow touched the simplex boundary; log_sum is clamped there".to_string());
    }
    let contents = match c.format {
        Format::Csv => {
            let mut csv =
                Csv::new(std::iter::once("s".to_string()).chain(indexed("p", t.n())).chain(["log_sum".to_string()]));
            for s in &path.samples {
                csv.row(
                    std::iter::once(float(s.s))
                        .chain(s.point.iter().map(|&v| float(v)))
                        .chain([float(s.log_sum)]),
                );
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> =
                path.samples.iter().map(|s| json!({ "s": s.s, "p": s.point, "log_sum": s.log_sum })).collect();
            to_json_text(&json!({ "boundary_contact": path.last.boundary_contact, "rows": rows }))
        }
    };
    let name = format!("flow.{}", c.format.extension());
    Ok(finish("flow", &c, r, vec![Artifact::new(name, contents)], notes))
}

pub fn diagnose(settings: &Settings) -> Result<Run> {
    let mut r = Resolver::new(settings);
    let t = r.tournament()?;
    let counts = r.counts("initial", t.n())?;
    let c = common(&mut r)?;
    let n = t.n();
    let ctx = DiagnosticsContext::new(t)?;
    let u = Urn::new(counts)?;

    let mu_value = mu(&ctx, &u)?;
    let drifts = [ReinforcementRule::TwoAlternatives, ReinforcementRule::ThreeAlternatives, ReinforcementRule::Fast]
        .map(|rule| drift::<Rational>(&ctx, &u, rule));
    let [d2, d3, dfast] = drifts;
    let (d2, d3, dfast) = (d2?, d3?, dfast?);
    let var = variance_step::<Rational>(&ctx, &u)?;
    let eps = epsilon::<Rational>(&ctx, &u)?;
    let bound = epsilon_bound(&ctx, &u)?;

    let contents = match c.format {
        Format::Csv => {
            let mut header: Vec<String> = [
                "mu",
                "phi",
                "drift_two",
                "drift_three",
                "drift_fast",
                "variance_step",
                "eps_lhs",
                "eps_rhs_log",
                "eps_rhs_ld",
            ]
            .map(String::from)
            .to_vec();
            header.extend(indexed("eps", n));
            let mut csv = Csv::new(header);
            let mut row = vec![mu_value, ctx.phi()];
            row.extend([&d2, &d3, &dfast, &var].map(Scalar::to_f64));
            row.extend([bound.lhs, bound.rhs_log, bound.rhs_ld]);
            row.extend(eps.iter().map(Scalar::to_f64));
            csv.row(row.into_iter().map(float));
            csv.finish()
        }
        Format::Json => {
            let both = |q: &Rational| json!({ "exact": fraction(q), "decimal": q.to_f64() });
            to_json_text(&json!({
                "counts": u.counts(),
                "mu": mu_value,
                "phi": ctx.phi(),
                "drift": { "two": both(&d2), "three": both(&d3), "fast": both(&dfast) },
                "variance_step": both(&var),
                "epsilon": eps.iter().map(both).collect::<Vec<_>>(),
                "epsilon_bound": {
                    "lhs": bound.lhs,
                    "rhs_log": bound.rhs_log,
                    "rhs_ld": bound.rhs_ld,
                    "holds_log": bound.holds_log(),
                    "holds_ld": bound.holds_ld(),
                },
            }))
        }
    };
    let name = format!("diagnose.{}", c.format.extension());
    Ok(finish("diagnose", &c, r, vec![Artifact::new(name, contents)], Vec::new()))
}
