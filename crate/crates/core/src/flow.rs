//! Deterministic mean-field limit of the urn in log-time.
//!
//! With `s = log t`, the urn proportions follow `dp/ds = p^[rule](p) - p`,
//! integrated here with classical fourth-order Runge-Kutta and renormalized
//! onto the simplex after every step.

use crate::chain::{p2, p3};
use crate::error::{Error, Result};
use crate::lottery::FloatLottery;
use crate::tournament::Tournament;
use crate::urn::ReinforcementRule;

/// Entries below this are clamped when taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// `p^[rule](p) - p`.
pub fn vector_field(t: &Tournament, rule: ReinforcementRule, p: &FloatLottery) -> Result<Vec<f64>> {
    let image = match rule {
        ReinforcementRule::TwoAlternatives => p2(t, p)?,
        ReinforcementRule::ThreeAlternatives => p3(t, p)?,
        ReinforcementRule::Fast => {
            return Err(Error::Config("the fast rule has no mean-field flow".into()));
        }
    };
    Ok(image.probs().iter().zip(p.probs()).map(|(a, b)| a - b).collect())
}

/// `sum_x log p(x)`; every entry must be positive.
pub fn log_sum(p: &[f64]) -> Result<f64> {
    if let Some(x) = p.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::InvalidLottery(format!("entry {x} is not positive")));
    }
    Ok(p.iter().map(|v| v.ln()).sum())
}

fn log_sum_clamped(p: &[f64]) -> f64 {
    p.iter().map(|v| v.max(LOG_FLOOR).ln()).sum()
}

/// `d/ds sum_x log p(x)` along the flow, `sum_x v(x) / p(x)`.
pub fn log_sum_rate(t: &Tournament, rule: ReinforcementRule, p: &FloatLottery) -> Result<f64> {
    let v = vector_field(t, rule, p)?;
    Ok(v.iter().zip(p.probs()).map(|(dv, px)| dv / px).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub point: FloatLottery,
    pub s: f64,
    /// Some coordinate fell to the log floor at some step.
    pub boundary_contact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSample {
    pub s: f64,
    pub point: Vec<f64>,
    pub log_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowPath {
    pub samples: Vec<FlowSample>,
    pub last: FlowState,
}

fn field(t: &Tournament, rule: ReinforcementRule, x: &[f64]) -> Result<Vec<f64>> {
    vector_field(t, rule, &FloatLottery::new_unchecked(x.to_vec()))
}

fn axpy(x: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Integrate from `s = 0` to `s_end` with step close to `step` (adjusted so an
/// integer number of steps lands on `s_end`), recording the path at `s = 0`,
/// every `sample_every` units of `s`, and at the end.
pub fn integrate(
    t: &Tournament,
    rule: ReinforcementRule,
    p0: &FloatLottery,
    s_end: f64,
    step: f64,
    sample_every: f64,
) -> Result<FlowPath> {
    p0.check_len(t.n())?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    if !(s_end >= 0.0) || !s_end.is_finite() {
        return Err(Error::Config(format!("s_end must be nonnegative, got {s_end}")));
    }
    let steps = ((s_end / step).round() as u64).max(u64::from(s_end > 0.0));
    let h = if steps == 0 { 0.0 } else { s_end / steps as f64 };
    let stride = if h == 0.0 || !(sample_every > 0.0) {
        1
    } else {
        ((sample_every / h).round() as u64).max(1)
    };

    let mut x = p0.probs().to_vec();
    let mut boundary_contact = x.iter().any(|&v| v < LOG_FLOOR);
    let mut samples = vec![FlowSample { s: 0.0, point: x.clone(), log_sum: log_sum_clamped(&x) }];
    for i in 1..=steps {
        let k1 = field(t, rule, &x)?;
        let k2 = field(t, rule, &axpy(&x, h / 2.0, &k1))?;
        let k3 = field(t, rule, &axpy(&x, h / 2.0, &k2))?;
        let k4 = field(t, rule, &axpy(&x, h, &k3))?;
        for j in 0..x.len() {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let s = i as f64 * h;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { s });
        }
        for v in x.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = x.iter().sum();
        if !(total > 0.0) {
            return Err(Error::NonFinite { s });
        }
        x.iter_mut().for_each(|v| *v /= total);
        boundary_contact |= x.iter().any(|&v| v < LOG_FLOOR);
        if i % stride == 0 || i == steps {
            samples.push(FlowSample { s, point: x.clone(), log_sum: log_sum_clamped(&x) });
        }
    }
    Ok(FlowPath {
        samples,
        last: FlowState { point: FloatLottery::new_unchecked(x), s: s_end, boundary_contact },
    })
}
