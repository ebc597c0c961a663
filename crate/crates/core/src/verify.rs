//! Independent checks on capacity results.
//!
//! [`brute_force_capacity`] evaluates the mutual information on a regular
//! grid over the closed input simplex and never touches the iterative
//! solvers. [`circumcenter_check`] and [`converse_check`] test the
//! equal-divergence characterization of capacity-achieving inputs.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::prob::{mutual_information, Distribution};

pub const MAX_BRUTE_FORCE_INPUTS: usize = 4;
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-7;

/// Grid search for `max_q I(q·r(y|x))`, including boundary points.
///
/// Returns the best value and the first grid point (in lexicographic order)
/// attaining it.
pub fn brute_force_capacity(ch: &Channel, grid_step: f64) -> Result<(f64, Distribution)> {
    let k = ch.inputs();
    if k > MAX_BRUTE_FORCE_INPUTS {
        return Err(Error::TooManyInputs {
            inputs: k,
            max: MAX_BRUTE_FORCE_INPUTS,
        });
    }
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::ParameterOutOfRange {
            name: "grid_step",
            value: grid_step,
        });
    }
    let n = (1.0 / grid_step).round() as usize;
    let mut best = f64::NEG_INFINITY;
    let mut best_counts = Vec::new();
    let mut counts = Vec::with_capacity(k);
    visit_compositions(&mut counts, n, k, &mut |c| {
        let q = Distribution::from_vec_unchecked(c.iter().map(|&v| v as f64 / n as f64).collect());
        let value = mutual_information(&ch.joint(&q)?);
        if value > best {
            best = value;
            best_counts = c.to_vec();
        }
        Ok(())
    })?;
    let q = best_counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok((best, Distribution::from_vec_unchecked(q)))
}

/// Calls `f` on every `slots`-tuple of non-negative integers summing to
/// `remaining`, in lexicographic order.
fn visit_compositions(
    prefix: &mut Vec<usize>,
    remaining: usize,
    slots: usize,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if slots == 1 {
        prefix.push(remaining);
        f(prefix)?;
        prefix.pop();
        return Ok(());
    }
    for c in 0..=remaining {
        prefix.push(c);
        visit_compositions(prefix, remaining - c, slots - 1, f)?;
        prefix.pop();
    }
    Ok(())
}

/// `(I(q), max_x D(r(·|x) || r_q))` for any `q` in the closed simplex. The
/// upper value is `+inf` when some divergence is infinite; both bounds hold
/// for the true capacity regardless.
pub fn certified_bracket(q: &Distribution, ch: &Channel) -> Result<(f64, f64)> {
    let p = ch.joint(q)?;
    let r = ch.output_marginal(q)?;
    let d = ch.divergences_to_extended(&r);
    let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((mutual_information(&p).min(upper), upper))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircumcenterReport {
    /// `D(r(·|x) || r_q)`; `+inf` where `q(x)` is zero and the row is not
    /// dominated by `r_q`.
    pub divergences: Vec<f64>,
    pub mutual_info: f64,
    pub on_support: Vec<bool>,
    /// Inputs violating the support-aware condition.
    pub failing: Vec<usize>,
    /// Inputs where `|d(x) - I| > tol`, the reading that demands equality for
    /// every input. Off-support entries here are expected at boundary optima.
    pub strict_failures: Vec<usize>,
    pub passed: bool,
}

/// Equal divergences on the support of `q`, and `d(x) ≤ I + tol` off it.
pub fn circumcenter_check(
    q: &Distribution,
    ch: &Channel,
    support_threshold: f64,
    tol: f64,
) -> Result<CircumcenterReport> {
    let mutual_info = mutual_information(&ch.joint(q)?);
    let r = ch.output_marginal(q)?;
    let divergences = ch.divergences_to_extended(&r);
    let on_support: Vec<bool> = q.weights().iter().map(|&w| w > support_threshold).collect();
    let mut failing = Vec::new();
    let mut strict_failures = Vec::new();
    for (x, (&d, &support)) in divergences.iter().zip(&on_support).enumerate() {
        let ok = if support {
            (d - mutual_info).abs() <= tol
        } else {
            d <= mutual_info + tol
        };
        if !ok {
            failing.push(x);
        }
        if !((d - mutual_info).abs() <= tol) {
            strict_failures.push(x);
        }
    }
    Ok(CircumcenterReport {
        passed: failing.is_empty(),
        divergences,
        mutual_info,
        on_support,
        failing,
        strict_failures,
    })
}

/// Returns the common divergence as a certified capacity when every input
/// has `D(r(·|x) || r_q)` within `tol` of every other.
pub fn converse_check(ch: &Channel, q: &Distribution, tol: f64) -> Result<Option<f64>> {
    let r = ch.output_marginal(q)?;
    let d = ch.divergences_to_extended(&r);
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    if max.is_finite() && max - min <= tol {
        Ok(Some(0.5 * (max + min)))
    } else {
        Ok(None)
    }
}
