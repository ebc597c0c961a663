//! The backward em-algorithm.
//!
//! From the current joint `p_t = q_t·r(y|x)` the backward e-step picks a
//! product point `q⊗r` whose e-projection onto `M` is `p_t`. Those points
//! form the family
//!
//! ```text
//! E_t = { q⊗r : q(x) = q_t(x)·exp(D(r(·|x) || r)) / Φ(t, r) }
//! Φ(t, r) = Σ_x q_t(x)·exp(D(r(·|x) || r))
//! ```
//!
//! parametrized by the free output factor `r`, with `D(p_t || q⊗r) = ln Φ`.
//! The backward m-step then needs a member whose m-projection comes from
//! `M`, i.e. a fixed point `Σ_x q[r](x)·r(y|x) = r(y)`. There is no closed
//! form; [`exact_backward_m_step`] runs a damped fixed-point iteration and
//! reports failure as a status. Replacing the equation by
//! `Σ_x q_t(x)·r(y|x) = r(y)` gives [`approximate_m_step`], which is exactly
//! one Arimoto update.

use crate::arimoto::{drive, multiplicative_update, CapacityResult, IterationTrace, SolveOptions, StepKind, StepOutput};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::prob::{log_sum_exp, Distribution};

pub const DEFAULT_DAMPING: f64 = 0.5;
pub const DEFAULT_INNER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_INNER: usize = 10_000;

/// A point of `E_t`, identified by its output factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardFamilyMember {
    /// The `q_t` anchoring the family.
    pub base_input: Distribution,
    pub output_factor: Distribution,
    /// `q(x) ∝ q_t(x)·exp(D(r(·|x) || output_factor))`.
    pub induced_input: Distribution,
    /// `ln Φ(t, r)`, equal to `D(p_t || induced⊗output_factor)`.
    pub log_phi: f64,
}

impl BackwardFamilyMember {
    pub fn product(&self) -> crate::infogeo::ProductPoint {
        crate::infogeo::ProductPoint::new(self.induced_input.clone(), self.output_factor.clone())
    }
}

/// Builds the member of `E_t` with output factor `r`.
pub fn backward_e_member(
    q_t: &Distribution,
    r: &Distribution,
    ch: &Channel,
) -> Result<BackwardFamilyMember> {
    q_t.require_interior()?;
    if q_t.len() != ch.inputs() {
        return Err(Error::DimensionMismatch {
            expected: ch.inputs(),
            found: q_t.len(),
        });
    }
    let d = ch.divergences_to(r)?;
    let logits: Vec<f64> = q_t
        .weights()
        .iter()
        .zip(&d)
        .map(|(&q, &dx)| q.ln() + dx)
        .collect();
    let log_phi = log_sum_exp(&logits);
    let induced_input = Distribution::from_log_weights(&logits)?;
    Ok(BackwardFamilyMember {
        base_input: q_t.clone(),
        output_factor: r.clone(),
        induced_input,
        log_phi,
    })
}

/// `ln Σ_x q_t(x)·exp(D(r(·|x) || r))`.
pub fn log_phi(q_t: &Distribution, r: &Distribution, ch: &Channel) -> Result<f64> {
    backward_e_member(q_t, r, ch).map(|m| m.log_phi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MStepOptions {
    pub inner_tol: f64,
    pub max_inner: usize,
    /// Weight of the new point in `r ← (1 - damping)·r + damping·F(r)`.
    pub damping: f64,
}

impl Default for MStepOptions {
    fn default() -> Self {
        Self {
            inner_tol: DEFAULT_INNER_TOL,
            max_inner: DEFAULT_MAX_INNER,
            damping: DEFAULT_DAMPING,
        }
    }
}

impl MStepOptions {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "damping",
                value: self.damping,
            });
        }
        if !(self.inner_tol > 0.0 && self.inner_tol.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "inner_tol",
                value: self.inner_tol,
            });
        }
        if self.max_inner == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "max_inner",
                value: 0.0,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MStepStatus {
    ExactConverged,
    /// The caller should fall back to [`approximate_m_step`].
    NotConvergedFallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MStepOutcome {
    /// The member `q[r*]⊗r*` at the fixed point; `None` on failure.
    pub solution: Option<BackwardFamilyMember>,
    /// `max_y |Σ_x q[r](x)·r(y|x) - r(y)|` at the last evaluated `r`.
    pub residual: f64,
    /// Number of damped updates applied to `r`.
    pub inner_iterations: usize,
    pub status: MStepStatus,
    /// Residual at every evaluated `r`, starting from `r_{q_t}`.
    pub residual_path: Vec<f64>,
}

impl MStepOutcome {
    /// The next input distribution `q_{t+1} = q[r*]`, when the solve converged.
    pub fn next_input(&self) -> Option<&Distribution> {
        self.solution.as_ref().map(|m| &m.induced_input)
    }
}

/// Solves `Σ_x q[r](x)·r(y|x) = r(y)` by damped fixed-point iteration from
/// `r₀ = r_{q_t}`. Non-convergence is reported in the status.
pub fn exact_backward_m_step(
    q_t: &Distribution,
    ch: &Channel,
    opts: &MStepOptions,
) -> Result<MStepOutcome> {
    opts.validate()?;
    let mut r = ch.output_marginal(q_t)?;
    let mut residual_path = Vec::new();
    let mut inner_iterations = 0;
    loop {
        let member = backward_e_member(q_t, &r, ch)?;
        let image = ch.output_marginal(&member.induced_input)?;
        let residual = image.max_abs_diff(&r);
        residual_path.push(residual);
        if residual <= opts.inner_tol {
            return Ok(MStepOutcome {
                solution: Some(member),
                residual,
                inner_iterations,
                status: MStepStatus::ExactConverged,
                residual_path,
            });
        }
        if inner_iterations == opts.max_inner || !residual.is_finite() {
            return Ok(MStepOutcome {
                solution: None,
                residual,
                inner_iterations,
                status: MStepStatus::NotConvergedFallback,
                residual_path,
            });
        }
        let a = opts.damping;
        let mut next: Vec<f64> = r
            .weights()
            .iter()
            .zip(image.weights())
            .map(|(&old, &new)| (1.0 - a) * old + a * new)
            .collect();
        let sum: f64 = next.iter().sum();
        for v in next.iter_mut() {
            *v /= sum;
        }
        r = Distribution::from_vec_unchecked(next);
        inner_iterations += 1;
    }
}

/// The backward m-step with `r` fixed at `r_{q_t}`: an Arimoto update.
pub fn approximate_m_step(q_t: &Distribution, ch: &Channel) -> Result<Distribution> {
    let r = ch.output_marginal(q_t)?;
    backward_e_member(q_t, &r, ch).map(|m| m.induced_input)
}

/// Outcome of checking that `E_t` is closed under geometric mixtures.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCheck {
    /// Member of `E_t` over `r₃ ∝ r₁^t·r₂^(1-t)`.
    pub mixed: BackwardFamilyMember,
    /// Largest entrywise gap between the normalized geometric mixture of the
    /// two member joints and `q₃⊗r₃`.
    pub max_deviation: f64,
    /// `ln` of the normalizer of the joint mixture.
    pub log_joint_normalizer: f64,
    /// `|ln Z - (ln Φ₃ - t ln Φ₁ - (1-t) ln Φ₂)|`; zero when the normalizers
    /// multiply out to one.
    pub normalizer_deviation: f64,
    /// `ln Φ₁ + ln Φ₂` with unit weights. Informational only; not zero in
    /// general.
    pub unweighted_log_phi_sum: f64,
}

fn weighted_log(weight: f64, value: f64) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        weight * value.ln()
    }
}

pub fn geometric_mixture_check(
    q_t: &Distribution,
    r1: &Distribution,
    r2: &Distribution,
    t: f64,
    ch: &Channel,
) -> Result<MixtureCheck> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange { name: "t", value: t });
    }
    let m1 = backward_e_member(q_t, r1, ch)?;
    let m2 = backward_e_member(q_t, r2, ch)?;
    let s = 1.0 - t;

    let r3_logits: Vec<f64> = r1
        .weights()
        .iter()
        .zip(r2.weights())
        .map(|(&a, &b)| weighted_log(t, a) + weighted_log(s, b))
        .collect();
    let r3 = Distribution::from_log_weights(&r3_logits)?;
    let m3 = backward_e_member(q_t, &r3, ch)?;

    let mut log_mix = Vec::with_capacity(ch.inputs() * ch.outputs());
    for x in 0..ch.inputs() {
        let lq = weighted_log(t, m1.induced_input.weights()[x])
            + weighted_log(s, m2.induced_input.weights()[x]);
        for y in 0..ch.outputs() {
            log_mix.push(lq + r3_logits[y]);
        }
    }
    let log_z = log_sum_exp(&log_mix);
    let mut max_deviation: f64 = 0.0;
    for x in 0..ch.inputs() {
        for y in 0..ch.outputs() {
            let mixed = (log_mix[x * ch.outputs() + y] - log_z).exp();
            let product = m3.induced_input.weights()[x] * r3.weights()[y];
            max_deviation = max_deviation.max((mixed - product).abs());
        }
    }
    let expected_log_z = m3.log_phi - t * m1.log_phi - s * m2.log_phi;

    Ok(MixtureCheck {
        normalizer_deviation: (log_z - expected_log_z).abs(),
        log_joint_normalizer: log_z,
        unweighted_log_phi_sum: m1.log_phi + m2.log_phi,
        max_deviation,
        mixed: m3,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BackwardEmOptions {
    pub solve: SolveOptions,
    pub m_step: MStepOptions,
}

/// Runs the backward em-algorithm with the same certified stopping rule as
/// [`crate::solve_arimoto`]. Outer iterations whose inner solve fails use the
/// Arimoto approximation; the trace records which one was taken.
pub fn solve_backward_em(
    ch: &Channel,
    opts: &BackwardEmOptions,
) -> Result<(CapacityResult, IterationTrace)> {
    opts.m_step.validate()?;
    drive(ch, &opts.solve, |q, d| {
        let outcome = exact_backward_m_step(q, ch, &opts.m_step)?;
        let residual = Some(outcome.residual);
        match outcome.solution {
            Some(member) => Ok(StepOutput {
                next: member.induced_input,
                kind: StepKind::Exact,
                inner_residual: residual,
            }),
            None => Ok(StepOutput {
                next: multiplicative_update(q, d)?,
                kind: StepKind::Fallback,
                inner_residual: residual,
            }),
        }
    })
}
