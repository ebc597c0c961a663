//! Projections between the channel manifold `M = {q(x)·r(y|x)}` and the
//! independence manifold `E = {q(x)·r(y)}` inside the joint simplex.
//!
//! The m-projection of any joint onto `E` is the product of its marginals.
//! The e-projection of a product point onto `M` has the closed form
//! `q̂(x) ∝ q(x)·exp(-D(r(·|x) || r))`: the objective
//! `D(q̂·r(y|x) || q⊗r) = D(q̂ || q) + Σ q̂(x) D(r(·|x) || r)` is strictly
//! convex in `q̂`, so its stationary point is the unique minimizer.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::prob::{kl_divergence_slices, mutual_information, Distribution, JointDistribution};

/// A point `q(x)·r(y)` of `E`, kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    pub input_factor: Distribution,
    pub output_factor: Distribution,
}

impl ProductPoint {
    pub fn new(input_factor: Distribution, output_factor: Distribution) -> Self {
        Self {
            input_factor,
            output_factor,
        }
    }

    pub fn to_joint(&self) -> JointDistribution {
        JointDistribution::product(&self.input_factor, &self.output_factor)
    }
}

/// m-projection onto `E`: the pair of marginals.
pub fn m_project_to_e(p: &JointDistribution) -> ProductPoint {
    let (q, r) = p.marginals();
    ProductPoint::new(q, r)
}

/// `D(q̂·r(y|x) || q⊗r)`, the quantity the e-projection minimizes over `q̂`.
pub fn e_projection_objective(q_hat: &Distribution, e: &ProductPoint, ch: &Channel) -> Result<f64> {
    let candidate = ch.joint(q_hat)?;
    if e.output_factor.len() != ch.outputs() {
        return Err(Error::DimensionMismatch {
            expected: ch.outputs(),
            found: e.output_factor.len(),
        });
    }
    kl_divergence_slices(candidate.flatten(), e.to_joint().flatten())
}

/// e-projection of `q⊗r` onto `M`, returned as the input distribution `q̂`.
pub fn e_project_to_m(e: &ProductPoint, ch: &Channel) -> Result<Distribution> {
    if e.input_factor.len() != ch.inputs() {
        return Err(Error::DimensionMismatch {
            expected: ch.inputs(),
            found: e.input_factor.len(),
        });
    }
    let d = ch.divergences_to(&e.output_factor)?;
    let logits: Vec<f64> = e
        .input_factor
        .weights()
        .iter()
        .zip(&d)
        .map(|(&q, &dx)| q.ln() - dx)
        .collect();
    Distribution::from_log_weights(&logits)
}

/// `D(p || Π p)` for `p = q·r(y|x)`; identical to the mutual information.
pub fn capacity_distance(q: &Distribution, ch: &Channel) -> Result<f64> {
    Ok(mutual_information(&ch.joint(q)?))
}
