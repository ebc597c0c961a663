//! The two projections between the channel manifold `M = {q·r(y|x)}` and the
//! independence manifold `E = {q⊗r}`, and the identities that tie them to
//! mutual information.
//!
//!     cargo run --example projections

use dmc_capacity::prob::kl_divergence_slices;
use dmc_capacity::{
    e_project_to_m, kl_divergence, m_project_to_e, mutual_information, Channel, Distribution,
    JointDistribution, ProductPoint,
};

fn main() -> dmc_capacity::Result<()> {
    let ch = Channel::from_rows(&[vec![0.8, 0.15, 0.05], vec![0.1, 0.6, 0.3]])?;
    let q = Distribution::new(vec![0.3, 0.7])?;
    let p = ch.joint(&q)?;

    // m-projection onto E: the product of the marginals, at distance I(p)
    let e = m_project_to_e(&p);
    let d = kl_divergence_slices(p.flatten(), e.to_joint().flatten())?;
    println!("D(p || Πp)        = {d:.12}");
    println!("I(p)              = {:.12}", mutual_information(&p));

    // Pythagorean split for an arbitrary product point
    let (q_hat, r_hat) = (Distribution::new(vec![0.6, 0.4])?, Distribution::new(vec![0.2, 0.3, 0.5])?);
    let far = JointDistribution::product(&q_hat, &r_hat);
    let lhs = kl_divergence_slices(p.flatten(), far.flatten())?;
    let rhs = d + kl_divergence(&e.input_factor, &q_hat)? + kl_divergence(&e.output_factor, &r_hat)?;
    println!("D(p || q̂⊗r̂)       = {lhs:.12}");
    println!("sum of the parts  = {rhs:.12}");

    // e-projection of a product point back onto M
    let point = ProductPoint::new(q_hat, r_hat);
    let back = e_project_to_m(&point, &ch)?;
    println!("e-projection of q̂⊗r̂ onto M has input {:?}", back.weights());
    Ok(())
}
