//! The family `E_t` of product points whose e-projection is the current
//! joint `p_t`: membership, the divergence `ln Φ(t, r)`, closure under
//! geometric mixtures, and the exact backward m-step.
//!
//!     cargo run --example backward_family

use dmc_capacity::prob::kl_divergence_slices;
use dmc_capacity::{
    approximate_m_step, backward_e_member, e_project_to_m, exact_backward_m_step,
    geometric_mixture_check, mutual_information, Channel, ChannelKind, Distribution, MStepOptions,
};

fn main() -> dmc_capacity::Result<()> {
    let ch = Channel::canonical(ChannelKind::Z(0.5))?;
    let q_t = Distribution::new(vec![0.5, 0.5])?;
    let p_t = ch.joint(&q_t)?;

    let r = Distribution::new(vec![0.3, 0.7])?;
    let member = backward_e_member(&q_t, &r, &ch)?;
    let back = e_project_to_m(&member.product(), &ch)?;
    let d = kl_divergence_slices(p_t.flatten(), member.product().to_joint().flatten())?;
    println!("member over r = {:?}: q = {:?}", r.weights(), member.induced_input.weights());
    println!("  e-projects back to {:?}", back.weights());
    println!("  D(p_t || q⊗r) = {d:.12}, ln Φ = {:.12}", member.log_phi);

    let r2 = Distribution::new(vec![0.8, 0.2])?;
    for t in [0.25, 0.5, 0.75] {
        let check = geometric_mixture_check(&q_t, &r, &r2, t, &ch)?;
        println!(
            "mixture t = {t}: deviation from E_t {:.1e}, normalizer identity off by {:.1e}",
            check.max_deviation, check.normalizer_deviation
        );
    }

    let exact = exact_backward_m_step(&q_t, &ch, &MStepOptions::default())?;
    let next = exact.next_input().expect("inner solve converges on this channel");
    let approx = approximate_m_step(&q_t, &ch)?;
    println!(
        "exact m-step: {:?} after {} inner iterations (residual {:.1e})",
        next.weights(),
        exact.inner_iterations,
        exact.residual
    );
    println!("approximate m-step (Arimoto): {:?}", approx.weights());
    println!(
        "I: {:.10} -> exact {:.10}, approximate {:.10}",
        mutual_information(&p_t),
        mutual_information(&ch.joint(next)?),
        mutual_information(&ch.joint(&approx)?)
    );
    Ok(())
}
