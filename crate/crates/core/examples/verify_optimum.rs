//! Independent checks on a claimed capacity-achieving input.
//!
//!     cargo run --example verify_optimum

use dmc_capacity::verify::{certified_bracket, DEFAULT_SUPPORT_THRESHOLD};
use dmc_capacity::{
    brute_force_capacity, circumcenter_check, converse_check, solve_arimoto, Channel, ChannelKind,
    Distribution, SolveOptions,
};

fn report(name: &str, q: &Distribution, ch: &Channel) -> dmc_capacity::Result<()> {
    let (lower, upper) = certified_bracket(q, ch)?;
    let rep = circumcenter_check(q, ch, DEFAULT_SUPPORT_THRESHOLD, 1e-6)?;
    println!("{name}: q = {:?}", q.weights());
    println!("  bracket        [{lower:.10}, {upper:.10}]");
    println!("  divergences    {:?}", rep.divergences);
    println!("  circumcenter   {}", if rep.passed { "pass" } else { "fail" });
    match converse_check(ch, q, 1e-6)? {
        Some(c) => println!("  converse       certifies C = {c:.10}"),
        None => println!("  converse       divergences differ"),
    }
    Ok(())
}

fn main() -> dmc_capacity::Result<()> {
    let z = Channel::canonical(ChannelKind::Z(0.5))?;
    report("z(0.5), uniform input", &Distribution::uniform(2)?, &z)?;
    let (res, _) = solve_arimoto(&z, &SolveOptions::default())?;
    report("z(0.5), solver output", &res.optimal_input, &z)?;
    let (grid, argmax) = brute_force_capacity(&z, 1e-5)?;
    println!("grid search: C ≥ {grid:.10} at {:?}", argmax.weights());

    // a useless third input sits off the support at the optimum
    let ch = Channel::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]])?;
    let (res, _) = solve_arimoto(&ch, &SolveOptions::default())?;
    report("boundary optimum", &res.optimal_input, &ch)?;
    Ok(())
}
