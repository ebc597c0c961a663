//! Runs both solvers on the same channel and prints their traces side by
//! side. Every exact backward m-step is a fixed-point solve; its final
//! residual is shown next to the outer iterate.
//!
//!     cargo run --example backward_em_vs_arimoto

use dmc_capacity::{
    solve_arimoto, solve_backward_em, BackwardEmOptions, Channel, IterationRecord, SolveOptions,
};

fn main() -> dmc_capacity::Result<()> {
    let ch = Channel::from_rows(&[
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.3, 0.6],
        vec![0.25, 0.5, 0.25],
    ])?;
    let solve = SolveOptions::with_tol(1e-10);
    let (a, ta) = solve_arimoto(&ch, &solve)?;
    let (b, tb) = solve_backward_em(
        &ch,
        &BackwardEmOptions {
            solve,
            ..Default::default()
        },
    )?;

    println!("{:>4}  {:>14} {:>10}  {:>14} {:>10} {:>9}", "iter", "I arimoto", "gap", "I backward", "gap", "residual");
    let fields = |r: Option<&IterationRecord>| r.map(|r| (r.mutual_info, r.gap(), r.inner_residual));
    for i in 0..ta.len().max(tb.len()).min(25) {
        let fmt = |v: Option<(f64, f64, Option<f64>)>| match v {
            Some((mi, gap, _)) => format!("{mi:>14.10} {gap:>10.2e}"),
            None => format!("{:>14} {:>10}", "", ""),
        };
        let right = fields(tb.records.get(i));
        let residual = right
            .and_then(|(_, _, r)| r)
            .map(|r| format!("{r:>9.1e}"))
            .unwrap_or_default();
        println!("{:>4}  {}  {} {residual}", i + 1, fmt(fields(ta.records.get(i))), fmt(right));
    }
    println!();
    println!("arimoto:     C = {:.12} nats after {} iterations", a.capacity, a.iterations);
    println!("backward em: C = {:.12} nats after {} iterations", b.capacity, b.iterations);
    Ok(())
}
