//! Capacities of the standard channels, solved with the Arimoto iteration.
//!
//!     cargo run --example canonical_channels

use dmc_capacity::{nats_to_bits, solve_arimoto, Channel, ChannelKind, SolveOptions};

fn main() -> dmc_capacity::Result<()> {
    let kinds = [
        ("bsc(0.1)", ChannelKind::Bsc(0.1)),
        ("bec(0.5)", ChannelKind::Bec(0.5)),
        ("z(0.5)", ChannelKind::Z(0.5)),
        ("typewriter(5)", ChannelKind::NoisyTypewriter(5)),
        ("identity(4)", ChannelKind::Identity(4)),
        ("uniform(3,3)", ChannelKind::UniformRows(3, 3)),
    ];
    println!("{:<14} {:>12} {:>6}  optimal input", "channel", "bits", "iters");
    for (name, kind) in kinds {
        let ch = Channel::canonical(kind)?;
        let (res, _) = solve_arimoto(&ch, &SolveOptions::default())?;
        let q: Vec<String> = res.optimal_input.weights().iter().map(|w| format!("{w:.4}")).collect();
        println!(
            "{name:<14} {:>12.9} {:>6}  [{}]",
            nats_to_bits(res.capacity),
            res.iterations,
            q.join(", ")
        );
    }
    Ok(())
}
