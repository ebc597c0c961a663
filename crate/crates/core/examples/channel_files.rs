//! Loading channels from JSON and CSV, including the zero-column rule, and
//! saving them back.
//!
//!     cargo run --example channel_files

use dmc_capacity::{load_channel, load_channel_with_warnings, ChannelFormat};

fn main() -> dmc_capacity::Result<()> {
    let json = r#"{
        "matrix": [[0.5, 0.5, 0.0], [0.3, 0.7, 0.0]],
        "input_labels": ["a", "b"],
        "output_labels": ["y0", "y1", "never"]
    }"#;
    let (ch, warnings) = load_channel_with_warnings(json.as_bytes(), ChannelFormat::Json)?;
    for w in &warnings {
        println!("warning: {w}");
    }
    println!("{}x{} channel, outputs {:?}", ch.inputs(), ch.outputs(), ch.output_labels());
    println!("saved form: {}", ch.to_json());

    let csv = "0.9,0.1\n0.2,0.8\n";
    let ch = load_channel(csv.as_bytes(), ChannelFormat::Csv)?;
    println!("from CSV: rows {:?}", ch.rows().collect::<Vec<_>>());

    match load_channel("0.5,0.3\n0.5,0.5\n".as_bytes(), ChannelFormat::Csv) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
