//! Simulates the nominal engagement and writes the per-step CSV log.
//!
//! cargo run --release --example closed_loop_run -- [out.csv]

use std::fs::File;
use std::io::BufWriter;

use igc_core::cli::csv_log::write_log;
use igc_core::sim::{run, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "nominal.csv".into());
    let (log, summary) = run(&Scenario::nominal())?;
    write_log(&log, BufWriter::new(File::create(&out)?))?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    println!("wrote {} rows to {out}", log.rows.len());
    Ok(())
}
