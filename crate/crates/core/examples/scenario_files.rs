//! Reads a scenario file, edits it and writes it back.
//!
//! cargo run --example scenario_files -- [path/to/scenario.scn]

use igc_core::cli::{parse_scenario, parse_scenario_str, serialize_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/nominal.scn").into());
    let mut scenario = parse_scenario(&path)?;
    println!(
        "{path}: r0 = {} m, gains {:?}, dynamic pressure {} Pa",
        scenario.initial.engagement.r,
        scenario.gains,
        scenario.cfg.dynamic_pressure()
    );

    scenario.gains.k1 *= 2.0;
    let text = serialize_scenario(&scenario);
    assert_eq!(parse_scenario_str(&text)?, scenario);
    println!("\n{text}");

    match parse_scenario_str(&text.replace("k0 = 1\n", "k0 = -1\n")) {
        Err(e) => println!("rejected edited file: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
