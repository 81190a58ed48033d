//! Checks a simulated trajectory channel by channel against its ISS bounds.
//!
//! cargo run --release --example bound_audit

use igc_core::analysis::{bound_audit, BoundTrace, DEFAULT_AUDIT_SLACK};
use igc_core::sim::{run, Scenario};

fn describe(name: &str, trace: &BoundTrace) {
    let step = trace.samples.len() / 5;
    println!("{name}: worst measured/bound {:.4}", trace.worst_ratio());
    for s in trace.samples.iter().step_by(step.max(1)) {
        println!(
            "   t={:7.4}  measured {:.3e}  bound {:.3e}",
            s.t, s.measured, s.bound
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::nominal();
    let (log, summary) = run(&scenario)?;
    println!(
        "outcome {} after {:.3} s",
        summary.outcome.as_str(),
        summary.flight_time
    );
    let report = bound_audit(
        &log,
        &scenario.gains,
        &scenario.cfg,
        scenario.r_min,
        DEFAULT_AUDIT_SLACK,
    )?;
    describe("LOS rate", &report.x0);
    describe("attitude error", &report.eta1);
    describe("body-rate error", &report.eta2);
    println!(
        "violations at {} slack: {:?}",
        report.slack,
        report.violations()
    );
    Ok(())
}
