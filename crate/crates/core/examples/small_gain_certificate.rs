//! Small-gain certificate for the nominal gains, with the two implicit
//! interconnection gains estimated by probe simulations.
//!
//! cargo run --release --example small_gain_certificate

use igc_core::analysis::{
    estimate_gamma0y, estimate_gamma2y, worst_case_g0_norm, worst_case_g1_norm, Estimate,
    FlightDomain, GainCertificate, ProbeOptions,
};
use igc_core::sim::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::nominal();
    let domain = FlightDomain::of(&scenario);
    let opts = ProbeOptions::default();
    let cert = GainCertificate::new(
        &scenario.gains,
        worst_case_g0_norm(&scenario.cfg, &domain),
        worst_case_g1_norm(&domain),
        Estimate::Probed(estimate_gamma0y(&scenario, &opts)?),
        Estimate::Probed(estimate_gamma2y(&scenario, &opts)?),
    );
    print!("{}", cert.render());
    Ok(())
}
