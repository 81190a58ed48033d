//! One evaluation of the composite guidance and control law.
//!
//! cargo run --example composite_law

use igc_core::igc::{attitude_on_command_manifold, igc_step};
use igc_core::sim::Scenario;
use nalgebra::Vector3;

fn main() {
    let s = Scenario::nominal();
    let eng = s.initial.engagement;
    let mut att =
        attitude_on_command_manifold(&eng, 0.0, &s.cfg, &s.gains).expect("regular geometry");
    att.x1 += Vector3::new(1e-4, -2e-4, 1e-4);
    let (u, diag) = igc_step(&eng, &att, &s.cfg, &s.gains).expect("regular geometry");
    println!("LOS rate            {:?} rad/s", eng.x0().as_slice());
    println!("alpha/beta command  {:?} rad", diag.x1_sharp_cmd.as_slice());
    println!("attitude error      {:?}", diag.eta1.as_slice());
    println!("body-rate command   {:?} rad/s", diag.x2_cmd.as_slice());
    println!("body-rate error     {:?}", diag.eta2.as_slice());
    println!("fin deflections     {:?} rad", u.0.as_slice());
    println!(
        "cond(g0) = {:.3}, cond(g1) = {:.3}",
        diag.g0_condition, diag.g1_condition
    );
}
