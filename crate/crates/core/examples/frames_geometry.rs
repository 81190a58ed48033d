//! Frame transforms and the acceleration projection matrix.
//!
//! cargo run --example frames_geometry

use std::f64::consts::FRAC_PI_2;

use igc_core::frames::{
    accel_velocity_to_los, los_dcm, los_velocity_cosine, projection_matrix, velocity_dcm,
    LosAngles, VelocityAngles,
};
use nalgebra::Vector3;

fn main() {
    let los = LosAngles::new(0.1, 0.3);
    for offset in [0.0, 0.4, 0.8, 1.2, FRAC_PI_2] {
        let vel = VelocityAngles::new(0.1, los.phi_l - FRAC_PI_2 + offset);
        let m = projection_matrix(los, vel);
        println!(
            "heading offset {offset:.3} rad: det M = {:+.6}, cos(LOS, V) = {:+.6}",
            m.determinant(),
            los_velocity_cosine(los, vel)
        );
    }

    let vel = VelocityAngles::new(0.15, los.phi_l - FRAC_PI_2 + 0.05);
    println!("\nvelocity DCM:{}", velocity_dcm(vel));
    println!("LOS DCM:{}", los_dcm(los));
    let a = Vector3::new(0.0, 30.0, -20.0);
    println!(
        "velocity-frame accel {:?} -> LOS components {:?}",
        a.as_slice(),
        accel_velocity_to_los(&a, los, vel).as_slice()
    );
}
