//! One ISS controller block on a scalar-per-axis toy plant, compared with its
//! a-priori bound.
//!
//! cargo run --example iss_controller

use igc_core::analysis::iss_bound;
use igc_core::igc::iss_control;
use igc_core::sim::rk4_step;
use nalgebra::{Matrix2, Vector2};

fn main() {
    let g = Matrix2::new(2.0, 0.5, -0.3, 1.5);
    let (k, delta) = (2.0, 0.3);
    let d_amp = 1.0;
    let drift = |x: &Vector2<f64>| Vector2::new(x.y.sin(), -x.x * x.y);
    let dist = |t: f64| Vector2::new((3.0 * t).sin(), (5.0 * t).cos()) * d_amp / 2f64.sqrt();

    let mut x = Vector2::new(1.0, -0.5);
    let x0 = x.norm();
    let dt = 1e-3;
    println!("    t      |x|     bound");
    for i in 0..=4000 {
        let t = i as f64 * dt;
        if i % 500 == 0 {
            println!(
                "{t:5.2}  {:.5}  {:.5}",
                x.norm(),
                iss_bound(t, x0, k, delta, d_amp)
            );
        }
        x = rk4_step(
            |t, x| {
                let f = drift(x);
                let u = iss_control(&f, &g, x, k, delta)?;
                Ok(f + g * u + dist(t))
            },
            t,
            &x,
            dt,
        )
        .expect("g is well conditioned");
    }
    println!(
        "steady-state level delta/sqrt(2k) * sup|d| = {:.5}",
        delta / (2.0 * k).sqrt() * d_amp
    );
}
