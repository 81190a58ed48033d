//! Sweeps the inner-loop gains against a weaving evader and reports the
//! post-transient LOS rate.
//!
//! cargo run --release --example gain_sweep

use igc_core::igc::Gains;
use igc_core::sim::{sweep, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::weaving();
    let base = scenario.gains;
    let mut grid = Vec::new();
    for d in [0.5, 0.25, 0.1] {
        grid.push(Gains {
            delta1: d,
            delta2: d,
            ..base
        });
    }
    for k in [5.0, 10.0, 20.0] {
        grid.push(Gains {
            k1: k,
            k2: k,
            ..base
        });
    }
    println!("   k1     k2  delta1  delta2  outcome    sup|x0| (rad/s)");
    for row in sweep(&scenario, &grid)? {
        let g = row.gains;
        match row.result {
            Ok(s) => println!(
                "{:5} {:6} {:7} {:7}  {:9}  {:.4e}",
                g.k1,
                g.k2,
                g.delta1,
                g.delta2,
                s.outcome.as_str(),
                s.post_transient_sup_x0
            ),
            Err(e) => println!("{g:?}: {e}"),
        }
    }
    Ok(())
}
