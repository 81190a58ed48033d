use igc_core::airframe::AeroMode;
use igc_core::analysis::{bound_audit, fitted_decay_rate, DEFAULT_AUDIT_SLACK};
use igc_core::engagement::Signal;
use igc_core::igc::attitude_on_command_manifold;
use igc_core::sim::{self, ControlHold, Outcome, Scenario};
use nalgebra::Vector3;
use proptest::prelude::*;

#[test]
fn quiet_run_decays_at_the_guidance_rate() {
    let s = Scenario::nominal();
    let (log, summary) = sim::run(&s).unwrap();
    assert_eq!(summary.outcome, Outcome::Intercept);
    // Pre-terminal window: the first half of the flight.
    let cutoff = 0.5 * summary.flight_time;
    let (times, norms): (Vec<f64>, Vec<f64>) = log
        .rows
        .iter()
        .filter(|r| r.t() <= cutoff)
        .map(|r| (r.t(), r.norm_x0()))
        .unzip();
    let rate = fitted_decay_rate(&times, &norms).unwrap();
    assert!(rate >= 0.95 * s.gains.k0, "fitted rate {rate}");
}

#[test]
fn disturbances_raise_the_terminal_los_rate() {
    let quiet = Scenario::weaving();
    let quiet = Scenario {
        evader: Signal::zero(),
        disturbances: Default::default(),
        ..quiet
    };
    let (_, calm) = sim::run(&quiet).unwrap();
    let (_, rough) = sim::run(&Scenario::weaving()).unwrap();
    assert_eq!(calm.outcome, Outcome::Intercept);
    assert_eq!(rough.outcome, Outcome::Intercept);
    assert!(calm.post_transient_sup_x0 < rough.post_transient_sup_x0);
}

#[test]
fn trig_plant_and_continuous_control_also_intercept() {
    for (mode, hold) in [
        (AeroMode::Trig, ControlHold::Zoh),
        (AeroMode::Linear, ControlHold::Continuous),
    ] {
        let s = Scenario {
            plant_mode: mode,
            control_hold: hold,
            ..Scenario::nominal()
        };
        let (_, summary) = sim::run(&s).unwrap();
        assert_eq!(summary.outcome, Outcome::Intercept, "{mode:?} {hold:?}");
    }
}

#[test]
fn sweeps_are_deterministic_and_ordered() {
    let s = Scenario {
        t_max: 1.0,
        ..Scenario::weaving()
    };
    let grid: Vec<_> = [5.0, 10.0, 20.0]
        .iter()
        .map(|&k| igc_core::igc::Gains { k1: k, ..s.gains })
        .collect();
    let a = sim::sweep(&s, &grid).unwrap();
    let b = sim::sweep(&s, &grid).unwrap();
    for ((ra, rb), g) in a.iter().zip(&b).zip(&grid) {
        assert_eq!(ra.gains, *g);
        assert_eq!(ra.result, rb.result);
    }
}

#[test]
fn saturation_is_reported_in_the_log() {
    let s = Scenario {
        saturation: Some(0.05),
        t_max: 0.5,
        ..Scenario::weaving()
    };
    let (log, _) = sim::run(&s).unwrap();
    assert!(log.rows.iter().any(|r| r.saturated));
    assert!(log
        .rows
        .iter()
        .all(|r| r.u.0.amax() <= 0.05 || r.u.0.iter().any(|v| v.is_nan())));
}

#[test]
fn weaving_evader_with_large_amplitude_still_bounded() {
    let mut s = Scenario::weaving();
    s.evader = Signal::sinusoid(Vector3::new(0.0, 60.0, 60.0), 1.0, 0.3);
    let (_, summary) = sim::run(&s).unwrap();
    assert!(summary.post_transient_sup_x0.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn quiet_linear_runs_pass_the_audit(
        theta_l in -0.3..0.3f64,
        phi_l in -1.0..1.0f64,
        heading in -0.15..0.15f64,
        x01 in -0.03..0.03f64,
        x02 in -0.03..0.03f64,
        r0 in 2000.0..4500.0f64,
    ) {
        let mut s = Scenario::nominal();
        let e = &mut s.initial.engagement;
        e.r = r0;
        e.theta_l = theta_l;
        e.phi_l = phi_l;
        e.theta_v = theta_l + heading;
        e.psi_v = phi_l - std::f64::consts::FRAC_PI_2 - heading;
        e.x01 = x01;
        e.x02 = x02;
        s.initial.attitude = attitude_on_command_manifold(e, 0.0, &s.cfg, &s.gains).unwrap();
        let (log, summary) = sim::run(&s).unwrap();
        prop_assert_eq!(summary.outcome, Outcome::Intercept);
        let report = bound_audit(&log, &s.gains, &s.cfg, s.r_min, DEFAULT_AUDIT_SLACK).unwrap();
        prop_assert_eq!(report.violations(), [0, 0, 0]);
    }
}
