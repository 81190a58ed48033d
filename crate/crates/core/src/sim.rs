//! Fixed-step closed-loop simulation.
//!
//! The 15-dimensional state stacks the engagement kinematics
//! `(r, V_r, θ_L, φ_L, x01, x02, θ_V, ψ_V)` and the attitude
//! `(γ, α, β, ω_x, ω_y, ω_z, ϑ)`. Integration is classical RK4 at a uniform
//! step. By default the fin command is computed once per step and held
//! across the RK4 stages, like a sampled-data controller.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{SVector, Vector2, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::airframe::{self, AeroConfig, AeroMode, AttitudeState, FinDeflections};
use crate::engagement::{
    self, DisturbanceModel, DisturbanceSample, EngagementState, EvaderModel, Signal,
};
use crate::frames::accel_velocity_to_los;
use crate::igc::{self, Gains, IgcDiagnostics};
use crate::ModelError;

pub const STATE_DIM: usize = 15;
pub type StateVector = SVector<f64, STATE_DIM>;

/// Fraction of the flight treated as "post-transient" for LOS-rate suprema.
pub const POST_TRANSIENT_FRACTION: f64 = 0.2;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {}", join(.0))]
    InvalidScenario(Vec<ModelError>),
    #[error("gain grid is empty")]
    EmptyGrid,
    #[error("non-finite derivative at t = {t} s")]
    NonFinite { t: f64 },
    #[error("at t = {t} s: {source}")]
    Model {
        t: f64,
        #[source]
        source: ModelError,
    },
}

fn join(errors: &[ModelError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FullState {
    pub t: f64,
    pub engagement: EngagementState,
    pub attitude: AttitudeState,
}

impl FullState {
    pub fn to_vector(&self) -> StateVector {
        let e = &self.engagement;
        let a = &self.attitude;
        StateVector::from_column_slice(&[
            e.r, e.vr, e.theta_l, e.phi_l, e.x01, e.x02, e.theta_v, e.psi_v, a.x1.x, a.x1.y,
            a.x1.z, a.x2.x, a.x2.y, a.x2.z, a.pitch,
        ])
    }

    pub fn from_vector(t: f64, v: &StateVector) -> Self {
        FullState {
            t,
            engagement: EngagementState {
                r: v[0],
                vr: v[1],
                theta_l: v[2],
                phi_l: v[3],
                x01: v[4],
                x02: v[5],
                theta_v: v[6],
                psi_v: v[7],
            },
            attitude: AttitudeState {
                x1: Vector3::new(v[8], v[9], v[10]),
                x2: Vector3::new(v[11], v[12], v[13]),
                pitch: v[14],
            },
        }
    }
}

/// When the fin command is evaluated during an RK4 step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlHold {
    /// Once at the start of the step (sampled-data controller).
    #[default]
    Zoh,
    /// At every RK4 stage (continuous-time controller).
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cfg: AeroConfig,
    pub gains: Gains,
    pub initial: FullState,
    pub evader: EvaderModel,
    pub disturbances: DisturbanceModel,
    /// s
    pub dt: f64,
    /// s
    pub t_max: f64,
    /// m
    pub r_intercept: f64,
    /// Lower range bound `r_m` of the flight domain, m.
    pub r_min: f64,
    /// Upper range bound `r_M` of the flight domain, m.
    pub r_max: f64,
    /// Miss when `V_r > 0` and `r` exceeds this multiple of the closest approach.
    pub divergence_factor: f64,
    pub plant_mode: AeroMode,
    /// Symmetric fin limit, rad.
    pub saturation: Option<f64>,
    pub control_hold: ControlHold,
}

impl Scenario {
    /// Closing engagement at 4 km against a non-maneuvering evader, with the
    /// gains used for the small-gain certificate. Disturbance-free, linear
    /// aerodynamics, attitude on the command manifold.
    pub fn nominal() -> Self {
        let phi_l: f64 = 0.3;
        let mut scenario = Scenario {
            cfg: AeroConfig::nominal(),
            gains: Gains {
                k0: 1.0,
                k1: 400.0,
                k2: 2000.0,
                delta0: 1.0,
                delta1: 0.035,
                delta2: 0.016,
            },
            initial: FullState {
                t: 0.0,
                engagement: EngagementState {
                    r: 4000.0,
                    vr: -600.0,
                    theta_l: 0.1,
                    phi_l,
                    x01: 0.02,
                    x02: -0.015,
                    theta_v: 0.15,
                    psi_v: phi_l - FRAC_PI_2 + 0.05,
                },
                attitude: AttitudeState::default(),
            },
            evader: Signal::zero(),
            disturbances: DisturbanceModel::default(),
            dt: 1e-4,
            t_max: 10.0,
            r_intercept: 10.0,
            r_min: 10.0,
            r_max: 5000.0,
            divergence_factor: 1.5,
            plant_mode: AeroMode::Linear,
            saturation: None,
            control_hold: ControlHold::Zoh,
        };
        let s = &mut scenario;
        s.initial.attitude =
            igc::attitude_on_command_manifold(&s.initial.engagement, 0.0, &s.cfg, &s.gains)
                .expect("nominal geometry is regular");
        scenario
    }

    /// The nominal geometry against a weaving evader with sinusoidal attitude
    /// and body-rate disturbances, trigonometric aerodynamics and moderate
    /// gains. The attitude starts at rest.
    pub fn weaving() -> Self {
        let mut s = Scenario::nominal();
        s.gains = Gains {
            k0: 1.0,
            k1: 10.0,
            k2: 10.0,
            delta0: 1.0,
            delta1: 0.25,
            delta2: 0.25,
        };
        s.initial.attitude = AttitudeState::default();
        s.evader = Signal::sinusoid(Vector3::new(0.0, 30.0, -30.0), 1.5, 0.0);
        s.disturbances.d1 = Signal::sinusoid(Vector3::new(0.02, 0.02, -0.02), 3.0, 0.5);
        s.disturbances.d2 = Signal::sinusoid(Vector3::new(1.0, -1.0, 1.0), 5.0, 0.2);
        s.dt = 1e-3;
        s.t_max = 30.0;
        s.r_intercept = 50.0;
        s.r_min = 50.0;
        s.plant_mode = AeroMode::Trig;
        s
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let mut issues = Vec::new();
        if let Err(e) = self.cfg.validate() {
            issues.push(e);
        }
        if let Err(e) = self.gains.validate() {
            issues.push(e);
        }
        let mut check = |ok: bool, field: &str, reason: &str| {
            if !ok {
                issues.push(ModelError::invalid(field, reason));
            }
        };
        check(
            self.dt.is_finite() && self.dt > 0.0,
            "sim.dt",
            "must be positive",
        );
        check(
            self.t_max.is_finite() && self.t_max >= 0.0,
            "sim.t_max",
            "must be nonnegative",
        );
        check(
            self.r_intercept.is_finite() && self.r_intercept > 0.0,
            "sim.r_intercept",
            "must be positive",
        );
        check(self.r_min > 0.0, "sim.r_min", "must be positive");
        check(
            self.r_min <= self.r_intercept,
            "sim.r_min",
            "must not exceed r_intercept",
        );
        check(self.r_min < self.r_max, "sim.r_max", "must exceed r_min");
        let r0 = self.initial.engagement.r;
        check(
            self.r_min < r0 && r0 < self.r_max,
            "initial.r",
            "must lie strictly between r_min and r_max",
        );
        check(
            self.divergence_factor.is_finite() && self.divergence_factor > 1.0,
            "sim.divergence_factor",
            "must exceed 1",
        );
        if let Some(limit) = self.saturation {
            check(
                limit.is_finite() && limit > 0.0,
                "sim.saturation",
                "must be positive",
            );
        }
        let values = self.initial.to_vector();
        check(
            values.iter().all(|v| v.is_finite()),
            "initial",
            "all values must be finite",
        );
        check(
            self.initial.engagement.theta_l.abs() < FRAC_PI_2
                && self.initial.engagement.theta_v.abs() < FRAC_PI_2,
            "initial.theta_l",
            "elevations must lie inside (-pi/2, pi/2)",
        );
        if issues.is_empty() {
            Ok(())
        } else {
            Err(SimError::InvalidScenario(issues))
        }
    }
}

/// Pursuer velocity-frame and LOS-frame accelerations for a state.
fn pursuer_accels(
    s: &FullState,
    scenario: &Scenario,
    dist: &DisturbanceSample,
) -> (Vector2<f64>, Vector3<f64>) {
    let a = airframe::lift_side_accels(
        s.attitude.alpha(),
        s.attitude.beta(),
        &dist.force,
        &scenario.cfg,
        scenario.plant_mode,
    );
    let los = accel_velocity_to_los(
        &Vector3::new(0.0, a.x, a.y),
        s.engagement.los(),
        s.engagement.velocity(),
    );
    (a, los)
}

/// Open-loop plant derivative with fin command `u`.
pub fn plant_derivative(
    s: &FullState,
    scenario: &Scenario,
    u: &FinDeflections,
) -> Result<StateVector, ModelError> {
    let dist = scenario.disturbances.sample(s.t);
    let (a_vel, a_los) = pursuer_accels(s, scenario, &dist);
    let a_e = engagement::evader_accel(&scenario.evader, s.t);
    let rel = engagement::relative_derivatives(&s.engagement, &a_los, &a_e)?;
    let vel =
        engagement::velocity_angle_derivatives(&a_vel, scenario.cfg.speed, s.engagement.theta_v)?;
    let att = airframe::attitude_derivatives(&s.attitude, u, &dist.d1, &dist.d2, &scenario.cfg)?;
    Ok(StateVector::from_column_slice(&[
        rel.r_dot,
        rel.vr_dot,
        rel.theta_l_dot,
        rel.phi_l_dot,
        rel.x01_dot,
        rel.x02_dot,
        vel.x,
        vel.y,
        att.x1_dot.x,
        att.x1_dot.y,
        att.x1_dot.z,
        att.x2_dot.x,
        att.x2_dot.y,
        att.x2_dot.z,
        att.pitch_dot,
    ]))
}

/// Fin command for a state, with the scenario's saturation applied.
/// The flag reports whether the clamp was active.
pub fn control(
    s: &FullState,
    scenario: &Scenario,
) -> Result<(FinDeflections, IgcDiagnostics, bool), ModelError> {
    let (mut u, diag) = igc::igc_step(&s.engagement, &s.attitude, &scenario.cfg, &scenario.gains)?;
    let clipped = match scenario.saturation {
        Some(limit) => u.saturate(limit),
        None => false,
    };
    Ok((u, diag, clipped))
}

/// Closed-loop derivative with the control evaluated at `s` itself.
pub fn closed_loop_derivative(
    s: &FullState,
    scenario: &Scenario,
) -> Result<StateVector, ModelError> {
    let (u, _, _) = control(s, scenario)?;
    plant_derivative(s, scenario, &u)
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<const N: usize, F>(
    mut deriv: F,
    t: f64,
    x: &SVector<f64, N>,
    dt: f64,
) -> Result<SVector<f64, N>, SimError>
where
    F: FnMut(f64, &SVector<f64, N>) -> Result<SVector<f64, N>, ModelError>,
{
    let half = 0.5 * dt;
    let model = |t: f64| move |source| SimError::Model { t, source };
    let k1 = deriv(t, x).map_err(model(t))?;
    let k2 = deriv(t + half, &(x + k1 * half)).map_err(model(t + half))?;
    let k3 = deriv(t + half, &(x + k2 * half)).map_err(model(t + half))?;
    let k4 = deriv(t + dt, &(x + k3 * dt)).map_err(model(t + dt))?;
    let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(SimError::NonFinite { t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub state: FullState,
    pub u: FinDeflections,
    pub diag: IgcDiagnostics,
    pub saturated: bool,
    pub disturbance: DisturbanceSample,
    pub evader: Vector3<f64>,
    /// Effective guidance disturbance `d0`.
    pub d0: Vector2<f64>,
}

impl LogRow {
    pub fn t(&self) -> f64 {
        self.state.t
    }

    pub fn norm_x0(&self) -> f64 {
        self.state.engagement.x0().norm()
    }
}

/// Uniform-step time series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub dt: f64,
    pub rows: Vec<LogRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Intercept,
    Miss,
    GuardBreach,
    Timeout,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Intercept => "intercept",
            Outcome::Miss => "miss",
            Outcome::GuardBreach => "guard-breach",
            Outcome::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub outcome: Outcome,
    /// Reason for a guard breach.
    pub detail: Option<String>,
    pub flight_time: f64,
    pub final_range: f64,
    /// Closest approach, with linear refinement between the last samples.
    pub miss_distance: f64,
    /// `sup ‖x0‖` over the final 20% of the flight, rad/s.
    pub post_transient_sup_x0: f64,
    pub rows: usize,
}

fn diag_nan() -> IgcDiagnostics {
    let nan3 = Vector3::repeat(f64::NAN);
    IgcDiagnostics {
        x1_sharp_cmd: Vector2::repeat(f64::NAN),
        x1_cmd: nan3,
        x2_cmd: nan3,
        eta1: nan3,
        eta2: nan3,
        g0_condition: f64::NAN,
        g1_condition: f64::NAN,
    }
}

fn log_row(
    s: &FullState,
    scenario: &Scenario,
    control: &Result<(FinDeflections, IgcDiagnostics, bool), ModelError>,
) -> LogRow {
    let disturbance = scenario.disturbances.sample(s.t);
    let evader = engagement::evader_accel(&scenario.evader, s.t);
    let (_, a_los) = pursuer_accels(s, scenario, &disturbance);
    let d0 = engagement::guidance_disturbance(
        &s.engagement,
        &s.attitude.alpha_beta(),
        &a_los,
        &evader,
        &scenario.cfg,
    )
    .unwrap_or_else(|_| Vector2::repeat(f64::NAN));
    let (u, diag, saturated) = match control {
        Ok((u, diag, sat)) => (*u, *diag, *sat),
        Err(_) => (FinDeflections(Vector3::repeat(f64::NAN)), diag_nan(), false),
    };
    LogRow {
        state: *s,
        u,
        diag,
        saturated,
        disturbance,
        evader,
        d0,
    }
}

fn guard_violation(s: &FullState, scenario: &Scenario) -> Option<String> {
    if let Err(e) = s.attitude.check_guards() {
        return Some(e.to_string());
    }
    let e = &s.engagement;
    if e.r >= scenario.r_max {
        return Some(format!(
            "range {} m reached r_max = {} m",
            e.r, scenario.r_max
        ));
    }
    for (name, value) in [("theta_l", e.theta_l), ("theta_v", e.theta_v)] {
        if value.abs() >= engagement::ELEVATION_GUARD {
            return Some(
                ModelError::AngleGuard {
                    name,
                    value,
                    limit: engagement::ELEVATION_GUARD,
                }
                .to_string(),
            );
        }
    }
    None
}

/// Integrates the closed loop until intercept, miss, guard breach or timeout.
pub fn run(scenario: &Scenario) -> Result<(SimLog, SimSummary), SimError> {
    scenario.validate()?;
    let dt = scenario.dt;
    let mut rows = Vec::new();
    let mut x = scenario.initial.to_vector();
    let mut closest = scenario.initial.engagement.r;
    let mut step = 0usize;

    let (outcome, detail) = loop {
        let t = step as f64 * dt;
        let s = FullState::from_vector(t, &x);
        let ctl = control(&s, scenario);
        rows.push(log_row(&s, scenario, &ctl));
        closest = closest.min(s.engagement.r);

        let e = &s.engagement;
        if e.r <= scenario.r_intercept {
            break (Outcome::Intercept, None);
        }
        if let Some(reason) = guard_violation(&s, scenario) {
            break (Outcome::GuardBreach, Some(reason));
        }
        if e.vr > 0.0 && e.r > scenario.divergence_factor * closest {
            break (Outcome::Miss, None);
        }
        if t >= scenario.t_max - 1e-9 * dt {
            break (Outcome::Timeout, None);
        }
        let u = match ctl {
            Ok((u, _, _)) => u,
            Err(err) => break (Outcome::GuardBreach, Some(err.to_string())),
        };

        let stepped = match scenario.control_hold {
            ControlHold::Zoh => rk4_step(
                |t, v| plant_derivative(&FullState::from_vector(t, v), scenario, &u),
                t,
                &x,
                dt,
            ),
            ControlHold::Continuous => rk4_step(
                |t, v| closed_loop_derivative(&FullState::from_vector(t, v), scenario),
                t,
                &x,
                dt,
            ),
        };
        match stepped {
            Ok(next) => x = next,
            Err(err) => break (Outcome::GuardBreach, Some(err.to_string())),
        }
        step += 1;
    };

    let log = SimLog { dt, rows };
    let summary = summarize(&log, outcome, detail);
    Ok((log, summary))
}

fn summarize(log: &SimLog, outcome: Outcome, detail: Option<String>) -> SimSummary {
    let last = log.rows.last().expect("a run logs at least one row");
    let flight_time = last.t();
    let cutoff = (1.0 - POST_TRANSIENT_FRACTION) * flight_time;
    let post_transient_sup_x0 = log
        .rows
        .iter()
        .filter(|row| row.t() >= cutoff)
        .map(LogRow::norm_x0)
        .fold(0.0, f64::max);
    SimSummary {
        outcome,
        detail,
        flight_time,
        final_range: last.state.engagement.r,
        miss_distance: closest_approach(log),
        post_transient_sup_x0,
        rows: log.rows.len(),
    }
}

/// Smallest range, refined where the range rate changes sign between two
/// samples by assuming `V_r` varies linearly across the interval.
fn closest_approach(log: &SimLog) -> f64 {
    let mut best = f64::INFINITY;
    for pair in log.rows.windows(2) {
        let (a, b) = (&pair[0].state.engagement, &pair[1].state.engagement);
        best = best.min(a.r).min(b.r);
        if a.vr < 0.0 && b.vr >= 0.0 {
            let tau = log.dt * a.vr / (a.vr - b.vr);
            best = best.min(a.r + 0.5 * a.vr * tau);
        }
    }
    if let Some(row) = log.rows.first() {
        best = best.min(row.state.engagement.r);
    }
    best
}

/// One grid point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub gains: Gains,
    pub result: Result<SimSummary, String>,
}

/// Runs the scenario once per gain set. Initial conditions and disturbance
/// realizations are identical across points; points run in parallel.
pub fn sweep(scenario: &Scenario, grid: &[Gains]) -> Result<Vec<SweepRow>, SimError> {
    if grid.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    Ok(grid
        .par_iter()
        .map(|gains| {
            let point = Scenario {
                gains: *gains,
                ..scenario.clone()
            };
            SweepRow {
                gains: *gains,
                result: run(&point)
                    .map(|(_, summary)| summary)
                    .map_err(|e| e.to_string()),
            }
        })
        .collect())
}
