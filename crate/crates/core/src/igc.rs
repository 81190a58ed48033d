//! The composite integrated guidance and control law.
//!
//! Every stage is the same ISS controller applied to a different
//! control-affine block:
//!
//! ```text
//! x1#* = g0⁻¹ (2 V_r/r − 1/(2δ0²) − K0) x0
//! η1   = x1 − (0, x1#*)
//! x2*  = g1⁻¹ (−f1 − η1/(2δ1²) − K1 η1)
//! η2   = x2 − x2*
//! u    = g2⁻¹ (−f2 − η2/(2δ2²) − K2 η2)
//! ```
//!
//! The law is memoryless: it reads the current state only and never
//! differentiates a command. The `tan θ_L` cross terms of `f0` are left
//! uncancelled; they are orthogonal to `x0` and do no work on `‖x0‖²`.

use nalgebra::{Matrix2, Matrix3, SMatrix, SVector, Vector2, Vector3};
use serde::Serialize;

use crate::airframe::{self, AeroConfig, AttitudeState, FinDeflections};
use crate::engagement::{self, EngagementState};
use crate::linalg::{condition_number, solve_gated};
use crate::{ModelError, Stage};

/// Convergence (`k*`) and disturbance-attenuation (`delta*`) coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gains {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl Gains {
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            ("gains.k0", self.k0),
            ("gains.k1", self.k1),
            ("gains.k2", self.k2),
            ("gains.delta0", self.delta0),
            ("gains.delta1", self.delta1),
            ("gains.delta2", self.delta2),
        ];
        for (field, value) in all {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::invalid(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        Ok(())
    }

    /// Total closed-loop rate `k + 1/(2δ²)` of each stage.
    pub fn stage_rates(&self) -> [f64; 3] {
        [
            total_rate(self.k0, self.delta0),
            total_rate(self.k1, self.delta1),
            total_rate(self.k2, self.delta2),
        ]
    }
}

fn total_rate(k: f64, delta: f64) -> f64 {
    k + 1.0 / (2.0 * delta * delta)
}

/// Intermediate quantities of one evaluation of the law.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IgcDiagnostics {
    /// `(α*, β*)`, rad.
    pub x1_sharp_cmd: Vector2<f64>,
    /// `(0, α*, β*)`, rad.
    pub x1_cmd: Vector3<f64>,
    /// Body-rate command, rad/s.
    pub x2_cmd: Vector3<f64>,
    pub eta1: Vector3<f64>,
    pub eta2: Vector3<f64>,
    pub g0_condition: f64,
    pub g1_condition: f64,
}

/// ISS controller `u = g⁻¹(−f − kx − x/(2δ²))`.
///
/// With this input, `ẋ = f + gu + d` satisfies
/// `‖x(t)‖ ≤ e^{−kt}‖x(0)‖ + δ/√(2k)·√(1 − e^{−2kt})·sup‖d‖`.
pub fn iss_control<const N: usize>(
    f: &SVector<f64, N>,
    g: &SMatrix<f64, N, N>,
    x: &SVector<f64, N>,
    k: f64,
    delta: f64,
) -> Result<SVector<f64, N>, ModelError> {
    let rhs = -f - x * total_rate(k, delta);
    solve_gated(g, &rhs, "g")
}

/// Angle of attack and sideslip command regulating the LOS rate.
pub fn alpha_beta_command(
    state: &EngagementState,
    g0: &Matrix2<f64>,
    gains: &Gains,
) -> Result<Vector2<f64>, ModelError> {
    let scale = 2.0 * state.vr / state.r - total_rate(gains.k0, gains.delta0);
    solve_gated(g0, &(state.x0() * scale), "g0")
}

/// Body-rate command tracking `x1_cmd`. Uses current values only.
pub fn rate_command(
    x1: &Vector3<f64>,
    x1_cmd: &Vector3<f64>,
    g1: &Matrix3<f64>,
    f1: &Vector3<f64>,
    gains: &Gains,
) -> Result<Vector3<f64>, ModelError> {
    let eta1 = x1 - x1_cmd;
    iss_control(f1, g1, &eta1, gains.k1, gains.delta1).map_err(|e| rename(e, "g1"))
}

/// Fin command tracking `x2_cmd`.
pub fn fin_command(
    x1: &Vector3<f64>,
    x2: &Vector3<f64>,
    x2_cmd: &Vector3<f64>,
    cfg: &AeroConfig,
    gains: &Gains,
) -> Result<FinDeflections, ModelError> {
    let eta2 = x2 - x2_cmd;
    let f2 = airframe::f2(x1, x2, cfg);
    iss_control(&f2, &airframe::g2(cfg), &eta2, gains.k2, gains.delta2)
        .map(FinDeflections)
        .map_err(|e| rename(e, "g2"))
}

fn rename(err: ModelError, matrix: &'static str) -> ModelError {
    match err {
        ModelError::Singular { condition, .. } => ModelError::Singular { matrix, condition },
        other => other,
    }
}

/// One evaluation of the composite law at the current measurements.
pub fn igc_step(
    eng: &EngagementState,
    att: &AttitudeState,
    cfg: &AeroConfig,
    gains: &Gains,
) -> Result<(FinDeflections, IgcDiagnostics), ModelError> {
    let g0 = engagement::g0(eng, cfg).map_err(|e| e.at_stage(Stage::AlphaBeta))?;
    let x1_sharp_cmd =
        alpha_beta_command(eng, &g0, gains).map_err(|e| e.at_stage(Stage::AlphaBeta))?;
    let x1_cmd = Vector3::new(0.0, x1_sharp_cmd.x, x1_sharp_cmd.y);
    let eta1 = att.x1 - x1_cmd;

    let g1 = airframe::g1(att.pitch, &att.x1);
    let f1 = airframe::f1(&att.x1, cfg);
    let x2_cmd =
        rate_command(&att.x1, &x1_cmd, &g1, &f1, gains).map_err(|e| e.at_stage(Stage::BodyRate))?;
    let eta2 = att.x2 - x2_cmd;

    let u =
        fin_command(&att.x1, &att.x2, &x2_cmd, cfg, gains).map_err(|e| e.at_stage(Stage::Fin))?;

    Ok((
        u,
        IgcDiagnostics {
            x1_sharp_cmd,
            x1_cmd,
            x2_cmd,
            eta1,
            eta2,
            g0_condition: condition_number(&g0),
            g1_condition: condition_number(&g1),
        },
    ))
}

/// Attitude on the command manifold (`η1 = η2 = 0`) for the given
/// engagement state and pitch angle, with zero roll.
pub fn attitude_on_command_manifold(
    eng: &EngagementState,
    pitch: f64,
    cfg: &AeroConfig,
    gains: &Gains,
) -> Result<AttitudeState, ModelError> {
    let g0 = engagement::g0(eng, cfg)?;
    let cmd = alpha_beta_command(eng, &g0, gains)?;
    let x1 = Vector3::new(0.0, cmd.x, cmd.y);
    let g1 = airframe::g1(pitch, &x1);
    let f1 = airframe::f1(&x1, cfg);
    let x2 = rate_command(&x1, &x1, &g1, &f1, gains)?;
    Ok(AttitudeState { x1, x2, pitch })
}
