//! Pursuer attitude dynamics and aerodynamic accelerations.
//!
//! The attitude model is control affine in two cascaded blocks:
//!
//! ```text
//! ẋ1 = f1(x1) + g1(ϑ, x1) x2 + d1      x1 = (γ, α, β)
//! ẋ2 = f2(x1, x2) + g2 u + d2          x2 = (ω_x, ω_y, ω_z)
//! ϑ̇  = ω_y sin γ + ω_z cos γ
//! ```
//!
//! Speed is constant, so the dynamic pressure and therefore `g2` are
//! constant for a given [`AeroConfig`]. Drag never enters the model.

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::Serialize;

use crate::ModelError;

/// `|β|` and `|ϑ|` beyond this many radians abort a simulation.
pub const ATTITUDE_GUARD: f64 = 1.2;

/// Mass, propulsion, aerodynamic and inertia constants of the pursuer.
///
/// Slopes follow the usual Russian-school notation: `c_y^α` lift, `c_z^β`
/// side force, `m_i^j` moment coefficient derivatives. Signs are taken as
/// given; open-loop stability is not assumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AeroConfig {
    /// kg
    pub mass: f64,
    /// N
    pub thrust: f64,
    /// m/s, constant
    pub speed: f64,
    /// kg/m³
    pub air_density: f64,
    /// m²
    pub ref_area: f64,
    /// m
    pub ref_length: f64,
    /// `c_y^α`, 1/rad
    pub lift_slope: f64,
    /// `c_z^β`, 1/rad
    pub side_slope: f64,
    /// `m_x^δx`, 1/rad
    pub mx_delta_x: f64,
    /// `m_y^β`, 1/rad
    pub my_beta: f64,
    /// `m_y^δy`, 1/rad
    pub my_delta_y: f64,
    /// `m_z^α`, 1/rad
    pub mz_alpha: f64,
    /// `m_z^δz`, 1/rad
    pub mz_delta_z: f64,
    /// kg·m²
    pub inertia_x: f64,
    pub inertia_y: f64,
    pub inertia_z: f64,
}

impl AeroConfig {
    /// A 100 kg tail-controlled interceptor flying at 600 m/s.
    pub fn nominal() -> Self {
        Self {
            mass: 100.0,
            thrust: 2000.0,
            speed: 600.0,
            air_density: 1.0,
            ref_area: 0.05,
            ref_length: 2.0,
            lift_slope: 40.0,
            side_slope: -40.0,
            mx_delta_x: -0.05,
            my_beta: -0.4,
            my_delta_y: -0.3,
            mz_alpha: -0.4,
            mz_delta_z: -0.3,
            inertia_x: 0.5,
            inertia_y: 75.0,
            inertia_z: 75.0,
        }
    }

    /// `q = ½ρV²`, Pa.
    pub fn dynamic_pressure(&self) -> f64 {
        0.5 * self.air_density * self.speed * self.speed
    }

    /// `q·S·L`, the moment scale shared by `f2` and `g2`.
    fn moment_scale(&self) -> f64 {
        self.dynamic_pressure() * self.ref_area * self.ref_length
    }

    /// Diagonal of the small-angle force model: `(P + qS c_y^α, −P + qS c_z^β)`.
    pub fn force_slopes(&self) -> Vector2<f64> {
        let qs = self.dynamic_pressure() * self.ref_area;
        Vector2::new(
            self.thrust + qs * self.lift_slope,
            -self.thrust + qs * self.side_slope,
        )
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("pursuer.mass", self.mass),
            ("pursuer.speed", self.speed),
            ("pursuer.air_density", self.air_density),
            ("pursuer.ref_area", self.ref_area),
            ("pursuer.ref_length", self.ref_length),
            ("pursuer.inertia_x", self.inertia_x),
            ("pursuer.inertia_y", self.inertia_y),
            ("pursuer.inertia_z", self.inertia_z),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::invalid(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        let finite = [
            ("pursuer.thrust", self.thrust),
            ("pursuer.lift_slope", self.lift_slope),
            ("pursuer.side_slope", self.side_slope),
            ("pursuer.my_beta", self.my_beta),
            ("pursuer.mz_alpha", self.mz_alpha),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(ModelError::invalid(field, "must be finite"));
            }
        }
        let effectiveness = [
            ("pursuer.mx_delta_x", self.mx_delta_x),
            ("pursuer.my_delta_y", self.my_delta_y),
            ("pursuer.mz_delta_z", self.mz_delta_z),
        ];
        for (field, value) in effectiveness {
            if !value.is_finite() || value == 0.0 {
                return Err(ModelError::invalid(
                    field,
                    "control effectiveness must be nonzero (g2 would be singular)",
                ));
            }
        }
        Ok(())
    }
}

/// Attitude angles `x1 = (γ, α, β)`, body rates `x2 = (ω_x, ω_y, ω_z)` and
/// pitch angle `ϑ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttitudeState {
    pub x1: Vector3<f64>,
    pub x2: Vector3<f64>,
    pub pitch: f64,
}

impl AttitudeState {
    pub fn gamma(&self) -> f64 {
        self.x1.x
    }
    pub fn alpha(&self) -> f64 {
        self.x1.y
    }
    pub fn beta(&self) -> f64 {
        self.x1.z
    }

    /// `x1# = (α, β)`.
    pub fn alpha_beta(&self) -> Vector2<f64> {
        Vector2::new(self.x1.y, self.x1.z)
    }

    /// Checks the `|β|`, `|ϑ|` guard band and finiteness.
    pub fn check_guards(&self) -> Result<(), ModelError> {
        if !(self.x1.iter().chain(self.x2.iter()).all(|v| v.is_finite()) && self.pitch.is_finite())
        {
            return Err(ModelError::NonFinite("attitude state"));
        }
        for (name, value) in [("beta", self.beta()), ("pitch", self.pitch)] {
            if value.abs() > ATTITUDE_GUARD {
                return Err(ModelError::AngleGuard {
                    name,
                    value,
                    limit: ATTITUDE_GUARD,
                });
            }
        }
        Ok(())
    }
}

/// Fin deflections `u = (δ_x, δ_y, δ_z)`: aileron, rudder, elevator (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FinDeflections(pub Vector3<f64>);

impl FinDeflections {
    /// Symmetric clamp to `±limit`. Returns whether any fin was clipped.
    pub fn saturate(&mut self, limit: f64) -> bool {
        let mut clipped = false;
        for v in self.0.iter_mut() {
            if v.abs() > limit {
                *v = v.clamp(-limit, limit);
                clipped = true;
            }
        }
        clipped
    }
}

/// Force model used for the lateral/normal accelerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AeroMode {
    /// Full trigonometric thrust projection.
    #[default]
    Trig,
    /// Small-angle form, linear in `(α, β)`.
    Linear,
}

pub fn f1(x1: &Vector3<f64>, cfg: &AeroConfig) -> Vector3<f64> {
    let (alpha, beta) = (x1.y, x1.z);
    let qs = cfg.dynamic_pressure() * cfg.ref_area;
    let mv = cfg.mass * cfg.speed;
    Vector3::new(
        0.0,
        -(cfg.thrust * alpha.sin() + qs * cfg.lift_slope * alpha) / (mv * beta.cos()),
        (qs * cfg.side_slope * beta - cfg.thrust * alpha.cos() * beta.sin()) / mv,
    )
}

pub fn g1(pitch: f64, x1: &Vector3<f64>) -> Matrix3<f64> {
    let (sg, cg) = x1.x.sin_cos();
    let (sa, ca) = x1.y.sin_cos();
    let tb = x1.z.tan();
    let tp = pitch.tan();
    Matrix3::new(1.0, -tp * cg, tp * sg, -tb * ca, sa * tb, 1.0, sa, ca, 0.0)
}

pub fn f2(x1: &Vector3<f64>, x2: &Vector3<f64>, cfg: &AeroConfig) -> Vector3<f64> {
    let (jx, jy, jz) = (cfg.inertia_x, cfg.inertia_y, cfg.inertia_z);
    let (wx, wy, wz) = (x2.x, x2.y, x2.z);
    let qsl = cfg.moment_scale();
    Vector3::new(
        (jz - jy) / jx * wy * wz,
        qsl * cfg.my_beta * x1.z / jy + (jx - jz) / jy * wx * wz,
        qsl * cfg.mz_alpha * x1.y / jz + (jy - jx) / jz * wx * wy,
    )
}

pub fn g2(cfg: &AeroConfig) -> Matrix3<f64> {
    let qsl = cfg.moment_scale();
    Matrix3::from_diagonal(&Vector3::new(
        qsl * cfg.mx_delta_x / cfg.inertia_x,
        qsl * cfg.my_delta_y / cfg.inertia_y,
        qsl * cfg.mz_delta_z / cfg.inertia_z,
    ))
}

/// Velocity-frame accelerations `(a_θ, a_ψ)` in m/s².
///
/// `force_disturbance` carries the lift and side-force uncertainties
/// `(d_y, d_z)` in newtons.
pub fn lift_side_accels(
    alpha: f64,
    beta: f64,
    force_disturbance: &Vector2<f64>,
    cfg: &AeroConfig,
    mode: AeroMode,
) -> Vector2<f64> {
    match mode {
        AeroMode::Trig => {
            let qs = cfg.dynamic_pressure() * cfg.ref_area;
            let lift = qs * cfg.lift_slope * alpha + force_disturbance.x;
            let side = qs * cfg.side_slope * beta + force_disturbance.y;
            Vector2::new(
                cfg.thrust * alpha.sin() + lift,
                -cfg.thrust * alpha.cos() * beta.sin() + side,
            ) / cfg.mass
        }
        AeroMode::Linear => {
            (cfg.force_slopes().component_mul(&Vector2::new(alpha, beta)) + force_disturbance)
                / cfg.mass
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeRates {
    pub x1_dot: Vector3<f64>,
    pub x2_dot: Vector3<f64>,
    pub pitch_dot: f64,
}

pub fn attitude_derivatives(
    state: &AttitudeState,
    u: &FinDeflections,
    d1: &Vector3<f64>,
    d2: &Vector3<f64>,
    cfg: &AeroConfig,
) -> Result<AttitudeRates, ModelError> {
    state.check_guards()?;
    let (sg, cg) = state.gamma().sin_cos();
    Ok(AttitudeRates {
        x1_dot: f1(&state.x1, cfg) + g1(state.pitch, &state.x1) * state.x2 + d1,
        x2_dot: f2(&state.x1, &state.x2, cfg) + g2(cfg) * u.0 + d2,
        pitch_dot: state.x2.y * sg + state.x2.z * cg,
    })
}
