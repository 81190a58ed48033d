//! Ground, pursuer-velocity and line-of-sight frames.
//!
//! Every direction-cosine matrix here comes from the same template
//! `L(ψ, θ)`, which maps ground-frame components into a frame whose first
//! axis has elevation `θ` and azimuth `ψ`. The velocity frame uses
//! `L(ψ_V, θ_V)`; the LOS frame uses `L(φ_L − π/2, θ_L)`.
//!
//! Angles are never wrapped. Callers keep the elevations inside `(−π/2, π/2)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, Matrix3, Vector3};

/// Elevation and azimuth of the pursuer velocity vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VelocityAngles {
    pub theta_v: f64,
    pub psi_v: f64,
}

/// Elevation and azimuth of the line of sight.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LosAngles {
    pub theta_l: f64,
    pub phi_l: f64,
}

impl VelocityAngles {
    pub fn new(theta_v: f64, psi_v: f64) -> Self {
        Self { theta_v, psi_v }
    }

    /// Whether the elevation keeps the transform well defined.
    pub fn is_valid(&self) -> bool {
        self.theta_v.abs() < FRAC_PI_2 && self.psi_v.is_finite()
    }
}

impl LosAngles {
    pub fn new(theta_l: f64, phi_l: f64) -> Self {
        Self { theta_l, phi_l }
    }

    pub fn is_valid(&self) -> bool {
        self.theta_l.abs() < FRAC_PI_2 && self.phi_l.is_finite()
    }
}

/// The direction-cosine template `L(ψ, θ)` (ground → rotated frame).
pub fn dcm(psi: f64, theta: f64) -> Matrix3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3::new(ct * cp, st, -ct * sp, -st * cp, ct, st * sp, sp, 0.0, cp)
}

/// Ground → pursuer-velocity frame.
pub fn velocity_dcm(angles: VelocityAngles) -> Matrix3<f64> {
    dcm(angles.psi_v, angles.theta_v)
}

/// Ground → LOS frame.
pub fn los_dcm(angles: LosAngles) -> Matrix3<f64> {
    dcm(angles.phi_l - FRAC_PI_2, angles.theta_l)
}

/// `M(t)`: maps the velocity-frame lateral/normal accelerations `(a_θ, a_ψ)`
/// onto the angular LOS channels `(a_Pθ, a_Pφ)`.
pub fn projection_matrix(los: LosAngles, vel: VelocityAngles) -> Matrix2<f64> {
    let (stl, ctl) = los.theta_l.sin_cos();
    let (stv, ctv) = vel.theta_v.sin_cos();
    let (sd, cd) = (los.phi_l - vel.psi_v).sin_cos();
    Matrix2::new(stl * stv * sd + ctl * ctv, -stl * cd, -stv * cd, -sd)
}

/// Pursuer acceleration `(a_V, a_θ, a_ψ)` in the velocity frame expressed as
/// `(a_Pr, a_Pθ, a_Pφ)` in the LOS frame.
///
/// The third LOS axis points along `−e_φ`, so the last component is negated
/// after the rotation.
pub fn accel_velocity_to_los(
    a: &Vector3<f64>,
    los: LosAngles,
    vel: VelocityAngles,
) -> Vector3<f64> {
    // velocity_dcm is orthogonal, so its inverse is the transpose.
    let rotated = los_dcm(los) * velocity_dcm(vel).transpose() * a;
    Vector3::new(rotated.x, rotated.y, -rotated.z)
}

/// Unit vector along the line of sight, ground components.
pub fn los_unit_vector(los: LosAngles) -> Vector3<f64> {
    let (stl, ctl) = los.theta_l.sin_cos();
    let (spl, cpl) = los.phi_l.sin_cos();
    Vector3::new(ctl * spl, stl, ctl * cpl)
}

/// Unit vector along the pursuer velocity, ground components.
pub fn velocity_unit_vector(vel: VelocityAngles) -> Vector3<f64> {
    let (stv, ctv) = vel.theta_v.sin_cos();
    let (spv, cpv) = vel.psi_v.sin_cos();
    Vector3::new(ctv * cpv, stv, -ctv * spv)
}

/// Cosine of the angle between the LOS and the pursuer velocity.
///
/// `|det M|` equals the absolute value of this cosine; `M` is singular when
/// the velocity is orthogonal to the LOS.
pub fn los_velocity_cosine(los: LosAngles, vel: VelocityAngles) -> f64 {
    los_unit_vector(los)
        .dot(&velocity_unit_vector(vel))
        .clamp(-1.0, 1.0)
}
