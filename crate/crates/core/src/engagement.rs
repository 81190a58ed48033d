//! Relative pursuit-evasion kinematics in spherical LOS coordinates.
//!
//! The regulated output is the LOS rate `x0 = (θ̇_L, φ̇_L cos θ_L)`. Its
//! dynamics split into a drift `f0`, an input matrix `g0` acting on
//! `x1# = (α, β)` and a bounded disturbance `d0/r`:
//!
//! ```text
//! ẋ0 = f0(x0) + g0(t) x1# + d0/r
//! ```
//!
//! Evader accelerations are given directly in LOS components.

use nalgebra::{Matrix2, SVector, Vector2, Vector3};
use serde::Serialize;

use crate::airframe::AeroConfig;
use crate::frames::{projection_matrix, LosAngles, VelocityAngles};
use crate::ModelError;

/// `|det M|` below this is treated as velocity orthogonal to the LOS.
pub const MIN_LOS_VELOCITY_COSINE: f64 = 1e-6;

/// Elevation guard for `θ_L` and `θ_V` (tan and 1/cos terms).
pub const ELEVATION_GUARD: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EngagementState {
    /// Range, m.
    pub r: f64,
    /// Range rate `ṙ`, m/s.
    pub vr: f64,
    pub theta_l: f64,
    pub phi_l: f64,
    /// `θ̇_L`, rad/s.
    pub x01: f64,
    /// `φ̇_L cos θ_L`, rad/s.
    pub x02: f64,
    pub theta_v: f64,
    pub psi_v: f64,
}

impl EngagementState {
    pub fn los(&self) -> LosAngles {
        LosAngles::new(self.theta_l, self.phi_l)
    }

    pub fn velocity(&self) -> VelocityAngles {
        VelocityAngles::new(self.theta_v, self.psi_v)
    }

    pub fn x0(&self) -> Vector2<f64> {
        Vector2::new(self.x01, self.x02)
    }

    fn check(&self) -> Result<(), ModelError> {
        let values = [
            self.r,
            self.vr,
            self.theta_l,
            self.phi_l,
            self.x01,
            self.x02,
            self.theta_v,
            self.psi_v,
        ];
        if !values.iter().all(|v| v.is_finite()) {
            return Err(ModelError::NonFinite("engagement state"));
        }
        if self.r <= 0.0 {
            return Err(ModelError::Range { r: self.r });
        }
        for (name, value) in [("theta_l", self.theta_l), ("theta_v", self.theta_v)] {
            if value.abs() >= ELEVATION_GUARD {
                return Err(ModelError::AngleGuard {
                    name,
                    value,
                    limit: ELEVATION_GUARD,
                });
            }
        }
        Ok(())
    }
}

/// LOS-rate drift.
pub fn f0(state: &EngagementState) -> Result<Vector2<f64>, ModelError> {
    state.check()?;
    let damping = -2.0 * state.vr / state.r;
    let t = state.theta_l.tan();
    let (x01, x02) = (state.x01, state.x02);
    Ok(Vector2::new(
        damping * x01 - x02 * x02 * t,
        damping * x02 + x01 * x02 * t,
    ))
}

/// LOS-rate input matrix `−M/(m r) · diag(P + qS c_y^α, −P + qS c_z^β)`.
pub fn g0(state: &EngagementState, cfg: &AeroConfig) -> Result<Matrix2<f64>, ModelError> {
    state.check()?;
    let m = projection_matrix(state.los(), state.velocity());
    let det = m.determinant();
    if det.abs() < MIN_LOS_VELOCITY_COSINE {
        return Err(ModelError::Singular {
            matrix: "g0 (velocity orthogonal to LOS)",
            condition: f64::INFINITY,
        });
    }
    Ok(-m * Matrix2::from_diagonal(&cfg.force_slopes()) / (cfg.mass * state.r))
}

/// Time derivatives of the engagement kinematics (without the velocity angles).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeRates {
    pub r_dot: f64,
    pub vr_dot: f64,
    pub theta_l_dot: f64,
    pub phi_l_dot: f64,
    pub x01_dot: f64,
    pub x02_dot: f64,
}

/// Relative kinematics driven by the pursuer and evader accelerations, both
/// as `(radial, θ_L, φ_L)` LOS components.
pub fn relative_derivatives(
    state: &EngagementState,
    a_pursuer: &Vector3<f64>,
    a_evader: &Vector3<f64>,
) -> Result<RelativeRates, ModelError> {
    let drift = f0(state)?;
    let r = state.r;
    let diff = a_evader - a_pursuer;
    Ok(RelativeRates {
        r_dot: state.vr,
        // r φ̇² cos²θ_L = r x02²
        vr_dot: r * (state.x02 * state.x02 + state.x01 * state.x01) + diff.x,
        theta_l_dot: state.x01,
        phi_l_dot: state.x02 / state.theta_l.cos(),
        x01_dot: drift.x + diff.y / r,
        x02_dot: drift.y + diff.z / r,
    })
}

/// `(θ̇_V, ψ̇_V)` from the velocity-frame accelerations `(a_θ, a_ψ)`.
pub fn velocity_angle_derivatives(
    accel: &Vector2<f64>,
    speed: f64,
    theta_v: f64,
) -> Result<Vector2<f64>, ModelError> {
    if theta_v.abs() >= ELEVATION_GUARD {
        return Err(ModelError::AngleGuard {
            name: "theta_v",
            value: theta_v,
            limit: ELEVATION_GUARD,
        });
    }
    Ok(Vector2::new(
        accel.x / speed,
        -accel.y / (speed * theta_v.cos()),
    ))
}

/// Effective guidance disturbance `d0`, defined by
/// `ẋ0 = f0 + g0 x1# + d0/r`.
///
/// In the small-angle plant this is `−M d_V + (a_Eθ, a_Eφ)`; with the
/// trigonometric plant it also absorbs the force-model mismatch.
pub fn guidance_disturbance(
    state: &EngagementState,
    alpha_beta: &Vector2<f64>,
    a_pursuer: &Vector3<f64>,
    a_evader: &Vector3<f64>,
    cfg: &AeroConfig,
) -> Result<Vector2<f64>, ModelError> {
    let angular = Vector2::new(a_evader.y - a_pursuer.y, a_evader.z - a_pursuer.z);
    Ok(angular - state.r * g0(state, cfg)? * alpha_beta)
}

/// Time profile shared by evader maneuvers and disturbance generators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Waveform {
    #[default]
    Zero,
    Constant,
    /// Zero before `time`, full amplitude from `time` on.
    Step {
        time: f64,
    },
    /// `sin(frequency·t + phase)`.
    Sinusoid {
        frequency: f64,
        phase: f64,
    },
}

impl Waveform {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            Waveform::Zero => 0.0,
            Waveform::Constant => 1.0,
            Waveform::Step { time } => {
                if t >= time {
                    1.0
                } else {
                    0.0
                }
            }
            Waveform::Sinusoid { frequency, phase } => (frequency * t + phase).sin(),
        }
    }
}

/// A vector-valued signal `amplitude · waveform(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Signal<const N: usize> {
    pub waveform: Waveform,
    #[serde(serialize_with = "serialize_vector")]
    pub amplitude: SVector<f64, N>,
}

fn serialize_vector<S: serde::Serializer, const N: usize>(
    v: &SVector<f64, N>,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

impl<const N: usize> Default for Signal<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Signal<N> {
    pub fn zero() -> Self {
        Self {
            waveform: Waveform::Zero,
            amplitude: SVector::zeros(),
        }
    }

    pub fn constant(amplitude: SVector<f64, N>) -> Self {
        Self {
            waveform: Waveform::Constant,
            amplitude,
        }
    }

    pub fn sinusoid(amplitude: SVector<f64, N>, frequency: f64, phase: f64) -> Self {
        Self {
            waveform: Waveform::Sinusoid { frequency, phase },
            amplitude,
        }
    }

    pub fn sample(&self, t: f64) -> SVector<f64, N> {
        match self.waveform {
            Waveform::Zero => SVector::zeros(),
            w => self.amplitude * w.factor(t),
        }
    }

    /// Upper bound on `‖sample(t)‖` over all `t`.
    pub fn norm_bound(&self) -> f64 {
        match self.waveform {
            Waveform::Zero => 0.0,
            _ => self.amplitude.norm(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.norm_bound() == 0.0
    }
}

/// Evader acceleration in LOS components `(a_Er, a_Eθ, a_Eφ)`, m/s².
///
/// A `Zero` waveform is a non-maneuvering evader; `Sinusoid` is a weave.
pub type EvaderModel = Signal<3>;

pub fn evader_accel(model: &EvaderModel, t: f64) -> Vector3<f64> {
    model.sample(t)
}

/// Bounded model uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DisturbanceModel {
    /// Lift and side-force uncertainties `(d_y, d_z)`, N.
    pub force: Signal<2>,
    /// Attitude-angle channel, rad/s.
    pub d1: Signal<3>,
    /// Body-rate channel, rad/s².
    pub d2: Signal<3>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DisturbanceSample {
    pub force: Vector2<f64>,
    pub d1: Vector3<f64>,
    pub d2: Vector3<f64>,
}

impl DisturbanceModel {
    pub fn sample(&self, t: f64) -> DisturbanceSample {
        DisturbanceSample {
            force: self.force.sample(t),
            d1: self.d1.sample(t),
            d2: self.d2.sample(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.force.is_zero() && self.d1.is_zero() && self.d2.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airframe::{lift_side_accels, AeroMode};
    use crate::frames::accel_velocity_to_los;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    /// Velocity azimuth that puts the velocity on the LOS.
    fn heading_on_los(phi_l: f64) -> f64 {
        phi_l - FRAC_PI_2
    }

    fn state(theta_l: f64, x01: f64, x02: f64) -> EngagementState {
        EngagementState {
            r: 3000.0,
            vr: -300.0,
            theta_l,
            phi_l: 0.4,
            x01,
            x02,
            theta_v: theta_l,
            psi_v: heading_on_los(0.4),
        }
    }

    #[test]
    fn f0_zero_rates() {
        assert_eq!(f0(&state(0.2, 0.0, 0.0)).unwrap(), Vector2::zeros());
    }

    #[test]
    fn f0_hand_values() {
        let v = f0(&state(0.0, 0.01, -0.02)).unwrap();
        assert_abs_diff_eq!(v, Vector2::new(0.002, -0.004), epsilon = 1e-15);
        let v = f0(&state(0.1, 0.01, -0.02)).unwrap();
        assert_abs_diff_eq!(
            v,
            Vector2::new(0.0019598661311658197, -0.00402006693441709),
            epsilon = 1e-15
        );
    }

    #[test]
    fn f0_rejects_nonpositive_range() {
        let mut s = state(0.0, 0.0, 0.0);
        s.r = 0.0;
        assert!(matches!(f0(&s), Err(ModelError::Range { .. })));
    }

    fn unit_slope_config() -> AeroConfig {
        // P + qS c_y^α = 2e5, −P + qS c_z^β = −2e5 with q = 1.8e5.
        AeroConfig {
            thrust: 2000.0,
            ref_area: 1.0,
            lift_slope: 198_000.0 / 1.8e5,
            side_slope: -198_000.0 / 1.8e5,
            ..AeroConfig::nominal()
        }
    }

    #[test]
    fn g0_identity_geometry() {
        // θ_L = θ_V = 0 and ψ_V = φ_L + π/2 give M = I.
        let cfg = unit_slope_config();
        let s = EngagementState {
            r: 1000.0,
            vr: -300.0,
            phi_l: 0.3,
            psi_v: 0.3 + FRAC_PI_2,
            ..Default::default()
        };
        assert_abs_diff_eq!(
            projection_matrix(s.los(), s.velocity()),
            Matrix2::identity(),
            epsilon = 1e-15
        );
        let g = g0(&s, &cfg).unwrap();
        assert_abs_diff_eq!(g, Matrix2::new(-2.0, 0.0, 0.0, 2.0), epsilon = 1e-9);

        let far = EngagementState { r: 2000.0, ..s };
        assert_abs_diff_eq!(g0(&far, &cfg).unwrap(), g * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn g0_singular_when_velocity_orthogonal() {
        let s = EngagementState {
            r: 1000.0,
            phi_l: 0.3,
            psi_v: 0.3,
            ..Default::default()
        };
        assert!(matches!(
            g0(&s, &AeroConfig::nominal()),
            Err(ModelError::Singular { .. })
        ));
    }

    #[test]
    fn static_geometry_is_stationary() {
        let s = EngagementState {
            vr: 0.0,
            ..state(0.2, 0.0, 0.0)
        };
        let rates = relative_derivatives(&s, &Vector3::zeros(), &Vector3::zeros()).unwrap();
        assert_eq!(
            rates,
            RelativeRates {
                r_dot: 0.0,
                vr_dot: 0.0,
                theta_l_dot: 0.0,
                phi_l_dot: 0.0,
                x01_dot: 0.0,
                x02_dot: 0.0
            }
        );
    }

    #[test]
    fn elevation_acceleration_moves_x01() {
        let s = EngagementState {
            r: 1000.0,
            vr: 0.0,
            ..state(0.0, 0.0, 0.0)
        };
        let rates =
            relative_derivatives(&s, &Vector3::zeros(), &Vector3::new(0.0, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(rates.x01_dot, 1e-3, epsilon = 1e-18);
        assert_eq!(rates.x02_dot, 0.0);
    }

    #[test]
    fn velocity_angle_rates() {
        let v = velocity_angle_derivatives(&Vector2::zeros(), 600.0, 0.0).unwrap();
        assert_eq!(v, Vector2::zeros());
        let v = velocity_angle_derivatives(&Vector2::new(6.0, 0.0), 600.0, 0.0).unwrap();
        assert_abs_diff_eq!(v.x, 0.01, epsilon = 1e-18);
        let v = velocity_angle_derivatives(&Vector2::new(0.0, 6.0), 600.0, 0.0).unwrap();
        assert_abs_diff_eq!(v.y, -0.01, epsilon = 1e-18);
        assert!(velocity_angle_derivatives(&Vector2::zeros(), 600.0, 1.55).is_err());
    }

    #[test]
    fn evader_profiles() {
        let constant = Signal::constant(Vector3::new(0.0, 3.0, -3.0));
        assert_eq!(evader_accel(&constant, 17.3), Vector3::new(0.0, 3.0, -3.0));

        let weave = Signal::sinusoid(Vector3::new(0.0, 3.0, 0.0), std::f64::consts::PI, 0.0);
        assert_abs_diff_eq!(
            evader_accel(&weave, 0.5),
            Vector3::new(0.0, 3.0, 0.0),
            epsilon = 1e-15
        );

        let step = Signal {
            waveform: Waveform::Step { time: 2.0 },
            amplitude: Vector3::new(1.0, 2.0, 3.0),
        };
        assert_eq!(evader_accel(&step, 1.9), Vector3::zeros());
        assert_eq!(evader_accel(&step, 2.0), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn evader_stays_within_amplitude() {
        let weave = Signal::sinusoid(Vector3::new(4.0, -3.0, 12.0), 2.3, 0.7);
        let bound = weave.norm_bound();
        for k in 0..20_000 {
            let a = evader_accel(&weave, k as f64 * 1e-3);
            assert!(a.norm() <= bound * (1.0 + 1e-15));
            for i in 0..3 {
                assert!(a[i].abs() <= weave.amplitude[i].abs());
            }
        }
    }

    fn random_state() -> impl Strategy<Value = EngagementState> {
        (
            (50.0..6000.0f64, -900.0..100.0f64),
            (-1.2..1.2f64, -3.0..3.0f64),
            (-0.5..0.5f64, -0.5..0.5f64),
            (-0.6..0.6f64, -0.6..0.6f64),
        )
            .prop_map(
                |((r, vr), (tl, pl), (x01, x02), (dtv, dpv))| EngagementState {
                    r,
                    vr,
                    theta_l: tl,
                    phi_l: pl,
                    x01,
                    x02,
                    theta_v: (tl + dtv).clamp(-1.4, 1.4),
                    psi_v: heading_on_los(pl) + dpv,
                },
            )
    }

    proptest! {
        #[test]
        fn zero_acceleration_matches_f0(s in random_state()) {
            let rates = relative_derivatives(&s, &Vector3::zeros(), &Vector3::zeros()).unwrap();
            let drift = f0(&s).unwrap();
            prop_assert!((rates.x01_dot - drift.x).abs() < 1e-10);
            prop_assert!((rates.x02_dot - drift.y).abs() < 1e-10);
        }

        #[test]
        fn cross_terms_vanish_on_level_los(s in random_state(), other in -0.5..0.5f64) {
            let level = EngagementState { theta_l: 0.0, ..s };
            let swapped = EngagementState { x02: other, ..level };
            let a = relative_derivatives(&level, &Vector3::zeros(), &Vector3::zeros()).unwrap();
            let b = relative_derivatives(&swapped, &Vector3::zeros(), &Vector3::zeros()).unwrap();
            prop_assert_eq!(a.x01_dot, b.x01_dot);
            let swapped = EngagementState { x01: other, ..level };
            let b = relative_derivatives(&swapped, &Vector3::zeros(), &Vector3::zeros()).unwrap();
            prop_assert_eq!(a.x02_dot, b.x02_dot);
        }

        #[test]
        fn linear_force_model_matches_decomposition(
            s in random_state(),
            alpha in -0.2..0.2f64, beta in -0.2..0.2f64,
            dy in -500.0..500.0f64, dz in -500.0..500.0f64,
            ae in -30.0..30.0f64, ap in -30.0..30.0f64,
        ) {
            let cfg = AeroConfig::nominal();
            let force = Vector2::new(dy, dz);
            let accel = lift_side_accels(alpha, beta, &force, &cfg, AeroMode::Linear);
            let a_p = accel_velocity_to_los(&Vector3::new(0.0, accel.x, accel.y), s.los(), s.velocity());
            let a_e = Vector3::new(5.0, ae, ap);
            let rates = relative_derivatives(&s, &a_p, &a_e).unwrap();

            let m = projection_matrix(s.los(), s.velocity());
            prop_assume!(m.determinant().abs() > MIN_LOS_VELOCITY_COSINE);
            let d0 = -m * (force / cfg.mass) + Vector2::new(ae, ap);
            let expected = f0(&s).unwrap() + g0(&s, &cfg).unwrap() * Vector2::new(alpha, beta) + d0 / s.r;
            prop_assert!((rates.x01_dot - expected.x).abs() < 1e-10);
            prop_assert!((rates.x02_dot - expected.y).abs() < 1e-10);

            let effective = guidance_disturbance(&s, &Vector2::new(alpha, beta), &a_p, &a_e, &cfg).unwrap();
            prop_assert!((effective - d0).norm() < 1e-8 * (1.0 + d0.norm()));
        }
    }
}
