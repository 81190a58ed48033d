//! ISS bounds, explicit small-gain coefficients and trajectory audits.
//!
//! All explicit gains are linear, `γ(s) = c·s`, so the small-gain condition
//! on each loop reduces to a product of coefficients below one.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Dim, Matrix, Matrix2, RawStorage, SVector, Vector2, Vector3};
use thiserror::Error;

use crate::airframe::{self, AeroConfig, AeroMode, AttitudeState, FinDeflections};
use crate::engagement::{self, DisturbanceModel, EngagementState, Signal};
use crate::igc::{self, Gains};
use crate::linalg::{singular_values, solve_gated};
use crate::sim::{self, FullState, Scenario, SimError, SimLog};
use crate::ModelError;

/// Default relative slack for bound audits.
pub const DEFAULT_AUDIT_SLACK: f64 = 0.05;

/// Attitude-angle bound used for worst-case `‖g1‖`, rad.
pub const DEFAULT_ANGLE_LIMIT: f64 = 0.3;

/// A linear class-K gain `s ↦ c·s`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinearGain(f64);

impl LinearGain {
    /// Negative or non-finite coefficients are rejected.
    pub fn new(coefficient: f64) -> Option<Self> {
        (coefficient.is_finite() && coefficient >= 0.0).then_some(Self(coefficient))
    }

    pub fn coefficient(&self) -> f64 {
        self.0
    }

    pub fn apply(&self, s: f64) -> f64 {
        self.0 * s
    }
}

/// ISS estimate for `ẋ = f + gu + d` under the ISS controller:
/// `e^{−kt}‖x(0)‖ + δ/√(2k)·√(1 − e^{−2kt})·sup‖d‖`.
pub fn iss_bound(t: f64, x0_norm: f64, k: f64, delta: f64, d_sup: f64) -> f64 {
    let decay = (-k * t).exp();
    let forced = delta / (2.0 * k).sqrt() * (1.0 - (-2.0 * k * t).exp()).max(0.0).sqrt();
    decay * x0_norm + forced * d_sup
}

/// Bound on a tracking error driven by a sum of disturbances, given the sum
/// of their suprema.
pub fn eta_bound(t: f64, eta0_norm: f64, k: f64, delta: f64, combined_sup: f64) -> f64 {
    iss_bound(t, eta0_norm, k, delta, combined_sup)
}

/// LOS-rate bound with the guidance disturbance scaled by the range floor.
pub fn x0_bound(t: f64, x0_norm: f64, gains: &Gains, r_m: f64, d0_sup: f64, y1_sup: f64) -> f64 {
    iss_bound(t, x0_norm, gains.k0, gains.delta0, d0_sup / r_m + y1_sup)
}

/// Largest singular value.
pub fn spectral_norm<R, C, S>(m: &Matrix<f64, R, C, S>) -> f64
where
    R: Dim,
    C: Dim,
    S: RawStorage<f64, R, C>,
{
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Coefficients of the two explicit interconnection gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitGains {
    pub gamma_1y: LinearGain,
    pub gamma_1u: LinearGain,
    pub gamma_3y: LinearGain,
    pub gamma_3u: LinearGain,
}

pub fn linear_gains(gains: &Gains, g0_norm: f64, g1_norm: f64) -> ExplicitGains {
    let attitude = LinearGain(g0_norm * gains.delta1 / (2.0 * gains.k1).sqrt());
    let rate = LinearGain(g1_norm * gains.delta2 / (2.0 * gains.k2).sqrt());
    ExplicitGains {
        gamma_1y: attitude,
        gamma_1u: attitude,
        gamma_3y: rate,
        gamma_3u: rate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallGain {
    pub product: f64,
    pub pass: bool,
    /// `1 − product`.
    pub margin: f64,
}

pub fn small_gain_check(a: LinearGain, b: LinearGain) -> SmallGain {
    let product = a.0 * b.0;
    SmallGain {
        product,
        pass: product < 1.0,
        margin: 1.0 - product,
    }
}

/// Range and attitude envelope over which worst-case norms are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightDomain {
    pub r_min: f64,
    pub r_max: f64,
    /// Bound on `|α|`, `|β|` and `|ϑ|`, rad.
    pub angle_limit: f64,
}

impl FlightDomain {
    pub fn of(scenario: &Scenario) -> Self {
        FlightDomain {
            r_min: scenario.r_min,
            r_max: scenario.r_max,
            angle_limit: DEFAULT_ANGLE_LIMIT,
        }
    }
}

/// `sup ‖g0‖` over the domain. `‖M‖ ≤ 1` with equality when the velocity is
/// along the LOS, so the supremum is the largest force slope over `m·r_m`.
pub fn worst_case_g0_norm(cfg: &AeroConfig, domain: &FlightDomain) -> f64 {
    let slopes = cfg.force_slopes();
    slopes.x.abs().max(slopes.y.abs()) / (cfg.mass * domain.r_min)
}

/// `sup ‖g1‖` by grid scan over all roll angles and `|α|, |β|, |ϑ| ≤ limit`.
pub fn worst_case_g1_norm(domain: &FlightDomain) -> f64 {
    let lim = domain.angle_limit;
    let side = |n: usize, lo: f64, hi: f64| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let rolls = side(49, -PI, PI);
    let angles = side(13, -lim, lim);
    let mut worst: f64 = 0.0;
    for &gamma in &rolls {
        for &alpha in &angles {
            for &beta in &angles {
                for &pitch in &angles {
                    let g1 = airframe::g1(pitch, &Vector3::new(gamma, alpha, beta));
                    worst = worst.max(spectral_norm(&g1));
                }
            }
        }
    }
    worst
}

/// Where an interconnection-gain estimate came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Supplied(f64),
    Probed(f64),
    Missing,
}

impl Estimate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Estimate::Supplied(v) | Estimate::Probed(v) => Some(v),
            Estimate::Missing => None,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Estimate::Supplied(_) => "supplied",
            Estimate::Probed(_) => "estimated",
            Estimate::Missing => "missing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// One interconnection loop: explicit gain times estimated gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopCheck {
    pub name: &'static str,
    pub explicit: LinearGain,
    pub estimate: Estimate,
    pub result: Option<SmallGain>,
}

impl LoopCheck {
    fn new(name: &'static str, explicit: LinearGain, estimate: Estimate) -> Self {
        let result = estimate
            .value()
            .and_then(LinearGain::new)
            .map(|other| small_gain_check(explicit, other));
        LoopCheck {
            name,
            explicit,
            estimate,
            result,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCertificate {
    pub g0_norm: f64,
    pub g1_norm: f64,
    pub explicit: ExplicitGains,
    /// `γ1y · γ0y`.
    pub guidance_loop: LoopCheck,
    /// `γ3y · γ2y`.
    pub attitude_loop: LoopCheck,
}

impl GainCertificate {
    pub fn new(
        gains: &Gains,
        g0_norm: f64,
        g1_norm: f64,
        gamma0y: Estimate,
        gamma2y: Estimate,
    ) -> Self {
        let explicit = linear_gains(gains, g0_norm, g1_norm);
        GainCertificate {
            g0_norm,
            g1_norm,
            explicit,
            guidance_loop: LoopCheck::new(
                "guidance loop (gamma_1y * gamma_0y)",
                explicit.gamma_1y,
                gamma0y,
            ),
            attitude_loop: LoopCheck::new(
                "attitude loop (gamma_3y * gamma_2y)",
                explicit.gamma_3y,
                gamma2y,
            ),
        }
    }

    /// Fail if any checked loop fails, inconclusive if an estimate is
    /// missing, pass otherwise.
    pub fn verdict(&self) -> Verdict {
        let loops = [self.guidance_loop, self.attitude_loop];
        if loops.iter().any(|l| matches!(l.result, Some(r) if !r.pass)) {
            Verdict::Fail
        } else if loops.iter().any(|l| l.result.is_none()) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let e = &self.explicit;
        let _ = writeln!(out, "g0 norm bound      {:.6e}", self.g0_norm);
        let _ = writeln!(out, "g1 norm bound      {:.6e}", self.g1_norm);
        let _ = writeln!(out, "gamma_1y (explicit) {:.6e}", e.gamma_1y.coefficient());
        let _ = writeln!(out, "gamma_1u (explicit) {:.6e}", e.gamma_1u.coefficient());
        let _ = writeln!(out, "gamma_3y (explicit) {:.6e}", e.gamma_3y.coefficient());
        let _ = writeln!(out, "gamma_3u (explicit) {:.6e}", e.gamma_3u.coefficient());
        for l in [&self.guidance_loop, &self.attitude_loop] {
            match (l.estimate.value(), l.result) {
                (Some(v), Some(r)) => {
                    let _ = writeln!(
                        out,
                        "{}: estimate {:.6e} ({}), product {:.6e}, {} (margin {:.6e})",
                        l.name,
                        v,
                        l.estimate.label(),
                        r.product,
                        if r.pass { "PASS" } else { "FAIL" },
                        r.margin
                    );
                }
                _ => {
                    let _ = writeln!(out, "{}: no estimate, INCONCLUSIVE", l.name);
                }
            }
        }
        let verdict = match self.verdict() {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        let _ = writeln!(out, "certificate: {verdict}");
        out
    }
}

/// Settings for the empirical interconnection-gain probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Size of the injected step input.
    pub amplitude: f64,
    pub dt: f64,
    /// Longest probe run, s.
    pub horizon: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            amplitude: 1e-3,
            dt: 1e-3,
            horizon: 20.0,
        }
    }
}

fn probe_scenario(scenario: &Scenario) -> Scenario {
    Scenario {
        evader: Signal::zero(),
        disturbances: DisturbanceModel::default(),
        plant_mode: AeroMode::Linear,
        ..scenario.clone()
    }
}

fn quiet_engagement(scenario: &Scenario) -> EngagementState {
    EngagementState {
        x01: 0.0,
        x02: 0.0,
        ..scenario.initial.engagement
    }
}

fn fd_sup<const N: usize>(samples: &[SVector<f64, N>], dt: f64) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    rate_norms(samples, dt).into_iter().fold(0.0, f64::max)
}

/// `‖ẋ‖` per sample: central differences inside, one-sided at the ends.
fn rate_norms<const N: usize>(samples: &[SVector<f64, N>], dt: f64) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            let (a, b, span) = match i {
                0 => (0, 1, dt),
                _ if i == n - 1 => (n - 2, n - 1, dt),
                _ => (i - 1, i + 1, 2.0 * dt),
            };
            ((samples[b] - samples[a]) / span).norm()
        })
        .collect()
}

fn probe_directions2() -> [Vector2<f64>; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        Vector2::new(1.0, 0.0),
        Vector2::new(0.0, 1.0),
        Vector2::new(s, s),
        Vector2::new(s, -s),
    ]
}

fn probe_directions3() -> [Vector3<f64>; 6] {
    let s = 1.0 / 3f64.sqrt();
    [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.0, 1.0, 0.0),
        Vector3::new(0.0, 0.0, 1.0),
        Vector3::new(s, s, s),
        Vector3::new(s, -s, s),
        Vector3::new(-s, s, s),
    ]
}

/// Estimates the gain from `g0 η1#` to `−ẋ1*` of the LOS-rate subsystem.
///
/// The LOS-rate loop runs on the command `x1#*` plus an injected step
/// `g0⁻¹ y1`, starting from zero LOS rate; the ratio of `sup ‖ẋ1*‖` to the
/// step size is maximized over several directions and two amplitudes.
pub fn estimate_gamma0y(scenario: &Scenario, opts: &ProbeOptions) -> Result<f64, SimError> {
    let base = probe_scenario(scenario);
    let mut best: f64 = 0.0;
    for dir in probe_directions2() {
        for scale in [1.0, 2.0] {
            let step = dir * (opts.amplitude * scale);
            let sup = probe_guidance(&base, &step, opts)?;
            best = best.max(sup / step.norm());
        }
    }
    Ok(best)
}

fn alpha_beta_with_step(
    eng: &EngagementState,
    step: &Vector2<f64>,
    scenario: &Scenario,
) -> Result<(Vector2<f64>, Vector2<f64>), ModelError> {
    let g0 = engagement::g0(eng, &scenario.cfg)?;
    let cmd = igc::alpha_beta_command(eng, &g0, &scenario.gains)?;
    let offset = solve_gated(&g0, step, "g0")?;
    Ok((cmd, cmd + offset))
}

fn probe_guidance(
    base: &Scenario,
    step: &Vector2<f64>,
    opts: &ProbeOptions,
) -> Result<f64, SimError> {
    let mut eng = quiet_engagement(base);
    let mut commands = Vec::new();
    let mut t = 0.0;
    let mut k = 0usize;
    while eng.r > base.r_intercept && t < opts.horizon && eng.vr < 0.0 {
        let (cmd, _) = alpha_beta_with_step(&eng, step, base)
            .map_err(|source| SimError::Model { t, source })?;
        commands.push(cmd);
        let x = engagement_vector(&eng);
        let next = sim::rk4_step(
            |t, v| {
                let e = engagement_from(v);
                let (_, ab) = alpha_beta_with_step(&e, step, base)?;
                let s = FullState {
                    t,
                    engagement: e,
                    attitude: AttitudeState {
                        x1: Vector3::new(0.0, ab.x, ab.y),
                        ..AttitudeState::default()
                    },
                };
                let d = sim::plant_derivative(&s, base, &FinDeflections::default())?;
                Ok(d.fixed_rows::<8>(0).into_owned())
            },
            t,
            &x,
            opts.dt,
        )?;
        eng = engagement_from(&next);
        k += 1;
        t = k as f64 * opts.dt;
    }
    Ok(fd_sup(&commands, opts.dt))
}

fn engagement_vector(e: &EngagementState) -> SVector<f64, 8> {
    SVector::<f64, 8>::from_column_slice(&[
        e.r, e.vr, e.theta_l, e.phi_l, e.x01, e.x02, e.theta_v, e.psi_v,
    ])
}

fn engagement_from(v: &SVector<f64, 8>) -> EngagementState {
    EngagementState {
        r: v[0],
        vr: v[1],
        theta_l: v[2],
        phi_l: v[3],
        x01: v[4],
        x02: v[5],
        theta_v: v[6],
        psi_v: v[7],
    }
}

/// Estimates the gain from `g1 η2` to `−ẋ2*` of the attitude subsystem.
///
/// Body rates follow their command plus an injected step `g1⁻¹ y3`,
/// starting on the command manifold at zero LOS rate.
pub fn estimate_gamma2y(scenario: &Scenario, opts: &ProbeOptions) -> Result<f64, SimError> {
    let base = probe_scenario(scenario);
    let mut best: f64 = 0.0;
    for dir in probe_directions3() {
        for scale in [1.0, 2.0] {
            let step = dir * (opts.amplitude * scale);
            let sup = probe_attitude(&base, &step, opts)?;
            best = best.max(sup / step.norm());
        }
    }
    Ok(best)
}

/// Rate command and the rates actually flown under the injected step.
fn rates_with_step(
    s: &FullState,
    step: &Vector3<f64>,
    scenario: &Scenario,
) -> Result<(Vector3<f64>, Vector3<f64>), ModelError> {
    let g0 = engagement::g0(&s.engagement, &scenario.cfg)?;
    let ab = igc::alpha_beta_command(&s.engagement, &g0, &scenario.gains)?;
    let x1_cmd = Vector3::new(0.0, ab.x, ab.y);
    let att = &s.attitude;
    let g1 = airframe::g1(att.pitch, &att.x1);
    let f1 = airframe::f1(&att.x1, &scenario.cfg);
    let cmd = igc::rate_command(&att.x1, &x1_cmd, &g1, &f1, &scenario.gains)?;
    let offset = solve_gated(&g1, step, "g1")?;
    Ok((cmd, cmd + offset))
}

fn probe_attitude(
    base: &Scenario,
    step: &Vector3<f64>,
    opts: &ProbeOptions,
) -> Result<f64, SimError> {
    let eng = quiet_engagement(base);
    let pitch = base.initial.attitude.pitch;
    let start = igc::attitude_on_command_manifold(&eng, pitch, &base.cfg, &base.gains)
        .map_err(|source| SimError::Model { t: 0.0, source })?;
    let pack = |s: &FullState| {
        let full = s.to_vector();
        let mut v = SVector::<f64, 12>::zeros();
        v.fixed_rows_mut::<11>(0)
            .copy_from(&full.fixed_rows::<11>(0));
        v[11] = full[14];
        v
    };
    let unpack = |t: f64, v: &SVector<f64, 12>| {
        let mut full = sim::StateVector::zeros();
        full.fixed_rows_mut::<11>(0)
            .copy_from(&v.fixed_rows::<11>(0));
        full[14] = v[11];
        FullState::from_vector(t, &full)
    };
    let mut state = FullState {
        t: 0.0,
        engagement: eng,
        attitude: start,
    };
    let mut commands = Vec::new();
    let mut k = 0usize;
    while state.engagement.r > base.r_intercept
        && state.t < opts.horizon
        && state.engagement.vr < 0.0
    {
        let (cmd, _) = rates_with_step(&state, step, base)
            .map_err(|source| SimError::Model { t: state.t, source })?;
        commands.push(cmd);
        let next = sim::rk4_step(
            |t, v| {
                let mut s = unpack(t, v);
                let (_, flown) = rates_with_step(&s, step, base)?;
                s.attitude.x2 = flown;
                let d = sim::plant_derivative(&s, base, &FinDeflections::default())?;
                let mut out = SVector::<f64, 12>::zeros();
                out.fixed_rows_mut::<11>(0)
                    .copy_from(&d.fixed_rows::<11>(0));
                out[11] = d[14];
                Ok(out)
            },
            state.t,
            &pack(&state),
            opts.dt,
        )?;
        k += 1;
        state = unpack(k as f64 * opts.dt, &next);
    }
    Ok(fd_sup(&commands, opts.dt))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    #[error("bound audit needs at least 3 samples, got {0}")]
    TooShort(usize),
    #[error("log timestamps are not uniform at row {0}")]
    NonUniform(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
    /// `bound − measured`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundTrace {
    pub samples: Vec<BoundSample>,
}

impl BoundTrace {
    pub fn violations(&self, slack: f64) -> usize {
        self.samples
            .iter()
            .filter(|s| s.measured > s.bound * (1.0 + slack))
            .count()
    }

    pub fn worst_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `measured / bound` over samples with a positive bound.
    pub fn worst_ratio(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.bound > 0.0)
            .map(|s| s.measured / s.bound)
            .fold(0.0, f64::max)
    }

    fn push(&mut self, t: f64, measured: f64, bound: f64) {
        self.samples.push(BoundSample {
            t,
            measured,
            bound,
            margin: bound - measured,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub slack: f64,
    pub x0: BoundTrace,
    pub eta1: BoundTrace,
    pub eta2: BoundTrace,
}

impl AuditReport {
    /// Violation counts for the LOS-rate, attitude and body-rate channels.
    pub fn violations(&self) -> [usize; 3] {
        [
            self.x0.violations(self.slack),
            self.eta1.violations(self.slack),
            self.eta2.violations(self.slack),
        ]
    }

    pub fn total_violations(&self) -> usize {
        self.violations().iter().sum()
    }
}

/// Checks each channel of a logged run against its ISS estimate.
///
/// Disturbance suprema are accumulated causally and summed per channel.
/// Command derivatives come from finite differences of the logged
/// commands. The range floor is the smaller of `r_m` and the closest logged
/// range. Rows after the first one with non-finite diagnostics are ignored.
pub fn bound_audit(
    log: &SimLog,
    gains: &Gains,
    cfg: &AeroConfig,
    r_m: f64,
    slack: f64,
) -> Result<AuditReport, AuditError> {
    let valid = log
        .rows
        .iter()
        .take_while(|r| {
            r.diag.eta1.iter().all(|v| v.is_finite()) && r.d0.iter().all(|v| v.is_finite())
        })
        .count();
    let rows = &log.rows[..valid];
    if rows.len() < 3 {
        return Err(AuditError::TooShort(rows.len()));
    }
    let dt = log.dt;
    for (i, pair) in rows.windows(2).enumerate() {
        if ((pair[1].t() - pair[0].t()) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(AuditError::NonUniform(i + 1));
        }
    }

    let x1_cmds: Vec<Vector3<f64>> = rows.iter().map(|r| r.diag.x1_cmd).collect();
    let x2_cmds: Vec<Vector3<f64>> = rows.iter().map(|r| r.diag.x2_cmd).collect();
    let y0 = rate_norms(&x1_cmds, dt);
    let y2 = rate_norms(&x2_cmds, dt);

    let t0 = rows[0].t();
    let x0_init = rows[0].norm_x0();
    let eta1_init = rows[0].diag.eta1.norm();
    let eta2_init = rows[0].diag.eta2.norm();

    let mut r_floor = r_m;
    let (mut d0_sup, mut y1_sup) = (0.0f64, 0.0f64);
    let (mut d1_sup, mut y0_sup, mut y3_sup) = (0.0f64, 0.0f64, 0.0f64);
    let (mut d2_sup, mut y2_sup) = (0.0f64, 0.0f64);
    let mut report = AuditReport {
        slack,
        x0: BoundTrace::default(),
        eta1: BoundTrace::default(),
        eta2: BoundTrace::default(),
    };

    for (i, row) in rows.iter().enumerate() {
        let s = &row.state;
        r_floor = r_floor.min(s.engagement.r);
        let g0 = engagement::g0(&s.engagement, cfg).unwrap_or_else(|_| Matrix2::zeros());
        let eta1_sharp = Vector2::new(row.diag.eta1.y, row.diag.eta1.z);
        let g1 = airframe::g1(s.attitude.pitch, &s.attitude.x1);

        d0_sup = d0_sup.max(row.d0.norm());
        y1_sup = y1_sup.max((g0 * eta1_sharp).norm());
        d1_sup = d1_sup.max(row.disturbance.d1.norm());
        y0_sup = y0_sup.max(y0[i]);
        y3_sup = y3_sup.max((g1 * row.diag.eta2).norm());
        d2_sup = d2_sup.max(row.disturbance.d2.norm());
        y2_sup = y2_sup.max(y2[i]);

        let t = row.t() - t0;
        report.x0.push(
            row.t(),
            row.norm_x0(),
            x0_bound(t, x0_init, gains, r_floor, d0_sup, y1_sup),
        );
        report.eta1.push(
            row.t(),
            row.diag.eta1.norm(),
            eta_bound(
                t,
                eta1_init,
                gains.k1,
                gains.delta1,
                d1_sup + y0_sup + y3_sup,
            ),
        );
        report.eta2.push(
            row.t(),
            row.diag.eta2.norm(),
            eta_bound(t, eta2_init, gains.k2, gains.delta2, d2_sup + y2_sup),
        );
    }
    Ok(report)
}

/// Least-squares slope of `−ln ‖x‖` against time over positive samples.
pub fn fitted_decay_rate(times: &[f64], norms: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(norms)
        .filter(|(_, &n)| n > 0.0 && n.is_finite())
        .map(|(&t, &n)| (t, n.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}
