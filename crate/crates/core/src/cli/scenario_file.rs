//! Sectioned key-value scenario files.
//!
//! ```text
//! # comment
//! [gains]
//! k0 = 1
//! delta0 = 1
//! ```
//!
//! Sections: `pursuer`, `initial`, `gains`, `evader`, `disturbance`, `sim`.
//! Vectors are comma-separated. A signal is zero unless its `waveform` key
//! is given; `step` needs `step_time`, `sinusoid` needs `frequency` and
//! `phase`. In `[disturbance]` the keys carry a `force_`, `d1_` or `d2_`
//! prefix.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::SVector;
use thiserror::Error;

use crate::airframe::{AeroConfig, AeroMode, AttitudeState};
use crate::engagement::{DisturbanceModel, EngagementState, Signal, Waveform};
use crate::igc::Gains;
use crate::sim::{ControlHold, FullState, Scenario, SimError};

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: duplicate key `{key}` in section [{section}]")]
    Duplicate {
        line: usize,
        section: String,
        key: String,
    },
    #[error("missing key `{key}` in section [{section}]")]
    Missing { section: String, key: String },
    #[error("line {line}: bad value for `{section}.{key}`: {message}")]
    Value {
        line: usize,
        section: String,
        key: String,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] SimError),
}

const SECTIONS: [&str; 6] = [
    "pursuer",
    "initial",
    "gains",
    "evader",
    "disturbance",
    "sim",
];

const PURSUER_KEYS: [&str; 16] = [
    "mass",
    "thrust",
    "speed",
    "air_density",
    "ref_area",
    "ref_length",
    "lift_slope",
    "side_slope",
    "mx_delta_x",
    "my_beta",
    "my_delta_y",
    "mz_alpha",
    "mz_delta_z",
    "inertia_x",
    "inertia_y",
    "inertia_z",
];

const INITIAL_KEYS: [&str; 15] = [
    "r", "vr", "theta_l", "phi_l", "x01", "x02", "theta_v", "psi_v", "gamma", "alpha", "beta",
    "wx", "wy", "wz", "pitch",
];

const GAIN_KEYS: [&str; 6] = ["k0", "k1", "k2", "delta0", "delta1", "delta2"];

const SIGNAL_KEYS: [&str; 5] = ["waveform", "amplitude", "step_time", "frequency", "phase"];

const SIM_KEYS: [&str; 9] = [
    "dt",
    "t_max",
    "r_intercept",
    "r_min",
    "r_max",
    "divergence_factor",
    "plant_mode",
    "saturation",
    "control_hold",
];

fn known_key(section: &str, key: &str) -> bool {
    match section {
        "pursuer" => PURSUER_KEYS.contains(&key),
        "initial" => INITIAL_KEYS.contains(&key),
        "gains" => GAIN_KEYS.contains(&key),
        "evader" => SIGNAL_KEYS.contains(&key),
        "disturbance" => ["force_", "d1_", "d2_"].iter().any(|p| {
            key.strip_prefix(p)
                .is_some_and(|rest| SIGNAL_KEYS.contains(&rest))
        }),
        "sim" => SIM_KEYS.contains(&key),
        _ => false,
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Sections = BTreeMap<String, BTreeMap<String, Entry>>;

fn tokenize(text: &str) -> Result<Sections, ScenarioFileError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ScenarioFileError::Syntax {
                    line,
                    message: "unterminated section header".into(),
                })?;
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ScenarioFileError::UnknownSection {
                    line,
                    section: name,
                });
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| ScenarioFileError::Syntax {
                line,
                message: format!("expected `key = value`, got `{trimmed}`"),
            })?;
        let section = current.clone().ok_or_else(|| ScenarioFileError::Syntax {
            line,
            message: "key outside of any section".into(),
        })?;
        let key = key.trim().to_string();
        if !known_key(&section, &key) {
            return Err(ScenarioFileError::UnknownKey { line, section, key });
        }
        let table = sections.entry(section.clone()).or_default();
        if table.contains_key(&key) {
            return Err(ScenarioFileError::Duplicate { line, section, key });
        }
        table.insert(
            key,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(sections)
}

struct Reader<'a> {
    sections: &'a Sections,
}

impl Reader<'_> {
    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    fn value_error(
        &self,
        section: &str,
        key: &str,
        entry: &Entry,
        message: String,
    ) -> ScenarioFileError {
        ScenarioFileError::Value {
            line: entry.line,
            section: section.into(),
            key: key.into(),
            message,
        }
    }

    fn number(&self, section: &str, key: &str) -> Result<f64, ScenarioFileError> {
        self.optional_number(section, key)?
            .ok_or_else(|| ScenarioFileError::Missing {
                section: section.into(),
                key: key.into(),
            })
    }

    fn optional_number(&self, section: &str, key: &str) -> Result<Option<f64>, ScenarioFileError> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => parse_number(&e.value)
                .map(Some)
                .map_err(|m| self.value_error(section, key, e, m)),
        }
    }

    fn vector<const N: usize>(
        &self,
        section: &str,
        key: &str,
    ) -> Result<SVector<f64, N>, ScenarioFileError> {
        let e = self
            .entry(section, key)
            .ok_or_else(|| ScenarioFileError::Missing {
                section: section.into(),
                key: key.into(),
            })?;
        let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
        if parts.len() != N {
            return Err(self.value_error(
                section,
                key,
                e,
                format!("expected {N} comma-separated numbers, got {}", parts.len()),
            ));
        }
        let mut out = SVector::<f64, N>::zeros();
        for (slot, part) in out.iter_mut().zip(parts) {
            *slot = parse_number(part).map_err(|m| self.value_error(section, key, e, m))?;
        }
        Ok(out)
    }

    fn word(&self, section: &str, key: &str) -> Option<(&str, &Entry)> {
        self.entry(section, key).map(|e| (e.value.as_str(), e))
    }

    fn signal<const N: usize>(
        &self,
        section: &str,
        prefix: &str,
    ) -> Result<Signal<N>, ScenarioFileError> {
        let key = |name: &str| format!("{prefix}{name}");
        let Some((kind, entry)) = self.word(section, &key("waveform")) else {
            for name in SIGNAL_KEYS {
                if let Some(e) = self.entry(section, &key(name)) {
                    return Err(self.value_error(
                        section,
                        &key(name),
                        e,
                        format!(
                            "`{}` is required when `{}` is given",
                            key("waveform"),
                            key(name)
                        ),
                    ));
                }
            }
            return Ok(Signal::zero());
        };
        let waveform = match kind {
            "zero" => Waveform::Zero,
            "constant" => Waveform::Constant,
            "step" => Waveform::Step {
                time: self.number(section, &key("step_time"))?,
            },
            "sinusoid" => Waveform::Sinusoid {
                frequency: self.number(section, &key("frequency"))?,
                phase: self.number(section, &key("phase"))?,
            },
            other => {
                return Err(self.value_error(
                    section,
                    &key("waveform"),
                    entry,
                    format!("unknown waveform `{other}` (zero, constant, step, sinusoid)"),
                ))
            }
        };
        let amplitude = match waveform {
            Waveform::Zero => match self.entry(section, &key("amplitude")) {
                Some(_) => self.vector(section, &key("amplitude"))?,
                None => SVector::zeros(),
            },
            _ => self.vector(section, &key("amplitude"))?,
        };
        Ok(Signal {
            waveform,
            amplitude,
        })
    }
}

fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let plain = !t.is_empty()
        && t.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    match t.parse::<f64>() {
        Ok(v) if plain => Ok(v),
        _ => Err(format!("`{t}` is not a decimal number")),
    }
}

/// Parses and validates scenario text.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioFileError> {
    let sections = tokenize(text)?;
    let rd = Reader {
        sections: &sections,
    };
    let p = |k: &str| rd.number("pursuer", k);
    let cfg = AeroConfig {
        mass: p("mass")?,
        thrust: p("thrust")?,
        speed: p("speed")?,
        air_density: p("air_density")?,
        ref_area: p("ref_area")?,
        ref_length: p("ref_length")?,
        lift_slope: p("lift_slope")?,
        side_slope: p("side_slope")?,
        mx_delta_x: p("mx_delta_x")?,
        my_beta: p("my_beta")?,
        my_delta_y: p("my_delta_y")?,
        mz_alpha: p("mz_alpha")?,
        mz_delta_z: p("mz_delta_z")?,
        inertia_x: p("inertia_x")?,
        inertia_y: p("inertia_y")?,
        inertia_z: p("inertia_z")?,
    };
    let i = |k: &str| rd.number("initial", k);
    let initial = FullState {
        t: 0.0,
        engagement: EngagementState {
            r: i("r")?,
            vr: i("vr")?,
            theta_l: i("theta_l")?,
            phi_l: i("phi_l")?,
            x01: i("x01")?,
            x02: i("x02")?,
            theta_v: i("theta_v")?,
            psi_v: i("psi_v")?,
        },
        attitude: AttitudeState {
            x1: [i("gamma")?, i("alpha")?, i("beta")?].into(),
            x2: [i("wx")?, i("wy")?, i("wz")?].into(),
            pitch: i("pitch")?,
        },
    };
    let g = |k: &str| rd.number("gains", k);
    let gains = Gains {
        k0: g("k0")?,
        k1: g("k1")?,
        k2: g("k2")?,
        delta0: g("delta0")?,
        delta1: g("delta1")?,
        delta2: g("delta2")?,
    };
    let evader = rd.signal("evader", "")?;
    let disturbances = DisturbanceModel {
        force: rd.signal("disturbance", "force_")?,
        d1: rd.signal("disturbance", "d1_")?,
        d2: rd.signal("disturbance", "d2_")?,
    };

    let s = |k: &str| rd.number("sim", k);
    let plant_mode = match rd.word("sim", "plant_mode") {
        None | Some(("trig", _)) => AeroMode::Trig,
        Some(("linear", _)) => AeroMode::Linear,
        Some((other, e)) => {
            return Err(rd.value_error(
                "sim",
                "plant_mode",
                e,
                format!("`{other}` is not trig or linear"),
            ))
        }
    };
    let control_hold = match rd.word("sim", "control_hold") {
        None | Some(("zoh", _)) => ControlHold::Zoh,
        Some(("continuous", _)) => ControlHold::Continuous,
        Some((other, e)) => {
            return Err(rd.value_error(
                "sim",
                "control_hold",
                e,
                format!("`{other}` is not zoh or continuous"),
            ))
        }
    };
    let saturation = match rd.word("sim", "saturation") {
        None | Some(("none", _)) => None,
        Some(_) => rd.optional_number("sim", "saturation")?,
    };
    let scenario = Scenario {
        cfg,
        gains,
        initial,
        evader,
        disturbances,
        dt: s("dt")?,
        t_max: s("t_max")?,
        r_intercept: s("r_intercept")?,
        r_min: s("r_min")?,
        r_max: s("r_max")?,
        divergence_factor: rd
            .optional_number("sim", "divergence_factor")?
            .unwrap_or(1.5),
        plant_mode,
        saturation,
        control_hold,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}

fn join<const N: usize>(v: &SVector<f64, N>) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_signal<const N: usize>(out: &mut String, prefix: &str, signal: &Signal<N>) {
    if signal.waveform == Waveform::Zero && signal.amplitude.iter().all(|v| *v == 0.0) {
        return;
    }
    let kind = match signal.waveform {
        Waveform::Zero => "zero",
        Waveform::Constant => "constant",
        Waveform::Step { .. } => "step",
        Waveform::Sinusoid { .. } => "sinusoid",
    };
    let _ = writeln!(out, "{prefix}waveform = {kind}");
    let _ = writeln!(out, "{prefix}amplitude = {}", join(&signal.amplitude));
    match signal.waveform {
        Waveform::Step { time } => {
            let _ = writeln!(out, "{prefix}step_time = {time}");
        }
        Waveform::Sinusoid { frequency, phase } => {
            let _ = writeln!(out, "{prefix}frequency = {frequency}");
            let _ = writeln!(out, "{prefix}phase = {phase}");
        }
        _ => {}
    }
}

/// Writes a scenario in the file format; the output parses back to an
/// identical scenario.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let c = &s.cfg;
    let _ = writeln!(out, "[pursuer]");
    let pursuer = [
        c.mass,
        c.thrust,
        c.speed,
        c.air_density,
        c.ref_area,
        c.ref_length,
        c.lift_slope,
        c.side_slope,
        c.mx_delta_x,
        c.my_beta,
        c.my_delta_y,
        c.mz_alpha,
        c.mz_delta_z,
        c.inertia_x,
        c.inertia_y,
        c.inertia_z,
    ];
    for (k, v) in PURSUER_KEYS.iter().zip(pursuer) {
        let _ = writeln!(out, "{k} = {v}");
    }

    let _ = writeln!(out, "\n[initial]");
    let initial = s.initial.to_vector();
    for (k, v) in INITIAL_KEYS.iter().zip(initial.iter()) {
        let _ = writeln!(out, "{k} = {v}");
    }

    let _ = writeln!(out, "\n[gains]");
    let g = &s.gains;
    for (k, v) in GAIN_KEYS
        .iter()
        .zip([g.k0, g.k1, g.k2, g.delta0, g.delta1, g.delta2])
    {
        let _ = writeln!(out, "{k} = {v}");
    }

    let _ = writeln!(out, "\n[evader]");
    write_signal(&mut out, "", &s.evader);
    let _ = writeln!(out, "\n[disturbance]");
    write_signal(&mut out, "force_", &s.disturbances.force);
    write_signal(&mut out, "d1_", &s.disturbances.d1);
    write_signal(&mut out, "d2_", &s.disturbances.d2);

    let _ = writeln!(out, "\n[sim]");
    let _ = writeln!(out, "dt = {}", s.dt);
    let _ = writeln!(out, "t_max = {}", s.t_max);
    let _ = writeln!(out, "r_intercept = {}", s.r_intercept);
    let _ = writeln!(out, "r_min = {}", s.r_min);
    let _ = writeln!(out, "r_max = {}", s.r_max);
    let _ = writeln!(out, "divergence_factor = {}", s.divergence_factor);
    let mode = match s.plant_mode {
        AeroMode::Trig => "trig",
        AeroMode::Linear => "linear",
    };
    let _ = writeln!(out, "plant_mode = {mode}");
    match s.saturation {
        Some(limit) => {
            let _ = writeln!(out, "saturation = {limit}");
        }
        None => {
            let _ = writeln!(out, "saturation = none");
        }
    }
    let hold = match s.control_hold {
        ControlHold::Zoh => "zoh",
        ControlHold::Continuous => "continuous",
    };
    let _ = writeln!(out, "control_hold = {hold}");
    out
}
