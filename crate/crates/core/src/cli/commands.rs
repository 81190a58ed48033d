use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::csv_log;
use super::scenario_file::parse_scenario;
use crate::analysis::{
    bound_audit, estimate_gamma0y, estimate_gamma2y, worst_case_g0_norm, worst_case_g1_norm,
    Estimate, FlightDomain, GainCertificate, ProbeOptions, Verdict,
};
use crate::igc::Gains;
use crate::sim::{self, Outcome, SimSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// Miss, timeout, guard breach or a failed certificate.
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub fn outcome_exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Intercept => EXIT_OK,
        Outcome::Miss | Outcome::Timeout | Outcome::GuardBreach => EXIT_NEGATIVE,
    }
}

pub fn verdict_exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_NEGATIVE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

#[derive(Debug, Serialize)]
struct AuditJson {
    slack: f64,
    violations: [usize; 3],
    worst_margin: [f64; 3],
}

#[derive(Debug, Serialize)]
struct RunJson<'a> {
    summary: &'a SimSummary,
    audit: Option<AuditJson>,
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn print_summary(out: &mut dyn Write, s: &SimSummary) -> std::io::Result<()> {
    writeln!(out, "outcome               {}", s.outcome.as_str())?;
    if let Some(detail) = &s.detail {
        writeln!(out, "detail                {detail}")?;
    }
    writeln!(out, "flight time           {:.6} s", s.flight_time)?;
    writeln!(out, "final range           {:.6} m", s.final_range)?;
    writeln!(out, "miss distance         {:.6} m", s.miss_distance)?;
    writeln!(
        out,
        "post-transient |x0|   {:.6e} rad/s",
        s.post_transient_sup_x0
    )?;
    writeln!(out, "rows                  {}", s.rows)
}

/// Runs one scenario, writes the CSV log and prints the summary.
pub fn cmd_run(
    scenario_path: &Path,
    csv_path: &Path,
    audit: Option<f64>,
    summary_json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = (|| -> Result<i32, String> {
        let scenario = parse_scenario(scenario_path).map_err(|e| e.to_string())?;
        let (log, summary) = sim::run(&scenario).map_err(|e| e.to_string())?;
        let mut sink = create(csv_path)?;
        csv_log::write_log(&log, &mut sink)
            .map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
        sink.flush().map_err(|e| e.to_string())?;

        let audit = match audit {
            None => None,
            Some(slack) => {
                match bound_audit(&log, &scenario.gains, &scenario.cfg, scenario.r_min, slack) {
                    Ok(report) => Some(AuditJson {
                        slack,
                        violations: report.violations(),
                        worst_margin: [
                            report.x0.worst_margin(),
                            report.eta1.worst_margin(),
                            report.eta2.worst_margin(),
                        ],
                    }),
                    Err(e) => {
                        let _ = writeln!(err, "audit skipped: {e}");
                        None
                    }
                }
            }
        };

        let io = |e: std::io::Error| e.to_string();
        if summary_json {
            let json = serde_json::to_string_pretty(&RunJson {
                summary: &summary,
                audit,
            })
            .map_err(|e| e.to_string())?;
            writeln!(out, "{json}").map_err(io)?;
        } else {
            print_summary(out, &summary).map_err(io)?;
            if let Some(a) = audit {
                writeln!(
                    out,
                    "audit (slack {}): violations x0={} eta1={} eta2={}; worst margins {:.3e} {:.3e} {:.3e}",
                    a.slack,
                    a.violations[0],
                    a.violations[1],
                    a.violations[2],
                    a.worst_margin[0],
                    a.worst_margin[1],
                    a.worst_margin[2]
                )
                .map_err(io)?;
            }
        }
        Ok(outcome_exit_code(summary.outcome))
    })();
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_ERROR
    })
}

const GAIN_NAMES: [&str; 6] = ["k0", "k1", "k2", "delta0", "delta1", "delta2"];

fn gain_slot<'a>(gains: &'a mut Gains, name: &str) -> Option<&'a mut f64> {
    Some(match name {
        "k0" => &mut gains.k0,
        "k1" => &mut gains.k1,
        "k2" => &mut gains.k2,
        "delta0" => &mut gains.delta0,
        "delta1" => &mut gains.delta1,
        "delta2" => &mut gains.delta2,
        _ => return None,
    })
}

/// Expands `--grid` specs into gain sets.
///
/// Each spec is `name=v1,v2,...`; `name1+name2=...` sets several gains to the
/// same value. Several specs form a Cartesian product, first spec outermost.
pub fn parse_grid(specs: &[String], base: &Gains) -> Result<Vec<Gains>, String> {
    if specs.is_empty() {
        return Err("empty grid: give at least one --grid name=v1,v2,...".into());
    }
    let mut points = vec![*base];
    for spec in specs {
        let (lhs, rhs) = spec
            .split_once('=')
            .ok_or_else(|| format!("malformed grid spec `{spec}`: expected name=v1,v2,..."))?;
        let names: Vec<&str> = lhs.split('+').map(str::trim).collect();
        for name in &names {
            if !GAIN_NAMES.contains(name) {
                return Err(format!(
                    "unknown grid parameter `{name}` (expected one of {})",
                    GAIN_NAMES.join(", ")
                ));
            }
        }
        let values: Vec<f64> = rhs
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| format!("grid value `{v}` in `{spec}` is not a number"))
            })
            .collect::<Result<_, _>>()?;
        if values.is_empty() {
            return Err(format!("grid spec `{spec}` lists no values"));
        }
        points = points
            .iter()
            .flat_map(|p| {
                values.iter().map(|&v| {
                    let mut g = *p;
                    for name in &names {
                        *gain_slot(&mut g, name).expect("name checked above") = v;
                    }
                    g
                })
            })
            .collect();
    }
    Ok(points)
}

/// Runs a gain sweep and writes one CSV row per grid point.
pub fn cmd_sweep(
    scenario_path: &Path,
    grid: &[String],
    table_path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = (|| -> Result<i32, String> {
        let scenario = parse_scenario(scenario_path).map_err(|e| e.to_string())?;
        let points = parse_grid(grid, &scenario.gains)?;
        for g in &points {
            g.validate().map_err(|e| e.to_string())?;
        }
        let rows = sim::sweep(&scenario, &points).map_err(|e| e.to_string())?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(create(table_path)?);
        let csv_err = |e: csv::Error| format!("cannot write {}: {e}", table_path.display());
        w.write_record([
            "k0",
            "k1",
            "k2",
            "delta0",
            "delta1",
            "delta2",
            "outcome",
            "post_transient_sup_x0",
            "miss_distance",
            "flight_time",
            "error",
        ])
        .map_err(csv_err)?;
        let f = |v: f64| format!("{v:.16e}");
        for row in &rows {
            let g = &row.gains;
            let mut record = vec![
                f(g.k0),
                f(g.k1),
                f(g.k2),
                f(g.delta0),
                f(g.delta1),
                f(g.delta2),
            ];
            match &row.result {
                Ok(s) => {
                    record.extend([
                        s.outcome.as_str().to_string(),
                        f(s.post_transient_sup_x0),
                        f(s.miss_distance),
                        f(s.flight_time),
                        String::new(),
                    ]);
                    let _ = writeln!(
                        out,
                        "k=({}, {}, {}) delta=({}, {}, {}): {} sup|x0|={:.4e} miss={:.3} m",
                        g.k0,
                        g.k1,
                        g.k2,
                        g.delta0,
                        g.delta1,
                        g.delta2,
                        s.outcome.as_str(),
                        s.post_transient_sup_x0,
                        s.miss_distance
                    );
                }
                Err(e) => {
                    record.extend([
                        "error".into(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.clone(),
                    ]);
                    let _ = writeln!(err, "grid point {g:?} failed: {e}");
                }
            }
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| e.to_string())?;
        Ok(EXIT_OK)
    })();
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_ERROR
    })
}

/// Inputs to the certificate beyond the scenario itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct CertificateInputs {
    pub g0_norm: Option<f64>,
    pub g1_norm: Option<f64>,
    pub gamma0y: Option<f64>,
    pub gamma2y: Option<f64>,
    /// Estimate missing interconnection gains by simulation.
    pub probe: bool,
}

pub fn build_certificate(
    scenario_path: &Path,
    inputs: &CertificateInputs,
) -> Result<GainCertificate, String> {
    let scenario = parse_scenario(scenario_path).map_err(|e| e.to_string())?;
    for (name, v) in [
        ("--g0-norm", inputs.g0_norm),
        ("--g1-norm", inputs.g1_norm),
        ("--gamma0y", inputs.gamma0y),
        ("--gamma2y", inputs.gamma2y),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be a nonnegative number, got {v}"));
            }
        }
    }
    let domain = FlightDomain::of(&scenario);
    let g0_norm = inputs
        .g0_norm
        .unwrap_or_else(|| worst_case_g0_norm(&scenario.cfg, &domain));
    let g1_norm = inputs
        .g1_norm
        .unwrap_or_else(|| worst_case_g1_norm(&domain));
    let opts = ProbeOptions::default();
    let estimate = |given: Option<f64>,
                    probe: &dyn Fn() -> Result<f64, sim::SimError>|
     -> Result<Estimate, String> {
        match (given, inputs.probe) {
            (Some(v), _) => Ok(Estimate::Supplied(v)),
            (None, true) => probe().map(Estimate::Probed).map_err(|e| e.to_string()),
            (None, false) => Ok(Estimate::Missing),
        }
    };
    let gamma0y = estimate(inputs.gamma0y, &|| estimate_gamma0y(&scenario, &opts))?;
    let gamma2y = estimate(inputs.gamma2y, &|| estimate_gamma2y(&scenario, &opts))?;
    Ok(GainCertificate::new(
        &scenario.gains,
        g0_norm,
        g1_norm,
        gamma0y,
        gamma2y,
    ))
}

/// Prints the small-gain certificate for the scenario's gains.
pub fn cmd_check_gains(
    scenario_path: &Path,
    inputs: &CertificateInputs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    match build_certificate(scenario_path, inputs) {
        Ok(cert) => {
            let _ = write!(out, "{}", cert.render());
            verdict_exit_code(cert.verdict())
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
