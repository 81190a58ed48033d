//! Per-step CSV trajectory logs.

use std::io::{Read, Write};

use crate::sim::{LogRow, SimLog};

pub const COLUMNS: [&str; 27] = [
    "t",
    "r",
    "vr",
    "theta_l",
    "phi_l",
    "x01",
    "x02",
    "theta_v",
    "psi_v",
    "gamma",
    "alpha",
    "beta",
    "wx",
    "wy",
    "wz",
    "pitch",
    "dx",
    "dy_fin",
    "dz_fin",
    "alpha_cmd",
    "beta_cmd",
    "wx_cmd",
    "wy_cmd",
    "wz_cmd",
    "norm_x0",
    "norm_eta1",
    "norm_eta2",
];

pub type Record = [f64; 27];

pub fn record(row: &LogRow) -> Record {
    let mut out = [0.0; 27];
    let state = row.state.to_vector();
    out[0] = row.t();
    out[1..16].copy_from_slice(state.as_slice());
    out[16..19].copy_from_slice(row.u.0.as_slice());
    out[19] = row.diag.x1_cmd.y;
    out[20] = row.diag.x1_cmd.z;
    out[21..24].copy_from_slice(row.diag.x2_cmd.as_slice());
    out[24] = row.norm_x0();
    out[25] = row.diag.eta1.norm();
    out[26] = row.diag.eta2.norm();
    out
}

/// 17 significant digits, so every value survives a write/read cycle.
fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_log<W: Write>(log: &SimLog, sink: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(COLUMNS)?;
    for row in &log.rows {
        w.write_record(record(row).iter().map(|v| format_value(*v)))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ReadLogError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header does not match the log schema")]
    Header,
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

pub fn read_log<R: Read>(source: R) -> Result<Vec<Record>, ReadLogError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    if r.headers()?.iter().ne(COLUMNS.iter().copied()) {
        return Err(ReadLogError::Header);
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != COLUMNS.len() {
            return Err(ReadLogError::Row {
                row: i + 1,
                message: format!("expected {} fields, got {}", COLUMNS.len(), rec.len()),
            });
        }
        let mut values = [0.0; 27];
        for (slot, field) in values.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|_| ReadLogError::Row {
                row: i + 1,
                message: format!("`{field}` is not a number"),
            })?;
        }
        out.push(values);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run, Scenario};

    fn short_log() -> SimLog {
        let scenario = Scenario {
            t_max: 0.01,
            dt: 1e-3,
            ..Scenario::nominal()
        };
        run(&scenario).unwrap().0
    }

    #[test]
    fn header_and_row_shape() {
        let log = short_log();
        let mut buf = Vec::new();
        write_log(&log, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.split('\n');
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), log.rows.len() + 1);
        for line in text.lines().skip(1) {
            assert_eq!(line.split(',').count(), 27);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let log = short_log();
        let mut buf = Vec::new();
        write_log(&log, &mut buf).unwrap();
        let back = read_log(buf.as_slice()).unwrap();
        let expected: Vec<Record> = log.rows.iter().map(record).collect();
        assert_eq!(back.len(), expected.len());
        for (a, b) in back.iter().zip(&expected) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(
            read_log("a,b\n1,2\n".as_bytes()),
            Err(ReadLogError::Header)
        ));
    }
}
