//! CSV and JSON artifacts.
//!
//! * distribution file: `id,p000,...,p111`, column bits `(E1, E2, C)`
//! * report file: `dist_id,model,epsilon,eta,clamped,degenerate,converged,param0..param6`
//! * summary file: JSON object keyed by model name
//!
//! Reals are written with 17 significant digits, which round-trips `f64`
//! exactly and keeps reruns byte-identical.

use std::io::{Read, Write};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bench::{DistReport, EtaScore, ModelFit, ModelOutcome, SummaryTable};
use crate::dist::JointDist;
use crate::models::{ModelKind, ModelParams};

pub const DIST_HEADER: &str = "id,p000,p001,p010,p011,p100,p101,p110,p111";
pub const REPORT_HEADER: &str =
    "dist_id,model,epsilon,eta,clamped,degenerate,converged,param0,param1,param2,param3,param4,param5,param6";
const MAX_PARAMS: usize = 7;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header { found: String, expected: &'static str },
}

/// `%.{digits}g`-style formatting: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn real(x: f64) -> String {
    fmt_sig(x, 17)
}

pub fn write_dists<W: Write>(mut w: W, dists: &[(u64, JointDist)]) -> Result<(), IoError> {
    writeln!(w, "{DIST_HEADER}")?;
    for (id, d) in dists {
        let cols: Vec<String> = d.atoms().iter().map(|&a| real(a)).collect();
        writeln!(w, "{id},{}", cols.join(","))?;
    }
    Ok(())
}

pub fn read_dists<R: Read>(r: R) -> Result<Vec<(u64, JointDist)>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| IoError::Parse { row, message: e.to_string() })?;
        if i == 0 {
            let found = record.iter().collect::<Vec<_>>().join(",");
            if found != DIST_HEADER {
                return Err(IoError::Header { found, expected: DIST_HEADER });
            }
            continue;
        }
        let parse_err = |message: String| IoError::Parse { row, message };
        if record.len() != 9 {
            return Err(parse_err(format!("expected 9 columns, found {}", record.len())));
        }
        let id: u64 = record[0].parse().map_err(|e| parse_err(format!("id {:?}: {e}", &record[0])))?;
        let mut atoms = [0.0; 8];
        for (k, atom) in atoms.iter_mut().enumerate() {
            let field = &record[k + 1];
            *atom = field.parse().map_err(|e| parse_err(format!("column {}: {field:?}: {e}", k + 1)))?;
        }
        let d = JointDist::new(atoms).map_err(|e| parse_err(e.to_string()))?;
        out.push((id, d));
    }
    Ok(out)
}

/// Writes one row per (distribution, model). `ids[k]` labels the
/// distribution with `dist_id = k`; failed fits leave the numeric columns empty.
pub fn write_report<W: Write>(mut w: W, reports: &[DistReport], ids: &[u64]) -> Result<(), IoError> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in reports {
        let id = ids.get(r.dist_id).copied().unwrap_or(r.dist_id as u64);
        for m in &r.models {
            let mut cols = vec![id.to_string(), m.kind.name().to_string()];
            match &m.result {
                Ok(fit) => {
                    cols.push(real(fit.epsilon));
                    cols.push(if fit.eta.degenerate { String::new() } else { real(fit.eta.value) });
                    cols.push(fit.eta.clamped.to_string());
                    cols.push(fit.eta.degenerate.to_string());
                    cols.push(fit.converged.to_string());
                    let values = fit.params.values();
                    cols.extend((0..MAX_PARAMS).map(|k| values.get(k).map(|&v| real(v)).unwrap_or_default()));
                }
                Err(_) => {
                    cols.extend([
                        String::new(),
                        String::new(),
                        "false".into(),
                        r.degenerate.to_string(),
                        "false".into(),
                    ]);
                    cols.extend((0..MAX_PARAMS).map(|_| String::new()));
                }
            }
            writeln!(w, "{}", cols.join(","))?;
        }
    }
    Ok(())
}

/// Rebuilds reports from a report CSV so they can be re-summarized. Rows
/// with an empty `epsilon` become failed fits. Per-distribution baselines
/// are recovered from the LINR and WRST rows when present.
pub fn read_report<R: Read>(r: R) -> Result<Vec<DistReport>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut reports: Vec<DistReport> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| IoError::Parse { row, message: e.to_string() })?;
        if i == 0 {
            let found = record.iter().collect::<Vec<_>>().join(",");
            if found != REPORT_HEADER {
                return Err(IoError::Header { found, expected: REPORT_HEADER });
            }
            continue;
        }
        let parse_err = |message: String| IoError::Parse { row, message };
        if record.len() != 7 + MAX_PARAMS {
            return Err(parse_err(format!("expected {} columns, found {}", 7 + MAX_PARAMS, record.len())));
        }
        let dist_id: usize = record[0].parse().map_err(|e| parse_err(format!("dist_id: {e}")))?;
        let kind: ModelKind = record[1].parse().map_err(parse_err)?;
        let flag = |k: usize| -> Result<bool, IoError> {
            record[k].parse().map_err(|e| parse_err(format!("column {k}: {e}")))
        };
        let num = |k: usize| -> Result<f64, IoError> {
            record[k].parse().map_err(|e| parse_err(format!("column {k}: {:?}: {e}", &record[k])))
        };
        let degenerate = flag(5)?;

        let result = if record[2].is_empty() {
            Err("fit failed".to_string())
        } else {
            let epsilon = num(2)?;
            let eta = if degenerate {
                EtaScore::degenerate()
            } else {
                EtaScore { value: num(3)?, clamped: flag(4)?, degenerate: false }
            };
            let values = (7..7 + kind.dimension()).map(num).collect::<Result<Vec<_>, _>>()?;
            let params = if kind == ModelKind::Bst {
                ModelParams::bst()
            } else {
                ModelParams::new(kind, values).map_err(|e| parse_err(e.to_string()))?
            };
            Ok(ModelFit { params, epsilon, eta, converged: flag(6)?, iterations: 0 })
        };

        if reports.last().is_none_or(|r| r.dist_id != dist_id) {
            reports.push(DistReport {
                dist_id,
                models: Vec::new(),
                eps_linr: f64::NAN,
                eps_wrst: f64::NAN,
                degenerate,
                failure: None,
            });
        }
        let report = reports.last_mut().expect("pushed above");
        if let Ok(fit) = &result {
            match kind {
                ModelKind::Linr => report.eps_linr = fit.epsilon,
                ModelKind::Wrst => report.eps_wrst = fit.epsilon,
                _ => {}
            }
        }
        report.models.push(ModelOutcome { kind, result });
    }
    Ok(reports)
}

fn json_real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("NaN")
    } else if x > 0.0 {
        json!("+inf")
    } else {
        json!("-inf")
    }
}

pub fn summary_json(table: &SummaryTable) -> Value {
    let mut obj = Map::new();
    for (kind, s) in &table.models {
        obj.insert(
            kind.name().to_string(),
            json!({
                "mu": json_real(s.mu),
                "sigma": json_real(s.sigma),
                "mu_over_sigma": json_real(s.mu_over_sigma),
                "n_included": s.n_included,
                "n_degenerate": s.n_degenerate,
            }),
        );
    }
    Value::Object(obj)
}

pub fn write_summary<W: Write>(mut w: W, table: &SummaryTable) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(&summary_json(table)).map_err(std::io::Error::from)?;
    writeln!(w, "{text}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample_uniform, Seed};

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(16.0 / 17.0, 12), "0.941176470588");
        assert_eq!(fmt_sig(0.5, 12), "0.5");
        assert_eq!(fmt_sig(0.125, 17), "0.125");
        assert_eq!(fmt_sig(1.0, 17), "1");
        assert_eq!(fmt_sig(0.0, 17), "0");
        assert_eq!(fmt_sig(1.5e-7, 12), "1.5e-07");
        assert_eq!(fmt_sig(0.1, 17), "0.10000000000000001");
        assert_eq!(fmt_sig(-2.5e20, 17), "-2.5e+20");
        assert_eq!(fmt_sig(123.456, 4), "123.5");
        assert_eq!(fmt_sig(f64::INFINITY, 17), "inf");
    }

    #[test]
    fn dist_file_round_trips_exactly() {
        let dists: Vec<_> =
            sample_uniform(Seed(8), 30).into_iter().enumerate().map(|(i, d)| (i as u64, d)).collect();
        let mut buf = Vec::new();
        write_dists(&mut buf, &dists).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with(DIST_HEADER));
        assert_eq!(read_dists(&buf[..]).unwrap(), dists);
    }

    #[test]
    fn dist_parse_errors_name_the_row() {
        let text = format!(
            "{DIST_HEADER}\n0,0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125\n1,0.5,0,0,0,0,0,0,0\n"
        );
        match read_dists(text.as_bytes()) {
            Err(IoError::Parse { row: 3, message }) => assert!(message.contains("sum"), "{message}"),
            other => panic!("{other:?}"),
        }
        let text = format!("{DIST_HEADER}\n0,0.125,x,0.125,0.125,0.125,0.125,0.125,0.125\n");
        assert!(matches!(read_dists(text.as_bytes()), Err(IoError::Parse { row: 2, .. })));
        assert!(matches!(read_dists("a,b\n".as_bytes()), Err(IoError::Header { .. })));
    }

    #[test]
    fn summary_sentinels() {
        let mut table = SummaryTable::default();
        table.models.insert(
            ModelKind::Indp,
            crate::bench::ModelSummary {
                mu: 1.0,
                sigma: 0.0,
                mu_over_sigma: f64::INFINITY,
                n_included: 3,
                n_degenerate: 1,
            },
        );
        let v = summary_json(&table);
        assert_eq!(v["INDP"]["mu_over_sigma"], "+inf");
        assert_eq!(v["INDP"]["n_included"], 3);
        assert_eq!(v["INDP"]["mu"], 1.0);
    }
}
