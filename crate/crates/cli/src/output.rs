//! CSV writers. Undefined numbers are written as empty fields and floats use
//! Rust's shortest round-trip formatting.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use bootpivot_core::sim::{FiveNumber, MetricsRow, PowerCurveRow};

use crate::error::{CliError, Result};
use crate::harness::DiagnosticSeries;

pub const METRICS_HEADER: [&str; 24] = [
    "scenario_id",
    "population",
    "param",
    "N",
    "B",
    "M",
    "method",
    "R",
    "defined",
    "undefined",
    "coverage",
    "reject_at_truth",
    "invalid_prop",
    "equal_bounds_prop",
    "width_q0",
    "width_q1",
    "width_q2",
    "width_q3",
    "width_q4",
    "log_width_q0",
    "log_width_q1",
    "log_width_q2",
    "log_width_q3",
    "log_width_q4",
];

pub const POWER_HEADER: [&str; 5] = ["scenario_id", "method", "theta0", "reject_prop", "defined"];
pub const HIST_HEADER: [&str; 2] = ["series", "value"];
pub const REMOVED_HEADER: [&str; 3] = ["series", "kept", "removed"];

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn quartiles(f: Option<FiveNumber>) -> [String; 5] {
    match f {
        Some(FiveNumber(q)) => q.map(|x| x.to_string()),
        None => Default::default(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish<W: Write>(path: &Path, mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn metrics_records(rows: &[MetricsRow]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for row in rows {
        let s = &row.scenario;
        for m in &row.methods {
            let mut rec = vec![
                s.label.clone(),
                s.population.kind_name().to_string(),
                s.population.param_text(),
                s.n.to_string(),
                if m.procedure.is_bootstrap() {
                    s.b.map(|b| b.to_string()).unwrap_or_default()
                } else {
                    String::new()
                },
                if m.procedure.needs_second_level() {
                    s.m.to_string()
                } else {
                    String::new()
                },
                m.procedure.name().to_string(),
                s.replications.to_string(),
                m.defined.to_string(),
                m.undefined.to_string(),
                num(m.coverage),
                num(m.reject_at_truth),
                num(m.invalid_prop),
                num(m.equal_bounds_prop),
            ];
            rec.extend(quartiles(m.width));
            rec.extend(quartiles(m.log_width));
            out.push(rec);
        }
    }
    out
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(METRICS_HEADER).map_err(|e| csv_err(path, e))?;
    for rec in metrics_records(rows) {
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

/// `curves` pairs each scenario id with its grid rows.
pub fn write_power(path: &Path, curves: &[(String, Vec<PowerCurveRow>)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(POWER_HEADER).map_err(|e| csv_err(path, e))?;
    for (id, rows) in curves {
        for row in rows {
            for (proc, reject, defined) in &row.methods {
                w.write_record([
                    id.clone(),
                    proc.name().to_string(),
                    row.theta0.to_string(),
                    num(*reject),
                    defined.to_string(),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
    }
    finish(path, w)
}

pub fn write_hist(path: &Path, series: &[DiagnosticSeries]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(HIST_HEADER).map_err(|e| csv_err(path, e))?;
    for s in series {
        for v in &s.values {
            w.write_record([s.name.as_str(), &v.to_string()])
                .map_err(|e| csv_err(path, e))?;
        }
    }
    finish(path, w)
}

/// Sidecar listing how many values each series kept and dropped.
pub fn write_removed(path: &Path, series: &[DiagnosticSeries]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(REMOVED_HEADER).map_err(|e| csv_err(path, e))?;
    for s in series {
        w.write_record([
            s.name.clone(),
            s.values.len().to_string(),
            s.removed.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bootpivot_core::distributions::Population;
    use bootpivot_core::intervals::IntervalMethod;
    use bootpivot_core::sim::{run_coverage, Procedure, ScenarioSpec};

    fn spec() -> ScenarioSpec {
        ScenarioSpec {
            label: "cell".into(),
            stream: None,
            population: Population::bernoulli(0.5).unwrap(),
            n: 5,
            procedures: vec![
                Procedure::Interval(IntervalMethod::Studentized),
                Procedure::ZTestProportion,
            ],
            b: Some(99),
            m: 5,
            alpha: 0.05,
            replications: 20,
            master_seed: 1,
            power_grid: None,
            share_bootstrap: true,
        }
    }

    #[test]
    fn undefined_cells_are_empty() {
        let row = run_coverage(&spec()).unwrap();
        let recs = metrics_records(&[row]);
        assert_eq!(recs.len(), 2);
        for r in &recs {
            assert_eq!(r.len(), METRICS_HEADER.len());
        }
        let stud = &recs[0];
        assert_eq!(stud[4], "99");
        assert_eq!(stud[5], "5");
        // every studentized interval is undefined for N = 5 proportions here
        assert_eq!(stud[8], "0");
        assert_eq!(stud[10], "");
        let test = &recs[1];
        assert_eq!(test[4], "");
        assert_eq!(test[12], "");
        assert_eq!(test[14], "");
    }

    #[test]
    fn hist_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let series = vec![DiagnosticSeries {
            name: "a, b".into(),
            values: vec![0.5, -1.0],
            removed: 3,
        }];
        write_hist(&dir.path().join("h.csv"), &series).unwrap();
        write_removed(&dir.path().join("r.csv"), &series).unwrap();
        let h = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
        assert_eq!(h, "series,value\n\"a, b\",0.5\n\"a, b\",-1\n");
        let r = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
        assert_eq!(r, "series,kept,removed\n\"a, b\",2,3\n");
    }
}
