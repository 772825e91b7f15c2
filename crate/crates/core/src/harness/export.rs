use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Trace, TraceMeta, TraceRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "k,f,grad_norm,dist_opt,f_avg";

/// Sidecar path for the metadata of the CSV at `csv`: `run.csv` →
/// `run.meta.json`.
pub fn metadata_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

fn push_f64(out: &mut String, v: f64) {
    let mut buf = ryu::Buffer::new();
    out.push_str(buf.format(v));
}

fn render_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},", r.k);
        push_f64(&mut out, r.f);
        out.push(',');
        push_f64(&mut out, r.grad_norm);
        out.push(',');
        if let Some(d) = r.dist_opt {
            push_f64(&mut out, d);
        }
        out.push(',');
        if let Some(fa) = r.f_avg {
            push_f64(&mut out, fa);
        }
        out.push('\n');
    }
    out
}

/// Writes the trace as CSV plus a JSON metadata sidecar. The output is a pure
/// function of the trace.
pub fn export_trace(trace: &Trace, csv: &Path) -> Result<()> {
    fs::write(csv, render_csv(&trace.rows))?;
    let mut meta = serde_json::to_string_pretty(&trace.meta)?;
    meta.push('\n');
    fs::write(metadata_path(csv), meta)?;
    Ok(())
}

fn parse_rows(path: &Path, text: &str) -> Result<Vec<TraceRow>> {
    let err = |line: usize, msg: String| Error::TraceFormat { path: path.to_path_buf(), line, msg };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == CSV_HEADER => {}
        Some((_, h)) => return Err(err(1, format!("expected header {CSV_HEADER:?}, found {h:?}"))),
        None => return Err(err(1, "empty file".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 5 {
            return Err(err(line_no, format!("expected 5 fields, found {}", fields.len())));
        }
        let num = |idx: usize, name: &str| -> Result<f64> {
            fields[idx]
                .parse::<f64>()
                .map_err(|_| err(line_no, format!("invalid {name} {:?}", fields[idx])))
        };
        let opt = |idx: usize, name: &str| -> Result<Option<f64>> {
            if fields[idx].is_empty() {
                Ok(None)
            } else {
                num(idx, name).map(Some)
            }
        };
        let k = fields[0].parse::<usize>().map_err(|_| err(line_no, format!("invalid k {:?}", fields[0])))?;
        if k != rows.len() {
            return Err(err(line_no, format!("expected k = {}, found {k}", rows.len())));
        }
        rows.push(TraceRow {
            k,
            f: num(1, "f")?,
            grad_norm: num(2, "grad_norm")?,
            dist_opt: opt(3, "dist_opt")?,
            f_avg: opt(4, "f_avg")?,
        });
    }
    Ok(rows)
}

/// Reads a trace written by [`export_trace`].
pub fn read_trace(csv: &Path) -> Result<Trace> {
    let text = fs::read_to_string(csv)?;
    let rows = parse_rows(csv, &text)?;
    let meta_path = metadata_path(csv);
    let meta_text = fs::read_to_string(&meta_path)?;
    let meta: TraceMeta = serde_json::from_str(&meta_text)?;
    Ok(Trace { rows, meta })
}
