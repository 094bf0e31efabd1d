//! CSV and JSON serialization.
//!
//! Floats are always written with 17 significant digits so that every value
//! round-trips to the exact same f64.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::recurrence::{TraceRow, TraceSink};

/// 17 significant digits: enough to reconstruct the exact f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

/// Parses a points CSV: one point per row, comma-separated coordinates.
/// Blank lines are skipped, CRLF is accepted, and `has_header` skips the
/// first non-blank line.
pub fn load_points<R: BufRead>(reader: R, has_header: bool) -> Result<PointSet> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut header_pending = has_header;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| {
                Error::Input(format!("line {}: cannot parse {:?} as a number", lineno + 1, field))
            })?;
            row.push(v);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::Input(format!(
                    "line {}: {} fields, expected {}",
                    lineno + 1,
                    row.len(),
                    w
                )));
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Input("no points in input".into()));
    }
    PointSet::from_rows(&rows)
}

pub fn load_points_path(path: &Path, has_header: bool) -> Result<PointSet> {
    let file = File::open(path)
        .map_err(|e| Error::Input(format!("cannot open {}: {}", path.display(), e)))?;
    load_points(BufReader::new(file), has_header)
}

/// One point per row, 17-significant-digit coordinates, LF line endings,
/// no header. Deterministic: equal point sets produce identical bytes.
pub fn points_to_csv(ps: &PointSet) -> String {
    let mut out = String::new();
    for i in 0..ps.n() {
        let p = ps.point(i);
        for (j, v) in p.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

pub fn write_points_path(path: &Path, ps: &PointSet) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(points_to_csv(ps).as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Streams iteration trace rows to CSV with the fixed column set
/// `iter,residual_inf,j_value,radius,lambda_min`. The header is always
/// written. IO errors are deferred to [`TraceWriter::finish`] so the
/// iteration loop does not have to thread them through.
pub struct TraceWriter<W: Write> {
    out: W,
    err: Option<std::io::Error>,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path)?;
        Self::new(BufWriter::new(file))
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W) -> Result<Self> {
        out.write_all(b"iter,residual_inf,j_value,radius,lambda_min\n")?;
        Ok(Self { out, err: None })
    }

    pub fn finish(mut self) -> Result<()> {
        if let Some(e) = self.err.take() {
            return Err(e.into());
        }
        self.out.flush()?;
        Ok(())
    }
}

impl<W: Write> TraceSink for TraceWriter<W> {
    fn record(&mut self, row: &TraceRow) {
        if self.err.is_some() {
            return;
        }
        let line = format!(
            "{},{},{},{},{}\n",
            row.iter,
            fmt_f64(row.residual_inf),
            fmt_f64(row.j_value),
            fmt_f64(row.radius),
            fmt_f64(row.lambda_min)
        );
        if let Err(e) = self.out.write_all(line.as_bytes()) {
            self.err = Some(e);
        }
    }
}

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serializes to JSON with every float at 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Numerical(format!("JSON serialization failed: {}", e)))?;
    String::from_utf8(buf).map_err(|e| Error::Numerical(format!("non-UTF8 JSON: {}", e)))
}
