//! Newline-delimited JSON output for diagnostics and reports.
//!
//! Every real is written with 17 significant digits (`{:.16e}`), which
//! round-trips any `f64` exactly; exact zeros are written as `0`. Field order is
//! fixed by the writers below and never changes within a schema version.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

/// Formats a finite real with 17 significant digits.
pub fn format_real(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Precondition(format!("cannot serialize non-finite value {x}")));
    }
    if x == 0.0 {
        return Ok("0".to_string());
    }
    Ok(format!("{x:.16e}"))
}

/// Incremental builder for one JSON object with a fixed key order.
#[derive(Debug, Default)]
pub struct JsonLine {
    buf: String,
}

impl JsonLine {
    pub fn new() -> Self {
        Self { buf: String::from("{") }
    }

    fn key(&mut self, key: &str) {
        if self.buf.len() > 1 {
            self.buf.push(',');
        }
        let _ = write!(self.buf, "\"{key}\":");
    }

    pub fn real(mut self, key: &str, x: f64) -> Result<Self> {
        self.key(key);
        self.buf.push_str(&format_real(x)?);
        Ok(self)
    }

    pub fn opt_real(mut self, key: &str, x: Option<f64>) -> Result<Self> {
        match x {
            Some(v) => self.real(key, v),
            None => {
                self.key(key);
                self.buf.push_str("null");
                Ok(self)
            }
        }
    }

    pub fn int(mut self, key: &str, x: impl std::fmt::Display) -> Self {
        self.key(key);
        let _ = write!(self.buf, "{x}");
        self
    }

    pub fn boolean(mut self, key: &str, x: bool) -> Self {
        self.key(key);
        self.buf.push_str(if x { "true" } else { "false" });
        self
    }

    pub fn string(mut self, key: &str, s: &str) -> Self {
        self.key(key);
        self.buf
            .push_str(&serde_json::to_string(s).expect("string serialization is infallible"));
        self
    }

    pub fn reals(mut self, key: &str, xs: &[f64]) -> Result<Self> {
        self.key(key);
        self.buf.push('[');
        for (i, &x) in xs.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(&format_real(x)?);
        }
        self.buf.push(']');
        Ok(self)
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}

/// Serializes one record without the trailing newline.
pub fn diagnostics_line(r: &DiagnosticsRecord) -> Result<String> {
    Ok(JsonLine::new()
        .int("schema", r.schema)
        .real("t", r.t)?
        .real("l2_omega", r.l2_omega)?
        .real("l2_theta", r.l2_theta)?
        .real("h_half_omega", r.h_half_omega)?
        .real("h_half_theta", r.h_half_theta)?
        .real("q_theta", r.q_theta)?
        .real("q_omega", r.q_omega)?
        .real("frac_q_theta", r.frac_q_theta)?
        .real("frac_q_omega", r.frac_q_omega)?
        .real("max_omega", r.max_omega)?
        .real("max_theta", r.max_theta)?
        .real("max_u", r.max_u)?
        .real("bkm_integral", r.bkm_integral)?
        .reals("sobolev_s", &r.sobolev_s)?
        .reals("hs_omega", &r.hs_omega)?
        .reals("hs_theta", &r.hs_theta)?
        .opt_real("bound_slack", r.bound_slack)?
        .finish())
}

/// Appends one record as a single line.
pub fn write_diagnostics<W: Write>(record: &DiagnosticsRecord, sink: &mut W) -> Result<()> {
    let line = diagnostics_line(record)?;
    sink.write_all(line.as_bytes())?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn read_diagnostics<R: BufRead>(reader: R) -> Result<Vec<DiagnosticsRecord>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DiagnosticsRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
