//! Verdict rows and byte-stable CSV/JSON emission.
//!
//! Floats are printed with 17 significant digits (`{:.16e}`), which both
//! round-trips every f64 exactly and keeps the output independent of the
//! producing platform. Column order is fixed; line endings are LF.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_COLUMNS: &str =
    "experiment,d,h_inv,upsilon,sigma,rho,param_json,measured,reference,ref_provenance,abs_err,rel_err,slope,pass";

/// One measurement with its reference value and verdict.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct VerdictRow {
    pub experiment: String,
    pub d: u32,
    pub h_inv: Option<f64>,
    pub upsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<i32>,
    pub param_json: String,
    pub measured: Option<f64>,
    pub reference: Option<f64>,
    pub ref_provenance: String,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub slope: Option<f64>,
    pub pass: bool,
}

impl VerdictRow {
    pub fn new(experiment: &str, d: u32) -> Self {
        VerdictRow {
            experiment: experiment.to_string(),
            d,
            h_inv: None,
            upsilon: None,
            sigma: None,
            rho: None,
            param_json: String::new(),
            measured: None,
            reference: None,
            ref_provenance: String::new(),
            abs_err: None,
            rel_err: None,
            slope: None,
            pass: true,
        }
    }

    /// Fills the error columns from `measured` and `reference` and sets the
    /// pass flag by relative error against `tol`.
    pub fn judge_rel(mut self, tol: f64) -> Self {
        if let (Some(m), Some(r)) = (self.measured, self.reference) {
            let abs = (m - r).abs();
            self.abs_err = Some(abs);
            let denom = r.abs().max(1e-300);
            self.rel_err = Some(abs / denom);
            self.pass = abs / denom <= tol;
        }
        self
    }

    /// Same, judging by absolute error.
    pub fn judge_abs(mut self, tol: f64) -> Self {
        if let (Some(m), Some(r)) = (self.measured, self.reference) {
            let abs = (m - r).abs();
            self.abs_err = Some(abs);
            self.rel_err = Some(abs / r.abs().max(1e-300));
            self.pass = abs <= tol;
        }
        self
    }

    /// Serializes auxiliary parameters deterministically (sorted keys).
    pub fn with_params(mut self, params: &BTreeMap<String, String>) -> Self {
        self.param_json = params_to_json(params);
        self
    }
}

pub fn params_to_json(params: &BTreeMap<String, String>) -> String {
    let mut s = String::from("{");
    for (i, (k, v)) in params.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}:{}", json_string(k), json_string(v));
    }
    s.push('}');
    s
}

/// A full experiment report: metadata plus rows in deterministic order.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub d: u32,
    pub seed: u64,
    /// Descriptive anchor of what the experiment verifies, fixed at build
    /// time.
    pub anchor: String,
    pub rows: Vec<VerdictRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            let cells = [
                csv_escape(&r.experiment),
                r.d.to_string(),
                opt_f64(r.h_inv),
                opt_f64(r.upsilon),
                opt_f64(r.sigma),
                r.rho.map(|v| v.to_string()).unwrap_or_default(),
                csv_escape(&r.param_json),
                opt_f64(r.measured),
                opt_f64(r.reference),
                csv_escape(&r.ref_provenance),
                opt_f64(r.abs_err),
                opt_f64(r.rel_err),
                opt_f64(r.slope),
                r.pass.to_string(),
            ];
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"experiment\": {},", json_string(&self.experiment));
        let _ = writeln!(out, "  \"d\": {},", self.d);
        let _ = writeln!(out, "  \"seed\": {},", self.seed);
        let _ = writeln!(out, "  \"anchor\": {},", json_string(&self.anchor));
        out.push_str("  \"rows\": [\n");
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str("    {");
            let _ = write!(out, "\"experiment\": {}, ", json_string(&r.experiment));
            let _ = write!(out, "\"d\": {}, ", r.d);
            let _ = write!(out, "\"h_inv\": {}, ", json_opt_f64(r.h_inv));
            let _ = write!(out, "\"upsilon\": {}, ", json_opt_f64(r.upsilon));
            let _ = write!(out, "\"sigma\": {}, ", json_opt_f64(r.sigma));
            let _ = write!(
                out,
                "\"rho\": {}, ",
                r.rho.map(|v| v.to_string()).unwrap_or("null".into())
            );
            let _ = write!(out, "\"param_json\": {}, ", json_string(&r.param_json));
            let _ = write!(out, "\"measured\": {}, ", json_opt_f64(r.measured));
            let _ = write!(out, "\"reference\": {}, ", json_opt_f64(r.reference));
            let _ = write!(
                out,
                "\"ref_provenance\": {}, ",
                json_string(&r.ref_provenance)
            );
            let _ = write!(out, "\"abs_err\": {}, ", json_opt_f64(r.abs_err));
            let _ = write!(out, "\"rel_err\": {}, ", json_opt_f64(r.rel_err));
            let _ = write!(out, "\"slope\": {}, ", json_opt_f64(r.slope));
            let _ = write!(out, "\"pass\": {}", r.pass);
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).context("cannot parse report JSON")
    }

    /// Writes `<out>/<experiment>.csv` and `.json`.
    pub fn emit(&self, out_dir: &Path) -> Result<()> {
        if self.rows.is_empty() {
            bail!("refusing to emit an empty report");
        }
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        let base = out_dir.join(&self.experiment);
        let csv_path = base.with_extension("csv");
        std::fs::write(&csv_path, self.to_csv())
            .with_context(|| format!("cannot write {}", csv_path.display()))?;
        let json_path = base.with_extension("json");
        std::fs::write(&json_path, self.to_json())
            .with_context(|| format!("cannot write {}", json_path.display()))?;
        Ok(())
    }
}

/// 17-significant-digit float formatting: exact f64 round trip.
pub fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(float17).unwrap_or_default()
}

fn json_opt_f64(v: Option<f64>) -> String {
    v.map(float17).unwrap_or("null".into())
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
