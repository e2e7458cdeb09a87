//! Report data model and serialization. Reports are deterministic
//! byte-for-byte for a fixed config and build: the `timing_ms` field is
//! only populated when the user passes `--timing`.

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Frozen CSV column order; JSON rows mirror these fields plus nested
/// per-edge detail.
pub const CSV_COLUMNS: &str =
    "eps,network_ln,network_sci,oracle_ln,oracle_sci,ratio,oracle_residual,oracle_iterations";

#[derive(Clone, Debug, Serialize)]
pub struct SciValue {
    /// natural log of the value
    pub ln: f64,
    /// human-readable mantissa·10^exponent rendering
    pub sci: String,
}

impl SciValue {
    pub fn from_ln(ln: f64) -> SciValue {
        SciValue {
            ln,
            sci: sci_string(ln),
        }
    }
}

/// Renders e^{ln} as "m.mmmmmme±XXX" without ever materializing the
/// (possibly underflowing) value.
pub fn sci_string(ln: f64) -> String {
    if ln == f64::NEG_INFINITY {
        return "0".to_string();
    }
    let log10 = ln / std::f64::consts::LN_10;
    let exp = log10.floor();
    let mut mant = 10f64.powf(log10 - exp);
    let mut exp = exp as i64;
    // rounding can push the mantissa to 10.0
    if mant >= 9.9999995 {
        mant /= 10.0;
        exp += 1;
    }
    format!("{mant:.6}e{exp}")
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeReport {
    pub index: usize,
    pub tail: usize,
    pub head: usize,
    /// admittance in log space (true value, normalization reapplied)
    pub admittance: SciValue,
    /// unit-flux edge current from the dual solve; None for loops
    pub current: Option<f64>,
    pub saddle_location: Option<Vec<f64>>,
    pub saddle_height: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IslandReport {
    pub index: usize,
    pub min_location: Vec<f64>,
    pub min_height: f64,
    pub cell_count: usize,
    pub plateau: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub eps: Option<f64>,
    pub network: Option<SciValue>,
    pub oracle: Option<SciValue>,
    /// network/oracle, computed in log space
    pub ratio: Option<f64>,
    pub oracle_residual: Option<f64>,
    pub oracle_iterations: Option<usize>,
    pub edges: Vec<EdgeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PruneSummary {
    pub blocks_total: usize,
    pub blocks_removed: usize,
    pub edges_kept: usize,
    /// relative difference between pruned and unpruned capacity
    pub capacity_rel_diff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityReport {
    pub schema_version: u32,
    pub mode: String,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    pub islands: Vec<IslandReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prune: Option<PruneSummary>,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl CapacityReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            let f = |v: &Option<SciValue>| -> (String, String) {
                match v {
                    Some(s) => (format!("{:.12e}", s.ln), s.sci.clone()),
                    None => (String::new(), String::new()),
                }
            };
            let (nl, ns) = f(&r.network);
            let (ol, os) = f(&r.oracle);
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.12e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.eps.map(|e| format!("{e}")).unwrap_or_default(),
                nl,
                ns,
                ol,
                os,
                opt(r.ratio),
                opt(r.oracle_residual),
                r.oracle_iterations
                    .map(|i| i.to_string())
                    .unwrap_or_default(),
            ));
        }
        out
    }
}

/// Stable hex hash of the run configuration (first 16 bytes of SHA-256).
pub fn config_hash(parts: &[String]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    let digest = h.finalize();
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}
