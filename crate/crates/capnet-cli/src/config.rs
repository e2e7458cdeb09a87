//! Landscape run files: a potential (inline DSL or catalog reference),
//! the capacitor wells, and sweep settings.
//!
//! ```text
//! # double well
//! potential: (x^2-1)^2 + y^2
//! domain: -1.8 -1.4 1.8 1.4
//! a: -1 0
//! b: 1 0
//! eps: 0.2 0.1 0.05
//! grid: 256
//! delta: 0.3          (optional; defaults to the reported automatic choice)
//! param tilt 0.15     (repeatable)
//! ```
//!
//! `catalog: <name>` replaces `potential:`/`domain:` with a built-in
//! entry; explicit lines still override its defaults.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("landscape file needs either `potential:` or `catalog:`")]
    NoSource,
    #[error("both `potential:` and `catalog:` given; exactly one input source required")]
    TwoSources,
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("missing `{0}:` line")]
    Missing(&'static str),
}

#[derive(Clone, Debug, Default)]
pub struct LandscapeFile {
    pub expr: Option<String>,
    pub catalog: Option<String>,
    pub params: Vec<(String, f64)>,
    pub domain: Option<[f64; 4]>,
    pub a: Option<[f64; 2]>,
    pub b: Option<[f64; 2]>,
    pub eps: Vec<f64>,
    pub grid: Option<usize>,
    pub delta: Option<f64>,
}

fn syntax(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_floats(line: usize, s: &str, want: usize) -> Result<Vec<f64>, ConfigError> {
    let vals: Result<Vec<f64>, _> = s.split_whitespace().map(|t| t.parse()).collect();
    let vals = vals.map_err(|_| syntax(line, format!("invalid number in `{s}`")))?;
    if want > 0 && vals.len() != want {
        return Err(syntax(
            line,
            format!("expected {want} numbers, got {}", vals.len()),
        ));
    }
    Ok(vals)
}

pub fn parse_landscape(src: &str) -> Result<LandscapeFile, ConfigError> {
    let mut out = LandscapeFile::default();
    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("potential:") {
            out.expr = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("catalog:") {
            out.catalog = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("domain:") {
            let v = parse_floats(lineno, rest, 4)?;
            out.domain = Some([v[0], v[1], v[2], v[3]]);
        } else if let Some(rest) = line.strip_prefix("a:") {
            let v = parse_floats(lineno, rest, 2)?;
            out.a = Some([v[0], v[1]]);
        } else if let Some(rest) = line.strip_prefix("b:") {
            let v = parse_floats(lineno, rest, 2)?;
            out.b = Some([v[0], v[1]]);
        } else if let Some(rest) = line.strip_prefix("eps:") {
            out.eps = parse_floats(lineno, rest, 0)?;
            if out.eps.iter().any(|e| *e <= 0.0) {
                return Err(syntax(lineno, "eps values must be positive"));
            }
        } else if let Some(rest) = line.strip_prefix("grid:") {
            out.grid = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| syntax(lineno, "invalid grid size"))?,
            );
        } else if let Some(rest) = line.strip_prefix("delta:") {
            out.delta = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| syntax(lineno, "invalid delta"))?,
            );
        } else if let Some(rest) = line.strip_prefix("param ") {
            let mut it = rest.split_whitespace();
            let name = it
                .next()
                .ok_or_else(|| syntax(lineno, "param needs a name and value"))?;
            let val: f64 = it
                .next()
                .ok_or_else(|| syntax(lineno, "param needs a value"))?
                .parse()
                .map_err(|_| syntax(lineno, "invalid param value"))?;
            out.params.push((name.to_string(), val));
        } else {
            return Err(syntax(lineno, format!("unknown directive `{line}`")));
        }
    }
    if out.expr.is_some() && out.catalog.is_some() {
        return Err(ConfigError::TwoSources);
    }
    if out.expr.is_none() && out.catalog.is_none() {
        return Err(ConfigError::NoSource);
    }
    Ok(out)
}

/// Fully resolved run settings after merging file, catalog defaults, and
/// command-line overrides.
#[derive(Clone, Debug)]
pub struct ResolvedRun {
    pub expr: String,
    pub params: HashMap<String, f64>,
    pub domain: [f64; 4],
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub eps: Vec<f64>,
    pub grid: usize,
    pub delta: Option<f64>,
}

impl LandscapeFile {
    pub fn resolve(&self) -> Result<ResolvedRun, ConfigError> {
        let mut params: HashMap<String, f64> = HashMap::new();
        let (expr, domain, a, b, grid) = if let Some(name) = &self.catalog {
            let entry = capnet::catalog::get(name)
                .ok_or_else(|| ConfigError::UnknownCatalog(name.clone()))?;
            for (k, v) in entry.params {
                params.insert(k.to_string(), *v);
            }
            (
                entry.expr.to_string(),
                self.domain.unwrap_or([
                    entry.lo[0],
                    entry.lo[1],
                    entry.hi[0],
                    entry.hi[1],
                ]),
                self.a.unwrap_or(entry.a),
                self.b.unwrap_or(entry.b),
                self.grid.unwrap_or(entry.default_grid),
            )
        } else {
            (
                self.expr.clone().unwrap(),
                self.domain.ok_or(ConfigError::Missing("domain"))?,
                self.a.ok_or(ConfigError::Missing("a"))?,
                self.b.ok_or(ConfigError::Missing("b"))?,
                self.grid.unwrap_or(256),
            )
        };
        for (k, v) in &self.params {
            params.insert(k.clone(), *v);
        }
        let eps = if self.eps.is_empty() {
            vec![0.1]
        } else {
            self.eps.clone()
        };
        Ok(ResolvedRun {
            expr,
            params,
            domain,
            a,
            b,
            eps,
            grid,
            delta: self.delta,
        })
    }
}
