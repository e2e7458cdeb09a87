//! Built-in benchmark potentials. Each entry carries a DSL expression,
//! default parameters, a domain box whose boundary clears the barrier
//! level, the two capacitor wells, and a default grid resolution.

use std::collections::HashMap;

use crate::dsl::parse;
use crate::landscape::{LandscapeError, Potential};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub expr: &'static str,
    pub params: &'static [(&'static str, f64)],
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// capacitor wells (approximate minima; island assignment only needs
    /// them inside the right wells)
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub default_grid: usize,
    pub summary: &'static str,
}

impl CatalogEntry {
    /// Instantiates the potential, with optional parameter overrides.
    pub fn potential(
        &self,
        overrides: &HashMap<String, f64>,
    ) -> Result<Potential, LandscapeError> {
        let mut params: HashMap<String, f64> = self
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        for (k, v) in overrides {
            params.insert(k.clone(), *v);
        }
        Potential::new(
            parse(self.expr).expect("catalog expressions parse"),
            2,
            self.lo.to_vec(),
            self.hi.to_vec(),
            params,
            GROWTH_C0,
        )
    }
}

/// Loose growth constant valid for every entry's box.
const GROWTH_C0: f64 = 40.0;

const TRIPLE_WELLS: &str = "0.15*(x^2 + y^2) \
     - depth*exp(-((x - 0)^2 + (y - 1)^2)/(2*s^2)) \
     - depth*exp(-((x + 0.86602540378443865)^2 + (y + 0.5)^2)/(2*s^2)) \
     - depth*exp(-((x - 0.86602540378443865)^2 + (y + 0.5)^2)/(2*s^2))";

const BLOCK_WELLS: &str = "0.15*(x^2 + y^2) \
     - depth*exp(-((x + 1)^2 + y^2)/(2*s^2)) \
     - depth*exp(-(x^2 + y^2)/(2*s^2)) \
     - depth*exp(-((x - 1)^2 + y^2)/(2*s^2)) \
     - depth*exp(-(x^2 + (y - 1)^2)/(2*s^2))";

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "double-well",
        expr: "(x^2 - 1)^2 + y^2",
        params: &[],
        lo: [-1.8, -1.4],
        hi: [1.8, 1.4],
        a: [-1.0, 0.0],
        b: [1.0, 0.0],
        default_grid: 256,
        summary: "two wells, one saddle at the origin (height 1)",
    },
    CatalogEntry {
        name: "asym-double-well",
        expr: "(x^2 - 1)^2 + tilt*(x + 1) + y^2",
        params: &[("tilt", 0.15)],
        lo: [-1.8, -1.4],
        hi: [1.8, 1.4],
        a: [-1.0, 0.0],
        b: [1.0, 0.0],
        default_grid: 256,
        summary: "tilted double well: wells at different depths, same saddle",
    },
    CatalogEntry {
        name: "parallel-3",
        expr: "(x^2 - 1)^2 + B*exp(-x^2/sigma)*sin(k*y)^2 + mu*y^4",
        params: &[("B", 0.2), ("sigma", 0.1), ("k", 4.0), ("mu", 0.08)],
        lo: [-2.0, -3.6],
        hi: [2.0, 3.6],
        a: [-1.0, 0.0],
        b: [1.0, 0.0],
        default_grid: 320,
        summary: "two wells joined by three parallel saddles at y = 0, ±π/4",
    },
    CatalogEntry {
        name: "series-2",
        expr: "4*(x*(x^2 - 1))^2 + 2*y^2",
        params: &[],
        lo: [-1.5, -0.75],
        hi: [1.5, 0.75],
        a: [-1.0, 0.0],
        b: [1.0, 0.0],
        default_grid: 256,
        summary: "three wells in a row, two saddles in series (height 16/27)",
    },
    CatalogEntry {
        name: "triple-well",
        expr: TRIPLE_WELLS,
        params: &[("depth", 1.0), ("s", 0.45)],
        lo: [-2.2, -2.2],
        hi: [2.2, 2.2],
        a: [-0.866, -0.5],
        b: [0.866, -0.5],
        default_grid: 256,
        summary: "three wells at 120°, three saddles forming a cycle",
    },
    CatalogEntry {
        name: "block-prune",
        expr: BLOCK_WELLS,
        params: &[("depth", 1.0), ("s", 0.35)],
        lo: [-2.2, -1.6],
        hi: [2.2, 2.4],
        a: [-1.0, 0.0],
        b: [1.0, 0.0],
        default_grid: 256,
        summary: "path of three wells plus a dangling well: its block is pruned",
    },
];

pub fn get(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}
