//! Run drivers behind the four subcommands. Each produces a
//! [`CapacityReport`]; serialization and exit-code mapping live in main.

use capnet::landscape::{from_decomposition, decompose_islands, IslandDecomposition, Potential};
use capnet::net::blocks::{biconnected_components, prune_irrelevant_blocks};
use capnet::net::file as netfile;
use capnet::net::graph::{AdmittanceVector, OrientedGraph};
use capnet::net::solve::{capacity, capacity_log};
use capnet::oracle::{solve_capacity, GridProblem};

use crate::config::ResolvedRun;
use crate::report::{
    config_hash, CapacityReport, EdgeReport, IslandReport, PruneSummary, Row, SciValue,
    SCHEMA_VERSION,
};

/// Growth constant for potentials taken from run files; generous enough
/// for any box a user would pair with a confining potential.
const GROWTH_C0: f64 = 40.0;

#[derive(Debug)]
pub enum EngineError {
    /// malformed input file or expression (exit code 2)
    Parse(String),
    /// numerical or structural failure during the solve (exit code 3)
    Numeric(String),
}

impl std::fmt::Display for EngineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineError::Parse(m) => write!(f, "parse error: {m}"),
            EngineError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> EngineError {
    EngineError::Parse(e.to_string())
}

fn num_err(e: impl std::fmt::Display) -> EngineError {
    EngineError::Numeric(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LandscapeMode {
    Capacity,
    Verify,
    Report,
}

impl LandscapeMode {
    fn name(self) -> &'static str {
        match self {
            LandscapeMode::Capacity => "capacity",
            LandscapeMode::Verify => "verify",
            LandscapeMode::Report => "report",
        }
    }

    fn wants_oracle(self) -> bool {
        !matches!(self, LandscapeMode::Capacity)
    }
}

/// `network` subcommand: exact solve on an explicit weighted network.
pub fn run_network(src: &str, hash_parts: Vec<String>) -> Result<CapacityReport, EngineError> {
    let file = netfile::parse(src).map_err(parse_err)?;
    let (u, w) = file
        .terminals
        .ok_or_else(|| EngineError::Parse("network file has no `terminals:` line".into()))?;
    let g = &file.graph;
    let ly = file.log_admittances().map_err(parse_err)?;
    let cap = capacity_log(g, &ly, u, w).map_err(num_err)?;
    let (y, _scale) = ly.normalized(g);
    let sol = capacity(g, &y, u, w).map_err(num_err)?;
    let currents = sol.current;
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| EdgeReport {
            index: e,
            tail: edge.tail,
            head: edge.head,
            admittance: SciValue::from_ln(ly.values()[e].ln()),
            current: currents.as_ref().map(|c| c[e]),
            saddle_location: None,
            saddle_height: None,
        })
        .collect();
    let prune = prune_summary(g, &y, u, w)?;
    Ok(CapacityReport {
        schema_version: SCHEMA_VERSION,
        mode: "network".into(),
        config_hash: config_hash(&hash_parts),
        delta: None,
        grid_n: None,
        level: None,
        islands: Vec::new(),
        prune: Some(prune),
        rows: vec![Row {
            eps: None,
            network: Some(SciValue::from_ln(cap.ln())),
            oracle: None,
            ratio: None,
            oracle_residual: None,
            oracle_iterations: None,
            edges,
            note: None,
        }],
        timing_ms: None,
    })
}

fn prune_summary(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    u: usize,
    w: usize,
) -> Result<PruneSummary, EngineError> {
    let blocks_total = biconnected_components(g).blocks.len();
    let pruned = prune_irrelevant_blocks(g, y, u, w).map_err(num_err)?;
    let full = capacity(g, y, u, w).map_err(num_err)?.lambda;
    let small = capacity(&pruned.graph, &pruned.admittances, pruned.u, pruned.w)
        .map_err(num_err)?
        .lambda;
    let rel = if full == 0.0 {
        (small - full).abs()
    } else {
        ((small - full) / full).abs()
    };
    Ok(PruneSummary {
        blocks_total,
        blocks_removed: pruned.removed_blocks,
        edges_kept: pruned.kept_edges.len(),
        capacity_rel_diff: rel,
    })
}

/// `capacity` / `verify` / `report` subcommands on a landscape run.
pub fn run_landscape(
    run: &ResolvedRun,
    mode: LandscapeMode,
    hash_parts: Vec<String>,
) -> Result<CapacityReport, EngineError> {
    let expr = capnet::dsl::parse(&run.expr).map_err(parse_err)?;
    let p = Potential::new(
        expr,
        2,
        vec![run.domain[0], run.domain[1]],
        vec![run.domain[2], run.domain[3]],
        run.params.clone(),
        GROWTH_C0,
    )
    .map_err(num_err)?;

    let decomposition = decompose_islands(&p, &run.a, &run.b, run.delta, run.grid);
    // verify/report degrade to oracle-only rows when the network cannot
    // be built; capacity alone has nothing left to compute
    let (decomposition, build_note) = match decomposition {
        Ok(d) => (Some(d), None),
        Err(e) if mode.wants_oracle() => (None, Some(e.to_string())),
        Err(e) => return Err(num_err(e)),
    };

    let mut rows = Vec::with_capacity(run.eps.len());
    for &eps in &run.eps {
        let net = match &decomposition {
            Some(d) => match from_decomposition(&p, d.clone(), eps) {
                Ok(n) => Some(n),
                Err(e) if mode.wants_oracle() => {
                    rows.push(oracle_only_row(&p, run, eps, e.to_string())?);
                    continue;
                }
                Err(e) => return Err(num_err(e)),
            },
            None => None,
        };
        let (network, edges) = match &net {
            Some(net) => {
                let cap = net.capacity().map_err(num_err)?;
                let edges = if mode == LandscapeMode::Report {
                    edge_reports(net)?
                } else {
                    Vec::new()
                };
                (Some(SciValue::from_ln(cap.ln())), edges)
            }
            None => (None, Vec::new()),
        };
        let (oracle, ratio, residual, iterations) = if mode.wants_oracle() {
            let gp = GridProblem::from_potential(&p, &run.a, &run.b, eps, run.grid)
                .map_err(num_err)?;
            let res = solve_capacity(&gp).map_err(num_err)?;
            let ratio = network
                .as_ref()
                .map(|n| (n.ln - res.capacity.ln()).exp());
            (
                Some(SciValue::from_ln(res.capacity.ln())),
                ratio,
                Some(res.residual),
                Some(res.iterations),
            )
        } else {
            (None, None, None, None)
        };
        rows.push(Row {
            eps: Some(eps),
            network,
            oracle,
            ratio,
            oracle_residual: residual,
            oracle_iterations: iterations,
            edges,
            note: build_note.clone(),
        });
    }

    let islands = decomposition
        .as_ref()
        .map(|d| {
            d.islands
                .iter()
                .enumerate()
                .map(|(i, isl)| IslandReport {
                    index: i,
                    min_location: isl.min_location.clone(),
                    min_height: isl.min_height,
                    cell_count: isl.cell_count,
                    plateau: isl.plateau,
                })
                .collect()
        })
        .unwrap_or_default();
    let prune = match (&decomposition, mode) {
        (Some(d), LandscapeMode::Report) => Some(landscape_prune(&p, d, run.eps[0])?),
        _ => None,
    };
    Ok(CapacityReport {
        schema_version: SCHEMA_VERSION,
        mode: mode.name().into(),
        config_hash: config_hash(&hash_parts),
        delta: decomposition.as_ref().map(|d| d.delta),
        grid_n: decomposition.as_ref().map(|d| d.grid_n),
        level: decomposition.as_ref().map(|d| d.level),
        islands,
        prune,
        rows,
        timing_ms: None,
    })
}

fn oracle_only_row(
    p: &Potential,
    run: &ResolvedRun,
    eps: f64,
    note: String,
) -> Result<Row, EngineError> {
    let gp = GridProblem::from_potential(p, &run.a, &run.b, eps, run.grid).map_err(num_err)?;
    let res = solve_capacity(&gp).map_err(num_err)?;
    Ok(Row {
        eps: Some(eps),
        network: None,
        oracle: Some(SciValue::from_ln(res.capacity.ln())),
        ratio: None,
        oracle_residual: Some(res.residual),
        oracle_iterations: Some(res.iterations),
        edges: Vec::new(),
        note: Some(note),
    })
}

fn edge_reports(net: &capnet::landscape::BuiltNetwork) -> Result<Vec<EdgeReport>, EngineError> {
    let y = AdmittanceVector::new(&net.graph, net.normalized_weights()).map_err(num_err)?;
    let sol = capacity(&net.graph, &y, net.u, net.w).map_err(num_err)?;
    let currents = sol.current;
    let shift = net.decomposition.level / net.eps;
    Ok(net
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let sa = &net.decomposition.saddles[e];
            EdgeReport {
                index: e,
                tail: edge.tail,
                head: edge.head,
                admittance: SciValue::from_ln(net.admittances.values()[e].ln() - shift),
                current: currents.as_ref().map(|c| c[e]),
                saddle_location: Some(sa.saddle.location.clone()),
                saddle_height: Some(sa.saddle.height),
            }
        })
        .collect())
}

fn landscape_prune(
    p: &Potential,
    d: &IslandDecomposition,
    eps: f64,
) -> Result<PruneSummary, EngineError> {
    let net = from_decomposition(p, d.clone(), eps).map_err(num_err)?;
    let y = AdmittanceVector::new(&net.graph, net.normalized_weights()).map_err(num_err)?;
    prune_summary(&net.graph, &y, net.u, net.w)
}

/// Deterministic hash inputs for a landscape run.
pub fn landscape_hash_parts(run: &ResolvedRun, mode: &str, format: &str) -> Vec<String> {
    let mut params: Vec<_> = run.params.iter().collect();
    params.sort_by(|a, b| a.0.cmp(b.0));
    let mut parts = vec![
        mode.to_string(),
        format.to_string(),
        run.expr.clone(),
        format!("{:?}", run.domain),
        format!("{:?}", run.a),
        format!("{:?}", run.b),
        format!("{:?}", run.eps),
        run.grid.to_string(),
        format!("{:?}", run.delta),
    ];
    for (k, v) in params {
        parts.push(format!("{k}={v}"));
    }
    parts
}
