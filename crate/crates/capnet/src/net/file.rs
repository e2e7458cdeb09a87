//! Plain-text network files.
//!
//! ```text
//! # comment
//! vertices: 3
//! vlabel 0 left        (optional vertex label)
//! terminals: 0 2       (optional source/sink)
//! edge 0 1 1.25 [label]
//! edge 1 2 logw:-420.5
//! ```
//!
//! Weights are either plain nonnegative reals or `logw:<ln value>` for
//! log-space admittances. Round-tripping a parsed file reproduces plain
//! weights exactly (printed with 17 significant digits).

use std::fmt::Write as _;

use thiserror::Error;

use super::graph::{GraphError, LogAdmittance, OrientedGraph};
use crate::logspace::LogVal;

#[derive(Debug, Error)]
pub enum NetFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `vertices:` header")]
    MissingHeader,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How the weight was written, kept so serialization is lossless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightRepr {
    Plain(f64),
    Log(f64),
}

impl WeightRepr {
    pub fn to_logval(self) -> LogVal {
        match self {
            WeightRepr::Plain(v) => LogVal::from_f64(v),
            WeightRepr::Log(ln) => LogVal::from_ln(ln),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NetworkFile {
    pub graph: OrientedGraph,
    pub weights: Vec<WeightRepr>,
    pub terminals: Option<(usize, usize)>,
}

impl NetworkFile {
    pub fn log_admittances(&self) -> Result<LogAdmittance, GraphError> {
        LogAdmittance::new(
            &self.graph,
            self.weights.iter().map(|w| w.to_logval()).collect(),
        )
    }

    /// True when every weight fits a plain f64 representation.
    pub fn all_plain(&self) -> bool {
        self.weights
            .iter()
            .all(|w| matches!(w, WeightRepr::Plain(_)))
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> NetFileError {
    NetFileError::Syntax {
        line,
        msg: msg.into(),
    }
}

pub fn parse(src: &str) -> Result<NetworkFile, NetFileError> {
    let mut vertex_count: Option<usize> = None;
    let mut graph: Option<OrientedGraph> = None;
    let mut weights = Vec::new();
    let mut terminals = None;
    let mut pending_vlabels: Vec<(usize, usize, String)> = Vec::new();

    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vertices:") {
            if vertex_count.is_some() {
                return Err(syntax(lineno, "duplicate `vertices:` header"));
            }
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| syntax(lineno, format!("invalid vertex count `{}`", rest.trim())))?;
            if n == 0 {
                return Err(syntax(lineno, "vertex count must be at least 1"));
            }
            vertex_count = Some(n);
            graph = Some(OrientedGraph::new(n));
            continue;
        }
        if let Some(rest) = line.strip_prefix("terminals:") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(syntax(lineno, "terminals line needs two vertex ids"));
            }
            let u = parts[0]
                .parse()
                .map_err(|_| syntax(lineno, format!("invalid vertex id `{}`", parts[0])))?;
            let w = parts[1]
                .parse()
                .map_err(|_| syntax(lineno, format!("invalid vertex id `{}`", parts[1])))?;
            terminals = Some((u, w));
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("vlabel") => {
                let v: usize = parts
                    .next()
                    .ok_or_else(|| syntax(lineno, "vlabel needs a vertex id"))?
                    .parse()
                    .map_err(|_| syntax(lineno, "invalid vertex id"))?;
                let label: String = parts.collect::<Vec<_>>().join(" ");
                if label.is_empty() {
                    return Err(syntax(lineno, "vlabel needs a label"));
                }
                pending_vlabels.push((lineno, v, label));
            }
            Some("edge") => {
                let g = graph
                    .as_mut()
                    .ok_or(NetFileError::MissingHeader)?;
                let tail: usize = parts
                    .next()
                    .ok_or_else(|| syntax(lineno, "edge needs tail, head, weight"))?
                    .parse()
                    .map_err(|_| syntax(lineno, "invalid tail vertex id"))?;
                let head: usize = parts
                    .next()
                    .ok_or_else(|| syntax(lineno, "edge needs head and weight"))?
                    .parse()
                    .map_err(|_| syntax(lineno, "invalid head vertex id"))?;
                let wtok = parts
                    .next()
                    .ok_or_else(|| syntax(lineno, "edge needs a weight"))?;
                let weight = if let Some(lnstr) = wtok.strip_prefix("logw:") {
                    let ln: f64 = lnstr
                        .parse()
                        .map_err(|_| syntax(lineno, format!("invalid log weight `{lnstr}`")))?;
                    if ln.is_nan() {
                        return Err(syntax(lineno, "log weight must not be NaN"));
                    }
                    WeightRepr::Log(ln)
                } else {
                    let v: f64 = wtok
                        .parse()
                        .map_err(|_| syntax(lineno, format!("invalid weight `{wtok}`")))?;
                    if !(v >= 0.0) {
                        return Err(syntax(lineno, "weight must be nonnegative"));
                    }
                    WeightRepr::Plain(v)
                };
                let e = g.add_edge(tail, head).map_err(|err| match err {
                    GraphError::VertexOutOfRange(v, n) => {
                        syntax(lineno, format!("vertex id {v} out of range (vertices: {n})"))
                    }
                    other => other.into(),
                })?;
                if let Some(label) = parts.next() {
                    g.set_edge_label(e, label.to_string());
                }
                weights.push(weight);
            }
            Some(other) => {
                return Err(syntax(lineno, format!("unknown directive `{other}`")));
            }
            None => unreachable!("blank lines are skipped"),
        }
    }

    let graph = {
        let mut g = graph.ok_or(NetFileError::MissingHeader)?;
        let n = g.vertex_count();
        for (lineno, v, label) in pending_vlabels {
            if v >= n {
                return Err(syntax(lineno, format!("vlabel vertex {v} out of range")));
            }
            g.set_vertex_label(v, label);
        }
        g
    };
    if let Some((u, w)) = terminals {
        let n = graph.vertex_count();
        if u >= n || w >= n {
            return Err(syntax(0, format!("terminal out of range: {u} {w}")));
        }
    }
    // Validate loop weights up front.
    for (e, wr) in weights.iter().enumerate() {
        if graph.edge(e).is_loop() && !wr.to_logval().is_zero() {
            return Err(NetFileError::Graph(GraphError::LoopWithWeight(e)));
        }
    }
    Ok(NetworkFile {
        graph,
        weights,
        terminals,
    })
}

pub fn serialize(file: &NetworkFile) -> String {
    let mut out = String::new();
    let g = &file.graph;
    writeln!(out, "vertices: {}", g.vertex_count()).unwrap();
    for v in 0..g.vertex_count() {
        if let Some(l) = g.vertex_label(v) {
            writeln!(out, "vlabel {v} {l}").unwrap();
        }
    }
    if let Some((u, w)) = file.terminals {
        writeln!(out, "terminals: {u} {w}").unwrap();
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let wtok = match file.weights[e] {
            WeightRepr::Plain(v) => format!("{:.16e}", v),
            WeightRepr::Log(ln) => format!("logw:{:.16e}", ln),
        };
        match g.edge_label(e) {
            Some(l) => writeln!(out, "edge {} {} {} {}", edge.tail, edge.head, wtok, l).unwrap(),
            None => writeln!(out, "edge {} {} {}", edge.tail, edge.head, wtok).unwrap(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic() {
        let src = "\
# a triangle
vertices: 3
terminals: 0 2
edge 0 1 1.0
edge 1 2 0.5 middle
edge 2 0 logw:-3.5
";
        let f = parse(src).unwrap();
        assert_eq!(f.graph.vertex_count(), 3);
        assert_eq!(f.graph.edge_count(), 3);
        assert_eq!(f.terminals, Some((0, 2)));
        assert_eq!(f.graph.edge_label(1), Some("middle"));
        assert_eq!(f.weights[2], WeightRepr::Log(-3.5));
    }

    #[test]
    fn roundtrip_plain_weights_lossless() {
        let src = "\
vertices: 2
edge 0 1 0.1
edge 0 1 0.30000000000000004
edge 1 0 1e-300
";
        let f = parse(src).unwrap();
        let printed = serialize(&f);
        let f2 = parse(&printed).unwrap();
        assert_eq!(f.weights, f2.weights);
        assert_eq!(f.graph.edges(), f2.graph.edges());
        // idempotent after the first print
        assert_eq!(printed, serialize(&f2));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("vertices: 3\nedge 0 5 1.0\n").unwrap_err();
        match err {
            NetFileError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse("edge 0 1 1.0\n").unwrap_err();
        assert!(matches!(err, NetFileError::MissingHeader));
        let err = parse("vertices: 2\nedge 0 1 -1.0\n").unwrap_err();
        assert!(matches!(err, NetFileError::Syntax { line: 2, .. }));
    }

    #[test]
    fn loop_with_weight_rejected() {
        let err = parse("vertices: 2\nedge 1 1 0.5\n").unwrap_err();
        assert!(matches!(
            err,
            NetFileError::Graph(GraphError::LoopWithWeight(0))
        ));
        assert!(parse("vertices: 2\nedge 1 1 0\n").is_ok());
    }
}
