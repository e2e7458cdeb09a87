//! Oriented multigraphs, admittance vectors, incidence matrices and
//! weighted Laplacians.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::logspace::LogVal;
use crate::unionfind::UnionFind;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex id {0} out of range (vertex count {1})")]
    VertexOutOfRange(usize, usize),
    #[error("admittance vector has {got} entries, graph has {want} edges")]
    DimensionMismatch { got: usize, want: usize },
    #[error("admittance must be nonnegative, edge {edge} has {value}")]
    NegativeAdmittance { edge: usize, value: f64 },
    #[error("self-loop edge {0} must have zero admittance")]
    LoopWithWeight(usize),
    #[error("cannot contract a vertex with itself ({0})")]
    ContractSameVertex(usize),
    #[error("graph too large for spanning-tree enumeration ({0} > bound {1})")]
    TooLargeForEnumeration(usize, usize),
    #[error("terminals {0} and {1} are not connected in the support of the admittances")]
    TerminalsDisconnected(usize, usize),
}

/// An edge oriented from `tail` to `head`. Self-loops (`tail == head`)
/// are allowed and carry zero admittance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// The combinatorial skeleton of an electrical network. Edge order is
/// stable and defines the column order of the incidence matrix.
#[derive(Clone, Debug)]
pub struct OrientedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    vertex_labels: Vec<Option<String>>,
    edge_labels: Vec<Option<String>>,
}

impl OrientedGraph {
    pub fn new(vertex_count: usize) -> OrientedGraph {
        assert!(vertex_count >= 1, "graph needs at least one vertex");
        OrientedGraph {
            vertex_count,
            edges: Vec::new(),
            vertex_labels: vec![None; vertex_count],
            edge_labels: Vec::new(),
        }
    }

    pub fn with_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<OrientedGraph, GraphError> {
        let mut g = OrientedGraph::new(vertex_count);
        for (t, h) in edges {
            g.add_edge(t, h)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, tail: usize, head: usize) -> Result<usize, GraphError> {
        for &v in &[tail, head] {
            if v >= self.vertex_count {
                return Err(GraphError::VertexOutOfRange(v, self.vertex_count));
            }
        }
        self.edges.push(Edge { tail, head });
        self.edge_labels.push(None);
        Ok(self.edges.len() - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn set_vertex_label(&mut self, v: usize, label: impl Into<String>) {
        self.vertex_labels[v] = Some(label.into());
    }

    pub fn vertex_label(&self, v: usize) -> Option<&str> {
        self.vertex_labels[v].as_deref()
    }

    pub fn set_edge_label(&mut self, e: usize, label: impl Into<String>) {
        self.edge_labels[e] = Some(label.into());
    }

    pub fn edge_label(&self, e: usize) -> Option<&str> {
        self.edge_labels[e].as_deref()
    }

    /// Signed incidence matrix: column e has +1 at head(e), -1 at
    /// tail(e); a self-loop gives an all-zero column.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.vertex_count, self.edges.len());
        for (e, edge) in self.edges.iter().enumerate() {
            if !edge.is_loop() {
                d[(edge.tail, e)] = -1.0;
                d[(edge.head, e)] = 1.0;
            }
        }
        d
    }

    /// Merges `w` into `u`; the merged vertex keeps id `min(u, w)` and
    /// vertices above `max(u, w)` shift down by one. Edge order is
    /// preserved; edges between `u` and `w` become self-loops.
    pub fn contract(&self, u: usize, w: usize) -> Result<OrientedGraph, GraphError> {
        Ok(self.contract_map(u, w)?.0)
    }

    /// As [`contract`](Self::contract), also returning the old-to-new
    /// vertex id map.
    pub fn contract_map(
        &self,
        u: usize,
        w: usize,
    ) -> Result<(OrientedGraph, Vec<usize>), GraphError> {
        if u == w {
            return Err(GraphError::ContractSameVertex(u));
        }
        for &v in &[u, w] {
            if v >= self.vertex_count {
                return Err(GraphError::VertexOutOfRange(v, self.vertex_count));
            }
        }
        let keep = u.min(w);
        let drop = u.max(w);
        let map: Vec<usize> = (0..self.vertex_count)
            .map(|v| {
                if v == drop {
                    keep
                } else if v > drop {
                    v - 1
                } else {
                    v
                }
            })
            .collect();
        let mut g = OrientedGraph::new(self.vertex_count - 1);
        for (i, lbl) in self.vertex_labels.iter().enumerate() {
            if i != drop {
                if let Some(l) = lbl {
                    g.vertex_labels[map[i]] = Some(l.clone());
                }
            }
        }
        for edge in &self.edges {
            g.edges.push(Edge {
                tail: map[edge.tail],
                head: map[edge.head],
            });
        }
        g.edge_labels = self.edge_labels.clone();
        Ok((g, map))
    }

    /// Connectivity of `u` and `w` through edges with strictly positive
    /// admittance. Zero-weight edges are excluded by convention.
    pub fn connected_in_support(&self, y: &AdmittanceVector, u: usize, w: usize) -> bool {
        let mut uf = UnionFind::new(self.vertex_count);
        for (e, edge) in self.edges.iter().enumerate() {
            if y.values()[e] > 0.0 && !edge.is_loop() {
                uf.union(edge.tail, edge.head);
            }
        }
        uf.connected(u, w)
    }
}

/// One nonnegative weight per edge, in the graph's edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmittanceVector {
    values: Vec<f64>,
}

impl AdmittanceVector {
    pub fn new(g: &OrientedGraph, values: Vec<f64>) -> Result<AdmittanceVector, GraphError> {
        if values.len() != g.edge_count() {
            return Err(GraphError::DimensionMismatch {
                got: values.len(),
                want: g.edge_count(),
            });
        }
        for (e, &v) in values.iter().enumerate() {
            if !(v >= 0.0) {
                return Err(GraphError::NegativeAdmittance { edge: e, value: v });
            }
            if g.edge(e).is_loop() && v != 0.0 {
                return Err(GraphError::LoopWithWeight(e));
            }
        }
        Ok(AdmittanceVector { values })
    }

    pub fn uniform(g: &OrientedGraph, value: f64) -> AdmittanceVector {
        let values = g
            .edges()
            .iter()
            .map(|e| if e.is_loop() { 0.0 } else { value })
            .collect();
        AdmittanceVector::new(g, values).expect("uniform weights are valid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> AdmittanceVector {
        assert!(c > 0.0);
        AdmittanceVector {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Log-space admittances for networks whose weights underflow doubles.
#[derive(Clone, Debug)]
pub struct LogAdmittance {
    values: Vec<LogVal>,
}

impl LogAdmittance {
    pub fn new(g: &OrientedGraph, values: Vec<LogVal>) -> Result<LogAdmittance, GraphError> {
        if values.len() != g.edge_count() {
            return Err(GraphError::DimensionMismatch {
                got: values.len(),
                want: g.edge_count(),
            });
        }
        for (e, v) in values.iter().enumerate() {
            if g.edge(e).is_loop() && !v.is_zero() {
                return Err(GraphError::LoopWithWeight(e));
            }
        }
        Ok(LogAdmittance { values })
    }

    pub fn values(&self) -> &[LogVal] {
        &self.values
    }

    /// Divides out the largest weight, returning plain weights in (0, 1]
    /// and the common log scale. Weights more than ~700 e-folds below
    /// the maximum underflow to zero, which leaves tree sums unchanged
    /// to double precision.
    pub fn normalized(&self, g: &OrientedGraph) -> (AdmittanceVector, f64) {
        let max_ln = self
            .values
            .iter()
            .map(|v| v.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        let scale = if max_ln.is_finite() { max_ln } else { 0.0 };
        let values = self
            .values
            .iter()
            .map(|v| {
                if v.is_zero() {
                    0.0
                } else {
                    (v.ln() - scale).exp()
                }
            })
            .collect();
        (
            AdmittanceVector::new(g, values).expect("normalized weights are valid"),
            scale,
        )
    }
}

/// Weighted Laplacian `L = D diag(y) D^T`.
pub fn weighted_laplacian(d: &DMatrix<f64>, y: &AdmittanceVector) -> Result<DMatrix<f64>, GraphError> {
    if d.ncols() != y.values().len() {
        return Err(GraphError::DimensionMismatch {
            got: y.values().len(),
            want: d.ncols(),
        });
    }
    let n = d.nrows();
    let mut l = DMatrix::zeros(n, n);
    for (e, &ye) in y.values().iter().enumerate() {
        if ye == 0.0 {
            continue;
        }
        let col = d.column(e);
        for i in 0..n {
            if col[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if col[j] != 0.0 {
                    l[(i, j)] += ye * col[i] * col[j];
                }
            }
        }
    }
    Ok(l)
}

/// Laplacian straight from the graph, skipping the dense incidence matrix.
pub fn graph_laplacian(g: &OrientedGraph, y: &AdmittanceVector) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut l = DMatrix::zeros(n, n);
    for (e, edge) in g.edges().iter().enumerate() {
        let ye = y.values()[e];
        if ye == 0.0 || edge.is_loop() {
            continue;
        }
        l[(edge.tail, edge.tail)] += ye;
        l[(edge.head, edge.head)] += ye;
        l[(edge.tail, edge.head)] -= ye;
        l[(edge.head, edge.tail)] -= ye;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incidence_single_edge() {
        let g = OrientedGraph::with_edges(2, [(0, 1)]).unwrap();
        let d = g.incidence_matrix();
        assert_eq!(d[(0, 0)], -1.0);
        assert_eq!(d[(1, 0)], 1.0);
    }

    #[test]
    fn incidence_self_loop_column_is_zero() {
        let g = OrientedGraph::with_edges(1, [(0, 0)]).unwrap();
        let d = g.incidence_matrix();
        assert_eq!(d[(0, 0)], 0.0);
    }

    #[test]
    fn incidence_path() {
        // u -> v, v -> w
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2)]).unwrap();
        let d = g.incidence_matrix();
        let expect = [[-1.0, 0.0], [1.0, -1.0], [0.0, 1.0]];
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(d[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn laplacian_single_edge() {
        let g = OrientedGraph::with_edges(2, [(0, 1)]).unwrap();
        let y = AdmittanceVector::new(&g, vec![3.0]).unwrap();
        let l = weighted_laplacian(&g.incidence_matrix(), &y).unwrap();
        assert_eq!(l[(0, 0)], 3.0);
        assert_eq!(l[(0, 1)], -3.0);
        assert_eq!(l[(1, 0)], -3.0);
        assert_eq!(l[(1, 1)], 3.0);
    }

    #[test]
    fn laplacian_triangle_unit() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let y = AdmittanceVector::uniform(&g, 1.0);
        let l = weighted_laplacian(&g.incidence_matrix(), &y).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 2.0 } else { -1.0 };
                assert_eq!(l[(i, j)], want);
            }
        }
        // zero row sums
        for i in 0..3 {
            assert_eq!(l.row(i).sum(), 0.0);
        }
    }

    #[test]
    fn laplacian_zero_weights_is_zero_matrix() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let y = AdmittanceVector::new(&g, vec![0.0; 3]).unwrap();
        let l = weighted_laplacian(&g.incidence_matrix(), &y).unwrap();
        assert_eq!(l.iter().map(|v| v.abs()).sum::<f64>(), 0.0);
    }

    #[test]
    fn laplacian_matches_graph_laplacian() {
        let g = OrientedGraph::with_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3), (2, 2)])
            .unwrap();
        let y = AdmittanceVector::new(&g, vec![0.5, 1.5, 2.0, 0.25, 3.0, 0.0]).unwrap();
        let a = weighted_laplacian(&g.incidence_matrix(), &y).unwrap();
        let b = graph_laplacian(&g, &y);
        assert!((a - b).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn contract_path_endpoints() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = g.contract(0, 2).unwrap();
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c.edge_count(), 2);
        assert!(!c.edge(0).is_loop());
        assert!(!c.edge(1).is_loop());
    }

    #[test]
    fn contract_single_edge_gives_loop() {
        let g = OrientedGraph::with_edges(2, [(0, 1)]).unwrap();
        let c = g.contract(0, 1).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert!(c.edge(0).is_loop());
    }

    #[test]
    fn contract_triangle() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = g.contract(0, 2).unwrap();
        assert_eq!(c.vertex_count(), 2);
        let loops = c.edges().iter().filter(|e| e.is_loop()).count();
        assert_eq!(loops, 1);
        assert_eq!(c.edge_count() - loops, 2);
    }

    #[test]
    fn contract_rejects_same_vertex() {
        let g = OrientedGraph::with_edges(2, [(0, 1)]).unwrap();
        assert_eq!(
            g.contract(1, 1).unwrap_err(),
            GraphError::ContractSameVertex(1)
        );
    }

    #[test]
    fn admittance_validation() {
        let g = OrientedGraph::with_edges(2, [(0, 1), (1, 1)]).unwrap();
        assert!(AdmittanceVector::new(&g, vec![1.0]).is_err());
        assert!(AdmittanceVector::new(&g, vec![-1.0, 0.0]).is_err());
        assert!(AdmittanceVector::new(&g, vec![1.0, 0.5]).is_err());
        assert!(AdmittanceVector::new(&g, vec![1.0, 0.0]).is_ok());
    }

    #[test]
    fn log_admittance_normalization() {
        let g = OrientedGraph::with_edges(2, [(0, 1), (0, 1)]).unwrap();
        let ly = LogAdmittance::new(
            &g,
            vec![LogVal::from_ln(-1000.0), LogVal::from_ln(-1001.0)],
        )
        .unwrap();
        let (y, scale) = ly.normalized(&g);
        assert_eq!(scale, -1000.0);
        assert!((y.values()[0] - 1.0).abs() < 1e-15);
        assert!((y.values()[1] - (-1.0f64).exp()).abs() < 1e-15);
    }
}
