//! Block-cut decomposition and network simplification: biconnected
//! components, pruning of blocks that cannot carry current between the
//! terminals, and the edge-deletion capacity sandwich.

use super::graph::{AdmittanceVector, GraphError, OrientedGraph};
use super::solve::{capacity, SolveError};

/// Block-cut decomposition of a multigraph. Every edge belongs to
/// exactly one block; self-loops form singleton blocks.
#[derive(Clone, Debug)]
pub struct BlockCutTree {
    /// Edge ids per block.
    pub blocks: Vec<Vec<usize>>,
    /// Vertex ids per block (sorted).
    pub block_vertices: Vec<Vec<usize>>,
    /// Cut vertices of the graph (sorted).
    pub cut_vertices: Vec<usize>,
    /// Block index of every edge.
    pub block_of_edge: Vec<usize>,
}

struct BlockState<'a> {
    g: &'a OrientedGraph,
    adj: Vec<Vec<(usize, usize)>>, // vertex -> (neighbor, edge id)
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    next_index: usize,
    edge_stack: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    is_cut: Vec<bool>,
}

impl<'a> BlockState<'a> {
    fn dfs(&mut self, v: usize, parent_edge: Option<usize>) {
        self.index[v] = Some(self.next_index);
        self.low[v] = self.next_index;
        self.next_index += 1;
        let mut children = 0;

        for k in 0..self.adj[v].len() {
            let (to, e) = self.adj[v][k];
            if Some(e) == parent_edge {
                continue;
            }
            match self.index[to] {
                Some(ti) => {
                    // back edge (or parallel edge)
                    if ti < self.index[v].unwrap() {
                        self.edge_stack.push(e);
                        self.low[v] = self.low[v].min(ti);
                    }
                }
                None => {
                    self.edge_stack.push(e);
                    children += 1;
                    self.dfs(to, Some(e));
                    self.low[v] = self.low[v].min(self.low[to]);
                    if self.low[to] >= self.index[v].unwrap() {
                        // v separates the subtree of `to`: pop one block
                        if parent_edge.is_some() || children > 1 {
                            self.is_cut[v] = true;
                        }
                        let mut block = Vec::new();
                        while let Some(&top) = self.edge_stack.last() {
                            block.push(top);
                            self.edge_stack.pop();
                            if top == e {
                                break;
                            }
                        }
                        block.reverse();
                        self.blocks.push(block);
                    }
                }
            }
        }
        let _ = self.g;
    }
}

/// Hopcroft–Tarjan block decomposition. Zero-weight edges participate:
/// pruning is purely topological and exactness does not depend on it.
pub fn biconnected_components(g: &OrientedGraph) -> BlockCutTree {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        if !edge.is_loop() {
            adj[edge.tail].push((edge.head, e));
            adj[edge.head].push((edge.tail, e));
        }
    }
    let mut st = BlockState {
        g,
        adj,
        index: vec![None; n],
        low: vec![0; n],
        next_index: 0,
        edge_stack: Vec::new(),
        blocks: Vec::new(),
        is_cut: vec![false; n],
    };
    for v in 0..n {
        if st.index[v].is_none() {
            st.dfs(v, None);
            debug_assert!(st.edge_stack.is_empty());
        }
    }
    // self-loops as singleton blocks
    for (e, edge) in g.edges().iter().enumerate() {
        if edge.is_loop() {
            st.blocks.push(vec![e]);
        }
    }
    let mut block_of_edge = vec![usize::MAX; g.edge_count()];
    let mut block_vertices = Vec::with_capacity(st.blocks.len());
    for (b, block) in st.blocks.iter().enumerate() {
        let mut vs = Vec::new();
        for &e in block {
            block_of_edge[e] = b;
            let edge = g.edge(e);
            vs.push(edge.tail);
            vs.push(edge.head);
        }
        vs.sort_unstable();
        vs.dedup();
        block_vertices.push(vs);
    }
    let cut_vertices = (0..n).filter(|&v| st.is_cut[v]).collect();
    BlockCutTree {
        blocks: st.blocks,
        block_vertices,
        cut_vertices,
        block_of_edge,
    }
}

/// Result of pruning: the reduced network plus the id maps back into
/// the original graph.
#[derive(Clone, Debug)]
pub struct PrunedNetwork {
    pub graph: OrientedGraph,
    pub admittances: AdmittanceVector,
    pub u: usize,
    pub w: usize,
    /// Original edge id of each kept edge, in order.
    pub kept_edges: Vec<usize>,
    /// Number of blocks removed.
    pub removed_blocks: usize,
}

/// Removes every biconnected block hanging off the block-tree path
/// between the terminals. Blocks on the path are retained even when
/// they contain neither terminal; the capacity is unchanged exactly.
pub fn prune_irrelevant_blocks(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    u: usize,
    w: usize,
) -> Result<PrunedNetwork, GraphError> {
    for &v in &[u, w] {
        if v >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange(v, g.vertex_count()));
        }
    }
    let bct = biconnected_components(g);
    let keep_blocks = block_path(g, &bct, u, w);
    let keep_blocks = match keep_blocks {
        Some(k) => k,
        // Terminals in different components (or isolated): nothing to
        // prune safely, return the graph unchanged.
        None => (0..bct.blocks.len()).collect(),
    };
    let mut keep_edge = vec![false; g.edge_count()];
    for &b in &keep_blocks {
        for &e in &bct.blocks[b] {
            keep_edge[e] = true;
        }
    }
    // vertex remap over kept edges plus the terminals
    let mut keep_vertex = vec![false; g.vertex_count()];
    keep_vertex[u] = true;
    keep_vertex[w] = true;
    for (e, &k) in keep_edge.iter().enumerate() {
        if k {
            let edge = g.edge(e);
            keep_vertex[edge.tail] = true;
            keep_vertex[edge.head] = true;
        }
    }
    let mut vmap = vec![usize::MAX; g.vertex_count()];
    let mut nv = 0;
    for v in 0..g.vertex_count() {
        if keep_vertex[v] {
            vmap[v] = nv;
            nv += 1;
        }
    }
    let mut out = OrientedGraph::new(nv);
    for v in 0..g.vertex_count() {
        if keep_vertex[v] {
            if let Some(l) = g.vertex_label(v) {
                out.set_vertex_label(vmap[v], l.to_string());
            }
        }
    }
    let mut kept_edges = Vec::new();
    let mut values = Vec::new();
    for (e, &k) in keep_edge.iter().enumerate() {
        if k {
            let edge = g.edge(e);
            let id = out
                .add_edge(vmap[edge.tail], vmap[edge.head])
                .expect("remapped ids are in range");
            if let Some(l) = g.edge_label(e) {
                out.set_edge_label(id, l.to_string());
            }
            kept_edges.push(e);
            values.push(y.values()[e]);
        }
    }
    let admittances = AdmittanceVector::new(&out, values)?;
    let removed_blocks = bct.blocks.len() - keep_blocks.len();
    Ok(PrunedNetwork {
        graph: out,
        admittances,
        u: vmap[u],
        w: vmap[w],
        kept_edges,
        removed_blocks,
    })
}

/// Blocks on the block-cut-tree path between u and w; `None` when the
/// terminals are not connected in the graph.
fn block_path(g: &OrientedGraph, bct: &BlockCutTree, u: usize, w: usize) -> Option<Vec<usize>> {
    if u == w {
        return Some(Vec::new());
    }
    let nb = bct.blocks.len();
    // Bipartite block-cut tree nodes: 0..nb blocks, nb..nb+n vertices
    // (only cut vertices get tree degree > 1, plain vertices degree 1).
    let n = g.vertex_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nb + n];
    for (b, vs) in bct.block_vertices.iter().enumerate() {
        for &v in vs {
            adj[b].push(nb + v);
            adj[nb + v].push(b);
        }
    }
    let (src, dst) = (nb + u, nb + w);
    let mut prev: Vec<Option<usize>> = vec![None; nb + n];
    let mut queue = std::collections::VecDeque::new();
    prev[src] = Some(src);
    queue.push_back(src);
    while let Some(x) = queue.pop_front() {
        if x == dst {
            break;
        }
        for &nx in &adj[x] {
            if prev[nx].is_none() {
                prev[nx] = Some(x);
                queue.push_back(nx);
            }
        }
    }
    prev[dst]?;
    let mut path_blocks = Vec::new();
    let mut x = dst;
    while x != src {
        if x < nb {
            path_blocks.push(x);
        }
        x = prev[x].unwrap();
    }
    path_blocks.reverse();
    Some(path_blocks)
}

/// Edge-deletion capacity sandwich: deleting edge `e` gives the lower
/// bound, the lower bound plus y_e the upper bound. The upper bound is
/// only quoted when every admittance component is at most 1.
#[derive(Clone, Copy, Debug)]
pub struct DeletionBounds {
    pub lower: f64,
    pub upper: Option<f64>,
}

pub fn deletion_bounds(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    u: usize,
    w: usize,
    e: usize,
) -> Result<DeletionBounds, SolveError> {
    if e >= g.edge_count() {
        return Err(GraphError::DimensionMismatch {
            got: e,
            want: g.edge_count(),
        }
        .into());
    }
    let mut deleted = y.values().to_vec();
    let ye = deleted[e];
    deleted[e] = 0.0;
    let yd = AdmittanceVector::new(g, deleted)?;
    let lower = capacity(g, &yd, u, w)?.lambda;
    let all_bounded = y.values().iter().all(|&v| v <= 1.0);
    let upper = if all_bounded { Some(lower + ye) } else { None };
    Ok(DeletionBounds { lower, upper })
}
