//! Kirchhoff voltage, discrete Dirichlet capacity and the dual current
//! problem on an electrical network.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::graph::{graph_laplacian, AdmittanceVector, GraphError, LogAdmittance, OrientedGraph};
use crate::logspace::LogVal;
use crate::unionfind::UnionFind;

/// Above this size the grounded system is solved by Jacobi-preconditioned
/// conjugate gradients instead of a dense factorization.
pub const DENSE_SOLVE_LIMIT: usize = 500;

const CG_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("reduced Laplacian is singular: terminals {0} and {1} see no positive-weight path")]
    SingularSystem(usize, usize),
    #[error("conjugate gradient did not reach tolerance ({residual:.3e} after {iterations} iterations)")]
    CgStalled { residual: f64, iterations: usize },
    #[error("edge {0} must carry current but has zero admittance")]
    ZeroAdmittanceCurrent(usize),
}

/// Solution of the capacity problem between two terminals.
///
/// `phi` is the capacitary potential (1 at the source, 0 at the sink);
/// `current` is the edge current of the dual problem, positive in the
/// direction of net flow from source to sink along each edge's
/// orientation, normalized to unit total flux.
#[derive(Clone, Debug)]
pub struct NetworkSolution {
    pub lambda: f64,
    pub phi: Option<Vec<f64>>,
    pub current: Option<Vec<f64>>,
}

/// Solves L(u|u) x = rhs(u removed) and re-inserts the grounded entry.
fn grounded_solve(
    l: &DMatrix<f64>,
    grounded: usize,
    rhs: &DVector<f64>,
    u: usize,
    w: usize,
) -> Result<DVector<f64>, SolveError> {
    let n = l.nrows();
    let lr = l.clone().remove_row(grounded).remove_column(grounded);
    let rr = rhs.clone().remove_row(grounded);
    let xr = if n - 1 <= DENSE_SOLVE_LIMIT {
        lr.clone()
            .lu()
            .solve(&rr)
            .ok_or(SolveError::SingularSystem(u, w))?
    } else {
        jacobi_cg(&lr, &rr)?
    };
    // Residual check guards near-singular partial-pivot solves.
    let res = (&lr * &xr - &rr).norm();
    let scale = rr.norm().max(1.0);
    if !res.is_finite() || res > 1e-6 * scale {
        return Err(SolveError::SingularSystem(u, w));
    }
    let mut x = DVector::zeros(n);
    let mut k = 0;
    for i in 0..n {
        if i == grounded {
            continue;
        }
        x[i] = xr[k];
        k += 1;
    }
    Ok(x)
}

fn jacobi_cg(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, SolveError> {
    let n = a.nrows();
    let diag: DVector<f64> = a.diagonal().map(|d| if d > 0.0 { 1.0 / d } else { 1.0 });
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let mut z = diag.component_mul(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let bnorm = b.norm().max(f64::MIN_POSITIVE);
    let max_iter = 50 * n;
    for it in 0..max_iter {
        if r.norm() <= CG_TOL * bnorm {
            return Ok(x);
        }
        let ap = a * &p;
        let alpha = rz / p.dot(&ap);
        x += alpha * &p;
        r -= alpha * &ap;
        z = diag.component_mul(&r);
        let rz_new = r.dot(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        p = &z + beta * &p;
        if it == max_iter - 1 {
            break;
        }
    }
    if r.norm() <= CG_TOL * bnorm {
        Ok(x)
    } else {
        Err(SolveError::CgStalled {
            residual: r.norm() / bnorm,
            iterations: max_iter,
        })
    }
}

/// Restriction of the network to the support component containing `u`:
/// vertices unreachable from `u` through positive-weight edges would
/// make the grounded Laplacian singular without affecting the capacity.
struct Restriction {
    graph: OrientedGraph,
    y: AdmittanceVector,
    /// old vertex id → new id inside the component
    map: Vec<Option<usize>>,
}

fn restrict_to_component(g: &OrientedGraph, y: &AdmittanceVector, u: usize) -> Restriction {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    for (e, edge) in g.edges().iter().enumerate() {
        if y.values()[e] > 0.0 && !edge.is_loop() {
            uf.union(edge.tail, edge.head);
        }
    }
    let mut map = vec![None; n];
    let mut count = 0;
    for v in 0..n {
        if uf.connected(u, v) {
            map[v] = Some(count);
            count += 1;
        }
    }
    let mut graph = OrientedGraph::new(count);
    let mut values = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        if edge.is_loop() {
            continue;
        }
        if let (Some(t), Some(h)) = (map[edge.tail], map[edge.head]) {
            graph.add_edge(t, h).expect("mapped ids in range");
            values.push(y.values()[e]);
        }
    }
    let y = AdmittanceVector::new(&graph, values).expect("weights stay valid");
    Restriction { graph, y, map }
}

/// Kirchhoff voltage: grounds `u`, pushes unit current through `w` and
/// returns the voltage there, which equals T(G/uw;y)/T(G;y).
pub fn kirchhoff_voltage(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    u: usize,
    w: usize,
) -> Result<f64, SolveError> {
    if u == w {
        return Err(GraphError::ContractSameVertex(u).into());
    }
    for &v in &[u, w] {
        if v >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange(v, g.vertex_count()).into());
        }
    }
    if !g.connected_in_support(y, u, w) {
        return Err(GraphError::TerminalsDisconnected(u, w).into());
    }
    let r = restrict_to_component(g, y, u);
    let (ru, rw) = (r.map[u].unwrap(), r.map[w].unwrap());
    let l = graph_laplacian(&r.graph, &r.y);
    let mut rhs = DVector::zeros(r.graph.vertex_count());
    rhs[rw] = 1.0;
    let phi = grounded_solve(&l, ru, &rhs, ru, rw)?;
    Ok(phi[rw])
}

/// Discrete Dirichlet capacity between `u` (potential 1) and `w`
/// (potential 0). Disconnected terminals give lambda = 0 with the
/// potential left undefined.
pub fn capacity(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    u: usize,
    w: usize,
) -> Result<NetworkSolution, SolveError> {
    if u == w {
        return Err(GraphError::ContractSameVertex(u).into());
    }
    for &v in &[u, w] {
        if v >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange(v, g.vertex_count()).into());
        }
    }
    if !g.connected_in_support(y, u, w) {
        return Ok(NetworkSolution {
            lambda: 0.0,
            phi: None,
            current: None,
        });
    }
    let r = restrict_to_component(g, y, u);
    let (ru, rw) = (r.map[u].unwrap(), r.map[w].unwrap());
    let l = graph_laplacian(&r.graph, &r.y);
    let mut rhs = DVector::zeros(r.graph.vertex_count());
    rhs[rw] = 1.0;
    // Grounded-at-u solve of L psi = delta_w gives psi with psi_w = voltage;
    // the capacitary potential is phi = 1 - psi / voltage.
    let psi = grounded_solve(&l, ru, &rhs, ru, rw)?;
    let voltage = psi[rw];
    let lambda = 1.0 / voltage;
    // vertices outside the terminal component carry no current; ground them
    let phi: Vec<f64> = r
        .map
        .iter()
        .map(|m| match m {
            Some(nv) => 1.0 - psi[*nv] / voltage,
            None => 0.0,
        })
        .collect();
    let current = currents_from_phi(g, y, &phi, lambda);
    Ok(NetworkSolution {
        lambda,
        phi: Some(phi),
        current: Some(current),
    })
}

/// j_e = y_e (phi_tail - phi_head) / lambda: the unit-flux current of
/// the dual (Thompson) problem.
fn currents_from_phi(g: &OrientedGraph, y: &AdmittanceVector, phi: &[f64], lambda: f64) -> Vec<f64> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            if edge.is_loop() {
                0.0
            } else {
                y.values()[e] * (phi[edge.tail] - phi[edge.head]) / lambda
            }
        })
        .collect()
}

/// Solves the dual current problem. The minimizing current is recovered
/// in closed form from the capacitary potential; the reported dual value
/// `<Y^{-1} j, j>` equals `1 / lambda`.
pub fn dual_current(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    u: usize,
    w: usize,
) -> Result<(NetworkSolution, f64), SolveError> {
    let sol = capacity(g, y, u, w)?;
    let current = sol
        .current
        .as_ref()
        .ok_or(GraphError::TerminalsDisconnected(u, w))?;
    let mut dual = 0.0;
    for (e, &j) in current.iter().enumerate() {
        let ye = y.values()[e];
        if j != 0.0 {
            if ye == 0.0 {
                return Err(SolveError::ZeroAdmittanceCurrent(e));
            }
            dual += j * j / ye;
        }
    }
    Ok((sol, dual))
}

/// Net divergence D j at every vertex; equals delta_w - delta_u for a
/// unit flux from u to w.
pub fn current_divergence(g: &OrientedGraph, current: &[f64]) -> Vec<f64> {
    let mut div = vec![0.0; g.vertex_count()];
    for (e, edge) in g.edges().iter().enumerate() {
        if edge.is_loop() {
            continue;
        }
        div[edge.head] += current[e];
        div[edge.tail] -= current[e];
    }
    div
}

/// Capacity for log-space admittances: the common scale of the largest
/// weight is factored out, the T-ratio computed on the normalized
/// weights, and the scale reapplied (the ratio is homogeneous of
/// degree one in y).
pub fn capacity_log(
    g: &OrientedGraph,
    ly: &LogAdmittance,
    u: usize,
    w: usize,
) -> Result<LogVal, SolveError> {
    for &v in &[u, w] {
        if v >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange(v, g.vertex_count()).into());
        }
    }
    let (y, scale) = ly.normalized(g);
    if !g.connected_in_support(&y, u, w) {
        return Ok(LogVal::ZERO);
    }
    let voltage = kirchhoff_voltage(g, &y, u, w)?;
    Ok(LogVal::from_ln(-voltage.ln() + scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adm(g: &OrientedGraph, v: Vec<f64>) -> AdmittanceVector {
        AdmittanceVector::new(g, v).unwrap()
    }

    #[test]
    fn single_edge_ohms_law() {
        let g = OrientedGraph::with_edges(2, [(0, 1)]).unwrap();
        let y = adm(&g, vec![4.0]);
        let v = kirchhoff_voltage(&g, &y, 0, 1).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
        let (sol, dual) = dual_current(&g, &y, 0, 1).unwrap();
        assert!((sol.lambda - 4.0).abs() < 1e-12);
        assert!((sol.current.as_ref().unwrap()[0] - 1.0).abs() < 1e-12);
        assert!((dual - 0.25).abs() < 1e-14);
    }

    #[test]
    fn series_resistances_add() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2)]).unwrap();
        let (y1, y2) = (2.0, 3.0);
        let y = adm(&g, vec![y1, y2]);
        let v = kirchhoff_voltage(&g, &y, 0, 2).unwrap();
        assert!((v - (1.0 / y1 + 1.0 / y2)).abs() < 1e-14);
        let (sol, dual) = dual_current(&g, &y, 0, 2).unwrap();
        assert!((sol.lambda - y1 * y2 / (y1 + y2)).abs() < 1e-12);
        // unit current through both edges
        let j = sol.current.as_ref().unwrap();
        assert!((j[0] - 1.0).abs() < 1e-12);
        assert!((j[1] - 1.0).abs() < 1e-12);
        assert!((dual - (1.0 / y1 + 1.0 / y2)).abs() < 1e-12);
    }

    #[test]
    fn parallel_conductances_add() {
        let g = OrientedGraph::with_edges(2, [(0, 1), (0, 1)]).unwrap();
        let (y1, y2) = (2.0, 5.0);
        let y = adm(&g, vec![y1, y2]);
        let sol = capacity(&g, &y, 0, 1).unwrap();
        assert!((sol.lambda - (y1 + y2)).abs() < 1e-12);
        // current divider
        let j = sol.current.as_ref().unwrap();
        assert!((j[0] - y1 / (y1 + y2)).abs() < 1e-12);
        assert!((j[1] - y2 / (y1 + y2)).abs() < 1e-12);
    }

    #[test]
    fn triangle_unit_capacity() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let y = AdmittanceVector::uniform(&g, 1.0);
        let v = kirchhoff_voltage(&g, &y, 0, 2).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        let sol = capacity(&g, &y, 0, 2).unwrap();
        assert!((sol.lambda - 1.5).abs() < 1e-12);
    }

    #[test]
    fn maximum_principle_and_current_law() {
        let g =
            OrientedGraph::with_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 4), (2, 4)])
                .unwrap();
        let y = adm(&g, vec![0.3, 1.1, 0.7, 2.0, 0.5, 0.9, 1.3]);
        let sol = capacity(&g, &y, 0, 4).unwrap();
        let phi = sol.phi.as_ref().unwrap();
        assert!((phi[0] - 1.0).abs() < 1e-12);
        assert!(phi[4].abs() < 1e-12);
        for &p in phi {
            assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        }
        let div = current_divergence(&g, sol.current.as_ref().unwrap());
        for (v, &d) in div.iter().enumerate() {
            let want = if v == 0 {
                -1.0
            } else if v == 4 {
                1.0
            } else {
                0.0
            };
            assert!((d - want).abs() < 1e-10, "vertex {v}: {d}");
        }
    }

    #[test]
    fn disconnected_terminals_flagged() {
        let g = OrientedGraph::with_edges(4, [(0, 1), (2, 3)]).unwrap();
        let y = AdmittanceVector::uniform(&g, 1.0);
        let sol = capacity(&g, &y, 0, 3).unwrap();
        assert_eq!(sol.lambda, 0.0);
        assert!(sol.phi.is_none());
        assert!(matches!(
            kirchhoff_voltage(&g, &y, 0, 3),
            Err(SolveError::Graph(GraphError::TerminalsDisconnected(0, 3)))
        ));
    }

    #[test]
    fn zero_weight_edges_excluded_from_connectivity() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2)]).unwrap();
        let y = adm(&g, vec![1.0, 0.0]);
        let sol = capacity(&g, &y, 0, 2).unwrap();
        assert_eq!(sol.lambda, 0.0);
    }

    #[test]
    fn log_space_capacity_matches_plain() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let y = adm(&g, vec![0.5, 0.25, 0.125]);
        let plain = capacity(&g, &y, 0, 2).unwrap().lambda;
        let ly = LogAdmittance::new(
            &g,
            y.values().iter().map(|&v| LogVal::from_f64(v)).collect(),
        )
        .unwrap();
        let lv = capacity_log(&g, &ly, 0, 2).unwrap();
        assert!((lv.to_f64() - plain).abs() < 1e-12 * plain);
    }

    #[test]
    fn log_space_capacity_underflow_scale() {
        // series pair with weights e^{-900} and 2 e^{-900}: capacity
        // (2/3) e^{-900}, far below f64 range.
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2)]).unwrap();
        let ly = LogAdmittance::new(
            &g,
            vec![
                LogVal::from_ln(-900.0),
                LogVal::from_ln(-900.0 + 2f64.ln()),
            ],
        )
        .unwrap();
        let lv = capacity_log(&g, &ly, 0, 2).unwrap();
        let want_ln = (2.0f64 / 3.0).ln() - 900.0;
        assert!((lv.ln() - want_ln).abs() < 1e-10);
    }

    #[test]
    fn large_graph_uses_cg_path() {
        // path with 600 vertices, unit weights: voltage = 599
        let n = 600;
        let g = OrientedGraph::with_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        let y = AdmittanceVector::uniform(&g, 1.0);
        let v = kirchhoff_voltage(&g, &y, 0, n - 1).unwrap();
        assert!((v - (n - 1) as f64).abs() < 1e-6);
    }

    #[test]
    fn homogeneity_in_weights() {
        let g = OrientedGraph::with_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)]).unwrap();
        let y = adm(&g, vec![0.9, 0.4, 1.7, 0.2, 0.6]);
        let c = 3.7;
        let a = capacity(&g, &y, 0, 2).unwrap().lambda;
        let b = capacity(&g, &y.scaled(c), 0, 2).unwrap().lambda;
        assert!((b - c * a).abs() < 1e-10 * b.abs());
    }
}
