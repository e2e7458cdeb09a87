//! Spanning-tree polynomial T(G; y): sum over spanning trees of the
//! product of edge admittances, by explicit enumeration (exact oracle)
//! and as a reduced-Laplacian determinant.

use num::{BigInt, BigRational, One, Zero};

use super::graph::{graph_laplacian, AdmittanceVector, GraphError, OrientedGraph};
use crate::unionfind::UnionFind;

/// Default vertex bound for the exhaustive oracle.
pub const ENUM_VERTEX_BOUND: usize = 12;

/// Generic spanning-tree enumeration over any commutative semiring of
/// weights. Self-loops never appear in trees. Callers handle the
/// single-vertex graph (one empty tree) themselves.
fn enum_spanning_trees<T, F>(g: &OrientedGraph, weight: F) -> T
where
    T: Clone + Zero,
    F: Fn(usize) -> T,
    T: std::ops::Mul<Output = T>,
{
    let n = g.vertex_count();
    debug_assert!(n >= 2);
    let candidates: Vec<usize> = (0..g.edge_count())
        .filter(|&e| !g.edge(e).is_loop())
        .collect();
    let mut total = T::zero();
    let mut chosen: Vec<usize> = Vec::with_capacity(n - 1);
    enum_rec(g, &candidates, 0, n - 1, &mut chosen, &mut total, &weight);
    total
}

fn enum_rec<T, F>(
    g: &OrientedGraph,
    candidates: &[usize],
    start: usize,
    need: usize,
    chosen: &mut Vec<usize>,
    total: &mut T,
    weight: &F,
) where
    T: Clone + Zero + std::ops::Mul<Output = T>,
    F: Fn(usize) -> T,
{
    if need == 0 {
        // check acyclicity + spanning via union-find
        let mut uf = UnionFind::new(g.vertex_count());
        for &e in chosen.iter() {
            let edge = g.edge(e);
            if !uf.union(edge.tail, edge.head) {
                return;
            }
        }
        if uf.components() == 1 {
            let mut prod: Option<T> = None;
            for &e in chosen.iter() {
                prod = Some(match prod {
                    None => weight(e),
                    Some(p) => p * weight(e),
                });
            }
            let p = prod.expect("tree has at least one edge here");
            let acc = std::mem::replace(total, T::zero());
            *total = acc + p;
        }
        return;
    }
    if candidates.len() - start < need {
        return;
    }
    for i in start..candidates.len() {
        chosen.push(candidates[i]);
        enum_rec(g, candidates, i + 1, need - 1, chosen, total, weight);
        chosen.pop();
    }
}

fn check_enum_bound(g: &OrientedGraph, bound: usize) -> Result<(), GraphError> {
    if g.vertex_count() > bound {
        return Err(GraphError::TooLargeForEnumeration(g.vertex_count(), bound));
    }
    Ok(())
}

/// T(G; y) by exhaustive enumeration of spanning trees. Exact oracle;
/// rejects graphs above `ENUM_VERTEX_BOUND` vertices.
pub fn tree_polynomial_enum(g: &OrientedGraph, y: &AdmittanceVector) -> Result<f64, GraphError> {
    tree_polynomial_enum_bounded(g, y, ENUM_VERTEX_BOUND)
}

pub fn tree_polynomial_enum_bounded(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    bound: usize,
) -> Result<f64, GraphError> {
    check_enum_bound(g, bound)?;
    if y.values().len() != g.edge_count() {
        return Err(GraphError::DimensionMismatch {
            got: y.values().len(),
            want: g.edge_count(),
        });
    }
    if g.vertex_count() == 1 {
        return Ok(1.0);
    }
    Ok(enum_spanning_trees(g, |e| y.values()[e]))
}

/// Exact big-integer enumeration for integer weights.
pub fn tree_polynomial_enum_int(
    g: &OrientedGraph,
    weights: &[i64],
) -> Result<BigInt, GraphError> {
    check_enum_bound(g, ENUM_VERTEX_BOUND)?;
    if weights.len() != g.edge_count() {
        return Err(GraphError::DimensionMismatch {
            got: weights.len(),
            want: g.edge_count(),
        });
    }
    if g.vertex_count() == 1 {
        return Ok(BigInt::one());
    }
    Ok(enum_spanning_trees(g, |e| BigInt::from(weights[e])))
}

/// Exact rational enumeration, used by the block-pruning oracle tests.
pub fn tree_polynomial_enum_rational(
    g: &OrientedGraph,
    weights: &[BigRational],
) -> Result<BigRational, GraphError> {
    check_enum_bound(g, ENUM_VERTEX_BOUND)?;
    if weights.len() != g.edge_count() {
        return Err(GraphError::DimensionMismatch {
            got: weights.len(),
            want: g.edge_count(),
        });
    }
    if g.vertex_count() == 1 {
        return Ok(BigRational::one());
    }
    Ok(enum_spanning_trees(g, |e| weights[e].clone()))
}

/// T(G; y) as det L(v|v): the weighted Laplacian with row and column `v`
/// removed, via partial-pivoted LU. Returns 0 for disconnected support.
pub fn tree_polynomial_det(
    g: &OrientedGraph,
    y: &AdmittanceVector,
    v: usize,
) -> Result<f64, GraphError> {
    if v >= g.vertex_count() {
        return Err(GraphError::VertexOutOfRange(v, g.vertex_count()));
    }
    if y.values().len() != g.edge_count() {
        return Err(GraphError::DimensionMismatch {
            got: y.values().len(),
            want: g.edge_count(),
        });
    }
    if g.vertex_count() == 1 {
        return Ok(1.0);
    }
    let l = graph_laplacian(g, y);
    let reduced = l.clone().remove_row(v).remove_column(v);
    Ok(reduced.lu().determinant())
}

/// Exact capacity T(G;y)/T(G/uw;y) in rational arithmetic.
pub fn capacity_exact(
    g: &OrientedGraph,
    weights: &[BigRational],
    u: usize,
    w: usize,
) -> Result<BigRational, GraphError> {
    let contracted = g.contract(u, w)?;
    // Loops created by contraction get weight zero.
    let cweights: Vec<BigRational> = contracted
        .edges()
        .iter()
        .zip(weights.iter())
        .map(|(e, y)| {
            if e.is_loop() {
                BigRational::zero()
            } else {
                y.clone()
            }
        })
        .collect();
    let num = tree_polynomial_enum_rational(g, weights)?;
    let den = tree_polynomial_enum_rational(&contracted, &cweights)?;
    if den.is_zero() {
        return Err(GraphError::TerminalsDisconnected(u, w));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adm(g: &OrientedGraph, v: Vec<f64>) -> AdmittanceVector {
        AdmittanceVector::new(g, v).unwrap()
    }

    #[test]
    fn path_unique_tree() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2)]).unwrap();
        let y = adm(&g, vec![2.0, 3.0]);
        assert_eq!(tree_polynomial_enum(&g, &y).unwrap(), 6.0);
        for v in 0..3 {
            assert!((tree_polynomial_det(&g, &y, v).unwrap() - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_symbolic() {
        // weights (a, b, c) -> ab + bc + ca
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let (a, b, c) = (2.0, 5.0, 7.0);
        let y = adm(&g, vec![a, b, c]);
        let want = a * b + b * c + c * a;
        assert_eq!(tree_polynomial_enum(&g, &y).unwrap(), want);
    }

    #[test]
    fn triangle_unit_three_trees() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let y = AdmittanceVector::uniform(&g, 1.0);
        assert_eq!(tree_polynomial_enum(&g, &y).unwrap(), 3.0);
        assert!((tree_polynomial_det(&g, &y, 0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_edges_sum() {
        let g = OrientedGraph::with_edges(2, [(0, 1), (0, 1)]).unwrap();
        let y = adm(&g, vec![2.0, 3.0]);
        assert_eq!(tree_polynomial_enum(&g, &y).unwrap(), 5.0);
        assert!((tree_polynomial_det(&g, &y, 1).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn disconnected_graph_has_no_trees() {
        let g = OrientedGraph::new(2);
        let y = adm(&g, vec![]);
        assert_eq!(tree_polynomial_enum(&g, &y).unwrap(), 0.0);
        assert_eq!(tree_polynomial_det(&g, &y, 0).unwrap(), 0.0);
    }

    #[test]
    fn self_loops_are_excluded() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (1, 1)]).unwrap();
        let y = adm(&g, vec![2.0, 3.0, 0.0]);
        assert_eq!(tree_polynomial_enum(&g, &y).unwrap(), 6.0);
    }

    #[test]
    fn enumeration_bound_enforced() {
        let g = OrientedGraph::new(13);
        let y = adm(&g, vec![]);
        assert!(matches!(
            tree_polynomial_enum(&g, &y),
            Err(GraphError::TooLargeForEnumeration(13, _))
        ));
    }

    #[test]
    fn bigint_path_is_exact() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let t = tree_polynomial_enum_int(&g, &[3, 5, 7]).unwrap();
        assert_eq!(t, BigInt::from(3 * 5 + 5 * 7 + 7 * 3));
    }

    #[test]
    fn exact_capacity_triangle() {
        let g = OrientedGraph::with_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let one = BigRational::from(BigInt::from(1));
        let weights = vec![one.clone(), one.clone(), one.clone()];
        let cap = capacity_exact(&g, &weights, 0, 2).unwrap();
        assert_eq!(cap, BigRational::new(BigInt::from(3), BigInt::from(2)));
    }

    #[test]
    fn contraction_loop_law() {
        // T(G/uw) by contract + enum equals cofactor det after identifying u, w.
        let g = OrientedGraph::with_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let y = adm(&g, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let c = g.contract(0, 3).unwrap();
        let cy = AdmittanceVector::new(
            &c,
            c.edges()
                .iter()
                .zip(y.values())
                .map(|(e, &v)| if e.is_loop() { 0.0 } else { v })
                .collect(),
        )
        .unwrap();
        let by_enum = tree_polynomial_enum(&c, &cy).unwrap();
        let by_det = tree_polynomial_det(&c, &cy, 0).unwrap();
        assert!((by_enum - by_det).abs() < 1e-9 * by_enum);
    }
}
