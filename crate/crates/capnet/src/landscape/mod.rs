//! Landscape analysis: critical points, communication heights, island
//! decomposition, and assembly of the electrical network for a concrete
//! potential F on ℝ² or ℝ³.

mod critical;
mod grid;
mod islands;
mod network;

pub use critical::{find_critical_points, CriticalKind, CriticalPoint};
pub use grid::Grid;
pub use islands::{
    communication_height, communication_height_bracket, decompose_islands, Island,
    IslandDecomposition, SaddleAssignment,
};
pub use network::{build_network, from_decomposition, BuiltNetwork};

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::admittance::AdmittanceError;
use crate::dsl::{differentiate, eval, EvalError, Expr, Var};

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("dimension {0} not supported (2 or 3 required)")]
    UnsupportedDimension(usize),
    #[error("expression uses `{0}` but the declared dimension is {1}")]
    VariableOutOfDimension(&'static str, usize),
    #[error("unbound parameter `{0}`")]
    UnboundParam(String),
    #[error("domain box is empty or inverted on axis {0}")]
    EmptyBox(usize),
    #[error("quadratic growth violated at boundary point {point:?}: F = {value} < {bound}")]
    GrowthViolated {
        point: Vec<f64>,
        value: f64,
        bound: f64,
    },
    #[error("evaluation failed at {point:?}: {source}")]
    Eval {
        point: Vec<f64>,
        source: EvalError,
    },
    #[error("point {0:?} lies outside the domain box")]
    OutsideDomain(Vec<f64>),
    #[error("no critical points found from the seed grid")]
    NoCriticalPoints,
    #[error("terminals are not connected below the top of the level bracket")]
    TerminalsSeparated,
    #[error("terminals fall in the same island; capacity query is degenerate")]
    DegenerateQuery,
    #[error(
        "saddle at {location:?} is branching: its bridge touches islands {islands:?}"
    )]
    BranchingSaddle {
        location: Vec<f64>,
        islands: Vec<usize>,
    },
    #[error("degenerate saddle at {0:?} requires explicit profiles")]
    DegenerateSaddle(Vec<f64>),
    #[error("gradient descent from {0:?} failed to reach an island")]
    DescentFailed(Vec<f64>),
    #[error("bridges of saddles {0:?} and {1:?} overlap; decrease delta below {2}")]
    BridgesOverlap(Vec<f64>, Vec<f64>, f64),
    #[error("delta must be positive, got {0}")]
    BadDelta(f64),
    #[error(transparent)]
    Admittance(#[from] AdmittanceError),
}

/// A potential with symbolic gradient and Hessian, a domain box, and the
/// growth constant used for the sampled admissibility check.
#[derive(Clone, Debug)]
pub struct Potential {
    expr: Expr,
    grad: Vec<Expr>,
    hess: Vec<Vec<Expr>>,
    params: HashMap<String, f64>,
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    growth_c0: f64,
    /// true when a derivative passes through an abs/min/max kink
    kink_warned: bool,
}

impl Potential {
    pub fn new(
        expr: Expr,
        dim: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        params: HashMap<String, f64>,
        growth_c0: f64,
    ) -> Result<Potential, LandscapeError> {
        if !(2..=3).contains(&dim) {
            return Err(LandscapeError::UnsupportedDimension(dim));
        }
        assert_eq!(lo.len(), dim);
        assert_eq!(hi.len(), dim);
        for axis in 0..dim {
            if !(lo[axis] < hi[axis]) {
                return Err(LandscapeError::EmptyBox(axis));
            }
        }
        for v in expr.free_vars() {
            if v.index() >= dim {
                return Err(LandscapeError::VariableOutOfDimension(v.name(), dim));
            }
        }
        for p in expr.params() {
            if !params.contains_key(&p) {
                return Err(LandscapeError::UnboundParam(p));
            }
        }
        let mut kink_warned = false;
        let grad: Vec<Expr> = (0..dim)
            .map(|i| {
                let d = differentiate(&expr, Var::from_index(i));
                kink_warned |= d.kink;
                d.expr
            })
            .collect();
        let hess: Vec<Vec<Expr>> = grad
            .iter()
            .map(|gi| {
                (0..dim)
                    .map(|j| {
                        let d = differentiate(gi, Var::from_index(j));
                        kink_warned |= d.kink;
                        d.expr
                    })
                    .collect()
            })
            .collect();
        let p = Potential {
            expr,
            grad,
            hess,
            params,
            dim,
            lo,
            hi,
            growth_c0,
            kink_warned,
        };
        p.check_growth()?;
        Ok(p)
    }

    /// Samples F ≥ |x|²/C₀ − C₀ on the boundary of the domain box.
    fn check_growth(&self) -> Result<(), LandscapeError> {
        const SAMPLES: usize = 16;
        // all boundary faces: fix one axis at lo/hi, sample the rest
        for axis in 0..self.dim {
            for &fixed in &[self.lo[axis], self.hi[axis]] {
                let mut points = vec![vec![0.0; self.dim]];
                for other in 0..self.dim {
                    let mut next = Vec::new();
                    for pt in &points {
                        if other == axis {
                            let mut p = pt.clone();
                            p[axis] = fixed;
                            next.push(p);
                        } else {
                            for k in 0..SAMPLES {
                                let t = (k as f64 + 0.5) / SAMPLES as f64;
                                let mut p = pt.clone();
                                p[other] = self.lo[other] + t * (self.hi[other] - self.lo[other]);
                                next.push(p);
                            }
                        }
                    }
                    points = next;
                }
                for pt in points {
                    let v = self.value(&pt)?;
                    let r2: f64 = pt.iter().map(|c| c * c).sum();
                    let bound = r2 / self.growth_c0 - self.growth_c0;
                    if v < bound {
                        return Err(LandscapeError::GrowthViolated {
                            point: pt,
                            value: v,
                            bound,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn kink_warned(&self) -> bool {
        self.kink_warned
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && (0..self.dim).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, LandscapeError> {
        eval(&self.expr, x, &self.params).map_err(|source| LandscapeError::Eval {
            point: x.to_vec(),
            source,
        })
    }

    pub fn gradient(&self, x: &[f64]) -> Result<DVector<f64>, LandscapeError> {
        let mut out = DVector::zeros(self.dim);
        for i in 0..self.dim {
            out[i] = eval(&self.grad[i], x, &self.params).map_err(|source| {
                LandscapeError::Eval {
                    point: x.to_vec(),
                    source,
                }
            })?;
        }
        Ok(out)
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>, LandscapeError> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = eval(&self.hess[i][j], x, &self.params).map_err(|source| {
                    LandscapeError::Eval {
                        point: x.to_vec(),
                        source,
                    }
                })?;
            }
        }
        // symmetrize against round-off in the two mixed partials
        let t = out.transpose();
        Ok((out + t) * 0.5)
    }
}
