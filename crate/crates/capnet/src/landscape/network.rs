//! Assembly of the electrical network: islands become vertices, relevant
//! saddles become edges with quadratic-profile admittances extracted from
//! the saddle Hessians.

use nalgebra::DMatrix;

use super::islands::{decompose_islands, unstable_direction, IslandDecomposition};
use super::{LandscapeError, Potential};
use crate::admittance::{
    admittance, Frame, Modulus, Profile1d, SaddleDescriptor, StableProfile,
};
use crate::logspace::LogVal;
use crate::net::graph::{LogAdmittance, OrientedGraph};
use crate::net::solve::{capacity_log, SolveError};

/// Eigenvalues this small make the quadratic profile model invalid.
const DEGENERATE_EIG: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct BuiltNetwork {
    pub graph: OrientedGraph,
    /// per-edge admittances with saddle heights measured relative to the
    /// communication level (the true admittance carries an extra factor
    /// e^{−level/ε}, reapplied by [`BuiltNetwork::capacity`])
    pub admittances: LogAdmittance,
    pub u: usize,
    pub w: usize,
    pub eps: f64,
    pub decomposition: IslandDecomposition,
    pub descriptors: Vec<Option<SaddleDescriptor>>,
}

impl BuiltNetwork {
    /// Network capacity prediction T(G;y)/T(G/uw;y) in log space, with
    /// the e^{−level/ε} normalization factor reapplied.
    pub fn capacity(&self) -> Result<LogVal, SolveError> {
        let normalized = capacity_log(&self.graph, &self.admittances, self.u, self.w)?;
        Ok(LogVal::from_ln(
            normalized.ln() - self.decomposition.level / self.eps,
        ))
    }

    /// Plain-f64 admittances of the normalized network (heights relative
    /// to the communication level keep these in double range for the ε
    /// used here).
    pub fn normalized_weights(&self) -> Vec<f64> {
        self.admittances.values().iter().map(|v| v.to_f64()).collect()
    }
}

/// Builds the network between the islands of `a` and `b`.
pub fn build_network(
    p: &Potential,
    a: &[f64],
    b: &[f64],
    delta: Option<f64>,
    eps: f64,
    grid_n: usize,
) -> Result<BuiltNetwork, LandscapeError> {
    let decomposition = decompose_islands(p, a, b, delta, grid_n)?;
    from_decomposition(p, decomposition, eps)
}

/// Network assembly from an existing decomposition (lets callers reuse
/// one decomposition across an ε sweep).
pub fn from_decomposition(
    p: &Potential,
    decomposition: IslandDecomposition,
    eps: f64,
) -> Result<BuiltNetwork, LandscapeError> {
    let n = decomposition.islands.len();
    let dim = p.dim();
    let mut graph = OrientedGraph::new(n);
    let mut weights = Vec::with_capacity(decomposition.saddles.len());
    let mut descriptors = Vec::with_capacity(decomposition.saddles.len());
    for sa in &decomposition.saddles {
        let c = &sa.saddle;
        // deterministic orientation: tail = lower island index
        let (tail, head) = if sa.neg_island <= sa.pos_island {
            (sa.neg_island, sa.pos_island)
        } else {
            (sa.pos_island, sa.neg_island)
        };
        graph
            .add_edge(tail, head)
            .expect("island indices are in range");
        if sa.is_loop() {
            // bridge touches a single island: zero admittance
            weights.push(LogVal::ZERO);
            descriptors.push(None);
            continue;
        }
        let eigs = &c.hessian_eigs;
        if eigs[0] >= -DEGENERATE_EIG || eigs[1..].iter().any(|l| *l <= DEGENERATE_EIG) {
            return Err(LandscapeError::DegenerateSaddle(c.location.clone()));
        }
        // frame columns: unstable eigenvector first, sign flipped so the
        // tail island lies on the negative axis
        let mut v1 = unstable_direction(p, c)?;
        if tail == sa.pos_island {
            for x in &mut v1 {
                *x = -*x;
            }
        }
        let rotation = frame_rotation(p, c, &v1)?;
        // profiles sampled from the true potential along the frame axes;
        // anharmonicity matters at the ε where capacities are queried
        let unstable = sampled_profile(
            p,
            &c.location,
            &v1,
            c.height,
            decomposition.delta,
            true,
            -eigs[0],
        )?;
        let mut stable_factors = Vec::with_capacity(dim - 1);
        for (k, l) in eigs[1..].iter().enumerate() {
            let dir: Vec<f64> = (0..dim).map(|r| rotation[(r, k + 1)]).collect();
            stable_factors.push(sampled_profile(
                p,
                &c.location,
                &dir,
                c.height,
                decomposition.delta,
                false,
                *l,
            )?);
        }
        let stable = StableProfile::separable(stable_factors);
        let frame = Frame::new(rotation, c.location.clone())?;
        let descriptor = SaddleDescriptor::new(
            c.height - decomposition.level,
            unstable,
            stable,
            frame,
            decomposition.delta,
            Modulus::default(),
        )?;
        weights.push(admittance(&descriptor, eps)?);
        descriptors.push(Some(descriptor));
        let _ = dim;
    }
    let admittances = LogAdmittance::new(&graph, weights).expect("weights match edges");
    Ok(BuiltNetwork {
        graph,
        admittances,
        u: decomposition.island_of_a,
        w: decomposition.island_of_b,
        eps,
        decomposition,
        descriptors,
    })
}

/// Tabulated profile of F along `dir` through the saddle: the drop
/// g(s) = F(z) − F(z+s·dir) on the unstable axis, the rise
/// G(s) = F(z+s·dir) − F(z) on a stable one. The sampling window shrinks
/// until the samples are convex; if none are, the quadratic model with
/// curvature `lambda` is used instead.
fn sampled_profile(
    p: &Potential,
    z: &[f64],
    dir: &[f64],
    f_z: f64,
    delta: f64,
    unstable: bool,
    lambda: f64,
) -> Result<Profile1d, LandscapeError> {
    const POINTS: usize = 33;
    let mut span = 3.0 * delta;
    for _ in 0..3 {
        let xs: Vec<f64> = (0..POINTS)
            .map(|i| span * (2.0 * i as f64 / (POINTS - 1) as f64 - 1.0))
            .collect();
        let mut vals = Vec::with_capacity(POINTS);
        let mut finite = true;
        for &s in &xs {
            let pt: Vec<f64> = z.iter().zip(dir).map(|(c, d)| c + s * d).collect();
            let v = p.value(&pt)?;
            let g = if unstable { f_z - v } else { v - f_z };
            if !g.is_finite() {
                finite = false;
                break;
            }
            vals.push(g);
        }
        if finite {
            if let Ok(prof) = Profile1d::tabulated(xs, vals) {
                return Ok(prof);
            }
        }
        span *= 0.5;
    }
    Ok(Profile1d::quadratic(lambda)?)
}

/// Orthonormal rotation whose first column is `v1` and whose remaining
/// columns are the stable Hessian eigenvectors.
fn frame_rotation(
    p: &Potential,
    c: &super::critical::CriticalPoint,
    v1: &[f64],
) -> Result<DMatrix<f64>, LandscapeError> {
    let dim = v1.len();
    let h = p.hessian(&c.location)?;
    let eig = h.symmetric_eigen();
    // order: most negative first, then ascending stable eigenvalues
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.sort_by(|a, b| eig.eigenvalues[*a].partial_cmp(&eig.eigenvalues[*b]).unwrap());
    let mut rot = DMatrix::zeros(dim, dim);
    for (col, &k) in idx.iter().enumerate() {
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        if col == 0 {
            v = v1.to_vec();
        } else if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            // deterministic sign for the stable directions
            if *first < 0.0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
        }
        for r in 0..dim {
            rot[(r, col)] = v[r];
        }
    }
    Ok(rot)
}
