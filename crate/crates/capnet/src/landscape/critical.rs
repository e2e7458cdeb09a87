//! Newton search for critical points from a regular seed grid, with
//! Hessian-inertia classification.

use nalgebra::DVector;

use super::{LandscapeError, Potential};

/// Eigenvalues with |λ| below this are treated as degenerate.
const DEGENERATE_EIG: f64 = 1e-8;
// generous cap: degenerate points slow Newton from quadratic to linear
const NEWTON_MAX_ITER: usize = 200;
const DEDUP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalKind {
    Minimum,
    Saddle,
    Maximum,
    /// index ≥ 2 but not a maximum (possible only in dimension ≥ 3)
    HigherIndex,
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub height: f64,
    pub kind: CriticalKind,
    /// sorted ascending
    pub hessian_eigs: Vec<f64>,
}

impl CriticalPoint {
    pub fn unstable_eigenvalue(&self) -> f64 {
        self.hessian_eigs[0]
    }
}

fn newton_from(p: &Potential, seed: &[f64]) -> Option<Vec<f64>> {
    let mut x = DVector::from_column_slice(seed);
    let diam: f64 = {
        let (lo, hi) = p.domain();
        (0..p.dim())
            .map(|a| (hi[a] - lo[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    for _ in 0..NEWTON_MAX_ITER {
        let xs = x.as_slice();
        let g = p.gradient(xs).ok()?;
        let h = p.hessian(xs).ok()?;
        let step = h.lu().solve(&g)?;
        if step.norm() > diam {
            return None; // diverging seed
        }
        x -= &step;
        if !p.contains(x.as_slice()) {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + x.norm()) {
            // converged; accept only if the gradient really vanished
            let g = p.gradient(x.as_slice()).ok()?;
            let scale = local_gradient_scale(p, x.as_slice());
            if g.norm() <= 1e-9 * scale {
                return Some(x.as_slice().to_vec());
            }
            return None;
        }
    }
    None
}

/// Newton refinement of a minimum from a grid argmin seed; None when
/// Newton diverges (the caller keeps the grid value).
pub(super) fn refine_minimum(p: &Potential, seed: &[f64]) -> Option<Vec<f64>> {
    newton_from(p, seed)
}

/// A reference gradient magnitude near `x`, used to make the
/// "gradient vanishes" test scale-free.
fn local_gradient_scale(p: &Potential, x: &[f64]) -> f64 {
    let (lo, hi) = p.domain();
    let mut scale = 1.0f64;
    for axis in 0..p.dim() {
        let h = 0.01 * (hi[axis] - lo[axis]);
        for dir in [-1.0, 1.0] {
            let mut probe = x.to_vec();
            probe[axis] += dir * h;
            if let Ok(g) = p.gradient(&probe) {
                scale = scale.max(g.norm());
            }
        }
    }
    scale
}

fn classify(p: &Potential, x: &[f64]) -> Result<(CriticalKind, Vec<f64>), LandscapeError> {
    let h = p.hessian(x)?;
    let mut eigs: Vec<f64> = h
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let kind = if eigs.iter().any(|e| e.abs() < DEGENERATE_EIG) {
        CriticalKind::Degenerate
    } else {
        let negatives = eigs.iter().filter(|e| **e < 0.0).count();
        match negatives {
            0 => CriticalKind::Minimum,
            1 => CriticalKind::Saddle,
            n if n == eigs.len() => CriticalKind::Maximum,
            _ => CriticalKind::HigherIndex,
        }
    };
    Ok((kind, eigs))
}

/// Newton iterations from `seeds_per_axis`ⁿ seeds, deduplicated within
/// 1e−6 and classified by Hessian inertia. Diverging seeds are dropped.
pub fn find_critical_points(
    p: &Potential,
    seeds_per_axis: usize,
) -> Result<Vec<CriticalPoint>, LandscapeError> {
    let (lo, hi) = p.domain();
    let dim = p.dim();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let total = seeds_per_axis.pow(dim as u32);
    for flat in 0..total {
        let mut seed = vec![0.0; dim];
        let mut rest = flat;
        for axis in 0..dim {
            let k = rest % seeds_per_axis;
            rest /= seeds_per_axis;
            seed[axis] = lo[axis] + (k as f64 + 0.5) / seeds_per_axis as f64 * (hi[axis] - lo[axis]);
        }
        if let Some(x) = newton_from(p, &seed) {
            let dup = found.iter().any(|y| {
                x.iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
                    < DEDUP_TOL
            });
            if !dup {
                found.push(x);
            }
        }
    }
    if found.is_empty() {
        return Err(LandscapeError::NoCriticalPoints);
    }
    let mut out = Vec::with_capacity(found.len());
    for x in found {
        let height = p.value(&x)?;
        let (kind, eigs) = classify(p, &x)?;
        out.push(CriticalPoint {
            location: x,
            height,
            kind,
            hessian_eigs: eigs,
        });
    }
    // deterministic order: by height, then lexicographic location
    out.sort_by(|a, b| {
        a.height
            .partial_cmp(&b.height)
            .unwrap()
            .then_with(|| a.location.partial_cmp(&b.location).unwrap())
    });
    Ok(out)
}
