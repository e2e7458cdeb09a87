//! Finite-difference ground truth for the capacity in 2D.
//!
//! Discretizes div(w∇h) = 0 with w = e^{−F/ε} on a cell-centered grid
//! (5-point stencil, geometric-mean edge weights), Dirichlet h = 1 on the
//! capacitor plate A and h = 0 on B, natural condition on the outer box,
//! and evaluates cap(A,B) = ε·Σ c_e(Δh)². The weight field is carried in
//! log space and normalized by its maximum; the normalization is
//! reapplied to the reported capacity, which is exponentially small.

use thiserror::Error;

use crate::landscape::{Grid, LandscapeError, Potential};
use crate::logspace::LogVal;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle grid must be two-dimensional")]
    NotTwoDimensional,
    #[error("mask {0} is empty")]
    EmptyMask(&'static str),
    #[error("masks A and B overlap or touch")]
    MasksTouch,
    #[error("conjugate gradient stalled at relative residual {residual:e} after {iters} iterations")]
    CgNoConvergence { residual: f64, iters: usize },
    #[error("cut segment does not cross any grid edge")]
    EmptyCut,
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
}

/// log-weights below max − CLAMP are clamped so no grid row vanishes
/// outright; the affected cells lie far above the communication level
/// and contribute nothing to the capacity.
const LNW_CLAMP: f64 = 600.0;
const CG_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mask {
    Free,
    A,
    B,
}

#[derive(Clone, Debug)]
pub struct GridProblem {
    pub grid: Grid,
    pub eps: f64,
    /// normalized log-weights at cell centers, max = 0
    lnw: Vec<f64>,
    /// subtracted maximum of the raw −F/ε field
    scale: f64,
    mask: Vec<Mask>,
}

impl GridProblem {
    /// Builds the problem for a potential: weights e^{−F/ε}, plates as
    /// balls of radius max(ε, 3 cells) around `a` and `b`. The grid is
    /// refined (doubled) until 3 cells fit inside radius ε.
    pub fn from_potential(
        p: &Potential,
        a: &[f64],
        b: &[f64],
        eps: f64,
        grid_n: usize,
    ) -> Result<GridProblem, OracleError> {
        if p.dim() != 2 {
            return Err(OracleError::NotTwoDimensional);
        }
        let (lo, hi) = p.domain();
        let mut n = grid_n;
        let cell_max = |n: usize| {
            (0..2)
                .map(|ax| (hi[ax] - lo[ax]) / n as f64)
                .fold(0.0f64, f64::max)
        };
        while 3.0 * cell_max(n) > eps && n < 4096 {
            n *= 2;
        }
        let grid = Grid::new(lo, hi, n);
        let radius = eps.max(3.0 * cell_max(n));
        let values = grid.sample(p)?;
        let lnw_raw: Vec<f64> = values.iter().map(|f| -f / eps).collect();
        let mask = (0..grid.len())
            .map(|i| {
                let c = grid.center(i);
                let da = dist(&c, a);
                let db = dist(&c, b);
                if da <= radius {
                    Mask::A
                } else if db <= radius {
                    Mask::B
                } else {
                    Mask::Free
                }
            })
            .collect();
        GridProblem::assemble(grid, eps, lnw_raw, mask)
    }

    /// Direct constructor from a raw log-weight field and explicit cell
    /// masks (true entries in `mask_a`/`mask_b` are plate cells).
    pub fn with_masks(
        grid: Grid,
        eps: f64,
        lnw_raw: Vec<f64>,
        mask_a: &[bool],
        mask_b: &[bool],
    ) -> Result<GridProblem, OracleError> {
        let mask = (0..grid.len())
            .map(|i| {
                if mask_a[i] {
                    Mask::A
                } else if mask_b[i] {
                    Mask::B
                } else {
                    Mask::Free
                }
            })
            .collect();
        GridProblem::assemble(grid, eps, lnw_raw, mask)
    }

    fn assemble(
        grid: Grid,
        eps: f64,
        lnw_raw: Vec<f64>,
        mask: Vec<Mask>,
    ) -> Result<GridProblem, OracleError> {
        if grid.dim() != 2 {
            return Err(OracleError::NotTwoDimensional);
        }
        let na = mask.iter().filter(|m| **m == Mask::A).count();
        let nb = mask.iter().filter(|m| **m == Mask::B).count();
        if na == 0 {
            return Err(OracleError::EmptyMask("A"));
        }
        if nb == 0 {
            return Err(OracleError::EmptyMask("B"));
        }
        // plates must not touch: no A cell adjacent to a B cell
        for i in 0..grid.len() {
            if mask[i] != Mask::A {
                continue;
            }
            for j in grid.neighbors(i) {
                if mask[j] == Mask::B {
                    return Err(OracleError::MasksTouch);
                }
            }
        }
        let m = lnw_raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lnw = lnw_raw
            .iter()
            .map(|v| (v - m).max(-LNW_CLAMP))
            .collect();
        Ok(GridProblem {
            grid,
            eps,
            lnw,
            scale: m,
            mask,
        })
    }

    /// Conductance of the edge between adjacent cells `i`, `j` in the
    /// normalized weights: geometric-mean weight times the metric factor
    /// (transverse cell size over edge length).
    fn conductance(&self, i: usize, j: usize, axis: usize) -> f64 {
        let hx = self.grid.cell[0];
        let hy = self.grid.cell[1];
        let metric = if axis == 0 { hy / hx } else { hx / hy };
        (0.5 * (self.lnw[i] + self.lnw[j])).exp() * metric
    }

    /// All grid edges as (low cell, high cell, axis).
    fn edges(&self) -> Vec<(usize, usize, usize)> {
        let (nx, ny) = (self.grid.dims[0], self.grid.dims[1]);
        let mut out = Vec::with_capacity(2 * nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                let i = self.grid.index(&[ix, iy]);
                if ix + 1 < nx {
                    out.push((i, self.grid.index(&[ix + 1, iy]), 0));
                }
                if iy + 1 < ny {
                    out.push((i, self.grid.index(&[ix, iy + 1]), 1));
                }
            }
        }
        out
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    /// cap(A,B) with the weight normalization reapplied (log space)
    pub capacity: LogVal,
    /// grid potential, 1 on A and 0 on B
    pub h: Vec<f64>,
    /// ε·(flux out of A) in normalized weight units
    pub flux_in: f64,
    /// ε·(flux into B) in normalized weight units
    pub flux_out: f64,
    /// normalized capacity ε·Σc(Δh)², same units as the fluxes
    pub energy: f64,
    /// final CG relative residual
    pub residual: f64,
    pub iterations: usize,
}

/// Solves the discrete Dirichlet problem and evaluates the capacity.
pub fn solve_capacity(gp: &GridProblem) -> Result<OracleResult, OracleError> {
    let n = gp.grid.len();
    // free-cell numbering
    let mut free_id = vec![usize::MAX; n];
    let mut free_cells = Vec::new();
    for i in 0..n {
        if gp.mask[i] == Mask::Free {
            free_id[i] = free_cells.len();
            free_cells.push(i);
        }
    }
    let nf = free_cells.len();
    let edges = gp.edges();
    // per-free-cell stencil: (neighbor free id or plate, conductance)
    let mut diag = vec![0.0f64; nf];
    let mut rhs = vec![0.0f64; nf];
    // adjacency in CSR-ish form
    let mut row_entries: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(4); nf];
    for &(i, j, axis) in &edges {
        let c = gp.conductance(i, j, axis);
        match (gp.mask[i], gp.mask[j]) {
            (Mask::Free, Mask::Free) => {
                let (fi, fj) = (free_id[i], free_id[j]);
                diag[fi] += c;
                diag[fj] += c;
                row_entries[fi].push((fj, c));
                row_entries[fj].push((fi, c));
            }
            (Mask::Free, plate) => {
                let fi = free_id[i];
                diag[fi] += c;
                if plate == Mask::A {
                    rhs[fi] += c;
                }
            }
            (plate, Mask::Free) => {
                let fj = free_id[j];
                diag[fj] += c;
                if plate == Mask::A {
                    rhs[fj] += c;
                }
            }
            _ => {}
        }
    }

    // Jacobi-preconditioned CG, fixed iteration order → deterministic
    let apply = |x: &[f64], out: &mut [f64]| {
        for fi in 0..nf {
            let mut acc = diag[fi] * x[fi];
            for &(fj, c) in &row_entries[fi] {
                acc -= c * x[fj];
            }
            out[fi] = acc;
        }
    };
    let mut x = vec![0.0f64; nf];
    let mut r = rhs.clone();
    let rhs_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut residual = 1.0;
    let mut iters = 0;
    if rhs_norm > 0.0 {
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, d)| ri / d).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0f64; nf];
        let max_iters = 50 * gp.grid.dims.iter().max().unwrap();
        for it in 0..max_iters {
            iters = it + 1;
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            let alpha = rz / pap;
            for k in 0..nf {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            residual = rn / rhs_norm;
            if residual <= CG_REL_TOL {
                break;
            }
            for k in 0..nf {
                z[k] = r[k] / diag[k];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..nf {
                p[k] = z[k] + beta * p[k];
            }
        }
        if residual > CG_REL_TOL {
            return Err(OracleError::CgNoConvergence {
                residual,
                iters,
            });
        }
    }

    // assemble the full field
    let mut h = vec![0.0f64; n];
    for i in 0..n {
        h[i] = match gp.mask[i] {
            Mask::A => 1.0,
            Mask::B => 0.0,
            Mask::Free => x[free_id[i]],
        };
    }

    // energy and plate fluxes
    let mut energy = 0.0f64;
    let mut flux_in = 0.0f64;
    let mut flux_out = 0.0f64;
    for &(i, j, axis) in &edges {
        let c = gp.conductance(i, j, axis);
        let dh = h[i] - h[j];
        energy += c * dh * dh;
        let crosses_a = (gp.mask[i] == Mask::A) != (gp.mask[j] == Mask::A);
        let crosses_b = (gp.mask[i] == Mask::B) != (gp.mask[j] == Mask::B);
        if crosses_a {
            // flux out of A: positive when h decreases away from A
            let out_of_a = if gp.mask[i] == Mask::A { dh } else { -dh };
            flux_in += c * out_of_a;
        }
        if crosses_b {
            let into_b = if gp.mask[j] == Mask::B { dh } else { -dh };
            flux_out += c * into_b;
        }
    }
    let energy = gp.eps * energy;
    let flux_in = gp.eps * flux_in;
    let flux_out = gp.eps * flux_out;
    Ok(OracleResult {
        capacity: LogVal::from_ln(energy.ln() + gp.scale),
        h,
        flux_in,
        flux_out,
        energy,
        residual,
        iterations: iters,
    })
}

/// Dual (Thompson) value of the current X = w∇h/cap constructed from the
/// primal solution, evaluated edge by edge: Σ j²/(ε·c). Equals
/// 1/capacity up to solver residual.
pub fn discrete_thompson(gp: &GridProblem, result: &OracleResult) -> LogVal {
    let mut dual = 0.0f64;
    for &(i, j, axis) in &gp.edges() {
        let c = gp.conductance(i, j, axis);
        if c == 0.0 {
            continue;
        }
        // normalized current through the edge, total plate flux 1
        let jn = gp.eps * c * (result.h[i] - result.h[j]) / result.energy;
        dual += jn * jn / (gp.eps * c);
    }
    LogVal::from_ln(dual.ln() - gp.scale)
}

/// Axis-aligned cut segment for measuring the current through one bridge:
/// crosses grid edges along `normal_axis` at coordinate `position`,
/// restricted to `range` on the transverse axis.
#[derive(Clone, Copy, Debug)]
pub struct CutSegment {
    pub normal_axis: usize,
    pub position: f64,
    pub range: (f64, f64),
}

/// Signed flux of the normalized unit-flux current through the cut
/// (positive along +normal_axis). For a cut through a single bridge this
/// is the edge current j(e).
pub fn edge_current(
    gp: &GridProblem,
    result: &OracleResult,
    cut: &CutSegment,
) -> Result<f64, OracleError> {
    let ax = cut.normal_axis;
    let tv = 1 - ax;
    let mut flux = 0.0f64;
    let mut crossed = 0usize;
    for &(i, j, axis) in &gp.edges() {
        if axis != ax {
            continue;
        }
        let ci = gp.grid.center(i);
        let cj = gp.grid.center(j);
        if !(ci[ax] < cut.position && cut.position <= cj[ax]) {
            continue;
        }
        let t = ci[tv];
        if t < cut.range.0 || t > cut.range.1 {
            continue;
        }
        crossed += 1;
        let c = gp.conductance(i, j, axis);
        flux += gp.eps * c * (result.h[i] - result.h[j]) / result.energy;
    }
    if crossed == 0 {
        return Err(OracleError::EmptyCut);
    }
    Ok(flux)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// F ≡ 0 strip: capacity of a W×L resistor is ε·W/L.
    #[test]
    fn flat_strip_resistor() {
        let (w, l) = (0.5f64, 2.0f64);
        let (nx, ny) = (200usize, 50usize);
        let grid = Grid::with_dims(&[0.0, 0.0], &[l, w], &[nx, ny]);
        let lnw = vec![0.0; grid.len()];
        let mut mask_a = vec![false; grid.len()];
        let mut mask_b = vec![false; grid.len()];
        for iy in 0..ny {
            mask_a[grid.index(&[0, iy])] = true;
            mask_b[grid.index(&[nx - 1, iy])] = true;
        }
        let eps = 0.1;
        let gp = GridProblem::with_masks(grid, eps, lnw, &mask_a, &mask_b).unwrap();
        let res = solve_capacity(&gp).unwrap();
        // plates occupy the outermost columns; the resistor length is the
        // distance between plate faces
        let l_eff = l * (nx as f64 - 1.0) / nx as f64;
        let want = eps * w / l_eff;
        let got = res.capacity.to_f64();
        assert!(
            ((got - want) / want).abs() < 1e-6,
            "{got} vs {want} (h should be exactly linear on a flat strip)"
        );
        // maximum principle and flux balance
        assert!(res.h.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        assert!((res.flux_in - res.flux_out).abs() <= 1e-6 * res.energy);
        assert!(((res.flux_in - res.energy) / res.energy).abs() < 1e-6);
        // dual identity
        let dual = discrete_thompson(&gp, &res);
        let product = (res.capacity.ln() + dual.ln()).exp();
        assert!((product - 1.0).abs() < 1e-6, "primal·dual = {product}");
        // all current crosses a mid-strip cut
        let cut = CutSegment {
            normal_axis: 0,
            position: l / 2.0,
            range: (0.0, w),
        };
        let j = edge_current(&gp, &res, &cut).unwrap();
        assert!((j - 1.0).abs() < 1e-6, "j = {j}");
    }

    #[test]
    fn touching_masks_rejected() {
        let grid = Grid::new(&[0.0, 0.0], &[1.0, 1.0], 4);
        let lnw = vec![0.0; grid.len()];
        let mut mask_a = vec![false; grid.len()];
        let mut mask_b = vec![false; grid.len()];
        mask_a[grid.index(&[1, 1])] = true;
        mask_b[grid.index(&[2, 1])] = true;
        assert!(matches!(
            GridProblem::with_masks(grid, 0.1, lnw, &mask_a, &mask_b),
            Err(OracleError::MasksTouch)
        ));
    }

    #[test]
    fn double_well_oracle_roughly_matches_prefactor() {
        use crate::dsl::parse;
        use std::collections::HashMap;
        let p = Potential::new(
            parse("(x^2-1)^2 + y^2").unwrap(),
            2,
            vec![-1.8, -1.4],
            vec![1.8, 1.4],
            HashMap::new(),
            10.0,
        )
        .unwrap();
        let eps = 0.1;
        let gp = GridProblem::from_potential(&p, &[-1.0, 0.0], &[1.0, 0.0], eps, 200).unwrap();
        let res = solve_capacity(&gp).unwrap();
        // Eyring–Kramers prefactor: y = ε√(|λ₁|/λ₂)e^{−1/ε} = ε√2·e^{−10}
        let want_ln = eps.ln() + 0.5 * 2.0f64.ln() - 1.0 / eps;
        let ratio = (res.capacity.ln() - want_ln).exp();
        assert!(
            (ratio - 1.0).abs() < 0.2,
            "oracle/network ratio at ε=0.1: {ratio}"
        );
        let dual = discrete_thompson(&gp, &res);
        let product = (res.capacity.ln() + dual.ln()).exp();
        assert!((product - 1.0).abs() < 1e-4);
    }
}
