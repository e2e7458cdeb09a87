//! Communication heights and island decomposition on a sublevel-set grid.
//!
//! Connectivity of the open sublevel set {F < h} is decided on cell
//! centers with strict inequality, 4-neighbor in 2D and 6-neighbor in 3D.

use super::critical::{find_critical_points, CriticalKind, CriticalPoint};
use super::grid::Grid;
use super::{LandscapeError, Potential};
use crate::unionfind::UnionFind;

/// Relative tolerance of the level bisection.
const LEVEL_TOL: f64 = 1e-6;
/// Seed density for the internal critical-point search.
const SEEDS_2D: usize = 28;
const SEEDS_3D: usize = 9;

#[derive(Clone, Debug)]
pub struct Island {
    pub cell_count: usize,
    pub min_location: Vec<f64>,
    pub min_height: f64,
    /// more than one grid cell attained the island minimum; the
    /// lexicographically lowest was chosen
    pub plateau: bool,
}

#[derive(Clone, Debug)]
pub struct SaddleAssignment {
    pub saddle: CriticalPoint,
    /// island reached by descending along −v₁ (v₁ = unstable direction)
    pub neg_island: usize,
    /// island reached along +v₁
    pub pos_island: usize,
}

impl SaddleAssignment {
    pub fn is_loop(&self) -> bool {
        self.neg_island == self.pos_island
    }
}

#[derive(Clone, Debug)]
pub struct IslandDecomposition {
    /// F(x_u; x_w), the communication height
    pub level: f64,
    pub delta: f64,
    pub islands: Vec<Island>,
    pub saddles: Vec<SaddleAssignment>,
    pub island_of_a: usize,
    pub island_of_b: usize,
    pub grid_n: usize,
}

fn check_in_domain(p: &Potential, x: &[f64]) -> Result<(), LandscapeError> {
    if !p.contains(x) {
        return Err(LandscapeError::OutsideDomain(x.to_vec()));
    }
    Ok(())
}

/// Union-find over cells of the strict sublevel set {F < h}.
fn sublevel_components(grid: &Grid, values: &[f64], h: f64) -> UnionFind {
    let mut uf = UnionFind::new(grid.len());
    for i in 0..grid.len() {
        if values[i] >= h {
            continue;
        }
        for j in grid.neighbors(i) {
            if j > i && values[j] < h {
                uf.union(i, j);
            }
        }
    }
    uf
}

fn connected_at(grid: &Grid, values: &[f64], h: f64, ia: usize, ib: usize) -> bool {
    if values[ia] >= h || values[ib] >= h {
        return false;
    }
    let mut uf = sublevel_components(grid, values, h);
    uf.find(ia) == uf.find(ib)
}

/// Bisection bracket [h_lo, h_hi] around the communication height: the
/// sublevel set connects `a` and `b` at h_hi but not at h_lo.
pub fn communication_height_bracket(
    p: &Potential,
    a: &[f64],
    b: &[f64],
    grid_n: usize,
) -> Result<(f64, f64), LandscapeError> {
    check_in_domain(p, a)?;
    check_in_domain(p, b)?;
    let fa = p.value(a)?;
    let fb = p.value(b)?;
    if a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12) {
        return Ok((fa, fa));
    }
    let (lo_box, hi_box) = p.domain();
    let grid = Grid::new(lo_box, hi_box, grid_n);
    let values = grid.sample(p)?;
    let ia = grid.locate(a);
    let ib = grid.locate(b);
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = (vmax - vmin).max(1.0);
    let mut lo = fa.max(fb).max(values[ia]).max(values[ib]);
    let mut hi = vmax + 1e-3 * scale;
    if !connected_at(&grid, &values, hi, ia, ib) {
        return Err(LandscapeError::TerminalsSeparated);
    }
    if connected_at(&grid, &values, lo, ia, ib) {
        // already connected at the floor (nested sublevel sets)
        return Ok((lo, lo));
    }
    while hi - lo > LEVEL_TOL * scale {
        let mid = 0.5 * (lo + hi);
        if connected_at(&grid, &values, mid, ia, ib) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Midpoint of [`communication_height_bracket`].
pub fn communication_height(
    p: &Potential,
    a: &[f64],
    b: &[f64],
    grid_n: usize,
) -> Result<f64, LandscapeError> {
    let (lo, hi) = communication_height_bracket(p, a, b, grid_n)?;
    Ok(0.5 * (lo + hi))
}

/// Steepest descent from `start` until the potential drops below
/// `target` and the current grid cell carries an island label.
fn descend_to_island(
    p: &Potential,
    grid: &Grid,
    labels: &[Option<usize>],
    start: &[f64],
    target: f64,
) -> Result<usize, LandscapeError> {
    let step0 = grid.cell.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut x = start.to_vec();
    let mut fx = p.value(&x)?;
    let max_steps = 200 * grid.dims.iter().max().unwrap();
    for _ in 0..max_steps {
        if fx < target {
            if let Some(label) = labels[grid.locate(&x)] {
                return Ok(label);
            }
        }
        let g = p.gradient(&x)?;
        let gn = g.norm();
        if gn < 1e-14 {
            break; // stuck at a critical point above the target level
        }
        let mut step = step0;
        loop {
            let cand: Vec<f64> = x
                .iter()
                .zip(g.iter())
                .map(|(xi, gi)| xi - step * gi / gn)
                .collect();
            if p.contains(&cand) {
                if let Ok(fc) = p.value(&cand) {
                    if fc < fx {
                        x = cand;
                        fx = fc;
                        break;
                    }
                }
            }
            step *= 0.5;
            if step < 1e-12 * step0 {
                return Err(LandscapeError::DescentFailed(start.to_vec()));
            }
        }
    }
    Err(LandscapeError::DescentFailed(start.to_vec()))
}

struct Labeled {
    grid: Grid,
    labels: Vec<Option<usize>>,
    islands: Vec<Island>,
    island_of_a: usize,
    island_of_b: usize,
}

/// Labels the islands (components of {F < level − δ/3} inside the
/// {F < level + δ/3} component of a and b) on the given grid. Returns
/// None when grid error puts a and b in different δ/3-components —
/// the caller retries on a finer grid.
#[allow(clippy::too_many_arguments)]
fn label_islands(
    p: &Potential,
    a: &[f64],
    b: &[f64],
    level: f64,
    delta: f64,
    grid_n: usize,
) -> Result<Option<Labeled>, LandscapeError> {
    let (lo_box, hi_box) = p.domain();
    let grid = Grid::new(lo_box, hi_box, grid_n);
    let values = grid.sample(p)?;
    let ia = grid.locate(a);
    let ib = grid.locate(b);
    let upper = level + delta / 3.0;
    let lower = level - delta / 3.0;
    let mut uf = sublevel_components(&grid, &values, upper);
    if values[ia] >= upper || values[ib] >= upper || uf.find(ia) != uf.find(ib) {
        return Ok(None);
    }
    let component = uf.find(ia);
    // flood-fill components of {F < lower} restricted to the component
    let mut sub = sublevel_components(&grid, &values, lower);
    let mut label_of_root: std::collections::HashMap<usize, usize> =
        std::collections::HashMap::new();
    let mut labels: Vec<Option<usize>> = vec![None; grid.len()];
    let mut islands: Vec<Island> = Vec::new();
    // first pass in flat-index order fixes a deterministic label order
    for i in 0..grid.len() {
        if values[i] >= lower || uf.find(i) != component {
            continue;
        }
        let root = sub.find(i);
        let label = *label_of_root.entry(root).or_insert_with(|| {
            islands.push(Island {
                cell_count: 0,
                min_location: grid.center(i),
                min_height: values[i],
                plateau: false,
            });
            islands.len() - 1
        });
        labels[i] = Some(label);
        let isl = &mut islands[label];
        isl.cell_count += 1;
        if values[i] < isl.min_height - 1e-12 {
            isl.min_height = values[i];
            isl.min_location = grid.center(i);
            isl.plateau = false;
        } else if (values[i] - isl.min_height).abs() <= 1e-12 && isl.cell_count > 1 {
            // tie: keep the earlier (lexicographically lower flat index)
            // representative and flag the plateau
            if grid.center(i) != isl.min_location {
                isl.plateau = true;
            }
        }
    }
    let island_of_a = match labels[ia] {
        Some(l) => l,
        None => return Ok(None),
    };
    let island_of_b = match labels[ib] {
        Some(l) => l,
        None => return Ok(None),
    };
    Ok(Some(Labeled {
        grid,
        labels,
        islands,
        island_of_a,
        island_of_b,
    }))
}

/// Full decomposition at level F(a;b): islands, relevant saddles, and
/// their island assignments. `delta` defaults to
/// min(δ₁-estimate, 0.1·(level − highest island minimum)).
pub fn decompose_islands(
    p: &Potential,
    a: &[f64],
    b: &[f64],
    delta: Option<f64>,
    grid_n: usize,
) -> Result<IslandDecomposition, LandscapeError> {
    let (lo_lvl, hi_lvl) = communication_height_bracket(p, a, b, grid_n)?;
    let level = 0.5 * (lo_lvl + hi_lvl);
    let seeds = if p.dim() == 2 { SEEDS_2D } else { SEEDS_3D };
    let cps = find_critical_points(p, seeds)?;

    // candidate saddles near the communication level
    let minima_below: Vec<&CriticalPoint> = cps
        .iter()
        .filter(|c| c.kind == CriticalKind::Minimum && c.height < level)
        .collect();
    let highest_min = minima_below
        .iter()
        .map(|c| c.height)
        .fold(f64::NEG_INFINITY, f64::max);
    let delta_cap = 0.1 * (level - highest_min);
    let near_level = |c: &CriticalPoint| (c.height - level).abs() <= delta_cap.max(1e-9);
    let candidates: Vec<&CriticalPoint> = cps
        .iter()
        .filter(|c| {
            near_level(c) && matches!(c.kind, CriticalKind::Saddle | CriticalKind::Degenerate)
        })
        .collect();
    for c in &candidates {
        if c.kind == CriticalKind::Degenerate {
            return Err(LandscapeError::DegenerateSaddle(c.location.clone()));
        }
    }
    // δ₁ estimate: bridges O_{z,3δ} stay disjoint while 6δ is below the
    // smallest pairwise saddle distance
    let mut min_pair = f64::INFINITY;
    for (i, ci) in candidates.iter().enumerate() {
        for cj in candidates.iter().skip(i + 1) {
            let d: f64 = ci
                .location
                .iter()
                .zip(&cj.location)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            min_pair = min_pair.min(d);
        }
    }
    let delta1_est = min_pair / 6.0 * 0.99;
    let delta = match delta {
        Some(d) => {
            if !(d > 0.0) {
                return Err(LandscapeError::BadDelta(d));
            }
            d
        }
        None => delta1_est.min(delta_cap),
    };
    // disjointness of bridges at the chosen delta
    if min_pair < 6.0 * delta {
        let mut closest = (0, 1, f64::INFINITY);
        for (i, ci) in candidates.iter().enumerate() {
            for (j, cj) in candidates.iter().enumerate().skip(i + 1) {
                let d: f64 = ci
                    .location
                    .iter()
                    .zip(&cj.location)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                if d < closest.2 {
                    closest = (i, j, d);
                }
            }
        }
        return Err(LandscapeError::BridgesOverlap(
            candidates[closest.0].location.clone(),
            candidates[closest.1].location.clone(),
            closest.2 / 6.0,
        ));
    }

    // label islands, retrying once on a doubled grid if discretization
    // error separates a and b at level + δ/3
    let labeled = match label_islands(p, a, b, level, delta, grid_n)? {
        Some(l) => l,
        None => label_islands(p, a, b, level, delta, 2 * grid_n)?
            .ok_or(LandscapeError::TerminalsSeparated)?,
    };
    let Labeled {
        grid,
        labels,
        mut islands,
        island_of_a,
        island_of_b,
    } = labeled;
    if island_of_a == island_of_b {
        return Err(LandscapeError::DegenerateQuery);
    }

    // refine island minima by Newton from the grid argmin
    for isl in &mut islands {
        if let Some(refined) = super::critical::refine_minimum(p, &isl.min_location) {
            let h = p.value(&refined)?;
            if h <= isl.min_height + 1e-12 {
                isl.min_location = refined;
                isl.min_height = h;
            }
        }
    }

    // relevant saddles: candidates inside the δ/3-component whose bridge
    // touches the labeled islands
    let lower = level - delta / 3.0;
    let mut assignments = Vec::new();
    for c in candidates {
        // skip saddles strictly below the island level: they are
        // interior to an island, not bridges
        if c.height < lower {
            continue;
        }
        let v1 = unstable_direction(p, c)?;
        let offset = 2.0 * grid.cell.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut sides = [0usize; 2];
        for (k, sign) in [(-1.0f64), 1.0].iter().enumerate() {
            let start: Vec<f64> = c
                .location
                .iter()
                .zip(&v1)
                .map(|(x, v)| x + sign * offset * v)
                .collect();
            if !p.contains(&start) {
                return Err(LandscapeError::DescentFailed(start));
            }
            sides[k] = descend_to_island(p, &grid, &labels, &start, lower)?;
        }
        assignments.push(SaddleAssignment {
            saddle: c.clone(),
            neg_island: sides[0],
            pos_island: sides[1],
        });
    }

    Ok(IslandDecomposition {
        level,
        delta,
        islands,
        saddles: assignments,
        island_of_a,
        island_of_b,
        grid_n: grid.dims[0],
    })
}

/// Unit eigenvector of the most negative Hessian eigenvalue, with a
/// deterministic sign (first nonzero component positive).
pub(super) fn unstable_direction(
    p: &Potential,
    c: &CriticalPoint,
) -> Result<Vec<f64>, LandscapeError> {
    let h = p.hessian(&c.location)?;
    let eig = h.symmetric_eigen();
    let mut best = 0;
    for k in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[k] < eig.eigenvalues[best] {
            best = k;
        }
    }
    let mut v: Vec<f64> = eig.eigenvectors.column(best).iter().copied().collect();
    if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            for c in &mut v {
                *c = -*c;
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use std::collections::HashMap;

    fn double_well() -> Potential {
        Potential::new(
            parse("(x^2-1)^2 + y^2").unwrap(),
            2,
            vec![-1.8, -1.4],
            vec![1.8, 1.4],
            HashMap::new(),
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn double_well_height() {
        let p = double_well();
        let a = [-1.0, 0.0];
        let b = [1.0, 0.0];
        let h = communication_height(&p, &a, &b, 256).unwrap();
        // saddle at the origin has height 1; grid tolerance ~cell size
        assert!((h - 1.0).abs() < 0.02, "h = {h}");
        // symmetry
        let h2 = communication_height(&p, &b, &a, 256).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn degenerate_and_nested_queries() {
        let p = double_well();
        let a = [-1.0, 0.0];
        assert_eq!(communication_height(&p, &a, &a, 64).unwrap(), 0.0);
        // quadratic bowl: sublevel sets nested, height = max(F(a), F(b))
        let bowl = Potential::new(
            parse("x^2 + y^2").unwrap(),
            2,
            vec![-2.0, -2.0],
            vec![2.0, 2.0],
            HashMap::new(),
            10.0,
        )
        .unwrap();
        let h = communication_height(&bowl, &[1.0, 0.0], &[0.0, 0.5], 128).unwrap();
        assert!((h - 1.0).abs() < 0.05, "h = {h}");
    }

    #[test]
    fn double_well_islands() {
        let p = double_well();
        let d = decompose_islands(&p, &[-1.0, 0.0], &[1.0, 0.0], Some(0.3), 256).unwrap();
        assert_eq!(d.islands.len(), 2);
        assert_eq!(d.saddles.len(), 1);
        assert_ne!(d.island_of_a, d.island_of_b);
        let s = &d.saddles[0];
        assert!(!s.is_loop());
        assert_eq!(
            {
                let mut pair = [s.neg_island, s.pos_island];
                pair.sort();
                pair
            },
            {
                let mut pair = [d.island_of_a, d.island_of_b];
                pair.sort();
                pair
            }
        );
        for isl in &d.islands {
            assert!(isl.min_height.abs() < 1e-9);
            assert!((isl.min_location[0].abs() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn default_delta_is_positive_and_reported() {
        let p = double_well();
        let d = decompose_islands(&p, &[-1.0, 0.0], &[1.0, 0.0], None, 128).unwrap();
        assert!(d.delta > 0.0);
        // single saddle → δ₁ unconstrained, cap at 0.1·(level − 0)
        assert!((d.delta - 0.1 * d.level).abs() < 0.01);
    }
}
