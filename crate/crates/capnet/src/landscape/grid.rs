//! Regular cell-centered grid over an axis-aligned box, dimension 2 or 3.

use super::{LandscapeError, Potential};

#[derive(Clone, Debug)]
pub struct Grid {
    pub dims: Vec<usize>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    strides: Vec<usize>,
    pub cell: Vec<f64>,
}

impl Grid {
    pub fn new(lo: &[f64], hi: &[f64], n_per_axis: usize) -> Grid {
        let dim = lo.len();
        let dims = vec![n_per_axis; dim];
        Grid::with_dims(lo, hi, &dims)
    }

    pub fn with_dims(lo: &[f64], hi: &[f64], dims: &[usize]) -> Grid {
        let dim = lo.len();
        let mut strides = vec![0; dim];
        let mut s = 1;
        for axis in 0..dim {
            strides[axis] = s;
            s *= dims[axis];
        }
        let cell = (0..dim)
            .map(|a| (hi[a] - lo[a]) / dims[a] as f64)
            .collect();
        Grid {
            dims: dims.to_vec(),
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            strides,
            cell,
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(c, s)| c * s)
            .sum()
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        let mut rest = index;
        for axis in 0..self.dim() {
            out[axis] = rest % self.dims[axis];
            rest /= self.dims[axis];
        }
        out
    }

    /// Center of the cell holding flat index `i`.
    pub fn center(&self, i: usize) -> Vec<f64> {
        self.coords(i)
            .iter()
            .enumerate()
            .map(|(a, &c)| self.lo[a] + (c as f64 + 0.5) * self.cell[a])
            .collect()
    }

    /// Flat index of the cell containing `x`, clamped to the box.
    pub fn locate(&self, x: &[f64]) -> usize {
        let coords: Vec<usize> = (0..self.dim())
            .map(|a| {
                let t = ((x[a] - self.lo[a]) / self.cell[a]).floor();
                (t.max(0.0) as usize).min(self.dims[a] - 1)
            })
            .collect();
        self.index(&coords)
    }

    /// Axis-neighbors of cell `i` (4 in 2D, 6 in 3D), in a fixed order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let coords = self.coords(i);
        let mut out = Vec::with_capacity(2 * self.dim());
        for axis in 0..self.dim() {
            if coords[axis] > 0 {
                out.push(i - self.strides[axis]);
            }
            if coords[axis] + 1 < self.dims[axis] {
                out.push(i + self.strides[axis]);
            }
        }
        out
    }

    /// Evaluates the potential at every cell center.
    pub fn sample(&self, p: &Potential) -> Result<Vec<f64>, LandscapeError> {
        (0..self.len()).map(|i| p.value(&self.center(i))).collect()
    }
}
