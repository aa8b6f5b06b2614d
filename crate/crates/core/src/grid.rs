//! Uniform cell-centered grids on the unit torus.

use crate::algebra::Vec2;
use crate::error::{Error, Result};

/// Uniform periodic grid on the unit torus in one or two dimensions.
///
/// Cells are addressed by a linear index `iy * nx + ix`; neighbors wrap
/// around.  Cell measures sum to the total measure 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    shape: [usize; 2],
    dx: [f64; 2],
}

impl TorusGrid {
    /// One-dimensional grid with `nx` cells.
    pub fn line(nx: usize) -> Result<TorusGrid> {
        if nx == 0 {
            return Err(Error::InvalidParameter("grid needs at least one cell".into()));
        }
        Ok(TorusGrid {
            dim: 1,
            shape: [nx, 1],
            dx: [1.0 / nx as f64, 1.0],
        })
    }

    /// Two-dimensional grid with `nx * ny` cells.
    pub fn square(nx: usize, ny: usize) -> Result<TorusGrid> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter("grid needs at least one cell per axis".into()));
        }
        Ok(TorusGrid {
            dim: 2,
            shape: [nx, ny],
            dx: [1.0 / nx as f64, 1.0 / ny as f64],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell width along `axis`.
    pub fn dx(&self, axis: usize) -> f64 {
        self.dx[axis]
    }

    pub fn min_dx(&self) -> f64 {
        let mut m = self.dx[0];
        for axis in 1..self.dim {
            m = m.min(self.dx[axis]);
        }
        m
    }

    /// Measure of a single cell; `len()` of them tile the torus.
    pub fn cell_measure(&self) -> f64 {
        let mut m = 1.0;
        for axis in 0..self.dim {
            m *= self.dx[axis];
        }
        m
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.shape[0] && iy < self.shape[1]);
        iy * self.shape[0] + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.shape[0], idx / self.shape[0])
    }

    /// Center of cell `idx`.
    pub fn center(&self, idx: usize) -> Vec2 {
        let (ix, iy) = self.coords(idx);
        Vec2::new(
            (ix as f64 + 0.5) * self.dx[0],
            if self.dim > 1 { (iy as f64 + 0.5) * self.dx[1] } else { 0.0 },
        )
    }

    /// Periodic neighbor of `idx`, `step` cells away along `axis`.
    pub fn neighbor(&self, idx: usize, axis: usize, step: isize) -> usize {
        debug_assert!(axis < self.dim);
        let (ix, iy) = self.coords(idx);
        let n = self.shape[axis] as isize;
        let moved = |i: usize| ((i as isize + step).rem_euclid(n)) as usize;
        match axis {
            0 => self.index(moved(ix), iy),
            _ => self.index(ix, moved(iy)),
        }
    }
}
