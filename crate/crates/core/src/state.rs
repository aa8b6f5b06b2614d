//! Height/momentum fields on the torus and smooth reference solutions.

use std::fmt;
use std::sync::Arc;

use crate::algebra::Vec2;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Default height below which a cell counts as dry.
pub const DRY_FLOOR: f64 = 1e-12;

/// Cell-averaged height `h` and momentum `q = h u` at one instant.
///
/// Invariants: `h >= 0` everywhere, `q = 0` wherever `h = 0`, and both
/// fields hold one entry per grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedState {
    pub t: f64,
    pub h: Vec<f64>,
    pub q: Vec<Vec2>,
}

impl ConservedState {
    pub fn new(grid: &TorusGrid, t: f64, h: Vec<f64>, q: Vec<Vec2>) -> Result<ConservedState> {
        let state = ConservedState { t, h, q };
        state.validate(grid)?;
        Ok(state)
    }

    /// Spatially constant state at `t = 0`.
    pub fn constant(grid: &TorusGrid, h: f64, u: Vec2) -> ConservedState {
        ConservedState {
            t: 0.0,
            h: vec![h; grid.len()],
            q: vec![u * h; grid.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn validate(&self, grid: &TorusGrid) -> Result<()> {
        if self.h.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: self.h.len() });
        }
        if self.q.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: self.q.len() });
        }
        for (i, &h) in self.h.iter().enumerate() {
            if !(h >= 0.0) {
                return Err(Error::InvalidParameter(format!("height {h} in cell {i}")));
            }
            if h == 0.0 && self.q[i] != Vec2::ZERO {
                return Err(Error::InvalidParameter(format!("momentum on dry cell {i}")));
            }
        }
        Ok(())
    }

    /// Total mass `sum_i h_i` times the cell measure.
    pub fn total_mass(&self, grid: &TorusGrid) -> f64 {
        self.h.iter().sum::<f64>() * grid.cell_measure()
    }

    /// Velocity `q / h` on wet cells (`h > floor`), zero on dry ones.
    pub fn velocity(&self, floor: f64) -> Vec<Vec2> {
        self.h
            .iter()
            .zip(&self.q)
            .map(|(&h, &q)| if h > floor { q / h } else { Vec2::ZERO })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.h.iter().all(|h| h.is_finite()) && self.q.iter().all(|q| q.is_finite())
    }
}

type HeightFn = dyn Fn(f64, Vec2) -> f64 + Send + Sync;
type VelocityFn = dyn Fn(f64, Vec2) -> Vec2 + Send + Sync;

/// Smooth reference solution `(H, U)` with a positive height floor.
///
/// `floor` is a lower bound for `H` on the validity window (sampling
/// checks it).  `c1_bound` bounds `|grad U| + |dU/dt|` and feeds the
/// default growth rate of the weak-strong comparison.
#[derive(Clone)]
pub struct StrongSolution {
    height: Arc<HeightFn>,
    velocity: Arc<VelocityFn>,
    pub floor: f64,
    pub valid: (f64, f64),
    pub c1_bound: f64,
}

impl StrongSolution {
    pub fn new(
        height: impl Fn(f64, Vec2) -> f64 + Send + Sync + 'static,
        velocity: impl Fn(f64, Vec2) -> Vec2 + Send + Sync + 'static,
        floor: f64,
        valid: (f64, f64),
        c1_bound: f64,
    ) -> Result<StrongSolution> {
        if !(floor > 0.0) {
            return Err(Error::InvalidParameter(format!("height floor must be > 0, got {floor}")));
        }
        if !(valid.0 < valid.1) {
            return Err(Error::InvalidParameter("empty validity interval".into()));
        }
        if !(c1_bound >= 0.0) {
            return Err(Error::InvalidParameter(format!("c1 bound must be >= 0, got {c1_bound}")));
        }
        Ok(StrongSolution { height: Arc::new(height), velocity: Arc::new(velocity), floor, valid, c1_bound })
    }

    /// Constant-in-space-and-time reference state.
    pub fn constant(h: f64, u: Vec2) -> StrongSolution {
        StrongSolution {
            height: Arc::new(move |_, _| h),
            velocity: Arc::new(move |_, _| u),
            floor: h,
            valid: (0.0, f64::INFINITY),
            c1_bound: 0.0,
        }
    }

    pub fn height(&self, t: f64, x: Vec2) -> f64 {
        (self.height)(t, x)
    }

    pub fn velocity(&self, t: f64, x: Vec2) -> Vec2 {
        (self.velocity)(t, x)
    }
}

impl fmt::Debug for StrongSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StrongSolution {{ floor: {}, valid: {:?}, c1_bound: {} }}",
            self.floor, self.valid, self.c1_bound
        )
    }
}

/// Cell-center sample of a strong solution at time `t`.
pub fn sample_strong(sol: &StrongSolution, grid: &TorusGrid, t: f64) -> Result<ConservedState> {
    let (lo, hi) = sol.valid;
    if !(t >= lo && t <= hi) {
        return Err(Error::TimeOutOfRange { t, lo, hi });
    }
    let mut h = Vec::with_capacity(grid.len());
    let mut q = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let x = grid.center(idx);
        let value = sol.height(t, x);
        if !(value >= sol.floor) {
            return Err(Error::FloorViolation { value, floor: sol.floor, cell: idx });
        }
        h.push(value);
        q.push(sol.velocity(t, x) * value);
    }
    Ok(ConservedState { t, h, q })
}
