//! Pressure laws, wave speeds, and the set-valued dry friction graph.

use crate::algebra::Vec2;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::model::{Model, ModelParams};
use crate::state::ConservedState;

/// Pressure `p(h)`: `kappa h^gamma` for the gas, `a h^2` for the granular
/// system.  Heights must be nonnegative.
pub fn pressure(h: f64, params: &ModelParams) -> f64 {
    debug_assert!(h >= 0.0, "pressure of negative height {h}");
    match params.model {
        Model::IsentropicEuler => params.kappa * h.powf(params.gamma),
        Model::SavageHutter => params.a * h * h,
    }
}

/// `p'(h)`, used by the sound speed.
pub fn pressure_derivative(h: f64, params: &ModelParams) -> f64 {
    debug_assert!(h >= 0.0, "pressure derivative of negative height {h}");
    match params.model {
        Model::IsentropicEuler => params.kappa * params.gamma * h.powf(params.gamma - 1.0),
        Model::SavageHutter => 2.0 * params.a * h,
    }
}

/// Sound speed `c(h) = sqrt(p'(h))`.
pub fn sound_speed(h: f64, params: &ModelParams) -> f64 {
    pressure_derivative(h, params).sqrt()
}

/// Largest signal speed `max_i (|u_i| + c(h_i))` over wet cells.
///
/// Dry cells (`h <= floor`) carry no signal.  Returns 0 for a fully dry
/// state, leaving the step-size choice to the caller.
pub fn max_wave_speed(state: &ConservedState, params: &ModelParams, floor: f64) -> f64 {
    let mut speed: f64 = 0.0;
    for (&h, &q) in state.h.iter().zip(&state.q) {
        if h > floor {
            let u = q / h;
            speed = speed.max(u.norm() + sound_speed(h, params));
        }
    }
    speed
}

/// Resolvent of the dry-friction graph: the unique `w` with
/// `w + s B(w) = v`, where `B` is the unit-vector map with the full unit
/// ball at the origin.  `w = 0` when `|v| <= s`, else `v` shortened by `s`.
pub fn friction_prox(v: Vec2, s: f64) -> Vec2 {
    debug_assert!(s >= 0.0, "friction strength {s}");
    let n = v.norm();
    if n <= s {
        Vec2::ZERO
    } else {
        v * (1.0 - s / n)
    }
}

/// Dry-friction graph with coefficient `d`.
#[derive(Clone, Copy, Debug)]
pub struct FrictionGraph {
    pub d: f64,
}

impl FrictionGraph {
    pub fn new(d: f64) -> Result<FrictionGraph> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("friction coefficient must be > 0, got {d}")));
        }
        Ok(FrictionGraph { d })
    }

    /// `(I + s d B)^{-1} v` for an implicit step of length `s`.
    pub fn resolvent(&self, v: Vec2, s: f64) -> Vec2 {
        friction_prox(v, s * self.d)
    }
}

/// Pointwise violation of the granular stationarity condition
/// `|grad(h) - f/(2a)| <= d/(2a)`, evaluated with central differences and
/// the force sampled at `t = state.t`.  Returns the max over cells of the
/// excess (0 on every cell of an admissible pile).
pub fn stationary_defect(state: &ConservedState, grid: &TorusGrid, params: &ModelParams) -> Result<f64> {
    if params.model != Model::SavageHutter {
        return Err(Error::WrongModel { required: Model::SavageHutter });
    }
    state.validate(grid)?;
    let two_a = 2.0 * params.a;
    let mut worst: f64 = 0.0;
    for idx in 0..grid.len() {
        let mut grad = Vec2::ZERO;
        for axis in 0..grid.dim() {
            let hp = state.h[grid.neighbor(idx, axis, 1)];
            let hm = state.h[grid.neighbor(idx, axis, -1)];
            grad += Vec2::unit(axis) * ((hp - hm) / (2.0 * grid.dx(axis)));
        }
        let f = params.force.eval(state.t, grid.center(idx));
        let excess = (grad - f / two_a).norm() - params.d / two_a;
        worst = worst.max(excess);
    }
    Ok(worst)
}
