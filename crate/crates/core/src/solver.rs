//! First-order finite-volume march: local Lax-Friedrichs fluxes, optional
//! artificial diffusion, and an operator split for friction / body forces.

use crate::algebra::Vec2;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::model::{Model, ModelParams};
use crate::physics::{friction_prox, max_wave_speed, pressure, sound_speed};
use crate::state::{ConservedState, DRY_FLOOR};

/// March parameters.  `viscosity` is the coefficient of an explicit
/// Laplacian added to both height and momentum; `record_every` is the
/// snapshot stride in steps; `dry_floor` is the height below which a cell
/// is treated as dry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub viscosity: f64,
    pub record_every: usize,
    pub dry_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig { cfl: 0.45, t_end: 1.0, viscosity: 0.0, record_every: 1, dry_floor: DRY_FLOOR }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidParameter(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if !(self.viscosity >= 0.0 && self.viscosity.is_finite()) {
            return Err(Error::InvalidParameter(format!("viscosity must be >= 0, got {}", self.viscosity)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        if !(self.dry_floor > 0.0) {
            return Err(Error::InvalidParameter(format!("dry_floor must be > 0, got {}", self.dry_floor)));
        }
        Ok(())
    }
}

/// Exact flux of `(h, q)` along `axis`: mass `q_a`, momentum
/// `q u_a + p(h) e_a`.
pub fn physical_flux(h: f64, q: Vec2, axis: usize, params: &ModelParams, floor: f64) -> (f64, Vec2) {
    let p = pressure(h, params);
    let un = if h > floor { q.component(axis) / h } else { 0.0 };
    (q.component(axis), q * un + Vec2::unit(axis) * p)
}

/// Local Lax-Friedrichs face flux between `left` and `right` cell values
/// `(h, q)`.  The dissipation speed is the larger of the two one-sided
/// signal speeds `|u| + c(h)`.
pub fn numerical_flux(
    left: (f64, Vec2),
    right: (f64, Vec2),
    axis: usize,
    params: &ModelParams,
    floor: f64,
) -> (f64, Vec2) {
    let signal = |h: f64, q: Vec2| {
        if h > floor {
            (q / h).norm() + sound_speed(h, params)
        } else {
            0.0
        }
    };
    let lam = signal(left.0, left.1).max(signal(right.0, right.1));
    let (fl_h, fl_q) = physical_flux(left.0, left.1, axis, params, floor);
    let (fr_h, fr_q) = physical_flux(right.0, right.1, axis, params, floor);
    (
        0.5 * (fl_h + fr_h) - 0.5 * lam * (right.0 - left.0),
        (fl_q + fr_q) * 0.5 - (right.1 - left.1) * (0.5 * lam),
    )
}

/// One explicit conservative update of length `dt` (no sources).  Adds
/// `viscosity * Laplacian` to both fields when `viscosity > 0`.  Fails
/// with [`Error::NegativeHeight`] if any cell is driven negative, so the
/// caller can retry with a shorter step.  Leaves `t` unchanged.
pub fn hyperbolic_step(
    state: &ConservedState,
    grid: &TorusGrid,
    params: &ModelParams,
    dt: f64,
    viscosity: f64,
    floor: f64,
) -> Result<ConservedState> {
    let n = grid.len();
    let mut h_new = state.h.clone();
    let mut q_new = state.q.clone();
    let mut fh = vec![0.0; n];
    let mut fq = vec![Vec2::ZERO; n];
    for axis in 0..grid.dim() {
        let dx = grid.dx(axis);
        // flux through the right face of each cell
        for idx in 0..n {
            let r = grid.neighbor(idx, axis, 1);
            let (mass, mom) = numerical_flux(
                (state.h[idx], state.q[idx]),
                (state.h[r], state.q[r]),
                axis,
                params,
                floor,
            );
            fh[idx] = mass;
            fq[idx] = mom;
        }
        let scale = dt / dx;
        for idx in 0..n {
            let l = grid.neighbor(idx, axis, -1);
            h_new[idx] -= scale * (fh[idx] - fh[l]);
            q_new[idx] -= (fq[idx] - fq[l]) * scale;
        }
        if viscosity > 0.0 {
            let vscale = viscosity * dt / (dx * dx);
            for idx in 0..n {
                let p = grid.neighbor(idx, axis, 1);
                let m = grid.neighbor(idx, axis, -1);
                h_new[idx] += vscale * (state.h[p] - 2.0 * state.h[idx] + state.h[m]);
                q_new[idx] += (state.q[p] + state.q[m] - state.q[idx] * 2.0) * vscale;
            }
        }
    }
    let min_h = h_new.iter().copied().fold(f64::INFINITY, f64::min);
    if min_h < 0.0 {
        return Err(Error::NegativeHeight { min_h, dt, t: state.t });
    }
    for idx in 0..n {
        if h_new[idx] <= floor {
            q_new[idx] = Vec2::ZERO;
        }
    }
    Ok(ConservedState { t: state.t, h: h_new, q: q_new })
}

/// Implicit friction update for the granular model: on wet cells the
/// velocity moves to `prox(u + dt f, dt d)`, which arrests cells whose
/// driving speed falls inside the friction ball.  Identity for the gas
/// model.  The force is sampled at `state.t`; `t` is left unchanged.
pub fn friction_step(
    state: &ConservedState,
    grid: &TorusGrid,
    params: &ModelParams,
    dt: f64,
    floor: f64,
) -> ConservedState {
    if params.model != Model::SavageHutter {
        return state.clone();
    }
    let s = dt * params.d;
    let mut q_new = state.q.clone();
    for idx in 0..grid.len() {
        let h = state.h[idx];
        if h > floor {
            let u = state.q[idx] / h;
            let f = params.force.eval(state.t, grid.center(idx));
            q_new[idx] = friction_prox(u + f * dt, s) * h;
        } else {
            q_new[idx] = Vec2::ZERO;
        }
    }
    ConservedState { t: state.t, h: state.h.clone(), q: q_new }
}

/// Explicit body-force update for the gas model: `q += dt h G`.  Identity
/// for the granular model (friction handles its force).  The force is
/// sampled at `state.t`; `t` is left unchanged.
pub fn body_force_step(
    state: &ConservedState,
    grid: &TorusGrid,
    params: &ModelParams,
    dt: f64,
    floor: f64,
) -> ConservedState {
    if params.model != Model::IsentropicEuler || params.force.is_zero() {
        return state.clone();
    }
    let mut q_new = state.q.clone();
    for idx in 0..grid.len() {
        let h = state.h[idx];
        if h > floor {
            q_new[idx] += params.force.eval(state.t, grid.center(idx)) * (dt * h);
        }
    }
    ConservedState { t: state.t, h: state.h.clone(), q: q_new }
}

/// Time marcher holding the grid, model, configuration, and current state.
#[derive(Clone, Debug)]
pub struct Simulation {
    grid: TorusGrid,
    params: ModelParams,
    config: SolverConfig,
    state: ConservedState,
}

impl Simulation {
    pub fn new(
        grid: TorusGrid,
        params: ModelParams,
        config: SolverConfig,
        initial: ConservedState,
    ) -> Result<Simulation> {
        params.validate()?;
        config.validate()?;
        initial.validate(&grid)?;
        if !initial.is_finite() {
            return Err(Error::NonFinite { t: initial.t });
        }
        Ok(Simulation { grid, params, config, state: initial })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn state(&self) -> &ConservedState {
        &self.state
    }

    /// Largest stable step: `cfl / (lambda sum_a 1/dx_a + 2 eps sum_a 1/dx_a^2)`.
    /// Infinite when nothing moves (dry state, no diffusion).
    pub fn stable_dt(&self) -> f64 {
        let lam = max_wave_speed(&self.state, &self.params, self.config.dry_floor);
        let mut denom = 0.0;
        for axis in 0..self.grid.dim() {
            let dx = self.grid.dx(axis);
            denom += lam / dx + 2.0 * self.config.viscosity / (dx * dx);
        }
        if denom > 0.0 {
            self.config.cfl / denom
        } else {
            f64::INFINITY
        }
    }

    /// Advance by one composed step (transport, then friction or body
    /// force), stopping exactly at `target` when the stable step reaches
    /// it.  Retries once at half the step if positivity fails.
    pub fn step_toward(&mut self, target: f64) -> Result<()> {
        let t0 = self.state.t;
        if target <= t0 {
            return Ok(());
        }
        let remaining = target - t0;
        let mut dt = self.stable_dt();
        let mut hits_target = dt >= remaining;
        if hits_target {
            dt = remaining;
        }
        let floor = self.config.dry_floor;
        let transported = match hyperbolic_step(&self.state, &self.grid, &self.params, dt, self.config.viscosity, floor) {
            Ok(s) => s,
            Err(Error::NegativeHeight { .. }) => {
                dt *= 0.5;
                hits_target = false;
                hyperbolic_step(&self.state, &self.grid, &self.params, dt, self.config.viscosity, floor)?
            }
            Err(e) => return Err(e),
        };
        let sourced = match self.params.model {
            Model::SavageHutter => friction_step(&transported, &self.grid, &self.params, dt, floor),
            Model::IsentropicEuler => body_force_step(&transported, &self.grid, &self.params, dt, floor),
        };
        self.state = sourced;
        self.state.t = if hits_target { target } else { t0 + dt };
        if !self.state.is_finite() {
            return Err(Error::NonFinite { t: self.state.t });
        }
        if !(self.state.t > t0) {
            return Err(Error::InvalidParameter(format!("time step underflow at t = {t0}")));
        }
        Ok(())
    }

    /// March to `config.t_end`, returning snapshots: the initial state,
    /// every `record_every`-th step, and the final state (not duplicated
    /// when the last step lands on the stride).
    pub fn advance(&mut self) -> Result<Vec<ConservedState>> {
        let t_end = self.config.t_end;
        if self.state.t > t_end {
            return Err(Error::TimeOutOfRange { t: self.state.t, lo: self.state.t, hi: t_end });
        }
        let mut snapshots = vec![self.state.clone()];
        let mut steps = 0usize;
        while self.state.t < t_end {
            self.step_toward(t_end)?;
            steps += 1;
            if steps.is_multiple_of(self.config.record_every) && self.state.t < t_end {
                snapshots.push(self.state.clone());
            }
        }
        if snapshots.last().map(|s| s.t) != Some(self.state.t) {
            snapshots.push(self.state.clone());
        }
        Ok(snapshots)
    }

    /// March through a nondecreasing list of times (starting at or after
    /// the current time) and return one snapshot per entry.
    pub fn advance_to_times(&mut self, times: &[f64]) -> Result<Vec<ConservedState>> {
        let mut snapshots = Vec::with_capacity(times.len());
        for &target in times {
            if target < self.state.t {
                return Err(Error::TimeOutOfRange { t: target, lo: self.state.t, hi: f64::INFINITY });
            }
            while self.state.t < target {
                self.step_toward(target)?;
            }
            snapshots.push(self.state.clone());
        }
        Ok(snapshots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ForceField;
    use approx::assert_abs_diff_eq;

    fn sh_unit() -> ModelParams {
        ModelParams::savage_hutter(1.0, 1.0).unwrap()
    }

    #[test]
    fn flux_is_consistent() {
        // coinciding rest states reproduce the exact flux (0, p(h) e_a).
        let gas = ModelParams::euler(1.4, 1.0).unwrap();
        let (mass, mom) = numerical_flux((1.0, Vec2::ZERO), (1.0, Vec2::ZERO), 0, &gas, DRY_FLOOR);
        assert_eq!(mass, 0.0);
        assert_eq!(mom, Vec2::new(1.0, 0.0));

        let (mass, mom) = numerical_flux((2.0, Vec2::ZERO), (2.0, Vec2::ZERO), 1, &sh_unit(), DRY_FLOOR);
        assert_eq!(mass, 0.0);
        assert_eq!(mom, Vec2::new(0.0, 4.0));
    }

    #[test]
    #[allow(clippy::approx_constant)] // frozen flux value; sqrt(2ah)/2 = 1/sqrt(2) here
    fn flux_into_dry_region() {
        // rest column against vacuum: the upwinding half-sound-speed leaks mass rightward.
        let (mass, _) = numerical_flux((1.0, Vec2::ZERO), (0.0, Vec2::ZERO), 0, &sh_unit(), DRY_FLOOR);
        assert_abs_diff_eq!(mass, 0.7071067811865476, epsilon = 1e-16);
    }

    #[test]
    fn step_conserves_mass_and_momentum() {
        let grid = TorusGrid::line(16).unwrap();
        let mut h = Vec::new();
        let mut q = Vec::new();
        for i in 0..16 {
            let x = (i as f64) / 16.0;
            h.push(1.0 + 0.5 * (2.0 * std::f64::consts::PI * x).sin());
            q.push(Vec2::new(0.3 * (2.0 * std::f64::consts::PI * x).cos(), 0.1));
        }
        let state = ConservedState::new(&grid, 0.0, h, q).unwrap();
        let mass0 = state.total_mass(&grid);
        let mom0 = state.q.iter().fold(Vec2::ZERO, |acc, &v| acc + v);

        let next = hyperbolic_step(&state, &grid, &sh_unit(), 1e-3, 0.01, DRY_FLOOR).unwrap();
        let mass1 = next.total_mass(&grid);
        let mom1 = next.q.iter().fold(Vec2::ZERO, |acc, &v| acc + v);
        assert_abs_diff_eq!(mass0, mass1, epsilon = 1e-14);
        assert!((mom0 - mom1).norm() <= 1e-14);
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let grid = TorusGrid::square(6, 4).unwrap();
        let params = ModelParams::euler(1.4, 0.8).unwrap();
        let state = ConservedState::constant(&grid, 1.3, Vec2::new(0.4, -0.2));
        let next = hyperbolic_step(&state, &grid, &params, 1e-3, 0.05, DRY_FLOOR).unwrap();
        for idx in 0..grid.len() {
            assert_abs_diff_eq!(next.h[idx], state.h[idx], epsilon = 1e-15);
            assert!((next.q[idx] - state.q[idx]).norm() <= 1e-15);
        }
    }

    #[test]
    fn oversized_step_reports_negative_height() {
        let grid = TorusGrid::line(4).unwrap();
        let state = ConservedState::new(
            &grid,
            0.0,
            vec![1e-6, 1.0, 1.0, 1.0],
            vec![Vec2::ZERO; 4],
        )
        .unwrap();
        let result = hyperbolic_step(&state, &grid, &sh_unit(), 10.0, 0.0, DRY_FLOOR);
        assert!(matches!(result, Err(Error::NegativeHeight { .. })));
    }

    #[test]
    fn dry_cells_keep_zero_momentum() {
        let grid = TorusGrid::line(8).unwrap();
        let mut h = vec![0.0; 8];
        for (i, v) in h.iter_mut().enumerate().take(4) {
            *v = 1.0 + 0.1 * i as f64;
        }
        let state = ConservedState::new(&grid, 0.0, h, vec![Vec2::ZERO; 8]).unwrap();
        let next = hyperbolic_step(&state, &grid, &sh_unit(), 1e-3, 0.0, DRY_FLOOR).unwrap();
        for idx in 0..8 {
            if next.h[idx] <= DRY_FLOOR {
                assert_eq!(next.q[idx], Vec2::ZERO);
            }
        }
    }

    #[test]
    fn friction_shrinks_velocity() {
        let grid = TorusGrid::line(4).unwrap();
        let state = ConservedState::constant(&grid, 1.0, Vec2::new(1.0, 0.0));
        let next = friction_step(&state, &grid, &sh_unit(), 0.25, DRY_FLOOR);
        for &q in &next.q {
            assert_eq!(q, Vec2::new(0.75, 0.0));
        }
        // a long step arrests the flow outright.
        let stopped = friction_step(&state, &grid, &sh_unit(), 2.0, DRY_FLOOR);
        for &q in &stopped.q {
            assert_eq!(q, Vec2::ZERO);
        }
    }

    #[test]
    fn friction_balances_subcritical_force() {
        // |f| < d: a resting pile stays at rest no matter the step.
        let params = ModelParams::savage_hutter(1.0, 1.0)
            .unwrap()
            .with_force(ForceField::Constant(Vec2::new(0.5, 0.0)));
        let grid = TorusGrid::line(4).unwrap();
        let state = ConservedState::constant(&grid, 2.0, Vec2::ZERO);
        let next = friction_step(&state, &grid, &params, 0.7, DRY_FLOOR);
        for &q in &next.q {
            assert_eq!(q, Vec2::ZERO);
        }
        // |f| > d: the excess drives a slide at speed dt (|f| - d).
        let pushed = ModelParams::savage_hutter(1.0, 1.0)
            .unwrap()
            .with_force(ForceField::Constant(Vec2::new(2.0, 0.0)));
        let next = friction_step(&state, &grid, &pushed, 0.1, DRY_FLOOR);
        for &q in &next.q {
            assert!((q - Vec2::new(0.2, 0.0)).norm() <= 1e-15);
        }
    }

    #[test]
    fn body_force_adds_momentum() {
        let params = ModelParams::euler(1.4, 1.0)
            .unwrap()
            .with_force(ForceField::Constant(Vec2::new(0.0, -1.0)));
        let grid = TorusGrid::line(4).unwrap();
        let state = ConservedState::constant(&grid, 2.0, Vec2::ZERO);
        let next = body_force_step(&state, &grid, &params, 0.1, DRY_FLOOR);
        for &q in &next.q {
            assert!((q - Vec2::new(0.0, -0.2)).norm() <= 1e-16);
        }
    }

    #[test]
    fn stable_step_length() {
        let grid = TorusGrid::line(10).unwrap();
        let state = ConservedState::constant(&grid, 1.0, Vec2::ZERO);
        let sim = Simulation::new(grid, sh_unit(), SolverConfig::default(), state).unwrap();
        assert_abs_diff_eq!(sim.stable_dt(), 0.03181980515339464, epsilon = 1e-16);

        let grid = TorusGrid::line(10).unwrap();
        let state = ConservedState::constant(&grid, 1.0, Vec2::ZERO);
        let config = SolverConfig { viscosity: 0.01, ..SolverConfig::default() };
        let sim = Simulation::new(grid, sh_unit(), config, state).unwrap();
        assert_abs_diff_eq!(sim.stable_dt(), 0.027877352197341467, epsilon = 1e-16);

        let grid = TorusGrid::square(10, 20).unwrap();
        let state = ConservedState::constant(&grid, 1.0, Vec2::ZERO);
        let sim = Simulation::new(grid, sh_unit(), SolverConfig::default(), state).unwrap();
        assert_abs_diff_eq!(sim.stable_dt(), 0.010606601717798213, epsilon = 1e-16);
    }

    #[test]
    fn march_lands_exactly_on_t_end() {
        let grid = TorusGrid::line(32).unwrap();
        let mut h = Vec::new();
        for i in 0..32 {
            let x = (i as f64 + 0.5) / 32.0;
            h.push(1.0 + 0.3 * (2.0 * std::f64::consts::PI * x).sin());
        }
        let state = ConservedState::new(&grid, 0.0, h, vec![Vec2::ZERO; 32]).unwrap();
        let config = SolverConfig { t_end: 0.3, ..SolverConfig::default() };
        let mut sim = Simulation::new(grid, sh_unit(), config, state).unwrap();
        let snaps = sim.advance().unwrap();
        assert_eq!(snaps.first().unwrap().t, 0.0);
        assert_eq!(snaps.last().unwrap().t, 0.3);
        // default stride records every step: times strictly increase.
        for w in snaps.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }

    #[test]
    fn snapshot_stride_thins_the_record() {
        let grid = TorusGrid::line(16).unwrap();
        let state = ConservedState::constant(&grid, 1.0, Vec2::new(0.5, 0.0));
        let every = SolverConfig { t_end: 0.2, ..SolverConfig::default() };
        let mut sim = Simulation::new(grid.clone(), sh_unit(), every, state.clone()).unwrap();
        let dense = sim.advance().unwrap();

        let strided = SolverConfig { t_end: 0.2, record_every: 4, ..SolverConfig::default() };
        let mut sim = Simulation::new(grid, sh_unit(), strided, state).unwrap();
        let thin = sim.advance().unwrap();
        assert!(thin.len() < dense.len());
        assert_eq!(thin.first().unwrap().t, 0.0);
        assert_eq!(thin.last().unwrap().t, 0.2);
    }

    #[test]
    fn advance_to_times_hits_each_target() {
        let grid = TorusGrid::line(16).unwrap();
        let state = ConservedState::constant(&grid, 1.0, Vec2::new(0.2, 0.1));
        let mut sim = Simulation::new(grid, sh_unit(), SolverConfig::default(), state).unwrap();
        let snaps = sim.advance_to_times(&[0.0, 0.05, 0.1, 0.1, 0.25]).unwrap();
        let times: Vec<f64> = snaps.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![0.0, 0.05, 0.1, 0.1, 0.25]);
        assert!(sim.advance_to_times(&[0.1]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { cfl: 0.0, ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig { cfl: 1.5, ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig { t_end: -1.0, ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig { viscosity: -0.1, ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig { record_every: 0, ..SolverConfig::default() }.validate().is_err());
    }
}
