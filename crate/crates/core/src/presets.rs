//! Canned initial data, a state file format, and manufactured reference
//! solutions with the body force that makes them exact.

use std::f64::consts::PI;

use crate::algebra::Vec2;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::model::{ForceField, Model, ModelParams};
use crate::state::{ConservedState, StrongSolution};

/// Spatially constant column moving at `u`.
pub fn constant(grid: &TorusGrid, h: f64, u: Vec2) -> Result<ConservedState> {
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("constant height must be >= 0, got {h}")));
    }
    Ok(ConservedState::constant(grid, h, u))
}

/// `h = h_base + amp * prod_a sin(2 pi x_a)` with constant velocity.
/// The perturbation must leave the height positive.
pub fn sine_perturbation(grid: &TorusGrid, h_base: f64, amp: f64, u: Vec2) -> Result<ConservedState> {
    if !(h_base - amp.abs() > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sine profile touches zero: base {h_base}, amplitude {amp}"
        )));
    }
    let mut h = Vec::with_capacity(grid.len());
    let mut q = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let x = grid.center(idx);
        let mut wave = (2.0 * PI * x.x).sin();
        if grid.dim() == 2 {
            wave *= (2.0 * PI * x.y).sin();
        }
        let value = h_base + amp * wave;
        h.push(value);
        q.push(u * value);
    }
    ConservedState::new(grid, 0.0, h, q)
}

/// Column at rest: `h = h_high` on the slab `x_1 in [1/4, 3/4)` (by cell
/// center), `h_low` outside.
pub fn dam_break(grid: &TorusGrid, h_high: f64, h_low: f64) -> Result<ConservedState> {
    if !(h_high >= h_low && h_low >= 0.0 && h_high.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dam break needs h_high >= h_low >= 0, got {h_high}, {h_low}"
        )));
    }
    let mut h = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let x = grid.center(idx).x;
        h.push(if (0.25..0.75).contains(&x) { h_high } else { h_low });
    }
    ConservedState::new(grid, 0.0, h, vec![Vec2::ZERO; grid.len()])
}

/// Periodic tent at rest for the granular model: height rises linearly
/// from the valley at cell 0 to the peak at cell `n/2` with slope
/// `slope_fraction * d / (2 a)`.  Fractions at or below 1 satisfy the
/// stationarity condition exactly; larger ones violate it.
pub fn stationary_pile(
    grid: &TorusGrid,
    params: &ModelParams,
    h_base: f64,
    slope_fraction: f64,
) -> Result<ConservedState> {
    if params.model != Model::SavageHutter {
        return Err(Error::WrongModel { required: Model::SavageHutter });
    }
    if grid.dim() != 1 {
        return Err(Error::InvalidParameter("the tent preset is one-dimensional".into()));
    }
    let n = grid.shape()[0];
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("the tent needs an even cell count, got {n}")));
    }
    if !(h_base > 0.0 && h_base.is_finite()) {
        return Err(Error::InvalidParameter(format!("tent base height must be > 0, got {h_base}")));
    }
    if !(slope_fraction > 0.0 && slope_fraction.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tent slope fraction must be > 0, got {slope_fraction}"
        )));
    }
    let slope = slope_fraction * params.d / (2.0 * params.a);
    let dx = grid.dx(0);
    let mut h = Vec::with_capacity(n);
    for i in 0..n {
        let steps = i.min(n - i) as f64;
        h.push(h_base + slope * dx * steps);
    }
    ConservedState::new(grid, 0.0, h, vec![Vec2::ZERO; n])
}

/// Serialize a state together with its grid shape; inverse of
/// [`parse_state`].
pub fn state_to_string(state: &ConservedState, grid: &TorusGrid) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# state t={:.17e} dim={} nx={} ny={}\n",
        state.t,
        grid.dim(),
        grid.shape()[0],
        grid.shape()[1],
    ));
    for idx in 0..grid.len() {
        out.push_str(&format!(
            "{:.17e} {:.17e} {:.17e}\n",
            state.h[idx], state.q[idx].x, state.q[idx].y
        ));
    }
    out
}

/// Parse the output of [`state_to_string`], returning the grid it was
/// written on alongside the state.
pub fn parse_state(text: &str) -> Result<(ConservedState, TorusGrid)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty state file".into()))?;
    let mut t = None;
    let mut dim = None;
    let mut nx = None;
    let mut ny = None;
    for token in header.trim_start_matches('#').split_whitespace() {
        if let Some((key, value)) = token.split_once('=') {
            match key {
                "t" => t = Some(value.parse::<f64>().map_err(|e| Error::Format(format!("bad t: {e}")))?),
                "dim" => dim = Some(value.parse::<usize>().map_err(|e| Error::Format(format!("bad dim: {e}")))?),
                "nx" => nx = Some(value.parse::<usize>().map_err(|e| Error::Format(format!("bad nx: {e}")))?),
                "ny" => ny = Some(value.parse::<usize>().map_err(|e| Error::Format(format!("bad ny: {e}")))?),
                _ => return Err(Error::Format(format!("unknown state header field {key}"))),
            }
        } else if token != "state" {
            return Err(Error::Format(format!("unexpected token {token} in state header")));
        }
    }
    let t = t.ok_or_else(|| Error::Format("state header lacks t".into()))?;
    let dim = dim.ok_or_else(|| Error::Format("state header lacks dim".into()))?;
    let nx = nx.ok_or_else(|| Error::Format("state header lacks nx".into()))?;
    let ny = ny.ok_or_else(|| Error::Format("state header lacks ny".into()))?;
    let grid = match dim {
        1 => {
            if ny != 1 {
                return Err(Error::Format(format!("one-dimensional state with ny = {ny}")));
            }
            TorusGrid::line(nx)?
        }
        2 => TorusGrid::square(nx, ny)?,
        _ => return Err(Error::Format(format!("unsupported dim {dim}"))),
    };
    let mut h = Vec::with_capacity(grid.len());
    let mut q = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = || -> Result<f64> {
            fields
                .next()
                .ok_or_else(|| Error::Format(format!("short state row: {line}")))?
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number in state row: {e}")))
        };
        let hv = next()?;
        let qx = next()?;
        let qy = next()?;
        h.push(hv);
        q.push(Vec2::new(qx, qy));
    }
    let state = ConservedState::new(&grid, t, h, q)?;
    Ok((state, grid))
}

/// Traveling sine wave `H = h_base + amp sin(2 pi waves (x_1 - speed t))`
/// with constant velocity `(speed, 0)`, together with the body force
/// making it an exact solution of the chosen model.  The granular model
/// needs `speed != 0` so the friction direction is single-valued along
/// the wave.
pub fn traveling_wave(
    params: &ModelParams,
    h_base: f64,
    amp: f64,
    speed: f64,
    waves: u32,
) -> Result<(StrongSolution, ForceField)> {
    params.validate()?;
    let floor = h_base - amp.abs();
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "traveling wave touches zero: base {h_base}, amplitude {amp}"
        )));
    }
    if waves == 0 {
        return Err(Error::InvalidParameter("wave count must be >= 1".into()));
    }
    if params.model == Model::SavageHutter && speed == 0.0 {
        return Err(Error::InvalidParameter(
            "the granular traveling wave needs a nonzero speed".into(),
        ));
    }
    let k = 2.0 * PI * waves as f64;
    let height = move |t: f64, x: Vec2| h_base + amp * (k * (x.x - speed * t)).sin();
    let velocity = move |_: f64, _: Vec2| Vec2::new(speed, 0.0);
    // constant velocity: no gradient or time derivative to bound.
    let solution = StrongSolution::new(height, velocity, floor, (0.0, f64::INFINITY), 0.0)?;

    let slope = move |t: f64, x: Vec2| k * amp * (k * (x.x - speed * t)).cos();
    let force = match params.model {
        Model::IsentropicEuler => {
            let kappa = params.kappa;
            let gamma = params.gamma;
            let hi = h_base + amp.abs();
            let lo = floor;
            let sup = kappa * gamma * k * amp.abs() * hi.powf(gamma - 2.0).max(lo.powf(gamma - 2.0));
            ForceField::custom(
                move |t, x| {
                    let h = h_base + amp * (k * (x.x - speed * t)).sin();
                    Vec2::new(kappa * gamma * h.powf(gamma - 2.0) * slope(t, x), 0.0)
                },
                sup,
            )
        }
        Model::SavageHutter => {
            let a = params.a;
            let d = params.d;
            let sign = speed.signum();
            let sup = 2.0 * a * k * amp.abs() + d;
            ForceField::custom(move |t, x| Vec2::new(2.0 * a * slope(t, x) + d * sign, 0.0), sup)
        }
    };
    Ok((solution, force))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::stationary_defect;
    use crate::state::DRY_FLOOR;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sine_keeps_mean_mass() {
        let grid = TorusGrid::line(32).unwrap();
        let state = sine_perturbation(&grid, 1.5, 0.5, Vec2::new(0.2, 0.0)).unwrap();
        assert_abs_diff_eq!(state.total_mass(&grid), 1.5, epsilon = 1e-14);
        assert!(sine_perturbation(&grid, 1.0, 1.0, Vec2::ZERO).is_err());

        let grid = TorusGrid::square(8, 8).unwrap();
        let state = sine_perturbation(&grid, 2.0, 0.3, Vec2::ZERO).unwrap();
        assert_abs_diff_eq!(state.total_mass(&grid), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn dam_break_slab_mass() {
        let grid = TorusGrid::line(8).unwrap();
        let state = dam_break(&grid, 1.0, 0.25).unwrap();
        // high cells are the four with centers in [1/4, 3/4).
        assert_eq!(state.h, vec![0.25, 0.25, 1.0, 1.0, 1.0, 1.0, 0.25, 0.25]);
        assert_abs_diff_eq!(state.total_mass(&grid), 0.625, epsilon = 1e-15);
        assert!(dam_break(&grid, 0.25, 1.0).is_err());
    }

    #[test]
    fn tent_has_exact_central_slopes() {
        let grid = TorusGrid::line(8).unwrap();
        let params = ModelParams::savage_hutter(1.0, 1.0).unwrap();
        let state = stationary_pile(&grid, &params, 1.0, 1.0).unwrap();
        let dx = grid.dx(0);
        let slope = 0.5; // d / (2a)
        for i in 0..8 {
            let hp = state.h[grid.neighbor(i, 0, 1)];
            let hm = state.h[grid.neighbor(i, 0, -1)];
            let central = (hp - hm) / (2.0 * dx);
            let expected = match i {
                0 | 4 => 0.0,
                1..=3 => slope,
                _ => -slope,
            };
            assert_abs_diff_eq!(central, expected, epsilon = 1e-13);
        }
        // at or below the critical slope the pile is admissible...
        assert_eq!(stationary_defect(&state, &grid, &params).unwrap(), 0.0);
        let sub = stationary_pile(&grid, &params, 1.0, 0.5).unwrap();
        assert_eq!(stationary_defect(&sub, &grid, &params).unwrap(), 0.0);
        // ...and above it the defect is the slope excess.
        let steep = stationary_pile(&grid, &params, 1.0, 1.5).unwrap();
        assert_abs_diff_eq!(
            stationary_defect(&steep, &grid, &params).unwrap(),
            0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn tent_rejects_bad_grids() {
        let params = ModelParams::savage_hutter(1.0, 1.0).unwrap();
        let odd = TorusGrid::line(7).unwrap();
        assert!(stationary_pile(&odd, &params, 1.0, 1.0).is_err());
        let square = TorusGrid::square(4, 4).unwrap();
        assert!(stationary_pile(&square, &params, 1.0, 1.0).is_err());
        let gas = ModelParams::euler(1.4, 1.0).unwrap();
        let line = TorusGrid::line(8).unwrap();
        assert!(stationary_pile(&line, &gas, 1.0, 1.0).is_err());
    }

    #[test]
    fn state_file_round_trip() {
        let grid = TorusGrid::square(3, 2).unwrap();
        let state = ConservedState::new(
            &grid,
            0.75,
            vec![1.0, 0.5, 2.0 / 3.0, 0.1234567890123456, 1e-7, 3.0],
            vec![
                Vec2::new(0.1, -0.2),
                Vec2::ZERO,
                Vec2::new(1.0 / 3.0, 0.0),
                Vec2::new(-1e-15, 2e8),
                Vec2::new(5e-9, 0.0),
                Vec2::new(0.0, -0.5),
            ],
        )
        .unwrap();
        let text = state_to_string(&state, &grid);
        let (parsed, parsed_grid) = parse_state(&text).unwrap();
        assert_eq!(parsed_grid.shape(), grid.shape());
        assert_eq!(parsed.t, state.t);
        assert_eq!(parsed.h, state.h);
        assert_eq!(parsed.q, state.q);

        assert!(parse_state("").is_err());
        assert!(parse_state("# state t=0 dim=3 nx=2 ny=2\n").is_err());
    }

    #[test]
    fn traveling_wave_satisfies_both_balance_laws() {
        // finite-difference residual of mass and first momentum component
        // at scattered points, for both models.
        let delta = 1e-5;
        let cases = [
            ModelParams::euler(1.4, 0.7).unwrap(),
            ModelParams::euler(2.0, 1.0).unwrap(),
            ModelParams::savage_hutter(0.8, 1.2).unwrap(),
        ];
        for params in cases {
            let (sol, force) = traveling_wave(&params, 1.5, 0.4, 0.6, 2).unwrap();
            let h = |t: f64, x: f64| sol.height(t, Vec2::new(x, 0.0));
            let ux = 0.6;
            for &(t, x) in &[(0.1, 0.2), (0.4, 0.55), (0.9, 0.83)] {
                let dt_h = (h(t + delta, x) - h(t - delta, x)) / (2.0 * delta);
                let dx_hu = (h(t, x + delta) - h(t, x - delta)) / (2.0 * delta) * ux;
                assert_abs_diff_eq!(dt_h + dx_hu, 0.0, epsilon = 1e-7);

                let p = |hh: f64| crate::physics::pressure(hh, &params);
                let flux = |tt: f64, xx: f64| h(tt, xx) * ux * ux + p(h(tt, xx));
                let dt_q = (h(t + delta, x) - h(t - delta, x)) / (2.0 * delta) * ux;
                let dx_flux = (flux(t, x + delta) - flux(t, x - delta)) / (2.0 * delta);
                let source = match params.model {
                    Model::IsentropicEuler => h(t, x) * force.eval(t, Vec2::new(x, 0.0)).x,
                    Model::SavageHutter => {
                        h(t, x) * (force.eval(t, Vec2::new(x, 0.0)).x - params.d * ux.signum())
                    }
                };
                assert_abs_diff_eq!(dt_q + dx_flux - source, 0.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn traveling_wave_floor_and_speed_checks() {
        let gas = ModelParams::euler(1.4, 1.0).unwrap();
        assert!(traveling_wave(&gas, 1.0, 1.0, 0.5, 1).is_err());
        assert!(traveling_wave(&gas, 1.0, 0.5, 0.5, 0).is_err());
        assert!(traveling_wave(&gas, 1.0, 0.5, 0.0, 1).is_ok());
        let granular = ModelParams::savage_hutter(1.0, 1.0).unwrap();
        assert!(traveling_wave(&granular, 1.0, 0.5, 0.0, 1).is_err());
        let (sol, force) = traveling_wave(&granular, 1.5, 0.4, 0.6, 1).unwrap();
        assert_abs_diff_eq!(sol.floor, 1.1, epsilon = 1e-15);
        // sup norm: 2 a (2 pi amp) + d
        assert_abs_diff_eq!(
            force.sup_norm(),
            2.0 * 2.0 * std::f64::consts::PI * 0.4 + 1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn constant_preset_validates() {
        let grid = TorusGrid::line(4).unwrap();
        assert!(constant(&grid, -1.0, Vec2::ZERO).is_err());
        let state = constant(&grid, 2.0, Vec2::new(0.5, 0.0)).unwrap();
        assert_eq!(state.q[0], Vec2::new(1.0, 0.0));
        let _ = DRY_FLOOR;
    }
}
