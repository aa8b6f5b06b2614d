//! Measure-valued fields: per-cell mixtures of finite-amplitude atoms plus a
//! concentration part living on the amplitude sphere at infinity.
//!
//! Points are pairs `(lambda1, lambda_prime)` standing for `(h, sqrt(h) u)`.
//! The anisotropic radius treats `lambda1` with weight `q` and `lambda_prime`
//! with weight `p`, so the scaling-critical observables (pressure power,
//! kinetic term, momentum flux) are exactly homogeneous of degree `p * q`.

pub mod integrand;
pub mod io;

use crate::algebra::Vec2;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::model::{Model, ModelParams};
use crate::physics::friction_prox;
use crate::state::ConservedState;

use integrand::{Integrand, MomentValue};

/// Tolerance for probability-weight normalization checks.
const WEIGHT_TOL: f64 = 1e-12;
/// Tolerance for the unit-sphere constraint on concentration directions.
const SPHERE_TOL: f64 = 1e-12;

/// Scaling exponents of the amplitude geometry: `lambda1` carries degree `q`,
/// `lambda_prime` degree `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
}

impl Exponents {
    /// Exponents matched to the model: the gas law couples the height power
    /// to `gamma`, the granular law is quadratic.
    pub fn for_params(params: &ModelParams) -> Exponents {
        match params.model {
            Model::IsentropicEuler => Exponents { p: params.gamma, q: 2.0 },
            Model::SavageHutter => Exponents { p: 2.0, q: 2.0 },
        }
    }

    /// Anisotropic radius `(lambda1^(2p) + |lambda_prime|^(2q))^(1/(2pq))`.
    /// Homogeneous of degree 1 under `dilate`.
    pub fn radius(&self, lambda1: f64, lambda_prime: Vec2) -> f64 {
        (lambda1.powf(2.0 * self.p) + lambda_prime.norm().powf(2.0 * self.q))
            .powf(1.0 / (2.0 * self.p * self.q))
    }

    /// Radial projection onto the unit sphere `radius == 1`. Requires a
    /// point with positive radius.
    pub fn project(&self, lambda1: f64, lambda_prime: Vec2) -> (f64, Vec2) {
        let r = self.radius(lambda1, lambda_prime);
        debug_assert!(r > 0.0, "cannot project the origin");
        (lambda1 / r.powf(self.q), lambda_prime / r.powf(self.p))
    }

    /// Anisotropic dilation by `s >= 0`: `(s^q lambda1, s^p lambda_prime)`.
    pub fn dilate(&self, s: f64, lambda1: f64, lambda_prime: Vec2) -> (f64, Vec2) {
        (s.powf(self.q) * lambda1, lambda_prime * s.powf(self.p))
    }

    /// Distance of `(beta1, beta_prime)` from the unit sphere, measured on
    /// the defining polynomial.
    pub fn sphere_defect(&self, beta1: f64, beta_prime: Vec2) -> f64 {
        (beta1.powf(2.0 * self.p) + beta_prime.norm().powf(2.0 * self.q) - 1.0).abs()
    }
}

/// Finite-amplitude atom: point mass at `(lambda1, lambda_prime)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub lambda1: f64,
    pub lambda_prime: Vec2,
}

/// Direction atom of the concentration part, on the unit amplitude sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereAtom {
    pub weight: f64,
    pub beta1: f64,
    pub beta_prime: Vec2,
}

/// One cell's measure: a probability mixture of atoms, plus `conc_mass`
/// units of concentration distributed over `sphere_atoms` (themselves a
/// probability mixture when present).
#[derive(Clone, Debug, PartialEq)]
pub struct YoungMeasureCell {
    pub atoms: Vec<Atom>,
    pub conc_mass: f64,
    pub sphere_atoms: Vec<SphereAtom>,
}

impl YoungMeasureCell {
    /// Point mass with no concentration.
    pub fn dirac(lambda1: f64, lambda_prime: Vec2) -> YoungMeasureCell {
        YoungMeasureCell {
            atoms: vec![Atom { weight: 1.0, lambda1, lambda_prime }],
            conc_mass: 0.0,
            sphere_atoms: Vec::new(),
        }
    }

    pub fn validate(&self, exponents: &Exponents) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::InvalidParameter("cell needs at least one atom".into()));
        }
        let mut total = 0.0;
        for atom in &self.atoms {
            if !(atom.weight >= 0.0 && atom.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!("atom weight {}", atom.weight)));
            }
            if !(atom.lambda1 >= 0.0 && atom.lambda1.is_finite()) {
                return Err(Error::InvalidParameter(format!("atom height {}", atom.lambda1)));
            }
            if !atom.lambda_prime.is_finite() {
                return Err(Error::InvalidParameter("non-finite atom velocity part".into()));
            }
            total += atom.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!("atom weights sum to {total}")));
        }
        if !(self.conc_mass >= 0.0 && self.conc_mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("concentration mass {}", self.conc_mass)));
        }
        if self.conc_mass == 0.0 {
            if !self.sphere_atoms.is_empty() {
                return Err(Error::InvalidParameter(
                    "sphere atoms present with zero concentration mass".into(),
                ));
            }
            return Ok(());
        }
        if self.sphere_atoms.is_empty() {
            return Err(Error::InvalidParameter(
                "positive concentration mass needs sphere atoms".into(),
            ));
        }
        let mut sphere_total = 0.0;
        for s in &self.sphere_atoms {
            if !(s.weight >= 0.0 && s.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!("sphere weight {}", s.weight)));
            }
            if !(s.beta1 >= 0.0 && s.beta1.is_finite() && s.beta_prime.is_finite()) {
                return Err(Error::InvalidParameter("bad sphere direction".into()));
            }
            let defect = exponents.sphere_defect(s.beta1, s.beta_prime);
            if defect > SPHERE_TOL {
                return Err(Error::InvalidParameter(format!("sphere constraint off by {defect}")));
            }
            sphere_total += s.weight;
        }
        if (sphere_total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!("sphere weights sum to {sphere_total}")));
        }
        Ok(())
    }

    /// Expectation of `g`: atom part plus `conc_mass` times the recession
    /// average over the sphere atoms.
    pub fn moment<T: MomentValue>(&self, g: &Integrand<T>) -> T {
        let mut acc = T::zero();
        for atom in &self.atoms {
            acc = acc.add(g.eval(atom.lambda1, atom.lambda_prime).scale(atom.weight));
        }
        if self.conc_mass > 0.0 {
            let mut c = T::zero();
            for s in &self.sphere_atoms {
                c = c.add(g.recession(s.beta1, s.beta_prime).scale(s.weight));
            }
            acc = acc.add(c.scale(self.conc_mass));
        }
        acc
    }
}

/// Measure-valued field on the torus at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct YoungMeasureField {
    pub grid: TorusGrid,
    pub t: f64,
    pub exponents: Exponents,
    pub cells: Vec<YoungMeasureCell>,
}

impl YoungMeasureField {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() {
            return Err(Error::NonFinite { t: self.t });
        }
        if self.cells.len() != self.grid.len() {
            return Err(Error::LengthMismatch { expected: self.grid.len(), got: self.cells.len() });
        }
        if !(self.exponents.p > 1.0 && self.exponents.q > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "exponents must exceed 1, got p={} q={}",
                self.exponents.p, self.exponents.q
            )));
        }
        for cell in &self.cells {
            cell.validate(&self.exponents)?;
        }
        Ok(())
    }

    /// Per-cell expectations of `g`.
    pub fn moment<T: MomentValue>(&self, g: &Integrand<T>) -> Vec<T> {
        self.cells.iter().map(|cell| cell.moment(g)).collect()
    }

    /// Integral of the expectation over the torus.
    pub fn integral_moment<T: MomentValue>(&self, g: &Integrand<T>) -> T {
        let mut acc = T::zero();
        for cell in &self.cells {
            acc = acc.add(cell.moment(g));
        }
        acc.scale(self.grid.cell_measure())
    }
}

fn lifted_velocity(h: f64, q: Vec2, floor: f64) -> Vec2 {
    if h > floor {
        q / h.sqrt()
    } else {
        Vec2::ZERO
    }
}

/// Dirac field of a single state: one atom `(h, q / sqrt(h))` per cell.
pub fn from_state(
    state: &ConservedState,
    grid: &TorusGrid,
    params: &ModelParams,
    floor: f64,
) -> Result<YoungMeasureField> {
    state.validate(grid)?;
    let exponents = Exponents::for_params(params);
    let cells = state
        .h
        .iter()
        .zip(&state.q)
        .map(|(&h, &q)| YoungMeasureCell::dirac(h, lifted_velocity(h, q, floor)))
        .collect();
    Ok(YoungMeasureField { grid: grid.clone(), t: state.t, exponents, cells })
}

/// Empirical field of an ensemble of states at a common time.
///
/// Samples with radius at most `cutoff` become equal-weight atoms. Samples
/// beyond the cutoff are moved to the sphere: each contributes its
/// `radius^(p*q)` (averaged over the ensemble) to the concentration mass
/// and a direction atom at its radial projection, weighted by its share of
/// that mass. This preserves the ensemble mean of every scaling-critical
/// observable exactly. A cell whose samples all escape keeps a vacuum atom
/// so the atom part stays a probability measure.
pub fn from_ensemble(
    states: &[ConservedState],
    grid: &TorusGrid,
    params: &ModelParams,
    cutoff: f64,
    floor: f64,
) -> Result<YoungMeasureField> {
    if states.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    let t = states[0].t;
    for state in states {
        state.validate(grid)?;
        if state.t != t {
            return Err(Error::InvalidParameter(format!(
                "ensemble times differ: {} vs {t}",
                state.t
            )));
        }
    }
    let exponents = Exponents::for_params(params);
    let pq = exponents.p * exponents.q;
    let count = states.len() as f64;

    let mut cells = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let mut kept: Vec<(f64, Vec2)> = Vec::new();
        let mut escaped: Vec<(f64, f64, Vec2)> = Vec::new();
        for state in states {
            let lambda1 = state.h[idx];
            let lambda_prime = lifted_velocity(lambda1, state.q[idx], floor);
            let r = exponents.radius(lambda1, lambda_prime);
            if r <= cutoff {
                kept.push((lambda1, lambda_prime));
            } else {
                let (b1, bp) = exponents.project(lambda1, lambda_prime);
                escaped.push((r.powf(pq), b1, bp));
            }
        }
        let atoms = if kept.is_empty() {
            vec![Atom { weight: 1.0, lambda1: 0.0, lambda_prime: Vec2::ZERO }]
        } else {
            let w = 1.0 / kept.len() as f64;
            kept.into_iter()
                .map(|(lambda1, lambda_prime)| Atom { weight: w, lambda1, lambda_prime })
                .collect()
        };
        let total_mass: f64 = escaped.iter().map(|(m, _, _)| m).sum();
        let (conc_mass, sphere_atoms) = if escaped.is_empty() {
            (0.0, Vec::new())
        } else {
            let spheres = escaped
                .into_iter()
                .map(|(m, beta1, beta_prime)| SphereAtom {
                    weight: m / total_mass,
                    beta1,
                    beta_prime,
                })
                .collect();
            (total_mass / count, spheres)
        };
        cells.push(YoungMeasureCell { atoms, conc_mass, sphere_atoms });
    }
    let field = YoungMeasureField { grid: grid.clone(), t, exponents, cells };
    field.validate()?;
    Ok(field)
}

/// Default escape cutoff for `from_ensemble`: ten times the mean sample
/// radius, or 1 when the ensemble is entirely at rest and empty.
pub fn default_cutoff(states: &[ConservedState], exponents: &Exponents, floor: f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for state in states {
        for (&h, &q) in state.h.iter().zip(&state.q) {
            sum += exponents.radius(h, lifted_velocity(h, q, floor));
            n += 1;
        }
    }
    if n == 0 || sum == 0.0 {
        return 1.0;
    }
    10.0 * sum / n as f64
}

/// Image of the field under the friction resolvent: each atom's velocity
/// part moves by one implicit friction step,
/// `lambda_prime -> prox(lambda_prime + sqrt(lambda1) f(t, x), d)`,
/// with the body force lifted by `sqrt(lambda1)`. Heights and the
/// concentration part are untouched. Granular model only.
pub fn pushforward_resolvent(
    field: &YoungMeasureField,
    params: &ModelParams,
) -> Result<YoungMeasureField> {
    if params.model != Model::SavageHutter {
        return Err(Error::WrongModel { required: Model::SavageHutter });
    }
    let mut out = field.clone();
    for (idx, cell) in out.cells.iter_mut().enumerate() {
        let f_cell = params.force.eval(field.t, field.grid.center(idx));
        for atom in &mut cell.atoms {
            let lift = f_cell * atom.lambda1.sqrt();
            atom.lambda_prime = friction_prox(atom.lambda_prime + lift, params.d);
        }
    }
    Ok(out)
}

/// Inverse of the resolvent map on non-arrested images: recovers the point
/// whose resolvent is `w`. Arrested images (`w = 0`) have no unique
/// preimage.
pub fn resolvent_inverse(w: Vec2, d: f64, f_lift: Vec2) -> Option<Vec2> {
    let n = w.norm();
    if n == 0.0 {
        return None;
    }
    Some(w + w * (d / n) - f_lift)
}

/// Numerical distance between the dilated integrand at scale `s` and its
/// limit profile at `(beta1, beta_prime)`:
/// `| s^(-pq) g(dilate(s, beta)) - g_limit(beta) |`.
pub fn recession_check<T: MomentValue>(
    g: &Integrand<T>,
    exponents: &Exponents,
    beta1: f64,
    beta_prime: Vec2,
    s: f64,
) -> f64 {
    let (l1, lp) = exponents.dilate(s, beta1, beta_prime);
    let scaled = g.eval(l1, lp).scale(s.powf(-exponents.p * exponents.q));
    scaled.add(g.recession(beta1, beta_prime).scale(-1.0)).magnitude()
}

#[cfg(test)]
mod tests {
    use super::integrand::{
        height, kinetic, momentum, momentum_flux, momentum_norm, pressure_power, Integrand,
    };
    use super::*;
    use crate::model::ForceField;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn sh_params() -> ModelParams {
        ModelParams::savage_hutter(1.0, 1.0).unwrap()
    }

    fn quad_exponents() -> Exponents {
        Exponents { p: 2.0, q: 2.0 }
    }

    #[test]
    fn exponents_follow_model() {
        let gas = ModelParams::euler(1.4, 1.0).unwrap();
        assert_eq!(Exponents::for_params(&gas), Exponents { p: 1.4, q: 2.0 });
        assert_eq!(Exponents::for_params(&sh_params()), quad_exponents());
    }

    #[test]
    fn radius_and_projection() {
        let exps = quad_exponents();
        // lambda1 = 100, lambda_prime = (100, 0): radius^8 = 2e16.
        let lp = Vec2::new(100.0, 0.0);
        let r = exps.radius(100.0, lp);
        assert_relative_eq!(r, (2.0_f64 * 1e8).powf(0.125), max_relative = 1e-14);
        let (b1, bp) = exps.project(100.0, lp);
        assert_abs_diff_eq!(exps.sphere_defect(b1, bp), 0.0, epsilon = 1e-14);
        assert_relative_eq!(b1, 2.0_f64.powf(-0.25), max_relative = 1e-13);
        assert_relative_eq!(bp.x, 2.0_f64.powf(-0.25), max_relative = 1e-13);
        assert_eq!(bp.y, 0.0);

        // A pure-height point projects to the pole beta1 = 1.
        let (b1, bp) = exps.project(7.0, Vec2::ZERO);
        assert_relative_eq!(b1, 1.0, max_relative = 1e-14);
        assert_eq!(bp, Vec2::ZERO);
    }

    #[test]
    fn dirac_moments_match_point_values() {
        let cell = YoungMeasureCell::dirac(4.0, Vec2::new(2.0, 0.0));
        assert_eq!(cell.moment(&height()), 4.0);
        let m = cell.moment(&momentum());
        assert_eq!((m.x, m.y), (4.0, 0.0));
        assert_eq!(cell.moment(&kinetic()), 4.0);
        assert_eq!(cell.moment(&pressure_power(2.0)), 16.0);
    }

    #[test]
    fn two_point_mixture_averages() {
        let cell = YoungMeasureCell {
            atoms: vec![
                Atom { weight: 0.5, lambda1: 1.0, lambda_prime: Vec2::ZERO },
                Atom { weight: 0.5, lambda1: 3.0, lambda_prime: Vec2::ZERO },
            ],
            conc_mass: 0.0,
            sphere_atoms: Vec::new(),
        };
        assert_eq!(cell.moment(&height()), 2.0);
        assert_eq!(cell.moment(&pressure_power(2.0)), 5.0);
    }

    #[test]
    fn concentration_feeds_critical_observables_only() {
        let cell = YoungMeasureCell {
            atoms: vec![Atom { weight: 1.0, lambda1: 1.0, lambda_prime: Vec2::ZERO }],
            conc_mass: 4.5,
            sphere_atoms: vec![SphereAtom {
                weight: 1.0,
                beta1: 0.0,
                beta_prime: Vec2::new(1.0, 0.0),
            }],
        };
        cell.validate(&quad_exponents()).unwrap();
        assert_eq!(cell.moment(&kinetic()), 4.5);
        assert_eq!(cell.moment(&height()), 1.0);
        assert_eq!(cell.moment(&momentum()), Vec2::ZERO);
        assert_eq!(cell.moment(&momentum_norm()), 0.0);
        let flux = cell.moment(&momentum_flux());
        assert_eq!(flux.entry(0, 0), 4.5);
        assert_eq!(flux.entry(1, 1), 0.0);
    }

    #[test]
    fn from_state_lifts_velocity() {
        let grid = TorusGrid::line(2).unwrap();
        let state = ConservedState::new(
            &grid,
            0.25,
            vec![4.0, 0.0],
            vec![Vec2::new(8.0, 0.0), Vec2::ZERO],
        )
        .unwrap();
        let field = from_state(&state, &grid, &sh_params(), crate::state::DRY_FLOOR).unwrap();
        field.validate().unwrap();
        assert_eq!(field.t, 0.25);
        // q / sqrt(h) = 8 / 2 = 4.
        assert_eq!(field.cells[0].atoms[0].lambda_prime, Vec2::new(4.0, 0.0));
        assert_eq!(field.cells[1].atoms[0].lambda_prime, Vec2::ZERO);
        let m = field.integral_moment(&momentum());
        assert_abs_diff_eq!(m.x, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn ensemble_escape_preserves_kinetic_mean() {
        let grid = TorusGrid::line(1).unwrap();
        let calm = ConservedState::new(&grid, 0.0, vec![1.0], vec![Vec2::ZERO]).unwrap();
        let wild =
            ConservedState::new(&grid, 0.0, vec![100.0], vec![Vec2::new(1000.0, 0.0)]).unwrap();
        let field = from_ensemble(
            &[calm, wild],
            &grid,
            &sh_params(),
            5.0,
            crate::state::DRY_FLOOR,
        )
        .unwrap();
        let cell = &field.cells[0];
        assert_eq!(cell.atoms.len(), 1);
        assert_eq!(cell.atoms[0].weight, 1.0);
        assert_eq!(cell.sphere_atoms.len(), 1);
        // Ensemble mean of h |u|^2 is (0 + 100 * 100) / 2 = 5000; the escaped
        // sample's contribution is reproduced exactly and the kept atom is
        // at rest.
        assert_relative_eq!(cell.moment(&kinetic()), 5000.0, max_relative = 1e-12);
        // For h^2 the concentration again carries exactly half of 100^2;
        // the kept atom re-enters with weight 1 after renormalization.
        assert_relative_eq!(cell.moment(&pressure_power(2.0)), 5001.0, max_relative = 1e-12);
        // Momentum has zero recession, so only the kept atom contributes.
        assert_eq!(cell.moment(&momentum()), Vec2::ZERO);
    }

    #[test]
    fn ensemble_all_escaped_leaves_vacuum_atom() {
        let grid = TorusGrid::line(1).unwrap();
        let wild =
            ConservedState::new(&grid, 0.0, vec![50.0], vec![Vec2::new(500.0, 0.0)]).unwrap();
        let field =
            from_ensemble(&[wild], &grid, &sh_params(), 1.0, crate::state::DRY_FLOOR).unwrap();
        let cell = &field.cells[0];
        assert_eq!(cell.atoms.len(), 1);
        assert_eq!(cell.atoms[0].lambda1, 0.0);
        assert!(cell.conc_mass > 0.0);
        assert_relative_eq!(cell.moment(&kinetic()), 50.0 * 100.0, max_relative = 1e-12);
    }

    #[test]
    fn ensemble_sanity_checks() {
        let grid = TorusGrid::line(2).unwrap();
        assert!(matches!(
            from_ensemble(&[], &grid, &sh_params(), 1.0, crate::state::DRY_FLOOR),
            Err(Error::EmptyEnsemble)
        ));
        let a = ConservedState::constant(&grid, 1.0, Vec2::ZERO);
        let mut b = ConservedState::constant(&grid, 1.0, Vec2::ZERO);
        b.t = 0.5;
        assert!(from_ensemble(&[a.clone(), b], &grid, &sh_params(), 1.0, 1e-12).is_err());
        assert!(from_ensemble(&[a], &grid, &sh_params(), 0.0, 1e-12).is_err());
    }

    #[test]
    fn default_cutoff_scales_with_amplitude() {
        let grid = TorusGrid::line(4).unwrap();
        let state = ConservedState::constant(&grid, 1.0, Vec2::ZERO);
        let exps = quad_exponents();
        // Every sample has radius 1, so the cutoff is 10.
        assert_relative_eq!(default_cutoff(&[state], &exps, 1e-12), 10.0, max_relative = 1e-14);
        let rest = ConservedState::constant(&grid, 0.0, Vec2::ZERO);
        assert_eq!(default_cutoff(&[rest], &exps, 1e-12), 1.0);
        assert_eq!(default_cutoff(&[], &exps, 1e-12), 1.0);
    }

    #[test]
    fn resolvent_pushforward_matches_prox_pointwise() {
        let grid = TorusGrid::line(3).unwrap();
        let params = sh_params().with_force(ForceField::Constant(Vec2::new(0.5, 0.0)));
        let state = ConservedState::new(
            &grid,
            0.0,
            vec![4.0, 1.0, 1.0],
            vec![Vec2::new(8.0, 0.0), Vec2::new(0.2, 0.0), Vec2::ZERO],
        )
        .unwrap();
        let field = from_state(&state, &grid, &params, crate::state::DRY_FLOOR).unwrap();
        let pushed = pushforward_resolvent(&field, &params).unwrap();
        pushed.validate().unwrap();

        // Cell 0: lambda_prime = (4,0), lift = 2 * (0.5,0) = (1,0), prox of
        // (5,0) at strength 1 gives (4,0): a fixed point here.
        assert_abs_diff_eq!(pushed.cells[0].atoms[0].lambda_prime.x, 4.0, epsilon = 1e-14);
        // Cell 1: (0.2,0) + (0.5,0) = (0.7,0), inside the friction ball.
        assert_eq!(pushed.cells[1].atoms[0].lambda_prime, Vec2::ZERO);
        // Cell 2: starts at rest; the lifted force alone cannot escape the ball.
        assert_eq!(pushed.cells[2].atoms[0].lambda_prime, Vec2::ZERO);
        // Heights and concentration untouched.
        assert_eq!(pushed.cells[0].atoms[0].lambda1, 4.0);

        assert!(matches!(
            pushforward_resolvent(&field, &ModelParams::euler(1.4, 1.0).unwrap()),
            Err(Error::WrongModel { .. })
        ));
    }

    #[test]
    fn resolvent_inverse_round_trip() {
        let d = 0.7;
        let f_lift = Vec2::new(0.3, -0.1);
        for w in [Vec2::new(1.0, 2.0), Vec2::new(-0.4, 0.0), Vec2::new(0.0, 5.0)] {
            let v = resolvent_inverse(w, d, f_lift).unwrap();
            let back = friction_prox(v + f_lift, d);
            assert_abs_diff_eq!((back - w).norm(), 0.0, epsilon = 1e-10);
        }
        assert_eq!(resolvent_inverse(Vec2::ZERO, d, f_lift), None);
    }

    #[test]
    fn recession_limits_at_large_scale() {
        let exps = quad_exponents();
        let (b1, bp) = exps.project(1.0, Vec2::new(1.0, 0.5));
        let s = 1e6;
        // Critical observables agree with their limit profile exactly.
        assert!(recession_check(&kinetic(), &exps, b1, bp, s) <= 1e-12);
        assert!(recession_check(&momentum_flux(), &exps, b1, bp, s) <= 1e-12);
        assert!(recession_check(&pressure_power(2.0), &exps, b1, bp, s) <= 1e-12);
        // Subcritical ones decay like a negative power of s.
        assert!(recession_check(&height(), &exps, b1, bp, s) <= 1e-6);
        assert!(recession_check(&momentum(), &exps, b1, bp, s) <= 1e-5);
        assert!(recession_check(&momentum_norm(), &exps, b1, bp, s) <= 1e-5);
    }

    fn arb_cell() -> impl Strategy<Value = YoungMeasureCell> {
        let atom = (0.1_f64..5.0, 0.0_f64..3.0, -3.0_f64..3.0, -3.0_f64..3.0);
        let conc = prop_oneof![Just(0.0), 0.1_f64..4.0];
        (proptest::collection::vec(atom, 1..5), conc, 0.1_f64..1.5, -1.5_f64..1.5, -1.5_f64..1.5)
            .prop_map(|(raw, conc_mass, c1, cx, cy)| {
                let total: f64 = raw.iter().map(|r| r.0).sum();
                let atoms = raw
                    .into_iter()
                    .map(|(w, l1, lx, ly)| Atom {
                        weight: w / total,
                        lambda1: l1,
                        lambda_prime: Vec2::new(lx, ly),
                    })
                    .collect();
                let sphere_atoms = if conc_mass > 0.0 {
                    let exps = Exponents { p: 2.0, q: 2.0 };
                    let (b1, bp) = exps.project(c1, Vec2::new(cx, cy));
                    vec![SphereAtom { weight: 1.0, beta1: b1, beta_prime: bp }]
                } else {
                    Vec::new()
                };
                YoungMeasureCell { atoms, conc_mass, sphere_atoms }
            })
    }

    proptest! {
        // Dilation by 1/radius always lands on the unit sphere.
        #[test]
        fn projection_lands_on_sphere(
            l1 in 1e-6_f64..1e6,
            lx in -1e3_f64..1e3,
            ly in -1e3_f64..1e3,
            p in 1.1_f64..3.0,
        ) {
            let exps = Exponents { p, q: 2.0 };
            let (b1, bp) = exps.project(l1, Vec2::new(lx, ly));
            prop_assert!(exps.sphere_defect(b1, bp) <= 1e-12);
        }

        // The radius is homogeneous of degree 1 under the dilation.
        #[test]
        fn radius_dilation_homogeneous(
            l1 in 0.0_f64..10.0,
            lx in -10.0_f64..10.0,
            s in 0.01_f64..100.0,
            p in 1.1_f64..3.0,
        ) {
            let exps = Exponents { p, q: 2.0 };
            let lp = Vec2::new(lx, 0.3);
            let (d1, dp) = exps.dilate(s, l1, lp);
            let r = exps.radius(l1, lp);
            prop_assert!((exps.radius(d1, dp) - s * r).abs() <= 1e-10 * (s * r).max(1.0));
        }

        // Splitting an atom into two half-weight copies changes no moment.
        #[test]
        fn moments_invariant_under_atom_refinement(cell in arb_cell()) {
            let mut split = cell.clone();
            let first = split.atoms[0];
            split.atoms[0] = Atom { weight: first.weight / 2.0, ..first };
            split.atoms.push(Atom { weight: first.weight / 2.0, ..first });
            for g in [height(), kinetic(), momentum_norm(), pressure_power(2.0)] {
                let a = cell.moment(&g);
                let b = split.moment(&g);
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
            let a = cell.moment(&momentum());
            let b = split.moment(&momentum());
            prop_assert!((a.add(b.scale(-1.0))).magnitude() <= 1e-12 * a.magnitude().max(1.0));
        }

        // Averaging before applying a convex power understates the average
        // of the power: <sqrt(l1)|lp|>^(4/3) <= <l1^(2/3) |lp|^(4/3)>, with
        // the concentration only enlarging the right side.
        #[test]
        fn convex_power_of_mean_bounded_by_mean_of_power(cell in arb_cell()) {
            let lhs = cell.moment(&momentum_norm()).powf(4.0 / 3.0);
            let g43 = Integrand::new(
                "h23u43",
                |l1: f64, lp: Vec2| l1.powf(2.0 / 3.0) * lp.norm().powf(4.0 / 3.0),
                |b1: f64, bp: Vec2| b1.powf(2.0 / 3.0) * bp.norm().powf(4.0 / 3.0),
            );
            let rhs = cell.moment(&g43);
            prop_assert!(lhs <= rhs + 1e-12 * rhs.max(1.0));
        }

        // Moments are linear in the integrand.
        #[test]
        fn moments_linear_in_integrand(cell in arb_cell(), alpha in -3.0_f64..3.0) {
            let combined = Integrand::new(
                "alpha*h + h^2",
                move |l1: f64, _| alpha * l1 + l1 * l1,
                move |b1: f64, _| b1 * b1,
            );
            let lhs = cell.moment(&combined);
            let rhs = alpha * cell.moment(&height()) + cell.moment(&pressure_power(2.0));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        // Random cells built by the strategy satisfy the full invariant set.
        #[test]
        fn generated_cells_validate(cell in arb_cell()) {
            let exps = quad_exponents();
            prop_assert!(cell.validate(&exps).is_ok());
        }
    }
}
