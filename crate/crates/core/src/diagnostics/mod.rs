//! Energy bookkeeping on measure-valued fields: total and relative energy,
//! admissibility defects against the work done by external forces, the
//! closed-form momentum comparison bound with its stopping time, and
//! exponential-growth verification for the weak-strong comparison.

pub mod residual;
pub mod series;

use crate::error::{Error, Result};
use crate::model::{Model, ModelParams};
use crate::state::{sample_strong, StrongSolution};
use crate::young::integrand::catalog;
use crate::young::{Exponents, YoungMeasureField};

pub use series::{build_series, DiagnosticsSeries};

fn check_exponents(field: &YoungMeasureField, params: &ModelParams) -> Result<()> {
    let expected = Exponents::for_params(params);
    if field.exponents != expected {
        return Err(Error::InvalidParameter(format!(
            "field exponents {:?} do not match model {:?}",
            field.exponents, expected
        )));
    }
    Ok(())
}

pub(crate) fn check_snapshot_sequence(
    fields: &[YoungMeasureField],
    params: &ModelParams,
) -> Result<()> {
    if fields.len() < 2 {
        return Err(Error::InvalidParameter("need at least two snapshots".into()));
    }
    for field in fields {
        check_exponents(field, params)?;
        if field.grid != fields[0].grid {
            return Err(Error::InvalidParameter("snapshots on different grids".into()));
        }
    }
    for pair in fields.windows(2) {
        if !(pair[1].t > pair[0].t) {
            return Err(Error::InvalidParameter(format!(
                "snapshot times not increasing: {} then {}",
                pair[0].t, pair[1].t
            )));
        }
    }
    Ok(())
}

/// Cumulative trapezoid integral of `values` over `times`; starts at 0.
pub(crate) fn trapezoid_cumulative(times: &[f64], values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(times.len(), values.len());
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..times.len() {
        acc += 0.5 * (values[k - 1] + values[k]) * (times[k] - times[k - 1]);
        out.push(acc);
    }
    out
}

pub(crate) fn trapezoid_total(times: &[f64], values: &[f64]) -> f64 {
    *trapezoid_cumulative(times, values).last().unwrap_or(&0.0)
}

/// Total energy of the field: kinetic half plus the model's height energy
/// (`kappa/(gamma-1) h^gamma` for gas, `a h^2` for granular flow), with the
/// concentration part included through the moment recession.
pub fn energy(field: &YoungMeasureField, params: &ModelParams) -> Result<f64> {
    check_exponents(field, params)?;
    let cat = catalog(params);
    let kin = field.integral_moment(&cat.kinetic);
    let press = field.integral_moment(&cat.pressure);
    Ok(match params.model {
        Model::IsentropicEuler => 0.5 * kin + params.kappa / (params.gamma - 1.0) * press,
        Model::SavageHutter => 0.5 * kin + params.a * press,
    })
}

/// Form of the granular work term in the energy balance.
///
/// `Separate` charges friction `d` against the speed moment and credits the
/// body force independently; `Lumped` multiplies the whole bracket by `d`
/// (an alternative reading of the displayed inequality, kept for
/// comparison).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WorkForm {
    #[default]
    Separate,
    Lumped,
}

/// Instantaneous power fed into the field by the source terms.
fn work_rate(field: &YoungMeasureField, params: &ModelParams, form: WorkForm) -> f64 {
    let cat = catalog(params);
    let mhu = field.moment(&cat.momentum);
    let mut rate = 0.0;
    match params.model {
        Model::IsentropicEuler => {
            if !params.force.is_zero() {
                for (idx, m) in mhu.iter().enumerate() {
                    let g = params.force.eval(field.t, field.grid.center(idx));
                    rate += g.dot(*m);
                }
            }
        }
        Model::SavageHutter => {
            let mnorm = field.moment(&cat.momentum_norm);
            for idx in 0..field.len() {
                let f = params.force.eval(field.t, field.grid.center(idx));
                rate -= match form {
                    WorkForm::Separate => params.d * mnorm[idx] - f.dot(mhu[idx]),
                    WorkForm::Lumped => params.d * (mnorm[idx] - f.dot(mhu[idx])),
                };
            }
        }
    }
    rate * field.grid.cell_measure()
}

/// Positive part of the energy excess `E(t) - E(0) - W(t)` per snapshot,
/// with the work `W` accumulated by the trapezoid rule. Zero everywhere
/// means the sequence is admissible at the recorded resolution.
pub fn admissibility_defect(
    fields: &[YoungMeasureField],
    params: &ModelParams,
    form: WorkForm,
) -> Result<Vec<f64>> {
    check_snapshot_sequence(fields, params)?;
    let times: Vec<f64> = fields.iter().map(|f| f.t).collect();
    let rates: Vec<f64> = fields.iter().map(|f| work_rate(f, params, form)).collect();
    let work = trapezoid_cumulative(&times, &rates);
    let e0 = energy(&fields[0], params)?;
    let mut out = Vec::with_capacity(fields.len());
    for (field, w) in fields.iter().zip(&work) {
        let e = energy(field, params)?;
        out.push((e - e0 - w).max(0.0));
    }
    Ok(out)
}

/// Integral `M(t)` of the speed moment `<sqrt(lambda1)|lambda_prime|>`,
/// one value per field. Concentrations never contribute (zero recession).
pub fn momentum_series(fields: &[YoungMeasureField]) -> Vec<f64> {
    let g = crate::young::integrand::momentum_norm();
    fields.iter().map(|f| f.integral_moment(&g)).collect()
}

/// Kinetic and height parts of the relative energy; their sum is the
/// distance functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeEnergyParts {
    pub kinetic: f64,
    pub pressure: f64,
}

/// Relative energy between the field and a smooth reference `(H, U)`,
/// split into its kinetic part `1/2 <|lambda_prime - sqrt(lambda1) U|^2>`
/// and the Bregman distance of the height energy. Concentrations enter
/// the kinetic part via `|beta_prime|^2` and the height part via the
/// critical power of `beta1`.
pub fn relative_energy_parts(
    field: &YoungMeasureField,
    strong: &StrongSolution,
    params: &ModelParams,
) -> Result<RelativeEnergyParts> {
    check_exponents(field, params)?;
    let reference = sample_strong(strong, &field.grid, field.t)?;
    let mut kinetic = 0.0;
    let mut pressure = 0.0;
    let gamma = params.gamma;
    for (idx, cell) in field.cells.iter().enumerate() {
        let h_ref = reference.h[idx];
        let u_ref = reference.q[idx] / h_ref;
        for atom in &cell.atoms {
            let dv = atom.lambda_prime - u_ref * atom.lambda1.sqrt();
            kinetic += atom.weight * 0.5 * dv.norm_sq();
            pressure += atom.weight
                * match params.model {
                    Model::IsentropicEuler => {
                        let bregman = params.kappa
                            * (atom.lambda1.powf(gamma) / (gamma - 1.0)
                                - gamma / (gamma - 1.0) * h_ref.powf(gamma - 1.0) * atom.lambda1
                                + h_ref.powf(gamma));
                        bregman.max(0.0)
                    }
                    Model::SavageHutter => {
                        let dh = atom.lambda1 - h_ref;
                        params.a * dh * dh
                    }
                };
        }
        if cell.conc_mass > 0.0 {
            for s in &cell.sphere_atoms {
                let w = s.weight * cell.conc_mass;
                kinetic += w * 0.5 * s.beta_prime.norm_sq();
                pressure += w
                    * match params.model {
                        Model::IsentropicEuler => {
                            params.kappa / (gamma - 1.0) * s.beta1.powf(gamma)
                        }
                        Model::SavageHutter => params.a * s.beta1 * s.beta1,
                    };
            }
        }
    }
    let meas = field.grid.cell_measure();
    Ok(RelativeEnergyParts { kinetic: kinetic * meas, pressure: pressure * meas })
}

/// Distance to the smooth reference; zero exactly on its Dirac lift.
pub fn relative_energy(
    field: &YoungMeasureField,
    strong: &StrongSolution,
    params: &ModelParams,
) -> Result<f64> {
    let parts = relative_energy_parts(field, strong, params)?;
    Ok(parts.kinetic + parts.pressure)
}

/// Constant of the deposition comparison argument.
pub fn deposition_constant(a: f64) -> f64 {
    debug_assert!(a > 0.0);
    (1.0 / (3.0 * a)).max(4.0 / 3.0)
}

fn check_deposition_inputs(e0: f64, a: f64, d: f64, f_inf: f64) -> Result<()> {
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(Error::InvalidParameter(format!("initial energy {e0}")));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("pressure coefficient {a}")));
    }
    if !(f_inf >= 0.0 && f_inf < d) {
        return Err(Error::InvalidParameter(format!(
            "force bound {f_inf} must lie in [0, d) with d = {d}"
        )));
    }
    Ok(())
}

/// Closed-form momentum majorant: the cube of
/// `(C E0)^(1/4) - C (d - f_inf) t / 4`, truncated at zero. It solves
/// `y' = -(3/4) C (d - f_inf) y^(2/3)` from `y(0) = (C E0)^(3/4)`.
pub fn comparison_solution(t: f64, e0: f64, a: f64, d: f64, f_inf: f64) -> Result<f64> {
    check_deposition_inputs(e0, a, d, f_inf)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t}")));
    }
    let c = deposition_constant(a);
    let bracket = (c * e0).powf(0.25) - 0.25 * c * (d - f_inf) * t;
    Ok(if bracket > 0.0 { bracket * bracket * bracket } else { 0.0 })
}

/// Time at which the comparison majorant reaches zero:
/// `4 (d - f_inf)^(-1) C^(-3/4) E0^(1/4)`.
pub fn deposition_bound(e0: f64, a: f64, d: f64, f_inf: f64) -> Result<f64> {
    check_deposition_inputs(e0, a, d, f_inf)?;
    let c = deposition_constant(a);
    Ok(4.0 / (d - f_inf) * c.powf(-0.75) * e0.powf(0.25))
}

/// Default exponential growth rate for the weak-strong comparison, from a
/// bound on the reference's first derivatives.
pub fn gronwall_rate(c1_bound: f64) -> f64 {
    10.0 * (1.0 + c1_bound)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GronwallReport {
    pub passed: bool,
    /// Largest amount by which the series exceeds the exponential envelope
    /// (zero when it passes).
    pub max_excess: f64,
    /// Time of the largest excess (first time when none).
    pub worst_time: f64,
}

/// Checks `e_rel(t) <= e_rel(0) exp(rate (t - t0)) + tolerance` at every
/// recorded time. With matching initial data this pins the whole series
/// below `tolerance`.
pub fn gronwall_check(
    times: &[f64],
    e_rel: &[f64],
    rate: f64,
    tolerance: f64,
) -> Result<GronwallReport> {
    if times.is_empty() || times.len() != e_rel.len() {
        return Err(Error::LengthMismatch { expected: times.len(), got: e_rel.len() });
    }
    let t0 = times[0];
    let mut worst = f64::NEG_INFINITY;
    let mut worst_time = t0;
    for (&t, &e) in times.iter().zip(e_rel) {
        let envelope = e_rel[0] * (rate * (t - t0)).exp() + tolerance;
        let excess = e - envelope;
        if excess > worst {
            worst = excess;
            worst_time = t;
        }
    }
    Ok(GronwallReport {
        passed: worst <= 0.0,
        max_excess: worst.max(0.0),
        worst_time: if worst <= 0.0 { t0 } else { worst_time },
    })
}

/// First recorded time after which the momentum series stays at or below
/// `eps`. `None` if the series ends above `eps`.
pub fn deposition_time(times: &[f64], momentum: &[f64], eps: f64) -> Option<f64> {
    debug_assert_eq!(times.len(), momentum.len());
    let mut start = None;
    for (k, &m) in momentum.iter().enumerate().rev() {
        if m > eps {
            break;
        }
        start = Some(times[k]);
    }
    start
}
