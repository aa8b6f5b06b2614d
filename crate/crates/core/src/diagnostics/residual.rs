//! Weak-form residuals of the mass and momentum identities against a fixed
//! family of trigonometric test functions, trapezoid in time and midpoint
//! in space.

use std::f64::consts::TAU;

use crate::algebra::Vec2;
use crate::error::Result;
use crate::model::{Model, ModelParams};
use crate::young::integrand::catalog;
use crate::young::YoungMeasureField;

use super::{check_snapshot_sequence, trapezoid_total};

/// Time-independent scalar test function with its gradient.
#[derive(Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    eval: fn(Vec2) -> f64,
    grad: fn(Vec2) -> Vec2,
}

impl TestFunction {
    pub fn eval(&self, x: Vec2) -> f64 {
        (self.eval)(x)
    }

    pub fn grad(&self, x: Vec2) -> Vec2 {
        (self.grad)(x)
    }
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).finish()
    }
}

/// Constant plus the first Fourier modes per axis.
pub fn test_catalog(dim: usize) -> Vec<TestFunction> {
    let mut out = vec![
        TestFunction { name: "const", eval: |_| 1.0, grad: |_| Vec2::ZERO },
        TestFunction {
            name: "sin_x",
            eval: |x| (TAU * x.x).sin(),
            grad: |x| Vec2::new(TAU * (TAU * x.x).cos(), 0.0),
        },
        TestFunction {
            name: "cos_x",
            eval: |x| (TAU * x.x).cos(),
            grad: |x| Vec2::new(-TAU * (TAU * x.x).sin(), 0.0),
        },
    ];
    if dim > 1 {
        out.push(TestFunction {
            name: "sin_y",
            eval: |x| (TAU * x.y).sin(),
            grad: |x| Vec2::new(0.0, TAU * (TAU * x.y).cos()),
        });
        out.push(TestFunction {
            name: "cos_y",
            eval: |x| (TAU * x.y).cos(),
            grad: |x| Vec2::new(0.0, -TAU * (TAU * x.y).sin()),
        });
    }
    out
}

/// Absolute weak-form defect of one balance law against one test function.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakResidual {
    pub equation: &'static str,
    pub test_function: &'static str,
    pub value: f64,
}

const EQUATION_NAMES: [&str; 2] = ["momentum-x", "momentum-y"];

/// Evaluates the mass and momentum identities over the recorded snapshots
/// for every catalog test function. Each residual is
/// `|boundary terms - integral of fluxes and sources|`; zero for an exact
/// solution, first-order small for the scheme on smooth data.
pub fn weak_residual(
    fields: &[YoungMeasureField],
    params: &ModelParams,
) -> Result<Vec<WeakResidual>> {
    check_snapshot_sequence(fields, params)?;
    let grid = &fields[0].grid;
    let dim = grid.dim();
    let meas = grid.cell_measure();
    let centers: Vec<Vec2> = (0..grid.len()).map(|i| grid.center(i)).collect();
    let times: Vec<f64> = fields.iter().map(|f| f.t).collect();
    let cat = catalog(params);

    let heights: Vec<Vec<f64>> = fields.iter().map(|f| f.moment(&cat.height)).collect();
    let momenta: Vec<Vec<Vec2>> = fields.iter().map(|f| f.moment(&cat.momentum)).collect();
    let fluxes = fields.iter().map(|f| f.moment(&cat.momentum_flux)).collect::<Vec<_>>();
    let pressures: Vec<Vec<f64>> = fields.iter().map(|f| f.moment(&cat.pressure)).collect();
    let frictions: Vec<Vec<Vec2>> = match params.model {
        Model::SavageHutter => {
            fields.iter().map(|f| f.moment(&cat.friction_direction)).collect()
        }
        Model::IsentropicEuler => Vec::new(),
    };
    let forces: Vec<Vec<Vec2>> = fields
        .iter()
        .map(|f| centers.iter().map(|&x| params.force.eval(f.t, x)).collect())
        .collect();
    let pressure_coeff = match params.model {
        Model::IsentropicEuler => params.kappa,
        Model::SavageHutter => params.a,
    };

    let last = fields.len() - 1;
    let mut out = Vec::new();
    for psi in test_catalog(dim) {
        let psi_vals: Vec<f64> = centers.iter().map(|&x| psi.eval(x)).collect();
        let psi_grads: Vec<Vec2> = centers.iter().map(|&x| psi.grad(x)).collect();

        let mut boundary = 0.0;
        for i in 0..grid.len() {
            boundary += psi_vals[i] * (heights[last][i] - heights[0][i]);
        }
        let rates: Vec<f64> = momenta
            .iter()
            .map(|m| {
                let mut s = 0.0;
                for i in 0..grid.len() {
                    s += m[i].dot(psi_grads[i]);
                }
                s * meas
            })
            .collect();
        out.push(WeakResidual {
            equation: "mass",
            test_function: psi.name,
            value: (boundary * meas - trapezoid_total(&times, &rates)).abs(),
        });

        for axis in 0..dim {
            let mut boundary = 0.0;
            for i in 0..grid.len() {
                boundary +=
                    psi_vals[i] * (momenta[last][i] - momenta[0][i]).component(axis);
            }
            let mut rates = Vec::with_capacity(fields.len());
            for (k, _) in fields.iter().enumerate() {
                let mut s = 0.0;
                for i in 0..grid.len() {
                    let transport = fluxes[k][i].mul_vec(psi_grads[i]).component(axis);
                    let compression =
                        pressure_coeff * pressures[k][i] * psi_grads[i].component(axis);
                    let source = match params.model {
                        Model::IsentropicEuler => {
                            forces[k][i].component(axis) * heights[k][i]
                        }
                        Model::SavageHutter => {
                            -params.d * frictions[k][i].component(axis)
                                + forces[k][i].component(axis) * heights[k][i]
                        }
                    };
                    s += transport + compression + psi_vals[i] * source;
                }
                rates.push(s * meas);
            }
            out.push(WeakResidual {
                equation: EQUATION_NAMES[axis],
                test_function: psi.name,
                value: (boundary * meas - trapezoid_total(&times, &rates)).abs(),
            });
        }
    }
    Ok(out)
}
