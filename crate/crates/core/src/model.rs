//! Model selection, material parameters and body forces.

use std::fmt;
use std::sync::Arc;

use crate::algebra::Vec2;
use crate::error::{Error, Result};

/// The two systems the laboratory integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Isentropic gas dynamics with pressure `kappa h^gamma`, `gamma > 1`.
    IsentropicEuler,
    /// Shallow granular flow with pressure `a h^2` and dry Coulomb
    /// friction of strength `d`.
    SavageHutter,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::IsentropicEuler => write!(f, "isentropic-euler"),
            Model::SavageHutter => write!(f, "savage-hutter"),
        }
    }
}

type ForceFn = dyn Fn(f64, Vec2) -> Vec2 + Send + Sync;

/// Body force `f(t, x)` acting on the momentum equation.
#[derive(Clone)]
pub enum ForceField {
    Zero,
    Constant(Vec2),
    /// Arbitrary field with a caller-supplied sup-norm bound.
    Custom { eval: Arc<ForceFn>, sup_norm: f64 },
}

impl ForceField {
    pub fn custom(eval: impl Fn(f64, Vec2) -> Vec2 + Send + Sync + 'static, sup_norm: f64) -> ForceField {
        ForceField::Custom { eval: Arc::new(eval), sup_norm }
    }

    pub fn eval(&self, t: f64, x: Vec2) -> Vec2 {
        match self {
            ForceField::Zero => Vec2::ZERO,
            ForceField::Constant(v) => *v,
            ForceField::Custom { eval, .. } => eval(t, x),
        }
    }

    /// Sup-norm over space and time; stored, not re-derived.
    pub fn sup_norm(&self) -> f64 {
        match self {
            ForceField::Zero => 0.0,
            ForceField::Constant(v) => v.norm(),
            ForceField::Custom { sup_norm, .. } => *sup_norm,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ForceField::Zero => true,
            ForceField::Constant(v) => *v == Vec2::ZERO,
            ForceField::Custom { .. } => false,
        }
    }
}

impl fmt::Debug for ForceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForceField::Zero => write!(f, "ForceField::Zero"),
            ForceField::Constant(v) => write!(f, "ForceField::Constant({v:?})"),
            ForceField::Custom { sup_norm, .. } => {
                write!(f, "ForceField::Custom {{ sup_norm: {sup_norm} }}")
            }
        }
    }
}

/// Parameters for either model; only the selected model's fields are
/// validated or read.
#[derive(Clone, Debug)]
pub struct ModelParams {
    pub model: Model,
    /// Gas pressure exponent, `> 1`.
    pub gamma: f64,
    /// Gas pressure constant, `> 0`.
    pub kappa: f64,
    /// Granular pressure constant, `> 0`.
    pub a: f64,
    /// Friction strength, `> 0`.
    pub d: f64,
    pub force: ForceField,
}

impl ModelParams {
    pub fn euler(gamma: f64, kappa: f64) -> Result<ModelParams> {
        let params = ModelParams {
            model: Model::IsentropicEuler,
            gamma,
            kappa,
            a: 1.0,
            d: 1.0,
            force: ForceField::Zero,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn savage_hutter(a: f64, d: f64) -> Result<ModelParams> {
        // The granular pressure is quadratic; gamma is kept in sync so
        // gas-form expressions specialize correctly.
        let params = ModelParams {
            model: Model::SavageHutter,
            gamma: 2.0,
            kappa: a,
            a,
            d,
            force: ForceField::Zero,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_force(mut self, force: ForceField) -> ModelParams {
        self.force = force;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self.model {
            Model::IsentropicEuler => {
                if !(self.gamma > 1.0 && self.gamma.is_finite()) {
                    return bad(format!("gamma must be > 1, got {}", self.gamma));
                }
                if !(self.kappa > 0.0 && self.kappa.is_finite()) {
                    return bad(format!("kappa must be > 0, got {}", self.kappa));
                }
            }
            Model::SavageHutter => {
                if !(self.a > 0.0 && self.a.is_finite()) {
                    return bad(format!("a must be > 0, got {}", self.a));
                }
                if !(self.d > 0.0 && self.d.is_finite()) {
                    return bad(format!("d must be > 0, got {}", self.d));
                }
            }
        }
        if !self.force.sup_norm().is_finite() {
            return bad("force sup-norm must be finite".into());
        }
        Ok(())
    }
}
