//! Integrands paired with their recession behaviour at large amplitudes.

use crate::algebra::{Mat2, Vec2};
use crate::model::{Model, ModelParams};

/// Values a moment evaluation can produce. Implementors form a vector space
/// with a norm used for error reporting.
pub trait MomentValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, factor: f64) -> Self;
    /// Norm of the value: absolute value, Euclidean norm, Frobenius norm.
    fn magnitude(self) -> f64;
}

impl MomentValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl MomentValue for Vec2 {
    fn zero() -> Self {
        Vec2::ZERO
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl MomentValue for Mat2 {
    fn zero() -> Self {
        Mat2::ZERO
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

type EvalFn<T> = Box<dyn Fn(f64, Vec2) -> T + Send + Sync>;

/// A nonlinear observable of the state pair `(lambda1, lambda_prime)` together
/// with its limit profile on the unit sphere at infinity. The limit is what
/// concentration atoms are tested against.
pub struct Integrand<T: MomentValue> {
    name: &'static str,
    eval: EvalFn<T>,
    recession: EvalFn<T>,
}

impl<T: MomentValue> Integrand<T> {
    pub fn new(
        name: &'static str,
        eval: impl Fn(f64, Vec2) -> T + Send + Sync + 'static,
        recession: impl Fn(f64, Vec2) -> T + Send + Sync + 'static,
    ) -> Self {
        Integrand {
            name,
            eval: Box::new(eval),
            recession: Box::new(recession),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Value at a finite-amplitude point.
    pub fn eval(&self, lambda1: f64, lambda_prime: Vec2) -> T {
        (self.eval)(lambda1, lambda_prime)
    }

    /// Limit value at a point on the amplitude sphere.
    pub fn recession(&self, beta1: f64, beta_prime: Vec2) -> T {
        (self.recession)(beta1, beta_prime)
    }
}

impl<T: MomentValue> std::fmt::Debug for Integrand<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Integrand").field("name", &self.name).finish()
    }
}

/// Height observable; grows sublinearly against the pressure scaling, so the
/// limit profile vanishes.
pub fn height() -> Integrand<f64> {
    Integrand::new("h", |l1, _| l1, |_, _| 0.0)
}

/// Pressure-power observable `h^gamma`. Its growth saturates the scaling, so
/// the limit profile is `beta1^gamma`.
pub fn pressure_power(gamma: f64) -> Integrand<f64> {
    assert!(gamma > 1.0, "pressure exponent must exceed 1");
    // powf(gamma) with gamma == 2.0 matches l1 * l1 to the last bit for the
    // quadratic case, so a single code path is safe.
    Integrand::new(
        "h^gamma",
        move |l1, _| l1.powf(gamma),
        move |b1, _| b1.powf(gamma),
    )
}

/// Momentum observable `h u = sqrt(lambda1) * lambda_prime`.
pub fn momentum() -> Integrand<Vec2> {
    Integrand::new(
        "hu",
        |l1, lp| lp * l1.sqrt(),
        |_, _| Vec2::ZERO,
    )
}

/// Momentum flux `h u (x) u = lambda_prime (x) lambda_prime`; scaling-critical,
/// so concentrations contribute `beta_prime (x) beta_prime`.
pub fn momentum_flux() -> Integrand<Mat2> {
    Integrand::new(
        "huxu",
        |_, lp| lp.outer(lp),
        |_, bp| bp.outer(bp),
    )
}

/// Kinetic observable `h |u|^2 = |lambda_prime|^2`; scaling-critical.
pub fn kinetic() -> Integrand<f64> {
    Integrand::new(
        "h|u|2",
        |_, lp| lp.norm_sq(),
        |_, bp| bp.norm_sq(),
    )
}

/// First-power speed observable `h |u| = sqrt(lambda1) |lambda_prime|`.
pub fn momentum_norm() -> Integrand<f64> {
    Integrand::new(
        "h|u|",
        |l1, lp| l1.sqrt() * lp.norm(),
        |_, _| 0.0,
    )
}

/// Friction-direction observable `h B(u)` with the minimal selection `0`
/// at rest: `lambda1 * lambda_prime / |lambda_prime|`.
pub fn friction_direction() -> Integrand<Vec2> {
    Integrand::new(
        "hB(u)",
        |l1, lp| {
            let n = lp.norm();
            if n == 0.0 {
                Vec2::ZERO
            } else {
                lp * (l1 / n)
            }
        },
        |_, _| Vec2::ZERO,
    )
}

/// The observables the diagnostics need, with the pressure power matched to
/// the model.
#[derive(Debug)]
pub struct Catalog {
    pub height: Integrand<f64>,
    pub pressure: Integrand<f64>,
    pub momentum: Integrand<Vec2>,
    pub momentum_flux: Integrand<Mat2>,
    pub kinetic: Integrand<f64>,
    pub momentum_norm: Integrand<f64>,
    pub friction_direction: Integrand<Vec2>,
}

pub fn catalog(params: &ModelParams) -> Catalog {
    let gamma = match params.model {
        Model::IsentropicEuler => params.gamma,
        Model::SavageHutter => 2.0,
    };
    Catalog {
        height: height(),
        pressure: pressure_power(gamma),
        momentum: momentum(),
        momentum_flux: momentum_flux(),
        kinetic: kinetic(),
        momentum_norm: momentum_norm(),
        friction_direction: friction_direction(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::Exponents;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn point_values() {
        let lp = Vec2::new(3.0, 4.0);
        assert_eq!(height().eval(2.5, lp), 2.5);
        assert_eq!(pressure_power(2.0).eval(3.0, lp), 9.0);
        assert_relative_eq!(pressure_power(1.4).eval(2.0, lp), 2.0_f64.powf(1.4));
        let m = momentum().eval(4.0, lp);
        assert_eq!((m.x, m.y), (6.0, 8.0));
        assert_eq!(kinetic().eval(0.0, lp), 25.0);
        assert_eq!(momentum_norm().eval(4.0, lp), 10.0);
        let flux = momentum_flux().eval(1.0, lp);
        assert_eq!(flux.entry(0, 0), 9.0);
        assert_eq!(flux.entry(0, 1), 12.0);
        assert_eq!(flux.entry(1, 1), 16.0);
        let fd = friction_direction().eval(2.0, lp);
        assert_abs_diff_eq!(fd.x, 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(fd.y, 1.6, epsilon = 1e-15);
        assert_eq!(friction_direction().eval(2.0, Vec2::ZERO), Vec2::ZERO);
    }

    #[test]
    fn limit_profiles() {
        let bp = Vec2::new(0.6, 0.8);
        assert_eq!(height().recession(0.5, bp), 0.0);
        assert_eq!(momentum().recession(0.5, bp), Vec2::ZERO);
        assert_eq!(momentum_norm().recession(0.5, bp), 0.0);
        assert_eq!(friction_direction().recession(0.5, bp), Vec2::ZERO);
        assert_eq!(pressure_power(2.0).recession(0.5, bp), 0.25);
        assert_eq!(kinetic().recession(0.5, bp), 1.0);
        let flux = momentum_flux().recession(0.5, bp);
        assert_abs_diff_eq!(flux.entry(0, 0), 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(flux.entry(0, 1), 0.48, epsilon = 1e-15);
    }

    proptest! {
        // The limit profile of the scaling-critical observables is what the
        // anisotropic dilation produces at leading order: g(dilate(s, b)) =
        // s^(p*q) * g_limit(b) exactly, for every scale.
        #[test]
        fn critical_observables_scale_exactly(
            b1 in 0.0_f64..2.0,
            bx in -2.0_f64..2.0,
            by in -2.0_f64..2.0,
            s in 1.0_f64..100.0,
            gamma in 1.1_f64..3.0,
        ) {
            let exps = Exponents { p: gamma, q: 2.0 };
            let bp = Vec2::new(bx, by);
            let (l1, lp) = exps.dilate(s, b1, bp);
            let factor = s.powf(exps.p * exps.q);

            let g = pressure_power(gamma);
            prop_assert!(
                (g.eval(l1, Vec2::ZERO) - factor * g.recession(b1, bp)).abs()
                    <= 1e-12 * factor * g.recession(b1, bp).abs().max(1.0)
            );
            let k = kinetic();
            prop_assert!(
                (k.eval(0.0, lp) - factor * k.recession(b1, bp)).abs()
                    <= 1e-12 * factor * k.recession(b1, bp).max(1.0)
            );
            let fx = momentum_flux();
            let diff = fx.eval(l1, lp).add(fx.recession(b1, bp).scale(-factor));
            prop_assert!(diff.magnitude() <= 1e-12 * factor * fx.recession(b1, bp).magnitude().max(1.0));
        }
    }
}
