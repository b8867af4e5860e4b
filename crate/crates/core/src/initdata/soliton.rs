//! The singular 1-soliton, its seed, and the finite-energy soliton family.

use std::f64::consts::FRAC_PI_4;

use crate::error::{invalid, PcfError, Result};
use crate::initdata::profile::Profile;
use crate::initdata::ClosedForm;
use crate::numerics::{cosh_ratio, sech};

/// Pole parameter μ; every derived quantity is recomputed from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    mu: f64,
}

impl SolitonParams {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu == 0.0 || (mu.abs() - 1.0).abs() < 1e-12 {
            return Err(invalid(format!("soliton parameter mu = {mu} must be finite and not 0 or ±1")));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// c = (2μ/(μ² − 1))².
    pub fn c(&self) -> f64 {
        let r = 2.0 * self.mu / (self.mu * self.mu - 1.0);
        r * r
    }

    pub fn sqrt_c(&self) -> f64 {
        (2.0 * self.mu / (self.mu * self.mu - 1.0)).abs()
    }

    /// v = −(μ² + 1)/(2μ).
    pub fn v(&self) -> f64 {
        -(self.mu * self.mu + 1.0) / (2.0 * self.mu)
    }

    /// x0 = ln|μ| / √c.
    pub fn x0(&self) -> f64 {
        self.mu.abs().ln() / self.sqrt_c()
    }

    /// β = (μ + 1)/(μ − 1).
    pub fn beta(&self) -> f64 {
        (self.mu + 1.0) / (self.mu - 1.0)
    }

    pub fn require_singular(&self) -> Result<()> {
        if self.mu > 1.0 {
            Ok(())
        } else {
            Err(invalid(format!("the singular soliton needs mu > 1, got {}", self.mu)))
        }
    }

    pub fn require_finite_energy(&self) -> Result<()> {
        if self.mu > 0.0 && self.mu < 1.0 {
            Ok(())
        } else {
            Err(invalid(format!(
                "the finite-energy soliton needs 0 < mu < 1, got {}",
                self.mu
            )))
        }
    }
}

/// ln cosh t without overflow.
fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Closed-form (Λ, φ) of the singular soliton at (t, x), μ > 1.
///
/// φ is taken on the π/4 − ½atan branch shifted by π/2, the branch whose
/// assembled metric reproduces [`singular_soliton_metric`].
pub fn singular_soliton_fields(params: &SolitonParams, t: f64, x: f64) -> Result<(f64, f64)> {
    params.require_singular()?;
    let (sc, v) = (params.sqrt_c(), params.v());
    let gamma = sc * (x - v * t);
    let a = 1.0 - t.tanh() * gamma.tanh() / (v.abs() * sc);
    let st = sech(t);
    let mut disc = a * a - st * st / (v * v);
    if disc < 0.0 {
        if disc < -1e-12 {
            return Err(PcfError::DomainError(format!(
                "square-root argument {disc:e} < 0 at (t, x) = ({t}, {x})"
            )));
        }
        disc = 0.0;
    }
    let inner = a + disc.sqrt();
    if !(inner > 0.0) {
        return Err(PcfError::DomainError(format!(
            "logarithm argument {inner:e} ≤ 0 at (t, x) = ({t}, {x})"
        )));
    }
    let lambda = v.abs().ln() + ln_cosh(t) + inner.ln();
    let big_x = t.cosh() * gamma.sinh() + v * sc * t.sinh() * gamma.cosh();
    let phi = 3.0 * FRAC_PI_4 - 0.5 * big_x.atan();
    Ok((lambda, phi))
}

/// The metric g⁽¹⁾ of the singular soliton, with Q_c(z) = √c sech(√c z), z = x − vt.
pub fn singular_soliton_metric(params: &SolitonParams, t: f64, x: f64) -> Result<[[f64; 2]; 2]> {
    params.require_singular()?;
    let (sc, x0) = (params.sqrt_c(), params.x0());
    let z = x - params.v() * t;
    // Q(z)/Q(z ∓ x0) = cosh(√c(z ∓ x0))/cosh(√c z)
    let g11 = t.exp() * cosh_ratio(sc * (z - x0), sc * z);
    let g22 = (-t).exp() * cosh_ratio(sc * (z + x0), sc * z);
    let g12 = -sech(sc * z) / sc;
    Ok([[g11, g12], [g12, g22]])
}

/// The constant Λ of the singular soliton at t = 0, arccosh|v|.
pub fn singular_background(params: &SolitonParams) -> f64 {
    params.v().abs().acosh()
}

/// The arccosh argument |v| cosh γ − tanh(βγ) sinh γ / √c of the finite-energy
/// soliton at γ.
pub fn finite_energy_argument(params: &SolitonParams, gamma: f64) -> f64 {
    params.v().abs() * gamma.cosh() - (params.beta() * gamma).tanh() * gamma.sinh() / params.sqrt_c()
}

fn finite_energy_at_gamma(params: &SolitonParams, gamma: f64) -> Result<(f64, f64)> {
    let arg = finite_energy_argument(params, gamma);
    if !(arg > 1.0) {
        return Err(PcfError::DomainError(format!(
            "arccosh argument {arg} ≤ 1 at gamma = {gamma}"
        )));
    }
    let (b, sc, v) = (params.beta(), params.sqrt_c(), params.v());
    let big_x = (b * gamma).sinh() * gamma.cosh() + v * sc * (b * gamma).cosh() * gamma.sinh();
    Ok((arg.acosh(), FRAC_PI_4 - 0.5 * big_x.atan()))
}

/// (Λ̂, φ̂) of the finite-energy soliton, 0 < μ < 1, with γ = λ + εθ(t + x).
pub fn finite_energy_soliton(
    lambda_bg: f64,
    epsilon: f64,
    theta: &dyn Profile,
    params: &SolitonParams,
    t: f64,
    x: f64,
) -> Result<(f64, f64)> {
    params.require_finite_energy()?;
    if !(lambda_bg > 0.0) {
        return Err(invalid(format!("lambda = {lambda_bg} must be positive")));
    }
    finite_energy_at_gamma(params, lambda_bg + epsilon * theta.value(t + x))
}

/// Λ ≡ t, φ ≡ 0: the time-like seed solution.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeedBackground;

impl ClosedForm for SeedBackground {
    fn eval(&self, t: f64, _x: f64) -> Result<(f64, f64)> {
        Ok((t, 0.0))
    }

    fn gradient(&self, _t: f64, _x: f64) -> Result<[f64; 4]> {
        Ok([1.0, 0.0, 0.0, 0.0])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SingularSoliton {
    pub params: SolitonParams,
}

impl SingularSoliton {
    pub fn new(mu: f64) -> Result<Self> {
        let params = SolitonParams::new(mu)?;
        params.require_singular()?;
        Ok(Self { params })
    }

    pub fn background(&self) -> f64 {
        singular_background(&self.params)
    }
}

impl ClosedForm for SingularSoliton {
    fn eval(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        singular_soliton_fields(&self.params, t, x)
    }
}

pub struct FiniteEnergySoliton<P> {
    pub lambda_bg: f64,
    pub epsilon: f64,
    pub theta: P,
    pub params: SolitonParams,
}

impl<P: Profile> FiniteEnergySoliton<P> {
    pub fn new(lambda_bg: f64, epsilon: f64, theta: P, mu: f64) -> Result<Self> {
        let params = SolitonParams::new(mu)?;
        params.require_finite_energy()?;
        if !(lambda_bg > 0.0 && lambda_bg.is_finite()) {
            return Err(invalid(format!("lambda = {lambda_bg} must be positive")));
        }
        Ok(Self {
            lambda_bg,
            epsilon,
            theta,
            params,
        })
    }

    /// (C(λ), C₁(λ)): the field values wherever θ(t + x) = 0.
    pub fn rest_values(&self) -> Result<(f64, f64)> {
        finite_energy_at_gamma(&self.params, self.lambda_bg)
    }

    /// The arccosh argument at (t, x).
    pub fn argument(&self, t: f64, x: f64) -> f64 {
        finite_energy_argument(&self.params, self.lambda_bg + self.epsilon * self.theta.value(t + x))
    }
}

impl<P: Profile> ClosedForm for FiniteEnergySoliton<P> {
    fn eval(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        finite_energy_soliton(self.lambda_bg, self.epsilon, &self.theta, &self.params, t, x)
    }
}
