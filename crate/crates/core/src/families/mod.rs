//! Canonical decompositions `p(x; θ) = exp(⟨t(x), θ⟩ - F(θ) + k(x))` of the
//! implemented exponential families.
//!
//! | family | t(x) | θ | F(θ) | k(x) |
//! |---|---|---|---|---|
//! | exponential | x | -λ | -log(-θ) | 0 |
//! | poisson | x | log λ | e^θ | -log x! |
//! | bernoulli | x | log(p/(1-p)) | log(1+e^θ) | 0 |
//! | gaussian | (x, x²) | (μ/σ², -1/(2σ²)) | -θ₁²/(4θ₂) + ½log(π/(-θ₂)) | 0 |
//! | mvn | (x, xxᵀ) | (Σ⁻¹μ, -½Σ⁻¹) | ½log((2π)^d\|Σ\|) + ½μᵀΣ⁻¹μ | 0 |
//! | laplacian | \|x\| | -1/σ | log 2 - log(-θ) | 0 |
//!
//! Natural domains are open; boundary values are rejected, never clamped.

mod bernoulli;
mod exponential;
mod gaussian;
mod laplacian;
mod mvn;
pub mod poisson;
pub(crate) mod sampling;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::param::{ExpectationParam, Family, NaturalParam, Observation, SourceParam, SymMatrix};

use sampling::{Sampler, Stream};

pub(crate) fn positive(field: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfDomain { field, reason: format!("must be positive and finite, got {x}") })
    }
}

impl Family {
    fn natural_error(&self) -> Error {
        Error::NaturalOutOfDomain { family: self.to_string() }
    }

    fn check_shape(&self, theta: &NaturalParam) -> Result<()> {
        let ok = match self {
            Family::MultivariateGaussian { dim } => {
                theta.vector().len() == *dim && theta.matrix().map(SymMatrix::dim) == Some(*dim)
            }
            _ => theta.vector().len() == self.order() && theta.matrix().is_none(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{self} expects a parameter of order {}, got order {}",
                self.order(),
                theta.order()
            )))
        }
    }

    /// Errors unless θ has this family's shape and lies in the natural domain.
    pub fn require_domain(&self, theta: &NaturalParam) -> Result<()> {
        if self.in_natural_domain(theta)? {
            Ok(())
        } else {
            Err(self.natural_error())
        }
    }

    /// Source → natural parameters.
    pub fn to_natural(&self, src: &SourceParam) -> Result<NaturalParam> {
        match (self, src) {
            (Family::Exponential, SourceParam::Exponential { rate }) => exponential::to_natural(*rate),
            (Family::Poisson, SourceParam::Poisson { rate }) => poisson::to_natural(*rate),
            (Family::Bernoulli, SourceParam::Bernoulli { p }) => bernoulli::to_natural(*p),
            (Family::Gaussian, SourceParam::Gaussian { mu, var }) => gaussian::to_natural(*mu, *var),
            (Family::MultivariateGaussian { dim }, SourceParam::MultivariateGaussian { mu, sigma }) => {
                mvn::to_natural(*dim, mu, sigma)
            }
            (Family::CenteredLaplacian, SourceParam::CenteredLaplacian { scale }) => {
                laplacian::to_natural(*scale)
            }
            _ => Err(Error::FamilyMismatch(self.to_string(), src.family().to_string())),
        }
    }

    /// Natural → source parameters.
    pub fn from_natural(&self, theta: &NaturalParam) -> Result<SourceParam> {
        self.require_domain(theta)?;
        Ok(match self {
            Family::Exponential => exponential::from_natural(theta),
            Family::Poisson => poisson::from_natural(theta),
            Family::Bernoulli => bernoulli::from_natural(theta),
            Family::Gaussian => gaussian::from_natural(theta),
            Family::MultivariateGaussian { .. } => {
                mvn::from_natural(theta).ok_or_else(|| self.natural_error())?
            }
            Family::CenteredLaplacian => laplacian::from_natural(theta),
        })
    }

    /// Whether θ lies in the open natural parameter space. Errors on shape mismatch.
    pub fn in_natural_domain(&self, theta: &NaturalParam) -> Result<bool> {
        self.check_shape(theta)?;
        Ok(match self {
            Family::Exponential => exponential::in_domain(theta),
            Family::Poisson => poisson::in_domain(theta),
            Family::Bernoulli => bernoulli::in_domain(theta),
            Family::Gaussian => gaussian::in_domain(theta),
            Family::MultivariateGaussian { dim } => mvn::in_domain(theta, *dim),
            Family::CenteredLaplacian => laplacian::in_domain(theta),
        })
    }

    /// Log-normalizer F(θ).
    pub fn log_normalizer(&self, theta: &NaturalParam) -> Result<f64> {
        self.require_domain(theta)?;
        Ok(self.log_normalizer_unchecked(theta))
    }

    pub(crate) fn log_normalizer_unchecked(&self, theta: &NaturalParam) -> f64 {
        match self {
            Family::Exponential => exponential::log_normalizer(theta),
            Family::Poisson => poisson::log_normalizer(theta),
            Family::Bernoulli => bernoulli::log_normalizer(theta),
            Family::Gaussian => gaussian::log_normalizer(theta),
            Family::MultivariateGaussian { .. } => mvn::log_normalizer(theta),
            Family::CenteredLaplacian => laplacian::log_normalizer(theta),
        }
    }

    /// ∇F(θ) = E_θ[t(x)].
    pub fn grad_log_normalizer(&self, theta: &NaturalParam) -> Result<ExpectationParam> {
        self.require_domain(theta)?;
        Ok(match self {
            Family::Exponential => exponential::grad(theta),
            Family::Poisson => poisson::grad(theta),
            Family::Bernoulli => bernoulli::grad(theta),
            Family::Gaussian => gaussian::grad(theta),
            Family::MultivariateGaussian { .. } => mvn::grad(theta),
            Family::CenteredLaplacian => laplacian::grad(theta),
        })
    }

    /// (∇F)⁻¹(η), in closed form for every family.
    pub fn grad_inverse(&self, eta: &ExpectationParam) -> Result<NaturalParam> {
        let shape_ok = match self {
            Family::MultivariateGaussian { dim } => eta.vector().len() == *dim && eta.matrix().is_some(),
            _ => eta.vector().len() == self.order() && eta.matrix().is_none(),
        };
        if !shape_ok {
            return Err(Error::ShapeMismatch(format!("{self} expectation parameter has wrong shape")));
        }
        let theta = match self {
            Family::Exponential => exponential::grad_inverse(eta),
            Family::Poisson => poisson::grad_inverse(eta),
            Family::Bernoulli => bernoulli::grad_inverse(eta),
            Family::Gaussian => gaussian::grad_inverse(eta),
            Family::MultivariateGaussian { dim } => mvn::grad_inverse(eta, *dim),
            Family::CenteredLaplacian => laplacian::grad_inverse(eta),
        };
        theta
            .filter(|t| self.in_natural_domain(t).unwrap_or(false))
            .ok_or_else(|| Error::ExpectationOutOfDomain { family: self.to_string() })
    }

    fn support_error(&self, detail: impl Into<String>) -> Error {
        Error::ObservationOutOfSupport { family: self.to_string(), detail: detail.into() }
    }

    /// Errors unless `x` lies in the support.
    pub fn check_support(&self, x: &Observation) -> Result<()> {
        let ok = match (self, x) {
            (Family::Exponential, Observation::Real(v)) => v.is_finite() && *v >= 0.0,
            (Family::Poisson, Observation::Count(_)) => true,
            (Family::Bernoulli, Observation::Count(k)) => *k <= 1,
            (Family::Gaussian | Family::CenteredLaplacian, Observation::Real(v)) => v.is_finite(),
            (Family::MultivariateGaussian { dim }, Observation::Vector(v)) => {
                v.len() == *dim && v.iter().all(|c| c.is_finite())
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(self.support_error(format!("{x:?}")))
        }
    }

    /// Sufficient statistic t(x).
    pub fn sufficient_stat(&self, x: &Observation) -> Result<ExpectationParam> {
        self.check_support(x)?;
        Ok(match x {
            Observation::Count(k) => ExpectationParam::scalar(*k as f64),
            Observation::Real(v) => match self {
                Family::Gaussian => ExpectationParam::from_vec(vec![*v, v * v]),
                Family::CenteredLaplacian => ExpectationParam::scalar(v.abs()),
                _ => ExpectationParam::scalar(*v),
            },
            Observation::Vector(v) => {
                let d = v.len();
                let outer: Vec<f64> = (0..d * d).map(|k| v[k / d] * v[k % d]).collect();
                ExpectationParam::new(v.clone(), Some(SymMatrix::new(d, outer)?))
            }
        })
    }

    /// Carrier term k(x).
    pub fn carrier(&self, x: &Observation) -> Result<f64> {
        self.check_support(x)?;
        Ok(match (self, x) {
            (Family::Poisson, Observation::Count(k)) => poisson::carrier(*k),
            _ => 0.0,
        })
    }

    /// `⟨t(x), θ⟩ - F(θ) + k(x)`.
    pub fn log_density(&self, theta: &NaturalParam, x: &Observation) -> Result<f64> {
        self.density(theta)?.log_density(x)
    }

    /// Prepares θ for repeated density evaluation.
    pub fn density(&self, theta: &NaturalParam) -> Result<Density> {
        let log_normalizer = self.log_normalizer(theta)?;
        Ok(Density { family: *self, theta: theta.clone(), log_normalizer })
    }

    fn require_scaled(&self, theta: &NaturalParam, alpha: f64) -> Result<()> {
        self.require_domain(theta)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if !self.in_natural_domain(&theta.scaled(alpha))? {
            return Err(Error::ScaledOutOfDomain { family: self.to_string(), alpha });
        }
        Ok(())
    }

    /// `log E_{p(x; αθ)}[e^{(α-1)k(x)}]`; zero for carrier-free families.
    pub fn log_carrier_moment(&self, theta: &NaturalParam, alpha: f64) -> Result<f64> {
        self.require_scaled(theta, alpha)?;
        match self {
            Family::Poisson if alpha != 1.0 => poisson::log_carrier_moment(theta.first(), alpha),
            _ => Ok(0.0),
        }
    }

    /// `E_{p(x; αθ)}[e^{(α-1)k(x)}]`; exactly 1 for carrier-free families.
    pub fn carrier_moment(&self, theta: &NaturalParam, alpha: f64) -> Result<f64> {
        self.log_carrier_moment(theta, alpha).map(f64::exp)
    }

    /// `E_θ[k(x)]`; zero for carrier-free families.
    pub fn carrier_expectation(&self, theta: &NaturalParam) -> Result<f64> {
        self.require_domain(theta)?;
        match self {
            Family::Poisson => poisson::carrier_expectation(theta.first()),
            _ => Ok(0.0),
        }
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, theta: &NaturalParam, n: usize, seed: u64) -> Result<Vec<Observation>> {
        self.sample_with(theta, n, seed, Execution::default())
    }

    pub fn sample_with(&self, theta: &NaturalParam, n: usize, seed: u64, exec: Execution) -> Result<Vec<Observation>> {
        if n == 0 {
            return Err(Error::DegenerateSample("sample size must be at least 1".into()));
        }
        let sampler = Sampler::new(self, theta)?;
        let chunks = exec.map_chunks(n, |c, range| {
            let mut s = Stream::new(seed, c as u64);
            range.map(|_| sampler.draw(&mut s)).collect::<Vec<_>>()
        });
        Ok(chunks.concat())
    }
}

/// A family member with F(θ) precomputed.
#[derive(Debug, Clone)]
pub struct Density {
    family: Family,
    theta: NaturalParam,
    log_normalizer: f64,
}

impl Density {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn theta(&self) -> &NaturalParam {
        &self.theta
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn log_density(&self, x: &Observation) -> Result<f64> {
        self.family.check_support(x)?;
        Ok(match x {
            Observation::Count(k) => self.log_density_count(*k),
            Observation::Real(v) => self.log_density_reals(&[*v]),
            Observation::Vector(v) => self.log_density_reals(v),
        })
    }

    /// Log-pmf at a count; support is not checked.
    pub(crate) fn log_density_count(&self, k: u64) -> f64 {
        let t = self.theta.first();
        let carrier = match self.family {
            Family::Poisson => poisson::carrier(k),
            _ => 0.0,
        };
        k as f64 * t - self.log_normalizer + carrier
    }

    /// Log-density at real coordinates of a continuous family; support is not checked.
    pub(crate) fn log_density_reals(&self, x: &[f64]) -> f64 {
        let v = self.theta.vector();
        let inner = match self.family {
            Family::Gaussian => v[0] * x[0] + v[1] * x[0] * x[0],
            Family::CenteredLaplacian => v[0] * x[0].abs(),
            Family::MultivariateGaussian { dim } => {
                let m = self.theta.matrix().expect("mvn has a matrix part").as_slice();
                let mut acc = 0.0;
                for i in 0..dim {
                    acc += v[i] * x[i];
                    let row: f64 = (0..dim).map(|j| m[i * dim + j] * x[j]).sum();
                    acc += x[i] * row;
                }
                acc
            }
            _ => v[0] * x[0],
        };
        inner - self.log_normalizer
    }

    /// Sum of the magnitudes of the terms of `log_density_count(k)`; the
    /// rounding error of that value is a small multiple of `ε` times this.
    pub(crate) fn log_density_scale_count(&self, k: u64) -> f64 {
        let carrier = match self.family {
            Family::Poisson => poisson::carrier(k).abs(),
            _ => 0.0,
        };
        (k as f64 * self.theta.first()).abs() + self.log_normalizer.abs() + carrier
    }

    /// As [`Density::log_density_scale_count`], at a scalar real point.
    pub(crate) fn log_density_scale_real(&self, x: f64) -> f64 {
        let v = self.theta.vector();
        let inner = match self.family {
            Family::Gaussian => (v[0] * x).abs() + (v[1] * x * x).abs(),
            _ => (v[0] * x).abs(),
        };
        inner + self.log_normalizer.abs()
    }
}
