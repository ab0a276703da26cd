//! Multivariate Gaussian N(μ, Σ) in dimension d: t(x) = (x, xxᵀ),
//! θ = (v, M) = (Σ⁻¹μ, -½Σ⁻¹), k(x) = 0.
//!
//! With P = -2M = Σ⁻¹ = LLᵀ (Cholesky),
//! F(v, M) = (d/2) log 2π - Σᵢ log Lᵢᵢ + ½ vᵀP⁻¹v.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::param::{ExpectationParam, NaturalParam, SourceParam, SymMatrix};

fn precision_cholesky(theta: &NaturalParam) -> Option<Cholesky<f64, Dyn>> {
    let m = theta.matrix()?;
    Cholesky::new(m.to_dmatrix() * -2.0)
}

fn shape_ok(theta: &NaturalParam, dim: usize) -> bool {
    theta.vector().len() == dim && theta.matrix().map(SymMatrix::dim) == Some(dim)
}

pub(super) fn to_natural(dim: usize, mu: &[f64], sigma: &SymMatrix) -> Result<NaturalParam> {
    if mu.len() != dim || sigma.dim() != dim {
        return Err(Error::ParameterOutOfDomain {
            field: "sigma",
            reason: format!("mu has length {} but sigma is {}x{}", mu.len(), sigma.dim(), sigma.dim()),
        });
    }
    if mu.iter().any(|x| !x.is_finite()) {
        return Err(Error::ParameterOutOfDomain { field: "mu", reason: "entries must be finite".into() });
    }
    let chol = Cholesky::new(sigma.to_dmatrix()).ok_or_else(|| Error::ParameterOutOfDomain {
        field: "sigma",
        reason: "must be symmetric positive-definite".into(),
    })?;
    let precision = chol.inverse();
    let v = &precision * DVector::from_column_slice(mu);
    Ok(NaturalParam::new(
        v.iter().copied().collect(),
        Some(SymMatrix::from_dmatrix(&(precision * -0.5))),
    ))
}

pub(super) fn from_natural(theta: &NaturalParam) -> Option<SourceParam> {
    let chol = precision_cholesky(theta)?;
    let sigma = chol.inverse();
    let mu = &sigma * DVector::from_column_slice(theta.vector());
    Some(SourceParam::MultivariateGaussian {
        mu: mu.iter().copied().collect(),
        sigma: SymMatrix::from_dmatrix(&sigma),
    })
}

pub(super) fn in_domain(theta: &NaturalParam, dim: usize) -> bool {
    shape_ok(theta, dim) && theta.is_finite() && precision_cholesky(theta).is_some()
}

pub(super) fn log_normalizer(theta: &NaturalParam) -> f64 {
    let d = theta.vector().len() as f64;
    let chol = precision_cholesky(theta).expect("checked in-domain");
    let log_det_l: f64 = chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum();
    let v = DVector::from_column_slice(theta.vector());
    let mu = chol.solve(&v);
    0.5 * d * (2.0 * PI).ln() - log_det_l + 0.5 * v.dot(&mu)
}

pub(super) fn grad(theta: &NaturalParam) -> ExpectationParam {
    let chol = precision_cholesky(theta).expect("checked in-domain");
    let sigma = chol.inverse();
    let mu = &sigma * DVector::from_column_slice(theta.vector());
    let second = sigma + &mu * mu.transpose();
    ExpectationParam::new(mu.iter().copied().collect(), Some(SymMatrix::from_dmatrix(&second)))
}

pub(super) fn grad_inverse(eta: &ExpectationParam, dim: usize) -> Option<NaturalParam> {
    let m2 = eta.matrix()?;
    if eta.vector().len() != dim || m2.dim() != dim || !eta.is_finite() {
        return None;
    }
    let mu = DVector::from_column_slice(eta.vector());
    let cov: DMatrix<f64> = m2.to_dmatrix() - &mu * mu.transpose();
    let cov = SymMatrix::from_dmatrix(&cov);
    to_natural(dim, eta.vector(), &cov).ok()
}

/// Lower Cholesky factor of Σ, row-major.
pub(super) fn covariance_factor(sigma: &SymMatrix) -> Option<Vec<f64>> {
    let chol = Cholesky::new(sigma.to_dmatrix())?;
    let l = chol.l();
    let d = sigma.dim();
    Some((0..d * d).map(|k| l[(k / d, k % d)]).collect())
}
