//! Univariate Gaussian: t(x) = (x, x²), θ = (μ/σ², -1/(2σ²)),
//! F(θ) = -θ₁²/(4θ₂) + ½ log(π/(-θ₂)), k(x) = 0.

use std::f64::consts::PI;

use super::positive;
use crate::error::{Error, Result};
use crate::param::{ExpectationParam, NaturalParam, SourceParam};

pub(super) fn to_natural(mu: f64, var: f64) -> Result<NaturalParam> {
    if !mu.is_finite() {
        return Err(Error::ParameterOutOfDomain { field: "mu", reason: format!("must be finite, got {mu}") });
    }
    positive("var", var)?;
    Ok(NaturalParam::from_vec(vec![mu / var, -0.5 / var]))
}

pub(super) fn from_natural(theta: &NaturalParam) -> SourceParam {
    let (t1, t2) = (theta.vector()[0], theta.vector()[1]);
    let var = -0.5 / t2;
    SourceParam::Gaussian { mu: t1 * var, var }
}

pub(super) fn in_domain(theta: &NaturalParam) -> bool {
    let v = theta.vector();
    v[0].is_finite() && v[1].is_finite() && v[1] < 0.0
}

pub(super) fn log_normalizer(theta: &NaturalParam) -> f64 {
    let (t1, t2) = (theta.vector()[0], theta.vector()[1]);
    -t1 * t1 / (4.0 * t2) + 0.5 * (PI / -t2).ln()
}

pub(super) fn grad(theta: &NaturalParam) -> ExpectationParam {
    let (t1, t2) = (theta.vector()[0], theta.vector()[1]);
    let mu = -t1 / (2.0 * t2);
    let var = -0.5 / t2;
    ExpectationParam::from_vec(vec![mu, mu * mu + var])
}

pub(super) fn grad_inverse(eta: &ExpectationParam) -> Option<NaturalParam> {
    let (m1, m2) = (eta.vector()[0], eta.vector()[1]);
    let var = m2 - m1 * m1;
    (m1.is_finite() && var.is_finite() && var > 0.0)
        .then(|| NaturalParam::from_vec(vec![m1 / var, -0.5 / var]))
}
