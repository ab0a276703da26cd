//! Exponential distribution `λ e^{-λx}`, x ≥ 0: t(x) = x, θ = -λ,
//! F(θ) = -log(-θ), k(x) = 0.

use super::positive;
use crate::error::Result;
use crate::param::{ExpectationParam, NaturalParam, SourceParam};

pub(super) fn to_natural(rate: f64) -> Result<NaturalParam> {
    positive("rate", rate)?;
    Ok(NaturalParam::scalar(-rate))
}

pub(super) fn from_natural(theta: &NaturalParam) -> SourceParam {
    SourceParam::Exponential { rate: -theta.first() }
}

pub(super) fn in_domain(theta: &NaturalParam) -> bool {
    let t = theta.first();
    t.is_finite() && t < 0.0
}

pub(super) fn log_normalizer(theta: &NaturalParam) -> f64 {
    -(-theta.first()).ln()
}

pub(super) fn grad(theta: &NaturalParam) -> ExpectationParam {
    ExpectationParam::scalar(-1.0 / theta.first())
}

pub(super) fn grad_inverse(eta: &ExpectationParam) -> Option<NaturalParam> {
    let m = eta.first();
    (m.is_finite() && m > 0.0).then(|| NaturalParam::scalar(-1.0 / m))
}
