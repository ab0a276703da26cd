//! Centered Laplacian `(1/2σ) e^{-|x|/σ}`: t(x) = |x|, θ = -1/σ,
//! F(θ) = log 2 - log(-θ), k(x) = 0.

use std::f64::consts::LN_2;

use super::positive;
use crate::error::Result;
use crate::param::{ExpectationParam, NaturalParam, SourceParam};

pub(super) fn to_natural(scale: f64) -> Result<NaturalParam> {
    positive("scale", scale)?;
    Ok(NaturalParam::scalar(-1.0 / scale))
}

pub(super) fn from_natural(theta: &NaturalParam) -> SourceParam {
    SourceParam::CenteredLaplacian { scale: -1.0 / theta.first() }
}

pub(super) fn in_domain(theta: &NaturalParam) -> bool {
    let t = theta.first();
    t.is_finite() && t < 0.0
}

pub(super) fn log_normalizer(theta: &NaturalParam) -> f64 {
    LN_2 - (-theta.first()).ln()
}

pub(super) fn grad(theta: &NaturalParam) -> ExpectationParam {
    ExpectationParam::scalar(-1.0 / theta.first())
}

pub(super) fn grad_inverse(eta: &ExpectationParam) -> Option<NaturalParam> {
    let m = eta.first();
    (m.is_finite() && m > 0.0).then(|| NaturalParam::scalar(-1.0 / m))
}
