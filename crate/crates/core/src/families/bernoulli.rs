//! Bernoulli `p^x (1-p)^{1-x}`: t(x) = x, θ = log(p/(1-p)),
//! F(θ) = log(1 + e^θ), k(x) = 0.

use crate::error::{Error, Result};
use crate::param::{ExpectationParam, NaturalParam, SourceParam};

pub(super) fn to_natural(p: f64) -> Result<NaturalParam> {
    if !(p.is_finite() && p > 0.0 && p < 1.0) {
        return Err(Error::ParameterOutOfDomain {
            field: "p",
            reason: format!("must lie in (0, 1), got {p}"),
        });
    }
    Ok(NaturalParam::scalar(logit(p)))
}

pub(super) fn from_natural(theta: &NaturalParam) -> SourceParam {
    SourceParam::Bernoulli { p: sigmoid(theta.first()) }
}

pub(super) fn in_domain(theta: &NaturalParam) -> bool {
    theta.first().is_finite()
}

pub(super) fn log_normalizer(theta: &NaturalParam) -> f64 {
    softplus(theta.first())
}

pub(super) fn grad(theta: &NaturalParam) -> ExpectationParam {
    ExpectationParam::scalar(sigmoid(theta.first()))
}

pub(super) fn grad_inverse(eta: &ExpectationParam) -> Option<NaturalParam> {
    let m = eta.first();
    (m.is_finite() && m > 0.0 && m < 1.0).then(|| NaturalParam::scalar(logit(m)))
}

fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}
