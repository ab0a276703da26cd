//! Poisson `λ^x e^{-λ} / x!`: t(x) = x, θ = log λ, F(θ) = e^θ,
//! k(x) = -log x!.
//!
//! Carrier expectations are infinite series; they are summed with the
//! truncation rule in [`truncated_sweep`].

use statrs::function::factorial::ln_factorial;

use super::positive;
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, LogSumExp};
use crate::param::{ExpectationParam, NaturalParam, SourceParam};

/// Relative size below which a series term ends the sweep.
pub const SERIES_REL_TOL: f64 = 1e-16;

const MAX_EXTRA_TERMS: u64 = 10_000_000;

pub(super) fn to_natural(rate: f64) -> Result<NaturalParam> {
    positive("rate", rate)?;
    Ok(NaturalParam::scalar(rate.ln()))
}

pub(super) fn from_natural(theta: &NaturalParam) -> SourceParam {
    SourceParam::Poisson { rate: theta.first().exp() }
}

pub(super) fn in_domain(theta: &NaturalParam) -> bool {
    let t = theta.first();
    t.is_finite() && t.exp() > 0.0 && t.exp().is_finite()
}

pub(super) fn log_normalizer(theta: &NaturalParam) -> f64 {
    theta.first().exp()
}

pub(super) fn grad(theta: &NaturalParam) -> ExpectationParam {
    ExpectationParam::scalar(theta.first().exp())
}

pub(super) fn grad_inverse(eta: &ExpectationParam) -> Option<NaturalParam> {
    let m = eta.first();
    (m.is_finite() && m > 0.0).then(|| NaturalParam::scalar(m.ln()))
}

pub(super) fn carrier(k: u64) -> f64 {
    -ln_factorial(k)
}

/// Outcome of a truncated sweep over k = 0, 1, 2, ….
#[derive(Debug, Clone, Copy)]
pub struct Sweep {
    /// Number of visited terms.
    pub terms: u64,
    /// `log Σ |term_k|` over the visited terms.
    pub log_magnitude: f64,
    /// Log of a bound on the magnitude of all unvisited terms.
    pub log_tail_bound: f64,
}

/// Visits k = 0, 1, 2, … calling `visit(k, log k!)`, which returns the log
/// magnitude of term k. Stops once k > rate + 10√rate + 20, the magnitudes are
/// decreasing, and the last one is below `rel_tol` times the accumulated total.
///
/// The tail bound `last·ρ/(1-ρ)`, with ρ the last term ratio, is exact for
/// log-concave term sequences (every Poisson-type power series here).
pub fn truncated_sweep(rate: f64, rel_tol: f64, mut visit: impl FnMut(u64, f64) -> f64) -> Result<Sweep> {
    let cutoff = rate + 10.0 * rate.sqrt() + 20.0;
    let log_rel = rel_tol.ln();
    let mut total = LogSumExp::new();
    let mut prev = f64::NEG_INFINITY;
    let mut k: u64 = 0;
    loop {
        let lm = visit(k, ln_factorial(k));
        total.add(lm);
        if (k as f64) > cutoff && lm < prev && lm < log_rel + total.value() {
            let rho = (lm - prev).exp();
            let log_tail = lm + (rho / (1.0 - rho)).ln();
            return Ok(Sweep { terms: k + 1, log_magnitude: total.value(), log_tail_bound: log_tail });
        }
        if (k as f64) > cutoff + MAX_EXTRA_TERMS as f64 {
            return Err(Error::NonConvergence(format!("Poisson series at rate {rate} did not decay")));
        }
        prev = lm;
        k += 1;
    }
}

/// `log E_{p(x; αθ)}[e^{(α-1)k(x)}] = log Σ_x exp(αθx - e^{αθ} - α log x!)`.
pub(super) fn log_carrier_moment(theta: f64, alpha: f64) -> Result<f64> {
    let scaled = alpha * theta;
    let rate_scaled = scaled.exp();
    let rate = theta.exp().max(rate_scaled);
    let mut acc = LogSumExp::new();
    truncated_sweep(rate, SERIES_REL_TOL, |x, lf| {
        let lt = scaled * x as f64 - rate_scaled - alpha * lf;
        acc.add(lt);
        lt
    })?;
    Ok(acc.value())
}

/// `E_θ[k(x)] = -Σ_x p(x) log x!`.
pub(super) fn carrier_expectation(theta: f64) -> Result<f64> {
    let rate = theta.exp();
    let mut acc = CompensatedSum::new();
    truncated_sweep(rate, SERIES_REL_TOL, |x, lf| {
        let lp = theta * x as f64 - rate - lf;
        acc.add(lp.exp() * lf);
        // p(x) log x! is log-concave only eventually; p(x) bounds the decay.
        lp + lf.max(1.0).ln()
    })?;
    Ok(-acc.value())
}
