//! Closed-form information measures between members of one exponential family.
//!
//! Everything reduces to the log-normalizer F:
//!
//! - `I_α(p) = ∫p^α = exp(F(αθ) - αF(θ)) · E_{p(x;αθ)}[e^{(α-1)k(x)}]`
//! - Rényi entropy `log I_α(p) / (1-α)`, Tsallis entropy `(I_α(p) - 1) / (1-α)`
//! - Shannon entropy `F(θ) - ⟨θ, ∇F(θ)⟩ - E_θ[k(x)]`
//! - skew Jensen `J_α(θ:θ') = αF(θ) + (1-α)F(θ') - F(αθ + (1-α)θ')`, with
//!   `I_α(p:q) = ∫p^α q^{1-α} = e^{-J_α}`
//! - Rényi divergence `J_α / (1-α)`, Tsallis divergence `(e^{-J_α} - 1) / (α-1)`
//! - `KL(p_θ : p_θ') = B_F(θ' : θ)`
//!
//! Within [`LIMIT_BAND`] of α = 1 the α-forms are 0/0; those calls return the
//! Shannon or KL limit and record the branch in [`MeasureResult`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::param::{Family, NaturalParam};

/// Half-width of the band around α = 1 routed to limit formulas.
pub const LIMIT_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    ClosedForm,
    ShannonLimit,
    KlLimit,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::ClosedForm => "ClosedForm",
            Branch::ShannonLimit => "ShannonLimit",
            Branch::KlLimit => "KLLimit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub branch: Branch,
    pub alpha: Option<f64>,
}

impl MeasureResult {
    fn closed(value: f64, alpha: Option<f64>) -> Self {
        MeasureResult { value, branch: Branch::ClosedForm, alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Renyi,
    Tsallis,
    Shannon,
    CrossEntropy,
    Kl,
    RenyiDivergence,
    TsallisDivergence,
    Bhattacharyya,
    Hellinger,
    Jensen,
    Bregman,
}

impl Measure {
    pub const ALL: [Measure; 11] = [
        Measure::Renyi,
        Measure::Tsallis,
        Measure::Shannon,
        Measure::CrossEntropy,
        Measure::Kl,
        Measure::RenyiDivergence,
        Measure::TsallisDivergence,
        Measure::Bhattacharyya,
        Measure::Hellinger,
        Measure::Jensen,
        Measure::Bregman,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Renyi => "renyi",
            Measure::Tsallis => "tsallis",
            Measure::Shannon => "shannon",
            Measure::CrossEntropy => "cross-entropy",
            Measure::Kl => "kl",
            Measure::RenyiDivergence => "renyi-div",
            Measure::TsallisDivergence => "tsallis-div",
            Measure::Bhattacharyya => "bhattacharyya",
            Measure::Hellinger => "hellinger",
            Measure::Jensen => "jensen",
            Measure::Bregman => "bregman",
        }
    }

    /// Whether the measure is parameterized by an order α.
    pub fn needs_alpha(&self) -> bool {
        matches!(
            self,
            Measure::Renyi | Measure::Tsallis | Measure::RenyiDivergence | Measure::TsallisDivergence | Measure::Jensen
        )
    }

    /// Whether the measure compares two distributions.
    pub fn is_pairwise(&self) -> bool {
        !matches!(self, Measure::Renyi | Measure::Tsallis | Measure::Shannon)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown measure `{s}`"))
    }
}

/// Which measure to evaluate, and at which order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureRequest {
    pub measure: Measure,
    pub alpha: Option<f64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

fn in_limit_band(alpha: f64) -> bool {
    (alpha - 1.0).abs() < LIMIT_BAND
}

/// `log I_α(p) = F(αθ) - αF(θ) + log E_{p(x;αθ)}[e^{(α-1)k(x)}]`.
fn log_i_alpha_self(fam: &Family, theta: &NaturalParam, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let moment = fam.log_carrier_moment(theta, alpha)?;
    let scaled = fam.log_normalizer_unchecked(&theta.scaled(alpha));
    Ok(scaled - alpha * fam.log_normalizer_unchecked(theta) + moment)
}

/// `I_α(p) = ∫ p(x)^α dx`.
pub fn i_alpha_self(fam: &Family, theta: &NaturalParam, alpha: f64) -> Result<f64> {
    log_i_alpha_self(fam, theta, alpha).map(f64::exp)
}

pub fn renyi_entropy(fam: &Family, theta: &NaturalParam, alpha: f64) -> Result<MeasureResult> {
    check_alpha(alpha)?;
    if in_limit_band(alpha) {
        return Ok(MeasureResult {
            value: shannon_entropy(fam, theta)?,
            branch: Branch::ShannonLimit,
            alpha: Some(alpha),
        });
    }
    let log_i = log_i_alpha_self(fam, theta, alpha)?;
    Ok(MeasureResult::closed(log_i / (1.0 - alpha), Some(alpha)))
}

pub fn tsallis_entropy(fam: &Family, theta: &NaturalParam, alpha: f64) -> Result<MeasureResult> {
    check_alpha(alpha)?;
    if in_limit_band(alpha) {
        return Ok(MeasureResult {
            value: shannon_entropy(fam, theta)?,
            branch: Branch::ShannonLimit,
            alpha: Some(alpha),
        });
    }
    let log_i = log_i_alpha_self(fam, theta, alpha)?;
    Ok(MeasureResult::closed(log_i.exp_m1() / (1.0 - alpha), Some(alpha)))
}

/// `H(p) = F(θ) - ⟨θ, ∇F(θ)⟩ - E_θ[k(x)]`.
pub fn shannon_entropy(fam: &Family, theta: &NaturalParam) -> Result<f64> {
    let eta = fam.grad_log_normalizer(theta)?;
    let carrier = fam.carrier_expectation(theta)?;
    Ok(fam.log_normalizer_unchecked(theta) - theta.dot(&eta) - carrier)
}

/// `H^×(p:q) = F(θ') - ⟨θ', ∇F(θ)⟩ - E_θ[k(x)]`.
pub fn shannon_cross_entropy(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam) -> Result<f64> {
    fam.require_domain(theta_q)?;
    let eta = fam.grad_log_normalizer(theta)?;
    let carrier = fam.carrier_expectation(theta)?;
    Ok(fam.log_normalizer_unchecked(theta_q) - theta_q.dot(&eta) - carrier)
}

/// Skew Jensen divergence `J_α(θ:θ') = αF(θ) + (1-α)F(θ') - F(αθ + (1-α)θ')`.
///
/// Non-negative for α ∈ [0, 1], non-positive outside when the mixed
/// parameter stays in the domain.
pub fn skew_jensen(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    fam.require_domain(theta)?;
    fam.require_domain(theta_q)?;
    let mixed = theta.mix(alpha, theta_q)?;
    if !fam.in_natural_domain(&mixed)? {
        return Err(Error::MixedOutOfDomain { family: fam.to_string(), alpha });
    }
    Ok(alpha * fam.log_normalizer_unchecked(theta) + (1.0 - alpha) * fam.log_normalizer_unchecked(theta_q)
        - fam.log_normalizer_unchecked(&mixed))
}

/// Bregman divergence `B_F(lhs : rhs) = F(lhs) - F(rhs) - ⟨lhs - rhs, ∇F(rhs)⟩`.
pub fn bregman(fam: &Family, lhs: &NaturalParam, rhs: &NaturalParam) -> Result<f64> {
    fam.require_domain(lhs)?;
    let eta = fam.grad_log_normalizer(rhs)?;
    let diff = lhs.affine(1.0, rhs, -1.0)?;
    Ok(fam.log_normalizer_unchecked(lhs) - fam.log_normalizer_unchecked(rhs) - diff.dot(&eta))
}

/// `KL(p_θ : p_θ') = B_F(θ' : θ)`.
pub fn kl_divergence(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam) -> Result<f64> {
    bregman(fam, theta_q, theta)
}

fn pairwise_alpha(
    fam: &Family,
    theta: &NaturalParam,
    theta_q: &NaturalParam,
    alpha: f64,
    closed: impl FnOnce(f64) -> f64,
) -> Result<MeasureResult> {
    check_alpha(alpha)?;
    if in_limit_band(alpha) {
        return Ok(MeasureResult {
            value: kl_divergence(fam, theta, theta_q)?,
            branch: Branch::KlLimit,
            alpha: Some(alpha),
        });
    }
    let j = skew_jensen(fam, theta, theta_q, alpha)?;
    Ok(MeasureResult::closed(closed(j), Some(alpha)))
}

/// `D^R_α(p:q) = J_α(θ:θ') / (1-α)`.
pub fn renyi_divergence(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam, alpha: f64) -> Result<MeasureResult> {
    pairwise_alpha(fam, theta, theta_q, alpha, |j| j / (1.0 - alpha))
}

/// `D^T_α(p:q) = (e^{-J_α(θ:θ')} - 1) / (α-1)`.
pub fn tsallis_divergence(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam, alpha: f64) -> Result<MeasureResult> {
    pairwise_alpha(fam, theta, theta_q, alpha, |j| (-j).exp_m1() / (alpha - 1.0))
}

/// `I_α(p:q) = ∫ p^α q^{1-α} = e^{-J_α(θ:θ')}`.
pub fn i_alpha_cross(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    skew_jensen(fam, theta, theta_q, alpha).map(|j| (-j).exp())
}

/// `B(p, q) = ∫ √(pq) = e^{-J_½(θ:θ')}`.
pub fn bhattacharyya_coefficient(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam) -> Result<f64> {
    skew_jensen(fam, theta, theta_q, 0.5).map(|j| (-j).exp())
}

/// `H(p, q) = √(1 - B(p, q))`.
pub fn hellinger_distance(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam) -> Result<f64> {
    let j = skew_jensen(fam, theta, theta_q, 0.5)?;
    Ok((-(-j).exp_m1()).max(0.0).sqrt())
}

fn check_conversion_alpha(alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(())
}

/// `H^T = (e^{(1-α)H^R} - 1) / (1-α)`.
pub fn renyi_to_tsallis(h_renyi: f64, alpha: f64) -> Result<f64> {
    check_conversion_alpha(alpha)?;
    Ok(((1.0 - alpha) * h_renyi).exp_m1() / (1.0 - alpha))
}

/// `H^R = log((1-α)H^T + 1) / (1-α)`.
pub fn tsallis_to_renyi(h_tsallis: f64, alpha: f64) -> Result<f64> {
    check_conversion_alpha(alpha)?;
    let arg = (1.0 - alpha) * h_tsallis + 1.0;
    if arg <= 0.0 {
        return Err(Error::LogOfNonpositive(arg));
    }
    Ok(((1.0 - alpha) * h_tsallis).ln_1p() / (1.0 - alpha))
}

/// Evaluates `request` for `p_θ` (and `q = p_θ'` for pairwise measures).
pub fn evaluate(
    fam: &Family,
    request: &MeasureRequest,
    theta: &NaturalParam,
    theta_q: Option<&NaturalParam>,
) -> Result<MeasureResult> {
    let m = request.measure;
    let alpha = match (m.needs_alpha(), request.alpha) {
        (true, Some(a)) => a,
        (true, None) => return Err(Error::InvalidAlpha(f64::NAN)),
        (false, _) => f64::NAN,
    };
    let q = || theta_q.ok_or_else(|| Error::MissingSample(format!("{m} needs a second distribution")));
    let plain = |v: f64| MeasureResult::closed(v, None);
    Ok(match m {
        Measure::Renyi => renyi_entropy(fam, theta, alpha)?,
        Measure::Tsallis => tsallis_entropy(fam, theta, alpha)?,
        Measure::Shannon => plain(shannon_entropy(fam, theta)?),
        Measure::CrossEntropy => plain(shannon_cross_entropy(fam, theta, q()?)?),
        Measure::Kl => plain(kl_divergence(fam, theta, q()?)?),
        Measure::RenyiDivergence => renyi_divergence(fam, theta, q()?, alpha)?,
        Measure::TsallisDivergence => tsallis_divergence(fam, theta, q()?, alpha)?,
        Measure::Bhattacharyya => plain(bhattacharyya_coefficient(fam, theta, q()?)?),
        Measure::Hellinger => plain(hellinger_distance(fam, theta, q()?)?),
        Measure::Jensen => MeasureResult::closed(skew_jensen(fam, theta, q()?, alpha)?, Some(alpha)),
        Measure::Bregman => plain(bregman(fam, theta, q()?)?),
    })
}
