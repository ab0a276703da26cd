//! Maximum-likelihood estimation: θ̂ = (∇F)⁻¹ of the mean sufficient
//! statistic, and plug-in measures evaluated at the estimates.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::{evaluate, MeasureRequest, MeasureResult};
use crate::numeric::CompensatedSum;
use crate::param::{ExpectationParam, Family, NaturalParam, Observation, SymMatrix};

/// Non-empty i.i.d. observations from one family, all in its support.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    family: Family,
    observations: Vec<Observation>,
}

impl SampleSet {
    pub fn new(family: Family, observations: Vec<Observation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::DegenerateSample("sample is empty".into()));
        }
        for x in &observations {
            family.check_support(x)?;
        }
        Ok(SampleSet { family, observations })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    /// Always false: construction rejects empty samples.
    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub theta: NaturalParam,
    pub n: usize,
    /// `(1/n) Σ t(x_i)`.
    pub mean_sufficient_stat: ExpectationParam,
}

/// Empirical variances at or below this multiple of ε·E[x²] are rounding noise.
const VARIANCE_NOISE: f64 = 4.0 * f64::EPSILON;

fn mean_sufficient_stat(s: &SampleSet, exec: Execution) -> Result<ExpectationParam> {
    let fam = s.family;
    let width = fam.order();
    let obs = &s.observations;
    let parts = exec.map_chunks(obs.len(), |_, range| {
        let mut sums = vec![CompensatedSum::new(); width];
        for x in &obs[range] {
            let t = fam.sufficient_stat(x).expect("support checked on construction").coordinates();
            for (acc, v) in sums.iter_mut().zip(t) {
                acc.add(v);
            }
        }
        sums
    });
    let mut sums = vec![CompensatedSum::new(); width];
    for part in &parts {
        for (acc, p) in sums.iter_mut().zip(part) {
            acc.merge(p);
        }
    }
    let n = obs.len() as f64;
    let means: Vec<f64> = sums.iter().map(|s| s.value() / n).collect();
    Ok(match fam {
        Family::MultivariateGaussian { dim } => {
            ExpectationParam::new(means[..dim].to_vec(), Some(SymMatrix::new(dim, means[dim..].to_vec())?))
        }
        _ => ExpectationParam::from_vec(means),
    })
}

/// Closed-form MLE with the default execution strategy.
pub fn mle(s: &SampleSet) -> Result<Estimate> {
    mle_with(s, Execution::default())
}

pub fn mle_with(s: &SampleSet, exec: Execution) -> Result<Estimate> {
    let fam = s.family;
    let n = s.len();
    if let Family::MultivariateGaussian { dim } = fam {
        if n < dim + 1 {
            return Err(Error::DegenerateSample(format!(
                "{n} observations cannot give a nonsingular covariance in dimension {dim}"
            )));
        }
    }
    let eta = mean_sufficient_stat(s, exec)?;
    if fam == Family::Gaussian {
        let (m1, m2) = (eta.vector()[0], eta.vector()[1]);
        if m2 - m1 * m1 <= VARIANCE_NOISE * m2 {
            return Err(Error::DegenerateSample("empirical variance is zero".into()));
        }
    }
    let theta = fam.grad_inverse(&eta).map_err(|e| match e {
        Error::ExpectationOutOfDomain { .. } => {
            Error::DegenerateSample(format!("mean sufficient statistic is on the boundary for {fam}"))
        }
        other => other,
    })?;
    Ok(Estimate { theta, n, mean_sufficient_stat: eta })
}

/// Evaluates `request` at the MLE of `s_p` (and of `s_q` for pairwise measures).
pub fn plugin_measure(request: &MeasureRequest, s_p: &SampleSet, s_q: Option<&SampleSet>) -> Result<MeasureResult> {
    let fam = s_p.family;
    let p = mle(s_p)?;
    let q = match s_q {
        Some(s) if s.family != fam => {
            return Err(Error::FamilyMismatch(fam.to_string(), s.family.to_string()));
        }
        Some(s) => Some(mle(s)?),
        None => None,
    };
    evaluate(&fam, request, &p.theta, q.as_ref().map(|e| &e.theta))
}

#[cfg(test)]
mod tests;
