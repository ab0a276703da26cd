//! Seeded, chunked Monte Carlo averages over draws from a family member.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::families::sampling::{Sampler, Stream};
use crate::numeric::RunningMoments;
use crate::param::{Family, NaturalParam, SourceParam};

/// Mean and spread of `g(x)` over `n` draws from `p(x; theta)`.
pub(crate) fn average(
    fam: &Family,
    theta: &NaturalParam,
    n: usize,
    seed: u64,
    exec: Execution,
    g: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<RunningMoments> {
    let mut m = averages(fam, theta, n, seed, exec, 1, |x, out| out[0] = g(x))?;
    Ok(m.remove(0))
}

/// Per-coordinate moments of a `width`-valued statistic `g(x, out)`.
///
/// Chunk `c` uses stream `c` of `seed`, and chunk moments are merged in index
/// order, so the result does not depend on `exec`.
pub(crate) fn averages(
    fam: &Family,
    theta: &NaturalParam,
    n: usize,
    seed: u64,
    exec: Execution,
    width: usize,
    g: impl Fn(&[f64], &mut [f64]) + Sync,
) -> Result<Vec<RunningMoments>> {
    let sampler = Sampler::new(fam, theta)?;
    let dim = fam.sample_dim();
    let parts = exec.map_chunks(n, |c, range| {
        let mut s = Stream::new(seed, c as u64);
        let mut x = vec![0.0; dim];
        let mut out = vec![0.0; width];
        let mut m = vec![RunningMoments::default(); width];
        for _ in range {
            sampler.draw_into(&mut s, &mut x);
            g(&x, &mut out);
            for (acc, v) in m.iter_mut().zip(&out) {
                acc.push(*v);
            }
        }
        m
    });
    let mut total = vec![RunningMoments::default(); width];
    for part in &parts {
        for (acc, p) in total.iter_mut().zip(part) {
            acc.merge(p);
        }
    }
    Ok(total)
}

/// Multivariate normal log-density built directly from (μ, Σ).
pub(crate) struct NormalLogPdf {
    mu: DVector<f64>,
    lower: DMatrix<f64>,
    constant: f64,
}

impl NormalLogPdf {
    pub(crate) fn new(src: &SourceParam) -> Result<Self> {
        let SourceParam::MultivariateGaussian { mu, sigma } = src else {
            return Err(Error::FamilyMismatch(src.family().to_string(), "mvn".into()));
        };
        let d = mu.len();
        let chol = nalgebra::Cholesky::new(sigma.to_dmatrix())
            .ok_or_else(|| Error::NaturalOutOfDomain { family: src.family().to_string() })?;
        let lower = chol.l();
        let half_log_det: f64 = (0..d).map(|i| lower[(i, i)].ln()).sum();
        let constant = -0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln() - half_log_det;
        Ok(NormalLogPdf { mu: DVector::from_column_slice(mu), lower, constant })
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(x) - &self.mu;
        let z = self.lower.solve_lower_triangular_unchecked(&diff);
        self.constant - 0.5 * z.iter().map(|v| v * v).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::SymMatrix;

    #[test]
    fn normal_log_pdf_standard() {
        let src = SourceParam::MultivariateGaussian { mu: vec![0.0, 0.0], sigma: SymMatrix::identity(2) };
        let pdf = NormalLogPdf::new(&src).unwrap();
        let expect = -(2.0 * std::f64::consts::PI).ln() - 0.5 * 2.0;
        assert!((pdf.eval(&[1.0, 1.0]) - expect).abs() < 1e-14);
    }

    #[test]
    fn average_is_execution_independent() {
        let fam = Family::Gaussian;
        let theta = fam.to_natural(&SourceParam::Gaussian { mu: 1.0, var: 2.0 }).unwrap();
        let a = average(&fam, &theta, 50_000, 9, Execution::Sequential, |x| x[0]).unwrap();
        let b = average(&fam, &theta, 50_000, 9, Execution::Parallel, |x| x[0]).unwrap();
        assert_eq!(a.mean().to_bits(), b.mean().to_bits());
        assert!((a.mean() - 1.0).abs() < 4.0 * a.std_error());
    }
}
