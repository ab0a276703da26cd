//! Seeded samplers. Every family draws from explicit uniform/normal streams
//! so results depend only on `(seed, stream)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::factorial::ln_factorial;

use super::mvn;
use crate::error::{Error, Result};
use crate::param::{Family, NaturalParam, Observation, SourceParam};

/// One independent random stream.
pub(crate) struct Stream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Stream {
    pub(crate) fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Stream { rng, spare: None }
    }

    /// Uniform on [0, 1).
    pub(crate) fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on (0, 1].
    pub(crate) fn uniform_open(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Standard normal by the Marsaglia polar method.
    pub(crate) fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}

/// Constants of the PTRS transformed-rejection Poisson sampler.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ptrs {
    log_rate: f64,
    a: f64,
    b: f64,
    inv_alpha: f64,
    v_r: f64,
}

impl Ptrs {
    fn new(rate: f64) -> Self {
        let b = 0.931 + 2.53 * rate.sqrt();
        Ptrs {
            log_rate: rate.ln(),
            a: -0.059 + 0.02483 * b,
            b,
            inv_alpha: 1.1239 + 1.1328 / (b - 3.4),
            v_r: 0.9277 - 3.6224 / (b - 2.0),
        }
    }

    fn draw(&self, rate: f64, s: &mut Stream) -> u64 {
        loop {
            let u = s.uniform() - 0.5;
            let v = s.uniform();
            let us = 0.5 - u.abs();
            let k = ((2.0 * self.a / us + self.b) * u + rate + 0.43).floor();
            if us >= 0.07 && v <= self.v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let lhs = v.ln() + self.inv_alpha.ln() - (self.a / (us * us) + self.b).ln();
            let rhs = -rate + k * self.log_rate - ln_factorial(k as u64);
            if lhs <= rhs {
                return k as u64;
            }
        }
    }
}

const KNUTH_MAX_RATE: f64 = 30.0;

/// A family member prepared for repeated draws.
pub(crate) enum Sampler {
    Exponential { rate: f64 },
    Poisson { rate: f64, ptrs: Option<Ptrs> },
    Bernoulli { p: f64 },
    Gaussian { mu: f64, sd: f64 },
    Mvn { mu: Vec<f64>, factor: Vec<f64> },
    Laplacian { scale: f64 },
}

impl Sampler {
    pub(crate) fn new(family: &Family, theta: &NaturalParam) -> Result<Self> {
        Ok(match family.from_natural(theta)? {
            SourceParam::Exponential { rate } => Sampler::Exponential { rate },
            SourceParam::Poisson { rate } => Sampler::Poisson {
                rate,
                ptrs: (rate > KNUTH_MAX_RATE).then(|| Ptrs::new(rate)),
            },
            SourceParam::Bernoulli { p } => Sampler::Bernoulli { p },
            SourceParam::Gaussian { mu, var } => Sampler::Gaussian { mu, sd: var.sqrt() },
            SourceParam::MultivariateGaussian { mu, sigma } => Sampler::Mvn {
                factor: mvn::covariance_factor(&sigma).ok_or_else(|| Error::NaturalOutOfDomain {
                    family: family.to_string(),
                })?,
                mu,
            },
            SourceParam::CenteredLaplacian { scale } => Sampler::Laplacian { scale },
        })
    }

    fn count(&self, s: &mut Stream) -> u64 {
        match *self {
            Sampler::Poisson { rate, ptrs: Some(ref p) } => p.draw(rate, s),
            Sampler::Poisson { rate, ptrs: None } => {
                let limit = (-rate).exp();
                let mut k = 0;
                let mut prod = s.uniform_open();
                while prod > limit {
                    k += 1;
                    prod *= s.uniform_open();
                }
                k
            }
            Sampler::Bernoulli { p } => u64::from(s.uniform() < p),
            _ => unreachable!("continuous sampler"),
        }
    }

    /// Writes one draw as real coordinates into `out` (length = sample dim).
    pub(crate) fn draw_into(&self, s: &mut Stream, out: &mut [f64]) {
        match self {
            Sampler::Exponential { rate } => out[0] = -s.uniform_open().ln() / rate,
            Sampler::Gaussian { mu, sd } => out[0] = mu + sd * s.normal(),
            Sampler::Laplacian { scale } => {
                let e = -s.uniform_open().ln() * scale;
                out[0] = if s.uniform() < 0.5 { -e } else { e };
            }
            Sampler::Mvn { mu, factor } => {
                let d = mu.len();
                let z: Vec<f64> = (0..d).map(|_| s.normal()).collect();
                for i in 0..d {
                    out[i] = mu[i] + (0..=i).map(|j| factor[i * d + j] * z[j]).sum::<f64>();
                }
            }
            Sampler::Poisson { .. } | Sampler::Bernoulli { .. } => out[0] = self.count(s) as f64,
        }
    }

    pub(crate) fn draw(&self, s: &mut Stream) -> Observation {
        match self {
            Sampler::Poisson { .. } | Sampler::Bernoulli { .. } => Observation::Count(self.count(s)),
            Sampler::Mvn { mu, .. } => {
                let mut out = vec![0.0; mu.len()];
                self.draw_into(s, &mut out);
                Observation::Vector(out)
            }
            _ => {
                let mut out = [0.0];
                self.draw_into(s, &mut out);
                Observation::Real(out[0])
            }
        }
    }
}
