//! Direct numerical evaluation of the information measures, used to check the
//! closed forms.
//!
//! Only log-densities, sampling and the support of each family are used:
//! continuous univariate families are integrated by adaptive Gauss–Kronrod
//! quadrature on a window found from the integrand itself, discrete families
//! are summed with a certified tail, and the multivariate normal is handled by
//! seeded Monte Carlo with an importance proposal.

mod montecarlo;
mod quadrature;

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::families::poisson::truncated_sweep;
use crate::families::Density;
use crate::measures::{Measure, MeasureRequest, LIMIT_BAND};
use crate::numeric::{mix_seed, CompensatedSum, RunningMoments};
use crate::param::{Family, NaturalParam, Observation, SourceParam};

use montecarlo::{average, averages, NormalLogPdf};
use quadrature::{integrate, settle_window, Window, WINDOW_DEPTH};

/// Minimum Monte Carlo sample count.
pub const MIN_MC_SAMPLES: usize = 1_000;

/// Tolerances, truncation and seeding for the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Absolute quadrature target.
    pub abs_tol: f64,
    /// Relative quadrature target.
    pub rel_tol: f64,
    /// Maximum number of quadrature pieces.
    pub max_subdivisions: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Relative size of the last kept term of a discrete sum.
    pub tail_mass_bound: f64,
    pub execution: Execution,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            mc_samples: 1_000_000,
            seed: 0,
            tail_mass_bound: 1e-15,
            execution: Execution::default(),
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {x}")))
            }
        };
        positive("abs_tol", self.abs_tol)?;
        positive("rel_tol", self.rel_tol)?;
        positive("tail_mass_bound", self.tail_mass_bound)?;
        if self.tail_mass_bound >= 1.0 {
            return Err(Error::InvalidConfig("tail_mass_bound must be below 1".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig("max_subdivisions must be at least 1".into()));
        }
        if self.mc_samples < MIN_MC_SAMPLES {
            return Err(Error::InvalidConfig(format!("mc_samples must be at least {MIN_MC_SAMPLES}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    DiscreteSum,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Quadrature => "Quadrature",
            Method::DiscreteSum => "DiscreteSum",
            Method::MonteCarlo => "MonteCarlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A numerical value with a bound on its error (three standard errors for
/// Monte Carlo).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
}

impl OracleEstimate {
    /// Applies a monotone `g`, carrying the error interval through it.
    pub fn map(self, g: impl Fn(f64) -> f64) -> OracleEstimate {
        let value = g(self.value);
        let spread = [self.value - self.error_bound, self.value + self.error_bound]
            .map(|x| (g(x) - value).abs())
            .into_iter()
            .fold(0.0, |acc: f64, d| if d.is_nan() { f64::INFINITY } else { acc.max(d) });
        OracleEstimate { value, error_bound: spread + 4.0 * f64::EPSILON * value.abs(), method: self.method }
    }

    /// Whether `target` lies within `error_bound + tol` of the value.
    pub fn agrees_with(&self, target: f64, tol: f64) -> bool {
        (self.value - target).abs() <= self.error_bound + tol
    }
}

/// Sample mean of one sufficient-statistic coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Relative rounding allowance added to every Monte Carlo bound.
const MC_ROUNDING: f64 = 1e-12;

mod tag {
    pub const SELF_POWER: u64 = 1;
    pub const CROSS_POWER: u64 = 2;
    pub const ENTROPY: u64 = 3;
    pub const KL: u64 = 4;
    pub const CROSS_ENTROPY: u64 = 5;
    pub const MASS: u64 = 6;
    pub const MOMENTS: u64 = 7;
}

fn mc_estimate(m: &RunningMoments) -> OracleEstimate {
    let value = m.mean();
    OracleEstimate {
        value,
        error_bound: 3.0 * m.std_error() + MC_ROUNDING * value.abs(),
        method: Method::MonteCarlo,
    }
}

/// Integrand as a function of `(log p(x), log q(x))`.
#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// `p^α`
    Power(f64),
    /// `p^α q^{1-α}`
    Cross(f64),
    /// `-p log p`
    NegPLogP,
    /// `p (log p - log q)`
    PLogRatio,
    /// `-p log q`
    NegPLogQ,
    /// `p`
    Mass,
}

impl Kernel {
    fn value(self, lp: f64, lq: f64) -> f64 {
        let weighted = |w: f64| if lp == f64::NEG_INFINITY { 0.0 } else { lp.exp() * w };
        match self {
            Kernel::Power(a) => (a * lp).exp(),
            Kernel::Cross(a) => (a * lp + (1.0 - a) * lq).exp(),
            Kernel::NegPLogP => weighted(-lp),
            Kernel::PLogRatio => weighted(lp - lq),
            Kernel::NegPLogQ => weighted(-lq),
            Kernel::Mass => lp.exp(),
        }
    }

    /// Bound on the error of `value` given errors `dp`, `dq` in the logs.
    fn rounding(self, lp: f64, lq: f64, dp: f64, dq: f64) -> f64 {
        let v = self.value(lp, lq).abs();
        let p = if lp == f64::NEG_INFINITY { 0.0 } else { lp.exp() };
        let propagated = match self {
            Kernel::Power(a) => v * a * dp,
            Kernel::Cross(a) => v * (a * dp + (1.0 - a).abs() * dq),
            Kernel::NegPLogP => p * dp * (lp.abs() + 1.0),
            Kernel::PLogRatio => p * (dp * (lp - lq).abs() + dp + dq),
            Kernel::NegPLogQ => p * (dp * lq.abs() + dq),
            Kernel::Mass => p * dp,
        };
        propagated + 4.0 * f64::EPSILON * v
    }

    /// Upper bound on `log |value|` that decays like the value does.
    fn log_magnitude(self, lp: f64, lq: f64) -> f64 {
        let with = |w: f64| lp + w.abs().max(1.0).ln();
        match self {
            Kernel::Power(a) => a * lp,
            Kernel::Cross(a) => a * lp + (1.0 - a) * lq,
            Kernel::NegPLogP => with(lp),
            Kernel::PLogRatio => with(lp - lq),
            Kernel::NegPLogQ => with(lq),
            Kernel::Mass => lp,
        }
    }
}

/// The window where `log p` is within [`WINDOW_DEPTH`] nats of its peak.
fn base_window(src: &SourceParam) -> Window {
    let open = |lo: f64, hi: f64| Window { lo, hi, lo_open: true, hi_open: true };
    match *src {
        SourceParam::Exponential { rate } => Window { lo: 0.0, hi: WINDOW_DEPTH / rate, lo_open: false, hi_open: true },
        SourceParam::Gaussian { mu, var } => {
            let half = (2.0 * WINDOW_DEPTH * var).sqrt();
            open(mu - half, mu + half)
        }
        SourceParam::CenteredLaplacian { scale } => open(-WINDOW_DEPTH * scale, WINDOW_DEPTH * scale),
        _ => unreachable!("not a continuous univariate family"),
    }
}

fn source_rate(fam: &Family, theta: &NaturalParam) -> Result<f64> {
    match fam.from_natural(theta)? {
        SourceParam::Poisson { rate } => Ok(rate),
        _ => unreachable!("not a Poisson parameter"),
    }
}

/// Rounding allowance for a log-density, relative to the magnitude of its terms.
const LOG_ROUNDING: f64 = 8.0 * f64::EPSILON;

/// Integrates or sums `kernel` over the support of a univariate family.
fn univariate(fam: &Family, p: &Density, q: Option<&Density>, kernel: Kernel, cfg: &OracleConfig) -> Result<OracleEstimate> {
    match fam {
        Family::Bernoulli => {
            let mut sum = CompensatedSum::new();
            let mut rounding = 0.0;
            for k in 0..2 {
                let (lp, lq, dp, dq) = count_logs(p, q, k);
                sum.add(kernel.value(lp, lq));
                rounding += kernel.rounding(lp, lq, dp, dq);
            }
            Ok(OracleEstimate { value: sum.value(), error_bound: rounding, method: Method::DiscreteSum })
        }
        Family::Poisson => {
            let rp = source_rate(fam, p.theta())?;
            let rq = match q {
                Some(q) => source_rate(fam, q.theta())?,
                None => rp,
            };
            // The summand is itself Poisson-shaped; its rate places the peak.
            let peak = match kernel {
                Kernel::Power(a) => rp.powf(a),
                Kernel::Cross(a) => rp.powf(a) * rq.powf(1.0 - a),
                _ => rp,
            };
            let rate = rp.max(rq).max(peak);
            if !rate.is_finite() {
                return Err(Error::NonConvergence("series peak is not finite".into()));
            }
            let mut sum = CompensatedSum::new();
            let mut rounding = 0.0;
            let sweep = truncated_sweep(rate, cfg.tail_mass_bound, |k, _| {
                let (lp, lq, dp, dq) = count_logs(p, q, k);
                sum.add(kernel.value(lp, lq));
                rounding += kernel.rounding(lp, lq, dp, dq);
                kernel.log_magnitude(lp, lq)
            })?;
            Ok(OracleEstimate {
                value: sum.value(),
                error_bound: sweep.log_tail_bound.exp() + rounding,
                method: Method::DiscreteSum,
            })
        }
        Family::Exponential | Family::Gaussian | Family::CenteredLaplacian => {
            let mut window = base_window(&fam.from_natural(p.theta())?);
            if let Some(q) = q {
                window = window.union(base_window(&fam.from_natural(q.theta())?));
            }
            let logs = |x: f64| {
                let lp = p.log_density_reals(&[x]);
                (lp, q.map_or(lp, |q| q.log_density_reals(&[x])))
            };
            let errs = |x: f64| {
                let dp = LOG_ROUNDING * p.log_density_scale_real(x);
                (dp, q.map_or(dp, |q| LOG_ROUNDING * q.log_density_scale_real(x)))
            };
            let (window, tail) = settle_window(
                |x| {
                    let (lp, lq) = logs(x);
                    kernel.log_magnitude(lp, lq)
                },
                window,
            )?;
            let segments = if *fam == Family::CenteredLaplacian {
                vec![(window.lo, 0.0), (0.0, window.hi)]
            } else {
                vec![(window.lo, window.hi)]
            };
            let integral = integrate(
                |x| {
                    let (lp, lq) = logs(x);
                    let (dp, dq) = errs(x);
                    (kernel.value(lp, lq), kernel.rounding(lp, lq, dp, dq))
                },
                &segments,
                cfg.abs_tol,
                cfg.rel_tol,
                cfg.max_subdivisions,
            )?;
            Ok(OracleEstimate { value: integral.value, error_bound: integral.error + tail, method: Method::Quadrature })
        }
        Family::MultivariateGaussian { .. } => unreachable!("handled by Monte Carlo"),
    }
}

/// Log-masses at a count and their rounding allowances.
fn count_logs(p: &Density, q: Option<&Density>, k: u64) -> (f64, f64, f64, f64) {
    let lp = p.log_density_count(k);
    let dp = LOG_ROUNDING * p.log_density_scale_count(k);
    match q {
        Some(q) => (lp, q.log_density_count(k), dp, LOG_ROUNDING * q.log_density_scale_count(k)),
        None => (lp, lp, dp, dp),
    }
}

fn prepare(fam: &Family, theta: &NaturalParam, cfg: &OracleConfig) -> Result<Density> {
    cfg.validate()?;
    fam.density(theta)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Importance-sampled `E_g[exp(log_f(x) - log g(x))]` with `g = p(x; proposal)`.
fn importance(
    fam: &Family,
    proposal: &NaturalParam,
    tag: u64,
    cfg: &OracleConfig,
    log_f: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<OracleEstimate> {
    let g = NormalLogPdf::new(&fam.from_natural(proposal)?)?;
    let m = average(fam, proposal, cfg.mc_samples, mix_seed(cfg.seed, tag), cfg.execution, |x| {
        (log_f(x) - g.eval(x)).exp()
    })?;
    Ok(mc_estimate(&m))
}

/// Plain Monte Carlo mean of `h(x)` under `p`.
fn plain(fam: &Family, p: &Density, tag: u64, cfg: &OracleConfig, h: impl Fn(&[f64]) -> f64 + Sync) -> Result<OracleEstimate> {
    let m = average(fam, p.theta(), cfg.mc_samples, mix_seed(cfg.seed, tag), cfg.execution, h)?;
    Ok(mc_estimate(&m))
}

/// `I_α(p) = ∫ p(x)^α dx`.
pub fn oracle_i_alpha_self(fam: &Family, theta: &NaturalParam, alpha: f64, cfg: &OracleConfig) -> Result<OracleEstimate> {
    let p = prepare(fam, theta, cfg)?;
    check_alpha(alpha)?;
    match fam {
        Family::MultivariateGaussian { .. } => {
            // Proposal p(x; αθ), which is proportional to p^α.
            importance(fam, &theta.scaled(alpha), tag::SELF_POWER, cfg, |x| alpha * p.log_density_reals(x))
        }
        _ => univariate(fam, &p, None, Kernel::Power(alpha), cfg),
    }
}

/// `I_α(p:q) = ∫ p(x)^α q(x)^{1-α} dx`. Divergent integrals (possible for
/// α > 1) are reported as [`Error::NonConvergence`].
pub fn oracle_i_alpha_cross(
    fam: &Family,
    theta: &NaturalParam,
    theta_q: &NaturalParam,
    alpha: f64,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    let p = prepare(fam, theta, cfg)?;
    let q = fam.density(theta_q)?;
    check_alpha(alpha)?;
    match fam {
        Family::MultivariateGaussian { .. } => {
            let mix = theta.mix(alpha, theta_q)?;
            // A Gaussian integrand exp(quadratic) is integrable exactly when
            // its quadratic part is negative definite.
            if !fam.in_natural_domain(&mix)? {
                return Err(Error::NonConvergence(format!(
                    "p^α q^(1-α) is not integrable for {fam} at α = {alpha}"
                )));
            }
            importance(fam, &mix, tag::CROSS_POWER, cfg, |x| {
                alpha * p.log_density_reals(x) + (1.0 - alpha) * q.log_density_reals(x)
            })
        }
        _ => univariate(fam, &p, Some(&q), Kernel::Cross(alpha), cfg),
    }
}

/// `-∫ p log p`.
pub fn oracle_shannon_entropy(fam: &Family, theta: &NaturalParam, cfg: &OracleConfig) -> Result<OracleEstimate> {
    let p = prepare(fam, theta, cfg)?;
    match fam {
        Family::MultivariateGaussian { .. } => plain(fam, &p, tag::ENTROPY, cfg, |x| -p.log_density_reals(x)),
        _ => univariate(fam, &p, None, Kernel::NegPLogP, cfg),
    }
}

/// `∫ p log(p/q)`.
pub fn oracle_kl(fam: &Family, theta: &NaturalParam, theta_q: &NaturalParam, cfg: &OracleConfig) -> Result<OracleEstimate> {
    let p = prepare(fam, theta, cfg)?;
    let q = fam.density(theta_q)?;
    match fam {
        Family::MultivariateGaussian { .. } => {
            plain(fam, &p, tag::KL, cfg, |x| p.log_density_reals(x) - q.log_density_reals(x))
        }
        _ => univariate(fam, &p, Some(&q), Kernel::PLogRatio, cfg),
    }
}

/// `-∫ p log q`.
pub fn oracle_cross_entropy(
    fam: &Family,
    theta: &NaturalParam,
    theta_q: &NaturalParam,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    let p = prepare(fam, theta, cfg)?;
    let q = fam.density(theta_q)?;
    match fam {
        Family::MultivariateGaussian { .. } => plain(fam, &p, tag::CROSS_ENTROPY, cfg, |x| -q.log_density_reals(x)),
        _ => univariate(fam, &p, Some(&q), Kernel::NegPLogQ, cfg),
    }
}

/// `∫ p`, which should be 1.
pub fn oracle_total_mass(fam: &Family, theta: &NaturalParam, cfg: &OracleConfig) -> Result<OracleEstimate> {
    let p = prepare(fam, theta, cfg)?;
    match fam {
        // Proposal p(x; 0.8θ) = N(μ, 1.25Σ) has heavier tails than p.
        Family::MultivariateGaussian { .. } => {
            importance(fam, &theta.scaled(0.8), tag::MASS, cfg, |x| p.log_density_reals(x))
        }
        _ => univariate(fam, &p, None, Kernel::Mass, cfg),
    }
}

/// Sample means of the sufficient statistic over `cfg.mc_samples` draws, in
/// the coordinate order of [`crate::ExpectationParam::coordinates`].
pub fn oracle_moments(fam: &Family, theta: &NaturalParam, cfg: &OracleConfig) -> Result<Vec<MomentEstimate>> {
    prepare(fam, theta, cfg)?;
    let width = fam.order();
    let discrete = fam.is_discrete();
    let m = averages(fam, theta, cfg.mc_samples, mix_seed(cfg.seed, tag::MOMENTS), cfg.execution, width, |x, out| {
        let obs = match (discrete, x) {
            (true, _) => Observation::Count(x[0] as u64),
            (false, [v]) => Observation::Real(*v),
            (false, v) => Observation::Vector(v.to_vec()),
        };
        let t = fam.sufficient_stat(&obs).expect("draws lie in the support").coordinates();
        out.copy_from_slice(&t);
    })?;
    Ok(m.iter().map(|m| MomentEstimate { mean: m.mean(), std_error: m.std_error() }).collect())
}

/// Largest `|FD_i - ∇F(θ)_i| / (1 + |∇F(θ)_i|)` over all coordinates, with
/// central differences of F. Off-diagonal matrix coordinates are moved by
/// `step/2` in both symmetric positions.
pub fn oracle_grad_check(fam: &Family, theta: &NaturalParam, step: f64) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
    }
    let grad = fam.grad_log_normalizer(theta)?.coordinates();
    let f_at = |t: &NaturalParam| -> Result<f64> {
        if !fam.in_natural_domain(t)? {
            return Err(Error::StepOutOfDomain { step });
        }
        fam.log_normalizer(t)
    };
    let central = |perturb: &dyn Fn(&mut NaturalParam, f64)| -> Result<f64> {
        let (mut up, mut down) = (theta.clone(), theta.clone());
        perturb(&mut up, step);
        perturb(&mut down, -step);
        Ok((f_at(&up)? - f_at(&down)?) / (2.0 * step))
    };
    let rel = |fd: f64, g: f64| (fd - g).abs() / (1.0 + g.abs());
    let n_vec = theta.vector().len();
    let mut worst: f64 = 0.0;
    for (i, &g) in grad.iter().enumerate().take(n_vec) {
        let fd = central(&|t, h| t.vector_mut()[i] += h)?;
        worst = worst.max(rel(fd, g));
    }
    if let Some(m) = theta.matrix() {
        let d = m.dim();
        for i in 0..d {
            for j in i..d {
                let fd = central(&|t, h| {
                    let m = t.matrix_mut().expect("matrix part");
                    let shift = if i == j { h } else { 0.5 * h };
                    let v = m.get(i, j) + shift;
                    m.set_symmetric(i, j, v);
                })?;
                worst = worst.max(rel(fd, grad[n_vec + i * d + j]));
            }
        }
    }
    Ok(worst)
}

/// Numerical value of any measure, assembled from the integrals above.
pub fn oracle_measure(
    fam: &Family,
    request: &MeasureRequest,
    theta: &NaturalParam,
    theta_q: Option<&NaturalParam>,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    let m = request.measure;
    let alpha = match (m.needs_alpha(), request.alpha) {
        (true, Some(a)) => {
            check_alpha(a)?;
            a
        }
        (true, None) => return Err(Error::InvalidAlpha(f64::NAN)),
        (false, _) => f64::NAN,
    };
    let q = || theta_q.ok_or_else(|| Error::MissingSample(format!("{m} needs a second distribution")));
    let near_one = (alpha - 1.0).abs() < LIMIT_BAND;
    Ok(match m {
        Measure::Renyi | Measure::Tsallis if near_one => oracle_shannon_entropy(fam, theta, cfg)?,
        Measure::Renyi => oracle_i_alpha_self(fam, theta, alpha, cfg)?.map(|i| i.ln() / (1.0 - alpha)),
        Measure::Tsallis => oracle_i_alpha_self(fam, theta, alpha, cfg)?.map(|i| (i - 1.0) / (1.0 - alpha)),
        Measure::Shannon => oracle_shannon_entropy(fam, theta, cfg)?,
        Measure::CrossEntropy => oracle_cross_entropy(fam, theta, q()?, cfg)?,
        Measure::Kl => oracle_kl(fam, theta, q()?, cfg)?,
        Measure::RenyiDivergence | Measure::TsallisDivergence if near_one => oracle_kl(fam, theta, q()?, cfg)?,
        Measure::RenyiDivergence => {
            oracle_i_alpha_cross(fam, theta, q()?, alpha, cfg)?.map(|i| i.ln() / (alpha - 1.0))
        }
        Measure::TsallisDivergence => {
            oracle_i_alpha_cross(fam, theta, q()?, alpha, cfg)?.map(|i| (i - 1.0) / (alpha - 1.0))
        }
        Measure::Bhattacharyya => oracle_i_alpha_cross(fam, theta, q()?, 0.5, cfg)?,
        Measure::Hellinger => oracle_i_alpha_cross(fam, theta, q()?, 0.5, cfg)?.map(|b| (1.0 - b).max(0.0).sqrt()),
        Measure::Jensen => oracle_i_alpha_cross(fam, theta, q()?, alpha, cfg)?.map(|i| -i.ln()),
        // B_F(θ:θ') is the KL divergence from p_θ' to p_θ.
        Measure::Bregman => oracle_kl(fam, q()?, theta, cfg)?,
    })
}
