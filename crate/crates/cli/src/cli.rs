use clap::{Args, Parser, Subcommand, ValueEnum};
use expfam::Measure;

#[derive(Debug, Parser)]
#[command(name = "expfam", version, about = "Entropies and divergences of exponential-family distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies of one distribution (renyi, tsallis, shannon)
    Entropy(EntropyArgs),
    /// Measures between two distributions of the same family
    Divergence(DivergenceArgs),
    /// Maximum-likelihood parameters from CSV samples, with optional plug-in measures
    Estimate(EstimateArgs),
    /// Compare closed forms with the numerical oracle
    Verify(VerifyArgs),
    /// List the implemented families and their decompositions
    Families,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Exponential,
    Poisson,
    Bernoulli,
    Gaussian,
    Mvn,
    Laplacian,
}

impl FamilyName {
    pub fn matches(&self, fam: &expfam::Family) -> bool {
        use expfam::Family as F;
        matches!(
            (self, fam),
            (FamilyName::Exponential, F::Exponential)
                | (FamilyName::Poisson, F::Poisson)
                | (FamilyName::Bernoulli, F::Bernoulli)
                | (FamilyName::Gaussian, F::Gaussian)
                | (FamilyName::Mvn, F::MultivariateGaussian { .. })
                | (FamilyName::Laplacian, F::CenteredLaplacian)
        )
    }
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Source parameters as a JSON object, e.g. '{"mu":0,"var":1}'
    #[arg(long)]
    pub params: String,
    /// renyi | tsallis | shannon (repeatable)
    #[arg(long, required = true, value_parser = parse_measure)]
    pub measure: Vec<Measure>,
    /// Order α > 0 (repeatable)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Parameters of p as a JSON object
    #[arg(long)]
    pub params: String,
    /// Parameters of q as a JSON object
    #[arg(long)]
    pub params2: String,
    /// cross-entropy | kl | renyi-div | tsallis-div | bhattacharyya | hellinger | jensen | bregman
    #[arg(long, required = true, value_parser = parse_measure)]
    pub measure: Vec<Measure>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// CSV file of observations: no header, one observation per row
    #[arg(long)]
    pub data: std::path::PathBuf,
    /// Second sample, for pairwise measures
    #[arg(long)]
    pub data2: Option<std::path::PathBuf>,
    /// Plug-in measures to evaluate at the estimates (repeatable)
    #[arg(long, value_parser = parse_measure)]
    pub measure: Vec<Measure>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict to one family; with --params, verify that distribution only
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long, requires = "family")]
    pub params: Option<String>,
    #[arg(long, requires = "params")]
    pub params2: Option<String>,
    /// Restrict the measures (repeatable; default all)
    #[arg(long, value_parser = parse_measure)]
    pub measure: Vec<Measure>,
    /// Orders to check (repeatable; default 0.5, 0.9, 1±1e-4, 2)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo sample count for the multivariate normal
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_samples: usize,
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
}
