mod catalog;
mod cli;
mod data;
mod error;
mod params;
mod report;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use expfam::estimation::{mle, plugin_measure};
use expfam::{evaluate, Measure, MeasureRequest, OracleConfig, SampleSet};
use serde_json::{json, Value};

use cli::{Cli, Command, DivergenceArgs, EntropyArgs, EstimateArgs, OutputFormat, VerifyArgs};
use error::CliError;
use report::{EstimateRow, Report, Row};

/// Exit code when some closed form disagrees with the oracle.
const VERIFY_FAILED: u8 = 1;

struct Outcome {
    text: String,
    failed: bool,
}

fn check_alphas(alphas: &[f64]) -> Result<(), CliError> {
    match alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        Some(a) => Err(CliError::Domain(format!("alpha: order must be a positive finite number, got {a}"))),
        None => Ok(()),
    }
}

/// Expands measures × α into requests, α only for measures that take one.
fn requests(measures: &[Measure], alphas: &[f64]) -> Result<Vec<MeasureRequest>, CliError> {
    if let Some(m) = measures.iter().find(|m| m.needs_alpha()) {
        if alphas.is_empty() {
            return Err(CliError::Usage(format!("--alpha is required for measure `{m}`")));
        }
    }
    check_alphas(alphas)?;
    Ok(measures
        .iter()
        .flat_map(|&measure| -> Vec<MeasureRequest> {
            if measure.needs_alpha() {
                alphas.iter().map(|&a| MeasureRequest { measure, alpha: Some(a) }).collect()
            } else {
                vec![MeasureRequest { measure, alpha: None }]
            }
        })
        .collect())
}

fn require_kind(measures: &[Measure], pairwise: bool, other: &str) -> Result<(), CliError> {
    match measures.iter().find(|m| m.is_pairwise() != pairwise) {
        Some(m) => Err(CliError::Usage(format!("measure `{m}` belongs to the `{other}` subcommand"))),
        None => Ok(()),
    }
}

fn names(measures: &[Measure]) -> Vec<&'static str> {
    measures.iter().map(Measure::name).collect()
}

fn family_name(name: cli::FamilyName) -> Value {
    use clap::ValueEnum;
    json!(name.to_possible_value().expect("no skipped variants").get_name())
}

fn entropy(args: &EntropyArgs) -> Result<Report, CliError> {
    require_kind(&args.measure, false, "divergence")?;
    let (fam, src) = params::parse(args.family, &args.params).map_err(|e| e.context("--params"))?;
    let theta = fam.to_natural(&src)?;
    let mut results = Vec::new();
    for req in requests(&args.measure, &args.alpha)? {
        results.push(Row::new(req.measure, req.alpha, &evaluate(&fam, &req, &theta, None)?));
    }
    let request = json!({
        "subcommand": "entropy",
        "family": family_name(args.family),
        "params": params::to_json(&src),
        "measures": names(&args.measure),
        "alpha": args.alpha,
    });
    Ok(Report { request, results, estimates: None })
}

fn divergence(args: &DivergenceArgs) -> Result<Report, CliError> {
    require_kind(&args.measure, true, "entropy")?;
    let (fam, src) = params::parse(args.family, &args.params).map_err(|e| e.context("--params"))?;
    let (fam2, src2) = params::parse(args.family, &args.params2).map_err(|e| e.context("--params2"))?;
    if fam != fam2 {
        return Err(CliError::Domain(format!("--params2: dimension differs from --params ({fam} vs {fam2})")));
    }
    let (theta, theta_q) = (fam.to_natural(&src)?, fam.to_natural(&src2)?);
    let mut results = Vec::new();
    for req in requests(&args.measure, &args.alpha)? {
        results.push(Row::new(req.measure, req.alpha, &evaluate(&fam, &req, &theta, Some(&theta_q))?));
    }
    let request = json!({
        "subcommand": "divergence",
        "family": family_name(args.family),
        "params": params::to_json(&src),
        "params2": params::to_json(&src2),
        "measures": names(&args.measure),
        "alpha": args.alpha,
    });
    Ok(Report { request, results, estimates: None })
}

fn estimate_row(label: &str, s: &SampleSet) -> Result<EstimateRow, CliError> {
    let e = mle(s)?;
    Ok(EstimateRow {
        sample: label.to_owned(),
        n: e.n,
        params: params::to_json(&s.family().from_natural(&e.theta)?),
        theta: e.theta.coordinates(),
        mean_sufficient_stat: e.mean_sufficient_stat.coordinates(),
    })
}

fn estimate(args: &EstimateArgs) -> Result<Report, CliError> {
    let p = data::read(args.family, &args.data, "--data")?;
    let q = args.data2.as_ref().map(|path| data::read(args.family, path, "--data2")).transpose()?;
    let mut estimates = vec![estimate_row("data", &p).map_err(|e| e.context("--data"))?];
    if let Some(q) = &q {
        estimates.push(estimate_row("data2", q).map_err(|e| e.context("--data2"))?);
    }
    if let Some(m) = args.measure.iter().find(|m| m.is_pairwise()) {
        if q.is_none() {
            return Err(CliError::Usage(format!("measure `{m}` needs --data2")));
        }
    }
    let mut results = Vec::new();
    for req in requests(&args.measure, &args.alpha)? {
        let r = plugin_measure(&req, &p, if req.measure.is_pairwise() { q.as_ref() } else { None })?;
        results.push(Row::new(req.measure, req.alpha, &r));
    }
    let request = json!({
        "subcommand": "estimate",
        "family": family_name(args.family),
        "data": args.data.display().to_string(),
        "data2": args.data2.as_ref().map(|p| p.display().to_string()),
        "measures": names(&args.measure),
        "alpha": args.alpha,
    });
    Ok(Report { request, results, estimates: Some(estimates) })
}

fn verify(args: &VerifyArgs) -> Result<Report, CliError> {
    let cfg = OracleConfig {
        abs_tol: args.abs_tol,
        mc_samples: args.mc_samples,
        seed: args.seed,
        ..OracleConfig::default()
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let cases = match (&args.family, &args.params) {
        (Some(name), Some(text)) => {
            let (family, p) = params::parse(*name, text).map_err(|e| e.context("--params"))?;
            let q = match &args.params2 {
                Some(t) => Some(params::parse(*name, t).map_err(|e| e.context("--params2"))?),
                None => None,
            };
            if let Some((f2, _)) = &q {
                if *f2 != family {
                    return Err(CliError::Domain(format!("--params2: dimension differs from --params ({family} vs {f2})")));
                }
            }
            vec![verify::Case { family, p, q: q.map(|(_, q)| q) }]
        }
        (family, _) => verify::select_cases(*family),
    };
    let measures = if args.measure.is_empty() { Measure::ALL.to_vec() } else { args.measure.clone() };
    let alphas = if args.alpha.is_empty() { verify::GRID_ALPHAS.to_vec() } else { args.alpha.clone() };
    check_alphas(&alphas)?;
    let cells = verify::cells(&cases, &measures, &alphas);
    let results = verify::run(&cases, &cells, &cfg)?;
    let request = json!({
        "subcommand": "verify",
        "family": args.family.map(family_name),
        "params": args.params.as_ref().map(|_| params::to_json(&cases[0].p)),
        "params2": args.params2.as_ref().and_then(|_| cases[0].q.as_ref().map(params::to_json)),
        "measures": names(&measures),
        "alpha": alphas,
        "seed": args.seed,
        "mc_samples": args.mc_samples,
        "abs_tol": args.abs_tol,
    });
    Ok(Report { request, results, estimates: None })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let report = match &cli.command {
        Command::Entropy(a) => entropy(a)?,
        Command::Divergence(a) => divergence(a)?,
        Command::Estimate(a) => estimate(a)?,
        Command::Verify(a) => verify(a)?,
        Command::Families => {
            let text = match cli.output {
                OutputFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&json!({ "families": catalog::FAMILIES }))
                        .expect("catalog serializes");
                    s.push('\n');
                    s
                }
                OutputFormat::Csv => catalog::render_csv(),
            };
            return Ok(Outcome { text, failed: false });
        }
    };
    let failed = report.results.iter().any(|r| r.pass == Some(false));
    Ok(Outcome { text: report::render(&report, cli.output), failed })
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.failed {
                eprintln!("error: some closed-form values disagree with the oracle");
                ExitCode::from(VERIFY_FAILED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
