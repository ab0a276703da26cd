//! Closed form vs oracle over a grid of (distribution pair, measure, α).

use expfam::oracle::oracle_measure;
use expfam::{evaluate, Execution, Family, Measure, MeasureRequest, Method, OracleConfig, SourceParam, SymMatrix};

use crate::cli::FamilyName;
use crate::error::CliError;
use crate::params;
use crate::report::{OracleJson, Row};

/// Orders checked by default, straddling the α → 1 limit.
pub const GRID_ALPHAS: [f64; 5] = [0.5, 0.9, 1.0 - 1e-4, 1.0 + 1e-4, 2.0];

/// Allowed `|closed form - oracle|` beyond the oracle's own error bound.
pub fn tolerance(method: Method) -> f64 {
    match method {
        Method::Quadrature => 1e-7,
        Method::DiscreteSum => 1e-9,
        Method::MonteCarlo => 0.0,
    }
}

#[derive(Debug, Clone)]
pub struct Case {
    pub family: Family,
    pub p: SourceParam,
    pub q: Option<SourceParam>,
}

fn sym(rows: [[f64; 2]; 2]) -> SymMatrix {
    SymMatrix::from_rows(&rows.map(Vec::from)).expect("built-in matrix is symmetric")
}

/// Built-in pairs. For each, `2θ - θ'` stays in the natural domain so every
/// α-measure exists at α = 2.
pub fn builtin_cases() -> Vec<Case> {
    use SourceParam::*;
    let pairs = vec![
        (Exponential { rate: 1.0 }, Exponential { rate: 1.5 }),
        (Exponential { rate: 0.5 }, Exponential { rate: 0.8 }),
        (Poisson { rate: 2.0 }, Poisson { rate: 3.5 }),
        (Poisson { rate: 10.0 }, Poisson { rate: 7.0 }),
        (Bernoulli { p: 0.3 }, Bernoulli { p: 0.6 }),
        (Bernoulli { p: 0.85 }, Bernoulli { p: 0.2 }),
        (Gaussian { mu: 0.0, var: 1.0 }, Gaussian { mu: 1.0, var: 1.5 }),
        (Gaussian { mu: -2.0, var: 0.5 }, Gaussian { mu: 0.5, var: 0.8 }),
        (
            MultivariateGaussian { mu: vec![0.0, 0.0], sigma: SymMatrix::identity(2) },
            MultivariateGaussian { mu: vec![0.5, -0.5], sigma: sym([[1.5, 0.3], [0.3, 1.2]]) },
        ),
        (
            MultivariateGaussian { mu: vec![1.0, 2.0], sigma: sym([[2.0, 0.5], [0.5, 1.0]]) },
            MultivariateGaussian { mu: vec![0.0, 1.0], sigma: sym([[2.5, 0.0], [0.0, 1.5]]) },
        ),
        (CenteredLaplacian { scale: 1.0 }, CenteredLaplacian { scale: 1.5 }),
        (CenteredLaplacian { scale: 2.0 }, CenteredLaplacian { scale: 1.2 }),
    ];
    pairs.into_iter().map(|(p, q)| Case { family: p.family(), p, q: Some(q) }).collect()
}

pub fn select_cases(family: Option<FamilyName>) -> Vec<Case> {
    builtin_cases()
        .into_iter()
        .filter(|c| family.is_none_or(|f| f.matches(&c.family)))
        .collect()
}

/// One (case, measure, α) cell per applicable combination.
pub fn cells(cases: &[Case], measures: &[Measure], alphas: &[f64]) -> Vec<(usize, MeasureRequest)> {
    let mut out = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        for &measure in measures {
            if measure.is_pairwise() && case.q.is_none() {
                continue;
            }
            if measure.needs_alpha() {
                out.extend(alphas.iter().map(|&a| (i, MeasureRequest { measure, alpha: Some(a) })));
            } else {
                out.push((i, MeasureRequest { measure, alpha: None }));
            }
        }
    }
    out
}

fn check(case: &Case, request: &MeasureRequest, cfg: &OracleConfig) -> Result<Row, CliError> {
    let fam = case.family;
    let theta = fam.to_natural(&case.p)?;
    let theta_q = case.q.as_ref().map(|q| fam.to_natural(q)).transpose()?;
    let closed = evaluate(&fam, request, &theta, theta_q.as_ref())?;
    let oracle = oracle_measure(&fam, request, &theta, theta_q.as_ref(), cfg)?;
    let pass = oracle.agrees_with(closed.value, tolerance(oracle.method));
    let mut row = Row::new(request.measure, request.alpha, &closed);
    row.oracle = Some(OracleJson::from(&oracle));
    row.pass = Some(pass);
    row.family = Some(fam.name().to_owned());
    row.params = Some(params::to_json(&case.p));
    row.params2 = case.q.as_ref().map(params::to_json);
    Ok(row)
}

/// Evaluates every cell; cells are independent and run concurrently.
pub fn run(cases: &[Case], cells: &[(usize, MeasureRequest)], cfg: &OracleConfig) -> Result<Vec<Row>, CliError> {
    Execution::default()
        .map_indexed(cells.len(), |i| {
            let (case, request) = &cells[i];
            let c = &cases[*case];
            check(c, request, cfg).map_err(|e| e.context(&format!("{} {}", c.family, request.measure)))
        })
        .into_iter()
        .collect()
}
