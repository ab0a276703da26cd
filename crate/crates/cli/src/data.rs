//! CSV observation files: no header, one observation per row, one column per
//! coordinate. Discrete families require non-negative integers.

use std::path::Path;

use expfam::{Family, Observation, SampleSet};

use crate::cli::FamilyName;
use crate::error::CliError;

fn parse_rows(text: &str) -> Result<Vec<Vec<String>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_owned).collect())
                .map_err(|e| CliError::Domain(format!("malformed CSV: {e}")))
        })
        .collect()
}

fn real(field: &str, line: usize) -> Result<f64, CliError> {
    field
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Domain(format!("row {line}: `{field}` is not a finite number")))
}

fn count(field: &str, line: usize) -> Result<u64, CliError> {
    field
        .parse::<u64>()
        .map_err(|_| CliError::Domain(format!("row {line}: `{field}` is not a non-negative integer")))
}

/// Parses CSV text into a sample of the named family.
pub fn parse(name: FamilyName, text: &str) -> Result<SampleSet, CliError> {
    let rows = parse_rows(text)?;
    let width = match name {
        FamilyName::Mvn => rows.first().map_or(1, Vec::len),
        _ => 1,
    };
    let family = match name {
        FamilyName::Exponential => Family::Exponential,
        FamilyName::Poisson => Family::Poisson,
        FamilyName::Bernoulli => Family::Bernoulli,
        FamilyName::Gaussian => Family::Gaussian,
        FamilyName::Mvn => Family::MultivariateGaussian { dim: width },
        FamilyName::Laplacian => Family::CenteredLaplacian,
    };
    let mut observations = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let line = i + 1;
        if row.len() != width {
            return Err(CliError::Domain(format!("row {line}: expected {width} field(s), found {}", row.len())));
        }
        observations.push(match name {
            FamilyName::Poisson | FamilyName::Bernoulli => Observation::Count(count(&row[0], line)?),
            FamilyName::Mvn => Observation::Vector(row.iter().map(|f| real(f, line)).collect::<Result<_, _>>()?),
            _ => Observation::Real(real(&row[0], line)?),
        });
    }
    Ok(SampleSet::new(family, observations)?)
}

pub fn read(name: FamilyName, path: &Path, flag: &str) -> Result<SampleSet, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{flag}: cannot read {}: {e}", path.display())))?;
    parse(name, &text).map_err(|e| e.context(flag))
}
