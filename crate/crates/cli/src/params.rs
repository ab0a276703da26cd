//! Source-parameter JSON objects, with fixed keys per family.

use expfam::{Family, SourceParam, SymMatrix};
use serde_json::{json, Map, Value};

use crate::cli::FamilyName;
use crate::error::CliError;

fn malformed(msg: String) -> CliError {
    CliError::Domain(msg)
}

fn keys(name: FamilyName) -> &'static [&'static str] {
    match name {
        FamilyName::Exponential | FamilyName::Poisson => &["rate"],
        FamilyName::Bernoulli => &["p"],
        FamilyName::Gaussian => &["mu", "var"],
        FamilyName::Mvn => &["mu", "sigma"],
        FamilyName::Laplacian => &["scale"],
    }
}

fn number(obj: &Map<String, Value>, key: &str) -> Result<f64, CliError> {
    obj[key].as_f64().ok_or_else(|| malformed(format!("field `{key}` must be a number")))
}

fn vector(v: &Value, key: &str) -> Result<Vec<f64>, CliError> {
    let bad = || malformed(format!("field `{key}` must be an array of numbers"));
    v.as_array().ok_or_else(bad)?.iter().map(|x| x.as_f64().ok_or_else(bad)).collect()
}

/// Parses `text` as the source parameters of `name`; the error names the field.
pub fn parse(name: FamilyName, text: &str) -> Result<(Family, SourceParam), CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let obj = value.as_object().ok_or_else(|| malformed("expected a JSON object".into()))?;
    let expected = keys(name);
    if let Some(k) = obj.keys().find(|k| !expected.contains(&k.as_str())) {
        return Err(malformed(format!("unknown field `{k}` (expected {})", expected.join(", "))));
    }
    if let Some(k) = expected.iter().find(|k| !obj.contains_key(**k)) {
        return Err(malformed(format!("missing field `{k}`")));
    }
    let src = match name {
        FamilyName::Exponential => SourceParam::Exponential { rate: number(obj, "rate")? },
        FamilyName::Poisson => SourceParam::Poisson { rate: number(obj, "rate")? },
        FamilyName::Bernoulli => SourceParam::Bernoulli { p: number(obj, "p")? },
        FamilyName::Gaussian => SourceParam::Gaussian { mu: number(obj, "mu")?, var: number(obj, "var")? },
        FamilyName::Laplacian => SourceParam::CenteredLaplacian { scale: number(obj, "scale")? },
        FamilyName::Mvn => {
            let mu = vector(&obj["mu"], "mu")?;
            let rows = obj["sigma"]
                .as_array()
                .ok_or_else(|| malformed("field `sigma` must be an array of rows".into()))?
                .iter()
                .map(|r| vector(r, "sigma"))
                .collect::<Result<Vec<_>, _>>()?;
            if mu.is_empty() {
                return Err(malformed("field `mu` must not be empty".into()));
            }
            if rows.len() != mu.len() || rows.iter().any(|r| r.len() != mu.len()) {
                return Err(malformed(format!("field `sigma` must be {0}×{0} to match `mu`", mu.len())));
            }
            let sigma = SymMatrix::from_rows(&rows).map_err(|e| malformed(format!("field `sigma`: {e}")))?;
            SourceParam::MultivariateGaussian { mu, sigma }
        }
    };
    let fam = src.family();
    // Range checks (positivity, p in (0,1), Σ positive definite) name the field.
    fam.to_natural(&src)?;
    Ok((fam, src))
}

pub fn to_json(src: &SourceParam) -> Value {
    match src {
        SourceParam::Exponential { rate } | SourceParam::Poisson { rate } => json!({ "rate": rate }),
        SourceParam::Bernoulli { p } => json!({ "p": p }),
        SourceParam::Gaussian { mu, var } => json!({ "mu": mu, "var": var }),
        SourceParam::MultivariateGaussian { mu, sigma } => json!({ "mu": mu, "sigma": sigma.rows() }),
        SourceParam::CenteredLaplacian { scale } => json!({ "scale": scale }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_family() {
        let (fam, src) = parse(FamilyName::Gaussian, r#"{"mu":0,"var":1}"#).unwrap();
        assert_eq!(fam, Family::Gaussian);
        assert_eq!(src, SourceParam::Gaussian { mu: 0.0, var: 1.0 });
        let (fam, _) = parse(FamilyName::Mvn, r#"{"mu":[0,1,2],"sigma":[[1,0,0],[0,1,0],[0,0,1]]}"#).unwrap();
        assert_eq!(fam, Family::MultivariateGaussian { dim: 3 });
        assert!(parse(FamilyName::Poisson, r#"{"rate":2.5}"#).is_ok());
    }

    #[test]
    fn errors_name_the_field() {
        let msg = |name, text| parse(name, text).unwrap_err().to_string();
        assert!(msg(FamilyName::Gaussian, r#"{"mu":0,"var":-1}"#).contains("var"));
        assert!(msg(FamilyName::Gaussian, r#"{"mu":0}"#).contains("`var`"));
        assert!(msg(FamilyName::Exponential, r#"{"lambda":1}"#).contains("`lambda`"));
        assert!(msg(FamilyName::Bernoulli, r#"{"p":"x"}"#).contains("`p`"));
        assert!(msg(FamilyName::Mvn, r#"{"mu":[0,0],"sigma":[[1,0]]}"#).contains("sigma"));
        assert!(msg(FamilyName::Mvn, r#"{"mu":[0,0],"sigma":[[1,2],[2,1]]}"#).contains("sigma"));
        assert!(matches!(parse(FamilyName::Poisson, "{rate:1"), Err(CliError::Domain(_))));
    }

    #[test]
    fn json_round_trip() {
        let (_, src) = parse(FamilyName::Mvn, r#"{"mu":[0.5,1],"sigma":[[2,0.1],[0.1,1]]}"#).unwrap();
        let back = parse(FamilyName::Mvn, &to_json(&src).to_string()).unwrap().1;
        assert_eq!(src, back);
    }
}
