//! Static description of each family's decomposition
//! `p(x; θ) = exp(⟨t(x), θ⟩ - F(θ) + k(x))`.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub support: &'static str,
    pub sufficient_statistic: &'static str,
    pub natural_parameter: &'static str,
    pub log_normalizer: &'static str,
    pub carrier: &'static str,
    pub natural_domain: &'static str,
}

pub const FAMILIES: [Entry; 6] = [
    Entry {
        name: "exponential",
        params: &["rate"],
        support: "x >= 0",
        sufficient_statistic: "x",
        natural_parameter: "-rate",
        log_normalizer: "-log(-θ)",
        carrier: "0",
        natural_domain: "θ < 0",
    },
    Entry {
        name: "poisson",
        params: &["rate"],
        support: "x in {0, 1, 2, ...}",
        sufficient_statistic: "x",
        natural_parameter: "log rate",
        log_normalizer: "exp(θ)",
        carrier: "-log x!",
        natural_domain: "θ real",
    },
    Entry {
        name: "bernoulli",
        params: &["p"],
        support: "x in {0, 1}",
        sufficient_statistic: "x",
        natural_parameter: "log(p / (1 - p))",
        log_normalizer: "log(1 + exp(θ))",
        carrier: "0",
        natural_domain: "θ real",
    },
    Entry {
        name: "gaussian",
        params: &["mu", "var"],
        support: "x real",
        sufficient_statistic: "(x, x²)",
        natural_parameter: "(mu/var, -1/(2 var))",
        log_normalizer: "-θ₁²/(4θ₂) + ½ log(π/(-θ₂))",
        carrier: "0",
        natural_domain: "θ₂ < 0",
    },
    Entry {
        name: "mvn",
        params: &["mu", "sigma"],
        support: "x in R^d",
        sufficient_statistic: "(x, x xᵀ)",
        natural_parameter: "(Σ⁻¹μ, -½Σ⁻¹)",
        log_normalizer: "-¼ θᵀΘ⁻¹θ + ½ log det(-πΘ⁻¹)",
        carrier: "0",
        natural_domain: "Θ symmetric negative definite",
    },
    Entry {
        name: "laplacian",
        params: &["scale"],
        support: "x real",
        sufficient_statistic: "|x|",
        natural_parameter: "-1/scale",
        log_normalizer: "log(-2/θ)",
        carrier: "0",
        natural_domain: "θ < 0",
    },
];

pub fn render_csv() -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "name",
        "params",
        "support",
        "sufficient_statistic",
        "natural_parameter",
        "log_normalizer",
        "carrier",
        "natural_domain",
    ])
    .expect("in-memory write");
    for e in &FAMILIES {
        w.write_record([
            e.name,
            &e.params.join(" "),
            e.support,
            e.sufficient_statistic,
            e.natural_parameter,
            e.log_normalizer,
            e.carrier,
            e.natural_domain,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}
