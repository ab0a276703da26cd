//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use expfam::estimation::{mle, plugin_measure};
use expfam::measures::{
    bhattacharyya_coefficient, hellinger_distance, kl_divergence, renyi_divergence, renyi_entropy, renyi_to_tsallis,
    shannon_cross_entropy, shannon_entropy, skew_jensen, tsallis_entropy, tsallis_to_renyi, LIMIT_BAND,
};
use expfam::numeric::mix_seed;
use expfam::oracle::{oracle_grad_check, oracle_i_alpha_self, oracle_measure, oracle_moments};
use expfam::{
    evaluate, Error, Family, Measure, MeasureRequest, Method, NaturalParam, Observation, OracleConfig, SampleSet,
    SourceParam, SymMatrix,
};

/// Collects failed checks for one criterion.
#[derive(Default)]
struct Checks {
    total: usize,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, got: f64, want: f64, tol: f64, what: &str) {
        self.check((got - want).abs() <= tol, || format!("{what}: got {got:e}, want {want:e} (tol {tol:e})"));
    }
}

/// Uniform draws in [0, 1) from a fixed counter-based stream.
struct Uniforms {
    seed: u64,
    counter: u64,
}

impl Uniforms {
    fn new(seed: u64) -> Self {
        Uniforms { seed, counter: 0 }
    }

    fn next(&mut self, lo: f64, hi: f64) -> f64 {
        self.counter += 1;
        let u = (mix_seed(self.seed, self.counter) >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

fn random_source(fam: Family, u: &mut Uniforms) -> SourceParam {
    match fam {
        Family::Exponential => SourceParam::Exponential { rate: u.next(0.2, 5.0) },
        Family::Poisson => SourceParam::Poisson { rate: u.next(0.5, 30.0) },
        Family::Bernoulli => SourceParam::Bernoulli { p: u.next(0.05, 0.95) },
        Family::Gaussian => SourceParam::Gaussian { mu: u.next(-3.0, 3.0), var: u.next(0.2, 4.0) },
        Family::MultivariateGaussian { dim } => {
            let a: Vec<f64> = (0..dim * dim).map(|_| u.next(-1.0, 1.0)).collect();
            let mut sigma = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    let dot: f64 = (0..dim).map(|k| a[i * dim + k] * a[j * dim + k]).sum();
                    sigma[i * dim + j] = dot + if i == j { 0.3 } else { 0.0 };
                }
            }
            SourceParam::MultivariateGaussian {
                mu: (0..dim).map(|_| u.next(-1.0, 1.0)).collect(),
                sigma: SymMatrix::new(dim, sigma).unwrap(),
            }
        }
        Family::CenteredLaplacian => SourceParam::CenteredLaplacian { scale: u.next(0.2, 4.0) },
    }
}

fn natural(fam: Family, src: &SourceParam) -> NaturalParam {
    fam.to_natural(src).unwrap()
}

/// Fixed non-uniform representatives (p, q) per family.
fn representative_pair(fam: Family) -> (NaturalParam, NaturalParam) {
    let (p, q) = match fam {
        Family::Exponential => (SourceParam::Exponential { rate: 1.5 }, SourceParam::Exponential { rate: 0.7 }),
        Family::Poisson => (SourceParam::Poisson { rate: 4.0 }, SourceParam::Poisson { rate: 6.5 }),
        Family::Bernoulli => (SourceParam::Bernoulli { p: 0.2 }, SourceParam::Bernoulli { p: 0.55 }),
        Family::Gaussian => (SourceParam::Gaussian { mu: 0.5, var: 2.0 }, SourceParam::Gaussian { mu: -1.0, var: 1.0 }),
        Family::MultivariateGaussian { .. } => (
            SourceParam::MultivariateGaussian {
                mu: vec![0.0, 1.0],
                sigma: SymMatrix::new(2, vec![1.0, 0.3, 0.3, 2.0]).unwrap(),
            },
            SourceParam::MultivariateGaussian {
                mu: vec![0.5, 0.0],
                sigma: SymMatrix::new(2, vec![1.5, -0.2, -0.2, 1.0]).unwrap(),
            },
        ),
        Family::CenteredLaplacian => {
            (SourceParam::CenteredLaplacian { scale: 1.0 }, SourceParam::CenteredLaplacian { scale: 2.5 })
        }
    };
    (natural(fam, &p), natural(fam, &q))
}

fn criterion_1(c: &mut Checks) {
    let g = natural(Family::Gaussian, &SourceParam::Gaussian { mu: 0.0, var: 1.0 });
    let h = renyi_entropy(&Family::Gaussian, &g, 2.0).unwrap().value;
    c.close(h, 0.5 * (2.0 * PI).ln() + 0.5 * 2f64.ln(), 1e-12, "gaussian renyi α=2");

    let e1 = natural(Family::Exponential, &SourceParam::Exponential { rate: 1.0 });
    let e2 = natural(Family::Exponential, &SourceParam::Exponential { rate: 2.0 });
    let d = renyi_divergence(&Family::Exponential, &e1, &e2, 0.5).unwrap().value;
    c.close(d, 2.0 * (1.5 / 2f64.sqrt()).ln(), 1e-12, "exponential renyi divergence α=½");
    c.close(shannon_entropy(&Family::Exponential, &e1).unwrap(), 1.0, 1e-12, "exponential shannon λ=1");

    let fam = Family::MultivariateGaussian { dim: 2 };
    let src = SourceParam::MultivariateGaussian { mu: vec![0.0, 0.0], sigma: SymMatrix::identity(2) };
    let theta = natural(fam, &src);
    let h = renyi_entropy(&fam, &theta, 2.0).unwrap().value;
    c.close(h, (4.0 * PI).ln(), 1e-12, "mvn renyi d=2 α=2");
    let start = Instant::now();
    let cfg = OracleConfig { mc_samples: 1_000_000, seed: 1, ..OracleConfig::default() };
    let req = MeasureRequest { measure: Measure::Renyi, alpha: Some(2.0) };
    let mc = oracle_measure(&fam, &req, &theta, None, &cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    c.check(mc.method == Method::MonteCarlo && mc.agrees_with(h, 0.0), || {
        format!("mvn monte carlo {} ± {} vs {h}", mc.value, mc.error_bound)
    });
    c.check(elapsed < 10.0, || format!("mvn monte carlo took {elapsed:.1}s"));
}

const GRID_MEASURES: [Measure; 6] =
    [Measure::Renyi, Measure::Tsallis, Measure::Shannon, Measure::Kl, Measure::Bhattacharyya, Measure::Hellinger];

fn criterion_2(c: &mut Checks) {
    let start = Instant::now();
    let cfg = OracleConfig { seed: 2, ..OracleConfig::default() };
    let mut u = Uniforms::new(2024);
    for fam in Family::REPRESENTATIVES {
        for _ in 0..3 {
            let p = natural(fam, &random_source(fam, &mut u));
            let q = natural(fam, &random_source(fam, &mut u));
            for measure in GRID_MEASURES {
                let alphas: &[Option<f64>] =
                    if measure.needs_alpha() { &[Some(0.5), Some(0.9), Some(2.0)] } else { &[None] };
                for &alpha in alphas {
                    let req = MeasureRequest { measure, alpha };
                    let qq = measure.is_pairwise().then_some(&q);
                    let closed = evaluate(&fam, &req, &p, qq).unwrap().value;
                    let oracle = oracle_measure(&fam, &req, &p, qq, &cfg).unwrap();
                    let ok = match oracle.method {
                        Method::Quadrature => (closed - oracle.value).abs() <= 1e-7,
                        Method::DiscreteSum => (closed - oracle.value).abs() <= 1e-9,
                        Method::MonteCarlo => oracle.agrees_with(closed, 0.0),
                    };
                    c.check(ok, || {
                        format!("{fam} {measure} α={alpha:?}: closed {closed} oracle {} ± {}", oracle.value, oracle.error_bound)
                    });
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check(elapsed < 60.0, || format!("grid took {elapsed:.1}s"));
}

fn criterion_3(c: &mut Checks) {
    for fam in Family::REPRESENTATIVES {
        let (p, q) = representative_pair(fam);
        let h = shannon_entropy(&fam, &p).unwrap();
        let kl = kl_divergence(&fam, &p, &q).unwrap();
        let hr = |a: f64| renyi_entropy(&fam, &p, a).unwrap().value;
        let dr = |a: f64| renyi_divergence(&fam, &p, &q, a).unwrap().value;
        for (name, f, limit) in [("renyi entropy", &hr as &dyn Fn(f64) -> f64, h), ("renyi divergence", &dr, kl)] {
            for sign in [1.0, -1.0] {
                let e3 = (f(1.0 + sign * 1e-3) - limit).abs();
                let e4 = (f(1.0 + sign * 1e-4) - limit).abs();
                let ratio = e4 / e3;
                c.check((0.05..=0.2).contains(&ratio), || {
                    format!("{fam} {name} sign {sign}: error ratio {ratio} ({e3:e} → {e4:e})")
                });
            }
            let central = 0.5 * (f(1.0 + 1e-4) + f(1.0 - 1e-4));
            let at_limit = f(1.0 + 0.5 * LIMIT_BAND);
            c.close(at_limit, central, 1e-6, &format!("{fam} {name} limit branch vs k=4 extrapolation"));
        }
        let branch = renyi_entropy(&fam, &p, 1.0).unwrap().branch;
        c.check(branch == expfam::Branch::ShannonLimit, || format!("{fam}: branch {branch:?} at α=1"));
    }
}

fn criterion_4(c: &mut Checks) {
    let mut u = Uniforms::new(4);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    for fam in Family::REPRESENTATIVES {
        for _ in 0..5 {
            let p = natural(fam, &random_source(fam, &mut u));
            let q = natural(fam, &random_source(fam, &mut u));
            for alpha in [0.3, 0.7, 2.0] {
                let t = tsallis_entropy(&fam, &p, alpha).unwrap().value;
                let r = renyi_entropy(&fam, &p, alpha).unwrap().value;
                let back = renyi_to_tsallis(tsallis_to_renyi(t, alpha).unwrap(), alpha).unwrap();
                c.check(rel(back, t) <= 1e-12, || format!("{fam} tsallis round trip α={alpha}: {back} vs {t}"));
                let back = tsallis_to_renyi(renyi_to_tsallis(r, alpha).unwrap(), alpha).unwrap();
                c.check(rel(back, r) <= 1e-12, || format!("{fam} renyi round trip α={alpha}: {back} vs {r}"));
                let j = skew_jensen(&fam, &p, &q, alpha.min(0.9)).unwrap();
                let js = skew_jensen(&fam, &q, &p, 1.0 - alpha.min(0.9)).unwrap();
                c.check(rel(j, js) <= 1e-12, || format!("{fam} jensen symmetry: {j} vs {js}"));
            }
            let b = bhattacharyya_coefficient(&fam, &p, &q).unwrap();
            let dr = renyi_divergence(&fam, &p, &q, 0.5).unwrap().value;
            c.check(rel(dr, -2.0 * b.ln()) <= 1e-12, || format!("{fam} D½ = -2 log B: {dr} vs {}", -2.0 * b.ln()));
            let hl = hellinger_distance(&fam, &p, &q).unwrap();
            c.check(rel(hl * hl, 1.0 - b) <= 1e-12, || format!("{fam} H² = 1 - B: {} vs {}", hl * hl, 1.0 - b));
            let lhs = shannon_cross_entropy(&fam, &p, &q).unwrap() - shannon_entropy(&fam, &p).unwrap();
            let kl = kl_divergence(&fam, &p, &q).unwrap();
            c.check((lhs - kl).abs() <= 1e-10, || format!("{fam} cross - entropy = KL: {lhs} vs {kl}"));
        }
    }
}

fn criterion_5(c: &mut Checks) {
    let mut u = Uniforms::new(5);
    let cfg = OracleConfig { mc_samples: 1_000_000, seed: 5, ..OracleConfig::default() };
    for fam in Family::REPRESENTATIVES {
        for _ in 0..3 {
            let theta = natural(fam, &random_source(fam, &mut u));
            let err = oracle_grad_check(&fam, &theta, 1e-5).unwrap();
            c.check(err < 1e-6, || format!("{fam} finite-difference gradient error {err:e}"));
        }
        let theta = natural(fam, &random_source(fam, &mut u));
        let eta = fam.grad_log_normalizer(&theta).unwrap().coordinates();
        for (i, (m, e)) in oracle_moments(&fam, &theta, &cfg).unwrap().iter().zip(&eta).enumerate() {
            c.check((m.mean - e).abs() <= 4.0 * m.std_error, || {
                format!("{fam} coordinate {i}: sample mean {} vs ∇F {e} (se {})", m.mean, m.std_error)
            });
        }
    }
}

fn criterion_6(c: &mut Checks) {
    let cfg = OracleConfig::default();
    for rate in [0.5, 2.0, 3.0] {
        let theta = natural(Family::Exponential, &SourceParam::Exponential { rate });
        for alpha in [0.5, 2.0, 3.0] {
            let i = oracle_i_alpha_self(&Family::Exponential, &theta, alpha, &cfg).unwrap();
            let oracle = i.value.ln() / (1.0 - alpha);
            let generic = -rate.ln() - alpha.ln() / (1.0 - alpha);
            let display = rate.ln() - alpha.ln() / (1.0 - alpha);
            c.close(oracle, generic, 1e-7, &format!("exponential renyi λ={rate} α={alpha}"));
            c.check((oracle - display).abs() > 1e-3, || format!("displayed form not rejected at λ={rate}"));
        }
    }
    for var in [0.5, 1.0, 4.0] {
        let theta = natural(Family::Gaussian, &SourceParam::Gaussian { mu: 0.3, var });
        for alpha in [0.5, 2.0, 3.0] {
            let i = oracle_i_alpha_self(&Family::Gaussian, &theta, alpha, &cfg).unwrap();
            let oracle = (i.value - 1.0) / (1.0 - alpha);
            let i_generic = (2.0 * PI * var).powf((1.0 - alpha) / 2.0) / alpha.sqrt();
            let generic = (i_generic - 1.0) / (1.0 - alpha);
            let display = (2.0 * PI * std::f64::consts::E * var).powf((1.0 - alpha) / 2.0) / (1.0 - alpha);
            c.close(oracle, generic, 1e-7, &format!("gaussian tsallis σ²={var} α={alpha}"));
            let closed = tsallis_entropy(&Family::Gaussian, &theta, alpha).unwrap().value;
            c.close(closed, generic, 1e-12, &format!("gaussian tsallis closed form σ²={var} α={alpha}"));
            c.check((oracle - display).abs() > 1e-3, || format!("displayed gaussian form not rejected at σ²={var}"));
        }
    }
}

fn criterion_7(c: &mut Checks) {
    const N: usize = 100_000;
    const CALIBRATION_RUNS: u64 = 16;
    let kl_req = MeasureRequest { measure: Measure::Kl, alpha: None };
    for fam in Family::REPRESENTATIVES {
        let (p, q) = representative_pair(fam);
        let truth = kl_divergence(&fam, &p, &q).unwrap();
        let plugin = |seed: u64| {
            let sp = SampleSet::new(fam, fam.sample(&p, N, mix_seed(seed, 1)).unwrap()).unwrap();
            let sq = SampleSet::new(fam, fam.sample(&q, N, mix_seed(seed, 2)).unwrap()).unwrap();
            plugin_measure(&kl_req, &sp, Some(&sq)).unwrap().value
        };
        // Spread of the plug-in estimator, calibrated on seeds disjoint from the test seed.
        let runs: Vec<f64> = (0..CALIBRATION_RUNS).map(|s| plugin(1_000 + s)).collect();
        let mean = runs.iter().sum::<f64>() / runs.len() as f64;
        let sd = (runs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs.len() - 1) as f64).sqrt();
        let estimate = plugin(7);
        c.check((estimate - truth).abs() <= 4.0 * sd, || {
            format!("{fam}: plug-in KL {estimate} vs {truth}, band 4σ = {}", 4.0 * sd)
        });
    }
    let ones = SampleSet::new(Family::Bernoulli, vec![Observation::Count(1); 50]).unwrap();
    let r = mle(&ones);
    c.check(matches!(r, Err(Error::DegenerateSample(_))), || format!("all-ones Bernoulli gave {r:?}"));
}

fn expfam_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_expfam")).args(args).output().expect("binary runs")
}

fn criterion_8(c: &mut Checks) {
    let out = expfam_cli(&["verify"]);
    c.check(out.status.success(), || {
        format!("verify exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    });
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let rows = report["results"].as_array().map_or(0, Vec::len);
    c.check(rows > 300, || format!("verify produced only {rows} rows"));

    for bad in [r#"{"mu":0,"var":-1}"#, r#"{"mu":0}"#, "{not json"] {
        let out = expfam_cli(&["entropy", "--family", "gaussian", "--params", bad, "--measure", "shannon"]);
        c.check(out.status.code() == Some(3), || format!("params {bad} exited {:?}", out.status.code()));
    }

    let golden_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let goldens: [(&str, Vec<&str>); 2] = [
        ("verify_poisson.json", vec!["verify", "--family", "poisson"]),
        (
            "verify_mvn_seed7.json",
            vec!["verify", "--family", "mvn", "--params", r#"{"mu":[0,0],"sigma":[[1,0],[0,1]]}"#, "--measure", "renyi",
                 "--measure", "shannon", "--alpha", "2", "--seed", "7", "--mc-samples", "20000"],
        ),
    ];
    for (file, args) in goldens {
        let want = std::fs::read(format!("{golden_dir}/{file}")).unwrap_or_default();
        let got = expfam_cli(&args).stdout;
        c.check(!want.is_empty() && got == want, || format!("golden {file} differs"));
    }
}

type Criterion = (&'static str, fn(&mut Checks));

fn main() {
    let criteria: [Criterion; 8] = [
        ("reference values", criterion_1),
        ("oracle equivalence grid", criterion_2),
        ("α → 1 limit suite", criterion_3),
        ("identity suite", criterion_4),
        ("gradient / moment suite", criterion_5),
        ("formula arbitration", criterion_6),
        ("plug-in estimation", criterion_7),
        ("command-line interface", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut c = Checks::default();
        let start = Instant::now();
        run(&mut c);
        let secs = start.elapsed().as_secs_f64();
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} criterion {}: {name} ({} checks, {secs:.1}s)", i + 1, c.total);
        for f in &c.failures {
            println!("    {f}");
        }
        failed += usize::from(!c.failures.is_empty());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
