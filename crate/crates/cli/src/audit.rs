//! Randomized property suites: trace inequality, bound soundness on pure
//! states, and noise-overlap containment.

use clap::Args;
use entbound::bounds::{concurrence_lower, concurrence_lower_sharp, cren_lower};
use entbound::io::StateFile;
use entbound::linalg::{ginibre, singular_values, trace_of_product};
use entbound::measures::{concurrence_pure, negativity_pure_schmidt};
use entbound::robustness::noise_overlap_bounds;
use entbound::states::{random_density, random_pure};
use entbound::subspace::{lambda_sup_closed_form, Subspace};
use entbound::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{sig12, to_json};
use crate::{Format, Global};

const VN_SLACK: f64 = 1e-10;
const SOUND_SLACK: f64 = 1e-9;
const OVERLAP_SLACK: f64 = 1e-10;
const MAX_DUMPS: usize = 5;

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// Comma-separated shapes such as 2x2,2x3.
    #[arg(long, value_delimiter = ',', default_value = "2x2,2x3,3x3")]
    pub shapes: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    VonNeumann,
    PureSoundness,
    NoiseOverlap,
}

const SUITES: [Suite; 3] = [Suite::VonNeumann, Suite::PureSoundness, Suite::NoiseOverlap];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub shape: String,
    pub samples: usize,
    pub violations: usize,
}

/// Everything needed to replay one failing sample.
#[derive(Debug, Clone, Serialize)]
pub struct FailingCase {
    pub suite: Suite,
    pub shape: String,
    pub seed: u64,
    pub stream: u64,
    pub sample: usize,
    pub detail: String,
    pub state: Option<StateFile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
    pub failures: Vec<FailingCase>,
}

pub fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad shape '{s}', expected MxN"));
    let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let m: usize = a.parse().map_err(|_| bad())?;
    let n: usize = b.parse().map_err(|_| bad())?;
    if m < 2 || n < m {
        return Err(Error::Dimension(format!("shape {m}x{n} needs 2 <= m <= n")));
    }
    Ok((m, n))
}

/// Per-sample generator: one ChaCha stream per (suite, shape), word position
/// reset per sample so a single case can be replayed alone.
fn sample_rng(seed: u64, stream: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(sample as u64));
    rng.set_stream(stream);
    rng
}

type Outcome = Result<Option<(String, Option<StateFile>)>>;

fn von_neumann(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let d = m * n;
    let a = ginibre(d, d, rng);
    let b = ginibre(d, d, rng);
    let lhs = trace_of_product(&a.adjoint(), &b).norm();
    let rhs: f64 = singular_values(&a)?
        .iter()
        .zip(singular_values(&b)?)
        .map(|(x, y)| x * y)
        .sum();
    Ok((lhs > rhs + VN_SLACK).then(|| (format!("|tr(A^+ B)| = {} > {}", sig12(lhs), sig12(rhs)), None)))
}

fn pure_soundness(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let psi = random_pure(m, n, rng)?;
    let phi = random_pure(m, n, rng)?;
    let rho = psi.density();
    let conc = concurrence_pure(&psi);
    let neg = negativity_pure_schmidt(&psi);
    let v = Subspace::span(&phi);
    let lam = lambda_sup_closed_form(&v).ok_or_else(|| Error::Unsupported("no closed form for a ray".into()))?;
    let sharp = concurrence_lower_sharp(&rho, &phi)?.sharp;
    let generic = concurrence_lower(&rho, &v, &lam)?;
    let cren = cren_lower(&rho, &v, &lam)?;
    let mut bad = Vec::new();
    if sharp > conc + SOUND_SLACK {
        bad.push(format!("sharp {} > C {}", sig12(sharp), sig12(conc)));
    }
    if generic > conc + SOUND_SLACK {
        bad.push(format!("generic {} > C {}", sig12(generic), sig12(conc)));
    }
    if cren > neg + SOUND_SLACK {
        bad.push(format!("cren {} > N {}", sig12(cren), sig12(neg)));
    }
    Ok((!bad.is_empty()).then(|| (bad.join("; "), Some(StateFile::from_pure(&psi)))))
}

fn noise_overlap(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let d = m * n;
    let rank = rng.gen_range(1..=d);
    let k = rng.gen_range(1..=d);
    let rho_m = random_density(m, n, rank, rng)?;
    let v = Subspace::random(m, n, k, rng)?;
    let t = v.expectation(&rho_m)?;
    let (lo, hi) = noise_overlap_bounds(&rho_m, &v)?;
    Ok((t < lo - OVERLAP_SLACK || t > hi + OVERLAP_SLACK).then(|| {
        (
            format!("Tr = {} outside [{}, {}] (k = {k})", sig12(t), sig12(lo), sig12(hi)),
            Some(StateFile::from_density(&rho_m)),
        )
    }))
}

pub fn run(args: &AuditArgs, seed: u64) -> Result<AuditReport> {
    let shapes = args.shapes.iter().map(|s| parse_shape(s)).collect::<Result<Vec<_>>>()?;
    let mut suites = Vec::new();
    let mut failures = Vec::new();
    for (si, suite) in SUITES.iter().enumerate() {
        for (hi, &(m, n)) in shapes.iter().enumerate() {
            let stream = ((si as u64) << 32) | hi as u64;
            let shape = format!("{m}x{n}");
            let mut violations = 0;
            for i in 0..args.samples {
                let mut rng = sample_rng(seed, stream, i);
                let outcome = match suite {
                    Suite::VonNeumann => von_neumann(m, n, &mut rng)?,
                    Suite::PureSoundness => pure_soundness(m, n, &mut rng)?,
                    Suite::NoiseOverlap => noise_overlap(m, n, &mut rng)?,
                };
                if let Some((detail, state)) = outcome {
                    violations += 1;
                    if failures.len() < MAX_DUMPS * SUITES.len() * shapes.len() {
                        failures.push(FailingCase {
                            suite: *suite,
                            shape: shape.clone(),
                            seed,
                            stream,
                            sample: i,
                            detail,
                            state,
                        });
                    }
                }
            }
            suites.push(SuiteResult {
                suite: *suite,
                shape,
                samples: args.samples,
                violations,
            });
        }
    }
    let passed = suites.iter().all(|s| s.violations == 0);
    Ok(AuditReport {
        seed,
        passed,
        suites,
        failures,
    })
}

pub fn render(report: &AuditReport, global: &Global) -> Result<String> {
    match global.format.unwrap_or(Format::Json) {
        Format::Json => to_json(report),
        Format::Csv => {
            let mut out = String::from("suite,shape,samples,violations\n");
            for s in &report.suites {
                let name = serde_json::to_value(s.suite)?;
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    name.as_str().unwrap_or_default(),
                    s.shape,
                    s.samples,
                    s.violations
                ));
            }
            Ok(out)
        }
    }
}
