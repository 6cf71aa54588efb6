//! The `bound`, `sweep` and `robustness` subcommands.

use clap::Args;
use entbound::bounds::{bound_report, BoundReport};
use entbound::measures::cren_upper_from_ensemble;
use entbound::operator::DensityOperator;
use entbound::robustness::{mixing_threshold, perturbation_gate, MixingThreshold, PerturbationGate};
use entbound::states::mixture_antisym_phi_plus_ensemble;
use entbound::subspace::{resolve_lambda_sup, LambdaSup, SeesawOptions, Subspace};
use entbound::{Error, Result};
use serde::Serialize;

use crate::inputs::{default_projectors, family_state, FamilyName, NoiseSpec, ProjectorSpec, StateArgs};
use crate::output::{opt_sig12, sig12, to_json};
use crate::{Format, Global};

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// phi-plus, antisym, support or file:<path>.
    #[arg(long)]
    pub projector: Option<ProjectorSpec>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.0)]
    pub start: f64,
    #[arg(long, default_value_t = 1.0)]
    pub stop: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Comma-separated projectors; each row keeps the best bound over them.
    #[arg(long, value_delimiter = ',')]
    pub projector: Vec<ProjectorSpec>,
}

#[derive(Debug, Clone, Args)]
pub struct RobustnessArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub projector: Option<ProjectorSpec>,
    /// maximally-mixed or file:<path>.
    #[arg(long, default_value = "maximally-mixed")]
    pub noise: NoiseSpec,
    /// Mixing probabilities below p_max to re-check.
    #[arg(long, default_value_t = 20)]
    pub verify_samples: usize,
}

fn seesaw(global: &Global) -> SeesawOptions {
    SeesawOptions::lambda_sup().with_seed(global.seed)
}

fn pick_projector(given: &Option<ProjectorSpec>, family: Option<FamilyName>) -> Result<ProjectorSpec> {
    match given {
        Some(p) => Ok(p.clone()),
        None => Ok(default_projectors(family)?.remove(0)),
    }
}

fn lambda_for(v: &Subspace, global: &Global) -> Result<LambdaSup> {
    resolve_lambda_sup(v, global.policy, &seesaw(global))
}

#[derive(Serialize)]
struct BoundOutput {
    projector: String,
    #[serde(flatten)]
    report: BoundReport,
}

pub fn bound(args: &BoundArgs, global: &Global) -> Result<String> {
    let src = args.state.resolve()?;
    let proj = pick_projector(&args.projector, src.family)?;
    let v = proj.subspace(&src.rho)?;
    let lam = lambda_for(&v, global)?;
    let report = bound_report(&src.rho, &v, &lam, true)?;
    match global.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&BoundOutput { projector: proj.name(), report }),
        Format::Csv => Ok(format!(
            "projector,expectation,lambda_sup,delta,cren_lower,conc_lower,baseline,certified\n{},{},{},{},{},{},{},{}\n",
            proj.name(),
            sig12(report.expectation),
            sig12(lam.for_bounds()),
            sig12(report.delta),
            sig12(report.cren_lower),
            sig12(report.concurrence_lower),
            opt_sig12(report.baseline_ppt_realign),
            report.certified
        )),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub expectation: f64,
    pub delta: f64,
    pub cren_lower: f64,
    pub conc_lower: f64,
    pub cren_upper: f64,
    pub baseline: f64,
}

pub const SWEEP_HEADER: &str = "param,expectation,delta,cren_lower,conc_lower,cren_upper,baseline";

fn grid(args: &SweepArgs) -> Result<Vec<f64>> {
    if args.steps < 2 {
        return Err(Error::Domain(format!(
            "a sweep needs at least 2 steps, got {}",
            args.steps
        )));
    }
    if !(args.start.is_finite() && args.stop.is_finite()) {
        return Err(Error::Domain("grid bounds must be finite".into()));
    }
    let n = args.steps - 1;
    Ok((0..=n)
        .map(|i| {
            if i == n {
                args.stop
            } else {
                args.start + (args.stop - args.start) * i as f64 / n as f64
            }
        })
        .collect())
}

fn sweep_rows(args: &SweepArgs, global: &Global) -> Result<Vec<SweepRow>> {
    let (f_param, w_param) = match args.family {
        FamilyName::Isotropic | FamilyName::Mixture => (true, false),
        FamilyName::Werner => (false, true),
        other => {
            return Err(Error::Parse(format!("family {other:?} has no sweep parameter")));
        }
    };
    let projectors = if args.projector.is_empty() {
        default_projectors(Some(args.family))?
    } else {
        args.projector.clone()
    };
    let points = grid(args)?;

    // fixed subspaces and their λ_sup are resolved once
    let probe = family_state(
        args.family,
        args.d,
        f_param.then_some(points[0]),
        w_param.then_some(points[0]),
    )?;
    let mut fixed: Vec<Option<(Subspace, LambdaSup)>> = Vec::new();
    for p in &projectors {
        fixed.push(if p.state_dependent() {
            None
        } else {
            let v = p.subspace(&probe.rho)?;
            let lam = lambda_for(&v, global)?;
            Some((v, lam))
        });
    }

    let mut rows = Vec::with_capacity(points.len());
    for &x in &points {
        let src = family_state(args.family, args.d, f_param.then_some(x), w_param.then_some(x))?;
        let mut best: Option<BoundReport> = None;
        let mut conc_lower = 0.0f64;
        for (p, pre) in projectors.iter().zip(&fixed) {
            let report = match pre {
                Some((v, lam)) => bound_report(&src.rho, v, lam, false)?,
                None => {
                    let v = p.subspace(&src.rho)?;
                    bound_report(&src.rho, &v, &lambda_for(&v, global)?, false)?
                }
            };
            conc_lower = conc_lower.max(report.concurrence_lower);
            if best.as_ref().is_none_or(|b| report.cren_lower > b.cren_lower) {
                best = Some(report);
            }
        }
        let best = best.expect("at least one projector");
        let ensemble = match args.family {
            FamilyName::Mixture => mixture_antisym_phi_plus_ensemble(args.d, x)?,
            _ => src.ensemble_or_eigen()?,
        };
        rows.push(SweepRow {
            param: x,
            expectation: best.expectation,
            delta: best.delta,
            cren_lower: best.cren_lower,
            conc_lower,
            cren_upper: cren_upper_from_ensemble(&ensemble).value,
            baseline: entbound::bounds::baseline_ppt_realignment(&src.rho),
        });
    }
    Ok(rows)
}

pub fn sweep(args: &SweepArgs, global: &Global) -> Result<String> {
    let rows = sweep_rows(args, global)?;
    match global.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from(SWEEP_HEADER);
            out.push('\n');
            for r in &rows {
                let cells = [
                    r.param,
                    r.expectation,
                    r.delta,
                    r.cren_lower,
                    r.conc_lower,
                    r.cren_upper,
                    r.baseline,
                ];
                out.push_str(&cells.iter().map(|&x| sig12(x)).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct Verification {
    samples: usize,
    missed: Vec<f64>,
}

#[derive(Serialize)]
struct RobustnessOutput {
    projector: String,
    lambda_sup: LambdaSup,
    gate: PerturbationGate,
    mixing: MixingThreshold,
    verification: Verification,
}

pub fn robustness(args: &RobustnessArgs, global: &Global) -> Result<String> {
    let src = args.state.resolve()?;
    let proj = pick_projector(&args.projector, src.family)?;
    let v = proj.subspace(&src.rho)?;
    let rho_m: DensityOperator = args.noise.density(src.rho.dim_a(), src.rho.dim_b())?;
    let lam = lambda_for(&v, global)?;
    let gate = perturbation_gate(&src.rho, &v, &lam)?;
    let mixing = mixing_threshold(&src.rho, &v, &lam, &rho_m)?;
    let missed = mixing.verify(&src.rho, &v, &lam, &rho_m, args.verify_samples)?;
    let out = RobustnessOutput {
        projector: proj.name(),
        lambda_sup: lam,
        gate,
        mixing,
        verification: Verification {
            samples: args.verify_samples,
            missed,
        },
    };
    match global.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => Ok(format!(
            "projector,p_max,delta,lambda_sup,noise_kyfan,k,threshold,support_case,missed\n{},{},{},{},{},{},{},{},{}\n",
            out.projector,
            sig12(mixing.p_max),
            sig12(mixing.delta),
            sig12(mixing.lambda_sup),
            sig12(mixing.noise_kyfan),
            mixing.k,
            sig12(gate.threshold),
            mixing.support_case,
            out.verification.missed.len()
        )),
    }
}
