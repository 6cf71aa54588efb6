//! How much perturbation or noise a detected state tolerates before the
//! projector test stops certifying its entanglement.

use serde::Serialize;

use crate::bounds::{separability_test, DETECTION_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ensure_hermitian, hermitian_eigenvalues, ky_fan_norm_hermitian, CMatrix, TOL_PSD};
use crate::operator::DensityOperator;
use crate::subspace::{LambdaSup, Subspace};

const TRACE_ZERO_TOL: f64 = 1e-10;

/// Detection margin of `(ρ, V)`: perturbations with `‖Δ‖_(k) < threshold`
/// cannot undo the detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationGate {
    /// `dim V`.
    pub k: usize,
    /// `δ = Tr{ρ Π_V} - λ_sup > 0`.
    pub delta: f64,
    pub threshold: f64,
    /// `‖ρ‖_(k) - λ_sup`, which `δ` never exceeds.
    pub delta_cap: f64,
}

fn detected_delta(rho: &DensityOperator, v: &Subspace, lambda_sup: &LambdaSup) -> Result<(f64, f64)> {
    if !lambda_sup.is_certified() {
        return Err(Error::CertificationRequired);
    }
    let lam = lambda_sup.for_bounds();
    let delta = v.expectation(rho)? - lam;
    if delta <= DETECTION_TOL {
        return Err(Error::NotDetected { delta });
    }
    Ok((delta, lam))
}

pub fn perturbation_gate(rho: &DensityOperator, v: &Subspace, lambda_sup: &LambdaSup) -> Result<PerturbationGate> {
    let (delta, lam) = detected_delta(rho, v, lambda_sup)?;
    let k = v.dim();
    let delta_cap = rho.ky_fan(k)? - lam;
    debug_assert!(delta <= delta_cap + 1e-9);
    Ok(PerturbationGate {
        k,
        delta,
        threshold: delta,
        delta_cap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationVerdict {
    EntangledGuaranteed,
    Inconclusive,
}

/// Checks that `Δ` is an admissible perturbation (Hermitian, traceless,
/// `ρ + Δ >= 0`) and compares its Ky Fan `k`-norm, taken over eigenvalue
/// magnitudes, with the gate threshold.
pub fn check_perturbation(
    gate: &PerturbationGate,
    rho: &DensityOperator,
    delta: &CMatrix,
) -> Result<PerturbationVerdict> {
    if delta.shape() != rho.matrix().shape() {
        return Err(Error::Dimension(format!(
            "perturbation is {:?}, state is {:?}",
            delta.shape(),
            rho.matrix().shape()
        )));
    }
    ensure_hermitian(delta).map_err(|e| Error::InvalidPerturbation(e.to_string()))?;
    let tr = delta.trace();
    if tr.norm() > TRACE_ZERO_TOL {
        return Err(Error::InvalidPerturbation(format!("trace is {tr}, expected 0")));
    }
    let min = hermitian_eigenvalues(&(rho.matrix() + delta))?
        .last()
        .copied()
        .unwrap_or(0.0);
    if min < -TOL_PSD {
        return Err(Error::InvalidPerturbation(format!(
            "rho + delta has negative eigenvalue {min:.3e}"
        )));
    }
    let norm = ky_fan_norm_hermitian(delta, gate.k)?;
    Ok(if norm < gate.threshold {
        PerturbationVerdict::EntangledGuaranteed
    } else {
        PerturbationVerdict::Inconclusive
    })
}

/// `1 - ‖ρ_M‖_(mn-k) <= Tr{Π_V ρ_M} <= ‖ρ_M‖_(k)`.
pub fn noise_overlap_bounds(rho_m: &DensityOperator, v: &Subspace) -> Result<(f64, f64)> {
    v.check_compatible(rho_m)?;
    let k = v.dim();
    let lo = 1.0 - rho_m.ky_fan(rho_m.side() - k)?;
    let hi = rho_m.ky_fan(k)?;
    Ok((lo, hi))
}

/// Mixing probability below which `(1-p)ρ + p ρ_M` stays detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingThreshold {
    pub p_max: f64,
    pub lambda_sup: f64,
    pub delta: f64,
    /// `‖ρ_M‖_(mn-k)`.
    pub noise_kyfan: f64,
    pub k: usize,
    /// `V` is the support of `ρ` (so `δ = 1 - λ_sup`).
    pub support_case: bool,
}

/// `p_max = δ / (λ_sup + δ + ‖ρ_M‖_(mn-k) - 1)`, clamped to `[0, 1]`.
///
/// A nonpositive denominator would mean the margin stays positive for every
/// `p`; it is reported as `p_max = 1`. (With `δ > 0` it cannot occur, since
/// `λ_sup >= k/(mn)` and `‖ρ_M‖_(mn-k) >= (mn-k)/(mn)`.)
pub fn mixing_threshold(
    rho: &DensityOperator,
    v: &Subspace,
    lambda_sup: &LambdaSup,
    rho_m: &DensityOperator,
) -> Result<MixingThreshold> {
    v.check_compatible(rho_m)?;
    let (delta, lam) = detected_delta(rho, v, lambda_sup)?;
    let k = v.dim();
    let noise_kyfan = rho_m.ky_fan(rho_m.side() - k)?;
    let denom = lam + delta + noise_kyfan - 1.0;
    let p_max = if denom <= 0.0 {
        1.0
    } else {
        (delta / denom).clamp(0.0, 1.0)
    };
    let support_case = (lam + delta - 1.0).abs() <= 1e-10 && lam < 1.0;
    Ok(MixingThreshold {
        p_max,
        lambda_sup: lam,
        delta,
        noise_kyfan,
        k,
        support_case,
    })
}

impl MixingThreshold {
    /// Re-runs the separability test on `(1-p)ρ + p ρ_M` at `samples` evenly
    /// spaced `p` in `(0, p_max)` and returns the ones that were not detected.
    pub fn verify(
        &self,
        rho: &DensityOperator,
        v: &Subspace,
        lambda_sup: &LambdaSup,
        rho_m: &DensityOperator,
        samples: usize,
    ) -> Result<Vec<f64>> {
        let mut misses = Vec::new();
        for i in 1..=samples {
            let p = self.p_max * i as f64 / (samples + 1) as f64;
            let mixed = DensityOperator::mix(&[(1.0 - p, rho), (p, rho_m)])?;
            if !separability_test(&mixed, v, lambda_sup)?.is_entangled() {
                misses.push(p);
            }
        }
        Ok(misses)
    }
}
