//! Entanglement measures where they can be computed exactly, ensemble upper
//! bounds on the convex roofs, and the subspace fully entangled fraction.
//!
//! Pure-state negativity follows `N(ψ) = Σ_{i<j} √(λ_i λ_j)`. Some references
//! carry an extra factor `2/(d-1)`; it is not applied anywhere in this crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, polar_unitary, trace_norm, CMatrix};
use crate::operator::{partial_trace_b, partial_transpose_b, DensityOperator};
use crate::states::{EnsembleDecomposition, PureState, StateFamily};
use crate::subspace::{SeesawOptions, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Exact,
    UpperBound,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub kind: MeasureKind,
    pub method: String,
}

impl MeasureValue {
    fn new(value: f64, kind: MeasureKind, method: impl Into<String>) -> Self {
        Self {
            value: value.max(0.0),
            kind,
            method: method.into(),
        }
    }
}

/// `C(ψ) = 2 √(Σ_{i<j} λ_i λ_j)`.
pub fn concurrence_pure(psi: &PureState) -> f64 {
    let l = psi.schmidt();
    let mut s = 0.0;
    for i in 0..l.len() {
        for j in (i + 1)..l.len() {
            s += l[i] * l[j];
        }
    }
    2.0 * s.max(0.0).sqrt()
}

/// `C(ψ) = √(2 (1 - Tr ρ_A²))`, computed from the reduced state.
pub fn concurrence_pure_reduced(psi: &PureState) -> f64 {
    let rho = psi.density();
    let red = partial_trace_b(rho.op());
    let purity = crate::linalg::trace_of_product(&red, &red).re;
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

/// `N(ρ) = (‖ρ^{T_B}‖₁ - 1) / 2`.
pub fn negativity(rho: &DensityOperator) -> f64 {
    let pt = partial_transpose_b(rho.op());
    let tn = trace_norm(pt.matrix()).expect("density operators are finite");
    ((tn - 1.0) / 2.0).max(0.0)
}

/// `N(ψ) = Σ_{i<j} √(λ_i λ_j)`.
pub fn negativity_pure_schmidt(psi: &PureState) -> f64 {
    let l = psi.schmidt();
    let mut s = 0.0;
    for i in 0..l.len() {
        for j in (i + 1)..l.len() {
            s += (l[i] * l[j]).max(0.0).sqrt();
        }
    }
    s
}

/// `Σ q_μ N(ψ_μ)`, an upper bound on the convex-roof extended negativity.
pub fn cren_upper_from_ensemble(dec: &EnsembleDecomposition) -> MeasureValue {
    let v = dec
        .members()
        .iter()
        .map(|(q, psi)| q * negativity_pure_schmidt(psi))
        .sum();
    let kind = if dec.len() == 1 {
        MeasureKind::Exact
    } else {
        MeasureKind::UpperBound
    };
    MeasureValue::new(v, kind, format!("ensemble average over {} members", dec.len()))
}

/// `Σ q_μ C(ψ_μ)`, an upper bound on the concurrence.
pub fn concurrence_upper_from_ensemble(dec: &EnsembleDecomposition) -> MeasureValue {
    let v = dec.members().iter().map(|(q, psi)| q * concurrence_pure(psi)).sum();
    let kind = if dec.len() == 1 {
        MeasureKind::Exact
    } else {
        MeasureKind::UpperBound
    };
    MeasureValue::new(v, kind, format!("ensemble average over {} members", dec.len()))
}

/// Known CREN values for the isotropic and Werner families and for the
/// antisymmetric/`Φ+` mixture at `d = 2`.
pub fn cren_exact_family(family: &StateFamily) -> Result<MeasureValue> {
    let v = match *family {
        StateFamily::Isotropic { d, f } => (f * d as f64 - 1.0) / 2.0,
        StateFamily::Werner { w, .. } => (2.0 * w - 1.0) / 2.0,
        StateFamily::AntisymPhiPlusMixture { d: 2, f } => (f - 0.5).abs(),
        StateFamily::AntisymPhiPlusMixture { d, .. } => {
            return Err(Error::Unsupported(format!(
                "exact CREN of the antisymmetric/phi+ mixture is only known at d = 2, got d = {d}"
            )))
        }
    };
    Ok(MeasureValue::new(v, MeasureKind::Exact, "closed form for the family"))
}

/// Known concurrence values for the isotropic and Werner families.
pub fn concurrence_exact_family(family: &StateFamily) -> Result<MeasureValue> {
    let v = match *family {
        StateFamily::Isotropic { d, f } => {
            let d = d as f64;
            (2.0 * d / (d - 1.0)).sqrt() * (f - 1.0 / d)
        }
        StateFamily::Werner { d, w } => {
            let d = d as f64;
            (2.0 / (d * (d - 1.0))).sqrt() * (2.0 * w - 1.0)
        }
        StateFamily::AntisymPhiPlusMixture { .. } => {
            return Err(Error::Unsupported(
                "no closed-form concurrence for the antisymmetric/phi+ mixture".into(),
            ))
        }
    };
    Ok(MeasureValue::new(v, MeasureKind::Exact, "closed form for the family"))
}

/// Result of the local-unitary search for `F_V`.
#[derive(Debug, Clone)]
pub struct FullyEntangledFraction {
    /// Best `Tr{(U_A⊗U_B) ρ (U_A⊗U_B)† Π_V}` found. A local optimum, so a lower
    /// estimate of the true maximum.
    pub value: f64,
    pub u_a: CMatrix,
    pub u_b: CMatrix,
    /// Objective after every sweep of the winning restart.
    pub history: Vec<f64>,
}

fn fef_objective(rho: &CMatrix, proj: &CMatrix, u_a: &CMatrix, u_b: &CMatrix) -> f64 {
    let x = u_a.kronecker(u_b);
    crate::linalg::trace_of_product(&(&x * rho * x.adjoint()), proj).re
}

fn partial_trace_b_of(k: &CMatrix, m: usize, n: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |i, l| (0..n).map(|j| k[(i * n + j, l * n + j)]).sum())
}

fn partial_trace_a_of(k: &CMatrix, m: usize, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |j, l| (0..m).map(|i| k[(i * n + j, i * n + l)]).sum())
}

/// `F_V(ρ) = max_{U_A,U_B} Tr{(U_A⊗U_B) ρ (U_A⊗U_B)† Π_V}` by alternating
/// updates of the two local unitaries.
///
/// The objective is a convex quadratic in `X = U_A⊗U_B`, so it dominates its
/// linearization `f(X₀) + 2 Re Tr{(X - X₀)† Π_V X₀ ρ}`. Each half-step
/// maximizes that linearization over one factor, which is the polar factor of
/// the partial trace of `Π_V X₀ ρ` against the other factor. The objective is
/// therefore nondecreasing. Restart 0 starts from the identity, the others
/// from Haar-random pairs.
pub fn fully_entangled_fraction_v(
    rho: &DensityOperator,
    v: &Subspace,
    opts: &SeesawOptions,
) -> Result<FullyEntangledFraction> {
    v.check_compatible(rho)?;
    let (m, n) = (rho.dim_a(), rho.dim_b());
    let r = rho.matrix();
    let proj = v.projector_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<FullyEntangledFraction> = None;

    for restart in 0..opts.restarts.max(1) {
        let (mut u_a, mut u_b) = if restart == 0 {
            (CMatrix::identity(m, m), CMatrix::identity(n, n))
        } else {
            (haar_unitary(m, &mut rng), haar_unitary(n, &mut rng))
        };
        let mut value = fef_objective(r, proj, &u_a, &u_b);
        let mut history = vec![value];
        for _ in 0..opts.max_sweeps {
            let x = u_a.kronecker(&u_b);
            let g = proj * &x * r;
            let k = &g * CMatrix::identity(m, m).kronecker(&u_b).adjoint();
            u_a = polar_unitary(&partial_trace_b_of(&k, m, n));

            let x = u_a.kronecker(&u_b);
            let g = proj * &x * r;
            let k = u_a.kronecker(&CMatrix::identity(n, n)).adjoint() * &g;
            u_b = polar_unitary(&partial_trace_a_of(&k, m, n));

            let next = fef_objective(r, proj, &u_a, &u_b);
            let gain = next - value;
            value = value.max(next);
            history.push(value);
            if gain < opts.tol {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(FullyEntangledFraction {
                value,
                u_a,
                u_b,
                history,
            });
        }
    }
    Ok(best.expect("at least one restart runs"))
}
