//! Lower bounds on CREN and concurrence from `Tr{ρ Π_V}` and `λ_sup`, the
//! separability test they imply, and the PPT/realignment baseline.
//!
//! With `E = Tr{ρ Π_V}`:
//!
//! * `N_CREN(ρ) >= max((E - λ_sup) / (2 λ_sup), 0)`
//! * `C(ρ) >= max(√(2/(m(m-1))) (E - λ_sup) / λ_sup, 0)`
//!
//! and a separable `ρ` always satisfies `E <= λ_sup`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::trace_norm;
use crate::measures::{concurrence_pure, fully_entangled_fraction_v};
use crate::operator::{partial_transpose_a, realign, DensityOperator};
use crate::states::{EnsembleDecomposition, PureState};
use crate::subspace::{LambdaSup, SeesawOptions, Subspace};

/// Margins at or below this are treated as "not detected".
pub const DETECTION_TOL: f64 = 1e-12;

/// Positive part of a margin, with margins up to `DETECTION_TOL` read as 0.
fn detected(margin: f64) -> f64 {
    if margin > DETECTION_TOL {
        margin
    } else {
        0.0
    }
}

/// `max((E - λ) / (2λ), 0)`.
pub fn cren_bound_from(expectation: f64, lambda_sup: f64) -> f64 {
    detected(expectation - lambda_sup) / (2.0 * lambda_sup)
}

/// `max(√(2/(m(m-1))) (E - λ) / λ, 0)` with `m` the smaller local dimension.
pub fn concurrence_bound_from(expectation: f64, lambda_sup: f64, dim_a: usize) -> f64 {
    let m = dim_a as f64;
    (2.0 / (m * (m - 1.0))).sqrt() * detected(expectation - lambda_sup) / lambda_sup
}

pub fn cren_lower(rho: &DensityOperator, v: &Subspace, lambda_sup: &LambdaSup) -> Result<f64> {
    Ok(cren_bound_from(v.expectation(rho)?, lambda_sup.for_bounds()))
}

pub fn concurrence_lower(rho: &DensityOperator, v: &Subspace, lambda_sup: &LambdaSup) -> Result<f64> {
    Ok(concurrence_bound_from(
        v.expectation(rho)?,
        lambda_sup.for_bounds(),
        rho.dim_a(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRoute {
    Sharp,
    Generic,
    Tie,
}

/// The one-dimensional concurrence bound next to the generic one for the same
/// projector `|Φ⟩⟨Φ|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpComparison {
    /// `max(2 (⟨Φ|ρ|Φ⟩ - λ_1(Φ)) / C(Φ), 0)`.
    pub sharp: f64,
    /// The generic concurrence bound with `λ_sup = λ_1(Φ)`.
    pub generic: f64,
    pub fidelity: f64,
    pub lambda_max: f64,
    pub concurrence_phi: f64,
    pub winner: BoundRoute,
}

pub fn concurrence_lower_sharp(rho: &DensityOperator, phi: &PureState) -> Result<SharpComparison> {
    if phi.dim_a() != rho.dim_a() || phi.dim_b() != rho.dim_b() {
        return Err(Error::Dimension(
            "reference state and density operator shapes differ".into(),
        ));
    }
    let c_phi = concurrence_pure(phi);
    if c_phi <= 1e-12 {
        return Err(Error::Domain(
            "the reference state is a product state (zero concurrence)".into(),
        ));
    }
    let fidelity = phi.fidelity_with(rho);
    let lambda_max = phi.lambda_max();
    let sharp = 2.0 * detected(fidelity - lambda_max) / c_phi;
    let generic = concurrence_bound_from(fidelity, lambda_max, rho.dim_a());
    let winner = if (sharp - generic).abs() <= 1e-12 {
        BoundRoute::Tie
    } else if sharp > generic {
        BoundRoute::Sharp
    } else {
        BoundRoute::Generic
    };
    Ok(SharpComparison {
        sharp,
        generic,
        fidelity,
        lambda_max,
        concurrence_phi: c_phi,
        winner,
    })
}

/// A bound evaluated at the best local-unitary frame found by the seesaw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizedBound {
    pub value: f64,
    /// `F_V` estimate used in place of `Tr{ρ Π_V}`.
    pub optimized_expectation: f64,
    pub unoptimized: f64,
    /// The local-unitary maximum is a seesaw local optimum, never certified.
    pub heuristic_optimum: bool,
    pub lambda_sup_certified: bool,
}

fn optimized(
    rho: &DensityOperator,
    v: &Subspace,
    lambda_sup: &LambdaSup,
    opts: &SeesawOptions,
    bound: impl Fn(f64, f64) -> f64,
) -> Result<OptimizedBound> {
    let base = v.expectation(rho)?;
    let fef = fully_entangled_fraction_v(rho, v, opts)?;
    let lam = lambda_sup.for_bounds();
    Ok(OptimizedBound {
        value: bound(fef.value.max(base), lam),
        optimized_expectation: fef.value,
        unoptimized: bound(base, lam),
        heuristic_optimum: true,
        lambda_sup_certified: lambda_sup.is_certified(),
    })
}

pub fn cren_lower_optimized(
    rho: &DensityOperator,
    v: &Subspace,
    lambda_sup: &LambdaSup,
    opts: &SeesawOptions,
) -> Result<OptimizedBound> {
    optimized(rho, v, lambda_sup, opts, cren_bound_from)
}

pub fn concurrence_lower_optimized(
    rho: &DensityOperator,
    v: &Subspace,
    lambda_sup: &LambdaSup,
    opts: &SeesawOptions,
) -> Result<OptimizedBound> {
    let m = rho.dim_a();
    optimized(rho, v, lambda_sup, opts, |e, l| concurrence_bound_from(e, l, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SeparabilityVerdict {
    /// `Tr{ρ Π_V} <= λ_sup`; `margin = λ_sup - Tr{ρ Π_V}`.
    ConsistentWithSeparable { margin: f64 },
    /// `Tr{ρ Π_V} = λ_sup + δ` with `δ > 0`; `delta_cap = ‖ρ‖_(k) - λ_sup`.
    Entangled { delta: f64, delta_cap: f64 },
}

impl SeparabilityVerdict {
    pub fn is_entangled(&self) -> bool {
        matches!(self, SeparabilityVerdict::Entangled { .. })
    }
}

/// Detection by `Tr{ρ Π_V} > λ_sup`. Refuses heuristic `λ_sup`, which may
/// undershoot and produce false detections.
pub fn separability_test(rho: &DensityOperator, v: &Subspace, lambda_sup: &LambdaSup) -> Result<SeparabilityVerdict> {
    if !lambda_sup.is_certified() {
        return Err(Error::CertificationRequired);
    }
    let lam = lambda_sup.for_bounds();
    let delta = v.expectation(rho)? - lam;
    if delta > DETECTION_TOL {
        let delta_cap = rho.ky_fan(v.dim())? - lam;
        debug_assert!(
            delta <= delta_cap + 1e-9,
            "delta {delta} exceeds its Ky Fan cap {delta_cap}"
        );
        Ok(SeparabilityVerdict::Entangled { delta, delta_cap })
    } else {
        Ok(SeparabilityVerdict::ConsistentWithSeparable { margin: -delta })
    }
}

/// Ensemble member whose weight exceeds its largest squared Schmidt coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleViolation {
    pub index: usize,
    pub weight: f64,
    pub lambda_max: f64,
}

/// Members with `λ_1(Φ_μ) < q_μ`. Any such member proves the reconstructed
/// state is entangled, since separable states satisfy `λ_1(Φ_μ) >= q_μ` for
/// every decomposition.
pub fn ensemble_separability_check(dec: &EnsembleDecomposition) -> Vec<EnsembleViolation> {
    dec.members()
        .iter()
        .enumerate()
        .filter(|(_, (q, psi))| psi.lambda_max() < q - DETECTION_TOL)
        .map(|(index, (q, psi))| EnsembleViolation {
            index,
            weight: *q,
            lambda_max: psi.lambda_max(),
        })
        .collect()
}

/// `max(√(2/(m(m-1))) (max(‖ρ^{T_A}‖₁, ‖R(ρ)‖₁) - 1), 0)`.
pub fn baseline_ppt_realignment(rho: &DensityOperator) -> f64 {
    let pt = trace_norm(partial_transpose_a(rho.op()).matrix()).expect("finite");
    let re = trace_norm(&realign(rho.op())).expect("finite");
    let m = rho.dim_a() as f64;
    (2.0 / (m * (m - 1.0))).sqrt() * detected(pt.max(re) - 1.0)
}

/// Everything the bounds say about one `(ρ, V)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub dim_a: usize,
    pub dim_b: usize,
    pub subspace_dim: usize,
    /// `Tr{ρ Π_V}`.
    pub expectation: f64,
    pub lambda_sup: LambdaSup,
    /// `expectation - λ_sup` (unclamped; positive means detected).
    pub delta: f64,
    pub cren_lower: f64,
    pub concurrence_lower: f64,
    /// False when `λ_sup` is a seesaw estimate.
    pub certified: bool,
    pub baseline_ppt_realign: Option<f64>,
    pub notes: Vec<String>,
}

pub fn bound_report(
    rho: &DensityOperator,
    v: &Subspace,
    lambda_sup: &LambdaSup,
    with_baseline: bool,
) -> Result<BoundReport> {
    let expectation = v.expectation(rho)?;
    let lam = lambda_sup.for_bounds();
    let mut notes = Vec::new();
    if !lambda_sup.is_certified() {
        notes.push("lambda_sup is a seesaw lower estimate; bound values may overshoot".to_string());
    }
    if let Some([lo, hi]) = lambda_sup.interval {
        notes.push(format!(
            "lambda_sup certified in [{lo:.12}, {hi:.12}]; bounds use the upper end"
        ));
    }
    Ok(BoundReport {
        dim_a: rho.dim_a(),
        dim_b: rho.dim_b(),
        subspace_dim: v.dim(),
        expectation,
        lambda_sup: lambda_sup.clone(),
        delta: expectation - lam,
        cren_lower: cren_bound_from(expectation, lam),
        concurrence_lower: concurrence_bound_from(expectation, lam, rho.dim_a()),
        certified: lambda_sup.is_certified(),
        baseline_ppt_realign: with_baseline.then(|| baseline_ppt_realignment(rho)),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;
    use crate::measures::negativity_pure_schmidt;
    use crate::states::{isotropic, max_entangled, mixture_antisym_phi_plus, random_pure, werner};
    use crate::subspace::{lambda_sup_closed_form, lambda_sup_seesaw};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phi_plus(d: usize) -> (Subspace, LambdaSup) {
        let v = Subspace::span(&max_entangled(d).unwrap());
        let l = lambda_sup_closed_form(&v).unwrap();
        (v, l)
    }

    fn antisym(d: usize) -> (Subspace, LambdaSup) {
        let v = Subspace::antisymmetric(d).unwrap();
        let l = lambda_sup_closed_form(&v).unwrap();
        (v, l)
    }

    #[test]
    fn isotropic_and_werner_plug_ins() {
        let (v, l) = phi_plus(3);
        let rho = isotropic(3, 0.8).unwrap();
        assert_abs_diff_eq!(cren_lower(&rho, &v, &l).unwrap(), 0.7, epsilon = 1e-12);
        let want = (6.0f64 / 2.0).sqrt() * (0.8 - 1.0 / 3.0);
        assert_abs_diff_eq!(concurrence_lower(&rho, &v, &l).unwrap(), want, epsilon = 1e-12);

        let (a, la) = antisym(3);
        let w = werner(3, 0.9).unwrap();
        assert_abs_diff_eq!(cren_lower(&w, &a, &la).unwrap(), 0.4, epsilon = 1e-12);
        let want = (2.0f64 / 6.0).sqrt() * 0.8;
        assert_abs_diff_eq!(concurrence_lower(&w, &a, &la).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn mixture_two_projector_envelope() {
        for d in [2usize, 3, 4] {
            let (v1, l1) = antisym(d);
            let (v2, l2) = phi_plus(d);
            for f in [0.0, 0.3, 0.5, 0.8, 1.0] {
                let rho = mixture_antisym_phi_plus(d, f).unwrap();
                let got = cren_lower(&rho, &v1, &l1)
                    .unwrap()
                    .max(cren_lower(&rho, &v2, &l2).unwrap());
                let want = (f - 0.5).max(0.5 * (d as f64 * (1.0 - f) - 1.0)).max(0.0);
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn separable_states_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let a = crate::linalg::gaussian_vector(3, &mut rng);
        let b = crate::linalg::gaussian_vector(3, &mut rng);
        let prod = PureState::product(&a, &b).unwrap().density();
        for (v, l) in [phi_plus(3), antisym(3)] {
            assert_eq!(cren_lower(&prod, &v, &l).unwrap(), 0.0);
            assert_eq!(concurrence_lower(&prod, &v, &l).unwrap(), 0.0);
            assert!(!separability_test(&prod, &v, &l).unwrap().is_entangled());
        }
        assert_abs_diff_eq!(baseline_ppt_realignment(&prod), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sharp_bound_examples() {
        let phi = max_entangled(2).unwrap();
        let r = concurrence_lower_sharp(&phi.density(), &phi).unwrap();
        assert_abs_diff_eq!(r.sharp, 1.0, epsilon = 1e-12);

        for f in [0.6, 0.75, 1.0] {
            let r = concurrence_lower_sharp(&isotropic(2, f).unwrap(), &phi).unwrap();
            assert_abs_diff_eq!(r.sharp, 2.0 * f - 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.generic, 2.0 * f - 1.0, epsilon = 1e-12);
            assert_eq!(r.winner, BoundRoute::Tie);
        }
        let r = concurrence_lower_sharp(&isotropic(2, 0.3).unwrap(), &phi).unwrap();
        assert_eq!(r.sharp, 0.0);

        let prod = PureState::basis(2, 2, 0, 0).unwrap();
        assert!(matches!(
            concurrence_lower_sharp(&phi.density(), &prod),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sharp_route_wins_for_unbalanced_references() {
        // For |Φ⟩ with unequal Schmidt weights the two routes differ.
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let mut seen_sharp = false;
        for _ in 0..200 {
            let phi = random_pure(3, 3, &mut rng).unwrap();
            let rho = phi.density();
            let r = concurrence_lower_sharp(&rho, &phi).unwrap();
            if r.winner == BoundRoute::Sharp {
                seen_sharp = true;
            }
            assert!(r.sharp <= concurrence_pure(&phi) + 1e-9);
        }
        assert!(seen_sharp);
    }

    #[test]
    fn optimized_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let (v, l) = phi_plus(3);
        let rot = isotropic(3, 0.7)
            .unwrap()
            .local_rotate(&haar_unitary(3, &mut rng), &haar_unitary(3, &mut rng))
            .unwrap();
        let opt = cren_lower_optimized(&rot, &v, &l, &SeesawOptions::local_unitaries()).unwrap();
        assert_abs_diff_eq!(opt.value, (0.7 * 3.0 - 1.0) / 2.0, epsilon = 1e-6);
        assert!(opt.value >= opt.unoptimized);

        let mixed = DensityOperator::maximally_mixed(3, 3).unwrap();
        let opt = concurrence_lower_optimized(&mixed, &v, &l, &SeesawOptions::local_unitaries()).unwrap();
        assert_eq!(opt.value, 0.0);
    }

    #[test]
    fn separability_examples() {
        let (v, l) = phi_plus(2);
        match separability_test(&isotropic(2, 0.9).unwrap(), &v, &l).unwrap() {
            SeparabilityVerdict::Entangled { delta, delta_cap } => {
                assert_abs_diff_eq!(delta, 0.4, epsilon = 1e-12);
                assert_abs_diff_eq!(delta_cap, 0.4, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let (a, la) = antisym(3);
        match separability_test(&werner(3, 1.0).unwrap(), &a, &la).unwrap() {
            SeparabilityVerdict::Entangled { delta, .. } => assert_abs_diff_eq!(delta, 0.5, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
        let mixed = DensityOperator::maximally_mixed(3, 3).unwrap();
        assert!(!separability_test(&mixed, &a, &la).unwrap().is_entangled());

        let heur = lambda_sup_seesaw(&a, &SeesawOptions::lambda_sup());
        assert!(matches!(
            separability_test(&mixed, &a, &heur),
            Err(Error::CertificationRequired)
        ));
    }

    #[test]
    fn ensemble_check_examples() {
        let bell = EnsembleDecomposition::new(vec![(1.0, max_entangled(2).unwrap())]).unwrap();
        let v = ensemble_separability_check(&bell);
        assert_eq!(v.len(), 1);
        assert_abs_diff_eq!(v[0].lambda_max, 0.5, epsilon = 1e-14);

        let prods = EnsembleDecomposition::new(vec![
            (0.7, PureState::basis(2, 2, 0, 1).unwrap()),
            (0.3, PureState::basis(2, 2, 1, 1).unwrap()),
        ])
        .unwrap();
        assert!(ensemble_separability_check(&prods).is_empty());
    }

    #[test]
    fn baseline_bell_state() {
        assert_abs_diff_eq!(
            baseline_ppt_realignment(&max_entangled(2).unwrap().density()),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn report_fields() {
        let (v, l) = phi_plus(3);
        let r = bound_report(&isotropic(3, 0.8).unwrap(), &v, &l, true).unwrap();
        assert_abs_diff_eq!(r.cren_lower, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(r.delta, 0.8 - 1.0 / 3.0, epsilon = 1e-12);
        assert!(r.certified && r.baseline_ppt_realign.is_some());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["lambda_sup"]["status"], "exact_closed_form");
    }

    #[test]
    fn pure_state_soundness_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let psi = random_pure(2, 3, &mut rng).unwrap();
            let phi = random_pure(2, 3, &mut rng).unwrap();
            let v = Subspace::span(&phi);
            let l = lambda_sup_closed_form(&v).unwrap();
            let rho = psi.density();
            assert!(cren_lower(&rho, &v, &l).unwrap() <= negativity_pure_schmidt(&psi) + 1e-9);
            assert!(concurrence_lower(&rho, &v, &l).unwrap() <= concurrence_pure(&psi) + 1e-9);
        }
    }
}
