//! Pure and mixed bipartite states: Schmidt data, the standard families,
//! ensemble decompositions and seeded random generators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, gaussian_vector, haar_unitary, singular_values, CMatrix, CVector};
use crate::operator::{check_dims, swap_operator, DensityOperator};

const NORM_TOL: f64 = 1e-12;

/// A unit vector on `C^m ⊗ C^n` with its coefficient matrix and squared
/// Schmidt coefficients `λ_1 >= ... >= λ_m` (the Schmidt coefficients proper
/// are `√λ_i`).
#[derive(Debug, Clone)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: CVector,
    coeff: CMatrix,
    schmidt: Vec<f64>,
}

impl PureState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: CVector) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::Dimension(format!(
                "pure state on {dim_a}x{dim_b} needs {} amplitudes, got {}",
                dim_a * dim_b,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state vector has norm {norm}")));
        }
        let coeff = CMatrix::from_row_slice(dim_a, dim_b, amplitudes.as_slice());
        let schmidt = singular_values(&coeff)?.iter().map(|s| s * s).collect();
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
            coeff,
            schmidt,
        })
    }

    /// Normalizes `v` first.
    pub fn normalized(dim_a: usize, dim_b: usize, v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        Self::new(dim_a, dim_b, v.unscale(norm))
    }

    /// `|a⟩ ⊗ |b⟩`, normalized.
    pub fn product(a: &CVector, b: &CVector) -> Result<Self> {
        Self::normalized(a.len(), b.len(), a.kronecker(b))
    }

    /// `|i⟩ ⊗ |j⟩`.
    pub fn basis(dim_a: usize, dim_b: usize, i: usize, j: usize) -> Result<Self> {
        if i >= dim_a || j >= dim_b {
            return Err(Error::Domain(format!("basis index ({i},{j}) out of range")));
        }
        let mut v = CVector::zeros(dim_a * dim_b);
        v[i * dim_b + j] = c(1.0, 0.0);
        Self::new(dim_a, dim_b, v)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// The `m × n` matrix `c_ij` with `|ψ⟩ = Σ c_ij |i⟩|j⟩`.
    pub fn coeff_matrix(&self) -> &CMatrix {
        &self.coeff
    }

    /// Squared Schmidt coefficients, nonincreasing.
    pub fn schmidt(&self) -> &[f64] {
        &self.schmidt
    }

    /// Largest squared Schmidt coefficient.
    pub fn lambda_max(&self) -> f64 {
        self.schmidt[0]
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure_vector(self.dim_a, self.dim_b, &self.amplitudes)
            .expect("a normalized vector yields a density operator")
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> num_complex::Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, rho: &DensityOperator) -> f64 {
        let v = &self.amplitudes;
        v.dotc(&(rho.matrix() * v)).re
    }

    pub fn schmidt_decompose(&self) -> SchmidtDecomposition {
        let svd = self.coeff.clone().svd(true, true);
        let u = svd.u.expect("svd u requested");
        let v_t = svd.v_t.expect("svd v_t requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

        let mut lambdas = Vec::with_capacity(order.len());
        let mut left = Vec::with_capacity(order.len());
        let mut right = Vec::with_capacity(order.len());
        for &k in &order {
            let mut alpha: CVector = u.column(k).into_owned();
            // β_k[j] = (V†)_{kj}, so c = Σ σ_k α_k β_kᵀ
            let mut beta: CVector = v_t.row(k).transpose().into_owned();
            if let Some(first) = alpha.iter().find(|z| z.norm() > 1e-12).copied() {
                let phase = first / first.norm();
                alpha *= phase.conj();
                beta *= phase;
            }
            let s = svd.singular_values[k];
            lambdas.push(s * s);
            left.push(alpha);
            right.push(beta);
        }
        SchmidtDecomposition { lambdas, left, right }
    }
}

/// `|ψ⟩ = Σ_i √λ_i |α_i⟩ ⊗ |β_i⟩`, `λ` nonincreasing. The first nonzero
/// component of every `α_i` is real and positive.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub lambdas: Vec<f64>,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> CVector {
        let n = self.right[0].len() * self.left[0].len();
        let mut out = CVector::zeros(n);
        for ((l, a), b) in self.lambdas.iter().zip(&self.left).zip(&self.right) {
            out += a.kronecker(b).scale(l.sqrt());
        }
        out
    }
}

/// `(1/√d) Σ_j |jj⟩`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be >= 2, got {d}")));
    }
    let mut v = CVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        v[j * d + j] = c(amp, 0.0);
    }
    PureState::normalized(d, d, v)
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

/// Isotropic state `((1-F)/(d²-1))(I - |Φ+⟩⟨Φ+|) + F |Φ+⟩⟨Φ+|`.
pub fn isotropic(d: usize, fidelity: f64) -> Result<DensityOperator> {
    check_unit_interval("F", fidelity)?;
    let phi = max_entangled(d)?;
    let p = phi.amplitudes() * phi.amplitudes().adjoint();
    let side = d * d;
    let noise = (CMatrix::identity(side, side) - &p).scale((1.0 - fidelity) / (side as f64 - 1.0));
    DensityOperator::from_matrix(d, d, noise + p.scale(fidelity))
}

/// Werner state: weight `1-W` spread over the symmetric subspace and `W` over
/// the antisymmetric one, so `Tr{ϱ_W Π_anti} = W`.
pub fn werner(d: usize, w: f64) -> Result<DensityOperator> {
    check_unit_interval("W", w)?;
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be >= 2, got {d}")));
    }
    let df = d as f64;
    let side = d * d;
    let id = CMatrix::identity(side, side);
    let swap = swap_operator(d);
    let sym = (&id + &swap).scale(0.5);
    let anti = (&id - &swap).scale(0.5);
    let m = sym.scale(2.0 * (1.0 - w) / (df * (df + 1.0))) + anti.scale(2.0 * w / (df * (df - 1.0)));
    DensityOperator::from_matrix(d, d, m)
}

/// Orthonormal basis `(|ij⟩ - |ji⟩)/√2`, `i < j`, of the antisymmetric subspace.
pub fn antisym_basis(d: usize) -> Result<Vec<PureState>> {
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be >= 2, got {d}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            let mut v = CVector::zeros(d * d);
            v[i * d + j] = c(s, 0.0);
            v[j * d + i] = c(-s, 0.0);
            out.push(PureState::normalized(d, d, v)?);
        }
    }
    Ok(out)
}

/// `(2F/(d(d-1))) Σ_{i<j} |Ψ⁻_ij⟩⟨Ψ⁻_ij| + (1-F) |Φ+⟩⟨Φ+|`.
pub fn mixture_antisym_phi_plus(d: usize, f: f64) -> Result<DensityOperator> {
    mixture_antisym_phi_plus_ensemble(d, f)?.reconstruct()
}

/// The defining ensemble of [`mixture_antisym_phi_plus`]; zero-weight members
/// are omitted.
pub fn mixture_antisym_phi_plus_ensemble(d: usize, f: f64) -> Result<EnsembleDecomposition> {
    check_unit_interval("F", f)?;
    let basis = antisym_basis(d)?;
    let w = 2.0 * f / (d as f64 * (d as f64 - 1.0));
    let mut members: Vec<(f64, PureState)> = Vec::new();
    if w > 0.0 {
        members.extend(basis.into_iter().map(|psi| (w, psi)));
    }
    if f < 1.0 {
        members.push((1.0 - f, max_entangled(d)?));
    }
    EnsembleDecomposition::new(members)
}

/// The named state families that have closed-form measure values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateFamily {
    Isotropic { d: usize, f: f64 },
    Werner { d: usize, w: f64 },
    AntisymPhiPlusMixture { d: usize, f: f64 },
}

impl StateFamily {
    pub fn density(&self) -> Result<DensityOperator> {
        match *self {
            StateFamily::Isotropic { d, f } => isotropic(d, f),
            StateFamily::Werner { d, w } => werner(d, w),
            StateFamily::AntisymPhiPlusMixture { d, f } => mixture_antisym_phi_plus(d, f),
        }
    }

    pub fn local_dim(&self) -> usize {
        match *self {
            StateFamily::Isotropic { d, .. }
            | StateFamily::Werner { d, .. }
            | StateFamily::AntisymPhiPlusMixture { d, .. } => d,
        }
    }
}

/// A list of `(q_μ, |Φ_μ⟩)` with `q_μ > 0` summing to one.
#[derive(Debug, Clone)]
pub struct EnsembleDecomposition {
    members: Vec<(f64, PureState)>,
}

impl EnsembleDecomposition {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let (_, first) = members.first().ok_or_else(|| Error::Domain("empty ensemble".into()))?;
        let (m, n) = (first.dim_a(), first.dim_b());
        let mut total = 0.0;
        for (q, psi) in &members {
            if *q <= 0.0 || !q.is_finite() {
                return Err(Error::Domain(format!("ensemble weight {q} is not positive")));
            }
            if psi.dim_a() != m || psi.dim_b() != n {
                return Err(Error::Dimension("ensemble members differ in shape".into()));
            }
            total += q;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Σ q_μ |Φ_μ⟩⟨Φ_μ|`.
    pub fn reconstruct(&self) -> Result<DensityOperator> {
        let first = &self.members[0].1;
        let side = first.dim_a() * first.dim_b();
        let mut acc = CMatrix::zeros(side, side);
        for (q, psi) in &self.members {
            let v = psi.amplitudes();
            acc += (v * v.adjoint()).scale(*q);
        }
        DensityOperator::from_matrix(first.dim_a(), first.dim_b(), acc)
    }
}

/// Eigen-ensemble of `rho`: eigenvectors weighted by their nonzero eigenvalues.
pub fn eigen_ensemble(rho: &DensityOperator) -> Result<EnsembleDecomposition> {
    let mut members = Vec::new();
    let total: f64 = rho.eigenvalues().iter().sum();
    for (i, &e) in rho.eigenvalues().iter().enumerate() {
        if e > 1e-14 {
            let v: CVector = rho.eigenvectors().column(i).into_owned();
            members.push((e / total, PureState::normalized(rho.dim_a(), rho.dim_b(), v)?));
        }
    }
    EnsembleDecomposition::new(members)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> Result<PureState> {
    check_dims(dim_a, dim_b)?;
    PureState::normalized(dim_a, dim_b, gaussian_vector(dim_a * dim_b, rng))
}

/// Random density operator `G G† / Tr(G G†)` with `G` Gaussian of shape `mn × rank`.
pub fn random_density<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    check_dims(dim_a, dim_b)?;
    let side = dim_a * dim_b;
    if rank == 0 || rank > side {
        return Err(Error::Domain(format!("rank must lie in 1..={side}, got {rank}")));
    }
    let g = CMatrix::from_iterator(side, rank, gaussian_vector(side * rank, rng).iter().copied());
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    DensityOperator::from_matrix(dim_a, dim_b, p.scale(1.0 / tr))
}

/// A random exact decomposition of `rho` with `size` members: the eigen-ensemble
/// mixed by the first `rank(ρ)` columns of a Haar unitary of size `size`.
pub fn random_ensemble<R: Rng + ?Sized>(
    rho: &DensityOperator,
    size: usize,
    rng: &mut R,
) -> Result<EnsembleDecomposition> {
    let support: Vec<usize> = rho
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 1e-14)
        .map(|(i, _)| i)
        .collect();
    if size < support.len() {
        return Err(Error::Domain(format!(
            "ensemble size {size} is below the rank {}",
            support.len()
        )));
    }
    let u = haar_unitary(size, rng);
    let side = rho.side();
    let mut raw = Vec::with_capacity(size);
    for mu in 0..size {
        let mut v = CVector::zeros(side);
        for (col, &i) in support.iter().enumerate() {
            let amp = u[(mu, col)] * rho.eigenvalues()[i].sqrt();
            v += rho.eigenvectors().column(i) * amp;
        }
        let q = v.norm_squared();
        if q > 1e-15 {
            raw.push((q, v));
        }
    }
    let total: f64 = raw.iter().map(|(q, _)| q).sum();
    let members = raw
        .into_iter()
        .map(|(q, v)| Ok((q / total, PureState::normalized(rho.dim_a(), rho.dim_b(), v)?)))
        .collect::<Result<Vec<_>>>()?;
    EnsembleDecomposition::new(members)
}
