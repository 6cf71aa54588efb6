//! Subspaces of `C^m ⊗ C^n`, their projectors, and `λ_sup`: the supremum over
//! unit vectors of the subspace of the largest squared Schmidt coefficient.
//!
//! `λ_sup` equals `max ⟨α⊗β|Π_V|α⊗β⟩` over unit product vectors, which is
//! what both the seesaw and the ε-net certificate evaluate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, gaussian_vector, hermitian_eigensystem, CMatrix, CVector};
use crate::operator::{check_dims, swap_operator, BipartiteOperator, DensityOperator};
use crate::states::{antisym_basis, PureState};

const GRAM_TOL: f64 = 1e-10;
const PROJECTOR_MATCH_TOL: f64 = 1e-9;

/// An orthonormal spanning set `{|Ψ_k⟩}` of `V`, with the projector cached.
#[derive(Debug, Clone)]
pub struct Subspace {
    dim_a: usize,
    dim_b: usize,
    basis: Vec<PureState>,
    projector: CMatrix,
}

impl Subspace {
    pub fn new(basis: Vec<PureState>) -> Result<Self> {
        let first = basis
            .first()
            .ok_or_else(|| Error::Domain("a subspace needs at least one basis vector".into()))?;
        let (m, n) = (first.dim_a(), first.dim_b());
        if basis.len() > m * n {
            return Err(Error::Dimension(format!(
                "{} basis vectors exceed the dimension {}",
                basis.len(),
                m * n
            )));
        }
        for (i, a) in basis.iter().enumerate() {
            if a.dim_a() != m || a.dim_b() != n {
                return Err(Error::Dimension("basis vectors differ in shape".into()));
            }
            for b in &basis[i + 1..] {
                let g = a.overlap(b).norm();
                if g > GRAM_TOL {
                    return Err(Error::Domain(format!("basis is not orthonormal (overlap {g:.3e})")));
                }
            }
        }
        let side = m * n;
        let mut projector = CMatrix::zeros(side, side);
        for psi in &basis {
            let v = psi.amplitudes();
            projector += v * v.adjoint();
        }
        Ok(Self {
            dim_a: m,
            dim_b: n,
            basis,
            projector,
        })
    }

    /// Orthonormalizes arbitrary spanning vectors (modified Gram-Schmidt);
    /// linearly dependent input is an error.
    pub fn from_spanning(dim_a: usize, dim_b: usize, vectors: &[CVector]) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        let mut ortho: Vec<CVector> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != dim_a * dim_b {
                return Err(Error::Dimension(format!("vector of length {}", v.len())));
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for q in &ortho {
                    let proj = q.dotc(&w);
                    w -= q * proj;
                }
            }
            let norm = w.norm();
            if norm <= 1e-10 * v.norm().max(1.0) {
                return Err(Error::Domain("spanning vectors are linearly dependent".into()));
            }
            ortho.push(w.unscale(norm));
        }
        let basis = ortho
            .into_iter()
            .map(|v| PureState::normalized(dim_a, dim_b, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(basis)
    }

    pub fn span(psi: &PureState) -> Self {
        Self::new(vec![psi.clone()]).expect("a single unit vector is orthonormal")
    }

    /// The full antisymmetric subspace of `C^d ⊗ C^d`.
    pub fn antisymmetric(d: usize) -> Result<Self> {
        Self::new(antisym_basis(d)?)
    }

    /// Range of `rho`: eigenvectors with eigenvalue above `1e-10`.
    pub fn support(rho: &DensityOperator) -> Result<Self> {
        let vecs: Vec<CVector> = rho
            .eigenvalues()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 1e-10)
            .map(|(i, _)| rho.eigenvectors().column(i).into_owned())
            .collect();
        Self::from_spanning(rho.dim_a(), rho.dim_b(), &vecs)
    }

    /// Random `l`-dimensional subspace (orthonormalized Gaussian vectors).
    pub fn random<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, l: usize, rng: &mut R) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        if l == 0 || l > dim_a * dim_b {
            return Err(Error::Domain(format!("subspace dimension {l} out of range")));
        }
        let vecs: Vec<CVector> = (0..l).map(|_| gaussian_vector(dim_a * dim_b, rng)).collect();
        Self::from_spanning(dim_a, dim_b, &vecs)
    }

    /// `V⊥`; `None` when `V` is the whole space.
    pub fn orthogonal_complement(&self) -> Result<Option<Self>> {
        let side = self.side();
        if self.dim() == side {
            return Ok(None);
        }
        let comp = CMatrix::identity(side, side) - &self.projector;
        let (vals, vecs) = hermitian_eigensystem(&comp)?;
        let cols: Vec<CVector> = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .map(|(i, _)| vecs.column(i).into_owned())
            .collect();
        Self::from_spanning(self.dim_a, self.dim_b, &cols).map(Some)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    fn side(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Number of basis vectors `l`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn projector_matrix(&self) -> &CMatrix {
        &self.projector
    }

    /// `Π_V = Σ_k |Ψ_k⟩⟨Ψ_k|`.
    pub fn projector(&self) -> BipartiteOperator {
        BipartiteOperator::new(self.dim_a, self.dim_b, self.projector.clone())
            .expect("projector shape matches the subspace")
    }

    pub fn check_compatible(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim_a() != self.dim_a || rho.dim_b() != self.dim_b {
            return Err(Error::Dimension(format!(
                "state is {}x{}, subspace is {}x{}",
                rho.dim_a(),
                rho.dim_b(),
                self.dim_a,
                self.dim_b
            )));
        }
        Ok(())
    }

    /// `Tr{ρ Π_V}`.
    pub fn expectation(&self, rho: &DensityOperator) -> Result<f64> {
        self.check_compatible(rho)?;
        Ok(rho.expectation(&self.projector))
    }

    /// `‖Π_V |φ⟩‖² = Σ_k |⟨φ|Ψ_k⟩|²`, the largest squared overlap of `φ` with a
    /// unit vector of `V`.
    pub fn best_overlap(&self, phi: &PureState) -> Result<f64> {
        if phi.dim_a() != self.dim_a || phi.dim_b() != self.dim_b {
            return Err(Error::Dimension("state and subspace shapes differ".into()));
        }
        Ok(self.basis.iter().map(|psi| phi.overlap(psi).norm_sqr()).sum())
    }

    /// Whether `V` lies inside the antisymmetric subspace (requires `m = n`).
    pub fn is_antisymmetric(&self) -> bool {
        if self.dim_a != self.dim_b {
            return false;
        }
        let swap = swap_operator(self.dim_a);
        self.basis
            .iter()
            .all(|psi| (&swap * psi.amplitudes() + psi.amplitudes()).norm() <= PROJECTOR_MATCH_TOL)
    }

    /// `⟨α⊗β|Π_V|α⊗β⟩`.
    pub fn product_overlap(&self, alpha: &CVector, beta: &CVector) -> f64 {
        let x = alpha.kronecker(beta);
        self.basis.iter().map(|psi| x.dotc(psi.amplitudes()).norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSupStatus {
    ExactClosedForm,
    HeuristicLowerEstimate,
    CertifiedInterval,
}

/// `λ_sup` together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSup {
    pub value: f64,
    pub status: LambdaSupStatus,
    /// `[lo, hi]` for certified values.
    pub interval: Option<[f64; 2]>,
    /// Cardinality of the ε-net behind a certificate.
    pub net_points: Option<u64>,
    pub method: String,
}

impl LambdaSup {
    pub fn exact(value: f64, method: impl Into<String>) -> Self {
        Self {
            value,
            status: LambdaSupStatus::ExactClosedForm,
            interval: None,
            net_points: None,
            method: method.into(),
        }
    }

    /// The value bounds should divide by. Certified intervals contribute their
    /// upper end, which keeps the resulting measure bounds valid.
    pub fn for_bounds(&self) -> f64 {
        match (self.status, self.interval) {
            (LambdaSupStatus::CertifiedInterval, Some([_, hi])) => hi,
            _ => self.value,
        }
    }

    /// False only for seesaw estimates, which may undershoot the supremum.
    pub fn is_certified(&self) -> bool {
        self.status != LambdaSupStatus::HeuristicLowerEstimate
    }
}

/// Exact `λ_sup` when `V` is one-dimensional or sits inside the antisymmetric
/// subspace and contains a vector with two Schmidt weights of 1/2.
pub fn lambda_sup_closed_form(v: &Subspace) -> Option<LambdaSup> {
    if v.is_antisymmetric() {
        let full = antisym_basis(v.dim_a).ok()?;
        let full_match = full.len() == v.dim() && {
            let p: CMatrix = full
                .iter()
                .map(|psi| psi.amplitudes() * psi.amplitudes().adjoint())
                .fold(CMatrix::zeros(v.side(), v.side()), |a, b| a + b);
            (p - &v.projector).iter().all(|z| z.norm() <= PROJECTOR_MATCH_TOL)
        };
        // Antisymmetric coefficient matrices have paired singular values, so
        // λ_1 <= 1/2 on V; it is attained by any vector with λ = (1/2, 1/2, 0...).
        let attained = full_match || v.basis.iter().any(|psi| psi.lambda_max() >= 0.5 - 1e-12);
        if attained {
            return Some(LambdaSup::exact(0.5, "antisymmetric subspace"));
        }
    }
    if v.dim() == 1 {
        return Some(LambdaSup::exact(
            v.basis[0].lambda_max(),
            "largest Schmidt weight of the spanning vector",
        ));
    }
    None
}

/// Restart and stopping parameters for the alternating maximizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Stop a restart once a sweep gains less than this.
    pub tol: f64,
    pub seed: u64,
}

impl SeesawOptions {
    /// Defaults for the product-vector search behind `λ_sup`.
    pub fn lambda_sup() -> Self {
        Self {
            restarts: 32,
            max_sweeps: 500,
            tol: 1e-12,
            seed: 0x5eed,
        }
    }

    /// Defaults for the local-unitary search behind `F_V`.
    pub fn local_unitaries() -> Self {
        Self {
            restarts: 16,
            max_sweeps: 200,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Best product vector found by the seesaw and the objective after every sweep
/// of the winning restart.
#[derive(Debug, Clone)]
pub struct ProductSearch {
    pub value: f64,
    pub alpha: CVector,
    pub beta: CVector,
    pub history: Vec<f64>,
}

fn top_eigenpair(h: &CMatrix) -> (f64, CVector) {
    let (vals, vecs) = hermitian_eigensystem(h).expect("a Gram sum is Hermitian");
    (vals[0], vecs.column(0).into_owned())
}

/// `M_β = Σ_k (C_k β̄)(C_k β̄)†`, so that `⟨α⊗β|Π_V|α⊗β⟩ = α† M_β α`.
fn contraction_over_b(v: &Subspace, beta: &CVector) -> CMatrix {
    let bc = beta.conjugate();
    let mut m = CMatrix::zeros(v.dim_a, v.dim_a);
    for psi in &v.basis {
        let w = psi.coeff_matrix() * &bc;
        m += &w * w.adjoint();
    }
    m
}

/// `N_α = Σ_k (C_kᵀ ᾱ)(C_kᵀ ᾱ)†`, so that `⟨α⊗β|Π_V|α⊗β⟩ = β† N_α β`.
fn contraction_over_a(v: &Subspace, alpha: &CVector) -> CMatrix {
    let ac = alpha.conjugate();
    let mut m = CMatrix::zeros(v.dim_b, v.dim_b);
    for psi in &v.basis {
        let w = psi.coeff_matrix().transpose() * &ac;
        m += &w * w.adjoint();
    }
    m
}

fn unit_gaussian<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    let g = gaussian_vector(len, rng);
    let n = g.norm();
    g.unscale(n)
}

/// Alternating maximization of `⟨α⊗β|Π_V|α⊗β⟩`.
///
/// The first restarts start from the leading Schmidt pair of each basis
/// vector, the rest from Haar-random product vectors. Each half-step is an
/// exact top-eigenvector update, so the objective never decreases.
pub fn product_seesaw(v: &Subspace, opts: &SeesawOptions) -> ProductSearch {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<ProductSearch> = None;
    let restarts = opts.restarts.max(1);
    for r in 0..restarts {
        let (mut alpha, mut beta) = match v.basis.get(r) {
            Some(psi) => {
                let dec = psi.schmidt_decompose();
                (dec.left[0].clone(), dec.right[0].clone())
            }
            None => (unit_gaussian(v.dim_a, &mut rng), unit_gaussian(v.dim_b, &mut rng)),
        };
        let mut value = v.product_overlap(&alpha, &beta);
        let mut history = vec![value];
        for _ in 0..opts.max_sweeps {
            let (_, a) = top_eigenpair(&contraction_over_b(v, &beta));
            alpha = a;
            let (val, b) = top_eigenpair(&contraction_over_a(v, &alpha));
            beta = b;
            let gain = val - value;
            value = value.max(val);
            history.push(value);
            if gain < opts.tol {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(ProductSearch {
                value,
                alpha,
                beta,
                history,
            });
        }
    }
    best.expect("at least one restart runs")
}

/// Seesaw estimate of `λ_sup`. Always a lower estimate of the true supremum.
pub fn lambda_sup_seesaw(v: &Subspace, opts: &SeesawOptions) -> LambdaSup {
    let search = product_seesaw(v, opts);
    LambdaSup {
        value: search.value.min(1.0),
        status: LambdaSupStatus::HeuristicLowerEstimate,
        interval: None,
        net_points: None,
        method: format!("product-vector seesaw, {} restarts", opts.restarts.max(1)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyOptions {
    /// Requested interval width.
    pub eps: f64,
    /// Largest local dimension accepted.
    pub max_local_dim: usize,
    /// Largest number of net points evaluated.
    pub budget: u128,
    pub seesaw: SeesawOptions,
}

impl CertifyOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            max_local_dim: 4,
            budget: 2_000_000,
            seesaw: SeesawOptions::lambda_sup(),
        }
    }
}

/// Deterministic net over unit vectors of `C^m` modulo global phase.
///
/// Points are `(r_0, r_1 e^{iφ_1}, …)` with `r` in hyperspherical angles on the
/// positive orthant. Grid steps are chosen so every unit vector lies within
/// Euclidean distance `radius` of some net point (up to phase).
struct PhaseNet {
    dim: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl PhaseNet {
    fn new(dim: usize, radius: f64) -> Self {
        let angles = (dim - 1) as f64;
        // radius = ‖Δθ‖ + max|Δφ| <= (h_θ/2)·√(dim-1) + h_φ/2, each half the radius
        let h_theta = radius / angles.sqrt();
        let h_phi = radius;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let nt = (half_pi / h_theta).ceil() as usize + 1;
        let np = (2.0 * std::f64::consts::PI / h_phi).ceil() as usize;
        let theta = (0..nt).map(|i| half_pi * i as f64 / (nt - 1) as f64).collect();
        let phi = (0..np)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / np as f64)
            .collect();
        Self { dim, theta, phi }
    }

    fn size(&self) -> u128 {
        let a = (self.dim - 1) as u32;
        (self.theta.len() as u128).pow(a) * (self.phi.len() as u128).pow(a)
    }

    fn for_each(&self, mut f: impl FnMut(&CVector)) {
        let k = self.dim - 1;
        let mut ti = vec![0usize; k];
        let mut pi = vec![0usize; k];
        let mut v = CVector::zeros(self.dim);
        loop {
            let mut s = 1.0;
            for (j, &t) in ti.iter().enumerate() {
                let th = self.theta[t];
                v[j] = c(s * th.cos(), 0.0);
                s *= th.sin();
            }
            v[k] = c(s, 0.0);
            let radial: Vec<f64> = v.iter().map(|z| z.re).collect();
            loop {
                for j in 1..self.dim {
                    let p = self.phi[pi[j - 1]];
                    v[j] = c(radial[j] * p.cos(), radial[j] * p.sin());
                }
                f(&v);
                if !advance(&mut pi, self.phi.len()) {
                    break;
                }
            }
            for j in 0..self.dim {
                v[j] = c(radial[j], 0.0);
            }
            if !advance(&mut ti, self.theta.len()) {
                break;
            }
        }
    }
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for i in idx.iter_mut() {
        *i += 1;
        if *i < base {
            return true;
        }
        *i = 0;
    }
    false
}

/// Certified enclosure of `λ_sup`.
///
/// `g(α) = max_β ⟨α⊗β|Π_V|α⊗β⟩` is the top eigenvalue of `N_α` and is
/// 2-Lipschitz in `α` because `‖Π_V‖ = 1`. Evaluating it on a net of radius
/// `ε/2` over the smaller factor bounds the supremum within `ε`.
pub fn lambda_sup_certified(v: &Subspace, opts: &CertifyOptions) -> Result<LambdaSup> {
    if !(opts.eps > 0.0 && opts.eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {}", opts.eps)));
    }
    if v.dim_a.max(v.dim_b) > opts.max_local_dim {
        return Err(Error::Unsupported(format!(
            "certification is capped at local dimension {}, got {}x{}",
            opts.max_local_dim, v.dim_a, v.dim_b
        )));
    }
    let radius = opts.eps / 2.0;
    let net = PhaseNet::new(v.dim_a, radius);
    let required = net.size();
    if required > opts.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: opts.budget,
        });
    }
    let mut net_max = 0.0f64;
    net.for_each(|alpha| {
        let (val, _) = top_eigenpair(&contraction_over_a(v, alpha));
        net_max = net_max.max(val);
    });
    let seesaw = product_seesaw(v, &opts.seesaw).value;
    let lo = seesaw.max(net_max).min(1.0);
    let hi = (net_max + 2.0 * radius).min(1.0).max(lo);
    Ok(LambdaSup {
        value: lo,
        status: LambdaSupStatus::CertifiedInterval,
        interval: Some([lo, hi]),
        net_points: Some(required as u64),
        method: format!("eps-net over the A factor (eps = {}) plus seesaw", opts.eps),
    })
}

/// How `λ_sup` may be sourced when no closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LambdaSupPolicy {
    /// Closed form only.
    Closed,
    /// Closed form, else an ε-net certificate.
    Net { eps: f64 },
    /// Closed form, else a seesaw estimate.
    Heuristic,
}

/// Resolve `λ_sup` in the order closed form → certificate → heuristic, as
/// allowed by `policy`.
pub fn resolve_lambda_sup(v: &Subspace, policy: LambdaSupPolicy, seesaw: &SeesawOptions) -> Result<LambdaSup> {
    if let Some(exact) = lambda_sup_closed_form(v) {
        return Ok(exact);
    }
    match policy {
        LambdaSupPolicy::Closed => Err(Error::Unsupported(
            "no closed form for lambda_sup on this subspace; use a net or heuristic policy".into(),
        )),
        LambdaSupPolicy::Net { eps } => {
            let opts = CertifyOptions {
                seesaw: *seesaw,
                ..CertifyOptions::new(eps)
            };
            lambda_sup_certified(v, &opts)
        }
        LambdaSupPolicy::Heuristic => Ok(lambda_sup_seesaw(v, seesaw)),
    }
}
