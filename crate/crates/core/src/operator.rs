//! Bipartite operators and the reshapes built on the A-major index convention.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, ensure_finite, ensure_hermitian, hermitian_eigensystem, CMatrix, CVector, TOL_PSD, TOL_TRACE};

/// A square operator on `C^m ⊗ C^n` with `2 <= m <= n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteOperator {
    dim_a: usize,
    dim_b: usize,
    #[serde(skip)]
    matrix: CMatrix,
}

impl BipartiteOperator {
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        let side = dim_a * dim_b;
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::Dimension(format!(
                "operator on {dim_a}x{dim_b} must be {side}x{side}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        ensure_finite(&matrix)?;
        Ok(Self { dim_a, dim_b, matrix })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn side(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn same_shape(&self, other: &BipartiteOperator) -> Result<()> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_dims(dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a < 2 {
        return Err(Error::Dimension(format!("dim_a must be at least 2, got {dim_a}")));
    }
    if dim_b < dim_a {
        return Err(Error::Dimension(format!(
            "local dimensions must satisfy dim_a <= dim_b, got {dim_a}x{dim_b}"
        )));
    }
    Ok(())
}

/// `(ρ^{T_B})_{(i j),(k l)} = ρ_{(i l),(k j)}`.
pub fn partial_transpose_b(rho: &BipartiteOperator) -> BipartiteOperator {
    let (m, n) = (rho.dim_a, rho.dim_b);
    let src = &rho.matrix;
    let mut out = CMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            for k in 0..m {
                for l in 0..n {
                    out[(i * n + j, k * n + l)] = src[(i * n + l, k * n + j)];
                }
            }
        }
    }
    BipartiteOperator {
        dim_a: m,
        dim_b: n,
        matrix: out,
    }
}

/// `(ρ^{T_A})_{(i j),(k l)} = ρ_{(k j),(i l)}`.
pub fn partial_transpose_a(rho: &BipartiteOperator) -> BipartiteOperator {
    let (m, n) = (rho.dim_a, rho.dim_b);
    let src = &rho.matrix;
    let mut out = CMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            for k in 0..m {
                for l in 0..n {
                    out[(i * n + j, k * n + l)] = src[(k * n + j, i * n + l)];
                }
            }
        }
    }
    BipartiteOperator {
        dim_a: m,
        dim_b: n,
        matrix: out,
    }
}

/// Realignment `R(ρ)_{(i j),(k l)} = ρ_{(i k),(j l)}`, an `m² × n²` matrix.
pub fn realign(rho: &BipartiteOperator) -> CMatrix {
    let (m, n) = (rho.dim_a, rho.dim_b);
    let src = &rho.matrix;
    let mut out = CMatrix::zeros(m * m, n * n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                for l in 0..n {
                    out[(i * m + j, k * n + l)] = src[(i * n + k, j * n + l)];
                }
            }
        }
    }
    out
}

/// Reduction on subsystem A: `(ρ_A)_{ik} = Σ_j ρ_{(i j),(k j)}`.
pub fn partial_trace_b(rho: &BipartiteOperator) -> CMatrix {
    let (m, n) = (rho.dim_a, rho.dim_b);
    CMatrix::from_fn(m, m, |i, k| (0..n).map(|j| rho.matrix[(i * n + j, k * n + j)]).sum())
}

/// Reduction on subsystem B: `(ρ_B)_{jl} = Σ_i ρ_{(i j),(i l)}`.
pub fn partial_trace_a(rho: &BipartiteOperator) -> CMatrix {
    let (m, n) = (rho.dim_a, rho.dim_b);
    CMatrix::from_fn(n, n, |j, l| (0..m).map(|i| rho.matrix[(i * n + j, i * n + l)]).sum())
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
///
/// The spectrum is computed once at construction; eigenvalues inside the PSD
/// tolerance band below zero are clamped to zero.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: BipartiteOperator,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl DensityOperator {
    pub fn new(op: BipartiteOperator) -> Result<Self> {
        ensure_hermitian(&op.matrix)?;
        let tr = op.matrix.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::NotDensity(format!("trace is {tr}")));
        }
        let (mut eigenvalues, eigenvectors) = hermitian_eigensystem(&op.matrix)?;
        let min = eigenvalues.last().copied().unwrap_or(0.0);
        if min < -TOL_PSD {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:.3e}")));
        }
        for ev in eigenvalues.iter_mut() {
            if *ev < 0.0 {
                *ev = 0.0;
            }
        }
        Ok(Self {
            op,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn from_matrix(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        Self::new(BipartiteOperator::new(dim_a, dim_b, matrix)?)
    }

    /// `I / (m n)`.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        let side = dim_a * dim_b;
        Self::from_matrix(dim_a, dim_b, CMatrix::identity(side, side).scale(1.0 / side as f64))
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector of length `m n`.
    pub fn from_pure_vector(dim_a: usize, dim_b: usize, psi: &CVector) -> Result<Self> {
        Self::from_matrix(dim_a, dim_b, psi * psi.adjoint())
    }

    /// `Σ w_i ρ_i` for weights summing to one.
    pub fn mix(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Domain("empty mixture".into()))?.1;
        let mut acc = CMatrix::zeros(first.side(), first.side());
        for (w, rho) in parts {
            first.op.same_shape(&rho.op)?;
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative mixing weight {w}")));
            }
            acc += rho.matrix().scale(*w);
        }
        Self::from_matrix(first.dim_a(), first.dim_b(), acc)
    }

    pub fn op(&self) -> &BipartiteOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op.matrix
    }

    pub fn dim_a(&self) -> usize {
        self.op.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.op.dim_b
    }

    pub fn side(&self) -> usize {
        self.op.side()
    }

    /// Clamped eigenvalues, nonincreasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Ky Fan `k`-norm from the clamped spectrum; `k = 0` gives 0.
    pub fn ky_fan(&self, k: usize) -> Result<f64> {
        if k > self.side() {
            return Err(Error::Domain(format!("Ky Fan index {k} exceeds {}", self.side())));
        }
        Ok(self.eigenvalues.iter().take(k).sum())
    }

    /// `Tr{ρ X}` (real part) for a Hermitian `X`.
    pub fn expectation(&self, x: &CMatrix) -> f64 {
        crate::linalg::trace_of_product(self.matrix(), x).re
    }

    /// Smallest eigenvalue of the partial transpose; negative iff the state is NPT.
    pub fn min_partial_transpose_eigenvalue(&self) -> f64 {
        let pt = partial_transpose_b(&self.op);
        crate::linalg::hermitian_eigenvalues(pt.matrix())
            .expect("partial transpose of a Hermitian operator is Hermitian")
            .last()
            .copied()
            .unwrap_or(0.0)
    }

    /// Apply `U_A ⊗ U_B` by conjugation.
    pub fn local_rotate(&self, u_a: &CMatrix, u_b: &CMatrix) -> Result<Self> {
        if u_a.nrows() != self.dim_a() || u_b.nrows() != self.dim_b() {
            return Err(Error::Dimension("local unitary size mismatch".into()));
        }
        let u = u_a.kronecker(u_b);
        Self::from_matrix(self.dim_a(), self.dim_b(), &u * self.matrix() * u.adjoint())
    }
}

/// Swap operator on `C^d ⊗ C^d`.
pub(crate) fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = c(1.0, 0.0);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, kron, trace_norm};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_density(d: usize) -> DensityOperator {
        let mut v = CVector::zeros(d * d);
        for j in 0..d {
            v[j * d + j] = c(1.0 / (d as f64).sqrt(), 0.0);
        }
        DensityOperator::from_pure_vector(d, d, &v).unwrap()
    }

    fn random_psd(side: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_iterator(
            side,
            side,
            crate::linalg::gaussian_vector(side * side, rng).iter().copied(),
        );
        let p = &g * g.adjoint();
        let tr = p.trace().re;
        p.scale(1.0 / tr)
    }

    #[test]
    fn dimension_convention_enforced() {
        assert!(BipartiteOperator::new(3, 2, CMatrix::zeros(6, 6)).is_err());
        assert!(BipartiteOperator::new(1, 4, CMatrix::zeros(4, 4)).is_err());
        assert!(BipartiteOperator::new(2, 3, CMatrix::zeros(5, 5)).is_err());
        assert!(BipartiteOperator::new(2, 3, CMatrix::zeros(6, 6)).is_ok());
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityOperator::from_matrix(2, 2, CMatrix::identity(4, 4)),
            Err(Error::NotDensity(_))
        ));
        let mut m = CMatrix::identity(4, 4).scale(0.25);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityOperator::from_matrix(2, 2, m),
            Err(Error::NotHermitian { .. })
        ));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.6, 0.0),
            c(0.6, 0.0),
            c(-0.2, 0.0),
            c(0.0, 0.0),
        ]));
        assert!(matches!(
            DensityOperator::from_matrix(2, 2, neg),
            Err(Error::NotDensity(_))
        ));
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clamped() {
        let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.5 + 5e-10, 0.0),
            c(0.5, 0.0),
            c(-5e-10, 0.0),
            c(0.0, 0.0),
        ]));
        let rho = DensityOperator::from_matrix(2, 2, diag).unwrap();
        assert!(rho.eigenvalues().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn partial_transpose_of_product_transposes_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let ra = random_psd(2, &mut rng);
        let rb = random_psd(3, &mut rng);
        let rho = BipartiteOperator::new(2, 3, kron(&ra, &rb)).unwrap();
        let pt = partial_transpose_b(&rho);
        let expected = kron(&ra, &rb.transpose());
        assert!((pt.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let rho = bell_density(2);
        let pt = partial_transpose_b(rho.op());
        let ev = hermitian_eigenvalues(pt.matrix()).unwrap();
        assert_abs_diff_eq!(ev[3], -0.5, epsilon = 1e-14);
        for e in &ev[..3] {
            assert_abs_diff_eq!(*e, 0.5, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(trace_norm(pt.matrix()).unwrap(), 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rho.min_partial_transpose_eigenvalue(), -0.5, epsilon = 1e-14);
    }

    #[test]
    fn partial_transpose_is_exact_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = BipartiteOperator::new(3, 4, random_psd(12, &mut rng)).unwrap();
        assert_eq!(partial_transpose_b(&partial_transpose_b(&rho)), rho);
        assert_eq!(partial_transpose_a(&partial_transpose_a(&rho)), rho);
        let pt = partial_transpose_b(&rho);
        assert_abs_diff_eq!(pt.matrix().trace().re, 1.0, epsilon = 1e-12);
        assert!(crate::linalg::hermitian_deviation(pt.matrix()) < 1e-15);
        // T_A and T_B differ by a full transpose
        assert!((partial_transpose_a(&rho).matrix() - pt.matrix().transpose()).norm() < 1e-15);
    }

    #[test]
    fn realignment_examples() {
        let rho = bell_density(2);
        let r = realign(rho.op());
        assert_abs_diff_eq!(trace_norm(&r).unwrap(), 2.0, epsilon = 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ra = random_psd(2, &mut rng);
        let rb = random_psd(3, &mut rng);
        let prod = BipartiteOperator::new(2, 3, kron(&ra, &rb)).unwrap();
        let r = realign(&prod);
        assert_eq!(r.shape(), (4, 9));
        let sv = crate::linalg::singular_values(&r).unwrap();
        assert!(sv[1] < 1e-12, "tensor product realigns to rank one");
        assert_abs_diff_eq!(sv[0], ra.norm() * rb.norm(), epsilon = 1e-12);

        let m = BipartiteOperator::new(2, 3, random_psd(6, &mut rng)).unwrap();
        assert_abs_diff_eq!(realign(&m).norm(), m.matrix().norm(), epsilon = 1e-14);
    }

    #[test]
    fn partial_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ra = random_psd(2, &mut rng);
        let rb = random_psd(3, &mut rng);
        let prod = BipartiteOperator::new(2, 3, kron(&ra, &rb)).unwrap();
        assert!((partial_trace_b(&prod) - &ra).norm() < 1e-14);
        assert!((partial_trace_a(&prod) - &rb).norm() < 1e-14);

        for d in 2..=4 {
            let red = partial_trace_b(bell_density(d).op());
            let want = CMatrix::identity(d, d).scale(1.0 / d as f64);
            assert!((red - want).norm() < 1e-14);
        }

        let rnd = BipartiteOperator::new(3, 3, random_psd(9, &mut rng)).unwrap();
        assert_abs_diff_eq!(
            partial_trace_b(&rnd).trace().re,
            rnd.matrix().trace().re,
            epsilon = 1e-14
        );
    }

    #[test]
    fn swap_is_an_involution() {
        let s = swap_operator(3);
        assert!((&s * &s - CMatrix::identity(9, 9)).norm() < 1e-15);
        assert_abs_diff_eq!(s.trace().re, 3.0);
    }
}
