//! Dense complex linear algebra on bipartite-structured matrices.
//!
//! Composite indices are A-major: the basis vector `|i⟩_A ⊗ |j⟩_B` sits at
//! position `i * n + j`. Every reshape in this module (and in the rest of the
//! crate) uses that convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance for Hermiticity checks.
pub const TOL_HERM: f64 = 1e-9;
/// Tolerance on the unit-trace condition.
pub const TOL_TRACE: f64 = 1e-9;
/// Allowed negative eigenvalue magnitude for a positive semidefinite operator.
pub const TOL_PSD: f64 = 1e-9;
/// Residual tolerance for eigenpairs.
pub const TOL_EIG: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn ensure_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix("non-finite entry".into()))
    }
}

fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation `|A_ij - conj(A_ji)|`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    ensure_finite(a)?;
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let deviation = hermitian_deviation(a);
    if deviation > TOL_HERM * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Singular values in nonincreasing order; `min(rows, cols)` of them.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    ensure_finite(a)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut sv: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in nonincreasing order; column `i` of the second
/// element is the unit eigenvector for eigenvalue `i`.
pub fn hermitian_eigensystem(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    ensure_hermitian(h)?;
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix, nonincreasing.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    ensure_hermitian(h)?;
    let sym = (h + h.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// Ky Fan `k`-norm: the sum of the `k` largest singular values.
pub fn ky_fan_norm(a: &CMatrix, k: usize) -> Result<f64> {
    let q = a.nrows().min(a.ncols());
    if k == 0 || k > q {
        return Err(Error::Domain(format!("Ky Fan index k={k} outside 1..={q}")));
    }
    Ok(singular_values(a)?.iter().take(k).sum())
}

/// Ky Fan `k`-norm of a Hermitian matrix via eigenvalue magnitudes.
pub fn ky_fan_norm_hermitian(h: &CMatrix, k: usize) -> Result<f64> {
    let q = h.nrows();
    if k == 0 || k > q {
        return Err(Error::Domain(format!("Ky Fan index k={k} outside 1..={q}")));
    }
    let mut mags: Vec<f64> = hermitian_eigenvalues(h)?.iter().map(|x| x.abs()).collect();
    mags.sort_by(|x, y| y.total_cmp(x));
    Ok(mags.iter().take(k).sum())
}

/// Frobenius inner product `Tr{A† B}`.
pub fn inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `Tr{A B}` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// The two eigenvalue-pairing sums that bracket `tr{AB}` for Hermitian `A`, `B`:
/// `(Σ λ_i(A)↓ λ_i(B)↑, Σ λ_i(A)↓ λ_i(B)↓)`.
pub fn trace_pairing_bounds(a: &CMatrix, b: &CMatrix) -> Result<(f64, f64)> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "trace pairing needs equal shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let la = hermitian_eigenvalues(a)?;
    let lb = hermitian_eigenvalues(b)?;
    let upper = la.iter().zip(lb.iter()).map(|(x, y)| x * y).sum();
    let lower = la.iter().zip(lb.iter().rev()).map(|(x, y)| x * y).sum();
    Ok((lower, upper))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    use rand_distr::StandardNormal;
    CMatrix::from_fn(rows, cols, |_, _| {
        c(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    })
}

/// Haar-random unitary of size `d` (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Complex Gaussian vector (unnormalized).
pub(crate) fn gaussian_vector<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    use rand_distr::StandardNormal;
    CVector::from_fn(len, |_, _| {
        c(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    })
}

/// Polar unitary factor `W V†` of `M = W Σ V†`, the maximizer of `Re Tr{U† M}`.
pub(crate) fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u requested");
    let v_t = svd.v_t.expect("svd v_t requested");
    u * v_t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let v = gaussian_vector(rows * cols, rng);
        CMatrix::from_iterator(rows, cols, v.iter().copied())
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = random_matrix(n, n, rng);
        (&g + g.adjoint()).scale(0.5)
    }

    #[test]
    fn singular_values_examples() {
        let id = CMatrix::identity(2, 2);
        assert_eq!(singular_values(&id).unwrap(), vec![1.0, 1.0]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let anti = real(2, 2, &[0.0, s, -s, 0.0]);
        let sv = singular_values(&anti).unwrap();
        assert_abs_diff_eq!(sv[0], s, epsilon = 1e-14);
        assert_abs_diff_eq!(sv[1], s, epsilon = 1e-14);

        let d = real(3, 3, &[1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 2.0]);
        let sv = singular_values(&d).unwrap();
        for (got, want) in sv.iter().zip([3.0, 2.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn singular_values_rectangular_and_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(2, 5, &mut rng);
        let sv = singular_values(&a).unwrap();
        assert_eq!(sv.len(), 2);
        assert!(sv[0] >= sv[1] && sv[1] >= 0.0);
        let fro2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(sv.iter().map(|x| x * x).sum::<f64>(), fro2, epsilon = 1e-11);
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut a = CMatrix::identity(2, 2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(singular_values(&a), Err(Error::InvalidMatrix(_))));
        assert!(trace_norm(&a).is_err());
    }

    #[test]
    fn eigensystem_examples() {
        let (vals, vecs) = hermitian_eigensystem(&real(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(vals, vec![1.0, 0.0]);
        assert_abs_diff_eq!(vecs[(0, 0)].norm(), 1.0, epsilon = 1e-15);

        let (vals, vecs) = hermitian_eigensystem(&real(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], -1.0, epsilon = 1e-14);
        let top = vecs.column(0);
        assert_abs_diff_eq!((top[0] - top[1]).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eigensystem_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(6, &mut rng);
        let (vals, vecs) = hermitian_eigensystem(&h).unwrap();
        for w in vals.windows(2) {
            assert!(w[0] >= w[1]);
        }
        let mut rebuilt = CMatrix::zeros(6, 6);
        for (i, &l) in vals.iter().enumerate() {
            let v = vecs.column(i);
            let resid = (&h * v - v * c(l, 0.0)).norm();
            assert!(resid <= TOL_EIG, "eigenpair residual {resid}");
            rebuilt += (v * v.adjoint()).scale(l);
        }
        assert!((rebuilt - h).norm() <= 1e-10);
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let a = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eigensystem(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn norms() {
        assert_abs_diff_eq!(trace_norm(&CMatrix::identity(4, 4)).unwrap(), 4.0, epsilon = 1e-13);
        assert_eq!(trace_norm(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
        let d = real(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(ky_fan_norm(&d, 2).unwrap(), 5.0, epsilon = 1e-13);
        assert!(matches!(ky_fan_norm(&d, 0), Err(Error::Domain(_))));
        assert!(matches!(ky_fan_norm(&d, 4), Err(Error::Domain(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(4, 4, &mut rng);
        let sv = singular_values(&a).unwrap();
        let mut partial = 0.0;
        for k in 1..=4 {
            partial += sv[k - 1];
            assert_abs_diff_eq!(ky_fan_norm(&a, k).unwrap(), partial, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(ky_fan_norm(&a, 4).unwrap(), trace_norm(&a).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn ky_fan_hermitian_matches_singular_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_hermitian(5, &mut rng);
        for k in 1..=5 {
            assert_abs_diff_eq!(
                ky_fan_norm_hermitian(&h, k).unwrap(),
                ky_fan_norm(&h, k).unwrap(),
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn trace_pairing_examples() {
        let a = real(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let b = real(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let (lo, hi) = trace_pairing_bounds(&a, &b).unwrap();
        assert_abs_diff_eq!(lo, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hi, 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_of_product(&a, &b).re, 4.0, epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_matrix(3, 3, &mut rng);
        let p = &g * g.adjoint();
        let (_, hi) = trace_pairing_bounds(&p, &p).unwrap();
        let ev = hermitian_eigenvalues(&p).unwrap();
        assert_abs_diff_eq!(hi, ev.iter().map(|x| x * x).sum::<f64>(), epsilon = 1e-10);
        assert_abs_diff_eq!(hi, trace_of_product(&p, &p).re, epsilon = 1e-10);

        assert!(matches!(
            trace_pairing_bounds(&CMatrix::identity(2, 2), &CMatrix::identity(3, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = haar_unitary(5, &mut rng);
        assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn polar_factor_maximizes_real_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_matrix(3, 3, &mut rng);
        let u = polar_unitary(&m);
        let best = trace_of_product(&u.adjoint(), &m).re;
        assert_abs_diff_eq!(best, trace_norm(&m).unwrap(), epsilon = 1e-11);
        for _ in 0..50 {
            let w = haar_unitary(3, &mut rng);
            assert!(trace_of_product(&w.adjoint(), &m).re <= best + 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
                .prop_map(move |v| CMatrix::from_iterator(rows, cols, v.into_iter().map(|(a, b)| c(a, b))))
        }

        proptest! {
            #[test]
            fn ky_fan_triangle_and_monotone(a in matrix_strategy(3, 4), b in matrix_strategy(3, 4)) {
                let sum = &a + &b;
                let mut prev = 0.0;
                for k in 1..=3 {
                    let ka = ky_fan_norm(&a, k).unwrap();
                    prop_assert!(ka >= prev - 1e-14);
                    prev = ka;
                    prop_assert!(ky_fan_norm(&sum, k).unwrap() <= ka + ky_fan_norm(&b, k).unwrap() + 1e-12);
                }
            }

            #[test]
            fn antisymmetric_singular_values_pair_up(v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 10)) {
                let n = 5;
                let mut a = CMatrix::zeros(n, n);
                let mut it = v.into_iter();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let (x, y) = it.next().unwrap();
                        a[(i, j)] = c(x, y);
                        a[(j, i)] = -c(x, y);
                    }
                }
                let sv = singular_values(&a).unwrap();
                // odd size: the smallest is zero, the rest pair up
                prop_assert!(sv[4].abs() < 1e-9);
                prop_assert!((sv[0] - sv[1]).abs() < 1e-9);
                prop_assert!((sv[2] - sv[3]).abs() < 1e-9);
            }

            #[test]
            fn pairing_interval_contains_trace(a in matrix_strategy(5, 5), b in matrix_strategy(5, 5)) {
                let ha = (&a + a.adjoint()).scale(0.5);
                let hb = (&b + b.adjoint()).scale(0.5);
                let (lo, hi) = trace_pairing_bounds(&ha, &hb).unwrap();
                let t = trace_of_product(&ha, &hb).re;
                prop_assert!(lo - 1e-10 <= t && t <= hi + 1e-10);
            }
        }
    }
}
