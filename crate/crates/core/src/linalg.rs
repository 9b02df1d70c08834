//! Dense kernels for the small matrices used throughout the crate.
//!
//! Everything here works on `nalgebra` dynamic matrices. The algorithms
//! themselves (cyclic Jacobi, scaled Taylor exponential, normal-equation
//! least squares) are implemented locally so that accuracy and failure modes
//! are fully under our control at the dimensions we care about (N² ≤ ~36).

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;
pub type ComplexVector = DVector<Complex64>;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-13;
const TAYLOR_SCALE_TARGET: f64 = 0.5;
const TAYLOR_MAX_TERMS: usize = 40;
/// Relative threshold on Gram eigenvalues below which a column space is treated as degenerate.
pub const RANK_THRESHOLD: f64 = 1e-12;

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix (columns).
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `V diag(λ) V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        scaled * v.adjoint()
    }
}

pub fn ensure_square<T: nalgebra::Scalar>(a: &DMatrix<T>) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

pub fn ensure_finite<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, what: &'static str) -> Result<()> {
    if a.iter().all(|x| x.clone().is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Largest entrywise modulus.
pub fn max_abs<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|x| x.clone().modulus()).fold(0.0, f64::max)
}

/// Induced 1-norm: maximum absolute column sum.
pub fn norm1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn to_complex(a: &RealMatrix) -> ComplexMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input must be Hermitian to within `tol` (max-entry norm); it is
/// symmetrised before iterating.
pub fn hermitian_eigensystem(a: &ComplexMatrix, tol: f64) -> Result<Eigensystem> {
    let n = ensure_square(a)?;
    ensure_finite(a, "eigensolver input")?;
    let deviation = hermiticity_defect(a);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let mut m = (a + a.adjoint()).scale(0.5);
    let mut v = ComplexMatrix::identity(n, n);
    let scale = m.norm().max(f64::MIN_POSITIVE);

    let off_norm = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&m) > JACOBI_OFF_TOL * scale {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let theta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = D R with D = diag(1, .., conj(phase) at q, ..)
                let j_pp = Complex64::new(c, 0.0);
                let j_pq = Complex64::new(s, 0.0);
                let j_qp = -phase.conj() * s;
                let j_qq = phase.conj() * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * j_pp + mkq * j_qp;
                    m[(k, q)] = mkp * j_pq + mkq * j_qq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = j_pp.conj() * mpk + j_qp.conj() * mqk;
                    m[(q, k)] = j_pq.conj() * mpk + j_qq.conj() * mqk;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigensystem { eigenvalues, eigenvectors })
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &RealMatrix, tol: f64) -> Result<Vec<f64>> {
    Ok(hermitian_eigensystem(&to_complex(a), tol)?.eigenvalues)
}

/// `exp(t A)` by scaling and squaring around a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is below 0.5, the series
/// is summed until the next term no longer changes the result, and the result
/// is squared `s` times.
pub fn matrix_exponential<T>(a: &DMatrix<T>, t: f64) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    let n = ensure_square(a)?;
    ensure_finite(a, "matrix exponential input")?;
    if !t.is_finite() {
        return Err(Error::NonFinite("matrix exponential time"));
    }
    let mut scaled = a * T::from_real(t);
    let norm = norm1(&scaled);
    let squarings = if norm > TAYLOR_SCALE_TARGET {
        (norm / TAYLOR_SCALE_TARGET).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 0 {
        scaled *= T::from_real(2f64.powi(-squarings));
    }

    let mut sum = DMatrix::<T>::identity(n, n);
    let mut term = DMatrix::<T>::identity(n, n);
    for k in 1..=TAYLOR_MAX_TERMS {
        term = &term * &scaled * T::from_real(1.0 / k as f64);
        sum += &term;
        if max_abs(&term) <= f64::EPSILON * 1e-3 * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    ensure_finite(&sum, "matrix exponential output")?;
    Ok(sum)
}

/// Gram matrix `AᵀA` together with its inverse, after checking column rank.
fn inverse_gram(a: &RealMatrix) -> Result<RealMatrix> {
    let gram = a.transpose() * a;
    let eig = hermitian_eigensystem(&to_complex(&gram), 1e-12 * max_abs(&gram).max(1.0))?;
    let largest = eig.max();
    let smallest = eig.min();
    if largest <= 0.0 || smallest < RANK_THRESHOLD * largest {
        let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
        return Err(Error::RankDeficient { ratio });
    }
    let n = gram.nrows();
    let v = eig.eigenvectors.map(|z| z.re);
    let mut inv = RealMatrix::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let col = v.column(k);
        inv += (col * col.transpose()) / l;
    }
    Ok(inv)
}

/// Moore–Penrose pseudoinverse `(AᵀA)⁻¹Aᵀ` of a full-column-rank matrix.
pub fn pseudoinverse(a: &RealMatrix) -> Result<RealMatrix> {
    if a.nrows() < a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: format!("rows >= {}", a.ncols()),
            found: format!("{} rows", a.nrows()),
        });
    }
    ensure_finite(a, "least-squares matrix")?;
    Ok(inverse_gram(a)? * a.transpose())
}

/// `argmin ‖Ax − b‖₂` for a tall full-column-rank `A`, with one step of
/// iterative refinement on the normal equations.
pub fn least_squares_solve(a: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: format!("rhs of length {}", a.nrows()),
            found: format!("{}", b.len()),
        });
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("least-squares rhs"));
    }
    let pinv = pseudoinverse(a)?;
    let b = DVector::from_column_slice(b);
    let mut x = &pinv * &b;
    let r = &b - a * &x;
    x += &pinv * r;
    Ok(x.iter().copied().collect())
}

/// Numerical rank from the spectrum of the Gram matrix.
pub fn rank(a: &RealMatrix) -> usize {
    let gram = a.transpose() * a;
    let Ok(eigs) = symmetric_eigenvalues(&gram, 1e-10 * max_abs(&gram).max(1.0)) else {
        return 0;
    };
    let largest = eigs.last().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return 0;
    }
    eigs.iter().filter(|&&l| l > RANK_THRESHOLD * largest).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&g + g.adjoint()).scale(0.5)
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eigensystem(&ComplexMatrix::identity(2, 2), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let sx = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let e = hermitian_eigensystem(&sx, 1e-12).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn random_hermitian_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 4, 6, 9] {
            let a = random_hermitian(n, &mut rng);
            let e = hermitian_eigensystem(&a, 1e-12).unwrap();
            let scale = a.norm();
            for (k, &l) in e.eigenvalues.iter().enumerate() {
                let v = e.eigenvectors.column(k);
                let r = &a * v - v * c(l, 0.0);
                assert!(r.norm() <= 1e-10 * scale, "residual {}", r.norm());
            }
            let u = &e.eigenvectors;
            assert!(max_abs(&(u.adjoint() * u - ComplexMatrix::identity(n, n))) < 1e-10);
            assert!(max_abs(&(e.reconstruct() - &a)) < 1e-9);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(hermitian_eigensystem(&a, 1e-10), Err(Error::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigensystem(&r, 1e-10), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn exponential_at_zero_is_identity() {
        let a = RealMatrix::from_row_slice(2, 2, &[3.0, -1.0, 2.0, 7.0]);
        assert_eq!(matrix_exponential(&a, 0.0).unwrap(), RealMatrix::identity(2, 2));
    }

    #[test]
    fn nilpotent_exponential() {
        let a = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        for t in [0.3, 1.0, 4.5, -2.0] {
            let e = matrix_exponential(&a, t).unwrap();
            let expected = RealMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]);
            assert!(max_abs(&(e - expected)) < 1e-13);
        }
    }

    #[test]
    fn flip_generator_exponential() {
        for (gamma, t) in [(1.0, 1.0), (0.3, 2.5), (4.0, 0.7)] {
            let a = RealMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]) * gamma;
            let d = (-2.0f64 * gamma * t).exp();
            let expected = RealMatrix::from_row_slice(2, 2, &[1.0 + d, 1.0 - d, 1.0 - d, 1.0 + d]) * 0.5;
            assert!(max_abs(&(matrix_exponential(&a, t).unwrap() - expected)) < 1e-12);
        }
    }

    #[test]
    fn exponential_matches_spectral_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 4, 6] {
            let h = random_hermitian(n, &mut rng) * c(3.0, 0.0);
            let e = hermitian_eigensystem(&h, 1e-12).unwrap();
            for t in [0.1, 1.0, 2.0] {
                let exact = {
                    let mut s = e.eigenvectors.clone();
                    for (j, &l) in e.eigenvalues.iter().enumerate() {
                        s.column_mut(j).scale_mut((l * t).exp());
                    }
                    s * e.eigenvectors.adjoint()
                };
                let got = matrix_exponential(&h, t).unwrap();
                let rel = max_abs(&(got - &exact)) / max_abs(&exact);
                assert!(rel < 1e-10, "relative error {rel}");
                // unitary case: exp(-iHt)
                let u = matrix_exponential(&(&h * c(0.0, -1.0)), t).unwrap();
                assert!(max_abs(&(u.adjoint() * &u - ComplexMatrix::identity(n, n))) < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = RealMatrix::from_fn(5, 5, |_, _| rng.random_range(-2.0..2.0));
        let times = [0.1, 0.7, 1.3];
        for &s in &times {
            for &t in &times {
                let lhs = matrix_exponential(&a, s + t).unwrap();
                let rhs = matrix_exponential(&a, s).unwrap() * matrix_exponential(&a, t).unwrap();
                assert!(max_abs(&(&lhs - rhs)) <= 1e-9 * max_abs(&lhs).max(1.0));
            }
        }
    }

    #[test]
    fn exponential_rejects_bad_input() {
        let a = RealMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matrix_exponential(&a, 1.0).is_err());
        assert!(matrix_exponential(&RealMatrix::identity(2, 2), f64::INFINITY).is_err());
        assert!(matrix_exponential(&RealMatrix::zeros(2, 3), 1.0).is_err());
    }

    #[test]
    fn least_squares_examples() {
        let a = RealMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let x = least_squares_solve(&a, &[1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(x[0], 2.0, epsilon = 1e-14);

        let a = RealMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let x = least_squares_solve(&a, &[3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(x[0], 0.8, epsilon = 1e-13);
        assert_abs_diff_eq!(x[1], 1.4, epsilon = 1e-13);
    }

    #[test]
    fn least_squares_recovers_consistent_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = RealMatrix::from_fn(6, 4, |_, _| rng.random_range(-1.0..1.0));
        let x0 = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let b = &a * &x0;
        let x = least_squares_solve(&a, b.as_slice()).unwrap();
        for (got, want) in x.iter().zip(x0.iter()) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-10);
        }
    }

    #[test]
    fn least_squares_rank_deficient() {
        let a = RealMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert!(matches!(least_squares_solve(&a, &[1.0, 2.0, 3.0]), Err(Error::RankDeficient { .. })));
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn zero_column_sum_exponential_is_column_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            let mut m = RealMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { rng.random_range(0.0..2.0) });
            for j in 0..n {
                let s: f64 = m.column(j).sum();
                m[(j, j)] = -s;
            }
            let e = matrix_exponential(&m, 1.7).unwrap();
            for j in 0..n {
                assert_abs_diff_eq!(e.column(j).sum(), 1.0, epsilon = 1e-12);
            }
        }
    }
}
