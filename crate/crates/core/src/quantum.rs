//! Quantum states and GKSL generators.
//!
//! Conventions used everywhere in the crate:
//! * qubit levels are indexed `|1⟩, |2⟩` (rows/columns 0 and 1), with
//!   `σ₊ = |2⟩⟨1|` and `σ₋ = |1⟩⟨2|`;
//! * Bloch coordinates follow `ρ = ½(I + xσ_x + yσ_y + zσ_z)`, so
//!   `ρ₁₂ = (x − iy)/2`;
//! * superoperators act on column-stacked matrices, `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_square, hermitian_eigensystem, hermiticity_defect, matrix_exponential, max_abs,
    ComplexMatrix, ComplexVector, RealMatrix,
};

/// Default structural tolerance for state invariants.
pub const STATE_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `σ_μ` for μ = 0..3 with σ₀ = I.
pub fn pauli(mu: usize) -> ComplexMatrix {
    match mu {
        0 => identity(2),
        1 => pauli_x(),
        2 => pauli_y(),
        3 => pauli_z(),
        _ => panic!("Pauli index {mu} out of range"),
    }
}

/// `|2⟩⟨1|`
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

/// `|1⟩⟨2|`
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().sum()
}

/// Column-stacking vectorisation.
pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    // nalgebra storage is column-major
    ComplexVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &ComplexVector, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

/// Hilbert–Schmidt orthonormal basis of the N×N Hermitian matrices.
///
/// Order: the N diagonal units `|k⟩⟨k|`, then for each `j < k` the pair
/// `(|j⟩⟨k| + |k⟩⟨j|)/√2` and `(−i|j⟩⟨k| + i|k⟩⟨j|)/√2`.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(k, k)] = ONE;
        basis.push(m);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = ComplexMatrix::zeros(n, n);
            sym[(j, k)] = Complex64::new(r, 0.0);
            sym[(k, j)] = Complex64::new(r, 0.0);
            basis.push(sym);
            let mut asym = ComplexMatrix::zeros(n, n);
            asym[(j, k)] = Complex64::new(0.0, -r);
            asym[(k, j)] = Complex64::new(0.0, r);
            basis.push(asym);
        }
    }
    basis
}

/// Real coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coordinates(a: &ComplexMatrix) -> Vec<f64> {
    hermitian_basis(a.nrows()).iter().map(|b| (b * a).trace().re).collect()
}

pub fn from_hermitian_coordinates(coords: &[f64], n: usize) -> ComplexMatrix {
    hermitian_basis(n)
        .iter()
        .zip(coords)
        .fold(ComplexMatrix::zeros(n, n), |acc, (b, &c)| acc + b * Complex64::new(c, 0.0))
}

/// A Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, STATE_TOL, STATE_TOL)
    }

    /// Validates against separate structural (Hermiticity, trace) and positivity tolerances.
    pub fn with_tolerance(m: ComplexMatrix, tol: f64, positivity_tol: f64) -> Result<Self> {
        ensure_square(&m)?;
        ensure_finite(&m, "density matrix")?;
        let deviation = hermiticity_defect(&m);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = trace(&m);
        if (tr - ONE).norm() > tol {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        let min_eigenvalue = hermitian_eigensystem(&m, tol)?.min();
        if min_eigenvalue < -positivity_tol {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let sym = (&m + m.adjoint()).scale(0.5);
        Ok(Self(sym))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(identity(n).unscale(n as f64))
    }

    /// `|ψ⟩⟨ψ|` for the normalised input vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NonFinite("state vector"));
        }
        let psi = psi.unscale(norm);
        Ok(Self(&psi * psi.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigensystem(&self.0, 1e-8).map(|e| e.min()).unwrap_or(f64::NAN)
    }

    /// Convex combination `λ·self + (1 − λ)·other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.dim() != other.dim() || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}-level states, λ in [0,1]", self.dim()),
                found: format!("{}-level, λ = {lambda}", other.dim()),
            });
        }
        Ok(Self(self.0.scale(lambda) + other.0.scale(1.0 - lambda)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("Bloch vector"));
        }
        if b.norm() > 1.0 + 1e-12 {
            return Err(Error::BallViolation { norm: b.norm() });
        }
        Ok(b)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// `½(I + xσ_x + yσ_y + zσ_z)`
pub fn bloch_to_density(b: &BlochVector) -> Result<DensityMatrix> {
    let b = BlochVector::new(b.x, b.y, b.z)?;
    Ok(DensityMatrix(bloch_matrix(1.0, b.x, b.y, b.z)))
}

/// `½(t·I + xσ_x + yσ_y + zσ_z)` without any validation.
pub(crate) fn bloch_matrix(t: f64, x: f64, y: f64, z: f64) -> ComplexMatrix {
    let c = |v: f64| Complex64::new(v, 0.0);
    (identity(2) * c(t) + pauli_x() * c(x) + pauli_y() * c(y) + pauli_z() * c(z)) * c(0.5)
}

/// Inverse of [`bloch_to_density`]: `x = ρ₁₂ + ρ₂₁`, `y = i(ρ₁₂ − ρ₂₁)`, `z = ρ₁₁ − ρ₂₂`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, found: rho.dim() });
    }
    let m = rho.matrix();
    let x = (m[(0, 1)] + m[(1, 0)]).re;
    let y = (I * (m[(0, 1)] - m[(1, 0)])).re;
    let z = (m[(0, 0)] - m[(1, 1)]).re;
    Ok(BlochVector { x, y, z })
}

/// A time-independent GKSL generator
/// `L(X) = −i[H, X] + Σ_k (V_k X V_k† − ½{V_k†V_k, X})`.
///
/// For a single jump operator `V` on a qubit the population equations read
/// `ρ̇₁₁ = −γρ₁₁ + γρ₂₂ + κρ₁₂ + κ̄ρ₂₁` with `γ = |V₁₂|²` when `V₂₁ = 0`;
/// the coherence coupling `κ` is not computed from a closed form here, the
/// lift reads the corresponding coefficients directly off the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GkslGenerator {
    hamiltonian: ComplexMatrix,
    jumps: Vec<ComplexMatrix>,
}

impl GkslGenerator {
    pub fn new(hamiltonian: ComplexMatrix, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        let n = ensure_square(&hamiltonian)?;
        ensure_finite(&hamiltonian, "Hamiltonian")?;
        let deviation = hermiticity_defect(&hamiltonian);
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        for v in &jumps {
            if v.nrows() != n || v.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: format!("{n}x{n} jump operator"),
                    found: format!("{}x{}", v.nrows(), v.ncols()),
                });
            }
            ensure_finite(v, "jump operator")?;
        }
        let hamiltonian = (&hamiltonian + hamiltonian.adjoint()).scale(0.5);
        Ok(Self { hamiltonian, jumps })
    }

    pub fn hamiltonian_only(hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn zero(n: usize) -> Self {
        Self { hamiltonian: ComplexMatrix::zeros(n, n), jumps: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    /// The generator with `H ↦ −H` and the same jumps.
    pub fn time_reversed_hamiltonian(&self) -> Self {
        Self { hamiltonian: -self.hamiltonian.clone(), jumps: self.jumps.clone() }
    }

    /// Applies `L` to an arbitrary (not necessarily Hermitian) N×N matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", x.nrows(), x.ncols()),
            });
        }
        let mut out = commutator(&self.hamiltonian, x) * (-I);
        for v in &self.jumps {
            let vd = v.adjoint();
            let vdv = &vd * v;
            out += v * x * &vd - (&vdv * x + x * &vdv) * Complex64::new(0.5, 0.0);
        }
        Ok(out)
    }
}

/// `L(ρ)`; the result is Hermitian and traceless.
pub fn apply_gksl(generator: &GkslGenerator, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    generator.apply(rho.matrix())
}

/// Matrix of a GKSL generator acting on column-stacked N×N matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&(&self.matrix * vectorize(x)), self.dim)
    }

    /// `e^{tL}` as an N²×N² matrix.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::BadTime(t));
        }
        matrix_exponential(&self.matrix, t)
    }

    /// Largest `|Tr L(B)|` over the matrix units `B = |i⟩⟨j|`.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim;
        (0..n * n)
            .map(|col| (0..n).map(|k| self.matrix[(k * n + k, col)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }
}

pub fn liouvillian_matrix(generator: &GkslGenerator) -> Liouvillian {
    let n = generator.dim();
    let id = identity(n);
    let h = generator.hamiltonian();
    let mut m = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I);
    for v in generator.jumps() {
        let vdv = v.adjoint() * v;
        m += v.conjugate().kronecker(v)
            - (id.kronecker(&vdv) + vdv.transpose().kronecker(&id)) * Complex64::new(0.5, 0.0);
    }
    Liouvillian { dim: n, matrix: m }
}

/// Representation of `L` on the real Hermitian coordinates of [`hermitian_basis`]:
/// entry `(a, b)` is `Tr[B_a L(B_b)]`.
pub fn hermitian_superoperator(generator: &GkslGenerator) -> RealMatrix {
    let n = generator.dim();
    let basis = hermitian_basis(n);
    let images: Vec<ComplexMatrix> =
        basis.iter().map(|b| generator.apply(b).expect("basis has generator dimension")).collect();
    RealMatrix::from_fn(n * n, n * n, |a, b| (&basis[a] * &images[b]).trace().re)
}

/// Positivity threshold below which an evolved state is reported as a numerical failure.
pub const POSITIVITY_FAILURE: f64 = 1e-8;

/// `ρ(t) = e^{tL} ρ₀`.
pub fn evolve_density(generator: &GkslGenerator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let propagator = liouvillian_matrix(generator).propagator(t)?;
    evolve_with_propagator(&propagator, rho0)
}

/// Applies a precomputed `e^{tL}` and re-validates the output.
pub fn evolve_with_propagator(propagator: &ComplexMatrix, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho0.dim();
    if propagator.nrows() != n * n {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} propagator", n * n, n * n),
            found: format!("{}x{}", propagator.nrows(), propagator.ncols()),
        });
    }
    let out = unvectorize(&(propagator * vectorize(rho0.matrix())), n);
    let out = (&out + out.adjoint()).scale(0.5);
    let min_eigenvalue = hermitian_eigensystem(&out, 1e-8)?.min();
    if min_eigenvalue < -POSITIVITY_FAILURE {
        return Err(Error::PositivityLost { min_eigenvalue });
    }
    DensityMatrix::with_tolerance(out, 1e-9, 1e-9)
}

fn check_orthonormal(basis: &[ComplexVector], n: usize, tol: f64) -> Result<()> {
    if basis.len() != n || basis.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} vectors of length {n}"),
            found: format!("{} vectors", basis.len()),
        });
    }
    let mut deviation: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            deviation = deviation.max((a.dotc(b) - target).norm());
        }
    }
    if deviation > tol {
        return Err(Error::BasisNotOrthonormal { deviation });
    }
    Ok(())
}

fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// `M_ij = Tr[P_i L(P_j)]` with `P_i = |e_i⟩⟨e_i|`; always a Kolmogorov generator.
pub fn diagonal_projection_generator(
    generator: &GkslGenerator,
    basis: &[ComplexVector],
    tol: f64,
) -> Result<RealMatrix> {
    let n = generator.dim();
    check_orthonormal(basis, n, tol)?;
    let images: Vec<ComplexMatrix> =
        basis.iter().map(|e| generator.apply(&projector(e))).collect::<Result<_>>()?;
    let m = RealMatrix::from_fn(n, n, |i, j| basis[i].dotc(&(&images[j] * &basis[i])).re);
    debug_assert!(crate::classical::is_kolmogorov(&m, 1e-9 * max_abs(&m).max(1.0)).verdict);
    Ok(m)
}

/// `T_ij(t) = Tr[P_i e^{tL}(P_j)]`; always a stochastic matrix.
pub fn diagonal_projection_map(
    generator: &GkslGenerator,
    basis: &[ComplexVector],
    t: f64,
    tol: f64,
) -> Result<RealMatrix> {
    let n = generator.dim();
    check_orthonormal(basis, n, tol)?;
    let propagator = liouvillian_matrix(generator).propagator(t)?;
    let images: Vec<ComplexMatrix> =
        basis.iter().map(|e| unvectorize(&(&propagator * vectorize(&projector(e))), n)).collect();
    Ok(RealMatrix::from_fn(n, n, |i, j| basis[i].dotc(&(&images[j] * &basis[i])).re))
}

/// The computational basis `|1⟩, …, |N⟩`.
pub fn computational_basis(n: usize) -> Vec<ComplexVector> {
    (0..n).map(|k| DVector::from_fn(n, |i, _| if i == k { ONE } else { ZERO })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::sampling;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bloch_examples() {
        let center = bloch_to_density(&BlochVector::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(max_abs(&(center.matrix() - identity(2).scale(0.5))) < 1e-15);
        let up = bloch_to_density(&BlochVector::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(max_abs(&(up.matrix() - ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(0.0)])))) < 1e-15);
        let xplus = bloch_to_density(&BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(max_abs(&(xplus.matrix() - ComplexMatrix::from_element(2, 2, c(0.5)))) < 1e-15);
    }

    #[test]
    fn bloch_round_trip_and_convention() {
        let b = BlochVector::new(0.3, -0.5, 0.2).unwrap();
        let rho = bloch_to_density(&b).unwrap();
        // ρ₁₂ = (x − iy)/2
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].re, 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].im, 0.25, epsilon = 1e-15);
        let back = density_to_bloch(&rho).unwrap();
        assert_abs_diff_eq!(back.x, b.x, epsilon = 1e-15);
        assert_abs_diff_eq!(back.y, b.y, epsilon = 1e-15);
        assert_abs_diff_eq!(back.z, b.z, epsilon = 1e-15);
    }

    #[test]
    fn bloch_errors() {
        assert!(matches!(BlochVector::new(1.0, 1.0, 0.0), Err(Error::BallViolation { .. })));
        let bad = BlochVector { x: 0.9, y: 0.9, z: 0.0 };
        assert!(matches!(bloch_to_density(&bad), Err(Error::BallViolation { .. })));
        assert!(matches!(
            density_to_bloch(&DensityMatrix::maximally_mixed(3)),
            Err(Error::WrongDimension { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let not_psd = bloch_matrix(1.0, 1.0, 1.0, 0.0);
        assert!(matches!(DensityMatrix::new(not_psd), Err(Error::NotPositive { .. })));
        assert!(matches!(DensityMatrix::new(identity(2)), Err(Error::TraceNotOne { .. })));
        assert!(matches!(DensityMatrix::new(sigma_plus()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn commuting_hamiltonian_gives_zero() {
        let h = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-0.3)]));
        let l = GkslGenerator::hamiltonian_only(h).unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(0.7), c(0.3)]))).unwrap();
        assert!(max_abs(&apply_gksl(&l, &rho).unwrap()) < 1e-15);
    }

    #[test]
    fn random_unitary_preset_matrix_representation() {
        let (g1, g2, g3) = (0.3, 0.7, 1.1);
        let l = presets::example3_generator(g1, g2, g3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = sampling::random_density(2, &mut rng);
        let r = rho.matrix();
        let out = apply_gksl(&l, &rho).unwrap();
        let expected_11 = (r[(1, 1)] - r[(0, 0)]) * (g1 + g2);
        let expected_12 = -r[(0, 1)] * (g1 + g2 + 2.0 * g3) + r[(1, 0)] * (g1 - g2);
        let expected_21 = -r[(1, 0)] * (g1 + g2 + 2.0 * g3) + r[(0, 1)] * (g1 - g2);
        let expected_22 = (r[(0, 0)] - r[(1, 1)]) * (g1 + g2);
        assert!((out[(0, 0)] - expected_11).norm() < 1e-14);
        assert!((out[(0, 1)] - expected_12).norm() < 1e-14);
        assert!((out[(1, 0)] - expected_21).norm() < 1e-14);
        assert!((out[(1, 1)] - expected_22).norm() < 1e-14);
    }

    #[test]
    fn single_jump_population_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let mut v = sampling::random_complex_matrix(2, &mut rng);
            v[(1, 0)] = ZERO;
            let gamma = v[(0, 1)].norm_sqr();
            let l = GkslGenerator::new(ComplexMatrix::zeros(2, 2), vec![v]).unwrap();
            // upper-triangular V only moves population 2 -> 1, at rate |V_12|^2
            let d = |p: f64| DensityMatrix::new(ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(p), c(1.0 - p)]))).unwrap();
            for p in [0.0, 0.25, 1.0] {
                let out = apply_gksl(&l, &d(p)).unwrap();
                assert_abs_diff_eq!(out[(0, 0)].re, gamma * (1.0 - p), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn gksl_output_hermitian_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..100 {
            let n = 2 + i % 3;
            let l = sampling::random_gksl(n, 1 + i % 3, 1.0, &mut rng);
            let rho = sampling::random_density(n, &mut rng);
            let out = apply_gksl(&l, &rho).unwrap();
            assert!(hermiticity_defect(&out) < 1e-12);
            assert!(trace(&out).norm() < 1e-12);
        }
    }

    #[test]
    fn liouvillian_reproduces_direct_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(max_abs(liouvillian_matrix(&GkslGenerator::zero(3)).matrix()) == 0.0);
        for n in [2, 3] {
            let l = sampling::random_gksl(n, 2, 1.0, &mut rng);
            let liou = liouvillian_matrix(&l);
            assert!(liou.trace_defect() < 1e-12);
            for _ in 0..5 {
                let x = sampling::random_complex_matrix(n, &mut rng);
                assert!(max_abs(&(liou.apply(&x) - l.apply(&x).unwrap())) < 1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_bloch_equations_by_finite_difference() {
        // H = ωσ_x: ẋ = 0, ẏ = −2ωz, ż = 2ωy
        let omega = 0.8;
        let l = presets::example1_generator(omega);
        let liou = liouvillian_matrix(&l);
        let h = 1e-6;
        let bloch_of = |m: &ComplexMatrix| {
            let x = (m[(0, 1)] + m[(1, 0)]).re;
            let y = (I * (m[(0, 1)] - m[(1, 0)])).re;
            let z = (m[(0, 0)] - m[(1, 1)]).re;
            [x, y, z]
        };
        for (x, y, z) in [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (0.2, -0.4, 0.5)] {
            let rho = bloch_matrix(1.0, x, y, z);
            let plus = (identity(4) + liou.matrix() * c(h)) * vectorize(&rho);
            let minus = (identity(4) - liou.matrix() * c(h)) * vectorize(&rho);
            let dp = bloch_of(&unvectorize(&plus, 2));
            let dm = bloch_of(&unvectorize(&minus, 2));
            let deriv: Vec<f64> = (0..3).map(|k| (dp[k] - dm[k]) / (2.0 * h)).collect();
            assert_abs_diff_eq!(deriv[0], 0.0, epsilon = 1e-8);
            assert_abs_diff_eq!(deriv[1], -2.0 * omega * z, epsilon = 1e-8);
            assert_abs_diff_eq!(deriv[2], 2.0 * omega * y, epsilon = 1e-8);
        }
    }

    #[test]
    fn random_unitary_preset_decay_rates() {
        // Bloch components decay at 2(γ₂+γ₃), 2(γ₁+γ₃), 2(γ₁+γ₂)
        for (g1, g2, g3) in [(1.0, 1.0, 1.0), (0.2, 0.5, 1.3)] {
            let liou = liouvillian_matrix(&presets::example3_generator(g1, g2, g3));
            let rates = [2.0 * (g2 + g3), 2.0 * (g1 + g3), 2.0 * (g1 + g2)];
            for (k, rate) in rates.iter().enumerate() {
                let s = pauli(k + 1);
                let out = liou.apply(&s);
                assert!(max_abs(&(out + s.scale(*rate))) < 1e-13);
            }
            assert!(max_abs(&liou.apply(&identity(2))) < 1e-14);
        }
    }

    #[test]
    fn evolution_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [2, 3] {
            let l = sampling::random_gksl(n, 2, 1.0, &mut rng);
            let rho = sampling::random_density(n, &mut rng);
            assert!(max_abs(&(evolve_density(&l, &rho, 0.0).unwrap().matrix() - rho.matrix())) < 1e-15);
            for t in [0.1, 1.0, 10.0] {
                let out = evolve_density(&l, &rho, t).unwrap();
                assert!((trace(out.matrix()) - ONE).norm() < 1e-10);
                assert!(out.min_eigenvalue() > -1e-9);
            }
            let (s, t) = (0.4, 0.9);
            let direct = evolve_density(&l, &rho, s + t).unwrap();
            let composed = evolve_density(&l, &evolve_density(&l, &rho, s).unwrap(), t).unwrap();
            assert!(max_abs(&(direct.matrix() - composed.matrix())) < 1e-9);
        }
        assert!(matches!(evolve_density(&GkslGenerator::zero(2), &DensityMatrix::maximally_mixed(2), -1.0), Err(Error::BadTime(_))));
    }

    #[test]
    fn hamiltonian_evolution_preserves_purity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = sampling::random_hermitian(3, &mut rng);
        let l = GkslGenerator::hamiltonian_only(h).unwrap();
        let rho = sampling::random_pure(3, &mut rng);
        for t in [0.5, 3.0] {
            assert_abs_diff_eq!(evolve_density(&l, &rho, t).unwrap().purity(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn diagonal_projection_examples() {
        let basis = computational_basis(2);
        let h = GkslGenerator::hamiltonian_only(pauli_x().scale(0.7)).unwrap();
        assert!(max_abs(&diagonal_projection_generator(&h, &basis, 1e-10).unwrap()) < 1e-15);

        let (g1, g2) = (0.4, 1.3);
        let l = presets::example2_generator(0.9, g1, g2, 0.6);
        let m = diagonal_projection_generator(&l, &basis, 1e-10).unwrap();
        let expected = RealMatrix::from_row_slice(2, 2, &[-g1, g2, g1, -g2]);
        assert!(max_abs(&(m - expected)) < 1e-14);

        let lm = GkslGenerator::new(ComplexMatrix::zeros(2, 2), vec![sigma_minus()]).unwrap();
        let m = diagonal_projection_generator(&lm, &basis, 1e-10).unwrap();
        assert!(max_abs(&(m - RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]))) < 1e-15);

        let skew = vec![basis[0].clone(), (basis[0].clone() + basis[1].clone()).unscale(2f64.sqrt())];
        assert!(matches!(diagonal_projection_generator(&lm, &skew, 1e-10), Err(Error::BasisNotOrthonormal { .. })));
    }

    #[test]
    fn diagonal_projection_map_examples() {
        let basis = computational_basis(2);
        let (g1, g2, g3) = (0.5, 0.25, 2.0);
        let l = presets::example3_generator(g1, g2, g3);
        assert!(max_abs(&(diagonal_projection_map(&l, &basis, 0.0, 1e-10).unwrap() - RealMatrix::identity(2, 2))) < 1e-15);
        let m = diagonal_projection_generator(&l, &basis, 1e-10).unwrap();
        let gz = g1 + g2;
        assert!(max_abs(&(&m - RealMatrix::from_row_slice(2, 2, &[-gz, gz, gz, -gz]))) < 1e-14);
        for t in [0.1, 0.8, 3.0] {
            let tmap = diagonal_projection_map(&l, &basis, t, 1e-10).unwrap();
            let via_generator = matrix_exponential(&m, t).unwrap();
            assert!(max_abs(&(tmap - via_generator)) < 1e-12);
        }
    }
}
