//! Seeded random states, generators and rate matrices for property sweeps,
//! benchmarks and the CLI's consistency probes.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::classical::TransitionRates;
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, ComplexVector, RealMatrix};
use crate::quantum::{DensityMatrix, GkslGenerator};
use crate::tomography::{pauli_quorum, MeasurementBasis, Quorum};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex_matrix(n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Traceless Hermitian matrix rescaled to Frobenius norm `norm`.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> ComplexMatrix {
    let mut h = random_hermitian(n, rng);
    let shift = h.trace() / Complex64::new(n as f64, 0.0);
    for k in 0..n {
        h[(k, k)] -= shift;
    }
    let f = h.norm();
    h * Complex64::new(norm / f, 0.0)
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let psi: ComplexVector = DVector::from_fn(n, |_, _| complex_normal(rng));
    DensityMatrix::pure(&psi).expect("Gaussian vector is nonzero")
}

/// Hilbert–Schmidt random mixed state `GG†/Tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let g = random_complex_matrix(n, rng);
    let w = &g * g.adjoint();
    let tr = w.trace();
    DensityMatrix::new(w / tr).expect("Wishart matrix is a valid state")
}

/// Mixed state whose smallest eigenvalue is at least `floor` (requires `floor·n < 1`).
pub fn random_density_with_floor<R: Rng + ?Sized>(n: usize, floor: f64, rng: &mut R) -> DensityMatrix {
    let rho = random_density(n, rng);
    let lambda = 1.0 - floor * n as f64;
    rho.mix(&DensityMatrix::maximally_mixed(n), lambda).expect("same dimension")
}

/// Random GKSL generator with `jumps` Gaussian jump operators scaled by `scale`.
pub fn random_gksl<R: Rng + ?Sized>(n: usize, jumps: usize, scale: f64, rng: &mut R) -> GkslGenerator {
    let h = random_hermitian(n, rng) * Complex64::new(scale, 0.0);
    let vs = (0..jumps).map(|_| random_complex_matrix(n, rng) * Complex64::new(scale, 0.0)).collect();
    GkslGenerator::new(h, vs).expect("symmetrised Hamiltonian")
}

/// Rates drawn uniformly from `[0, max_rate)`; diagonal left at zero.
pub fn random_rates<R: Rng + ?Sized>(n: usize, max_rate: f64, rng: &mut R) -> TransitionRates {
    let m = RealMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { rng.random_range(0.0..max_rate) });
    TransitionRates::new(m).expect("nonnegative rates")
}

/// Haar-like random orthonormal basis from the eigenvectors of a random Hermitian matrix.
pub fn random_basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MeasurementBasis {
    let h = random_hermitian(n, rng);
    let e = hermitian_eigensystem(&h, 1e-12).expect("Hermitian by construction");
    MeasurementBasis::new(e.eigenvectors.column_iter().map(|c| c.into_owned()).collect())
        .expect("eigenvectors are orthonormal")
}

/// Random positive weights summing to one, each at least `0.05 / count`.
pub fn random_weights<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // absorb rounding so the sum is 1 to machine precision
    let drift = 1.0 - w.iter().sum::<f64>();
    w[0] += drift;
    w
}

/// Quorum of `sectors` random bases with random weights.
pub fn random_quorum<R: Rng + ?Sized>(n: usize, sectors: usize, rng: &mut R) -> Quorum {
    let weights = random_weights(sectors, rng);
    Quorum::from_bases(weights.into_iter().map(|w| (random_basis(n, rng), w)).collect()).expect("valid weights")
}

/// Qubit σ_x, σ_y, σ_z quorum with random weights.
pub fn random_pauli_quorum<R: Rng + ?Sized>(rng: &mut R) -> Quorum {
    let w = random_weights(3, rng);
    pauli_quorum(w[0], w[1], w[2]).expect("valid weights")
}
