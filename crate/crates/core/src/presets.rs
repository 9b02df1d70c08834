//! Named qubit models with closed-form simplex generators.
//!
//! * `example1(ω)`: coherent precession, `H = ωσ_x`, no dissipation.
//! * `example2(ω, γ₁, γ₂, γ₃)`: `H = (ω/2)σ_z` with jumps `√γ₁ σ₊`,
//!   `√γ₂ σ₋` and dephasing `√(γ₃/2) σ_z`.
//! * `example3(γ₁, γ₂, γ₃)`: Pauli (random-unitary) channel generator with
//!   jumps `√γ_k σ_k`.
//!
//! All closed forms below are for the σ_x, σ_y, σ_z quorum with weights
//! `(π_x, π_y, π_z)` and the sector-local lift.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix};
use crate::quantum::{pauli, pauli_x, pauli_z, sigma_minus, sigma_plus, GkslGenerator};
use crate::tomography::{pauli_quorum, Quorum};

fn scaled(m: ComplexMatrix, s: f64) -> ComplexMatrix {
    m * Complex64::new(s, 0.0)
}

fn check_rates(gammas: [f64; 3]) -> Result<()> {
    for (k, g) in gammas.iter().enumerate() {
        if !(*g >= 0.0) || !g.is_finite() {
            return Err(Error::BadParameter(format!("gamma_{} = {g} must be finite and nonnegative", k + 1)));
        }
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !omega.is_finite() {
        return Err(Error::BadParameter(format!("omega = {omega} must be finite")));
    }
    Ok(())
}

/// `H = ωσ_x`.
pub fn example1_generator(omega: f64) -> GkslGenerator {
    GkslGenerator::hamiltonian_only(scaled(pauli_x(), omega)).expect("σ_x is Hermitian")
}

pub fn example2_generator(omega: f64, gamma1: f64, gamma2: f64, gamma3: f64) -> GkslGenerator {
    let jumps = vec![
        scaled(sigma_plus(), gamma1.sqrt()),
        scaled(sigma_minus(), gamma2.sqrt()),
        scaled(pauli_z(), (gamma3 / 2.0).sqrt()),
    ];
    GkslGenerator::new(scaled(pauli_z(), omega / 2.0), jumps).expect("σ_z is Hermitian")
}

pub fn example3_generator(gamma1: f64, gamma2: f64, gamma3: f64) -> GkslGenerator {
    let jumps = [gamma1, gamma2, gamma3].iter().enumerate().map(|(k, g)| scaled(pauli(k + 1), g.sqrt())).collect();
    GkslGenerator::new(ComplexMatrix::zeros(2, 2), jumps).expect("zero Hamiltonian")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Preset {
    Example1 { omega: f64 },
    Example2 { omega: f64, gamma: [f64; 3] },
    Example3 { gamma: [f64; 3] },
}

/// A generator together with the quorum it is lifted through.
#[derive(Debug, Clone)]
pub struct Model {
    pub preset: Preset,
    pub generator: GkslGenerator,
    pub quorum: Quorum,
}

pub fn example1(omega: f64, weights: [f64; 3]) -> Result<Model> {
    Preset::Example1 { omega }.model(weights)
}

pub fn example2(omega: f64, gamma1: f64, gamma2: f64, gamma3: f64, weights: [f64; 3]) -> Result<Model> {
    Preset::Example2 { omega, gamma: [gamma1, gamma2, gamma3] }.model(weights)
}

pub fn example3(gamma1: f64, gamma2: f64, gamma3: f64, weights: [f64; 3]) -> Result<Model> {
    Preset::Example3 { gamma: [gamma1, gamma2, gamma3] }.model(weights)
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Example1 { .. } => "example1",
            Preset::Example2 { .. } => "example2",
            Preset::Example3 { .. } => "example3",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Preset::Example1 { omega } => check_omega(omega),
            Preset::Example2 { omega, gamma } => check_omega(omega).and(check_rates(gamma)),
            Preset::Example3 { gamma } => check_rates(gamma),
        }
    }

    pub fn generator(&self) -> Result<GkslGenerator> {
        self.validate()?;
        Ok(match *self {
            Preset::Example1 { omega } => example1_generator(omega),
            Preset::Example2 { omega, gamma: [g1, g2, g3] } => example2_generator(omega, g1, g2, g3),
            Preset::Example3 { gamma: [g1, g2, g3] } => example3_generator(g1, g2, g3),
        })
    }

    pub fn model(&self, weights: [f64; 3]) -> Result<Model> {
        Ok(Model { preset: *self, generator: self.generator()?, quorum: pauli_quorum(weights[0], weights[1], weights[2])? })
    }

    /// Closed-form sector-local simplex generator for the Pauli quorum with `weights`.
    pub fn closed_form(&self, weights: [f64; 3]) -> Result<RealMatrix> {
        self.validate()?;
        let [px, py, pz] = weights;
        let mut m = RealMatrix::zeros(6, 6);
        match *self {
            Preset::Example1 { omega } => {
                let mu = py / pz;
                set_coupling(&mut m, 1, 2, -omega * mu);
                set_coupling(&mut m, 2, 1, omega / mu);
            }
            Preset::Example2 { omega, gamma: [g1, g2, g3] } => {
                let big_gamma = 0.5 * (g1 + g2) + g3;
                let nu = px / py;
                set_flip(&mut m, 0, 0.5 * big_gamma);
                set_flip(&mut m, 1, 0.5 * big_gamma);
                set_coupling(&mut m, 0, 1, -0.5 * omega * nu);
                set_coupling(&mut m, 1, 0, 0.5 * omega / nu);
                m[(4, 4)] = -g1;
                m[(4, 5)] = g2;
                m[(5, 4)] = g1;
                m[(5, 5)] = -g2;
            }
            Preset::Example3 { gamma: [g1, g2, g3] } => {
                set_flip(&mut m, 0, g2 + g3);
                set_flip(&mut m, 1, g1 + g3);
                set_flip(&mut m, 2, g1 + g2);
            }
        }
        Ok(m)
    }

    /// A widely reproduced printed form of the closed form that disagrees with
    /// direct derivation, if any.
    pub fn printed_variant(&self, weights: [f64; 3]) -> Option<RealMatrix> {
        match *self {
            Preset::Example1 { omega } => {
                let mu = weights[1] / weights[2];
                let mut m = RealMatrix::zeros(6, 6);
                set_coupling(&mut m, 1, 2, -2.0 * omega * mu);
                set_coupling(&mut m, 2, 1, omega / mu);
                Some(m)
            }
            _ => None,
        }
    }

    /// Human-readable note on known discrepancies between the printed form and the derived one.
    pub fn discrepancy_note(&self) -> Option<&'static str> {
        match self {
            Preset::Example1 { .. } => Some(
                "NOTE: the commonly printed matrix for this model carries -2mu, 2mu in the y-sector rows; \
                 direct derivation from ydot = -2 omega z, zdot = 2 omega y gives -omega*mu, omega*mu \
                 (y rows) and omega/mu, -omega/mu (z rows), i.e. rotation at angular frequency 2|omega|. \
                 The derived matrix is used here.",
            ),
            Preset::Example2 { .. } => Some(
                "NOTE: signs of the omega couplings follow rho_12 = (x - iy)/2 and p(1|y) = (1 + y)/2; \
                 they were checked against finite differences of the master equation.",
            ),
            Preset::Example3 { .. } => None,
        }
    }
}

/// `γ[[−1, 1], [1, −1]]` on the diagonal block of `sector`.
fn set_flip(m: &mut RealMatrix, sector: usize, gamma: f64) {
    let o = 2 * sector;
    m[(o, o)] = -gamma;
    m[(o, o + 1)] = gamma;
    m[(o + 1, o)] = gamma;
    m[(o + 1, o + 1)] = -gamma;
}

/// `c[[1, −1], [−1, 1]]` in rows of sector `to`, columns of sector `from`.
fn set_coupling(m: &mut RealMatrix, to: usize, from: usize, c: f64) {
    let (r, k) = (2 * to, 2 * from);
    m[(r, k)] = c;
    m[(r, k + 1)] = -c;
    m[(r + 1, k)] = -c;
    m[(r + 1, k + 1)] = c;
}
