//! Weighted measurement quorums and the tomographic probability vector.
//!
//! A quorum is a list of orthonormal bases `{b_k^(α)}` with weights `π_α`.
//! A state is encoded as the stacked vector with entries
//! `p_k^(α) = π_α ⟨b_k^(α)|ρ|b_k^(α)⟩`, sector-major: all `k` of the first
//! basis, then all `k` of the second, and so on. Each sector sums to `π_α`,
//! so the whole vector lies in the probability simplex; only a convex subset
//! of it decodes to positive matrices.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, least_squares_solve, rank, ComplexMatrix, ComplexVector, RealMatrix};
use crate::quantum::{from_hermitian_coordinates, hermitian_basis, pauli, DensityMatrix};

/// Orthonormality tolerance for measurement bases.
pub const BASIS_TOL: f64 = 1e-10;
/// Tolerance on `Σ_α π_α = 1`.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Sector-sum tolerance accepted by [`decode`].
pub const DECODE_SECTOR_TOL: f64 = 1e-8;

/// An orthonormal basis; `vectors[k]` is the k-th measurement outcome state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: Vec<ComplexVector>,
}

impl MeasurementBasis {
    pub fn new(vectors: Vec<ComplexVector>) -> Result<Self> {
        Self::with_tolerance(vectors, BASIS_TOL)
    }

    pub fn with_tolerance(vectors: Vec<ComplexVector>, tol: f64) -> Result<Self> {
        let n = vectors.len();
        if n == 0 || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{n} vectors of length {n}"),
                found: format!("lengths {:?}", vectors.iter().map(|v| v.len()).collect::<Vec<_>>()),
            });
        }
        if vectors.iter().any(|v| v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::NonFinite("basis vector"));
        }
        let mut deviation: f64 = 0.0;
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((a.dotc(b) - Complex64::new(target, 0.0)).norm());
            }
        }
        if deviation > tol {
            return Err(Error::BasisNotOrthonormal { deviation });
        }
        Ok(Self { vectors })
    }

    pub fn computational(n: usize) -> Self {
        Self { vectors: crate::quantum::computational_basis(n) }
    }

    /// Eigenbasis of `σ_axis` (1 = x, 2 = y, 3 = z), `+1` eigenvector first.
    pub fn pauli_axis(axis: usize) -> Self {
        let (theta, phi) = match axis {
            1 => (std::f64::consts::FRAC_PI_2, 0.0),
            2 => (std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
            3 => (0.0, 0.0),
            _ => panic!("Pauli axis {axis} out of range"),
        };
        basis_from_axis(theta, phi)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn projector(&self, k: usize) -> ComplexMatrix {
        &self.vectors[k] * self.vectors[k].adjoint()
    }

    /// Outcome probabilities `⟨b_k|X|b_k⟩` (real part) for any square `X`.
    pub fn tomogram(&self, x: &ComplexMatrix) -> Vec<f64> {
        self.vectors.iter().map(|b| b.dotc(&(x * b)).re).collect()
    }
}

/// Eigenbasis of `n·σ` for `n = (sinθ cosφ, sinθ sinφ, cosθ)`, `+1` eigenvector first.
///
/// `|+⟩ = (cos θ/2, e^{iφ} sin θ/2)`, `|−⟩ = (−e^{−iφ} sin θ/2, cos θ/2)`;
/// vectors are fixed up to a global phase, which no tomogram depends on.
pub fn basis_from_axis(theta: f64, phi: f64) -> MeasurementBasis {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    let plus = DVector::from_vec(vec![Complex64::new(c, 0.0), e * s]);
    let minus = DVector::from_vec(vec![-e.conj() * s, Complex64::new(c, 0.0)]);
    MeasurementBasis { vectors: vec![plus, minus] }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub label: String,
    pub basis: MeasurementBasis,
    pub weight: f64,
}

/// Weighted family of measurement bases.
#[derive(Debug, Clone, PartialEq)]
pub struct Quorum {
    dim: usize,
    sectors: Vec<Sector>,
}

impl Quorum {
    pub fn new(sectors: Vec<Sector>) -> Result<Self> {
        let Some(first) = sectors.first() else {
            return Err(Error::BadWeights("quorum has no sectors".into()));
        };
        let dim = first.basis.dim();
        for s in &sectors {
            if s.basis.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("{dim}-dimensional bases"),
                    found: format!("sector {} of dimension {}", s.label, s.basis.dim()),
                });
            }
            if !(s.weight > 0.0) || !s.weight.is_finite() {
                return Err(Error::BadWeights(format!("weight of sector {} is {}, must be positive", s.label, s.weight)));
            }
        }
        let total: f64 = sectors.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::BadWeights(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { dim, sectors })
    }

    /// Unlabelled sectors are numbered from 1.
    pub fn from_bases(bases: Vec<(MeasurementBasis, f64)>) -> Result<Self> {
        Self::new(
            bases
                .into_iter()
                .enumerate()
                .map(|(i, (basis, weight))| Sector { label: (i + 1).to_string(), basis, weight })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector_count(&self) -> usize {
        self.sectors.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.sectors.iter().map(|s| s.weight).collect()
    }

    /// Length of the tomographic vector, `N·A`.
    pub fn vector_len(&self) -> usize {
        self.dim * self.sectors.len()
    }

    /// Column names `p_k^(label)` in storage order.
    pub fn entry_labels(&self) -> Vec<String> {
        self.sectors
            .iter()
            .flat_map(|s| (1..=self.dim).map(move |k| format!("p_{k}^({})", s.label)))
            .collect()
    }

    /// Linear encode map on real Hermitian coordinates: `(N·A) × N²`.
    pub fn frame_matrix(&self) -> RealMatrix {
        let n = self.dim;
        let basis = hermitian_basis(n);
        let mut e = RealMatrix::zeros(self.vector_len(), n * n);
        for (a, b) in basis.iter().enumerate() {
            for (s, sector) in self.sectors.iter().enumerate() {
                for (k, p) in sector.basis.tomogram(b).into_iter().enumerate() {
                    e[(s * n + k, a)] = sector.weight * p;
                }
            }
        }
        e
    }

    /// `true` for the qubit quorum of σ_x, σ_y, σ_z eigenbases in that order
    /// (up to phases), the shape required by the sector-local lift.
    pub fn is_pauli_qubit(&self) -> bool {
        if self.dim != 2 || self.sectors.len() != 3 {
            return false;
        }
        self.sectors.iter().enumerate().all(|(i, s)| {
            let sigma = pauli(i + 1);
            let id = pauli(0);
            let plus = (&id + &sigma).scale(0.5);
            let minus = (&id - &sigma).scale(0.5);
            crate::linalg::max_abs(&(s.basis.projector(0) - plus)) < BASIS_TOL
                && crate::linalg::max_abs(&(s.basis.projector(1) - minus)) < BASIS_TOL
        })
    }
}

/// Quorum of the σ_x, σ_y, σ_z eigenbases with the given weights.
pub fn pauli_quorum(pi_x: f64, pi_y: f64, pi_z: f64) -> Result<Quorum> {
    Quorum::new(
        [("x", pi_x), ("y", pi_y), ("z", pi_z)]
            .into_iter()
            .enumerate()
            .map(|(i, (label, weight))| Sector { label: label.into(), basis: MeasurementBasis::pauli_axis(i + 1), weight })
            .collect(),
    )
}

/// Stacked tomographic probabilities, sector-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TomographicVector {
    dim: usize,
    sector_count: usize,
    entries: Vec<f64>,
}

impl TomographicVector {
    /// Wraps raw entries after a shape check; sector sums are checked against a quorum by the consumers.
    pub fn from_entries(dim: usize, sector_count: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * sector_count {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", dim * sector_count),
                found: format!("{}", entries.len()),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("tomographic vector"));
        }
        Ok(Self { dim, sector_count, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sector_count(&self) -> usize {
        self.sector_count
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn sector(&self, alpha: usize) -> &[f64] {
        &self.entries[alpha * self.dim..(alpha + 1) * self.dim]
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.entries)
    }

    /// Fails with the worst sector if any `|Σ_k p_k^(α) − π_α| > tol`.
    pub fn check_sector_sums(&self, quorum: &Quorum, tol: f64) -> Result<()> {
        self.check_shape(quorum)?;
        let worst = quorum
            .sectors()
            .iter()
            .enumerate()
            .map(|(a, s)| (a, self.sector(a).iter().sum::<f64>(), s.weight))
            .max_by(|x, y| (x.1 - x.2).abs().total_cmp(&(y.1 - y.2).abs()));
        match worst {
            Some((sector, sum, expected)) if (sum - expected).abs() > tol => {
                Err(Error::SectorSumViolation { sector, sum, expected })
            }
            _ => Ok(()),
        }
    }

    fn check_shape(&self, quorum: &Quorum) -> Result<()> {
        if self.dim != quorum.dim() || self.sector_count != quorum.sector_count() {
            return Err(Error::DimensionMismatch {
                expected: format!("N = {}, A = {}", quorum.dim(), quorum.sector_count()),
                found: format!("N = {}, A = {}", self.dim, self.sector_count),
            });
        }
        Ok(())
    }
}

/// The linear encode formula applied to any square matrix (used for traceless
/// images of the generator as well as for states).
pub fn encode_matrix(x: &ComplexMatrix, quorum: &Quorum) -> Result<Vec<f64>> {
    if x.nrows() != quorum.dim() || x.ncols() != quorum.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", quorum.dim()),
            found: format!("{}x{}", x.nrows(), x.ncols()),
        });
    }
    Ok(quorum.sectors().iter().flat_map(|s| s.basis.tomogram(x).into_iter().map(move |p| s.weight * p)).collect())
}

/// `p_k^(α) = π_α ⟨b_k^(α)|ρ|b_k^(α)⟩`.
pub fn encode(rho: &DensityMatrix, quorum: &Quorum) -> Result<TomographicVector> {
    let entries = encode_matrix(rho.matrix(), quorum)?;
    TomographicVector::from_entries(quorum.dim(), quorum.sector_count(), entries)
}

/// Rank of the frame map on the N²-dimensional Hermitian space.
pub fn completeness_check(quorum: &Quorum) -> usize {
    rank(&quorum.frame_matrix())
}

/// Fails with [`Error::IncompleteQuorum`] unless the frame map has rank N².
pub fn require_complete(quorum: &Quorum) -> Result<()> {
    let r = completeness_check(quorum);
    let required = quorum.dim() * quorum.dim();
    if r < required {
        return Err(Error::IncompleteQuorum { rank: r, required });
    }
    Ok(())
}

/// Number of free parameters of vectors obeying the sector-sum constraints.
pub fn free_parameters(quorum: &Quorum) -> usize {
    let n = quorum.dim();
    let a = quorum.sector_count();
    let constraints = RealMatrix::from_fn(a, n * a, |row, col| if col / n == row { 1.0 } else { 0.0 });
    n * a - rank(&constraints.transpose())
}

/// Least-squares reconstruction over Hermitian matrices. The result has unit
/// trace but is not projected onto the positive cone.
pub fn decode(p: &TomographicVector, quorum: &Quorum) -> Result<ComplexMatrix> {
    require_complete(quorum)?;
    p.check_sector_sums(quorum, DECODE_SECTOR_TOL)?;
    let n = quorum.dim();
    let coords = least_squares_solve(&quorum.frame_matrix(), p.entries())?;
    let mut rho = from_hermitian_coordinates(&coords, n);
    let shift = (1.0 - rho.trace().re) / n as f64;
    for k in 0..n {
        rho[(k, k)] += Complex64::new(shift, 0.0);
    }
    Ok((&rho + rho.adjoint()).scale(0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetVerdict {
    pub member: bool,
    pub min_eigenvalue: f64,
}

/// Decodes `p` and tests positivity of the reconstruction.
pub fn in_quantum_subset(p: &TomographicVector, quorum: &Quorum, tol: f64) -> Result<SubsetVerdict> {
    p.check_sector_sums(quorum, tol.max(DECODE_SECTOR_TOL))?;
    let rho = decode(p, quorum)?;
    let min_eigenvalue = hermitian_eigensystem(&rho, 1e-8)?.min();
    Ok(SubsetVerdict { member: min_eigenvalue >= -tol, min_eigenvalue })
}

/// Left-hand side of the qubit ellipsoid inequality
/// `Σ_α (p_1^(α) − π_α/2)² / (π_α/2)² ≤ 1`, which equals `|r|²`.
pub fn ellipsoid_membership(p: &TomographicVector, quorum: &Quorum) -> Result<f64> {
    if !quorum.is_pauli_qubit() {
        return Err(Error::WrongQuorumShape("ellipsoid test needs the qubit σ_x, σ_y, σ_z quorum".into()));
    }
    p.check_sector_sums(quorum, DECODE_SECTOR_TOL)?;
    Ok(quorum
        .sectors()
        .iter()
        .enumerate()
        .map(|(a, s)| {
            let half = s.weight / 2.0;
            let d = p.sector(a)[0] - half;
            d * d / (half * half)
        })
        .sum())
}
