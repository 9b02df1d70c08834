//! Lifting quantum generators to linear dynamics of tomographic vectors, and
//! the stochasticity-based quantumness witness.
//!
//! For a quorum with encode map `E` the master equation `ρ̇ = L(ρ)` induces
//! `Ṗ = 𝕄P` on tomographic vectors, where `𝕄E = EL`. This pins `𝕄` down on
//! the range of `E` only; two extensions to the full `N·A`-dimensional space
//! are offered:
//!
//! * [`LiftStrategy::Pseudoinverse`]: `𝕄 = E L E⁺`, zero on the orthogonal
//!   complement of the range. Works for any complete quorum.
//! * [`LiftStrategy::SectorLocal`]: qubit σ_x, σ_y, σ_z quorum only. Rows of
//!   sector α read the trace from sector α's own sum and each Bloch
//!   component from its own sector, which gives the usual closed forms.
//!
//! A Kolmogorov `𝕄` generates a stochastic semigroup `𝕋(t) = e^{t𝕄}`, i.e. a
//! classical Markov chain on `N·A` states. When `𝕄` is not Kolmogorov,
//! `𝕋(t)` leaves the simplex for some `t` and the dynamics cannot be
//! classical; that is the witness.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::classical::{is_kolmogorov, is_stochastic, log_grid, KolmogorovCheck};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{matrix_exponential, max_abs, norm1, pseudoinverse, RealMatrix};
use crate::quantum::{
    bloch_matrix, evolve_with_propagator, hermitian_superoperator, liouvillian_matrix, DensityMatrix, GkslGenerator,
};
use crate::tomography::{encode, encode_matrix, require_complete, Quorum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftStrategy {
    Pseudoinverse,
    SectorLocal,
}

impl LiftStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            LiftStrategy::Pseudoinverse => "pseudoinverse",
            LiftStrategy::SectorLocal => "sector-local",
        }
    }

    /// Sector-local for the qubit Pauli quorum, pseudoinverse otherwise.
    pub fn default_for(quorum: &Quorum) -> Self {
        if quorum.is_pauli_qubit() {
            LiftStrategy::SectorLocal
        } else {
            LiftStrategy::Pseudoinverse
        }
    }

    pub fn is_available(&self, quorum: &Quorum) -> bool {
        match self {
            LiftStrategy::Pseudoinverse => true,
            LiftStrategy::SectorLocal => quorum.is_pauli_qubit(),
        }
    }

    pub fn other(&self) -> Self {
        match self {
            LiftStrategy::Pseudoinverse => LiftStrategy::SectorLocal,
            LiftStrategy::SectorLocal => LiftStrategy::Pseudoinverse,
        }
    }
}

impl fmt::Display for LiftStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LiftStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pseudoinverse" => Ok(LiftStrategy::Pseudoinverse),
            "sector-local" => Ok(LiftStrategy::SectorLocal),
            other => Err(format!("unknown lift strategy '{other}' (expected pseudoinverse or sector-local)")),
        }
    }
}

/// `𝕄` acting on tomographic vectors, tagged with the strategy that built it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexGenerator {
    dim: usize,
    sector_count: usize,
    matrix: RealMatrix,
    strategy: LiftStrategy,
}

impl SimplexGenerator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sector_count(&self) -> usize {
        self.sector_count
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn strategy(&self) -> LiftStrategy {
        self.strategy
    }

    /// Sector sizes `[N; A]`.
    pub fn partition(&self) -> Vec<usize> {
        vec![self.dim; self.sector_count]
    }

    pub fn norm1(&self) -> f64 {
        norm1(&self.matrix)
    }
}

pub fn lift_generator(generator: &GkslGenerator, quorum: &Quorum, strategy: LiftStrategy) -> Result<SimplexGenerator> {
    if generator.dim() != quorum.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}-level generator", quorum.dim()),
            found: format!("{}-level", generator.dim()),
        });
    }
    require_complete(quorum)?;
    let matrix = match strategy {
        LiftStrategy::Pseudoinverse => {
            let frame = quorum.frame_matrix();
            &frame * hermitian_superoperator(generator) * pseudoinverse(&frame)?
        }
        LiftStrategy::SectorLocal => {
            if !quorum.is_pauli_qubit() {
                return Err(Error::StrategyUnavailable("sector-local"));
            }
            sector_local_matrix(generator, quorum)?
        }
    };
    Ok(SimplexGenerator { dim: quorum.dim(), sector_count: quorum.sector_count(), matrix, strategy })
}

/// Rows of sector α are `E_α ∘ L ∘ R_α` with
/// `R_α(P) = ½[(s_α/π_α) I + Σ_β (p_1^(β) − p_2^(β))/π_β σ_β]`.
fn sector_local_matrix(generator: &GkslGenerator, quorum: &Quorum) -> Result<RealMatrix> {
    let weights = quorum.weights();
    let mut m = RealMatrix::zeros(6, 6);
    for (alpha, sector) in quorum.sectors().iter().enumerate() {
        for col in 0..6 {
            let (beta, k) = (col / 2, col % 2);
            let sign = if k == 0 { 1.0 } else { -1.0 };
            let trace = if beta == alpha { 1.0 / weights[alpha] } else { 0.0 };
            let mut bloch = [0.0; 3];
            bloch[beta] = sign / weights[beta];
            let preimage = bloch_matrix(trace, bloch[0], bloch[1], bloch[2]);
            let image = generator.apply(&preimage)?;
            for (row, p) in sector.basis.tomogram(&image).into_iter().enumerate() {
                m[(2 * alpha + row, col)] = sector.weight * p;
            }
        }
    }
    Ok(m)
}

/// `𝕋(t) = e^{t𝕄}`.
pub fn lift_map(lifted: &SimplexGenerator, t: f64) -> Result<RealMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::BadTime(t));
    }
    matrix_exponential(&lifted.matrix, t)
}

/// Largest deviation `‖encode(e^{tL}ρ) − 𝕋(t)·encode(ρ)‖_max` over states and times.
pub fn consistency_check(
    generator: &GkslGenerator,
    quorum: &Quorum,
    strategy: LiftStrategy,
    states: &[DensityMatrix],
    grid: &[f64],
    exec: Execution,
) -> Result<f64> {
    let lifted = lift_generator(generator, quorum, strategy)?;
    let liouvillian = liouvillian_matrix(generator);
    let encoded: Vec<DVector<f64>> =
        states.iter().map(|rho| encode(rho, quorum).map(|p| p.to_dvector())).collect::<Result<_>>()?;
    let per_time = exec.try_map(grid, |&t| -> Result<f64> {
        let tmap = lift_map(&lifted, t)?;
        let propagator = liouvillian.propagator(t)?;
        let mut worst: f64 = 0.0;
        for (rho, p0) in states.iter().zip(&encoded) {
            let direct = encode(&evolve_with_propagator(&propagator, rho)?, quorum)?.to_dvector();
            worst = worst.max((direct - &tmap * p0).amax());
        }
        Ok(worst)
    })?;
    Ok(per_time.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockStructure {
    pub is_block_diagonal: bool,
    /// Largest absolute entry outside the diagonal blocks.
    pub off_block_mass: f64,
    /// The diagonal blocks, in partition order (extracted regardless of the verdict).
    #[serde(skip)]
    pub blocks: Vec<RealMatrix>,
}

pub fn block_structure(a: &RealMatrix, partition: &[usize], tol: f64) -> Result<BlockStructure> {
    let total: usize = partition.iter().sum();
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if partition.iter().any(|&s| s == 0) || total != a.nrows() {
        return Err(Error::BadPartition(format!("sizes {partition:?} do not tile a {0}x{0} matrix", a.nrows())));
    }
    let owner: Vec<usize> = partition.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
    let mut off_block_mass: f64 = 0.0;
    for j in 0..total {
        for i in 0..total {
            if owner[i] != owner[j] {
                off_block_mass = off_block_mass.max(a[(i, j)].abs());
            }
        }
    }
    let mut offset = 0;
    let blocks = partition
        .iter()
        .map(|&s| {
            let b = a.view((offset, offset), (s, s)).into_owned();
            offset += s;
            b
        })
        .collect();
    Ok(BlockStructure { is_block_diagonal: off_block_mass <= tol, off_block_mass, blocks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ClassicalCompatible,
    QuantumWitnessed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ClassicalCompatible => "classical-compatible",
            Verdict::QuantumWitnessed => "quantum-witnessed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridScan {
    pub stochastic_on_grid: bool,
    /// Smallest entry of `𝕋(t)` over the grid, with the `(t, i, j)` achieving it.
    pub min_entry: f64,
    pub min_entry_at: (f64, usize, usize),
    pub max_column_sum_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyComparison {
    pub other: LiftStrategy,
    pub other_kolmogorov: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub strategy: LiftStrategy,
    pub grid: Vec<f64>,
    pub tolerance: f64,
    pub kolmogorov: KolmogorovCheck,
    pub scan: GridScan,
    pub block: BlockStructure,
    pub sector_labels: Vec<String>,
    pub block_kolmogorov: Vec<bool>,
    /// Whether "stochastic on the grid" coincided with "block diagonal with Kolmogorov blocks".
    pub block_equivalence_holds: bool,
    /// Verdict of the other lift strategy, when it is available for the quorum.
    pub comparison: Option<StrategyComparison>,
    pub verdict: Verdict,
}

/// `t = 0` followed by 12 log-spaced times in `[1e-3, 1e1] / ‖𝕄‖₁` (unscaled for `𝕄 = 0`).
pub fn default_grid(lifted: &SimplexGenerator) -> Vec<f64> {
    let scale = lifted.norm1();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    std::iter::once(0.0).chain(log_grid(1e-3, 1e1, 12).into_iter().map(|t| t / scale)).collect()
}

fn check_grid(grid: &[f64], lifted: &SimplexGenerator) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridTooNarrow("grid is empty".into()));
    }
    if let Some(&t) = grid.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::BadTime(t));
    }
    let norm = lifted.norm1();
    if norm == 0.0 {
        return Ok(());
    }
    let early = 1e-2 / norm;
    let late = 1.0 / norm;
    let smallest = grid.iter().copied().filter(|&t| t > 0.0).fold(f64::INFINITY, f64::min);
    let largest = grid.iter().copied().fold(0.0, f64::max);
    // small relative slack so that grids built from the same formula are accepted
    if smallest > early * (1.0 + 1e-9) {
        return Err(Error::GridTooNarrow(format!("needs a positive t <= {early:e}, smallest is {smallest:e}")));
    }
    if largest < late * (1.0 - 1e-9) {
        return Err(Error::GridTooNarrow(format!("needs some t >= {late:e}, largest is {largest:e}")));
    }
    Ok(())
}

/// Runs `is_stochastic` on `𝕋(t)` at every grid time.
pub fn scan_grid(lifted: &SimplexGenerator, grid: &[f64], tol: f64, exec: Execution) -> Result<GridScan> {
    let checks = exec.try_map(grid, |&t| lift_map(lifted, t).map(|m| (t, is_stochastic(&m, tol))))?;
    let mut scan = GridScan {
        stochastic_on_grid: true,
        min_entry: f64::INFINITY,
        min_entry_at: (0.0, 0, 0),
        max_column_sum_error: 0.0,
    };
    for (t, c) in checks {
        scan.stochastic_on_grid &= c.verdict;
        scan.max_column_sum_error = scan.max_column_sum_error.max(c.max_column_sum_error);
        if c.min_entry < scan.min_entry {
            scan.min_entry = c.min_entry;
            scan.min_entry_at = (t, c.min_entry_at.0, c.min_entry_at.1);
        }
    }
    Ok(scan)
}

/// Classifies the dynamics generated by `generator` as seen through `quorum`.
///
/// The verdict is classical-compatible exactly when the lifted generator is
/// Kolmogorov and `𝕋(t)` is stochastic on every grid point; the grid scan
/// guards the generator test against numerical artefacts.
pub fn witness(
    generator: &GkslGenerator,
    quorum: &Quorum,
    strategy: LiftStrategy,
    grid: &[f64],
    tol: f64,
    exec: Execution,
) -> Result<WitnessReport> {
    let lifted = lift_generator(generator, quorum, strategy)?;
    check_grid(grid, &lifted)?;
    let kolmogorov = is_kolmogorov(lifted.matrix(), tol);
    let scan = scan_grid(&lifted, grid, tol, exec)?;
    let block = block_structure(lifted.matrix(), &lifted.partition(), tol)?;
    let block_kolmogorov: Vec<bool> = block.blocks.iter().map(|b| is_kolmogorov(b, tol).verdict).collect();
    let block_equivalence_holds =
        scan.stochastic_on_grid == (block.is_block_diagonal && block_kolmogorov.iter().all(|&k| k));

    let comparison = if strategy.other().is_available(quorum) {
        let other = lift_generator(generator, quorum, strategy.other())?;
        let other_kolmogorov = is_kolmogorov(other.matrix(), tol).verdict;
        Some(StrategyComparison { other: strategy.other(), other_kolmogorov, agrees: other_kolmogorov == kolmogorov.verdict })
    } else {
        None
    };

    let verdict = if kolmogorov.verdict && scan.stochastic_on_grid {
        Verdict::ClassicalCompatible
    } else {
        Verdict::QuantumWitnessed
    };
    Ok(WitnessReport {
        strategy,
        grid: grid.to_vec(),
        tolerance: tol,
        kolmogorov,
        scan,
        block,
        sector_labels: quorum.sectors().iter().map(|s| s.label.clone()).collect(),
        block_kolmogorov,
        block_equivalence_holds,
        comparison,
        verdict,
    })
}

impl WitnessReport {
    /// Stable, prefix-tagged summary lines, without the final verdict line.
    pub fn summary_lines(&self) -> Vec<String> {
        let k = &self.kolmogorov;
        let worst_at = k.worst_offdiagonal_at.map(|(i, j)| format!(" at ({i}, {j})")).unwrap_or_default();
        let (t, i, j) = self.scan.min_entry_at;
        let blocks = self
            .sector_labels
            .iter()
            .zip(&self.block_kolmogorov)
            .map(|(l, v)| format!("{l}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let t_max = self.grid.iter().copied().fold(0.0, f64::max);
        let t_min = self.grid.iter().copied().fold(f64::INFINITY, f64::min);
        vec![
            format!("STRATEGY: {}", self.strategy),
            format!("GRID: {} points, t in [{t_min:e}, {t_max:e}]", self.grid.len()),
            format!(
                "KOLMOGOROV: {} (worst off-diagonal {:e}{worst_at}; max |column sum| {:e})",
                k.verdict, k.worst_offdiagonal, k.max_column_sum
            ),
            format!(
                "STOCHASTIC_ON_GRID: {} (min entry {:e} at t = {t:e}, ({i}, {j}); max column-sum error {:e})",
                self.scan.stochastic_on_grid, self.scan.min_entry, self.scan.max_column_sum_error
            ),
            format!("BLOCK_DIAGONAL: {} (off-block mass {:e})", self.block.is_block_diagonal, self.block.off_block_mass),
            format!("BLOCK_KOLMOGOROV: {blocks}"),
            format!(
                "BLOCK_EQUIVALENCE: {}",
                if self.block_equivalence_holds { "held" } else { "failed" }
            ),
            match &self.comparison {
                Some(c) => format!(
                    "STRATEGY_AGREEMENT: {} ({} kolmogorov = {})",
                    if c.agrees { "agree" } else { "disagree" },
                    c.other,
                    c.other_kolmogorov
                ),
                None => "STRATEGY_AGREEMENT: n/a".to_string(),
            },
        ]
    }

    pub fn verdict_line(&self) -> String {
        format!("VERDICT: {}", self.verdict)
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.summary_lines() {
            writeln!(f, "{line}")?;
        }
        write!(f, "{}", self.verdict_line())
    }
}

/// Coefficients `(X₁, X₂, Y₁, Y₂)` coupling the x and y sectors into the
/// first z-sector population row, for a lift through the qubit Pauli quorum.
pub fn population_coherence_couplings(lifted: &SimplexGenerator) -> Result<[f64; 4]> {
    if lifted.dim != 2 || lifted.sector_count != 3 {
        return Err(Error::WrongQuorumShape("couplings are defined for the qubit σ_x, σ_y, σ_z quorum".into()));
    }
    let m = &lifted.matrix;
    Ok([m[(4, 0)], m[(4, 1)], m[(4, 2)], m[(4, 3)]])
}

/// `max_ρ ‖𝕄·encode(ρ) − encode(L(ρ))‖_max` over the given states.
pub fn physical_subspace_defect(
    lifted: &SimplexGenerator,
    generator: &GkslGenerator,
    quorum: &Quorum,
    states: &[DensityMatrix],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for rho in states {
        let p = encode(rho, quorum)?.to_dvector();
        let image = DVector::from_vec(encode_matrix(&generator.apply(rho.matrix())?, quorum)?);
        worst = worst.max((lifted.matrix() * p - image).amax());
    }
    Ok(worst)
}

/// Largest per-sector sum of `𝕄·v` over the given vectors.
pub fn sector_sum_drift(lifted: &SimplexGenerator, vectors: &[DVector<f64>]) -> f64 {
    let n = lifted.dim;
    vectors
        .iter()
        .map(|v| {
            let out = lifted.matrix() * v;
            (0..lifted.sector_count).map(|a| out.rows(a * n, n).sum().abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Convenience: the lift of the zero-Hamiltonian, no-jump generator is zero.
pub fn is_trivial(lifted: &SimplexGenerator, tol: f64) -> bool {
    max_abs(lifted.matrix()) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{self, Preset};
    use crate::quantum::identity;
    use crate::sampling;
    use crate::tomography::pauli_quorum;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const W: [f64; 3] = [0.5, 0.3, 0.2];

    fn quorum() -> Quorum {
        pauli_quorum(W[0], W[1], W[2]).unwrap()
    }

    /// Finite-difference oracle: d/dt encode(e^{tL}ρ) at t = 0, evaluated on
    /// states spanning the physical subspace, is matched by 𝕄·encode(ρ).
    fn fd_oracle_defect(lifted: &SimplexGenerator, generator: &GkslGenerator, q: &Quorum) -> f64 {
        let liou = liouvillian_matrix(generator);
        let h = 1e-5;
        let states: Vec<DensityMatrix> = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (0.3, -0.5, 0.6)]
            .iter()
            .map(|&(x, y, z)| crate::quantum::bloch_to_density(&crate::quantum::BlochVector::new(x, y, z).unwrap()).unwrap())
            .collect();
        let mut worst: f64 = 0.0;
        for rho in &states {
            let fwd = crate::quantum::unvectorize(&(liou.propagator(h).unwrap() * crate::quantum::vectorize(rho.matrix())), 2);
            let p_fwd = DVector::from_vec(encode_matrix(&fwd, q).unwrap());
            let p0 = encode(rho, q).unwrap().to_dvector();
            // second-order: (P(h) - P(-h)) / 2h with P(-h) from the inverse propagator
            let bwd = crate::quantum::unvectorize(
                &(matrix_exponential(liou.matrix(), -h).unwrap() * crate::quantum::vectorize(rho.matrix())),
                2,
            );
            let p_bwd = DVector::from_vec(encode_matrix(&bwd, q).unwrap());
            let deriv = (p_fwd - p_bwd) / (2.0 * h);
            worst = worst.max((deriv - lifted.matrix() * p0).amax());
        }
        worst
    }

    #[test]
    fn example3_either_strategy() {
        let model = presets::example3(0.4, 1.1, 0.25, W).unwrap();
        let expected = Preset::Example3 { gamma: [0.4, 1.1, 0.25] }.closed_form(W).unwrap();
        for s in [LiftStrategy::Pseudoinverse, LiftStrategy::SectorLocal] {
            let lifted = lift_generator(&model.generator, &model.quorum, s).unwrap();
            assert!(max_abs(&(lifted.matrix() - &expected)) < 1e-12, "{s}");
        }
    }

    #[test]
    fn example2_sector_local_matches_closed_form_and_oracle() {
        let p = Preset::Example2 { omega: 0.9, gamma: [0.3, 0.7, 0.2] };
        let model = p.model(W).unwrap();
        let lifted = lift_generator(&model.generator, &model.quorum, LiftStrategy::SectorLocal).unwrap();
        assert!(max_abs(&(lifted.matrix() - p.closed_form(W).unwrap())) < 1e-12);
        assert!(fd_oracle_defect(&lifted, &model.generator, &model.quorum) < 1e-8);
    }

    #[test]
    fn example1_sector_local_matches_derived_form() {
        let p = Preset::Example1 { omega: -1.7 };
        let model = p.model(W).unwrap();
        let lifted = lift_generator(&model.generator, &model.quorum, LiftStrategy::SectorLocal).unwrap();
        assert!(max_abs(&(lifted.matrix() - p.closed_form(W).unwrap())) < 1e-12);
        assert!(max_abs(&(lifted.matrix() - p.printed_variant(W).unwrap())) > 0.1);
        assert!(fd_oracle_defect(&lifted, &model.generator, &model.quorum) < 1e-8);
        // x-sector rows vanish
        assert!(lifted.matrix().rows(0, 2).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn scalar_hamiltonian_lifts_to_zero() {
        let g = GkslGenerator::hamiltonian_only(identity(2) * Complex64::new(2.5, 0.0)).unwrap();
        for s in [LiftStrategy::Pseudoinverse, LiftStrategy::SectorLocal] {
            assert!(is_trivial(&lift_generator(&g, &quorum(), s).unwrap(), 1e-14));
        }
    }

    #[test]
    fn strategy_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = sampling::random_quorum(2, 3, &mut rng);
        let g = presets::example1_generator(1.0);
        assert!(matches!(lift_generator(&g, &q, LiftStrategy::SectorLocal), Err(Error::StrategyUnavailable(_))));
        let incomplete = Quorum::from_bases(vec![(crate::tomography::MeasurementBasis::computational(2), 1.0)]).unwrap();
        assert!(matches!(lift_generator(&g, &incomplete, LiftStrategy::Pseudoinverse), Err(Error::IncompleteQuorum { .. })));
        assert_eq!("sector-local".parse::<LiftStrategy>().unwrap(), LiftStrategy::SectorLocal);
        assert!("bogus".parse::<LiftStrategy>().is_err());
    }

    #[test]
    fn lifted_generators_respect_physical_subspace_and_sector_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = sampling::random_gksl(2, 2, 1.0, &mut rng);
            let q = sampling::random_pauli_quorum(&mut rng);
            let states: Vec<_> = (0..5).map(|_| sampling::random_density(2, &mut rng)).collect();
            let probes: Vec<DVector<f64>> = (0..5).map(|_| DVector::from_fn(6, |_, _| rand::Rng::random_range(&mut rng, 0.0..1.0))).collect();
            let pinv = lift_generator(&g, &q, LiftStrategy::Pseudoinverse).unwrap();
            let local = lift_generator(&g, &q, LiftStrategy::SectorLocal).unwrap();
            for lifted in [&pinv, &local] {
                assert!(physical_subspace_defect(lifted, &g, &q, &states).unwrap() < 1e-9);
                assert!(sector_sum_drift(lifted, &probes) < 1e-10);
            }
            for rho in &states {
                let p = encode(rho, &q).unwrap().to_dvector();
                assert!(((pinv.matrix() - local.matrix()) * p).amax() < 1e-9);
            }
        }
        let q3 = sampling::random_quorum(3, 4, &mut rng);
        let g3 = sampling::random_gksl(3, 2, 1.0, &mut rng);
        let states: Vec<_> = (0..5).map(|_| sampling::random_density(3, &mut rng)).collect();
        let lifted = lift_generator(&g3, &q3, LiftStrategy::Pseudoinverse).unwrap();
        assert!(physical_subspace_defect(&lifted, &g3, &q3, &states).unwrap() < 1e-9);
    }

    #[test]
    fn lift_map_examples() {
        let model = presets::example3(0.5, 1.0, 1.5, W).unwrap();
        let lifted = lift_generator(&model.generator, &model.quorum, LiftStrategy::SectorLocal).unwrap();
        assert_eq!(lift_map(&lifted, 0.0).unwrap(), RealMatrix::identity(6, 6));
        let t = 0.6;
        let tmap = lift_map(&lifted, t).unwrap();
        for (a, g) in [(0, 1.0 + 1.5), (1, 0.5 + 1.5), (2, 0.5 + 1.0)] {
            let d = (-2.0f64 * g * t).exp();
            let o = 2 * a;
            assert!((tmap[(o, o)] - 0.5 * (1.0 + d)).abs() < 1e-12);
            assert!((tmap[(o + 1, o)] - 0.5 * (1.0 - d)).abs() < 1e-12);
        }
        assert!(lift_map(&lifted, -0.1).is_err());

        // H = ωσ_x: y/z sector differences rotate at 2ω
        let omega = 0.7;
        let model = presets::example1(omega, W).unwrap();
        let lifted = lift_generator(&model.generator, &model.quorum, LiftStrategy::SectorLocal).unwrap();
        let rho = crate::quantum::bloch_to_density(&crate::quantum::BlochVector::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        let p0 = encode(&rho, &model.quorum).unwrap().to_dvector();
        for t in [0.3, 1.0, 2.2] {
            let p = lift_map(&lifted, t).unwrap() * &p0;
            let y = (p[2] - p[3]) / W[1];
            let z = (p[4] - p[5]) / W[2];
            assert!((y + (2.0 * omega * t).sin()).abs() < 1e-10);
            assert!((z - (2.0 * omega * t).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn consistency_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let states: Vec<_> = (0..20).map(|_| sampling::random_density(2, &mut rng)).collect();
        let grid = [0.0, 0.5, 1.0, 5.0];
        let m3 = presets::example3(0.3, 0.6, 0.9, W).unwrap();
        let m1 = presets::example1(1.2, W).unwrap();
        for s in [LiftStrategy::Pseudoinverse, LiftStrategy::SectorLocal] {
            for m in [&m3, &m1] {
                let err = consistency_check(&m.generator, &m.quorum, s, &states, &grid, Execution::default()).unwrap();
                assert!(err <= 1e-8, "{s}: {err}");
            }
        }
        let zero = GkslGenerator::zero(2);
        let err = consistency_check(&zero, &quorum(), LiftStrategy::Pseudoinverse, &states, &grid, Execution::Sequential).unwrap();
        assert!(err <= 1e-12);
    }

    #[test]
    fn block_structure_examples() {
        let m3 = presets::example3(1.0, 2.0, 3.0, W).unwrap();
        let lifted = lift_generator(&m3.generator, &m3.quorum, LiftStrategy::SectorLocal).unwrap();
        let b = block_structure(lifted.matrix(), &[2, 2, 2], 1e-9).unwrap();
        assert!(b.is_block_diagonal);
        for (block, g) in b.blocks.iter().zip([5.0, 4.0, 3.0]) {
            assert!(max_abs(&(block - RealMatrix::from_row_slice(2, 2, &[-g, g, g, -g]))) < 1e-12);
        }
        let m2 = presets::example2(1.0, 0.5, 0.5, 0.5, W).unwrap();
        let lifted = lift_generator(&m2.generator, &m2.quorum, LiftStrategy::SectorLocal).unwrap();
        let b = block_structure(lifted.matrix(), &[2, 2, 2], 1e-9).unwrap();
        assert!(!b.is_block_diagonal);
        assert!((b.off_block_mass - 0.5 * W[0] / W[1]).abs() < 1e-12);
        let m2 = presets::example2(0.0, 0.5, 0.9, 0.5, W).unwrap();
        let lifted = lift_generator(&m2.generator, &m2.quorum, LiftStrategy::SectorLocal).unwrap();
        assert!(block_structure(lifted.matrix(), &[2, 2, 2], 1e-9).unwrap().is_block_diagonal);
        assert!(matches!(block_structure(lifted.matrix(), &[2, 3], 1e-9), Err(Error::BadPartition(_))));
        assert!(matches!(block_structure(lifted.matrix(), &[2, 0, 4], 1e-9), Err(Error::BadPartition(_))));
    }

    #[test]
    fn witness_verdicts() {
        let check = |m: presets::Model| {
            let lifted = lift_generator(&m.generator, &m.quorum, LiftStrategy::SectorLocal).unwrap();
            witness(&m.generator, &m.quorum, LiftStrategy::SectorLocal, &default_grid(&lifted), 1e-9, Execution::default())
                .unwrap()
        };
        let r = check(presets::example3(1.0, 2.0, 3.0, W).unwrap());
        assert_eq!(r.verdict, Verdict::ClassicalCompatible);
        assert_eq!(r.block_kolmogorov, vec![true, true, true]);
        assert!(r.block_equivalence_holds);
        for omega in [1.0, -1.0] {
            let r = check(presets::example1(omega, W).unwrap());
            assert_eq!(r.verdict, Verdict::QuantumWitnessed);
            assert!(!r.scan.stochastic_on_grid);
            assert!(r.block_equivalence_holds);
        }
        let r = check(presets::example2(1.0, 1.0, 1.0, 1.0, W).unwrap());
        assert_eq!(r.verdict, Verdict::QuantumWitnessed);
        assert_eq!(r.block_kolmogorov, vec![true, true, true]);
        let r = check(presets::example2(0.0, 0.3, 1.2, 0.4, W).unwrap());
        assert_eq!(r.verdict, Verdict::ClassicalCompatible);
        assert_eq!(r.to_string().lines().last().unwrap(), "VERDICT: classical-compatible");
    }

    #[test]
    fn witness_grid_guards() {
        let m = presets::example1(1.0, W).unwrap();
        let q = &m.quorum;
        assert!(matches!(witness(&m.generator, q, LiftStrategy::SectorLocal, &[], 1e-9, Execution::Sequential), Err(Error::GridTooNarrow(_))));
        assert!(matches!(witness(&m.generator, q, LiftStrategy::SectorLocal, &[1.0, 2.0], 1e-9, Execution::Sequential), Err(Error::GridTooNarrow(_))));
        assert!(matches!(witness(&m.generator, q, LiftStrategy::SectorLocal, &[1e-6], 1e-9, Execution::Sequential), Err(Error::GridTooNarrow(_))));
        assert!(matches!(witness(&m.generator, q, LiftStrategy::SectorLocal, &[-1.0, 1e-6, 10.0], 1e-9, Execution::Sequential), Err(Error::BadTime(_))));
    }

    #[test]
    fn hamiltonian_lift_is_odd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = sampling::random_traceless_hermitian(2, 1.0, &mut rng);
        let g = GkslGenerator::hamiltonian_only(h).unwrap();
        for s in [LiftStrategy::Pseudoinverse, LiftStrategy::SectorLocal] {
            let fwd = lift_generator(&g, &quorum(), s).unwrap();
            let bwd = lift_generator(&g.time_reversed_hamiltonian(), &quorum(), s).unwrap();
            assert!(max_abs(&(fwd.matrix() + bwd.matrix())) < 1e-12);
        }
    }
}
