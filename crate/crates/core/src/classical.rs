//! Classical Markov dynamics on finite state spaces.
//!
//! Matrices are column-stochastic: `T_ij` is the probability of moving from
//! state `j` to state `i`, so columns sum to one and `p(t) = T(t) p(0)`.
//! Generators likewise have nonnegative off-diagonal entries and zero column
//! sums.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, ensure_square, matrix_exponential, RealMatrix};

/// Default structural tolerance for stochasticity and Kolmogorov checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("probability vector"));
        }
        if let Some((i, &v)) = entries.iter().enumerate().find(|(_, &p)| p < -1e-12) {
            return Err(Error::NegativeEntry { row: i, col: 0, value: v });
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::ColumnSum { col: 0, sum, expected: 1.0 });
        }
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StochasticityCheck {
    pub verdict: bool,
    pub min_entry: f64,
    /// `(row, col)` of the smallest entry.
    pub min_entry_at: (usize, usize),
    pub max_column_sum_error: f64,
}

/// `T_ij ≥ −tol` and `|Σ_i T_ij − 1| ≤ tol` for every column.
pub fn is_stochastic(t: &RealMatrix, tol: f64) -> StochasticityCheck {
    let mut min_entry = f64::INFINITY;
    let mut min_entry_at = (0, 0);
    let mut max_column_sum_error: f64 = 0.0;
    for j in 0..t.ncols() {
        let mut sum = 0.0;
        for i in 0..t.nrows() {
            let v = t[(i, j)];
            sum += v;
            if v < min_entry {
                min_entry = v;
                min_entry_at = (i, j);
            }
        }
        max_column_sum_error = max_column_sum_error.max((sum - 1.0).abs());
    }
    let verdict = t.nrows() == t.ncols() && min_entry >= -tol && max_column_sum_error <= tol;
    StochasticityCheck { verdict, min_entry, min_entry_at, max_column_sum_error }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KolmogorovCheck {
    pub verdict: bool,
    /// Smallest off-diagonal entry (0 for 1×1 matrices).
    pub worst_offdiagonal: f64,
    pub worst_offdiagonal_at: Option<(usize, usize)>,
    /// Largest absolute column sum.
    pub max_column_sum: f64,
    pub max_column_sum_at: usize,
}

/// `M_ij ≥ −tol` for `i ≠ j` and `|Σ_i M_ij| ≤ tol` for every column.
pub fn is_kolmogorov(m: &RealMatrix, tol: f64) -> KolmogorovCheck {
    let mut worst_offdiagonal = 0.0;
    let mut worst_offdiagonal_at = None;
    let mut max_column_sum: f64 = 0.0;
    let mut max_column_sum_at = 0;
    for j in 0..m.ncols() {
        let mut sum = 0.0;
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            sum += v;
            if i != j && (worst_offdiagonal_at.is_none() || v < worst_offdiagonal) {
                worst_offdiagonal = v;
                worst_offdiagonal_at = Some((i, j));
            }
        }
        if sum.abs() > max_column_sum {
            max_column_sum = sum.abs();
            max_column_sum_at = j;
        }
    }
    let verdict = m.nrows() == m.ncols() && worst_offdiagonal >= -tol && max_column_sum <= tol;
    KolmogorovCheck { verdict, worst_offdiagonal, worst_offdiagonal_at, max_column_sum, max_column_sum_at }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(RealMatrix);

impl StochasticMatrix {
    pub fn new(t: RealMatrix, tol: f64) -> Result<Self> {
        ensure_square(&t)?;
        ensure_finite(&t, "stochastic matrix")?;
        let check = is_stochastic(&t, tol);
        if check.min_entry < -tol {
            let (row, col) = check.min_entry_at;
            return Err(Error::NegativeEntry { row, col, value: check.min_entry });
        }
        if !check.verdict {
            return Err(column_sum_error(&t, 1.0));
        }
        Ok(Self(t))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }
}

fn column_sum_error(m: &RealMatrix, expected: f64) -> Error {
    let (col, sum) = (0..m.ncols())
        .map(|j| (j, m.column(j).sum()))
        .max_by(|a, b| (a.1 - expected).abs().total_cmp(&(b.1 - expected).abs()))
        .unwrap_or((0, 0.0));
    Error::ColumnSum { col, sum, expected }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovGenerator(RealMatrix);

impl KolmogorovGenerator {
    pub fn new(m: RealMatrix, tol: f64) -> Result<Self> {
        ensure_square(&m)?;
        ensure_finite(&m, "Kolmogorov generator")?;
        let check = is_kolmogorov(&m, tol);
        if check.worst_offdiagonal < -tol {
            let (row, col) = check.worst_offdiagonal_at.unwrap_or((0, 0));
            return Err(Error::NegativeRate { row, col, value: check.worst_offdiagonal });
        }
        if !check.verdict {
            return Err(column_sum_error(&m, 0.0));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Off-diagonal part as transition rates.
    pub fn rates(&self) -> TransitionRates {
        let n = self.dim();
        TransitionRates(RealMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { self.0[(i, j)].max(0.0) }))
    }
}

/// Transition rates `π_ij` (from `j` to `i`); diagonal entries are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRates(RealMatrix);

impl TransitionRates {
    pub fn new(rates: RealMatrix) -> Result<Self> {
        ensure_square(&rates)?;
        ensure_finite(&rates, "transition rates")?;
        for j in 0..rates.ncols() {
            for i in 0..rates.nrows() {
                if i != j && rates[(i, j)] < 0.0 {
                    return Err(Error::NegativeRate { row: i, col: j, value: rates[(i, j)] });
                }
            }
        }
        Ok(Self(rates))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// `M_ij = π_ij − δ_ij Σ_k π_kj`.
pub fn generator_from_rates(rates: &TransitionRates) -> KolmogorovGenerator {
    let r = rates.matrix();
    let n = rates.dim();
    let mut m = RealMatrix::zeros(n, n);
    for j in 0..n {
        let mut outflow = 0.0;
        for i in 0..n {
            if i != j {
                m[(i, j)] = r[(i, j)];
                outflow += r[(i, j)];
            }
        }
        m[(j, j)] = -outflow;
    }
    KolmogorovGenerator(m)
}

/// Right-hand side of the Pauli rate equation, `ṗ_i = Σ_j (π_ij p_j − π_ji p_i)`.
pub fn pauli_rate_rhs(rates: &TransitionRates, p: &ProbabilityVector) -> Result<Vec<f64>> {
    let n = rates.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: format!("{n} probabilities"), found: format!("{}", p.len()) });
    }
    let r = rates.matrix();
    let p = p.as_slice();
    Ok((0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| r[(i, j)] * p[j] - r[(j, i)] * p[i]).sum())
        .collect())
}

/// `p(t) = e^{tM} p₀`.
pub fn evolve_classical(m: &KolmogorovGenerator, p0: &ProbabilityVector, t: f64) -> Result<ProbabilityVector> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::BadTime(t));
    }
    if p0.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} probabilities", m.dim()),
            found: format!("{}", p0.len()),
        });
    }
    let p = matrix_exponential(m.matrix(), t)? * DVector::from_column_slice(p0.as_slice());
    let entries: Vec<f64> = p.iter().copied().collect();
    if let Some((i, &v)) = entries.iter().enumerate().find(|(_, &x)| x < -1e-9) {
        return Err(Error::NegativeEntry { row: i, col: 0, value: v });
    }
    let sum: f64 = entries.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::ColumnSum { col: 0, sum, expected: 1.0 });
    }
    // clip round-off below zero and renormalise so the invariant holds exactly
    let clipped: Vec<f64> = entries.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    ProbabilityVector::new(clipped.into_iter().map(|x| x / s).collect())
}

/// Log-spaced time grid used by the converse probe: `points` values in
/// `[1e-3, 1e1] / ‖M‖₁` (unscaled when `‖M‖₁ = 0`).
pub fn probe_grid(m: &RealMatrix, points: usize) -> Vec<f64> {
    let scale = crate::linalg::norm1(m);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    log_grid(1e-3, 1e1, points).into_iter().map(|t| t / scale).collect()
}

/// `points` log-spaced values from `start` to `stop` inclusive.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.ln(), stop.ln());
            (0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect()
        }
    }
}
