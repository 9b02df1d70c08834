//! JSON model configuration and state files, and their resolution into core objects.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use tomowitness::classical::log_grid;
use tomowitness::presets::Preset;
use tomowitness::quantum::{bloch_to_density, BlochVector};
use tomowitness::tomography::{pauli_quorum, require_complete, TomographicVector};
use tomowitness::{
    sampling, ComplexMatrix, DensityMatrix, GkslGenerator, LiftStrategy, MeasurementBasis, Quorum, Sector,
};

use crate::error::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_CONSISTENCY_STATES: usize = 20;

pub type Complex = [f64; 2];
pub type MatrixSpec = Vec<Vec<Complex>>;

#[derive(Debug, Clone, Serialize)]
pub struct ModelConfig {
    pub dimension: usize,
    pub quorum: QuorumSpec,
    pub generator: GeneratorSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<LiftStrategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<StateSpec>,
    /// Number of seeded random states added to the consistency check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency_states: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QuorumSpec {
    Pauli { weights: [f64; 3] },
    Explicit { bases: Vec<BasisSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub weight: f64,
    /// Basis kets, each a list of `[re, im]` amplitudes.
    pub vectors: Vec<Vec<Complex>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Preset {
        name: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        gamma: Option<[f64; 3]>,
    },
    Explicit {
        hamiltonian: MatrixSpec,
        jumps: Vec<MatrixSpec>,
    },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    Explicit {
        times: Vec<f64>,
    },
    Log {
        start: f64,
        stop: f64,
        points: usize,
        include_zero: bool,
    },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpec {
    Bloch { x: f64, y: f64, z: f64 },
    Density { matrix: MatrixSpec },
    Pure { amplitudes: Vec<Complex> },
    Probabilities { entries: Vec<f64> },
}

// On-disk shapes. Plain structs with a `kind` field rather than tagged enums,
// so that deserialization errors keep their full field path.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dimension: usize,
    quorum: RawQuorum,
    generator: RawGenerator,
    grid: Option<RawGrid>,
    tolerance: Option<f64>,
    strategy: Option<LiftStrategy>,
    seed: Option<u64>,
    #[serde(default)]
    states: Vec<RawState>,
    consistency_states: Option<usize>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum QuorumKind {
    Pauli,
    Explicit,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuorum {
    kind: QuorumKind,
    weights: Option<[f64; 3]>,
    bases: Option<Vec<BasisSpec>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum GeneratorKind {
    Preset,
    Explicit,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    kind: GeneratorKind,
    name: Option<String>,
    omega: Option<f64>,
    gamma: Option<[f64; 3]>,
    hamiltonian: Option<MatrixSpec>,
    jumps: Option<Vec<MatrixSpec>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum GridKind {
    Explicit,
    Log,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    kind: GridKind,
    times: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    include_zero: Option<bool>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum StateKind {
    Bloch,
    Density,
    Pure,
    Probabilities,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    kind: StateKind,
    x: Option<f64>,
    y: Option<f64>,
    z: Option<f64>,
    matrix: Option<MatrixSpec>,
    amplitudes: Option<Vec<Complex>>,
    entries: Option<Vec<f64>>,
}

fn required<T>(value: Option<T>, path: &str, field: &str, kind: &str) -> Result<T, CliError> {
    value.ok_or_else(|| config_error(format!("{path}.{field}"), format!("kind {kind} needs {field}")))
}

fn reject<T>(value: &Option<T>, path: &str, field: &str, kind: &str) -> Result<(), CliError> {
    match value {
        Some(_) => Err(config_error(format!("{path}.{field}"), format!("not a field of kind {kind}"))),
        None => Ok(()),
    }
}

impl RawQuorum {
    fn typed(self) -> Result<QuorumSpec, CliError> {
        let at = "quorum";
        Ok(match self.kind {
            QuorumKind::Pauli => {
                reject(&self.bases, at, "bases", "pauli")?;
                QuorumSpec::Pauli { weights: required(self.weights, at, "weights", "pauli")? }
            }
            QuorumKind::Explicit => {
                reject(&self.weights, at, "weights", "explicit")?;
                QuorumSpec::Explicit { bases: required(self.bases, at, "bases", "explicit")? }
            }
        })
    }
}

impl RawGenerator {
    fn typed(self) -> Result<GeneratorSpec, CliError> {
        let at = "generator";
        Ok(match self.kind {
            GeneratorKind::Preset => {
                reject(&self.hamiltonian, at, "hamiltonian", "preset")?;
                reject(&self.jumps, at, "jumps", "preset")?;
                GeneratorSpec::Preset {
                    name: required(self.name, at, "name", "preset")?,
                    omega: self.omega,
                    gamma: self.gamma,
                }
            }
            GeneratorKind::Explicit => {
                reject(&self.name, at, "name", "explicit")?;
                reject(&self.omega, at, "omega", "explicit")?;
                reject(&self.gamma, at, "gamma", "explicit")?;
                GeneratorSpec::Explicit {
                    hamiltonian: required(self.hamiltonian, at, "hamiltonian", "explicit")?,
                    jumps: self.jumps.unwrap_or_default(),
                }
            }
        })
    }
}

impl RawGrid {
    fn typed(self) -> Result<GridSpec, CliError> {
        let at = "grid";
        Ok(match self.kind {
            GridKind::Explicit => {
                reject(&self.start, at, "start", "explicit")?;
                reject(&self.stop, at, "stop", "explicit")?;
                reject(&self.points, at, "points", "explicit")?;
                reject(&self.include_zero, at, "include_zero", "explicit")?;
                GridSpec::Explicit { times: required(self.times, at, "times", "explicit")? }
            }
            GridKind::Log => {
                reject(&self.times, at, "times", "log")?;
                GridSpec::Log {
                    start: required(self.start, at, "start", "log")?,
                    stop: required(self.stop, at, "stop", "log")?,
                    points: required(self.points, at, "points", "log")?,
                    include_zero: self.include_zero.unwrap_or(true),
                }
            }
        })
    }
}

impl RawState {
    fn typed(self, at: &str) -> Result<StateSpec, CliError> {
        let (bloch, density, pure, probs) = match self.kind {
            StateKind::Bloch => (true, false, false, false),
            StateKind::Density => (false, true, false, false),
            StateKind::Pure => (false, false, true, false),
            StateKind::Probabilities => (false, false, false, true),
        };
        let kind = ["bloch", "density", "pure", "probabilities"][[bloch, density, pure, probs].iter().position(|&b| b).unwrap_or(0)];
        for (field, present, allowed) in [
            ("x", self.x.is_some(), bloch),
            ("y", self.y.is_some(), bloch),
            ("z", self.z.is_some(), bloch),
            ("matrix", self.matrix.is_some(), density),
            ("amplitudes", self.amplitudes.is_some(), pure),
            ("entries", self.entries.is_some(), probs),
        ] {
            if present && !allowed {
                return Err(config_error(format!("{at}.{field}"), format!("not a field of kind {kind}")));
            }
        }
        Ok(match self.kind {
            StateKind::Bloch => StateSpec::Bloch {
                x: required(self.x, at, "x", kind)?,
                y: required(self.y, at, "y", kind)?,
                z: required(self.z, at, "z", kind)?,
            },
            StateKind::Density => StateSpec::Density { matrix: required(self.matrix, at, "matrix", kind)? },
            StateKind::Pure => StateSpec::Pure { amplitudes: required(self.amplitudes, at, "amplitudes", kind)? },
            StateKind::Probabilities => StateSpec::Probabilities { entries: required(self.entries, at, "entries", kind)? },
        })
    }
}

impl RawConfig {
    fn typed(self) -> Result<ModelConfig, CliError> {
        Ok(ModelConfig {
            dimension: self.dimension,
            quorum: self.quorum.typed()?,
            generator: self.generator.typed()?,
            grid: self.grid.map(RawGrid::typed).transpose()?,
            tolerance: self.tolerance,
            strategy: self.strategy,
            seed: self.seed,
            states: self
                .states
                .into_iter()
                .enumerate()
                .map(|(k, s)| s.typed(&format!("states[{k}]")))
                .collect::<Result<_, _>>()?,
            consistency_states: self.consistency_states,
        })
    }
}

pub fn parse_config(text: &str, source: &Path) -> Result<ModelConfig, CliError> {
    parse_json::<RawConfig>(text, source)?.typed()
}

pub fn load_config(path: &Path) -> Result<ModelConfig, CliError> {
    parse_config(&read_text(path)?, path)
}

pub fn load_state(path: &Path) -> Result<StateSpec, CliError> {
    parse_json::<RawState>(&read_text(path)?, path)?.typed("<state>")
}

/// Overrides given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub strategy: Option<LiftStrategy>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

/// A configuration resolved into core objects.
#[derive(Debug, Clone)]
pub struct Model {
    /// The configuration with command-line overrides and defaults filled in.
    pub echo: ModelConfig,
    pub quorum: Quorum,
    pub generator: GkslGenerator,
    pub preset: Option<Preset>,
    pub strategy: LiftStrategy,
    pub tolerance: f64,
    pub seed: u64,
    /// `None` means the default grid derived from the lifted generator.
    pub grid: Option<Vec<f64>>,
    pub states: Vec<DensityMatrix>,
}

fn config_error(path: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Config { path: path.into(), message: message.to_string() }
}

/// Parses JSON text into `T`, reporting the failing field path and position.
fn parse_json<T: DeserializeOwned>(text: &str, source: &Path) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." || path == "?" { String::from("<root>") } else { path };
        config_error(
            path,
            format!("{} (in {}, line {} column {})", strip_position(&inner), source.display(), inner.line(), inner.column()),
        )
    })
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| config_error("<file>", format!("cannot read {}: {e}", path.display())))
}

pub fn matrix_from_spec(spec: &MatrixSpec, n: usize, path: &str) -> Result<ComplexMatrix, CliError> {
    if spec.len() != n || spec.iter().any(|row| row.len() != n) {
        return Err(config_error(path, format!("expected a {n}x{n} matrix of [re, im] pairs")));
    }
    if spec.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(config_error(path, "entries must be finite"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| Complex64::new(spec[i][j][0], spec[i][j][1])))
}

fn ket_from_spec(spec: &[Complex], n: usize, path: &str) -> Result<DVector<Complex64>, CliError> {
    if spec.len() != n {
        return Err(config_error(path, format!("expected {n} [re, im] amplitudes, found {}", spec.len())));
    }
    if spec.iter().flatten().any(|v| !v.is_finite()) {
        return Err(config_error(path, "amplitudes must be finite"));
    }
    Ok(DVector::from_fn(n, |i, _| Complex64::new(spec[i][0], spec[i][1])))
}

fn resolve_quorum(spec: &QuorumSpec, n: usize) -> Result<Quorum, CliError> {
    let quorum = match spec {
        QuorumSpec::Pauli { weights } => {
            if n != 2 {
                return Err(config_error("quorum.kind", format!("the pauli quorum needs dimension 2, config has {n}")));
            }
            pauli_quorum(weights[0], weights[1], weights[2]).map_err(|e| config_error("quorum.weights", e))?
        }
        QuorumSpec::Explicit { bases } => {
            let mut sectors = Vec::with_capacity(bases.len());
            for (a, b) in bases.iter().enumerate() {
                let at = format!("quorum.bases[{a}]");
                if b.vectors.len() != n {
                    return Err(config_error(format!("{at}.vectors"), format!("expected {n} basis vectors, found {}", b.vectors.len())));
                }
                let kets = b
                    .vectors
                    .iter()
                    .enumerate()
                    .map(|(k, v)| ket_from_spec(v, n, &format!("{at}.vectors[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let basis = MeasurementBasis::new(kets).map_err(|e| config_error(format!("{at}.vectors"), e))?;
                let label = b.label.clone().unwrap_or_else(|| (a + 1).to_string());
                sectors.push(Sector { label, basis, weight: b.weight });
            }
            let path = if bases.is_empty() { "quorum.bases" } else { "quorum.bases[*].weight" };
            Quorum::new(sectors).map_err(|e| config_error(path, e))?
        }
    };
    require_complete(&quorum).map_err(|e| config_error("quorum", e))?;
    Ok(quorum)
}

fn resolve_generator(spec: &GeneratorSpec, n: usize) -> Result<(GkslGenerator, Option<Preset>), CliError> {
    match spec {
        GeneratorSpec::Preset { name, omega, gamma } => {
            let need_omega = || omega.ok_or_else(|| config_error("generator.omega", format!("{name} needs omega")));
            let need_gamma = || gamma.ok_or_else(|| config_error("generator.gamma", format!("{name} needs gamma")));
            let preset = match name.as_str() {
                "example1" => {
                    if gamma.is_some() {
                        return Err(config_error("generator.gamma", "example1 takes no gamma"));
                    }
                    Preset::Example1 { omega: need_omega()? }
                }
                "example2" => Preset::Example2 { omega: need_omega()?, gamma: need_gamma()? },
                "example3" => {
                    if omega.is_some() {
                        return Err(config_error("generator.omega", "example3 takes no omega"));
                    }
                    Preset::Example3 { gamma: need_gamma()? }
                }
                other => {
                    return Err(config_error(
                        "generator.name",
                        format!("unknown preset '{other}' (expected example1, example2 or example3)"),
                    ))
                }
            };
            if n != 2 {
                return Err(config_error("dimension", format!("preset {name} is a qubit model, config has dimension {n}")));
            }
            let generator = preset.generator().map_err(|e| {
                let field = if e.to_string().contains("omega") { "generator.omega" } else { "generator.gamma" };
                config_error(field, e)
            })?;
            Ok((generator, Some(preset)))
        }
        GeneratorSpec::Explicit { hamiltonian, jumps } => {
            let h = matrix_from_spec(hamiltonian, n, "generator.hamiltonian")?;
            let vs = jumps
                .iter()
                .enumerate()
                .map(|(k, v)| matrix_from_spec(v, n, &format!("generator.jumps[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let generator = GkslGenerator::new(h, vs).map_err(|e| config_error("generator.hamiltonian", e))?;
            Ok((generator, None))
        }
    }
}

fn resolve_grid(spec: &GridSpec) -> Result<Vec<f64>, CliError> {
    let mut times = match spec {
        GridSpec::Explicit { times } => {
            if times.is_empty() {
                return Err(config_error("grid.times", "grid is empty"));
            }
            if let Some(k) = times.iter().position(|t| !(*t >= 0.0) || !t.is_finite()) {
                return Err(config_error(format!("grid.times[{k}]"), "times must be finite and non-negative"));
            }
            times.clone()
        }
        GridSpec::Log { start, stop, points, include_zero } => {
            if !(*start > 0.0) || !start.is_finite() {
                return Err(config_error("grid.start", "start must be positive and finite"));
            }
            if !(*stop >= *start) || !stop.is_finite() {
                return Err(config_error("grid.stop", "stop must be finite and at least start"));
            }
            if *points == 0 {
                return Err(config_error("grid.points", "points must be at least 1"));
            }
            let mut t = log_grid(*start, *stop, *points);
            if *include_zero {
                t.insert(0, 0.0);
            }
            t
        }
    };
    times.sort_by(f64::total_cmp);
    times.dedup();
    Ok(times)
}

/// Turns a state spec into a density matrix. Shape problems are config
/// errors; a well-formed matrix that is not a state is an invariant failure.
pub fn resolve_state(spec: &StateSpec, n: usize, path: &str) -> Result<DensityMatrix, CliError> {
    match spec {
        StateSpec::Bloch { x, y, z } => {
            if n != 2 {
                return Err(config_error(path, format!("Bloch states need dimension 2, config has {n}")));
            }
            let b = BlochVector::new(*x, *y, *z).map_err(CliError::Numeric)?;
            bloch_to_density(&b).map_err(CliError::Numeric)
        }
        StateSpec::Density { matrix } => {
            let m = matrix_from_spec(matrix, n, &format!("{path}.matrix"))?;
            DensityMatrix::new(m).map_err(CliError::Numeric)
        }
        StateSpec::Pure { amplitudes } => {
            let psi = ket_from_spec(amplitudes, n, &format!("{path}.amplitudes"))?;
            DensityMatrix::pure(&psi).map_err(CliError::Numeric)
        }
        StateSpec::Probabilities { .. } => {
            Err(config_error(format!("{path}.kind"), "expected a quantum state (bloch, density or pure)"))
        }
    }
}

/// Reads a tomographic vector given as `{"kind": "probabilities", ...}`.
pub fn resolve_probabilities(spec: &StateSpec, quorum: &Quorum, path: &str) -> Result<TomographicVector, CliError> {
    let StateSpec::Probabilities { entries } = spec else {
        return Err(config_error(format!("{path}.kind"), "expected probabilities"));
    };
    if entries.len() != quorum.vector_len() {
        return Err(config_error(
            format!("{path}.entries"),
            format!("expected {} entries, found {}", quorum.vector_len(), entries.len()),
        ));
    }
    if entries.iter().any(|p| !p.is_finite()) {
        return Err(config_error(format!("{path}.entries"), "entries must be finite"));
    }
    TomographicVector::from_entries(quorum.dim(), quorum.sector_count(), entries.clone())
        .map_err(|e| config_error(format!("{path}.entries"), e))
}

impl ModelConfig {
    pub fn resolve(mut self, overrides: &Overrides) -> Result<Model, CliError> {
        let n = self.dimension;
        if n < 2 {
            return Err(config_error("dimension", "dimension must be at least 2"));
        }
        if let Some(tol) = overrides.tolerance {
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(config_error("--tol", "tolerance must be positive and finite"));
            }
            self.tolerance = Some(tol);
        }
        let tolerance = *self.tolerance.get_or_insert(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0) || !tolerance.is_finite() {
            return Err(config_error("tolerance", "tolerance must be positive and finite"));
        }
        if overrides.seed.is_some() {
            self.seed = overrides.seed;
        }
        let seed = *self.seed.get_or_insert(0);

        let quorum = resolve_quorum(&self.quorum, n)?;
        let (generator, preset) = resolve_generator(&self.generator, n)?;

        let (strategy, field) = match (overrides.strategy, self.strategy) {
            (Some(s), _) => (s, "--strategy"),
            (None, Some(s)) => (s, "strategy"),
            (None, None) => (LiftStrategy::default_for(&quorum), "strategy"),
        };
        if !strategy.is_available(&quorum) {
            return Err(config_error(field, format!("{strategy} needs the qubit pauli quorum")));
        }
        self.strategy = Some(strategy);

        let grid = self.grid.as_ref().map(resolve_grid).transpose()?;
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| resolve_state(s, n, &format!("states[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        self.consistency_states.get_or_insert(DEFAULT_CONSISTENCY_STATES);

        Ok(Model { echo: self, quorum, generator, preset, strategy, tolerance, seed, grid, states })
    }
}

impl Model {
    /// Supplied states followed by seeded random ones, for the consistency check.
    pub fn probe_states(&self) -> Vec<DensityMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let extra = self.echo.consistency_states.unwrap_or(DEFAULT_CONSISTENCY_STATES);
        let n = self.quorum.dim();
        self.states.iter().cloned().chain((0..extra).map(|_| sampling::random_density(n, &mut rng))).collect()
    }
}
