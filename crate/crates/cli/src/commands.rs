use std::path::{Path, PathBuf};

use serde::Serialize;

use tomowitness::lift::{
    consistency_check, default_grid, lift_generator, lift_map, witness, SimplexGenerator, WitnessReport,
};
use tomowitness::linalg::max_abs;
use tomowitness::presets::Preset;
use tomowitness::quantum::evolve_density;
use tomowitness::tomography::{decode, ellipsoid_membership, encode, in_quantum_subset, TomographicVector};
use tomowitness::{DensityMatrix, Error, Execution, LiftStrategy, Quorum};

use crate::config::{self, Model, ModelConfig, Overrides, StateSpec};
use crate::error::CliError;
use crate::output::{self, companion_path, rows, sci, Csv};

/// Largest allowed gap between the lifted and the direct trajectory / commuting square.
pub const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Invocation {
    pub config: PathBuf,
    pub state: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub overrides: Overrides,
}

impl Invocation {
    fn model(&self) -> Result<Model, CliError> {
        config::load_config(&self.config)?.resolve(&self.overrides)
    }

    /// The `--state` file, or else the first entry of the config's `states`.
    fn state_spec(&self, model: &Model, command: &str) -> Result<(StateSpec, String), CliError> {
        match &self.state {
            Some(path) => Ok((config::load_state(path)?, "<state>".to_string())),
            None => model.echo.states.first().cloned().map(|s| (s, "states[0]".to_string())).ok_or_else(|| {
                CliError::Config {
                    path: "--state".into(),
                    message: format!("{command} needs --state or a non-empty states list in the config"),
                }
            }),
        }
    }
}

/// Grid problems are reported against the config rather than as numeric failures.
fn grid_error(e: Error) -> CliError {
    match e {
        Error::GridTooNarrow(_) | Error::BadTime(_) => CliError::Config { path: "grid".into(), message: e.to_string() },
        other => CliError::Numeric(other),
    }
}

fn lifted(model: &Model) -> Result<SimplexGenerator, CliError> {
    Ok(lift_generator(&model.generator, &model.quorum, model.strategy)?)
}

fn grid_for(model: &Model, lifted: &SimplexGenerator) -> Vec<f64> {
    model.grid.clone().unwrap_or_else(|| default_grid(lifted))
}

fn sector_sums(p: &TomographicVector) -> Vec<f64> {
    (0..p.sector_count()).map(|a| p.sector(a).iter().sum()).collect()
}

fn format_vector(xs: &[f64]) -> String {
    format!("({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

#[derive(Serialize)]
struct EncodeReport {
    labels: Vec<String>,
    entries: Vec<f64>,
    sector_labels: Vec<String>,
    sector_sums: Vec<f64>,
}

pub fn encode_cmd(inv: &Invocation) -> Result<(), CliError> {
    let model = inv.model()?;
    let (spec, path) = inv.state_spec(&model, "encode")?;
    let rho = config::resolve_state(&spec, model.quorum.dim(), &path)?;
    let p = encode(&rho, &model.quorum)?;
    let labels = model.quorum.entry_labels();
    for (label, v) in labels.iter().zip(p.entries()) {
        println!("{label} = {v}");
    }
    println!("P = {}", format_vector(p.entries()));
    let report = EncodeReport {
        labels,
        entries: p.entries().to_vec(),
        sector_labels: sector_labels(&model.quorum),
        sector_sums: sector_sums(&p),
    };
    if let Some(out) = &inv.out {
        output::write_json(out, &report)?;
    }
    Ok(())
}

fn sector_labels(q: &Quorum) -> Vec<String> {
    q.sectors().iter().map(|s| s.label.clone()).collect()
}

#[derive(Serialize)]
struct DecodeReport {
    rho: Vec<Vec<[f64; 2]>>,
    in_quantum_subset: bool,
    min_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ellipsoid_value: Option<f64>,
}

pub fn decode_cmd(inv: &Invocation) -> Result<(), CliError> {
    let model = inv.model()?;
    let (spec, path) = inv.state_spec(&model, "decode")?;
    let p = config::resolve_probabilities(&spec, &model.quorum, &path)?;
    let rho = decode(&p, &model.quorum)?;
    let subset = in_quantum_subset(&p, &model.quorum, model.tolerance)?;
    let ellipsoid_value =
        if model.quorum.is_pauli_qubit() { Some(ellipsoid_membership(&p, &model.quorum)?) } else { None };
    println!("RHO:");
    print!("{}", output::render_complex_matrix(&rho));
    println!("MIN_EIGENVALUE: {:e}", subset.min_eigenvalue);
    if let Some(v) = ellipsoid_value {
        println!("ELLIPSOID: {v}");
    }
    println!("IN_QUANTUM_SUBSET: {}", subset.member);
    if let Some(out) = &inv.out {
        let report = DecodeReport {
            rho: output::complex_rows(&rho),
            in_quantum_subset: subset.member,
            min_eigenvalue: subset.min_eigenvalue,
            ellipsoid_value,
        };
        output::write_json(out, &report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LiftReport {
    strategy: LiftStrategy,
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
    kolmogorov: tomowitness::classical::KolmogorovCheck,
}

pub fn lift_cmd(inv: &Invocation) -> Result<(), CliError> {
    let model = inv.model()?;
    let lifted = lifted(&model)?;
    let labels = model.quorum.entry_labels();
    let kolmogorov = tomowitness::classical::is_kolmogorov(lifted.matrix(), model.tolerance);
    println!("STRATEGY: {}", model.strategy);
    println!("MATRIX:");
    print!("{}", output::render_matrix(lifted.matrix(), &labels));
    println!("KOLMOGOROV: {}", kolmogorov.verdict);
    if let Some(out) = &inv.out {
        let report = LiftReport { strategy: model.strategy, labels, matrix: rows(lifted.matrix()), kolmogorov };
        output::write_json(out, &report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StateVerdict {
    index: usize,
    in_quantum_subset: bool,
    min_eigenvalue: f64,
}

#[derive(Serialize)]
struct TimedMatrix {
    t: f64,
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct Matrices {
    labels: Vec<String>,
    generator: Vec<Vec<f64>>,
    propagators: Vec<TimedMatrix>,
}

#[derive(Serialize)]
struct RunReport {
    config: ModelConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<Preset>,
    witness: WitnessReport,
    consistency_max_error: f64,
    consistency_state_count: usize,
    states: Vec<StateVerdict>,
    matrices: Matrices,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

pub fn witness_cmd(inv: &Invocation) -> Result<(), CliError> {
    let model = inv.model()?;
    let lifted = lifted(&model)?;
    let grid = grid_for(&model, &lifted);
    let exec = Execution::default();
    let report = witness(&model.generator, &model.quorum, model.strategy, &grid, model.tolerance, exec)
        .map_err(grid_error)?;
    let probes = model.probe_states();
    let consistency = consistency_check(&model.generator, &model.quorum, model.strategy, &probes, &grid, exec)?;
    let states = model
        .states
        .iter()
        .enumerate()
        .map(|(index, rho)| {
            let v = in_quantum_subset(&encode(rho, &model.quorum)?, &model.quorum, model.tolerance)?;
            Ok(StateVerdict { index, in_quantum_subset: v.member, min_eigenvalue: v.min_eigenvalue })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let t_max = grid.iter().copied().fold(0.0, f64::max);
    let mut times = vec![report.scan.min_entry_at.0, t_max];
    times.dedup();
    let propagators = times
        .into_iter()
        .map(|t| Ok(TimedMatrix { t, matrix: rows(&lift_map(&lifted, t)?) }))
        .collect::<Result<Vec<_>, Error>>()?;
    let note = model.preset.and_then(|p| p.discrepancy_note());

    let mut lines = report.summary_lines();
    lines.push(format!("CONSISTENCY: max deviation {:e} over {} states", consistency, probes.len()));
    for s in &states {
        lines.push(format!("STATE {}: in quantum subset {} (min eigenvalue {:e})", s.index, s.in_quantum_subset, s.min_eigenvalue));
    }
    if let Some(n) = note {
        lines.push(n.to_string());
    }
    lines.push(report.verdict_line());

    let run = RunReport {
        config: model.echo.clone(),
        preset: model.preset,
        witness: report,
        consistency_max_error: consistency,
        consistency_state_count: probes.len(),
        states,
        matrices: Matrices { labels: model.quorum.entry_labels(), generator: rows(lifted.matrix()), propagators },
        note,
    };
    if let Some(out) = &inv.out {
        output::write_json(out, &run)?;
    }
    for line in &lines {
        println!("{line}");
    }
    if !(consistency <= AGREEMENT_TOL) {
        return Err(CliError::Invariant {
            invariant: "commuting square",
            detail: format!("lifted and direct evolution differ by {consistency:e} > {AGREEMENT_TOL:e}"),
        });
    }
    Ok(())
}

struct Step {
    t: f64,
    p: Vec<f64>,
    rho: DensityMatrix,
    deviation: f64,
    min_eigenvalue: f64,
    member: bool,
}

pub fn evolve_cmd(inv: &Invocation) -> Result<(), CliError> {
    let model = inv.model()?;
    let (spec, path) = inv.state_spec(&model, "evolve")?;
    let n = model.quorum.dim();
    let rho0 = config::resolve_state(&spec, n, &path)?;
    let lifted = lifted(&model)?;
    let grid = grid_for(&model, &lifted);
    let p0 = encode(&rho0, &model.quorum)?.to_dvector();
    let q = &model.quorum;
    let steps = Execution::default().try_map(&grid, |&t| -> Result<Step, Error> {
        let p = lift_map(&lifted, t)? * &p0;
        let rho = evolve_density(&model.generator, &rho0, t)?;
        let deviation = (encode(&rho, q)?.to_dvector() - &p).amax();
        let tv = TomographicVector::from_entries(n, q.sector_count(), p.iter().copied().collect())?;
        let subset = in_quantum_subset(&tv, q, model.tolerance)?;
        Ok(Step { t, p: tv.entries().to_vec(), rho, deviation, min_eigenvalue: subset.min_eigenvalue, member: subset.member })
    })?;

    let mut header = vec!["t".to_string()];
    header.extend(q.entry_labels());
    header.extend(["min_eigenvalue".to_string(), "in_quantum_subset".to_string()]);
    let mut csv = Csv::new(&header);
    let mut rho_header = vec!["t".to_string()];
    for i in 1..=n {
        for j in 1..=n {
            rho_header.push(format!("re_rho_{i}{j}"));
            rho_header.push(format!("im_rho_{i}{j}"));
        }
    }
    let mut rho_csv = Csv::new(&rho_header);
    for s in &steps {
        csv.row(
            std::iter::once(sci(s.t))
                .chain(s.p.iter().map(|v| sci(*v)))
                .chain([sci(s.min_eigenvalue), s.member.to_string()]),
        );
        let m = s.rho.matrix();
        rho_csv.row(std::iter::once(sci(s.t)).chain((0..n).flat_map(|i| {
            (0..n).flat_map(move |j| [sci(m[(i, j)].re), sci(m[(i, j)].im)])
        })));
    }
    let worst = steps.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let summary = [
        format!("STRATEGY: {}", model.strategy),
        format!("EVOLVE: {} time points", steps.len()),
        format!("TRAJECTORY_AGREEMENT: max deviation {worst:e}"),
    ];
    match &inv.out {
        Some(out) => {
            output::write_text(out, &csv.into_string())?;
            let rho_path = companion_path(out, "rho");
            output::write_text(&rho_path, &rho_csv.into_string())?;
            for line in &summary {
                println!("{line}");
            }
            println!("WROTE: {} {}", out.display(), rho_path.display());
        }
        None => {
            print!("{}", csv.into_string());
            for line in &summary {
                eprintln!("{line}");
            }
        }
    }
    if !(worst <= AGREEMENT_TOL) {
        return Err(CliError::Invariant {
            invariant: "trajectory agreement",
            detail: format!("lifted and direct trajectories differ by {worst:e} > {AGREEMENT_TOL:e}"),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct ExampleReport {
    preset: Preset,
    weights: [f64; 3],
    labels: Vec<String>,
    sector_local: Vec<Vec<f64>>,
    pseudoinverse: Vec<Vec<f64>>,
    closed_form_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    witness: WitnessReport,
}

fn default_preset(name: &str) -> Result<Preset, CliError> {
    match name {
        "example1" => Ok(Preset::Example1 { omega: 1.0 }),
        "example2" => Ok(Preset::Example2 { omega: 1.0, gamma: [1.0, 1.0, 1.0] }),
        "example3" => Ok(Preset::Example3 { gamma: [1.0, 2.0, 3.0] }),
        other => Err(CliError::Config {
            path: "<name>".into(),
            message: format!("unknown example '{other}' (expected example1, example2 or example3)"),
        }),
    }
}

pub fn example_cmd(
    name: Option<&str>,
    config_path: Option<&Path>,
    out: Option<&Path>,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let (preset, weights, tolerance) = match config_path {
        Some(path) => {
            let model = config::load_config(path)?.resolve(overrides)?;
            let Some(preset) = model.preset else {
                return Err(CliError::Config { path: "generator.kind".into(), message: "example needs a preset generator".into() });
            };
            if let Some(n) = name {
                default_preset(n)?;
                if n != preset.name() {
                    return Err(CliError::Config {
                        path: "generator.name".into(),
                        message: format!("config describes {}, command asked for {n}", preset.name()),
                    });
                }
            }
            let config::QuorumSpec::Pauli { weights } = model.echo.quorum else {
                return Err(CliError::Config { path: "quorum.kind".into(), message: "example needs the pauli quorum".into() });
            };
            (preset, weights, model.tolerance)
        }
        None => {
            let Some(n) = name else {
                return Err(CliError::Config { path: "<name>".into(), message: "example needs a name or --config".into() });
            };
            let tol = overrides.tolerance.unwrap_or(config::DEFAULT_TOLERANCE);
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(CliError::Config { path: "--tol".into(), message: "tolerance must be positive and finite".into() });
            }
            (default_preset(n)?, [1.0 / 3.0; 3], tol)
        }
    };
    let model = preset.model(weights).map_err(|e| CliError::Config { path: "quorum.weights".into(), message: e.to_string() })?;
    let local = lift_generator(&model.generator, &model.quorum, LiftStrategy::SectorLocal)?;
    let pinv = lift_generator(&model.generator, &model.quorum, LiftStrategy::Pseudoinverse)?;
    let closed_form_deviation = max_abs(&(local.matrix() - preset.closed_form(weights)?));
    let labels = model.quorum.entry_labels();
    let strategy = overrides.strategy.unwrap_or(LiftStrategy::SectorLocal);
    let chosen = if strategy == LiftStrategy::SectorLocal { &local } else { &pinv };
    let report = witness(&model.generator, &model.quorum, strategy, &default_grid(chosen), tolerance, Execution::default())?;
    let note = preset.discrepancy_note();

    println!("EXAMPLE: {}", output::to_json(&preset).split_whitespace().collect::<Vec<_>>().join(" "));
    println!("WEIGHTS: {}", format_vector(&weights));
    println!("MATRIX sector-local:");
    print!("{}", output::render_matrix(local.matrix(), &labels));
    println!("MATRIX pseudoinverse:");
    print!("{}", output::render_matrix(pinv.matrix(), &labels));
    println!("CLOSED_FORM: sector-local deviation {closed_form_deviation:e}");
    if let Some(printed) = preset.printed_variant(weights) {
        println!("PRINTED_VARIANT: deviation from derived matrix {:e} (not used)", max_abs(&(local.matrix() - printed)));
    }
    if let Some(n) = note {
        println!("{n}");
    }
    for line in report.summary_lines() {
        println!("{line}");
    }
    println!("{}", report.verdict_line());
    if let Some(out) = out {
        let r = ExampleReport {
            preset,
            weights,
            labels,
            sector_local: rows(local.matrix()),
            pseudoinverse: rows(pinv.matrix()),
            closed_form_deviation,
            note,
            witness: report,
        };
        output::write_json(out, &r)?;
    }
    Ok(())
}
