//! Tomographic probability representation of finite-dimensional quantum
//! states, simplex lifts of GKSL generators, and a stochasticity-based test
//! that separates classical Markov dynamics from genuinely quantum ones.
//!
//! ```
//! use tomowitness::{presets, lift, Execution, LiftStrategy};
//!
//! let model = presets::example3(1.0, 2.0, 3.0, [0.2, 0.3, 0.5]).unwrap();
//! let lifted = lift::lift_generator(&model.generator, &model.quorum, LiftStrategy::SectorLocal).unwrap();
//! let grid = lift::default_grid(&lifted);
//! let report = lift::witness(&model.generator, &model.quorum, LiftStrategy::SectorLocal, &grid, 1e-9, Execution::default()).unwrap();
//! assert_eq!(report.verdict_line(), "VERDICT: classical-compatible");
//! ```

pub mod classical;
pub mod error;
pub mod exec;
pub mod lift;
pub mod linalg;
pub mod presets;
pub mod quantum;
pub mod sampling;
pub mod tomography;

pub use classical::{KolmogorovGenerator, ProbabilityVector, StochasticMatrix, TransitionRates};
pub use error::{Error, Result};
pub use exec::Execution;
pub use lift::{LiftStrategy, SimplexGenerator, Verdict, WitnessReport};
pub use linalg::{ComplexMatrix, ComplexVector, RealMatrix};
pub use quantum::{BlochVector, DensityMatrix, GkslGenerator, Liouvillian};
pub use tomography::{MeasurementBasis, Quorum, Sector, TomographicVector};
