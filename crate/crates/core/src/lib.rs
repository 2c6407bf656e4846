//! Two-phase optimization with Bézier simplex interpolation for expensive
//! bi-objective black-box problems.
//!
//! The first phase solves a handful of weighted-sum scalarizations with a
//! bounded derivative-free optimizer. The second phase fits a Bézier simplex
//! through the resulting solutions (parameterized by their weight vectors)
//! and spends the rest of the evaluation budget on points sampled from that
//! model.
//!
//! Around that core sits a small benchmarking harness: synthetic bi-objective
//! problems, an unbounded nondominated archive, a hypervolume-regret anytime
//! indicator, ECDF aggregation and an experiment runner.
//!
//! ```
//! use tpb::problems::{make_problem, FunctionKind};
//! use tpb::tpb::{run_tpb, TpbConfig};
//!
//! let problem = make_problem(FunctionKind::Sphere, FunctionKind::Sphere, 2, 1).unwrap();
//! let cfg = TpbConfig::for_budget(40);
//! let run = run_tpb(&problem, &cfg).unwrap();
//! assert!(run.ledger.len() <= 40);
//! assert_eq!(run.meta.b_star.len(), 3);
//! ```
//!
//! The `examples/` directory has one program per capability:
//! `bisphere_two_phase`, `bezier_fit`, `optimizers`, `hypervolume_archive`,
//! `ablation`, `parameter_sweep`, `ecdf_report`, `experiment_grid` and
//! `custom_problem`.

pub mod assess;
pub mod bezier;
pub mod cli;
pub mod dfo;
mod error;
pub mod problems;
pub mod scalarize;
pub mod tpb;

pub use error::{Error, Result};

/// A point in the search space.
pub type DecisionVector = Vec<f64>;
/// A point in the objective space.
pub type ObjectiveVector = Vec<f64>;
