//! Continuous functions on `[0,1]` through their Faber-Schauder expansions.
//!
//! * [`series`]: synthesis and analysis of truncated expansions.
//! * [`regularity`]: Hölder criteria from coefficients and pointwise scans.
//! * [`algebra`]: compositions, power families and the modulus construction.
//! * [`levelset`]: dyadic covering counts of level sets.
//! * [`stochastic`]: Brownian bridges and the exceptional-vertex percolation.

pub mod algebra;
pub mod basis;
pub mod error;
pub mod func;
pub mod io;
pub mod levelset;
pub mod regularity;
pub mod rng;
pub mod schedule;
pub mod series;
pub mod stochastic;

pub use basis::{basis_eval, BasisIndex, MAX_DEPTH};
pub use error::{Error, Result};
pub use func::Func;
pub use schedule::{named_schedule, CoefficientSchedule, ExplicitTable, LevelLaw};
pub use series::{analyze, Analysis, SampleGrid, SchauderSeries};
