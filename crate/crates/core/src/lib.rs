//! Formation and communication-power optimization for a two-UAV bistatic
//! InSAR system.
//!
//! A master UAV transmits and receives, a slave UAV only receives; both fly
//! straight stripmap tracks and offload data to a ground station over FDMA
//! links. The crate evaluates swath coverage, interferometric quality metrics
//! and link budgets for a candidate formation, and maximizes coverage subject
//! to the full constraint set by alternating optimization over the slave and
//! master positions, each step solved by successive convex approximation on a
//! small interior-point solver. A brute-force grid oracle provides ground truth.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comms;
pub mod convex;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod oracle;
pub mod report;
pub mod sca;
pub mod scenario;
pub mod units;

pub use comms::{LinkGeometry, PowerSchedule};
pub use convex::{ConvexProgram, SolveReport, SolveStatus};
pub use error::{Error, Result};
pub use geometry::{FootprintInterval, Formation, Position};
pub use metrics::{FeasibilityReport, MetricsReport};
pub use oracle::{GridSpec, OracleResult};
pub use report::RunReport;
pub use sca::{ao_solve, benchmark1_vertical, benchmark2_equal_power, Mode, SCAConfig};
pub use scenario::{ScenarioConfig, SweepParam};
