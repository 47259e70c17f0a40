//! Continuous iterates of one-dimensional maps near a fixed point.
//!
//! Given a unit-step map x1 fixing the origin, this crate solves the
//! unit-step functional equation x1∘xt = xt∘x1 order by order for the
//! series coefficients of the flow xt, sharpens the truncated series by
//! n-fold conjugation with x1 and its inverse, and quantifies the
//! accuracy: exact relative errors where closed flows exist, successive
//! differences where they do not, truncation/conjugation error splits,
//! scaling laws, and radius-of-convergence diagnostics. Schröder
//! conjugacies are built both as Koenigs series (hyperbolic fixed points)
//! and as structured essential-singularity expansions from the velocity
//! series (parabolic fixed points).

pub mod analysis;
pub mod coeff;
pub mod conjugate;
pub mod error;
pub mod maps;
pub mod schroeder;
pub mod series;
pub mod solver;
pub mod tpoly;

pub use coeff::{Coeff, Rat};
pub use conjugate::{choose_direction, iterate_eval, ConjugatedApproximant, Direction};
pub use error::{Error, Result};
pub use maps::{catalog_get, MapSpec};
pub use series::TruncatedSeries;
pub use solver::{
    solve_flow_exact, solve_flow_numeric, velocity_series, verify_unit_step, FlowSeries,
    MapSeries, UnitStepReport,
};
pub use tpoly::TPoly;
