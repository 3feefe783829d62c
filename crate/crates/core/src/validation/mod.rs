//! Cross-checks between the closed forms, direct quadrature and simulation.
//!
//! Every check becomes a [`ReportRow`]. Monte Carlo comparisons pass when the
//! closed form lies within `z` standard errors of the estimate. Quadrature and
//! identity comparisons pass when the gap is inside a declared tolerance.
//! Errors from an evaluator become failing rows; a sweep never aborts.

mod report;
mod suites;
mod sweep;

pub use report::{Check, ComparisonReport, Record, ReportHeader, ReportRow, Summary};
pub use suites::{
    run_suite, run_suites, verify_special_functions, Suite, Tolerances, ValidationConfig,
};
pub use sweep::{run_sweep, Compare, SweepRange, SweepSpec, SweepVariable};
