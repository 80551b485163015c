//! Empirical normality probes.
//!
//! Marty's criterion says a family of meromorphic functions is normal exactly
//! where its spherical derivatives are locally uniformly bounded. The scans
//! here sample that statistic over a grid, a neighborhood of each grid point,
//! and a sweep of family indices, then read the growth in `n` as a
//! bounded/divergent *candidate*. Finite sampling cannot certify normality.

mod bounds;
mod grid;
mod scan;

use thiserror::Error;

use crate::expr::EvalError;

pub use bounds::{
    cauchy_derivative_bound, derivative_extrema, derivative_floor_check, hypotheses_check, local_bound_estimate,
    sd_bound_from_hypotheses, value_bound_check, DerivativeExtrema, FloorReport, HypothesesInput, HypothesesReport,
    LocalBoundReport, MemberBound, PointFloor, SegmentEvaluationError, ValueBoundReport, DEFAULT_SEGMENT_SAMPLES,
};
pub use grid::{GridSpec, DEFAULT_RADIUS, DEFAULT_SAMPLES};
pub use scan::{
    classify, classify_point, default_n_values, least_squares_slope, marty_scan, sd_family_scan,
    sd_spherical_statistic, ErrorFlags, MartyGridReport, NormalityVerdict, PointStat, ScanOptions, Thresholds,
    Verdict,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
