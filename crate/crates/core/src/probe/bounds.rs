//! Computable hypotheses and bound chains for locally bounded families:
//! segment mean-value bounds, derivative floors, a pointwise value bound, and
//! the Schwarzian bound that follows from them.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::grid::GridSpec;
use super::scan::{validate_n_values, ErrorFlags};
use super::ProbeError;
use crate::expr::{EvalError, FamilyExpr};
use crate::schwarzian::schwarzian;

pub const DEFAULT_SEGMENT_SAMPLES: usize = 256;

/// Sampled mean-value bound `|f(z) - f(z0)| <= K |z - z0|` for one member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBoundReport {
    pub n: u32,
    /// Max of `|f_n'|` over the sampled segment.
    pub k_estimate: f64,
    pub bound_rhs: f64,
    pub observed: f64,
    /// `f_n(z0)`, for checking a common fixed point.
    pub value_at_z0: Complex64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("segment evaluation failed for n in {flagged:?}")]
pub struct SegmentEvaluationError {
    pub flagged: Vec<u32>,
    /// Reports for the members that evaluated cleanly.
    pub reports: Vec<LocalBoundReport>,
}

fn segment_report(
    f: &FamilyExpr,
    n: u32,
    z0: Complex64,
    z: Complex64,
    samples: usize,
) -> Result<LocalBoundReport, EvalError> {
    let nf = n as f64;
    let mut k_estimate: f64 = 0.0;
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        let p = z0 + (z - z0) * t;
        k_estimate = k_estimate.max(f.eval_jet(nf, p)?.d1.norm());
    }
    let f0 = f.eval_jet(nf, z0)?.v;
    let f1 = f.eval_jet(nf, z)?.v;
    let bound_rhs = k_estimate * (z - z0).norm();
    let observed = (f1 - f0).norm();
    let pass = observed <= bound_rhs * (1.0 + 1e-9) + 1e-12;
    Ok(LocalBoundReport { n, k_estimate, bound_rhs, observed, value_at_z0: f0, pass })
}

/// Segment bound for every `n`. Members whose segment hits an evaluation
/// error are listed in the error together with the clean reports.
pub fn local_bound_estimate(
    f: &FamilyExpr,
    n_values: &[u32],
    z0: Complex64,
    z: Complex64,
    segment_samples: usize,
) -> Result<Vec<LocalBoundReport>, SegmentEvaluationError> {
    let samples = segment_samples.max(2);
    let mut reports = Vec::with_capacity(n_values.len());
    let mut flagged = Vec::new();
    for &n in n_values {
        match segment_report(f, n, z0, z, samples) {
            Ok(r) => reports.push(r),
            Err(_) => flagged.push(n),
        }
    }
    if flagged.is_empty() {
        Ok(reports)
    } else {
        Err(SegmentEvaluationError { flagged, reports })
    }
}

/// Derivative magnitudes and Schwarzian of one member over a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeExtrema {
    pub n: u32,
    pub min_d1: f64,
    pub max_d2: f64,
    pub max_d3: f64,
    /// Max `|S_{f_n}|`; NaN if no point was locally injective.
    pub max_abs_sd: f64,
    pub flags: ErrorFlags,
}

pub fn derivative_extrema(f: &FamilyExpr, n: u32, points: &[Complex64]) -> DerivativeExtrema {
    let mut out = DerivativeExtrema {
        n,
        min_d1: f64::INFINITY,
        max_d2: 0.0,
        max_d3: 0.0,
        max_abs_sd: f64::NAN,
        flags: ErrorFlags::empty(),
    };
    for &p in points {
        let j = match f.eval_jet(n as f64, p) {
            Ok(j) => j,
            Err(e) => {
                out.flags.insert(ErrorFlags::from_eval(&e));
                continue;
            }
        };
        out.min_d1 = out.min_d1.min(j.d1.norm());
        out.max_d2 = out.max_d2.max(j.d2.norm());
        out.max_d3 = out.max_d3.max(j.d3.norm());
        match schwarzian(&j) {
            Ok(s) => out.max_abs_sd = if out.max_abs_sd.is_nan() { s.norm() } else { out.max_abs_sd.max(s.norm()) },
            Err(_) => out.flags.insert(ErrorFlags::CRITICAL_POINT),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFloor {
    pub z: Complex64,
    /// `min |f_n'| >= epsilon` over the neighborhood, one entry per `n`.
    /// Entries with evaluation errors are `false`.
    pub pass: Vec<bool>,
    pub min_d1: f64,
    pub flags: ErrorFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloorReport {
    pub epsilon: f64,
    pub n_values: Vec<u32>,
    pub points: Vec<PointFloor>,
    pub global_min_d1: f64,
    pub all_pass: bool,
}

/// Checks `|f_n'| >= epsilon` on every grid neighborhood for every `n`.
pub fn derivative_floor_check(
    f: &FamilyExpr,
    n_values: &[u32],
    grid: &GridSpec,
    epsilon: f64,
    seed: u64,
) -> Result<FloorReport, ProbeError> {
    if !(epsilon > 0.0) {
        return Err(ProbeError::InvalidArgument("epsilon must be positive".into()));
    }
    grid.validate()?;
    validate_n_values(n_values)?;
    let mut points = Vec::with_capacity(grid.len());
    let mut global_min_d1 = f64::INFINITY;
    for idx in 0..grid.len() {
        let samples = grid.neighborhood(idx, seed);
        let mut flags = ErrorFlags::empty();
        let mut min_d1 = f64::INFINITY;
        let pass = n_values
            .iter()
            .map(|&n| {
                let ext = derivative_extrema(f, n, &samples);
                flags.insert(ext.flags);
                min_d1 = min_d1.min(ext.min_d1);
                let clean = !ext.flags.contains(ErrorFlags::POLE) && !ext.flags.contains(ErrorFlags::OVERFLOW);
                clean && ext.min_d1 >= epsilon
            })
            .collect::<Vec<_>>();
        global_min_d1 = global_min_d1.min(min_d1);
        points.push(PointFloor { z: grid.point(idx), pass, min_d1, flags });
    }
    let all_pass = points.iter().all(|p| p.pass.iter().all(|&b| b));
    Ok(FloorReport { epsilon, n_values: n_values.to_vec(), points, global_min_d1, all_pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueBoundReport {
    pub bound: f64,
    /// `|f_n(zeta)|` per member.
    pub values: Vec<f64>,
    pub max_abs: f64,
    pub argmax_n: u32,
    /// Smallest `n` with `|f_n(zeta)| > L`.
    pub first_violation: Option<u32>,
    pub pass: bool,
}

/// `max_n |f_n(zeta)| <= bound`.
pub fn value_bound_check(
    f: &FamilyExpr,
    n_values: &[u32],
    zeta: Complex64,
    bound: f64,
) -> Result<ValueBoundReport, EvalError> {
    let mut max_abs = f64::NEG_INFINITY;
    let mut argmax_n = n_values.first().copied().unwrap_or(0);
    let mut first_violation = None;
    let mut values = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let v = f.eval_jet(n as f64, zeta)?.v.norm();
        values.push(v);
        if v > max_abs {
            max_abs = v;
            argmax_n = n;
        }
        if v > bound && first_violation.is_none() {
            first_violation = Some(n);
        }
    }
    Ok(ValueBoundReport { bound, values, max_abs, argmax_n, first_violation, pass: first_violation.is_none() })
}

/// Cauchy estimate `M k! / r^k` for the k-th derivative at distance `r` inside
/// a region where `|f| <= M`.
pub fn cauchy_derivative_bound(m: f64, r: f64, k: u32) -> Result<f64, ProbeError> {
    if !(m >= 0.0) || !(r > 0.0) || !(1..=3).contains(&k) {
        return Err(ProbeError::InvalidArgument(format!("need M >= 0, r > 0, k in 1..=3 (got {m}, {r}, {k})")));
    }
    let factorial = (1..=k).product::<u32>() as f64;
    Ok(m * factorial / r.powi(k as i32))
}

/// Upper bound `M3/ε + 3/2 (M2/ε)^2` on `|S_f|` wherever `|f''| <= M2`,
/// `|f'''| <= M3` and `|f'| >= ε`.
pub fn sd_bound_from_hypotheses(m2: f64, m3: f64, epsilon: f64) -> Result<f64, ProbeError> {
    if !(epsilon > 0.0) || !(m2 >= 0.0) || !(m3 >= 0.0) {
        return Err(ProbeError::InvalidArgument(format!(
            "need epsilon > 0, M2 >= 0, M3 >= 0 (got {epsilon}, {m2}, {m3})"
        )));
    }
    let q = m2 / epsilon;
    Ok(m3 / epsilon + 1.5 * q * q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesesInput {
    pub epsilon: f64,
    pub zeta: Complex64,
    pub value_bound: f64,
    pub seed: u64,
}

/// Per-member bound chain on the sampled region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemberBound {
    pub n: u32,
    pub min_d1: f64,
    pub m2: f64,
    pub m3: f64,
    pub sd_bound: f64,
    pub observed_max_sd: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesesReport {
    pub floor: FloorReport,
    pub value: ValueBoundReport,
    pub members: Vec<MemberBound>,
    /// Family-wide maxima of `|f''|`, `|f'''|` and `|S|` over all members.
    pub m2: f64,
    pub m3: f64,
    pub sd_bound: f64,
    pub observed_max_sd: f64,
    pub bound_holds: bool,
    pub pass: bool,
}

/// Derivative floor and value bound hypotheses on `grid`, together with the
/// Schwarzian bound they imply and the Schwarzian actually observed.
pub fn hypotheses_check(
    f: &FamilyExpr,
    n_values: &[u32],
    grid: &GridSpec,
    input: &HypothesesInput,
) -> Result<HypothesesReport, ProbeError> {
    let floor = derivative_floor_check(f, n_values, grid, input.epsilon, input.seed)?;
    let value = value_bound_check(f, n_values, input.zeta, input.value_bound)?;
    let samples: Vec<Complex64> = (0..grid.len()).flat_map(|idx| grid.neighborhood(idx, input.seed)).collect();
    let mut members = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let ext = derivative_extrema(f, n, &samples);
        let sd_bound = sd_bound_from_hypotheses(ext.max_d2, ext.max_d3, input.epsilon)?;
        let holds = !(ext.max_abs_sd > sd_bound * (1.0 + 1e-9));
        members.push(MemberBound {
            n,
            min_d1: ext.min_d1,
            m2: ext.max_d2,
            m3: ext.max_d3,
            sd_bound,
            observed_max_sd: ext.max_abs_sd,
            holds,
        });
    }
    let m2 = members.iter().map(|m| m.m2).fold(0.0, f64::max);
    let m3 = members.iter().map(|m| m.m3).fold(0.0, f64::max);
    let observed_max_sd = members.iter().map(|m| m.observed_max_sd).fold(0.0, f64::max);
    let sd_bound = sd_bound_from_hypotheses(m2, m3, input.epsilon)?;
    let bound_holds = members.iter().all(|m| m.holds) && observed_max_sd <= sd_bound * (1.0 + 1e-9);
    let pass = floor.all_pass && value.pass && bound_holds;
    Ok(HypothesesReport { floor, value, members, m2, m3, sd_bound, observed_max_sd, bound_holds, pass })
}
