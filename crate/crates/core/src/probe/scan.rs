use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::GridSpec;
use super::ProbeError;
use crate::expr::{EvalError, FamilyExpr};
use crate::jet::JetError;
use crate::schwarzian::{schwarzian, spherical_derivative};

/// Per-point evaluation failures seen during a scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ErrorFlags(u8);

impl ErrorFlags {
    pub const POLE: ErrorFlags = ErrorFlags(1);
    pub const OVERFLOW: ErrorFlags = ErrorFlags(2);
    pub const CRITICAL_POINT: ErrorFlags = ErrorFlags(4);

    const NAMES: [(ErrorFlags, &'static str); 3] = [
        (ErrorFlags::POLE, "pole"),
        (ErrorFlags::OVERFLOW, "overflow"),
        (ErrorFlags::CRITICAL_POINT, "critical_point"),
    ];

    pub fn empty() -> Self {
        ErrorFlags(0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, other: ErrorFlags) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn insert(&mut self, other: ErrorFlags) {
        self.0 |= other.0;
    }

    pub fn names(self) -> impl Iterator<Item = &'static str> {
        ErrorFlags::NAMES.into_iter().filter(move |(f, _)| self.contains(*f)).map(|(_, n)| n)
    }

    pub(crate) fn from_eval(e: &EvalError) -> Self {
        match e.kind {
            JetError::DivisionByZero { .. } | JetError::LogOfZero { .. } => ErrorFlags::POLE,
            JetError::Overflow { .. } | JetError::NonFinite => ErrorFlags::OVERFLOW,
        }
    }
}

/// Semicolon-joined flag names, empty when no flags are set.
impl fmt::Display for ErrorFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names().collect::<Vec<_>>().join(";"))
    }
}

/// Scan statistics at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStat {
    pub z: Complex64,
    /// Max of the statistic over sampled `n` and neighborhood samples.
    pub sup_stat: f64,
    pub argmax_n: Option<u32>,
    /// Least-squares slope of `ln stat` against `ln n` over the top half of
    /// the sweep, taken through the upper concave hull of those points.
    /// NaN with fewer than three finite samples there; `+inf` when
    /// every evaluation hit a pole.
    pub growth_slope: f64,
    pub flags: ErrorFlags,
    pub finite_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartyGridReport {
    pub grid: GridSpec,
    pub n_values: Vec<u32>,
    pub seed: u64,
    pub points: Vec<PointStat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanOptions {
    pub seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

/// The default sweep `1..=64`.
pub fn default_n_values() -> Vec<u32> {
    (1..=64).collect()
}

pub(crate) fn validate_n_values(n_values: &[u32]) -> Result<(), ProbeError> {
    if n_values.is_empty() {
        return Err(ProbeError::InvalidArgument("n_values must be nonempty".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ProbeError::InvalidArgument("n_values must be strictly ascending".into()));
    }
    Ok(())
}

/// Marty statistic: sup of `f_n^#` over each point's neighborhood.
pub fn marty_scan(
    f: &FamilyExpr,
    grid: &GridSpec,
    n_values: &[u32],
    opts: &ScanOptions,
) -> Result<MartyGridReport, ProbeError> {
    run_scan(grid, n_values, opts, |p, n| {
        f.eval_jet(n, p).map(|j| spherical_derivative(&j)).map_err(|e| ErrorFlags::from_eval(&e))
    })
}

const STENCIL_STEPS_PER_RADIUS: f64 = 8.0;

/// Schwarzian of `f_n` at `z`, with failures mapped to flags.
fn sd_at(f: &FamilyExpr, n: f64, z: Complex64) -> Result<Complex64, ErrorFlags> {
    let j = f.eval_jet(n, z).map_err(|e| ErrorFlags::from_eval(&e))?;
    schwarzian(&j).map_err(|_| ErrorFlags::CRITICAL_POINT)
}

/// Spherical derivative of `z ↦ S_{f_n}(z)` at `p`, with `S'` from a 5-point
/// central stencil of step `h`. Differences at the rounding level of the
/// stencil values are reported as zero.
pub fn sd_spherical_statistic(f: &FamilyExpr, n: f64, p: Complex64, h: f64) -> Result<f64, ErrorFlags> {
    let step = Complex64::new(h, 0.0);
    let s = |k: f64| sd_at(f, n, p + step * k);
    let (sm2, sm1, s0, sp1, sp2) = (s(-2.0)?, s(-1.0)?, s(0.0)?, s(1.0)?, s(2.0)?);
    let num = sm2 - 8.0 * sm1 + 8.0 * sp1 - sp2;
    let scale = sm2.norm() + 8.0 * sm1.norm() + 8.0 * sp1.norm() + sp2.norm();
    let dsd = if num.norm() <= 1024.0 * f64::EPSILON * scale { 0.0 } else { num.norm() / (12.0 * h) };
    let stat = dsd / (1.0 + s0.norm_sqr());
    if stat.is_finite() {
        Ok(stat)
    } else {
        Err(ErrorFlags::OVERFLOW)
    }
}

/// Marty statistic of the Schwarzian family `{S_{f_n}}`.
pub fn sd_family_scan(
    f: &FamilyExpr,
    grid: &GridSpec,
    n_values: &[u32],
    opts: &ScanOptions,
) -> Result<MartyGridReport, ProbeError> {
    let h = grid.neighborhood_radius / STENCIL_STEPS_PER_RADIUS;
    run_scan(grid, n_values, opts, |p, n| sd_spherical_statistic(f, n, p, h))
}

fn run_scan<F>(grid: &GridSpec, n_values: &[u32], opts: &ScanOptions, stat: F) -> Result<MartyGridReport, ProbeError>
where
    F: Fn(Complex64, f64) -> Result<f64, ErrorFlags> + Sync,
{
    grid.validate()?;
    validate_n_values(n_values)?;
    let per_point = |idx: usize| {
        let samples = grid.neighborhood(idx, opts.seed);
        point_stat(grid.point(idx), &samples, n_values, &stat)
    };
    let workers = opts.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let points = if workers <= 1 {
        (0..grid.len()).map(per_point).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ProbeError::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
        pool.install(|| (0..grid.len()).into_par_iter().map(per_point).collect())
    };
    Ok(MartyGridReport { grid: *grid, n_values: n_values.to_vec(), seed: opts.seed, points })
}

fn point_stat<F>(z: Complex64, samples: &[Complex64], n_values: &[u32], stat: &F) -> PointStat
where
    F: Fn(Complex64, f64) -> Result<f64, ErrorFlags>,
{
    let mut flags = ErrorFlags::empty();
    let mut finite_samples = 0;
    let mut per_n: Vec<Option<f64>> = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let mut best: Option<f64> = None;
        for &p in samples {
            match stat(p, n as f64) {
                Ok(s) => {
                    finite_samples += 1;
                    best = Some(best.map_or(s, |b| b.max(s)));
                }
                Err(fl) => flags.insert(fl),
            }
        }
        per_n.push(best);
    }

    let mut sup_stat = 0.0;
    let mut argmax_n = None;
    for (&n, s) in n_values.iter().zip(&per_n) {
        if let Some(s) = *s {
            if argmax_n.is_none() || s > sup_stat {
                sup_stat = s;
                argmax_n = Some(n);
            }
        }
    }

    let growth_slope = if finite_samples == 0 && flags.contains(ErrorFlags::POLE) {
        f64::INFINITY
    } else {
        let tail = n_values.len() / 2;
        let pts: Vec<(f64, f64)> = n_values[tail..]
            .iter()
            .zip(&per_n[tail..])
            .filter_map(|(&n, s)| s.map(|s| ((n as f64).ln(), s.max(1e-300).ln())))
            .collect();
        // A zero of the statistic at some n would otherwise read as growth
        // after it; fitting the upper concave hull fills such dips.
        least_squares_slope(&upper_hull(&pts))
    };

    PointStat { z, sup_stat, argmax_n, growth_slope, flags, finite_samples }
}

/// Replaces each `y` by the least concave majorant of `pts` at its `x`.
/// `pts` must be sorted by strictly increasing `x`.
fn upper_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop `a` when it lies on or below the chord from `o` to `p`
            if (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut k = 0;
    pts.iter()
        .map(|&(x, y)| {
            while k + 1 < hull.len() && hull[k + 1].0 <= x {
                k += 1;
            }
            if k + 1 == hull.len() {
                return (x, y.max(hull[k].1));
            }
            let (l, r) = (hull[k], hull[k + 1]);
            (x, l.1 + (r.1 - l.1) * (x - l.0) / (r.0 - l.0))
        })
        .collect()
}

/// Slope of the least-squares line through `pts`; NaN for fewer than three.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 3 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "bounded")]
    BoundedCandidate,
    #[serde(rename = "divergent")]
    DivergentCandidate,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::BoundedCandidate => "bounded",
            Verdict::DivergentCandidate => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Thresholds for reading a scan as bounded or divergent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub slope_threshold: f64,
    pub decay_threshold: f64,
    pub cap: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { slope_threshold: 0.5, decay_threshold: 0.1, cap: 1e6 }
    }
}

impl Thresholds {
    pub fn new(slope_threshold: f64, decay_threshold: f64, cap: f64) -> Result<Self, ProbeError> {
        if !(decay_threshold <= slope_threshold) {
            return Err(ProbeError::InvalidArgument("decay threshold must not exceed slope threshold".into()));
        }
        if !(cap > 0.0) {
            return Err(ProbeError::InvalidArgument("cap must be positive".into()));
        }
        Ok(Thresholds { slope_threshold, decay_threshold, cap })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityVerdict {
    pub verdict: Verdict,
    pub thresholds: Thresholds,
}

pub fn classify_point(p: &PointStat, t: &Thresholds) -> Verdict {
    if p.growth_slope >= t.slope_threshold || p.sup_stat >= t.cap {
        Verdict::DivergentCandidate
    } else if p.growth_slope <= t.decay_threshold && p.sup_stat < t.cap {
        Verdict::BoundedCandidate
    } else {
        Verdict::Inconclusive
    }
}

pub fn classify(report: &MartyGridReport, thresholds: &Thresholds) -> Vec<NormalityVerdict> {
    report
        .points
        .iter()
        .map(|p| NormalityVerdict { verdict: classify_point(p, thresholds), thresholds: *thresholds })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn stat(slope: f64, sup: f64) -> PointStat {
        PointStat {
            z: Complex64::new(0.0, 0.0),
            sup_stat: sup,
            argmax_n: Some(1),
            growth_slope: slope,
            flags: ErrorFlags::empty(),
            finite_samples: 10,
        }
    }

    #[test]
    fn classify_rule() {
        let t = Thresholds::default();
        assert_eq!(classify_point(&stat(1.0, 32.0), &t), Verdict::DivergentCandidate);
        assert_eq!(classify_point(&stat(-0.8, 0.65), &t), Verdict::BoundedCandidate);
        assert_eq!(classify_point(&stat(0.3, 10.0), &t), Verdict::Inconclusive);
        assert_eq!(classify_point(&stat(-1.0, 2e6), &t), Verdict::DivergentCandidate);
        assert_eq!(classify_point(&stat(f64::NAN, 1.0), &t), Verdict::Inconclusive);
        assert_eq!(classify_point(&stat(f64::INFINITY, 0.0), &t), Verdict::DivergentCandidate);
    }

    #[test]
    fn threshold_validation() {
        assert!(Thresholds::new(0.1, 0.5, 1e6).is_err());
        assert!(Thresholds::new(0.5, 0.1, 0.0).is_err());
        assert!(Thresholds::new(0.5, 0.5, 1.0).is_ok());
    }

    #[test]
    fn flags_display() {
        let mut f = ErrorFlags::empty();
        assert_eq!(f.to_string(), "");
        f.insert(ErrorFlags::CRITICAL_POINT);
        f.insert(ErrorFlags::POLE);
        assert_eq!(f.to_string(), "pole;critical_point");
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<_> = (1..=5).map(|k| ((k as f64).ln(), 2.0 * (k as f64).ln() + 1.0)).collect();
        assert!((least_squares_slope(&pts) - 2.0).abs() < 1e-12);
        assert!(least_squares_slope(&pts[..2]).is_nan());
    }

    #[test]
    fn pole_only_point_is_divergent() {
        // every member has its pole at the origin and the neighborhood is the point alone
        let f = parse("1/z").unwrap();
        let g = GridSpec::new((-1.0, 1.0), (-1.0, 1.0), 3, 3).unwrap().with_neighborhood(0.1, 1).unwrap();
        let rep = marty_scan(&f, &g, &(1..=8).collect::<Vec<_>>(), &ScanOptions::default()).unwrap();
        let centre = &rep.points[4];
        assert_eq!(centre.z, Complex64::new(0.0, 0.0));
        assert!(centre.flags.contains(ErrorFlags::POLE));
        assert_eq!(centre.finite_samples, 0);
        assert_eq!(centre.growth_slope, f64::INFINITY);
        assert_eq!(classify_point(centre, &Thresholds::default()), Verdict::DivergentCandidate);
    }

    #[test]
    fn hull_fills_dips_and_keeps_lines() {
        let line: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0 * i as f64 - 1.0)).collect();
        let hull = upper_hull(&line);
        for (a, b) in hull.iter().zip(&line) {
            assert!((a.1 - b.1).abs() < 1e-12);
        }
        let dip = [(0.0, 0.0), (1.0, -0.5), (2.0, -5.0), (3.0, -1.5), (4.0, -2.0)];
        let hull = upper_hull(&dip);
        assert_eq!(hull[2], (2.0, -1.0));
        assert_eq!(hull[1], (1.0, -0.5));
        assert!(least_squares_slope(&hull) < 0.0);
        assert!(least_squares_slope(&dip[2..]) > 0.0);
    }

    #[test]
    fn n_values_must_ascend() {
        let f = parse("z").unwrap();
        let g = GridSpec::new((0.0, 1.0), (0.0, 1.0), 2, 2).unwrap();
        assert!(marty_scan(&f, &g, &[], &ScanOptions::default()).is_err());
        assert!(marty_scan(&f, &g, &[3, 2], &ScanOptions::default()).is_err());
    }

    #[test]
    fn constant_schwarzian_has_zero_statistic() {
        let f = parse("exp(n*z)").unwrap();
        for n in [1.0, 7.0, 32.0, 64.0] {
            for p in [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.9)] {
                assert_eq!(sd_spherical_statistic(&f, n, p, 0.05 / 8.0), Ok(0.0));
            }
        }
    }
}
