use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ProbeError;

pub const DEFAULT_RADIUS: f64 = 0.05;
pub const DEFAULT_SAMPLES: usize = 9;

/// A rectangular grid of probe points, each with a sampled neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub neighborhood_radius: f64,
    pub neighborhood_samples: usize,
}

impl GridSpec {
    pub fn new(re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> Result<Self, ProbeError> {
        let g = GridSpec {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            nx,
            ny,
            neighborhood_radius: DEFAULT_RADIUS,
            neighborhood_samples: DEFAULT_SAMPLES,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_neighborhood(mut self, radius: f64, samples: usize) -> Result<Self, ProbeError> {
        self.neighborhood_radius = radius;
        self.neighborhood_samples = samples;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ProbeError> {
        let bad = |m: &str| Err(ProbeError::InvalidGrid(m.to_string()));
        let all_finite = [self.re_min, self.re_max, self.im_min, self.im_max, self.neighborhood_radius]
            .iter()
            .all(|x| x.is_finite());
        if !all_finite {
            return bad("grid bounds and radius must be finite");
        }
        if !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return bad("grid bounds must satisfy re_min < re_max and im_min < im_max");
        }
        if self.nx == 0 || self.ny == 0 {
            return bad("nx and ny must be positive");
        }
        if !(self.neighborhood_radius > 0.0) {
            return bad("neighborhood radius must be positive");
        }
        if self.neighborhood_samples == 0 {
            return bad("neighborhood samples must be positive");
        }
        Ok(())
    }

    /// Non-fatal configuration remarks.
    pub fn warnings(&self) -> Vec<String> {
        let cell = self.cell_size();
        if self.neighborhood_radius >= 4.0 * cell {
            vec![format!(
                "neighborhood radius {} is at least 4x the smallest cell size {}",
                self.neighborhood_radius, cell
            )]
        } else {
            Vec::new()
        }
    }

    fn cell_size(&self) -> f64 {
        let step = |lo: f64, hi: f64, n: usize| if n > 1 { (hi - lo) / (n - 1) as f64 } else { hi - lo };
        step(self.re_min, self.re_max, self.nx).min(step(self.im_min, self.im_max, self.ny))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    /// Point with row-major index `idx` (imaginary part varies slowest).
    pub fn point(&self, idx: usize) -> Complex64 {
        let (iy, ix) = (idx / self.nx, idx % self.nx);
        Complex64::new(
            GridSpec::coord(self.re_min, self.re_max, self.nx, ix),
            GridSpec::coord(self.im_min, self.im_max, self.ny, iy),
        )
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Samples around grid point `idx`: the point itself, then the rest on the
    /// boundary circle at equally spaced angles with a seeded rotation. The
    /// rotation depends only on `(seed, idx)`.
    pub fn neighborhood(&self, idx: usize, seed: u64) -> Vec<Complex64> {
        neighborhood(self.point(idx), self.neighborhood_radius, self.neighborhood_samples, seed, idx as u64)
    }
}

pub(crate) fn neighborhood(center: Complex64, radius: f64, samples: usize, seed: u64, stream: u64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(samples);
    out.push(center);
    let ring = samples.saturating_sub(1);
    if ring == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let offset: f64 = rng.random();
    for k in 0..ring {
        let theta = TAU * (offset + k as f64 / ring as f64);
        out.push(center + Complex64::from_polar(radius, theta));
    }
    out
}
