//! Synthetic phantoms and exact-level noise.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ctf::compose_h;
use crate::error::{Error, Result};
use crate::field::{apply_support, Domain, GridSpec, SampledField, SupportSpec};
use crate::random::{self, support_window};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhantomKind {
    /// `count` Gaussian blobs with random centres and widths, tapered by the
    /// support window.
    GaussBlobs { count: usize, amplitude: f64 },
    /// Indicator of a disk around the support centre.
    Disk { radius: f64, amplitude: f64 },
    /// `count` concentric rings of alternating sign.
    Rings { count: usize, amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Phi,
    Mu,
    /// `h = -iφ - μ` with `μ` drawn from the next seed and scaled by
    /// `mu_scale`.
    ComplexH,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    #[serde(flatten)]
    pub kind: PhantomKind,
    pub target: Target,
    pub support: SupportSpec,
    pub seed: u64,
    #[serde(default = "default_mu_scale")]
    pub mu_scale: f64,
}

fn default_mu_scale() -> f64 {
    0.1
}

impl PhantomSpec {
    pub fn new(kind: PhantomKind, target: Target, support: SupportSpec, seed: u64) -> Self {
        PhantomSpec { kind, target, support, seed, mu_scale: default_mu_scale() }
    }
}

fn pattern(kind: &PhantomKind, support: &SupportSpec, grid: GridSpec, seed: u64) -> Result<SampledField> {
    let dim = grid.dim();
    let c = support.center;
    let dist = |x: [f64; 2]| {
        let d0 = x[0] - c[0];
        let d1 = if dim == 2 { x[1] - c[1] } else { 0.0 };
        (d0 * d0 + d1 * d1).sqrt()
    };
    let field = match *kind {
        PhantomKind::GaussBlobs { count, amplitude } => {
            if count == 0 {
                return Err(Error::InvalidParameter("gauss_blobs needs count >= 1".into()));
            }
            let mut rng = random::rng(seed);
            let r = support.radius();
            let blobs: Vec<([f64; 2], f64, f64)> = (0..count)
                .map(|_| {
                    let p = [c[0] + r * rng.gen_range(-0.5..0.5), c[1] + r * rng.gen_range(-0.5..0.5)];
                    (p, r * rng.gen_range(0.1..0.4), amplitude * rng.gen_range(0.5..1.0))
                })
                .collect();
            SampledField::from_fn(grid, Domain::Real, |x| {
                let v: f64 = blobs
                    .iter()
                    .map(|(p, w, a)| {
                        let d0 = x[0] - p[0];
                        let d1 = if dim == 2 { x[1] - p[1] } else { 0.0 };
                        a * (-(d0 * d0 + d1 * d1) / (2.0 * w * w)).exp()
                    })
                    .sum();
                Complex64::new(v * support_window(support, x, dim), 0.0)
            })
        }
        PhantomKind::Disk { radius, amplitude } => {
            if !(radius > 0.0) {
                return Err(Error::InvalidParameter(format!("disk radius {radius} must be positive")));
            }
            SampledField::from_fn(grid, Domain::Real, |x| {
                Complex64::new(if dist(x) < radius { amplitude } else { 0.0 }, 0.0)
            })
        }
        PhantomKind::Rings { count, amplitude } => {
            if count == 0 {
                return Err(Error::InvalidParameter("rings needs count >= 1".into()));
            }
            let r = support.radius();
            SampledField::from_fn(grid, Domain::Real, |x| {
                let k = (dist(x) / r * (2 * count) as f64).floor() as usize;
                let v = if k >= 2 * count {
                    0.0
                } else if k % 2 == 0 {
                    amplitude
                } else {
                    -amplitude
                };
                Complex64::new(v, 0.0)
            })
        }
    };
    apply_support(&field, support, false)
}

/// Real phase and absorption patterns `(φ, μ)`; `μ` uses `seed + 1`.
pub fn make_phantom_pair(spec: &PhantomSpec, grid: GridSpec) -> Result<(SampledField, SampledField)> {
    spec.support.check_fits(&grid)?;
    let phi = pattern(&spec.kind, &spec.support, grid, spec.seed)?;
    let mu = pattern(&spec.kind, &spec.support, grid, spec.seed.wrapping_add(1))?.scale_real(spec.mu_scale);
    Ok((phi, mu))
}

pub fn make_phantom(spec: &PhantomSpec, grid: GridSpec) -> Result<SampledField> {
    spec.support.check_fits(&grid)?;
    match spec.target {
        Target::Phi | Target::Mu => pattern(&spec.kind, &spec.support, grid, spec.seed),
        Target::ComplexH => {
            let (phi, mu) = make_phantom_pair(spec, grid)?;
            compose_h(&phi, &mu)
        }
    }
}

/// Adds a white Gaussian field rescaled to `‖ε‖ = level`; real input
/// receives real noise.
pub fn add_noise(contrast: &SampledField, level: f64, seed: u64) -> Result<SampledField> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level {level} must be nonnegative")));
    }
    if level == 0.0 {
        return Ok(contrast.clone());
    }
    let complex = contrast.imag_norm() > 0.0;
    let noise = random::white_full(*contrast.grid(), complex, &mut random::rng(seed));
    let noise = noise.scale_real(level / noise.norm()).retag(contrast.domain());
    contrast.add(&noise)
}
