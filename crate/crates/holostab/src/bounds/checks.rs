//! Empirical checks of the inequalities behind the analytic bounds.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::analytic::ip2_bound;
use crate::ctf::{forward_s2, forward_s_alpha, CtfSpec, TwoDistanceSpec};
use crate::error::{Error, Result};
use crate::field::{apply_multiplier, unitary_ft, unitary_ift, GridSpec, SampledField, SupportSpec};
use crate::fresnel::FresnelNumber;
use crate::random::{self, FieldRng};

/// Integration region in frequency space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FrequencyRegion {
    Empty,
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    /// `|ξ_i| ≤ half_width` on every axis.
    Box { half_width: f64 },
    All,
}

impl FrequencyRegion {
    pub fn contains(&self, xi: [f64; 2], dim: usize) -> bool {
        let r2: f64 = xi[..dim].iter().map(|v| v * v).sum();
        match *self {
            FrequencyRegion::Empty => false,
            FrequencyRegion::Ball { radius } => r2 <= radius * radius,
            FrequencyRegion::Annulus { inner, outer } => inner * inner <= r2 && r2 <= outer * outer,
            FrequencyRegion::Box { half_width } => xi[..dim].iter().all(|v| v.abs() <= half_width),
            FrequencyRegion::All => true,
        }
    }
}

/// `(∫_B -Δ|ĝ|², 2R²‖g‖²)` for `g` supported in the centred ball of radius
/// `R`.
///
/// The Laplacian is spectral: `-Δ|ĝ|² = F(|x|² a)` with `a = F^{-1}|ĝ|²`
/// the autocorrelation of `g`, which has no wrap-around for `R < L/4`.
pub fn uncertainty_check(g: &SampledField, r: f64, region: &FrequencyRegion) -> Result<(f64, f64)> {
    let grid = *g.grid();
    if !(r > 0.0 && r < grid.extent() / 4.0) {
        return Err(Error::InvalidParameter(format!("radius {r} must lie in (0, L/4) for L = {}", grid.extent())));
    }
    let outside: f64 = g
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.x_sq(*i) > r * r)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
        * grid.cell().sqrt();
    if outside > 1e-12 * g.norm() {
        return Err(Error::SupportViolation(format!("energy {outside:e} outside radius {r}")));
    }
    let power = unitary_ft(g)?.map(|v| Complex64::new(v.norm_sqr(), 0.0));
    let auto = unitary_ift(&power)?;
    let weighted = auto.map_indexed(|i, v| v * grid.x_sq(i));
    let lap = unitary_ft(&weighted)?;
    let dim = grid.dim();
    let lhs = grid.freq_cell()
        * lap
            .values()
            .iter()
            .enumerate()
            .filter(|(j, _)| region.contains(grid.frequency(*j), dim))
            .map(|(_, v)| v.re)
            .sum::<f64>();
    Ok((lhs, 2.0 * r * r * g.norm_sq()))
}

/// `(‖S₀φ‖, f^{-1}‖Δφ‖)`.
pub fn optimality_check(phi: &SampledField, f: FresnelNumber) -> Result<(f64, f64)> {
    let lhs = forward_s_alpha(phi, &CtfSpec::new(f, 0.0)?)?.norm();
    let grid = *phi.grid();
    let lap = apply_multiplier(phi, |i| Complex64::new(grid.xi_sq(i), 0.0))?;
    Ok((lhs, lap.norm() / f.value()))
}

/// `(‖S⁽²⁾(φ, μ)‖, 2^{-1/2}‖S₀(φ + iμ)‖)` with `S₀` at `|f₋|`.
pub fn two_distance_check(phi: &SampledField, mu: &SampledField, spec: &TwoDistanceSpec) -> Result<(f64, f64)> {
    let (a, b) = forward_s2(phi, mu, spec)?;
    let lhs = (a.norm_sq() + b.norm_sq()).sqrt();
    let grid = *phi.grid();
    let joint = phi.zip_with(mu, |p, m| Complex64::new(p.re, m.re))?;
    let s0 = apply_multiplier(&joint, |i| Complex64::new(-2.0 * spec.s_minus(grid.xi_sq(i)), 0.0))?;
    Ok((lhs, std::f64::consts::FRAC_1_SQRT_2 * s0.norm()))
}

/// Random trial fields for the empirical checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialFamily {
    White,
    Smooth,
    /// Powers of the support window: the slowest-varying admissible fields.
    LowMode,
}

impl TrialFamily {
    pub const ALL: [TrialFamily; 3] = [TrialFamily::White, TrialFamily::Smooth, TrialFamily::LowMode];

    pub fn sample(&self, grid: GridSpec, support: &SupportSpec, rng: &mut FieldRng) -> Result<SampledField> {
        match self {
            TrialFamily::White => random::white_field(grid, support, false, rng),
            TrialFamily::Smooth => random::smooth_field(grid, support, false, rng),
            TrialFamily::LowMode => {
                let mask = support.mask(&grid)?;
                let p = rng.gen_range(1.0..4.0);
                let tilt = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
                let r = support.radius();
                let values = (0..grid.len())
                    .map(|i| {
                        if !mask[i] {
                            return Complex64::new(0.0, 0.0);
                        }
                        let x = grid.position(i);
                        let w = random::support_window(support, x, grid.dim()).powf(p);
                        let lin = 1.0 + tilt[0] * (x[0] - support.center[0]) / r + tilt[1] * (x[1] - support.center[1]) / r;
                        Complex64::new(w * lin, 0.0)
                    })
                    .collect();
                SampledField::from_values(grid, crate::field::Domain::Real, values)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalReport {
    pub bound: f64,
    pub trials: usize,
    pub violations: usize,
    pub min_ratio: f64,
    /// Smallest ratio per family, in [`TrialFamily::ALL`] order.
    pub min_by_family: Vec<(TrialFamily, f64)>,
    pub argmin_family: TrialFamily,
}

/// Tests `‖S_αφ‖ ≥ C·‖φ‖` with `C` the analytic bound on `trials` random
/// supported fields, cycling through the trial families.
pub fn empirical_ip2_check(
    support: &SupportSpec,
    spec: &CtfSpec,
    grid: GridSpec,
    trials: usize,
    seed: u64,
) -> Result<EmpiricalReport> {
    let bound = ip2_bound(spec.f().value(), spec.alpha(), grid.dim())?.value;
    let mut rng = random::rng(seed);
    let mut mins = [f64::INFINITY; 3];
    let mut violations = 0;
    for t in 0..trials {
        let k = t % 3;
        let phi = TrialFamily::ALL[k].sample(grid, support, &mut rng)?;
        let ratio = forward_s_alpha(&phi, spec)?.norm() / phi.norm();
        if ratio < bound {
            violations += 1;
        }
        mins[k] = mins[k].min(ratio);
    }
    let k_min = (0..3).min_by(|&a, &b| mins[a].total_cmp(&mins[b])).expect("three families");
    Ok(EmpiricalReport {
        bound,
        trials,
        violations,
        min_ratio: mins[k_min],
        min_by_family: TrialFamily::ALL.iter().copied().zip(mins).collect(),
        argmin_family: TrialFamily::ALL[k_min],
    })
}
