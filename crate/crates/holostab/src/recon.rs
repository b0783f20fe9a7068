//! Reconstruction: Gabor back-propagation, twin-free data, and regularized
//! homogeneous and two-distance CTF inversion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ctf::{expect_real, CtfSpec, TwoDistanceSpec};
use crate::error::{Error, Result};
use crate::field::{apply_support, unitary_ft, unitary_ift, Domain, GridSpec, SampledField, SupportSpec};
use crate::fresnel::{propagate, FresnelNumber};

/// Default regularization relative to `max |s|²` on the grid.
pub const DEFAULT_REL_REG: f64 = 1e-3;

/// Smallest `|s|` tolerated on the grid without regularization.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReconSpec {
    Single(CtfSpec),
    TwoDistance(TwoDistanceSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconConfig {
    /// Tikhonov parameter; `None` selects `1e-3 · max |s|²`.
    pub reg: Option<f64>,
    pub spec: ReconSpec,
    /// When set, the estimate is masked to the support once.
    pub support: Option<SupportSpec>,
}

impl ReconConfig {
    pub fn single(spec: CtfSpec) -> Self {
        ReconConfig { reg: None, spec: ReconSpec::Single(spec), support: None }
    }

    pub fn two_distance(spec: TwoDistanceSpec) -> Self {
        ReconConfig { reg: None, spec: ReconSpec::TwoDistance(spec), support: None }
    }

    pub fn with_reg(self, reg: f64) -> Self {
        ReconConfig { reg: Some(reg), ..self }
    }

    pub fn with_support(self, support: SupportSpec) -> Self {
        ReconConfig { support: Some(support), ..self }
    }
}

/// `D(contrast)`; for exact data `D T h = D²(h) + h̄`.
pub fn gabor_backprop(contrast: &SampledField, f: FresnelNumber) -> Result<SampledField> {
    expect_real(contrast, "contrast")?;
    propagate(contrast, f, false)
}

/// `D(contrast)` on `Ω^c`, equal to `D²(h)|_{Ω^c}` for `h` supported in `Ω`.
pub fn twin_free_data(contrast: &SampledField, f: FresnelNumber, support: &SupportSpec) -> Result<SampledField> {
    apply_support(&gabor_backprop(contrast, f)?, support, true)
}

fn resolve_reg(reg: Option<f64>, s: &[f64]) -> Result<f64> {
    match reg {
        Some(r) if !(r >= 0.0 && r.is_finite()) => {
            Err(Error::InvalidParameter(format!("regularization {r} must be nonnegative")))
        }
        Some(r) => {
            if r == 0.0 {
                if let Some(v) = s.iter().find(|v| v.abs() <= ZERO_TOL) {
                    return Err(Error::CtfZero(format!("|s| = {:e} on the grid with zero regularization", v.abs())));
                }
            }
            Ok(r)
        }
        None => Ok(DEFAULT_REL_REG * s.iter().fold(0.0f64, |m, v| m.max(v * v))),
    }
}

fn finish(est: SampledField, support: &Option<SupportSpec>) -> Result<SampledField> {
    let est = est.real_part();
    match support {
        Some(s) => apply_support(&est, s, false),
        None => Ok(est),
    }
}

/// Regularized inverse of `S_α`: `F^{-1}(σ/(σ² + reg) · ĉ)` with
/// `σ = -2 s_α`.
pub fn invert_ctf_single(contrast: &SampledField, config: &ReconConfig) -> Result<SampledField> {
    let ReconSpec::Single(spec) = config.spec else {
        return Err(Error::InvalidParameter("single-distance inversion needs a CtfSpec".into()));
    };
    expect_real(contrast, "contrast")?;
    let grid = *contrast.grid();
    let s: Vec<f64> = (0..grid.len()).map(|i| spec.s_alpha(grid.xi_sq(i))).collect();
    let reg = resolve_reg(config.reg, &s)?;
    let spec_c = unitary_ft(contrast)?;
    let out = spec_c.map_indexed(|i, v| {
        let sigma = -2.0 * s[i];
        v * (sigma / (sigma * sigma + reg))
    });
    finish(unitary_ift(&out)?, &config.support)
}

/// Explicit two-distance inverse: `(φ̂, μ̂) = 2s/(4s² + reg) · adj(S) · (ĉ₁, ĉ₂)`
/// with `s = sin(|ξ|²/(2f₋))` and `adj(S) · S = 2s · I`.
pub fn invert_two_distance(
    c1: &SampledField,
    c2: &SampledField,
    config: &ReconConfig,
) -> Result<(SampledField, SampledField)> {
    let ReconSpec::TwoDistance(spec) = config.spec else {
        return Err(Error::InvalidParameter("two-distance inversion needs a TwoDistanceSpec".into()));
    };
    expect_real(c1, "first contrast")?;
    expect_real(c2, "second contrast")?;
    c1.expect_compatible(c2)?;
    let grid = *c1.grid();
    let s: Vec<f64> = (0..grid.len()).map(|i| spec.s_minus(grid.xi_sq(i))).collect();
    let reg = resolve_reg(config.reg, &s)?;
    let (a, b) = (unitary_ft(c1)?, unitary_ft(c2)?);
    let mut phi = Vec::with_capacity(grid.len());
    let mut mu = Vec::with_capacity(grid.len());
    for (i, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
        let adj = spec.adjugate(grid.xi_sq(i));
        let w = 2.0 * s[i] / (4.0 * s[i] * s[i] + reg);
        phi.push((x * adj[0][0] + y * adj[0][1]) * w);
        mu.push((x * adj[1][0] + y * adj[1][1]) * w);
    }
    let to_real = |v: Vec<Complex64>| -> Result<SampledField> {
        finish(unitary_ift(&SampledField::from_values(grid, Domain::Frequency, v)?)?, &config.support)
    };
    Ok((to_real(phi)?, to_real(mu)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconMetrics {
    /// `‖est - truth‖ / ‖truth‖`.
    pub relative_error: f64,
    /// Relative error restricted to the support, when one is given.
    pub support_error: Option<f64>,
    /// `‖est|_{Ω^c}‖ / ‖truth‖`, when a support is given.
    pub outside_norm: Option<f64>,
    /// Data residual `‖forward(est) - data‖ / ‖data‖`, when supplied.
    pub residual: Option<f64>,
}

impl ReconMetrics {
    pub fn with_residual(self, predicted: &SampledField, data: &SampledField) -> Result<Self> {
        Ok(ReconMetrics { residual: Some(predicted.distance(data)? / data.norm()), ..self })
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

pub fn recon_metrics(truth: &SampledField, estimate: &SampledField, support: Option<&SupportSpec>) -> Result<ReconMetrics> {
    truth.expect_compatible(estimate)?;
    let tn = truth.norm();
    let diff = estimate.sub(truth)?;
    let (support_error, outside_norm) = match support {
        Some(s) => (
            Some(ratio(apply_support(&diff, s, false)?.norm(), apply_support(truth, s, false)?.norm())),
            Some(ratio(apply_support(estimate, s, true)?.norm(), tn)),
        ),
        None => (None, None),
    };
    Ok(ReconMetrics { relative_error: ratio(diff.norm(), tn), support_error, outside_norm, residual: None })
}

/// Frequency bins within `bins · Δξ` of a zero of `sin(|ξ|²/(2 f₋))`.
pub fn zero_band_mask(grid: &GridSpec, spec: &TwoDistanceSpec, bins: f64) -> Vec<bool> {
    let fm = spec.f_minus_abs();
    let w = bins * grid.dxi();
    let reach = (0..grid.len()).map(|i| grid.xi_sq(i)).fold(0.0f64, f64::max).sqrt() + w;
    let zeros = CtfSpec::new(fm, 0.0).expect("α = 0 is admissible").zero_radii(reach);
    (0..grid.len())
        .map(|i| {
            let r = grid.xi_sq(i).sqrt();
            zeros.iter().any(|z| (r - z).abs() <= w)
        })
        .collect()
}

/// Relative error over the frequency bins outside `mask`.
pub fn masked_spectral_error(truth: &SampledField, estimate: &SampledField, mask: &[bool]) -> Result<f64> {
    truth.expect_compatible(estimate)?;
    let (a, b) = (unitary_ft(truth)?, unitary_ft(estimate)?);
    let (mut num, mut den) = (0.0, 0.0);
    for ((x, y), &m) in a.values().iter().zip(b.values()).zip(mask) {
        if !m {
            num += (y - x).norm_sqr();
            den += x.norm_sqr();
        }
    }
    Ok(ratio(num.sqrt(), den.sqrt()))
}
