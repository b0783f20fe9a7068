//! Numerical stability constants of the single-hologram problem with a
//! support constraint.

use serde::{Deserialize, Serialize};

use super::ops::{GramOperator, NormalOperator, SupportCoords};
use super::solver::{lanczos, power_iteration, shifted_power_min, Extreme, SolverOptions, SolverOutcome};
use crate::bounds;
use crate::error::{Error, Result};
use crate::field::{Domain, GridSpec, SampledField, Shape, SupportSpec};
use crate::fresnel::{chirp, FresnelNumber};
use crate::random;

/// Largest `fbar` for which exponentially small quantities are computed
/// numerically.
pub const VALIDITY_FBAR: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    SigmaMinT,
    LambdaMaxGram,
    CIp1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PowerIteration,
    ShiftedPower,
    Lanczos,
    Asymptotic,
}

/// Result of a spectral computation.
#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub quantity: Quantity,
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub f: f64,
    pub fbar: f64,
    pub grid: GridSpec,
    pub support: SupportSpec,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    /// Maximizing or minimizing vector, unit norm, supported in `Ω`.
    #[serde(skip)]
    pub mode: Option<SampledField>,
}

impl EigenReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn unit_field(coords: &SupportCoords, x: &[f64]) -> SampledField {
    let f = coords.scatter(x);
    let n = f.norm();
    f.scale_real(1.0 / n)
}

fn report(
    quantity: Quantity,
    value: f64,
    out: &SolverOutcome,
    f: FresnelNumber,
    support: &SupportSpec,
    grid: GridSpec,
    method: Method,
    mode: Option<SampledField>,
) -> EigenReport {
    EigenReport {
        quantity,
        value,
        residual: out.residual,
        iterations: out.iterations,
        f: f.value(),
        fbar: f.fbar(),
        grid,
        support: *support,
        method,
        warning: None,
        mode,
    }
}

/// Applies `G = F_f* F_f` to a field, masking it to `Ω` first.
pub fn gram_apply(h: &SampledField, f: FresnelNumber, support: &SupportSpec) -> Result<SampledField> {
    h.expect_domain(Domain::Real)?;
    GramOperator::new(f, support, *h.grid())?.apply_field(h)
}

fn check_shape(support: &SupportSpec, grid: &GridSpec) -> Result<()> {
    if support.shape == Shape::Ball && grid.dim() == 2 {
        return Err(Error::InvalidParameter("stability constants need a stripe or box support".into()));
    }
    Ok(())
}

/// Largest eigenvalue of the Gram operator by power iteration started from
/// the constant on the support.
pub fn gram_lambda_max(f: FresnelNumber, support: &SupportSpec, grid: GridSpec, tol: f64) -> Result<EigenReport> {
    check_shape(support, &grid)?;
    let op = GramOperator::new(f, support, grid)?;
    let out = power_iteration(&op, &op.coords().constant(), SolverOptions { tol, max_iter: 500_000 })?;
    let mode = unit_field(op.coords(), &out.vector);
    Ok(report(Quantity::LambdaMaxGram, out.value, &out, f, support, grid, Method::PowerIteration, Some(mode)))
}

/// `C = (1 - λ_max)^{1/2}` evaluated as the frequency energy of the
/// maximizer outside `Ω_f`.
///
/// For `fbar > 12` the two-term asymptotic value is returned with a
/// warning, as the complement energy is then below double precision.
pub fn stability_constant_ip1(f: FresnelNumber, support: &SupportSpec, grid: GridSpec, tol: f64) -> Result<EigenReport> {
    check_shape(support, &grid)?;
    if f.fbar() > VALIDITY_FBAR {
        let warning = format!("fbar = {} beyond the double-precision window; analytic asymptotics returned", f.fbar());
        log::warn!("{warning}");
        let a = bounds::prolate_asymptotic(f.value(), 0)?;
        let value = match (support.shape, grid.dim()) {
            (Shape::Box, 2) => (2.0 * a - a * a).sqrt(),
            _ => bounds::ip1_bound(f.value())?,
        };
        return Ok(EigenReport {
            quantity: Quantity::CIp1,
            value,
            residual: 0.0,
            iterations: 0,
            f: f.value(),
            fbar: f.fbar(),
            grid,
            support: *support,
            method: Method::Asymptotic,
            warning: Some(warning),
            mode: None,
        });
    }
    let op = GramOperator::new(f, support, grid)?;
    let lam = gram_lambda_max(f, support, grid, tol)?;
    let mode = lam.mode.clone().expect("power iteration returns its vector");
    let c = op.complement_energy(&mode)?.sqrt();
    Ok(EigenReport { quantity: Quantity::CIp1, value: c, ..lam })
}

/// Choice of eigensolver for `σ_min(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvdMethod {
    /// Power iteration on `μ I - P T*T P`.
    ShiftedPower { shift: f64 },
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    pub method: SvdMethod,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions { method: SvdMethod::Lanczos, tol: 1e-10, max_iter: 2_000_000, seed: 0x5eed }
    }
}

/// `σ_min` of `T` restricted to `L²_Ω` with the default Lanczos solver.
pub fn smallest_sv_t(f: FresnelNumber, support: &SupportSpec, grid: GridSpec, tol: f64) -> Result<EigenReport> {
    smallest_sv_t_with(f, support, grid, &SvdOptions { tol, ..SvdOptions::default() })
}

pub fn smallest_sv_t_with(f: FresnelNumber, support: &SupportSpec, grid: GridSpec, opts: &SvdOptions) -> Result<EigenReport> {
    check_shape(support, &grid)?;
    let op = NormalOperator::new(f, support, grid)?;
    let start = random::white_field(grid, support, true, &mut random::rng(opts.seed))?;
    let start = op.coords().gather(&start);
    let solver = SolverOptions { tol: opts.tol, max_iter: opts.max_iter };
    let (out, method) = match opts.method {
        SvdMethod::ShiftedPower { shift } => (shifted_power_min(&op, shift, &start, solver)?, Method::ShiftedPower),
        SvdMethod::Lanczos => (lanczos(&op, &start, Extreme::Smallest, solver)?, Method::Lanczos),
    };
    let sigma = out.value.max(0.0).sqrt();
    let mode = unit_field(op.coords(), &out.vector);
    Ok(report(Quantity::SigmaMinT, sigma, &out, f, support, grid, method, Some(mode)))
}

/// Least stable mode `φ₀` and its comparison with the leading prolate
/// function.
#[derive(Debug, Clone, Serialize)]
pub struct LeastStableMode {
    pub sigma_min: f64,
    /// `|⟨n_f^{1/2} φ₀, ψ₀⟩| / (‖·‖ ‖·‖)`.
    pub correlation: f64,
    pub iterations: usize,
    pub residual: f64,
    #[serde(skip)]
    pub mode: SampledField,
    #[serde(skip)]
    pub demodulated: SampledField,
    #[serde(skip)]
    pub psi0: SampledField,
}

pub fn least_stable_mode(f: FresnelNumber, support: &SupportSpec, grid: GridSpec) -> Result<LeastStableMode> {
    let sv = smallest_sv_t(f, support, grid, 1e-10)?;
    let mode = sv.mode.clone().expect("solver returns its vector");
    let demodulated = mode.map_indexed(|i, v| v * chirp(f, grid.x_sq(i), 0.5));
    let psi0 = gram_lambda_max(f, support, grid, 1e-10)?.mode.expect("power iteration returns its vector");
    let correlation = demodulated.inner(&psi0)?.norm() / (demodulated.norm() * psi0.norm());
    Ok(LeastStableMode { sigma_min: sv.value, correlation, iterations: sv.iterations, residual: sv.residual, mode, demodulated, psi0 })
}

/// `‖T h‖ / ‖h‖` for a supported field, used to probe modes directly.
pub fn stability_ratio(h: &SampledField, f: FresnelNumber) -> Result<f64> {
    Ok(crate::ctf::forward_t(h, f)?.norm() / h.norm())
}

/// Spectral energy split of `n_f^{1/2} h` inside and outside `(f/2)Ω`,
/// the quantity bounding `‖T h‖` from below.
pub fn twin_free_energy(h: &SampledField, f: FresnelNumber, support: &SupportSpec) -> Result<f64> {
    let grid = *h.grid();
    let op = GramOperator::new(f, support, grid)?;
    let demod = h.map_indexed(|i, v| v * chirp(f, grid.x_sq(i), 0.5));
    Ok(op.complement_energy(&demod)?.sqrt() / h.norm())
}
