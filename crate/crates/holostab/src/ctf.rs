//! Linearized forward operators.
//!
//! For an image `h = -iφ - μ` (phase `φ`, absorption `μ`) the weak-object
//! hologram contrast is `T h = 2 Re(D h)`. With `θ(ξ) = |ξ|²/(2f)` this reads
//! in Fourier space
//!
//! ```text
//! F(T h) = -2 sin θ · φ̂ - 2 cos θ · μ̂ ,
//! ```
//!
//! so a homogeneous object `h = -i e^{-iα} φ` gives
//! `S_α φ := T h = F^{-1}(-2 s_α φ̂)` with `s_α = sin(θ + α)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{apply_multiplier, Domain, GridSpec, SampledField};
use crate::fresnel::{propagate, FresnelNumber};

/// Fresnel number and homogeneity angle `α ∈ [0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtfSpec {
    f: FresnelNumber,
    alpha: f64,
}

impl CtfSpec {
    pub fn new(f: FresnelNumber, alpha: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("homogeneity angle {alpha} outside [0, π/2]")));
        }
        Ok(CtfSpec { f, alpha })
    }

    pub fn f(&self) -> FresnelNumber {
        self.f
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `s_α(ξ) = sin(|ξ|²/(2f) + α)`.
    pub fn s_alpha(&self, xi_sq: f64) -> f64 {
        (xi_sq / (2.0 * self.f.value()) + self.alpha).sin()
    }

    /// Fourier symbol of `S_α`, `-2 s_α`.
    pub fn symbol(&self, xi_sq: f64) -> f64 {
        -2.0 * self.s_alpha(xi_sq)
    }

    /// Zero radius `ξ_j = (2f)^{1/2}(jπ - α)^{1/2}`; `None` when `jπ < α`
    /// (only `j = 0` with `α > 0`).
    pub fn zero_radius(&self, j: usize) -> Option<f64> {
        let t = j as f64 * PI - self.alpha;
        (t >= 0.0).then(|| (2.0 * self.f.value() * t).sqrt())
    }

    /// All zero radii not exceeding `max_radius`.
    pub fn zero_radii(&self, max_radius: f64) -> Vec<f64> {
        (0..)
            .map_while(|j| {
                let r = match self.zero_radius(j) {
                    Some(r) => r,
                    None => return Some(None),
                };
                (r <= max_radius).then_some(Some(r))
            })
            .flatten()
            .collect()
    }
}

/// Two Fresnel numbers `f1 ≠ f2` and the difference number
/// `f₋ = (1/f1 - 1/f2)^{-1}` (signed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoDistanceSpec {
    f1: FresnelNumber,
    f2: FresnelNumber,
}

impl TwoDistanceSpec {
    pub fn new(f1: FresnelNumber, f2: FresnelNumber) -> Result<Self> {
        let d = 1.0 / f1.value() - 1.0 / f2.value();
        if d == 0.0 || !(1.0 / d).is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Fresnel numbers {} and {} must differ",
                f1.value(),
                f2.value()
            )));
        }
        Ok(TwoDistanceSpec { f1, f2 })
    }

    pub fn f1(&self) -> FresnelNumber {
        self.f1
    }

    pub fn f2(&self) -> FresnelNumber {
        self.f2
    }

    pub fn fs(&self) -> [FresnelNumber; 2] {
        [self.f1, self.f2]
    }

    /// Signed `f₋`; negative when `f1 > f2`.
    pub fn f_minus(&self) -> f64 {
        1.0 / (1.0 / self.f1.value() - 1.0 / self.f2.value())
    }

    /// `|f₋|`.
    pub fn f_minus_abs(&self) -> FresnelNumber {
        FresnelNumber::new(self.f_minus().abs()).expect("f1 != f2")
    }

    /// `sin(|ξ|²/(2f₋))` with the signed `f₋`.
    pub fn s_minus(&self, xi_sq: f64) -> f64 {
        (xi_sq / (2.0 * self.f_minus())).sin()
    }

    /// Fourier symbol of `S⁽²⁾` mapping `(φ̂, μ̂)` to the two contrasts.
    pub fn matrix(&self, xi_sq: f64) -> [[f64; 2]; 2] {
        let row = |f: FresnelNumber| {
            let t = xi_sq / (2.0 * f.value());
            [-2.0 * t.sin(), -2.0 * t.cos()]
        };
        [row(self.f1), row(self.f2)]
    }

    /// Adjugate-type inverse with `adjugate · matrix = 2 sin(|ξ|²/(2f₋)) I`.
    pub fn adjugate(&self, xi_sq: f64) -> [[f64; 2]; 2] {
        let t1 = xi_sq / (2.0 * self.f1.value());
        let t2 = xi_sq / (2.0 * self.f2.value());
        [[-t2.cos(), t1.cos()], [t2.sin(), -t1.sin()]]
    }
}

pub(crate) fn expect_real(field: &SampledField, what: &str) -> Result<()> {
    field.expect_domain(Domain::Real)?;
    let im = field.imag_norm();
    if im > 1e-12 * field.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParameter(format!("{what} must be real-valued (imaginary norm {im:e})")));
    }
    Ok(())
}

/// `h = -iφ - μ`.
pub fn compose_h(phi: &SampledField, mu: &SampledField) -> Result<SampledField> {
    phi.zip_with(mu, |p, m| Complex64::new(0.0, -1.0) * p.re - m.re)
}

/// Homogeneous object `h = -i e^{-iα} φ`.
pub fn homogeneous_h(phi: &SampledField, alpha: f64) -> SampledField {
    let c = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -alpha);
    phi.map(|p| c * p.re)
}

/// `s_α` sampled on the frequency grid.
pub fn ctf_multiplier(spec: &CtfSpec, grid: &GridSpec) -> SampledField {
    let values = (0..grid.len()).map(|i| Complex64::new(spec.s_alpha(grid.xi_sq(i)), 0.0)).collect();
    SampledField::from_values(*grid, Domain::Frequency, values).expect("grid-sized")
}

/// `T h = 2 Re(D h)`.
pub fn forward_t(h: &SampledField, f: FresnelNumber) -> Result<SampledField> {
    Ok(propagate(h, f, false)?.map(|v| Complex64::new(2.0 * v.re, 0.0)))
}

/// `T(-iφ - μ)` evaluated through the transfer functions.
pub fn forward_t_ctf(phi: &SampledField, mu: &SampledField, f: FresnelNumber) -> Result<SampledField> {
    forward_t_ctf_signed(phi, mu, f, 1.0)
}

/// CTF route with the sign of the phase term scaled by `phase_sign`; the
/// verification suite uses `-1` as an injected fault.
pub(crate) fn forward_t_ctf_signed(
    phi: &SampledField,
    mu: &SampledField,
    f: FresnelNumber,
    phase_sign: f64,
) -> Result<SampledField> {
    expect_real(phi, "phase")?;
    expect_real(mu, "absorption")?;
    let grid = *phi.grid();
    let two = |i: usize| {
        let t = grid.xi_sq(i) / (2.0 * f.value());
        (-2.0 * t.sin(), -2.0 * t.cos())
    };
    let a = apply_multiplier(phi, |i| Complex64::new(phase_sign * two(i).0, 0.0))?;
    let b = apply_multiplier(mu, |i| Complex64::new(two(i).1, 0.0))?;
    Ok(a.add(&b)?.real_part())
}

/// Adjoint of `T` for the real inner product: `T* g = 2 D^{-1}(Re g)`.
pub fn adjoint_t(g: &SampledField, f: FresnelNumber) -> Result<SampledField> {
    let re = g.real_part().scale_real(2.0);
    propagate(&re, f, true)
}

/// `S_α φ = F^{-1}(-2 s_α φ̂)`.
pub fn forward_s_alpha(phi: &SampledField, spec: &CtfSpec) -> Result<SampledField> {
    expect_real(phi, "phase")?;
    let grid = *phi.grid();
    Ok(apply_multiplier(phi, |i| Complex64::new(spec.symbol(grid.xi_sq(i)), 0.0))?.real_part())
}

/// The pair `(T₁ h, T₂ h)` for `h = -iφ - μ`.
pub fn forward_s2(
    phi: &SampledField,
    mu: &SampledField,
    spec: &TwoDistanceSpec,
) -> Result<(SampledField, SampledField)> {
    phi.expect_compatible(mu)?;
    Ok((forward_t_ctf(phi, mu, spec.f1)?, forward_t_ctf(phi, mu, spec.f2)?))
}

/// Hologram intensity `|D(exp h)|²`.
pub fn nonlinear_forward(h: &SampledField, f: FresnelNumber) -> Result<SampledField> {
    let wave = propagate(&h.map(|v| v.exp()), f, false)?;
    Ok(wave.map(|v| Complex64::new(v.norm_sqr(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{unitary_ft, SupportSpec};
    use crate::random;

    fn spec(f: f64, alpha: f64) -> CtfSpec {
        CtfSpec::new(FresnelNumber::new(f).unwrap(), alpha).unwrap()
    }

    #[test]
    fn multiplier_scalar_values() {
        let s = spec(10.0, 0.3);
        assert!((s.s_alpha(1.0) - 0.35f64.sin()).abs() < 1e-15);
        assert!((s.s_alpha(1.0) - 0.342_897_807_455_451_3).abs() < 1e-15);
        assert_eq!(spec(10.0, FRAC_PI_2).s_alpha(0.0), 1.0);
        let s0 = spec(10.0, 0.0);
        assert!(s0.s_alpha(2.0 * PI * 10.0).abs() < 1e-15);
        let r1 = s0.zero_radius(1).unwrap();
        assert!(s0.s_alpha(r1 * r1).abs() < 1e-14);
    }

    #[test]
    fn zero_radii_increase() {
        let s = spec(30.0, 0.7);
        assert_eq!(s.zero_radius(0), None);
        let r = s.zero_radii(100.0);
        assert!(!r.is_empty());
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        assert!(r.iter().all(|&x| x <= 100.0));
        assert_eq!(spec(30.0, 0.0).zero_radii(1.0), vec![0.0]);
    }

    #[test]
    fn alpha_out_of_range() {
        assert!(CtfSpec::new(FresnelNumber::new(1.0).unwrap(), -0.1).is_err());
        assert!(CtfSpec::new(FresnelNumber::new(1.0).unwrap(), 1.6).is_err());
    }

    #[test]
    fn two_distance_difference_number() {
        let a = FresnelNumber::from_fbar(10.0).unwrap();
        let b = FresnelNumber::from_fbar(20.0).unwrap();
        let s = TwoDistanceSpec::new(a, b).unwrap();
        assert!((s.f_minus_abs().fbar() - 20.0).abs() < 1e-12);
        let swapped = TwoDistanceSpec::new(b, a).unwrap();
        assert!((swapped.f_minus() + s.f_minus()).abs() < 1e-9);
        assert!(TwoDistanceSpec::new(a, a).is_err());
    }

    #[test]
    fn dc_matrix_is_singular() {
        let s = TwoDistanceSpec::new(FresnelNumber::new(3.0).unwrap(), FresnelNumber::new(5.0).unwrap()).unwrap();
        assert_eq!(s.matrix(0.0), [[-0.0, -2.0], [-0.0, -2.0]]);
    }

    #[test]
    fn adjugate_times_matrix() {
        let s = TwoDistanceSpec::new(FresnelNumber::new(62.8).unwrap(), FresnelNumber::new(188.4).unwrap()).unwrap();
        for k in 0..50 {
            let xi_sq = 7.3 * k as f64;
            let a = s.adjugate(xi_sq);
            let m = s.matrix(xi_sq);
            let d = 2.0 * s.s_minus(xi_sq);
            for i in 0..2 {
                for j in 0..2 {
                    let p = a[i][0] * m[0][j] + a[i][1] * m[1][j];
                    let e = if i == j { d } else { 0.0 };
                    assert!((p - e).abs() < 1e-13, "{p} vs {e}");
                }
            }
        }
    }

    #[test]
    fn pure_absorption_bins() {
        let g = GridSpec::new(1, 256, 8.0).unwrap();
        let f = FresnelNumber::new(40.0).unwrap();
        let mu = random::white_field(g, &SupportSpec::stripe(), false, &mut random::rng(2)).unwrap();
        let h = mu.scale_real(-1.0);
        let th = unitary_ft(&forward_t(&h, f).unwrap()).unwrap();
        let m = unitary_ft(&mu).unwrap();
        for i in 0..g.len() {
            let expect = m.values()[i] * (-2.0 * (g.xi_sq(i) / (2.0 * f.value())).cos());
            assert!((th.values()[i] - expect).norm() < 1e-12 * m.max_abs());
        }
    }

    #[test]
    fn single_frequency_phase() {
        let g = GridSpec::new(1, 128, 8.0).unwrap();
        let f = FresnelNumber::new(30.0).unwrap();
        let j = 64 + 9;
        let xi = g.freq(j);
        let phi = SampledField::from_fn(g, Domain::Real, |x| Complex64::new((xi * x[0]).cos(), 0.0));
        let zero = SampledField::zeros(g, Domain::Real);
        let out = forward_t(&compose_h(&phi, &zero).unwrap(), f).unwrap();
        let gain = -2.0 * (xi * xi / (2.0 * f.value())).sin();
        assert!(out.distance(&phi.scale_real(gain)).unwrap() < 1e-12 * phi.norm());
    }

    #[test]
    fn s_alpha_at_right_angle_is_a_cosine_filter() {
        let g = GridSpec::new(1, 64, 8.0).unwrap();
        let s = spec(20.0, FRAC_PI_2);
        let one = SampledField::from_real(g, Domain::Real, &[1.0; 64]).unwrap();
        let out = forward_s_alpha(&one, &s).unwrap();
        assert!(out.distance(&one.scale_real(-2.0)).unwrap() < 1e-13);
    }

    #[test]
    fn nonlinear_reduces_to_absorption_without_propagation() {
        let g = GridSpec::new(1, 64, 4.0).unwrap();
        let mu = random::smooth_field(g, &SupportSpec::stripe(), false, &mut random::rng(5)).unwrap().scale_real(0.1);
        let h = mu.scale_real(-1.0);
        let out = nonlinear_forward(&h, FresnelNumber::new(1e13).unwrap()).unwrap();
        for (o, m) in out.values().iter().zip(mu.values()) {
            assert!((o.re - (-2.0 * m.re).exp()).abs() < 1e-9);
        }
        let zero = SampledField::zeros(g, Domain::Real);
        let one = nonlinear_forward(&zero, FresnelNumber::new(30.0).unwrap()).unwrap();
        assert!(one.values().iter().all(|v| (v.re - 1.0).abs() < 1e-14 && v.im == 0.0));
    }

    #[test]
    fn real_input_required() {
        let g = GridSpec::new(1, 16, 4.0).unwrap();
        let z = SampledField::from_fn(g, Domain::Real, |_| Complex64::new(0.0, 1.0));
        assert!(forward_s_alpha(&z, &spec(10.0, 0.0)).is_err());
    }
}
