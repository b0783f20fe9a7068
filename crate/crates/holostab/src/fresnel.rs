//! The unitary Fresnel propagator `D = F^{-1} m_f F` with
//! `m_f(ξ) = exp(-i|ξ|²/(2f))`, in multiplier and chirp form.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{apply_multiplier, centred_dft, Domain, GridSpec, SampledField};

/// Fresnel number `f > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FresnelNumber(f64);

impl FresnelNumber {
    pub fn new(f: f64) -> Result<Self> {
        if f.is_finite() && f > 0.0 {
            Ok(FresnelNumber(f))
        } else {
            Err(Error::InvalidParameter(format!("Fresnel number must be positive and finite, got {f}")))
        }
    }

    /// From the reduced number `fbar = f / 2π`.
    pub fn from_fbar(fbar: f64) -> Result<Self> {
        Self::new(2.0 * PI * fbar)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn fbar(self) -> f64 {
        self.0 / (2.0 * PI)
    }

    /// Fresnel number of `D_f ∘ D_g`: `1/h = 1/f + 1/g`.
    pub fn compose(self, other: FresnelNumber) -> FresnelNumber {
        FresnelNumber(1.0 / (1.0 / self.0 + 1.0 / other.0))
    }
}

impl TryFrom<f64> for FresnelNumber {
    type Error = Error;
    fn try_from(f: f64) -> Result<Self> {
        Self::new(f)
    }
}

impl From<FresnelNumber> for f64 {
    fn from(f: FresnelNumber) -> f64 {
        f.0
    }
}

impl fmt::Display for FresnelNumber {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{} (fbar {})", self.0, self.fbar())
    }
}

/// `m_f(ξ)` or its conjugate.
pub fn fresnel_multiplier(f: FresnelNumber, xi_sq: f64, inverse: bool) -> Complex64 {
    let phase = -xi_sq / (2.0 * f.value());
    Complex64::from_polar(1.0, if inverse { -phase } else { phase })
}

/// Phase increment of `m_f` between the two outermost frequency bins.
pub fn edge_phase_step(grid: &GridSpec, f: FresnelNumber) -> f64 {
    (grid.n() as f64 - 1.0) * grid.dxi() * grid.dxi() / (2.0 * f.value())
}

/// Refuses grids on which `m_f` changes by more than π between adjacent
/// bins at the grid edge.
pub fn check_sampling(grid: &GridSpec, f: FresnelNumber) -> Result<()> {
    let step = edge_phase_step(grid, f);
    if step > PI {
        return Err(Error::Aliasing(format!(
            "Fresnel multiplier phase step {step:.3} rad at the grid edge exceeds π (f = {}, n = {}, extent = {}); \
             enlarge the grid extent or the Fresnel number",
            f.value(),
            grid.n(),
            grid.extent()
        )));
    }
    Ok(())
}

/// `D h` (or `D^{-1} h` when `inverse` is set).
pub fn propagate(field: &SampledField, f: FresnelNumber, inverse: bool) -> Result<SampledField> {
    field.expect_domain(Domain::Real)?;
    let grid = *field.grid();
    check_sampling(&grid, f)?;
    apply_multiplier(field, |i| fresnel_multiplier(f, grid.xi_sq(i), inverse))
}

/// `n_f(x)^power` with `n_f(x) = exp(i f |x|²/2)`.
pub fn chirp(f: FresnelNumber, x_sq: f64, power: f64) -> Complex64 {
    Complex64::from_polar(1.0, power * 0.5 * f.value() * x_sq)
}

/// Default zero-padding factor of the chirp form.
pub fn default_chirp_pad(dim: usize) -> usize {
    if dim == 1 {
        16
    } else {
        4
    }
}

/// `D h` through the chirp form
/// `e^{-imπ/4} f^{m/2} n_f(x) F(n_f h)(f x)`.
pub fn propagate_chirp(field: &SampledField, f: FresnelNumber) -> Result<SampledField> {
    propagate_chirp_padded(field, f, default_chirp_pad(field.grid().dim()))
}

/// Chirp form with an explicit zero-padding factor.
///
/// The spectrum of `n_f h` is computed on a `pad`-times finer frequency
/// lattice and read off at `f x` by four-point Lagrange interpolation per
/// axis. Only samples with `f x` inside the frequency window can be
/// evaluated; the output is zero beyond that window. The nonzero samples of
/// the input must lie inside it, otherwise the call fails.
pub fn propagate_chirp_padded(field: &SampledField, f: FresnelNumber, pad: usize) -> Result<SampledField> {
    field.expect_domain(Domain::Real)?;
    if pad == 0 {
        return Err(Error::InvalidParameter("padding factor must be at least 1".into()));
    }
    let grid = *field.grid();
    let (n, dim) = (grid.n(), grid.dim());
    let np = n * pad;
    let offset = (np - n) / 2;
    let fv = f.value();
    let dxi_fine = 2.0 * PI / (pad as f64 * grid.extent());

    // per-axis stencil (base index, weights) for every output coordinate
    let stencils: Vec<Option<(usize, [f64; 4])>> = (0..n)
        .map(|k| {
            let t = fv * grid.coord(k) / dxi_fine + (np / 2) as f64;
            let base = t.floor();
            let lo = base as i64 - 1;
            (lo >= 0 && lo + 3 < np as i64).then(|| (lo as usize, lagrange4(t - base)))
        })
        .collect();
    for (i, v) in field.values().iter().enumerate() {
        let [a, b] = grid.axes(i);
        if *v != Complex64::new(0.0, 0.0) && (stencils[a].is_none() || (dim == 2 && stencils[b].is_none())) {
            let x = grid.position(i);
            return Err(Error::OutOfRange(format!(
                "input sample at ({}, {}) maps to f·x outside the frequency window ±{}",
                x[0],
                x[1],
                grid.max_frequency()
            )));
        }
    }

    let mut padded = vec![Complex64::new(0.0, 0.0); np.pow(dim as u32)];
    for (i, &v) in field.values().iter().enumerate() {
        let [a, b] = grid.axes(i);
        let at = if dim == 1 { a + offset } else { (a + offset) * np + b + offset };
        padded[at] = v * chirp(f, grid.x_sq(i), 1.0);
    }
    centred_dft(&mut padded, np, dim, false);
    let ft_scale = (grid.dx() / (2.0 * PI).sqrt()).powi(dim as i32);
    let prefactor = Complex64::from_polar(fv.powf(dim as f64 / 2.0) * ft_scale, -(dim as f64) * PI / 4.0);

    let values = (0..grid.len())
        .map(|i| {
            let [a, b] = grid.axes(i);
            let spec = match (stencils[a], dim) {
                (Some((la, wa)), 1) => (0..4).map(|s| padded[la + s] * wa[s]).sum::<Complex64>(),
                (Some((la, wa)), _) => match stencils[b] {
                    Some((lb, wb)) => (0..4)
                        .map(|s| {
                            let row = (la + s) * np;
                            wa[s] * (0..4).map(|t| padded[row + lb + t] * wb[t]).sum::<Complex64>()
                        })
                        .sum::<Complex64>(),
                    None => return Complex64::new(0.0, 0.0),
                },
                (None, _) => return Complex64::new(0.0, 0.0),
            };
            prefactor * chirp(f, grid.x_sq(i), 1.0) * spec
        })
        .collect();
    field.with_values(values)
}

/// Weights of the cubic through nodes -1, 0, 1, 2 evaluated at `u ∈ [0, 1)`.
fn lagrange4(u: f64) -> [f64; 4] {
    [
        -u * (u - 1.0) * (u - 2.0) / 6.0,
        (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
        -(u + 1.0) * u * (u - 2.0) / 2.0,
        (u + 1.0) * u * (u - 1.0) / 6.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(grid: GridSpec, width: f64) -> SampledField {
        SampledField::from_fn(grid, Domain::Real, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 < 0.25 {
                Complex64::new(1.0, 0.3 * x[0]) * (-r2 / (2.0 * width * width)).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn fresnel_number_validation() {
        assert!(FresnelNumber::new(0.0).is_err());
        assert!(FresnelNumber::new(-1.0).is_err());
        assert!(FresnelNumber::new(f64::NAN).is_err());
        let f = FresnelNumber::from_fbar(10.0).unwrap();
        assert_eq!(f.fbar(), 10.0);
        assert!(serde_json::from_str::<FresnelNumber>("-3.0").is_err());
    }

    #[test]
    fn constant_is_invariant() {
        let g = GridSpec::new(1, 128, 8.0).unwrap();
        let one = SampledField::from_real(g, Domain::Real, &[1.0; 128]).unwrap();
        let out = propagate(&one, FresnelNumber::new(40.0).unwrap(), false).unwrap();
        assert!(out.distance(&one).unwrap() < 1e-13);
    }

    #[test]
    fn inverse_undoes_forward() {
        let g = GridSpec::new(2, 32, 4.0).unwrap();
        let h = gauss(g, 0.2);
        let f = FresnelNumber::new(30.0).unwrap();
        let back = propagate(&propagate(&h, f, false).unwrap(), f, true).unwrap();
        assert!(back.distance(&h).unwrap() < 1e-13 * h.norm());
    }

    #[test]
    fn guard_rejects_undersampled_chirp() {
        let g = GridSpec::new(1, 256, 4.0).unwrap();
        let h = gauss(g, 0.1);
        assert!(matches!(propagate(&h, FresnelNumber::new(50.0).unwrap(), false), Err(Error::Aliasing(_))));
        assert!(propagate(&h, FresnelNumber::new(110.0).unwrap(), false).is_ok());
    }

    #[test]
    fn chirp_form_matches_multiplier_form_1d() {
        let g = GridSpec::new(1, 4096, 24.0).unwrap();
        let f = FresnelNumber::new(20.0 * PI).unwrap();
        let h = gauss(g, 0.08);
        let a = propagate(&h, f, false).unwrap();
        let b = propagate_chirp(&h, f).unwrap();
        let dev = (g.n() / 4..3 * g.n() / 4)
            .map(|k| (a.values()[k] - b.values()[k]).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-6, "max deviation {dev}");
    }

    #[test]
    fn chirp_form_matches_multiplier_form_2d() {
        let g = GridSpec::new(2, 128, 4.0).unwrap();
        let f = FresnelNumber::new(80.0).unwrap();
        let h = gauss(g, 0.1);
        let a = propagate(&h, f, false).unwrap();
        let b = propagate_chirp(&h, f).unwrap();
        let dev = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-4 * a.max_abs(), "max deviation {dev}");
    }

    #[test]
    fn chirp_out_of_range_is_reported() {
        // window ±(π/Δx)/f = ±0.1 cannot hold a support of radius 1/2
        let g = GridSpec::new(1, 256, 16.0).unwrap();
        let h = gauss(g, 0.1);
        let r = propagate_chirp(&h, FresnelNumber::new(500.0).unwrap());
        assert!(matches!(r, Err(Error::OutOfRange(_))));
        let zero = SampledField::zeros(g, Domain::Real);
        assert_eq!(propagate_chirp(&zero, FresnelNumber::new(500.0).unwrap()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn lagrange_weights_reproduce_cubics() {
        for &u in &[0.0, 0.25, 0.5, 0.9] {
            let w = lagrange4(u);
            let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
            let interp: f64 = (0..4).map(|s| w[s] * p(s as f64 - 1.0)).sum();
            assert!((interp - p(u)).abs() < 1e-14);
        }
    }
}
