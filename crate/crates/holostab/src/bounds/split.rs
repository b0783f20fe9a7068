//! Splitting of frequency space into the neighbourhood `D_ε` of the CTF
//! zeros, where `|s_α| < sin ε`, and its complement.

use std::f64::consts::PI;

use serde::Serialize;

use crate::ctf::CtfSpec;
use crate::error::{Error, Result};
use crate::field::{unitary_ft, SampledField};

/// Open spherical shell `b₋ < |ξ| < b₊` around the zero radius `ξ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shell {
    pub j: usize,
    pub lower: f64,
    pub zero: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSplit {
    pub f: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Radius of the central ball `B_0`; zero when `α ≥ ε`.
    pub b0: f64,
    /// Shells with `b₋ < max_radius`, increasing.
    pub shells: Vec<Shell>,
    pub max_radius: f64,
    /// Shells cut by `max_radius` (the last one may extend past it).
    pub truncated_shells: usize,
}

impl FourierSplit {
    /// Whether `|ξ| = r` lies in `D_ε`.
    pub fn in_dead_zone(&self, r: f64) -> bool {
        r < self.b0 || self.shells.iter().any(|s| s.lower < r && r < s.upper)
    }
}

/// Radii `b_0` and `b_{j±} = (ξ_j² ± 2fε)^{1/2}` up to `max_radius`.
pub fn fourier_split(spec: &CtfSpec, epsilon: f64, max_radius: f64) -> Result<FourierSplit> {
    if !(epsilon > 0.0 && epsilon <= PI / 6.0) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} outside (0, π/6]")));
    }
    if !(max_radius > 0.0 && max_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("max_radius = {max_radius} must be positive")));
    }
    let f = spec.f().value();
    let alpha = spec.alpha();
    let b0 = (2.0 * f * (epsilon - alpha).max(0.0)).sqrt();
    let shells: Vec<Shell> = (1..)
        .map(|j| {
            let z2 = 2.0 * f * (j as f64 * PI - alpha);
            Shell {
                j,
                lower: (z2 - 2.0 * f * epsilon).sqrt(),
                zero: z2.sqrt(),
                upper: (z2 + 2.0 * f * epsilon).sqrt(),
            }
        })
        .take_while(|s| s.lower < max_radius)
        .collect();
    let truncated_shells = shells.iter().filter(|s| s.upper > max_radius).count();
    Ok(FourierSplit { f, alpha, epsilon, b0, shells, max_radius, truncated_shells })
}

/// Spectral energy of `φ` inside and outside `D_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitEnergy {
    pub inside: f64,
    pub outside: f64,
    /// `2 sin ε · ‖φ̂|_{D_ε^c}‖`, a lower bound for `‖S_α φ‖`.
    pub lower_bound: f64,
}

pub fn split_energy(phi: &SampledField, spec: &CtfSpec, epsilon: f64) -> Result<SplitEnergy> {
    let grid = *phi.grid();
    let max_radius = (0..grid.len()).map(|i| grid.xi_sq(i)).fold(0.0f64, f64::max).sqrt() + grid.dxi();
    let split = fourier_split(spec, epsilon, max_radius)?;
    let spec_phi = unitary_ft(phi)?;
    let cell = grid.freq_cell();
    let (mut inside, mut outside) = (0.0, 0.0);
    for (i, v) in spec_phi.values().iter().enumerate() {
        if split.in_dead_zone(grid.xi_sq(i).sqrt()) {
            inside += v.norm_sqr() * cell;
        } else {
            outside += v.norm_sqr() * cell;
        }
    }
    Ok(SplitEnergy { inside, outside, lower_bound: 2.0 * epsilon.sin() * outside.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fresnel::FresnelNumber;

    fn spec(f: f64, alpha: f64) -> CtfSpec {
        CtfSpec::new(FresnelNumber::new(f).unwrap(), alpha).unwrap()
    }

    #[test]
    fn first_shell_radicals() {
        let s = fourier_split(&spec(10.0, 0.0), PI / 6.0, 100.0).unwrap();
        let sh = s.shells[0];
        assert!((sh.lower - (20.0 * PI - 20.0 * PI / 6.0).sqrt()).abs() < 1e-12);
        assert!((sh.upper - (20.0 * PI + 20.0 * PI / 6.0).sqrt()).abs() < 1e-12);
        assert!((s.b0 - (20.0 * PI / 6.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn no_central_ball_when_alpha_exceeds_epsilon() {
        let s = fourier_split(&spec(10.0, 0.6), 0.5, 50.0).unwrap();
        assert_eq!(s.b0, 0.0);
    }

    #[test]
    fn boundaries_sit_on_level_set() {
        let sp = spec(7.0, 0.3);
        let eps = 0.4;
        let s = fourier_split(&sp, eps, 60.0).unwrap();
        for sh in &s.shells {
            for r in [sh.lower, sh.upper] {
                assert!((sp.s_alpha(r * r).abs() - eps.sin()).abs() < 1e-10);
            }
            assert!(sh.lower < sh.zero && sh.zero < sh.upper);
        }
        assert!(s.shells.windows(2).all(|w| w[0].upper < w[1].lower));
        assert_eq!(s.truncated_shells, usize::from(s.shells.last().unwrap().upper > 60.0));
    }

    #[test]
    fn dead_zone_is_sublevel_set() {
        let sp = spec(5.0, 0.1);
        let eps = 0.3;
        let s = fourier_split(&sp, eps, 40.0).unwrap();
        for k in 0..4000 {
            let r = 0.01 * k as f64 + 0.003;
            assert_eq!(s.in_dead_zone(r), sp.s_alpha(r * r).abs() < eps.sin(), "r = {r}");
        }
    }

    #[test]
    fn epsilon_range_checked() {
        assert!(fourier_split(&spec(5.0, 0.0), 0.0, 10.0).is_err());
        assert!(fourier_split(&spec(5.0, 0.0), 1.0, 10.0).is_err());
    }
}
