use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Domain, GridSpec, SampledField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// Constrains axis 0 only.
    Stripe,
    Box,
    Ball,
}

/// Support domain `Ω` of an image.
///
/// Real-space membership is half-open and decided by pixel centres:
/// `c - d/2 <= x < c + d/2` per constrained axis, or `|x - c| < d/2` for a
/// 2D ball. The scaled domain `Ω_f = (f/2) Ω` used in frequency space is
/// derived on demand and tested with closed bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportSpec {
    pub shape: Shape,
    pub diameter: f64,
    pub center: [f64; 2],
}

impl SupportSpec {
    /// Unit-diameter domain centred at the origin.
    pub fn unit(shape: Shape) -> Self {
        SupportSpec { shape, diameter: 1.0, center: [0.0, 0.0] }
    }

    pub fn stripe() -> Self {
        Self::unit(Shape::Stripe)
    }

    pub fn unit_box() -> Self {
        Self::unit(Shape::Box)
    }

    pub fn ball() -> Self {
        Self::unit(Shape::Ball)
    }

    pub fn with_diameter(self, diameter: f64) -> Self {
        SupportSpec { diameter, ..self }
    }

    pub fn with_center(self, center: [f64; 2]) -> Self {
        SupportSpec { center, ..self }
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.diameter
    }

    /// The image `{s·x : x ∈ Ω}`.
    pub fn scaled(&self, s: f64) -> SupportSpec {
        SupportSpec {
            shape: self.shape,
            diameter: self.diameter * s,
            center: [self.center[0] * s, self.center[1] * s],
        }
    }

    /// `Ω_f = (f/2) Ω`.
    pub fn fresnel_image(&self, f: f64) -> SupportSpec {
        self.scaled(0.5 * f)
    }

    /// Half-open pixel-centre membership.
    pub fn contains(&self, p: [f64; 2], dim: usize) -> bool {
        let r = self.radius();
        let half_open = |x: f64, c: f64| x >= c - r && x < c + r;
        match (self.shape, dim) {
            (_, 1) | (Shape::Stripe, _) => half_open(p[0], self.center[0]),
            (Shape::Box, _) => half_open(p[0], self.center[0]) && half_open(p[1], self.center[1]),
            (Shape::Ball, _) => {
                let dx = p[0] - self.center[0];
                let dy = p[1] - self.center[1];
                dx * dx + dy * dy < r * r
            }
        }
    }

    /// Closed membership, used for frequency-space masks.
    pub fn contains_closed(&self, p: [f64; 2], dim: usize) -> bool {
        let r = self.radius();
        let closed = |x: f64, c: f64| (x - c).abs() <= r;
        match (self.shape, dim) {
            (_, 1) | (Shape::Stripe, _) => closed(p[0], self.center[0]),
            (Shape::Box, _) => closed(p[0], self.center[0]) && closed(p[1], self.center[1]),
            (Shape::Ball, _) => {
                let dx = p[0] - self.center[0];
                let dy = p[1] - self.center[1];
                dx * dx + dy * dy <= r * r
            }
        }
    }

    /// Largest coordinate magnitude reached along each constrained axis.
    fn reach(&self) -> [f64; 2] {
        let r = self.radius();
        [self.center[0].abs() + r, self.center[1].abs() + r]
    }

    fn constrained_axes(&self, dim: usize) -> usize {
        match (self.shape, dim) {
            (_, 1) | (Shape::Stripe, _) => 1,
            _ => 2,
        }
    }

    /// Checks that the domain lies inside the grid window.
    pub fn check_fits(&self, grid: &GridSpec) -> Result<()> {
        if !(self.diameter.is_finite() && self.diameter > 0.0) {
            return Err(Error::InvalidParameter(format!("support diameter {} must be positive", self.diameter)));
        }
        let half = 0.5 * grid.extent();
        let reach = self.reach();
        for (axis, &r) in reach.iter().enumerate().take(self.constrained_axes(grid.dim())) {
            if r > half {
                return Err(Error::SupportTooLarge(format!(
                    "axis {axis} reaches {r} beyond the grid half-width {half}"
                )));
            }
        }
        Ok(())
    }

    /// Real-space indicator on `grid`.
    pub fn mask(&self, grid: &GridSpec) -> Result<Vec<bool>> {
        self.check_fits(grid)?;
        Ok((0..grid.len()).map(|i| self.contains(grid.position(i), grid.dim())).collect())
    }

    /// Frequency-space indicator of `self` on the frequency grid of `grid`.
    ///
    /// Fails if the domain is not resolved by the frequency window.
    pub fn frequency_mask(&self, grid: &GridSpec) -> Result<Vec<bool>> {
        let nyq = grid.max_frequency();
        let reach = self.reach();
        for (axis, &r) in reach.iter().enumerate().take(self.constrained_axes(grid.dim())) {
            if r > nyq {
                return Err(Error::Aliasing(format!(
                    "frequency domain reaches {r} on axis {axis}, beyond the Nyquist frequency {nyq}"
                )));
            }
        }
        Ok((0..grid.len()).map(|i| self.contains_closed(grid.frequency(i), grid.dim())).collect())
    }

    /// Flat indices of the samples inside the domain.
    pub fn indices(&self, grid: &GridSpec) -> Result<Vec<usize>> {
        Ok(self.mask(grid)?.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect())
    }
}

/// Multiplies a real-space field by the indicator of `Ω`, or of `Ω^c` when
/// `complement` is set.
pub fn apply_support(field: &SampledField, support: &SupportSpec, complement: bool) -> Result<SampledField> {
    field.expect_domain(Domain::Real)?;
    let mask = support.mask(field.grid())?;
    Ok(apply_mask(field, &mask, complement))
}

pub(crate) fn apply_mask(field: &SampledField, mask: &[bool], complement: bool) -> SampledField {
    let zero = Complex64::new(0.0, 0.0);
    field.map_indexed(|i, v| if mask[i] != complement { v } else { zero })
}
