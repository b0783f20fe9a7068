use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GridSpec;
use crate::error::{Error, Result};

/// Which side of the Fourier transform a field lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "real-space")]
    Real,
    #[serde(rename = "frequency-space")]
    Frequency,
}

impl Domain {
    pub fn tag(&self) -> &'static str {
        match self {
            Domain::Real => "real-space",
            Domain::Frequency => "frequency-space",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Complex samples on a [`GridSpec`], tagged with their domain.
///
/// Norms and inner products carry the cell measure of the domain, so they
/// approximate the continuous `L²` quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    domain: Domain,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn zeros(grid: GridSpec, domain: Domain) -> Self {
        SampledField { grid, domain, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: GridSpec, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.len()
            )));
        }
        Ok(SampledField { grid, domain, values })
    }

    pub fn from_real(grid: GridSpec, domain: Domain, values: &[f64]) -> Result<Self> {
        Self::from_values(grid, domain, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `func` at every grid position (or frequency).
    pub fn from_fn(grid: GridSpec, domain: Domain, func: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| match domain {
                Domain::Real => func(grid.position(i)),
                Domain::Frequency => func(grid.frequency(i)),
            })
            .collect();
        SampledField { grid, domain, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Same grid and domain, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::from_values(self.grid, self.domain, values)
    }

    pub(crate) fn retag(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::DomainMismatch { expected, found: self.domain });
        }
        Ok(())
    }

    pub fn expect_compatible(&self, other: &SampledField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch { expected: self.domain, found: other.domain });
        }
        Ok(())
    }

    fn measure(&self) -> f64 {
        match self.domain {
            Domain::Real => self.grid.cell(),
            Domain::Frequency => self.grid.freq_cell(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.measure() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self, other⟩ = ∫ self · conj(other)`.
    pub fn inner(&self, other: &SampledField) -> Result<Complex64> {
        self.expect_compatible(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.measure())
    }

    /// Real inner product `Re⟨self, other⟩`.
    pub fn real_inner(&self, other: &SampledField) -> Result<f64> {
        Ok(self.inner(other)?.re)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `‖Im self‖`, used to check that a field is real-valued.
    pub fn imag_norm(&self) -> f64 {
        (self.measure() * self.values.iter().map(|v| v.im * v.im).sum::<f64>()).sqrt()
    }

    pub fn real_part(&self) -> SampledField {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn imag_part(&self) -> SampledField {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn conj(&self) -> SampledField {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledField {
        SampledField { grid: self.grid, domain: self.domain, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Applies `f(flat_index, value)` to every sample.
    pub fn map_indexed(&self, f: impl Fn(usize, Complex64) -> Complex64) -> SampledField {
        SampledField {
            grid: self.grid,
            domain: self.domain,
            values: self.values.iter().enumerate().map(|(i, &v)| f(i, v)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SampledField {
        self.map(|v| v * s)
    }

    pub fn scale_real(&self, s: f64) -> SampledField {
        self.map(|v| v * s)
    }

    pub fn zip_with(
        &self,
        other: &SampledField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<SampledField> {
        self.expect_compatible(other)?;
        Ok(SampledField {
            grid: self.grid,
            domain: self.domain,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &SampledField) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
