//! Operators restricted to `L²_Ω`, acting on real coordinates
//! `(Re h_k, Im h_k)` of the samples inside the support.

use num_complex::Complex64;

use super::solver::SymmetricOperator;
use crate::error::Result;
use crate::field::{apply_mask, unitary_ft, unitary_ift, Domain, GridSpec, SampledField, SupportSpec};
use crate::fresnel::{check_sampling, FresnelNumber};

/// Coordinates of the samples of a supported field.
#[derive(Debug, Clone)]
pub struct SupportCoords {
    grid: GridSpec,
    indices: Vec<usize>,
    mask: Vec<bool>,
}

impl SupportCoords {
    pub fn new(grid: GridSpec, support: &SupportSpec) -> Result<Self> {
        let mask = support.mask(&grid)?;
        let indices = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
        Ok(SupportCoords { grid, indices, mask })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of support samples.
    pub fn samples(&self) -> usize {
        self.indices.len()
    }

    /// Real dimension, twice the sample count.
    pub fn dim(&self) -> usize {
        2 * self.indices.len()
    }

    pub fn scatter(&self, x: &[f64]) -> SampledField {
        let mut f = SampledField::zeros(self.grid, Domain::Real);
        let v = f.values_mut();
        for (k, &i) in self.indices.iter().enumerate() {
            v[i] = Complex64::new(x[2 * k], x[2 * k + 1]);
        }
        f
    }

    pub fn gather(&self, f: &SampledField) -> Vec<f64> {
        let v = f.values();
        self.indices.iter().flat_map(|&i| [v[i].re, v[i].im]).collect()
    }

    /// Coordinates of the constant 1 on the support.
    pub fn constant(&self) -> Vec<f64> {
        self.indices.iter().flat_map(|_| [1.0, 0.0]).collect()
    }
}

/// `G = P_Ω F^{-1} 1_{Ω_f} F P_Ω` with `Ω_f = (f/2) Ω`.
#[derive(Debug, Clone)]
pub struct GramOperator {
    coords: SupportCoords,
    band: Vec<bool>,
}

impl GramOperator {
    pub fn new(f: FresnelNumber, support: &SupportSpec, grid: GridSpec) -> Result<Self> {
        let coords = SupportCoords::new(grid, support)?;
        let band = support.fresnel_image(f.value()).frequency_mask(&grid)?;
        Ok(GramOperator { coords, band })
    }

    pub fn coords(&self) -> &SupportCoords {
        &self.coords
    }

    /// Frequency indicator of `Ω_f`.
    pub fn band(&self) -> &[bool] {
        &self.band
    }

    pub fn apply_field(&self, h: &SampledField) -> Result<SampledField> {
        let supported = apply_mask(h, self.coords.mask(), false);
        let spec = apply_mask(&unitary_ft(&supported)?, &self.band, false);
        Ok(apply_mask(&unitary_ift(&spec)?, self.coords.mask(), false))
    }

    /// `‖F h|_{Ω_f^c}‖²`, summed over the small terms only.
    pub fn complement_energy(&self, h: &SampledField) -> Result<f64> {
        let spec = unitary_ft(h)?;
        let cell = h.grid().freq_cell();
        Ok(cell * spec.values().iter().zip(&self.band).filter(|(_, &b)| !b).map(|(v, _)| v.norm_sqr()).sum::<f64>())
    }
}

impl SymmetricOperator for GramOperator {
    fn dim(&self) -> usize {
        self.coords.dim()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let h = self.coords.scatter(x);
        self.coords.gather(&self.apply_field(&h).expect("real-space field"))
    }
}

/// `P_Ω T* T P_Ω` for `T h = 2 Re(D h)`.
///
/// Uses `T* T h = 2h + 2 D^{-2}(h̄)`, which follows from
/// `conj(D h) = D^{-1}(h̄)`.
#[derive(Debug, Clone)]
pub struct NormalOperator {
    coords: SupportCoords,
    multiplier: Vec<Complex64>,
}

impl NormalOperator {
    pub fn new(f: FresnelNumber, support: &SupportSpec, grid: GridSpec) -> Result<Self> {
        check_sampling(&grid, f)?;
        let coords = SupportCoords::new(grid, support)?;
        let multiplier = (0..grid.len()).map(|i| Complex64::from_polar(1.0, grid.xi_sq(i) / f.value())).collect();
        Ok(NormalOperator { coords, multiplier })
    }

    pub fn coords(&self) -> &SupportCoords {
        &self.coords
    }
}

impl SymmetricOperator for NormalOperator {
    fn dim(&self) -> usize {
        self.coords.dim()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let hbar = self.coords.scatter(x).conj();
        let spec = unitary_ft(&hbar).expect("real-space field");
        let back = unitary_ift(&spec.map_indexed(|i, v| v * self.multiplier[i])).expect("frequency field");
        let bv = back.values();
        self.coords.indices().iter().enumerate().flat_map(|(k, &i)| {
            [2.0 * (x[2 * k] + bv[i].re), 2.0 * (x[2 * k + 1] + bv[i].im)]
        }).collect()
    }
}
