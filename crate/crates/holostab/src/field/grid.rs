use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid centred at the origin.
///
/// Sample `k` along an axis sits at `x_k = (k - n/2) Δx` with `Δx = extent / n`.
/// The dual frequency grid has `ξ_j = (j - n/2) Δξ` and `Δξ = 2π / extent`.
/// Multi-dimensional arrays are row-major, axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    extent: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, extent: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!("dimension {dim} unsupported (1 or 2)")));
        }
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("samples per axis must be even and >= 2, got {n}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        Ok(GridSpec { dim, n, extent })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Total number of samples, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.extent
    }

    /// Real-space cell measure `Δx^m`.
    pub fn cell(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Frequency-space cell measure `Δξ^m`.
    pub fn freq_cell(&self) -> f64 {
        self.dxi().powi(self.dim as i32)
    }

    /// Nyquist frequency `π / Δx`.
    pub fn max_frequency(&self) -> f64 {
        PI / self.dx()
    }

    /// Centred coordinate of axis index `k`.
    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dx()
    }

    /// Centred frequency of axis index `j`.
    pub fn freq(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dxi()
    }

    /// Axis indices of flat index `idx`; the second entry is 0 in 1D.
    pub fn axes(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    /// Position of flat index `idx` (second coordinate 0 in 1D).
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.axes(idx);
        if self.dim == 1 {
            [self.coord(a), 0.0]
        } else {
            [self.coord(a), self.coord(b)]
        }
    }

    /// Frequency vector of flat index `idx` (second coordinate 0 in 1D).
    pub fn frequency(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.axes(idx);
        if self.dim == 1 {
            [self.freq(a), 0.0]
        } else {
            [self.freq(a), self.freq(b)]
        }
    }

    pub fn x_sq(&self, idx: usize) -> f64 {
        let p = self.position(idx);
        p[0] * p[0] + p[1] * p[1]
    }

    pub fn xi_sq(&self, idx: usize) -> f64 {
        let p = self.frequency(idx);
        p[0] * p[0] + p[1] * p[1]
    }

    /// Flat index from axis indices.
    pub fn flat(&self, a: usize, b: usize) -> usize {
        if self.dim == 1 {
            a
        } else {
            a * self.n + b
        }
    }
}
