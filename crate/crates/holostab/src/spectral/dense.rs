//! Dense reference matrices built from explicit exponential sums, for
//! cross-checking the FFT-based operators on small grids.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::ops::SupportCoords;
use super::solver::SymmetricOperator;
use crate::error::Result;
use crate::field::{GridSpec, SupportSpec};
use crate::fresnel::FresnelNumber;

/// Matrix of a symmetric operator, one application per unit vector.
pub fn assemble(op: &dyn SymmetricOperator) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op.apply(&e);
        m.column_mut(j).iter_mut().zip(col).for_each(|(a, b)| *a = b);
        e[j] = 0.0;
    }
    m
}

fn phase(grid: &GridSpec, a: usize, b: usize, j: usize) -> f64 {
    let (xa, xb, xi) = (grid.position(a), grid.position(b), grid.frequency(j));
    (0..grid.dim()).map(|d| (xa[d] - xb[d]) * xi[d]).sum()
}

/// Complex Gram matrix `G_kl = n^{-m} Σ_{ξ_j ∈ Ω_f} e^{i (x_k - x_l)·ξ_j}` on
/// the support samples.
pub fn gram_matrix(f: FresnelNumber, support: &SupportSpec, grid: GridSpec) -> Result<DMatrix<Complex64>> {
    let coords = SupportCoords::new(grid, support)?;
    let band = support.fresnel_image(f.value()).frequency_mask(&grid)?;
    let freqs: Vec<usize> = (0..grid.len()).filter(|&j| band[j]).collect();
    let idx = coords.indices();
    let scale = 1.0 / grid.len() as f64;
    Ok(DMatrix::from_fn(idx.len(), idx.len(), |k, l| {
        freqs.iter().map(|&j| Complex64::from_polar(1.0, phase(&grid, idx[k], idx[l], j))).sum::<Complex64>() * scale
    }))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_lambda_max(m: DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
}

/// Real matrix of `T : L²_Ω → L²` acting on coordinates `(Re h_k, Im h_k)`.
/// Rows cover the whole grid.
pub fn t_matrix(f: FresnelNumber, support: &SupportSpec, grid: GridSpec) -> Result<DMatrix<f64>> {
    crate::fresnel::check_sampling(&grid, f)?;
    let coords = SupportCoords::new(grid, support)?;
    let idx = coords.indices().to_vec();
    let scale = 1.0 / grid.len() as f64;
    let symbol: Vec<Complex64> =
        (0..grid.len()).map(|j| Complex64::from_polar(1.0, -grid.xi_sq(j) / (2.0 * f.value()))).collect();
    let kernel = |p: usize, k: usize| -> Complex64 {
        symbol.iter().enumerate().map(|(j, s)| s * Complex64::from_polar(1.0, phase(&grid, p, k, j))).sum::<Complex64>()
            * scale
    };
    let mut m = DMatrix::zeros(grid.len(), 2 * idx.len());
    for p in 0..grid.len() {
        for (c, &k) in idx.iter().enumerate() {
            let kv = kernel(p, k);
            m[(p, 2 * c)] = 2.0 * kv.re;
            m[(p, 2 * c + 1)] = -2.0 * kv.im;
        }
    }
    Ok(m)
}

/// Smallest singular value of a matrix.
pub fn sigma_min(m: DMatrix<f64>) -> f64 {
    m.singular_values().iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// `‖A - B‖₂ / ‖B‖₂`.
pub fn spectral_relative_difference(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let top = |m: DMatrix<f64>| m.singular_values().iter().fold(0.0f64, |a, &b| a.max(b));
    top(a - b) / top(b.clone())
}

/// Midpoint quadrature of `sin(c(u-v)) / (π(u-v))` on `[-1, 1]`.
pub fn kernel_matrix(c: f64, nodes: usize) -> DMatrix<f64> {
    let h = 2.0 / nodes as f64;
    let u = |i: usize| -1.0 + (i as f64 + 0.5) * h;
    DMatrix::from_fn(nodes, nodes, |i, j| {
        let d = u(i) - u(j);
        h * if d == 0.0 { c / std::f64::consts::PI } else { (c * d).sin() / (std::f64::consts::PI * d) }
    })
}
