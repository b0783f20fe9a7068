//! Prolate spheroidal eigenpairs of the kernel `sin(c(x-y)) / (π(x-y))` on
//! `[-1, 1]`, by midpoint Nyström discretization.
//!
//! The midpoint nodes are symmetric, so the matrix is centrosymmetric and
//! splits into even and odd blocks of half size.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default number of Nyström nodes.
pub const DEFAULT_NODES: usize = 1024;

/// Leading eigenpairs, sorted by decreasing eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct ProlateEigenSystem {
    pub c: f64,
    pub nodes: usize,
    pub eigenvalues: Vec<f64>,
    /// `1 - λ_j`.
    pub one_minus: Vec<f64>,
    /// Sample positions on `[-1/2, 1/2]`.
    pub positions: Vec<f64>,
    /// `ψ_j` sampled at `positions`, orthonormal for `Δx Σ`.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
}

impl ProlateEigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Sample spacing on `[-1/2, 1/2]`.
    pub fn dx(&self) -> f64 {
        1.0 / self.nodes as f64
    }

    /// Sign changes of `ψ_j` across the interior nodes.
    pub fn node_count(&self, j: usize) -> usize {
        let v = &self.eigenvectors[j];
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let signs: Vec<f64> = v.iter().filter(|x| x.abs() > 1e-9 * peak).map(|x| x.signum()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// `(1 - Π_l λ_{j_l})^{1/2}` for a multi-index `j`.
    pub fn modal_constant(&self, index: &[usize]) -> Result<f64> {
        let mut log_prod = 0.0;
        for &j in index {
            let om = *self.one_minus.get(j).ok_or_else(|| {
                Error::InvalidParameter(format!("index {j} beyond the {} computed modes", self.len()))
            })?;
            log_prod += (-om).ln_1p();
        }
        Ok((-log_prod.exp_m1()).sqrt())
    }
}

fn kernel(c: f64, d: f64) -> f64 {
    if d == 0.0 {
        c / std::f64::consts::PI
    } else {
        (c * d).sin() / (std::f64::consts::PI * d)
    }
}

/// Leading `n_modes` eigenpairs with `nodes` midpoint nodes (even).
pub fn prolate_eigs(c: f64, n_modes: usize, nodes: usize) -> Result<ProlateEigenSystem> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth c = {c} must be positive")));
    }
    if n_modes == 0 || nodes < 2 || nodes % 2 != 0 || n_modes > nodes {
        return Err(Error::InvalidParameter(format!("need 1 <= n_modes <= nodes, nodes even; got {n_modes}, {nodes}")));
    }
    let h = 2.0 / nodes as f64;
    let u: Vec<f64> = (0..nodes).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
    let half = nodes / 2;
    let block = |sign: f64| {
        DMatrix::from_fn(half, half, |i, j| h * (kernel(c, u[i] - u[j]) + sign * kernel(c, u[i] - u[nodes - 1 - j])))
    };

    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::new();
    for sign in [1.0, -1.0] {
        let eig = SymmetricEigen::new(block(sign));
        for k in 0..half {
            let p = eig.eigenvectors.column(k);
            // full vector [p, ±Jp] / √2, rescaled to unit L² norm on [-1/2, 1/2]
            let s = (0.5 / (0.5 * h)).sqrt();
            let mut v = vec![0.0; nodes];
            for i in 0..half {
                v[i] = p[i] * s;
                v[nodes - 1 - i] = sign * p[i] * s;
            }
            pairs.push((eig.eigenvalues[k], v));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.truncate(n_modes);

    for (j, (lam, v)) in pairs.iter_mut().enumerate() {
        if *lam < 1e-14 {
            return Err(Error::SpectrumFloor(format!("λ_{j} = {lam:e} with c = {c}; request fewer modes")));
        }
        if *lam >= 1.0 {
            return Err(Error::SpectrumFloor(format!("λ_{j} rounds to 1 with c = {c}")));
        }
        // even modes positive at the centre, odd modes increasing through it
        let key = if j % 2 == 0 { v[half] + v[half - 1] } else { v[half] - v[half - 1] };
        if key < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    for w in pairs.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::SpectrumFloor(format!("eigenvalues {} and {} not separated", w[0].0, w[1].0)));
        }
    }

    Ok(ProlateEigenSystem {
        c,
        nodes,
        one_minus: pairs.iter().map(|(l, _)| 1.0 - l).collect(),
        eigenvalues: pairs.iter().map(|(l, _)| *l).collect(),
        positions: u.iter().map(|x| 0.5 * x).collect(),
        eigenvectors: pairs.into_iter().map(|(_, v)| v).collect(),
    })
}

/// `c_j` for each multi-index at bandwidth `c`.
pub fn modal_constants(indices: &[Vec<usize>], c: f64) -> Result<Vec<f64>> {
    let max = indices.iter().flatten().copied().max().unwrap_or(0);
    let sys = prolate_eigs(c, max + 1, DEFAULT_NODES)?;
    indices.iter().map(|j| sys.modal_constant(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bandwidth_rank_one_limit() {
        let c = 1e-3;
        let s = prolate_eigs(c, 1, 256).unwrap();
        let expect = 2.0 * c / std::f64::consts::PI;
        assert!((s.eigenvalues[0] / expect - 1.0).abs() < 0.05);
    }

    #[test]
    fn orthonormal_and_ordered() {
        let s = prolate_eigs(5.0, 6, 256).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let g: f64 = s.eigenvectors[i].iter().zip(&s.eigenvectors[j]).map(|(a, b)| a * b).sum::<f64>() * s.dx();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-8);
            }
        }
        assert!(s.eigenvalues.windows(2).all(|w| w[0] > w[1]));
        assert!(s.eigenvalues.iter().all(|&l| l > 0.0 && l < 1.0));
        for j in 0..6 {
            assert_eq!(s.node_count(j), j);
        }
    }

    #[test]
    fn matches_full_matrix_eigenvalues() {
        let (c, n) = (3.0, 64);
        let h = 2.0 / n as f64;
        let u: Vec<f64> = (0..n).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
        let full = DMatrix::from_fn(n, n, |i, j| h * kernel(c, u[i] - u[j]));
        let mut ev: Vec<f64> = SymmetricEigen::new(full).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        let s = prolate_eigs(c, 5, n).unwrap();
        for j in 0..5 {
            assert!((s.eigenvalues[j] - ev[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn modal_constants_increase() {
        let s = prolate_eigs(4.0, 3, 256).unwrap();
        let c00 = s.modal_constant(&[0, 0]).unwrap();
        let c01 = s.modal_constant(&[0, 1]).unwrap();
        let c11 = s.modal_constant(&[1, 1]).unwrap();
        assert!(c00 < c01 && c01 < c11);
        assert!((s.modal_constant(&[0]).unwrap() - s.one_minus[0].sqrt()).abs() < 1e-14);
        assert!(s.modal_constant(&[3]).is_err());
    }

    #[test]
    fn floor_reported() {
        assert!(matches!(prolate_eigs(0.5, 40, 128), Err(Error::SpectrumFloor(_))));
    }
}
