//! Matrix-free symmetric eigensolvers on real coordinate vectors.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// A real symmetric linear map on `ℝ^dim`.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once `‖A x - ρ x‖ ≤ tol` for the unit iterate `x`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iter: 100_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Rayleigh quotient per iteration (power methods only).
    pub history: Vec<f64>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalized(x: &[f64]) -> Result<Vec<f64>> {
    let n = norm(x);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter("start vector must be nonzero and finite".into()));
    }
    Ok(x.iter().map(|v| v / n).collect())
}

fn residual(ax: &[f64], x: &[f64], rho: f64) -> f64 {
    ax.iter().zip(x).map(|(a, b)| (a - rho * b).powi(2)).sum::<f64>().sqrt()
}

/// Plain power iteration for the dominant eigenpair of a positive
/// semidefinite operator.
pub fn power_iteration(op: &dyn SymmetricOperator, start: &[f64], opts: SolverOptions) -> Result<SolverOutcome> {
    let mut x = normalized(start)?;
    let mut history = Vec::new();
    let mut last = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let y = op.apply(&x);
        let rho = dot(&x, &y);
        history.push(rho);
        let r = residual(&y, &x, rho);
        last = r;
        if r <= opts.tol {
            return Ok(SolverOutcome { value: rho, vector: x, iterations: it, residual: r, history });
        }
        let ny = norm(&y);
        if ny == 0.0 {
            return Ok(SolverOutcome { value: 0.0, vector: x, iterations: it, residual: 0.0, history });
        }
        x = y.into_iter().map(|v| v / ny).collect();
    }
    Err(Error::NotConverged { iterations: opts.max_iter, residual: last })
}

struct Shifted<'a> {
    op: &'a dyn SymmetricOperator,
    shift: f64,
}

impl SymmetricOperator for Shifted<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.op.apply(x).into_iter().zip(x).map(|(a, b)| self.shift * b - a).collect()
    }
}

/// Smallest eigenpair of `A` by power iteration on `shift·I - A`.
///
/// `shift` must bound the spectrum of `A` from above.
pub fn shifted_power_min(
    op: &dyn SymmetricOperator,
    shift: f64,
    start: &[f64],
    opts: SolverOptions,
) -> Result<SolverOutcome> {
    let out = power_iteration(&Shifted { op, shift }, start, opts)?;
    let value = shift - out.value;
    if value < 16.0 * f64::EPSILON * shift {
        return Err(Error::ShiftGap(format!(
            "shift {shift} minus dominant eigenvalue {} is at rounding level",
            out.value
        )));
    }
    Ok(SolverOutcome { value, history: out.history.iter().map(|r| shift - r).collect(), ..out })
}

/// Which end of the spectrum Lanczos targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

/// Lanczos with full reorthogonalization. Ritz residuals are estimated from
/// the tridiagonal matrix; the returned residual is recomputed with one
/// extra application of the operator.
pub fn lanczos(
    op: &dyn SymmetricOperator,
    start: &[f64],
    which: Extreme,
    opts: SolverOptions,
) -> Result<SolverOutcome> {
    let n = op.dim();
    let mut basis: Vec<Vec<f64>> = vec![normalized(start)?];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let steps = opts.max_iter.min(n);
    let mut est = f64::INFINITY;
    for k in 0..steps {
        let mut w = op.apply(&basis[k]);
        let a = dot(&basis[k], &w);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let b = norm(&w);
        let exhausted = b <= 1e-14 * alpha.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let last = k + 1 == steps;
        if exhausted || last || k < 20 || k % 5 == 4 {
            let s = ritz(&alpha, &beta, which);
            est = b * s.last().unwrap().abs();
            if est <= opts.tol || exhausted || last {
                let mut x = vec![0.0; n];
                for (coef, v) in s.iter().zip(&basis) {
                    x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += coef * vi);
                }
                let x = normalized(&x)?;
                let ax = op.apply(&x);
                let rho = dot(&x, &ax);
                let r = residual(&ax, &x, rho);
                if r <= opts.tol {
                    return Ok(SolverOutcome { value: rho, vector: x, iterations: k + 1, residual: r, history: Vec::new() });
                }
                if exhausted || last {
                    return Err(Error::NotConverged { iterations: k + 1, residual: r });
                }
            }
        }
        beta.push(b);
        basis.push(w.into_iter().map(|v| v / b).collect());
    }
    Err(Error::NotConverged { iterations: steps, residual: est })
}

/// Extreme Ritz vector (in the Lanczos basis) of the tridiagonal matrix `(alpha, beta)`.
fn ritz(alpha: &[f64], beta: &[f64], which: Extreme) -> Vec<f64> {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let pick = (0..k)
        .min_by(|&a, &b| {
            let (x, y) = (eig.eigenvalues[a], eig.eigenvalues[b]);
            match which {
                Extreme::Smallest => x.total_cmp(&y),
                Extreme::Largest => y.total_cmp(&x),
            }
        })
        .expect("nonempty");
    eig.eigenvectors.column(pick).iter().copied().collect()
}
