use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::hamiltonian::SymmetricMatrix;
use crate::error::{Error, Result};
use crate::format::sci17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenOptions {
    /// Largest dimension handled by the dense solver.
    pub dense_threshold: usize,
    /// Residual target relative to `‖H‖∞`.
    pub tolerance: f64,
    /// Krylov vectors kept per Lanczos cycle.
    pub krylov_dim: usize,
    /// Restart cap for Lanczos.
    pub max_restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { dense_threshold: 2000, tolerance: 1e-10, krylov_dim: 120, max_restarts: 60 }
    }
}

/// Eigenvalues in ascending order and the ground vector.
///
/// The dense solver returns the whole spectrum; Lanczos returns the Ritz
/// values of its final Krylov space, of which only the first is converged.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub ground_state: Vec<f64>,
    /// `‖Hv − E₀v‖` of the ground pair.
    pub residual: f64,
    pub method: SolverMethod,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `E₁ − E₀`, or `None` for a one-dimensional sector.
    pub fn gap(&self) -> Option<f64> {
        (self.eigenvalues.len() > 1).then(|| self.eigenvalues[1] - self.eigenvalues[0])
    }
}

pub fn diagonalize(h: &SymmetricMatrix, opts: &EigenOptions) -> Result<Spectrum> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot diagonalize an empty matrix".into()));
    }
    let bound = opts.tolerance * h.norm_inf().max(f64::MIN_POSITIVE);
    let spectrum = if n <= opts.dense_threshold { dense(h) } else { lanczos(h, opts, bound)? };
    if spectrum.residual > bound {
        return Err(Error::Solver { iterations: 0, residual: spectrum.residual });
    }
    Ok(spectrum)
}

/// Fixes the overall sign: the largest-magnitude entry (first on ties) is positive.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn residual(h: &SymmetricMatrix, v: &[f64], e: f64) -> f64 {
    h.matvec(v).iter().zip(v).map(|(hv, x)| (hv - e * x).powi(2)).sum::<f64>().sqrt()
}

fn dense(h: &SymmetricMatrix) -> Spectrum {
    let eig = SymmetricEigen::new(h.to_dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut ground_state: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    canonical_sign(&mut ground_state);
    let residual = residual(h, &ground_state, eigenvalues[0]);
    Spectrum { eigenvalues, ground_state, residual, method: SolverMethod::Dense }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Explicitly restarted Lanczos with full reorthogonalization; each cycle
/// restarts from the lowest Ritz vector of the previous one.
fn lanczos(h: &SymmetricMatrix, opts: &EigenOptions, bound: f64) -> Result<Spectrum> {
    let n = h.dim();
    let m = opts.krylov_dim.clamp(2, n);
    // Deterministic start with weight on every basis state.
    let mut start: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract()).collect();
    normalize(&mut start);
    let mut last_residual = f64::INFINITY;

    for cycle in 0..opts.max_restarts.max(1) {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            let mut w = h.matvec(&basis[j]);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Full reorthogonalization, applied twice for stability.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            if j + 1 == m {
                break;
            }
            let b = normalize(&mut w);
            if b <= 1e-14 * h.norm_inf().max(f64::MIN_POSITIVE) {
                break;
            }
            beta.push(b);
            basis.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let y: DVector<f64> = eig.eigenvectors.column(order[0]).into_owned();
        let mut ritz = vec![0.0; n];
        for (coef, b) in y.iter().zip(&basis) {
            ritz.iter_mut().zip(b).for_each(|(r, x)| *r += coef * x);
        }
        normalize(&mut ritz);
        let e0 = eig.eigenvalues[order[0]];
        last_residual = residual(h, &ritz, e0);
        if last_residual <= bound {
            canonical_sign(&mut ritz);
            return Ok(Spectrum {
                eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
                ground_state: ritz,
                residual: last_residual,
                method: SolverMethod::Lanczos,
            });
        }
        start = ritz;
        if cycle + 1 == opts.max_restarts {
            break;
        }
    }
    Err(Error::Solver { iterations: opts.max_restarts * m, residual: last_residual })
}

/// Writes `index,eigenvalue` rows.
pub fn write_spectrum_csv<W: Write>(spectrum: &Spectrum, mut out: W) -> std::io::Result<()> {
    writeln!(out, "index,eigenvalue")?;
    for (i, e) in spectrum.eigenvalues.iter().enumerate() {
        writeln!(out, "{i},{}", sci17(*e))?;
    }
    Ok(())
}
