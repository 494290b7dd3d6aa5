//! Small dense complex linear algebra: Takagi factorization and Hermitian
//! spectra, built on nalgebra's real symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Takagi factorization `A = U diag(sigma) U^T` of a complex symmetric matrix.
#[derive(Debug, Clone)]
pub struct Takagi {
    pub u: CMat,
    /// Non-negative, sorted descending.
    pub sigma: Vec<f64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> CMat {
        let m = self.sigma.len();
        let mut us = self.u.clone();
        for j in 0..m {
            for i in 0..m {
                us[(i, j)] *= self.sigma[j];
            }
        }
        us * self.u.transpose()
    }
}

/// Takagi factorization via the real symmetric embedding
/// `M = [[X, Y], [Y, -X]]` of `A = X + iY`. An eigenpair `(a, b), s >= 0` of
/// `M` gives `A conj(u) = s u` with `u = a + ib`; eigenvalues come in `±s`
/// pairs. Columns for numerically zero `s` are chosen by complex
/// Gram-Schmidt inside the null space so that `U` stays unitary.
pub fn takagi(a: &CMat) -> Result<Takagi> {
    let m = a.nrows();
    if a.ncols() != m {
        return Err(Error::Input("takagi: matrix is not square".into()));
    }
    let norm = frob(a);
    let asym = frob(&(a - a.transpose()));
    if asym > 1e-12 * norm.max(1.0) {
        return Err(Error::Input(format!("takagi: matrix is not symmetric (|A - A^T| = {asym:e})")));
    }
    if norm == 0.0 {
        return Ok(Takagi { u: CMat::identity(m, m), sigma: vec![0.0; m] });
    }

    let mut big = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = 0.5 * (a[(i, j)] + a[(j, i)]);
            big[(i, j)] = z.re;
            big[(i, m + j)] = z.im;
            big[(m + i, j)] = z.im;
            big[(m + i, m + j)] = -z.re;
        }
    }
    let eig = SymmetricEigen::new(big);
    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let zero_tol = 1e-12 * norm.max(1.0);
    let as_complex = |k: usize| -> Vec<Complex64> {
        (0..m)
            .map(|i| Complex64::new(eig.eigenvectors[(i, k)], eig.eigenvectors[(m + i, k)]))
            .collect()
    };

    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut sigma = Vec::with_capacity(m);
    for &k in &order {
        if cols.len() == m {
            break;
        }
        let s = eig.eigenvalues[k];
        if s > zero_tol {
            cols.push(as_complex(k));
            sigma.push(s);
        }
    }
    if cols.len() < m {
        // null space: every |s| <= tol eigenvector, then the standard basis
        let mut candidates: Vec<Vec<Complex64>> =
            order.iter().filter(|&&k| eig.eigenvalues[k].abs() <= zero_tol).map(|&k| as_complex(k)).collect();
        for i in 0..m {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[i] = Complex64::new(1.0, 0.0);
            candidates.push(e);
        }
        for mut v in candidates {
            if cols.len() == m {
                break;
            }
            for _ in 0..2 {
                for c in &cols {
                    let proj: Complex64 = c.iter().zip(&v).map(|(ci, vi)| ci.conj() * vi).sum();
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= proj * ci;
                    }
                }
            }
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nv > 1e-6 {
                cols.push(v.into_iter().map(|z| z / nv).collect());
                sigma.push(0.0);
            }
        }
    }
    let u = CMat::from_fn(m, m, |i, j| cols[j][i]);
    Ok(Takagi { u, sigma })
}

/// Eigenvalues (ascending) of a Hermitian matrix, via the real embedding
/// `[[Re H, -Im H], [Im H, Re H]]` whose spectrum doubles that of `H`.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    let m = h.nrows();
    let mut big = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            big[(i, j)] = z.re;
            big[(i, m + j)] = -z.im;
            big[(m + i, j)] = z.im;
            big[(m + i, m + j)] = z.re;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(big).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}
