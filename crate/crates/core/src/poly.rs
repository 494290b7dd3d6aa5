//! Sparse multivariate polynomials with real coefficients.
//!
//! Terms are kept merged and in graded lexicographic order (ascending total
//! degree, then descending lexicographic exponent vectors), so evaluation sums
//! in a fixed order and results are reproducible bit for bit.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One monomial `coeff * x_0^e_0 * ... * x_{k-1}^e_{k-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyExpr {
    nvars: usize,
    terms: Vec<Term>,
}

impl PolyExpr {
    /// Builds a polynomial from raw `(coeff, exponents)` pairs, merging
    /// duplicate monomials and dropping zero coefficients.
    pub fn new(nvars: usize, raw: impl IntoIterator<Item = (f64, Vec<u32>)>) -> Result<Self> {
        let mut terms = Vec::new();
        for (coeff, exps) in raw {
            if exps.len() != nvars {
                return Err(Error::InvalidSpec(format!(
                    "term has {} exponents, expected {}",
                    exps.len(),
                    nvars
                )));
            }
            if !coeff.is_finite() {
                return Err(Error::InvalidSpec("non-finite coefficient".into()));
            }
            terms.push(Term { coeff, exps });
        }
        Ok(Self::from_terms(nvars, terms))
    }

    fn from_terms(nvars: usize, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| grlex(&a.exps, &b.exps));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exps == t.exps => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Self { nvars, terms: merged }
    }

    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::from_terms(nvars, vec![Term { coeff: c, exps: vec![0; nvars] }])
    }

    /// The coordinate function `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Self::from_terms(nvars, vec![Term { coeff: 1.0, exps }])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Term::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        debug_assert_eq!(p.len(), self.nvars);
        let mut acc = 0.0;
        for t in &self.terms {
            let mut m = t.coeff;
            for (x, &e) in p.iter().zip(&t.exps) {
                if e > 0 {
                    m *= x.powi(e as i32);
                }
            }
            acc += m;
        }
        acc
    }

    /// Exact partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exps[var] > 0)
            .map(|t| {
                let mut exps = t.exps.clone();
                let e = exps[var];
                exps[var] = e - 1;
                Term { coeff: t.coeff * e as f64, exps }
            })
            .collect();
        Self::from_terms(self.nvars, terms)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::from_terms(self.nvars, terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: t.coeff * s, exps: t.exps.clone() })
            .collect();
        Self::from_terms(self.nvars, terms)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                terms.push(Term { coeff: a.coeff * b.coeff, exps });
            }
        }
        Self::from_terms(self.nvars, terms)
    }

    /// Re-embeds the polynomial into `nvars` variables, keeping variable
    /// indices. Extra variables get exponent zero.
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut exps = t.exps.clone();
                exps.resize(nvars, 0);
                Term { coeff: t.coeff, exps }
            })
            .collect();
        Self::from_terms(nvars, terms)
    }

    /// Substitutes a constant for the last variable, dropping it.
    pub fn fix_last(&self, value: f64) -> Self {
        let k = self.nvars - 1;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let e = t.exps[k];
                let coeff = if e == 0 { t.coeff } else { t.coeff * value.powi(e as i32) };
                Term { coeff, exps: t.exps[..k].to_vec() }
            })
            .collect();
        Self::from_terms(k, terms)
    }

    pub fn gradient(&self) -> Vec<PolyExpr> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Row-major table of all second partials.
    pub fn hessian(&self) -> Vec<PolyExpr> {
        let grad = self.gradient();
        let mut out = Vec::with_capacity(self.nvars * self.nvars);
        for gi in &grad {
            for j in 0..self.nvars {
                out.push(gi.derivative(j));
            }
        }
        out
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coeff)?;
            for (i, &e) in t.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*v{i}")?,
                    _ => write!(f, "*v{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// A polynomial together with its exact gradient and Hessian, for repeated
/// evaluation.
#[derive(Debug, Clone)]
pub struct DiffPoly {
    pub value: PolyExpr,
    pub grad: Vec<PolyExpr>,
    pub hess: Vec<PolyExpr>,
}

impl DiffPoly {
    pub fn new(value: PolyExpr) -> Self {
        let grad = value.gradient();
        let hess = value.hessian();
        Self { value, grad, hess }
    }

    pub fn nvars(&self) -> usize {
        self.value.nvars()
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.value.eval(p)
    }

    pub fn eval_grad(&self, p: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(p)).collect()
    }

    pub fn eval_hess(&self, p: &[f64]) -> Vec<f64> {
        let n = self.nvars();
        let mut h: Vec<f64> = self.hess.iter().map(|g| g.eval(p)).collect();
        // mixed partials agree exactly up to round-off; force exact symmetry
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (h[i * n + j] + h[j * n + i]);
                h[i * n + j] = s;
                h[j * n + i] = s;
            }
        }
        h
    }
}
