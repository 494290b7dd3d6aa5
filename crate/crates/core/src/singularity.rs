//! Complex (CR-singular) points: location, second-order jets, flatness,
//! reduction to the special normal form and the elliptic/hyperbolic index.
//!
//! Complex variables are `z_j = x_j + i y_j`; real vectors are ordered
//! `(x_1, y_1, ..., x_m, y_m)` with `m = n - 1`. A jet stores
//! `Q(z) = z^T A z + z^T B conj(z) + conj(z)^T C conj(z)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{frob, hermitian_eigenvalues, takagi, CMat};
use crate::manifold::{Chart, ManifoldSpec, SurfacePoint};

pub const TOL_FLAT: f64 = 1e-8;
pub const TOL_PARAB: f64 = 1e-6;
pub const NEWTON_MAX_ITER: usize = 50;
pub const DEDUP_RADIUS: f64 = 1e-6;
pub const ROOT_RESIDUAL: f64 = 1e-10;
pub const MAX_HERMITIAN_CONDITION: f64 = 1e12;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Second-order jet of a graph function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
}

/// Maps real coordinates to holomorphic ones: `v = M z + conj(M) conj(z)`.
fn real_from_complex(m: usize) -> CMat {
    let mut mm = CMat::zeros(2 * m, m);
    for j in 0..m {
        mm[(2 * j, j)] = cz(0.5, 0.0);
        mm[(2 * j + 1, j)] = cz(0.0, -0.5);
    }
    mm
}

/// `z = K v`.
fn complex_from_real(m: usize) -> CMat {
    let mut k = CMat::zeros(m, 2 * m);
    for j in 0..m {
        k[(j, 2 * j)] = cz(1.0, 0.0);
        k[(j, 2 * j + 1)] = cz(0.0, 1.0);
    }
    k
}

impl Jet2 {
    pub fn zeros(m: usize) -> Self {
        Self { a: CMat::zeros(m, m), b: CMat::zeros(m, m), c: CMat::zeros(m, m) }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Jet of the Taylor quadratic `v^T H v / 2` of a real Hessian `H`.
    pub fn from_real_hessian(h: &DMatrix<f64>) -> Self {
        let m = h.nrows() / 2;
        let hc = h.map(|x| cz(x, 0.0));
        let mm = real_from_complex(m);
        let a = (mm.transpose() * &hc * &mm) * cz(0.5, 0.0);
        let b = mm.transpose() * &hc * mm.conjugate();
        let c = a.conjugate();
        Self { a, b, c }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let z = DVector::from_column_slice(z);
        let zb = z.conjugate();
        (z.transpose() * &self.a * &z)[(0, 0)]
            + (z.transpose() * &self.b * &zb)[(0, 0)]
            + (zb.transpose() * &self.c * &zb)[(0, 0)]
    }

    /// Jet of `Q(V zeta)`.
    pub fn change_z(&self, v: &CMat) -> Self {
        let vb = v.conjugate();
        Self {
            a: v.transpose() * &self.a * v,
            b: v.transpose() * &self.b * &vb,
            c: vb.transpose() * &self.c * &vb,
        }
    }

    /// Jet of `s Q`.
    pub fn scale_w(&self, s: Complex64) -> Self {
        Self { a: &self.a * s, b: &self.b * s, c: &self.c * s }
    }

    pub fn norm(&self) -> f64 {
        (frob(&self.a).powi(2) + frob(&self.b).powi(2) + frob(&self.c).powi(2)).sqrt()
    }
}

/// Real quadratic form `q(v) = v^T S v` on `R^{2m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealQuadratic {
    pub s: DMatrix<f64>,
}

impl RealQuadratic {
    pub fn new(s: DMatrix<f64>) -> Self {
        let st = s.transpose();
        Self { s: (s + st) * 0.5 }
    }

    /// `sum_j mu_j ((1 + lambda_j) x_j^2 + (1 - lambda_j) y_j^2)`.
    pub fn from_normal_form(mus: &[f64], lambdas: &[f64]) -> Self {
        let m = lambdas.len();
        let mut s = DMatrix::zeros(2 * m, 2 * m);
        for j in 0..m {
            s[(2 * j, 2 * j)] = mus[j] * (1.0 + lambdas[j]);
            s[(2 * j + 1, 2 * j + 1)] = mus[j] * (1.0 - lambdas[j]);
        }
        Self { s }
    }

    pub fn dim(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (v.transpose() * &self.s * &v)[(0, 0)]
    }

    pub fn to_jet(&self) -> Jet2 {
        Jet2::from_real_hessian(&(&self.s * 2.0))
    }

    /// Real form of a jet whose `B` is Hermitian and `C = conj(A)`; returns
    /// the form and the largest imaginary coefficient that was discarded.
    pub fn from_jet(jet: &Jet2) -> (Self, f64) {
        let m = jet.dim();
        let k = complex_from_real(m);
        let kb = k.conjugate();
        let n = k.transpose() * &jet.a * &k + k.transpose() * &jet.b * &kb + kb.transpose() * &jet.c * &kb;
        let sym = (&n + n.transpose()) * cz(0.5, 0.0);
        let resid = sym.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        (Self { s: sym.map(|z| z.re) }, resid)
    }

    pub fn norm(&self) -> f64 {
        self.s.norm()
    }
}

/// Second-order jet of `S` at a point of the given chart.
pub fn second_jet(chart: &Chart, p: &SurfacePoint) -> Result<Jet2> {
    let lg = chart.local_graph(p)?;
    Ok(Jet2::from_real_hessian(&lg.hessian))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flatness {
    pub flat: bool,
    /// Unit complex number making `phase * B` Hermitian with non-negative trace.
    pub phase: Complex64,
    /// `B = 0`: flat by convention.
    pub degenerate_b: bool,
    /// Second singular value of the stacked Hermitian parts, relative to `|B|`.
    pub ratio: f64,
}

/// Real coordinates of a Hermitian matrix, isometric for the Frobenius norm.
fn hermitian_coords(h: &CMat) -> Vec<f64> {
    let m = h.nrows();
    let r2 = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(m * m);
    for i in 0..m {
        v.push(h[(i, i)].re);
        for j in i + 1..m {
            v.push(r2 * h[(i, j)].re);
            v.push(r2 * h[(i, j)].im);
        }
    }
    v
}

/// Flatness of the Hermitian term: `B` is flat iff `e^{i theta} B` is
/// Hermitian for some theta. With `B = H1 + i H2` (`H1`, `H2` Hermitian) this
/// holds iff `H1`, `H2` are real-linearly dependent, i.e. the 2-row matrix of
/// their real coordinates has vanishing second singular value. The dominant
/// right singular direction `(p, q)` gives `e^{i theta} = p - i q`.
pub fn flatness_test(jet: &Jet2) -> Flatness {
    let b = &jet.b;
    let bn = frob(b);
    if bn == 0.0 {
        return Flatness { flat: true, phase: cz(1.0, 0.0), degenerate_b: true, ratio: 0.0 };
    }
    let bh = b.adjoint();
    let h1 = (b + &bh) * cz(0.5, 0.0);
    let h2 = (b - &bh) * cz(0.0, -0.5);
    let v1 = hermitian_coords(&h1);
    let v2 = hermitian_coords(&h2);
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let (g11, g12, g22) = (dot(&v1, &v1), dot(&v1, &v2), dot(&v2, &v2));
    // eigen-decomposition of the 2x2 Gram matrix
    let half_tr = 0.5 * (g11 + g22);
    let disc = (0.25 * (g11 - g22).powi(2) + g12 * g12).sqrt();
    let big = half_tr + disc;
    // sigma_1 sigma_2 = |pivot| |other - proj(other)|, computed without
    // the cancellation in det(G)
    let (pivot, other, gp) = if g11 >= g22 { (&v1, &v2, g11) } else { (&v2, &v1, g22) };
    let coef = if gp > 0.0 { dot(pivot, other) / gp } else { 0.0 };
    let perp: f64 = pivot.iter().zip(other).map(|(a, b)| (b - coef * a).powi(2)).sum::<f64>();
    let small = if big > 0.0 { gp * perp / big } else { 0.0 };
    let (mut p, mut q) = if g12.abs() > 0.0 {
        (g12, big - g11)
    } else if g11 >= g22 {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let nrm = (p * p + q * q).sqrt();
    p /= nrm;
    q /= nrm;
    let trace = p * h1.trace().re + q * h2.trace().re;
    if trace < 0.0 || (trace == 0.0 && (p < 0.0 || (p == 0.0 && q < 0.0))) {
        p = -p;
        q = -q;
    }
    let ratio = small.sqrt() / bn;
    Flatness { flat: ratio <= TOL_FLAT, phase: cz(p, -q), degenerate_b: false, ratio }
}

/// Rotates `w` by `phase` and makes the quadric real: `B` is replaced by its
/// Hermitian part and `A` by `(A + conj(C)) / 2`, `C` by `conj(A)`.
pub fn flat_normal_form(jet: &Jet2, phase: Complex64) -> Result<RealQuadratic> {
    if !flatness_test(jet).flat {
        return Err(Error::NotFlat);
    }
    let r = jet.scale_w(phase);
    let b = (&r.b + r.b.adjoint()) * cz(0.5, 0.0);
    let a = (&r.a + r.c.conjugate()) * cz(0.5, 0.0);
    let c = a.conjugate();
    let (q, resid) = RealQuadratic::from_jet(&Jet2 { a, b, c });
    debug_assert!(resid <= 1e-10 * jet.norm().max(1.0));
    Ok(q)
}

/// `Q(z) = sum_j mu_j (z_j conj(z_j) + lambda_j Re z_j^2)` in coordinates
/// `z = z_change * zeta`, after `w -> phase * w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalForm {
    pub mus: Vec<f64>,
    pub lambdas: Vec<f64>,
    #[serde(serialize_with = "ser_complex")]
    pub phase: Complex64,
    #[serde(skip)]
    pub z_change: CMat,
    /// Largest off-normal-form coefficient left after the change, relative to `|Q|`.
    pub residual: f64,
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reduction {
    Special(NormalForm),
    NonSpecial(String),
}

/// Reduces a real quadric to the special normal form: Cholesky-normalize the
/// Hermitian part `B`, then Takagi-diagonalize the transformed holomorphic
/// part. Reports `NonSpecial` when `B` is not positive definite.
pub fn special_reduction(q: &RealQuadratic) -> Result<Reduction> {
    let jet = q.to_jet();
    let m = jet.dim();
    // z^T B conj(z) = conj(z)^H conj(B)... with conj(B) = B^T Hermitian
    let hb = jet.b.transpose();
    let ev = hermitian_eigenvalues(&hb);
    let (emin, emax) = (ev[0], ev[m - 1]);
    if emin <= 0.0 {
        return Ok(Reduction::NonSpecial(format!(
            "Hermitian part not positive definite (eigenvalues {emin:.6e} .. {emax:.6e})"
        )));
    }
    if emax / emin > MAX_HERMITIAN_CONDITION {
        return Ok(Reduction::NonSpecial(format!("Hermitian part ill-conditioned (condition {:.3e})", emax / emin)));
    }
    let chol = nalgebra::Cholesky::new(hb.clone())
        .ok_or_else(|| Error::Input("Cholesky failed on a positive definite matrix".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Input("singular Cholesky factor".into()))?;
    let l_inv_h = l_inv.adjoint();
    let a_prime = l_inv.conjugate() * &jet.a * &l_inv_h;
    let a_prime = (&a_prime + a_prime.transpose()) * cz(0.5, 0.0);
    let tk = takagi(&a_prime)?;
    let t = &l_inv_h * tk.u.conjugate();
    let lambdas: Vec<f64> = tk.sigma.iter().map(|s| 2.0 * s).collect();

    let red = jet.change_z(&t);
    let mut want_a = CMat::zeros(m, m);
    for j in 0..m {
        want_a[(j, j)] = cz(0.5 * lambdas[j], 0.0);
    }
    let resid = frob(&(&red.b - CMat::identity(m, m))).max(frob(&(&red.a - &want_a)));
    let qn = jet.norm().max(f64::MIN_POSITIVE);
    // residual is measured in the reduced coordinates, where |Q| ~ 1 + |lambda|
    let scale = 1.0 + lambdas.iter().fold(0.0f64, |a, b| a.max(*b));
    let residual = resid / scale;
    if residual > 1e-8 {
        return Ok(Reduction::NonSpecial(format!(
            "normal form residual {residual:.3e} exceeds tolerance (|Q| = {qn:.3e})"
        )));
    }
    Ok(Reduction::Special(NormalForm {
        mus: vec![1.0; m],
        lambdas,
        phase: cz(1.0, 0.0),
        z_change: t,
        residual,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    SpecialElliptic,
    SpecialKHyperbolic(u32),
    Degenerate,
    NonSpecial,
    NonFlat,
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::SpecialElliptic => "E".into(),
            Classification::SpecialKHyperbolic(k) => format!("H{k}"),
            Classification::Degenerate => "degenerate".into(),
            Classification::NonSpecial => "non_special".into(),
            Classification::NonFlat => "non_flat".into(),
        }
    }

    pub fn is_special(&self) -> bool {
        matches!(self, Classification::SpecialElliptic | Classification::SpecialKHyperbolic(_))
    }
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

pub fn classify(nf: &NormalForm, tol_parab: f64) -> Classification {
    if nf.lambdas.iter().any(|l| (l - 1.0).abs() <= tol_parab) {
        return Classification::Degenerate;
    }
    match nf.lambdas.iter().filter(|&&l| l > 1.0).count() {
        0 => Classification::SpecialElliptic,
        k => Classification::SpecialKHyperbolic(k as u32),
    }
}

/// Orientation index `(-1)^k` of a special point (elliptic: `k = 0`).
pub fn point_index(class: Classification) -> Result<i32> {
    match class {
        Classification::SpecialElliptic => Ok(1),
        Classification::SpecialKHyperbolic(k) => Ok(if k % 2 == 0 { 1 } else { -1 }),
        other => Err(Error::IndexUndefined(other.label())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexPoint {
    pub location: SurfacePoint,
    pub chart: usize,
    /// False when the Newton Jacobian was singular at the root.
    pub verified: bool,
    #[serde(skip)]
    pub jet: Jet2,
    pub flat: bool,
    pub normal_form: Option<NormalForm>,
    pub classification: Classification,
    pub index: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl ComplexPoint {
    /// A point carrying only a classification, for index bookkeeping.
    pub fn synthetic(class: Classification) -> Self {
        Self {
            location: SurfacePoint::new(vec![], 0.0),
            chart: 0,
            verified: true,
            jet: Jet2::zeros(0),
            flat: true,
            normal_form: None,
            classification: class,
            index: point_index(class).ok(),
            diagnostic: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub index_sum: i64,
    pub chi_expected: i64,
    pub matches: bool,
}

pub fn euler_check(points: &[ComplexPoint], chi_expected: i64) -> Result<EulerReport> {
    let mut sum = 0i64;
    for p in points {
        if !p.classification.is_special() {
            return Err(Error::IndexFormulaInapplicable(format!(
                "point at {:?} is {}",
                p.location.x,
                p.classification.label()
            )));
        }
        sum += point_index(p.classification)? as i64;
    }
    Ok(EulerReport { index_sum: sum, chi_expected, matches: sum == chi_expected })
}

/// A converged critical point of a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub point: SurfacePoint,
    pub chart: usize,
    pub verified: bool,
}

fn residual(chart: &Chart, v: &[f64]) -> Vec<f64> {
    let d = chart.dim();
    let lv = chart.level();
    let mut r: Vec<f64> = lv.grad[..d].iter().map(|g| g.eval(v)).collect();
    r.push(lv.eval(v));
    r
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn jacobian(chart: &Chart, v: &[f64]) -> DMatrix<f64> {
    let d = chart.dim();
    let n1 = d + 1;
    let h = chart.level().eval_hess(v);
    let g = chart.level().eval_grad(v);
    let mut j = DMatrix::zeros(n1, n1);
    for i in 0..d {
        for k in 0..n1 {
            j[(i, k)] = h[i * n1 + k];
        }
    }
    for k in 0..n1 {
        j[(d, k)] = g[k];
    }
    j
}

/// Damped Newton on `(grad_x F, F) = 0` from one seed.
fn newton(chart: &Chart, seed: Vec<f64>) -> Option<Vec<f64>> {
    let dom = chart.domain();
    let mut v = seed;
    let mut r = residual(chart, &v);
    let mut rn = norm(&r);
    for _ in 0..NEWTON_MAX_ITER {
        if rn <= 1e-14 {
            break;
        }
        let j = jacobian(chart, &v);
        let step = j.lu().solve(&DVector::from_iterator(r.len(), r.iter().map(|x| -x)))?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = v.iter().zip(step.iter()).map(|(a, s)| a + scale * s).collect();
            let tr = residual(chart, &trial);
            let tn = norm(&tr);
            if tn.is_finite() && tn < rn {
                v = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
        // far outside the domain: diverging
        let escaped = v[..chart.dim()]
            .iter()
            .zip(&dom.bounds)
            .any(|(x, (lo, hi))| *x < lo - (hi - lo) || *x > hi + (hi - lo));
        if escaped {
            return None;
        }
    }
    Some(v)
}

fn seeds_for(chart: &Chart, density: usize) -> Vec<Vec<f64>> {
    let d = chart.dim();
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        (0..density).map(|k| lo + (k as f64 + 0.5) * (hi - lo) / density as f64).collect()
    };
    let axes: Vec<Vec<f64>> = chart.domain().bounds.iter().map(|&(lo, hi)| axis(lo, hi)).collect();
    let t_axis = if chart.is_graph() {
        None
    } else {
        let v = chart.validity();
        let lo = v.lo.max(-1e3);
        let hi = v.hi.min(1e3);
        Some(if lo == hi { vec![lo] } else { axis(lo, hi) })
    };
    let phi0 = chart.level().value.fix_last(0.0);
    let total = density.pow(d as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut x = Vec::with_capacity(d + 1);
        for a in &axes {
            x.push(a[rem % density]);
            rem /= density;
        }
        match &t_axis {
            None => {
                let t = phi0.eval(&x);
                x.push(t);
                out.push(x);
            }
            Some(ts) => {
                for &t in ts {
                    let mut s = x.clone();
                    s.push(t);
                    out.push(s);
                }
            }
        }
    }
    out
}

fn accept_root(chart: &Chart, v: &[f64]) -> Option<bool> {
    let d = chart.dim();
    if !chart.domain().contains(&v[..d]) || !chart.validity().contains_tol(v[d], 1e-9) {
        return None;
    }
    let r = residual(chart, v);
    if r.iter().any(|x| !(x.abs() <= ROOT_RESIDUAL)) {
        return None;
    }
    let j = jacobian(chart, v);
    let sv = j.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let ft = chart.level().grad[d].eval(v);
    Some(smin > 1e-10 * smax.max(1.0) && ft.abs() > 1e-12)
}

/// Locates complex points (`grad_x F = 0` on `F = 0`) by Newton iteration
/// from a grid of seeds in every chart. Roots are deduplicated within
/// [`DEDUP_RADIUS`], attributed to the lowest chart index, and returned
/// sorted by location.
pub fn find_complex_points(spec: &ManifoldSpec, grid_density: usize) -> Result<Vec<Root>> {
    spec.require_real_graph()?;
    if grid_density == 0 {
        return Err(Error::Input("grid density must be positive".into()));
    }
    let mut found: Vec<Root> = Vec::new();
    for (ci, chart) in spec.charts.iter().enumerate() {
        let seeds = seeds_for(chart, grid_density);
        let mut roots: Vec<(Vec<f64>, bool)> = seeds
            .into_par_iter()
            .filter_map(|s| newton(chart, s))
            .filter_map(|v| accept_root(chart, &v).map(|ok| (v, ok)))
            .collect();
        roots.sort_by(|a, b| lex(&a.0, &b.0));
        for (v, verified) in roots {
            let d = chart.dim();
            let dup = found.iter().any(|r| {
                let w = r.point.joined();
                norm(&w.iter().zip(&v).map(|(a, b)| a - b).collect::<Vec<_>>()) <= DEDUP_RADIUS
            });
            if !dup {
                found.push(Root { point: SurfacePoint::new(v[..d].to_vec(), v[d]), chart: ci, verified });
            }
        }
    }
    found.sort_by(|a, b| lex(&a.point.joined(), &b.point.joined()));
    Ok(found)
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Jet, flatness, normal form, classification and index at a root.
pub fn analyze_point(spec: &ManifoldSpec, root: &Root) -> Result<ComplexPoint> {
    let chart = &spec.charts[root.chart];
    let jet = second_jet(chart, &root.point)?;
    let fl = flatness_test(&jet);
    let mut cp = ComplexPoint {
        location: root.point.clone(),
        chart: root.chart,
        verified: root.verified,
        jet: jet.clone(),
        flat: fl.flat,
        normal_form: None,
        classification: Classification::NonFlat,
        index: None,
        diagnostic: if root.verified { None } else { Some("unverified root".into()) },
    };
    if !fl.flat {
        return Ok(cp);
    }
    let q = flat_normal_form(&jet, fl.phase)?;
    match special_reduction(&q)? {
        Reduction::NonSpecial(msg) => {
            cp.classification = Classification::NonSpecial;
            cp.diagnostic = Some(msg);
        }
        Reduction::Special(mut nf) => {
            nf.phase = fl.phase;
            cp.classification = classify(&nf, TOL_PARAB);
            cp.index = point_index(cp.classification).ok();
            cp.normal_form = Some(nf);
        }
    }
    Ok(cp)
}

pub fn analyze_points(spec: &ManifoldSpec, grid_density: usize) -> Result<Vec<ComplexPoint>> {
    find_complex_points(spec, grid_density)?.iter().map(|r| analyze_point(spec, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::manifold::{BoxDomain, GraphModel, Validity};
    use crate::poly::PolyExpr;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    #[test]
    fn jet_at_h() {
        let jet = Jet2::from_real_hessian(&diag(&[8.0, -4.0, 2.0, 2.0]));
        assert!(frob(&(&jet.b - CMat::identity(2, 2))) < 1e-15);
        assert!((jet.a[(0, 0)] - cz(1.5, 0.0)).norm() < 1e-15);
        assert!(jet.a[(1, 1)].norm() < 1e-15);
        assert_eq!(jet.c, jet.a.conjugate());
    }

    #[test]
    fn zero_hessian_zero_jet() {
        let jet = Jet2::from_real_hessian(&DMatrix::zeros(4, 4));
        assert_eq!(jet, Jet2::zeros(2));
    }

    #[test]
    fn jet_reproduces_random_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-2.0..2.0));
        let h = (&h + h.transpose()) * 0.5;
        let jet = Jet2::from_real_hessian(&h);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z: Vec<Complex64> = (0..3).map(|j| cz(v[2 * j], v[2 * j + 1])).collect();
            let dv = DVector::from_column_slice(&v);
            let want = 0.5 * (dv.transpose() * &h * &dv)[(0, 0)];
            let got = jet.eval(&z);
            worst = worst.max((got.re - want).abs()).max(got.im.abs());
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn flatness_examples() {
        let h = CMat::from_row_slice(2, 2, &[cz(2.0, 0.0), cz(0.5, 0.0), cz(0.5, 0.0), cz(1.0, 0.0)]);
        let mut jet = Jet2::zeros(2);
        jet.b = h.clone();
        let f = flatness_test(&jet);
        assert!(f.flat && f.phase == cz(1.0, 0.0));

        jet.b = &h * cz(0.0, 1.0);
        let f = flatness_test(&jet);
        assert!(f.flat);
        assert!((f.phase - cz(0.0, -1.0)).norm() < 1e-12);

        jet.b = CMat::from_row_slice(2, 2, &[cz(1.0, 0.0), cz(0.0, 0.0), cz(0.0, 0.0), cz(0.0, 1.0)]);
        assert!(!flatness_test(&jet).flat);

        jet.b = CMat::zeros(2, 2);
        let f = flatness_test(&jet);
        assert!(f.flat && f.degenerate_b && f.phase == cz(1.0, 0.0));
    }

    #[test]
    fn complex_hermitian_b_is_flat() {
        let mut jet = Jet2::zeros(2);
        jet.b = CMat::from_row_slice(2, 2, &[cz(1.0, 0.0), cz(0.3, 0.4), cz(0.3, -0.4), cz(2.0, 0.0)]);
        assert!(flatness_test(&jet).flat);
    }

    #[test]
    fn flat_normal_form_cases() {
        let q = RealQuadratic::new(diag(&[4.0, -2.0, 1.0, 1.0]));
        let back = flat_normal_form(&q.to_jet(), cz(1.0, 0.0)).unwrap();
        assert!((back.s - &q.s).norm() < 1e-14);
        let mut jet = Jet2::zeros(2);
        jet.b = CMat::from_row_slice(2, 2, &[cz(1.0, 0.0), cz(0.0, 0.0), cz(0.0, 0.0), cz(0.0, 1.0)]);
        assert!(matches!(flat_normal_form(&jet, cz(1.0, 0.0)), Err(Error::NotFlat)));
    }

    fn lambdas_of(q: &RealQuadratic) -> Vec<f64> {
        match special_reduction(q).unwrap() {
            Reduction::Special(nf) => nf.lambdas,
            Reduction::NonSpecial(m) => panic!("non-special: {m}"),
        }
    }

    #[test]
    fn reduction_examples() {
        let l = lambdas_of(&RealQuadratic::new(diag(&[4.0, -2.0, 1.0, 1.0])));
        assert!((l[0] - 3.0).abs() < 1e-12 && l[1].abs() < 1e-12);
        let l = lambdas_of(&RealQuadratic::new(diag(&[1.0; 4])));
        assert!(l.iter().all(|x| x.abs() < 1e-12));
        for s in [4.0, 8.0] {
            let l = lambdas_of(&RealQuadratic::new(diag(&[s, s, 1.0, 1.0])));
            assert!(l.iter().all(|x| x.abs() < 1e-12));
        }
        // 3x^2 - y^2 + u^2 + v^2: mu = 1, lambda = 2
        let l = lambdas_of(&RealQuadratic::new(diag(&[3.0, -1.0, 1.0, 1.0])));
        assert!((l[0] - 2.0).abs() < 1e-12 && l[1].abs() < 1e-12);
    }

    #[test]
    fn indefinite_hermitian_is_non_special() {
        // x^2 - 3y^2: Hermitian coefficient (1 - 3)/2 < 0
        let q = RealQuadratic::new(diag(&[1.0, -3.0, 1.0, 1.0]));
        assert!(matches!(special_reduction(&q).unwrap(), Reduction::NonSpecial(_)));
    }

    #[test]
    fn normal_form_residual_holds() {
        let q = RealQuadratic::from_normal_form(&[2.0, 0.5], &[3.0, 0.25]);
        match special_reduction(&q).unwrap() {
            Reduction::Special(nf) => {
                assert!(nf.residual <= 1e-8);
                let red = q.to_jet().change_z(&nf.z_change);
                let (rq, _) = RealQuadratic::from_jet(&red);
                let want = RealQuadratic::from_normal_form(&nf.mus, &nf.lambdas);
                assert!((rq.s - want.s).norm() <= 1e-8 * q.norm());
            }
            Reduction::NonSpecial(m) => panic!("{m}"),
        }
    }

    #[test]
    fn classification_and_index() {
        let nf = |l: Vec<f64>| NormalForm {
            mus: vec![1.0; l.len()],
            lambdas: l,
            phase: cz(1.0, 0.0),
            z_change: CMat::identity(2, 2),
            residual: 0.0,
        };
        assert_eq!(classify(&nf(vec![3.0, 0.0]), TOL_PARAB), Classification::SpecialKHyperbolic(1));
        assert_eq!(classify(&nf(vec![0.0, 0.0]), TOL_PARAB), Classification::SpecialElliptic);
        assert_eq!(classify(&nf(vec![1.0]), TOL_PARAB), Classification::Degenerate);
        assert_eq!(classify(&nf(vec![5.0, 2.0]), TOL_PARAB), Classification::SpecialKHyperbolic(2));
        assert_eq!(point_index(Classification::SpecialElliptic).unwrap(), 1);
        assert_eq!(point_index(Classification::SpecialKHyperbolic(1)).unwrap(), -1);
        assert_eq!(point_index(Classification::SpecialKHyperbolic(2)).unwrap(), 1);
        assert!(point_index(Classification::Degenerate).is_err());
        assert!(point_index(Classification::NonSpecial).is_err());
    }

    #[test]
    fn euler_check_examples() {
        use Classification::*;
        let pts = |c: &[Classification]| c.iter().map(|&k| ComplexPoint::synthetic(k)).collect::<Vec<_>>();
        let r = euler_check(&pts(&[SpecialElliptic, SpecialElliptic, SpecialElliptic, SpecialKHyperbolic(1)]), 2).unwrap();
        assert_eq!((r.index_sum, r.matches), (2, true));
        let r = euler_check(&pts(&[SpecialElliptic, SpecialElliptic, SpecialKHyperbolic(1), SpecialKHyperbolic(1)]), 0)
            .unwrap();
        assert_eq!((r.index_sum, r.matches), (0, true));
        let r = euler_check(&[], 0).unwrap();
        assert!(r.matches);
        assert!(matches!(euler_check(&pts(&[SpecialElliptic, Degenerate]), 2), Err(Error::IndexFormulaInapplicable(_))));
    }

    #[test]
    fn horned_sphere_points() {
        let spec = fixtures::horned_sphere();
        let pts = analyze_points(&spec, 7).unwrap();
        let locs: Vec<(Vec<f64>, f64)> = pts.iter().map(|p| (p.location.x.clone(), p.location.t)).collect();
        assert_eq!(pts.len(), 4, "{locs:?}");
        assert!(pts.iter().all(|p| p.verified));
    }

    #[test]
    fn quadric_single_point() {
        let spec = fixtures::quadric_elliptic();
        let pts = analyze_points(&spec, 5).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(norm(&pts[0].location.joined()) < 1e-12);
        assert_eq!(pts[0].classification, Classification::SpecialElliptic);
    }

    #[test]
    fn translated_quadric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect();
            // sum (x_i - a_i)^2 expanded
            let mut raw = vec![(a.iter().map(|x| x * x).sum::<f64>(), vec![0; 4])];
            for i in 0..4 {
                let mut e2 = vec![0; 4];
                e2[i] = 2;
                let mut e1 = vec![0; 4];
                e1[i] = 1;
                raw.push((1.0, e2));
                raw.push((-2.0 * a[i], e1));
            }
            let chart =
                Chart::graph(PolyExpr::new(4, raw).unwrap(), BoxDomain::cube(4, 1.0), Validity::ALL).unwrap();
            let spec = ManifoldSpec::new("tq", 3, GraphModel::RealGraph, vec![chart]).unwrap();
            let roots = find_complex_points(&spec, 4).unwrap();
            assert_eq!(roots.len(), 1);
            let err = norm(&roots[0].point.x.iter().zip(&a).map(|(x, y)| x - y).collect::<Vec<_>>());
            assert!(err <= 1e-8, "{err}");
        }
    }

    #[test]
    fn vgraph_rejected() {
        let mut spec = fixtures::quadric_elliptic();
        spec.graph_model = GraphModel::VGraph;
        assert!(matches!(find_complex_points(&spec, 3), Err(Error::UnsupportedModel(_))));
    }
}
