//! Submanifold specifications: charts, domains and local graph geometry.
//!
//! A chart describes a piece of `S` inside the real hyperplane `{Im w = 0}`
//! of `C^n`, in real coordinates `x = (x_1, y_1, ..., x_{n-1}, y_{n-1})` and
//! the graph value `t = Re w`. Graph charts give `t = phi(x)` directly;
//! implicit charts give `F(x, t) = 0` and are needed for pieces that fold
//! over the `x`-space. Internally every chart carries its level function
//! `F(x, t)` (for graph charts `F = phi(x) - t`), negative on the inside.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{DiffPoly, PolyExpr};

/// Axis-aligned box in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub bounds: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidSpec(format!("degenerate domain on axis {i}: [{lo}, {hi}]")));
            }
        }
        Ok(Self { bounds })
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self { bounds: vec![(-half_width, half_width); dim] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.bounds).all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn hull(&self, other: &Self) -> Self {
        let bounds = self
            .bounds
            .iter()
            .zip(&other.bounds)
            .map(|(a, b)| (a.0.min(b.0), a.1.max(b.1)))
            .collect();
        Self { bounds }
    }
}

/// Closed interval of admissible graph values; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub lo: f64,
    pub hi: f64,
}

impl Validity {
    pub const ALL: Validity = Validity { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidSpec(format!("bad validity interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn contains_tol(&self, t: f64, tol: f64) -> bool {
        t >= self.lo - tol && t <= self.hi + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModel {
    RealGraph,
    VGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartForm {
    /// `t = phi(x)` with `phi` over the `2n-2` real variables.
    Graph(PolyExpr),
    /// `F(x, t) = 0` with `F` over `2n-1` variables, `t` last.
    Implicit(PolyExpr),
}

/// A point of `S`: real coordinates plus the graph value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl SurfacePoint {
    pub fn new(x: Vec<f64>, t: f64) -> Self {
        Self { x, t }
    }

    /// Coordinates `(x, t)` as one vector in `R^{2n-1}`.
    pub fn joined(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.push(self.t);
        v
    }
}

/// Value, gradient and Hessian of the graph function of `S` near a point.
#[derive(Debug, Clone)]
pub struct LocalGraph {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    form: ChartForm,
    domain: BoxDomain,
    validity: Validity,
    graph: Option<DiffPoly>,
    level: DiffPoly,
}

impl Chart {
    pub fn graph(phi: PolyExpr, domain: BoxDomain, validity: Validity) -> Result<Self> {
        let d = domain.dim();
        if phi.nvars() != d {
            return Err(Error::InvalidSpec(format!(
                "graph chart has {} variables, domain has {d}",
                phi.nvars()
            )));
        }
        let level = phi.extend_vars(d + 1).sub(&PolyExpr::var(d + 1, d));
        Ok(Self {
            form: ChartForm::Graph(phi.clone()),
            domain,
            validity,
            graph: Some(DiffPoly::new(phi)),
            level: DiffPoly::new(level),
        })
    }

    pub fn implicit(f: PolyExpr, domain: BoxDomain, validity: Validity) -> Result<Self> {
        let d = domain.dim();
        if f.nvars() != d + 1 {
            return Err(Error::InvalidSpec(format!(
                "implicit chart has {} variables, expected {}",
                f.nvars(),
                d + 1
            )));
        }
        Ok(Self {
            form: ChartForm::Implicit(f.clone()),
            domain,
            validity,
            graph: None,
            level: DiffPoly::new(f),
        })
    }

    pub fn form(&self) -> &ChartForm {
        &self.form
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_graph(&self) -> bool {
        self.graph.is_some()
    }

    /// Level function `F(x, t)` with its derivatives.
    pub fn level(&self) -> &DiffPoly {
        &self.level
    }

    /// `F(., c)` as a polynomial in `x`.
    pub fn slice_poly(&self, c: f64) -> PolyExpr {
        self.level.value.fix_last(c)
    }

    fn graph_poly(&self) -> Result<&DiffPoly> {
        self.graph
            .as_ref()
            .ok_or_else(|| Error::UnsupportedGeometry("implicit chart has no single-valued graph function".into()))
    }

    fn check_domain(&self, p: &[f64]) -> Result<()> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{p:?}")))
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        let g = self.graph_poly()?;
        self.check_domain(p)?;
        Ok(g.eval(p))
    }

    pub fn grad(&self, p: &[f64]) -> Result<Vec<f64>> {
        let g = self.graph_poly()?;
        self.check_domain(p)?;
        Ok(g.eval_grad(p))
    }

    pub fn hessian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.graph_poly()?;
        self.check_domain(p)?;
        let d = self.dim();
        Ok(DMatrix::from_row_slice(d, d, &g.eval_hess(p)))
    }

    /// Graph function of `S` near a point, via the implicit function
    /// theorem for implicit charts. Requires `dF/dt != 0`.
    pub fn local_graph(&self, pt: &SurfacePoint) -> Result<LocalGraph> {
        self.check_domain(&pt.x)?;
        if let Some(g) = &self.graph {
            let d = self.dim();
            return Ok(LocalGraph {
                value: g.eval(&pt.x),
                grad: g.eval_grad(&pt.x),
                hessian: DMatrix::from_row_slice(d, d, &g.eval_hess(&pt.x)),
            });
        }
        let d = self.dim();
        let v = pt.joined();
        let gf = self.level.eval_grad(&v);
        let hf = self.level.eval_hess(&v);
        let ft = gf[d];
        let scale = gf.iter().fold(1.0f64, |m, g| m.max(g.abs()));
        if ft.abs() <= 1e-12 * scale {
            return Err(Error::UnsupportedGeometry(
                "level function is stationary in t; S is not a local graph here".into(),
            ));
        }
        let grad: Vec<f64> = gf[..d].iter().map(|fi| -fi / ft).collect();
        let n1 = d + 1;
        let mut hess = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let fij = hf[i * n1 + j];
                let fit = hf[i * n1 + d];
                let fjt = hf[j * n1 + d];
                let ftt = hf[d * n1 + d];
                hess[(i, j)] = -(fij + fit * grad[j] + fjt * grad[i] + ftt * grad[i] * grad[j]) / ft;
            }
        }
        Ok(LocalGraph { value: pt.t, grad, hessian: hess })
    }

    /// Tangent frame of `S` at a point, as vectors in `R^{2n}` with
    /// coordinates `(x_1, y_1, ..., x_n, y_n)`: `nu_i = e_i + (dphi/dx_i) e_{x_n}`.
    pub fn tangent_frame(&self, pt: &SurfacePoint) -> Result<Vec<Vec<f64>>> {
        let lg = self.local_graph(pt)?;
        let d = self.dim();
        Ok((0..d)
            .map(|i| {
                let mut v = vec![0.0; d + 2];
                v[i] = 1.0;
                v[d] = lg.grad[i];
                v
            })
            .collect())
    }
}

#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    pub name: String,
    pub n: usize,
    pub graph_model: GraphModel,
    pub charts: Vec<Chart>,
    pub expected_chi: Option<i64>,
    /// Default census levels.
    pub levels: Option<Vec<f64>>,
    /// Analysis box; defaults to the hull of the chart domains.
    pub analysis_box: Option<BoxDomain>,
}

impl ManifoldSpec {
    pub fn new(name: impl Into<String>, n: usize, graph_model: GraphModel, charts: Vec<Chart>) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            n,
            graph_model,
            charts,
            expected_chi: None,
            levels: None,
            analysis_box: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_expected_chi(mut self, chi: i64) -> Self {
        self.expected_chi = Some(chi);
        self
    }

    pub fn with_levels(mut self, levels: Vec<f64>) -> Self {
        self.levels = Some(levels);
        self
    }

    pub fn with_box(mut self, b: BoxDomain) -> Result<Self> {
        if b.dim() != self.dim() {
            return Err(Error::InvalidSpec("analysis box dimension mismatch".into()));
        }
        self.analysis_box = Some(b);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        2 * self.n - 2
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidSpec(format!("ambient dimension n = {} < 3", self.n)));
        }
        if self.charts.is_empty() {
            return Err(Error::InvalidSpec("no charts".into()));
        }
        let d = self.dim();
        for (k, c) in self.charts.iter().enumerate() {
            if c.dim() != d {
                return Err(Error::InvalidSpec(format!("chart {k} has dimension {}, expected {d}", c.dim())));
            }
        }
        for (i, a) in self.charts.iter().enumerate() {
            for b in &self.charts[i + 1..] {
                let lo = a.validity.lo.max(b.validity.lo);
                let hi = a.validity.hi.min(b.validity.hi);
                if hi > lo {
                    return Err(Error::InvalidSpec(format!(
                        "sibling charts overlap on [{lo}, {hi}] beyond a shared interface"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn require_real_graph(&self) -> Result<()> {
        match self.graph_model {
            GraphModel::RealGraph => Ok(()),
            GraphModel::VGraph => Err(Error::UnsupportedModel("operation requires the real_graph model".into())),
        }
    }

    pub fn bounding_box(&self) -> BoxDomain {
        if let Some(b) = &self.analysis_box {
            return b.clone();
        }
        let mut b = self.charts[0].domain.clone();
        for c in &self.charts[1..] {
            b = b.hull(&c.domain);
        }
        b
    }

    /// First chart whose validity interval contains `c`.
    pub fn chart_at(&self, c: f64) -> Option<&Chart> {
        self.charts.iter().find(|ch| ch.validity.contains(c))
    }

    /// Replaces a lower/upper chart pair meeting at a single interface value
    /// by three charts: the two originals shrunk away from the interface and
    /// an implicit chart blending their level functions over
    /// `|t - interface| <= eps` with a quintic smoothstep weight. The weight
    /// is flat to second order at both ends of the band.
    pub fn with_blend(&self, eps: f64) -> Result<Self> {
        if self.charts.len() != 2 || !(eps > 0.0) {
            return Err(Error::InvalidSpec("blend needs exactly two charts and eps > 0".into()));
        }
        let (lower, upper) = if self.charts[0].validity.hi <= self.charts[1].validity.lo {
            (&self.charts[0], &self.charts[1])
        } else {
            (&self.charts[1], &self.charts[0])
        };
        let v = lower.validity.hi;
        if upper.validity.lo != v {
            return Err(Error::InvalidSpec("charts do not share an interface value".into()));
        }
        if lower.validity.lo > v - eps || upper.validity.hi < v + eps {
            return Err(Error::InvalidSpec("blend band exceeds a chart's validity".into()));
        }
        let d = self.dim();
        let nv = d + 1;
        // u = (t - v + eps) / (2 eps), s = 10u^3 - 15u^4 + 6u^5
        let u = PolyExpr::var(nv, d)
            .scale(1.0 / (2.0 * eps))
            .add(&PolyExpr::constant(nv, (eps - v) / (2.0 * eps)));
        let u2 = u.mul(&u);
        let u3 = u2.mul(&u);
        let u4 = u3.mul(&u);
        let u5 = u4.mul(&u);
        let s = u3.scale(10.0).add(&u4.scale(-15.0)).add(&u5.scale(6.0));
        let one_minus_s = PolyExpr::constant(nv, 1.0).sub(&s);
        let fl = &lower.level.value;
        let fu = &upper.level.value;
        let blended = one_minus_s.mul(fl).add(&s.mul(fu));
        let band = Chart::implicit(blended, lower.domain.hull(&upper.domain), Validity::new(v - eps, v + eps)?)?;
        let mut lo_chart = lower.clone();
        lo_chart.validity.hi = v - eps;
        let mut up_chart = upper.clone();
        up_chart.validity.lo = v + eps;
        let mut out = self.clone();
        out.name = format!("{}+blend", self.name);
        out.charts = vec![lo_chart, band, up_chart];
        Ok(out)
    }
}
