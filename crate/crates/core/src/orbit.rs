//! Census of the CR-orbit foliation. For graph specs in `{Im w = 0}` the
//! orbits are the connected components of the level sets `{t = c}` of `S`,
//! so the census counts components of `{F(., c) = 0}` on a grid and locates
//! the levels where the count changes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{classify_cells, label_components, sample, CellKind, GridShape};
use crate::manifold::{BoxDomain, Chart, ManifoldSpec};
use crate::poly::PolyExpr;
use crate::singularity::{Classification, ComplexPoint, RealQuadratic};

/// Labeled surface cells of one level set.
#[derive(Debug, Clone)]
pub struct LevelComponents {
    pub c: f64,
    pub count: usize,
    pub shape: GridShape,
    /// Per cell: 0 for non-surface cells, else the component label.
    pub labels: Vec<u32>,
}

impl LevelComponents {
    pub fn cells(&self, label: u32) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l == label).map(|(i, _)| i).collect()
    }

    pub fn surface_cells(&self) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l != 0).map(|(i, _)| i).collect()
    }
}

fn components_of(poly: &PolyExpr, c: f64, shape: &GridShape) -> LevelComponents {
    let values = sample(poly, shape);
    let kinds = classify_cells(&values, shape);
    let mask: Vec<bool> = kinds.iter().map(|k| *k == CellKind::Surface).collect();
    let (count, labels) = label_components(shape, &mask);
    LevelComponents { c, count, shape: shape.clone(), labels }
}

/// Components of `{x in box : F(x, c) = 0}`. A cell is a surface cell when
/// its corner values take both signs.
pub fn level_components(chart: &Chart, c: f64, bbox: &BoxDomain, resolution: usize) -> Result<LevelComponents> {
    let shape = GridShape::new(bbox.clone(), resolution)?;
    Ok(components_of(&chart.slice_poly(c), c, &shape))
}

/// Level-set components of the whole spec at `c`, using the first chart
/// valid there. Levels outside every chart give an empty set.
pub fn spec_level_components(spec: &ManifoldSpec, c: f64, resolution: usize) -> Result<LevelComponents> {
    let shape = GridShape::new(spec.bounding_box(), resolution)?;
    match spec.chart_at(c) {
        Some(chart) => Ok(components_of(&chart.slice_poly(c), c, &shape)),
        None => {
            let n = shape.n_cells();
            Ok(LevelComponents { c, count: 0, shape, labels: vec![0; n] })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitCensus {
    pub levels: Vec<f64>,
    pub counts: Vec<usize>,
    /// Bisection-refined intervals `[lo, hi]` across which the count changes.
    pub singular_levels: Vec<[f64; 2]>,
    pub hyperbolic_values: Vec<f64>,
    pub resolution: usize,
    pub cell_width: f64,
}

/// Component counts at each level plus the singular levels between them.
pub fn census(spec: &ManifoldSpec, levels: &[f64], resolution: usize) -> Result<OrbitCensus> {
    spec.require_real_graph()?;
    let mut levels = levels.to_vec();
    if levels.iter().any(|c| !c.is_finite()) {
        return Err(Error::Input("non-finite census level".into()));
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let shape = GridShape::new(spec.bounding_box(), resolution)?;
    let cell_width = shape.max_cell_width();
    let count_at = |c: f64| -> Result<usize> { Ok(spec_level_components(spec, c, resolution)?.count) };
    let counts: Vec<usize> = levels.iter().map(|&c| count_at(c)).collect::<Result<_>>()?;

    let mut singular_levels = Vec::new();
    for k in 1..levels.len() {
        if counts[k] == counts[k - 1] {
            continue;
        }
        let (mut lo, mut hi) = (levels[k - 1], levels[k]);
        let low_count = counts[k - 1];
        while hi - lo > cell_width {
            let mid = 0.5 * (lo + hi);
            if count_at(mid)? == low_count {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        singular_levels.push([lo, hi]);
    }
    Ok(OrbitCensus { levels, counts, singular_levels, hyperbolic_values: Vec::new(), resolution, cell_width })
}

fn interval_distance(v: f64, iv: &[f64; 2]) -> f64 {
    if v < iv[0] {
        iv[0] - v
    } else if v > iv[1] {
        v - iv[1]
    } else {
        0.0
    }
}

/// Every singular level lies within one cell width of the graph value of a
/// special 1-hyperbolic point, and every such value strictly inside the
/// census range is matched by a singular level.
pub fn singular_match(census: &OrbitCensus, points: &[ComplexPoint]) -> bool {
    let hyper: Vec<f64> = points
        .iter()
        .filter(|p| p.classification == Classification::SpecialKHyperbolic(1))
        .map(|p| p.location.t)
        .collect();
    let tol = census.cell_width;
    let forward = census
        .singular_levels
        .iter()
        .all(|iv| hyper.iter().any(|&v| interval_distance(v, iv) <= tol));
    let (first, last) = match (census.levels.first(), census.levels.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return forward,
    };
    let backward = hyper
        .iter()
        .filter(|&&v| v > first && v < last)
        .all(|&v| census.singular_levels.iter().any(|iv| interval_distance(v, iv) <= tol));
    forward && backward
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeComponents {
    pub count: usize,
    /// Sign of the negative-coefficient coordinate on each component.
    pub signs: Vec<i8>,
}

/// Components of the punctured null cone `{Q = 0}` of a quadratic form in
/// the annulus `radius / 10 <= |v| <= radius`; only cells whose corners all
/// clear the inner ball are kept. `axis` is the coordinate whose sign
/// separates the expected two nappes.
pub fn quadric_cone_components(q: &RealQuadratic, axis: usize, radius: f64, resolution: usize) -> Result<ConeComponents> {
    if !(radius > 0.0) {
        return Err(Error::Input("cone radius must be positive".into()));
    }
    let d = q.s.nrows();
    let mut raw = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let mut e = vec![0u32; d];
            e[i] += 1;
            e[j] += 1;
            raw.push((q.s[(i, j)], e));
        }
    }
    let poly = PolyExpr::new(d, raw)?;
    let shape = GridShape::new(BoxDomain::cube(d, radius), resolution)?;
    let values = sample(&poly, &shape);
    let kinds = classify_cells(&values, &shape);
    let inner = radius / 10.0;
    let half: Vec<f64> = (0..d).map(|a| 0.5 * shape.step(a)).collect();
    let mask: Vec<bool> = (0..shape.n_cells())
        .map(|cell| {
            if kinds[cell] != CellKind::Surface {
                return false;
            }
            let ctr = shape.cell_center(cell);
            let center_norm = ctr.iter().map(|x| x * x).sum::<f64>().sqrt();
            // nearest corner to the origin
            let nearest: f64 = ctr
                .iter()
                .zip(&half)
                .map(|(x, h)| {
                    let m = x.abs() - h;
                    if m > 0.0 {
                        m * m
                    } else {
                        (x.abs() - h).powi(2).min((x.abs() + h).powi(2))
                    }
                })
                .sum::<f64>()
                .sqrt();
            center_norm <= radius && nearest >= inner
        })
        .collect();
    let (count, labels) = label_components(&shape, &mask);
    let mut signs = vec![0i8; count];
    for (cell, &l) in labels.iter().enumerate() {
        if l != 0 && signs[l as usize - 1] == 0 {
            let x = shape.cell_center(cell)[axis];
            signs[l as usize - 1] = if x > 0.0 { 1 } else if x < 0.0 { -1 } else { 0 };
        }
    }
    Ok(ConeComponents { count, signs })
}

/// Cone test at a special 1-hyperbolic point, on its normal form
/// `sum (1 + lambda_j) x_j^2 + (1 - lambda_j) y_j^2`.
pub fn cone_components(point: &ComplexPoint, radius: f64, resolution: usize) -> Result<ConeComponents> {
    let nf = match (&point.classification, &point.normal_form) {
        (Classification::SpecialKHyperbolic(1), Some(nf)) => nf,
        (c, _) => return Err(Error::NotHyperbolic(c.label())),
    };
    let q = RealQuadratic::from_normal_form(&nf.mus, &nf.lambdas);
    let j = nf.lambdas.iter().position(|&l| l > 1.0).expect("one hyperbolic direction");
    quadric_cone_components(&q, 2 * j + 1, radius, resolution)
}

/// Transversal function `nu`: the graph value rescaled to `[0, 1]` over the
/// range of `t` on `S`, constant on every orbit. Knots mark the singular
/// levels separating regions.
#[derive(Debug, Clone, Serialize)]
pub struct TransversalFunction {
    pub t_min: f64,
    pub t_max: f64,
    pub knots: Vec<f64>,
}

impl TransversalFunction {
    pub fn value(&self, t: f64) -> f64 {
        ((t - self.t_min) / (self.t_max - self.t_min)).clamp(0.0, 1.0)
    }

    pub fn sample(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.value(t)).collect()
    }
}

/// Range of the graph value over `S` within the analysis box: graph charts
/// are sampled on the grid and clipped to their validity, implicit charts
/// contribute their validity interval.
pub fn graph_value_range(spec: &ManifoldSpec, resolution: usize) -> Result<(f64, f64)> {
    let shape = GridShape::new(spec.bounding_box(), resolution)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for chart in &spec.charts {
        let v = chart.validity();
        let (a, b) = if chart.is_graph() {
            let vals = sample(&chart.slice_poly(0.0), &shape);
            let mn = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let mx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (mn.max(v.lo), mx.min(v.hi))
        } else {
            (v.lo, v.hi)
        };
        if a <= b {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::UnsupportedGeometry("graph value range is empty or unbounded".into()));
    }
    Ok((lo, hi))
}

pub fn build_transversal_function(spec: &ManifoldSpec, census: &OrbitCensus) -> Result<TransversalFunction> {
    let (t_min, t_max) = graph_value_range(spec, census.resolution)?;
    let knots = census.singular_levels.iter().map(|iv| 0.5 * (iv[0] + iv[1])).collect();
    Ok(TransversalFunction { t_min, t_max, knots })
}
