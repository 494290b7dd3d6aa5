//! Slice-wise Levi-flat filling. For graph specs in `{Im w = 0}` the leaves
//! of the filling are the hyperplane sections `{t = c}` of the region
//! bounded by `S`, so each slice is the closed sublevel set `{F(., c) <= 0}`
//! of the valid chart, split into face-connected leaves.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{cell_edge_zeros, classify_cells, label_components, sample, CellKind, GridShape};
use crate::manifold::{Chart, GraphModel, ManifoldSpec};
use crate::orbit::spec_level_components;
use crate::poly::PolyExpr;

#[derive(Debug, Clone, Serialize)]
pub struct Leaf {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SliceFill {
    pub c: f64,
    pub shape: GridShape,
    pub leaves: Vec<Leaf>,
    /// Cells where `F(., c)` changes sign, sorted.
    pub boundary_cells: Vec<usize>,
    pub seed_leaf: Option<usize>,
    /// Per cell: 0 outside, else leaf label (1-based).
    pub labels: Vec<u32>,
    /// Corner values of `F(., c)`.
    pub values: Vec<f64>,
}

impl SliceFill {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn interior_cells(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.leaves.iter().flat_map(|l| l.interior.iter().copied()).collect();
        v.sort_unstable();
        v
    }
}

fn check_model(spec: &ManifoldSpec) -> Result<()> {
    if spec.graph_model == GraphModel::VGraph && spec.charts.iter().any(|c| !c.is_graph()) {
        return Err(Error::UnsupportedGeometry(
            "v_graph spec with implicit charts: interior not determined by the sign of phi - c".into(),
        ));
    }
    Ok(())
}

pub fn fill_slice(spec: &ManifoldSpec, c: f64, seed: Option<&[f64]>, resolution: usize) -> Result<SliceFill> {
    check_model(spec)?;
    let chart = spec.chart_at(c).ok_or(Error::EmptySlice(c))?;
    let shape = GridShape::new(spec.bounding_box(), resolution)?;
    let poly = chart.slice_poly(c);
    let values = sample(&poly, &shape);
    let kinds = classify_cells(&values, &shape);
    let boundary_cells: Vec<usize> =
        kinds.iter().enumerate().filter(|(_, k)| **k == CellKind::Surface).map(|(i, _)| i).collect();
    if boundary_cells.is_empty() {
        return Err(Error::EmptySlice(c));
    }
    let mask: Vec<bool> = kinds.iter().map(|k| *k != CellKind::Outside).collect();
    let (count, labels) = label_components(&shape, &mask);
    let mut leaves = vec![Leaf { interior: Vec::new(), boundary: Vec::new() }; count];
    for (cell, &l) in labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let leaf = &mut leaves[l as usize - 1];
        match kinds[cell] {
            CellKind::Interior => leaf.interior.push(cell),
            CellKind::Surface => leaf.boundary.push(cell),
            CellKind::Outside => {}
        }
    }
    let seed_leaf = match seed {
        None => None,
        Some(p) => {
            if p.len() != shape.dim() || !(poly.eval(p) < 0.0) {
                return Err(Error::SeedOutsideFilling);
            }
            let cell = shape.cell_containing(p).ok_or(Error::SeedOutsideFilling)?;
            match labels[cell] {
                0 => return Err(Error::SeedOutsideFilling),
                l => Some(l as usize - 1),
            }
        }
    };
    Ok(SliceFill { c, shape, leaves, boundary_cells, seed_leaf, labels, values })
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub levels: Vec<f64>,
    pub leaf_counts: Vec<usize>,
    pub census_counts: Vec<usize>,
    pub counts_match: bool,
    /// Largest `|A xor B|` between consecutive slices closer than 0.05,
    /// as a fraction of all grid cells.
    pub max_symdiff_fraction: f64,
    pub semicontinuous: bool,
}

pub const FAMILY_STEP: f64 = 0.05;
pub const FAMILY_SYMDIFF: f64 = 0.10;

fn symdiff(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                n += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                n += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    n + (a.len() - i) + (b.len() - j)
}

/// Fills every level (empty slices are skipped with a count of 0) and
/// cross-checks leaf counts against the orbit census at the same levels.
pub fn fill_family(spec: &ManifoldSpec, levels: &[f64], resolution: usize) -> Result<(Vec<SliceFill>, FamilyReport)> {
    spec.require_real_graph()?;
    let mut levels = levels.to_vec();
    levels.sort_by(f64::total_cmp);
    let mut slices = Vec::new();
    let mut leaf_counts = Vec::new();
    let mut census_counts = Vec::new();
    let mut prev: Option<(f64, Vec<usize>)> = None;
    let mut max_frac = 0.0f64;
    for &c in &levels {
        census_counts.push(spec_level_components(spec, c, resolution)?.count);
        match fill_slice(spec, c, None, resolution) {
            Ok(s) => {
                leaf_counts.push(s.leaf_count());
                let mut closed = s.interior_cells();
                closed.extend(&s.boundary_cells);
                closed.sort_unstable();
                if let Some((pc, pcells)) = &prev {
                    if c - pc <= FAMILY_STEP + 1e-12 {
                        max_frac = max_frac.max(symdiff(pcells, &closed) as f64 / s.shape.n_cells() as f64);
                    }
                }
                prev = Some((c, closed));
                slices.push(s);
            }
            Err(Error::EmptySlice(_)) => {
                leaf_counts.push(0);
                prev = None;
            }
            Err(e) => return Err(e),
        }
    }
    let counts_match = leaf_counts == census_counts;
    let report = FamilyReport {
        levels,
        leaf_counts,
        census_counts,
        counts_match,
        max_symdiff_fraction: max_frac,
        semicontinuous: max_frac <= FAMILY_SYMDIFF,
    };
    Ok((slices, report))
}

/// Upper bound on the distance from a cell center to `{F(., c) = 0}`:
/// the shorter of a gradient-Newton projection onto the zero set and the
/// nearest zero found on the cell's edges.
fn distance_to_slice(poly: &PolyExpr, grad: &[PolyExpr], fill: &SliceFill, cell: usize) -> f64 {
    let ctr = fill.shape.cell_center(cell);
    let dist = |z: &[f64]| z.iter().zip(&ctr).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let mut best = cell_edge_zeros(poly, &fill.shape, &fill.values, cell)
        .iter()
        .map(|z| dist(z))
        .fold(f64::INFINITY, f64::min);
    let mut x = ctr.clone();
    for _ in 0..PROJECTION_STEPS {
        let f = poly.eval(&x);
        let g: Vec<f64> = grad.iter().map(|d| d.eval(&x)).collect();
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if !(g2 > 0.0) {
            return best;
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= f * gi / g2;
        }
        if f.abs() <= PROJECTION_RESIDUAL * g2.sqrt() {
            break;
        }
    }
    if poly.eval(&x).abs() <= PROJECTION_RESIDUAL.sqrt() {
        best = best.min(dist(&x));
    }
    best
}

const PROJECTION_STEPS: usize = 20;
const PROJECTION_RESIDUAL: f64 = 1e-12;

/// Largest distance from a boundary cell center to the slice of `S`.
pub fn boundary_check(fill: &SliceFill, chart: &Chart) -> f64 {
    let poly = chart.slice_poly(fill.c);
    let grad = poly.gradient();
    fill.boundary_cells
        .par_iter()
        .map(|&cell| distance_to_slice(&poly, &grad, fill, cell))
        .reduce(|| 0.0, f64::max)
}
