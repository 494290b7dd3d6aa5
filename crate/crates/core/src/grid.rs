//! Regular corner-sampled grids over a box and face-adjacency labeling.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifold::BoxDomain;
use crate::poly::PolyExpr;

pub const MIN_RESOLUTION: usize = 8;
pub const DEFAULT_RESOLUTION: usize = 33;

/// `resolution` cells per axis over a box; values live on the
/// `(resolution + 1)^d` corners.
#[derive(Debug, Clone, PartialEq)]
pub struct GridShape {
    pub bbox: BoxDomain,
    pub resolution: usize,
}

impl GridShape {
    pub fn new(bbox: BoxDomain, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::Input(format!("resolution {resolution} < {MIN_RESOLUTION}")));
        }
        let cells = (resolution as f64).powi(bbox.dim() as i32);
        if cells > 4.0e8 {
            return Err(Error::Input(format!("grid of {cells:.3e} cells is too large")));
        }
        Ok(Self { bbox, resolution })
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn n_cells(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn n_corners(&self) -> usize {
        (self.resolution + 1).pow(self.dim() as u32)
    }

    pub fn step(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bbox.bounds[axis];
        (hi - lo) / self.resolution as f64
    }

    pub fn max_cell_width(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).fold(0.0, f64::max)
    }

    pub fn cell_diagonal(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        let (lo, hi) = self.bbox.bounds[axis];
        if k == self.resolution {
            hi
        } else {
            lo + k as f64 * (hi - lo) / self.resolution as f64
        }
    }

    pub fn cell_multi(&self, mut idx: usize) -> Vec<usize> {
        let mut m = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            m.push(idx % self.resolution);
            idx /= self.resolution;
        }
        m
    }

    pub fn cell_index(&self, multi: &[usize]) -> usize {
        multi.iter().rev().fold(0, |acc, &k| acc * self.resolution + k)
    }

    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        self.cell_multi(idx)
            .iter()
            .enumerate()
            .map(|(a, &k)| 0.5 * (self.coord(a, k) + self.coord(a, k + 1)))
            .collect()
    }

    pub fn cell_containing(&self, p: &[f64]) -> Option<usize> {
        if !self.bbox.contains(p) {
            return None;
        }
        let multi: Vec<usize> = p
            .iter()
            .enumerate()
            .map(|(a, &x)| {
                let (lo, _) = self.bbox.bounds[a];
                (((x - lo) / self.step(a)).floor() as usize).min(self.resolution - 1)
            })
            .collect();
        Some(self.cell_index(&multi))
    }

    /// Flat corner index of a cell's lowest corner.
    fn base_corner(&self, cell: usize) -> usize {
        let r1 = self.resolution + 1;
        self.cell_multi(cell).iter().rev().fold(0, |acc, &k| acc * r1 + k)
    }

    /// Flat offsets from a cell's base corner to its `2^d` corners; bit `a`
    /// of the position selects the upper side on axis `a`.
    fn corner_offsets(&self) -> Vec<usize> {
        let d = self.dim();
        let r1 = self.resolution + 1;
        (0..1usize << d)
            .map(|bits| (0..d).filter(|a| bits >> a & 1 == 1).map(|a| r1.pow(a as u32)).sum())
            .collect()
    }

    pub fn corner_point(&self, mut idx: usize) -> Vec<f64> {
        let r1 = self.resolution + 1;
        (0..self.dim())
            .map(|a| {
                let k = idx % r1;
                idx /= r1;
                self.coord(a, k)
            })
            .collect()
    }

    /// Face neighbours of a cell.
    pub fn neighbours(&self, cell: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut stride = 1;
        let mut rem = cell;
        for _ in 0..self.dim() {
            let k = rem % self.resolution;
            rem /= self.resolution;
            if k > 0 {
                out.push(cell - stride);
            }
            if k + 1 < self.resolution {
                out.push(cell + stride);
            }
            stride *= self.resolution;
        }
    }
}

/// Samples a polynomial at every grid corner.
pub fn sample(poly: &PolyExpr, shape: &GridShape) -> Vec<f64> {
    let d = shape.dim();
    assert_eq!(poly.nvars(), d);
    let r1 = shape.resolution + 1;
    let maxdeg = poly.terms().iter().flat_map(|t| t.exps.iter().copied()).max().unwrap_or(0) as usize;
    // pow[a][k][e] = coord(a, k)^e
    let pow: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|a| {
            (0..r1)
                .map(|k| {
                    let x = shape.coord(a, k);
                    let mut row = Vec::with_capacity(maxdeg + 1);
                    let mut p = 1.0;
                    for _ in 0..=maxdeg {
                        row.push(p);
                        p *= x;
                    }
                    row
                })
                .collect()
        })
        .collect();
    let terms = poly.terms();
    (0..shape.n_corners())
        .into_par_iter()
        .with_min_len(4096)
        .map(|idx| {
            let mut ks = [0usize; 16];
            let mut rem = idx;
            for k in ks.iter_mut().take(d) {
                *k = rem % r1;
                rem /= r1;
            }
            let mut acc = 0.0;
            for t in terms {
                let mut m = t.coeff;
                for (a, &e) in t.exps.iter().enumerate() {
                    if e > 0 {
                        m *= pow[a][ks[a]][e as usize];
                    }
                }
                acc += m;
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum CellKind {
    /// Every corner non-negative.
    Outside = 0,
    /// Corners of both signs.
    Surface = 1,
    /// Every corner negative.
    Interior = 2,
}

/// Classifies cells by the signs of the corner values.
pub fn classify_cells(values: &[f64], shape: &GridShape) -> Vec<CellKind> {
    let offsets = shape.corner_offsets();
    (0..shape.n_cells())
        .into_par_iter()
        .with_min_len(4096)
        .map(|cell| {
            let base = shape.base_corner(cell);
            let mut neg = 0usize;
            for off in &offsets {
                if values[base + off] < 0.0 {
                    neg += 1;
                }
            }
            if neg == 0 {
                CellKind::Outside
            } else if neg == offsets.len() {
                CellKind::Interior
            } else {
                CellKind::Surface
            }
        })
        .collect()
}

/// Face-connected components of the masked cells. Labels start at 1 and
/// are assigned in order of each component's lowest cell index; unmasked
/// cells get 0.
pub fn label_components(shape: &GridShape, mask: &[bool]) -> (usize, Vec<u32>) {
    let mut labels = vec![0u32; mask.len()];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    let mut nb = Vec::with_capacity(2 * shape.dim());
    for start in 0..mask.len() {
        if !mask[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            shape.neighbours(c, &mut nb);
            for &n in &nb {
                if mask[n] && labels[n] == 0 {
                    labels[n] = count;
                    queue.push_back(n);
                }
            }
        }
    }
    (count as usize, labels)
}

/// Zero of a polynomial on the segment `[a, b]` where it changes sign,
/// by bisection.
pub fn edge_zero(poly: &PolyExpr, a: &[f64], b: &[f64], fa: f64) -> Vec<f64> {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let lerp = |s: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect() };
    let neg_at_lo = fa < 0.0;
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        let v = poly.eval(&lerp(mid));
        if (v < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lerp(0.5 * (lo + hi))
}

/// All sign-change zeros on the edges of a cell.
pub fn cell_edge_zeros(poly: &PolyExpr, shape: &GridShape, values: &[f64], cell: usize) -> Vec<Vec<f64>> {
    let d = shape.dim();
    let offsets = shape.corner_offsets();
    let base = shape.base_corner(cell);
    let mut out = Vec::new();
    for bits in 0..offsets.len() {
        for a in 0..d {
            if bits >> a & 1 == 1 {
                continue;
            }
            let other = bits | 1 << a;
            let (va, vb) = (values[base + offsets[bits]], values[base + offsets[other]]);
            if (va < 0.0) != (vb < 0.0) {
                let pa = shape.corner_point(base + offsets[bits]);
                let pb = shape.corner_point(base + offsets[other]);
                out.push(edge_zero(poly, &pa, &pb, va));
            }
        }
    }
    out
}
