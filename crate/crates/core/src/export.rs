//! CSV and OBJ exports of labeled grid cells for external plotting.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::GridShape;

/// Column names `x1,y1,x2,y2,...` for a grid of even dimension.
pub fn coordinate_header(dim: usize) -> Vec<String> {
    (0..dim).map(|a| format!("{}{}", if a % 2 == 0 { 'x' } else { 'y' }, a / 2 + 1)).collect()
}

/// One row per labeled cell: its center and label. Unlabeled cells
/// (label 0) are omitted.
pub fn labeled_cells_csv(shape: &GridShape, labels: &[u32], label_column: &str) -> String {
    let mut out = coordinate_header(shape.dim()).join(",");
    writeln!(out, ",{label_column}").expect("write to string");
    for (cell, &l) in labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        for x in shape.cell_center(cell) {
            write!(out, "{x},").expect("write to string");
        }
        writeln!(out, "{l}").expect("write to string");
    }
    out
}

/// Surface mesh of a set of cells restricted to a 3D slab: the first three
/// axes are kept and every further axis is fixed to the cell containing the
/// matching coordinate of `slab`. Only faces between a marked and an
/// unmarked cell are emitted, so the mesh is the hull of the marked region.
pub fn cells_obj(shape: &GridShape, marked: &[bool], slab: &[f64]) -> Result<String> {
    let d = shape.dim();
    if d < 3 {
        return Err(Error::Input("mesh export needs at least three grid axes".into()));
    }
    if slab.len() != d - 3 {
        return Err(Error::Input(format!("slab needs {} coordinates, got {}", d - 3, slab.len())));
    }
    let r = shape.resolution;
    let mut fixed = Vec::with_capacity(d - 3);
    for (k, &v) in slab.iter().enumerate() {
        let a = k + 3;
        let (lo, hi) = shape.bbox.bounds[a];
        if !(lo..=hi).contains(&v) {
            return Err(Error::Input(format!("slab coordinate {v} outside [{lo}, {hi}]")));
        }
        fixed.push((((v - lo) / shape.step(a)).floor() as usize).min(r - 1));
    }
    let cell_of = |i: [usize; 3]| {
        let mut multi = i.to_vec();
        multi.extend(&fixed);
        shape.cell_index(&multi)
    };
    let is_marked = |i: [isize; 3]| {
        i.iter().all(|&k| k >= 0 && (k as usize) < r) && marked[cell_of([i[0] as usize, i[1] as usize, i[2] as usize])]
    };

    let mut out = String::from("# boundary cells\n");
    let mut nverts = 0usize;
    for k in 0..r {
        for j in 0..r {
            for i in 0..r {
                let p = [i as isize, j as isize, k as isize];
                if !is_marked(p) {
                    continue;
                }
                for axis in 0..3 {
                    for side in [0isize, 1] {
                        let mut q = p;
                        q[axis] += 2 * side - 1;
                        if is_marked(q) {
                            continue;
                        }
                        // the face lies in the plane {axis = p[axis] + side}
                        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
                        let corners: [[usize; 2]; 4] = if side == 1 {
                            [[0, 0], [1, 0], [1, 1], [0, 1]]
                        } else {
                            [[0, 0], [0, 1], [1, 1], [1, 0]]
                        };
                        for [du, dv] in corners {
                            let mut g = [p[0] as usize, p[1] as usize, p[2] as usize];
                            g[axis] += side as usize;
                            g[u] += du;
                            g[v] += dv;
                            let xyz: Vec<f64> = (0..3).map(|a| shape.coord(a, g[a])).collect();
                            writeln!(out, "v {} {} {}", xyz[0], xyz[1], xyz[2]).expect("write to string");
                        }
                        writeln!(out, "f {} {} {} {}", nverts + 1, nverts + 2, nverts + 3, nverts + 4)
                            .expect("write to string");
                        nverts += 4;
                    }
                }
            }
        }
    }
    Ok(out)
}
