//! Built-in named specs and gluing expressions.

use crate::error::{Error, Result};
use crate::manifold::{BoxDomain, Chart, GraphModel, ManifoldSpec, Validity};
use crate::poly::PolyExpr;

pub const NAMES: &[&str] = &["horned_sphere", "quadric_elliptic", "quadric_saddle"];

pub const TORUS: &str = "(b)->(d1)-(d2)->(b)";
pub const BITORUS: &str = "(b)->(d1)-(d2)->(e)->(d1)-(d2)->(b)";

pub fn by_name(name: &str) -> Result<ManifoldSpec> {
    match name {
        "horned_sphere" => Ok(horned_sphere()),
        "quadric_elliptic" => Ok(quadric_elliptic()),
        "quadric_saddle" => Ok(quadric_saddle()),
        other => Err(Error::InvalidSpec(format!("unknown fixture '{other}'"))),
    }
}

fn poly(nvars: usize, raw: &[(f64, [u32; 4])]) -> PolyExpr {
    PolyExpr::new(nvars, raw.iter().map(|(c, e)| (*c, e.to_vec()))).expect("fixture polynomial")
}

/// `x1^4 + y1^4 + x2^4 + y2^4 + 4x1^2 - 2y1^2 + x2^2 + y2^2`.
pub fn horned_profile() -> PolyExpr {
    poly(
        4,
        &[
            (1.0, [4, 0, 0, 0]),
            (1.0, [0, 4, 0, 0]),
            (1.0, [0, 0, 4, 0]),
            (1.0, [0, 0, 0, 4]),
            (4.0, [2, 0, 0, 0]),
            (-2.0, [0, 2, 0, 0]),
            (1.0, [0, 0, 2, 0]),
            (1.0, [0, 0, 0, 2]),
        ],
    )
}

/// Sphere with two horns in `C^3`: the lower piece is the graph
/// `x3 = P(x)` for `-1 <= x3 <= 0`; the upper piece is
/// `x3 (|x|^2 + x3^2 - 1) + (1 - x3) P(x) = 0` for `0 <= x3 <= 1`.
pub fn horned_sphere() -> ManifoldSpec {
    let dom = BoxDomain::cube(4, 1.5);
    let p = horned_profile();
    let lower = Chart::graph(p.clone(), dom.clone(), Validity { lo: -1.0, hi: 0.0 }).expect("lower chart");

    let t = PolyExpr::var(5, 4);
    let one = PolyExpr::constant(5, 1.0);
    let mut r2_plus_t2_minus_1 = t.mul(&t).sub(&one);
    for i in 0..4 {
        let xi = PolyExpr::var(5, i);
        r2_plus_t2_minus_1 = r2_plus_t2_minus_1.add(&xi.mul(&xi));
    }
    let p5 = p.extend_vars(5);
    let f = t.mul(&r2_plus_t2_minus_1).add(&one.sub(&t).mul(&p5));
    let upper = Chart::implicit(f, dom, Validity { lo: 0.0, hi: 1.0 }).expect("upper chart");

    ManifoldSpec::new("horned_sphere", 3, GraphModel::RealGraph, vec![lower, upper])
        .expect("horned sphere spec")
        .with_expected_chi(2)
        .with_levels(offset_levels(-1.0, 1.0, 10))
}

/// `w = |z1|^2 + |z2|^2`.
pub fn quadric_elliptic() -> ManifoldSpec {
    let phi = poly(4, &[(1.0, [2, 0, 0, 0]), (1.0, [0, 2, 0, 0]), (1.0, [0, 0, 2, 0]), (1.0, [0, 0, 0, 2])]);
    let chart = Chart::graph(phi, BoxDomain::cube(4, 1.5), Validity::ALL).expect("quadric chart");
    ManifoldSpec::new("quadric_elliptic", 3, GraphModel::RealGraph, vec![chart])
        .expect("quadric spec")
        .with_levels(vec![0.25, 0.5, 1.0, 1.5, 2.0])
}

/// `w = 3x^2 - y^2 + u^2 + v^2`, a special 1-hyperbolic quadric.
pub fn quadric_saddle() -> ManifoldSpec {
    let phi = poly(4, &[(3.0, [2, 0, 0, 0]), (-1.0, [0, 2, 0, 0]), (1.0, [0, 0, 2, 0]), (1.0, [0, 0, 0, 2])]);
    let chart = Chart::graph(phi, BoxDomain::cube(4, 1.0), Validity::ALL).expect("saddle chart");
    ManifoldSpec::new("quadric_saddle", 3, GraphModel::RealGraph, vec![chart])
        .expect("saddle spec")
        .with_levels(vec![-0.5, -0.3, -0.1, 0.1, 0.3, 0.5])
}

/// `k` levels at the midpoints of a uniform partition of `[lo, hi]`.
pub fn offset_levels(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let step = (hi - lo) / k as f64;
    (0..k).map(|i| round12(lo + (i as f64 + 0.5) * step)).collect()
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horned_levels_avoid_critical_values() {
        let l = horned_sphere().levels.unwrap();
        assert_eq!(l.len(), 10);
        assert_eq!(l[0], -0.9);
        assert_eq!(l[9], 0.9);
        assert!(!l.contains(&0.0));
    }

    #[test]
    fn unknown_fixture() {
        assert!(by_name("klein_bottle").is_err());
        for n in NAMES {
            assert!(by_name(n).is_ok());
        }
    }
}
