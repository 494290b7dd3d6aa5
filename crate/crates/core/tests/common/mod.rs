//! Shared measurement suites for the property and acceptance tests. Each
//! suite returns the worst deviation it saw so callers can apply (and
//! print) their own tolerance.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crflat::fixtures;
use crflat::linalg::{takagi, CMat};
use crflat::manifold::{BoxDomain, Chart, GraphModel, ManifoldSpec, Validity};
use crflat::orbit::spec_level_components;
use crflat::poly::PolyExpr;
use crflat::singularity::{flat_normal_form, flatness_test, special_reduction, Jet2, RealQuadratic, Reduction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_symmetric(rng: &mut impl Rng, m: usize) -> CMat {
    let a = random_complex(rng, m, m);
    (&a + a.transpose()) * Complex64::new(0.5, 0.0)
}

pub fn random_unitary(rng: &mut impl Rng, m: usize) -> CMat {
    random_complex(rng, m, m).qr().q()
}

/// A random well-conditioned invertible matrix.
pub fn random_invertible(rng: &mut impl Rng, m: usize) -> CMat {
    random_complex(rng, m, m) * Complex64::new(0.3, 0.0) + CMat::identity(m, m)
}

/// Worst `||A - U diag(sigma) U^T||` over random complex symmetric matrices
/// of sizes 2..=6, and whether every `U` was unitary to the same accuracy.
pub fn takagi_suite(count: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let mut worst_rec = 0.0f64;
    let mut worst_unit = 0.0f64;
    for k in 0..count {
        let m = 2 + k % 5;
        let a = random_symmetric(&mut r, m);
        let t = takagi(&a).expect("takagi");
        worst_rec = worst_rec.max((t.reconstruct() - &a).norm());
        worst_unit = worst_unit.max((t.u.adjoint() * &t.u - CMat::identity(m, m)).norm());
    }
    (worst_rec, worst_unit)
}

fn lambdas_of(jet: &Jet2) -> Option<Vec<f64>> {
    let f = flatness_test(jet);
    if !f.flat {
        return None;
    }
    match special_reduction(&flat_normal_form(jet, f.phase).ok()?).ok()? {
        Reduction::Special(nf) => Some(nf.lambdas),
        Reduction::NonSpecial(_) => None,
    }
}

#[derive(Debug, Default)]
pub struct InvarianceOutcome {
    /// Worst `|lambda - lambda_0|` after a unitary z-change and w-scaling.
    pub max_lambda_deviation: f64,
    /// Worst deviation of the untransformed reduction from the normal form
    /// the quadric was built from.
    pub max_recovery_error: f64,
    /// Flat jets that stayed flat and non-flat jets that stayed non-flat.
    pub flatness_preserved: bool,
    pub trials: usize,
}

/// Builds special quadrics from random normal forms, hides them behind a
/// random invertible z-change, then checks that `lambda` and the flatness
/// verdict survive unitary z-changes and positive w-scalings.
pub fn invariance_suite(trials: usize, seed: u64) -> InvarianceOutcome {
    let mut r = rng(seed);
    let mut out = InvarianceOutcome { flatness_preserved: true, trials, ..Default::default() };
    for k in 0..trials {
        let m = 2 + k % 2;
        let mut lambdas: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..4.0)).collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let mus = vec![1.0; m];
        let base = RealQuadratic::from_normal_form(&mus, &lambdas).to_jet().change_z(&random_invertible(&mut r, m));

        let l0 = lambdas_of(&base).expect("special base");
        for (a, b) in l0.iter().zip(&lambdas) {
            out.max_recovery_error = out.max_recovery_error.max((a - b).abs());
        }

        let s = r.gen_range(0.2..5.0);
        let moved = base.change_z(&random_unitary(&mut r, m)).scale_w(Complex64::new(s, 0.0));
        match lambdas_of(&moved) {
            Some(l1) => {
                for (a, b) in l0.iter().zip(&l1) {
                    out.max_lambda_deviation = out.max_lambda_deviation.max((a - b).abs());
                }
            }
            None => out.flatness_preserved = false,
        }

        // a jet whose z zbar-part has no Hermitian multiple stays non-flat
        let mut bent = base.clone();
        let tilt = Complex64::new(0.0, bent.b.norm());
        bent.b[(0, 0)] += tilt;
        bent.b[(1, 1)] -= tilt;
        let bent_moved = bent.change_z(&random_unitary(&mut r, m)).scale_w(Complex64::new(s, 0.0));
        if flatness_test(&bent).flat || flatness_test(&bent_moved).flat {
            out.flatness_preserved = false;
        }
    }
    out
}

/// Worst relative error of analytic gradients and Hessians against central
/// differences with step `h`, at random points of the horned-sphere graph
/// chart and a random cubic chart.
pub fn finite_difference_suite(points: usize, h: f64, seed: u64) -> f64 {
    let mut r = rng(seed);
    let horned = fixtures::horned_sphere();
    let cubic = random_cubic_chart(&mut r);
    let mut worst = 0.0f64;
    for chart in [&horned.charts[0], &cubic] {
        for _ in 0..points {
            let p: Vec<f64> = (0..4).map(|_| r.gen_range(-1.2..1.2)).collect();
            let g = chart.grad(&p).unwrap();
            let hs = chart.hessian(&p).unwrap();
            for i in 0..4 {
                let mut pp = p.clone();
                let mut pm = p.clone();
                pp[i] += h;
                pm[i] -= h;
                let fd = (chart.eval(&pp).unwrap() - chart.eval(&pm).unwrap()) / (2.0 * h);
                worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1.0));
                let gp = chart.grad(&pp).unwrap();
                let gm = chart.grad(&pm).unwrap();
                for j in 0..4 {
                    let fd = (gp[j] - gm[j]) / (2.0 * h);
                    worst = worst.max((fd - hs[(i, j)]).abs() / hs[(i, j)].abs().max(1.0));
                }
            }
        }
    }
    worst
}

fn random_cubic_chart(r: &mut impl Rng) -> Chart {
    let mut raw = Vec::new();
    for a in 0..4u32 {
        for b in 0..4u32 {
            for c in 0..4u32 {
                for d in 0..4u32 {
                    if a + b + c + d <= 3 {
                        raw.push((r.gen_range(-1.0..1.0), vec![a, b, c, d]));
                    }
                }
            }
        }
    }
    Chart::graph(PolyExpr::new(4, raw).unwrap(), BoxDomain::cube(4, 1.5), Validity::ALL).unwrap()
}

/// Graph chart in `C^3` from `(coeff, [x1, y1, x2, y2])` terms.
pub fn graph_spec(name: &str, terms: &[(f64, [u32; 4])], bbox: BoxDomain) -> ManifoldSpec {
    let phi = PolyExpr::new(4, terms.iter().map(|(c, e)| (*c, e.to_vec()))).unwrap();
    let chart = Chart::graph(phi, bbox.clone(), Validity::ALL).unwrap();
    ManifoldSpec::new(name, 3, GraphModel::RealGraph, vec![chart]).unwrap().with_box(bbox).unwrap()
}

/// Level-set components of a quadric `sum_i a_i v_i^2` by sign pattern:
/// the zero set is a sphere-like shell (1) when every coefficient shares
/// the sign of `c`, empty (0) when all have the opposite sign, two sheets
/// when exactly one coefficient shares the sign of `c`, else connected.
pub fn quadric_oracle(coeffs: &[f64], c: f64) -> usize {
    let same = coeffs.iter().filter(|a| a.signum() == c.signum()).count();
    match same {
        0 => 0,
        1 if coeffs.len() > 1 => 2,
        _ => 1,
    }
}

/// Compares census counts of diagonal quadrics with the sign-pattern
/// oracle; returns the mismatches as `(coeffs, level, census, oracle)`.
pub fn quadric_census_suite(levels: &[f64], resolution: usize) -> Vec<(Vec<f64>, f64, usize, usize)> {
    let families: [[f64; 4]; 3] = [[1.0, 1.0, 1.0, 1.0], [3.0, -1.0, 1.0, 1.0], [1.0, 2.0, 0.8, 1.5]];
    let mut bad = Vec::new();
    for coeffs in families {
        let terms: Vec<(f64, [u32; 4])> = (0..4)
            .map(|i| {
                let mut e = [0u32; 4];
                e[i] = 2;
                (coeffs[i], e)
            })
            .collect();
        let spec = graph_spec("quadric", &terms, BoxDomain::cube(4, 1.0));
        for &c in levels {
            let got = spec_level_components(&spec, c, resolution).unwrap().count;
            let want = quadric_oracle(&coeffs, c);
            if got != want {
                bad.push((coeffs.to_vec(), c, got, want));
            }
        }
    }
    bad
}

/// `w = g(y1) + K x1^2 + x2^2 + y2^2` with `g = (y1 (y1 - 1) (y1 - 3))^2`:
/// three elliptic points at `y1 in {0, 1, 3}` (value 0) and two special
/// 1-hyperbolic points at the local maxima of `g`, near 0.398 and 4.463.
pub fn two_saddle_spec() -> ManifoldSpec {
    // h = y^3 - 4y^2 + 3y, g = h^2
    let h = PolyExpr::new(4, vec![(1.0, vec![0, 3, 0, 0]), (-4.0, vec![0, 2, 0, 0]), (3.0, vec![0, 1, 0, 0])]).unwrap();
    let rest =
        PolyExpr::new(4, vec![(20.0, vec![2, 0, 0, 0]), (1.0, vec![0, 0, 2, 0]), (1.0, vec![0, 0, 0, 2])]).unwrap();
    let phi = h.mul(&h).add(&rest);
    let bbox = BoxDomain::new(vec![(-0.6, 0.6), (-0.6, 3.6), (-2.5, 2.5), (-2.5, 2.5)]).unwrap();
    let chart = Chart::graph(phi, bbox.clone(), Validity::ALL).unwrap();
    ManifoldSpec::new("two_saddle", 3, GraphModel::RealGraph, vec![chart]).unwrap().with_box(bbox).unwrap()
}

/// Critical values of `g` at its two interior maxima.
pub fn two_saddle_values() -> [f64; 2] {
    let g = |y: f64| (y * (y - 1.0) * (y - 3.0)).powi(2);
    let disc = (64.0f64 - 36.0).sqrt();
    [g((8.0 - disc) / 6.0), g((8.0 + disc) / 6.0)]
}

pub fn real_matrix(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, f)
}
