//! The `analyze` pipeline and its JSON report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::filling::{fill_family, FamilyReport};
use crate::fixtures::offset_levels;
use crate::grid::DEFAULT_RESOLUTION;
use crate::manifold::{GraphModel, ManifoldSpec};
use crate::orbit::{census, graph_value_range, singular_match, OrbitCensus};
use crate::singularity::{analyze_points, euler_check, Classification, ComplexPoint, EulerReport};

pub const REPORT_VERSION: u32 = 1;
/// Newton seeds per axis when searching for complex points.
pub const DEFAULT_SEED_DENSITY: usize = 7;
/// Census levels used when neither the caller nor the spec provides any.
pub const DEFAULT_LEVEL_COUNT: usize = 10;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub resolution: usize,
    pub seed_density: usize,
    pub levels: Option<Vec<f64>>,
    pub timings: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { resolution: DEFAULT_RESOLUTION, seed_density: DEFAULT_SEED_DENSITY, levels: None, timings: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointEntry {
    /// `(x_1, y_1, ..., x_{n-1}, y_{n-1}, t)`.
    pub location: Vec<f64>,
    pub chart: usize,
    pub verified: bool,
    pub flat: bool,
    pub lambda: Option<Vec<f64>>,
    pub class: String,
    pub index: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl PointEntry {
    fn from_point(p: &ComplexPoint) -> Self {
        Self {
            location: p.location.joined(),
            chart: p.chart,
            verified: p.verified,
            flat: p.flat,
            lambda: p.normal_form.as_ref().map(|nf| nf.lambdas.clone()),
            class: p.classification.label(),
            index: p.index,
            diagnostic: p.diagnostic.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerSection {
    pub index_sum: Option<i64>,
    pub chi_expected: Option<i64>,
    pub matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusSection {
    pub resolution: usize,
    pub cell_width: f64,
    pub levels: Vec<f64>,
    pub counts: Vec<usize>,
    pub singular_levels: Vec<[f64; 2]>,
    pub hyperbolic_values: Vec<f64>,
    pub singular_match: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FillSection {
    pub leaf_counts: Vec<usize>,
    pub counts_match: bool,
    pub max_symdiff_fraction: f64,
    pub semicontinuous: bool,
}

impl From<FamilyReport> for FillSection {
    fn from(r: FamilyReport) -> Self {
        Self {
            leaf_counts: r.leaf_counts,
            counts_match: r.counts_match,
            max_symdiff_fraction: r.max_symdiff_fraction,
            semicontinuous: r.semicontinuous,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Checks {
    pub all_special: bool,
    pub euler: Option<bool>,
    pub singular_match: Option<bool>,
    pub fill_counts_match: Option<bool>,
}

impl Checks {
    pub fn passed(&self) -> bool {
        self.all_special
            && self.euler != Some(false)
            && self.singular_match != Some(false)
            && self.fill_counts_match != Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub report_version: u32,
    pub spec_id: String,
    pub resolution: usize,
    pub complex_points: Vec<PointEntry>,
    pub euler: EulerSection,
    /// Absent for `v_graph` specs, whose level sets are not real slices.
    pub census: Option<CensusSection>,
    pub fill: Option<FillSection>,
    pub checks: Checks,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Levels for the census: explicit, else from the spec, else evenly
/// spread over the graph value range.
pub fn analysis_levels(spec: &ManifoldSpec, explicit: Option<&[f64]>, resolution: usize) -> Result<Vec<f64>> {
    if let Some(l) = explicit {
        return Ok(l.to_vec());
    }
    if let Some(l) = &spec.levels {
        return Ok(l.clone());
    }
    let (lo, hi) = graph_value_range(spec, resolution)?;
    Ok(offset_levels(lo, hi, DEFAULT_LEVEL_COUNT))
}

fn census_section(c: &OrbitCensus, points: &[ComplexPoint]) -> CensusSection {
    CensusSection {
        resolution: c.resolution,
        cell_width: c.cell_width,
        levels: c.levels.clone(),
        counts: c.counts.clone(),
        singular_levels: c.singular_levels.clone(),
        hyperbolic_values: c.hyperbolic_values.clone(),
        singular_match: singular_match(c, points),
    }
}

pub fn run_analyze(spec: &ManifoldSpec, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let mut timings = BTreeMap::new();
    let clock = Instant::now();
    let points = analyze_points(spec, opts.seed_density)?;
    timings.insert("complex_points".to_string(), clock.elapsed().as_secs_f64());

    let all_special = points.iter().all(|p| p.classification.is_special());
    let euler = match spec.expected_chi {
        None => EulerSection {
            index_sum: euler_check(&points, 0).ok().map(|r| r.index_sum),
            chi_expected: None,
            matches: None,
            error: None,
        },
        Some(chi) => match euler_check(&points, chi) {
            Ok(EulerReport { index_sum, chi_expected, matches }) => {
                EulerSection { index_sum: Some(index_sum), chi_expected: Some(chi_expected), matches: Some(matches), error: None }
            }
            Err(e) => EulerSection { index_sum: None, chi_expected: Some(chi), matches: Some(false), error: Some(e.to_string()) },
        },
    };

    let (census, fill) = if spec.graph_model == GraphModel::RealGraph {
        let clock = Instant::now();
        let levels = analysis_levels(spec, opts.levels.as_deref(), opts.resolution)?;
        let mut c = census(spec, &levels, opts.resolution)?;
        c.hyperbolic_values = points
            .iter()
            .filter(|p| p.classification == Classification::SpecialKHyperbolic(1))
            .map(|p| p.location.t)
            .collect();
        let section = census_section(&c, &points);
        timings.insert("census".to_string(), clock.elapsed().as_secs_f64());
        let clock = Instant::now();
        let (_, family) = fill_family(spec, &c.levels, opts.resolution)?;
        timings.insert("fill".to_string(), clock.elapsed().as_secs_f64());
        (Some(section), Some(FillSection::from(family)))
    } else {
        (None, None)
    };

    let checks = Checks {
        all_special,
        euler: euler.matches,
        singular_match: census.as_ref().map(|c| c.singular_match),
        fill_counts_match: fill.as_ref().map(|f| f.counts_match),
    };
    Ok(AnalysisReport {
        report_version: REPORT_VERSION,
        spec_id: spec.name.clone(),
        resolution: opts.resolution,
        complex_points: points.iter().map(PointEntry::from_point).collect(),
        euler,
        census,
        fill,
        passed: checks.passed(),
        checks,
        timings: opts.timings.then_some(timings),
    })
}
