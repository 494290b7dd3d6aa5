//! Reading and writing manifold spec files (JSON or TOML).
//!
//! ```json
//! { "n": 3, "graph_model": "real_graph",
//!   "charts": [ { "terms": [[1.0, [2,0,0,0]], ...],
//!                 "domain": [[-1,1], ...], "validity": [-1, 0] } ],
//!   "expected_chi": 2 }
//! ```
//!
//! A chart may set `"form": "implicit"`, in which case its terms carry one
//! extra exponent for the graph value. A `null` validity bound is unbounded.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{BoxDomain, Chart, ChartForm, GraphModel, ManifoldSpec, Validity};
use crate::poly::PolyExpr;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub graph_model: GraphModel,
    pub charts: Vec<ChartFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_chi: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub analysis_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormTag {
    #[default]
    Graph,
    Implicit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartFile {
    #[serde(default)]
    pub form: FormTag,
    pub terms: Vec<(f64, Vec<u32>)>,
    pub domain: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity: Option<[Option<f64>; 2]>,
}

impl SpecFile {
    pub fn into_spec(self, default_name: &str) -> Result<ManifoldSpec> {
        let d = 2 * self.n.max(1) - 2;
        let mut charts = Vec::with_capacity(self.charts.len());
        for (k, cf) in self.charts.into_iter().enumerate() {
            if cf.domain.len() != d {
                return Err(Error::InvalidSpec(format!("chart {k}: domain has {} axes, expected {d}", cf.domain.len())));
            }
            let domain = BoxDomain::new(cf.domain.iter().map(|b| (b[0], b[1])).collect())?;
            let validity = match cf.validity {
                None => Validity::ALL,
                Some([lo, hi]) => Validity::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))?,
            };
            let chart = match cf.form {
                FormTag::Graph => Chart::graph(PolyExpr::new(d, cf.terms)?, domain, validity)?,
                FormTag::Implicit => Chart::implicit(PolyExpr::new(d + 1, cf.terms)?, domain, validity)?,
            };
            charts.push(chart);
        }
        let name = self.name.unwrap_or_else(|| default_name.to_string());
        let mut spec = ManifoldSpec::new(name, self.n, self.graph_model, charts)?;
        spec.expected_chi = self.expected_chi;
        spec.levels = self.levels;
        if let Some(b) = self.analysis_box {
            spec = spec.with_box(BoxDomain::new(b.iter().map(|b| (b[0], b[1])).collect())?)?;
        }
        Ok(spec)
    }

    pub fn from_spec(spec: &ManifoldSpec) -> Self {
        let charts = spec
            .charts
            .iter()
            .map(|c| {
                let (form, poly) = match c.form() {
                    ChartForm::Graph(p) => (FormTag::Graph, p),
                    ChartForm::Implicit(p) => (FormTag::Implicit, p),
                };
                let v = c.validity();
                let bound = |x: f64| if x.is_finite() { Some(x) } else { None };
                ChartFile {
                    form,
                    terms: poly.terms().iter().map(|t| (t.coeff, t.exps.clone())).collect(),
                    domain: c.domain().bounds.iter().map(|&(lo, hi)| [lo, hi]).collect(),
                    validity: Some([bound(v.lo), bound(v.hi)]),
                }
            })
            .collect();
        Self {
            name: Some(spec.name.clone()),
            n: spec.n,
            graph_model: spec.graph_model,
            charts,
            expected_chi: spec.expected_chi,
            levels: spec.levels.clone(),
            analysis_box: spec.analysis_box.as_ref().map(|b| b.bounds.iter().map(|&(lo, hi)| [lo, hi]).collect()),
        }
    }
}

pub fn parse_json(text: &str, name: &str) -> Result<ManifoldSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    file.into_spec(name)
}

pub fn parse_toml(text: &str, name: &str) -> Result<ManifoldSpec> {
    let file: SpecFile = toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    file.into_spec(name)
}

/// Loads a spec file, choosing the format by extension (`.toml`, else JSON).
pub fn load(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidSpec(format!("cannot read {}: {e}", path.display())))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("spec");
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => parse_toml(&text, name),
        _ => parse_json(&text, name),
    }
}

/// Resolves a fixture name or a path to a spec file. An unreadable file
/// is an invalid spec.
pub fn resolve(name_or_path: &str) -> Result<ManifoldSpec> {
    if crate::fixtures::NAMES.contains(&name_or_path) {
        return crate::fixtures::by_name(name_or_path);
    }
    load(Path::new(name_or_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn json_round_trip_of_horned_sphere() {
        let spec = fixtures::horned_sphere();
        let text = serde_json::to_string(&SpecFile::from_spec(&spec)).unwrap();
        let back = parse_json(&text, "x").unwrap();
        assert_eq!(back.name, "horned_sphere");
        assert_eq!(back.expected_chi, Some(2));
        assert_eq!(back.charts.len(), 2);
        assert_eq!(back.charts[1].form(), spec.charts[1].form());
        assert_eq!(back.charts[0].eval(&[0.0, 1.0, 0.0, 0.0]).unwrap(), -1.0);
    }

    #[test]
    fn toml_spec() {
        let text = r#"
n = 3
graph_model = "real_graph"
expected_chi = 2

[[charts]]
terms = [[1.0, [2, 0, 0, 0]], [1.0, [0, 2, 0, 0]], [1.0, [0, 0, 2, 0]], [1.0, [0, 0, 0, 2]]]
domain = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
"#;
        let spec = parse_toml(text, "q").unwrap();
        assert_eq!(spec.name, "q");
        assert_eq!(spec.charts[0].eval(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(spec.charts[0].validity(), Validity::ALL);
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(parse_json("{", "x").is_err());
        let wrong_dim = r#"{"n":3,"graph_model":"real_graph","charts":[{"terms":[[1.0,[2,0]]],"domain":[[-1,1],[-1,1]]}]}"#;
        assert!(matches!(parse_json(wrong_dim, "x"), Err(Error::InvalidSpec(_))));
        let bad_model = r#"{"n":3,"graph_model":"curved","charts":[]}"#;
        assert!(parse_json(bad_model, "x").is_err());
    }
}
