//! Combinatorics of elementary models and their gluing.
//!
//! An elementary model carries two special complex points ("endpoints"):
//! elliptic (`E`), down-1-hyperbolic (`Hdown`), or 1-/2-up-1-hyperbolic
//! (`Hup1`, `Hup2`). A junction merges one `Hdown`, one `Hup1` and one
//! `Hup2` endpoint into a single special 1-hyperbolic point of the glued
//! surface, so for a closed gluing `chi = #E - #junctions`.
//!
//! Expressions use the arrow/dash notation, e.g. `(b)->(d1)-(d2)->(b)`:
//! dash-joined models form a group, and each arrow takes the next free
//! hyperbolic endpoint of every model in the two groups it joins.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EndpointKind {
    E,
    Hdown,
    Hup1,
    Hup2,
}

impl EndpointKind {
    pub fn is_hyperbolic(self) -> bool {
        self != EndpointKind::E
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelType {
    A,
    B,
    C1,
    C2,
    D1,
    D2,
    E,
}

impl ModelType {
    pub const ALL: [ModelType; 7] =
        [ModelType::A, ModelType::B, ModelType::C1, ModelType::C2, ModelType::D1, ModelType::D2, ModelType::E];

    pub fn endpoints(self) -> [EndpointKind; 2] {
        use EndpointKind::*;
        match self {
            ModelType::A => [E, E],
            ModelType::B => [E, Hdown],
            ModelType::C1 => [E, Hup1],
            ModelType::C2 => [E, Hup2],
            ModelType::D1 => [Hup1, Hup1],
            ModelType::D2 => [Hup2, Hup2],
            ModelType::E => [Hdown, Hdown],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ModelType::A => "a",
            ModelType::B => "b",
            ModelType::C1 => "c1",
            ModelType::C2 => "c2",
            ModelType::D1 => "d1",
            ModelType::D2 => "d2",
            ModelType::E => "e",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        let norm: String = tag
            .trim()
            .chars()
            .map(|c| match c {
                '₁' => '1',
                '₂' => '2',
                _ => c.to_ascii_lowercase(),
            })
            .filter(|c| *c != '_')
            .collect();
        ModelType::ALL.into_iter().find(|m| m.tag() == norm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EndpointRef {
    pub model: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Junction {
    pub endpoints: Vec<EndpointRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueGraph {
    pub models: Vec<ModelType>,
    pub junctions: Vec<Junction>,
    /// Dash-joined groups in expression order; each model appears once.
    pub groups: Vec<Vec<usize>>,
}

impl GlueGraph {
    /// Models with no junctions, one group each.
    pub fn from_models(models: Vec<ModelType>) -> Self {
        let groups = (0..models.len()).map(|i| vec![i]).collect();
        Self { models, junctions: Vec::new(), groups }
    }

    pub fn kind(&self, r: EndpointRef) -> Option<EndpointKind> {
        self.models.get(r.model).and_then(|m| m.endpoints().get(r.slot).copied())
    }
}

impl fmt::Display for GlueGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (gi, g) in self.groups.iter().enumerate() {
            if gi > 0 {
                write!(f, "->")?;
            }
            for (k, &m) in g.iter().enumerate() {
                if k > 0 {
                    write!(f, "-")?;
                }
                write!(f, "({})", self.models[m].tag())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Model(ModelType),
    Arrow,
    Dash,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            let start = i;
            let close = chars[i..]
                .iter()
                .position(|&c| c == ')')
                .ok_or(Error::Parse { pos: start, msg: "unclosed '('".into() })?;
            let name: String = chars[i + 1..i + close].iter().collect();
            let m = ModelType::from_tag(&name)
                .ok_or_else(|| Error::Parse { pos: start + 1, msg: format!("unknown model type '{name}'") })?;
            out.push((start, Tok::Model(m)));
            i += close + 1;
        } else if c == '→' {
            out.push((i, Tok::Arrow));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((i, Tok::Arrow));
            i += 2;
        } else if c == '-' {
            out.push((i, Tok::Dash));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

pub fn parse_glue_expr(text: &str) -> Result<GlueGraph> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut models = Vec::new();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new()];
    let mut expect_model = true;
    for (pos, tok) in &toks {
        match (tok, expect_model) {
            (Tok::Model(m), true) => {
                groups.last_mut().expect("group").push(models.len());
                models.push(*m);
                expect_model = false;
            }
            (Tok::Arrow, false) => {
                groups.push(Vec::new());
                expect_model = true;
            }
            (Tok::Dash, false) => expect_model = true,
            (Tok::Model(_), false) => {
                return Err(Error::Parse { pos: *pos, msg: "expected '->' or '-' between models".into() })
            }
            (_, true) => return Err(Error::Parse { pos: *pos, msg: "expected a model".into() }),
        }
    }
    if expect_model {
        let pos = text.chars().count();
        return Err(Error::Parse { pos, msg: "expression ends without a model".into() });
    }

    let mut used = vec![[false; 2]; models.len()];
    let take = |m: usize, used: &mut Vec<[bool; 2]>| -> Option<EndpointRef> {
        let eps = models[m].endpoints();
        (0..2).find(|&s| eps[s].is_hyperbolic() && !used[m][s]).map(|slot| {
            used[m][slot] = true;
            EndpointRef { model: m, slot }
        })
    };
    let mut junctions = Vec::new();
    for w in groups.windows(2) {
        let mut endpoints = Vec::new();
        for &m in w[0].iter().chain(&w[1]) {
            if let Some(r) = take(m, &mut used) {
                endpoints.push(r);
            }
        }
        junctions.push(Junction { endpoints });
    }
    Ok(GlueGraph { models, junctions, groups })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EndpointOutOfRange { junction: usize, endpoint: EndpointRef },
    EndpointReused { endpoint: EndpointRef },
    JunctionComposition { junction: usize, found: Vec<EndpointKind> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EndpointOutOfRange { junction, endpoint } => {
                write!(f, "junction {junction}: endpoint {endpoint:?} does not exist")
            }
            Violation::EndpointReused { endpoint } => write!(f, "endpoint {endpoint:?} in more than one junction"),
            Violation::JunctionComposition { junction, found } => {
                write!(f, "junction composition: junction {junction} has {found:?}, expected [Hdown, Hup1, Hup2]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EndpointCensus {
    pub e: usize,
    pub hdown: usize,
    pub hup1: usize,
    pub hup2: usize,
}

impl EndpointCensus {
    fn add(&mut self, k: EndpointKind) {
        match k {
            EndpointKind::E => self.e += 1,
            EndpointKind::Hdown => self.hdown += 1,
            EndpointKind::Hup1 => self.hup1 += 1,
            EndpointKind::Hup2 => self.hup2 += 1,
        }
    }

    pub fn hyperbolic(&self) -> usize {
        self.hdown + self.hup1 + self.hup2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// Endpoints not in any junction.
    pub free: EndpointCensus,
    /// No free hyperbolic endpoints.
    pub closed: bool,
}

impl Validation {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(graph: &GlueGraph) -> Validation {
    let mut violations = Vec::new();
    let mut owner = std::collections::BTreeMap::new();
    for (ji, j) in graph.junctions.iter().enumerate() {
        let mut kinds = Vec::new();
        for &r in &j.endpoints {
            match graph.kind(r) {
                None => violations.push(Violation::EndpointOutOfRange { junction: ji, endpoint: r }),
                Some(k) => {
                    kinds.push(k);
                    if owner.insert(r, ji).is_some() {
                        violations.push(Violation::EndpointReused { endpoint: r });
                    }
                }
            }
        }
        let mut sorted = kinds.clone();
        sorted.sort_by_key(|k| *k as u8);
        if sorted != [EndpointKind::Hdown, EndpointKind::Hup1, EndpointKind::Hup2] {
            violations.push(Violation::JunctionComposition { junction: ji, found: kinds });
        }
    }
    let mut free = EndpointCensus::default();
    for (mi, m) in graph.models.iter().enumerate() {
        for (slot, k) in m.endpoints().into_iter().enumerate() {
            if !owner.contains_key(&EndpointRef { model: mi, slot }) {
                free.add(k);
            }
        }
    }
    Validation { closed: free.hyperbolic() == 0, violations, free }
}

/// Elliptic points and special 1-hyperbolic points of the glued surface.
pub fn point_counts(graph: &GlueGraph) -> (usize, usize) {
    let e = graph.models.iter().flat_map(|m| m.endpoints()).filter(|k| *k == EndpointKind::E).count();
    (e, graph.junctions.len())
}

pub fn euler_characteristic(graph: &GlueGraph) -> Result<i64> {
    let v = validate(graph);
    if let Some(first) = v.violations.first() {
        return Err(Error::InvalidGluing(first.to_string()));
    }
    if !v.closed {
        return Err(Error::OpenGluing);
    }
    let (e, h) = point_counts(graph);
    Ok(e as i64 - h as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{BITORUS, TORUS};

    #[test]
    fn torus() {
        let g = parse_glue_expr(TORUS).unwrap();
        assert_eq!((g.models.len(), g.junctions.len()), (4, 2));
        let v = validate(&g);
        assert!(v.ok() && v.closed);
        assert_eq!(point_counts(&g), (2, 2));
        assert_eq!(euler_characteristic(&g).unwrap(), 0);
    }

    #[test]
    fn bitorus() {
        let g = parse_glue_expr(BITORUS).unwrap();
        assert_eq!((g.models.len(), g.junctions.len()), (7, 4));
        assert_eq!(euler_characteristic(&g).unwrap(), -2);
    }

    #[test]
    fn sphere_type_a() {
        let g = parse_glue_expr("(a)").unwrap();
        assert_eq!((g.models.len(), g.junctions.len()), (1, 0));
        assert_eq!(euler_characteristic(&g).unwrap(), 2);
    }

    #[test]
    fn single_b_is_open() {
        let g = parse_glue_expr("(b)").unwrap();
        let v = validate(&g);
        assert!(v.ok());
        assert!(!v.closed);
        assert_eq!(v.free.hdown, 1);
        assert!(matches!(euler_characteristic(&g), Err(Error::OpenGluing)));
    }

    #[test]
    fn bad_junction_composition() {
        let mut g = GlueGraph::from_models(vec![ModelType::E, ModelType::B, ModelType::D1]);
        g.junctions.push(Junction {
            endpoints: vec![
                EndpointRef { model: 0, slot: 0 },
                EndpointRef { model: 1, slot: 1 },
                EndpointRef { model: 2, slot: 0 },
            ],
        });
        let v = validate(&g);
        assert!(v.violations.iter().any(|x| matches!(x, Violation::JunctionComposition { .. })));
        assert!(v.violations[0].to_string().starts_with("junction composition"));
    }

    #[test]
    fn down_down_rejected() {
        let g = parse_glue_expr("(b)->(b)").unwrap();
        assert!(!validate(&g).ok());
    }

    #[test]
    fn reused_endpoint() {
        let mut g = parse_glue_expr(TORUS).unwrap();
        let dup = g.junctions[0].clone();
        g.junctions.push(dup);
        assert!(validate(&g).violations.iter().any(|v| matches!(v, Violation::EndpointReused { .. })));
    }

    #[test]
    fn unicode_notation() {
        let g = parse_glue_expr("(b)→(d₁)-(d₂)→(b)").unwrap();
        assert_eq!(g.to_string(), TORUS);
    }

    #[test]
    fn parse_errors_carry_position() {
        for (text, pos) in [("", 0), ("(b)->", 5), ("(x)", 1), ("(b)(b)", 3), ("(b) + (b)", 4), ("(b", 0), ("->(b)", 0)] {
            match parse_glue_expr(text) {
                Err(Error::Parse { pos: p, .. }) => assert_eq!(p, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
