//! Network JSON documents.
//!
//! ```json
//! {
//!   "cpts": { "X": [[1.0, 0.4]], "Y": [[1.0, 0.2], [0.7, 1.0]] },
//!   "edges": [["X", "Y"]],
//!   "semantics": "product",
//!   "variables": [
//!     { "name": "X", "states": ["x1", "x2"] },
//!     { "name": "Y", "states": ["y1", "y2"] }
//!   ]
//! }
//! ```
//!
//! Rows of a table are ordered row-major over the parent state indices, in
//! the order the parents appear in `edges`. A structure file is the same
//! document without `cpts`. The writer emits sorted keys, two-space
//! indentation and shortest round-trip floats, so parsing and re-writing a
//! file produced by the writer is byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use pnet_core::distribution::{PossibilityDistribution, Semantics};
use pnet_core::domain::StateDomain;
use pnet_core::estimator::RandomSetModel;
use pnet_core::network::{NetworkStructure, PossibilisticNetwork};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Separator for imprecise dataset cells; labels may not contain it.
pub const SET_SEPARATOR: char = '|';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum SemanticsTag {
    Min,
    #[default]
    Product,
}

impl From<SemanticsTag> for Semantics {
    fn from(t: SemanticsTag) -> Self {
        match t {
            SemanticsTag::Min => Semantics::Min,
            SemanticsTag::Product => Semantics::Product,
        }
    }
}

impl From<Semantics> for SemanticsTag {
    fn from(s: Semantics) -> Self {
        match s {
            Semantics::Min => SemanticsTag::Min,
            Semantics::Product => SemanticsTag::Product,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    states: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cpts: Option<BTreeMap<String, Vec<Vec<f64>>>>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    #[serde(default)]
    semantics: SemanticsTag,
    variables: Vec<VariableDoc>,
}

struct Ctx<'a> {
    file: &'a str,
}

impl Ctx<'_> {
    fn err(&self, location: impl Into<String>, reason: impl Into<String>) -> Error {
        Error::Network { file: self.file.to_string(), location: location.into(), reason: reason.into() }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::read(path, e))
}

fn parse_doc(text: &str, ctx: &Ctx) -> Result<NetworkDoc> {
    serde_json::from_str(text).map_err(|e| ctx.err("$", e.to_string()))
}

fn build_structure(doc: &NetworkDoc, ctx: &Ctx) -> Result<NetworkStructure> {
    let mut variables = Vec::with_capacity(doc.variables.len());
    for (i, v) in doc.variables.iter().enumerate() {
        let at = format!("$.variables[{i}]");
        if v.name.is_empty() {
            return Err(ctx.err(format!("{at}.name"), "empty variable name"));
        }
        if doc.variables[..i].iter().any(|w| w.name == v.name) {
            return Err(ctx.err(format!("{at}.name"), format!("variable {} declared twice", v.name)));
        }
        for (k, s) in v.states.iter().enumerate() {
            if s.is_empty() {
                return Err(ctx.err(format!("{at}.states[{k}]"), "empty state label"));
            }
            if s.contains(SET_SEPARATOR) {
                return Err(ctx.err(
                    format!("{at}.states[{k}]"),
                    format!("state label {s:?} contains the set separator '{SET_SEPARATOR}'"),
                ));
            }
        }
        let dom = StateDomain::new(v.name.clone(), v.states.iter().cloned())
            .map_err(|e| ctx.err(format!("{at}.states"), e.to_string()))?;
        variables.push(dom);
    }
    let index = |name: &str| variables.iter().position(|v: &StateDomain| v.name() == name);
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (e, (p, c)) in doc.edges.iter().enumerate() {
        let pi = index(p).ok_or_else(|| ctx.err(format!("$.edges[{e}][0]"), format!("unknown variable {p}")))?;
        let ci = index(c).ok_or_else(|| ctx.err(format!("$.edges[{e}][1]"), format!("unknown variable {c}")))?;
        edges.push((pi, ci));
    }
    NetworkStructure::new(variables, &edges).map_err(|e| ctx.err("$.edges", e.to_string()))
}

fn build_network(doc: NetworkDoc, ctx: &Ctx) -> Result<PossibilisticNetwork> {
    let structure = build_structure(&doc, ctx)?;
    let cpts = doc.cpts.ok_or_else(|| ctx.err("$", "missing \"cpts\""))?;
    if let Some(name) = cpts.keys().find(|k| structure.index_of(k).is_none()) {
        return Err(ctx.err(format!("$.cpts.{name}"), "table for an unknown variable"));
    }
    let mut rows = Vec::with_capacity(structure.len());
    for (v, dom) in structure.variables().iter().enumerate() {
        let at = format!("$.cpts.{}", dom.name());
        let table = cpts
            .get(dom.name())
            .ok_or_else(|| ctx.err("$.cpts", format!("missing table for {}", dom.name())))?;
        let expected = structure.config_count(v);
        if table.len() != expected {
            return Err(ctx.err(at, format!("{} rows, expected {expected}", table.len())));
        }
        let mut dists = Vec::with_capacity(table.len());
        for (j, row) in table.iter().enumerate() {
            if row.len() != dom.cardinality() {
                return Err(ctx.err(
                    format!("{at}[{j}]"),
                    format!("{} degrees, expected {}", row.len(), dom.cardinality()),
                ));
            }
            if let Some(k) = row.iter().position(|d| !(0.0..=1.0).contains(d)) {
                return Err(ctx.err(
                    format!("{at}[{j}][{k}]"),
                    format!("degree {} out of range [0,1]", row[k]),
                ));
            }
            dists.push(PossibilityDistribution::new(row.clone()).map_err(|e| ctx.err(format!("{at}[{j}]"), e.to_string()))?);
        }
        rows.push(dists);
    }
    PossibilisticNetwork::new(structure, rows, doc.semantics.into()).map_err(|e| ctx.err("$.cpts", e.to_string()))
}

/// Parses and validates a network document.
pub fn parse_network_str(text: &str, file: &str) -> Result<PossibilisticNetwork> {
    let ctx = Ctx { file };
    build_network(parse_doc(text, &ctx)?, &ctx)
}

pub fn parse_network(path: &Path) -> Result<PossibilisticNetwork> {
    parse_network_str(&read(path)?, &path.display().to_string())
}

/// Parses the variables, edges and semantics of a document; `cpts`, when
/// present, is ignored.
pub fn parse_structure_str(text: &str, file: &str) -> Result<(NetworkStructure, Semantics)> {
    let ctx = Ctx { file };
    let doc = parse_doc(text, &ctx)?;
    Ok((build_structure(&doc, &ctx)?, doc.semantics.into()))
}

pub fn parse_structure(path: &Path) -> Result<(NetworkStructure, Semantics)> {
    parse_structure_str(&read(path)?, &path.display().to_string())
}

fn structure_doc(s: &NetworkStructure, semantics: Semantics) -> NetworkDoc {
    NetworkDoc {
        cpts: None,
        edges: s
            .edges()
            .into_iter()
            .map(|(p, c)| (s.variable(p).name().to_string(), s.variable(c).name().to_string()))
            .collect(),
        semantics: semantics.into(),
        variables: s
            .variables()
            .iter()
            .map(|v| VariableDoc { name: v.name().to_string(), states: v.states().to_vec() })
            .collect(),
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

/// Canonical text of a network document.
pub fn network_to_string(net: &PossibilisticNetwork) -> String {
    let mut doc = structure_doc(net.structure(), net.semantics());
    doc.cpts = Some(
        net.variables()
            .iter()
            .zip(net.tables())
            .map(|(v, t)| (v.name().to_string(), t.rows().iter().map(|r| r.degrees().to_vec()).collect()))
            .collect(),
    );
    to_pretty(&doc)
}

pub fn write_network(path: &Path, net: &PossibilisticNetwork) -> Result<()> {
    fs::write(path, network_to_string(net)).map_err(|e| Error::write(path, e))
}

#[derive(Serialize)]
struct FocalDoc {
    mass: f64,
    set: Vec<String>,
}

#[derive(Serialize)]
struct RandomSetDoc {
    edges: Vec<(String, String)>,
    masses: BTreeMap<String, Vec<Vec<FocalDoc>>>,
    variables: Vec<VariableDoc>,
}

/// Mass functions learned by the random-set estimator, one list of focal
/// sets per table row.
pub fn random_set_to_string(model: &RandomSetModel) -> String {
    let s = model.structure();
    let base = structure_doc(s, Semantics::Product);
    let masses = s
        .variables()
        .iter()
        .zip(model.masses())
        .map(|(v, rows)| {
            let rows = rows
                .iter()
                .map(|m| {
                    m.focal_sets()
                        .iter()
                        .map(|(set, mass)| FocalDoc {
                            mass: *mass,
                            set: set.iter().map(|k| v.label(k).to_string()).collect(),
                        })
                        .collect()
                })
                .collect();
            (v.name().to_string(), rows)
        })
        .collect();
    to_pretty(&RandomSetDoc { edges: base.edges, masses, variables: base.variables })
}

pub fn write_random_set(path: &Path, model: &RandomSetModel) -> Result<()> {
    fs::write(path, random_set_to_string(model)).map_err(|e| Error::write(path, e))
}
