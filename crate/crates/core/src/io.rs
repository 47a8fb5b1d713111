//! Instance and scenario file formats.
//!
//! Instance files are JSON with one edge object per line:
//!
//! ```text
//! {
//!   "name": "small",
//!   "nodes": ["s", "a", "t"],
//!   "source": "s",
//!   "sink": "t",
//!   "edges": [
//!     {"id": 0, "from": "s", "to": "a", "flow": 4},
//!     {"id": 1, "from": "a", "to": "t", "lower": 2, "upper": "inf"}
//!   ]
//! }
//! ```
//!
//! `flow` sets both bounds. A missing `lower` reads as 0 and a missing
//! `upper` as unbounded.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{EdgeBounds, FlowAssignment, Graph, InexactBounds, Scenario, UpperBound};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub bounds: InexactBounds,
}

impl Instance {
    pub fn new(name: impl Into<String>, graph: Graph, bounds: InexactBounds) -> Self {
        Self { name: name.into(), graph, bounds }
    }

    pub fn exact(name: impl Into<String>, graph: Graph, flow: &FlowAssignment) -> Self {
        Self::new(name, graph, InexactBounds::exact(flow))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum UpperJson {
    Value(u64),
    Text(String),
}

fn parse_upper(u: &UpperJson) -> Result<UpperBound> {
    match u {
        UpperJson::Value(v) => Ok(UpperBound::Finite(*v)),
        UpperJson::Text(s) if s == "inf" => Ok(UpperBound::Unbounded),
        UpperJson::Text(s) => Err(Error::Parse(format!("upper bound `{s}` is neither an integer nor \"inf\""))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    id: u32,
    from: String,
    to: String,
    flow: Option<u64>,
    lower: Option<u64>,
    upper: Option<UpperJson>,
}

#[derive(Debug, Deserialize)]
struct InstanceJson {
    #[serde(default)]
    name: String,
    nodes: Vec<String>,
    source: String,
    sink: String,
    edges: Vec<EdgeJson>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: InstanceJson = serde_json::from_str(text)?;
    let triples: Vec<(u32, String, String)> = raw.edges.iter().map(|e| (e.id, e.from.clone(), e.to.clone())).collect();
    let graph = Graph::new(&raw.nodes, &triples, &raw.source, &raw.sink)?;
    let mut bounds = vec![EdgeBounds::at_least(0); graph.edge_count()];
    for e in &raw.edges {
        let b = match (e.flow, e.lower, &e.upper) {
            (Some(f), None, None) => EdgeBounds::exact(f),
            (Some(_), _, _) => {
                return Err(Error::Parse(format!("edge {} mixes `flow` with `lower`/`upper`", e.id)));
            }
            (None, lower, upper) => EdgeBounds::new(
                lower.unwrap_or(0),
                upper.as_ref().map(parse_upper).transpose()?.unwrap_or(UpperBound::Unbounded),
            ),
        };
        let idx = graph.edge_index(crate::graph::EdgeId(e.id)).expect("edge was just inserted");
        bounds[idx] = b;
    }
    Ok(Instance::new(raw.name, graph, InexactBounds(bounds)))
}

/// Reads an instance file, or falls back to a bundled instance of that name
/// (with or without a `.json` suffix) when no such file exists.
pub fn load_instance(spec: &str) -> Result<Instance> {
    let path = std::path::Path::new(spec);
    if path.exists() {
        return parse_instance(&std::fs::read_to_string(path)?);
    }
    let name = spec.strip_suffix(".json").unwrap_or(spec);
    if crate::instances::BUNDLED.contains(&name) {
        return crate::instances::bundled(name);
    }
    Err(Error::Io(format!("no instance file or bundled instance named `{spec}`")))
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Canonical text form; `parse_instance` reads it back unchanged.
pub fn write_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let nodes: Vec<String> = g.nodes().iter().map(|n| json_str(n)).collect();
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"name\": {},", json_str(&inst.name));
    let _ = writeln!(out, "  \"nodes\": [{}],", nodes.join(", "));
    let _ = writeln!(out, "  \"source\": {},", json_str(g.node_name(g.source())));
    let _ = writeln!(out, "  \"sink\": {},", json_str(g.node_name(g.sink())));
    out.push_str("  \"edges\": [\n");
    for (i, e) in g.edges().iter().enumerate() {
        let b = inst.bounds[i];
        let values = match b.upper {
            UpperBound::Finite(u) if u == b.lower => format!("\"flow\": {u}"),
            UpperBound::Finite(u) => format!("\"lower\": {}, \"upper\": {u}", b.lower),
            UpperBound::Unbounded => format!("\"lower\": {}, \"upper\": \"inf\"", b.lower),
        };
        let sep = if i + 1 < g.edge_count() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"id\": {}, \"from\": {}, \"to\": {}, {values}}}{sep}",
            e.id,
            json_str(g.node_name(e.tail)),
            json_str(g.node_name(e.head)),
        );
    }
    out.push_str("  ]\n}\n");
    out
}

/// A discrete uncertainty set as stored on disk, optionally with the nominal
/// scenario and budget it was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub nominal: Option<Scenario>,
    pub gamma: Option<f64>,
    pub scenarios: Vec<Scenario>,
}

fn scenario_from_json(graph: &Graph, v: &Value) -> Result<Scenario> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("scenario must be an object".into()))?;
    let mut bounds = vec![EdgeBounds::at_least(0); graph.edge_count()];
    let keyed = |key: &str| -> Result<BTreeMap<usize, Value>> {
        let mut out = BTreeMap::new();
        let Some(map) = obj.get(key) else { return Ok(out) };
        let map = map.as_object().ok_or_else(|| Error::Parse(format!("`{key}` must be an object")))?;
        for (id, value) in map {
            let id: u32 = id.parse().map_err(|_| Error::Parse(format!("bad edge id `{id}`")))?;
            let idx = graph
                .edge_index(crate::graph::EdgeId(id))
                .ok_or_else(|| Error::Parse(format!("unknown edge id {id}")))?;
            out.insert(idx, value.clone());
        }
        Ok(out)
    };
    for (idx, value) in keyed("lower")? {
        bounds[idx].lower = value.as_u64().ok_or_else(|| Error::Parse(format!("bad lower bound {value}")))?;
    }
    for (idx, value) in keyed("upper")? {
        let upper: UpperJson = serde_json::from_value(value)?;
        bounds[idx].upper = parse_upper(&upper)?;
    }
    Ok(InexactBounds(bounds))
}

pub fn parse_scenarios(graph: &Graph, text: &str) -> Result<ScenarioFile> {
    let root: Value = serde_json::from_str(text)?;
    let nominal = match root.get("nominal") {
        None | Some(Value::Null) => None,
        Some(v) => Some(scenario_from_json(graph, v)?),
    };
    let gamma = root.get("gamma").and_then(Value::as_f64);
    let scenarios = root
        .get("scenarios")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing `scenarios` array".into()))?
        .iter()
        .map(|v| scenario_from_json(graph, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioFile { nominal, gamma, scenarios })
}

fn scenario_json(graph: &Graph, s: &Scenario) -> String {
    let lower: Vec<String> = (0..graph.edge_count()).map(|e| format!("\"{}\": {}", graph.edge(e).id, s[e].lower)).collect();
    let upper: Vec<String> = (0..graph.edge_count())
        .map(|e| match s[e].upper {
            UpperBound::Finite(u) => format!("\"{}\": {u}", graph.edge(e).id),
            UpperBound::Unbounded => format!("\"{}\": \"inf\"", graph.edge(e).id),
        })
        .collect();
    format!("{{\"lower\": {{{}}}, \"upper\": {{{}}}}}", lower.join(", "), upper.join(", "))
}

/// One scenario per line, edges in id order.
pub fn write_scenarios(graph: &Graph, file: &ScenarioFile) -> String {
    let mut out = String::from("{\n");
    match &file.nominal {
        Some(n) => {
            let _ = writeln!(out, "  \"nominal\": {},", scenario_json(graph, n));
        }
        None => out.push_str("  \"nominal\": null,\n"),
    }
    match file.gamma {
        Some(g) => {
            let _ = writeln!(out, "  \"gamma\": {},", serde_json::to_string(&g).expect("finite gamma"));
        }
        None => out.push_str("  \"gamma\": null,\n"),
    }
    out.push_str("  \"scenarios\": [\n");
    for (i, s) in file.scenarios.iter().enumerate() {
        let sep = if i + 1 < file.scenarios.len() { "," } else { "" };
        let _ = writeln!(out, "    {}{sep}", scenario_json(graph, s));
    }
    out.push_str("  ]\n}\n");
    out
}
