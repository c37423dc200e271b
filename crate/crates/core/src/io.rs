//! JSON documents for graphs and decompositions, and JSON-lines graph streams.
//!
//! Vertices and edges are sorted by id on load, so file order never matters.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::decomp::TreeDecomposition;
use crate::embed::LabeledRootedGraph;
use crate::error::{Error, Result};
use crate::id::{Id, Label};
use crate::multigraph::Multigraph;
use crate::set::VertexSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: Id,
    pub ends: [Id; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<Id>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Id>>,
    /// Vertex colours keyed by the vertex id as written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<BTreeMap<String, u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub nodes: Vec<Id>,
    pub tree_edges: Vec<[Id; 2]>,
    /// Bags keyed by the node id as written.
    pub bags: BTreeMap<String, Vec<Id>>,
}

fn malformed(e: serde_json::Error) -> Error {
    Error::Malformed(e.to_string())
}

/// Resolves string map keys against ids, rejecting ambiguous spellings.
fn key_index(ids: &[Id]) -> Result<HashMap<String, usize>> {
    let mut out = HashMap::new();
    for (i, id) in ids.iter().enumerate() {
        if out.insert(id.to_string(), i).is_some() {
            return Err(Error::Malformed(format!("ids collide as map key {id}")));
        }
    }
    Ok(out)
}

impl GraphDoc {
    pub fn from_graph(g: &LabeledRootedGraph) -> Self {
        let ids = g.graph.vertex_ids();
        GraphDoc {
            vertices: ids.to_vec(),
            edges: g
                .graph
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    ends: [ids[e.ends.0].clone(), ids[e.ends.1].clone()],
                    label: e.label.clone(),
                })
                .collect(),
            roots: (!g.roots.is_empty()).then(|| g.roots.iter().map(|v| ids[v].clone()).collect()),
            colors: g
                .colors
                .as_ref()
                .map(|c| c.iter().enumerate().map(|(v, &c)| (ids[v].to_string(), c)).collect()),
        }
    }

    pub fn to_graph(&self) -> Result<LabeledRootedGraph> {
        let mut vertices = self.vertices.clone();
        vertices.sort();
        let mut g = Multigraph::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        let mut edges: Vec<&EdgeDoc> = self.edges.iter().collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        for e in edges {
            g.add_edge_between(e.id.clone(), &e.ends[0], &e.ends[1], e.label.clone())?;
        }
        let mut roots = VertexSet::EMPTY;
        for r in self.roots.iter().flatten() {
            roots.insert(g.index_of(r)?);
        }
        let colors = match &self.colors {
            None => None,
            Some(map) => {
                let keys = key_index(g.vertex_ids())?;
                let mut c = vec![None; g.vertex_count()];
                for (k, &col) in map {
                    let v = *keys.get(k).ok_or_else(|| Error::UnknownVertex(Id::from(k.as_str())))?;
                    c[v] = Some(col);
                }
                if let Some(v) = c.iter().position(Option::is_none) {
                    return Err(Error::Malformed(format!("vertex {} has no colour", g.vertex_id(v))));
                }
                Some(c.into_iter().flatten().collect())
            }
        };
        LabeledRootedGraph::new(g, roots, colors)
    }
}

impl DecompositionDoc {
    pub fn from_decomposition(g: &Multigraph, d: &TreeDecomposition) -> Self {
        let nodes = d.node_ids();
        DecompositionDoc {
            nodes: nodes.to_vec(),
            tree_edges: d.tree_edges().iter().map(|e| [nodes[e.ends.0].clone(), nodes[e.ends.1].clone()]).collect(),
            bags: (0..d.node_count())
                .map(|t| (nodes[t].to_string(), d.bag(t).iter().map(|v| g.vertex_id(v).clone()).collect()))
                .collect(),
        }
    }

    /// Builds the decomposition over the vertices of `g`. Nodes are sorted by
    /// id and tree edges by their endpoints.
    pub fn to_decomposition(&self, g: &Multigraph) -> Result<TreeDecomposition> {
        let mut nodes = self.nodes.clone();
        nodes.sort();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateNode(w[0].clone()));
        }
        let keys = key_index(&nodes)?;
        let mut bags = vec![None; nodes.len()];
        for (k, vs) in &self.bags {
            let t = *keys.get(k).ok_or_else(|| Error::UnknownNode(Id::from(k.as_str())))?;
            let mut bag = VertexSet::EMPTY;
            for v in vs {
                bag.insert(g.index_of(v)?);
            }
            bags[t] = Some(bag);
        }
        if let Some(t) = bags.iter().position(Option::is_none) {
            return Err(Error::Malformed(format!("node {} has no bag", nodes[t])));
        }
        let index = |id: &Id| nodes.binary_search(id).map_err(|_| Error::UnknownNode(id.clone()));
        let mut edges = Vec::with_capacity(self.tree_edges.len());
        for [a, b] in &self.tree_edges {
            let (a, b) = (index(a)?, index(b)?);
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort();
        TreeDecomposition::new(nodes, bags.into_iter().flatten().collect(), edges)
    }
}

pub fn parse_graph(text: &str) -> Result<LabeledRootedGraph> {
    serde_json::from_str::<GraphDoc>(text).map_err(malformed)?.to_graph()
}

pub fn parse_decomposition(text: &str, g: &Multigraph) -> Result<TreeDecomposition> {
    serde_json::from_str::<DecompositionDoc>(text).map_err(malformed)?.to_decomposition(g)
}

pub fn graph_to_json(g: &LabeledRootedGraph) -> String {
    serde_json::to_string_pretty(&GraphDoc::from_graph(g)).expect("plain data serializes")
}

pub fn decomposition_to_json(g: &Multigraph, d: &TreeDecomposition) -> String {
    serde_json::to_string_pretty(&DecompositionDoc::from_decomposition(g, d)).expect("plain data serializes")
}

/// Reads one graph per non-blank line.
pub fn read_graph_lines(reader: impl BufRead) -> Result<Vec<LabeledRootedGraph>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Malformed(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let g = parse_graph(&line).map_err(|e| Error::Malformed(format!("line {}: {e}", n + 1)))?;
        out.push(g);
    }
    Ok(out)
}
