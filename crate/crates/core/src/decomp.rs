//! Tree-decompositions of multigraphs: validation, width and diameter,
//! adhesions, separator families along tree paths, linkedness and shortness.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::id::Id;
use crate::multigraph::{disjoint_paths, disjoint_union, Multigraph};
use crate::set::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub id: u32,
    pub ends: (usize, usize),
    /// Id of the edge this one was rewired from, if any.
    pub replaces: Option<u32>,
}

impl TreeEdge {
    pub fn touches(&self, node: usize) -> bool {
        self.ends.0 == node || self.ends.1 == node
    }

    pub fn shares_node(&self, other: &TreeEdge) -> bool {
        self.touches(other.ends.0) || self.touches(other.ends.1)
    }

    pub fn other(&self, node: usize) -> usize {
        if self.ends.0 == node {
            self.ends.1
        } else {
            self.ends.0
        }
    }
}

/// A tree whose nodes carry bags of host-vertex indices.
///
/// The decomposition does not own its host graph; operations that need the
/// host take it as an argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    nodes: Vec<Id>,
    bags: Vec<VertexSet>,
    edges: Vec<TreeEdge>,
}

impl TreeDecomposition {
    /// Builds a decomposition from node ids, one bag per node and tree edges
    /// given as node-index pairs. Tree shape is checked by [`validate`].
    pub fn new(nodes: Vec<Id>, bags: Vec<VertexSet>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, ends)| TreeEdge { id: i as u32, ends, replaces: None })
            .collect();
        Self::from_parts(nodes, bags, edges)
    }

    pub fn from_parts(nodes: Vec<Id>, bags: Vec<VertexSet>, edges: Vec<TreeEdge>) -> Result<Self> {
        if nodes.len() != bags.len() {
            return Err(Error::InvalidDecomposition(format!(
                "{} nodes but {} bags",
                nodes.len(),
                bags.len()
            )));
        }
        let mut seen = HashSet::new();
        for id in &nodes {
            if !seen.insert(id) {
                return Err(Error::DuplicateNode(id.clone()));
            }
        }
        for e in &edges {
            for end in [e.ends.0, e.ends.1] {
                if end >= nodes.len() {
                    return Err(Error::InvalidDecomposition(format!("tree edge endpoint {end} out of range")));
                }
            }
        }
        Ok(TreeDecomposition { nodes, bags, edges })
    }

    /// One node holding `bag`.
    pub fn single(bag: VertexSet) -> Self {
        TreeDecomposition { nodes: vec![Id::Int(0)], bags: vec![bag], edges: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> &[Id] {
        &self.nodes
    }

    pub fn node_id(&self, node: usize) -> &Id {
        &self.nodes[node]
    }

    pub fn node_index(&self, id: &Id) -> Result<usize> {
        self.nodes.iter().position(|n| n == id).ok_or_else(|| Error::UnknownNode(id.clone()))
    }

    pub fn bag(&self, node: usize) -> VertexSet {
        self.bags[node]
    }

    pub fn bags(&self) -> &[VertexSet] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn adhesion(&self, edge: &TreeEdge) -> VertexSet {
        self.bags[edge.ends.0].intersection(self.bags[edge.ends.1])
    }

    pub fn adhesions(&self) -> Vec<VertexSet> {
        self.edges.iter().map(|e| self.adhesion(e)).collect()
    }

    pub(crate) fn next_edge_id(&self) -> u32 {
        self.edges.iter().map(|e| e.id + 1).max().unwrap_or(0)
    }

    pub(crate) fn with_edges(&self, edges: Vec<TreeEdge>) -> Self {
        TreeDecomposition { nodes: self.nodes.clone(), bags: self.bags.clone(), edges }
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.edges.iter().filter(|e| e.touches(node)).map(|e| e.other(node)).collect();
        out.sort_unstable();
        out
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.ends.0].push(e.ends.1);
            adj[e.ends.1].push(e.ends.0);
        }
        adj
    }

    /// BFS distances from `from`; `usize::MAX` marks unreachable nodes.
    pub fn distances_from(&self, from: usize) -> Vec<usize> {
        bfs(&self.adjacency(), from, None).0
    }

    /// Whether the tree graph is connected and acyclic with at least one node.
    pub fn is_tree(&self) -> bool {
        self.tree_defect().is_none()
    }

    fn tree_defect(&self) -> Option<String> {
        if self.nodes.is_empty() {
            return Some("tree has no nodes".into());
        }
        if let Some(e) = self.edges.iter().find(|e| e.ends.0 == e.ends.1) {
            return Some(format!("tree edge {} is a loop", e.id));
        }
        if self.edges.len() + 1 != self.nodes.len() {
            return Some(format!("{} nodes but {} tree edges", self.nodes.len(), self.edges.len()));
        }
        let dist = self.distances_from(0);
        if let Some(v) = dist.iter().position(|&d| d == usize::MAX) {
            return Some(format!("node {} is disconnected from node {}", self.nodes[v], self.nodes[0]));
        }
        None
    }

    /// Nodes of the unique tree path from `u` to `v`, both included.
    pub fn tree_path(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        if u >= self.nodes.len() || v >= self.nodes.len() {
            return Err(Error::NotATreePath(format!("node index out of range ({u}, {v})")));
        }
        let (dist, parent) = bfs(&self.adjacency(), v, None);
        if dist[u] == usize::MAX {
            return Err(Error::NotATreePath(format!("{} and {} are not connected", self.nodes[u], self.nodes[v])));
        }
        let mut path = vec![u];
        let mut x = u;
        while x != v {
            x = parent[x];
            path.push(x);
        }
        Ok(path)
    }

    /// Max over bags of |bag| - 1, saturating at zero.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Diameter of the tree in edges.
    pub fn diameter(&self) -> usize {
        let adj = self.adjacency();
        (0..self.nodes.len())
            .map(|v| bfs(&adj, v, None).0.into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Diameter of the subtree induced by `within`, which must be connected.
    pub fn subtree_diameter(&self, within: &[bool]) -> usize {
        let adj = self.adjacency();
        (0..self.nodes.len())
            .filter(|&v| within[v])
            .map(|v| bfs(&adj, v, Some(within)).0.into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// A center of the subtree induced by `within` (all nodes when `None`).
    /// Of two centers the one with the smaller node id wins.
    pub fn center(&self, within: Option<&[bool]>) -> usize {
        let adj = self.adjacency();
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.nodes.len() {
            if within.is_some_and(|w| !w[v]) {
                continue;
            }
            let ecc = bfs(&adj, v, within).0.into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0);
            best = match best {
                Some((b, be)) if be < ecc || (be == ecc && self.nodes[b] < self.nodes[v]) => Some((b, be)),
                _ => Some((v, ecc)),
            };
        }
        best.expect("center of an empty tree").0
    }
}

fn bfs(adj: &[Vec<usize>], from: usize, within: Option<&[bool]>) -> (Vec<usize>, Vec<usize>) {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut parent = vec![usize::MAX; adj.len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX && within.is_none_or(|w| w[y]) {
                dist[y] = dist[x] + 1;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    (dist, parent)
}

/// First violated tree-decomposition condition, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotATree(String),
    BagOutsideHost { node: usize, vertex: usize },
    UncoveredVertex(usize),
    /// Host edge index whose endpoints share no bag.
    UncoveredEdge(usize),
    /// `bag(v0) ∩ bag(vm) ⊄ bag(vi)` for `vi` on the tree path from `v0` to `vm`.
    Intersection { v0: usize, vi: usize, vm: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree(why) => write!(f, "not a tree: {why}"),
            Violation::BagOutsideHost { node, vertex } => {
                write!(f, "bag of node #{node} holds vertex #{vertex} outside the host")
            }
            Violation::UncoveredVertex(v) => write!(f, "vertex #{v} is in no bag"),
            Violation::UncoveredEdge(e) => write!(f, "edge #{e} has no bag containing both ends"),
            Violation::Intersection { v0, vi, vm } => {
                write!(f, "bag #{v0} ∩ bag #{vm} is not contained in bag #{vi} on the path between them")
            }
        }
    }
}

/// Checks that `d` is a tree-decomposition of `g`.
pub fn validate(g: &Multigraph, d: &TreeDecomposition) -> std::result::Result<(), Violation> {
    if let Some(why) = d.tree_defect() {
        return Err(Violation::NotATree(why));
    }
    let all = g.all_vertices();
    for (node, bag) in d.bags.iter().enumerate() {
        if let Some(vertex) = bag.difference(all).first() {
            return Err(Violation::BagOutsideHost { node, vertex });
        }
    }
    let covered = d.bags.iter().fold(VertexSet::EMPTY, |acc, &b| acc.union(b));
    if let Some(v) = all.difference(covered).first() {
        return Err(Violation::UncoveredVertex(v));
    }
    for (i, e) in g.edges().iter().enumerate() {
        let ends = VertexSet::singleton(e.ends.0).with(e.ends.1);
        if !d.bags.iter().any(|b| ends.is_subset(*b)) {
            return Err(Violation::UncoveredEdge(i));
        }
    }
    for v0 in 0..d.node_count() {
        for vm in v0 + 1..d.node_count() {
            let common = d.bag(v0).intersection(d.bag(vm));
            let path = d.tree_path(v0, vm).expect("connected tree");
            if let Some(&vi) = path.iter().find(|&&vi| !common.is_subset(d.bag(vi))) {
                return Err(Violation::Intersection { v0, vi, vm });
            }
        }
    }
    Ok(())
}

/// The ⊆-minimal sets among bags and adhesions along a tree path, with
/// repeats identified. Members are kept in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparatorFamily(Vec<VertexSet>);

impl SeparatorFamily {
    pub fn from_candidates(candidates: impl IntoIterator<Item = VertexSet>) -> Self {
        let all: BTreeSet<VertexSet> = candidates.into_iter().collect();
        let members = all.iter().copied().filter(|s| !all.iter().any(|t| t.is_proper_subset(*s))).collect();
        SeparatorFamily(members)
    }

    pub fn members(&self) -> &[VertexSet] {
        &self.0
    }

    pub fn min_size(&self) -> usize {
        self.0.iter().map(|s| s.len()).min().unwrap_or(0)
    }
}

pub fn separator_family(d: &TreeDecomposition, u: usize, v: usize) -> Result<SeparatorFamily> {
    for node in [u, v] {
        if node >= d.node_count() {
            return Err(Error::UnknownNode(Id::from(node)));
        }
    }
    let path = d.tree_path(u, v)?;
    let bags = path.iter().map(|&x| d.bag(x));
    let adhesions = path.windows(2).map(|w| d.bag(w[0]).intersection(d.bag(w[1])));
    Ok(SeparatorFamily::from_candidates(bags.chain(adhesions)))
}

/// Counterexample to linkedness: `from ⊆ bag(u)` and `to ⊆ bag(v)` of equal
/// size `k` with fewer than `k` disjoint paths and no family member below `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkWitness {
    pub u: usize,
    pub v: usize,
    pub from: VertexSet,
    pub to: VertexSet,
}

/// The canonically least linkedness counterexample, if any.
///
/// Node pairs are visited with `u <= v`, then by `k`, then by `from` and `to`
/// in set order. The condition is symmetric in `(u, v)`, so unordered pairs
/// suffice.
pub fn link_witness(g: &Multigraph, d: &TreeDecomposition) -> Option<LinkWitness> {
    for u in 0..d.node_count() {
        for v in u..d.node_count() {
            let family = separator_family(d, u, v).expect("valid nodes");
            // any k above the smallest member is excused by that member
            let k_max = family.min_size().min(d.bag(u).len()).min(d.bag(v).len());
            for k in 1..=k_max {
                let tos = d.bag(v).subsets_of_size(k);
                for from in d.bag(u).subsets_of_size(k) {
                    for &to in &tos {
                        let linked = disjoint_paths(g, from, to, k).expect("terminal sets are large enough");
                        if !linked.is_paths() {
                            return Some(LinkWitness { u, v, from, to });
                        }
                    }
                }
            }
        }
    }
    None
}

pub fn is_linked(g: &Multigraph, d: &TreeDecomposition) -> bool {
    link_witness(g, d).is_none()
}

/// First pair of distinct, non-incident tree edges with equal adhesions.
pub fn short_violation(d: &TreeDecomposition) -> Option<(u32, u32)> {
    let adhesions = d.adhesions();
    for (i, e) in d.edges.iter().enumerate() {
        for (j, f) in d.edges.iter().enumerate().skip(i + 1) {
            if adhesions[i] == adhesions[j] && !e.shares_node(f) {
                return Some((e.id, f.id));
            }
        }
    }
    None
}

pub fn is_short(d: &TreeDecomposition) -> bool {
    short_violation(d).is_none()
}

/// Evaluates both sides of the adhesion-equality biconditional on a tree path
/// `[v_0, ..., v_m]`:
///
/// * `lhs`: `u = bag(v_0) ∩ bag(v_1) = bag(v_{m-1}) ∩ bag(v_m)`
/// * `rhs`: `u = bag(v_i) ∩ bag(v_0) = bag(v_i) ∩ bag(v_m)` for all `0 < i < m`
///
/// With `m = 1` the interior range is empty and `rhs` is read as the single
/// adhesion statement, so both sides coincide.
pub fn adhesion_equality_check(d: &TreeDecomposition, path: &[usize], u: VertexSet) -> Result<(bool, bool)> {
    check_tree_path(d, path)?;
    let m = path.len() - 1;
    let bag = |i: usize| d.bag(path[i]);
    let lhs = u == bag(0).intersection(bag(1)) && u == bag(m - 1).intersection(bag(m));
    let rhs = if m == 1 {
        lhs
    } else {
        (1..m).all(|i| u == bag(i).intersection(bag(0)) && u == bag(i).intersection(bag(m)))
    };
    Ok((lhs, rhs))
}

pub(crate) fn check_tree_path(d: &TreeDecomposition, path: &[usize]) -> Result<()> {
    if path.len() < 2 {
        return Err(Error::EmptyPath);
    }
    if let Some(&x) = path.iter().find(|&&x| x >= d.node_count()) {
        return Err(Error::NotATreePath(format!("node index {x} out of range")));
    }
    let distinct: HashSet<usize> = path.iter().copied().collect();
    if distinct.len() != path.len() {
        return Err(Error::NotATreePath("repeated node".into()));
    }
    for w in path.windows(2) {
        if !d.edges.iter().any(|e| e.touches(w[0]) && e.touches(w[1])) {
            return Err(Error::NotATreePath(format!("{} and {} are not adjacent", d.nodes[w[0]], d.nodes[w[1]])));
        }
    }
    Ok(())
}

/// Joins decompositions of vertex-disjoint graphs into one decomposition of
/// their union by linking the center of the first tree to the center of every
/// other tree. Nodes are renumbered `0..` in input order.
pub fn combine_components(parts: &[(&Multigraph, &TreeDecomposition)]) -> Result<(Multigraph, TreeDecomposition)> {
    if parts.is_empty() {
        return Err(Error::EmptyList);
    }
    for (g, d) in parts {
        validate(g, d).map_err(|v| Error::InvalidDecomposition(v.to_string()))?;
    }
    let host = disjoint_union(parts.iter().map(|(g, _)| *g))?;
    let mut nodes = Vec::new();
    let mut bags = Vec::new();
    let mut edges = Vec::new();
    let mut first_center = None;
    let mut vertex_offset = 0;
    for (g, d) in parts {
        let node_offset = nodes.len();
        for node in 0..d.node_count() {
            nodes.push(Id::from(nodes.len()));
            bags.push(VertexSet::from_bits(d.bag(node).bits() << vertex_offset));
        }
        for e in &d.edges {
            edges.push((e.ends.0 + node_offset, e.ends.1 + node_offset));
        }
        let center = d.center(None) + node_offset;
        match first_center {
            None => first_center = Some(center),
            Some(c) => edges.push((c, center)),
        }
        vertex_offset += g.vertex_count();
    }
    let combined = TreeDecomposition::new(nodes, bags, edges)?;
    debug_assert_eq!(validate(&host, &combined), Ok(()));
    Ok((host, combined))
}
