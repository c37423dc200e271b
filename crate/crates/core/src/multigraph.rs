//! Finite undirected multigraphs with loops, parallel edges and stable edge
//! identities, together with the path primitives the rest of the crate needs.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::id::{Id, Label};
use crate::set::{VertexSet, MAX_VERTICES};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: Id,
    /// Endpoint indices. Equal endpoints make a loop.
    pub ends: (usize, usize),
    pub label: Option<Label>,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    /// Endpoints with the smaller index first.
    pub fn key(&self) -> (usize, usize) {
        let (a, b) = self.ends;
        (a.min(b), a.max(b))
    }

    pub fn other(&self, v: usize) -> usize {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }
}

/// A finite multigraph. Vertices are addressed by dense indices `0..n` that
/// follow insertion order; each vertex and edge also carries an [`Id`].
#[derive(Clone, Debug, Default)]
pub struct Multigraph {
    vertices: Vec<Id>,
    vertex_index: HashMap<Id, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<Id, usize>,
    // neighbours over non-loop edges
    adj: Vec<VertexSet>,
}

impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Multigraph {}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph with vertices `0..n` named by their index.
    pub fn with_vertices(n: usize) -> Result<Self> {
        let mut g = Self::new();
        for v in 0..n {
            g.add_vertex(Id::from(v))?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, id: Id) -> Result<usize> {
        if self.vertex_index.contains_key(&id) {
            return Err(Error::DuplicateVertex(id));
        }
        if self.vertices.len() == MAX_VERTICES {
            return Err(Error::TooManyVertices { got: MAX_VERTICES + 1, max: MAX_VERTICES });
        }
        let v = self.vertices.len();
        self.vertex_index.insert(id.clone(), v);
        self.vertices.push(id);
        self.adj.push(VertexSet::EMPTY);
        Ok(v)
    }

    pub fn add_edge(&mut self, id: Id, u: usize, v: usize, label: Option<Label>) -> Result<usize> {
        for w in [u, v] {
            if w >= self.vertices.len() {
                return Err(Error::VertexOutOfRange(w));
            }
        }
        if self.edge_index.contains_key(&id) {
            return Err(Error::DuplicateEdge(id));
        }
        let e = self.edges.len();
        self.edge_index.insert(id.clone(), e);
        self.edges.push(Edge { id, ends: (u, v), label });
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
        Ok(e)
    }

    /// Adds an edge with the next free integer id.
    pub fn add_auto_edge(&mut self, u: usize, v: usize) -> Result<usize> {
        let id = Id::from(self.edges.len());
        self.add_edge(id, u, v, None)
    }

    pub fn add_edge_between(&mut self, id: Id, u: &Id, v: &Id, label: Option<Label>) -> Result<usize> {
        let u = self.index_of(u)?;
        let v = self.index_of(v)?;
        self.add_edge(id, u, v, label)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_null(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_ids(&self) -> &[Id] {
        &self.vertices
    }

    pub fn vertex_id(&self, v: usize) -> &Id {
        &self.vertices[v]
    }

    pub fn index_of(&self, id: &Id) -> Result<usize> {
        self.vertex_index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.clone()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_index_of(&self, id: &Id) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.vertices.len())
    }

    /// Distinct neighbours over non-loop edges.
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    /// Indices of the edges with endpoint pair `{u, v}` (loops when `u == v`),
    /// in edge order.
    pub fn edges_between(&self, u: usize, v: usize) -> impl Iterator<Item = usize> + '_ {
        let key = (u.min(v), u.max(v));
        self.edges.iter().enumerate().filter(move |(_, e)| e.key() == key).map(|(i, _)| i)
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges_between(u, v).count()
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.ends.0 == v) as usize + (e.ends.1 == v) as usize)
            .sum()
    }

    pub fn max_multiplicity(&self) -> usize {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.edges {
            *counts.entry(e.key()).or_default() += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).len() <= 1
    }

    /// First edge joining two distinct adjacent vertices.
    fn link(&self, u: usize, v: usize) -> usize {
        self.edges_between(u, v).next().expect("adjacent vertices share an edge")
    }
}

/// A simple path `v_0, e_1, v_1, ..., e_m, v_m` given by vertex and edge indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathWitness {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl PathWitness {
    fn along(g: &Multigraph, vertices: Vec<usize>) -> Self {
        let edges = vertices.windows(2).map(|w| g.link(w[0], w[1])).collect();
        PathWitness { vertices, edges }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().copied().collect()
    }

    pub fn is_valid_in(&self, g: &Multigraph) -> bool {
        if self.vertices.is_empty() || self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        if self.vertices.iter().any(|&v| v >= g.vertex_count()) {
            return false;
        }
        if self.vertex_set().len() != self.vertices.len() {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().enumerate().all(|(i, &e)| {
            e < g.edge_count() && seen.insert(e) && {
                let key = g.edge(e).key();
                let (a, b) = (self.vertices[i], self.vertices[i + 1]);
                a != b && key == (a.min(b), a.max(b))
            }
        })
    }
}

/// A longest simple path of `g`. Loops never appear on paths.
pub fn longest_path(g: &Multigraph) -> Result<PathWitness> {
    if g.is_null() {
        return Err(Error::NullGraph);
    }
    let n = g.vertex_count();
    let mut best = vec![0];
    let mut stack = Vec::with_capacity(n);
    for start in 0..n {
        if best.len() == n {
            break;
        }
        stack.push(start);
        extend_longest(g, VertexSet::singleton(start), &mut stack, &mut best);
        stack.pop();
    }
    Ok(PathWitness::along(g, best))
}

fn extend_longest(g: &Multigraph, visited: VertexSet, stack: &mut Vec<usize>, best: &mut Vec<usize>) {
    if stack.len() > best.len() {
        best.clone_from(stack);
    }
    let n = g.vertex_count();
    if best.len() == n {
        return;
    }
    // every extension stays inside the unvisited part of the graph
    if stack.len() + (n - visited.len()) <= best.len() {
        return;
    }
    let last = *stack.last().unwrap();
    for w in g.neighbors(last).difference(visited) {
        stack.push(w);
        extend_longest(g, visited.with(w), stack, best);
        stack.pop();
        if best.len() == n {
            return;
        }
    }
}

pub fn longest_path_length(g: &Multigraph) -> Result<usize> {
    longest_path(g).map(|p| p.len())
}

/// Whether `g` has a simple path with exactly `m` edges.
pub fn contains_path(g: &Multigraph, m: usize) -> Result<bool> {
    find_path(g, m).map(|p| p.is_some())
}

/// A simple path with exactly `m` edges, if any.
pub fn find_path(g: &Multigraph, m: usize) -> Result<Option<PathWitness>> {
    if g.is_null() {
        return Err(Error::NullGraph);
    }
    let n = g.vertex_count();
    if m >= n {
        return Ok(None);
    }
    fn dfs(g: &Multigraph, visited: VertexSet, stack: &mut Vec<usize>, m: usize) -> bool {
        if stack.len() == m + 1 {
            return true;
        }
        let last = *stack.last().unwrap();
        for w in g.neighbors(last).difference(visited) {
            stack.push(w);
            if dfs(g, visited.with(w), stack, m) {
                return true;
            }
            stack.pop();
        }
        false
    }
    let mut stack = Vec::with_capacity(m + 1);
    for start in 0..n {
        stack.clear();
        stack.push(start);
        if dfs(g, VertexSet::singleton(start), &mut stack, m) {
            return Ok(Some(PathWitness::along(g, stack)));
        }
    }
    Ok(None)
}

/// Result of a Menger query: either the requested number of disjoint paths
/// or a small separator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Linkage {
    Paths(Vec<PathWitness>),
    Separator(VertexSet),
}

impl Linkage {
    pub fn is_paths(&self) -> bool {
        matches!(self, Linkage::Paths(_))
    }
}

/// Unit-capacity flow network used for vertex-disjoint path queries.
struct FlowNetwork {
    head: Vec<usize>,
    cap: Vec<i32>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork { head: Vec::new(), cap: Vec::new(), out: vec![Vec::new(); nodes] }
    }

    fn arc(&mut self, from: usize, to: usize, cap: i32) {
        self.out[from].push(self.head.len());
        self.head.push(to);
        self.cap.push(cap);
        self.out[to].push(self.head.len());
        self.head.push(from);
        self.cap.push(0);
    }

    fn reachable(&self, source: usize) -> (Vec<bool>, Vec<Option<usize>>) {
        let mut seen = vec![false; self.out.len()];
        let mut via = vec![None; self.out.len()];
        let mut queue = VecDeque::from([source]);
        seen[source] = true;
        while let Some(x) = queue.pop_front() {
            for &a in &self.out[x] {
                let y = self.head[a];
                if self.cap[a] > 0 && !seen[y] {
                    seen[y] = true;
                    via[y] = Some(a);
                    queue.push_back(y);
                }
            }
        }
        (seen, via)
    }

    /// Pushes one unit along a shortest augmenting path.
    fn augment(&mut self, source: usize, sink: usize) -> bool {
        let (seen, via) = self.reachable(source);
        if !seen[sink] {
            return false;
        }
        let mut x = sink;
        while x != source {
            let a = via[x].unwrap();
            self.cap[a] -= 1;
            self.cap[a ^ 1] += 1;
            x = self.head[a ^ 1];
        }
        true
    }
}

/// Finds `k` pairwise vertex-disjoint paths from `from` to `to`, or a vertex
/// set of size less than `k` meeting every such path.
///
/// A vertex in both terminal sets is a path of length zero.
pub fn disjoint_paths(g: &Multigraph, from: VertexSet, to: VertexSet, k: usize) -> Result<Linkage> {
    if k == 0 {
        return Err(Error::ZeroPaths);
    }
    let all = g.all_vertices();
    if let Some(v) = from.union(to).difference(all).first() {
        return Err(Error::VertexOutOfRange(v));
    }
    if k > from.len() || k > to.len() {
        return Err(Error::InsufficientTerminals { k, from: from.len(), to: to.len() });
    }
    let n = g.vertex_count();
    let (source, sink) = (2 * n, 2 * n + 1);
    let big = (n + 1) as i32;
    let mut net = FlowNetwork::new(2 * n + 2);
    for v in 0..n {
        net.arc(2 * v, 2 * v + 1, 1);
        for w in g.neighbors(v) {
            net.arc(2 * v + 1, 2 * w, big);
        }
    }
    for u in from {
        net.arc(source, 2 * u, big);
    }
    for v in to {
        net.arc(2 * v + 1, sink, big);
    }

    let mut flow = 0;
    while flow < k && net.augment(source, sink) {
        flow += 1;
    }

    if flow < k {
        let (seen, _) = net.reachable(source);
        let sep: VertexSet = (0..n).filter(|&v| seen[2 * v] && !seen[2 * v + 1]).collect();
        debug_assert_eq!(sep.len(), flow);
        debug_assert!(separates(g, sep, from, to));
        return Ok(Linkage::Separator(sep));
    }

    // each vertex carries at most one unit, so following flow from the source is unambiguous
    let carries = |a: usize| a.is_multiple_of(2) && net.cap[a ^ 1] > 0;
    let mut paths = Vec::with_capacity(k);
    for &a in &net.out[source] {
        if !carries(a) {
            continue;
        }
        let mut vertices = Vec::new();
        let mut node = net.head[a];
        loop {
            let v = node / 2;
            vertices.push(v);
            let next = net.out[2 * v + 1].iter().copied().find(|&b| carries(b)).expect("flow conservation");
            node = net.head[next];
            if node == sink {
                break;
            }
        }
        paths.push(PathWitness::along(g, vertices));
    }
    debug_assert_eq!(paths.len(), k);
    Ok(Linkage::Paths(paths))
}

/// Whether every path from `from` to `to` meets `sep`.
pub fn separates(g: &Multigraph, sep: VertexSet, from: VertexSet, to: VertexSet) -> bool {
    let mut seen = from.difference(sep);
    let mut queue: VecDeque<usize> = seen.iter().collect();
    while let Some(v) = queue.pop_front() {
        if to.contains(v) {
            return false;
        }
        for w in g.neighbors(v).difference(seen.union(sep)) {
            seen.insert(w);
            queue.push_back(w);
        }
    }
    true
}

/// Vertex sets of the connected components, ordered by their least vertex.
pub fn connected_components(g: &Multigraph) -> Vec<VertexSet> {
    let mut left = g.all_vertices();
    let mut out = Vec::new();
    while let Some(start) = left.first() {
        let mut comp = VertexSet::singleton(start);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in g.neighbors(v).difference(comp) {
                comp.insert(w);
                queue.push_back(w);
            }
        }
        left = left.difference(comp);
        out.push(comp);
    }
    out
}

/// The subgraph on `keep` containing every edge of `g` with both ends in `keep`.
/// Vertex and edge ids and labels carry over; relative order is preserved.
pub fn induced_subgraph(g: &Multigraph, keep: VertexSet) -> Result<Multigraph> {
    if let Some(v) = keep.difference(g.all_vertices()).first() {
        return Err(Error::VertexOutOfRange(v));
    }
    let mut sub = Multigraph::new();
    let mut map = vec![usize::MAX; g.vertex_count()];
    for v in keep {
        map[v] = sub.add_vertex(g.vertex_id(v).clone())?;
    }
    for e in g.edges() {
        if keep.contains(e.ends.0) && keep.contains(e.ends.1) {
            sub.add_edge(e.id.clone(), map[e.ends.0], map[e.ends.1], e.label.clone())?;
        }
    }
    Ok(sub)
}

/// Union of graphs that share no vertex ids and no edge ids.
pub fn disjoint_union<'a>(parts: impl IntoIterator<Item = &'a Multigraph>) -> Result<Multigraph> {
    let mut out = Multigraph::new();
    for g in parts {
        let offset = out.vertex_count();
        for id in g.vertex_ids() {
            out.add_vertex(id.clone()).map_err(|e| match e {
                Error::DuplicateVertex(id) => Error::OverlappingHosts(id),
                other => other,
            })?;
        }
        for e in g.edges() {
            out.add_edge(e.id.clone(), e.ends.0 + offset, e.ends.1 + offset, e.label.clone())?;
        }
    }
    Ok(out)
}
