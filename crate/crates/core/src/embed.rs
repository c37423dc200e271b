//! Subgraph and induced-subgraph embeddings between multigraphs with optional
//! roots, vertex colours and edge labels compared under a quasi-order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::id::Label;
use crate::multigraph::Multigraph;
use crate::set::VertexSet;

/// A reflexive, transitive comparison on edge labels.
pub trait QuasiOrder {
    /// Whether `label` belongs to the universe of this order.
    fn knows(&self, _label: &Label) -> bool {
        true
    }

    fn leq(&self, a: &Label, b: &Label) -> bool;
}

/// The one-element order: every label is below every other.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialOrder;

impl QuasiOrder for TrivialOrder {
    fn leq(&self, _: &Label, _: &Label) -> bool {
        true
    }
}

/// Integers in their natural order. String labels are not part of it.
#[derive(Clone, Copy, Debug, Default)]
pub struct NaturalOrder;

impl QuasiOrder for NaturalOrder {
    fn knows(&self, label: &Label) -> bool {
        label.as_int().is_some()
    }

    fn leq(&self, a: &Label, b: &Label) -> bool {
        match (a.as_int(), b.as_int()) {
            (Some(a), Some(b)) => a <= b,
            _ => a == b,
        }
    }
}

/// Labels compare only when equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct EqualityOrder;

impl QuasiOrder for EqualityOrder {
    fn leq(&self, a: &Label, b: &Label) -> bool {
        a == b
    }
}

/// A finite order given by generating pairs, closed under reflexivity and
/// transitivity.
#[derive(Clone, Debug, Default)]
pub struct ExplicitOrder {
    labels: BTreeSet<Label>,
    below: BTreeSet<(Label, Label)>,
}

impl ExplicitOrder {
    pub fn new(labels: impl IntoIterator<Item = Label>, pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut labels: BTreeSet<Label> = labels.into_iter().collect();
        let mut below: BTreeSet<(Label, Label)> = pairs.into_iter().collect();
        for (a, b) in &below {
            labels.insert(a.clone());
            labels.insert(b.clone());
        }
        for l in &labels {
            below.insert((l.clone(), l.clone()));
        }
        loop {
            let extra: Vec<(Label, Label)> = below
                .iter()
                .flat_map(|(a, b)| below.iter().filter(move |(c, _)| c == b).map(move |(_, d)| (a.clone(), d.clone())))
                .filter(|p| !below.contains(p))
                .collect();
            if extra.is_empty() {
                break;
            }
            below.extend(extra);
        }
        ExplicitOrder { labels, below }
    }
}

impl QuasiOrder for ExplicitOrder {
    fn knows(&self, label: &Label) -> bool {
        self.labels.contains(label)
    }

    fn leq(&self, a: &Label, b: &Label) -> bool {
        self.below.contains(&(a.clone(), b.clone()))
    }
}

/// Spot-checks reflexivity and transitivity on `labels`, returning a failing
/// triple `(a, b, c)` (with `a = b = c` for a reflexivity failure).
pub fn check_quasi_order(q: &dyn QuasiOrder, labels: &[Label]) -> Option<(Label, Label, Label)> {
    for a in labels {
        if !q.leq(a, a) {
            return Some((a.clone(), a.clone(), a.clone()));
        }
    }
    for a in labels {
        for b in labels.iter().filter(|b| q.leq(a, b)) {
            for c in labels.iter().filter(|c| q.leq(b, c)) {
                if !q.leq(a, c) {
                    return Some((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    None
}

/// Unlabelled edges sit below every label; a labelled edge never maps onto an
/// unlabelled one.
fn label_leq(q: &dyn QuasiOrder, a: Option<&Label>, b: Option<&Label>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => q.leq(a, b),
    }
}

/// A multigraph with a root set and optional vertex colours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRootedGraph {
    pub graph: Multigraph,
    pub roots: VertexSet,
    pub colors: Option<Vec<u32>>,
}

impl LabeledRootedGraph {
    pub fn plain(graph: Multigraph) -> Self {
        LabeledRootedGraph { graph, roots: VertexSet::EMPTY, colors: None }
    }

    pub fn new(graph: Multigraph, roots: VertexSet, colors: Option<Vec<u32>>) -> Result<Self> {
        if let Some(v) = roots.difference(graph.all_vertices()).first() {
            return Err(Error::VertexOutOfRange(v));
        }
        if let Some(c) = &colors {
            if c.len() != graph.vertex_count() {
                return Err(Error::Malformed(format!(
                    "{} colours for {} vertices",
                    c.len(),
                    graph.vertex_count()
                )));
            }
        }
        Ok(LabeledRootedGraph { graph, roots, colors })
    }

    fn color(&self, v: usize) -> Option<u32> {
        self.colors.as_ref().map(|c| c[v])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Subgraph,
    Induced,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subgraph" => Ok(Mode::Subgraph),
            "induced" => Ok(Mode::Induced),
            _ => Err(Error::Malformed(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Subgraph => "subgraph",
            Mode::Induced => "induced",
        })
    }
}

/// Which side structures an embedding must respect.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Respect {
    pub roots: bool,
    pub colors: bool,
    pub labels: bool,
}

impl Respect {
    pub const NONE: Respect = Respect { roots: false, colors: false, labels: false };
    pub const ALL: Respect = Respect { roots: true, colors: true, labels: true };
}

impl FromStr for Respect {
    type Err = Error;

    /// Comma-separated subset of `roots`, `colors`, `labels`; empty means none.
    fn from_str(s: &str) -> Result<Self> {
        let mut r = Respect::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "roots" => r.roots = true,
                "colors" | "colours" => r.colors = true,
                "labels" => r.labels = true,
                _ => return Err(Error::Malformed(format!("unknown respect flag {part:?}"))),
            }
        }
        Ok(r)
    }
}

/// Injective vertex and edge maps from `x` into `y`, indexed by `x` vertex
/// and `x` edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

impl Embedding {
    pub fn identity(g: &Multigraph) -> Self {
        Embedding { vertex_map: (0..g.vertex_count()).collect(), edge_map: (0..g.edge_count()).collect() }
    }

    /// `self` followed by `then`.
    pub fn compose(&self, then: &Embedding) -> Embedding {
        Embedding {
            vertex_map: self.vertex_map.iter().map(|&v| then.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|&e| then.edge_map[e]).collect(),
        }
    }
}

/// Maximum bipartite matching saturating the left side, if one exists.
/// Returns the right partner of each left vertex.
fn saturating_matching(left: usize, right: usize, ok: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    if left > right {
        return None;
    }
    let mut owner: Vec<Option<usize>> = vec![None; right];
    fn augment(
        i: usize,
        right: usize,
        ok: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..right {
            if ok(i, j) && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, right, ok, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..left {
        let mut seen = vec![false; right];
        if !augment(i, right, &ok, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut partner = vec![0; left];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            partner[*i] = j;
        }
    }
    Some(partner)
}

/// Whether the multiset `a` injects into `b` with every element mapped to one
/// at least as large.
pub fn multiset_dominates(a: &[Label], b: &[Label], q: &dyn QuasiOrder) -> bool {
    saturating_matching(a.len(), b.len(), |i, j| q.leq(&a[i], &b[j])).is_some()
}

struct Search<'a> {
    x: &'a LabeledRootedGraph,
    y: &'a LabeledRootedGraph,
    mode: Mode,
    respect: Respect,
    q: &'a dyn QuasiOrder,
    order: Vec<usize>,
    candidates: Vec<usize>,
    x_pairs: Vec<Vec<Vec<usize>>>,
    y_pairs: Vec<Vec<Vec<usize>>>,
    x_degree: Vec<usize>,
    y_degree: Vec<usize>,
}

fn pair_table(g: &Multigraph) -> Vec<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    let mut t = vec![vec![Vec::new(); n]; n];
    for (i, e) in g.edges().iter().enumerate() {
        let (a, b) = e.ends;
        t[a][b].push(i);
        if a != b {
            t[b][a].push(i);
        }
    }
    t
}

impl Search<'_> {
    /// Edge assignment for the x-pair `(a, c)` onto the y-pair `(b, d)`.
    fn pair_map(&self, a: usize, c: usize, b: usize, d: usize) -> Option<Vec<usize>> {
        let ex = &self.x_pairs[a][c];
        let ey = &self.y_pairs[b][d];
        let counts_ok = match self.mode {
            Mode::Subgraph => ex.len() <= ey.len(),
            Mode::Induced => ex.len() == ey.len(),
        };
        if !counts_ok {
            return None;
        }
        let partner = if self.respect.labels {
            let (xg, yg) = (&self.x.graph, &self.y.graph);
            saturating_matching(ex.len(), ey.len(), |i, j| {
                label_leq(self.q, xg.edge(ex[i]).label.as_ref(), yg.edge(ey[j]).label.as_ref())
            })?
        } else {
            (0..ex.len()).collect()
        };
        Some(partner.into_iter().map(|j| ey[j]).collect())
    }

    fn vertex_ok(&self, a: usize, b: usize, map: &[Option<usize>]) -> bool {
        if self.x_degree[a] > self.y_degree[b] {
            return false;
        }
        if self.respect.roots && self.x.roots.contains(a) != self.y.roots.contains(b) {
            return false;
        }
        if self.respect.colors && self.x.color(a) != self.y.color(b) {
            return false;
        }
        if self.pair_map(a, a, b, b).is_none() {
            return false;
        }
        map.iter().enumerate().all(|(c, m)| m.is_none_or(|d| self.pair_map(a, c, b, d).is_some()))
    }

    fn extend(&self, depth: usize, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let a = self.order[depth];
        for &b in &self.candidates {
            if used[b] || !self.vertex_ok(a, b, map) {
                continue;
            }
            map[a] = Some(b);
            used[b] = true;
            if self.extend(depth + 1, map, used) {
                return true;
            }
            map[a] = None;
            used[b] = false;
        }
        false
    }
}

/// Searches for an embedding of `x` into `y`. The search is exhaustive, so
/// `None` means no embedding exists.
pub fn find_embedding(
    x: &LabeledRootedGraph,
    y: &LabeledRootedGraph,
    mode: Mode,
    respect: Respect,
    q: &dyn QuasiOrder,
) -> Result<Option<Embedding>> {
    if respect.labels {
        for e in x.graph.edges().iter().chain(y.graph.edges()) {
            if let Some(l) = &e.label {
                if !q.knows(l) {
                    return Err(Error::UnknownLabel(l.clone()));
                }
            }
        }
    }
    let (nx, ny) = (x.graph.vertex_count(), y.graph.vertex_count());
    if nx > ny || x.graph.edge_count() > y.graph.edge_count() {
        return Ok(None);
    }
    if respect.roots && x.roots.len() != y.roots.len() {
        return Ok(None);
    }

    let x_degree: Vec<usize> = (0..nx).map(|v| x.graph.degree(v)).collect();
    let y_degree: Vec<usize> = (0..ny).map(|v| y.graph.degree(v)).collect();
    let mut order: Vec<usize> = (0..nx).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(x_degree[v]), v));
    let mut candidates: Vec<usize> = (0..ny).collect();
    candidates.sort_by(|&a, &b| (y_degree[a], y.graph.vertex_id(a)).cmp(&(y_degree[b], y.graph.vertex_id(b))));

    let search = Search {
        x,
        y,
        mode,
        respect,
        q,
        order,
        candidates,
        x_pairs: pair_table(&x.graph),
        y_pairs: pair_table(&y.graph),
        x_degree,
        y_degree,
    };
    let mut map = vec![None; nx];
    let mut used = vec![false; ny];
    if !search.extend(0, &mut map, &mut used) {
        return Ok(None);
    }

    let vertex_map: Vec<usize> = map.into_iter().map(|m| m.expect("complete map")).collect();
    let mut edge_map = vec![usize::MAX; x.graph.edge_count()];
    for a in 0..nx {
        for c in a..nx {
            let ex = &search.x_pairs[a][c];
            if ex.is_empty() {
                continue;
            }
            let images = search.pair_map(a, c, vertex_map[a], vertex_map[c]).expect("checked during search");
            for (&e, f) in ex.iter().zip(images) {
                edge_map[e] = f;
            }
        }
    }
    let emb = Embedding { vertex_map, edge_map };
    debug_assert!(is_embedding(x, y, mode, respect, q, &emb));
    Ok(Some(emb))
}

/// Checks every embedding condition for a candidate witness.
pub fn is_embedding(
    x: &LabeledRootedGraph,
    y: &LabeledRootedGraph,
    mode: Mode,
    respect: Respect,
    q: &dyn QuasiOrder,
    emb: &Embedding,
) -> bool {
    let (xg, yg) = (&x.graph, &y.graph);
    if emb.vertex_map.len() != xg.vertex_count() || emb.edge_map.len() != xg.edge_count() {
        return false;
    }
    if emb.vertex_map.iter().any(|&v| v >= yg.vertex_count()) || emb.edge_map.iter().any(|&e| e >= yg.edge_count()) {
        return false;
    }
    let image: VertexSet = emb.vertex_map.iter().copied().collect();
    let edge_image: BTreeSet<usize> = emb.edge_map.iter().copied().collect();
    if image.len() != emb.vertex_map.len() || edge_image.len() != emb.edge_map.len() {
        return false;
    }
    for (i, e) in xg.edges().iter().enumerate() {
        let f = yg.edge(emb.edge_map[i]);
        let (a, b) = (emb.vertex_map[e.ends.0], emb.vertex_map[e.ends.1]);
        if f.key() != (a.min(b), a.max(b)) {
            return false;
        }
        if respect.labels && !label_leq(q, e.label.as_ref(), f.label.as_ref()) {
            return false;
        }
    }
    if mode == Mode::Induced {
        // every host edge between image vertices must be hit
        let covered = yg
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, f)| image.contains(f.ends.0) && image.contains(f.ends.1))
            .all(|(j, _)| edge_image.contains(&j));
        if !covered {
            return false;
        }
    }
    if respect.roots {
        let mapped: VertexSet = x.roots.iter().map(|v| emb.vertex_map[v]).collect();
        if mapped != y.roots {
            return false;
        }
    }
    if respect.colors && (0..xg.vertex_count()).any(|v| x.color(v) != y.color(emb.vertex_map[v])) {
        return false;
    }
    true
}

/// Positions `i < j` (1-based) of a good pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoodPair {
    pub i: usize,
    pub j: usize,
}

/// The first good pair ordered by `(j, i)`, or `None` when no element embeds
/// into a later one.
pub fn good_pair_scan(
    seq: &[LabeledRootedGraph],
    mode: Mode,
    respect: Respect,
    q: &dyn QuasiOrder,
) -> Result<Option<GoodPair>> {
    for j in 1..seq.len() {
        for i in 0..j {
            if find_embedding(&seq[i], &seq[j], mode, respect, q)?.is_some() {
                return Ok(Some(GoodPair { i: i + 1, j: j + 1 }));
            }
        }
    }
    Ok(None)
}
