//! Exhaustive ground truth for small graphs: exact tree-width and
//! tree-diameter, search for short linked minimum-width decompositions, and
//! enumeration of path-free multigraphs up to isomorphism.
//!
//! Decompositions are enumerated through chordal supergraphs. A decomposition
//! is *reduced* when no bag is contained in an adjacent bag. The bags of a
//! reduced decomposition are exactly the maximal cliques of the chordal graph
//! obtained by filling every bag, and its tree is a clique tree of that graph.
//! Walking all chordal supergraphs and all their clique trees therefore visits
//! every reduced decomposition exactly once.

use std::collections::BTreeSet;

use crate::decomp::{is_linked, is_short, TreeDecomposition};
use crate::error::{Error, Result};
use crate::id::Id;
use crate::multigraph::{contains_path, Multigraph};
use crate::set::VertexSet;
use crate::shorten::shorten_pass;

/// Size limits for the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Max vertices for [`brute_treewidth`].
    pub treewidth_n: usize,
    /// Max vertices for decomposition-space searches.
    pub decomposition_n: usize,
    /// Max vertices for [`enumerate_pm_free`].
    pub enumerate_n: usize,
    /// Max multiplicity for [`enumerate_pm_free`].
    pub enumerate_mult: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { treewidth_n: 8, decomposition_n: 6, enumerate_n: 6, enumerate_mult: 2 }
    }
}

fn check_limit(what: &str, got: usize, max: usize) -> Result<()> {
    if got > max {
        return Err(Error::OracleLimit(format!("{what}: {got} exceeds the configured limit {max}")));
    }
    Ok(())
}

fn simple_adjacency(g: &Multigraph) -> Vec<VertexSet> {
    (0..g.vertex_count()).map(|v| g.neighbors(v)).collect()
}

/// Exact tree-width by dynamic programming over elimination orderings.
///
/// `tw(S)` is the best width achievable when the vertices of `S` are
/// eliminated first; eliminating `v` after `S` creates a clique on the
/// vertices outside `S ∪ {v}` reachable from `v` through `S`.
pub fn brute_treewidth(g: &Multigraph, limits: &OracleLimits) -> Result<usize> {
    let n = g.vertex_count();
    check_limit("tree-width oracle vertices", n, limits.treewidth_n.min(24))?;
    if n == 0 {
        return Ok(0);
    }
    let adj = simple_adjacency(g);
    let full = 1usize << n;
    let mut best = vec![usize::MAX; full];
    // widths are stored shifted by one so the empty prefix can be 0
    best[0] = 0;
    for s in 1..full {
        let set = VertexSet::from_bits(s as u64);
        for v in set {
            let rest = set.without(v);
            let q = reach_through(&adj, v, rest).len();
            let w = best[rest.bits() as usize].max(q + 1);
            best[s] = best[s].min(w);
        }
    }
    Ok(best[full - 1] - 1)
}

/// Vertices outside `through ∪ {v}` reachable from `v` by paths whose
/// interior lies in `through`.
fn reach_through(adj: &[VertexSet], v: usize, through: VertexSet) -> VertexSet {
    let mut seen = VertexSet::singleton(v);
    let mut out = VertexSet::EMPTY;
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for y in adj[x].difference(seen) {
            seen.insert(y);
            if through.contains(y) {
                stack.push(y);
            } else {
                out.insert(y);
            }
        }
    }
    out
}

/// A perfect elimination ordering, or `None` when the graph is not chordal.
pub fn perfect_elimination_order(adj: &[VertexSet]) -> Option<Vec<usize>> {
    let n = adj.len();
    // maximum cardinality search, reversed
    let mut weight = vec![0usize; n];
    let mut numbered = VertexSet::EMPTY;
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !numbered.contains(v)).max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))?;
        numbered.insert(v);
        order.push(v);
        for w in adj[v].difference(numbered) {
            weight[w] += 1;
        }
    }
    order.reverse();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in &order {
        let later: VertexSet = adj[v].iter().filter(|&w| pos[w] > pos[v]).collect();
        if let Some(p) = later.iter().min_by_key(|&w| pos[w]) {
            if !later.without(p).is_subset(adj[p]) {
                return None;
            }
        }
    }
    Some(order)
}

/// Maximal cliques of a chordal graph given a perfect elimination ordering,
/// in set order.
pub fn chordal_maximal_cliques(adj: &[VertexSet], peo: &[usize]) -> Vec<VertexSet> {
    let mut pos = vec![0; adj.len()];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    let candidates: BTreeSet<VertexSet> = peo
        .iter()
        .map(|&v| adj[v].iter().filter(|&w| pos[w] > pos[v]).collect::<VertexSet>().with(v))
        .collect();
    candidates.iter().copied().filter(|c| !candidates.iter().any(|d| c.is_proper_subset(*d))).collect()
}

/// All reduced decompositions of a host graph, optionally restricted to a
/// maximum width.
#[derive(Clone, Debug)]
pub struct DecompositionSpace<'g> {
    host: &'g Multigraph,
    max_nodes: usize,
    max_width: Option<usize>,
}

impl<'g> DecompositionSpace<'g> {
    pub fn new(host: &'g Multigraph, limits: &OracleLimits) -> Result<Self> {
        // non-edge subsets are indexed by a u64 mask
        check_limit("decomposition search vertices", host.vertex_count(), limits.decomposition_n.min(11))?;
        Ok(DecompositionSpace { host, max_nodes: host.vertex_count().max(1), max_width: None })
    }

    pub fn with_max_width(mut self, width: usize) -> Self {
        self.max_width = Some(width);
        self
    }

    pub fn with_max_nodes(mut self, nodes: usize) -> Self {
        self.max_nodes = nodes;
        self
    }

    pub fn iter(&self) -> SpaceIter<'g> {
        let adj = simple_adjacency(self.host);
        let n = adj.len();
        let mut non_edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !adj[u].contains(v) {
                    non_edges.push((u, v));
                }
            }
        }
        SpaceIter {
            adj,
            end: 1u64 << non_edges.len(),
            non_edges,
            next_mask: 0,
            max_nodes: self.max_nodes,
            max_width: self.max_width,
            trees: None,
            null_pending: n == 0,
            _host: std::marker::PhantomData,
        }
    }
}

impl<'g> IntoIterator for &DecompositionSpace<'g> {
    type Item = TreeDecomposition;
    type IntoIter = SpaceIter<'g>;

    fn into_iter(self) -> SpaceIter<'g> {
        self.iter()
    }
}

pub struct SpaceIter<'g> {
    adj: Vec<VertexSet>,
    non_edges: Vec<(usize, usize)>,
    next_mask: u64,
    end: u64,
    max_nodes: usize,
    max_width: Option<usize>,
    trees: Option<CliqueTrees>,
    null_pending: bool,
    _host: std::marker::PhantomData<&'g Multigraph>,
}

impl SpaceIter<'_> {
    /// Maximal cliques of the next admissible chordal supergraph.
    fn next_cliques(&mut self) -> Option<Vec<VertexSet>> {
        while self.next_mask < self.end {
            let mask = self.next_mask;
            self.next_mask += 1;
            let mut adj = self.adj.clone();
            for (i, &(u, v)) in self.non_edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
            let Some(peo) = perfect_elimination_order(&adj) else {
                continue;
            };
            let cliques = chordal_maximal_cliques(&adj, &peo);
            if cliques.len() > self.max_nodes {
                continue;
            }
            if let Some(w) = self.max_width {
                if cliques.iter().any(|c| c.len() > w + 1) {
                    continue;
                }
            }
            return Some(cliques);
        }
        None
    }
}

impl Iterator for SpaceIter<'_> {
    type Item = TreeDecomposition;

    fn next(&mut self) -> Option<TreeDecomposition> {
        if self.null_pending {
            self.null_pending = false;
            self.next_mask = self.end;
            return Some(TreeDecomposition::single(VertexSet::EMPTY));
        }
        loop {
            if let Some(trees) = &mut self.trees {
                if let Some(d) = trees.next() {
                    return Some(d);
                }
            }
            let cliques = self.next_cliques()?;
            self.trees = Some(CliqueTrees::new(cliques));
        }
    }
}

/// Labeled trees on a fixed clique list that satisfy the running
/// intersection property, enumerated through Prüfer sequences.
struct CliqueTrees {
    cliques: Vec<VertexSet>,
    target: usize,
    code: Vec<usize>,
    exhausted: bool,
}

impl CliqueTrees {
    fn new(cliques: Vec<VertexSet>) -> Self {
        // a spanning tree satisfies running intersection iff its total
        // adhesion size reaches sum over vertices of (occurrences - 1)
        let union = cliques.iter().fold(VertexSet::EMPTY, |a, &c| a.union(c));
        let target = union.iter().map(|v| cliques.iter().filter(|c| c.contains(v)).count() - 1).sum();
        let code = vec![0; cliques.len().saturating_sub(2)];
        CliqueTrees { cliques, target, code, exhausted: false }
    }

    fn advance(&mut self) {
        let n = self.cliques.len();
        for digit in self.code.iter_mut().rev() {
            *digit += 1;
            if *digit < n {
                return;
            }
            *digit = 0;
        }
        self.exhausted = true;
    }
}

impl Iterator for CliqueTrees {
    type Item = TreeDecomposition;

    fn next(&mut self) -> Option<TreeDecomposition> {
        let n = self.cliques.len();
        while !self.exhausted {
            let edges = if n == 1 { Vec::new() } else { prufer_decode(&self.code, n) };
            self.advance();
            let weight: usize = edges.iter().map(|&(a, b)| self.cliques[a].intersection(self.cliques[b]).len()).sum();
            if weight == self.target {
                let nodes = (0..n).map(Id::from).collect();
                return Some(TreeDecomposition::new(nodes, self.cliques.clone(), edges).expect("clique tree"));
            }
        }
        None
    }
}

fn prufer_decode(code: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("Prüfer leaf");
        edges.push((leaf.min(c), leaf.max(c)));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Exact tree-diameter: the least tree diameter among decompositions of
/// minimum width.
pub fn brute_tree_diameter(g: &Multigraph, limits: &OracleLimits) -> Result<usize> {
    check_limit("tree-diameter oracle vertices", g.vertex_count(), limits.decomposition_n)?;
    let tw = brute_treewidth(g, &OracleLimits { treewidth_n: limits.treewidth_n.max(g.vertex_count()), ..*limits })?;
    let space = DecompositionSpace::new(g, limits)?.with_max_width(tw);
    let mut best: Option<usize> = None;
    for d in &space {
        let diam = d.diameter();
        if best.is_none_or(|b| diam < b) {
            best = Some(diam);
            if diam == 0 {
                break;
            }
        }
    }
    best.ok_or_else(|| Error::LemmaViolation(format!("no decomposition of width {tw} found")))
}

/// Searches the reduced decompositions of minimum width for one that, after
/// shortening, is both short and linked.
pub fn find_short_linked_minwidth(g: &Multigraph, limits: &OracleLimits) -> Result<TreeDecomposition> {
    check_limit("decomposition search vertices", g.vertex_count(), limits.decomposition_n)?;
    let tw = brute_treewidth(g, &OracleLimits { treewidth_n: limits.treewidth_n.max(g.vertex_count()), ..*limits })?;
    let space = DecompositionSpace::new(g, limits)?.with_max_width(tw);
    for d in &space {
        let s = shorten_pass(g, &d)?;
        if is_short(&s) && is_linked(g, &s) {
            return Ok(s);
        }
    }
    Err(Error::LemmaViolation(format!("no short linked decomposition of width {tw} found")))
}

/// Canonical code of a multigraph: the lexicographically least encoding over
/// all vertex orderings of (loop counts, then pair multiplicities for
/// `i < j`). Two graphs are isomorphic iff their codes agree.
pub fn canonical_code(g: &Multigraph) -> Vec<u8> {
    let n = g.vertex_count();
    let (loops, mult) = counts(g);
    let mut best: Option<Vec<u8>> = None;
    for_each_permutation(n, |perm| {
        let code = encode(perm, &loops, &mult);
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    });
    best.unwrap_or_default()
}

fn counts(g: &Multigraph) -> (Vec<u8>, Vec<Vec<u8>>) {
    let n = g.vertex_count();
    let mut loops = vec![0u8; n];
    let mut mult = vec![vec![0u8; n]; n];
    for e in g.edges() {
        let (a, b) = e.ends;
        if a == b {
            loops[a] += 1;
        } else {
            mult[a][b] += 1;
            mult[b][a] += 1;
        }
    }
    (loops, mult)
}

fn encode(perm: &[usize], loops: &[u8], mult: &[Vec<u8>]) -> Vec<u8> {
    let n = perm.len();
    let mut code = Vec::with_capacity(n + n * (n.saturating_sub(1)) / 2 + 1);
    code.push(n as u8);
    code.extend(perm.iter().map(|&v| loops[v]));
    for i in 0..n {
        for j in i + 1..n {
            code.push(mult[perm[i]][perm[j]]);
        }
    }
    code
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Builds the multigraph with vertices `0..n` from loop counts and pair
/// multiplicities; loops come first, then pairs in `(i, j)` order.
fn from_counts(n: usize, loops: &[u8], mult: &[Vec<u8>]) -> Result<Multigraph> {
    let mut g = Multigraph::with_vertices(n)?;
    for v in 0..n {
        for _ in 0..loops[v] {
            g.add_auto_edge(v, v)?;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for _ in 0..mult[i][j] {
                g.add_auto_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// All multigraphs up to isomorphism with `1..=n_max` vertices, pair
/// multiplicities at most `mult_max`, at most one loop per vertex, and no
/// path with `m` edges.
///
/// Graphs come ordered by vertex count, then by underlying simple graph, then
/// by canonical code. Vertex and edge ids are `0..`.
pub fn enumerate_pm_free(n_max: usize, mult_max: usize, m: usize, limits: &OracleLimits) -> Result<Vec<Multigraph>> {
    check_limit("enumeration vertices", n_max, limits.enumerate_n)?;
    check_limit("enumeration multiplicity", mult_max, limits.enumerate_mult)?;
    let mut out = Vec::new();
    for n in 1..=n_max {
        for simple in simple_graph_classes(n)? {
            if contains_path(&simple, m)? {
                continue;
            }
            let pairs: Vec<(usize, usize)> = simple.edges().iter().map(|e| e.key()).collect();
            if mult_max == 0 && !pairs.is_empty() {
                continue;
            }
            let base = mult_max.max(1) as u64;
            let choices = base.pow(pairs.len() as u32);
            let autos = automorphisms(&simple);
            let mut seen = BTreeSet::new();
            for loop_mask in 0..1u64 << n {
                for choice in 0..choices {
                    let loops: Vec<u8> = (0..n).map(|v| (loop_mask >> v & 1) as u8).collect();
                    let mut mult = vec![vec![0u8; n]; n];
                    let mut rest = choice;
                    for &(a, b) in &pairs {
                        let k = (rest % base) as u8 + 1;
                        rest /= base;
                        mult[a][b] = k;
                        mult[b][a] = k;
                    }
                    seen.insert(autos.iter().map(|p| encode(p, &loops, &mult)).min().expect("identity"));
                }
            }
            for code in seen {
                let (loops, mult) = decode(n, &code);
                out.push(from_counts(n, &loops, &mult)?);
            }
        }
    }
    Ok(out)
}

fn decode(n: usize, code: &[u8]) -> (Vec<u8>, Vec<Vec<u8>>) {
    let loops = code[1..=n].to_vec();
    let mut mult = vec![vec![0u8; n]; n];
    let mut k = n + 1;
    for i in 0..n {
        for j in i + 1..n {
            mult[i][j] = code[k];
            mult[j][i] = code[k];
            k += 1;
        }
    }
    (loops, mult)
}

/// Representatives of the simple graphs on `n` vertices, one per isomorphism
/// class, ordered by canonical code.
fn simple_graph_classes(n: usize) -> Result<Vec<Multigraph>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut classes = BTreeSet::new();
    for mask in 0..1u64 << pairs.len() {
        let mut g = Multigraph::with_vertices(n)?;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.add_auto_edge(a, b)?;
            }
        }
        classes.insert(canonical_code(&g));
    }
    classes
        .into_iter()
        .map(|code| {
            let (loops, mult) = decode(n, &code);
            from_counts(n, &loops, &mult)
        })
        .collect()
}

/// Vertex permutations preserving the loop counts and multiplicities of `g`.
pub fn automorphisms(g: &Multigraph) -> Vec<Vec<usize>> {
    let (loops, mult) = counts(g);
    let identity: Vec<usize> = (0..g.vertex_count()).collect();
    let reference = encode(&identity, &loops, &mult);
    let mut out = Vec::new();
    for_each_permutation(g.vertex_count(), |perm| {
        if encode(perm, &loops, &mult) == reference {
            out.push(perm.to_vec());
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::validate;
    use crate::families::{cycle, dipole, path, star};

    fn complete(n: usize) -> Multigraph {
        let mut g = Multigraph::with_vertices(n).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                g.add_auto_edge(a, b).unwrap();
            }
        }
        g
    }

    #[test]
    fn treewidth_examples() {
        let lim = OracleLimits::default();
        assert_eq!(brute_treewidth(&path(4).unwrap(), &lim).unwrap(), 1);
        assert_eq!(brute_treewidth(&star(5).unwrap(), &lim).unwrap(), 1);
        assert_eq!(brute_treewidth(&complete(4), &lim).unwrap(), 3);
        assert_eq!(brute_treewidth(&cycle(5).unwrap(), &lim).unwrap(), 2);
        assert_eq!(brute_treewidth(&dipole(4).unwrap(), &lim).unwrap(), 1);
        assert_eq!(brute_treewidth(&Multigraph::with_vertices(3).unwrap(), &lim).unwrap(), 0);
        assert!(matches!(brute_treewidth(&path(9).unwrap(), &lim), Err(Error::OracleLimit(_))));
    }

    #[test]
    fn chordality() {
        let adj = |g: &Multigraph| simple_adjacency(g);
        assert!(perfect_elimination_order(&adj(&cycle(4).unwrap())).is_none());
        assert!(perfect_elimination_order(&adj(&cycle(3).unwrap())).is_some());
        let g = star(3).unwrap();
        let peo = perfect_elimination_order(&adj(&g)).unwrap();
        assert_eq!(chordal_maximal_cliques(&adj(&g), &peo).len(), 3);
    }

    #[test]
    fn tree_diameter_examples() {
        let lim = OracleLimits::default();
        assert_eq!(brute_tree_diameter(&star(4).unwrap(), &lim).unwrap(), 2);
        assert_eq!(brute_tree_diameter(&path(3).unwrap(), &lim).unwrap(), 2);
        assert_eq!(brute_tree_diameter(&path(1).unwrap(), &lim).unwrap(), 0);
        assert_eq!(brute_tree_diameter(&path(2).unwrap(), &lim).unwrap(), 1);
    }

    #[test]
    fn space_members_validate() {
        let lim = OracleLimits::default();
        for g in [cycle(4).unwrap(), star(3).unwrap(), path(3).unwrap(), Multigraph::with_vertices(3).unwrap()] {
            let mut count = 0;
            for d in &DecompositionSpace::new(&g, &lim).unwrap() {
                assert_eq!(validate(&g, &d), Ok(()));
                assert!(d.node_count() <= g.vertex_count());
                count += 1;
            }
            assert!(count > 0);
        }
    }

    #[test]
    fn short_linked_examples() {
        let lim = OracleLimits::default();
        let s = find_short_linked_minwidth(&star(4).unwrap(), &lim).unwrap();
        assert_eq!(s.width(), 1);
        assert_eq!(s.node_count(), 4);
        assert_eq!(s.diameter(), 2);
        let mut bags = s.bags().to_vec();
        bags.sort();
        let expected: Vec<VertexSet> = (1..=4).map(|i| VertexSet::singleton(0).with(i)).collect();
        assert_eq!(bags, expected);

        let one = find_short_linked_minwidth(&Multigraph::with_vertices(1).unwrap(), &lim).unwrap();
        assert_eq!(one.node_count(), 1);

        let d = find_short_linked_minwidth(&dipole(3).unwrap(), &lim).unwrap();
        assert_eq!(d.node_count(), 1);
        assert_eq!(d.bag(0).len(), 2);
    }

    #[test]
    fn enumeration_examples() {
        let lim = OracleLimits::default();
        let graphs = enumerate_pm_free(2, 3, 2, &OracleLimits { enumerate_mult: 3, ..lim }).unwrap();
        assert!(graphs.iter().any(|g| canonical_code(g) == canonical_code(&dipole(3).unwrap())));

        for g in enumerate_pm_free(3, 1, 1, &lim).unwrap() {
            assert!(g.edges().iter().all(|e| e.is_loop()));
        }
        assert!(matches!(enumerate_pm_free(7, 1, 3, &lim), Err(Error::OracleLimit(_))));
    }

    #[test]
    fn canonical_codes_identify_isomorphic_graphs() {
        let mut a = Multigraph::with_vertices(3).unwrap();
        a.add_auto_edge(0, 1).unwrap();
        a.add_auto_edge(0, 1).unwrap();
        a.add_auto_edge(2, 2).unwrap();
        let mut b = Multigraph::with_vertices(3).unwrap();
        b.add_auto_edge(1, 1).unwrap();
        b.add_auto_edge(2, 0).unwrap();
        b.add_auto_edge(0, 2).unwrap();
        assert_eq!(canonical_code(&a), canonical_code(&b));
        assert_ne!(canonical_code(&a), canonical_code(&path(2).unwrap()));
        assert_eq!(automorphisms(&cycle(4).unwrap()).len(), 8);
    }
}
