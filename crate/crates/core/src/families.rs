//! Deterministic generators for the named graph families and for random
//! path-free instances and random valid decompositions.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::TreeDecomposition;
use crate::error::{Error, Result};
use crate::id::Id;
use crate::multigraph::{contains_path, Multigraph};
use crate::set::VertexSet;

/// Attempts made by [`random_pm_free`] before giving up.
pub const REJECTION_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// Path with `m` edges.
    Path { m: usize },
    /// Cycle on `n` vertices; `n = 1` is a loop and `n = 2` a 2-dipole.
    Cycle { n: usize },
    /// Center 0 with leaves `1..=leaves`.
    Star { leaves: usize },
    Dipole { t: usize },
    /// Path with `m` edges, every edge doubled.
    RobertsonChain { m: usize },
    DisjointUnion(Vec<FamilySpec>),
    RandomPmFree { n: usize, mult_max: usize, m: usize, seed: u64 },
}

pub fn generate(spec: &FamilySpec) -> Result<Multigraph> {
    match *spec {
        FamilySpec::Path { m } => path(m),
        FamilySpec::Cycle { n } => cycle(n),
        FamilySpec::Star { leaves } => star(leaves),
        FamilySpec::Dipole { t } => dipole(t),
        FamilySpec::RobertsonChain { m } => robertson_chain(m),
        FamilySpec::RandomPmFree { n, mult_max, m, seed } => random_pm_free(n, mult_max, m, seed),
        FamilySpec::DisjointUnion(ref parts) => {
            let graphs = parts.iter().map(generate).collect::<Result<Vec<_>>>()?;
            relabeled_union(&graphs)
        }
    }
}

pub fn path(m: usize) -> Result<Multigraph> {
    let mut g = Multigraph::with_vertices(m + 1)?;
    for i in 0..m {
        g.add_auto_edge(i, i + 1)?;
    }
    Ok(g)
}

pub fn cycle(n: usize) -> Result<Multigraph> {
    if n == 0 {
        return Err(Error::InvalidFamily("cycle length must be at least 1".into()));
    }
    let mut g = Multigraph::with_vertices(n)?;
    for i in 0..n {
        g.add_auto_edge(i, (i + 1) % n)?;
    }
    Ok(g)
}

pub fn star(leaves: usize) -> Result<Multigraph> {
    let mut g = Multigraph::with_vertices(leaves + 1)?;
    for i in 1..=leaves {
        g.add_auto_edge(0, i)?;
    }
    Ok(g)
}

pub fn dipole(t: usize) -> Result<Multigraph> {
    if t == 0 {
        return Err(Error::InvalidFamily("dipole needs at least one edge".into()));
    }
    let mut g = Multigraph::with_vertices(2)?;
    for _ in 0..t {
        g.add_auto_edge(0, 1)?;
    }
    Ok(g)
}

pub fn robertson_chain(m: usize) -> Result<Multigraph> {
    let mut g = Multigraph::with_vertices(m + 1)?;
    for i in 0..m {
        g.add_auto_edge(i, i + 1)?;
        g.add_auto_edge(i, i + 1)?;
    }
    Ok(g)
}

/// Disjoint union with vertices and edges renumbered `0..` in input order.
pub fn relabeled_union(parts: &[Multigraph]) -> Result<Multigraph> {
    let total = parts.iter().map(|g| g.vertex_count()).sum();
    let mut out = Multigraph::with_vertices(total)?;
    let mut offset = 0;
    for g in parts {
        for e in g.edges() {
            let id = Id::from(out.edge_count());
            out.add_edge(id, e.ends.0 + offset, e.ends.1 + offset, e.label.clone())?;
        }
        offset += g.vertex_count();
    }
    Ok(out)
}

/// The star with center 0 and leaves `1..=m`, decomposed along a path of
/// nodes `v_1, ..., v_m` (node ids `1..=m`) with bags `{0, i}`.
pub fn star_path_decomposition(m: usize) -> Result<(Multigraph, TreeDecomposition)> {
    if m < 3 {
        return Err(Error::InvalidFamily(format!("star decomposition needs m >= 3, got {m}")));
    }
    let g = star(m)?;
    let nodes = (1..=m).map(Id::from).collect();
    let bags = (1..=m).map(|i| VertexSet::singleton(0).with(i)).collect();
    let edges = (0..m - 1).map(|i| (i, i + 1)).collect();
    Ok((g, TreeDecomposition::new(nodes, bags, edges)?))
}

/// Rejection-samples a graph on `n` vertices with multiplicities at most
/// `mult_max`, at most one loop per vertex, and no path with `m` edges.
pub fn random_pm_free(n: usize, mult_max: usize, m: usize, seed: u64) -> Result<Multigraph> {
    if n == 0 {
        return Err(Error::InvalidFamily("random graphs need at least one vertex".into()));
    }
    if m == 0 {
        return Err(Error::InvalidFamily("every nonnull graph contains P_0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_edge = (2.0 / n as f64).min(0.5);
    for _ in 0..REJECTION_BUDGET {
        let g = random_multigraph(&mut rng, n, mult_max, p_edge)?;
        if !contains_path(&g, m)? {
            return Ok(g);
        }
    }
    Err(Error::RejectionBudget { budget: REJECTION_BUDGET, n, mult: mult_max, m })
}

/// Each vertex pair gets `1..=mult_max` parallel edges with probability
/// `p_edge`; each vertex gets a loop with probability 1/2.
pub fn random_multigraph<R: Rng>(rng: &mut R, n: usize, mult_max: usize, p_edge: f64) -> Result<Multigraph> {
    let mut g = Multigraph::with_vertices(n)?;
    for v in 0..n {
        if rng.gen_bool(0.5) {
            g.add_auto_edge(v, v)?;
        }
    }
    if mult_max > 0 {
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p_edge) {
                    for _ in 0..rng.gen_range(1..=mult_max) {
                        g.add_auto_edge(u, v)?;
                    }
                }
            }
        }
    }
    Ok(g)
}

/// A random valid decomposition of `g`: an elimination-order decomposition
/// grown by `extra` random leaf attachments and edge subdivisions.
/// Node ids are `0..`.
pub fn random_decomposition<R: Rng>(g: &Multigraph, rng: &mut R, extra: usize) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition::single(VertexSet::EMPTY);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut rank = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut fill: Vec<VertexSet> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut bags = vec![VertexSet::EMPTY; n];
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for &v in &order {
        let later: VertexSet = fill[v].iter().filter(|&w| rank[w] > rank[v]).collect();
        for a in later {
            fill[a] = fill[a].union(later.without(a));
        }
        bags[v] = later.with(v);
        match later.iter().min_by_key(|&w| rank[w]) {
            Some(parent) => edges.push((v, parent)),
            None => roots.push(v),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }

    for _ in 0..extra {
        let x = rng.gen_range(0..bags.len());
        let fresh = bags.len();
        if edges.is_empty() || rng.gen_bool(0.5) {
            // leaf whose bag is a subset of its neighbour's
            let bag = random_subset(rng, bags[x], VertexSet::EMPTY);
            bags.push(bag);
            edges.push((x, fresh));
        } else {
            let i = rng.gen_range(0..edges.len());
            let (a, b) = edges[i];
            let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            let bag = random_subset(rng, bags[a], bags[a].intersection(bags[b]));
            bags.push(bag);
            edges[i] = (a, fresh);
            edges.push((fresh, b));
        }
    }
    let nodes = (0..bags.len()).map(Id::from).collect();
    TreeDecomposition::new(nodes, bags, edges).expect("consistent node count")
}

/// `base ∪ S` for a random `S ⊆ of`, biased towards keeping the whole of `of`.
fn random_subset<R: Rng>(rng: &mut R, of: VertexSet, base: VertexSet) -> VertexSet {
    if rng.gen_bool(0.4) {
        return of;
    }
    of.iter().filter(|_| rng.gen_bool(0.5)).collect::<VertexSet>().union(base)
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Path { m } => write!(f, "path:{m}"),
            FamilySpec::Cycle { n } => write!(f, "cycle:{n}"),
            FamilySpec::Star { leaves } => write!(f, "star:{leaves}"),
            FamilySpec::Dipole { t } => write!(f, "dipole:{t}"),
            FamilySpec::RobertsonChain { m } => write!(f, "robertson:{m}"),
            FamilySpec::RandomPmFree { n, mult_max, m, seed } => write!(f, "random:{n},{mult_max},{m},{seed}"),
            FamilySpec::DisjointUnion(parts) => {
                let parts: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                f.write_str(&parts.join("+"))
            }
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses `path:3`, `cycle:5`, `star:4`, `dipole:2`, `robertson:2`,
    /// `random:n,mult,m,seed`, and `+`-joined unions such as `path:1+path:1`.
    fn from_str(s: &str) -> Result<Self> {
        if s.contains('+') {
            let parts = s.split('+').map(str::parse).collect::<Result<Vec<_>>>()?;
            return Ok(FamilySpec::DisjointUnion(parts));
        }
        let bad = || Error::InvalidFamily(format!("cannot parse family spec {s:?}"));
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let nums = args
            .split(',')
            .map(|a| a.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let one = || if nums.len() == 1 { Ok(nums[0] as usize) } else { Err(bad()) };
        match name.trim() {
            "path" => Ok(FamilySpec::Path { m: one()? }),
            "cycle" => Ok(FamilySpec::Cycle { n: one()? }),
            "star" => Ok(FamilySpec::Star { leaves: one()? }),
            "dipole" => Ok(FamilySpec::Dipole { t: one()? }),
            "robertson" | "robertson_chain" | "robertson-chain" => Ok(FamilySpec::RobertsonChain { m: one()? }),
            "random" | "random_pm_free" | "random-pm-free" => match nums[..] {
                [n, mult_max, m, seed] => {
                    Ok(FamilySpec::RandomPmFree { n: n as usize, mult_max: mult_max as usize, m: m as usize, seed })
                }
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::validate;
    use crate::multigraph::longest_path_length;

    #[test]
    fn dipole_shape() {
        let g = dipole(3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 3));
        assert_eq!(g.multiplicity(0, 1), 3);
    }

    #[test]
    fn robertson_chain_shape() {
        let g = robertson_chain(2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 4));
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.multiplicity(1, 2), 2);
        for m in 0..6 {
            assert_eq!(longest_path_length(&robertson_chain(m).unwrap()).unwrap(), m);
        }
    }

    #[test]
    fn star_shape() {
        let g = star(4).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.degree(0)), (5, 4, 4));
    }

    #[test]
    fn dipoles_have_no_two_edge_path() {
        for t in 1..10 {
            assert_eq!(longest_path_length(&dipole(t).unwrap()).unwrap(), 1);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(cycle(0).is_err());
        assert!(dipole(0).is_err());
        assert!(star_path_decomposition(2).is_err());
        assert!(random_pm_free(0, 1, 1, 0).is_err());
        assert!("cube:3".parse::<FamilySpec>().is_err());
        assert!("random:1,2".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn star_decomposition_layout() {
        let (g, d) = star_path_decomposition(3).unwrap();
        assert_eq!(d.node_ids(), &[Id::from(1), Id::from(2), Id::from(3)]);
        let expected: Vec<VertexSet> = (1..=3).map(|i| VertexSet::singleton(0).with(i)).collect();
        assert_eq!(d.bags(), &expected[..]);
        assert_eq!(d.width(), 1);
        assert_eq!(validate(&g, &d), Ok(()));
        assert_eq!(star_path_decomposition(4).unwrap().1.diameter(), 3);
    }

    #[test]
    fn random_pm_free_is_deterministic_and_path_free() {
        let g = random_pm_free(1, 1, 1, 9).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert!(g.edges().iter().all(|e| e.is_loop()));
        for seed in 0..20 {
            let a = random_pm_free(6, 2, 3, seed).unwrap();
            assert_eq!(a, random_pm_free(6, 2, 3, seed).unwrap());
            assert!(!contains_path(&a, 3).unwrap());
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["path:3", "cycle:5", "star:4", "dipole:2", "robertson:2", "random:5,2,3,11", "path:1+path:1"] {
            let spec: FamilySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let g = generate(&"path:1+path:1".parse().unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 2));
    }

    #[test]
    fn random_decompositions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(0..7);
            let g = random_multigraph(&mut rng, n, 2, 0.4).unwrap();
            let extra = rng.gen_range(0..8);
            let d = random_decomposition(&g, &mut rng, extra);
            assert_eq!(validate(&g, &d), Ok(()), "{g:?} {d:?}");
        }
    }
}
