//! Diameter reduction for tree-decompositions.
//!
//! For a vertex set `U`, let `E_U` be the tree edges whose adhesion is exactly
//! `U` and `T_U` the smallest subtree containing them. Every edge of `E_U`
//! that misses a center `u` of `T_U` is cut and its far endpoint is hung
//! directly on `u`. Bags never change, so width is preserved, and the
//! separator family between any two nodes stays the same.

use std::collections::BTreeSet;

use crate::decomp::{check_tree_path, validate, TreeDecomposition, TreeEdge};
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::set::VertexSet;

/// The rewiring performed for one target set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewirePlan {
    pub target: VertexSet,
    /// Ids of the tree edges whose adhesion equals `target`.
    pub matching_edges: Vec<u32>,
    /// Nodes of the smallest subtree containing `matching_edges`.
    pub subtree: Vec<usize>,
    pub subtree_diameter: usize,
    pub center: usize,
    pub deletions: Vec<u32>,
    /// New edges `(w, center)`, one per deletion, in the same order.
    pub additions: Vec<(usize, usize)>,
}

impl RewirePlan {
    pub fn is_noop(&self) -> bool {
        self.deletions.is_empty()
    }
}

/// Plans the rewiring for `target`; `None` when no tree edge has that adhesion.
pub fn plan_reduction(d: &TreeDecomposition, target: VertexSet) -> Option<RewirePlan> {
    let matching: Vec<&TreeEdge> = d.tree_edges().iter().filter(|e| d.adhesion(e) == target).collect();
    if matching.is_empty() {
        return None;
    }

    let n = d.node_count();
    let mut keep = vec![false; n];
    for e in &matching {
        keep[e.ends.0] = true;
        keep[e.ends.1] = true;
    }
    // prune leaves that are not endpoints of a matching edge
    let mut inside = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| d.neighbors(v).len()).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1 && !keep[v]).collect();
    while let Some(v) = stack.pop() {
        if !inside[v] {
            continue;
        }
        inside[v] = false;
        for w in d.neighbors(v) {
            if inside[w] {
                degree[w] -= 1;
                if degree[w] <= 1 && !keep[w] {
                    stack.push(w);
                }
            }
        }
    }

    let subtree: Vec<usize> = (0..n).filter(|&v| inside[v]).collect();
    let subtree_diameter = d.subtree_diameter(&inside);
    let center = d.center(Some(&inside));
    let mut plan = RewirePlan {
        target,
        matching_edges: matching.iter().map(|e| e.id).collect(),
        subtree,
        subtree_diameter,
        center,
        deletions: Vec::new(),
        additions: Vec::new(),
    };
    if subtree_diameter <= 2 {
        return Some(plan);
    }
    let dist = d.distances_from(center);
    for e in matching {
        if e.touches(center) {
            continue;
        }
        let (near, far) = if dist[e.ends.0] < dist[e.ends.1] { e.ends } else { (e.ends.1, e.ends.0) };
        debug_assert!(dist[near] < dist[far]);
        plan.deletions.push(e.id);
        plan.additions.push((far, center));
    }
    Some(plan)
}

/// Applies a plan. New edges get fresh ids and remember the edge they replace.
pub fn apply_plan(d: &TreeDecomposition, plan: &RewirePlan) -> TreeDecomposition {
    let mut edges: Vec<TreeEdge> =
        d.tree_edges().iter().filter(|e| !plan.deletions.contains(&e.id)).cloned().collect();
    for (id, (&old, &ends)) in (d.next_edge_id()..).zip(plan.deletions.iter().zip(&plan.additions)) {
        edges.push(TreeEdge { id, ends, replaces: Some(old) });
    }
    d.with_edges(edges)
}

fn ensure_valid(g: &Multigraph, d: &TreeDecomposition) -> Result<()> {
    validate(g, d).map_err(|v| Error::InvalidDecomposition(v.to_string()))
}

/// One diameter-reduction step for the vertex set `target`.
pub fn reduce_for_set(g: &Multigraph, d: &TreeDecomposition, target: VertexSet) -> Result<TreeDecomposition> {
    ensure_valid(g, d)?;
    Ok(match plan_reduction(d, target) {
        Some(plan) => apply_plan(d, &plan),
        None => d.clone(),
    })
}

/// Applies the reduction once to every adhesion value, smallest value first,
/// and returns the short result.
pub fn shorten_pass(g: &Multigraph, d: &TreeDecomposition) -> Result<TreeDecomposition> {
    shorten_pass_logged(g, d).map(|(d, _)| d)
}

/// [`shorten_pass`] together with the plan applied for each adhesion value.
pub fn shorten_pass_logged(g: &Multigraph, d: &TreeDecomposition) -> Result<(TreeDecomposition, Vec<RewirePlan>)> {
    ensure_valid(g, d)?;
    let mut current = d.clone();
    let mut done = BTreeSet::new();
    let mut log = Vec::new();
    loop {
        let values: BTreeSet<VertexSet> = current.adhesions().into_iter().collect();
        let Some(&target) = values.iter().find(|v| !done.contains(*v)) else {
            break;
        };
        done.insert(target);
        let plan = plan_reduction(&current, target).expect("value taken from the current adhesions");
        current = apply_plan(&current, &plan);
        log.push(plan);
    }
    Ok((current, log))
}

/// Removes repeated bags: while two nodes share a bag, the later one is
/// contracted into its neighbour on the tree path towards the earlier one.
/// `d` is assumed valid.
pub fn dedupe_bags(d: &TreeDecomposition) -> TreeDecomposition {
    let mut current = d.clone();
    'outer: loop {
        let n = current.node_count();
        for u in 0..n {
            for v in u + 1..n {
                if current.bag(u) == current.bag(v) {
                    let toward = current.tree_path(v, u).expect("connected tree")[1];
                    current = contract(&current, v, toward);
                    continue 'outer;
                }
            }
        }
        return current;
    }
}

/// Contracts the tree edge `{gone, into}` onto `into`, dropping node `gone`.
pub fn contract(d: &TreeDecomposition, gone: usize, into: usize) -> TreeDecomposition {
    let shift = |x: usize| {
        let x = if x == gone { into } else { x };
        if x > gone {
            x - 1
        } else {
            x
        }
    };
    let mut nodes = d.node_ids().to_vec();
    nodes.remove(gone);
    let mut bags = d.bags().to_vec();
    bags.remove(gone);
    let edges = d
        .tree_edges()
        .iter()
        .filter(|e| !(e.touches(gone) && e.touches(into)))
        .map(|e| TreeEdge { ends: (shift(e.ends.0), shift(e.ends.1)), ..e.clone() })
        .collect();
    TreeDecomposition::from_parts(nodes, bags, edges).expect("contraction keeps indices in range")
}

/// Witness that a tree path carries `t` pairwise distinct adhesions of a
/// common size `k` with no smaller adhesion between the first and last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotundCertificate {
    /// Tree nodes `v_0, ..., v_s`.
    pub path: Vec<usize>,
    pub t: usize,
    pub k: usize,
    /// Zero-based positions of the chosen edges along the path.
    pub indices: Vec<usize>,
}

/// Adhesions of the edges along a tree path, in path order.
pub fn path_adhesions(d: &TreeDecomposition, path: &[usize]) -> Result<Vec<VertexSet>> {
    check_tree_path(d, path)?;
    Ok(path.windows(2).map(|w| d.bag(w[0]).intersection(d.bag(w[1]))).collect())
}

/// Number of distinct adhesion values along a tree path.
pub fn distinct_adhesion_count(d: &TreeDecomposition, path: &[usize]) -> Result<usize> {
    Ok(path_adhesions(d, path)?.into_iter().collect::<BTreeSet<_>>().len())
}

/// The certificate with the largest `t` on `path`. Ties go to the smaller
/// `k`, then to the lexicographically least index sequence.
///
/// Sizes `k` range over `1..=width + 1`. When every adhesion on the path is
/// empty the certificate uses `k = 0` with the first edge alone.
pub fn rotund_max(d: &TreeDecomposition, path: &[usize]) -> Result<RotundCertificate> {
    let adhesions = path_adhesions(d, path)?;
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for k in 1..=d.width() + 1 {
        // maximal runs of edges with adhesion size >= k
        let mut j = 0;
        while j < adhesions.len() {
            if adhesions[j].len() < k {
                j += 1;
                continue;
            }
            let mut seen = BTreeSet::new();
            let mut indices = Vec::new();
            while j < adhesions.len() && adhesions[j].len() >= k {
                if adhesions[j].len() == k && seen.insert(adhesions[j]) {
                    indices.push(j);
                }
                j += 1;
            }
            let t = indices.len();
            let better = match &best {
                None => t > 0,
                Some((bt, bk, bi)) => t > *bt || (t == *bt && (k < *bk || (k == *bk && indices < *bi))),
            };
            if better {
                best = Some((t, k, indices));
            }
        }
    }
    let (t, k, indices) = best.unwrap_or((1, 0, vec![0]));
    Ok(RotundCertificate { path: path.to_vec(), t, k, indices })
}

/// Checks a certificate against the decomposition.
pub fn certificate_holds(d: &TreeDecomposition, cert: &RotundCertificate) -> bool {
    let Ok(adhesions) = path_adhesions(d, &cert.path) else {
        return false;
    };
    let idx = &cert.indices;
    if idx.len() != cert.t || idx.is_empty() || idx.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    if idx.iter().any(|&i| i >= adhesions.len() || adhesions[i].len() != cert.k) {
        return false;
    }
    let distinct: BTreeSet<VertexSet> = idx.iter().map(|&i| adhesions[i]).collect();
    distinct.len() == cert.t && (idx[0]..=idx[idx.len() - 1]).all(|j| adhesions[j].len() >= cert.k)
}

/// Upper bound on the tree diameter of a width-optimal linked decomposition of
/// a graph without a path of `m` edges: `2(m² − m + 2)^m + 1`, or
/// `2(m² − m + 2)^m − 2` for connected graphs.
pub fn diameter_bound(m: u64, connected: bool) -> Result<u128> {
    if m == 0 {
        return Err(Error::NonPositiveM);
    }
    let overflow = || Error::BoundOverflow(m);
    let m128 = m as u128;
    let base = m128.checked_mul(m128).and_then(|sq| (sq - m128).checked_add(2)).ok_or_else(overflow)?;
    let exp = u32::try_from(m).map_err(|_| overflow())?;
    let twice = base.checked_pow(exp).and_then(|p| p.checked_mul(2)).ok_or_else(overflow)?;
    if connected {
        Ok(twice - 2)
    } else {
        twice.checked_add(1).ok_or_else(overflow)
    }
}
