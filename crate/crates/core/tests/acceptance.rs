//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pathfree_core::decomp::{adhesion_equality_check, is_linked, is_short, separator_family, validate};
use pathfree_core::embed::{find_embedding, good_pair_scan, LabeledRootedGraph, Mode, NaturalOrder, Respect, TrivialOrder};
use pathfree_core::families::{cycle, dipole, random_decomposition, random_multigraph, star, star_path_decomposition};
use pathfree_core::multigraph::{disjoint_paths, Linkage};
use pathfree_core::oracle::{brute_tree_diameter, brute_treewidth, enumerate_pm_free, find_short_linked_minwidth, OracleLimits};
use pathfree_core::shorten::{certificate_holds, diameter_bound, distinct_adhesion_count, reduce_for_set, rotund_max, shorten_pass};
use pathfree_core::{Id, Multigraph, TreeDecomposition, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> std::result::Result<(), String> {
    ensure(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:?}"))
}

fn star_examples() -> Check {
    let start = Instant::now();
    let limits = OracleLimits { decomposition_n: 7, ..OracleLimits::default() };
    for m in 3..=6 {
        let (g, d) = star_path_decomposition(m).map_err(|e| e.to_string())?;
        ensure(validate(&g, &d).is_ok(), || format!("m={m}: star decomposition invalid"))?;
        ensure(d.width() == 1, || format!("m={m}: width {}", d.width()))?;
        let s = shorten_pass(&g, &d).map_err(|e| e.to_string())?;
        ensure(s.diameter() == 2, || format!("m={m}: shortened diameter {}", s.diameter()))?;
        let tdi = brute_tree_diameter(&star(m).unwrap(), &limits).map_err(|e| e.to_string())?;
        ensure(tdi == 2, || format!("m={m}: tdi {tdi}"))?;
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok("m=3..6: width 1, shortened diameter 2, tdi 2".into())
}

/// Random valid decompositions of random multigraphs with at most six
/// vertices and multiplicity at most two.
fn population() -> Vec<(Multigraph, TreeDecomposition)> {
    (0..600u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=6);
            let p = rng.gen_range(0.2..0.8);
            let g = random_multigraph(&mut rng, n, 2, p).unwrap();
            let extra = rng.gen_range(0..=5);
            let d = random_decomposition(&g, &mut rng, extra);
            (g, d)
        })
        .collect()
}

fn families(d: &TreeDecomposition) -> Vec<Vec<VertexSet>> {
    let n = d.node_count();
    (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .map(|(u, v)| separator_family(d, u, v).unwrap().members().to_vec())
        .collect()
}

#[derive(Default)]
struct Tally {
    checked: usize,
    invalid: usize,
    width: usize,
    family: usize,
    diameter_grew: usize,
    diameter_dropped: usize,
    first_growth: Option<String>,
}

impl Tally {
    fn record(&mut self, g: &Multigraph, before: &TreeDecomposition, after: &TreeDecomposition, fam: &[Vec<VertexSet>], what: String) {
        self.checked += 1;
        self.invalid += validate(g, after).is_err() as usize;
        self.width += (after.width() != before.width()) as usize;
        self.family += (families(after) != fam) as usize;
        if after.diameter() > before.diameter() {
            self.diameter_grew += 1;
            self.first_growth.get_or_insert(format!("{what}: {} -> {}", before.diameter(), after.diameter()));
        }
        self.diameter_dropped += (after.diameter() < before.diameter()) as usize;
    }

    fn summary(&self, name: &str) -> String {
        format!(
            "{name}: {} runs, {} invalid, {} width changes, {} family changes, diameter grew {} dropped {}",
            self.checked, self.invalid, self.width, self.family, self.diameter_grew, self.diameter_dropped
        )
    }

    fn clean(&self) -> bool {
        self.invalid + self.width + self.family + self.diameter_grew == 0
    }
}

fn preservation() -> Check {
    let start = Instant::now();
    let pop = population();
    let (mut reduce, mut pass) = (Tally::default(), Tally::default());
    let (mut not_short, mut link_changed) = (0usize, 0usize);
    for (i, (g, d)) in pop.iter().enumerate() {
        ensure(validate(g, d).is_ok(), || format!("instance {i}: generator produced an invalid decomposition"))?;
        let fam = families(d);
        let mut targets: BTreeSet<VertexSet> = d.adhesions().into_iter().collect();
        targets.extend(d.bags().iter().copied());
        targets.insert(VertexSet::EMPTY);
        for &u in &targets {
            let r = reduce_for_set(g, d, u).map_err(|e| e.to_string())?;
            reduce.record(g, d, &r, &fam, format!("instance {i}, U={u:?}"));
        }
        let s = shorten_pass(g, d).map_err(|e| e.to_string())?;
        pass.record(g, d, &s, &fam, format!("instance {i}"));
        not_short += !is_short(&s) as usize;
        link_changed += (is_linked(g, &s) != is_linked(g, d)) as usize;
    }
    let elapsed = start.elapsed();
    let report = format!(
        "{}; {}; {not_short} not short, {link_changed} linkedness changes",
        reduce.summary("reduce_for_set"),
        pass.summary("shorten_pass")
    );
    ensure(reduce.clean() && pass.clean() && not_short + link_changed == 0, || {
        let first = reduce.first_growth.clone().or(pass.first_growth.clone()).unwrap_or_default();
        format!("{report}; first growth {first}")
    })?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(report)
}

fn adhesion_equality() -> Check {
    let mut checks = 0usize;
    for (i, (_, d)) in population().iter().enumerate() {
        let bags = d.bags();
        let mut us: BTreeSet<VertexSet> = d.adhesions().into_iter().collect();
        us.insert(VertexSet::EMPTY);
        for a in bags {
            for b in bags {
                us.insert(*a);
                us.insert(a.union(*b));
                us.insert(a.intersection(*b));
            }
        }
        for u in 0..d.node_count() {
            for v in 0..d.node_count() {
                if u == v {
                    continue;
                }
                let path = d.tree_path(u, v).unwrap();
                for &target in &us {
                    let (lhs, rhs) = adhesion_equality_check(d, &path, target).map_err(|e| e.to_string())?;
                    ensure(lhs == rhs, || format!("instance {i}, path {path:?}, U={target:?}: {lhs} vs {rhs}"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (path, U) checks"))
}

fn bound_sweep() -> Check {
    let start = Instant::now();
    let limits = OracleLimits::default();
    let mut summary = Vec::new();
    for m in 1..=3u64 {
        let graphs = enumerate_pm_free(4, 2, m as usize, &limits).map_err(|e| e.to_string())?;
        let (mut max_tw, mut max_tdi) = (0, 0);
        for g in &graphs {
            let tw = brute_treewidth(g, &limits).map_err(|e| e.to_string())?;
            let tdi = brute_tree_diameter(g, &limits).map_err(|e| e.to_string())?;
            let bound = diameter_bound(m, g.is_connected()).map_err(|e| e.to_string())?;
            ensure((tw as u64) < m, || format!("m={m}: tw {tw} for {g:?}"))?;
            ensure(tdi as u128 <= bound, || format!("m={m}: tdi {tdi} above {bound}"))?;
            max_tw = max_tw.max(tw);
            max_tdi = max_tdi.max(tdi);
        }
        summary.push(format!(
            "m={m}: {} graphs, max tw {max_tw}, max tdi {max_tdi} (bound {})",
            graphs.len(),
            diameter_bound(m, true).unwrap()
        ));
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(summary.join("; "))
}

fn m3_population() -> Vec<Multigraph> {
    enumerate_pm_free(5, 2, 3, &OracleLimits::default()).unwrap()
}

fn rotund_bounds() -> Check {
    let limits = OracleLimits::default();
    let m = 3;
    let (mut paths, mut max_t) = (0usize, 0usize);
    for g in m3_population() {
        let Ok(d) = find_short_linked_minwidth(&g, &limits) else {
            continue; // counted by the existence criterion
        };
        ensure(is_short(&d) && is_linked(&g, &d) && validate(&g, &d).is_ok(), || format!("bad witness for {g:?}"))?;
        let p = d.width() + 1;
        for u in 0..d.node_count() {
            for v in u + 1..d.node_count() {
                let path = d.tree_path(u, v).unwrap();
                let s = path.len() - 1;
                let s_star = distinct_adhesion_count(&d, &path).unwrap();
                let cert = rotund_max(&d, &path).unwrap();
                ensure(certificate_holds(&d, &cert), || format!("certificate fails on {path:?}"))?;
                ensure(s <= 2 * s_star, || format!("s={s} > 2s*={} on {g:?}", 2 * s_star))?;
                ensure(cert.t <= p * (m - 1) + 1, || format!("t={} above p(m-1)+1 on {g:?}", cert.t))?;
                ensure(s_star < (cert.t + 1).pow(p as u32), || format!("s*={s_star} vs t={} on {g:?}", cert.t))?;
                max_t = max_t.max(cert.t);
                paths += 1;
            }
        }
    }
    Ok(format!("{paths} tree paths, max t {max_t}"))
}

fn short_linked_existence() -> Check {
    let limits = OracleLimits::default();
    let graphs = m3_population();
    let mut missing = Vec::new();
    for g in &graphs {
        match find_short_linked_minwidth(g, &limits) {
            Ok(d) => {
                let tw = brute_treewidth(g, &limits).unwrap();
                if d.width() != tw {
                    missing.push(format!("width {} != tw {tw}", d.width()));
                }
            }
            Err(e) => missing.push(e.to_string()),
        }
    }
    ensure(missing.is_empty(), || format!("{} of {} failed, first: {}", missing.len(), graphs.len(), missing[0]))?;
    Ok(format!("{}/{} graphs have a short linked decomposition of width tw", graphs.len(), graphs.len()))
}

fn antichains() -> Check {
    let start = Instant::now();
    let q = TrivialOrder;
    let cycles: Vec<_> = (4..=12).map(|n| LabeledRootedGraph::plain(cycle(n).unwrap())).collect();
    let dipoles: Vec<_> = (1..=8).map(|t| LabeledRootedGraph::plain(dipole(t).unwrap())).collect();
    let c = good_pair_scan(&cycles, Mode::Subgraph, Respect::NONE, &q).map_err(|e| e.to_string())?;
    ensure(c.is_none(), || format!("cycles: {c:?}"))?;
    let di = good_pair_scan(&dipoles, Mode::Induced, Respect::NONE, &q).map_err(|e| e.to_string())?;
    ensure(di.is_none(), || format!("dipoles induced: {di:?}"))?;
    let ds = good_pair_scan(&dipoles, Mode::Subgraph, Respect::NONE, &q).map_err(|e| e.to_string())?;
    ensure(ds.map(|p| (p.i, p.j)) == Some((1, 2)), || format!("dipoles subgraph: {ds:?}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok("cycles 4..12 none; dipoles 1..8 induced none, subgraph (1,2)".into())
}

/// Exhaustive embedding test: every injective vertex map, then every
/// injective edge assignment compatible with it.
fn brute_embeds(x: &LabeledRootedGraph, y: &LabeledRootedGraph, mode: Mode, respect: Respect) -> bool {
    let (nx, ny) = (x.graph.vertex_count(), y.graph.vertex_count());
    let mut map = Vec::new();
    fn vertex_maps(nx: usize, ny: usize, map: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if map.len() == nx {
            return visit(map);
        }
        for b in 0..ny {
            if !map.contains(&b) {
                map.push(b);
                if vertex_maps(nx, ny, map, visit) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    vertex_maps(nx, ny, &mut map, &mut |phi| {
        if respect.roots {
            let image: BTreeSet<usize> = x.roots.iter().map(|v| phi[v]).collect();
            if image != y.roots.iter().collect() {
                return false;
            }
        }
        if respect.colors && (0..nx).any(|v| x.colors.as_ref().map(|c| c[v]) != y.colors.as_ref().map(|c| c[phi[v]])) {
            return false;
        }
        if mode == Mode::Induced {
            let image: BTreeSet<usize> = phi.iter().copied().collect();
            let inside = y.graph.edges().iter().filter(|f| image.contains(&f.ends.0) && image.contains(&f.ends.1)).count();
            if inside != x.graph.edge_count() {
                return false;
            }
        }
        let mut used = vec![false; y.graph.edge_count()];
        assign_edges(x, y, phi, respect, 0, &mut used)
    })
}

fn assign_edges(
    x: &LabeledRootedGraph,
    y: &LabeledRootedGraph,
    phi: &[usize],
    respect: Respect,
    i: usize,
    used: &mut [bool],
) -> bool {
    if i == x.graph.edge_count() {
        return true;
    }
    let e = x.graph.edge(i);
    let (a, b) = (phi[e.ends.0], phi[e.ends.1]);
    for (j, f) in y.graph.edges().iter().enumerate() {
        let hits = (f.ends == (a, b) || f.ends == (b, a)) && !used[j];
        let label_ok = !respect.labels
            || match (&e.label, &f.label) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(Id::Int(p)), Some(Id::Int(q))) => p <= q,
                _ => false,
            };
        if hits && label_ok {
            used[j] = true;
            if assign_edges(x, y, phi, respect, i + 1, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

fn decorate(g: &Multigraph, rng: &mut ChaCha8Rng) -> LabeledRootedGraph {
    let mut h = Multigraph::with_vertices(g.vertex_count()).unwrap();
    for e in g.edges() {
        let label = rng.gen_bool(0.8).then(|| Id::Int(rng.gen_range(1..=3)));
        h.add_edge(e.id.clone(), e.ends.0, e.ends.1, label).unwrap();
    }
    let roots = (0..g.vertex_count()).filter(|_| rng.gen_bool(0.3)).collect();
    let colors = (0..g.vertex_count()).map(|_| rng.gen_range(0..2)).collect();
    LabeledRootedGraph::new(h, roots, Some(colors)).unwrap()
}

fn embedding_oracle() -> Check {
    let start = Instant::now();
    let graphs: Vec<LabeledRootedGraph> = enumerate_pm_free(4, 2, 4, &OracleLimits::default())
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(LabeledRootedGraph::plain)
        .collect();
    let mut pairs = 0usize;
    let mut found = 0usize;
    for mode in [Mode::Subgraph, Mode::Induced] {
        for x in &graphs {
            for y in &graphs {
                let fast = find_embedding(x, y, mode, Respect::NONE, &TrivialOrder).map_err(|e| e.to_string())?;
                let slow = brute_embeds(x, y, mode, Respect::NONE);
                ensure(fast.is_some() == slow, || format!("{mode}: {:?} into {:?}: search {} brute {slow}", x.graph, y.graph, fast.is_some()))?;
                pairs += 1;
                found += slow as usize;
            }
        }
    }
    // decorated pairs exercise roots, colours and labels
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut decorated = 0usize;
    for _ in 0..20_000 {
        let x = decorate(&graphs[rng.gen_range(0..graphs.len())].graph, &mut rng);
        let y = decorate(&graphs[rng.gen_range(0..graphs.len())].graph, &mut rng);
        let mode = if rng.gen_bool(0.5) { Mode::Subgraph } else { Mode::Induced };
        let fast = find_embedding(&x, &y, mode, Respect::ALL, &NaturalOrder).map_err(|e| e.to_string())?;
        let slow = brute_embeds(&x, &y, mode, Respect::ALL);
        ensure(fast.is_some() == slow, || format!("decorated {mode}: {x:?} into {y:?}"))?;
        decorated += 1;
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "{} graphs, {pairs} ordered pairs over both modes ({found} embeddings), {decorated} decorated pairs",
        graphs.len()
    ))
}

/// All `U`-`V` paths meeting `U` only at the start and `V` only at the end,
/// as vertex sets.
fn terminal_paths(g: &Multigraph, from: VertexSet, to: VertexSet) -> Vec<VertexSet> {
    let mut out = Vec::new();
    fn grow(g: &Multigraph, at: usize, seen: VertexSet, from: VertexSet, to: VertexSet, out: &mut Vec<VertexSet>) {
        if to.contains(at) {
            out.push(seen);
            return;
        }
        for w in g.neighbors(at).difference(seen) {
            if !from.contains(w) {
                grow(g, w, seen.with(w), from, to, out);
            }
        }
    }
    for s in from {
        grow(g, s, VertexSet::singleton(s), from, to, &mut out);
    }
    out
}

fn disjoint_family(paths: &[VertexSet], k: usize, used: VertexSet) -> bool {
    if k == 0 {
        return true;
    }
    paths.iter().enumerate().any(|(i, p)| p.intersection(used).is_empty() && disjoint_family(&paths[i + 1..], k - 1, used.union(*p)))
}

fn menger() -> Check {
    let all = enumerate_pm_free(5, 2, 5, &OracleLimits::default()).map_err(|e| e.to_string())?;
    let loopless: Vec<&Multigraph> = all.iter().filter(|g| g.edges().iter().all(|e| !e.is_loop())).collect();
    let mut queries = 0usize;
    for g in loopless {
        let n = g.vertex_count();
        let mut looped = g.clone();
        for v in 0..n {
            looped.add_auto_edge(v, v).unwrap();
        }
        for from in 1..1u64 << n {
            for to in 1..1u64 << n {
                let (from, to) = (VertexSet::from_bits(from), VertexSet::from_bits(to));
                let paths = terminal_paths(g, from, to);
                for k in 1..=3usize.min(from.len()).min(to.len()) {
                    let linked = disjoint_family(&paths, k, VertexSet::EMPTY);
                    let small_cut = (0..k)
                        .flat_map(|s| g.all_vertices().subsets_of_size(s))
                        .any(|w| paths.iter().all(|p| !p.intersection(w).is_empty()));
                    ensure(linked != small_cut, || format!("brute force disagrees with itself on {g:?}"))?;
                    for host in [g, &looped] {
                        match disjoint_paths(host, from, to, k).map_err(|e| e.to_string())? {
                            Linkage::Paths(ps) => {
                                ensure(linked && ps.len() == k, || format!("{g:?} {from:?}->{to:?} k={k}: bogus paths"))?;
                                let mut used = VertexSet::EMPTY;
                                for p in &ps {
                                    let vs = p.vertex_set();
                                    let ok = p.is_valid_in(host)
                                        && from.contains(p.vertices[0])
                                        && to.contains(*p.vertices.last().unwrap())
                                        && vs.intersection(used).is_empty();
                                    ensure(ok, || format!("{g:?} {from:?}->{to:?} k={k}: invalid path {p:?}"))?;
                                    used = used.union(vs);
                                }
                            }
                            Linkage::Separator(w) => {
                                let meets = paths.iter().all(|p| !p.intersection(w).is_empty());
                                ensure(!linked && w.len() < k && meets, || {
                                    format!("{g:?} {from:?}->{to:?} k={k}: bogus separator {w:?}")
                                })?;
                            }
                        }
                        queries += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{queries} queries on loop-free graphs and their fully looped copies"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("star examples", star_examples),
        ("operation preservation", preservation),
        ("adhesion equality", adhesion_equality),
        ("bound sweep", bound_sweep),
        ("rotund bounds", rotund_bounds),
        ("short linked existence", short_linked_existence),
        ("antichains", antichains),
        ("embedding oracle", embedding_oracle),
        ("menger duality", menger),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
