//! Structural graph metrics: clustering coefficients, average shortest path
//! length on the giant component, component structure, and edge reciprocity.
//!
//! All operations are read-only over an immutable network or view and may
//! run concurrently. The per-vertex kernels (triangle counting, multi-source
//! BFS) are data-parallel under the `parallel` feature; each keeps a
//! `_sequential` twin that is always compiled, produces bit-identical
//! results, and serves as the fallback and the benchmark baseline.

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EmailNetwork, UndirectedView};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("operation undefined on an empty network")]
    EmptyNetwork,
    #[error("giant component has fewer than two vertices")]
    GiantTooSmall,
    #[error("operation requires a directed network")]
    RequiresDirected,
    #[error("sampled mode requires at least one source")]
    NoSampleSources,
}

/// Vertices above this giant-component size make all-source BFS too
/// expensive as a default; callers should switch to sampled mode or
/// explicitly force the exact computation.
pub const EXACT_PATH_VERTEX_LIMIT: usize = 50_000;

/// Per-vertex and network-average clustering, plus the analytic
/// random-graph baseline of equal density.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    /// For each vertex: fraction of its neighbor pairs that are connected;
    /// zero for vertices with fewer than two neighbors.
    pub per_vertex: Vec<f64>,
    /// Edges among the neighbors of each vertex.
    pub triangle_edge_counts: Vec<u64>,
    /// Neighbor-set sizes entering the formula (self-loops excluded).
    pub degrees: Vec<u32>,
    pub average: f64,
    /// Expected clustering of a random graph of matching mean degree:
    /// mean degree over (|V| - 1); zero for a single-vertex network.
    pub random_baseline: f64,
}

/// How to estimate the average shortest path length.
#[derive(Debug, Clone, Copy)]
pub enum PathMode {
    /// Breadth-first search from every giant-component vertex.
    Exact,
    /// Breadth-first search from `sources` uniformly chosen roots.
    Sampled { sources: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PathLengthEstimate {
    /// Mean hop count over (sampled) vertex pairs; self-pairs excluded.
    pub mean: f64,
    pub sample_sources: usize,
    pub exact: bool,
    /// Giant-component size the estimate was measured on; always reported
    /// so undersized components are visible next to the mean.
    pub component_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentMode {
    UndirectedConnected,
    DirectedStrong,
}

/// Partition of the vertices into components.
#[derive(Debug, Clone)]
pub struct ComponentSummary {
    pub mode: ComponentMode,
    /// Size of each component, indexed by component id.
    pub sizes: Vec<usize>,
    /// Component id of each vertex.
    pub membership: Vec<u32>,
    pub giant_fraction: f64,
    pub second_largest: usize,
}

impl ComponentSummary {
    fn from_partition(mode: ComponentMode, sizes: Vec<usize>, membership: Vec<u32>) -> Self {
        let total: usize = sizes.iter().sum();
        let mut largest = 0usize;
        let mut second = 0usize;
        for &s in &sizes {
            if s > largest {
                second = largest;
                largest = s;
            } else if s > second {
                second = s;
            }
        }
        ComponentSummary {
            mode,
            giant_fraction: largest as f64 / total as f64,
            second_largest: second,
            sizes,
            membership,
        }
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn giant_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// Id of the largest component (lowest id on ties).
    pub fn giant_id(&self) -> u32 {
        let mut best = 0usize;
        for (i, &s) in self.sizes.iter().enumerate() {
            if s > self.sizes[best] {
                best = i;
            }
        }
        best as u32
    }
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

/// Sorted-list intersection size.
fn common_neighbors(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut count) = (0usize, 0usize, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn clustering_vertex(view: &UndirectedView, v: u32) -> (u64, u32, f64) {
    let neighbors = view.neighbors(v);
    let k = neighbors.len() as u32;
    if k < 2 {
        return (0, k, 0.0);
    }
    // Each edge among the neighbors is seen from both endpoints.
    let paired: u64 = neighbors
        .iter()
        .map(|&u| common_neighbors(neighbors, view.neighbors(u)))
        .sum();
    let edges_among = paired / 2;
    let coefficient = 2.0 * edges_among as f64 / (k as f64 * (k as f64 - 1.0));
    (edges_among, k, coefficient)
}

fn clustering_from_rows(view: &UndirectedView, rows: Vec<(u64, u32, f64)>) -> ClusteringResult {
    let n = view.vertex_count();
    let mut per_vertex = Vec::with_capacity(n);
    let mut triangle_edge_counts = Vec::with_capacity(n);
    let mut degrees = Vec::with_capacity(n);
    let mut sum = 0.0f64;
    for (e, k, c) in rows {
        sum += c;
        per_vertex.push(c);
        triangle_edge_counts.push(e);
        degrees.push(k);
    }
    let random_baseline = if n > 1 {
        view.mean_degree().expect("non-empty view") / (n as f64 - 1.0)
    } else {
        0.0
    };
    ClusteringResult {
        per_vertex,
        triangle_edge_counts,
        degrees,
        average: sum / n as f64,
        random_baseline,
    }
}

/// Average clustering coefficient of the undirected view. Vertices with
/// fewer than two neighbors contribute zero and stay in the average.
pub fn clustering(view: &UndirectedView) -> Result<ClusteringResult, MetricsError> {
    if view.vertex_count() == 0 {
        return Err(MetricsError::EmptyNetwork);
    }
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        (0..view.vertex_count() as u32)
            .into_par_iter()
            .map(|v| clustering_vertex(view, v))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = (0..view.vertex_count() as u32)
        .map(|v| clustering_vertex(view, v))
        .collect();
    Ok(clustering_from_rows(view, rows))
}

/// Single-threaded twin of [`clustering`].
pub fn clustering_sequential(view: &UndirectedView) -> Result<ClusteringResult, MetricsError> {
    if view.vertex_count() == 0 {
        return Err(MetricsError::EmptyNetwork);
    }
    let rows = (0..view.vertex_count() as u32)
        .map(|v| clustering_vertex(view, v))
        .collect();
    Ok(clustering_from_rows(view, rows))
}

// ---------------------------------------------------------------------------
// Shortest paths
// ---------------------------------------------------------------------------

/// Sum of BFS distances from `root` to every other reachable vertex.
fn bfs_distance_sum(view: &UndirectedView, root: u32) -> u64 {
    let mut dist = vec![u32::MAX; view.vertex_count()];
    let mut frontier = vec![root];
    let mut next = Vec::new();
    dist[root as usize] = 0;
    let mut level = 0u32;
    let mut sum = 0u64;
    while !frontier.is_empty() {
        level += 1;
        for &v in &frontier {
            for &w in view.neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = level;
                    sum += level as u64;
                    next.push(w);
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    sum
}

fn path_roots(
    view: &UndirectedView,
    mode: PathMode,
) -> Result<(Vec<u32>, usize, bool), MetricsError> {
    let comps = connected_components(view)?;
    let giant_id = comps.giant_id();
    let giant: Vec<u32> = (0..view.vertex_count() as u32)
        .filter(|&v| comps.membership[v as usize] == giant_id)
        .collect();
    if giant.len() < 2 {
        return Err(MetricsError::GiantTooSmall);
    }
    match mode {
        PathMode::Exact => {
            let size = giant.len();
            Ok((giant, size, true))
        }
        PathMode::Sampled { sources, seed } => {
            if sources == 0 {
                return Err(MetricsError::NoSampleSources);
            }
            let size = giant.len();
            if sources >= size {
                return Ok((giant, size, true));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picks: Vec<usize> = sample_indices(&mut rng, size, sources).into_vec();
            picks.sort_unstable();
            Ok((picks.into_iter().map(|i| giant[i]).collect(), size, false))
        }
    }
}

fn estimate_from_sums(
    sums: Vec<u64>,
    roots: usize,
    component_size: usize,
    exact: bool,
) -> PathLengthEstimate {
    let total: u64 = sums.iter().sum();
    let pairs = roots as u64 * (component_size as u64 - 1);
    PathLengthEstimate {
        mean: total as f64 / pairs as f64,
        sample_sources: roots,
        exact,
        component_size,
    }
}

/// Mean shortest-path length over the giant component of the undirected
/// view, with distances averaged over (root, other) pairs. Exact mode roots
/// a search at every giant vertex; sampled mode at a seeded uniform subset,
/// which is unbiased because every root reaches the same component.
pub fn average_path_length(
    view: &UndirectedView,
    mode: PathMode,
) -> Result<PathLengthEstimate, MetricsError> {
    let (roots, size, exact) = path_roots(view, mode)?;
    #[cfg(feature = "parallel")]
    let sums: Vec<u64> = {
        use rayon::prelude::*;
        roots.par_iter().map(|&r| bfs_distance_sum(view, r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let sums: Vec<u64> = roots.iter().map(|&r| bfs_distance_sum(view, r)).collect();
    Ok(estimate_from_sums(sums, roots.len(), size, exact))
}

/// Single-threaded twin of [`average_path_length`].
pub fn average_path_length_sequential(
    view: &UndirectedView,
    mode: PathMode,
) -> Result<PathLengthEstimate, MetricsError> {
    let (roots, size, exact) = path_roots(view, mode)?;
    let sums: Vec<u64> = roots.iter().map(|&r| bfs_distance_sum(view, r)).collect();
    Ok(estimate_from_sums(sums, roots.len(), size, exact))
}

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

/// Connected components of the undirected view via union-find. A vertex
/// with only a self-loop has no neighbors and forms a size-1 component.
pub fn connected_components(view: &UndirectedView) -> Result<ComponentSummary, MetricsError> {
    let n = view.vertex_count();
    if n == 0 {
        return Err(MetricsError::EmptyNetwork);
    }
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut v: u32) -> u32 {
        while parent[v as usize] != v {
            parent[v as usize] = parent[parent[v as usize] as usize];
            v = parent[v as usize];
        }
        v
    }
    for v in 0..n as u32 {
        for &w in view.neighbors(v) {
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut membership = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    for v in 0..n as u32 {
        let root = find(&mut parent, v);
        let id = if membership[root as usize] == u32::MAX {
            sizes.push(0usize);
            let id = (sizes.len() - 1) as u32;
            membership[root as usize] = id;
            id
        } else {
            membership[root as usize]
        };
        membership[v as usize] = id;
        sizes[id as usize] += 1;
    }
    Ok(ComponentSummary::from_partition(
        ComponentMode::UndirectedConnected,
        sizes,
        membership,
    ))
}

/// Strongly connected components of a directed network, via an iterative
/// depth-first search with an explicit frame stack; component chains of
/// millions of vertices must not recurse.
pub fn strongly_connected_components(
    net: &EmailNetwork,
) -> Result<ComponentSummary, MetricsError> {
    if !net.directed() {
        return Err(MetricsError::RequiresDirected);
    }
    let n = net.vertex_count();
    if n == 0 {
        return Err(MetricsError::EmptyNetwork);
    }

    const UNVISITED: u32 = u32::MAX;
    let mut order = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut frames: Vec<(u32, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut membership = vec![u32::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();

    for start in 0..n as u32 {
        if order[start as usize] != UNVISITED {
            continue;
        }
        frames.push((start, 0));
        while let Some(&mut (v, ref mut edge_pos)) = frames.last_mut() {
            if *edge_pos == 0 {
                order[v as usize] = counter;
                low[v as usize] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v as usize] = true;
            }
            let out = net.out_edges(v);
            let mut descended = false;
            while *edge_pos < out.len() {
                let w = out[*edge_pos].dst;
                *edge_pos += 1;
                if order[w as usize] == UNVISITED {
                    frames.push((w, 0));
                    descended = true;
                    break;
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(order[w as usize]);
                }
            }
            if descended {
                continue;
            }
            frames.pop();
            if low[v as usize] == order[v as usize] {
                let id = sizes.len() as u32;
                sizes.push(0);
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w as usize] = false;
                    membership[w as usize] = id;
                    sizes[id as usize] += 1;
                    if w == v {
                        break;
                    }
                }
            }
            if let Some(&(parent, _)) = frames.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
        }
    }
    Ok(ComponentSummary::from_partition(
        ComponentMode::DirectedStrong,
        sizes,
        membership,
    ))
}

/// Component partition in the requested mode. Undirected mode works on any
/// network; directed mode requires a directed one.
pub fn components(
    net: &EmailNetwork,
    mode: ComponentMode,
) -> Result<ComponentSummary, MetricsError> {
    match mode {
        ComponentMode::UndirectedConnected => connected_components(&net.undirected_view()),
        ComponentMode::DirectedStrong => strongly_connected_components(net),
    }
}

/// Table of (component size, fraction of all vertices in components of that
/// size), sorted by size; fractions sum to one.
pub fn component_size_histogram(summary: &ComponentSummary) -> Vec<(usize, f64)> {
    let total: usize = summary.sizes.iter().sum();
    let mut counts: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for &s in &summary.sizes {
        *counts.entry(s).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(size, multiplicity)| (size, (size * multiplicity) as f64 / total as f64))
        .collect()
}

// ---------------------------------------------------------------------------
// Reciprocity
// ---------------------------------------------------------------------------

/// Fraction of directed edges whose reverse edge is also present. A
/// self-loop is its own reverse and counts as reciprocated.
pub fn reciprocity(net: &EmailNetwork) -> Result<f64, MetricsError> {
    if !net.directed() {
        return Err(MetricsError::RequiresDirected);
    }
    if net.edge_count() == 0 {
        return Err(MetricsError::EmptyNetwork);
    }
    let mutual = net
        .edges()
        .iter()
        .filter(|e| net.has_edge(e.dst, e.src))
        .count();
    Ok(mutual as f64 / net.edge_count() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EmailNetwork;
    use crate::ingest::{DeliveryStatus, MessageLabel, Transmission};

    fn ham(s: &str, r: &str) -> Transmission {
        Transmission {
            sender: s.into(),
            recipient: r.into(),
            timestamp: 0,
            status: DeliveryStatus::Accepted,
            label: MessageLabel::Ham,
        }
    }

    fn net_of(edges: &[(&str, &str)]) -> EmailNetwork {
        EmailNetwork::from_transmissions(edges.iter().map(|(s, r)| ham(s, r)), None)
    }

    #[test]
    fn clustering_triangle_is_one() {
        let net = net_of(&[("a", "b"), ("b", "c"), ("c", "a")]);
        let c = clustering(&net.undirected_view()).unwrap();
        assert!(c.per_vertex.iter().all(|&x| x == 1.0));
        assert_eq!(c.average, 1.0);
    }

    #[test]
    fn clustering_star_is_zero() {
        let net = net_of(&[("hub", "a"), ("hub", "b"), ("hub", "c")]);
        let c = clustering(&net.undirected_view()).unwrap();
        assert_eq!(c.average, 0.0);
    }

    #[test]
    fn clustering_k4_minus_edge() {
        // Complete graph on {a,b,c,d} without (a,b): a and b have neighbor
        // pair {c,d} which is connected (coefficient 1); c and d each see
        // {a,b,d}/{a,b,c} with two of three pairs present (2/3). Average is
        // (1 + 1 + 2/3 + 2/3) / 4 = 5/6.
        let net = net_of(&[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]);
        let c = clustering(&net.undirected_view()).unwrap();
        assert!((c.average - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_ignores_self_loops() {
        let net = net_of(&[("a", "a"), ("a", "b"), ("b", "c"), ("c", "a")]);
        let c = clustering(&net.undirected_view()).unwrap();
        assert_eq!(c.average, 1.0);
        assert_eq!(c.degrees, vec![2, 2, 2]);
    }

    #[test]
    fn clustering_matches_sequential() {
        let edges: Vec<(String, String)> = (0..200u32)
            .flat_map(|i| {
                let a = format!("v{i}");
                let b = format!("v{}", (i * 7 + 3) % 200);
                let c = format!("v{}", (i * 13 + 1) % 200);
                [(a.clone(), b), (a, c)]
            })
            .collect();
        let net = net_of(
            &edges
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .collect::<Vec<_>>(),
        );
        let view = net.undirected_view();
        let par = clustering(&view).unwrap();
        let seq = clustering_sequential(&view).unwrap();
        assert_eq!(par.per_vertex, seq.per_vertex);
        assert_eq!(par.average, seq.average);
    }

    #[test]
    fn clustering_empty_errors() {
        let net = net_of(&[]);
        assert!(matches!(
            clustering(&net.undirected_view()),
            Err(MetricsError::EmptyNetwork)
        ));
    }

    #[test]
    fn path_length_three_path() {
        let net = net_of(&[("a", "b"), ("b", "c")]);
        let est = average_path_length(&net.undirected_view(), PathMode::Exact).unwrap();
        assert!((est.mean - 4.0 / 3.0).abs() < 1e-12);
        assert!(est.exact);
        assert_eq!(est.component_size, 3);
        assert_eq!(est.sample_sources, 3);
    }

    #[test]
    fn path_length_five_cycle() {
        // Every vertex sees distances {1, 1, 2, 2}: mean 6/4 = 1.5.
        let net = net_of(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]);
        let est = average_path_length(&net.undirected_view(), PathMode::Exact).unwrap();
        assert!((est.mean - 1.5).abs() < 1e-12);
    }

    #[test]
    fn path_length_uses_giant_component_only() {
        // Giant component is the 3-path; the isolated edge is ignored.
        let net = net_of(&[("a", "b"), ("b", "c"), ("x", "y")]);
        let est = average_path_length(&net.undirected_view(), PathMode::Exact).unwrap();
        assert_eq!(est.component_size, 3);
        assert!((est.mean - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn path_length_sampled_caps_at_component_and_matches_exact() {
        let net = net_of(&[("a", "b"), ("b", "c"), ("c", "d")]);
        let exact = average_path_length(&net.undirected_view(), PathMode::Exact).unwrap();
        let sampled = average_path_length(
            &net.undirected_view(),
            PathMode::Sampled { sources: 100, seed: 7 },
        )
        .unwrap();
        assert!(sampled.exact);
        assert_eq!(sampled.mean, exact.mean);
    }

    #[test]
    fn path_length_sampled_is_deterministic_and_matches_sequential() {
        let edges: Vec<(String, String)> =
            (1..400u32).map(|i| (format!("v{}", i / 2), format!("v{i}"))).collect();
        let net = net_of(
            &edges
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .collect::<Vec<_>>(),
        );
        let view = net.undirected_view();
        let mode = PathMode::Sampled { sources: 40, seed: 11 };
        let a = average_path_length(&view, mode).unwrap();
        let b = average_path_length_sequential(&view, mode).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.sample_sources, 40);
        assert!(!a.exact);
    }

    #[test]
    fn path_length_rejects_tiny_giant() {
        let net = net_of(&[("a", "a")]);
        assert!(matches!(
            average_path_length(&net.undirected_view(), PathMode::Exact),
            Err(MetricsError::GiantTooSmall)
        ));
    }

    #[test]
    fn path_length_rejects_zero_sources() {
        let net = net_of(&[("a", "b")]);
        assert!(matches!(
            average_path_length(
                &net.undirected_view(),
                PathMode::Sampled { sources: 0, seed: 1 }
            ),
            Err(MetricsError::NoSampleSources)
        ));
    }

    #[test]
    fn scc_two_cycle_is_one_component() {
        let net = net_of(&[("a", "b"), ("b", "a")]);
        let c = strongly_connected_components(&net).unwrap();
        assert_eq!(c.sizes, vec![2]);
        assert_eq!(c.giant_fraction, 1.0);
    }

    #[test]
    fn scc_one_way_edge_is_two_singletons() {
        let net = net_of(&[("a", "b")]);
        let c = strongly_connected_components(&net).unwrap();
        assert_eq!(c.sizes.len(), 2);
        assert!(c.sizes.iter().all(|&s| s == 1));
        assert_eq!(c.second_largest, 1);
    }

    #[test]
    fn scc_self_loop_vertex_is_size_one() {
        let net = net_of(&[("a", "a"), ("b", "c"), ("c", "b")]);
        let c = strongly_connected_components(&net).unwrap();
        let mut sizes = c.sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn scc_long_chain_does_not_overflow_stack() {
        let txs: Vec<Transmission> =
            (0..200_000u32).map(|i| ham(&format!("v{i}"), &format!("v{}", i + 1))).collect();
        let net = EmailNetwork::from_transmissions(txs, None);
        let c = strongly_connected_components(&net).unwrap();
        assert_eq!(c.sizes.len(), 200_001);
    }

    #[test]
    fn connected_components_partition() {
        let net = net_of(&[("a", "b"), ("b", "c"), ("x", "y"), ("z", "z")]);
        let c = connected_components(&net.undirected_view()).unwrap();
        let mut sizes = c.sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(c.membership.len(), 6);
        assert_eq!(c.giant_fraction, 0.5);
        assert_eq!(c.second_largest, 2);
        let total: usize = c.sizes.iter().sum();
        assert_eq!(total, net.vertex_count());
    }

    #[test]
    fn components_mode_mismatch_errors() {
        let net = crate::synth::generate_random(10, 0.5, 3).unwrap();
        assert!(matches!(
            components(&net, ComponentMode::DirectedStrong),
            Err(MetricsError::RequiresDirected)
        ));
    }

    #[test]
    fn size_histogram_single_component() {
        let net = net_of(&[("a", "b"), ("b", "c")]);
        let c = connected_components(&net.undirected_view()).unwrap();
        assert_eq!(component_size_histogram(&c), vec![(3, 1.0)]);
    }

    #[test]
    fn size_histogram_mixed_sizes() {
        let net = net_of(&[("a", "a"), ("b", "b"), ("c", "d")]);
        let c = connected_components(&net.undirected_view()).unwrap();
        assert_eq!(component_size_histogram(&c), vec![(1, 0.5), (2, 0.5)]);
    }

    #[test]
    fn reciprocity_two_cycle_is_one() {
        let net = net_of(&[("a", "b"), ("b", "a")]);
        assert_eq!(reciprocity(&net).unwrap(), 1.0);
    }

    #[test]
    fn reciprocity_one_way_is_zero() {
        let net = net_of(&[("a", "b"), ("b", "c")]);
        assert_eq!(reciprocity(&net).unwrap(), 0.0);
    }

    mod scc_oracle {
        use super::*;
        use rand::Rng;

        /// Reachability closure by iterated relaxation; quadratic memory,
        /// fine for the small graphs it checks.
        pub(crate) fn brute_force_partition(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
            let mut reach = vec![vec![false; n]; n];
            for v in 0..n {
                reach[v][v] = true;
            }
            for &(a, b) in edges {
                reach[a as usize][b as usize] = true;
            }
            loop {
                let mut changed = false;
                for i in 0..n {
                    for j in 0..n {
                        if !reach[i][j] {
                            continue;
                        }
                        for k in 0..n {
                            if reach[j][k] && !reach[i][k] {
                                reach[i][k] = true;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let mut assigned = vec![false; n];
            let mut parts = Vec::new();
            for v in 0..n {
                if assigned[v] {
                    continue;
                }
                let mut part = Vec::new();
                for w in 0..n {
                    if reach[v][w] && reach[w][v] {
                        part.push(w as u32);
                        assigned[w] = true;
                    }
                }
                parts.push(part);
            }
            parts
        }

        pub(crate) fn canonical(mut parts: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
            for p in &mut parts {
                p.sort_unstable();
            }
            parts.sort();
            parts
        }

        pub(crate) fn partition_of(summary: &ComponentSummary) -> Vec<Vec<u32>> {
            let mut parts = vec![Vec::new(); summary.sizes.len()];
            for (v, &c) in summary.membership.iter().enumerate() {
                parts[c as usize].push(v as u32);
            }
            parts
        }

        #[test]
        fn matches_brute_force_on_random_digraphs() {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..25 {
                let n = rng.random_range(2..40usize);
                let density = rng.random_range(0.02..0.2f64);
                let mut edges = Vec::new();
                for a in 0..n as u32 {
                    for b in 0..n as u32 {
                        if rng.random_bool(density) {
                            edges.push((a, b));
                        }
                    }
                }
                // A self-loop per vertex keeps every vertex in the network
                // without changing the partition.
                let txs: Vec<Transmission> = edges
                    .iter()
                    .map(|&(a, b)| ham(&format!("v{a}"), &format!("v{b}")))
                    .chain((0..n as u32).map(|v| ham(&format!("v{v}"), &format!("v{v}"))))
                    .collect();
                let net = EmailNetwork::from_transmissions(txs, None);
                // Transmissions intern addresses in encounter order; remap
                // oracle vertex ids accordingly.
                let mut remap = vec![0u32; n];
                for v in 0..n {
                    let addr = format!("v{v}");
                    let id = net
                        .addresses()
                        .iter()
                        .position(|a| *a == addr)
                        .expect("every vertex got a self-loop");
                    remap[v] = id as u32;
                }
                let mapped: Vec<(u32, u32)> = edges
                    .iter()
                    .map(|&(a, b)| (remap[a as usize], remap[b as usize]))
                    .collect();
                let got =
                    canonical(partition_of(&strongly_connected_components(&net).unwrap()));
                let want = canonical(brute_force_partition(n, &mapped));
                assert_eq!(got, want);
            }
        }
    }
}
