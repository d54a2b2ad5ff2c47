//! Temporal reachability on time-labelled graphs.
//!
//! A temporal path is a simple path whose edge labels strictly increase along
//! it. Labels are distinct in every [`TemporalNetwork`], so this agrees with the
//! non-decreasing definition up to null events.
//!
//! The single-source scan processes edges in increasing label order and keeps,
//! for every vertex, the fewest hops over temporal paths from the source that
//! use only the edges seen so far. When edge `e = {u, v}` is processed, every
//! edge with a smaller label has already been seen, so the values at `u` and `v`
//! are final with respect to paths ending before `tau_e`; relaxing
//! `hops[v] <- hops[u] + 1` and `hops[u] <- hops[v] + 1` from the values held
//! *before* the edge (so that `e` is not used twice) is therefore exact. A
//! minimum-hop temporal walk is always a simple path (cutting out a cycle keeps
//! the labels increasing), so the scan returns `l(u ~> v)` for simple paths.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::TemporalNetwork;

/// Hop count marking an unreachable vertex.
pub const UNREACHABLE: u32 = u32::MAX;

/// Reachability and minimal hop counts from one source.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachabilityResult {
    pub source: usize,
    pub reachable: Vec<bool>,
    /// Fewest edges on a temporal path from the source, [`UNREACHABLE`] if none.
    pub hops: Vec<u32>,
    /// Earliest label with which each vertex can be reached: `-inf` for the
    /// source, `+inf` when unreachable.
    pub last_time: Vec<f64>,
}

impl ReachabilityResult {
    pub fn hops_to(&self, v: usize) -> Option<u32> {
        (self.hops[v] != UNREACHABLE).then_some(self.hops[v])
    }

    pub fn num_reachable(&self) -> usize {
        self.reachable.iter().filter(|&&r| r).count()
    }

    pub fn reaches_all(&self) -> bool {
        self.reachable.iter().all(|&r| r)
    }
}

fn check_vertex(g: &TemporalNetwork, v: usize) -> Result<()> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    Ok(())
}

/// Single ascending scan over the edges from `source`.
pub fn temporal_reach(g: &TemporalNetwork, source: usize) -> Result<ReachabilityResult> {
    check_vertex(g, source)?;
    let n = g.n();
    let mut hops = vec![UNREACHABLE; n];
    let mut last_time = vec![f64::INFINITY; n];
    hops[source] = 0;
    last_time[source] = f64::NEG_INFINITY;
    for e in g.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        let (hu, hv) = (hops[u], hops[v]);
        if hu == UNREACHABLE && hv == UNREACHABLE {
            continue;
        }
        if hu != UNREACHABLE && hu + 1 < hv {
            if hv == UNREACHABLE {
                last_time[v] = e.tau;
            }
            hops[v] = hu + 1;
        }
        if hv != UNREACHABLE && hv + 1 < hu {
            if hu == UNREACHABLE {
                last_time[u] = e.tau;
            }
            hops[u] = hv + 1;
        }
    }
    let reachable = hops.iter().map(|&h| h != UNREACHABLE).collect();
    Ok(ReachabilityResult { source, reachable, hops, last_time })
}

/// Number of vertices reachable from `source` (including itself).
fn reach_count(g: &TemporalNetwork, source: usize) -> usize {
    let mut seen = vec![false; g.n()];
    seen[source] = true;
    let mut count = 1;
    for e in g.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        if seen[u] != seen[v] {
            seen[u] = true;
            seen[v] = true;
            count += 1;
            if count == g.n() {
                break;
            }
        }
    }
    count
}

/// Whether `v` has a temporal path to every vertex.
pub fn is_temporal_source(g: &TemporalNetwork, v: usize) -> Result<bool> {
    check_vertex(g, v)?;
    Ok(reach_count(g, v) == g.n())
}

/// Summary of temporal connectivity over all sources.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectivityReport {
    pub n: usize,
    pub m: usize,
    pub temporally_connected: bool,
    pub num_temporal_sources: usize,
    /// Smallest-index vertex that is not a temporal source.
    pub witness_non_source: Option<usize>,
    /// Largest `l(u ~> v)` over ordered pairs `u != v` with `u ~> v`.
    pub max_shortest_hops: u32,
}

/// Full report: one scan per source, `O(n m)`, run in parallel.
pub fn connectivity_report(g: &TemporalNetwork) -> ConnectivityReport {
    let per_source: Vec<(bool, u32)> = (0..g.n())
        .into_par_iter()
        .map(|s| {
            let r = temporal_reach(g, s).expect("source in range");
            let max_hops = r.hops.iter().copied().filter(|&h| h != UNREACHABLE).max().unwrap_or(0);
            (r.reaches_all(), max_hops)
        })
        .collect();
    let num_temporal_sources = per_source.iter().filter(|p| p.0).count();
    ConnectivityReport {
        n: g.n(),
        m: g.m(),
        temporally_connected: num_temporal_sources == g.n(),
        num_temporal_sources,
        witness_non_source: per_source.iter().position(|p| !p.0),
        max_shortest_hops: per_source.iter().map(|p| p.1).max().unwrap_or(0),
    }
}

/// Largest vertex count for which [`is_temporally_connected`] uses the
/// all-sources bitset scan (memory `n^2 / 8` bytes).
pub const BITSET_LIMIT: usize = 1 << 15;

/// Boolean temporal connectivity.
///
/// One ascending scan carries, for every vertex, the bitset of sources that
/// have reached it; edge `{u, v}` merges the two sets. The graph is temporally
/// connected iff every set ends full. The scan stops as soon as all sets are
/// full, or as soon as some vertex has no edges left while its set is not full.
/// Falls back to per-source scans with early exit for `n > BITSET_LIMIT`.
pub fn is_temporally_connected(g: &TemporalNetwork) -> bool {
    let n = g.n();
    if n <= 1 {
        return true;
    }
    if n > BITSET_LIMIT {
        return (0..n).all(|s| reach_count(g, s) == n);
    }
    let mut remaining = vec![0u32; n];
    for e in g.edges() {
        remaining[e.u as usize] += 1;
        remaining[e.v as usize] += 1;
    }
    if remaining.contains(&0) {
        return false;
    }
    let words = n.div_ceil(64);
    let tail_mask = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let mut sets = vec![0u64; n * words];
    for v in 0..n {
        sets[v * words + v / 64] |= 1u64 << (v % 64);
    }
    let mut full = vec![false; n];
    let mut num_full = 0usize;
    for e in g.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        remaining[u] -= 1;
        remaining[v] -= 1;
        if !(full[u] && full[v]) {
            let (lo, hi) = sets.split_at_mut(v * words);
            let su = &mut lo[u * words..(u + 1) * words];
            let sv = &mut hi[..words];
            let mut all = u64::MAX;
            for (a, b) in su[..words - 1].iter_mut().zip(sv[..words - 1].iter_mut()) {
                let x = *a | *b;
                *a = x;
                *b = x;
                all &= x;
            }
            let x = su[words - 1] | sv[words - 1];
            su[words - 1] = x;
            sv[words - 1] = x;
            let complete = all == u64::MAX && x == tail_mask;
            if complete {
                for x in [u, v] {
                    if !full[x] {
                        full[x] = true;
                        num_full += 1;
                    }
                }
                if num_full == n {
                    return true;
                }
            }
        }
        if (remaining[u] == 0 && !full[u]) || (remaining[v] == 0 && !full[v]) {
            return false;
        }
    }
    num_full == n
}

/// Length of the longest walk with strictly increasing labels (vertices may
/// repeat, edges cannot). An upper bound for the longest temporal path.
pub fn longest_increasing_walk(g: &TemporalNetwork) -> usize {
    let mut best = vec![0u32; g.n()];
    for e in g.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        let (lu, lv) = (best[u], best[v]);
        best[u] = lu.max(lv + 1);
        best[v] = lv.max(lu + 1);
    }
    best.into_iter().max().unwrap_or(0) as usize
}

/// Incident edges per vertex in increasing label order: `(other, tau, edge index)`.
fn adjacency(g: &TemporalNetwork) -> Vec<Vec<(u32, f64, u32)>> {
    let mut adj = vec![Vec::new(); g.n()];
    for (i, e) in g.edges().iter().enumerate() {
        adj[e.u as usize].push((e.v, e.tau, i as u32));
        adj[e.v as usize].push((e.u, e.tau, i as u32));
    }
    adj
}

/// For every edge and direction, the longest increasing walk that starts by
/// traversing that edge in that direction: `[from u, from v]`.
fn walk_suffix_bounds(g: &TemporalNetwork) -> Vec<[u32; 2]> {
    let mut best = vec![0u32; g.n()];
    let mut out = vec![[0u32; 2]; g.m()];
    for (i, e) in g.edges().iter().enumerate().rev() {
        let (u, v) = (e.u as usize, e.v as usize);
        let from_u = 1 + best[v];
        let from_v = 1 + best[u];
        out[i] = [from_u, from_v];
        best[u] = best[u].max(from_u);
        best[v] = best[v].max(from_v);
    }
    out
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    #[inline]
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::SearchAborted { nodes: self.limit });
        }
        Ok(())
    }
}

/// Exact longest temporal (simple) path, by branch and bound over paths in
/// label order, pruned with walk-length upper bounds. Errors rather than
/// guessing when more than `node_budget` search nodes would be needed.
pub fn longest_increasing_path_exact(g: &TemporalNetwork, node_budget: u64) -> Result<usize> {
    if g.m() == 0 {
        return Ok(0);
    }
    let adj = adjacency(g);
    let bounds = walk_suffix_bounds(g);
    let ceiling = longest_increasing_walk(g) as u32;
    let mut visited = vec![false; g.n()];
    let mut best = 1u32;
    let mut budget = Budget { used: 0, limit: node_budget };

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        x: u32,
        last: f64,
        len: u32,
        g: &TemporalNetwork,
        adj: &[Vec<(u32, f64, u32)>],
        bounds: &[[u32; 2]],
        visited: &mut [bool],
        best: &mut u32,
        ceiling: u32,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.tick()?;
        *best = (*best).max(len);
        let list = &adj[x as usize];
        let start = list.partition_point(|&(_, t, _)| t <= last);
        for &(y, tau, idx) in &list[start..] {
            if *best >= ceiling {
                return Ok(());
            }
            if visited[y as usize] {
                continue;
            }
            let dir = if g.edges()[idx as usize].u == x { 0 } else { 1 };
            if len + bounds[idx as usize][dir] <= *best {
                continue;
            }
            visited[y as usize] = true;
            let r = dfs(y, tau, len + 1, g, adj, bounds, visited, best, ceiling, budget);
            visited[y as usize] = false;
            r?;
        }
        Ok(())
    }

    for s in 0..g.n() as u32 {
        if best >= ceiling {
            break;
        }
        visited[s as usize] = true;
        let r = dfs(s, f64::NEG_INFINITY, 0, g, &adj, &bounds, &mut visited, &mut best, ceiling, &mut budget);
        visited[s as usize] = false;
        r?;
    }
    Ok(best as usize)
}

/// Which path lengths [`count_monotone_paths`] counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathLength {
    /// Paths with at least this many edges.
    AtLeast(usize),
    /// Paths with exactly this many edges.
    Exactly(usize),
}

/// Count ordered temporal paths (a path and its reverse count separately when
/// both are increasing) with the given number of edges, which must be >= 1.
///
/// Every counted path is a distinct search node, so the count never exceeds
/// `node_budget` and fits in a `u64`.
pub fn count_monotone_paths(g: &TemporalNetwork, length: PathLength, node_budget: u64) -> Result<u64> {
    let (min_edges, max_edges) = match length {
        PathLength::AtLeast(k) => (k, usize::MAX),
        PathLength::Exactly(k) => (k, k),
    };
    if min_edges == 0 {
        return Err(Error::param("k", "paths must have at least one edge"));
    }
    let adj = adjacency(g);
    let mut visited = vec![false; g.n()];
    let mut budget = Budget { used: 0, limit: node_budget };
    let mut count = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        x: u32,
        last: f64,
        len: usize,
        range: (usize, usize),
        adj: &[Vec<(u32, f64, u32)>],
        visited: &mut [bool],
        count: &mut u64,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.tick()?;
        if len >= range.0 {
            *count += 1;
        }
        if len == range.1 {
            return Ok(());
        }
        let list = &adj[x as usize];
        let start = list.partition_point(|&(_, t, _)| t <= last);
        for &(y, tau, _) in &list[start..] {
            if visited[y as usize] {
                continue;
            }
            visited[y as usize] = true;
            let r = dfs(y, tau, len + 1, range, adj, visited, count, budget);
            visited[y as usize] = false;
            r?;
        }
        Ok(())
    }

    for s in 0..g.n() as u32 {
        visited[s as usize] = true;
        let r = dfs(s, f64::NEG_INFINITY, 0, (min_edges, max_edges), &adj, &mut visited, &mut count, &mut budget);
        visited[s as usize] = false;
        r?;
    }
    Ok(count)
}

/// Number of ordered temporal paths with at least `k - 1` edges; `k >= 2`.
pub fn count_monotone_paths_min_edges(g: &TemporalNetwork, k: usize, node_budget: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::param("k", format!("must be >= 2, got {k}")));
    }
    count_monotone_paths(g, PathLength::AtLeast(k - 1), node_budget)
}

/// Reachability by exhaustive enumeration of all simple temporal paths from
/// `source`. Exponential; meant as an oracle on graphs with about a dozen vertices.
pub fn brute_force_reach(g: &TemporalNetwork, source: usize) -> Result<ReachabilityResult> {
    check_vertex(g, source)?;
    let n = g.n();
    let mut hops = vec![UNREACHABLE; n];
    let mut last_time = vec![f64::INFINITY; n];
    hops[source] = 0;
    last_time[source] = f64::NEG_INFINITY;
    let mut visited = vec![false; n];
    visited[source] = true;
    // explicit stack of (vertex, label of the edge used to arrive, depth, next edge index)
    let mut stack: Vec<(usize, f64, u32, usize)> = vec![(source, f64::NEG_INFINITY, 0, 0)];
    while let Some(top) = stack.last_mut() {
        let (x, arrived, depth, next) = *top;
        if next >= g.m() {
            visited[x] = false;
            stack.pop();
            continue;
        }
        top.3 += 1;
        let e = g.edges()[next];
        if e.u as usize != x && e.v as usize != x {
            continue;
        }
        if e.tau <= arrived {
            continue;
        }
        let y = e.other(x as u32) as usize;
        if visited[y] {
            continue;
        }
        hops[y] = hops[y].min(depth + 1);
        last_time[y] = last_time[y].min(e.tau);
        visited[y] = true;
        stack.push((y, e.tau, depth + 1, 0));
    }
    let reachable = hops.iter().map(|&h| h != UNREACHABLE).collect();
    Ok(ReachabilityResult { source, reachable, hops, last_time })
}
