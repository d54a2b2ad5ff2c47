//! Temporal random geometric graph generation.
//!
//! Given points `X`, a kernel `K` and a radius `r`, every unordered pair `{u, v}`
//! with `|u - v| <= r * x_max` is joined independently with probability
//! `K(|u - v| / r)` and every realised edge receives an independent
//! `Uniform[0,1]` time-stamp.
//!
//! All randomness for the pair `(u, v)`, `u < v`, comes from the counter-based
//! stream keyed by `(seed, u, v)`: word 0 decides the edge, word 1 is the
//! time-stamp, and words 2, 3, ... are only consumed by tie repair. Because no
//! stream is shared, the cell-index generator and the all-pairs reference
//! generator produce the same graph bit for bit, in any evaluation order.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{kernel_eval, truncation_radius, Kernel, PointSet, DEFAULT_TRUNCATION_EPS};
use crate::rng::{unit_f64, CounterRng};

/// An undirected edge `u < v` carrying time-stamp `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemporalEdge {
    pub u: u32,
    pub v: u32,
    pub tau: f64,
}

impl TemporalEdge {
    pub fn new(u: usize, v: usize, tau: f64) -> Self {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        Self { u: u as u32, v: v as u32, tau }
    }

    /// The endpoint opposite to `x`.
    #[inline]
    pub fn other(&self, x: u32) -> u32 {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Vertex count plus an edge list sorted by strictly increasing time-stamp.
///
/// This is the structure all temporal algorithms run on; it carries no geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalNetwork {
    n: usize,
    edges: Vec<TemporalEdge>,
}

impl TemporalNetwork {
    /// Validates canonical orientation, index range, duplicates, labels in
    /// `[0,1]` and strictly ascending order.
    pub fn new(n: usize, edges: Vec<TemporalEdge>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::param("n", "more than 2^32 - 1 vertices"));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.u >= e.v {
                return Err(Error::InvalidEdges(format!(
                    "edge {i} ({}, {}) is a self-loop or not in canonical u < v order",
                    e.u, e.v
                )));
            }
            if e.v as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: e.v as usize, n });
            }
            if !(0.0..=1.0).contains(&e.tau) {
                return Err(Error::InvalidEdges(format!("edge {i} has time-stamp {} outside [0,1]", e.tau)));
            }
            if i > 0 && edges[i - 1].tau >= e.tau {
                return Err(Error::InvalidEdges(format!(
                    "edges {} and {i} are not in strictly increasing time order",
                    i - 1
                )));
            }
            if !seen.insert((e.u, e.v)) {
                return Err(Error::InvalidEdges(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }
        Ok(Self { n, edges })
    }

    /// Build from `(u, v, tau)` triples in any order and orientation; sorts by time.
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        let mut edges: Vec<_> = triples.iter().map(|&(u, v, t)| TemporalEdge::new(u, v, t)).collect();
        edges.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        Self::new(n, edges)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<TemporalEdge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].tau < w[1].tau));
        Self { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    /// A copy with one extra edge inserted at its time position.
    pub fn with_edge(&self, e: TemporalEdge) -> Result<Self> {
        let mut edges = self.edges.clone();
        let at = edges.partition_point(|x| x.tau < e.tau);
        edges.insert(at, e);
        Self::new(self.n, edges)
    }

    /// Rank of every edge's label among all labels (0 = earliest). Since the list
    /// is sorted this is the identity permutation on edge positions.
    pub fn label_ranks(&self) -> Vec<usize> {
        (0..self.edges.len()).collect()
    }
}

impl AsRef<TemporalNetwork> for TemporalNetwork {
    fn as_ref(&self) -> &TemporalNetwork {
        self
    }
}

/// A temporal random geometric graph: positions, generation parameters and the
/// time-labelled edges.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalGraph {
    pub points: PointSet,
    pub radius: f64,
    pub kernel: Kernel,
    pub seed: u64,
    network: TemporalNetwork,
}

impl TemporalGraph {
    /// Assemble a graph from parts, validating the edge list and the edge-length
    /// invariant `|u - v| <= r * x_max`.
    pub fn from_parts(points: PointSet, radius: f64, kernel: Kernel, seed: u64, network: TemporalNetwork) -> Result<Self> {
        if network.n() != points.len() {
            return Err(Error::param("network", "vertex count differs from point count"));
        }
        let reach = radius * truncation_radius(&kernel, DEFAULT_TRUNCATION_EPS);
        for e in network.edges() {
            let dist = points.distance(e.u as usize, e.v as usize);
            if dist > reach * (1.0 + 1e-12) {
                return Err(Error::InvalidEdges(format!(
                    "edge ({}, {}) has length {dist} > r * x_max = {reach}",
                    e.u, e.v
                )));
            }
        }
        Ok(Self { points, radius, kernel, seed, network })
    }

    pub fn network(&self) -> &TemporalNetwork {
        &self.network
    }

    pub fn n(&self) -> usize {
        self.network.n()
    }

    pub fn m(&self) -> usize {
        self.network.m()
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        self.network.edges()
    }
}

impl AsRef<TemporalNetwork> for TemporalGraph {
    fn as_ref(&self) -> &TemporalNetwork {
        &self.network
    }
}

/// Spatial hash of a point set into `g^d` equal cells of width `1/g`.
#[derive(Clone, Debug)]
pub struct CellIndex {
    dim: usize,
    per_axis: usize,
    cell_width: f64,
    start: Vec<usize>,
    items: Vec<u32>,
}

const MAX_CELLS: usize = 1 << 26;

/// Hash `points` into cells of width `1 / floor(1 / cell_size) >= cell_size`.
pub fn build_cell_index(points: &PointSet, cell_size: f64) -> Result<CellIndex> {
    if !(cell_size > 0.0 && cell_size <= 1.0) {
        return Err(Error::param("cell_size", format!("must lie in (0, 1], got {cell_size}")));
    }
    let per_axis = (1.0 / cell_size).floor() as usize;
    build_with_per_axis(points, per_axis)
}

fn build_with_per_axis(points: &PointSet, per_axis: usize) -> Result<CellIndex> {
    let dim = points.dim();
    let total = per_axis
        .checked_pow(dim as u32)
        .filter(|&t| t <= MAX_CELLS)
        .ok_or_else(|| Error::param("cell_size", format!("{per_axis}^{dim} cells exceed the limit of {MAX_CELLS}")))?;
    let mut counts = vec![0usize; total + 1];
    let cell_ids: Vec<usize> = points.iter().map(|p| flat_cell(p, per_axis)).collect();
    for &c in &cell_ids {
        counts[c + 1] += 1;
    }
    for i in 0..total {
        counts[i + 1] += counts[i];
    }
    let start = counts.clone();
    let mut fill = counts;
    let mut items = vec![0u32; points.len()];
    for (i, &c) in cell_ids.iter().enumerate() {
        items[fill[c]] = i as u32;
        fill[c] += 1;
    }
    Ok(CellIndex { dim, per_axis, cell_width: 1.0 / per_axis as f64, start, items })
}

#[inline]
fn axis_cell(x: f64, per_axis: usize) -> usize {
    ((x * per_axis as f64) as usize).min(per_axis - 1)
}

fn flat_cell(p: &[f64], per_axis: usize) -> usize {
    p.iter().rev().fold(0, |acc, &x| acc * per_axis + axis_cell(x, per_axis))
}

impl CellIndex {
    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    pub fn num_cells(&self) -> usize {
        self.start.len() - 1
    }

    /// Integer coordinates of the cell containing `p`.
    pub fn cell_coords(&self, p: &[f64]) -> Vec<usize> {
        p.iter().map(|&x| axis_cell(x, self.per_axis)).collect()
    }

    /// Vertices in the cell with flat index `c`.
    pub fn cell(&self, c: usize) -> &[u32] {
        &self.items[self.start[c]..self.start[c + 1]]
    }

    /// `(coords, members)` of every non-empty cell.
    pub fn occupied(&self) -> Vec<(Vec<usize>, &[u32])> {
        (0..self.num_cells())
            .filter(|&c| self.start[c + 1] > self.start[c])
            .map(|c| (self.unflatten(c), self.cell(c)))
            .collect()
    }

    fn unflatten(&self, mut c: usize) -> Vec<usize> {
        (0..self.dim)
            .map(|_| {
                let x = c % self.per_axis;
                c /= self.per_axis;
                x
            })
            .collect()
    }

    /// Flat indices of the `3^d` cells around `c` with torus wrap, deduplicated
    /// (fewer than `3^d` when the grid has under three cells per axis).
    pub fn neighbor_cells(&self, c: usize) -> Vec<usize> {
        let base = self.unflatten(c);
        let g = self.per_axis as isize;
        let mut out = Vec::with_capacity(3usize.pow(self.dim as u32));
        let combos = 3usize.pow(self.dim as u32);
        for mut k in 0..combos {
            let mut flat = 0usize;
            let mut mul = 1usize;
            for &b in base.iter() {
                let off = (k % 3) as isize - 1;
                k /= 3;
                let x = (b as isize + off).rem_euclid(g) as usize;
                flat += x * mul;
                mul *= self.per_axis;
            }
            out.push(flat);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All vertices in the cells neighbouring the cell of `p`; a superset of the
    /// vertices within distance `cell_width` of `p`.
    pub fn candidates(&self, p: &[f64]) -> Vec<u32> {
        let c = flat_cell(p, self.per_axis);
        self.neighbor_cells(c).into_iter().flat_map(|n| self.cell(n).iter().copied()).collect()
    }
}

/// Time-stamp drawn for pair `(u, v)` if the edge is realised, where `k` is the
/// connection probability of the pair.
#[inline]
fn pair_trial(seed: u64, u: usize, v: usize, k: f64) -> Option<f64> {
    if k <= 0.0 {
        return None;
    }
    let stream = CounterRng::new(seed, u as u64, v as u64);
    if unit_f64(stream.word_at(0)) < k {
        Some(unit_f64(stream.word_at(1)))
    } else {
        None
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be a positive finite radius, got {r}")));
    }
    Ok(())
}

/// Generate a temporal graph. Uses the cell index when `r * x_max <= 1/3`
/// (at least three cells per axis), else the all-pairs scan.
pub fn generate_graph(points: &PointSet, kernel: &Kernel, r: f64, seed: u64) -> Result<TemporalGraph> {
    check_radius(r)?;
    let x_max = truncation_radius(kernel, DEFAULT_TRUNCATION_EPS);
    let reach = r * x_max;
    let n = points.len();
    let d = points.dim();
    // cap the number of cells at about 4n so sparse high-dimensional inputs stay cheap
    let cap = ((4 * n.max(1)) as f64).powf(1.0 / d as f64).floor() as usize;
    let per_axis = ((1.0 / reach).floor() as usize).min(cap);
    if reach > 0.5 || per_axis < 3 {
        return generate_graph_all_pairs(points, kernel, r, seed);
    }
    let index = build_with_per_axis(points, per_axis)?;
    let reach_sq = reach * reach;
    let mut edges: Vec<TemporalEdge> = (0..index.num_cells())
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut local = Vec::new();
            let members = index.cell(c);
            if members.is_empty() {
                return local.into_iter();
            }
            for nc in index.neighbor_cells(c) {
                let others = index.cell(nc);
                for &u in members {
                    let pu = points.point(u as usize);
                    for &v in others {
                        if v <= u {
                            continue;
                        }
                        let dsq = crate::model::torus_distance_sq(pu, points.point(v as usize));
                        if dsq > reach_sq {
                            continue;
                        }
                        let k = kernel_eval(kernel, dsq.sqrt() / r);
                        if let Some(tau) = pair_trial(seed, u as usize, v as usize, k) {
                            local.push(TemporalEdge { u, v, tau });
                        }
                    }
                }
            }
            local.into_iter()
        })
        .collect();
    finalize_edges(&mut edges, |e, attempt| pair_redraw(seed, e, attempt));
    let network = TemporalNetwork::from_sorted_unchecked(n, edges);
    Ok(TemporalGraph { points: points.clone(), radius: r, kernel: kernel.clone(), seed, network })
}

/// Reference generator: scans all `n(n-1)/2` pairs with the same per-pair
/// randomness as [`generate_graph`].
pub fn generate_graph_all_pairs(points: &PointSet, kernel: &Kernel, r: f64, seed: u64) -> Result<TemporalGraph> {
    check_radius(r)?;
    let reach = r * truncation_radius(kernel, DEFAULT_TRUNCATION_EPS);
    let reach_sq = reach * reach;
    let n = points.len();
    let mut edges: Vec<TemporalEdge> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let pu = points.point(u);
            let mut local = Vec::new();
            for v in u + 1..n {
                let dsq = crate::model::torus_distance_sq(pu, points.point(v));
                if dsq > reach_sq {
                    continue;
                }
                let k = kernel_eval(kernel, dsq.sqrt() / r);
                if let Some(tau) = pair_trial(seed, u, v, k) {
                    local.push(TemporalEdge { u: u as u32, v: v as u32, tau });
                }
            }
            local.into_iter()
        })
        .collect();
    finalize_edges(&mut edges, |e, attempt| pair_redraw(seed, e, attempt));
    let network = TemporalNetwork::from_sorted_unchecked(n, edges);
    Ok(TemporalGraph { points: points.clone(), radius: r, kernel: kernel.clone(), seed, network })
}

fn pair_redraw(seed: u64, e: &TemporalEdge, attempt: u64) -> f64 {
    unit_f64(CounterRng::new(seed, e.u as u64, e.v as u64).word_at(1 + attempt))
}

/// Sort by `(tau, u, v)` and re-draw colliding labels until all are distinct.
/// Within a group of equal labels the first edge in `(u, v)` order keeps its
/// label and the later ones are re-drawn.
fn finalize_edges<F: FnMut(&TemporalEdge, u64) -> f64>(edges: &mut [TemporalEdge], mut redraw: F) {
    let key = |e: &TemporalEdge| (e.tau.to_bits(), e.u, e.v);
    edges.par_sort_unstable_by_key(key);
    let mut attempt = 0u64;
    loop {
        let mut changed = false;
        attempt += 1;
        for i in 1..edges.len() {
            if edges[i].tau == edges[i - 1].tau {
                edges[i].tau = redraw(&edges[i], attempt);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        edges.par_sort_unstable_by_key(key);
    }
}

/// Attach i.i.d. `Uniform[0,1]` labels to the given pairs, drawn in input order
/// from `rng`, and return the edges sorted by label.
pub fn assign_timestamps<R: Rng + ?Sized>(pairs: &[(usize, usize)], rng: &mut R) -> Result<Vec<TemporalEdge>> {
    let mut seen = HashSet::with_capacity(pairs.len());
    let mut edges = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs {
        if u == v {
            return Err(Error::InvalidEdges(format!("self-loop at vertex {u}")));
        }
        let e = TemporalEdge::new(u, v, rng.random::<f64>());
        if !seen.insert((e.u, e.v)) {
            return Err(Error::InvalidEdges(format!("duplicate pair ({}, {})", e.u, e.v)));
        }
        edges.push(e);
    }
    finalize_edges(&mut edges, |_, _| rng.random::<f64>());
    Ok(edges)
}

/// Independently keep each edge with probability `alpha`, using the stream
/// keyed by `(seed, u, v)` in the thinning domain.
pub fn thin_edges(g: &TemporalGraph, alpha: f64, seed: u64) -> Result<TemporalGraph> {
    let edges: Vec<_> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| {
            let s = CounterRng::new(seed ^ crate::rng::domain::THINNING, e.u as u64, e.v as u64);
            unit_f64(s.word_at(0)) < alpha
        })
        .collect();
    let kernel = Kernel::alpha_hard(alpha)?;
    Ok(TemporalGraph {
        points: g.points.clone(),
        radius: g.radius,
        kernel,
        seed,
        network: TemporalNetwork::from_sorted_unchecked(g.n(), edges),
    })
}
