//! Directed percolation on the box lattice of `[0, 1/2]^2` and its coupling
//! with temporal random geometric graphs (d = 2).
//!
//! The square `[0, 1/2]^2` is cut into `(b+1)^2` boxes of side `ell = r / (4 sqrt 2)`.
//! Box `(i, j)` has a right edge to `(i+1, j)` and an up edge to `(i, j+1)`;
//! both carry the time window `T_{i+j}`. Windows are split into three regions:
//! short windows of width `1/x` near both ends (`x = 4q` is the rounded
//! `n^eps`), and equal windows filling `(1/4, 3/4]` in between.
//!
//! Rounding: `b = round(1/(2 ell)) - 1`, after which `ell = 1/(2(b+1))` and the
//! percolation layer works with `r_eff = 4 sqrt(2) ell`. `q = max(1, round(n^eps / 4))`.

use rayon::prelude::*;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::generator::TemporalGraph;
use crate::model::PointSet;
use crate::rng::{domain, CounterRng};
use crate::stats::Proportion;
use crate::temporal::temporal_reach;

/// A box index `(i, j)` with `0 <= i, j <= b`.
pub type BoxId = (usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct BoxGrid {
    n: u64,
    c: f64,
    ell: f64,
    b: usize,
}

impl BoxGrid {
    pub fn new(n: u64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("C", format!("must be positive, got {c}")));
        }
        let r = c * (n as f64).powf(-1.0 / 3.0);
        let ell_req = r / (4.0 * std::f64::consts::SQRT_2);
        let side = (1.0 / (2.0 * ell_req)).round();
        if side < 2.0 {
            return Err(Error::Infeasible {
                reason: format!("box side {ell_req:.4} leaves fewer than 2 boxes per axis (b < 1)"),
                nearest_n: None,
            });
        }
        let b = side as usize - 1;
        Ok(Self { n, c, ell: 1.0 / (2.0 * side), b })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Requested constant `C`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Boxes per axis, `b + 1`.
    pub fn side(&self) -> usize {
        self.b + 1
    }

    pub fn num_boxes(&self) -> usize {
        self.side() * self.side()
    }

    /// Radius implied by the rounded box side.
    pub fn r_eff(&self) -> f64 {
        4.0 * std::f64::consts::SQRT_2 * self.ell
    }

    pub fn c_eff(&self) -> f64 {
        self.r_eff() * (self.n as f64).cbrt()
    }

    /// Expected points per box, `n ell^2 = (C_eff^2 / 32) n^{1/3}`.
    pub fn mean_count(&self) -> f64 {
        self.n as f64 * self.ell * self.ell
    }

    /// Box containing `p`, or `None` outside `[0, 1/2]^2`.
    pub fn box_of(&self, p: &[f64]) -> Option<BoxId> {
        if p.len() != 2 || p[0] > 0.5 || p[1] > 0.5 {
            return None;
        }
        let idx = |x: f64| ((x / self.ell).floor() as usize).min(self.b);
        Some((idx(p[0]), idx(p[1])))
    }

    pub fn box_index(&self, bx: BoxId) -> usize {
        bx.0 * self.side() + bx.1
    }

    /// Boxes `(i, j)` with `i + j = k`.
    pub fn diagonal(&self, k: usize) -> Vec<BoxId> {
        (0..=self.b).filter_map(|i| k.checked_sub(i).filter(|&j| j <= self.b).map(|j| (i, j))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeEdge {
    pub from: BoxId,
    pub to: BoxId,
    /// Window index `i + j` of the source box.
    pub m: usize,
}

/// Right and up edges between boxes, including the top row and right column.
#[derive(Clone, Debug)]
pub struct DualLattice {
    side: usize,
    edges: Vec<LatticeEdge>,
    out: Vec<Vec<usize>>,
}

impl DualLattice {
    pub fn new(grid: &BoxGrid) -> Self {
        let side = grid.side();
        let mut edges = Vec::with_capacity(2 * grid.b() * side);
        let mut out = vec![Vec::with_capacity(2); side * side];
        for i in 0..side {
            for j in 0..side {
                for to in [(i + 1, j), (i, j + 1)] {
                    if to.0 < side && to.1 < side {
                        out[i * side + j].push(edges.len());
                        edges.push(LatticeEdge { from: (i, j), to, m: i + j });
                    }
                }
            }
        }
        Self { side, edges, out }
    }

    pub fn edges(&self) -> &[LatticeEdge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boxes(&self) -> usize {
        self.side * self.side
    }

    /// Indices of the edges leaving `bx`.
    pub fn out_edges(&self, bx: BoxId) -> &[usize] {
        &self.out[bx.0 * self.side + bx.1]
    }

    /// Edges are open per the flags; returns the set of boxes reachable from any of `from`.
    pub fn reachable(&self, open: &[bool], from: &[BoxId]) -> Vec<bool> {
        let mut seen = vec![false; self.num_boxes()];
        let mut stack: Vec<BoxId> = Vec::new();
        for &b in from {
            let k = b.0 * self.side + b.1;
            if !seen[k] {
                seen[k] = true;
                stack.push(b);
            }
        }
        while let Some(b) = stack.pop() {
            for &e in self.out_edges(b) {
                if !open[e] {
                    continue;
                }
                let to = self.edges[e].to;
                let k = to.0 * self.side + to.1;
                if !seen[k] {
                    seen[k] = true;
                    stack.push(to);
                }
            }
        }
        seen
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    R1,
    R2,
    R3,
}

/// Time windows `T_m = (lo_m, hi_m]` for `m` in `0..2b`.
#[derive(Clone, Debug)]
pub struct RangeTable {
    eps: f64,
    n: u64,
    b: usize,
    q: usize,
    bounds: Vec<f64>,
}

impl RangeTable {
    pub fn new(n: u64, eps: f64, b: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 / 3.0) {
            return Err(Error::param("eps", format!("must lie in (0, 1/3), got {eps}")));
        }
        let q = (((n as f64).powf(eps) / 4.0).round() as usize).max(1);
        if b <= q {
            return Err(Error::Infeasible {
                reason: format!("n^eps/4 rounds to {q} but b = {b}; the middle region is empty"),
                nearest_n: None,
            });
        }
        let x = 4.0 * q as f64;
        let w2 = 0.5 / (2 * (b - q)) as f64;
        let lo = |m: usize| -> f64 {
            if m < q {
                m as f64 / x
            } else if m < 2 * b - q {
                0.25 + (m - q) as f64 * w2
            } else {
                1.0 - (2 * b - m) as f64 / x
            }
        };
        let mut bounds: Vec<f64> = (0..2 * b).map(lo).collect();
        bounds.push(1.0);
        Ok(Self { eps, n, b, q, bounds })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Rounded `n^eps / 4`: first index of the middle region.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Effective `n^eps` used by every window, `4q`.
    pub fn n_eps(&self) -> f64 {
        4.0 * self.q as f64
    }

    /// Number of windows, `2b`.
    pub fn len(&self) -> usize {
        2 * self.b
    }

    pub fn is_empty(&self) -> bool {
        self.b == 0
    }

    pub fn interval(&self, m: usize) -> (f64, f64) {
        (self.bounds[m], self.bounds[m + 1])
    }

    pub fn width(&self, m: usize) -> f64 {
        self.bounds[m + 1] - self.bounds[m]
    }

    pub fn contains(&self, m: usize, tau: f64) -> bool {
        let (lo, hi) = self.interval(m);
        tau > lo && tau <= hi
    }

    pub fn region(&self, m: usize) -> Region {
        if m < self.q {
            Region::R1
        } else if m < 2 * self.b - self.q {
            Region::R2
        } else {
            Region::R3
        }
    }

    /// Middle-window width in its original closed form,
    /// `4(x - 2) / (x (8b - x))` with `x = n^eps`. This does not tile `(1/4, 3/4]`
    /// and is kept only for the contour series.
    pub fn literal_middle_width(&self) -> f64 {
        let x = self.n_eps();
        4.0 * (x - 2.0) / (x * (8.0 * self.b as f64 - x))
    }
}

/// Grid, lattice and windows for `(n, C, eps)`. Infeasible inputs report the
/// nearest `n` (searching in 1% steps) for which rounding succeeds.
pub fn build_grid(n: u64, c: f64, eps: f64) -> Result<(BoxGrid, DualLattice, RangeTable)> {
    match try_build(n, c, eps) {
        Err(Error::Infeasible { reason, .. }) => Err(Error::Infeasible { reason, nearest_n: nearest_feasible_n(n, c, eps) }),
        other => other,
    }
}

fn try_build(n: u64, c: f64, eps: f64) -> Result<(BoxGrid, DualLattice, RangeTable)> {
    let grid = BoxGrid::new(n, c)?;
    let ranges = RangeTable::new(n, eps, grid.b())?;
    let lattice = DualLattice::new(&grid);
    Ok((grid, lattice, ranges))
}

fn nearest_feasible_n(n: u64, c: f64, eps: f64) -> Option<u64> {
    let mut scale = 1.0f64;
    for _ in 0..4000 {
        scale *= 1.01;
        let up = (n as f64 * scale).round();
        let down = (n as f64 / scale).round();
        for cand in [down, up] {
            if (1.0..1e15).contains(&cand) && try_build(cand as u64, c, eps).is_ok() {
                return Some(cand as u64);
            }
        }
    }
    None
}

/// `1 - (1 - a)^k`, optionally raised to `power`.
pub fn open_probability(alpha_width: f64, trials: u64, power: Option<u64>) -> f64 {
    let a = alpha_width.clamp(0.0, 1.0);
    let q = if a >= 1.0 {
        if trials == 0 { 0.0 } else { 1.0 }
    } else {
        -(trials as f64 * (-a).ln_1p()).exp_m1()
    };
    match power {
        None => q,
        Some(0) => 1.0,
        Some(k) if q > 0.0 => (k as f64 * q.ln()).exp(),
        Some(_) => 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PercolationParams {
    pub n: u64,
    pub c: f64,
    pub t: f64,
    pub alpha: f64,
    pub eps: f64,
}

impl PercolationParams {
    pub fn new(n: u64, c: f64, t: f64, alpha: f64, eps: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::param("t", format!("must lie in (0, 1), got {t}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param("alpha", format!("must lie in (0, 1], got {alpha}")));
        }
        Ok(Self { n, c, t, alpha, eps })
    }
}

/// Lattice with per-edge open probabilities.
#[derive(Clone, Debug)]
pub struct PercolationModel {
    pub params: PercolationParams,
    pub grid: BoxGrid,
    pub lattice: DualLattice,
    pub ranges: RangeTable,
    /// `floor((1 - t) N)`.
    pub n_minus: u64,
    /// `ceil((1 + t) N)`.
    pub n_plus: u64,
    probs: Vec<f64>,
}

impl PercolationModel {
    pub fn new(params: PercolationParams) -> Result<Self> {
        let (grid, lattice, ranges) = build_grid(params.n, params.c, params.eps)?;
        let big_n = grid.mean_count();
        let n_minus = ((1.0 - params.t) * big_n).floor() as u64;
        let n_plus = ((1.0 + params.t) * big_n).ceil() as u64;
        let mut model = Self { params, grid, lattice, ranges, n_minus, n_plus, probs: Vec::new() };
        model.probs = model.lattice.edges().iter().map(|e| model.edge_open_probability(e.m)).collect();
        Ok(model)
    }

    /// `N`, the expected number of points per box.
    pub fn mean_count(&self) -> f64 {
        self.grid.mean_count()
    }

    pub fn edge_open_probability(&self, m: usize) -> f64 {
        let a = self.params.alpha * self.ranges.width(m);
        match self.ranges.region(m) {
            Region::R2 => open_probability(a, self.n_minus, None),
            Region::R1 | Region::R3 => open_probability(a, self.n_minus, Some(self.n_plus)),
        }
    }

    /// Open probability of each lattice edge, in lattice order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Replace all probabilities (for tests and what-if runs).
    pub fn with_probs(mut self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.lattice.num_edges() || probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::param("probs", "need one probability in [0, 1] per lattice edge"));
        }
        self.probs = probs;
        Ok(self)
    }

    pub fn first_diagonal(&self) -> usize {
        self.ranges.q()
    }

    pub fn last_diagonal(&self) -> usize {
        2 * self.grid.b() - self.ranges.q()
    }
}

/// One realisation of the open/closed edge states.
#[derive(Clone, Debug, PartialEq)]
pub struct PercolationInstance {
    pub open: Vec<bool>,
}

pub fn sample_percolation<R: Rng + ?Sized>(model: &PercolationModel, rng: &mut R) -> PercolationInstance {
    PercolationInstance { open: model.probs.iter().map(|&p| rng.random::<f64>() < p).collect() }
}

/// True iff an open directed path leads from some box of `from` to some box of `to`.
pub fn open_path_exists(lattice: &DualLattice, inst: &PercolationInstance, from: &[BoxId], to: &[BoxId]) -> bool {
    let seen = lattice.reachable(&inst.open, from);
    to.iter().any(|b| seen[b.0 * lattice.side + b.1])
}

/// Monte Carlo frequencies of the three lattice events.
#[derive(Clone, Copy, Debug)]
pub struct LemmaEstimates {
    /// `(0,0)` reaches every box of the first middle diagonal.
    pub to_diagonal: Proportion,
    /// Some box of the first middle diagonal reaches some box of the last.
    pub cross_middle: Proportion,
    /// `(0,0)` reaches `(b,b)`.
    pub end_to_end: Proportion,
}

/// Trial `k` uses the stream `(seed, PERCOLATION, k)`.
pub fn estimate_lemma_events(model: &PercolationModel, trials: u64, seed: u64) -> LemmaEstimates {
    let b = model.grid.b();
    let first = model.grid.diagonal(model.first_diagonal());
    let last = model.grid.diagonal(model.last_diagonal());
    let counts = (0..trials)
        .into_par_iter()
        .map(|k| {
            let inst = sample_percolation(model, &mut CounterRng::new(seed, domain::PERCOLATION, k));
            let from_origin = model.lattice.reachable(&inst.open, &[(0, 0)]);
            let idx = |bx: &BoxId| model.grid.box_index(*bx);
            let l1 = first.iter().all(|bx| from_origin[idx(bx)]);
            let l2 = open_path_exists(&model.lattice, &inst, &first, &last);
            let e2e = from_origin[idx(&(b, b))];
            [l1 as u64, l2 as u64, e2e as u64]
        })
        .reduce(|| [0; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
    LemmaEstimates {
        to_diagonal: Proportion::new(counts[0], trials),
        cross_middle: Proportion::new(counts[1], trials),
        end_to_end: Proportion::new(counts[2], trials),
    }
}

/// One line per lattice edge: `m i j i' j' p_e open`.
pub fn debug_dump(model: &PercolationModel, inst: &PercolationInstance) -> String {
    let mut out = String::new();
    for (k, e) in model.lattice.edges().iter().enumerate() {
        out.push_str(&format!(
            "{} {} {} {} {} {} {}\n",
            e.m,
            e.from.0,
            e.from.1,
            e.to.0,
            e.to.1,
            g17(model.probs[k]),
            u8::from(inst.open[k])
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentrationOutcome {
    pub holds: bool,
    /// Largest `|count - N|` over all boxes.
    pub max_dev: f64,
    pub mean_count: f64,
}

/// Whether every box holds a number of random points within `t N` of `N`.
/// Anchors are not counted.
pub fn concentration_event(points: &PointSet, grid: &BoxGrid, t: f64) -> Result<ConcentrationOutcome> {
    if points.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: points.dim() });
    }
    if points.num_random() as u64 != grid.n() {
        return Err(Error::param("grid", format!("built for n = {}, points have {}", grid.n(), points.num_random())));
    }
    let mut counts = vec![0u64; grid.num_boxes()];
    for p in points.iter().take(points.num_random()) {
        if let Some(bx) = grid.box_of(p) {
            counts[grid.box_index(bx)] += 1;
        }
    }
    let big_n = grid.mean_count();
    let max_dev = counts.iter().map(|&c| (c as f64 - big_n).abs()).fold(0.0, f64::max);
    Ok(ConcentrationOutcome { holds: max_dev < t * big_n, max_dev, mean_count: big_n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxEdgeStatus {
    pub open: bool,
    /// Source box holds no vertex, so the edge is open by default.
    pub vacuous: bool,
}

/// Vertex ids (anchors included) per box, indexed by [`BoxGrid::box_index`].
pub fn box_members(points: &PointSet, grid: &BoxGrid) -> Vec<Vec<u32>> {
    let mut members = vec![Vec::new(); grid.num_boxes()];
    for (v, p) in points.iter().enumerate() {
        if let Some(bx) = grid.box_of(p) {
            members[grid.box_index(bx)].push(v as u32);
        }
    }
    members
}

fn check_graph(g: &TemporalGraph) -> Result<()> {
    if g.points.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.points.dim() });
    }
    Ok(())
}

/// Whether every vertex of `from` has a neighbour in `to` over an edge with
/// time-stamp in `T_m`.
pub fn box_edge_open_in_graph(
    g: &TemporalGraph,
    grid: &BoxGrid,
    ranges: &RangeTable,
    m: usize,
    from: BoxId,
    to: BoxId,
) -> Result<BoxEdgeStatus> {
    check_graph(g)?;
    let adjacent = (to.0 == from.0 + 1 && to.1 == from.1) || (to.0 == from.0 && to.1 == from.1 + 1);
    if !adjacent || to.0 > grid.b() || to.1 > grid.b() {
        return Err(Error::param("to_box", format!("{to:?} is not a lattice successor of {from:?}")));
    }
    if m != from.0 + from.1 || m >= ranges.len() {
        return Err(Error::param("m", format!("window {m} does not belong to box {from:?}")));
    }
    let members = box_members(&g.points, grid);
    let src = &members[grid.box_index(from)];
    if src.is_empty() {
        return Ok(BoxEdgeStatus { open: true, vacuous: true });
    }
    let mut supported = vec![false; g.n()];
    for e in g.edges() {
        if !ranges.contains(m, e.tau) {
            continue;
        }
        for (x, y) in [(e.u, e.v), (e.v, e.u)] {
            if grid.box_of(g.points.point(x as usize)) == Some(from) && grid.box_of(g.points.point(y as usize)) == Some(to) {
                supported[x as usize] = true;
            }
        }
    }
    Ok(BoxEdgeStatus { open: src.iter().all(|&v| supported[v as usize]), vacuous: false })
}

/// Status of every lattice edge in one pass over the graph's edges.
pub fn lattice_status_in_graph(
    g: &TemporalGraph,
    grid: &BoxGrid,
    lattice: &DualLattice,
    ranges: &RangeTable,
) -> Result<Vec<BoxEdgeStatus>> {
    check_graph(g)?;
    let boxes: Vec<Option<BoxId>> = g.points.iter().map(|p| grid.box_of(p)).collect();
    // bit 0: has a right-neighbour witness, bit 1: has an up-neighbour witness
    let mut support = vec![0u8; g.n()];
    for e in g.edges() {
        for (x, y) in [(e.u, e.v), (e.v, e.u)] {
            let (Some(bx), Some(by)) = (boxes[x as usize], boxes[y as usize]) else { continue };
            let m = bx.0 + bx.1;
            if m >= ranges.len() || !ranges.contains(m, e.tau) {
                continue;
            }
            if by == (bx.0 + 1, bx.1) {
                support[x as usize] |= 1;
            } else if by == (bx.0, bx.1 + 1) {
                support[x as usize] |= 2;
            }
        }
    }
    let members = box_members(&g.points, grid);
    Ok(lattice
        .edges()
        .iter()
        .map(|e| {
            let src = &members[grid.box_index(e.from)];
            let bit = if e.to.0 > e.from.0 { 1 } else { 2 };
            BoxEdgeStatus { open: src.iter().all(|&v| support[v as usize] & bit != 0), vacuous: src.is_empty() }
        })
        .collect())
}

/// Result of comparing the lattice construction with the real graph.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingOutcome {
    pub open_path: bool,
    /// Every vertex of the boxes on diagonal `2b - 1` reaches the `(1/2, 1/2)`
    /// anchor by a monotone path of at most two edges with labels in `(1 - 1/x, 1]`.
    pub completion: bool,
    pub temporal_path: bool,
    pub vacuous_edges: usize,
    pub open_edges: usize,
}

impl CouplingOutcome {
    pub fn hypothesis(&self) -> bool {
        self.open_path && self.completion
    }

    pub fn implication_holds(&self) -> bool {
        !self.hypothesis() || self.temporal_path
    }
}

fn anchor_ids(g: &TemporalGraph) -> Result<(usize, usize)> {
    let find = |target: [f64; 2]| {
        (g.points.num_random()..g.n()).find(|&v| g.points.point(v) == target.as_slice())
    };
    match (find([0.0, 0.0]), find([0.5, 0.5])) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::param("g", "anchors at (0,0) and (1/2,1/2) are required")),
    }
}

fn completion_holds(g: &TemporalGraph, grid: &BoxGrid, ranges: &RangeTable, target: usize) -> bool {
    let b = grid.b();
    let late = 1.0 - 1.0 / ranges.n_eps();
    let late_edges = {
        let k = g.edges().partition_point(|e| e.tau <= late);
        &g.edges()[k..]
    };
    // label of the late edge joining each vertex to the target
    let mut hop = vec![f64::NEG_INFINITY; g.n()];
    for e in late_edges {
        if e.u as usize == target || e.v as usize == target {
            hop[e.other(target as u32) as usize] = e.tau;
        }
    }
    let mut ok = vec![false; g.n()];
    ok[target] = true;
    for e in late_edges {
        for (x, y) in [(e.u as usize, e.v as usize), (e.v as usize, e.u as usize)] {
            if y == target || hop[y] > e.tau {
                ok[x] = true;
            }
        }
    }
    let members = box_members(&g.points, grid);
    [(b - 1, b), (b, b - 1)].iter().all(|&bx| members[grid.box_index(bx)].iter().all(|&v| ok[v as usize]))
}

/// Check one graph: if an open lattice path `(0,0) -> (b,b)` exists and the
/// final-hop completion holds, the `(0,0)` anchor must temporally reach the
/// `(1/2,1/2)` anchor.
pub fn coupling_check(g: &TemporalGraph, grid: &BoxGrid, lattice: &DualLattice, ranges: &RangeTable) -> Result<CouplingOutcome> {
    check_graph(g)?;
    let (src, dst) = anchor_ids(g)?;
    let status = lattice_status_in_graph(g, grid, lattice, ranges)?;
    let open: Vec<bool> = status.iter().map(|s| s.open).collect();
    let b = grid.b();
    let seen = lattice.reachable(&open, &[(0, 0)]);
    let open_path = seen[grid.box_index((b, b))];
    let completion = completion_holds(g, grid, ranges, dst);
    let temporal_path = temporal_reach(g.network(), src)?.reachable[dst];
    Ok(CouplingOutcome {
        open_path,
        completion,
        temporal_path,
        vacuous_edges: status.iter().filter(|s| s.vacuous).count(),
        open_edges: open.iter().filter(|&&o| o).count(),
    })
}

#[derive(Clone, Debug, Default)]
pub struct CouplingSummary {
    pub instances: u64,
    pub open_paths: u64,
    pub hypotheses: u64,
    pub temporal_paths: u64,
    pub vacuous_edges: u64,
    /// One dump per instance where the implication failed.
    pub counterexamples: Vec<String>,
}

impl CouplingSummary {
    pub fn implication_holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Run [`coupling_check`] on `trials` fresh graphs with `n` random points, the
/// two anchors, kernel `alpha * 1{x <= 1}` and `r = C n^{-1/3}`.
pub fn coupling_trials(n: u64, c: f64, eps: f64, alpha: f64, trials: u64, seed: u64) -> Result<CouplingSummary> {
    let (grid, lattice, ranges) = build_grid(n, c, eps)?;
    let kernel = if alpha == 1.0 { crate::model::Kernel::Hard } else { crate::model::Kernel::alpha_hard(alpha)? };
    let r = c * (n as f64).powf(-1.0 / 3.0);
    let mut summary = CouplingSummary::default();
    for k in 0..trials {
        let graph_seed = crate::rng::stream_key(seed, domain::TRIAL, k);
        let pts = crate::model::sample_points(n as usize, 2, &mut CounterRng::new(graph_seed, domain::POINTS, 0))?
            .with_corner_anchors()?;
        let g = crate::generator::generate_graph(&pts, &kernel, r, graph_seed)?;
        let out = coupling_check(&g, &grid, &lattice, &ranges)?;
        summary.instances += 1;
        summary.open_paths += out.open_path as u64;
        summary.hypotheses += out.hypothesis() as u64;
        summary.temporal_paths += out.temporal_path as u64;
        summary.vacuous_edges += out.vacuous_edges as u64;
        if !out.implication_holds() {
            summary.counterexamples.push(format!(
                "trial {k} graph_seed {graph_seed}: n={n} C={c} eps={eps} alpha={alpha} b={} q={} open_path={} completion={} temporal_path=false",
                grid.b(),
                ranges.q(),
                out.open_path,
                out.completion
            ));
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::TemporalNetwork;
    use crate::model::{Kernel, TorusPoint};

    fn model(n: u64, c: f64, t: f64, alpha: f64, eps: f64) -> PercolationModel {
        PercolationModel::new(PercolationParams::new(n, c, t, alpha, eps).unwrap()).unwrap()
    }

    #[test]
    fn grid_rounding_and_tiling() {
        let g = BoxGrid::new(100_000, 8.0).unwrap();
        assert_eq!(g.b(), 15);
        assert_eq!(g.ell(), 1.0 / 32.0);
        assert!((g.side() as f64 * g.ell() - 0.5).abs() < 1e-15);
        assert_eq!(g.box_of(&[0.0, 0.0]), Some((0, 0)));
        assert_eq!(g.box_of(&[0.5, 0.5]), Some((15, 15)));
        assert_eq!(g.box_of(&[0.51, 0.2]), None);
        assert!((g.mean_count() - g.c_eff().powi(2) / 32.0 * 100_000f64.cbrt()).abs() < 1e-9);
        assert!(matches!(BoxGrid::new(10, 8.0), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn lattice_counts() {
        for (n, c) in [(2000, 8.0), (100_000, 8.0), (1_000_000, 3.0)] {
            let grid = BoxGrid::new(n, c).unwrap();
            let lat = DualLattice::new(&grid);
            let b = grid.b();
            assert_eq!(lat.num_edges(), 2 * b * (b + 1));
            // with C_eff the expansion is exact: 2b(b+1) = 16 n^{2/3}/C^2 - 4 sqrt2 n^{1/3}/C
            let (ce, n3) = (grid.c_eff(), (n as f64).cbrt());
            let expansion = 16.0 * n3 * n3 / (ce * ce) - 4.0 * std::f64::consts::SQRT_2 * n3 / ce;
            assert!((lat.num_edges() as f64 - expansion).abs() < 1e-6 * expansion);
            for i in 0..=b {
                for j in 0..=b {
                    let want = (i < b) as usize + (j < b) as usize;
                    assert_eq!(lat.out_edges((i, j)).len(), want);
                }
            }
        }
    }

    #[test]
    fn range_table_examples() {
        let (grid, _, rt) = build_grid(1_000_000, 8.0, 0.2).unwrap();
        let x = rt.n_eps();
        let b = grid.b();
        assert_eq!(rt.interval(0), (0.0, 1.0 / x));
        assert!((rt.interval(rt.q()).0 - 0.25).abs() < 1e-12);
        let (lo, hi) = rt.interval(2 * b - 1);
        assert!((lo - (1.0 - 1.0 / x)).abs() < 1e-12 && hi == 1.0);
        for m in 0..rt.len() - 1 {
            assert_eq!(rt.interval(m).1, rt.interval(m + 1).0);
            assert!(rt.width(m) > 0.0);
        }
        assert_eq!(rt.region(0), Region::R1);
        assert_eq!(rt.region(rt.q()), Region::R2);
        assert_eq!(rt.region(2 * b - rt.q()), Region::R3);
    }

    #[test]
    fn infeasible_reports_nearest_n() {
        match build_grid(2000, 20.0, 0.3) {
            Err(Error::Infeasible { nearest_n: Some(m), .. }) => assert!(build_grid(m, 20.0, 0.3).is_ok()),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn open_probability_edges() {
        assert_eq!(open_probability(0.0, 100, None), 0.0);
        assert_eq!(open_probability(0.0, 100, Some(5)), 0.0);
        assert_eq!(open_probability(1.0, 1, None), 1.0);
        assert_eq!(open_probability(1.0, 7, Some(9)), 1.0);
        let p = open_probability(0.1, 10, None);
        assert!((p - (1.0 - 0.9f64.powi(10))).abs() < 1e-15);
        assert!((open_probability(0.1, 10, Some(3)) - p.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn open_probability_matches_binomial_simulation() {
        let m = model(1_000_000, 8.0, 0.01, 1.0, 0.2);
        let mid = m.first_diagonal() + 1;
        assert_eq!(m.ranges.region(mid), Region::R2);
        let p = m.edge_open_probability(mid);
        let (k, w) = (m.n_minus, m.ranges.width(mid));
        let draws = 1_000_000u64;
        let mut rng = CounterRng::new(17, 0, 0);
        let binom = rand_distr::Binomial::new(k, w).unwrap();
        let hits = (0..draws).filter(|_| rng.sample(binom) >= 1).count() as f64;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((hits / draws as f64 - p).abs() < 3.0 * se, "sim {} vs {p}", hits / draws as f64);
    }

    #[test]
    fn probabilities_monotone() {
        let widths = [0.0, 0.001, 0.01, 0.05, 0.2, 1.0];
        let sizes = [0u64, 1, 5, 50, 500];
        for pow in [None, Some(1), Some(30)] {
            for &k in &sizes {
                for w in widths.windows(2) {
                    assert!(open_probability(w[0], k, pow) <= open_probability(w[1], k, pow));
                }
            }
            for &w in &widths {
                for k in sizes.windows(2) {
                    // the exponent grows with N too; checked jointly below
                    assert!(open_probability(w, k[0], None) <= open_probability(w, k[1], None));
                }
            }
        }
        let mut prev = 0.0;
        for c in [3.0, 4.0, 6.0, 8.0, 12.0] {
            // larger C means larger N; middle-window probability must not drop
            let m = model(1_000_000, c, 0.01, 1.0, 0.1);
            let p = m.edge_open_probability(m.first_diagonal());
            assert!(p >= prev - 1e-12, "C={c}: {p} < {prev}");
            prev = p;
        }
        for alpha in [0.2, 0.5, 1.0].windows(2) {
            let a = model(1_000_000, 8.0, 0.01, alpha[0], 0.2);
            let b = model(1_000_000, 8.0, 0.01, alpha[1], 0.2);
            assert!(a.probs().iter().zip(b.probs()).all(|(x, y)| x <= y));
        }
    }

    #[test]
    fn sampling_extremes_and_frequency() {
        let m = model(100_000, 8.0, 0.5, 1.0, 0.2);
        let ones = m.clone().with_probs(vec![1.0; m.lattice.num_edges()]).unwrap();
        let zeros = m.clone().with_probs(vec![0.0; m.lattice.num_edges()]).unwrap();
        let mut rng = CounterRng::new(3, 0, 0);
        assert!(sample_percolation(&ones, &mut rng).open.iter().all(|&o| o));
        assert!(sample_percolation(&zeros, &mut rng).open.iter().all(|&o| !o));

        let probs: Vec<f64> = (0..m.lattice.num_edges()).map(|k| [0.2, 0.5, 0.9][k % 3]).collect();
        let mixed = m.clone().with_probs(probs).unwrap();
        let samples = 10_000u64;
        let mut open = [0u64; 3];
        let mut total = [0u64; 3];
        for s in 0..samples {
            let inst = sample_percolation(&mixed, &mut CounterRng::new(5, domain::PERCOLATION, s));
            for (k, &o) in inst.open.iter().enumerate() {
                open[k % 3] += o as u64;
                total[k % 3] += 1;
            }
        }
        for (c, p) in [0.2, 0.5, 0.9].iter().enumerate() {
            let f = open[c] as f64 / total[c] as f64;
            let se = (p * (1.0 - p) / samples as f64).sqrt();
            assert!((f - p).abs() < 3.0 * se, "class {c}: {f} vs {p}");
        }
        let a = sample_percolation(&m, &mut CounterRng::new(9, 1, 2));
        let b = sample_percolation(&m, &mut CounterRng::new(9, 1, 2));
        assert_eq!(a, b);
    }

    #[test]
    fn path_queries() {
        let grid = BoxGrid::new(2000, 8.0).unwrap();
        let lat = DualLattice::new(&grid);
        let closed = PercolationInstance { open: vec![false; lat.num_edges()] };
        assert!(open_path_exists(&lat, &closed, &[(1, 1)], &[(1, 1), (2, 2)]));
        assert!(!open_path_exists(&lat, &closed, &[(0, 0)], &[(1, 0)]));
    }

    #[test]
    fn staircase_on_three_by_three() {
        // b = 2: boxes 0..=2 per axis
        let grid = BoxGrid::new(1000, 9.5).unwrap();
        assert_eq!(grid.b(), 2);
        let lat = DualLattice::new(&grid);
        let stair = [((0, 0), (1, 0)), ((1, 0), (1, 1)), ((1, 1), (2, 1)), ((2, 1), (2, 2))];
        let open: Vec<bool> = lat.edges().iter().map(|e| stair.contains(&(e.from, e.to))).collect();
        let inst = PercolationInstance { open };
        let on_path = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)];
        for i in 0..3 {
            for j in 0..3 {
                let reach = open_path_exists(&lat, &inst, &[(0, 0)], &[(i, j)]);
                assert_eq!(reach, on_path.contains(&(i, j)), "box ({i},{j})");
            }
        }
    }

    #[test]
    fn lemma_events_extremes() {
        let m = model(1_000_000, 8.0, 0.01, 1.0, 0.2);
        let sure = m.clone().with_probs(vec![1.0; m.lattice.num_edges()]).unwrap();
        let est = estimate_lemma_events(&sure, 50, 1);
        assert_eq!(est.to_diagonal.estimate, 1.0);
        assert_eq!(est.cross_middle.estimate, 1.0);
        assert_eq!(est.end_to_end.estimate, 1.0);
        let weak = model(1_000_000, 1.0, 0.01, 1.0, 0.2);
        assert!(weak.grid.b() > weak.ranges.q());
        assert!(estimate_lemma_events(&weak, 200, 1).end_to_end.estimate < 0.99);
    }

    #[test]
    fn positive_association() {
        // two increasing events on the same lattice
        let m = model(100_000, 8.0, 0.5, 1.0, 0.2);
        let m = m.clone().with_probs(vec![0.6; m.lattice.num_edges()]).unwrap();
        let (a_box, b_box) = ((6, 0), (0, 6));
        let trials = 20_000u64;
        let (mut a, mut b, mut both) = (0u64, 0u64, 0u64);
        for k in 0..trials {
            let inst = sample_percolation(&m, &mut CounterRng::new(11, domain::PERCOLATION, k));
            let seen = m.lattice.reachable(&inst.open, &[(0, 0)]);
            let ea = seen[m.grid.box_index(a_box)] || seen[m.grid.box_index((5, 1))];
            let eb = seen[m.grid.box_index(b_box)] || seen[m.grid.box_index((1, 5))];
            a += ea as u64;
            b += eb as u64;
            both += (ea && eb) as u64;
        }
        let (pa, pb, pab) = (a as f64 / trials as f64, b as f64 / trials as f64, both as f64 / trials as f64);
        let se = (pab * (1.0 - pab) / trials as f64).sqrt();
        assert!(pab >= pa * pb - 3.0 * se, "{pab} < {pa}*{pb}");
    }

    #[test]
    fn dump_format() {
        let m = model(2000, 8.0, 0.5, 1.0, 0.2);
        let inst = sample_percolation(&m, &mut CounterRng::new(1, 2, 3));
        let text = debug_dump(&m, &inst);
        assert_eq!(text.lines().count(), m.lattice.num_edges());
        let first: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
        assert_eq!(first.len(), 7);
        assert_eq!(&first[..5], ["0", "0", "0", "1", "0"]);
    }

    fn synthetic_points(grid: &BoxGrid, per_box: usize, outside: usize) -> PointSet {
        let mut coords = Vec::new();
        let ell = grid.ell();
        for i in 0..grid.side() {
            for j in 0..grid.side() {
                for k in 0..per_box {
                    let f = (k as f64 + 0.5) / per_box as f64;
                    coords.extend([(i as f64 + f) * ell, (j as f64 + 0.5) * ell]);
                }
            }
        }
        for k in 0..outside {
            coords.extend([0.6 + 0.3 * (k as f64 / outside as f64), 0.75]);
        }
        let n = coords.len() / 2;
        PointSet::from_flat(2, coords, n).unwrap()
    }

    #[test]
    fn concentration_examples() {
        // b = 3, ell = 1/8, N = 6400/64 = 100
        let grid = BoxGrid::new(6400, 13.13).unwrap();
        assert_eq!(grid.b(), 3);
        assert!((grid.mean_count() - 100.0).abs() < 1e-9);
        let pts = synthetic_points(&grid, 100, 4800);
        let out = concentration_event(&pts, &grid, 0.01).unwrap();
        assert!(out.holds);
        assert_eq!(out.max_dev, 0.0);
        let lumped = PointSet::from_flat(2, [0.01, 0.01].repeat(6400), 6400).unwrap();
        assert!(!concentration_event(&lumped, &grid, 0.9).unwrap().holds);
    }

    fn graph_from(points: PointSet, triples: &[(usize, usize, f64)]) -> TemporalGraph {
        let net = TemporalNetwork::from_triples(points.len(), triples).unwrap();
        TemporalGraph::from_parts(points, 0.75, Kernel::Hard, 0, net).unwrap()
    }

    #[test]
    fn box_edge_examples() {
        let (grid, _, rt) = build_grid(2000, 8.0, 0.2).unwrap();
        let ell = grid.ell();
        let c = |i: usize, j: usize| [(i as f64 + 0.5) * ell, (j as f64 + 0.5) * ell];
        let pts = PointSet::from_flat(2, [c(0, 0), c(1, 0)].concat(), 2).unwrap();
        let (lo, hi) = rt.interval(0);
        let g = graph_from(pts.clone(), &[(0, 1, 0.5 * (lo + hi))]);
        assert_eq!(box_edge_open_in_graph(&g, &grid, &rt, 0, (0, 0), (1, 0)).unwrap(), BoxEdgeStatus { open: true, vacuous: false });
        let g = graph_from(pts.clone(), &[(0, 1, 0.9)]);
        assert!(!box_edge_open_in_graph(&g, &grid, &rt, 0, (0, 0), (1, 0)).unwrap().open);
        let g = graph_from(pts, &[]);
        assert!(!box_edge_open_in_graph(&g, &grid, &rt, 1, (1, 0), (2, 0)).unwrap().open);
        assert_eq!(box_edge_open_in_graph(&g, &grid, &rt, 1, (0, 1), (1, 1)).unwrap(), BoxEdgeStatus { open: true, vacuous: true });
        assert!(box_edge_open_in_graph(&g, &grid, &rt, 0, (0, 0), (1, 1)).is_err());
        assert!(box_edge_open_in_graph(&g, &grid, &rt, 1, (0, 0), (1, 0)).is_err());
    }

    // direct transcription of the definition, used as an oracle
    fn edge_open_by_definition(g: &TemporalGraph, grid: &BoxGrid, rt: &RangeTable, e: &LatticeEdge) -> bool {
        (0..g.n()).filter(|&u| grid.box_of(g.points.point(u)) == Some(e.from)).all(|u| {
            g.edges().iter().any(|ed| {
                (ed.u as usize == u || ed.v as usize == u)
                    && grid.box_of(g.points.point(ed.other(u as u32) as usize)) == Some(e.to)
                    && rt.contains(e.m, ed.tau)
            })
        })
    }

    #[test]
    fn lattice_status_agrees_with_definition() {
        let (grid, lat, rt) = build_grid(2000, 8.0, 0.2).unwrap();
        for s in 0..100u64 {
            let n = 20 + (s as usize % 40);
            let pts = crate::model::sample_points(n, 2, &mut CounterRng::new(s, 1, 0)).unwrap();
            // sparse mode: few points per box, so both open and closed edges occur
            let g = crate::generator::generate_graph(&pts, &Kernel::Hard, 0.3 + 0.01 * (s % 10) as f64, s).unwrap();
            let status = lattice_status_in_graph(&g, &grid, &lat, &rt).unwrap();
            for (k, e) in lat.edges().iter().enumerate() {
                assert_eq!(status[k].open, edge_open_by_definition(&g, &grid, &rt, e), "seed {s} edge {e:?}");
                let single = box_edge_open_in_graph(&g, &grid, &rt, e.m, e.from, e.to).unwrap();
                assert_eq!(single, status[k]);
            }
        }
    }

    #[test]
    fn coupling_on_empty_graph_is_vacuous() {
        let (grid, lat, rt) = build_grid(2000, 8.0, 0.2).unwrap();
        let pts = crate::model::sample_points(200, 2, &mut CounterRng::new(1, 1, 0)).unwrap().with_corner_anchors().unwrap();
        let g = graph_from(pts, &[]);
        let out = coupling_check(&g, &grid, &lat, &rt).unwrap();
        assert!(!out.open_path);
        assert!(out.implication_holds());
    }

    #[test]
    fn coupling_on_synthetic_staircase() {
        let (grid, lat, rt) = build_grid(2000, 8.0, 0.2).unwrap();
        let b = grid.b();
        let ell = grid.ell();
        let side = grid.side();
        // one vertex per box centre, then the anchors
        let mut coords = Vec::new();
        for i in 0..side {
            for j in 0..side {
                coords.extend([(i as f64 + 0.5) * ell, (j as f64 + 0.5) * ell]);
            }
        }
        let centres = side * side;
        let pts = PointSet::from_flat(2, coords, centres)
            .unwrap()
            .with_anchors(&[TorusPoint::new(vec![0.0, 0.0]).unwrap(), TorusPoint::new(vec![0.5, 0.5]).unwrap()])
            .unwrap();
        let (a, z) = (centres, centres + 1);
        let id = |i: usize, j: usize| i * side + j;
        let mut triples = Vec::new();
        let mut bump = 0usize;
        let label = |m: usize, bump: &mut usize| {
            let (lo, hi) = rt.interval(m);
            *bump += 1;
            lo + (hi - lo) * (0.3 + 1e-4 * *bump as f64)
        };
        for i in 0..side {
            for j in 0..side {
                let m = i + j;
                let mut srcs = vec![id(i, j)];
                if (i, j) == (0, 0) {
                    srcs.push(a);
                }
                for s in srcs {
                    if i < b {
                        triples.push((s, id(i + 1, j), label(m, &mut bump)));
                    }
                    if j < b {
                        triples.push((s, id(i, j + 1), label(m, &mut bump)));
                    }
                }
            }
        }
        // box (b,b) members reach the target late, including its centre
        let finale = 1.0 - 1e-6;
        triples.push((id(b, b), z, finale));
        for bx in [(b - 1, b), (b, b - 1)] {
            // the centre of each last-diagonal box also needs a late completion
            let (lo, hi) = rt.interval(2 * b - 1);
            triples.push((id(bx.0, bx.1), z, lo + 0.5 * (hi - lo) + bx.0 as f64 * 1e-7));
        }
        let g = graph_from(pts, &triples);
        let out = coupling_check(&g, &grid, &lat, &rt).unwrap();
        assert!(out.open_path, "{out:?}");
        assert!(out.completion, "{out:?}");
        assert!(out.temporal_path);
        assert!(out.implication_holds());
        assert_eq!(out.vacuous_edges, 0);
    }

    #[test]
    fn coupling_small_random_instances() {
        let s = coupling_trials(2000, 8.0, 0.2, 1.0, 3, 5).unwrap();
        assert_eq!(s.instances, 3);
        assert!(s.implication_holds(), "{:?}", s.counterexamples);
    }
}
