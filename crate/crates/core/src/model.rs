//! Torus geometry, uniform point sampling and connection kernels.
//!
//! Points live in the unit torus `[0,1)^d` and distances use the wrap-around
//! metric `sqrt(sum_i min(|p_i - q_i|, 1 - |p_i - q_i|)^2)`. A pair of points at
//! distance `x` is joined with probability `K(x / r)` where `K` is one of the
//! kernels below.

use std::f64::consts::PI;

use rand::Rng;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Cut-off used when truncating soft kernels for generation and quadrature.
pub const DEFAULT_TRUNCATION_EPS: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

/// Absolute tolerance of the radial quadrature in [`edge_probability`].
pub const QUADRATURE_TOL: f64 = 1e-12;

/// A point of the unit torus `[0,1)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::param("d", format!("dimension must be >= 2, got {}", coords.len())));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(Error::param("coords", format!("coordinate {c} outside [0,1)")));
        }
        Ok(Self { coords })
    }

    /// Reduce arbitrary real coordinates modulo 1.
    pub fn wrapped(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| wrap_unit(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

fn wrap_unit(c: f64) -> f64 {
    let w = c - c.floor();
    // c.floor() can round so that w == 1.0 for tiny negative c
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Wrap-around Euclidean distance between two points of equal dimension.
pub fn torus_distance(p: &TorusPoint, q: &TorusPoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    Ok(torus_distance_unchecked(p.coords(), q.coords()))
}

/// Torus distance on raw coordinate slices. Slices must have equal length.
#[inline]
pub fn torus_distance_unchecked(p: &[f64], q: &[f64]) -> f64 {
    torus_distance_sq(p, q).sqrt()
}

#[inline]
pub(crate) fn torus_distance_sq(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.iter()
        .zip(q)
        .map(|(a, b)| {
            let delta = (a - b).abs();
            let w = delta.min(1.0 - delta);
            w * w
        })
        .sum()
}

/// An ordered set of points in `[0,1)^d`: the random points first, then any
/// deterministic anchors.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    num_random: usize,
}

impl PointSet {
    pub fn empty(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, coords: Vec::new(), num_random: 0 })
    }

    /// Build from explicit points; all of them count as random (non-anchor) points.
    pub fn from_points(dim: usize, points: &[TorusPoint]) -> Result<Self> {
        let mut set = Self::empty(dim)?;
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
            set.coords.extend_from_slice(p.coords());
        }
        set.num_random = points.len();
        Ok(set)
    }

    /// Build from a flat coordinate buffer of length `n * dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>, num_random: usize) -> Result<Self> {
        check_dim(dim)?;
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::param("coords", "length is not a multiple of the dimension"));
        }
        if num_random > coords.len() / dim {
            return Err(Error::param("num_random", "exceeds the number of points"));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(Error::param("coords", format!("coordinate {c} outside [0,1)")));
        }
        Ok(Self { dim, coords, num_random })
    }

    /// Append deterministic anchor points after the random ones.
    pub fn with_anchors(mut self, anchors: &[TorusPoint]) -> Result<Self> {
        for a in anchors {
            if a.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim() });
            }
            self.coords.extend_from_slice(a.coords());
        }
        Ok(self)
    }

    /// The two anchors `(0,...,0)` and `(1/2,...,1/2)`.
    pub fn with_corner_anchors(self) -> Result<Self> {
        let d = self.dim;
        self.with_anchors(&[
            TorusPoint::new(vec![0.0; d])?,
            TorusPoint::new(vec![0.5; d])?,
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn num_random(&self) -> usize {
        self.num_random
    }

    pub fn num_anchors(&self) -> usize {
        self.len() - self.num_random
    }

    pub fn is_anchor(&self, i: usize) -> bool {
        i >= self.num_random && i < self.len()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        torus_distance_unchecked(self.point(i), self.point(j))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::param("d", format!("dimension must be >= 2, got {d}")));
    }
    Ok(())
}

/// Draw `n` i.i.d. uniform points of `[0,1)^d`.
pub fn sample_points<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<PointSet> {
    check_dim(d)?;
    let coords = (0..n * d).map(|_| rng.random::<f64>()).collect();
    Ok(PointSet { dim: d, coords, num_random: n })
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// Surface area of the unit sphere in `d` dimensions, `d * V_d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// The tail envelope `beta * x^-d * exp(-(x+1) ln(x+1))` bounding soft kernels for `x > 1`.
#[inline]
pub fn tail_envelope(x: f64, beta: f64, d: usize) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    let log = beta.ln() - d as f64 * x.ln() - (x + 1.0) * (x + 1.0).ln();
    log.exp()
}

/// Piecewise-linear user kernel; zero beyond the last knot.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedKernel {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedKernel {
    /// Knots must start at `x = 0`, be strictly increasing, and carry values in `[0,1]`.
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(Error::param("table", "need at least two knots and one value per knot"));
        }
        if xs[0] != 0.0 {
            return Err(Error::param("table", "first knot must be x = 0"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("table", "knots must be strictly increasing"));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::param("table", "values must lie in [0,1]"));
        }
        Ok(Self { xs, values })
    }

    fn eval(&self, x: f64) -> f64 {
        let last = *self.xs.last().unwrap();
        if x > last {
            return 0.0;
        }
        let i = self.xs.partition_point(|&k| k <= x);
        if i >= self.xs.len() {
            return *self.values.last().unwrap();
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Largest `x` at which the kernel still reaches `eps`.
    fn support_end(&self, eps: f64) -> f64 {
        for i in (1..self.xs.len()).rev() {
            let (x0, x1) = (self.xs[i - 1], self.xs[i]);
            let (y0, y1) = (self.values[i - 1], self.values[i]);
            if y1 >= eps {
                return x1;
            }
            if y0 >= eps {
                return x0 + (x1 - x0) * (y0 - eps) / (y0 - y1);
            }
        }
        0.0
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.values)
    }
}

/// Connection-probability profile `K`.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    /// `K(x) = 1{x <= 1}`.
    Hard,
    /// `K(x) = alpha * 1{x <= 1}`.
    AlphaHard { alpha: f64 },
    /// `K(x) = alpha` on `[0,1]`, `min(alpha, beta x^-d e^{-(x+1)ln(x+1)})` beyond.
    ///
    /// With `alpha = 1` this is the envelope of the tail assumption itself, capped
    /// at one; it is a chosen concrete instance, not the only admissible soft kernel.
    SoftTail { alpha: f64, beta: f64, dim: usize },
    Tabulated(TabulatedKernel),
}

impl Kernel {
    pub fn alpha_hard(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Kernel::AlphaHard { alpha })
    }

    pub fn soft_tail(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        check_alpha(alpha)?;
        check_dim(dim)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param("beta", format!("must be > 0, got {beta}")));
        }
        Ok(Kernel::SoftTail { alpha, beta, dim })
    }

    /// The `alpha` of the lower bound on `[0,1]` (1 for the hard kernel).
    pub fn alpha(&self) -> f64 {
        match self {
            Kernel::Hard => 1.0,
            Kernel::AlphaHard { alpha } | Kernel::SoftTail { alpha, .. } => *alpha,
            Kernel::Tabulated(t) => {
                let mut lo: f64 = 1.0;
                for x in (0..=100).map(|i| i as f64 / 100.0) {
                    lo = lo.min(t.eval(x));
                }
                lo
            }
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            Kernel::SoftTail { beta, .. } => *beta,
            _ => 0.0,
        }
    }

    /// Short name used in file headers and CSV output.
    pub fn tag(&self) -> &'static str {
        match self {
            Kernel::Hard => "hard",
            Kernel::AlphaHard { .. } => "alpha",
            Kernel::SoftTail { .. } => "soft",
            Kernel::Tabulated(_) => "table",
        }
    }

    /// True when `K` is an indicator of `[0,1]` scaled by alpha.
    pub fn is_hard_like(&self) -> bool {
        matches!(self, Kernel::Hard | Kernel::AlphaHard { .. })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0,1], got {alpha}")));
    }
    Ok(())
}

/// Evaluate `K(x)` for `x >= 0`.
#[inline]
pub fn kernel_eval(k: &Kernel, x: f64) -> f64 {
    match k {
        Kernel::Hard => {
            if x <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        Kernel::AlphaHard { alpha } => {
            if x <= 1.0 {
                *alpha
            } else {
                0.0
            }
        }
        Kernel::SoftTail { alpha, beta, dim } => {
            if x <= 1.0 {
                *alpha
            } else {
                alpha.min(tail_envelope(x, *beta, *dim))
            }
        }
        Kernel::Tabulated(t) => t.eval(x),
    }
}

/// Geometric grid `1.01 * 1.05^k` used for tail checks.
pub fn tail_grid(upper: f64) -> impl Iterator<Item = f64> {
    (0..).map(|k| 1.01 * 1.05f64.powi(k)).take_while(move |&x| x <= upper)
}

/// Radius beyond which `K < eps`.
///
/// Indicator kernels return exactly 1. For the others the crossing is located on
/// the geometric tail grid and refined by bisection.
pub fn truncation_radius(k: &Kernel, eps: f64) -> f64 {
    match k {
        Kernel::Hard | Kernel::AlphaHard { .. } => 1.0,
        Kernel::Tabulated(t) => t.support_end(eps).max(1.0),
        Kernel::SoftTail { .. } => {
            let mut prev = 1.0;
            let mut hit = None;
            for x in tail_grid(1e6) {
                if kernel_eval(k, x) < eps {
                    hit = Some(x);
                    break;
                }
                prev = x;
            }
            let Some(mut hi) = hit else { return 1e6 };
            let mut lo = prev;
            if kernel_eval(k, lo) < eps {
                return 1.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if kernel_eval(k, mid) < eps {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    }
}

/// `P(u ~ v)` for a fixed pair with uniformly random displacement:
/// `integral over [0,1]^d of K(|y| / r) dy`.
///
/// Indicator kernels use the closed form `alpha * V_d * r^d`. Other kernels use
/// adaptive Simpson on the radial integral, split at `x = 1`, out to
/// `min(r * x_max, 1/2)`; the ball of radius 1/2 is the largest that does not
/// overlap itself on the torus, and the neglected mass beyond is below
/// `K(1 / (2r))`.
pub fn edge_probability(k: &Kernel, r: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::param("r", format!("must lie in (0, 1/2], got {r}")));
    }
    if let Kernel::SoftTail { dim, .. } = k {
        if *dim != d {
            return Err(Error::DimensionMismatch { expected: *dim, got: d });
        }
    }
    match k {
        Kernel::Hard => Ok(unit_ball_volume(d) * r.powi(d as i32)),
        Kernel::AlphaHard { alpha } => Ok(alpha * unit_ball_volume(d) * r.powi(d as i32)),
        _ => {
            let area = unit_sphere_area(d);
            let outer = (r * truncation_radius(k, DEFAULT_TRUNCATION_EPS)).min(0.5);
            let f = |rho: f64| area * rho.powi(d as i32 - 1) * kernel_eval(k, rho / r);
            let inner_end = r.min(outer);
            Ok(adaptive_simpson(f, 0.0, inner_end, QUADRATURE_TOL)
                + adaptive_simpson(f, inner_end, outer, QUADRATURE_TOL))
        }
    }
}

/// Outcome of checking a kernel against the lower bound on `[0,1]` and the tail envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub lower_bound_ok: bool,
    pub tail_ok: bool,
    pub in_unit_range: bool,
    /// `(x, K(x), bound)` for every failed grid point.
    pub violations: Vec<(f64, f64, f64)>,
}

impl AssumptionReport {
    pub fn ok(&self) -> bool {
        self.lower_bound_ok && self.tail_ok && self.in_unit_range
    }
}

/// Check `K(x) >= alpha` on `[0,1]` and `K(x) <= beta x^-d e^{-(x+1)ln(x+1)}` on the
/// tail grid up to the truncation radius.
pub fn validate_kernel(k: &Kernel, alpha: f64, beta: f64, d: usize) -> AssumptionReport {
    let mut report = AssumptionReport {
        lower_bound_ok: true,
        tail_ok: true,
        in_unit_range: true,
        violations: Vec::new(),
    };
    for x in (0..=200).map(|i| i as f64 / 200.0) {
        let v = kernel_eval(k, x);
        if v < alpha {
            report.lower_bound_ok = false;
            report.violations.push((x, v, alpha));
        }
        if !(0.0..=1.0).contains(&v) {
            report.in_unit_range = false;
        }
    }
    let upper = truncation_radius(k, DEFAULT_TRUNCATION_EPS).max(1.01);
    for x in tail_grid(upper) {
        let v = kernel_eval(k, x);
        let bound = tail_envelope(x, beta, d);
        // relative slack for the envelope evaluated in log space
        if v > bound * (1.0 + 1e-12) {
            report.tail_ok = false;
            report.violations.push((x, v, bound));
        }
        if !(0.0..=1.0).contains(&v) {
            report.in_unit_range = false;
        }
    }
    report
}
