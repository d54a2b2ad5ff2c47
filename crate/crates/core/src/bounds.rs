//! Closed-form bounds evaluated numerically: first-moment path counts,
//! long-edge and concentration bounds, the contour series, and the simple
//! connectivity radius. Combinatorial prefactors go through `ln Γ`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::model::{tail_envelope, unit_ball_volume, unit_sphere_area};
use crate::percolation::build_grid;
use crate::quad::adaptive_simpson;

/// A value that may only be representable on the log scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    pub log_value: f64,
    /// `exp(log_value)`, or `+inf` when that overflows.
    pub value: f64,
    pub overflow: bool,
}

impl LogValue {
    pub fn from_log(log_value: f64) -> Self {
        let value = log_value.exp();
        Self { log_value, value, overflow: value.is_infinite() }
    }
}

/// `C(n,k) k!/(k-1)! p^{k-1}`: the expected number of ordered `k`-vertex
/// sequences whose consecutive pairs are joined by edges with increasing labels.
pub fn expected_nk_upper(n: u64, k: u64, p_edge: f64) -> Result<LogValue> {
    if k < 2 || k > n {
        return Err(Error::param("k", format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::param("p_edge", format!("must lie in [0, 1], got {p_edge}")));
    }
    let (n, k) = (n as f64, k as f64);
    let log = ln_gamma(n + 1.0) - ln_gamma(n - k + 1.0) - ln_gamma(k) + (k - 1.0) * p_edge.ln();
    Ok(LogValue::from_log(log))
}

/// The critical constant at which `1 - (d+1) ln(1/(3c))` vanishes.
pub fn critical_c(d: usize) -> f64 {
    (-1.0 / (d as f64 + 1.0)).exp() / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticNk {
    /// `k = 1/(3r)` with `r = c n^{-1/(d+1)}`.
    pub k: f64,
    /// Coefficient of `k` in the exponent, `1 - (d+1) ln(1/(3c))`.
    pub linear_coeff: f64,
    /// `(k-1) ln γ'' + ln n + linear_coeff * k + (d+1) ln(1/(3c))`.
    pub log_bound: f64,
}

/// Exponent of the asymptotic first-moment bound at `r = c n^{-1/(d+1)}`.
/// `gamma` defaults to `2^d V_d`.
pub fn expected_nk_asymptotic(n: f64, d: usize, c: f64, gamma: Option<f64>) -> AsymptoticNk {
    let gamma = gamma.unwrap_or_else(|| 2f64.powi(d as i32) * unit_ball_volume(d));
    let r = c * n.powf(-1.0 / (d as f64 + 1.0));
    let k = 1.0 / (3.0 * r);
    let l = (1.0 / (3.0 * c)).ln();
    let linear_coeff = 1.0 - (d as f64 + 1.0) * l;
    let log_bound = (k - 1.0) * gamma.ln() + n.ln() + linear_coeff * k + (d as f64 + 1.0) * l;
    AsymptoticNk { k, linear_coeff, log_bound }
}

/// `n^2 γ_d ∫_{ln n}^∞ K(x) x^{d-1} dx` for the soft kernel with envelope
/// parameter `beta`, where `γ_d` is the unit-sphere area.
pub fn long_edge_bound(n: u64, beta: f64, d: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::param("n", "must be at least 3"));
    }
    if beta == 0.0 {
        return Ok(0.0);
    }
    let f = |x: f64| tail_envelope(x, beta, d).min(1.0) * x.powi(d as i32 - 1);
    let mut a = (n as f64).ln();
    let mut total = 0.0f64;
    loop {
        let piece = adaptive_simpson(f, a, a + 1.0, 1e-14 * total.max(f(a)));
        total += piece;
        a += 1.0;
        if piece <= 1e-17 * total || piece == 0.0 {
            break;
        }
    }
    let n = n as f64;
    Ok(n * n * unit_sphere_area(d) * total)
}

/// `(16 n^{2/3} / C^2) exp(-(C t)^2 n^{1/3} / 8)`.
pub fn concentration_bound(n: f64, c: f64, t: f64) -> f64 {
    let n3 = n.cbrt();
    16.0 * n3 * n3 / (c * c) * (-(c * t).powi(2) * n3 / 8.0).exp()
}

/// `(ln n / (V_d n))^{1/d}`.
pub fn simple_connectivity_radius(n: u64, d: usize) -> f64 {
    let n = n as f64;
    (n.ln() / (unit_ball_volume(d) * n)).powf(1.0 / d as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourReport {
    pub sum: LogValue,
    /// `1 - P(B >= 1)` for the middle windows of the lattice.
    pub q_close: f64,
    /// The same with the literal middle-window width.
    pub q_close_literal: f64,
    pub m_lo: usize,
    pub m_hi: usize,
    /// `3 sqrt(q_close) < 1`.
    pub converges: bool,
    /// `10 exp(-α(1-t)C^3 / (128 sqrt 2)) < e^{-4}` at the requested `C`.
    pub sufficient: bool,
}

/// `Σ_{m = x/2}^{2b(b+1)} 3^m q^{⌊m/2⌋}` with `x` the rounded `n^eps`.
pub fn contour_series(n: u64, c: f64, t: f64, alpha: f64, eps: f64) -> Result<ContourReport> {
    let (grid, lattice, ranges) = build_grid(n, c, eps)?;
    let n_minus = ((1.0 - t) * grid.mean_count()).floor();
    let close = |w: f64| if alpha * w >= 1.0 { 0.0 } else { (n_minus * (-alpha * w).ln_1p()).exp() };
    let q_close = close(ranges.width(ranges.q()));
    let q_close_literal = close(ranges.literal_middle_width());
    let m_lo = 2 * ranges.q();
    let m_hi = lattice.num_edges();
    let sum = contour_sum(q_close, m_lo, m_hi);
    let lhs = 10.0 * (-alpha * (1.0 - t) * c.powi(3) / (128.0 * std::f64::consts::SQRT_2)).exp();
    Ok(ContourReport {
        sum,
        q_close,
        q_close_literal,
        m_lo,
        m_hi,
        converges: 3.0 * q_close.sqrt() < 1.0,
        sufficient: lhs < (-4.0f64).exp(),
    })
}

fn contour_sum(q: f64, m_lo: usize, m_hi: usize) -> LogValue {
    if q == 0.0 || m_lo > m_hi {
        return LogValue { log_value: f64::NEG_INFINITY, value: 0.0, overflow: false };
    }
    let (l3, lq) = (3f64.ln(), q.ln());
    let term = |m: usize| m as f64 * l3 + (m / 2) as f64 * lq;
    let peak = (m_lo..=m_hi).map(term).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = (m_lo..=m_hi).map(|m| (term(m) - peak).exp()).sum();
    LogValue::from_log(peak + s.ln())
}

/// One named scalar bound with its inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    pub value: f64,
    pub log_value: f64,
    /// Overflowed or divergent.
    pub flagged: bool,
    pub formula: &'static str,
}

pub const BOUND_CSV_HEADER: &str = "name,inputs,value,log_value,flagged,formula";

pub fn bound_reports_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(BOUND_CSV_HEADER);
    out.push('\n');
    for r in reports {
        let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={}", g17(*v))).collect();
        out.push_str(&format!(
            "{},{},{},{},{},\"{}\"\n",
            r.name,
            inputs.join(";"),
            g17(r.value),
            g17(r.log_value),
            u8::from(r.flagged),
            r.formula
        ));
    }
    out
}

/// All bounds at one parameter point (hard kernel for the path count).
pub fn bound_reports(n: u64, d: usize, c: f64, t: f64, alpha: f64, eps: f64, beta: f64) -> Result<Vec<BoundReport>> {
    let nf = n as f64;
    let r = c * nf.powf(-1.0 / (d as f64 + 1.0));
    let mut out = Vec::new();
    let k = ((1.0 / (3.0 * r)).round() as u64).clamp(2, n.max(2));
    if r <= 0.5 && n >= 2 {
        let p = crate::model::edge_probability(&crate::model::Kernel::Hard, r, d)?;
        let nk = expected_nk_upper(n, k, p)?;
        out.push(BoundReport {
            name: "expected_nk_upper",
            inputs: vec![("n", nf), ("k", k as f64), ("p_edge", p)],
            value: nk.value,
            log_value: nk.log_value,
            flagged: nk.overflow,
            formula: "C(n,k) k!/(k-1)! p^(k-1)",
        });
    }
    let asym = expected_nk_asymptotic(nf, d, c, None);
    out.push(BoundReport {
        name: "expected_nk_asymptotic",
        inputs: vec![("n", nf), ("d", d as f64), ("c", c), ("k", asym.k), ("linear_coeff", asym.linear_coeff)],
        value: asym.log_bound.exp(),
        log_value: asym.log_bound,
        flagged: asym.log_bound.exp().is_infinite(),
        formula: "(k-1) ln g + ln n + (1-(d+1) ln(1/(3c))) k + (d+1) ln(1/(3c))",
    });
    if n >= 3 {
        let v = long_edge_bound(n, beta, d)?;
        out.push(BoundReport {
            name: "long_edge_bound",
            inputs: vec![("n", nf), ("beta", beta), ("d", d as f64)],
            value: v,
            log_value: v.ln(),
            flagged: false,
            formula: "n^2 S_d int_{ln n}^inf K(x) x^(d-1) dx",
        });
    }
    let conc = concentration_bound(nf, c, t);
    out.push(BoundReport {
        name: "concentration_bound",
        inputs: vec![("n", nf), ("C", c), ("t", t)],
        value: conc,
        log_value: conc.ln(),
        flagged: false,
        formula: "16 n^(2/3)/C^2 exp(-(C t)^2 n^(1/3)/8)",
    });
    if d == 2 {
        if let Ok(cs) = contour_series(n, c, t, alpha, eps) {
            out.push(BoundReport {
                name: "contour_series",
                inputs: vec![
                    ("n", nf),
                    ("C", c),
                    ("t", t),
                    ("alpha", alpha),
                    ("eps", eps),
                    ("q_close", cs.q_close),
                    ("sufficient", f64::from(u8::from(cs.sufficient))),
                ],
                value: cs.sum.value,
                log_value: cs.sum.log_value,
                flagged: !cs.converges || cs.sum.overflow,
                formula: "sum_m 3^m q^floor(m/2)",
            });
        }
    }
    let rc = simple_connectivity_radius(n.max(2), d);
    out.push(BoundReport {
        name: "simple_connectivity_radius",
        inputs: vec![("n", nf), ("d", d as f64)],
        value: rc,
        log_value: rc.ln(),
        flagged: false,
        formula: "(ln n/(V_d n))^(1/d)",
    });
    Ok(out)
}
