//! Plain-text graph files.
//!
//! ```text
//! tgg 1 <d> <n> <r> <kernel-tag> <alpha> <beta> <seed> [<anchors>]
//! <x_1> ... <x_d>          (n lines)
//! <u> <v> <tau>            (one line per edge, ascending tau)
//! ```
//!
//! Reals are written with 17 significant digits so a write/read cycle is
//! bit-exact. The optional tenth header field counts trailing anchor points and
//! is omitted when there are none.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::generator::{TemporalEdge, TemporalGraph, TemporalNetwork};
use crate::model::{Kernel, PointSet};

/// Serialise `g` into a byte buffer.
pub fn graph_to_string(g: &TemporalGraph) -> Result<String> {
    if matches!(g.kernel, Kernel::Tabulated(_)) {
        return Err(Error::param("kernel", "tabulated kernels cannot be stored in a graph file header"));
    }
    let mut out = String::new();
    let d = g.points.dim();
    out.push_str(&format!(
        "tgg 1 {d} {} {} {} {} {} {}",
        g.n(),
        g17(g.radius),
        g.kernel.tag(),
        g17(g.kernel.alpha()),
        g17(g.kernel.beta()),
        g.seed
    ));
    if g.points.num_anchors() > 0 {
        out.push_str(&format!(" {}", g.points.num_anchors()));
    }
    out.push('\n');
    for p in g.points.iter() {
        let line: Vec<String> = p.iter().map(|&x| g17(x)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", e.u, e.v, g17(e.tau)));
    }
    Ok(out)
}

pub fn write_graph(g: &TemporalGraph, path: impl AsRef<Path>) -> Result<()> {
    let text = graph_to_string(g)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<TemporalGraph> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line?);
    }
    parse_graph(&lines, path)
}

fn parse_graph(lines: &[String], path: &Path) -> Result<TemporalGraph> {
    let err = |line: usize, reason: String| Error::Parse { path: path.to_path_buf(), line, reason };
    let header = lines.first().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(fields.len() == 9 || fields.len() == 10) || fields[0] != "tgg" {
        return Err(err(1, "expected `tgg 1 <d> <n> <r> <kernel> <alpha> <beta> <seed> [<anchors>]`".into()));
    }
    if fields[1] != "1" {
        return Err(err(1, format!("unsupported format version {}", fields[1])));
    }
    let num = |i: usize, what: &str| -> Result<f64> {
        fields[i].parse::<f64>().map_err(|_| err(1, format!("bad {what} `{}`", fields[i])))
    };
    let int = |i: usize, what: &str| -> Result<u64> {
        fields[i].parse::<u64>().map_err(|_| err(1, format!("bad {what} `{}`", fields[i])))
    };
    let d = int(2, "dimension")? as usize;
    let n = int(3, "vertex count")? as usize;
    let r = num(4, "radius")?;
    let alpha = num(6, "alpha")?;
    let beta = num(7, "beta")?;
    let seed = int(8, "seed")?;
    let anchors = if fields.len() == 10 { int(9, "anchor count")? as usize } else { 0 };
    if anchors > n {
        return Err(err(1, "anchor count exceeds vertex count".into()));
    }
    let kernel = match fields[5] {
        "hard" => Kernel::Hard,
        "alpha" => Kernel::alpha_hard(alpha).map_err(|e| err(1, e.to_string()))?,
        "soft" => Kernel::soft_tail(alpha, beta, d).map_err(|e| err(1, e.to_string()))?,
        other => return Err(err(1, format!("unknown kernel tag `{other}`"))),
    };

    if lines.len() < 1 + n {
        return Err(err(lines.len() + 1, format!("expected {n} coordinate lines")));
    }
    let mut coords = Vec::with_capacity(n * d);
    for (k, line) in lines[1..1 + n].iter().enumerate() {
        let lineno = k + 2;
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != d {
            return Err(err(lineno, format!("expected {d} coordinates, found {}", vals.len())));
        }
        for v in vals {
            let x: f64 = v.parse().map_err(|_| err(lineno, format!("bad coordinate `{v}`")))?;
            if !(0.0..1.0).contains(&x) {
                return Err(err(lineno, format!("coordinate {x} outside [0,1)")));
            }
            coords.push(x);
        }
    }
    let points = PointSet::from_flat(d, coords, n - anchors).map_err(|e| err(1, e.to_string()))?;

    let mut edges: Vec<TemporalEdge> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (k, line) in lines[1 + n..].iter().enumerate() {
        let lineno = k + 2 + n;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != 3 {
            return Err(err(lineno, format!("expected `<u> <v> <tau>`, found {} fields", vals.len())));
        }
        let u: usize = vals[0].parse().map_err(|_| err(lineno, format!("bad vertex `{}`", vals[0])))?;
        let v: usize = vals[1].parse().map_err(|_| err(lineno, format!("bad vertex `{}`", vals[1])))?;
        let tau: f64 = vals[2].parse().map_err(|_| err(lineno, format!("bad time-stamp `{}`", vals[2])))?;
        if !(0.0..=1.0).contains(&tau) {
            return Err(err(lineno, format!("time-stamp {tau} outside [0,1]")));
        }
        if u >= v {
            return Err(err(lineno, format!("edge ({u}, {v}) must satisfy u < v")));
        }
        if v >= n {
            return Err(err(lineno, format!("vertex {v} out of range (n = {n})")));
        }
        if let Some(prev) = edges.last() {
            if prev.tau >= tau {
                return Err(err(lineno, "time-stamps must be strictly increasing".into()));
            }
        }
        if !seen.insert((u, v)) {
            return Err(err(lineno, format!("duplicate edge ({u}, {v})")));
        }
        edges.push(TemporalEdge::new(u, v, tau));
    }
    let network = TemporalNetwork::new(n, edges).map_err(|e| err(1, e.to_string()))?;
    TemporalGraph::from_parts(points, r, kernel, seed, network).map_err(|e| err(1, e.to_string()))
}
