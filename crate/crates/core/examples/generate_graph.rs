//! Sample a temporal random geometric graph, round-trip it through the text format.

use temporal_rgg::io::{graph_to_string, read_graph, write_graph};
use temporal_rgg::model::{edge_probability, sample_points};
use temporal_rgg::rng::domain;
use temporal_rgg::{generate_graph, CounterRng, Kernel};

fn main() -> temporal_rgg::Result<()> {
    let (n, d, seed) = (500, 2, 7);
    let r = 1.0 * (n as f64).powf(-1.0 / (d as f64 + 1.0));
    let pts = sample_points(n, d, &mut CounterRng::new(seed, domain::POINTS, 0))?;

    for kernel in [Kernel::Hard, Kernel::alpha_hard(0.5)?, Kernel::soft_tail(1.0, 1.0, d)?] {
        let g = generate_graph(&pts, &kernel, r, seed)?;
        let p = edge_probability(&kernel, r, d)?;
        let expected = p * (n * (n - 1) / 2) as f64;
        println!("{kernel:?}: m={} (expected {expected:.1})", g.m());
    }

    let g = generate_graph(&pts, &Kernel::Hard, r, seed)?;
    let dir = std::env::temp_dir().join("trgg-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("graph.tgg");
    write_graph(&g, &path)?;
    let back = read_graph(&path)?;
    assert_eq!(graph_to_string(&g)?, graph_to_string(&back)?);
    println!("round trip through {} ok; first edges:", path.display());
    for e in g.edges().iter().take(5) {
        println!("  {e:?}");
    }
    Ok(())
}
