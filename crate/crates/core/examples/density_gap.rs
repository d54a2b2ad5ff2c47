//! Graphs that are connected but far from temporally connected.

use temporal_rgg::bounds::simple_connectivity_radius;
use temporal_rgg::experiments::{connectivity_at_radius, gap_demo};

fn main() -> temporal_rgg::Result<()> {
    let (n, d, trials, seed) = (2000, 2, 40, 5);
    println!("simple connectivity radius {:.4}", simple_connectivity_radius(n, d));
    for mult in [1.0, 2.0, 4.0] {
        let r = mult * simple_connectivity_radius(n, d);
        let g = connectivity_at_radius(n, d, r, trials, seed)?;
        println!("r={r:.4}: simple {:.2}, temporal {:.2}", g.simple.estimate, g.temporal.estimate);
    }
    let gap = gap_demo(n, d, trials, seed)?;
    println!("gap at twice the radius: {}", gap.gap_shown());
    Ok(())
}
