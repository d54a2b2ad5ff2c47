//! Box grid, interval table and Monte Carlo estimates of the lattice events.

use temporal_rgg::percolation::{build_grid, estimate_lemma_events, PercolationModel, PercolationParams};

fn main() -> temporal_rgg::Result<()> {
    let (n, c, eps) = (3_000_000, 8.0, 0.2);
    let (grid, lattice, ranges) = build_grid(n, c, eps)?;
    println!(
        "b={} ell={:.5} C_eff={:.4} boxes={} lattice edges={} q={}",
        grid.b(),
        grid.ell(),
        grid.c_eff(),
        grid.num_boxes(),
        lattice.num_edges(),
        ranges.q()
    );
    for m in [0, ranges.q() - 1, ranges.q(), grid.b(), 2 * grid.b() - ranges.q(), ranges.len() - 1] {
        let (lo, hi) = ranges.interval(m);
        println!("  m={m:3} {:?} ({lo:.5}, {hi:.5}]", ranges.region(m));
    }

    let model = PercolationModel::new(PercolationParams::new(n, c, 0.01, 1.0, eps)?)?;
    println!("N={:.2} n-={} n+={}", model.mean_count(), model.n_minus, model.n_plus);
    let est = estimate_lemma_events(&model, 2000, 1);
    for (name, p) in [("to_diagonal", est.to_diagonal), ("cross_middle", est.cross_middle), ("end_to_end", est.end_to_end)] {
        println!("{name}: {:.4} [{:.4}, {:.4}]", p.estimate, p.ci_lo, p.ci_hi);
    }

    if let Err(e) = build_grid(100, c, eps) {
        println!("n=100: {e}");
    }
    Ok(())
}
