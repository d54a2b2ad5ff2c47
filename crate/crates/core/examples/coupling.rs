//! Compare open lattice paths with temporal paths in the sampled graph.

use temporal_rgg::percolation::coupling_trials;

fn main() -> temporal_rgg::Result<()> {
    let s = coupling_trials(2000, 8.0, 0.2, 1.0, 20, 9)?;
    println!(
        "instances={} open lattice paths={} with completion={} temporal corner paths={} vacuous edges={}",
        s.instances, s.open_paths, s.hypotheses, s.temporal_paths, s.vacuous_edges
    );
    println!("implication holds: {}", s.implication_holds());
    Ok(())
}
