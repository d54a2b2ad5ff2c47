//! Temporal reachability on a hand-built network and on a random graph.

use temporal_rgg::model::sample_points;
use temporal_rgg::rng::domain;
use temporal_rgg::temporal::{
    connectivity_report, count_monotone_paths, longest_increasing_path_exact, longest_increasing_walk,
    temporal_reach, PathLength,
};
use temporal_rgg::unionfind::is_connected;
use temporal_rgg::{generate_graph, CounterRng, Kernel, TemporalEdge, TemporalNetwork};

fn main() -> temporal_rgg::Result<()> {
    // Path 0-1-2-3 with labels rising then falling: 0 reaches 2 but not 3.
    let edges = vec![
        TemporalEdge::new(0, 1, 0.1),
        TemporalEdge::new(2, 3, 0.3),
        TemporalEdge::new(1, 2, 0.5),
    ];
    let net = TemporalNetwork::new(4, edges)?;
    let reach = temporal_reach(&net, 0)?;
    println!("from 0: reachable={:?} hops={:?}", reach.reachable, reach.hops);
    println!("report: {:?}", connectivity_report(&net));

    let (n, seed) = (400, 11);
    let pts = sample_points(n, 2, &mut CounterRng::new(seed, domain::POINTS, 0))?;
    for c in [0.6, 1.0, 1.6] {
        let r = c * (n as f64).powf(-1.0 / 3.0);
        let g = generate_graph(&pts, &Kernel::Hard, r, seed)?;
        let rep = connectivity_report(g.network());
        let walk = longest_increasing_walk(g.network());
        let path = longest_increasing_path_exact(g.network(), 2_000_000)
            .map(|l| l.to_string())
            .unwrap_or_else(|e| format!("({e})"));
        let k3 = count_monotone_paths(g.network(), PathLength::Exactly(3), 5_000_000)
            .map(|c| c.to_string())
            .unwrap_or_else(|e| format!("({e})"));
        println!(
            "C={c}: m={} simple={} temporal={} sources={}/{n} walk={walk} path={path} increasing 3-edge paths={k3}",
            g.m(),
            is_connected(g.network()),
            rep.temporally_connected,
            rep.num_temporal_sources,
        );
    }
    Ok(())
}
