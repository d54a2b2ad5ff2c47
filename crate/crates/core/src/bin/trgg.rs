use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use temporal_rgg::bounds::{bound_reports, bound_reports_csv};
use temporal_rgg::experiments::{emit_csv, emit_svg_plot, fit_threshold, parse_config_text, ExperimentConfig, Mode};
use temporal_rgg::fmt::g17;
use temporal_rgg::io::{read_graph, write_graph};
use temporal_rgg::model::sample_points;
use temporal_rgg::percolation::{coupling_trials, debug_dump, estimate_lemma_events, sample_percolation, PercolationModel, PercolationParams};
use temporal_rgg::rng::{domain, CounterRng};
use temporal_rgg::stats::Proportion;
use temporal_rgg::temporal::{connectivity_report, longest_increasing_path_exact, longest_increasing_walk};
use temporal_rgg::unionfind::is_connected;
use temporal_rgg::{generate_graph, Error};

#[derive(Parser)]
#[command(name = "trgg", about = "Temporal random geometric graphs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one graph and write it to <out>/graph.tgg
    Generate(Flags),
    /// Report temporal connectivity of a stored graph
    Analyze { graph: PathBuf },
    /// Connectivity fractions over an (n, C) grid
    Sweep(Flags),
    /// Monte Carlo estimates of the lattice path events
    Percolate(Flags),
    /// Evaluate the closed-form bounds
    Bounds(Flags),
    /// Check the lattice/graph coupling on random instances
    Couple(Flags),
}

#[derive(Args)]
struct Flags {
    /// key=value settings file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Vertex count, or comma-separated list for sweeps
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    d: Option<String>,
    /// hard | alpha:<a> | soft:<a>,<b>
    #[arg(long)]
    kernel: Option<String>,
    /// Comma-separated values of C in r = C n^{-1/(d+1)}
    #[arg(long = "c-grid")]
    c_grid: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// Lattice constant C for percolate/couple/bounds
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl Flags {
    fn config(&self, mode: Mode) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig { mode: Some(mode), ..Default::default() };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            cfg = cfg.apply(&parse_config_text(&text, path)?)?;
        }
        let mut flags = BTreeMap::new();
        for (k, v) in [
            ("n", &self.n),
            ("d", &self.d),
            ("kernel", &self.kernel),
            ("c-grid", &self.c_grid),
            ("r", &self.r),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("eps", &self.eps),
            ("t", &self.t),
            ("c", &self.c),
            ("alpha", &self.alpha),
            ("workers", &self.workers),
            ("out", &self.out),
        ] {
            if let Some(v) = v {
                flags.insert(k.to_string(), v.clone());
            }
        }
        let cfg = cfg.apply(&flags)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Error(Error),
    Assertion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn single_n(cfg: &ExperimentConfig) -> u64 {
    cfg.n[0]
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(flags) => {
            let cfg = flags.config(Mode::Generate)?;
            let n = single_n(&cfg);
            let seed = cfg.seed()?;
            let r = cfg.r.unwrap_or_else(|| cfg.c_grid[0] * (n as f64).powf(-1.0 / (cfg.d as f64 + 1.0)));
            let pts = sample_points(n as usize, cfg.d, &mut CounterRng::new(seed, domain::POINTS, 0))?;
            let g = generate_graph(&pts, &cfg.kernel()?, r, seed)?;
            std::fs::create_dir_all(&cfg.out)?;
            let path = cfg.out.join("graph.tgg");
            write_graph(&g, &path)?;
            println!("wrote {} (n={} m={} r={})", path.display(), g.n(), g.m(), g17(r));
        }
        Command::Analyze { graph } => {
            let g = read_graph(&graph)?;
            let rep = connectivity_report(g.network());
            println!("n={}", rep.n);
            println!("m={}", rep.m);
            println!("simply_connected={}", is_connected(g.network()));
            println!("temporally_connected={}", rep.temporally_connected);
            println!("temporal_sources={}", rep.num_temporal_sources);
            if let Some(w) = rep.witness_non_source {
                println!("witness_non_source={w}");
            }
            println!("max_shortest_hops={}", rep.max_shortest_hops);
            println!("longest_increasing_walk={}", longest_increasing_walk(g.network()));
            match longest_increasing_path_exact(g.network(), 5_000_000) {
                Ok(l) => println!("longest_increasing_path={l}"),
                Err(Error::SearchAborted { nodes }) => println!("longest_increasing_path=unknown (search stopped after {nodes} nodes)"),
                Err(e) => return Err(e.into()),
            }
        }
        Command::Sweep(flags) => {
            let cfg = flags.config(Mode::Sweep)?;
            let res = temporal_rgg::experiments::run_sweep(&cfg)?;
            std::fs::create_dir_all(&cfg.out)?;
            emit_csv(&res, cfg.out.join("sweep.csv"))?;
            emit_svg_plot(&res, cfg.out.join("sweep.svg"))?;
            for &n in &cfg.n {
                match fit_threshold(&res, n, cfg.seed()?) {
                    Ok(f) => println!("n={n} C50={} ci=[{}, {}]", g17(f.c50), g17(f.ci_lo), g17(f.ci_hi)),
                    Err(e) => println!("n={n} {e}"),
                }
            }
            println!("wrote {}", cfg.out.join("sweep.csv").display());
        }
        Command::Percolate(flags) => {
            let cfg = flags.config(Mode::Percolate)?;
            let params = PercolationParams::new(single_n(&cfg), cfg.c, cfg.t, cfg.alpha, cfg.eps)?;
            let model = PercolationModel::new(params)?;
            let est = estimate_lemma_events(&model, cfg.trials, cfg.seed()?);
            std::fs::create_dir_all(&cfg.out)?;
            let mut csv = String::from("event,successes,trials,estimate,ci_lo,ci_hi\n");
            for (name, p) in [("to_diagonal", est.to_diagonal), ("cross_middle", est.cross_middle), ("end_to_end", est.end_to_end)] {
                csv.push_str(&proportion_line(name, &p));
                println!("{name}={} [{}, {}]", g17(p.estimate), g17(p.ci_lo), g17(p.ci_hi));
            }
            std::fs::write(cfg.out.join("percolation.csv"), csv)?;
            let inst = sample_percolation(&model, &mut CounterRng::new(cfg.seed()?, domain::PERCOLATION, u64::MAX));
            std::fs::write(cfg.out.join("lattice.txt"), debug_dump(&model, &inst))?;
            println!("b={} q={} N={} lattice_edges={}", model.grid.b(), model.ranges.q(), g17(model.mean_count()), model.lattice.num_edges());
        }
        Command::Bounds(flags) => {
            let cfg = flags.config(Mode::Bounds)?;
            let beta = match cfg.kernel()? {
                temporal_rgg::Kernel::SoftTail { beta, .. } => beta,
                _ => 1.0,
            };
            let reps = bound_reports(single_n(&cfg), cfg.d, cfg.c, cfg.t, cfg.alpha, cfg.eps, beta)?;
            let csv = bound_reports_csv(&reps);
            std::fs::create_dir_all(&cfg.out)?;
            std::fs::write(cfg.out.join("bounds.csv"), &csv)?;
            print!("{csv}");
        }
        Command::Couple(flags) => {
            let cfg = flags.config(Mode::Couple)?;
            let s = coupling_trials(single_n(&cfg), cfg.c, cfg.eps, cfg.alpha, cfg.trials, cfg.seed()?)?;
            println!(
                "instances={} open_paths={} hypotheses={} temporal_paths={} vacuous_edges={}",
                s.instances, s.open_paths, s.hypotheses, s.temporal_paths, s.vacuous_edges
            );
            if !s.implication_holds() {
                return Err(Failure::Assertion(s.counterexamples.join("\n")));
            }
        }
    }
    Ok(())
}

fn proportion_line(name: &str, p: &Proportion) -> String {
    format!("{name},{},{},{},{},{}\n", p.successes, p.trials, g17(p.estimate), g17(p.ci_lo), g17(p.ci_hi))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed:\n{msg}");
            ExitCode::from(3)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Infeasible { .. } | Error::NoBracket { .. } => 2,
                Error::InvalidParameter { .. } | Error::Parse { .. } | Error::DimensionMismatch { .. } | Error::Io(_) => 1,
                _ => 3,
            })
        }
    }
}
