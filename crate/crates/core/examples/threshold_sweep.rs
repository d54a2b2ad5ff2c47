//! Small (n, C) sweep, logistic threshold fits and the CSV/SVG outputs.

use temporal_rgg::experiments::{fit_threshold, run_sweep, scaling_check, svg_plot, sweep_csv, ExperimentConfig};

fn main() -> temporal_rgg::Result<()> {
    let cfg = ExperimentConfig {
        n: vec![250, 500, 1000],
        c_grid: vec![0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0],
        trials: 60,
        seed: Some(3),
        workers: std::thread::available_parallelism().map_or(1, |w| w.get()),
        ..Default::default()
    };
    let res = run_sweep(&cfg)?;
    print!("{}", sweep_csv(&res));

    let mut fits = Vec::new();
    for &n in &cfg.n {
        match fit_threshold(&res, n, 3) {
            Ok(f) => {
                println!("n={n}: C50={:.3} [{:.3}, {:.3}]", f.c50, f.ci_lo, f.ci_hi);
                fits.push(f);
            }
            Err(e) => println!("n={n}: {e}"),
        }
    }
    match scaling_check(&fits, cfg.d) {
        Ok(s) => println!("log r50 vs log n slope {:.3} [{:.3}, {:.3}], C50 spread {:.2}", s.slope, s.slope_lo, s.slope_hi, s.c50_ratio),
        Err(e) => println!("scaling: {e}"),
    }
    let svg = svg_plot(&res);
    println!("svg plot: {} bytes", svg.len());
    Ok(())
}
