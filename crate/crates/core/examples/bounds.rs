//! Closed-form bounds: first moments, tails, concentration and the contour series.

use temporal_rgg::bounds::{bound_reports, bound_reports_csv, contour_series, critical_c, expected_nk_asymptotic, expected_nk_upper};
use temporal_rgg::model::{validate_kernel, Kernel};

fn main() -> temporal_rgg::Result<()> {
    println!("critical C for d=2: {:.4}", critical_c(2));
    let n = 10_000u64;
    for c in [0.5, 1.0, 2.0] {
        let a = expected_nk_asymptotic(n as f64, 2, c, None);
        println!("C={c}: {a:?}");
    }
    let p = std::f64::consts::PI * (n as f64).powf(-2.0 / 3.0);
    for k in [10, 40, 80] {
        let v = expected_nk_upper(n, k, p)?;
        println!("E[N_{k}] <= {:.3e} (log {:.2})", v.value, v.log_value);
    }

    let soft = Kernel::soft_tail(1.0, 1.0, 2)?;
    println!("soft kernel assumptions ok: {}", validate_kernel(&soft, 1.0, 1.0, 2).ok());

    for c in [8.0, 11.0] {
        let rep = contour_series(3_000_000, c, 0.01, 1.0, 0.2)?;
        println!("contour C={c}: sum={:.3e} converges={} sufficient={}", rep.sum.value, rep.converges, rep.sufficient);
    }
    print!("{}", bound_reports_csv(&bound_reports(n, 2, 8.0, 0.01, 1.0, 0.2, 1.0)?));
    Ok(())
}
