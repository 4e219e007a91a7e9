//! Disorder-averaged fractional moments E|G_z(x, y)|^s and their decay fit.

use xxz_workbench::estimators::{fractional_moment_scan, PairFamily, ScanConfig};
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    let mut cfg = ScanConfig::new(Region::interval(0, 13)?, 2, ModelParams::new(4.0, 8.0)?);
    cfg.n_samples = 200;
    cfg.seed = 11;
    let q = HalfInt::integer(1);
    let window = EnergyWindow::new(q, cfg.params.delta)?;
    let z = C64::new(0.5 * (cfg.params.gap() + window.upper()), 1e-4);

    let scan = fractional_moment_scan(&cfg, q, 0.3, z, &PairFamily::default())?;
    let fit = scan.fit(DistanceKind::ModHausdorff, Some((2, 10)))?;
    print!("{}", fit.table(serde_json::json!({"s": 0.3})).render());
    println!("slope {:.3} +/- {:.3}, r^2 {:.3}", fit.slope, fit.slope_se, fit.r_squared);
    Ok(())
}
