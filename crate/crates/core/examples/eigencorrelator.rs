//! Eigencorrelator scan over the window I_{<=q}.
//!
//! Two-particle states start near 1, so q = 2 is the first window that holds
//! any of their spectrum at delta = 4.

use xxz_workbench::estimators::{eigencorrelator_scan, PairFamily, ScanConfig};
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    for lambda in [0.5, 4.0] {
        let mut cfg = ScanConfig::new(Region::interval(0, 13)?, 2, ModelParams::new(4.0, lambda)?);
        cfg.n_samples = 100;
        cfg.seed = 3;
        let scan = eigencorrelator_scan(&cfg, HalfInt::integer(2), &PairFamily::default())?;
        println!("lambda = {lambda}");
        for b in scan.bins(DistanceKind::ModHausdorff)?.iter().take(8) {
            println!("  d = {:2}  Q = {:.3e} +/- {:.1e}", b.distance, b.mean, b.stderr);
        }
        match scan.fit(DistanceKind::ModHausdorff, Some((2, 12))) {
            Ok(f) => println!("  slope {:.3}, r^2 {:.3}", f.slope, f.r_squared),
            Err(e) => println!("  no fit: {e}"),
        }
    }
    Ok(())
}
