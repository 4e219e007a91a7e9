//! Frequency of the event that the lowest eigenvalue near x sits inside the window.

use xxz_workbench::estimators::{large_deviation_probe, ScanConfig};
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    for lambda in [0.5, 2.0, 8.0] {
        let mut cfg = ScanConfig::new(Region::interval(0, 11)?, 2, ModelParams::new(3.0, lambda)?);
        cfg.n_samples = 200;
        let p = large_deviation_probe(&cfg, HalfInt::integer(1), None)?;
        println!(
            "lambda {lambda:>4}: P = {:.3} +/- {:.3} over |S| = {}",
            p.frequency.mean,
            p.frequency.stderr,
            p.set.len()
        );
    }
    Ok(())
}
