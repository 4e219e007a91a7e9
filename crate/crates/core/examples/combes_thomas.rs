//! Deterministic decay of resolvents below the spectrum, for H and the lifted Ĥ_q.

use xxz_workbench::estimators::{combes_thomas_check, lifted_ct_check, ScanConfig};
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    let mut cfg = ScanConfig::new(Region::interval(0, 15)?, 2, ModelParams::new(2.0, 1.0)?);
    cfg.n_samples = 10;

    let plain = combes_thomas_check(&cfg, HalfInt::HALF, None)?;
    let lifted = lifted_ct_check(&cfg, HalfInt::integer(2), None)?;
    for rep in [&plain, &lifted] {
        let slopes: Vec<String> = rep.samples.iter().map(|s| format!("{:.2}", s.slope)).collect();
        println!("lifted={} q={} all decaying={} slopes [{}]", rep.lifted, rep.window, rep.all_decaying, slopes.join(" "));
    }

    // With a cut the resolvent is block diagonal across it.
    cfg.region = cfg.region.clone().with_cut_intervals(&[[0, 7]])?;
    let cut = combes_thomas_check(&cfg, HalfInt::ZERO, None)?;
    println!("with cut: largest cross-cut |G| = {}", cut.cross_cut_max);
    Ok(())
}
