//! Propagation bound ||P_-^A e^{itH} P_+^B|| <= Delta^{-r} |t|^r / r! for a decoupled chain.

use xxz_workbench::dynamics::lieb_robinson_check;
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    let region = Region::interval(0, 9)?.with_cut_intervals(&[[0, 6]])?;
    let params = ModelParams::new(2.0, 1.0)?;
    let omega = DisorderSample::sample(&region, Distribution::Uniform01, 2)?;
    let times = [0.5, 1.0, 2.0, 4.0];

    for r in 1..=4i64 {
        let b: Vec<i64> = (4 - r..4 + r).collect();
        let rep = lieb_robinson_check(&region, None, &params, &omega, &[4], &b, &times)?;
        for p in &rep.points {
            let note = if p.vacuous { " (vacuous)" } else { "" };
            println!("r={r} t={:3} measured {:.3e} bound {:.3e}{note}", p.t, p.measured, p.bound);
        }
    }
    Ok(())
}
