//! Green function of one disorder sample, and its decay away from a configuration.

use xxz_workbench::estimators::green;
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    let region = Region::interval(0, 11)?;
    let params = ModelParams::new(3.0, 2.0)?;
    let omega = DisorderSample::sample(&region, Distribution::Uniform01, 1)?;
    let h = assemble_hamiltonian(&region, 2, &params, &omega)?;
    let z = C64::new(0.5 * params.gap(), 1e-6);

    let x = Configuration::new(vec![0, 1])?;
    for shift in 0..=10 {
        let y = x.translate(shift);
        let g = green(&h, z, &x, &y)?;
        let d = DistanceKind::Hausdorff.eval(&x, &y, &region)?;
        println!("y = {y}  d_H = {d}  |G| = {:.3e}", g.norm());
    }
    Ok(())
}
