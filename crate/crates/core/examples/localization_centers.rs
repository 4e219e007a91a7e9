//! Localization centers, nearby mass and IPR of low-lying eigenvectors.

use xxz_workbench::estimators::eigenvector_centers;
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    let region = Region::interval(0, 13)?;
    let params = ModelParams::new(4.0, 1.0)?;
    let omega = DisorderSample::sample(&region, Distribution::Uniform01, 5)?;
    let window = EnergyWindow::new(HalfInt::integer(2), params.delta)?;
    let h = assemble_hamiltonian(&region, 2, &params, &omega)?;

    for row in eigenvector_centers(&h, &window.at_most(), 2)?.iter().take(10) {
        println!(
            "E = {:.4}  center {}  mass within 2 = {:.3}  ipr = {:.3}",
            row.energy, row.center, row.mass_near, row.ipr
        );
    }
    Ok(())
}
