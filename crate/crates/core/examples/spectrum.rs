//! Assemble H on a short chain and print the low end of each sector.

use xxz_workbench::prelude::*;
use xxz_workbench::numerics::min_eigenvalue;

fn main() -> Result<()> {
    let region = Region::interval(0, 9)?;
    let params = ModelParams::new(2.0, 1.0)?;
    let omega = DisorderSample::sample(&region, Distribution::Uniform01, 7)?;

    println!("gap 1 - 1/delta = {}", params.gap());
    for n in 0..=4 {
        let h = assemble_hamiltonian(&region, n, &params, &omega)?;
        let e = eig_sym(h.matrix())?;
        let low: Vec<String> = e.values.iter().take(4).map(|v| format!("{v:.4}")).collect();
        println!("N={n} dim={:4} lowest [{}]", h.dim(), low.join(", "));
        if n > 0 {
            assert!(min_eigenvalue(h.matrix())? >= params.gap() - 1e-10);
        }
    }

    // A cut decouples the two halves.
    let cut = region.clone().with_cut_intervals(&[[0, 4]])?;
    let gamma = boundary_operator(&cut, 2, &params)?;
    println!("boundary operator on N=2 has {} nonzero entries", gamma.to_triplets().triplets.len());
    Ok(())
}
