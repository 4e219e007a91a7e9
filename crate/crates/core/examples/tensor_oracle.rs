//! Cross-check the sector assembly against the full spin-space Hamiltonian.

use xxz_workbench::oracles::tensor_hamiltonian;
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    let region = Region::interval(0, 7)?.with_cut_intervals(&[[0, 2]])?;
    let params = ModelParams::new(2.5, 3.0)?;
    let omega = DisorderSample::sample(&region, Distribution::Uniform01, 42)?;
    let tensor = tensor_hamiltonian(&region, &params, &omega)?;
    println!("2^{} = {} states, [H, N] max entry {}", region.len(), tensor.dim(), tensor.number_commutator_max());

    for n in 0..=region.len() {
        let h = assemble_hamiltonian(&region, n, &params, &omega)?;
        let diff = (tensor.sector_block(n)? - h.matrix()).amax();
        println!("N={n}: dim {:3}, max |difference| {diff:.1e}", h.dim());
    }
    Ok(())
}
