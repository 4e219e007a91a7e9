//! Lattice exponential sums over configurations of Z against their C_alpha bounds.

use xxz_workbench::oracles::{c_alpha, exp_sum_d1, exp_sum_d1_dual, exp_sum_dh, partition_count};
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    println!("p(50) = {}", partition_count(50)?);
    for alpha in [0.5, 1.0, 2.0] {
        println!("alpha = {alpha}: C_alpha = {:.6}", c_alpha(alpha)?);
        for n in 1..=4 {
            let x = Configuration::new((0..n).map(|i| 3 * i).collect())?;
            let k = n as usize;
            let a = exp_sum_d1(&x, k, alpha, None)?;
            let b = exp_sum_d1_dual(&x, k, alpha, None)?;
            println!(
                "  N={n} k={k}: sum {:.4} <= {:.4}, dual {:.4} <= {:.4}",
                a.value, a.bound, b.value, b.bound
            );
        }
    }
    for n in 2..=5 {
        let x = Configuration::new((0..n).collect())?;
        let s = exp_sum_dh(&x, 1, 1.0, None)?;
        println!("Hausdorff sum N={n}: {:.4}, per N^2 {:.4}", s.value, s.ratio);
    }
    Ok(())
}
