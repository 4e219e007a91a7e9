//! H = S sigma_0^z on L + 1 spins: every eigenvector is a basis vector, yet
//! sigma_0^x evolves into a string reaching site L.

use std::f64::consts::PI;

use xxz_workbench::dynamics::{counterexample_app_a, Witness};
use xxz_workbench::Result;

fn main() -> Result<()> {
    for (t, w) in [(PI / 2.0, Witness::Z), (PI / 4.0, Witness::X)] {
        let rep = counterexample_app_a(4, t, w)?;
        print!("{}", rep.table(serde_json::json!({"t": t})).render());
        println!();
    }
    Ok(())
}
