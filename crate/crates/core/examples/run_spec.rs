//! Drive an experiment from a TOML spec, the same path the binary uses.

use xxz_workbench::cli::{execute, RunSpec};
use xxz_workbench::Result;

fn main() -> Result<()> {
    let spec = RunSpec::from_toml(
        r#"
experiment = "fm-scan"
region = "0:11"
n_particles = 2
delta = 4.0
lambda = 8.0
q = 1.0
s = 0.3
samples = 50
seed = 1
"#,
    )?;
    let out = execute(&spec)?;
    print!("{}", out.table.render());
    if let Some(v) = out.violation {
        println!("violation: {v}");
    }
    Ok(())
}
