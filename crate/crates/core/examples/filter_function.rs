//! The filter F_{t,a}(H - E): quasi-locality in the sandwich width and its Fourier side.

use xxz_workbench::dynamics::{filter_locality_check, fourier_bound_check};
use xxz_workbench::prelude::*;

fn main() -> Result<()> {
    let region = Region::interval(0, 15)?.with_cut_intervals(&[[0, 13]])?;
    let params = ModelParams::new(2.0, 1.0)?;
    let omega = DisorderSample::sample(&region, Distribution::Uniform01, 4)?;
    let ells: Vec<u64> = (1..=6).collect();

    for a in [0.0, 0.3, 1.0] {
        let rep = filter_locality_check(&region, 2, &params, &omega, &[7], &ells, a, 1.0)?;
        let norms: Vec<String> = rep.points.iter().map(|p| format!("{:.1e}", p.measured)).collect();
        println!("a = {a}: [{}] rate {:?}", norms.join(", "), rep.rate);
    }

    let xis: Vec<f64> = (-8..=8).map(|k| k as f64).collect();
    for a in [0.0, 0.3] {
        let rep = fourier_bound_check(5.0, a, 0.01, &xis)?;
        let bad: Vec<f64> = rep.points.iter().filter(|p| !p.holds).map(|p| p.xi).collect();
        println!("Fourier bound, t = 5, a = {a}: holds everywhere = {}, fails at {bad:?}", rep.all_hold);
    }
    Ok(())
}
