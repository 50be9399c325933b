//! Sodium D1 line in a transverse RF field: normalized width of the n0 = 200
//! state as the Rabi frequency grows.

use dressed_emission::dressed::Solver;
use dressed_emission::sodium::{derive_params, sodium_sweep, SodiumParams};

fn main() -> dressed_emission::Result<()> {
    let sp = SodiumParams::default();
    let d = derive_params(&sp)?;
    println!("Δ_P = {}, Δ_S = {}, E0 = {:.4e}", d.delta_p, d.delta_s, d.e0);

    let grid: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
    let uaa = sodium_sweep(&sp, &grid, Solver::Uaa)?;
    let rwa = sodium_sweep(&sp, &grid, Solver::Rwa)?;
    println!("{:>5} {:>10} {:>10}", "Ω_R", "UAA", "RWA");
    for (u, r) in uaa.iter().zip(&rwa) {
        let avg = |row: &dressed_emission::sodium::SodiumRow| row.averaged().unwrap_or(f64::NAN);
        println!("{:>5.1} {:>10.6} {:>10.6}", u.omega_r, avg(u), avg(r));
    }
    Ok(())
}
