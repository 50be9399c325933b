//! Quasi-energies of the n = 225 doublet from the three solvers as the
//! drive strength grows.

use dressed_emission::dressed::{exact_state, rwa_state_for_label, uaa_quasi_energy, ModelParams, Parity};

fn main() -> dressed_emission::Result<()> {
    let n = 225;
    println!("{:>6} {:>3} {:>14} {:>14} {:>14}", "Ω_R", "p", "UAA", "RWA", "exact");
    for omega_r in [0.05, 0.2, 0.5, 1.0] {
        let params = ModelParams::from_rabi(1.0, omega_r, n)?;
        for p in Parity::BOTH {
            let uaa = uaa_quasi_energy(&params, n, p)?;
            let rwa = rwa_state_for_label(&params, n, p)?.energy;
            let exact = exact_state(&params, n, p, None)?.energy;
            println!("{omega_r:>6} {:>3} {uaa:>14.8} {rwa:>14.8} {exact:>14.8}", p.sign());
        }
    }
    Ok(())
}
