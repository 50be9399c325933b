//! How far the two-level approximations drift from exact diagonalization,
//! in energy and in linewidth.

use dressed_emission::dressed::{dressed_state, ModelParams, Parity, Solver};
use dressed_emission::emission::{linewidth, OverlapMode, VModelParams};

fn main() -> dressed_emission::Result<()> {
    let n = 225;
    let v0 = VModelParams::new(50.0, 0.10, 0.05, 1.0, 0.0, n)?;
    println!(
        "{:>5} {:>3} {:>12} {:>12} {:>10} {:>10} {:>10}",
        "Ω_R", "p", "ΔE uaa", "ΔE rwa", "Γ uaa", "Γ rwa", "Γ exact"
    );
    for omega_r in [0.05, 0.1, 0.2, 0.4, 0.8, 1.0] {
        let v = v0.with_omega_r(omega_r)?;
        let params: ModelParams = v.model();
        for p in Parity::BOTH {
            let exact = dressed_state(&params, n, p, Solver::Exact)?;
            let uaa = dressed_state(&params, n, p, Solver::Uaa)?;
            let rwa = dressed_state(&params, n, p, Solver::Rwa)?;
            let g = |s| linewidth(s, &v, OverlapMode::Delta).map(|r| r.gamma);
            println!(
                "{omega_r:>5} {:>3} {:>12.3e} {:>12.3e} {:>10.6} {:>10.6} {:>10.6}",
                p.sign(),
                uaa.energy - exact.energy,
                rwa.energy - exact.energy,
                g(&uaa)?,
                g(&rwa)?,
                g(&exact)?,
            );
        }
    }
    Ok(())
}
