//! Expansion of one dressed state: two displaced-basis amplitudes for the
//! UAA, two bare-basis amplitudes for the RWA, and the full exact vector.

use dressed_emission::dressed::{dressed_state, ModelParams, Parity, Solver};

fn main() -> dressed_emission::Result<()> {
    let params = ModelParams::from_rabi(1.0, 0.8, 225)?;
    for solver in [Solver::Uaa, Solver::Rwa, Solver::Exact] {
        let state = dressed_state(&params, 225, Parity::Plus, solver)?;
        println!("{solver}: E = {:.10}, basis {:?}", state.energy, state.basis);
        for (l, cp, cm) in state.coeffs.trimmed(1e-4).iter() {
            println!("  l = {l:>3}  c+ = {cp:>+.6}  c- = {cm:>+.6}");
        }
        println!("  <P> = {:+.12}", state.parity_expectation());
    }
    Ok(())
}
