//! Jaynes–Cummings doublets of `(Δ/2)σ3 + a†a + f(σ+ a + σ- a†)`.

use serde::{Deserialize, Serialize};

use super::{Basis, Coefficients, DressedState, ModelParams, Parity, Solver};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Upper,
    Lower,
}

/// Member of the doublet `{|↑, n>, |↓, n+1>}`.
///
/// Energy `(n + 1/2) ± sqrt((Δ-1)²/4 + f²(n+1))`. The mixing angle is
/// `θ = atan2(2f√(n+1), Δ-1)/2`, so at zero coupling and exact resonance the
/// upper branch is `|↑, n>`. Both members carry parity `(-1)^n`; the returned
/// label is `(n, (-1)^n)` with `q = +1`.
pub fn rwa_dressed_state(params: &ModelParams, n: usize, branch: Branch) -> DressedState {
    let g = params.f * ((n + 1) as f64).sqrt();
    let detuning = params.delta - 1.0;
    let half_gap = (0.25 * detuning * detuning + g * g).sqrt();
    let theta = 0.5 * (2.0 * g).atan2(detuning);
    let (c, s) = (theta.cos(), theta.sin());
    let (up, down, energy) = match branch {
        Branch::Upper => (c, s, n as f64 + 0.5 + half_gap),
        Branch::Lower => (-s, c, n as f64 + 0.5 - half_gap),
    };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let coeffs = Coefficients::new(n, vec![r * up, r * down], vec![r * up, -r * down]);
    let parity = Parity::of_index(n);
    DressedState { n, parity, q: 1, energy, coeffs, basis: Basis::Bare, solver: Solver::Rwa }
}

/// Doublet and branch that continue the UAA label `(n, p)` to weak drive.
///
/// `q = +1` maps to the lower member of doublet `n`, `q = -1` to the upper
/// member of doublet `n - 1`.
pub fn rwa_partner(n: usize, parity: Parity) -> Result<(usize, Branch)> {
    match parity.partner_offset(n) {
        1 => Ok((n, Branch::Lower)),
        _ if n >= 1 => Ok((n - 1, Branch::Upper)),
        _ => Err(Error::InvalidLabel { n, parity }),
    }
}

/// The RWA state continuing `(n, p)`, relabeled with that `(n, p)`.
pub fn rwa_state_for_label(params: &ModelParams, n: usize, parity: Parity) -> Result<DressedState> {
    let (doublet, branch) = rwa_partner(n, parity)?;
    let mut s = rwa_dressed_state(params, doublet, branch);
    s.n = n;
    s.parity = parity;
    s.q = parity.partner_offset(n);
    Ok(s)
}
