//! Closed-form uniform approximation: each dressed state lives on the pair of
//! displaced levels `{n, n+q}` of the parity-reduced Hamiltonian
//! `diag(l - f²) + (pΔ/2) S`.

use super::{Basis, Coefficients, DressedState, ModelParams, Parity, Solver};
use crate::error::{Error, Result};
use crate::special_fn::s_element;

/// Smallest admissible magnitude of the γ denominator.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-12;

struct Pair {
    n: usize,
    partner: usize,
    q: i32,
    s_nn: f64,
    s_qq: f64,
    s_nq: f64,
    m: f64,
    energy: f64,
}

fn pair(params: &ModelParams, n: usize, parity: Parity) -> Result<Pair> {
    let q = parity.partner_offset(n);
    if q < 0 && n == 0 {
        return Err(Error::InvalidLabel { n, parity });
    }
    let partner = (n as i64 + q as i64) as usize;
    let f = params.f;
    let delta = params.delta;
    let p = parity.value();
    let qf = q as f64;
    let sign_n = if n.is_multiple_of(2) { 1.0 } else { -1.0 };

    let s_nn = s_element(n, n, f);
    let s_qq = s_element(partner, partner, f);
    let s_nq = s_element(n, partner, f);

    let split = 1.0 - 0.5 * delta * sign_n * (s_nn - s_qq);
    let m = (split * split + delta * delta * s_nq * s_nq).sqrt();
    let energy = n as f64 + 0.5 * qf - f * f + 0.25 * p * delta * (s_nn + s_qq) - 0.5 * qf * m;
    Ok(Pair { n, partner, q, s_nn, s_qq, s_nq, m, energy })
}

/// Quasi-energy `E_np` of the uniform approximation.
pub fn uaa_quasi_energy(params: &ModelParams, n: usize, parity: Parity) -> Result<f64> {
    pair(params, n, parity).map(|p| p.energy)
}

/// Expansion coefficients over the displaced basis, supported on `{n, n+q}`.
///
/// The mixing ratio `γ = C_{n+}/C_{n+q,+}` is formed from the pole-free
/// expression `-pΔ S_{n,n+q} / ((pΔ/2)(S_nn - S_{n+q,n+q}) - q + qM)`.
/// With zero off-diagonal coupling (`S_{n,n+q} = 0`, e.g. `f = 0`) the pair is
/// already diagonal and the level whose energy equals `E_np` is taken, the
/// partner level `n+q` on a tie. A denominator smaller than
/// [`DEGENERATE_DENOMINATOR`] against a nonzero numerator is an error.
pub fn uaa_coefficients(params: &ModelParams, n: usize, parity: Parity) -> Result<DressedState> {
    let pr = pair(params, n, parity)?;
    let p = parity.value();
    let qf = pr.q as f64;
    let delta = params.delta;
    let f = params.f;

    let numerator = -p * delta * pr.s_nq;
    let denominator = 0.5 * p * delta * (pr.s_nn - pr.s_qq) - qf + qf * pr.m;

    // (c_n, c_{n+q}) up to normalization
    let (c_n, c_q) = if numerator == 0.0 {
        let h_n = pr.n as f64 - f * f + 0.5 * p * delta * pr.s_nn;
        let h_q = pr.partner as f64 - f * f + 0.5 * p * delta * pr.s_qq;
        if (h_q - pr.energy).abs() <= (h_n - pr.energy).abs() {
            (0.0, 1.0)
        } else {
            (1.0, 0.0)
        }
    } else if denominator.abs() < DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateDenominator { n, parity, denominator });
    } else {
        (numerator / denominator, 1.0)
    };

    let minus_n = p * (c_n * pr.s_nn + c_q * pr.s_nq);
    let minus_q = p * (c_n * pr.s_nq + c_q * pr.s_qq);
    let norm = (c_n * c_n + c_q * c_q + minus_n * minus_n + minus_q * minus_q).sqrt();
    let b = 1.0 / norm;

    let (offset, plus, minus) = if pr.q > 0 {
        (n, vec![b * c_n, b * c_q], vec![b * minus_n, b * minus_q])
    } else {
        (pr.partner, vec![b * c_q, b * c_n], vec![b * minus_q, b * minus_n])
    };

    Ok(DressedState {
        n,
        parity,
        q: pr.q,
        energy: pr.energy,
        coeffs: Coefficients::new(offset, plus, minus),
        basis: Basis::Displaced { f },
        solver: Solver::Uaa,
    })
}
