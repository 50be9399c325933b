//! Dressed states of a two-level system coupled to a single driving mode,
//!
//! ```text
//! H = (Δ/2) σ3 + a†a + f σ1 (a + a†),
//! ```
//!
//! with energies in units of the drive frequency. Three solvers produce the
//! same [`DressedState`] shape: the closed-form uniform approximation
//! ([`uaa_coefficients`]), the Jaynes–Cummings doublets
//! ([`rwa_dressed_state`]) and truncated exact diagonalization
//! ([`exact_dressed_states`]).
//!
//! Coefficients are always stored over the `χ± = (↑ ± ↓)/√2` spin basis. The
//! field part is either the bare Fock basis or the displaced basis
//! `|l, f> = D(-f)|l>`; see [`Basis`].

mod exact;
mod rwa;
mod uaa;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::displaced_overlap;

pub use exact::{
    build_hamiltonian, default_n_max, exact_dressed_states, exact_state, exact_states, ExactSpectrum,
    CONVERGENCE_TOL,
};
pub use rwa::{rwa_dressed_state, rwa_partner, rwa_state_for_label, Branch};
pub use uaa::{uaa_coefficients, uaa_quasi_energy, DEGENERATE_DENOMINATOR};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Parity eigenvalue of `σ3 exp(iπ a†a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Plus, Parity::Minus];

    pub fn sign(self) -> i32 {
        match self {
            Parity::Plus => 1,
            Parity::Minus => -1,
        }
    }

    pub fn value(self) -> f64 {
        self.sign() as f64
    }

    pub fn from_sign(sign: i32) -> Self {
        if sign >= 0 {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }

    /// Parity of `(-1)^n`.
    pub fn of_index(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }

    /// `q = p (-1)^n`, the offset of the partner level in the UAA pair.
    pub fn partner_offset(self, n: usize) -> i32 {
        self.sign() * Parity::of_index(n).sign()
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Plus => write!(f, "+1"),
            Parity::Minus => write!(f, "-1"),
        }
    }
}

/// Two-level system in the driving field. `omega` is the unit of energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Level splitting Δ.
    pub delta: f64,
    /// Atom–field coupling f.
    pub f: f64,
}

impl ModelParams {
    pub const OMEGA: f64 = 1.0;

    pub fn new(delta: f64, f: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParams(format!("delta must be >= 0, got {delta}")));
        }
        if !(f >= 0.0 && f.is_finite()) {
            return Err(Error::InvalidParams(format!("coupling must be >= 0, got {f}")));
        }
        Ok(Self { delta, f })
    }

    /// Parameters for a given Rabi frequency at photon number `n`.
    pub fn from_rabi(delta: f64, omega_r: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("photon number must be positive".into()));
        }
        Self::new(delta, omega_r / (2.0 * (n as f64).sqrt()))
    }

    pub fn omega(&self) -> f64 {
        Self::OMEGA
    }
}

/// `Ω_R = 2 f √n`.
pub fn rabi_frequency(f: f64, n: f64) -> f64 {
    2.0 * f * n.sqrt()
}

/// Mean photon number `W τ / ħ` of a drive pulse (SI inputs).
pub fn pulse_photon_number(power: f64, duration: f64) -> f64 {
    power * duration / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Uaa,
    Rwa,
    Exact,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Solver::Uaa => "uaa",
            Solver::Rwa => "rwa",
            Solver::Exact => "exact",
        };
        f.write_str(s)
    }
}

/// Dressed state `(n, p)` from the chosen solver.
///
/// RWA states are the doublet members continuing the label (see
/// [`rwa_state_for_label`]); exact states use [`default_n_max`] and are
/// certified against a wider truncation.
pub fn dressed_state(params: &ModelParams, n: usize, parity: Parity, solver: Solver) -> Result<DressedState> {
    match solver {
        Solver::Uaa => uaa_coefficients(params, n, parity),
        Solver::Rwa => rwa_state_for_label(params, n, parity),
        Solver::Exact => exact_state(params, n, parity, None),
    }
}

/// Field basis the coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `|l, f> = D(-f)|l>`, the eigenbasis of `a†a ± f(a + a†)` for the `χ+`
    /// component.
    Displaced { f: f64 },
    /// Bare Fock states.
    Bare,
}

/// Amplitudes `(C_{l+}, C_{l-})` on a contiguous block of field indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    offset: usize,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl Coefficients {
    pub fn new(offset: usize, plus: Vec<f64>, minus: Vec<f64>) -> Self {
        assert_eq!(plus.len(), minus.len(), "coefficient columns differ in length");
        Self { offset, plus, minus }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    /// `(C_{l+}, C_{l-})`, zero outside the stored block.
    pub fn get(&self, l: usize) -> (f64, f64) {
        if l < self.offset || l >= self.offset + self.len() {
            return (0.0, 0.0);
        }
        let i = l - self.offset;
        (self.plus[i], self.minus[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.plus.iter().zip(&self.minus).enumerate().map(move |(i, (&p, &m))| (self.offset + i, p, m))
    }

    /// Indices carrying a nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        self.iter().filter(|&(_, p, m)| p != 0.0 || m != 0.0).map(|(l, _, _)| l).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.plus.iter().chain(&self.minus).map(|c| c * c).sum()
    }

    /// Drop leading and trailing rows whose amplitudes are both below `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let keep = |i: usize| self.plus[i].abs() >= tol || self.minus[i].abs() >= tol;
        let Some(first) = (0..self.len()).find(|&i| keep(i)) else {
            return Self::new(self.offset, Vec::new(), Vec::new());
        };
        let last = (0..self.len()).rev().find(|&i| keep(i)).unwrap_or(first);
        Self::new(self.offset + first, self.plus[first..=last].to_vec(), self.minus[first..=last].to_vec())
    }
}

/// One quasi-stationary solution labeled by field number `n` and parity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DressedState {
    pub n: usize,
    pub parity: Parity,
    /// `q = p (-1)^n`.
    pub q: i32,
    /// Quasi-energy in units of the drive frequency.
    pub energy: f64,
    pub coeffs: Coefficients,
    pub basis: Basis,
    pub solver: Solver,
}

impl DressedState {
    pub fn norm(&self) -> f64 {
        self.coeffs.norm_sq().sqrt()
    }

    /// The same state with coefficients over bare Fock states.
    ///
    /// Displaced-basis amplitudes are mapped with `<m|l, f>`; rows are added
    /// on both sides until the overlaps fall below `1e-18`.
    pub fn to_bare(&self) -> DressedState {
        let f = match self.basis {
            Basis::Bare => return self.clone(),
            Basis::Displaced { f } => f,
        };
        let rows: Vec<(usize, f64, f64)> =
            self.coeffs.iter().filter(|&(_, p, m)| p != 0.0 || m != 0.0).collect();
        if rows.is_empty() || f == 0.0 {
            let mut out = self.clone();
            out.basis = Basis::Bare;
            return out;
        }
        let amplitude = |m: usize| -> (f64, f64, f64) {
            let mut plus = 0.0;
            let mut minus = 0.0;
            let mut largest = 0.0_f64;
            for &(l, cp, cm) in &rows {
                let o = displaced_overlap(l, f, m);
                largest = largest.max(o.abs());
                plus += o * cp;
                minus += o * cm;
            }
            (plus, minus, largest)
        };
        let lo = rows.first().map(|r| r.0).unwrap_or(0);
        let hi = rows.last().map(|r| r.0).unwrap_or(0);
        const NEGLIGIBLE: f64 = 1e-18;

        let mut below = Vec::new();
        let mut m = lo;
        while m > 0 {
            m -= 1;
            let (p, q, largest) = amplitude(m);
            below.push((p, q));
            if largest < NEGLIGIBLE {
                break;
            }
        }
        let start = lo - below.len();
        let mut plus: Vec<f64> = below.iter().rev().map(|r| r.0).collect();
        let mut minus: Vec<f64> = below.iter().rev().map(|r| r.1).collect();
        for m in lo..=hi {
            let (p, q, _) = amplitude(m);
            plus.push(p);
            minus.push(q);
        }
        let mut m = hi;
        loop {
            m += 1;
            let (p, q, largest) = amplitude(m);
            plus.push(p);
            minus.push(q);
            if largest < NEGLIGIBLE {
                break;
            }
        }
        DressedState { coeffs: Coefficients::new(start, plus, minus), basis: Basis::Bare, ..self.clone() }
    }

    /// `<Ψ| σ3 exp(iπ a†a) |Ψ>`.
    pub fn parity_expectation(&self) -> f64 {
        let bare = self.to_bare();
        bare.coeffs
            .iter()
            .map(|(l, p, m)| {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                2.0 * sign * p * m
            })
            .sum()
    }

    /// Amplitudes over `|↑, l>` and `|↓, l>` as `(l, up, down)` rows.
    pub fn spin_amplitudes(&self) -> Vec<(usize, f64, f64)> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.coeffs.iter().map(|(l, p, m)| (l, s * (p + m), s * (p - m))).collect()
    }
}
