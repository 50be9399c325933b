//! Sodium `3P1/2 → 3S1/2` emission with both Zeeman doublets dressed by an
//! alternating magnetic field.
//!
//! Energies are in units of `Ω = g_P μ_B B0`, so the excited doublet has
//! `Δ_P = B_z/B0` and the ground doublet `Δ_S = (g_S/g_P) Δ_P`. Widths are
//! reported relative to the undressed natural width `Γ0` and do not depend on
//! the dipole amplitude. Excited and ground field bases are identified
//! (`<l', f_S|l, f_P> = δ_l'l`), which makes the width with exact or RWA
//! coefficients exactly `Γ0`; only the UAA states, which are not mutually
//! orthogonal, move away from it.
//!
//! Spin `↑` of either doublet is taken as `m_s = +1/2`. Swapping the
//! assignment for both doublets leaves every width unchanged.

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{
    default_n_max, dressed_state, DressedState, ExactSpectrum, ModelParams, Parity, Solver, HBAR,
};
use crate::emission::check_grid;
use crate::error::{Error, Result};

/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const GAUSS: f64 = 1e-4;

/// Ground states closer than this to the excited support are summed.
pub const WINDOW_MARGIN: usize = 2;
/// Smallest fraction of the doubled window the summed window must retain.
pub const MIN_RETAINED: f64 = 0.9999;

/// Rows with `|C+|² + |C-|²` below this do not count as support.
const SUPPORT_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SodiumParams {
    /// Static field, Gauss.
    pub b_z: f64,
    /// Drive amplitude, Gauss.
    pub b_x: f64,
    /// Reference field setting the energy unit, Gauss.
    pub b_0: f64,
    pub g_p: f64,
    pub g_s: f64,
    pub n0: usize,
    /// Transition wavelength, nm.
    pub lambda_nm: f64,
}

impl Default for SodiumParams {
    fn default() -> Self {
        Self { b_z: 100.0, b_x: 0.0, b_0: 100.0, g_p: 2.0 / 3.0, g_s: 2.0, n0: 200, lambda_nm: 589.6 }
    }
}

impl SodiumParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("b_z", self.b_z),
            ("b_0", self.b_0),
            ("g_p", self.g_p),
            ("g_s", self.g_s),
            ("lambda_nm", self.lambda_nm),
        ];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidParams(format!("{name} = {x} must be positive")));
            }
        }
        if !(self.b_x.is_finite() && self.b_x >= 0.0) {
            return Err(Error::InvalidParams(format!("b_x = {} must be >= 0", self.b_x)));
        }
        if self.n0 == 0 {
            return Err(Error::InvalidParams("n0 must be positive".into()));
        }
        Ok(())
    }

    /// Same atom with the drive set from `Ω_R = B_x / B0`.
    pub fn with_omega_r(mut self, omega_r: f64) -> Result<Self> {
        self.b_x = omega_r * self.b_0;
        self.validate()?;
        Ok(self)
    }
}

/// Dimensionless model parameters of both doublets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub delta_p: f64,
    pub delta_s: f64,
    pub f_p: f64,
    pub f_s: f64,
    pub omega_r: f64,
    /// Transition energy in units of `g_P μ_B B0`.
    pub e0: f64,
}

impl DerivedParams {
    pub fn excited(&self) -> ModelParams {
        ModelParams { delta: self.delta_p, f: self.f_p }
    }

    pub fn ground(&self) -> ModelParams {
        ModelParams { delta: self.delta_s, f: self.f_s }
    }
}

pub fn derive_params(sp: &SodiumParams) -> Result<DerivedParams> {
    sp.validate()?;
    let ratio = sp.g_s / sp.g_p;
    let delta_p = sp.b_z / sp.b_0;
    let f_p = sp.b_x / (2.0 * sp.b_0 * (sp.n0 as f64).sqrt());
    let unit = sp.g_p * BOHR_MAGNETON * sp.b_0 * GAUSS;
    let transition = 2.0 * std::f64::consts::PI * HBAR * SPEED_OF_LIGHT / (sp.lambda_nm * 1e-9);
    Ok(DerivedParams {
        delta_p,
        delta_s: ratio * delta_p,
        f_p,
        f_s: ratio * f_p,
        omega_r: sp.b_x / sp.b_0,
        e0: transition / unit,
    })
}

/// Polarization of a transition dipole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    /// `e_z`.
    Z,
    /// `e_+ = e_x + i e_y`.
    Plus,
    /// `e_- = e_x - i e_y`.
    Minus,
}

impl Polarization {
    pub fn vector(self) -> [Complex<f64>; 3] {
        let (zero, one, i) = (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 1.0));
        match self {
            Polarization::Z => [zero, zero, one],
            Polarization::Plus => [one, i, zero],
            Polarization::Minus => [one, -i, zero],
        }
    }
}

/// Transition dipoles `d_{s, s'}` from excited `m_s = s` to ground `m_s = s'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSet {
    pub d0: Complex<f64>,
}

impl DipoleSet {
    pub fn new(d0: Complex<f64>) -> Self {
        Self { d0 }
    }

    /// Coefficient of `d0` and polarization; spins are `true` for `+1/2`.
    pub fn component(excited_up: bool, ground_up: bool) -> (f64, Polarization) {
        match (excited_up, ground_up) {
            (true, true) => (1.0 / 3.0, Polarization::Z),
            (false, false) => (-1.0 / 3.0, Polarization::Z),
            (true, false) => (2.0 / 3.0, Polarization::Minus),
            (false, true) => (2.0 / 3.0, Polarization::Plus),
        }
    }

    pub fn vector(&self, excited_up: bool, ground_up: bool) -> [Complex<f64>; 3] {
        let (c, pol) = Self::component(excited_up, ground_up);
        pol.vector().map(|e| e * self.d0 * c)
    }
}

/// `Γ0 = (4 E0 / 3)|d0|²`, shared by both undressed excited sublevels.
pub fn natural_width(e0: f64, d0: Complex<f64>) -> f64 {
    4.0 * e0 / 3.0 * d0.norm_sqr()
}

/// `D^{s'}_{s} = Σ_l G_{l s'} E_{l s}` for `(s, s') ∈ {++, +-, -+, --}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub n: usize,
    pub parity: Parity,
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl Projection {
    fn between(ground: &DressedState, excited: &DressedState) -> Self {
        let (mut pp, mut pm, mut mp, mut mm) = (0.0, 0.0, 0.0, 0.0);
        for (l, ep, em) in excited.coeffs.iter() {
            let (gp, gm) = ground.coeffs.get(l);
            pp += gp * ep;
            pm += gm * ep;
            mp += gp * em;
            mm += gm * em;
        }
        Self { n: ground.n, parity: ground.parity, pp, pm, mp, mm }
    }

    /// `(|D⁻₊ + D⁺₋|² + 4|D⁺₊ - D⁻₋|² + 4|D⁻₊ - D⁺₋|²) / 9`.
    pub fn normalized_rate(&self) -> f64 {
        let z = self.pm + self.mp;
        let a = self.pp - self.mm;
        let b = self.pm - self.mp;
        (z * z + 4.0 * a * a + 4.0 * b * b) / 9.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SodiumWidth {
    pub n: usize,
    pub parity: Parity,
    pub solver: Solver,
    /// `Γ_np / Γ0`.
    pub normalized: f64,
    /// Fraction of the doubled window's width captured by the summed window.
    pub retained: f64,
    /// `Σ |D^{s'}_{s}|²` over ground labels and `s'`, for `s = +` and `s = -`.
    pub projection_norms: [f64; 2],
    pub projections: Vec<Projection>,
}

fn support(state: &DressedState) -> Option<(usize, usize)> {
    let rows: Vec<usize> =
        state.coeffs.iter().filter(|&(_, p, m)| p * p + m * m >= SUPPORT_FLOOR).map(|r| r.0).collect();
    Some((*rows.first()?, *rows.last()?))
}

fn labels(lo: usize, hi: usize, margin: usize) -> Vec<(usize, Parity)> {
    (lo.saturating_sub(margin)..=hi + margin)
        .flat_map(|n| Parity::BOTH.map(|p| (n, p)))
        .filter(|&(n, p)| !(n == 0 && p.partner_offset(0) < 0))
        .collect()
}

/// Mean field number `Σ_l l (C_l+² + C_l-²)`.
fn mean_field_number(state: &DressedState) -> f64 {
    state.coeffs.iter().map(|(l, p, m)| l as f64 * (p * p + m * m)).sum::<f64>() / state.coeffs.norm_sq()
}

/// Ground states paired with their distance from the excited support.
///
/// UAA and RWA states are taken label by label. Exact states are every
/// eigenvector of a diagonalization reaching well past the window, placed by
/// their mean field number, since only the completeness of the set matters.
fn ground_states(
    ground: &ModelParams,
    lo: usize,
    hi: usize,
    margin: usize,
    solver: Solver,
) -> Result<Vec<(f64, DressedState)>> {
    let distance = |x: f64| (lo as f64 - x).max(x - hi as f64).max(0.0);
    match solver {
        Solver::Exact => {
            let spectrum = ExactSpectrum::solve(ground, default_n_max(ground, hi + margin))?;
            let mut out = Vec::new();
            for p in Parity::BOTH {
                for s in spectrum.eigenstates(p)? {
                    let d = distance(mean_field_number(&s));
                    if d <= margin as f64 {
                        out.push((d, s));
                    }
                }
            }
            Ok(out)
        }
        _ => labels(lo, hi, margin)
            .into_iter()
            .map(|(n, p)| Ok((distance(n as f64), dressed_state(ground, n, p, solver)?)))
            .collect(),
    }
}

/// Normalized width `Γ_np / Γ0` of the excited dressed state `(n, p)`.
///
/// Ground states within [`WINDOW_MARGIN`] of the excited support are summed
/// (by label for UAA and RWA, by mean field number for exact eigenvectors).
/// The summed window must hold at least [`MIN_RETAINED`] of the same sum over
/// a window twice as long, otherwise [`Error::Truncation`] is returned.
pub fn sodium_linewidth(sp: &SodiumParams, n: usize, parity: Parity, solver: Solver) -> Result<SodiumWidth> {
    let d = derive_params(sp)?;
    let excited = dressed_state(&d.excited(), n, parity, solver)?;
    let (lo, hi) = support(&excited).ok_or_else(|| Error::InvalidParams("empty excited state".into()))?;
    let wide_margin = WINDOW_MARGIN + (hi - lo + 1 + 2 * WINDOW_MARGIN) / 2;
    let states = ground_states(&d.ground(), lo, hi, wide_margin, solver)?;
    let all: Vec<(f64, Projection)> =
        states.iter().map(|(d, g)| (*d, Projection::between(g, &excited))).collect();
    let projections: Vec<Projection> =
        all.iter().filter(|(d, _)| *d <= WINDOW_MARGIN as f64).map(|(_, p)| *p).collect();

    let normalized: f64 = projections.iter().map(Projection::normalized_rate).sum();
    let total: f64 = all.iter().map(|(_, p)| p.normalized_rate()).sum();
    let retained = if total > 0.0 { normalized / total } else { 1.0 };
    if retained < MIN_RETAINED {
        return Err(Error::Truncation { retained });
    }
    let projection_norms = [
        projections.iter().map(|p| p.pp * p.pp + p.pm * p.pm).sum(),
        projections.iter().map(|p| p.mp * p.mp + p.mm * p.mm).sum(),
    ];
    Ok(SodiumWidth { n, parity, solver, normalized, retained, projection_norms, projections })
}

/// One row of a sodium sweep at the drive photon number `n0`.
#[derive(Debug)]
pub struct SodiumRow {
    pub omega_r: f64,
    pub plus: Result<SodiumWidth>,
    pub minus: Result<SodiumWidth>,
}

impl SodiumRow {
    pub fn normalized(&self, parity: Parity) -> Option<f64> {
        let r = match parity {
            Parity::Plus => &self.plus,
            Parity::Minus => &self.minus,
        };
        r.as_ref().ok().map(|w| w.normalized)
    }

    /// Mean of the two parities.
    pub fn averaged(&self) -> Option<f64> {
        Some(0.5 * (self.normalized(Parity::Plus)? + self.normalized(Parity::Minus)?))
    }

    pub fn is_ok(&self) -> bool {
        self.plus.is_ok() && self.minus.is_ok()
    }
}

/// Normalized widths of `(n0, ±)` over a grid of `Ω_R = B_x / B0`.
pub fn sodium_sweep(sp: &SodiumParams, omega_r_grid: &[f64], solver: Solver) -> Result<Vec<SodiumRow>> {
    sp.validate()?;
    check_grid(omega_r_grid, 1)?;
    if let Some(x) = omega_r_grid.iter().find(|&&x| x < 0.0) {
        return Err(Error::InvalidGrid(format!("negative Rabi frequency {x}")));
    }
    Ok(omega_r_grid
        .par_iter()
        .map(|&omega_r| {
            let solve = |p| sp.with_omega_r(omega_r).and_then(|s| sodium_linewidth(&s, s.n0, p, solver));
            SodiumRow { omega_r, plus: solve(Parity::Plus), minus: solve(Parity::Minus) }
        })
        .collect())
}
