//! Spontaneous emission of a V-configuration atom whose excited doublet is
//! dressed by the drive: one ground level `|0>` at depth `E0` below the
//! doublet center and two dipole transitions `d↑`, `d↓`.
//!
//! Widths follow from the Weisskopf–Wigner golden rule summed over final
//! field states `m`, each channel weighted by its emitted frequency
//! `E + E0 - m`. Stationary fluorescence spectra live in [`spectrum`].

mod spectrum;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{dressed_state, Basis, DressedState, ModelParams, Parity, Solver};
use crate::error::{Error, Result};

pub use spectrum::{
    default_grid, extract_fwhm, spectrum, spectrum_for, spectrum_peaks, DensityMatrix, Peak, Spectrum,
    DEFAULT_GRID_POINTS,
};

/// Rows with `|C+|² + |C-|²` below this are treated as outside the support.
const SUPPORT_FLOOR: f64 = 1e-24;

/// Orientation of the two transition dipoles and of the observation axis.
///
/// Only directions matter; magnitudes come from the bare widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleGeometry {
    pub up: [f64; 3],
    pub down: [f64; 3],
    pub observation: [f64; 3],
}

impl DipoleGeometry {
    /// `d↑ ∥ z`, `d↓ ∥ -z`, photons observed along `x`.
    pub fn antiparallel() -> Self {
        Self { up: [0.0, 0.0, 1.0], down: [0.0, 0.0, -1.0], observation: [1.0, 0.0, 0.0] }
    }

    /// `d↑ ∥ d↓ ∥ z`, photons observed along `x`.
    pub fn parallel() -> Self {
        Self { up: [0.0, 0.0, 1.0], down: [0.0, 0.0, 1.0], observation: [1.0, 0.0, 0.0] }
    }

    pub fn new(up: [f64; 3], down: [f64; 3], observation: [f64; 3]) -> Result<Self> {
        let unit = |v: [f64; 3], name: &str| -> Result<[f64; 3]> {
            let len = dot(v, v).sqrt();
            if !len.is_finite() || len == 0.0 {
                return Err(Error::InvalidParams(format!("{name} direction must be nonzero")));
            }
            Ok([v[0] / len, v[1] / len, v[2] / len])
        };
        Ok(Self {
            up: unit(up, "d_up")?,
            down: unit(down, "d_down")?,
            observation: unit(observation, "observation")?,
        })
    }

    /// `û·d̂`.
    pub fn alignment(&self) -> f64 {
        dot(self.up, self.down)
    }
}

impl Default for DipoleGeometry {
    fn default() -> Self {
        Self::antiparallel()
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Parameters of the V-configuration emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VModelParams {
    pub e0: f64,
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub delta: f64,
    pub f: f64,
    pub n0: usize,
    #[serde(default)]
    pub geometry: DipoleGeometry,
}

impl VModelParams {
    pub fn new(e0: f64, gamma_up: f64, gamma_down: f64, delta: f64, f: f64, n0: usize) -> Result<Self> {
        let v = Self { e0, gamma_up, gamma_down, delta, f, n0, geometry: DipoleGeometry::default() };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.delta, self.f)?;
        if !(self.e0.is_finite() && self.e0 > 0.5 * self.delta.abs()) {
            return Err(Error::InvalidParams(format!(
                "e0 = {} must exceed |delta|/2 = {}",
                self.e0,
                0.5 * self.delta.abs()
            )));
        }
        for (name, g) in [("gamma_up", self.gamma_up), ("gamma_down", self.gamma_down)] {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidParams(format!("{name} = {g} must be positive")));
            }
        }
        Ok(())
    }

    pub fn with_geometry(mut self, geometry: DipoleGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    /// Same emitter with the coupling set from `Ω_R = 2f√n0`.
    pub fn with_omega_r(mut self, omega_r: f64) -> Result<Self> {
        if !(omega_r.is_finite() && omega_r >= 0.0) {
            return Err(Error::InvalidParams(format!("omega_r = {omega_r} must be >= 0")));
        }
        if self.n0 == 0 {
            return Err(Error::InvalidParams("n0 must be positive to set omega_r".into()));
        }
        self.f = omega_r / (2.0 * (self.n0 as f64).sqrt());
        self.validate()?;
        Ok(self)
    }

    pub fn omega_r(&self) -> f64 {
        2.0 * self.f * (self.n0 as f64).sqrt()
    }

    pub fn model(&self) -> ModelParams {
        ModelParams { delta: self.delta, f: self.f }
    }

    /// Regime diagnostics that do not stop a calculation.
    pub fn warnings(&self) -> Vec<String> {
        let omega_r = self.omega_r();
        let mut out = Vec::new();
        if self.gamma_up.max(self.gamma_down) >= omega_r {
            out.push(format!(
                "bare widths ({}, {}) are not below the Rabi frequency {}",
                self.gamma_up, self.gamma_down, omega_r
            ));
        }
        if omega_r > 1.0 {
            out.push(format!("Rabi frequency {omega_r} exceeds the drive frequency"));
        }
        out
    }
}

/// Squared dipole magnitudes and their interference term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BareDipoles {
    pub up_sq: f64,
    pub down_sq: f64,
    /// `Re(d↑·d↓*)`.
    pub cross: f64,
}

/// Inverts `Γ↑,↓ = (4/3)(E0 ± Δ/2)|d↑,↓|²`.
pub fn bare_dipoles(v: &VModelParams) -> BareDipoles {
    let up_sq = 3.0 * v.gamma_up / (4.0 * (v.e0 + 0.5 * v.delta));
    let down_sq = 3.0 * v.gamma_down / (4.0 * (v.e0 - 0.5 * v.delta));
    let cross = (up_sq * down_sq).sqrt() * v.geometry.alignment();
    BareDipoles { up_sq, down_sq, cross }
}

/// How `<l, f|m>` enters the width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapMode {
    /// `<l, f|m> = δ_lm`: the displaced coefficients are used as if bare.
    Delta,
    /// Full displaced-to-bare transformation.
    Exact,
}

impl std::fmt::Display for OverlapMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OverlapMode::Delta => "delta",
            OverlapMode::Exact => "exact",
        })
    }
}

/// Width of one dressed state with its interference decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinewidthResult {
    pub n: usize,
    pub parity: Parity,
    pub energy: f64,
    pub gamma: f64,
    pub d_up: f64,
    pub d_down: f64,
    pub d_cross: f64,
    pub mode: OverlapMode,
    pub solver: Solver,
}

/// `(m, w, (C+ + C-)², (C+ - C-)², C+² - C-²)`.
pub(crate) type Channel = (usize, f64, f64, f64, f64);

/// Field-resolved channel sums `(m, w, (C+ + C-)², (C+ - C-)², C+² - C-²)`
/// with `w = E + E0 - m`.
pub(crate) fn emission_channels(state: &DressedState, e0: f64, mode: OverlapMode) -> Result<Vec<Channel>> {
    let top = state.energy + e0;
    let (rows, bounded) = match (mode, state.basis) {
        (OverlapMode::Exact, Basis::Displaced { .. }) => (state.to_bare(), true),
        (OverlapMode::Exact, Basis::Bare) => (state.clone(), true),
        (OverlapMode::Delta, _) => (state.clone(), false),
    };
    let mut out = Vec::new();
    for (m, cp, cm) in rows.coeffs.iter() {
        if cp * cp + cm * cm < SUPPORT_FLOOR {
            continue;
        }
        let w = top - m as f64;
        if bounded && w <= 0.0 {
            continue;
        }
        if w < 0.0 {
            return Err(Error::EnergyConservation { m, weight: w });
        }
        out.push((m, w, (cp + cm).powi(2), (cp - cm).powi(2), cp * cp - cm * cm));
    }
    Ok(out)
}

/// `Γ = (2/3)[|d↑|² D↑ + |d↓|² D↓ + 2 Re(d↑·d↓*) D±]`.
///
/// In [`OverlapMode::Delta`] the sums run over the stored coefficients as they
/// are. In [`OverlapMode::Exact`] displaced-basis states are first expanded
/// over bare Fock states and the field sum stops below `m < E + E0`. Bare-basis
/// states give the same result in both modes whenever their support respects
/// the energy bound.
pub fn linewidth(state: &DressedState, v: &VModelParams, mode: OverlapMode) -> Result<LinewidthResult> {
    v.validate()?;
    if let Basis::Displaced { f } = state.basis {
        if f != v.f {
            return Err(Error::InvalidParams(format!(
                "state is displaced by f = {f} but the emitter has f = {}",
                v.f
            )));
        }
    }
    let (mut d_up, mut d_down, mut d_cross) = (0.0, 0.0, 0.0);
    for (_, w, sum_sq, diff_sq, cross) in emission_channels(state, v.e0, mode)? {
        d_up += w * sum_sq;
        d_down += w * diff_sq;
        d_cross += w * cross;
    }
    let d = bare_dipoles(v);
    let gamma = 2.0 / 3.0 * (d.up_sq * d_up + d.down_sq * d_down + 2.0 * d.cross * d_cross);
    Ok(LinewidthResult {
        n: state.n,
        parity: state.parity,
        energy: state.energy,
        gamma,
        d_up,
        d_down,
        d_cross,
        mode,
        solver: state.solver,
    })
}

/// `Γ_{n0 p}` for one label straight from the emitter parameters.
pub fn state_linewidth(
    v: &VModelParams,
    parity: Parity,
    solver: Solver,
    mode: OverlapMode,
) -> Result<LinewidthResult> {
    v.validate()?;
    let state = dressed_state(&v.model(), v.n0, parity, solver)?;
    linewidth(&state, v, mode)
}

/// One row of a Rabi-frequency sweep.
#[derive(Debug)]
pub struct SweepRow {
    pub omega_r: f64,
    pub plus: Result<LinewidthResult>,
    pub minus: Result<LinewidthResult>,
}

impl SweepRow {
    pub fn gamma(&self, parity: Parity) -> Option<f64> {
        let r = match parity {
            Parity::Plus => &self.plus,
            Parity::Minus => &self.minus,
        };
        r.as_ref().ok().map(|r| r.gamma)
    }

    pub fn is_ok(&self) -> bool {
        self.plus.is_ok() && self.minus.is_ok()
    }
}

/// Checks that a grid is finite and strictly increasing.
pub fn check_grid(grid: &[f64], min_points: usize) -> Result<()> {
    if grid.len() < min_points {
        return Err(Error::InvalidGrid(format!(
            "{} points given, at least {min_points} required",
            grid.len()
        )));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite value {x}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

/// `Γ_{n0,±}` over a Rabi-frequency grid, `f = Ω_R / (2√n0)` per row.
///
/// Rows are independent and computed in parallel; a failing label leaves its
/// error in the row and the sweep continues.
pub fn linewidth_sweep(
    v: &VModelParams,
    omega_r_grid: &[f64],
    solver: Solver,
    mode: OverlapMode,
) -> Result<Vec<SweepRow>> {
    check_grid(omega_r_grid, 1)?;
    if let Some(x) = omega_r_grid.iter().find(|&&x| x < 0.0) {
        return Err(Error::InvalidGrid(format!("negative Rabi frequency {x}")));
    }
    Ok(omega_r_grid
        .par_iter()
        .map(|&omega_r| {
            let row = v.with_omega_r(omega_r);
            let solve = |p| {
                row.as_ref()
                    .map_err(|e| Error::InvalidParams(e.to_string()))
                    .and_then(|r| state_linewidth(r, p, solver, mode))
            };
            SweepRow { omega_r, plus: solve(Parity::Plus), minus: solve(Parity::Minus) }
        })
        .collect())
}
