//! Stationary fluorescence spectrum: a sum of Lorentzians, one per emitting
//! state `(n, p)` and final field number `m`, centered at `E0 + E_np - m` with
//! the width of the emitting state.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bare_dipoles, check_grid, dot, emission_channels, linewidth, OverlapMode, VModelParams};
use crate::dressed::{dressed_state, Parity, Solver};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Initial excited-state density matrix over dressed labels.
///
/// Off-diagonal entries can be stored but spectra are only evaluated for
/// diagonal matrices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DensityMatrix {
    /// `(n, p, n', p', ρ)`.
    pub entries: Vec<(usize, Parity, usize, Parity, f64)>,
}

impl DensityMatrix {
    /// Both parities of `n0` populated with weight 1/2.
    pub fn stationary(n0: usize) -> Self {
        Self { entries: Parity::BOTH.iter().map(|&p| (n0, p, n0, p, 0.5)).collect() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|&(n, p, n2, p2, rho)| rho == 0.0 || (n, p) == (n2, p2))
    }

    /// Nonzero diagonal entries `(n, p, ρ_np)`.
    pub fn populations(&self) -> Result<Vec<(usize, Parity, f64)>> {
        if !self.is_diagonal() {
            return Err(Error::InvalidParams("only diagonal density matrices are supported".into()));
        }
        Ok(self.entries.iter().filter(|e| e.4 != 0.0).map(|&(n, p, _, _, rho)| (n, p, rho)).collect())
    }
}

/// One Lorentzian component of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// `E0 + E_np - m`.
    pub center: f64,
    /// Numerator at the center: the peak height is `weight / (width/2)²`.
    pub weight: f64,
    /// Full width at half maximum, the `Γ_np` of the emitting state.
    pub width: f64,
    pub n: usize,
    pub parity: Parity,
    pub m: usize,
}

impl Peak {
    /// Contribution `weight (ω/center) / ((ω - center)² + width²/4)`.
    pub fn value(&self, omega: f64) -> f64 {
        let x = omega - self.center;
        self.weight * (omega / self.center) / (x * x + 0.25 * self.width * self.width)
    }

    /// Area of the Lorentzian with this numerator, `π weight / (width/2)`.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.weight / (0.5 * self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub solver: Solver,
    pub omega_grid: Vec<f64>,
    pub intensity: Vec<f64>,
    pub peaks: Vec<Peak>,
}

impl Spectrum {
    /// Intensity of peak `k` alone on the grid.
    pub fn component(&self, k: usize) -> Vec<f64> {
        let peak = self.peaks[k];
        self.omega_grid.iter().map(|&w| peak.value(w)).collect()
    }
}

/// Peaks emitted by the populated states.
///
/// Field sums use the stored coefficients directly, so UAA peaks come from
/// the two displaced levels of each state; exact-solver states keep rows with
/// amplitude at least `1e-12`. Each peak's width is the emitting state's
/// width from the same solver.
pub fn spectrum_peaks(v: &VModelParams, rho: &DensityMatrix, solver: Solver) -> Result<Vec<Peak>> {
    v.validate()?;
    let populations = rho.populations()?;
    let d = bare_dipoles(v);
    let g = v.geometry;
    let obs_up = dot(g.observation, g.up);
    let obs_down = dot(g.observation, g.down);
    let a_up = d.up_sq * (1.0 - obs_up * obs_up);
    let a_down = d.down_sq * (1.0 - obs_down * obs_down);
    let a_cross = (d.up_sq * d.down_sq).sqrt() * (g.alignment() - obs_up * obs_down);
    let norm = (4.0 * std::f64::consts::PI).powi(2);

    let per_state: Vec<Vec<Peak>> = populations
        .par_iter()
        .map(|&(n, parity, population)| -> Result<Vec<Peak>> {
            let state = dressed_state(&v.model(), n, parity, solver)?;
            let width = linewidth(&state, v, OverlapMode::Delta)?.gamma;
            let channels = emission_channels(&state, v.e0, OverlapMode::Delta)?;
            Ok(channels
                .into_iter()
                .map(|(m, center, sum_sq, diff_sq, cross)| {
                    let numerator = sum_sq * a_up + diff_sq * a_down + 2.0 * cross * a_cross;
                    Peak { center, weight: population * center * numerator / norm, width, n, parity, m }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_state.into_iter().flatten().collect())
}

/// [`DEFAULT_GRID_POINTS`] samples over `[min center - 10Γ, max center + 10Γ]`
/// with `Γ` the largest width.
pub fn default_grid(peaks: &[Peak]) -> Result<Vec<f64>> {
    if peaks.is_empty() {
        return Err(Error::InvalidGrid("no peaks to cover".into()));
    }
    let width = peaks.iter().map(|p| p.width).fold(0.0, f64::max);
    let lo = peaks.iter().map(|p| p.center).fold(f64::INFINITY, f64::min) - 10.0 * width;
    let hi = peaks.iter().map(|p| p.center).fold(f64::NEG_INFINITY, f64::max) + 10.0 * width;
    let step = (hi - lo) / (DEFAULT_GRID_POINTS - 1) as f64;
    Ok((0..DEFAULT_GRID_POINTS).map(|i| lo + step * i as f64).collect())
}

/// Spectrum of an arbitrary diagonal initial population.
pub fn spectrum_for(
    v: &VModelParams,
    rho: &DensityMatrix,
    omega_grid: Option<&[f64]>,
    solver: Solver,
) -> Result<Spectrum> {
    let peaks = spectrum_peaks(v, rho, solver)?;
    let omega_grid = match omega_grid {
        Some(g) => g.to_vec(),
        None => default_grid(&peaks)?,
    };
    check_grid(&omega_grid, 2)?;
    let (lo, hi) = (omega_grid[0], omega_grid[omega_grid.len() - 1]);
    for p in peaks.iter().filter(|p| p.weight > 0.0) {
        if p.center - 5.0 * p.width < lo || p.center + 5.0 * p.width > hi {
            return Err(Error::GridClipping { lo, hi, center: p.center, width: p.width });
        }
    }
    let intensity = omega_grid.iter().map(|&w| peaks.iter().map(|p| p.value(w)).sum()).collect();
    Ok(Spectrum { solver, omega_grid, intensity, peaks })
}

/// Spectrum with both parities of `n0` equally populated.
pub fn spectrum(v: &VModelParams, omega_grid: Option<&[f64]>, solver: Solver) -> Result<Spectrum> {
    spectrum_for(v, &DensityMatrix::stationary(v.n0), omega_grid, solver)
}

/// Position of the maximum and full width at half maximum of a sampled
/// single-peaked curve, with linear interpolation at the half-height
/// crossings. `None` if either crossing lies outside the grid.
pub fn extract_fwhm(grid: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let (top, &peak) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    let half = 0.5 * peak;
    let cross = |i: usize, j: usize| {
        let t = (half - values[i]) / (values[j] - values[i]);
        grid[i] + t * (grid[j] - grid[i])
    };
    let left = (0..top).rev().find(|&i| values[i] < half).map(|i| cross(i, i + 1))?;
    let right = (top + 1..values.len()).find(|&i| values[i] < half).map(|i| cross(i - 1, i))?;
    Some((grid[top], right - left))
}
