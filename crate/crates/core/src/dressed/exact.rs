//! Truncated exact diagonalization in the bare basis `|k> ⊗ {↑, ↓}`.
//!
//! The Hamiltonian commutes with `P = σ3 exp(iπ a†a)`. Each parity sector is
//! the chain `|0, s_0>, |1, s_1>, ...` with `s_k = p (-1)^k`, so the full
//! matrix is diagonalized block by block and every eigenvector is checked
//! against `P` before it is labeled.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{
    uaa_coefficients, uaa_quasi_energy, Basis, Coefficients, DressedState, ModelParams, Parity, Solver,
};
use crate::error::{Error, Result};

/// Largest eigenvalue shift tolerated when `n_max` grows by 25%.
pub const CONVERGENCE_TOL: f64 = 1e-10;
const PARITY_TOL: f64 = 1e-6;
const TIE_TOL: f64 = 1e-6;
const CANDIDATE_WINDOW: f64 = 1.5;
const TRIM: f64 = 1e-16;

/// `n + max(50, ceil(10 f n))`.
pub fn default_n_max(params: &ModelParams, n: usize) -> usize {
    let spread = (10.0 * params.f * n as f64).ceil() as usize;
    n + spread.max(50)
}

fn check_n_max(n_max: usize) -> usize {
    (n_max as f64 * 1.25).ceil() as usize
}

/// Highest label reported by [`exact_dressed_states`] for a given truncation.
fn window_top(params: &ModelParams, n_max: usize) -> usize {
    let by_spread = (n_max as f64 / (1.0 + 10.0 * params.f)).floor() as usize;
    by_spread.min(n_max.saturating_sub(10))
}

fn spin_index(k: usize, up: bool) -> usize {
    2 * k + if up { 0 } else { 1 }
}

/// The `2 n_max` square matrix over `|k>⊗χ↑, |k>⊗χ↓` (row `2k` is spin up).
pub fn build_hamiltonian(params: &ModelParams, n_max: usize) -> DMatrix<f64> {
    let dim = 2 * n_max;
    let mut h = DMatrix::zeros(dim, dim);
    for k in 0..n_max {
        let kf = k as f64;
        h[(spin_index(k, true), spin_index(k, true))] = kf + 0.5 * params.delta;
        h[(spin_index(k, false), spin_index(k, false))] = kf - 0.5 * params.delta;
        if k + 1 < n_max {
            let g = params.f * ((k + 1) as f64).sqrt();
            for up in [true, false] {
                let i = spin_index(k, up);
                let j = spin_index(k + 1, !up);
                h[(i, j)] = g;
                h[(j, i)] = g;
            }
        }
    }
    h
}

fn sector_spin_up(parity: Parity, k: usize) -> bool {
    parity.sign() * Parity::of_index(k).sign() > 0
}

#[derive(Debug, Clone)]
struct Sector {
    parity: Parity,
    /// Ascending.
    energies: Vec<f64>,
    /// Column `j` is the eigenvector of `energies[j]` over the chain basis.
    vectors: DMatrix<f64>,
}

impl Sector {
    fn solve(h: &DMatrix<f64>, n_max: usize, parity: Parity) -> Result<Self> {
        let idx: Vec<usize> = (0..n_max).map(|k| spin_index(k, sector_spin_up(parity, k))).collect();
        let block = DMatrix::from_fn(n_max, n_max, |i, j| h[(idx[i], idx[j])]);
        let eig = SymmetricEigen::new(block);
        let mut order: Vec<usize> = (0..n_max).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&j| eig.eigenvalues[j]).collect();
        let vectors = DMatrix::from_fn(n_max, n_max, |i, j| eig.eigenvectors[(i, order[j])]);
        let sector = Sector { parity, energies, vectors };
        sector.check_parity(n_max)?;
        Ok(sector)
    }

    /// Every eigenvector, embedded in the full space, must satisfy
    /// `|<P>| = 1`.
    fn check_parity(&self, n_max: usize) -> Result<()> {
        for j in 0..self.energies.len() {
            let mut expectation = 0.0;
            let mut norm = 0.0;
            for k in 0..n_max {
                let v = self.vectors[(k, j)];
                let sigma3 = if sector_spin_up(self.parity, k) { 1.0 } else { -1.0 };
                let field = Parity::of_index(k).value();
                expectation += sigma3 * field * v * v;
                norm += v * v;
            }
            let expectation = expectation / norm;
            if (expectation - self.parity.value()).abs() > PARITY_TOL {
                return Err(Error::ParityAmbiguous { index: j, expectation });
            }
        }
        Ok(())
    }

    fn to_state(&self, column: usize, sign: f64, n: usize, parity: Parity) -> DressedState {
        let n_max = self.vectors.nrows();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut plus = Vec::with_capacity(n_max);
        let mut minus = Vec::with_capacity(n_max);
        for k in 0..n_max {
            let v = sign * self.vectors[(k, column)];
            let (up, down) = if sector_spin_up(self.parity, k) { (v, 0.0) } else { (0.0, v) };
            plus.push(r * (up + down));
            minus.push(r * (up - down));
        }
        DressedState {
            n,
            parity,
            q: parity.partner_offset(n),
            energy: self.energies[column],
            coeffs: Coefficients::new(0, plus, minus).trimmed(TRIM),
            basis: Basis::Bare,
            solver: Solver::Exact,
        }
    }

    /// Chain-basis amplitudes of a bare-basis state.
    fn project(&self, state: &DressedState) -> Vec<(usize, f64)> {
        state
            .spin_amplitudes()
            .into_iter()
            .filter(|&(k, _, _)| k < self.vectors.nrows())
            .map(|(k, up, down)| (k, if sector_spin_up(self.parity, k) { up } else { down }))
            .collect()
    }

    /// Column assigned to `(n, p)` and the sign making its overlap with the
    /// UAA candidate positive.
    fn assign(&self, params: &ModelParams, n: usize) -> Result<(usize, f64)> {
        let parity = self.parity;
        let target = uaa_quasi_energy(params, n, parity)?;
        let lo = self.energies.partition_point(|&e| e < target - CANDIDATE_WINDOW);
        let hi = self.energies.partition_point(|&e| e <= target + CANDIDATE_WINDOW);
        let range = if lo < hi { lo..hi } else { 0..self.energies.len() };
        if range.is_empty() {
            return Err(Error::LabelNotFound { n, parity });
        }

        let candidate = uaa_coefficients(params, n, parity).map(|s| self.project(&s.to_bare()));
        let Ok(candidate) = candidate else {
            // No usable UAA vector: nearest energy, sign fixed by the largest component.
            let j = range
                .min_by(|&a, &b| {
                    (self.energies[a] - target).abs().total_cmp(&(self.energies[b] - target).abs())
                })
                .ok_or(Error::LabelNotFound { n, parity })?;
            let col = self.vectors.column(j);
            let big = col.iter().copied().fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
            return Ok((j, if big < 0.0 { -1.0 } else { 1.0 }));
        };

        let mut best: Option<(usize, f64)> = None;
        for j in range {
            let overlap: f64 = candidate.iter().map(|&(k, c)| c * self.vectors[(k, j)]).sum();
            best = match best {
                None => Some((j, overlap)),
                Some((bj, bo)) => {
                    let (a, b) = (overlap.abs(), bo.abs());
                    let closer = (self.energies[j] - target).abs() < (self.energies[bj] - target).abs();
                    if a > b + TIE_TOL || ((a - b).abs() <= TIE_TOL && closer) {
                        Some((j, overlap))
                    } else {
                        Some((bj, bo))
                    }
                }
            };
        }
        let (j, overlap) = best.ok_or(Error::LabelNotFound { n, parity })?;
        Ok((j, if overlap < 0.0 { -1.0 } else { 1.0 }))
    }
}

/// Eigen-decomposition of the truncated Hamiltonian, one block per parity.
#[derive(Debug, Clone)]
pub struct ExactSpectrum {
    params: ModelParams,
    n_max: usize,
    sectors: Vec<Sector>,
}

impl ExactSpectrum {
    pub fn solve(params: &ModelParams, n_max: usize) -> Result<Self> {
        Self::solve_sectors(params, n_max, &Parity::BOTH)
    }

    /// Diagonalize only the listed parity sectors.
    pub fn solve_sectors(params: &ModelParams, n_max: usize, parities: &[Parity]) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParams(format!("n_max must be >= 2, got {n_max}")));
        }
        let h = build_hamiltonian(params, n_max);
        let sectors = parities.iter().map(|&p| Sector::solve(&h, n_max, p)).collect::<Result<Vec<_>>>()?;
        Ok(Self { params: *params, n_max, sectors })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn sector(&self, parity: Parity) -> Result<&Sector> {
        self.sectors
            .iter()
            .find(|s| s.parity == parity)
            .ok_or_else(|| Error::InvalidParams(format!("parity sector {parity} not solved")))
    }

    /// Ascending eigenvalues of one sector.
    pub fn energies(&self, parity: Parity) -> Result<&[f64]> {
        Ok(&self.sector(parity)?.energies)
    }

    /// The eigenvector matched to `(n, p)`.
    ///
    /// Candidates are the sector eigenvectors within 1.5 of the UAA energy;
    /// the one with the largest overlap with the UAA state wins, ties
    /// (overlaps within `1e-6`) going to the smaller energy gap.
    pub fn state(&self, n: usize, parity: Parity) -> Result<DressedState> {
        let sector = self.sector(parity)?;
        let (j, sign) = sector.assign(&self.params, n)?;
        Ok(sector.to_state(j, sign, n, parity))
    }

    /// Every eigenvector of one sector in ascending energy, unlabeled: `n` is
    /// the position in the sector spectrum.
    pub fn eigenstates(&self, parity: Parity) -> Result<Vec<DressedState>> {
        let sector = self.sector(parity)?;
        Ok((0..sector.energies.len()).map(|j| sector.to_state(j, 1.0, j, parity)).collect())
    }

    /// Labels `(n, p)` whose energies are trusted for this truncation.
    pub fn window(&self) -> Vec<(usize, Parity)> {
        let top = window_top(&self.params, self.n_max);
        (0..=top)
            .flat_map(|n| self.sectors.iter().map(move |s| (n, s.parity)))
            .filter(|&(n, p)| !(n == 0 && p.partner_offset(0) < 0))
            .collect()
    }

    /// Every state in [`window`](Self::window), each eigenvector used once.
    pub fn labeled_states(&self) -> Result<Vec<DressedState>> {
        let mut claimed: Vec<(Parity, usize, usize)> = Vec::new();
        let mut out = Vec::new();
        for (n, parity) in self.window() {
            let sector = self.sector(parity)?;
            let (j, sign) = sector.assign(&self.params, n)?;
            if let Some(&(_, _, first)) = claimed.iter().find(|&&(p, col, _)| p == parity && col == j) {
                return Err(Error::LabelConflict { first, second: n, parity });
            }
            claimed.push((parity, j, n));
            out.push(sector.to_state(j, sign, n, parity));
        }
        Ok(out)
    }
}

fn certify(a: &[DressedState], b: &[DressedState], n_max: usize, n_max_check: usize) -> Result<()> {
    let shift = a.iter().zip(b).map(|(x, y)| (x.energy - y.energy).abs()).fold(0.0_f64, f64::max);
    if shift >= CONVERGENCE_TOL {
        return Err(Error::NotConverged { n_max, n_max_check, shift });
    }
    Ok(())
}

/// All labeled exact states of the truncated problem.
///
/// The states are certified by repeating the calculation with a 25% larger
/// truncation: every reported energy must move by less than
/// [`CONVERGENCE_TOL`].
pub fn exact_dressed_states(params: &ModelParams, n_max: usize) -> Result<Vec<DressedState>> {
    let spectrum = ExactSpectrum::solve(params, n_max)?;
    let states = spectrum.labeled_states()?;
    let n_max_check = check_n_max(n_max);
    let wider = ExactSpectrum::solve(params, n_max_check)?;
    let check = spectrum.window().into_iter().map(|(n, p)| wider.state(n, p)).collect::<Result<Vec<_>>>()?;
    certify(&states, &check, n_max, n_max_check)?;
    Ok(states)
}

/// A single certified exact state. `n_max` defaults to [`default_n_max`].
pub fn exact_state(
    params: &ModelParams,
    n: usize,
    parity: Parity,
    n_max: Option<usize>,
) -> Result<DressedState> {
    let mut states = exact_states(params, &[(n, parity)], n_max)?;
    Ok(states.remove(0))
}

/// Certified exact states for a list of labels from one diagonalization.
///
/// `n_max` defaults to [`default_n_max`] of the largest label. Two labels that
/// resolve to the same eigenvector are an error.
pub fn exact_states(
    params: &ModelParams,
    labels: &[(usize, Parity)],
    n_max: Option<usize>,
) -> Result<Vec<DressedState>> {
    let top = labels.iter().map(|l| l.0).max().unwrap_or(0);
    let n_max = n_max.unwrap_or_else(|| default_n_max(params, top));
    let mut parities: Vec<Parity> = labels.iter().map(|l| l.1).collect();
    parities.sort();
    parities.dedup();
    let label_all = |n_max: usize| -> Result<Vec<DressedState>> {
        let spectrum = ExactSpectrum::solve_sectors(params, n_max, &parities)?;
        let mut claimed: Vec<(Parity, usize, usize)> = Vec::new();
        let mut out = Vec::with_capacity(labels.len());
        for &(n, parity) in labels {
            let sector = spectrum.sector(parity)?;
            let (j, sign) = sector.assign(params, n)?;
            if let Some(&(_, _, first)) =
                claimed.iter().find(|&&(p, col, m)| p == parity && col == j && m != n)
            {
                return Err(Error::LabelConflict { first, second: n, parity });
            }
            claimed.push((parity, j, n));
            out.push(sector.to_state(j, sign, n, parity));
        }
        Ok(out)
    };
    let states = label_all(n_max)?;
    let n_max_check = check_n_max(n_max);
    let check = label_all(n_max_check)?;
    certify(&states, &check, n_max, n_max_check)?;
    Ok(states)
}
