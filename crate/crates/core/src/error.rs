use thiserror::Error;

use crate::dressed::Parity;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("label (n = {n}, p = {parity}) has no partner level n + q")]
    InvalidLabel { n: usize, parity: Parity },

    #[error("degenerate gamma denominator {denominator:e} for (n = {n}, p = {parity})")]
    DegenerateDenominator { n: usize, parity: Parity, denominator: f64 },

    #[error(
        "exact solver not converged: eigenvalue moved by {shift:e} between n_max = {n_max} and {n_max_check}"
    )]
    NotConverged { n_max: usize, n_max_check: usize, shift: f64 },

    #[error("eigenvector {index} has parity expectation {expectation}, not +-1")]
    ParityAmbiguous { index: usize, expectation: f64 },

    #[error("no exact eigenvector matches (n = {n}, p = {parity})")]
    LabelNotFound { n: usize, parity: Parity },

    #[error("labels (n = {first}) and (n = {second}) with p = {parity} claim the same eigenvector")]
    LabelConflict { first: usize, second: usize, parity: Parity },

    #[error("negative emission energy {weight} at field index {m}")]
    EnergyConservation { m: usize, weight: f64 },

    #[error("frequency grid [{lo}, {hi}] does not cover peak at {center} +- 5 widths ({width})")]
    GridClipping { lo: f64, hi: f64, center: f64, width: f64 },

    #[error("ground-state window retains only {retained} of the wider window")]
    Truncation { retained: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
