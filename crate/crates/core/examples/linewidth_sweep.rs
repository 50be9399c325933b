//! Dressed linewidths of both parities against Rabi frequency, with the
//! exact-overlap evaluation for comparison.

use dressed_emission::dressed::{Parity, Solver};
use dressed_emission::emission::{linewidth_sweep, OverlapMode, VModelParams};

fn main() -> dressed_emission::Result<()> {
    let v = VModelParams::new(50.0, 0.10, 0.05, 1.0, 0.0, 225)?;
    let grid: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    let uaa = linewidth_sweep(&v, &grid, Solver::Uaa, OverlapMode::Delta)?;
    let rwa = linewidth_sweep(&v, &grid, Solver::Rwa, OverlapMode::Delta)?;
    let uaa_exact = linewidth_sweep(&v, &grid, Solver::Uaa, OverlapMode::Exact)?;

    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10} {:>12}",
        "Ω_R", "UAA p+", "UAA p-", "RWA p+", "RWA p-", "UAA p+ exact"
    );
    for i in 0..grid.len() {
        let g = |rows: &[dressed_emission::emission::SweepRow], p| rows[i].gamma(p).unwrap_or(f64::NAN);
        println!(
            "{:>5.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>12.6}",
            grid[i],
            g(&uaa, Parity::Plus),
            g(&uaa, Parity::Minus),
            g(&rwa, Parity::Plus),
            g(&rwa, Parity::Minus),
            g(&uaa_exact, Parity::Plus),
        );
    }
    Ok(())
}
