//! Self-checks run by `dressed validate`.

use crate::dressed::{
    dressed_state, exact_state, rwa_state_for_label, uaa_coefficients, uaa_quasi_energy, ExactSpectrum,
    ModelParams, Parity, Solver,
};
use crate::emission::{spectrum, state_linewidth, OverlapMode, VModelParams};
use crate::sodium::{sodium_linewidth, SodiumParams};
use crate::special_fn::{displaced_overlap, s_element};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Informational checks are reported but never fail the run.
    pub gating: bool,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail, gating: true }
    }

    fn info(name: &'static str, detail: String) -> Self {
        Self { name, passed: true, detail, gating: false }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {err}"))
    }

    pub fn line(&self) -> String {
        let tag = match (self.gating, self.passed) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `S_km == S_mk` for `k, m <= 40`.
pub fn check_s_symmetry(s: &dyn Fn(usize, usize, f64) -> f64) -> Check {
    let mut worst = 0.0_f64;
    for f in [0.02, 0.1, 0.4] {
        for k in 0..=40 {
            for m in 0..k {
                let (a, b) = (s(k, m, f), s(m, k, f));
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1e-300));
            }
        }
    }
    Check::new("s-symmetry", worst <= 1e-14, format!("max relative asymmetry {worst:.3e}"))
}

fn check_parity() -> Check {
    let name = "parity";
    let params = ModelParams { delta: 1.0, f: 0.1 };
    let states = match ExactSpectrum::solve(&params, 80).and_then(|s| s.labeled_states()) {
        Ok(s) => s,
        Err(e) => return Check::failed(name, e),
    };
    let worst =
        states.iter().map(|s| (s.parity_expectation() - s.parity.value()).abs()).fold(0.0_f64, f64::max);
    Check::new(name, worst <= 1e-8, format!("{} exact states, max |<P> - p| = {worst:.3e}", states.len()))
}

fn check_normalization() -> Check {
    let name = "normalization";
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (delta, f) in [(1.0, 1.0 / 30.0), (0.5, 0.02)] {
        let params = ModelParams { delta, f };
        for n in [1usize, 50] {
            for p in Parity::BOTH {
                for solver in [Solver::Uaa, Solver::Rwa, Solver::Exact] {
                    match dressed_state(&params, n, p, solver) {
                        Ok(s) => worst = worst.max((s.norm() - 1.0).abs()),
                        Err(e) => return Check::failed(name, e),
                    }
                    count += 1;
                }
            }
        }
    }
    Check::new(name, worst <= 1e-12, format!("{count} states, max |norm - 1| = {worst:.3e}"))
}

fn check_decoupling(v: &VModelParams) -> Check {
    let name = "decoupling";
    let v = VModelParams { f: 0.0, ..*v };
    let mut widths = Vec::new();
    for p in Parity::BOTH {
        match state_linewidth(&v, p, Solver::Uaa, OverlapMode::Delta) {
            Ok(r) => widths.push(r.gamma),
            Err(e) => return Check::failed(name, e),
        }
    }
    let err = |g: f64| (g - v.gamma_up).abs().min((g - v.gamma_down).abs());
    let worst = widths.iter().copied().map(err).fold(0.0_f64, f64::max);
    Check::new(
        name,
        worst <= 1e-12,
        format!("f = 0 widths {widths:?} vs ({}, {}), max error {worst:.3e}", v.gamma_up, v.gamma_down),
    )
}

const OMEGA_R_FIT: [f64; 4] = [0.05, 0.1, 0.2, 0.4];

fn check_overlap_scaling(n: usize) -> Check {
    let deviation: Vec<f64> =
        OMEGA_R_FIT.iter().map(|&om| 1.0 - displaced_overlap(n, om / (2.0 * (n as f64).sqrt()), n)).collect();
    let slope = log_log_slope(&OMEGA_R_FIT, &deviation);
    Check::new(
        "overlap-scaling",
        (slope - 2.0).abs() <= 0.3,
        format!("1 - <n,f|n> vs Omega_R at n = {n}: slope {slope:.4}"),
    )
}

fn check_linewidth_overlap_scaling(v: &VModelParams) -> Check {
    let name = "linewidth-overlap-scaling";
    let mut discrepancy = Vec::new();
    for &om in &OMEGA_R_FIT {
        let row = v.with_omega_r(om).and_then(|row| {
            let d = state_linewidth(&row, Parity::Minus, Solver::Uaa, OverlapMode::Delta)?;
            let x = state_linewidth(&row, Parity::Minus, Solver::Uaa, OverlapMode::Exact)?;
            Ok((x.gamma - d.gamma).abs() / d.gamma)
        });
        match row {
            Ok(r) => discrepancy.push(r),
            Err(e) => return Check::failed(name, e),
        }
    }
    Check::info(
        name,
        format!(
            "|Gamma_exact - Gamma_delta| / Gamma vs Omega_R: slope {:.4} (first-order overlap terms)",
            log_log_slope(&OMEGA_R_FIT, &discrepancy)
        ),
    )
}

fn check_triangulation() -> Check {
    let name = "triangulation";
    let ladder = [0.8, 0.4, 0.2, 0.1, 0.05];
    let n = 225;
    let mut uaa_err = Vec::new();
    let mut rwa_err = Vec::new();
    for &om in &ladder {
        let params = ModelParams { delta: 1.0, f: om / (2.0 * (n as f64).sqrt()) };
        let mut u = 0.0_f64;
        let mut r = 0.0_f64;
        for p in Parity::BOTH {
            let exact = match exact_state(&params, n, p, None) {
                Ok(s) => s.energy,
                Err(e) => return Check::failed(name, e),
            };
            let uaa = uaa_quasi_energy(&params, n, p);
            let rwa = rwa_state_for_label(&params, n, p).map(|s| s.energy);
            match (uaa, rwa) {
                (Ok(a), Ok(b)) => {
                    u = u.max((a - exact).abs());
                    r = r.max((b - exact).abs());
                }
                (Err(e), _) | (_, Err(e)) => return Check::failed(name, e),
            }
        }
        uaa_err.push(u);
        rwa_err.push(r);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let ok = decreasing(&uaa_err) && decreasing(&rwa_err) && rwa_err[4] < 1e-2 * rwa_err[0];
    Check::new(
        name,
        ok,
        format!(
            "Omega_R {ladder:?}: |E_uaa - E_exact| [{}], |E_rwa - E_exact| [{}]",
            sci(&uaa_err),
            sci(&rwa_err)
        ),
    )
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn check_small_drive(v: &VModelParams) -> Check {
    let name = "rwa-uaa-small-drive";
    let mut worst = 0.0_f64;
    for p in Parity::BOTH {
        let rel = v.with_omega_r(0.01).and_then(|row| {
            let u = state_linewidth(&row, p, Solver::Uaa, OverlapMode::Delta)?.gamma;
            let r = state_linewidth(&row, p, Solver::Rwa, OverlapMode::Delta)?.gamma;
            Ok((u - r).abs() / u)
        });
        match rel {
            Ok(x) => worst = worst.max(x),
            Err(e) => return Check::failed(name, e),
        }
    }
    Check::new(name, worst < 0.01, format!("Omega_R = 0.01: max |G_uaa - G_rwa| / G_uaa = {worst:.3e}"))
}

fn check_spectrum_positivity(v: &VModelParams) -> Check {
    let name = "spectrum-positivity";
    let mut lowest = f64::INFINITY;
    for om in [0.1, 1.0] {
        for solver in [Solver::Uaa, Solver::Rwa] {
            match v.with_omega_r(om).and_then(|row| spectrum(&row, None, solver)) {
                Ok(s) => lowest = s.intensity.iter().copied().fold(lowest, f64::min),
                Err(e) => return Check::failed(name, e),
            }
        }
    }
    Check::new(name, lowest >= 0.0, format!("min intensity {lowest:.3e}"))
}

fn check_sodium_bare_limit(sp: &SodiumParams) -> Check {
    let name = "sodium-bare-limit";
    let sp = SodiumParams { b_x: 0.0, ..*sp };
    let mut worst = 0.0_f64;
    for solver in [Solver::Uaa, Solver::Rwa] {
        for p in Parity::BOTH {
            match sodium_linewidth(&sp, sp.n0, p, solver) {
                Ok(w) => worst = worst.max((w.normalized - 1.0).abs()),
                Err(e) => return Check::failed(name, e),
            }
        }
    }
    Check::new(name, worst <= 1e-10, format!("max |Gamma/Gamma0 - 1| = {worst:.3e}"))
}

fn check_uaa_pair_support() -> Check {
    let name = "uaa-support";
    let params = ModelParams { delta: 1.0, f: 1.0 / 30.0 };
    for p in Parity::BOTH {
        match uaa_coefficients(&params, 225, p) {
            Ok(s) if s.coeffs.support().len() == 2 => {}
            Ok(s) => return Check::new(name, false, format!("support {:?}", s.coeffs.support())),
            Err(e) => return Check::failed(name, e),
        }
    }
    Check::new(name, true, "UAA states supported on {n, n+q}".into())
}

/// Every check, with the S-matrix routine injectable for mutation tests.
pub fn run_checks(v: &VModelParams, sp: &SodiumParams, s: &dyn Fn(usize, usize, f64) -> f64) -> Vec<Check> {
    vec![
        check_s_symmetry(s),
        check_parity(),
        check_normalization(),
        check_uaa_pair_support(),
        check_decoupling(v),
        check_overlap_scaling(v.n0),
        check_linewidth_overlap_scaling(v),
        check_triangulation(),
        check_small_drive(v),
        check_spectrum_positivity(v),
        check_sodium_bare_limit(sp),
    ]
}

pub fn default_checks(v: &VModelParams, sp: &SodiumParams) -> Vec<Check> {
    run_checks(v, sp, &s_element)
}
