//! Fluorescence spectrum at Ω_R = 1: peak list and an ASCII trace of the
//! UAA and RWA curves.

use dressed_emission::dressed::Solver;
use dressed_emission::emission::{extract_fwhm, spectrum, VModelParams};

fn main() -> dressed_emission::Result<()> {
    let v = VModelParams::new(50.0, 0.10, 0.05, 1.0, 0.0, 225)?.with_omega_r(1.0)?;
    let uaa = spectrum(&v, None, Solver::Uaa)?;
    let rwa = spectrum(&v, Some(&uaa.omega_grid), Solver::Rwa)?;

    for s in [&uaa, &rwa] {
        println!("{} peaks:", s.solver);
        for (k, p) in s.peaks.iter().enumerate() {
            let fwhm = extract_fwhm(&s.omega_grid, &s.component(k)).map(|x| x.1).unwrap_or(f64::NAN);
            println!(
                "  p = {:+} m = {} center {:.5} width {:.5} (sampled {:.5}) area {:.4e}",
                p.parity.sign(),
                p.m,
                p.center,
                p.width,
                fwhm,
                p.area()
            );
        }
    }

    let top = uaa.intensity.iter().chain(&rwa.intensity).fold(0.0_f64, |a, &b| a.max(b));
    for i in (0..uaa.omega_grid.len()).step_by(40) {
        let bar = |x: f64| "#".repeat((60.0 * x / top).round() as usize);
        println!("{:8.3} uaa {}", uaa.omega_grid[i], bar(uaa.intensity[i]));
        println!("{:8} rwa {}", "", bar(rwa.intensity[i]));
    }
    Ok(())
}
