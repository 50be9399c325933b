//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, SymmetricEigen};

/// `exp(α(a† - a))` on the Fock states `0..dim`.
pub fn displacement(dim: usize, alpha: f64) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(dim, dim);
    for k in 1..dim {
        let s = (k as f64).sqrt();
        g[(k, k - 1)] = alpha * s;
        g[(k - 1, k)] = -alpha * s;
    }
    g.exp()
}

/// Room above the largest index so the truncated exponential is exact to
/// double precision for the couplings used in tests.
pub const PAD: usize = 80;

/// `<l| D(f) |m>`, the overlap of the displaced state `D(-f)|l>` with `|m>`.
pub fn overlap(l: usize, f: f64, m: usize) -> f64 {
    displacement(l.max(m) + PAD, f)[(l, m)]
}

/// `(-1)^m <k| D(2f) |m>`.
pub fn s_matrix(dim: usize, f: f64) -> DMatrix<f64> {
    let mut d = displacement(dim + PAD, 2.0 * f).view((0, 0), (dim, dim)).into_owned();
    for m in (1..dim).step_by(2) {
        d.column_mut(m).neg_mut();
    }
    d
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `L_m^{(a)}(x)` by its explicit power series.
pub fn laguerre_series(m: usize, a: usize, x: f64) -> f64 {
    let mut fact = 1.0;
    let mut sum = 0.0;
    for j in 0..=m {
        if j > 0 {
            fact *= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(m + a, m - j) * x.powi(j as i32) / fact;
    }
    sum
}

/// `S_km` from the closed form of the displacement matrix element, with the
/// Laguerre polynomial summed directly. Meant for small indices.
pub fn s_series(k: usize, m: usize, f: f64) -> f64 {
    let (hi, lo) = (k.max(m), k.min(m));
    let alpha = 2.0 * f;
    let ratio: f64 = (lo + 1..=hi).map(|j| 1.0 / j as f64).product::<f64>().sqrt();
    // <hi|D(α)|lo> = sqrt(lo!/hi!) α^(hi-lo) e^{-α²/2} L_lo^(hi-lo)(α²); the
    // transposed element picks up (-1)^(hi-lo)
    let mut d = ratio
        * alpha.powi((hi - lo) as i32)
        * (-alpha * alpha / 2.0).exp()
        * laguerre_series(lo, hi - lo, alpha * alpha);
    if k < m && (hi - lo) % 2 == 1 {
        d = -d;
    }
    if m % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Emitter parameters of the linewidth oracle.
#[derive(Clone, Copy, Debug)]
pub struct Emitter {
    pub e0: f64,
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub delta: f64,
}

/// Quasi-energy and `(l, C+, C-)` rows of the two-level uniform
/// approximation: the 2×2 block of `diag(l - f²) + (pΔ/2) S` on `{n, n+q}`,
/// lower root for `q = +1`, upper for `q = -1`, with `C- = p S C+` kept on
/// the same two levels.
pub fn uaa_oracle(delta: f64, f: f64, n: usize, p: i32) -> (f64, Vec<(usize, f64, f64)>) {
    let q: i64 = if n.is_multiple_of(2) { p as i64 } else { -(p as i64) };
    let partner = (n as i64 + q) as usize;
    let s = s_matrix(n.max(partner) + 1, f);
    let pf = p as f64;
    let idx = [n, partner];
    let h = DMatrix::from_fn(2, 2, |i, j| {
        let diag = if i == j { idx[i] as f64 - f * f } else { 0.0 };
        diag + 0.5 * pf * delta * s[(idx[i], idx[j])]
    });
    let eig = SymmetricEigen::new(h);
    let mut order = [0, 1];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let pick = if q > 0 { order[0] } else { order[1] };
    let energy = eig.eigenvalues[pick];
    let c = eig.eigenvectors.column(pick);
    let minus = |i: usize| pf * (0..2).map(|j| s[(idx[i], idx[j])] * c[j]).sum::<f64>();
    let raw: Vec<(usize, f64, f64)> = (0..2).map(|i| (idx[i], c[i], minus(i))).collect();
    let norm = raw.iter().map(|r| r.1 * r.1 + r.2 * r.2).sum::<f64>().sqrt();
    let mut rows: Vec<_> = raw.into_iter().map(|(l, a, b)| (l, a / norm, b / norm)).collect();
    rows.sort_by_key(|r| r.0);
    (energy, rows)
}

/// Width of a state with rows `(m, C+, C-)`, every field number treated as
/// a ground state of the same field number, antiparallel dipoles.
pub fn linewidth_oracle(em: &Emitter, energy: f64, rows: &[(usize, f64, f64)]) -> f64 {
    let up = 3.0 * em.gamma_up / (4.0 * (em.e0 + em.delta / 2.0));
    let down = 3.0 * em.gamma_down / (4.0 * (em.e0 - em.delta / 2.0));
    let cross = -(up * down).sqrt();
    let mut total = 0.0;
    for &(m, cp, cm) in rows {
        let w = energy + em.e0 - m as f64;
        total += w * (up * (cp + cm).powi(2) + down * (cp - cm).powi(2) + 2.0 * cross * (cp * cp - cm * cm));
    }
    2.0 / 3.0 * total
}

/// Bare spin-boson Hamiltonian `(Δ/2)σ3 + a†a + fσ1(a + a†)` over
/// `|s, l>`, index `2l` for spin up and `2l + 1` for spin down.
pub fn bare_hamiltonian(delta: f64, f: f64, n_max: usize) -> DMatrix<f64> {
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::zeros(dim, dim);
    for l in 0..=n_max {
        h[(2 * l, 2 * l)] = l as f64 + delta / 2.0;
        h[(2 * l + 1, 2 * l + 1)] = l as f64 - delta / 2.0;
        if l < n_max {
            let g = f * ((l + 1) as f64).sqrt();
            for (a, b) in [(2 * l, 2 * l + 3), (2 * l + 1, 2 * l + 2)] {
                h[(a, b)] = g;
                h[(b, a)] = g;
            }
        }
    }
    h
}

/// Spin amplitudes `(up, down)` per field number of a state stored as
/// `(l, C+, C-)` over the σ1 eigenbasis.
pub fn spin_rows(rows: &[(usize, f64, f64)]) -> Vec<(usize, f64, f64)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    rows.iter().map(|&(l, p, m)| (l, r * (p + m), r * (p - m))).collect()
}

fn e_z() -> [Complex<f64>; 3] {
    [Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]
}

fn e_pm(sign: f64) -> [Complex<f64>; 3] {
    [Complex::new(1.0, 0.0), Complex::new(0.0, sign), Complex::new(0.0, 0.0)]
}

/// Transition dipole from excited spin `se` to ground spin `sg` (true for
/// `+1/2`), in units of `d0`.
pub fn sodium_dipole(se: bool, sg: bool) -> [Complex<f64>; 3] {
    let scale = |v: [Complex<f64>; 3], c: f64| v.map(|x| x * c);
    match (se, sg) {
        (true, true) => scale(e_z(), 1.0 / 3.0),
        (false, false) => scale(e_z(), -1.0 / 3.0),
        (true, false) => scale(e_pm(-1.0), 2.0 / 3.0),
        (false, true) => scale(e_pm(1.0), 2.0 / 3.0),
    }
}

/// `Σ_g |<g| d |e>|² / |d0|²` with spin rows `(l, up, down)`, the field
/// numbers of ground and excited states identified.
pub fn sodium_rate_oracle(excited: &[(usize, f64, f64)], grounds: &[Vec<(usize, f64, f64)>]) -> f64 {
    let mut total = 0.0;
    for g in grounds {
        let amp = |se: bool, sg: bool| -> f64 {
            excited
                .iter()
                .map(|&(l, eu, ed)| {
                    let (gu, gd) = g.iter().find(|r| r.0 == l).map(|r| (r.1, r.2)).unwrap_or((0.0, 0.0));
                    (if sg { gu } else { gd }) * (if se { eu } else { ed })
                })
                .sum()
        };
        let mut vec = [Complex::new(0.0, 0.0); 3];
        for se in [true, false] {
            for sg in [true, false] {
                let a = amp(se, sg);
                for (v, d) in vec.iter_mut().zip(sodium_dipole(se, sg)) {
                    *v += d * a;
                }
            }
        }
        total += vec.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    total
}

/// `(l, a, b)` amplitude rows.
pub type Rows = Vec<(usize, f64, f64)>;

/// Eigenvectors of the bare Hamiltonian as spin rows `(l, up, down)`.
pub fn bare_eigenstates(delta: f64, f: f64, n_max: usize) -> Vec<(f64, Rows)> {
    let eig = SymmetricEigen::new(bare_hamiltonian(delta, f, n_max));
    (0..eig.eigenvalues.len())
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            let rows = (0..=n_max).map(|l| (l, v[2 * l], v[2 * l + 1])).collect();
            (eig.eigenvalues[k], rows)
        })
        .collect()
}
