//! Special functions for the displaced-oscillator algebra.
//!
//! Everything here works with matrix elements of the real displacement
//! operator `D(a) = exp(a (a† - a))` in the Fock basis,
//!
//! ```text
//! <k|D(a)|m> = sqrt(m!/k!) a^(k-m) exp(-a²/2) L_m^(k-m)(a²),   k >= m
//! ```
//!
//! and `<k|D(a)|m> = <m|D(-a)|k>` otherwise. Factorial ratios and powers are
//! combined in log space; the Laguerre recurrence is carried with a separate
//! log scale so that indices of several hundred never overflow.

use std::collections::HashMap;
use std::sync::OnceLock;

const LN_FACT_TABLE_LEN: usize = 1024;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE_LEN);
        let mut acc = 0.0_f64;
        t.push(0.0);
        for k in 1..LN_FACT_TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
///
/// Table lookup below 1024, Stirling series above (truncation error below
/// `1e-25` there).
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE_LEN {
        return ln_fact_table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    x * x.ln() - x + 0.5 * (std::f64::consts::TAU * x).ln() + series
}

/// A real number stored as `mantissa * exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * self.ln_scale.exp()
        }
    }
}

const RESCALE_ABOVE: f64 = 1e150;

/// Generalized Laguerre polynomial `L_m^alpha(x)` in scaled form.
///
/// Uses the forward three-term recurrence in the degree,
/// `(j+1) L_{j+1} = (2j+1+alpha-x) L_j - (j+alpha) L_{j-1}`. Whenever the
/// running value exceeds `1e150` both carried terms are divided down and
/// the factor is folded into `ln_scale`, so the result is representable
/// for any degree and order.
pub fn laguerre_scaled(m: usize, alpha: usize, x: f64) -> Scaled {
    let a = alpha as f64;
    let mut ln_scale = 0.0;
    let mut prev = 1.0_f64;
    if m == 0 {
        return Scaled { mantissa: 1.0, ln_scale };
    }
    let mut cur = 1.0 + a - x;
    for j in 1..m {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > RESCALE_ABOVE {
            prev /= mag;
            cur /= mag;
            ln_scale += mag.ln();
        }
    }
    Scaled { mantissa: cur, ln_scale }
}

/// Generalized Laguerre polynomial `L_m^alpha(x)`.
pub fn laguerre(m: usize, alpha: usize, x: f64) -> f64 {
    laguerre_scaled(m, alpha, x).value()
}

/// Fock-basis matrix element `<row|D(amp)|col>` of the real displacement
/// operator `D(amp) = exp(amp (a† - a))`.
pub fn fock_displacement(row: usize, col: usize, amp: f64) -> f64 {
    if amp == 0.0 {
        return if row == col { 1.0 } else { 0.0 };
    }
    // <row|D(a)|col> = <col|D(-a)|row>
    let (hi, lo, a) = if row >= col { (row, col, amp) } else { (col, row, -amp) };
    let order = hi - lo;
    let x = amp * amp;
    let lag = laguerre_scaled(lo, order, x);
    if lag.mantissa == 0.0 {
        return 0.0;
    }
    let ln_mag = -0.5 * x
        + 0.5 * (log_factorial(lo as u64) - log_factorial(hi as u64))
        + order as f64 * a.abs().ln()
        + lag.ln_scale;
    let sign = if a < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
    sign * lag.mantissa * ln_mag.exp()
}

/// Symmetric Laguerre matrix `S_km` entering the quasi-energies and
/// expansion coefficients.
///
/// For `k >= m`,
/// `S_km = (-1)^m exp(-2f²) sqrt(m!/k!) (2f)^(k-m) L_m^(k-m)(4f²)`,
/// which is `(-1)^m <k|D(2f)|m>`. The other orientation is read off the
/// canonical one, so `s_element(k, m, f) == s_element(m, k, f)` bit for bit.
pub fn s_element(k: usize, m: usize, f: f64) -> f64 {
    let (hi, lo) = if k >= m { (k, m) } else { (m, k) };
    let sign = if lo % 2 == 0 { 1.0 } else { -1.0 };
    sign * fock_displacement(hi, lo, 2.0 * f)
}

/// Overlap `<l, f|m>` between the displaced basis state `|l, f> = D(-f)|l>`
/// and the bare Fock state `|m>`.
///
/// `|0, f>` is the ground state of `a†a + f (a + a†)`; its Fock amplitudes are
/// `exp(-f²/2) (-f)^m / sqrt(m!)`.
pub fn displaced_overlap(l: usize, f: f64, m: usize) -> f64 {
    // <l|D(-f)†|m> = <l|D(f)|m>
    fock_displacement(l, m, f)
}

/// Memoized S-matrix entries for one coupling value.
///
/// Entries are stored once, keyed by the canonical `(k, m)` with `k >= m`.
/// The cache is a plain value; share it across threads only behind a lock.
#[derive(Debug, Clone)]
pub struct SMatrixCache {
    f: f64,
    entries: HashMap<(usize, usize), f64>,
    max_index: usize,
}

impl SMatrixCache {
    pub fn new(f: f64) -> Self {
        Self { f, entries: HashMap::new(), max_index: 0 }
    }

    pub fn coupling(&self) -> f64 {
        self.f
    }

    /// Largest index seen so far.
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&mut self, k: usize, m: usize) -> f64 {
        let key = if k >= m { (k, m) } else { (m, k) };
        self.max_index = self.max_index.max(key.0);
        let f = self.f;
        *self.entries.entry(key).or_insert_with(|| s_element(key.0, key.1, f))
    }

    /// Fill every entry with both indices at most `max_index`.
    pub fn materialize(&mut self, max_index: usize) {
        for k in 0..=max_index {
            for m in 0..=k {
                self.get(k, m);
            }
        }
    }
}
