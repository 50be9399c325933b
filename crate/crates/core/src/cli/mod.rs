//! Front end of the `dressed` binary.
//!
//! Every command resolves its parameters in the order built-in default,
//! `--preset`, `--config` file, explicit flag, and writes them all as
//! `# key = value` lines ahead of the data. Exit codes: 0 success, 1 usage
//! error, 2 numerical failure, 3 failed validation.

mod output;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer};
use serde_json::{json, Value};

use crate::dressed::{
    default_n_max, dressed_state, exact_states, rwa_state_for_label, uaa_quasi_energy, ModelParams, Parity,
    Solver,
};
use crate::emission::{
    default_grid, extract_fwhm, linewidth_sweep, spectrum, spectrum_peaks, state_linewidth, DensityMatrix,
    OverlapMode, Spectrum, SweepRow, VModelParams,
};
use crate::error::Error;
use crate::sodium::{derive_params, sodium_sweep, SodiumParams, SodiumRow};

pub use output::{format_float, json_float, rounded, Cell, Header, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dressed", version, about = "Dressed-state quasi-energies, emission linewidths and spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasi-energies from the UAA, RWA and exact solvers.
    QuasiEnergy(Options),
    /// Expansion coefficients of dressed states.
    Coefficients(Options),
    /// Linewidths of both parities at one drive strength.
    Linewidth(Options),
    /// UAA and RWA linewidths over a Rabi-frequency grid.
    LinewidthSweep(Options),
    /// UAA and RWA fluorescence spectra with a peaks sidecar.
    Spectrum(Options),
    /// Normalized sodium linewidths over a Rabi-frequency grid.
    Sodium(Options),
    /// Run the built-in invariant checks.
    Validate(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig6,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
            Preset::Fig3d => "fig3d",
            Preset::Fig6 => "fig6",
        }
    }

    fn options(self) -> Options {
        let fig2 = |delta: f64| Options {
            delta: Some(delta),
            n0: Some(225),
            e0: Some(50.0),
            gamma_up: Some(0.10),
            gamma_down: Some(0.05),
            omega_r_grid: Some("0.1:1.0:91".into()),
            ..Options::default()
        };
        let fig3 = |omega_r: f64| Options { omega_r: Some(omega_r), omega_r_grid: None, ..fig2(1.0) };
        match self {
            Preset::Fig2a => fig2(1.0),
            Preset::Fig2b => fig2(0.5),
            Preset::Fig3a => fig3(0.1),
            Preset::Fig3b => fig3(0.5),
            Preset::Fig3c => fig3(0.8),
            Preset::Fig3d => fig3(1.0),
            Preset::Fig6 => Options {
                delta: Some(1.0),
                n0: Some(200),
                b0: Some(100.0),
                omega_r_grid: Some("0.0:1.0:51".into()),
                ..Options::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn parse_solver(s: &str) -> Result<Solver, String> {
    match s {
        "uaa" => Ok(Solver::Uaa),
        "rwa" => Ok(Solver::Rwa),
        "exact" => Ok(Solver::Exact),
        _ => Err(format!("unknown solver '{s}' (expected uaa, rwa or exact)")),
    }
}

fn parse_overlap(s: &str) -> Result<OverlapMode, String> {
    match s {
        "delta" => Ok(OverlapMode::Delta),
        "exact" => Ok(OverlapMode::Exact),
        _ => Err(format!("unknown overlap mode '{s}' (expected delta or exact)")),
    }
}

/// A grid given either as a JSON array or as grid text.
fn grid_text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Grid {
        Text(String),
        List(Vec<f64>),
    }
    Ok(Option::<Grid>::deserialize(d)?.map(|g| match g {
        Grid::Text(s) => s,
        Grid::List(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
    }))
}

/// Options shared by all commands. A `--config` JSON file may set any of
/// them under the same snake_case names.
#[derive(Debug, Clone, Default, PartialEq, clap::Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// JSON file with default values for these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Named parameter block.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Level splitting in units of the drive frequency (the P-level splitting for `sodium`).
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Coupling constant f.
    #[arg(long)]
    pub coupling: Option<f64>,
    /// Drive photon number.
    #[arg(long)]
    pub n0: Option<usize>,
    /// Field labels for quasi-energy and coefficients: `N` or `LO:HI`.
    #[arg(long)]
    pub n: Option<String>,
    /// Rabi frequency 2f√n0; sets f from n0.
    #[arg(long)]
    pub omega_r: Option<f64>,
    /// Rabi-frequency grid: `a,b,c` or `LO:HI:COUNT`.
    #[arg(long)]
    #[serde(default, deserialize_with = "grid_text")]
    pub omega_r_grid: Option<String>,
    /// Emitted-frequency grid for `spectrum`: `a,b,c` or `LO:HI:COUNT`.
    #[arg(long)]
    #[serde(default, deserialize_with = "grid_text")]
    pub omega_grid: Option<String>,
    /// uaa, rwa or exact.
    #[arg(long, value_parser = parse_solver)]
    pub solver: Option<Solver>,
    /// delta or exact.
    #[arg(long, value_parser = parse_overlap)]
    pub overlap: Option<OverlapMode>,
    /// Ground-state depth E0.
    #[arg(long)]
    pub e0: Option<f64>,
    /// Bare width of the upper excited level.
    #[arg(long)]
    pub gamma_up: Option<f64>,
    /// Bare width of the lower excited level.
    #[arg(long)]
    pub gamma_down: Option<f64>,
    /// Sodium reference field B0 in Gauss.
    #[arg(long)]
    pub b0: Option<f64>,
    /// Sodium transition wavelength in nm.
    #[arg(long)]
    pub wavelength: Option<f64>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Options {
    /// Fields set here win over `base`.
    fn over(self, base: Options) -> Options {
        Options {
            config: self.config.or(base.config),
            preset: self.preset.or(base.preset),
            delta: self.delta.or(base.delta),
            coupling: self.coupling.or(base.coupling),
            n0: self.n0.or(base.n0),
            n: self.n.or(base.n),
            omega_r: self.omega_r.or(base.omega_r),
            omega_r_grid: self.omega_r_grid.or(base.omega_r_grid),
            omega_grid: self.omega_grid.or(base.omega_grid),
            solver: self.solver.or(base.solver),
            overlap: self.overlap.or(base.overlap),
            e0: self.e0.or(base.e0),
            gamma_up: self.gamma_up.or(base.gamma_up),
            gamma_down: self.gamma_down.or(base.gamma_down),
            b0: self.b0.or(base.b0),
            wavelength: self.wavelength.or(base.wavelength),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::InvalidGrid(_) | Error::InvalidLabel { .. } => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `a,b,c` or `LO:HI:COUNT` (endpoints exact) into a strictly
/// increasing grid of at least `min_points` values.
pub fn parse_grid(text: &str, min_points: usize) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::usage(format!("invalid grid '{text}': {why}"));
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [lo, hi, count] = parts[..] else {
            return Err(bad("expected LO:HI:COUNT"));
        };
        let lo: f64 = lo.parse().map_err(|_| bad("LO is not a number"))?;
        let hi: f64 = hi.parse().map_err(|_| bad("HI is not a number"))?;
        let count: usize = count.parse().map_err(|_| bad("COUNT is not a positive integer"))?;
        if count < 2 {
            return Err(bad("COUNT must be at least 2"));
        }
        let last = (count - 1) as f64;
        (0..count).map(|i| (lo * (last - i as f64) + hi * i as f64) / last).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("entries must be numbers")))
            .collect::<CliResult<_>>()?
    };
    crate::emission::check_grid(&grid, min_points).map_err(|e| bad(&e.to_string()))?;
    Ok(grid)
}

fn parse_labels(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::usage(format!("invalid labels '{text}': expected N or LO:HI"));
    match text.split_once(':') {
        Some((a, b)) => {
            let (lo, hi) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        }
        None => {
            let n = text.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

/// Options after presets, config file and flags have been combined.
#[derive(Debug, Clone)]
struct Resolved {
    opts: Options,
    header: Header,
}

impl Resolved {
    fn new(command: &str, flags: Options) -> CliResult<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<Options>(&text)
                    .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => Options::default(),
        };
        let mut opts = flags.over(file);
        if let Some(preset) = opts.preset {
            opts = opts.over(preset.options());
        }
        let mut header = Header::default();
        header.push("command", command);
        header.push("version", env!("CARGO_PKG_VERSION"));
        if let Some(p) = opts.preset {
            header.push("preset", p.name());
        }
        Ok(Self { opts, header })
    }

    fn record(&mut self, key: &str, value: impl ToString) {
        self.header.push(key, value);
    }

    fn delta(&mut self) -> f64 {
        let d = self.opts.delta.unwrap_or(1.0);
        self.record("delta", d);
        d
    }

    fn n0(&mut self, default: usize) -> usize {
        let n = self.opts.n0.unwrap_or(default);
        self.record("n0", n);
        n
    }

    fn solver(&mut self) -> Solver {
        let s = self.opts.solver.unwrap_or(Solver::Uaa);
        self.record("solver", s);
        s
    }

    fn overlap(&mut self) -> OverlapMode {
        let m = self.opts.overlap.unwrap_or(OverlapMode::Delta);
        self.record("overlap", m);
        m
    }

    /// Coupling from `--coupling`, or from `--omega-r` and `n0`.
    fn coupling(&mut self, n0: Option<usize>) -> CliResult<f64> {
        match (self.opts.coupling, self.opts.omega_r) {
            (Some(_), Some(_)) => Err(CliError::usage("give either --coupling or --omega-r, not both")),
            (None, Some(om)) => {
                let Some(n0) = n0 else {
                    return Err(CliError::usage("--omega-r needs --n0 for this command"));
                };
                if n0 == 0 {
                    return Err(CliError::usage("--omega-r needs n0 > 0"));
                }
                let f = om / (2.0 * (n0 as f64).sqrt());
                self.record("omega_r", om);
                self.record("coupling", f);
                Ok(f)
            }
            (c, None) => {
                let f = c.unwrap_or(0.0);
                self.record("coupling", f);
                Ok(f)
            }
        }
    }

    fn labels(&mut self, default: usize) -> CliResult<(usize, usize)> {
        let (lo, hi) = match &self.opts.n {
            Some(text) => parse_labels(text)?,
            None => (default, default),
        };
        self.record("n_range", format!("{lo}:{hi}"));
        Ok((lo, hi))
    }

    /// `--omega-r-grid`, or the single value of `--omega-r`.
    fn omega_r_grid(&mut self) -> CliResult<Vec<f64>> {
        let (grid, repr) = match (&self.opts.omega_r_grid, self.opts.omega_r) {
            (Some(text), _) => (parse_grid(text, 2)?, text.replace(' ', "")),
            (None, Some(om)) => (vec![om], om.to_string()),
            (None, None) => return Err(CliError::usage("missing --omega-r-grid (or --omega-r)")),
        };
        self.record("omega_r_grid", repr);
        Ok(grid)
    }

    fn emitter(&mut self) -> CliResult<VModelParams> {
        let delta = self.delta();
        let n0 = self.n0(225);
        let e0 = self.opts.e0.unwrap_or(50.0);
        let gamma_up = self.opts.gamma_up.unwrap_or(0.10);
        let gamma_down = self.opts.gamma_down.unwrap_or(0.05);
        self.record("e0", e0);
        self.record("gamma_up", gamma_up);
        self.record("gamma_down", gamma_down);
        self.record("geometry", "antiparallel");
        Ok(VModelParams::new(e0, gamma_up, gamma_down, delta, 0.0, n0)?)
    }

    fn sodium(&mut self) -> CliResult<SodiumParams> {
        let delta_p = self.delta();
        let n0 = self.n0(200);
        let defaults = SodiumParams::default();
        let b_0 = self.opts.b0.unwrap_or(defaults.b_0);
        let lambda_nm = self.opts.wavelength.unwrap_or(defaults.lambda_nm);
        self.record("b0_gauss", b_0);
        self.record("wavelength_nm", lambda_nm);
        self.record("g_p", defaults.g_p);
        self.record("g_s", defaults.g_s);
        let sp = SodiumParams { b_z: delta_p * b_0, b_0, n0, lambda_nm, ..defaults };
        let d = derive_params(&sp)?;
        self.record("delta_s", d.delta_s);
        self.record("e0", d.e0);
        Ok(sp)
    }
}

/// What a command produced.
struct Report {
    body: String,
    sidecar: Option<(PathBuf, String)>,
    diagnostics: Vec<String>,
    code: i32,
}

impl Report {
    fn table(table: &Table, format: Format) -> Self {
        let body = match format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        Self { body, sidecar: None, diagnostics: Vec::new(), code: EXIT_OK }
    }
}

fn format_of(r: &mut Resolved) -> Format {
    let f = r.opts.format.unwrap_or(Format::Csv);
    r.record("format", if f == Format::Csv { "csv" } else { "json" });
    f
}

fn cmd_quasi_energy(mut r: Resolved) -> CliResult<Report> {
    let delta = r.delta();
    let n0 = r.opts.omega_r.map(|_| r.n0(225));
    let f = r.coupling(n0)?;
    let (lo, hi) = r.labels(n0.unwrap_or(225))?;
    let params = ModelParams::new(delta, f)?;
    let labels: Vec<(usize, Parity)> = (lo..=hi)
        .flat_map(|n| Parity::BOTH.map(|p| (n, p)))
        .filter(|&(n, p)| !(n == 0 && p.partner_offset(0) < 0))
        .collect();
    let n_max = default_n_max(&params, hi);
    r.record("exact_n_max", n_max);
    let format = format_of(&mut r);

    let exact = exact_states(&params, &labels, Some(n_max))?;
    let mut table =
        Table::new(r.header.clone(), &["n", "parity", "e_uaa", "e_rwa", "e_exact", "gap_uaa", "gap_rwa"]);
    for (&(n, p), ex) in labels.iter().zip(&exact) {
        let uaa = uaa_quasi_energy(&params, n, p)?;
        let rwa = rwa_state_for_label(&params, n, p).map(|s| s.energy).unwrap_or(f64::NAN);
        table.push(vec![
            n.into(),
            p.sign().into(),
            uaa.into(),
            rwa.into(),
            ex.energy.into(),
            (uaa - ex.energy).abs().into(),
            (rwa - ex.energy).abs().into(),
        ]);
    }
    Ok(Report::table(&table, format))
}

fn cmd_coefficients(mut r: Resolved) -> CliResult<Report> {
    let delta = r.delta();
    let n0 = r.opts.omega_r.map(|_| r.n0(225));
    let f = r.coupling(n0)?;
    let (lo, hi) = r.labels(n0.unwrap_or(225))?;
    let solver = r.solver();
    let format = format_of(&mut r);
    let params = ModelParams::new(delta, f)?;
    let mut table =
        Table::new(r.header.clone(), &["n", "parity", "energy", "basis", "l", "c_plus", "c_minus"]);
    for n in lo..=hi {
        for p in Parity::BOTH {
            if n == 0 && p.partner_offset(0) < 0 {
                continue;
            }
            let state = dressed_state(&params, n, p, solver)?;
            let basis = match state.basis {
                crate::dressed::Basis::Bare => "bare",
                crate::dressed::Basis::Displaced { .. } => "displaced",
            };
            let coeffs =
                if solver == Solver::Exact { state.coeffs.trimmed(1e-12) } else { state.coeffs.clone() };
            for (l, cp, cm) in coeffs.iter() {
                table.push(vec![
                    n.into(),
                    p.sign().into(),
                    state.energy.into(),
                    basis.into(),
                    l.into(),
                    cp.into(),
                    cm.into(),
                ]);
            }
        }
    }
    Ok(Report::table(&table, format))
}

fn cmd_linewidth(mut r: Resolved) -> CliResult<Report> {
    let v = r.emitter()?;
    let f = r.coupling(Some(v.n0))?;
    let v = VModelParams { f, ..v };
    v.validate()?;
    let solver = r.solver();
    let mode = r.overlap();
    let format = format_of(&mut r);
    let mut table = Table::new(r.header.clone(), &["parity", "energy", "gamma", "d_up", "d_down", "d_cross"]);
    for p in Parity::BOTH {
        let w = state_linewidth(&v, p, solver, mode)?;
        table.push(vec![
            p.sign().into(),
            w.energy.into(),
            w.gamma.into(),
            w.d_up.into(),
            w.d_down.into(),
            w.d_cross.into(),
        ]);
    }
    let mut report = Report::table(&table, format);
    report.diagnostics = v.warnings().into_iter().map(|w| format!("warning: {w}")).collect();
    Ok(report)
}

fn sweep_cells(rows: &[SweepRow], report: &mut Vec<String>, tag: &str) -> Vec<[f64; 2]> {
    rows.iter()
        .map(|row| {
            let mut out = [f64::NAN; 2];
            for (i, res) in [&row.plus, &row.minus].into_iter().enumerate() {
                match res {
                    Ok(w) => out[i] = w.gamma,
                    Err(e) => {
                        report.push(format!("omega_r = {}: {tag} p = {}: {e}", row.omega_r, Parity::BOTH[i]))
                    }
                }
            }
            out
        })
        .collect()
}

fn cmd_linewidth_sweep(mut r: Resolved) -> CliResult<Report> {
    let v = r.emitter()?;
    let grid = r.omega_r_grid()?;
    let mode = r.overlap();
    let with_exact = r.opts.solver == Some(Solver::Exact);
    r.record("exact_columns", with_exact);
    let format = format_of(&mut r);

    let mut diagnostics = Vec::new();
    let mut solvers = vec![("uaa", Solver::Uaa), ("rwa", Solver::Rwa)];
    if with_exact {
        solvers.push(("exact", Solver::Exact));
    }
    let mut columns = vec!["omega_r".to_string()];
    let mut series = Vec::new();
    for (tag, solver) in solvers {
        let rows = linewidth_sweep(&v, &grid, solver, mode)?;
        series.push(sweep_cells(&rows, &mut diagnostics, tag));
        columns.push(format!("gamma_plus_{tag}"));
        columns.push(format!("gamma_minus_{tag}"));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(r.header.clone(), &cols);
    for (i, &om) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![om.into()];
        for s in &series {
            row.push(s[i][0].into());
            row.push(s[i][1].into());
        }
        table.push(row);
    }
    let mut report = Report::table(&table, format);
    if !diagnostics.is_empty() {
        report.code = EXIT_NUMERICAL;
    }
    report.diagnostics = diagnostics;
    Ok(report)
}

fn peaks_json(s: &Spectrum) -> Value {
    let peaks: Vec<Value> = s
        .peaks
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (center, fwhm) = extract_fwhm(&s.omega_grid, &s.component(k)).unwrap_or((f64::NAN, f64::NAN));
            json!({
                "n": p.n,
                "parity": p.parity.sign(),
                "m": p.m,
                "center": json_float(p.center),
                "weight": json_float(p.weight),
                "width": json_float(p.width),
                "area": json_float(p.area()),
                "center_extracted": json_float(center),
                "fwhm_extracted": json_float(fwhm),
            })
        })
        .collect();
    let mut widths = serde_json::Map::new();
    for p in &s.peaks {
        widths.insert(p.parity.to_string(), json_float(p.width));
    }
    json!({ "gamma": widths, "peaks": peaks })
}

fn cmd_spectrum(mut r: Resolved) -> CliResult<Report> {
    let v = r.emitter()?;
    let f = r.coupling(Some(v.n0))?;
    let v = VModelParams { f, ..v };
    v.validate()?;
    let with_exact = r.opts.solver == Some(Solver::Exact);
    r.record("exact_columns", with_exact);
    r.record("population", "stationary n0, parities 1/2 each");
    let mut solvers = vec![("uaa", Solver::Uaa), ("rwa", Solver::Rwa)];
    if with_exact {
        solvers.push(("exact", Solver::Exact));
    }

    let grid = match &r.opts.omega_grid {
        Some(text) => parse_grid(text, 2)?,
        None => {
            let rho = DensityMatrix::stationary(v.n0);
            let mut all = Vec::new();
            for &(_, solver) in &solvers {
                all.extend(spectrum_peaks(&v, &rho, solver)?);
            }
            default_grid(&all)?
        }
    };
    r.record("omega_grid", format!("{}:{}:{}", grid[0], grid[grid.len() - 1], grid.len()));
    let format = format_of(&mut r);

    let spectra: Vec<(&str, Spectrum)> = solvers
        .iter()
        .map(|&(tag, solver)| Ok((tag, spectrum(&v, Some(&grid), solver)?)))
        .collect::<CliResult<_>>()?;

    let mut columns = vec!["omega".to_string()];
    columns.extend(spectra.iter().map(|(tag, _)| format!("intensity_{tag}")));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(r.header.clone(), &cols);
    for (i, &w) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![w.into()];
        row.extend(spectra.iter().map(|(_, s)| Cell::from(s.intensity[i])));
        table.push(row);
    }

    let mut sidecar = serde_json::Map::new();
    sidecar.insert("parameters".into(), r.header.to_json());
    for (tag, s) in &spectra {
        sidecar.insert(tag.to_string(), peaks_json(s));
    }
    let sidecar = Value::Object(sidecar);

    let mut report = Report::table(&table, format);
    match format {
        Format::Json => {
            let mut v = table.to_json_value();
            v["peaks"] = sidecar;
            report.body = output::pretty(&v);
        }
        Format::Csv => match &r.opts.out {
            Some(out) => report.sidecar = Some((sidecar_path(out), output::pretty(&sidecar))),
            None => report.diagnostics.push("note: the peaks sidecar is written only with --out".into()),
        },
    }
    report.diagnostics.extend(v.warnings().into_iter().map(|w| format!("warning: {w}")));
    Ok(report)
}

/// `spectrum.csv` → `spectrum.peaks.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("peaks.json")
}

fn sodium_cells(rows: &[SodiumRow], report: &mut Vec<String>, tag: &str) -> Vec<[f64; 3]> {
    rows.iter()
        .map(|row| {
            let mut out = [f64::NAN; 3];
            for (i, res) in [&row.plus, &row.minus].into_iter().enumerate() {
                match res {
                    Ok(w) => out[i + 1] = w.normalized,
                    Err(e) => {
                        report.push(format!("omega_r = {}: {tag} p = {}: {e}", row.omega_r, Parity::BOTH[i]))
                    }
                }
            }
            out[0] = row.averaged().unwrap_or(f64::NAN);
            out
        })
        .collect()
}

fn cmd_sodium(mut r: Resolved) -> CliResult<Report> {
    let sp = r.sodium()?;
    let grid = r.omega_r_grid()?;
    let with_exact = r.opts.solver == Some(Solver::Exact);
    r.record("exact_columns", with_exact);
    let format = format_of(&mut r);

    let mut solvers = vec![("uaa", Solver::Uaa), ("rwa", Solver::Rwa)];
    if with_exact {
        solvers.push(("exact", Solver::Exact));
    }
    let mut diagnostics = Vec::new();
    let mut series = Vec::new();
    for &(tag, solver) in &solvers {
        let rows = sodium_sweep(&sp, &grid, solver)?;
        series.push(sodium_cells(&rows, &mut diagnostics, tag));
    }
    let mut columns = vec!["omega_r".to_string()];
    columns.extend(solvers.iter().map(|(tag, _)| format!("norm_gamma_{tag}")));
    for (tag, _) in &solvers {
        columns.push(format!("norm_gamma_plus_{tag}"));
        columns.push(format!("norm_gamma_minus_{tag}"));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(r.header.clone(), &cols);
    for (i, &om) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![om.into()];
        row.extend(series.iter().map(|s| Cell::from(s[i][0])));
        for s in &series {
            row.push(s[i][1].into());
            row.push(s[i][2].into());
        }
        table.push(row);
    }
    let mut report = Report::table(&table, format);
    if !diagnostics.is_empty() {
        report.code = EXIT_NUMERICAL;
    }
    report.diagnostics = diagnostics;
    Ok(report)
}

fn cmd_validate(mut r: Resolved) -> CliResult<Report> {
    let v = r.emitter()?;
    let sp = SodiumParams::default();
    let checks = validate::default_checks(&v, &sp);
    let mut body = String::new();
    for (k, val) in &r.header.0 {
        body.push_str(&format!("# {k} = {val}\n"));
    }
    for c in &checks {
        body.push_str(&c.line());
        body.push('\n');
    }
    let failed = checks.iter().filter(|c| c.gating && !c.passed).count();
    body.push_str(&format!("{} checks, {failed} failed\n", checks.iter().filter(|c| c.gating).count()));
    Ok(Report {
        body,
        sidecar: None,
        diagnostics: Vec::new(),
        code: if failed == 0 { EXIT_OK } else { EXIT_VALIDATION },
    })
}

fn execute(cli: Cli) -> CliResult<(Report, Option<PathBuf>)> {
    type Runner = fn(Resolved) -> CliResult<Report>;
    let (name, opts, run): (&str, Options, Runner) = match cli.command {
        Command::QuasiEnergy(o) => ("quasi-energy", o, cmd_quasi_energy),
        Command::Coefficients(o) => ("coefficients", o, cmd_coefficients),
        Command::Linewidth(o) => ("linewidth", o, cmd_linewidth),
        Command::LinewidthSweep(o) => ("linewidth-sweep", o, cmd_linewidth_sweep),
        Command::Spectrum(o) => ("spectrum", o, cmd_spectrum),
        Command::Sodium(o) => ("sodium", o, cmd_sodium),
        Command::Validate(o) => ("validate", o, cmd_validate),
    };
    let resolved = Resolved::new(name, opts)?;
    let out = resolved.opts.out.clone();
    Ok((run(resolved)?, out))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError {
        code: EXIT_NUMERICAL,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(cli).and_then(|(report, out)| {
        match &out {
            Some(path) => write_file(path, &report.body)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(report.body.as_bytes());
            }
        }
        if let Some((path, text)) = &report.sidecar {
            write_file(path, text)?;
        }
        Ok(report)
    });
    match result {
        Ok(report) => {
            for d in &report.diagnostics {
                eprintln!("{d}");
            }
            report.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
