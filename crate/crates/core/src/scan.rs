//! Threshold searches along the noisy families `(1 - x) I/(N+1) + x |φ_i⟩⟨φ_i|`
//! and batch reports over `(family, N, κ)` grids.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{NoisyFamily, SymmetricState};
use crate::witness::WitnessLine;

pub const DEFAULT_GRID_STEP: f64 = 0.005;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaSelection {
    /// `κ = N/2` on even `N`; odd `N` is skipped.
    Highest,
    List(Vec<usize>),
}

impl KappaSelection {
    /// Orders scanned at `n`, dropping those with `2κ > N`.
    pub fn for_n(&self, n: usize) -> Vec<usize> {
        match self {
            KappaSelection::Highest if n % 2 == 0 && n >= 2 => vec![n / 2],
            KappaSelection::Highest => vec![],
            KappaSelection::List(ks) => ks.iter().copied().filter(|&k| k >= 1 && 2 * k <= n).collect(),
        }
    }
}

impl FromStr for KappaSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("highest") {
            Ok(KappaSelection::Highest)
        } else {
            Ok(KappaSelection::List(parse_index_list(s)?))
        }
    }
}

/// Parses `"4..12"`, `"1,2,5"` or a mix such as `"2,4..8"`; ranges are inclusive.
pub fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::domain(format!("cannot parse '{part}' as an integer or a..b range"));
        match part.split_once("..") {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::domain(format!("unknown report format '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanConfig {
    pub families: Vec<NoisyFamily>,
    pub n_values: Vec<usize>,
    pub kappas: KappaSelection,
    pub grid_step: f64,
    pub bisection_tol: f64,
    pub format: ReportFormat,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
    /// Fill `wall_ms`. Off by default so that reports are byte-reproducible.
    pub timing: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            families: NoisyFamily::ALL.to_vec(),
            n_values: vec![],
            kappas: KappaSelection::Highest,
            grid_step: DEFAULT_GRID_STEP,
            bisection_tol: DEFAULT_BISECTION_TOL,
            format: ReportFormat::Csv,
            jobs: None,
            timing: false,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0 && self.grid_step <= 0.1) {
            return Err(Error::domain(format!("grid step {} outside (0, 0.1]", self.grid_step)));
        }
        if !(self.bisection_tol >= 1e-9) {
            return Err(Error::domain(format!(
                "bisection tolerance {} below 1e-9",
                self.bisection_tol
            )));
        }
        if self.jobs == Some(0) {
            return Err(Error::domain("--jobs must be at least 1"));
        }
        Ok(())
    }

    /// Valid `(family, N, κ)` cells in report order.
    pub fn cells(&self) -> Vec<(NoisyFamily, usize, usize)> {
        let mut families = self.families.clone();
        families.sort();
        families.dedup();
        let mut ns = self.n_values.clone();
        ns.sort_unstable();
        ns.dedup();
        let mut out = Vec::new();
        for &fam in &families {
            for &n in ns.iter().filter(|&&n| fam.supports(n)) {
                let mut ks = self.kappas.for_n(n);
                ks.sort_unstable();
                ks.dedup();
                out.extend(ks.into_iter().map(|k| (fam, n, k)));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub family: NoisyFamily,
    #[serde(rename = "N")]
    pub n: usize,
    pub kappa: usize,
    pub x_min: Option<f64>,
    pub min_eig_at_x1: f64,
    pub wall_ms: Option<f64>,
}

/// Grid `0, h, 2h, …` capped by a final point at exactly 1.
fn grid(step: f64) -> Vec<f64> {
    let count = (1.0 / step).ceil() as usize;
    let mut xs: Vec<f64> = (0..count).map(|i| i as f64 * step).collect();
    xs.push(1.0);
    xs
}

pub fn threshold_scan(family: NoisyFamily, n: usize, kappa: usize, cfg: &ScanConfig) -> Result<ScanRecord> {
    cfg.validate()?;
    let start = Instant::now();
    if !family.supports(n) {
        return Err(Error::domain(format!("family {family} is not defined for N = {n}")));
    }
    let line = WitnessLine::new(&SymmetricState::maximally_mixed(n)?, &family.target(n)?, kappa)?;

    let xs = grid(cfg.grid_step);
    let detected: Vec<bool> = xs.iter().map(|&x| line.detects_at(x)).collect();
    let first = detected.iter().position(|&d| d);
    if let Some(i) = first {
        if let Some(j) = (i..xs.len()).find(|&j| !detected[j]) {
            return Err(Error::validation(format!(
                "detection is not monotone for family {family}, N = {n}, κ = {kappa}: \
                 negative at x = {} but not at x = {}",
                xs[i], xs[j]
            )));
        }
    }

    let x_min = first.map(|i| {
        if i == 0 {
            return xs[0];
        }
        let (mut lo, mut hi) = (xs[i - 1], xs[i]);
        while hi - lo > cfg.bisection_tol {
            let mid = 0.5 * (lo + hi);
            if line.detects_at(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    });

    let min_eig_at_x1 = line.spectrum_at(1.0).0;
    let wall_ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(ScanRecord {
        family,
        n,
        kappa,
        x_min,
        min_eig_at_x1,
        wall_ms,
    })
}

/// `g(x)` and the negativity threshold `ε max(1, ‖C(x)‖)` for diagnostics.
pub fn witness_profile(family: NoisyFamily, n: usize, kappa: usize, x: f64) -> Result<(f64, f64)> {
    let line = WitnessLine::new(&SymmetricState::maximally_mixed(n)?, &family.target(n)?, kappa)?;
    let (min, norm) = line.spectrum_at(x);
    Ok((min, crate::witness::WITNESS_EPS * norm.max(1.0)))
}

/// All cells of `cfg`, computed in parallel and returned in [`ScanConfig::cells`] order.
pub fn threshold_report(cfg: &ScanConfig) -> Result<Vec<ScanRecord>> {
    cfg.validate()?;
    let cells = cfg.cells();
    let run = || -> Result<Vec<ScanRecord>> {
        cells
            .par_iter()
            .map(|&(fam, n, k)| threshold_scan(fam, n, k, cfg))
            .collect()
    };
    match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::validation(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

#[derive(Serialize)]
struct CsvRow {
    family: u8,
    #[serde(rename = "N")]
    n: usize,
    kappa: usize,
    x_min: Option<f64>,
    min_eig_at_x1: f64,
    wall_ms: Option<f64>,
}

pub const CSV_HEADER: &str = "family,N,kappa,x_min,min_eig_at_x1,wall_ms";

pub fn write_report<W: Write>(records: &[ScanRecord], format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
            w.write_record(CSV_HEADER.split(','))
                .map_err(|e| Error::validation(e.to_string()))?;
            for r in records {
                w.serialize(CsvRow {
                    family: r.family.index(),
                    n: r.n,
                    kappa: r.kappa,
                    x_min: r.x_min,
                    min_eig_at_x1: r.min_eig_at_x1,
                    wall_ms: r.wall_ms,
                })
                .map_err(|e| Error::validation(e.to_string()))?;
            }
            w.flush().map_err(|e| Error::validation(e.to_string()))?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, records)?;
            writeln!(out).map_err(|e| Error::validation(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn render_report(records: &[ScanRecord], format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    write_report(records, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("reports are UTF-8"))
}

/// Writes the report, attaching `path` to any I/O failure.
pub fn save_report(records: &[ScanRecord], format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(records, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
