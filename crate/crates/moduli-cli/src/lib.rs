//! Std-side driver for the `moduli` binary.
//!
//! The core crate is `no_std` and knows nothing about files, threads,
//! or clocks. This library adds the pieces a command-line run needs:
//! an on-disk class-polynomial cache, a worker pool that fans a
//! sweep's work items out across threads, and JSON/CSV rendering of
//! the resulting reports.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use moduli_core::classpoly::{hilbert_class_poly, ClassPoly, ClassPolyError};
use moduli_core::degrees::{ClassPolyStore, FieldDegreeReport};
use moduli_core::forms::valid_discriminants;
use moduli_core::verify::{
    collect_outcomes, sweep_items, verify_pair, ReportFormat, SweepConfig, VerificationReport,
};

/// Every check passed.
pub const EXIT_OK: i32 = 0;
/// A mathematical claim failed.
pub const EXIT_VIOLATION: i32 = 1;
/// Some computation ran out of certified precision.
pub const EXIT_PRECISION: i32 = 2;
/// The invocation itself was rejected.
pub const EXIT_USAGE: i32 = 3;

// ---------------------------------------------------------------------
// driver errors

/// Failures of the run itself, as opposed to mathematical violations
/// found by a sweep.
#[derive(Debug)]
pub enum DriverError {
    /// Reading or writing a cache file failed.
    Io(PathBuf, io::Error),
    /// A cache file exists but does not parse back into a class
    /// polynomial.
    Cache(PathBuf, ClassPolyError),
    /// Computing a class polynomial failed outright.
    Poly(i64, ClassPolyError),
    /// The worker pool could not be built.
    Pool(String),
}

impl DriverError {
    /// Exit code the binary reports for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Io(..) | DriverError::Cache(..) | DriverError::Pool(_) => EXIT_USAGE,
            DriverError::Poly(..) => EXIT_PRECISION,
        }
    }
}

impl fmt::Display for DriverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriverError::Io(path, e) => write!(f, "cache file {}: {e}", path.display()),
            DriverError::Cache(path, e) => write!(f, "cache file {}: {e}", path.display()),
            DriverError::Poly(d, e) => write!(f, "class polynomial for {d}: {e}"),
            DriverError::Pool(e) => write!(f, "worker pool: {e}"),
        }
    }
}

impl std::error::Error for DriverError {}

// ---------------------------------------------------------------------
// class-polynomial cache

/// Cache file for one discriminant: `<|Δ|>.classpoly`, holding a
/// single `Δ h c_0 … c_h` line.
pub fn cache_path(dir: &Path, disc: i64) -> PathBuf {
    dir.join(format!("{}.classpoly", disc.unsigned_abs()))
}

fn read_cached(dir: &Path, disc: i64) -> Result<Option<ClassPoly>, DriverError> {
    let path = cache_path(dir, disc);
    if !path.exists() {
        return Ok(None);
    }
    let line = fs::read_to_string(&path).map_err(|e| DriverError::Io(path.clone(), e))?;
    let poly = ClassPoly::from_cache_line(line.trim()).map_err(|e| DriverError::Cache(path, e))?;
    Ok(Some(poly))
}

/// Builds the thread pool a warm-up or sweep runs on.
pub fn worker_pool(jobs: usize) -> Result<rayon::ThreadPool, DriverError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| DriverError::Pool(e.to_string()))
}

/// Loads every class polynomial with `|Δ| ≤ max_disc` into a store:
/// cache files are read where present, the rest are computed across
/// `jobs` workers, and fresh polynomials are written back when a
/// cache directory is given (creating it if needed).
pub fn warm_store(
    max_disc: i64,
    jobs: usize,
    cache_dir: Option<&Path>,
) -> Result<ClassPolyStore, DriverError> {
    let mut store = ClassPolyStore::new();
    let mut missing = Vec::new();
    for disc in valid_discriminants(max_disc) {
        match cache_dir {
            Some(dir) => match read_cached(dir, disc.value())? {
                Some(poly) => store.insert(poly),
                None => missing.push(disc),
            },
            None => missing.push(disc),
        }
    }
    if missing.is_empty() {
        return Ok(store);
    }
    let computed = worker_pool(jobs)?.install(|| {
        missing
            .par_iter()
            .map(|d| hilbert_class_poly(d).map_err(|e| DriverError::Poly(d.value(), e)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    if let Some(dir) = cache_dir {
        fs::create_dir_all(dir).map_err(|e| DriverError::Io(dir.to_path_buf(), e))?;
        for poly in &computed {
            let path = cache_path(dir, poly.disc().value());
            fs::write(&path, format!("{}\n", poly.cache_line()))
                .map_err(|e| DriverError::Io(path.clone(), e))?;
        }
    }
    for poly in computed {
        store.insert(poly);
    }
    Ok(store)
}

// ---------------------------------------------------------------------
// parallel sweep

/// Runs a sweep's work items across the configured worker pool. Each
/// worker starts from a clone of the warmed store, so the shared
/// polynomials are never recomputed and no locking is needed; reports
/// come back in emission order.
pub fn parallel_sweep(
    config: &SweepConfig,
    store: &ClassPolyStore,
) -> Result<VerificationReport, DriverError> {
    let floor = config.prec_override().unwrap_or(0);
    let items = sweep_items(config);
    let outcomes: Vec<_> = worker_pool(config.jobs())?.install(|| {
        items
            .par_iter()
            .map_init(
                || store.clone(),
                |store, &(op, dx, dy)| (op, dx, dy, verify_pair(store, op, dx, dy, floor)),
            )
            .collect()
    });
    let mut report = collect_outcomes(config, outcomes);
    sort_reports(&mut report.reports);
    Ok(report)
}

/// Stable emission order: by operation, then `|Δx|`, `|Δy|`, then the
/// form coefficients.
pub fn sort_reports(reports: &mut [FieldDegreeReport]) {
    reports.sort_by_key(|r| {
        (
            r.op,
            r.disc_x.abs(),
            r.disc_y.abs(),
            r.form_x.coefficients(),
            r.form_y.coefficients(),
        )
    });
}

/// Maps a finished sweep to the binary's exit code: mathematical
/// violations dominate, then precision problems of either kind.
pub fn exit_code_for(report: &VerificationReport) -> i32 {
    if !report.violations.is_empty() {
        EXIT_VIOLATION
    } else if !report.failures.is_empty() || report.uncertified() > 0 {
        EXIT_PRECISION
    } else {
        EXIT_OK
    }
}

// ---------------------------------------------------------------------
// report rendering

#[derive(Serialize)]
struct ConfigBlock {
    max_disc: i64,
    ops: Vec<String>,
    prec: Option<u32>,
    jobs: usize,
    format: String,
}

#[derive(Serialize)]
struct SummaryBlock {
    pairs: usize,
    violations: usize,
    precision_failures: usize,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct ReportRow {
    op: String,
    disc_x: i64,
    disc_y: i64,
    form_x: [i64; 3],
    form_y: [i64; 3],
    deg_x: usize,
    deg_y: usize,
    deg_pair: usize,
    deg_generated: usize,
    index: usize,
    certified: bool,
}

#[derive(Serialize)]
struct Document {
    config: ConfigBlock,
    summary: SummaryBlock,
    reports: Vec<ReportRow>,
}

fn form_triple(form: &moduli_core::forms::QuadForm) -> [i64; 3] {
    let (a, b, c) = form.coefficients();
    [a, b, c]
}

fn report_row(r: &FieldDegreeReport) -> ReportRow {
    ReportRow {
        op: r.op.to_string(),
        disc_x: r.disc_x,
        disc_y: r.disc_y,
        form_x: form_triple(&r.form_x),
        form_y: form_triple(&r.form_y),
        deg_x: r.deg_x,
        deg_y: r.deg_y,
        deg_pair: r.deg_pair,
        deg_generated: r.deg_generated,
        index: r.index,
        certified: r.certified,
    }
}

fn format_name(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Json => "json",
        ReportFormat::Csv => "csv",
    }
}

/// Renders a sweep as `{config, summary: {pairs, violations,
/// precision_failures, wall_time_s}, reports: [...]}`. Everything but
/// `wall_time_s` is a deterministic function of the configuration.
pub fn render_json(config: &SweepConfig, report: &VerificationReport, wall_time_s: f64) -> String {
    let doc = Document {
        config: ConfigBlock {
            max_disc: config.max_disc(),
            ops: config.ops().iter().map(|op| op.to_string()).collect(),
            prec: config.prec_override(),
            jobs: config.jobs(),
            format: format_name(config.format()).to_string(),
        },
        summary: SummaryBlock {
            pairs: report.reports.len(),
            violations: report.violations.len(),
            precision_failures: report.failures.len() + report.uncertified(),
            wall_time_s,
        },
        reports: report.reports.iter().map(report_row).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialization");
    text.push('\n');
    text
}

/// Renders one CSV row per conjugate pair, mirroring the JSON report
/// fields; forms are written `a:b:c` to keep rows comma-clean.
pub fn render_csv(report: &VerificationReport) -> String {
    let mut out = String::from(
        "op,disc_x,disc_y,form_x,form_y,deg_x,deg_y,deg_pair,deg_generated,index,certified\n",
    );
    for r in &report.reports {
        let (xa, xb, xc) = r.form_x.coefficients();
        let (ya, yb, yc) = r.form_y.coefficients();
        out.push_str(&format!(
            "{},{},{},{xa}:{xb}:{xc},{ya}:{yb}:{yc},{},{},{},{},{},{}\n",
            r.op, r.disc_x, r.disc_y, r.deg_x, r.deg_y, r.deg_pair, r.deg_generated, r.index,
            r.certified,
        ));
    }
    out
}
