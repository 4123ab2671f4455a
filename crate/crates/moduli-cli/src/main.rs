//! Command-line verification of the field-degree theorems for
//! combined singular moduli, at desk scale.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical claim
//! fails, 2 when certified precision runs out, 3 for usage errors.

use std::path::PathBuf;
use std::process;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use moduli_cli::{
    exit_code_for, parallel_sweep, render_csv, render_json, warm_store, EXIT_OK, EXIT_PRECISION,
    EXIT_USAGE, EXIT_VIOLATION,
};
use moduli_core::degrees::PairOp;
use moduli_core::forms::{class_number, reduced_forms, valid_discriminants, Discriminant};
use moduli_core::jfun::ENVELOPE_BOUND;
use moduli_core::verify::{
    dihedral_check, envelope_sweep, eq12_bound_check, search_equal_fields, thresholds_prod,
    thresholds_sum, DihedralCheckError, FiniteGroup, ReportFormat, SweepConfig, ThresholdReport,
};

#[derive(Parser)]
#[command(
    name = "moduli",
    version,
    about = "Desk-scale verification of field degrees of combined singular moduli"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List reduced forms and class numbers per discriminant.
    Forms(RangeArgs),
    /// Compute Hilbert class polynomials, optionally cached on disk.
    Classpoly(ClasspolyArgs),
    /// Audit the j-growth envelope on a fundamental-domain grid.
    Envelope(EnvelopeArgs),
    /// Certify the proof's inequality thresholds and the dominant
    /// product floor.
    Thresholds,
    /// Sweep sums of singular moduli over discriminant pairs.
    VerifySum(SweepArgs),
    /// Sweep products of singular moduli over discriminant pairs.
    VerifyProd(SweepArgs),
    /// Search for distinct discriminants generating the same field.
    EqualFields(RangeArgs),
    /// Check dihedral-type group recognition on known groups.
    Dihedral(DihedralArgs),
    /// Sweep a chosen set of operations over discriminant pairs.
    Report(ReportArgs),
}

#[derive(Args)]
struct RangeArgs {
    /// Largest |Δ| included.
    #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
    max_disc: i64,
}

#[derive(Args)]
struct ClasspolyArgs {
    /// Largest |Δ| included.
    #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
    max_disc: i64,
    /// Worker threads.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    /// Directory of class-polynomial cache files.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// Minimum number of grid points.
    #[arg(long, default_value_t = 10_000)]
    points: usize,
    /// Largest imaginary part sampled.
    #[arg(long, default_value_t = 40)]
    max_im: u32,
    /// Working precision floor in bits.
    #[arg(long, default_value_t = 128)]
    prec: u32,
}

#[derive(Args)]
struct SweepArgs {
    /// Largest |Δ| included in the sweep.
    #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
    max_disc: i64,
    /// Precision floor in bits; the per-pair policy still applies.
    #[arg(long)]
    prec: Option<u32>,
    /// Worker threads.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Directory of class-polynomial cache files.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct DihedralArgs {
    /// Largest dihedral group order checked.
    #[arg(long, default_value_t = 24)]
    max_order: usize,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Comma-separated operations to sweep.
    #[arg(long, value_delimiter = ',', conflicts_with = "eps")]
    ops: Vec<OpArg>,
    /// Sign family: +1 selects sum and prod, -1 selects diff and ratio.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Sum,
    Diff,
    Prod,
    Ratio,
}

impl OpArg {
    fn pair_op(self) -> PairOp {
        match self {
            OpArg::Sum => PairOp::Sum,
            OpArg::Diff => PairOp::Diff,
            OpArg::Prod => PairOp::Prod,
            OpArg::Ratio => PairOp::Ratio,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl FormatArg {
    fn report_format(self) -> ReportFormat {
        match self {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(usize::from)
        .unwrap_or(1)
}

/// Validates a `--max-disc` bound, printing the rejection on stderr.
fn range_guard(max_disc: i64) -> Result<(), i32> {
    match SweepConfig::new(max_disc) {
        Ok(_) => Ok(()),
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_USAGE)
        }
    }
}

fn run_forms(args: &RangeArgs) -> i32 {
    if let Err(code) = range_guard(args.max_disc) {
        return code;
    }
    for disc in valid_discriminants(args.max_disc) {
        let forms = reduced_forms(&disc);
        let mut line = format!("Δ={} h={}:", disc.value(), forms.len());
        for form in &forms {
            line.push_str(&format!(" {form}"));
        }
        println!("{line}");
    }
    EXIT_OK
}

fn run_classpoly(args: &ClasspolyArgs) -> i32 {
    if let Err(code) = range_guard(args.max_disc) {
        return code;
    }
    let started = Instant::now();
    let store = match warm_store(args.max_disc, args.jobs, args.cache.as_deref()) {
        Ok(store) => store,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let mut lines: Vec<(u64, String)> = store
        .polys()
        .map(|p| (p.disc().value().unsigned_abs(), p.cache_line()))
        .collect();
    lines.sort();
    let count = lines.len();
    for (_, line) in lines {
        println!("{line}");
    }
    eprintln!(
        "{count} class polynomials in {:.1}s",
        started.elapsed().as_secs_f64()
    );
    EXIT_OK
}

fn run_envelope(args: &EnvelopeArgs) -> i32 {
    if args.points == 0 || args.max_im < 1 {
        eprintln!("error: the grid needs at least one point and --max-im ≥ 1");
        return EXIT_USAGE;
    }
    let re_steps = (args.points as f64).sqrt().ceil() as usize;
    let im_steps = args.points.div_ceil(re_steps);
    let started = Instant::now();
    match envelope_sweep(re_steps, im_steps, args.max_im, args.prec) {
        Ok(sweep) => {
            println!(
                "{} grid points up to Im z = {}, {} violations; largest gap ≈ {} against the bound {}",
                sweep.points,
                args.max_im,
                sweep.violations,
                sweep.max_gap.to_decimal_string(6),
                ENVELOPE_BOUND,
            );
            eprintln!("{:.1}s", started.elapsed().as_secs_f64());
            if sweep.violations == 0 {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_PRECISION
        }
    }
}

fn print_threshold_report(report: &ThresholdReport) {
    for case in &report.cases {
        println!(
            "{}: strict from |Δ| ≥ {}{}{}{}",
            case.name,
            case.boundary,
            if case.fails_below {
                ", fails just below"
            } else {
                ", does NOT fail just below"
            },
            if case.tail_certified {
                ", tail certified"
            } else {
                ", tail NOT certified"
            },
            if case.spot_checked {
                ", spot checks pass"
            } else {
                ", spot checks FAIL"
            },
        );
    }
    if let Some(ok) = report.small_q {
        println!(
            "small-q bound e^(−π√3) ≤ 0.01: {}",
            if ok { "holds" } else { "FAILS" }
        );
    }
}

fn run_thresholds() -> i32 {
    let sum = thresholds_sum();
    let prod = thresholds_prod();
    print_threshold_report(&sum);
    print_threshold_report(&prod);

    let floor = match eq12_bound_check(100) {
        Ok(floor) => floor,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PRECISION;
        }
    };
    println!(
        "dominant product floor over |Δ| ≤ 100: {} pairs, {} zero-modulus exceptions, {} violations",
        floor.pairs,
        floor.zero_exceptions,
        floor.violations.len(),
    );

    let expected = sum.boundaries() == [9, 9] && prod.boundaries() == [396, 95, 99];
    if expected && sum.all_certified() && prod.all_certified() && floor.is_clean() {
        EXIT_OK
    } else {
        eprintln!("threshold boundaries or certificates do not match the proof");
        EXIT_VIOLATION
    }
}

fn run_sweep(args: &SweepArgs, ops: &[PairOp]) -> i32 {
    let config = match SweepConfig::new(args.max_disc) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let config = config
        .with_ops(ops)
        .with_prec(args.prec)
        .with_jobs(args.jobs)
        .with_format(args.format.report_format());

    let started = Instant::now();
    let store = match warm_store(config.max_disc(), config.jobs(), args.cache.as_deref()) {
        Ok(store) => store,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let report = match parallel_sweep(&config, &store) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let wall = started.elapsed().as_secs_f64();

    match config.format() {
        ReportFormat::Json => print!("{}", render_json(&config, &report, wall)),
        ReportFormat::Csv => print!("{}", render_csv(&report)),
    }
    eprintln!(
        "{} conjugate pairs over {} discriminant pairs; {} violations, {} failures, {} uncertified, {} zero-modulus skips; {:.1}s",
        report.reports.len(),
        report.pairs_checked,
        report.violations.len(),
        report.failures.len(),
        report.uncertified(),
        report.zero_skips,
        wall,
    );
    exit_code_for(&report)
}

fn run_equal_fields(args: &RangeArgs) -> i32 {
    if let Err(code) = range_guard(args.max_disc) {
        return code;
    }
    let started = Instant::now();
    let report = search_equal_fields(args.max_disc);
    for &(dx, dy) in &report.pairs {
        let h = class_number(&Discriminant::new(dx).expect("searched discriminant"));
        println!("Q(x) = Q(y) for Δx={dx} Δy={dy} (h={h})");
    }
    eprintln!(
        "{} coincident pairs with |Δ| ≤ {} in {:.1}s",
        report.pairs.len(),
        args.max_disc,
        started.elapsed().as_secs_f64(),
    );
    if report.failures.is_empty() {
        EXIT_OK
    } else {
        for &(dx, dy) in &report.failures {
            eprintln!("precision failure on ({dx}, {dy})");
        }
        EXIT_PRECISION
    }
}

fn run_dihedral(args: &DihedralArgs) -> i32 {
    if args.max_order < 6 {
        eprintln!("error: the smallest non-abelian dihedral group has order 6");
        return EXIT_USAGE;
    }
    let mut all_pass = true;
    let mut check = |label: &str, pass: bool| {
        println!("{label}: {}", if pass { "pass" } else { "FAIL" });
        all_pass &= pass;
    };

    for n in 3..=(args.max_order / 2) {
        let g = FiniteGroup::dihedral(n);
        check(
            &format!("dihedral group of order {} recovers its rotations", 2 * n),
            dihedral_check(&g) == Ok(true),
        );
    }

    let base = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(4));
    let g = FiniteGroup::generalized_dihedral(&base).expect("the base group is abelian");
    check(
        "generalized dihedral over C2×C4, not itself dihedral",
        dihedral_check(&g) == Ok(true),
    );

    let klein = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
    check(
        "Klein four-group rejected as abelian",
        dihedral_check(&klein) == Err(DihedralCheckError::AbelianInput),
    );
    check(
        "quaternion group rejected, no dihedral structure",
        dihedral_check(&FiniteGroup::quaternion()) == Err(DihedralCheckError::NoDihedralStructure),
    );

    if all_pass {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn resolve_ops(args: &ReportArgs) -> Result<Vec<PairOp>, i32> {
    if let Some(eps) = &args.eps {
        return match eps.as_str() {
            "+1" | "1" => Ok(vec![PairOp::Sum, PairOp::Prod]),
            "-1" => Ok(vec![PairOp::Diff, PairOp::Ratio]),
            other => {
                eprintln!("error: --eps takes +1 or -1, not {other}");
                Err(EXIT_USAGE)
            }
        };
    }
    if args.ops.is_empty() {
        Ok(PairOp::ALL.to_vec())
    } else {
        Ok(args.ops.iter().map(|op| op.pair_op()).collect())
    }
}

fn run_report(args: &ReportArgs) -> i32 {
    match resolve_ops(args) {
        Ok(ops) => run_sweep(&args.sweep, &ops),
        Err(code) => code,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            process::exit(code);
        }
    };
    let code = match &cli.command {
        Command::Forms(args) => run_forms(args),
        Command::Classpoly(args) => run_classpoly(args),
        Command::Envelope(args) => run_envelope(args),
        Command::Thresholds => run_thresholds(),
        Command::VerifySum(args) => run_sweep(args, &[PairOp::Sum]),
        Command::VerifyProd(args) => run_sweep(args, &[PairOp::Prod]),
        Command::EqualFields(args) => run_equal_fields(args),
        Command::Dihedral(args) => run_dihedral(args),
        Command::Report(args) => run_report(args),
    };
    process::exit(code);
}
