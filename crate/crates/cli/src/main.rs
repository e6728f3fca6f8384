//! `isospec` command-line front end.

mod check;
mod range;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isospec::analytic::{self, RectangleSpec};
use isospec::counting::{self, CountOptions, CsvRow, SpectralReport, SweepItem, SweepRow};
use isospec::geom::{Family, PlanarDomain};
use isospec::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "isospec", version, about = "Neumann-below-Dirichlet spectral counts for planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute N and I for one domain.
    Compute(ComputeArgs),
    /// Compute N and I over a parameter range of one family.
    Sweep(SweepArgs),
    /// Print first zeros of ultraspherical Bessel derivatives for n = 2..7.
    Table1(TableArgs),
    /// Tabulate lambda_1, N and I for unit balls in dimensions 2..=N_MAX.
    Ball(BallArgs),
    /// Exact lattice count, isoperimetric ratio and bounds for a box.
    Rect(RectArgs),
    /// Run the invariant suite; exits 1 on any violation.
    Check(CheckArgs),
    /// Print a generated domain as JSON.
    Domain(DomainArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SolverArgs {
    /// Initial mesh size (default: domain diameter / 8).
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long, default_value_t = 6)]
    max_levels: usize,
    #[arg(long, default_value_t = 3)]
    min_levels: usize,
    #[arg(long, default_value_t = 1e-8)]
    tie_rel_tol: f64,
    /// Lagrange element degree (1 or 2).
    #[arg(long, default_value_t = 1)]
    degree: u8,
}

impl SolverArgs {
    fn options(&self) -> CountOptions {
        CountOptions {
            h0: self.h0,
            max_levels: self.max_levels,
            min_levels: self.min_levels,
            tie_rel_tol: self.tie_rel_tol,
            degree: self.degree,
            ..CountOptions::default()
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long, conflicts_with = "domain", required_unless_present = "domain")]
    family: Option<Family>,
    #[arg(long, requires = "family")]
    param: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Domain JSON file.
    #[arg(long)]
    domain: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Family name, or `default` for the full default suite.
    #[arg(long)]
    family: String,
    /// Parameters: `lo:hi:step`, `lo:hi` (step 1) or a comma list.
    #[arg(long)]
    params: Option<String>,
    /// Vertex counts for the random family (same syntax as --params).
    #[arg(long)]
    sides: Option<String>,
    /// Number of seeds per vertex count; seeds are 0..SEEDS.
    #[arg(long)]
    seeds: Option<u64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    out: TextOrCsv,
}

#[derive(Args)]
struct TextOrCsv {
    /// Emit CSV instead of an aligned text table.
    #[arg(long)]
    csv: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BallArgs {
    n_max: u32,
    #[command(flatten)]
    out: TextOrCsv,
}

#[derive(Args)]
struct RectArgs {
    /// Side lengths as decimals (exact).
    #[arg(required = true, num_args = 1..)]
    lengths: Vec<String>,
    #[command(flatten)]
    out: TextOrCsv,
}

#[derive(Args)]
struct CheckArgs {
    /// Also run the finite-element checks.
    #[arg(long)]
    fem: bool,
}

#[derive(Args)]
struct DomainArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    param: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// A failure carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidDomain(_)
            | Error::Parameter(_)
            | Error::GenerationFailed { .. }
            | Error::Json(_)
            | Error::Range(_)
            | Error::Resource(_) => EXIT_USAGE,
            _ => EXIT_SOLVER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(f) = configure_workers() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Sweep(a) => sweep(a),
        Command::Table1(a) => table1(a),
        Command::Ball(a) => ball(a),
        Command::Rect(a) => rect(a),
        Command::Check(a) => check::run(a.fem),
        Command::Domain(a) => domain(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Bounds the worker pool by `ISOSPEC_WORKERS` when set.
fn configure_workers() -> Result<(), Failure> {
    let Ok(v) = std::env::var("ISOSPEC_WORKERS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("ISOSPEC_WORKERS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_csv<W: Write>(w: W, rows: &[CsvRow]) -> Result<(), Failure> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(counting::CSV_HEADER)?;
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn print_diagnostics(report: &SpectralReport) {
    if !report.converged {
        eprintln!(
            "warning: {} not converged after {} levels (gap {:.3e}, increment {:.3e})",
            report.domain_label,
            report.levels.len(),
            report.threshold_gap,
            report.extrapolation_increment
        );
    }
    for f in &report.flags {
        eprintln!("note: {}: {f}", report.domain_label);
    }
}

fn compute(a: ComputeArgs) -> Outcome {
    let opts = a.solver.options();
    opts.validate()?;
    let (domain, family, param, seed) = match (&a.domain, a.family) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            let d = PlanarDomain::from_json(&text)?;
            let prov = d.provenance().clone();
            let family = if prov.generator.is_empty() { "file".to_string() } else { prov.generator };
            let param = prov.params.first().copied();
            (d, family, param, prov.seed)
        }
        (None, Some(f)) => {
            let param = a.param.ok_or_else(|| Failure::usage("--param is required with --family"))?;
            (f.generate(param, a.seed)?, f.name().to_string(), Some(param), a.seed)
        }
        (None, None) => return Err(Failure::usage("either --family or --domain is required")),
    };
    let mut report = counting::compute_n(&domain, &opts)?;
    if report.domain_label.is_empty() {
        if let Some(path) = &a.domain {
            report.domain_label = path.display().to_string();
        }
    }
    print_diagnostics(&report);
    let mut w = sink(&a.out.output)?;
    match a.out.format {
        Format::Csv => write_csv(&mut w, &[CsvRow::from_report(&family, param, seed, &report)])?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Failure::usage(e.to_string()))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(if report.converged { 0 } else { EXIT_SOLVER })
}

fn sweep_items(a: &SweepArgs) -> Result<Vec<SweepItem>, Failure> {
    if a.family == "default" {
        if a.params.is_some() || a.sides.is_some() || a.seeds.is_some() {
            return Err(Failure::usage("the default suite takes no parameters"));
        }
        return Ok(counting::default_suite());
    }
    let family: Family = a.family.parse().map_err(|e: Error| Failure::usage(e.to_string()))?;
    if family == Family::Random {
        let sides = a
            .sides
            .as_deref()
            .or(a.params.as_deref())
            .ok_or_else(|| Failure::usage("random sweeps need --sides"))?;
        let seeds = a.seeds.ok_or_else(|| Failure::usage("random sweeps need --seeds"))?;
        if seeds == 0 {
            return Err(Failure::usage("--seeds must be positive"));
        }
        let sides = range::parse(sides).map_err(Failure::usage)?;
        return Ok(sides
            .into_iter()
            .flat_map(|s| (0..seeds).map(move |seed| (family, s, Some(seed))))
            .collect());
    }
    if a.seeds.is_some() || a.sides.is_some() {
        return Err(Failure::usage(format!("{family} sweeps take no --seeds or --sides")));
    }
    let params = a.params.as_deref().ok_or_else(|| Failure::usage("--params is required"))?;
    let params = range::parse(params).map_err(Failure::usage)?;
    Ok(params.into_iter().map(|p| (family, p, None)).collect())
}

fn sweep(a: SweepArgs) -> Outcome {
    let opts = a.solver.options();
    opts.validate()?;
    let items = sweep_items(&a)?;
    let rows: Vec<SweepRow> = counting::sweep_items(&items, &opts);
    for row in &rows {
        match &row.outcome {
            Ok(r) => print_diagnostics(r),
            Err(e) => eprintln!("error: {} {}: {e}", row.family, row.param),
        }
    }
    let mut w = sink(&a.out.output)?;
    match a.out.format {
        Format::Csv => {
            let csv_rows: Vec<CsvRow> = rows.iter().map(CsvRow::from).collect();
            write_csv(&mut w, &csv_rows)?;
        }
        Format::Json => {
            let values: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| match &row.outcome {
                    Ok(r) => serde_json::to_value(r).expect("report serializes"),
                    Err(e) => serde_json::json!({
                        "family": row.family.name(),
                        "param": row.param,
                        "seed": row.seed,
                        "error": e.to_string(),
                    }),
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &values).map_err(|e| Failure::usage(e.to_string()))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(0)
}

/// Writes either aligned text (header + rows) or CSV.
fn emit_table(out: &TextOrCsv, header: &[&str], rows: &[Vec<String>]) -> Outcome {
    let mut w = sink(&out.output)?;
    if out.csv {
        let mut c = csv::Writer::from_writer(&mut w);
        c.write_record(header)?;
        for r in rows {
            c.write_record(r)?;
        }
        c.flush()?;
    } else {
        let widths: Vec<usize> = (0..header.len())
            .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(w, "{}", line(header.to_vec()))?;
        for r in rows {
            writeln!(w, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn table1(a: TableArgs) -> Outcome {
    let rows: Vec<Vec<String>> = analytic::table1()?
        .iter()
        .map(|r| {
            let mut cells = vec![r.n.to_string()];
            cells.extend(r.p.iter().chain([&r.j]).map(|v| {
                if a.out.csv {
                    format!("{v:.10}")
                } else {
                    format!("{v:.2}")
                }
            }));
            cells
        })
        .collect();
    emit_table(&a.out, &["n", "p1", "p2", "p3", "j"], &rows)
}

fn ball(a: BallArgs) -> Outcome {
    if !(2..=analytic::MAX_BALL_DIM).contains(&a.n_max) {
        return Err(Failure::usage(format!(
            "N_MAX must lie in 2..={}, got {}",
            analytic::MAX_BALL_DIM,
            a.n_max
        )));
    }
    let mut rows = Vec::new();
    for n in 2..=a.n_max {
        let b = analytic::ball_n(n)?;
        rows.push(vec![
            n.to_string(),
            format!("{:.10}", b.lambda1),
            b.count.to_string(),
            format!("{:.10e}", analytic::ball_isoperimetric(n)),
        ]);
    }
    emit_table(&a.out, &["n", "lambda1", "N", "I"], &rows)
}

fn rect(a: RectArgs) -> Outcome {
    let lengths: Vec<&str> = a.lengths.iter().map(String::as_str).collect();
    let spec = RectangleSpec::from_decimal(&lengths)?;
    let c = analytic::rectangle_sandwich_check(&spec)?;
    let row = vec![
        spec.dim().to_string(),
        c.n_count.to_string(),
        format!("{:.10}", c.isoperimetric),
        format!("{:.6}", c.ratio_lower),
        format!("{:.6}", c.ratio_upper),
        c.lower_ok.to_string(),
        c.upper_ok.to_string(),
    ];
    emit_table(
        &a.out,
        &["dim", "N", "I", "N/(c_lo I)", "N/(c_hi I)", "lower_ok", "upper_ok"],
        &[row],
    )?;
    Ok(if c.lower_ok && c.upper_ok { 0 } else { 1 })
}

fn domain(a: DomainArgs) -> Outcome {
    let d = a.family.generate(a.param, a.seed)?;
    let mut w = sink(&a.output)?;
    writeln!(w, "{}", d.to_json())?;
    w.flush()?;
    Ok(0)
}
