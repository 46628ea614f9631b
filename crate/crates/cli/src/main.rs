//! `steinberg`: cuspidal homology, images of psi, unit-residue groups and
//! batch tables from the command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use steinberg_core::ane::compute_ane;
use steinberg_core::psi::{image_of_psi, Budget};
use steinberg_core::quadfield::make_field;
use steinberg_core::table::{aggregate, run_table, TableRow};
use steinberg_core::voronoi::cuspidal_homology;
use steinberg_core::{Error, GammaFlavor};

#[derive(Parser)]
#[command(name = "steinberg", version, about = "Cuspidal Steinberg homology of Gamma_0(N) and images of psi for real quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cuspidal homology of the group at one level.
    Homology {
        #[arg(long, env = "STEINBERG_LEVEL")]
        level: u64,
        #[arg(long, env = "STEINBERG_GROUP", default_value = "pm", value_parser = parse_flavor)]
        group: GammaFlavor,
        #[arg(long, env = "STEINBERG_FORMAT", value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Image of psi and its cokernel for one level and field.
    Image {
        #[arg(long, env = "STEINBERG_LEVEL")]
        level: u64,
        #[arg(long, env = "STEINBERG_DISC")]
        disc: i64,
        #[arg(long, env = "STEINBERG_GROUP", default_value = "pm", value_parser = parse_flavor)]
        group: GammaFlavor,
        #[arg(long, env = "STEINBERG_FORMAT", value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Unit-residue groups U, A and Q for one level and field.
    Ane {
        #[arg(long, env = "STEINBERG_LEVEL")]
        level: u64,
        #[arg(long, env = "STEINBERG_DISC")]
        disc: i64,
        #[arg(long, env = "STEINBERG_GROUP", default_value = "pm", value_parser = parse_flavor)]
        group: GammaFlavor,
        #[arg(long, env = "STEINBERG_FORMAT", value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rows for every level with nontrivial homology and every squarefree
    /// discriminant parameter in the ranges.
    Table {
        /// Inclusive range `a..b`, or a single level.
        #[arg(long, env = "STEINBERG_LEVELS", value_parser = parse_range)]
        levels: RangeInclusive<u64>,
        #[arg(long, env = "STEINBERG_DISCS", value_parser = parse_range, default_value = "2..50")]
        discs: RangeInclusive<u64>,
        #[arg(long, env = "STEINBERG_GROUP", default_value = "pm", value_parser = parse_flavor)]
        group: GammaFlavor,
        /// Output file; standard output when absent.
        #[arg(long, env = "STEINBERG_OUT")]
        out: Option<PathBuf>,
        #[arg(long, env = "STEINBERG_FORMAT", value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Merge rows that agree in every column but delta.
        #[arg(long, env = "STEINBERG_AGGREGATE")]
        aggregate: bool,
        /// Worker threads; all logical CPUs by default.
        #[arg(long, env = "STEINBERG_JOBS")]
        jobs: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args)]
struct BudgetArgs {
    /// Powers of the fundamental unit to use (those with a root mod N).
    #[arg(long, env = "STEINBERG_KMAX", default_value_t = Budget::default().k_max)]
    kmax: u32,
    /// Largest multiplier c in the lower-left entry cN.
    #[arg(long, env = "STEINBERG_CMAX", default_value_t = Budget::default().c_max)]
    cmax: u64,
    /// Distinct candidates without growth before the span counts as stable.
    #[arg(long, env = "STEINBERG_STALL", default_value_t = Budget::default().stall_limit)]
    stall: u64,
    /// Wall-clock limit per (level, field) pair.
    #[arg(long, env = "STEINBERG_SECONDS", default_value_t = Budget::default().time_limit.as_secs_f64())]
    seconds: f64,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget, Error> {
        if self.kmax == 0 || self.cmax == 0 || self.stall == 0 {
            return Err(Error::InvalidArgument("--kmax, --cmax and --stall must be positive".into()));
        }
        if !(self.seconds.is_finite() && self.seconds > 0.0) {
            return Err(Error::InvalidArgument(format!("--seconds must be positive, got {}", self.seconds)));
        }
        Ok(Budget {
            k_max: self.kmax,
            c_max: self.cmax,
            stall_limit: self.stall,
            time_limit: Duration::from_secs_f64(self.seconds),
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

fn parse_flavor(s: &str) -> Result<GammaFlavor, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// `a..b` (inclusive) or a single number.
fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad range {s:?}, expected a..b"));
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            Ok(n..=n)
        }
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn check_level(n: u64) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("level must be positive".into()));
    }
    Ok(())
}

fn emit_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit_text(lines: &[(&str, String)]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    for (k, v) in lines {
        writeln!(out, "{k}: {v}")?;
    }
    Ok(())
}

const CSV_HEADER: [&str; 12] = ["N", "delta", "U", "A", "Q", "C", "r", "T", "s", "stabilized", "early_exit", "candidates"];
const AGGREGATED_HEADER: [&str; 9] = ["N", "U", "A", "Q", "C", "r", "T", "s", "deltas"];

fn opt(s: Option<u64>) -> String {
    s.map(|s| s.to_string()).unwrap_or_default()
}

fn write_table(rows: &[TableRow], format: TableFormat, merged: bool, out: Box<dyn Write>) -> Result<(), Failure> {
    match (format, merged) {
        (TableFormat::Csv, false) => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.write_record([
                    r.level.to_string(),
                    r.delta.to_string(),
                    r.u.to_string(),
                    r.a.to_string(),
                    r.q.to_string(),
                    r.c.to_string(),
                    r.r.to_string(),
                    r.t.to_string(),
                    opt(r.s),
                    r.stabilized.to_string(),
                    r.early_exit.to_string(),
                    r.candidates.to_string(),
                ])?;
            }
            w.flush()?;
        }
        (TableFormat::Csv, true) => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(AGGREGATED_HEADER)?;
            for g in aggregate(rows) {
                let deltas: Vec<String> = g.deltas.iter().map(u64::to_string).collect();
                w.write_record([
                    g.level.to_string(),
                    g.u.to_string(),
                    g.a.to_string(),
                    g.q.to_string(),
                    g.c.to_string(),
                    g.r.to_string(),
                    g.t.to_string(),
                    opt(g.s),
                    format!("[{}]", deltas.join(", ")),
                ])?;
            }
            w.flush()?;
        }
        (TableFormat::Json, false) => {
            let mut out = BufWriter::new(out);
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
        (TableFormat::Json, true) => {
            let mut out = BufWriter::new(out);
            serde_json::to_writer_pretty(&mut out, &aggregate(rows))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Homology { level, group, format } => {
            check_level(level)?;
            let h = cuspidal_homology(level, group)?;
            let s = h.summary();
            match format {
                Format::Json => emit_json(&s),
                Format::Text => emit_text(&[
                    ("N", s.level.to_string()),
                    ("group", s.flavor.to_string()),
                    ("rank", s.rank.to_string()),
                    ("torsion", s.torsion.to_string()),
                    ("homology", h.group.to_string()),
                    ("edges", format!("{} orbits, {} orientable", s.orbit_counts.edges, s.orbit_counts.orientable_edges)),
                    ("triangles", format!("{} orbits, {} orientable", s.orbit_counts.triangles, s.orbit_counts.orientable_triangles)),
                ]),
            }
        }
        Command::Image { level, disc, group, format, budget } => {
            check_level(level)?;
            let budget = budget.budget()?;
            let field = make_field(disc)?;
            let r = image_of_psi(level, &field, group, &budget)?;
            match format {
                Format::Json => emit_json(&r),
                Format::Text => emit_text(&[
                    ("N", r.level.to_string()),
                    ("delta", r.delta.to_string()),
                    ("group", r.flavor.to_string()),
                    ("rank", r.rank.to_string()),
                    ("torsion", r.torsion.to_string()),
                    ("image rank", r.image_rank.to_string()),
                    ("cokernel", r.cokernel.to_string()),
                    ("Q", r.predicted.to_string()),
                    ("shrinkage", r.shrinkage.map_or("-".into(), |s| s.to_string())),
                    ("candidates", r.candidates_used.to_string()),
                    ("stabilized", r.stabilized.to_string()),
                    ("early exit", r.early_exit.to_string()),
                ]),
            }
        }
        Command::Ane { level, disc, group, format } => {
            check_level(level)?;
            let field = make_field(disc)?;
            let r = compute_ane(&field, level, group);
            match format {
                Format::Json => emit_json(&r),
                Format::Text => emit_text(&[
                    ("N", r.level.to_string()),
                    ("delta", r.delta.to_string()),
                    ("group", r.flavor.to_string()),
                    ("U", r.u.to_string()),
                    ("A", r.a.to_string()),
                    ("Q", r.q.to_string()),
                ]),
            }
        }
        Command::Table { levels, discs, group, out, format, aggregate, jobs, budget } => {
            let budget = budget.budget()?;
            let jobs = match jobs {
                Some(0) => return Err(Error::InvalidArgument("--jobs must be positive".into()).into()),
                Some(j) => j,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            };
            check_level(*levels.start())?;
            let rows = if levels.is_empty() || discs.is_empty() {
                Vec::new()
            } else {
                run_table(levels, discs, group, &budget, jobs)?
            };
            let sink: Box<dyn Write> = match out {
                Some(path) => Box::new(File::create(path)?),
                None => Box::new(io::stdout()),
            };
            write_table(&rows, format, aggregate, sink)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("steinberg: {e}");
            match e {
                Error::Consistency(_) => ExitCode::from(3),
                Error::InvalidArgument(_) | Error::Parse(_) => ExitCode::from(2),
            }
        }
        Err(Failure::Io(e)) => {
            eprintln!("steinberg: {e}");
            ExitCode::FAILURE
        }
    }
}
