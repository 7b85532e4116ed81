use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use nearhex_core::check::{run_checks, run_criteria, CheckOptions, CheckRun, CRITERIA};
use nearhex_core::expected::Expected;
use nearhex_core::geometries::{named, Named};
use nearhex_core::hyperplanes::{enumerate_code, enumerate_search, Hyperplane};
use nearhex_core::report::{self, Format};
use nearhex_core::veldkamp::{build_veldkamp, doily_line_table, projective_counts};
use nearhex_core::{with_threads, Error, PointSet};

#[derive(Parser)]
#[command(
    name = "nearhex",
    version,
    about = "Hyperplanes and Veldkamp spaces of L3 x GQ(2,2)"
)]
struct Cli {
    /// Worker threads for the census and the Veldkamp pair scan.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Code,
    Search,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Md,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Md => Format::Md,
        }
    }
}

#[derive(clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value = "md")]
    format: OutFormat,
    /// Write to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct and validate a geometry, then print its stats.
    Build {
        name: String,
        /// Doily grid under the sub-hexagon (0..9).
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Enumerate all geometric hyperplanes.
    Hyperplanes {
        name: String,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        #[command(flatten)]
        output: Output,
    },
    /// Type table of the hexagon hyperplanes, or the doily's three kinds.
    Classify {
        name: String,
        #[command(flatten)]
        output: Output,
        /// Expected-value table to compare against.
        #[arg(long, value_name = "FILE")]
        expected: Option<PathBuf>,
    },
    /// Veldkamp space: point and line counts, and the line table of the doily.
    Veldkamp {
        name: String,
        #[arg(long)]
        grid: Option<usize>,
        /// List every line instead of a sample.
        #[arg(long)]
        lines: bool,
        #[command(flatten)]
        output: Output,
        #[arg(long, value_name = "FILE")]
        expected: Option<PathBuf>,
    },
    /// Graphviz export of the collinearity graph (or the incidence graph).
    Dot {
        name: String,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        incidence: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run every acceptance criterion.
    Check {
        /// Skip the hexagon Veldkamp line build and the hexagon automorphism count.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        output: Output,
        #[arg(long, value_name = "FILE")]
        expected: Option<PathBuf>,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    Failed,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn exit_for(err: &Error) -> ExitCode {
    match err {
        Error::UnknownGeometry(_)
        | Error::InvalidInput(_)
        | Error::ExpectedData(_)
        | Error::Io(_) => usage(err),
        _ => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_expected(path: Option<&Path>) -> Result<Expected, Error> {
    match path {
        Some(p) => Expected::from_path(p),
        None => Ok(Expected::builtin()),
    }
}

fn report_failures(run: &CheckRun) -> Outcome {
    let mut failed = false;
    for r in run.failures() {
        failed = true;
        eprintln!(
            "FAIL {} (criterion {}): expected {}, got {}",
            r.name, r.criterion, r.expected, r.actual
        );
    }
    if failed {
        Outcome::Failed
    } else {
        Outcome::Ok
    }
}

fn masks(hs: &[Hyperplane]) -> Vec<PointSet> {
    hs.iter().map(|h| h.points).collect()
}

fn enumerate(g: &Named, method: Method) -> Result<Result<Vec<Hyperplane>, String>, Error> {
    let geometry = g.geometry();
    let n = geometry.num_points();
    Ok(Ok(match method {
        Method::Code => enumerate_code(geometry)?,
        Method::Search => enumerate_search(geometry)?,
        Method::Both => {
            let code = enumerate_code(geometry)?;
            let search = enumerate_search(geometry)?;
            let (a, b) = (masks(&code), masks(&search));
            if a != b {
                let i = a
                    .iter()
                    .zip(&b)
                    .position(|(x, y)| x != y)
                    .unwrap_or(a.len().min(b.len()));
                let show = |v: &[PointSet]| v.get(i).map_or("(none)".to_string(), |m| m.to_hex(n));
                return Ok(Err(format!(
                    "methods disagree at index {i}: code {} search {} ({} vs {} hyperplanes)",
                    show(&a),
                    show(&b),
                    a.len(),
                    b.len()
                )));
            }
            eprintln!("code and search agree");
            code
        }
    }))
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Build { name, grid, output } => {
            let g = named(&name, grid)?;
            let stats = report::build_stats(&name, &g)?;
            write_out(
                output.out.as_deref(),
                &report::emit_build(&stats, output.format.into()),
            )?;
            Outcome::Ok
        }
        Command::Hyperplanes {
            name,
            grid,
            method,
            output,
        } => {
            let g = named(&name, grid)?;
            let hs = match enumerate(&g, method)? {
                Ok(hs) => hs,
                Err(msg) => {
                    eprintln!("{msg}");
                    return Ok(Outcome::Failed);
                }
            };
            let (records, _) = report::hyperplane_records(&g, hs)?;
            write_out(
                output.out.as_deref(),
                &report::emit_hyperplanes(&records, output.format.into()),
            )?;
            eprint!("{}", report::census_summary(&records));
            Outcome::Ok
        }
        Command::Classify {
            name,
            output,
            expected,
        } => {
            let exp = load_expected(expected.as_deref())?;
            let g = named(&name, None)?;
            let hs = enumerate_code(g.geometry())?;
            let (records, census) = report::hyperplane_records(&g, hs)?;
            let (text, criterion) = match (&g, census) {
                (Named::Hexagon(_), Some(c)) => {
                    (report::emit_type_table(&c.rows, output.format.into()), 5)
                }
                (Named::Doily(_), _) => (
                    report::emit_kind_table(
                        &report::doily_kind_rows(&records),
                        output.format.into(),
                    ),
                    2,
                ),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "classify supports hexagon and doily, not {name}"
                    )))
                }
            };
            write_out(output.out.as_deref(), &text)?;
            report_failures(&run_criteria(&exp, CheckOptions::default(), &[criterion]))
        }
        Command::Veldkamp {
            name,
            grid,
            lines,
            output,
            expected,
        } => {
            let exp = load_expected(expected.as_deref())?;
            let g = named(&name, grid)?;
            let geometry = g.geometry();
            let hs = enumerate_code(geometry)?;
            let space = build_veldkamp(geometry, &masks(&hs))?;
            let table = match &g {
                Named::Doily(d) => Some(doily_line_table(d, &space)?),
                _ => None,
            };
            let rep = report::veldkamp_report(geometry, &space, table, lines);
            write_out(
                output.out.as_deref(),
                &report::emit_veldkamp(&rep, output.format.into()),
            )?;

            let dim = geometry.line_incidence_matrix().nullspace().dim() as u32;
            let (pts, lns) = projective_counts(dim);
            let mut outcome = Outcome::Ok;
            let mut expect = |what: &str, want: u64, got: usize| {
                if want != got as u64 {
                    eprintln!("FAIL {what}: expected {want}, got {got}");
                    outcome = Outcome::Failed;
                }
            };
            expect("veldkamp.projective_points", pts, space.points.len());
            expect("veldkamp.projective_lines", lns, space.lines.len());
            match &g {
                Named::Hexagon(_) => {
                    expect(
                        "veldkamp.hexagon_points",
                        exp.veldkamp.hexagon_points,
                        space.points.len(),
                    );
                    expect(
                        "veldkamp.hexagon_lines",
                        exp.veldkamp.hexagon_lines,
                        space.lines.len(),
                    );
                }
                Named::SubHexagon(_) => {
                    expect(
                        "veldkamp.subhex_points",
                        exp.veldkamp.subhex_points,
                        space.points.len(),
                    );
                    expect(
                        "veldkamp.subhex_lines",
                        exp.veldkamp.subhex_lines,
                        space.lines.len(),
                    );
                }
                _ => {}
            }
            if matches!(g, Named::Doily(_)) {
                if let Outcome::Failed =
                    report_failures(&run_criteria(&exp, CheckOptions::default(), &[3]))
                {
                    outcome = Outcome::Failed;
                }
            }
            outcome
        }
        Command::Dot {
            name,
            grid,
            incidence,
            out,
        } => {
            let g = named(&name, grid)?;
            let graph = g.geometry();
            let text = if incidence {
                graph.incidence_dot(&name)
            } else {
                graph.collinearity_dot(&name)
            };
            write_out(out.as_deref(), &text)?;
            Outcome::Ok
        }
        Command::Check {
            quick,
            output,
            expected,
        } => {
            let exp = load_expected(expected.as_deref())?;
            let run = run_checks(&exp, CheckOptions { quick });
            write_out(
                output.out.as_deref(),
                &report::emit_checks(&run, output.format.into()),
            )?;
            for n in 1..=CRITERIA {
                if let Some((_, t)) = run.timings.iter().find(|t| t.0 == n) {
                    let status = if run.criterion_passed(n) {
                        "PASS"
                    } else {
                        "FAIL"
                    };
                    eprintln!("{status} criterion {n:>2}  {:>8.3} s", t.as_secs_f64());
                }
            }
            report_failures(&run)
        }
    };
    eprintln!("done in {:.3} s", start.elapsed().as_secs_f64());
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.threads == 0 {
        return usage("--threads must be at least 1");
    }
    match with_threads(cli.threads, || run(cli)) {
        Ok(Ok(Outcome::Ok)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::Failed)) => ExitCode::from(1),
        Ok(Err(e)) | Err(e) => exit_for(&e),
    }
}
