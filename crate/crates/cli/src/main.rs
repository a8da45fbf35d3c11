use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac_forge_cli::spec::parse_box_flag;
use dirac_forge_cli::{
    emit_report, load_path, run_all, Check, Format, ModeChoice, Overrides, RunOptions, EXIT_SPEC_ERROR, SEED_VAR,
};
use dirac_forge_core::Chart;

#[derive(Parser)]
#[command(name = "dirac-forge", version, about = "Build and verify Dirac structures L_B from orthogonal matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a spec file, a corpus file, or every *.json file in a directory.
    Run {
        path: PathBuf,
        /// exact, numeric or auto
        #[arg(long)]
        backend: Option<ModeChoice>,
        #[arg(long)]
        tol: Option<f64>,
        /// Grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
        /// "lo,hi" for every axis, or "lo,hi;lo,hi;..." per axis.
        #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
        sample_box: Option<BoxFlag>,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Replaces the spec's check list; repeat for several.
        #[arg(long = "check")]
        checks: Vec<Check>,
        #[arg(long)]
        extended_pairs: bool,
        /// Add wall-clock durations (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Parse one expression and print its normal form.
    Parse {
        /// Comma-separated variable names.
        #[arg(long, default_value = "x,y")]
        vars: String,
        expr: String,
    },
}

#[derive(Clone, Debug)]
struct BoxFlag(Vec<(f64, f64)>);

fn parse_box(s: &str) -> Result<BoxFlag, String> {
    parse_box_flag(s).map(BoxFlag)
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn parse_command(vars: &str, expr: &str) -> ExitCode {
    let names: Vec<String> = vars.split(',').map(|s| s.trim().to_string()).collect();
    let chart = match Chart::with_names(names) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return code(EXIT_SPEC_ERROR);
        }
    };
    match chart.parse(expr) {
        Ok(e) => {
            println!("{}", chart.render(&e.normalize()));
            code(0)
        }
        Err(e) => {
            let caret = expr.get(..e.offset).map_or(e.offset, |p| p.chars().count());
            eprintln!("error: {e}\n  {expr}\n  {}^", " ".repeat(caret));
            code(EXIT_SPEC_ERROR)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { path, backend, tol, grid, sample_box, format, checks, extended_pairs, timing, output } =
        cli.command
    else {
        let Command::Parse { vars, expr } = cli.command else { unreachable!() };
        return parse_command(&vars, &expr);
    };
    let overrides = Overrides {
        mode: backend,
        tolerance: tol,
        points: grid,
        sample_box: sample_box.map(|b| b.0),
        checks: (!checks.is_empty()).then_some(checks),
        extended_pairs: extended_pairs.then_some(true),
    };
    let mut loaded = match load_path(&path) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return code(e.exit_code());
        }
    };
    for item in &mut loaded {
        if let Ok(spec) = &mut item.spec {
            if let Err(e) = spec.apply(&overrides) {
                item.spec = Err(e);
            }
        }
    }
    let seed = std::env::var(SEED_VAR).ok();
    let report = run_all(&loaded, seed, RunOptions { timing });
    let bytes = emit_report(&report, format);
    let written = match &output {
        Some(p) => std::fs::write(p, &bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().lock().write_all(&bytes).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return code(EXIT_SPEC_ERROR);
    }
    for r in &report.reports {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.source);
        }
    }
    code(report.exit_code())
}
