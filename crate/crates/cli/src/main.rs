use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbit_lift::algebra::parse::parse_rational;
use orbit_lift::polar::EigenMode;
use orbit_lift::series::Sign;
use orbit_lift_cli::document::{parse_interval, DocumentError};
use orbit_lift_cli::{cmd_eigen, cmd_global, cmd_lift, cmd_probe_lp, cmd_regularity, emit, Failure, Format, Options};

#[derive(Parser)]
#[command(name = "orbit-lift", version, about = "Lift curves over invariants of finite group representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Truncation order of the series.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Parameter interval `lo:hi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    interval: Option<String>,
    /// Base point.
    #[arg(long, global = true, allow_hyphen_values = true)]
    at: Option<String>,
    /// Only this side of the base point.
    #[arg(long, global = true, value_parser = ["+", "-"])]
    branch: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Continuous,
    Ac,
    Differentiable,
}

#[derive(Subcommand)]
enum Command {
    /// Local Puiseux lift at a base point.
    Lift { input: Option<PathBuf> },
    /// Global continuous lift over an interval with its AC certificate.
    Global { input: Option<PathBuf> },
    /// 1-flatness report and differentiable lift.
    Regularity { input: Option<PathBuf> },
    /// Eigenvalue lift of a matrix curve.
    Eigen {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "continuous")]
        mode: ModeArg,
    },
    /// Numeric L^p probe of the derivatives away from exceptional points.
    ProbeLp {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-4,1e-6")]
        eps: Vec<f64>,
    },
}

fn read_input(path: &Option<PathBuf>) -> Result<String, String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
            Ok(s)
        }
    }
}

fn options(c: &Common) -> Result<Options, DocumentError> {
    Ok(Options {
        order: c.order,
        interval: c.interval.as_deref().map(parse_interval).transpose()?,
        at: c.at.as_deref().map(parse_rational).transpose()?,
        branch: c.branch.as_deref().map(|b| if b == "-" { Sign::Minus } else { Sign::Plus }),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if cli.common.order == Some(0) {
        eprintln!("parse error: --order must be at least 1");
        return ExitCode::from(3);
    }
    let opts = match options(&cli.common) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}", Failure::Input(e));
            return ExitCode::from(3);
        }
    };
    let format = match cli.common.format {
        FormatArg::Text => Format::Text,
        FormatArg::Structured => Format::Structured,
    };
    let input = match &cli.command {
        Command::Lift { input } | Command::Global { input } | Command::Regularity { input } => input,
        Command::Eigen { input, .. } | Command::ProbeLp { input, .. } => input,
    };
    let src = match read_input(input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Lift { .. } => cmd_lift(&src, &opts),
        Command::Global { .. } => cmd_global(&src, &opts),
        Command::Regularity { .. } => cmd_regularity(&src, &opts),
        Command::Eigen { mode, .. } => {
            let mode = match mode {
                ModeArg::Continuous => EigenMode::Continuous,
                ModeArg::Ac => EigenMode::Ac,
                ModeArg::Differentiable => EigenMode::Differentiable,
            };
            cmd_eigen(&src, &opts, mode)
        }
        Command::ProbeLp { p, eps, .. } => cmd_probe_lp(&src, &opts, *p, eps),
    };
    match result {
        Ok(doc) => {
            print!("{}", emit(&doc, format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
