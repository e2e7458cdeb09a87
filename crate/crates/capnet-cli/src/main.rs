mod config;
mod engine;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::LandscapeFile;
use engine::{EngineError, LandscapeMode};
use report::{config_hash, CapacityReport};

// exit codes: 0 ok, 1 usage, 2 input parse error, 3 numerical failure
const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "capnet",
    about = "Capacity computations on electrical networks and potential landscapes",
    version
)]
struct Cli {
    /// include wall-clock timing in the report (breaks byte-determinism)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact capacity of an explicit network file
    Network(CommonArgs),
    /// Network-model capacity of a landscape over an eps sweep
    Capacity(CommonArgs),
    /// Capacity plus a direct grid solve and their ratio
    Verify(CommonArgs),
    /// Full detail: verify plus per-edge currents and block pruning
    Report(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// input file (network file or landscape run file)
    #[arg(long)]
    input: Option<PathBuf>,
    /// built-in catalog entry instead of --input
    #[arg(long)]
    catalog: Option<String>,
    /// comma-separated temperature sweep, e.g. 0.2,0.1,0.05
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// island-decomposition grid resolution per axis
    #[arg(long)]
    grid: Option<usize>,
    /// bridge half-width (default: automatic)
    #[arg(long)]
    delta: Option<f64>,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// parameter override NAME=VALUE (repeatable)
    #[arg(long = "param", value_parser = parse_kv)]
    param: Vec<(String, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.parse().map_err(|_| format!("invalid value in `{s}`"))?;
    Ok((k.to_string(), v))
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        Failure {
            code: match e {
                EngineError::Parse(_) => EXIT_PARSE,
                EngineError::Numeric(_) => EXIT_NUMERIC,
            },
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("capnet: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let (args, mut rep) = match &cli.cmd {
        Cmd::Network(args) => {
            if args.catalog.is_some() {
                return Err(usage("--catalog does not apply to `network`"));
            }
            let path = args
                .input
                .as_ref()
                .ok_or_else(|| usage("`network` requires --input"))?;
            let src = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let parts = vec![
                "network".to_string(),
                format!("{:?}", args.format),
                src.clone(),
            ];
            (args, engine::run_network(&src, parts)?)
        }
        Cmd::Capacity(args) => landscape(args, LandscapeMode::Capacity)?,
        Cmd::Verify(args) => landscape(args, LandscapeMode::Verify)?,
        Cmd::Report(args) => landscape(args, LandscapeMode::Report)?,
    };
    if cli.timing {
        rep.timing_ms = Some(start.elapsed().as_millis());
        // the hash covers the config only, but a timed report is a
        // different artifact from an untimed one
        rep.config_hash = config_hash(&[rep.config_hash.clone(), "timing".into()]);
    }
    emit(args, &rep)
}

fn landscape(
    args: &CommonArgs,
    mode: LandscapeMode,
) -> Result<(&CommonArgs, CapacityReport), Failure> {
    let mut file = match (&args.input, &args.catalog) {
        (Some(path), None) => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            config::parse_landscape(&src).map_err(|e| Failure {
                code: EXIT_PARSE,
                msg: e.to_string(),
            })?
        }
        (None, Some(name)) => LandscapeFile {
            catalog: Some(name.clone()),
            ..LandscapeFile::default()
        },
        _ => return Err(usage("exactly one of --input or --catalog is required")),
    };
    // command-line flags win over file directives
    if !args.eps.is_empty() {
        if args.eps.iter().any(|e| *e <= 0.0) {
            return Err(usage("--eps values must be positive"));
        }
        file.eps = args.eps.clone();
    }
    if let Some(g) = args.grid {
        file.grid = Some(g);
    }
    if let Some(d) = args.delta {
        file.delta = Some(d);
    }
    file.params.extend(args.param.iter().cloned());
    let run = file.resolve().map_err(|e| Failure {
        code: EXIT_PARSE,
        msg: e.to_string(),
    })?;
    let mode_name = match mode {
        LandscapeMode::Capacity => "capacity",
        LandscapeMode::Verify => "verify",
        LandscapeMode::Report => "report",
    };
    let parts = engine::landscape_hash_parts(&run, mode_name, &format!("{:?}", args.format));
    let rep = engine::run_landscape(&run, mode, parts)?;
    Ok((args, rep))
}

fn emit(args: &CommonArgs, rep: &CapacityReport) -> Result<(), Failure> {
    let body = match args.format {
        Format::Json => rep.to_json(),
        Format::Csv => rep.to_csv(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
