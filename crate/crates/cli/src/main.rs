//! `euler`: dimension counts and relations for generalized Euler integrals from JSON problem files.

mod commands;
mod output;
mod problem;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use commands::Overrides;
use problem::Problem;

#[derive(Parser)]
#[command(name = "euler", version, about = "Euler characteristics, volumes, twisted period matrices and relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signed Euler characteristic from critical points of the log-likelihood.
    Chi {
        #[command(flatten)]
        common: Common,
        /// Independent parameter draws that must agree.
        #[arg(long)]
        draws: Option<usize>,
        /// Use the file's own (s, ν) for the first draw.
        #[arg(long)]
        pin: bool,
    },
    /// Normalized volume of the Cayley polytope, or of explicit "points".
    Vol {
        #[command(flatten)]
        common: Common,
    },
    /// Pairing matrix of twisted cycles against cocycles (one variable).
    Integrate {
        #[command(flatten)]
        common: Common,
    },
    /// Relations from forms, operators, and (with --numeric) the kernel of the pairing matrix.
    Relations {
        #[command(flatten)]
        common: Common,
        /// Compute the pairing kernel and check every relation on every cycle.
        #[arg(long)]
        numeric: bool,
        /// Extra form as JSON, {"terms": [{"k", "g", "a", "b"}]}.
        #[arg(long = "form")]
        forms: Vec<String>,
        /// Extra operator as JSON, {"p": [..], "q": ..}.
        #[arg(long = "operator")]
        operators: Vec<String>,
    },
    /// Cayley matrix, kernel lattice, GKZ operators, resonance test and rank bound.
    Gkz {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Problem file, or `-` for standard input.
    file: String,
    /// Seed for every random choice; echoed in the report.
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature nodes per segment.
    #[arg(long)]
    nodes: Option<usize>,
    /// chi: path success tolerance; integrate: closure tolerance; relations: kernel threshold.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

type Runner = fn(&Problem, &Overrides) -> euler_core::Result<Value>;

const EXIT_NUMERICAL: u8 = 2;
const EXIT_INVALID: u8 = 3;

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<euler_core::Error> for Failure {
    fn from(e: euler_core::Error) -> Self {
        let (code, kind) =
            if e.is_numerical() { (EXIT_NUMERICAL, "numerical") } else { (EXIT_INVALID, "invalid_input") };
        Failure { code, kind, message: e.to_string() }
    }
}

fn read_input(file: &str) -> Result<String, Failure> {
    let io = |e: std::io::Error| Failure { code: EXIT_INVALID, kind: "io", message: format!("{file}: {e}") };
    if file == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
        Ok(text)
    } else {
        std::fs::read_to_string(file).map_err(io)
    }
}

fn envelope(name: &str, seed: Option<u64>, body: Map<String, Value>) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), json!(name));
    out.insert("seed".into(), json!(seed));
    out.extend(body);
    Value::Object(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common, overrides, run): (&str, Common, Overrides, Runner) = match cli.command {
        Command::Chi { common, draws, pin } => {
            ("chi", common, Overrides { draws, pin, ..Default::default() }, commands::chi)
        }
        Command::Vol { common } => ("vol", common, Overrides::default(), commands::vol),
        Command::Integrate { common } => ("integrate", common, Overrides::default(), commands::integrate),
        Command::Relations { common, numeric, forms, operators } => {
            ("relations", common, Overrides { numeric, forms, operators, ..Default::default() }, commands::relations)
        }
        Command::Gkz { common } => ("gkz", common, Overrides::default(), commands::gkz),
    };
    let overrides = Overrides { seed: common.seed, nodes: common.nodes, tol: common.tol, ..overrides };

    let mut seed = common.seed;
    let result = read_input(&common.file).and_then(|text| {
        let problem = Problem::parse(&text)?;
        seed = Some(commands::seed(&problem, &overrides));
        Ok(run(&problem, &overrides)?)
    });
    let seed = seed.or(Some(euler_core::critical::TrackerSettings::default().seed));
    let (code, doc) = match result {
        Ok(Value::Object(body)) => (0, envelope(name, seed, body)),
        Ok(other) => (0, envelope(name, seed, Map::from_iter([("result".to_string(), other)]))),
        Err(f) => {
            let error = Map::from_iter([(
                "error".to_string(),
                json!({"kind": f.kind, "exit_code": f.code, "message": f.message}),
            )]);
            (f.code, envelope(name, seed, error))
        }
    };
    let text = output::to_string(&doc);
    match common.out {
        Some(path) if code == 0 => {
            if let Err(e) = std::fs::write(&path, text) {
                let error = json!({"error": {"kind": "io", "exit_code": EXIT_INVALID, "message": format!("{}: {e}", path.display())}});
                print!("{}", output::to_string(&error));
                return ExitCode::from(EXIT_INVALID);
            }
        }
        _ => print!("{text}"),
    }
    ExitCode::from(code)
}
