//! Command-line front end: scenario verification, chain arithmetic
//! helpers, and dual-graph export.
//!
//! Exit codes: 0 all checks pass, 1 a computed value disagrees with an
//! expected block, 2 input or usage error.

use blowdown_core::report::Report;
use blowdown_core::scenario::{self, Scenario};
use blowdown_core::tsingular::{
    boundary_homology, classify_class_t, hj_expand, milnor_h1, wahl_enumerate, Chain, ClassT,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "blowdown-lab",
    version,
    about = "Exact verification of rational blow-down surface constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files and check them against their expected blocks.
    Verify {
        /// Scenario files (JSON, schema 1)
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Hirzebruch-Jung chain arithmetic.
    Chain {
        #[command(subcommand)]
        command: ChainCommand,
    },
    /// Print the dual graph of a scenario's blown-up configuration.
    Graph {
        file: PathBuf,
        /// DOT output (the only supported format)
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum ChainCommand {
    /// Lens data and class-T decomposition of a chain, e.g. `classify 7,3,2,2,2,2`.
    Classify { chain: String },
    /// The unique all->=2 expansion of p/q, e.g. `expand 72 11`.
    Expand { p: String, q: String },
    /// Boundary and Milnor-fiber first homology of a chain.
    Homology { chain: String },
    /// All class-T chains up to a given length.
    Enumerate {
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
}

fn color_enabled() -> bool {
    match std::env::var("BLOWDOWN_LAB_COLOR").as_deref() {
        Ok("0") => false,
        Ok("1") => true,
        _ => std::io::stdout().is_terminal(),
    }
}

fn parse_chain(text: &str) -> Result<Chain, String> {
    let coeffs = text
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad chain entry '{t}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Chain::from_coeffs(coeffs).map_err(|e| e.to_string())
}

fn chain_brackets(coeffs: &[u64]) -> String {
    let parts: Vec<String> = coeffs.iter().map(u64::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn run_chain(cmd: &ChainCommand) -> Result<String, String> {
    match cmd {
        ChainCommand::Classify { chain } => {
            let c = parse_chain(chain)?;
            let t = classify_class_t(&c).map_err(|e| e.to_string())?;
            let tail = match &t.class_t {
                Some(ClassT::Wahl { d, n, a }) => format!("classT d={d} n={n} a={a}"),
                Some(ClassT::RationalDoublePoint) => "classT rdp".to_string(),
                None => "classT none".to_string(),
            };
            Ok(format!("p={} q={} {}\n", t.p, t.q, tail))
        }
        ChainCommand::Expand { p, q } => {
            let p = BigUint::from_str(p).map_err(|e| format!("bad p: {e}"))?;
            let q = BigUint::from_str(q).map_err(|e| format!("bad q: {e}"))?;
            let coeffs = hj_expand(&p, &q).map_err(|e| e.to_string())?;
            Ok(format!("{}\n", chain_brackets(&coeffs)))
        }
        ChainCommand::Homology { chain } => {
            let c = parse_chain(chain)?;
            let boundary = boundary_homology(&c).map_err(|e| e.to_string())?;
            let t = classify_class_t(&c).map_err(|e| e.to_string())?;
            let milnor = match milnor_h1(&t) {
                Ok(g) => g.to_string(),
                Err(_) => "not class T".to_string(),
            };
            Ok(format!("boundary={} milnor={}\n", boundary.group, milnor))
        }
        ChainCommand::Enumerate { max_len } => {
            let mut out = String::new();
            for coeffs in wahl_enumerate(*max_len) {
                out.push_str(&chain_brackets(&coeffs));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

enum VerifyOutcome {
    Report(Box<Report>),
    InputError(String),
}

fn verify_one(path: &PathBuf) -> VerifyOutcome {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return VerifyOutcome::InputError(format!("{}: {e}", path.display())),
    };
    let scenario: Scenario = match scenario::parse_scenario(&bytes) {
        Ok(s) => s,
        Err(e) => return VerifyOutcome::InputError(format!("{}: {e}", path.display())),
    };
    match scenario::run(&scenario) {
        Ok(report) => VerifyOutcome::Report(Box::new(report)),
        Err(e) => VerifyOutcome::InputError(format!("{}: {e}", path.display())),
    }
}

fn run_verify(files: &[PathBuf], format: Format) -> ExitCode {
    // independent scenarios; run them in parallel, print in input order
    let outcomes: Vec<VerifyOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = files.iter().map(|f| scope.spawn(move || verify_one(f))).collect();
        handles.into_iter().map(|h| h.join().expect("verify worker")).collect()
    });

    let color = color_enabled();
    let mut any_error = false;
    let mut any_fail = false;
    for (path, outcome) in files.iter().zip(outcomes) {
        match outcome {
            VerifyOutcome::InputError(msg) => {
                eprintln!("error: {msg}");
                any_error = true;
            }
            VerifyOutcome::Report(report) => {
                match format {
                    Format::Json => print!("{}", report.to_json()),
                    Format::Text => {
                        println!("file: {}", path.display());
                        print!("{}", report.render_text(color));
                    }
                }
                if !report.pass {
                    any_fail = true;
                }
            }
        }
    }
    if any_error {
        ExitCode::from(2)
    } else if any_fail {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_graph(file: &PathBuf, dot: bool) -> Result<String, String> {
    if !dot {
        return Err("only --dot output is supported".to_string());
    }
    let bytes = std::fs::read(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let scenario = scenario::parse_scenario(&bytes).map_err(|e| e.to_string())?;
    let cfg = scenario::replayed_configuration(&scenario).map_err(|e| e.to_string())?;
    Ok(cfg.dual_graph_dot())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify { files, format } => run_verify(files, *format),
        Command::Chain { command } => match run_chain(command) {
            Ok(out) => {
                print!("{out}");
                ExitCode::SUCCESS
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
        Command::Graph { file, dot } => match run_graph(file, *dot) {
            Ok(out) => {
                print!("{out}");
                ExitCode::SUCCESS
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
    }
}
