//! `galoiswb`: command-line front end.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage error, 3 resource bound.

mod commands;
mod config;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use galoiswb::fraisse::DEFAULT_ROUNDS;
use galoiswb::report::Report;
use galoiswb::{Error, Result};
use serde_json::Value;

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "galoiswb", version, about = "Finite checks for Fraisse limits and their Galois theory")]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML file with defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check HP, JEP and AP up to a size bound.
    CheckClass {
        /// Built-in class name or class file.
        class: String,
        #[arg(long)]
        size: Option<usize>,
    },
    /// Build a chain of stages and certify it.
    BuildLimit {
        class: String,
        #[arg(long)]
        rounds: Option<usize>,
        /// Largest extension problem per round; defaults to the round number.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        carrier_limit: Option<usize>,
        /// Universality arity; homogeneity is certified one below.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Automorphism group of a structure file.
    Aut { file: PathBuf },
    /// Orbits of the automorphism group on k-tuples.
    Orbits {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        distinct: bool,
    },
    /// Arrows between transitive G-sets and double cosets.
    Cosets {
        /// Group file or structure file.
        file: PathBuf,
        /// Generators of U as a JSON list of permutations.
        #[arg(long)]
        source: String,
        /// Generators of V; defaults to U.
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Galois,
    Atoms,
    Coherence,
    Imaginaries,
    Discrete,
    Z15,
}

impl Suite {
    fn key(self) -> &'static str {
        match self {
            Suite::Galois => "galois",
            Suite::Atoms => "atoms",
            Suite::Coherence => "coherence",
            Suite::Imaginaries => "imaginaries",
            Suite::Discrete => "discrete",
            Suite::Z15 => "z15",
        }
    }
}

enum Output {
    Report(Report),
    Value(Value, bool),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Overflow(_) => 3,
        Error::UnknownClass(_) | Error::ClassFile(_) | Error::Json(_) | Error::Signature(_) | Error::Structure(_) => 2,
        Error::OutOfRange(_) | Error::ClassMismatch(_) => 2,
        _ => 1,
    }
}

fn pick(flag: Option<usize>, cfg: &Config, section: &[&str], key: &str, default: usize) -> Result<usize> {
    let v = match flag {
        Some(v) => v,
        None => cfg.usize(section, key)?.unwrap_or(default),
    };
    if v == 0 {
        return Err(Error::OutOfRange(format!("`{key}` must be positive")));
    }
    Ok(v)
}

fn run(cmd: Command, cfg: &Config) -> Result<Output> {
    match cmd {
        Command::CheckClass { class, size } => {
            let class = commands::resolve_class(&class)?;
            let size = pick(size, cfg, &["check-class"], "size", 3)?;
            Ok(Output::Report(commands::check_class(&class, size)?))
        }
        Command::BuildLimit { class, rounds, bound, carrier_limit, k, out } => {
            let s = ["build-limit"];
            let class = commands::resolve_class(&class)?;
            let rounds = pick(rounds, cfg, &s, "rounds", DEFAULT_ROUNDS)?;
            let bound = bound.or(cfg.usize(&s, "bound")?);
            let carrier_limit = carrier_limit.or(cfg.usize(&s, "carrier_limit")?);
            let k = pick(k, cfg, &s, "k", 3)?;
            let (v, ok) = commands::build_limit(&class, rounds, bound, carrier_limit, k)?;
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&v)?;
                std::fs::write(&path, text + "\n").map_err(|e| Error::Json(format!("{}: {e}", path.display())))?;
            }
            Ok(Output::Value(v, ok))
        }
        Command::Verify { suite, class, size, stages, k_max } => {
            let s = ["verify", suite.key()];
            let class_name = match class {
                Some(c) => Some(c),
                None => cfg.string(&s, "class")?,
            };
            let class = class_name.as_deref().map(commands::resolve_class).transpose()?;
            let need_class = || class.clone().ok_or_else(|| Error::UnknownClass("(none given; use --class)".into()));
            let report = match suite {
                Suite::Galois => {
                    let size = pick(size, cfg, &s, "size", 3)?;
                    let stages = pick(stages, cfg, &s, "stages", DEFAULT_ROUNDS)?;
                    suites::galois(&need_class()?, size, stages)?
                }
                Suite::Coherence => {
                    let k_max = pick(k_max, cfg, &s, "k_max", 3)?;
                    let stages = pick(stages, cfg, &s, "stages", 3)?;
                    suites::coherence(&need_class()?, k_max, stages)?
                }
                Suite::Imaginaries => suites::imaginaries(&need_class()?, pick(size, cfg, &s, "size", 2)?)?,
                Suite::Atoms => suites::atoms(&suites::context(class.as_ref(), pick(size, cfg, &s, "size", 3)?)?)?,
                Suite::Discrete => {
                    suites::discrete(&suites::context(class.as_ref(), pick(size, cfg, &s, "size", 3)?)?)?
                }
                Suite::Z15 => suites::z15(),
            };
            Ok(Output::Report(report))
        }
        Command::Aut { file } => Ok(Output::Value(commands::aut(&file)?, true)),
        Command::Orbits { file, k, distinct } => Ok(Output::Value(commands::orbit_report(&file, k, distinct)?, true)),
        Command::Cosets { file, source, target } => {
            Ok(Output::Value(commands::cosets(&file, &source, target.as_deref())?, true))
        }
    }
}

fn render_value(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("values serialize") + "\n",
        Format::Text => match v.as_object() {
            Some(obj) => {
                obj.iter().filter(|(k, _)| k.as_str() != "stages").map(|(k, v)| format!("{k}: {v}\n")).collect()
            }
            None => format!("{v}\n"),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => match Config::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => Config::default(),
    };
    let jobs = match cli.jobs.map(Ok).or_else(|| cfg.usize(&[], "jobs").transpose()).transpose() {
        Ok(j) => j.unwrap_or(1).max(1),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let format = match cli.format {
        Some(f) => f,
        None => match cfg.string(&[], "format") {
            Ok(Some(s)) if s == "text" => Format::Text,
            Ok(Some(s)) if s == "json" => Format::Json,
            Ok(None) => Format::Json,
            Ok(Some(s)) => {
                eprintln!("error: unknown format `{s}`");
                return ExitCode::from(2);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli.command, &cfg)) {
        Ok(Output::Report(r)) => {
            match format {
                Format::Json => println!("{}", r.to_json_string()),
                Format::Text => print!("{}", r.to_text()),
            }
            if !r.inconclusive.is_empty() {
                eprintln!("warning: {} inconclusive case(s)", r.inconclusive.len());
            }
            ExitCode::from(if r.passed() { 0 } else { 1 })
        }
        Ok(Output::Value(v, ok)) => {
            print!("{}", render_value(&v, format));
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
