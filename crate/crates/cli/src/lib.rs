//! The `enrich` command line: load a TOML instance, run checks, print a
//! deterministic report.

pub mod acceptance;
pub mod commands;
pub mod instance;
pub mod report;

use clap::{Parser, Subcommand, ValueEnum};
use enriched_sites::Limits;

use commands::Options;
use instance::{load, LoadError};
use report::Report;

/// Instances shipped with the binary, addressable by name.
pub const BUILTINS: [(&str, &str); 3] = [
    ("suite", include_str!("../../../instances/suite.toml")),
    ("chain3-into-exp", include_str!("../../../instances/chain3-into-exp.toml")),
    ("zmod6-S13", include_str!("../../../instances/zmod6-S13.toml")),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "enrich", version, about = "Checks for enriched sieves, coverages, sheaves and Gabriel topologies")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Cap on enumeration candidate spaces (also read from ENRICH_CAP).
    #[arg(long, global = true)]
    pub cap: Option<u128>,
    /// Degree bound for graded checks.
    #[arg(long, default_value_t = 6, global = true)]
    pub dmax: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every object in an instance file.
    Validate { file: String },
    /// Check T1, T2 (and T3 for topologies).
    CoverageCheck {
        file: String,
        #[arg(long)]
        coverage: Option<String>,
    },
    /// Least topology containing a coverage.
    Close { file: String, coverage: String },
    /// Pull a sieve back along generalized elements.
    Pullback {
        file: String,
        sieve: String,
        #[arg(long)]
        along: Option<String>,
        #[arg(long)]
        value: Option<String>,
    },
    /// Push categories, sieves, presheaves and coverages along a map of bases.
    BaseChange {
        file: String,
        map: String,
        #[arg(long)]
        category: Option<String>,
    },
    /// Exhaustive injectivity of change of base on sieves and coverages.
    Injectivity {
        file: String,
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        category: Option<String>,
    },
    SheafCheck {
        file: String,
        #[arg(long)]
        presheaf: Option<String>,
        #[arg(long)]
        coverage: Option<String>,
    },
    Sheafify { file: String, presheaf: String, coverage: String },
    /// Compare the image of a sheafification with the sheafification of the image.
    CommuteCheck {
        file: String,
        map: String,
        #[arg(long)]
        coverage: Option<String>,
        #[arg(long)]
        presheaf: Option<String>,
    },
    /// Right ideals of the rings in an instance.
    Ideals {
        file: String,
        #[arg(long)]
        ring: Option<String>,
    },
    GabrielCheck {
        file: String,
        #[arg(long)]
        topology: Option<String>,
    },
    GabrielClose { file: String, topology: String },
    Localize {
        file: String,
        #[arg(long)]
        topology: Option<String>,
    },
    /// Two graded topologies that agree after passing to degree zero.
    Counterexample,
    /// Run every acceptance criterion.
    Acceptance,
    /// Re-emit an instance in canonical form.
    Canonical { file: String },
    /// List the built-in instances.
    Builtins,
}

/// Outcome of a run: the text to print and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Resolve a file argument: a path, or the name of a built-in instance
/// (optionally prefixed with `builtin:`).
pub fn source(arg: &str) -> Result<String, String> {
    let name = arg.strip_prefix("builtin:").unwrap_or(arg);
    if let Some((_, src)) = BUILTINS.iter().find(|(n, _)| *n == name) {
        if arg.starts_with("builtin:") || !std::path::Path::new(arg).exists() {
            return Ok(src.to_string());
        }
    }
    std::fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))
}

fn limits(cli: &Cli) -> Limits {
    let cap = cli.cap.or_else(|| std::env::var("ENRICH_CAP").ok().and_then(|v| v.parse().ok()));
    match cap {
        Some(c) => Limits::with_cap(c),
        None => Limits::default(),
    }
}

enum Output {
    Report(Report),
    Raw(String),
}

fn fail(msg: String) -> Outcome {
    Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 2 }
}

pub fn run(cli: &Cli) -> Outcome {
    let opts = Options { limits: limits(cli), d_max: cli.dmax };
    let load_file = |file: &str| -> Result<instance::Instance, String> {
        let src = source(file)?;
        load(&src, &opts.limits).map_err(|e: LoadError| format!("{file}: {e}"))
    };
    use Command as C;
    let report: Result<Output, String> = (|| {
        let r = match &cli.command {
            C::Builtins => return Ok(Output::Raw(BUILTINS.iter().map(|(n, _)| format!("{n}\n")).collect())),
            C::Canonical { file } => {
                let src = source(file)?;
                let raw = instance::parse_raw(&src).map_err(|e| format!("{file}: {e}"))?;
                return Ok(Output::Raw(instance::canonical(&raw)));
            }
            C::Counterexample => commands::counterexample(&opts),
            C::Acceptance => Ok(acceptance::run_all(&opts).report()),
            C::Validate { file } => Ok(commands::validate(&load_file(file)?, &opts)),
            C::CoverageCheck { file, coverage } => commands::coverage_check(&load_file(file)?, coverage.as_deref(), &opts),
            C::Close { file, coverage } => commands::close(&load_file(file)?, coverage, &opts),
            C::Pullback { file, sieve, along, value } => {
                commands::pullback(&load_file(file)?, sieve, along.as_deref(), value.as_deref(), &opts)
            }
            C::BaseChange { file, map, category } => commands::base_change(&load_file(file)?, map, category.as_deref(), &opts),
            C::Injectivity { file, map, category } => {
                commands::injectivity(&load_file(file)?, map.as_deref(), category.as_deref(), &opts)
            }
            C::SheafCheck { file, presheaf, coverage } => {
                commands::sheaf_check(&load_file(file)?, presheaf.as_deref(), coverage.as_deref(), &opts)
            }
            C::Sheafify { file, presheaf, coverage } => commands::sheafify_cmd(&load_file(file)?, presheaf, coverage, &opts),
            C::CommuteCheck { file, map, coverage, presheaf } => {
                commands::commute_check(&load_file(file)?, map, coverage.as_deref(), presheaf.as_deref(), &opts)
            }
            C::Ideals { file, ring } => commands::ideals(&load_file(file)?, ring.as_deref(), &opts),
            C::GabrielCheck { file, topology } => commands::gabriel_check(&load_file(file)?, topology.as_deref(), &opts),
            C::GabrielClose { file, topology } => commands::gabriel_close(&load_file(file)?, topology, &opts),
            C::Localize { file, topology } => commands::localize_cmd(&load_file(file)?, topology.as_deref(), &opts),
        };
        r.map(Output::Report).map_err(|e| e.to_string())
    })();
    match report {
        Ok(Output::Report(r)) => Outcome {
            stdout: match cli.format {
                Format::Text => r.text(),
                Format::Machine => r.machine(),
            },
            stderr: String::new(),
            code: if r.success() { 0 } else { 1 },
        },
        Ok(Output::Raw(s)) => Outcome { stdout: s, stderr: String::new(), code: 0 },
        Err(s) => fail(s),
    }
}
