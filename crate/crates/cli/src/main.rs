//! `repcount`: count orbits of reflection groups on `(Z/p^k)^l`.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pcompact::counting::DEFAULT_PRECISION_CEILING;
use pcompact::matgroup::DEFAULT_CLOSURE_CAP;
use pcompact::oracle::DEFAULT_ORACLE_CAP;
use pcompact::{Error, ErrorKind};

#[derive(Parser, Debug)]
#[command(name = "repcount", version, about = "Orbit counts of reflection groups on (Z/p^k)^l")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count orbits by one method.
    Count(CountArgs),
    /// List every conjugacy class with its fixed-lattice rank and cokernel torsion.
    Census(GroupArgs),
    /// Per-class Burnside breakdown at a given k.
    Classes(ClassesArgs),
    /// Run every applicable method for k = 1..=kmax and compare.
    Crosscheck(CrosscheckArgs),
    /// Smith valuations of a matrix file.
    Snf(SnfArgs),
    /// Evaluate a closed-form count.
    Formula(FormulaArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Burnside,
    Classes,
    Formula,
    #[value(name = "theoremA")]
    TheoremA,
    #[value(name = "theoremB")]
    TheoremB,
    #[value(name = "theoremC")]
    TheoremC,
    Oracle,
    Domain,
}

/// Settings shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Omit timings so that output is reproducible byte for byte.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Maximum number of group elements generated before giving up.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP, global = true)]
    pub closure_cap: usize,
    /// Maximum number of points the brute-force oracle will visit.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP, global = true)]
    pub oracle_cap: u64,
    /// Largest precision exponent tried when resolving cokernel torsion.
    #[arg(long, default_value_t = DEFAULT_PRECISION_CEILING, global = true)]
    pub precision_ceiling: u32,
    /// Worker threads; 0 uses every available core.
    #[arg(long, env = "REPCOUNT_THREADS", default_value_t = 0, global = true)]
    pub threads: usize,
}

/// Group selection: `--group SPEC`, or `--m --s --n --p` for family 2a.
#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// g12, g24, g29, g31, x34, family2a:m=..,s=..,n=..,p=.., family2b:m=..,p=.., sphere:m=..,p=..
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = MethodArg::Burnside)]
    pub method: MethodArg,
    /// Exponents used by theoremA and formula instead of the catalog ones.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Option<Vec<u64>>,
}

#[derive(Args, Debug)]
pub struct ClassesArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

#[derive(Args, Debug)]
pub struct CrosscheckArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 3)]
    pub kmax: u32,
}

#[derive(Args, Debug)]
pub struct SnfArgs {
    /// Matrix file: header `p M rows cols`, then the rows.
    pub file: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct FormulaArgs {
    /// x12, x24, x29, x31 or x34 (g-prefixed names are accepted too).
    #[arg(long, required_unless_present = "exponents")]
    pub group: Option<String>,
    #[arg(long)]
    pub k: u32,
    /// Evaluate the non-modular product formula for these exponents instead.
    #[arg(long, value_delimiter = ',', requires = "p")]
    pub exponents: Option<Vec<u64>>,
    #[arg(long)]
    pub p: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

/// Failures of a subcommand, mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    /// Methods disagreed; carries the first divergence.
    Divergence(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Divergence(_) => 1,
            Failure::Io(_) => 2,
            Failure::Lib(e) => match e.kind() {
                ErrorKind::Spec => 2,
                ErrorKind::Limit => 3,
                ErrorKind::Internal => 4,
            },
        }
    }

    fn to_json(&self) -> String {
        let (name, message) = match self {
            Failure::Lib(e) => (e.name(), e.to_string()),
            Failure::Divergence(m) => ("Divergence", m.clone()),
            Failure::Io(m) => ("Io", m.clone()),
        };
        serde_json::json!({ "error": name, "message": message, "exit_code": self.exit_code() }).to_string()
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Count(a) => &a.group.common,
        Command::Census(a) => &a.common,
        Command::Classes(a) => &a.group.common,
        Command::Crosscheck(a) => &a.group.common,
        Command::Snf(a) => &a.common,
        Command::Formula(a) => &a.common,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = common(&cli.command).threads;
    if threads > 0 {
        // a second initialization can only fail if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = match &cli.command {
        Command::Count(a) => commands::count(a),
        Command::Census(a) => commands::census(a),
        Command::Classes(a) => commands::classes(a),
        Command::Crosscheck(a) => commands::crosscheck(a),
        Command::Snf(a) => commands::snf(a),
        Command::Formula(a) => commands::formula(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, failure)) => {
            if let Some(out) = out {
                print!("{out}");
            }
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.exit_code())
        }
    }
}
