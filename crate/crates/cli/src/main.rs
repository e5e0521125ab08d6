//! pingpong: build and verify ping-pong certificates from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "pingpong",
    version,
    about = "Exact ping-pong certificates for free products in convergence groups",
    after_help = "EXIT STATUS:\n\
                  \n  0  Valid / Proper / success\
                  \n  1  Violation / Inconclusive / Dependent\
                  \n  2  malformed input or exhausted search budget\
                  \n\nEXAMPLES:\n\
                  \n  pingpong classify --group psl2z --word st\
                  \n  pingpong independent-set --group f2 --count 4 -o f2.json\
                  \n  pingpong certify f2.json\
                  \n  pingpong render --tree f2.json -o f2.svg"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Machine-readable output, and errors as JSON on stderr
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the result here instead of stdout
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Longest word tried by the searches
    #[arg(long, global = true, env = "PINGPONG_MAX_WORD_LEN", default_value_t = 8)]
    pub max_word_len: usize,
    /// Largest power of a loxodromic tried by the searches
    #[arg(long, global = true, env = "PINGPONG_MAX_POWER", default_value_t = 64)]
    pub max_power: u32,
    /// Refinement levels tried for wandering regions
    #[arg(long, global = true, env = "PINGPONG_MAX_REFINE", default_value_t = 24)]
    pub max_refine: u32,
}

/// Group argument: a presentation file or one of `f2`, `sanov`, `psl2z`,
/// `psl2z-symbolic`.
#[derive(Args, Clone, Debug)]
pub struct GroupArg {
    /// Group file, or one of f2, sanov, psl2z, psl2z-symbolic
    #[arg(long)]
    pub group: String,
}

#[derive(Subcommand)]
pub enum Command {
    /// Classify a group element as elliptic, parabolic or loxodromic
    Classify {
        #[command(flatten)]
        group: GroupArg,
        /// Element as a word in the generators
        #[arg(long)]
        word: String,
    },
    /// Search for a wandering certificate for one element
    Wander {
        #[command(flatten)]
        group: GroupArg,
        /// Element as a word in the generators
        #[arg(long)]
        word: String,
    },
    /// Find an element moving a region into another
    Place {
        #[command(flatten)]
        group: GroupArg,
        /// Region to move, as JSON
        #[arg(long)]
        sigma: String,
        /// Target region, as JSON
        #[arg(long)]
        target: String,
    },
    /// Verify a certificate or ping-pong table document
    Certify {
        file: PathBuf,
        /// Orbit depth for the limit set check
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Recover the reduced expression of an element over a table
    Recover {
        file: PathBuf,
        /// Element as a word in the generators
        #[arg(long)]
        word: String,
        /// Largest power of a single entry tried before giving up
        #[arg(long, default_value_t = 10_000)]
        max_exponent: u64,
    },
    /// Build a certified independent set of conjugacy class representatives
    IndependentSet {
        #[command(flatten)]
        group: GroupArg,
        /// Use the first N conjugacy classes
        #[arg(long, conflicts_with = "classes")]
        count: Option<usize>,
        /// Explicit class representatives, comma separated
        #[arg(long, value_delimiter = ',')]
        classes: Vec<String>,
        /// Copies of each class, comma separated, aligned with the classes
        #[arg(long, value_delimiter = ',')]
        multiplicity: Vec<usize>,
        /// Longest representative considered when enumerating classes
        #[arg(long, default_value_t = 8)]
        max_class_len: usize,
        /// Orbit depth for the limit set check
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Wiegold's independent set in F2
    Wiegold {
        /// Number of classes in the list
        #[arg(long)]
        classes: usize,
        /// Conjugate by a^-n on the left instead of a^n
        #[arg(long)]
        opposite: bool,
        /// Longest representative considered when enumerating classes
        #[arg(long, default_value_t = 8)]
        max_class_len: usize,
    },
    /// List conjugacy class keys in canonical order
    EnumerateClasses {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Stop after this many classes
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Draw a certificate or table as SVG
    Render {
        file: PathBuf,
        /// Draw symbolic input as a cylinder tree
        #[arg(long)]
        tree: bool,
        /// Leave out the timestamp comment
        #[arg(long)]
        reproducible: bool,
        /// Orbit depth for the sampled dots
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Run a quick built-in sanity check
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.global, cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (kind, code) = commands::classify_error(&e);
            if cli.global.json {
                eprintln!("{}", serde_json::json!({"error": kind, "message": format!("{e:#}")}));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
