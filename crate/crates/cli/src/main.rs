//! `nivat`: pattern complexity, generating sets, expansivity, balanced sets
//! and periodicity for two-dimensional configurations.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const FORMATS: &str = "\
File formats:
  Configuration (text): header lines, then data.
      alphabet: <tok> <tok> ...
      kind: periodic | window | wordlift | substitution
    periodic/window:  size: W H, then H rows of W space-separated tokens,
                      the row y = 0 first.
    wordlift:         word: <tok> <tok> ...   rule: x | y | x+y
    substitution:     seed: <tok>   iterations: K, then one stanza per
                      symbol: `block: <tok>` followed by B rows of B tokens,
                      the row y = 0 first.
    '#' starts a comment. A JSON object with the same field names is also
    accepted (detected by a leading '{').
  Shape: one `x y` integer pair per line, '#' comments. Non-convex input is
    completed to its convex hull unless --strict is given.
  Campaign (JSON): {\"corpus\": [{\"name\", \"path\" | \"config\" | \"generator\",
    \"aperiodic\"?}], \"checks\": [...], \"n_max\", \"radius\", \"extent\",
    \"seed\", \"trials\", \"stability\"}.
  Output: csv tables with a header row, pretty-printed JSON, SVG plots.

Exit status: 0 success, 1 a requested check failed or nothing was found,
2 usage or input error.";

#[derive(Parser)]
#[command(name = "nivat", version, about, after_long_help = FORMATS)]
struct Cli {
    /// Worker threads (also NIVAT_WORKERS); affects speed only.
    #[arg(long, global = true, env = "NIVAT_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Configuration file (text or JSON).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
}

#[derive(Args, Clone)]
struct Output {
    /// Write machine-readable output here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Svg,
    /// Shape file (`x y` per line).
    Shape,
    /// Configuration text file.
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exhaustive,
    Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Probe {
    Line,
    Direction,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WordMode {
    Periodic,
    Onesided,
}

#[derive(Subcommand)]
enum Command {
    /// Rectangular complexity profile P(n, k), or P(S) for a shape.
    #[command(after_long_help = FORMATS)]
    Complexity {
        #[command(flatten)]
        input: Input,
        /// Count on this shape instead of rectangles.
        #[arg(long, value_name = "FILE")]
        shape: Option<PathBuf>,
        /// Reject non-convex shape files.
        #[arg(long)]
        strict: bool,
        /// Largest width n; rows n = 1..=N.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Search R(n, k) for a convex generating set with D <= 0.
    #[command(name = "generate-set", after_long_help = FORMATS)]
    GenerateSet {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Largest seed rectangle searched exhaustively.
        #[arg(long, default_value_t = nivat_core::extension::DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Finite-scale nonexpansive direction and line tests, or a census.
    #[command(after_long_help = FORMATS)]
    Expansivity {
        #[command(flatten)]
        input: Input,
        /// Direction `p,q`; repeatable. Without it a census is run.
        #[arg(long = "direction", value_name = "P,Q", value_parser = parse_pair, allow_hyphen_values = true)]
        directions: Vec<(i64, i64)>,
        #[arg(long, value_enum, default_value_t = Probe::Both)]
        probe: Probe,
        #[arg(long, default_value_t = 4)]
        radius: u32,
        /// Half-length of the probe along the line (default: the radius).
        #[arg(long)]
        extent: Option<u32>,
        /// Census: largest n tried for the generating set.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Construct or check a balanced set for an oriented line.
    #[command(after_long_help = FORMATS)]
    Balanced {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "P,Q", value_parser = parse_pair, allow_hyphen_values = true)]
        direction: (i64, i64),
        /// Check this shape instead of constructing one.
        #[arg(long, value_name = "FILE")]
        shape: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
        /// Rectangle width (default: smallest n >= 2 with P(n, 3) <= 3n).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Also compare strip periods with the multiplicity bound.
        #[arg(long)]
        strips: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Period lattice, region periods, strip propagation and 1D words.
    #[command(after_long_help = FORMATS)]
    Periodicity {
        #[command(flatten)]
        input: Input,
        /// Check this period vector on a region.
        #[arg(long, value_name = "X,Y", value_parser = parse_pair, allow_hyphen_values = true)]
        vector: Option<(i64, i64)>,
        /// Region `x,y,w,h` for --vector (default: the shape, else 8x8 at the origin).
        #[arg(long, value_name = "X,Y,W,H", value_parser = parse_rect, allow_hyphen_values = true)]
        region: Option<(i64, i64, usize, usize)>,
        #[arg(long, value_name = "FILE")]
        shape: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
        /// Strip propagation for the line `p,q` and the shape's parallel edge.
        #[arg(long, value_name = "P,Q", value_parser = parse_pair, allow_hyphen_values = true)]
        propagate: Option<(i64, i64)>,
        /// Morse-Hedlund analysis of a word-lift's word.
        #[arg(long, value_enum)]
        word: Option<WordMode>,
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a verification campaign.
    #[command(name = "nivat-check", after_long_help = FORMATS)]
    NivatCheck {
        /// Campaign file (JSON); corpus paths are relative to it.
        #[arg(long, value_name = "FILE")]
        campaign: PathBuf,
        /// Report directory.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "csv,json")]
        format: Vec<String>,
    },
    /// Write a corpus configuration.
    #[command(after_long_help = FORMATS)]
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Destination (stdout when omitted).
        #[arg(long, global = true, value_name = "FILE")]
        out: Option<PathBuf>,
        /// `text` or `json`; inferred from the --out extension when omitted.
        #[arg(long, global = true, value_enum)]
        format: Option<OutFormat>,
    },
}

#[derive(Subcommand, Clone)]
enum GenKind {
    Checkerboard,
    Constant {
        #[arg(long, default_value_t = 2)]
        symbols: usize,
        #[arg(long, default_value_t = 0)]
        value: u8,
    },
    VerticalStripes {
        #[arg(long)]
        period: usize,
    },
    HorizontalStripes {
        #[arg(long)]
        period: usize,
    },
    Fibonacci {
        #[arg(long)]
        len: usize,
        #[arg(long, default_value = "x", value_parser = parse_rule)]
        rule: nivat_core::LiftRule,
    },
    ThueMorse {
        #[arg(long)]
        len: usize,
        #[arg(long, default_value = "x", value_parser = parse_rule)]
        rule: nivat_core::LiftRule,
    },
    Sturmian {
        /// Directive sequence `d1,d2,...` (positive).
        #[arg(long, value_delimiter = ',', required = true)]
        directive: Vec<usize>,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value = "x", value_parser = parse_rule)]
        rule: nivat_core::LiftRule,
    },
    /// Block substitution window; `tm2d` is the 2D Thue-Morse rule.
    Substitution {
        #[arg(long, value_parser = ["tm2d"])]
        rule: String,
        #[arg(long)]
        iterations: u32,
    },
    /// Periodic configuration with a random fundamental domain.
    Random {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 2)]
        symbols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_ints(s: &str, n: usize) -> Result<Vec<i64>, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not an integer")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated integers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let v = parse_ints(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_rect(s: &str) -> Result<(i64, i64, usize, usize), String> {
    let v = parse_ints(s, 4)?;
    if v[2] <= 0 || v[3] <= 0 {
        return Err("width and height must be positive".into());
    }
    Ok((v[0], v[1], v[2] as usize, v[3] as usize))
}

fn parse_rule(s: &str) -> Result<nivat_core::LiftRule, String> {
    nivat_core::LiftRule::parse(s).ok_or_else(|| format!("`{s}` is not one of x, y, x+y"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("usage error");
            eprintln!("nivat: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("nivat: --workers {n}: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("nivat: {e:#}");
            ExitCode::from(2)
        }
    }
}
