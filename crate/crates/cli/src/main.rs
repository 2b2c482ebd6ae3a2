//! `boundedrank`: classify matrix-space files and run verification campaigns.
//!
//! Exit status: 0 on success, 2 when a campaign finds violations, a space
//! is a counterexample or two spaces are not equivalent, 1 on usage and
//! input errors. Reports go to standard output as JSON; diagnostics go to
//! standard error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boundedrank::campaign::{default_target_dim, orbit_census_with, run_campaign_with, CampaignOptions, CampaignSpec, Mode, Theorem};
use boundedrank::enumerate::DEFAULT_CAMPAIGN_BUDGET;
use boundedrank::format::MSpaceFile;
use boundedrank::group::{are_equivalent, DEFAULT_GROUP_BUDGET};
use boundedrank::par::{with_workers, Parallelism};
use boundedrank::report::{to_json, CampaignDocument, CensusDocument, ClassificationDocument, EquivDocument, RankDocument};
use boundedrank::space::DEFAULT_MEMBER_BUDGET;
use boundedrank::{classify, FieldOrder, MatSpace};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "boundedrank", version, about = "Bounded-rank matrix spaces over GF(2), GF(3), GF(5) and GF(7)")]
struct Cli {
    /// Worker threads for enumeration.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,

    /// Override the enumeration budget of the command.
    #[arg(long, global = true, env = "BOUNDEDRANK_BUDGET")]
    budget: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the space in a file under a rank bound.
    Classify {
        path: PathBuf,
        /// Rank bound the space is known to satisfy.
        #[arg(short = 'r', long = "r")]
        r: usize,
    },
    /// Run a verification campaign.
    Verify(VerifyArgs),
    /// Decide whether two spaces are equivalent, printing a witness.
    Equiv { first: PathBuf, second: PathBuf },
    /// Maximal rank of the members of a space.
    Rank { path: PathBuf },
    /// Equivalence classes of the dim-`d` spaces of rank at most `r`.
    Census {
        n: usize,
        p: usize,
        #[arg(value_parser = parse_order)]
        order: FieldOrder,
        d: usize,
        r: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Orbit,
    Sampled,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Square_a, Square_b, Rect_a, Rect_b, M3F2, FlandersBound, GenInverse,
    /// ReprLemma or NoncomkerM3F2.
    #[arg(value_parser = parse_theorem)]
    theorem: Theorem,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Field order.
    #[arg(long, alias = "field", value_parser = parse_order, default_value = "2")]
    order: FieldOrder,
    /// Subspace dimension; defaults to the first dimension the statement covers.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    /// Number of samples in sampled mode.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Seed for sampled mode (required there).
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_order(s: &str) -> Result<FieldOrder, String> {
    let p: u32 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    FieldOrder::new(p).map_err(|e| e.to_string())
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse().map_err(|e: boundedrank::Error| e.to_string())
}

/// A successful run that found something wrong.
struct Flagged;

type Outcome = Result<Result<(), Flagged>, String>;

fn read_space(path: &Path) -> Result<MatSpace, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    MSpaceFile::parse(&text)
        .map(|f| f.to_space())
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_classify(path: &Path, r: usize, budget: u64) -> Outcome {
    let v = read_space(path)?;
    let res = classify::classify(&v, r, budget).map_err(|e| e.to_string())?;
    print!("{}", to_json(&ClassificationDocument::new(&v, &res)));
    Ok(if res.is_counterexample() { Err(Flagged) } else { Ok(()) })
}

fn cmd_verify(a: &VerifyArgs, workers: u64, budget: Option<u64>) -> Outcome {
    let fixed = matches!(a.theorem, Theorem::M3F2 | Theorem::NoncomkerM3F2);
    let need = |v: Option<usize>, name: &str, default: usize| -> Result<usize, String> {
        match (v, fixed) {
            (Some(x), _) => Ok(x),
            (None, true) => Ok(default),
            (None, false) if name == "r" && a.theorem == Theorem::GenInverse => Ok(0),
            (None, false) => Err(format!("{} needs --{name}", a.theorem)),
        }
    };
    let n = need(a.n, "n", 3)?;
    let p = need(a.p, "p", 3)?;
    let r = need(a.r, "r", 2)?;
    let mode = match a.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Orbit => Mode::OrbitReduced,
        ModeArg::Sampled => Mode::Sampled {
            count: a.samples,
            seed: a.seed.ok_or("sampled mode needs --seed")?,
        },
    };
    let spec = CampaignSpec {
        theorem: a.theorem,
        n,
        p,
        r,
        order: a.order,
        target_dim: a.dim.unwrap_or_else(|| default_target_dim(a.theorem, n, p, r)),
        mode,
    };
    let opts = CampaignOptions {
        budget: budget.unwrap_or(DEFAULT_CAMPAIGN_BUDGET),
        parallelism: parallelism(workers),
        ..CampaignOptions::default()
    };
    let rep = with_workers(workers as usize, || run_campaign_with(&spec, &opts)).map_err(|e| e.to_string())?;
    print!("{}", to_json(&CampaignDocument::new(&rep)));
    Ok(if rep.passed() { Ok(()) } else { Err(Flagged) })
}

fn cmd_equiv(first: &Path, second: &Path, budget: u64) -> Outcome {
    let a = read_space(first)?;
    let b = read_space(second)?;
    let w = are_equivalent(&a, &b, budget).map_err(|e| e.to_string())?;
    print!("{}", to_json(&EquivDocument::new(w.as_ref())));
    Ok(if w.is_some() { Ok(()) } else { Err(Flagged) })
}

fn cmd_rank(path: &Path, budget: u64) -> Outcome {
    let v = read_space(path)?;
    let hist = v.rank_distribution(budget).map_err(|e| e.to_string())?;
    let rank = hist.iter().rposition(|&c| c > 0).unwrap_or(0);
    print!("{}", to_json(&RankDocument::new(rank, hist)));
    Ok(Ok(()))
}

fn cmd_census(n: usize, p: usize, order: FieldOrder, d: usize, r: usize, workers: u64, budget: u64) -> Outcome {
    let census = with_workers(workers as usize, || orbit_census_with(n, p, order, d, r, budget, parallelism(workers)))
        .map_err(|e| e.to_string())?;
    print!("{}", to_json(&CensusDocument::new(n, p, order.get(), d, r, &census)));
    Ok(Ok(()))
}

fn parallelism(workers: u64) -> Parallelism {
    if workers > 1 {
        Parallelism::Rayon
    } else {
        Parallelism::Sequential
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let workers = cli.workers;
    let outcome = match &cli.command {
        Command::Classify { path, r } => cmd_classify(path, *r, cli.budget.unwrap_or(DEFAULT_GROUP_BUDGET)),
        Command::Verify(a) => cmd_verify(a, workers, cli.budget),
        Command::Equiv { first, second } => cmd_equiv(first, second, cli.budget.unwrap_or(DEFAULT_GROUP_BUDGET)),
        Command::Rank { path } => cmd_rank(path, cli.budget.unwrap_or(DEFAULT_MEMBER_BUDGET)),
        Command::Census { n, p, order, d, r } => {
            cmd_census(*n, *p, *order, *d, *r, workers, cli.budget.unwrap_or(DEFAULT_GROUP_BUDGET))
        }
    };
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Flagged)) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
