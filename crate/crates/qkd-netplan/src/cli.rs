//! Command-line front end.
//!
//! Subcommands: `link-rate` (per-link rate table), `plan` (switch placement
//! and cheapest device assignment), `sweep` (secret rate over signal
//! intensity), `block-qber` (block-wise QBER of measured key files).
//!
//! Exit codes: 0 on success, 1 on domain errors (infeasible plan, link with
//! no secret key), 2 on I/O or parse errors.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::backbone::plan;
use crate::blocks::block_qber;
use crate::device::{load_candidates, optimize, sweep_mu, SweepPoint};
use crate::error::{Error, Result};
use crate::model::QberOptions;
use crate::netfile::NetworkFile;
use crate::report::{
    block_qber_csv, block_qber_table, link_rate_csv, link_rate_table, plan_csv, plan_table,
    sweep_csv, OutputFormat,
};

#[derive(Debug, Parser)]
#[command(
    name = "qkd-netplan",
    version,
    about = "Key-rate modelling and switch placement planning for BB84 backbone networks"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute sifted rate, QBER and secret rate for every link of a network file
    LinkRate(LinkRateArgs),
    /// Optimize switch placement and report the cheapest implementations
    Plan(PlanArgs),
    /// Sweep the secret rate over the signal intensity, optionally with detector candidates
    Sweep(SweepArgs),
    /// Compute block-wise QBER from two measured key files
    BlockQber(BlockQberArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => OutputFormat::Table,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Write the report here instead of stdout ("-" for stdout)
    #[arg(long, default_value = "-")]
    output: String,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct LinkRateArgs {
    /// Network description file
    #[arg(long)]
    input: PathBuf,
    /// Restrict the report to one link (1-based index, "From-To" or "From")
    #[arg(long)]
    link: Option<String>,
    /// Count only half of the dark counts as errors
    #[arg(long)]
    dark_half_credit: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Network description file
    #[arg(long)]
    input: PathBuf,
    /// Plan exactly this many switches (overrides the file constraints)
    #[arg(long)]
    switches: Option<usize>,
    /// Plan an inclusive range of switch counts, e.g. "0..6"
    #[arg(long, value_name = "LO..HI", conflicts_with = "switches")]
    switch_range: Option<String>,
    /// Fraction of cluster rate lost to switching, in [0, 1)
    #[arg(long, default_value_t = 0.0)]
    switch_overhead: f64,
    /// Count only half of the dark counts as errors
    #[arg(long)]
    dark_half_credit: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Network description file
    #[arg(long)]
    input: PathBuf,
    /// Link whose parameters feed the sweep (1-based index, "From-To" or "From")
    #[arg(long)]
    link: Option<String>,
    /// Detector candidate file (CSV: eta_det,tau_dead_us,dcr_hz,label)
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Lowest signal intensity of the sweep
    #[arg(long, default_value_t = 0.01)]
    mu_min: f64,
    /// Highest signal intensity of the sweep
    #[arg(long, default_value_t = 1.5)]
    mu_max: f64,
    /// Intensity grid step
    #[arg(long, default_value_t = 0.01)]
    mu_step: f64,
    /// Count only half of the dark counts as errors
    #[arg(long)]
    dark_half_credit: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct BlockQberArgs {
    /// First party's sifted key bytes
    #[arg(long)]
    alice: PathBuf,
    /// Second party's sifted key bytes
    #[arg(long)]
    bob: PathBuf,
    /// Block length in bytes
    #[arg(long, default_value_t = 5000)]
    block_size: usize,
    #[command(flatten)]
    common: CommonArgs,
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path too
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) => 1,
                _ => 2,
            }
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::LinkRate(args) => run_link_rate(args),
        Command::Plan(args) => run_plan(args),
        Command::Sweep(args) => run_sweep(args),
        Command::BlockQber(args) => run_block_qber(args),
    }
}

fn qber_options(dark_half_credit: bool) -> QberOptions {
    QberOptions {
        dark_half_credit,
        total_click_denominator: false,
    }
}

fn write_output(target: &str, content: &str) -> Result<()> {
    if target == "-" {
        std::io::stdout().write_all(content.as_bytes())?;
    } else {
        std::fs::write(target, content)?;
    }
    Ok(())
}

fn run_link_rate(args: LinkRateArgs) -> Result<i32> {
    let file = NetworkFile::load(&args.input)?;
    let mut rows = file.evaluate_links(qber_options(args.dark_half_credit))?;
    if let Some(selector) = &args.link {
        let index = file.find_link(selector)?;
        rows = vec![rows.swap_remove(index)];
    }
    let report = match args.common.format.into() {
        OutputFormat::Table => link_rate_table(&rows),
        OutputFormat::Csv => link_rate_csv(&rows),
    };
    write_output(&args.common.output, &report)?;
    let mut code = 0;
    for row in &rows {
        if row.insecure {
            eprintln!(
                "warning: link {} -> {} yields no secret key",
                row.from, row.to
            );
            code = 1;
        }
    }
    Ok(code)
}

fn parse_switch_range(text: &str) -> Result<(usize, usize)> {
    let (lo, hi) = text.split_once("..").ok_or_else(|| {
        Error::invalid(format!("switch range must look like LO..HI, got '{text}'"))
    })?;
    let lo = lo
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::invalid(format!("switch range: {e}")))?;
    let hi = hi
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::invalid(format!("switch range: {e}")))?;
    if lo > hi {
        return Err(Error::invalid("switch range must be non-empty"));
    }
    Ok((lo, hi))
}

fn run_plan(args: PlanArgs) -> Result<i32> {
    let file = NetworkFile::load(&args.input)?;
    let net = file.network_spec(qber_options(args.dark_half_credit))?;
    let costs = file.cost_model();
    let locks = file.locked_indices();

    let (lo, hi) = if let Some(k) = args.switches {
        (k, k)
    } else if let Some(range) = &args.switch_range {
        parse_switch_range(range)?
    } else if let Some(range) = file.switch_range() {
        range
    } else {
        // every feasible switch count, honoring locked nodes
        (0, net.trusted_nodes() - locks.len())
    };

    let report = plan(&net, &costs, lo..=hi, &locks, args.switch_overhead)?;
    let rendered = match args.common.format.into() {
        OutputFormat::Table => plan_table(&report),
        OutputFormat::Csv => plan_csv(&report),
    };
    write_output(&args.common.output, &rendered)?;
    Ok(0)
}

fn run_sweep(args: SweepArgs) -> Result<i32> {
    let file = NetworkFile::load(&args.input)?;
    let index = match &args.link {
        Some(selector) => file.find_link(selector)?,
        None if file.links.len() == 1 => 0,
        None => {
            return Err(Error::domain(
                "network has several links; select one with --link",
            ))
        }
    };
    let (det, budget) = file.physical_link(index)?;
    let protocol = file.protocol_config()?;
    let opts = qber_options(args.dark_half_credit);

    if !(args.mu_min > 0.0 && args.mu_min <= args.mu_max && args.mu_step > 0.0) {
        return Err(Error::invalid("intensity grid bounds are inconsistent"));
    }
    let mut grid = Vec::new();
    let mut mu = args.mu_min;
    while mu <= args.mu_max + 1e-12 {
        grid.push(mu);
        mu += args.mu_step;
    }

    let sweep: Vec<SweepPoint> = match &args.candidates {
        Some(path) => {
            let candidates = load_candidates(path)?;
            optimize(&det, &candidates, &budget, &protocol, &grid, opts)?.sweep
        }
        None => sweep_mu(&det, &budget, &protocol, &grid, opts)?
            .into_iter()
            .map(|(mu, r)| SweepPoint {
                mu,
                r_sec_fixed: r,
                r_sec_optimized: r,
            })
            .collect(),
    };
    let rendered = sweep_csv(&sweep, args.candidates.is_some());
    write_output(&args.common.output, &rendered)?;
    Ok(0)
}

fn run_block_qber(args: BlockQberArgs) -> Result<i32> {
    let alice = std::fs::read(&args.alice)?;
    let bob = std::fs::read(&args.bob)?;
    let series = block_qber(&alice, &bob, args.block_size)?;
    let rendered = match args.common.format.into() {
        OutputFormat::Table => block_qber_table(&series),
        OutputFormat::Csv => block_qber_csv(&series),
    };
    write_output(&args.common.output, &rendered)?;
    Ok(0)
}
