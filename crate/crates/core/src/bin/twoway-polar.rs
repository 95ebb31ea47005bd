//! Command-line front end: construction, single sessions, sweeps and
//! small-length exact checks.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use twoway_polar::channel::ChannelParams;
use twoway_polar::construction::{
    build_profiles, construct, exact_mac_profile_oracle, make_path, strong_sets, ConstructionParams, FrozenPolicy,
    ProfileSet, Scheme, DEFAULT_MC_TRIALS,
};
use twoway_polar::error::{Error, Result};
use twoway_polar::eval::bounds::leakage_upper_bound;
use twoway_polar::eval::leakage::exact_leakage;
use twoway_polar::eval::sweep::{sweep_csv, PathParam, SweepGrid};
use twoway_polar::session::{run_session, SessionConfig};

#[derive(Parser)]
#[command(
    name = "twoway-polar",
    version,
    about = "Polar-coded cooperative jamming over the two-way wiretap channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the reliability profiles, partition and rates as JSON.
    Construct(PointArgs),
    /// Run one session and emit its transcript as JSON.
    Simulate(SimulateArgs),
    /// Evaluate a grid and emit CSV.
    Sweep(SweepArgs),
    /// Exhaustive checks at N <= 4.
    Oracle(PointArgs),
}

#[derive(Args, Clone)]
struct ChannelArgs {
    #[arg(long, default_value_t = 0.2)]
    eps1: f64,
    #[arg(long, default_value_t = 0.3)]
    eps2: f64,
    #[arg(long, default_value_t = 0.4)]
    epse: f64,
    #[arg(long, default_value = "strong")]
    scheme: String,
    /// Monte-Carlo trials for Eve's profile on non-corner paths.
    #[arg(long, default_value_t = DEFAULT_MC_TRIALS)]
    mc_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ChannelArgs {
    fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.eps1, self.eps2, self.epse)
    }

    fn scheme(&self) -> Result<Scheme> {
        self.scheme.parse()
    }
}

#[derive(Args, Clone)]
struct PointArgs {
    #[command(flatten)]
    common: ChannelArgs,
    #[arg(long, default_value_t = 10)]
    n: u32,
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Corner parameter: an integer, N, or a fraction a/b of N.
    #[arg(long, default_value = "N")]
    path_i: String,
}

impl PointArgs {
    fn params(&self) -> Result<ConstructionParams> {
        let i = self.path_i.parse::<PathParam>()?.resolve(self.n)?;
        ConstructionParams::new(self.n, self.beta, self.common.channel()?, make_path(i, self.n)?)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    point: PointArgs,
    /// reuse or fresh.
    #[arg(long, default_value = "reuse")]
    frozen: String,
    /// Also write the transcript to this file.
    #[arg(long)]
    dump_transcript: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ChannelArgs,
    #[arg(long, value_delimiter = ',', default_value = "8,10,12")]
    n: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "N")]
    path_i: Vec<String>,
    /// Sessions per point for the empirical block error rate.
    #[arg(long, default_value_t = 0)]
    trials: u64,
    /// Record per-point wall time.
    #[arg(long)]
    timing: bool,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("writing output: {e}"));
    match out {
        Some(p) => fs::write(p, text).map_err(io),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes()).map_err(io)?;
            if !text.ends_with('\n') {
                s.write_all(b"\n").map_err(io)?;
            }
            Ok(())
        }
    }
}

fn frozen_policy(s: &str) -> Result<FrozenPolicy> {
    match s {
        "reuse" => Ok(FrozenPolicy::Reuse),
        "fresh" => Ok(FrozenPolicy::Fresh),
        other => Err(Error::InvalidInput(format!("unknown frozen policy {other:?}"))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Construct(a) => {
            let c = construct(&a.params()?, a.common.scheme()?, a.m, a.common.mc_trials, a.common.seed)?;
            emit(&a.common.out, &c.to_json())
        }
        Command::Simulate(a) => {
            let p = &a.point;
            let mut cfg = SessionConfig::new(p.params()?, p.m, p.common.seed);
            cfg.scheme = p.common.scheme()?;
            cfg.frozen_policy = frozen_policy(&a.frozen)?;
            cfg.mc_trials = p.common.mc_trials;
            let t = run_session(&cfg)?;
            let text = t.to_json();
            if let Some(path) = &a.dump_transcript {
                fs::write(path, &text).map_err(|e| Error::InvalidInput(format!("writing transcript: {e}")))?;
            }
            emit(&p.common.out, &text)
        }
        Command::Sweep(a) => {
            let mut grid = SweepGrid::new(a.common.channel()?);
            grid.ns = a.n;
            grid.betas = a.beta;
            grid.ms = a.m;
            grid.paths = a.path_i.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            grid.trials = a.trials;
            grid.scheme = a.common.scheme()?;
            grid.mc_trials = a.common.mc_trials;
            grid.seed = a.common.seed;
            grid.timing = a.timing;
            emit(&a.common.out, &sweep_csv(&grid)?)
        }
        Command::Oracle(a) => {
            let params = a.params()?;
            let epse = params.channel.epse;
            let mac = exact_mac_profile_oracle(&params.path, epse)?;
            let built = build_profiles(&params, a.common.mc_trials, a.common.seed)?;
            let profiles = ProfileSet {
                eve: mac.clone(),
                ..built.clone()
            };
            let sets = strong_sets(&params, &profiles)?;
            let bound = leakage_upper_bound(&mac, &params.path, &sets, a.m)?;
            let exact = exact_leakage(&sets, epse, a.m, FrozenPolicy::Reuse)?;
            let doc = json!({
                "path": params.path.to_string(),
                "eve_profile_exact": mac.z,
                "eve_profile_construction": built.eve.z,
                "eve_profile_kind": built.eve.kind,
                "leakage_exact": exact,
                "leakage_bound": bound,
            });
            emit(&a.common.out, &serde_json::to_string_pretty(&doc).expect("json"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
