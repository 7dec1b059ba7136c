//! `bloomclock` command line: run broadcast simulations and evaluate the
//! false-positive rate formula.
//!
//! `simulate` writes three files into `--out-dir`: `manifest.json` (the
//! exact configuration, written first and atomically, enough to reproduce
//! the run), `pairs.csv` (a capped sample of classified event pairs) and
//! `metrics.json` (the aggregated cross-tabulation). Identical flags produce
//! byte-identical outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use bloomclock::{
    fp_rate_for_sums, montecarlo_overlap, pair_rows, run_simulation, DelayModel, SimConfig,
};

#[derive(Parser)]
#[command(name = "bloomclock", version, about = "Bloom clock simulation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a deterministic broadcast simulation and export metrics.
    Simulate(SimulateArgs),
    /// Evaluate the false-positive rate for a pair of increment sums.
    Fpr(FprArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of nodes (at least 2).
    #[arg(long, default_value_t = 4)]
    nodes: usize,

    /// Counters per bloom clock.
    #[arg(long, default_value_t = 64)]
    m: usize,

    /// Hash functions per event.
    #[arg(long, default_value_t = 2)]
    k: usize,

    /// Internal events to schedule across the nodes.
    #[arg(long, default_value_t = 1000)]
    events: usize,

    /// Per-(message, recipient) loss probability.
    #[arg(long, default_value_t = 0.0)]
    drop: f64,

    /// Delivery delay in abstract ticks: `fixed:N` or `uniform:LO..HI`.
    #[arg(long, default_value = "uniform:5..50", value_parser = parse_delay)]
    delay: DelayModel,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Acceptance threshold for predicted false-positive rates.
    #[arg(long, default_value_t = 0.1)]
    fp_threshold: f64,

    /// Keep at most this many entries per node history.
    #[arg(long)]
    history_cap: Option<usize>,

    /// Directory for manifest.json, metrics.json and pairs.csv.
    #[arg(long)]
    out_dir: PathBuf,

    /// Maximum number of rows sampled into pairs.csv.
    #[arg(long, default_value_t = 10_000)]
    pairs_cap: usize,
}

#[derive(Args)]
struct FprArgs {
    /// Counters per bloom clock.
    #[arg(long)]
    m: usize,

    /// Total increments of the dominated clock.
    #[arg(long)]
    a_sum: u64,

    /// Total increments of the dominating clock (at least a_sum).
    #[arg(long)]
    b_sum: u64,

    /// Also estimate the dominance probability by Monte Carlo with this
    /// many trials.
    #[arg(long, value_name = "TRIALS")]
    montecarlo: Option<u64>,

    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_delay(s: &str) -> Result<DelayModel, String> {
    if let Some(v) = s.strip_prefix("fixed:") {
        let ticks = v
            .parse()
            .map_err(|e| format!("bad fixed delay {v:?}: {e}"))?;
        return Ok(DelayModel::Fixed(ticks));
    }
    if let Some(range) = s.strip_prefix("uniform:") {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| format!("bad uniform delay {range:?}, want LO..HI"))?;
        let min = lo
            .parse()
            .map_err(|e| format!("bad uniform delay low bound {lo:?}: {e}"))?;
        let max = hi
            .parse()
            .map_err(|e| format!("bad uniform delay high bound {hi:?}: {e}"))?;
        return Ok(DelayModel::Uniform { min, max });
    }
    Err(format!("bad delay {s:?}, want fixed:N or uniform:LO..HI"))
}

#[derive(serde::Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    version: &'a str,
    config: &'a SimConfig,
    pairs_cap: usize,
    outputs: ManifestOutputs<'a>,
}

#[derive(serde::Serialize)]
struct ManifestOutputs<'a> {
    manifest: &'a str,
    metrics: &'a str,
    pairs: &'a str,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn float_cell(v: f64) -> String {
    // Shortest round-trippable form; stable across runs.
    format!("{v}")
}

fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let config = SimConfig {
        n_nodes: args.nodes,
        m: args.m,
        k: args.k,
        n_events: args.events,
        drop_rate: args.drop,
        delay: args.delay,
        seed: args.seed,
        fp_threshold: args.fp_threshold,
        history_cap: args.history_cap,
    };
    config.validate()?;

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    // The manifest goes first so a run is reproducible even if later
    // outputs are interrupted.
    let manifest = Manifest {
        schema_version: 1,
        version: env!("CARGO_PKG_VERSION"),
        config: &config,
        pairs_cap: args.pairs_cap,
        outputs: ManifestOutputs {
            manifest: "manifest.json",
            metrics: "metrics.json",
            pairs: "pairs.csv",
        },
    };
    let mut manifest_json = serde_json::to_vec_pretty(&manifest)?;
    manifest_json.push(b'\n');
    write_atomic(&args.out_dir.join("manifest.json"), &manifest_json)?;

    let run = run_simulation(&config)?;

    let mut csv =
        String::from("t_i_a,t_i_b,ground_truth,bloom_verdict,delta_sum,fp_predicted,accepted\n");
    for row in pair_rows(&run.records, config.fp_threshold, args.pairs_cap)? {
        let fp = row.fp_predicted.map(float_cell).unwrap_or_default();
        let accepted = row.accepted.map(|a| a.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.t_a, row.t_b, row.ground_truth, row.bloom_verdict, row.delta_sum, fp, accepted
        ));
    }
    write_atomic(&args.out_dir.join("pairs.csv"), csv.as_bytes())?;

    let mut metrics_json = serde_json::to_vec_pretty(&run.metrics)?;
    metrics_json.push(b'\n');
    write_atomic(&args.out_dir.join("metrics.json"), &metrics_json)?;

    println!(
        "events={} pairs={} comparable={} empirical_fp_rate={} false_negatives={}",
        run.metrics.events,
        run.metrics.pairs_total,
        run.metrics.comparable_pairs,
        float_cell(run.metrics.empirical_fp_rate),
        run.metrics.false_negative_count,
    );

    if run.metrics.false_negative_count != 0 {
        bail!(
            "{} ground-truth-ordered pairs were judged concurrent; this is structurally \
             impossible and indicates a defect",
            run.metrics.false_negative_count
        );
    }
    Ok(())
}

fn cmd_fpr(args: &FprArgs) -> anyhow::Result<()> {
    if args.m == 0 {
        bail!("need m >= 1 counters");
    }
    let rate = fp_rate_for_sums(args.m, args.a_sum, args.b_sum)?;
    println!("fp_rate = {rate:.4}");
    if let Some(trials) = args.montecarlo {
        let est = montecarlo_overlap(args.m, args.a_sum, args.b_sum, trials, args.seed)?;
        println!(
            "montecarlo = {} (std_err {:.6}, trials {})",
            float_cell(est.mean),
            est.std_err,
            est.trials
        );
        println!("discrepancy = {}", float_cell(rate - est.mean));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fpr(args) => cmd_fpr(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
