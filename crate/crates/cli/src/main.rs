use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use mlo_core::batch;
use mlo_core::metrics::SummaryRow;
use mlo_core::{PolicyRegistry, SimConfig};

/// Simulate multi-link traffic allocation policies over random deployments.
#[derive(Debug, Parser)]
#[command(name = "mlo-sim", version)]
struct Args {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated policies: mlsa, slci, mcaa, vds, sl, mbsl.
    #[arg(long)]
    policy: Option<String>,
    /// Number of deployments per policy.
    #[arg(long)]
    deployments: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    stations_per_bss: Option<usize>,
    /// Video flow rate in Mb/s.
    #[arg(long)]
    video_rate: Option<f64>,
    /// Data flow rate in Mb/s.
    #[arg(long)]
    data_rate: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long)]
    workers: Option<usize>,
    /// Print the percentile summary to stdout.
    #[arg(long)]
    emit_summary: bool,
    /// Any other config key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

impl Args {
    /// Flag values as config overrides, applied after the config file.
    fn overrides(&self) -> anyhow::Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for kv in &self.set {
            let (k, v) = kv.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        push("policies", self.policy.clone());
        push("n_deployments", self.deployments.map(|v| v.to_string()));
        push("base_seed", self.seed.map(|v| v.to_string()));
        push("stations_per_bss", self.stations_per_bss.map(|v| v.to_string()));
        push("video_rate_mbps", self.video_rate.map(|v| v.to_string()));
        push("data_rate_mbps", self.data_rate.map(|v| v.to_string()));
        push("out_dir", self.out.as_ref().map(|p| p.display().to_string()));
        push("workers", self.workers.map(|v| v.to_string()));
        if self.emit_summary {
            push("emit_summary", Some("true".into()));
        }
        Ok(out)
    }
}

fn print_summary(rows: &[SummaryRow]) {
    println!(
        "{:<6} {:<6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10}",
        "policy", "class", "p5", "p25", "p50", "p75", "p95", "below5%"
    );
    for row in rows {
        let cells: Vec<String> =
            row.percentiles.iter().map(|p| p.map_or("-".to_string(), |v| format!("{:.2}%", v * 100.0))).collect();
        println!(
            "{:<6} {:<6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9.1}%",
            row.policy.name(),
            row.class.name(),
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            cells[4],
            row.frac_below_5pct * 100.0
        );
    }
}

fn run() -> anyhow::Result<()> {
    let args = Args::parse();
    let config = SimConfig::load(args.config.as_deref(), &args.overrides()?).context("invalid configuration")?;
    if args.print_config {
        print!("{}", config.to_text());
        return Ok(());
    }
    let registry = PolicyRegistry::builtin();
    let output = batch::run_batch(&config, &registry).context("batch run failed")?;
    if config.emit_summary {
        print_summary(&output.summary);
    }
    for f in &output.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
