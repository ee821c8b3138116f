//! Batch runner: every configured policy over `n_deployments` paired
//! deployments, with CSV output.
//!
//! Deployment `i` has the same geometry, neighbour policies and ON/OFF trace
//! under every policy; only the central AP's policy changes.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::engine::{run_indexed, DeploymentResult};
use crate::error::{Error, Result};
use crate::metrics::{aggregate_results, LossClass, SummaryRow, PERCENTILES};
use crate::policy::{PolicyKind, PolicyRegistry};
use crate::topology::generate_deployment_for_index;
use crate::traffic::spawn_flows_for_index;

pub const DEPLOYMENTS_CSV: &str = "deployments.csv";
pub const NETWORK_CSV: &str = "network.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const METADATA_FILE: &str = "metadata.txt";

#[derive(Debug, Clone)]
pub struct BatchOutput {
    /// Ordered by policy (config order), then deployment index.
    pub results: Vec<DeploymentResult>,
    pub summary: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

/// Runs all deployments for all configured policies, in memory.
pub fn simulate_batch(config: &SimConfig, registry: &PolicyRegistry) -> Result<Vec<DeploymentResult>> {
    for p in &config.policies {
        if !registry.contains(p.name()) {
            return Err(Error::UnknownPolicy { name: p.name().to_string(), available: registry.names().join(", ") });
        }
    }
    let run_index = |index: usize| -> Result<Vec<DeploymentResult>> {
        let base = generate_deployment_for_index(config, index)?;
        let flows = spawn_flows_for_index(&base, config);
        config
            .policies
            .iter()
            .map(|&p| run_indexed(&base.with_central_policy(p), flows.clone(), config, registry))
            .collect()
    };
    let per_index: Vec<Vec<DeploymentResult>> = if config.workers == 1 {
        (0..config.n_deployments).map(run_index).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..config.n_deployments).into_par_iter().map(run_index).collect::<Result<_>>())?
    };

    let mut results = Vec::with_capacity(per_index.len() * config.policies.len());
    for k in 0..config.policies.len() {
        results.extend(per_index.iter().map(|rs| rs[k].clone()));
    }
    Ok(results)
}

/// Simulates the batch and writes `deployments.csv`, `network.csv`,
/// `summary.csv` and `metadata.txt` into `config.out_dir`.
pub fn run_batch(config: &SimConfig, registry: &PolicyRegistry) -> Result<BatchOutput> {
    let results = simulate_batch(config, registry)?;
    let summary = aggregate_results(&results);
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = vec![dir.join(DEPLOYMENTS_CSV), dir.join(NETWORK_CSV), dir.join(SUMMARY_CSV), dir.join(METADATA_FILE)];
    write_deployments_csv(&files[0], &results, false)?;
    write_deployments_csv(&files[1], &results, true)?;
    write_summary_csv(&files[2], &summary)?;
    fs::write(&files[3], metadata_text(config)).map_err(|e| Error::io(&files[3], e))?;
    Ok(BatchOutput { results, summary, files })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One row per (deployment, policy, flow class). `network` selects the
/// all-BSS diagnostics instead of the central-BSS losses.
pub fn write_deployments_csv(path: &Path, results: &[DeploymentResult], network: bool) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["deployment_index", "policy", "flow_kind", "avg_loss", "n_flows", "seed"])?;
    for r in results {
        for class in LossClass::ALL {
            let (loss, n) = if network {
                let loss = match class {
                    LossClass::Video => r.network_loss_video,
                    LossClass::Data => r.network_loss_data,
                    LossClass::All => r.network_loss_all,
                };
                let n = r.per_flow.iter().filter(|f| class.kind().is_none_or(|k| f.kind == k)).count();
                (loss, n)
            } else {
                (r.loss(class.kind()), r.central_flow_count(class.kind()))
            };
            w.write_record([
                r.deployment_index.to_string(),
                r.policy.name().to_string(),
                class.name().to_string(),
                fmt_opt(loss),
                n.to_string(),
                r.seed.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["policy".to_string(), "flow_kind".to_string()];
    header.extend(PERCENTILES.iter().map(|p| format!("p{p}")));
    header.push("frac_below_5pct".into());
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.policy.name().to_string(), row.class.name().to_string()];
        rec.extend(row.percentiles.iter().map(|p| fmt_opt(*p)));
        rec.push(row.frac_below_5pct.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Recomputes the percentile summary from a `deployments.csv` file.
pub fn summary_from_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut results: Vec<DeploymentResult> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |what: &str| Error::Domain(format!("{}: bad {what} in row {:?}", path.display(), rec));
        let index: usize = field(0).parse().map_err(|_| bad("deployment_index"))?;
        let policy: PolicyKind = field(1).parse().map_err(|_| bad("policy"))?;
        let class: LossClass = field(2).parse().map_err(|_| bad("flow_kind"))?;
        let loss: Option<f64> = match field(3) {
            "" => None,
            s => Some(s.parse().map_err(|_| bad("avg_loss"))?),
        };
        let seed: u64 = field(5).parse().map_err(|_| bad("seed"))?;
        let pos = results.iter().rposition(|r| r.deployment_index == index && r.policy == policy);
        let r = match pos {
            Some(i) => &mut results[i],
            None => {
                results.push(DeploymentResult {
                    deployment_index: index,
                    policy,
                    seed,
                    per_flow: Vec::new(),
                    avg_loss_video: None,
                    avg_loss_data: None,
                    avg_loss_all: None,
                    network_loss_video: None,
                    network_loss_data: None,
                    network_loss_all: None,
                });
                results.last_mut().expect("just pushed")
            }
        };
        match class {
            LossClass::Video => r.avg_loss_video = loss,
            LossClass::Data => r.avg_loss_data = loss,
            LossClass::All => r.avg_loss_all = loss,
        }
    }
    Ok(aggregate_results(&results))
}

/// Config echo plus the modelling choices needed to interpret the output.
pub fn metadata_text(config: &SimConfig) -> String {
    let mut out = String::new();
    out.push_str("# mlo-sim run metadata\n");
    out.push_str("# percentile_method: nearest-rank\n");
    out.push_str("# pairing: deployment i shares geometry, neighbour policies and ON/OFF trace across policies\n");
    out.push_str("# measured_bss: central BSS (index 0); network.csv covers every BSS\n");
    out.push_str("# avg_loss: unweighted mean of per-flow loss ratios (not summed delivered / summed offered)\n");
    out.push_str("# compliance: every present flow class below 5% average loss\n");
    out.push_str(&format!("# placement_radius_resolved_m: {}\n", config.placement_radius()));
    out.push_str("# path_loss: L0 + 20log10(f/2.4) + 10*n_near*log10(min(d,bp)) + [d>bp]*10*n_far*log10(d/bp) + wall[band]*d/spacing\n");
    out.push_str("# mcs_table (min_snr_db: rate Mb/s per stream at 20/40/80 MHz):\n");
    for row in config.phy.mcs_table.rows() {
        out.push_str(&format!(
            "#   {}: {} / {} / {}\n",
            row.min_snr_db, row.rate_mbps[0], row.rate_mbps[1], row.rate_mbps[2]
        ));
    }
    out.push_str(&config.to_text());
    out
}
