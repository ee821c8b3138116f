//! Observer that checks run invariants on every constant-state interval.

use mlo_core::band::{Band, BandSet};
use mlo_core::engine::IntervalView;
use mlo_core::policy::PolicyKind;
use mlo_core::{Deployment, FlowKind, Observer};

pub const FEASIBILITY_TOL: f64 = 1e-9;

pub struct InvariantChecker {
    /// Policy of each AP.
    policies: Vec<PolicyKind>,
    /// Enabled links per flow.
    enabled: Vec<BandSet>,
    /// First band used by each flow of a single-band policy.
    fixed_band: Vec<Option<Band>>,
    pub intervals: usize,
    pub violations: Vec<String>,
}

impl InvariantChecker {
    pub fn new(d: &Deployment) -> Self {
        let policies = (0..d.n_aps()).map(|ap| d.ap_policies[&ap]).collect();
        let enabled: Vec<BandSet> = d.stations().map(|s| d.enabled(s.node_id)).collect();
        InvariantChecker {
            policies,
            fixed_band: vec![None; enabled.len()],
            enabled,
            intervals: 0,
            violations: Vec::new(),
        }
    }

    fn fail(&mut self, t: f64, msg: String) {
        if self.violations.len() < 20 {
            self.violations.push(format!("t={t}: {msg}"));
        }
    }
}

/// Every subset of APs that is a clique of `adjacent`.
fn cliques(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    assert!(n <= 16, "brute force limited to 16 APs");
    (1u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s| s.iter().all(|&a| s.iter().all(|&b| a == b || adjacent(a, b))))
        .collect()
}

impl Observer for InvariantChecker {
    fn on_interval(&mut self, v: &IntervalView<'_>) {
        self.intervals += 1;
        let net = v.network;
        for b in 0..3 {
            let g = &net.graphs[b];
            for c in cliques(net.n_aps, |x, y| g.adjacent(x, y)) {
                let sum: f64 = c.iter().map(|&ap| v.served[b][ap]).sum();
                if sum > 1.0 + FEASIBILITY_TOL {
                    self.fail(v.start, format!("band {b} clique {c:?} airtime {sum}"));
                }
            }
            for ap in 0..net.n_aps {
                let (s, d) = (v.served[b][ap], v.demand[b][ap]);
                if s < 0.0 || s > d * (1.0 + 1e-12) {
                    self.fail(v.start, format!("band {b} ap {ap} served {s} of demand {d}"));
                }
            }
        }
        for f in v.flows {
            if f.delivered_bits > f.offered_bits {
                self.fail(
                    v.start,
                    format!("flow {} delivered {} > offered {}", f.flow_id, f.delivered_bits, f.offered_bits),
                );
            }
            let a = f.allocation;
            let usable = net.usable[f.flow_id];
            if !f.is_on() || usable.is_empty() {
                if !a.is_empty() {
                    self.fail(v.start, format!("idle flow {} holds {:?}", f.flow_id, a));
                }
                continue;
            }
            if (a.total() - 1.0).abs() > 1e-9 || a.0.iter().any(|&x| x < 0.0) {
                self.fail(v.start, format!("flow {} allocation {:?}", f.flow_id, a));
            }
            if !a.support().is_subset(usable) {
                self.fail(v.start, format!("flow {} uses unusable links {:?}", f.flow_id, a));
            }
            let policy = self.policies[f.bss_id];
            if policy.is_single_link() && a.support().len() != 1 {
                self.fail(v.start, format!("{policy} flow {} split {:?}", f.flow_id, a));
            }
            if matches!(policy, PolicyKind::Sl | PolicyKind::Mbsl) {
                let band = a.single_band();
                match self.fixed_band[f.flow_id] {
                    None => self.fixed_band[f.flow_id] = band,
                    Some(prev) if Some(prev) != band => {
                        self.fail(v.start, format!("{policy} flow {} moved from {prev:?} to {band:?}", f.flow_id))
                    }
                    _ => {}
                }
            }
            if policy == PolicyKind::Vds
                && f.kind == FlowKind::Video
                && self.enabled[f.flow_id].contains(Band::B6G)
                && a.single_band() != Some(Band::B6G)
            {
                self.fail(v.start, format!("vds video flow {} off 6 GHz: {:?}", f.flow_id, a));
            }
        }
    }
}
