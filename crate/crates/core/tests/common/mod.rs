#![allow(dead_code)]

pub mod invariants;
pub mod oracle;

use std::collections::BTreeMap;

use mlo_core::band::{Band, BandSet};
use mlo_core::policy::PolicyKind;
use mlo_core::topology::{compute_enabled_links, Node, Role};
use mlo_core::traffic::{Flow, FlowKind, FlowState, ScriptedActivity};
use mlo_core::{Deployment, SimConfig};

/// A station of a hand-built scenario.
#[derive(Debug, Clone)]
pub struct StaSpec {
    pub bss: usize,
    pub pos: (f64, f64),
    pub kind: FlowKind,
    pub rate: f64,
    pub on: bool,
    pub toggles: Vec<f64>,
    /// Overrides the links derived from the AP's signal.
    pub links: Option<BandSet>,
}

impl StaSpec {
    pub fn new(bss: usize, pos: (f64, f64), kind: FlowKind, rate: f64) -> Self {
        StaSpec { bss, pos, kind, rate, on: true, toggles: Vec::new(), links: None }
    }

    pub fn off(mut self) -> Self {
        self.on = false;
        self
    }

    pub fn toggles(mut self, t: &[f64]) -> Self {
        self.toggles = t.to_vec();
        self
    }

    pub fn links(mut self, bands: &[Band]) -> Self {
        self.links = Some(bands.iter().copied().collect());
        self
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub aps: Vec<((f64, f64), PolicyKind)>,
    pub stas: Vec<StaSpec>,
    pub horizon: f64,
}

impl Scenario {
    pub fn config(&self) -> SimConfig {
        SimConfig { sim_time_s: self.horizon, n_bss: self.aps.len(), ..SimConfig::default() }
    }

    pub fn deployment(&self, cfg: &SimConfig) -> Deployment {
        let node = |id, role, bss, position, tx| Node {
            node_id: id,
            role,
            bss_id: bss,
            position,
            tx_power_dbm: tx,
            noise_figure_db: cfg.noise_figure_db,
            n_spatial_streams: cfg.spatial_streams,
        };
        let mut nodes: Vec<Node> =
            self.aps.iter().enumerate().map(|(i, (p, _))| node(i, Role::Ap, i, *p, cfg.ap_tx_power_dbm)).collect();
        let mut enabled_links = BTreeMap::new();
        for s in &self.stas {
            let sta = node(nodes.len(), Role::Sta, s.bss, s.pos, cfg.sta_tx_power_dbm);
            let links = s.links.unwrap_or_else(|| compute_enabled_links(&sta, &nodes[s.bss], &cfg.bands, &cfg.phy));
            enabled_links.insert(sta.node_id, links);
            nodes.push(sta);
        }
        Deployment {
            deployment_index: 0,
            seed: 0,
            nodes,
            band_specs: cfg.bands,
            enabled_links,
            ap_policies: self.aps.iter().enumerate().map(|(i, (_, k))| (i, *k)).collect(),
            area_side: cfg.area_side_m,
        }
    }

    pub fn activity(&self) -> ScriptedActivity {
        ScriptedActivity::new(self.stas.iter().map(|s| s.toggles.clone()).collect())
    }

    pub fn flows(&self, deployment: &Deployment) -> Vec<Flow> {
        let activity = self.activity();
        deployment
            .stations()
            .zip(&self.stas)
            .enumerate()
            .map(|(i, (sta, s))| {
                let mut f = Flow::new(i, sta.node_id, sta.bss_id, s.kind, s.rate);
                f.state = if s.on { FlowState::On } else { FlowState::Off };
                f.next_toggle_time = activity.first(i);
                f
            })
            .collect()
    }

    /// Per-flow losses from the engine.
    pub fn engine_losses(&self) -> Vec<f64> {
        let cfg = self.config();
        let d = self.deployment(&cfg);
        let sim = mlo_core::Simulation::new(&d, &cfg, &mlo_core::PolicyRegistry::builtin()).unwrap();
        let mut act = self.activity();
        let r = sim.run(self.flows(&d), &mut act, None).unwrap();
        r.per_flow.iter().map(|f| f.loss()).collect()
    }
}

/// Video at `rate` Mb/s.
pub fn video(bss: usize, pos: (f64, f64), mbps: f64) -> StaSpec {
    StaSpec::new(bss, pos, FlowKind::Video, mbps * 1e6)
}

pub fn data(bss: usize, pos: (f64, f64), mbps: f64) -> StaSpec {
    StaSpec::new(bss, pos, FlowKind::Data, mbps * 1e6)
}

/// Hand-built scenarios with at most two BSSs and three flows.
///
/// AP spacing sets the contention pattern: at 10 m the APs hear each other
/// on every band, at 18 m only on 2.4 GHz and at 30 m on none. Stations
/// within about 12 m of their AP get all three links, stations 14 to 23 m
/// away only 2.4 GHz.
pub fn micro_scenarios() -> Vec<Scenario> {
    use PolicyKind::*;
    let one = |k: PolicyKind| vec![((0.0, 0.0), k)];
    let two = |k0: PolicyKind, k1: PolicyKind, gap: f64| vec![((0.0, 0.0), k0), ((gap, 0.0), k1)];
    let s = |name, aps, stas| Scenario { name, aps, stas, horizon: 10.0 };
    vec![
        s("mlsa single light flow", one(Mlsa), vec![data(0, (3.0, 0.0), 5.0)]),
        s("mlsa heavy flow on three links", one(Mlsa), vec![video(0, (8.0, 0.0), 900.0)]),
        s("slci two flows spread", one(Slci), vec![video(0, (6.0, 0.0), 150.0), video(0, (0.0, 6.0), 150.0)]),
        s(
            "slci toggles reorder bands",
            one(Slci),
            vec![
                video(0, (5.0, 0.0), 200.0).toggles(&[2.0, 5.0]),
                video(0, (0.0, 7.0), 250.0).off().toggles(&[1.0, 6.5]),
                data(0, (-9.0, 0.0), 80.0).toggles(&[3.0]),
            ],
        ),
        s("mcaa split of a heavy flow", one(Mcaa), vec![video(0, (9.0, 0.0), 700.0)]),
        s(
            "mcaa sees earlier flows",
            one(Mcaa),
            vec![
                video(0, (4.0, 0.0), 300.0),
                data(0, (0.0, 10.0), 120.0).off().toggles(&[1.5, 4.0, 7.0]),
                video(0, (-11.0, 0.0), 400.0).toggles(&[2.5]),
            ],
        ),
        s(
            "vds video pinned to 6 GHz overloads it",
            one(Vds),
            vec![video(0, (10.0, 0.0), 500.0), video(0, (0.0, 10.0), 500.0), data(0, (5.0, 5.0), 60.0)],
        ),
        s(
            "vds video falls back without 6 GHz",
            one(Vds),
            vec![video(0, (16.0, 0.0), 30.0), data(0, (3.0, 0.0), 40.0).links(&[Band::B5G, Band::B6G])],
        ),
        s("sl on 5 GHz", one(Sl), vec![video(0, (6.0, 0.0), 400.0), data(0, (0.0, 6.0), 300.0)]),
        s("sl falls back to 2.4 GHz", one(Sl), vec![data(0, (18.0, 0.0), 15.0), data(0, (0.0, 17.0), 20.0)]),
        s(
            "mbsl pins at association",
            one(Mbsl),
            vec![
                video(0, (6.0, 0.0), 300.0),
                video(0, (0.0, 6.0), 300.0).off().toggles(&[1.0, 3.0, 8.0]),
                video(0, (-6.0, 0.0), 300.0),
            ],
        ),
        s(
            "mbsl idle stations spread at association",
            one(Mbsl),
            vec![data(0, (5.0, 0.0), 400.0).off().toggles(&[2.0]), data(0, (0.0, 5.0), 400.0).off().toggles(&[2.0])],
        ),
        s(
            "two bss contend everywhere under mlsa",
            two(Mlsa, Mlsa, 10.0),
            vec![video(0, (2.0, 3.0), 600.0), video(1, (12.0, 3.0), 600.0)],
        ),
        s(
            "two bss hidden from each other",
            two(Slci, Slci, 30.0),
            vec![video(0, (2.0, 3.0), 800.0), video(1, (32.0, 3.0), 800.0), data(1, (28.0, -2.0), 300.0)],
        ),
        s(
            "two bss share only 2.4 GHz",
            two(Sl, Mlsa, 18.0),
            vec![data(0, (-15.0, 0.0), 40.0), data(1, (33.0, 0.0), 40.0), video(1, (20.0, 2.0), 200.0)],
        ),
        s(
            "slci reacts to neighbour occupancy",
            two(Slci, Mcaa, 10.0),
            vec![
                video(1, (12.0, 0.0), 500.0),
                video(0, (-3.0, 0.0), 200.0).off().toggles(&[1.0, 4.0, 6.0]),
                data(0, (0.0, -4.0), 100.0).off().toggles(&[2.0, 9.0]),
            ],
        ),
        s(
            "mcaa against slci neighbour",
            two(Mcaa, Slci, 10.0),
            vec![
                video(0, (-2.0, 2.0), 700.0).toggles(&[3.0, 5.0]),
                video(1, (11.0, 1.0), 400.0),
                data(1, (9.0, -3.0), 200.0).off().toggles(&[0.5, 2.0, 4.5, 7.5]),
            ],
        ),
        s(
            "vds against mcaa neighbour",
            two(Vds, Mcaa, 10.0),
            vec![
                video(0, (-4.0, 0.0), 400.0),
                data(0, (0.0, 4.0), 250.0),
                video(1, (14.0, 0.0), 600.0).toggles(&[5.0]),
            ],
        ),
        s(
            "mbsl pins against neighbour",
            two(Mbsl, Slci, 10.0),
            vec![
                video(1, (10.0, 5.0), 500.0).toggles(&[2.0, 3.0]),
                video(0, (0.0, 5.0), 300.0),
                data(0, (5.0, 0.0), 300.0).off().toggles(&[1.0]),
            ],
        ),
        s(
            "simultaneous toggles in id order",
            two(Slci, Slci, 10.0),
            vec![
                video(0, (3.0, 0.0), 300.0).off().toggles(&[2.0, 6.0]),
                video(0, (0.0, 3.0), 300.0).off().toggles(&[2.0, 6.0]),
                video(1, (10.0, 3.0), 300.0).off().toggles(&[2.0, 6.0]),
            ],
        ),
        s(
            "saturated 2.4 GHz clique",
            two(Mlsa, Sl, 18.0),
            vec![data(0, (-20.0, 0.0), 60.0), data(1, (38.0, 0.0), 60.0), data(0, (0.0, -19.0), 30.0).toggles(&[4.0])],
        ),
        s(
            "sl on unusable-link station idles",
            one(Sl),
            vec![data(0, (3.0, 0.0), 10.0).links(&[]), data(0, (0.0, 3.0), 10.0)],
        ),
        s(
            "all flows off",
            two(Mcaa, Slci, 10.0),
            vec![video(0, (3.0, 0.0), 300.0).off(), data(1, (12.0, 0.0), 300.0).off()],
        ),
        s(
            "flow toggling right at the horizon",
            one(Mcaa),
            vec![
                video(0, (4.0, 0.0), 900.0).toggles(&[9.999_999, 10.0]),
                data(0, (0.0, 4.0), 200.0).off().toggles(&[10.0]),
            ],
        ),
    ]
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
