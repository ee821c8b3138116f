//! Discrete-event simulation of one deployment.
//!
//! Between two consecutive ON/OFF toggles every flow's allocation, every
//! link's airtime demand and every AP's served share are constant, so bits
//! are integrated exactly over each interval. Allocations are recomputed
//! only when a flow turns ON.

use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::band::{Band, BandSet};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::mac::{self, share_airtime_into};
use crate::metrics::{flow_loss, mean};
use crate::phy::{self, ContentionGraph};
use crate::policy::{
    occupancy, Allocation, AllocationPolicy, AssociationRequest, FlowRequest, PolicyKind, PolicyRegistry,
};
use crate::topology::{Deployment, CENTRAL_BSS};
use crate::traffic::{ActivitySource, Flow, FlowKind, FlowState, MarkovActivity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowOutcome {
    pub flow_id: usize,
    pub sta_id: usize,
    pub bss_id: usize,
    pub kind: FlowKind,
    pub offered_bits: f64,
    pub delivered_bits: f64,
}

impl FlowOutcome {
    pub fn loss(&self) -> f64 {
        flow_loss(self.offered_bits, self.delivered_bits).expect("engine keeps delivered <= offered")
    }
}

/// Per-deployment metrics. Losses are unweighted means of per-flow loss
/// ratios; `None` when there is no flow of that kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentResult {
    pub deployment_index: usize,
    pub policy: PolicyKind,
    pub seed: u64,
    pub per_flow: Vec<FlowOutcome>,
    /// Central BSS only.
    pub avg_loss_video: Option<f64>,
    pub avg_loss_data: Option<f64>,
    pub avg_loss_all: Option<f64>,
    /// Every BSS, for diagnostics.
    pub network_loss_video: Option<f64>,
    pub network_loss_data: Option<f64>,
    pub network_loss_all: Option<f64>,
}

impl DeploymentResult {
    pub fn loss(&self, kind: Option<FlowKind>) -> Option<f64> {
        match kind {
            Some(FlowKind::Video) => self.avg_loss_video,
            Some(FlowKind::Data) => self.avg_loss_data,
            None => self.avg_loss_all,
        }
    }

    pub fn central_flow_count(&self, kind: Option<FlowKind>) -> usize {
        self.per_flow.iter().filter(|f| f.bss_id == CENTRAL_BSS && kind.is_none_or(|k| f.kind == k)).count()
    }
}

/// Static radio picture of a deployment: per-station link goodputs and the
/// per-band carrier-sense graphs between APs.
#[derive(Debug, Clone)]
pub struct Network {
    pub n_aps: usize,
    /// Indexed by station node id minus the number of APs, i.e. flow id.
    pub goodput: Vec<[f64; 3]>,
    /// Enabled links with a nonzero PHY rate.
    pub usable: Vec<BandSet>,
    pub sta_bss: Vec<usize>,
    pub graphs: [ContentionGraph; 3],
    pub cliques: [Vec<Vec<usize>>; 3],
}

impl Network {
    pub fn build(deployment: &Deployment, config: &SimConfig) -> Result<Network> {
        let aps: Vec<_> = deployment.aps().collect();
        let n_aps = aps.len();
        let mut goodput = Vec::new();
        let mut usable = Vec::new();
        let mut sta_bss = Vec::new();
        for sta in deployment.stations() {
            let ap = deployment.ap(sta.bss_id);
            let d = phy::distance(sta.position, ap.position).max(config.phy.min_distance_m);
            let enabled = deployment.enabled(sta.node_id);
            let mut g = [0.0; 3];
            let mut ok = BandSet::EMPTY;
            for band in enabled.iter() {
                let spec = deployment.band_spec(band);
                let rx = phy::rx_power(ap.tx_power_dbm, d, spec, &config.phy)?;
                let snr = phy::snr(rx, spec.bandwidth_mhz, sta.noise_figure_db, config.phy.noise_floor_dbm_hz);
                let nss = ap.n_spatial_streams.min(sta.n_spatial_streams);
                let rate = phy::select_rate(snr, spec, nss, &config.phy);
                if rate > 0.0 {
                    g[band.index()] = mac::effective_throughput(rate, &config.mac)?;
                    ok.insert(band);
                }
            }
            goodput.push(g);
            usable.push(ok);
            sta_bss.push(sta.bss_id);
        }
        let positions: Vec<_> = aps.iter().map(|a| (a.position, a.tx_power_dbm)).collect();
        let graphs = Band::ALL.map(|b| ContentionGraph::from_aps(&positions, deployment.band_spec(b), &config.phy));
        let cliques = [0, 1, 2].map(|i| graphs[i].maximal_cliques());
        Ok(Network { n_aps, goodput, usable, sta_bss, graphs, cliques })
    }
}

/// What an [`Observer`] sees for each constant-state interval.
pub struct IntervalView<'a> {
    pub start: f64,
    pub end: f64,
    pub flows: &'a [Flow],
    /// `demand[band][ap]`: airtime requested by the AP's allocated flows.
    pub demand: &'a [Vec<f64>; 3],
    /// `served[band][ap]`: airtime actually granted.
    pub served: &'a [Vec<f64>; 3],
    pub network: &'a Network,
}

pub trait Observer {
    fn on_interval(&mut self, view: &IntervalView<'_>);
}

/// A prepared deployment, ready to be simulated under its AP policies.
pub struct Simulation<'a> {
    deployment: &'a Deployment,
    config: &'a SimConfig,
    network: Network,
    policies: Vec<Box<dyn AllocationPolicy>>,
}

struct RunState {
    demand: [Vec<f64>; 3],
    scale: [Vec<f64>; 3],
    served: [Vec<f64>; 3],
}

impl RunState {
    fn new(n: usize) -> Self {
        RunState {
            demand: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            scale: [vec![1.0; n], vec![1.0; n], vec![1.0; n]],
            served: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    /// Rebuilds link demands from the ON flows and resolves contention.
    fn refresh(&mut self, flows: &[Flow], net: &Network) {
        for d in &mut self.demand {
            d.iter_mut().for_each(|x| *x = 0.0);
        }
        for f in flows.iter().filter(|f| f.is_on()) {
            let g = &net.goodput[f.flow_id];
            for (i, &x) in f.allocation.0.iter().enumerate() {
                if x > 0.0 {
                    self.demand[i][f.bss_id] += mac::required_airtime(x * f.rate, g[i]);
                }
            }
        }
        for i in 0..3 {
            share_airtime_into(&self.demand[i], &net.cliques[i], &mut self.scale[i]);
            for ap in 0..net.n_aps {
                self.served[i][ap] = self.scale[i][ap] * self.demand[i][ap];
            }
        }
    }

    fn occupancy(&self, ap: usize, net: &Network) -> [f64; 3] {
        [0, 1, 2].map(|i| occupancy(ap, &self.served[i], &net.cliques[i]))
    }
}

impl<'a> Simulation<'a> {
    pub fn new(deployment: &'a Deployment, config: &'a SimConfig, registry: &PolicyRegistry) -> Result<Self> {
        let network = Network::build(deployment, config)?;
        let policies = (0..network.n_aps)
            .map(|ap| {
                let kind =
                    deployment.ap_policies.get(&ap).ok_or_else(|| Error::Domain(format!("AP {ap} has no policy")))?;
                registry.create_kind(*kind, config)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Simulation { deployment, config, network, policies })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    /// Runs the event loop over `[0, sim_time]`. Each flow's initial state
    /// and first toggle instant are taken from `flows`; later toggles come
    /// from `activity`.
    pub fn run(
        &self,
        mut flows: Vec<Flow>,
        activity: &mut dyn ActivitySource,
        mut observer: Option<&mut dyn Observer>,
    ) -> Result<DeploymentResult> {
        let net = &self.network;
        if flows.len() != net.goodput.len() {
            return Err(Error::Domain(format!("{} flows for {} stations", flows.len(), net.goodput.len())));
        }
        for (i, f) in flows.iter_mut().enumerate() {
            if f.flow_id != i || f.bss_id != net.sta_bss[i] {
                return Err(Error::Domain(format!("flow {i} does not match its station")));
            }
            f.allocation = Allocation::none();
            f.offered_bits = 0.0;
            f.delivered_bits = 0.0;
        }

        let mut state = RunState::new(net.n_aps);
        let mut pins = vec![None; flows.len()];

        // Stations associate in id order before traffic starts; each sees the
        // airtime committed by earlier stations of its BSS. Flows that start
        // ON are then activated in id order.
        let mut committed = vec![[0.0; 3]; net.n_aps];
        for (i, f) in flows.iter().enumerate() {
            pins[i] = self.associate(f, &committed[f.bss_id]);
            if let Some(b) = pins[i] {
                committed[f.bss_id][b.index()] += mac::required_airtime(f.rate, net.goodput[i][b.index()]);
            }
        }
        for i in 0..flows.len() {
            if flows[i].is_on() {
                flows[i].allocation = self.allocate(&flows[i], &state, &pins);
                state.refresh(&flows, net);
            }
        }

        let horizon = self.config.sim_time_s;
        let mut now = 0.0;
        loop {
            let next = flows.iter().map(|f| f.next_toggle_time).fold(horizon, f64::min);
            if next > now {
                if let Some(obs) = observer.as_deref_mut() {
                    obs.on_interval(&IntervalView {
                        start: now,
                        end: next,
                        flows: &flows,
                        demand: &state.demand,
                        served: &state.served,
                        network: net,
                    });
                }
                integrate(&mut flows, &state, next - now);
            }
            now = next;
            if now >= horizon {
                break;
            }
            for i in 0..flows.len() {
                if flows[i].next_toggle_time != now {
                    continue;
                }
                let f = &mut flows[i];
                f.state = match f.state {
                    FlowState::On => FlowState::Off,
                    FlowState::Off => FlowState::On,
                };
                f.next_toggle_time = activity.next_toggle(f, now);
                if f.is_on() {
                    flows[i].allocation = self.allocate(&flows[i], &state, &pins);
                } else {
                    f.allocation = Allocation::none();
                }
                state.refresh(&flows, net);
            }
        }

        Ok(self.result(&flows))
    }

    fn associate(&self, flow: &Flow, committed: &[f64; 3]) -> Option<Band> {
        let net = &self.network;
        let req = AssociationRequest {
            sta_id: flow.sta_id,
            kind: flow.kind,
            rate: flow.rate,
            enabled: net.usable[flow.flow_id],
            goodput: net.goodput[flow.flow_id],
            occupancy: *committed,
        };
        if req.enabled.is_empty() {
            return None;
        }
        self.policies[flow.bss_id].associate(&req)
    }

    fn allocate(&self, flow: &Flow, state: &RunState, pins: &[Option<Band>]) -> Allocation {
        let net = &self.network;
        let req = FlowRequest {
            flow_id: flow.flow_id,
            kind: flow.kind,
            rate: flow.rate,
            enabled: net.usable[flow.flow_id],
            occupancy: state.occupancy(flow.bss_id, net),
            goodput: net.goodput[flow.flow_id],
            pinned: pins[flow.flow_id],
        };
        if req.enabled.is_empty() {
            return Allocation::none();
        }
        self.policies[flow.bss_id].allocate(&req)
    }

    fn result(&self, flows: &[Flow]) -> DeploymentResult {
        let per_flow: Vec<FlowOutcome> = flows
            .iter()
            .map(|f| FlowOutcome {
                flow_id: f.flow_id,
                sta_id: f.sta_id,
                bss_id: f.bss_id,
                kind: f.kind,
                offered_bits: f.offered_bits,
                delivered_bits: f.delivered_bits,
            })
            .collect();
        let avg = |central_only: bool, kind: Option<FlowKind>| {
            mean(
                per_flow
                    .iter()
                    .filter(|f| !central_only || f.bss_id == CENTRAL_BSS)
                    .filter(|f| kind.is_none_or(|k| f.kind == k))
                    .map(FlowOutcome::loss),
            )
        };
        DeploymentResult {
            deployment_index: self.deployment.deployment_index,
            policy: self.deployment.ap_policies[&CENTRAL_BSS],
            seed: self.deployment.seed,
            avg_loss_video: avg(true, Some(FlowKind::Video)),
            avg_loss_data: avg(true, Some(FlowKind::Data)),
            avg_loss_all: avg(true, None),
            network_loss_video: avg(false, Some(FlowKind::Video)),
            network_loss_data: avg(false, Some(FlowKind::Data)),
            network_loss_all: avg(false, None),
            per_flow,
        }
    }
}

/// Adds the bits offered and delivered over `dt` seconds of constant state.
fn integrate(flows: &mut [Flow], state: &RunState, dt: f64) {
    for f in flows.iter_mut().filter(|f| f.is_on()) {
        let offered = f.rate * dt;
        let total = f.allocation.total();
        if total <= 0.0 {
            f.offered_bits += offered;
            continue;
        }
        // Dividing by the total keeps an unsaturated split lossless when its
        // fractions do not sum to exactly 1 in floating point.
        let fraction: f64 =
            f.allocation.0.iter().enumerate().map(|(i, &x)| x * state.scale[i][f.bss_id]).sum::<f64>() / total;
        let served = fraction * offered;
        f.offered_bits += offered;
        f.delivered_bits += served.min(offered);
    }
}

fn builtin_registry() -> &'static PolicyRegistry {
    static REGISTRY: OnceLock<PolicyRegistry> = OnceLock::new();
    REGISTRY.get_or_init(PolicyRegistry::builtin)
}

/// Simulates a deployment with the built-in policies and exponential ON/OFF
/// holding times drawn from `rng`.
pub fn run_deployment<R: Rng>(
    deployment: &Deployment,
    flows: Vec<Flow>,
    config: &SimConfig,
    rng: R,
) -> Result<DeploymentResult> {
    let sim = Simulation::new(deployment, config, builtin_registry())?;
    let mut activity = MarkovActivity { t_on: config.t_on_s, t_off: config.t_off_s, rng };
    sim.run(flows, &mut activity, None)
}

/// Runs deployment `deployment_index` (already generated) with the
/// activity stream derived from the config seed.
pub fn run_indexed(
    deployment: &Deployment,
    flows: Vec<Flow>,
    config: &SimConfig,
    registry: &PolicyRegistry,
) -> Result<DeploymentResult> {
    let sim = Simulation::new(deployment, config, registry)?;
    let rng = crate::rng::stream_rng(config.base_seed, deployment.deployment_index, crate::rng::Stream::Activity);
    let mut activity = MarkovActivity { t_on: config.t_on_s, t_off: config.t_off_s, rng };
    sim.run(flows, &mut activity, None)
}
