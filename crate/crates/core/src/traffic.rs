//! Downlink flows and their ON/OFF activity.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::policy::Allocation;
use crate::topology::Deployment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FlowKind {
    Video,
    Data,
}

impl FlowKind {
    pub fn name(self) -> &'static str {
        match self {
            FlowKind::Video => "video",
            FlowKind::Data => "data",
        }
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "video" => Ok(FlowKind::Video),
            "data" => Ok(FlowKind::Data),
            other => Err(format!("unknown flow kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowState {
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub flow_id: usize,
    pub sta_id: usize,
    pub bss_id: usize,
    pub kind: FlowKind,
    /// Offered rate while ON, in b/s.
    pub rate: f64,
    pub state: FlowState,
    pub next_toggle_time: f64,
    pub allocation: Allocation,
    pub offered_bits: f64,
    pub delivered_bits: f64,
}

impl Flow {
    pub fn new(flow_id: usize, sta_id: usize, bss_id: usize, kind: FlowKind, rate: f64) -> Flow {
        Flow {
            flow_id,
            sta_id,
            bss_id,
            kind,
            rate,
            state: FlowState::Off,
            next_toggle_time: f64::INFINITY,
            allocation: Allocation::none(),
            offered_bits: 0.0,
            delivered_bits: 0.0,
        }
    }

    pub fn is_on(&self) -> bool {
        self.state == FlowState::On
    }
}

fn exp_sample<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    Exp::new(1.0 / mean).expect("positive mean").sample(rng)
}

/// One flow per station, ids in station order. Kind and initial state are
/// drawn from `rng`; the initial state follows the stationary distribution of
/// the ON/OFF chain.
pub fn spawn_flows<R: Rng + ?Sized>(deployment: &Deployment, config: &SimConfig, rng: &mut R) -> Vec<Flow> {
    let p_on = config.t_on_s / (config.t_on_s + config.t_off_s);
    deployment
        .stations()
        .enumerate()
        .map(|(flow_id, sta)| {
            let kind = if rng.gen_bool(config.video_ratio) { FlowKind::Video } else { FlowKind::Data };
            let mut flow = Flow::new(flow_id, sta.node_id, sta.bss_id, kind, config.rate_bps(kind));
            flow.state = if rng.gen_bool(p_on) { FlowState::On } else { FlowState::Off };
            flow.next_toggle_time = next_toggle(&flow, 0.0, config.t_on_s, config.t_off_s, rng);
            flow
        })
        .collect()
}

pub fn spawn_flows_for_index(deployment: &Deployment, config: &SimConfig) -> Vec<Flow> {
    let mut rng = crate::rng::stream_rng(config.base_seed, deployment.deployment_index, crate::rng::Stream::Flows);
    spawn_flows(deployment, config, &mut rng)
}

/// End of the flow's current state: `now` plus an exponential holding time
/// with mean `t_on` (ON) or `t_off` (OFF).
pub fn next_toggle<R: Rng + ?Sized>(flow: &Flow, now: f64, t_on: f64, t_off: f64, rng: &mut R) -> f64 {
    let mean = match flow.state {
        FlowState::On => t_on,
        FlowState::Off => t_off,
    };
    now + exp_sample(mean, rng)
}

pub fn offered_bits(flow: &Flow, interval: f64) -> f64 {
    if flow.is_on() {
        flow.rate * interval
    } else {
        0.0
    }
}

/// Supplies the time of a flow's next toggle once it has entered a new
/// state at `now`.
pub trait ActivitySource {
    fn next_toggle(&mut self, flow: &Flow, now: f64) -> f64;
}

/// Exponential ON/OFF holding times.
pub struct MarkovActivity<R> {
    pub t_on: f64,
    pub t_off: f64,
    pub rng: R,
}

impl<R: Rng> ActivitySource for MarkovActivity<R> {
    fn next_toggle(&mut self, flow: &Flow, now: f64) -> f64 {
        next_toggle(flow, now, self.t_on, self.t_off, &mut self.rng)
    }
}

/// Fixed toggle instants per flow; a flow with no remaining instants stays
/// in its state until the end of the run.
#[derive(Debug, Clone, Default)]
pub struct ScriptedActivity {
    times: Vec<Vec<f64>>,
}

impl ScriptedActivity {
    /// `times[flow_id]` lists increasing toggle instants. The first instant
    /// must also be set as the flow's initial `next_toggle_time`.
    pub fn new(times: Vec<Vec<f64>>) -> Self {
        ScriptedActivity { times }
    }

    pub fn first(&self, flow_id: usize) -> f64 {
        self.times.get(flow_id).and_then(|t| t.first().copied()).unwrap_or(f64::INFINITY)
    }
}

impl ActivitySource for ScriptedActivity {
    fn next_toggle(&mut self, flow: &Flow, now: f64) -> f64 {
        self.times.get(flow.flow_id).and_then(|t| t.iter().copied().find(|&x| x > now)).unwrap_or(f64::INFINITY)
    }
}
