//! Random deployments: AP and station placement, BSS membership and the set
//! of links each station can use.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::band::{Band, BandSet, BandSpec};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::phy::{self, PhyModel};
use crate::policy::PolicyKind;
use crate::rng::{self, Stream};

/// Rejection-sampling attempts per station before giving up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Ap,
    Sta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub node_id: usize,
    pub role: Role,
    pub bss_id: usize,
    pub position: (f64, f64),
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub n_spatial_streams: u32,
}

/// One random scenario. APs come first with `node_id == bss_id`; BSS 0 is
/// the central BSS whose flows are measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub deployment_index: usize,
    pub seed: u64,
    pub nodes: Vec<Node>,
    pub band_specs: [BandSpec; 3],
    pub enabled_links: BTreeMap<usize, BandSet>,
    pub ap_policies: BTreeMap<usize, PolicyKind>,
    pub area_side: f64,
}

pub const CENTRAL_BSS: usize = 0;

impl Deployment {
    pub fn aps(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.role == Role::Ap)
    }

    pub fn stations(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.role == Role::Sta)
    }

    pub fn n_aps(&self) -> usize {
        self.aps().count()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    /// The AP serving BSS `bss_id`.
    pub fn ap(&self, bss_id: usize) -> &Node {
        &self.nodes[bss_id]
    }

    pub fn enabled(&self, sta_id: usize) -> BandSet {
        self.enabled_links.get(&sta_id).copied().unwrap_or_default()
    }

    pub fn band_spec(&self, band: Band) -> &BandSpec {
        &self.band_specs[band.index()]
    }

    /// Same geometry with a different policy at the central AP.
    pub fn with_central_policy(&self, kind: PolicyKind) -> Deployment {
        let mut d = self.clone();
        d.ap_policies.insert(CENTRAL_BSS, kind);
        d
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("deployment serializes")
    }

    pub fn from_text(text: &str) -> Result<Deployment> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("bad deployment text: {e}")))
    }
}

/// Generates deployment `index` from its own topology stream.
pub fn generate_deployment_for_index(config: &SimConfig, index: usize) -> Result<Deployment> {
    let mut rng = rng::stream_rng(config.base_seed, index, Stream::Topology);
    let mut d = generate_deployment(config, index, &mut rng)?;
    d.seed = rng::deployment_seed(config.base_seed, index);
    Ok(d)
}

pub fn generate_deployment<R: Rng + ?Sized>(config: &SimConfig, index: usize, rng: &mut R) -> Result<Deployment> {
    let side = config.area_side_m;
    let mut nodes = Vec::with_capacity(config.n_bss * (config.stations_per_bss + 1));
    for bss in 0..config.n_bss {
        let position = if bss == CENTRAL_BSS {
            (side / 2.0, side / 2.0)
        } else {
            (rng.gen_range(0.0..side), rng.gen_range(0.0..side))
        };
        nodes.push(Node {
            node_id: bss,
            role: Role::Ap,
            bss_id: bss,
            position,
            tx_power_dbm: config.ap_tx_power_dbm,
            noise_figure_db: config.noise_figure_db,
            n_spatial_streams: config.spatial_streams,
        });
    }

    let mut ap_policies = BTreeMap::new();
    ap_policies.insert(CENTRAL_BSS, config.policy_under_test);
    for bss in 1..config.n_bss {
        let kind = if rng.gen_bool(0.5) { PolicyKind::Slci } else { PolicyKind::Mcaa };
        ap_policies.insert(bss, kind);
    }

    let mut enabled_links = BTreeMap::new();
    for bss in 0..config.n_bss {
        let ap = nodes[bss].clone();
        let stations = place_stations(&ap, config.stations_per_bss, nodes.len(), config, rng)?;
        for sta in stations {
            enabled_links.insert(sta.node_id, compute_enabled_links(&sta, &ap, &config.bands, &config.phy));
            nodes.push(sta);
        }
    }

    Ok(Deployment {
        deployment_index: index,
        seed: 0,
        nodes,
        band_specs: config.bands,
        enabled_links,
        ap_policies,
        area_side: side,
    })
}

/// Places `m_stations` uniformly in the placement disk around `ap`,
/// rejecting positions closer than the minimum distance or outside 2.4 GHz
/// coverage. Node ids are assigned from `first_id`.
pub fn place_stations<R: Rng + ?Sized>(
    ap: &Node,
    m_stations: usize,
    first_id: usize,
    config: &SimConfig,
    rng: &mut R,
) -> Result<Vec<Node>> {
    let radius = config.placement_radius();
    let b24 = config.band(Band::B2G4);
    let mut out = Vec::with_capacity(m_stations);
    for k in 0..m_stations {
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let r = radius * rng.gen::<f64>().sqrt();
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            if r < config.phy.min_distance_m {
                continue;
            }
            let rx = phy::rx_power(ap.tx_power_dbm, r, b24, &config.phy)?;
            if rx >= config.phy.cca_threshold_dbm {
                placed = Some((ap.position.0 + r * theta.cos(), ap.position.1 + r * theta.sin()));
                break;
            }
        }
        let position = placed.ok_or(Error::Placement { ap: ap.node_id, attempts: MAX_PLACEMENT_ATTEMPTS, radius })?;
        out.push(Node {
            node_id: first_id + k,
            role: Role::Sta,
            bss_id: ap.bss_id,
            position,
            tx_power_dbm: config.sta_tx_power_dbm,
            noise_figure_db: config.noise_figure_db,
            n_spatial_streams: config.spatial_streams,
        });
    }
    Ok(out)
}

/// Bands on which the AP's signal reaches the station at or above the CCA
/// threshold.
pub fn compute_enabled_links(sta: &Node, ap: &Node, bands: &[BandSpec; 3], phy_model: &PhyModel) -> BandSet {
    debug_assert_eq!(sta.bss_id, ap.bss_id);
    let d = phy::distance(sta.position, ap.position).max(phy_model.min_distance_m);
    bands
        .iter()
        .filter(|spec| {
            phy::rx_power(ap.tx_power_dbm, d, spec, phy_model).is_ok_and(|rx| rx >= phy_model.cca_threshold_dbm)
        })
        .map(|spec| spec.band)
        .collect()
}
