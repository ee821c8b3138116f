//! Upper-MAC traffic manager.
//!
//! Each allocation policy maps a flow's rate onto the links its station can
//! use. Policies implement [`AllocationPolicy`] and are instantiated by name
//! through a [`PolicyRegistry`], so the engine never matches on a concrete
//! policy.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::band::{Band, BandSet};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::traffic::FlowKind;

mod legacy;
mod mcaa;
mod mlsa;
mod slci;
mod vds;

pub use legacy::{allocate_legacy, associate_mbsl, MultiBandSingleLink, SingleLink};
pub use mcaa::{allocate_mcaa, water_fill, Mcaa};
pub use mlsa::{allocate_mlsa, Mlsa};
pub use slci::{allocate_slci, least_occupied, Slci};
pub use vds::{allocate_vds, Vds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    Mlsa,
    Slci,
    Mcaa,
    Vds,
    Sl,
    Mbsl,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] =
        [PolicyKind::Mlsa, PolicyKind::Slci, PolicyKind::Mcaa, PolicyKind::Vds, PolicyKind::Sl, PolicyKind::Mbsl];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Mlsa => "mlsa",
            PolicyKind::Slci => "slci",
            PolicyKind::Mcaa => "mcaa",
            PolicyKind::Vds => "vds",
            PolicyKind::Sl => "sl",
            PolicyKind::Mbsl => "mbsl",
        }
    }

    /// Policies whose allocations always use exactly one link.
    pub fn is_single_link(self) -> bool {
        !matches!(self, PolicyKind::Mlsa | PolicyKind::Mcaa)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace('-', "");
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown policy `{s}` (expected one of mlsa, slci, mcaa, vds, sl, mbsl)"))
    }
}

/// Fraction of a flow's rate carried on each band.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Allocation(pub [f64; 3]);

impl Allocation {
    pub fn none() -> Self {
        Allocation([0.0; 3])
    }

    pub fn single(band: Band) -> Self {
        let mut a = [0.0; 3];
        a[band.index()] = 1.0;
        Allocation(a)
    }

    pub fn get(&self, band: Band) -> f64 {
        self.0[band.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Bands carrying a nonzero share.
    pub fn support(&self) -> BandSet {
        Band::ALL.into_iter().filter(|b| self.get(*b) > 0.0).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.support().is_empty()
    }

    pub fn single_band(&self) -> Option<Band> {
        let s = self.support();
        if s.len() == 1 {
            s.iter().next()
        } else {
            None
        }
    }
}

/// Everything a policy may look at when a flow turns ON.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRequest {
    pub flow_id: usize,
    pub kind: FlowKind,
    /// Offered rate in b/s.
    pub rate: f64,
    /// Links the station can use (enabled and with a nonzero PHY rate).
    pub enabled: BandSet,
    /// Channel occupancy seen by the AP on each band, in [0, 1].
    pub occupancy: [f64; 3],
    /// Goodput of the station's link on each band at full airtime, in b/s.
    pub goodput: [f64; 3],
    /// Band fixed at association, for policies that pin stations.
    pub pinned: Option<Band>,
}

/// State seen by a policy when a station associates at the start of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRequest {
    pub sta_id: usize,
    pub kind: FlowKind,
    pub rate: f64,
    pub enabled: BandSet,
    pub goodput: [f64; 3],
    /// Airtime already committed on each band by the AP's earlier stations,
    /// each counted at its full offered rate. Stations associate before any
    /// traffic flows, so this is not clamped to 1.
    pub occupancy: [f64; 3],
}

pub trait AllocationPolicy: Send + Sync {
    fn kind(&self) -> PolicyKind;

    /// Allocation of a flow that just turned ON.
    fn allocate(&self, req: &FlowRequest) -> Allocation;

    /// Band to pin the station to for the whole run, if this policy pins.
    fn associate(&self, _req: &AssociationRequest) -> Option<Band> {
        None
    }
}

pub type PolicyFactory = Box<dyn Fn(&SimConfig) -> Box<dyn AllocationPolicy> + Send + Sync>;

/// Policies registered by name.
pub struct PolicyRegistry {
    factories: BTreeMap<String, PolicyFactory>,
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PolicyRegistry {
    pub fn empty() -> Self {
        PolicyRegistry { factories: BTreeMap::new() }
    }

    /// The six built-in policies under their [`PolicyKind::name`].
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(PolicyKind::Mlsa.name(), |_| Box::new(Mlsa));
        r.register(PolicyKind::Slci.name(), |_| Box::new(Slci));
        r.register(PolicyKind::Mcaa.name(), |_| Box::new(Mcaa));
        r.register(PolicyKind::Vds.name(), |_| Box::new(Vds));
        r.register(PolicyKind::Sl.name(), |cfg| Box::new(SingleLink { band: cfg.sl_band }));
        r.register(PolicyKind::Mbsl.name(), |_| Box::new(MultiBandSingleLink));
        r
    }

    /// Registers (or replaces) a policy factory.
    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&SimConfig) -> Box<dyn AllocationPolicy> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_ascii_lowercase(), Box::new(factory));
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(&name.to_ascii_lowercase())
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn create(&self, name: &str, config: &SimConfig) -> Result<Box<dyn AllocationPolicy>> {
        match self.factories.get(&name.to_ascii_lowercase()) {
            Some(f) => Ok(f(config)),
            None => Err(Error::UnknownPolicy { name: name.to_string(), available: self.names().join(", ") }),
        }
    }

    pub fn create_kind(&self, kind: PolicyKind, config: &SimConfig) -> Result<Box<dyn AllocationPolicy>> {
        self.create(kind.name(), config)
    }
}

/// Occupancy of `ap`'s channel on one band: the largest served airtime of a
/// maximal contention clique containing `ap` (its own airtime plus that of
/// the sensed APs which also sense each other), clamped to [0, 1].
/// `served[i]` is AP `i`'s served airtime on the band. Sensed APs that do
/// not contend with each other may transmit at the same time, so their
/// airtimes are not added.
pub fn occupancy(ap: usize, served: &[f64], cliques: &[Vec<usize>]) -> f64 {
    cliques
        .iter()
        .filter(|c| c.contains(&ap))
        .map(|c| c.iter().map(|&j| served[j]).sum::<f64>())
        .fold(served[ap], f64::max)
        .clamp(0.0, 1.0)
}
