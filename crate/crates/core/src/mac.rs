//! Flow-level CSMA/CA abstraction.
//!
//! A link is characterised by its goodput at 100% airtime; a flow needing
//! `rate` b/s on it consumes `rate / goodput` of the channel. APs that sense
//! each other share the channel through [`share_airtime`].

use serde::{Deserialize, Serialize};

use crate::band::Band;
use crate::error::{Error, Result};
use crate::phy::ContentionGraph;

/// DCF timing and framing constants. Times are in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacOverhead {
    pub mpdu_payload_bytes: u32,
    /// MPDUs carried per channel access (A-MPDU). 1 disables aggregation.
    pub max_ampdu: u32,
    pub slot_time_us: f64,
    pub difs_us: f64,
    pub sifs_us: f64,
    pub preamble_and_headers_us: f64,
    pub ack_time_us: f64,
    pub cw_min: u32,
    pub per: f64,
}

impl Default for MacOverhead {
    fn default() -> Self {
        MacOverhead {
            mpdu_payload_bytes: 1500,
            max_ampdu: 24,
            slot_time_us: 9.0,
            difs_us: 34.0,
            sifs_us: 16.0,
            preamble_and_headers_us: 44.0,
            ack_time_us: 28.0,
            cw_min: 15,
            per: 0.10,
        }
    }
}

impl MacOverhead {
    /// Bits delivered by one successful channel access.
    pub fn payload_bits_per_access(&self) -> f64 {
        f64::from(self.mpdu_payload_bytes) * 8.0 * f64::from(self.max_ampdu)
    }

    fn fixed_overhead_s(&self) -> f64 {
        (self.preamble_and_headers_us
            + self.sifs_us
            + self.ack_time_us
            + self.difs_us
            + f64::from(self.cw_min) / 2.0 * self.slot_time_us)
            * 1e-6
    }
}

/// Duration in seconds of one frame exchange: preamble, payload, SIFS, ACK,
/// DIFS and the mean initial backoff.
pub fn frame_airtime(payload_bits: f64, phy_rate: f64, ovh: &MacOverhead) -> Result<f64> {
    if !(phy_rate > 0.0) {
        return Err(Error::Domain(format!("phy rate must be positive, got {phy_rate}")));
    }
    Ok(ovh.fixed_overhead_s() + payload_bits / phy_rate)
}

/// Goodput in b/s of a link using 100% of the airtime at `phy_rate`.
pub fn effective_throughput(phy_rate: f64, ovh: &MacOverhead) -> Result<f64> {
    let bits = ovh.payload_bits_per_access();
    Ok(bits / frame_airtime(bits, phy_rate, ovh)? * (1.0 - ovh.per))
}

/// Fraction of airtime needed to carry `rate` over a link of goodput
/// `goodput`. May exceed 1.
pub fn required_airtime(rate: f64, goodput: f64) -> f64 {
    debug_assert!(goodput > 0.0);
    rate / goodput
}

/// Airtime demands of one AP on one band, keyed by flow id.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    pub ap: usize,
    pub band: Band,
    pub demands: Vec<(usize, f64)>,
    pub served_scale: f64,
}

impl LinkState {
    pub fn new(ap: usize, band: Band) -> Self {
        LinkState { ap, band, demands: Vec::new(), served_scale: 1.0 }
    }

    pub fn total_demand(&self) -> f64 {
        self.demands.iter().map(|(_, d)| d).sum()
    }

    pub fn served_airtime(&self) -> f64 {
        self.served_scale * self.total_demand()
    }
}

/// Per-AP served scale under clique-proportional sharing.
///
/// Within every maximal clique whose summed demand exceeds 1, each member
/// gets airtime proportional to its demand; an AP in several saturated
/// cliques takes the smallest scale. APs with zero demand keep scale 1.
pub fn share_airtime(demands: &[f64], graph: &ContentionGraph) -> Vec<f64> {
    assert_eq!(demands.len(), graph.len());
    share_airtime_in_cliques(demands, &graph.maximal_cliques())
}

/// [`share_airtime`] with precomputed maximal cliques.
pub fn share_airtime_in_cliques(demands: &[f64], cliques: &[Vec<usize>]) -> Vec<f64> {
    let mut scales = vec![1.0; demands.len()];
    share_airtime_into(demands, cliques, &mut scales);
    scales
}

pub(crate) fn share_airtime_into(demands: &[f64], cliques: &[Vec<usize>], scales: &mut [f64]) {
    scales.iter_mut().for_each(|s| *s = 1.0);
    for clique in cliques {
        let total: f64 = clique.iter().map(|&i| demands[i]).sum();
        if total > 1.0 {
            let scale = 1.0 / total;
            for &i in clique {
                if scale < scales[i] {
                    scales[i] = scale;
                }
            }
        }
    }
}
