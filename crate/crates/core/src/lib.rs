//! Flow-level simulator of IEEE 802.11be multi-link operation.
//!
//! A deployment of five BSSs is generated at random, each station gets one
//! downlink flow with ON/OFF activity, and the central AP's traffic manager
//! spreads every flow over the station's links according to a pluggable
//! allocation policy. Links share airtime through a CSMA/CA abstraction and
//! the simulator reports the throughput loss of the central BSS.
//!
//! Modules follow the data path: [`topology`] and [`phy`] build the radio
//! picture, [`mac`] turns rates into airtime, [`traffic`] drives flow
//! activity, [`policy`] decides allocations, [`engine`] runs one deployment
//! and [`batch`] sweeps deployments and policies.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{a} != {b} (tol {})", $tol);
    }};
}

pub mod band;
pub mod batch;
pub mod config;
pub mod engine;
pub mod error;
pub mod mac;
pub mod metrics;
pub mod phy;
pub mod policy;
pub mod rng;
pub mod topology;
pub mod traffic;

pub use band::{Band, BandSet, BandSpec};
pub use batch::{run_batch, simulate_batch, BatchOutput};
pub use config::SimConfig;
pub use engine::{run_deployment, DeploymentResult, Network, Observer, Simulation};
pub use error::{Error, Result};
pub use policy::{Allocation, AllocationPolicy, PolicyKind, PolicyRegistry};
pub use topology::{generate_deployment, Deployment};
pub use traffic::{Flow, FlowKind, FlowState};
