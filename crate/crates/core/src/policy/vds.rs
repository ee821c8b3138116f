use crate::band::{Band, BandSet};
use crate::traffic::FlowKind;

use super::{allocate_slci, Allocation, AllocationPolicy, FlowRequest, PolicyKind};

/// Video on 6 GHz, data on the emptier of 2.4 and 5 GHz. Without the
/// preferred band the flow goes to the least occupied usable link.
pub fn allocate_vds(kind: FlowKind, enabled: BandSet, occupancy: &[f64; 3]) -> Allocation {
    match kind {
        FlowKind::Video if enabled.contains(Band::B6G) => Allocation::single(Band::B6G),
        FlowKind::Video => allocate_slci(enabled, occupancy),
        FlowKind::Data => {
            let legacy: BandSet = [Band::B2G4, Band::B5G].into_iter().collect();
            let candidates = enabled.intersection(legacy);
            if candidates.is_empty() {
                allocate_slci(enabled, occupancy)
            } else {
                allocate_slci(candidates, occupancy)
            }
        }
    }
}

/// Video and data separation.
pub struct Vds;

impl AllocationPolicy for Vds {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Vds
    }

    fn allocate(&self, req: &FlowRequest) -> Allocation {
        allocate_vds(req.kind, req.enabled, &req.occupancy)
    }
}
