use crate::band::{Band, BandSet};

use super::{Allocation, AllocationPolicy, FlowRequest, PolicyKind};

/// Band of lowest occupancy; ties go to the lower band.
pub fn least_occupied(enabled: BandSet, occupancy: &[f64; 3]) -> Option<Band> {
    enabled.iter().fold(None, |best: Option<Band>, b| match best {
        Some(cur) if occupancy[cur.index()] <= occupancy[b.index()] => Some(cur),
        _ => Some(b),
    })
}

pub fn allocate_slci(enabled: BandSet, occupancy: &[f64; 3]) -> Allocation {
    least_occupied(enabled, occupancy).map_or_else(Allocation::none, Allocation::single)
}

/// Single link, less congested interface.
pub struct Slci;

impl AllocationPolicy for Slci {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Slci
    }

    fn allocate(&self, req: &FlowRequest) -> Allocation {
        allocate_slci(req.enabled, &req.occupancy)
    }
}
