use crate::band::{Band, BandSet};

use super::{allocate_slci, least_occupied, Allocation, AllocationPolicy, AssociationRequest, FlowRequest, PolicyKind};

/// Legacy allocations. `Sl` puts everything on `sl_band` (2.4 GHz when that
/// band is unusable); `Mbsl` uses the band pinned at association.
pub fn allocate_legacy(kind: PolicyKind, sl_band: Band, req: &FlowRequest) -> Allocation {
    match kind {
        PolicyKind::Sl => {
            let band = [sl_band, Band::B2G4]
                .into_iter()
                .find(|b| req.enabled.contains(*b))
                .or_else(|| req.enabled.iter().next());
            band.map_or_else(Allocation::none, Allocation::single)
        }
        PolicyKind::Mbsl => match req.pinned {
            Some(b) if req.enabled.contains(b) => Allocation::single(b),
            _ => allocate_slci(req.enabled, &req.occupancy),
        },
        other => panic!("{other} is not a legacy policy"),
    }
}

/// Pin for a newly associated station: its least occupied enabled band,
/// with occupancy taken as the airtime committed by earlier stations.
pub fn associate_mbsl(enabled: BandSet, occupancy: &[f64; 3]) -> Option<Band> {
    least_occupied(enabled, occupancy)
}

/// Legacy single-link AP: every flow on one band for the whole run.
pub struct SingleLink {
    pub band: Band,
}

impl AllocationPolicy for SingleLink {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Sl
    }

    fn allocate(&self, req: &FlowRequest) -> Allocation {
        allocate_legacy(PolicyKind::Sl, self.band, req)
    }
}

/// Legacy multi-band AP: each station is pinned to one band at association.
pub struct MultiBandSingleLink;

impl AllocationPolicy for MultiBandSingleLink {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Mbsl
    }

    fn allocate(&self, req: &FlowRequest) -> Allocation {
        allocate_legacy(PolicyKind::Mbsl, Band::B2G4, req)
    }

    fn associate(&self, req: &AssociationRequest) -> Option<Band> {
        associate_mbsl(req.enabled, &req.occupancy)
    }
}
