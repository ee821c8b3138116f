use crate::band::BandSet;

use super::{Allocation, AllocationPolicy, FlowRequest, PolicyKind};

/// Equal share on every usable link.
pub fn allocate_mlsa(enabled: BandSet) -> Allocation {
    let mut a = Allocation::none();
    let n = enabled.len();
    for b in enabled.iter() {
        a.0[b.index()] = 1.0 / n as f64;
    }
    a
}

/// Multi-link, same load to all interfaces.
pub struct Mlsa;

impl AllocationPolicy for Mlsa {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Mlsa
    }

    fn allocate(&self, req: &FlowRequest) -> Allocation {
        allocate_mlsa(req.enabled)
    }
}
