use crate::band::{Band, BandSet};
use crate::error::{Error, Result};

use super::{Allocation, AllocationPolicy, FlowRequest, PolicyKind};

/// Splits a flow so that post-allocation occupancies are as equal as
/// possible.
///
/// Putting a fraction `x_b` of the flow on band `b` raises its occupancy by
/// `x_b * airtime[b]`, where `airtime[b]` is the airtime the whole flow would
/// need there. The water level `L` solves `sum_b max(0, L - o_b) / airtime[b]
/// = 1`; bands already above `L` get nothing.
///
/// Fails with [`Error::InfeasibleAllocation`] when no enabled band has free
/// airtime.
pub fn water_fill(enabled: BandSet, occupancy: &[f64; 3], airtime: &[f64; 3]) -> Result<Allocation> {
    let free: f64 = enabled.iter().map(|b| (1.0 - occupancy[b.index()]).max(0.0)).sum();
    if enabled.is_empty() || free <= 0.0 {
        return Err(Error::InfeasibleAllocation);
    }
    let mut order: Vec<Band> = enabled.iter().collect();
    // Stable sort keeps the band order for equal occupancies.
    order.sort_by(|a, b| occupancy[a.index()].total_cmp(&occupancy[b.index()]));

    let mut inv_sum = 0.0;
    let mut weighted = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (k, band) in order.iter().enumerate() {
        let i = band.index();
        inv_sum += 1.0 / airtime[i];
        weighted += occupancy[i] / airtime[i];
        level = (1.0 + weighted) / inv_sum;
        active = k + 1;
        match order.get(k + 1) {
            Some(next) if level > occupancy[next.index()] => continue,
            _ => break,
        }
    }

    let mut a = Allocation::none();
    for band in &order[..active] {
        let i = band.index();
        a.0[i] = ((level - occupancy[i]) / airtime[i]).max(0.0);
    }
    // Renormalise away rounding.
    let total = a.total();
    a.0.iter_mut().for_each(|x| *x /= total);
    Ok(a)
}

/// Split proportional to goodput, used when every link is full.
fn goodput_proportional(enabled: BandSet, goodput: &[f64; 3]) -> Allocation {
    let total: f64 = enabled.iter().map(|b| goodput[b.index()]).sum();
    let mut a = Allocation::none();
    if total > 0.0 {
        for b in enabled.iter() {
            a.0[b.index()] = goodput[b.index()] / total;
        }
    }
    a
}

pub fn allocate_mcaa(rate: f64, enabled: BandSet, occupancy: &[f64; 3], goodput: &[f64; 3]) -> Allocation {
    let mut airtime = [f64::INFINITY; 3];
    for b in enabled.iter() {
        airtime[b.index()] = rate / goodput[b.index()];
    }
    water_fill(enabled, occupancy, &airtime).unwrap_or_else(|_| goodput_proportional(enabled, goodput))
}

/// Multi-link congestion-aware load balancing at flow arrivals.
pub struct Mcaa;

impl AllocationPolicy for Mcaa {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Mcaa
    }

    fn allocate(&self, req: &FlowRequest) -> Allocation {
        allocate_mcaa(req.rate, req.enabled, &req.occupancy, &req.goodput)
    }
}
