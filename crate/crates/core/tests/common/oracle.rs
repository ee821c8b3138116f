//! Brute-force reference for scenarios with at most two BSSs.
//!
//! Shares only the PHY rate and MAC goodput primitives with the crate. The
//! run is cut into the intervals between scripted toggles; within each, the
//! two-AP airtime split is solved in closed form and bits are integrated.

use mlo_core::band::{Band, BandSet};
use mlo_core::policy::PolicyKind;
use mlo_core::{mac, phy};

use super::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleFlow {
    pub offered: f64,
    pub delivered: f64,
}

impl OracleFlow {
    pub fn loss(&self) -> f64 {
        if self.offered == 0.0 {
            0.0
        } else {
            1.0 - self.delivered / self.offered
        }
    }
}

struct Radio {
    goodput: Vec<[f64; 3]>,
    usable: Vec<Vec<bool>>,
    /// `contend[band]`: the two APs hear each other.
    contend: [bool; 3],
}

fn radio(sc: &Scenario) -> Radio {
    let cfg = sc.config();
    let d = sc.deployment(&cfg);
    let mut goodput = Vec::new();
    let mut usable = Vec::new();
    for sta in d.stations() {
        let ap = d.ap(sta.bss_id);
        let dist = phy::distance(sta.position, ap.position).max(cfg.phy.min_distance_m);
        let mut g = [0.0; 3];
        let mut u = vec![false; 3];
        for b in 0..3 {
            let band = Band::from_index(b).unwrap();
            if !d.enabled(sta.node_id).contains(band) {
                continue;
            }
            let spec = &cfg.bands[b];
            let rx = phy::rx_power(ap.tx_power_dbm, dist, spec, &cfg.phy).unwrap();
            let snr = phy::snr(rx, spec.bandwidth_mhz, sta.noise_figure_db, cfg.phy.noise_floor_dbm_hz);
            let rate = phy::select_rate(snr, spec, ap.n_spatial_streams.min(sta.n_spatial_streams), &cfg.phy);
            if rate > 0.0 {
                g[b] = mac::effective_throughput(rate, &cfg.mac).unwrap();
                u[b] = true;
            }
        }
        goodput.push(g);
        usable.push(u);
    }
    let mut contend = [false; 3];
    if sc.aps.len() == 2 {
        let (p0, p1) = (sc.aps[0].0, sc.aps[1].0);
        let dist = ((p0.0 - p1.0).powi(2) + (p0.1 - p1.1).powi(2)).sqrt().max(cfg.phy.min_distance_m);
        for b in 0..3 {
            let rx = phy::rx_power(cfg.ap_tx_power_dbm, dist, &cfg.bands[b], &cfg.phy).unwrap();
            contend[b] = rx >= cfg.phy.cca_threshold_dbm;
        }
    }
    Radio { goodput, usable, contend }
}

/// Served fraction of demand for each AP on one band.
fn scales(demand: [f64; 2], contend: bool) -> [f64; 2] {
    let total = demand[0] + demand[1];
    if contend && total > 1.0 {
        [1.0 / total; 2]
    } else {
        demand.map(|d| if d > 1.0 { 1.0 / d } else { 1.0 })
    }
}

struct State {
    on: Vec<bool>,
    alloc: Vec<[f64; 3]>,
    scale: [[f64; 2]; 3],
    served: [[f64; 2]; 3],
}

fn refresh(sc: &Scenario, r: &Radio, st: &mut State) {
    let mut demand = [[0.0; 2]; 3];
    for (i, s) in sc.stas.iter().enumerate() {
        if st.on[i] {
            for b in 0..3 {
                if st.alloc[i][b] > 0.0 {
                    demand[b][s.bss] += st.alloc[i][b] * s.rate / r.goodput[i][b];
                }
            }
        }
    }
    for b in 0..3 {
        st.scale[b] = scales(demand[b], r.contend[b]);
        st.served[b] = [demand[b][0] * st.scale[b][0], demand[b][1] * st.scale[b][1]];
    }
}

fn occupancy(r: &Radio, st: &State, ap: usize) -> [f64; 3] {
    let mut o = [0.0; 3];
    for b in 0..3 {
        let v = if r.contend[b] { st.served[b][0] + st.served[b][1] } else { st.served[b][ap] };
        o[b] = v.min(1.0);
    }
    o
}

fn one(b: usize) -> [f64; 3] {
    let mut a = [0.0; 3];
    a[b] = 1.0;
    a
}

/// First band with the lowest occupancy among `cands`.
fn argmin(cands: &[usize], occ: &[f64; 3]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &b in cands {
        if best.is_none_or(|c| occ[b] < occ[c]) {
            best = Some(b);
        }
    }
    best
}

/// Water level found by bisection.
fn mcaa(rate: f64, bands: &[usize], occ: &[f64; 3], g: &[f64; 3]) -> [f64; 3] {
    let free: f64 = bands.iter().map(|&b| (1.0 - occ[b]).max(0.0)).sum();
    let mut a = [0.0; 3];
    if free <= 0.0 {
        let total: f64 = bands.iter().map(|&b| g[b]).sum();
        for &b in bands {
            a[b] = g[b] / total;
        }
        return a;
    }
    let air = |b: usize| rate / g[b];
    let filled = |level: f64| bands.iter().map(|&b| (level - occ[b]).max(0.0) / air(b)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = 2.0 + bands.iter().map(|&b| air(b)).fold(0.0, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if filled(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for &b in bands {
        a[b] = (hi - occ[b]).max(0.0) / air(b);
    }
    let s: f64 = a.iter().sum();
    a.map(|x| x / s)
}

fn policy_alloc(sc: &Scenario, r: &Radio, st: &State, pins: &[Option<usize>], i: usize) -> [f64; 3] {
    let s = &sc.stas[i];
    let bands: Vec<usize> = (0..3).filter(|&b| r.usable[i][b]).collect();
    if bands.is_empty() {
        return [0.0; 3];
    }
    let occ = occupancy(r, st, s.bss);
    let slci = |cands: &[usize]| one(argmin(cands, &occ).unwrap());
    match sc.aps[s.bss].1 {
        PolicyKind::Mlsa => {
            let mut a = [0.0; 3];
            for &b in &bands {
                a[b] = 1.0 / bands.len() as f64;
            }
            a
        }
        PolicyKind::Slci => slci(&bands),
        PolicyKind::Mcaa => mcaa(s.rate, &bands, &occ, &r.goodput[i]),
        PolicyKind::Vds => {
            let video = s.kind == mlo_core::FlowKind::Video;
            if video && r.usable[i][2] {
                one(2)
            } else if video {
                slci(&bands)
            } else {
                let legacy: Vec<usize> = bands.iter().copied().filter(|&b| b < 2).collect();
                slci(if legacy.is_empty() { &bands } else { &legacy })
            }
        }
        PolicyKind::Sl => {
            // Configured band is 5 GHz, then 2.4 GHz, then whatever is left.
            one([1, 0, 2].into_iter().find(|b| r.usable[i][*b]).unwrap())
        }
        PolicyKind::Mbsl => match pins[i] {
            Some(b) if r.usable[i][b] => one(b),
            _ => slci(&bands),
        },
    }
}

/// MBSL pin: least airtime committed by earlier stations of the same BSS.
fn associate(sc: &Scenario, r: &Radio, committed: &[[f64; 3]; 2], i: usize) -> Option<usize> {
    let bands: Vec<usize> = (0..3).filter(|&b| r.usable[i][b]).collect();
    match sc.aps[sc.stas[i].bss].1 {
        PolicyKind::Mbsl => argmin(&bands, &committed[sc.stas[i].bss]),
        _ => None,
    }
}

/// Per-flow offered and delivered bits over the scenario horizon.
pub fn solve(sc: &Scenario) -> Vec<OracleFlow> {
    let r = radio(sc);
    let n = sc.stas.len();
    let mut st = State { on: vec![false; n], alloc: vec![[0.0; 3]; n], scale: [[1.0; 2]; 3], served: [[0.0; 2]; 3] };
    let mut pins = vec![None; n];
    let mut committed = [[0.0; 3]; 2];
    for i in 0..n {
        pins[i] = associate(sc, &r, &committed, i);
        if let Some(b) = pins[i] {
            committed[sc.stas[i].bss][b] += sc.stas[i].rate / r.goodput[i][b];
        }
    }
    for i in 0..n {
        if sc.stas[i].on {
            st.on[i] = true;
            st.alloc[i] = policy_alloc(sc, &r, &st, &pins, i);
            refresh(sc, &r, &mut st);
        }
    }

    let mut times: Vec<f64> =
        sc.stas.iter().flat_map(|s| s.toggles.iter().copied()).filter(|&t| t < sc.horizon).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times.push(sc.horizon);

    let mut out = vec![OracleFlow { offered: 0.0, delivered: 0.0 }; n];
    let mut now = 0.0;
    for t in times {
        let dt = t - now;
        for i in 0..n {
            if !st.on[i] {
                continue;
            }
            let bss = sc.stas[i].bss;
            let offered = sc.stas[i].rate * dt;
            let total: f64 = st.alloc[i].iter().sum();
            let frac: f64 =
                if total > 0.0 { (0..3).map(|b| st.alloc[i][b] * st.scale[b][bss]).sum::<f64>() / total } else { 0.0 };
            out[i].offered += offered;
            out[i].delivered += (frac * offered).min(offered);
        }
        now = t;
        if t >= sc.horizon {
            break;
        }
        for i in 0..n {
            if !sc.stas[i].toggles.contains(&t) {
                continue;
            }
            st.on[i] = !st.on[i];
            st.alloc[i] = if st.on[i] { policy_alloc(sc, &r, &st, &pins, i) } else { [0.0; 3] };
            refresh(sc, &r, &mut st);
        }
    }
    out
}

/// Links with a nonzero rate, as the oracle sees them.
pub fn usable_links(sc: &Scenario) -> Vec<BandSet> {
    radio(sc).usable.iter().map(|u| Band::ALL.into_iter().filter(|b| u[b.index()]).collect()).collect()
}

/// Whether the two APs hear each other on each band.
pub fn contention(sc: &Scenario) -> [bool; 3] {
    radio(sc).contend
}
