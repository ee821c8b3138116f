//! Radio abstraction: path loss, receive power, SNR, MCS rate selection and
//! the per-band carrier-sense graph between APs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::band::BandSpec;
use crate::error::{Error, Result};

/// Dual-slope indoor path loss with a distance-proportional wall term:
///
/// `PL(d) = L0 + 20 log10(f / 2.4 GHz) + 10 n_near log10(min(d, bp))
///          + 1{d > bp} 10 n_far log10(d / bp) + W d / s`
///
/// where `W` is the per-band attenuation of one wall and `s` the wall
/// spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    pub l0_db: f64,
    pub exponent_near: f64,
    pub exponent_far: f64,
    pub breakpoint_m: f64,
    /// Indexed by band: 2.4, 5, 6 GHz.
    pub wall_attenuation_db: [f64; 3],
    pub wall_spacing_m: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        PathLossParams {
            l0_db: 40.05,
            exponent_near: 2.0,
            exponent_far: 3.5,
            breakpoint_m: 5.0,
            wall_attenuation_db: [5.0, 10.0, 10.0],
            wall_spacing_m: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McsRow {
    pub min_snr_db: f64,
    /// Single-stream PHY rate in Mb/s for 20, 40 and 80 MHz channels.
    pub rate_mbps: [f64; 3],
}

/// SNR to PHY-rate lookup. Rows are strictly increasing in both threshold
/// and rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McsTable {
    rows: Vec<McsRow>,
}

const BANDWIDTHS_MHZ: [f64; 3] = [20.0, 40.0, 80.0];

impl McsTable {
    pub fn new(rows: Vec<McsRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::config("mcs_table", "table has no rows"));
        }
        for (i, row) in rows.iter().enumerate() {
            if !row.min_snr_db.is_finite() || row.rate_mbps.iter().any(|r| !(*r > 0.0)) {
                return Err(Error::config(
                    "mcs_table",
                    format!("row {i} has a non-positive rate or non-finite threshold"),
                ));
            }
        }
        for (i, pair) in rows.windows(2).enumerate() {
            let (lo, hi) = (&pair[0], &pair[1]);
            let rates_up = (0..3).all(|c| hi.rate_mbps[c] > lo.rate_mbps[c]);
            if !(hi.min_snr_db > lo.min_snr_db) || !rates_up {
                return Err(Error::config(
                    "mcs_table",
                    format!("rows {i} and {} are not strictly increasing in SNR and rate", i + 1),
                ));
            }
        }
        Ok(McsTable { rows })
    }

    /// 802.11ax rates (0.8 us guard interval, one stream), MCS 0..=11.
    pub fn default_ax() -> Self {
        const SNR: [f64; 12] = [5.0, 8.0, 11.0, 14.0, 18.0, 21.0, 23.0, 25.0, 29.0, 31.0, 34.0, 36.0];
        const R20: [f64; 12] = [8.6, 17.2, 25.8, 34.4, 51.6, 68.8, 77.4, 86.0, 103.2, 114.7, 129.0, 143.4];
        const R40: [f64; 12] = [17.2, 34.4, 51.6, 68.8, 103.2, 137.6, 154.9, 172.1, 206.5, 229.4, 258.1, 286.8];
        const R80: [f64; 12] = [36.0, 72.1, 108.1, 144.1, 216.2, 288.2, 324.3, 360.3, 432.4, 480.4, 540.4, 600.5];
        let rows = (0..12).map(|i| McsRow { min_snr_db: SNR[i], rate_mbps: [R20[i], R40[i], R80[i]] }).collect();
        McsTable { rows }
    }

    /// Reads a CSV file with header
    /// `min_snr_db,rate_20mhz_mbps,rate_40mhz_mbps,rate_80mhz_mbps`.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Record {
            min_snr_db: f64,
            rate_20mhz_mbps: f64,
            rate_40mhz_mbps: f64,
            rate_80mhz_mbps: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<Record>() {
            let rec = rec?;
            rows.push(McsRow {
                min_snr_db: rec.min_snr_db,
                rate_mbps: [rec.rate_20mhz_mbps, rec.rate_40mhz_mbps, rec.rate_80mhz_mbps],
            });
        }
        McsTable::new(rows)
    }

    pub fn rows(&self) -> &[McsRow] {
        &self.rows
    }

    /// Single-stream rate in b/s of `row` for a channel of `bandwidth_mhz`.
    /// Bandwidths outside 20/40/80 MHz scale the 20 MHz column linearly.
    fn row_rate(&self, row: &McsRow, bandwidth_mhz: f64) -> f64 {
        let mbps = match BANDWIDTHS_MHZ.iter().position(|b| *b == bandwidth_mhz) {
            Some(col) => row.rate_mbps[col],
            None => row.rate_mbps[0] * bandwidth_mhz / 20.0,
        };
        mbps * 1e6
    }
}

/// Radio model shared by every node of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhyModel {
    pub pathloss: PathLossParams,
    pub cca_threshold_dbm: f64,
    pub noise_floor_dbm_hz: f64,
    pub min_distance_m: f64,
    pub mcs_table: McsTable,
}

impl Default for PhyModel {
    fn default() -> Self {
        PhyModel {
            pathloss: PathLossParams::default(),
            cca_threshold_dbm: -82.0,
            noise_floor_dbm_hz: -174.0,
            min_distance_m: 0.5,
            mcs_table: McsTable::default_ax(),
        }
    }
}

pub fn path_loss(distance_m: f64, band: &BandSpec, model: &PhyModel) -> Result<f64> {
    if !(distance_m >= model.min_distance_m) {
        return Err(Error::Domain(format!("distance {distance_m} m is below the minimum {} m", model.min_distance_m)));
    }
    let p = &model.pathloss;
    let near = distance_m.min(p.breakpoint_m);
    let mut pl = p.l0_db
        + 20.0 * (band.carrier_freq_ghz / 2.4).log10()
        + 10.0 * p.exponent_near * near.log10()
        + p.wall_attenuation_db[band.band.index()] * distance_m / p.wall_spacing_m;
    if distance_m > p.breakpoint_m {
        pl += 10.0 * p.exponent_far * (distance_m / p.breakpoint_m).log10();
    }
    Ok(pl)
}

pub fn rx_power(tx_power_dbm: f64, distance_m: f64, band: &BandSpec, model: &PhyModel) -> Result<f64> {
    Ok(tx_power_dbm - path_loss(distance_m, band, model)?)
}

/// SNR in dB over thermal noise `noise_floor + 10 log10(B) + NF`.
pub fn snr(rx_dbm: f64, bandwidth_mhz: f64, noise_figure_db: f64, noise_floor_dbm_hz: f64) -> f64 {
    let noise = noise_floor_dbm_hz + 10.0 * (bandwidth_mhz * 1e6).log10() + noise_figure_db;
    rx_dbm - noise
}

/// PHY rate in b/s of the highest MCS whose threshold is met, or 0 when the
/// link is unusable.
pub fn select_rate(snr_db: f64, band: &BandSpec, nss: u32, model: &PhyModel) -> f64 {
    let table = &model.mcs_table;
    match table.rows.iter().rev().find(|row| row.min_snr_db <= snr_db) {
        Some(row) => table.row_rate(row, band.bandwidth_mhz) * f64::from(nss),
        None => 0.0,
    }
}

/// Largest distance at which `tx_power_dbm` still reaches the CCA threshold
/// on `band`.
pub fn coverage_radius(tx_power_dbm: f64, band: &BandSpec, model: &PhyModel) -> f64 {
    let covered = |d: f64| rx_power(tx_power_dbm, d, band, model).is_ok_and(|rx| rx >= model.cca_threshold_dbm);
    let mut lo = model.min_distance_m;
    if !covered(lo) {
        return 0.0;
    }
    let mut hi = lo * 2.0;
    while covered(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e7 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if covered(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Undirected carrier-sense graph between the APs of one band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentionGraph {
    adj: Vec<u64>,
}

impl ContentionGraph {
    pub const MAX_NODES: usize = 64;

    pub fn empty(n: usize) -> Self {
        assert!(n <= Self::MAX_NODES, "contention graph limited to {} APs", Self::MAX_NODES);
        ContentionGraph { adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Builds the graph from AP positions and transmit powers: two APs are
    /// adjacent when either one receives the other above the CCA threshold.
    pub fn from_aps(aps: &[((f64, f64), f64)], band: &BandSpec, model: &PhyModel) -> Self {
        let mut g = Self::empty(aps.len());
        for i in 0..aps.len() {
            for j in i + 1..aps.len() {
                let (pi, txi) = aps[i];
                let (pj, txj) = aps[j];
                let d = distance(pi, pj).max(model.min_distance_m);
                let heard = |tx: f64| rx_power(tx, d, band, model).is_ok_and(|rx| rx >= model.cca_threshold_dbm);
                if heard(txi) || heard(txj) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a] |= 1 << b;
            self.adj[b] |= 1 << a;
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.adj[a];
        (0..self.adj.len()).filter(move |j| mask & (1 << j) != 0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// Maximal cliques (Bron-Kerbosch with pivoting), each sorted, listed in
    /// lexicographic order. Isolated vertices form singleton cliques.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut out = Vec::new();
        self.bron_kerbosch(0, all, 0, &mut out);
        let mut cliques: Vec<Vec<usize>> =
            out.into_iter().map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect()).collect();
        cliques.sort();
        cliques
    }

    fn bron_kerbosch(&self, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
        if p == 0 {
            if x == 0 && r != 0 {
                out.push(r);
            }
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut candidates = p & !self.adj[pivot];
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            let bit = 1u64 << v;
            candidates &= !bit;
            self.bron_kerbosch(r | bit, p & self.adj[v], x & self.adj[v], out);
            p &= !bit;
            x |= bit;
        }
    }
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}
