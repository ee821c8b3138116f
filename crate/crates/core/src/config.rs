//! Simulation configuration: a flat `key = value` text format, validated.
//!
//! Every key has a default. Later sources override earlier ones:
//! built-in defaults, then the config file, then command-line overrides.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::band::{Band, BandSpec};
use crate::error::{Error, Result};
use crate::mac::MacOverhead;
use crate::phy::{McsTable, PhyModel};
use crate::policy::PolicyKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub bands: [BandSpec; 3],
    pub ap_tx_power_dbm: f64,
    pub sta_tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub spatial_streams: u32,
    pub phy: PhyModel,
    /// `None` uses the built-in 802.11ax table.
    pub mcs_table_path: Option<PathBuf>,
    pub mac: MacOverhead,
    pub t_on_s: f64,
    pub t_off_s: f64,
    pub sim_time_s: f64,
    pub n_deployments: usize,
    pub n_bss: usize,
    pub area_side_m: f64,
    pub stations_per_bss: usize,
    pub video_rate_mbps: f64,
    pub data_rate_mbps: f64,
    pub video_ratio: f64,
    /// `None` places stations within the 2.4 GHz coverage radius of the AP.
    pub placement_radius_m: Option<f64>,
    pub sl_band: Band,
    pub base_seed: u64,
    pub policies: Vec<PolicyKind>,
    /// Policy installed at the central AP.
    pub policy_under_test: PolicyKind,
    pub out_dir: PathBuf,
    /// 0 picks the number of available cores.
    pub workers: usize,
    pub emit_summary: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            bands: BandSpec::defaults(),
            ap_tx_power_dbm: 20.0,
            sta_tx_power_dbm: 15.0,
            noise_figure_db: 7.0,
            spatial_streams: 2,
            phy: PhyModel::default(),
            mcs_table_path: None,
            mac: MacOverhead::default(),
            t_on_s: 3.0,
            t_off_s: 1.0,
            sim_time_s: 120.0,
            n_deployments: 500,
            n_bss: 5,
            area_side_m: 20.0,
            stations_per_bss: 10,
            video_rate_mbps: 20.0,
            data_rate_mbps: 5.0,
            video_ratio: 0.5,
            placement_radius_m: Some(14.5),
            sl_band: Band::B5G,
            base_seed: 1,
            policies: PolicyKind::ALL.to_vec(),
            policy_under_test: PolicyKind::Slci,
            out_dir: PathBuf::from("results"),
            workers: 0,
            emit_summary: false,
        }
    }
}

/// Every recognised key, in echo order.
pub const KEYS: &[&str] = &[
    "carrier_freq_2g4_ghz",
    "carrier_freq_5g_ghz",
    "carrier_freq_6g_ghz",
    "bandwidth_2g4_mhz",
    "bandwidth_5g_mhz",
    "bandwidth_6g_mhz",
    "ap_tx_power_dbm",
    "sta_tx_power_dbm",
    "cca_threshold_dbm",
    "noise_figure_db",
    "noise_floor_dbm_hz",
    "spatial_streams",
    "mpdu_payload_bytes",
    "max_ampdu",
    "t_on_s",
    "t_off_s",
    "cw_min",
    "per",
    "sim_time_s",
    "n_deployments",
    "n_bss",
    "area_side_m",
    "min_distance_m",
    "stations_per_bss",
    "video_rate_mbps",
    "data_rate_mbps",
    "video_ratio",
    "placement_radius_m",
    "pl_l0_db",
    "pl_exponent_near",
    "pl_exponent_far",
    "pl_breakpoint_m",
    "pl_wall_attenuation_2g4_db",
    "pl_wall_attenuation_5g_db",
    "pl_wall_attenuation_6g_db",
    "pl_wall_spacing_m",
    "mcs_table",
    "slot_time_us",
    "sifs_us",
    "difs_us",
    "preamble_and_headers_us",
    "ack_time_us",
    "sl_band",
    "base_seed",
    "policies",
    "policy_under_test",
    "out_dir",
    "workers",
    "emit_summary",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

impl SimConfig {
    /// Defaults, then `path` (if any), then `overrides` in order; validated.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<SimConfig> {
        let mut cfg = SimConfig::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            cfg.apply_text(&text)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.finish()
    }

    /// Parses config text on top of the defaults and validates the result.
    pub fn from_text(text: &str) -> Result<SimConfig> {
        let mut cfg = SimConfig::default();
        cfg.apply_text(text)?;
        cfg.finish()
    }

    /// Applies `key = value` lines. `#` starts a comment. A key may appear at
    /// most once per text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(line, format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::config(key, format!("line {}: duplicate key", lineno + 1)));
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    /// Sets one key from its text value. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "carrier_freq_2g4_ghz" => self.bands[0].carrier_freq_ghz = parse(key, v)?,
            "carrier_freq_5g_ghz" => self.bands[1].carrier_freq_ghz = parse(key, v)?,
            "carrier_freq_6g_ghz" => self.bands[2].carrier_freq_ghz = parse(key, v)?,
            "bandwidth_2g4_mhz" => self.bands[0].bandwidth_mhz = parse(key, v)?,
            "bandwidth_5g_mhz" => self.bands[1].bandwidth_mhz = parse(key, v)?,
            "bandwidth_6g_mhz" => self.bands[2].bandwidth_mhz = parse(key, v)?,
            "ap_tx_power_dbm" => self.ap_tx_power_dbm = parse(key, v)?,
            "sta_tx_power_dbm" => self.sta_tx_power_dbm = parse(key, v)?,
            "cca_threshold_dbm" => self.phy.cca_threshold_dbm = parse(key, v)?,
            "noise_figure_db" => self.noise_figure_db = parse(key, v)?,
            "noise_floor_dbm_hz" => self.phy.noise_floor_dbm_hz = parse(key, v)?,
            "spatial_streams" => self.spatial_streams = parse(key, v)?,
            "mpdu_payload_bytes" => self.mac.mpdu_payload_bytes = parse(key, v)?,
            "max_ampdu" => self.mac.max_ampdu = parse(key, v)?,
            "t_on_s" => self.t_on_s = parse(key, v)?,
            "t_off_s" => self.t_off_s = parse(key, v)?,
            "cw_min" => self.mac.cw_min = parse(key, v)?,
            "per" => self.mac.per = parse(key, v)?,
            "sim_time_s" => self.sim_time_s = parse(key, v)?,
            "n_deployments" => self.n_deployments = parse(key, v)?,
            "n_bss" => self.n_bss = parse(key, v)?,
            "area_side_m" => self.area_side_m = parse(key, v)?,
            "min_distance_m" => self.phy.min_distance_m = parse(key, v)?,
            "stations_per_bss" => self.stations_per_bss = parse(key, v)?,
            "video_rate_mbps" => self.video_rate_mbps = parse(key, v)?,
            "data_rate_mbps" => self.data_rate_mbps = parse(key, v)?,
            "video_ratio" => self.video_ratio = parse(key, v)?,
            "placement_radius_m" => {
                self.placement_radius_m = if v.eq_ignore_ascii_case("auto") { None } else { Some(parse(key, v)?) }
            }
            "pl_l0_db" => self.phy.pathloss.l0_db = parse(key, v)?,
            "pl_exponent_near" => self.phy.pathloss.exponent_near = parse(key, v)?,
            "pl_exponent_far" => self.phy.pathloss.exponent_far = parse(key, v)?,
            "pl_breakpoint_m" => self.phy.pathloss.breakpoint_m = parse(key, v)?,
            "pl_wall_attenuation_2g4_db" => self.phy.pathloss.wall_attenuation_db[0] = parse(key, v)?,
            "pl_wall_attenuation_5g_db" => self.phy.pathloss.wall_attenuation_db[1] = parse(key, v)?,
            "pl_wall_attenuation_6g_db" => self.phy.pathloss.wall_attenuation_db[2] = parse(key, v)?,
            "pl_wall_spacing_m" => self.phy.pathloss.wall_spacing_m = parse(key, v)?,
            "mcs_table" => {
                self.mcs_table_path =
                    if v.is_empty() || v.eq_ignore_ascii_case("default") { None } else { Some(PathBuf::from(v)) }
            }
            "slot_time_us" => self.mac.slot_time_us = parse(key, v)?,
            "sifs_us" => self.mac.sifs_us = parse(key, v)?,
            "difs_us" => self.mac.difs_us = parse(key, v)?,
            "preamble_and_headers_us" => self.mac.preamble_and_headers_us = parse(key, v)?,
            "ack_time_us" => self.mac.ack_time_us = parse(key, v)?,
            "sl_band" => self.sl_band = v.parse().map_err(|e: String| Error::config(key, e))?,
            "base_seed" => self.base_seed = parse(key, v)?,
            "policies" => {
                self.policies = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<PolicyKind>().map_err(|e| Error::config(key, e)))
                    .collect::<Result<_>>()?
            }
            "policy_under_test" => self.policy_under_test = v.parse().map_err(|e: String| Error::config(key, e))?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "workers" => self.workers = parse(key, v)?,
            "emit_summary" => self.emit_summary = parse(key, v)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    fn finish(mut self) -> Result<SimConfig> {
        if let Some(path) = &self.mcs_table_path {
            self.phy.mcs_table = McsTable::from_csv_path(path)?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, key: &str, reason: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::config(key, reason))
            }
        }
        let pos = |x: f64| x > 0.0 && x.is_finite();
        for (b, name) in self.bands.iter().zip(["2g4", "5g", "6g"]) {
            check(pos(b.carrier_freq_ghz), &format!("carrier_freq_{name}_ghz"), "must be > 0")?;
            check(
                [20.0, 40.0, 80.0].contains(&b.bandwidth_mhz),
                &format!("bandwidth_{name}_mhz"),
                "must be one of 20, 40, 80",
            )?;
        }
        check(self.spatial_streams >= 1, "spatial_streams", "must be >= 1")?;
        check(self.mac.mpdu_payload_bytes >= 1, "mpdu_payload_bytes", "must be >= 1")?;
        check(self.mac.max_ampdu >= 1, "max_ampdu", "must be >= 1")?;
        check((0.0..1.0).contains(&self.mac.per), "per", "must be in [0, 1)")?;
        for (key, v) in [
            ("slot_time_us", self.mac.slot_time_us),
            ("sifs_us", self.mac.sifs_us),
            ("difs_us", self.mac.difs_us),
            ("preamble_and_headers_us", self.mac.preamble_and_headers_us),
            ("ack_time_us", self.mac.ack_time_us),
        ] {
            check(v >= 0.0 && v.is_finite(), key, "must be >= 0")?;
        }
        check(pos(self.t_on_s), "t_on_s", "must be > 0")?;
        check(pos(self.t_off_s), "t_off_s", "must be > 0")?;
        check(pos(self.sim_time_s), "sim_time_s", "must be > 0")?;
        check(self.n_deployments >= 1, "n_deployments", "must be >= 1")?;
        check((1..=crate::phy::ContentionGraph::MAX_NODES).contains(&self.n_bss), "n_bss", "must be in 1..=64")?;
        check(pos(self.area_side_m), "area_side_m", "must be > 0")?;
        check(pos(self.phy.min_distance_m), "min_distance_m", "must be > 0")?;
        check(self.stations_per_bss >= 1, "stations_per_bss", "must be >= 1")?;
        check(pos(self.video_rate_mbps), "video_rate_mbps", "must be > 0")?;
        check(pos(self.data_rate_mbps), "data_rate_mbps", "must be > 0")?;
        check((0.0..=1.0).contains(&self.video_ratio), "video_ratio", "must be in [0, 1]")?;
        if let Some(r) = self.placement_radius_m {
            check(r >= self.phy.min_distance_m && r.is_finite(), "placement_radius_m", "must be >= min_distance_m")?;
        }
        let pl = &self.phy.pathloss;
        check(pl.l0_db.is_finite(), "pl_l0_db", "must be finite")?;
        check(pos(pl.exponent_near), "pl_exponent_near", "must be > 0")?;
        check(pos(pl.exponent_far), "pl_exponent_far", "must be > 0")?;
        check(pos(pl.breakpoint_m), "pl_breakpoint_m", "must be > 0")?;
        for (w, key) in pl.wall_attenuation_db.iter().zip([
            "pl_wall_attenuation_2g4_db",
            "pl_wall_attenuation_5g_db",
            "pl_wall_attenuation_6g_db",
        ]) {
            check(*w >= 0.0, key, "must be >= 0")?;
        }
        check(pos(pl.wall_spacing_m), "pl_wall_spacing_m", "must be > 0")?;
        check(!self.policies.is_empty(), "policies", "must list at least one policy")?;
        Ok(())
    }

    /// All keys with their current values, one `key = value` per line. The
    /// output parses back to an equal configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key));
        }
        out
    }

    fn get(&self, key: &str) -> String {
        match key {
            "carrier_freq_2g4_ghz" => self.bands[0].carrier_freq_ghz.to_string(),
            "carrier_freq_5g_ghz" => self.bands[1].carrier_freq_ghz.to_string(),
            "carrier_freq_6g_ghz" => self.bands[2].carrier_freq_ghz.to_string(),
            "bandwidth_2g4_mhz" => self.bands[0].bandwidth_mhz.to_string(),
            "bandwidth_5g_mhz" => self.bands[1].bandwidth_mhz.to_string(),
            "bandwidth_6g_mhz" => self.bands[2].bandwidth_mhz.to_string(),
            "ap_tx_power_dbm" => self.ap_tx_power_dbm.to_string(),
            "sta_tx_power_dbm" => self.sta_tx_power_dbm.to_string(),
            "cca_threshold_dbm" => self.phy.cca_threshold_dbm.to_string(),
            "noise_figure_db" => self.noise_figure_db.to_string(),
            "noise_floor_dbm_hz" => self.phy.noise_floor_dbm_hz.to_string(),
            "spatial_streams" => self.spatial_streams.to_string(),
            "mpdu_payload_bytes" => self.mac.mpdu_payload_bytes.to_string(),
            "max_ampdu" => self.mac.max_ampdu.to_string(),
            "t_on_s" => self.t_on_s.to_string(),
            "t_off_s" => self.t_off_s.to_string(),
            "cw_min" => self.mac.cw_min.to_string(),
            "per" => self.mac.per.to_string(),
            "sim_time_s" => self.sim_time_s.to_string(),
            "n_deployments" => self.n_deployments.to_string(),
            "n_bss" => self.n_bss.to_string(),
            "area_side_m" => self.area_side_m.to_string(),
            "min_distance_m" => self.phy.min_distance_m.to_string(),
            "stations_per_bss" => self.stations_per_bss.to_string(),
            "video_rate_mbps" => self.video_rate_mbps.to_string(),
            "data_rate_mbps" => self.data_rate_mbps.to_string(),
            "video_ratio" => self.video_ratio.to_string(),
            "placement_radius_m" => self.placement_radius_m.map_or("auto".into(), |r| r.to_string()),
            "pl_l0_db" => self.phy.pathloss.l0_db.to_string(),
            "pl_exponent_near" => self.phy.pathloss.exponent_near.to_string(),
            "pl_exponent_far" => self.phy.pathloss.exponent_far.to_string(),
            "pl_breakpoint_m" => self.phy.pathloss.breakpoint_m.to_string(),
            "pl_wall_attenuation_2g4_db" => self.phy.pathloss.wall_attenuation_db[0].to_string(),
            "pl_wall_attenuation_5g_db" => self.phy.pathloss.wall_attenuation_db[1].to_string(),
            "pl_wall_attenuation_6g_db" => self.phy.pathloss.wall_attenuation_db[2].to_string(),
            "pl_wall_spacing_m" => self.phy.pathloss.wall_spacing_m.to_string(),
            "mcs_table" => self.mcs_table_path.as_ref().map_or("default".into(), |p| p.display().to_string()),
            "slot_time_us" => self.mac.slot_time_us.to_string(),
            "sifs_us" => self.mac.sifs_us.to_string(),
            "difs_us" => self.mac.difs_us.to_string(),
            "preamble_and_headers_us" => self.mac.preamble_and_headers_us.to_string(),
            "ack_time_us" => self.mac.ack_time_us.to_string(),
            "sl_band" => self.sl_band.label().to_string(),
            "base_seed" => self.base_seed.to_string(),
            "policies" => self.policies.iter().map(|p| p.name()).collect::<Vec<_>>().join(","),
            "policy_under_test" => self.policy_under_test.name().to_string(),
            "out_dir" => self.out_dir.display().to_string(),
            "workers" => self.workers.to_string(),
            "emit_summary" => self.emit_summary.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    pub fn band(&self, band: Band) -> &BandSpec {
        &self.bands[band.index()]
    }

    pub fn rate_bps(&self, kind: crate::traffic::FlowKind) -> f64 {
        match kind {
            crate::traffic::FlowKind::Video => self.video_rate_mbps * 1e6,
            crate::traffic::FlowKind::Data => self.data_rate_mbps * 1e6,
        }
    }

    /// Station placement radius, resolving `auto` to the 2.4 GHz coverage
    /// radius of an AP.
    pub fn placement_radius(&self) -> f64 {
        self.placement_radius_m
            .unwrap_or_else(|| crate::phy::coverage_radius(self.ap_tx_power_dbm, self.band(Band::B2G4), &self.phy))
    }
}
