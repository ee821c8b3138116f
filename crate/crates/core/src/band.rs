//! Frequency bands and small band sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the three radio interfaces of a multi-link device.
///
/// The declaration order (2.4 < 5 < 6) is the tie-break order used by every
/// allocator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    B2G4,
    B5G,
    B6G,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::B2G4, Band::B5G, Band::B6G];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Band> {
        Band::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Band::B2G4 => "2.4",
            Band::B5G => "5",
            Band::B6G => "6",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.label())
    }
}

impl FromStr for Band {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "2.4" | "2g4" | "b2g4" | "2.4ghz" => Ok(Band::B2G4),
            "5" | "5g" | "b5g" | "5ghz" => Ok(Band::B5G),
            "6" | "6g" | "b6g" | "6ghz" => Ok(Band::B6G),
            other => Err(format!("unknown band `{other}` (expected 2.4, 5 or 6)")),
        }
    }
}

/// A subset of [`Band::ALL`], stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Band>", into = "Vec<Band>")]
pub struct BandSet(u8);

impl BandSet {
    pub const EMPTY: BandSet = BandSet(0);
    pub const ALL: BandSet = BandSet(0b111);

    pub fn single(band: Band) -> Self {
        BandSet(1 << band.index())
    }

    pub fn contains(self, band: Band) -> bool {
        self.0 & (1 << band.index()) != 0
    }

    pub fn insert(&mut self, band: Band) {
        self.0 |= 1 << band.index();
    }

    pub fn remove(&mut self, band: Band) {
        self.0 &= !(1 << band.index());
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: BandSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: BandSet) -> BandSet {
        BandSet(self.0 & other.0)
    }

    /// Bands in tie-break order.
    pub fn iter(self) -> impl Iterator<Item = Band> {
        Band::ALL.into_iter().filter(move |b| self.contains(*b))
    }
}

impl FromIterator<Band> for BandSet {
    fn from_iter<I: IntoIterator<Item = Band>>(iter: I) -> Self {
        let mut set = BandSet::EMPTY;
        for b in iter {
            set.insert(b);
        }
        set
    }
}

impl From<Vec<Band>> for BandSet {
    fn from(v: Vec<Band>) -> Self {
        v.into_iter().collect()
    }
}

impl From<BandSet> for Vec<Band> {
    fn from(s: BandSet) -> Self {
        s.iter().collect()
    }
}

impl fmt::Debug for BandSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Radio parameters of one band. All APs on a band share its channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub band: Band,
    pub carrier_freq_ghz: f64,
    pub bandwidth_mhz: f64,
    pub channel_id: u32,
}

impl BandSpec {
    pub fn defaults() -> [BandSpec; 3] {
        [
            BandSpec { band: Band::B2G4, carrier_freq_ghz: 2.437, bandwidth_mhz: 20.0, channel_id: 6 },
            BandSpec { band: Band::B5G, carrier_freq_ghz: 5.230, bandwidth_mhz: 40.0, channel_id: 46 },
            BandSpec { band: Band::B6G, carrier_freq_ghz: 6.295, bandwidth_mhz: 80.0, channel_id: 69 },
        ]
    }
}
