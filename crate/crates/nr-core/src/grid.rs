//! Carrier, numerology, bandwidth-part, and resource-grid geometry.
//!
//! All simulator coordinates are absolute (CRB index, slot index). BWP-relative
//! VRB indices appear only at the codec boundaries, so that mappings which move
//! an allocation between BWPs stay well defined.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single NR carrier is limited to 3300 active subcarriers, i.e. 275 RBs.
pub const MAX_CARRIER_RBS: u16 = 275;
/// At most four BWPs may be configured per direction.
pub const MAX_BWPS_PER_DIRECTION: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("numerology index {0} out of range 0..=4")]
    InvalidMu(u8),
    #[error("extended cyclic prefix is only supported at 60 kHz (mu=2), got mu={0}")]
    ExtendedCpUnsupported(u8),
    #[error("carrier size {0} RBs exceeds the {MAX_CARRIER_RBS}-RB grid limit")]
    CarrierTooLarge(u16),
    #[error("carrier must contain at least one RB")]
    EmptyCarrier,
    #[error("BWP id {0} out of range 0..=3")]
    InvalidBwpId(u8),
    #[error("BWP [{start}, {start}+{size}) exceeds carrier size {carrier}")]
    BwpOutOfCarrier { start: u16, size: u16, carrier: u16 },
    #[error("BWP must contain at least one RB")]
    EmptyBwp,
    #[error("carrier already has {MAX_BWPS_PER_DIRECTION} {0:?} BWPs")]
    TooManyBwps(Direction),
    #[error("duplicate {direction:?} BWP id {id}")]
    DuplicateBwpId { direction: Direction, id: u8 },
    #[error("no {direction:?} BWP with id {id}")]
    UnknownBwp { direction: Direction, id: u8 },
    #[error("VRB {vrb} out of range for BWP of size {size}")]
    VrbOutOfRange { vrb: u16, size: u16 },
    #[error("duration {0} ms is not a whole number of subframes")]
    NonIntegralDuration(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CyclicPrefix {
    Normal,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Dl,
    Ul,
}

/// NR numerology: SCS = 15 * 2^mu kHz, 2^mu slots per subframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Numerology {
    mu: u8,
    cp: CyclicPrefix,
}

impl Numerology {
    pub fn new(mu: u8, cp: CyclicPrefix) -> Result<Self, GridError> {
        if mu > 4 {
            return Err(GridError::InvalidMu(mu));
        }
        if cp == CyclicPrefix::Extended && mu != 2 {
            return Err(GridError::ExtendedCpUnsupported(mu));
        }
        Ok(Self { mu, cp })
    }

    pub fn normal(mu: u8) -> Result<Self, GridError> {
        Self::new(mu, CyclicPrefix::Normal)
    }

    pub fn mu(&self) -> u8 {
        self.mu
    }

    pub fn cp(&self) -> CyclicPrefix {
        self.cp
    }

    pub fn scs_khz(&self) -> u32 {
        15 << self.mu
    }

    pub fn slots_per_subframe(&self) -> u32 {
        1 << self.mu
    }

    pub fn symbols_per_slot(&self) -> u8 {
        match self.cp {
            CyclicPrefix::Normal => 14,
            CyclicPrefix::Extended => 12,
        }
    }
}

/// Number of slots spanned by `duration_ms` at the given numerology.
///
/// The duration must be a whole number of 1 ms subframes.
pub fn slot_count(duration_ms: f64, numerology: Numerology) -> Result<u32, GridError> {
    if duration_ms < 0.0 || duration_ms.fract() != 0.0 {
        return Err(GridError::NonIntegralDuration(duration_ms));
    }
    Ok(duration_ms as u32 * numerology.slots_per_subframe())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarrierConfig {
    pub n_crb: u16,
    pub numerology: Numerology,
}

impl CarrierConfig {
    pub fn new(n_crb: u16, numerology: Numerology) -> Result<Self, GridError> {
        if n_crb == 0 {
            return Err(GridError::EmptyCarrier);
        }
        if n_crb > MAX_CARRIER_RBS {
            return Err(GridError::CarrierTooLarge(n_crb));
        }
        Ok(Self { n_crb, numerology })
    }

    /// Slots per 10 ms frame.
    pub fn frame_slots(&self) -> u32 {
        10 * self.numerology.slots_per_subframe()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BwpConfig {
    pub id: u8,
    pub crb_start: u16,
    pub size_rb: u16,
    pub direction: Direction,
    pub numerology: Numerology,
}

impl BwpConfig {
    pub fn new(
        id: u8,
        crb_start: u16,
        size_rb: u16,
        direction: Direction,
        numerology: Numerology,
    ) -> Result<Self, GridError> {
        if id > 3 {
            return Err(GridError::InvalidBwpId(id));
        }
        if size_rb == 0 {
            return Err(GridError::EmptyBwp);
        }
        Ok(Self {
            id,
            crb_start,
            size_rb,
            direction,
            numerology,
        })
    }

    /// CRB indices covered by this BWP, in increasing order.
    pub fn crb_range(&self) -> std::ops::Range<u16> {
        self.crb_start..self.crb_start + self.size_rb
    }

    pub fn contains_crb(&self, crb: u16) -> bool {
        self.crb_range().contains(&crb)
    }
}

/// Translate a BWP-relative VRB index to an absolute CRB index.
pub fn vrb_to_crb(vrb: u16, bwp: &BwpConfig) -> Result<u16, GridError> {
    if vrb >= bwp.size_rb {
        return Err(GridError::VrbOutOfRange {
            vrb,
            size: bwp.size_rb,
        });
    }
    Ok(bwp.crb_start + vrb)
}

/// Absolute time-frequency cell: one (slot, CRB) position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellCoord {
    pub slot: u32,
    pub crb: u16,
}

impl CellCoord {
    pub fn new(slot: u32, crb: u16) -> Self {
        Self { slot, crb }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActiveBwpState {
    pub active_dl: Option<u8>,
    pub active_ul: Option<u8>,
}

/// A carrier with its registered BWPs and the active-BWP state.
#[derive(Debug, Clone)]
pub struct Carrier {
    config: CarrierConfig,
    bwps: Vec<BwpConfig>,
    active: ActiveBwpState,
}

impl Carrier {
    pub fn new(config: CarrierConfig) -> Self {
        Self {
            config,
            bwps: Vec::new(),
            active: ActiveBwpState::default(),
        }
    }

    pub fn config(&self) -> &CarrierConfig {
        &self.config
    }

    pub fn bwps(&self) -> &[BwpConfig] {
        &self.bwps
    }

    pub fn add_bwp(&mut self, bwp: BwpConfig) -> Result<(), GridError> {
        if u32::from(bwp.crb_start) + u32::from(bwp.size_rb) > u32::from(self.config.n_crb) {
            return Err(GridError::BwpOutOfCarrier {
                start: bwp.crb_start,
                size: bwp.size_rb,
                carrier: self.config.n_crb,
            });
        }
        let same_dir = self
            .bwps
            .iter()
            .filter(|b| b.direction == bwp.direction)
            .count();
        if same_dir >= MAX_BWPS_PER_DIRECTION {
            return Err(GridError::TooManyBwps(bwp.direction));
        }
        if self
            .bwps
            .iter()
            .any(|b| b.direction == bwp.direction && b.id == bwp.id)
        {
            return Err(GridError::DuplicateBwpId {
                direction: bwp.direction,
                id: bwp.id,
            });
        }
        self.bwps.push(bwp);
        Ok(())
    }

    pub fn bwp(&self, direction: Direction, id: u8) -> Result<&BwpConfig, GridError> {
        self.bwps
            .iter()
            .find(|b| b.direction == direction && b.id == id)
            .ok_or(GridError::UnknownBwp { direction, id })
    }

    /// Activate a BWP, replacing the previous active one of the same direction.
    pub fn activate(&mut self, direction: Direction, id: u8) -> Result<(), GridError> {
        self.bwp(direction, id)?;
        match direction {
            Direction::Dl => self.active.active_dl = Some(id),
            Direction::Ul => self.active.active_ul = Some(id),
        }
        Ok(())
    }

    pub fn active(&self) -> ActiveBwpState {
        self.active
    }

    pub fn active_bwp(&self, direction: Direction) -> Option<&BwpConfig> {
        let id = match direction {
            Direction::Dl => self.active.active_dl,
            Direction::Ul => self.active.active_ul,
        }?;
        self.bwp(direction, id).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu0() -> Numerology {
        Numerology::normal(0).unwrap()
    }

    #[test]
    fn scs_table() {
        for (mu, scs) in [(0u8, 15u32), (1, 30), (2, 60), (3, 120), (4, 240)] {
            let n = Numerology::normal(mu).unwrap();
            assert_eq!(n.scs_khz(), scs);
            assert_eq!(n.slots_per_subframe(), 1 << mu);
        }
        assert_eq!(Numerology::normal(5), Err(GridError::InvalidMu(5)));
    }

    #[test]
    fn extended_cp_only_at_60khz() {
        assert!(Numerology::new(2, CyclicPrefix::Extended).is_ok());
        assert_eq!(
            Numerology::new(1, CyclicPrefix::Extended),
            Err(GridError::ExtendedCpUnsupported(1))
        );
        assert_eq!(
            Numerology::new(2, CyclicPrefix::Extended)
                .unwrap()
                .symbols_per_slot(),
            12
        );
        assert_eq!(mu0().symbols_per_slot(), 14);
    }

    #[test]
    fn slot_counts() {
        assert_eq!(slot_count(10.0, mu0()).unwrap(), 10);
        assert_eq!(slot_count(2.0, Numerology::normal(1).unwrap()).unwrap(), 4);
        assert_eq!(slot_count(10.0, Numerology::normal(3).unwrap()).unwrap(), 80);
        assert!(matches!(
            slot_count(1.5, mu0()),
            Err(GridError::NonIntegralDuration(_))
        ));
    }

    #[test]
    fn vrb_to_crb_offsets() {
        let bwp = BwpConfig::new(0, 10, 31, Direction::Dl, mu0()).unwrap();
        assert_eq!(vrb_to_crb(0, &bwp).unwrap(), 10);
        assert_eq!(vrb_to_crb(4, &bwp).unwrap(), 14);
        assert_eq!(vrb_to_crb(30, &bwp).unwrap(), 40);
        assert_eq!(
            vrb_to_crb(31, &bwp),
            Err(GridError::VrbOutOfRange { vrb: 31, size: 31 })
        );
    }

    #[test]
    fn vrb_to_crb_image_is_bwp_range() {
        let bwp = BwpConfig::new(1, 17, 23, Direction::Dl, mu0()).unwrap();
        let image: Vec<u16> = (0..bwp.size_rb)
            .map(|v| vrb_to_crb(v, &bwp).unwrap())
            .collect();
        let expected: Vec<u16> = bwp.crb_range().collect();
        assert_eq!(image, expected);
    }

    #[test]
    fn fifth_bwp_rejected() {
        let cfg = CarrierConfig::new(275, mu0()).unwrap();
        let mut carrier = Carrier::new(cfg);
        for id in 0..4 {
            carrier
                .add_bwp(BwpConfig::new(id, u16::from(id) * 50, 50, Direction::Dl, mu0()).unwrap())
                .unwrap();
        }
        let fifth = BwpConfig::new(0, 200, 50, Direction::Dl, mu0()).unwrap();
        assert_eq!(carrier.add_bwp(fifth), Err(GridError::TooManyBwps(Direction::Dl)));
        // The UL side has its own budget.
        let ul = BwpConfig::new(0, 0, 50, Direction::Ul, mu0()).unwrap();
        carrier.add_bwp(ul).unwrap();
    }

    #[test]
    fn activation_replaces_previous() {
        let cfg = CarrierConfig::new(100, mu0()).unwrap();
        let mut carrier = Carrier::new(cfg);
        carrier
            .add_bwp(BwpConfig::new(0, 0, 50, Direction::Dl, mu0()).unwrap())
            .unwrap();
        carrier
            .add_bwp(BwpConfig::new(1, 50, 50, Direction::Dl, mu0()).unwrap())
            .unwrap();
        carrier.activate(Direction::Dl, 0).unwrap();
        assert_eq!(carrier.active().active_dl, Some(0));
        carrier.activate(Direction::Dl, 1).unwrap();
        assert_eq!(carrier.active().active_dl, Some(1));
        assert!(carrier.activate(Direction::Dl, 3).is_err());
    }

    #[test]
    fn bwp_must_fit_carrier() {
        let cfg = CarrierConfig::new(60, mu0()).unwrap();
        let mut carrier = Carrier::new(cfg);
        let bwp = BwpConfig::new(0, 20, 50, Direction::Dl, mu0()).unwrap();
        assert!(matches!(
            carrier.add_bwp(bwp),
            Err(GridError::BwpOutOfCarrier { .. })
        ));
    }
}
