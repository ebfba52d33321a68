//! Minimal MAC scheduler: round-robin Type 1 grants, one or more UEs per TTI,
//! packed back-to-back from VRB 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::BwpConfig;
use crate::vpmap::{AllocType, VrbAllocation};

#[derive(Debug, Error, PartialEq)]
pub enum SchedError {
    #[error("UE {ue_id} demands {demand} RBs but the BWP holds {bwp_size}")]
    DemandExceedsBwp {
        ue_id: String,
        demand: u16,
        bwp_size: u16,
    },
    #[error("combined demand {total} RBs in slot {slot} exceeds the BWP size {bwp_size}")]
    SlotOvercommitted { slot: u32, total: u32, bwp_size: u16 },
    #[error("no UEs to schedule")]
    NoUes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UeProfile {
    pub ue_id: String,
    pub demand_rbs: u16,
    pub latency_budget_slots: u32,
    pub time_sensitive: bool,
    pub rnti: u16,
}

/// Per-slot grant lists; grants within a slot are pairwise disjoint in VRBs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScheduleEpoch {
    pub slots: BTreeMap<u32, Vec<VrbAllocation>>,
}

impl ScheduleEpoch {
    pub fn grants(&self) -> impl Iterator<Item = &VrbAllocation> {
        self.slots.values().flatten()
    }

    pub fn grant_count(&self) -> usize {
        self.slots.values().map(Vec::len).sum()
    }
}

/// Options for the round-robin scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedOptions {
    /// First scheduled slot (the worked scenario starts at slot 1).
    pub start_slot: u32,
    /// How many UEs share each TTI.
    pub ues_per_slot: usize,
    /// Symbol span applied to every grant.
    pub symbols: (u8, u8),
}

impl Default for SchedOptions {
    fn default() -> Self {
        Self {
            start_slot: 1,
            ues_per_slot: 1,
            symbols: (0, 14),
        }
    }
}

/// Grant UEs cyclically, `ues_per_slot` per TTI, each grant contiguous and
/// packed first-fit from VRB 0.
pub fn schedule_round_robin(
    ues: &[UeProfile],
    bwp: &BwpConfig,
    horizon: u32,
    options: &SchedOptions,
) -> Result<ScheduleEpoch, SchedError> {
    if ues.is_empty() {
        return Err(SchedError::NoUes);
    }
    for ue in ues {
        if ue.demand_rbs > bwp.size_rb {
            return Err(SchedError::DemandExceedsBwp {
                ue_id: ue.ue_id.clone(),
                demand: ue.demand_rbs,
                bwp_size: bwp.size_rb,
            });
        }
    }
    let per_slot = options.ues_per_slot.max(1);
    let mut epoch = ScheduleEpoch::default();
    let mut next_ue = 0usize;
    for slot in options.start_slot..horizon {
        let mut vrb_cursor = 0u32;
        let mut grants = Vec::with_capacity(per_slot);
        for _ in 0..per_slot {
            let ue = &ues[next_ue % ues.len()];
            next_ue += 1;
            let total = vrb_cursor + u32::from(ue.demand_rbs);
            if total > u32::from(bwp.size_rb) {
                return Err(SchedError::SlotOvercommitted {
                    slot,
                    total,
                    bwp_size: bwp.size_rb,
                });
            }
            grants.push(VrbAllocation {
                ue_id: ue.ue_id.clone(),
                slot,
                bwp_id: bwp.id,
                rb_start: vrb_cursor as u16,
                l_rbs: ue.demand_rbs,
                symbols: options.symbols,
                latency_budget_slots: ue.latency_budget_slots,
                time_sensitive: ue.time_sensitive,
                alloc_type: AllocType::Type1,
            });
            vrb_cursor = total;
        }
        epoch.slots.insert(slot, grants);
    }
    Ok(epoch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Direction, Numerology};

    fn bwp50() -> BwpConfig {
        BwpConfig::new(0, 0, 50, Direction::Dl, Numerology::normal(0).unwrap()).unwrap()
    }

    fn ue(id: &str, demand: u16) -> UeProfile {
        UeProfile {
            ue_id: id.to_string(),
            demand_rbs: demand,
            latency_budget_slots: 8,
            time_sensitive: false,
            rnti: 0x1234,
        }
    }

    #[test]
    fn three_ues_full_bwp() {
        let ues = [ue("ue1", 50), ue("ue2", 50), ue("ue3", 50)];
        let epoch =
            schedule_round_robin(&ues, &bwp50(), 4, &SchedOptions::default()).unwrap();
        assert_eq!(epoch.grant_count(), 3);
        for (slot, expected_ue) in [(1u32, "ue1"), (2, "ue2"), (3, "ue3")] {
            let grants = &epoch.slots[&slot];
            assert_eq!(grants.len(), 1);
            assert_eq!(grants[0].ue_id, expected_ue);
            assert_eq!((grants[0].rb_start, grants[0].l_rbs), (0, 50));
        }
    }

    #[test]
    fn single_ue_every_slot() {
        let ues = [ue("ue1", 10)];
        let epoch =
            schedule_round_robin(&ues, &bwp50(), 4, &SchedOptions::default()).unwrap();
        assert_eq!(epoch.grant_count(), 3);
        for slot in 1..4u32 {
            assert_eq!(epoch.slots[&slot][0].ue_id, "ue1");
        }
    }

    #[test]
    fn co_slotted_packing() {
        let ues = [ue("ue1", 20), ue("ue2", 30)];
        let options = SchedOptions {
            ues_per_slot: 2,
            ..SchedOptions::default()
        };
        let epoch = schedule_round_robin(&ues, &bwp50(), 2, &options).unwrap();
        let grants = &epoch.slots[&1];
        assert_eq!((grants[0].rb_start, grants[0].l_rbs), (0, 20));
        assert_eq!((grants[1].rb_start, grants[1].l_rbs), (20, 30));
    }

    #[test]
    fn no_same_slot_overlap() {
        let ues = [ue("ue1", 20), ue("ue2", 15), ue("ue3", 10)];
        let options = SchedOptions {
            ues_per_slot: 3,
            ..SchedOptions::default()
        };
        let epoch = schedule_round_robin(&ues, &bwp50(), 5, &options).unwrap();
        for grants in epoch.slots.values() {
            let mut seen = std::collections::BTreeSet::new();
            for g in grants {
                for v in g.rb_start..g.rb_start + g.l_rbs {
                    assert!(seen.insert(v), "overlap at VRB {v}");
                }
            }
        }
    }

    #[test]
    fn cyclic_fairness() {
        let ues = [ue("ue1", 50), ue("ue2", 50), ue("ue3", 50)];
        // K * |UEs| slots starting at slot 1: horizon 1 + 4*3.
        let epoch =
            schedule_round_robin(&ues, &bwp50(), 13, &SchedOptions::default()).unwrap();
        for u in &ues {
            let count = epoch.grants().filter(|g| g.ue_id == u.ue_id).count();
            assert_eq!(count, 4, "{}", u.ue_id);
        }
    }

    #[test]
    fn oversized_demand_rejected() {
        let ues = [ue("ue1", 60)];
        assert!(matches!(
            schedule_round_robin(&ues, &bwp50(), 4, &SchedOptions::default()),
            Err(SchedError::DemandExceedsBwp { .. })
        ));
        let pair = [ue("ue1", 30), ue("ue2", 30)];
        let options = SchedOptions {
            ues_per_slot: 2,
            ..SchedOptions::default()
        };
        assert!(matches!(
            schedule_round_robin(&pair, &bwp50(), 4, &options),
            Err(SchedError::SlotOvercommitted { .. })
        ));
    }
}
