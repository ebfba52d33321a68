//! Virtual-to-physical resource mapping.
//!
//! Besides the standard non-interleaved and interleaved VRB-to-PRB mappings,
//! this module implements four shift-based mapping types that vacate a
//! protected time-frequency window for a passive system:
//!
//! 1. direct (identity),
//! 2. time shifted (same CRBs, +D slots),
//! 3. time and frequency shifted (+D slots, CQI-chosen contiguous block),
//! 4. BWP shifted (same slot, re-anchored in another BWP, zero added latency),
//!
//! plus a deterministic selection policy choosing among them per grant.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{BwpConfig, CellCoord};

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("grant [{rb_start}, {rb_start}+{l_rbs}) exceeds BWP size {size}")]
    GrantOutOfBwp { rb_start: u16, l_rbs: u16, size: u16 },
    #[error("grant must contain at least one RB")]
    EmptyGrant,
    #[error("interleaved mapping is only defined for allocation Type 1 grants")]
    InterleavedRequiresType1,
    #[error("bundle size {0} not in {{2,4}}")]
    InvalidBundleSize(u16),
    #[error("time shift requires a delay of at least 1 slot")]
    DelayTooSmall,
    #[error("slot {slot} is beyond the simulation horizon of {horizon} slots")]
    HorizonOverflow { slot: u32, horizon: u32 },
    #[error("no free contiguous block of {l_rbs} RBs in slot {slot}")]
    NoFeasibleBlock { slot: u32, l_rbs: u16 },
    #[error("target BWP must differ from the grant's BWP")]
    SameBwp,
    #[error("grant of {l_rbs} RBs does not fit target BWP of {target_size} RBs")]
    CapacityExceeded { l_rbs: u16, target_size: u16 },
    #[error("target BWP cells are occupied or protected in slot {slot}")]
    TargetConflict { slot: u32 },
    #[error("no feasible mapping for UE {ue_id} in slot {slot}; rescheduling required")]
    RescheduleRequired { ue_id: String, slot: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocType {
    Type0,
    Type1,
}

/// A per-UE, per-slot contiguous VRB grant with its latency constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VrbAllocation {
    pub ue_id: String,
    pub slot: u32,
    pub bwp_id: u8,
    pub rb_start: u16,
    pub l_rbs: u16,
    /// (start symbol, length) within the slot.
    pub symbols: (u8, u8),
    pub latency_budget_slots: u32,
    pub time_sensitive: bool,
    #[serde(default = "default_alloc_type")]
    pub alloc_type: AllocType,
}

fn default_alloc_type() -> AllocType {
    AllocType::Type1
}

/// The passive system's reserved time-frequency region, in absolute
/// (slot, CRB) coordinates. Both ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtectionWindow {
    pub slot_start: u32,
    pub slot_end: u32,
    pub crb_start: u16,
    pub crb_end: u16,
    pub label: String,
}

impl ProtectionWindow {
    pub fn contains(&self, cell: CellCoord) -> bool {
        (self.slot_start..=self.slot_end).contains(&cell.slot)
            && (self.crb_start..=self.crb_end).contains(&cell.crb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingKind {
    Direct,
    TimeShift,
    TimeFreqShift,
    BwpShift,
}

/// The chosen mapping type together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingDirective {
    pub kind: MappingKind,
    pub delay_slots: u32,
    pub target_bwp: Option<u8>,
    pub new_rb_start: Option<u16>,
}

impl MappingDirective {
    pub fn direct() -> Self {
        Self {
            kind: MappingKind::Direct,
            delay_slots: 0,
            target_bwp: None,
            new_rb_start: None,
        }
    }

    pub fn time_shift(d: u32) -> Self {
        Self {
            kind: MappingKind::TimeShift,
            delay_slots: d,
            target_bwp: None,
            new_rb_start: None,
        }
    }

    pub fn time_freq_shift(d: u32, new_rb_start: u16) -> Self {
        Self {
            kind: MappingKind::TimeFreqShift,
            delay_slots: d,
            target_bwp: None,
            new_rb_start: Some(new_rb_start),
        }
    }

    /// BWP shifts incur no delay.
    pub fn bwp_shift(target_bwp: u8) -> Self {
        Self {
            kind: MappingKind::BwpShift,
            delay_slots: 0,
            target_bwp: Some(target_bwp),
            new_rb_start: None,
        }
    }
}

/// The physical-layer outcome of mapping one grant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalAssignment {
    pub ue_id: String,
    pub slot: u32,
    /// Absolute CRB indices. Contiguous for the four mapping types;
    /// scattered bundles for interleaved mapping.
    pub crbs: BTreeSet<u16>,
    pub symbols: (u8, u8),
    pub via: MappingDirective,
    #[serde(default)]
    pub interleaved: bool,
}

impl PhysicalAssignment {
    pub fn cells(&self) -> impl Iterator<Item = CellCoord> + '_ {
        let slot = self.slot;
        self.crbs.iter().map(move |&crb| CellCoord::new(slot, crb))
    }
}

/// Signaling emitted alongside a mapping, consumed by the DCI layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SignalingEvent {
    BwpActivation { ue_id: String, bwp_id: u8, slot: u32 },
    ShiftNotice { ue_id: String, delay_slots: u32 },
}

/// Per-(UE, slot, CRB) channel quality indices, 0..=15.
#[derive(Debug, Clone, Default)]
pub struct CqiMap {
    default_cqi: u8,
    entries: HashMap<(String, u32, u16), u8>,
}

impl CqiMap {
    pub fn uniform(default_cqi: u8) -> Self {
        assert!(default_cqi <= 15, "CQI index must be 0..=15");
        Self {
            default_cqi,
            entries: HashMap::new(),
        }
    }

    pub fn set(&mut self, ue_id: &str, slot: u32, crb: u16, cqi: u8) {
        assert!(cqi <= 15, "CQI index must be 0..=15");
        self.entries.insert((ue_id.to_string(), slot, crb), cqi);
    }

    pub fn get(&self, ue_id: &str, slot: u32, crb: u16) -> u8 {
        self.entries
            .get(&(ue_id.to_string(), slot, crb))
            .copied()
            .unwrap_or(self.default_cqi)
    }
}

/// Exponential-moving-average CQI predictor over past observations per
/// (UE, CRB).
#[derive(Debug, Clone)]
pub struct CqiPredictor {
    alpha: f64,
    state: HashMap<(String, u16), f64>,
}

impl CqiPredictor {
    pub fn new(alpha: f64) -> Self {
        assert!((0.0..=1.0).contains(&alpha));
        Self {
            alpha,
            state: HashMap::new(),
        }
    }

    pub fn observe(&mut self, ue_id: &str, crb: u16, cqi: u8) {
        let key = (ue_id.to_string(), crb);
        let v = f64::from(cqi);
        self.state
            .entry(key)
            .and_modify(|e| *e = self.alpha * v + (1.0 - self.alpha) * *e)
            .or_insert(v);
    }

    pub fn predict(&self, ue_id: &str, crb: u16, fallback: u8) -> f64 {
        self.state
            .get(&(ue_id.to_string(), crb))
            .copied()
            .unwrap_or(f64::from(fallback))
    }
}

fn check_grant(alloc: &VrbAllocation, bwp: &BwpConfig) -> Result<(), MapError> {
    if alloc.l_rbs == 0 {
        return Err(MapError::EmptyGrant);
    }
    if alloc.rb_start >= bwp.size_rb || alloc.l_rbs > bwp.size_rb - alloc.rb_start {
        return Err(MapError::GrantOutOfBwp {
            rb_start: alloc.rb_start,
            l_rbs: alloc.l_rbs,
            size: bwp.size_rb,
        });
    }
    Ok(())
}

fn direct_crbs(alloc: &VrbAllocation, bwp: &BwpConfig) -> BTreeSet<u16> {
    (alloc.rb_start..alloc.rb_start + alloc.l_rbs)
        .map(|v| bwp.crb_start + v)
        .collect()
}

/// Standard non-interleaved mapping: VRB v goes to PRB v of the same BWP.
pub fn map_noninterleaved(
    alloc: &VrbAllocation,
    bwp: &BwpConfig,
) -> Result<PhysicalAssignment, MapError> {
    check_grant(alloc, bwp)?;
    Ok(PhysicalAssignment {
        ue_id: alloc.ue_id.clone(),
        slot: alloc.slot,
        crbs: direct_crbs(alloc, bwp),
        symbols: alloc.symbols,
        via: MappingDirective::direct(),
        interleaved: false,
    })
}

/// Bundle partition of a BWP aligned to the CRB grid: interior bundles have
/// size `l`, the first and last may be partial. Returns bundle start offsets
/// in BWP-relative VRB space plus the bundle sizes.
fn bundle_partition(bwp: &BwpConfig, l: u16) -> (Vec<u16>, Vec<u16>) {
    let lead = bwp.crb_start % l;
    let n = (bwp.size_rb + lead).div_ceil(l) as usize;
    let mut sizes = Vec::with_capacity(n);
    if n == 1 {
        sizes.push(bwp.size_rb);
    } else {
        sizes.push(l - lead);
        for _ in 1..n - 1 {
            sizes.push(l);
        }
        let tail = (bwp.crb_start + bwp.size_rb) % l;
        sizes.push(if tail == 0 { l } else { tail });
    }
    let mut starts = Vec::with_capacity(n);
    let mut acc = 0u16;
    for &s in &sizes {
        starts.push(acc);
        acc += s;
    }
    (starts, sizes)
}

/// Bundle permutation: `j = c*R + r` maps to `f(j) = r*C + c` with R = 2 and
/// C = floor(N/2); the last bundle maps to itself. The partial first bundle
/// lands on f(0) = 0, so bundle sizes are preserved across the permutation.
fn bundle_permute(j: usize, n_bundle: usize) -> usize {
    if j + 1 == n_bundle {
        return j;
    }
    let c_total = n_bundle / 2;
    let r = j % 2;
    let c = j / 2;
    r * c_total + c
}

/// Standard interleaved mapping: VRB bundles of size `bundle_l` are permuted
/// across the BWP. Only valid for allocation Type 1 grants.
pub fn map_interleaved(
    alloc: &VrbAllocation,
    bwp: &BwpConfig,
    bundle_l: u16,
) -> Result<PhysicalAssignment, MapError> {
    if alloc.alloc_type != AllocType::Type1 {
        return Err(MapError::InterleavedRequiresType1);
    }
    if !matches!(bundle_l, 2 | 4) {
        return Err(MapError::InvalidBundleSize(bundle_l));
    }
    check_grant(alloc, bwp)?;
    let (starts, sizes) = bundle_partition(bwp, bundle_l);
    let n_bundle = sizes.len();
    let mut crbs = BTreeSet::new();
    for v in alloc.rb_start..alloc.rb_start + alloc.l_rbs {
        // Locate the bundle containing VRB v.
        let b = match starts.binary_search(&v) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let offset = v - starts[b];
        let target = bundle_permute(b, n_bundle);
        let prb = starts[target] + offset;
        crbs.insert(bwp.crb_start + prb);
    }
    Ok(PhysicalAssignment {
        ue_id: alloc.ue_id.clone(),
        slot: alloc.slot,
        crbs,
        symbols: alloc.symbols,
        via: MappingDirective::direct(),
        interleaved: true,
    })
}

/// Mapping type 1: identical to the standard non-interleaved mapping.
pub fn map_direct(alloc: &VrbAllocation, bwp: &BwpConfig) -> Result<PhysicalAssignment, MapError> {
    map_noninterleaved(alloc, bwp)
}

/// Mapping type 2: same CRBs, delayed by `d` slots.
pub fn map_time_shift(
    alloc: &VrbAllocation,
    bwp: &BwpConfig,
    d: u32,
    horizon: u32,
) -> Result<PhysicalAssignment, MapError> {
    if d == 0 {
        return Err(MapError::DelayTooSmall);
    }
    check_grant(alloc, bwp)?;
    let slot = alloc.slot + d;
    if slot >= horizon {
        return Err(MapError::HorizonOverflow { slot, horizon });
    }
    Ok(PhysicalAssignment {
        ue_id: alloc.ue_id.clone(),
        slot,
        crbs: direct_crbs(alloc, bwp),
        symbols: alloc.symbols,
        via: MappingDirective::time_shift(d),
        interleaved: false,
    })
}

fn block_is_free(
    slot: u32,
    crbs: impl Iterator<Item = u16>,
    occupied: &BTreeSet<CellCoord>,
    protections: &[ProtectionWindow],
) -> bool {
    for crb in crbs {
        let cell = CellCoord::new(slot, crb);
        if occupied.contains(&cell) || protections.iter().any(|p| p.contains(cell)) {
            return false;
        }
    }
    true
}

/// Find the free contiguous block of `l_rbs` PRBs in `bwp` at `slot` with the
/// highest mean CQI for the UE. Ties break toward the lowest start.
fn best_free_block(
    ue_id: &str,
    slot: u32,
    l_rbs: u16,
    bwp: &BwpConfig,
    cqi: &CqiMap,
    occupied: &BTreeSet<CellCoord>,
    protections: &[ProtectionWindow],
) -> Option<u16> {
    let mut best: Option<(f64, u16)> = None;
    for start in 0..=bwp.size_rb.checked_sub(l_rbs)? {
        let crbs = (start..start + l_rbs).map(|v| bwp.crb_start + v);
        if !block_is_free(slot, crbs.clone(), occupied, protections) {
            continue;
        }
        let mean: f64 = crbs
            .map(|crb| f64::from(cqi.get(ue_id, slot, crb)))
            .sum::<f64>()
            / f64::from(l_rbs);
        match best {
            Some((b, _)) if mean <= b => {}
            _ => best = Some((mean, start)),
        }
    }
    best.map(|(_, s)| s)
}

/// Mapping type 3: delay by `d` slots and move to the free contiguous block
/// with the best (predicted) CQI.
pub fn map_time_freq_shift(
    alloc: &VrbAllocation,
    bwp: &BwpConfig,
    d: u32,
    cqi: &CqiMap,
    occupied: &BTreeSet<CellCoord>,
    protections: &[ProtectionWindow],
    horizon: u32,
) -> Result<PhysicalAssignment, MapError> {
    if d == 0 {
        return Err(MapError::DelayTooSmall);
    }
    check_grant(alloc, bwp)?;
    let slot = alloc.slot + d;
    if slot >= horizon {
        return Err(MapError::HorizonOverflow { slot, horizon });
    }
    let start = best_free_block(&alloc.ue_id, slot, alloc.l_rbs, bwp, cqi, occupied, protections)
        .ok_or(MapError::NoFeasibleBlock {
            slot,
            l_rbs: alloc.l_rbs,
        })?;
    Ok(PhysicalAssignment {
        ue_id: alloc.ue_id.clone(),
        slot,
        crbs: (start..start + alloc.l_rbs).map(|v| bwp.crb_start + v).collect(),
        symbols: alloc.symbols,
        via: MappingDirective::time_freq_shift(d, start),
        interleaved: false,
    })
}

/// Mapping type 4: keep the slot, re-anchor the VRB span in another BWP, and
/// signal the UE to activate it. No latency is added.
pub fn map_bwp_shift(
    alloc: &VrbAllocation,
    source_bwp: &BwpConfig,
    target_bwp: &BwpConfig,
    occupied: &BTreeSet<CellCoord>,
    protections: &[ProtectionWindow],
) -> Result<(PhysicalAssignment, SignalingEvent), MapError> {
    if target_bwp.id == source_bwp.id && target_bwp.direction == source_bwp.direction {
        return Err(MapError::SameBwp);
    }
    check_grant(alloc, source_bwp)?;
    if alloc.rb_start >= target_bwp.size_rb || alloc.l_rbs > target_bwp.size_rb - alloc.rb_start {
        return Err(MapError::CapacityExceeded {
            l_rbs: alloc.l_rbs,
            target_size: target_bwp.size_rb,
        });
    }
    let crbs: BTreeSet<u16> = (alloc.rb_start..alloc.rb_start + alloc.l_rbs)
        .map(|v| target_bwp.crb_start + v)
        .collect();
    if !block_is_free(alloc.slot, crbs.iter().copied(), occupied, protections) {
        return Err(MapError::TargetConflict { slot: alloc.slot });
    }
    let assignment = PhysicalAssignment {
        ue_id: alloc.ue_id.clone(),
        slot: alloc.slot,
        crbs,
        symbols: alloc.symbols,
        via: MappingDirective::bwp_shift(target_bwp.id),
        interleaved: false,
    };
    let event = SignalingEvent::BwpActivation {
        ue_id: alloc.ue_id.clone(),
        bwp_id: target_bwp.id,
        slot: alloc.slot,
    };
    Ok((assignment, event))
}

/// Everything the selection policy needs to judge feasibility.
pub struct MappingContext<'a> {
    /// All configured BWPs of the grant's direction, including the source.
    pub bwps: &'a [BwpConfig],
    pub protections: &'a [ProtectionWindow],
    pub cqi: &'a CqiMap,
    pub occupancy: &'a BTreeSet<CellCoord>,
    /// Reschedule threshold: delays beyond this trigger rescheduling.
    pub d_max: u32,
    /// Simulation horizon in slots.
    pub horizon: u32,
}

impl<'a> MappingContext<'a> {
    pub fn source_bwp(&self, alloc: &VrbAllocation) -> Result<&'a BwpConfig, MapError> {
        self.bwps
            .iter()
            .find(|b| b.id == alloc.bwp_id)
            .ok_or(MapError::GrantOutOfBwp {
                rb_start: alloc.rb_start,
                l_rbs: alloc.l_rbs,
                size: 0,
            })
    }

    fn feasible_bwp_shift(&self, alloc: &VrbAllocation) -> Option<u8> {
        let source = self.bwps.iter().find(|b| b.id == alloc.bwp_id)?;
        let mut candidates: Vec<&BwpConfig> =
            self.bwps.iter().filter(|b| b.id != alloc.bwp_id).collect();
        candidates.sort_by_key(|b| b.id);
        for target in candidates {
            if map_bwp_shift(alloc, source, target, self.occupancy, self.protections).is_ok() {
                return Some(target.id);
            }
        }
        None
    }
}

/// A mapping-selection policy. The default implements the direct →
/// minimal-delay → BWP-shift ordering; alternates can be swapped in.
pub trait MappingPolicy {
    fn select(
        &self,
        alloc: &VrbAllocation,
        ctx: &MappingContext<'_>,
    ) -> Result<MappingDirective, MapError>;
}

/// Deterministic default policy:
///
/// 1. direct if it avoids all protections and occupancy;
/// 2. otherwise, for time-sensitive grants (or a zero latency budget), a BWP
///    shift to the lowest-id feasible BWP;
/// 3. otherwise the minimal delay d in 1..=min(budget, d_max) admitting a
///    time shift (original CRBs free) or else a time-frequency shift;
/// 4. otherwise a BWP shift if feasible;
/// 5. otherwise rescheduling is required.
#[derive(Debug, Default, Clone, Copy)]
pub struct DefaultPolicy;

impl MappingPolicy for DefaultPolicy {
    fn select(
        &self,
        alloc: &VrbAllocation,
        ctx: &MappingContext<'_>,
    ) -> Result<MappingDirective, MapError> {
        let bwp = ctx.source_bwp(alloc)?;
        check_grant(alloc, bwp)?;
        let reschedule = || MapError::RescheduleRequired {
            ue_id: alloc.ue_id.clone(),
            slot: alloc.slot,
        };

        let direct = direct_crbs(alloc, bwp);
        if block_is_free(alloc.slot, direct.iter().copied(), ctx.occupancy, ctx.protections) {
            return Ok(MappingDirective::direct());
        }

        if alloc.time_sensitive || alloc.latency_budget_slots == 0 {
            return ctx
                .feasible_bwp_shift(alloc)
                .map(MappingDirective::bwp_shift)
                .ok_or_else(reschedule);
        }

        let max_d = alloc.latency_budget_slots.min(ctx.d_max);
        for d in 1..=max_d {
            let slot = alloc.slot + d;
            if slot >= ctx.horizon {
                break;
            }
            if block_is_free(slot, direct.iter().copied(), ctx.occupancy, ctx.protections) {
                return Ok(MappingDirective::time_shift(d));
            }
            if let Some(start) = best_free_block(
                &alloc.ue_id,
                slot,
                alloc.l_rbs,
                bwp,
                ctx.cqi,
                ctx.occupancy,
                ctx.protections,
            ) {
                return Ok(MappingDirective::time_freq_shift(d, start));
            }
        }

        ctx.feasible_bwp_shift(alloc)
            .map(MappingDirective::bwp_shift)
            .ok_or_else(reschedule)
    }
}

/// Select a mapping directive for one grant using the default policy.
pub fn select_mapping(
    alloc: &VrbAllocation,
    ctx: &MappingContext<'_>,
) -> Result<MappingDirective, MapError> {
    DefaultPolicy.select(alloc, ctx)
}

/// Apply a directive produced by [`select_mapping`], returning the physical
/// assignment and any signaling events.
pub fn apply_directive(
    alloc: &VrbAllocation,
    directive: &MappingDirective,
    ctx: &MappingContext<'_>,
) -> Result<(PhysicalAssignment, Vec<SignalingEvent>), MapError> {
    let bwp = ctx.source_bwp(alloc)?;
    match directive.kind {
        MappingKind::Direct => Ok((map_direct(alloc, bwp)?, Vec::new())),
        MappingKind::TimeShift => {
            let pa = map_time_shift(alloc, bwp, directive.delay_slots, ctx.horizon)?;
            let notice = SignalingEvent::ShiftNotice {
                ue_id: alloc.ue_id.clone(),
                delay_slots: directive.delay_slots,
            };
            Ok((pa, vec![notice]))
        }
        MappingKind::TimeFreqShift => {
            let pa = map_time_freq_shift(
                alloc,
                bwp,
                directive.delay_slots,
                ctx.cqi,
                ctx.occupancy,
                ctx.protections,
                ctx.horizon,
            )?;
            let notice = SignalingEvent::ShiftNotice {
                ue_id: alloc.ue_id.clone(),
                delay_slots: directive.delay_slots,
            };
            Ok((pa, vec![notice]))
        }
        MappingKind::BwpShift => {
            let target_id = directive.target_bwp.ok_or(MapError::SameBwp)?;
            let target = ctx
                .bwps
                .iter()
                .find(|b| b.id == target_id)
                .ok_or(MapError::SameBwp)?;
            let (pa, event) = map_bwp_shift(alloc, bwp, target, ctx.occupancy, ctx.protections)?;
            Ok((pa, vec![event]))
        }
    }
}

/// One cell of a physical assignment intersecting a protection window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtectionViolation {
    pub ue_id: String,
    pub cell: CellCoord,
    pub label: String,
}

/// One cell claimed by two assignments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapViolation {
    pub ue_a: String,
    pub ue_b: String,
    pub cell: CellCoord,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ViolationReport {
    pub protection_violations: Vec<ProtectionViolation>,
    pub overlaps: Vec<OverlapViolation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.protection_violations.is_empty() && self.overlaps.is_empty()
    }

    pub fn count(&self) -> usize {
        self.protection_violations.len() + self.overlaps.len()
    }
}

/// List every protected cell hit and every pairwise overlap. An empty report
/// means the physical grid is valid.
pub fn verify_assignment(
    assignments: &[PhysicalAssignment],
    protections: &[ProtectionWindow],
) -> ViolationReport {
    let mut report = ViolationReport::default();
    for a in assignments {
        for cell in a.cells() {
            for p in protections {
                if p.contains(cell) {
                    report.protection_violations.push(ProtectionViolation {
                        ue_id: a.ue_id.clone(),
                        cell,
                        label: p.label.clone(),
                    });
                }
            }
        }
    }
    for (i, a) in assignments.iter().enumerate() {
        for b in &assignments[i + 1..] {
            if a.slot != b.slot {
                continue;
            }
            for &crb in a.crbs.intersection(&b.crbs) {
                report.overlaps.push(OverlapViolation {
                    ue_a: a.ue_id.clone(),
                    ue_b: b.ue_id.clone(),
                    cell: CellCoord::new(a.slot, crb),
                });
            }
        }
    }
    report
}
