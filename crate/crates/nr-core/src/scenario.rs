//! Scenario configuration, the simulation loop, and run reports.
//!
//! A scenario file is versioned JSON describing the carrier, BWPs, UE
//! profiles, protection windows, and policy parameters. Running a scenario
//! schedules grants, selects and applies a mapping per grant, accounts the
//! DCI signaling, and verifies the resulting physical grid.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dci::{self, DciConfig, DciFormatId, DciRequest, FreqAlloc};
use crate::fdra;
use crate::grid::{BwpConfig, CarrierConfig, CellCoord, CyclicPrefix, Direction, GridError, Numerology};
use crate::sched::{self, SchedError, SchedOptions, UeProfile};
use crate::vpmap::{
    self, CqiMap, MapError, MappingContext, MappingDirective, MappingKind, PhysicalAssignment,
    ProtectionWindow, SignalingEvent,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    SchemaVersion(u32),
    #[error("scenario references unknown BWP id {0}")]
    UnknownBwp(u8),
    #[error("duplicate UE id {0}")]
    DuplicateUe(String),
    #[error("CQI trace references unknown UE {0}")]
    UnknownUe(String),
    #[error("protection window {label} extends to slot {slot} beyond horizon {horizon}")]
    ProtectionBeyondHorizon {
        label: String,
        slot: u32,
        horizon: u32,
    },
    #[error("protection window {0} has an empty slot or CRB range")]
    EmptyProtection(String),
    #[error("horizon must be at least 1 slot")]
    EmptyHorizon,
    #[error("unknown policy {0:?}; available: default")]
    UnknownPolicy(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sched(#[from] SchedError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Dci(#[from] dci::DciError),
}

impl RunError {
    /// Whether the run failed because a grant needs rescheduling.
    pub fn is_reschedule(&self) -> bool {
        matches!(self, RunError::Map(MapError::RescheduleRequired { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarrierSpec {
    pub n_crb: u16,
    pub mu: u8,
    #[serde(default = "default_cp")]
    pub cp: CyclicPrefix,
}

fn default_cp() -> CyclicPrefix {
    CyclicPrefix::Normal
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BwpSpec {
    pub id: u8,
    pub crb_start: u16,
    pub size_rb: u16,
    #[serde(default = "default_direction")]
    pub direction: Direction,
    /// Shared-spectrum tag; affects reporting only.
    #[serde(default)]
    pub shared_spectrum: bool,
}

fn default_direction() -> Direction {
    Direction::Dl
}

/// Inclusive slot and CRB ranges reserved for a passive system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtectionSpec {
    pub slots: [u32; 2],
    pub crbs: [u16; 2],
    pub label: String,
}

impl ProtectionSpec {
    pub fn to_window(&self) -> ProtectionWindow {
        ProtectionWindow {
            slot_start: self.slots[0],
            slot_end: self.slots[1],
            crb_start: self.crbs[0],
            crb_end: self.crbs[1],
            label: self.label.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    #[serde(default = "default_policy_name")]
    pub name: String,
    #[serde(default = "default_d_max")]
    pub d_max: u32,
    /// Interleaved mapping bundle size; None keeps non-interleaved mapping.
    #[serde(default)]
    pub bundle_l: Option<u16>,
    #[serde(default = "default_alloc_type")]
    pub alloc_type: u8,
    #[serde(default)]
    pub dynamic_switch: bool,
    #[serde(default = "default_rbg_p")]
    pub rbg_p: u16,
}

fn default_policy_name() -> String {
    "default".to_string()
}

fn default_d_max() -> u32 {
    8
}

fn default_alloc_type() -> u8 {
    1
}

fn default_rbg_p() -> u16 {
    4
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            name: default_policy_name(),
            d_max: default_d_max(),
            bundle_l: None,
            alloc_type: default_alloc_type(),
            dynamic_switch: false,
            rbg_p: default_rbg_p(),
        }
    }
}

/// One rectangular CQI observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CqiTrace {
    pub ue_id: String,
    pub slots: [u32; 2],
    pub crbs: [u16; 2],
    pub cqi: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub carrier: CarrierSpec,
    pub bwps: Vec<BwpSpec>,
    pub ues: Vec<UeProfile>,
    #[serde(default)]
    pub protections: Vec<ProtectionSpec>,
    #[serde(default)]
    pub policy: PolicyConfig,
    pub horizon_slots: u32,
    #[serde(default = "default_start_slot")]
    pub start_slot: u32,
    #[serde(default = "default_ues_per_slot")]
    pub ues_per_slot: usize,
    #[serde(default = "default_symbols")]
    pub symbols: (u8, u8),
    /// BWP the scheduler grants on.
    #[serde(default)]
    pub active_bwp: u8,
    #[serde(default = "default_cqi_value")]
    pub default_cqi: u8,
    #[serde(default)]
    pub cqi: Vec<CqiTrace>,
    /// Recorded in the report; the run itself is deterministic.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_start_slot() -> u32 {
    1
}

fn default_ues_per_slot() -> usize {
    1
}

fn default_symbols() -> (u8, u8) {
    (0, 14)
}

fn default_cqi_value() -> u8 {
    7
}

impl Scenario {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::SchemaVersion(self.schema_version));
        }
        if self.horizon_slots == 0 {
            return Err(ScenarioError::EmptyHorizon);
        }
        if self.policy.name != "default" {
            return Err(ScenarioError::UnknownPolicy(self.policy.name.clone()));
        }
        let numerology = Numerology::new(self.carrier.mu, self.carrier.cp)?;
        let carrier = CarrierConfig::new(self.carrier.n_crb, numerology)?;
        let mut registry = crate::grid::Carrier::new(carrier);
        for spec in &self.bwps {
            let bwp = BwpConfig::new(spec.id, spec.crb_start, spec.size_rb, spec.direction, numerology)?;
            registry.add_bwp(bwp)?;
        }
        if !self.bwps.iter().any(|b| b.id == self.active_bwp) {
            return Err(ScenarioError::UnknownBwp(self.active_bwp));
        }
        let mut seen = BTreeSet::new();
        for ue in &self.ues {
            if !seen.insert(&ue.ue_id) {
                return Err(ScenarioError::DuplicateUe(ue.ue_id.clone()));
            }
        }
        for trace in &self.cqi {
            if !self.ues.iter().any(|u| u.ue_id == trace.ue_id) {
                return Err(ScenarioError::UnknownUe(trace.ue_id.clone()));
            }
        }
        for p in &self.protections {
            if p.slots[1] < p.slots[0] || p.crbs[1] < p.crbs[0] {
                return Err(ScenarioError::EmptyProtection(p.label.clone()));
            }
            if p.slots[1] >= self.horizon_slots {
                return Err(ScenarioError::ProtectionBeyondHorizon {
                    label: p.label.clone(),
                    slot: p.slots[1],
                    horizon: self.horizon_slots,
                });
            }
        }
        Ok(())
    }

    fn numerology(&self) -> Result<Numerology, GridError> {
        Numerology::new(self.carrier.mu, self.carrier.cp)
    }

    pub fn bwp_configs(&self) -> Result<Vec<BwpConfig>, GridError> {
        let numerology = self.numerology()?;
        self.bwps
            .iter()
            .map(|s| BwpConfig::new(s.id, s.crb_start, s.size_rb, s.direction, numerology))
            .collect()
    }

    pub fn protection_windows(&self) -> Vec<ProtectionWindow> {
        self.protections.iter().map(ProtectionSpec::to_window).collect()
    }

    pub fn cqi_map(&self) -> CqiMap {
        let mut map = CqiMap::uniform(self.default_cqi);
        for trace in &self.cqi {
            for slot in trace.slots[0]..=trace.slots[1] {
                for crb in trace.crbs[0]..=trace.crbs[1] {
                    map.set(&trace.ue_id, slot, crb, trace.cqi);
                }
            }
        }
        map
    }
}

/// Record of the directive chosen for one grant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectiveRecord {
    pub ue_id: String,
    pub slot: u32,
    pub directive: MappingDirective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UeStats {
    pub ue_id: String,
    pub grants: u32,
    /// Sum of mapping delays over this UE's grants.
    pub added_latency_slots: u32,
    /// Sum of |new CRB start - direct CRB start| over this UE's grants.
    pub spectral_displacement_rbs: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub horizon_slots: u32,
    pub n_crb: u16,
    pub per_ue: Vec<UeStats>,
    /// Total DCI bits (payload + CRC) sent for this run.
    pub signaling_overhead_bits: u64,
    pub violation_count: u32,
    pub directives: Vec<DirectiveRecord>,
    pub events: Vec<SignalingEvent>,
    pub assignments: Vec<PhysicalAssignment>,
    pub protections: Vec<ProtectionSpec>,
    pub seed: Option<u64>,
}

impl RunReport {
    pub fn occupied_cells(&self) -> BTreeSet<CellCoord> {
        self.assignments.iter().flat_map(|a| a.cells()).collect()
    }
}

/// Run one scenario: schedule, select and apply a mapping per grant, account
/// signaling, verify. Deterministic given the scenario.
pub fn run_scenario(scenario: &Scenario) -> Result<RunReport, RunError> {
    scenario.validate()?;
    let bwps = scenario.bwp_configs().map_err(ScenarioError::from)?;
    let active = bwps
        .iter()
        .find(|b| b.id == scenario.active_bwp)
        .expect("validated");
    let protections = scenario.protection_windows();
    let cqi = scenario.cqi_map();

    let options = SchedOptions {
        start_slot: scenario.start_slot,
        ues_per_slot: scenario.ues_per_slot,
        symbols: scenario.symbols,
    };
    let epoch = sched::schedule_round_robin(&scenario.ues, active, scenario.horizon_slots, &options)?;

    let dci_config = DciConfig {
        rbg_p: scenario.policy.rbg_p,
        dynamic_switch: scenario.policy.dynamic_switch,
    };

    let mut occupancy: BTreeSet<CellCoord> = BTreeSet::new();
    let mut assignments = Vec::new();
    let mut directives = Vec::new();
    let mut events = Vec::new();
    let mut signaling_overhead_bits = 0u64;
    let mut per_ue: Vec<UeStats> = scenario
        .ues
        .iter()
        .map(|u| UeStats {
            ue_id: u.ue_id.clone(),
            grants: 0,
            added_latency_slots: 0,
            spectral_displacement_rbs: 0,
        })
        .collect();

    for grants in epoch.slots.values() {
        for grant in grants {
            let ctx = MappingContext {
                bwps: &bwps,
                protections: &protections,
                cqi: &cqi,
                occupancy: &occupancy,
                d_max: scenario.policy.d_max,
                horizon: scenario.horizon_slots,
            };
            let directive = vpmap::select_mapping(grant, &ctx)?;
            let (assignment, mut grant_events) = vpmap::apply_directive(grant, &directive, &ctx)?;

            let ue = scenario
                .ues
                .iter()
                .find(|u| u.ue_id == grant.ue_id)
                .expect("grant UE comes from the scenario");
            signaling_overhead_bits += account_dci(
                grant,
                &directive,
                ue,
                &bwps,
                active,
                &dci_config,
                scenario.policy.alloc_type,
            )?;

            let stats = per_ue
                .iter_mut()
                .find(|s| s.ue_id == grant.ue_id)
                .expect("stats preallocated");
            stats.grants += 1;
            stats.added_latency_slots += directive.delay_slots;
            let direct_start = active.crb_start + grant.rb_start;
            let new_start = assignment
                .crbs
                .iter()
                .next()
                .copied()
                .unwrap_or(direct_start);
            stats.spectral_displacement_rbs += u32::from(new_start.abs_diff(direct_start));

            occupancy.extend(assignment.cells());
            directives.push(DirectiveRecord {
                ue_id: grant.ue_id.clone(),
                slot: grant.slot,
                directive,
            });
            events.append(&mut grant_events);
            assignments.push(assignment);
        }
    }

    let report = vpmap::verify_assignment(&assignments, &protections);

    Ok(RunReport {
        horizon_slots: scenario.horizon_slots,
        n_crb: scenario.carrier.n_crb,
        per_ue,
        signaling_overhead_bits,
        violation_count: report.count() as u32,
        directives,
        events,
        assignments,
        protections: scenario.protections.clone(),
        seed: scenario.seed,
    })
}

/// Build the scheduling DCI for one grant and return its total bit count.
fn account_dci(
    grant: &vpmap::VrbAllocation,
    directive: &MappingDirective,
    ue: &UeProfile,
    bwps: &[BwpConfig],
    active: &BwpConfig,
    config: &DciConfig,
    alloc_type: u8,
) -> Result<u64, dci::DciError> {
    // The DCI describes the VRB grant; a BWP shift additionally retargets
    // the BWP indicator to the activated BWP.
    let bwp_for_widths = match (directive.kind, directive.target_bwp) {
        (MappingKind::BwpShift, Some(id)) => bwps.iter().find(|b| b.id == id).unwrap_or(active),
        _ => active,
    };
    let freq = if alloc_type == 0 {
        // Type 0 bitmap of the RBGs the grant intersects.
        let partition = fdra::rbg_partition(bwp_for_widths, config.rbg_p)?;
        let mut rbgs = BTreeSet::new();
        for i in 0..partition.n_rbg() {
            let (start, end) = partition.vrb_span(i)?;
            if start < grant.rb_start + grant.l_rbs && end > grant.rb_start {
                rbgs.insert(i);
            }
        }
        FreqAlloc::Type0 { rbgs }
    } else {
        FreqAlloc::Type1 {
            rb_start: grant.rb_start,
            l_rbs: grant.l_rbs,
        }
    };
    let request = DciRequest {
        format: DciFormatId::F1_1,
        freq,
        tdra_index: 0,
        bwp_indicator: Some(bwp_for_widths.id),
        rnti: ue.rnti,
    };
    let message = dci::build_dci(&request, bwp_for_widths, config)?;
    Ok(message.full_bits().len() as u64)
}
