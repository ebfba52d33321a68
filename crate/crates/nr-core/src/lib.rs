//! 5G NR resource-mapping engine and spectrum-sharing simulator.
//!
//! The crate is organised around the NR resource-allocation pipeline:
//!
//! - [`grid`] — numerology, carrier, bandwidth-part, and resource-grid geometry
//! - [`fdra`] — frequency-domain allocation codecs (Type 0 bitmap, Type 1 RIV,
//!   Type 2 interlaced) and their DCI field-width formulas
//! - [`tdra`] — SLIV codec, TDRA lookup tables, TDD pattern expansion
//! - [`vpmap`] — virtual-to-physical mapping (non-interleaved, interleaved,
//!   and the four shift-based mapping types with protection-aware selection)
//! - [`sched`] — round-robin MAC scheduler producing contiguous Type-1 grants
//! - [`dci`] — bit-exact DCI assembly and parsing with CRC-24C/RNTI masking
//! - [`scenario`] — scenario config, simulation loop, and run reports
//! - [`render`] — text/CSV/SVG resource-grid renderings

pub mod bits;
pub mod dci;
pub mod fdra;
pub mod grid;
pub mod render;
pub mod scenario;
pub mod sched;
pub mod tdra;
pub mod vpmap;

pub use bits::BitString;
pub use grid::{BwpConfig, CarrierConfig, CellCoord, Direction, Numerology};
pub use scenario::{RunReport, Scenario};
pub use vpmap::{MappingDirective, MappingKind, PhysicalAssignment, ProtectionWindow, VrbAllocation};
