//! Time-domain resource assignment: SLIV codec, TDRA lookup tables, and
//! TDD slot-format pattern expansion with dedicated overrides.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SYMBOLS_PER_SLOT: u8 = 14;
pub const MAX_TDRA_ROWS: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum TdraError {
    #[error("invalid symbol span: start {s}, length {l} exceeds the {SYMBOLS_PER_SLOT}-symbol slot")]
    InvalidSymbolSpan { s: u8, l: u8 },
    #[error("SLIV {0} is not in the image of the encoder")]
    InvalidSliv(u8),
    #[error("TDRA table holds at most {MAX_TDRA_ROWS} rows, got {0}")]
    TooManyRows(usize),
    #[error("TDRA field value {m} is beyond the {rows}-row table")]
    RowOutOfRange { m: u8, rows: usize },
    #[error("mapping type A requires start symbol <= 3, got {0}")]
    TypeAStartTooLate(u8),
    #[error("TDD pattern: {dl_slots} DL + {ul_slots} UL slots exceed periodicity {periodicity}")]
    PatternOverfull {
        dl_slots: u32,
        ul_slots: u32,
        periodicity: u32,
    },
    #[error("TDD pattern: boundary symbols overlap ({dl_symbols} DL + {ul_symbols} UL in one slot)")]
    BoundarySymbolClash { dl_symbols: u8, ul_symbols: u8 },
    #[error("TDD pattern: {0} boundary symbols configured but no partial slot exists")]
    NoBoundarySlot(u8),
    #[error("periodicity must be at least 1 slot")]
    EmptyPattern,
    #[error("override touches slot {0} outside the configuration period")]
    OverrideOutOfPeriod(u32),
    #[error("override on slot {slot} symbol {symbol} which is already {current:?}")]
    OverrideOnAllocated {
        slot: u32,
        symbol: u8,
        current: SymbolClass,
    },
}

/// Encode a (start symbol, length) span as a start-and-length indicator value.
pub fn sliv_encode(s: u8, l: u8) -> Result<u8, TdraError> {
    if s > 13 || l == 0 || s + l > SYMBOLS_PER_SLOT {
        return Err(TdraError::InvalidSymbolSpan { s, l });
    }
    let sliv = if l - 1 <= 7 {
        14 * (l - 1) + s
    } else {
        14 * (14 - l + 1) + (14 - 1 - s)
    };
    debug_assert!(sliv < 105);
    Ok(sliv)
}

/// Inverse of [`sliv_encode`].
pub fn sliv_decode(sliv: u8) -> Result<(u8, u8), TdraError> {
    if sliv >= 105 {
        return Err(TdraError::InvalidSliv(sliv));
    }
    let (s, l) = (sliv % 14, sliv / 14 + 1);
    let (s, l) = if l - 1 <= 7 && s + l <= SYMBOLS_PER_SLOT {
        (s, l)
    } else {
        (13 - sliv % 14, 14 - sliv / 14 + 1)
    };
    if sliv_encode(s, l)? != sliv {
        return Err(TdraError::InvalidSliv(sliv));
    }
    Ok((s, l))
}

/// PDSCH/PUSCH mapping type: A anchors DM-RS near the slot start, B is
/// position-free for low-latency mini-slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MappingType {
    A,
    B,
}

/// One row of a TDRA lookup table: slot offset (K0 for DL, K2 for UL),
/// SLIV, and mapping type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdraRow {
    pub k_offset: u32,
    pub sliv: u8,
    pub mapping_type: MappingType,
}

impl TdraRow {
    pub fn new(k_offset: u32, sliv: u8, mapping_type: MappingType) -> Result<Self, TdraError> {
        let (s, _l) = sliv_decode(sliv)?;
        if mapping_type == MappingType::A && s > 3 {
            return Err(TdraError::TypeAStartTooLate(s));
        }
        Ok(Self {
            k_offset,
            sliv,
            mapping_type,
        })
    }

    pub fn symbol_span(&self) -> (u8, u8) {
        sliv_decode(self.sliv).expect("validated at construction")
    }
}

/// Up to 16 rows addressed by the 4-bit TDRA field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdraTable {
    rows: Vec<TdraRow>,
}

impl TdraTable {
    pub fn new(rows: Vec<TdraRow>) -> Result<Self, TdraError> {
        if rows.len() > MAX_TDRA_ROWS {
            return Err(TdraError::TooManyRows(rows.len()));
        }
        Ok(Self { rows })
    }

    /// Field value m selects row number m+1 (index m).
    pub fn row(&self, m: u8) -> Result<&TdraRow, TdraError> {
        self.rows.get(usize::from(m)).ok_or(TdraError::RowOutOfRange {
            m,
            rows: self.rows.len(),
        })
    }

    pub fn rows(&self) -> &[TdraRow] {
        &self.rows
    }

    /// Default table carrying the worked-example rows (K offset 0 and 1,
    /// span starting at symbol 7 with 6 symbols, mapping type B).
    pub fn default_table() -> Self {
        let sliv = sliv_encode(7, 6).expect("valid span");
        Self {
            rows: vec![
                TdraRow::new(0, sliv, MappingType::B).unwrap(),
                TdraRow::new(1, sliv, MappingType::B).unwrap(),
            ],
        }
    }
}

/// Slot where the scheduled data lands, given the PDCCH slot, the K0/K2
/// offset, and the numerologies of the control and data channels.
pub fn resolve_data_slot(pdcch_slot: u32, k_offset: u32, mu_pdcch: u8, mu_data: u8) -> u32 {
    (u64::from(pdcch_slot) * (1u64 << mu_data) >> mu_pdcch) as u32 + k_offset
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolClass {
    Dl,
    Ul,
    Flexible,
}

/// Cell-wide TDD pattern: full DL slots from the period start, full UL slots
/// at the period end, partial boundary slots in between, rest flexible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TddPattern {
    pub periodicity_slots: u32,
    pub dl_slots: u32,
    pub dl_symbols: u8,
    pub ul_slots: u32,
    pub ul_symbols: u8,
}

/// Per-symbol classification over one (possibly concatenated) period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TddGrid {
    /// `slots[slot][symbol]`
    pub slots: Vec<Vec<SymbolClass>>,
}

impl TddGrid {
    pub fn n_slots(&self) -> u32 {
        self.slots.len() as u32
    }

    pub fn class(&self, slot: u32, symbol: u8) -> SymbolClass {
        self.slots[slot as usize][usize::from(symbol)]
    }
}

fn expand_one(pattern: &TddPattern) -> Result<Vec<Vec<SymbolClass>>, TdraError> {
    let p = pattern.periodicity_slots;
    if p == 0 {
        return Err(TdraError::EmptyPattern);
    }
    if pattern.dl_slots + pattern.ul_slots > p {
        return Err(TdraError::PatternOverfull {
            dl_slots: pattern.dl_slots,
            ul_slots: pattern.ul_slots,
            periodicity: p,
        });
    }
    let spare_slots = p - pattern.dl_slots - pattern.ul_slots;
    if spare_slots == 0 {
        if pattern.dl_symbols > 0 {
            return Err(TdraError::NoBoundarySlot(pattern.dl_symbols));
        }
        if pattern.ul_symbols > 0 {
            return Err(TdraError::NoBoundarySlot(pattern.ul_symbols));
        }
    }
    if spare_slots == 1
        && u32::from(pattern.dl_symbols) + u32::from(pattern.ul_symbols) > u32::from(SYMBOLS_PER_SLOT)
    {
        return Err(TdraError::BoundarySymbolClash {
            dl_symbols: pattern.dl_symbols,
            ul_symbols: pattern.ul_symbols,
        });
    }
    if pattern.dl_symbols > SYMBOLS_PER_SLOT || pattern.ul_symbols > SYMBOLS_PER_SLOT {
        return Err(TdraError::BoundarySymbolClash {
            dl_symbols: pattern.dl_symbols,
            ul_symbols: pattern.ul_symbols,
        });
    }

    let mut slots = vec![vec![SymbolClass::Flexible; usize::from(SYMBOLS_PER_SLOT)]; p as usize];
    for slot in slots.iter_mut().take(pattern.dl_slots as usize) {
        slot.fill(SymbolClass::Dl);
    }
    for slot in slots.iter_mut().rev().take(pattern.ul_slots as usize) {
        slot.fill(SymbolClass::Ul);
    }
    if spare_slots > 0 {
        // DL symbols at the head of the slot following the last full DL slot.
        let dl_boundary = pattern.dl_slots as usize;
        for sym in 0..usize::from(pattern.dl_symbols) {
            slots[dl_boundary][sym] = SymbolClass::Dl;
        }
        // UL symbols at the tail of the slot preceding the first full UL slot.
        let ul_boundary = (p - pattern.ul_slots - 1) as usize;
        for sym in 0..usize::from(pattern.ul_symbols) {
            let idx = usize::from(SYMBOLS_PER_SLOT) - 1 - sym;
            slots[ul_boundary][idx] = SymbolClass::Ul;
        }
    }
    Ok(slots)
}

/// Expand one TDD pattern (optionally concatenated with a second) into a
/// per-slot, per-symbol classification grid.
pub fn expand_tdd(pattern: &TddPattern, second: Option<&TddPattern>) -> Result<TddGrid, TdraError> {
    let mut slots = expand_one(pattern)?;
    if let Some(p2) = second {
        slots.extend(expand_one(p2)?);
    }
    Ok(TddGrid { slots })
}

/// A UE-dedicated override of flexible entries within the configuration period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotOverride {
    pub slot: u32,
    pub kind: OverrideKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverrideKind {
    FullSlot(SymbolClass),
    /// `dl_from_start` symbols become DL, `ul_from_end` become UL, the rest
    /// of the slot keeps its current class.
    Symbols {
        dl_from_start: u8,
        ul_from_end: u8,
    },
}

/// Apply dedicated overrides to an expanded grid. Overrides may only turn
/// FLEXIBLE entries into DL or UL; anything else is rejected.
pub fn apply_dedicated_overrides(
    base: &TddGrid,
    overrides: &[SlotOverride],
) -> Result<TddGrid, TdraError> {
    let mut grid = base.clone();
    for ov in overrides {
        let slot_idx = ov.slot as usize;
        if slot_idx >= grid.slots.len() {
            return Err(TdraError::OverrideOutOfPeriod(ov.slot));
        }
        let targets: Vec<(usize, SymbolClass)> = match ov.kind {
            OverrideKind::FullSlot(class) => (0..usize::from(SYMBOLS_PER_SLOT))
                .map(|i| (i, class))
                .collect(),
            OverrideKind::Symbols {
                dl_from_start,
                ul_from_end,
            } => {
                let mut t: Vec<(usize, SymbolClass)> = (0..usize::from(dl_from_start))
                    .map(|i| (i, SymbolClass::Dl))
                    .collect();
                t.extend(
                    (0..usize::from(ul_from_end))
                        .map(|i| (usize::from(SYMBOLS_PER_SLOT) - 1 - i, SymbolClass::Ul)),
                );
                t
            }
        };
        for (sym, class) in targets {
            let current = grid.slots[slot_idx][sym];
            if current != SymbolClass::Flexible {
                return Err(TdraError::OverrideOnAllocated {
                    slot: ov.slot,
                    symbol: sym as u8,
                    current,
                });
            }
            grid.slots[slot_idx][sym] = class;
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sliv_examples() {
        assert_eq!(sliv_encode(0, 1).unwrap(), 0);
        assert_eq!(sliv_encode(7, 6).unwrap(), 77);
        assert_eq!(sliv_encode(0, 14).unwrap(), 27);
        assert_eq!(sliv_decode(0).unwrap(), (0, 1));
        assert_eq!(sliv_decode(77).unwrap(), (7, 6));
        assert_eq!(sliv_decode(27).unwrap(), (0, 14));
    }

    #[test]
    fn sliv_rejects_overlong_span() {
        // The classic counterexample: start at symbol 7 with 10 symbols.
        assert_eq!(
            sliv_encode(7, 10),
            Err(TdraError::InvalidSymbolSpan { s: 7, l: 10 })
        );
        assert!(sliv_encode(14, 1).is_err());
        assert!(sliv_encode(0, 0).is_err());
    }

    #[test]
    fn sliv_bijection() {
        let mut seen = [false; 105];
        let mut count = 0;
        for s in 0u8..14 {
            for l in 1u8..=14 - s {
                let sliv = sliv_encode(s, l).unwrap();
                assert!(!seen[usize::from(sliv)], "collision at {sliv}");
                seen[usize::from(sliv)] = true;
                assert_eq!(sliv_decode(sliv).unwrap(), (s, l));
                count += 1;
            }
        }
        assert_eq!(count, 105);
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn tdra_rows() {
        let table = TdraTable::default_table();
        let row = table.row(0).unwrap();
        assert_eq!(row.symbol_span(), (7, 6));
        assert_eq!(table.row(1).unwrap().k_offset, 1);
        assert!(matches!(table.row(2), Err(TdraError::RowOutOfRange { .. })));

        // Type A rows must start within the first four symbols.
        assert!(TdraRow::new(0, sliv_encode(2, 10).unwrap(), MappingType::A).is_ok());
        assert_eq!(
            TdraRow::new(0, sliv_encode(7, 6).unwrap(), MappingType::A),
            Err(TdraError::TypeAStartTooLate(7))
        );
        let too_many = vec![TdraRow::new(0, 0, MappingType::B).unwrap(); 17];
        assert_eq!(TdraTable::new(too_many), Err(TdraError::TooManyRows(17)));
    }

    #[test]
    fn data_slot_resolution() {
        assert_eq!(resolve_data_slot(3, 0, 0, 0), 3);
        assert_eq!(resolve_data_slot(3, 2, 0, 0), 5);
        assert_eq!(resolve_data_slot(3, 1, 0, 1), 7);
        // Downscaling numerology floors.
        assert_eq!(resolve_data_slot(3, 0, 1, 0), 1);
    }

    #[test]
    fn tdd_saturated() {
        let p = TddPattern {
            periodicity_slots: 5,
            dl_slots: 5,
            dl_symbols: 0,
            ul_slots: 0,
            ul_symbols: 0,
        };
        let grid = expand_tdd(&p, None).unwrap();
        assert_eq!(grid.n_slots(), 5);
        assert!(grid
            .slots
            .iter()
            .flatten()
            .all(|&c| c == SymbolClass::Dl));
    }

    #[test]
    fn tdd_mixed_pattern() {
        let p = TddPattern {
            periodicity_slots: 5,
            dl_slots: 2,
            dl_symbols: 4,
            ul_slots: 1,
            ul_symbols: 2,
        };
        let grid = expand_tdd(&p, None).unwrap();
        // Oracle: hand classification of the 5x14 symbols.
        for slot in 0..2u32 {
            for sym in 0..14u8 {
                assert_eq!(grid.class(slot, sym), SymbolClass::Dl);
            }
        }
        for sym in 0..14u8 {
            let expected = if sym < 4 {
                SymbolClass::Dl
            } else {
                SymbolClass::Flexible
            };
            assert_eq!(grid.class(2, sym), expected, "slot 2 sym {sym}");
        }
        for sym in 0..14u8 {
            let expected = if sym >= 12 {
                SymbolClass::Ul
            } else {
                SymbolClass::Flexible
            };
            assert_eq!(grid.class(3, sym), expected, "slot 3 sym {sym}");
        }
        for sym in 0..14u8 {
            assert_eq!(grid.class(4, sym), SymbolClass::Ul);
        }
    }

    #[test]
    fn tdd_concatenation() {
        let p1 = TddPattern {
            periodicity_slots: 2,
            dl_slots: 1,
            dl_symbols: 0,
            ul_slots: 1,
            ul_symbols: 0,
        };
        let p2 = TddPattern {
            periodicity_slots: 3,
            dl_slots: 1,
            dl_symbols: 0,
            ul_slots: 1,
            ul_symbols: 0,
        };
        let grid = expand_tdd(&p1, Some(&p2)).unwrap();
        assert_eq!(grid.n_slots(), 5);
        assert_eq!(grid.class(0, 0), SymbolClass::Dl);
        assert_eq!(grid.class(1, 0), SymbolClass::Ul);
        assert_eq!(grid.class(2, 0), SymbolClass::Dl);
        assert_eq!(grid.class(3, 0), SymbolClass::Flexible);
        assert_eq!(grid.class(4, 0), SymbolClass::Ul);
    }

    #[test]
    fn tdd_boundary_clash() {
        let p = TddPattern {
            periodicity_slots: 3,
            dl_slots: 1,
            dl_symbols: 8,
            ul_slots: 1,
            ul_symbols: 8,
        };
        assert!(matches!(
            expand_tdd(&p, None),
            Err(TdraError::BoundarySymbolClash { .. })
        ));
        let saturated = TddPattern {
            periodicity_slots: 2,
            dl_slots: 1,
            dl_symbols: 2,
            ul_slots: 1,
            ul_symbols: 0,
        };
        assert!(matches!(
            expand_tdd(&saturated, None),
            Err(TdraError::NoBoundarySlot(2))
        ));
    }

    fn flexible_grid() -> TddGrid {
        expand_tdd(
            &TddPattern {
                periodicity_slots: 4,
                dl_slots: 1,
                dl_symbols: 0,
                ul_slots: 1,
                ul_symbols: 0,
            },
            None,
        )
        .unwrap()
    }

    #[test]
    fn overrides() {
        let base = flexible_grid();
        assert_eq!(apply_dedicated_overrides(&base, &[]).unwrap(), base);

        let to_ul = [SlotOverride {
            slot: 1,
            kind: OverrideKind::FullSlot(SymbolClass::Ul),
        }];
        let out = apply_dedicated_overrides(&base, &to_ul).unwrap();
        for sym in 0..14u8 {
            assert_eq!(out.class(1, sym), SymbolClass::Ul);
        }
        assert_eq!(out.class(2, 0), SymbolClass::Flexible);
        assert_eq!(out.class(0, 0), SymbolClass::Dl);

        // Overriding an already-allocated DL slot is rejected.
        let on_dl = [SlotOverride {
            slot: 0,
            kind: OverrideKind::FullSlot(SymbolClass::Ul),
        }];
        assert!(matches!(
            apply_dedicated_overrides(&base, &on_dl),
            Err(TdraError::OverrideOnAllocated { .. })
        ));
    }

    #[test]
    fn symbol_overrides_leave_rest_flexible() {
        let base = flexible_grid();
        let ov = [SlotOverride {
            slot: 2,
            kind: OverrideKind::Symbols {
                dl_from_start: 3,
                ul_from_end: 2,
            },
        }];
        let out = apply_dedicated_overrides(&base, &ov).unwrap();
        for sym in 0..14u8 {
            let expected = match sym {
                0..=2 => SymbolClass::Dl,
                12..=13 => SymbolClass::Ul,
                _ => SymbolClass::Flexible,
            };
            assert_eq!(out.class(2, sym), expected);
        }
    }
}
