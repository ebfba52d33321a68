//! Bit-exact DCI assembly and parsing.
//!
//! Scheduling formats 0_0/0_1/1_0/1_1/1_2 (and 0_2) are field-modeled; the
//! remaining formats exist in the registry with their usage strings and a
//! raw-payload passthrough. Every message carries a CRC-24C whose last 16
//! bits are masked with the addressed UE's RNTI.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::fdra::{self, FdraError, RbgPartition};
use crate::grid::BwpConfig;

/// gCRC24C generator polynomial, low 24 coefficients (D^23..D^0).
const CRC24C_POLY: u32 = 0x00B2_B117;
pub const CRC_BITS: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum DciError {
    #[error("format {0} is registry-only; use the raw-payload path")]
    NotFieldModeled(DciFormatId),
    #[error("format {format} does not carry field {field}")]
    UnsupportedField {
        format: DciFormatId,
        field: &'static str,
    },
    #[error("allocation type {got} not usable with format {format}")]
    AllocTypeMismatch { format: DciFormatId, got: u8 },
    #[error("field {field} value {value} does not fit {width} bits")]
    FieldOverflow {
        field: &'static str,
        value: u64,
        width: u32,
    },
    #[error("message has {got} bits, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("CRC check failed; message is not addressed to this RNTI")]
    NotAddressed,
    #[error("unknown DCI format {0:?}")]
    UnknownFormat(String),
    #[error(transparent)]
    Fdra(#[from] FdraError),
}

macro_rules! dci_formats {
    ($($variant:ident => $name:literal, $usage:literal;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum DciFormatId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl DciFormatId {
            pub const ALL: &'static [DciFormatId] = &[$(DciFormatId::$variant,)*];

            pub fn name(&self) -> &'static str {
                match self {
                    $(DciFormatId::$variant => $name,)*
                }
            }

            pub fn usage(&self) -> &'static str {
                match self {
                    $(DciFormatId::$variant => $usage,)*
                }
            }
        }

        impl FromStr for DciFormatId {
            type Err = DciError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(DciFormatId::$variant),)*
                    other => Err(DciError::UnknownFormat(other.to_string())),
                }
            }
        }
    };
}

dci_formats! {
    F0_0 => "0_0", "Schedule the Physical Uplink Shared Channel (PUSCH) in the cell";
    F0_1 => "0_1", "Schedule the Physical Uplink Shared Channel (PUSCH) in the cell";
    F0_2 => "0_2", "Schedule the Physical Uplink Shared Channel (PUSCH) in the cell";
    F1_0 => "1_0", "Schedule the Physical Downlink Shared Channel (PDSCH) in the cell";
    F1_1 => "1_1", "Schedule the Physical Downlink Shared Channel (PDSCH) in the cell";
    F1_2 => "1_2", "Schedule the Physical Downlink Shared Channel (PDSCH) in the cell";
    F2_0 => "2_0", "Notify a group of UEs of the slot format";
    F2_1 => "2_1", "Notify a group of UEs of the PRB(s) and OFDM symbol(s) where no transmission is intended for them";
    F2_2 => "2_2", "Provide transmit power control (TPC) commands for the PUCCH and PUSCH";
    F2_3 => "2_3", "Transmit a group of TPC commands for sounding reference signal (SRS) transmission by one or more UEs";
    F2_4 => "2_4", "Notify a group of UEs of the PRB(s) and OFDM symbol(s) where to cancel the corresponding uplink transmissions";
    F2_5 => "2_5", "Notify UEs about the availability of soft resources";
    F2_6 => "2_6", "Notify one or more UEs about the power saving information outside the discontinuous reception active time";
    F3_0 => "3_0", "Schedule the NR sidelink in the cell";
    F3_1 => "3_1", "Schedule the LTE sidelink in the cell";
}

impl fmt::Display for DciFormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl DciFormatId {
    /// Formats whose scheduling fields this module models bit-exactly.
    pub fn is_field_modeled(&self) -> bool {
        matches!(
            self,
            Self::F0_0 | Self::F0_1 | Self::F0_2 | Self::F1_0 | Self::F1_1 | Self::F1_2
        )
    }

    fn has_bwp_indicator(&self) -> bool {
        matches!(self, Self::F1_1)
    }

    fn supports_dynamic_switch(&self) -> bool {
        matches!(self, Self::F0_1 | Self::F1_1)
    }

    fn rbg_granular(&self) -> bool {
        matches!(self, Self::F0_2 | Self::F1_2)
    }
}

/// Frequency-domain allocation carried by a scheduling DCI. For formats
/// 0_2/1_2 the Type 1 start and length are in RBG units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FreqAlloc {
    Type0 { rbgs: BTreeSet<usize> },
    Type1 { rb_start: u16, l_rbs: u16 },
}

/// Per-message codec configuration shared between build and parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DciConfig {
    /// Nominal RBG size P for Type 0 bitmaps (and 0_2/1_2 granularity,
    /// where an unconfigured granularity means P = 1).
    pub rbg_p: u16,
    /// Whether the MSB of the frequency field dynamically selects the type.
    pub dynamic_switch: bool,
}

impl Default for DciConfig {
    fn default() -> Self {
        Self {
            rbg_p: 4,
            dynamic_switch: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DciField {
    pub name: String,
    pub width: u32,
    pub bits: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DciMessage {
    pub format: DciFormatId,
    pub fields: Vec<DciField>,
    pub payload: BitString,
    pub crc: BitString,
}

impl DciMessage {
    /// Payload followed by the masked CRC.
    pub fn full_bits(&self) -> BitString {
        let mut out = self.payload.clone();
        out.extend(&self.crc);
        out
    }

    pub fn to_hex(&self) -> String {
        self.full_bits().to_hex()
    }
}

/// Inputs to [`build_dci`] for the field-modeled scheduling formats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DciRequest {
    pub format: DciFormatId,
    pub freq: FreqAlloc,
    pub tdra_index: u8,
    pub bwp_indicator: Option<u8>,
    pub rnti: u16,
}

/// Parsed view of a scheduling DCI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedDci {
    pub format: DciFormatId,
    pub freq: FreqAlloc,
    pub tdra_index: u8,
    pub bwp_indicator: Option<u8>,
}

/// CRC-24C over the payload bits, with the last 16 bits XOR-masked by `rnti`.
pub fn crc24_mask(payload: &BitString, rnti: u16) -> BitString {
    let mut reg = 0u32;
    for bit in payload.iter() {
        let top = ((reg >> 23) & 1 == 1) ^ bit;
        reg = (reg << 1) & 0x00FF_FFFF;
        if top {
            reg ^= CRC24C_POLY;
        }
    }
    // Mask bits 8..=23 (the 16 LSBs) with the RNTI.
    reg ^= u32::from(rnti);
    let mut out = BitString::new();
    out.append_uint(u64::from(reg), CRC_BITS).expect("24-bit value");
    out
}

fn partition_for(bwp: &BwpConfig, config: &DciConfig) -> Result<RbgPartition, FdraError> {
    fdra::rbg_partition(bwp, config.rbg_p)
}

/// Width of the frequency-domain field body (without the dynamic-switch bit).
fn freq_body_bits(
    alloc_type1: bool,
    bwp: &BwpConfig,
    config: &DciConfig,
    format: DciFormatId,
) -> Result<u32, DciError> {
    if format.rbg_granular() {
        // RIV over RBG units.
        let partition = partition_for(bwp, config)?;
        return Ok(fdra::type1_field_bits(partition.n_rbg() as u16));
    }
    if alloc_type1 {
        Ok(fdra::type1_field_bits(bwp.size_rb))
    } else {
        let partition = partition_for(bwp, config)?;
        Ok(partition.n_rbg() as u32)
    }
}

/// Total width of the frequency-domain assignment field for a given choice.
pub fn freq_field_bits(
    alloc_type1: bool,
    bwp: &BwpConfig,
    config: &DciConfig,
    format: DciFormatId,
) -> Result<u32, DciError> {
    let body = freq_body_bits(alloc_type1, bwp, config, format)?;
    let selector = u32::from(config.dynamic_switch && format.supports_dynamic_switch());
    Ok(body + selector)
}

/// Assemble a scheduling DCI: frequency field, 4-bit TDRA row index, and (for
/// format 1_1) the 2-bit BWP indicator, followed by the RNTI-masked CRC.
pub fn build_dci(
    request: &DciRequest,
    bwp: &BwpConfig,
    config: &DciConfig,
) -> Result<DciMessage, DciError> {
    let format = request.format;
    if !format.is_field_modeled() {
        return Err(DciError::NotFieldModeled(format));
    }
    let mut fields = Vec::new();

    if let Some(indicator) = request.bwp_indicator {
        if !format.has_bwp_indicator() {
            return Err(DciError::UnsupportedField {
                format,
                field: "bwp_indicator",
            });
        }
        if indicator > 3 {
            return Err(DciError::FieldOverflow {
                field: "bwp_indicator",
                value: u64::from(indicator),
                width: 2,
            });
        }
        let mut bits = BitString::new();
        bits.append_uint(u64::from(indicator), 2).unwrap();
        fields.push(DciField {
            name: "bwp_indicator".into(),
            width: 2,
            bits,
        });
    }

    let is_type1 = matches!(request.freq, FreqAlloc::Type1 { .. });
    if !is_type1 && (!format.supports_dynamic_switch() || format.rbg_granular()) {
        // Fallback and RBG-granular formats carry Type 1 only.
        return Err(DciError::AllocTypeMismatch { format, got: 0 });
    }
    let mut freq_bits = BitString::new();
    if config.dynamic_switch && format.supports_dynamic_switch() {
        freq_bits.push(is_type1);
    }
    match &request.freq {
        FreqAlloc::Type0 { rbgs } => {
            let partition = partition_for(bwp, config)?;
            let bitmap = fdra::encode_type0(rbgs, &partition)?;
            freq_bits.extend(&bitmap);
        }
        FreqAlloc::Type1 { rb_start, l_rbs } => {
            let n = if format.rbg_granular() {
                partition_for(bwp, config)?.n_rbg() as u16
            } else {
                bwp.size_rb
            };
            let riv = fdra::riv_encode(*rb_start, *l_rbs, n)?;
            let width = fdra::type1_field_bits(n);
            freq_bits
                .append_uint(u64::from(riv), width as usize)
                .map_err(|_| DciError::FieldOverflow {
                    field: "fdra",
                    value: u64::from(riv),
                    width,
                })?;
        }
    }
    let freq_width = freq_bits.len() as u32;
    fields.push(DciField {
        name: "fdra".into(),
        width: freq_width,
        bits: freq_bits,
    });

    if request.tdra_index > 15 {
        return Err(DciError::FieldOverflow {
            field: "tdra",
            value: u64::from(request.tdra_index),
            width: 4,
        });
    }
    let mut tdra_bits = BitString::new();
    tdra_bits.append_uint(u64::from(request.tdra_index), 4).unwrap();
    fields.push(DciField {
        name: "tdra".into(),
        width: 4,
        bits: tdra_bits,
    });

    let mut payload = BitString::new();
    for f in &fields {
        payload.extend(&f.bits);
    }
    let crc = crc24_mask(&payload, request.rnti);
    Ok(DciMessage {
        format,
        fields,
        payload,
        crc,
    })
}

/// Wrap an opaque payload for a registry-only format.
pub fn build_raw(format: DciFormatId, payload: BitString, rnti: u16) -> DciMessage {
    let crc = crc24_mask(&payload, rnti);
    DciMessage {
        format,
        fields: vec![DciField {
            name: "payload".into(),
            width: payload.len() as u32,
            bits: payload.clone(),
        }],
        payload,
        crc,
    }
}

/// Parse `bits` (payload followed by masked CRC) as the given format.
///
/// The CRC is checked first; a mismatch means the message is not addressed
/// to this RNTI and no fields are decoded.
pub fn parse_dci(
    bits: &BitString,
    format: DciFormatId,
    bwp: &BwpConfig,
    config: &DciConfig,
    rnti: u16,
) -> Result<DecodedDci, DciError> {
    if bits.len() < CRC_BITS {
        return Err(DciError::LengthMismatch {
            got: bits.len(),
            expected: CRC_BITS,
        });
    }
    let payload_len = bits.len() - CRC_BITS;
    let payload = bits.slice(0, payload_len).unwrap();
    let received_crc = bits.slice(payload_len, CRC_BITS).unwrap();
    if crc24_mask(&payload, rnti) != received_crc {
        return Err(DciError::NotAddressed);
    }
    if !format.is_field_modeled() {
        return Err(DciError::NotFieldModeled(format));
    }

    let mut offset = 0usize;
    let bwp_indicator = if format.has_bwp_indicator() {
        let v = payload
            .read_uint(offset, 2)
            .map_err(|_| DciError::LengthMismatch {
                got: payload.len(),
                expected: offset + 2,
            })? as u8;
        offset += 2;
        Some(v)
    } else {
        None
    };

    let is_type1 = if config.dynamic_switch && format.supports_dynamic_switch() {
        let bit = payload.get(offset).ok_or(DciError::LengthMismatch {
            got: payload.len(),
            expected: offset + 1,
        })?;
        offset += 1;
        bit
    } else {
        true
    };

    let body_width = freq_body_bits(is_type1, bwp, config, format)? as usize;
    let freq = if is_type1 {
        let n = if format.rbg_granular() {
            partition_for(bwp, config)?.n_rbg() as u16
        } else {
            bwp.size_rb
        };
        let riv = payload
            .read_uint(offset, body_width)
            .map_err(|_| DciError::LengthMismatch {
                got: payload.len(),
                expected: offset + body_width,
            })? as u32;
        let (rb_start, l_rbs) = fdra::riv_decode(riv, n)?;
        FreqAlloc::Type1 { rb_start, l_rbs }
    } else {
        let partition = partition_for(bwp, config)?;
        let bitmap = payload
            .slice(offset, body_width)
            .map_err(|_| DciError::LengthMismatch {
                got: payload.len(),
                expected: offset + body_width,
            })?;
        FreqAlloc::Type0 {
            rbgs: fdra::decode_type0_rbgs(&bitmap, &partition)?,
        }
    };
    offset += body_width;

    let tdra_index = payload
        .read_uint(offset, 4)
        .map_err(|_| DciError::LengthMismatch {
            got: payload.len(),
            expected: offset + 4,
        })? as u8;
    offset += 4;

    if offset != payload.len() {
        return Err(DciError::LengthMismatch {
            got: payload.len(),
            expected: offset,
        });
    }

    Ok(DecodedDci {
        format,
        freq,
        tdra_index,
        bwp_indicator,
    })
}
