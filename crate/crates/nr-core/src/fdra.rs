//! Frequency-domain resource-allocation codecs.
//!
//! Type 0 is an RBG bitmap, Type 1 encodes a contiguous (start, length) pair
//! as a resource indication value (RIV), and Type 2 addresses interlaced RBs
//! for the 15/30 kHz uplink. Field-width formulas live here so the DCI module
//! can size its frequency-domain assignment field from one place.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::grid::BwpConfig;

#[derive(Debug, Error, PartialEq)]
pub enum FdraError {
    #[error("nominal RBG size {0} not in {{1,2,4,8,16}}")]
    InvalidRbgSize(u16),
    #[error("RBG index {index} out of range for {n_rbg} RBGs")]
    RbgOutOfRange { index: usize, n_rbg: usize },
    #[error("bitmap length {got} does not match RBG count {expected}")]
    BitmapLengthMismatch { got: usize, expected: usize },
    #[error("invalid Type 1 grant: start {rb_start}, length {l_rbs}, BWP size {n_size}")]
    InvalidGrant {
        rb_start: u16,
        l_rbs: u16,
        n_size: u16,
    },
    #[error("RIV {riv} out of range for BWP size {n_size}")]
    RivOutOfRange { riv: u32, n_size: u16 },
    #[error("interlace index {m} out of range for M={m_total}")]
    InterlaceOutOfRange { m: u16, m_total: u16 },
    #[error("interlaced allocation requires 15 or 30 kHz SCS, got {0} kHz")]
    UnsupportedScs(u32),
    #[error("RB-set count must be at least 1")]
    EmptyRbSets,
}

/// Partition of a BWP into resource block groups of nominal size P.
///
/// The partition is aligned to the CRB grid, so only the first and last RBG
/// may be smaller than P.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbgPartition {
    pub nominal_p: u16,
    pub sizes: Vec<u16>,
}

impl RbgPartition {
    pub fn n_rbg(&self) -> usize {
        self.sizes.len()
    }

    /// VRB span `[start, end)` of RBG `index`, via prefix sums of the sizes.
    pub fn vrb_span(&self, index: usize) -> Result<(u16, u16), FdraError> {
        if index >= self.sizes.len() {
            return Err(FdraError::RbgOutOfRange {
                index,
                n_rbg: self.sizes.len(),
            });
        }
        let start: u16 = self.sizes[..index].iter().sum();
        Ok((start, start + self.sizes[index]))
    }
}

/// Divide a BWP into RBGs of nominal size `p` aligned to the CRB grid.
pub fn rbg_partition(bwp: &BwpConfig, p: u16) -> Result<RbgPartition, FdraError> {
    if !matches!(p, 1 | 2 | 4 | 8 | 16) {
        return Err(FdraError::InvalidRbgSize(p));
    }
    let lead = bwp.crb_start % p;
    let n_rbg = (bwp.size_rb + lead).div_ceil(p) as usize;
    let mut sizes = Vec::with_capacity(n_rbg);
    if n_rbg == 1 {
        sizes.push(bwp.size_rb);
    } else {
        sizes.push(p - lead);
        for _ in 1..n_rbg - 1 {
            sizes.push(p);
        }
        let tail = (bwp.crb_start + bwp.size_rb) % p;
        sizes.push(if tail == 0 { p } else { tail });
    }
    debug_assert_eq!(sizes.iter().sum::<u16>(), bwp.size_rb);
    Ok(RbgPartition { nominal_p: p, sizes })
}

/// Encode a set of allocated RBG indices as an MSB-first bitmap.
///
/// Bit 0 (MSB) corresponds to RBG 0.
pub fn encode_type0(
    allocated: &BTreeSet<usize>,
    partition: &RbgPartition,
) -> Result<BitString, FdraError> {
    let n = partition.n_rbg();
    if let Some(&max) = allocated.iter().next_back() {
        if max >= n {
            return Err(FdraError::RbgOutOfRange { index: max, n_rbg: n });
        }
    }
    let mut bits = BitString::new();
    for i in 0..n {
        bits.push(allocated.contains(&i));
    }
    Ok(bits)
}

/// Decode a Type 0 bitmap into the set of allocated VRB indices.
pub fn decode_type0(
    bitmap: &BitString,
    partition: &RbgPartition,
) -> Result<BTreeSet<u16>, FdraError> {
    let n = partition.n_rbg();
    if bitmap.len() != n {
        return Err(FdraError::BitmapLengthMismatch {
            got: bitmap.len(),
            expected: n,
        });
    }
    let mut vrbs = BTreeSet::new();
    for (i, bit) in bitmap.iter().enumerate() {
        if bit {
            let (start, end) = partition.vrb_span(i)?;
            vrbs.extend(start..end);
        }
    }
    Ok(vrbs)
}

/// Decode a Type 0 bitmap at RBG granularity.
pub fn decode_type0_rbgs(
    bitmap: &BitString,
    partition: &RbgPartition,
) -> Result<BTreeSet<usize>, FdraError> {
    if bitmap.len() != partition.n_rbg() {
        return Err(FdraError::BitmapLengthMismatch {
            got: bitmap.len(),
            expected: partition.n_rbg(),
        });
    }
    Ok(bitmap
        .iter()
        .enumerate()
        .filter_map(|(i, b)| b.then_some(i))
        .collect())
}

/// A contiguous Type 1 grant together with its RIV encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type1Grant {
    pub rb_start: u16,
    pub l_rbs: u16,
    pub riv: u32,
}

impl Type1Grant {
    pub fn new(rb_start: u16, l_rbs: u16, n_size: u16) -> Result<Self, FdraError> {
        let riv = riv_encode(rb_start, l_rbs, n_size)?;
        Ok(Self { rb_start, l_rbs, riv })
    }
}

/// TS 38.214 resource indication value for a contiguous (start, length) grant
/// in a BWP of `n_size` allocation units.
pub fn riv_encode(rb_start: u16, l_rbs: u16, n_size: u16) -> Result<u32, FdraError> {
    if l_rbs == 0 || rb_start >= n_size || l_rbs > n_size - rb_start {
        return Err(FdraError::InvalidGrant {
            rb_start,
            l_rbs,
            n_size,
        });
    }
    let (n, s, l) = (u32::from(n_size), u32::from(rb_start), u32::from(l_rbs));
    let riv = if l - 1 <= n / 2 {
        n * (l - 1) + s
    } else {
        n * (n - l + 1) + (n - 1 - s)
    };
    debug_assert!(riv < n * (n + 1) / 2);
    Ok(riv)
}

/// Inverse of [`riv_encode`].
pub fn riv_decode(riv: u32, n_size: u16) -> Result<(u16, u16), FdraError> {
    let n = u32::from(n_size);
    if n == 0 || riv >= n * (n + 1) / 2 {
        return Err(FdraError::RivOutOfRange { riv, n_size });
    }
    // Short branch first; fall back to the mirrored long branch.
    let (s, l) = (riv % n, riv / n + 1);
    let (s, l) = if l - 1 <= n / 2 && s + l <= n {
        (s, l)
    } else {
        (n - 1 - riv % n, n - riv / n + 1)
    };
    let (s, l) = (s as u16, l as u16);
    if riv_encode(s, l, n_size)? != riv {
        return Err(FdraError::RivOutOfRange { riv, n_size });
    }
    Ok((s, l))
}

/// Width in bits of the Type 1 frequency-domain assignment field.
pub fn type1_field_bits(n_size: u16) -> u32 {
    let combos = u32::from(n_size) * (u32::from(n_size) + 1) / 2;
    ceil_log2(combos)
}

fn ceil_log2(x: u32) -> u32 {
    if x <= 1 {
        0
    } else {
        32 - (x - 1).leading_zeros()
    }
}

/// Interlace geometry for Type 2 allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlaceConfig {
    /// Number of interlaces M: 10 at 15 kHz, 5 at 30 kHz.
    pub m_interlaces: u16,
    /// Number of RB sets N in the BWP (scenario configuration).
    pub n_rbsets: u16,
}

impl InterlaceConfig {
    pub fn for_scs(scs_khz: u32, n_rbsets: u16) -> Result<Self, FdraError> {
        if n_rbsets == 0 {
            return Err(FdraError::EmptyRbSets);
        }
        let m_interlaces = match scs_khz {
            15 => 10,
            30 => 5,
            other => return Err(FdraError::UnsupportedScs(other)),
        };
        Ok(Self {
            m_interlaces,
            n_rbsets,
        })
    }

    /// Y = ceil(log2(N(N+1)/2)) bits addressing RB sets inside the interlaces.
    pub fn y_bits(&self) -> u32 {
        type1_field_bits(self.n_rbsets)
    }
}

/// CRBs of interlace `m`: all CRBs congruent to m (mod M) inside the BWP.
pub fn interlace_members(
    m: u16,
    cfg: &InterlaceConfig,
    bwp: &BwpConfig,
) -> Result<BTreeSet<u16>, FdraError> {
    if m >= cfg.m_interlaces {
        return Err(FdraError::InterlaceOutOfRange {
            m,
            m_total: cfg.m_interlaces,
        });
    }
    Ok(bwp
        .crb_range()
        .filter(|crb| crb % cfg.m_interlaces == m)
        .collect())
}

/// Width of the Type 2 frequency-domain assignment field.
///
/// 15 kHz: 6-bit interlace RIV + Y bits. 30 kHz: 5-bit interlace bitmap + Y bits.
pub fn type2_field_bits(scs_khz: u32, n_rbsets: u16) -> Result<u32, FdraError> {
    let cfg = InterlaceConfig::for_scs(scs_khz, n_rbsets)?;
    let head = match scs_khz {
        15 => 6,
        30 => 5,
        _ => unreachable!(),
    };
    Ok(head + cfg.y_bits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Direction, Numerology};

    fn bwp(crb_start: u16, size_rb: u16) -> BwpConfig {
        BwpConfig::new(0, crb_start, size_rb, Direction::Dl, Numerology::normal(0).unwrap())
            .unwrap()
    }

    /// Oracle: bucket each CRB of the BWP into aligned width-`p` bins and
    /// count RBs per bin.
    fn partition_oracle(crb_start: u16, size_rb: u16, p: u16) -> Vec<u16> {
        let mut sizes: Vec<u16> = Vec::new();
        let mut last_bin = None;
        for crb in crb_start..crb_start + size_rb {
            let bin = crb / p;
            if last_bin == Some(bin) {
                *sizes.last_mut().unwrap() += 1;
            } else {
                sizes.push(1);
                last_bin = Some(bin);
            }
        }
        sizes
    }

    #[test]
    fn partition_matches_worked_example() {
        let part = rbg_partition(&bwp(10, 31), 4).unwrap();
        assert_eq!(part.n_rbg(), 9);
        assert_eq!(part.sizes, vec![2, 4, 4, 4, 4, 4, 4, 4, 1]);
    }

    #[test]
    fn partition_aligned() {
        let part = rbg_partition(&bwp(0, 16), 4).unwrap();
        assert_eq!(part.sizes, vec![4, 4, 4, 4]);
    }

    #[test]
    fn partition_50_rb() {
        let part = rbg_partition(&bwp(0, 50), 4).unwrap();
        assert_eq!(part.sizes, partition_oracle(0, 50, 4));
        assert_eq!(part.n_rbg(), 13);
        assert_eq!(part.sizes[12], 2);
    }

    #[test]
    fn partition_matches_oracle_across_offsets() {
        for p in [2u16, 4, 8, 16] {
            for start in 0..p * 2 {
                for size in 1..60 {
                    let part = rbg_partition(&bwp(start, size), p).unwrap();
                    assert_eq!(
                        part.sizes,
                        partition_oracle(start, size, p),
                        "p={p} start={start} size={size}"
                    );
                }
            }
        }
    }

    #[test]
    fn partition_rejects_bad_p() {
        assert_eq!(rbg_partition(&bwp(0, 10), 3), Err(FdraError::InvalidRbgSize(3)));
    }

    #[test]
    fn type0_paper_bitmap() {
        let part = rbg_partition(&bwp(10, 31), 4).unwrap();
        let rbgs: BTreeSet<usize> = [0, 2, 3, 5, 7].into_iter().collect();
        let bits = encode_type0(&rbgs, &part).unwrap();
        assert_eq!(bits.to_string(), "101101010");

        let vrbs = decode_type0(&bits, &part).unwrap();
        // Oracle: prefix sums of [2,4,4,4,4,4,4,4,1].
        let mut expected = BTreeSet::new();
        expected.extend(0..2u16);
        expected.extend(6..10);
        expected.extend(10..14);
        expected.extend(18..22);
        expected.extend(26..30);
        assert_eq!(vrbs, expected);
        assert_eq!(vrbs.len(), 18);
    }

    #[test]
    fn type0_edges() {
        let part = rbg_partition(&bwp(10, 31), 4).unwrap();
        let empty = encode_type0(&BTreeSet::new(), &part).unwrap();
        assert_eq!(empty.to_string(), "000000000");
        let full: BitString = "111111111".parse().unwrap();
        assert_eq!(decode_type0(&full, &part).unwrap().len(), 31);
        let last: BitString = "000000001".parse().unwrap();
        assert_eq!(
            decode_type0(&last, &part).unwrap(),
            BTreeSet::from([30u16])
        );

        let part50 = rbg_partition(&bwp(0, 50), 4).unwrap();
        let bits = encode_type0(&BTreeSet::from([12usize]), &part50).unwrap();
        assert_eq!(bits.to_string(), "0000000000001");
    }

    #[test]
    fn type0_errors() {
        let part = rbg_partition(&bwp(10, 31), 4).unwrap();
        assert!(matches!(
            encode_type0(&BTreeSet::from([9usize]), &part),
            Err(FdraError::RbgOutOfRange { .. })
        ));
        let short: BitString = "1010".parse().unwrap();
        assert!(matches!(
            decode_type0(&short, &part),
            Err(FdraError::BitmapLengthMismatch { .. })
        ));
    }

    /// Brute-force oracle: enumerate all valid (start, length) pairs in
    /// encode order and check the RIV codec is a bijection onto
    /// [0, N(N+1)/2).
    fn assert_riv_bijection(n: u16) {
        let total = u32::from(n) * (u32::from(n) + 1) / 2;
        let mut seen = vec![false; total as usize];
        for s in 0..n {
            for l in 1..=n - s {
                let riv = riv_encode(s, l, n).unwrap();
                assert!(riv < total, "riv {riv} out of range for N={n}");
                assert!(!seen[riv as usize], "collision at riv {riv} for N={n}");
                seen[riv as usize] = true;
                assert_eq!(riv_decode(riv, n).unwrap(), (s, l));
            }
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn riv_examples() {
        assert_eq!(riv_encode(0, 1, 31).unwrap(), 0);
        assert_eq!(riv_encode(4, 15, 31).unwrap(), 438);
        assert_eq!(riv_encode(2, 5, 9).unwrap(), 38);
        assert_eq!(riv_decode(0, 31).unwrap(), (0, 1));
        assert_eq!(riv_decode(438, 31).unwrap(), (4, 15));
    }

    #[test]
    fn riv_bijection_sampled() {
        for n in [1u16, 2, 9, 31, 50] {
            assert_riv_bijection(n);
        }
    }

    #[test]
    fn riv_errors() {
        assert!(riv_encode(5, 0, 31).is_err());
        assert!(riv_encode(31, 1, 31).is_err());
        assert!(riv_encode(20, 15, 31).is_err());
        assert!(riv_decode(496, 31).is_err());
    }

    #[test]
    fn field_bits() {
        assert_eq!(type1_field_bits(1), 0);
        assert_eq!(type1_field_bits(31), 9);
        assert_eq!(type1_field_bits(50), 11);
        // Cheaper than a per-RB bitmap from N = 5 upward.
        for n in 5..=275u16 {
            assert!(type1_field_bits(n) < u32::from(n));
        }
    }

    #[test]
    fn interlaces() {
        let cfg30 = InterlaceConfig::for_scs(30, 1).unwrap();
        assert_eq!(cfg30.m_interlaces, 5);
        assert_eq!(
            interlace_members(0, &cfg30, &bwp(0, 20)).unwrap(),
            BTreeSet::from([0u16, 5, 10, 15])
        );

        let cfg15 = InterlaceConfig::for_scs(15, 1).unwrap();
        assert_eq!(cfg15.m_interlaces, 10);
        assert_eq!(
            interlace_members(3, &cfg15, &bwp(10, 31)).unwrap(),
            BTreeSet::from([13u16, 23, 33])
        );
        assert_eq!(
            interlace_members(9, &cfg15, &bwp(0, 10)).unwrap(),
            BTreeSet::from([9u16])
        );
        assert!(matches!(
            interlace_members(10, &cfg15, &bwp(0, 10)),
            Err(FdraError::InterlaceOutOfRange { .. })
        ));
    }

    #[test]
    fn interlaces_partition_the_bwp() {
        for (scs, start, size) in [(15u32, 10u16, 31u16), (30, 0, 50), (15, 3, 7)] {
            let cfg = InterlaceConfig::for_scs(scs, 2).unwrap();
            let b = bwp(start, size);
            let mut union = BTreeSet::new();
            let mut count = 0usize;
            for m in 0..cfg.m_interlaces {
                let members = interlace_members(m, &cfg, &b).unwrap();
                count += members.len();
                union.extend(members);
            }
            let all: BTreeSet<u16> = b.crb_range().collect();
            assert_eq!(union, all);
            assert_eq!(count, all.len(), "interlaces must be pairwise disjoint");
        }
    }

    #[test]
    fn type2_widths() {
        assert_eq!(type2_field_bits(15, 1).unwrap(), 6);
        assert_eq!(type2_field_bits(30, 2).unwrap(), 7);
        assert_eq!(type2_field_bits(15, 4).unwrap(), 10);
        assert!(matches!(
            type2_field_bits(60, 1),
            Err(FdraError::UnsupportedScs(60))
        ));
    }
}
