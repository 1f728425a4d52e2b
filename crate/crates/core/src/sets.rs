//! Index sets over a ground set `[1:n]`, partitions, and subset enumeration.
//!
//! Sets are stored as `u64` bitmasks (bit `i-1` set means index `i` is present),
//! so the ground set is limited to 64 elements. All indices crossing the public
//! API are 1-based.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 64;

/// Default refusal limit for any single subset enumeration.
pub const MAX_SUBSETS: u128 = 1 << 24;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndexSet {
    bits: u64,
    ground_n: usize,
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl IndexSet {
    pub fn empty(ground_n: usize) -> Self {
        assert!(
            ground_n <= MAX_GROUND,
            "ground set larger than {MAX_GROUND}"
        );
        IndexSet { bits: 0, ground_n }
    }

    pub fn full(ground_n: usize) -> Self {
        assert!(
            ground_n <= MAX_GROUND,
            "ground set larger than {MAX_GROUND}"
        );
        IndexSet {
            bits: full_mask(ground_n),
            ground_n,
        }
    }

    /// The interval `[lo:hi]`; empty when `lo > hi`.
    pub fn interval(lo: usize, hi: usize, ground_n: usize) -> Result<Self> {
        if lo > hi {
            return Ok(Self::empty(ground_n));
        }
        if lo == 0 || hi > ground_n {
            let index = if lo == 0 { 0 } else { hi };
            return Err(Error::IndexOutOfRange { index, ground_n });
        }
        let bits = full_mask(hi) & !full_mask(lo - 1);
        Ok(IndexSet { bits, ground_n })
    }

    /// The prefix `[1:p]`.
    pub fn prefix(p: usize, ground_n: usize) -> Result<Self> {
        Self::interval(1, p, ground_n)
    }

    /// The suffix `[p+1:n]`.
    pub fn suffix_after(p: usize, ground_n: usize) -> Result<Self> {
        if p > ground_n {
            return Err(Error::IndexOutOfRange { index: p, ground_n });
        }
        Self::interval(p + 1, ground_n, ground_n)
    }

    pub fn from_indices(indices: &[usize], ground_n: usize) -> Result<Self> {
        if ground_n > MAX_GROUND {
            return Err(Error::InvalidParams(format!(
                "ground set of size {ground_n} exceeds {MAX_GROUND}"
            )));
        }
        let mut bits = 0u64;
        for &i in indices {
            if i == 0 || i > ground_n {
                return Err(Error::IndexOutOfRange { index: i, ground_n });
            }
            let b = 1u64 << (i - 1);
            if bits & b != 0 {
                return Err(Error::InvalidParams(format!("index {i} repeated")));
            }
            bits |= b;
        }
        Ok(IndexSet { bits, ground_n })
    }

    pub fn from_bits(bits: u64, ground_n: usize) -> Result<Self> {
        if ground_n > MAX_GROUND {
            return Err(Error::InvalidParams(format!(
                "ground set of size {ground_n} exceeds {MAX_GROUND}"
            )));
        }
        if bits & !full_mask(ground_n) != 0 {
            let index = 64 - bits.leading_zeros() as usize;
            return Err(Error::IndexOutOfRange { index, ground_n });
        }
        Ok(IndexSet { bits, ground_n })
    }

    pub(crate) fn from_bits_unchecked(bits: u64, ground_n: usize) -> Self {
        debug_assert!(bits & !full_mask(ground_n) == 0);
        IndexSet { bits, ground_n }
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn ground_n(&self) -> usize {
        self.ground_n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_mask(self.ground_n)
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.ground_n && self.bits & (1u64 << (i - 1)) != 0
    }

    /// Members in ascending order, 1-based.
    pub fn iter(&self) -> Members {
        Members { bits: self.bits }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn with(&self, i: usize) -> Self {
        assert!(i >= 1 && i <= self.ground_n);
        IndexSet {
            bits: self.bits | (1u64 << (i - 1)),
            ground_n: self.ground_n,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ground_n, other.ground_n);
        IndexSet {
            bits: self.bits | other.bits,
            ground_n: self.ground_n,
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ground_n, other.ground_n);
        IndexSet {
            bits: self.bits & other.bits,
            ground_n: self.ground_n,
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ground_n, other.ground_n);
        IndexSet {
            bits: self.bits & !other.bits,
            ground_n: self.ground_n,
        }
    }

    pub fn complement(&self) -> Self {
        IndexSet {
            bits: !self.bits & full_mask(self.ground_n),
            ground_n: self.ground_n,
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits & other.bits == 0
    }

    /// Checks that the set lives on a ground set of size `n`.
    pub fn expect_ground(&self, n: usize) -> Result<()> {
        if self.ground_n != n {
            return Err(Error::GroundMismatch {
                expected: n,
                found: self.ground_n,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.ground_n)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (pos, i) in self.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

pub struct Members {
    bits: u64,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let tz = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(tz + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.bits.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Exact binomial coefficient, erroring on `u64` overflow.
pub fn binomial(n: usize, k: usize) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::BinomialOverflow { n, k });
        }
    }
    Ok(acc as u64)
}

/// Scatter the low bits of `compact` onto the set bits of `mask` (ascending).
pub(crate) fn deposit(compact: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut c = compact;
    while m != 0 && c != 0 {
        let low = m & m.wrapping_neg();
        if c & 1 != 0 {
            out |= low;
        }
        c >>= 1;
        m &= m - 1;
    }
    out
}

/// Gather the bits of `bits` at the positions set in `mask` into the low bits.
#[cfg(test)]
pub(crate) fn extract(bits: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut pos = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if bits & low != 0 {
            out |= 1u64 << pos;
        }
        pos += 1;
        m &= m - 1;
    }
    out
}

/// All `k`-subsets of `within`, in increasing bitmask order.
pub fn subsets_of_size(within: IndexSet, k: usize) -> KSubsets {
    let m = within.len();
    let next = if k > m {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some(full_mask(k))
    };
    KSubsets {
        mask: within.bits,
        ground_n: within.ground_n,
        width: m,
        k,
        next,
    }
}

/// Like [`subsets_of_size`], but refuses enumerations above `limit` subsets.
pub fn checked_subsets_of_size(within: IndexSet, k: usize, limit: u128) -> Result<KSubsets> {
    let count = binomial(within.len(), k)
        .map(u128::from)
        .unwrap_or(u128::MAX);
    if count > limit {
        return Err(Error::TooManySubsets { count, limit });
    }
    Ok(subsets_of_size(within, k))
}

pub struct KSubsets {
    mask: u64,
    ground_n: usize,
    width: usize,
    k: usize,
    next: Option<u64>,
}

impl Iterator for KSubsets {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let cur = self.next?;
        // Gosper's hack on the compacted positions
        self.next = if self.k == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            let nxt = (((r ^ cur) >> 2) / c) | r;
            if self.width < 64 && nxt >> self.width != 0 || r == 0 {
                None
            } else {
                Some(nxt)
            }
        };
        Some(IndexSet::from_bits_unchecked(
            deposit(cur, self.mask),
            self.ground_n,
        ))
    }
}

/// All subsets of `within` (including the empty set and `within` itself),
/// in increasing bitmask order.
pub fn all_subsets(within: IndexSet) -> AllSubsets {
    AllSubsets {
        mask: within.bits,
        ground_n: within.ground_n,
        next: Some(0),
    }
}

pub struct AllSubsets {
    mask: u64,
    ground_n: usize,
    next: Option<u64>,
}

impl Iterator for AllSubsets {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some((cur.wrapping_sub(self.mask)) & self.mask)
        };
        Some(IndexSet::from_bits_unchecked(cur, self.ground_n))
    }
}

/// A partition of `[1:n]` into nonempty, pairwise-disjoint blocks.
///
/// Block order is preserved as given; every sum over blocks runs in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Partition {
    blocks: Vec<IndexSet>,
    ground_n: usize,
}

impl Partition {
    pub fn new(blocks: Vec<IndexSet>, ground_n: usize) -> Result<Self> {
        let mut seen = 0u64;
        for b in &blocks {
            if b.ground_n != ground_n {
                return Err(Error::InvalidPartition(format!(
                    "block {b} lives on ground set of size {}, expected {ground_n}",
                    b.ground_n
                )));
            }
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if seen & b.bits != 0 {
                return Err(Error::InvalidPartition(format!(
                    "block {b} overlaps another block"
                )));
            }
            seen |= b.bits;
        }
        if seen != full_mask(ground_n) {
            let missing = IndexSet::from_bits_unchecked(!seen & full_mask(ground_n), ground_n);
            return Err(Error::InvalidPartition(format!(
                "indices {missing} are not covered"
            )));
        }
        Ok(Partition { blocks, ground_n })
    }

    /// Builds a partition from 1-based index lists.
    pub fn from_blocks(blocks: &[Vec<usize>], ground_n: usize) -> Result<Self> {
        let sets = blocks
            .iter()
            .map(|b| {
                IndexSet::from_indices(b, ground_n)
                    .map_err(|e| Error::InvalidPartition(format!("{e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sets, ground_n)
    }

    pub fn singletons(ground_n: usize) -> Self {
        let blocks = (1..=ground_n)
            .map(|i| IndexSet::from_bits_unchecked(1u64 << (i - 1), ground_n))
            .collect();
        Partition { blocks, ground_n }
    }

    pub fn whole(ground_n: usize) -> Self {
        Partition {
            blocks: alloc::vec![IndexSet::full(ground_n)],
            ground_n,
        }
    }

    /// Decodes a restricted-growth string: `rgs[i]` is the block label of index `i+1`.
    pub fn from_restricted_growth(rgs: &[usize]) -> Result<Self> {
        let n = rgs.len();
        let mut blocks: Vec<u64> = Vec::new();
        for (i, &label) in rgs.iter().enumerate() {
            if label > blocks.len() {
                return Err(Error::InvalidPartition(format!(
                    "label {label} at position {} breaks restricted growth",
                    i + 1
                )));
            }
            if label == blocks.len() {
                blocks.push(0);
            }
            blocks[label] |= 1u64 << i;
        }
        Ok(Partition {
            blocks: blocks
                .into_iter()
                .map(|b| IndexSet::from_bits_unchecked(b, n))
                .collect(),
            ground_n: n,
        })
    }

    /// Every partition of `[1:n]`, in lexicographic restricted-growth order.
    pub fn enumerate_all(n: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        if n == 0 {
            out.push(Partition {
                blocks: Vec::new(),
                ground_n: 0,
            });
            return out;
        }
        let mut rgs = alloc::vec![0usize; n];
        loop {
            out.push(Self::from_restricted_growth(&rgs).expect("valid rgs"));
            // next restricted-growth string
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return out;
                }
                let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
                if rgs[i] <= max_prefix {
                    rgs[i] += 1;
                    for r in rgs.iter_mut().skip(i + 1) {
                        *r = 0;
                    }
                    break;
                }
                i -= 1;
            }
        }
    }

    pub fn blocks(&self) -> &[IndexSet] {
        &self.blocks
    }

    pub fn ground_n(&self) -> usize {
        self.ground_n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Nonempty intersections of the blocks with `within`, in block order.
    pub fn restricted_to(&self, within: IndexSet) -> Vec<IndexSet> {
        self.blocks
            .iter()
            .map(|b| b.intersection(&within))
            .filter(|b| !b.is_empty())
            .collect()
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.to_vec()).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, b) in self.blocks.iter().enumerate() {
            if pos > 0 {
                f.write_str("|")?;
            }
            for (j, i) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{i}")?;
            }
        }
        Ok(())
    }
}
