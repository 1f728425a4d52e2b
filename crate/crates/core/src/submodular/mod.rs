//! Normalized set functions `f: 2^[1:n] → ℝ` with `f(∅) = 0`, and the
//! Han-type and partition-type upper bounds on `f([1:n])`, in both their
//! classical and conditioned (suffix `[p+1:n]`) forms.
//!
//! Every sum runs over subsets in increasing bitmask order, so results are
//! bit-for-bit reproducible. Evaluations are memoized per function.

mod instances;

pub use instances::{
    discrete_entropy_fn, facility_location_fn, gaussian_entropy_fn, graph_cut_fn, matroid_rank_fn,
    modular_fn, set_cover_fn, JointPmf, MatroidSpec,
};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use crate::error::{Error, Result};
use crate::sets::{
    all_subsets, binomial, checked_subsets_of_size, deposit, IndexSet, Partition, MAX_SUBSETS,
};

/// Relative tolerance used to declare equality (and to forgive rounding in
/// "holds" verdicts): `|slack| ≤ DEFAULT_TOL · max(1, |bound|)`.
pub const DEFAULT_TOL: f64 = 1e-9;

pub type Oracle = Arc<dyn Fn(IndexSet) -> f64 + Send + Sync>;

/// Evaluation oracle for a set function normalized to `f(∅) = 0`.
///
/// The memo cache uses interior mutability, so a `SetFunction` is `Send` but
/// not `Sync`: share it across threads by cloning (clones start with an
/// empty cache).
pub struct SetFunction {
    ground_n: usize,
    label: String,
    oracle: Oracle,
    offset: f64,
    origin: Vec<usize>,
    memo: RefCell<BTreeMap<u64, f64>>,
}

impl Clone for SetFunction {
    fn clone(&self) -> Self {
        SetFunction {
            ground_n: self.ground_n,
            label: self.label.clone(),
            oracle: Arc::clone(&self.oracle),
            offset: self.offset,
            origin: self.origin.clone(),
            memo: RefCell::new(BTreeMap::new()),
        }
    }
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetFunction")
            .field("ground_n", &self.ground_n)
            .field("label", &self.label)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

impl SetFunction {
    /// Wraps `oracle`; the value at `∅` is subtracted from every evaluation.
    pub fn new<F>(ground_n: usize, label: impl Into<String>, oracle: F) -> Result<Self>
    where
        F: Fn(IndexSet) -> f64 + Send + Sync + 'static,
    {
        Self::from_oracle(
            ground_n,
            label.into(),
            Arc::new(oracle),
            (1..=ground_n).collect(),
        )
    }

    fn from_oracle(
        ground_n: usize,
        label: String,
        oracle: Oracle,
        origin: Vec<usize>,
    ) -> Result<Self> {
        if ground_n > crate::sets::MAX_GROUND {
            return Err(Error::InvalidInstance(alloc::format!(
                "ground set of size {ground_n} exceeds {}",
                crate::sets::MAX_GROUND
            )));
        }
        let offset = oracle(IndexSet::empty(ground_n));
        if !offset.is_finite() {
            return Err(Error::InvalidInstance(alloc::format!(
                "f(∅) = {offset} is not finite"
            )));
        }
        Ok(SetFunction {
            ground_n,
            label,
            oracle,
            offset,
            origin,
            memo: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn ground_n(&self) -> usize {
        self.ground_n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Original (1-based) index of each current index, after contractions
    /// and relabelings.
    pub fn index_map(&self) -> &[usize] {
        &self.origin
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.ground_n)
    }

    pub fn evaluate(&self, s: IndexSet) -> Result<f64> {
        s.expect_ground(self.ground_n)?;
        Ok(self.value(s))
    }

    pub(crate) fn value(&self, s: IndexSet) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        if let Some(&v) = self.memo.borrow().get(&s.bits()) {
            return v;
        }
        let v = (self.oracle)(s) - self.offset;
        self.memo.borrow_mut().insert(s.bits(), v);
        v
    }

    /// Every value `f(S)` indexed by bitmask; requires `ground_n ≤ 26`.
    pub(crate) fn table(&self) -> Vec<f64> {
        let n = self.ground_n;
        assert!(n <= 26);
        all_subsets(self.full_set())
            .map(|s| self.value(s))
            .collect()
    }

    /// `max(1, |f([1:n])|, max_i |f({i})|)`, the scale for tolerance checks.
    pub fn scale(&self) -> f64 {
        let mut s = self.value(self.full_set()).abs().max(1.0);
        for i in 1..=self.ground_n {
            s = s.max(self.value(IndexSet::empty(self.ground_n).with(i)).abs());
        }
        s
    }
}

/// `f(S | T) = f(S ∪ T) − f(T)`.
pub fn conditional_value(f: &SetFunction, s: IndexSet, t: IndexSet) -> Result<f64> {
    s.expect_ground(f.ground_n)?;
    t.expect_ground(f.ground_n)?;
    Ok(f.value(s.union(&t)) - f.value(t))
}

/// Contraction by `C`: the function `S ↦ f(S | C)` on `[1:n] \ C`, re-indexed
/// to `1..n−|C|` in increasing original order.
pub fn contract(f: &SetFunction, c: IndexSet) -> Result<SetFunction> {
    c.expect_ground(f.ground_n)?;
    if c.is_empty() {
        return Ok(f.clone());
    }
    let rest = c.complement();
    let m = rest.len();
    let parent = Arc::clone(&f.oracle);
    let n = f.ground_n;
    let c_bits = c.bits();
    let rest_bits = rest.bits();
    let base = parent(c);
    let oracle: Oracle = Arc::new(move |s: IndexSet| {
        let lifted = IndexSet::from_bits_unchecked(deposit(s.bits(), rest_bits) | c_bits, n);
        parent(lifted) - base
    });
    let origin = rest.iter().map(|i| f.origin[i - 1]).collect();
    let label = alloc::format!("{} | {}", f.label, c);
    SetFunction::from_oracle(m, label, oracle, origin)
}

/// Relabels the ground set: new index `i` is old index `order[i-1]`.
///
/// Lets callers condition on an arbitrary set `C` by moving it to the suffix.
pub fn permute(f: &SetFunction, order: &[usize]) -> Result<SetFunction> {
    let n = f.ground_n;
    crate::linalg::check_permutation(order, n)?;
    let order_bits: Vec<u64> = order.iter().map(|&o| 1u64 << (o - 1)).collect();
    let parent = Arc::clone(&f.oracle);
    let oracle: Oracle = Arc::new(move |s: IndexSet| {
        let mut bits = 0u64;
        for i in s.iter() {
            bits |= order_bits[i - 1];
        }
        parent(IndexSet::from_bits_unchecked(bits, n))
    });
    let origin = order.iter().map(|&o| f.origin[o - 1]).collect();
    SetFunction::from_oracle(n, f.label.clone(), oracle, origin)
}

/// Ordering for [`permute`] that moves `suffix` to the end of the ground set,
/// keeping relative order on both sides.
pub fn order_with_suffix(suffix: IndexSet) -> Vec<usize> {
    suffix.complement().iter().chain(suffix.iter()).collect()
}

/// Brute-force limits and tolerance shared by the exhaustive checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    pub brute_force_cap: usize,
    pub max_subsets: u128,
    pub tol: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            brute_force_cap: 16,
            max_subsets: MAX_SUBSETS,
            tol: DEFAULT_TOL,
        }
    }
}

impl Limits {
    fn require(&self, n: usize, evaluations: u128) -> Result<()> {
        // value tables are materialized in memory, hence the hard ceiling
        let cap = self.brute_force_cap.min(26);
        if n > cap {
            return Err(Error::GroundTooLarge {
                n,
                cap,
                evaluations,
            });
        }
        Ok(())
    }
}

/// `lhs ≤ bound` with its slack and equality verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InequalityVerdict {
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
    pub equality: bool,
}

impl InequalityVerdict {
    pub fn judge(lhs: f64, bound: f64) -> Self {
        Self::judge_with(lhs, bound, DEFAULT_TOL)
    }

    pub fn judge_with(lhs: f64, bound: f64, tol: f64) -> Self {
        let slack = bound - lhs;
        let allowance = tol * bound.abs().max(1.0);
        InequalityVerdict {
            lhs,
            bound,
            slack,
            holds: slack >= -allowance,
            equality: slack.abs() <= allowance,
        }
    }

    /// Re-judges with a different tolerance.
    pub fn with_tol(self, tol: f64) -> Self {
        Self::judge_with(self.lhs, self.bound, tol)
    }

    /// Slack divided by `max(1, |bound|)`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / self.bound.abs().max(1.0)
    }
}

/// The two links of a conditioned chain
/// `f([1:n]) ≤ inner ≤ outer`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainVerdict {
    /// `f([1:n])` against the conditioned bound.
    pub inner: InequalityVerdict,
    /// Conditioned bound against the classical one.
    pub outer: InequalityVerdict,
}

impl ChainVerdict {
    fn new(total: f64, inner: f64, outer: f64) -> Self {
        ChainVerdict {
            inner: InequalityVerdict::judge(total, inner),
            outer: InequalityVerdict::judge(inner, outer),
        }
    }

    pub fn inner_bound(&self) -> f64 {
        self.inner.bound
    }

    pub fn outer_bound(&self) -> f64 {
        self.outer.bound
    }

    pub fn holds(&self) -> bool {
        self.inner.holds && self.outer.holds
    }

    pub fn with_tol(self, tol: f64) -> Self {
        ChainVerdict {
            inner: self.inner.with_tol(tol),
            outer: self.outer.with_tol(tol),
        }
    }
}

fn check_k(k: usize, upper: usize, what: &str) -> Result<()> {
    if k == 0 || k > upper {
        return Err(Error::InvalidParams(alloc::format!(
            "k = {k} must satisfy 1 ≤ k ≤ {what} = {upper}"
        )));
    }
    Ok(())
}

fn check_p(p: usize, n: usize) -> Result<()> {
    if p == 0 || p > n {
        return Err(Error::InvalidParams(alloc::format!(
            "p = {p} must satisfy 1 ≤ p ≤ n = {n}"
        )));
    }
    Ok(())
}

/// Han's bound: `f([1:n]) ≤ (1/C(n−1,k−1)) Σ_{|S|=k} f(S)`.
pub fn han_bound(f: &SetFunction, k: usize) -> Result<InequalityVerdict> {
    let n = f.ground_n;
    check_k(k, n, "n")?;
    let mut sum = 0.0;
    for s in checked_subsets_of_size(f.full_set(), k, MAX_SUBSETS)? {
        sum += f.value(s);
    }
    let bound = sum / binomial(n - 1, k - 1)? as f64;
    Ok(InequalityVerdict::judge(f.value(f.full_set()), bound))
}

/// Conditioned Han chain with conditioning set `Q = [p+1:n]`:
/// `f([1:n]) ≤ (1/C(p−1,k−1)) Σ_{S⊆[1:p],|S|=k} f(S|Q) + f(Q) ≤ han_bound(f, k)`.
pub fn strengthened_han_bound(f: &SetFunction, k: usize, p: usize) -> Result<ChainVerdict> {
    let n = f.ground_n;
    check_p(p, n)?;
    check_k(k, p, "p")?;
    let inner = conditioned_han_value(f, k, p)?;
    let outer = han_bound(f, k)?.bound;
    Ok(ChainVerdict::new(f.value(f.full_set()), inner, outer))
}

fn conditioned_han_value(f: &SetFunction, k: usize, p: usize) -> Result<f64> {
    let n = f.ground_n;
    let q = IndexSet::suffix_after(p, n)?;
    let fq = f.value(q);
    let mut sum = 0.0;
    for s in checked_subsets_of_size(IndexSet::prefix(p, n)?, k, MAX_SUBSETS)? {
        sum += f.value(s.union(&q)) - fq;
    }
    Ok(sum / binomial(p - 1, k - 1)? as f64 + fq)
}

/// Partition subadditivity: `f([1:n]) ≤ Σ_{S∈𝒫} f(S)`.
pub fn partition_bound(f: &SetFunction, partition: &Partition) -> Result<InequalityVerdict> {
    check_partition(f, partition)?;
    let bound = partition
        .blocks()
        .iter()
        .fold(0.0, |acc, &b| acc + f.value(b));
    Ok(InequalityVerdict::judge(f.value(f.full_set()), bound))
}

fn check_partition(f: &SetFunction, partition: &Partition) -> Result<()> {
    if partition.ground_n() != f.ground_n {
        return Err(Error::InvalidPartition(alloc::format!(
            "partition covers [1:{}] but the ground set is [1:{}]",
            partition.ground_n(),
            f.ground_n
        )));
    }
    Ok(())
}

/// Conditioned partition chain with `𝒫′ = {S ∩ [1:p] ≠ ∅}`:
/// `f([1:n]) ≤ Σ_{S∈𝒫′} f(S | [p+1:n]) + f([p+1:n]) ≤ Σ_{S∈𝒫} f(S)`.
pub fn strengthened_partition_bound(
    f: &SetFunction,
    p: usize,
    partition: &Partition,
) -> Result<ChainVerdict> {
    let n = f.ground_n;
    check_partition(f, partition)?;
    check_p(p, n)?;
    let q = IndexSet::suffix_after(p, n)?;
    let fq = f.value(q);
    let induced = partition.restricted_to(IndexSet::prefix(p, n)?);
    let inner = induced
        .iter()
        .fold(0.0, |acc, s| acc + (f.value(s.union(&q)) - fq))
        + fq;
    let outer = partition_bound(f, partition)?.bound;
    Ok(ChainVerdict::new(f.value(f.full_set()), inner, outer))
}

/// `a_k = Σ_{S⊆[1:p],|S|=k} f(S) / (C(p,k)·k)` for `k = 1..=p`; non-increasing
/// whenever `f` is submodular.
pub fn subset_average_sequence(f: &SetFunction, p: usize, limits: &Limits) -> Result<Vec<f64>> {
    check_p(p, f.ground_n)?;
    limits.require(p, 1u128 << p.min(127))?;
    let within = IndexSet::prefix(p, f.ground_n)?;
    (1..=p)
        .map(|k| {
            let mut sum = 0.0;
            for s in checked_subsets_of_size(within, k, limits.max_subsets)? {
                sum += f.value(s);
            }
            Ok(sum / (binomial(p, k)? as f64 * k as f64))
        })
        .collect()
}

/// A violated diminishing-returns instance:
/// `f(S∪{i}) − f(S) < f(S∪{i,j}) − f(S∪{j})`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubmodularityWitness {
    pub set: IndexSet,
    pub i: usize,
    pub j: usize,
    pub violation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubmodularityCheck {
    pub holds: bool,
    pub witness: Option<SubmodularityWitness>,
}

/// Exhaustive diminishing-returns check over all `S` and `i, j ∉ S`.
pub fn check_submodular(f: &SetFunction, limits: &Limits) -> Result<SubmodularityCheck> {
    let n = f.ground_n;
    let evaluations = (1u128 << n.min(100)) * (n as u128) * (n as u128);
    limits.require(n, evaluations)?;
    let values = f.table();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let allowance = limits.tol * scale;
    for s in 0..values.len() {
        for i in 0..n {
            let bi = 1usize << i;
            if s & bi != 0 {
                continue;
            }
            for j in 0..n {
                let bj = 1usize << j;
                if i == j || s & bj != 0 {
                    continue;
                }
                let gain = values[s | bi] - values[s];
                let later = values[s | bi | bj] - values[s | bj];
                if gain - later < -allowance || gain.is_nan() || later.is_nan() {
                    return Ok(SubmodularityCheck {
                        holds: false,
                        witness: Some(SubmodularityWitness {
                            set: IndexSet::from_bits_unchecked(s as u64, n),
                            i: i + 1,
                            j: j + 1,
                            violation: later - gain,
                        }),
                    });
                }
            }
        }
    }
    Ok(SubmodularityCheck {
        holds: true,
        witness: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainRuleCheck {
    /// `f([1:n]) = Σ_i f({i} | [1:i−1])`.
    pub telescoping: bool,
    /// `f(S | T ∪ U) ≤ f(S | T)` on every disjoint triple.
    pub conditioning_reduces: bool,
    /// First triple `(S, T, U)` violating the conditioning inequality.
    pub witness: Option<(IndexSet, IndexSet, IndexSet)>,
}

impl ChainRuleCheck {
    pub fn holds(&self) -> bool {
        self.telescoping && self.conditioning_reduces
    }
}

/// Checks the chain rule and "conditioning reduces" on all disjoint triples.
///
/// The triple enumeration visits `4^n` assignments and is refused when that
/// exceeds `limits.max_subsets`.
pub fn check_chain_rule(f: &SetFunction, limits: &Limits) -> Result<ChainRuleCheck> {
    let n = f.ground_n;
    let evaluations = 1u128 << (2 * n).min(127);
    limits.require(n, evaluations)?;
    if evaluations > limits.max_subsets {
        // largest n with 4^n within the subset budget
        let cap = (128 - limits.max_subsets.leading_zeros() as usize - 1) / 2;
        return Err(Error::GroundTooLarge {
            n,
            cap,
            evaluations,
        });
    }
    let values = f.table();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let allowance = limits.tol * scale;

    let total = values[values.len() - 1];
    let mut telescoped = 0.0;
    for i in 0..n {
        let prefix = (1usize << i) - 1;
        telescoped += values[prefix | 1 << i] - values[prefix];
    }
    let telescoping = (telescoped - total).abs() <= limits.tol * total.abs().max(1.0);

    // each element is assigned to none, S, T or U (two bits per element)
    let mut witness = None;
    'outer: for code in 0..(1u64 << (2 * n)) {
        let (mut s, mut t, mut u) = (0usize, 0usize, 0usize);
        for e in 0..n {
            match (code >> (2 * e)) & 3 {
                1 => s |= 1 << e,
                2 => t |= 1 << e,
                3 => u |= 1 << e,
                _ => {}
            }
        }
        if s == 0 || u == 0 {
            continue;
        }
        let with_u = values[s | t | u] - values[t | u];
        let without = values[s | t] - values[t];
        if with_u - without > allowance {
            witness = Some((
                IndexSet::from_bits_unchecked(s as u64, n),
                IndexSet::from_bits_unchecked(t as u64, n),
                IndexSet::from_bits_unchecked(u as u64, n),
            ));
            break 'outer;
        }
    }
    Ok(ChainRuleCheck {
        telescoping,
        conditioning_reduces: witness.is_none(),
        witness,
    })
}

fn modular_gap(f: &SetFunction, s: IndexSet, given: IndexSet) -> f64 {
    let whole = f.value(s.union(&given)) - f.value(given);
    let parts = s.iter().fold(0.0, |acc, i| {
        acc + (f.value(given.with(i)) - f.value(given))
    });
    (whole - parts).abs()
}

/// Equality diagnostics for the conditioned Han chain at `(k, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HanEqualityReport {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    /// `S ↦ f(S | [p+1:n])` is modular on `[1:p]`.
    pub contraction_modular: bool,
    /// (i) `f(S) = Σ_{i∈S} f({i})` for `S ⊆ [1:p]`, `|S| ≤ k`.
    pub small_sets_modular: bool,
    /// (ii) `f(S ∪ [p+1:n]) = f(S) + f([p+1:n])` for `S ⊆ [1:p]`, `|S| ≤ k`.
    pub separates_from_suffix: bool,
    /// (iii) `f` is modular on `[p+1:n]`.
    pub suffix_modular: bool,
    pub chain: ChainVerdict,
}

impl HanEqualityReport {
    pub fn inner_predicted(&self) -> bool {
        self.k == self.p || self.contraction_modular
    }

    /// With `p = n` the conditioning set is empty and both sides coincide.
    pub fn outer_predicted(&self) -> bool {
        self.p == self.n
            || (self.small_sets_modular && self.separates_from_suffix && self.suffix_modular)
    }

    /// Predicted equalities agree with the observed slacks.
    pub fn consistent(&self) -> bool {
        self.inner_predicted() == self.chain.inner.equality
            && self.outer_predicted() == self.chain.outer.equality
    }
}

pub fn strong_han_equality(
    f: &SetFunction,
    k: usize,
    p: usize,
    limits: &Limits,
) -> Result<HanEqualityReport> {
    let n = f.ground_n;
    limits.require(n, 1u128 << n.min(127))?;
    let chain = strengthened_han_bound(f, k, p)?.with_tol(limits.tol);
    let allowance = limits.tol * f.scale();
    let prefix = IndexSet::prefix(p, n)?;
    let q = IndexSet::suffix_after(p, n)?;
    let empty = IndexSet::empty(n);

    let contraction_modular = all_subsets(prefix).all(|s| modular_gap(f, s, q) <= allowance);
    let small = || all_subsets(prefix).filter(|s| s.len() <= k);
    let small_sets_modular = small().all(|s| modular_gap(f, s, empty) <= allowance);
    let fq = f.value(q);
    let separates_from_suffix =
        small().all(|s| (f.value(s.union(&q)) - f.value(s) - fq).abs() <= allowance);
    let suffix_modular = all_subsets(q).all(|s| modular_gap(f, s, empty) <= allowance);
    Ok(HanEqualityReport {
        n,
        k,
        p,
        contraction_modular,
        small_sets_modular,
        separates_from_suffix,
        suffix_modular,
        chain,
    })
}

/// Equality diagnostics for the conditioned partition chain.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartitionEqualityReport {
    pub p: usize,
    /// `f([1:p] | Q) = Σ_{S∈𝒫′} f(S | Q)` with `Q = [p+1:n]`.
    pub conditionally_additive: bool,
    /// (i) `f(S) = f(S ∩ Q) + f(S ∩ [1:p] | Q)` for every block `S`.
    pub blocks_separate: bool,
    /// (ii) `f(Q) = Σ_{S∈𝒫} f(S ∩ Q)`.
    pub suffix_additive: bool,
    pub chain: ChainVerdict,
}

impl PartitionEqualityReport {
    pub fn inner_predicted(&self) -> bool {
        self.conditionally_additive
    }

    pub fn outer_predicted(&self) -> bool {
        self.blocks_separate && self.suffix_additive
    }

    pub fn consistent(&self) -> bool {
        self.inner_predicted() == self.chain.inner.equality
            && self.outer_predicted() == self.chain.outer.equality
    }
}

pub fn conditional_partition_equality(
    f: &SetFunction,
    p: usize,
    partition: &Partition,
    limits: &Limits,
) -> Result<PartitionEqualityReport> {
    let n = f.ground_n;
    limits.require(n, partition.len() as u128 * 4)?;
    let chain = strengthened_partition_bound(f, p, partition)?.with_tol(limits.tol);
    let allowance = limits.tol * f.scale();
    let prefix = IndexSet::prefix(p, n)?;
    let q = IndexSet::suffix_after(p, n)?;
    let fq = f.value(q);

    let whole = f.value(prefix.union(&q)) - fq;
    let parts = partition
        .restricted_to(prefix)
        .iter()
        .fold(0.0, |acc, s| acc + (f.value(s.union(&q)) - fq));
    let conditionally_additive = (whole - parts).abs() <= allowance;

    let blocks_separate = partition.blocks().iter().all(|s| {
        let tail = s.intersection(&q);
        let head = s.intersection(&prefix);
        let rhs = f.value(tail) + (f.value(head.union(&q)) - fq);
        (f.value(*s) - rhs).abs() <= allowance
    });
    let tails = partition
        .blocks()
        .iter()
        .fold(0.0, |acc, s| acc + f.value(s.intersection(&q)));
    let suffix_additive = (fq - tails).abs() <= allowance;
    Ok(PartitionEqualityReport {
        p,
        conditionally_additive,
        blocks_separate,
        suffix_additive,
        chain,
    })
}
