//! Determinantal and eigenvalue upper bounds for positive definite matrices:
//! Hadamard, Szász, Fischer, Ky Fan, their conditioned (Schur-complement)
//! strengthenings, the eigenvalue-product bound, and equality diagnostics.
//!
//! Everything is carried in the log domain. A bound `b` on `|K|` is returned
//! as `ln b`; `exp` is only taken for display.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{Error, Result};
use crate::linalg::{
    self, eigenvalues_sorted, log_det_principal, max_block_entry, max_off_diagonal,
    principal_submatrix, rect_submatrix, schur_complement, EigenSpectrum, Matrix, SymPdMatrix,
};
use crate::sets::{binomial, checked_subsets_of_size, IndexSet, Partition, MAX_SUBSETS};
use crate::submodular::DEFAULT_TOL;

/// Strictness threshold: `slack > STRICT_TOL · max(1, |bound|)`.
pub const STRICT_TOL: f64 = 1e-12;

fn allowance(bound: f64, tol: f64) -> f64 {
    tol * bound.abs().max(1.0)
}

/// Memoized `ln|K(S)|` over principal minors of one matrix.
pub struct MinorCache<'a> {
    k: &'a SymPdMatrix,
    cache: RefCell<BTreeMap<u64, f64>>,
}

impl<'a> MinorCache<'a> {
    pub fn new(k: &'a SymPdMatrix) -> Self {
        MinorCache {
            k,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn matrix(&self) -> &SymPdMatrix {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// `ln|K(S)|`, with `ln|K(∅)| = 0`.
    pub fn log_det(&self, s: IndexSet) -> Result<f64> {
        if let Some(&v) = self.cache.borrow().get(&s.bits()) {
            return Ok(v);
        }
        let v = log_det_principal(self.k, s)?;
        self.cache.borrow_mut().insert(s.bits(), v);
        Ok(v)
    }

    pub fn hadamard(&self) -> Result<f64> {
        let n = self.dim();
        Ok((0..n).fold(0.0, |acc, i| acc + libm::log(self.k[(i, i)])))
    }

    pub fn szasz(&self, k: usize) -> Result<f64> {
        let n = self.dim();
        check_range("k", k, 1, n)?;
        let mut sum = 0.0;
        for s in checked_subsets_of_size(self.k.full_set(), k, MAX_SUBSETS)? {
            sum += self.log_det(s)?;
        }
        Ok(sum / binomial(n - 1, k - 1)? as f64)
    }

    pub fn fischer(&self, partition: &Partition) -> Result<f64> {
        self.check_partition(partition)?;
        partition
            .blocks()
            .iter()
            .try_fold(0.0, |acc, &b| Ok(acc + self.log_det(b)?))
    }

    pub fn ky_fan(&self, p: usize) -> Result<f64> {
        let n = self.dim();
        check_range("p", p, 1, n)?;
        let q = IndexSet::suffix_after(p, n)?;
        let base = self.log_det(q)?;
        let mut sum = 0.0;
        for i in 1..=p {
            sum += self.log_det(q.with(i))? - base;
        }
        Ok(sum + base)
    }

    /// The conditioned Szász value `SS_1(k, p)` (inner link of the chain).
    pub fn conditioned_szasz(&self, k: usize, p: usize) -> Result<f64> {
        let n = self.dim();
        check_range("p", p, 1, n)?;
        check_range("k", k, 1, p)?;
        let pc = IndexSet::suffix_after(p, n)?;
        let base = self.log_det(pc)?;
        let mut sum = 0.0;
        for s in checked_subsets_of_size(IndexSet::prefix(p, n)?, k, MAX_SUBSETS)? {
            sum += self.log_det(s.union(&pc))? - base;
        }
        Ok(sum / binomial(p - 1, k - 1)? as f64 + base)
    }

    pub fn strong_szasz(&self, k: usize, p: usize) -> Result<DetChain> {
        let inner = self.conditioned_szasz(k, p)?;
        let outer = self.szasz(k)?;
        let log_det = self.log_det(self.k.full_set())?;
        Ok(DetChain::new(log_det, inner, outer))
    }

    /// The conditioned Fischer value `SF_1(p, 𝒫)`.
    pub fn conditioned_fischer(&self, p: usize, partition: &Partition) -> Result<f64> {
        let n = self.dim();
        self.check_partition(partition)?;
        check_range("p", p, 1, n)?;
        let pc = IndexSet::suffix_after(p, n)?;
        let base = self.log_det(pc)?;
        let mut sum = 0.0;
        for s in partition.restricted_to(IndexSet::prefix(p, n)?) {
            sum += self.log_det(s.union(&pc))? - base;
        }
        Ok(sum + base)
    }

    pub fn strong_fischer(&self, p: usize, partition: &Partition) -> Result<DetChain> {
        let inner = self.conditioned_fischer(p, partition)?;
        let outer = self.fischer(partition)?;
        let log_det = self.log_det(self.k.full_set())?;
        Ok(DetChain::new(log_det, inner, outer))
    }

    /// Upper bound on `ln(λ_1⋯λ_{h+ℓ})`:
    /// `ln|K(Q_ℓ)| + (1/C(h−1,k−1)) Σ_{S⊆[1:h],|S|=k} (ln|K(S∪P^c)| − ln|K(P^c)|)`.
    pub fn eigen_product(&self, params: EigenParams) -> Result<f64> {
        let n = self.dim();
        params.validate(n)?;
        let EigenParams { h, p, l, k } = params;
        let q_l = IndexSet::interval(p + 1, p + l, n)?;
        let pc = IndexSet::suffix_after(p, n)?;
        let base = self.log_det(pc)?;
        let mut sum = 0.0;
        for s in checked_subsets_of_size(IndexSet::prefix(h, n)?, k, MAX_SUBSETS)? {
            sum += self.log_det(s.union(&pc))? - base;
        }
        Ok(self.log_det(q_l)? + sum / binomial(h - 1, k - 1)? as f64)
    }

    fn check_partition(&self, partition: &Partition) -> Result<()> {
        if partition.ground_n() != self.dim() {
            return Err(Error::InvalidPartition(format!(
                "partition covers [1:{}] but the matrix is {}x{}",
                partition.ground_n(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

fn check_range(name: &str, v: usize, lo: usize, hi: usize) -> Result<()> {
    if v < lo || v > hi {
        return Err(Error::InvalidParams(format!(
            "{name} = {v} must satisfy {lo} ≤ {name} ≤ {hi}"
        )));
    }
    Ok(())
}

/// The chain `ln|K| ≤ inner ≤ outer` for one parameter choice.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetChain {
    pub log_det: f64,
    pub inner: f64,
    pub outer: f64,
    /// `ln|K| ≤ inner` within tolerance.
    pub lower_holds: bool,
    /// `inner ≤ outer` within tolerance.
    pub upper_holds: bool,
}

impl DetChain {
    fn new(log_det: f64, inner: f64, outer: f64) -> Self {
        DetChain {
            log_det,
            inner,
            outer,
            lower_holds: inner - log_det >= -allowance(inner, DEFAULT_TOL),
            upper_holds: outer - inner >= -allowance(outer, DEFAULT_TOL),
        }
    }

    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }

    pub fn inner_slack(&self) -> f64 {
        self.inner - self.log_det
    }

    pub fn outer_slack(&self) -> f64 {
        self.outer - self.inner
    }

    pub fn inner_equality(&self) -> bool {
        self.inner_slack().abs() <= allowance(self.inner, DEFAULT_TOL)
    }

    pub fn outer_equality(&self) -> bool {
        self.outer_slack().abs() <= allowance(self.outer, DEFAULT_TOL)
    }

    /// `outer − inner > STRICT_TOL · max(1, |outer|)`.
    pub fn strictly_tighter(&self) -> bool {
        self.outer_slack() > allowance(self.outer, STRICT_TOL)
    }
}

/// Parameters `(h, p, ℓ, k)` of the eigenvalue-product bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenParams {
    pub h: usize,
    pub p: usize,
    pub l: usize,
    pub k: usize,
}

impl EigenParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        let EigenParams { h, p, l, k } = *self;
        if !(1 <= k && k <= h && h <= p && p <= n && l <= n - p.min(n)) {
            return Err(Error::InvalidParams(format!(
                "eigen bound needs 1 ≤ k ≤ h ≤ p ≤ n and 0 ≤ ℓ ≤ n − p; got h={h}, p={p}, ℓ={l}, k={k}, n={n}"
            )));
        }
        Ok(())
    }

    /// Every valid tuple for dimension `n`.
    pub fn grid(n: usize) -> Vec<EigenParams> {
        let mut out = Vec::new();
        for p in 1..=n {
            for h in 1..=p {
                for k in 1..=h {
                    for l in 0..=(n - p) {
                        out.push(EigenParams { h, p, l, k });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenBound {
    pub params: EigenParams,
    pub log_bound: f64,
    /// `Σ_{i ≤ h+ℓ} ln λ_i` from the ascending spectrum.
    pub log_eigen_product: f64,
    pub holds: bool,
}

pub fn hadamard_bound(k: &SymPdMatrix) -> Result<f64> {
    MinorCache::new(k).hadamard()
}

/// `(1/C(n−1,k−1)) Σ_{|S|=k} ln|K(S)|`.
pub fn szasz_bound(k: &SymPdMatrix, size: usize) -> Result<f64> {
    MinorCache::new(k).szasz(size)
}

/// `Σ_{S∈𝒫} ln|K(S)|`.
pub fn fischer_bound(k: &SymPdMatrix, partition: &Partition) -> Result<f64> {
    MinorCache::new(k).fischer(partition)
}

/// `ln|K(Q)| + Σ_{i≤p} (ln|K({i}∪Q)| − ln|K(Q)|)` with `Q = [p+1:n]`.
pub fn kyfan_bound(k: &SymPdMatrix, p: usize) -> Result<f64> {
    MinorCache::new(k).ky_fan(p)
}

/// `ln|K| ≤ SS_1(k,p) ≤ SS_2(k)`, where `SS_2` is the Szász bound.
pub fn strong_szasz_bound(k: &SymPdMatrix, size: usize, p: usize) -> Result<DetChain> {
    MinorCache::new(k).strong_szasz(size, p)
}

/// `ln|K| ≤ SF_1(p,𝒫) ≤ SF_2(𝒫)`, where `SF_2` is the Fischer bound.
pub fn strong_fischer_bound(k: &SymPdMatrix, p: usize, partition: &Partition) -> Result<DetChain> {
    MinorCache::new(k).strong_fischer(p, partition)
}

pub fn eigen_product_bound(k: &SymPdMatrix, params: EigenParams) -> Result<EigenBound> {
    let spectrum = eigenvalues_sorted(k)?;
    eigen_bound_with(&MinorCache::new(k), &spectrum, params)
}

fn eigen_bound_with(
    minors: &MinorCache<'_>,
    spectrum: &EigenSpectrum,
    params: EigenParams,
) -> Result<EigenBound> {
    let log_bound = minors.eigen_product(params)?;
    let log_eigen_product = spectrum.log_product_smallest(params.h + params.l);
    Ok(EigenBound {
        params,
        log_bound,
        log_eigen_product,
        holds: log_bound - log_eigen_product >= -allowance(log_bound, DEFAULT_TOL),
    })
}

/// `SS_1` computed through the Schur complement `M` of `K(P^c)`:
/// `ln|K(P^c)| + szasz_bound(M, k)`. Independent of the direct minor route.
pub fn schur_route_bound(k: &SymPdMatrix, size: usize, p: usize) -> Result<f64> {
    let n = k.dim();
    check_range("p", p, 1, n.saturating_sub(1))?;
    check_range("k", size, 1, p)?;
    let prefix = IndexSet::prefix(p, n)?;
    let m = schur_complement(k, prefix)?;
    let base = log_det_principal(k, prefix.complement())?;
    Ok(base + szasz_bound(&m, size)?)
}

/// Reorders `K` so that `lead` occupies `[1:|lead|]` and returns the
/// permutation used (new index `i` is old index `order[i-1]`).
pub fn with_leading(k: &SymPdMatrix, lead: IndexSet) -> Result<(SymPdMatrix, Vec<usize>)> {
    lead.expect_ground(k.dim())?;
    let order: Vec<usize> = lead.iter().chain(lead.complement().iter()).collect();
    Ok((linalg::permute(k, &order)?, order))
}

/// Which chain an equality diagnostic refers to.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainKind {
    StrongSzasz { k: usize, p: usize },
    StrongFischer { p: usize, partition: Partition },
}

/// One matrix condition characterizing equality in one link of a chain.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EqualityDiagnostic {
    pub condition: String,
    /// The chain link this condition characterizes, e.g.
    /// `strong_szasz(p=3 k=2).inner`.
    pub link: String,
    pub holds: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    /// 1-based location of the largest violation.
    pub witness: Option<(usize, usize)>,
    /// Whether the link's slack is zero within the equality tolerance.
    pub observed_equality: bool,
}

impl EqualityDiagnostic {
    fn new(
        condition: &str,
        link: &str,
        (max_violation, witness): (f64, Option<(usize, usize)>),
        tolerance: f64,
        observed_equality: bool,
    ) -> Self {
        let holds = max_violation <= tolerance;
        EqualityDiagnostic {
            condition: condition.to_string(),
            link: link.to_string(),
            holds,
            max_violation,
            tolerance,
            witness: if holds { None } else { witness },
            observed_equality,
        }
    }

    fn trivial(condition: &str, link: &str, observed_equality: bool) -> Self {
        Self::new(condition, link, (0.0, None), 0.0, observed_equality)
    }
}

/// Whether each link's conditions jointly agree with its observed equality.
pub fn diagnostics_consistent(diags: &[EqualityDiagnostic]) -> bool {
    let mut links: Vec<&str> = diags.iter().map(|d| d.link.as_str()).collect();
    links.dedup();
    links.iter().all(|link| {
        let of_link: Vec<_> = diags.iter().filter(|d| d.link == *link).collect();
        let predicted = of_link.iter().all(|d| d.holds);
        of_link.iter().all(|d| d.observed_equality == predicted)
    })
}

fn zero_tol(m: &Matrix) -> f64 {
    linalg::default_zero_tol(m)
}

fn max_of(
    a: (f64, Option<(usize, usize)>),
    b: (f64, Option<(usize, usize)>),
) -> (f64, Option<(usize, usize)>) {
    if b.0 > a.0 {
        b
    } else {
        a
    }
}

/// Schur complement of `K(P^c)` in `K` for the prefix `P = [1:p]`, or `K`
/// itself when `P^c` is empty. Indices of the result coincide with those of `P`.
fn prefix_schur(k: &SymPdMatrix, p: usize) -> Result<SymPdMatrix> {
    let n = k.dim();
    if p == n {
        Ok(k.clone())
    } else {
        schur_complement(k, IndexSet::prefix(p, n)?)
    }
}

/// Checks the matrix conditions that characterize equality in each link of
/// the named chain, next to the equality actually observed in its slack.
pub fn equality_diagnostics(k: &SymPdMatrix, chain: &ChainKind) -> Result<Vec<EqualityDiagnostic>> {
    let n = k.dim();
    let minors = MinorCache::new(k);
    let mut out = Vec::new();
    match chain {
        ChainKind::StrongSzasz { k: size, p } => {
            let (size, p) = (*size, *p);
            let c = minors.strong_szasz(size, p)?;
            let inner = format!("strong_szasz(p={p} k={size}).inner");
            let outer = format!("strong_szasz(p={p} k={size}).outer");
            if size == p {
                out.push(EqualityDiagnostic::trivial(
                    "k = p",
                    &inner,
                    c.inner_equality(),
                ));
            } else {
                let m = prefix_schur(k, p)?;
                out.push(EqualityDiagnostic::new(
                    "Schur complement of K(P^c) is diagonal",
                    &inner,
                    max_off_diagonal(&m),
                    zero_tol(&m),
                    c.inner_equality(),
                ));
            }
            let tol = zero_tol(k);
            if p == n {
                out.push(EqualityDiagnostic::trivial(
                    "p = n",
                    &outer,
                    c.outer_equality(),
                ));
            } else if size == 1 {
                let prefix = IndexSet::prefix(p, n)?;
                let pc = prefix.complement();
                out.push(EqualityDiagnostic::new(
                    "K(P,P^c) = 0",
                    &outer,
                    max_block_entry(k, prefix, pc),
                    tol,
                    c.outer_equality(),
                ));
                let (v, w) = max_off_diagonal(principal_submatrix(k, pc)?.as_matrix());
                let w = w.map(|(i, j)| (i + p, j + p));
                out.push(EqualityDiagnostic::new(
                    "K(P^c) is diagonal",
                    &outer,
                    (v, w),
                    tol,
                    c.outer_equality(),
                ));
            } else {
                out.push(EqualityDiagnostic::new(
                    "K is diagonal",
                    &outer,
                    max_off_diagonal(k),
                    tol,
                    c.outer_equality(),
                ));
            }
        }
        ChainKind::StrongFischer { p, partition } => {
            let p = *p;
            let c = minors.strong_fischer(p, partition)?;
            let inner = format!("strong_fischer(p={p} partition={partition}).inner");
            let outer = format!("strong_fischer(p={p} partition={partition}).outer");
            let prefix = IndexSet::prefix(p, n)?;
            let pc = prefix.complement();

            let m = prefix_schur(k, p)?;
            // M is indexed by [1:p], so restricted blocks keep their indices
            let induced: Vec<IndexSet> = partition
                .restricted_to(prefix)
                .iter()
                .map(|b| IndexSet::from_bits(b.bits(), p))
                .collect::<Result<_>>()?;
            let mut worst = (0.0, None);
            for (a, sa) in induced.iter().enumerate() {
                for sb in induced.iter().skip(a + 1) {
                    worst = max_of(worst, max_block_entry(&m, *sa, *sb));
                }
            }
            out.push(EqualityDiagnostic::new(
                "Schur complement vanishes between induced blocks",
                &inner,
                worst,
                zero_tol(&m),
                c.inner_equality(),
            ));

            let tol = zero_tol(k);
            let mut cond_i = (0.0, None);
            for s in partition.blocks() {
                let a = s.intersection(&prefix);
                let b = s.intersection(&pc);
                let cc = s.complement().intersection(&pc);
                if a.is_empty() || cc.is_empty() {
                    continue;
                }
                let mut resid = rect_submatrix(k, a, cc)?;
                if !b.is_empty() {
                    let kab = rect_submatrix(k, a, b)?;
                    let solved =
                        linalg::solve_spd(&rect_submatrix(k, b, b)?, &rect_submatrix(k, b, cc)?)?;
                    let proj = kab.matmul(&solved)?;
                    for r in 0..resid.rows() {
                        for col in 0..resid.cols() {
                            resid[(r, col)] -= proj[(r, col)];
                        }
                    }
                }
                let rows: Vec<usize> = a.to_vec();
                let cols: Vec<usize> = cc.to_vec();
                let (v, w) = max_off_block(&resid);
                cond_i = max_of(cond_i, (v, w.map(|(r, col)| (rows[r], cols[col]))));
            }
            out.push(EqualityDiagnostic::new(
                "K(A,C) = K(A,B)K(B)^-1 K(B,C) for every block",
                &outer,
                cond_i,
                tol,
                c.outer_equality(),
            ));

            let tails: Vec<IndexSet> = partition
                .blocks()
                .iter()
                .map(|s| s.intersection(&pc))
                .collect();
            let mut cond_ii = (0.0, None);
            for (a, ta) in tails.iter().enumerate() {
                for tb in tails.iter().skip(a + 1) {
                    cond_ii = max_of(cond_ii, max_block_entry(k, *ta, *tb));
                }
            }
            out.push(EqualityDiagnostic::new(
                "K vanishes between complement parts of distinct blocks",
                &outer,
                cond_ii,
                tol,
                c.outer_equality(),
            ));
        }
    }
    Ok(out)
}

/// Largest entry of a dense block with its 0-based location.
fn max_off_block(m: &Matrix) -> (f64, Option<(usize, usize)>) {
    let mut best = (0.0, None);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)].abs() > best.0 {
                best = (m[(i, j)].abs(), Some((i, j)));
            }
        }
    }
    best
}

/// Absolute slack allowed in the interlacing comparisons.
pub const INTERLACING_TOL: f64 = 1e-9;

/// For `|S| = n − m`: `λ_i ≤ μ_i ≤ λ_{i+m}` where `μ` are the eigenvalues of
/// `K(S)` and `λ` those of `K`, both ascending.
pub fn interlacing_check(k: &SymPdMatrix, s: IndexSet) -> Result<bool> {
    s.expect_ground(k.dim())?;
    let outer = eigenvalues_sorted(k)?;
    interlacing_with(k, &outer, s)
}

fn interlacing_with(k: &SymPdMatrix, outer: &EigenSpectrum, s: IndexSet) -> Result<bool> {
    let inner = eigenvalues_sorted(principal_submatrix(k, s)?.as_matrix())?;
    let m = k.dim() - s.len();
    Ok(inner.values.iter().enumerate().all(|(i, &mu)| {
        outer.values[i] - INTERLACING_TOL <= mu && mu <= outer.values[i + m] + INTERLACING_TOL
    }))
}

/// Which bounds `bound_report` computes.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub label: String,
    pub ks: Vec<usize>,
    pub ps: Vec<usize>,
    pub partitions: Vec<Partition>,
    pub eigen: Vec<EigenParams>,
    /// Include Hadamard and Ky Fan entries.
    pub classical: bool,
    pub diagnostics: bool,
    /// Condition on an arbitrary set instead of a prefix: `K` is permuted so
    /// this set leads, and `ps` is replaced by its size.
    pub leading: Option<IndexSet>,
    /// Relative tolerance for equality flags and non-strict ordering checks.
    pub tol: f64,
}

impl ReportConfig {
    pub fn new(label: impl Into<String>) -> Self {
        ReportConfig {
            label: label.into(),
            ks: Vec::new(),
            ps: Vec::new(),
            partitions: Vec::new(),
            eigen: Vec::new(),
            classical: true,
            diagnostics: true,
            leading: None,
            tol: DEFAULT_TOL,
        }
    }

    /// All `k ≤ p ≤ n` and every eigenvalue-bound tuple.
    pub fn full_grid(label: impl Into<String>, n: usize) -> Self {
        ReportConfig {
            ks: (1..=n).collect(),
            ps: (1..=n).collect(),
            eigen: EigenParams::grid(n),
            ..Self::new(label)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundParams {
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub k: Option<usize>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub p: Option<usize>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub h: Option<usize>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub l: Option<usize>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub partition: Option<Vec<Vec<usize>>>,
}

impl core::fmt::Display for BoundParams {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (name, v) in [("h", self.h), ("p", self.p), ("l", self.l), ("k", self.k)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if let Some(blocks) = &self.partition {
            let text: Vec<String> = blocks
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            parts.push(format!("partition={}", text.join("|")));
        }
        f.write_str(&parts.join(" "))
    }
}

/// One bound in a report. `reference_log` is the quantity being bounded:
/// `ln|K|` for determinant bounds, `Σ ln λ_i` for eigenvalue-product bounds.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundEntry {
    pub name: String,
    pub params: BoundParams,
    pub log_bound: f64,
    pub bound: f64,
    pub reference_log: f64,
    pub slack_log: f64,
    pub equality: bool,
}

impl BoundEntry {
    fn new(name: &str, params: BoundParams, log_bound: f64, reference_log: f64, tol: f64) -> Self {
        let slack_log = log_bound - reference_log;
        BoundEntry {
            name: name.to_string(),
            params,
            log_bound,
            bound: libm::exp(log_bound),
            reference_log,
            slack_log,
            equality: slack_log.abs() <= allowance(log_bound, tol),
        }
    }

    pub fn is_eigen(&self) -> bool {
        self.name == EIGEN_PRODUCT
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderingCheck {
    /// Human-readable statement, e.g. `ln|K| <= strong_szasz(k=2 p=3)`.
    pub description: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Strict comparisons require `rhs − lhs > STRICT_TOL · max(1, |rhs|)`.
    pub strict: bool,
    pub holds: bool,
}

impl OrderingCheck {
    fn le(description: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        OrderingCheck {
            description,
            lhs,
            rhs,
            strict: false,
            holds: rhs - lhs >= -allowance(rhs, tol),
        }
    }

    fn lt(description: String, lhs: f64, rhs: f64) -> Self {
        OrderingCheck {
            description,
            lhs,
            rhs,
            strict: true,
            holds: rhs - lhs > allowance(rhs, STRICT_TOL),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    #[cfg_attr(feature = "serde", serde(rename = "matrix"))]
    pub matrix_label: String,
    pub n: usize,
    pub log_det: f64,
    /// Determinant bounds from tightest to loosest, then eigenvalue-product
    /// bounds from tightest to loosest.
    #[cfg_attr(feature = "serde", serde(rename = "bounds"))]
    pub entries: Vec<BoundEntry>,
    pub ordering_checks: Vec<OrderingCheck>,
    pub diagnostics: Vec<EqualityDiagnostic>,
    /// Set when the matrix was reordered to condition on a non-prefix set.
    pub permutation: Option<Vec<usize>>,
}

impl BoundReport {
    pub fn all_checks_pass(&self) -> bool {
        self.ordering_checks.iter().all(|c| c.holds)
    }

    pub fn find(&self, name: &str, params: &BoundParams) -> Option<&BoundEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name && &e.params == params)
    }
}

pub const HADAMARD: &str = "hadamard";
pub const SZASZ: &str = "szasz";
pub const KY_FAN: &str = "ky_fan";
pub const STRONG_SZASZ: &str = "strong_szasz";
pub const FISCHER: &str = "fischer";
pub const STRONG_FISCHER: &str = "strong_fischer";
pub const EIGEN_PRODUCT: &str = "eigen_product";

fn kp(k: usize, p: usize) -> BoundParams {
    BoundParams {
        k: Some(k),
        p: Some(p),
        ..Default::default()
    }
}

/// Computes every requested bound with ordering checks and (optionally)
/// equality diagnostics.
pub fn bound_report(k: &SymPdMatrix, config: &ReportConfig) -> Result<BoundReport> {
    let (matrix, permutation, ps, partitions) = match config.leading {
        Some(lead) => {
            let (m, order) = with_leading(k, lead)?;
            let mut position = alloc::vec![0usize; k.dim() + 1];
            for (new, &old) in order.iter().enumerate() {
                position[old] = new + 1;
            }
            let partitions = config
                .partitions
                .iter()
                .map(|part| {
                    let blocks: Vec<Vec<usize>> = part
                        .blocks()
                        .iter()
                        .map(|b| b.iter().map(|i| position[i]).collect())
                        .collect();
                    Partition::from_blocks(&blocks, k.dim())
                })
                .collect::<Result<Vec<_>>>()?;
            (m, Some(order), alloc::vec![lead.len()], partitions)
        }
        None => (
            k.clone(),
            None,
            config.ps.clone(),
            config.partitions.clone(),
        ),
    };
    let k = &matrix;
    let tol = config.tol;
    let n = k.dim();
    let minors = MinorCache::new(k);
    let log_det = minors.log_det(k.full_set())?;
    let non_diagonal = !linalg::is_diagonal(k, None);
    let mut entries = Vec::new();
    let mut checks = Vec::new();
    let mut diagnostics = Vec::new();

    let ks: Vec<usize> = config.ks.clone();
    for &p in &ps {
        check_range("p", p, 1, n)?;
    }
    for &size in &ks {
        check_range("k", size, 1, n)?;
    }

    let hadamard = minors.hadamard()?;
    if config.classical {
        entries.push(BoundEntry::new(
            HADAMARD,
            BoundParams::default(),
            hadamard,
            log_det,
            tol,
        ));
    }
    let mut szasz = BTreeMap::new();
    for &size in &ks {
        let v = minors.szasz(size)?;
        szasz.insert(size, v);
        entries.push(BoundEntry::new(
            SZASZ,
            BoundParams {
                k: Some(size),
                ..Default::default()
            },
            v,
            log_det,
            tol,
        ));
    }
    if config.classical {
        for &p in &ps {
            let v = minors.ky_fan(p)?;
            entries.push(BoundEntry::new(
                KY_FAN,
                BoundParams {
                    p: Some(p),
                    ..Default::default()
                },
                v,
                log_det,
                tol,
            ));
            checks.push(OrderingCheck::le(
                format!("ky_fan(p={p}) <= hadamard"),
                v,
                hadamard,
                tol,
            ));
            let prefix = IndexSet::prefix(p, n)?;
            let pc = prefix.complement();
            let coupled = !pc.is_empty()
                && (!linalg::block_is_zero(k, prefix, pc, None)
                    || !linalg::is_diagonal(
                        principal_submatrix(k, pc)?.as_matrix(),
                        Some(linalg::default_zero_tol(k)),
                    ));
            if coupled {
                checks.push(OrderingCheck::lt(
                    format!("ky_fan(p={p}) < hadamard"),
                    v,
                    hadamard,
                ));
            }
        }
    }

    for &p in &ps {
        let mut at_k1 = None;
        for &size in ks.iter().filter(|&&s| s <= p) {
            let chain = minors.strong_szasz(size, p)?;
            let params = kp(size, p);
            entries.push(BoundEntry::new(
                STRONG_SZASZ,
                params.clone(),
                chain.inner,
                log_det,
                tol,
            ));
            let tag = format!("strong_szasz({params})");
            checks.push(OrderingCheck::le(
                format!("ln|K| <= {tag}"),
                log_det,
                chain.inner,
                tol,
            ));
            checks.push(OrderingCheck::le(
                format!("{tag} <= szasz(k={size})"),
                chain.inner,
                chain.outer,
                tol,
            ));
            if non_diagonal && size >= 2 && p < n {
                checks.push(OrderingCheck::lt(
                    format!("{tag} < szasz(k={size})"),
                    chain.inner,
                    chain.outer,
                ));
            }
            if size == 1 {
                at_k1 = Some(chain.inner);
            } else {
                let base = match at_k1 {
                    Some(v) => v,
                    None => minors.conditioned_szasz(1, p)?,
                };
                checks.push(OrderingCheck::le(
                    format!("{tag} <= strong_szasz(k=1 p={p})"),
                    chain.inner,
                    base,
                    tol,
                ));
            }
            if config.diagnostics {
                diagnostics.extend(equality_diagnostics(
                    k,
                    &ChainKind::StrongSzasz { k: size, p },
                )?);
            }
        }
    }

    for partition in &partitions {
        let blocks = partition.to_vecs();
        let fischer = minors.fischer(partition)?;
        entries.push(BoundEntry::new(
            FISCHER,
            BoundParams {
                partition: Some(blocks.clone()),
                ..Default::default()
            },
            fischer,
            log_det,
            tol,
        ));
        for &p in &ps {
            let chain = minors.strong_fischer(p, partition)?;
            let params = BoundParams {
                p: Some(p),
                partition: Some(blocks.clone()),
                ..Default::default()
            };
            let tag = format!("strong_fischer({params})");
            entries.push(BoundEntry::new(
                STRONG_FISCHER,
                params,
                chain.inner,
                log_det,
                tol,
            ));
            checks.push(OrderingCheck::le(
                format!("ln|K| <= {tag}"),
                log_det,
                chain.inner,
                tol,
            ));
            checks.push(OrderingCheck::le(
                format!("{tag} <= fischer"),
                chain.inner,
                chain.outer,
                tol,
            ));
            if config.diagnostics {
                diagnostics.extend(equality_diagnostics(
                    k,
                    &ChainKind::StrongFischer {
                        p,
                        partition: partition.clone(),
                    },
                )?);
            }
        }
    }

    if !config.eigen.is_empty() {
        let spectrum = eigenvalues_sorted(k)?;
        let mut at_k1 = BTreeMap::new();
        let mut tuples = config.eigen.clone();
        // k = 1 first so every k ≥ 2 entry can be compared against it
        tuples.sort_by_key(|t| (t.k != 1, *t));
        for params in tuples {
            let b = eigen_bound_with(&minors, &spectrum, params)?;
            let EigenParams { h, p, l, k: size } = params;
            let bp = BoundParams {
                k: Some(size),
                p: Some(p),
                h: Some(h),
                l: Some(l),
                partition: None,
            };
            let tag = format!("eigen_product({bp})");
            entries.push(BoundEntry::new(
                EIGEN_PRODUCT,
                bp,
                b.log_bound,
                b.log_eigen_product,
                tol,
            ));
            checks.push(OrderingCheck::le(
                format!("sum ln lambda_1..{} <= {tag}", h + l),
                b.log_eigen_product,
                b.log_bound,
                tol,
            ));
            if size == 1 {
                at_k1.insert((h, p, l), b.log_bound);
            } else if let Some(&base) = at_k1.get(&(h, p, l)) {
                checks.push(OrderingCheck::le(
                    format!("{tag} <= k=1 value"),
                    b.log_bound,
                    base,
                    tol,
                ));
            }
        }
    }

    entries.sort_by(|a, b| {
        a.is_eigen()
            .cmp(&b.is_eigen())
            .then(a.log_bound.total_cmp(&b.log_bound))
    });

    Ok(BoundReport {
        matrix_label: config.label.clone(),
        n,
        log_det,
        entries,
        ordering_checks: checks,
        diagnostics,
        permutation,
    })
}
