//! Seeded random instances and exhaustive checkers that treat the chain
//! inequalities as falsifiable properties.
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`rand_xoshiro`), so every suite reproduces bit for bit on any platform.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::detineq::{
    self, diagnostics_consistent, equality_diagnostics, ChainKind, EigenParams, MinorCache,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SymPdMatrix};
use crate::sets::{subsets_of_size, IndexSet, Partition};
use crate::submodular::{
    check_submodular, conditional_partition_equality, discrete_entropy_fn, facility_location_fn,
    gaussian_entropy_fn, graph_cut_fn, han_bound, matroid_rank_fn, modular_fn, partition_bound,
    set_cover_fn, strengthened_han_bound, strengthened_partition_bound, strong_han_equality,
    subset_average_sequence, JointPmf, Limits, MatroidSpec, SetFunction,
};

pub type SuiteRng = Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> SuiteRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// SplitMix64 finalizer, used to derive per-trial seeds.
pub fn mix_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Set-function families produced by [`random_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    Coverage,
    GraphCut,
    Facility,
    DiscreteEntropy,
    Gaussian,
    Matroid,
    Modular,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Coverage,
        Family::GraphCut,
        Family::Facility,
        Family::DiscreteEntropy,
        Family::Gaussian,
        Family::Matroid,
        Family::Modular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Coverage => "coverage",
            Family::GraphCut => "graph_cut",
            Family::Facility => "facility",
            Family::DiscreteEntropy => "discrete_entropy",
            Family::Gaussian => "gaussian",
            Family::Matroid => "matroid",
            Family::Modular => "modular",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Inputs to [`random_instance`]. Identical specs give identical instances.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratorSpec {
    pub seed: u64,
    pub family: Family,
    pub n: usize,
    /// Coverage only: universe size (default `n + 2`).
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub universe: Option<usize>,
    /// Discrete entropy only: largest alphabet size (default 3 up to `n = 5`, else 2).
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub alphabet: Option<usize>,
}

impl GeneratorSpec {
    pub fn new(seed: u64, family: Family, n: usize) -> Self {
        GeneratorSpec {
            seed,
            family,
            n,
            universe: None,
            alphabet: None,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family={} n={} seed={}",
            self.family.name(),
            self.n,
            self.seed
        )?;
        if let Some(u) = self.universe {
            write!(f, " universe={u}")?;
        }
        if let Some(a) = self.alphabet {
            write!(f, " alphabet={a}")?;
        }
        Ok(())
    }
}

/// Largest joint table built for the discrete-entropy family.
pub const MAX_PMF_CELLS: u128 = 1 << 20;

/// Builds a seeded submodular instance of the requested family.
pub fn random_instance(spec: &GeneratorSpec) -> Result<SetFunction> {
    let n = spec.n;
    if n > crate::sets::MAX_GROUND {
        return Err(Error::GroundTooLarge {
            n,
            cap: crate::sets::MAX_GROUND,
            evaluations: 1u128 << n.min(127),
        });
    }
    let mut rng = rng_from_seed(spec.seed);
    let f = match spec.family {
        Family::Coverage => {
            let m = spec.universe.unwrap_or(n + 2);
            let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
            let sets: Vec<Vec<usize>> = (0..n)
                .map(|_| (1..=m).filter(|_| rng.random_bool(0.4)).collect())
                .collect();
            set_cover_fn(&weights, &sets)?
        }
        Family::GraphCut => {
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in (u + 1)..=n {
                    if rng.random_bool(0.5) {
                        edges.push((u, v, rng.random_range(0.1..1.0)));
                    }
                }
            }
            graph_cut_fn(n, &edges)?
        }
        Family::Facility => {
            let data = (0..n * n).map(|_| rng.random_range(0.0..1.0)).collect();
            facility_location_fn(&Matrix::from_row_major(n, n, data)?)?
        }
        Family::DiscreteEntropy => {
            let max_a = spec.alphabet.unwrap_or(if n <= 5 { 3 } else { 2 }).max(1);
            let alphabet: Vec<usize> = (0..n)
                .map(|_| rng.random_range(1..=max_a).max(2.min(max_a)))
                .collect();
            let cells = alphabet
                .iter()
                .try_fold(1u128, |acc, &a| acc.checked_mul(a as u128));
            match cells {
                Some(c) if c <= MAX_PMF_CELLS => {
                    let raw: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..1.0)).collect();
                    let total: f64 = raw.iter().sum();
                    let probs = raw.iter().map(|v| v / total).collect();
                    discrete_entropy_fn(&JointPmf::new(alphabet, probs)?)
                }
                _ => {
                    return Err(Error::GroundTooLarge {
                        n,
                        cap: 20,
                        evaluations: cells.unwrap_or(u128::MAX),
                    })
                }
            }
        }
        Family::Gaussian => gaussian_entropy_fn(&dense_spd(&mut rng, n)),
        Family::Matroid => {
            if n == 0 || rng.random_bool(0.5) {
                let rank = if n == 0 { 0 } else { rng.random_range(1..=n) };
                matroid_rank_fn(&MatroidSpec::Uniform { ground_n: n, rank })?
            } else {
                let blocks = sample_partition(&mut rng, n);
                let capacities = blocks
                    .blocks()
                    .iter()
                    .map(|b| rng.random_range(1..=b.len()))
                    .collect();
                matroid_rank_fn(&MatroidSpec::Partition { blocks, capacities })?
            }
        }
        Family::Modular => {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            modular_fn(&w)
        }
    };
    Ok(f.with_label(spec.to_string()))
}

/// Matrix families produced by [`generate_matrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MatrixFamily {
    /// `B·Bᵀ + 0.1·I`, `B` uniform on `(−1,1)`.
    Dense,
    Diagonal,
    /// Dense blocks along a random partition.
    BlockDiagonal,
    /// Schur complement of `K(P^c)` is diagonal for a random prefix `P`.
    DiagonalSchur,
    /// Schur complement of `K(P^c)` is block diagonal along a random
    /// partition of the prefix `P`.
    BlockSchur,
}

impl MatrixFamily {
    pub const ALL: [MatrixFamily; 5] = [
        MatrixFamily::Dense,
        MatrixFamily::Diagonal,
        MatrixFamily::BlockDiagonal,
        MatrixFamily::DiagonalSchur,
        MatrixFamily::BlockSchur,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixFamily::Dense => "dense",
            MatrixFamily::Diagonal => "diagonal",
            MatrixFamily::BlockDiagonal => "block_diagonal",
            MatrixFamily::DiagonalSchur => "diagonal_schur",
            MatrixFamily::BlockSchur => "block_schur",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatrixSpec {
    pub seed: u64,
    pub family: MatrixFamily,
    pub n: usize,
}

impl MatrixSpec {
    pub fn dense(seed: u64, n: usize) -> Self {
        MatrixSpec {
            seed,
            family: MatrixFamily::Dense,
            n,
        }
    }
}

impl fmt::Display for MatrixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "matrix={} n={} seed={}",
            self.family.name(),
            self.n,
            self.seed
        )
    }
}

/// Known structure of a generated matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    None,
    Diagonal,
    /// Zero outside the blocks of the partition.
    Blocks(Partition),
    /// The Schur complement of `K([p+1:n])` is block diagonal along the
    /// restriction of `partition` to `[1:p]`.
    SchurBlocks {
        p: usize,
        partition: Partition,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredMatrix {
    pub matrix: SymPdMatrix,
    pub structure: Structure,
}

/// The matrix of [`generate_matrix`], without its structure.
pub fn random_spd(spec: &MatrixSpec) -> Result<SymPdMatrix> {
    Ok(generate_matrix(spec)?.matrix)
}

pub fn generate_matrix(spec: &MatrixSpec) -> Result<StructuredMatrix> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidParams(
            "matrix dimension must be at least 1".into(),
        ));
    }
    if n > crate::sets::MAX_GROUND {
        return Err(Error::InvalidParams(format!(
            "matrix dimension {n} exceeds {}",
            crate::sets::MAX_GROUND
        )));
    }
    let mut rng = rng_from_seed(spec.seed);
    let out = match spec.family {
        MatrixFamily::Dense => StructuredMatrix {
            matrix: dense_spd(&mut rng, n),
            structure: Structure::None,
        },
        MatrixFamily::Diagonal => StructuredMatrix {
            matrix: diagonal_spd(&mut rng, n),
            structure: Structure::Diagonal,
        },
        MatrixFamily::BlockDiagonal => {
            let partition = sample_partition(&mut rng, n);
            let mut m = Matrix::zeros(n, n);
            for block in partition.blocks() {
                let b = dense_spd(&mut rng, block.len());
                place(&mut m, b.as_matrix(), *block, *block);
            }
            StructuredMatrix {
                matrix: SymPdMatrix::new(m)?,
                structure: Structure::Blocks(partition),
            }
        }
        MatrixFamily::DiagonalSchur | MatrixFamily::BlockSchur if n == 1 => StructuredMatrix {
            matrix: diagonal_spd(&mut rng, 1),
            structure: Structure::Diagonal,
        },
        MatrixFamily::DiagonalSchur | MatrixFamily::BlockSchur => {
            let p = rng.random_range(1..n);
            let head = if spec.family == MatrixFamily::DiagonalSchur {
                Partition::singletons(p)
            } else {
                sample_partition(&mut rng, p)
            };
            let matrix = schur_structured(&mut rng, n, &head)?;
            // extend the prefix blocks over the complement at random
            let mut blocks: Vec<Vec<usize>> = head.to_vecs();
            for i in (p + 1)..=n {
                let slot = rng.random_range(0..=blocks.len());
                if slot == blocks.len() {
                    blocks.push(vec![i]);
                } else {
                    blocks[slot].push(i);
                }
            }
            StructuredMatrix {
                matrix,
                structure: Structure::SchurBlocks {
                    p,
                    partition: Partition::from_blocks(&blocks, n)?,
                },
            }
        }
    };
    Ok(out)
}

fn dense_spd(rng: &mut SuiteRng, n: usize) -> SymPdMatrix {
    let b: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for r in 0..n {
                s += b[i * n + r] * b[j * n + r];
            }
            m[(i, j)] = s;
        }
        m[(i, i)] += 0.1;
    }
    SymPdMatrix::new(m).expect("B·Bᵀ + 0.1·I is positive definite")
}

fn diagonal_spd(rng: &mut SuiteRng, n: usize) -> SymPdMatrix {
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
    SymPdMatrix::diagonal(&d).expect("positive diagonal")
}

/// `K(P) = M₀ + B·K(P^c)⁻¹·Bᵀ` with `M₀` block diagonal along `head`, so the
/// Schur complement of `K(P^c)` is `M₀`.
fn schur_structured(rng: &mut SuiteRng, n: usize, head: &Partition) -> Result<SymPdMatrix> {
    let p = head.ground_n();
    let q = n - p;
    let kc = dense_spd(rng, q);
    let b = Matrix::from_row_major(
        p,
        q,
        (0..p * q).map(|_| rng.random_range(-1.0..1.0)).collect(),
    )?;
    let mut m0 = Matrix::zeros(p, p);
    for block in head.blocks() {
        let blk = dense_spd(rng, block.len());
        place(&mut m0, blk.as_matrix(), *block, *block);
    }
    let x = linalg::solve_spd(kc.as_matrix(), &b.transpose())?;
    let bx = b.matmul(&x)?;
    let mut k = Matrix::zeros(n, n);
    for i in 0..p {
        for j in 0..p {
            k[(i, j)] = m0[(i, j)] + 0.5 * (bx[(i, j)] + bx[(j, i)]);
        }
        for j in 0..q {
            k[(i, p + j)] = b[(i, j)];
            k[(p + j, i)] = b[(i, j)];
        }
    }
    for i in 0..q {
        for j in 0..q {
            k[(p + i, p + j)] = kc[(i, j)];
        }
    }
    SymPdMatrix::new(k)
}

fn place(target: &mut Matrix, block: &Matrix, rows: IndexSet, cols: IndexSet) {
    for (a, i) in rows.iter().enumerate() {
        for (b, j) in cols.iter().enumerate() {
            target[(i - 1, j - 1)] = block[(a, b)];
        }
    }
}

/// A uniformly random partition of `[1:n]`, drawn as a restricted-growth
/// string weighted by the number of completions of each prefix.
pub fn sample_partition(rng: &mut SuiteRng, n: usize) -> Partition {
    if n == 0 {
        return Partition::whole(0);
    }
    // completions[i][m]: ways to finish positions i.. when m labels are in use
    let mut completions = vec![vec![0.0f64; n + 2]; n + 1];
    completions[n].fill(1.0);
    for i in (0..n).rev() {
        for m in 0..=n {
            completions[i][m] = m as f64 * completions[i + 1][m] + completions[i + 1][m + 1];
        }
    }
    let mut rgs = vec![0usize; n];
    let mut used = 1;
    for i in 1..n {
        let total = completions[i][used];
        let draw = rng.random_range(0.0..total);
        let reuse = used as f64 * completions[i + 1][used];
        if draw < reuse {
            rgs[i] = ((draw / completions[i + 1][used]) as usize).min(used - 1);
        } else {
            rgs[i] = used;
            used += 1;
        }
    }
    Partition::from_restricted_growth(&rgs).expect("valid restricted-growth string")
}

/// All partitions of `[1:n]` up to `n = 5`, otherwise `samples` random ones
/// plus the singleton and whole partitions.
pub fn partitions_for(rng: &mut SuiteRng, n: usize, samples: usize) -> Vec<Partition> {
    if n <= 5 {
        return Partition::enumerate_all(n);
    }
    let mut out = vec![Partition::singletons(n), Partition::whole(n)];
    out.extend((0..samples).map(|_| sample_partition(rng, n)));
    out
}

/// One failed check, with enough context to reproduce it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Failure {
    pub spec: String,
    pub check: String,
    pub params: String,
    pub slack: f64,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteResult {
    pub suite: String,
    pub trials: usize,
    pub checks: u64,
    /// Sorted by spec, then check, then parameters.
    pub failures: Vec<Failure>,
    /// Most negative relative slack seen in any inequality check (0 if none).
    pub max_negative_slack: f64,
}

impl SuiteResult {
    fn empty(suite: &str) -> Self {
        SuiteResult {
            suite: suite.to_string(),
            trials: 0,
            checks: 0,
            failures: Vec::new(),
            max_negative_slack: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn absorb(&mut self, t: Tally) {
        self.trials += 1;
        self.checks += t.checks;
        self.failures.extend(t.failures);
        self.max_negative_slack = self.max_negative_slack.min(t.worst);
    }

    fn finish(mut self) -> Self {
        self.failures
            .sort_by(|a, b| (&a.spec, &a.check, &a.params).cmp(&(&b.spec, &b.check, &b.params)));
        self
    }
}

/// Accumulates checks for one instance.
pub struct Tally {
    spec: String,
    checks: u64,
    failures: Vec<Failure>,
    worst: f64,
    tol: f64,
}

impl Tally {
    fn new(spec: String, tol: f64) -> Self {
        Tally {
            spec,
            checks: 0,
            failures: Vec::new(),
            worst: 0.0,
            tol,
        }
    }

    /// `lhs ≤ rhs` up to `tol · max(1, |rhs|)`.
    fn le(&mut self, check: &str, params: &dyn fmt::Display, lhs: f64, rhs: f64) {
        let rel = (rhs - lhs) / rhs.abs().max(1.0);
        self.worst = self.worst.min(rel);
        self.expect(check, params, rel >= -self.tol, rel, None);
    }

    /// `|a − b| ≤ tol · max(1, |b|)`.
    fn close(&mut self, check: &str, params: &dyn fmt::Display, a: f64, b: f64, tol: f64) {
        let rel = (a - b).abs() / b.abs().max(1.0);
        self.expect(check, params, rel <= tol, rel, None);
    }

    fn expect(
        &mut self,
        check: &str,
        params: &dyn fmt::Display,
        ok: bool,
        slack: f64,
        witness: Option<String>,
    ) {
        self.checks += 1;
        if !ok {
            self.failures.push(Failure {
                spec: self.spec.clone(),
                check: check.to_string(),
                params: params.to_string(),
                slack,
                witness,
            });
        }
    }

    fn into_result(self, suite: &str) -> SuiteResult {
        let mut r = SuiteResult::empty(suite);
        r.absorb(self);
        r.finish()
    }
}

struct Kp(usize, usize);

impl fmt::Display for Kp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} p={}", self.0, self.1)
    }
}

struct Pp<'a>(usize, &'a Partition);

impl fmt::Display for Pp<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} partition={}", self.0, self.1)
    }
}

struct Plain<'a>(&'a str);

impl fmt::Display for Plain<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// Knobs shared by the suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
    /// Random partitions per instance above `n = 5`.
    pub partition_samples: usize,
    pub limits: Limits,
}

impl SuiteConfig {
    pub fn new(trials: usize, max_n: usize, seed: u64) -> Self {
        SuiteConfig {
            trials,
            max_n,
            seed,
            partition_samples: 6,
            limits: Limits::default(),
        }
    }

    fn size_for(&self, trial_seed: u64, min_n: usize) -> usize {
        let lo = min_n.min(self.max_n).max(1);
        lo + (trial_seed % (self.max_n - lo + 1) as u64) as usize
    }
}

/// Every chain, subset-average and equality-characterization check for one
/// set function.
pub fn check_set_function(
    f: &SetFunction,
    partitions: &[Partition],
    limits: &Limits,
) -> Result<SuiteResult> {
    let mut t = Tally::new(f.label().to_string(), limits.tol);
    set_function_checks(&mut t, f, partitions, limits)?;
    Ok(t.into_result("set_function"))
}

fn set_function_checks(
    t: &mut Tally,
    f: &SetFunction,
    partitions: &[Partition],
    limits: &Limits,
) -> Result<()> {
    let n = f.ground_n();
    let sub = check_submodular(f, limits)?;
    t.expect(
        "submodular",
        &Plain(""),
        sub.holds,
        sub.witness.map_or(0.0, |w| -w.violation),
        sub.witness
            .map(|w| format!("S={} i={} j={}", w.set, w.i, w.j)),
    );
    let total = f.evaluate(f.full_set())?;
    for p in 1..=n {
        for k in 1..=p {
            let c = strengthened_han_bound(f, k, p)?;
            t.le("han.inner", &Kp(k, p), total, c.inner.bound);
            t.le("han.outer", &Kp(k, p), c.inner.bound, c.outer.bound);
            let r = strong_han_equality(f, k, p, limits)?;
            t.expect(
                "han.equality_characterization",
                &Kp(k, p),
                r.consistent(),
                0.0,
                Some(format!(
                    "predicted inner={} outer={}, observed inner={} outer={}",
                    r.inner_predicted(),
                    r.outer_predicted(),
                    r.chain.inner.equality,
                    r.chain.outer.equality
                )),
            );
        }
        let seq = subset_average_sequence(f, p, limits)?;
        for (i, w) in seq.windows(2).enumerate() {
            let label = format!("p={p} k={}", i + 2);
            t.le("subset_average.non_increasing", &label, w[1], w[0]);
        }
    }
    for partition in partitions {
        for p in 1..=n {
            let c = strengthened_partition_bound(f, p, partition)?;
            t.le("partition.inner", &Pp(p, partition), total, c.inner.bound);
            t.le(
                "partition.outer",
                &Pp(p, partition),
                c.inner.bound,
                c.outer.bound,
            );
            let r = conditional_partition_equality(f, p, partition, limits)?;
            t.expect(
                "partition.equality_characterization",
                &Pp(p, partition),
                r.consistent(),
                0.0,
                Some(format!(
                    "predicted inner={} outer={}, observed inner={} outer={}",
                    r.inner_predicted(),
                    r.outer_predicted(),
                    r.chain.inner.equality,
                    r.chain.outer.equality
                )),
            );
        }
    }
    Ok(())
}

/// Random instances cycling through every family.
pub fn run_submodular_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let mut result = SuiteResult::empty("submodular");
    for trial in 0..cfg.trials {
        let s = mix_seed(cfg.seed, trial as u64);
        let family = Family::ALL[trial % Family::ALL.len()];
        let spec = GeneratorSpec::new(s, family, cfg.size_for(s >> 32, 1));
        let f = random_instance(&spec)?;
        let partitions = partitions_for(
            &mut rng_from_seed(s ^ 0xA5A5),
            spec.n,
            cfg.partition_samples,
        );
        let mut t = Tally::new(spec.to_string(), cfg.limits.tol);
        set_function_checks(&mut t, &f, &partitions, &cfg.limits)?;
        result.absorb(t);
    }
    Ok(result.finish())
}

/// `|S|·ln(2πe)`: the gap between `2·h(X_S)` and `ln|K(S)|`.
fn gaussian_offset(size: usize) -> f64 {
    size as f64 * libm::log(2.0 * PI * E)
}

/// Chains, Schur-route agreement, eigenvalue bounds, interlacing, equality
/// characterizations and the Gaussian entropy correspondence for one matrix.
pub fn check_matrix(
    k: &SymPdMatrix,
    label: &str,
    partitions: &[Partition],
    tol: f64,
) -> Result<SuiteResult> {
    let mut t = Tally::new(label.to_string(), tol);
    matrix_checks(&mut t, k, partitions)?;
    Ok(t.into_result("matrix"))
}

fn matrix_checks(t: &mut Tally, k: &SymPdMatrix, partitions: &[Partition]) -> Result<()> {
    let n = k.dim();
    let minors = MinorCache::new(k);
    let log_det = minors.log_det(k.full_set())?;
    let diagonal = linalg::is_diagonal(k, None);
    let gauss = gaussian_entropy_fn(k);
    let offset = gaussian_offset(n);
    let to_det = |h: f64| 2.0 * h - offset;
    let exact = 1e-9;

    t.close(
        "gaussian.hadamard",
        &Plain(""),
        minors.hadamard()?,
        to_det(han_bound(&gauss, 1)?.bound),
        exact,
    );
    for size in 1..=n {
        let szasz = minors.szasz(size)?;
        t.close(
            "gaussian.szasz",
            &format!("k={size}"),
            szasz,
            to_det(han_bound(&gauss, size)?.bound),
            exact,
        );
    }
    for p in 1..=n {
        let ky_fan = minors.ky_fan(p)?;
        let base = minors.conditioned_szasz(1, p)?;
        t.expect(
            "strong_szasz.k1_is_ky_fan",
            &format!("p={p}"),
            base == ky_fan,
            base - ky_fan,
            None,
        );
        for size in 1..=p {
            let params = Kp(size, p);
            let c = minors.strong_szasz(size, p)?;
            t.le("strong_szasz.inner", &params, log_det, c.inner);
            t.le("strong_szasz.outer", &params, c.inner, c.outer);
            if size >= 2 {
                t.le("strong_szasz.monotone_in_k", &params, c.inner, base);
            }
            if p < n {
                let schur = detineq::schur_route_bound(k, size, p)?;
                t.close("strong_szasz.schur_route", &params, schur, c.inner, exact);
            }
            if !diagonal && size >= 2 && p < n {
                t.expect(
                    "strong_szasz.strict",
                    &params,
                    c.strictly_tighter(),
                    c.outer_slack(),
                    None,
                );
            }
            let sh = strengthened_han_bound(&gauss, size, p)?;
            t.close(
                "gaussian.strong_szasz",
                &params,
                c.inner,
                to_det(sh.inner.bound),
                exact,
            );
            let diags = equality_diagnostics(k, &ChainKind::StrongSzasz { k: size, p })?;
            t.expect(
                "strong_szasz.equality_characterization",
                &params,
                diagnostics_consistent(&diags),
                0.0,
                describe(&diags),
            );
        }
    }
    for partition in partitions {
        let fischer = minors.fischer(partition)?;
        t.close(
            "gaussian.fischer",
            &format!("partition={partition}"),
            fischer,
            to_det(partition_bound(&gauss, partition)?.bound),
            exact,
        );
        for p in 1..=n {
            let params = Pp(p, partition);
            let c = minors.strong_fischer(p, partition)?;
            t.le("strong_fischer.inner", &params, log_det, c.inner);
            t.le("strong_fischer.outer", &params, c.inner, c.outer);
            let sp = strengthened_partition_bound(&gauss, p, partition)?;
            t.close(
                "gaussian.strong_fischer",
                &params,
                c.inner,
                to_det(sp.inner.bound),
                exact,
            );
            let diags = equality_diagnostics(
                k,
                &ChainKind::StrongFischer {
                    p,
                    partition: partition.clone(),
                },
            )?;
            t.expect(
                "strong_fischer.equality_characterization",
                &params,
                diagnostics_consistent(&diags),
                0.0,
                describe(&diags),
            );
        }
    }
    let spectrum = linalg::eigenvalues_sorted(k)?;
    for params in EigenParams::grid(n) {
        let bound = minors.eigen_product(params)?;
        let actual = spectrum.log_product_smallest(params.h + params.l);
        let label = format!(
            "h={} p={} l={} k={}",
            params.h, params.p, params.l, params.k
        );
        t.le("eigen_product", &label, actual, bound);
    }
    for size in n.saturating_sub(2).max(1)..n {
        for s in subsets_of_size(k.full_set(), size) {
            let ok = detineq::interlacing_check(k, s)?;
            t.expect("interlacing", &format!("S={s}"), ok, 0.0, None);
        }
    }
    Ok(())
}

fn describe(diags: &[detineq::EqualityDiagnostic]) -> Option<String> {
    let parts: Vec<String> = diags
        .iter()
        .map(|d| {
            format!(
                "{} [{}]: holds={} observed_equality={} violation={:e}",
                d.condition, d.link, d.holds, d.observed_equality, d.max_violation
            )
        })
        .collect();
    Some(parts.join("; "))
}

/// Random matrices cycling through every matrix family.
pub fn run_determinant_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let mut result = SuiteResult::empty("determinant");
    for trial in 0..cfg.trials {
        let s = mix_seed(cfg.seed, trial as u64);
        let family = MatrixFamily::ALL[trial % MatrixFamily::ALL.len()];
        let spec = MatrixSpec {
            seed: s,
            family,
            n: cfg.size_for(s >> 32, 1),
        };
        let generated = generate_matrix(&spec)?;
        let mut partitions = partitions_for(
            &mut rng_from_seed(s ^ 0xA5A5),
            spec.n,
            cfg.partition_samples,
        );
        match generated.structure {
            Structure::Blocks(p) | Structure::SchurBlocks { partition: p, .. } if spec.n > 5 => {
                partitions.push(p)
            }
            _ => {}
        }
        let mut t = Tally::new(spec.to_string(), cfg.limits.tol);
        matrix_checks(&mut t, &generated.matrix, &partitions)?;
        result.absorb(t);
    }
    Ok(result.finish())
}

/// Kinds of constructed instances whose equalities are predicted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqualityKind {
    DiagonalMatrix,
    BlockDiagonalMatrix,
    DiagonalSchurMatrix,
    ModularFunction,
    ConditionallyFactorizingGaussian,
}

impl EqualityKind {
    pub const ALL: [EqualityKind; 5] = [
        EqualityKind::DiagonalMatrix,
        EqualityKind::BlockDiagonalMatrix,
        EqualityKind::DiagonalSchurMatrix,
        EqualityKind::ModularFunction,
        EqualityKind::ConditionallyFactorizingGaussian,
    ];
}

/// Constructed instances; each must attain its predicted equalities and
/// satisfy the matching equality conditions.
pub fn run_equality_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let mut result = SuiteResult::empty("equality");
    let tol = cfg.limits.tol;
    for trial in 0..cfg.trials {
        let s = mix_seed(cfg.seed, trial as u64);
        let n = cfg.size_for(s >> 32, 2);
        let kind = EqualityKind::ALL[trial % EqualityKind::ALL.len()];
        let t = match kind {
            EqualityKind::DiagonalMatrix => {
                let spec = MatrixSpec {
                    seed: s,
                    family: MatrixFamily::Diagonal,
                    n,
                };
                let k = random_spd(&spec)?;
                let mut t = Tally::new(spec.to_string(), tol);
                let minors = MinorCache::new(&k);
                let log_det = minors.log_det(k.full_set())?;
                t.close(
                    "hadamard.equality",
                    &Plain(""),
                    minors.hadamard()?,
                    log_det,
                    tol,
                );
                for p in 1..=n {
                    for size in 1..=p {
                        let c = minors.strong_szasz(size, p)?;
                        equality_expect(
                            &mut t,
                            "strong_szasz",
                            &Kp(size, p),
                            c.inner_equality() && c.outer_equality(),
                            c.outer - log_det,
                        );
                        let d = equality_diagnostics(&k, &ChainKind::StrongSzasz { k: size, p })?;
                        t.expect(
                            "strong_szasz.conditions",
                            &Kp(size, p),
                            d.iter().all(|x| x.holds),
                            0.0,
                            describe(&d),
                        );
                    }
                }
                for partition in
                    partitions_for(&mut rng_from_seed(s ^ 0xA5A5), n, cfg.partition_samples)
                {
                    for p in 1..=n {
                        let c = minors.strong_fischer(p, &partition)?;
                        equality_expect(
                            &mut t,
                            "strong_fischer",
                            &Pp(p, &partition),
                            c.inner_equality() && c.outer_equality(),
                            c.outer - log_det,
                        );
                    }
                }
                t
            }
            EqualityKind::BlockDiagonalMatrix => {
                let spec = MatrixSpec {
                    seed: s,
                    family: MatrixFamily::BlockDiagonal,
                    n,
                };
                let generated = generate_matrix(&spec)?;
                let Structure::Blocks(partition) = generated.structure else {
                    unreachable!("block-diagonal generator records its blocks")
                };
                let k = generated.matrix;
                let mut t = Tally::new(spec.to_string(), tol);
                let minors = MinorCache::new(&k);
                let log_det = minors.log_det(k.full_set())?;
                t.close(
                    "fischer.equality",
                    &format!("partition={partition}"),
                    minors.fischer(&partition)?,
                    log_det,
                    tol,
                );
                for p in 1..=n {
                    let c = minors.strong_fischer(p, &partition)?;
                    equality_expect(
                        &mut t,
                        "strong_fischer",
                        &Pp(p, &partition),
                        c.inner_equality() && c.outer_equality(),
                        c.outer - log_det,
                    );
                    let d = equality_diagnostics(
                        &k,
                        &ChainKind::StrongFischer {
                            p,
                            partition: partition.clone(),
                        },
                    )?;
                    t.expect(
                        "strong_fischer.conditions",
                        &Pp(p, &partition),
                        d.iter().all(|x| x.holds),
                        0.0,
                        describe(&d),
                    );
                }
                t
            }
            EqualityKind::DiagonalSchurMatrix => {
                let spec = MatrixSpec {
                    seed: s,
                    family: MatrixFamily::DiagonalSchur,
                    n,
                };
                let generated = generate_matrix(&spec)?;
                let Structure::SchurBlocks { p, .. } = generated.structure else {
                    unreachable!("n ≥ 2 yields a Schur-structured matrix")
                };
                let k = generated.matrix;
                let mut t = Tally::new(spec.to_string(), tol);
                let minors = MinorCache::new(&k);
                for size in 1..=p {
                    let c = minors.strong_szasz(size, p)?;
                    equality_expect(
                        &mut t,
                        "strong_szasz.inner",
                        &Kp(size, p),
                        c.inner_equality(),
                        c.inner_slack(),
                    );
                    let d = equality_diagnostics(&k, &ChainKind::StrongSzasz { k: size, p })?;
                    let inner_ok = d
                        .iter()
                        .filter(|x| x.link.ends_with("inner"))
                        .all(|x| x.holds);
                    t.expect(
                        "strong_szasz.inner_conditions",
                        &Kp(size, p),
                        inner_ok,
                        0.0,
                        describe(&d),
                    );
                }
                t
            }
            EqualityKind::ModularFunction => {
                let spec = GeneratorSpec::new(s, Family::Modular, n);
                let f = random_instance(&spec)?;
                let mut t = Tally::new(spec.to_string(), tol);
                let total = f.evaluate(f.full_set())?;
                for p in 1..=n {
                    for size in 1..=p {
                        let c = strengthened_han_bound(&f, size, p)?;
                        equality_expect(
                            &mut t,
                            "han",
                            &Kp(size, p),
                            c.inner.equality && c.outer.equality,
                            c.outer.bound - total,
                        );
                        let r = strong_han_equality(&f, size, p, &cfg.limits)?;
                        t.expect(
                            "han.conditions",
                            &Kp(size, p),
                            r.inner_predicted() && r.outer_predicted(),
                            0.0,
                            None,
                        );
                    }
                }
                for partition in
                    partitions_for(&mut rng_from_seed(s ^ 0xA5A5), n, cfg.partition_samples)
                {
                    for p in 1..=n {
                        let c = strengthened_partition_bound(&f, p, &partition)?;
                        equality_expect(
                            &mut t,
                            "partition",
                            &Pp(p, &partition),
                            c.inner.equality && c.outer.equality,
                            c.outer.bound - total,
                        );
                    }
                }
                t
            }
            EqualityKind::ConditionallyFactorizingGaussian => {
                let spec = MatrixSpec {
                    seed: s,
                    family: MatrixFamily::BlockSchur,
                    n,
                };
                let generated = generate_matrix(&spec)?;
                let Structure::SchurBlocks { p, partition } = generated.structure else {
                    unreachable!("n ≥ 2 yields a Schur-structured matrix")
                };
                let k = generated.matrix;
                let mut t = Tally::new(spec.to_string(), tol);
                let params = Pp(p, &partition);
                let c = MinorCache::new(&k).strong_fischer(p, &partition)?;
                equality_expect(
                    &mut t,
                    "strong_fischer.inner",
                    &params,
                    c.inner_equality(),
                    c.inner_slack(),
                );
                let d = equality_diagnostics(
                    &k,
                    &ChainKind::StrongFischer {
                        p,
                        partition: partition.clone(),
                    },
                )?;
                let inner_ok = d
                    .iter()
                    .filter(|x| x.link.ends_with("inner"))
                    .all(|x| x.holds);
                t.expect(
                    "strong_fischer.inner_conditions",
                    &params,
                    inner_ok,
                    0.0,
                    describe(&d),
                );
                let f = gaussian_entropy_fn(&k);
                let r = conditional_partition_equality(&f, p, &partition, &cfg.limits)?;
                equality_expect(
                    &mut t,
                    "gaussian_partition.inner",
                    &params,
                    r.chain.inner.equality && r.conditionally_additive,
                    r.chain.inner.slack,
                );
                t
            }
        };
        result.absorb(t);
    }
    Ok(result.finish())
}

fn equality_expect(t: &mut Tally, check: &str, params: &dyn fmt::Display, ok: bool, slack: f64) {
    t.expect(&format!("{check}.equality"), params, ok, slack, None);
}

/// Dense random matrices (`n ≥ 3`); every `2 ≤ k ≤ p < n` must be strictly
/// tighter than Szász, and Ky Fan strictly tighter than Hadamard.
pub fn run_strictness_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    if cfg.max_n < 3 {
        return Err(Error::InvalidParams(
            "strictness suite needs max_n ≥ 3".into(),
        ));
    }
    let mut result = SuiteResult::empty("strictness");
    for trial in 0..cfg.trials {
        let s = mix_seed(cfg.seed, trial as u64);
        let spec = MatrixSpec::dense(s, cfg.size_for(s >> 32, 3));
        let k = random_spd(&spec)?;
        let n = spec.n;
        let mut t = Tally::new(spec.to_string(), cfg.limits.tol);
        let minors = MinorCache::new(&k);
        let hadamard = minors.hadamard()?;
        for p in 1..n {
            let ky_fan = minors.ky_fan(p)?;
            let slack = hadamard - ky_fan;
            t.expect(
                "ky_fan.strict",
                &format!("p={p}"),
                slack > detineq::STRICT_TOL * hadamard.abs().max(1.0),
                slack,
                None,
            );
            for size in 2..=p {
                let c = minors.strong_szasz(size, p)?;
                t.expect(
                    "strong_szasz.strict",
                    &Kp(size, p),
                    c.strictly_tighter(),
                    c.outer_slack(),
                    None,
                );
            }
        }
        result.absorb(t);
    }
    Ok(result.finish())
}

/// `f(S) = |S|²`, which is supermodular; used to confirm the checks fire.
pub fn square_cardinality_fn(n: usize) -> SetFunction {
    SetFunction::new(n, "square_cardinality", |s: IndexSet| {
        (s.len() * s.len()) as f64
    })
    .expect("zero at the empty set")
}
