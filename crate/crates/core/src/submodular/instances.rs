//! Built-in submodular instances.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use super::SetFunction;
use crate::error::{Error, Result};
use crate::linalg::{log_det_principal, Matrix, SymPdMatrix};
use crate::sets::{IndexSet, Partition};

/// Differential entropy of a zero-mean Gaussian with covariance `K`:
/// `f(S) = (|S|/2)·ln(2πe) + ½·ln|K(S)|`.
pub fn gaussian_entropy_fn(k: &SymPdMatrix) -> SetFunction {
    let k = k.clone();
    let n = k.dim();
    let half_log_2pie = 0.5 * libm::log(2.0 * PI * E);
    SetFunction::new(n, "gaussian", move |s: IndexSet| {
        let ld = log_det_principal(&k, s).unwrap_or(f64::NAN);
        s.len() as f64 * half_log_2pie + 0.5 * ld
    })
    .expect("gaussian oracle is finite at the empty set")
}

/// `f(S) = Σ_{i∈S} w_i`.
pub fn modular_fn(weights: &[f64]) -> SetFunction {
    let w = weights.to_vec();
    SetFunction::new(w.len(), "modular", move |s: IndexSet| {
        s.iter().fold(0.0, |acc, i| acc + w[i - 1])
    })
    .expect("modular oracle is zero at the empty set")
}

/// Joint probability mass function over `n` finite alphabets, stored
/// row-major (the last variable varies fastest).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointPmf {
    alphabet: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(alphabet: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidInstance(
                "PMF needs at least one variable".into(),
            ));
        }
        if alphabet.contains(&0) {
            return Err(Error::InvalidInstance(
                "alphabet sizes must be positive".into(),
            ));
        }
        let cells = alphabet
            .iter()
            .try_fold(1usize, |acc, &a| acc.checked_mul(a))
            .ok_or_else(|| Error::InvalidInstance("joint alphabet too large".into()))?;
        if probs.len() != cells {
            return Err(Error::InvalidInstance(format!(
                "expected {cells} probabilities, got {}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidInstance(format!(
                "probability {bad} is negative or not finite"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInstance(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointPmf { alphabet, probs })
    }

    pub fn alphabet(&self) -> &[usize] {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Shannon entropy (nats) of the marginal on `S`; `0·ln 0 = 0`.
    pub fn marginal_entropy(&self, s: IndexSet) -> f64 {
        let n = self.alphabet.len();
        let mut strides = vec![1usize; n];
        for v in (0..n.saturating_sub(1)).rev() {
            strides[v] = strides[v + 1] * self.alphabet[v + 1];
        }
        let members: Vec<usize> = s.iter().map(|i| i - 1).collect();
        let mut mstrides = vec![1usize; members.len()];
        for m in (0..members.len().saturating_sub(1)).rev() {
            mstrides[m] = mstrides[m + 1] * self.alphabet[members[m + 1]];
        }
        let size = members.iter().map(|&v| self.alphabet[v]).product::<usize>();
        let mut marginal = vec![0.0; size];
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut idx = 0;
            for (m, &v) in members.iter().enumerate() {
                idx += (flat / strides[v]) % self.alphabet[v] * mstrides[m];
            }
            marginal[idx] += p;
        }
        marginal
            .iter()
            .filter(|&&p| p > 0.0)
            .fold(0.0, |acc, &p| acc - p * libm::log(p))
    }
}

/// Shannon entropy of the marginals of a joint PMF.
pub fn discrete_entropy_fn(pmf: &JointPmf) -> SetFunction {
    let pmf = pmf.clone();
    SetFunction::new(
        pmf.alphabet.len(),
        "discrete_entropy",
        move |s: IndexSet| pmf.marginal_entropy(s),
    )
    .expect("entropy of the empty marginal is zero")
}

/// Cut function `f(S) = Σ_{{u,v}∈E: u∈S, v∉S} w(u,v)` of an undirected graph
/// with vertices `1..=n` and nonnegative edge weights.
pub fn graph_cut_fn(n: usize, edges: &[(usize, usize, f64)]) -> Result<SetFunction> {
    for &(u, v, w) in edges {
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    ground_n: n,
                });
            }
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "edge ({u},{v}) has weight {w}"
            )));
        }
    }
    let edges: Vec<(u64, u64, f64)> = edges
        .iter()
        .map(|&(u, v, w)| (1u64 << (u - 1), 1u64 << (v - 1), w))
        .collect();
    SetFunction::new(n, "graph_cut", move |s: IndexSet| {
        let b = s.bits();
        edges.iter().fold(0.0, |acc, &(u, v, w)| {
            if (b & u != 0) != (b & v != 0) {
                acc + w
            } else {
                acc
            }
        })
    })
}

/// Weighted coverage `f(S) = Σ_{u ∈ ∪_{i∈S} U_i} w_u`. Universe items are
/// 1-based indices into `weights`; `sets[i-1]` is `U_i`.
pub fn set_cover_fn(weights: &[f64], sets: &[Vec<usize>]) -> Result<SetFunction> {
    if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidInstance(format!(
            "universe weight {bad} must be nonnegative"
        )));
    }
    let u = weights.len();
    for (i, set) in sets.iter().enumerate() {
        if let Some(&bad) = set.iter().find(|&&x| x == 0 || x > u) {
            return Err(Error::InvalidInstance(format!(
                "set U_{} mentions item {bad}, universe is [1:{u}]",
                i + 1
            )));
        }
    }
    let sets: Vec<Vec<usize>> = sets
        .iter()
        .map(|s| s.iter().map(|x| x - 1).collect())
        .collect();
    let weights = weights.to_vec();
    SetFunction::new(sets.len(), "set_cover", move |s: IndexSet| {
        let mut covered = vec![false; weights.len()];
        for i in s.iter() {
            for &x in &sets[i - 1] {
                covered[x] = true;
            }
        }
        covered
            .iter()
            .zip(&weights)
            .fold(0.0, |acc, (&c, &w)| if c { acc + w } else { acc })
    })
}

/// Matroids with a closed-form rank function.
#[derive(Clone, Debug, PartialEq)]
pub enum MatroidSpec {
    /// `r(S) = min(|S|, rank)`.
    Uniform { ground_n: usize, rank: usize },
    /// `r(S) = Σ_j min(|S ∩ B_j|, c_j)`.
    Partition {
        blocks: Partition,
        capacities: Vec<usize>,
    },
}

pub fn matroid_rank_fn(spec: &MatroidSpec) -> Result<SetFunction> {
    match spec {
        MatroidSpec::Uniform { ground_n, rank } => {
            let r = *rank;
            SetFunction::new(*ground_n, "uniform_matroid", move |s: IndexSet| {
                s.len().min(r) as f64
            })
        }
        MatroidSpec::Partition { blocks, capacities } => {
            if blocks.len() != capacities.len() {
                return Err(Error::InvalidInstance(format!(
                    "{} blocks but {} capacities",
                    blocks.len(),
                    capacities.len()
                )));
            }
            let parts: Vec<(u64, usize)> = blocks
                .blocks()
                .iter()
                .zip(capacities)
                .map(|(b, &c)| (b.bits(), c))
                .collect();
            SetFunction::new(
                blocks.ground_n(),
                "partition_matroid",
                move |s: IndexSet| {
                    parts.iter().fold(0usize, |acc, &(b, c)| {
                        acc + ((s.bits() & b).count_ones() as usize).min(c)
                    }) as f64
                },
            )
        }
    }
}

/// Facility location `f(S) = Σ_i max_{j∈S} s_ij` for a nonnegative
/// similarity matrix (`f(∅) = 0`).
pub fn facility_location_fn(similarity: &Matrix) -> Result<SetFunction> {
    if !similarity.is_square() {
        return Err(Error::NotSquare {
            rows: similarity.rows(),
            cols: similarity.cols(),
        });
    }
    if let Some(bad) = similarity
        .as_slice()
        .iter()
        .find(|v| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::InvalidInstance(format!(
            "similarity {bad} must be nonnegative"
        )));
    }
    let sim = similarity.clone();
    let n = sim.rows();
    SetFunction::new(n, "facility_location", move |s: IndexSet| {
        if s.is_empty() {
            return 0.0;
        }
        (0..n).fold(0.0, |acc, i| {
            acc + s.iter().fold(0.0f64, |m, j| m.max(sim[(i, j - 1)]))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{check_submodular, Limits};

    fn set(ix: &[usize], n: usize) -> IndexSet {
        IndexSet::from_indices(ix, n).unwrap()
    }

    fn submodular(f: &SetFunction) -> bool {
        check_submodular(f, &Limits::default()).unwrap().holds
    }

    #[test]
    fn gaussian_values() {
        let k = SymPdMatrix::diagonal(&[2.0, 3.0]).unwrap();
        let f = gaussian_entropy_fn(&k);
        let c = 0.5 * libm::log(2.0 * PI * E);
        let v = f.evaluate(set(&[1, 2], 2)).unwrap();
        assert!((v - (2.0 * c + 0.5 * libm::log(6.0))).abs() < 1e-14);
        assert!(submodular(&f));
        let one = gaussian_entropy_fn(&SymPdMatrix::identity(1));
        assert_eq!(one.evaluate(IndexSet::empty(1)).unwrap(), 0.0);
    }

    #[test]
    fn discrete_entropy_values() {
        // X1 uniform bit, X2 = X1
        let pmf = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let f = discrete_entropy_fn(&pmf);
        let ln2 = libm::log(2.0);
        assert!((f.evaluate(set(&[1], 2)).unwrap() - ln2).abs() < 1e-15);
        assert!((f.evaluate(set(&[1, 2], 2)).unwrap() - ln2).abs() < 1e-15);
        assert!(submodular(&f));

        // independent bit and trit with distinct marginals
        let p1 = [0.25, 0.75];
        let p2 = [0.2, 0.3, 0.5];
        let joint: Vec<f64> = p1
            .iter()
            .flat_map(|a| p2.iter().map(move |b| a * b))
            .collect();
        let f = discrete_entropy_fn(&JointPmf::new(vec![2, 3], joint).unwrap());
        let h = |p: &[f64]| p.iter().fold(0.0, |acc, &x| acc - x * libm::log(x));
        assert!((f.evaluate(set(&[2], 2)).unwrap() - h(&p2)).abs() < 1e-14);
        assert!((f.evaluate(set(&[1, 2], 2)).unwrap() - h(&p1) - h(&p2)).abs() < 1e-14);

        assert!(JointPmf::new(vec![2], vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(vec![2, 2], vec![1.0]).is_err());
    }

    #[test]
    fn graph_cut_values() {
        // path 1-2-3 with weights 1 and 2
        let f = graph_cut_fn(3, &[(1, 2, 1.0), (2, 3, 2.0)]).unwrap();
        assert_eq!(f.evaluate(set(&[2], 3)).unwrap(), 3.0);
        assert_eq!(f.evaluate(set(&[1], 3)).unwrap(), 1.0);
        assert_eq!(f.evaluate(set(&[1, 2, 3], 3)).unwrap(), 0.0);
        assert!(submodular(&f));
        let empty = graph_cut_fn(3, &[]).unwrap();
        assert_eq!(empty.evaluate(IndexSet::full(3)).unwrap(), 0.0);
        assert!(graph_cut_fn(2, &[(1, 3, 1.0)]).is_err());
        assert!(graph_cut_fn(2, &[(1, 2, -1.0)]).is_err());
    }

    #[test]
    fn set_cover_values() {
        let f = set_cover_fn(&[1.0, 2.0, 4.0], &[vec![1, 2], vec![2, 3], vec![3]]).unwrap();
        assert_eq!(f.evaluate(set(&[1], 3)).unwrap(), 3.0);
        assert_eq!(f.evaluate(set(&[1, 2], 3)).unwrap(), 7.0);
        assert_eq!(f.evaluate(set(&[2, 3], 3)).unwrap(), 6.0);
        assert!(submodular(&f));
        let none = set_cover_fn(&[], &[vec![], vec![]]).unwrap();
        assert_eq!(none.evaluate(IndexSet::full(2)).unwrap(), 0.0);
        assert!(set_cover_fn(&[1.0], &[vec![2]]).is_err());
    }

    #[test]
    fn matroid_values() {
        let u = matroid_rank_fn(&MatroidSpec::Uniform {
            ground_n: 4,
            rank: 2,
        })
        .unwrap();
        assert_eq!(u.evaluate(set(&[1, 2, 3], 4)).unwrap(), 2.0);
        assert_eq!(u.evaluate(set(&[4], 4)).unwrap(), 1.0);
        assert!(submodular(&u));
        let blocks = Partition::from_blocks(&[vec![1, 2], vec![3, 4]], 4).unwrap();
        let p = matroid_rank_fn(&MatroidSpec::Partition {
            blocks: blocks.clone(),
            capacities: vec![1, 2],
        })
        .unwrap();
        assert_eq!(p.evaluate(set(&[1, 2, 3], 4)).unwrap(), 2.0);
        assert_eq!(p.evaluate(IndexSet::full(4)).unwrap(), 3.0);
        assert!(submodular(&p));
        assert!(matroid_rank_fn(&MatroidSpec::Partition {
            blocks,
            capacities: vec![1]
        })
        .is_err());
    }

    #[test]
    fn facility_values() {
        let s = Matrix::from_rows(&[
            vec![3.0, 1.0, 0.0],
            vec![1.0, 2.0, 4.0],
            vec![0.0, 5.0, 1.0],
        ])
        .unwrap();
        let f = facility_location_fn(&s).unwrap();
        assert_eq!(f.evaluate(set(&[1], 3)).unwrap(), 4.0);
        assert_eq!(f.evaluate(set(&[2, 3], 3)).unwrap(), 1.0 + 4.0 + 5.0);
        assert!(submodular(&f));
        assert!(facility_location_fn(&Matrix::zeros(0, 0)).is_ok());
        let neg = Matrix::from_rows(&[vec![-1.0]]).unwrap();
        assert!(facility_location_fn(&neg).is_err());
    }

    #[test]
    fn example_matrix_instances_are_submodular() {
        let a = SymPdMatrix::from_rows(&[
            vec![2.0, 1.0, 1.0, 1.0],
            vec![1.0, 3.0, 1.0, 1.0],
            vec![1.0, 1.0, 4.0, 1.0],
            vec![1.0, 1.0, 1.0, 5.0],
        ])
        .unwrap();
        assert!(submodular(&gaussian_entropy_fn(&a)));
        let sim = Matrix::from_rows(&a.to_rows()).unwrap();
        assert!(submodular(&facility_location_fn(&sim).unwrap()));
    }
}
