use condineq_core::detineq::{self, EigenParams, MinorCache};
use condineq_core::linalg::{eigenvalues_sorted, log_det};
use condineq_core::sets::{all_subsets, binomial, subsets_of_size};
use condineq_core::submodular::{
    check_submodular, facility_location_fn, set_cover_fn, strengthened_han_bound,
    strengthened_partition_bound, subset_average_sequence, Limits,
};
use condineq_core::{IndexSet, Matrix, Partition, SymPdMatrix};
use proptest::prelude::*;

/// `B·Bᵀ + 0.1·I` from proptest-chosen entries of `B`.
fn spd(max_n: usize) -> impl Strategy<Value = SymPdMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |b| {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = (0..n).map(|r| b[i * n + r] * b[j * n + r]).sum();
                }
                m[(i, i)] += 0.1;
            }
            SymPdMatrix::new(m).unwrap()
        })
    })
}

fn partition(n: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0usize..n.max(1), n).prop_map(|raw| {
        // relabel in order of first appearance to get a restricted-growth string
        let mut seen: Vec<usize> = Vec::new();
        let rgs: Vec<usize> = raw
            .iter()
            .map(|v| match seen.iter().position(|s| s == v) {
                Some(i) => i,
                None => {
                    seen.push(*v);
                    seen.len() - 1
                }
            })
            .collect();
        Partition::from_restricted_growth(&rgs).unwrap()
    })
}

fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_chains_hold(k in spd(7)) {
        let n = k.dim();
        let m = MinorCache::new(&k);
        let ld = log_det(&k).unwrap();
        for p in 1..=n {
            let base = m.conditioned_szasz(1, p).unwrap();
            for size in 1..=p {
                let c = m.strong_szasz(size, p).unwrap();
                prop_assert!(le(ld, c.inner) && le(c.inner, c.outer));
                prop_assert!(le(c.inner, base));
            }
        }
        for size in 1..n {
            prop_assert!(le(m.szasz(size + 1).unwrap(), m.szasz(size).unwrap()));
        }
    }

    #[test]
    fn fischer_chains_hold((k, part) in spd(7).prop_flat_map(|k| { let n = k.dim(); (Just(k), partition(n)) })) {
        let n = k.dim();
        let m = MinorCache::new(&k);
        let ld = log_det(&k).unwrap();
        prop_assert!(le(m.fischer(&part).unwrap(), m.hadamard().unwrap()));
        for p in 1..=n {
            let c = m.strong_fischer(p, &part).unwrap();
            prop_assert!(le(ld, c.inner) && le(c.inner, c.outer));
        }
    }

    #[test]
    fn eigen_bounds_hold(k in spd(6)) {
        let sp = eigenvalues_sorted(&k).unwrap();
        let m = MinorCache::new(&k);
        for params in EigenParams::grid(k.dim()) {
            let b = m.eigen_product(params).unwrap();
            prop_assert!(le(sp.log_product_smallest(params.h + params.l), b));
        }
        let trace: f64 = (0..k.dim()).map(|i| k[(i, i)]).sum();
        prop_assert!((sp.values.iter().sum::<f64>() - trace).abs() <= 1e-9 * trace.max(1.0));
    }

    #[test]
    fn schur_route_agrees(k in spd(6)) {
        let n = k.dim();
        for p in 1..n {
            for size in 1..=p {
                let a = detineq::strong_szasz_bound(&k, size, p).unwrap().inner;
                let b = detineq::schur_route_bound(&k, size, p).unwrap();
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn interlacing_holds(k in spd(6), mask in 1u64..64) {
        let n = k.dim();
        let bits = mask & ((1u64 << n) - 1);
        prop_assume!(bits != 0);
        let s = IndexSet::from_bits(bits, n).unwrap();
        prop_assert!(detineq::interlacing_check(&k, s).unwrap());
    }

    #[test]
    fn set_algebra(a in 0u64..256, b in 0u64..256) {
        let x = IndexSet::from_bits(a, 8).unwrap();
        let y = IndexSet::from_bits(b, 8).unwrap();
        prop_assert_eq!(x.union(&y).complement(), x.complement().intersection(&y.complement()));
        prop_assert_eq!(x.difference(&y).union(&x.intersection(&y)), x);
        prop_assert_eq!(x.len() + y.len(), x.union(&y).len() + x.intersection(&y).len());
        prop_assert_eq!(IndexSet::from_indices(&x.to_vec(), 8).unwrap(), x);
    }

    #[test]
    fn subset_enumeration_counts(n in 0usize..12, k in 0usize..12) {
        let full = IndexSet::full(n);
        let subsets: Vec<_> = subsets_of_size(full, k).collect();
        prop_assert_eq!(subsets.len() as u64, if k <= n { binomial(n, k).unwrap() } else { 0 });
        prop_assert!(subsets.windows(2).all(|w| w[0].bits() < w[1].bits()));
        prop_assert!(subsets.iter().all(|s| s.len() == k));
    }

    #[test]
    fn restricted_partition_covers_prefix(part in (1usize..9).prop_flat_map(partition), p in 1usize..9) {
        let n = part.ground_n();
        let p = p.min(n);
        let prefix = IndexSet::prefix(p, n).unwrap();
        let induced = part.restricted_to(prefix);
        let union = induced.iter().fold(IndexSet::empty(n), |acc, s| acc.union(s));
        prop_assert_eq!(union, prefix);
        prop_assert!(induced.iter().all(|s| !s.is_empty()));
        let text = part.to_string();
        let blocks: Vec<Vec<usize>> = text
            .split('|')
            .map(|b| b.split(',').map(|i| i.parse().unwrap()).collect())
            .collect();
        prop_assert_eq!(Partition::from_blocks(&blocks, n).unwrap(), part);
    }

    #[test]
    fn coverage_chains_hold(
        weights in prop::collection::vec(0.0f64..2.0, 0..8),
        picks in prop::collection::vec(any::<u8>(), 1..7),
    ) {
        let m = weights.len();
        let sets: Vec<Vec<usize>> = picks
            .iter()
            .map(|&bits| (1..=m).filter(|&u| u <= 8 && bits & (1 << (u - 1)) != 0).collect())
            .collect();
        let f = set_cover_fn(&weights, &sets).unwrap();
        let n = f.ground_n();
        let limits = Limits::default();
        prop_assert!(check_submodular(&f, &limits).unwrap().holds);
        for p in 1..=n {
            for size in 1..=p {
                prop_assert!(strengthened_han_bound(&f, size, p).unwrap().holds());
            }
            let seq = subset_average_sequence(&f, p, &limits).unwrap();
            prop_assert!(seq.windows(2).all(|w| le(w[1], w[0])));
            prop_assert!(strengthened_partition_bound(&f, p, &Partition::singletons(n)).unwrap().holds());
        }
    }

    #[test]
    fn facility_location_is_submodular(entries in prop::collection::vec(0.0f64..1.0, 25)) {
        let sim = Matrix::from_row_major(5, 5, entries).unwrap();
        let f = facility_location_fn(&sim).unwrap();
        prop_assert!(check_submodular(&f, &Limits::default()).unwrap().holds);
        for s in all_subsets(f.full_set()) {
            prop_assert!(f.evaluate(s).unwrap() >= 0.0);
        }
    }
}
