//! Library values against independent computations: cofactor-expansion
//! determinants, explicit inverses and hand-worked minors.

use condineq_core::detineq::{
    self, fischer_bound, hadamard_bound, kyfan_bound, schur_route_bound, strong_fischer_bound,
    strong_szasz_bound, szasz_bound, EigenParams,
};
use condineq_core::linalg::{
    eigenvalues_sorted, log_det, log_det_principal, principal_submatrix, schur_complement,
};
use condineq_core::sets::{binomial, subsets_of_size};
use condineq_core::submodular::{
    conditional_value, discrete_entropy_fn, gaussian_entropy_fn, graph_cut_fn, matroid_rank_fn,
    set_cover_fn, JointPmf, MatroidSpec,
};
use condineq_core::verify::{random_spd, MatrixSpec};
use condineq_core::{IndexSet, Matrix, Partition, SymPdMatrix};

fn matrix_a() -> SymPdMatrix {
    SymPdMatrix::from_rows(&[
        vec![2.0, 1.0, 1.0, 1.0],
        vec![1.0, 3.0, 1.0, 1.0],
        vec![1.0, 1.0, 4.0, 1.0],
        vec![1.0, 1.0, 1.0, 5.0],
    ])
    .unwrap()
}

fn set(ix: &[usize], n: usize) -> IndexSet {
    IndexSet::from_indices(ix, n).unwrap()
}

/// Determinant by cofactor expansion along the first row.
fn laplace_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        _ => (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * laplace_det(&minor)
            })
            .sum(),
    }
}

fn minor_det(k: &Matrix, s: IndexSet) -> f64 {
    let idx = s.to_vec();
    let rows: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| k[(i - 1, j - 1)]).collect())
        .collect();
    laplace_det(&rows)
}

/// Gauss-Jordan inverse with partial pivoting.
fn inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let factor = a[r][col];
                let pivot_row = a[col].clone();
                for (v, p) in a[r].iter_mut().zip(pivot_row) {
                    *v -= factor * p;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

#[test]
fn minors_of_a_match_hand_values() {
    let a = matrix_a();
    let cases: [(&[usize], f64); 8] = [
        (&[1, 2, 3, 4], 74.0),
        (&[4], 5.0),
        (&[1, 4], 9.0),
        (&[2, 4], 14.0),
        (&[3, 4], 19.0),
        (&[1, 3], 7.0),
        (&[1, 3, 4], 31.0),
        (&[2, 3, 4], 50.0),
    ];
    for (ix, want) in cases {
        let s = set(ix, 4);
        assert!((minor_det(&a, s) - want).abs() < 1e-12);
        assert!(
            (log_det_principal(&a, s).unwrap() - want.ln()).abs() < 1e-12,
            "{ix:?}"
        );
    }
}

#[test]
fn every_minor_matches_cofactor_expansion() {
    for seed in 0..8 {
        let k = random_spd(&MatrixSpec::dense(seed, 6)).unwrap();
        for bits in 1u64..64 {
            let s = IndexSet::from_bits(bits, 6).unwrap();
            let want = minor_det(&k, s).ln();
            let got = log_det_principal(&k, s).unwrap();
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                "seed {seed} S={s}"
            );
        }
    }
}

/// Bounds assembled in the product domain from cofactor determinants.
#[test]
fn bounds_match_product_domain_assembly() {
    for seed in 0..10 {
        let n = 3 + (seed % 4) as usize;
        let k = random_spd(&MatrixSpec::dense(100 + seed, n)).unwrap();
        let det = |ix: IndexSet| minor_det(&k, ix);
        let full = IndexSet::full(n);

        let hadamard: f64 = (0..n).map(|i| k[(i, i)]).product();
        assert!((hadamard_bound(&k).unwrap() - hadamard.ln()).abs() < 1e-10);

        for size in 1..=n {
            let prod: f64 = subsets_of_size(full, size).map(det).product();
            let want = prod.ln() / binomial(n - 1, size - 1).unwrap() as f64;
            assert!((szasz_bound(&k, size).unwrap() - want).abs() < 1e-9);
        }

        for p in 1..=n {
            let q = IndexSet::suffix_after(p, n).unwrap();
            let dq = det(q);
            let ky: f64 = (1..=p).map(|i| det(q.with(i)) / dq).product::<f64>() * dq;
            assert!((kyfan_bound(&k, p).unwrap() - ky.ln()).abs() < 1e-9);
            for size in 1..=p {
                let prod: f64 = subsets_of_size(IndexSet::prefix(p, n).unwrap(), size)
                    .map(|s| det(s.union(&q)) / dq)
                    .product();
                let want = prod.ln() / binomial(p - 1, size - 1).unwrap() as f64 + dq.ln();
                let got = strong_szasz_bound(&k, size, p).unwrap().inner;
                assert!((got - want).abs() < 1e-9, "n={n} k={size} p={p}");
            }
        }

        for partition in Partition::enumerate_all(n) {
            let prod: f64 = partition.blocks().iter().map(|&b| det(b)).product();
            assert!((fischer_bound(&k, &partition).unwrap() - prod.ln()).abs() < 1e-9);
        }
    }
}

#[test]
fn schur_complement_matches_explicit_inverse() {
    let k = random_spd(&MatrixSpec::dense(5, 5)).unwrap();
    let p = IndexSet::prefix(2, 5).unwrap();
    let m = schur_complement(&k, p).unwrap();
    let rows = k.to_rows();
    let kc: Vec<Vec<f64>> = (2..5).map(|i| rows[i][2..5].to_vec()).collect();
    let inv = inverse(&kc);
    for i in 0..2 {
        for j in 0..2 {
            let mut corr = 0.0;
            for r in 0..3 {
                for c in 0..3 {
                    corr += rows[i][2 + r] * inv[r][c] * rows[2 + c][j];
                }
            }
            assert!((m[(i, j)] - (rows[i][j] - corr)).abs() < 1e-12);
        }
    }
    // |M| = |K| / |K(P^c)|
    let lhs = log_det(&m).unwrap();
    let rhs = log_det(&k).unwrap() - log_det_principal(&k, p.complement()).unwrap();
    assert!((lhs - rhs).abs() < 1e-12);
}

#[test]
fn schur_route_agrees_on_random_matrices() {
    for seed in 0..5 {
        let k = random_spd(&MatrixSpec::dense(seed, 5)).unwrap();
        for p in 1..5 {
            for size in 1..=p {
                let direct = strong_szasz_bound(&k, size, p).unwrap().inner;
                let schur = schur_route_bound(&k, size, p).unwrap();
                assert!((direct - schur).abs() <= 1e-9 * direct.abs().max(1.0));
            }
        }
    }
    let a = matrix_a();
    assert!((schur_route_bound(&a, 2, 3).unwrap().exp() - 82.58).abs() < 0.01);
}

#[test]
fn eigenvalues_satisfy_trace_and_determinant() {
    let a = matrix_a();
    let sp = eigenvalues_sorted(&a).unwrap();
    assert!((sp.values.iter().sum::<f64>() - 14.0).abs() < 1e-10);
    assert!((sp.values.iter().product::<f64>() - 74.0).abs() < 1e-9);
    // closed form for a 2x2 block
    let b = principal_submatrix(&a, set(&[1, 2], 4)).unwrap();
    let disc = ((2.0f64 - 3.0).powi(2) + 4.0).sqrt();
    let s2 = eigenvalues_sorted(&b).unwrap();
    assert!((s2.values[0] - (5.0 - disc) / 2.0).abs() < 1e-12);
    assert!((s2.values[1] - (5.0 + disc) / 2.0).abs() < 1e-12);
}

#[test]
fn eigen_bound_on_diagonal_equals_product() {
    let d = SymPdMatrix::diagonal(&[0.5, 1.5, 2.0, 4.0]).unwrap();
    let b = detineq::eigen_product_bound(
        &d,
        EigenParams {
            h: 4,
            p: 4,
            l: 0,
            k: 4,
        },
    )
    .unwrap();
    assert!((b.log_bound - b.log_eigen_product).abs() < 1e-12);
    // with increasing diagonal, [1:h] holds the h smallest eigenvalues
    let b = detineq::eigen_product_bound(
        &d,
        EigenParams {
            h: 2,
            p: 2,
            l: 0,
            k: 1,
        },
    )
    .unwrap();
    assert!((b.log_bound - 0.75f64.ln()).abs() < 1e-12);
    assert!((b.log_eigen_product - 0.75f64.ln()).abs() < 1e-12);
}

#[test]
fn strong_fischer_matches_minor_quotient() {
    let a = matrix_a();
    let part = Partition::from_blocks(&[vec![1, 3], vec![2, 4]], 4).unwrap();
    let c = strong_fischer_bound(&a, 2, &part).unwrap();
    assert!((c.inner - (31.0f64 * 50.0 / 19.0).ln()).abs() < 1e-12);
    assert!((c.outer - 98.0f64.ln()).abs() < 1e-12);
    let other = Partition::from_blocks(&[vec![1, 2], vec![3, 4]], 4).unwrap();
    assert!((fischer_bound(&a, &other).unwrap() - 95.0f64.ln()).abs() < 1e-12);
}

#[test]
fn gaussian_conditional_entropy_of_a() {
    let f = gaussian_entropy_fn(&matrix_a());
    let s = set(&[1, 2, 3], 4);
    let t = set(&[4], 4);
    let want = 0.5 * ((2.0 * std::f64::consts::PI * std::f64::consts::E).powi(3) * 74.0 / 5.0).ln();
    assert!((conditional_value(&f, s, t).unwrap() - want).abs() < 1e-12);
}

#[test]
fn combinatorial_instances_by_hand() {
    // path 1-2-3 with weights 2 and 3
    let cut = graph_cut_fn(3, &[(1, 2, 2.0), (2, 3, 3.0)]).unwrap();
    assert_eq!(cut.evaluate(set(&[2], 3)).unwrap(), 5.0);
    assert_eq!(cut.evaluate(set(&[1, 2], 3)).unwrap(), 3.0);
    assert_eq!(cut.evaluate(IndexSet::full(3)).unwrap(), 0.0);

    let cover = set_cover_fn(&[1.0, 2.0, 4.0], &[vec![1, 2], vec![2, 3]]).unwrap();
    assert_eq!(cover.evaluate(set(&[1], 2)).unwrap(), 3.0);
    assert_eq!(cover.evaluate(IndexSet::full(2)).unwrap(), 7.0);

    let rank = matroid_rank_fn(&MatroidSpec::Uniform {
        ground_n: 5,
        rank: 2,
    })
    .unwrap();
    assert_eq!(rank.evaluate(set(&[1, 3, 5], 5)).unwrap(), 2.0);

    // independent fair bits: H(X_S) = |S| ln 2
    let pmf = JointPmf::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
    let h = discrete_entropy_fn(&pmf);
    assert!((h.evaluate(set(&[1, 3], 3)).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
    // X_2 = X_1: H(X_1, X_2) = ln 2
    let copy = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let h = discrete_entropy_fn(&copy);
    assert!((h.evaluate(IndexSet::full(2)).unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn bound_report_on_a_full_grid() {
    let a = matrix_a();
    let mut cfg = detineq::ReportConfig::full_grid("A", 4);
    cfg.partitions = vec![Partition::from_blocks(&[vec![1, 3], vec![2, 4]], 4).unwrap()];
    let r = detineq::bound_report(&a, &cfg).unwrap();
    assert!(r.all_checks_pass());
    assert!(r.entries.iter().all(|e| e.slack_log >= -1e-9));
    // among the example's configurations the conditioned Szász bound is tightest
    let example: Vec<_> = r
        .entries
        .iter()
        .filter(|e| {
            matches!(
                (e.name.as_str(), e.params.k, e.params.p),
                ("szasz", Some(2), None)
                    | ("ky_fan", None, Some(3))
                    | ("strong_szasz", Some(2), Some(3))
            )
        })
        .collect();
    assert_eq!(example.len(), 3);
    assert_eq!(example[0].name, "strong_szasz");
    assert!((example[0].bound - 82.58).abs() < 0.01);
}
