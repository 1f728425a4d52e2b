//! Reference values for the 4×4 example matrix `A`.

use std::fmt::Write as _;

use condineq_core::detineq::{EigenParams, MinorCache};
use condineq_core::linalg::eigenvalues_sorted;
use condineq_core::{Partition, Result, SymPdMatrix};
use serde::{Deserialize, Serialize};

pub fn matrix_a() -> SymPdMatrix {
    SymPdMatrix::from_rows(&[
        vec![2.0, 1.0, 1.0, 1.0],
        vec![1.0, 3.0, 1.0, 1.0],
        vec![1.0, 1.0, 4.0, 1.0],
        vec![1.0, 1.0, 1.0, 5.0],
    ])
    .expect("A is positive definite")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub quantity: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub checks: Vec<GoldenCheck>,
    /// Informational values that are not compared.
    pub notes: Vec<String>,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {}: computed {:.4}, expected {} ± {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.quantity,
                c.computed,
                c.expected,
                c.tolerance
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(
            s,
            "{}/{} reference values reproduced",
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        );
        s
    }
}

fn check(quantity: &str, computed: f64, expected: f64, tolerance: f64) -> GoldenCheck {
    GoldenCheck {
        quantity: quantity.to_string(),
        expected,
        computed,
        tolerance,
        pass: (computed - expected).abs() <= tolerance,
    }
}

pub fn golden_report() -> Result<GoldenReport> {
    let a = matrix_a();
    let m = MinorCache::new(&a);
    let eigen = |k| EigenParams {
        h: 3,
        p: 3,
        l: 0,
        k,
    };
    let split = Partition::from_blocks(&[vec![1, 3], vec![2, 4]], 4)?;
    let halves = Partition::from_blocks(&[vec![1, 2], vec![3, 4]], 4)?;
    let spectrum = eigenvalues_sorted(a.as_matrix())?;

    let checks = vec![
        check("|A|", m.log_det(a.full_set())?.exp(), 74.0, 1e-9),
        check("szasz k=2", m.szasz(2)?.exp(), 97.32, 0.01),
        check("ky_fan p=3", m.ky_fan(3)?.exp(), 95.76, 0.01),
        check(
            "strong_szasz k=2 p=3",
            m.conditioned_szasz(2, 3)?.exp(),
            82.58,
            0.01,
        ),
        check(
            "eigen_product h=3 p=3 l=0 k=1",
            m.eigen_product(eigen(1))?.exp(),
            19.152,
            0.005,
        ),
        check(
            "eigen_product h=3 p=3 l=0 k=2",
            m.eigen_product(eigen(2))?.exp(),
            16.516,
            0.005,
        ),
        check(
            "l1*l2*l3",
            spectrum.log_product_smallest(3).exp(),
            10.872,
            0.005,
        ),
        check(
            "strong_fischer p=2 partition=1,3|2,4",
            m.conditioned_fischer(2, &split)?.exp(),
            81.58,
            0.01,
        ),
        check(
            "fischer partition=1,3|2,4",
            m.fischer(&split)?.exp(),
            98.0,
            0.01,
        ),
    ];
    let notes = vec![format!(
        "fischer is 98 = 7*14 for partition {split}; the value 95 = 5*19 belongs to partition {halves} ({:.4})",
        m.fischer(&halves)?.exp()
    )];
    Ok(GoldenReport { checks, notes })
}
