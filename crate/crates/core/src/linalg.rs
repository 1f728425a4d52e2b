//! Dense symmetric linear algebra at desk scale: Cholesky, log-determinants,
//! principal and rectangular submatrices, Schur complements, and a cyclic
//! Jacobi eigensolver.
//!
//! Internal storage is 0-based row-major; every [`IndexSet`] argument is the
//! usual 1-based set over `[1:n]`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, Index, IndexMut};

use crate::error::{Error, Result};
use crate::sets::IndexSet;

/// Relative slack for the symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Cholesky pivots must exceed this fraction of the largest diagonal entry.
pub const PIVOT_TOL: f64 = 1e-12;
/// Jacobi stops once the largest off-diagonal entry is below this fraction of
/// the Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidParams(alloc::format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::InvalidParams(alloc::format!(
                    "row {} has {} entries, expected {c}",
                    i + 1,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidParams(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                rhs.rows,
                rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First asymmetric entry (1-based), if any.
    pub fn symmetry_violation(&self, rel_tol: f64) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let a = self[(i, j)];
                let b = self[(j, i)];
                if (a - b).abs() > rel_tol * a.abs().max(1.0) || a.is_nan() || b.is_nan() {
                    return Some((i + 1, j + 1));
                }
            }
        }
        None
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// A validated real symmetric positive definite matrix.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SymPdMatrix(Matrix);

impl SymPdMatrix {
    /// Validates squareness, symmetry and positive definiteness.
    pub fn new(m: Matrix) -> Result<Self> {
        cholesky(&m)?;
        Ok(SymPdMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(d))
    }

    pub fn identity(n: usize) -> Self {
        SymPdMatrix(Matrix::identity(n))
    }

    /// Wraps a matrix already known to be symmetric PD (e.g. a principal
    /// submatrix of a validated matrix).
    pub(crate) fn trusted(m: Matrix) -> Self {
        SymPdMatrix(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Entry at 1-based position `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.dim())
    }
}

impl Deref for SymPdMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = A`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let (l, _) = factor(a)?;
    Ok(l)
}

/// Returns the factor together with `Σ ln(pivot)`, where `pivot = L_jj²`.
fn factor(a: &Matrix) -> Result<(Matrix, f64)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if let Some((row, col)) = a.symmetry_violation(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric { row, col });
    }
    factor_unchecked(a)
}

fn factor_unchecked(a: &Matrix) -> Result<(Matrix, f64)> {
    let n = a.rows;
    let max_diag = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)]));
    let threshold = PIVOT_TOL * max_diag;
    let mut l = Matrix::zeros(n, n);
    let mut log_det = 0.0;
    for j in 0..n {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > threshold && pivot > 0.0) {
            return Err(Error::NotPositiveDefinite {
                pivot: j + 1,
                value: pivot,
            });
        }
        log_det += libm::log(pivot);
        let d = libm::sqrt(pivot);
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok((l, log_det))
}

/// `ln|K|`; the empty matrix has log-determinant 0.
pub fn log_det(k: &SymPdMatrix) -> Result<f64> {
    Ok(factor_unchecked(k)?.1)
}

/// `ln|K(S)|` without materialising a [`SymPdMatrix`].
pub fn log_det_principal(k: &SymPdMatrix, s: IndexSet) -> Result<f64> {
    s.expect_ground(k.dim())?;
    if s.is_empty() {
        return Ok(0.0);
    }
    Ok(factor_unchecked(&select(k, s, s))?.1)
}

fn select(k: &Matrix, s: IndexSet, t: IndexSet) -> Matrix {
    let rows: Vec<usize> = s.iter().map(|i| i - 1).collect();
    let cols: Vec<usize> = t.iter().map(|j| j - 1).collect();
    let mut out = Matrix::zeros(rows.len(), cols.len());
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            out[(a, b)] = k[(i, j)];
        }
    }
    out
}

/// `K(S)`: rows and columns restricted to `S`, order preserved.
pub fn principal_submatrix(k: &SymPdMatrix, s: IndexSet) -> Result<SymPdMatrix> {
    check_range(k.dim(), s)?;
    Ok(SymPdMatrix::trusted(select(k, s, s)))
}

/// The block `K(S,T)`.
pub fn rect_submatrix(k: &Matrix, s: IndexSet, t: IndexSet) -> Result<Matrix> {
    check_range(k.rows(), s)?;
    check_range(k.cols(), t)?;
    Ok(select(k, s, t))
}

fn check_range(n: usize, s: IndexSet) -> Result<()> {
    if let Some(index) = s.iter().find(|&i| i > n) {
        return Err(Error::IndexOutOfRange { index, ground_n: n });
    }
    s.expect_ground(n)
}

/// Solves `A·X = B` for symmetric positive definite `A`.
pub(crate) fn solve_spd(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let (l, _) = factor_unchecked(a)?;
    Ok(cholesky_solve(&l, b))
}

/// Solves `A·X = B` given the Cholesky factor `L` of `A`.
fn cholesky_solve(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows;
    let mut x = b.clone();
    for c in 0..b.cols {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Schur complement of `K(P^c)` in `K`: `K(P) − K(P,P^c)·K(P^c)^{-1}·K(P^c,P)`.
pub fn schur_complement(k: &SymPdMatrix, p: IndexSet) -> Result<SymPdMatrix> {
    check_range(k.dim(), p)?;
    if p.is_empty() {
        return Err(Error::InvalidParams(
            "Schur complement needs a nonempty P".into(),
        ));
    }
    let pc = p.complement();
    if pc.is_empty() {
        return Err(Error::EmptyComplement);
    }
    let (l, _) = factor_unchecked(&select(k, pc, pc))?;
    let cross = select(k, pc, p);
    let solved = cholesky_solve(&l, &cross);
    let mut m = select(k, p, p);
    let np = p.len();
    for i in 0..np {
        for j in 0..np {
            let mut s = 0.0;
            for r in 0..pc.len() {
                s += cross[(r, i)] * solved[(r, j)];
            }
            m[(i, j)] -= s;
        }
    }
    // exact symmetry
    for i in 0..np {
        for j in (i + 1)..np {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    factor_unchecked(&m)?;
    Ok(SymPdMatrix::trusted(m))
}

/// Reorders `K` so that new index `i` is old index `order[i-1]`.
pub fn permute(k: &SymPdMatrix, order: &[usize]) -> Result<SymPdMatrix> {
    let n = k.dim();
    check_permutation(order, n)?;
    let mut m = Matrix::zeros(n, n);
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate() {
            m[(a, b)] = k[(i - 1, j - 1)];
        }
    }
    Ok(SymPdMatrix::trusted(m))
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidParams(alloc::format!(
            "permutation has {} entries, expected {n}",
            order.len()
        )));
    }
    IndexSet::from_indices(order, n).map(|_| ())
}

/// Ascending eigenvalues plus the off-diagonal residual at convergence.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenSpectrum {
    pub values: Vec<f64>,
    pub residual: f64,
}

impl EigenSpectrum {
    /// `Σ ln λ_i` over the `m` smallest eigenvalues.
    pub fn log_product_smallest(&self, m: usize) -> f64 {
        self.values.iter().take(m).map(|&v| libm::log(v)).sum()
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn eigenvalues_sorted(a: &Matrix) -> Result<EigenSpectrum> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if let Some((row, col)) = a.symmetry_violation(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric { row, col });
    }
    let n = a.rows;
    let mut m = a.clone();
    let target = JACOBI_TOL * a.frobenius_norm();
    let off_max = |m: &Matrix| {
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(m[(i, j)].abs());
            }
        }
        best
    };
    let mut sweeps = 0;
    let mut residual = off_max(&m);
    while residual > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
            }
        }
        residual = off_max(&m);
    }
    let mut values: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    values.sort_by(f64::total_cmp);
    Ok(EigenSpectrum { values, residual })
}

/// Default zero-test tolerance: `1e-9 · max|entry|`.
pub fn default_zero_tol(m: &Matrix) -> f64 {
    1e-9 * m.max_abs()
}

/// True iff every off-diagonal entry has magnitude at most `tol`.
pub fn is_diagonal(m: &Matrix, tol: Option<f64>) -> bool {
    let tol = tol.unwrap_or_else(|| default_zero_tol(m));
    max_off_diagonal(m).0 <= tol
}

/// Largest off-diagonal magnitude and its 1-based location.
pub fn max_off_diagonal(m: &Matrix) -> (f64, Option<(usize, usize)>) {
    let mut best = (0.0, None);
    for i in 0..m.rows {
        for j in 0..m.cols {
            if i != j && m[(i, j)].abs() > best.0 {
                best = (m[(i, j)].abs(), Some((i + 1, j + 1)));
            }
        }
    }
    best
}

/// True iff every entry of the block `M(S,T)` has magnitude at most `tol`.
pub fn block_is_zero(m: &Matrix, s: IndexSet, t: IndexSet, tol: Option<f64>) -> bool {
    let tol = tol.unwrap_or_else(|| default_zero_tol(m));
    max_block_entry(m, s, t).0 <= tol
}

/// Largest magnitude in `M(S,T)` and its 1-based location in `M`.
pub fn max_block_entry(m: &Matrix, s: IndexSet, t: IndexSet) -> (f64, Option<(usize, usize)>) {
    let mut best = (0.0, None);
    for i in s.iter() {
        for j in t.iter() {
            let v = m[(i - 1, j - 1)].abs();
            if v > best.0 {
                best = (v, Some((i, j)));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_a() -> SymPdMatrix {
        SymPdMatrix::from_rows(&[
            vec![2.0, 1.0, 1.0, 1.0],
            vec![1.0, 3.0, 1.0, 1.0],
            vec![1.0, 1.0, 4.0, 1.0],
            vec![1.0, 1.0, 1.0, 5.0],
        ])
        .unwrap()
    }

    fn set(ix: &[usize]) -> IndexSet {
        IndexSet::from_indices(ix, 4).unwrap()
    }

    #[test]
    fn cholesky_scalar() {
        let l = cholesky(&Matrix::from_rows(&[vec![4.0]]).unwrap()).unwrap();
        assert_eq!(l[(0, 0)], 2.0);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = matrix_a();
        let l = cholesky(&a).unwrap();
        let back = l.matmul(&l.transpose()).unwrap();
        let mut err = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                err += (back[(i, j)] - a[(i, j)]).powi(2);
            }
        }
        assert!(libm::sqrt(err) <= 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn indefinite_and_asymmetric_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            cholesky(&m),
            Err(Error::NotPositiveDefinite { pivot: 2, .. })
        ));
        let m = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).unwrap();
        assert_eq!(cholesky(&m), Err(Error::NotSymmetric { row: 1, col: 2 }));
        let m = Matrix::from_rows(&[vec![1.0, 0.5]]).unwrap();
        assert!(matches!(cholesky(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn log_det_values() {
        assert_eq!(log_det(&SymPdMatrix::identity(3)).unwrap(), 0.0);
        assert!((log_det(&matrix_a()).unwrap() - libm::log(74.0)).abs() < 1e-12);
        assert_eq!(log_det(&SymPdMatrix::identity(0)).unwrap(), 0.0);
        let a = matrix_a();
        assert_eq!(log_det_principal(&a, IndexSet::empty(4)).unwrap(), 0.0);
    }

    #[test]
    fn principal_blocks() {
        let a = matrix_a();
        let s12 = principal_submatrix(&a, set(&[1, 2])).unwrap();
        assert_eq!(s12.to_rows(), vec![vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert!((log_det(&s12).unwrap() - libm::log(5.0)).abs() < 1e-14);
        let s34 = principal_submatrix(&a, set(&[3, 4])).unwrap();
        assert_eq!(s34.to_rows(), vec![vec![4.0, 1.0], vec![1.0, 5.0]]);
        assert!((log_det(&s34).unwrap() - libm::log(19.0)).abs() < 1e-14);
        assert_eq!(principal_submatrix(&a, set(&[1, 2, 3, 4])).unwrap(), a);
        assert!(principal_submatrix(&a, IndexSet::full(5)).is_err());
    }

    #[test]
    fn rect_blocks() {
        let a = matrix_a();
        assert_eq!(
            rect_submatrix(&a, set(&[1]), set(&[4])).unwrap().to_rows(),
            vec![vec![1.0]]
        );
        let e = rect_submatrix(&a, IndexSet::empty(4), set(&[1, 2])).unwrap();
        assert_eq!((e.rows(), e.cols()), (0, 2));
        assert_eq!(
            rect_submatrix(&a, set(&[1, 2]), set(&[3, 4]))
                .unwrap()
                .to_rows(),
            vec![vec![1.0, 1.0], vec![1.0, 1.0]]
        );
    }

    #[test]
    fn schur_values() {
        let a = matrix_a();
        let m = schur_complement(&a, set(&[1, 2, 3])).unwrap();
        assert_eq!(m.dim(), 3);
        assert!((log_det(&m).unwrap() - libm::log(74.0 / 5.0)).abs() < 1e-12);
        let m = schur_complement(&a, set(&[1])).unwrap();
        assert!((m[(0, 0)] - 74.0 / 50.0).abs() < 1e-12);
        assert_eq!(
            schur_complement(&a, IndexSet::full(4)),
            Err(Error::EmptyComplement)
        );

        let bd = SymPdMatrix::from_rows(&[
            vec![2.0, 0.5, 0.0],
            vec![0.5, 1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        let p = IndexSet::from_indices(&[1, 2], 3).unwrap();
        assert_eq!(
            schur_complement(&bd, p).unwrap(),
            principal_submatrix(&bd, p).unwrap()
        );
    }

    #[test]
    fn jacobi_diagonal_and_identity() {
        let d = eigenvalues_sorted(&Matrix::from_diagonal(&[5.0, 2.0, 9.0])).unwrap();
        assert_eq!(d.values, vec![2.0, 5.0, 9.0]);
        let i = eigenvalues_sorted(&Matrix::identity(5)).unwrap();
        assert!(i.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn jacobi_on_example_matrix() {
        let a = matrix_a();
        let e = eigenvalues_sorted(&a).unwrap();
        assert!((e.values[0] - 1.296).abs() < 1e-3);
        assert!((e.values[1] - 2.392).abs() < 1e-3);
        assert!((e.values[2] - 3.507).abs() < 1e-3);
        let prod: f64 = e.values.iter().product();
        assert!((prod - 74.0).abs() < 74.0 * 1e-9);
        assert!(e.residual <= JACOBI_TOL * a.frobenius_norm());
    }

    #[test]
    fn diagonal_tests() {
        assert!(is_diagonal(&Matrix::identity(3), None));
        assert!(!is_diagonal(&matrix_a(), None));
        assert!(!block_is_zero(&matrix_a(), set(&[1, 2]), set(&[3, 4]), None));
        assert!(block_is_zero(
            &Matrix::identity(4),
            set(&[1, 2]),
            set(&[3, 4]),
            None
        ));
    }

    #[test]
    fn permute_moves_entries() {
        let a = matrix_a();
        let p = permute(&a, &[4, 3, 2, 1]).unwrap();
        assert_eq!(p.entry(1, 1), 5.0);
        assert_eq!(p.entry(4, 4), 2.0);
        assert!(permute(&a, &[1, 1, 2, 3]).is_err());
    }
}
