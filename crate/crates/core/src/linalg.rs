//! Minimal dense real-matrix kernel for least-squares fitting.
//!
//! Exactly what the fitting pipeline needs and nothing else: row-major
//! matrices, transpose, multiply, a Householder-QR least-squares solver, and
//! a Jacobi-SVD pseudo-inverse used as the rank-deficient fallback and as an
//! independent cross-check of the QR route. Problem sizes are tiny (tens of
//! rows, single-digit columns), so plain dense loops are the right tool.
//!
//! The normal-equation closed form `(PᵀP)⁻¹PᵀT` squares the condition number
//! of `P`; with cubic features it is numerically hazardous, so the solver
//! works on `P` directly via QR instead.

// Indexed loops mirror the subscript arithmetic; iterator chains would
// obscure it here.
#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;

/// Diagonal entries of R below this fraction of the largest one mark the
/// matrix as rank deficient. Scale-relative so feature scaling does not move
/// the threshold.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Errors from matrix construction and the solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    /// Data length does not match `rows * cols`.
    DataLength { expected: usize, got: usize },
    /// A constructor was handed a NaN or infinite entry.
    NonFinite,
    /// Inner dimensions disagree (`left` columns vs `right` rows/length).
    DimensionMismatch { left: usize, right: usize },
    /// A least-squares system with fewer rows than columns.
    Underdetermined { rows: usize, cols: usize },
    /// A diagonal of R fell below tolerance; `column` is the offending index.
    RankDeficient { column: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DataLength { expected, got } => {
                write!(
                    f,
                    "data length {got} does not match dimensions ({expected} expected)"
                )
            }
            LinalgError::NonFinite => write!(f, "non-finite entry rejected"),
            LinalgError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            LinalgError::Underdetermined { rows, cols } => {
                write!(f, "underdetermined system: {rows} rows < {cols} columns")
            }
            LinalgError::RankDeficient { column } => {
                write!(
                    f,
                    "rank deficient: column {column} is numerically dependent"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LinalgError {}

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Rejects NaN and infinities.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DataLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[row * self.cols + col]
    }

    fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a_ik = self.get(i, k);
                if a_ik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a_ik * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product.
    pub fn mul_vector(&self, v: &Vector) -> Result<Vector, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                left: self.cols,
                right: v.len(),
            });
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out[i] = acc;
        }
        Ok(Vector::from_raw(out))
    }

    /// Solves `min ‖self·x − t‖₂` by Householder QR on `self` directly.
    ///
    /// Requires at least as many rows as columns. When `self` has full
    /// column rank this equals the normal-equation solution
    /// `(PᵀP)⁻¹PᵀT` without ever forming `PᵀP`.
    pub fn solve_least_squares(&self, t: &Vector) -> Result<Vector, LinalgError> {
        if self.rows != t.len() {
            return Err(LinalgError::DimensionMismatch {
                left: self.rows,
                right: t.len(),
            });
        }
        if self.rows < self.cols {
            return Err(LinalgError::Underdetermined {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let m = self.rows;
        let n = self.cols;
        let mut a = self.clone();
        let mut b: Vec<f64> = t.as_slice().to_vec();

        // Householder triangularization, applied to b as we go.
        let mut v = vec![0.0; m];
        for k in 0..n {
            let mut norm_sq = 0.0;
            for i in k..m {
                let x = a.get(i, k);
                norm_sq += x * x;
            }
            let norm = fmath::sqrt(norm_sq);
            if norm == 0.0 {
                // Column already zero below and at the diagonal; R[k][k] = 0
                // and the rank check below reports it.
                continue;
            }
            let akk = a.get(k, k);
            // Reflect onto -sign(akk)*norm*e1 so v has no cancellation.
            let alpha = if akk >= 0.0 { -norm } else { norm };
            v[k] = akk - alpha;
            for i in (k + 1)..m {
                v[i] = a.get(i, k);
            }
            let vtv: f64 = (k..m).map(|i| v[i] * v[i]).sum();
            if vtv == 0.0 {
                continue;
            }
            for j in k..n {
                let mut dot = 0.0;
                for i in k..m {
                    dot += v[i] * a.get(i, j);
                }
                let s = 2.0 * dot / vtv;
                for i in k..m {
                    let val = a.get(i, j) - s * v[i];
                    a.set(i, j, val);
                }
            }
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i] * b[i];
            }
            let s = 2.0 * dot / vtv;
            for i in k..m {
                b[i] -= s * v[i];
            }
        }

        // Rank check on the diagonal of R, relative to the largest entry.
        let mut max_diag = 0.0f64;
        for i in 0..n {
            max_diag = max_diag.max(abs(a.get(i, i)));
        }
        for i in 0..n {
            if abs(a.get(i, i)) < RANK_TOLERANCE * max_diag || max_diag == 0.0 {
                return Err(LinalgError::RankDeficient { column: i });
            }
        }

        // Back substitution on R x = Qᵀb.
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..n {
                acc -= a.get(i, j) * x[j];
            }
            x[i] = acc / a.get(i, i);
        }
        Ok(Vector::from_raw(x))
    }

    /// Minimum-norm least-squares solution via one-sided Jacobi SVD.
    ///
    /// Singular values below `tol` times the largest singular value are
    /// treated as zero, which makes this total: rank-deficient and even
    /// all-zero systems return the minimum-norm answer instead of failing.
    pub fn pseudo_inverse_solve(&self, t: &Vector, tol: f64) -> Result<Vector, LinalgError> {
        if self.rows != t.len() {
            return Err(LinalgError::DimensionMismatch {
                left: self.rows,
                right: t.len(),
            });
        }
        let m = self.rows;
        let n = self.cols;
        let mut u = self.clone(); // columns orthogonalized in place
        let mut vt = Matrix::identity(n); // accumulates the right rotations

        // Hestenes one-sided Jacobi: rotate column pairs until all are
        // mutually orthogonal. Converges in a handful of sweeps at this size.
        const MAX_SWEEPS: usize = 64;
        const ORTHO_EPS: f64 = 1e-14;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = 0.0;
                    for i in 0..m {
                        let up = u.get(i, p);
                        let uq = u.get(i, q);
                        app += up * up;
                        aqq += uq * uq;
                        apq += up * uq;
                    }
                    if apq == 0.0 || abs(apq) <= ORTHO_EPS * fmath::sqrt(app * aqq) {
                        continue;
                    }
                    rotated = true;
                    // Rutishauser rotation annihilating the (p,q) Gram entry.
                    let zeta = (aqq - app) / (2.0 * apq);
                    let tan = sign(zeta) / (abs(zeta) + fmath::sqrt(1.0 + zeta * zeta));
                    let cos = 1.0 / fmath::sqrt(1.0 + tan * tan);
                    let sin = cos * tan;
                    for i in 0..m {
                        let up = u.get(i, p);
                        let uq = u.get(i, q);
                        u.set(i, p, cos * up - sin * uq);
                        u.set(i, q, sin * up + cos * uq);
                    }
                    for i in 0..n {
                        let vp = vt.get(i, p);
                        let vq = vt.get(i, q);
                        vt.set(i, p, cos * vp - sin * vq);
                        vt.set(i, q, sin * vp + cos * vq);
                    }
                }
            }
            if !rotated {
                break;
            }
        }

        // Singular values are the column norms of the rotated matrix.
        let mut sigma = vec![0.0; n];
        let mut sigma_max = 0.0f64;
        for j in 0..n {
            let mut norm_sq = 0.0;
            for i in 0..m {
                let x = u.get(i, j);
                norm_sq += x * x;
            }
            sigma[j] = fmath::sqrt(norm_sq);
            sigma_max = sigma_max.max(sigma[j]);
        }
        if sigma_max == 0.0 {
            // Zero matrix: the minimum-norm solution of the all-solutions set.
            return Ok(Vector::from_raw(vec![0.0; n]));
        }

        // x = V Σ⁺ Uᵀ t, with uⱼᵀt = (column j)ᵀ t / σⱼ.
        let mut y = vec![0.0; n];
        for j in 0..n {
            if sigma[j] <= tol * sigma_max {
                continue;
            }
            let mut dot = 0.0;
            for i in 0..m {
                dot += u.get(i, j) * t.get(i);
            }
            y[j] = dot / (sigma[j] * sigma[j]);
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += vt.get(i, j) * y[j];
            }
            x[i] = acc;
        }
        Ok(Vector::from_raw(x))
    }
}

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Dense real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    /// Builds a vector, rejecting NaN and infinities.
    pub fn new(data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Vector { data })
    }

    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        Vector { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn norm2(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|x| x * x).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> Matrix {
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| rng.next_f64() * 2.0 - 1.0)
            .collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    fn random_vector(rng: &mut SplitMix64, len: usize) -> Vector {
        Vector::new((0..len).map(|_| rng.next_f64() * 2.0 - 1.0).collect()).unwrap()
    }

    // Independent product for cross-checking matmul.
    fn naive_matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = 0.0;
                for k in 0..a.cols() {
                    acc += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(
            Matrix::new(2, 2, vec![1.0; 3]).unwrap_err(),
            LinalgError::DataLength {
                expected: 4,
                got: 3
            }
        );
        assert_eq!(
            Matrix::new(1, 1, vec![f64::NAN]).unwrap_err(),
            LinalgError::NonFinite
        );
        assert_eq!(
            Vector::new(vec![f64::INFINITY]).unwrap_err(),
            LinalgError::NonFinite
        );
    }

    #[test]
    fn transpose_one_by_one() {
        let m = Matrix::new(1, 1, vec![5.0]).unwrap();
        assert_eq!(m.transpose(), m);
    }

    #[test]
    fn transpose_two_by_three() {
        let m = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let t = m.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.cols(), 2);
        assert_eq!(t.data(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
    }

    #[test]
    fn transpose_is_an_involution() {
        let mut rng = SplitMix64::new(17);
        let m = random_matrix(&mut rng, 7, 4);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn matmul_identity_is_neutral() {
        let mut rng = SplitMix64::new(5);
        let m = random_matrix(&mut rng, 3, 6);
        let id = Matrix::identity(3);
        assert_eq!(id.matmul(&m).unwrap(), m);
    }

    #[test]
    fn matmul_hand_case() {
        let a = Matrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Matrix::new(2, 1, vec![5.0, 6.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[17.0, 39.0]);
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        assert_eq!(
            a.matmul(&b).unwrap_err(),
            LinalgError::DimensionMismatch { left: 3, right: 2 }
        );
    }

    #[test]
    fn matmul_is_associative_and_matches_naive_product() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 4, 4);
            let b = random_matrix(&mut rng, 4, 4);
            let c = random_matrix(&mut rng, 4, 4);
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            assert!(max_abs_diff(&left, &right) < 1e-12);
            // Cross-check one grouping against the independent triple loop.
            let oracle = naive_matmul(&naive_matmul(&a, &b), &c);
            assert!(max_abs_diff(&left, &oracle) < 1e-12);
        }
    }

    #[test]
    fn least_squares_identity_system() {
        let p = Matrix::identity(2);
        let t = Vector::new(vec![3.0, 7.0]).unwrap();
        let a = p.solve_least_squares(&t).unwrap();
        assert_eq!(a.as_slice(), &[3.0, 7.0]);
    }

    #[test]
    fn least_squares_exact_line() {
        // T = 1 + 2p through three points is an exact fit.
        let p = Matrix::new(3, 2, vec![1.0, 1.0, 1.0, 2.0, 1.0, 3.0]).unwrap();
        let t = Vector::new(vec![3.0, 5.0, 7.0]).unwrap();
        let a = p.solve_least_squares(&t).unwrap();
        assert!((a.get(0) - 1.0).abs() < 1e-12);
        assert!((a.get(1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_known_coefficients() {
        let mut rng = SplitMix64::new(21);
        let p = random_matrix(&mut rng, 20, 7);
        let a_true = random_vector(&mut rng, 7);
        // Oracle: synthesize T by forward multiplication with the known A*.
        let mut t = vec![0.0; 20];
        for i in 0..20 {
            for j in 0..7 {
                t[i] += p.get(i, j) * a_true.get(j);
            }
        }
        let a = p.solve_least_squares(&Vector::new(t).unwrap()).unwrap();
        for j in 0..7 {
            let rel = (a.get(j) - a_true.get(j)).abs() / a_true.get(j).abs();
            assert!(rel < 1e-8, "coefficient {j}: relative error {rel}");
        }
    }

    #[test]
    fn least_squares_flags_rank_deficiency() {
        // Third column is the sum of the first two.
        let mut data = Vec::new();
        let mut rng = SplitMix64::new(33);
        for _ in 0..6 {
            let a = rng.next_f64();
            let b = rng.next_f64();
            data.extend_from_slice(&[a, b, a + b]);
        }
        let p = Matrix::new(6, 3, data).unwrap();
        let t = random_vector(&mut rng, 6);
        match p.solve_least_squares(&t) {
            Err(LinalgError::RankDeficient { .. }) => {}
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn least_squares_rejects_underdetermined_and_mismatched() {
        let p = Matrix::zeros(2, 3);
        let t = Vector::new(vec![0.0; 2]).unwrap();
        assert_eq!(
            p.solve_least_squares(&t).unwrap_err(),
            LinalgError::Underdetermined { rows: 2, cols: 3 }
        );
        let p = Matrix::identity(3);
        assert_eq!(
            p.solve_least_squares(&t).unwrap_err(),
            LinalgError::DimensionMismatch { left: 3, right: 2 }
        );
    }

    #[test]
    fn residual_is_orthogonal_to_the_column_space() {
        // ‖Pᵀ(PA − T)‖∞ ≤ 1e-8 · (‖P‖∞‖T‖∞ + 1) over seeded systems.
        let mut rng = SplitMix64::new(55);
        for _ in 0..20 {
            let p = random_matrix(&mut rng, 12, 5);
            let t = random_vector(&mut rng, 12);
            let a = p.solve_least_squares(&t).unwrap();
            let fitted = p.mul_vector(&a).unwrap();
            let residual: Vec<f64> = (0..12).map(|i| fitted.get(i) - t.get(i)).collect();
            let pt = p.transpose();
            let grad = pt.mul_vector(&Vector::new(residual).unwrap()).unwrap();
            let grad_inf = grad.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let p_inf = (0..p.rows())
                .map(|i| (0..p.cols()).map(|j| p.get(i, j).abs()).sum::<f64>())
                .fold(0.0f64, f64::max);
            let t_inf = t.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(
                grad_inf <= 1e-8 * (p_inf * t_inf + 1.0),
                "gradient norm {grad_inf}"
            );
        }
    }

    #[test]
    fn perturbations_never_beat_the_least_squares_solution() {
        let mut rng = SplitMix64::new(77);
        let p = random_matrix(&mut rng, 15, 4);
        let t = random_vector(&mut rng, 15);
        let a = p.solve_least_squares(&t).unwrap();
        let base = residual_norm(&p, &a, &t);
        let bound = 0.1 * a.norm2() + 0.1;
        for _ in 0..100 {
            let mut delta: Vec<f64> = (0..4).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
            let scale = rng.next_f64() * bound / Vector::from_raw(delta.clone()).norm2();
            for d in &mut delta {
                *d *= scale;
            }
            let perturbed = Vector::from_raw((0..4).map(|j| a.get(j) + delta[j]).collect());
            assert!(residual_norm(&p, &perturbed, &t) >= base - 1e-9);
        }
    }

    fn residual_norm(p: &Matrix, a: &Vector, t: &Vector) -> f64 {
        let fitted = p.mul_vector(a).unwrap();
        fmath::sqrt(
            (0..t.len())
                .map(|i| (fitted.get(i) - t.get(i)).powi(2))
                .sum(),
        )
    }

    // Test-only normal-equation oracle: A = (PᵀP)⁻¹PᵀT by Gaussian
    // elimination. Only trustworthy on well-scaled systems, which is why the
    // production path uses QR; here it cross-checks QR on such systems.
    fn normal_equation_solve(p: &Matrix, t: &Vector) -> Vec<f64> {
        let pt = p.transpose();
        let ptp = pt.matmul(p).unwrap();
        let ptt = pt.mul_vector(t).unwrap();
        let n = ptp.rows();
        let mut aug: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row: Vec<f64> = (0..n).map(|j| ptp.get(i, j)).collect();
                row.push(ptt.get(i));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot);
            for row in (col + 1)..n {
                let f = aug[row][col] / aug[col][col];
                for k in col..=n {
                    aug[row][k] -= f * aug[col][k];
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = aug[i][n];
            for j in (i + 1)..n {
                acc -= aug[i][j] * x[j];
            }
            x[i] = acc / aug[i][i];
        }
        x
    }

    #[test]
    fn qr_matches_normal_equations_on_scaled_systems() {
        let mut rng = SplitMix64::new(101);
        for _ in 0..20 {
            let p = random_matrix(&mut rng, 10, 4);
            let t = random_vector(&mut rng, 10);
            let qr = p.solve_least_squares(&t).unwrap();
            let ne = normal_equation_solve(&p, &t);
            for j in 0..4 {
                assert!((qr.get(j) - ne[j]).abs() < 1e-8 * (1.0 + ne[j].abs()));
            }
        }
    }

    #[test]
    fn pseudo_inverse_agrees_with_qr_on_full_rank_systems() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..50 {
            let p = random_matrix(&mut rng, 20, 7);
            let t = random_vector(&mut rng, 20);
            let qr = p.solve_least_squares(&t).unwrap();
            let pinv = p.pseudo_inverse_solve(&t, 1e-12).unwrap();
            let diff: f64 = (0..7)
                .map(|j| (qr.get(j) - pinv.get(j)).powi(2))
                .sum::<f64>();
            let rel = fmath::sqrt(diff) / qr.norm2();
            assert!(rel < 1e-8, "relative disagreement {rel}");
        }
    }

    #[test]
    fn pseudo_inverse_splits_duplicated_columns_evenly() {
        // Minimum-norm solution gives identical columns identical weight.
        let p = Matrix::new(3, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]).unwrap();
        let t = Vector::new(vec![2.0, 4.0, 6.0]).unwrap();
        let x = p.pseudo_inverse_solve(&t, 1e-12).unwrap();
        assert!((x.get(0) - x.get(1)).abs() < 1e-12);
        assert!((x.get(0) + x.get(1) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn pseudo_inverse_of_zero_matrix_is_zero() {
        let p = Matrix::zeros(4, 3);
        let t = Vector::new(vec![1.0, -2.0, 3.0, 4.0]).unwrap();
        let x = p.pseudo_inverse_solve(&t, 1e-12).unwrap();
        assert_eq!(x.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn pseudo_inverse_handles_wide_systems() {
        // Underdetermined: x = Pᵀ(PPᵀ)⁻¹t is the minimum-norm solution.
        let p = Matrix::new(1, 2, vec![1.0, 1.0]).unwrap();
        let t = Vector::new(vec![2.0]).unwrap();
        let x = p.pseudo_inverse_solve(&t, 1e-12).unwrap();
        assert!((x.get(0) - 1.0).abs() < 1e-12);
        assert!((x.get(1) - 1.0).abs() < 1e-12);
    }
}
