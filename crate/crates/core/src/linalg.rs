//! Extreme singular values through the symmetric eigenproblem, sample
//! covariance, and suprema of quadratic empirical processes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::samplers::SampleMatrix;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.data[i * n + i] = *x;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// AᵀA (cols × cols).
    pub fn gram(&self) -> Vec<f64> {
        gram(&self.data, self.rows, self.cols)
    }
}

impl From<&SampleMatrix> for Matrix {
    fn from(x: &SampleMatrix) -> Self {
        Self {
            rows: x.n_rows,
            cols: x.n_cols,
            data: x.data.clone(),
        }
    }
}

fn gram(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut g = vec![0.0; cols * cols];
    for r in 0..rows {
        let row = &data[r * cols..(r + 1) * cols];
        for i in 0..cols {
            let xi = row[i];
            if xi == 0.0 {
                continue;
            }
            let gi = &mut g[i * cols..(i + 1) * cols];
            for j in i..cols {
                gi[j] += xi * row[j];
            }
        }
    }
    for i in 0..cols {
        for j in 0..i {
            g[i * cols + j] = g[j * cols + i];
        }
    }
    g
}

pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Eigenvalues of a symmetric n×n matrix (row-major, consumed) by cyclic
/// Jacobi rotations, ascending. Stops once the off-diagonal Frobenius norm
/// drops below 1e-12·‖A‖_F.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: a.len(),
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * total;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };
    let mut converged = off(&a) <= threshold;
    let mut sweep = 0;
    while !converged {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal {:.3e})",
                off(&a)
            )));
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // rotate columns p and q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                // rotate rows p and q
                let (lo, hi) = a.split_at_mut(q * n);
                let row_p = &mut lo[p * n..(p + 1) * n];
                let row_q = &mut hi[..n];
                for k in 0..n {
                    let apk = row_p[k];
                    let aqk = row_q[k];
                    row_p[k] = c * apk - s * aqk;
                    row_q[k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        converged = off(&a) <= threshold;
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPair {
    pub s_min: f64,
    pub s_max: f64,
}

/// s_min and s_max of a tall or square matrix, as square roots of the
/// extreme eigenvalues of AᵀA (negatives clamped to 0).
pub fn extreme_singulars(a: &Matrix) -> Result<SingularPair> {
    if a.rows < a.cols || a.cols == 0 {
        return invalid(format!(
            "need N ≥ n ≥ 1, got {}×{}",
            a.rows, a.cols
        ));
    }
    if a.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let ev = symmetric_eigenvalues(a.gram(), a.cols)?;
    Ok(SingularPair {
        s_min: ev[0].max(0.0).sqrt(),
        s_max: ev[a.cols - 1].max(0.0).sqrt(),
    })
}

pub fn extreme_singulars_of(x: &SampleMatrix) -> Result<SingularPair> {
    extreme_singulars(&Matrix::from(x))
}

/// Symmetric n×n matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl CovMatrix {
    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = c;
        }
        Self { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(self.data.clone(), self.n)
    }

    pub fn is_symmetric(&self, rel: f64) -> bool {
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= rel * scale))
    }

    /// tᵀΣt.
    pub fn quadratic_form(&self, t: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            s += t[i] * row.iter().zip(t).map(|(a, b)| a * b).sum::<f64>();
        }
        s
    }
}

/// Σ_N = N⁻¹ Σ X_i X_iᵀ.
pub fn sample_covariance(x: &SampleMatrix) -> CovMatrix {
    let mut data = gram(&x.data, x.n_rows, x.n_cols);
    let inv = 1.0 / x.n_rows as f64;
    for v in &mut data {
        *v *= inv;
    }
    CovMatrix { n: x.n_cols, data }
}

/// ‖Σ_N − Σ‖_{2→2}: the largest |eigenvalue| of the difference.
pub fn op_norm_deviation(sigma_n: &CovMatrix, sigma: &CovMatrix) -> Result<f64> {
    if sigma_n.n != sigma.n {
        return Err(Error::DimensionMismatch {
            expected: sigma_n.n,
            got: sigma.n,
        });
    }
    let diff: Vec<f64> = sigma_n.data.iter().zip(&sigma.data).map(|(a, b)| a - b).collect();
    let ev = symmetric_eigenvalues(diff, sigma.n)?;
    Ok(ev[0].abs().max(ev[sigma.n - 1].abs()))
}

/// max over t ∈ T of |N⁻¹ Σ ⟨X_i,t⟩² − target(t)|; the default target is
/// ‖t‖₂² (isotropic law).
pub fn quadratic_sup_finite(x: &SampleMatrix, t: &[Vec<f64>], targets: Option<&[f64]>) -> Result<f64> {
    if t.is_empty() {
        return invalid("index set T is empty");
    }
    if let Some(tg) = targets {
        if tg.len() != t.len() {
            return Err(Error::DimensionMismatch {
                expected: t.len(),
                got: tg.len(),
            });
        }
    }
    let n_inv = 1.0 / x.n_rows as f64;
    let mut best = 0.0f64;
    for (j, tj) in t.iter().enumerate() {
        if tj.len() != x.n_cols {
            return Err(Error::DimensionMismatch {
                expected: x.n_cols,
                got: tj.len(),
            });
        }
        let target = match targets {
            Some(tg) => tg[j],
            None => tj.iter().map(|v| v * v).sum(),
        };
        let support: Vec<(usize, f64)> =
            tj.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
        let mut acc = 0.0;
        for row in x.rows() {
            let ip: f64 = support.iter().map(|&(k, v)| row[k] * v).sum();
            acc += ip * ip;
        }
        best = best.max((acc * n_inv - target).abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{sample_matrix, DistributionSpec};

    #[test]
    fn identity_and_diag() {
        let s = extreme_singulars(&Matrix::identity(4)).unwrap();
        assert_eq!((s.s_min, s.s_max), (1.0, 1.0));
        let s = extreme_singulars(&Matrix::diag(&[3.0, 1.0])).unwrap();
        assert!((s.s_min - 1.0).abs() < 1e-14 && (s.s_max - 3.0).abs() < 1e-14);
    }

    #[test]
    fn wide_and_nonfinite_rejected() {
        assert!(extreme_singulars(&Matrix::zeros(2, 3)).is_err());
        let m = Matrix::new(2, 1, vec![1.0, f64::NAN]).unwrap();
        assert!(matches!(extreme_singulars(&m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn jacobi_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let ev = symmetric_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        // tridiagonal (2,−1) of size n has eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 9;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = -1.0;
                a[(i + 1) * n + i] = -1.0;
            }
        }
        let ev = symmetric_eigenvalues(a, n).unwrap();
        for (k, e) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((e - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_examples() {
        let r2 = 2f64.sqrt();
        let x = SampleMatrix::from_rows(
            &[vec![r2, 0.0], vec![0.0, r2]],
            DistributionSpec::coordinate(),
            0,
        )
        .unwrap();
        let s = sample_covariance(&x);
        for (a, b) in s.data.iter().zip(&CovMatrix::identity(2).data) {
            assert!((a - b).abs() < 1e-15);
        }
        let one = SampleMatrix::from_rows(&[vec![1.0, -2.0, 3.0]], DistributionSpec::gaussian(), 0)
            .unwrap();
        let s = sample_covariance(&one);
        assert_eq!(s.get(0, 1), -2.0);
        assert_eq!(s.get(2, 2), 9.0);
        assert_eq!(s.get(1, 2), -6.0);
    }

    #[test]
    fn trace_identity() {
        let x = sample_matrix(&DistributionSpec::gaussian(), 37, 6, 4).unwrap();
        let s = sample_covariance(&x);
        let direct = x.rows().map(|r| r.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / 37.0;
        assert!((s.trace() - direct).abs() < 1e-12 * direct);
        assert!(s.is_symmetric(1e-12));
    }

    #[test]
    fn deviation_examples() {
        let i3 = CovMatrix::identity(3);
        assert_eq!(op_norm_deviation(&i3, &i3).unwrap(), 0.0);
        let two = CovMatrix::scaled_identity(3, 2.0);
        assert!((op_norm_deviation(&two, &i3).unwrap() - 1.0).abs() < 1e-15);
        assert!(op_norm_deviation(&two, &CovMatrix::identity(2)).is_err());
    }

    #[test]
    fn deviation_equals_singular_edges() {
        let (n, big_n) = (20, 2000);
        let x = sample_matrix(&DistributionSpec::gaussian(), big_n, n, 5).unwrap();
        let dev = op_norm_deviation(&sample_covariance(&x), &CovMatrix::identity(n)).unwrap();
        let g = Matrix::from(&x).scaled(1.0 / (big_n as f64).sqrt());
        let s = extreme_singulars(&g).unwrap();
        let via_s = (s.s_max * s.s_max - 1.0).abs().max((1.0 - s.s_min * s.s_min).abs());
        assert!((dev - via_s).abs() < 1e-10, "{dev} vs {via_s}");
    }

    #[test]
    fn quadratic_sup_examples() {
        let r2 = 2f64.sqrt();
        let x = SampleMatrix::from_rows(
            &[vec![r2, 0.0], vec![0.0, r2]],
            DistributionSpec::coordinate(),
            0,
        )
        .unwrap();
        assert!(quadratic_sup_finite(&x, &[vec![1.0, 0.0]], None).unwrap() < 1e-15);
        assert_eq!(quadratic_sup_finite(&x, &[vec![0.0, 0.0]], None).unwrap(), 0.0);
        assert!(quadratic_sup_finite(&x, &[], None).is_err());
        assert!(quadratic_sup_finite(&x, &[vec![1.0]], None).is_err());
    }

    #[test]
    fn quadratic_sup_signed_coordinates_column_oracle() {
        let x = sample_matrix(&DistributionSpec::student_t(6.0, 8.0), 300, 7, 2).unwrap();
        let mut t = Vec::new();
        for j in 0..7 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 7];
                v[j] = s;
                t.push(v);
            }
        }
        let lhs = quadratic_sup_finite(&x, &t, None).unwrap();
        let oracle = (0..7)
            .map(|j| ((0..300).map(|i| x.get(i, j).powi(2)).sum::<f64>() / 300.0 - 1.0).abs())
            .fold(0.0, f64::max);
        assert!((lhs - oracle).abs() < 1e-12);
    }
}
