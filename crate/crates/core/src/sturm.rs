//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.
//!
//! The count of negative pivots in the LDL^T factorisation of `T - x I`
//! equals the number of eigenvalues strictly below `x`; bisection on that
//! count isolates each eigenvalue independently.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Absolute tolerance used by the 1-D solvers.
pub const BISECTION_TOL: f64 = 1e-10;

const MAX_BISECTION_STEPS: usize = 256;

/// Real symmetric tridiagonal matrix given by its diagonal and
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    off_sq: Vec<f64>,
    pivmin: f64,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return invalid("tridiagonal matrix must be non-empty");
        }
        if off.len() + 1 != diag.len() {
            return invalid(format!(
                "off-diagonal length {} does not match diagonal length {}",
                off.len(),
                diag.len()
            ));
        }
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
            return invalid("tridiagonal entries must be finite");
        }
        let off_sq: Vec<f64> = off.iter().map(|b| b * b).collect();
        let max_sq = off_sq.iter().copied().fold(1.0f64, f64::max);
        Ok(SymTridiagonal {
            diag,
            off,
            off_sq,
            pivmin: f64::MIN_POSITIVE * max_sq,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly less than `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() <= self.pivmin {
            q = -self.pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            q = self.diag[i] - x - self.off_sq[i - 1] / q;
            if q.abs() <= self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) to absolute tolerance
    /// `tol`.
    pub fn eigenvalue(&self, index: usize, tol: f64) -> Result<f64> {
        if index >= self.dim() {
            return Err(Error::TooManyEigenvalues {
                requested: index + 1,
                available: self.dim(),
            });
        }
        let (g_lo, g_hi) = self.gershgorin();
        let pad = tol + f64::EPSILON * g_lo.abs().max(g_hi.abs()) * 4.0;
        // invariant: count_below(lo) <= index < count_below(hi)
        let mut lo = g_lo - pad;
        let mut hi = g_hi + pad;
        for _ in 0..MAX_BISECTION_STEPS {
            if hi - lo <= tol {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                // interval is at floating-point resolution
                return Ok(mid);
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::BisectionFailed { index })
    }

    /// The `count` smallest eigenvalues in increasing order. Indices are
    /// bisected independently and in parallel.
    pub fn smallest_eigenvalues(&self, count: usize, tol: f64) -> Result<Vec<f64>> {
        if count > self.dim() {
            return Err(Error::TooManyEigenvalues {
                requested: count,
                available: self.dim(),
            });
        }
        let mut values = (0..count)
            .into_par_iter()
            .map(|k| self.eigenvalue(k, tol))
            .collect::<Result<Vec<_>>>()?;
        // bisection results are monotone in the index up to tol; enforce it
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                values[i] = values[i - 1];
            }
        }
        Ok(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense symmetric eigenvalues by cyclic Jacobi rotations; independent of
    /// the Sturm path.
    fn jacobi_eigenvalues(t: &SymTridiagonal) -> Vec<f64> {
        let n = t.dim();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = t.diag()[i];
            if i + 1 < n {
                a[i][i + 1] = t.off()[i];
                a[i + 1][i] = t.off()[i];
            }
        }
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i][j] * a[i][j];
                }
            }
            if off < 1e-26 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn discrete_laplacian_closed_form() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let t = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let ev = t.smallest_eigenvalues(n, 1e-12).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-11, "k={k} {v} vs {exact}");
        }
    }

    #[test]
    fn rejects_mismatched_lengths_and_excess_requests() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        let t = SymTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            t.smallest_eigenvalues(4, 1e-10),
            Err(Error::TooManyEigenvalues {
                requested: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn handles_zero_offdiagonal_blocks() {
        let t = SymTridiagonal::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let ev = t.smallest_eigenvalues(3, 1e-12).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-11);
        assert!((ev[1] - 2.0).abs() < 1e-11);
        assert!((ev[2] - 3.0).abs() < 1e-11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn agrees_with_jacobi_and_counts_bracket(
            diag in proptest::collection::vec(-5.0f64..5.0, 2..12),
            seed in proptest::collection::vec(-2.0f64..2.0, 11),
        ) {
            let n = diag.len();
            let off = seed[..n - 1].to_vec();
            let t = SymTridiagonal::new(diag, off).unwrap();
            let ev = t.smallest_eigenvalues(n, 1e-12).unwrap();
            let reference = jacobi_eigenvalues(&t);
            for (a, b) in ev.iter().zip(&reference) {
                prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
            // the Sturm count at any threshold equals the number of eigenvalues below it
            for x in [-7.0, -1.0, 0.0, 0.5, 3.0, 9.0] {
                let expected = reference.iter().filter(|&&v| v < x - 1e-9).count();
                let upper = reference.iter().filter(|&&v| v < x + 1e-9).count();
                let c = t.count_below(x);
                prop_assert!(c >= expected && c <= upper);
            }
        }
    }
}
