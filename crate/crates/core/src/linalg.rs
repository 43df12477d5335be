//! Small dense complex linear-algebra helpers shared by the flattening and
//! witness code.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Default relative singular-value threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values strictly above `tol * sigma_max`.
///
/// Returns 0 for the zero matrix.
pub fn numerical_rank(m: &CMatrix, tol: f64) -> usize {
    rank_of_spectrum(&singular_values(m), tol)
}

pub(crate) fn rank_of_spectrum(sv: &[f64], tol: f64) -> usize {
    match sv.first() {
        Some(&max) if max > 0.0 => sv.iter().filter(|&&s| s > tol * max).count(),
        _ => 0,
    }
}

/// Smallest ratio `sigma / (tol * sigma_max)` over the retained singular values
/// and largest over the discarded ones. Values near 1 mean the rank decision
/// sits close to the threshold.
pub fn threshold_margins(sv: &[f64], tol: f64) -> (Option<f64>, Option<f64>) {
    let Some(&max) = sv.first() else {
        return (None, None);
    };
    if max <= 0.0 {
        return (None, None);
    }
    let cut = tol * max;
    let kept = sv.iter().filter(|&&s| s > cut).map(|s| s / cut).reduce(f64::min);
    let dropped = sv.iter().filter(|&&s| s <= cut).map(|s| s / cut).reduce(f64::max);
    (kept, dropped)
}

pub fn determinant(m: &CMatrix) -> Complex64 {
    m.clone().determinant()
}

pub fn frobenius_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_has_full_rank() {
        let id = CMatrix::identity(3, 3);
        assert_eq!(numerical_rank(&id, DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let z = CMatrix::zeros(4, 2);
        assert_eq!(numerical_rank(&z, DEFAULT_RANK_TOL), 0);
    }

    #[test]
    fn outer_product_has_rank_one() {
        let u = [c(0.3), Complex64::new(-1.2, 0.4), c(2.0)];
        let v = [Complex64::new(0.0, 1.0), c(0.7), c(-0.1), c(5.0)];
        let m = CMatrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        assert_eq!(numerical_rank(&m, DEFAULT_RANK_TOL), 1);
    }

    #[test]
    fn relative_threshold_is_scale_invariant() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1e-6), c(1e-12)]));
        assert_eq!(numerical_rank(&m, 1e-8), 2);
        assert_eq!(numerical_rank(&(m * c(1e-30)), 1e-8), 2);
    }

    #[test]
    fn margins_report_both_sides() {
        let (kept, dropped) = threshold_margins(&[1.0, 1e-3, 1e-12], 1e-8);
        assert!((kept.unwrap() - 1e5).abs() < 1e-6);
        assert!((dropped.unwrap() - 1e-4).abs() < 1e-12);
    }
}
