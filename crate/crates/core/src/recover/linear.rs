use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::moments::gaussian_moment;

/// Solution of a small dense linear stage.
#[derive(Clone, Debug)]
pub struct LinearSolve {
    pub x: Vec<f64>,
    pub condition: f64,
    /// `‖Ax − b‖∞ / (1 + ‖b‖∞)`.
    pub residual: f64,
}

/// Solves `A x = b` by column-pivoted QR; the 2-norm condition number is
/// taken from the singular values.
pub fn solve_dense(a: DMatrix<f64>, b: DVector<f64>, max_condition: f64, stage: &str) -> Result<LinearSolve> {
    let sv = a.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let singular = || Error::SingularLinearSystem {
        stage: stage.to_string(),
        condition,
    };
    if !(condition <= max_condition) {
        return Err(singular());
    }
    let x = a.clone().col_piv_qr().solve(&b).ok_or_else(singular)?;
    let r = &a * &x - &b;
    let residual = r.amax() / (1.0 + b.amax());
    Ok(LinearSolve {
        x: x.iter().cloned().collect(),
        condition,
        residual,
    })
}

/// Cross-covariance equations for one pair `(i, j)`, `c = 1..k`:
///
/// `m_{c eᵢ + eⱼ} = Σ_ℓ λ_ℓ [µ_{ℓj} M_c(µ_{ℓi}, σ_{ℓii}) + c σ_{ℓij} M_{c−1}(µ_{ℓi}, σ_{ℓii})]`
///
/// returned as `(A, b)` with unknowns `σ_{1ij} … σ_{kij}`.
pub fn cross_covariance_system(
    weights: &[f64],
    mean_i: &[f64],
    var_i: &[f64],
    mean_j: &[f64],
    moments: &[f64],
) -> (DMatrix<f64>, DVector<f64>) {
    let k = weights.len();
    let mut a = DMatrix::zeros(k, k);
    let mut b = DVector::zeros(k);
    for c in 1..=k {
        let mut rhs = moments[c - 1];
        for l in 0..k {
            a[(c - 1, l)] = weights[l] * c as f64 * gaussian_moment(c - 1, &mean_i[l], &var_i[l]);
            rhs -= weights[l] * mean_j[l] * gaussian_moment(c, &mean_i[l], &var_i[l]);
        }
        b[c - 1] = rhs;
    }
    (a, b)
}

/// Mean equations for coordinate `i` with uniform weights and a shared
/// known covariance, `c = 0..k−1`:
///
/// `m_{c e₁ + eᵢ} = Σ_ℓ (1/k) [µ_{ℓi} M_c(µ_{ℓ1}, σ̄₁₁) + c σ̄₁ᵢ M_{c−1}(µ_{ℓ1}, σ̄₁₁)]`
///
/// returned as `(A, b)` with unknowns `µ_{1i} … µ_{ki}`.
pub fn uniform_mean_system(mean_1: &[f64], var_11: f64, cov_1i: f64, moments: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let k = mean_1.len();
    let w = 1.0 / k as f64;
    let mut a = DMatrix::zeros(k, k);
    let mut b = DVector::zeros(k);
    for c in 0..k {
        let mut rhs = moments[c];
        for l in 0..k {
            a[(c, l)] = w * gaussian_moment(c, &mean_1[l], &var_11);
            if c > 0 {
                rhs -= w * c as f64 * cov_1i * gaussian_moment(c - 1, &mean_1[l], &var_11);
            }
        }
        b[c] = rhs;
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ill_conditioned_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 + 1e-14]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(
            solve_dense(a, b, 1e12, "test"),
            Err(Error::SingularLinearSystem { .. })
        ));
    }

    #[test]
    fn solves_well_posed() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![3.0, 5.0]);
        let s = solve_dense(a, b, 1e12, "test").unwrap();
        assert!((s.x[0] - 0.8).abs() < 1e-14 && (s.x[1] - 1.4).abs() < 1e-14);
        assert!(s.residual < 1e-15);
    }
}
