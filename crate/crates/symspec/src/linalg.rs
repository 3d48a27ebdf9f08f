//! SVD-backed helpers: spectral norms, rank-revealing orthonormal bases,
//! and principal angles. Dense factorizations are delegated to nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::operator::{ComplexOperator, RealOperator};

/// Matrix size below which spectral norms use a full SVD; larger matrices
/// fall back to power iteration on AᴴA.
const SVD_NORM_LIMIT: usize = 64;

pub fn na_from_complex(m: &ComplexOperator) -> DMatrix<Complex64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

pub fn na_from_real(m: &RealOperator) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

pub fn complex_from_na(m: &DMatrix<Complex64>) -> ComplexOperator {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    let mut out = ComplexOperator::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, m[(i, j)]);
        }
    }
    out
}

/// Stacks column vectors (each of length `n`) into an n×r matrix.
pub fn na_from_columns(n: usize, cols: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

pub fn na_from_columns_real(n: usize, cols: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Largest singular value of a complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows().max(m.ncols()) < SVD_NORM_LIMIT {
        m.clone().singular_values().max()
    } else {
        power_iteration_norm(m)
    }
}

pub fn spectral_norm_complex(m: &ComplexOperator) -> f64 {
    spectral_norm(&na_from_complex(m))
}

pub fn spectral_norm_real(m: &RealOperator) -> f64 {
    let na = na_from_real(m);
    if na.nrows() < SVD_NORM_LIMIT {
        na.singular_values().max()
    } else {
        let c = na.map(|x| Complex64::new(x, 0.0));
        power_iteration_norm(&c)
    }
}

/// Power iteration on AᴴA with a deterministic start vector. Enough for
/// norm estimates; exact SVD covers the sizes the tests care about.
fn power_iteration_norm(m: &DMatrix<Complex64>) -> f64 {
    let ncols = m.ncols();
    let mut v: Vec<Complex64> = (0..ncols)
        .map(|i| Complex64::new(1.0 + (i as f64 + 1.0).sqrt(), 0.0))
        .collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut sigma = 0.0;
    for _ in 0..100 {
        // w = Av, u = Aᴴw
        let mut w = vec![Complex64::ZERO; m.nrows()];
        for (j, vj) in v.iter().enumerate() {
            if *vj == Complex64::ZERO {
                continue;
            }
            for i in 0..m.nrows() {
                w[i] += m[(i, j)] * vj;
            }
        }
        let mut u = vec![Complex64::ZERO; ncols];
        for (i, wi) in w.iter().enumerate() {
            if *wi == Complex64::ZERO {
                continue;
            }
            for j in 0..ncols {
                u[j] += m[(i, j)].conj() * wi;
            }
        }
        let nu = norm(&u);
        if nu == 0.0 {
            return 0.0;
        }
        let new_sigma = nu.sqrt();
        let done = (new_sigma - sigma).abs() <= 1e-13 * new_sigma.max(1.0);
        sigma = new_sigma;
        u.iter_mut().for_each(|z| *z /= nu);
        v = u;
        if done {
            break;
        }
    }
    sigma
}

/// Columns of U whose singular values exceed `tol_rel`·σ₁, i.e. an
/// orthonormal basis of the numerical range.
pub fn range_columns(m: &DMatrix<Complex64>, tol_rel: f64) -> Vec<Vec<Complex64>> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("u requested");
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    let mut cols = Vec::new();
    if smax <= 0.0 {
        return cols;
    }
    for (k, &sk) in s.iter().enumerate() {
        if sk > tol_rel * smax {
            cols.push(u.column(k).iter().cloned().collect());
        }
    }
    cols
}

/// Right singular vectors with σ ≤ tol_rel·σ₁: an orthonormal basis of the
/// numerical null space.
pub fn null_columns(m: &DMatrix<Complex64>, tol_rel: f64) -> Vec<Vec<Complex64>> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    let mut cols = Vec::new();
    for (k, &sk) in s.iter().enumerate() {
        if smax <= 0.0 || sk <= tol_rel * smax {
            // rows of Vᴴ are the right singular vectors, conjugated
            cols.push(vt.row(k).iter().map(|z| z.conj()).collect());
        }
    }
    cols
}

/// Real counterpart of [`range_columns`].
pub fn range_columns_real(m: &DMatrix<f64>, tol_rel: f64) -> Vec<Vec<f64>> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("u requested");
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    let mut cols = Vec::new();
    if smax <= 0.0 {
        return cols;
    }
    for (k, &sk) in s.iter().enumerate() {
        if sk > tol_rel * smax {
            cols.push(u.column(k).iter().cloned().collect());
        }
    }
    cols
}

/// Numerical rank at a relative threshold.
pub fn rank(m: &DMatrix<Complex64>, tol_rel: f64) -> usize {
    let s = m.clone().singular_values();
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    if smax <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&sk| sk > tol_rel * smax).count()
}

pub fn rank_real(m: &DMatrix<f64>, tol_rel: f64) -> usize {
    let s = m.clone().singular_values();
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    if smax <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&sk| sk > tol_rel * smax).count()
}

/// Largest principal angle between the spans of two orthonormal column sets,
/// computed through sin θ = ‖(I − Q₁Q₁ᴴ)Q₂‖₂ so tiny angles stay resolvable.
pub fn largest_principal_angle(q1: &DMatrix<Complex64>, q2: &DMatrix<Complex64>) -> f64 {
    assert_eq!(q1.nrows(), q2.nrows());
    let proj = q1 * (q1.adjoint() * q2);
    let defect = q2 - proj;
    spectral_norm(&defect).min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spectral_norm_of_diag() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-5.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]));
        assert_abs_diff_eq!(spectral_norm(&m), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let n = 20;
        let m = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64 - 2.0)
        });
        let exact = m.clone().singular_values().max();
        let approx = power_iteration_norm(&m);
        assert_abs_diff_eq!(exact, approx, epsilon = 1e-8 * exact);
    }

    #[test]
    fn range_of_zero_matrix_is_empty() {
        let m = DMatrix::<Complex64>::zeros(4, 4);
        assert!(range_columns(&m, 1e-8).is_empty());
        assert_eq!(rank(&m, 1e-8), 0);
    }

    #[test]
    fn null_space_of_projector() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::ONE;
        let null = null_columns(&m, 1e-8);
        assert_eq!(null.len(), 1);
        assert_abs_diff_eq!(null[0][1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn principal_angle_of_identical_spans_is_zero() {
        let q = DMatrix::from_fn(4, 2, |i, j| {
            if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        assert!(largest_principal_angle(&q, &q) <= 1e-14);
    }

    #[test]
    fn principal_angle_orthogonal_spans() {
        let q1 = DMatrix::from_fn(4, 1, |i, _| if i == 0 { Complex64::ONE } else { Complex64::ZERO });
        let q2 = DMatrix::from_fn(4, 1, |i, _| if i == 1 { Complex64::ONE } else { Complex64::ZERO });
        assert_abs_diff_eq!(
            largest_principal_angle(&q1, &q2),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-12
        );
    }
}
