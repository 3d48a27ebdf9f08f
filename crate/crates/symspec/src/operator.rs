//! Dense real/complex operators, complexification, the circle-max norm on the
//! complexified space, and resolvent evaluation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lu::LuFactorization;

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealOperator {
    n: usize,
    entries: Vec<f64>,
}

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    n: usize,
    entries: Vec<Complex64>,
}

/// Element x + iy of the complexified space, stored as explicit real and
/// imaginary part vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Base norm on the underlying real space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseNormKind {
    Euclidean,
    Sup,
    One,
}

impl BaseNormKind {
    pub fn apply(&self, v: &[f64]) -> f64 {
        match self {
            BaseNormKind::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            BaseNormKind::Sup => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            BaseNormKind::One => v.iter().map(|x| x.abs()).sum(),
        }
    }
}

fn check_finite_real(entries: &[f64]) -> Result<()> {
    if entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    Ok(())
}

impl RealOperator {
    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {}x{} = {} entries, got {}",
                n,
                n,
                n * n,
                entries.len()
            )));
        }
        check_finite_real(&entries)?;
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.entries[i * n + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self { n: self.n, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self { n: self.n, entries }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect()
    }

    /// Entrywise max norm.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.entries[i * self.n + i]).sum()
    }
}

fn check_finite_complex(entries: &[Complex64]) -> Result<()> {
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    Ok(())
}

impl ComplexOperator {
    pub fn from_row_major(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {}x{} = {} entries, got {}",
                n,
                n,
                n * n,
                entries.len()
            )));
        }
        check_finite_complex(&entries)?;
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self { n: self.n, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self { n: self.n, entries }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// Entrywise complex conjugate. In canonical coordinates this is the
    /// conjugation J acting on operators: conj(A) = J A J.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect()
    }

    /// Entrywise max norm (max modulus).
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.entries[i * self.n + i]).sum()
    }

    /// Largest imaginary-part modulus over all entries.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Drops imaginary parts.
    pub fn real_part(&self) -> RealOperator {
        RealOperator {
            n: self.n,
            entries: self.entries.iter().map(|z| z.re).collect(),
        }
    }
}

impl ComplexVector {
    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::InvalidArgument(format!(
                "real part has length {}, imaginary part {}",
                re.len(),
                im.len()
            )));
        }
        check_finite_real(&re)?;
        check_finite_real(&im)?;
        Ok(Self { re, im })
    }

    pub fn from_complex(v: &[Complex64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> &[f64] {
        &self.im
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect()
    }
}

/// Entrywise embedding of a real operator into the complexified space:
/// the returned matrix sends x + iy to Tx + iTy.
pub fn complexify(t: &RealOperator) -> ComplexOperator {
    ComplexOperator {
        n: t.n,
        entries: t.entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    }
}

/// The conjugation J(x + iy) = x - iy.
pub fn conjugate_vector(z: &ComplexVector) -> ComplexVector {
    ComplexVector {
        re: z.re.clone(),
        im: z.im.iter().map(|y| -y).collect(),
    }
}

/// Norm on the complexification: max over |λ| = 1 of
/// sqrt(‖Re(λz)‖² + ‖Im(λz)‖²), with the base norm taken on each part.
///
/// The maximum is located on a uniform grid of `grid_size` angles and then
/// refined by golden-section search over the best grid cell and its
/// immediate neighbours.
pub fn complexification_norm(z: &ComplexVector, base: BaseNormKind, grid_size: usize) -> Result<f64> {
    if grid_size < 8 {
        return Err(Error::InvalidArgument(format!(
            "grid_size must be at least 8, got {grid_size}"
        )));
    }
    let objective = |phi: f64| -> f64 {
        let (s, c) = phi.sin_cos();
        // e^{iφ}(x + iy) = (cx - sy) + i(sx + cy)
        let re_part: Vec<f64> = z
            .re
            .iter()
            .zip(&z.im)
            .map(|(&x, &y)| c * x - s * y)
            .collect();
        let im_part: Vec<f64> = z
            .re
            .iter()
            .zip(&z.im)
            .map(|(&x, &y)| s * x + c * y)
            .collect();
        let a = base.apply(&re_part);
        let b = base.apply(&im_part);
        a * a + b * b
    };

    let step = std::f64::consts::TAU / grid_size as f64;
    let mut best_phi = 0.0;
    let mut best = f64::MIN;
    for k in 0..grid_size {
        let phi = k as f64 * step;
        let v = objective(phi);
        if v > best {
            best = v;
            best_phi = phi;
        }
    }

    // Golden-section refinement over [best - step, best + step], keeping the
    // best value ever evaluated so refinement can only improve on the grid.
    let inv_phi = 0.618_033_988_749_894_9;
    let mut lo = best_phi - step;
    let mut hi = best_phi + step;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..80 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
        best = best.max(f1).max(f2);
    }
    Ok(best.max(0.0).sqrt())
}

/// Solves (λI - A) w = v. Errors with `SingularShift` when λ is numerically
/// in the spectrum.
pub fn resolvent_solve(a: &ComplexOperator, lambda: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
    let lu = LuFactorization::shifted(a, lambda)?;
    Ok(lu.solve(v))
}

/// Full resolvent matrix R(λ, A) = (λI - A)^{-1}.
pub fn resolvent_matrix(a: &ComplexOperator, lambda: Complex64) -> Result<ComplexOperator> {
    let lu = LuFactorization::shifted(a, lambda)?;
    Ok(lu.solve_identity())
}

/// Entrywise-max defect of the identity R(λ̄, T_C) = J ∘ R(λ, T_C) ∘ J,
/// with J realised as entrywise conjugation.
pub fn conjugation_identity_residual(t: &RealOperator, lambda: Complex64) -> Result<f64> {
    let tc = complexify(t);
    let r_conj_shift = resolvent_matrix(&tc, lambda.conj())?;
    let r = resolvent_matrix(&tc, lambda)?;
    Ok(r_conj_shift.sub(&r.conj()).max_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen::rotation_block;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_real(n: usize, rng: &mut ChaCha8Rng) -> RealOperator {
        let entries = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        RealOperator::from_row_major(n, entries).unwrap()
    }

    #[test]
    fn complexify_identity() {
        let id = RealOperator::identity(2);
        assert_eq!(complexify(&id), ComplexOperator::identity(2));
    }

    #[test]
    fn complexify_rotation_is_entrywise() {
        let r = rotation_block(std::f64::consts::PI / 3.0);
        let rc = complexify(&r);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(rc.get(i, j).re, r.get(i, j));
                assert_eq!(rc.get(i, j).im, 0.0);
            }
        }
    }

    #[test]
    fn complexify_acts_as_tx_plus_ity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 5;
        let t = random_real(n, &mut rng);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z = ComplexVector::new(x.clone(), y.clone()).unwrap();
        let lhs = complexify(&t).apply(&z.to_complex());
        let tx = t.apply(&x);
        let ty = t.apply(&y);
        for i in 0..n {
            assert_abs_diff_eq!(lhs[i].re, tx[i], epsilon = 1e-14);
            assert_abs_diff_eq!(lhs[i].im, ty[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn conjugation_flips_imaginary_part() {
        let z = ComplexVector::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let j = conjugate_vector(&z);
        assert_eq!(j.re(), &[1.0, 0.0]);
        assert_eq!(j.im(), &[0.0, -1.0]);
        assert_eq!(conjugate_vector(&j), z);
    }

    #[test]
    fn conjugation_fixes_real_vectors() {
        let z = ComplexVector::new(vec![2.0, -3.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(conjugate_vector(&z), z);
    }

    #[test]
    fn conjugation_commutes_with_complexified_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        let t = random_real(n, &mut rng);
        let tc = complexify(&t);
        let z = ComplexVector::new(
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let lhs = tc.apply(&conjugate_vector(&z).to_complex());
        let rhs: Vec<Complex64> = tc.apply(&z.to_complex()).iter().map(|w| w.conj()).collect();
        for i in 0..n {
            assert_abs_diff_eq!(lhs[i].re, rhs[i].re, epsilon = 1e-14);
            assert_abs_diff_eq!(lhs[i].im, rhs[i].im, epsilon = 1e-14);
        }
    }

    #[test]
    fn euclidean_norm_is_direct_sum_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = 8;
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let z = ComplexVector::new(x.clone(), y.clone()).unwrap();
            let direct = (x.iter().map(|v| v * v).sum::<f64>() + y.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let norm = complexification_norm(&z, BaseNormKind::Euclidean, 64).unwrap();
            assert_abs_diff_eq!(norm, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn sup_norm_of_real_unit_vector() {
        let z = ComplexVector::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let norm = complexification_norm(&z, BaseNormKind::Sup, 256).unwrap();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sup_norm_of_e1_plus_ie2() {
        // Dense-grid oracle for ((1,0),(0,1)) gives sqrt(2), attained at φ = 0.
        let z = ComplexVector::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let norm = complexification_norm(&z, BaseNormKind::Sup, 256).unwrap();
        assert_abs_diff_eq!(norm, 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn norm_rejects_small_grid() {
        let z = ComplexVector::new(vec![1.0], vec![0.0]).unwrap();
        assert!(matches!(
            complexification_norm(&z, BaseNormKind::Sup, 7),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn resolvent_of_zero_operator() {
        let a = ComplexOperator::zeros(3);
        let mut v = vec![Complex64::ZERO; 3];
        v[0] = Complex64::ONE;
        let w = resolvent_solve(&a, Complex64::new(2.0, 0.0), &v).unwrap();
        assert_abs_diff_eq!(w[0].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(w[0].im, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn resolvent_rejects_eigenvalue_shift() {
        let theta = std::f64::consts::PI / 3.0;
        let a = complexify(&rotation_block(theta));
        let lambda = Complex64::new(theta.cos(), theta.sin());
        let v = vec![Complex64::ONE, Complex64::ZERO];
        assert!(matches!(
            resolvent_solve(&a, lambda, &v),
            Err(Error::SingularShift { .. })
        ));
    }

    #[test]
    fn resolvent_residual_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let n = 6;
        let t = random_real(n, &mut rng);
        let a = complexify(&t);
        let lambda = Complex64::new(3.0 + a.max_norm() * n as f64, 0.0);
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let w = resolvent_solve(&a, lambda, &v).unwrap();
        // residual (λI - A)w - v
        let shifted = ComplexOperator::identity(n).scale(lambda).sub(&a);
        let back = shifted.apply(&w);
        let res: f64 = back
            .iter()
            .zip(&v)
            .map(|(b, vi)| (b - vi).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let wnorm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(res <= 1e-10 * (lambda.norm() + a.max_norm() * n as f64) * wnorm.max(1e-30));
    }

    #[test]
    fn conjugation_identity_real_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let t = random_real(4, &mut rng);
        let res = conjugation_identity_residual(&t, Complex64::new(9.0, 0.0)).unwrap();
        assert!(res <= 1e-13);
    }

    #[test]
    fn conjugation_identity_rotation() {
        let t = rotation_block(std::f64::consts::PI / 3.0);
        let res = conjugation_identity_residual(&t, Complex64::new(0.0, 2.0)).unwrap();
        assert!(res <= 1e-12);
    }

    #[test]
    fn first_resolvent_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 5;
        let t = random_real(n, &mut rng);
        let a = complexify(&t);
        let lambda = Complex64::new(4.0, 1.0);
        let mu = Complex64::new(-3.0, 2.0);
        let rl = resolvent_matrix(&a, lambda).unwrap();
        let rm = resolvent_matrix(&a, mu).unwrap();
        let lhs = rl.sub(&rm);
        let rhs = rl.matmul(&rm).scale(mu - lambda);
        let tol = 1e-9 * rl.max_norm() * rm.max_norm() * n as f64;
        assert!(lhs.sub(&rhs).max_norm() <= tol);
    }
}
