//! Small polynomial utilities: Horner evaluation and simultaneous
//! Newton (Durand–Kerner) root finding for low-degree polynomials.

use num_complex::Complex64;

/// Evaluates Σ coeffs[k]·z^k (coefficients in ascending order).
pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub fn eval_complex(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// All complex roots of a real-coefficient polynomial, by Durand–Kerner
/// iteration on the monic rescaling. Intended for low degrees (weight
/// denominators, characteristic polynomials of small matrices).
///
/// Returns `None` when the iteration fails to settle, or for degenerate
/// input (zero polynomial).
pub fn roots(coeffs: &[f64]) -> Option<Vec<Complex64>> {
    // strip trailing zero coefficients
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == 0.0 {
        deg -= 1;
    }
    if deg == 0 {
        return None;
    }
    let deg = deg - 1;
    if deg == 0 {
        return Some(Vec::new());
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = (0..=deg)
        .map(|k| Complex64::new(coeffs[k] / lead, 0.0))
        .collect();

    // standard non-real, non-root-of-unity starting points
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32 + 1)).collect();
    let scale = monic
        .iter()
        .map(|c| c.norm())
        .fold(1.0f64, f64::max);

    for _ in 0..500 {
        let mut shift_max = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::ONE;
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom == Complex64::ZERO {
                // perturb collided iterates
                z[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let delta = eval_complex(&monic, z[i]) / denom;
            z[i] -= delta;
            shift_max = shift_max.max(delta.norm());
        }
        if shift_max <= 1e-14 * scale.max(1.0) {
            return Some(z);
        }
    }
    // accept if residuals are tiny even without step convergence
    let ok = z
        .iter()
        .all(|&zi| eval_complex(&monic, zi).norm() <= 1e-10 * scale.max(1.0));
    if ok {
        Some(z)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sort_by_re_im(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn quadratic_with_complex_pair() {
        // λ² - λ + 1 has roots e^{±iπ/3}
        let r = sort_by_re_im(roots(&[1.0, -1.0, 1.0]).unwrap());
        assert_abs_diff_eq!(r[0].re, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(r[0].im.abs(), (3.0f64).sqrt() / 2.0, epsilon = 1e-10);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn cubic_with_integer_roots() {
        // (λ-1)(λ-2)(λ-3) = λ³ - 6λ² + 11λ - 6
        let r = sort_by_re_im(roots(&[-6.0, 11.0, -6.0, 1.0]).unwrap());
        for (root, expect) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(root.re, expect, epsilon = 1e-8);
            assert_abs_diff_eq!(root.im, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn constant_has_no_roots() {
        assert_eq!(roots(&[2.0]).unwrap().len(), 0);
        assert!(roots(&[0.0]).is_none());
    }
}
