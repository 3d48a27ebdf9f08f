//! Deterministic generators for operators with known spectral structure, plus
//! an independent dense eigenvalue oracle (Hessenberg reduction followed by
//! shifted QR) used to audit the quadrature pipeline.
//!
//! The oracle shares no solver code with the contour-integration path, so
//! comparisons between the two are meaningful cross-checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::{ComplexOperator, RealOperator};

/// Largest dimension the oracle eigensolver accepts.
pub const ORACLE_DIM_LIMIT: usize = 64;

/// 2x2 counterclockwise rotation by `theta`, spectrum {e^{i theta}, e^{-i theta}}.
pub fn rotation_block(theta: f64) -> RealOperator {
    let (s, c) = theta.sin_cos();
    RealOperator::from_row_major(2, vec![c, -s, s, c]).expect("rotation entries are finite")
}

/// Block-diagonal assembly; the spectrum is the union of the block spectra.
pub fn direct_sum(blocks: &[RealOperator]) -> Result<RealOperator> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument(
            "direct_sum requires at least one block".into(),
        ));
    }
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut entries = vec![0.0; n * n];
    let mut offset = 0;
    for b in blocks {
        let m = b.dim();
        for i in 0..m {
            for j in 0..m {
                entries[(offset + i) * n + (offset + j)] = b.get(i, j);
            }
        }
        offset += m;
    }
    RealOperator::from_row_major(n, entries)
}

/// Companion matrix of (lambda^2 - 2 cos(theta) lambda + 1)^m, a real 2m x 2m
/// operator whose minimal polynomial is the defining polynomial, giving power
/// growth ||T^n|| ~ n^{m-1} on the unit circle.
pub fn jordan_companion(theta: f64, m: usize) -> Result<RealOperator> {
    if m < 1 {
        return Err(Error::InvalidArgument(
            "jordan_companion requires m >= 1".into(),
        ));
    }
    // ascending coefficients of (lambda^2 - 2cos(theta) lambda + 1)^m
    let base = [1.0, -2.0 * theta.cos(), 1.0];
    let mut coeffs = vec![1.0];
    for _ in 0..m {
        let mut next = vec![0.0; coeffs.len() + 2];
        for (i, a) in coeffs.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        coeffs = next;
    }
    let n = 2 * m;
    debug_assert_eq!(coeffs.len(), n + 1);
    debug_assert!((coeffs[n] - 1.0).abs() < 1e-15);
    let mut entries = vec![0.0; n * n];
    for i in 1..n {
        entries[i * n + (i - 1)] = 1.0;
    }
    for i in 0..n {
        entries[i * n + (n - 1)] = -coeffs[i];
    }
    RealOperator::from_row_major(n, entries)
}

/// Strictly lower triangular matrix with entries 1/n: a nilpotent discretized
/// integration operator whose whole spectrum sits at the origin.
pub fn volterra_matrix(n: usize) -> Result<RealOperator> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "volterra_matrix requires n >= 2".into(),
        ));
    }
    let v = 1.0 / n as f64;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            entries[i * n + j] = v;
        }
    }
    RealOperator::from_row_major(n, entries)
}

/// Seeded dense real operator with entries uniform in [-1, 1).
pub fn random_real_operator(n: usize, seed: u64) -> RealOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    RealOperator::from_row_major(n, entries).expect("uniform entries are finite")
}

/// Seeded complex vector with independent uniform real and imaginary parts.
pub fn random_complex_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// All eigenvalues of a dense complex matrix via Householder Hessenberg
/// reduction and Wilkinson-shifted QR iteration. Dimension capped at
/// [`ORACLE_DIM_LIMIT`]; eigenvectors are not computed.
pub fn oracle_eigen(a: &ComplexOperator) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if n > ORACLE_DIM_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "oracle eigensolver is limited to n <= {ORACLE_DIM_LIMIT}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).collect())
        .collect();
    hessenberg_in_place(&mut h);
    qr_eigenvalues(h)
}

fn hessenberg_in_place(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // Householder vector u annihilating column k below the subdiagonal
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[i][k]).collect();
        let beta = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if beta == 0.0 {
            continue;
        }
        let alpha = if x[0].norm() == 0.0 {
            Complex64::new(-beta, 0.0)
        } else {
            -(x[0] / x[0].norm()) * beta
        };
        let mut u = x;
        u[0] -= alpha;
        let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        if unorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / unorm2;
        // rows k+1..n: H <- (I - tau u u^H) H
        for j in 0..n {
            let mut w = Complex64::ZERO;
            for (i, ui) in u.iter().enumerate() {
                w += ui.conj() * h[k + 1 + i][j];
            }
            w *= tau;
            for (i, ui) in u.iter().enumerate() {
                h[k + 1 + i][j] -= ui * w;
            }
        }
        // columns k+1..n: H <- H (I - tau u u^H)
        for row in h.iter_mut() {
            let mut w = Complex64::ZERO;
            for (j, uj) in u.iter().enumerate() {
                w += row[k + 1 + j] * uj;
            }
            w *= tau;
            for (j, uj) in u.iter().enumerate() {
                row[k + 1 + j] -= w * uj.conj();
            }
        }
        // the transformation leaves exact zeros below the subdiagonal
        for i in k + 2..n {
            h[i][k] = Complex64::ZERO;
        }
    }
}

/// Eigenvalues of the trailing 2x2 block, ordered so the first is closer to
/// the (1,1) entry (the Wilkinson choice).
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let m1 = (tr + disc) / 2.0;
    let m2 = (tr - disc) / 2.0;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

fn qr_eigenvalues(mut h: Vec<Vec<Complex64>>) -> Result<Vec<Complex64>> {
    let n = h.len();
    let eps = f64::EPSILON;
    let hnorm: f64 = h
        .iter()
        .map(|r| r.iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        .max(1.0);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is rows/columns [0, hi)
    let mut sweeps_on_block = 0usize;
    let mut total_sweeps = 0usize;
    let sweep_cap = 60 * n.max(1);

    while hi > 0 {
        // deflate negligible subdiagonals
        let mut lo = hi - 1;
        while lo > 0 {
            let off = h[lo][lo - 1].norm();
            let local = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            let thresh = eps * if local > 0.0 { local } else { hnorm };
            if off <= thresh {
                h[lo][lo - 1] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs.push(h[hi - 1][hi - 1]);
            hi -= 1;
            sweeps_on_block = 0;
            continue;
        }
        if lo == hi - 2 {
            let (a, b) = (h[hi - 2][hi - 2], h[hi - 2][hi - 1]);
            let (c, d) = (h[hi - 1][hi - 2], h[hi - 1][hi - 1]);
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr - 4.0 * det).sqrt();
            eigs.push((tr + disc) / 2.0);
            eigs.push((tr - disc) / 2.0);
            hi -= 2;
            sweeps_on_block = 0;
            continue;
        }

        if total_sweeps >= sweep_cap {
            return Err(Error::NoConvergence {
                sweeps: total_sweeps,
            });
        }
        let mu = if sweeps_on_block > 0 && sweeps_on_block % 12 == 0 {
            // exceptional shift to break symmetry-induced stalls
            h[hi - 1][hi - 1] + Complex64::new(1.5 * h[hi - 1][hi - 2].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            )
        };
        qr_sweep(&mut h, lo, hi, mu);
        sweeps_on_block += 1;
        total_sweeps += 1;
    }
    Ok(eigs)
}

/// One explicit-shift QR step on the active Hessenberg block [lo, hi).
fn qr_sweep(h: &mut [Vec<Complex64>], lo: usize, hi: usize, mu: Complex64) {
    for i in lo..hi {
        h[i][i] -= mu;
    }
    // QR by Givens rotations on adjacent rows; store (c, s) per step
    let mut rotations = Vec::with_capacity(hi - lo - 1);
    for k in lo..hi - 1 {
        let a = h[k][k];
        let b = h[k + 1][k];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::ZERO)
        } else {
            (a.conj() / r, b.conj() / r)
        };
        for j in k..hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = c * x + s * y;
            h[k + 1][j] = -s.conj() * x + c.conj() * y;
        }
        rotations.push((c, s));
    }
    // multiply by the adjoints on the right, restoring Hessenberg form
    for (idx, (c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for row in h.iter_mut().take(top).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = x * c.conj() + y * s.conj();
            row[k + 1] = -x * *s + y * *c;
        }
    }
    for i in lo..hi {
        h[i][i] += mu;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::complexify;
    use crate::poly;

    /// Greedy multiset match: every `want` value has a distinct `got` partner
    /// within `tol`.
    fn assert_spectrum_matches(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut used = vec![false; got.len()];
        for w in want {
            let mut best: Option<(usize, f64)> = None;
            for (i, g) in got.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let d = (g - w).norm();
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            let (i, d) = best.expect("spectrum sizes match");
            assert!(d <= tol, "eigenvalue {w} unmatched, nearest distance {d:.3e}");
            used[i] = true;
        }
    }

    /// Characteristic polynomial coefficients (ascending) by the
    /// Faddeev-LeVerrier recursion; an oracle for the oracle at tiny sizes.
    fn char_poly_ascending(t: &RealOperator) -> Vec<f64> {
        let n = t.dim();
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        let mut m = RealOperator::identity(n);
        for k in 1..=n {
            let am = t.matmul(&m);
            let c = -am.trace() / k as f64;
            coeffs[n - k] = c;
            m = am.add(&RealOperator::identity(n).scale(c));
        }
        coeffs
    }

    #[test]
    fn rotation_block_closed_forms() {
        let r0 = rotation_block(0.0);
        assert_eq!(r0, RealOperator::identity(2));
        let rpi = rotation_block(std::f64::consts::PI);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((rpi.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rotation_block_oracle_eigenvalues() {
        let theta = std::f64::consts::FRAC_PI_3;
        let eigs = oracle_eigen(&complexify(&rotation_block(theta))).unwrap();
        let want = vec![
            Complex64::from_polar(1.0, theta),
            Complex64::from_polar(1.0, -theta),
        ];
        assert_spectrum_matches(&eigs, &want, 1e-10);
    }

    #[test]
    fn direct_sum_assembles_blocks() {
        let a = RealOperator::identity(2);
        let b = RealOperator::identity(2).scale(2.0);
        let s = direct_sum(&[a.clone(), b]).unwrap();
        assert_eq!(s.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i != j {
                    0.0
                } else if i < 2 {
                    1.0
                } else {
                    2.0
                };
                assert_eq!(s.get(i, j), want);
            }
        }
        let single = direct_sum(&[a.clone()]).unwrap();
        assert_eq!(single, a);
        assert!(matches!(direct_sum(&[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn direct_sum_spectrum_is_union() {
        let theta1 = std::f64::consts::FRAC_PI_3;
        let theta2 = 2.0 * std::f64::consts::FRAC_PI_3;
        let t = direct_sum(&[rotation_block(theta1), rotation_block(theta2)]).unwrap();
        let eigs = oracle_eigen(&complexify(&t)).unwrap();
        let want = vec![
            Complex64::from_polar(1.0, theta1),
            Complex64::from_polar(1.0, -theta1),
            Complex64::from_polar(1.0, theta2),
            Complex64::from_polar(1.0, -theta2),
        ];
        assert_spectrum_matches(&eigs, &want, 1e-10);
    }

    #[test]
    fn jordan_companion_m1_matches_rotation_char_poly() {
        let theta = std::f64::consts::FRAC_PI_3;
        let c = jordan_companion(theta, 1).unwrap();
        assert_eq!(c.dim(), 2);
        // companion of lambda^2 - lambda + 1
        assert_eq!(c.get(0, 0), 0.0);
        assert!((c.get(0, 1) - (-1.0)).abs() < 1e-15);
        assert_eq!(c.get(1, 0), 1.0);
        assert!((c.get(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jordan_companion_m2_has_double_pair() {
        let theta = std::f64::consts::FRAC_PI_3;
        let c = jordan_companion(theta, 2).unwrap();
        assert_eq!(c.dim(), 4);
        // last column carries -(ascending coefficients) of (l^2-l+1)^2 = l^4-2l^3+3l^2-2l+1
        let want_last = [-1.0, 2.0, -3.0, 2.0];
        for (i, w) in want_last.iter().enumerate() {
            assert!((c.get(i, 3) - w).abs() < 1e-14);
        }
        let eigs = oracle_eigen(&complexify(&c)).unwrap();
        let e = Complex64::from_polar(1.0, theta);
        assert_spectrum_matches(&eigs, &[e, e, e.conj(), e.conj()], 1e-7);
    }

    #[test]
    fn volterra_matrix_shape() {
        let v = volterra_matrix(2).unwrap();
        assert_eq!(v.get(0, 0), 0.0);
        assert_eq!(v.get(0, 1), 0.0);
        assert_eq!(v.get(1, 0), 0.5);
        assert_eq!(v.get(1, 1), 0.0);
        let v8 = volterra_matrix(8).unwrap();
        let eigs = oracle_eigen(&complexify(&v8)).unwrap();
        // A defective eigenvalue of multiplicity 8 scatters rounding noise
        // like eps^{1/8} ~ 1e-2; only that much accuracy is attainable.
        for e in eigs {
            assert!(e.norm() <= 2e-2, "volterra eigenvalue {e} not at origin");
        }
        assert!(matches!(volterra_matrix(1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn generators_are_deterministic() {
        let a = random_real_operator(6, 42);
        let b = random_real_operator(6, 42);
        assert_eq!(a, b);
        let c = jordan_companion(0.7, 3).unwrap();
        let d = jordan_companion(0.7, 3).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn oracle_diagonal_case() {
        let t = RealOperator::from_row_major(3, vec![1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0])
            .unwrap();
        let eigs = oracle_eigen(&complexify(&t)).unwrap();
        let want = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ];
        assert_spectrum_matches(&eigs, &want, 1e-12);
    }

    #[test]
    fn oracle_symmetric_matrix_has_real_spectrum() {
        let raw = random_real_operator(8, 7);
        let sym = raw.add(&raw.transpose()).scale(0.5);
        let eigs = oracle_eigen(&complexify(&sym)).unwrap();
        for e in &eigs {
            assert!(e.im.abs() <= 1e-9, "symmetric matrix eigenvalue {e} not real");
        }
        // cross-check: eI - A must be numerically singular at each eigenvalue
        let a = complexify(&sym);
        for e in &eigs {
            match crate::lu::LuFactorization::shifted(&a, *e) {
                Err(_) => {}
                Ok(f) => assert!(
                    f.smallest_pivot() <= 1e-6 * f.matrix_norm().max(1.0),
                    "oracle eigenvalue {e} is not close to singular"
                ),
            }
        }
    }

    #[test]
    fn oracle_matches_char_poly_roots_at_small_sizes() {
        for (n, seed) in [(2usize, 1u64), (3, 2), (4, 3), (5, 4), (6, 5)] {
            let t = random_real_operator(n, seed);
            let eigs = oracle_eigen(&complexify(&t)).unwrap();
            let coeffs = char_poly_ascending(&t);
            let roots = poly::roots(&coeffs).expect("characteristic polynomial has roots");
            assert_spectrum_matches(&eigs, &roots, 1e-6);
        }
    }

    #[test]
    fn oracle_spectrum_of_complexified_real_operator_is_conjugation_closed() {
        for seed in 0..5u64 {
            let t = random_real_operator(8, 100 + seed);
            let eigs = oracle_eigen(&complexify(&t)).unwrap();
            let conj: Vec<Complex64> = eigs.iter().map(|e| e.conj()).collect();
            assert_spectrum_matches(&eigs, &conj, 1e-9);
        }
    }

    #[test]
    fn oracle_rejects_oversize_input() {
        let t = RealOperator::identity(65);
        assert!(matches!(
            oracle_eigen(&complexify(&t)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn oracle_handles_defective_jordan_block() {
        // J_3(2): single eigenvalue 2 with one Jordan block
        let t = RealOperator::from_row_major(
            3,
            vec![2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0],
        )
        .unwrap();
        let eigs = oracle_eigen(&complexify(&t)).unwrap();
        for e in eigs {
            assert!(
                (e - Complex64::new(2.0, 0.0)).norm() <= 1e-5,
                "defective eigenvalue {e} strayed"
            );
        }
    }
}
