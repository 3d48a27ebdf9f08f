//! LU factorization with partial pivoting of shifted matrices λI − A.
//!
//! This is the single linear-solve kernel behind resolvent evaluation,
//! projection quadrature, and the pencil code.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::ComplexOperator;

/// Relative pivot threshold below which a shift counts as spectral.
pub const SINGULAR_PIVOT_REL: f64 = 1e-14;

/// Factored form of λI − A: combined L/U storage plus the pivot permutation
/// and the shift that produced it.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    /// Row-major combined storage: strict lower triangle holds the
    /// multipliers of L (unit diagonal implied), the rest is U.
    data: Vec<Complex64>,
    /// pivots[k] = row swapped with row k at elimination step k.
    pivots: Vec<usize>,
    shift: Complex64,
    /// Max norm of the shifted matrix, fixed before elimination.
    matrix_norm: f64,
}

impl LuFactorization {
    /// Factors λI − A.
    pub fn shifted(a: &ComplexOperator, shift: Complex64) -> Result<Self> {
        let n = a.dim();
        let mut data = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let s = if i == j { shift } else { Complex64::ZERO };
                data[i * n + j] = s - a.get(i, j);
            }
        }
        let matrix_norm = data.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let threshold = SINGULAR_PIVOT_REL * matrix_norm;
        let mut pivots = vec![0usize; n];

        for k in 0..n {
            let mut p = k;
            let mut best = data[k * n + k].norm();
            for i in k + 1..n {
                let v = data[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    data.swap(k * n + j, p * n + j);
                }
            }
            let pivot = data[k * n + k];
            if pivot.norm() <= threshold {
                return Err(Error::SingularShift {
                    shift,
                    pivot: pivot.norm(),
                    threshold,
                });
            }
            for i in k + 1..n {
                let m = data[i * n + k] / pivot;
                data[i * n + k] = m;
                if m != Complex64::ZERO {
                    for j in k + 1..n {
                        let u = data[k * n + j];
                        data[i * n + j] -= m * u;
                    }
                }
            }
        }
        Ok(Self {
            n,
            data,
            pivots,
            shift,
            matrix_norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn matrix_norm(&self) -> f64 {
        self.matrix_norm
    }

    /// Smallest pivot magnitude on the U diagonal; a cheap proxy for how close
    /// the shift sits to the spectrum.
    pub fn smallest_pivot(&self) -> f64 {
        (0..self.n)
            .map(|k| self.data[k * self.n + k].norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Solves (λI − A) w = rhs.
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut x = rhs.to_vec();
        // The factorization swaps whole rows, so L and U live in the fully
        // permuted ordering: apply every swap before the triangular solves.
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
        }
        for k in 0..n {
            let xk = x[k];
            if xk != Complex64::ZERO {
                for i in k + 1..n {
                    let m = self.data[i * n + k];
                    x[i] -= m * xk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            for j in i + 1..n {
                v -= self.data[i * n + j] * x[j];
            }
            x[i] = v / self.data[i * n + i];
        }
        x
    }

    /// Solves against the identity, i.e. returns R(λ, A) = (λI − A)^{-1}.
    pub fn solve_identity(&self) -> ComplexOperator {
        let n = self.n;
        let mut out = ComplexOperator::zeros(n);
        let mut e = vec![Complex64::ZERO; n];
        for col in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::ZERO);
            e[col] = Complex64::ONE;
            let x = self.solve(&e);
            for row in 0..n {
                out.set(row, col, x[row]);
            }
        }
        out
    }

    /// Reassembles λI − A from the factors: undoes the pivot permutation on
    /// the product L·U.
    pub fn reconstruct(&self) -> ComplexOperator {
        let n = self.n;
        let mut lu = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::ZERO;
                // (L U)_{ij} = Σ_k L_{ik} U_{kj}, L unit lower, U upper
                let upper = j.min(i);
                for k in 0..upper {
                    s += self.data[i * n + k] * self.data[k * n + j];
                }
                if i <= j {
                    s += self.data[i * n + j];
                } else {
                    s += self.data[i * n + j] * self.data[j * n + j];
                }
                lu[i * n + j] = s;
            }
        }
        for k in (0..n).rev() {
            let p = self.pivots[k];
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
        }
        ComplexOperator::from_row_major(n, lu).expect("factors are finite")
    }
}
