//! Riesz projections and weighted functional calculus by resolvent
//! quadrature, extraction of conjugation-closed subspaces and their real
//! parts, and local-spectrum supports over a spectral partition.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{build_rule, winding_number, Contour, QuadratureRule};
use crate::error::{Error, Result};
use crate::linalg;
use crate::lu::LuFactorization;
use crate::operator::{ComplexOperator, RealOperator};
use crate::poly;

/// Default relative singular-value threshold separating quadrature noise from
/// genuine directions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Starting resolution for adaptive node doubling.
pub const ADAPTIVE_START_NODES: usize = 16;

/// Floor below which adaptive tolerances are rejected as unattainable in
/// double precision.
pub const ADAPTIVE_TOL_FLOOR: f64 = 1e-13;

/// Scalar weight g(λ) multiplying the resolvent under the integral. Real
/// coefficients guarantee g(conj λ) = conj(g(λ)), which is what transports
/// the contour's conjugation symmetry onto f(T).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    ConstantOne,
    /// Ascending real coefficients c₀ + c₁λ + c₂λ² + ...
    Polynomial { coefficients: Vec<f64> },
    Rational {
        numerator: Vec<f64>,
        denominator: Vec<f64>,
    },
}

impl WeightFunction {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        match self {
            WeightFunction::ConstantOne => Complex64::ONE,
            WeightFunction::Polynomial { coefficients } => poly::eval(coefficients, lambda),
            WeightFunction::Rational {
                numerator,
                denominator,
            } => poly::eval(numerator, lambda) / poly::eval(denominator, lambda),
        }
    }

    /// Verifies the pole-clearance invariant: no denominator root within
    /// `rule.pole_clearance()` of the discretized contour.
    pub fn check_poles(&self, rule: &QuadratureRule) -> Result<()> {
        let WeightFunction::Rational { denominator, .. } = self else {
            return Ok(());
        };
        if denominator.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidArgument(
                "rational weight has zero denominator".into(),
            ));
        }
        let roots = poly::roots(denominator).unwrap_or_default();
        let clearance = rule.pole_clearance();
        for root in roots {
            let distance = rule.min_node_distance(root);
            if distance < clearance {
                return Err(Error::WeightPoleNearContour {
                    root,
                    distance,
                    clearance,
                });
            }
        }
        Ok(())
    }
}

/// Orthonormal column set spanning a claimed-invariant subspace, with the
/// residuals that back the claim.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    n: usize,
    columns: BasisColumns,
    pub invariance_residual: Option<f64>,
    pub symmetry_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum BasisColumns {
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<Complex64>>),
}

fn orthonormality_defect_complex(n: usize, cols: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in cols.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
            let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            worst = worst.max((dot - want).norm());
        }
        debug_assert_eq!(a.len(), n);
    }
    worst
}

impl SubspaceBasis {
    pub fn from_complex_columns(n: usize, columns: Vec<Vec<Complex64>>) -> Result<Self> {
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidArgument(
                "basis column length does not match the space dimension".into(),
            ));
        }
        if orthonormality_defect_complex(n, &columns) > 1e-12 {
            return Err(Error::InvalidArgument(
                "basis columns are not orthonormal to 1e-12".into(),
            ));
        }
        Ok(Self {
            n,
            columns: BasisColumns::Complex(columns),
            invariance_residual: None,
            symmetry_residual: None,
        })
    }

    pub fn from_real_columns(n: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidArgument(
                "basis column length does not match the space dimension".into(),
            ));
        }
        let as_complex: Vec<Vec<Complex64>> = columns
            .iter()
            .map(|c| c.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        if orthonormality_defect_complex(n, &as_complex) > 1e-12 {
            return Err(Error::InvalidArgument(
                "basis columns are not orthonormal to 1e-12".into(),
            ));
        }
        Ok(Self {
            n,
            columns: BasisColumns::Real(columns),
            invariance_residual: None,
            symmetry_residual: None,
        })
    }

    pub fn space_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        match &self.columns {
            BasisColumns::Real(c) => c.len(),
            BasisColumns::Complex(c) => c.len(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.columns, BasisColumns::Real(_))
    }

    pub fn columns(&self) -> &BasisColumns {
        &self.columns
    }

    pub fn real_columns(&self) -> Option<&[Vec<f64>]> {
        match &self.columns {
            BasisColumns::Real(c) => Some(c),
            BasisColumns::Complex(_) => None,
        }
    }

    /// Columns as complex vectors regardless of storage.
    pub fn complex_columns(&self) -> Vec<Vec<Complex64>> {
        match &self.columns {
            BasisColumns::Real(c) => c
                .iter()
                .map(|col| col.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
            BasisColumns::Complex(c) => c.clone(),
        }
    }

    pub fn to_na(&self) -> nalgebra::DMatrix<Complex64> {
        linalg::na_from_columns(self.n, &self.complex_columns())
    }

    /// ‖(I − ZZᴴ)·conj(Z)‖₂: how far the span is from being closed under
    /// conjugation. Zero iff J(span) = span.
    pub fn conjugation_closure_residual(&self) -> f64 {
        if self.rank() == 0 {
            return 0.0;
        }
        let z = self.to_na();
        let zc = z.map(|v| v.conj());
        let defect = &zc - &z * (z.adjoint() * &zc);
        linalg::spectral_norm(&defect)
    }
}

/// ∑_j w_j · g(λ_j) · R(λ_j, A) with deterministic pairwise-tree summation
/// over the node index range. Zero-weight nodes (warp junction points) are
/// skipped without a factorization.
fn quadrature_sum(
    a: &ComplexOperator,
    rule: &QuadratureRule,
    g: &WeightFunction,
    lo: usize,
    hi: usize,
) -> Result<ComplexOperator> {
    debug_assert!(lo < hi);
    if hi - lo == 1 {
        let node = rule.nodes()[lo];
        let weight = rule.weights()[lo];
        if weight == Complex64::ZERO {
            return Ok(ComplexOperator::zeros(a.dim()));
        }
        let lu = LuFactorization::shifted(a, node).map_err(|e| match e {
            Error::SingularShift { shift, .. } => Error::NodeOnSpectrum { node: shift },
            other => other,
        })?;
        let resolvent = lu.solve_identity();
        return Ok(resolvent.scale(weight * g.eval(node)));
    }
    let mid = lo + (hi - lo) / 2;
    let left = quadrature_sum(a, rule, g, lo, mid)?;
    let right = quadrature_sum(a, rule, g, mid, hi)?;
    Ok(left.add(&right))
}

/// Spectral projection P = (1/2πi) ∮ R(λ, A) dλ discretized over `rule`.
pub fn riesz_projection(a: &ComplexOperator, rule: &QuadratureRule) -> Result<ComplexOperator> {
    weighted_calculus(a, rule, &WeightFunction::ConstantOne)
}

/// f(A) = (1/2πi) ∮ R(λ, A) g(λ) dλ discretized over `rule`.
pub fn weighted_calculus(
    a: &ComplexOperator,
    rule: &QuadratureRule,
    g: &WeightFunction,
) -> Result<ComplexOperator> {
    g.check_poles(rule)?;
    if rule.is_empty() {
        return Ok(ComplexOperator::zeros(a.dim()));
    }
    quadrature_sum(a, rule, g, 0, rule.len())
}

/// Doubles nodes_per_loop until ‖P_N − P_{2N}‖_max ≤ tol, starting from
/// [`ADAPTIVE_START_NODES`]. Returns the finer projection and its node count.
/// `known_eigs` only feeds the failure diagnostic.
pub fn adaptive_projection(
    a: &ComplexOperator,
    contour: &Contour,
    tol: f64,
    max_nodes: usize,
    known_eigs: Option<&[Complex64]>,
) -> Result<(ComplexOperator, usize)> {
    if !(tol >= ADAPTIVE_TOL_FLOOR) {
        return Err(Error::InvalidArgument(format!(
            "adaptive tolerance {tol:e} is below the floor {ADAPTIVE_TOL_FLOOR:e}"
        )));
    }
    let mut nodes = ADAPTIVE_START_NODES;
    let mut rule = build_rule(contour, nodes)?;
    let mut coarse = riesz_projection(a, &rule)?;
    loop {
        let next = nodes * 2;
        if next > max_nodes {
            let nearest = known_eigs.map(|eigs| {
                eigs.iter()
                    .map(|e| rule.min_node_distance(*e))
                    .fold(f64::INFINITY, f64::min)
            });
            return Err(Error::NotConverged {
                residual: f64::INFINITY,
                nodes,
                nearest_eigenvalue_distance: nearest,
            });
        }
        rule = build_rule(contour, next)?;
        let fine = riesz_projection(a, &rule)?;
        let diff = fine.sub(&coarse).max_norm();
        if diff <= tol {
            return Ok((fine, next));
        }
        if next * 2 > max_nodes {
            let nearest = known_eigs.map(|eigs| {
                eigs.iter()
                    .map(|e| rule.min_node_distance(*e))
                    .fold(f64::INFINITY, f64::min)
            });
            return Err(Error::NotConverged {
                residual: diff,
                nodes: next,
                nearest_eigenvalue_distance: nearest,
            });
        }
        coarse = fine;
        nodes = next;
    }
}

fn check_rank_tol(tol_rel: f64) -> Result<()> {
    if !(tol_rel > 0.0 && tol_rel < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must lie in (0, 1), got {tol_rel}"
        )));
    }
    Ok(())
}

/// Rank of a near-idempotent matrix, counted as the number of singular
/// values above 1/2. Exact idempotents have singular values that are either
/// zero or at least one, so this rule needs no tolerance and stays correct
/// for any perturbation below 1/2. Relative thresholds fail here: a
/// projection that is numerically zero still has a largest singular value at
/// rounding level, which any tol·σ₁ rule promotes to rank one.
pub fn projection_rank(p: &ComplexOperator) -> usize {
    linalg::na_from_complex(p)
        .singular_values()
        .iter()
        .filter(|&&s| s > 0.5)
        .count()
}

/// Orthonormal basis of the numerical range of M (singular values above
/// tol_rel·σ₁). Rank 0 yields an empty basis.
pub fn range_basis(m: &ComplexOperator, tol_rel: f64) -> Result<SubspaceBasis> {
    check_rank_tol(tol_rel)?;
    let cols = linalg::range_columns(&linalg::na_from_complex(m), tol_rel);
    SubspaceBasis::from_complex_columns(m.dim(), cols)
}

/// Real counterpart of [`range_basis`].
pub fn range_basis_real(m: &RealOperator, tol_rel: f64) -> Result<SubspaceBasis> {
    check_rank_tol(tol_rel)?;
    let cols = linalg::range_columns_real(&linalg::na_from_real(m), tol_rel);
    SubspaceBasis::from_real_columns(m.dim(), cols)
}

/// Orthonormal basis of the numerical null space of M (right singular vectors
/// with σ ≤ tol_rel·σ₁). For an idempotent P this is the range of I − P.
pub fn kernel_basis(m: &ComplexOperator, tol_rel: f64) -> Result<SubspaceBasis> {
    check_rank_tol(tol_rel)?;
    let cols = linalg::null_columns(&linalg::na_from_complex(m), tol_rel);
    SubspaceBasis::from_complex_columns(m.dim(), cols)
}

/// Extracts the real part of a conjugation-closed complex subspace: an
/// orthonormal real basis of span{Re z, Im z : z ∈ Z}. For closed spans of
/// rank r the real basis has rank r again.
pub fn real_part_subspace(z: &SubspaceBasis, sym_tol: f64) -> Result<SubspaceBasis> {
    let residual = z.conjugation_closure_residual();
    if residual > sym_tol {
        return Err(Error::NotSymmetric {
            residual,
            tol: sym_tol,
        });
    }
    let n = z.space_dim();
    let cols = z.complex_columns();
    // n x 2r real matrix [Re Z | Im Z]
    let stacked = nalgebra::DMatrix::from_fn(n, 2 * cols.len(), |i, j| {
        if j < cols.len() {
            cols[j][i].re
        } else {
            cols[j - cols.len()][i].im
        }
    });
    let real_cols = linalg::range_columns_real(&stacked, DEFAULT_RANK_TOL);
    let mut basis = SubspaceBasis::from_real_columns(n, real_cols)?;
    basis.symmetry_residual = Some(residual);
    Ok(basis)
}

/// ‖(I − QQᴴ)·T·Q‖₂ / max(‖T‖₂, 1): zero iff span(Q) is exactly T-invariant.
pub fn invariance_residual(t: &ComplexOperator, q: &SubspaceBasis) -> f64 {
    if q.rank() == 0 {
        return 0.0;
    }
    let tn = linalg::na_from_complex(t);
    let qn = q.to_na();
    let tq = &tn * &qn;
    let defect = &tq - &qn * (qn.adjoint() * &tq);
    linalg::spectral_norm(&defect) / linalg::spectral_norm(&tn).max(1.0)
}

/// Real-operator convenience wrapper for [`invariance_residual`].
pub fn invariance_residual_real(t: &RealOperator, q: &SubspaceBasis) -> f64 {
    invariance_residual(&crate::operator::complexify(t), q)
}

/// Labelled contour cell of a spectral partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionCell {
    pub label: String,
    pub contour: Contour,
}

/// Pairwise-disjoint labelled contours covering the spectrum, with the
/// mirror map induced by conjugation.
#[derive(Debug, Clone)]
pub struct SpectralPartition {
    cells: Vec<PartitionCell>,
    rules: Vec<QuadratureRule>,
    /// mirror[i] = index of the cell whose contour is the conjugate of cell i,
    /// when the partition is mirror-closed.
    mirror: Vec<Option<usize>>,
}

impl SpectralPartition {
    pub fn new(cells: Vec<PartitionCell>, nodes_per_loop: usize) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidArgument("partition needs at least one cell".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &cells {
            if !seen.insert(c.label.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate partition label '{}'",
                    c.label
                )));
            }
        }
        let rules = cells
            .iter()
            .map(|c| build_rule(&c.contour, nodes_per_loop))
            .collect::<Result<Vec<_>>>()?;
        let mirror = cells
            .iter()
            .map(|c| {
                let conj = c.contour.conjugate();
                cells.iter().position(|d| d.contour == conj)
            })
            .collect();
        Ok(Self {
            cells,
            rules,
            mirror,
        })
    }

    pub fn cells(&self) -> &[PartitionCell] {
        &self.cells
    }

    pub fn labels(&self) -> Vec<&str> {
        self.cells.iter().map(|c| c.label.as_str()).collect()
    }

    /// Label of the conjugate cell, when the partition is mirror-closed.
    pub fn mirror_label(&self, label: &str) -> Option<&str> {
        let i = self.cells.iter().position(|c| c.label == label)?;
        self.mirror[i].map(|j| self.cells[j].label.as_str())
    }

    /// Checks that every eigenvalue has winding number 1 for exactly one cell.
    pub fn validate_against(&self, eigenvalues: &[Complex64]) -> Result<()> {
        for e in eigenvalues {
            let mut owners = 0usize;
            for (cell, rule) in self.cells.iter().zip(&self.rules) {
                let w = winding_number(rule, *e)?;
                match w.index {
                    0 => {}
                    1 => owners += 1,
                    k => {
                        return Err(Error::InvalidContour(format!(
                            "cell '{}' winds {k} times around eigenvalue {e}",
                            cell.label
                        )))
                    }
                }
            }
            if owners != 1 {
                return Err(Error::InvalidContour(format!(
                    "eigenvalue {e} is enclosed by {owners} cells, expected exactly one"
                )));
            }
        }
        Ok(())
    }

    /// Riesz projection of each cell, in cell order.
    pub fn projections(&self, a: &ComplexOperator) -> Result<Vec<ComplexOperator>> {
        self.rules.iter().map(|r| riesz_projection(a, r)).collect()
    }
}

/// Partition cells whose projection does not annihilate z:
/// {label i : ‖P_i z‖₂ > tol·‖z‖₂}, in cell order.
pub fn local_spectrum_support(
    partition: &SpectralPartition,
    projections: &[ComplexOperator],
    z: &[Complex64],
    tol: f64,
) -> Vec<String> {
    assert_eq!(projections.len(), partition.cells.len());
    let znorm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut support = Vec::new();
    for (cell, p) in partition.cells.iter().zip(projections) {
        let pz = p.apply(z);
        let pznorm = pz.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if pznorm > tol * znorm {
            support.push(cell.label.clone());
        }
    }
    support
}
