//! Power-growth diagnostics: forward/backward spectral-norm tables with
//! overflow-safe accumulation, fitted polynomial growth exponents, the
//! non-quasianalyticity sum ∑ ‖T^n‖/(1+n²), and isometry detection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lu::LuFactorization;
use crate::operator::{complexify, RealOperator};

/// Floor applied to log-norms of numerically vanished powers so the
/// least-squares fit stays finite.
const LOG_FLOOR: f64 = -690.0;

/// Increment-decay slope below which the tail of ∑ ‖T^n‖/(1+n²) is judged
/// summable. Harmonic decay (slope exactly -1) must stay on the
/// non-converging side, hence the margin.
pub const NQ_SLOPE_THRESHOLD: f64 = -1.05;

/// Which power direction a fitted exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Least-squares slope of log‖T^n‖ against log n with its RMS residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub fit_residual: f64,
    pub direction: Direction,
}

impl ExponentFit {
    /// Large residuals mean no power law fits the table at all
    /// (geometric growth, for instance).
    pub fn is_non_polynomial(&self) -> bool {
        self.fit_residual > 0.5
    }
}

/// Verdict on the non-quasianalyticity sum S_N = ∑_{|n|≤N} ‖T^n‖/(1+n²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NqVerdict {
    /// Truncated sum; may overflow to infinity for geometric growth.
    pub partial_sum: f64,
    pub converging: bool,
    /// Fitted decay exponent of the increments over the upper half-range.
    pub increment_slope: f64,
}

/// Outcome of the Euclidean isometry test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryCheck {
    pub is_isometry: bool,
    pub is_surjective: bool,
}

/// Norm tables ‖T^n‖₂ for n = 1..N in log domain, with optional diagnostics
/// filled in by [`growth_exponent`] and [`nonquasianalytic_sum`].
#[derive(Debug, Clone)]
pub struct GrowthProfile {
    pub horizon: usize,
    /// ln ‖T^n‖₂ for n = 1..N (index 0 is n = 1); NEG_INFINITY marks a
    /// vanished power.
    pub forward_log_norms: Vec<f64>,
    /// Same for ‖T^{-n}‖₂; None when T is numerically singular.
    pub backward_log_norms: Option<Vec<f64>>,
    pub k_estimate: Option<ExponentFit>,
    pub nq: Option<NqVerdict>,
    pub is_isometry: bool,
}

impl GrowthProfile {
    pub fn forward_norms(&self) -> Vec<f64> {
        self.forward_log_norms.iter().map(|l| l.exp()).collect()
    }

    pub fn backward_norms(&self) -> Option<Vec<f64>> {
        self.backward_log_norms
            .as_ref()
            .map(|v| v.iter().map(|l| l.exp()).collect())
    }
}

/// Chain of normalized products: tracks T^n = e^{L_n}·A_n with ‖A_n‖₂ = 1,
/// so arbitrarily growing or decaying norms never overflow.
fn log_norm_chain(t: &RealOperator, n_max: usize) -> Vec<f64> {
    let mut logs = Vec::with_capacity(n_max);
    let s1 = linalg::spectral_norm_real(t);
    if s1 == 0.0 {
        return vec![f64::NEG_INFINITY; n_max];
    }
    let mut log_acc = s1.ln();
    let mut normalized = t.scale(1.0 / s1);
    logs.push(log_acc);
    for _ in 1..n_max {
        let product = normalized.matmul(t);
        let s = linalg::spectral_norm_real(&product);
        if s == 0.0 {
            while logs.len() < n_max {
                logs.push(f64::NEG_INFINITY);
            }
            break;
        }
        log_acc += s.ln();
        normalized = product.scale(1.0 / s);
        logs.push(log_acc);
    }
    logs
}

/// Real inverse via the resolvent at the origin: (0·I − T)⁻¹ = −T⁻¹.
/// None when the pivot test declares T singular.
fn try_inverse(t: &RealOperator) -> Option<RealOperator> {
    let lu = LuFactorization::shifted(&complexify(t), Complex64::ZERO).ok()?;
    Some(lu.solve_identity().scale(Complex64::new(-1.0, 0.0)).real_part())
}

/// Builds the norm tables for n = 1..N. The backward chain is omitted (not
/// an error) when T fails the invertibility pivot test; only
/// [`nonquasianalytic_sum`] turns that absence into [`Error::SingularOperator`].
pub fn power_norms(t: &RealOperator, n_max: usize) -> Result<GrowthProfile> {
    if n_max < 4 {
        return Err(Error::InvalidArgument(format!(
            "growth horizon must be at least 4, got {n_max}"
        )));
    }
    let forward_log_norms = log_norm_chain(t, n_max);
    let backward_log_norms = try_inverse(t).map(|inv| log_norm_chain(&inv, n_max));
    let is_isometry = isometry_check(t, 1e-10).is_isometry;
    Ok(GrowthProfile {
        horizon: n_max,
        forward_log_norms,
        backward_log_norms,
        k_estimate: None,
        nq: None,
        is_isometry,
    })
}

/// Least squares of y against ln n over n in [n_max/2, n_max] (1-based
/// values drawn from `logs`), returning (slope, rms_residual).
fn upper_range_fit(logs: &[f64], n_max: usize) -> (f64, f64) {
    let lo = (n_max / 2).max(1);
    let points: Vec<(f64, f64)> = (lo..=n_max)
        .map(|n| ((n as f64).ln(), logs[n - 1].max(LOG_FLOOR)))
        .collect();
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    (slope, (ss_res / m).sqrt())
}

/// Fitted growth exponent over the upper half-range n in [N/2, N],
/// maximized over the available directions.
pub fn growth_exponent(profile: &GrowthProfile) -> Result<ExponentFit> {
    if profile.horizon < 16 {
        return Err(Error::InvalidArgument(format!(
            "exponent fit needs a horizon of at least 16, got {}",
            profile.horizon
        )));
    }
    let (fwd_slope, fwd_res) = upper_range_fit(&profile.forward_log_norms, profile.horizon);
    let mut fit = ExponentFit {
        exponent: fwd_slope,
        fit_residual: fwd_res,
        direction: Direction::Forward,
    };
    if let Some(back) = &profile.backward_log_norms {
        let (bwd_slope, bwd_res) = upper_range_fit(back, profile.horizon);
        if bwd_slope > fit.exponent {
            fit = ExponentFit {
                exponent: bwd_slope,
                fit_residual: bwd_res,
                direction: Direction::Backward,
            };
        }
    }
    Ok(fit)
}

/// ln(e^a + e^b) without overflow.
fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Truncated non-quasianalyticity sum S_N = ∑_{|n|≤N} ‖T^n‖/(1+n²) together
/// with a tail verdict: converging iff the increments decay strictly faster
/// than harmonically (fitted slope below [`NQ_SLOPE_THRESHOLD`]).
pub fn nonquasianalytic_sum(profile: &GrowthProfile) -> Result<NqVerdict> {
    let Some(backward) = &profile.backward_log_norms else {
        return Err(Error::SingularOperator);
    };
    let n_max = profile.horizon;
    // log increments a_n = (‖T^n‖ + ‖T^{-n}‖) / (1 + n²)
    let log_increments: Vec<f64> = (1..=n_max)
        .map(|n| {
            log_add_exp(profile.forward_log_norms[n - 1], backward[n - 1])
                - (1.0 + (n as f64) * (n as f64)).ln()
        })
        .collect();
    let mut partial_sum = 1.0; // n = 0 term: ‖I‖ / (1 + 0)
    for l in &log_increments {
        partial_sum += l.exp();
    }
    let (increment_slope, _) = upper_range_fit(&log_increments, n_max);
    Ok(NqVerdict {
        partial_sum,
        converging: increment_slope < NQ_SLOPE_THRESHOLD,
        increment_slope,
    })
}

/// Euclidean isometry and surjectivity tests. In finite dimension every
/// isometry is surjective, so a true/false outcome cannot occur.
pub fn isometry_check(t: &RealOperator, tol: f64) -> IsometryCheck {
    let n = t.dim();
    let gram = t.transpose().matmul(t);
    let defect = gram.sub(&RealOperator::identity(n)).max_norm();
    let rank = linalg::rank_real(&linalg::na_from_real(t), 1e-10);
    IsometryCheck {
        is_isometry: defect <= tol,
        is_surjective: rank == n,
    }
}
