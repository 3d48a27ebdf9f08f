//! Machine-readable run reports. The JSON layout is versioned via the
//! `schema` field and frozen by the integration tests: field order follows
//! declaration order, the oracle block is an explicit null when the
//! eigensolve is skipped, and every float written is finite.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::growth::{ExponentFit, GrowthProfile, IsometryCheck};
use crate::twopoint::BranchTag;

pub const SCHEMA_VERSION: &str = "v1";

/// Success verdicts; every emitted report carries one of these and exits 0.
/// Failures never produce a report: they exit through the error taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AnalysisComplete,
    InvariantSubspaceFound,
    GrowthProfile,
    Generated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub path: String,
    pub dimension: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    /// Sorted by (re, im) so reports are order-stable.
    pub eigenvalues: Vec<Complex64>,
    /// Max over eigenvalues of the distance to the nearest conjugate partner;
    /// real spectra of real operators keep this at rounding level.
    pub conjugation_closure_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSection {
    /// Conjugation-closed eigenvalue clusters found by the oracle, if any.
    pub cluster_count: Option<usize>,
    /// One of contour_split, two_point, cyclic.
    pub suggested_strategy: String,
    /// Proposed pencil point when the strategy is two_point.
    pub suggested_eta: Option<Complex64>,
    /// Set when the dimension is at most 2, where splitting is vacuous.
    pub dimension_note: Option<String>,
    pub base_norm: String,
    /// |‖Jz‖ − ‖z‖| on a seeded probe vector in the chosen base norm.
    pub conjugation_isometry_residual: Option<f64>,
    /// ‖R(conj λ) − J R(λ) J‖_max at a sample point off the spectrum.
    pub resolvent_conjugation_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSection {
    #[serde(flatten)]
    pub contour: Contour,
    pub nodes_per_loop: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSection {
    pub nodes_used: usize,
    pub trace: Complex64,
    pub rank: usize,
    pub idempotency_residual: f64,
    pub commutation_residual: f64,
    pub max_imag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSection {
    pub rank: usize,
    pub complement_rank: usize,
    pub symmetry_residual: Option<f64>,
    pub invariance_residual: Option<f64>,
    pub basis_file: Option<String>,
    pub complement_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointSection {
    pub eta: Complex64,
    pub k: usize,
    pub cluster_radius: Option<f64>,
    pub pencil_norm: f64,
    pub nilpotency_index: Option<usize>,
    pub branch: BranchTag,
    pub rank: usize,
    pub invariance_residual: f64,
    pub basis_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NqSummary {
    /// None when the truncated sum overflows double precision.
    pub partial_sum: Option<f64>,
    pub converging: bool,
    pub increment_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSection {
    pub horizon: usize,
    /// ‖T^n‖₂ for n = 1..horizon, clamped into the finite range.
    pub forward_norms: Vec<f64>,
    pub backward_norms: Option<Vec<f64>>,
    pub k_estimate: Option<ExponentFit>,
    pub non_polynomial: Option<bool>,
    pub nq: Option<NqSummary>,
    pub is_isometry: bool,
    pub is_surjective: bool,
}

fn clamp_finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x == f64::INFINITY {
        f64::MAX
    } else {
        // NEG_INFINITY marks a vanished power; NaN cannot arise from norms.
        0.0
    }
}

impl GrowthSection {
    pub fn from_profile(profile: &GrowthProfile, surjective: IsometryCheck) -> Self {
        let forward_norms = profile
            .forward_log_norms
            .iter()
            .map(|l| clamp_finite(l.exp()))
            .collect();
        let backward_norms = profile
            .backward_log_norms
            .as_ref()
            .map(|v| v.iter().map(|l| clamp_finite(l.exp())).collect());
        Self {
            horizon: profile.horizon,
            forward_norms,
            backward_norms,
            k_estimate: profile.k_estimate.clone(),
            non_polynomial: profile.k_estimate.as_ref().map(|f| f.is_non_polynomial()),
            nq: profile.nq.as_ref().map(|v| NqSummary {
                partial_sum: v.partial_sum.is_finite().then_some(v.partial_sum),
                converging: v.converging,
                increment_slope: v.increment_slope,
            }),
            is_isometry: profile.is_isometry,
            is_surjective: surjective.is_surjective,
        }
    }
}

/// Top-level report. `generated_at` (epoch seconds) is the only field
/// excluded from determinism comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub schema: String,
    pub tool_version: String,
    pub generated_at: u64,
    pub command: String,
    pub input: Option<InputDescriptor>,
    /// Explicit null when the eigensolve is auto-disabled (n > 64).
    pub oracle: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour: Option<ContourSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<SubspaceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_point: Option<TwoPointSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthSection>,
    pub verdict: Verdict,
}

impl SpectralReport {
    pub fn new(command: &str, verdict: Verdict) -> Self {
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            schema: SCHEMA_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at,
            command: command.to_string(),
            input: None,
            oracle: None,
            analysis: None,
            contour: None,
            projection: None,
            subspace: None,
            two_point: None,
            growth: None,
            verdict,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

/// Sorts eigenvalues by (re, im) for order-stable reports.
pub fn sort_eigenvalues(eigenvalues: &mut [Complex64]) {
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Max over eigenvalues of the distance to the nearest conjugate partner
/// within the same list.
pub fn conjugation_closure_residual(eigenvalues: &[Complex64]) -> f64 {
    eigenvalues
        .iter()
        .map(|e| {
            eigenvalues
                .iter()
                .map(|f| (f - e.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> SpectralReport {
        let mut report = SpectralReport::new("analyze", Verdict::AnalysisComplete);
        report.generated_at = 0;
        report.input = Some(InputDescriptor {
            path: "op.mtx".into(),
            dimension: 4,
            sha256: "ab".repeat(32),
        });
        report.oracle = Some(OracleSection {
            eigenvalues: vec![Complex64::new(0.5, -0.8), Complex64::new(0.5, 0.8)],
            conjugation_closure_residual: 0.0,
        });
        report.analysis = Some(AnalysisSection {
            cluster_count: Some(1),
            suggested_strategy: "two_point".into(),
            suggested_eta: Some(Complex64::new(0.5, 0.8)),
            dimension_note: None,
            base_norm: "euclidean".into(),
            conjugation_isometry_residual: Some(0.0),
            resolvent_conjugation_residual: Some(1e-16),
        });
        report
    }

    #[test]
    fn report_round_trips_through_json() {
        let report = sample_report();
        let text = report.to_json();
        let back: SpectralReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn skipped_oracle_serializes_as_explicit_null() {
        let mut report = SpectralReport::new("analyze", Verdict::AnalysisComplete);
        report.oracle = None;
        let text = report.to_json();
        assert!(text.contains("\"oracle\": null"), "{text}");
        // absent per-command sections are omitted entirely
        assert!(!text.contains("\"projection\""));
    }

    #[test]
    fn verdicts_use_snake_case() {
        assert_eq!(
            serde_json::to_string(&Verdict::InvariantSubspaceFound).unwrap(),
            "\"invariant_subspace_found\""
        );
        assert_eq!(
            serde_json::to_string(&Verdict::AnalysisComplete).unwrap(),
            "\"analysis_complete\""
        );
    }

    #[test]
    fn field_order_is_stable() {
        let text = sample_report().to_json();
        let pos = |key: &str| text.find(key).unwrap_or_else(|| panic!("missing {key}"));
        assert!(pos("\"schema\"") < pos("\"tool_version\""));
        assert!(pos("\"tool_version\"") < pos("\"generated_at\""));
        assert!(pos("\"generated_at\"") < pos("\"command\""));
        assert!(pos("\"command\"") < pos("\"input\""));
        assert!(pos("\"input\"") < pos("\"oracle\""));
        assert!(pos("\"oracle\"") < pos("\"verdict\""));
    }

    #[test]
    fn growth_section_clamps_overflowed_norms() {
        use crate::growth::GrowthProfile;
        let profile = GrowthProfile {
            horizon: 4,
            forward_log_norms: vec![1.0, 800.0, f64::NEG_INFINITY, 0.0],
            backward_log_norms: None,
            k_estimate: None,
            nq: None,
            is_isometry: false,
        };
        let section = GrowthSection::from_profile(
            &profile,
            IsometryCheck {
                is_isometry: false,
                is_surjective: false,
            },
        );
        assert!(section.forward_norms.iter().all(|x| x.is_finite()));
        assert_eq!(section.forward_norms[2], 0.0);
        assert_eq!(section.forward_norms[1], f64::MAX);
        let text = serde_json::to_string(&section).unwrap();
        assert!(!text.contains("null") || section.backward_norms.is_none());
    }

    #[test]
    fn eigenvalue_sorting_and_closure_residual() {
        let mut eigs = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, -1.0),
        ];
        sort_eigenvalues(&mut eigs);
        assert_eq!(eigs[0], Complex64::new(-1.0, 0.0));
        assert_eq!(eigs[1], Complex64::new(1.0, -1.0));
        assert!(conjugation_closure_residual(&eigs) <= 1e-15);

        let open = [Complex64::new(0.0, 1.0)];
        assert!((conjugation_closure_residual(&open) - 2.0).abs() <= 1e-15);
    }
}
