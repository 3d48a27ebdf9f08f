//! Command-line front end: orchestrates the analysis pipeline and emits
//! SpectralReport JSON plus Matrix Market basis files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use symspec::calculus::{
    adaptive_projection, invariance_residual_real, kernel_basis, projection_rank, range_basis,
    real_part_subspace, SubspaceBasis, DEFAULT_RANK_TOL,
};
use symspec::contour::Contour;
use symspec::error::{Error, Result};
use symspec::growth::{growth_exponent, isometry_check, nonquasianalytic_sum, power_norms};
use symspec::linalg;
use symspec::operator::{
    complexification_norm, complexify, conjugate_vector, conjugation_identity_residual,
    BaseNormKind, ComplexVector, RealOperator,
};
use symspec::report::{
    conjugation_closure_residual, sort_eigenvalues, AnalysisSection, ContourSection, GrowthSection,
    InputDescriptor, OracleSection, ProjectionSection, SpectralReport, SubspaceSection,
    TwoPointSection, Verdict,
};
use symspec::testgen::{
    direct_sum, jordan_companion, oracle_eigen, rotation_block, volterra_matrix, ORACLE_DIM_LIMIT,
};
use symspec::twopoint::{
    invariant_from_pencil, nilpotency_index, quadratic_pencil, TwoPointSpectrum,
    DEFAULT_NILPOTENCY_TOL,
};
use symspec::{mm, testgen};

/// Invariance residual above which a split result is not trusted enough to
/// report success.
const SPLIT_RESIDUAL_LIMIT: f64 = 1e-6;

/// Upper bound on the cluster merge radius relative to the operator scale,
/// so clearly separated eigenvalue groups are never merged.
const CLUSTER_RADIUS_CAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseNormArg {
    Euclidean,
    Sup,
    One,
}

impl BaseNormArg {
    fn kind(self) -> BaseNormKind {
        match self {
            BaseNormArg::Euclidean => BaseNormKind::Euclidean,
            BaseNormArg::Sup => BaseNormKind::Sup,
            BaseNormArg::One => BaseNormKind::One,
        }
    }

    fn label(self) -> &'static str {
        match self {
            BaseNormArg::Euclidean => "euclidean",
            BaseNormArg::Sup => "sup",
            BaseNormArg::One => "one",
        }
    }
}

#[derive(Parser)]
#[command(
    name = "symspec",
    version,
    about = "Symmetric invariant subspaces of real operators via contour-integral spectral projectors"
)]
struct Cli {
    /// Input operator, Matrix Market array format, real square.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    /// Base norm on the underlying real space.
    #[arg(long, global = true, value_enum, default_value_t = BaseNormArg::Euclidean)]
    base_norm: BaseNormArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Oracle spectrum, conjugation checks, growth profile, and a strategy
    /// suggestion for the splitting commands.
    Analyze,

    /// Split off the spectral subspace of a conjugate-closed stadium around
    /// a unit-circle arc and extract its real part.
    SplitArc {
        /// Arc endpoints in radians: THETA_LO THETA_HI.
        #[arg(long, num_args = 2, value_names = ["THETA_LO", "THETA_HI"], allow_negative_numbers = true, required = true)]
        arc: Vec<f64>,

        /// Stadium margin around the arc.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,

        /// Cap on quadrature nodes per loop for the adaptive refinement.
        #[arg(long, default_value_t = 1024)]
        nodes: usize,

        /// Convergence tolerance for the adaptive projection.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,

        /// Directory for the basis files.
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },

    /// Build a real invariant subspace from the quadratic pencil of a
    /// two-point spectrum {eta, conj eta}.
    TwoPoint {
        /// Pencil point as RE IM; defaults to the oracle's farthest-from-real
        /// eigenvalue (requires n <= 64).
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        eta: Option<Vec<f64>>,

        /// Maximal algebraic multiplicity hypothesis.
        #[arg(long, default_value_t = 1)]
        k: usize,

        /// Relative rank tolerance for the pencil SVD.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,

        /// Directory for the basis file.
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },

    /// Forward/backward power-norm tables with growth diagnostics.
    Growth {
        /// Largest power to tabulate.
        #[arg(long, default_value_t = 128)]
        horizon: usize,

        /// Dump n,forward,backward rows to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Generate a test operator and write it in Matrix Market format.
    Gen {
        #[command(subcommand)]
        generator: Generator,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// 2x2 rotation by THETA.
    Rotation {
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Block-diagonal sum of the given blocks.
    DirectSum {
        /// Block spec, repeatable: rotation:THETA, jordan:THETA:M, volterra:N.
        #[arg(long = "block", required = true)]
        blocks: Vec<String>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Companion matrix of ((lambda^2 - 2 cos(THETA) lambda + 1))^M.
    JordanCompanion {
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Strictly lower triangular averaging matrix of size N.
    Volterra {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    let command_line: Vec<String> = std::env::args().skip(1).collect();
    let command_string = command_line.join(" ");
    let report = match &cli.command {
        Command::Analyze => cmd_analyze(&cli, &command_string)?,
        Command::SplitArc {
            arc,
            delta,
            nodes,
            tol,
            output_dir,
        } => cmd_split_arc(&cli, &command_string, arc, *delta, *nodes, *tol, output_dir)?,
        Command::TwoPoint {
            eta,
            k,
            tol,
            output_dir,
        } => cmd_two_point(&cli, &command_string, eta.as_deref(), *k, *tol, output_dir)?,
        Command::Growth { horizon, csv } => {
            cmd_growth(&cli, &command_string, *horizon, csv.as_deref())?
        }
        Command::Gen { generator } => cmd_gen(&command_string, generator)?,
    };
    emit(&report, cli.json.as_deref())
}

fn emit(report: &SpectralReport, json_path: Option<&Path>) -> Result<()> {
    let text = report.to_json();
    match json_path {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Reads the input operator and builds its descriptor.
fn load_input(cli: &Cli) -> Result<(RealOperator, InputDescriptor)> {
    let path = cli
        .input
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--input is required for this command".into()))?;
    let bytes = fs::read(path)?;
    let t = mm::read_real_operator(path)?;
    Ok((
        t.clone(),
        InputDescriptor {
            path: path.display().to_string(),
            dimension: t.dim(),
            sha256: sha256_hex(&bytes),
        },
    ))
}

/// Oracle eigensolve, auto-disabled above [`ORACLE_DIM_LIMIT`].
fn oracle_section(t: &RealOperator) -> Result<Option<OracleSection>> {
    if t.dim() > ORACLE_DIM_LIMIT {
        return Ok(None);
    }
    let mut eigenvalues = oracle_eigen(&complexify(t))?;
    sort_eigenvalues(&mut eigenvalues);
    let residual = conjugation_closure_residual(&eigenvalues);
    Ok(Some(OracleSection {
        eigenvalues,
        conjugation_closure_residual: residual,
    }))
}

/// Merge radius for oracle eigenvalue clustering. A defective eigenvalue of
/// algebraic multiplicity m computed at backward error eps scatters over a
/// disk of radius about eps^(1/m)·‖T‖, so the radius must accommodate the
/// worst case m = n, capped at [`CLUSTER_RADIUS_CAP`]·scale.
fn cluster_radius(n: usize, scale: f64) -> f64 {
    let worst = 20.0 * f64::EPSILON.powf(1.0 / n.max(2) as f64);
    worst.min(CLUSTER_RADIUS_CAP) * scale.max(1.0)
}

/// Groups eigenvalues into conjugation-closed clusters: reflect everything
/// into the closed upper half-plane, then connect points within `radius` of
/// each other (single linkage). Returns each cluster's centroid and size.
fn conjugation_clusters(eigenvalues: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let pts: Vec<Complex64> = eigenvalues
        .iter()
        .map(|e| Complex64::new(e.re, e.im.abs()))
        .collect();
    let k = pts.len();
    let mut assigned = vec![false; k];
    let mut clusters = Vec::new();
    for i in 0..k {
        if assigned[i] {
            continue;
        }
        let mut members = Vec::new();
        let mut stack = vec![i];
        assigned[i] = true;
        while let Some(p) = stack.pop() {
            members.push(pts[p]);
            for q in 0..k {
                if !assigned[q] && (pts[p] - pts[q]).norm() <= radius {
                    assigned[q] = true;
                    stack.push(q);
                }
            }
        }
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        clusters.push((mean, members.len()));
    }
    clusters
}

fn cmd_analyze(cli: &Cli, command: &str) -> Result<SpectralReport> {
    let (t, descriptor) = load_input(cli)?;
    let n = t.dim();
    let mut report = SpectralReport::new(command, Verdict::AnalysisComplete);

    let t_norm = linalg::spectral_norm_real(&t);
    let oracle = oracle_section(&t)?;
    let (cluster_count, suggested_strategy, suggested_eta) = match &oracle {
        Some(section) => {
            let radius = cluster_radius(n, t_norm);
            let clusters = conjugation_clusters(&section.eigenvalues, radius);
            // A cluster hugging the real axis closer than its own scatter
            // radius is a real eigenvalue group, not a conjugate pair.
            let pair = clusters.first().filter(|(mean, _)| mean.im > radius);
            if clusters.len() >= 2 {
                (Some(clusters.len()), "contour_split", None)
            } else if let Some((eta, _)) = pair {
                (Some(1), "two_point", Some(*eta))
            } else {
                (Some(clusters.len()), "cyclic", None)
            }
        }
        None => (None, "cyclic", None),
    };

    let dimension_note = (n <= 2).then(|| {
        format!("dimension {n} is at most 2: proper splitting needs dimension at least 3")
    });

    // Base-norm diagnostics on a seeded probe: J should be an isometry of the
    // complexification norm, and the resolvent should intertwine with J.
    let base = cli.base_norm.kind();
    let probe = testgen::random_complex_vector(n, 0xA11A);
    let z = ComplexVector::from_complex(&probe);
    let jz = conjugate_vector(&z);
    let norm_z = complexification_norm(&z, base, 256)?;
    let norm_jz = complexification_norm(&jz, base, 256)?;
    let lambda = Complex64::new(0.75, 0.5) * (2.0 * t_norm + 1.0);
    let resolvent_residual = conjugation_identity_residual(&t, lambda)?;

    report.analysis = Some(AnalysisSection {
        cluster_count,
        suggested_strategy: suggested_strategy.to_string(),
        suggested_eta,
        dimension_note,
        base_norm: cli.base_norm.label().to_string(),
        conjugation_isometry_residual: Some((norm_z - norm_jz).abs()),
        resolvent_conjugation_residual: Some(resolvent_residual),
    });

    let horizon = 64;
    let mut profile = power_norms(&t, horizon)?;
    profile.k_estimate = Some(growth_exponent(&profile)?);
    if profile.backward_log_norms.is_some() {
        profile.nq = Some(nonquasianalytic_sum(&profile)?);
    }
    report.growth = Some(GrowthSection::from_profile(
        &profile,
        isometry_check(&t, 1e-10),
    ));

    report.input = Some(descriptor);
    report.oracle = oracle;
    Ok(report)
}

/// Writes orthonormal real basis columns as a Matrix Market array.
fn write_basis(path: &Path, basis: &SubspaceBasis) -> Result<()> {
    let columns = basis
        .real_columns()
        .expect("split pipeline produces real bases");
    let col_major: Vec<f64> = columns.iter().flatten().copied().collect();
    mm::write_real_array(path, basis.space_dim(), basis.rank(), &col_major)
}

fn cmd_split_arc(
    cli: &Cli,
    command: &str,
    arc: &[f64],
    delta: f64,
    nodes: usize,
    tol: f64,
    output_dir: &Path,
) -> Result<SpectralReport> {
    let (t, descriptor) = load_input(cli)?;
    let n = t.dim();
    let contour = Contour::arc_stadium(arc[0], arc[1], delta, true);
    contour.validate()?;

    let oracle = oracle_section(&t)?;
    let known = oracle.as_ref().map(|o| o.eigenvalues.clone());
    let a = complexify(&t);
    let (p, nodes_used) = adaptive_projection(&a, &contour, tol, nodes, known.as_deref())?;

    let idempotency = linalg::spectral_norm_complex(&p.matmul(&p).sub(&p));
    let a_norm = linalg::spectral_norm_complex(&a);
    let commutation = linalg::spectral_norm_complex(&a.matmul(&p).sub(&p.matmul(&a))) / a_norm;

    // Idempotents have singular values 0 or >= 1, so this rank decision is
    // robust even when the contour encloses nothing and P is rounding noise.
    let rank = projection_rank(&p);
    if rank == 0 || rank == n {
        return Err(Error::TrivialSplit { rank, n });
    }
    let range = range_basis(&p, DEFAULT_RANK_TOL)?;
    let kernel = kernel_basis(&p, DEFAULT_RANK_TOL)?;

    let mut real_range = real_part_subspace(&range, 1e-8)?;
    let real_kernel = real_part_subspace(&kernel, 1e-8)?;
    let invariance = invariance_residual_real(&t, &real_range);
    real_range.invariance_residual = Some(invariance);
    if invariance > SPLIT_RESIDUAL_LIMIT {
        return Err(Error::NotConverged {
            residual: invariance,
            nodes: nodes_used,
            nearest_eigenvalue_distance: None,
        });
    }

    fs::create_dir_all(output_dir)?;
    let basis_file = output_dir.join("subspace_basis.mtx");
    let complement_file = output_dir.join("subspace_complement.mtx");
    write_basis(&basis_file, &real_range)?;
    write_basis(&complement_file, &real_kernel)?;

    let mut report = SpectralReport::new(command, Verdict::InvariantSubspaceFound);
    report.input = Some(descriptor);
    report.oracle = oracle;
    report.contour = Some(ContourSection {
        contour,
        nodes_per_loop: nodes_used,
    });
    report.projection = Some(ProjectionSection {
        nodes_used,
        trace: p.trace(),
        rank,
        idempotency_residual: idempotency,
        commutation_residual: commutation,
        max_imag: p.max_imag(),
    });
    report.subspace = Some(SubspaceSection {
        rank: real_range.rank(),
        complement_rank: real_kernel.rank(),
        symmetry_residual: real_range.symmetry_residual,
        invariance_residual: Some(invariance),
        basis_file: Some(basis_file.display().to_string()),
        complement_file: Some(complement_file.display().to_string()),
    });
    Ok(report)
}

fn cmd_two_point(
    cli: &Cli,
    command: &str,
    eta_flag: Option<&[f64]>,
    k: usize,
    tol: f64,
    output_dir: &Path,
) -> Result<SpectralReport> {
    let (t, descriptor) = load_input(cli)?;
    let oracle = oracle_section(&t)?;

    let spectrum = match eta_flag {
        Some(pair) => TwoPointSpectrum::new(Complex64::new(pair[0], pair[1]), k)?,
        None => match &oracle {
            Some(section) => TwoPointSpectrum::estimate(&section.eigenvalues, k)?,
            None => {
                return Err(Error::InvalidArgument(
                    "--eta is required when the oracle is disabled (n > 64)".into(),
                ))
            }
        },
    };

    let pencil = quadratic_pencil(&t, spectrum.eta);
    let pencil_norm = linalg::spectral_norm_real(&pencil);
    let nilpotency = nilpotency_index(&pencil, spectrum.k + 1, DEFAULT_NILPOTENCY_TOL)?;
    let (basis, branch) = invariant_from_pencil(&t, spectrum.eta, tol)?;
    let residual = basis.invariance_residual.unwrap_or(0.0);
    if residual > SPLIT_RESIDUAL_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "pencil subspace for eta {} is not invariant (residual {residual:.3e}); \
             the spectrum near eta is probably not a separated pair",
            spectrum.eta
        )));
    }

    fs::create_dir_all(output_dir)?;
    let basis_file = output_dir.join("two_point_basis.mtx");
    write_basis(&basis_file, &basis)?;

    let mut report = SpectralReport::new(command, Verdict::InvariantSubspaceFound);
    report.input = Some(descriptor);
    report.oracle = oracle;
    report.two_point = Some(TwoPointSection {
        eta: spectrum.eta,
        k: spectrum.k,
        cluster_radius: (eta_flag.is_none()).then_some(spectrum.cluster_radius),
        pencil_norm,
        nilpotency_index: nilpotency,
        branch,
        rank: basis.rank(),
        invariance_residual: residual,
        basis_file: Some(basis_file.display().to_string()),
    });
    Ok(report)
}

fn cmd_growth(
    cli: &Cli,
    command: &str,
    horizon: usize,
    csv: Option<&Path>,
) -> Result<SpectralReport> {
    let (t, descriptor) = load_input(cli)?;
    let oracle = oracle_section(&t)?;

    let mut profile = power_norms(&t, horizon)?;
    if horizon >= 16 {
        profile.k_estimate = Some(growth_exponent(&profile)?);
        if profile.backward_log_norms.is_some() {
            profile.nq = Some(nonquasianalytic_sum(&profile)?);
        }
    }

    if let Some(path) = csv {
        let forward = profile.forward_norms();
        let backward = profile.backward_norms();
        let mut out = String::from("n,forward,backward\n");
        for i in 0..profile.horizon {
            let back = backward
                .as_ref()
                .map(|b| format!("{:e}", b[i]))
                .unwrap_or_default();
            out.push_str(&format!("{},{:e},{}\n", i + 1, forward[i], back));
        }
        fs::write(path, out)?;
    }

    let mut report = SpectralReport::new(command, Verdict::GrowthProfile);
    report.input = Some(descriptor);
    report.oracle = oracle;
    report.growth = Some(GrowthSection::from_profile(
        &profile,
        isometry_check(&t, 1e-10),
    ));
    Ok(report)
}

/// Parses a direct-sum block spec: rotation:THETA | jordan:THETA:M | volterra:N.
fn parse_block(spec: &str) -> Result<RealOperator> {
    let bad = |msg: &str| Error::InvalidArgument(format!("block spec '{spec}': {msg}"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["rotation", theta] => {
            let theta: f64 = theta.parse().map_err(|_| bad("bad angle"))?;
            Ok(rotation_block(theta))
        }
        ["jordan", theta, m] => {
            let theta: f64 = theta.parse().map_err(|_| bad("bad angle"))?;
            let m: usize = m.parse().map_err(|_| bad("bad multiplicity"))?;
            jordan_companion(theta, m)
        }
        ["volterra", n] => {
            let n: usize = n.parse().map_err(|_| bad("bad size"))?;
            volterra_matrix(n)
        }
        _ => Err(bad("expected rotation:THETA, jordan:THETA:M, or volterra:N")),
    }
}

fn cmd_gen(command: &str, generator: &Generator) -> Result<SpectralReport> {
    let (t, output) = match generator {
        Generator::Rotation { theta, output } => (rotation_block(*theta), output),
        Generator::DirectSum { blocks, output } => {
            let parsed: Vec<RealOperator> =
                blocks.iter().map(|s| parse_block(s)).collect::<Result<_>>()?;
            (direct_sum(&parsed)?, output)
        }
        Generator::JordanCompanion { theta, m, output } => (jordan_companion(*theta, *m)?, output),
        Generator::Volterra { n, output } => (volterra_matrix(*n)?, output),
    };
    mm::write_real_operator(output, &t)?;
    let bytes = fs::read(output)?;

    let mut report = SpectralReport::new(command, Verdict::Generated);
    report.input = Some(InputDescriptor {
        path: output.display().to_string(),
        dimension: t.dim(),
        sha256: sha256_hex(&bytes),
    });
    Ok(report)
}
