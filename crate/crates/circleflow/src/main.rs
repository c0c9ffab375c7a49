//! `circleflow` — decide and compute ideal circle patterns on closed
//! oriented surfaces.
//!
//! Subcommands: `validate`, `character`, `flow`, `criteria`, `gradcheck`.
//! Reports are JSON documents on stdout (or `--out`); `flow` additionally
//! writes a trajectory CSV with `--traj`.
//!
//! Exit codes: 0 success (for `flow`: converged), 1 input or configuration
//! error, 2 usage error (for `flow`: collapsed to zero), 3 flow
//! undetermined.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use circleflow::format::{trajectory_csv, DecompositionFile, ValuesFile};
use circleflow::report::{
    B1Section, CharacterSection, ClassificationSection, ComplexSummary, FlowSection, GradcheckRow,
    PrescribedSection, RunReport, SubsetSection, Toleranced,
};
use circleflow_core::criteria::{
    check_prescribed, check_subset_inequalities, classify_character, SubsetMode,
    SUBSET_ENUMERATION_CAP,
};
use circleflow_core::flow::{run_flow, FlowConfig, FlowStatus, FlowTarget};
use circleflow_core::geometry::{
    curvature_vector, gauss_bonnet_residual, inner_angle, inner_angle_gradient, CurvatureVector,
    Geometry, PatternState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GeometryArg {
    Euclidean,
    Hyperbolic,
}

impl From<GeometryArg> for Geometry {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::Euclidean => Geometry::Euclidean,
            GeometryArg::Hyperbolic => Geometry::Hyperbolic,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "circleflow",
    version,
    about = "Ideal circle patterns on closed surfaces: validation, characters, curvature flows, and existence criteria",
    propagate_version = true
)]
struct Cli {
    /// Directory prepended to relative --out/--traj paths.
    #[arg(long, global = true, env = "CIRCLEFLOW_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a decomposition file: surface structure and the per-face
    /// weight-sum condition. Exit 0 iff both hold.
    Validate {
        /// Decomposition spec file (JSON).
        spec: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report per-vertex characters, the mean identity, and the threshold
    /// classification.
    Character {
        /// Decomposition spec file (JSON).
        spec: PathBuf,
        /// Classify for one geometry only (default: both).
        #[arg(long, value_enum)]
        geometry: Option<GeometryArg>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a combinatorial Ricci flow. Exit 0 converged, 2 collapsed
    /// to zero, 3 undetermined.
    Flow {
        /// Decomposition spec file (JSON).
        spec: PathBuf,
        /// Background geometry.
        #[arg(long, value_enum)]
        geometry: GeometryArg,
        /// Prescribed curvature file; default target is zero curvature
        /// (hyperbolic) or the average (Euclidean).
        #[arg(long)]
        prescribed: Option<PathBuf>,
        /// Initial radii file; default all ones.
        #[arg(long)]
        radii: Option<PathBuf>,
        /// Absolute step-error tolerance.
        #[arg(long, default_value_t = 1e-12)]
        abs_tol: f64,
        /// Relative step-error tolerance.
        #[arg(long, default_value_t = 1e-12)]
        rel_tol: f64,
        /// Convergence threshold on the sup-norm curvature gap (radians).
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        /// Flow-time budget.
        #[arg(long, default_value_t = 1000.0)]
        max_time: f64,
        /// Log-radius collapse floor.
        #[arg(long, default_value_t = -50.0, allow_hyphen_values = true)]
        collapse_floor: f64,
        /// Record every k-th accepted step.
        #[arg(long, default_value_t = 1)]
        sample_stride: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the trajectory CSV here.
        #[arg(long)]
        traj: Option<PathBuf>,
    },
    /// Evaluate every applicable existence criterion: character thresholds,
    /// prescribed intervals, and exhaustive subset inequalities.
    Criteria {
        /// Decomposition spec file (JSON).
        spec: PathBuf,
        /// Background geometry.
        #[arg(long, value_enum)]
        geometry: GeometryArg,
        /// Prescribed curvature file for the interval test (also used as
        /// the curvature in the image-description subset checks when no
        /// radii are given).
        #[arg(long)]
        prescribed: Option<PathBuf>,
        /// Radii file; its curvature feeds the image-description subset
        /// checks.
        #[arg(long)]
        radii: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic inner-angle gradients against central finite
    /// differences on seeded random samples, both geometries.
    Gradcheck {
        /// Number of samples per geometry.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// RNG seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { spec, out } => cmd_validate(&spec, out, cli.out_dir),
        Command::Character { spec, geometry, out } => {
            cmd_character(&spec, geometry, out, cli.out_dir)
        }
        Command::Flow {
            spec,
            geometry,
            prescribed,
            radii,
            abs_tol,
            rel_tol,
            eps,
            max_time,
            collapse_floor,
            sample_stride,
            out,
            traj,
        } => cmd_flow(FlowArgs {
            spec,
            geometry,
            prescribed,
            radii,
            abs_tol,
            rel_tol,
            eps,
            max_time,
            collapse_floor,
            sample_stride,
            out,
            traj,
            out_dir: cli.out_dir,
        }),
        Command::Criteria {
            spec,
            geometry,
            prescribed,
            radii,
            out,
        } => cmd_criteria(&spec, geometry, prescribed, radii, out, cli.out_dir),
        Command::Gradcheck { samples, seed, out } => {
            cmd_gradcheck(samples as usize, seed, out, cli.out_dir)
        }
    }
}

fn resolve(out_dir: &Option<PathBuf>, path: PathBuf) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path,
    }
}

fn emit(report: &RunReport, out: Option<PathBuf>, out_dir: &Option<PathBuf>) -> Result<()> {
    let text = report.to_json();
    match out {
        Some(path) => {
            let path = resolve(out_dir, path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("cannot create {}", parent.display()))?;
                }
            }
            std::fs::write(&path, text)
                .with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("report written to {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_validate(spec: &Path, out: Option<PathBuf>, out_dir: Option<PathBuf>) -> Result<u8> {
    let config = serde_json::json!({ "spec": spec.display().to_string() });
    let file = DecompositionFile::read(spec)?;
    let complex = file.build()?;
    let b1 = complex.validate_b1();

    let mut report = RunReport::new("validate", config);
    report.complex = Some(ComplexSummary::of(&complex));
    report.face_condition = Some(B1Section::of(&complex, &b1));
    let ok = b1.pass();
    emit(&report, out, &out_dir)?;
    eprintln!(
        "valid surface; face condition {}",
        if ok { "passes" } else { "FAILS" }
    );
    Ok(if ok { 0 } else { 1 })
}

fn cmd_character(
    spec: &Path,
    geometry: Option<GeometryArg>,
    out: Option<PathBuf>,
    out_dir: Option<PathBuf>,
) -> Result<u8> {
    let config = serde_json::json!({
        "spec": spec.display().to_string(),
        "geometry": geometry.map(|g| Geometry::from(g).to_string()),
    });
    let file = DecompositionFile::read(spec)?;
    let complex = file.build()?;
    let characters = complex.character();

    let mut report = RunReport::new("character", config);
    report.complex = Some(ComplexSummary::of(&complex));
    report.face_condition = Some(B1Section::of(&complex, &complex.validate_b1()));
    report.characters = Some(CharacterSection::of(&complex, &characters));

    let geometries: Vec<Geometry> = match geometry {
        Some(g) => vec![g.into()],
        None => vec![Geometry::Euclidean, Geometry::Hyperbolic],
    };
    for g in geometries {
        match classify_character(&complex, g) {
            Ok(r) => report.classifications.push(ClassificationSection::of(&r)),
            Err(e) => eprintln!("classification ({g}) unavailable: {e}"),
        }
    }
    emit(&report, out, &out_dir)?;
    Ok(0)
}

struct FlowArgs {
    spec: PathBuf,
    geometry: GeometryArg,
    prescribed: Option<PathBuf>,
    radii: Option<PathBuf>,
    abs_tol: f64,
    rel_tol: f64,
    eps: f64,
    max_time: f64,
    collapse_floor: f64,
    sample_stride: usize,
    out: Option<PathBuf>,
    traj: Option<PathBuf>,
    out_dir: Option<PathBuf>,
}

fn cmd_flow(args: FlowArgs) -> Result<u8> {
    let geometry: Geometry = args.geometry.into();
    let config = serde_json::json!({
        "spec": args.spec.display().to_string(),
        "geometry": geometry.to_string(),
        "prescribed": args.prescribed.as_ref().map(|p| p.display().to_string()),
        "radii": args.radii.as_ref().map(|p| p.display().to_string()),
        "abs_tol": args.abs_tol,
        "rel_tol": args.rel_tol,
        "convergence_eps": args.eps,
        "max_time": args.max_time,
        "collapse_floor": args.collapse_floor,
        "sample_stride": args.sample_stride,
    });
    let file = DecompositionFile::read(&args.spec)?;
    let complex = file.build()?;
    let n = complex.vertex_count();

    let initial = match &args.radii {
        Some(path) => PatternState::new(ValuesFile::read(path)?)
            .map_err(|e| anyhow::anyhow!("bad initial radii: {e}"))?,
        None => PatternState::uniform(n, 1.0).expect("unit radii are valid"),
    };
    let target = match &args.prescribed {
        Some(path) => FlowTarget::Prescribed(ValuesFile::read(path)?),
        None => match geometry {
            Geometry::Hyperbolic => FlowTarget::ZeroCurvature,
            Geometry::Euclidean => FlowTarget::AverageCurvature,
        },
    };
    let cfg = FlowConfig {
        geometry,
        target,
        initial_radii: initial,
        abs_tol: args.abs_tol,
        rel_tol: args.rel_tol,
        convergence_eps: args.eps,
        collapse_floor: args.collapse_floor,
        max_time: args.max_time,
        sample_stride: args.sample_stride,
    };

    let result = run_flow(&complex, &cfg).map_err(|e| anyhow::anyhow!("flow setup: {e}"))?;

    // Collapsed states sit below the public kernel floor; report the
    // residual only where the kernels accept the state.
    let triangulation = complex.triangulate();
    let gb = gauss_bonnet_residual(&triangulation, geometry, &result.final_state)
        .ok()
        .map(|r| {
            let tol = match geometry {
                Geometry::Euclidean => 1e-9,
                Geometry::Hyperbolic => 1e-8,
            };
            Toleranced::new(r, tol)
        });

    let mut report = RunReport::new("flow", config);
    report.complex = Some(ComplexSummary::of(&complex));
    report.face_condition = Some(B1Section::of(&complex, &complex.validate_b1()));
    report.characters = Some(CharacterSection::of(&complex, &complex.character()));
    report.flow = Some(FlowSection::of(&result, gb));

    if let Some(path) = args.traj {
        let path = resolve(&args.out_dir, path);
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(&path, trajectory_csv(n, &result.trajectory))
            .with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("trajectory written to {}", path.display());
    }
    emit(&report, args.out, &args.out_dir)?;

    let gap = result
        .trajectory
        .last()
        .map(|s| s.gap_sup_norm)
        .unwrap_or(f64::NAN);
    eprintln!(
        "{} at t={:.6} (gap {:.3e}, {} steps)",
        result.status, result.final_time, gap, result.steps_accepted
    );
    Ok(match result.status {
        FlowStatus::Converged => 0,
        FlowStatus::CollapsedToZero => 2,
        FlowStatus::Undetermined => 3,
    })
}

fn cmd_criteria(
    spec: &Path,
    geometry: GeometryArg,
    prescribed: Option<PathBuf>,
    radii: Option<PathBuf>,
    out: Option<PathBuf>,
    out_dir: Option<PathBuf>,
) -> Result<u8> {
    let geometry: Geometry = geometry.into();
    let config = serde_json::json!({
        "spec": spec.display().to_string(),
        "geometry": geometry.to_string(),
        "prescribed": prescribed.as_ref().map(|p| p.display().to_string()),
        "radii": radii.as_ref().map(|p| p.display().to_string()),
    });
    let file = DecompositionFile::read(spec)?;
    let complex = file.build()?;

    let mut report = RunReport::new("criteria", config);
    report.complex = Some(ComplexSummary::of(&complex));
    report.face_condition = Some(B1Section::of(&complex, &complex.validate_b1()));
    report.characters = Some(CharacterSection::of(&complex, &complex.character()));

    let classification =
        classify_character(&complex, geometry).map_err(|e| anyhow::anyhow!("{e}"))?;
    report
        .classifications
        .push(ClassificationSection::of(&classification));

    let kbar = prescribed.map(|p| ValuesFile::read(&p)).transpose()?;
    if let Some(kbar) = &kbar {
        let r = check_prescribed(&complex, geometry, kbar).map_err(|e| anyhow::anyhow!("{e}"))?;
        report.prescribed = Some(PrescribedSection::of(&r));
    }

    if complex.vertex_count() <= SUBSET_ENUMERATION_CAP {
        for mode in [SubsetMode::GhzH3, SubsetMode::GhzE3] {
            let r = check_subset_inequalities(&complex, mode, None)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            report.subset_checks.push(SubsetSection::of(&r));
        }
        // The image-description checks need a curvature vector: from the
        // radii when given, otherwise the prescribed values serve.
        let curvature: Option<CurvatureVector> = match &radii {
            Some(path) => {
                let r = PatternState::new(ValuesFile::read(path)?)
                    .map_err(|e| anyhow::anyhow!("bad radii: {e}"))?;
                let t = complex.triangulate();
                Some(curvature_vector(&t, geometry, &r).map_err(|e| anyhow::anyhow!("{e}"))?)
            }
            None => kbar.map(CurvatureVector::from_values),
        };
        if let Some(k) = curvature {
            let mode = match geometry {
                Geometry::Hyperbolic => SubsetMode::BsHyperbolic,
                Geometry::Euclidean => SubsetMode::BsEuclidean,
            };
            let r = check_subset_inequalities(&complex, mode, Some(&k))
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            report.subset_checks.push(SubsetSection::of(&r));
        }
    } else {
        eprintln!(
            "subset checks skipped: {} vertices exceed the cap of {}",
            complex.vertex_count(),
            SUBSET_ENUMERATION_CAP
        );
    }

    emit(&report, out, &out_dir)?;
    Ok(0)
}

fn cmd_gradcheck(
    samples: usize,
    seed: u64,
    out: Option<PathBuf>,
    out_dir: Option<PathBuf>,
) -> Result<u8> {
    let config = serde_json::json!({ "samples": samples, "seed": seed });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut all_pass = true;
    for geometry in [Geometry::Euclidean, Geometry::Hyperbolic] {
        let mut max_rel: f64 = 0.0;
        for _ in 0..samples {
            let ri = rng.gen_range(0.01..10.0);
            let rj = rng.gen_range(0.01..10.0);
            let phi = rng.gen_range(0.05..(std::f64::consts::PI - 0.05));
            let h = 1e-6;
            let (di, dj) = inner_angle_gradient(geometry, ri, rj, phi)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let theta = |a: f64, b: f64| inner_angle(geometry, a, b, phi).unwrap();
            let fd_i = (theta(ri + h, rj) - theta(ri - h, rj)) / (2.0 * h);
            let fd_j = (theta(ri, rj + h) - theta(ri, rj - h)) / (2.0 * h);
            // Error relative to the gradient magnitude: components below
            // the finite-difference noise floor carry no oracle signal but
            // are also negligible inside the gradient.
            let scale = di.abs().max(dj.abs());
            max_rel = max_rel
                .max((di - fd_i).abs() / scale)
                .max((dj - fd_j).abs() / scale);
        }
        let pass = max_rel < 1e-6;
        all_pass &= pass;
        rows.push(GradcheckRow {
            geometry: geometry.to_string(),
            samples,
            max_rel_error: max_rel,
            pass,
        });
    }

    let mut report = RunReport::new("gradcheck", config);
    report.gradcheck = rows;
    emit(&report, out, &out_dir)?;
    for row in &report.gradcheck {
        eprintln!(
            "{:<12} {:>6} samples  max rel err {:.3e}  {}",
            row.geometry,
            row.samples,
            row.max_rel_error,
            if row.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(if all_pass { 0 } else { 1 })
}
