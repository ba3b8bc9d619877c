use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use proxcycle::certifier::{certify, SamplingPlan};
use proxcycle::gallery;
use proxcycle::io::{fmt_num, fmt_point, read_point_set, trace_to_csv, write_atomic, OutcomeRecord};
use proxcycle::iterator::{self, check_step_bound, Outcome, SelectionPolicy};
use proxcycle::metric::{hausdorff, set_distance, Point};
use proxcycle::params::{
    classify_region, derived_constants, raw_region_membership, region_audit, audit_grid_point,
    ContractionParams, RegionLabel,
};
use proxcycle::{Error, Instance};

#[derive(Parser)]
#[command(name = "proxcycle", version, about = "Fixed points and best proximity points of cyclic contractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Region of (alpha, beta) and, with --k, the derived rate constants.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<f64>,
    },
    /// Count region memberships over an N x N grid of the parameter triangle.
    Audit {
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Per-point labels as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the contractive condition on an instance.
    Certify {
        instance: PathBuf,
        /// Number of seeded random pairs (parametric instances).
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also report failures of the two-argument rate inequality.
        #[arg(long)]
        literal_derived: bool,
    },
    /// Generate an orbit and detect its limit.
    Iterate {
        instance: PathBuf,
        /// Start point, comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, value_enum, default_value_t = Policy::Nearest)]
        policy: Policy,
        /// Seed for the random policy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = iterator::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = iterator::DEFAULT_TOL)]
        tol: f64,
        /// Trace CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Outcome JSON path; defaults to the trace path with a .json extension.
        #[arg(long)]
        outcome: Option<PathBuf>,
    },
    /// Hausdorff distance and set distance between two point-set files.
    Hausdorff { set_a: PathBuf, set_b: PathBuf },
    /// Write a gallery instance.
    Gallery {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = gallery::DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Contraction factor (intersecting family).
        #[arg(long, default_value_t = 0.5)]
        k: f64,
        /// Ball radius (multivalued family).
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Samples per image ball (multivalued family).
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        size_a: usize,
        #[arg(long, default_value_t = 8)]
        size_b: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Nearest,
    FirstListed,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Midpoint,
    Intersecting,
    MultivaluedBall,
    Expansive,
    FiniteRandom,
}

/// Exit status for a failed command.
fn failure(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::ParamsUnsupported(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InstanceFormat(format!("{}: {e}", path.display())))?;
    Instance::from_json(&text)
}

fn raw_labels(labels: &[RegionLabel]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_classify(alpha: f64, beta: f64, k: Option<f64>) -> ExitCode {
    let label = classify_region(alpha, beta);
    let mut line = match raw_region_membership(alpha, beta) {
        Ok(raw) => format!("{label}; raw={{{}}}", raw_labels(&raw)),
        Err(_) => label.to_string(),
    };
    if let Some(k) = k {
        match ContractionParams::new(k, alpha, beta, None).and_then(|p| derived_constants(&p)) {
            Ok(c) => line.push_str(&format!(
                " K1={} K2={} omega*={}",
                fmt_num(c.k1),
                fmt_num(c.k2),
                fmt_num(c.omega_star)
            )),
            Err(e) => line.push_str(&format!(" ({e})")),
        }
    }
    println!("{line}");
    ExitCode::SUCCESS
}

fn cmd_audit(grid: usize, csv_path: Option<&Path>) -> Result<ExitCode, Error> {
    let audit = region_audit(grid)?;
    let counts = |m: &std::collections::BTreeMap<RegionLabel, usize>| {
        m.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("grid={} points={} in_delta={}", grid, grid * grid, audit.in_delta);
    println!("raw: {}", counts(&audit.raw_counts));
    println!("classified: {}", counts(&audit.classified_counts));
    println!("overlapping={}", audit.overlapping);
    println!("Delta3 count={}", audit.delta3);
    println!("Delta4-only count={}", audit.delta4_only);
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["alpha", "beta", "label", "raw"])?;
        for i in 0..grid {
            for j in 0..grid {
                let (a, b) = audit_grid_point(grid, i, j);
                let raw = raw_region_membership(a, b)
                    .map(|r| raw_labels(&r))
                    .unwrap_or_default();
                w.write_record([
                    a.to_string(),
                    b.to_string(),
                    classify_region(a, b).to_string(),
                    raw,
                ])?;
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        write_atomic(path, &bytes)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(
    path: &Path,
    samples: usize,
    seed: u64,
    out: Option<&Path>,
    literal_derived: bool,
) -> Result<ExitCode, Error> {
    let inst = load_instance(path)?;
    let plan = SamplingPlan {
        random_pairs: samples,
        seed,
        literal_derived,
        ..SamplingPlan::default()
    };
    let cert = certify(&inst, &plan)?;
    let mut json = serde_json::to_string_pretty(&cert)?;
    json.push('\n');
    match out {
        Some(p) => {
            write_atomic(p, json.as_bytes())?;
            println!(
                "certified={} mode={} pairs={} violations={} derived_violations={}",
                cert.certified,
                serde_json::to_value(cert.mode)?.as_str().unwrap_or_default(),
                cert.pairs_checked,
                cert.violations.len(),
                cert.derived_violations.len()
            );
        }
        None => print!("{json}"),
    }
    Ok(if cert.certified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_point(s: &str) -> Result<Point, Error> {
    let coords = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::Domain(format!("bad coordinate {c:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Point::new(coords).map_err(|e| Error::Domain(e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_iterate(
    path: &Path,
    x0: &str,
    policy: Policy,
    seed: u64,
    max_iter: usize,
    tol: f64,
    out: &Path,
    outcome_path: Option<&Path>,
) -> Result<ExitCode, Error> {
    let inst = load_instance(path)?;
    let mut x0 = parse_point(x0)?;
    if x0.dim() != inst.dim() {
        return Err(Error::Domain(format!(
            "start point has dimension {}, instance has {}",
            x0.dim(),
            inst.dim()
        )));
    }
    if inst.is_table() {
        // snap to the nearest tabulated point of A ∪ B
        let mut best: Option<(f64, Point)> = None;
        for sp in inst.domain_points() {
            let d = proxcycle::metric::distance(&x0, &sp.point)?;
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, sp.point));
            }
        }
        x0 = best.expect("instances are nonempty").1;
    }
    let policy = match policy {
        Policy::Nearest => SelectionPolicy::Nearest,
        Policy::FirstListed => SelectionPolicy::FirstListed,
        Policy::Random => SelectionPolicy::SeededRandom(seed),
    };
    let trace = iterator::run(&inst, &x0, policy, max_iter, tol)?;
    let checks = check_step_bound(&trace, &inst.constants()?);
    let record = OutcomeRecord::new(
        &trace,
        checks.iter().all(|c| c.passed()),
        checks.iter().all(|c| c.lower_ok),
    );
    write_atomic(out, &trace_to_csv(&trace)?)?;
    let outcome_path = outcome_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out.with_extension("json"));
    let mut json = serde_json::to_string_pretty(&record)?;
    json.push('\n');
    write_atomic(&outcome_path, json.as_bytes())?;

    let tail = format!(
        "D={} iterations={} final_step={}",
        fmt_num(trace.d),
        trace.iterations(),
        fmt_num(trace.step_dist.last().copied().unwrap_or(0.0))
    );
    let outcome = trace.outcome.as_ref().expect("run attaches an outcome");
    match outcome {
        Outcome::FixedPoint { z } => println!("FixedPoint z={} {tail}", fmt_point(z)),
        Outcome::BestProximityPair { z_a, z_b } => println!(
            "BestProximityPair z_A={} z_B={} {tail}",
            fmt_point(z_a),
            fmt_point(z_b)
        ),
        Outcome::NotConverged { reason } => println!("NotConverged {tail} ({reason})"),
    }
    Ok(if outcome.is_converged() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_hausdorff(a: &Path, b: &Path) -> Result<ExitCode, Error> {
    let read = |p: &Path| {
        std::fs::read_to_string(p)
            .map_err(|e| Error::InstanceFormat(format!("{}: {e}", p.display())))
            .and_then(|t| read_point_set(&t))
    };
    let (sa, sb) = (read(a)?, read(b)?);
    let h = hausdorff(&sa, &sb)?;
    let d = set_distance(&sa, &sb)?;
    println!("H={} D={}", fmt_num(h), fmt_num(d));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gallery(
    family: Family,
    out: &Path,
    resolution: usize,
    k: f64,
    eps: f64,
    samples: usize,
    seed: u64,
    size_a: usize,
    size_b: usize,
) -> Result<ExitCode, Error> {
    let inst = match family {
        Family::Midpoint => gallery::make_midpoint_cyclic(resolution)?,
        Family::Intersecting => gallery::make_intersecting(k, resolution)?,
        Family::MultivaluedBall => gallery::make_multivalued_ball(eps, samples, resolution)?,
        Family::Expansive => gallery::make_expansive_counterexample()?,
        Family::FiniteRandom => gallery::make_finite_random(seed, size_a, size_b)?,
    };
    let mut json = inst.to_json()?;
    json.push('\n');
    write_atomic(out, json.as_bytes())?;
    println!(
        "wrote {} (D={} omega={})",
        out.display(),
        fmt_num(inst.set_distance()),
        fmt_num(inst.omega()?)
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { alpha, beta, k } => Ok(cmd_classify(alpha, beta, k)),
        Command::Audit { grid, csv } => cmd_audit(grid, csv.as_deref()),
        Command::Certify {
            instance,
            samples,
            seed,
            out,
            literal_derived,
        } => cmd_certify(&instance, samples, seed, out.as_deref(), literal_derived),
        Command::Iterate {
            instance,
            x0,
            policy,
            seed,
            max_iter,
            tol,
            out,
            outcome,
        } => cmd_iterate(
            &instance,
            &x0,
            policy,
            seed,
            max_iter,
            tol,
            &out,
            outcome.as_deref(),
        ),
        Command::Hausdorff { set_a, set_b } => cmd_hausdorff(&set_a, &set_b),
        Command::Gallery {
            family,
            out,
            resolution,
            k,
            eps,
            samples,
            seed,
            size_a,
            size_b,
        } => cmd_gallery(family, &out, resolution, k, eps, samples, seed, size_a, size_b),
    };
    result.unwrap_or_else(|e| failure(&e))
}
