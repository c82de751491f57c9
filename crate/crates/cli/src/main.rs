//! Command-line front end for the intgap library.
//!
//! Exit codes: 0 on success, 1 on usage or domain errors, 2 when a
//! verification-style subcommand runs cleanly but the check fails,
//! 3 on internal failures (solver, calibration, I/O). `INTGAP_THREADS`
//! caps the worker pool; computation is otherwise deterministic given
//! the arguments.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use intgap::certificates::{
    bessel_energy, bound_profile, certify_with_schedule, check_certificate, default_grid_points,
    recursion_integral, spherical_constant, CertifyOutcome,
};
use intgap::constructions::{
    build_sarkozy3d, build_snowflake_curve, lift_constants, snowflake_lift,
};
use intgap::io::{
    read_certificate, read_point_set, write_certificate, write_point_set, CertificateFile,
    PointSetFile,
};
use intgap::oracles::{greedy_valid_subset, max_valid_subset};
use intgap::rational::format_rational;
use intgap::{pairwise_verify, Delta, Error, NormSpec, Point};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "intgap", version, about = "Point sets avoiding near-integer distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a point set and write it to a file
    #[command(subcommand)]
    Construct(Construct),

    /// Check that every pairwise distance keeps its gap at least delta
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Gap parameter, "p/q" or an exact decimal
        #[arg(long)]
        delta: String,
        /// "l2" or "lp:<p>"; defaults to the norm recorded in the file
        #[arg(long)]
        norm: Option<String>,
    },

    /// Search for a trigonometric negativity certificate
    Certify {
        #[arg(long)]
        delta: String,
        /// Phase index of cos(kx - ell*pi/4)
        #[arg(long)]
        ell: u32,
        #[arg(long, default_value_t = 64)]
        max_degree: usize,
        #[arg(long)]
        out: PathBuf,
    },

    /// Re-verify a stored certificate on a doubled grid
    CheckCert {
        #[arg(long = "in")]
        input: PathBuf,
    },

    /// Evaluate the spherical energy identity for k = 1..=kmax
    Besselcheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        kmax: u32,
        /// Sphere dimension; must match the file's ambient dimension minus one
        #[arg(long)]
        dim_sphere: Option<u32>,
    },

    /// Largest valid subset of the points in a file
    Bruteforce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        delta: String,
        /// Exact branch-and-bound search (the default)
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        /// Randomized greedy search instead of the exact solver
        #[arg(long)]
        greedy: bool,
        /// RNG seed for the greedy search
        #[arg(long)]
        seed: Option<u64>,
    },

    /// Print the growth profile for a dimension
    Bound {
        #[arg(long)]
        dim: u32,
        /// Also evaluate the profile and its recursion integral at X
        #[arg(long = "X")]
        x: Option<f64>,
    },

    /// Emit projected coordinates as CSV
    PlotData {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        projection: Projection,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// Digit-expansion construction in three dimensions
    Sarkozy3d {
        /// Containment ball radius
        #[arg(long = "X")]
        x: f64,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lift the integers 1..=M along a snowflake curve into R^4
    SnowflakeLift {
        #[arg(long = "M")]
        m: u64,
        /// Midpoint displacement strength
        #[arg(long)]
        eta: f64,
        /// Curve refinement depth; the table holds 2^levels + 1 samples
        #[arg(long)]
        levels: u32,
        /// Gap parameter, or "auto" for the largest the curve supports
        #[arg(long)]
        delta: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Projection {
    Yz,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { EXIT_USAGE } else { EXIT_INTERNAL })
        }
    }
}

fn run(cli: Cli) -> intgap::Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Construct(c) => construct(c),
        Command::Verify { input, delta, norm } => verify(&input, &delta, norm.as_deref()),
        Command::Certify { delta, ell, max_degree, out } => certify(&delta, ell, max_degree, &out),
        Command::CheckCert { input } => check_cert(&input),
        Command::Besselcheck { input, kmax, dim_sphere } => besselcheck(&input, kmax, dim_sphere),
        Command::Bruteforce { input, delta, exact: _, greedy, seed } => {
            bruteforce(&input, &delta, greedy, seed)
        }
        Command::Bound { dim, x } => bound(dim, x),
        Command::PlotData { input, projection: Projection::Yz, out } => plot_data(&input, &out),
    }
}

/// Caps the worker pool from `INTGAP_THREADS` when the variable is set.
fn configure_threads() -> intgap::Result<()> {
    let value = match std::env::var("INTGAP_THREADS") {
        Ok(v) => v,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(Error::Precondition("INTGAP_THREADS is not valid unicode".into()))
        }
    };
    let n: usize = value.trim().parse().map_err(|_| {
        Error::Precondition(format!("INTGAP_THREADS must be a positive integer, got {value:?}"))
    })?;
    if n == 0 {
        return Err(Error::Precondition("INTGAP_THREADS must be at least 1".into()));
    }
    // a later init wins only if nothing used the pool yet; either way
    // the run stays deterministic, so an AlreadyInitialized error is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn parse_norm_flag(token: &str) -> intgap::Result<NormSpec> {
    if token == "l2" {
        return Ok(NormSpec::Euclidean);
    }
    if let Some(p) = token.strip_prefix("lp:") {
        let p: f64 = p
            .parse()
            .map_err(|_| Error::Precondition(format!("bad norm exponent {p:?}")))?;
        return NormSpec::lp(p);
    }
    Err(Error::Precondition(format!(
        "unknown norm {token:?}; expected \"l2\" or \"lp:<p>\""
    )))
}

fn construct(which: Construct) -> intgap::Result<u8> {
    match which {
        Construct::Sarkozy3d { x, delta, out } => {
            let delta = Delta::parse(&delta)?;
            let (set, params) = build_sarkozy3d(x, &delta)?;
            let count = set.len();
            let file = PointSetFile {
                set,
                delta: Some(delta),
                norm: NormSpec::Euclidean,
                meta: vec![
                    ("construction".into(), "sarkozy3d".into()),
                    ("X".into(), format!("{x}")),
                    ("k".into(), params.k.to_string()),
                    ("t".into(), params.t.to_string()),
                ],
            };
            write_point_set(&out, &file)?;
            println!(
                "wrote {count} points (k = {}, t = {}) to {}",
                params.k,
                params.t,
                out.display()
            );
            Ok(EXIT_OK)
        }
        Construct::SnowflakeLift { m, eta, levels, delta, out } => {
            let curve = build_snowflake_curve(levels, eta)?;
            let (_, constants) = lift_constants(&curve, m)?;
            let delta_phi = constants.delta_phi.clone();
            let delta = if delta == "auto" { delta_phi.clone() } else { Delta::parse(&delta)? };
            let (set, params) = snowflake_lift(m, &curve, &delta)?;
            let count = set.len();
            let file = PointSetFile {
                set,
                delta: Some(delta.clone()),
                norm: NormSpec::Euclidean,
                meta: vec![
                    ("construction".into(), "snowflake-lift".into()),
                    ("M".into(), m.to_string()),
                    ("eta".into(), format!("{eta}")),
                    ("levels".into(), levels.to_string()),
                    ("lambda".into(), format!("{}", params.lambda)),
                    ("delta_phi".into(), format_rational(delta_phi.rational())),
                ],
            };
            write_point_set(&out, &file)?;
            println!(
                "wrote {count} lifted points (delta = {}, delta_phi = {}, lambda = {}) to {}",
                format_rational(delta.rational()),
                format_rational(delta_phi.rational()),
                params.lambda,
                out.display()
            );
            Ok(EXIT_OK)
        }
    }
}

fn verify(input: &PathBuf, delta: &str, norm: Option<&str>) -> intgap::Result<u8> {
    let file = read_point_set(input)?;
    let delta = Delta::parse(delta)?;
    let norm = match norm {
        Some(token) => parse_norm_flag(token)?,
        None => file.norm,
    };
    let report = pairwise_verify(&file.set, &delta, &norm)?;
    println!("{report}");
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn certify(delta: &str, ell: u32, max_degree: usize, out: &PathBuf) -> intgap::Result<u8> {
    let delta = Delta::parse(delta)?;
    match certify_with_schedule(&delta, ell, max_degree)? {
        CertifyOutcome::Certificate(cert) => {
            println!(
                "certificate: degree {}, margin {:.6e}, derivative bound {:.6e}",
                cert.degree, cert.margin, cert.derivative_bound
            );
            let grid = default_grid_points(cert.degree);
            let file = CertificateFile {
                certificate: cert,
                meta: vec![
                    ("solver".into(), "dense-simplex".into()),
                    ("max_degree".into(), max_degree.to_string()),
                    ("grid_points".into(), grid.to_string()),
                ],
            };
            write_certificate(out, &file)?;
            println!("wrote certificate to {}", out.display());
        }
        CertifyOutcome::Infeasible { best_margin } => {
            println!(
                "infeasible: no certificate up to degree {max_degree}; best grid margin {best_margin:.6e}"
            );
        }
    }
    Ok(EXIT_OK)
}

fn check_cert(input: &PathBuf) -> intgap::Result<u8> {
    let file = read_certificate(input)?;
    let c = &file.certificate;
    println!(
        "certificate for delta = {}, ell = {}: degree {}, margin {:.6e}",
        format_rational(c.delta.rational()),
        c.ell,
        c.degree,
        c.margin
    );
    if check_certificate(c) {
        println!("check passed on a doubled grid");
        Ok(EXIT_OK)
    } else {
        println!("check FAILED");
        Ok(EXIT_CHECK_FAILED)
    }
}

fn besselcheck(input: &PathBuf, kmax: u32, dim_sphere: Option<u32>) -> intgap::Result<u8> {
    if kmax == 0 {
        return Err(Error::Precondition("kmax must be at least 1".into()));
    }
    let file = read_point_set(input)?;
    let set = file.set;
    let dim = set.dim().ok_or(Error::EmptySet)?;
    if dim < 2 {
        return Err(Error::Precondition(format!(
            "the energy identity needs ambient dimension >= 2, got {dim}"
        )));
    }
    let sphere = (dim - 1) as u32;
    if let Some(s) = dim_sphere {
        if s != sphere {
            return Err(Error::Precondition(format!(
                "--dim-sphere {s} does not match the file's ambient dimension {dim}"
            )));
        }
    }

    let constant = spherical_constant(sphere)?;
    println!(
        "C_{sphere} = {:.9} +- {:.3e} ({} samples)",
        constant.value, constant.std_err, constant.samples
    );
    let floor = -1e-6 * set.len() as f64;
    let mut all_ok = true;
    for k in 1..=kmax {
        let energy = bessel_energy(&set, k, constant.value)?;
        let ok = energy >= floor;
        all_ok &= ok;
        println!("k = {k}: energy = {:.9e}{}", energy, if ok { "" } else { "  (below floor)" });
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn bruteforce(input: &PathBuf, delta: &str, greedy: bool, seed: Option<u64>) -> intgap::Result<u8> {
    // clap cannot express "--seed only with --greedy": a bool flag always
    // carries a default, which satisfies `requires` vacuously.
    if seed.is_some() && !greedy {
        return Err(Error::Precondition(
            "--seed only applies to --greedy".into(),
        ));
    }
    let file = read_point_set(input)?;
    let delta = Delta::parse(delta)?;
    let mut indices = if greedy {
        greedy_valid_subset(&file.set, &delta, &file.norm, seed.unwrap_or(0))?
    } else {
        max_valid_subset(&file.set, &delta, &file.norm)?
    };
    indices.sort_unstable();
    let label = if greedy { "greedy" } else { "maximum" };
    println!("{label} valid subset: {} of {} points", indices.len(), file.set.len());
    let list: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    println!("indices: {}", list.join(" "));
    Ok(EXIT_OK)
}

fn bound(dim: u32, x: Option<f64>) -> intgap::Result<u8> {
    let profile = bound_profile(dim)?;
    let log = if profile.log_factor { " * log X" } else { "" };
    println!("growth profile d = {dim}: X^({}){log}", profile.exponent);
    if let Some(x) = x {
        println!("profile value at X = {x}: {:.9e}", profile.evaluate(x)?);
        println!("recursion integral at X = {x}: {:.9e}", recursion_integral(dim, x)?);
    }
    Ok(EXIT_OK)
}

fn plot_data(input: &PathBuf, out: &PathBuf) -> intgap::Result<u8> {
    let file = read_point_set(input)?;
    let dim = file.set.dim().ok_or(Error::EmptySet)?;
    if dim < 3 {
        return Err(Error::Precondition(format!(
            "the yz projection needs dimension >= 3, got {dim}"
        )));
    }
    let mut csv = String::from("y,z\n");
    for p in file.set.points() {
        match p {
            Point::Lattice(c) => {
                let _ = writeln!(csv, "{},{}", c[1], c[2]);
            }
            Point::Float(c) => {
                let _ = writeln!(csv, "{},{}", c[1], c[2]);
            }
        }
    }
    std::fs::write(out, csv).map_err(Error::from)?;
    println!("wrote {} rows to {}", file.set.len(), out.display());
    Ok(EXIT_OK)
}
