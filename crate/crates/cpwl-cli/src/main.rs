//! Command-line reports for hat-basis CPWL stability analysis.
//!
//! Subcommands:
//! - `riesz`: Riesz bounds and condition number of a triangulation file;
//! - `boxspline`: analytic lattice bounds plus a Fourier-symbol grid sweep;
//! - `nonlocal`: conditioning of the uniform-knot ReLU-shift interpolation;
//! - `generate`: write Kuhn or 2-D Delaunay triangulation files.
//!
//! Exit codes: 0 success, 1 computation failure, 2 input error. Reports are
//! human-readable tables by default; `--json` emits a machine-readable
//! record embedding the seed and an FNV-1a digest of the inputs. All fields
//! except `timings_ms` are reproducible for identical inputs and seed.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use cpwl::basis::gram_matrix;
use cpwl::boxspline::{autocorrelation_table, g_hat, lattice_riesz_bounds, BoxSplineSpec};
use cpwl::geometry::Point;
use cpwl::linalg::Matrix;
use cpwl::nonlocal::{
    empirical_condition, nonlocal_condition_lower_bound, uniform_interpolation_matrix,
};
use cpwl::riesz::{gram_eigen_bounds, star_volume_bounds, verify_bounds_by_sampling, RieszReport};
use cpwl::triangulation::{delaunay_2d, kuhn_triangulation, Triangulation};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Computation(_) => 1,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn computation_err(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "cpwl",
    version,
    about = "Stability reports for the hat-basis parametrization of CPWL functions"
)]
struct Cli {
    /// Emit a JSON report record instead of a table
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks embedded in the report
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Gram,
    Star,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Riesz bounds of a triangulation file
    Riesz {
        /// Path to a JSON triangulation
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Random coefficient vectors for the sampled two-sided check
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Lattice Riesz bounds of a linear box spline
    Boxspline {
        /// Lattice dimension
        #[arg(long)]
        dim: usize,
        /// Generator matrix as rows "a,b;c,d" (identity when omitted)
        #[arg(long)]
        xi: Option<String>,
        /// Grid points per axis for the Fourier-symbol sweep
        #[arg(long, default_value_t = 64)]
        sweep: usize,
        /// Write the swept symbol values as CSV (columns omega_1..omega_d, ghat)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Conditioning of the nonlocal uniform-knot interpolation
    Nonlocal {
        /// Number of knots
        #[arg(long = "K")]
        k: usize,
        /// Knot spacing
        #[arg(long = "h", default_value_t = 1.0)]
        h: f64,
        /// Also print a table for K = 2..=this value
        #[arg(long)]
        k_table: Option<usize>,
    },
    /// Generate triangulation files
    Generate {
        #[command(subcommand)]
        what: Generate,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Kuhn triangulation of an integer box
    Kuhn {
        #[arg(long)]
        dim: usize,
        /// Cells per axis, comma separated (a single value is broadcast)
        #[arg(long)]
        extent: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// 2-D Delaunay triangulation of random or explicit points
    Delaunay2d {
        /// Number of random points in the unit square
        #[arg(long, conflicts_with = "points")]
        n: Option<usize>,
        /// Explicit points "x,y;x,y;..."
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// FNV-1a 64-bit content digest, reported in hex.
fn digest(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

#[derive(Serialize)]
struct ReportRecord {
    command: String,
    inputs_digest: String,
    seed: u64,
    outputs: serde_json::Value,
    timings_ms: f64,
}

fn print_record(json: bool, record: &ReportRecord, table: &str) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(record).expect("record serializes")
        );
    } else {
        print!("{table}");
    }
}

fn bounds_table(label: &str, report: &RieszReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{label}");
    let _ = writeln!(s, "  method            {}", report.method);
    let _ = writeln!(s, "  lower bound A     {:.12}", report.lower);
    let _ = writeln!(s, "  upper bound B     {:.12}", report.upper);
    let _ = writeln!(s, "  condition B/A     {:.12}", report.condition);
    if let (Some(lo), Some(hi)) = (report.star_volume_min, report.star_volume_max) {
        let _ = writeln!(s, "  star volumes      [{lo:.12}, {hi:.12}]");
    }
    s
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    match cli.command {
        Command::Riesz {
            path,
            method,
            samples,
        } => {
            let raw = std::fs::read(&path)
                .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
            let t = Triangulation::load(&path).map_err(input_err)?;
            let report_validation = t.validate();
            if !report_validation.is_ok() {
                return Err(input_err(format!(
                    "triangulation fails validation: union_ok={}, offending pairs {:?}",
                    report_validation.union_ok, report_validation.offending_pairs
                )));
            }
            let mut table = String::new();
            let mut outputs = serde_json::Map::new();
            let gram = if method != Method::Star {
                let g = gram_eigen_bounds(&gram_matrix(&t)).map_err(computation_err)?;
                table.push_str(&bounds_table("gram-eigen bounds", &g));
                outputs.insert("gram".into(), serde_json::to_value(&g).unwrap());
                Some(g)
            } else {
                None
            };
            let star = if method != Method::Gram {
                let s = star_volume_bounds(&t);
                table.push_str(&bounds_table("star-volume bounds", &s));
                outputs.insert("star".into(), serde_json::to_value(&s).unwrap());
                Some(s)
            } else {
                None
            };
            if let (Some(g), Some(s)) = (&gram, &star) {
                let contained =
                    s.lower <= g.lower * (1.0 + 1e-10) && g.upper <= s.upper * (1.0 + 1e-10);
                if !contained {
                    return Err(computation_err(
                        "star-volume bounds do not contain gram-eigen bounds",
                    ));
                }
                let _ = writeln!(table, "containment        star bounds contain gram bounds");
                outputs.insert("containment_ok".into(), serde_json::Value::Bool(true));
            }
            if samples > 0 {
                let reference = gram.as_ref().or(star.as_ref()).expect("some method ran");
                let check = verify_bounds_by_sampling(&t, reference, samples, cli.seed)
                    .map_err(computation_err)?;
                let _ = writeln!(
                    table,
                    "sampled ratios     [{:.12}, {:.12}] ({} trials, within bounds: {})",
                    check.min_ratio, check.max_ratio, samples, check.within_bounds
                );
                outputs.insert("sampling".into(), serde_json::to_value(check).unwrap());
                if !check.within_bounds {
                    return Err(computation_err("sampled ratios escape the reported bounds"));
                }
            }
            let record = ReportRecord {
                command: "riesz".into(),
                inputs_digest: digest(&raw),
                seed: cli.seed,
                outputs: serde_json::Value::Object(outputs),
                timings_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            print_record(cli.json, &record, &table);
            Ok(())
        }
        Command::Boxspline {
            dim,
            xi,
            sweep,
            csv,
        } => {
            if dim == 0 {
                return Err(input_err("--dim must be at least 1"));
            }
            if dim > 3 {
                return Err(input_err("sweeps are supported for --dim up to 3"));
            }
            let spec = match &xi {
                Some(text) => {
                    let m = parse_matrix(text, dim)?;
                    BoxSplineSpec::new(m).map_err(input_err)?
                }
                None => BoxSplineSpec::cartesian(dim),
            };
            let bounds = lattice_riesz_bounds(&spec, sweep).map_err(computation_err)?;
            let mut table = bounds_table("lattice-fourier bounds", &bounds.report);
            let _ = writeln!(
                table,
                "  |det Xi|          {:.12}\n  swept min g^      {:.12} at omega {:?}\n  swept max g^      {:.12} at omega {:?}",
                spec.det_abs(),
                bounds.sweep.min,
                bounds.sweep.argmin,
                bounds.sweep.max,
                bounds.sweep.argmax
            );
            if let Some(csv_path) = &csv {
                write_sweep_csv(&spec, sweep, csv_path)?;
                let _ = writeln!(table, "  csv               {}", csv_path.display());
            }
            let digest_input = format!(
                "dim={dim};xi={};sweep={sweep}",
                xi.as_deref().unwrap_or("identity")
            );
            let record = ReportRecord {
                command: "boxspline".into(),
                inputs_digest: digest(digest_input.as_bytes()),
                seed: cli.seed,
                outputs: serde_json::json!({
                    "report": bounds.report,
                    "det_abs": spec.det_abs(),
                    "sweep": {
                        "resolution": bounds.sweep.resolution,
                        "min": bounds.sweep.min,
                        "max": bounds.sweep.max,
                        "argmin": bounds.sweep.argmin,
                        "argmax": bounds.sweep.argmax,
                    },
                }),
                timings_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            print_record(cli.json, &record, &table);
            Ok(())
        }
        Command::Nonlocal { k, h, k_table } => {
            if k < 2 {
                return Err(input_err("--K must be at least 2"));
            }
            if h <= 0.0 {
                return Err(input_err("--h must be positive"));
            }
            let m = uniform_interpolation_matrix(k, h);
            let cond = empirical_condition(&m).map_err(computation_err)?;
            let bound = nonlocal_condition_lower_bound(k).map_err(input_err)?;
            let local = 1.0; // hat-basis interpolation is the identity map
            let mut table = String::new();
            let _ = writeln!(table, "nonlocal interpolation conditioning");
            let _ = writeln!(table, "  knots K           {k}");
            let _ = writeln!(table, "  step h            {h}");
            let _ = writeln!(table, "  empirical cond    {cond:.6}");
            let _ = writeln!(table, "  analytic bound    {bound:.6}");
            let _ = writeln!(table, "  ratio             {:.6}", cond / bound);
            let _ = writeln!(table, "  local comparator  {local:.1}");
            let mut rows = Vec::new();
            if let Some(max_k) = k_table {
                let _ = writeln!(table, "  K, empirical, bound");
                for kk in 2..=max_k.max(2) {
                    let c = empirical_condition(&uniform_interpolation_matrix(kk, h))
                        .map_err(computation_err)?;
                    let b = nonlocal_condition_lower_bound(kk).map_err(input_err)?;
                    let _ = writeln!(table, "  {kk}, {c:.6}, {b:.6}");
                    rows.push(serde_json::json!({"K": kk, "empirical": c, "bound": b}));
                }
            }
            let record = ReportRecord {
                command: "nonlocal".into(),
                inputs_digest: digest(format!("K={k};h={h}").as_bytes()),
                seed: cli.seed,
                outputs: serde_json::json!({
                    "K": k,
                    "h": h,
                    "empirical_condition": cond,
                    "analytic_lower_bound": bound,
                    "ratio": cond / bound,
                    "local_comparator_condition": local,
                    "table": rows,
                }),
                timings_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            print_record(cli.json, &record, &table);
            Ok(())
        }
        Command::Generate { what } => {
            let (t, kind, out, spec_string) = match what {
                Generate::Kuhn { dim, extent, out } => {
                    let cells = parse_extent(&extent, dim)?;
                    let t = kuhn_triangulation(dim, &cells).map_err(input_err)?;
                    (t, "kuhn", out, format!("dim={dim};extent={extent}"))
                }
                Generate::Delaunay2d { n, points, out } => {
                    let pts = match (n, points) {
                        (_, Some(text)) => parse_points(&text)?,
                        (Some(n), None) => {
                            use rand::prelude::*;
                            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(cli.seed);
                            (0..n)
                                .map(|_| {
                                    Point::new(vec![rng.random::<f64>(), rng.random::<f64>()])
                                        .expect("finite")
                                })
                                .collect()
                        }
                        (None, None) => {
                            return Err(input_err("delaunay2d needs --n or --points"));
                        }
                    };
                    let spec_string = format!("n={}", pts.len());
                    let t = delaunay_2d(&pts).map_err(input_err)?;
                    (t, "delaunay2d", out, spec_string)
                }
            };
            let validation = t.validate();
            if !validation.is_ok() {
                return Err(computation_err(format!(
                    "generated triangulation fails validation: {:?}",
                    validation.offending_pairs
                )));
            }
            t.save(&out).map_err(|e| input_err(e.to_string()))?;
            let table = format!(
                "generated {kind}: {}\n  written to {}\n",
                cpwl::triangulation::summary(&t),
                out.display()
            );
            let record = ReportRecord {
                command: format!("generate {kind}"),
                inputs_digest: digest(spec_string.as_bytes()),
                seed: cli.seed,
                outputs: serde_json::json!({
                    "path": out.display().to_string(),
                    "vertices": t.n_vertices(),
                    "simplices": t.n_simplices(),
                    "total_volume": t.total_volume(),
                }),
                timings_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            print_record(cli.json, &record, &table);
            Ok(())
        }
    }
}

fn parse_matrix(text: &str, dim: usize) -> Result<Matrix, CliError> {
    let mut rows = Vec::new();
    for (i, row_text) in text.split(';').enumerate() {
        let row: Vec<f64> = row_text
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| input_err(format!("--xi row {i}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != dim {
            return Err(input_err(format!(
                "--xi row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != dim {
        return Err(input_err(format!(
            "--xi has {} rows, expected {dim}",
            rows.len()
        )));
    }
    Matrix::from_rows(&rows).map_err(input_err)
}

fn parse_extent(text: &str, dim: usize) -> Result<Vec<usize>, CliError> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| input_err(format!("--extent: {e}")))
        })
        .collect::<Result<_, _>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0]; dim]),
        n if n == dim => Ok(parts),
        n => Err(input_err(format!(
            "--extent has {n} entries, expected 1 or {dim}"
        ))),
    }
}

fn parse_points(text: &str) -> Result<Vec<Point>, CliError> {
    text.split(';')
        .enumerate()
        .map(|(i, pair)| {
            let coords: Vec<f64> = pair
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| input_err(format!("--points entry {i}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            if coords.len() != 2 {
                return Err(input_err(format!(
                    "--points entry {i} has {} coordinates, expected 2",
                    coords.len()
                )));
            }
            Point::new(coords).map_err(input_err)
        })
        .collect()
}

/// CSV of the swept Fourier symbol: header row, '.' decimal separator.
fn write_sweep_csv(
    spec: &BoxSplineSpec,
    resolution: usize,
    path: &PathBuf,
) -> Result<(), CliError> {
    let d = spec.dim();
    let table = autocorrelation_table(spec);
    let mut out = String::new();
    for axis in 1..=d {
        let _ = write!(out, "omega_{axis},");
    }
    let _ = writeln!(out, "ghat");
    let step = std::f64::consts::TAU / resolution as f64;
    let mut index = vec![0usize; d];
    'grid: loop {
        let omega: Vec<f64> = index.iter().map(|&i| i as f64 * step).collect();
        let value = g_hat(&table, &omega).map_err(computation_err)?;
        for w in &omega {
            let _ = write!(out, "{w},");
        }
        let _ = writeln!(out, "{value}");
        for axis in (0..d).rev() {
            index[axis] += 1;
            if index[axis] < resolution {
                continue 'grid;
            }
            index[axis] = 0;
        }
        break;
    }
    std::fs::write(path, out)
        .map_err(|e| input_err(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
