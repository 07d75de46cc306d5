//! finsleroid: evaluate the two-axes pseudo-Finsleroid metric, verify its
//! identity set, sample its surfaces to CSV, and pretty-print stored reports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use finsleroid::core::{decompose, default_frame, Params};
use finsleroid::inversion::{angles_from_tangent, indicatrix_point, AngleTriple};
use finsleroid::util::par_map;
use finsleroid::verifier::{full_report, Report, SamplingPlan};
use finsleroid::{charfun, horizontal, linalg};

#[derive(Parser)]
#[command(name = "finsleroid", version, about = "Two-axes pseudo-Finsleroid metric toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F and the angle coordinates at one tangent vector
    Eval {
        /// Tangent vector as four comma-separated reals a,b,c,d
        #[arg(long, value_name = "a,b,c,d")]
        y: String,
        /// Parameters JSON file (keys H, T, Chat and optional normalizations)
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
        /// Also solve the section lambda Vcheck(eta) = 1 and report its radius
        #[arg(long, value_name = "X")]
        lambda: Option<f64>,
    },
    /// Run the full identity verification and emit the report as JSON
    Verify {
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
        /// Seed for the random tangent and horizontal samples
        #[arg(long, value_name = "N", default_value_t = 7)]
        seed: u64,
        /// Write the report here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Sample a surface to CSV over a deterministic grid
    Sample {
        #[arg(long, value_enum)]
        surface: Surface,
        /// Grid sizes AxBxC (indicatrix: eta x theta x phi; horizontal: theta x radius x azimuth)
        #[arg(long, value_name = "AxBxC", default_value = "16x16x8")]
        grid: String,
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
        /// Accepted for interface stability; grids are deterministic and ignore it
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Pretty-print a stored verification report
    Report {
        /// Report JSON produced by `verify`
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Surface {
    Indicatrix,
    Horizontal,
}

fn load_params(path: &Option<PathBuf>) -> Result<Params, String> {
    match path {
        None => Ok(Params::defaults()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            Params::from_json(&text).map_err(|e| e.to_string())
        }
    }
}

fn parse_y(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("--y expects four comma-separated reals: {e}"))?;
    parts.try_into().map_err(|v: Vec<f64>| format!("--y expects 4 components, got {}", v.len()))
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("--grid expects AxBxC positive integers: {e}"))?;
    let g: [usize; 3] =
        parts.try_into().map_err(|v: Vec<usize>| format!("--grid expects 3 sizes, got {}", v.len()))?;
    if g.contains(&0) {
        return Err("--grid sizes must be positive".into());
    }
    Ok(g)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
    }
}

fn cmd_eval(y: &str, params: &Option<PathBuf>, lambda: Option<f64>) -> Result<ExitCode, String> {
    let p = load_params(params)?;
    let frame = default_frame();
    let y = parse_y(y)?;
    let (a, f) = angles_from_tangent(&y, &frame, &p).map_err(|e| e.to_string())?;
    let sv = decompose(&y, &frame).map_err(|e| e.to_string())?;
    let mut doc = json!({
        "y": y,
        "F": f,
        "angles": { "eta": a.eta, "theta": a.theta, "phi": a.phi },
        "scalar_vars": sv,
        "params": { "H": p.h, "T": p.t, "Chat": p.chat, "P": p.p },
    });
    if let Some(l) = lambda {
        let (eta_star, radius) = horizontal::section_radius(l, &p).map_err(|e| e.to_string())?;
        doc["section"] = json!({
            "lambda": l,
            "eta_star": eta_star,
            "radius": radius,
            "curvature": p.p / (radius * radius),
        });
    }
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(params: &Option<PathBuf>, seed: u64, out: &Option<PathBuf>) -> Result<ExitCode, String> {
    let p = load_params(params)?;
    let frame = default_frame();
    let plan = SamplingPlan::with_seed(&p, seed);
    let report = full_report(&plan, &frame, &p);
    emit(out, &serde_json::to_string_pretty(&report).unwrap())?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_sample(
    surface: Surface,
    grid: &str,
    params: &Option<PathBuf>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    let p = load_params(params)?;
    let [na, nb, nc] = parse_grid(grid)?;
    let mut csv = String::new();
    match surface {
        Surface::Indicatrix => {
            csv.push_str("eta,theta,phi,y0,y1,y2,y3,F\n");
            let frame = default_frame();
            let mut points = Vec::with_capacity(na * nb * nc);
            for ka in 0..na {
                let eta = 0.05 * (3.5f64 / 0.05).powf(ka as f64 / (na.max(2) - 1) as f64);
                for kb in 0..nb {
                    let theta = 0.05 + (p.theta_c - 0.1) * (kb as f64 + 0.5) / nb as f64;
                    for kc in 0..nc {
                        let phi = p.cstar + (-1.2 + 2.4 * kc as f64 / nc.max(2) as f64) / p.chat.sqrt();
                        points.push(AngleTriple { eta, theta, phi });
                    }
                }
            }
            let rows = par_map(&points, |a| {
                let y = indicatrix_point(a, &frame, &p).expect("grid point admissible");
                let (_, f) = angles_from_tangent(&y, &frame, &p).expect("grid point admissible");
                format!(
                    "{},{},{},{},{},{},{},{}\n",
                    a.eta, a.theta, a.phi, y[0], y[1], y[2], y[3], f
                )
            });
            csv.extend(rows);
        }
        Surface::Horizontal => {
            csv.push_str("v1,v2,v3,r,detR,min_eigenvalue,curvature_residual\n");
            let mut points = Vec::with_capacity(na * nb * nc);
            for ka in 0..na {
                let theta = 0.15 + (p.theta_c - 0.3) * (ka as f64 + 0.5) / na as f64;
                for kb in 0..nb {
                    let v3 = 0.5 + 1.5 * (kb as f64 + 0.5) / nb as f64;
                    for kc in 0..nc {
                        let psi = std::f64::consts::TAU * kc as f64 / nc as f64;
                        let vp = charfun::fcheck(theta, &p) * v3 / p.c11;
                        points.push([vp * psi.sin(), vp * psi.cos(), v3]);
                    }
                }
            }
            let rows = par_map(&points, |v| {
                let b = horizontal::horizontal_bundle(v, &p).expect("grid point admissible");
                let det = linalg::det3(&b.rab);
                let ev = linalg::sym_eigenvalues(&b.rab);
                let res = horizontal::horizontal_curvature_check(&b, &p);
                format!("{},{},{},{},{},{},{}\n", v[0], v[1], v[2], b.r, det, ev[0], res)
            });
            csv.extend(rows);
        }
    }
    emit(out, csv.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(input: &PathBuf) -> Result<ExitCode, String> {
    let text = fs::read_to_string(input).map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| format!("not a report: {e}"))?;
    println!("seed: {}    overall: {}", report.seed, report.overall);
    println!(
        "{:<14} {:<28} {:>13} {:>10} {:>7} {:>7}",
        "identity", "equation", "max residual", "tolerance", "points", "status"
    );
    for r in &report.records {
        println!(
            "{:<14} {:<28} {:>13.3e} {:>10.0e} {:>7} {:>7}",
            r.identity_id, r.equation_ref, r.max_residual, r.tolerance, r.points, r.status
        );
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Eval { y, params, lambda } => cmd_eval(y, params, *lambda),
        Command::Verify { params, seed, out } => cmd_verify(params, *seed, out),
        Command::Sample { surface, grid, params, seed: _, out } => {
            cmd_sample(*surface, grid, params, out)
        }
        Command::Report { input } => cmd_report(input),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
