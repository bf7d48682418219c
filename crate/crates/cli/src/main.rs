//! `sfs` command-line tool: singularity surfaces, per-orientation SFS radii
//! and workspace sweeps for semi-regular Stewart-Gough platforms.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::Vector3;
use serde_json::json;
use sfs_core::{
    extract_cubic, oracle_distance, sample_workspace, sfs_radius, Architecture, SampleSet,
    SweepResult, MONOMIALS,
};

use config::{NamedArchitecture, RunConfig};

const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_COMPUTE: u8 = 5;

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
    Compute(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Compute(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sfs",
    version,
    about = "Singularity-free sphere analysis for semi-regular Stewart-Gough platform manipulators"
)]
struct Cli {
    /// Print the bundled default configuration and exit
    #[arg(long)]
    emit_default_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract and print the 16 cubic-surface coefficients for one orientation
    Surface {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Architecture name from the configuration
        #[arg(long)]
        arch: String,
        /// Rodrigues vector as "c1,c2,c3"
        #[arg(long)]
        c: String,
    },
    /// Compute the SFS radius for one orientation
    Sfs {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        arch: String,
        /// Rodrigues vector as "c1,c2,c3"
        #[arg(long)]
        c: String,
        /// Neutral height (overrides the configuration)
        #[arg(long)]
        z0: Option<f64>,
        /// Also run the brute-force grid oracle and report both distances
        #[arg(long)]
        oracle_check: bool,
    },
    /// Sweep one architecture over the discretised orientation workspace
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        arch: String,
        /// Worker threads (0 = automatic)
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Output directory (overrides the configuration)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the sample CSV and the per-sample radius CSV
        #[arg(long)]
        dump_samples: bool,
    },
    /// Sweep every configured architecture and rank them by r2
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the orientation samples as CSV
    DumpSamples {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.emit_default_config {
        print!("{}", config::DEFAULT_CONFIG);
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(2);
    };
    match run(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("parsing {}: {e}", p.display())))?
        }
        None => RunConfig::bundled(),
    };
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn resolve_arch<'a>(cfg: &'a RunConfig, name: &str) -> Result<(&'a NamedArchitecture, Architecture), CliError> {
    let named = cfg.find_arch(name).ok_or_else(|| {
        let known: Vec<&str> = cfg.architectures.iter().map(|a| a.name.as_str()).collect();
        CliError::Config(format!("unknown architecture {name:?}; configured: {known:?}"))
    })?;
    let arch = named.build().map_err(|e| CliError::Config(e.to_string()))?;
    Ok((named, arch))
}

fn parse_c(text: &str) -> Result<Vector3<f64>, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("parsing --c {text:?}: {e}")))?;
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "--c must have exactly three components, got {}",
            parts.len()
        )));
    }
    Ok(Vector3::new(parts[0], parts[1], parts[2]))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn monomial_names() -> Vec<String> {
    MONOMIALS
        .iter()
        .map(|&(i, j, k)| {
            let mut s = String::new();
            for (var, e) in [("x", i), ("y", j), ("z", k)] {
                match e {
                    0 => {}
                    1 => s.push_str(var),
                    _ => s.push_str(&format!("{var}^{e}")),
                }
            }
            if s.is_empty() {
                s.push('1');
            }
            s
        })
        .collect()
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Surface { config, arch, c } => {
            let cfg = load_config(config.as_deref())?;
            let (named, arch) = resolve_arch(&cfg, &arch)?;
            let c = parse_c(&c)?;
            let surface = extract_cubic(&arch, &c).map_err(|e| CliError::Compute(e.to_string()))?;
            let out = json!({
                "architecture": named,
                "c": [c.x, c.y, c.z],
                "monomial_order": monomial_names(),
                "coefficients": surface.coeffs().to_vec(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(())
        }
        Command::Sfs { config, arch, c, z0, oracle_check } => {
            let cfg = load_config(config.as_deref())?;
            let (named, arch) = resolve_arch(&cfg, &arch)?;
            let c = parse_c(&c)?;
            let z0 = z0.unwrap_or(cfg.z0);
            let params = cfg.solver.to_params();
            let p0 = Vector3::new(0.0, 0.0, z0);
            let result =
                sfs_radius(&arch, &c, &p0, &params).map_err(|e| CliError::Compute(e.to_string()))?;
            let oracle = if oracle_check {
                let surface =
                    extract_cubic(&arch, &c).map_err(|e| CliError::Compute(e.to_string()))?;
                let o = oracle_distance(&surface, &p0, &params.oracle)
                    .map_err(|e| CliError::Compute(e.to_string()))?;
                Some(json!({
                    "distance": o.distance,
                    "point": [o.point.x, o.point.y, o.point.z],
                }))
            } else {
                None
            };
            let out = json!({
                "architecture": named,
                "result": result,
                "oracle": oracle,
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(())
        }
        Command::Sweep { config, arch, threads, out, dump_samples } => {
            let cfg = load_config(config.as_deref())?;
            let (named, arch) = resolve_arch(&cfg, &arch)?;
            let samples = sample_workspace(&cfg.workspace.to_spec())
                .map_err(|e| CliError::Config(e.to_string()))?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
            ensure_dir(&dir)?;
            let result = sfs_core::sweep(&arch, &samples, cfg.z0, &cfg.solver.to_params(), threads)
                .map_err(|e| CliError::Compute(e.to_string()))?;
            write_sweep_outputs(&dir, named, cfg.z0, &samples, &result)?;
            if dump_samples || cfg.output.dump_samples {
                write_samples_csv(&dir.join(format!("{}_samples.csv", named.name)), &samples)?;
                write_radius_csv(&dir.join(format!("{}_radii.csv", named.name)), &samples, &result)?;
            }
            println!(
                "{}: r2 = {:.6} over {} samples ({:.1} s)",
                named.name, result.r2, result.n_samples, result.wall_time_s
            );
            Ok(())
        }
        Command::Compare { config, threads, out } => {
            let cfg = load_config(config.as_deref())?;
            let samples = sample_workspace(&cfg.workspace.to_spec())
                .map_err(|e| CliError::Config(e.to_string()))?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
            ensure_dir(&dir)?;
            let mut results = Vec::new();
            for named in &cfg.architectures {
                let arch = named.build().map_err(|e| CliError::Config(e.to_string()))?;
                let result =
                    sfs_core::sweep(&arch, &samples, cfg.z0, &cfg.solver.to_params(), threads)
                        .map_err(|e| CliError::Compute(format!("{}: {e}", named.name)))?;
                write_sweep_outputs(&dir, named, cfg.z0, &samples, &result)?;
                println!(
                    "{}: r2 = {:.6} ({:.1} s)",
                    named.name, result.r2, result.wall_time_s
                );
                results.push(result);
            }
            let order = sfs_core::ranking(&results);
            let ranking: Vec<&str> = order
                .iter()
                .map(|&i| cfg.architectures[i].name.as_str())
                .collect();
            let table = json!({
                "z0": cfg.z0,
                "n_samples": results[0].n_samples,
                "r2": cfg.architectures.iter().zip(&results)
                    .map(|(a, r)| json!({"name": a.name, "r2": r.r2}))
                    .collect::<Vec<_>>(),
                "ranking": ranking,
            });
            write_file(
                &dir.join("comparison.json"),
                &serde_json::to_string_pretty(&table).unwrap(),
            )?;
            println!("ranking (best first): {}", ranking.join(" > "));
            Ok(())
        }
        Command::DumpSamples { config, out } => {
            let cfg = load_config(config.as_deref())?;
            let samples = sample_workspace(&cfg.workspace.to_spec())
                .map_err(|e| CliError::Config(e.to_string()))?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
            ensure_dir(&dir)?;
            let path = dir.join("samples.csv");
            write_samples_csv(&path, &samples)?;
            println!("{} samples written to {}", samples.total(), path.display());
            Ok(())
        }
    }
}

fn write_sweep_outputs(
    dir: &Path,
    named: &NamedArchitecture,
    z0: f64,
    samples: &SampleSet,
    result: &SweepResult,
) -> Result<(), CliError> {
    let summary = json!({
        "architecture": named,
        "z0": z0,
        "n_samples": result.n_samples,
        "r2": result.r2,
        "argmin": result.argmin,
        "degenerate_count": result.degenerate_count,
        "compute_time_s": result.compute_time_s,
        "wall_time_s": result.wall_time_s,
    });
    write_file(
        &dir.join(format!("{}_summary.json", named.name)),
        &serde_json::to_string_pretty(&summary).unwrap(),
    )?;
    let mut csv = String::from("phi_deg,per_shell_min,cumulative_min\n");
    for ((phi, shell_min), (_, cum_min)) in
        result.per_shell_min.iter().zip(&result.cumulative_min)
    {
        csv.push_str(&format!("{:.6},{:.12},{:.12}\n", phi.to_degrees(), shell_min, cum_min));
    }
    write_file(&dir.join(format!("{}_curve.csv", named.name)), &csv)?;
    let _ = samples;
    Ok(())
}

fn write_samples_csv(path: &Path, samples: &SampleSet) -> Result<(), CliError> {
    let mut csv = String::from("phi_deg,kx,ky,kz,c1,c2,c3\n");
    for (_, phi, k, c) in samples.iter_samples() {
        csv.push_str(&format!(
            "{:.6},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
            phi.to_degrees(),
            k.x,
            k.y,
            k.z,
            c.x,
            c.y,
            c.z
        ));
    }
    write_file(path, &csv)
}

fn write_radius_csv(path: &Path, samples: &SampleSet, result: &SweepResult) -> Result<(), CliError> {
    let mut csv = String::from("phi_deg,kx,ky,kz,radius\n");
    for ((_, phi, k, _), r) in samples.iter_samples().zip(&result.radii) {
        csv.push_str(&format!(
            "{:.6},{:.12},{:.12},{:.12},{:.12}\n",
            phi.to_degrees(),
            k.x,
            k.y,
            k.z,
            r
        ));
    }
    write_file(path, &csv)
}
