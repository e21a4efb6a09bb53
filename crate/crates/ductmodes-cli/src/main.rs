//! ductmodes: acoustic modes, exceptional points, and multimode sound power
//! in circular lined ducts.

mod config;
mod output;
mod recipes;
mod runner;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{exit_code_for_core, CommandKind, OutputFormat, QuantityArg, RunConfig};
use output::to_json_string;

#[derive(Parser)]
#[command(
    name = "ductmodes",
    version,
    about = "Modes, Cremer-optimum exceptional points, nonorthogonality metrics, \
             and junction sound power for circular ducts with impedance walls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Dimensionless frequency K = omega R / c0
    #[arg(long, default_value_t = 30.0, visible_alias = "K", allow_negative_numbers = true)]
    k: f64,
    /// Azimuthal order
    #[arg(short, long, default_value_t = 0)]
    m: u32,
    /// Re(beta0), the wall admittance
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_re: f64,
    /// Im(beta0)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_im: f64,
    /// Re(Z0): impedance input, alternative to beta
    #[arg(long, allow_negative_numbers = true)]
    z_re: Option<f64>,
    /// Im(Z0)
    #[arg(long, allow_negative_numbers = true)]
    z_im: Option<f64>,
    /// Pressure-release wall (beta0 -> infinity proxy)
    #[arg(long)]
    pressure_release: bool,
    /// Truncation: number of modes
    #[arg(short, long, default_value_t = 50, visible_alias = "n-modes")]
    n: usize,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    output: Option<String>,
    /// Output format
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Transverse eigenvalues, axial wavenumbers, and classifications
    Modes {
        #[command(flatten)]
        common: CommonArgs,
        /// Surface/guided threshold on Im(gamma)
        #[arg(long, allow_negative_numbers = true)]
        surface_threshold: Option<f64>,
    },
    /// Exceptional points (Cremer optima) as double dispersion roots
    Ep {
        #[command(flatten)]
        common: CommonArgs,
        /// How many EPs, ordered by coalescing pair
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Transport the mode pair around an admittance loop
    Encircle {
        #[command(flatten)]
        common: CommonArgs,
        /// EP index (by pair) to encircle
        #[arg(long, default_value_t = 0)]
        ep_index: usize,
        /// Loop nodes "re,im;re,im;..." (defaults to the rectangle around
        /// the first Cremer optimum)
        #[arg(long)]
        loop_nodes: Option<String>,
    },
    /// K_p, self-overlap, and the S_ij matrix
    Nonortho {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Mode-matching solution of the rigid-to-lined junction
    Junction {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Axial sound power profile with modal/cross decomposition
    Power {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest axial station, in duct radii
        #[arg(long, default_value_t = 10.0)]
        zmax: f64,
        /// Number of axial stations
        #[arg(long, default_value_t = 201)]
        zpoints: usize,
        /// Apply the azimuthal constant to absolute power scales
        #[arg(long)]
        azimuthal_factor: bool,
    },
    /// Admittance-plane lattice of a tracked quantity
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_negative_numbers = true)]
        re_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        re_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        im_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        im_max: f64,
        #[arg(long, default_value_t = 101)]
        re_resolution: usize,
        #[arg(long, default_value_t = 101)]
        im_resolution: usize,
        /// gamma-re | gamma-im | kp | sij-re | sij-im
        #[arg(long)]
        quantity: String,
        #[arg(long, default_value_t = 0)]
        sij_i: usize,
        #[arg(long, default_value_t = 1)]
        sij_j: usize,
    },
    /// Run a full configuration from a JSON file ("-" for stdin)
    Run {
        /// Path to a RunConfig JSON document
        #[arg(long)]
        config: String,
    },
    /// Resolve a figure name (Fig1..Fig13) to its run configuration(s)
    Recipe {
        /// Figure name, e.g. Fig7
        name: String,
        /// Execute the resolved configuration(s) instead of printing them
        #[arg(long)]
        run: bool,
        /// Output file base (suffixed _1, _2 for multi-config figures)
        #[arg(short, long)]
        output: Option<String>,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s.to_lowercase().as_str() {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format '{other}' (csv or json)")),
    }
}

fn parse_quantity(s: &str) -> Result<QuantityArg, String> {
    match s.to_lowercase().replace('_', "-").as_str() {
        "gamma-re" => Ok(QuantityArg::GammaRe),
        "gamma-im" => Ok(QuantityArg::GammaIm),
        "kp" => Ok(QuantityArg::Kp),
        "sij-re" => Ok(QuantityArg::SijRe),
        "sij-im" => Ok(QuantityArg::SijIm),
        other => Err(format!(
            "unknown quantity '{other}' (gamma-re, gamma-im, kp, sij-re, sij-im)"
        )),
    }
}

fn parse_loop(s: &str) -> Result<Vec<[f64; 2]>, String> {
    s.split(';')
        .map(|pair| {
            let mut it = pair.split(',');
            let re = it
                .next()
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| format!("bad loop node '{pair}'"))?;
            let im = it
                .next()
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| format!("bad loop node '{pair}'"))?;
            if it.next().is_some() {
                return Err(format!("bad loop node '{pair}'"));
            }
            Ok([re, im])
        })
        .collect()
}

fn apply_common(cfg: &mut RunConfig, common: &CommonArgs) -> Result<(), String> {
    cfg.k = common.k;
    cfg.m = common.m;
    cfg.beta_re = common.beta_re;
    cfg.beta_im = common.beta_im;
    cfg.z_re = common.z_re;
    cfg.z_im = common.z_im;
    cfg.pressure_release = common.pressure_release;
    cfg.n_modes = common.n;
    cfg.output_path = common.output.clone();
    cfg.format = parse_format(&common.format)?;
    Ok(())
}

fn build_config(command: &Command) -> Result<RunConfig, String> {
    let cfg = match command {
        Command::Modes {
            common,
            surface_threshold,
        } => {
            let mut cfg = RunConfig::new(CommandKind::Modes);
            apply_common(&mut cfg, common)?;
            cfg.surface_threshold = *surface_threshold;
            cfg
        }
        Command::Ep { common, count } => {
            let mut cfg = RunConfig::new(CommandKind::Ep);
            apply_common(&mut cfg, common)?;
            cfg.count = Some(*count);
            cfg
        }
        Command::Encircle {
            common,
            ep_index,
            loop_nodes,
        } => {
            let mut cfg = RunConfig::new(CommandKind::Encircle);
            apply_common(&mut cfg, common)?;
            cfg.ep_index = Some(*ep_index);
            cfg.loop_nodes = match loop_nodes {
                Some(s) => Some(parse_loop(s)?),
                None => None,
            };
            cfg
        }
        Command::Nonortho { common } => {
            let mut cfg = RunConfig::new(CommandKind::Nonortho);
            apply_common(&mut cfg, common)?;
            cfg
        }
        Command::Junction { common } => {
            let mut cfg = RunConfig::new(CommandKind::Junction);
            apply_common(&mut cfg, common)?;
            cfg
        }
        Command::Power {
            common,
            zmax,
            zpoints,
            azimuthal_factor,
        } => {
            let mut cfg = RunConfig::new(CommandKind::Power);
            apply_common(&mut cfg, common)?;
            cfg.z_max = Some(*zmax);
            cfg.z_points = Some(*zpoints);
            cfg.azimuthal_factor = *azimuthal_factor;
            cfg
        }
        Command::Sweep {
            common,
            re_min,
            re_max,
            im_min,
            im_max,
            re_resolution,
            im_resolution,
            quantity,
            sij_i,
            sij_j,
        } => {
            let mut cfg = RunConfig::new(CommandKind::Sweep);
            apply_common(&mut cfg, common)?;
            cfg.re_min = Some(*re_min);
            cfg.re_max = Some(*re_max);
            cfg.im_min = Some(*im_min);
            cfg.im_max = Some(*im_max);
            cfg.re_resolution = Some(*re_resolution);
            cfg.im_resolution = Some(*im_resolution);
            cfg.quantity = Some(parse_quantity(quantity)?);
            cfg.sij_i = Some(*sij_i);
            cfg.sij_j = Some(*sij_j);
            cfg
        }
        Command::Run { .. } | Command::Recipe { .. } => unreachable!("handled in main"),
    };
    Ok(cfg)
}

/// Render and deliver one run's output; returns the rendered bytes.
fn emit(cfg: &RunConfig, out: runner::RunOutput) -> Result<String, (i32, String)> {
    let rendered = match cfg.format {
        OutputFormat::Json => {
            let envelope = json!({
                "config": cfg,
                "result": out.result,
                "diagnostics": merge_version(out.diagnostics),
            });
            to_json_string(&envelope).map_err(|e| (4, format!("serialization failed: {e}")))?
        }
        OutputFormat::Csv => out.csv.render(),
    };
    match &cfg.output_path {
        Some(path) if path != "-" => {
            if let Some(parent) = Path::new(path).parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| (4, format!("cannot create {}: {e}", parent.display())))?;
                }
            }
            fs::write(path, &rendered).map_err(|e| (4, format!("cannot write {path}: {e}")))?;
        }
        _ => print!("{rendered}"),
    }
    Ok(rendered)
}

fn merge_version(mut diags: serde_json::Value) -> serde_json::Value {
    if let Some(map) = diags.as_object_mut() {
        map.insert("tool_version".into(), json!(runner::version()));
    }
    diags
}

fn run_one(cfg: &RunConfig) -> Result<String, (i32, String)> {
    cfg.validate().map_err(|e| (2, e))?;
    let out = runner::execute(cfg).map_err(|e| (exit_code_for_core(&e), e.to_string()))?;
    emit(cfg, out)
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("DUCTMODES_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let failure = |code: i32, msg: String| -> ExitCode {
        eprintln!("error: {msg}");
        ExitCode::from(code as u8)
    };
    match &cli.command {
        Command::Run { config } => {
            let text = if config == "-" {
                let mut buf = String::new();
                use std::io::Read;
                if std::io::stdin().read_to_string(&mut buf).is_err() {
                    return failure(4, "cannot read stdin".into());
                }
                buf
            } else {
                match fs::read_to_string(config) {
                    Ok(t) => t,
                    Err(e) => return failure(4, format!("cannot read {config}: {e}")),
                }
            };
            // accept either a bare config or a previous output envelope
            let cfg: RunConfig = match serde_json::from_str::<RunConfig>(&text) {
                Ok(c) => c,
                Err(first_err) => match serde_json::from_str::<serde_json::Value>(&text)
                    .ok()
                    .and_then(|v| v.get("config").cloned())
                    .and_then(|c| serde_json::from_value(c).ok())
                {
                    Some(c) => c,
                    None => return failure(2, format!("invalid config: {first_err}")),
                },
            };
            match run_one(&cfg) {
                Ok(_) => ExitCode::SUCCESS,
                Err((code, msg)) => failure(code, msg),
            }
        }
        Command::Recipe { name, run, output } => {
            let configs = match recipes::figure_recipe(name) {
                Ok(c) => c,
                Err(e) => return failure(2, e),
            };
            if !*run {
                match to_json_string(&configs) {
                    Ok(s) => {
                        print!("{s}");
                        ExitCode::SUCCESS
                    }
                    Err(e) => failure(4, e.to_string()),
                }
            } else {
                for (i, cfg) in configs.iter().enumerate() {
                    let mut cfg = cfg.clone();
                    cfg.output_path = output.as_ref().map(|base| {
                        if configs.len() == 1 {
                            base.clone()
                        } else {
                            format!("{base}_{}", i + 1)
                        }
                    });
                    if let Err((code, msg)) = run_one(&cfg) {
                        return failure(code, msg);
                    }
                }
                ExitCode::SUCCESS
            }
        }
        other => match build_config(other) {
            Ok(cfg) => match run_one(&cfg) {
                Ok(_) => ExitCode::SUCCESS,
                Err((code, msg)) => failure(code, msg),
            },
            Err(e) => failure(2, e),
        },
    }
}
