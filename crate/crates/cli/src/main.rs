//! Command-line front end: config ingestion, subcommand dispatch, and
//! deterministic CSV/JSON serialization.

mod config;
mod output;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use cvqkd_pe::estimation::estimate_naive;
use cvqkd_pe::gmcs_channel::{generate, QuadratureBatch};
use cvqkd_pe::keyrate::{audit_eigenvalue_convention, secret_key_rate};
use cvqkd_pe::monitor::{assess_window, tap_variance};
use cvqkd_pe::mzm::{pe_index, transfer_nominal, transfer_pe, TransferPoint};
use cvqkd_pe::pe_model::{
    arm_phase_deviation, differential_phase, photoconductivity, saturated_field, ArmState,
};
use cvqkd_pe::scenario::{sweep, ScenarioGrid};
use serde::Serialize;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

use config::{transmittance_from_km, RunConfig};
use output::{emit, json_result, scenario_csv, transfer_csv, Meta, TransferRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    ConfigParse(String),
    #[error("{0}")]
    Domain(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported output format: {0}")]
    UnsupportedFormat(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::ConfigParse(_) => "config_parse",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
            CliError::UnsupportedFormat(_) => "unsupported_format",
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "cvqkd-pe",
    version,
    about = "Photorefractive-effect security analysis for GMCS-CVQKD"
)]
struct Cli {
    /// TOML run configuration (bundled defaults when omitted)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the configured RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when omitted); written atomically
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where a command supports both
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modulator transfer curve with and without the index shift
    TransferCurve {
        /// Differential phase shift (rad); default: first configured value
        #[arg(long)]
        dphi_p: Option<f64>,
        /// Input intensity (arbitrary linear units)
        #[arg(long, default_value_t = 1.0)]
        i_in: f64,
    },
    /// Per-arm and differential phase deviation from the material model
    PePhase {
        /// Irradiation intensity on arm 1 (W/m^2)
        #[arg(long, default_value_t = 0.0)]
        i_ir1: f64,
        /// Irradiation intensity on arm 2 (W/m^2)
        #[arg(long, default_value_t = 0.0)]
        i_ir2: f64,
        /// Shared drive voltage (V)
        #[arg(long, default_value_t = 0.0)]
        v_app: f64,
        /// Also report the output ratio k at this bias voltage
        #[arg(long)]
        v_dc: Option<f64>,
    },
    /// Draw a quadrature batch and serialize it as CSV
    Generate {
        /// PE index applied to Alice's modulation
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Sample count
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
    /// Estimate (T, eps) from a batch CSV the way unaware parties would
    Estimate {
        /// Batch CSV produced by `generate`
        #[arg(long)]
        input: PathBuf,
    },
    /// Secret key rate report at the configured channel
    Keyrate {
        /// Override channel transmittance
        #[arg(long, conflicts_with = "distance_km")]
        t: Option<f64>,
        /// Set transmittance from fiber length at 0.2 dB/km
        #[arg(long)]
        distance_km: Option<f64>,
        /// Override excess noise
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Nominal/practical/estimated rates over the configured grid
    Sweep,
    /// Assess batch files with the variance-tap monitor
    Monitor {
        /// Batch CSV files, one verdict per file
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Tap variance override (default: simulated tap from each batch)
        #[arg(long)]
        monitored_variance: Option<f64>,
    },
    /// Rebuild the bundled figure datasets
    Reproduce {
        /// One of: fig1, fig3, fig4
        figure: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            eprintln!(
                "{}",
                serde_json::json!({"error": {"kind": "usage", "message": err.to_string()}})
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}})
            );
            ExitCode::FAILURE
        }
    }
}

fn require_json(format: Option<Format>, command: &str) -> Result<(), CliError> {
    if format == Some(Format::Csv) {
        return Err(CliError::UnsupportedFormat(format!(
            "{command} emits JSON only"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out_path = cli.out.clone().or_else(|| cfg.output_path.clone());
    let out = out_path.as_deref();

    match cli.command {
        Command::TransferCurve { dphi_p, i_in } => {
            require_csv(cli.format, "transfer-curve")?;
            let dphi = dphi_p
                .or_else(|| cfg.transfer.dphi_values.first().copied())
                .unwrap_or(0.0);
            let meta = Meta::new(&format!("transfer-curve --dphi-p {dphi}"), &cfg);
            let rows = transfer_rows(&cfg, dphi, i_in);
            emit(out, &transfer_csv(&meta, &rows)?)
        }
        Command::PePhase { i_ir1, i_ir2, v_app, v_dc } => {
            require_json(cli.format, "pe-phase")?;
            let m = &cfg.material;
            let arm1 = ArmState { i_ir: i_ir1, v_app };
            let arm2 = ArmState { i_ir: i_ir2, v_app };
            let dphi_p = differential_phase(m, &arm1, &arm2).map_err(domain)?;
            let k_at_bias = match v_dc {
                Some(v) => Some(
                    pe_index(
                        &cfg.modulator,
                        &TransferPoint { v_dc: v, i_in: 1.0, dphi_p },
                    )
                    .map_err(domain)?,
                ),
                None => None,
            };
            #[derive(Serialize)]
            struct PhaseReport {
                sigma_ph_arm1: f64,
                sigma_ph_arm2: f64,
                e_s_arm1: f64,
                e_s_arm2: f64,
                dphi_arm1: f64,
                dphi_arm2: f64,
                dphi_p: f64,
                #[serde(skip_serializing_if = "Option::is_none")]
                k_at_bias: Option<f64>,
            }
            let report = PhaseReport {
                sigma_ph_arm1: photoconductivity(m, i_ir1),
                sigma_ph_arm2: photoconductivity(m, i_ir2),
                e_s_arm1: saturated_field(m, &arm1).map_err(domain)?,
                e_s_arm2: saturated_field(m, &arm2).map_err(domain)?,
                dphi_arm1: arm_phase_deviation(m, &arm1).map_err(domain)?,
                dphi_arm2: arm_phase_deviation(m, &arm2).map_err(domain)?,
                dphi_p,
                k_at_bias,
            };
            let meta = Meta::new("pe-phase", &cfg);
            emit(out, &json_result(&meta, &report)?)
        }
        Command::Generate { k, n } => {
            require_csv(cli.format, "generate")?;
            let batch = generate(&cfg.channel, k, n, cfg.seed).map_err(domain)?;
            let meta = Meta::new(&format!("generate --k {k} --n {n}"), &cfg);
            let mut bytes = Vec::new();
            use std::io::Write;
            writeln!(bytes, "{}", meta.comment_line()?)?;
            batch.write_csv(&cfg.channel, &mut bytes).map_err(domain)?;
            emit(out, &bytes)
        }
        Command::Estimate { input } => {
            require_json(cli.format, "estimate")?;
            let file = std::fs::File::open(&input)?;
            let (_, batch) = QuadratureBatch::read_csv(BufReader::new(file)).map_err(domain)?;
            let estimate = estimate_naive(&batch, &cfg.channel).map_err(domain)?;
            let meta = Meta::new(&format!("estimate --input {}", input.display()), &cfg);
            emit(out, &json_result(&meta, &estimate)?)
        }
        Command::Keyrate { t, distance_km, eps } => {
            require_json(cli.format, "keyrate")?;
            let mut channel = cfg.channel;
            if let Some(t) = t {
                channel.t = t;
            }
            if let Some(d) = distance_km {
                channel.t = transmittance_from_km(d);
            }
            if let Some(eps) = eps {
                channel.eps = eps;
            }
            let report = secret_key_rate(&channel).map_err(domain)?;
            let t_values: Vec<f64> = (1..=20).map(|j| j as f64 / 20.0).collect();
            let audit = audit_eigenvalue_convention(&channel, &t_values);
            #[derive(Serialize)]
            struct KeyrateOutput {
                report: cvqkd_pe::KeyRateReport,
                convention_audit: cvqkd_pe::keyrate::ConventionAudit,
            }
            let meta = Meta::new("keyrate", &cfg);
            emit(
                out,
                &json_result(&meta, &KeyrateOutput { report, convention_audit: audit })?,
            )
        }
        Command::Sweep => {
            let rows = sweep(&cfg.scenario_grid()).map_err(domain)?;
            let meta = Meta::new("sweep", &cfg);
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => emit(out, &scenario_csv(&meta, &rows)?),
                Format::Json => emit(out, &json_result(&meta, &rows)?),
            }
        }
        Command::Monitor { input, monitored_variance } => {
            require_json(cli.format, "monitor")?;
            let monitor_cfg = cfg.monitor_config();
            let meta = Meta::new("monitor", &cfg);
            let mut bytes = Vec::new();
            use std::io::Write;
            writeln!(
                bytes,
                "{}",
                serde_json::json!({"meta": &meta})
            )?;
            for (index, path) in input.iter().enumerate() {
                let file = std::fs::File::open(path)?;
                let (_, batch) =
                    QuadratureBatch::read_csv(BufReader::new(file)).map_err(domain)?;
                let tap = monitored_variance
                    .unwrap_or_else(|| tap_variance(&batch, monitor_cfg.window));
                let verdict =
                    assess_window(&monitor_cfg, &batch, tap, index).map_err(domain)?;
                writeln!(bytes, "{}", serde_json::to_string(&verdict).map_err(domain)?)?;
            }
            emit(out, &bytes)
        }
        Command::Reproduce { figure } => reproduce(&figure, cli.seed, out),
    }
}

fn require_csv(format: Option<Format>, command: &str) -> Result<(), CliError> {
    if format == Some(Format::Json) {
        return Err(CliError::UnsupportedFormat(format!(
            "{command} emits CSV only"
        )));
    }
    Ok(())
}

fn transfer_rows(cfg: &RunConfig, dphi_p: f64, i_in: f64) -> Vec<TransferRow> {
    cfg.transfer_voltages()
        .into_iter()
        .map(|v_dc| {
            let pt = TransferPoint { v_dc, i_in, dphi_p };
            TransferRow {
                v_dc,
                i_out_nominal: transfer_nominal(&cfg.modulator, v_dc, i_in),
                i_out_pe: transfer_pe(&cfg.modulator, &pt),
                k: pe_index(&cfg.modulator, &pt).ok(),
            }
        })
        .collect()
}

const FIG1_RECIPE: &str = include_str!("../recipes/fig1.toml");
const FIG3_RECIPE: &str = include_str!("../recipes/fig3.toml");
const FIG4_RECIPE: &str = include_str!("../recipes/fig4.toml");

/// Figure datasets from the bundled recipe configs (self-contained; the
/// user config does not apply). `--out` names the target directory,
/// defaulting to the current directory.
fn reproduce(
    figure: &str,
    seed_override: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let dir = out.unwrap_or(Path::new("."));
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir)?;
    }
    let load_recipe = |text: &str| -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::parse(text)?;
        if let Some(seed) = seed_override {
            cfg.seed = seed;
        }
        Ok(cfg)
    };
    match figure {
        "fig1" => {
            let cfg = load_recipe(FIG1_RECIPE)?;
            for dphi in cfg.transfer.dphi_values.clone() {
                let meta = Meta::new(&format!("reproduce fig1 --dphi-p {dphi}"), &cfg);
                let rows = transfer_rows(&cfg, dphi, 1.0);
                let name = format!("fig1_dphi{dphi:.2}.csv");
                output::write_atomic(&dir.join(name), &transfer_csv(&meta, &rows)?)?;
            }
            Ok(())
        }
        "fig3" => {
            let cfg = load_recipe(FIG3_RECIPE)?;
            let rows = sweep(&cfg.scenario_grid()).map_err(domain)?;
            let meta = Meta::new("reproduce fig3", &cfg);
            output::write_atomic(&dir.join("fig3.csv"), &scenario_csv(&meta, &rows)?)
        }
        "fig4" => {
            let cfg = load_recipe(FIG4_RECIPE)?;
            for k in cfg.grid.k_values.clone() {
                let grid = ScenarioGrid {
                    t_values: cfg.grid.t_values.clone(),
                    k_values: vec![k],
                    eps_values: cfg.grid.eps_values.clone(),
                    base: cfg.channel,
                };
                let rows = sweep(&grid).map_err(domain)?;
                let meta = Meta::new(&format!("reproduce fig4 --k {k}"), &cfg);
                let name = format!("fig4_k{k:.1}.csv");
                output::write_atomic(&dir.join(name), &scenario_csv(&meta, &rows)?)?;
            }
            Ok(())
        }
        other => Err(CliError::Domain(format!(
            "unknown figure `{other}` (expected fig1, fig3, or fig4)"
        ))),
    }
}
