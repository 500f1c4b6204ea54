//! Deterministic serialization: metadata headers, CSV emitters, atomic
//! file writes. Identical config + seed must yield byte-identical output.

use crate::config::RunConfig;
use cvqkd_pe::fmt_sig;
use cvqkd_pe::scenario::ScenarioRow;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Header block embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Meta<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: &'a RunConfig,
}

impl<'a> Meta<'a> {
    pub fn new(command: &str, config: &'a RunConfig) -> Self {
        Meta {
            tool: "cvqkd-pe",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: config.seed,
            config,
        }
    }

    pub fn comment_line(&self) -> Result<String, CliError> {
        Ok(format!(
            "# {}",
            serde_json::to_string(self).map_err(|e| CliError::Domain(e.to_string()))?
        ))
    }
}

/// Writes through a temp file in the same directory, then renames over the
/// destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        )),
        None => std::path::PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        )),
    };
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Emits to `--out` atomically when given, else to stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_sig(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_sig(v),
        None => "nan".to_string(),
    }
}

/// Scenario sweep CSV: metadata comment, then
/// `T,k,eps,K_nominal,K_practical,K_estimated,gap,status` rows.
pub fn scenario_csv(meta: &Meta, rows: &[ScenarioRow]) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    writeln!(out, "{}", meta.comment_line()?)?;
    writeln!(out, "T,k,eps,K_nominal,K_practical,K_estimated,gap,status")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_sig(row.t),
            fmt_sig(row.k),
            fmt_sig(row.eps),
            opt_sig(row.k_nominal),
            opt_sig(row.k_practical),
            opt_sig(row.k_estimated),
            opt_sig(row.gap),
            csv_field(&row.status)
        )?;
    }
    Ok(out)
}

/// One transfer-curve CSV row per bias point:
/// `v_dc,i_out_nominal,i_out_pe,k` ("nan" for k at transfer nulls).
pub struct TransferRow {
    pub v_dc: f64,
    pub i_out_nominal: f64,
    pub i_out_pe: f64,
    pub k: Option<f64>,
}

pub fn transfer_csv(meta: &Meta, rows: &[TransferRow]) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    writeln!(out, "{}", meta.comment_line()?)?;
    writeln!(out, "v_dc,i_out_nominal,i_out_pe,k")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(row.v_dc),
            fmt_sig(row.i_out_nominal),
            fmt_sig(row.i_out_pe),
            opt_sig(row.k)
        )?;
    }
    Ok(out)
}

/// JSON envelope `{ "meta": ..., "result": ... }`, pretty-printed.
pub fn json_result<T: Serialize>(meta: &Meta, result: &T) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct Envelope<'a, T: Serialize> {
        meta: &'a Meta<'a>,
        result: &'a T,
    }
    let mut bytes = serde_json::to_vec_pretty(&Envelope { meta, result })
        .map_err(|e| CliError::Domain(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}
