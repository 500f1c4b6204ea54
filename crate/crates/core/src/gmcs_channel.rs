//! Gaussian-modulated coherent-state quadrature data through a linear channel.
//!
//! Alice's reference x quadratures are i.i.d. normal with variance V_A (in
//! shot-noise units, N₀ = 1). A photorefractive index k rescales her actual
//! transmitted amplitude by √k, so the modulation variance becomes k·V_A
//! while her records still hold the reference values. The channel is linear:
//!
//! x_B = √(ηT)·√k·x_A + z,   z ~ N(0, ηTε + N₀ + v_el)
//!
//! Only the x quadrature is simulated; p behaves symmetrically under
//! homodyne analysis.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

/// RNG identity recorded in batch metadata. Determinism is guaranteed per
/// seed for this generator; bit-compatibility across other generators is not.
pub const GENERATOR_ID: &str = "chacha12";

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("sample count must be at least 2, got {0}")]
    InvalidCount(usize),
    #[error("PE index must be > 0, got {0}")]
    NonPositivePeIndex(f64),
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),
    #[error("batch serialization: {0}")]
    Io(#[from] std::io::Error),
    #[error("batch parse: {0}")]
    Parse(String),
}

/// CVQKD link parameters, shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Modulation variance V_A (SNU).
    pub v_a: f64,
    /// Channel transmittance T, in (0, 1].
    pub t: f64,
    /// Excess noise ε referred to the channel input (SNU).
    pub eps: f64,
    /// Homodyne detector efficiency η, in (0, 1].
    pub eta: f64,
    /// Detector electronic noise v_el (SNU).
    pub v_el: f64,
    /// Shot-noise variance N₀; the analysis is normalized to 1.
    #[serde(default = "default_n0")]
    pub n0: f64,
    /// Reverse-reconciliation efficiency β, in (0, 1).
    pub beta: f64,
    /// Pulse repetition frequency f (Hz).
    pub f_rep: f64,
}

fn default_n0() -> f64 {
    1.0
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let check = |ok: bool, msg: String| {
            if ok {
                Ok(())
            } else {
                Err(ChannelError::InvalidParams(msg))
            }
        };
        check(
            self.v_a > 0.0 && self.v_a.is_finite(),
            format!("v_a must be > 0, got {}", self.v_a),
        )?;
        check(
            self.t > 0.0 && self.t <= 1.0,
            format!("t must be in (0, 1], got {}", self.t),
        )?;
        check(self.eps >= 0.0, format!("eps must be >= 0, got {}", self.eps))?;
        check(
            self.eta > 0.0 && self.eta <= 1.0,
            format!("eta must be in (0, 1], got {}", self.eta),
        )?;
        check(
            self.v_el >= 0.0,
            format!("v_el must be >= 0, got {}", self.v_el),
        )?;
        check(self.n0 > 0.0, format!("n0 must be > 0, got {}", self.n0))?;
        check(
            self.beta > 0.0 && self.beta < 1.0,
            format!("beta must be in (0, 1), got {}", self.beta),
        )?;
        check(
            self.f_rep > 0.0,
            format!("f_rep must be > 0, got {}", self.f_rep),
        )?;
        Ok(())
    }
}

/// Paired Alice/Bob quadrature samples with generation metadata.
///
/// `x_a` holds Alice's reference quadratures (before PE scaling); `x_b`
/// holds Bob's measurements of the √k-scaled transmission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureBatch {
    pub x_a: Vec<f64>,
    pub x_b: Vec<f64>,
    /// PE index applied at generation.
    pub k_true: f64,
    /// RNG seed.
    pub seed: u64,
    /// Sample count.
    pub n: usize,
}

/// Metadata header carried by batch CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchHeader {
    pub channel: ChannelParams,
    pub k_true: f64,
    pub seed: u64,
    pub n: usize,
    pub generator: String,
}

/// Draws a quadrature batch of `n` samples. Deterministic per `seed`.
pub fn generate(
    c: &ChannelParams,
    k: f64,
    n: usize,
    seed: u64,
) -> Result<QuadratureBatch, ChannelError> {
    c.validate()?;
    if n < 2 {
        return Err(ChannelError::InvalidCount(n));
    }
    if k <= 0.0 || !k.is_finite() {
        return Err(ChannelError::NonPositivePeIndex(k));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let alice = Normal::new(0.0, c.v_a.sqrt())
        .map_err(|e| ChannelError::InvalidParams(e.to_string()))?;
    let noise_var = c.eta * c.t * c.eps + c.n0 + c.v_el;
    let noise = Normal::new(0.0, noise_var.sqrt())
        .map_err(|e| ChannelError::InvalidParams(e.to_string()))?;
    let gain = (k * c.eta * c.t).sqrt();
    let mut x_a = Vec::with_capacity(n);
    let mut x_b = Vec::with_capacity(n);
    for _ in 0..n {
        let xa = alice.sample(&mut rng);
        let z = noise.sample(&mut rng);
        x_a.push(xa);
        x_b.push(gain * xa + z);
    }
    Ok(QuadratureBatch {
        x_a,
        x_b,
        k_true: k,
        seed,
        n,
    })
}

impl QuadratureBatch {
    /// Writes `# {json header}` followed by `idx,x_a,x_b` rows.
    ///
    /// Floats are emitted with 12 significant digits.
    pub fn write_csv<W: Write>(&self, c: &ChannelParams, out: &mut W) -> Result<(), ChannelError> {
        let header = BatchHeader {
            channel: *c,
            k_true: self.k_true,
            seed: self.seed,
            n: self.n,
            generator: GENERATOR_ID.to_string(),
        };
        writeln!(
            out,
            "# {}",
            serde_json::to_string(&header).map_err(|e| ChannelError::Parse(e.to_string()))?
        )?;
        writeln!(out, "idx,x_a,x_b")?;
        for (idx, (xa, xb)) in self.x_a.iter().zip(&self.x_b).enumerate() {
            writeln!(out, "{idx},{},{}", crate::fmt_sig(*xa), crate::fmt_sig(*xb))?;
        }
        Ok(())
    }

    /// Reads a batch written by [`QuadratureBatch::write_csv`].
    ///
    /// Leading `#` comment lines that do not parse as the batch header
    /// (e.g. tool metadata) are skipped.
    pub fn read_csv<R: BufRead>(input: R) -> Result<(BatchHeader, QuadratureBatch), ChannelError> {
        let mut lines = input.lines();
        let mut header: Option<BatchHeader> = None;
        let columns = loop {
            let line = lines
                .next()
                .ok_or_else(|| ChannelError::Parse("missing column header".into()))??;
            if let Some(json) = line.strip_prefix('#') {
                if header.is_none() {
                    header = serde_json::from_str(json.trim()).ok();
                }
                continue;
            }
            break line;
        };
        let header =
            header.ok_or_else(|| ChannelError::Parse("missing `# {json}` batch header".into()))?;
        if columns.trim() != "idx,x_a,x_b" {
            return Err(ChannelError::Parse(format!(
                "unexpected columns: {columns}"
            )));
        }
        let mut x_a = Vec::with_capacity(header.n);
        let mut x_b = Vec::with_capacity(header.n);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let _idx = parts
                .next()
                .ok_or_else(|| ChannelError::Parse(format!("bad row: {line}")))?;
            let xa: f64 = parts
                .next()
                .ok_or_else(|| ChannelError::Parse(format!("bad row: {line}")))?
                .parse()
                .map_err(|e| ChannelError::Parse(format!("bad x_a in row `{line}`: {e}")))?;
            let xb: f64 = parts
                .next()
                .ok_or_else(|| ChannelError::Parse(format!("bad row: {line}")))?
                .parse()
                .map_err(|e| ChannelError::Parse(format!("bad x_b in row `{line}`: {e}")))?;
            x_a.push(xa);
            x_b.push(xb);
        }
        if x_a.len() != header.n {
            return Err(ChannelError::Parse(format!(
                "header says n={}, found {} rows",
                header.n,
                x_a.len()
            )));
        }
        let batch = QuadratureBatch {
            n: x_a.len(),
            x_a,
            x_b,
            k_true: header.k_true,
            seed: header.seed,
        };
        Ok((header, batch))
    }
}
