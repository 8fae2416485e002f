//! Experiment configuration: a flat `key = value` text format (or the same
//! fields as JSON when the file name ends in `.json`).
//!
//! ```text
//! # which circuit to run
//! circuit = qft
//! size = 256
//! topologies = line,ring,star,grid,all-to-all
//! links = 1-5
//! deltas = 1,10,100,1000,10000
//! ```
//!
//! Unknown keys are errors. Every key has a default, so the empty string
//! parses to the default experiment.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use teleq_core::topology::TopologyKind;
use teleq_core::{NoiseParams, TimingParams};

/// Which circuit an experiment runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CircuitSpec {
    /// A generator family: `ghz`, `qft`, `cuccaro`, or `qvol`.
    Generated { kind: String, size: usize, depth: Option<usize> },
    /// A circuit file, native or qasm by extension.
    File { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub circuit: CircuitSpec,
    pub qubits_per_core: usize,
    pub topologies: Vec<TopologyKind>,
    pub links: Vec<usize>,
    pub link_width_bits: u32,
    pub clock_freq_hz: f64,
    /// Technology improvement factors; each divides quantum durations and
    /// error rates.
    pub deltas: Vec<f64>,
    pub repetitions: usize,
    /// Base seed; repetition `r` derives its circuit and mapper seeds.
    pub seed: u64,
    pub t_1q_ns: f64,
    pub t_2q_ns: f64,
    pub t_meas_ns: f64,
    pub t_epr_ns: f64,
    pub e_1q: f64,
    pub e_2q: f64,
    pub e_meas: f64,
    pub e_epr: f64,
    pub t1_ns: f64,
    pub t2_ns: f64,
    /// Improvement factor the relative-fidelity table is taken at.
    pub fig8_delta: f64,
    pub output_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        let tp = TimingParams::default();
        let np = NoiseParams::default();
        ExperimentConfig {
            circuit: CircuitSpec::Generated { kind: "qft".into(), size: 256, depth: None },
            qubits_per_core: 64,
            topologies: TopologyKind::ALL.to_vec(),
            links: vec![1, 2, 3, 4, 5],
            link_width_bits: tp.link_width_bits,
            clock_freq_hz: tp.clock_freq_hz,
            deltas: vec![1.0, 10.0, 100.0, 1000.0, 10000.0],
            repetitions: 5,
            seed: 1,
            t_1q_ns: tp.t_1q_ns,
            t_2q_ns: tp.t_2q_ns,
            t_meas_ns: tp.t_meas_ns,
            t_epr_ns: tp.t_epr_ns,
            e_1q: np.e_1q,
            e_2q: np.e_2q,
            e_meas: np.e_meas,
            e_epr: np.e_epr,
            t1_ns: np.t1_ns,
            t2_ns: np.t2_ns,
            fig8_delta: 100.0,
            output_dir: "out".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn timing(&self) -> TimingParams {
        TimingParams {
            t_1q_ns: self.t_1q_ns,
            t_2q_ns: self.t_2q_ns,
            t_meas_ns: self.t_meas_ns,
            t_epr_ns: self.t_epr_ns,
            clock_freq_hz: self.clock_freq_hz,
            link_width_bits: self.link_width_bits,
            delta_time: 1.0,
        }
    }

    pub fn noise(&self) -> NoiseParams {
        NoiseParams {
            e_1q: self.e_1q,
            e_2q: self.e_2q,
            e_meas: self.e_meas,
            e_epr: self.e_epr,
            t1_ns: self.t1_ns,
            t2_ns: self.t2_ns,
            delta_improv: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.topologies.is_empty() {
            bail!("topologies must not be empty");
        }
        if self.links.is_empty() || self.links.contains(&0) {
            bail!("links must be a non-empty list of positive counts");
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| d <= 0.0) {
            bail!("deltas must be positive");
        }
        if !self.deltas.contains(&self.fig8_delta) {
            bail!("fig8_delta must be one of deltas");
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.qubits_per_core < 3 {
            bail!("qubits_per_core must leave room for links and computation");
        }
        if self.link_width_bits == 0 {
            bail!("link_width_bits must be at least 1");
        }
        if self.clock_freq_hz <= 0.0 {
            bail!("clock_freq_hz must be positive");
        }
        if let CircuitSpec::Generated { kind, size, .. } = &self.circuit {
            match kind.as_str() {
                "ghz" | "qft" | "qvol" => {}
                "cuccaro" => {
                    if size % 2 != 0 {
                        bail!("cuccaro circuits use an even qubit count (2*bits + 2)");
                    }
                }
                other => bail!("unknown circuit kind '{other}'"),
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            parse_config(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected 'key = value'", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        apply_key(&mut cfg, key, value).with_context(|| format!("line {}: key '{key}'", i + 1))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_key(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "circuit" => {
            cfg.circuit = if value.contains('.') || value.contains('/') {
                CircuitSpec::File { path: value.into() }
            } else {
                let (kind, size, depth) = match &cfg.circuit {
                    CircuitSpec::Generated { size, depth, .. } => (value.into(), *size, *depth),
                    CircuitSpec::File { .. } => (value.into(), 256, None),
                };
                CircuitSpec::Generated { kind, size, depth }
            };
        }
        "size" => {
            let size: usize = value.parse()?;
            match &mut cfg.circuit {
                CircuitSpec::Generated { size: s, .. } => *s = size,
                CircuitSpec::File { .. } => bail!("size only applies to generated circuits"),
            }
        }
        "depth" => {
            let depth: usize = value.parse()?;
            match &mut cfg.circuit {
                CircuitSpec::Generated { depth: d, .. } => *d = Some(depth),
                CircuitSpec::File { .. } => bail!("depth only applies to generated circuits"),
            }
        }
        "qubits_per_core" => cfg.qubits_per_core = value.parse()?,
        "topologies" => {
            cfg.topologies = value
                .split(',')
                .map(str::trim)
                .map(|s| {
                    TopologyKind::from_str(s).ok_or_else(|| anyhow!("unknown topology '{s}'"))
                })
                .collect::<Result<_>>()?;
        }
        "links" => cfg.links = parse_usize_list(value)?,
        "link_width" => cfg.link_width_bits = value.parse()?,
        "clock_freq_mhz" => cfg.clock_freq_hz = value.parse::<f64>()? * 1e6,
        "deltas" => {
            cfg.deltas = value
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(Into::into))
                .collect::<Result<_>>()?;
        }
        "repetitions" => cfg.repetitions = value.parse()?,
        "seed" => cfg.seed = value.parse()?,
        "t_1q" => cfg.t_1q_ns = value.parse()?,
        "t_2q" => cfg.t_2q_ns = value.parse()?,
        "t_meas" => cfg.t_meas_ns = value.parse()?,
        "t_epr" => cfg.t_epr_ns = value.parse()?,
        "e_1q" => cfg.e_1q = value.parse()?,
        "e_2q" => cfg.e_2q = value.parse()?,
        "e_meas" => cfg.e_meas = value.parse()?,
        "e_epr" => cfg.e_epr = value.parse()?,
        "t1" => cfg.t1_ns = value.parse()?,
        "t2" => cfg.t2_ns = value.parse()?,
        "fig8_delta" => cfg.fig8_delta = value.parse()?,
        "output_dir" => cfg.output_dir = value.into(),
        other => bail!("unknown key '{other}'"),
    }
    Ok(())
}

/// Lists of counts: `1,2,3` or ranges `1-5`, mixed `1,3-5`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((lo, hi)) = part.split_once('-') {
            let lo: usize = lo.trim().parse()?;
            let hi: usize = hi.trim().parse()?;
            if lo > hi {
                bail!("empty range '{part}'");
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse()?);
        }
    }
    Ok(out)
}

/// Renders a config in the text format; `parse_config` reads it back.
pub fn render_config(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    match &cfg.circuit {
        CircuitSpec::Generated { kind, size, depth } => {
            let _ = writeln!(s, "circuit = {kind}");
            let _ = writeln!(s, "size = {size}");
            if let Some(d) = depth {
                let _ = writeln!(s, "depth = {d}");
            }
        }
        CircuitSpec::File { path } => {
            let _ = writeln!(s, "circuit = {path}");
        }
    }
    let topos: Vec<&str> = cfg.topologies.iter().map(|t| t.as_str()).collect();
    let _ = writeln!(s, "topologies = {}", topos.join(","));
    let links: Vec<String> = cfg.links.iter().map(|l| l.to_string()).collect();
    let _ = writeln!(s, "links = {}", links.join(","));
    let deltas: Vec<String> = cfg.deltas.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "deltas = {}", deltas.join(","));
    let _ = writeln!(s, "qubits_per_core = {}", cfg.qubits_per_core);
    let _ = writeln!(s, "link_width = {}", cfg.link_width_bits);
    let _ = writeln!(s, "clock_freq_mhz = {}", cfg.clock_freq_hz / 1e6);
    let _ = writeln!(s, "repetitions = {}", cfg.repetitions);
    let _ = writeln!(s, "seed = {}", cfg.seed);
    let _ = writeln!(s, "t_1q = {}", cfg.t_1q_ns);
    let _ = writeln!(s, "t_2q = {}", cfg.t_2q_ns);
    let _ = writeln!(s, "t_meas = {}", cfg.t_meas_ns);
    let _ = writeln!(s, "t_epr = {}", cfg.t_epr_ns);
    let _ = writeln!(s, "e_1q = {}", cfg.e_1q);
    let _ = writeln!(s, "e_2q = {}", cfg.e_2q);
    let _ = writeln!(s, "e_meas = {}", cfg.e_meas);
    let _ = writeln!(s, "e_epr = {}", cfg.e_epr);
    let _ = writeln!(s, "t1 = {}", cfg.t1_ns);
    let _ = writeln!(s, "t2 = {}", cfg.t2_ns);
    let _ = writeln!(s, "fig8_delta = {}", cfg.fig8_delta);
    let _ = writeln!(s, "output_dir = {}", cfg.output_dir);
    s
}
