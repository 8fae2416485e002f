//! Files a sweep writes: raw rows, infeasible cells, and the summary
//! tables the figures plot. Output depends only on the config, so a rerun
//! writes identical bytes.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;

use teleq_core::bottleneck::sweep_bottleneck;
use teleq_core::topology::TopologyKind;
use teleq_core::TimingParams;

use crate::config::ExperimentConfig;
use crate::experiment::{ExperimentOutput, RunRecord};

pub const RUNS_HEADER: &[&str] = &[
    "circuit",
    "topology",
    "links",
    "num_cores",
    "rep",
    "delta",
    "circuit_seed",
    "map_seed",
    "num_qubits",
    "num_gates",
    "num_slices",
    "transfers",
    "total_tlp",
    "sequential_tlp",
    "computation_ns",
    "makespan_ns",
    "coherence",
    "operational",
    "overall",
    "ops_one_q",
    "ops_two_q",
    "ops_meas",
    "ops_epr",
];

pub const INFEASIBLE_HEADER: &[&str] = &["topology", "links", "reason"];

pub const FIG5_HEADER: &[&str] =
    &["link_width_bits", "clock_freq_mhz", "delta_time", "threshold_log2_qubits"];

const FIG7_HEADER: &[&str] = &[
    "topology",
    "links",
    "num_cores",
    "mean_total_tlp",
    "std_total_tlp",
    "mean_sequential_tlp",
    "std_sequential_tlp",
];

const FIG8_HEADER: &[&str] =
    &["topology", "links", "num_cores", "mean_overall", "relative_overall"];

const FIG9_HEADER: &[&str] = &[
    "topology",
    "links",
    "delta",
    "mean_coherence",
    "mean_operational",
    "mean_overall",
    "mean_makespan_ns",
];

/// Renders rows under an explicit header; the header pins the column
/// order the files document.
pub fn rows_to_csv<S: Serialize>(header: &[&str], rows: &[S]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow!("flushing csv: {e}"))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Fig5Row {
    pub link_width_bits: u32,
    pub clock_freq_mhz: f64,
    pub delta_time: f64,
    pub threshold_log2_qubits: Option<u32>,
}

pub const FIG5_FREQS_MHZ: [f64; 9] =
    [10.0, 25.0, 50.0, 75.0, 100.0, 250.0, 500.0, 750.0, 1000.0];
pub const FIG5_DELTAS: [f64; 3] = [1.0, 10.0, 100.0];

pub fn default_fig5_widths() -> Vec<u32> {
    (1..=15).collect()
}

/// System sizes where the classical network overtakes the quantum stages
/// of a teleportation, per link width, clock, and speedup.
pub fn fig5_rows(
    widths: &[u32],
    freqs_mhz: &[f64],
    deltas: &[f64],
    base: &TimingParams,
) -> Vec<Fig5Row> {
    let freqs_hz: Vec<f64> = freqs_mhz.iter().map(|f| f * 1e6).collect();
    sweep_bottleneck(widths, &freqs_hz, deltas, base)
        .into_iter()
        .map(|r| Fig5Row {
            link_width_bits: r.link_width_bits,
            clock_freq_mhz: r.clock_freq_hz / 1e6,
            delta_time: r.delta_time,
            threshold_log2_qubits: r.threshold_log2_qubits,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct Fig7Row {
    topology: TopologyKind,
    links: usize,
    num_cores: usize,
    mean_total_tlp: f64,
    std_total_tlp: f64,
    mean_sequential_tlp: f64,
    std_sequential_tlp: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Fig8Row {
    topology: TopologyKind,
    links: usize,
    num_cores: usize,
    mean_overall: f64,
    relative_overall: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Fig9Row {
    topology: TopologyKind,
    links: usize,
    delta: f64,
    mean_coherence: f64,
    mean_operational: f64,
    mean_overall: f64,
    mean_makespan_ns: f64,
}

/// Sample statistics; a single value reports zero spread.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One feasible grid cell's slice of the record list.
struct CellRows<'a> {
    topology: TopologyKind,
    links: usize,
    num_cores: usize,
    rows: &'a [RunRecord],
}

fn split_cells<'a>(out: &'a ExperimentOutput, cfg: &ExperimentConfig) -> Vec<CellRows<'a>> {
    let per_cell = cfg.repetitions * cfg.deltas.len();
    assert_eq!(out.records.len() % per_cell, 0, "records arrive whole cells at a time");
    out.records
        .chunks(per_cell)
        .map(|rows| {
            let first = &rows[0];
            debug_assert!(rows
                .iter()
                .all(|r| (r.topology, r.links) == (first.topology, first.links)));
            CellRows {
                topology: first.topology,
                links: first.links,
                num_cores: first.num_cores,
                rows,
            }
        })
        .collect()
}

fn pick<'a>(rows: &'a [RunRecord], delta: f64, f: fn(&RunRecord) -> f64) -> Vec<f64> {
    rows.iter().filter(|r| r.delta == delta).map(f).collect()
}

fn fig7_rows(cells: &[CellRows], delta: f64) -> Vec<Fig7Row> {
    cells
        .iter()
        .map(|c| {
            let (mean_total_tlp, std_total_tlp) =
                mean_std(&pick(c.rows, delta, |r| r.total_tlp as f64));
            let (mean_sequential_tlp, std_sequential_tlp) =
                mean_std(&pick(c.rows, delta, |r| r.sequential_tlp as f64));
            Fig7Row {
                topology: c.topology,
                links: c.links,
                num_cores: c.num_cores,
                mean_total_tlp,
                std_total_tlp,
                mean_sequential_tlp,
                std_sequential_tlp,
            }
        })
        .collect()
}

fn fig8_rows(cells: &[CellRows], delta: f64) -> Vec<Fig8Row> {
    let means: Vec<f64> = cells
        .iter()
        .map(|c| mean_std(&pick(c.rows, delta, |r| r.overall)).0)
        .collect();
    let best = means.iter().copied().fold(0.0, f64::max);
    cells
        .iter()
        .zip(&means)
        .map(|(c, &mean_overall)| Fig8Row {
            topology: c.topology,
            links: c.links,
            num_cores: c.num_cores,
            mean_overall,
            relative_overall: if best > 0.0 { mean_overall / best } else { 0.0 },
        })
        .collect()
}

fn fig9_rows(cells: &[CellRows], deltas: &[f64]) -> Vec<Fig9Row> {
    let mut rows = Vec::with_capacity(cells.len() * deltas.len());
    for c in cells {
        for &delta in deltas {
            rows.push(Fig9Row {
                topology: c.topology,
                links: c.links,
                delta,
                mean_coherence: mean_std(&pick(c.rows, delta, |r| r.coherence)).0,
                mean_operational: mean_std(&pick(c.rows, delta, |r| r.operational)).0,
                mean_overall: mean_std(&pick(c.rows, delta, |r| r.overall)).0,
                mean_makespan_ns: mean_std(&pick(c.rows, delta, |r| r.makespan_ns)).0,
            });
        }
    }
    rows
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes the dataset into `dir`:
///
/// * `runs.csv`: every data point.
/// * `infeasible.csv`: grid cells no layout can host.
/// * `fig5.csv`: classical-bottleneck thresholds over width, clock, and
///   speedup; empty threshold means the classical network never dominates.
/// * `fig7.csv`: teleportation counts per cell at the first delta.
/// * `fig8.csv`: overall fidelity per cell at `fig8_delta`, absolute and
///   relative to the best cell.
/// * `fig9.csv`: fidelity and makespan means per cell and delta.
/// * `meta.json`: the configuration that produced everything above.
pub fn write_dataset(cfg: &ExperimentConfig, out: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(dir, "runs.csv", &rows_to_csv(RUNS_HEADER, &out.records)?)?;
    write_file(dir, "infeasible.csv", &rows_to_csv(INFEASIBLE_HEADER, &out.infeasible)?)?;
    let fig5 = fig5_rows(&default_fig5_widths(), &FIG5_FREQS_MHZ, &FIG5_DELTAS, &cfg.timing());
    write_file(dir, "fig5.csv", &rows_to_csv(FIG5_HEADER, &fig5)?)?;
    let cells = split_cells(out, cfg);
    write_file(dir, "fig7.csv", &rows_to_csv(FIG7_HEADER, &fig7_rows(&cells, cfg.deltas[0]))?)?;
    write_file(dir, "fig8.csv", &rows_to_csv(FIG8_HEADER, &fig8_rows(&cells, cfg.fig8_delta))?)?;
    write_file(dir, "fig9.csv", &rows_to_csv(FIG9_HEADER, &fig9_rows(&cells, &cfg.deltas))?)?;
    let meta = serde_json::to_string_pretty(cfg)? + "\n";
    write_file(dir, "meta.json", &meta)
}
