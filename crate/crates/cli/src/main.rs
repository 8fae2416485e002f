use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use teleq::circuit_io::{build_circuit, load_circuit, save_native};
use teleq::config::{parse_usize_list, CircuitSpec, ExperimentConfig};
use teleq::dataset::{fig5_rows, rows_to_csv, write_dataset, FIG5_HEADER};
use teleq::experiment::run_experiment;
use teleq_core::circuit::{render_native, slice_circuit};
use teleq_core::fidelity::{apply_improvement, estimate};
use teleq_core::mapper::{map_circuit, Placement, Transfer};
use teleq_core::netsim::{schedule, slice_durations_ns};
use teleq_core::topology::min_cores;
use teleq_core::{
    Circuit, CoreGraph, MapOptions, NoiseParams, OperationCounts, TimingParams, TopologyKind,
};

#[derive(Parser)]
#[command(name = "teleq", version, about = "Multi-core quantum architecture explorer")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Writes a benchmark circuit in the native format.
    Gen {
        /// Generator family: ghz, qft, cuccaro, or qvol.
        kind: String,
        /// Qubit count.
        size: usize,
        /// Layer count for qvol; defaults to the qubit count.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Places a circuit's qubits onto cores, slice by slice.
    Map {
        /// Circuit file, `.qasm` or native.
        circuit: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
        /// Tie-break seed for the placement solver.
        #[arg(long)]
        seed: Option<u64>,
        /// Writes placements and transfers as JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Maps a circuit, schedules its transfers, and reports timing and
    /// fidelity as JSON.
    Schedule {
        /// Circuit file, `.qasm` or native.
        circuit: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Improvement factor over gate times and error rates.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Classical link width in bits.
        #[arg(long, default_value_t = 10)]
        link_width: u32,
        /// Classical network clock in MHz.
        #[arg(long, default_value_t = 200.0)]
        clock_freq_mhz: f64,
        /// Writes per-hop link events as CSV.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Tabulates the system size where the classical network overtakes
    /// the quantum stages of a teleportation.
    Bottleneck {
        /// Link widths in bits, lists or ranges: `1-15` or `4,8,16`.
        #[arg(long, default_value = "1-15")]
        widths: String,
        /// Network clocks in MHz.
        #[arg(long, default_value = "10,25,50,75,100,250,500,750,1000")]
        freqs_mhz: String,
        /// Quantum speedup factors.
        #[arg(long, default_value = "1,10,100")]
        deltas: String,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Runs the sweep a config describes and writes the dataset.
    Run {
        /// Experiment config, `key = value` text or JSON.
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LayoutArgs {
    /// Interconnect shape: line, ring, star, grid, or all-to-all.
    #[arg(long, default_value = "line", value_parser = parse_topology)]
    topology: TopologyKind,
    /// Core count; defaults to the smallest feasible layout.
    #[arg(long)]
    cores: Option<usize>,
    /// Parallel links per edge.
    #[arg(long, default_value_t = 1)]
    links: usize,
    /// Physical qubits per core.
    #[arg(long, default_value_t = 64)]
    qubits_per_core: usize,
}

fn parse_topology(s: &str) -> Result<TopologyKind, String> {
    TopologyKind::from_str(s).ok_or_else(|| format!("unknown topology '{s}'"))
}

impl LayoutArgs {
    fn build(&self, num_virtual: usize) -> Result<CoreGraph> {
        let cores = match self.cores {
            Some(n) => n,
            None => min_cores(self.topology, self.qubits_per_core, self.links, num_virtual)
                .ok_or_else(|| {
                    anyhow!(
                        "no {} layout fits {num_virtual} qubits with {} links/edge",
                        self.topology.as_str(),
                        self.links
                    )
                })?,
        };
        Ok(CoreGraph::build(self.topology, cores, self.links, self.qubits_per_core)?)
    }
}

fn display_name(c: &Circuit, path: &Path) -> String {
    if c.name().is_empty() {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    } else {
        c.name().to_string()
    }
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| anyhow!("'{p}': {e}")))
        .collect()
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen(
    kind: String,
    size: usize,
    depth: Option<usize>,
    seed: u64,
    output: Option<PathBuf>,
) -> Result<()> {
    let spec = CircuitSpec::Generated { kind, size, depth };
    let c = build_circuit(&spec, seed)?;
    match output {
        Some(path) => save_native(&c, &path),
        None => emit(&render_native(&c), None),
    }
}

fn cmd_map(
    circuit: PathBuf,
    layout: LayoutArgs,
    seed: Option<u64>,
    output: Option<PathBuf>,
) -> Result<()> {
    let c = load_circuit(&circuit)?;
    let name = display_name(&c, &circuit);
    let sc = slice_circuit(c);
    let g = layout.build(sc.circuit().num_qubits())?;
    let res = map_circuit(&sc, &g, &MapOptions { seed })?;

    println!(
        "{name}: {} qubits, {} gates, {} slices",
        sc.circuit().num_qubits(),
        sc.circuit().num_gates(),
        sc.num_slices()
    );
    println!(
        "{} topology: {} cores, {} links/edge, {} qubits/core",
        g.kind().as_str(),
        g.num_cores(),
        g.parallel_links(),
        g.qubits_per_core()
    );
    println!("transfers: {}", res.transfers.len());

    if let Some(path) = output {
        #[derive(Serialize)]
        struct MapDump<'a> {
            placements: &'a [Placement],
            transfers: &'a [Transfer],
        }
        let dump = MapDump { placements: &res.placements, transfers: &res.transfers };
        fs::write(&path, serde_json::to_string_pretty(&dump)? + "\n")?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_schedule(
    circuit: PathBuf,
    layout: LayoutArgs,
    seed: Option<u64>,
    delta: f64,
    link_width: u32,
    clock_freq_mhz: f64,
    events: Option<PathBuf>,
) -> Result<()> {
    let c = load_circuit(&circuit)?;
    let name = display_name(&c, &circuit);
    let base_counts = OperationCounts::from_circuit(&c);
    let sc = slice_circuit(c);
    let g = layout.build(sc.circuit().num_qubits())?;
    let res = map_circuit(&sc, &g, &MapOptions { seed })?;

    let tp0 = TimingParams {
        link_width_bits: link_width,
        clock_freq_hz: clock_freq_mhz * 1e6,
        ..TimingParams::default()
    };
    let (tp, np) = apply_improvement(&tp0, &NoiseParams::default(), delta);
    let slice_ns = slice_durations_ns(&sc, &tp);
    let sr = schedule(&res.transfers, &g, &tp, &slice_ns)?;
    let counts = base_counts + OperationCounts::teleport_overhead(sr.total_tlp);
    let fr = estimate(&sr, &counts, &np);

    if let Some(path) = events {
        #[derive(Serialize)]
        struct EventRow {
            transfer: usize,
            qubit: usize,
            boundary: usize,
            src_core: usize,
            dst_core: usize,
            edge: usize,
            slot: usize,
            start_ns: f64,
            end_ns: f64,
        }
        let rows: Vec<EventRow> = sr
            .events
            .iter()
            .map(|e| EventRow {
                transfer: e.transfer,
                qubit: e.qubit,
                boundary: e.boundary,
                src_core: e.src_core,
                dst_core: e.dst_core,
                edge: e.link.edge,
                slot: e.link.slot,
                start_ns: e.start_ns,
                end_ns: e.end_ns,
            })
            .collect();
        let header = [
            "transfer", "qubit", "boundary", "src_core", "dst_core", "edge", "slot", "start_ns",
            "end_ns",
        ];
        fs::write(&path, rows_to_csv(&header, &rows)?)?;
    }

    #[derive(Serialize)]
    struct Summary {
        circuit: String,
        topology: TopologyKind,
        num_cores: usize,
        links: usize,
        delta: f64,
        num_slices: usize,
        transfers: usize,
        total_tlp: u64,
        sequential_tlp: u64,
        computation_ns: f64,
        makespan_ns: f64,
        coherence: f64,
        operational: f64,
        overall: f64,
    }
    let summary = Summary {
        circuit: name,
        topology: g.kind(),
        num_cores: g.num_cores(),
        links: g.parallel_links(),
        delta,
        num_slices: sc.num_slices(),
        transfers: res.transfers.len(),
        total_tlp: sr.total_tlp,
        sequential_tlp: sr.sequential_tlp,
        computation_ns: sr.computation_ns,
        makespan_ns: sr.makespan_ns,
        coherence: fr.coherence,
        operational: fr.operational,
        overall: fr.overall,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_bottleneck(
    widths: String,
    freqs_mhz: String,
    deltas: String,
    output: Option<PathBuf>,
) -> Result<()> {
    let widths: Vec<u32> = parse_usize_list(&widths)?.into_iter().map(|w| w as u32).collect();
    let freqs = parse_f64_list(&freqs_mhz)?;
    let deltas = parse_f64_list(&deltas)?;
    let rows = fig5_rows(&widths, &freqs, &deltas, &TimingParams::default());
    emit(&rows_to_csv(FIG5_HEADER, &rows)?, output.as_deref())
}

fn cmd_run(config: PathBuf, output_dir: Option<PathBuf>) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir.to_string_lossy().into_owned();
    }
    let out = run_experiment(&cfg)?;
    let dir = PathBuf::from(&cfg.output_dir);
    write_dataset(&cfg, &out, &dir)?;
    for cell in &out.infeasible {
        eprintln!("skipped {} x {} links: {}", cell.topology.as_str(), cell.links, cell.reason);
    }
    println!(
        "{} rows over {} cells ({} infeasible) -> {}",
        out.records.len(),
        cfg.topologies.len() * cfg.links.len(),
        out.infeasible.len(),
        dir.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Gen { kind, size, depth, seed, output } => cmd_gen(kind, size, depth, seed, output),
        Cmd::Map { circuit, layout, seed, output } => cmd_map(circuit, layout, seed, output),
        Cmd::Schedule { circuit, layout, seed, delta, link_width, clock_freq_mhz, events } => {
            cmd_schedule(circuit, layout, seed, delta, link_width, clock_freq_mhz, events)
        }
        Cmd::Bottleneck { widths, freqs_mhz, deltas, output } => {
            cmd_bottleneck(widths, freqs_mhz, deltas, output)
        }
        Cmd::Run { config, output_dir } => cmd_run(config, output_dir),
    }
}
