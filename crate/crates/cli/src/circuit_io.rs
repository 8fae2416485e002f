//! Circuit files and generator dispatch for the command line.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use teleq_core::circuit::{
    gen_cuccaro, gen_ghz, gen_qft, gen_qvol, parse_circuit, render_native, CircuitFormat,
};
use teleq_core::Circuit;

use crate::config::CircuitSpec;

/// `.qasm` files use the qasm subset, everything else the native format.
pub fn format_for(path: &Path) -> CircuitFormat {
    if path.extension().is_some_and(|e| e == "qasm") {
        CircuitFormat::QasmSubset
    } else {
        CircuitFormat::Native
    }
}

pub fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading circuit {}", path.display()))?;
    let c = parse_circuit(&text, format_for(path))
        .map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(c)
}

pub fn save_native(c: &Circuit, path: &Path) -> Result<()> {
    std::fs::write(path, render_native(c))
        .with_context(|| format!("writing circuit {}", path.display()))
}

/// Builds the circuit a config names. Sizes are qubit counts: `cuccaro`
/// maps `size` to an adder of `(size - 2) / 2` bits, `qvol` defaults its
/// depth to `size`. Only `qvol` consumes the seed.
pub fn build_circuit(spec: &CircuitSpec, seed: u64) -> Result<Circuit> {
    let c = match spec {
        CircuitSpec::File { path } => return load_circuit(Path::new(path)),
        CircuitSpec::Generated { kind, size, depth } => match kind.as_str() {
            "ghz" => gen_ghz(*size),
            "qft" => gen_qft(*size),
            "cuccaro" => {
                if *size < 4 || size % 2 != 0 {
                    bail!("cuccaro needs an even size of at least 4, got {size}");
                }
                gen_cuccaro((size - 2) / 2)
            }
            "qvol" => gen_qvol(*size, depth.unwrap_or(*size), seed),
            other => bail!("unknown circuit kind '{other}'"),
        },
    };
    c.map_err(|e| anyhow!("building circuit: {e}"))
}

/// Label a circuit spec contributes to result rows: the generator name
/// with its size, or the file stem.
pub fn circuit_label(spec: &CircuitSpec) -> String {
    match spec {
        CircuitSpec::Generated { kind, size, .. } => format!("{kind}-{size}"),
        CircuitSpec::File { path } => Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.clone()),
    }
}
