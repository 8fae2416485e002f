//! Core models for multi-core quantum architectures whose cores exchange
//! qubits through EPR-based teleportation over a core-to-core interconnect.
//!
//! The crate is `no_std` (with `alloc`) and carries no IO. It covers the
//! pipeline from circuit construction to a fidelity estimate:
//!
//! 1. [`circuit`]: gate/circuit types, benchmark generators, and greedy
//!    slicing into timeslices of non-overlapping gates.
//! 2. [`topology`]: core interconnect graphs, deterministic routing, and
//!    capacity/sizing queries.
//! 3. [`mapper`]: assignment-based placement of virtual qubits onto cores,
//!    slice by slice, and the inter-core transfers implied by consecutive
//!    placements.
//! 4. [`netsim`]: classical-latency and teleportation timing models plus a
//!    round-based schedule of transfers over parallel links.
//! 5. [`fidelity`]: decoherence and operational-error estimates for a
//!    scheduled run.
//! 6. [`bottleneck`]: search for the system size at which the classical
//!    network starts dominating a teleportation.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bottleneck;
pub mod circuit;
pub mod fidelity;
pub mod mapper;
pub mod netsim;
pub mod topology;

pub use circuit::{Circuit, Gate, GateKind, GateLabel, SlicedCircuit};
pub use fidelity::{FidelityReport, NoiseParams, OperationCounts};
pub use mapper::{MapOptions, MappingResult, Placement, Transfer};
pub use netsim::{ScheduleResult, TimingParams};
pub use topology::{CoreGraph, TopologyKind};
