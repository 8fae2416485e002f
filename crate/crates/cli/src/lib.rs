//! Experiment driver, file formats, and dataset emission around
//! `teleq-core`.

pub mod circuit_io;
pub mod config;
pub mod dataset;
pub mod experiment;
