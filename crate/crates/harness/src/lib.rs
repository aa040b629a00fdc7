//! Benchmark harness for the Grassmann-manifold differential evolution
//! optimizer: experiment definitions, report emission, and the `grassde`
//! command-line interface.

pub mod cli;
pub mod experiments;
pub mod report;
