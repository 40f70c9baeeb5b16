//! Experiment registry, configuration and orchestration for the
//! isospectrality certification pipeline: builds the map families, verifies
//! the structural hypotheses (intertwining conditions, tau, genericity),
//! assembles the pencils or block operators, compares spectra, gathers
//! nonisometry evidence and persists the certificates.

pub mod config;
pub mod registry;
pub mod runner;

pub use config::{ExperimentConfig, Tolerances};
pub use registry::{describe, experiment_names, parse_name, Construction};
pub use runner::{run, RunReport};
