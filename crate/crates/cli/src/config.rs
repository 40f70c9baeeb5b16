//! Versioned experiment configuration. CLI flags override file values;
//! every randomized subroutine takes its seed from here.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::registry::Construction;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max relative gap for exact-moment pencil comparisons.
    pub pencil_gap: f64,
    /// Max residual for the intertwining-condition checks.
    pub star: f64,
    /// Max residual for the tau compatibility check.
    pub tau: f64,
    /// Max relative gap for per-representation block spectra.
    pub block_gap: f64,
    /// Gap ceiling for quadrature-mode (approximate) comparisons.
    pub quadrature_gap: f64,
    /// Residual floor for nonisometry (inequivalence) evidence.
    pub nonisometry_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pencil_gap: 1e-8,
            star: 1e-10,
            tau: 1e-12,
            block_gap: 1e-9,
            quadrature_gap: 1e-2,
            nonisometry_floor: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub name: String,
    #[serde(skip)]
    pub construction: Option<Construction>,
    pub degree: usize,
    pub seed: u64,
    /// Quadrature sample budget (rounded to a power-of-two block multiple).
    pub samples: usize,
    pub out_dir: Option<PathBuf>,
    /// Perturbation of the second family's mixed entry (negative control).
    pub perturb: Option<f64>,
    /// Restart budget for the equivalence / equation searches.
    pub search_restarts: usize,
    pub hbar: Vec<f64>,
    /// Radial profile coefficients (psi(s) = sum psi[k] s^k); empty selects
    /// the construction default.
    pub psi: Vec<f64>,
    pub tolerances: Tolerances,
    /// Family source: "paper-4.6" or a JSON file path (cross/Hopf
    /// constructions only).
    pub family: Option<String>,
}

impl ExperimentConfig {
    pub fn for_name(name: &str) -> Option<Self> {
        let construction = crate::registry::parse_name(name)?;
        let degree = construction.default_degree();
        Some(ExperimentConfig {
            schema: SCHEMA_VERSION,
            name: name.to_string(),
            construction: Some(construction),
            degree,
            seed: 7,
            samples: 1 << 20,
            out_dir: None,
            perturb: None,
            search_restarts: 60,
            hbar: vec![1.0, 0.5, 0.25],
            psi: vec![],
            tolerances: Tolerances::default(),
            family: None,
        })
    }

    pub fn construction(&self) -> Construction {
        self.construction
            .or_else(|| crate::registry::parse_name(&self.name))
            .expect("valid construction name")
    }
}
