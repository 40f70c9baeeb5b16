//! Rayleigh-Ritz certification: polynomial trial spaces on spheres and
//! balls, exact monomial moments, mass/stiffness/potential assembly, pencil
//! spectra and isospectrality comparison.
//!
//! For every construction in this crate the intertwining maps are linear and
//! orthogonal and the torus-Fourier projections preserve polynomial degree,
//! so the trial space is mapped to itself and the two pencils of an
//! isospectral pair are congruent: their generalized spectra agree to
//! roundoff, which is what the acceptance comparisons certify.

mod assemble;
mod basis;
mod moments;

pub use assemble::{
    assemble, compare_spectra, AssemblyMode, GalerkinPencil, PencilMeta, SpectrumComparison,
    DEFAULT_DEFLATION_TOL,
};
pub use basis::{BoundaryCondition, PolyBasis};
pub use moments::{
    ball_moment, ball_moment_exact, integral_gap, integrals_equal, integrate_exact,
    rational_to_f64, simplex, sphere_moment, sphere_moment_exact,
};

use crate::geometry::{AmbientSpace, Manifold, PotentialField};
use crate::poly::Poly;

/// Exact heat-invariant comparison for a pair of slot potentials: the
/// average and the L^2 norm of phi_1 and phi_2 = (slot-swapped phi_1) agree
/// exactly under the moment measure, for both the sphere and ball measures.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct HeatInvariantReport {
    pub average_equal_sphere: bool,
    pub l2_equal_sphere: bool,
    pub average_equal_ball: bool,
    pub l2_equal_ball: bool,
    pub max_gap: f64,
}

impl HeatInvariantReport {
    pub fn pass(&self) -> bool {
        self.average_equal_sphere
            && self.l2_equal_sphere
            && self.average_equal_ball
            && self.l2_equal_ball
    }
}

pub fn heat_invariants(pot: &PotentialField, ambient: &AmbientSpace) -> HeatInvariantReport {
    let n = ambient.dim();
    let phi1 = pot.to_poly(ambient);
    let phi2 = pot.swapped_slot().to_poly(ambient);
    let compare = |p1: &Poly, p2: &Poly, ball: bool| -> (bool, f64) {
        let a = integrate_exact(p1, n, ball);
        let b = integrate_exact(p2, n, ball);
        (integrals_equal(&a, &b), integral_gap(&a, &b))
    };
    let (avg_s, g1) = compare(&phi1, &phi2, false);
    let (l2_s, g2) = compare(&phi1.mul(&phi1), &phi2.mul(&phi2), false);
    let (avg_b, g3) = compare(&phi1, &phi2, true);
    let (l2_b, g4) = compare(&phi1.mul(&phi1), &phi2.mul(&phi2), true);
    HeatInvariantReport {
        average_equal_sphere: avg_s,
        l2_equal_sphere: l2_s,
        average_equal_ball: avg_b,
        l2_equal_ball: l2_b,
        max_gap: g1.max(g2).max(g3).max(g4),
    }
}

/// Round-sphere Laplace eigenvalue l (l + N - 2) with multiplicities, for
/// the exactness checks of the zero form.
pub fn round_sphere_spectrum(n: usize, max_l: usize) -> Vec<f64> {
    let choose = |n: usize, k: usize| -> f64 {
        let mut v = 1.0;
        for i in 0..k {
            v = v * (n - i) as f64 / (i + 1) as f64;
        }
        v
    };
    let mut out = Vec::new();
    for l in 0..=max_l {
        let dim = match l {
            0 => 1.0,
            1 => n as f64,
            _ => choose(n + l - 1, l) - choose(n + l - 3, l - 2),
        };
        for _ in 0..dim as usize {
            out.push((l * (l + n - 2)) as f64);
        }
    }
    out
}

/// Verifies that the manifold tag of an ambient space admits exact conformal
/// assembly (even manifold dimension).
pub fn conformal_exact_supported(ambient: &AmbientSpace) -> bool {
    let mdim = match ambient.manifold {
        Manifold::Sphere => ambient.dim() - 1,
        Manifold::Ball => ambient.dim(),
    };
    mdim % 2 == 0
}

#[cfg(test)]
mod tests;
