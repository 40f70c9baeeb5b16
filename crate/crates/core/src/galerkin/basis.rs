//! Polynomial trial spaces.
//!
//! * Sphere: normal-form monomials x^a, |a| <= d, with the last exponent
//!   <= 1 (the quotient-ring basis under x_N^2 -> 1 - sum x_i^2); its span
//!   equals the restriction of every polynomial of degree <= d, hence is
//!   invariant under orthogonal pullback -- the property the whole
//!   certification rests on.
//! * Ball, Neumann: all monomials |a| <= d (natural boundary condition of
//!   the free Rayleigh quotient).
//! * Ball, Dirichlet: (1 - |x|^2) x^a with |a| <= d-2, staying inside the
//!   Dirichlet form domain and invariant under orthogonal maps.

use serde::{Deserialize, Serialize};

use super::moments::simplex;
use crate::geometry::{AmbientSpace, Manifold};
use crate::poly::{radius_sq, MultiIndex, Poly};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    SphereClosed,
    BallNeumann,
    BallDirichlet,
}

#[derive(Debug, Clone)]
pub struct PolyBasis {
    pub ambient: AmbientSpace,
    pub degree: usize,
    pub bc: BoundaryCondition,
    pub indices: Vec<MultiIndex>,
    pub funcs: Vec<Poly>,
}

impl PolyBasis {
    pub fn new(ambient: AmbientSpace, degree: usize, bc: BoundaryCondition) -> Result<Self> {
        let n = ambient.dim();
        match (bc, ambient.manifold) {
            (BoundaryCondition::SphereClosed, Manifold::Sphere) => {}
            (BoundaryCondition::BallNeumann | BoundaryCondition::BallDirichlet, Manifold::Ball) => {}
            _ => {
                return Err(Error::BasisMismatch(
                    "boundary condition incompatible with manifold".into(),
                ))
            }
        }
        let (indices, funcs): (Vec<MultiIndex>, Vec<Poly>) = match bc {
            BoundaryCondition::SphereClosed => {
                let idxs: Vec<MultiIndex> = simplex(n, degree)
                    .into_iter()
                    .filter(|idx| idx[n - 1] <= 1)
                    .collect();
                let funcs = idxs
                    .iter()
                    .map(|idx| {
                        let mut p = Poly::zero(n);
                        p.add_term(*idx, 1.0);
                        p
                    })
                    .collect();
                (idxs, funcs)
            }
            BoundaryCondition::BallNeumann => {
                let idxs = simplex(n, degree);
                let funcs = idxs
                    .iter()
                    .map(|idx| {
                        let mut p = Poly::zero(n);
                        p.add_term(*idx, 1.0);
                        p
                    })
                    .collect();
                (idxs, funcs)
            }
            BoundaryCondition::BallDirichlet => {
                if degree < 2 {
                    return Err(Error::BasisMismatch(
                        "Dirichlet basis needs degree >= 2".into(),
                    ));
                }
                let idxs = simplex(n, degree - 2);
                let bubble = Poly::constant(n, 1.0).sub(&radius_sq(n, 0..n));
                let funcs = idxs
                    .iter()
                    .map(|idx| {
                        let mut p = Poly::zero(n);
                        p.add_term(*idx, 1.0);
                        p.mul(&bubble)
                    })
                    .collect();
                (idxs, funcs)
            }
        };
        Ok(PolyBasis { ambient, degree, bc, indices, funcs })
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    /// Ambient gradients; for the sphere the tangential projection
    /// grad f - x (x . grad f) is applied symbolically.
    pub fn gradients(&self) -> Vec<Vec<Poly>> {
        let n = self.ambient.dim();
        self.funcs
            .iter()
            .map(|f| {
                let grad: Vec<Poly> = (0..n).map(|v| f.derivative(v)).collect();
                match self.bc {
                    BoundaryCondition::SphereClosed => {
                        // x . grad f
                        let mut radial = Poly::zero(n);
                        for (v, g) in grad.iter().enumerate() {
                            radial = radial.add(&g.mul(&Poly::var(n, v)));
                        }
                        (0..n)
                            .map(|v| grad[v].sub(&Poly::var(n, v).mul(&radial)))
                            .collect()
                    }
                    _ => grad,
                }
            })
            .collect()
    }
}
