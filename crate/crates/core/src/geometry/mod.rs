//! Ambient spaces with torus actions, admissible z-valued 1-forms (all four
//! variants), the metrics g_lambda they induce, radial potentials, the Hopf
//! map, curvature 2-forms, and the intertwining-condition verifier.
//!
//! An admissible form is T-invariant and horizontal; it deforms the round
//! metric through the unipotent field I + Lambda_p, where Lambda_p maps a
//! tangent vector X to the action field of lambda_p(X). Both the component
//! functionals w_k (lambda = sum_k <w_k, .> Z_k) and the action fields V_k
//! are polynomial in the ambient point for every variant, which is what
//! makes exact-moment Galerkin assembly possible downstream.

use serde::{Deserialize, Serialize};

use crate::jmaps::{symmetric_conjugator, CMapFamily};
use crate::liealg::{
    so3_lift, su2_as_so4, SkewSymmetric, SymTraceless3, UnitQuaternion,
};
use crate::numkit::{dot, Mat};
use crate::poly::{index_of, radius_sq, Poly};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Manifold {
    Sphere,
    Ball,
}

/// Ambient model: R^m + R^m + C^r with the torus rotating the complex
/// coordinates, C^m + C^m with the two-circle diagonal action, or a plain
/// Euclidean space without torus data (zero form only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmbientVariant {
    RmRmCr { m: usize, r: usize },
    CmCm { m: usize },
    Plain { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpace {
    pub variant: AmbientVariant,
    pub manifold: Manifold,
}

impl AmbientSpace {
    pub fn dim(&self) -> usize {
        match self.variant {
            AmbientVariant::RmRmCr { m, r } => 2 * m + 2 * r,
            AmbientVariant::CmCm { m } => 4 * m,
            AmbientVariant::Plain { n } => n,
        }
    }

    pub fn torus_rank(&self) -> usize {
        match self.variant {
            AmbientVariant::RmRmCr { r, .. } => r,
            AmbientVariant::CmCm { .. } => 2,
            AmbientVariant::Plain { .. } => 0,
        }
    }

    /// Coordinate ranges of the two "slot" factors carrying the forms and
    /// potentials.
    pub fn slots(&self) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        match self.variant {
            AmbientVariant::RmRmCr { m, .. } => (0..m, m..2 * m),
            AmbientVariant::CmCm { m } => (0..2 * m, 2 * m..4 * m),
            AmbientVariant::Plain { n } => (0..n, 0..0),
        }
    }

    /// The rotation matrix of the torus element with the given angles.
    pub fn torus_action(&self, angles: &[f64]) -> Mat {
        let n = self.dim();
        let mut g = Mat::identity(n);
        match self.variant {
            AmbientVariant::RmRmCr { m, r } => {
                assert_eq!(angles.len(), r);
                for (k, &t) in angles.iter().enumerate() {
                    let base = 2 * m + 2 * k;
                    g[(base, base)] = t.cos();
                    g[(base, base + 1)] = -t.sin();
                    g[(base + 1, base)] = t.sin();
                    g[(base + 1, base + 1)] = t.cos();
                }
            }
            AmbientVariant::CmCm { m } => {
                assert_eq!(angles.len(), 2);
                for (slot, &t) in angles.iter().enumerate() {
                    for c in 0..m {
                        let base = 2 * m * slot + 2 * c;
                        g[(base, base)] = t.cos();
                        g[(base, base + 1)] = -t.sin();
                        g[(base + 1, base)] = t.sin();
                        g[(base + 1, base + 1)] = t.cos();
                    }
                }
            }
            AmbientVariant::Plain { .. } => assert!(angles.is_empty()),
        }
        g
    }

    /// Action fields V_k(x) = d/dt exp(t Z_k) x as polynomial vectors.
    pub fn vertical_fields(&self) -> Vec<Vec<Poly>> {
        let n = self.dim();
        match self.variant {
            AmbientVariant::RmRmCr { m, r } => (0..r)
                .map(|k| {
                    let mut v = vec![Poly::zero(n); n];
                    let base = 2 * m + 2 * k;
                    v[base] = Poly::var(n, base + 1).scale(-1.0);
                    v[base + 1] = Poly::var(n, base);
                    v
                })
                .collect(),
            AmbientVariant::CmCm { m } => (0..2)
                .map(|slot| {
                    let mut v = vec![Poly::zero(n); n];
                    for c in 0..m {
                        let base = 2 * m * slot + 2 * c;
                        v[base] = Poly::var(n, base + 1).scale(-1.0);
                        v[base + 1] = Poly::var(n, base);
                    }
                    v
                })
                .collect(),
            AmbientVariant::Plain { .. } => vec![],
        }
    }
}

/// The fixed coordinate realization of the Hopf projection R^4 -> R^3.
pub fn hopf_map(p: &[f64]) -> [f64; 3] {
    let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
    [
        0.5 * (a * a + b * b - c * c - d * d),
        a * c + b * d,
        a * d - b * c,
    ]
}

/// Exact differential of the Hopf map at p, as a 3x4 matrix.
pub fn hopf_differential(p: &[f64]) -> Mat {
    let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
    Mat::from_rows(&[
        vec![a, b, -c, -d],
        vec![c, d, a, b],
        vec![d, -c, -b, a],
    ])
}

/// Hopf components as polynomials in four slot coordinates embedded at
/// `offset` inside an n-variable ring.
fn hopf_polys(n: usize, offset: usize) -> [Poly; 3] {
    let x = |i: usize| Poly::var(n, offset + i);
    let sq = |i: usize| x(i).mul(&x(i));
    let p1 = sq(0).add(&sq(1)).sub(&sq(2)).sub(&sq(3)).scale(0.5);
    let p2 = x(0).mul(&x(2)).add(&x(1).mul(&x(3)));
    let p3 = x(0).mul(&x(3)).sub(&x(1).mul(&x(2)));
    [p1, p2, p3]
}

/// The four form variants. `SoPair` is the so(m)-driven form on
/// R^m + R^m + C^r, `CrossPair` the Sym_0(R^3) cross-product form on
/// R^3 + R^3 + C^2, `HopfPair` its lift to C^2 + C^2, and `Zero` the round
/// baseline.
#[derive(Debug, Clone)]
pub enum FormKind {
    Zero,
    SoPair { first: Vec<SkewSymmetric>, second: Vec<SkewSymmetric> },
    CrossPair { first: [SymTraceless3; 2], second: [SymTraceless3; 2] },
    HopfPair {
        first: [SymTraceless3; 2],
        second: [SymTraceless3; 2],
        /// SU(2) lifts of the half-turn witnesses, needed by tau.
        lift_first: UnitQuaternion,
        lift_second: UnitQuaternion,
    },
}

/// Scale factor of the small-support modification: a polynomial in the
/// squared slot radii (and squared |u| for the R^m variant), symmetric in
/// the two slot radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialScale {
    /// (i, j, k, coeff) for |p|^2i |q|^2j |u|^2k.
    pub terms: Vec<(usize, usize, usize, f64)>,
}

impl RadialScale {
    pub fn one() -> Self {
        RadialScale { terms: vec![(0, 0, 0, 1.0)] }
    }

    pub fn symmetric(&self) -> bool {
        self.terms.iter().all(|&(i, j, k, c)| {
            self.terms
                .iter()
                .any(|&(i2, j2, k2, c2)| i2 == j && j2 == i && k2 == k && c2 == c)
        })
    }

    pub fn to_poly(&self, ambient: &AmbientSpace) -> Poly {
        let n = ambient.dim();
        let (s1, s2) = ambient.slots();
        let r1 = radius_sq(n, s1);
        let r2 = radius_sq(n, s2);
        let ru = match ambient.variant {
            AmbientVariant::RmRmCr { m, r } => radius_sq(n, 2 * m..2 * m + 2 * r),
            _ => Poly::zero(n),
        };
        let mut out = Poly::zero(n);
        for &(i, j, k, c) in &self.terms {
            let term = r1.pow(i).mul(&r2.pow(j)).mul(&ru.pow(k)).scale(c);
            out = out.add(&term);
        }
        out
    }
}

/// Admissible z-valued 1-form on the ambient space, with the component
/// functionals and action fields lowered to polynomials at construction.
#[derive(Debug, Clone)]
pub struct AdmissibleForm {
    pub ambient: AmbientSpace,
    pub kind: FormKind,
    /// Scale polynomial (Remark-4.11-type factor); `None` means 1.
    pub scale: Option<RadialScale>,
    /// Component functionals of the *unscaled* form: lambda_k(X) = <w_k, X>.
    w: Vec<Vec<Poly>>,
    /// Action fields of the torus basis.
    v: Vec<Vec<Poly>>,
    scale_poly: Option<Poly>,
}

impl AdmissibleForm {
    pub fn zero(ambient: AmbientSpace) -> Self {
        let v = ambient.vertical_fields();
        let r = ambient.torus_rank();
        let n = ambient.dim();
        AdmissibleForm {
            ambient,
            kind: FormKind::Zero,
            scale: None,
            w: vec![vec![Poly::zero(n); n]; r],
            v,
            scale_poly: None,
        }
    }

    /// Form of the R^m + R^m + C^r construction driven by so(m) maps:
    /// w_k = (j(Z_k) p, j'(Z_k) q, 0).
    pub fn so_pair(
        manifold: Manifold,
        first: Vec<SkewSymmetric>,
        second: Vec<SkewSymmetric>,
    ) -> Result<Self> {
        let m = first[0].m();
        let r = first.len();
        if second.len() != r || second[0].m() != m {
            return Err(Error::DimMismatch {
                op: "so_pair",
                detail: "mismatched image lists".into(),
            });
        }
        let ambient = AmbientSpace { variant: AmbientVariant::RmRmCr { m, r }, manifold };
        let n = ambient.dim();
        let mut w = Vec::with_capacity(r);
        for k in 0..r {
            let mut wk = vec![Poly::zero(n); n];
            for row in 0..m {
                let mut p1 = Poly::zero(n);
                let mut p2 = Poly::zero(n);
                for col in 0..m {
                    let a = first[k].get(row, col);
                    if a != 0.0 {
                        p1.add_term(index_of(&[(col, 1)]), a);
                    }
                    let b = second[k].get(row, col);
                    if b != 0.0 {
                        p2.add_term(index_of(&[(m + col, 1)]), b);
                    }
                }
                wk[row] = p1;
                wk[m + row] = p2;
            }
            w.push(wk);
        }
        let v = ambient.vertical_fields();
        Ok(AdmissibleForm {
            ambient,
            kind: FormKind::SoPair { first, second },
            scale: None,
            w,
            v,
            scale_poly: None,
        })
    }

    /// Form of the S^9 / B^10 construction: w_k = (c(Z_k) p x p, c'(Z_k) q x q, 0).
    pub fn cross_pair(
        manifold: Manifold,
        first: [SymTraceless3; 2],
        second: [SymTraceless3; 2],
    ) -> Self {
        let ambient = AmbientSpace { variant: AmbientVariant::RmRmCr { m: 3, r: 2 }, manifold };
        let n = ambient.dim();
        let mut w = Vec::with_capacity(2);
        for k in 0..2 {
            let mut wk = vec![Poly::zero(n); n];
            let (wp, wq) = (cross_w_poly(n, 0, &first[k]), cross_w_poly(n, 3, &second[k]));
            for i in 0..3 {
                wk[i] = wp[i].clone();
                wk[3 + i] = wq[i].clone();
            }
            w.push(wk);
        }
        let v = ambient.vertical_fields();
        AdmissibleForm {
            ambient,
            kind: FormKind::CrossPair { first, second },
            scale: None,
            w,
            v,
            scale_poly: None,
        }
    }

    /// Hopf lift of the cross-product form to C^2 + C^2. The SU(2) lifts of
    /// the half-turn witnesses are stored for the T-preserving isometry tau.
    pub fn hopf_pair(
        manifold: Manifold,
        first: [SymTraceless3; 2],
        second: [SymTraceless3; 2],
        witness_first: &Mat,
        witness_second: &Mat,
    ) -> Result<Self> {
        let ambient = AmbientSpace { variant: AmbientVariant::CmCm { m: 2 }, manifold };
        let n = ambient.dim();
        let lift_first = so3_lift(witness_first)?;
        let lift_second = so3_lift(witness_second)?;
        let mut w = Vec::with_capacity(2);
        for k in 0..2 {
            let mut wk = vec![Poly::zero(n); n];
            let wp = hopf_w_poly(n, 0, &first[k]);
            let wq = hopf_w_poly(n, 4, &second[k]);
            for i in 0..4 {
                wk[i] = wp[i].clone();
                wk[4 + i] = wq[i].clone();
            }
            w.push(wk);
        }
        let v = ambient.vertical_fields();
        Ok(AdmissibleForm {
            ambient,
            kind: FormKind::HopfPair { first, second, lift_first, lift_second },
            scale: None,
            w,
            v,
            scale_poly: None,
        })
    }

    pub fn torus_rank(&self) -> usize {
        self.ambient.torus_rank()
    }

    /// Component functionals including the scale factor.
    pub fn w_polys(&self) -> Vec<Vec<Poly>> {
        match &self.scale_poly {
            None => self.w.clone(),
            Some(f) => self
                .w
                .iter()
                .map(|wk| wk.iter().map(|c| c.mul(f)).collect())
                .collect(),
        }
    }

    /// Unscaled component functionals plus the scale polynomial, for
    /// consumers that fold the scale into their own measure.
    pub fn w_polys_unscaled(&self) -> &[Vec<Poly>] {
        &self.w
    }

    pub fn scale_poly(&self) -> Option<&Poly> {
        self.scale_poly.as_ref()
    }

    pub fn vertical_polys(&self) -> &[Vec<Poly>] {
        &self.v
    }

    /// lambda_p(X) as a z-vector; X need not be tangent (the form is defined
    /// ambiently and restriction is by evaluation).
    pub fn eval(&self, p: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let n = self.ambient.dim();
        if p.len() != n || x.len() != n {
            return Err(Error::DimMismatch {
                op: "eval_form",
                detail: format!("point/vector dim {} / {}, ambient {}", p.len(), x.len(), n),
            });
        }
        let s = self.scale_poly.as_ref().map(|f| f.eval(p)).unwrap_or(1.0);
        Ok(self
            .w
            .iter()
            .map(|wk| s * wk.iter().zip(x).map(|(c, xi)| c.eval(p) * xi).sum::<f64>())
            .collect())
    }

    /// Lambda_p = sum_k V_k(p) w_k(p)^T, the map X -> lambda_p(X)^*.
    pub fn lambda_matrix(&self, p: &[f64]) -> Mat {
        let n = self.ambient.dim();
        let mut out = Mat::zeros(n, n);
        let s = self.scale_poly.as_ref().map(|f| f.eval(p)).unwrap_or(1.0);
        for (wk, vk) in self.w.iter().zip(&self.v) {
            let wv: Vec<f64> = wk.iter().map(|c| s * c.eval(p)).collect();
            let vv: Vec<f64> = vk.iter().map(|c| c.eval(p)).collect();
            for i in 0..n {
                if vv[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vv[i] * wv[j];
                }
            }
        }
        out
    }

    /// The curvature 2-form d(lambda-bar) evaluated ambiently: exact
    /// variant-specific formulas, with the product rule for scaled forms.
    pub fn curvature(&self, p: &[f64], x: &[f64], y: &[f64]) -> Vec<f64> {
        let base = self.curvature_unscaled(p, x, y);
        match &self.scale_poly {
            None => base,
            Some(f) => {
                let fv = f.eval(p);
                let grad: Vec<f64> = (0..self.ambient.dim()).map(|v| f.derivative(v).eval(p)).collect();
                let dfx = dot(&grad, x);
                let dfy = dot(&grad, y);
                let lam_y: Vec<f64> = self
                    .w
                    .iter()
                    .map(|wk| wk.iter().zip(y).map(|(c, yi)| c.eval(p) * yi).sum())
                    .collect();
                let lam_x: Vec<f64> = self
                    .w
                    .iter()
                    .map(|wk| wk.iter().zip(x).map(|(c, xi)| c.eval(p) * xi).sum())
                    .collect();
                base.iter()
                    .zip(lam_y.iter().zip(&lam_x))
                    .map(|(b, (ly, lx))| fv * b + dfx * ly - dfy * lx)
                    .collect()
            }
        }
    }

    fn curvature_unscaled(&self, p: &[f64], x: &[f64], y: &[f64]) -> Vec<f64> {
        match &self.kind {
            FormKind::Zero => vec![0.0; self.torus_rank()],
            FormKind::SoPair { first, second } => {
                let m = first[0].m();
                (0..first.len())
                    .map(|k| {
                        let mut s = 0.0;
                        // 2 <j(Z_k) X_p, Y_p> + 2 <j'(Z_k) X_q, Y_q>
                        for i in 0..m {
                            for jj in 0..m {
                                s += 2.0 * first[k].get(i, jj) * x[jj] * y[i];
                                s += 2.0 * second[k].get(i, jj) * x[m + jj] * y[m + i];
                            }
                        }
                        s
                    })
                    .collect()
            }
            FormKind::CrossPair { first, second } => (0..2)
                .map(|k| {
                    cross_curvature(&first[k], &p[0..3], &x[0..3], &y[0..3])
                        + cross_curvature(&second[k], &p[3..6], &x[3..6], &y[3..6])
                })
                .collect(),
            FormKind::HopfPair { first, second, .. } => (0..2)
                .map(|k| {
                    hopf_curvature(&first[k], &p[0..4], &x[0..4], &y[0..4])
                        + hopf_curvature(&second[k], &p[4..8], &x[4..8], &y[4..8])
                })
                .collect(),
        }
    }

    /// Numerical exterior derivative via central differences of eval, for
    /// cross-checking the closed forms.
    pub fn curvature_fd(&self, p: &[f64], x: &[f64], y: &[f64], h: f64) -> Vec<f64> {
        let shift = |dir: &[f64], s: f64| -> Vec<f64> {
            p.iter().zip(dir).map(|(a, d)| a + s * d).collect()
        };
        let lpx = self.eval(&shift(x, h), y).unwrap();
        let lmx = self.eval(&shift(x, -h), y).unwrap();
        let lpy = self.eval(&shift(y, h), x).unwrap();
        let lmy = self.eval(&shift(y, -h), x).unwrap();
        (0..self.torus_rank())
            .map(|k| (lpx[k] - lmx[k]) / (2.0 * h) - (lpy[k] - lmy[k]) / (2.0 * h))
            .collect()
    }
}

/// 3 <(c p) x X, Y>, the closed form of the cross-product variant.
fn cross_curvature(c: &SymTraceless3, p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let cp = apply_sym3(c, p);
    3.0 * dot(&crate::liealg::cross(&cp, &[x[0], x[1], x[2]]), &y[0..3])
}

fn apply_sym3(c: &SymTraceless3, v: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i] += c.get(i, j) * v[j];
        }
    }
    out
}

/// Exact curvature of the Hopf-lifted form: the quadratic Hopf map has a
/// constant Hessian, so the antisymmetrized derivative reduces to
/// first-order terms in the differential.
fn hopf_curvature(c: &SymTraceless3, p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let pp = hopf_map(p);
    let dp = hopf_differential(p);
    let px = dp.matvec(x);
    let py = dp.matvec(y);
    let cpx = apply_sym3(c, &px);
    let cpy = apply_sym3(c, &py);
    let cp = apply_sym3(c, &pp);
    // d nu(X, Y) = <c(P_* X) x P + c P x (P_* X), P_* Y> - (X <-> Y)
    let t1 = dot(&crate::liealg::cross(&cpx, &pp), &py)
        + dot(&crate::liealg::cross(&cp, &[px[0], px[1], px[2]]), &py);
    let t2 = dot(&crate::liealg::cross(&cpy, &pp), &px)
        + dot(&crate::liealg::cross(&cp, &[py[0], py[1], py[2]]), &px);
    t1 - t2
}

/// w polynomial of the cross-product form on one slot: w = c v x v with v
/// the slot coordinates.
fn cross_w_poly(n: usize, offset: usize, c: &SymTraceless3) -> [Poly; 3] {
    let v = |i: usize| Poly::var(n, offset + i);
    // (c v)_i
    let cv: Vec<Poly> = (0..3)
        .map(|i| {
            let mut p = Poly::zero(n);
            for j in 0..3 {
                let coef = c.get(i, j);
                if coef != 0.0 {
                    p.add_term(index_of(&[(offset + j, 1)]), coef);
                }
            }
            p
        })
        .collect();
    // cross product (c v) x v
    [
        cv[1].mul(&v(2)).sub(&cv[2].mul(&v(1))),
        cv[2].mul(&v(0)).sub(&cv[0].mul(&v(2))),
        cv[0].mul(&v(1)).sub(&cv[1].mul(&v(0))),
    ]
}

/// w polynomial of the Hopf-lifted form on one slot:
/// w = P_*^T ( c P x P ), degree 5.
fn hopf_w_poly(n: usize, offset: usize, c: &SymTraceless3) -> [Poly; 4] {
    let hp = hopf_polys(n, offset);
    let cp: Vec<Poly> = (0..3)
        .map(|i| {
            let mut p = Poly::zero(n);
            for j in 0..3 {
                let coef = c.get(i, j);
                if coef != 0.0 {
                    p = p.add(&hp[j].scale(coef));
                }
            }
            p
        })
        .collect();
    let cross = [
        cp[1].mul(&hp[2]).sub(&cp[2].mul(&hp[1])),
        cp[2].mul(&hp[0]).sub(&cp[0].mul(&hp[2])),
        cp[0].mul(&hp[1]).sub(&cp[1].mul(&hp[0])),
    ];
    // Jacobian transpose: w_c = sum_row dP_row/dx_c * cross_row.
    let mut out = [Poly::zero(n), Poly::zero(n), Poly::zero(n), Poly::zero(n)];
    for (row, crossr) in cross.iter().enumerate() {
        for c_idx in 0..4 {
            let d = hp[row].derivative(offset + c_idx);
            if !d.is_zero() {
                out[c_idx] = out[c_idx].add(&d.mul(crossr));
            }
        }
    }
    out
}

/// Scales an admissible form by a radial factor symmetric in the two slot
/// radii (which is what keeps the intertwining maps and tau compatible).
pub fn scale_form(form: &AdmissibleForm, factor: RadialScale) -> Result<AdmissibleForm> {
    if !factor.symmetric() {
        return Err(Error::AsymmetricScale);
    }
    if matches!(form.ambient.variant, AmbientVariant::CmCm { .. })
        && factor.terms.iter().any(|&(_, _, k, c)| k > 0 && c != 0.0)
    {
        return Err(Error::InvalidConfig("no |u| factor on the C^m + C^m ambient".into()));
    }
    let mut out = form.clone();
    let poly = factor.to_poly(&form.ambient);
    out.scale_poly = Some(match form.scale_poly {
        None => poly,
        Some(ref existing) => existing.mul(&poly),
    });
    out.scale = Some(factor);
    Ok(out)
}

/// Pointwise metric data of g_lambda.
#[derive(Debug, Clone)]
pub struct MetricField {
    pub form: AdmissibleForm,
}

#[derive(Debug, Clone)]
pub struct MetricAt {
    pub lambda: Mat,
    pub gram: Mat,
    pub gram_inv: Mat,
}

impl MetricField {
    pub fn new(form: AdmissibleForm) -> Self {
        MetricField { form }
    }

    pub fn at(&self, p: &[f64]) -> MetricAt {
        let n = self.form.ambient.dim();
        let lambda = self.form.lambda_matrix(p);
        let ipl = Mat::identity(n).add(&lambda);
        let gram = ipl.transpose().matmul(&ipl);
        let iml = Mat::identity(n).sub(&lambda);
        let gram_inv = iml.matmul(&iml.transpose());
        MetricAt { lambda, gram, gram_inv }
    }
}

/// Radial potential profile: a polynomial in the squared radius of one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialField {
    /// psi(s) = sum_k coeffs[k] s^k with s = |p_slot|^2.
    pub coeffs: Vec<f64>,
    /// Which slot factor the potential reads (1 or 2).
    pub slot: usize,
    pub profile: ProfileKind,
}

/// Validation profile: the torus-invariant constructions need the radial
/// profile to attain its max precisely at 0 on the unit ball; the Hopf-lift
/// nontriviality argument instead needs it strictly increasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    MaxAtZero,
    Increasing,
}

impl PotentialField {
    pub fn new(coeffs: Vec<f64>, slot: usize, profile: ProfileKind) -> Result<Self> {
        if slot != 1 && slot != 2 {
            return Err(Error::InvalidConfig("potential slot must be 1 or 2".into()));
        }
        let psi = |s: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c);
        match profile {
            ProfileKind::MaxAtZero => {
                let at0 = psi(0.0);
                for i in 1..=256 {
                    let s = i as f64 / 256.0;
                    if psi(s) >= at0 {
                        return Err(Error::InvalidConfig(
                            "radial profile must attain its max precisely at 0".into(),
                        ));
                    }
                }
            }
            ProfileKind::Increasing => {
                for i in 0..256 {
                    let s = i as f64 / 256.0;
                    if psi(s + 1.0 / 256.0) <= psi(s) {
                        return Err(Error::InvalidConfig(
                            "radial profile must be strictly increasing".into(),
                        ));
                    }
                }
            }
        }
        Ok(PotentialField { coeffs, slot, profile })
    }

    /// Default profile for the R^m-type experiments: psi(s) = 2 - s.
    pub fn default_max_at_zero(slot: usize) -> Self {
        PotentialField::new(vec![2.0, -1.0], slot, ProfileKind::MaxAtZero).unwrap()
    }

    /// Default profile for the Hopf-lift experiments: psi(s) = 1 + s.
    pub fn default_increasing(slot: usize) -> Self {
        PotentialField::new(vec![1.0, 1.0], slot, ProfileKind::Increasing).unwrap()
    }

    /// Strictly positive on the closed unit ball (needed for conformal use).
    pub fn positive_on_ball(&self) -> bool {
        let psi = |s: f64| self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c);
        (0..=256).all(|i| psi(i as f64 / 256.0) > 0.0)
    }

    pub fn to_poly(&self, ambient: &AmbientSpace) -> Poly {
        let n = ambient.dim();
        let (s1, s2) = ambient.slots();
        let s = radius_sq(n, if self.slot == 1 { s1 } else { s2 });
        let mut out = Poly::zero(n);
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                out = out.add(&s.pow(k).scale(c));
            }
        }
        out
    }

    pub fn eval(&self, ambient: &AmbientSpace, p: &[f64]) -> f64 {
        let (s1, s2) = ambient.slots();
        let range = if self.slot == 1 { s1 } else { s2 };
        let s: f64 = p[range].iter().map(|x| x * x).sum();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn swapped_slot(&self) -> Self {
        PotentialField {
            coeffs: self.coeffs.clone(),
            slot: 3 - self.slot,
            profile: self.profile,
        }
    }
}

/// Report of the intertwining-condition check for one dual functional.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarConditionReport {
    pub mu: Vec<f64>,
    /// max_p,X | mu(lambda_p(X)) - mu(lambda'_{Fp}(F X)) |.
    pub residual: f64,
    pub orthogonality_defect: f64,
    pub equivariance_residual: f64,
    /// max_p | phi(F p) - phi(p) | when a potential is supplied.
    pub potential_residual: Option<f64>,
    pub samples: usize,
}

/// Verifies mu . lambda = F^*(mu . lambda') by sampling, together with the
/// structural requirements on F (orthogonal, torus-equivariant, potential
/// preserved). F is given as a linear ambient map.
pub fn check_star_condition(
    lambda: &AdmissibleForm,
    lambda_p: &AdmissibleForm,
    mu: &[f64],
    f_map: &Mat,
    potential: Option<&PotentialField>,
    samples: usize,
    seed: u64,
) -> Result<StarConditionReport> {
    let n = lambda.ambient.dim();
    let defect = f_map.orthogonality_defect();
    if defect > 1e-10 {
        return Err(Error::NotOrthogonal { defect });
    }
    // Torus equivariance: F commutes with the action matrices.
    let mut equivariance_residual: f64 = 0.0;
    let angle_sets: Vec<Vec<f64>> = match lambda.ambient.torus_rank() {
        2 => vec![vec![0.9, 0.0], vec![0.0, 1.3], vec![0.4, 2.2]],
        r => (0..r)
            .map(|k| {
                let mut a = vec![0.0; r];
                a[k] = 0.8 + 0.3 * k as f64;
                a
            })
            .collect(),
    };
    for angles in &angle_sets {
        let rho = lambda.ambient.torus_action(angles);
        let d = f_map.matmul(&rho).sub(&rho.matmul(f_map)).frobenius();
        equivariance_residual = equivariance_residual.max(d);
    }
    if equivariance_residual > 1e-10 {
        return Err(Error::NotEquivariant { residual: equivariance_residual });
    }
    let mut rng = crate::geometry::sampling::SampleRng::new(seed);
    let mut residual: f64 = 0.0;
    let mut potential_residual: Option<f64> = potential.map(|_| 0.0);
    for _ in 0..samples {
        let p = rng.point_on(&lambda.ambient);
        let x = rng.vector(n);
        let fp = f_map.matvec(&p);
        let fx = f_map.matvec(&x);
        let lv = lambda.eval(&p, &x)?;
        let lv_p = lambda_p.eval(&fp, &fx)?;
        let a: f64 = mu.iter().zip(&lv).map(|(m, l)| m * l).sum();
        let b: f64 = mu.iter().zip(&lv_p).map(|(m, l)| m * l).sum();
        residual = residual.max((a - b).abs());
        if let (Some(pot), Some(pr)) = (potential, potential_residual.as_mut()) {
            let d = (pot.eval(&lambda.ambient, &fp) - pot.eval(&lambda.ambient, &p)).abs();
            *pr = pr.max(d);
        }
    }
    Ok(StarConditionReport {
        mu: mu.to_vec(),
        residual,
        orthogonality_defect: defect,
        equivariance_residual,
        potential_residual,
        samples,
    })
}

/// Builds the intertwining map F_mu for the so(m)-pair construction:
/// (p, q, u) -> (A p, A^{-1} q, u) with A the skew-canonical conjugator of
/// (j(Z_mu), j'(Z_mu)).
pub fn so_f_mu(
    first: &[SkewSymmetric],
    second: &[SkewSymmetric],
    mu: &[f64],
    ambient: &AmbientSpace,
) -> Result<Mat> {
    let m = first[0].m();
    let jz = linear_combo_skew(first, mu);
    let jpz = linear_combo_skew(second, mu);
    let a = crate::jmaps::skew_conjugator(&jz, &jpz)?;
    Ok(block_f_mu(&a, m, ambient))
}

fn linear_combo_skew(images: &[SkewSymmetric], mu: &[f64]) -> SkewSymmetric {
    let mut acc = SkewSymmetric::zeros(images[0].m());
    for (c, img) in mu.iter().zip(images) {
        acc = acc.add(&img.scale(*c));
    }
    acc
}

/// Builds F_mu for the cross-product construction from the eigenframe-matched
/// conjugator of (c(Z_mu), c'(Z_mu)).
pub fn cross_f_mu(
    first: &CMapFamily,
    second: &CMapFamily,
    mu: &[f64],
    ambient: &AmbientSpace,
) -> Result<Mat> {
    let a = symmetric_conjugator(&first.eval(mu), &second.eval(mu))?;
    Ok(block_f_mu(&a, 3, ambient))
}

/// (p, q, u) -> (A p, A^{-1} q, u).
fn block_f_mu(a: &Mat, m: usize, ambient: &AmbientSpace) -> Mat {
    let n = ambient.dim();
    let mut f = Mat::identity(n);
    let at = a.transpose();
    for i in 0..m {
        for j in 0..m {
            f[(i, j)] = a[(i, j)];
            f[(m + i, m + j)] = at[(i, j)];
        }
    }
    f
}

/// Builds F_mu for the Hopf-lift construction: (p, q) -> (A p, A^{-1} q)
/// with A in SU(2) lifting the eigenframe conjugator E_Z through the Hopf
/// map.
pub fn hopf_f_mu(
    first: &CMapFamily,
    second: &CMapFamily,
    mu: &[f64],
    ambient: &AmbientSpace,
) -> Result<Mat> {
    let e = symmetric_conjugator(&first.eval(mu), &second.eval(mu))?;
    let q = so3_lift(&e)?;
    let a = su2_as_so4(&q);
    let n = ambient.dim();
    let mut f = Mat::zeros(n, n);
    let at = a.transpose();
    for i in 0..4 {
        for j in 0..4 {
            f[(i, j)] = a[(i, j)];
            f[(4 + i, 4 + j)] = at[(i, j)];
        }
    }
    Ok(f)
}

/// The T-preserving isometry tau with its induced torus automorphism.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauReport {
    pub tau: Vec<Vec<f64>>,
    /// Induced automorphism of the torus algebra (identity or the swap).
    pub psi: Vec<Vec<f64>>,
    pub orthogonality_defect: f64,
    /// max | Psi(lambda_p(X)) - lambda'_{tau p}(tau X) | over samples.
    pub lambda_residual: f64,
    pub samples: usize,
}

/// Builds tau for the given form pair and verifies Psi_tau . lambda =
/// tau^* lambda' by sampling. For the R^m + R^m + C^r variant tau swaps the
/// two slots and Psi = Id; for the Hopf variant tau(p, q) = (A' q, A p) and
/// Psi swaps the torus coordinates.
pub fn tau_map(
    lambda: &AdmissibleForm,
    lambda_p: &AdmissibleForm,
    samples: usize,
    seed: u64,
) -> Result<TauReport> {
    let n = lambda.ambient.dim();
    let (tau, psi) = match (&lambda.kind, &lambda.ambient.variant) {
        (FormKind::HopfPair { lift_first, lift_second, .. }, AmbientVariant::CmCm { m }) => {
            assert_eq!(*m, 2);
            let a = su2_as_so4(lift_first);
            let ap = su2_as_so4(lift_second);
            let mut t = Mat::zeros(n, n);
            for i in 0..4 {
                for j in 0..4 {
                    // first output slot = A' q, second output slot = A p.
                    t[(i, 4 + j)] = ap[(i, j)];
                    t[(4 + i, j)] = a[(i, j)];
                }
            }
            let psi = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
            (t, psi)
        }
        (_, AmbientVariant::RmRmCr { m, r }) => {
            let mut t = Mat::zeros(n, n);
            for i in 0..*m {
                t[(i, m + i)] = 1.0;
                t[(m + i, i)] = 1.0;
            }
            for i in 2 * m..2 * m + 2 * r {
                t[(i, i)] = 1.0;
            }
            (t, Mat::identity(*r))
        }
        (FormKind::Zero, AmbientVariant::CmCm { .. }) | (_, AmbientVariant::CmCm { .. }) => {
            return Err(Error::MissingLift)
        }
        (_, AmbientVariant::Plain { .. }) => {
            return Err(Error::InvalidConfig("tau needs a torus ambient".into()))
        }
    };
    let defect = tau.orthogonality_defect();
    let mut rng = sampling::SampleRng::new(seed);
    let mut lambda_residual: f64 = 0.0;
    for _ in 0..samples {
        let p = rng.point_on(&lambda.ambient);
        let x = rng.vector(n);
        let lv = lambda.eval(&p, &x)?;
        let tv = lambda_p.eval(&tau.matvec(&p), &tau.matvec(&x))?;
        let psi_lv = psi.matvec(&lv);
        for (a, b) in psi_lv.iter().zip(&tv) {
            lambda_residual = lambda_residual.max((a - b).abs());
        }
    }
    Ok(TauReport {
        tau: (0..n).map(|i| tau.row(i).to_vec()).collect(),
        psi: (0..psi.rows()).map(|i| psi.row(i).to_vec()).collect(),
        orthogonality_defect: defect,
        lambda_residual,
        samples,
    })
}

pub mod sampling {
    //! Seeded sampling of ambient points and vectors.

    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::{AmbientSpace, Manifold};

    pub struct SampleRng {
        rng: ChaCha8Rng,
    }

    impl SampleRng {
        pub fn new(seed: u64) -> Self {
            SampleRng { rng: ChaCha8Rng::seed_from_u64(seed) }
        }

        pub fn normal(&mut self) -> f64 {
            let u: f64 = self.rng.random::<f64>().max(1e-300);
            let v: f64 = self.rng.random::<f64>();
            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        }

        pub fn vector(&mut self, n: usize) -> Vec<f64> {
            (0..n).map(|_| self.normal()).collect()
        }

        pub fn uniform(&mut self) -> f64 {
            self.rng.random()
        }

        /// Point on the manifold: uniform on the sphere, radius-weighted
        /// uniform in the ball.
        pub fn point_on(&mut self, ambient: &AmbientSpace) -> Vec<f64> {
            let n = ambient.dim();
            let mut v = self.vector(n);
            let norm = crate::numkit::norm(&v).max(1e-300);
            let scale = match ambient.manifold {
                Manifold::Sphere => 1.0 / norm,
                Manifold::Ball => self.rng.random::<f64>().powf(1.0 / n as f64) / norm,
            };
            for a in v.iter_mut() {
                *a *= scale;
            }
            v
        }
    }
}

#[cfg(test)]
mod tests;
