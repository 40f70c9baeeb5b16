//! Compact-group constructions: block embeddings H, P, T inside SO(2m+2r)
//! or SU(2m+r+1), the left-invariant metric built from a j-map into
//! h = k + k, per-representation block spectra of its Laplacian, and the
//! determinant/Krylov potential with its invariance tests.
//!
//! With a bi-invariant g0 (normalized so the standard bases are
//! orthonormal: -tr(XY)/2 for so, -Re tr(XY) for su), the metric g_lambda
//! is left invariant and its Laplacian acts on the Peter-Weyl block of a
//! representation pi as -sum_i dpi(X_i)^2 over any g_lambda-orthonormal
//! frame {X_i}. The intertwiners of the isospectrality argument are
//! conjugations, which preserve each block, so per-block spectra of
//! isospectral pairs must agree -- that is the derived test this module
//! certifies.

use serde::{Deserialize, Serialize};

use crate::jmaps::{FamilyImages, JMapFamily};
use crate::liealg::{SkewSymmetric, SuElement};
use crate::numkit::{haar_special_orthogonal, haar_special_unitary, sym_eigen, C64, CMat, Mat, SymmetricMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupFamily {
    So,
    Su,
}

/// Block model: H = two m x m blocks top-left, P the bottom-right block
/// (SO(2r) or SU(r+1)), T the standard maximal torus of P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupModel {
    pub family: GroupFamily,
    pub m: usize,
    pub r: usize,
}

impl GroupModel {
    pub fn so(m: usize, r: usize) -> Self {
        GroupModel { family: GroupFamily::So, m, r }
    }

    pub fn su(m: usize, r: usize) -> Self {
        GroupModel { family: GroupFamily::Su, m, r }
    }

    pub fn n(&self) -> usize {
        match self.family {
            GroupFamily::So => 2 * self.m + 2 * self.r,
            GroupFamily::Su => 2 * self.m + self.r + 1,
        }
    }

    pub fn algebra_dim(&self) -> usize {
        let n = self.n();
        match self.family {
            GroupFamily::So => n * (n - 1) / 2,
            GroupFamily::Su => n * n - 1,
        }
    }
}

/// Real or complex group-algebra element.
#[derive(Debug, Clone)]
pub enum GroupMat {
    So(Mat),
    Su(CMat),
}

impl GroupMat {
    pub fn add(&self, other: &GroupMat) -> GroupMat {
        match (self, other) {
            (GroupMat::So(a), GroupMat::So(b)) => GroupMat::So(a.add(b)),
            (GroupMat::Su(a), GroupMat::Su(b)) => GroupMat::Su(a.add(b)),
            _ => panic!("mixed group matrices"),
        }
    }

    pub fn scale(&self, s: f64) -> GroupMat {
        match self {
            GroupMat::So(a) => GroupMat::So(a.scale(s)),
            GroupMat::Su(a) => GroupMat::Su(a.scale(C64::new(s, 0.0))),
        }
    }

    pub fn commutator(&self, other: &GroupMat) -> GroupMat {
        match (self, other) {
            (GroupMat::So(a), GroupMat::So(b)) => {
                GroupMat::So(a.matmul(b).sub(&b.matmul(a)))
            }
            (GroupMat::Su(a), GroupMat::Su(b)) => {
                GroupMat::Su(a.matmul(b).sub(&b.matmul(a)))
            }
            _ => panic!("mixed group matrices"),
        }
    }

    pub fn frobenius(&self) -> f64 {
        match self {
            GroupMat::So(a) => a.frobenius(),
            GroupMat::Su(a) => a.frobenius(),
        }
    }
}

/// g0 pairing: -tr(XY)/2 for so, -Re tr(XY) for su; makes the standard
/// bases orthonormal and the Casimir small-integer.
pub fn g0(a: &GroupMat, b: &GroupMat) -> f64 {
    match (a, b) {
        (GroupMat::So(x), GroupMat::So(y)) => -0.5 * x.matmul(y).trace(),
        (GroupMat::Su(x), GroupMat::Su(y)) => -x.matmul(y).trace().re,
        _ => panic!("mixed group matrices"),
    }
}

/// Orthonormal basis of the group algebra in a fixed order.
pub fn algebra_basis(model: &GroupModel) -> Vec<GroupMat> {
    let n = model.n();
    match model.family {
        GroupFamily::So => SkewSymmetric::basis_all(n)
            .into_iter()
            .map(|x| GroupMat::So(x.to_mat()))
            .collect(),
        GroupFamily::Su => SuElement::basis_all(n)
            .into_iter()
            .map(|x| GroupMat::Su(x.to_cmat()))
            .collect(),
    }
}

/// Orthonormal basis of z (the torus algebra inside P).
pub fn torus_basis(model: &GroupModel) -> Vec<GroupMat> {
    let n = model.n();
    let base = 2 * model.m;
    match model.family {
        GroupFamily::So => (0..model.r)
            .map(|k| {
                let mut z = Mat::zeros(n, n);
                z[(base + 2 * k, base + 2 * k + 1)] = 1.0;
                z[(base + 2 * k + 1, base + 2 * k)] = -1.0;
                GroupMat::So(z)
            })
            .collect(),
        GroupFamily::Su => (1..=model.r)
            .map(|k| {
                let norm = ((k * (k + 1)) as f64).sqrt();
                let mut z = CMat::zeros(n, n);
                for i in 0..k {
                    z[(base + i, base + i)] = C64::new(0.0, 1.0 / norm);
                }
                z[(base + k, base + k)] = C64::new(0.0, -(k as f64) / norm);
                GroupMat::Su(z)
            })
            .collect(),
    }
}

/// Embeds a pair of k-valued maps as j(Z_k) = diag(j1(Z_k), j2(Z_k), 0).
pub fn embed_j(model: &GroupModel, family: &JMapFamily) -> Result<Vec<GroupMat>> {
    let n = model.n();
    let m = model.m;
    match (&family.images, model.family) {
        (FamilyImages::So(v), GroupFamily::So) => {
            if v[0].m() != 2 * m {
                return Err(Error::DimMismatch {
                    op: "embed_j",
                    detail: format!("expected so({}) block images, got so({})", 2 * m, v[0].m()),
                });
            }
            Ok(v.iter()
                .map(|x| {
                    let mut out = Mat::zeros(n, n);
                    for i in 0..2 * m {
                        for j in 0..2 * m {
                            out[(i, j)] = x.get(i, j);
                        }
                    }
                    GroupMat::So(out)
                })
                .collect())
        }
        (FamilyImages::Su(v), GroupFamily::Su) => {
            if v[0].m() != 2 * m {
                return Err(Error::DimMismatch {
                    op: "embed_j",
                    detail: format!("expected su({}) block images, got su({})", 2 * m, v[0].m()),
                });
            }
            Ok(v.iter()
                .map(|x| {
                    let xm = x.to_cmat();
                    let mut out = CMat::zeros(n, n);
                    for i in 0..2 * m {
                        for j in 0..2 * m {
                            out[(i, j)] = xm[(i, j)];
                        }
                    }
                    GroupMat::Su(out)
                })
                .collect())
        }
        _ => Err(Error::AlgebraMismatch("family does not match group".into())),
    }
}

/// Left-invariant metric data: j images and the transpose map's
/// coefficients against the fixed orthonormal basis.
#[derive(Debug, Clone)]
pub struct LeftInvariantMetric {
    pub model: GroupModel,
    pub j_images: Vec<GroupMat>,
    basis: Vec<GroupMat>,
    torus: Vec<GroupMat>,
    /// lambda_coeffs[i][k] = g0(E_i, j(Z_k)).
    lambda_coeffs: Vec<Vec<f64>>,
}

impl LeftInvariantMetric {
    pub fn new(model: GroupModel, family: &JMapFamily) -> Result<Self> {
        let j_images = embed_j(&model, family)?;
        Ok(Self::from_images(model, j_images))
    }

    pub fn from_images(model: GroupModel, j_images: Vec<GroupMat>) -> Self {
        let basis = algebra_basis(&model);
        let torus = torus_basis(&model);
        let lambda_coeffs = basis
            .iter()
            .map(|e| j_images.iter().map(|jz| g0(e, jz)).collect())
            .collect();
        LeftInvariantMetric { model, j_images, basis, torus, lambda_coeffs }
    }

    /// lambda^j(X) = sum_k g0(X, j(Z_k)) Z_k.
    pub fn lambda_of(&self, x: &GroupMat) -> GroupMat {
        let mut acc = self.torus[0].scale(0.0);
        for (k, z) in self.torus.iter().enumerate() {
            acc = acc.add(&z.scale(g0(x, &self.j_images[k])));
        }
        acc
    }

    /// g_lambda(X, Y) = g0(X + lambda(X), Y + lambda(Y)).
    pub fn metric(&self, x: &GroupMat, y: &GroupMat) -> f64 {
        let xs = x.add(&self.lambda_of(x));
        let ys = y.add(&self.lambda_of(y));
        g0(&xs, &ys)
    }

    /// g_lambda-orthonormal frame X_i = (I - Lambda) E_i, as matrices.
    pub fn metric_frame(&self) -> Vec<GroupMat> {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut x = e.clone();
                for (k, z) in self.torus.iter().enumerate() {
                    x = x.add(&z.scale(-self.lambda_coeffs[i][k]));
                }
                x
            })
            .collect()
    }

    /// Frame coordinates in the orthonormal basis (basis vector i minus the
    /// torus corrections).
    pub fn frame_coords(&self) -> Vec<Vec<f64>> {
        let d = self.basis.len();
        // z coordinates of the torus vectors in the basis.
        let z_coords: Vec<Vec<f64>> = self
            .torus
            .iter()
            .map(|z| self.basis.iter().map(|e| g0(e, z)).collect())
            .collect();
        (0..d)
            .map(|i| {
                let mut c = vec![0.0; d];
                c[i] = 1.0;
                for (k, zc) in z_coords.iter().enumerate() {
                    let coeff = self.lambda_coeffs[i][k];
                    if coeff != 0.0 {
                        for (a, b) in c.iter_mut().zip(zc) {
                            *a -= coeff * b;
                        }
                    }
                }
                c
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Defining,
    Adjoint,
}

/// Spectrum of -sum_i dpi(X_i)^2 over the g_lambda-orthonormal frame; the
/// operator is frame-independent, and per-block spectra of isospectral
/// pairs agree.
pub fn block_laplacian_spectrum(
    lm: &LeftInvariantMetric,
    rep: Representation,
) -> Result<Vec<f64>> {
    let op = block_laplacian_operator(lm, rep)?;
    let (w, _) = sym_eigen(&op)?;
    Ok(w)
}

/// The symmetric operator matrix of the block Laplacian.
pub fn block_laplacian_operator(
    lm: &LeftInvariantMetric,
    rep: Representation,
) -> Result<SymmetricMatrix> {
    match rep {
        Representation::Defining => {
            let frame = lm.metric_frame();
            match lm.model.family {
                GroupFamily::So => {
                    let n = lm.model.n();
                    let mut op = Mat::zeros(n, n);
                    for x in &frame {
                        let xm = match x {
                            GroupMat::So(m) => m,
                            _ => unreachable!(),
                        };
                        op = op.sub(&xm.matmul(xm));
                    }
                    Ok(SymmetricMatrix::from_mat(&op))
                }
                GroupFamily::Su => {
                    let n = lm.model.n();
                    let mut op = CMat::zeros(n, n);
                    for x in &frame {
                        let xm = match x {
                            GroupMat::Su(m) => m,
                            _ => unreachable!(),
                        };
                        op = op.sub(&xm.matmul(xm));
                    }
                    // -sum X^2 is Hermitian PSD; its real block embedding is
                    // symmetric with each eigenvalue doubled in multiplicity.
                    Ok(SymmetricMatrix::from_mat(&op.to_real_block()))
                }
            }
        }
        Representation::Adjoint => {
            let d = lm.model.algebra_dim();
            if d * d > 10_000 * 10 {
                return Err(Error::InvalidConfig(format!(
                    "adjoint representation dimension {d} exceeds the entry budget"
                )));
            }
            let basis = algebra_basis(&lm.model);
            // ad matrices of the basis elements.
            let ad_basis: Vec<Mat> = basis
                .iter()
                .map(|ea| {
                    let mut ad = Mat::zeros(d, d);
                    for (b, eb) in basis.iter().enumerate() {
                        let c = ea.commutator(eb);
                        for (a, eaa) in basis.iter().enumerate() {
                            ad[(a, b)] = g0(eaa, &c);
                        }
                    }
                    ad
                })
                .collect();
            let coords = lm.frame_coords();
            let mut op = Mat::zeros(d, d);
            for ci in &coords {
                let mut adx = Mat::zeros(d, d);
                for (a, &c) in ci.iter().enumerate() {
                    if c != 0.0 {
                        adx = adx.add(&ad_basis[a].scale(c));
                    }
                }
                op = op.sub(&adx.matmul(&adx));
            }
            Ok(SymmetricMatrix::from_mat(&op))
        }
    }
}

/// d(A, V) = det(V, AV, ..., A^{m-1} V); for a matrix argument the product
/// over its columns. Zero whenever A has a repeated eigenvalue, and
/// invariant under the simultaneous SL action (B A B^{-1}, B V).
pub fn vandermonde_d(a: &CMat, v: &CMat) -> Result<C64> {
    let m = a.rows();
    if a.cols() != m || v.rows() != m {
        return Err(Error::DimMismatch {
            op: "vandermonde_d",
            detail: format!("a {}x{}, v {}x{}", a.rows(), a.cols(), v.rows(), v.cols()),
        });
    }
    let mut prod = C64::new(1.0, 0.0);
    for col in 0..v.cols() {
        let mut krylov = CMat::zeros(m, m);
        let mut cur: Vec<C64> = (0..m).map(|i| v[(i, col)]).collect();
        for p in 0..m {
            for i in 0..m {
                krylov[(i, p)] = cur[i];
            }
            if p + 1 < m {
                cur = a.matvec(&cur);
            }
        }
        prod *= krylov.det();
    }
    Ok(prod)
}

/// The conjugation-invariant potential on the group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupPotential {
    pub c1: f64,
    pub c2: f64,
}

impl GroupPotential {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > c2 && c2 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "need c1 > c2 > 0, got c1 = {c1}, c2 = {c2}"
            )));
        }
        Ok(GroupPotential { c1, c2 })
    }
}

/// Group element in the modeled group.
#[derive(Debug, Clone)]
pub enum GroupElement {
    So(Mat),
    Su(CMat),
}

/// exp(c1 det A + c2 det E) in the orthogonal case; the unitary case
/// subtracts the squared real Krylov determinants of the (A, C) and (E, F)
/// blocks.
pub fn group_potential(model: &GroupModel, x: &GroupElement, pot: &GroupPotential) -> Result<f64> {
    let m = model.m;
    let n = model.n();
    match (x, model.family) {
        (GroupElement::So(g), GroupFamily::So) => {
            let defect = g.orthogonality_defect();
            if defect > 1e-10 {
                return Err(Error::NotInGroup { defect });
            }
            let a = Mat::from_fn(m, m, |i, j| g[(i, j)]);
            let e = Mat::from_fn(m, m, |i, j| g[(m + i, m + j)]);
            Ok((pot.c1 * a.det() + pot.c2 * e.det()).exp())
        }
        (GroupElement::Su(g), GroupFamily::Su) => {
            let defect = g.unitarity_defect();
            if defect > 1e-10 {
                return Err(Error::NotInGroup { defect });
            }
            let a = CMat::from_fn(m, m, |i, j| g[(i, j)]);
            let e = CMat::from_fn(m, m, |i, j| g[(m + i, m + j)]);
            let c = CMat::from_fn(m, n - 2 * m, |i, j| g[(i, 2 * m + j)]);
            let f = CMat::from_fn(m, n - 2 * m, |i, j| g[(m + i, 2 * m + j)]);
            let da = vandermonde_d(&a, &c)?.re;
            let de = vandermonde_d(&e, &f)?.re;
            Ok((pot.c1 * a.det().re + pot.c2 * e.det().re - da * da - de * de).exp())
        }
        _ => Err(Error::AlgebraMismatch("element does not match group".into())),
    }
}

/// The block-swap conjugator realizing tau.
pub fn tau_conjugator(model: &GroupModel) -> Mat {
    let n = model.n();
    let m = model.m;
    let mut c = Mat::zeros(n, n);
    for i in 0..m {
        c[(i, m + i)] = 1.0;
        c[(m + i, i)] = 1.0;
    }
    for i in 2 * m..n {
        c[(i, i)] = 1.0;
    }
    c
}

pub fn tau_apply(model: &GroupModel, x: &GroupElement) -> GroupElement {
    let c = tau_conjugator(model);
    match x {
        GroupElement::So(g) => GroupElement::So(c.matmul(g).matmul(&c)),
        GroupElement::Su(g) => {
            let n = model.n();
            let cc = CMat::from_fn(n, n, |i, j| C64::new(c[(i, j)], 0.0));
            GroupElement::Su(cc.matmul(g).matmul(&cc))
        }
    }
}

/// Structural certificate for the group construction hypotheses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupHypothesisCertificate {
    /// max |g0(Z, X)| over torus/h basis pairs.
    pub z_h_orthogonality: f64,
    /// max ||[Z, X]|| over torus/h basis pairs.
    pub z_h_commutation: f64,
    pub tau_isometry_defect: f64,
    /// max ||tau_* (X, Y) - (Y, X)|| on the h basis.
    pub tau_swap_residual: f64,
    /// max |tau restricted to T - id| on the torus basis.
    pub tau_fixes_torus: f64,
    /// max over samples of |phi(h x h^-1) - phi(x)| (H-conjugation).
    pub potential_h_invariance: f64,
    /// max over sampled isometry-group elements of |phi(g . x) - phi(x)|.
    pub potential_g0_invariance: f64,
    /// observed max of |phi(tau x) - phi(x)| (should be large).
    pub potential_tau_asymmetry: f64,
    /// max over the algebra basis of |lambda^{j'}(Ad(c) X) - lambda^j(X)|.
    pub tau_lambda_residual: f64,
    pub pass: bool,
}

/// Verifies the swap-construction hypotheses: [z, h] = 0, z orthogonal to
/// h, the block-swap tau is a g0-isometry fixing T pointwise whose
/// differential swaps the two k factors, the potential is invariant under
/// the identity component of its symmetry group and visibly not under tau,
/// and tau^* lambda^{j'} = lambda^j.
pub fn check_group_hypotheses(
    model: &GroupModel,
    j: &JMapFamily,
    jp: &JMapFamily,
    pot: &GroupPotential,
    samples: usize,
    seed: u64,
) -> Result<GroupHypothesisCertificate> {
    let torus = torus_basis(model);
    // h basis: block pairs.
    let h_basis: Vec<GroupMat> = h_block_basis(model);

    let mut z_h_orthogonality: f64 = 0.0;
    let mut z_h_commutation: f64 = 0.0;
    for z in &torus {
        for h in &h_basis {
            z_h_orthogonality = z_h_orthogonality.max(g0(z, h).abs());
            z_h_commutation = z_h_commutation.max(z.commutator(h).frobenius());
        }
    }

    let c = tau_conjugator(model);
    // tau is conjugation by an orthogonal matrix: g0-isometry.
    let basis = algebra_basis(model);
    let ad_c = |x: &GroupMat| -> GroupMat {
        match x {
            GroupMat::So(g) => GroupMat::So(c.matmul(g).matmul(&c)),
            GroupMat::Su(g) => {
                let n = model.n();
                let cc = CMat::from_fn(n, n, |i, j| C64::new(c[(i, j)], 0.0));
                GroupMat::Su(cc.matmul(g).matmul(&cc))
            }
        }
    };
    let mut tau_isometry_defect: f64 = 0.0;
    for (i, x) in basis.iter().enumerate() {
        for y in basis.iter().skip(i) {
            let d = (g0(&ad_c(x), &ad_c(y)) - g0(x, y)).abs();
            tau_isometry_defect = tau_isometry_defect.max(d);
        }
    }
    // tau fixes T pointwise (commutes with the torus algebra).
    let mut tau_fixes_torus: f64 = 0.0;
    for z in &torus {
        let d = ad_c(z).add(&z.scale(-1.0)).frobenius();
        tau_fixes_torus = tau_fixes_torus.max(d);
    }
    // tau_* swaps the two k blocks: check on the embedded h basis.
    let mut tau_swap_residual: f64 = 0.0;
    for (top, bottom) in h_pairs(model) {
        let d = ad_c(&top).add(&bottom.scale(-1.0)).frobenius();
        tau_swap_residual = tau_swap_residual.max(d);
    }

    // tau^* lambda^{j'} = lambda^j on the basis.
    let lm = LeftInvariantMetric::new(*model, j)?;
    let lmp = LeftInvariantMetric::new(*model, jp)?;
    let mut tau_lambda_residual: f64 = 0.0;
    for x in &basis {
        let lhs = lmp.lambda_of(&ad_c(x));
        let rhs = lm.lambda_of(x);
        tau_lambda_residual = tau_lambda_residual.max(lhs.add(&rhs.scale(-1.0)).frobenius());
    }

    // Potential invariances by sampling.
    let (h_inv, g0_inv, tau_asym) = sample_potential_invariance(model, pot, samples, seed)?;

    let pass = z_h_orthogonality <= 1e-12
        && z_h_commutation <= 1e-12
        && tau_isometry_defect <= 1e-12
        && tau_fixes_torus <= 1e-12
        && tau_swap_residual <= 1e-12
        && tau_lambda_residual <= 1e-13
        && h_inv <= 1e-12
        && g0_inv <= 1e-12;
    Ok(GroupHypothesisCertificate {
        z_h_orthogonality,
        z_h_commutation,
        tau_isometry_defect,
        tau_swap_residual,
        tau_fixes_torus,
        potential_h_invariance: h_inv,
        potential_g0_invariance: g0_inv,
        potential_tau_asymmetry: tau_asym,
        tau_lambda_residual,
        pass,
    })
}

/// Basis of h = k + k embedded in the group algebra.
fn h_block_basis(model: &GroupModel) -> Vec<GroupMat> {
    let n = model.n();
    let m = model.m;
    match model.family {
        GroupFamily::So => {
            let mut out = Vec::new();
            for block in 0..2 {
                for x in SkewSymmetric::basis_all(m) {
                    let mut g = Mat::zeros(n, n);
                    for i in 0..m {
                        for j in 0..m {
                            g[(block * m + i, block * m + j)] = x.get(i, j);
                        }
                    }
                    out.push(GroupMat::So(g));
                }
            }
            out
        }
        GroupFamily::Su => {
            let mut out = Vec::new();
            for block in 0..2 {
                for x in SuElement::basis_all(m) {
                    let xm = x.to_cmat();
                    let mut g = CMat::zeros(n, n);
                    for i in 0..m {
                        for j in 0..m {
                            g[(block * m + i, block * m + j)] = xm[(i, j)];
                        }
                    }
                    out.push(GroupMat::Su(g));
                }
            }
            out
        }
    }
}

/// Pairs (X embedded in the first factor, the same X in the second).
fn h_pairs(model: &GroupModel) -> Vec<(GroupMat, GroupMat)> {
    let all = h_block_basis(model);
    let half = all.len() / 2;
    (0..half).map(|i| (all[i].clone(), all[half + i].clone())).collect()
}

/// Samples the potential invariance: under the identity component of its
/// invariance group (Q_L x Q_R for SO; conjugation by H, left P, right T
/// for SU), and the asymmetry under tau.
fn sample_potential_invariance(
    model: &GroupModel,
    pot: &GroupPotential,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    let mut h_inv: f64 = 0.0;
    let mut g_inv: f64 = 0.0;
    let mut tau_asym: f64 = 0.0;
    for s in 0..samples as u64 {
        let x = random_group_element(model, seed.wrapping_add(7 + 3 * s));
        let base = group_potential(model, &x, pot)?;
        // H-conjugation invariance.
        let h = random_h_element(model, seed.wrapping_add(1000 + 3 * s));
        let hx = conj_element(&h, &x);
        h_inv = h_inv.max((group_potential(model, &hx, pot)? - base).abs());
        // Identity-component invariance.
        let gx = apply_g0_symmetry(model, &x, seed.wrapping_add(2000 + 3 * s));
        g_inv = g_inv.max((group_potential(model, &gx, pot)? - base).abs());
        // tau asymmetry (record the maximum observed deviation).
        let tx = tau_apply(model, &x);
        tau_asym = tau_asym.max((group_potential(model, &tx, pot)? - base).abs());
    }
    // Deterministic probes exposing the block swap: tau exchanges the two
    // m x m diagonal blocks, so elements whose blocks have opposite
    // determinants separate phi(tau x) from phi(x) by order one (Haar
    // samples rarely do, since their subblock determinants are tiny).
    for x in tau_probe_elements(model) {
        let base = group_potential(model, &x, pot)?;
        let tx = tau_apply(model, &x);
        tau_asym = tau_asym.max((group_potential(model, &tx, pot)? - base).abs());
    }
    Ok((h_inv, g_inv, tau_asym))
}

fn tau_probe_elements(model: &GroupModel) -> Vec<GroupElement> {
    let n = model.n();
    let m = model.m;
    match model.family {
        GroupFamily::So => {
            // diag(A0, I, P0) with det A0 = det P0 = -1 lies in SO(n) and
            // has det(A-block) = -1, det(E-block) = +1.
            let mut g = Mat::identity(n);
            g[(0, 0)] = -1.0;
            g[(2 * m, 2 * m)] = -1.0;
            let mut flipped = Mat::identity(n);
            flipped[(m, m)] = -1.0;
            flipped[(2 * m, 2 * m)] = -1.0;
            vec![GroupElement::So(g), GroupElement::So(flipped)]
        }
        GroupFamily::Su => {
            // diag(u I_m, I_m, v, 1, ...) with u^m v = 1: Re det A = Re u^m
            // differs from Re det E = 1.
            let u = C64::new(-1.0, 0.0);
            let mut g = CMat::identity(n);
            for i in 0..m {
                g[(i, i)] = u;
            }
            let det_fix = if m % 2 == 1 { C64::new(-1.0, 0.0) } else { C64::new(1.0, 0.0) };
            g[(2 * m, 2 * m)] = det_fix;
            vec![GroupElement::Su(g)]
        }
    }
}

pub fn random_group_element(model: &GroupModel, seed: u64) -> GroupElement {
    match model.family {
        GroupFamily::So => GroupElement::So(haar_special_orthogonal(model.n(), seed)),
        GroupFamily::Su => GroupElement::Su(haar_special_unitary(model.n(), seed)),
    }
}

/// Random element of H = K x K embedded top-left.
fn random_h_element(model: &GroupModel, seed: u64) -> GroupElement {
    let n = model.n();
    let m = model.m;
    match model.family {
        GroupFamily::So => {
            let a = haar_special_orthogonal(m, seed);
            let b = haar_special_orthogonal(m, seed.wrapping_add(1));
            let mut g = Mat::identity(n);
            for i in 0..m {
                for j in 0..m {
                    g[(i, j)] = a[(i, j)];
                    g[(m + i, m + j)] = b[(i, j)];
                }
            }
            GroupElement::So(g)
        }
        GroupFamily::Su => {
            let a = haar_special_unitary(m, seed);
            let b = haar_special_unitary(m, seed.wrapping_add(1));
            let mut g = CMat::identity(n);
            for i in 0..m {
                for j in 0..m {
                    g[(i, j)] = a[(i, j)];
                    g[(m + i, m + j)] = b[(i, j)];
                }
            }
            GroupElement::Su(g)
        }
    }
}

fn conj_element(h: &GroupElement, x: &GroupElement) -> GroupElement {
    match (h, x) {
        (GroupElement::So(h), GroupElement::So(x)) => {
            GroupElement::So(h.matmul(x).matmul(&h.transpose()))
        }
        (GroupElement::Su(h), GroupElement::Su(x)) => {
            GroupElement::Su(h.matmul(x).matmul(&h.transpose_conj()))
        }
        _ => panic!("mixed elements"),
    }
}

/// A sampled element of the identity component of the potential's symmetry
/// group acting on x.
fn apply_g0_symmetry(model: &GroupModel, x: &GroupElement, seed: u64) -> GroupElement {
    let n = model.n();
    let m = model.m;
    match (model.family, x) {
        (GroupFamily::So, GroupElement::So(g)) => {
            // Q_L x Q_R with Q = SO(m) x SO(m) x SO(2r).
            let block = |s: u64| -> Mat {
                let a = haar_special_orthogonal(m, s);
                let b = haar_special_orthogonal(m, s.wrapping_add(1));
                let p = haar_special_orthogonal(n - 2 * m, s.wrapping_add(2));
                let mut q = Mat::zeros(n, n);
                for i in 0..m {
                    for j in 0..m {
                        q[(i, j)] = a[(i, j)];
                        q[(m + i, m + j)] = b[(i, j)];
                    }
                }
                for i in 0..n - 2 * m {
                    for j in 0..n - 2 * m {
                        q[(2 * m + i, 2 * m + j)] = p[(i, j)];
                    }
                }
                q
            };
            let ql = block(seed);
            let qr = block(seed.wrapping_add(17));
            GroupElement::So(ql.matmul(g).matmul(&qr))
        }
        (GroupFamily::Su, GroupElement::Su(g)) => {
            // Inn(H) x P_L x T_R.
            let h = match random_h_element(model, seed) {
                GroupElement::Su(h) => h,
                _ => unreachable!(),
            };
            let p_small = haar_special_unitary(n - 2 * m, seed.wrapping_add(5));
            let mut p = CMat::identity(n);
            for i in 0..n - 2 * m {
                for j in 0..n - 2 * m {
                    p[(2 * m + i, 2 * m + j)] = p_small[(i, j)];
                }
            }
            // Right torus element: diagonal phases in the P block, det 1.
            let mut t = CMat::identity(n);
            let r1 = n - 2 * m;
            let mut phase_sum = 0.0;
            let mut rng = crate::geometry::sampling::SampleRng::new(seed.wrapping_add(9));
            for i in 0..r1 - 1 {
                let th = rng.uniform() * std::f64::consts::TAU;
                phase_sum += th;
                t[(2 * m + i, 2 * m + i)] = C64::new(th.cos(), th.sin());
            }
            t[(n - 1, n - 1)] = C64::new((-phase_sum).cos(), (-phase_sum).sin());
            // h (p x t) h^-1
            let inner = p.matmul(g).matmul(&t);
            GroupElement::Su(h.matmul(&inner).matmul(&h.transpose_conj()))
        }
        _ => panic!("mixed elements"),
    }
}

#[cfg(test)]
mod tests;
