//! Pencil assembly.
//!
//! Exact-moment mode integrates every matrix entry with the Gamma-product
//! moment formulas. The stiffness integrand
//!
//! ```text
//!   <(I - L^T) grad f_i, (I - L^T) grad f_j> * weight,   L = sum_k V_k w_k^T
//! ```
//!
//! is expanded as
//!
//! ```text
//!   <u_i, u_j> - sum_k (a_jk b_ik + a_ik b_jk) + sum_kl a_ik a_jl <w_k, w_l>
//! ```
//!
//! with a_ik = <V_k, u_i> (tiny polynomials) and b_ik = <w_k, u_i>. All
//! moment sums against the fixed factors (weight, w_k components, Gram
//! <w_k, w_l>) are precomputed serially into measure tables keyed by
//! monomial, with terms bucketed by exponent parity (a moment survives only
//! if every exponent is even, so only the matching-parity bucket
//! contributes). The parallel entry loop then only reads tables, which keeps
//! assembly deterministic under any thread count.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{BoundaryCondition, PolyBasis};
use super::moments::{ball_moment, simplex, sphere_moment};
use crate::geometry::{sampling::SampleRng, AdmissibleForm, Manifold, PotentialField};
use crate::numkit::{Mat, SymmetricMatrix};
use crate::poly::{MultiIndex, Poly};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AssemblyMode {
    ExactMoment,
    Quadrature { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilMeta {
    pub mode: AssemblyMode,
    pub degree: usize,
    pub bc: BoundaryCondition,
    pub basis_len: usize,
    pub conformal: bool,
}

/// Stiffness / mass / optional potential matrices over a polynomial trial
/// space.
#[derive(Debug, Clone)]
pub struct GalerkinPencil {
    pub stiffness: SymmetricMatrix,
    pub mass: SymmetricMatrix,
    pub potential: Option<SymmetricMatrix>,
    pub meta: PencilMeta,
}

impl GalerkinPencil {
    /// hbar^2 K + P for the Schrodinger comparisons.
    pub fn schrodinger_stiffness(&self, hbar: f64) -> SymmetricMatrix {
        let p = self.potential.as_ref().expect("potential matrix present");
        let n = self.stiffness.dim();
        SymmetricMatrix::from_fn(n, |i, j| {
            hbar * hbar * self.stiffness.get(i, j) + p.get(i, j)
        })
    }
}

/// Measure table: gamma -> sum_{tau in measure} c_tau * moment(gamma + tau),
/// with measure terms bucketed by exponent parity.
struct MeasureTable {
    map: HashMap<MultiIndex, f64>,
}

impl MeasureTable {
    #[inline]
    fn get(&self, idx: &MultiIndex) -> f64 {
        *self.map.get(idx).unwrap_or(&0.0)
    }
}

fn parity_key(idx: &MultiIndex, n: usize) -> u16 {
    let mut k = 0u16;
    for (v, &e) in idx.iter().enumerate().take(n) {
        if e % 2 == 1 {
            k |= 1 << v;
        }
    }
    k
}

struct MomentCache {
    n: usize,
    ball: bool,
    map: HashMap<MultiIndex, f64>,
}

impl MomentCache {
    fn new(n: usize, ball: bool) -> Self {
        MomentCache { n, ball, map: HashMap::new() }
    }

    fn get(&mut self, idx: &MultiIndex) -> f64 {
        if let Some(&v) = self.map.get(idx) {
            return v;
        }
        let v = if self.ball {
            ball_moment(idx, self.n)
        } else {
            sphere_moment(idx, self.n)
        };
        self.map.insert(*idx, v);
        v
    }
}

fn add_indices(a: &MultiIndex, b: &MultiIndex) -> MultiIndex {
    let mut out = *a;
    for (x, y) in out.iter_mut().zip(b.iter()) {
        *x += y;
    }
    out
}

/// Builds the table of weighted moments of `measure` over all monomials of
/// degree <= pool_degree.
fn build_table(
    measure: &Poly,
    pool_degree: usize,
    n: usize,
    cache: &mut MomentCache,
) -> MeasureTable {
    // Parity buckets of the measure terms.
    let mut buckets: HashMap<u16, Vec<(MultiIndex, f64)>> = HashMap::new();
    for (idx, &c) in measure.terms() {
        buckets.entry(parity_key(idx, n)).or_default().push((*idx, c));
    }
    let pool = simplex(n, pool_degree);
    let mut map = HashMap::with_capacity(pool.len());
    for gamma in pool {
        let pk = parity_key(&gamma, n);
        let mut acc = 0.0;
        if let Some(terms) = buckets.get(&pk) {
            for (tau, c) in terms {
                acc += c * cache.get(&add_indices(&gamma, tau));
            }
        }
        map.insert(gamma, acc);
    }
    MeasureTable { map }
}

/// Sum over products of two small polynomials probed against a table:
/// sum c1 c2 table[idx1 + idx2].
#[inline]
fn pair_moment(a: &Poly, b: &Poly, table: &MeasureTable) -> f64 {
    let mut acc = 0.0;
    for (ia, ca) in a.terms() {
        for (ib, cb) in b.terms() {
            acc += ca * cb * table.get(&add_indices(ia, ib));
        }
    }
    acc
}

/// Integer power of the conformal factor required by dimension `dim`
/// divided by two; errors when the power is fractional (odd-dimensional
/// conformal problems need quadrature).
fn conformal_power(two_power: i64, what: &str) -> Result<usize> {
    if two_power % 2 != 0 || two_power < 0 {
        return Err(Error::NonPolynomial(format!(
            "{what} needs factor power {}/2, which is not a nonnegative integer",
            two_power
        )));
    }
    Ok((two_power / 2) as usize)
}

/// Assembles the (K, M, P) pencil for the metric of `form`, an optional
/// Schrodinger potential, and an optional conformal factor.
pub fn assemble(
    basis: &PolyBasis,
    form: &AdmissibleForm,
    potential: Option<&PotentialField>,
    conformal: Option<&PotentialField>,
    mode: AssemblyMode,
) -> Result<GalerkinPencil> {
    if basis.ambient.dim() != form.ambient.dim() {
        return Err(Error::BasisMismatch(format!(
            "basis dim {} vs form dim {}",
            basis.ambient.dim(),
            form.ambient.dim()
        )));
    }
    match mode {
        AssemblyMode::ExactMoment => assemble_exact(basis, form, potential, conformal),
        AssemblyMode::Quadrature { samples, seed } => {
            assemble_quadrature(basis, form, potential, conformal, samples, seed)
        }
    }
}

fn manifold_dim(basis: &PolyBasis) -> i64 {
    match basis.ambient.manifold {
        Manifold::Sphere => basis.ambient.dim() as i64 - 1,
        Manifold::Ball => basis.ambient.dim() as i64,
    }
}

fn assemble_exact(
    basis: &PolyBasis,
    form: &AdmissibleForm,
    potential: Option<&PotentialField>,
    conformal: Option<&PotentialField>,
) -> Result<GalerkinPencil> {
    let n = basis.ambient.dim();
    let nb = basis.len();
    let ball = matches!(basis.ambient.manifold, Manifold::Ball);
    let mdim = manifold_dim(basis);

    // Weights.
    let (kw, mw) = match conformal {
        None => (Poly::constant(n, 1.0), Poly::constant(n, 1.0)),
        Some(factor) => {
            let pk = conformal_power(mdim - 2, "conformal stiffness")?;
            let pm = conformal_power(mdim, "conformal mass")?;
            let phi = factor.to_poly(&basis.ambient);
            (phi.pow(pk), phi.pow(pm))
        }
    };
    let pw = potential.map(|pot| pot.to_poly(&basis.ambient).mul(&mw));

    // Scaled component functionals and verticals.
    let w_base = form.w_polys_unscaled();
    let verticals = form.vertical_polys();
    let r = form.torus_rank();
    let w_scaled: Vec<Vec<Poly>> = match form.scale_poly() {
        None => w_base.to_vec(),
        Some(alpha) => w_base
            .iter()
            .map(|wk| wk.iter().map(|c| c.mul(alpha)).collect())
            .collect(),
    };

    // Gradients (tangential for the sphere) and the vertical contractions.
    let grads = basis.gradients();
    let alphas: Vec<Vec<Poly>> = grads
        .iter()
        .map(|u| {
            (0..r)
                .map(|k| {
                    let mut acc = Poly::zero(n);
                    for (vc, uc) in verticals[k].iter().zip(u) {
                        if !vc.is_zero() && !uc.is_zero() {
                            acc = acc.add(&vc.mul(uc));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();

    // Degree bounds for the table pools.
    let du = grads
        .iter()
        .flat_map(|u| u.iter().map(|p| p.degree()))
        .max()
        .unwrap_or(0);
    let da = alphas
        .iter()
        .flat_map(|a| a.iter().map(|p| p.degree()))
        .max()
        .unwrap_or(0);
    let df = basis.funcs.iter().map(|f| f.degree()).max().unwrap_or(0);

    let mut cache = MomentCache::new(n, ball);

    // Base stiffness table (weight only) and mass/potential tables.
    let table_base = build_table(&kw, 2 * du, n, &mut cache);
    let table_mass = build_table(&mw, 2 * df, n, &mut cache);
    let table_pot = pw.as_ref().map(|p| build_table(p, 2 * df, n, &mut cache));

    // Per (k, component) tables for the cross terms, measure = w_k[c] * kw.
    let mut tables_w: Vec<Vec<MeasureTable>> = Vec::with_capacity(r);
    for wk in &w_scaled {
        let mut per_c = Vec::with_capacity(n);
        for c in 0..n {
            let measure = wk[c].mul(&kw);
            per_c.push(build_table(&measure, du + da, n, &mut cache));
        }
        tables_w.push(per_c);
    }
    // Per (k, l) tables for the Gram terms, measure = <w_k, w_l> * kw.
    let mut tables_ww: Vec<Vec<MeasureTable>> = Vec::with_capacity(r);
    for k in 0..r {
        let mut per_l = Vec::with_capacity(r);
        for l in 0..r {
            let mut gram = Poly::zero(n);
            for c in 0..n {
                if !w_scaled[k][c].is_zero() && !w_scaled[l][c].is_zero() {
                    gram = gram.add(&w_scaled[k][c].mul(&w_scaled[l][c]));
                }
            }
            per_l.push(build_table(&gram.mul(&kw), 2 * da, n, &mut cache));
        }
        tables_ww.push(per_l);
    }

    // Entry loop: parallel over (i, j) pairs, reads only.
    let pairs: Vec<(usize, usize)> =
        (0..nb).flat_map(|i| (i..nb).map(move |j| (i, j))).collect();
    let entries: Vec<(usize, usize, f64, f64, Option<f64>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            // Stiffness.
            let mut k_val = 0.0;
            for c in 0..n {
                if !grads[i][c].is_zero() && !grads[j][c].is_zero() {
                    k_val += pair_moment(&grads[i][c], &grads[j][c], &table_base);
                }
            }
            for k in 0..r {
                // b_ik a_jk terms: sum_c m(u_i[c] * w_k[c] * a_jk * kw).
                let mut cross = 0.0;
                for c in 0..n {
                    if !grads[i][c].is_zero() && !alphas[j][k].is_zero() {
                        cross += pair_moment(&grads[i][c], &alphas[j][k], &tables_w[k][c]);
                    }
                    if !grads[j][c].is_zero() && !alphas[i][k].is_zero() {
                        cross += pair_moment(&grads[j][c], &alphas[i][k], &tables_w[k][c]);
                    }
                }
                k_val -= cross;
            }
            for k in 0..r {
                for l in 0..r {
                    if !alphas[i][k].is_zero() && !alphas[j][l].is_zero() {
                        k_val += pair_moment(&alphas[i][k], &alphas[j][l], &tables_ww[k][l]);
                    }
                }
            }
            // Mass and potential.
            let m_val = pair_moment(&basis.funcs[i], &basis.funcs[j], &table_mass);
            let p_val = table_pot
                .as_ref()
                .map(|t| pair_moment(&basis.funcs[i], &basis.funcs[j], t));
            (i, j, k_val, m_val, p_val)
        })
        .collect();

    let mut stiffness = SymmetricMatrix::zeros(nb);
    let mut mass = SymmetricMatrix::zeros(nb);
    let mut pot = potential.map(|_| SymmetricMatrix::zeros(nb));
    for (i, j, kv, mv, pv) in entries {
        stiffness.set(i, j, kv);
        mass.set(i, j, mv);
        if let (Some(p), Some(pv)) = (pot.as_mut(), pv) {
            p.set(i, j, pv);
        }
    }
    Ok(GalerkinPencil {
        stiffness,
        mass,
        potential: pot,
        meta: PencilMeta {
            mode: AssemblyMode::ExactMoment,
            degree: basis.degree,
            bc: basis.bc,
            basis_len: nb,
            conformal: conformal.is_some(),
        },
    })
}

/// Quadrature assembly over a seed-fixed antithetic point set shared by all
/// pencils built with the same (samples, seed). Used for the conformal
/// problems on odd-dimensional spheres where the factor powers are
/// fractional.
///
/// Every integrand entry pairs two basis monomials through parity-even
/// weights, so on the antithetic pair {x, -x} the mixed-parity entries
/// cancel identically and the equal-parity entries double: one evaluation
/// per pair suffices, accumulated into parity-ordered blocks.
fn assemble_quadrature(
    basis: &PolyBasis,
    form: &AdmissibleForm,
    potential: Option<&PotentialField>,
    conformal: Option<&PotentialField>,
    samples: usize,
    seed: u64,
) -> Result<GalerkinPencil> {
    let n = basis.ambient.dim();
    let nb = basis.len();
    let mdim = manifold_dim(basis);
    let sphere = matches!(basis.ambient.manifold, Manifold::Sphere);
    if !sphere {
        return Err(Error::InvalidConfig(
            "quadrature mode is provided for sphere problems".into(),
        ));
    }
    let kpow = (mdim as f64 - 2.0) / 2.0;
    let mpow = mdim as f64 / 2.0;

    let total_area = sphere_moment(&[0u8; crate::poly::MAX_VARS], n);
    let pairs_total = samples.div_ceil(2);
    let weight = total_area / (2 * pairs_total) as f64;

    // Parity-ordered permutation: even-degree monomials first. perm[slot] =
    // original basis index.
    let degree_of = |idx: usize| -> usize {
        basis.indices[idx].iter().map(|&e| e as usize).sum()
    };
    let mut perm: Vec<usize> = (0..nb).filter(|&i| degree_of(i) % 2 == 0).collect();
    let n_even = perm.len();
    perm.extend((0..nb).filter(|&i| degree_of(i) % 2 == 1));

    // Compiled monomials in permuted order.
    let compiled: Vec<Vec<(usize, u8)>> = perm
        .iter()
        .map(|&i| {
            let mut mono = Vec::new();
            for (v, &e) in basis.indices[i].iter().enumerate().take(n) {
                if e > 0 {
                    mono.push((v, e));
                }
            }
            mono
        })
        .collect();
    let degs: Vec<usize> = perm.iter().map(|&i| degree_of(i)).collect();

    let r = form.torus_rank();
    let w_comp: Vec<Vec<CompiledPoly>> = form
        .w_polys()
        .iter()
        .map(|wk| wk.iter().map(CompiledPoly::from_poly).collect())
        .collect();
    let v_comp: Vec<Vec<CompiledPoly>> = form
        .vertical_polys()
        .iter()
        .map(|vk| vk.iter().map(CompiledPoly::from_poly).collect())
        .collect();
    // Power tables must cover the basis exponents and every compiled term.
    let max_exp = w_comp
        .iter()
        .chain(v_comp.iter())
        .flatten()
        .map(|p| p.max_exp())
        .max()
        .unwrap_or(0)
        .max(basis.degree)
        .max(1);

    let block_pairs = 2048usize;
    let nblocks = pairs_total.div_ceil(block_pairs);
    let partials: Vec<(Mat, Mat, Option<Mat>)> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = SampleRng::new(seed.wrapping_add(b as u64));
            let mut kacc = Mat::zeros(nb, nb);
            let mut macc = Mat::zeros(nb, nb);
            let mut pacc = potential.map(|_| Mat::zeros(nb, nb));
            let count = block_pairs.min(pairs_total - b * block_pairs);
            let mut point = vec![0.0; n];
            let mut pw = vec![0.0; n * (max_exp + 1)];
            let mut fvals = vec![0.0; nb];
            // Q stored transposed: row c holds q_i[c] for all i.
            let mut qt = vec![0.0; n * nb];
            for _ in 0..count {
                let raw = rng.vector(n);
                let nor = crate::numkit::norm(&raw);
                for (pd, rv) in point.iter_mut().zip(&raw) {
                    *pd = rv / nor;
                }
                // Power tables.
                for v in 0..n {
                    pw[v * (max_exp + 1)] = 1.0;
                    for e in 1..=max_exp {
                        pw[v * (max_exp + 1) + e] = pw[v * (max_exp + 1) + e - 1] * point[v];
                    }
                }
                // Values and tangential gradients (monomials are homogeneous,
                // so x . grad f = deg * f).
                for (slot, mono) in compiled.iter().enumerate() {
                    let mut val = 1.0;
                    for &(v, e) in mono {
                        val *= pw[v * (max_exp + 1) + e as usize];
                    }
                    fvals[slot] = val;
                    let radial = degs[slot] as f64 * val;
                    for c in 0..n {
                        qt[c * nb + slot] = -point[c] * radial;
                    }
                    for &(v, e) in mono {
                        let mut g = e as f64;
                        for &(v2, e2) in mono {
                            g *= if v2 == v {
                                pw[v2 * (max_exp + 1) + (e2 - 1) as usize]
                            } else {
                                pw[v2 * (max_exp + 1) + e2 as usize]
                            };
                        }
                        qt[v * nb + slot] += g;
                    }
                }
                // (I - Lambda^T): q -= sum_k w_k (V_k . q).
                for k in 0..r {
                    let wv: Vec<f64> = w_comp[k].iter().map(|p| p.eval(&pw, max_exp)).collect();
                    let vv: Vec<f64> = v_comp[k].iter().map(|p| p.eval(&pw, max_exp)).collect();
                    for slot in 0..nb {
                        let mut dot = 0.0;
                        for c in 0..n {
                            if vv[c] != 0.0 {
                                dot += vv[c] * qt[c * nb + slot];
                            }
                        }
                        if dot != 0.0 {
                            for c in 0..n {
                                if wv[c] != 0.0 {
                                    qt[c * nb + slot] -= wv[c] * dot;
                                }
                            }
                        }
                    }
                }
                // Weights at this point (even in x, shared by the pair).
                let (wk_conf, wm_conf) = match conformal {
                    None => (1.0, 1.0),
                    Some(f) => {
                        let v = f.eval(&basis.ambient, &point);
                        (v.powf(kpow), v.powf(mpow))
                    }
                };
                // The antithetic pair contributes 2 * weight on equal-parity
                // blocks and zero elsewhere.
                let wk_eff = 2.0 * weight * wk_conf;
                let wm_eff = 2.0 * weight * wm_conf;
                for c in 0..n {
                    let row = &qt[c * nb..(c + 1) * nb];
                    block_outer(&mut kacc, row, wk_eff, n_even, nb);
                }
                block_outer(&mut macc, &fvals, wm_eff, n_even, nb);
                if let (Some(p), Some(potf)) = (pacc.as_mut(), potential) {
                    let pv = potf.eval(&basis.ambient, &point) * wm_eff;
                    block_outer(p, &fvals, pv, n_even, nb);
                }
            }
            (kacc, macc, pacc)
        })
        .collect();

    // Ordered serial reduction keeps bit-identical results at any thread
    // count.
    let mut ktot = Mat::zeros(nb, nb);
    let mut mtot = Mat::zeros(nb, nb);
    let mut ptot = potential.map(|_| Mat::zeros(nb, nb));
    for (k, m, p) in partials {
        ktot = ktot.add(&k);
        mtot = mtot.add(&m);
        if let (Some(total), Some(part)) = (ptot.as_mut(), p) {
            *total = total.add(&part);
        }
    }
    // Undo the parity permutation: entry (i, j) of the result comes from
    // slot pair (inv[i], inv[j]).
    let mut inv = vec![0usize; nb];
    for (slot, &orig) in perm.iter().enumerate() {
        inv[orig] = slot;
    }
    let unperm = |m: &Mat| {
        SymmetricMatrix::from_fn(nb, |i, j| {
            let (a, b) = (inv[i], inv[j]);
            m[(a.min(b), a.max(b))]
        })
    };
    Ok(GalerkinPencil {
        stiffness: unperm(&ktot),
        mass: unperm(&mtot),
        potential: ptot.as_ref().map(unperm),
        meta: PencilMeta {
            mode: AssemblyMode::Quadrature { samples: 2 * pairs_total, seed },
            degree: basis.degree,
            bc: basis.bc,
            basis_len: nb,
            conformal: conformal.is_some(),
        },
    })
}

/// Accumulates w * v v^T on the two equal-parity diagonal blocks (upper
/// triangle only).
#[inline]
fn block_outer(acc: &mut Mat, v: &[f64], w: f64, n_even: usize, nb: usize) {
    for i in 0..n_even {
        let vi = w * v[i];
        if vi == 0.0 {
            continue;
        }
        for j in i..n_even {
            acc[(i, j)] += vi * v[j];
        }
    }
    for i in n_even..nb {
        let vi = w * v[i];
        if vi == 0.0 {
            continue;
        }
        for j in i..nb {
            acc[(i, j)] += vi * v[j];
        }
    }
}

/// Flat-term polynomial for fast pointwise evaluation against power tables.
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u8)>)>,
}

impl CompiledPoly {
    fn from_poly(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(idx, &c)| {
                let mono: Vec<(usize, u8)> = idx
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(v, &e)| (v, e))
                    .collect();
                (c, mono)
            })
            .collect();
        CompiledPoly { terms }
    }

    fn max_exp(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(_, mono)| mono.iter().map(|&(_, e)| e as usize))
            .max()
            .unwrap_or(0)
    }

    #[inline]
    fn eval(&self, pw: &[f64], max_exp: usize) -> f64 {
        let stride = max_exp + 1;
        let mut acc = 0.0;
        for (c, mono) in &self.terms {
            let mut t = *c;
            for &(v, e) in mono {
                t *= pw[v * stride + e as usize];
            }
            acc += t;
        }
        acc
    }
}

/// Pencil spectrum comparison certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub pass: bool,
    /// max_i |a_i - b_i| / max(|a_i|, |b_i|, 1).
    pub max_rel_gap: f64,
    pub rel_tol: f64,
    pub deflated_dim: usize,
    pub spectrum_a: Vec<f64>,
    pub spectrum_b: Vec<f64>,
}

pub const DEFAULT_DEFLATION_TOL: f64 = 1e-10;

/// Solves both generalized problems and compares the sorted spectra
/// entrywise after deflation.
pub fn compare_spectra(
    ka: &SymmetricMatrix,
    ma: &SymmetricMatrix,
    kb: &SymmetricMatrix,
    mb: &SymmetricMatrix,
    rel_tol: f64,
) -> Result<SpectrumComparison> {
    if ka.dim() != kb.dim() {
        return Err(Error::BasisMismatch(format!(
            "pencil dims {} vs {}",
            ka.dim(),
            kb.dim()
        )));
    }
    let sa = crate::numkit::pencil_eigen(ka, ma, DEFAULT_DEFLATION_TOL)?;
    let sb = crate::numkit::pencil_eigen(kb, mb, DEFAULT_DEFLATION_TOL)?;
    if sa.deflated_dim != sb.deflated_dim {
        return Ok(SpectrumComparison {
            pass: false,
            max_rel_gap: f64::INFINITY,
            rel_tol,
            deflated_dim: sa.deflated_dim.min(sb.deflated_dim),
            spectrum_a: sa.eigenvalues,
            spectrum_b: sb.eigenvalues,
        });
    }
    let mut gap: f64 = 0.0;
    for (a, b) in sa.eigenvalues.iter().zip(&sb.eigenvalues) {
        gap = gap.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
    }
    Ok(SpectrumComparison {
        pass: gap <= rel_tol,
        max_rel_gap: gap,
        rel_tol,
        deflated_dim: sa.deflated_dim,
        spectrum_a: sa.eigenvalues,
        spectrum_b: sb.eigenvalues,
    })
}
