//! Minimization over orthogonal/unitary conjugations, the common engine
//! behind the equivalence search and the curvature-form equation searches.
//!
//! The core problem is
//!
//! ```text
//!   min_{A in O(n)}  sum_i || T_i - A S_i A^T ||_F^2
//! ```
//!
//! solved per restart by alternating a polar (Procrustes-type) update of the
//! linearized objective with backtracking Riemannian gradient steps; the
//! polar step is only accepted when it decreases the objective, so every
//! restart is monotone. Restarts are Haar-seeded and merged by a
//! deterministic min-reduction keyed on (residual, restart index).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::numkit::{sym_eigen, C64, CMat, Mat, SymmetricMatrix};

/// Orthogonal polar factor of `m` via the symmetric eigendecomposition of
/// m^T m (adequate for the small, generically full-rank inputs here).
pub fn polar_orthogonal(m: &Mat) -> Mat {
    let n = m.rows();
    let mtm = SymmetricMatrix::from_mat(&m.transpose().matmul(m));
    let (w, v) = sym_eigen(&mtm).expect("finite input");
    let mut inv_sqrt = Mat::zeros(n, n);
    let floor = w.iter().cloned().fold(0.0_f64, f64::max) * 1e-14 + f64::MIN_POSITIVE;
    for i in 0..n {
        inv_sqrt[(i, i)] = 1.0 / w[i].max(floor).sqrt();
    }
    m.matmul(&v).matmul(&inv_sqrt).matmul(&v.transpose())
}

/// Cayley retraction: (I - X/2)^{-1} (I + X/2) for skew X, orthogonal and in
/// the identity component.
fn cayley(x: &Mat) -> Mat {
    let n = x.rows();
    let half = x.scale(0.5);
    let a = Mat::identity(n).sub(&half);
    let b = Mat::identity(n).add(&half);
    a.inverse().expect("I - X/2 invertible for small steps").matmul(&b)
}

fn objective(targets: &[Mat], sources: &[Mat], a: &Mat) -> f64 {
    let at = a.transpose();
    targets
        .iter()
        .zip(sources)
        .map(|(t, s)| t.sub(&a.matmul(s).matmul(&at)).frobenius().powi(2))
        .sum()
}

fn euclidean_grad(targets: &[Mat], sources: &[Mat], a: &Mat) -> Mat {
    let n = a.rows();
    let at = a.transpose();
    let mut g = Mat::zeros(n, n);
    for (t, s) in targets.iter().zip(sources) {
        let r = t.sub(&a.matmul(s).matmul(&at));
        // d/dA ||T - A S A^T||^2 = -2 (R A S^T + R^T A S)
        let term = r.matmul(a).matmul(&s.transpose()).add(&r.transpose().matmul(a).matmul(s));
        g = g.add(&term.scale(-2.0));
    }
    g
}

/// Polar update for the bilinear part: A+ = polar( sum T A S^T + T^T A S ).
fn polar_step(targets: &[Mat], sources: &[Mat], a: &Mat) -> Mat {
    let n = a.rows();
    let mut m = Mat::zeros(n, n);
    for (t, s) in targets.iter().zip(sources) {
        m = m.add(&t.matmul(a).matmul(&s.transpose()));
        m = m.add(&t.transpose().matmul(a).matmul(s));
    }
    polar_orthogonal(&m)
}

/// Local minimization from `a0`; returns (objective, minimizer).
pub fn conj_descend(targets: &[Mat], sources: &[Mat], a0: Mat, max_iter: usize) -> (f64, Mat) {
    let mut a = a0;
    let mut f = objective(targets, sources, &a);
    for _ in 0..max_iter {
        // Try the polar accelerator first; reject it when the gradient
        // matrix is near-singular and the polar factor degenerates.
        let cand = polar_step(targets, sources, &a);
        if cand.orthogonality_defect() <= 1e-12 {
            let fc = objective(targets, sources, &cand);
            if fc < f - 1e-300 {
                a = cand;
                f = fc;
                continue;
            }
        }
        // Riemannian gradient step with backtracking.
        let g = euclidean_grad(targets, sources, &a);
        let gat = g.matmul(&a.transpose());
        let xi = gat.sub(&gat.transpose()).scale(0.5);
        let gnorm = xi.frobenius();
        if gnorm <= 1e-14 * (1.0 + f) {
            break;
        }
        let mut eta = 1.0 / (1.0 + gnorm);
        let mut improved = false;
        for _ in 0..40 {
            let step = cayley(&xi.scale(-eta));
            let cand = step.matmul(&a);
            let fc = objective(targets, sources, &cand);
            if fc < f {
                a = cand;
                f = fc;
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            break;
        }
        if f <= 1e-26 {
            break;
        }
    }
    (f, a)
}

/// Global search over O(n): Haar restarts covering both components.
/// Returns (best objective, best A); deterministic in `seed`.
pub fn conj_min(
    targets: &[Mat],
    sources: &[Mat],
    n: usize,
    restarts: usize,
    seed: u64,
    max_iter: usize,
) -> (f64, Mat) {
    let runs: Vec<(f64, usize, Mat)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut a0 = crate::numkit::haar_orthogonal(n, seed.wrapping_add(r as u64 * 7919));
            // Half the restarts explore the opposite component.
            if r % 2 == 1 && a0.det() > 0.0 {
                for i in 0..n {
                    a0[(i, 0)] = -a0[(i, 0)];
                }
            } else if r % 2 == 0 && a0.det() < 0.0 {
                for i in 0..n {
                    a0[(i, 0)] = -a0[(i, 0)];
                }
            }
            let (f, a) = conj_descend(targets, sources, a0, max_iter);
            (f, r, a)
        })
        .collect();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
        .expect("at least one restart");
    (best.0, best.2)
}

/// Joint Levenberg polish over (E, phi) for objectives of the shape
/// sum_j || T_j - E (cos phi P_j + sin phi Q_j) E^T ||^2: parametrizes E
/// multiplicatively by a Cayley factor and solves the stacked least-squares
/// locally. Rescues the alternating scheme from its slow crawl along curved
/// valleys.
pub fn joint_conj_angle_polish(
    targets: &[Mat],
    p: &[Mat],
    q: &[Mat],
    e0: Mat,
    phi0: f64,
    max_iter: usize,
) -> (f64, Mat, f64) {
    let n = e0.rows();
    let k = n * (n - 1) / 2;
    let nres = targets.len() * n * n;
    let residual = |e: &Mat, phi: f64, out: &mut Vec<f64>| {
        out.clear();
        let et = e.transpose();
        let (s, c) = phi.sin_cos();
        for ((t, pj), qj) in targets.iter().zip(p).zip(q) {
            let src = pj.scale(c).add(&qj.scale(s));
            let r = t.sub(&e.matmul(&src).matmul(&et));
            out.extend_from_slice(r.data());
        }
    };
    let skew_from = |d: &[f64]| {
        let mut x = Mat::zeros(n, n);
        let mut idx = 0;
        for a in 0..n {
            for b in a + 1..n {
                x[(a, b)] = d[idx];
                x[(b, a)] = -d[idx];
                idx += 1;
            }
        }
        x
    };
    let mut e = e0;
    let mut phi = phi0;
    let mut r = Vec::with_capacity(nres);
    residual(&e, phi, &mut r);
    let mut fval: f64 = r.iter().map(|x| x * x).sum();
    let mut mu = 1e-6;
    let h = 1e-6;
    let mut rp = Vec::with_capacity(nres);
    let mut rm = Vec::with_capacity(nres);
    for _ in 0..max_iter {
        if fval <= 1e-28 {
            break;
        }
        let mut jac = Mat::zeros(nres, k + 1);
        for cidx in 0..=k {
            let (ep, phip, em, phim) = if cidx < k {
                let mut d = vec![0.0; k];
                d[cidx] = h;
                let step_p = cayley(&skew_from(&d));
                d[cidx] = -h;
                let step_m = cayley(&skew_from(&d));
                (step_p.matmul(&e), phi, step_m.matmul(&e), phi)
            } else {
                (e.clone(), phi + h, e.clone(), phi - h)
            };
            residual(&ep, phip, &mut rp);
            residual(&em, phim, &mut rm);
            for row in 0..nres {
                jac[(row, cidx)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let jt = jac.transpose();
        let jtj = jt.matmul(&jac);
        let jtr = jt.matvec(&r);
        let mut accepted = false;
        for _try in 0..10 {
            let mut lhs = jtj.clone();
            for i in 0..=k {
                lhs[(i, i)] += mu * (1.0 + lhs[(i, i)]);
            }
            let delta = match lhs.inverse() {
                Ok(inv) => inv.matvec(&jtr),
                Err(_) => break,
            };
            let step = cayley(&skew_from(&delta[..k].iter().map(|x| -x).collect::<Vec<_>>()));
            let e_cand = step.matmul(&e);
            let phi_cand = phi - delta[k];
            let mut rc = Vec::with_capacity(nres);
            residual(&e_cand, phi_cand, &mut rc);
            let fc: f64 = rc.iter().map(|x| x * x).sum();
            if fc < fval {
                e = e_cand;
                phi = phi_cand;
                r = rc;
                fval = fc;
                mu = (mu * 0.25).max(1e-14);
                accepted = true;
                break;
            }
            mu *= 8.0;
        }
        if !accepted {
            break;
        }
    }
    (fval, e, phi)
}

// Complex (unitary) variant, for su(m) families.

fn c_objective(targets: &[CMat], sources: &[CMat], u: &CMat) -> f64 {
    let ut = u.transpose_conj();
    targets
        .iter()
        .zip(sources)
        .map(|(t, s)| t.sub(&u.matmul(s).matmul(&ut)).frobenius().powi(2))
        .sum()
}

fn c_polar(m: &CMat) -> CMat {
    // Polar factor via the real embedding: the unitary polar factor of M is
    // recovered from the orthogonal polar factor of its real 2n x 2n block
    // form (the embedding is a *-isomorphism onto its image).
    let real = m.to_real_block();
    let p = polar_orthogonal(&real);
    let n = m.rows();
    CMat::from_fn(n, n, |i, j| Complex64::new(p[(i, j)], p[(i + n, j)]))
}

fn c_grad(targets: &[CMat], sources: &[CMat], u: &CMat) -> CMat {
    let n = u.rows();
    let ut = u.transpose_conj();
    let mut g = CMat::zeros(n, n);
    for (t, s) in targets.iter().zip(sources) {
        let r = t.sub(&u.matmul(s).matmul(&ut));
        let term = r
            .matmul(u)
            .matmul(&s.transpose_conj())
            .add(&r.transpose_conj().matmul(u).matmul(s));
        g = g.add(&term.scale(C64::new(-2.0, 0.0)));
    }
    g
}

fn c_cayley(x: &CMat) -> CMat {
    // (I - X/2)^{-1} (I + X/2) for skew-Hermitian X, via the real embedding.
    let n = x.rows();
    let real = x.to_real_block();
    let c = cayley(&real);
    CMat::from_fn(n, n, |i, j| Complex64::new(c[(i, j)], c[(i + n, j)]))
}

pub fn c_conj_descend(
    targets: &[CMat],
    sources: &[CMat],
    u0: CMat,
    max_iter: usize,
) -> (f64, CMat) {
    let mut u = u0;
    let mut f = c_objective(targets, sources, &u);
    for _ in 0..max_iter {
        let n = u.rows();
        let mut m = CMat::zeros(n, n);
        for (t, s) in targets.iter().zip(sources) {
            m = m.add(&t.matmul(&u).matmul(&s.transpose_conj()));
            m = m.add(&t.transpose_conj().matmul(&u).matmul(s));
        }
        let cand = c_polar(&m);
        if cand.unitarity_defect() <= 1e-12 {
            let fc = c_objective(targets, sources, &cand);
            if fc < f - 1e-300 {
                u = cand;
                f = fc;
                continue;
            }
        }
        let g = c_grad(targets, sources, &u);
        let gut = g.matmul(&u.transpose_conj());
        let xi = gut.sub(&gut.transpose_conj()).scale(C64::new(0.5, 0.0));
        let gnorm = xi.frobenius();
        if gnorm <= 1e-14 * (1.0 + f) {
            break;
        }
        let mut eta = 1.0 / (1.0 + gnorm);
        let mut improved = false;
        for _ in 0..40 {
            let step = c_cayley(&xi.scale(C64::new(-eta, 0.0)));
            let cand = step.matmul(&u);
            let fc = c_objective(targets, sources, &cand);
            if fc < f {
                u = cand;
                f = fc;
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if !improved || f <= 1e-26 {
            break;
        }
    }
    (f, u)
}
