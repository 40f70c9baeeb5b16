//! Self-contained dense linear algebra: symmetric eigensolver (cyclic
//! Jacobi), symmetric-definite pencil reduction with kernel deflation,
//! singular values / nullspace dimension, Pfaffian, Haar-random
//! orthogonal/unitary sampling.
//!
//! Jacobi is chosen over faster tridiagonalization schemes because it gives
//! high relative accuracy at the moderate dimensions (<= ~500) used by the
//! pencil comparisons, and because its sweep order is trivially
//! deterministic.

mod cmat;
mod mat;

pub use cmat::{C64, CMat};
pub use mat::{dot, norm, Mat};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Symmetric matrix with packed lower-triangular storage, so that
/// `a(i,j) == a(j,i)` holds exactly by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    dim: usize,
    /// Row-major packed lower triangle: entry (i,j), i >= j, at i*(i+1)/2 + j.
    packed: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix { dim, packed: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymmetricMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from a dense matrix, averaging the off-diagonal pair (exact for
    /// inputs that are already symmetric).
    pub fn from_mat(a: &Mat) -> Self {
        assert_eq!(a.rows(), a.cols());
        SymmetricMatrix::from_fn(a.rows(), |i, j| {
            if i == j {
                a[(i, i)]
            } else {
                0.5 * (a[(i, j)] + a[(j, i)])
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.packed[r * (r + 1) / 2 + c]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.packed[r * (r + 1) / 2 + c] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|x| x.is_finite())
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn frobenius(&self) -> f64 {
        self.to_mat().frobenius()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

/// Eigenvalues of a symmetric-definite pencil after deflating the (numerical)
/// kernel of the mass matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilSpectrum {
    /// Ascending generalized eigenvalues, one per retained mass direction.
    pub eigenvalues: Vec<f64>,
    /// Dimension after deflation; equals `eigenvalues.len()`.
    pub deflated_dim: usize,
    /// Relative threshold used against lambda_max(M).
    pub deflation_tolerance: f64,
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi.
///
/// Returns ascending eigenvalues and the orthonormal eigenvector matrix `V`
/// (columns), with `A = V diag(w) V^T`.
pub fn sym_eigen(a: &SymmetricMatrix) -> Result<(Vec<f64>, Mat)> {
    if !a.is_finite() {
        return Err(Error::NonFinite { op: "sym_eigen" });
    }
    let n = a.dim();
    let mut m = a.to_mat();
    let mut v = Mat::identity(n);
    if n <= 1 {
        return Ok(((0..n).map(|_| m[(0, 0)]).collect(), v));
    }

    let off = |m: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt()
    };
    let scale = m.frobenius().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        if off(&m) <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if apq.abs() <= 1e-18 * (app.abs() + aqq.abs()).max(f64::MIN_POSITIVE) {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                // Classic stable rotation choice (Golub & Van Loan).
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    idx.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap().then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| diag[i]).collect();
    let mut vec_sorted = Mat::zeros(n, n);
    for (new_col, &old_col) in idx.iter().enumerate() {
        for r in 0..n {
            vec_sorted[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok((eigenvalues, vec_sorted))
}

/// Generalized eigenvalues of `(K, M)` restricted to the M-positive subspace.
///
/// Directions of `M` with eigenvalue <= `deflate_tol * lambda_max(M)` are
/// dropped, the remainder is Cholesky-reduced (trivial in the diagonalized
/// mass basis) and a standard symmetric problem is solved.
pub fn pencil_eigen(
    k: &SymmetricMatrix,
    m: &SymmetricMatrix,
    deflate_tol: f64,
) -> Result<PencilSpectrum> {
    if k.dim() != m.dim() {
        return Err(Error::DimMismatch {
            op: "pencil_eigen",
            detail: format!("K dim {} vs M dim {}", k.dim(), m.dim()),
        });
    }
    let (mw, mv) = sym_eigen(m)?;
    let lmax = mw.iter().cloned().fold(0.0_f64, f64::max);
    if let Some(&min) = mw.first() {
        if min < -deflate_tol * lmax.max(f64::MIN_POSITIVE) {
            return Err(Error::MassNotPsd { min_eig: min });
        }
    }
    let kept: Vec<usize> = (0..mw.len()).filter(|&i| mw[i] > deflate_tol * lmax).collect();
    let dim = kept.len();
    if dim == 0 {
        return Ok(PencilSpectrum {
            eigenvalues: vec![],
            deflated_dim: 0,
            deflation_tolerance: deflate_tol,
        });
    }
    // B = M-eigenvectors scaled by 1/sqrt(eigenvalue); reduced K' = B^T K B.
    let n = k.dim();
    let kd = k.to_mat();
    let mut b = Mat::zeros(n, dim);
    for (c, &i) in kept.iter().enumerate() {
        let s = 1.0 / mw[i].sqrt();
        for r in 0..n {
            b[(r, c)] = mv[(r, i)] * s;
        }
    }
    let kb = kd.matmul(&b);
    let reduced_full = b.transpose().matmul(&kb);
    let reduced = SymmetricMatrix::from_mat(&reduced_full);
    let (eigenvalues, _) = sym_eigen(&reduced)?;
    Ok(PencilSpectrum { eigenvalues, deflated_dim: dim, deflation_tolerance: deflate_tol })
}

/// Singular values (descending) by one-sided Hestenes Jacobi; high relative
/// accuracy, which the rank decisions in the centralizer checks rely on.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    let n = a.cols();
    let mut u = a.clone();
    if n == 0 {
        return vec![];
    }
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for r in 0..u.rows() {
                    let up = u[(r, p)];
                    let uq = u[(r, q)];
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma.abs() <= 1e-17 * (alpha * beta).sqrt().max(f64::MIN_POSITIVE) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for r in 0..u.rows() {
                    let up = u[(r, p)];
                    let uq = u[(r, q)];
                    u[(r, p)] = c * up - s * uq;
                    u[(r, q)] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|j| (0..u.rows()).map(|r| u[(r, j)] * u[(r, j)]).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Number of singular values <= `tol * sigma_max`; the zero matrix maps to
/// the full column count.
pub fn nullspace_dim(rows: &Mat, tol: f64) -> usize {
    let sv = singular_values(rows);
    let smax = sv.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return rows.cols();
    }
    sv.iter().filter(|&&s| s <= tol * smax).count()
}

fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // Box-Muller; u clamped away from 0 to keep ln finite.
    let u: f64 = rng.random::<f64>().max(1e-300);
    let v: f64 = rng.random::<f64>();
    let r = (-2.0 * u.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * v;
    (r * t.cos(), r * t.sin())
}

fn gaussian_mat(n: usize, rng: &mut ChaCha8Rng) -> Mat {
    let mut g = Mat::zeros(n, n);
    let mut stash: Option<f64> = None;
    for i in 0..n {
        for j in 0..n {
            let x = match stash.take() {
                Some(v) => v,
                None => {
                    let (a, b) = normal_pair(rng);
                    stash = Some(b);
                    a
                }
            };
            g[(i, j)] = x;
        }
    }
    g
}

/// QR by modified Gram-Schmidt with positive diagonal of R; on Gaussian
/// input this samples the Haar measure on O(n).
fn qr_orthonormalize(mut g: Mat) -> Mat {
    let n = g.rows();
    for j in 0..n {
        for k in 0..j {
            let col_k = g.col(k);
            let col_j = g.col(j);
            let r = dot(&col_k, &col_j);
            for i in 0..n {
                g[(i, j)] -= r * col_k[i];
            }
        }
        let nrm = norm(&g.col(j));
        for i in 0..n {
            g[(i, j)] /= nrm;
        }
    }
    g
}

/// Haar-random orthogonal matrix (deterministic in `seed`).
pub fn haar_orthogonal(dim: usize, seed: u64) -> Mat {
    assert!(dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    qr_orthonormalize(gaussian_mat(dim, &mut rng))
}

/// Haar-random special orthogonal matrix: det forced to +1 by flipping the
/// sign of the last column if needed.
pub fn haar_special_orthogonal(dim: usize, seed: u64) -> Mat {
    let mut q = haar_orthogonal(dim, seed);
    if q.det() < 0.0 {
        for i in 0..dim {
            q[(i, dim - 1)] = -q[(i, dim - 1)];
        }
    }
    q
}

/// Haar-random unitary matrix (complex QR of a complex Gaussian).
pub fn haar_unitary(dim: usize, seed: u64) -> CMat {
    assert!(dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let (a, b) = normal_pair(&mut rng);
            g[(i, j)] = C64::new(a, b);
        }
    }
    // Modified Gram-Schmidt over C.
    for j in 0..dim {
        for k in 0..j {
            let mut r = C64::new(0.0, 0.0);
            for i in 0..dim {
                r += g[(i, k)].conj() * g[(i, j)];
            }
            for i in 0..dim {
                let v = r * g[(i, k)];
                g[(i, j)] -= v;
            }
        }
        let nrm = (0..dim).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            g[(i, j)] /= nrm;
        }
    }
    g
}

/// Haar-random special unitary matrix: last column scaled by det^{-1}.
pub fn haar_special_unitary(dim: usize, seed: u64) -> CMat {
    let mut q = haar_unitary(dim, seed);
    let d = q.det();
    let phase = d / d.norm();
    for i in 0..dim {
        let v = q[(i, dim - 1)] / phase;
        q[(i, dim - 1)] = v;
    }
    q
}

/// Pfaffian of an even-dimensional skew-symmetric matrix by skew elimination
/// (Parlett-Reid style) with partial pivoting.
pub fn pfaffian(a: &Mat) -> f64 {
    let n = a.rows();
    assert_eq!(n, a.cols());
    if n % 2 != 0 {
        return 0.0;
    }
    let mut m = a.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k < n {
        // Pivot: largest |m[(k, j)]|, j > k.
        let mut piv = k + 1;
        let mut best = 0.0;
        for j in k + 1..n {
            let v = m[(k, j)].abs();
            if v > best {
                best = v;
                piv = j;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != k + 1 {
            // Swap rows and columns piv <-> k+1; each pair swap flips the sign.
            for j in 0..n {
                let t = m[(k + 1, j)];
                m[(k + 1, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            for i in 0..n {
                let t = m[(i, k + 1)];
                m[(i, k + 1)] = m[(i, piv)];
                m[(i, piv)] = t;
            }
            pf = -pf;
        }
        let pivot = m[(k, k + 1)];
        pf *= pivot;
        // Eliminate the rest of rows/cols k and k+1 by congruence shears
        // (unit determinant, so the Pfaffian is unchanged).
        for i in k + 2..n {
            // A[i][k+1] -> 0 using row/col k: coefficient A[i][k+1]/pivot.
            let f = -m[(k + 1, i)] / pivot;
            if f != 0.0 {
                for j in 0..n {
                    let upd = f * m[(k, j)];
                    m[(i, j)] -= upd;
                }
                for j in 0..n {
                    let upd = f * m[(j, k)];
                    m[(j, i)] -= upd;
                }
            }
            // A[i][k] -> 0 using row/col k+1 (A[k+1][k] = -pivot).
            let g = m[(k, i)] / pivot;
            if g != 0.0 {
                for j in 0..n {
                    let upd = g * m[(k + 1, j)];
                    m[(i, j)] -= upd;
                }
                for j in 0..n {
                    let upd = g * m[(j, k + 1)];
                    m[(j, i)] -= upd;
                }
            }
        }
        k += 2;
    }
    pf
}
