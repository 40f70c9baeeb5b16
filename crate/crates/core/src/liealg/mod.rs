//! Concrete compact Lie algebra elements and group actions: so(m), su(m),
//! symmetric traceless 3x3 matrices, brackets, centralizers, conjugacy
//! invariants and the quaternion double cover SU(2) -> SO(3).
//!
//! Storage enforces the defining linear constraints exactly: skew matrices
//! keep only the strict upper triangle, su(m) elements keep the strict upper
//! triangle plus an imaginary diagonal whose last entry balances the trace,
//! and symmetric traceless matrices keep five independent entries.
//!
//! Basis conventions (all structure constants then have exact small
//! entries):
//! * so(m): `E_ab` (a < b) with +1 at (a,b), -1 at (b,a);
//! * su(m): `(e_ab - e_ba)/sqrt2`, `i(e_ab + e_ba)/sqrt2` for a < b, and the
//!   normalized imaginary diagonal ladder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numkit::{nullspace_dim, pfaffian, C64, CMat, Mat};
use crate::{Error, Result};

/// Element of so(m): packed strict upper triangle, X^T = -X by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewSymmetric {
    m: usize,
    /// Entry (a,b), a < b, at index a*(2m-a-1)/2 + (b-a-1).
    upper: Vec<f64>,
}

impl SkewSymmetric {
    pub fn zeros(m: usize) -> Self {
        SkewSymmetric { m, upper: vec![0.0; m * (m - 1) / 2] }
    }

    #[inline]
    fn idx(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b && b < self.m);
        a * (2 * self.m - a - 1) / 2 + (b - a - 1)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < j {
            self.upper[self.idx(i, j)]
        } else if j < i {
            -self.upper[self.idx(j, i)]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        if a < b {
            let k = self.idx(a, b);
            self.upper[k] = v;
        } else if b < a {
            let k = self.idx(b, a);
            self.upper[k] = -v;
        } else {
            assert_eq!(v, 0.0, "diagonal of a skew matrix must stay zero");
        }
    }

    /// Basis element E_ab (a < b): +1 at (a,b), -1 at (b,a).
    pub fn basis(m: usize, a: usize, b: usize) -> Self {
        assert!(a < b && b < m);
        let mut x = SkewSymmetric::zeros(m);
        x.set(a, b, 1.0);
        x
    }

    /// Full basis in the fixed (a,b) lexicographic order.
    pub fn basis_all(m: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(m * (m - 1) / 2);
        for a in 0..m {
            for b in a + 1..m {
                out.push(SkewSymmetric::basis(m, a, b));
            }
        }
        out
    }

    pub fn from_mat(a: &Mat) -> Self {
        assert_eq!(a.rows(), a.cols());
        let m = a.rows();
        let mut x = SkewSymmetric::zeros(m);
        for i in 0..m {
            for j in i + 1..m {
                x.set(i, j, 0.5 * (a[(i, j)] - a[(j, i)]));
            }
        }
        x
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_fn(self.m, self.m, |i, j| self.get(i, j))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        let mut out = self.clone();
        for (a, b) in out.upper.iter_mut().zip(&other.upper) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for a in out.upper.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Commutator [x, y] = xy - yx, assembled from the upper triangle so the
    /// result is exactly skew.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::DimMismatch {
                op: "bracket",
                detail: format!("so({}) vs so({})", self.m, other.m),
            });
        }
        let a = self.to_mat();
        let b = other.to_mat();
        let ab = a.matmul(&b);
        let mut out = SkewSymmetric::zeros(self.m);
        for i in 0..self.m {
            for j in i + 1..self.m {
                out.set(i, j, ab[(i, j)] - ab[(j, i)]);
            }
        }
        Ok(out)
    }

    pub fn frobenius(&self) -> f64 {
        (2.0 * self.upper.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// Conjugation q X q^T for orthogonal q (projected back to exact skew).
    pub fn conjugate(&self, q: &Mat) -> Self {
        let x = q.matmul(&self.to_mat()).matmul(&q.transpose());
        SkewSymmetric::from_mat(&x)
    }
}

/// Element of su(m): strict upper triangle over C plus imaginary diagonal;
/// the last diagonal entry is implied by tracelessness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuElement {
    m: usize,
    upper_re: Vec<f64>,
    upper_im: Vec<f64>,
    /// Imaginary parts of the first m-1 diagonal entries.
    diag_im: Vec<f64>,
}

impl SuElement {
    pub fn zeros(m: usize) -> Self {
        let k = m * (m - 1) / 2;
        SuElement { m, upper_re: vec![0.0; k], upper_im: vec![0.0; k], diag_im: vec![0.0; m - 1] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, a: usize, b: usize) -> usize {
        a * (2 * self.m - a - 1) / 2 + (b - a - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i < j {
            let k = self.idx(i, j);
            C64::new(self.upper_re[k], self.upper_im[k])
        } else if j < i {
            let k = self.idx(j, i);
            C64::new(-self.upper_re[k], self.upper_im[k])
        } else if i < self.m - 1 {
            C64::new(0.0, self.diag_im[i])
        } else {
            C64::new(0.0, -self.diag_im.iter().sum::<f64>())
        }
    }

    pub fn set_upper(&mut self, a: usize, b: usize, v: C64) {
        assert!(a < b);
        let k = self.idx(a, b);
        self.upper_re[k] = v.re;
        self.upper_im[k] = v.im;
    }

    pub fn set_diag_im(&mut self, i: usize, v: f64) {
        assert!(i < self.m - 1, "last diagonal entry is implied by trace zero");
        self.diag_im[i] = v;
    }

    /// Projects an arbitrary complex matrix onto su(m) storage (skew-Hermitian
    /// part, traceless by construction).
    pub fn from_cmat(a: &CMat) -> Self {
        let m = a.rows();
        let mut x = SuElement::zeros(m);
        for i in 0..m {
            for j in i + 1..m {
                let v = 0.5 * (a[(i, j)] - a[(j, i)].conj());
                x.set_upper(i, j, v);
            }
        }
        // Imaginary diagonal, re-centered to trace zero.
        let mean: f64 = (0..m).map(|i| a[(i, i)].im).sum::<f64>() / m as f64;
        for i in 0..m - 1 {
            x.set_diag_im(i, a[(i, i)].im - mean);
        }
        x
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_fn(self.m, self.m, |i, j| self.get(i, j))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        let mut out = self.clone();
        for (a, b) in out.upper_re.iter_mut().zip(&other.upper_re) {
            *a += b;
        }
        for (a, b) in out.upper_im.iter_mut().zip(&other.upper_im) {
            *a += b;
        }
        for (a, b) in out.diag_im.iter_mut().zip(&other.diag_im) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for a in out.upper_re.iter_mut() {
            *a *= s;
        }
        for a in out.upper_im.iter_mut() {
            *a *= s;
        }
        for a in out.diag_im.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::DimMismatch {
                op: "bracket",
                detail: format!("su({}) vs su({})", self.m, other.m),
            });
        }
        let ab = self.to_cmat().matmul(&other.to_cmat());
        let m = self.m;
        let mut x = SuElement::zeros(m);
        for i in 0..m {
            for j in i + 1..m {
                x.set_upper(i, j, ab[(i, j)] - ab[(j, i)].conj());
            }
        }
        let diag: Vec<f64> = (0..m).map(|i| 2.0 * ab[(i, i)].im).collect();
        let mean: f64 = diag.iter().sum::<f64>() / m as f64;
        for i in 0..m - 1 {
            x.set_diag_im(i, diag[i] - mean);
        }
        Ok(x)
    }

    pub fn frobenius(&self) -> f64 {
        self.to_cmat().frobenius()
    }

    /// g0-orthonormal basis of su(m) under g0(X,Y) = -Re tr(XY):
    /// off-diagonal pairs scaled by 1/sqrt2, then the diagonal ladder
    /// i*diag(1,..,1,-k,0,..)/sqrt(k(k+1)) scaled to unit norm.
    pub fn basis_all(m: usize) -> Vec<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let mut x = SuElement::zeros(m);
                x.set_upper(a, b, C64::new(s, 0.0));
                out.push(x);
                let mut y = SuElement::zeros(m);
                y.set_upper(a, b, C64::new(0.0, s));
                out.push(y);
            }
        }
        for k in 1..m {
            // i * diag(1,...,1,-k,0,...,0) / sqrt(k(k+1)) has -Re tr(X^2) = 1.
            let norm = ((k * (k + 1)) as f64).sqrt();
            let mut x = SuElement::zeros(m);
            for i in 0..k {
                if i < m - 1 {
                    x.set_diag_im(i, 1.0 / norm);
                }
            }
            if k < m - 1 {
                x.set_diag_im(k, -(k as f64) / norm);
            }
            out.push(x);
        }
        out
    }

    pub fn conjugate(&self, u: &CMat) -> Self {
        let x = u.matmul(&self.to_cmat()).matmul(&u.transpose_conj());
        SuElement::from_cmat(&x)
    }
}

/// Symmetric traceless real 3x3 matrix; five independent entries stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymTraceless3 {
    /// (a11, a12, a13, a22, a23); a33 = -a11 - a22.
    v: [f64; 5],
}

impl SymTraceless3 {
    pub fn zero() -> Self {
        SymTraceless3 { v: [0.0; 5] }
    }

    pub fn new(a11: f64, a12: f64, a13: f64, a22: f64, a23: f64) -> Self {
        SymTraceless3 { v: [a11, a12, a13, a22, a23] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match (i, j) {
            (0, 0) => self.v[0],
            (0, 1) => self.v[1],
            (0, 2) => self.v[2],
            (1, 1) => self.v[3],
            (1, 2) => self.v[4],
            (2, 2) => -self.v[0] - self.v[3],
            _ => unreachable!(),
        }
    }

    pub fn from_mat(a: &Mat) -> Self {
        let sym = |i: usize, j: usize| 0.5 * (a[(i, j)] + a[(j, i)]);
        // Store the first two diagonal entries re-centered so the trace is
        // exactly zero even for slightly off input.
        let t = (a[(0, 0)] + a[(1, 1)] + a[(2, 2)]) / 3.0;
        SymTraceless3::new(a[(0, 0)] - t, sym(0, 1), sym(0, 2), a[(1, 1)] - t, sym(1, 2))
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_fn(3, 3, |i, j| self.get(i, j))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut v = self.v;
        for (a, b) in v.iter_mut().zip(&o.v) {
            *a += b;
        }
        SymTraceless3 { v }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut v = self.v;
        for a in v.iter_mut() {
            *a *= s;
        }
        SymTraceless3 { v }
    }

    pub fn frobenius(&self) -> f64 {
        self.to_mat().frobenius()
    }

    /// E x E^T for orthogonal E (projected back to exact symmetric traceless).
    pub fn conjugate(&self, e: &Mat) -> Self {
        SymTraceless3::from_mat(&e.matmul(&self.to_mat()).matmul(&e.transpose()))
    }
}

/// Euclidean cross product on R^3.
pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Algebra tag for centralizer computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algebra {
    So(usize),
    Su(usize),
}

impl Algebra {
    pub fn dim(&self) -> usize {
        match self {
            Algebra::So(m) => m * (m - 1) / 2,
            Algebra::Su(m) => m * m - 1,
        }
    }
}

/// Dimension of {X in algebra : [X, t] = 0 for all targets t}.
///
/// Targets are given as plain ambient matrices (so they may be symmetric,
/// as for the c-maps of the sphere construction, or algebra elements).
/// The stacked commutator system is resolved by a rank computation.
pub fn centralizer_dim_real(targets: &[Mat], algebra: Algebra) -> usize {
    let m = match algebra {
        Algebra::So(m) => m,
        Algebra::Su(_) => panic!("use centralizer_dim_complex for su(m)"),
    };
    assert!(!targets.is_empty(), "targets must be nonempty");
    let basis = SkewSymmetric::basis_all(m);
    let rows = targets.len() * m * m;
    let mut sys = Mat::zeros(rows, basis.len());
    for (bi, b) in basis.iter().enumerate() {
        let bm = b.to_mat();
        for (ti, t) in targets.iter().enumerate() {
            let comm = bm.matmul(t).sub(&t.matmul(&bm));
            for i in 0..m {
                for j in 0..m {
                    sys[(ti * m * m + i * m + j, bi)] = comm[(i, j)];
                }
            }
        }
    }
    nullspace_dim(&sys, 1e-10)
}

/// Centralizer dimension for su(m) targets.
pub fn centralizer_dim_complex(targets: &[CMat], m: usize) -> usize {
    assert!(!targets.is_empty());
    let basis = SuElement::basis_all(m);
    let rows = targets.len() * m * m * 2;
    let mut sys = Mat::zeros(rows, basis.len());
    for (bi, b) in basis.iter().enumerate() {
        let bm = b.to_cmat();
        for (ti, t) in targets.iter().enumerate() {
            let comm = bm.matmul(t).sub(&t.matmul(&bm));
            for i in 0..m {
                for j in 0..m {
                    let z = comm[(i, j)];
                    sys[(ti * 2 * m * m + 2 * (i * m + j), bi)] = z.re;
                    sys[(ti * 2 * m * m + 2 * (i * m + j) + 1, bi)] = z.im;
                }
            }
        }
    }
    nullspace_dim(&sys, 1e-10)
}

/// Conjugacy invariants: characteristic polynomial coefficients of
/// det(tI - x) (monic, coefficient of t^{m-1} first), plus the Pfaffian for
/// even-dimensional skew input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitInvariants {
    /// c_1..c_m with det(tI - x) = t^m + c_1 t^{m-1} + ... + c_m.
    pub char_poly: Vec<f64>,
    /// Imaginary parts of the coefficients (zero for real input).
    pub char_poly_im: Vec<f64>,
    /// Pfaffian, for even-dimensional skew-symmetric input only.
    pub pfaffian: Option<f64>,
}

impl OrbitInvariants {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (a, b) in self.char_poly.iter().zip(&other.char_poly) {
            d = d.max((a - b).abs());
        }
        for (a, b) in self.char_poly_im.iter().zip(&other.char_poly_im) {
            d = d.max((a - b).abs());
        }
        match (&self.pfaffian, &other.pfaffian) {
            (Some(a), Some(b)) => d = d.max((a - b).abs()),
            (None, None) => {}
            _ => d = f64::INFINITY,
        }
        d
    }
}

/// Faddeev-LeVerrier characteristic polynomial of a real matrix.
pub fn char_poly_real(a: &Mat) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = Vec::with_capacity(n);
    let mut mk = Mat::zeros(n, n);
    let mut prev_c = 1.0;
    for k in 1..=n {
        mk = a.matmul(&mk);
        for i in 0..n {
            mk[(i, i)] += prev_c;
        }
        let c = -a.matmul(&mk).trace() / k as f64;
        coeffs.push(c);
        prev_c = c;
    }
    coeffs
}

/// Faddeev-LeVerrier characteristic polynomial of a complex matrix.
pub fn char_poly_complex(a: &CMat) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = Vec::with_capacity(n);
    let mut mk = CMat::zeros(n, n);
    let mut prev_c = C64::new(1.0, 0.0);
    for k in 1..=n {
        mk = a.matmul(&mk);
        for i in 0..n {
            mk[(i, i)] += prev_c;
        }
        let c = -a.matmul(&mk).trace() / C64::new(k as f64, 0.0);
        coeffs.push(c);
        prev_c = c;
    }
    coeffs
}

pub fn orbit_invariants_skew(x: &SkewSymmetric) -> OrbitInvariants {
    let m = x.to_mat();
    let cp = char_poly_real(&m);
    let pf = if x.m() % 2 == 0 { Some(pfaffian(&m)) } else { None };
    OrbitInvariants { char_poly_im: vec![0.0; cp.len()], char_poly: cp, pfaffian: pf }
}

pub fn orbit_invariants_su(x: &SuElement) -> OrbitInvariants {
    let cp = char_poly_complex(&x.to_cmat());
    OrbitInvariants {
        char_poly: cp.iter().map(|z| z.re).collect(),
        char_poly_im: cp.iter().map(|z| z.im).collect(),
        pfaffian: None,
    }
}

pub fn orbit_invariants_sym3(x: &SymTraceless3) -> OrbitInvariants {
    let cp = char_poly_real(&x.to_mat());
    OrbitInvariants { char_poly_im: vec![0.0; cp.len()], char_poly: cp, pfaffian: None }
}

/// Unit quaternion (w, x, y, z), |q| = 1 within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = w * w + x * x + y * y + z * z;
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::DimMismatch {
                op: "UnitQuaternion::new",
                detail: format!("norm^2 = {n2}, not 1"),
            });
        }
        Ok(UnitQuaternion { w, x, y, z })
    }

    pub fn identity() -> Self {
        UnitQuaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn negate(&self) -> Self {
        UnitQuaternion { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Rotation matrix of a unit quaternion.
///
/// The convention is fixed so that `su2_action_on_c2` is intertwined with
/// this rotation by the Hopf map of the geometry module: for pure
/// quaternions (w = 0) the rotation is the half turn about (x, y, z).
pub fn quaternion_to_so3(q: &UnitQuaternion) -> Mat {
    let (w, x, y, z) = (q.w, q.x, q.y, q.z);
    Mat::from_rows(&[
        vec![w * w + x * x - y * y - z * z, 2.0 * (x * y + w * z), 2.0 * (x * z - w * y)],
        vec![2.0 * (x * y - w * z), w * w - x * x + y * y - z * z, 2.0 * (y * z + w * x)],
        vec![2.0 * (x * z + w * y), 2.0 * (y * z - w * x), w * w - x * x - y * y + z * z],
    ])
}

/// Lift of a special orthogonal 3x3 matrix to a unit quaternion, with the
/// sign convention w >= 0, ties at w = 0 broken by the first nonzero
/// imaginary component being positive.
pub fn so3_lift(e: &Mat) -> Result<UnitQuaternion> {
    let defect = e.orthogonality_defect();
    let det = e.det();
    if defect > 1e-10 || (det - 1.0).abs() > 1e-10 {
        return Err(Error::NotSpecialOrthogonal { defect, det });
    }
    let tr = e.trace();
    let (r00, r11, r22) = (e[(0, 0)], e[(1, 1)], e[(2, 2)]);
    // Shepperd branches keyed on the largest of 4w^2-1, 4x^2-1, ...
    let cands = [tr, r00, r11, r22];
    let mut arg = 0;
    for i in 1..4 {
        if cands[i] > cands[arg] {
            arg = i;
        }
    }
    let mut q = match arg {
        0 => {
            let w = 0.5 * (1.0 + tr).sqrt();
            UnitQuaternion {
                w,
                x: (e[(1, 2)] - e[(2, 1)]) / (4.0 * w),
                y: (e[(2, 0)] - e[(0, 2)]) / (4.0 * w),
                z: (e[(0, 1)] - e[(1, 0)]) / (4.0 * w),
            }
        }
        1 => {
            let x = 0.5 * (1.0 + r00 - r11 - r22).sqrt();
            UnitQuaternion {
                w: (e[(1, 2)] - e[(2, 1)]) / (4.0 * x),
                x,
                y: (e[(0, 1)] + e[(1, 0)]) / (4.0 * x),
                z: (e[(0, 2)] + e[(2, 0)]) / (4.0 * x),
            }
        }
        2 => {
            let y = 0.5 * (1.0 - r00 + r11 - r22).sqrt();
            UnitQuaternion {
                w: (e[(2, 0)] - e[(0, 2)]) / (4.0 * y),
                x: (e[(0, 1)] + e[(1, 0)]) / (4.0 * y),
                y,
                z: (e[(1, 2)] + e[(2, 1)]) / (4.0 * y),
            }
        }
        _ => {
            let z = 0.5 * (1.0 - r00 - r11 + r22).sqrt();
            UnitQuaternion {
                w: (e[(0, 1)] - e[(1, 0)]) / (4.0 * z),
                x: (e[(0, 2)] + e[(2, 0)]) / (4.0 * z),
                y: (e[(1, 2)] + e[(2, 1)]) / (4.0 * z),
                z,
            }
        }
    };
    // Normalize (the branch formulas are exact only up to roundoff).
    let n = (q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z).sqrt();
    q.w /= n;
    q.x /= n;
    q.y /= n;
    q.z /= n;
    // Sign convention.
    if q.w < 0.0 {
        q = q.negate();
    } else if q.w == 0.0 {
        for c in [q.x, q.y, q.z] {
            if c != 0.0 {
                if c < 0.0 {
                    q = q.negate();
                }
                break;
            }
        }
    }
    Ok(q)
}

/// The SU(2) matrix acting on C^2 that covers `quaternion_to_so3(q)` under
/// the Hopf map: A = [[w + ix, z + iy], [-z + iy, w - ix]].
pub fn su2_action_on_c2(q: &UnitQuaternion) -> CMat {
    let a = Complex64::new(q.w, q.x);
    let b = Complex64::new(-q.z, q.y);
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = a;
    m[(0, 1)] = -b.conj();
    m[(1, 0)] = b;
    m[(1, 1)] = a.conj();
    m
}

/// The real 4x4 matrix of `su2_action_on_c2(q)` under the identification
/// C^2 = R^4, (z1, z2) = (x1 + i x2, x3 + i x4).
pub fn su2_as_so4(q: &UnitQuaternion) -> Mat {
    let a = su2_action_on_c2(q);
    let mut out = Mat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let z = a[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{haar_special_orthogonal, haar_special_unitary};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_skew(m: usize, seed: u64) -> SkewSymmetric {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = SkewSymmetric::zeros(m);
        for a in 0..m {
            for b in a + 1..m {
                x.set(a, b, rng.random::<f64>() * 2.0 - 1.0);
            }
        }
        x
    }

    #[test]
    fn bracket_self_is_zero() {
        let x = random_skew(4, 1);
        let z = x.bracket(&x).unwrap();
        assert_eq!(z.frobenius(), 0.0);
    }

    #[test]
    fn bracket_structure_constant() {
        // [E_12, E_23] in so(3): direct product gives -E_13 with our sign
        // convention (checked against the matrix product).
        let e12 = SkewSymmetric::basis(3, 0, 1);
        let e23 = SkewSymmetric::basis(3, 1, 2);
        let lhs = e12.bracket(&e23).unwrap().to_mat();
        let prod = e12
            .to_mat()
            .matmul(&e23.to_mat())
            .sub(&e23.to_mat().matmul(&e12.to_mat()));
        assert_eq!(lhs.sub(&prod).frobenius(), 0.0);
        // It must be +- E_13.
        let e13 = SkewSymmetric::basis(3, 0, 2).to_mat();
        let d1 = lhs.sub(&e13).frobenius();
        let d2 = lhs.add(&e13).frobenius();
        assert!(d1 == 0.0 || d2 == 0.0, "[E12,E23] not +-E13");
    }

    #[test]
    fn jacobi_identity_residual() {
        for seed in 0..5 {
            let x = random_skew(5, 3 * seed + 1);
            let y = random_skew(5, 3 * seed + 2);
            let z = random_skew(5, 3 * seed + 3);
            let a = x.bracket(&y.bracket(&z).unwrap()).unwrap();
            let b = y.bracket(&z.bracket(&x).unwrap()).unwrap();
            let c = z.bracket(&x.bracket(&y).unwrap()).unwrap();
            let total = a.add(&b).add(&c);
            assert!(total.frobenius() <= 1e-13);
        }
    }

    #[test]
    fn bracket_dim_mismatch() {
        let x = random_skew(3, 1);
        let y = random_skew(4, 2);
        assert!(x.bracket(&y).is_err());
    }

    #[test]
    fn su_bracket_stays_in_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut x = SuElement::zeros(3);
        let mut y = SuElement::zeros(3);
        for a in 0..3 {
            for b in a + 1..3 {
                x.set_upper(a, b, C64::new(rng.random(), rng.random()));
                y.set_upper(a, b, C64::new(rng.random(), rng.random()));
            }
        }
        x.set_diag_im(0, 0.3);
        x.set_diag_im(1, -0.1);
        y.set_diag_im(0, -0.7);
        let z = x.bracket(&y).unwrap();
        let zm = z.to_cmat();
        // Skew-Hermitian and traceless.
        assert!(zm.add(&zm.transpose_conj()).frobenius() < 1e-14);
        assert!(zm.trace().norm() < 1e-14);
        // And equal to the raw commutator.
        let raw = x.to_cmat().matmul(&y.to_cmat()).sub(&y.to_cmat().matmul(&x.to_cmat()));
        assert!(zm.sub(&raw).frobenius() < 1e-13);
    }

    #[test]
    fn centralizer_of_zero_is_everything() {
        let dim = centralizer_dim_real(&[Mat::zeros(3, 3)], Algebra::So(3));
        assert_eq!(dim, 3);
    }

    #[test]
    fn centralizer_of_distinct_diagonal_is_trivial() {
        let d = Mat::from_rows(&[vec![-1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert_eq!(centralizer_dim_real(&[d], Algebra::So(3)), 0);
    }

    #[test]
    fn su_basis_orthonormal() {
        let basis = SuElement::basis_all(3);
        assert_eq!(basis.len(), 8);
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let g = -x.to_cmat().matmul(&y.to_cmat()).trace().re;
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-12, "g0({i},{j}) = {g}");
            }
        }
    }

    #[test]
    fn char_poly_conjugation_invariant() {
        for seed in 0..5 {
            let x = random_skew(5, 40 + seed);
            let s = haar_special_orthogonal(5, 140 + seed);
            let y = x.conjugate(&s);
            let a = orbit_invariants_skew(&x);
            let b = orbit_invariants_skew(&y);
            assert!(a.max_abs_diff(&b) <= 1e-11, "diff {}", a.max_abs_diff(&b));
        }
        // su case
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut x = SuElement::zeros(3);
        for a in 0..3 {
            for b in a + 1..3 {
                x.set_upper(a, b, C64::new(rng.random(), rng.random()));
            }
        }
        x.set_diag_im(0, 0.4);
        let u = haar_special_unitary(3, 8);
        let y = x.conjugate(&u);
        assert!(orbit_invariants_su(&x).max_abs_diff(&orbit_invariants_su(&y)) <= 1e-11);
    }

    #[test]
    fn char_poly_zero_matrix() {
        let inv = orbit_invariants_skew(&SkewSymmetric::zeros(4));
        assert_eq!(inv.char_poly, vec![0.0; 4]);
        assert_eq!(inv.pfaffian, Some(0.0));
    }

    #[test]
    fn quaternion_identity_rotation() {
        let r = quaternion_to_so3(&UnitQuaternion::identity());
        assert!(r.identity_defect() < 1e-15);
    }

    #[test]
    fn quaternion_round_trip_on_haar_rotations() {
        let mut max_err: f64 = 0.0;
        for seed in 0..100 {
            let e = haar_special_orthogonal(3, 500 + seed);
            let q = so3_lift(&e).unwrap();
            let rec = quaternion_to_so3(&q);
            max_err = max_err.max(rec.sub(&e).frobenius());
        }
        assert!(max_err <= 1e-12, "max error {max_err}");
    }

    #[test]
    fn lift_rejects_improper() {
        let mut refl = Mat::identity(3);
        refl[(0, 0)] = -1.0;
        assert!(so3_lift(&refl).is_err());
    }

    #[test]
    fn double_cover_sign_convention() {
        // lift(R(q)) = +-q, resolved to the w >= 0 representative.
        for seed in 0..20 {
            let e = haar_special_orthogonal(3, 900 + seed);
            let q = so3_lift(&e).unwrap();
            let q2 = so3_lift(&quaternion_to_so3(&q)).unwrap();
            let same = (q.w - q2.w).abs() + (q.x - q2.x).abs() + (q.y - q2.y).abs()
                + (q.z - q2.z).abs();
            assert!(same < 1e-12);
            assert!(q.w >= 0.0);
        }
    }

    #[test]
    fn pure_quaternion_is_half_turn_about_axis() {
        let q = UnitQuaternion::new(0.0, 0.6, 0.0, 0.8).unwrap();
        let r = quaternion_to_so3(&q);
        let axis = vec![0.6, 0.0, 0.8];
        let im = r.matvec(&axis);
        for (a, b) in im.iter().zip(&axis) {
            assert!((a - b).abs() < 1e-14);
        }
        // Half turn: R^2 = I.
        assert!(r.matmul(&r).identity_defect() < 1e-14);
    }

    #[test]
    fn su2_identity_and_determinant() {
        let a = su2_action_on_c2(&UnitQuaternion::identity());
        assert!((a[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(a.unitarity_defect() < 1e-15);
        for seed in 0..10 {
            let e = haar_special_orthogonal(3, 700 + seed);
            let q = so3_lift(&e).unwrap();
            let a = su2_action_on_c2(&q);
            assert!(a.unitarity_defect() < 1e-12);
            assert!((a.det() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
