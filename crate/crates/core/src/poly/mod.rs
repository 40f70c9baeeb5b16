//! Sparse multivariate polynomials over f64 with BTreeMap term storage, so
//! iteration and summation order are fixed and results are reproducible.
//! Exponents are capped at 255 per variable and 16 variables, comfortably
//! above everything the moment engine integrates.

use std::collections::BTreeMap;

pub const MAX_VARS: usize = 16;

pub type MultiIndex = [u8; MAX_VARS];

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Poly::zero(nvars);
        if c != 0.0 {
            p.terms.insert([0; MAX_VARS], c);
        }
        p
    }

    pub fn monomial(nvars: usize, exps: &[(usize, u8)], coeff: f64) -> Self {
        let mut idx = [0u8; MAX_VARS];
        for &(v, e) in exps {
            assert!(v < nvars);
            idx[v] += e;
        }
        let mut p = Poly::zero(nvars);
        if coeff != 0.0 {
            p.terms.insert(idx, coeff);
        }
        p
    }

    /// The coordinate polynomial x_v.
    pub fn var(nvars: usize, v: usize) -> Self {
        Poly::monomial(nvars, &[(v, 1)], 1.0)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|idx| idx.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, idx: MultiIndex, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(idx).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&idx);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(*idx, *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        if s == 0.0 {
            return Poly::zero(self.nvars);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                let mut idx = *ia;
                for (a, b) in idx.iter_mut().zip(ib.iter()) {
                    *a += b;
                }
                out.add_term(idx, ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to variable v.
    pub fn derivative(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (idx, c) in &self.terms {
            let e = idx[v];
            if e == 0 {
                continue;
            }
            let mut nidx = *idx;
            nidx[v] -= 1;
            out.add_term(nidx, c * e as f64);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert!(x.len() >= self.nvars);
        let mut total = 0.0;
        for (idx, c) in &self.terms {
            let mut t = *c;
            for (v, &e) in idx.iter().enumerate().take(self.nvars) {
                for _ in 0..e {
                    t *= x[v];
                }
            }
            total += t;
        }
        total
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut out = Poly::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Max |coefficient|.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().fold(0.0_f64, |a, &b| a.max(b.abs()))
    }
}

/// Sum of squares of a coordinate range: |x[range]|^2.
pub fn radius_sq(nvars: usize, range: std::ops::Range<usize>) -> Poly {
    let mut p = Poly::zero(nvars);
    for v in range {
        p.add_term(index_of(&[(v, 2)]), 1.0);
    }
    p
}

pub fn index_of(exps: &[(usize, u8)]) -> MultiIndex {
    let mut idx = [0u8; MAX_VARS];
    for &(v, e) in exps {
        idx[v] += e;
    }
    idx
}

/// Gradient as a vector of polynomials.
pub fn gradient(p: &Poly, nvars: usize) -> Vec<Poly> {
    (0..nvars).map(|v| p.derivative(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        // (x0 + 2 x1)^2 = x0^2 + 4 x0 x1 + 4 x1^2
        let p = Poly::var(2, 0).add(&Poly::var(2, 1).scale(2.0));
        let sq = p.mul(&p);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.eval(&[1.0, 1.0]), 9.0);
        assert_eq!(sq.degree(), 2);
        let dx = sq.derivative(0);
        assert_eq!(dx.eval(&[2.0, 3.0]), 2.0 * 2.0 + 4.0 * 3.0);
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = Poly::var(1, 0);
        let q = p.sub(&p);
        assert!(q.is_zero());
    }
}
