//! Exact monomial moments over the unit sphere and ball.
//!
//! With all exponents even,
//!
//! ```text
//!   int_{S^{N-1}} x^a dsigma = 2 prod_i Gamma((a_i+1)/2) / Gamma((|a|+N)/2)
//!   int_{B^N}     x^a dx     = sphere_moment(a) / (|a| + N)
//! ```
//!
//! and any odd exponent kills the integral. The Gamma values at integer and
//! half-integer arguments are kept as exact big rationals times a power of
//! pi, converted to floating point once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{MultiIndex, Poly};

/// Gamma(two_arg / 2) as (rational, carries_sqrt_pi).
fn gamma_half(two_arg: u64) -> (BigRational, bool) {
    assert!(two_arg >= 1);
    if two_arg % 2 == 0 {
        // Gamma(k) = (k-1)!
        let k = two_arg / 2;
        let mut f = BigInt::one();
        for i in 2..k {
            f *= BigInt::from(i);
        }
        (BigRational::from_integer(f), false)
    } else {
        // Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi)
        let k = (two_arg - 1) / 2;
        let mut num = BigInt::one();
        for i in 2..=2 * k {
            num *= BigInt::from(i);
        }
        let mut den = BigInt::one();
        for i in 2..=k {
            den *= BigInt::from(i);
        }
        den *= BigInt::from(4u32).pow(k as u32);
        (BigRational::new(num, den), true)
    }
}

/// Exact sphere moment as (rational, pi_power); `None` encodes zero (some
/// exponent odd).
pub fn sphere_moment_exact(alpha: &[u8], n: usize) -> Option<(BigRational, u32)> {
    assert!(alpha.len() >= n);
    if alpha[..n].iter().any(|&a| a % 2 == 1) {
        return None;
    }
    let total: u64 = alpha[..n].iter().map(|&a| a as u64).sum();
    let mut rat = BigRational::from_integer(BigInt::from(2));
    let mut sqrt_pis: i64 = 0;
    for &a in &alpha[..n] {
        let (g, has_pi) = gamma_half(a as u64 + 1);
        rat *= g;
        if has_pi {
            sqrt_pis += 1;
        }
    }
    let (gd, has_pi) = gamma_half(total + n as u64);
    rat /= gd;
    if has_pi {
        sqrt_pis -= 1;
    }
    debug_assert!(sqrt_pis >= 0 && sqrt_pis % 2 == 0);
    Some((rat, (sqrt_pis / 2) as u32))
}

/// Exact ball moment as (rational, pi_power).
pub fn ball_moment_exact(alpha: &[u8], n: usize) -> Option<(BigRational, u32)> {
    let (rat, p) = sphere_moment_exact(alpha, n)?;
    let total: u64 = alpha[..n].iter().map(|&a| a as u64).sum();
    Some((rat / BigRational::from_integer(BigInt::from(total + n as u64)), p))
}

pub fn rational_to_f64(rat: &BigRational, pi_pow: u32) -> f64 {
    // to_f64 handles large numerators/denominators by scaling.
    let base = rat.to_f64().expect("rational fits in f64 range");
    base * std::f64::consts::PI.powi(pi_pow as i32)
}

pub fn sphere_moment(alpha: &[u8], n: usize) -> f64 {
    sphere_moment_exact(alpha, n).map(|(r, p)| rational_to_f64(&r, p)).unwrap_or(0.0)
}

pub fn ball_moment(alpha: &[u8], n: usize) -> f64 {
    ball_moment_exact(alpha, n).map(|(r, p)| rational_to_f64(&r, p)).unwrap_or(0.0)
}

/// Exact integral of a polynomial (f64 coefficients lifted exactly to
/// rationals) against the sphere or ball measure: (rational, pi_power).
/// The pi power is uniform across monomials of a fixed ambient dimension,
/// so the pair supports exact equality comparisons.
pub fn integrate_exact(
    poly: &Poly,
    n: usize,
    ball: bool,
) -> (BigRational, u32) {
    let mut acc = BigRational::zero();
    let mut pi_pow: Option<u32> = None;
    for (idx, &c) in poly.terms() {
        let m = if ball {
            ball_moment_exact(idx, n)
        } else {
            sphere_moment_exact(idx, n)
        };
        if let Some((rat, p)) = m {
            match pi_pow {
                None => pi_pow = Some(p),
                Some(q) => assert_eq!(p, q, "pi power is uniform for fixed dimension"),
            }
            let coeff = BigRational::from_float(c).expect("finite coefficient");
            acc += coeff * rat;
        }
    }
    (acc, pi_pow.unwrap_or(0))
}

/// Convenience: exact equality of two integrals (rational arithmetic).
pub fn integrals_equal(a: &(BigRational, u32), b: &(BigRational, u32)) -> bool {
    if a.0.is_zero() && b.0.is_zero() {
        return true;
    }
    a.1 == b.1 && a.0 == b.0
}

/// Returns |difference| as f64 for reporting.
pub fn integral_gap(a: &(BigRational, u32), b: &(BigRational, u32)) -> f64 {
    if a.1 == b.1 {
        rational_to_f64(&(a.0.clone() - b.0.clone()).abs(), a.1)
    } else {
        (rational_to_f64(&a.0, a.1) - rational_to_f64(&b.0, b.1)).abs()
    }
}

/// Enumerates all multi-indices over `n` variables with total degree <= d,
/// in graded lexicographic order.
pub fn simplex(n: usize, d: usize) -> Vec<MultiIndex> {
    fn fixed_degree(
        out: &mut Vec<MultiIndex>,
        idx: &mut MultiIndex,
        var: usize,
        n: usize,
        left: usize,
    ) {
        if var == n - 1 {
            idx[var] = left as u8;
            out.push(*idx);
            idx[var] = 0;
            return;
        }
        for e in (0..=left).rev() {
            idx[var] = e as u8;
            fixed_degree(out, idx, var + 1, n, left - e);
        }
        idx[var] = 0;
    }
    let mut out = Vec::new();
    let mut idx = [0u8; crate::poly::MAX_VARS];
    for total in 0..=d {
        if n == 0 {
            if total == 0 {
                out.push(idx);
            }
        } else {
            fixed_degree(&mut out, &mut idx, 0, n, total);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::index_of;

    #[test]
    fn circle_and_disc() {
        // N=2: circumference 2 pi, disc area pi.
        assert!((sphere_moment(&[0; 16], 2) - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((ball_moment(&[0; 16], 2) - std::f64::consts::PI).abs() < 1e-14);
        // N=2, x^2 over the disc: pi/4 (polar-coordinates oracle).
        let idx = index_of(&[(0, 2)]);
        assert!((ball_moment(&idx, 2) - std::f64::consts::PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_standard_values() {
        // N=3: total measure 4 pi; x^2 integrates to 4 pi / 3 by symmetry.
        assert!((sphere_moment(&[0; 16], 3) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let idx = index_of(&[(0, 2)]);
        assert!(
            (sphere_moment(&idx, 3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-13
        );
        // Ball volume 4 pi / 3.
        assert!((ball_moment(&[0; 16], 3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-13);
        // Odd exponent kills it.
        assert_eq!(sphere_moment(&index_of(&[(1, 1)]), 3), 0.0);
    }

    #[test]
    fn monte_carlo_oracle_high_dim() {
        // x1^2 x2^4 on S^7 against seeded Monte-Carlo.
        let n = 8;
        let idx = index_of(&[(0, 2), (1, 4)]);
        let exact = sphere_moment(&idx, n);
        let mut rng = crate::geometry::sampling::SampleRng::new(12345);
        let samples = 400_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let mut v = rng.vector(n);
            let nor = crate::numkit::norm(&v);
            for a in v.iter_mut() {
                *a /= nor;
            }
            acc += v[0] * v[0] * v[1] * v[1] * v[1] * v[1];
        }
        let area = sphere_moment(&[0; 16], n);
        let mc = area * acc / samples as f64;
        assert!(
            (mc - exact).abs() <= 0.05 * exact.abs().max(1e-6),
            "mc {mc} vs exact {exact}"
        );
    }

    #[test]
    fn simplex_counts() {
        assert_eq!(simplex(3, 2).len(), 10);
        assert_eq!(simplex(8, 3).len(), 165);
        // Graded order: degrees ascending.
        let s = simplex(4, 3);
        let degs: Vec<usize> =
            s.iter().map(|i| i.iter().map(|&e| e as usize).sum()).collect();
        assert!(degs.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn integrate_poly_exactly() {
        // (1 - |x|^2) over B^2: pi - pi/2 = pi/2.
        let mut p = Poly::constant(2, 1.0);
        p = p.sub(&crate::poly::radius_sq(2, 0..2));
        let (rat, pow) = integrate_exact(&p, 2, true);
        assert_eq!(pow, 1);
        assert!((rational_to_f64(&rat, pow) - std::f64::consts::PI / 2.0).abs() < 1e-14);
    }
}
