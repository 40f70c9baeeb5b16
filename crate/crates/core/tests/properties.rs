//! Randomized property tests for the contract invariants that hold on
//! whole input classes, not just the pinned examples.

use proptest::prelude::*;

use isospec_core::galerkin::{ball_moment_exact, sphere_moment_exact};
use isospec_core::geometry::{AdmissibleForm, Manifold};
use isospec_core::jmaps::{
    check_isospectral_c, family_from_json, family_to_json, AnyFamily, CMapFamily, JMapFamily,
    TorusModel,
};
use isospec_core::liealg::{SkewSymmetric, SymTraceless3};
use isospec_core::numkit::{pencil_eigen, sym_eigen, Mat, SymmetricMatrix};

fn arb_symmetric(n: usize) -> impl Strategy<Value = SymmetricMatrix> {
    proptest::collection::vec(-3.0..3.0f64, n * (n + 1) / 2).prop_map(move |vals| {
        let mut k = 0;
        SymmetricMatrix::from_fn(n, |i, j| {
            let _ = (i, j);
            let v = vals[k % vals.len()];
            k += 1;
            v
        })
    })
}

fn arb_sym3() -> impl Strategy<Value = SymTraceless3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(a, b, c, d, e)| SymTraceless3::new(a, b, c, d, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Eigendecomposition reconstructs the input and orders ascending.
    #[test]
    fn eigen_reconstruction(a in arb_symmetric(6)) {
        let (w, v) = sym_eigen(&a).unwrap();
        prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let d = Mat::from_fn(6, 6, |i, j| if i == j { w[i] } else { 0.0 });
        let rec = v.matmul(&d).matmul(&v.transpose());
        let resid = rec.sub(&a.to_mat()).frobenius();
        prop_assert!(resid <= 1e-12 * (1.0 + a.frobenius()));
        let sum: f64 = w.iter().sum();
        prop_assert!((sum - a.trace()).abs() <= 1e-10 * (1.0 + a.trace().abs()));
    }

    /// Congruence invariance of the generalized spectrum, the mechanism the
    /// acceptance comparisons rely on.
    #[test]
    fn pencil_congruence(k in arb_symmetric(5), scale in 0.2..2.0f64, seed in 0u64..500) {
        let q = isospec_core::numkit::haar_orthogonal(5, seed);
        // SPD mass with controlled conditioning.
        let mut m = SymmetricMatrix::zeros(5);
        for i in 0..5 {
            for j in 0..=i {
                let mut s = 0.0;
                for l in 0..5 {
                    s += q[(i, l)] * (scale + l as f64) * q[(j, l)];
                }
                m.set(i, j, s);
            }
        }
        let base = pencil_eigen(&k, &m, 1e-10).unwrap();
        let s = isospec_core::numkit::haar_orthogonal(5, seed.wrapping_add(7));
        let st = s.transpose();
        let kc = SymmetricMatrix::from_mat(&st.matmul(&k.to_mat()).matmul(&s));
        let mc = SymmetricMatrix::from_mat(&st.matmul(&m.to_mat()).matmul(&s));
        let cong = pencil_eigen(&kc, &mc, 1e-10).unwrap();
        prop_assert_eq!(base.deflated_dim, cong.deflated_dim);
        for (a, b) in base.eigenvalues.iter().zip(&cong.eigenvalues) {
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs().max(b.abs())));
        }
    }

    /// Isospectrality checking is reflexive for every family.
    #[test]
    fn isospectral_reflexive(x in arb_sym3(), y in arb_sym3()) {
        let fam = CMapFamily::new([x, y]);
        let cert = check_isospectral_c(&fam, &fam, 90, 1e-12).unwrap();
        prop_assert!(cert.pass);
        prop_assert_eq!(cert.grid_residual, 0.0);
    }

    /// JSON round trip is exact for so-map families.
    #[test]
    fn family_json_round_trip(vals in proptest::collection::vec(-2.0..2.0f64, 20)) {
        let mut j1 = SkewSymmetric::zeros(5);
        let mut j2 = SkewSymmetric::zeros(5);
        let mut it = vals.iter();
        for a in 0..5 {
            for b in a + 1..5 {
                j1.set(a, b, *it.next().unwrap());
                j2.set(a, b, *it.next().unwrap_or(&0.25));
            }
        }
        let fam = AnyFamily::J(JMapFamily::so(TorusModel::new(2), vec![j1, j2]));
        let text = family_to_json(&fam).unwrap();
        let back = family_from_json(&text).unwrap();
        prop_assert_eq!(back, fam);
    }

    /// Form evaluation is linear in the tangent slot and horizontal.
    #[test]
    fn form_linearity_and_horizontality(x in arb_sym3(), y in arb_sym3(), seed in 0u64..100) {
        let fam = CMapFamily::new([x, y]);
        let lambda = AdmissibleForm::cross_pair(Manifold::Sphere, fam.images, fam.images);
        let mut rng = isospec_core::geometry::sampling::SampleRng::new(seed);
        let p = rng.point_on(&lambda.ambient);
        let u = rng.vector(10);
        let v = rng.vector(10);
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.3 * a + 1.7 * b).collect();
        let lu = lambda.eval(&p, &u).unwrap();
        let lv = lambda.eval(&p, &v).unwrap();
        let ls = lambda.eval(&p, &sum).unwrap();
        for k in 0..2 {
            prop_assert!((ls[k] - 0.3 * lu[k] - 1.7 * lv[k]).abs() <= 1e-12);
        }
        // Vertical directions evaluate to zero.
        for k in 0..2 {
            let vk: Vec<f64> = lambda.vertical_polys()[k].iter().map(|q| q.eval(&p)).collect();
            let lvk = lambda.eval(&p, &vk).unwrap();
            prop_assert!(lvk.iter().all(|c| c.abs() <= 1e-13));
        }
    }

    /// Sphere and ball moments agree with the recursion
    /// ball = sphere / (|a| + N) and vanish on odd exponents.
    #[test]
    fn moment_consistency(e0 in 0u8..5, e1 in 0u8..5, e2 in 0u8..5) {
        let mut alpha = [0u8; 16];
        alpha[0] = e0 * 2;
        alpha[1] = e1;
        alpha[2] = e2 * 2;
        let n = 6;
        match (sphere_moment_exact(&alpha, n), ball_moment_exact(&alpha, n)) {
            (Some((s, sp)), Some((b, bp))) => {
                prop_assert_eq!(sp, bp);
                let total: u64 = alpha[..n].iter().map(|&a| a as u64).sum();
                let expected = s / num_rational::BigRational::from_integer(
                    num_bigint::BigInt::from(total + n as u64),
                );
                prop_assert_eq!(b, expected);
            }
            (None, None) => {
                prop_assert!(alpha[..n].iter().any(|&a| a % 2 == 1));
            }
            _ => prop_assert!(false, "sphere/ball moment disagree on vanishing"),
        }
    }
}
