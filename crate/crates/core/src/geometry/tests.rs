use super::*;
use crate::jmaps::paper_cmaps;
use crate::liealg::{quaternion_to_so3, so3_lift, su2_as_so4, SkewSymmetric};

fn cross_forms(manifold: Manifold) -> (AdmissibleForm, AdmissibleForm) {
    let (c, cp, _, _) = paper_cmaps();
    let lambda = AdmissibleForm::cross_pair(manifold, c.images, cp.images);
    let lambda_p = AdmissibleForm::cross_pair(manifold, cp.images, c.images);
    (lambda, lambda_p)
}

fn hopf_forms(manifold: Manifold) -> (AdmissibleForm, AdmissibleForm) {
    let (c, cp, e, ep) = paper_cmaps();
    let lambda = AdmissibleForm::hopf_pair(manifold, c.images, cp.images, &e, &ep).unwrap();
    let lambda_p = AdmissibleForm::hopf_pair(manifold, cp.images, c.images, &ep, &e).unwrap();
    (lambda, lambda_p)
}

fn so_forms(manifold: Manifold) -> (AdmissibleForm, AdmissibleForm) {
    // A small so(5)-pair with j2 a conjugate of j1, which is honestly
    // isospectral.
    let mut j1a = SkewSymmetric::zeros(5);
    j1a.set(0, 1, 1.0);
    j1a.set(2, 3, 2.0);
    let mut j1b = SkewSymmetric::zeros(5);
    j1b.set(1, 2, 1.5);
    j1b.set(3, 4, 0.7);
    let s = crate::numkit::haar_special_orthogonal(5, 11);
    let j2a = j1a.conjugate(&s);
    let j2b = j1b.conjugate(&s);
    let lambda =
        AdmissibleForm::so_pair(manifold, vec![j1a.clone(), j1b.clone()], vec![j2a.clone(), j2b.clone()])
            .unwrap();
    let lambda_p = AdmissibleForm::so_pair(manifold, vec![j2a, j2b], vec![j1a, j1b]).unwrap();
    (lambda, lambda_p)
}

#[test]
fn hopf_map_basics() {
    assert_eq!(hopf_map(&[1.0, 0.0, 0.0, 0.0]), [0.5, 0.0, 0.0]);
    let mut rng = sampling::SampleRng::new(7);
    for _ in 0..10_000 {
        let p = rng.vector(4);
        let img = hopf_map(&p);
        let r2: f64 = p.iter().map(|x| x * x).sum();
        let n = (img[0] * img[0] + img[1] * img[1] + img[2] * img[2]).sqrt();
        assert!((n - r2 / 2.0).abs() <= 1e-14 * (1.0 + r2));
    }
    // S^1-invariance along the Hopf circle.
    for k in 0..32 {
        let t = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
        let p = [0.3, -0.5, 0.7, 0.2];
        let rot = |a: f64, b: f64| (a * t.cos() - b * t.sin(), a * t.sin() + b * t.cos());
        let (a, b) = rot(p[0], p[1]);
        let (c, d) = rot(p[2], p[3]);
        let img = hopf_map(&[a, b, c, d]);
        let base = hopf_map(&p);
        for (x, y) in img.iter().zip(&base) {
            assert!((x - y).abs() <= 1e-14);
        }
    }
}

#[test]
fn hopf_differential_matches_fd() {
    let p = [0.4, -0.2, 0.9, 0.3];
    let dp = hopf_differential(&p);
    let h = 1e-6;
    for c in 0..4 {
        let mut pp = p;
        pp[c] += h;
        let mut pm = p;
        pm[c] -= h;
        let fp = hopf_map(&pp);
        let fm = hopf_map(&pm);
        for r in 0..3 {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            assert!((dp[(r, c)] - fd).abs() <= 1e-8);
        }
    }
}

#[test]
fn su2_hopf_equivariance() {
    // P(A p) = R(q) P(p) for the stored convention, on random quaternions
    // and points.
    let mut rng = sampling::SampleRng::new(3);
    for seed in 0..50 {
        let e = crate::numkit::haar_special_orthogonal(3, 300 + seed);
        let q = so3_lift(&e).unwrap();
        let a = su2_as_so4(&q);
        let r = quaternion_to_so3(&q);
        for _ in 0..20 {
            let p = rng.vector(4);
            let lhs = hopf_map(&a.matvec(&p));
            let rhs = r.matvec(&hopf_map(&p).to_vec());
            for (x, y) in lhs.iter().zip(&rhs) {
                assert!((x - y).abs() <= 1e-12, "equivariance failed: {x} vs {y}");
            }
        }
    }
}

#[test]
fn paper_lifts_are_half_turns() {
    let (_, _, e, ep) = paper_cmaps();
    for w in [&e, &ep] {
        let q = so3_lift(w).unwrap();
        // A^2 = -Id for the lift of an involution.
        let a = crate::liealg::su2_action_on_c2(&q);
        let a2 = a.matmul(&a);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { -1.0 } else { 0.0 };
                assert!((a2[(i, j)] - crate::numkit::C64::new(expect, 0.0)).norm() <= 1e-12);
            }
        }
        // P . A = E . P pointwise.
        let a4 = su2_as_so4(&q);
        let mut rng = sampling::SampleRng::new(5);
        for _ in 0..1000 {
            let p = rng.vector(4);
            let lhs = hopf_map(&a4.matvec(&p));
            let rhs = w.matvec(&hopf_map(&p).to_vec());
            for (x, y) in lhs.iter().zip(&rhs) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn cross_form_example_values() {
    let (lambda, _) = cross_forms(Manifold::Sphere);
    // p = e1 in the first slot, X = e2: c(Z1) e1 = -e1, parallel cross = 0.
    let mut p = vec![0.0; 10];
    p[0] = 1.0;
    let mut x = vec![0.0; 10];
    x[1] = 1.0;
    let v = lambda.eval(&p, &x).unwrap();
    assert!(v[0].abs() <= 1e-15);
}

#[test]
fn horizontality_and_t_invariance() {
    let mut rng = sampling::SampleRng::new(11);
    let forms: Vec<AdmissibleForm> = vec![
        cross_forms(Manifold::Sphere).0,
        hopf_forms(Manifold::Sphere).0,
        so_forms(Manifold::Ball).0,
        scale_form(
            &cross_forms(Manifold::Sphere).0,
            RadialScale { terms: vec![(1, 1, 0, 1.0)] },
        )
        .unwrap(),
    ];
    for form in &forms {
        let n = form.ambient.dim();
        let r = form.torus_rank();
        for _ in 0..2500 {
            let p = rng.point_on(&form.ambient);
            // Horizontality: lambda on every torus-orbit direction vanishes.
            for k in 0..r {
                let vk: Vec<f64> =
                    form.vertical_polys()[k].iter().map(|c| c.eval(&p)).collect();
                let lv = form.eval(&p, &vk).unwrap();
                for c in &lv {
                    assert!(c.abs() <= 1e-13, "horizontality violated: {c}");
                }
            }
            // T-invariance.
            let x = rng.vector(n);
            let angles: Vec<f64> = (0..r).map(|k| 0.3 + 1.1 * k as f64).collect();
            let rho = form.ambient.torus_action(&angles);
            let lv = form.eval(&p, &x).unwrap();
            let lv_rot = form.eval(&rho.matvec(&p), &rho.matvec(&x)).unwrap();
            for (a, b) in lv.iter().zip(&lv_rot) {
                assert!((a - b).abs() <= 1e-12, "T-invariance violated");
            }
        }
    }
}

#[test]
fn metric_unipotent_and_unit_volume() {
    let mut rng = sampling::SampleRng::new(23);
    let forms: Vec<AdmissibleForm> = vec![
        cross_forms(Manifold::Sphere).0,
        hopf_forms(Manifold::Ball).0,
        so_forms(Manifold::Sphere).0,
    ];
    for form in &forms {
        let mf = MetricField::new(form.clone());
        let n = form.ambient.dim();
        for _ in 0..3000 {
            let p = rng.point_on(&form.ambient);
            let at = mf.at(&p);
            // Lambda^2 = 0 (structural).
            let l2 = at.lambda.matmul(&at.lambda);
            assert!(l2.frobenius() <= 1e-14, "Lambda^2 = {}", l2.frobenius());
            // det(I + Lambda) = 1.
            let ipl = Mat::identity(n).add(&at.lambda);
            assert!((ipl.det() - 1.0).abs() <= 1e-13);
            // Inverse Gram via (I - L)(I - L^T) matches the numeric inverse.
            let prod = at.gram.matmul(&at.gram_inv);
            assert!(prod.identity_defect() <= 1e-12);
        }
    }
    // Zero form: G = I.
    let zero = AdmissibleForm::zero(AmbientSpace {
        variant: AmbientVariant::Plain { n: 5 },
        manifold: Manifold::Sphere,
    });
    let mf = MetricField::new(zero);
    let at = mf.at(&[0.5, 0.5, 0.5, 0.4, 0.3]);
    assert!(at.gram.identity_defect() == 0.0);
}

#[test]
fn hopf_direction_is_horizontal() {
    // X = i p (the Hopf circle direction of the first slot) evaluates to 0.
    let (lambda, _) = hopf_forms(Manifold::Sphere);
    let mut rng = sampling::SampleRng::new(31);
    for _ in 0..500 {
        let p = rng.point_on(&lambda.ambient);
        let mut x = vec![0.0; 8];
        // i p on the first C^2 slot: (a, b) -> (-b, a) pairwise.
        x[0] = -p[1];
        x[1] = p[0];
        x[2] = -p[3];
        x[3] = p[2];
        let v = lambda.eval(&p, &x).unwrap();
        for c in &v {
            assert!(c.abs() <= 1e-14);
        }
    }
}

#[test]
fn star_condition_cross_basis_duals() {
    let (c, cp, _, _) = paper_cmaps();
    let (lambda, lambda_p) = cross_forms(Manifold::Sphere);
    // mu = Z1 dual: c(Z1) = c'(Z1), so A_mu = I works; the builder must
    // produce something with residual at machine precision.
    for mu in [[1.0, 0.0], [0.0, 1.0], [2.0, 1.0], [1.0, -3.0]] {
        let f = cross_f_mu(&c, &cp, &mu, &lambda.ambient).unwrap();
        let rep =
            check_star_condition(&lambda, &lambda_p, &mu, &f, None, 600, 17).unwrap();
        assert!(rep.residual <= 1e-10, "mu {mu:?}: residual {}", rep.residual);
    }
    // With the radial potential attached: phi . F = phi.
    let pot = PotentialField::default_max_at_zero(1);
    let f = cross_f_mu(&c, &cp, &[1.0, 1.0], &lambda.ambient).unwrap();
    let rep = check_star_condition(&lambda, &lambda_p, &[1.0, 1.0], &f, Some(&pot), 600, 19)
        .unwrap();
    assert!(rep.potential_residual.unwrap() <= 1e-12);
}

#[test]
fn star_condition_rejects_bad_maps() {
    let (lambda, lambda_p) = cross_forms(Manifold::Sphere);
    let mut bad = Mat::identity(10);
    bad[(0, 0)] = 2.0;
    assert!(matches!(
        check_star_condition(&lambda, &lambda_p, &[1.0, 0.0], &bad, None, 10, 1),
        Err(Error::NotOrthogonal { .. })
    ));
    // Orthogonal but not equivariant: swap a slot coordinate with a torus
    // coordinate.
    let mut swap = Mat::identity(10);
    swap[(0, 0)] = 0.0;
    swap[(6, 6)] = 0.0;
    swap[(0, 6)] = 1.0;
    swap[(6, 0)] = 1.0;
    assert!(matches!(
        check_star_condition(&lambda, &lambda_p, &[1.0, 0.0], &swap, None, 10, 1),
        Err(Error::NotEquivariant { .. })
    ));
}

#[test]
fn star_condition_hopf() {
    let (c, cp, _, _) = paper_cmaps();
    let (lambda, lambda_p) = hopf_forms(Manifold::Sphere);
    for mu in [[1.0, 0.0], [0.0, 1.0], [1.0, 2.0], [3.0, -1.0]] {
        let f = hopf_f_mu(&c, &cp, &mu, &lambda.ambient).unwrap();
        let rep = check_star_condition(&lambda, &lambda_p, &mu, &f, None, 600, 29).unwrap();
        assert!(rep.residual <= 1e-10, "mu {mu:?}: residual {}", rep.residual);
    }
}

#[test]
fn star_condition_so() {
    let (lambda, lambda_p) = so_forms(Manifold::Ball);
    let (first, second) = match &lambda.kind {
        FormKind::SoPair { first, second } => (first.clone(), second.clone()),
        _ => unreachable!(),
    };
    for mu in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, -1.0]] {
        let f = so_f_mu(&first, &second, &mu, &lambda.ambient).unwrap();
        let rep = check_star_condition(&lambda, &lambda_p, &mu, &f, None, 600, 37).unwrap();
        assert!(rep.residual <= 1e-9, "mu {mu:?}: residual {}", rep.residual);
    }
}

#[test]
fn tau_swap_and_potentials() {
    // R^m variant: tau is the slot swap, an involution, Psi = Id.
    let (lambda, lambda_p) = cross_forms(Manifold::Sphere);
    let rep = tau_map(&lambda, &lambda_p, 2000, 41).unwrap();
    assert!(rep.orthogonality_defect <= 1e-15);
    assert!(rep.lambda_residual <= 1e-13, "tau residual {}", rep.lambda_residual);
    let tau = Mat::from_rows(&rep.tau.iter().map(|r| r.clone()).collect::<Vec<_>>());
    assert!(tau.matmul(&tau).identity_defect() <= 1e-15);
    assert_eq!(rep.psi[0][0], 1.0);
    // phi_2 = tau^* phi_1 pointwise.
    let pot1 = PotentialField::default_max_at_zero(1);
    let pot2 = pot1.swapped_slot();
    let mut rng = sampling::SampleRng::new(43);
    for _ in 0..10_000 {
        let p = rng.point_on(&lambda.ambient);
        let tp = tau.matvec(&p);
        let a = pot1.eval(&lambda.ambient, &tp);
        let b = pot2.eval(&lambda.ambient, &p);
        assert!((a - b).abs() <= 1e-14);
    }
}

#[test]
fn tau_hopf_swaps_torus() {
    let (lambda, lambda_p) = hopf_forms(Manifold::Sphere);
    let rep = tau_map(&lambda, &lambda_p, 2000, 47).unwrap();
    assert!(rep.orthogonality_defect <= 1e-12);
    assert!(rep.lambda_residual <= 1e-12, "tau residual {}", rep.lambda_residual);
    assert_eq!(rep.psi[0][1], 1.0);
    assert_eq!(rep.psi[0][0], 0.0);
}

#[test]
fn curvature_closed_forms() {
    let mut rng = sampling::SampleRng::new(53);
    // SoPair: bilinear identity checked on basis pairs.
    let (so, _) = so_forms(Manifold::Sphere);
    let n = so.ambient.dim();
    for a in 0..n {
        for b in 0..n {
            let mut x = vec![0.0; n];
            x[a] = 1.0;
            let mut y = vec![0.0; n];
            y[b] = 1.0;
            let p = rng.point_on(&so.ambient);
            let analytic = so.curvature(&p, &x, &y);
            let fd = so.curvature_fd(&p, &x, &y, 1e-5);
            for (u, v) in analytic.iter().zip(&fd) {
                assert!((u - v).abs() <= 1e-6, "so curvature {u} vs fd {v}");
            }
        }
    }
    // CrossPair, HopfPair and a scaled variant against finite differences.
    let forms = vec![
        cross_forms(Manifold::Sphere).0,
        hopf_forms(Manifold::Sphere).0,
        scale_form(
            &cross_forms(Manifold::Sphere).0,
            RadialScale { terms: vec![(1, 1, 0, 1.0)] },
        )
        .unwrap(),
    ];
    for form in &forms {
        let n = form.ambient.dim();
        for _ in 0..300 {
            let p = rng.point_on(&form.ambient);
            let x = rng.vector(n);
            let y = rng.vector(n);
            let analytic = form.curvature(&p, &x, &y);
            let fd = form.curvature_fd(&p, &x, &y, 1e-5);
            for (u, v) in analytic.iter().zip(&fd) {
                assert!((u - v).abs() <= 1e-5 * (1.0 + u.abs()), "curvature {u} vs fd {v}");
            }
            // Antisymmetry is exact for the closed forms.
            let swapped = form.curvature(&p, &y, &x);
            for (u, v) in analytic.iter().zip(&swapped) {
                assert!((u + v).abs() <= 1e-13);
            }
        }
    }
}

#[test]
fn scale_form_validation_and_support() {
    let (lambda, _) = cross_forms(Manifold::Sphere);
    // alpha = 1: unchanged evaluation.
    let scaled = scale_form(&lambda, RadialScale::one()).unwrap();
    let mut rng = sampling::SampleRng::new(59);
    let p = rng.point_on(&lambda.ambient);
    let x = rng.vector(10);
    assert_eq!(lambda.eval(&p, &x).unwrap(), scaled.eval(&p, &x).unwrap());
    // Asymmetric alpha rejected.
    assert!(matches!(
        scale_form(&lambda, RadialScale { terms: vec![(1, 0, 0, 1.0)] }),
        Err(Error::AsymmetricScale)
    ));
    // Support control: alpha = (|p|^2 |q|^2)^2 shape keeps admissibility and
    // the metric collapses to g0 where the factor vanishes.
    let factor = RadialScale { terms: vec![(1, 1, 0, 1.0)] };
    let scaled = scale_form(&lambda, factor).unwrap();
    let mf = MetricField::new(scaled);
    // q-slot zero => factor zero => Lambda = 0.
    let mut p0 = vec![0.0; 10];
    p0[0] = 0.6;
    p0[7] = 0.8;
    let at = mf.at(&p0);
    assert!(at.lambda.frobenius() == 0.0);
    assert!(at.gram.identity_defect() == 0.0);
}

#[test]
fn scaled_star_condition_unchanged_a_mu() {
    let (c, cp, _, _) = paper_cmaps();
    let (lambda, lambda_p) = cross_forms(Manifold::Sphere);
    let factor = RadialScale { terms: vec![(1, 1, 0, 1.0)] };
    let sl = scale_form(&lambda, factor.clone()).unwrap();
    let slp = scale_form(&lambda_p, factor).unwrap();
    for mu in [[1.0, 0.0], [0.0, 1.0], [1.0, 2.0]] {
        let f = cross_f_mu(&c, &cp, &mu, &sl.ambient).unwrap();
        let rep = check_star_condition(&sl, &slp, &mu, &f, None, 600, 61).unwrap();
        assert!(rep.residual <= 1e-10, "scaled mu {mu:?}: {}", rep.residual);
    }
}

#[test]
fn potential_validation() {
    assert!(PotentialField::new(vec![2.0, -1.0], 1, ProfileKind::MaxAtZero).is_ok());
    // Max not at zero.
    assert!(PotentialField::new(vec![1.0, 1.0], 1, ProfileKind::MaxAtZero).is_err());
    // Not increasing.
    assert!(PotentialField::new(vec![2.0, -1.0], 1, ProfileKind::Increasing).is_err());
    assert!(PotentialField::new(vec![1.0, 1.0], 2, ProfileKind::Increasing).is_ok());
    assert!(PotentialField::default_max_at_zero(1).positive_on_ball());
    assert!(PotentialField::default_increasing(2).positive_on_ball());
}
