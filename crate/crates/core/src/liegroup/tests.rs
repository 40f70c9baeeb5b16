use super::*;
use crate::jmaps::{swap_pair, JMapFamily, TorusModel};
use crate::liealg::SkewSymmetric;

fn so5_pair_conjugated(seed: u64) -> (JMapFamily, JMapFamily) {
    let mut j1a = SkewSymmetric::zeros(5);
    j1a.set(0, 1, 1.0);
    j1a.set(2, 3, 2.0);
    j1a.set(1, 4, 0.4);
    let mut j1b = SkewSymmetric::zeros(5);
    j1b.set(1, 2, 1.5);
    j1b.set(3, 4, 0.7);
    j1b.set(0, 4, 0.3);
    let j1 = JMapFamily::so(TorusModel::new(2), vec![j1a, j1b]);
    let j2 = crate::jmaps::conjugated_control_so(&j1, seed);
    (j1, j2)
}

#[test]
fn casimir_on_defining_rep() {
    // j = 0 on SO(6): -sum E_ab^2 = (n - 1) I = 5 I.
    let model = GroupModel::so(1, 2);
    assert_eq!(model.n(), 6);
    let zero_images: Vec<GroupMat> =
        (0..2).map(|_| GroupMat::So(Mat::zeros(6, 6))).collect();
    let lm = LeftInvariantMetric::from_images(model, zero_images);
    let spec = block_laplacian_spectrum(&lm, Representation::Defining).unwrap();
    assert_eq!(spec.len(), 6);
    for v in &spec {
        assert!((v - 5.0).abs() <= 1e-10, "Casimir value {v}");
    }
    // Scalar-ness: the operator commutes with every basis element.
    let op = block_laplacian_operator(&lm, Representation::Defining).unwrap().to_mat();
    for e in algebra_basis(&model) {
        let em = match e {
            GroupMat::So(m) => m,
            _ => unreachable!(),
        };
        let comm = op.matmul(&em).sub(&em.matmul(&op));
        assert!(comm.frobenius() <= 1e-10);
    }
}

#[test]
fn casimir_so3_hand_check() {
    // n = 3: -(E12^2 + E13^2 + E23^2) = 2 I, matching n - 1 by hand.
    let mut acc = Mat::zeros(3, 3);
    for x in SkewSymmetric::basis_all(3) {
        let m = x.to_mat();
        acc = acc.sub(&m.matmul(&m));
    }
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { 2.0 } else { 0.0 };
            assert_eq!(acc[(i, j)], expect);
        }
    }
}

#[test]
fn torus_and_h_structure() {
    for model in [GroupModel::so(5, 2), GroupModel::su(3, 2)] {
        let torus = torus_basis(&model);
        assert_eq!(torus.len(), model.r);
        // Orthonormal and commuting.
        for (i, zi) in torus.iter().enumerate() {
            for (j, zj) in torus.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g0(zi, zj) - expect).abs() <= 1e-12);
                assert!(zi.commutator(zj).frobenius() <= 1e-13);
            }
        }
    }
}

#[test]
fn metric_frame_is_orthonormal() {
    let (j1, j2) = so5_pair_conjugated(3);
    let (j, _) = swap_pair(&j1, &j2).unwrap();
    let model = GroupModel::so(5, 2);
    let lm = LeftInvariantMetric::new(model, &j).unwrap();
    let frame = lm.metric_frame();
    let d = model.algebra_dim();
    assert_eq!(frame.len(), d);
    // Check a deterministic subset of the Gram entries (the full Gram is
    // d^2 = 8281 pairings; a strided sample plus the diagonal suffices).
    for i in (0..d).step_by(7) {
        for j in (i..d).step_by(11) {
            let expect = if i == j { 1.0 } else { 0.0 };
            let g = lm.metric(&frame[i], &frame[j]);
            assert!((g - expect).abs() <= 1e-12, "gram({i},{j}) = {g}");
        }
    }
    for i in 0..d {
        let g = lm.metric(&frame[i], &frame[i]);
        assert!((g - 1.0).abs() <= 1e-12);
    }
    // lambda^j vanishes on z.
    for z in torus_basis(&model) {
        assert!(lm.lambda_of(&z).frobenius() <= 1e-13);
    }
}

#[test]
fn swap_pair_block_spectra_agree() {
    let (j1, j2) = so5_pair_conjugated(5);
    let (j, jp) = swap_pair(&j1, &j2).unwrap();
    let model = GroupModel::so(5, 2);
    let lm = LeftInvariantMetric::new(model, &j).unwrap();
    let lmp = LeftInvariantMetric::new(model, &jp).unwrap();
    for rep in [Representation::Defining, Representation::Adjoint] {
        let a = block_laplacian_spectrum(&lm, rep).unwrap();
        let b = block_laplacian_spectrum(&lmp, rep).unwrap();
        let mut gap: f64 = 0.0;
        for (x, y) in a.iter().zip(&b) {
            gap = gap.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
        }
        assert!(gap <= 1e-12, "{rep:?} gap {gap}");
    }
}

#[test]
fn frame_rerandomization_invariance() {
    // The operator is frame-independent: mixing the frame by a Haar
    // rotation leaves the spectrum unchanged.
    let (j1, j2) = so5_pair_conjugated(7);
    let (j, _) = swap_pair(&j1, &j2).unwrap();
    let model = GroupModel::so(5, 2);
    let lm = LeftInvariantMetric::new(model, &j).unwrap();
    let base = block_laplacian_spectrum(&lm, Representation::Defining).unwrap();
    let frame = lm.metric_frame();
    let d = frame.len();
    let o = crate::numkit::haar_orthogonal(d, 31);
    let n = model.n();
    let mut op = Mat::zeros(n, n);
    for i in 0..d {
        let mut x = Mat::zeros(n, n);
        for (jdx, f) in frame.iter().enumerate() {
            let fm = match f {
                GroupMat::So(m) => m,
                _ => unreachable!(),
            };
            x = x.add(&fm.scale(o[(i, jdx)]));
        }
        op = op.sub(&x.matmul(&x));
    }
    let (w, _) = crate::numkit::sym_eigen(&SymmetricMatrix::from_mat(&op)).unwrap();
    for (a, b) in base.iter().zip(&w) {
        assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
    }
}

#[test]
fn left_invariance_surrogate() {
    // Conjugating the j data by a = (S, S^-1) (which realizes the
    // pointwise conjugations when j2 = S j1 S^-1) leaves the spectrum
    // unchanged.
    let (j1, j2) = so5_pair_conjugated(9);
    let (j, _) = swap_pair(&j1, &j2).unwrap();
    let model = GroupModel::so(5, 2);
    let lm = LeftInvariantMetric::new(model, &j).unwrap();
    let base = block_laplacian_spectrum(&lm, Representation::Defining).unwrap();
    // Ad(a) . j with a = diag(S, S^T, I).
    let s = crate::numkit::haar_special_orthogonal(5, 77);
    let n = model.n();
    let mut a = Mat::identity(n);
    for i in 0..5 {
        for jj in 0..5 {
            a[(i, jj)] = s[(i, jj)];
            a[(5 + i, 5 + jj)] = s[(jj, i)];
        }
    }
    let conj_images: Vec<GroupMat> = lm
        .j_images
        .iter()
        .map(|img| match img {
            GroupMat::So(m) => GroupMat::So(a.matmul(m).matmul(&a.transpose())),
            _ => unreachable!(),
        })
        .collect();
    let lm2 = LeftInvariantMetric::from_images(model, conj_images);
    let spec = block_laplacian_spectrum(&lm2, Representation::Defining).unwrap();
    for (x, y) in base.iter().zip(&spec) {
        assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
    }
}

#[test]
fn vandermonde_examples() {
    // a = diag(1, 2), v = (1, 1): det [[1, 1], [1, 2]] = 1.
    let mut a = CMat::zeros(2, 2);
    a[(0, 0)] = C64::new(1.0, 0.0);
    a[(1, 1)] = C64::new(2.0, 0.0);
    let mut v = CMat::zeros(2, 1);
    v[(0, 0)] = C64::new(1.0, 0.0);
    v[(1, 0)] = C64::new(1.0, 0.0);
    let d = vandermonde_d(&a, &v).unwrap();
    assert!((d - C64::new(1.0, 0.0)).norm() <= 1e-14);
    // Repeated eigenvalue: d(I, v) = 0 for every v.
    let id = CMat::identity(3);
    let mut v3 = CMat::zeros(3, 1);
    v3[(0, 0)] = C64::new(0.3, 0.1);
    v3[(1, 0)] = C64::new(-1.0, 0.4);
    v3[(2, 0)] = C64::new(2.0, 0.0);
    assert!(vandermonde_d(&id, &v3).unwrap().norm() <= 1e-14);
    // SL-invariance: d(B A B^-1, B v) = d(A, v).
    for seed in 0..5 {
        let b = crate::numkit::haar_special_unitary(3, 500 + seed);
        let mut a3 = CMat::zeros(3, 3);
        a3[(0, 0)] = C64::new(0.2, 0.5);
        a3[(1, 1)] = C64::new(-0.7, 0.1);
        a3[(2, 2)] = C64::new(0.4, -0.6);
        a3[(0, 1)] = C64::new(0.1, 0.0);
        let lhs = vandermonde_d(
            &b.matmul(&a3).matmul(&b.transpose_conj()),
            &b.matmul(&v3),
        )
        .unwrap();
        let rhs = vandermonde_d(&a3, &v3).unwrap();
        assert!(
            (lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()),
            "SL invariance: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn potential_at_identity() {
    let pot = GroupPotential::new(2.0, 1.0).unwrap();
    let so = GroupModel::so(5, 2);
    let x = GroupElement::So(Mat::identity(so.n()));
    let v = group_potential(&so, &x, &pot).unwrap();
    assert!((v - (3.0f64).exp()).abs() <= 1e-12);
    let su = GroupModel::su(3, 2);
    let x = GroupElement::Su(CMat::identity(su.n()));
    let v = group_potential(&su, &x, &pot).unwrap();
    assert!((v - (3.0f64).exp()).abs() <= 1e-12);
    // Not in the group -> rejected.
    let bad = GroupElement::So(Mat::identity(so.n()).scale(1.5));
    assert!(group_potential(&so, &bad, &pot).is_err());
    // c1 > c2 > 0 enforced.
    assert!(GroupPotential::new(1.0, 2.0).is_err());
    assert!(GroupPotential::new(1.0, -0.5).is_err());
}

#[test]
fn group_hypotheses_so14() {
    let (j1, j2) = so5_pair_conjugated(13);
    let (j, jp) = swap_pair(&j1, &j2).unwrap();
    let model = GroupModel::so(5, 2);
    let pot = GroupPotential::new(2.0, 1.0).unwrap();
    let cert = check_group_hypotheses(&model, &j, &jp, &pot, 60, 2027).unwrap();
    assert!(cert.pass, "certificate {cert:?}");
    assert!(cert.potential_h_invariance <= 1e-12);
    assert!(cert.potential_g0_invariance <= 1e-12);
    assert!(cert.potential_tau_asymmetry >= 0.1, "tau asymmetry {}", cert.potential_tau_asymmetry);
}
