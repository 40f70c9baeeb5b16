use isospec_core::galerkin::*;
use isospec_core::geometry::*;
use isospec_core::jmaps::paper_cmaps;
use std::time::Instant;

fn main() {
    let (c, cp, e, ep) = paper_cmaps();
    // S^9 cross, d=2
    let t = Instant::now();
    let lambda = AdmissibleForm::cross_pair(Manifold::Sphere, c.images, cp.images);
    let basis = PolyBasis::new(lambda.ambient, 2, BoundaryCondition::SphereClosed).unwrap();
    let a = assemble(&basis, &lambda, None, None, AssemblyMode::ExactMoment).unwrap();
    println!("S9 cross d=2 assemble ({} basis): {:?}", basis.len(), t.elapsed());
    let lambda_p = AdmissibleForm::cross_pair(Manifold::Sphere, cp.images, c.images);
    let t = Instant::now();
    let b = assemble(&basis, &lambda_p, None, None, AssemblyMode::ExactMoment).unwrap();
    println!("S9 second assemble: {:?}", t.elapsed());
    let t = Instant::now();
    let cmp = compare_spectra(&a.stiffness, &a.mass, &b.stiffness, &b.mass, 1e-8).unwrap();
    println!("S9 compare: {:?}  gap {:.3e} pass {}", t.elapsed(), cmp.max_rel_gap, cmp.pass);

    // S^7 hopf, d=3
    let t = Instant::now();
    let hl = AdmissibleForm::hopf_pair(Manifold::Sphere, c.images, cp.images, &e, &ep).unwrap();
    let hb = PolyBasis::new(hl.ambient, 3, BoundaryCondition::SphereClosed).unwrap();
    let ha = assemble(&hb, &hl, None, None, AssemblyMode::ExactMoment).unwrap();
    println!("S7 hopf d=3 assemble ({} basis): {:?}", hb.len(), t.elapsed());
    let hlp = AdmissibleForm::hopf_pair(Manifold::Sphere, cp.images, c.images, &ep, &e).unwrap();
    let t = Instant::now();
    let hbp = assemble(&hb, &hlp, None, None, AssemblyMode::ExactMoment).unwrap();
    println!("S7 second: {:?}", t.elapsed());
    let t = Instant::now();
    let cmp = compare_spectra(&ha.stiffness, &ha.mass, &hbp.stiffness, &hbp.mass, 1e-8).unwrap();
    println!("S7 compare: {:?}  gap {:.3e} pass {}", t.elapsed(), cmp.max_rel_gap, cmp.pass);

    // Scaled S7 Laplace
    let t = Instant::now();
    let factor = RadialScale { terms: vec![(1, 1, 0, 1.0)] };
    let sl = scale_form(&hl, factor.clone()).unwrap();
    let slp = scale_form(&hlp, factor).unwrap();
    let sa = assemble(&hb, &sl, None, None, AssemblyMode::ExactMoment).unwrap();
    let sb = assemble(&hb, &slp, None, None, AssemblyMode::ExactMoment).unwrap();
    let cmp = compare_spectra(&sa.stiffness, &sa.mass, &sb.stiffness, &sb.mass, 1e-8).unwrap();
    println!("S7 scaled pair: {:?}  gap {:.3e} pass {}", t.elapsed(), cmp.max_rel_gap, cmp.pass);
}
