use exclusia_core::algebra::*;
use exclusia_core::linalg::{max_abs, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn draw(rng: &mut ChaCha8Rng) -> Rates {
    Rates::new(rng.gen_range(0.1..2.5), rng.gen_range(0.1..2.5), rng.gen_range(0.1..2.5), rng.gen_range(0.1..2.5))
}

fn pasep(j: f64, q: f64, r: &Rates, x0: f64, source: ConstantSource) -> (BoundaryPair, TriPairScalars) {
    let rep = build_uq_su2_rep(j, q).unwrap();
    let pair = build_boundary_ops_pasep(&rep, r, x0).unwrap();
    let s = structure_constants(r, rep.casimir, q, x0, source).unwrap();
    (pair, s)
}

#[test]
fn boundary_aw_relations_with_derived_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let q = rng.gen_range(0.1..0.95);
        let j = rng.gen_range(1..=20) as f64 / 2.0;
        let x0 = [1.0, -1.0, 0.7][rng.gen_range(0..3)];
        let r = draw(&mut rng);
        let (p, s) = pasep(j, q, &r, x0, ConstantSource::Derived);
        for kind in [RelationKind::Aw13, RelationKind::Td33] {
            let rep = check_relations(kind, &p.a, &p.a_star, &s, q, false).unwrap();
            assert!(rep.max() < 1e-11, "{kind} j={j} q={q} {:?}", rep.residuals);
        }
    }
}

#[test]
fn printed_boundary_constants_fail_for_generic_rates() {
    let r = Rates::new(0.7, 1.3, 0.4, 0.9);
    let (p, s) = pasep(2.0, 0.45, &r, 1.0, ConstantSource::Printed);
    let rep = check_relations(RelationKind::Aw13, &p.a, &p.a_star, &s, 0.45, false).unwrap();
    assert!(rep.max() > 1e-3);
}

#[test]
fn spin_half_tasep_like_rates() {
    let r = Rates::new(1.0, 1.0, 0.0, 0.0);
    let (p, s) = pasep(0.5, 0.5, &r, 1.0, ConstantSource::Derived);
    let rep = check_relations(RelationKind::Aw13, &p.a, &p.a_star, &s, 0.5, false).unwrap();
    assert!(rep.max() < 1e-12, "{:?}", rep.residuals);
}

#[test]
fn fit_recovers_derived_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let q = rng.gen_range(0.2..0.95);
        let j = rng.gen_range(2..=12) as f64 / 2.0;
        let r = draw(&mut rng);
        let (p, s) = pasep(j, q, &r, 1.0, ConstantSource::Derived);
        let fit = fit_structure_constants(&p, q).unwrap();
        let pairs = [
            (fit.scalars.rho, s.rho),
            (fit.scalars.rho_star, s.rho_star),
            (fit.scalars.omega, s.omega),
            (fit.scalars.eta, s.eta),
            (fit.scalars.eta_star, s.eta_star),
        ];
        for (f, e) in pairs {
            let (f, e) = (f.unwrap(), e.unwrap());
            assert!((f - e).abs() <= 1e-8 * e.abs().max(1.0), "j={j} q={q} fit {f} formula {e}");
        }
    }
}

#[test]
fn fitted_constants_depend_on_spin_only_through_casimir() {
    let r = Rates::new(0.8, 1.1, 0.3, 0.6);
    let q = 0.6;
    let a = pasep(1.5, q, &r, 1.0, ConstantSource::Derived);
    let b = pasep(3.0, q, &r, 1.0, ConstantSource::Derived);
    let fa = fit_structure_constants(&a.0, q).unwrap().scalars;
    let fb = fit_structure_constants(&b.0, q).unwrap().scalars;
    assert!((fa.rho.unwrap() - fb.rho.unwrap()).abs() < 1e-9);
    assert!((fa.rho_star.unwrap() - fb.rho_star.unwrap()).abs() < 1e-9);
    assert!((fa.omega.unwrap() - fb.omega.unwrap()).abs() > 1e-6);
}

#[test]
fn ssep_dolan_grady() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let j = rng.gen_range(1..=20) as f64 / 2.0;
        let r = draw(&mut rng);
        let rep = build_uq_su2_rep(j, 1.0).unwrap();
        let p = build_boundary_ops_ssep(&rep, &r, 1.0).unwrap();
        let s = structure_constants(&r, rep.casimir, 1.0, 1.0, ConstantSource::Derived).unwrap();
        let rep38 = check_relations(RelationKind::Dg38, &p.a, &p.a_star, &s, 1.0, false).unwrap();
        assert!(rep38.max() < 1e-11, "{:?}", rep38.residuals);
        let printed = structure_constants(&r, rep.casimir, 1.0, 1.0, ConstantSource::Printed).unwrap();
        let bad = check_relations(RelationKind::Dg38, &p.a, &p.a_star, &printed, 1.0, false).unwrap();
        assert!(bad.max() > if j <= 2.0 { 1e-3 } else { 1e-8 }, "j={j} {:?}", bad.residuals);
    }
}

#[test]
fn ssep_examples_with_coinciding_operators() {
    for r in [Rates::new(1.0, 1.0, 0.0, 0.0), Rates::new(1.0, 1.0, 1.0, 1.0)] {
        let rep = build_uq_su2_rep(1.0, 1.0).unwrap();
        let p = build_boundary_ops_ssep(&rep, &r, 1.0).unwrap();
        let s = structure_constants(&r, rep.casimir, 1.0, 1.0, ConstantSource::Printed).unwrap();
        let report = check_relations(RelationKind::Dg38, &p.a, &p.a_star, &s, 1.0, false).unwrap();
        assert!(report.max() < 1e-12);
    }
    let s = structure_constants(&Rates::new(1.0, 1.0, 1.0, 1.0), -2.0, 1.0, 1.0, ConstantSource::Printed).unwrap();
    assert_eq!((s.rho, s.rho_star), (Some(1.0), Some(1.0)));
}

#[test]
fn diagonal_pair_is_trivially_dolan_grady() {
    let d = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5]));
    let s = TriPairScalars { rho: Some(3.0), rho_star: Some(-7.0), ..Default::default() };
    let r = check_relations(RelationKind::Dg38, &d, &d, &s, 1.0, false).unwrap();
    assert_eq!(r.max(), 0.0);
}

#[test]
fn bulk_relations_on_the_oscillator() {
    for &q in &[0.3, 0.5, 0.8] {
        for &x0 in &[1.0, -1.3] {
            let (d0, d1) = bulk_pair(q, 48, x0).unwrap();
            let s = TriPairScalars { x0: Some(x0), ..bulk_scalars(q, x0) };
            let aw = check_relations(RelationKind::Aw20, &d1, &d0, &s, q, true).unwrap();
            assert!(aw.max() < 1e-11, "{:?}", aw.residuals);
            let bp = check_relations(RelationKind::BulkPasep, &d0, &d1, &s, q, true).unwrap();
            assert!(bp.max() < 1e-11, "{:?}", bp.residuals);
            let printed =
                check_relations_form(RelationKind::BulkPasep, RelationForm::Printed, &d0, &d1, &s, q, true).unwrap();
            assert!(printed.max() > 1e-3);
            let (e0, e1) = shift_generators(&d0, &d1, q, x0).unwrap();
            let qs = check_relations(RelationKind::QSerre27, &e0, &e1, &s, q, true).unwrap();
            assert!(qs.max() < 1e-11, "{:?}", qs.residuals);
            let unshifted = check_relations(RelationKind::QSerre27, &d0, &d1, &s, q, true).unwrap();
            assert!(unshifted.max() > 1e-3);
        }
    }
}

#[test]
fn shift_magnitude_at_half() {
    let z = Mat::zeros(3, 3);
    let (a, b) = shift_generators(&z, &z, 0.5, 1.0).unwrap();
    assert!((a[(0, 0)] + 2.0).abs() < 1e-14);
    assert!((b[(0, 0)] + 2.0).abs() < 1e-14);
    let (a, b) = shift_generators(&z, &z, 1.0, 1.0).unwrap();
    assert_eq!((a[(0, 0)], b[(0, 0)]), (1.0, 1.0));
    assert!(shift_generators(&z, &z, 0.0, 1.0).is_err());
}

#[test]
fn ssep_bulk_relations() {
    for &x0 in &[1.0, -0.6] {
        let (d0, d1) = ssep_bulk_pair(40, x0).unwrap();
        let s = TriPairScalars { x0: Some(x0), ..Default::default() };
        let ok = check_relations(RelationKind::BulkSsep, &d0, &d1, &s, 1.0, true).unwrap();
        assert!(ok.max() < 1e-12, "{:?}", ok.residuals);
        let printed =
            check_relations_form(RelationKind::BulkSsep, RelationForm::Printed, &d0, &d1, &s, 1.0, true).unwrap();
        assert!(printed.max() > 1e-3, "{:?}", printed.residuals);
        let (e0, e1) = shift_generators(&d0, &d1, 1.0, x0).unwrap();
        let dg = TriPairScalars { k: Some(x0), k_star: Some(x0), ..Default::default() };
        let r = check_relations(RelationKind::DgGeneric, &e1, &e0, &dg, 1.0, true).unwrap();
        assert!(r.max() < 1e-12, "{:?}", r.residuals);
        let zero = TriPairScalars { k: Some(0.0), k_star: Some(0.0), ..Default::default() };
        let r = check_relations(RelationKind::DgGeneric, &e1, &e0, &zero, 1.0, true).unwrap();
        assert!(r.max() > 1e-6);
        let (s0, s1) = ssep_bulk_pair(8, x0).unwrap();
        let (e0, e1) = shift_generators(&s0, &s1, 1.0, x0).unwrap();
        let r = check_relations(RelationKind::DgGeneric, &e1, &e0, &zero, 1.0, true).unwrap();
        assert!(r.max() > 1e-3, "{:?}", r.residuals);
    }
}

#[test]
fn affine_covariance() {
    let q = 0.5;
    let (d0, d1) = bulk_pair(q, 40, 1.0).unwrap();
    let s = bulk_scalars(q, 1.0);
    let (t, ts, c, cs) = (2.0, 3.0, 1.0, -1.0);
    let n = d0.nrows();
    let id = Mat::identity(n, n);
    let a = &d1 * t + &id * c;
    let b = &d0 * ts + &id * cs;
    let moved = s.affine(t, ts, c, cs).unwrap();
    let r = check_relations(RelationKind::Aw20, &a, &b, &moved, q, true).unwrap();
    assert!(r.max() < 1e-12, "{:?}", r.residuals);
    let stale = check_relations(RelationKind::Aw20, &a, &b, &s, q, true).unwrap();
    assert!(stale.max() > 1e-3);
}

#[test]
fn tasep_chain() {
    let (d0, d1) = tasep_bidiagonal(30).unwrap();
    let s = TriPairScalars::default();
    let r = check_relations(RelationKind::Tasep65To77, &d0, &d1, &s, 0.0, true).unwrap();
    assert!(r.max() < 1e-14, "{:?}", r.residuals);
    assert_eq!(r.residuals.len(), 22);
    let d1 = Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    let d0 = d1.transpose();
    let r = check_relations(RelationKind::Tasep65To77, &d0, &d1, &s, 0.0, false).unwrap();
    assert!(r.max() > 1e-3);
}

#[test]
fn tasep_definitions() {
    for (a, b) in [(1.0, 1.0), (0.7, 1.6), (2.0, 0.3)] {
        let t = tasep_algebra_data(a, b, 30).unwrap();
        let s = TriPairScalars { e1: Some(t.e1), e2: Some(t.e2), c_tilde: Some(t.e2), ..Default::default() };
        for (kind, x, y) in [
            (RelationKind::Tasep85, &t.d, &t.d_star),
            (RelationKind::Tasep86, &t.d0, &t.d1),
            (RelationKind::Tasep88To90, &t.d1, &t.d0),
        ] {
            let r = check_relations(kind, x, y, &s, 0.0, true).unwrap();
            assert!(r.max() < 1e-13, "{kind} {:?}", r.residuals);
        }
        let unified = TriPairScalars { c_tilde: Some(t.e1 * t.e2), ..s };
        let r = check_relations(RelationKind::Tasep88To90, &t.d_star, &t.d, &unified, 0.0, true).unwrap();
        assert!(r.max() < 1e-13);
        let flipped = -&t.d_star;
        let r = check_relations(RelationKind::Tasep85, &t.d, &flipped, &s, 0.0, true).unwrap();
        assert!(r.max() > 1e-3);
    }
}

#[test]
fn tasep_boundary_algebra() {
    let (alpha, beta) = (0.6, 1.7);
    let t = tasep_algebra_data(1.0, 1.0, 30).unwrap();
    let s = TriPairScalars { e2: Some(alpha * beta), ..Default::default() };
    let r = check_relations(RelationKind::Tasep93, &(&t.d1 * beta), &(&t.d0 * alpha), &s, 0.0, true).unwrap();
    assert!(r.max() < 1e-13);
    let (d0, d1) = tasep_bidiagonal(30).unwrap();
    let r = check_relations(RelationKind::Tasep93, &(&d1 * beta), &(&d0 * alpha), &s, 0.0, true).unwrap();
    assert!(r.max() > 1e-3);
}

#[test]
fn errors() {
    assert!("AW99".parse::<RelationKind>().is_err());
    for k in RelationKind::ALL {
        assert_eq!(k.name().parse::<RelationKind>().unwrap(), k);
    }
    let m = Mat::identity(3, 3);
    let e = check_relations(RelationKind::Aw13, &m, &m, &TriPairScalars::default(), 0.5, false);
    assert!(matches!(e, Err(exclusia_core::Error::MissingScalar { .. })));
    let e = check_relations(RelationKind::Dg38, &m, &Mat::identity(2, 2), &TriPairScalars::default(), 1.0, false);
    assert!(matches!(e, Err(exclusia_core::Error::DimensionMismatch(_))));
    let _ = max_abs(&m);
}
