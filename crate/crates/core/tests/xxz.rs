use exclusia_core::linalg::spectrum_distance;
use exclusia_core::process::ProcessParams;
use exclusia_core::xxz::{anisotropy, build_xxz, similarity_residual};

#[test]
fn generator_is_similar_to_the_spin_chain() {
    for &q in &[0.25, 0.5, 1.0] {
        for (a, b, g, d) in [(0.7, 1.2, 0.3, 0.5), (1.4, 0.4, 0.9, 0.1)] {
            for l in 1..=6 {
                let p = ProcessParams::new(q, a, b, g, d, l).unwrap();
                let r1 = similarity_residual(&p, 1.0).unwrap();
                let r2 = similarity_residual(&p, 2.0).unwrap();
                assert!(r1.residual < 1e-10, "{p:?} {:?}", r1.residuals);
                assert!(r1.spectrum_distance < 1e-10);
                assert!(r2.residual < 1e-10);
                assert_eq!(r1.convention, r2.convention);
                assert!(spectrum_distance(&r1.hamiltonian_spectrum, &r2.hamiltonian_spectrum) < 1e-10);
            }
        }
    }
}

#[test]
fn anisotropy_at_symmetric_point() {
    assert_eq!(anisotropy(1.0), -1.0);
    assert!((anisotropy(0.25) + 1.25).abs() < 1e-15);
}

#[test]
fn rejects_unsupported_input() {
    let p = ProcessParams::tasep(1.0, 1.0, 3).unwrap();
    assert!(build_xxz(&p, 1.0).is_err());
    let p = ProcessParams::new(0.5, 1.0, 1.0, 0.0, 0.0, 3).unwrap();
    assert!(build_xxz(&p, 0.0).is_err());
}
