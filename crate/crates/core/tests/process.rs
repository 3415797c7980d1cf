use exclusia_core::process::{build_generator, exact_observables, steady_state, Configuration, ProcessParams};
use exclusia_core::Error;
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = f64> {
    0.05f64..3.0
}

fn params() -> impl Strategy<Value = ProcessParams> {
    (0.0f64..2.0, rate(), rate(), 0.0f64..2.0, 0.0f64..2.0, 1usize..=6)
        .prop_map(|(q, a, b, g, d, l)| ProcessParams::new(q, a, b, g, d, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn columns_sum_to_zero(p in params()) {
        let g = build_generator(&p).unwrap();
        let scale = g.max_abs_entry();
        for s in g.column_sums() {
            prop_assert!(s.abs() <= 1e-14 * scale);
        }
    }

    #[test]
    fn stationary_state_balances(p in params()) {
        let g = build_generator(&p).unwrap();
        let ss = steady_state(&g).unwrap();
        let flow = g.apply(&ss.probs);
        prop_assert!(flow.iter().all(|v| v.abs() < 1e-12));
        prop_assert!((ss.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(ss.probs.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn currents_coincide(p in params()) {
        let r = exact_observables(&p).unwrap();
        prop_assert_eq!(r.currents.len(), p.sites + 1);
        prop_assert!(r.current_spread() < 1e-10);
    }

    #[test]
    fn particle_hole_reflection(p in params()) {
        let a = exact_observables(&p).unwrap();
        let b = exact_observables(&p.conjugated()).unwrap();
        let l = p.sites;
        for i in 0..l {
            prop_assert!((a.densities[i] - (1.0 - b.densities[l - 1 - i])).abs() < 1e-10);
        }
        let (pa, pb) = (a.probabilities.unwrap(), b.probabilities.unwrap());
        for s in 0..pa.len() {
            let c = Configuration::from_index(s, l);
            prop_assert!((pa[s] - pb[c.conjugated().index()]).abs() < 1e-10);
        }
    }
}

#[test]
fn tasep_two_sites() {
    let r = exact_observables(&ProcessParams::tasep(1.0, 1.0, 2).unwrap()).unwrap();
    assert!((r.current - 2.0 / 5.0).abs() < 1e-12);
    let p = r.probabilities.unwrap();
    let expect = [1.0, 1.0, 2.0, 1.0].map(|w| w / 5.0);
    for (x, y) in p.iter().zip(expect) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn large_chain_uses_the_iterative_solver() {
    let p = ProcessParams::new(0.4, 0.7, 1.1, 0.1, 0.2, 10).unwrap();
    let g = build_generator(&p).unwrap();
    let ss = steady_state(&g).unwrap();
    assert!(ss.residual < 1e-12);
    let r = exclusia_core::process::observables(&ss);
    assert!(r.current_spread() < 1e-10);
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(ProcessParams::new(-0.1, 1.0, 1.0, 0.0, 0.0, 3), Err(Error::InvalidParameter(_))));
    assert!(ProcessParams::new(0.5, 1.0, f64::NAN, 0.0, 0.0, 3).is_err());
    assert!(ProcessParams::new(0.5, 1.0, 1.0, 0.0, 0.0, 0).is_err());
    assert!(matches!(
        build_generator(&ProcessParams::new(0.5, 1.0, 1.0, 0.0, 0.0, 15).unwrap()),
        Err(Error::Capacity { .. })
    ));
    let stuck = ProcessParams::new(0.5, 0.0, 1.0, 0.0, 0.0, 3).unwrap();
    assert!(exact_observables(&stuck).is_err());
}
