use entbound::linalg::{random_faithful_state, random_unitary, rng_from_seed};
use entbound::measures::*;
use entbound::{DensityMatrix, Side};
use proptest::prelude::*;

fn cheap_er() -> ErOptions {
    ErOptions { restarts: 3, max_iterations: 2000, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn measures_symmetric_under_swap(seed in 0u64..10_000) {
        let rho = random_faithful_state(2, 3, seed);
        let sw = rho.swap();
        let pairs = [
            (mutual_information(&rho).unwrap().value, mutual_information(&sw).unwrap().value),
            (log_dominance_upper(&rho, DecompositionStrategy::MatrixUnit).unwrap().value,
             log_dominance_upper(&sw, DecompositionStrategy::MatrixUnit).unwrap().value),
            (log_dominance_upper(&rho, DecompositionStrategy::OperatorSchmidt).unwrap().value,
             log_dominance_upper(&sw, DecompositionStrategy::OperatorSchmidt).unwrap().value),
            (modular_nuclearity_upper(&rho).unwrap().value, modular_nuclearity_upper(&sw).unwrap().value),
        ];
        for (a, b) in pairs {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn relative_entanglement_local_unitary_invariance(seed in 0u64..10_000) {
        let rho = random_faithful_state(2, 2, seed);
        let mut rng = rng_from_seed(seed ^ 0xABCD);
        let (ua, ub) = (random_unitary(2, &mut rng), random_unitary(2, &mut rng));
        let rot = rho.conjugate_by(&ua.kron(&ub)).unwrap();
        let a = relative_entanglement_entropy_upper(&rho, &cheap_er()).unwrap();
        let b = relative_entanglement_entropy_upper(&rot, &cheap_er()).unwrap();
        prop_assert!((a.value - b.value).abs() < 5e-3, "{} vs {}", a.value, b.value);
        // The certificate of ρ maps to a feasible point for UρU† with the same value.
        let Some(Certificate::Ansatz(cert)) = &a.certificate else { panic!("missing ansatz") };
        let mapped = cert.map_local(&ua, &ub);
        let v = entbound::modular::relative_entropy(&rot, &mapped.state().unwrap()).unwrap();
        prop_assert!((v - a.value).abs() < 1e-8);
    }

    #[test]
    fn dominance_and_nuclearity_subadditive(s1 in 0u64..10_000, s2 in 0u64..10_000) {
        let r1 = random_faithful_state(2, 2, s1);
        let r2 = random_faithful_state(2, 2, s2);
        let joint = bipartite_tensor(&r1, &r2);
        let en = |r: &DensityMatrix| log_dominance_upper(r, DecompositionStrategy::MatrixUnit).unwrap();
        let (e1, e2) = (en(&r1), en(&r2));
        let (Some(Certificate::Dominating(d1)), Some(Certificate::Dominating(d2))) = (&e1.certificate, &e2.certificate)
        else { panic!("missing decompositions") };
        let tensored = d1.tensor(d2);
        prop_assert!(tensored.reconstruction_error(joint.matrix()) < 1e-9);
        let norm = dominating_separable(&tensored).unwrap().norm;
        prop_assert!(norm.ln() <= e1.value + e2.value + 1e-8);
        for side in [Side::A, Side::B] {
            let z = |r: &DensityMatrix| nuclear_sum(r, side).unwrap().ln();
            prop_assert!(z(&joint) <= z(&r1) + z(&r2) + 1e-8);
        }
    }

    #[test]
    fn certified_chain(seed in 0u64..10_000) {
        let rho = random_faithful_state(2, 2, seed);
        let en = log_dominance_upper(&rho, DecompositionStrategy::MatrixUnit).unwrap();
        let em = modular_nuclearity_upper(&rho).unwrap();
        prop_assert!(dominated_relative_entropy(&rho, &en).unwrap() <= en.value + 1e-8);
        prop_assert!(en.value <= em.value + 1e-8);
        prop_assert!(en.is_certified(&rho).unwrap() && em.is_certified(&rho).unwrap());
    }

    #[test]
    fn relative_entanglement_below_dominance(seed in 0u64..10_000) {
        let rho = random_faithful_state(2, 2, seed);
        let er = relative_entanglement_entropy_upper(&rho, &cheap_er()).unwrap();
        let en = log_dominance_upper(&rho, DecompositionStrategy::MatrixUnit).unwrap();
        prop_assert!(en.value >= er.value - 5e-3);
        prop_assert!(er.is_certified(&rho).unwrap());
    }

    #[test]
    fn bell_value_within_tsirelson(seed in 0u64..10_000) {
        let rho = random_faithful_state(2, 2, seed);
        let r = bell_correlation(&rho, &BellOptions { restarts: 3, ..Default::default() }).unwrap();
        prop_assert!(r.value >= 1.0 - 1e-9 && r.value <= 2f64.sqrt() + 1e-9);
        prop_assert!(r.is_certified(&rho).unwrap());
    }
}
