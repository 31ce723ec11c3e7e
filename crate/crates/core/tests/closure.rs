mod common;

use common::{naive_closure, naive_is_model, naive_preimage};
use horncat::builtin::{pos, preord};
use horncat::gen::{carrier_of_size, instance_rng, random_edges, random_function, random_signature, random_structure, random_theory};
use horncat::saturate::{closure, closure_with, free_model, is_t_relation, reflect_with_equality, SaturationOptions};
use horncat::structure::{preimage_edge_set, ElementMap};
use horncat::theory::is_model;
use horncat::universal::{reflection_by_definition, test_models};
use horncat::Parallelism;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_is_a_closure_operator(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 0);
        let sig = random_signature(&mut rng, 3, 3);
        let theory = random_theory(&mut rng, &sig, 6, 3);
        let n = rng.gen_range(0..=4);
        let carrier = carrier_of_size(n);
        let e = random_edges(&mut rng, &sig, &carrier, 0.2);
        let more = random_edges(&mut rng, &sig, &carrier, 0.2);
        let f: horncat::EdgeSet = e.union(&more).cloned().collect();

        let ce = closure(&theory, &carrier, &e).unwrap();
        let cf = closure(&theory, &carrier, &f).unwrap();
        prop_assert!(e.is_subset(&ce));
        prop_assert!(ce.is_subset(&cf));
        prop_assert_eq!(closure(&theory, &carrier, &ce).unwrap(), ce.clone());
        prop_assert!(is_t_relation(&theory, &carrier, &ce).unwrap());
        prop_assert_eq!(ce, naive_closure(&theory, &carrier, &e));
    }

    #[test]
    fn preimages_of_closed_sets_are_closed(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 1);
        let sig = random_signature(&mut rng, 3, 3);
        let theory = random_theory(&mut rng, &sig, 6, 3);
        let dom = carrier_of_size(rng.gen_range(0..=4));
        let cod = carrier_of_size(rng.gen_range(1..=4));
        let h = random_function(&mut rng, &dom, &cod).unwrap();
        let seed_edges = random_edges(&mut rng, &sig, &cod, 0.2);
        let closed = closure(&theory, &cod, &seed_edges).unwrap();
        let pre = preimage_edge_set(&h, &closed);
        prop_assert!(is_t_relation(&theory, &dom, &pre).unwrap());
        prop_assert_eq!(pre, naive_preimage(&h, &sig.symbols, &closed));
    }

    #[test]
    fn model_checking_matches_brute_force(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 2);
        let sig = random_signature(&mut rng, 2, 3);
        let theory = random_theory(&mut rng, &sig, 4, 3);
        let x = random_structure(&mut rng, &sig, 4);
        prop_assert_eq!(is_model(&theory, &x), naive_is_model(&theory, &x));
        let y = random_structure(&mut rng, &pos().signature, 4);
        prop_assert_eq!(is_model(&pos(), &y), naive_is_model(&pos(), &y));
    }

    #[test]
    fn traces_replay_and_modes_agree(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 3);
        let sig = random_signature(&mut rng, 3, 3);
        let theory = random_theory(&mut rng, &sig, 6, 3);
        let carrier = carrier_of_size(rng.gen_range(0..=5));
        let e = random_edges(&mut rng, &sig, &carrier, 0.15);
        let run = |parallelism| closure_with(&theory, &carrier, &e, SaturationOptions { parallelism, trace: true }).unwrap();
        let seq = run(Parallelism::Sequential);
        let par = run(Parallelism::Parallel);
        prop_assert_eq!(&seq, &par);
        prop_assert!(seq.trace.unwrap().replay(&theory, &e));
    }

    #[test]
    fn reflection_is_a_universal_idempotent_model(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 4);
        let x = random_structure(&mut rng, &pos().signature, 4);
        let r = reflect_with_equality(&pos(), &x).unwrap();
        prop_assert!(is_model(&pos(), &r.model));
        prop_assert!(r.quotient.is_surjective());
        prop_assert!(r.quotient.preserves_edges());
        let again = reflect_with_equality(&pos(), &r.model).unwrap();
        prop_assert_eq!(&again.model, &r.model);
        prop_assert_eq!(again.quotient.map(), &ElementMap::identity(&r.model.carrier));
        let tests = test_models(&pos(), 2).unwrap();
        prop_assert!(reflection_by_definition(&r, &tests).unwrap());

        let free = free_model(&preord(), &x).unwrap();
        prop_assert!(is_model(&preord(), &free));
        prop_assert_eq!(free_model(&preord(), &free).unwrap(), free);
    }
}
