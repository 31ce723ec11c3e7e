use horncat::builtin::{pos, preord};
use horncat::catops::coproduct;
use horncat::extensivity::{
    check_connected, check_coproduct_edge_formula, check_disjointness, check_distributivity, check_extensivity,
    check_universality, final_density_sink, hom_count, representing_object,
};
use horncat::gen::{instance_rng, random_condition_theory, random_family, random_model, random_morphism_into, random_signature, random_theory};
use horncat::Theory;
use proptest::prelude::*;
use rand::Rng;

fn condition_theory(seed: u64, stream: u64) -> Theory {
    let mut rng = instance_rng(seed, stream);
    let sig = random_signature(&mut rng, 2, 2);
    random_condition_theory(&mut rng, &sig, 4, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn condition_theories_are_extensive(seed in any::<u64>()) {
        let theory = condition_theory(seed, 20);
        let mut rng = instance_rng(seed, 21);
        let family = random_family(&mut rng, &theory, 3, 3).unwrap();
        prop_assert!(check_coproduct_edge_formula(&theory, &family).unwrap());
        prop_assert!(check_disjointness(&theory, &family).unwrap());
        let co = coproduct(&theory, &family).unwrap();
        let f = random_morphism_into(&mut rng, &theory, &co.object, 4).unwrap();
        prop_assert!(check_universality(&theory, &family, &f).unwrap());
        let x = random_model(&mut rng, &theory, 2).unwrap();
        let small: Vec<_> = family.iter().take(2).cloned().collect();
        prop_assert!(check_distributivity(&theory, &x, &small).unwrap());
        let report = check_extensivity(&theory, &family, &[f]).unwrap();
        prop_assert!(report.ok() && report.witnesses.is_empty());
    }

    #[test]
    fn representing_objects_count_edges(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 22);
        let sig = random_signature(&mut rng, 2, 2);
        let theory = random_theory(&mut rng, &sig, 4, 2);
        let x = random_model(&mut rng, &theory, 3).unwrap();
        for symbol in theory.signature.symbols.keys() {
            let rt = representing_object(&theory, symbol).unwrap();
            prop_assert_eq!(hom_count(&theory, &rt, &x).unwrap(), x.edges_with_symbol(symbol).count() as u64);
        }
        prop_assert!(final_density_sink(&theory, &x).unwrap().ok());
    }

    #[test]
    fn representing_objects_are_connected(seed in any::<u64>()) {
        let theory = condition_theory(seed, 23);
        let mut rng = instance_rng(seed, 24);
        let family = random_family(&mut rng, &theory, 3, 3).unwrap();
        for symbol in theory.signature.symbols.keys() {
            let rt = representing_object(&theory, symbol).unwrap();
            prop_assert!(check_connected(&theory, &rt, &family).unwrap());
        }
    }

    #[test]
    fn posets_are_extensive(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 25);
        let family = random_family(&mut rng, &pos(), 3, 3).unwrap();
        let co = coproduct(&pos(), &family).unwrap();
        let maps: Vec<_> = (0..rng.gen_range(1..=3)).map(|_| random_morphism_into(&mut rng, &pos(), &co.object, 4).unwrap()).collect();
        prop_assert!(check_extensivity(&pos(), &family, &maps).unwrap().ok());
        let x = random_model(&mut rng, &preord(), 2).unwrap();
        let small: Vec<_> = family.iter().take(2).cloned().collect();
        prop_assert!(check_distributivity(&preord(), &x, &small).unwrap());
    }
}
