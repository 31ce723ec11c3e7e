mod common;

use common::{chain, le};
use horncat::builtin::{pos, preord};
use horncat::catops::{
    coequalizer, coproduct, equalizer, final_lift, initial_lift, is_embedding, is_final_sink, is_initial_source,
    is_isomorphism, is_quotient, product, pullback, Sink, Source,
};
use horncat::gen::{instance_rng, random_function, random_model, random_morphism_into, GenRng};
use horncat::hom::{functions, hom_maps};
use horncat::theory::is_model;
use horncat::universal::{
    coequalizer_by_definition, coproduct_by_definition, equalizer_by_definition, final_by_definition,
    initial_by_definition, product_by_definition, pullback_by_definition, test_models,
};
use horncat::{ElementMap, Morphism, Parallelism, Structure};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn preorder(rng: &mut GenRng, max: usize) -> Structure {
    random_model(rng, &preord(), max).unwrap()
}

/// A random morphism `x → y`, if there is one.
fn some_hom(rng: &mut GenRng, x: &Structure, y: &Structure) -> Option<Morphism> {
    let homs = hom_maps(x, y, Parallelism::Sequential).unwrap();
    let h = homs.choose(rng)?.clone();
    Some(Morphism::new(x.clone(), y.clone(), h).unwrap())
}

/// True iff some morphism `cod → dom` is inverse to `h` on both sides.
fn has_inverse(h: &Morphism) -> bool {
    hom_maps(h.cod(), h.dom(), Parallelism::Sequential)
        .unwrap()
        .iter()
        .any(|k| {
            h.map().then(k).unwrap() == ElementMap::identity(&h.dom().carrier)
                && k.then(h.map()).unwrap() == ElementMap::identity(&h.cod().carrier)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifts_are_initial_and_final(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 10);
        let tests = test_models(&preord(), 2).unwrap();
        let n = rng.gen_range(0..=3);
        let s = horncat::gen::carrier_of_size(n);
        let k = rng.gen_range(0..=2);
        let targets: Vec<Structure> = (0..k).map(|_| preorder(&mut rng, 3)).filter(|t| n == 0 || !t.is_empty()).collect();
        let legs: Vec<(ElementMap, Structure)> = targets
            .iter()
            .map(|t| (random_function(&mut rng, &s, &t.carrier).unwrap(), t.clone()))
            .collect();
        let apex = initial_lift(&preord(), &s, &legs).unwrap();
        prop_assert!(is_model(&preord(), &apex));
        let morphisms: Vec<Morphism> = legs.iter().map(|(h, t)| Morphism::new(apex.clone(), t.clone(), h.clone()).unwrap()).collect();
        let src = Source::new(apex.clone(), morphisms).unwrap();
        prop_assert!(is_initial_source(&preord(), &src).unwrap());
        prop_assert!(initial_by_definition(&src, &tests).unwrap());

        let sources: Vec<Structure> = (0..k).map(|_| preorder(&mut rng, 3)).filter(|x| n > 0 || x.is_empty()).collect();
        let legs: Vec<(Structure, ElementMap)> = sources
            .iter()
            .map(|x| (x.clone(), random_function(&mut rng, &x.carrier, &s).unwrap()))
            .collect();
        let apex = final_lift(&preord(), &s, &legs).unwrap();
        prop_assert!(is_model(&preord(), &apex));
        let morphisms: Vec<Morphism> = legs.iter().map(|(x, h)| Morphism::new(x.clone(), apex.clone(), h.clone()).unwrap()).collect();
        let snk = Sink::new(apex, morphisms).unwrap();
        prop_assert!(is_final_sink(&preord(), &snk).unwrap());
        prop_assert!(final_by_definition(&snk, &tests).unwrap());
    }

    #[test]
    fn limits_satisfy_their_universal_properties(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 11);
        let tests = test_models(&preord(), 2).unwrap();
        let factors: Vec<Structure> = (0..rng.gen_range(0..=2)).map(|_| preorder(&mut rng, 2)).collect();
        let p = product(&preord(), &factors).unwrap();
        prop_assert!(product_by_definition(&p, &factors, &tests).unwrap());

        let c = preorder(&mut rng, 3);
        let f = random_morphism_into(&mut rng, &preord(), &c, 3).unwrap();
        let g = random_morphism_into(&mut rng, &preord(), &c, 3).unwrap();
        let pb = pullback(&preord(), &f, &g).unwrap();
        prop_assert!(pullback_by_definition(&pb, &f, &g, &tests).unwrap());
        let src = Source::new(pb.object.clone(), vec![pb.proj_left.clone(), pb.proj_right.clone()]).unwrap();
        prop_assert!(is_initial_source(&preord(), &src).unwrap());

        if let Some(g2) = some_hom(&mut rng, f.dom(), f.cod()) {
            let e = equalizer(&preord(), &f, &g2).unwrap();
            prop_assert!(equalizer_by_definition(&e, &f, &g2, &tests).unwrap());
            prop_assert!(is_embedding(&preord(), &e.inclusion).unwrap());
        }
    }

    #[test]
    fn colimits_satisfy_their_universal_properties(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 12);
        for theory in [preord(), pos()] {
            let tests = test_models(&theory, 2).unwrap();
            let family: Vec<Structure> = (0..rng.gen_range(0..=3))
                .map(|_| random_model(&mut rng, &theory, 3).unwrap())
                .collect();
            let co = coproduct(&theory, &family).unwrap();
            prop_assert!(is_model(&theory, &co.object));
            prop_assert!(coproduct_by_definition(&co, &family, &tests).unwrap());
            for s in &co.insertions {
                prop_assert!(is_embedding(&preord(), s).unwrap());
            }

            let y = random_model(&mut rng, &theory, 3).unwrap();
            let f = random_morphism_into(&mut rng, &theory, &y, 3).unwrap();
            if let Some(g) = some_hom(&mut rng, f.dom(), &y) {
                let q = coequalizer(&theory, &f, &g).unwrap();
                prop_assert!(is_model(&theory, q.cod()));
                prop_assert!(q.is_surjective());
                prop_assert!(coequalizer_by_definition(&q, &f, &g, &tests).unwrap());
                if !theory.uses_equality() {
                    prop_assert!(is_quotient(&theory, &q).unwrap());
                }
            }
        }
    }

    #[test]
    fn isomorphisms_are_bijective_embeddings_and_quotients(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 13);
        let y = preorder(&mut rng, 3);
        let x = Structure { carrier: y.carrier.clone(), edges: y.edges.iter().filter(|_| rng.gen_bool(0.8)).cloned().collect() };
        let x = horncat::saturate::free_model(&preord(), &x).unwrap();
        let h = some_hom(&mut rng, &x, &y).unwrap();
        let iso = is_isomorphism(&preord(), &h).unwrap();
        prop_assert_eq!(iso, has_inverse(&h));
        prop_assert_eq!(iso, h.is_bijective() && is_embedding(&preord(), &h).unwrap());
        prop_assert_eq!(iso, h.is_bijective() && is_quotient(&preord(), &h).unwrap());
    }
}

#[test]
fn initiality_agrees_with_its_definition_exhaustively() {
    // Every singleton source between preorders on at most 3 points.
    let models = test_models(&preord(), 3).unwrap();
    let tests = test_models(&preord(), 2).unwrap();
    let mut checked = 0;
    for x in &models {
        for y in &models {
            for h in functions(&x.carrier, &y.carrier).unwrap() {
                let Ok(m) = Morphism::new(x.clone(), y.clone(), h) else { continue };
                if !m.preserves_edges() {
                    continue;
                }
                let src = Source::new(x.clone(), vec![m.clone()]).unwrap();
                assert_eq!(is_initial_source(&preord(), &src).unwrap(), initial_by_definition(&src, &tests).unwrap());
                let snk = Sink::new(y.clone(), vec![m]).unwrap();
                assert_eq!(is_final_sink(&preord(), &snk).unwrap(), final_by_definition(&snk, &tests).unwrap());
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn pos_coequalizer_of_a_forced_cycle() {
    let chains = coproduct(&pos(), &[chain(2), chain(2)]).unwrap().object;
    let two = Structure::new(["u", "v"], [le("u", "u"), le("v", "v")]);
    let f = Morphism::new(two.clone(), chains.clone(), ElementMap::new([("u", "0.0"), ("v", "0.1")])).unwrap();
    let g = Morphism::new(two, chains, ElementMap::new([("u", "1.1"), ("v", "1.0")])).unwrap();
    let q = coequalizer(&pos(), &f, &g).unwrap();
    assert_eq!(q.cod().carrier.len(), 1);
    let tests = test_models(&pos(), 2).unwrap();
    assert!(coequalizer_by_definition(&q, &f, &g, &tests).unwrap());
}
