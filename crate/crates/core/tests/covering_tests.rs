//! Covering-space suite: ball counts against the closed form, the deck
//! action's freeness and composition law, lift functoriality, monodromy as a
//! homomorphism, and the documented failure of the naive map into the
//! product bundle to be equivariant.

mod common;

use common::{random_word, scenario_for};
use holobundle::covering::{
    ball_size, deck_transform, fiber_ball, lift_loop, monodromy_holonomy, TreeVertex,
};
use holobundle::holonomy::HolonomyMap;
use holobundle::liegroups::{GroupElement, GroupTag};
use holobundle::Word;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn ball_counts_match_the_closed_form() {
    for rank in 1..=3u32 {
        for radius in 0..=6u32 {
            let expected = ball_size(rank, radius);
            let ball = fiber_ball(rank, radius, None).unwrap();
            assert_eq!(
                ball.len() as u128,
                expected,
                "rank {rank} radius {radius}"
            );
        }
    }
    // frozen spot values
    assert_eq!(ball_size(2, 3), 53);
    assert_eq!(ball_size(1, 3), 7);
    assert_eq!(ball_size(2, 1), 5);
}

#[test]
fn deck_action_is_free_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut tested = 0;
    while tested < 500 {
        let g = random_word(&mut rng, 2, 12);
        if g.is_identity() {
            continue;
        }
        let v = TreeVertex::from_word(random_word(&mut rng, 2, 12));
        let moved = deck_transform(&g, &v).unwrap();
        assert_ne!(moved, v, "{g} fixed {v}");
        tested += 1;
    }
}

#[test]
fn deck_action_composes_and_is_transitive() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let g1 = random_word(&mut rng, 3, 10);
        let g2 = random_word(&mut rng, 3, 10);
        let v = TreeVertex::from_word(random_word(&mut rng, 3, 10));
        let stepwise = deck_transform(&g1, &deck_transform(&g2, &v).unwrap()).unwrap();
        let joined = deck_transform(&g1.concat(&g2).unwrap(), &v).unwrap();
        assert_eq!(stepwise, joined);

        // transitivity: g = target * v^-1 moves v to target
        let target = TreeVertex::from_word(random_word(&mut rng, 3, 10));
        let g = target.word().concat(&v.word().invert()).unwrap();
        assert_eq!(deck_transform(&g, &v).unwrap(), target);
    }
}

#[test]
fn lifting_is_functorial() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..200 {
        let start = TreeVertex::from_word(random_word(&mut rng, 2, 10));
        let w1 = random_word(&mut rng, 2, 10);
        let w2 = random_word(&mut rng, 2, 10);
        let two_step = lift_loop(&w2, &lift_loop(&w1, &start).unwrap()).unwrap();
        let one_step = lift_loop(&w1.concat(&w2).unwrap(), &start).unwrap();
        assert_eq!(two_step, one_step);
    }
}

#[test]
fn monodromy_agrees_with_word_holonomy_and_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let scenario = scenario_for(GroupTag::Su2, 2, &mut rng);
    let map = HolonomyMap::from_scenario(&scenario);
    let root = TreeVertex::root(2);
    assert!(
        monodromy_holonomy(&map, &root)
            .unwrap()
            .distance(&GroupElement::identity(GroupTag::Su2))
            .unwrap()
            <= 1e-15
    );
    for _ in 0..100 {
        let w1 = random_word(&mut rng, 2, 12);
        let w2 = random_word(&mut rng, 2, 12);
        let v1 = TreeVertex::from_word(w1.clone());
        let joined = TreeVertex::from_word(w1.concat(&w2).unwrap());
        let composite = monodromy_holonomy(&map, &v1)
            .unwrap()
            .multiply(&map.holonomy_of_word(&w2).unwrap())
            .unwrap();
        let direct = monodromy_holonomy(&map, &joined).unwrap();
        assert!(direct.distance(&composite).unwrap() <= 1e-12);
    }

    // spot value: phi(c1 c2^-1) as a direct product of the images
    let word = Word::parse(2, "c1 c2^-1").unwrap();
    let vertex = TreeVertex::from_word(word);
    let expected = map
        .generator_image(1)
        .multiply(&map.generator_image(2).inverse())
        .unwrap();
    let got = monodromy_holonomy(&map, &vertex).unwrap();
    assert!(got.distance(&expected).unwrap() <= 1e-14);
}

/// The canonical map sending a cover point to `(base point, identity)` in
/// the product bundle is well defined but not a bundle morphism: it fails
/// equivariance against the holonomy action whenever the holonomy is
/// nontrivial. The witness makes the failure concrete.
#[test]
fn cover_to_product_bundle_map_is_not_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let scenario = scenario_for(GroupTag::Su2, 2, &mut rng);
    let map = HolonomyMap::from_scenario(&scenario);

    // the naive map tags every cover point with the identity gauge factor
    let fiber_factor = |_: &TreeVertex| GroupElement::identity(GroupTag::Su2);

    let witness_g = Word::parse(2, "c1").unwrap();
    let witness_y = TreeVertex::root(2);
    let moved = deck_transform(&witness_g, &witness_y).unwrap();

    // equivariance would need factor(g . y) = factor(y) * phi(g)
    let left = fiber_factor(&moved);
    let right = fiber_factor(&witness_y)
        .multiply(&map.holonomy_of_word(&witness_g).unwrap())
        .unwrap();
    let defect = left.distance(&right).unwrap();
    assert!(
        defect > 0.1,
        "equivariance unexpectedly holds (defect {defect:.3e}); the witness needs a nontrivial holonomy"
    );

    // the base points underneath do agree; only the group factor breaks
    assert_eq!(moved.rank(), witness_y.rank());
}

#[test]
fn enumeration_order_is_deterministic() {
    let a = fiber_ball(2, 4, None).unwrap();
    let b = fiber_ball(2, 4, None).unwrap();
    assert_eq!(a, b);
    // length-graded
    for pair in a.windows(2) {
        assert!(pair[0].word().len() <= pair[1].word().len());
    }
}
