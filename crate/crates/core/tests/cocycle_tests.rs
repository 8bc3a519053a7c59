//! Cocycle suite: the combinatorial counts, the relation-complete generator
//! across all groups and seeds, the gauge-change action laws, and the
//! trivialization construction with its independent verifier.

mod common;

use std::collections::BTreeMap;

use holobundle::cocycle::{
    apply_constant_lambda, count_cocycle_relations, count_transition_functions, random_cocycle,
    trivialize, validate_cocycle, verify_trivialization, CertificateFile, Cocycle, CoverSet,
    ARITHMETIC_TOL, CONSTRUCTION_TOL, VALIDATION_TOL,
};
use holobundle::liegroups::{self, GroupElement, GroupTag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn counts_match_the_closed_forms_up_to_rank_ten() {
    for n in 1..=10u32 {
        let n64 = n as u64;
        assert_eq!(count_transition_functions(n).unwrap(), 4 * n64 * n64);
        assert_eq!(
            count_cocycle_relations(n).unwrap(),
            n64 * (2 * n64 - 1) * (2 * n64 - 2) / 3
        );
    }
}

#[test]
fn generator_is_relation_complete_across_groups_and_seeds() {
    for tag in GroupTag::ALL {
        for rank in 1..=4u32 {
            for seed in 0..250u64 {
                let c = random_cocycle(rank, tag, seed).unwrap();
                let report = validate_cocycle(&c, 1e-12);
                assert!(
                    report.is_ok(),
                    "{tag:?} rank {rank} seed {seed}: residual {:.3e}",
                    report.max_residual
                );
            }
        }
    }
}

#[test]
fn lambda_action_satisfies_the_action_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let c = random_cocycle(3, GroupTag::Su3, 9).unwrap();
    let sets = c.cover().sets();
    let draw = |rng: &mut ChaCha8Rng| -> BTreeMap<CoverSet, GroupElement> {
        sets.iter()
            .map(|&s| (s, liegroups::random_element(GroupTag::Su3, rng, 1.0)))
            .collect()
    };
    let lambda1 = draw(&mut rng);
    let lambda2 = draw(&mut rng);

    // composition law: acting by lambda2 then lambda1 equals acting by the
    // pointwise product
    let step = apply_constant_lambda(&apply_constant_lambda(&c, &lambda2).unwrap(), &lambda1)
        .unwrap();
    let product: BTreeMap<CoverSet, GroupElement> = sets
        .iter()
        .map(|&s| (s, lambda1[&s].multiply(&lambda2[&s]).unwrap()))
        .collect();
    let joined = apply_constant_lambda(&c, &product).unwrap();
    for (pair, g) in step.wedge_values() {
        assert!(
            g.distance(joined.wedge_value(pair.0, pair.1)).unwrap() <= ARITHMETIC_TOL
        );
    }

    // the action preserves validity in both directions
    assert!(validate_cocycle(&joined, VALIDATION_TOL).is_ok());
    let mut tampered_wedge = c.wedge_values().clone();
    tampered_wedge.insert(
        (CoverSet::plus(1), CoverSet::plus(2)),
        liegroups::random_element(GroupTag::Su3, &mut rng, 1.0),
    );
    let invalid =
        Cocycle::from_raw(c.tag(), c.rank(), tampered_wedge, c.marked_values().clone()).unwrap();
    assert!(!validate_cocycle(&invalid, VALIDATION_TOL).is_ok());
    let still_invalid = apply_constant_lambda(&invalid, &lambda1).unwrap();
    assert!(!validate_cocycle(&still_invalid, VALIDATION_TOL).is_ok());
}

#[test]
fn trivialization_batch_passes_on_every_group() {
    for tag in GroupTag::ALL {
        for rank in 1..=3u32 {
            for seed in 0..10u64 {
                let c = random_cocycle(rank, tag, seed).unwrap();
                let triv = trivialize(&c, 33).unwrap();
                let report = verify_trivialization(&c, &triv, CONSTRUCTION_TOL).unwrap();
                assert!(
                    report.pass(),
                    "{tag:?} rank {rank} seed {seed}: residual {:.3e}, gap {:.3e}/{:.3e} at {}",
                    report.max_overlap_residual,
                    report.max_continuity_gap,
                    report.delta_max,
                    report.worst_overlap
                );
            }
        }
    }
}

#[test]
fn certificates_are_self_contained_and_tamper_evident() {
    let c = random_cocycle(2, GroupTag::Su2, 77).unwrap();
    let triv = trivialize(&c, 21).unwrap();
    let cert = CertificateFile::build(&c, &triv);
    let text = serde_json::to_string_pretty(&cert).unwrap();

    // verification out of nothing but the serialized text
    let reparsed: CertificateFile = serde_json::from_str(&text).unwrap();
    let (c2, t2) = reparsed.decode().unwrap();
    assert!(verify_trivialization(&c2, &t2, CONSTRUCTION_TOL)
        .unwrap()
        .pass());

    // flip one matrix entry: either membership breaks at decode or the
    // verifier reports a failure
    let mut corrupted: CertificateFile = serde_json::from_str(&text).unwrap();
    let map = corrupted.maps.values_mut().next().unwrap();
    map[3][0][0][0] += 0.01;
    match corrupted.decode() {
        Err(_) => {}
        Ok((c3, t3)) => {
            let report = verify_trivialization(&c3, &t3, CONSTRUCTION_TOL).unwrap();
            assert!(!report.pass(), "tampered certificate still verifies");
        }
    }
}

#[test]
fn trivialize_determinism_is_bitwise() {
    let c = random_cocycle(3, GroupTag::Sl2C, 13).unwrap();
    let a = trivialize(&c, 33).unwrap();
    let b = trivialize(&c, 33).unwrap();
    let cert_a = serde_json::to_string(&CertificateFile::build(&c, &a)).unwrap();
    let cert_b = serde_json::to_string(&CertificateFile::build(&c, &b)).unwrap();
    assert_eq!(cert_a, cert_b);
}

#[test]
fn even_sample_requests_are_rounded_up_to_odd() {
    let c = random_cocycle(1, GroupTag::U1, 5).unwrap();
    let triv = trivialize(&c, 16).unwrap();
    assert_eq!(triv.samples_per_set() % 2, 1);
    assert!(triv.samples_per_set() >= 17);
}
