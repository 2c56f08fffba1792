use std::collections::BTreeSet;

use nhg_core::{FieldContext, RelativeGaloisGroup, TransversalOracle};
use proptest::prelude::*;

/// (p, k, base degree) with p^k <= 2^16 and base degree a proper divisor.
const TOWERS: &[(u32, u32, u32)] = &[
    (2, 8, 4),
    (2, 8, 2),
    (2, 12, 4),
    (2, 12, 6),
    (2, 16, 8),
    (3, 4, 2),
    (3, 6, 3),
    (3, 6, 2),
    (5, 4, 2),
    (7, 2, 1),
    (13, 3, 1),
];

/// Proper-subfield membership by brute force: x lies in GF(p^j) for some
/// proper divisor j of k.
fn in_proper_subfield(ctx: &FieldContext, x: nhg_core::FieldElement) -> bool {
    let k = ctx.degree();
    (1..k)
        .filter(|j| k.is_multiple_of(*j))
        .any(|j| ctx.pow(x, (ctx.characteristic() as u128).pow(j)) == x)
}

#[test]
fn subfield_union_matches_brute_force() {
    for &(p, k, _) in TOWERS {
        let ctx = FieldContext::new(p, k).unwrap();
        for x in ctx.elements().unwrap() {
            assert_eq!(ctx.in_subfield_union(x), in_proper_subfield(&ctx, x));
        }
    }
}

#[test]
fn transversals_pick_one_per_orbit() {
    for &(p, k, base) in TOWERS {
        let ctx = FieldContext::new(p, k).unwrap();
        let group = RelativeGaloisGroup::new(&ctx, base).unwrap();
        let r = group.order() as usize;
        for seed in [0u64, 1, 0xDEAD_BEEF] {
            let oracle = TransversalOracle::new(2, seed, group);
            let mut orbits = BTreeSet::new();
            let mut members = 0usize;
            let mut outside = 0usize;
            for x in ctx
                .elements()
                .unwrap()
                .filter(|&x| !ctx.in_subfield_union(x))
            {
                outside += 1;
                let orbit = group.orbit(&ctx, x);
                assert_eq!(orbit.len(), r, "outside S every orbit is full");
                let hits = orbit
                    .iter()
                    .filter(|&&y| oracle.is_member(&ctx, y).unwrap())
                    .count();
                assert_eq!(hits, 1);
                if oracle.is_member(&ctx, x).unwrap() {
                    members += 1;
                }
                orbits.insert(orbit[0]);
            }
            assert_eq!(members, orbits.len());
            assert_eq!(members * r, outside);
        }
    }
}

#[test]
fn slots_and_seeds_vary_the_choice() {
    let ctx = FieldContext::new(2, 8).unwrap();
    let group = RelativeGaloisGroup::new(&ctx, 4).unwrap();
    let pick = |slot, seed| -> Vec<bool> {
        let o = TransversalOracle::new(slot, seed, group);
        ctx.elements()
            .unwrap()
            .filter(|&x| !ctx.in_subfield_union(x))
            .map(|x| o.is_member(&ctx, x).unwrap())
            .collect()
    };
    assert_ne!(pick(1, 0), pick(2, 0));
    assert_ne!(pick(1, 0), pick(1, 1));
    assert_eq!(pick(3, 5), pick(3, 5));
}

proptest! {
    #[test]
    fn orbit_is_galois_stable(idx in 0u64..4096, j in 0u32..6) {
        let ctx = FieldContext::new(2, 12).unwrap();
        let group = RelativeGaloisGroup::new(&ctx, 2).unwrap();
        let x = nhg_core::FieldElement::from_index(idx);
        let orbit = group.orbit(&ctx, x);
        prop_assert_eq!(group.orbit(&ctx, group.apply(&ctx, j, x)), orbit.clone());
        prop_assert_eq!(group.order() as usize % orbit.len(), 0);
    }
}
