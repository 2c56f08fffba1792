use std::collections::BTreeMap;

use nhg_core::{Construction, ConstructionParams, FieldElement, Sequential, Variant};

fn construction(d: usize, sizes: &[u32], p: u32, variant: Variant, seed: u64) -> Construction {
    Construction::new(ConstructionParams::derive(d, sizes, p, variant, seed, false).unwrap())
        .unwrap()
}

/// L_i recomputed from the alphas with explicit division.
fn form(c: &Construction, i: usize, xs: &[FieldElement]) -> FieldElement {
    let ctx = c.field();
    let a = c.alphas().alphas();
    let mut acc = ctx.zero();
    for (j, &x) in xs.iter().enumerate().filter(|&(j, _)| j != i) {
        acc = ctx.add(acc, ctx.mul(ctx.div(a[j], a[i]).unwrap(), x));
    }
    acc
}

fn values(c: &Construction, code: u64) -> Vec<FieldElement> {
    c.decode_tuple(code)
        .iter()
        .map(|&i| c.subfield()[i as usize])
        .collect()
}

#[test]
fn family_members_satisfy_the_defining_predicate() {
    let c = construction(3, &[2, 2], 2, Variant::Basic, 1);
    let f = c.build_family(&Sequential).unwrap();
    let oracles = c.oracles(f.seed);
    let ctx = c.field();
    let members: std::collections::BTreeSet<u64> = f.codes.iter().copied().collect();
    for code in 0..c.tuple_count() {
        let xs = values(&c, code);
        let expected = (0..3).all(|i| {
            let l = form(&c, i, &xs);
            !ctx.in_subfield_union(l) && oracles[i].is_member(ctx, l).unwrap()
        });
        assert_eq!(members.contains(&code), expected);
    }
    assert!(f.len() >= c.params().density_threshold());
}

#[test]
fn no_form_value_is_a_conjugate_of_another() {
    // pairwise check over all edges, i and nontrivial g
    for (p, variant) in [(2, Variant::Basic), (3, Variant::Projective)] {
        let c = construction(3, &[2, 2], p, variant, 5);
        let f = c.build_family(&Sequential).unwrap();
        let ctx = c.field();
        let g = c.group();
        for i in 0..3 {
            let mut seen: BTreeMap<FieldElement, u64> = BTreeMap::new();
            for &code in &f.codes {
                seen.insert(form(&c, i, &values(&c, code)), code);
            }
            for &v in seen.keys() {
                for h in 1..g.order() {
                    assert!(!seen.contains_key(&g.apply(ctx, h, v)));
                }
            }
        }
        assert_eq!(c.conjugate_collision(&f.codes), None);
    }
}

#[test]
fn norm_classes_partition_the_family() {
    for p in [2u32, 3] {
        let c = construction(3, &[2, 2], p, Variant::Basic, 3);
        let f = c.build_family(&Sequential).unwrap();
        let mut total = 0;
        let mut best = 0;
        for t in 1..p {
            let h = c.build_ht(&f, t).unwrap();
            for e in h.edges() {
                let xs: Vec<FieldElement> = e.iter().map(|&i| c.subfield()[i as usize]).collect();
                assert_eq!(c.field().norm_to_prime(c.weighted_sum(&xs)), t);
            }
            total += h.edge_count();
            best = best.max(h.edge_count());
        }
        assert_eq!(total, f.len());
        assert!(best * (p as usize - 1) >= f.len());
        let (t, h) = c.best_t(&f).unwrap();
        assert_eq!(h.edge_count(), best);
        assert_eq!(c.build_ht(&f, t).unwrap(), h);
    }
}

#[test]
fn projective_edges_follow_the_residue_rule() {
    let c = construction(3, &[2, 2], 3, Variant::Projective, 2);
    let f = c.build_family(&Sequential).unwrap();
    let h = c.build_projective(&f, &Sequential).unwrap();
    assert_eq!(h.edge_count(), f.len() * 4);
    let family: std::collections::BTreeSet<u64> = f.codes.iter().copied().collect();
    for e in h.edges() {
        let mut xs = Vec::new();
        let mut prod = 1;
        for &v in &e {
            let (x, b) = c.vertex_value(Variant::Projective, v);
            xs.push(x);
            prod = prod * b % 3;
        }
        assert_eq!(c.field().norm_to_prime(c.weighted_sum(&xs)), prod);
        assert!(family.contains(&c.encode_tuple(&c.edge_to_tuple(&h, &e))));
    }
}

#[test]
fn classical_projective_norm_graph() {
    // d = 2: x ~ y iff N(x + y) = a b with the norm from F_q to F_p
    for (p, s) in [(3u32, 2u32), (5, 2), (3, 3)] {
        let c = construction(2, &[s], p, Variant::Projective, 0);
        let f = c.build_family(&Sequential).unwrap();
        let h = c.build_projective(&f, &Sequential).unwrap();
        let q = c.subfield().len() as u64;
        let ctx = c.field();
        let pp = p as u64;
        let mut expected = 0usize;
        for xi in 0..q {
            for yi in 0..q {
                let sum = ctx.add(c.subfield()[xi as usize], c.subfield()[yi as usize]);
                let n = ctx.pow(sum, (q as u128 - 1) / (pp as u128 - 1));
                for a in 1..pp {
                    for b in 1..pp {
                        let edge = !sum.is_zero() && n == ctx.from_prime(a * b % pp);
                        let u = (xi * (pp - 1) + a - 1) as u32;
                        let v = (yi * (pp - 1) + b - 1) as u32;
                        assert_eq!(h.contains_edge(&[u, v]), edge);
                        expected += edge as usize;
                    }
                }
            }
        }
        assert_eq!(h.edge_count(), expected);
        assert_eq!(expected as u64, (q * q - q) * (pp - 1));
    }
}

#[test]
fn seeds_are_reproducible() {
    let a = construction(3, &[2, 2], 2, Variant::Basic, 9)
        .build_family(&Sequential)
        .unwrap();
    let b = construction(3, &[2, 2], 2, Variant::Basic, 9)
        .build_family(&Sequential)
        .unwrap();
    assert_eq!(a, b);
    let other = construction(3, &[2, 2], 2, Variant::Basic, 10)
        .build_family(&Sequential)
        .unwrap();
    assert_ne!(a.codes, other.codes);
}
