use nhg_core::field::{find_irreducible, is_irreducible};
use nhg_core::{FieldContext, FieldElement};
use proptest::prelude::*;
use std::sync::OnceLock;

/// Schoolbook product of coefficient vectors (constant term first) reduced by
/// the monic modulus, all in plain integer arithmetic.
fn naive_mul(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for top in (k..2 * k).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            let pos = top - k + i;
            prod[pos] = (prod[pos] + (p as u64 - c) * m as u64) % p as u64;
        }
    }
    prod[..k].iter().map(|&c| c as u32).collect()
}

fn small_contexts() -> Vec<FieldContext> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5, 7, 11, 13] {
        let mut k = 1;
        while (p as u64).pow(k) <= 256 {
            out.push(FieldContext::new(p, k).unwrap());
            k += 1;
        }
    }
    out
}

#[test]
fn multiplication_matches_naive_polynomials() {
    for ctx in small_contexts() {
        let (p, modulus) = (ctx.characteristic(), ctx.modulus().to_vec());
        let elems: Vec<FieldElement> = ctx.elements().unwrap().collect();
        for &a in elems.iter().step_by(3) {
            for &b in &elems {
                let expected = naive_mul(&ctx.coeffs(a), &ctx.coeffs(b), &modulus, p);
                assert_eq!(ctx.coeffs(ctx.mul(a, b)), expected, "{ctx}");
                assert_eq!(ctx.mul(a, b), ctx.mul_poly(a, b));
            }
        }
    }
}

#[test]
fn prime_field_matches_integers() {
    for p in [2u32, 3, 5, 7, 11, 13, 251] {
        let ctx = FieldContext::new(p, 1).unwrap();
        for a in 0..p as u64 {
            for b in 0..p as u64 {
                let (x, y) = (ctx.from_prime(a), ctx.from_prime(b));
                assert_eq!(
                    ctx.to_prime(ctx.add(x, y)),
                    Some(((a + b) % p as u64) as u32)
                );
                assert_eq!(
                    ctx.to_prime(ctx.mul(x, y)),
                    Some(((a * b) % p as u64) as u32)
                );
            }
        }
    }
}

#[test]
fn norm_fibres_are_equal() {
    for ctx in small_contexts() {
        let p = ctx.characteristic() as usize;
        let mut fibre = vec![0u64; p];
        for a in ctx.elements().unwrap().filter(|a| !a.is_zero()) {
            fibre[ctx.norm_to_prime(a) as usize] += 1;
        }
        for a in ctx.elements().unwrap() {
            assert_eq!(ctx.norm(a), ctx.norm_to_prime(a));
        }
        assert_eq!(fibre[0], 0);
        let expected = (ctx.order() - 1) / (p as u64 - 1);
        assert!(fibre[1..].iter().all(|&n| n == expected), "{ctx}");
        assert_eq!(ctx.norm_to_prime(ctx.zero()), 0);
    }
}

#[test]
fn subfields_are_fixed_points() {
    for ctx in small_contexts() {
        for j in (1..=ctx.degree()).filter(|j| ctx.degree() % j == 0) {
            let fixed: Vec<FieldElement> = ctx
                .elements()
                .unwrap()
                .filter(|&a| ctx.frobenius(a, j as u64) == a)
                .collect();
            assert_eq!(fixed, ctx.enumerate_subfield(j).unwrap());
            assert_eq!(fixed.len() as u64, (ctx.characteristic() as u64).pow(j));
        }
    }
}

#[test]
fn low_degree_irreducibility_is_rootlessness() {
    for p in [2u32, 3, 5] {
        for k in 2..=3 {
            let mut count = 0;
            let total = (p as u64).pow(k);
            for idx in 0..total {
                let mut poly: Vec<u32> = (0..k)
                    .map(|i| ((idx / (p as u64).pow(i)) % p as u64) as u32)
                    .collect();
                poly.push(1);
                let has_root = (0..p as u64).any(|x| {
                    poly.iter()
                        .rev()
                        .fold(0u64, |acc, &c| (acc * x + c as u64) % p as u64)
                        == 0
                });
                assert_eq!(is_irreducible(&poly, p), !has_root);
                count += !has_root as u32;
            }
            // monic irreducibles of degree 2: (p^2 - p)/2, degree 3: (p^3 - p)/3
            assert_eq!(count, (p.pow(k) - p) / k);
            assert!(is_irreducible(&find_irreducible(p, k).unwrap(), p));
        }
    }
}

#[test]
fn generator_has_full_order() {
    for ctx in small_contexts() {
        let g = ctx.find_generator();
        let mut seen = std::collections::BTreeSet::new();
        let mut x = ctx.one();
        for _ in 0..ctx.order() - 1 {
            assert!(seen.insert(x));
            x = ctx.mul(x, g);
        }
        assert_eq!(x, ctx.one());
    }
}

fn contexts() -> &'static [FieldContext] {
    static CONTEXTS: OnceLock<Vec<FieldContext>> = OnceLock::new();
    CONTEXTS.get_or_init(|| {
        [
            (2u32, 12u32),
            (3, 7),
            (5, 4),
            (2, 30),
            (7, 9),
            (1_000_003, 2),
        ]
        .into_iter()
        .map(|(p, k)| FieldContext::new(p, k).unwrap())
        .collect()
    })
}

fn context_strategy() -> impl Strategy<Value = FieldContext> {
    (0..contexts().len()).prop_map(|i| contexts()[i].clone())
}

fn with_elements(n: usize) -> impl Strategy<Value = (FieldContext, Vec<FieldElement>)> {
    context_strategy().prop_flat_map(move |ctx| {
        let order = ctx.order();
        (
            Just(ctx),
            proptest::collection::vec((0..order).prop_map(FieldElement::from_index), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((ctx, v) in with_elements(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(ctx.add(a, b), ctx.add(b, a));
        prop_assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
        prop_assert_eq!(ctx.add(ctx.add(a, b), c), ctx.add(a, ctx.add(b, c)));
        prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
        prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
        prop_assert_eq!(ctx.add(a, ctx.neg(a)), ctx.zero());
        prop_assert_eq!(ctx.sub(ctx.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), ctx.one());
        }
    }

    #[test]
    fn frobenius_is_a_homomorphism((ctx, v) in with_elements(2), j in 0u64..8) {
        let (a, b) = (v[0], v[1]);
        prop_assert_eq!(ctx.frobenius(ctx.add(a, b), j), ctx.add(ctx.frobenius(a, j), ctx.frobenius(b, j)));
        prop_assert_eq!(ctx.frobenius(ctx.mul(a, b), j), ctx.mul(ctx.frobenius(a, j), ctx.frobenius(b, j)));
        let p = ctx.characteristic() as u128;
        prop_assert_eq!(ctx.frobenius(a, 1), ctx.pow(a, p));
        prop_assert_eq!(ctx.frobenius(a, ctx.degree() as u64), a);
    }

    #[test]
    fn norm_is_a_power((ctx, v) in with_elements(2)) {
        let a = v[0];
        let p = ctx.characteristic() as u128;
        let e = (ctx.order() as u128 - 1) / (p - 1);
        prop_assert_eq!(ctx.from_prime(ctx.norm_to_prime(a) as u64), ctx.pow(a, e));
        prop_assert_eq!(ctx.norm(a), ctx.norm_to_prime(a));
        let nab = ctx.norm_to_prime(ctx.mul(a, v[1])) as u64;
        prop_assert_eq!(nab, ctx.norm_to_prime(a) as u64 * ctx.norm_to_prime(v[1]) as u64 % p as u64);
    }

    #[test]
    fn serialization_round_trips((ctx, v) in with_elements(1)) {
        let s = ctx.format_element(v[0]);
        prop_assert_eq!(ctx.parse_element(&s).unwrap(), v[0]);
    }
}

#[test]
fn descriptors_round_trip() {
    for ctx in small_contexts().iter().chain(contexts()) {
        let again = FieldContext::parse_descriptor(&ctx.to_string()).unwrap();
        assert_eq!(again.modulus(), ctx.modulus());
        assert_eq!(again.find_generator(), ctx.find_generator());
    }
}
