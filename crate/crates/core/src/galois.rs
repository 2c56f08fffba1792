//! The relative Galois group of the top field over the middle field, and
//! seeded orbit transversals.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};

/// Largest supported relative group order.
pub const MAX_GROUP_ORDER: u32 = 32;

/// The SplitMix64 output function: add the golden gamma, then two
/// xor-shift-multiply rounds.
#[inline]
pub fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Absorbs a word sequence: `h = 0; for w in words { h = splitmix64(h ^ w) }`.
pub fn mix_words<I: IntoIterator<Item = u64>>(words: I) -> u64 {
    words.into_iter().fold(0, |h, w| splitmix64(h ^ w))
}

/// Gal(GF(p^k) / GF(p^m)): the maps `x -> x^(p^(m*j))` for `j < k/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelativeGaloisGroup {
    base_degree: u32,
    order: u32,
}

impl RelativeGaloisGroup {
    pub fn new(ctx: &FieldContext, base_degree: u32) -> Result<RelativeGaloisGroup> {
        let k = ctx.degree();
        if base_degree == 0 || !k.is_multiple_of(base_degree) {
            return Err(Error::NotDivisor {
                sub: base_degree,
                degree: k,
            });
        }
        let order = k / base_degree;
        if order > MAX_GROUP_ORDER {
            return Err(Error::InvalidParams(alloc::format!(
                "relative Galois group of order {order} exceeds {MAX_GROUP_ORDER}"
            )));
        }
        Ok(RelativeGaloisGroup { base_degree, order })
    }

    pub fn base_degree(&self) -> u32 {
        self.base_degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Applies the `j`-th element; `j = 0` is the identity.
    #[inline]
    pub fn apply(&self, ctx: &FieldContext, j: u32, x: FieldElement) -> FieldElement {
        ctx.frobenius(x, (self.base_degree as u64) * (j % self.order) as u64)
    }

    pub fn compose(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.order
    }

    pub fn inverse(&self, a: u32) -> u32 {
        (self.order - a % self.order) % self.order
    }

    /// The orbit of `x`, sorted and deduplicated.
    pub fn orbit(&self, ctx: &FieldContext, x: FieldElement) -> Vec<FieldElement> {
        let mut out: Vec<FieldElement> = (0..self.order).map(|j| self.apply(ctx, j, x)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Membership oracle for one orbit transversal `Y_slot`.
///
/// Each full orbit `Gx` has exactly one member: sort the orbit, absorb
/// `seed`, `slot` and the base-p digits (constant term first) of the orbit
/// minimum with [`mix_words`], and pick the element at that hash modulo the
/// orbit size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransversalOracle {
    slot: u32,
    seed: u64,
    group: RelativeGaloisGroup,
}

impl TransversalOracle {
    pub fn new(slot: u32, seed: u64, group: RelativeGaloisGroup) -> TransversalOracle {
        TransversalOracle { slot, seed, group }
    }

    pub fn slot(&self) -> u32 {
        self.slot
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn group(&self) -> &RelativeGaloisGroup {
        &self.group
    }

    pub fn is_member(&self, ctx: &FieldContext, x: FieldElement) -> Result<bool> {
        if ctx.in_subfield_union(x) {
            return Err(Error::InSubfieldUnion);
        }
        Ok(self.is_member_unchecked(ctx, x))
    }

    /// Same as [`is_member`](Self::is_member) without the subfield check.
    /// Caller guarantees `x` is outside every proper subfield.
    #[inline]
    pub fn is_member_unchecked(&self, ctx: &FieldContext, x: FieldElement) -> bool {
        let r = self.group.order as usize;
        if r == 1 {
            return true;
        }
        let mut buf = [FieldElement::ZERO; MAX_GROUP_ORDER as usize];
        for (j, slot) in buf[..r].iter_mut().enumerate() {
            *slot = self.group.apply(ctx, j as u32, x);
        }
        let orbit = &mut buf[..r];
        orbit.sort_unstable();
        let digits = ctx.coeffs(orbit[0]);
        let h = mix_words(
            [self.seed, self.slot as u64]
                .into_iter()
                .chain(digits.into_iter().map(u64::from)),
        );
        orbit[(h % r as u64) as usize] == x
    }
}
