//! The transversal family F, the norm hypergraphs H_t and the projective
//! norm hypergraph H.
//!
//! Tuples of F_q^d are addressed by mixed-radix codes over the canonical
//! subfield order, part 0 most significant. The same codes are the edge codes
//! of the basic hypergraphs, so edge indices are stable across runs.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::combinatorics::Partitioner;
use crate::error::{Error, Result};
use crate::field::{is_prime, FieldContext, FieldElement, DEFAULT_ENUMERATION_LIMIT};
use crate::galois::{RelativeGaloisGroup, TransversalOracle, MAX_GROUP_ORDER};
use crate::hypergraph::{DPartiteHypergraph, Variant, VertexLabel};

/// Reseeds allowed after the initial seed before giving up.
pub const MAX_RESEEDS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionParams {
    d: usize,
    sizes: Vec<u32>,
    p: u32,
    variant: Variant,
    seed: u64,
    m: u32,
    sub_degree: u32,
    top_degree: u32,
}

impl ConstructionParams {
    /// Validates the parameters and derives m, the degree of F_q and the
    /// degree of F_q'. Configurations whose tuple space q^d or top field
    /// exceed the desk-scale guard are refused unless `force` is set.
    pub fn derive(
        d: usize,
        sizes: &[u32],
        p: u32,
        variant: Variant,
        seed: u64,
        force: bool,
    ) -> Result<ConstructionParams> {
        if d < 2 {
            return Err(Error::InvalidParams(alloc::format!(
                "d = {d} must be at least 2"
            )));
        }
        if d - 1 > MAX_GROUP_ORDER as usize {
            return Err(Error::InvalidParams(alloc::format!("d = {d} is too large")));
        }
        if sizes.len() != d - 1 {
            return Err(Error::InvalidParams(alloc::format!(
                "expected {} part sizes, got {}",
                d - 1,
                sizes.len()
            )));
        }
        if let Some(s) = sizes.iter().find(|&&s| s < 2) {
            return Err(Error::InvalidParams(alloc::format!(
                "part size {s} must be at least 2"
            )));
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if variant == Variant::Basic && d == 2 {
            return Err(Error::InvalidParams(
                "the basic construction needs d >= 3; use the projective variant for d = 2".into(),
            ));
        }
        let m = sizes
            .iter()
            .try_fold(1u32, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::InvalidParams("product of sizes overflows".into()))?;
        let sub_degree = match variant {
            Variant::Basic => m,
            Variant::Projective => m - 1,
        };
        let top_degree = sub_degree
            .checked_mul(d as u32 - 1)
            .filter(|&k| k as usize <= crate::field::MAX_DEGREE)
            .ok_or_else(|| Error::InvalidParams("top field degree too large".into()))?;
        let params = ConstructionParams {
            d,
            sizes: sizes.to_vec(),
            p,
            variant,
            seed,
            m,
            sub_degree,
            top_degree,
        };
        if !force {
            let limit = DEFAULT_ENUMERATION_LIMIT as u128;
            let top = (p as u128).checked_pow(top_degree).unwrap_or(u128::MAX);
            if top > limit {
                return Err(Error::TooLarge { size: top, limit });
            }
            let tuples = params.tuple_count().unwrap_or(u128::MAX);
            if tuples > limit {
                return Err(Error::TooLarge {
                    size: tuples,
                    limit,
                });
            }
        }
        Ok(params)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// m = s_1 * ... * s_{d-1}.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Degree of F_q over F_p.
    pub fn sub_degree(&self) -> u32 {
        self.sub_degree
    }

    /// Degree of F_q' over F_p.
    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.sub_degree)
    }

    pub fn q_prime(&self) -> u128 {
        (self.p as u128).pow(self.top_degree)
    }

    fn tuple_count(&self) -> Option<u128> {
        self.q().checked_pow(self.d as u32)
    }

    /// Whether `|F|` meets `q^d / (2 (d-1)^d)`.
    pub fn meets_density(&self, family_size: usize) -> bool {
        let q_d = self.tuple_count().unwrap_or(u128::MAX);
        let scale = 2 * (self.d as u128 - 1).pow(self.d as u32);
        family_size as u128 * scale >= q_d
    }

    /// The density threshold rounded up.
    pub fn density_threshold(&self) -> usize {
        let q_d = self.tuple_count().unwrap_or(u128::MAX);
        let scale = 2 * (self.d as u128 - 1).pow(self.d as u32);
        q_d.div_ceil(scale) as usize
    }

    /// The factorial bound on common extensions of a full grid:
    /// (m(d-1))! for the basic variant and ((m-1)(d-1))! for the projective one.
    pub fn factorial_bound(&self) -> u128 {
        crate::field::factorial(self.top_degree as u64)
    }
}

/// The elements alpha_1..alpha_d with every (d-1)-subset independent over F_q,
/// plus the ratio table `ratio[i][j] = alpha_j / alpha_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSystem {
    alphas: Vec<FieldElement>,
    ratio: Vec<Vec<FieldElement>>,
    norms: Vec<u32>,
}

impl AlphaSystem {
    /// Wraps explicit alphas after certifying the independence invariant.
    pub fn new(
        ctx: &FieldContext,
        subfield: &[FieldElement],
        alphas: Vec<FieldElement>,
    ) -> Result<AlphaSystem> {
        if alphas.iter().any(|a| a.is_zero()) {
            return Err(Error::InvalidParams("alphas must be nonzero".into()));
        }
        if !subsets_independent(ctx, subfield, &alphas) {
            return Err(Error::InvalidParams(
                "some (d-1)-subset of alphas is dependent over F_q".into(),
            ));
        }
        let ratio = alphas
            .iter()
            .map(|&ai| {
                alphas
                    .iter()
                    .map(|&aj| ctx.div(aj, ai))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let norms = alphas.iter().map(|&a| ctx.norm_to_prime(a)).collect();
        Ok(AlphaSystem {
            alphas,
            ratio,
            norms,
        })
    }

    pub fn alphas(&self) -> &[FieldElement] {
        &self.alphas
    }

    /// alpha_j / alpha_i.
    pub fn ratio(&self, i: usize, j: usize) -> FieldElement {
        self.ratio[i][j]
    }

    /// N(alpha_i) as a prime-field residue.
    pub fn norm(&self, i: usize) -> u32 {
        self.norms[i]
    }
}

/// True when no nontrivial F_q-combination of any (d-1) of the alphas
/// vanishes. Enumerates all coefficient tuples.
fn subsets_independent(
    ctx: &FieldContext,
    subfield: &[FieldElement],
    alphas: &[FieldElement],
) -> bool {
    let d = alphas.len();
    let q = subfield.len();
    for skip in 0..d {
        let chosen: Vec<FieldElement> = (0..d).filter(|&i| i != skip).map(|i| alphas[i]).collect();
        let mut pos = vec![0usize; chosen.len()];
        loop {
            let mut i = pos.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < q {
                    break;
                }
                pos[i] = 0;
            }
            if pos.iter().all(|&c| c == 0) {
                break;
            }
            let sum = pos
                .iter()
                .zip(&chosen)
                .fold(FieldElement::ZERO, |acc, (&c, &a)| {
                    ctx.add(acc, ctx.mul(subfield[c], a))
                });
            if sum.is_zero() {
                return false;
            }
        }
    }
    true
}

/// The family F as sorted tuple codes, with the seed that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub seed: u64,
    pub reseeds: u32,
    pub codes: Vec<u64>,
}

impl Family {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// A witness that some L_i(x) equals a nontrivial conjugate of L_i(y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateCollision {
    pub form: usize,
    pub automorphism: u32,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

/// Everything needed to build and check the constructions for one
/// parameter set: the top field, the canonical F_q inside it, the relative
/// Galois group and the alphas.
#[derive(Debug, Clone)]
pub struct Construction {
    params: ConstructionParams,
    ctx: FieldContext,
    subfield: Vec<FieldElement>,
    group: RelativeGaloisGroup,
    alphas: AlphaSystem,
}

impl Construction {
    pub fn new(params: ConstructionParams) -> Result<Construction> {
        let ctx = FieldContext::new(params.p, params.top_degree)?.with_enumeration_limit(u64::MAX);
        Construction::with_context(params, ctx)
    }

    pub fn with_context(params: ConstructionParams, ctx: FieldContext) -> Result<Construction> {
        if ctx.characteristic() != params.p || ctx.degree() != params.top_degree {
            return Err(Error::InvalidParams(
                "field context does not match parameters".into(),
            ));
        }
        let subfield = ctx.enumerate_subfield(params.sub_degree)?;
        let group = RelativeGaloisGroup::new(&ctx, params.sub_degree)?;
        let alphas = choose_alphas(&ctx, &subfield, params.d)?;
        Ok(Construction {
            params,
            ctx,
            subfield,
            group,
            alphas,
        })
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn field(&self) -> &FieldContext {
        &self.ctx
    }

    /// F_q in canonical order.
    pub fn subfield(&self) -> &[FieldElement] {
        &self.subfield
    }

    pub fn group(&self) -> &RelativeGaloisGroup {
        &self.group
    }

    pub fn alphas(&self) -> &AlphaSystem {
        &self.alphas
    }

    /// Position of `x` in the canonical F_q order.
    pub fn subfield_index(&self, x: FieldElement) -> Option<u32> {
        self.subfield.binary_search(&x).ok().map(|i| i as u32)
    }

    fn q(&self) -> u64 {
        self.subfield.len() as u64
    }

    pub fn tuple_count(&self) -> u64 {
        self.q().pow(self.params.d as u32)
    }

    pub fn decode_tuple(&self, code: u64) -> Vec<u32> {
        let q = self.q();
        let d = self.params.d;
        let mut out = vec![0u32; d];
        let mut c = code;
        for slot in out.iter_mut().rev() {
            *slot = (c % q) as u32;
            c /= q;
        }
        out
    }

    pub fn encode_tuple(&self, idx: &[u32]) -> u64 {
        idx.iter().fold(0, |acc, &i| acc * self.q() + i as u64)
    }

    fn elements_of(&self, idx: &[u32]) -> Vec<FieldElement> {
        idx.iter().map(|&i| self.subfield[i as usize]).collect()
    }

    /// L_i(x) = sum over j != i of (alpha_j / alpha_i) x_j, 0-based `i`.
    pub fn linear_form(&self, i: usize, xs: &[FieldElement]) -> Result<FieldElement> {
        if i >= self.params.d || xs.len() != self.params.d {
            return Err(Error::InvalidParams(
                "linear form index or arity out of range".into(),
            ));
        }
        for &x in xs {
            if !self.ctx.in_subfield(x, self.params.sub_degree)? {
                return Err(Error::NotInSubfield);
            }
        }
        Ok(self.linear_form_unchecked(i, xs))
    }

    #[inline]
    fn linear_form_unchecked(&self, i: usize, xs: &[FieldElement]) -> FieldElement {
        xs.iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(FieldElement::ZERO, |acc, (j, &x)| {
                self.ctx.add(acc, self.ctx.mul(self.alphas.ratio[i][j], x))
            })
    }

    /// alpha_1 x_1 + ... + alpha_d x_d.
    pub fn weighted_sum(&self, xs: &[FieldElement]) -> FieldElement {
        xs.iter()
            .zip(&self.alphas.alphas)
            .fold(FieldElement::ZERO, |acc, (&x, &a)| {
                self.ctx.add(acc, self.ctx.mul(a, x))
            })
    }

    /// N(alpha_1 x_1 + ... + alpha_d x_d) for a tuple code.
    pub fn tuple_norm(&self, code: u64) -> u32 {
        let xs = self.elements_of(&self.decode_tuple(code));
        self.ctx.norm_to_prime(self.weighted_sum(&xs))
    }

    /// Transversal oracles for slots 1..=d.
    pub fn oracles(&self, seed: u64) -> Vec<TransversalOracle> {
        (1..=self.params.d as u32)
            .map(|slot| TransversalOracle::new(slot, seed, self.group))
            .collect()
    }

    /// Tuple codes in `range` that belong to F for the given seed.
    pub fn scan_family(&self, seed: u64, range: Range<u64>) -> Vec<u64> {
        let d = self.params.d;
        let oracles = self.oracles(seed);
        let mut xs = vec![FieldElement::ZERO; d];
        let mut out = Vec::new();
        for code in range {
            let idx = self.decode_tuple(code);
            for (x, &i) in xs.iter_mut().zip(&idx) {
                *x = self.subfield[i as usize];
            }
            let keep = (0..d).all(|i| {
                let l = self.linear_form_unchecked(i, &xs);
                !self.ctx.in_subfield_union(l) && oracles[i].is_member_unchecked(&self.ctx, l)
            });
            if keep {
                out.push(code);
            }
        }
        out
    }

    /// F for one seed, without the density policy. For d = 2 the relative
    /// Galois group is trivial and F is the full grid F_q^2.
    pub fn family_for_seed<P: Partitioner>(&self, seed: u64, partitioner: &P) -> Vec<u64> {
        let total = self.tuple_count();
        if self.params.d == 2 {
            return (0..total).collect();
        }
        partitioner
            .map_ranges(total, |r| self.scan_family(seed, r))
            .into_iter()
            .flatten()
            .collect()
    }

    /// F under the resampling policy: seeds `seed, seed + 1, ...` are tried
    /// until `|F| >= q^d / (2 (d-1)^d)`, at most [`MAX_RESEEDS`] times after
    /// the first.
    pub fn build_family<P: Partitioner>(&self, partitioner: &P) -> Result<Family> {
        let mut best = 0;
        for reseeds in 0..=MAX_RESEEDS {
            let seed = self.params.seed.wrapping_add(reseeds as u64);
            let codes = self.family_for_seed(seed, partitioner);
            if self.params.meets_density(codes.len()) {
                return Ok(Family {
                    seed,
                    reseeds,
                    codes,
                });
            }
            best = best.max(codes.len());
        }
        Err(Error::ReseedCapExceeded {
            attempts: MAX_RESEEDS + 1,
            best,
            threshold: self.params.density_threshold(),
        })
    }

    /// Norm of every family tuple, in family order.
    pub fn family_norms(&self, family: &Family) -> Vec<u32> {
        family.codes.iter().map(|&c| self.tuple_norm(c)).collect()
    }

    /// |H_t| for t = 1..p-1, at index t - 1.
    pub fn norm_class_sizes(&self, family: &Family) -> Vec<usize> {
        let mut counts = vec![0usize; self.params.p as usize - 1];
        for n in self.family_norms(family) {
            if n != 0 {
                counts[n as usize - 1] += 1;
            }
        }
        counts
    }

    /// Vertex labels of one part of a basic hypergraph.
    pub fn basic_labels(&self) -> Vec<VertexLabel> {
        self.subfield
            .iter()
            .map(|&x| VertexLabel::Element(self.ctx.format_element(x)))
            .collect()
    }

    /// Vertex labels of one part of a projective hypergraph: x-major,
    /// residue-minor.
    pub fn projective_labels(&self) -> Vec<VertexLabel> {
        let p = self.params.p;
        self.subfield
            .iter()
            .flat_map(|&x| {
                let s = self.ctx.format_element(x);
                (1..p).map(move |b| VertexLabel::Pair(s.clone(), b))
            })
            .collect()
    }

    /// H_t: the edges of F with N(sum alpha_j x_j) = t.
    pub fn build_ht(&self, family: &Family, t: u32) -> Result<DPartiteHypergraph> {
        if self.params.variant != Variant::Basic {
            return Err(Error::InvalidParams(
                "H_t belongs to the basic variant".into(),
            ));
        }
        if t == 0 || t >= self.params.p {
            return Err(Error::InvalidParams(alloc::format!(
                "t = {t} must be a nonzero residue mod {}",
                self.params.p
            )));
        }
        let codes = family
            .codes
            .iter()
            .copied()
            .filter(|&c| self.tuple_norm(c) == t)
            .collect();
        let parts = vec![self.basic_labels(); self.params.d];
        DPartiteHypergraph::from_sorted_codes(Variant::Basic, parts, codes)
    }

    /// The t with the largest H_t, smallest t on ties.
    pub fn best_t(&self, family: &Family) -> Result<(u32, DPartiteHypergraph)> {
        if family.is_empty() {
            return Err(Error::InvalidParams("the family is empty".into()));
        }
        let counts = self.norm_class_sizes(family);
        let mut best = 0;
        for (i, &c) in counts.iter().enumerate() {
            if c > counts[best] {
                best = i;
            }
        }
        let t = best as u32 + 1;
        Ok((t, self.build_ht(family, t)?))
    }

    /// The projective hypergraph on F_q x F_p^*: ((x_i, b_i))_i is an edge
    /// when (x_i) is in F and N(sum alpha_i x_i) = b_1 ... b_d.
    pub fn build_projective<P: Partitioner>(
        &self,
        family: &Family,
        partitioner: &P,
    ) -> Result<DPartiteHypergraph> {
        if self.params.variant != Variant::Projective {
            return Err(Error::InvalidParams(
                "projective build needs projective parameters".into(),
            ));
        }
        let d = self.params.d;
        let p = self.params.p as u64;
        let part = self.subfield.len() as u64 * (p - 1);
        let radix: Vec<u64> = (0..d).map(|i| part.pow((d - 1 - i) as u32)).collect();
        let free: u64 = (p - 1).pow(d as u32 - 1);
        let inverses: Vec<u64> = (0..p)
            .map(|b| if b == 0 { 0 } else { mod_pow(b, p - 2, p) })
            .collect();
        let chunks = partitioner.map_ranges(family.len() as u64, |r| {
            let mut out = Vec::new();
            for &code in &family.codes[r.start as usize..r.end as usize] {
                let n = self.tuple_norm(code) as u64;
                if n == 0 {
                    continue;
                }
                let idx = self.decode_tuple(code);
                for choice in 0..free {
                    let mut c = choice;
                    let mut prod = 1u64;
                    let mut edge = 0u64;
                    for i in (0..d - 1).rev() {
                        let b = c % (p - 1) + 1;
                        c /= p - 1;
                        prod = prod * b % p;
                        edge += (idx[i] as u64 * (p - 1) + b - 1) * radix[i];
                    }
                    let last = n * inverses[prod as usize] % p;
                    edge += (idx[d - 1] as u64 * (p - 1) + last - 1) * radix[d - 1];
                    out.push(edge);
                }
            }
            out
        });
        let mut codes: Vec<u64> = chunks.into_iter().flatten().collect();
        codes.sort_unstable();
        let parts = vec![self.projective_labels(); d];
        DPartiteHypergraph::from_sorted_codes(Variant::Projective, parts, codes)
    }

    /// Checks that no L_i value of a family tuple is a nontrivial Galois
    /// conjugate of another (or the same) tuple's L_i value.
    pub fn conjugate_collision(&self, codes: &[u64]) -> Option<ConjugateCollision> {
        let d = self.params.d;
        let r = self.group.order();
        for i in 0..d {
            let mut values: Vec<(FieldElement, u64)> = codes
                .iter()
                .map(|&c| {
                    (
                        self.linear_form_unchecked(i, &self.elements_of(&self.decode_tuple(c))),
                        c,
                    )
                })
                .collect();
            values.sort_unstable();
            for &(v, y) in &values {
                for g in 1..r {
                    let image = self.group.apply(&self.ctx, g, v);
                    let pos = values.partition_point(|&(w, _)| w < image);
                    if let Some(&(w, x)) = values.get(pos) {
                        if w == image {
                            return Some(ConjugateCollision {
                                form: i,
                                automorphism: g,
                                x: self.decode_tuple(x),
                                y: self.decode_tuple(y),
                            });
                        }
                    }
                }
            }
        }
        None
    }

    /// Recovers the F_q tuple behind a hypergraph edge of either variant.
    pub fn edge_to_tuple(&self, h: &DPartiteHypergraph, edge: &[u32]) -> Vec<u32> {
        match h.variant() {
            Variant::Basic => edge.to_vec(),
            Variant::Projective => edge.iter().map(|&v| v / (self.params.p - 1)).collect(),
        }
    }

    /// Field element and residue of a vertex of a hypergraph built from this
    /// construction (residue 1 for basic vertices).
    pub fn vertex_value(&self, variant: Variant, vertex: u32) -> (FieldElement, u32) {
        match variant {
            Variant::Basic => (self.subfield[vertex as usize], 1),
            Variant::Projective => {
                let w = self.params.p - 1;
                (self.subfield[(vertex / w) as usize], vertex % w + 1)
            }
        }
    }
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// alpha_i = gamma^(i-1) for i < d with gamma the canonical generator of
/// F_q', and alpha_d = alpha_1 + ... + alpha_{d-1}; certified afterwards.
pub fn choose_alphas(
    ctx: &FieldContext,
    subfield: &[FieldElement],
    d: usize,
) -> Result<AlphaSystem> {
    let gamma = ctx.find_generator();
    let mut alphas: Vec<FieldElement> = (0..d - 1).map(|i| ctx.pow(gamma, i as u128)).collect();
    let last = alphas
        .iter()
        .fold(FieldElement::ZERO, |acc, &a| ctx.add(acc, a));
    alphas.push(last);
    AlphaSystem::new(ctx, subfield, alphas).map_err(|e| match e {
        Error::InvalidParams(msg) => Error::Internal(msg),
        other => other,
    })
}
