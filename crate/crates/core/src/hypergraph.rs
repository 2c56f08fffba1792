//! d-partite d-uniform hypergraphs and complete d-partite subgraph search.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::combinatorics::{binomial, next_combination, next_permutation};
use crate::error::{Error, Result};

/// Which construction a hypergraph's labels come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Basic,
    Projective,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Basic => "basic",
            Variant::Projective => "projective",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "basic" => Ok(Variant::Basic),
            "projective" => Ok(Variant::Projective),
            other => Err(Error::Parse(alloc::format!("unknown variant {other:?}"))),
        }
    }
}

/// A vertex label: a serialized field element, or an (element, residue)
/// pair for the projective variant. Pairs print as `element,residue`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexLabel {
    Element(String),
    Pair(String, u32),
}

impl VertexLabel {
    pub fn element(&self) -> &str {
        match self {
            VertexLabel::Element(s) | VertexLabel::Pair(s, _) => s,
        }
    }

    pub fn residue(&self) -> Option<u32> {
        match self {
            VertexLabel::Element(_) => None,
            VertexLabel::Pair(_, b) => Some(*b),
        }
    }

    pub fn parse(s: &str, variant: Variant) -> Result<VertexLabel> {
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(Error::Parse(alloc::format!("bad vertex label {s:?}")));
        }
        match variant {
            Variant::Basic => Ok(VertexLabel::Element(s.into())),
            Variant::Projective => {
                let (x, b) = s.rsplit_once(',').ok_or_else(|| {
                    Error::Parse(alloc::format!("projective label {s:?} lacks ',b'"))
                })?;
                let b: u32 = b
                    .parse()
                    .map_err(|_| Error::Parse(alloc::format!("bad residue in label {s:?}")))?;
                if b == 0 || x.is_empty() {
                    return Err(Error::Parse(alloc::format!(
                        "label {s:?} needs a nonzero residue"
                    )));
                }
                Ok(VertexLabel::Pair(x.into(), b))
            }
        }
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Element(s) => f.write_str(s),
            VertexLabel::Pair(s, b) => write!(f, "{s},{b}"),
        }
    }
}

/// Edges are stored as sorted mixed-radix codes with part 0 most
/// significant, so code order equals lexicographic tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPartiteHypergraph {
    variant: Variant,
    parts: Vec<Vec<VertexLabel>>,
    radix: Vec<u64>,
    edges: Vec<u64>,
}

fn radix_for(sizes: &[usize]) -> Result<Vec<u64>> {
    let mut radix = vec![1u64; sizes.len()];
    let mut acc: u64 = 1;
    for i in (0..sizes.len()).rev() {
        radix[i] = acc;
        acc = acc
            .checked_mul(sizes[i].max(1) as u64)
            .ok_or_else(|| Error::InvalidParams("edge space exceeds 64 bits".into()))?;
    }
    Ok(radix)
}

impl DPartiteHypergraph {
    pub fn new<I, E>(
        variant: Variant,
        parts: Vec<Vec<VertexLabel>>,
        edges: I,
    ) -> Result<DPartiteHypergraph>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        let mut h = DPartiteHypergraph::empty(variant, parts)?;
        let mut codes = Vec::new();
        for e in edges {
            codes.push(h.encode(e.as_ref())?);
        }
        let n = codes.len();
        codes.sort_unstable();
        codes.dedup();
        if codes.len() != n {
            return Err(Error::InvalidParams("duplicate edge".into()));
        }
        h.edges = codes;
        Ok(h)
    }

    /// A hypergraph with the given parts and no edges.
    pub fn empty(variant: Variant, parts: Vec<Vec<VertexLabel>>) -> Result<DPartiteHypergraph> {
        if parts.is_empty() {
            return Err(Error::InvalidParams(
                "a hypergraph needs at least one part".into(),
            ));
        }
        for (i, part) in parts.iter().enumerate() {
            let distinct: BTreeSet<&VertexLabel> = part.iter().collect();
            if distinct.len() != part.len() {
                return Err(Error::InvalidParams(alloc::format!(
                    "duplicate label in part {i}"
                )));
            }
            let pairs = part
                .iter()
                .all(|l| matches!(l, VertexLabel::Pair(_, b) if *b > 0));
            let plain = part.iter().all(|l| matches!(l, VertexLabel::Element(_)));
            if (variant == Variant::Projective && !pairs) || (variant == Variant::Basic && !plain) {
                return Err(Error::InvalidParams(alloc::format!(
                    "labels in part {i} do not match variant {variant}"
                )));
            }
        }
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        Ok(DPartiteHypergraph {
            variant,
            radix: radix_for(&sizes)?,
            parts,
            edges: Vec::new(),
        })
    }

    /// Builds from already-sorted, duplicate-free edge codes.
    pub fn from_sorted_codes(
        variant: Variant,
        parts: Vec<Vec<VertexLabel>>,
        codes: Vec<u64>,
    ) -> Result<DPartiteHypergraph> {
        let mut h = DPartiteHypergraph::empty(variant, parts)?;
        let space: u64 = h.parts.iter().map(|p| p.len() as u64).product();
        if codes.windows(2).any(|w| w[0] >= w[1]) || codes.last().is_some_and(|&c| c >= space) {
            return Err(Error::InvalidParams(
                "edge codes must be sorted, distinct and in range".into(),
            ));
        }
        h.edges = codes;
        Ok(h)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn uniformity(&self) -> usize {
        self.parts.len()
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, part: usize) -> &[VertexLabel] {
        &self.parts[part]
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn encode(&self, edge: &[u32]) -> Result<u64> {
        if edge.len() != self.parts.len() {
            return Err(Error::InvalidParams(alloc::format!(
                "edge has {} entries, expected {}",
                edge.len(),
                self.parts.len()
            )));
        }
        let mut code = 0;
        for (i, &v) in edge.iter().enumerate() {
            if v as usize >= self.parts[i].len() {
                return Err(Error::InvalidParams(alloc::format!(
                    "vertex {v} not in part {i}"
                )));
            }
            code += v as u64 * self.radix[i];
        }
        Ok(code)
    }

    pub fn decode(&self, code: u64) -> Vec<u32> {
        self.radix
            .iter()
            .zip(&self.parts)
            .map(|(&r, part)| ((code / r) % part.len() as u64) as u32)
            .collect()
    }

    pub fn edge_codes(&self) -> &[u64] {
        &self.edges
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.edges.iter().map(|&c| self.decode(c))
    }

    pub fn contains_edge(&self, edge: &[u32]) -> bool {
        self.encode(edge)
            .map(|c| self.edges.binary_search(&c).is_ok())
            .unwrap_or(false)
    }

    /// Vertex degrees in `part`.
    pub fn degrees(&self, part: usize) -> Vec<usize> {
        let mut deg = vec![0usize; self.parts[part].len()];
        for e in self.edges() {
            deg[e[part] as usize] += 1;
        }
        deg
    }

    /// Map from degree to the number of vertices in `part` with it.
    pub fn degree_histogram(&self, part: usize) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for d in self.degrees(part) {
            *hist.entry(d).or_insert(0) += 1;
        }
        hist
    }

    /// Vertices of `target` completing every tuple drawn from `subsets`
    /// (one subset per other part, in part order) to an edge.
    pub fn common_extensions(&self, subsets: &[Vec<u32>], target: usize) -> Result<Vec<u32>> {
        LinkIndex::new(self, target)?.common_extensions(subsets)
    }
}

type Bits = Vec<u64>;

#[derive(Debug, Clone)]
enum LinkStorage {
    Dense(Vec<u64>),
    Sparse(BTreeMap<u64, Bits>),
}

/// For one target part, the set of target vertices completing each tuple of
/// the other parts, as bitsets.
#[derive(Debug, Clone)]
pub struct LinkIndex {
    target: usize,
    others: Vec<usize>,
    other_sizes: Vec<usize>,
    radix: Vec<u64>,
    target_size: usize,
    words: usize,
    storage: LinkStorage,
}

const DENSE_LINK_WORDS: u64 = 1 << 24;

impl LinkIndex {
    pub fn new(h: &DPartiteHypergraph, target: usize) -> Result<LinkIndex> {
        let d = h.uniformity();
        if target >= d {
            return Err(Error::InvalidParams(alloc::format!(
                "target part {target} out of range"
            )));
        }
        let others: Vec<usize> = (0..d).filter(|&i| i != target).collect();
        let other_sizes: Vec<usize> = others.iter().map(|&i| h.parts[i].len()).collect();
        let radix = radix_for(&other_sizes)?;
        let target_size = h.parts[target].len();
        let words = target_size.div_ceil(64).max(1);
        let keys: u64 = other_sizes.iter().map(|&s| s.max(1) as u64).product();
        let mut index = LinkIndex {
            target,
            others,
            other_sizes,
            radix,
            target_size,
            words,
            storage: LinkStorage::Sparse(BTreeMap::new()),
        };
        if keys.saturating_mul(words as u64) <= DENSE_LINK_WORDS {
            index.storage = LinkStorage::Dense(vec![0; keys as usize * words]);
        }
        for e in h.edges() {
            let key: u64 = index
                .others
                .iter()
                .zip(&index.radix)
                .map(|(&i, &r)| e[i] as u64 * r)
                .sum();
            let v = e[target] as usize;
            match &mut index.storage {
                LinkStorage::Dense(bits) => bits[key as usize * words + v / 64] |= 1 << (v % 64),
                LinkStorage::Sparse(map) => {
                    map.entry(key).or_insert_with(|| vec![0; words])[v / 64] |= 1 << (v % 64)
                }
            }
        }
        Ok(index)
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Other parts, in the order subsets are passed.
    pub fn other_parts(&self) -> &[usize] {
        &self.others
    }

    fn link(&self, key: u64) -> Option<&[u64]> {
        match &self.storage {
            LinkStorage::Dense(bits) => {
                let s = key as usize * self.words;
                Some(&bits[s..s + self.words])
            }
            LinkStorage::Sparse(map) => map.get(&key).map(Vec::as_slice),
        }
    }

    fn validate(&self, subsets: &[Vec<u32>]) -> Result<()> {
        if subsets.len() != self.others.len() {
            return Err(Error::InvalidParams(alloc::format!(
                "expected {} subsets, got {}",
                self.others.len(),
                subsets.len()
            )));
        }
        for ((s, &size), &part) in subsets.iter().zip(&self.other_sizes).zip(&self.others) {
            if s.is_empty() {
                return Err(Error::InvalidParams(alloc::format!(
                    "empty subset for part {part}"
                )));
            }
            if let Some(&v) = s.iter().find(|&&v| v as usize >= size) {
                return Err(Error::InvalidParams(alloc::format!(
                    "vertex {v} not in part {part}"
                )));
            }
        }
        Ok(())
    }

    /// Intersection of the links of every tuple in the grid.
    fn intersect(&self, subsets: &[Vec<u32>], acc: &mut Bits) {
        acc.clear();
        acc.resize(self.words, u64::MAX);
        let tail = self.target_size % 64;
        if tail != 0 {
            acc[self.words - 1] = (1u64 << tail) - 1;
        }
        if self.target_size == 0 {
            acc.fill(0);
            return;
        }
        let mut pos = vec![0usize; subsets.len()];
        loop {
            let key: u64 = pos
                .iter()
                .zip(subsets)
                .zip(&self.radix)
                .map(|((&p, s), &r)| s[p] as u64 * r)
                .sum();
            match self.link(key) {
                Some(bits) => {
                    let mut any = 0;
                    for (a, b) in acc.iter_mut().zip(bits) {
                        *a &= b;
                        any |= *a;
                    }
                    if any == 0 {
                        return;
                    }
                }
                None => {
                    acc.fill(0);
                    return;
                }
            }
            // odometer over the grid, last coordinate fastest
            let mut i = pos.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < subsets[i].len() {
                    break;
                }
                pos[i] = 0;
            }
        }
    }

    pub fn common_extensions(&self, subsets: &[Vec<u32>]) -> Result<Vec<u32>> {
        self.validate(subsets)?;
        let mut acc = Vec::new();
        self.intersect(subsets, &mut acc);
        Ok(bits_to_vec(&acc))
    }

    pub fn common_extension_count(&self, subsets: &[Vec<u32>]) -> Result<usize> {
        self.validate(subsets)?;
        let mut acc = Vec::new();
        self.intersect(subsets, &mut acc);
        Ok(acc.iter().map(|w| w.count_ones() as usize).sum())
    }
}

fn bits_to_vec(bits: &[u64]) -> Vec<u32> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            let b = x.trailing_zeros();
            out.push(w as u32 * 64 + b);
            x &= x - 1;
        }
    }
    out
}

/// Outcome of a complete d-partite subgraph search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completeness {
    /// A copy exists; `subsets[i]` are the chosen vertices of part `i`.
    Found {
        subsets: Vec<Vec<u32>>,
    },
    Free,
    /// The grid budget ran out before the search finished.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub outcome: Completeness,
    pub grids_examined: u64,
}

/// Searches for a copy of the complete d-partite hypergraph with part sizes
/// `sizes`, placed on the parts in any order.
///
/// Each distinct assignment of sizes to parts is tried in lexicographic
/// order. For an assignment, the part with the most candidate subsets is the
/// target; subsets of the other parts are enumerated lexicographically and
/// their common extensions compared against the target's size. `budget`
/// caps the number of grids examined.
pub fn contains_complete(
    h: &DPartiteHypergraph,
    sizes: &[usize],
    budget: Option<u64>,
) -> Result<CompletenessReport> {
    let d = h.uniformity();
    if sizes.len() != d {
        return Err(Error::InvalidParams(alloc::format!(
            "{} sizes given for a {d}-partite hypergraph",
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidParams("sizes must be positive".into()));
    }
    let part_sizes = h.part_sizes();
    let mut assignment: Vec<usize> = sizes.to_vec();
    assignment.sort_unstable();
    let mut indexes: BTreeMap<usize, LinkIndex> = BTreeMap::new();
    let mut examined = 0u64;
    let mut acc = Vec::new();
    loop {
        if assignment.iter().zip(&part_sizes).all(|(&s, &n)| s <= n) {
            let target = (0..d)
                .rev()
                .max_by_key(|&i| binomial(part_sizes[i] as u64, assignment[i] as u64))
                .unwrap();
            if let alloc::collections::btree_map::Entry::Vacant(e) = indexes.entry(target) {
                e.insert(LinkIndex::new(h, target)?);
            }
            let index = &indexes[&target];
            let others = index.other_parts().to_vec();
            let mut grid: Vec<Vec<u32>> = others
                .iter()
                .map(|&i| (0..assignment[i] as u32).collect())
                .collect();
            let need = assignment[target];
            'grids: loop {
                if budget.is_some_and(|b| examined >= b) {
                    return Ok(CompletenessReport {
                        outcome: Completeness::BudgetExhausted,
                        grids_examined: examined,
                    });
                }
                examined += 1;
                index.intersect(&grid, &mut acc);
                let ext = bits_to_vec(&acc);
                if ext.len() >= need {
                    let mut subsets = vec![Vec::new(); d];
                    for (slot, &part) in others.iter().enumerate() {
                        subsets[part] = grid[slot].clone();
                    }
                    subsets[target] = ext[..need].to_vec();
                    return Ok(CompletenessReport {
                        outcome: Completeness::Found { subsets },
                        grids_examined: examined,
                    });
                }
                let mut i = grid.len();
                loop {
                    if i == 0 {
                        break 'grids;
                    }
                    i -= 1;
                    let n = part_sizes[others[i]] as u32;
                    if next_combination(&mut grid[i], n) {
                        break;
                    }
                    grid[i] = (0..assignment[others[i]] as u32).collect();
                }
            }
        }
        if !next_permutation(&mut assignment) {
            break;
        }
    }
    Ok(CompletenessReport {
        outcome: Completeness::Free,
        grids_examined: examined,
    })
}
