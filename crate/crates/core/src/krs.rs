//! Product-form equation systems
//!
//! ```text
//! prod_j (lead_ij * X_j + offset_ij) = rhs_i      i = 1..rows, j = 1..vars
//! ```
//!
//! With every lead equal to 1 and `offset_ij = -a_ij` this is the classical
//! shape `prod_j (X_j - a_ij) = b_i`, which has at most `vars!` solutions
//! whenever the roots in every column are pairwise distinct. The solution
//! bound is never assumed here: systems are counted by enumeration and the
//! bound is checked against the count.
//!
//! Systems are built from a grid of chosen vertices in every part but a
//! target one. Column `j` of every system built here stands for the `j`-th
//! Frobenius conjugate of a single unknown, so besides the full brute force
//! over `F^vars` the solutions of that shape ("Frobenius-consistent") can be
//! counted by enumerating the field once.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{binomial, unrank_combination, Partitioner};
use crate::construction::Construction;
use crate::error::{Error, Result};
use crate::field::{factorial, FieldContext, FieldElement};
use crate::galois::mix_words;
use crate::hypergraph::{DPartiteHypergraph, LinkIndex, Variant};

/// Default cap on `|F|^vars` for the full brute force.
pub const DEFAULT_BRUTE_FORCE_LIMIT: u128 = 1 << 24;

/// What the unknowns of a system stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unknowns {
    /// Independent unknowns.
    Raw,
    /// `X_j = y^(p^j)` for a single unknown `y`.
    Conjugates,
    /// `X_j = z^(p^j)` with `z = 1 / (y + shift)`.
    ShiftedInverse { shift: FieldElement },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrsSystem {
    vars: usize,
    lead: Vec<FieldElement>,
    offset: Vec<FieldElement>,
    rhs: Vec<FieldElement>,
    unknowns: Unknowns,
}

/// Result of an exhaustive solution count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionCount {
    pub solutions: Vec<Vec<FieldElement>>,
    pub applicable: bool,
    /// `vars!`
    pub bound: u128,
}

impl SolutionCount {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    /// The factorial bound holds, or the system does not satisfy the
    /// distinct-root hypothesis and nothing is claimed.
    pub fn within_bound(&self) -> bool {
        !self.applicable || self.solutions.len() as u128 <= self.bound
    }
}

impl KrsSystem {
    /// `prod_j (X_j - a[i][j]) = b[i]`.
    pub fn from_roots(
        ctx: &FieldContext,
        a: &[Vec<FieldElement>],
        b: &[FieldElement],
    ) -> Result<KrsSystem> {
        let vars = a.first().map_or(0, Vec::len);
        if a.len() != b.len() || a.iter().any(|row| row.len() != vars) || vars == 0 {
            return Err(Error::InvalidParams(
                "coefficient matrix shape mismatch".into(),
            ));
        }
        Ok(KrsSystem {
            vars,
            lead: vec![ctx.one(); a.len() * vars],
            offset: a.iter().flatten().map(|&x| ctx.neg(x)).collect(),
            rhs: b.to_vec(),
            unknowns: Unknowns::Raw,
        })
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn unknowns(&self) -> Unknowns {
        self.unknowns
    }

    pub fn rhs(&self, row: usize) -> FieldElement {
        self.rhs[row]
    }

    /// The factor of `row` in column `col` as `(lead, offset)`.
    pub fn factor(&self, row: usize, col: usize) -> (FieldElement, FieldElement) {
        let i = row * self.vars + col;
        (self.lead[i], self.offset[i])
    }

    /// The root `-offset / lead` of a factor, `None` for a constant factor.
    pub fn root(&self, ctx: &FieldContext, row: usize, col: usize) -> Option<FieldElement> {
        let (lead, offset) = self.factor(row, col);
        ctx.div(ctx.neg(offset), lead).ok()
    }

    /// All factors are proper and, in every column, the roots of different
    /// rows differ.
    pub fn is_applicable(&self, ctx: &FieldContext) -> bool {
        for col in 0..self.vars {
            let mut roots = Vec::with_capacity(self.rows());
            for row in 0..self.rows() {
                match self.root(ctx, row, col) {
                    Some(r) => roots.push(r),
                    None => return false,
                }
            }
            roots.sort_unstable();
            if roots.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
        }
        true
    }

    pub fn evaluate(&self, ctx: &FieldContext, row: usize, xs: &[FieldElement]) -> FieldElement {
        let base = row * self.vars;
        xs.iter().enumerate().fold(ctx.one(), |acc, (j, &x)| {
            let f = ctx.add(ctx.mul(self.lead[base + j], x), self.offset[base + j]);
            ctx.mul(acc, f)
        })
    }

    pub fn is_solution(&self, ctx: &FieldContext, xs: &[FieldElement]) -> bool {
        (0..self.rows()).all(|row| self.evaluate(ctx, row, xs) == self.rhs[row])
    }

    /// The same system with rows reordered; `perm[i]` is the old row placed at `i`.
    pub fn permute_rows(&self, perm: &[usize]) -> KrsSystem {
        let v = self.vars;
        let pick = |src: &[FieldElement]| -> Vec<FieldElement> {
            perm.iter()
                .flat_map(|&r| src[r * v..(r + 1) * v].iter().copied())
                .collect()
        };
        KrsSystem {
            vars: v,
            lead: pick(&self.lead),
            offset: pick(&self.offset),
            rhs: perm.iter().map(|&r| self.rhs[r]).collect(),
            unknowns: self.unknowns,
        }
    }

    /// Enumerates all of `F^vars` and returns every solution. Refuses when
    /// `|F|^vars` exceeds `limit`.
    pub fn count_solutions_bruteforce(
        &self,
        ctx: &FieldContext,
        limit: u128,
    ) -> Result<SolutionCount> {
        let q = ctx.order() as u128;
        let space = q.checked_pow(self.vars as u32).unwrap_or(u128::MAX);
        if space > limit {
            return Err(Error::TooLarge { size: space, limit });
        }
        let q = ctx.order();
        let mut xs = vec![FieldElement::ZERO; self.vars];
        let mut pos = vec![0u64; self.vars];
        let mut solutions = Vec::new();
        loop {
            if self.is_solution(ctx, &xs) {
                solutions.push(xs.clone());
            }
            let mut i = self.vars;
            loop {
                if i == 0 {
                    return Ok(SolutionCount {
                        solutions,
                        applicable: self.is_applicable(ctx),
                        bound: factorial(self.vars as u64),
                    });
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < q {
                    xs[i] = FieldElement::from_index(pos[i]);
                    break;
                }
                pos[i] = 0;
                xs[i] = FieldElement::ZERO;
            }
        }
    }

    /// Elements `w` of the field such that `X_j = w^(p^j)` solves the system.
    /// Requires `vars` not to exceed the extension degree.
    pub fn consistent_solutions(&self, ctx: &FieldContext) -> Result<Vec<FieldElement>> {
        if self.vars > ctx.degree() as usize {
            return Err(Error::InvalidParams(
                "more unknowns than Frobenius conjugates".into(),
            ));
        }
        if let Some(rows) = self.norm_rows(ctx) {
            return Ok(ctx
                .elements()?
                .filter(|&w| {
                    rows.iter().all(|&(lead, offset, rhs)| {
                        ctx.norm(ctx.add(ctx.mul(lead, w), offset)) == rhs
                    })
                })
                .collect());
        }
        let mut xs = vec![FieldElement::ZERO; self.vars];
        let mut out = Vec::new();
        for w in ctx.elements()? {
            for (j, x) in xs.iter_mut().enumerate() {
                *x = ctx.frobenius(w, j as u64);
            }
            if self.is_solution(ctx, &xs) {
                out.push(w);
            }
        }
        Ok(out)
    }
}

impl KrsSystem {
    /// When there is one column per conjugate and column `j` is the `j`-th
    /// Frobenius image of column 0, a row evaluated at the conjugates of `w`
    /// is the norm of `lead_0 w + offset_0`. Returns those column-0 factors
    /// with the right-hand sides as residues.
    fn norm_rows(&self, ctx: &FieldContext) -> Option<Vec<(FieldElement, FieldElement, u32)>> {
        if self.vars != ctx.degree() as usize {
            return None;
        }
        let mut rows = Vec::with_capacity(self.rows());
        for row in 0..self.rows() {
            let (lead, offset) = self.factor(row, 0);
            for j in 1..self.vars {
                if self.factor(row, j)
                    != (
                        ctx.frobenius(lead, j as u64),
                        ctx.frobenius(offset, j as u64),
                    )
                {
                    return None;
                }
            }
            rows.push((lead, offset, ctx.to_prime(self.rhs[row])?));
        }
        Some(rows)
    }
}

/// Chosen vertices of the non-target parts, as field values.
///
/// `xs[i]` lists `x_{i,1..s_i}` for the `i`-th non-target part (in part
/// order); projective grids carry the residues `b_{i,j}` in `bs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub xs: Vec<Vec<FieldElement>>,
    pub bs: Option<Vec<Vec<u32>>>,
}

impl GridSpec {
    /// Grid values behind hypergraph vertex subsets of a construction.
    pub fn from_vertices(c: &Construction, variant: Variant, subsets: &[Vec<u32>]) -> GridSpec {
        let values: Vec<Vec<(FieldElement, u32)>> = subsets
            .iter()
            .map(|s| s.iter().map(|&v| c.vertex_value(variant, v)).collect())
            .collect();
        GridSpec {
            xs: values
                .iter()
                .map(|row| row.iter().map(|&(x, _)| x).collect())
                .collect(),
            bs: (variant == Variant::Projective).then(|| {
                values
                    .iter()
                    .map(|row| row.iter().map(|&(_, b)| b).collect())
                    .collect()
            }),
        }
    }

    fn validate(&self, c: &Construction) -> Result<()> {
        let params = c.params();
        if self.xs.len() != params.d() - 1 {
            return Err(Error::InvalidParams(
                "grid needs one row per non-target part".into(),
            ));
        }
        for (row, &s) in self.xs.iter().zip(params.sizes()) {
            if row.len() != s as usize {
                return Err(Error::InvalidParams(alloc::format!(
                    "grid row has {} entries, expected {s}",
                    row.len()
                )));
            }
            if row.iter().any(|&x| c.subfield_index(x).is_none()) {
                return Err(Error::NotInSubfield);
            }
        }
        match (&self.bs, params.variant()) {
            (None, Variant::Basic) => {
                for row in &self.xs {
                    let mut sorted = row.clone();
                    sorted.sort_unstable();
                    if sorted.windows(2).any(|w| w[0] == w[1]) {
                        return Err(Error::InvalidParams("grid rows must be distinct".into()));
                    }
                }
            }
            (Some(bs), Variant::Projective) => {
                for (row, brow) in self.xs.iter().zip(bs) {
                    if brow.len() != row.len() || brow.iter().any(|&b| b == 0 || b >= params.p()) {
                        return Err(Error::InvalidParams(
                            "grid residues must be nonzero mod p".into(),
                        ));
                    }
                    let mut pairs: Vec<_> = row.iter().zip(brow).collect();
                    pairs.sort_unstable();
                    if pairs.windows(2).any(|w| w[0] == w[1]) {
                        return Err(Error::InvalidParams("grid pairs must be distinct".into()));
                    }
                }
            }
            _ => {
                return Err(Error::InvalidParams(
                    "grid does not match the variant".into(),
                ))
            }
        }
        Ok(())
    }

    /// Number of grid points, s_1 * ... * s_{d-1}.
    pub fn point_count(&self) -> usize {
        self.xs.iter().map(Vec::len).product()
    }

    /// Grid point coordinates in row-major order, point 0 is the base point.
    pub fn points(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.point_count());
        let mut pos = vec![0usize; self.xs.len()];
        loop {
            out.push(pos.clone());
            let mut i = pos.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < self.xs[i].len() {
                    break;
                }
                pos[i] = 0;
            }
        }
    }
}

fn other_parts(d: usize, target: usize) -> Vec<usize> {
    (0..d).filter(|&i| i != target).collect()
}

/// omega(point) = sum over non-target parts i of (alpha_i / alpha_target) x_{i, j_i}.
fn omega(c: &Construction, grid: &GridSpec, target: usize, point: &[usize]) -> FieldElement {
    let ctx = c.field();
    other_parts(c.params().d(), target)
        .into_iter()
        .zip(point)
        .enumerate()
        .fold(FieldElement::ZERO, |acc, (row, (part, &j))| {
            ctx.add(
                acc,
                ctx.mul(c.alphas().ratio(target, part), grid.xs[row][j]),
            )
        })
}

fn check_target(c: &Construction, target: usize) -> Result<()> {
    if target >= c.params().d() {
        return Err(Error::InvalidParams(alloc::format!(
            "target part {target} out of range"
        )));
    }
    Ok(())
}

/// The conjugated grid values `g(omega(point))`, row index = point * r + g.
fn conjugated_omegas(c: &Construction, grid: &GridSpec, target: usize) -> Vec<FieldElement> {
    let r = c.group().order();
    grid.points()
        .iter()
        .flat_map(|pt| {
            let w = omega(c, grid, target, pt);
            (0..r).map(move |g| c.group().apply(c.field(), g, w))
        })
        .collect()
}

/// The system for common extensions `y` of a grid in H_t. Rows are indexed
/// by (grid point, Galois element); unknown `j` is `y^(p^j)`.
pub fn build_basic_system(
    c: &Construction,
    grid: &GridSpec,
    target: usize,
    t: u32,
) -> Result<KrsSystem> {
    if c.params().variant() != Variant::Basic {
        return Err(Error::InvalidParams(
            "basic system needs basic parameters".into(),
        ));
    }
    check_target(c, target)?;
    grid.validate(c)?;
    if t == 0 || t >= c.params().p() {
        return Err(Error::InvalidParams("t must be a nonzero residue".into()));
    }
    let ctx = c.field();
    let vars = ctx.degree() as usize;
    let p = c.params().p() as u64;
    let rhs_value =
        t as u64 * crate::construction::mod_pow(c.alphas().norm(target) as u64, p - 2, p) % p;
    let omegas = conjugated_omegas(c, grid, target);
    let mut offset = Vec::with_capacity(omegas.len() * vars);
    for &w in &omegas {
        offset.extend((0..vars).map(|j| ctx.frobenius(w, j as u64)));
    }
    Ok(KrsSystem {
        vars,
        lead: vec![ctx.one(); omegas.len() * vars],
        offset,
        rhs: vec![ctx.from_prime(rhs_value); omegas.len()],
        unknowns: Unknowns::Conjugates,
    })
}

/// The system for common extensions `(y, b)` of a projective grid after
/// substituting `z = 1 / (y + omega(base))`. One row per (grid point, Galois
/// element) other than (base, identity); unknown `j` is `z^(p^j)`.
pub fn build_projective_system(
    c: &Construction,
    grid: &GridSpec,
    target: usize,
) -> Result<KrsSystem> {
    if c.params().variant() != Variant::Projective {
        return Err(Error::InvalidParams(
            "projective system needs projective parameters".into(),
        ));
    }
    check_target(c, target)?;
    grid.validate(c)?;
    let ctx = c.field();
    let p = c.params().p() as u64;
    let vars = ctx.degree() as usize;
    let r = c.group().order() as usize;
    let bs = grid.bs.as_ref().expect("validated projective grid");
    let points = grid.points();
    let residue = |pt: &[usize]| -> u64 {
        pt.iter()
            .enumerate()
            .fold(1u64, |acc, (row, &j)| acc * bs[row][j] as u64 % p)
    };
    let base_residue = residue(&points[0]);
    let base_inv = crate::construction::mod_pow(base_residue, p - 2, p);
    let omegas = conjugated_omegas(c, grid, target);
    let base = omegas[0];
    let mut lead = Vec::new();
    let mut rhs = Vec::new();
    for (row, &w) in omegas.iter().enumerate().skip(1) {
        let diff = ctx.sub(w, base);
        lead.extend((0..vars).map(|j| ctx.frobenius(diff, j as u64)));
        rhs.push(ctx.from_prime(residue(&points[row / r]) * base_inv % p));
    }
    Ok(KrsSystem {
        vars,
        offset: vec![ctx.one(); lead.len()],
        lead,
        rhs,
        unknowns: Unknowns::ShiftedInverse { shift: base },
    })
}

/// Outcome of the coefficient distinctness test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distinctness {
    /// All conjugated grid values differ, so the distinct-root hypothesis holds.
    Applicable,
    /// `g_a(omega(point_a)) = g_b(omega(point_b))`.
    Collision {
        point_a: Vec<usize>,
        g_a: u32,
        point_b: Vec<usize>,
        g_b: u32,
    },
}

/// Tests whether the values `g(omega(point))` are pairwise distinct over all
/// grid points and Galois elements.
///
/// Equal Galois elements can only collide when the two points carry the same
/// x-values (possible for projective grids whose pairs share an x); anything
/// else contradicts the independence of the alphas and is reported as an
/// internal error.
pub fn check_coefficient_distinctness(
    c: &Construction,
    grid: &GridSpec,
    target: usize,
) -> Result<Distinctness> {
    check_target(c, target)?;
    grid.validate(c)?;
    let r = c.group().order() as usize;
    let points = grid.points();
    let omegas = conjugated_omegas(c, grid, target);
    let mut keyed: Vec<(FieldElement, usize)> = omegas.iter().copied().zip(0..).collect();
    keyed.sort_unstable();
    for w in keyed.windows(2) {
        if w[0].0 == w[1].0 {
            let (a, b) = (w[0].1, w[1].1);
            let (pa, pb) = (&points[a / r], &points[b / r]);
            let (ga, gb) = ((a % r) as u32, (b % r) as u32);
            if ga == gb {
                let same_x = pa
                    .iter()
                    .zip(pb)
                    .enumerate()
                    .all(|(row, (&ja, &jb))| grid.xs[row][ja] == grid.xs[row][jb]);
                if !same_x {
                    return Err(Error::Internal(
                        "grid values collide under one Galois element".into(),
                    ));
                }
            }
            return Ok(Distinctness::Collision {
                point_a: pa.clone(),
                g_a: ga,
                point_b: pb.clone(),
                g_b: gb,
            });
        }
    }
    Ok(Distinctness::Applicable)
}

/// Everything measured for one grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    /// Vertex subsets of the non-target parts.
    pub grid: Vec<Vec<u32>>,
    /// Common extensions found in the hypergraph.
    pub extensions: usize,
    /// Extensions where the substitution z = 1/(y + omega(base)) has a pole.
    pub pole_extensions: usize,
    /// Frobenius-consistent solutions of the built system.
    pub consistent_solutions: usize,
    /// Solutions over all of F^vars, when small enough to enumerate.
    pub full_solutions: Option<usize>,
    /// vars!
    pub factorial_bound: u128,
    pub verdict: Distinctness,
    /// Every actual extension, mapped to the unknowns, solves the system.
    pub substitution_sound: bool,
}

impl DegreeReport {
    /// Common extensions stay within the factorial bound plus the pole.
    pub fn degree_ok(&self) -> bool {
        self.extensions as u128 <= self.factorial_bound + self.pole_extensions as u128
    }

    /// extensions <= consistent <= full <= bound when applicable; no
    /// extensions at all when a conjugate collision exists.
    pub fn chain_ok(&self) -> bool {
        let regular = self.extensions - self.pole_extensions;
        let mut ok = self.substitution_sound && regular <= self.consistent_solutions;
        if let Some(full) = self.full_solutions {
            ok &= self.consistent_solutions <= full;
        }
        match self.verdict {
            Distinctness::Applicable => {
                ok &= self.consistent_solutions as u128 <= self.factorial_bound;
                if let Some(full) = self.full_solutions {
                    ok &= full as u128 <= self.factorial_bound;
                }
            }
            Distinctness::Collision { .. } => ok &= self.extensions == 0,
        }
        ok && self.degree_ok()
    }
}

/// Counts the common extensions of a grid in `h` and checks them against
/// the system built for the grid. `t` is the norm value of a basic `h`.
#[allow(clippy::too_many_arguments)]
pub fn verify_degree_bound(
    c: &Construction,
    h: &DPartiteHypergraph,
    links: &LinkIndex,
    subsets: &[Vec<u32>],
    t: Option<u32>,
    brute_force_limit: u128,
) -> Result<DegreeReport> {
    let target = links.target();
    if h.variant() != c.params().variant() || h.uniformity() != c.params().d() {
        return Err(Error::InvalidParams(
            "hypergraph does not match the construction".into(),
        ));
    }
    let ctx = c.field();
    let ext = links.common_extensions(subsets)?;
    let grid = GridSpec::from_vertices(c, h.variant(), subsets);
    let verdict = check_coefficient_distinctness(c, &grid, target)?;
    let (system, pole_shift) = match h.variant() {
        Variant::Basic => {
            let t = t.ok_or_else(|| Error::InvalidParams("basic degree check needs t".into()))?;
            (build_basic_system(c, &grid, target, t)?, None)
        }
        Variant::Projective => {
            let s = build_projective_system(c, &grid, target)?;
            let shift = match s.unknowns() {
                Unknowns::ShiftedInverse { shift } => shift,
                _ => unreachable!(),
            };
            (s, Some(shift))
        }
    };
    let vars = system.vars();
    let mut pole_extensions = 0;
    let mut substitution_sound = true;
    let mut xs = vec![FieldElement::ZERO; vars];
    for &v in &ext {
        let (y, _) = c.vertex_value(h.variant(), v);
        let w = match pole_shift {
            None => y,
            Some(shift) => match ctx.inv(ctx.add(y, shift)) {
                Ok(z) => z,
                Err(_) => {
                    pole_extensions += 1;
                    continue;
                }
            },
        };
        for (j, x) in xs.iter_mut().enumerate() {
            *x = ctx.frobenius(w, j as u64);
        }
        substitution_sound &= system.is_solution(ctx, &xs);
    }
    let consistent = system.consistent_solutions(ctx)?.len();
    let full = match system.count_solutions_bruteforce(ctx, brute_force_limit) {
        Ok(count) => Some(count.count()),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(DegreeReport {
        grid: subsets.to_vec(),
        extensions: ext.len(),
        pole_extensions,
        consistent_solutions: consistent,
        full_solutions: full,
        factorial_bound: factorial(vars as u64),
        verdict,
        substitution_sound,
    })
}

/// How grids are chosen for a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPolicy {
    /// Scan every grid when there are at most this many.
    pub exhaustive_limit: u128,
    /// Otherwise draw this many uniform grids.
    pub sample_size: u64,
    pub seed: u64,
    /// Hard cap on grids examined.
    pub budget: Option<u64>,
    pub brute_force_limit: u128,
}

impl Default for GridPolicy {
    fn default() -> GridPolicy {
        GridPolicy {
            exhaustive_limit: 1_000_000,
            sample_size: 10_000,
            seed: 0,
            budget: None,
            brute_force_limit: DEFAULT_BRUTE_FORCE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sampled { seed: u64, size: u64 },
}

/// Failures kept per scan.
const KEPT_FAILURES: usize = 8;

/// Aggregate of a grid scan. Merging is associative, so per-range summaries
/// can be combined in range order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSummary {
    pub mode: ScanMode,
    pub total_grids: u128,
    pub grids: u64,
    pub truncated: bool,
    pub max_extensions: usize,
    pub max_consistent: usize,
    pub max_full: Option<usize>,
    pub applicable: u64,
    pub collisions: u64,
    pub degree_failures: Vec<DegreeReport>,
    pub chain_failures: Vec<DegreeReport>,
    pub degree_failure_count: u64,
    pub chain_failure_count: u64,
    pub factorial_bound: u128,
}

impl ScanSummary {
    fn empty(mode: ScanMode, total_grids: u128, factorial_bound: u128) -> ScanSummary {
        ScanSummary {
            mode,
            total_grids,
            grids: 0,
            truncated: false,
            max_extensions: 0,
            max_consistent: 0,
            max_full: None,
            applicable: 0,
            collisions: 0,
            degree_failures: Vec::new(),
            chain_failures: Vec::new(),
            degree_failure_count: 0,
            chain_failure_count: 0,
            factorial_bound,
        }
    }

    fn absorb(&mut self, r: DegreeReport) {
        self.grids += 1;
        self.max_extensions = self.max_extensions.max(r.extensions);
        self.max_consistent = self.max_consistent.max(r.consistent_solutions);
        if let Some(f) = r.full_solutions {
            self.max_full = Some(self.max_full.map_or(f, |m| m.max(f)));
        }
        match r.verdict {
            Distinctness::Applicable => self.applicable += 1,
            Distinctness::Collision { .. } => self.collisions += 1,
        }
        if !r.degree_ok() {
            self.degree_failure_count += 1;
            if self.degree_failures.len() < KEPT_FAILURES {
                self.degree_failures.push(r.clone());
            }
        }
        if !r.chain_ok() {
            self.chain_failure_count += 1;
            if self.chain_failures.len() < KEPT_FAILURES {
                self.chain_failures.push(r);
            }
        }
    }

    fn merge(mut self, other: ScanSummary) -> ScanSummary {
        self.grids += other.grids;
        self.truncated |= other.truncated;
        self.max_extensions = self.max_extensions.max(other.max_extensions);
        self.max_consistent = self.max_consistent.max(other.max_consistent);
        self.max_full = match (self.max_full, other.max_full) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.applicable += other.applicable;
        self.collisions += other.collisions;
        self.degree_failure_count += other.degree_failure_count;
        self.chain_failure_count += other.chain_failure_count;
        for r in other.degree_failures {
            if self.degree_failures.len() < KEPT_FAILURES {
                self.degree_failures.push(r);
            }
        }
        for r in other.chain_failures {
            if self.chain_failures.len() < KEPT_FAILURES {
                self.chain_failures.push(r);
            }
        }
        self
    }
}

/// Runs [`verify_degree_bound`] over grids of `h` with the construction's
/// part sizes on the non-target parts, exhaustively or by seeded sampling.
pub fn scan_grids<P: Partitioner>(
    c: &Construction,
    h: &DPartiteHypergraph,
    target: usize,
    t: Option<u32>,
    policy: &GridPolicy,
    partitioner: &P,
) -> Result<ScanSummary> {
    check_target(c, target)?;
    let links = LinkIndex::new(h, target)?;
    let part_sizes = h.part_sizes();
    let others = other_parts(h.uniformity(), target);
    let sizes: Vec<u32> = c.params().sizes().to_vec();
    let choices: Vec<u128> = others
        .iter()
        .zip(&sizes)
        .map(|(&part, &s)| binomial(part_sizes[part] as u64, s as u64))
        .collect();
    let total = choices
        .iter()
        .try_fold(1u128, |acc, &x| acc.checked_mul(x))
        .unwrap_or(u128::MAX);
    let bound = c.params().factorial_bound();
    let (mode, mut count) = if total <= policy.exhaustive_limit {
        (ScanMode::Exhaustive, total as u64)
    } else {
        (
            ScanMode::Sampled {
                seed: policy.seed,
                size: policy.sample_size,
            },
            policy.sample_size,
        )
    };
    let mut truncated = false;
    if let Some(b) = policy.budget {
        if b < count {
            count = b;
            truncated = true;
        }
    }
    let grid_at = |index: u64| -> Vec<Vec<u32>> {
        match mode {
            ScanMode::Exhaustive => {
                let mut rank = index as u128;
                let mut ranks = vec![0u128; choices.len()];
                for i in (0..choices.len()).rev() {
                    ranks[i] = rank % choices[i];
                    rank /= choices[i];
                }
                others
                    .iter()
                    .zip(&sizes)
                    .zip(ranks)
                    .map(|((&part, &s), r)| unrank_combination(part_sizes[part] as u32, s, r))
                    .collect()
            }
            ScanMode::Sampled { seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_words([seed, index]));
                others
                    .iter()
                    .zip(&sizes)
                    .zip(&choices)
                    .map(|((&part, &s), &n)| {
                        unrank_combination(part_sizes[part] as u32, s, rng.gen_range(0..n))
                    })
                    .collect()
            }
        }
    };
    let run = |range: Range<u64>| -> Result<ScanSummary> {
        let mut summary = ScanSummary::empty(mode, total, bound);
        for index in range {
            let subsets = grid_at(index);
            summary.absorb(verify_degree_bound(
                c,
                h,
                &links,
                &subsets,
                t,
                policy.brute_force_limit,
            )?);
        }
        Ok(summary)
    };
    let mut merged = ScanSummary::empty(mode, total, bound);
    for part in partitioner.map_ranges(count, run) {
        merged = merged.merge(part?);
    }
    merged.truncated = truncated;
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Sequential;
    use crate::construction::ConstructionParams;

    fn prime_field(p: u32) -> FieldContext {
        FieldContext::new(p, 1).unwrap()
    }

    #[test]
    fn single_variable() {
        let ctx = prime_field(7);
        let a = ctx.from_prime(3);
        let b = ctx.from_prime(5);
        let sys = KrsSystem::from_roots(&ctx, &[vec![a]], &[b]).unwrap();
        let count = sys.count_solutions_bruteforce(&ctx, 1 << 20).unwrap();
        assert_eq!(count.solutions, [vec![ctx.add(a, b)]]);
        assert!(count.within_bound());
    }

    #[test]
    fn no_solutions_over_f5() {
        // x1 x2 = 1 and (x1 - 1)(x2 - 1) = 1 force x1 + x2 = 1, x1 x2 = 1,
        // whose discriminant -3 = 2 is a non-residue mod 5
        let ctx = prime_field(5);
        let (z, o) = (ctx.zero(), ctx.one());
        let sys = KrsSystem::from_roots(&ctx, &[vec![z, z], vec![o, o]], &[o, o]).unwrap();
        assert!(sys.is_applicable(&ctx));
        assert_eq!(
            sys.count_solutions_bruteforce(&ctx, 1 << 20)
                .unwrap()
                .count(),
            0
        );
    }

    #[test]
    fn inapplicable_system_still_counts() {
        let ctx = prime_field(3);
        let z = ctx.zero();
        let sys = KrsSystem::from_roots(&ctx, &[vec![z, z], vec![z, ctx.one()]], &[z, z]).unwrap();
        assert!(!sys.is_applicable(&ctx));
        let count = sys.count_solutions_bruteforce(&ctx, 1 << 20).unwrap();
        assert!(!count.applicable && count.within_bound());
        assert!(count.count() > 0);
    }

    #[test]
    fn brute_force_guard() {
        let ctx = FieldContext::new(2, 8).unwrap();
        let one = ctx.one();
        let sys = KrsSystem::from_roots(&ctx, &[vec![one; 4]], &[one]).unwrap();
        assert!(matches!(
            sys.count_solutions_bruteforce(&ctx, 1 << 24),
            Err(Error::TooLarge { .. })
        ));
        assert!(sys.consistent_solutions(&ctx).is_ok());
    }

    #[test]
    fn basic_system_shape() {
        let params = ConstructionParams::derive(3, &[2, 2], 2, Variant::Basic, 1, false).unwrap();
        let c = Construction::new(params).unwrap();
        let sub = c.subfield();
        let grid = GridSpec {
            xs: vec![vec![sub[1], sub[2]], vec![sub[3], sub[5]]],
            bs: None,
        };
        let sys = build_basic_system(&c, &grid, 2, 1).unwrap();
        // m(d-1) equations in m(d-1) unknowns
        assert_eq!((sys.rows(), sys.vars()), (8, 8));
        let ctx = c.field();
        for row in 0..sys.rows() {
            for j in 0..sys.vars() {
                let (_, off0) = sys.factor(row, 0);
                assert_eq!(sys.factor(row, j).1, ctx.frobenius(off0, j as u64));
            }
        }
        let verdict = check_coefficient_distinctness(&c, &grid, 2).unwrap();
        assert_eq!(verdict == Distinctness::Applicable, sys.is_applicable(ctx));
        if let Distinctness::Collision { g_a, g_b, .. } = verdict {
            assert_ne!(g_a, g_b);
        }
        let bad = GridSpec {
            xs: vec![vec![sub[1], sub[1]], vec![sub[3], sub[5]]],
            bs: None,
        };
        assert!(build_basic_system(&c, &bad, 2, 1).is_err());
    }

    #[test]
    fn projective_system_shape() {
        let params =
            ConstructionParams::derive(3, &[2, 2], 3, Variant::Projective, 1, false).unwrap();
        let c = Construction::new(params).unwrap();
        let sub = c.subfield();
        let grid = GridSpec {
            xs: vec![vec![sub[1], sub[2]], vec![sub[3], sub[3]]],
            bs: Some(vec![vec![1, 1], vec![1, 2]]),
        };
        let sys = build_projective_system(&c, &grid, 2).unwrap();
        // (d-1)m - 1 equations, (d-1)(m-1) unknowns
        assert_eq!((sys.rows(), sys.vars()), (7, 6));
        // rows (base point, g != 1) have ratio 1
        assert_eq!(sys.rhs(0), c.field().one());
        // x repeats in the second row, so points (0,0) and (0,1) collide under g = g'
        match check_coefficient_distinctness(&c, &grid, 2).unwrap() {
            Distinctness::Collision { g_a, g_b, .. } => assert_eq!(g_a, g_b),
            Distinctness::Applicable => panic!("expected a collision"),
        }
    }

    #[test]
    fn projective_d2_degree_scan() {
        let params = ConstructionParams::derive(2, &[2], 5, Variant::Projective, 1, false).unwrap();
        let c = Construction::new(params).unwrap();
        let f = c.build_family(&Sequential).unwrap();
        let h = c.build_projective(&f, &Sequential).unwrap();
        let summary = scan_grids(&c, &h, 1, None, &GridPolicy::default(), &Sequential).unwrap();
        assert_eq!(summary.mode, ScanMode::Exhaustive);
        assert_eq!(summary.grids as u128, binomial(20, 2));
        assert!(summary.max_extensions <= 1);
        assert_eq!(summary.chain_failure_count, 0);
    }
}
