//! Verification checks run by `nhg verify`. Each produces one report line
//! `CHECK <name> PASS|FAIL <details>` with space-separated `key=value` details.

use std::collections::BTreeSet;
use std::fmt;

use nhg_core::krs::{scan_grids, DegreeReport, Distinctness, GridPolicy, ScanMode, ScanSummary};
use nhg_core::{
    contains_complete, Completeness, Construction, DPartiteHypergraph, FieldElement, Partitioner,
    Variant,
};

use crate::meta::RecordedBuild;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum CheckKind {
    Free,
    Eq1,
    Density,
    Degree,
    KrsOracle,
    All,
}

impl CheckKind {
    pub const EACH: [CheckKind; 5] = [
        CheckKind::Free,
        CheckKind::Eq1,
        CheckKind::Density,
        CheckKind::Degree,
        CheckKind::KrsOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Free => "free",
            CheckKind::Eq1 => "eq1",
            CheckKind::Density => "density",
            CheckKind::Degree => "degree",
            CheckKind::KrsOracle => "krs-oracle",
            CheckKind::All => "all",
        }
    }

    /// Expands `all` and removes duplicates, keeping the canonical order.
    pub fn expand(kinds: &[CheckKind]) -> Vec<CheckKind> {
        let set: BTreeSet<CheckKind> = kinds
            .iter()
            .flat_map(|&k| {
                if k == CheckKind::All {
                    CheckKind::EACH.to_vec()
                } else {
                    vec![k]
                }
            })
            .collect();
        set.into_iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The grid budget ran out before a verdict.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub details: String,
}

impl CheckOutcome {
    fn new(kind: CheckKind, pass: bool, details: String) -> CheckOutcome {
        CheckOutcome {
            name: kind.name(),
            status: if pass { Status::Pass } else { Status::Fail },
            details,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail | Status::Exhausted => "FAIL",
        };
        write!(f, "CHECK {} {status} {}", self.name, self.details)
    }
}

/// `0,1|3,4`: vertex indices per part, parts separated by `|`.
pub fn format_grid(subsets: &[Vec<u32>]) -> String {
    subsets
        .iter()
        .map(|s| s.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("|")
}

fn join(sizes: &[usize]) -> String {
    sizes
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// The forbidden complete hypergraph of a construction: the grid sizes plus
/// one more than the factorial bound in the last part.
pub fn forbidden_sizes(c: &Construction) -> Vec<usize> {
    let params = c.params();
    let mut sizes: Vec<usize> = params.sizes().iter().map(|&s| s as usize).collect();
    let last = params
        .factorial_bound()
        .saturating_add(1)
        .min(usize::MAX as u128) as usize;
    sizes.push(last);
    sizes
}

pub fn check_free(
    h: &DPartiteHypergraph,
    sizes: &[usize],
    budget: Option<u64>,
) -> nhg_core::Result<CheckOutcome> {
    let report = contains_complete(h, sizes, budget)?;
    let base = format!("sizes={} grids={}", join(sizes), report.grids_examined);
    Ok(match report.outcome {
        Completeness::Free => CheckOutcome::new(CheckKind::Free, true, base),
        Completeness::Found { subsets } => CheckOutcome::new(
            CheckKind::Free,
            false,
            format!("{base} witness={}", format_grid(&subsets)),
        ),
        Completeness::BudgetExhausted => CheckOutcome {
            name: CheckKind::Free.name(),
            status: Status::Exhausted,
            details: format!("{base} budget_exhausted=true"),
        },
    })
}

/// Rejects a hypergraph whose labels or shape differ from what the recorded
/// construction produces.
pub fn matches_construction(c: &Construction, h: &DPartiteHypergraph) -> Result<(), String> {
    let params = c.params();
    if h.variant() != params.variant() || h.uniformity() != params.d() {
        return Err("hypergraph variant or uniformity differs from its metadata".into());
    }
    let labels = match params.variant() {
        Variant::Basic => c.basic_labels(),
        Variant::Projective => c.projective_labels(),
    };
    if (0..h.uniformity()).any(|i| h.labels(i) != labels.as_slice()) {
        return Err("vertex labels differ from the recorded construction".into());
    }
    Ok(())
}

/// Construction identities on every edge: the weighted sum is nonzero and
/// has the right norm, the underlying tuple lies in F for the recorded seed,
/// and no value L_i of one tuple is a nontrivial Galois conjugate of the
/// value L_i of another.
pub fn check_eq1(c: &Construction, rec: &RecordedBuild, h: &DPartiteHypergraph) -> CheckOutcome {
    let ctx = c.field();
    let d = c.params().d();
    let p = c.params().p();
    let oracles = c.oracles(rec.seed_used);
    let mut tuples = BTreeSet::new();
    for edge in h.edges() {
        let tuple = c.edge_to_tuple(h, &edge);
        let mut xs = Vec::with_capacity(d);
        let mut residue = 1u64;
        for &v in &edge {
            let (x, b) = c.vertex_value(h.variant(), v);
            xs.push(x);
            residue = residue * b as u64 % p as u64;
        }
        let sum = c.weighted_sum(&xs);
        let fail = |why: &str| {
            CheckOutcome::new(
                CheckKind::Eq1,
                false,
                format!(
                    "edges={} reason={why} witness={}",
                    h.edge_count(),
                    edge_text(&edge)
                ),
            )
        };
        if sum == FieldElement::ZERO {
            return fail("zero_weighted_sum");
        }
        let expected = match (h.variant(), rec.t) {
            (Variant::Basic, Some(t)) => t as u64,
            (Variant::Basic, None) => return fail("missing_t"),
            (Variant::Projective, _) => residue,
        };
        if ctx.norm_to_prime(sum) as u64 != expected {
            return fail("norm_mismatch");
        }
        if d > 2 {
            for (i, oracle) in oracles.iter().enumerate() {
                let l = c.linear_form(i, &xs).expect("subfield values");
                if ctx.in_subfield_union(l) || !oracle.is_member_unchecked(ctx, l) {
                    return fail("not_in_family");
                }
            }
        }
        tuples.insert(c.encode_tuple(&tuple));
    }
    let codes: Vec<u64> = tuples.into_iter().collect();
    match c.conjugate_collision(&codes) {
        None => CheckOutcome::new(
            CheckKind::Eq1,
            true,
            format!(
                "edges={} tuples={} conjugate_pairs=0",
                h.edge_count(),
                codes.len()
            ),
        ),
        Some(w) => CheckOutcome::new(
            CheckKind::Eq1,
            false,
            format!(
                "edges={} form={} automorphism={} witness={}|{}",
                h.edge_count(),
                w.form + 1,
                w.automorphism,
                edge_text(&w.x),
                edge_text(&w.y)
            ),
        ),
    }
}

fn edge_text(e: &[u32]) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// Rebuilds F from the recorded seed and checks its size against the
/// metadata and the density threshold, together with the edge counts.
pub fn check_density<P: Partitioner>(
    c: &Construction,
    rec: &RecordedBuild,
    h: &DPartiteHypergraph,
    partitioner: &P,
) -> CheckOutcome {
    let params = c.params();
    let codes = c.family_for_seed(rec.seed_used, partitioner);
    let family = nhg_core::Family {
        seed: rec.seed_used,
        reseeds: 0,
        codes,
    };
    let size = family.len();
    let threshold = params.density_threshold();
    let classes = c.norm_class_sizes(&family);
    let p = params.p() as usize;
    let mut problems = Vec::new();
    if size != rec.family_size {
        problems.push("family_size_mismatch");
    }
    if !params.meets_density(size) {
        problems.push("below_threshold");
    }
    let recorded: Vec<usize> = (1..p as u32)
        .map(|t| rec.edges_per_t.get(&t).copied().unwrap_or(0))
        .collect();
    if recorded != classes {
        problems.push("norm_classes_mismatch");
    }
    let expected_edges = match params.variant() {
        Variant::Basic => rec.t.map(|t| classes[t as usize - 1]),
        Variant::Projective => {
            let nonzero: usize = classes.iter().sum();
            Some(nonzero * (p - 1).pow(params.d() as u32 - 1))
        }
    };
    if expected_edges != Some(h.edge_count()) {
        problems.push("edge_count_mismatch");
    }
    if params.variant() == Variant::Basic {
        let max = classes.iter().copied().max().unwrap_or(0);
        if max * (p - 1) < size {
            problems.push("pigeonhole");
        }
    }
    let details = format!(
        "family={size} threshold={threshold} edges={} seed_used={} reseeds={}{}",
        h.edge_count(),
        rec.seed_used,
        rec.kv.get("reseeds").unwrap_or("?"),
        if problems.is_empty() {
            String::new()
        } else {
            format!(" problems={}", problems.join(","))
        }
    );
    CheckOutcome::new(CheckKind::Density, problems.is_empty(), details)
}

/// Scans grids on the last part as target.
pub fn degree_scan<P: Partitioner>(
    c: &Construction,
    rec: &RecordedBuild,
    h: &DPartiteHypergraph,
    budget: Option<u64>,
    partitioner: &P,
) -> nhg_core::Result<ScanSummary> {
    let policy = GridPolicy {
        seed: rec.params.seed(),
        budget,
        ..GridPolicy::default()
    };
    scan_grids(c, h, h.uniformity() - 1, rec.t, &policy, partitioner)
}

fn scan_basics(s: &ScanSummary) -> String {
    let mode = match s.mode {
        ScanMode::Exhaustive => "exhaustive".to_string(),
        ScanMode::Sampled { seed, size } => format!("sampled size={size} sample_seed={seed}"),
    };
    format!(
        "grids={} total_grids={} mode={mode} truncated={}",
        s.grids, s.total_grids, s.truncated
    )
}

fn report_text(r: &DegreeReport) -> String {
    let verdict = match &r.verdict {
        Distinctness::Applicable => "applicable".to_string(),
        Distinctness::Collision {
            point_a,
            g_a,
            point_b,
            g_b,
        } => format!("collision:{point_a:?}/{g_a}={point_b:?}/{g_b}").replace(' ', ""),
    };
    format!(
        "grid={} extensions={} poles={} consistent={} full={} bound={} verdict={} substitution_sound={}",
        format_grid(&r.grid),
        r.extensions,
        r.pole_extensions,
        r.consistent_solutions,
        r.full_solutions.map_or("n/a".into(), |n| n.to_string()),
        r.factorial_bound,
        verdict,
        r.substitution_sound
    )
}

pub fn check_degree(s: &ScanSummary) -> CheckOutcome {
    let mut details = format!(
        "{} max_extensions={} bound={}",
        scan_basics(s),
        s.max_extensions,
        s.factorial_bound
    );
    if let Some(r) = s.degree_failures.first() {
        details.push_str(&format!(
            " failures={} {}",
            s.degree_failure_count,
            report_text(r)
        ));
    }
    CheckOutcome::new(CheckKind::Degree, s.degree_failure_count == 0, details)
}

pub fn check_krs_oracle(s: &ScanSummary) -> CheckOutcome {
    let mut details = format!(
        "{} applicable={} collisions={} max_extensions={} max_consistent={} max_full={} bound={}",
        scan_basics(s),
        s.applicable,
        s.collisions,
        s.max_extensions,
        s.max_consistent,
        s.max_full.map_or("n/a".into(), |n| n.to_string()),
        s.factorial_bound
    );
    if let Some(r) = s.chain_failures.first() {
        details.push_str(&format!(
            " failures={} {}",
            s.chain_failure_count,
            report_text(r)
        ));
    }
    CheckOutcome::new(CheckKind::KrsOracle, s.chain_failure_count == 0, details)
}

/// Vertex count, edge count, the exponent d - 1/(s_1 ... s_{d-1}) and
/// c = |E| / n^exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub n: usize,
    pub edges: usize,
    pub exponent: f64,
    pub c: f64,
}

pub fn stats(h: &DPartiteHypergraph, sizes: &[u32]) -> Stats {
    let d = h.uniformity() as f64;
    let m: f64 = sizes.iter().map(|&s| s as f64).product();
    let exponent = d - 1.0 / m;
    let n = h.vertex_count();
    let edges = h.edge_count();
    let c = if edges == 0 {
        0.0
    } else {
        edges as f64 / (n as f64).powf(exponent)
    };
    Stats {
        n,
        edges,
        exponent,
        c,
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "edges={}", self.edges)?;
        writeln!(f, "exponent={:.6}", self.exponent)?;
        writeln!(f, "c={:.6}", self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nhg_core::VertexLabel;

    fn complete(a: usize, b: usize) -> DPartiteHypergraph {
        let part = |n: usize| {
            (0..n)
                .map(|i| VertexLabel::Element(i.to_string()))
                .collect::<Vec<_>>()
        };
        let edges: Vec<[u32; 2]> = (0..a as u32)
            .flat_map(|x| (0..b as u32).map(move |y| [x, y]))
            .collect();
        DPartiteHypergraph::new(Variant::Basic, vec![part(a), part(b)], edges).unwrap()
    }

    #[test]
    fn free_check_reports_witness() {
        let out = check_free(&complete(3, 3), &[3, 3], None).unwrap();
        assert_eq!(
            out.to_string(),
            "CHECK free FAIL sizes=3,3 grids=1 witness=0,1,2|0,1,2"
        );
        let out = check_free(&complete(3, 3), &[4, 1], None).unwrap();
        assert!(out.passed());
    }

    #[test]
    fn expand_all() {
        assert_eq!(
            CheckKind::expand(&[CheckKind::Degree, CheckKind::All]),
            CheckKind::EACH.to_vec()
        );
        assert_eq!(
            CheckKind::expand(&[CheckKind::Eq1, CheckKind::Free]),
            [CheckKind::Free, CheckKind::Eq1]
        );
    }

    #[test]
    fn empty_stats() {
        let h = DPartiteHypergraph::empty(Variant::Basic, vec![vec![], vec![]]).unwrap();
        let s = stats(&h, &[2]);
        assert_eq!((s.n, s.edges, s.c), (0, 0, 0.0));
        assert_eq!(
            s.to_string(),
            "n=0\nedges=0\nexponent=1.500000\nc=0.000000\n"
        );
    }
}
