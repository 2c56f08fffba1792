//! `key=value` sidecar files: construction metadata written next to every
//! built hypergraph, and run manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use nhg_core::{
    Construction, ConstructionParams, DPartiteHypergraph, Family, FieldContext, Variant,
};

#[derive(Debug, thiserror::Error)]
pub enum MetaError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("duplicate key {0:?}")]
    Duplicate(String),
    #[error("missing key {0:?}")]
    Missing(String),
    #[error("bad value for {key:?}: {value:?}")]
    Value { key: String, value: String },
}

/// Ordered key-value lines. Values may contain `=` and spaces, not newlines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_owned(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, MetaError> {
        self.get(key)
            .ok_or_else(|| MetaError::Missing(key.to_owned()))
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T, MetaError> {
        let value = self.require(key)?;
        value.parse().map_err(|_| MetaError::Value {
            key: key.to_owned(),
            value: value.to_owned(),
        })
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<KeyValues, MetaError> {
        let mut kv = KeyValues::default();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(MetaError::Syntax { line: i + 1 })?;
            if k.is_empty() {
                return Err(MetaError::Syntax { line: i + 1 });
            }
            if kv.get(k).is_some() {
                return Err(MetaError::Duplicate(k.to_owned()));
            }
            kv.push(k, v);
        }
        Ok(kv)
    }
}

pub fn meta_path(out: &Path) -> PathBuf {
    sibling(out, "meta")
}

pub fn manifest_path(out: &Path) -> PathBuf {
    sibling(out, "manifest")
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Construction metadata; deterministic for fixed parameters.
pub fn construction_metadata(
    c: &Construction,
    family: &Family,
    t: Option<u32>,
    h: &DPartiteHypergraph,
) -> KeyValues {
    let params = c.params();
    let ctx = c.field();
    let mut kv = KeyValues::default();
    kv.push("format", "nhg-meta 1");
    kv.push("d", params.d());
    kv.push("sizes", join(params.sizes()));
    kv.push("p", params.p());
    kv.push("variant", params.variant());
    kv.push("seed", params.seed());
    kv.push("seed_used", family.seed);
    kv.push("reseeds", family.reseeds);
    kv.push("m", params.m());
    kv.push("q", params.q());
    kv.push("q_prime", params.q_prime());
    kv.push("field", ctx);
    kv.push("generator", ctx.format_element(ctx.find_generator()));
    let alphas: Vec<String> = c
        .alphas()
        .alphas()
        .iter()
        .map(|&a| ctx.format_element(a))
        .collect();
    kv.push("alphas", alphas.join(","));
    kv.push("family_size", family.len());
    kv.push("density_threshold", params.density_threshold());
    let classes: Vec<String> = c
        .norm_class_sizes(family)
        .iter()
        .enumerate()
        .map(|(i, n)| format!("{}:{n}", i + 1))
        .collect();
    if let Some(t) = t {
        kv.push("t", t);
    }
    kv.push("edges_per_t", classes.join(","));
    kv.push("factorial_bound", params.factorial_bound());
    kv.push("vertices", h.vertex_count());
    kv.push("edge_count", h.edge_count());
    kv
}

/// Parameters recorded in a metadata file, with the chosen norm value.
#[derive(Debug, Clone)]
pub struct RecordedBuild {
    pub params: ConstructionParams,
    pub seed_used: u64,
    pub t: Option<u32>,
    pub family_size: usize,
    pub edges_per_t: BTreeMap<u32, usize>,
    pub kv: KeyValues,
}

impl RecordedBuild {
    pub fn from_kv(
        kv: KeyValues,
    ) -> Result<RecordedBuild, Box<dyn std::error::Error + Send + Sync>> {
        let d: usize = kv.parsed("d")?;
        let sizes = kv
            .require("sizes")?
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<u32>, _>>()
            .map_err(|_| MetaError::Value {
                key: "sizes".into(),
                value: kv.get("sizes").unwrap_or_default().into(),
            })?;
        let p: u32 = kv.parsed("p")?;
        let variant: Variant = kv.require("variant")?.parse()?;
        let seed: u64 = kv.parsed("seed")?;
        let params = ConstructionParams::derive(d, &sizes, p, variant, seed, true)?;
        let t = match kv.get("t") {
            Some(_) => Some(kv.parsed("t")?),
            None => None,
        };
        let mut edges_per_t = BTreeMap::new();
        for item in kv
            .require("edges_per_t")?
            .split(',')
            .filter(|s| !s.is_empty())
        {
            let bad = || MetaError::Value {
                key: "edges_per_t".into(),
                value: item.into(),
            };
            let (a, b) = item.split_once(':').ok_or_else(bad)?;
            edges_per_t.insert(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        }
        Ok(RecordedBuild {
            params,
            seed_used: kv.parsed("seed_used")?,
            t,
            family_size: kv.parsed("family_size")?,
            edges_per_t,
            kv,
        })
    }

    /// Rebuilds the construction and checks the recorded field and alphas
    /// against it.
    pub fn construction(&self) -> Result<Construction, Box<dyn std::error::Error + Send + Sync>> {
        let recorded = FieldContext::parse_descriptor(self.kv.require("field")?)?;
        let c = Construction::new(self.params.clone())?;
        if recorded.modulus() != c.field().modulus() {
            return Err("recorded modulus differs from the canonical one".into());
        }
        let ctx = c.field();
        let alphas: Vec<String> = c
            .alphas()
            .alphas()
            .iter()
            .map(|&a| ctx.format_element(a))
            .collect();
        if self.kv.require("alphas")? != alphas.join(",") {
            return Err("recorded alphas differ from the canonical ones".into());
        }
        Ok(c)
    }
}

/// Run manifest: command, arguments, tool version, paths and duration.
pub fn manifest(
    command: &str,
    args: &[String],
    paths: &[(&str, &Path)],
    workers: usize,
    elapsed: Duration,
) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("command", command);
    kv.push("args", args.join(" "));
    kv.push("version", env!("CARGO_PKG_VERSION"));
    for (key, path) in paths {
        kv.push(key, path.display());
    }
    kv.push("workers", workers);
    kv.push("duration_ms", elapsed.as_millis());
    kv
}
