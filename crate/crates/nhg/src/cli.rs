//! `nhg build | verify | stats`.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage, parse or
//! parameter error, 3 resource guard (desk-scale limit, reseed cap or an
//! exhausted grid budget).

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nhg_core::{Construction, ConstructionParams, DPartiteHypergraph, Variant};

use crate::checks::{self, CheckKind, Status};
use crate::format::{read_hypergraph, write_hypergraph, FormatError};
use crate::meta::{self, KeyValues, RecordedBuild};
use crate::parallel::Threaded;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "nhg",
    version,
    about = "Norm hypergraph constructions and their verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a construction and write it with its metadata and manifest.
    Build(BuildArgs),
    /// Run verification checks on a hypergraph file.
    Verify(VerifyArgs),
    /// Print vertex and edge counts against the extremal exponent.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct Workers {
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "NHG_WORKERS", default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Uniformity (number of parts).
    #[arg(long)]
    pub d: usize,
    /// Grid sizes s_1,...,s_{d-1}.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<u32>,
    /// Characteristic.
    #[arg(long)]
    pub p: u32,
    /// `basic` or `projective`
    #[arg(long, value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; `<out>.meta` and `<out>.manifest` are written next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub workers: Workers,
    /// Skip the desk-scale enumeration guard.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Hypergraph file in the nhg text format
    pub input: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub check: Vec<CheckKind>,
    /// Sizes of the complete hypergraph for `free`; defaults to the
    /// construction's forbidden sizes from the metadata.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Cap on grids examined by `free`, `degree` and `krs-oracle`.
    #[arg(long)]
    pub budget: Option<u64>,
    #[command(flatten)]
    pub workers: Workers,
    /// Write the run manifest here instead of standard error.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Hypergraph file in the nhg text format
    pub input: PathBuf,
    /// Grid sizes s_1,...,s_{d-1}; defaults to the metadata.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<u32>>,
    /// Write the run manifest here instead of standard error.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
        .map_err(|_| format!("expected 'basic' or 'projective', got {s:?}"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] nhg_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_resource_guard() => EXIT_GUARD,
            _ => EXIT_USAGE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Parses `args` (program name first) and runs the command. Report lines go
/// to `out`, diagnostics and manifests to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let shown: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = match cli.command {
        Command::Build(a) => build(&a, &shown, out),
        Command::Verify(a) => verify(&a, &shown, out, err),
        Command::Stats(a) => stats(&a, &shown, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn validate_build(a: &BuildArgs) -> Result<(), CliError> {
    if a.d < 2 {
        return Err(CliError::Usage(format!("--d: {} must be at least 2", a.d)));
    }
    if a.sizes.len() != a.d - 1 {
        return Err(CliError::Usage(format!(
            "--sizes: expected {} values for --d {}, got {}",
            a.d - 1,
            a.d,
            a.sizes.len()
        )));
    }
    if let Some(s) = a.sizes.iter().find(|&&s| s < 2) {
        return Err(CliError::Usage(format!("--sizes: {s} must be at least 2")));
    }
    if !nhg_core::field::is_prime(a.p as u64) {
        return Err(CliError::Usage(format!("--p: {} is not a prime", a.p)));
    }
    if a.variant == Variant::Basic && a.d == 2 {
        return Err(CliError::Usage(
            "--variant: the basic construction needs --d 3 or more; use projective for --d 2"
                .into(),
        ));
    }
    if a.workers.workers == 0 {
        return Err(CliError::Usage("--workers: must be at least 1".into()));
    }
    Ok(())
}

/// Builds the hypergraph and its metadata without touching the filesystem.
pub fn build_artifacts(
    params: ConstructionParams,
    workers: usize,
) -> Result<(DPartiteHypergraph, KeyValues), nhg_core::Error> {
    let pool = Threaded::new(workers);
    let c = Construction::new(params)?;
    let family = c.build_family(&pool)?;
    let (t, h) = match c.params().variant() {
        Variant::Basic => {
            let (t, h) = c.best_t(&family)?;
            (Some(t), h)
        }
        Variant::Projective => (None, c.build_projective(&family, &pool)?),
    };
    let kv = meta::construction_metadata(&c, &family, t, &h);
    Ok((h, kv))
}

fn build(a: &BuildArgs, shown: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let started = Instant::now();
    validate_build(a)?;
    let params = ConstructionParams::derive(a.d, &a.sizes, a.p, a.variant, a.seed, a.force)?;
    let (h, kv) = build_artifacts(params, a.workers.workers)?;
    let file = fs::File::create(&a.out).map_err(io_err(&a.out))?;
    write_hypergraph(&h, io::BufWriter::new(file)).map_err(io_err(&a.out))?;
    let meta_path = meta::meta_path(&a.out);
    fs::write(&meta_path, kv.render()).map_err(io_err(&meta_path))?;
    let manifest_path = meta::manifest_path(&a.out);
    let manifest = meta::manifest(
        "build",
        shown,
        &[("output", &a.out), ("meta", &meta_path)],
        a.workers.workers,
        started.elapsed(),
    );
    fs::write(&manifest_path, manifest.render()).map_err(io_err(&manifest_path))?;
    let _ = writeln!(
        out,
        "wrote {} vertices={} edges={} family={} seed_used={}",
        a.out.display(),
        h.vertex_count(),
        h.edge_count(),
        kv.get("family_size").unwrap_or("?"),
        kv.get("seed_used").unwrap_or("?"),
    );
    Ok(EXIT_PASS)
}

fn load(path: &Path) -> Result<DPartiteHypergraph, CliError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    read_hypergraph(BufReader::new(file)).map_err(|source| CliError::Format {
        path: path.to_owned(),
        source,
    })
}

fn load_meta(input: &Path) -> Result<Option<RecordedBuild>, CliError> {
    let path = meta::meta_path(input);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let kv =
        KeyValues::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    RecordedBuild::from_kv(kv)
        .map(Some)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_manifest(
    target: Option<&Path>,
    kv: &KeyValues,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    match target {
        Some(path) => fs::write(path, kv.render()).map_err(io_err(path)),
        None => {
            for (k, v) in kv.entries() {
                let _ = writeln!(err, "# {k}={v}");
            }
            Ok(())
        }
    }
}

fn verify(
    a: &VerifyArgs,
    shown: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let started = Instant::now();
    if a.workers.workers == 0 {
        return Err(CliError::Usage("--workers: must be at least 1".into()));
    }
    let pool = Threaded::new(a.workers.workers);
    let h = load(&a.input)?;
    let rec = load_meta(&a.input)?;
    let kinds = CheckKind::expand(&a.check);
    let needs_meta = kinds.iter().any(|&k| k != CheckKind::Free) || a.sizes.is_none();
    let construction = match (&rec, needs_meta) {
        (Some(rec), true) => {
            let c = rec
                .construction()
                .map_err(|e| CliError::Usage(format!("metadata: {e}")))?;
            checks::matches_construction(&c, &h)
                .map_err(|e| CliError::Usage(format!("{}: {e}", a.input.display())))?;
            Some(c)
        }
        (None, true) => {
            return Err(CliError::Usage(format!(
                "{}: checks other than free, and free without --sizes, need the metadata file {}",
                a.input.display(),
                meta::meta_path(&a.input).display()
            )))
        }
        _ => None,
    };
    let mut outcomes = Vec::new();
    let mut scan = None;
    for kind in kinds {
        let outcome = match kind {
            CheckKind::Free => {
                let sizes = match (&a.sizes, &construction) {
                    (Some(s), _) => s.clone(),
                    (None, Some(c)) => checks::forbidden_sizes(c),
                    (None, None) => unreachable!(),
                };
                if sizes.len() != h.uniformity() || sizes.contains(&0) {
                    return Err(CliError::Usage(format!(
                        "--sizes: expected {} positive values",
                        h.uniformity()
                    )));
                }
                checks::check_free(&h, &sizes, a.budget)?
            }
            CheckKind::Eq1 => {
                checks::check_eq1(construction.as_ref().unwrap(), rec.as_ref().unwrap(), &h)
            }
            CheckKind::Density => checks::check_density(
                construction.as_ref().unwrap(),
                rec.as_ref().unwrap(),
                &h,
                &pool,
            ),
            CheckKind::Degree | CheckKind::KrsOracle => {
                if scan.is_none() {
                    let c = construction.as_ref().unwrap();
                    scan = Some(checks::degree_scan(
                        c,
                        rec.as_ref().unwrap(),
                        &h,
                        a.budget,
                        &pool,
                    )?);
                }
                let s = scan.as_ref().unwrap();
                if kind == CheckKind::Degree {
                    checks::check_degree(s)
                } else {
                    checks::check_krs_oracle(s)
                }
            }
            CheckKind::All => unreachable!("expanded"),
        };
        let _ = writeln!(out, "{outcome}");
        outcomes.push(outcome);
    }
    let manifest = meta::manifest(
        "verify",
        shown,
        &[("input", &a.input)],
        a.workers.workers,
        started.elapsed(),
    );
    write_manifest(a.manifest.as_deref(), &manifest, err)?;
    Ok(if outcomes.iter().any(|o| o.status == Status::Fail) {
        EXIT_CHECK_FAILED
    } else if outcomes.iter().any(|o| o.status == Status::Exhausted) {
        EXIT_GUARD
    } else {
        EXIT_PASS
    })
}

fn stats(
    a: &StatsArgs,
    shown: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let started = Instant::now();
    let h = load(&a.input)?;
    let sizes = match &a.sizes {
        Some(s) => s.clone(),
        None => match load_meta(&a.input)? {
            Some(rec) => rec.params.sizes().to_vec(),
            None => {
                return Err(CliError::Usage(format!(
                    "--sizes: required when {} has no metadata file",
                    a.input.display()
                )))
            }
        },
    };
    if sizes.len() + 1 != h.uniformity() || sizes.contains(&0) {
        return Err(CliError::Usage(format!(
            "--sizes: expected {} positive values",
            h.uniformity().saturating_sub(1)
        )));
    }
    let _ = write!(out, "{}", checks::stats(&h, &sizes));
    let manifest = meta::manifest("stats", shown, &[("input", &a.input)], 1, started.elapsed());
    write_manifest(a.manifest.as_deref(), &manifest, err)?;
    Ok(EXIT_PASS)
}
