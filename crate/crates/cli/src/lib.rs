//! Command dispatch for the `epw` binary. Every command returns its full output
//! as a string so that runs can be compared byte for byte.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use epw_core::correspondences::{fivefold_cycle_check, line_transform_data, threefold_cycle_check, CycleReport};
use epw_core::epw::{check_roots_against_strata, dual_stratify, random_line, sextic_on_line, stratify, stratum_of};
use epw_core::epw::{StratificationReport, StratifyOptions};
use epw_core::fibers::{double_cover_fiber, rho1_fiber_classify, splitting_section};
use epw_core::field::{Field, FieldSpec, PrimeField, QuadraticClosure};
use epw_core::fixtures::{fivefold_data, threefold_data};
use epw_core::format::{peek_field, read_gm, read_lag, write_gm, write_lag};
use epw_core::gm::{build_gm, hilbert_polynomial, GmInstance};
use epw_core::lagrangian::{available_effort, certify, dual, random_instance, LagrangianInstance, ScanOptions};
use epw_core::linalg::Subspace;
use epw_core::projective::ProjectiveSpace;
use epw_core::verify::{self, Level, VerifyParams};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "epw",
    version,
    about = "Exact computations with EPW and GM data over finite fields"
)]
pub struct Cli {
    /// Seed of every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Add wall-clock timings to reports (they are then no longer reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Threefold,
    Fivefold,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Random Lagrangian from the graph chart, written as a .lag file.
    GenLagrangian {
        #[arg(long)]
        prime: u64,
        /// Run the decomposable-vector scan and record its status.
        #[arg(long)]
        ndv: bool,
    },
    /// Counts of the strata Y^k_A over all points of P(V6).
    Stratify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = 16)]
        witness_cap: usize,
        /// Keep every point with k at least this.
        #[arg(long)]
        keep_all_from: Option<usize>,
    },
    /// Counts of the strata of the dual Lagrangian over all hyperplanes.
    DualStratify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = 16)]
        witness_cap: usize,
        #[arg(long)]
        keep_all_from: Option<usize>,
    },
    /// Restriction of the EPW sextic to a line.
    SexticLine {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, requires = "v1")]
        v0: Option<String>,
        #[arg(long, requires = "v0")]
        v1: Option<String>,
    },
    /// GM data of (A, V5), written as a .gm file.
    BuildGm {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        /// Linear form cutting out V5.
        #[arg(long)]
        v5: String,
    },
    /// Fibers of the Plücker-point map over every point of P(V5).
    ClassifyFibers {
        #[arg(long)]
        gm: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        /// Require the GM variety to be of this kind.
        #[arg(long, value_enum)]
        table: Option<TableKind>,
    },
    /// The two maximal isotropic spaces over points of Y²_A off P(V5).
    DoubleCoverFiber {
        #[arg(long)]
        gm: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        /// Point of Y²_{A,V5} fixing the base line or plane.
        #[arg(long)]
        base_point: Option<String>,
        /// A single point; otherwise the first `--points` stratum-2 points.
        #[arg(long)]
        v: Option<String>,
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Splitting sections of a GM threefold at the admissible boundary points.
    SplittingSection {
        #[arg(long)]
        gm: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        base_point: Option<String>,
        #[arg(long)]
        v: Option<String>,
    },
    /// Cycle decomposition checks at seeded boundary points.
    CycleCheck {
        #[arg(long)]
        gm: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        base_point: Option<String>,
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Line-transform data of (A, V1, V5) and its inverse.
    LineTransform {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        v1: String,
        #[arg(long)]
        v5: String,
    },
    /// Hilbert polynomial of a linear section of the cone over Gr(2,5).
    Hilbert {
        #[arg(long)]
        hyperplanes: usize,
        #[arg(long, default_value_t = 0)]
        quadrics: usize,
    },
    /// The acceptance battery.
    Verify {
        #[arg(long, default_value = "quick")]
        level: String,
        #[arg(long)]
        criterion: Option<u8>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenLagrangian { .. } => "gen-lagrangian",
            Command::Stratify { .. } => "stratify",
            Command::DualStratify { .. } => "dual-stratify",
            Command::SexticLine { .. } => "sextic-line",
            Command::BuildGm { .. } => "build-gm",
            Command::ClassifyFibers { .. } => "classify-fibers",
            Command::DoubleCoverFiber { .. } => "double-cover-fiber",
            Command::SplittingSection { .. } => "splitting-section",
            Command::CycleCheck { .. } => "cycle-check",
            Command::LineTransform { .. } => "line-transform",
            Command::Hilbert { .. } => "hilbert",
            Command::Verify { .. } => "verify",
        }
    }
}

/// What a command produced; `success` is false when a check it ran failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    pub success: bool,
}

/// The error payload written on failure.
pub fn error_payload(err: &anyhow::Error, argv: &[String]) -> String {
    let kind = err
        .chain()
        .find_map(|e| e.downcast_ref::<epw_core::Error>())
        .map_or("io", |e| e.kind());
    let message: Vec<String> = err.chain().map(|e| e.to_string()).collect();
    let payload = json!({
        "error": {
            "kind": kind,
            "message": message.join(": "),
            "replay": replay_line(argv),
        }
    });
    serde_json::to_string_pretty(&payload).expect("json") + "\n"
}

/// A shell command line reproducing `argv`.
pub fn replay_line(argv: &[String]) -> String {
    let quote = |a: &String| {
        if !a.is_empty() && a.chars().all(|c| c.is_ascii_alphanumeric() || "-_./:=,".contains(c)) {
            a.clone()
        } else {
            format!("'{}'", a.replace('\'', r"'\''"))
        }
    };
    // the thread count never changes results, so replays leave it out
    let mut parts = vec!["epw".to_string()];
    let mut args = argv.iter().skip(1);
    while let Some(a) = args.next() {
        if a == "--jobs" {
            args.next();
        } else if !a.starts_with("--jobs=") {
            parts.push(quote(a));
        }
    }
    parts.join(" ")
}

fn field_of(path: &Path, prime: Option<u64>) -> Result<(String, PrimeField)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = peek_field(&text)?;
    let FieldSpec::Prime(p) = spec else {
        return Err(
            epw_core::Error::UnsupportedField(format!("{spec}: the command line works over prime fields")).into(),
        );
    };
    if let Some(q) = prime {
        if q != p {
            return Err(
                epw_core::Error::InvalidInput(format!("--prime {q} but {} is over F_{p}", path.display())).into(),
            );
        }
    }
    Ok((text, PrimeField::new(p)?))
}

fn load_instance(path: &Path, prime: Option<u64>) -> Result<LagrangianInstance<PrimeField>> {
    let (text, f) = field_of(path, prime)?;
    Ok(read_lag(&text, &f)?)
}

fn load_gm(path: &Path, prime: Option<u64>) -> Result<GmInstance<PrimeField>> {
    let (text, f) = field_of(path, prime)?;
    Ok(read_gm(&text, &f)?)
}

fn parse_vector(f: &PrimeField, s: &str, len: usize) -> Result<Vec<u64>> {
    let cells: Vec<&str> = s
        .split(|c: char| c == ',' || c == ':' || c.is_whitespace())
        .filter(|c| !c.is_empty())
        .collect();
    if cells.len() != len {
        return Err(epw_core::Error::InvalidInput(format!("'{s}' has {} entries, expected {len}", cells.len())).into());
    }
    Ok(cells.iter().map(|c| f.parse(c)).collect::<epw_core::Result<_>>()?)
}

fn point_str(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(":")
}

fn rows(s: &Subspace<PrimeField>) -> Vec<Vec<u64>> {
    s.basis_vecs()
}

fn ext_rows<E: Field>(s: &Subspace<E>) -> Vec<Vec<String>> {
    s.basis().to_strings()
}

fn normalized(f: &PrimeField, v: Vec<u64>) -> Result<Vec<u64>> {
    epw_core::linalg::normalize(f, &v).ok_or_else(|| epw_core::Error::InvalidInput("zero vector".into()).into())
}

fn envelope(cli: &Cli, result: Value, elapsed_ms: Option<u128>) -> String {
    let mut env = json!({
        "tool": "epw",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "config": {
            "seed": cli.seed,
            "format": cli.format,
            "args": cli.command,
        },
        "result": result,
    });
    if let Some(ms) = elapsed_ms {
        env["timing"] = json!({ "elapsed_ms": ms as u64 });
    }
    serde_json::to_string_pretty(&env).expect("json") + "\n"
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
}

enum Payload {
    Text(String),
    Json(Value, bool),
    Table(Vec<&'static str>, Vec<Vec<String>>, Value, bool),
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Output> {
    let start = Instant::now();
    let payload = dispatch(cli)?;
    let elapsed = cli.timing.then(|| start.elapsed().as_millis());
    Ok(match payload {
        Payload::Text(body) => Output { body, success: true },
        Payload::Json(v, ok) => {
            if cli.format == OutputFormat::Csv {
                bail!(epw_core::Error::InvalidInput(format!(
                    "{} has no CSV form",
                    cli.command.name()
                )));
            }
            Output {
                body: envelope(cli, v, elapsed),
                success: ok,
            }
        }
        Payload::Table(header, table, v, ok) => Output {
            body: match cli.format {
                OutputFormat::Csv => csv_table(&header, table)?,
                OutputFormat::Json => envelope(cli, v, elapsed),
            },
            success: ok,
        },
    })
}

fn strata_payload(rep: &StratificationReport<PrimeField>) -> Payload {
    let counts: serde_json::Map<String, Value> = rep.counts.iter().map(|(k, c)| (k.to_string(), json!(c))).collect();
    let witnesses: serde_json::Map<String, Value> = rep
        .witnesses
        .iter()
        .map(|(k, pts)| (k.to_string(), json!(pts)))
        .collect();
    let table = rep
        .witnesses
        .iter()
        .flat_map(|(k, pts)| pts.iter().map(move |p| vec![point_str(p), k.to_string()]))
        .collect();
    let v = json!({
        "field": rep.field.to_string(),
        "instance": rep.instance,
        "dual": rep.dual,
        "counts": counts,
        "total": rep.total.to_string(),
        "exhaustive": rep.exhaustive,
        "witnesses": witnesses,
    });
    Payload::Table(vec!["point", "stratum"], table, v, true)
}

fn base_arg(f: &PrimeField, s: &Option<String>) -> Result<Option<Vec<u64>>> {
    s.as_ref()
        .map(|s| parse_vector(f, s, 6).and_then(|v| normalized(f, v)))
        .transpose()
}

fn cycle_json(r: &CycleReport) -> Value {
    json!({
        "point": r.point,
        "passed": r.passed(),
        "scroll": r.scroll_table,
        "section": r.section_table,
        "residual": r.residual_table,
        "meet": r.meet_table,
        "failures": r.failures,
    })
}

fn dispatch(cli: &Cli) -> Result<Payload> {
    let seed = cli.seed;
    match &cli.command {
        Command::GenLagrangian { prime, ndv } => {
            let f = PrimeField::new(*prime)?;
            let mut inst = random_instance(seed, &f);
            if *ndv {
                let opts = ScanOptions::default();
                certify(&mut inst, available_effort(*prime, opts.budget), &opts)?;
            }
            Ok(Payload::Text(write_lag(&inst)))
        }
        Command::Stratify {
            instance,
            prime,
            witness_cap,
            keep_all_from,
        }
        | Command::DualStratify {
            instance,
            prime,
            witness_cap,
            keep_all_from,
        } => {
            let inst = load_instance(instance, *prime)?;
            let opts = StratifyOptions {
                witness_cap: *witness_cap,
                keep_all_from: *keep_all_from,
                ..StratifyOptions::default()
            };
            let rep = if matches!(cli.command, Command::Stratify { .. }) {
                stratify(&inst, &opts)?
            } else {
                dual_stratify(&inst, &opts)?
            };
            Ok(strata_payload(&rep))
        }
        Command::SexticLine {
            instance,
            prime,
            v0,
            v1,
        } => {
            let inst = load_instance(instance, *prime)?;
            let f = inst.field;
            let (a, b) = match (v0, v1) {
                (Some(a), Some(b)) => (parse_vector(&f, a, 6)?, parse_vector(&f, b, 6)?),
                _ => random_line(&inst, &mut ChaCha8Rng::seed_from_u64(seed))?,
            };
            let s = sextic_on_line(&inst, &a, &b)?;
            let roots: Vec<Value> = s
                .sextic
                .roots()?
                .into_iter()
                .map(|(t, m)| -> Result<Value> {
                    let k = stratum_of(&inst, &s.point(&f, &t))?;
                    Ok(json!({ "t": t, "multiplicity": m, "stratum": k }))
                })
                .collect::<Result<_>>()?;
            let check = check_roots_against_strata(&inst, &s);
            let v = json!({
                "v0": s.v0,
                "v1": s.v1,
                "chart": s.chart,
                "coefficients": s.sextic.coeffs(),
                "degree": s.sextic.degree(),
                "roots": roots,
                "stratum_at_infinity": stratum_of(&inst, &s.v1)?,
                "strata_check": match &check {
                    Ok(n) => json!({ "passed": true, "points": n }),
                    Err(e) => json!({ "passed": false, "error": e.to_string() }),
                },
            });
            Ok(Payload::Json(v, check.is_ok()))
        }
        Command::BuildGm { instance, prime, v5 } => {
            let inst = load_instance(instance, *prime)?;
            let phi = parse_vector(&inst.field, v5, 6)?;
            Ok(Payload::Text(write_gm(&build_gm(&inst, &phi)?)))
        }
        Command::ClassifyFibers { gm, prime, table } => {
            let gm = load_gm(gm, *prime)?;
            let want = match table {
                Some(TableKind::Threefold) => Some(3),
                Some(TableKind::Fivefold) => Some(5),
                None => None,
            };
            if want.is_some_and(|n| n != gm.n) {
                bail!(epw_core::Error::Precondition(format!(
                    "GM variety has dimension {}",
                    gm.n
                )));
            }
            let space = ProjectiveSpace::new(gm.field(), 5)?;
            let cls = (0..space.count())
                .into_par_iter()
                .map(|i| rho1_fiber_classify(&gm, &gm.v5_to_v6(&space.point(i))).map(|c| (space.point(i), c)))
                .collect::<epw_core::Result<Vec<_>>>()?;
            let consistent = cls.iter().all(|(_, c)| c.consistent());
            let fmt_opt = |x: Option<String>| x.unwrap_or_default();
            let table: Vec<Vec<String>> = cls
                .iter()
                .map(|(u, c)| {
                    vec![
                        point_str(u),
                        c.stratum.to_string(),
                        fmt_opt(c.sigma1.map(|b| b.to_string())),
                        c.label.to_string(),
                        c.corank.to_string(),
                        fmt_opt(c.rationality.map(|r| r.to_string())),
                        c.predicted.to_string(),
                        c.consistent().to_string(),
                    ]
                })
                .collect();
            let mut tally = std::collections::BTreeMap::<String, u64>::new();
            for (_, c) in &cls {
                *tally.entry(c.label.to_string()).or_default() += 1;
            }
            let rows_json: Vec<Value> = cls
                .iter()
                .map(|(u, c)| {
                    json!({
                        "point": u,
                        "stratum": c.stratum,
                        "sigma1": c.sigma1,
                        "label": c.label.to_string(),
                        "corank": c.corank,
                        "rationality": c.rationality.map(|r| r.to_string()),
                        "predicted": c.predicted.to_string(),
                    })
                })
                .collect();
            let v = json!({ "n": gm.n, "points": cls.len(), "consistent": consistent, "labels": tally, "fibers": rows_json });
            Ok(Payload::Table(
                vec![
                    "point",
                    "stratum",
                    "sigma1",
                    "label",
                    "corank",
                    "rationality",
                    "predicted",
                    "consistent",
                ],
                table,
                v,
                consistent,
            ))
        }
        Command::DoubleCoverFiber {
            gm,
            prime,
            base_point,
            v,
            points,
        } => {
            let gm = load_gm(gm, *prime)?;
            let f = *gm.field();
            let base = base_arg(&f, base_point)?;
            let (base_point, base_space, off) = match gm.n {
                3 => {
                    let fx = threefold_data(&gm, base.as_deref(), 64)?;
                    (fx.base_point, fx.l0, fx.off_hyperplane)
                }
                5 => {
                    let fx = fivefold_data(&gm, base.as_deref(), 64)?;
                    (fx.base_point, fx.pi0, fx.off_hyperplane)
                }
                n => bail!(epw_core::Error::Precondition(format!(
                    "GM variety of dimension {n}, expected 3 or 5"
                ))),
            };
            let pts: Vec<Vec<u64>> = match v {
                Some(s) => vec![parse_vector(&f, s, 6)?],
                None => off.into_iter().take(*points).collect(),
            };
            let e = f.extension();
            let mut fibers = Vec::new();
            for p in &pts {
                let t = double_cover_fiber(&gm, &base_space, p)?;
                fibers.push(json!({
                    "point": p,
                    "rationality": t.rationality.to_string(),
                    "multiplicities": t.multiplicities,
                    "kernel": rows(&t.kernel),
                    "spaces": t.spaces.iter().map(ext_rows).collect::<Vec<_>>(),
                    "rational": t.rational.iter().map(rows).collect::<Vec<_>>(),
                }));
            }
            let v = json!({
                "n": gm.n,
                "extension": e.spec().to_string(),
                "base_point": base_point,
                "base_space": rows(&base_space),
                "fibers": fibers,
            });
            Ok(Payload::Json(v, true))
        }
        Command::SplittingSection {
            gm,
            prime,
            base_point,
            v,
        } => {
            let gm = load_gm(gm, *prime)?;
            let f = *gm.field();
            let base = base_arg(&f, base_point)?;
            let fx = threefold_data(&gm, base.as_deref(), 64)?;
            let pts = match v {
                Some(s) => vec![normalized(&f, parse_vector(&f, s, 6)?)?],
                None => fx.boundary.clone(),
            };
            let mut out = Vec::new();
            let mut ok = true;
            for p in &pts {
                let s = splitting_section(&gm, &fx.l0, &fx.base_point, p)?;
                let isotropic = gm.plucker_on_w(&gm.to_v5(p)?).vanishes_on(&s);
                let contains = s.contains_space(&fx.l0);
                ok &= isotropic && contains && s.dim() == 5;
                out.push(json!({
                    "point": p,
                    "dim": s.dim(),
                    "contains_l0": contains,
                    "isotropic": isotropic,
                    "basis": rows(&s),
                }));
            }
            let excluded: Vec<Value> = if v.is_none() {
                fx.excluded
                    .iter()
                    .map(|(p, e)| json!({ "point": p, "reason": e.to_string() }))
                    .collect()
            } else {
                Vec::new()
            };
            let v = json!({
                "base_point": fx.base_point,
                "l0": rows(&fx.l0),
                "sections": out,
                "excluded": excluded,
            });
            Ok(Payload::Json(v, ok))
        }
        Command::CycleCheck {
            gm,
            prime,
            base_point,
            points,
        } => {
            let gm = load_gm(gm, *prime)?;
            let f = *gm.field();
            let base = base_arg(&f, base_point)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (reports, base_point, available) = match gm.n {
                3 => {
                    let fx = threefold_data(&gm, base.as_deref(), 64)?;
                    let mut pts = fx.boundary.clone();
                    pts.shuffle(&mut rng);
                    pts.truncate(*points);
                    let reps = pts
                        .iter()
                        .map(|p| threefold_cycle_check(&gm, &fx.l0, &fx.base_point, p))
                        .collect::<epw_core::Result<Vec<_>>>()?;
                    (reps, fx.base_point.clone(), fx.boundary.len())
                }
                5 => {
                    let fx = fivefold_data(&gm, base.as_deref(), 64)?;
                    let mut firsts: Vec<(Vec<u64>, Subspace<PrimeField>)> = Vec::new();
                    for (p, plane) in &fx.boundary {
                        if !firsts.iter().any(|(q, _)| q == p) {
                            firsts.push((p.clone(), plane.clone()));
                        }
                    }
                    let available = firsts.len();
                    firsts.shuffle(&mut rng);
                    firsts.truncate(*points);
                    let reps = firsts
                        .iter()
                        .map(|(p, plane)| fivefold_cycle_check(&gm, &fx.pi0, p, plane))
                        .collect::<epw_core::Result<Vec<_>>>()?;
                    (reps, fx.base_point.clone(), available)
                }
                n => bail!(epw_core::Error::Precondition(format!(
                    "GM variety of dimension {n}, expected 3 or 5"
                ))),
            };
            let passed = reports.iter().filter(|r| r.passed()).count();
            let v = json!({
                "n": gm.n,
                "base_point": base_point,
                "admissible_points": available,
                "checked": reports.len(),
                "passed": passed,
                "reports": reports.iter().map(cycle_json).collect::<Vec<_>>(),
            });
            Ok(Payload::Json(v, passed == reports.len()))
        }
        Command::LineTransform {
            instance,
            prime,
            v1,
            v5,
        } => {
            let inst = load_instance(instance, *prime)?;
            let f = inst.field;
            let d = line_transform_data(&inst, &parse_vector(&f, v1, 6)?, &parse_vector(&f, v5, 6)?)?;
            let involution = d.is_involution(&inst)?;
            let double = dual(&d.dual_instance)?.annihilator == inst.a;
            let v = json!({
                "v1": d.v1,
                "v5": d.phi,
                "v1_stratum": d.v1_stratum,
                "v5_dual_stratum": d.v5_dual_stratum,
                "transverse": d.transverse,
                "v3": rows(&d.v3),
                "l0": rows(&d.l0),
                "l0_nice": d.l0_nice,
                "l0_dual": rows(&d.l0_dual),
                "l0_dual_nice": d.l0_dual_nice,
                "double_annihilator": double,
                "involution": involution,
            });
            let ok = d.v3.dim() == 3 && d.l0_nice && d.l0_dual_nice && double && involution;
            Ok(Payload::Json(v, ok))
        }
        Command::Hilbert { hyperplanes, quadrics } => {
            let h = hilbert_polynomial(*hyperplanes, *quadrics)?;
            let v = json!({
                "hyperplanes": h.hyperplanes,
                "quadrics": h.quadrics,
                "ambient_dim": h.ambient_dim,
                "dimension": h.dimension,
                "degree": h.degree().to_string(),
                "polynomial": h.polynomial.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "table": h.table.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            Ok(Payload::Json(v, true))
        }
        Command::Verify { level, criterion } => {
            let level: Level = level.parse()?;
            let params = VerifyParams::for_level(level, seed);
            let results = match criterion {
                Some(id) => {
                    if !verify::CRITERIA.iter().any(|c| c.0 == *id) {
                        bail!(epw_core::Error::InvalidInput(format!("no criterion {id}")));
                    }
                    vec![verify::run_criterion(&verify::Context::new(params), *id)]
                }
                None => verify::verify_suite(params),
            };
            let ok = results.iter().all(|r| r.passed);
            let list: Vec<Value> = results
                .iter()
                .map(|r| {
                    let mut x = json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "checks": r.checks,
                        "detail": r.detail,
                        "budget_ms": verify::budget(r.id).as_millis() as u64,
                        "replay": r.replay,
                    });
                    if cli.timing {
                        x["elapsed_ms"] = json!(r.elapsed.as_millis() as u64);
                    }
                    if !r.properties.is_empty() {
                        x["properties"] = json!(r
                            .properties
                            .iter()
                            .map(|p| json!({
                                "name": p.name,
                                "prime": p.prime,
                                "cases": p.cases,
                                "passed": p.passed,
                                "detail": p.detail,
                            }))
                            .collect::<Vec<_>>());
                    }
                    x
                })
                .collect();
            Ok(Payload::Json(
                json!({ "level": level.to_string(), "passed": ok, "criteria": list }),
                ok,
            ))
        }
    }
}

/// Runs `cli` on a pool of `cli.jobs` threads (the global pool when unset).
pub fn run_with_pool(cli: &Cli) -> Result<Output> {
    match cli.jobs {
        Some(0) => bail!(epw_core::Error::InvalidInput("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| run(cli)),
        None => run(cli),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn replay_quotes_arguments() {
        let argv: Vec<String> = ["epw", "--jobs", "3", "sextic-line", "--v0", "1 0 0 0 0 0", "--jobs=2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(replay_line(&argv), "epw sextic-line --v0 '1 0 0 0 0 0'");
    }

    #[test]
    fn hilbert_report() {
        let out = run(&parse(&["epw", "hilbert", "--hyperplanes", "11"])).unwrap();
        let v: Value = serde_json::from_str(&out.body).unwrap();
        assert_eq!(
            v["result"]["table"].as_array().unwrap()[..6],
            json!(["1", "5", "10", "15", "20", "25"]).as_array().unwrap()[..]
        );
        assert_eq!(v["result"]["degree"], "5");
        assert_eq!(v["config"]["seed"], 0);
        assert!(v.get("timing").is_none());
    }

    #[test]
    fn csv_only_for_tables() {
        let err = run(&parse(&["epw", "--format", "csv", "hilbert", "--hyperplanes", "10"])).unwrap_err();
        let payload = error_payload(&err, &["epw".into(), "hilbert".into()]);
        assert!(payload.contains("\"kind\": \"invalid-input\""));
        assert!(payload.contains("\"replay\": \"epw hilbert\""));
    }

    #[test]
    fn vectors_parse() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(parse_vector(&f, "0,0,0,0,0,1", 6).unwrap(), vec![0, 0, 0, 0, 0, 1]);
        assert_eq!(parse_vector(&f, "1:2:3", 3).unwrap(), vec![1, 2, 3]);
        assert!(parse_vector(&f, "1,2", 6).is_err());
        assert!(parse_vector(&f, "1,2,x,0,0,0", 6).is_err());
    }
}
