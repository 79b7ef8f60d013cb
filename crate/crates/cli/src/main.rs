//! `gcmb`: solve group-constrained base problems, verify closeness
//! properties and scan matroid catalogs.
//!
//! Exit codes: 0 success (feasible, property holds, nothing isolating),
//! 1 error, 2 negative outcome (infeasible, witness found, isolating labeling
//! found), 3 label-image inequality violated.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gcmb::catalog::{filter_blocks, import_revlex, load_catalog, render_catalog, CatalogEntry};
use gcmb::group::{GroupElement, GroupSpec};
use gcmb::instances::{builtin, builtin_names};
use gcmb::lab::{
    check_k_close, check_schrijver_seymour, check_strongly_k_close, isolation_scan, reduce_witness, Predicate,
    Reduction, ScanEntry, ScanReport,
};
use gcmb::matroid::{enumerate_bases, io::parse_matroid, MatroidRef};
use gcmb::solver::{
    default_proximity_k, proximity_pair_bound, solve_enum, solve_proximity, Labeling, ProximityMode, SolveResult,
};
use gcmb::weights::{format_weight, Weights};

const EXIT_NEGATIVE: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

/// Run configuration: global options plus one subcommand.
#[derive(Parser, Debug)]
#[command(name = "gcmb", version, about = "Group-constrained matroid bases: solver and verification lab")]
struct RunConfig {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for every random choice; recorded in output headers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a base with a prescribed label sum (of minimum weight with --weights).
    Solve(SolveArgs),
    /// Check k-closeness, or strong k-closeness when weights are given.
    Verify(VerifyArgs),
    /// Search all labelings of catalog matroids for (strong) block isolation.
    Scan(ScanArgs),
    /// Merge scan reports of disjoint labeling ranges.
    Merge {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Check the label-image lower bound |l(M)| >= |H| min{...}.
    CheckSs(CheckSsArgs),
    /// Catalog conversion and filtering.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// List all bases, with their labels when a labeling is given.
    Bases(BasesArgs),
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Matroid file.
    #[arg(long, conflicts_with = "builtin")]
    matroid: Option<PathBuf>,
    /// Built-in instance, e.g. tight-4, k4, fano, u3-6.
    #[arg(long)]
    builtin: Option<String>,
    /// Group such as Z4 or Z2xZ2 (defaults to the built-in labeling's group).
    #[arg(long)]
    group: Option<String>,
    /// Labeling file (`<element> <group-element>` lines).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Skip exchange-axiom validation of explicit matroid files.
    #[arg(long)]
    trust: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Enum,
    Proximity,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Weight file (`<element> <integer-or-rational>` lines).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Target label sum.
    #[arg(long)]
    target: String,
    #[arg(long, value_enum, default_value_t = Mode::Enum)]
    mode: Mode,
    /// Proximity radius (default |G| - 1).
    #[arg(long)]
    k: Option<usize>,
    /// Refuse proximity runs not backed by a closeness theorem (default).
    #[arg(long, conflicts_with = "heuristic")]
    certified: bool,
    /// Run proximity anyway; negative answers are then not certified.
    #[arg(long)]
    heuristic: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Weights for the strong check.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Closeness radius
    #[arg(long)]
    k: usize,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Catalog file; non-block entries are dropped.
    #[arg(long, conflicts_with_all = ["matroid", "builtin"])]
    catalog: Option<PathBuf>,
    /// Single matroid file
    #[arg(long, conflicts_with = "builtin")]
    matroid: Option<PathBuf>,
    /// Single built-in matroid
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    group: String,
    #[arg(long, default_value = "strong-block")]
    predicate: Predicate,
    #[arg(long, default_value = "none")]
    reduction: Reduction,
    /// Labeling-index interval `a..b` within `0..|G|^n`.
    #[arg(long)]
    range: Option<String>,
    /// Catalog entry interval `a..b` (after block filtering).
    #[arg(long)]
    entries: Option<String>,
    /// Skip invalid catalog entries instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Skip exchange-axiom validation of explicit matroid files
    #[arg(long)]
    trust: bool,
}

#[derive(Args, Debug)]
struct CheckSsArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Check this many seeded random labelings instead of --labels.
    #[arg(long)]
    random: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    /// Convert a revlex basis-indicator file into the catalog format.
    Import {
        input: PathBuf,
        /// Id prefix (default `r<r>n<n>_`).
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Keep the entries whose ground set splits into two disjoint bases.
    FilterBlocks {
        catalog: PathBuf,
        #[arg(long)]
        lenient: bool,
    },
}

#[derive(Args, Debug)]
struct BasesArgs {
    #[command(flatten)]
    instance: InstanceArgs,
}

struct Loaded {
    name: String,
    matroid: MatroidRef,
    labeling: Option<Labeling>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_group(text: &str) -> Result<GroupSpec> {
    text.parse().with_context(|| format!("bad group `{text}`"))
}

fn load_instance(args: &InstanceArgs) -> Result<Loaded> {
    let (name, matroid, default) = match (&args.matroid, &args.builtin) {
        (Some(path), _) => {
            let m = parse_matroid(&read(path)?, args.trust).with_context(|| format!("parsing {}", path.display()))?;
            (path.display().to_string(), m, None)
        }
        (None, Some(name)) => {
            let inst = builtin(name)
                .ok_or_else(|| anyhow!("unknown built-in `{name}`; known: {}", builtin_names().join(", ")))?;
            (inst.name, inst.matroid, inst.labeling)
        }
        (None, None) => bail!("give --matroid or --builtin"),
    };
    let group = args.group.as_deref().map(parse_group).transpose()?;
    let labeling = match (&args.labels, group) {
        (Some(path), Some(group)) => Some(
            Labeling::parse(&read(path)?, &group, matroid.ground_size())
                .with_context(|| format!("parsing {}", path.display()))?,
        ),
        (Some(_), None) => bail!("--labels needs --group"),
        (None, Some(group)) => match default {
            Some(l) if *l.group() == group => Some(l),
            Some(_) => bail!("the built-in labeling is over another group; pass --labels"),
            None => None,
        },
        (None, None) => default,
    };
    Ok(Loaded { name, matroid, labeling })
}

fn require_labeling(loaded: &Loaded) -> Result<&Labeling> {
    loaded.labeling.as_ref().ok_or_else(|| anyhow!("no labeling: pass --group and --labels"))
}

fn load_weights(path: Option<&PathBuf>, n: usize) -> Result<Option<Weights>> {
    path.map(|p| Weights::parse(&read(p)?, n).with_context(|| format!("parsing {}", p.display()))).transpose()
}

fn parse_interval(text: &str) -> Result<(u64, u64)> {
    let (a, b) = text.split_once("..").ok_or_else(|| anyhow!("expected `a..b`, got `{text}`"))?;
    let a: u64 = a.trim().parse().with_context(|| format!("bad interval `{text}`"))?;
    let b: u64 = b.trim().parse().with_context(|| format!("bad interval `{text}`"))?;
    if a > b {
        bail!("empty interval `{text}`");
    }
    Ok((a, b))
}

fn render_result(out: &mut String, group: &GroupSpec, res: &SolveResult) {
    let _ = writeln!(out, "status={}", res.status);
    let dash = || "-".to_string();
    let _ = writeln!(out, "base={}", res.base.map_or_else(dash, |b| b.to_string()));
    let _ = writeln!(out, "label={}", res.label.as_ref().map_or_else(dash, |g| g.to_string()));
    let _ = writeln!(out, "weight={}", res.weight.map_or_else(dash, format_weight));
    let sig = res.signature.as_ref().map_or_else(dash, |a| {
        a.counts().iter().enumerate().map(|(i, c)| format!("{}:{c}", group.element_at(i))).collect::<Vec<_>>().join(" ")
    });
    let _ = writeln!(out, "signature={sig}");
    let _ = writeln!(out, "certified={}", res.certified);
    let s = res.stats;
    let _ = writeln!(
        out,
        "stats signatures={} intersections={} oracle-calls={} pairs={}",
        s.signatures_tried, s.intersections, s.oracle_calls, s.candidate_pairs
    );
}

fn cmd_solve(args: &SolveArgs, seed: u64, out: &mut String) -> Result<u8> {
    let loaded = load_instance(&args.instance)?;
    let labeling = require_labeling(&loaded)?;
    let group = labeling.group().clone();
    let target: GroupElement = group.parse_element(&args.target)?;
    let weights = load_weights(args.weights.as_ref(), loaded.matroid.ground_size())?;
    let m = &*loaded.matroid;
    let mode = match args.mode {
        Mode::Enum => "enum",
        Mode::Proximity => "proximity",
    };
    let _ = writeln!(out, "# solve instance={} group={group} target={target} mode={mode} seed={seed}", loaded.name);
    let res = match args.mode {
        Mode::Enum => solve_enum(m, labeling, &target, weights.as_ref())?,
        Mode::Proximity => {
            let k = args.k.unwrap_or_else(|| default_proximity_k(&group));
            let pm = if args.heuristic { ProximityMode::Heuristic } else { ProximityMode::CertifiedOnly };
            let _ = writeln!(out, "k={k} pair-bound={}", proximity_pair_bound(&group, k));
            solve_proximity(m, labeling, &target, k, weights.as_ref(), pm)?
        }
    };
    render_result(out, &group, &res);
    Ok(if res.is_feasible() { 0 } else { EXIT_NEGATIVE })
}

fn cmd_verify(args: &VerifyArgs, seed: u64, out: &mut String) -> Result<u8> {
    let loaded = load_instance(&args.instance)?;
    let labeling = require_labeling(&loaded)?;
    let weights = load_weights(args.weights.as_ref(), loaded.matroid.ground_size())?;
    let _ = writeln!(
        out,
        "# verify instance={} group={} k={} strong={} seed={seed}",
        loaded.name,
        labeling.group(),
        args.k,
        weights.is_some()
    );
    let witness = match &weights {
        Some(w) => check_strongly_k_close(&loaded.matroid, labeling, w, args.k)?,
        None => check_k_close(&loaded.matroid, labeling, args.k)?,
    };
    let Some(w) = witness else {
        let _ = writeln!(out, "verdict=ok");
        return Ok(0);
    };
    let reduced = reduce_witness(&w)?;
    let _ = writeln!(out, "verdict=witness");
    let _ = writeln!(out, "{w}");
    let _ = writeln!(out, "reduced");
    let _ = writeln!(out, "{reduced}");
    Ok(EXIT_NEGATIVE)
}

fn scan_entries(args: &ScanArgs) -> Result<Vec<ScanEntry>> {
    if let Some(path) = &args.catalog {
        let loaded = load_catalog(path, args.lenient)?;
        for (line, msg) in &loaded.skipped {
            eprintln!("skipped line {line}: {msg}");
        }
        let total = loaded.entries.len();
        let mut kept: Vec<CatalogEntry> = filter_blocks(loaded.entries).collect();
        eprintln!("{} of {total} entries are block matroids", kept.len());
        if let Some(text) = &args.entries {
            let (a, b) = parse_interval(text)?;
            let (a, b) = (a as usize, (b as usize).min(kept.len()));
            if a > b {
                bail!("entry interval {text} is outside 0..{}", kept.len());
            }
            kept = kept[a..b].to_vec();
        }
        return kept
            .into_iter()
            .map(|e| Ok(ScanEntry { matroid: e.to_matroid()?, id: e.id }))
            .collect();
    }
    let instance = InstanceArgs {
        matroid: args.matroid.clone(),
        builtin: args.builtin.clone(),
        group: None,
        labels: None,
        trust: args.trust,
    };
    let loaded = load_instance(&instance)?;
    Ok(vec![ScanEntry { id: loaded.name, matroid: loaded.matroid }])
}

fn cmd_scan(args: &ScanArgs, seed: u64, out: &mut String) -> Result<u8> {
    let group = parse_group(&args.group)?;
    let entries = scan_entries(args)?;
    let range = args.range.as_deref().map(parse_interval).transpose()?;
    let report = isolation_scan(&entries, &group, args.predicate, args.reduction, range, seed)?;
    out.push_str(&report.render());
    Ok(if report.isolating_labelings() == 0 { 0 } else { EXIT_NEGATIVE })
}

fn cmd_merge(paths: &[PathBuf], out: &mut String) -> Result<u8> {
    let reports = paths
        .iter()
        .map(|p| ScanReport::parse(&read(p)?).with_context(|| format!("parsing {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let merged = ScanReport::merge(&reports)?;
    out.push_str(&merged.render());
    Ok(if merged.isolating_labelings() == 0 { 0 } else { EXIT_NEGATIVE })
}

fn cmd_check_ss(args: &CheckSsArgs, seed: u64, out: &mut String) -> Result<u8> {
    let loaded = load_instance(&args.instance)?;
    let m = &*loaded.matroid;
    let labelings: Vec<Labeling> = match args.random {
        Some(count) => {
            let group = match (&args.instance.group, &loaded.labeling) {
                (Some(g), _) => parse_group(g)?,
                (None, Some(l)) => l.group().clone(),
                (None, None) => bail!("--random needs --group"),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| Labeling::random(group.clone(), m.ground_size(), &mut rng)).collect()
        }
        None => vec![require_labeling(&loaded)?.clone()],
    };
    let group = labelings.first().map_or_else(|| "-".into(), |l| l.group().to_string());
    let _ = writeln!(out, "# check-ss instance={} group={group} labelings={} seed={seed}", loaded.name, labelings.len());
    let mut violated = 0;
    for l in &labelings {
        let rep = check_schrijver_seymour(m, l)?;
        if !rep.holds {
            violated += 1;
        }
        let _ = writeln!(out, "{} {rep}", l.compact());
    }
    let _ = writeln!(out, "summary labelings={} violations={violated}", labelings.len());
    Ok(if violated == 0 { 0 } else { EXIT_VIOLATION })
}

fn cmd_catalog(cmd: &CatalogCommand, out: &mut String) -> Result<u8> {
    match cmd {
        CatalogCommand::Import { input, prefix } => {
            let text = read(input)?;
            let header = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .find(|l| !l.is_empty())
                .unwrap_or("");
            let default_prefix = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
                [n, r] => format!("r{r}n{n}_"),
                _ => "m".into(),
            };
            let entries = import_revlex(&text, prefix.as_deref().unwrap_or(&default_prefix))?;
            out.push_str(&render_catalog(&entries));
        }
        CatalogCommand::FilterBlocks { catalog, lenient } => {
            let loaded = load_catalog(catalog, *lenient)?;
            let kept: Vec<CatalogEntry> = filter_blocks(loaded.entries).collect();
            out.push_str(&render_catalog(&kept));
        }
    }
    Ok(0)
}

fn cmd_bases(args: &BasesArgs, out: &mut String) -> Result<u8> {
    let loaded = load_instance(&args.instance)?;
    let m = &*loaded.matroid;
    let bases = enumerate_bases(m)?;
    let _ = writeln!(out, "# bases instance={} n={} r={} count={}", loaded.name, m.ground_size(), m.rank(), bases.len());
    for b in bases {
        match &loaded.labeling {
            Some(l) => {
                let _ = writeln!(out, "{b} label={}", l.label_sum(b));
            }
            None => {
                let _ = writeln!(out, "{b}");
            }
        }
    }
    Ok(0)
}

fn run(cfg: &RunConfig) -> Result<u8> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            bail!("--jobs must be positive");
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().context("starting worker pool")?;
    let mut out = String::new();
    let code = pool.install(|| match &cfg.command {
        Command::Solve(a) => cmd_solve(a, cfg.seed, &mut out),
        Command::Verify(a) => cmd_verify(a, cfg.seed, &mut out),
        Command::Scan(a) => cmd_scan(a, cfg.seed, &mut out),
        Command::Merge { reports } => cmd_merge(reports, &mut out),
        Command::CheckSs(a) => cmd_check_ss(a, cfg.seed, &mut out),
        Command::Catalog(c) => cmd_catalog(c, &mut out),
        Command::Bases(a) => cmd_bases(a, &mut out),
    })?;
    match &cfg.out {
        Some(path) => fs::write(path, &out).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{out}"),
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cfg) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
