//! The `pebble` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 precondition violation, 3 budget
//! or iteration cap exceeded. Failures print one line on stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analytics::{occupancy_bounds, occupancy_pmf};
use crate::error::PebbleError;
use crate::experiments::{
    csv_row, estimate_solvable_probability, find_threshold, fit_exponent, model_contrast,
    PebbleCount, ThresholdSearch, TrialPolicy, CSV_HEADER,
};
use crate::family::family_from_spec;
use crate::graph::{build_fuse, build_path, build_star, Graph};
use crate::sampling::{sampler_by_name, Configuration, SeedPolicy};
use crate::solvers::{default_solver, fuse_certificate, tree_movable_all_roots};

#[derive(Debug, Parser)]
#[command(name = "pebble", version, about = "Random pebbling configurations and thresholds")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Master seed; required by every stochastic subcommand.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trials per point (minimum per point for adaptive searches).
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Output file (default: stdout). A `<out>.manifest.json` is written beside it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Emit a graph as an edge list.
    Gen {
        #[arg(long, num_args = 2, value_names = ["M", "N"])]
        fuse: Option<Vec<usize>>,
        #[arg(long, value_name = "N")]
        path: Option<usize>,
        #[arg(long, value_name = "N")]
        star: Option<usize>,
    },
    /// Draw one random configuration.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value = "dependent")]
        model: String,
        #[arg(long, default_value_t = 0)]
        trial_index: u64,
    },
    /// Decide solvability of a configuration on a graph.
    Solve {
        /// Edge-list file.
        #[arg(long)]
        graph: PathBuf,
        /// Configuration file ("v:count" pairs).
        #[arg(long, conflicts_with = "pebbles")]
        config: Option<PathBuf>,
        /// Inline configuration, e.g. "2:1 3:2".
        #[arg(long)]
        pebbles: Option<String>,
    },
    /// Occupancy law of one vertex with its sandwich bounds.
    Occupancy {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: u64,
        /// Largest i to print (default t).
        #[arg(long)]
        max_i: Option<u64>,
    },
    /// Estimate Pr[solvable] at a single (n, t).
    Estimate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value = "dependent")]
        model: String,
    },
    /// Locate t where Pr[solvable] crosses p*.
    Threshold {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: String,
        #[command(flatten)]
        #[serde(flatten)]
        search: SearchArgs,
    },
    /// Fit lg t_half against lg n over a grid of sizes.
    Exponent {
        /// Shorthand for --family fuse-eps:E.
        #[arg(long, conflicts_with = "family")]
        epsilon: Option<f64>,
        #[arg(long)]
        family: Option<String>,
        /// Size grid: "2^a..2^b", "2^k", "N", or a comma list.
        #[arg(long)]
        n: String,
        #[command(flatten)]
        #[serde(flatten)]
        search: SearchArgs,
    },
    /// Dependent vs independent placement on paths.
    Contrast {
        #[arg(long)]
        n: String,
        #[arg(long, conflicts_with = "t_nlogn")]
        t: Option<u64>,
        /// Use t = round(C n lg n).
        #[arg(long, value_name = "C")]
        t_nlogn: Option<f64>,
    },
}

#[derive(Debug, Args, Serialize)]
struct SearchArgs {
    #[arg(long, default_value_t = 0.5)]
    p_star: f64,
    #[arg(long, default_value_t = 0.02)]
    precision: f64,
    #[arg(long, default_value_t = 100)]
    batch: u64,
    #[arg(long, default_value_t = 10_000)]
    max_trials: u64,
    #[arg(long, default_value = "dependent")]
    model: String,
    /// Cap on bracketing steps before giving up (exit code 3).
    #[arg(long, default_value_t = 64)]
    max_doublings: usize,
    /// Cap on bisection steps before giving up (exit code 3).
    #[arg(long, default_value_t = 200)]
    max_bisections: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Pebble(PebbleError),
    Io(String),
}

impl From<PebbleError> for CliError {
    fn from(e: PebbleError) -> Self {
        CliError::Pebble(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Pebble(
                PebbleError::BudgetExceeded { .. } | PebbleError::NonConvergence { .. },
            ) => 3,
            CliError::Pebble(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Pebble(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

/// Everything needed to reproduce one output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub arguments: Vec<String>,
    /// The parsed subcommand with every default filled in.
    pub parameters: serde_json::Value,
    pub master_seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// Parses and runs `argv` (including the program name); returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim_start_matches("error: ").trim());
            return 1;
        }
    };
    match execute(&cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, argv: &[OsString]) -> Result<(), CliError> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
    let output = pool.install(|| render(cli))?;
    match &cli.global.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        Some(path) => {
            fs::write(path, &output).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let manifest = RunManifest {
                subcommand: subcommand_name(&cli.command).into(),
                arguments: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
                parameters: json!({
                    "command": &cli.command,
                    "trials": cli.global.trials,
                    "format": cli.global.format,
                    "threads": cli.global.threads,
                }),
                master_seed: cli.global.seed,
                version: env!("CARGO_PKG_VERSION").into(),
                outputs: vec![path.display().to_string()],
                wall_clock_seconds: started.elapsed().as_secs_f64(),
            };
            let manifest_path = manifest_path(path);
            let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            fs::write(&manifest_path, body + "\n")
                .map_err(|e| CliError::Io(format!("{}: {e}", manifest_path.display())))?;
        }
    }
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Gen { .. } => "gen",
        Command::Sample { .. } => "sample",
        Command::Solve { .. } => "solve",
        Command::Occupancy { .. } => "occupancy",
        Command::Estimate { .. } => "estimate",
        Command::Threshold { .. } => "threshold",
        Command::Exponent { .. } => "exponent",
        Command::Contrast { .. } => "contrast",
    }
}

fn require_seed(g: &Global) -> Result<u64, CliError> {
    g.seed
        .ok_or_else(|| CliError::Usage("this subcommand is stochastic and needs --seed".into()))
}

fn format_or(g: &Global, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = g.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!(
            "--format {f:?} is not available here; use one of {allowed:?}"
        )))
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

/// Expands a size grid: `2^a..2^b` (powers of two), `2^k`, `N`, or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<usize>, PebbleError> {
    let bad = || PebbleError::InvalidParameter(format!("bad size grid {text:?}"));
    let single = |s: &str| -> Result<usize, PebbleError> {
        let s = s.trim();
        match s.split_once('^') {
            Some(("2", k)) => {
                let k: u32 = k.parse().map_err(|_| bad())?;
                1usize.checked_shl(k).filter(|_| k < 63).ok_or_else(bad)
            }
            Some(_) => Err(bad()),
            None => s.parse().map_err(|_| bad()),
        }
    };
    if let Some((a, b)) = text.split_once("..") {
        let (lo, hi) = (single(a)?, single(b)?);
        if !(lo.is_power_of_two() && hi.is_power_of_two() && lo <= hi) {
            return Err(bad());
        }
        let (a, b) = (lo.trailing_zeros(), hi.trailing_zeros());
        return Ok((a..=b).map(|k| 1usize << k).collect());
    }
    text.split(',').map(single).collect()
}

fn render(cli: &Cli) -> Result<String, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen { fuse, path, star } => {
            let graph = match (fuse, path, star) {
                (Some(mn), None, None) => build_fuse(mn[0], mn[1])?,
                (None, Some(n), None) => build_path(*n)?,
                (None, None, Some(n)) => build_star(*n)?,
                _ => {
                    return Err(CliError::Usage(
                        "gen needs exactly one of --fuse M N, --path N, --star N".into(),
                    ))
                }
            };
            match format_or(g, Format::Text, &[Format::Text, Format::Json])? {
                Format::Json => {
                    let edges: Vec<[usize; 2]> = graph.edges().map(|(u, v)| [u + 1, v + 1]).collect();
                    Ok(json_line(&json!({ "n": graph.n(), "edges": edges })))
                }
                _ => Ok(graph.to_edge_list()),
            }
        }
        Command::Sample {
            n,
            t,
            model,
            trial_index,
        } => {
            let seed = require_seed(g)?;
            if *n < 1 {
                return Err(PebbleError::InvalidParameter("n must be positive".into()).into());
            }
            let sampler = sampler_by_name(model)?;
            let c = sampler.sample(*n, *t, SeedPolicy::new(seed, *trial_index));
            match format_or(g, Format::Text, &[Format::Text, Format::Json])? {
                Format::Json => Ok(json_line(&json!({ "n": n, "t": t, "counts": c.counts() }))),
                _ => Ok(format!("{c}\n")),
            }
        }
        Command::Solve {
            graph,
            config,
            pebbles,
        } => {
            let text = fs::read_to_string(graph)
                .map_err(|e| CliError::Io(format!("{}: {e}", graph.display())))?;
            let graph = Graph::from_edge_list(&text)?;
            let conf_text = match (config, pebbles) {
                (Some(p), None) => fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
                (None, Some(s)) => s.clone(),
                _ => return Err(CliError::Usage("solve needs --config or --pebbles".into())),
            };
            let c = Configuration::parse(&conf_text, graph.n())?;
            solve_report(&graph, &c, format_or(g, Format::Text, &[Format::Text, Format::Json])?)
        }
        Command::Occupancy { n, t, max_i } => {
            if *n < 1 {
                return Err(PebbleError::InvalidParameter("n must be positive".into()).into());
            }
            format_or(g, Format::Csv, &[Format::Csv])?;
            let last = max_i.unwrap_or(*t).min(*t);
            let mut out = String::from("i,pmf,lower_bound,upper_bound\n");
            for i in 0..=last {
                let pmf = occupancy_pmf(*n, *t, i)?;
                let (lo, hi) = occupancy_bounds(*n, *t, i)?;
                out.push_str(&format!("{i},{pmf},{lo},{hi}\n"));
            }
            Ok(out)
        }
        Command::Estimate {
            family,
            n,
            t,
            model,
        } => {
            let seed = require_seed(g)?;
            let fam = family_from_spec(family)?;
            let graph = fam.build(*n)?;
            let trials = g.trials.unwrap_or(1000);
            let stream = crate::sampling::derive_seed(seed, &[*n as u64, *t]);
            let est = estimate_solvable_probability(&graph, *t, trials, stream, sampler_by_name(model)?)?;
            let m = fam.wick_length(*n)?;
            match format_or(g, Format::Csv, &[Format::Csv, Format::Json, Format::Text])? {
                Format::Csv => Ok(format!("{CSV_HEADER}\n{}\n", csv_row(&fam.name(), m, &est, seed))),
                Format::Json => Ok(json_line(&json!({ "family": fam.name(), "m": m, "estimate": est }))),
                Format::Text => Ok(format!(
                    "{} n={} m={m} t={}: p_hat={} (95% CI {}..{}) over {} trials\n",
                    fam.name(),
                    est.n,
                    est.t,
                    est.p_hat,
                    est.ci_low,
                    est.ci_high,
                    est.trials
                )),
            }
        }
        Command::Threshold { family, n, search } => {
            let seed = require_seed(g)?;
            let fam = family_from_spec(family)?;
            let sizes = parse_grid(n)?;
            let params = search_params(g, search);
            let sampler = sampler_by_name(&search.model)?;
            let format = format_or(g, Format::Csv, &[Format::Csv, Format::Json, Format::Text])?;
            let mut results = Vec::new();
            for &size in &sizes {
                results.push(find_threshold(fam.as_ref(), size, &params, seed, sampler)?);
            }
            match format {
                Format::Csv => {
                    let mut out = format!("{CSV_HEADER}\n");
                    for th in &results {
                        let mut pts = th.points.clone();
                        pts.sort_by_key(|e| e.t);
                        for e in &pts {
                            out.push_str(&csv_row(&th.family, th.m, e, seed));
                            out.push('\n');
                        }
                    }
                    Ok(out)
                }
                Format::Json => Ok(json_line(&results)),
                Format::Text => Ok(results
                    .iter()
                    .map(|th| {
                        format!(
                            "{} n={} m={}: t_half={} ({} points, {} trials)\n",
                            th.family,
                            th.n,
                            th.m,
                            th.t_half,
                            th.points.len(),
                            th.total_trials()
                        )
                    })
                    .collect()),
            }
        }
        Command::Exponent {
            epsilon,
            family,
            n,
            search,
        } => {
            let seed = require_seed(g)?;
            let spec = match (epsilon, family) {
                (Some(e), None) => format!("fuse-eps:{e}"),
                (None, Some(f)) => f.clone(),
                _ => return Err(CliError::Usage("exponent needs --epsilon or --family".into())),
            };
            let fam = family_from_spec(&spec)?;
            let sizes = parse_grid(n)?;
            let params = search_params(g, search);
            let fit = fit_exponent(fam.as_ref(), &sizes, &params, seed, sampler_by_name(&search.model)?)?;
            match format_or(g, Format::Json, &[Format::Csv, Format::Json, Format::Text])? {
                Format::Json => Ok(json_line(&fit)),
                Format::Csv => {
                    let mut out = String::from("family,n,m,t_half,trials\n");
                    for p in &fit.points {
                        out.push_str(&format!("{},{},{},{},{}\n", fit.family, p.n, p.m, p.t_half, p.trials));
                    }
                    Ok(out)
                }
                Format::Text => Ok(format!(
                    "{}: slope={} intercept={} r_squared={} over {} sizes\n",
                    fit.family,
                    fit.slope,
                    fit.intercept,
                    fit.r_squared,
                    fit.points.len()
                )),
            }
        }
        Command::Contrast { n, t, t_nlogn } => {
            let seed = require_seed(g)?;
            let count = match (t, t_nlogn) {
                (Some(t), None) => PebbleCount::Fixed(*t),
                (None, Some(c)) => PebbleCount::NLogN(*c),
                _ => return Err(CliError::Usage("contrast needs --t or --t-nlogn".into())),
            };
            let rows = model_contrast(&parse_grid(n)?, count, g.trials.unwrap_or(1000), seed)?;
            match format_or(g, Format::Csv, &[Format::Csv, Format::Json])? {
                Format::Json => Ok(json_line(&rows)),
                _ => {
                    let mut out = format!("{CSV_HEADER},model\n");
                    for row in &rows {
                        for (name, e) in [("dependent", &row.dependent), ("independent", &row.independent)] {
                            out.push_str(&csv_row("path", e.n, e, seed));
                            out.push_str(&format!(",{name}\n"));
                        }
                    }
                    Ok(out)
                }
            }
        }
    }
}

fn search_params(g: &Global, s: &SearchArgs) -> ThresholdSearch {
    ThresholdSearch {
        p_star: s.p_star,
        precision: s.precision,
        policy: TrialPolicy {
            min_trials: g.trials.unwrap_or(400),
            batch: s.batch,
            max_trials: s.max_trials,
        }
        .normalized(),
        max_doublings: s.max_doublings,
        max_bisections: s.max_bisections,
    }
}

fn solve_report(graph: &Graph, c: &Configuration, format: Format) -> Result<String, CliError> {
    let movable = if graph.is_tree() {
        Some(tree_movable_all_roots(graph, c)?)
    } else {
        None
    };
    let solver = default_solver(graph);
    let mut verdicts = Vec::with_capacity(graph.n());
    for r in 0..graph.n() {
        let ok = match &movable {
            Some(m) => m[r] >= 1,
            None => solver.r_solvable(graph, c, r)?,
        };
        verdicts.push(ok);
    }
    let all = verdicts.iter().all(|&v| v);
    let cert = match graph.fuse_spec() {
        Some(spec) => Some(fuse_certificate(&spec, c)?),
        None => None,
    };
    if format == Format::Json {
        let roots: Vec<_> = verdicts
            .iter()
            .enumerate()
            .map(|(r, &ok)| {
                json!({
                    "vertex": r + 1,
                    "solvable": ok,
                    "movable": movable.as_ref().map(|m| m[r]),
                })
            })
            .collect();
        let certificate = cert.as_ref().map(|cert| {
            json!({
                "m": graph.fuse_spec().map(|s| s.m()),
                "A": cert.accumulation,
                "Y": cert.weight.to_string(),
                "v1_solvable": cert.v1_solvable,
            })
        });
        return Ok(json_line(&json!({
            "n": graph.n(),
            "t": c.total(),
            "solver": solver.name(),
            "roots": roots,
            "solvable": all,
            "certificate": certificate,
        })));
    }
    let mut out = String::new();
    for (r, &ok) in verdicts.iter().enumerate() {
        let verdict = if ok { "solvable" } else { "unsolvable" };
        match &movable {
            Some(m) => out.push_str(&format!("v{}: {verdict} (movable {})\n", r + 1, m[r])),
            None => out.push_str(&format!("v{}: {verdict}\n", r + 1)),
        }
    }
    out.push_str(&format!("solvable: {}\n", if all { "yes" } else { "no" }));
    if let Some(cert) = cert {
        let head = if cert.v1_solvable {
            "v1-solvable"
        } else {
            "not v1-solvable"
        };
        out.push_str(&format!(
            "{head}, A={}, Y={}\n",
            cert.accumulation, cert.weight
        ));
    }
    Ok(out)
}
