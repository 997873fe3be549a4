//! Command line front end for the divergence toolbox: project a
//! distribution onto a model, search for divergence maximizers, evaluate
//! closed-form bounds, sweep bound-versus-parameter tables to CSV, and run
//! seeded verification suites. All randomness flows from a single seed, so
//! identical invocations produce byte-identical output.

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use divmax::bounds::{
    bound_dbn, bound_independence, bound_mixture, bound_rbm, bound_umpd, bound_union_partitions,
    lower_bound_expfam, param_count, BoundReport, Witness,
};
use divmax::maximize::{
    grid_oracle, multistart_ascent, verify_bound, AscentConfig, GridSpec, MaxMethod, MaxResult,
    MaxStrategy,
};
use divmax::maximizers::{independence_maximizers, partition_maximizers};
use divmax::model_spec::{BuildConfig, ModelSpec};
use divmax::models::{
    project_dbn, project_independence, project_partition, project_rbm, IndependenceModel, Model,
    PartitionModel, UmpdModel, UnionPartitionsModel,
};
use divmax::partition::Partition;
use divmax::subcubes::enumerate_subcube_partitions;
use divmax::{Dist, ExtReal, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "divmax", version, about = "Divergence bounds and maximizers for discrete models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunConfig,
}

/// Flags shared by every subcommand; RNG state never leaves this seed.
#[derive(Args)]
struct RunConfig {
    /// Seed for every randomized stage (restarts, verification targets).
    #[arg(long, global = true, env = "DIVMAX_SEED", default_value_t = 0)]
    seed: u64,

    /// Report divergences in nats (the default).
    #[arg(long, global = true, conflicts_with = "bits")]
    nats: bool,

    /// Report divergences in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,

    /// Grid denominator for the oracle maximizer (default 32; verification
    /// suites default to 16).
    #[arg(long, global = true)]
    resolution: Option<u64>,

    /// Random restarts for iterative fits and the ascent maximizer.
    #[arg(long, global = true)]
    restarts: Option<usize>,

    /// Iteration cap per restart.
    #[arg(long, global = true)]
    max_iters: Option<usize>,

    /// Output format (default json; sweep defaults to csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl RunConfig {
    fn unit(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    fn scale(&self, nats: f64) -> f64 {
        if self.bits {
            nats / LN_2
        } else {
            nats
        }
    }

    fn scale_ext(&self, v: ExtReal) -> ExtReal {
        if v.is_infinite() {
            ExtReal::INFINITY
        } else {
            ExtReal::finite(self.scale(v.value()))
        }
    }

    fn build_config(&self) -> BuildConfig {
        let mut cfg = BuildConfig::default();
        cfg.em.seed = self.seed;
        cfg.grad.seed = self.seed;
        if let Some(r) = self.restarts {
            cfg.em.restarts = r;
            cfg.grad.restarts = r;
        }
        if let Some(it) = self.max_iters {
            cfg.em.max_iters = it;
            cfg.grad.max_iters = it;
        }
        cfg
    }

    fn ascent_config(&self) -> AscentConfig {
        let mut cfg = AscentConfig::default();
        cfg.seed = self.seed;
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(it) = self.max_iters {
            cfg.max_iters = it;
        }
        cfg
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn grid_spec(&self, default_resolution: u64) -> GridSpec {
        GridSpec {
            resolution: self.resolution.unwrap_or(default_resolution),
            ..GridSpec::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Ascent,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Independence,
    Mixture,
    Rbm,
    Dbn,
    Umpd,
    UnionPartitions,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Independence => "independence",
            Family::Mixture => "mixture",
            Family::Rbm => "rbm",
            Family::Dbn => "dbn",
            Family::Umpd => "umpd",
            Family::UnionPartitions => "union-partitions",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Bounds,
    ContainmentRbm,
    ContainmentDbn,
    Maximizers,
    Pythagoras,
}

#[derive(Subcommand)]
enum Command {
    /// Project a distribution file onto a model file and report the
    /// divergence together with the projection.
    Project {
        /// JSON distribution: {"cards": [...], "probs": [...]} or sparse
        /// {"cards": [...], "support": [[state, prob], ...]}.
        dist: PathBuf,
        /// JSON model spec: {"model": "independence", "cards": [2,2]} etc.
        model: PathBuf,
    },
    /// Search for the distribution of maximal divergence from a model.
    Maximize {
        /// JSON model spec file.
        model: PathBuf,
        /// ascent: seeded multistart projected gradient; oracle: exhaustive
        /// grid scan (closed-form projections only within sane runtimes).
        #[arg(long, value_enum, default_value_t = Method::Ascent)]
        method: Method,
    },
    /// Closed-form bound on the maximal divergence from a model family.
    Bound(FamilyArgs),
    /// Bound-versus-parameter-count table over a size range, as CSV.
    Sweep {
        #[command(flatten)]
        args: SweepArgs,
        /// Write the table to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named check suite; any failing check makes the exit code 1.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(value_enum)]
    family: Family,

    /// Per-axis state counts (independence, mixture, rbm visible, dbn
    /// visible layer), e.g. --cards 2,2,3.
    #[arg(long, value_delimiter = ',')]
    cards: Option<Vec<usize>>,

    /// Component or block count (mixture, umpd, union-partitions).
    #[arg(long)]
    k: Option<usize>,

    /// Number of binary variables (umpd, union-partitions).
    #[arg(long)]
    n: Option<usize>,

    /// Hidden-unit state counts for an RBM, e.g. --hidden 2,2.
    #[arg(long, value_delimiter = ',', conflicts_with = "m")]
    hidden: Option<Vec<usize>>,

    /// Number of binary hidden units for an RBM (shorthand for --hidden).
    #[arg(long)]
    m: Option<usize>,

    /// Total layer count for a DBN, visible layer included.
    #[arg(long)]
    layers: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(value_enum)]
    family: Family,

    /// Base cardinalities for the mixture family, e.g. --cards 2,2,2,2.
    #[arg(long, value_delimiter = ',')]
    cards: Option<Vec<usize>>,

    /// Number of binary visible variables (rbm, dbn, umpd,
    /// union-partitions).
    #[arg(long)]
    n: Option<usize>,

    /// Alphabet size per axis for the independence family.
    #[arg(long, default_value_t = 2)]
    q: usize,

    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 6)]
    n_max: usize,

    #[arg(long, default_value_t = 1)]
    k_min: usize,
    /// Defaults to 8 for mixtures and 2^n for the union families.
    #[arg(long)]
    k_max: Option<usize>,

    #[arg(long, default_value_t = 0)]
    m_min: usize,
    #[arg(long, default_value_t = 7)]
    m_max: usize,

    #[arg(long, default_value_t = 2)]
    layers_min: usize,
    #[arg(long, default_value_t = 5)]
    layers_max: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let run = &cli.run;
    match &cli.command {
        Command::Project { dist, model } => {
            print!("{}", cmd_project(dist, model, run)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Maximize { model, method } => {
            print!("{}", cmd_maximize(model, *method, run)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound(args) => {
            print!("{}", cmd_bound(args, run)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { args, out } => {
            let table = cmd_sweep(args, run)?;
            match out {
                Some(path) => fs::write(path, table)
                    .map_err(|e| format!("writing {}: {e}", path.display()))?,
                None => print!("{table}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let (report, all_pass) = cmd_verify(*suite, run)?;
            print!("{report}");
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

/// Fixed 12-significant-digit rendering, so repeated runs are byte-equal.
fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.11e}")
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("{what} file {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{what} file {}: {e}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn kv_csv(rows: &[(&str, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

fn witness_str(w: &Option<Witness>) -> String {
    match w {
        None => String::new(),
        Some(Witness::Subset { axes }) => format!("subset axes={}", join(axes, ";")),
        Some(Witness::LayerSplit { m, s }) => format!("layer-split m={m} s={s}"),
        Some(Witness::Block { index }) => format!("block index={index}"),
    }
}

#[derive(Serialize)]
struct ProjectOut<'a> {
    model: &'static str,
    unit: &'static str,
    divergence: ExtReal,
    iterations: usize,
    converged: bool,
    restarts: usize,
    q_star: &'a Dist,
}

fn cmd_project(dist: &Path, model: &Path, run: &RunConfig) -> Result<String, String> {
    let p: Dist = read_json(dist, "distribution")?;
    let spec: ModelSpec = read_json(model, "model")?;
    let built = spec.build(&run.build_config()).map_err(|e| e.to_string())?;
    let res = built.project(&p).map_err(|e| e.to_string())?;
    let out = ProjectOut {
        model: built.name(),
        unit: run.unit(),
        divergence: run.scale_ext(res.divergence),
        iterations: res.iterations,
        converged: res.converged,
        restarts: res.restarts,
        q_star: &res.q_star,
    };
    Ok(match run.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => kv_csv(&[
            ("model", out.model.to_string()),
            ("unit", out.unit.to_string()),
            ("divergence", fmt_sig_ext(out.divergence)),
            ("iterations", out.iterations.to_string()),
            ("converged", out.converged.to_string()),
            ("restarts", out.restarts.to_string()),
            ("cards", join(res.q_star.space().cards(), ";")),
            (
                "q_star",
                res.q_star
                    .probs()
                    .iter()
                    .map(|&v| fmt_sig(v))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
        ]),
    })
}

fn fmt_sig_ext(v: ExtReal) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        fmt_sig(v.value())
    }
}

#[derive(Serialize)]
struct MaximizeOut<'a> {
    model: &'static str,
    unit: &'static str,
    value: f64,
    method: MaxMethod,
    evaluations: u64,
    converged: bool,
    argmax: &'a Dist,
}

fn cmd_maximize(model: &Path, method: Method, run: &RunConfig) -> Result<String, String> {
    let spec: ModelSpec = read_json(model, "model")?;
    let built = spec.build(&run.build_config()).map_err(|e| e.to_string())?;
    let res: MaxResult = match method {
        Method::Ascent => multistart_ascent(built.as_ref(), &run.ascent_config()),
        Method::Oracle => grid_oracle(built.as_ref(), &run.grid_spec(32)),
    }
    .map_err(|e| e.to_string())?;
    let out = MaximizeOut {
        model: built.name(),
        unit: run.unit(),
        value: run.scale(res.value),
        method: res.method,
        evaluations: res.evaluations,
        converged: res.converged,
        argmax: &res.argmax,
    };
    Ok(match run.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => kv_csv(&[
            ("model", out.model.to_string()),
            ("unit", out.unit.to_string()),
            ("value", fmt_sig(out.value)),
            (
                "method",
                match res.method {
                    MaxMethod::Oracle => "oracle".into(),
                    MaxMethod::Ascent => "ascent".into(),
                    MaxMethod::ClosedForm => "closed-form".into(),
                },
            ),
            ("evaluations", out.evaluations.to_string()),
            ("converged", out.converged.to_string()),
            ("cards", join(res.argmax.space().cards(), ";")),
            (
                "argmax",
                res.argmax
                    .probs()
                    .iter()
                    .map(|&v| fmt_sig(v))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
        ]),
    })
}

#[derive(Serialize)]
struct BoundOut {
    family: &'static str,
    unit: &'static str,
    value: f64,
    kind: divmax::bounds::BoundKind,
    witness: Option<Witness>,
    formula: String,
}

fn require<T>(opt: Option<T>, flag: &str, family: &str) -> Result<T, String> {
    opt.ok_or_else(|| format!("family {family} requires {flag}"))
}

fn family_bound(args: &FamilyArgs) -> Result<BoundReport, String> {
    let family = args.family.name();
    let report = match args.family {
        Family::Independence => {
            bound_independence(&require(args.cards.clone(), "--cards", family)?)
        }
        Family::Mixture => bound_mixture(
            &require(args.cards.clone(), "--cards", family)?,
            require(args.k, "--k", family)?,
        ),
        Family::Rbm => {
            let cards = require(args.cards.clone(), "--cards", family)?;
            let hidden = match (&args.hidden, args.m) {
                (Some(h), _) => h.clone(),
                (None, Some(m)) => vec![2; m],
                (None, None) => Vec::new(),
            };
            bound_rbm(&cards, &hidden)
        }
        Family::Dbn => bound_dbn(
            &require(args.cards.clone(), "--cards", family)?,
            require(args.layers, "--layers", family)?,
        ),
        Family::Umpd => bound_umpd(
            require(args.n, "--n", family)?,
            require(args.k, "--k", family)?,
        ),
        Family::UnionPartitions => bound_union_partitions(
            require(args.n, "--n", family)?,
            require(args.k, "--k", family)?,
        ),
    };
    report.map_err(|e| e.to_string())
}

fn cmd_bound(args: &FamilyArgs, run: &RunConfig) -> Result<String, String> {
    let report = family_bound(args)?;
    let out = BoundOut {
        family: args.family.name(),
        unit: run.unit(),
        value: run.scale(report.value),
        kind: report.kind,
        witness: report.witness.clone(),
        formula: report.formula.clone(),
    };
    Ok(match run.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => kv_csv(&[
            ("family", out.family.to_string()),
            ("unit", out.unit.to_string()),
            ("value", fmt_sig(out.value)),
            (
                "kind",
                match out.kind {
                    divmax::bounds::BoundKind::Upper => "upper".into(),
                    divmax::bounds::BoundKind::Lower => "lower".into(),
                    divmax::bounds::BoundKind::Exact => "exact".into(),
                },
            ),
            ("witness", witness_str(&out.witness)),
            ("formula", out.formula.clone()),
        ]),
    })
}

/// Largest parameter count over the k-block cubical partitions of the
/// n-cube: split as evenly as possible, so 2^(j+1)-k blocks keep n-j free
/// axes and 2(k-2^j) keep n-j-1, where 2^j <= k < 2^(j+1).
fn umpd_params(n: usize, k: usize) -> Option<usize> {
    if k == 0 || n >= usize::BITS as usize || k > 1usize << n {
        return None;
    }
    let j = (usize::BITS - 1 - k.leading_zeros()) as usize;
    let big = (1usize << (j + 1)) - k;
    let small = 2 * (k - (1usize << j));
    // small > 0 forces k > 2^j, hence n >= j+1 and the subtraction is safe.
    let free = if small == 0 {
        big * (n - j)
    } else {
        big * (n - j) + small * (n - j - 1)
    };
    Some((k - 1) + free)
}

fn union_partition_params(n: usize, k: usize) -> Option<usize> {
    if k == 0 || n >= usize::BITS as usize || k > 1usize << n {
        None
    } else {
        Some(k - 1)
    }
}

struct SweepRow {
    labels: Vec<(&'static str, String)>,
    params: Option<usize>,
    bound: Option<f64>,
}

fn sweep_rows(args: &SweepArgs) -> Result<(Vec<&'static str>, Vec<SweepRow>), String> {
    let family = args.family.name();
    let mut rows = Vec::new();
    let columns: Vec<&'static str>;
    match args.family {
        Family::Independence => {
            columns = vec!["family", "n", "q", "param_count", "bound"];
            if args.n_min > args.n_max {
                return Err("--n-min exceeds --n-max".into());
            }
            for n in args.n_min..=args.n_max {
                let cards = vec![args.q; n];
                let spec = ModelSpec::Independence {
                    cards: cards.clone(),
                };
                rows.push(SweepRow {
                    labels: vec![("n", n.to_string()), ("q", args.q.to_string())],
                    params: param_count(&spec).ok(),
                    bound: bound_independence(&cards).ok().map(|r| r.value),
                });
            }
        }
        Family::Mixture => {
            columns = vec!["family", "cards", "k", "param_count", "bound"];
            let cards = require(args.cards.clone(), "--cards", family)?;
            let k_max = args.k_max.unwrap_or(8);
            if args.k_min > k_max {
                return Err("--k-min exceeds --k-max".into());
            }
            for k in args.k_min..=k_max {
                let spec = ModelSpec::Mixture {
                    cards: cards.clone(),
                    k,
                };
                rows.push(SweepRow {
                    labels: vec![("cards", join(&cards, "x")), ("k", k.to_string())],
                    params: param_count(&spec).ok(),
                    bound: bound_mixture(&cards, k).ok().map(|r| r.value),
                });
            }
        }
        Family::Rbm => {
            columns = vec!["family", "n", "m", "param_count", "bound"];
            let n = require(args.n, "--n", family)?;
            if args.m_min > args.m_max {
                return Err("--m-min exceeds --m-max".into());
            }
            for m in args.m_min..=args.m_max {
                let spec = ModelSpec::Rbm { n, m };
                rows.push(SweepRow {
                    labels: vec![("n", n.to_string()), ("m", m.to_string())],
                    params: param_count(&spec).ok(),
                    bound: bound_rbm(&vec![2; n], &vec![2; m]).ok().map(|r| r.value),
                });
            }
        }
        Family::Dbn => {
            columns = vec!["family", "n", "layers", "param_count", "bound"];
            let n = require(args.n, "--n", family)?;
            if args.layers_min > args.layers_max {
                return Err("--layers-min exceeds --layers-max".into());
            }
            if args.layers_min < 2 {
                return Err("--layers-min must be at least 2".into());
            }
            for layers in args.layers_min..=args.layers_max {
                // Constant-width architecture: `layers` layers of n binary
                // units each.
                let spec = ModelSpec::Dbn {
                    widths: vec![n; layers],
                };
                rows.push(SweepRow {
                    labels: vec![("n", n.to_string()), ("layers", layers.to_string())],
                    params: param_count(&spec).ok(),
                    bound: bound_dbn(&vec![2; n], layers).ok().map(|r| r.value),
                });
            }
        }
        Family::Umpd | Family::UnionPartitions => {
            columns = vec!["family", "n", "k", "param_count", "bound"];
            let n = require(args.n, "--n", family)?;
            if n >= usize::BITS as usize {
                return Err("--n too large for the union families".into());
            }
            let k_max = args.k_max.unwrap_or(1 << n);
            if args.k_min > k_max {
                return Err("--k-min exceeds --k-max".into());
            }
            for k in args.k_min..=k_max {
                let (params, bound) = match args.family {
                    Family::Umpd => (umpd_params(n, k), bound_umpd(n, k).ok()),
                    _ => (
                        union_partition_params(n, k),
                        bound_union_partitions(n, k).ok(),
                    ),
                };
                rows.push(SweepRow {
                    labels: vec![("n", n.to_string()), ("k", k.to_string())],
                    params,
                    bound: bound.map(|r| r.value),
                });
            }
        }
    }
    Ok((columns, rows))
}

fn cmd_sweep(args: &SweepArgs, run: &RunConfig) -> Result<String, String> {
    let (columns, rows) = sweep_rows(args)?;
    let family = args.family.name();
    let bound_col = if run.bits { "bound_bits" } else { "bound_nats" };
    match run.format_or(Format::Csv) {
        Format::Csv => {
            let header: Vec<&str> = columns
                .iter()
                .map(|&c| if c == "bound" { bound_col } else { c })
                .collect();
            let mut s = header.join(",");
            s.push('\n');
            for row in &rows {
                let mut fields = vec![family.to_string()];
                fields.extend(row.labels.iter().map(|(_, v)| v.clone()));
                fields.push(row.params.map_or("n/a".into(), |p| p.to_string()));
                fields.push(row.bound.map_or("n/a".into(), |b| fmt_sig(run.scale(b))));
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            Ok(s)
        }
        Format::Json => {
            let mut out = Vec::with_capacity(rows.len());
            for row in &rows {
                let mut obj = serde_json::Map::new();
                obj.insert("family".into(), family.into());
                for (k, v) in &row.labels {
                    let parsed: serde_json::Value = match v.parse::<u64>() {
                        Ok(num) => num.into(),
                        Err(_) => v.clone().into(),
                    };
                    obj.insert((*k).to_string(), parsed);
                }
                obj.insert("param_count".into(), row.params.into());
                obj.insert(
                    bound_col.into(),
                    row.bound.map(|b| run.scale(b)).into(),
                );
                out.push(serde_json::Value::Object(obj));
            }
            Ok(to_json(&out))
        }
    }
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Serialize)]
struct VerifyOut {
    suite: &'static str,
    unit: &'static str,
    checks: Vec<serde_json::Value>,
    passed: usize,
    failed: usize,
}

fn cmd_verify(suite: Suite, run: &RunConfig) -> Result<(String, bool), String> {
    let checks = match suite {
        Suite::Bounds => suite_bounds(run)?,
        Suite::ContainmentRbm => suite_containment_rbm(run)?,
        Suite::ContainmentDbn => suite_containment_dbn(run)?,
        Suite::Maximizers => suite_maximizers(run)?,
        Suite::Pythagoras => suite_pythagoras(run)?,
    };
    let suite_name = match suite {
        Suite::Bounds => "bounds",
        Suite::ContainmentRbm => "containment-rbm",
        Suite::ContainmentDbn => "containment-dbn",
        Suite::Maximizers => "maximizers",
        Suite::Pythagoras => "pythagoras",
    };
    let failed = checks.iter().filter(|c| !c.pass).count();
    let all_pass = failed == 0;
    let report = match run.format_or(Format::Json) {
        Format::Json => {
            let out = VerifyOut {
                suite: suite_name,
                unit: run.unit(),
                checks: checks
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "name": c.name,
                            "pass": c.pass,
                            "detail": c.detail,
                        })
                    })
                    .collect(),
                passed: checks.len() - failed,
                failed,
            };
            to_json(&out)
        }
        Format::Csv => {
            let mut s = String::from("name,pass,detail\n");
            for c in &checks {
                let _ = writeln!(s, "{},{},{}", c.name, c.pass, c.detail);
            }
            s
        }
    };
    Ok((report, all_pass))
}

fn err_str(e: divmax::Error) -> String {
    e.to_string()
}

fn grid_check(
    name: &str,
    model: &dyn Model,
    bound: BoundReport,
    grid: GridSpec,
    run: &RunConfig,
) -> Result<Check, String> {
    let rep = verify_bound(model, &bound, &MaxStrategy::Oracle(grid)).map_err(err_str)?;
    Ok(Check::new(
        name,
        rep.pass,
        format!(
            "bound {:.6e} observed {:.6e} gap {:.3e}",
            run.scale(rep.bound.value),
            run.scale(rep.observed),
            run.scale(rep.gap),
        ),
    ))
}

fn suite_bounds(run: &RunConfig) -> Result<Vec<Check>, String> {
    let grid = run.grid_spec(16);
    let mut checks = Vec::new();

    let space2 = StateSpace::binary(2).map_err(err_str)?;
    let space3 = StateSpace::binary(3).map_err(err_str)?;
    checks.push(grid_check(
        "grid-independence-2x2",
        &IndependenceModel::new(space2.clone()),
        bound_independence(&[2, 2]).map_err(err_str)?,
        grid,
        run,
    )?);
    checks.push(grid_check(
        "grid-independence-2x2x2",
        &IndependenceModel::new(space3.clone()),
        bound_independence(&[2, 2, 2]).map_err(err_str)?,
        grid,
        run,
    )?);
    checks.push(grid_check(
        "grid-umpd-3-2",
        &UmpdModel::new(3, 2).map_err(err_str)?,
        bound_umpd(3, 2).map_err(err_str)?,
        grid,
        run,
    )?);
    checks.push(grid_check(
        "grid-union-partitions-3-2",
        &UnionPartitionsModel::new(3, 2).map_err(err_str)?,
        bound_union_partitions(3, 2).map_err(err_str)?,
        grid,
        run,
    )?);

    // Lower bound for 3-dimensional exponential families, checked against
    // the ascent maximum of the independence model on 8 states.
    let lower = lower_bound_expfam(8, 3).map_err(err_str)?;
    let rep = verify_bound(
        &IndependenceModel::new(space3),
        &lower,
        &MaxStrategy::Ascent(run.ascent_config()),
    )
    .map_err(err_str)?;
    checks.push(Check::new(
        "ascent-expfam-lower-2x2x2",
        rep.pass,
        format!(
            "bound {:.6e} observed {:.6e} gap {:.3e}",
            run.scale(rep.bound.value),
            run.scale(rep.observed),
            run.scale(rep.gap),
        ),
    ));

    let mut monotone = true;
    let mut last = f64::INFINITY;
    for k in 1..=6 {
        let v = bound_mixture(&[2, 2, 2], k).map_err(err_str)?.value;
        monotone &= v <= last;
        last = v;
    }
    let final_zero = bound_mixture(&[2, 2, 2], 4).map_err(err_str)?.value == 0.0;
    checks.push(Check::new(
        "mixture-monotone-in-k",
        monotone && final_zero,
        "bound non-increasing for k=1..6 and exactly zero at k=4",
    ));

    let ind = bound_independence(&[2, 3, 2]).map_err(err_str)?;
    let mix1 = bound_mixture(&[2, 3, 2], 1).map_err(err_str)?;
    checks.push(Check::new(
        "mixture-k1-matches-independence",
        mix1.value == ind.value && mix1.formula == ind.formula,
        format!("both {:.6e}", run.scale(mix1.value)),
    ));
    let rbm0 = bound_rbm(&[2, 3, 2], &[]).map_err(err_str)?;
    checks.push(Check::new(
        "rbm-m0-matches-independence",
        rbm0.value == ind.value && rbm0.formula == ind.formula,
        format!("both {:.6e}", run.scale(rbm0.value)),
    ));

    let zero = bound_rbm(&[2; 4], &[2; 7]).map_err(err_str)?;
    checks.push(Check::new(
        "rbm-binary-hits-zero",
        zero.value == 0.0,
        format!("n=4 m=7 bound {:.6e}", run.scale(zero.value)),
    ));

    let ladder = [(2usize, 2.0 * LN_2), (3, LN_2), (5, 0.0)];
    let mut ladder_ok = true;
    for &(layers, expect) in &ladder {
        let v = bound_dbn(&[2; 4], layers).map_err(err_str)?.value;
        ladder_ok &= (v - expect).abs() < 1e-12;
    }
    checks.push(Check::new(
        "dbn-depth-ladder",
        ladder_ok,
        "n=4 layers 2;3;5 give 2ln2;ln2;0",
    ));

    Ok(checks)
}

fn suite_containment_rbm(run: &RunConfig) -> Result<Vec<Check>, String> {
    let space = StateSpace::binary(3).map_err(err_str)?;
    let partitions = enumerate_subcube_partitions(3, 2).map_err(err_str)?;
    let cfg = run.build_config().grad;
    let mut checks = Vec::new();
    for i in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed.wrapping_add(i));
        let rho = &partitions[rng.gen_range(0..partitions.len())];
        // Random member of one two-block cubical mixture: block weights,
        // then an independent product within each block.
        let mut probs = vec![0.0f64; 8];
        let w: f64 = rng.gen_range(0.05..0.95);
        let weights = [w, 1.0 - w];
        for (bi, block) in rho.blocks().iter().enumerate() {
            let axis_probs: Vec<Vec<f64>> = block
                .axes()
                .iter()
                .map(|vals| {
                    let mut raw: Vec<f64> =
                        (0..vals.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let s: f64 = raw.iter().sum();
                    raw.iter_mut().for_each(|v| *v /= s);
                    raw
                })
                .collect();
            for &idx in &block.state_indices(&space) {
                let state = space.state_of(idx).map_err(err_str)?;
                let mut val = weights[bi];
                for (axis, vals) in block.axes().iter().enumerate() {
                    let pos = vals.iter().position(|&v| v == state[axis]).unwrap();
                    val *= axis_probs[axis][pos];
                }
                probs[idx] = val;
            }
        }
        let p = Dist::new(space.clone(), probs).map_err(err_str)?;
        let fit = project_rbm(&p, 1, &cfg).map_err(err_str)?;
        let d = fit.divergence.value();
        checks.push(Check::new(
            format!("rbm-fits-cubical-union-{i}"),
            d <= 1e-2,
            format!("divergence {:.3e}", run.scale(d)),
        ));
    }
    Ok(checks)
}

fn suite_containment_dbn(run: &RunConfig) -> Result<Vec<Check>, String> {
    let space = StateSpace::binary(2).map_err(err_str)?;
    let cfg = run.build_config().grad;
    let mut checks = Vec::new();
    for i in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed.wrapping_add(i));
        let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let p = Dist::new(space.clone(), raw.iter().map(|v| v / s).collect())
            .map_err(err_str)?;
        let fit = project_dbn(&p, &[2, 2, 2], &cfg).map_err(err_str)?;
        let d = fit.divergence.value();
        checks.push(Check::new(
            format!("dbn-fits-two-bits-{i}"),
            d <= 1e-2,
            format!("divergence {:.3e}", run.scale(d)),
        ));
    }
    Ok(checks)
}

fn suite_maximizers(run: &RunConfig) -> Result<Vec<Check>, String> {
    let mut checks = Vec::new();
    for (n, q) in [(2usize, 2usize), (3, 2), (2, 3)] {
        let target = (n as f64 - 1.0) * (q as f64).ln();
        let model = IndependenceModel::new(StateSpace::new(vec![q; n]).map_err(err_str)?);
        let listed = independence_maximizers(n, q, 32).map_err(err_str)?;
        let mut worst: f64 = 0.0;
        for p in &listed.dists {
            let d = model.divergence(p).map_err(err_str)?;
            worst = worst.max((d - target).abs());
        }
        checks.push(Check::new(
            format!("independence-constructed-{n}-{q}"),
            !listed.dists.is_empty() && worst <= 1e-10,
            format!("{} maximizers within {:.3e} of (n-1)ln q", listed.dists.len(), worst),
        ));
        let ascent = multistart_ascent(&model, &run.ascent_config()).map_err(err_str)?;
        checks.push(Check::new(
            format!("independence-ascent-{n}-{q}"),
            (ascent.value - target).abs() <= 1e-4,
            format!("ascent within {:.3e}", (ascent.value - target).abs()),
        ));
    }

    let space = StateSpace::new(vec![8]).map_err(err_str)?;
    let rho = Partition::new(space, vec![vec![0, 1, 2, 3], vec![4, 5], vec![6, 7]])
        .map_err(err_str)?;
    let target = 4f64.ln();
    let model = PartitionModel::new(rho.clone());
    let listed = partition_maximizers(&rho, 32).map_err(err_str)?;
    let mut worst: f64 = 0.0;
    for p in &listed.dists {
        let d = model.divergence(p).map_err(err_str)?;
        worst = worst.max((d - target).abs());
    }
    checks.push(Check::new(
        "partition-constructed",
        !listed.dists.is_empty() && worst <= 1e-10,
        format!("{} maximizers within {:.3e} of ln c", listed.dists.len(), worst),
    ));
    let ascent = multistart_ascent(&model, &run.ascent_config()).map_err(err_str)?;
    checks.push(Check::new(
        "partition-ascent",
        (ascent.value - target).abs() <= 1e-6,
        format!("ascent within {:.3e}", (ascent.value - target).abs()),
    ));
    Ok(checks)
}

fn random_simplex(rng: &mut ChaCha8Rng, len: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(floor..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

fn random_partition(rng: &mut ChaCha8Rng, space: &StateSpace, blocks: usize) -> Partition {
    let n = space.total();
    let mut states: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        states.swap(i, rng.gen_range(0..=i));
    }
    let mut cuts: Vec<usize> = (1..n).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.gen_range(0..=i));
    }
    cuts.truncate(blocks - 1);
    cuts.sort_unstable();
    cuts.push(n);
    let mut out = Vec::new();
    let mut start = 0;
    for &c in &cuts {
        out.push(states[start..c].to_vec());
        start = c;
    }
    Partition::new(space.clone(), out).expect("covering blocks")
}

fn suite_pythagoras(run: &RunConfig) -> Result<Vec<Check>, String> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);

    // D(p||q) = D(p||q*) + D(q*||q) for q inside the model and q* the
    // projection of p.
    let space = StateSpace::new(vec![2, 3]).map_err(err_str)?;
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let blocks = rng.gen_range(1..=space.total());
        let rho = random_partition(&mut rng, &space, blocks);
        let p = Dist::new(space.clone(), random_simplex(&mut rng, space.total(), 1e-3))
            .map_err(err_str)?;
        let mut q_probs = vec![0.0; space.total()];
        let masses = random_simplex(&mut rng, rho.blocks().len(), 0.05);
        for (bi, block) in rho.blocks().iter().enumerate() {
            for &x in block {
                q_probs[x] = masses[bi] / block.len() as f64;
            }
        }
        let q = Dist::new(space.clone(), q_probs).map_err(err_str)?;
        let q_star = project_partition(&p, &rho).map_err(err_str)?.q_star;
        let lhs = p.kl(&q).map_err(err_str)?.value();
        let rhs = p.kl(&q_star).map_err(err_str)?.value()
            + q_star.kl(&q).map_err(err_str)?.value();
        worst = worst.max((lhs - rhs).abs());
    }
    checks.push(Check::new(
        "pythagoras-partition",
        worst <= 1e-8,
        format!("worst identity error {:.3e} across 25 triples", worst),
    ));

    let space = StateSpace::binary(3).map_err(err_str)?;
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let p = Dist::new(space.clone(), random_simplex(&mut rng, 8, 1e-3))
            .map_err(err_str)?;
        let factors: Vec<Dist> = (0..3)
            .map(|_| {
                let probs = random_simplex(&mut rng, 2, 0.05);
                Dist::new(StateSpace::new(vec![2]).expect("unary space"), probs)
                    .expect("normalized")
            })
            .collect();
        let q = Dist::product(&factors).map_err(err_str)?;
        let q_star = project_independence(&p).map_err(err_str)?.q_star;
        let lhs = p.kl(&q).map_err(err_str)?.value();
        let rhs = p.kl(&q_star).map_err(err_str)?.value()
            + q_star.kl(&q).map_err(err_str)?.value();
        worst = worst.max((lhs - rhs).abs());
    }
    checks.push(Check::new(
        "pythagoras-independence",
        worst <= 1e-8,
        format!("worst identity error {:.3e} across 25 triples", worst),
    ));

    Ok(checks)
}
