//! Command-line driver.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bias::{BiasSpec, DEFAULT_CONSTANT_THRESHOLD};
use crate::biasgen;
use crate::clause::HornDefinition;
use crate::error::Error;
use crate::eval::{self, Method};
use crate::exec::{self, Exec};
use crate::fixtures;
use crate::learner::{self, LearnConfig};
use crate::lgg;
use crate::profiler::{self, DEFAULT_ALPHA};
use crate::relstore::{self, DatabaseInstance, ExampleSet};
use crate::syntax;

#[derive(Debug, Parser)]
#[command(
    name = "automode",
    version,
    about = "Learn Datalog definitions from a relational database with an automatically induced language bias"
)]
struct Cli {
    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List unary inclusion dependencies with error at most alpha.
    DiscoverInds(DiscoverArgs),
    /// Derive predicate and mode declarations and write bias.txt.
    InduceBias(InduceArgs),
    /// Learn a definition of the target relation and write model.dl.
    Learn(LearnArgs),
    /// Cross-validate the learner and write report.json.
    Evaluate(EvaluateArgs),
    /// Run the packaged department fragment end to end.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Schema file, one `rel(attr,...)` per line.
    #[arg(long)]
    schema: PathBuf,
    /// Directory holding one `<relation>.csv` per relation, header included.
    #[arg(long)]
    facts: PathBuf,
    /// Target relation; defaults to the relation of the first example.
    #[arg(long)]
    target: Option<String>,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Largest IND error accepted.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// An attribute with fewer distinct values than this may hold constants.
    #[arg(long, default_value_t = DEFAULT_CONSTANT_THRESHOLD)]
    constant_threshold: usize,
}

#[derive(Debug, Args)]
struct DiscoverArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Examples; their positives populate the target relation for profiling.
    #[arg(long)]
    examples: Option<PathBuf>,
    /// Largest IND error accepted
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InduceArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Example file, one `+ rel(a,b)` or `- rel(a,b)` per line
    #[arg(long)]
    examples: PathBuf,
    #[command(flatten)]
    profile: ProfileArgs,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Generalizer {
    Armg,
    Lgg,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Bottom-clause rounds.
    #[arg(long, default_value_t = 2)]
    iterations: usize,
    /// Candidates kept per generalization round
    #[arg(long, default_value_t = 3)]
    beam_width: usize,
    /// Positives drawn per generalization round.
    #[arg(long, default_value_t = 20)]
    sample_size: usize,
    /// Lowest training precision a clause may have
    #[arg(long, default_value_t = 0.5)]
    min_precision: f64,
    /// Default: 2, or 1 with fewer than 4 positives.
    #[arg(long)]
    min_positives: Option<usize>,
    /// Literals one relation may add per bottom-clause round.
    #[arg(long, default_value_t = 100)]
    per_relation_cap: usize,
    /// Seed for sampling, fold assignment and negative generation
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keep literals that do not help exclude negatives.
    #[arg(long)]
    no_negative_reduction: bool,
    /// Largest database the lgg generalizer accepts, in tuples.
    #[arg(long, default_value_t = 10_000)]
    lgg_tuple_guard: usize,
    /// Generalization operator
    #[arg(long, value_enum, default_value_t = Generalizer::Armg)]
    generalizer: Generalizer,
    /// Use only the predicate declarations of the bias (lgg).
    #[arg(long)]
    predicates_only: bool,
    /// Bias file; induced from the data when absent.
    #[arg(long)]
    bias: Option<PathBuf>,
    #[command(flatten)]
    profile: ProfileArgs,
}

impl SearchArgs {
    fn config(&self, exec: Exec) -> LearnConfig {
        LearnConfig {
            iterations: self.iterations,
            beam_width: self.beam_width,
            sample_size: self.sample_size,
            min_precision: self.min_precision,
            min_positives: self.min_positives,
            per_relation_cap: self.per_relation_cap,
            rng_seed: self.seed,
            negative_reduction: !self.no_negative_reduction,
            lgg_tuple_guard: self.lgg_tuple_guard,
            exec,
        }
    }
}

#[derive(Debug, Args)]
struct LearnArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Example file, one `+ rel(a,b)` or `- rel(a,b)` per line
    #[arg(long)]
    examples: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Example file, one `+ rel(a,b)` or `- rel(a,b)` per line
    #[arg(long)]
    examples: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Number of cross-validation folds
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Negatives generated per positive when the examples have none.
    #[arg(long, default_value_t = 2)]
    neg_ratio: usize,
    /// Report file (default: standard output)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Also write the fixture inputs and results here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Written next to every output file as `<output>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub version: String,
}

impl RunManifest {
    fn new(command: &str, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            inputs: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Records a content hash for a file, or for every file under a directory.
    fn digest(&mut self, path: &Path) -> anyhow::Result<()> {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("reading {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            for p in entries {
                self.digest(&p)?;
            }
        } else {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let hash = Sha256::digest(&bytes);
            let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
            self.inputs.insert(path.display().to_string(), hex);
        }
        Ok(())
    }

    fn write_next_to(&self, output: &Path) -> anyhow::Result<()> {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Writes to `out`, or to standard output when `out` is `None`.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn first_example_relation(path: &Path) -> anyhow::Result<String> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for line in text.lines().map(str::trim) {
        let atom = line
            .strip_prefix('+')
            .or_else(|| line.strip_prefix('-'))
            .or_else(|| line.strip_prefix('−'));
        if let Some(atom) = atom {
            if let Ok((name, _)) = syntax::parse_atom(atom) {
                return Ok(name);
            }
        }
    }
    bail!(Error::Validation(format!(
        "no labeled examples in {}; pass --target",
        path.display()
    )))
}

struct Loaded {
    db: DatabaseInstance,
    examples: Option<ExampleSet>,
}

fn load(data: &DataArgs, examples: Option<&Path>) -> anyhow::Result<Loaded> {
    let target = match (&data.target, examples) {
        (Some(t), _) => Some(t.clone()),
        (None, Some(e)) => Some(first_example_relation(e)?),
        (None, None) => None,
    };
    let (db, declared) = relstore::load_database_for_target(&data.schema, &data.facts, target.as_deref())?;
    let examples = match examples {
        Some(path) => {
            let target = target.expect("set whenever examples are given");
            let schema = match declared {
                Some(s) => s,
                None => relstore::infer_target_schema(path, &target)?,
            };
            Some(relstore::load_examples(path, &schema)?)
        }
        None => None,
    };
    Ok(Loaded { db, examples })
}

fn exec_of(cli: &Cli) -> Exec {
    if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 on a
/// validation or runtime error, 2 on a usage error.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    exec::configure_jobs(cli.jobs)?;
    let exec = exec_of(cli);
    match &cli.command {
        Command::DiscoverInds(a) => discover(a, exec),
        Command::InduceBias(a) => induce(a, exec),
        Command::Learn(a) => learn(a, exec),
        Command::Evaluate(a) => evaluate(a, exec),
        Command::Demo(a) => demo(a, exec),
    }
}

fn discover(a: &DiscoverArgs, exec: Exec) -> anyhow::Result<()> {
    let loaded = load(&a.data, a.examples.as_deref())?;
    let db = match &loaded.examples {
        Some(ex) => loaded.db.with_relation(ex.target.clone(), &ex.positives)?,
        None => loaded.db,
    };
    let inds = profiler::discover_inds(&db, a.alpha, exec)?;
    emit(a.out.as_deref(), &inds.render(&db))?;
    if let Some(out) = &a.out {
        let mut m = RunManifest::new("discover-inds", serde_json::json!({ "alpha": a.alpha }));
        m.digest(&a.data.schema)?;
        m.digest(&a.data.facts)?;
        if let Some(e) = &a.examples {
            m.digest(e)?;
        }
        m.write_next_to(out)?;
    }
    Ok(())
}

fn induce(a: &InduceArgs, exec: Exec) -> anyhow::Result<()> {
    let loaded = load(&a.data, Some(&a.examples))?;
    let ex = loaded.examples.expect("examples given");
    let start = Instant::now();
    let induced = biasgen::induce_bias(
        &loaded.db,
        &ex.target,
        &ex.positives,
        a.profile.alpha,
        a.profile.constant_threshold,
        exec,
    )?;
    eprintln!("bias induction: {:.1} ms", start.elapsed().as_secs_f64() * 1000.0);
    emit(a.out.as_deref(), &induced.bias.render())?;
    if let Some(out) = &a.out {
        let mut m = RunManifest::new(
            "induce-bias",
            serde_json::json!({
                "alpha": a.profile.alpha,
                "constant_threshold": a.profile.constant_threshold,
            }),
        );
        m.digest(&a.data.schema)?;
        m.digest(&a.data.facts)?;
        m.digest(&a.examples)?;
        m.write_next_to(out)?;
    }
    Ok(())
}

/// The bias for `learn`/`evaluate`: read from `--bias` or induced, plus the
/// time spent inducing it.
fn resolve_bias(
    s: &SearchArgs,
    db: &DatabaseInstance,
    ex: &ExampleSet,
    exec: Exec,
) -> anyhow::Result<(BiasSpec, Option<f64>)> {
    if s.predicates_only && s.generalizer != Generalizer::Lgg {
        bail!(Error::Config("--predicates-only needs --generalizer lgg".into()));
    }
    match &s.bias {
        Some(path) => {
            let bias = BiasSpec::read(path)?;
            if s.generalizer == Generalizer::Lgg && !bias.modes().is_empty() {
                log::warn!("the lgg generalizer ignores the mode declarations in {}", path.display());
            }
            Ok((bias, None))
        }
        None => {
            let start = Instant::now();
            let induced = biasgen::induce_bias(
                db,
                &ex.target,
                &ex.positives,
                s.profile.alpha,
                s.profile.constant_threshold,
                exec,
            )?;
            Ok((induced.bias, Some(start.elapsed().as_secs_f64() * 1000.0)))
        }
    }
}

fn search_config_json(s: &SearchArgs, cfg: &LearnConfig) -> serde_json::Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    let obj = v.as_object_mut().expect("config is an object");
    obj.insert("generalizer".into(), serde_json::to_value(s.generalizer).expect("enum"));
    obj.insert("predicates_only".into(), s.predicates_only.into());
    if s.bias.is_none() {
        obj.insert("alpha".into(), s.profile.alpha.into());
        obj.insert("constant_threshold".into(), s.profile.constant_threshold.into());
    }
    v
}

fn learn_once(
    s: &SearchArgs,
    db: &DatabaseInstance,
    ex: &ExampleSet,
    bias: &BiasSpec,
    cfg: &LearnConfig,
) -> anyhow::Result<HornDefinition> {
    Ok(match s.generalizer {
        Generalizer::Armg => learner::learn_definition(db, ex, bias, cfg)?,
        Generalizer::Lgg => lgg::lgg_learn(db, ex, bias.predicates(), cfg)?,
    })
}

/// Clause lines followed by the training metrics trailer.
fn model_text(def: &HornDefinition, precision: f64, recall: f64, learn_ms: f64, bias_ms: Option<f64>) -> String {
    let mut text = def.render();
    if let Some(ms) = bias_ms {
        text.push_str(&format!("# bias_wall_ms={ms:.1}\n"));
    }
    text.push_str(&format!(
        "# train_precision={precision:.6} train_recall={recall:.6} wall_ms={learn_ms:.1}\n"
    ));
    text
}

fn learn(a: &LearnArgs, exec: Exec) -> anyhow::Result<()> {
    let loaded = load(&a.data, Some(&a.examples))?;
    let ex = loaded.examples.expect("examples given");
    let db = loaded.db;
    let cfg = a.search.config(exec);
    cfg.validate()?;
    if ex.negatives.is_empty() {
        log::warn!("no negative examples in {}; nothing constrains the learned clauses", a.examples.display());
    }
    let (bias, bias_ms) = resolve_bias(&a.search, &db, &ex, exec)?;
    if let Some(ms) = bias_ms {
        eprintln!("bias induction: {ms:.1} ms");
    }
    let start = Instant::now();
    let def = learn_once(&a.search, &db, &ex, &bias, &cfg)?;
    let learn_ms = start.elapsed().as_secs_f64() * 1000.0;
    eprintln!("learning: {learn_ms:.1} ms, {} clause(s)", def.len());
    let (p, r) = eval::precision_recall(&def, &ex.positives, &ex.negatives, &db, exec)?;
    emit(a.out.as_deref(), &model_text(&def, p, r, learn_ms, bias_ms))?;
    if let Some(out) = &a.out {
        let mut m = RunManifest::new("learn", search_config_json(&a.search, &cfg));
        m.digest(&a.data.schema)?;
        m.digest(&a.data.facts)?;
        m.digest(&a.examples)?;
        if let Some(b) = &a.search.bias {
            m.digest(b)?;
        }
        m.write_next_to(out)?;
    }
    Ok(())
}

fn evaluate(a: &EvaluateArgs, exec: Exec) -> anyhow::Result<()> {
    let loaded = load(&a.data, Some(&a.examples))?;
    let mut ex = loaded.examples.expect("examples given");
    let db = loaded.db;
    let cfg = a.search.config(exec);
    if ex.negatives.is_empty() {
        let negs = eval::generate_negatives(&db, &ex.positives, &ex.target, a.neg_ratio, a.search.seed)?;
        log::info!("generated {} negatives", negs.len());
        ex = ExampleSet::new(ex.target.clone(), ex.positives, negs)?;
    }
    if a.search.predicates_only && a.search.generalizer != Generalizer::Lgg {
        bail!(Error::Config("--predicates-only needs --generalizer lgg".into()));
    }
    let method = match (&a.search.bias, a.search.generalizer) {
        (Some(_), Generalizer::Armg) => Method::Armg(resolve_bias(&a.search, &db, &ex, exec)?.0),
        (Some(_), Generalizer::Lgg) => Method::Lgg(resolve_bias(&a.search, &db, &ex, exec)?.0.predicates().to_vec()),
        (None, Generalizer::Armg) => Method::ArmgInduced {
            alpha: a.search.profile.alpha,
            constant_threshold: a.search.profile.constant_threshold,
        },
        (None, Generalizer::Lgg) => {
            let (bias, _) = resolve_bias(&a.search, &db, &ex, exec)?;
            Method::Lgg(bias.predicates().to_vec())
        }
    };
    let report = eval::cross_validate(&db, &ex, &method, &cfg, a.folds, a.search.seed)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    emit(a.report.as_deref(), &text)?;
    eprintln!(
        "mean precision {:.3}, mean recall {:.3}, mean learning time {:.1} ms over {} folds",
        report.mean_precision, report.mean_recall, report.mean_wall_ms, report.folds
    );
    eprintln!("note: a fold whose definition covers no test example counts precision 1.0");
    if let Some(out) = &a.report {
        let mut config = search_config_json(&a.search, &cfg);
        let obj = config.as_object_mut().expect("object");
        obj.insert("folds".into(), a.folds.into());
        obj.insert("neg_ratio".into(), a.neg_ratio.into());
        let mut m = RunManifest::new("evaluate", config);
        m.digest(&a.data.schema)?;
        m.digest(&a.data.facts)?;
        m.digest(&a.examples)?;
        if let Some(b) = &a.search.bias {
            m.digest(b)?;
        }
        m.write_next_to(out)?;
    }
    Ok(())
}

fn demo(a: &DemoArgs, exec: Exec) -> anyhow::Result<()> {
    let fixture = &fixtures::UWCSE_FRAGMENT;
    let f = fixture.load()?;
    let cfg = LearnConfig {
        exec,
        ..LearnConfig::default()
    };
    let start = Instant::now();
    let induced = biasgen::induce_bias(
        &f.db,
        &f.examples.target,
        &f.examples.positives,
        DEFAULT_ALPHA,
        DEFAULT_CONSTANT_THRESHOLD,
        exec,
    )?;
    let bias_ms = start.elapsed().as_secs_f64() * 1000.0;
    let start = Instant::now();
    let def = learner::learn_definition(&f.db, &f.examples, &induced.bias, &cfg)?;
    let learn_ms = start.elapsed().as_secs_f64() * 1000.0;
    let (p, r) = eval::precision_recall(&def, &f.examples.positives, &f.examples.negatives, &f.db, exec)?;

    let mut out = String::new();
    out.push_str(&format!("fixture: {}\n\ninduced bias:\n", fixture.name));
    out.push_str(&induced.bias.render());
    out.push_str("\nlearned definition:\n");
    out.push_str(&def.render());
    out.push_str(&format!("\ntrain precision {p:.3}, train recall {r:.3}\n"));
    out.push_str(&format!("bias induction {bias_ms:.1} ms, learning {learn_ms:.1} ms\n"));
    emit(None, &out)?;

    if let Some(dir) = &a.out_dir {
        fixture.materialize(dir)?;
        fs::write(dir.join("bias.txt"), induced.bias.render())?;
        fs::write(dir.join("model.dl"), model_text(&def, p, r, learn_ms, Some(bias_ms)))?;
        eprintln!("wrote fixture inputs, bias.txt and model.dl to {}", dir.display());
    }
    Ok(())
}
