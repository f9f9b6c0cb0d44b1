//! Command-line front end.

pub mod cache;
pub mod config;

use std::collections::HashMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::admissible::{admissible_set_j, check_additivity, check_compatibility, check_sigma_image};
use crate::error::{Error, Result};
use crate::mazur::{self, b_g_mu, mu_grid, stable_subsets};
use crate::report::Report;
use crate::rootdata::{LatticeChoice, LatticeVec};
use crate::weyl::IwahoriWeylGroup;

pub use cache::{LayerCache, CACHE_ENV};
pub use config::{DatumSpec, Format, Job, JobConfig, TauSpec, TwistSpec};

/// Length bound used when neither the flag nor the config sets one.
pub const DEFAULT_LENGTH_BOUND: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "iwahori", version, about = "Admissible sets and straight classes of Iwahori-Weyl groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Job configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides `length_bound` from the config.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub length_bound: Option<i64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Layer cache directory; falls back to $IWAHORI_CACHE_DIR.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Adm^J(mu) as (lambda, word, length) rows.
    Adm,
    /// Straight classes up to the length bound, with their Hasse diagram.
    Classes,
    /// Newton point, Kottwitz invariant and straightness of every element
    /// up to the length bound.
    Newton,
    /// The acceptable set B(G, mu).
    Bgmu,
    /// Run verification checks; without --config, over the default matrix.
    Check {
        #[arg(value_enum, default_value = "all")]
        which: Which,
    },
    /// The straight-class poset (DOT by default).
    Poset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    All,
    #[value(name = "A", aliases = ["a", "nonempty"])]
    Nonempty,
    Tri,
    Add,
    Comp,
    Mazur,
    #[value(name = "max")]
    MaxNewton,
    Min,
    Sigma,
}

impl Which {
    fn includes(self, other: Which) -> bool {
        self == Which::All || self == other
    }
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) | Error::PlateauCapExceeded(_) => 1,
        _ => 2,
    }
}

fn error_json(e: &Error) -> Value {
    match e {
        Error::Config { path, message } => json!({"error": "config", "path": path, "message": message}),
        other => json!({"error": "runtime", "message": other.to_string()}),
    }
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn element_row(group: &IwahoriWeylGroup, x: &crate::weyl::IwahoriWeylElement) -> Vec<String> {
    let (word, _) = group.reduced_word(x);
    vec![
        join(x.translation().iter(), " "),
        join(word.iter().map(|&s| group.simple_reflections().label(s)), " "),
        group.length(x).to_string(),
    ]
}

fn unsupported(format: Format, verb: &str) -> Error {
    Error::config("format", format!("{verb} does not support {format:?} output"))
}

impl Job {
    fn bound(&self) -> usize {
        self.length_bound.unwrap_or(DEFAULT_LENGTH_BOUND)
    }

    fn format_or(&self, default: Format) -> Format {
        self.config.format.unwrap_or(default)
    }

    pub fn adm_output(&self, format: Format) -> Result<String> {
        let g = self.group();
        let mu = self.require_mu()?;
        let set = admissible_set_j(g, mu, self.j.as_deref().unwrap_or(&[]))?;
        match format {
            Format::Json => Ok(pretty(&set.to_json(g))),
            Format::Csv => csv_string(
                &["lambda", "word", "length"],
                set.elements.iter().map(|x| element_row(g, x)).collect(),
            ),
            Format::Dot => Err(unsupported(format, "adm")),
        }
    }

    pub fn classes_output(&self, format: Format) -> Result<String> {
        let poset = self.engine.straight_poset(self.bound())?;
        match format {
            Format::Json => Ok(pretty(&poset.to_json(&self.engine))),
            Format::Dot => Ok(poset.to_dot()),
            Format::Csv => csv_string(
                &["index", "newton", "kappa", "min_length", "key", "min_reps"],
                poset
                    .classes
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        vec![
                            i.to_string(),
                            c.newton.to_string(),
                            c.kappa.to_string(),
                            c.min_length.to_string(),
                            self.group().describe(c.key()),
                            c.min_reps.len().to_string(),
                        ]
                    })
                    .collect(),
            ),
        }
    }

    pub fn poset_output(&self, format: Format) -> Result<String> {
        self.classes_output(format)
    }

    pub fn newton_output(&self, format: Format) -> Result<String> {
        let g = self.group();
        let e = &self.engine;
        let elements = g.elements_up_to(self.bound());
        let rows: Vec<(Vec<String>, Value)> = elements
            .par_iter()
            .map(|x| {
                let nu = e.newton_point(x);
                let kappa = e.twist().kottwitz_kappa(x);
                let straight = e.is_straight(x);
                let mut row = element_row(g, x);
                row.extend([nu.to_string(), kappa.to_string(), straight.to_string()]);
                let mut v = g.element_json(x);
                v["newton"] = json!(nu);
                v["kappa"] = json!(kappa);
                v["straight"] = json!(straight);
                (row, v)
            })
            .collect();
        match format {
            Format::Json => Ok(pretty(&Value::Array(rows.into_iter().map(|(_, v)| v).collect()))),
            Format::Csv => csv_string(
                &["lambda", "word", "length", "newton", "kappa", "straight"],
                rows.into_iter().map(|(r, _)| r).collect(),
            ),
            Format::Dot => Err(unsupported(format, "newton")),
        }
    }

    pub fn bgmu_output(&self, format: Format) -> Result<String> {
        let mu = self.require_mu()?;
        let b = b_g_mu(&self.engine, mu)?;
        match format {
            Format::Json => Ok(pretty(&json!({
                "mu": b.mu.as_slice(),
                "mu_diamond": b.mu_diamond,
                "mu_sharp": b.mu_sharp,
                "maximal_newton": b.maximal_newton,
                "classes": b.classes.iter().map(|c| self.engine.class_json(c)).collect::<Vec<_>>(),
            }))),
            Format::Csv => csv_string(
                &["newton", "kappa", "min_length", "key"],
                b.classes
                    .iter()
                    .map(|c| {
                        vec![
                            c.newton.to_string(),
                            c.kappa.to_string(),
                            c.min_length.to_string(),
                            self.group().describe(c.key()),
                        ]
                    })
                    .collect(),
            ),
            Format::Dot => Err(unsupported(format, "bgmu")),
        }
    }
}

#[derive(Debug, Clone)]
enum Task {
    Nonempty(LatticeVec, Vec<usize>),
    Tri(usize),
    Add(LatticeVec, LatticeVec),
    Comp(LatticeVec, Vec<usize>),
    Mazur(LatticeVec),
    MaxNewton(LatticeVec),
    Min(usize),
    Sigma(LatticeVec),
}

fn tasks(job: &Job, which: Which, additivity: bool) -> Vec<Task> {
    let e = &job.engine;
    let mus: Vec<LatticeVec> = match &job.mu {
        Some(mu) => vec![mu.clone()],
        None => mu_grid(e),
    };
    let js: Vec<Vec<usize>> = match &job.j {
        Some(j) => vec![j.clone()],
        None => stable_subsets(e),
    };
    let bound = job.bound();
    let mut out = Vec::new();
    if which.includes(Which::Nonempty) {
        for mu in &mus {
            for j in &js {
                out.push(Task::Nonempty(mu.clone(), j.clone()));
            }
        }
    }
    if which.includes(Which::Tri) {
        out.push(Task::Tri(bound));
    }
    if additivity && which.includes(Which::Add) {
        for (i, a) in mus.iter().enumerate() {
            for b in &mus[i..] {
                out.push(Task::Add(a.clone(), b.clone()));
            }
        }
    }
    if which.includes(Which::Comp) {
        for mu in &mus {
            for j in &js {
                out.push(Task::Comp(mu.clone(), j.clone()));
            }
        }
    }
    for mu in &mus {
        if which.includes(Which::Mazur) {
            out.push(Task::Mazur(mu.clone()));
        }
        if which.includes(Which::MaxNewton) {
            out.push(Task::MaxNewton(mu.clone()));
        }
        if which.includes(Which::Sigma) {
            out.push(Task::Sigma(mu.clone()));
        }
    }
    if which.includes(Which::Min) {
        out.push(Task::Min(bound));
    }
    out
}

fn run_task(job: &Job, task: &Task) -> Result<Report> {
    let e = &job.engine;
    let g = e.group();
    let mut report = match task {
        Task::Nonempty(mu, j) => mazur::verify_nonemptiness(e, mu, j)?,
        Task::Tri(l) => mazur::verify_tri_order(e, *l)?,
        Task::Add(a, b) => check_additivity(g, a, b)?,
        Task::Comp(mu, j) => check_compatibility(g, mu, j)?,
        Task::Mazur(mu) => mazur::verify_mazur_iwahori(e, mu)?,
        Task::MaxNewton(mu) => mazur::verify_maximal_newton(e, mu)?,
        Task::Min(l) => mazur::verify_min_length(e, *l)?,
        Task::Sigma(mu) => check_sigma_image(e.twist(), mu)?,
    };
    // every report names the full context it ran in
    if let Value::Object(ctx) = mazur::context(e) {
        if let Some(params) = report.parameters.as_object_mut() {
            for (k, v) in ctx {
                params.entry(k).or_insert(v);
            }
        }
    }
    Ok(report)
}

/// Runs the selected checks for each job. Additivity does not depend on
/// the twist, so it runs once per datum (on its first job).
pub fn run_checks(jobs: &[Job], which: Which) -> Result<Vec<Report>> {
    let mut seen_data = std::collections::HashSet::new();
    let cells: Vec<(usize, Task)> = jobs
        .iter()
        .enumerate()
        .flat_map(|(i, job)| {
            let first = seen_data.insert(serde_json::to_string(&job.config.datum).expect("serializes"));
            tasks(job, which, first).into_iter().map(move |t| (i, t))
        })
        .collect();
    cells.par_iter().map(|(i, t)| run_task(&jobs[*i], t)).collect()
}

pub fn checks_json(reports: &[Report]) -> Value {
    let passed = reports.iter().filter(|r| r.passed()).count();
    json!({
        "reports": reports,
        "summary": {"total": reports.len(), "passed": passed, "failed": reports.len() - passed},
    })
}

/// `Omega` element `index` of `group` as a config entry.
pub fn tau_spec(group: &IwahoriWeylGroup, index: usize) -> TauSpec {
    let omega = &group.omega()[index];
    TauSpec {
        lambda: omega.translation().to_vec(),
        w: group.finite_weyl_group().word(omega.finite()).iter().map(|i| i + 1).collect(),
    }
}

/// The default check matrix: A1, A2, B2 and A1xA1, simply connected and
/// adjoint, with the trivial twist, the diagram swaps of A2 and A1xA1, and
/// a nontrivial `tau` for adjoint A1, A2 and B2.
pub fn default_matrix() -> Result<Vec<(JobConfig, Arc<IwahoriWeylGroup>)>> {
    let mut out = Vec::new();
    for t in ["A1", "A2", "B2", "A1xA1"] {
        for lattice in [LatticeChoice::SimplyConnected, LatticeChoice::Adjoint] {
            let base = JobConfig::simple(t, lattice.clone());
            let group = Arc::new(IwahoriWeylGroup::new(base.datum.build()?)?);
            let mut twists = vec![TwistSpec::default()];
            if t == "A2" || t == "A1xA1" {
                twists.push(TwistSpec {
                    sigma0: Some(vec![2, 1]),
                    tau: None,
                });
            }
            if lattice == LatticeChoice::Adjoint && t != "A1xA1" {
                twists.push(TwistSpec {
                    sigma0: None,
                    tau: Some(tau_spec(&group, 1)),
                });
            }
            for twist in twists {
                let mut c = base.clone();
                c.twist = twist;
                out.push((c, group.clone()));
            }
        }
    }
    Ok(out)
}

struct Output {
    text: String,
    code: i32,
}

fn execute(cli: &Cli) -> Result<Output> {
    let cache = LayerCache::from_options(cli.cache_dir.as_deref());
    let override_bound = |mut c: JobConfig| -> JobConfig {
        if cli.length_bound.is_some() {
            c.length_bound = cli.length_bound;
        }
        c
    };

    let jobs: Vec<Job> = match &cli.config {
        Some(path) => vec![Job::new(override_bound(JobConfig::from_path(path)?))?],
        None => match cli.command {
            Command::Check { .. } => default_matrix()?
                .into_iter()
                .map(|(c, g)| Job::with_group(override_bound(c), g))
                .collect::<Result<_>>()?,
            _ => return Err(Error::config("--config", "this command needs a config file")),
        },
    };

    // seed every distinct group from the cache
    let mut groups: HashMap<String, (DatumSpec, &IwahoriWeylGroup, usize)> = HashMap::new();
    for job in &jobs {
        let key = serde_json::to_string(&job.config.datum)?;
        groups.entry(key).or_insert_with(|| {
            let loaded = cache.as_ref().map_or(0, |c| c.load(&job.config.datum, job.group()));
            (job.config.datum.clone(), job.group(), loaded)
        });
    }

    let job = &jobs[0];
    let output = match cli.command {
        Command::Adm => Output {
            text: job.adm_output(cli.format.unwrap_or(job.format_or(Format::Json)))?,
            code: 0,
        },
        Command::Classes => Output {
            text: job.classes_output(cli.format.unwrap_or(job.format_or(Format::Json)))?,
            code: 0,
        },
        Command::Poset => Output {
            text: job.poset_output(cli.format.unwrap_or(job.format_or(Format::Dot)))?,
            code: 0,
        },
        Command::Newton => Output {
            text: job.newton_output(cli.format.unwrap_or(job.format_or(Format::Json)))?,
            code: 0,
        },
        Command::Bgmu => Output {
            text: job.bgmu_output(cli.format.unwrap_or(job.format_or(Format::Json)))?,
            code: 0,
        },
        Command::Check { which } => {
            let format = cli.format.unwrap_or(Format::Json);
            if format != Format::Json {
                return Err(unsupported(format, "check"));
            }
            let reports = run_checks(&jobs, which)?;
            let failed = reports.iter().any(|r| !r.passed());
            Output {
                text: pretty(&checks_json(&reports)),
                code: i32::from(failed),
            }
        }
    };

    if let Some(cache) = &cache {
        for (datum, group, loaded) in groups.values() {
            if group.cached_layer_count() > *loaded {
                if let Err(e) = cache.store(datum, group) {
                    eprintln!("warning: could not write layer cache: {e}");
                }
            }
        }
    }
    Ok(output)
}

/// Parses arguments, runs the command, prints its output and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("{}", error_json(&Error::config("--jobs", "must be positive")));
            return 2;
        }
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            out.code
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}
