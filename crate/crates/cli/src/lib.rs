//! Experiment runner behind the `dno` binary.

pub mod config;
pub mod suites;
pub mod tabulated;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use dno_core::analysis::{qualify, rate_fit, sweep, BoundInputs, EpsRule, GridSpec, QualifyConfig, SweepSpec};
use dno_core::constructor::{build_dno_with, DnoForm};
use dno_core::corpus::{default_corpus, parse_manifest, TestFunction};
use dno_core::Precision;
use serde::Serialize;

use crate::config::{parse_n_list, Cli, Command, Layered, RunConfig, SourceArgs, SourceInfo};
use crate::tabulated::Tabulated;

pub const ARTIFACT: &str = "dno-cli";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit code for runs that complete but fail a check.
pub const EXIT_CHECK_FAILED: u8 = 2;

/// A sampled function: a corpus entry or a table.
pub enum Source {
    Corpus(TestFunction),
    Table(Tabulated),
}

impl Source {
    pub fn dim(&self) -> usize {
        match self {
            Source::Corpus(f) => f.d,
            Source::Table(t) => t.dim(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            Source::Corpus(f) => f.evaluate(x),
            Source::Table(t) => t.evaluate(x),
        }
    }
}

fn load_source(args: SourceArgs, layered: &Layered) -> Result<(Source, SourceInfo)> {
    let corpus: Option<String> = layered.pick(args.corpus, "corpus")?;
    let input: Option<PathBuf> = layered.pick(args.input, "input")?;
    let manifest: Option<PathBuf> = layered.pick(args.manifest, "manifest")?;
    match (corpus, input) {
        (Some(_), Some(_)) => bail!("give either a corpus id or an input table, not both"),
        (None, None) => bail!("no function given: use --corpus <id> or --input <table>"),
        (Some(id), None) => {
            let entries = match &manifest {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading manifest {}", p.display()))?;
                    parse_manifest(&text)?.iter().map(|e| e.build()).collect::<dno_core::Result<Vec<_>>>()?
                }
                None => default_corpus()?,
            };
            let known: Vec<String> = entries.iter().map(|f| f.id.clone()).collect();
            let f = entries
                .into_iter()
                .find(|f| f.id == id)
                .with_context(|| format!("unknown corpus id `{id}` (known: {})", known.join(", ")))?;
            let info = SourceInfo::Corpus { id, manifest: manifest.map(|p| p.display().to_string()) };
            Ok((Source::Corpus(f), info))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading table {}", path.display()))?;
            let table = Tabulated::parse(&text).with_context(|| format!("in {}", path.display()))?;
            let info = SourceInfo::Table {
                path: path.display().to_string(),
                samples: table.len(),
                interpolation: tabulated::METHOD,
            };
            Ok((Source::Table(table), info))
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    artifact: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn envelope_json<T: Serialize>(config: &RunConfig, body: T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&Envelope { artifact: ARTIFACT, version: VERSION, config, body })?;
    text.push('\n');
    Ok(text)
}

/// Sends the artifact to `out` or stdout; human summaries go to stdout only
/// when the artifact does not.
struct Sink {
    out: Option<PathBuf>,
    /// The command writes no artifact to stdout even without `out`.
    stdout_free: bool,
}

impl Sink {
    fn say(&self, line: impl AsRef<str>) {
        if self.out.is_some() || self.stdout_free {
            println!("{}", line.as_ref());
        } else {
            eprintln!("{}", line.as_ref());
        }
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => write_file(p, text),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn wants_json(&self) -> bool {
        self.out.as_deref().and_then(Path::extension).is_some_and(|e| e == "json")
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<ExitCode> {
    let layered = Layered::load(cli.config.as_deref())?;
    let seed: u64 = layered.pick(cli.seed, "seed")?.context("a seed is required (--seed or `seed =` in the config)")?;
    let grid_res: usize = layered.pick(cli.grid_res, "grid-res")?.unwrap_or(10_000);
    if grid_res < 2 {
        bail!("grid resolution must be at least 2");
    }
    let precision: Precision = layered.pick(cli.precision, "precision")?.unwrap_or_default();
    let out: Option<PathBuf> = layered.pick(cli.out, "out")?;
    let sink = Sink { out, stdout_free: matches!(cli.command, Command::Verify(_)) };
    match cli.command {
        Command::Build(a) => {
            let mut cfg = RunConfig::new("build", seed, grid_res, precision);
            let (source, info) = load_source(a.source, &layered)?;
            cfg.source = Some(info);
            cfg.d = Some(source.dim());
            cfg.n = Some(layered.pick(a.n, "n")?.unwrap_or(16));
            cfg.eps = Some(layered.pick(a.eps, "eps")?.unwrap_or(1e-3));
            cfg.form = Some(layered.pick(a.form, "form")?.unwrap_or_default());
            build(&cfg, &source, &sink)
        }
        Command::Sweep(a) => {
            let mut cfg = RunConfig::new("sweep", seed, grid_res, precision);
            let (source, info) = load_source(a.source, &layered)?;
            cfg.source = Some(info);
            cfg.d = Some(source.dim());
            let n_list = layered.pick(a.n_list, "n-list")?.map(|s: String| parse_n_list(&s)).transpose()?;
            cfg.n_list = Some(n_list.unwrap_or_else(|| vec![8, 16, 32, 64, 128, 256]));
            let rule: EpsRule = layered.pick(a.eps_rule, "eps-rule")?.unwrap_or(EpsRule::Power(2.0));
            cfg.eps_rule = Some(rule.to_string());
            run_sweep(&cfg, rule, &source, &sink)
        }
        Command::Qualify(a) => {
            let mut cfg = RunConfig::new("qualify", seed, grid_res, precision);
            let (source, info) = load_source(a.source, &layered)?;
            cfg.source = Some(info);
            cfg.d = Some(source.dim());
            let n_list = layered.pick(a.n_list, "n-list")?.map(|s: String| parse_n_list(&s)).transpose()?;
            cfg.n_list = Some(n_list.unwrap_or_else(|| vec![8, 16, 32, 64, 128]));
            cfg.skip = Some(layered.pick(a.skip, "skip")?.unwrap_or(0));
            run_qualify(&cfg, &source, &sink)
        }
        Command::Verify(a) => {
            let mut cfg = RunConfig::new("verify", seed, grid_res, precision);
            let selected: Option<String> = layered.pick(a.suites, "suites")?;
            let names: Vec<String> = match selected {
                Some(s) => s.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect(),
                None => suites::SUITES.iter().map(|s| s.to_string()).collect(),
            };
            if let Some(bad) = names.iter().find(|n| !suites::SUITES.contains(&n.as_str())) {
                bail!("unknown suite `{bad}` (known: {})", suites::SUITES.join(", "));
            }
            cfg.suites = Some(names);
            verify(&cfg, a.sabotage, &sink)
        }
    }
}

fn grid(cfg: &RunConfig) -> GridSpec {
    GridSpec::new(cfg.grid_res, cfg.grid_random, cfg.seed)
}

#[derive(Serialize)]
struct BuildSummary {
    n: usize,
    eps: f64,
    d: usize,
    nodes: usize,
    parameter_count: usize,
    widths: Vec<usize>,
    max_abs_weight: f64,
    min_precision: Precision,
}

fn build(cfg: &RunConfig, source: &Source, sink: &Sink) -> Result<ExitCode> {
    let (n, eps, d, form) = (cfg.n.unwrap(), cfg.eps.unwrap(), cfg.d.unwrap(), cfg.form.unwrap_or(DnoForm::Rescaled));
    let op = build_dno_with(|x| source.evaluate(x), n, eps, d, form).context("construction failed")?;
    let net = op.flatten()?;
    let summary = BuildSummary {
        n,
        eps,
        d,
        nodes: op.samples().len(),
        parameter_count: net.parameter_count(),
        widths: net.widths(),
        max_abs_weight: net.max_abs_weight(),
        min_precision: net.min_precision(),
    };
    let operator: serde_json::Value = serde_json::from_str(&op.to_json()?)?;
    #[derive(Serialize)]
    struct Body<'a> {
        summary: &'a BuildSummary,
        operator: serde_json::Value,
    }
    sink.write(&envelope_json(cfg, Body { summary: &summary, operator })?)?;
    sink.say(format!("nodes: {}", summary.nodes));
    sink.say(format!("widths: {:?}", summary.widths));
    sink.say(format!("parameters: {}", summary.parameter_count));
    sink.say(format!("max |weight|: {:e}", summary.max_abs_weight));
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(cfg: &RunConfig, rule: EpsRule, source: &Source, sink: &Sink) -> Result<ExitCode> {
    let d = source.dim();
    let mut spec = SweepSpec::new(cfg.n_list.clone().unwrap(), rule, grid(cfg));
    spec.precision = cfg.precision;
    let radial = match source {
        Source::Corpus(f) if f.metadata.is_radial => f.metadata.profile.map(|p| (p, f.metadata.tau + f.metadata.nu, f.metadata.sup_norm)),
        _ => None,
    };
    let profile_fn = radial.map(|(p, _, _)| move |t: f64| p.evaluate(t));
    let bound = match (&profile_fn, radial) {
        (Some(g), Some((_, tau, f_sup))) => Some(BoundInputs { tau, profile: g, f_sup }),
        _ => None,
    };
    let result = sweep(&|x: &[f64]| source.evaluate(x), None, d, &spec, bound)?;
    let fit = rate_fit(&result.n, &result.error, 0).ok();

    if sink.wants_json() {
        #[derive(Serialize)]
        struct Body<'a> {
            result: &'a dno_core::analysis::SweepResult,
            fit: &'a Option<dno_core::analysis::RateReport>,
        }
        sink.write(&envelope_json(cfg, Body { result: &result, fit: &fit })?)?;
    } else {
        let mut text = String::new();
        text.push_str(&format!("# artifact={ARTIFACT}\n# version={VERSION}\n"));
        for line in cfg.header_lines()? {
            text.push_str(&format!("# {line}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "eps", "sup_error", "bound"])?;
        for i in 0..result.n.len() {
            let bound = result.bound[i].map(|b| b.to_string()).unwrap_or_default();
            w.write_record([result.n[i].to_string(), result.eps[i].to_string(), result.error[i].to_string(), bound])?;
        }
        text.push_str(std::str::from_utf8(&w.into_inner()?)?);
        sink.write(&text)?;
    }
    for i in 0..result.n.len() {
        let bound = result.bound[i].map(|b| format!("{b:.4e}")).unwrap_or_else(|| "-".into());
        sink.say(format!("n={:<5} eps={:.3e}  sup_error={:.4e}  bound={bound}", result.n[i], result.eps[i], result.error[i]));
    }
    if let Some(f) = &fit {
        sink.say(format!("alpha_hat={:.4} r2={:.4}", f.alpha_hat, f.r2));
    }
    let violations = result.violations();
    if !violations.is_empty() {
        eprintln!("error: sup error exceeds the bound at n = {violations:?}");
        return Ok(ExitCode::from(EXIT_CHECK_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_qualify(cfg: &RunConfig, source: &Source, sink: &Sink) -> Result<ExitCode> {
    let mut qc = QualifyConfig::new(cfg.seed);
    qc.n_list = cfg.n_list.clone().unwrap();
    qc.skip = cfg.skip.unwrap_or(0);
    qc.grid = grid(cfg);
    qc.precision = cfg.precision;
    let report = qualify(&|x: &[f64]| source.evaluate(x), source.dim(), &qc)?;
    #[derive(Serialize)]
    struct Body<'a> {
        report: &'a dno_core::analysis::QualificationReport,
    }
    sink.write(&envelope_json(cfg, Body { report: &report })?)?;
    sink.say(format!("tau_hat={:.4e}", report.tau_hat));
    match report.alpha_hat {
        Some(a) => sink.say(format!("alpha_hat={a:.4} r2={:.4}", report.r2)),
        None => sink.say("alpha_hat=none (exact slice)"),
    }
    sink.say(format!("smooth: {:?}", report.verdict_smooth));
    sink.say(format!("radial: {:?}", report.verdict_radial));
    Ok(ExitCode::SUCCESS)
}

fn verify(cfg: &RunConfig, sabotage: bool, sink: &Sink) -> Result<ExitCode> {
    let mut outcomes = Vec::new();
    for name in cfg.suites.as_deref().unwrap_or_default() {
        let outcome = suites::run(name, cfg.seed, sabotage)?;
        sink.say(format!("{} {} ({:.1}s)", if outcome.passed() { "PASS" } else { "FAIL" }, outcome.name, outcome.seconds));
        for c in &outcome.checks {
            sink.say(format!("    {:<40} {:>12.6e}  {}  {}", c.label, c.value, c.limit, if c.passed { "ok" } else { "FAILED" }));
        }
        outcomes.push(outcome);
    }
    let all = outcomes.iter().all(|o| o.passed());
    #[derive(Serialize)]
    struct Body<'a> {
        passed: bool,
        suites: &'a [suites::SuiteOutcome],
    }
    if sink.out.is_some() {
        sink.write(&envelope_json(cfg, Body { passed: all, suites: &outcomes })?)?;
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CHECK_FAILED) })
}
