//! The `econvex` command line.
//!
//! Exit codes: 0 on success, 1 when a verification fails (the report is still
//! written), 2 on usage or input errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::errorfn::ErrorFunction;
use crate::funcmodel::{Function, Grid, SampledFunction};
use crate::io;
use crate::report::{ViolationReport, INEQUALITY_TOL};
use crate::subdiff::{e2_subdiff_interval, e_subdiff_interval, check_e_monotone};
use crate::transform::{biconjugate_of, default_dual_grid, e_conjugate, inf_convolution, Algorithm};
use crate::verify::{
    certify_global_min, certify_local_min, check_char_slopes, check_conjugate_stability, check_e_convex_def,
    check_sum_conjugate_infconv, run_suite, SuiteConfig, TMode,
};

#[derive(Parser, Debug)]
#[command(name = "econvex", version, about = "Discrete e-convex analysis on 1-D grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Worst violation of the e-convexity inequality (and the slope characterizations).
    CheckEconvex(CheckArgs),
    /// (e,y)-conjugate table.
    Conjugate(ConjugateArgs),
    /// (e,y)-biconjugate on an output grid.
    Biconjugate(BiconjugateArgs),
    /// e-subdifferential interval at a node, or an e-monotonicity check of an operator sample.
    Subdiff(SubdiffArgs),
    /// Optimality certificate at a node.
    Certify(CertifyArgs),
    /// Infimal convolution, or the sum-conjugate inequality when kernels are given.
    Infconv(InfconvArgs),
    /// Conjugate stability under a change of anchor.
    Stability(StabilityArgs),
    /// The randomized property suite.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct Input {
    /// Function spec (JSON).
    #[arg(long)]
    pub f: PathBuf,
    /// Error-function spec (JSON).
    #[arg(long)]
    pub e: PathBuf,
    /// Primal grid `a,b,n`; defaults to the grid of a sampled `f`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension, else csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertKind {
    Global,
    Local,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: Input,
    /// Comma-separated t values; all node triples when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConjugateArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    /// Dual grid `a,b,n`; chosen from the slopes of f + e(·, y) when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub dual: Option<String>,
    #[arg(long, default_value = "fast")]
    pub algo: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct BiconjugateArgs {
    #[command(flatten)]
    pub conj: ConjugateArgs,
    /// Output grid `a,b,n`; the primal grid when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub out_grid: Option<String>,
}

#[derive(Args, Debug)]
pub struct SubdiffArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "operator")]
    pub at: Option<f64>,
    /// Use the doubled kernel.
    #[arg(long)]
    pub double: bool,
    /// Operator sample CSV (`x,xstar`) to check for e-monotonicity.
    #[arg(long)]
    pub operator: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, allow_negative_numbers = true)]
    pub at: f64,
    #[arg(long, value_enum, default_value = "global")]
    pub kind: CertKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InfconvArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Output grid `a,b,n` for f □ g.
    #[arg(long, allow_hyphen_values = true)]
    pub out_grid: Option<String>,
    /// Kernel of f; with `--e2`, `--y`, `--at` and `--dual` switches to the
    /// sum-conjugate inequality check.
    #[arg(long, requires_all = ["e2", "y", "at"])]
    pub e: Option<PathBuf>,
    #[arg(long)]
    pub e2: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// The slope x*.
    #[arg(long, allow_negative_numbers = true)]
    pub at: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dual: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub dual: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub instances: usize,
    #[arg(long, default_value_t = 41)]
    pub nodes: usize,
    /// Print the JSON records instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON records here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match run(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("econvex: {e}");
            2
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("ECONVEX_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs one command; `Ok(false)` means a verification failed.
pub fn run(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::CheckEconvex(a) => check_econvex(a),
        Command::Conjugate(a) => conjugate(a),
        Command::Biconjugate(a) => biconjugate(a),
        Command::Subdiff(a) => subdiff(a),
        Command::Certify(a) => certify(a),
        Command::Infconv(a) => infconv(a),
        Command::Stability(a) => stability(a),
        Command::Suite(a) => suite(a),
    }
}

fn load_function(path: &Path, grid: Option<&Grid>) -> Result<SampledFunction> {
    let f = io::read_function_spec(path)?.to_function()?;
    match (grid, &f) {
        (Some(g), _) => f.sample_on(g),
        (None, Function::Sampled(s)) => Ok(s.clone()),
        (None, Function::ClosedForm(_)) => Err(Error::InvalidGrid(format!(
            "{}: closed-form function needs --grid",
            path.display()
        ))),
    }
}

fn load(input: &Input) -> Result<(SampledFunction, ErrorFunction)> {
    let grid = input.grid.as_deref().map(Grid::parse_descriptor).transpose()?;
    let f = load_function(&input.f, grid.as_ref())?;
    let e = io::read_error_spec(&input.e)?.to_error(Some(f.grid()))?;
    Ok((f, e))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn format_of(o: &Output) -> Format {
    o.format.unwrap_or_else(|| match o.out.as_deref().and_then(Path::extension) {
        Some(ext) if ext == "json" => Format::Json,
        _ => Format::Csv,
    })
}

fn emit_function(o: &Output, f: &SampledFunction) -> Result<()> {
    let text = match format_of(o) {
        Format::Csv => io::function_csv(f),
        Format::Json => io::function_json(f),
    };
    emit(o.out.as_deref(), &text)
}

#[derive(Serialize)]
struct EconvexReport {
    definition: ViolationReport,
    char_slopes: Option<ViolationReport>,
    tolerance: f64,
    passed: bool,
}

fn check_econvex(a: &CheckArgs) -> Result<bool> {
    let (f, e) = load(&a.input)?;
    let mode = match &a.t {
        None => TMode::AllNodeTriples,
        Some(list) => TMode::TSet(
            list.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("--t: bad value `{t}`"))))
                .collect::<Result<_>>()?,
        ),
    };
    let definition = check_e_convex_def(&f, &e, &mode)?;
    let char_slopes = f.grid().is_uniform().then(|| check_char_slopes(&f, &e)).transpose()?;
    let passed = definition.passes(INEQUALITY_TOL) && char_slopes.as_ref().is_none_or(|r| r.passes(INEQUALITY_TOL));
    emit_json(a.out.as_deref(), &EconvexReport { definition, char_slopes, tolerance: INEQUALITY_TOL, passed })?;
    Ok(passed)
}

fn conjugate_table(a: &ConjugateArgs) -> Result<(SampledFunction, crate::transform::ConjugateTable)> {
    let (f, e) = load(&a.input)?;
    let algo: Algorithm = a.algo.parse()?;
    let dual = match &a.dual {
        Some(d) => Grid::parse_descriptor(d)?,
        None => default_dual_grid(&f, &e, a.y)?,
    };
    let t = e_conjugate(&f, &e, a.y, &dual, algo)?;
    Ok((f, t))
}

fn conjugate(a: &ConjugateArgs) -> Result<bool> {
    let (_, t) = conjugate_table(a)?;
    let text = match format_of(&a.output) {
        Format::Csv => io::table_csv(&t),
        Format::Json => io::table_json(&t),
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

fn biconjugate(a: &BiconjugateArgs) -> Result<bool> {
    let (f, t) = conjugate_table(&a.conj)?;
    let out_grid = match &a.out_grid {
        Some(g) => Grid::parse_descriptor(g)?,
        None => f.grid().clone(),
    };
    let b = biconjugate_of(&t, &out_grid, t.algorithm)?;
    emit_function(&a.conj.output, &b)?;
    Ok(true)
}

fn subdiff(a: &SubdiffArgs) -> Result<bool> {
    let (f, e) = load(&a.input)?;
    if let Some(path) = &a.operator {
        let sample = io::read_operator_csv(path)?;
        let r = check_e_monotone(&sample, &e, if a.double { 2.0 } else { 1.0 })?;
        let passed = r.passes(INEQUALITY_TOL);
        emit_json(a.out.as_deref(), &r)?;
        return Ok(passed);
    }
    let x = a.at.expect("clap enforces --at");
    let interval = if a.double { e2_subdiff_interval(&f, &e, x)? } else { e_subdiff_interval(&f, &e, x)? };
    emit_json(a.out.as_deref(), &interval)?;
    Ok(true)
}

fn certify(a: &CertifyArgs) -> Result<bool> {
    let (f, e) = load(&a.input)?;
    match a.kind {
        CertKind::Global => {
            let c = certify_global_min(&f, &e, a.at)?;
            emit_json(a.out.as_deref(), &c)?;
            Ok(c.certified)
        }
        CertKind::Local => {
            let c = certify_local_min(&f, &e, a.at)?;
            emit_json(a.out.as_deref(), &c)?;
            Ok(c.certified)
        }
    }
}

fn infconv(a: &InfconvArgs) -> Result<bool> {
    let grid = a.grid.as_deref().map(Grid::parse_descriptor).transpose()?;
    let f = load_function(&a.f, grid.as_ref())?;
    let g = load_function(&a.g, grid.as_ref())?;
    if let Some(e_path) = &a.e {
        let e = io::read_error_spec(e_path)?.to_error(Some(f.grid()))?;
        let e2 = io::read_error_spec(a.e2.as_deref().expect("clap enforces --e2"))?.to_error(Some(g.grid()))?;
        let (y, xstar) = (a.y.expect("clap enforces --y"), a.at.expect("clap enforces --at"));
        let dual = match &a.dual {
            Some(d) => Grid::parse_descriptor(d)?,
            None => default_dual_grid(&f, &e, y)?,
        };
        let r = check_sum_conjugate_infconv(&f, &g, &e, &e2, y, xstar, &dual)?;
        let passed = r.lhs <= r.rhs + INEQUALITY_TOL;
        emit_json(a.output.out.as_deref(), &r)?;
        return Ok(passed);
    }
    let out_grid = match &a.out_grid {
        Some(d) => Grid::parse_descriptor(d)?,
        None => Grid::uniform(
            f.grid().first() + g.grid().first(),
            f.grid().last() + g.grid().last(),
            f.len() + g.len() - 1,
        )?,
    };
    emit_function(&a.output, &inf_convolution(&f, &g, &out_grid)?)?;
    Ok(true)
}

fn stability(a: &StabilityArgs) -> Result<bool> {
    let (f, e) = load(&a.input)?;
    let dual = match &a.dual {
        Some(d) => Grid::parse_descriptor(d)?,
        None => default_dual_grid(&f, &e, a.y)?,
    };
    let r = check_conjugate_stability(&f, &e, a.y, a.y2, &dual)?;
    let passed = [&r.triangle, &r.bounded].into_iter().flatten().all(|v| v.passes(INEQUALITY_TOL));
    emit_json(a.out.as_deref(), &r)?;
    Ok(passed)
}

fn suite(a: &SuiteArgs) -> Result<bool> {
    let report = run_suite(&SuiteConfig { seed: a.seed, instances: a.instances, nodes: a.nodes });
    let json = io::suite_json(&report);
    if let Some(p) = &a.out {
        emit(Some(p), &json)?;
    }
    if a.json {
        println!("{json}");
    } else {
        print!("{}", report.table());
        println!("seed {} instances {}", report.seed, report.instances);
    }
    Ok(report.all_passed())
}
