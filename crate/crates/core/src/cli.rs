//! Command-line front end. Exit codes: 0 success, 1 a checked bound or
//! invariant failed, 2 usage, configuration or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::{odd_prime_powers_in, odd_primes_in, prime_power, prime_powers_in, primes_in};
use crate::charsum::{gauss_sum, irregularity, squares_bound_report};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{count_irreducible, Poly};
use crate::report::{
    decimal17, dichotomy_csv, fit_csv, irreg_csv, result_document, scaling_csv, stats_csv, to_json, write_file,
    FieldConfig, OutputConfig, ResultDocument, RunConfig,
};
use crate::sets::{dichotomy_scan, SetRecipe, Thresholds};
use crate::stats::{enumerate_splitting_types, fit_points, run, ExperimentResult, Mode, DEFAULT_BUDGET, DEFAULT_SAMPLES};
use crate::verify;

pub const THREADS_ENV: &str = "FQLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fqlab", version, about = "Splitting statistics of polynomials over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Splitting type and discriminant of one monic polynomial.
    Factor(FactorArgs),
    /// Run a splitting-type experiment and emit a result document.
    Stats(StatsArgs),
    /// Irregularity and Gauss-sum reports.
    #[command(subcommand)]
    Irreg(IrregCommand),
    /// Sweeps over a grid of field orders.
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Run the invariant suites.
    Verify(VerifyArgs),
    /// Number of monic irreducible polynomials of degree n.
    Count(CountArgs),
}

#[derive(Debug, Args, Clone, Copy)]
struct FieldArgs {
    /// Field order (a prime power).
    #[arg(long, conflicts_with_all = ["p", "k"])]
    q: Option<u64>,
    /// Characteristic.
    #[arg(long, requires = "p")]
    k: Option<u64>,
    /// Characteristic (with --k for extension fields).
    #[arg(long)]
    p: Option<u64>,
}

impl FieldArgs {
    fn config(&self) -> anyhow::Result<Option<FieldConfig>> {
        match (self.q, self.p) {
            (Some(q), _) => {
                let (p, k) = prime_power(q).ok_or_else(|| anyhow!("{q} is not a prime power"))?;
                Ok(Some(FieldConfig { p, k: k as u64 }))
            }
            (None, Some(p)) => Ok(Some(FieldConfig { p, k: self.k.unwrap_or(1) })),
            (None, None) => Ok(None),
        }
    }

    fn spec(&self) -> anyhow::Result<FieldSpec> {
        let cfg = self.config()?.ok_or_else(|| anyhow!("a field is required: --q or --p [--k]"))?;
        Ok(FieldSpec::new(cfg.p, cfg.k)?)
    }
}

#[derive(Debug, Args)]
struct FactorArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Coefficients low to high, comma separated; canonical indices (negative values allowed in prime fields).
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    n: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Montecarlo,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Config document, or a previous result document to re-run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    n: Option<usize>,
    /// Set recipe: `uniform`, `squares`, or JSON parts; repeat once per coefficient or give one for all.
    #[arg(long = "set")]
    sets: Vec<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of tuples in exhaustive mode.
    #[arg(long)]
    budget: Option<u64>,
    /// Classify quadratics by factoring instead of by the discriminant character.
    #[arg(long)]
    general_path: bool,
    /// Result document path (JSON); printed to stdout when no path is configured.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-type table (CSV).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GridKind {
    Primes,
    OddPrimes,
    PrimePowers,
    OddPrimePowers,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Explicit comma-separated field orders; overrides the range options.
    #[arg(long, value_delimiter = ',')]
    qs: Vec<u64>,
    #[arg(long, default_value_t = 3)]
    qmin: u64,
    #[arg(long, default_value_t = 101)]
    qmax: u64,
    #[arg(long, value_enum, default_value_t = GridKind::OddPrimes)]
    grid: GridKind,
    /// Keep only q = a mod m, written `a:m`.
    #[arg(long)]
    residue: Option<String>,
    /// Keep this many orders, evenly spaced by position.
    #[arg(long)]
    count: Option<usize>,
}

impl GridArgs {
    fn orders(&self) -> anyhow::Result<Vec<u64>> {
        if !self.qs.is_empty() {
            return Ok(self.qs.clone());
        }
        let mut g = match self.grid {
            GridKind::Primes => primes_in(self.qmin, self.qmax),
            GridKind::OddPrimes => odd_primes_in(self.qmin, self.qmax),
            GridKind::PrimePowers => prime_powers_in(self.qmin, self.qmax),
            GridKind::OddPrimePowers => odd_prime_powers_in(self.qmin, self.qmax),
        };
        if let Some(r) = &self.residue {
            let (a, m) = r.split_once(':').ok_or_else(|| anyhow!("--residue expects a:m"))?;
            let (a, m): (u64, u64) = (a.trim().parse()?, m.trim().parse()?);
            if m == 0 {
                bail!("--residue modulus must be positive");
            }
            g.retain(|q| q % m == a % m);
        }
        if let Some(c) = self.count {
            g = evenly_spaced(&g, c);
        }
        if g.is_empty() {
            bail!("the q-grid is empty");
        }
        Ok(g)
    }
}

/// `count` entries of `xs` at evenly spaced positions, endpoints included.
pub fn evenly_spaced(xs: &[u64], count: usize) -> Vec<u64> {
    if count >= xs.len() || count == 0 {
        return xs.to_vec();
    }
    if count == 1 {
        return vec![xs[0]];
    }
    (0..count).map(|i| xs[i * (xs.len() - 1) / (count - 1)]).collect()
}

#[derive(Debug, Subcommand)]
enum IrregCommand {
    /// Irregularity of the squares against sqrt(q) - 1 over a grid (CSV).
    Squares {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Irregularity of one set, and of its n-fold product.
    Set {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long = "set")]
        set: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// Gauss sums for every beta (CSV); fails unless |g(beta)| = sqrt(q) for beta != 0.
    Gauss {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ScanCommand {
    /// Exact set sizes and small/linear classification per q (CSV).
    Dichotomy {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "set")]
        set: String,
        #[arg(long)]
        small: Option<u64>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-q deviation from the Cauchy densities plus a log-log fit (CSV).
    Scaling {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        n: usize,
        #[arg(long = "set")]
        sets: Vec<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Per-point table; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fit table; a summary goes to stderr when absent.
        #[arg(long)]
        fit_out: Option<PathBuf>,
        /// Fail if any sqrt(q) * delta exceeds this.
        #[arg(long)]
        max_sqrtq_delta: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    ClassEquation,
    PrimePolynomialTheorem,
    GaussSums,
    SquaresIrregularity,
    ProductIrregularity,
    Stickelberger,
    SetMachinery,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suites to run; all when absent.
    #[arg(long = "suite", value_enum)]
    suites: Vec<Suite>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random polynomials for the Stickelberger suite.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

enum Failure {
    Usage(anyhow::Error),
    Assertion(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

type CliResult = Result<(), Failure>;

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
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
    let outcome = workers().map_err(Failure::Usage).and_then(|w| dispatch(cli.command, w));
    match outcome {
        Ok(()) => 0,
        Err(Failure::Assertion(msg)) => {
            eprintln!("fqlab: check failed: {msg}");
            1
        }
        Err(Failure::Usage(e)) => {
            eprintln!("fqlab: error: {e:#}");
            2
        }
    }
}

fn workers() -> anyhow::Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse().with_context(|| format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))
        }
        _ => Ok(0),
    }
}

fn dispatch(cmd: Command, workers: usize) -> CliResult {
    match cmd {
        Command::Factor(a) => factor(a),
        Command::Count(a) => {
            let f = a.field.spec()?;
            println!("{}", count_irreducible(a.n, &f)?);
            Ok(())
        }
        Command::Stats(a) => stats(a, workers),
        Command::Irreg(c) => irreg(c, workers),
        Command::Scan(c) => scan(c, workers),
        Command::Verify(a) => verify_suites(a, workers),
    }
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    Ok(pool.install(job))
}

fn emit(path: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_file(p, contents).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn parse_element(f: &FieldSpec, text: &str) -> anyhow::Result<FieldElement> {
    let v: i64 = text.trim().parse().with_context(|| format!("bad coefficient {text:?}"))?;
    if f.k() == 1 {
        Ok(f.from_int(v))
    } else if v < 0 {
        bail!("coefficient {v}: use canonical indices 0..{} in extension fields", f.q())
    } else {
        Ok(f.element(v as u64)?)
    }
}

fn format_poly(p: &Poly) -> String {
    let mut terms = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coeff = if *c == FieldElement::ONE && i > 0 { String::new() } else { c.index().to_string() };
        terms.push(match i {
            0 => coeff,
            1 => format!("{coeff}x"),
            _ => format!("{coeff}x^{i}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn factor(a: FactorArgs) -> CliResult {
    let f = a.field.spec()?;
    let coeffs = a.poly.split(',').map(|t| parse_element(&f, t)).collect::<anyhow::Result<Vec<_>>>()?;
    let p = Poly::new(&f, coeffs);
    let n = p.degree().unwrap_or(0);
    let s = p.splitting_type()?;
    let disc = p.discriminant()?;
    let squarefree = !disc.is_zero();
    println!("field: F_{} (p = {}, k = {})", f.q(), f.p(), f.k());
    println!("polynomial: {}", format_poly(&p));
    println!("splitting_type: {s}");
    println!("factors: {}", s.parts());
    println!("irreducible: {}", squarefree && s.is_irreducible());
    println!("squarefree: {squarefree}");
    println!("discriminant: {}", disc.index());
    if f.is_odd() {
        let chi = f.qchar(disc)?;
        println!("discriminant_qchar: {chi}");
        if squarefree {
            let want = if (n - s.parts() as usize).is_multiple_of(2) { 1 } else { -1 };
            if chi != want {
                return Err(Failure::Assertion(format!("Stickelberger parity: qchar {chi}, expected {want}")));
            }
        }
    }
    if p.discriminant_sylvester()? != disc {
        return Err(Failure::Assertion("discriminant routes disagree".into()));
    }
    Ok(())
}

fn stats_config(a: &StatsArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => {
            let field = a.field.config()?.ok_or_else(|| anyhow!("stats needs --config or a field (--q / --p)"))?;
            let n = a.n.ok_or_else(|| anyhow!("stats needs --config or --n"))?;
            RunConfig {
                field,
                n,
                sets: vec![SetRecipe::uniform()],
                mode: Mode::MonteCarlo { samples: DEFAULT_SAMPLES, seed: 0 },
                budget: DEFAULT_BUDGET,
                thresholds: Thresholds::default(),
                force_general_path: false,
                output: OutputConfig::default(),
            }
        }
    };
    if let Some(field) = a.field.config()? {
        cfg.field = field;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if !a.sets.is_empty() {
        cfg.sets = a.sets.iter().map(|s| s.parse()).collect::<crate::Result<_>>()?;
    }
    cfg.mode = match (a.mode, cfg.mode) {
        (Some(ModeArg::Exhaustive), _) | (None, Mode::Exhaustive) => Mode::Exhaustive,
        (Some(ModeArg::Montecarlo), Mode::Exhaustive) => Mode::MonteCarlo { samples: DEFAULT_SAMPLES, seed: 0 },
        (_, m @ Mode::MonteCarlo { .. }) => m,
    };
    if let Mode::MonteCarlo { samples, seed } = &mut cfg.mode {
        *samples = a.samples.unwrap_or(*samples);
        *seed = a.seed.unwrap_or(*seed);
    } else if a.samples.is_some() || a.seed.is_some() {
        bail!("--samples and --seed apply to Monte Carlo mode only");
    }
    if let Some(b) = a.budget {
        cfg.budget = b;
    }
    cfg.force_general_path |= a.general_path;
    if let Some(p) = &a.out {
        cfg.output.json = Some(p.clone());
    }
    if let Some(p) = &a.csv {
        cfg.output.csv = Some(p.clone());
    }
    Ok(cfg)
}

fn stats(a: StatsArgs, workers: usize) -> CliResult {
    let cfg = stats_config(&a)?;
    let result = run(&cfg.experiment(workers)?)?;
    let doc = result_document(&cfg, &result);
    eprintln!(
        "fqlab: {} tuples, {} logical shards, {} workers, {:.3} s",
        result.total, result.logical_shards, result.run.workers, result.run.wall_time_s
    );
    emit(cfg.output.json.as_deref(), &to_json(&doc))?;
    if let Some(p) = &cfg.output.csv {
        emit(Some(p), &stats_csv(&doc))?;
    }
    Ok(())
}

fn irreg(c: IrregCommand, workers: usize) -> CliResult {
    match c {
        IrregCommand::Squares { grid, out } => {
            let orders = grid.orders()?;
            let rows = in_pool(workers, || squares_bound_report(&orders))??;
            emit(out.as_deref(), &irreg_csv(&rows))?;
            let failing: Vec<u64> = rows.iter().filter(|r| !r.holds).map(|r| r.q).collect();
            if !failing.is_empty() {
                return Err(Failure::Assertion(format!("irregularity bound violated for q in {failing:?}")));
            }
            Ok(())
        }
        IrregCommand::Set { field, set, power } => {
            let f = field.spec()?;
            let recipe: SetRecipe = set.parse()?;
            let s = recipe.build(&f)?;
            let r = in_pool(workers, || irregularity(&f, s.elements()))??;
            println!("q: {}", f.q());
            println!("size: {}", s.len());
            println!("irregularity: {}", decimal17(r));
            if power > 1 {
                println!("product_irregularity: {}", decimal17(r.powi(power as i32)));
            }
            Ok(())
        }
        IrregCommand::Gauss { field, out } => {
            let f = field.spec()?;
            let sums = f.elements().map(|b| gauss_sum(&f, b)).collect::<crate::Result<Vec<_>>>()?;
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(["beta", "re", "im", "abs"])?;
            let mut worst = 0.0f64;
            for (b, g) in sums.iter().enumerate() {
                let want = if b == 0 { 0.0 } else { (f.q() as f64).sqrt() };
                worst = worst.max((g.norm() - want).abs());
                w.write_record([b.to_string(), decimal17(g.re), decimal17(g.im), decimal17(g.norm())])?;
            }
            emit(out.as_deref(), &String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)?;
            if worst > verify::GAUSS_TOLERANCE {
                return Err(Failure::Assertion(format!("Gauss sum magnitude off by {worst:.3e}")));
            }
            Ok(())
        }
    }
}

fn scan(c: ScanCommand, workers: usize) -> CliResult {
    match c {
        ScanCommand::Dichotomy { grid, set, small, ratio, out } => {
            let recipe: SetRecipe = set.parse()?;
            let mut t = Thresholds::default();
            t.small = small.unwrap_or(t.small);
            t.ratio = ratio.unwrap_or(t.ratio);
            let orders = grid.orders()?;
            let rows = dichotomy_scan(&recipe, &orders, t)?;
            emit(out.as_deref(), &dichotomy_csv(&rows))?;
            Ok(())
        }
        ScanCommand::Scaling { grid, n, sets, mode, samples, seed, budget, out, fit_out, max_sqrtq_delta } => {
            let orders = grid.orders()?;
            let recipes: Vec<SetRecipe> = if sets.is_empty() {
                vec![SetRecipe::uniform()]
            } else {
                sets.iter().map(|s| s.parse()).collect::<crate::Result<_>>()?
            };
            let mode = match mode {
                ModeArg::Exhaustive => Mode::Exhaustive,
                ModeArg::Montecarlo => Mode::MonteCarlo { samples, seed },
            };
            let mut docs: Vec<ResultDocument> = Vec::new();
            let mut results: Vec<ExperimentResult> = Vec::new();
            for &q in &orders {
                let (p, k) = prime_power(q).ok_or_else(|| anyhow!("{q} is not a prime power"))?;
                let cfg = RunConfig {
                    field: FieldConfig { p, k: k as u64 },
                    n,
                    sets: recipes.clone(),
                    mode,
                    budget,
                    thresholds: Thresholds::default(),
                    force_general_path: false,
                    output: OutputConfig::default(),
                };
                let r = run(&cfg.experiment(workers)?)?;
                docs.push(result_document(&cfg, &r));
                results.push(r);
            }
            emit(out.as_deref(), &scaling_csv(&docs))?;
            let mut fits = Vec::new();
            for (i, s) in enumerate_splitting_types(n)?.iter().enumerate() {
                let points: Vec<(u64, f64)> = results
                    .iter()
                    .map(|r| (r.q as u64, crate::stats::compare_to_prediction(r)[i].delta))
                    .collect();
                if points.len() >= crate::stats::MIN_FIT_POINTS {
                    fits.push((s.to_string(), fit_points(&points)?));
                }
            }
            match &fit_out {
                Some(p) => emit(Some(p), &fit_csv(&fits))?,
                None => {
                    for (s, f) in &fits {
                        let slope = f.slope.map_or_else(|| "exact".into(), |v| format!("{v:.4}"));
                        eprintln!(
                            "fqlab: {s}: max sqrt(q)*delta {:.6}, median {:.6}, slope {slope}",
                            f.max_sqrt_q_delta, f.median_sqrt_q_delta
                        );
                    }
                }
            }
            if let Some(k) = max_sqrtq_delta {
                let sqrt_q = |r: &ExperimentResult| (r.q as f64).sqrt();
                let worst = results
                    .iter()
                    .flat_map(|r| crate::stats::compare_to_prediction(r).into_iter().map(move |row| (r.q, row.delta * sqrt_q(r))))
                    .fold((0, 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
                if worst.1 > k {
                    return Err(Failure::Assertion(format!("sqrt(q)*delta = {} > {k} at q = {}", worst.1, worst.0)));
                }
            }
            Ok(())
        }
    }
}

fn verify_suites(a: VerifyArgs, workers: usize) -> CliResult {
    let suites = if a.suites.is_empty() {
        vec![
            Suite::ClassEquation,
            Suite::PrimePolynomialTheorem,
            Suite::GaussSums,
            Suite::SquaresIrregularity,
            Suite::ProductIrregularity,
            Suite::Stickelberger,
            Suite::SetMachinery,
        ]
    } else {
        a.suites.clone()
    };
    let mut failed = Vec::new();
    for suite in suites {
        let check = in_pool(workers, || match suite {
            Suite::ClassEquation => verify::class_equation(7),
            Suite::PrimePolynomialTheorem => verify::prime_polynomial_theorem(&[2, 3, 4, 5, 7, 8, 9], 4),
            Suite::GaussSums => verify::gauss_sums(343),
            Suite::SquaresIrregularity => verify::squares_irregularity(361),
            Suite::ProductIrregularity => verify::product_irregularity_check(&[9, 25, 49]),
            Suite::Stickelberger => verify::stickelberger(a.samples, a.seed, 81, 2..=8),
            Suite::SetMachinery => verify::set_machinery(1009, 200, a.seed),
        })??;
        println!("{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
        if !check.passed {
            failed.push(check.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(format!("failed suites: {}", failed.join(", "))))
    }
}
