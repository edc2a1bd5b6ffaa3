//! detmethod: auxiliary polynomials for integral points of bounded height.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use detmethod::detbound::{self, DetBoundInput};
use detmethod::engine::{self, DeltaSpec, PipelineConfig, PipelineReport};
use detmethod::ideal::{IdealFile, IdealMode};
use detmethod::points::{self, HeightBox, DEFAULT_BUDGET};
use detmethod::{Chart, Error, GradedOrdering, GroebnerBasis, Strategy, VerifyOutcome};

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "detmethod",
    version,
    about = "Auxiliary polynomials vanishing at integral points of bounded height",
    after_help = "EXIT CODES:\n  0 ok\n  1 verification failure\n  2 input error\n  3 budget exceeded\n\n\
                  EXAMPLES:\n  detmethod hilbert --ideal conic.txt --mode projective --max-degree 6\
                  \n  detmethod points --ideal parabola.txt --height 100\
                  \n  detmethod construct --ideal parabola.txt --height 10000 --epsilon 0.25 --out report.json\
                  \n  detmethod verify --report report.json --ideal parabola.txt\
                  \n  detmethod sweep --ideal parabola.txt --heights 100,1000,10000 --epsilon 0.25\
                  \n  detmethod bound --mu 3 --m 1 --norms 1,1,2 --r 0.1"
)]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Affine,
    Projective,
}

impl From<Mode> for IdealMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Affine => IdealMode::Affine,
            Mode::Projective => IdealMode::Projective,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Adaptive,
    Theoretical,
}

#[derive(Args)]
struct IdealArgs {
    /// Ideal file: a `vars: N` header, then one generator per line
    #[arg(long)]
    ideal: PathBuf,
    #[arg(long, value_enum, default_value = "affine")]
    mode: Mode,
    /// Monomial ordering
    #[arg(long, default_value = "grlex-left")]
    ordering: GradedOrdering,
}

#[derive(Args)]
struct HeightArgs {
    /// Height bound B (affine), or a uniform bound (projective)
    #[arg(long, conflicts_with = "heights")]
    height: Option<f64>,
    /// Coordinate bounds B0,...,Bn (projective)
    #[arg(long, value_delimiter = ',')]
    heights: Option<Vec<f64>>,
    /// Maximum number of box cells to scan
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

impl HeightArgs {
    fn values(&self) -> Result<Vec<f64>, Failure> {
        match (&self.height, &self.heights) {
            (Some(b), None) => Ok(vec![*b]),
            (None, Some(v)) if !v.is_empty() => Ok(v.clone()),
            _ => Err(Failure::input("give --height B or --heights B0,...,Bn")),
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Staircase degree
    #[arg(long, conflicts_with = "epsilon")]
    delta: Option<u32>,
    /// Exponent slack; picks the smallest admissible degree
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value = "adaptive")]
    strategy: StrategyArg,
    /// Chart file for the theoretical strategy
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Uniform bound on the chart norms, replacing the computed ones
    #[arg(long)]
    norm_bound: Option<f64>,
    #[arg(long, default_value_t = engine::DEFAULT_DELTA_MAX)]
    delta_max: u32,
    /// Degree at which a_i are measured (default: --delta-max)
    #[arg(long)]
    probe: Option<u32>,
    /// Include wall-clock timings in the report
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert function, σ_i and a_i over a range of degrees
    Hilbert {
        #[command(flatten)]
        ideal: IdealArgs,
        #[arg(long, default_value_t = 0)]
        min_degree: u32,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
    },
    /// List the points of bounded height
    Points {
        #[command(flatten)]
        ideal: IdealArgs,
        #[command(flatten)]
        heights: HeightArgs,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
    },
    /// Build and verify auxiliary forms covering every point
    Construct {
        #[command(flatten)]
        ideal: IdealArgs,
        #[command(flatten)]
        heights: HeightArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, value_enum, default_value = "json")]
        output: Output,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a stored report against its ideal file
    Verify {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Construct for several heights and tabulate the counts
    Sweep {
        #[command(flatten)]
        ideal: IdealArgs,
        /// Height bounds to run, e.g. 100,1000,10000
        #[arg(long, value_delimiter = ',', required = true)]
        heights: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, value_enum, default_value = "csv")]
        output: Output,
    },
    /// Evaluate the determinant estimate
    Bound {
        /// Matrix size
        #[arg(long)]
        mu: u64,
        /// Parameter dimension
        #[arg(long)]
        m: u32,
        /// Norms of the μ functions (one value is repeated)
        #[arg(long, value_delimiter = ',', required = true)]
        norms: Vec<f64>,
        /// Diameter of the point set
        #[arg(long)]
        r: f64,
        /// Random Vandermonde instances to test against the bound (m = 1)
        #[arg(long, default_value_t = 0)]
        samples: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } => 3,
            Error::Falsified(_) | Error::Uncoverable(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_ideal(args: &IdealArgs) -> Result<IdealFile, Failure> {
    let text = read(&args.ideal)?;
    IdealFile::parse(&text, args.mode.into()).map_err(|e| Failure::input(format!("{}: {e}", args.ideal.display())))
}

fn config(p: &PipelineArgs, ordering: GradedOrdering, budget: u128, vars: usize) -> Result<PipelineConfig, Failure> {
    let delta = match (p.delta, p.epsilon) {
        (Some(d), None) => DeltaSpec::Fixed(d),
        (None, Some(e)) => DeltaSpec::Epsilon(e),
        _ => return Err(Failure::input("give exactly one of --delta and --epsilon")),
    };
    let strategy = match p.strategy {
        StrategyArg::Adaptive => {
            if p.chart.is_some() || p.norm_bound.is_some() {
                return Err(Failure::input("--chart and --norm-bound need --strategy theoretical"));
            }
            Strategy::Adaptive
        }
        StrategyArg::Theoretical => {
            let charts = match &p.chart {
                Some(path) => Chart::parse_file(&read(path)?, vars)?,
                None => Vec::new(),
            };
            if let Some(r) = p.norm_bound {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Failure::input("--norm-bound must be positive"));
                }
            }
            Strategy::Theoretical { charts, norm_bound: p.norm_bound }
        }
    };
    let mut cfg = PipelineConfig::new(delta);
    cfg.ordering = ordering;
    cfg.strategy = strategy;
    cfg.budget = budget;
    cfg.delta_max = p.delta_max;
    cfg.probe = p.probe;
    cfg.timings = p.timings;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn cmd_hilbert(ideal: &IdealArgs, lo: u32, hi: u32, output: Output) -> Result<(), Failure> {
    if lo > hi {
        return Err(Failure::input("--min-degree exceeds --max-degree"));
    }
    let file = load_ideal(ideal)?;
    let ring = match file.mode {
        IdealMode::Affine => file.ideal.homogenization()?,
        IdealMode::Projective => file.ideal.clone(),
    };
    let window = detmethod::ideal::default_window_end(ring.num_vars());
    let gb = GroebnerBasis::compute(&ring, ideal.ordering, Some(hi.max(window)))?;
    let hp = gb.hilbert_polynomial(0..=window).ok();
    let mut rows = Vec::new();
    for s in lo..=hi {
        let st = gb.staircase(s)?;
        let a: Vec<String> = if s == 0 || st.is_empty() {
            vec![String::new(); ring.num_vars()]
        } else {
            gb.a_estimates(s)?.iter().map(fmt_rational).collect()
        };
        rows.push((s, st.len(), st.sigmas(), a));
    }
    match output {
        Output::Json => {
            let json = serde_json::json!({
                "ordering": ideal.ordering,
                "rows": rows.iter().map(|(s, hf, sig, a)| serde_json::json!({"s": s, "hf": hf, "sigma": sig, "a": a})).collect::<Vec<_>>(),
                "hilbert_polynomial": hp.as_ref().map(|h| h.coefficients.iter().map(fmt_rational).collect::<Vec<_>>()),
                "dimension": hp.as_ref().and_then(|h| h.dimension),
                "degree": hp.as_ref().map(|h| fmt_rational(&h.degree)),
            });
            out!("{}", serde_json::to_string_pretty(&json).expect("json"));
        }
        Output::Csv | Output::Text => {
            let sep = if output == Output::Csv { "," } else { "\t" };
            let n = ring.num_vars();
            let mut header = vec!["s".to_string(), "HF".to_string()];
            header.extend((0..n).map(|i| format!("sigma{i}")));
            header.extend((0..n).map(|i| format!("a{i}")));
            out!("{}", header.join(sep));
            for (s, hf, sig, a) in &rows {
                let mut cols = vec![s.to_string(), hf.to_string()];
                cols.extend(sig.iter().map(|x| x.to_string()));
                cols.extend(a.iter().cloned());
                out!("{}", cols.join(sep));
            }
            if output == Output::Text {
                match &hp {
                    Some(h) => out!(
                        "# dimension {:?}, degree {}, P(s) coefficients (constant first) {:?}",
                        h.dimension,
                        fmt_rational(&h.degree),
                        h.coefficients.iter().map(fmt_rational).collect::<Vec<_>>()
                    ),
                    None => out!("# Hilbert polynomial not stable within degree {window}"),
                }
            }
        }
    }
    Ok(())
}

fn fmt_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn cmd_points(ideal: &IdealArgs, heights: &HeightArgs, output: Output) -> Result<(), Failure> {
    let file = load_ideal(ideal)?;
    let hs = heights.values()?;
    let ps = match file.mode {
        IdealMode::Affine => {
            let [b] = hs.as_slice() else {
                return Err(Failure::input("affine mode takes a single --height"));
            };
            points::enumerate_affine(&file.ideal, *b, heights.budget)?
        }
        IdealMode::Projective => {
            let hb = if hs.len() == 1 { HeightBox::uniform(file.vars, hs[0])? } else { HeightBox::new(hs)? };
            points::enumerate_projective(&file.ideal, &hb, heights.budget)?
        }
    };
    match output {
        Output::Json => out!("{}", serde_json::to_string(&ps.points).expect("json")),
        Output::Text | Output::Csv => {
            let sep = if output == Output::Csv { "," } else { " " };
            for p in &ps.points {
                out!("{}", p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep));
            }
        }
    }
    Ok(())
}

fn summary(r: &PipelineReport) -> String {
    let mut s = format!(
        "delta {}  mu {}  points {}  certificates {}  k_actual {}",
        r.delta,
        r.mu,
        r.point_count,
        r.certificates.len(),
        r.k_actual
    );
    if let Some(e) = &r.k_bound_exponents {
        s.push_str(&format!("\nexponents m*sigma_i/f: {}", e.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")));
    }
    if let Some(rho) = r.rho {
        s.push_str(&format!("\nrho {rho:.6e}"));
    }
    for c in &r.certificates {
        s.push_str(&format!("\n[class {}] {} points: {}", c.class, c.points.len(), c.affine_poly.as_ref().unwrap_or(&c.poly)));
    }
    s
}

fn cmd_construct(
    ideal: &IdealArgs,
    heights: &HeightArgs,
    pipeline: &PipelineArgs,
    output: Output,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let file = load_ideal(ideal)?;
    let cfg = config(pipeline, ideal.ordering, heights.budget, file.vars)?;
    let (report, check) = engine::construct_and_verify(&file, &heights.values()?, &cfg)?;
    let text = match output {
        Output::Json => report.to_json(),
        Output::Csv => format!("{}\n{}", PipelineReport::CSV_HEADER, report.csv_row()),
        Output::Text => summary(&report),
    };
    emit(out, &text)?;
    match check.outcome {
        VerifyOutcome::Pass => Ok(()),
        VerifyOutcome::Fail { reason } => Err(Failure::verification(format!("verification failed: {reason}"))),
    }
}

fn cmd_verify(report: &Path, ideal: &Path, budget: u128) -> Result<(), Failure> {
    let r = PipelineReport::from_json(&read(report)?)?;
    let file = IdealFile::parse(&read(ideal)?, r.params.mode)
        .map_err(|e| Failure::input(format!("{}: {e}", ideal.display())))?;
    let check = engine::verify_report(&r, &file, budget)?;
    match check.outcome {
        VerifyOutcome::Pass => {
            out!("pass: {} certificates cover {} points", check.certificates, check.points);
            Ok(())
        }
        VerifyOutcome::Fail { reason } => Err(Failure::verification(format!("fail: {reason}"))),
    }
}

fn cmd_sweep(ideal: &IdealArgs, heights: &[f64], budget: u128, pipeline: &PipelineArgs, output: Output) -> Result<(), Failure> {
    let file = load_ideal(ideal)?;
    let cfg = config(pipeline, ideal.ordering, budget, file.vars)?;
    let mut reports = Vec::new();
    for &b in heights {
        let hs = match file.mode {
            IdealMode::Affine => vec![b],
            IdealMode::Projective => vec![b; file.vars],
        };
        let (report, check) = engine::construct_and_verify(&file, &hs, &cfg)?;
        if let VerifyOutcome::Fail { reason } = check.outcome {
            return Err(Failure::verification(format!("B = {b}: verification failed: {reason}")));
        }
        reports.push((b, report));
    }
    let bs: Vec<f64> = reports.iter().map(|(b, _)| *b).collect();
    let ks: Vec<f64> = reports.iter().map(|(_, r)| engine::as_f64(r.k_actual)).collect();
    let slope = engine::log_log_slope(&bs, &ks);
    match output {
        Output::Json => {
            let rows: Vec<_> = reports
                .iter()
                .map(|(b, r)| {
                    serde_json::json!({
                        "height": b, "points": r.point_count, "certificates": r.certificates.len(),
                        "delta": r.delta, "k_actual": r.k_actual, "k_bound_log": r.k_bound_log,
                    })
                })
                .collect();
            let json = serde_json::json!({"rows": rows, "slope": slope});
            out!("{}", serde_json::to_string_pretty(&json).expect("json"));
        }
        Output::Csv | Output::Text => {
            out!("{}", PipelineReport::CSV_HEADER);
            for (_, r) in &reports {
                out!("{}", r.csv_row());
            }
            if let Some(s) = slope {
                out!("# slope of log k_actual against log B: {s:.4}");
            }
        }
    }
    Ok(())
}

/// Largest `|Δ| / bound` over random Vandermonde instances: 1, t, ..., t^{μ-1}
/// at μ points in an interval of length `r`.
fn vandermonde_ratio(mu: u64, r: f64, samples: u32, seed: u64, ln_bound: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1_000_000i64;
    let width = (r * scale as f64).floor() as i64;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let start = rng.gen_range(-scale..=scale - width);
        let ts: Vec<BigRational> = (0..mu)
            .map(|_| BigRational::new(BigInt::from(start + rng.gen_range(0..=width)), BigInt::from(scale)))
            .collect();
        let mut prod = BigRational::from_integer(1.into());
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                prod *= (&ts[j] - &ts[i]).abs();
            }
        }
        let ratio = (detbound::ln_rational_up(&prod) - ln_bound).exp();
        worst = worst.max(ratio.to_f64().unwrap_or(0.0));
    }
    worst
}

fn cmd_bound(mu: u64, m: u32, norms: &[f64], r: f64, samples: u32, seed: u64, output: Output) -> Result<(), Failure> {
    let norms = if norms.len() == 1 { vec![norms[0]; mu as usize] } else { norms.to_vec() };
    let input = DetBoundInput { mu, m, norms, r };
    let b = detbound::determinant_bound(&input)?;
    let d = detbound::monomials_up_to_degree(m, b.budget.nu);
    let worst = (samples > 0 && m == 1).then(|| vandermonde_ratio(mu, r, samples, seed, b.ln));
    if samples > 0 && m != 1 {
        return Err(Failure::input("--samples draws Vandermonde instances and needs --m 1"));
    }
    match output {
        Output::Json => {
            let json = serde_json::json!({
                "mu": mu, "m": m, "nu": b.budget.nu, "e": b.budget.e.to_string(), "D": d.to_string(),
                "ln_bound": if b.is_zero() { None } else { Some(b.ln) },
                "bound": if b.is_zero() { 0.0 } else { b.value() },
                "worst_ratio": worst,
            });
            out!("{}", serde_json::to_string_pretty(&json).expect("json"));
        }
        Output::Text | Output::Csv => {
            out!("nu {}  e {}  D_m(nu) {}", b.budget.nu, b.budget.e, d);
            if b.is_zero() {
                out!("bound 0 (a norm vanishes)");
            } else {
                out!("bound {:.6e}  (ln {:.6})", b.value(), b.ln);
            }
            if let Some(w) = worst {
                out!("largest |det| / bound over {samples} samples: {w:.6e}");
            }
        }
    }
    if worst.is_some_and(|w| w > 1.0) {
        return Err(Failure::verification("a sample exceeded the bound"));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Failure::input(format!("--jobs: {e}")))?;
    }
    match &cli.command {
        Command::Hilbert { ideal, min_degree, max_degree, output } => cmd_hilbert(ideal, *min_degree, *max_degree, *output),
        Command::Points { ideal, heights, output } => cmd_points(ideal, heights, *output),
        Command::Construct { ideal, heights, pipeline, output, out } => {
            cmd_construct(ideal, heights, pipeline, *output, out.as_deref())
        }
        Command::Verify { report, ideal, budget } => cmd_verify(report, ideal, *budget),
        Command::Sweep { ideal, heights, budget, pipeline, output } => cmd_sweep(ideal, heights, *budget, pipeline, *output),
        Command::Bound { mu, m, norms, r, samples, seed, output } => cmd_bound(*mu, *m, norms, *r, *samples, *seed, *output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("detmethod: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
