use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use trigsum::constructions::{self, Provenance, Seed};
use trigsum::density::{density_report, min_cutoff_for_count, CutoffOutcome, KernelOrder, DEFAULT_QUAD_TOL};
use trigsum::extremum::{DEFAULT_BUDGET, DEFAULT_TOL};
use trigsum::io::{format_frequency_set, format_signs, parse_signs, read_frequency_set};
use trigsum::perturb::{run_theorem, run_theorem_with_signs};
use trigsum::{m1, m2, parseval_floor, Error, ExtremumOptions, FrequencySet, PerturbationCase};

mod scan;

#[derive(Parser)]
#[command(name = "trigsum", version, about = "Certified extrema of integer-frequency trigonometric sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a frequency set
    Construct(ConstructArgs),
    /// Certified M1 / M2 of a frequency set
    Eval(EvalArgs),
    /// Apply the ±1 perturbation and certify the result
    Perturb(PerturbArgs),
    /// Conjugate Dirichlet kernel norms, prefix counts and cutoff bounds
    Density(DensityArgs),
    /// Scan constructions over a grid of sizes (CSV)
    Scan(ScanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Consecutive,
    Random,
    SidonDiff,
    RoundedExp,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: Construction,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 11)]
    min: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    p: Option<u64>,
    /// Output path, `-` for stdout. A provenance sidecar `<path>.meta.json` is
    /// written next to file outputs.
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct Certify {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl Certify {
    fn options(&self) -> Result<ExtremumOptions, Error> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(ExtremumOptions { tol: self.tol, budget: self.budget, seeds: Vec::new() })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    M1,
    M2,
    Both,
}

#[derive(Args)]
struct EvalArgs {
    /// Frequency-set file
    set: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::Both)]
    which: Which,
    #[command(flatten)]
    certify: Certify,
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Sine,
    Cosine,
}

impl From<CaseArg> for PerturbationCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Sine => PerturbationCase::SineCase,
            CaseArg::Cosine => PerturbationCase::CosineCase,
        }
    }
}

#[derive(Args)]
struct PerturbArgs {
    set: PathBuf,
    #[arg(long = "case", value_enum, default_value_t = CaseArg::Sine)]
    case: CaseArg,
    /// Use these signs instead of choosing them
    #[arg(long)]
    signs: Option<PathBuf>,
    /// Write the sign column here
    #[arg(long)]
    eps_out: Option<PathBuf>,
    #[command(flatten)]
    certify: Certify,
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    set: Option<PathBuf>,
    /// Kernel orders, comma separated
    #[arg(long, value_delimiter = ',')]
    m: Vec<u64>,
    /// Report the smallest cutoff that can hold `--n` frequencies
    #[arg(long)]
    growth: bool,
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// `auto` or a number: the set's certified M1 when a set is given,
    /// otherwise n^(2/3)
    #[arg(long, default_value = "auto")]
    m1: String,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_value = "consecutive,random,sidon-diff,rounded-exp")]
    constructions: Vec<Construction>,
    #[arg(long, value_delimiter = ',', default_value = "10,100")]
    n: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "11,31")]
    p: Vec<u64>,
    #[arg(long, default_value_t = 11)]
    min: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    certify: Certify,
    #[arg(long, default_value = "-")]
    output: String,
}

/// A failure and its process exit code.
struct Failure {
    code: u8,
    message: String,
    /// Printed on stdout before exiting.
    payload: Option<serde_json::Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_resource() { 3 } else { 2 };
        let payload = match &e {
            Error::Budget { partial, .. } => Some(json!({ "error": e.to_string(), "partial": partial })),
            _ => None,
        };
        Failure { code, message: e.to_string(), payload }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, message: e.to_string(), payload: None }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into(), payload: None }
}

fn write_output(dest: &str, text: &str) -> io::Result<()> {
    if dest == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()
    } else {
        fs::write(dest, text)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read_set(path: &Path) -> Result<FrequencySet, Failure> {
    read_frequency_set(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn build(kind: Construction, n: Option<u64>, p: Option<u64>, min: u64, max: u64, seed: u64) -> Result<(FrequencySet, Provenance), Failure> {
    let need_n = || n.ok_or_else(|| usage("--n is required for this construction"));
    let mut prov = Provenance {
        construction: kind.to_possible_value().unwrap().get_name().to_string(),
        n: 0,
        p: None,
        seed: None,
        min: None,
        max: None,
        lambda_max: 0,
    };
    let set = match kind {
        Construction::Consecutive => constructions::consecutive(need_n()?)?,
        Construction::Random => {
            let n = need_n()?;
            prov.seed = Some(seed);
            prov.min = Some(min);
            prov.max = Some(max);
            constructions::random_set(n as usize, min, max, Seed(seed))?
        }
        Construction::SidonDiff => {
            let p = p.ok_or_else(|| usage("--p is required for sidon-diff"))?;
            prov.p = Some(p);
            constructions::erdos_turan_sidon(p)?.differences()?
        }
        Construction::RoundedExp => constructions::rounded_exponential(need_n()?)?,
    };
    prov.n = set.len();
    prov.lambda_max = set.max();
    Ok((set, prov))
}

fn cmd_construct(a: ConstructArgs) -> Result<(), Failure> {
    let (set, prov) = build(a.kind, a.n, a.p, a.min, a.max, a.seed)?;
    let header = serde_json::to_string(&prov).expect("serializable");
    write_output(&a.output, &format_frequency_set(&set, &[header]))?;
    if a.output != "-" {
        fs::write(format!("{}.meta.json", a.output), to_json(&prov))?;
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<(), Failure> {
    let set = read_set(&a.set)?;
    let opts = a.certify.options()?;
    let mut out = serde_json::Map::new();
    out.insert("n".into(), json!(set.len()));
    if a.which != Which::M2 {
        out.insert("m1".into(), serde_json::to_value(m1(&set, &opts)?).unwrap());
    }
    if a.which != Which::M1 {
        out.insert("m2".into(), serde_json::to_value(m2(&set, &opts)?).unwrap());
    }
    write_output(&a.output, &to_json(&out))?;
    Ok(())
}

fn cmd_perturb(a: PerturbArgs) -> Result<(), Failure> {
    let set = read_set(&a.set)?;
    let opts = a.certify.options()?;
    let report = match &a.signs {
        Some(path) => {
            let eps = parse_signs(&fs::read_to_string(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            run_theorem_with_signs(&set, a.case.into(), eps, &opts)?
        }
        None => run_theorem(&set, a.case.into(), &opts)?,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.eps_out {
        fs::write(path, format_signs(&report.eps))?;
    }
    write_output(&a.output, &to_json(&report))?;
    Ok(())
}

#[derive(Serialize)]
struct GrowthRow {
    n: u64,
    m1_used: f64,
    status: &'static str,
    m: u64,
    bound: f64,
}

fn cmd_density(a: DensityArgs) -> Result<(), Failure> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(usage("--tol must be positive"));
    }
    if a.m.is_empty() && !a.growth {
        return Err(usage("nothing to do: give --m and/or --growth"));
    }
    if a.format == Format::Csv && !a.m.is_empty() && a.growth {
        return Err(usage("CSV output takes either --m or --growth, not both"));
    }
    let set = a.set.as_deref().map(read_set).transpose()?;
    let fixed_m1 = match a.m1.as_str() {
        "auto" => None,
        v => Some(v.parse::<f64>().map_err(|_| usage(format!("--m1 expects `auto` or a number, got {v:?}")))?),
    };
    let set_m1 = match (&set, fixed_m1) {
        (Some(s), None) => Some(m1(s, &ExtremumOptions::default())?.certified_bound),
        _ => fixed_m1,
    };

    let mut kernel = Vec::new();
    for &m in &a.m {
        kernel.push(density_report(set.as_ref(), set_m1, KernelOrder::new(m)?, a.tol)?);
    }

    let mut growth = Vec::new();
    if a.growth {
        let ns = match (&set, a.n.is_empty()) {
            (_, false) => a.n.clone(),
            (Some(s), true) => vec![s.len() as u64],
            (None, true) => return Err(usage("--growth needs --n or --set")),
        };
        for n in ns {
            let m1_used = set_m1.unwrap_or_else(|| (n as f64).powf(2.0 / 3.0));
            let row = match min_cutoff_for_count(n, m1_used, a.tol)? {
                CutoffOutcome::Found { m, bound } => GrowthRow { n, m1_used, status: "found", m, bound },
                CutoffOutcome::Exceeds { last_m, last_bound } => {
                    GrowthRow { n, m1_used, status: "exceeds", m: last_m, bound: last_bound }
                }
            };
            growth.push(row);
        }
    }

    let text = match a.format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            if !kernel.is_empty() {
                obj.insert("kernel".into(), serde_json::to_value(&kernel).unwrap());
            }
            if !growth.is_empty() {
                obj.insert("growth".into(), serde_json::to_value(&growth).unwrap());
            }
            to_json(&obj)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if a.growth {
                for r in &growth {
                    w.serialize(r).map_err(|e| usage(e.to_string()))?;
                }
            } else {
                w.write_record(["m", "l1_norm", "count_exact", "count_bound"]).map_err(|e| usage(e.to_string()))?;
                for r in &kernel {
                    w.write_record([
                        r.m.get().to_string(),
                        r.l1_norm.to_string(),
                        r.count_exact.map(|c| c.to_string()).unwrap_or_default(),
                        r.count_bound.map(|c| c.to_string()).unwrap_or_default(),
                    ])
                    .map_err(|e| usage(e.to_string()))?;
                }
            }
            String::from_utf8(w.into_inner().map_err(|e| usage(e.to_string()))?).unwrap()
        }
    };
    write_output(&a.output, &text)?;
    Ok(())
}

fn cmd_scan(a: ScanArgs) -> Result<(), Failure> {
    let opts = a.certify.options()?;
    let mut jobs = Vec::new();
    for &c in &a.constructions {
        match c {
            Construction::SidonDiff => jobs.extend(a.p.iter().map(|&p| (c, None, Some(p)))),
            _ => jobs.extend(a.n.iter().map(|&n| (c, Some(n), None))),
        }
    }
    let mut rows = Vec::new();
    let mut last_failure = None;
    for (c, n, p) in jobs {
        let name = c.to_possible_value().unwrap().get_name().to_string();
        let start = Instant::now();
        let result = build(c, n, p, a.min, a.max, a.seed).and_then(|(set, _)| {
            let c1 = m1(&set, &opts)?;
            let c2 = m2(&set, &opts)?;
            Ok(scan::ScanRow::filled(&name, &set, &c1, &c2, parseval_floor(set.len() as u64), start.elapsed()))
        });
        match result {
            Ok(row) => rows.push(row),
            Err(f) => {
                eprintln!("scan: {name} n={n:?} p={p:?}: {}", f.message);
                rows.push(scan::ScanRow::failed(&name, n));
                last_failure = Some(f);
            }
        }
    }
    write_output(&a.output, &scan::to_csv(&rows).map_err(|e| usage(e.to_string()))?)?;
    match last_failure {
        Some(f) if rows.iter().all(|r| r.m1_value.is_none()) => Err(Failure { payload: None, ..f }),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Perturb(a) => cmd_perturb(a),
        Command::Density(a) => cmd_density(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(p) = &f.payload {
                print!("{}", to_json(p));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
