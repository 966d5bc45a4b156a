use std::fs;
use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use skagree::correlation::{doeblin_coefficient, eta, j_alpha, j_infinity, maximal_correlation};
use skagree::dsbe::{emit_curves, linear_grid, write_curves_csv};
use skagree::feasibility::{
    corollary1_test, exact_eve_error, monte_carlo_protocol, set_test, swap_advantage_lb, tilde_p,
    FeasibilityVerdict, SwapInstance, Witness,
};
use skagree::info::{conditional_mutual_information, entropy, mutual_information};
use skagree::thresholds::{epsilon1_paths, threshold_report, Path, PATH_ENUMERATION_LIMIT};
use skagree::{Error, JointPmf, Source};

#[derive(Parser)]
#[command(name = "skagree", version, about = "Secret-key agreement feasibility for discrete sources")]
struct Cli {
    /// Units for information quantities.
    #[arg(long, value_enum, global = true, default_value_t = Units::Bits)]
    units: Units,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Bits,
    Nats,
}

impl Units {
    fn name(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }

    fn scale(self, nats: f64) -> f64 {
        match self {
            Units::Bits => nats / std::f64::consts::LN_2,
            Units::Nats => nats,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Erasure thresholds and verdict for an erasure source.
    Thresholds {
        #[arg(long)]
        input: PathBuf,
        /// Fail instead of falling back to the LP when path enumeration is
        /// too large.
        #[arg(long)]
        exact_paths: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-letter Chernoff test, optionally the block test on swap strings.
    Feasibility {
        #[arg(long)]
        input: PathBuf,
        /// Swap symbols `x1,y1,x2,y2` (labels or indices).
        #[arg(long, requires = "n")]
        swap: Option<String>,
        /// Even block length for `--swap`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curves for the doubly symmetric binary source with erasures, as CSV.
    Dsbe {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        eps_min: f64,
        #[arg(long, default_value_t = 1.0)]
        eps_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo run of the swap protocol.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        /// Symbols `x1,y1,x2,y2` (labels or indices).
        #[arg(long)]
        pairs: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        blocks: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Information and correlation measures of a source.
    Measure {
        #[arg(long)]
        input: PathBuf,
        /// Orders for J_alpha.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0])]
        alpha: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Rounds to 9 significant digits; infinities become strings.
fn num(v: f64) -> Value {
    if v.is_finite() {
        let rounded: f64 = format!("{v:.8e}").parse().unwrap_or(v);
        json!(rounded)
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

fn load_source(path: &FsPath) -> CliResult<Source> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(Source::from_json_str(&text)?)
}

fn symbol(label: &str, lookup: impl Fn(&str) -> skagree::Result<usize>, size: usize) -> CliResult<usize> {
    if let Ok(i) = lookup(label) {
        return Ok(i);
    }
    match label.parse::<usize>() {
        Ok(i) if i < size => Ok(i),
        _ => Err(Error::UnknownSymbol(label.to_string()).into()),
    }
}

/// Parses `x1,y1,x2,y2`.
fn parse_pairs(spec: &str, p: &JointPmf) -> CliResult<[usize; 4]> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!("expected x1,y1,x2,y2, got {spec:?}")));
    }
    let x = |s| symbol(s, |l| p.x_index(l), p.nx());
    let y = |s| symbol(s, |l| p.y_index(l), p.ny());
    Ok([x(parts[0])?, y(parts[1])?, x(parts[2])?, y(parts[3])?])
}

fn verdict_json(v: &FeasibilityVerdict, units: Units) -> Value {
    let witness = match &v.witness {
        Some(Witness::Symbols { x1, x2, y1, y2 }) => json!({"x1": x1, "x2": x2, "y1": y1, "y2": y2}),
        Some(Witness::Sets { n }) => json!({"n": n}),
        None => Value::Null,
    };
    json!({
        "positive": v.positive,
        "witness": witness,
        "lhs_chernoff": num(units.scale(v.lhs_chernoff)),
        "rhs_half_log_ratio": num(units.scale(v.rhs_half_log_ratio)),
    })
}

fn path_json(path: &Option<Path>) -> Value {
    match path {
        Some(p) => json!({"xs": p.xs, "ys": p.ys}),
        None => Value::Null,
    }
}

fn envelope(command: &str, units: Units, body: Map<String, Value>) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    out.insert("units".into(), json!(units.name()));
    out.extend(body);
    Value::Object(out)
}

fn thresholds(input: &FsPath, exact_paths: bool, units: Units) -> CliResult<Value> {
    let source = load_source(input)?;
    if exact_paths {
        let s = source.joint().restrict_to_support();
        if s.nx().min(s.ny()) > PATH_ENUMERATION_LIMIT {
            epsilon1_paths(source.joint())?;
        }
    }
    let r = threshold_report(&source)?;
    let report = json!({
        "epsilon1": num(r.epsilon1),
        "epsilon2": num(r.epsilon2),
        "epsilon3_lb": num(r.epsilon3_lb),
        "oneway_threshold": num(r.oneway_threshold),
        "lbar_threshold": num(r.lbar_threshold),
        "verdict": r.verdict,
        "witness_path": path_json(&r.witness_path),
        "witness_pair": r.witness_pair,
    });
    let mut body = Map::new();
    body.insert("epsilon".into(), num(source.erasure_probability().unwrap_or(f64::NAN)));
    body.insert("report".into(), report);
    Ok(envelope("thresholds", units, body))
}

fn feasibility(input: &FsPath, swap: Option<&str>, n: Option<usize>, units: Units) -> CliResult<Value> {
    let source = load_source(input)?;
    let mut body = Map::new();
    body.insert("corollary1".into(), verdict_json(&corollary1_test(&source), units));
    if let (Some(spec), Some(n)) = (swap, n) {
        let [x1, y1, x2, y2] = parse_pairs(spec, source.joint())?;
        let inst = SwapInstance::new(source.clone(), x1, y1, x2, y2, n)?;
        let ([a1, a2], [b1, b2]) = inst.strings();
        let block = set_test(&source, &[a1], &[a2], &[b1], &[b2], n)?;
        let mut swap_body = json!({
            "n": n,
            "pair": [x1, y1, x2, y2],
            "set_test": verdict_json(&block, units),
            "acceptance_probability": num(inst.acceptance_probability()),
            "tilde_p": num(tilde_p(&inst)),
            "eve_error": num(exact_eve_error(&inst)?),
        });
        if source.erasure_probability().is_some() {
            swap_body["advantage_lb"] = num(units.scale(swap_advantage_lb(&inst)?));
        }
        body.insert("swap".into(), swap_body);
    }
    Ok(envelope("feasibility", units, body))
}

fn simulate(input: &FsPath, pairs: &str, n: usize, blocks: u64, seed: u64, units: Units) -> CliResult<Value> {
    let source = load_source(input)?;
    let [x1, y1, x2, y2] = parse_pairs(pairs, source.joint())?;
    let inst = SwapInstance::new(source, x1, y1, x2, y2, n)?;
    let stats = monte_carlo_protocol(&inst, blocks, seed)?;
    let mut body = Map::new();
    body.insert("seed".into(), json!(seed));
    body.insert("n".into(), json!(n));
    body.insert("pair".into(), json!([x1, y1, x2, y2]));
    body.insert(
        "statistics".into(),
        json!({
            "blocks": stats.blocks,
            "accepted": stats.accepted,
            "agreed": stats.agreed,
            "eve_errors": stats.eve_errors,
            "acceptance_rate": num(stats.acceptance_rate),
            "empirical_tilde_p": num(stats.empirical_tilde_p),
            "empirical_eve_error": num(stats.empirical_eve_error),
        }),
    );
    body.insert(
        "exact".into(),
        json!({
            "acceptance_probability": num(inst.acceptance_probability()),
            "tilde_p": num(tilde_p(&inst)),
            "eve_error": num(exact_eve_error(&inst)?),
        }),
    );
    Ok(envelope("simulate", units, body))
}

fn measure(input: &FsPath, alphas: &[f64], units: Units) -> CliResult<Value> {
    let source = load_source(input)?;
    let p = source.joint();
    let corr = eta(&p.conditional_y_given_x());
    let mut j = Map::new();
    for &a in alphas {
        j.insert(format!("{a}"), num(units.scale(j_alpha(p, a)?)));
    }
    j.insert("inf".into(), num(units.scale(j_infinity(p))));
    let mut body = Map::new();
    body.insert("entropy_x".into(), num(units.scale(entropy(&p.x_marginal())?)));
    body.insert("entropy_y".into(), num(units.scale(entropy(&p.y_marginal())?)));
    body.insert("mutual_information".into(), num(units.scale(mutual_information(p))));
    body.insert(
        "conditional_mutual_information".into(),
        num(units.scale(conditional_mutual_information(&source))),
    );
    body.insert("maximal_correlation".into(), num(maximal_correlation(p)));
    body.insert("eta".into(), num(corr.eta));
    body.insert("eve_doeblin".into(), num(doeblin_coefficient(&source.eve_channel())));
    body.insert("j_alpha".into(), Value::Object(j));
    Ok(envelope("measure", units, body))
}

fn dsbe(p: f64, eps_min: f64, eps_max: f64, steps: usize, n_max: usize, units: Units) -> CliResult<Vec<u8>> {
    if !(0.0..=1.0).contains(&eps_min) || !(0.0..=1.0).contains(&eps_max) || eps_min > eps_max {
        return Err(CliError::Usage(format!("invalid epsilon range [{eps_min}, {eps_max}]")));
    }
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let mut points = emit_curves(p, &linear_grid(eps_min, eps_max, steps), n_max)?;
    if units == Units::Nats {
        for pt in &mut points {
            pt.i_xy_given_z *= std::f64::consts::LN_2;
            pt.b0_sub *= std::f64::consts::LN_2;
            pt.s_ow_lb *= std::f64::consts::LN_2;
            for r in pt.r_n.values_mut() {
                *r *= std::f64::consts::LN_2;
            }
        }
    }
    let mut buf = Vec::new();
    write_curves_csv(&points, n_max, &mut buf)?;
    Ok(buf)
}

fn emit(bytes: &[u8], out: Option<&FsPath>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Lib(Error::Io(e))),
    }
}

fn emit_json(v: &Value, out: Option<&FsPath>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(Error::from)?;
    text.push('\n');
    emit(text.as_bytes(), out)
}

fn run(cli: Cli) -> CliResult<()> {
    let units = cli.units;
    match cli.command {
        Command::Thresholds { input, exact_paths, out } => {
            emit_json(&thresholds(&input, exact_paths, units)?, out.as_deref())
        }
        Command::Feasibility { input, swap, n, out } => {
            emit_json(&feasibility(&input, swap.as_deref(), n, units)?, out.as_deref())
        }
        Command::Dsbe { p, eps_min, eps_max, steps, n_max, out } => {
            emit(&dsbe(p, eps_min, eps_max, steps, n_max, units)?, out.as_deref())
        }
        Command::Simulate { input, pairs, n, blocks, seed, out } => {
            emit_json(&simulate(&input, &pairs, n, blocks, seed, units)?, out.as_deref())
        }
        Command::Measure { input, alpha, out } => emit_json(&measure(&input, &alpha, units)?, out.as_deref()),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SKAGREE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Lib(e)) if e.is_guard() => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
