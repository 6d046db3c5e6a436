mod json;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use kmsdyn::ifs::{classify_ifs, hutchinson, kms_measure_ifs, orbit_condition, HutchinsonMode, ORBIT_DEPTH};
use kmsdyn::kms::{
    check_k1, check_k2, classify, classify_julia, divergence_witness, kms_measure, lyubich,
    lyubich_invariance_residual, Beta, KmsMeasure, PhaseReport, Regime, DEFAULT_RHO,
};
use kmsdyn::{
    AtomicMeasure, Error, IfsSystem, MapExpression, PlanePoint, RationalMap, Settings, SpherePoint, TestFunctionLibrary,
};

const SCHEMA: u32 = 1;
const LIBRARY_DEGREE: u32 = 4;

#[derive(Parser)]
#[command(name = "kmsdyn", version, about = "KMS states of rational maps and self-similar systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rational maps of the Riemann sphere.
    #[command(subcommand)]
    Rat(RatCommand),
    /// Self-similar systems of affine contractions.
    #[command(subcommand)]
    Ifs(IfsCommand),
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write measure atoms as CSV files into this directory.
    #[arg(long)]
    atoms_dir: Option<PathBuf>,
}

#[derive(Args)]
struct MapArg {
    /// Rational map in z, e.g. "(z^3-16/27)/z".
    #[arg(long)]
    map: String,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct BetaArg {
    /// Inverse temperature.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Use β = log N exactly.
    #[arg(long)]
    critical: bool,
}

impl BetaArg {
    fn get(&self) -> Beta {
        match self.beta {
            Some(b) if !self.critical => Beta::Value(b),
            _ => Beta::Critical,
        }
    }
}

#[derive(Subcommand)]
enum RatCommand {
    /// Branch data and exceptional set.
    Analyze {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        output: Output,
    },
    /// Finite-type KMS measures with trace-condition residuals.
    Kms {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        beta: BetaArg,
        /// Truncation depth; chosen from the tail bound when omitted.
        #[arg(long)]
        depth: Option<usize>,
        /// Branched point to anchor at; all eligible points when omitted.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Approximant of the measure of maximal entropy.
    Lyubich {
        #[command(flatten)]
        map: MapArg,
        /// Non-exceptional seed point.
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        /// Number of backward iterations.
        #[arg(long)]
        iters: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Extreme KMS states over a grid of β.
    Phase {
        #[command(flatten)]
        map: MapArg,
        /// LO:HI:STEP.
        #[arg(long)]
        beta_grid: String,
        /// Branched point asserted to lie in the Julia set; restricts to the
        /// algebra over the Julia set. Repeatable.
        #[arg(long = "julia", allow_hyphen_values = true)]
        julia: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Certificate that the partition series diverges below log N.
    Witness {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SystemArg {
    /// tent, binary, sierpinski or sierpinski-twisted.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file {"dim": d, "maps": [{"linear": …, "offset": …}]}.
    #[arg(long)]
    system: Option<PathBuf>,
}

#[derive(Subcommand)]
enum IfsCommand {
    /// Branch structure and orbit condition.
    Analyze {
        #[command(flatten)]
        system: SystemArg,
        #[command(flatten)]
        output: Output,
    },
    /// Finite-type KMS measures with trace-condition residuals.
    Kms {
        #[command(flatten)]
        system: SystemArg,
        #[command(flatten)]
        beta: BetaArg,
        #[arg(long)]
        depth: Option<usize>,
        /// Branched point "x" or "x,y"; all branched points when omitted.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Approximant of the self-similar measure.
    Hutchinson {
        #[command(flatten)]
        system: SystemArg,
        /// Deterministic iteration depth.
        #[arg(long, default_value_t = 10)]
        levels: usize,
        /// Use the chaos game with this many samples instead.
        #[arg(long)]
        chaos: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coarse-grain atoms to stay within the atom budget.
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Extreme KMS states at one β.
    Classify {
        #[command(flatten)]
        system: SystemArg,
        #[command(flatten)]
        beta: BetaArg,
        /// Proceed when the orbit condition cannot be certified.
        #[arg(long)]
        assume_orbit_condition: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "IoError",
        }
    }

    fn detail(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(s) => s.clone(),
        }
    }

    /// Distinct per error class; 2 is left to argument errors.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::NonConvergence { .. } => 10,
                Error::DegreeZero(_) => 11,
                Error::NotARoot { .. } => 12,
                Error::Syntax { .. } => 13,
                Error::DegreeTooLow(_) => 14,
                Error::DivisionByZeroPolynomial => 15,
                Error::ExceptionalSeed => 16,
                Error::OutOfRegime { .. } => 17,
                Error::NotABranchPoint => 18,
                Error::AtomBudgetExceeded(_) => 19,
                Error::NotSubinvariant { .. } => 20,
                Error::WitnessNotFoundAtDepth(_) => 21,
                Error::InternalConsistency(_) => 22,
                Error::InvalidSystem(_) => 23,
                Error::InvalidInput(_) => 24,
            },
            CliError::Io(_) => 30,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn settings() -> CliResult<Settings> {
    let mut s = Settings::default();
    if let Ok(v) = std::env::var("KMSDYN_ATOM_BUDGET") {
        s.atom_budget =
            v.trim().parse().ok().filter(|b| *b > 0).ok_or_else(|| {
                Error::InvalidInput(format!("KMSDYN_ATOM_BUDGET must be a positive integer, got {v:?}"))
            })?;
    }
    Ok(s)
}

fn load_map(arg: &MapArg) -> CliResult<RationalMap> {
    let (p, q) = MapExpression::parse(&arg.map)?.ast.to_fraction()?;
    Ok(RationalMap::with_settings(p, q, settings()?)?)
}

fn load_system(arg: &SystemArg) -> CliResult<IfsSystem> {
    let sys = match (&arg.preset, &arg.system) {
        (Some(name), _) => IfsSystem::preset(name)?,
        (None, Some(path)) => IfsSystem::from_json(&fs::read_to_string(path)?)?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    Ok(sys.with_atom_budget(settings()?.atom_budget))
}

/// `inf`, or a constant expression such as `-1/2+3i`.
fn parse_sphere_point(s: &str) -> CliResult<SpherePoint> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(SpherePoint::infinity());
    }
    let (p, q) = MapExpression::parse(t)?.ast.to_fraction()?;
    if p.degree().unwrap_or(0) > 0 || q.degree().unwrap_or(0) > 0 {
        return Err(Error::InvalidInput(format!("{s:?} is not a constant")).into());
    }
    let c = p.to_poly().coeff(0) / q.to_poly().coeff(0);
    Ok(SpherePoint::from_affine(c))
}

fn parse_plane_point(s: &str, dim: usize) -> CliResult<PlanePoint> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("cannot read {s:?} as a point")))?;
    match (dim, nums.as_slice()) {
        (1, [x]) | (1, [x, _]) => Ok(PlanePoint::new(*x, 0.0)),
        (2, [x, y]) => Ok(PlanePoint::new(*x, *y)),
        _ => Err(Error::InvalidInput(format!("point {s:?} does not have dimension {dim}")).into()),
    }
}

fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Core(Error::InvalidInput(format!("beta grid must be LO:HI:STEP, got {s:?}")));
    let v: Vec<f64> =
        s.split(':').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let [lo, hi, step] = v[..] else { return Err(bad()) };
    if step.is_nan() || step <= 0.0 || hi < lo {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(Error::InvalidInput("beta grid has more than 100000 points".into()).into());
    }
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

fn atoms_file(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn emit(output: &Output, command: &str, mut body: Value) -> CliResult<()> {
    body["schema"] = json!(SCHEMA);
    body["command"] = json!(command);
    let text = json::to_string(&body);
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn measure_json<P>(m: &KmsMeasure<P>, k1: Value, k2: Value) -> Value
where
    P: kmsdyn::Support + serde::Serialize,
{
    let mut v = m.to_json();
    v["k1"] = k1;
    v["k2"] = k2;
    v["atoms"] = m.measure.to_json()["atoms"].clone();
    v
}

fn phase_entry<P: kmsdyn::Support + serde::Serialize>(r: &PhaseReport<P>) -> Value {
    r.to_json()
}

fn rat(cmd: RatCommand) -> CliResult<()> {
    match cmd {
        RatCommand::Analyze { map, output } => {
            let r = load_map(&map)?;
            emit(&output, "rat analyze", json!({"source": map.map, "report": r.report_json()}))
        }
        RatCommand::Kms { map, beta, depth, point, output } => {
            let r = load_map(&map)?;
            let (b, regime) = beta.get().resolve(r.degree())?;
            let anchors: Vec<SpherePoint> = match &point {
                Some(p) => vec![parse_sphere_point(p)?],
                None if regime == Regime::Supercritical => r.branch_points(),
                None => r.branch_points().into_iter().filter(|p| r.is_exceptional(p)).collect(),
            };
            let lib = TestFunctionLibrary::sphere(LIBRARY_DEGREE);
            let mut states = Vec::new();
            for (k, w) in anchors.iter().enumerate() {
                let m = kms_measure(&r, w, beta.get(), depth)?;
                let k1 = check_k1(&r, &m.measure, b, &lib, DEFAULT_RHO)?;
                let k2 = check_k2(&r, &m.measure, b, &lib)?;
                if let Some(dir) = &output.atoms_dir {
                    m.measure.write_csv(atoms_file(dir, &format!("state_{k}.csv"))?, None)?;
                }
                states.push(measure_json(&m, json!(k1), json!(k2)));
            }
            emit(&output, "rat kms", json!({"source": map.map, "beta": b, "regime": regime, "states": states}))
        }
        RatCommand::Lyubich { map, seed, iters, output } => {
            let r = load_map(&map)?;
            let y = parse_sphere_point(&seed)?;
            let mu = lyubich(&r, &y, iters)?;
            let lib = TestFunctionLibrary::sphere(LIBRARY_DEGREE);
            let residual = lyubich_invariance_residual(&r, &mu, &lib);
            if let Some(dir) = &output.atoms_dir {
                mu.write_csv(atoms_file(dir, "lyubich.csv")?, Some(iters))?;
            }
            emit(
                &output,
                "rat lyubich",
                json!({
                    "source": map.map,
                    "seed": y,
                    "iters": iters,
                    "atom_count": mu.len(),
                    "total_mass": mu.mass(),
                    "invariance_residual": residual,
                }),
            )
        }
        RatCommand::Phase { map, beta_grid, julia, output } => {
            let r = load_map(&map)?;
            let grid = parse_grid(&beta_grid)?;
            let flagged = julia.iter().map(|s| parse_sphere_point(s)).collect::<CliResult<Vec<_>>>()?;
            let run = |b: Beta| -> CliResult<Value> {
                let rep: PhaseReport<SpherePoint> =
                    if julia.is_empty() { classify(&r, b)? } else { classify_julia(&r, b, &flagged)? };
                Ok(phase_entry(&rep))
            };
            let mut entries = Vec::new();
            for b in &grid {
                entries.push(run(Beta::Value(*b))?);
            }
            let log_n = (r.degree() as f64).ln();
            let critical = if grid.first().is_some_and(|lo| *lo <= log_n) && grid.last().is_some_and(|hi| *hi >= log_n)
            {
                run(Beta::Critical)?
            } else {
                Value::Null
            };
            emit(
                &output,
                "rat phase",
                json!({"source": map.map, "log_degree": log_n, "grid": entries, "critical": critical}),
            )
        }
        RatCommand::Witness { map, point, beta, depth, output } => {
            let r = load_map(&map)?;
            let z = parse_sphere_point(&point)?;
            let w = divergence_witness(&r, &z, beta, depth)?;
            emit(&output, "rat witness", json!({"source": map.map, "witness": w}))
        }
    }
}

fn system_label(arg: &SystemArg) -> Value {
    match (&arg.preset, &arg.system) {
        (Some(p), _) => json!({"preset": p}),
        (_, Some(f)) => json!({"file": f.display().to_string()}),
        _ => Value::Null,
    }
}

fn ifs(cmd: IfsCommand) -> CliResult<()> {
    match cmd {
        IfsCommand::Analyze { system, output } => {
            let sys = load_system(&system)?;
            let oc = orbit_condition(&sys, ORBIT_DEPTH);
            emit(
                &output,
                "ifs analyze",
                json!({"system": system_label(&system), "report": sys.report_json(), "orbit_condition": oc.to_json()}),
            )
        }
        IfsCommand::Kms { system, beta, depth, point, output } => {
            let sys = load_system(&system)?;
            let (b, regime) = beta.get().resolve(sys.len())?;
            let anchors = match &point {
                Some(p) => vec![parse_plane_point(p, sys.dim())?],
                None => sys.branch_data().branch_points.clone(),
            };
            let lib = sys.library(LIBRARY_DEGREE);
            let mut states = Vec::new();
            for (k, w) in anchors.iter().enumerate() {
                let m = kms_measure_ifs(&sys, w, beta.get(), depth)?;
                let k1 = check_k1(&sys, &m.measure, b, &lib, DEFAULT_RHO)?;
                let k2 = check_k2(&sys, &m.measure, b, &lib)?;
                if let Some(dir) = &output.atoms_dir {
                    m.measure.write_csv(atoms_file(dir, &format!("state_{k}.csv"))?)?;
                }
                states.push(measure_json(&m, json!(k1), json!(k2)));
            }
            emit(
                &output,
                "ifs kms",
                json!({"system": system_label(&system), "beta": b, "regime": regime, "states": states}),
            )
        }
        IfsCommand::Hutchinson { system, levels, chaos, seed, prune, output } => {
            let sys = load_system(&system)?;
            let (mode, n) = match chaos {
                Some(samples) => (HutchinsonMode::ChaosGame { samples, seed }, samples),
                None => (HutchinsonMode::Deterministic { x0: None, prune }, levels),
            };
            let mu: AtomicMeasure<PlanePoint> = hutchinson(&sys, n, mode)?;
            if let Some(dir) = &output.atoms_dir {
                mu.write_csv(atoms_file(dir, "hutchinson.csv")?)?;
            }
            let lib = sys.library(LIBRARY_DEGREE);
            let moments: Vec<Value> = lib
                .exponents()
                .iter()
                .zip(lib.integrals(&mu))
                .map(|(e, v)| json!({"exponents": e, "value": v}))
                .collect();
            emit(
                &output,
                "ifs hutchinson",
                json!({
                    "system": system_label(&system),
                    "mode": if chaos.is_some() { "chaos" } else { "deterministic" },
                    "n": n,
                    "seed": chaos.map(|_| seed),
                    "atom_count": mu.len(),
                    "total_mass": mu.mass(),
                    "moments": moments,
                }),
            )
        }
        IfsCommand::Classify { system, beta, assume_orbit_condition, output } => {
            let sys = load_system(&system)?;
            let rep = classify_ifs(&sys, beta.get(), assume_orbit_condition)?;
            emit(&output, "ifs classify", json!({"system": system_label(&system), "report": phase_entry(&rep)}))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Rat(c) => rat(c),
        Command::Ifs(c) => ifs(c),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = json!({"error": {"kind": e.kind(), "detail": e.detail()}});
            eprint!("{}", json::to_string(&body));
            ExitCode::from(e.exit_code())
        }
    }
}
