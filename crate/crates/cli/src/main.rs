use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardycone::barriers::{
    certify_flat_barrier, certify_prop32, certify_prop44, flat_sample_points, verify_lemma43, BarrierSpec,
    ResidualReport, TubeBarrierSpec, TubeSample,
};
use hardycone::geometry::{ConeSpec, TubeSpec, TubeWeight};
use hardycone::harness::{
    eigen_curve, eigen_curve_svg, hardy_check, prop32_grid, prop44_samples, run_sweep, sweep_csv, sweep_svg, xy_csv,
    HardyWeight, ParamRange, SweepConfig, SweepGeometry, CERT_RADIUS,
};
use hardycone::spectral::{exponent_report, AngularWeight, HardyProblem};
use hardycone::HardyError;

const EXIT_FAIL: u8 = 1;
const EXIT_REGIME: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "hardycone", version, about = "Critical exponents, barrier certificates and dichotomy sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue, Hardy constant and critical exponents of a cone problem.
    Exponents(ExponentsArgs),
    /// First cap eigenvalue as a function of the cap angle.
    EigenCurve(EigenCurveArgs),
    /// Run one barrier certifier and print its JSON report.
    Certify(CertifyArgs),
    /// Sweep over (c, p) and write CSV and SVG.
    Sweep(SweepArgs),
    /// Discrete Rayleigh minima on widening shells.
    HardyCheck(HardyCheckArgs),
}

#[derive(Args)]
struct ExponentsArgs {
    #[arg(long = "N")]
    n: usize,
    /// `hemisphere`, `sphere`, or a cap angle in radians.
    #[arg(long, default_value = "hemisphere")]
    cap: String,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s: f64,
}

#[derive(Args)]
struct EigenCurveArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value_t = 0.25 * std::f64::consts::PI)]
    theta_min: f64,
    #[arg(long, default_value_t = 0.75 * std::f64::consts::PI)]
    theta_max: f64,
    #[arg(long, default_value_t = 21)]
    count: usize,
    /// `none`, `subcap:THETA1:VALUE` or `cosine:C:AMP:EXPONENT`.
    #[arg(long, default_value = "none")]
    v: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Prop32,
    Prop44,
    Lemma43,
    FlatBarrier,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(value_enum)]
    target: Target,
    #[arg(long = "N")]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Log exponent `a` of the barrier.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Tilt `K` of the flat barrier.
    #[arg(long = "K", allow_negative_numbers = true)]
    k_tilt: Option<f64>,
    /// Codimension of the circle tube.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// `const:VALUE` or `dip:AMPLITUDE:ORDER`.
    #[arg(long, default_value = "const:1")]
    q: String,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    circle_radius: f64,
    /// Smallest radius of the prop32 grid.
    #[arg(long)]
    floor: Option<f64>,
    /// Number of sample points for flat-barrier.
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// `hemisphere`, `sphere`, a cap angle, or `tube`.
    #[arg(long)]
    cap: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    c_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c_max: Option<f64>,
    #[arg(long)]
    c_count: Option<usize>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    p_count: Option<usize>,
    #[arg(long)]
    no_certify: bool,
    #[arg(long)]
    no_zeta0: bool,
    #[arg(long)]
    radius_floor: Option<f64>,
    #[arg(long)]
    per_decade: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Hardy,
    Improved,
}

#[derive(Args)]
struct HardyCheckArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value = "hemisphere")]
    cap: String,
    #[arg(long, value_enum, default_value = "hardy")]
    weight: WeightArg,
    /// Inner radii `2^{-j}`.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12")]
    shells: Vec<u32>,
    #[arg(long, default_value_t = 0.5)]
    r1: f64,
    #[arg(long, default_value_t = 4096)]
    per_decade: usize,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Regime(String),
    Io(String),
    Other(String),
}

impl From<HardyError> for Failure {
    fn from(e: HardyError) -> Self {
        match e {
            HardyError::AboveHardyConstant { .. } | HardyError::Domain(_) | HardyError::Precondition(_) => {
                Failure::Regime(e.to_string())
            }
            HardyError::Config(_) => Failure::Usage(e.to_string()),
            HardyError::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn parse_cone(s: &str) -> Result<ConeSpec, Failure> {
    match s {
        "hemisphere" => Ok(ConeSpec::hemisphere()),
        "sphere" => Ok(ConeSpec::FullSphere),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && *t < std::f64::consts::PI)
            .map(|theta0| ConeSpec::Cap { theta0 })
            .ok_or_else(|| Failure::Usage(format!("--cap expects hemisphere, sphere or an angle in (0, π), got {other}"))),
    }
}

fn parse_fields(s: &str, name: &str, count: usize) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').skip(1).collect();
    let vals: Option<Vec<f64>> = parts.iter().map(|p| p.parse().ok()).collect();
    match vals {
        Some(v) if v.len() == count => Ok(v),
        _ => Err(Failure::Usage(format!("--{name}: cannot parse {s}"))),
    }
}

fn parse_v(s: &str) -> Result<Option<AngularWeight>, Failure> {
    match s.split(':').next().unwrap_or_default() {
        "none" => Ok(None),
        "subcap" => {
            let v = parse_fields(s, "v", 2)?;
            Ok(Some(AngularWeight::subcap_indicator(v[0], v[1])))
        }
        "cosine" => {
            let v = parse_fields(s, "v", 3)?;
            Ok(Some(AngularWeight::cosine_power(v[0], v[1], v[2])))
        }
        _ => Err(Failure::Usage(format!("--v: unknown weight {s}"))),
    }
}

fn parse_q(s: &str) -> Result<TubeWeight, Failure> {
    match s.split(':').next().unwrap_or_default() {
        "const" => Ok(TubeWeight::Constant(parse_fields(s, "q", 1)?[0])),
        "dip" => {
            let v = parse_fields(s, "q", 2)?;
            Ok(TubeWeight::PowerDip {
                amplitude: v[0],
                order: v[1],
            })
        }
        _ => Err(Failure::Usage(format!("--q: unknown weight {s}"))),
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_exponents(a: ExponentsArgs) -> Outcome {
    let cone = parse_cone(&a.cap)?;
    let problem = HardyProblem { s: a.s, ..HardyProblem::new(a.n, a.c, cone) };
    let rep = exponent_report(&problem)?;
    println!("{}", to_json(&rep));
    if !rep.flags.c_at_most_mu {
        eprintln!(
            "c = {} exceeds the Hardy constant mu = {}: no nonnegative nontrivial supersolution exists",
            a.c, rep.mu
        );
        return Ok(EXIT_REGIME);
    }
    if !rep.flags.c_above_lambda1 {
        eprintln!("c = {} does not exceed lambda1 = {}: outside the studied regime", a.c, rep.lambda1);
        return Ok(EXIT_REGIME);
    }
    Ok(0)
}

fn cmd_eigen_curve(a: EigenCurveArgs) -> Outcome {
    let v = parse_v(&a.v)?;
    let range = ParamRange::new(a.theta_min, a.theta_max, a.count)?;
    let rows = eigen_curve(a.n, &range, v.as_ref())?;
    let csv = xy_csv(("theta0", "lambda1"), &rows);
    match &a.out {
        Some(p) => write_file(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &a.plot {
        write_file(p, &eigen_curve_svg(&rows))?;
    }
    if let Some(&(_, l)) = rows.iter().find(|(t, _)| *t == FRAC_PI_2) {
        eprintln!("hemisphere: lambda1 = {l}");
    }
    Ok(0)
}

fn cmd_certify(a: CertifyArgs) -> Outcome {
    let rep: ResidualReport = match a.target {
        Target::Prop32 => {
            let c = require(a.c, "c")?;
            let p = require(a.p, "p")?;
            certify_prop32(a.n, c, p, CERT_RADIUS, &prop32_grid(a.floor))?
        }
        Target::Prop44 => {
            let p = require(a.p, "p")?;
            let tube = TubeSpec::new(a.n, a.k, a.circle_radius, a.beta, parse_q(&a.q)?)?;
            certify_prop44(&tube, p, a.beta, &prop44_samples())?
        }
        Target::Lemma43 => {
            let tube = TubeSpec::new(a.n, a.k, a.circle_radius, a.beta, parse_q(&a.q)?)?;
            let phi = tube.weight.max_points().first().copied().unwrap_or(0.0);
            let samples: Vec<TubeSample> = (0..=12)
                .map(|i| TubeSample::new(phi, 10f64.powf(-3.0 - 0.25 * i as f64), 1.0))
                .collect();
            let spec = TubeBarrierSpec::new(tube, a.a.unwrap_or(0.0));
            verify_lemma43(&spec, &samples, 1e-2)?
        }
        Target::FlatBarrier => {
            let c = require(a.c, "c")?;
            let spec = BarrierSpec::new(a.n, c, a.a.unwrap_or(0.0), a.k_tilt.unwrap_or(0.0))?;
            certify_flat_barrier(&spec, &flat_sample_points(a.n, a.points), 3e-3)?
        }
    };
    let json = to_json(&rep);
    match &a.out {
        Some(p) => write_file(p, &json)?,
        None => println!("{json}"),
    }
    Ok(if rep.passed() { 0 } else { EXIT_FAIL })
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            SweepConfig::from_toml_str(&text)?
        }
        None => {
            let n = require(a.n, "N (or --config)")?;
            let c = ParamRange {
                min: require(a.c_min, "c-min")?,
                max: require(a.c_max, "c-max")?,
                count: a.c_count.unwrap_or(20),
            };
            let p = ParamRange {
                min: require(a.p_min, "p-min")?,
                max: require(a.p_max, "p-max")?,
                count: a.p_count.unwrap_or(20),
            };
            SweepConfig::new(n, SweepGeometry::default(), c, p)
        }
    };
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(cap) = &a.cap {
        cfg.geometry = if cap == "tube" {
            SweepGeometry::Tube {
                k: 1,
                circle_radius: 1.0,
                beta: 0.5,
            }
        } else {
            SweepGeometry::Cone { cone: parse_cone(cap)? }
        };
    }
    macro_rules! set {
        ($field:expr, $v:expr) => {
            if let Some(v) = $v {
                $field = v;
            }
        };
    }
    set!(cfg.c.min, a.c_min);
    set!(cfg.c.max, a.c_max);
    set!(cfg.c.count, a.c_count);
    set!(cfg.p.min, a.p_min);
    set!(cfg.p.max, a.p_max);
    set!(cfg.p.count, a.p_count);
    cfg.certify &= !a.no_certify;
    cfg.zeta0 &= !a.no_zeta0;
    if a.radius_floor.is_some() {
        cfg.radius_floor = a.radius_floor;
    }
    if a.per_decade.is_some() {
        cfg.per_decade = a.per_decade;
    }
    if a.threads.is_some() {
        cfg.threads = a.threads;
    }
    if a.out.is_some() {
        cfg.out = a.out.clone();
    }
    if a.plot.is_some() {
        cfg.plot = a.plot.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(a: SweepArgs) -> Outcome {
    let cfg = sweep_config(&a)?;
    let result = run_sweep(&cfg)?;
    let csv = sweep_csv(&result);
    match &cfg.out {
        Some(p) => write_file(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &cfg.plot {
        write_file(p, &sweep_svg(&result))?;
    }
    Ok(0)
}

fn cmd_hardy_check(a: HardyCheckArgs) -> Outcome {
    let cone = parse_cone(&a.cap)?;
    let weight = match a.weight {
        WeightArg::Hardy => HardyWeight::Hardy,
        WeightArg::Improved => HardyWeight::Improved,
    };
    let table = hardy_check(a.n, &cone, weight, &a.shells, a.r1, a.per_decade)?;
    if a.json {
        println!("{}", to_json(&table));
    } else {
        print!("{}", table.to_text());
        match weight {
            HardyWeight::Hardy => {
                if let Some(l) = table.limit() {
                    println!("extrapolated limit {l:.12} vs mu {:.12}", table.mu);
                }
            }
            HardyWeight::Improved => {
                let m = table.rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
                println!("positivity margin {m:.12}");
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Exponents(a) => cmd_exponents(a),
        Command::EigenCurve(a) => cmd_eigen_curve(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::HardyCheck(a) => cmd_hardy_check(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Regime(m) => (EXIT_REGIME, m),
                Failure::Io(m) => (EXIT_IO, m),
                Failure::Other(m) => (EXIT_FAIL, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
