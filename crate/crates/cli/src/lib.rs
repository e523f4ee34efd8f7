//! Command-line front end for `spectra-core`.

pub mod expr;
pub mod record;

use std::ffi::OsString;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spectra_core::bounds::{self, BoundReport, CurvatureData, TrichotomyFlags};
use spectra_core::comparison::{self, SolverConfig};
use spectra_core::discrete::{self, DEFAULT_GRID_N};
use spectra_core::model_spectra::{self, ModelParams};
use spectra_core::transport::{self, Lipschitz};
use spectra_core::{
    CustomPotential, Direction, Error, Grid1D, MeasureSpec1D, Spectrum, TransportMap1D,
};

use record::{Cell, OutputRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPARISON_FAILED: i32 = 3;

const CSV_HELP: &str = "\
CSV columns: spectra `k,value,mult,exact`; bounds `name,value,valid,reason`; \
every table ends with a `provenance` column. See FORMATS.md.";

#[derive(Parser, Debug)]
#[command(name = "spectra", version, about = "Spectra, transport maps and spectral bounds", after_help = CSV_HELP)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact eigenvalues of a model space.
    Spectrum(SpectrumArgs),
    /// Eigenvalue counting function `#{lambda_k <= lambda}`.
    Count(CountArgs),
    /// Discretized eigenvalues of a one-dimensional weighted measure.
    Solve1d(Solve1dArgs),
    /// Monotone transport map between two one-dimensional measures.
    Transport(TransportArgs),
    /// Flat isoperimetric profile `f(F^-1(v))`.
    Profile(ProfileArgs),
    /// Closed-form spectral and heat-trace bounds.
    Bound(BoundArgs),
    /// Heat trace `Z(t) = sum exp(-t lambda_k)`.
    Trace(TraceArgs),
    /// Eigenvalue or heat-trace comparison checks (exit 3 on violation).
    Compare(CompareArgs),
    /// `lambda_{n+2}` of the unit-curvature sphere against the Gaussian.
    Counterexample(CounterexampleArgs),
    /// Heat-kernel integrability scenario.
    Classify(ClassifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Gaussian,
    Sphere,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 10)]
    pub kmax: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountModel {
    Gaussian,
    Sphere,
    /// Lower bound for the unit-curvature sphere, valid for lambda >= n^2.
    SphereLower,
    /// Leading Weyl term for `exp(-|x|^p)` product measures.
    NuP,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long, value_enum)]
    pub model: CountModel,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambda: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Dirichlet Schrodinger operator after the ground-state transform.
    Schrodinger,
    /// Weighted Rayleigh quotient with natural boundary conditions.
    Neumann,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Interior grid points.
    #[arg(long, env = "SPECTRA_GRID_N", default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
}

#[derive(Args, Debug)]
pub struct Solve1dArgs {
    /// `gaussian:RHO`, `exp-power:P` or `potential:EXPR` (EXPR in x).
    #[arg(long)]
    pub measure: String,
    /// Left end of the interval (default: truncation of the measure).
    #[arg(long, allow_negative_numbers = true, requires = "b")]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "a")]
    pub b: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    #[arg(long, value_enum, default_value_t = Method::Schrodinger)]
    pub method: Method,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionArg {
    Increasing,
    Decreasing,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Increasing => Direction::Increasing,
            DirectionArg::Decreasing => Direction::Decreasing,
        }
    }
}

#[derive(Args, Debug)]
pub struct TransportArgs {
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub target: String,
    #[arg(long, value_enum, default_value_t = DirectionArg::Increasing)]
    pub direction: DirectionArg,
    /// Report only the best Lipschitz constant of the map.
    #[arg(long)]
    pub lipschitz: bool,
    /// Explicit evaluation points (overrides --from/--to/--points).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = -3.0)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
    pub to: f64,
    #[arg(long, default_value_t = 13)]
    pub points: usize,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[arg(long)]
    pub measure: String,
    /// Levels in (0, 1) (default: 0.1, 0.2, ..., 0.9).
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundName {
    Harnack,
    ClrCount,
    ClrEigen,
    ZUpper,
    Wang,
    TraceLower,
    Hyper,
    HyperConvert,
    LpBall,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub name: BoundName,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Log-Sobolev constant L.
    #[arg(long)]
    pub lsob: Option<f64>,
    /// Log-Sobolev defect B.
    #[arg(long, default_value_t = 0.0)]
    pub defect: f64,
    /// Second moment of the distance to a base point.
    #[arg(long)]
    pub m2: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Heat trace value for `trace-lower`.
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    /// Exact model (use --measure for a discretized spectrum instead).
    #[arg(long, value_enum, conflicts_with = "measure")]
    pub model: Option<Model>,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long)]
    pub measure: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 50)]
    pub kmax: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMode {
    /// `lambda_k(target) >= lambda_k(source) / L^2` from two solver runs.
    Ordering,
    /// Heat trace of a sphere against a shifted copy (or itself).
    SphereTrace,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long, value_enum, default_value_t = CompareMode::Ordering)]
    pub mode: CompareMode,
    #[arg(long, required_if_eq("mode", "ordering"))]
    pub source: Option<String>,
    #[arg(long, required_if_eq("mode", "ordering"))]
    pub target: Option<String>,
    /// Lipschitz constant of the map (default: from the profiles).
    #[arg(long)]
    pub lipschitz: Option<f64>,
    #[arg(long, default_value_t = comparison::DEFAULT_K_MAX)]
    pub kmax: usize,
    #[arg(long, default_value_t = comparison::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Sphere dimension for `sphere-trace`.
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,5")]
    pub t: Vec<f64>,
    /// Shift every sphere eigenvalue by this amount before comparing.
    #[arg(long)]
    pub shift: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Report every dimension from --n up to this one.
    #[arg(long)]
    pub n_max: Option<u32>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Exponent of `exp(-|x|^p)`; `inf` for the uniform cube.
    #[arg(long, conflicts_with_all = ["discrete", "hilbert_schmidt", "hyperbounded"])]
    pub p: Option<f64>,
    #[arg(long)]
    pub discrete: bool,
    #[arg(long)]
    pub hilbert_schmidt: bool,
    #[arg(long)]
    pub hyperbounded: bool,
}

/// Failure of a subcommand, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BisectionFailed { .. }
            | Error::QuadratureFailed { .. }
            | Error::WeightUnderflow { .. } => EXIT_RUNTIME,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<OutputRecord, Failure>;

/// Captured result of one invocation.
#[derive(Debug)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Invocation {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(rec) => {
            let mut stderr = String::new();
            for w in &rec.warnings {
                stderr.push_str(&format!("warning: {w}\n"));
            }
            let stdout = match cli.format {
                Format::Csv => {
                    for (k, v) in &rec.summary {
                        stderr.push_str(&format!("{k}: {}\n", v.csv()));
                    }
                    rec.to_csv()
                }
                Format::Json => rec.to_json(),
            };
            let code = if rec.passed == Some(false) {
                EXIT_COMPARISON_FAILED
            } else {
                EXIT_OK
            };
            Invocation {
                code,
                stdout,
                stderr,
            }
        }
        Err(f) => Invocation {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

pub fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Spectrum(a) => spectrum(a),
        Command::Count(a) => count(a),
        Command::Solve1d(a) => solve1d(a),
        Command::Transport(a) => transport_cmd(a),
        Command::Profile(a) => profile(a),
        Command::Bound(a) => bound(a),
        Command::Trace(a) => trace(a),
        Command::Compare(a) => compare(a),
        Command::Counterexample(a) => counterexample(a),
        Command::Classify(a) => classify(a),
    }
}

/// Parses `gaussian:RHO`, `exp-power:P` or `potential:EXPR`.
pub fn parse_measure(s: &str) -> std::result::Result<MeasureSpec1D, Failure> {
    let (kind, arg) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("measure '{s}' must look like KIND:ARG")))?;
    let number = |arg: &str| {
        arg.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("'{arg}' is not a number in measure '{s}'")))
    };
    Ok(match kind {
        "gaussian" => MeasureSpec1D::gaussian(number(arg)?)?,
        "exp-power" => MeasureSpec1D::exp_power(number(arg)?)?,
        "potential" => {
            let e = expr::parse(arg).map_err(|err| usage(format!("potential '{arg}': {err}")))?;
            let d1 = e.derivative();
            let d2 = d1.derivative();
            let (e, d1, d2) = (Arc::new(e), Arc::new(d1), Arc::new(d2));
            MeasureSpec1D::custom(CustomPotential {
                label: arg.trim().to_string(),
                v: Arc::new(move |x| e.eval(x)),
                dv: Arc::new(move |x| d1.eval(x)),
                d2v: Arc::new(move |x| d2.eval(x)),
            })?
        }
        other => {
            return Err(usage(format!(
                "unknown measure kind '{other}' (gaussian, exp-power, potential)"
            )))
        }
    })
}

const PROV_GAUSS: &str = "gaussian: lambda = rho*l, mult C(n-1+l,l)";
const PROV_SPHERE: &str = "sphere: lambda = m(m+n-1)rho/(n-1), mult C(n+m,m)-C(n+m-2,m-2)";

fn spectrum_rows(rec: &mut OutputRecord, s: &Spectrum, k_max: u64, provenance: &str) {
    let mut k = 0u64;
    'outer: for e in s.entries() {
        for _ in 0..e.mult {
            if k == k_max {
                break 'outer;
            }
            k += 1;
            rec.push(
                vec![k.into(), e.value.into(), e.mult.into(), s.is_exact().into()],
                provenance,
            );
        }
    }
}

fn spectrum(a: &SpectrumArgs) -> Outcome {
    let params = ModelParams::new(a.n, a.rho)?;
    let (s, prov) = match a.model {
        Model::Gaussian => (
            model_spectra::gaussian_spectrum(params, a.kmax)?,
            PROV_GAUSS,
        ),
        Model::Sphere => (model_spectra::sphere_spectrum(params, a.kmax)?, PROV_SPHERE),
    };
    let mut rec = OutputRecord::new("spectrum", &["k", "value", "mult", "exact"]);
    rec.input("model", format!("{:?}", a.model).to_lowercase())
        .input("n", a.n)
        .input("rho", a.rho)
        .input("kmax", a.kmax);
    spectrum_rows(&mut rec, &s, a.kmax, prov);
    Ok(rec)
}

fn count(a: &CountArgs) -> Outcome {
    let mut rec = OutputRecord::new("count", &["lambda", "count", "kind"]);
    rec.input("model", format!("{:?}", a.model).to_lowercase())
        .input("n", a.n)
        .input("rho", a.rho)
        .input("p", a.p);
    let params = ModelParams::new(a.n, a.rho)?;
    for &lambda in &a.lambda {
        let (c, prov) = match a.model {
            CountModel::Gaussian => (
                model_spectra::gaussian_count(params, lambda)?,
                "gaussian count C(n+l,l), l = floor(lambda/rho)",
            ),
            CountModel::Sphere => (
                model_spectra::sphere_count(params, lambda)?,
                "sphere count C(n+m,m)+C(n+m-1,m-1)",
            ),
            CountModel::SphereLower => (
                model_spectra::sphere_count_lower(a.n, lambda)?,
                "unit-curvature sphere count lower bound, lambda >= n^2",
            ),
            CountModel::NuP => {
                let p = a.p.ok_or_else(|| usage("--p is required for nu-p"))?;
                (
                    model_spectra::nu_p_weyl_count(params.with_p(p)?, lambda)?,
                    "weyl leading term c_{n,p} lambda^{(n/2) p/(p-1)}",
                )
            }
        };
        let kind = serde_json::to_value(c.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let count_cell = match c.exact_count() {
            Some(i) => Cell::Int(i),
            None => c.count.into(),
        };
        rec.push(vec![lambda.into(), count_cell, kind.into()], prov);
    }
    Ok(rec)
}

fn solver_grid(
    spec: &MeasureSpec1D,
    a: Option<f64>,
    b: Option<f64>,
    n: usize,
) -> std::result::Result<Grid1D, Failure> {
    Ok(match (a, b) {
        (Some(a), Some(b)) => Grid1D::new(a, b, n)?,
        _ => Grid1D::for_measure(spec, n)?,
    })
}

fn solve_measure(
    spec: &MeasureSpec1D,
    grid: &Grid1D,
    k: usize,
    method: Method,
) -> std::result::Result<Spectrum, Failure> {
    Ok(match method {
        Method::Schrodinger => {
            let w = discrete::h_transform_potential(spec, grid)?;
            discrete::solve_schrodinger_dirichlet(&w, k)?
        }
        Method::Neumann => discrete::solve_weighted_neumann(spec, grid, k)?,
    })
}

fn solve1d(a: &Solve1dArgs) -> Outcome {
    let spec = parse_measure(&a.measure)?;
    let grid = solver_grid(&spec, a.a, a.b, a.grid.grid_n)?;
    let s = solve_measure(&spec, &grid, a.kmax, a.method)?;
    let mut rec = OutputRecord::new("solve1d", &["k", "value", "mult", "exact"]);
    rec.input("measure", spec.label())
        .input("a", grid.a())
        .input("b", grid.b())
        .input("grid_n", grid.n())
        .input("kmax", a.kmax)
        .input("method", format!("{:?}", a.method).to_lowercase());
    if a.kmax * 100 > grid.n() {
        rec.warn(format!(
            "kmax = {} exceeds N/100 = {}; high eigenvalues lose accuracy",
            a.kmax,
            grid.n() / 100
        ));
    }
    if let Some(note) = s.truncation_note() {
        rec.warn(note.to_string());
    }
    let prov = match a.method {
        Method::Schrodinger => {
            "finite differences: -f'' + (V'^2/4 - V''/2) f, Dirichlet, Sturm bisection"
        }
        Method::Neumann => {
            "finite differences: weighted Rayleigh quotient, natural boundary, Sturm bisection"
        }
    };
    // discrete eigenvalues are reported one per index
    for (k, v) in s.values().enumerate() {
        rec.push(
            vec![(k as u64 + 1).into(), v.into(), 1u64.into(), false.into()],
            prov,
        );
    }
    Ok(rec)
}

fn transport_cmd(a: &TransportArgs) -> Outcome {
    let source = parse_measure(&a.source)?;
    let target = parse_measure(&a.target)?;
    let dir: Direction = a.direction.into();
    let mut map = TransportMap1D::new(source.clone(), target.clone(), dir);
    if a.lipschitz {
        let mut rec = OutputRecord::new(
            "transport",
            &["lipschitz", "bounded", "argmax_level", "endpoint"],
        );
        rec.input("source", source.label())
            .input("target", target.label())
            .input("direction", format!("{:?}", a.direction).to_lowercase());
        let prov = "sup of profile ratio I_source(v)/I_target(v)";
        match map.lipschitz()? {
            Lipschitz::Finite {
                value,
                argmax_level,
            } => rec.push(
                vec![value.into(), true.into(), argmax_level.into(), Cell::Null],
                prov,
            ),
            Lipschitz::Unbounded { endpoint } => rec.push(
                vec![
                    f64::INFINITY.into(),
                    false.into(),
                    Cell::Null,
                    format!("{endpoint:?}").to_lowercase().into(),
                ],
                prov,
            ),
        }
        return Ok(rec);
    }
    let xs: Vec<f64> = if a.x.is_empty() {
        if a.points < 2 || !(a.from < a.to) {
            return Err(usage("need --points >= 2 and --from < --to"));
        }
        (0..a.points)
            .map(|i| a.from + (a.to - a.from) * i as f64 / (a.points - 1) as f64)
            .collect()
    } else {
        a.x.clone()
    };
    let mut rec = OutputRecord::new("transport", &["x", "map", "derivative", "residual"]);
    rec.input("source", source.label())
        .input("target", target.label())
        .input("direction", format!("{:?}", a.direction).to_lowercase());
    for x in xs {
        rec.push(
            vec![
                x.into(),
                map.eval(x)?.into(),
                map.derivative(x)?.into(),
                map.push_forward_residual(x)?.into(),
            ],
            "T = G^-1 o F, T' = f(x)/g(T(x))",
        );
    }
    Ok(rec)
}

fn profile(a: &ProfileArgs) -> Outcome {
    let spec = parse_measure(&a.measure)?;
    let levels = if a.levels.is_empty() {
        (1..10).map(|i| i as f64 / 10.0).collect()
    } else {
        a.levels.clone()
    };
    let mut rec = OutputRecord::new("profile", &["v", "profile"]);
    rec.input("measure", spec.label());
    for v in levels {
        rec.push(
            vec![v.into(), transport::flat_profile(&spec, v)?.into()],
            "I(v) = f(F^-1(v))",
        );
    }
    Ok(rec)
}

fn need<T: Copy>(v: Option<T>, flag: &str, name: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| usage(format!("--{flag} is required for bound {name}")))
}

fn bound_rows(rec: &mut OutputRecord, r: &BoundReport, prov: &str) {
    let value = match r.value {
        bounds::BoundValue::Finite(v) => v.into(),
        bounds::BoundValue::Unbounded => Cell::Text("unbounded".into()),
        bounds::BoundValue::Empty => Cell::Null,
    };
    rec.push(
        vec![
            r.name.clone().into(),
            value,
            r.valid.into(),
            r.reason.clone().into(),
        ],
        prov,
    );
    for (k, v) in &r.extras {
        rec.push(
            vec![
                format!("{}.{k}", r.name).into(),
                (*v).into(),
                true.into(),
                Cell::Null,
            ],
            prov,
        );
    }
    for note in &r.notes {
        rec.warn(note.clone());
    }
}

fn bound(a: &BoundArgs) -> Outcome {
    let mut rec = OutputRecord::new("bound", &["name", "value", "valid", "reason"]);
    let label = format!("{:?}", a.name);
    for (k, v) in [
        ("rho", a.rho),
        ("lsob", a.lsob),
        ("m2", a.m2),
        ("t", a.t),
        ("lambda", a.lambda),
        ("p", a.p),
        ("z", a.z),
        ("q0", a.q0),
        ("beta0", a.beta0),
    ] {
        if let Some(v) = v {
            rec.input(k, v);
        }
    }
    if a.defect != 0.0 {
        rec.input("defect", a.defect);
    }
    if let Some(n) = a.n {
        rec.input("n", n);
    }
    if let Some(k) = a.k {
        rec.input("k", k);
    }
    let curvature = || -> std::result::Result<CurvatureData, Failure> {
        Ok(CurvatureData::with_defect(
            need(a.rho, "rho", &label)?,
            need(a.lsob, "lsob", &label)?,
            a.defect,
            need(a.m2, "m2", &label)?,
        )?)
    };
    let simple = |rec: &mut OutputRecord, name: &str, v: f64, prov: &str| {
        rec.push(vec![name.into(), v.into(), true.into(), Cell::Null], prov);
    };
    match a.name {
        BoundName::Harnack => {
            let (rho, t) = (need(a.rho, "rho", &label)?, need(a.t, "t", &label)?);
            simple(
                &mut rec,
                "harnack",
                bounds::harnack_factor(rho, t),
                "h(rho,t) = 2 rho t / (exp(2 rho t) - 1)",
            );
        }
        BoundName::ClrCount => {
            let r = bounds::clr_count_bound(
                need(a.n, "n", &label)?,
                need(a.rho, "rho", &label)?,
                need(a.lambda, "lambda", &label)?,
            )?;
            bound_rows(
                &mut rec,
                &r,
                "N(lambda) <= e^{n/2} (C lambda + 1)^{n/2}, C = 4(n-1)/(n(n-2)rho)",
            );
        }
        BoundName::ClrEigen => {
            let r = bounds::clr_eigen_comparison(need(a.n, "n", &label)?, need(a.k, "k", &label)?)?;
            bound_rows(
                &mut rec,
                &r,
                "lambda_k(M) >= (1-2/n)/(5e) lambda_k(sphere), k >= 6(5e)^{n/2}",
            );
        }
        BoundName::ZUpper => {
            let r = bounds::z_upper_bound(curvature()?, need(a.t, "t", &label)?)?;
            bound_rows(
                &mut rec,
                &r,
                "Z(t) <= exp(2s/(1-2s/L) m2), s = h(rho,t/2)/(t/2)",
            );
        }
        BoundName::Wang => {
            let r = bounds::eigen_lower_bound_wang(curvature()?, need(a.k, "k", &label)?)?;
            bound_rows(&mut rec, &r, "lambda_k >= sup_t (log k - 2s/(1-2s/L) m2)/t");
        }
        BoundName::TraceLower => {
            let v = bounds::eigen_lower_from_trace(
                need(a.k, "k", &label)?,
                need(a.z, "z", &label)?,
                need(a.t, "t", &label)?,
            )?;
            simple(
                &mut rec,
                "trace-lower",
                v,
                "lambda_k >= (log k - log Z(t))/t",
            );
        }
        BoundName::Hyper => {
            let (q, beta) = bounds::hyper_q_beta(
                need(a.lsob, "lsob", &label)?,
                a.defect,
                need(a.p, "p", &label)?,
                need(a.t, "t", &label)?,
            )?;
            let prov = "q = 1+(p-1)e^{2tL}, beta = B(1/p-1/q)";
            simple(&mut rec, "hyper.q", q, prov);
            simple(&mut rec, "hyper.beta", beta, prov);
        }
        BoundName::HyperConvert => {
            let (l, b) = bounds::hyper_params_from_single_time(
                need(a.t, "t", &label)?,
                need(a.q0, "q0", &label)?,
                need(a.beta0, "beta0", &label)?,
            )?;
            let prov = "L = (q0-2)/(2 q0 t0), B = beta0/(t0 L)";
            simple(&mut rec, "hyper-convert.lsob", l, prov);
            simple(&mut rec, "hyper-convert.defect", b, prov);
        }
        BoundName::LpBall => {
            let v = bounds::lp_ball_eigen_bound(need(a.n, "n", &label)?, need(a.k, "k", &label)?)?;
            simple(
                &mut rec,
                "lp-ball",
                v,
                "lambda_k(l_p ball) >= lambda_k(gaussian)/392",
            );
        }
    }
    Ok(rec)
}

fn trace(a: &TraceArgs) -> Outcome {
    let mut rec = OutputRecord::new(
        "trace",
        &["t", "value", "partial", "tail", "lower_estimate"],
    );
    let (s, prov) = match (&a.model, &a.measure) {
        (Some(m), None) => {
            let params = ModelParams::new(a.n, a.rho)?;
            rec.input("model", format!("{m:?}").to_lowercase())
                .input("n", a.n)
                .input("rho", a.rho);
            match m {
                Model::Gaussian => (
                    model_spectra::gaussian_spectrum(params, a.kmax)?,
                    "partial sum + closed-form tail (1-e^{-rho t})^{-n}",
                ),
                Model::Sphere => (
                    model_spectra::sphere_spectrum(params, a.kmax)?,
                    "partial sum + closed-form sphere tail",
                ),
            }
        }
        (None, Some(m)) => {
            let spec = parse_measure(m)?;
            let grid = Grid1D::for_measure(&spec, a.grid.grid_n)?;
            rec.input("measure", spec.label()).input("grid_n", grid.n());
            (
                solve_measure(&spec, &grid, a.kmax as usize, Method::Neumann)?,
                "partial sum over discretized eigenvalues",
            )
        }
        _ => return Err(usage("give exactly one of --model or --measure")),
    };
    rec.input("kmax", a.kmax);
    for &t in &a.t {
        let z = discrete::heat_trace(&s, t)?;
        rec.push(
            vec![
                t.into(),
                z.value().into(),
                z.partial.into(),
                z.tail.into(),
                z.is_lower_estimate().into(),
            ],
            prov,
        );
    }
    Ok(rec)
}

fn compare(a: &CompareArgs) -> Outcome {
    let mut rec = OutputRecord::new("compare", &["k", "lhs", "rhs", "margin", "violation"]);
    rec.input("mode", format!("{:?}", a.mode).to_lowercase())
        .input("tol", a.tol);
    let (report, prov) = match a.mode {
        CompareMode::Ordering => {
            let source = parse_measure(a.source.as_deref().unwrap_or_default())?;
            let target = parse_measure(a.target.as_deref().unwrap_or_default())?;
            rec.input("source", source.label())
                .input("target", target.label())
                .input("kmax", a.kmax)
                .input("grid_n", a.grid.grid_n)
                .input("lipschitz", a.lipschitz);
            let cfg = SolverConfig {
                grid_n: a.grid.grid_n,
                ..SolverConfig::default()
            };
            let report = match a.lipschitz {
                Some(l) => comparison::check_contraction_ordering_with(
                    &source, &target, l, a.kmax, a.tol, cfg,
                )?,
                None => {
                    comparison::check_profile_ordering_with(&source, &target, a.kmax, a.tol, cfg)?
                }
            };
            (report, "lambda_k(target) >= lambda_k(source)/L^2 (1 - tol)")
        }
        CompareMode::SphereTrace => {
            rec.input("n", a.n)
                .input("rho", a.rho)
                .input("shift", a.shift);
            let params = ModelParams::new(a.n, a.rho)?;
            let shifted = match a.shift {
                Some(d) => {
                    Some(model_spectra::sphere_spectrum(params, a.kmax.max(1) as u64)?.shifted(d)?)
                }
                None => None,
            };
            (
                comparison::berard_gallot_trace_check(a.n, a.rho, &a.t, shifted.as_ref(), a.tol)?,
                "Z_M(t) <= Z_sphere(t), k = index into the t grid",
            )
        }
    };
    if let Some(l) = report.lipschitz {
        match l {
            Lipschitz::Finite {
                value,
                argmax_level,
            } => {
                rec.summarize("lipschitz", value)
                    .summarize("lipschitz_argmax_level", argmax_level);
            }
            Lipschitz::Unbounded { endpoint } => {
                rec.summarize("lipschitz", f64::INFINITY)
                    .summarize("lipschitz_endpoint", format!("{endpoint:?}").to_lowercase());
            }
        }
    }
    rec.summarize("k_checked", report.k_checked)
        .summarize("violations", report.violations.len());
    for row in &report.rows {
        let violated = report.violations.iter().any(|v| v.k == row.k);
        rec.push(
            vec![
                row.k.into(),
                row.lhs.into(),
                row.rhs.into(),
                row.margin.into(),
                violated.into(),
            ],
            prov,
        );
    }
    for w in &report.warnings {
        rec.warn(w.clone());
    }
    rec.passed = Some(report.passed);
    Ok(rec)
}

fn counterexample(a: &CounterexampleArgs) -> Outcome {
    let hi = a.n_max.unwrap_or(a.n);
    if hi < a.n {
        return Err(usage("--n-max must be at least --n"));
    }
    let mut rec = OutputRecord::new(
        "counterexample",
        &[
            "n",
            "sphere",
            "gaussian",
            "sphere_fraction",
            "strictly_smaller",
        ],
    );
    rec.input("n", a.n).input("n_max", hi);
    for n in a.n..=hi {
        let (s, g) = comparison::sphere_gaussian_counterexample(n)?;
        let (num, den) = model_spectra::sphere_eigenvalue_ratio(n, 1);
        rec.push(
            vec![
                n.into(),
                s.into(),
                g.into(),
                format!("{num}/{den}").into(),
                (s < g).into(),
            ],
            "lambda_{n+2}: sphere n/(n-1) vs gaussian 2",
        );
    }
    Ok(rec)
}

fn classify(a: &ClassifyArgs) -> Outcome {
    let mut rec = OutputRecord::new(
        "classify",
        &[
            "scenario",
            "discrete",
            "hilbert_schmidt",
            "hyperbounded",
            "warning",
        ],
    );
    let flags = match a.p {
        Some(p) => {
            rec.input("p", p);
            bounds::nu_p_flags(p)?
        }
        None => TrichotomyFlags {
            has_discrete_spectrum: a.discrete,
            eventually_hilbert_schmidt: a.hilbert_schmidt,
            eventually_hyperbounded: a.hyperbounded,
        },
    };
    let c = bounds::classify_trichotomy(flags);
    rec.push(
        vec![
            (c.scenario.number() as u64).into(),
            flags.has_discrete_spectrum.into(),
            flags.eventually_hilbert_schmidt.into(),
            flags.eventually_hyperbounded.into(),
            c.warning.into(),
        ],
        "1: never Hilbert-Schmidt; 2: Hilbert-Schmidt only; 3: also hyperbounded",
    );
    Ok(rec)
}
