mod cache;
mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use cyclotrace::verify::{run_suite, Suite, VerifyOptions};
use cyclotrace::{Classify, FailureKind};
use serde_json::{json, Value};

use cache::{canonical_params, params_hash, Cache};
use commands::*;
use config::Config;

/// Cycle-integral traces, Poincaré series and mock-modular coefficients.
#[derive(Parser)]
#[command(name = "cyclotrace", version, about)]
struct Cli {
    #[command(flatten)]
    cfg: Config,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Traces of singular moduli and their cycle-integral analogues.
    Trace(TraceArgs),
    /// Hurwitz class number H(n).
    Hurwitz(HurwitzArgs),
    /// A single Kloosterman sum.
    Kloosterman(KloostermanArgs),
    /// Twisted Salié sum S_{m}(d, D; c).
    Salie(SalieArgs),
    /// Fourier coefficient b_m(n, s) of the weight-3/2 Maass–Poincaré series.
    Bcoeff(BcoeffArgs),
    /// Coefficient b(D, d) of the mock modular form.
    MockCoeff(MockArgs),
    /// Regularized inner product (f_D, f_d).
    InnerProd(InnerArgs),
    /// q-expansion of a named form.
    Series(SeriesArgs),
    /// Evaluate a Poincaré-type series at a point τ.
    Eval(EvalArgs),
    /// Run the numerical acceptance checks.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Trace(_) => "trace",
            Cmd::Hurwitz(_) => "hurwitz",
            Cmd::Kloosterman(_) => "kloosterman",
            Cmd::Salie(_) => "salie",
            Cmd::Bcoeff(_) => "bcoeff",
            Cmd::MockCoeff(_) => "mock-coeff",
            Cmd::InnerProd(_) => "inner-prod",
            Cmd::Series(_) => "series",
            Cmd::Eval(_) => "eval",
            Cmd::Verify { .. } => "verify",
        }
    }

    fn args(&self) -> Result<Value> {
        Ok(match self {
            Cmd::Trace(a) => serde_json::to_value(a)?,
            Cmd::Hurwitz(a) => serde_json::to_value(a)?,
            Cmd::Kloosterman(a) => serde_json::to_value(a)?,
            Cmd::Salie(a) => serde_json::to_value(a)?,
            Cmd::Bcoeff(a) => serde_json::to_value(a)?,
            Cmd::MockCoeff(a) => serde_json::to_value(a)?,
            Cmd::InnerProd(a) => serde_json::to_value(a)?,
            Cmd::Series(a) => serde_json::to_value(a)?,
            Cmd::Eval(a) => serde_json::to_value(a)?,
            Cmd::Verify { suite } => json!({ "suite": suite }),
        })
    }

    fn compute(&self, cfg: &Config) -> Result<Computed> {
        match self {
            Cmd::Trace(a) => trace(a, cfg),
            Cmd::Hurwitz(a) => hurwitz(a, cfg),
            Cmd::Kloosterman(a) => kloosterman(a, cfg),
            Cmd::Salie(a) => salie_cmd(a, cfg),
            Cmd::Bcoeff(a) => bcoeff_cmd(a, cfg),
            Cmd::MockCoeff(a) => mock_coeff(a, cfg),
            Cmd::InnerProd(a) => inner_prod(a, cfg),
            Cmd::Series(a) => series(a, cfg),
            Cmd::Eval(a) => eval(a, cfg),
            Cmd::Verify { .. } => unreachable!("verify is not cached"),
        }
    }
}

/// The verify suite ran, and something failed.
#[derive(Debug)]
struct VerifyFailed(usize);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} criteria failed", self.0)
    }
}
impl std::error::Error for VerifyFailed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if !e.is::<VerifyFailed>() || code != 3 {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use cyclotrace::{arithmetic, kloosterman, mockforms, numerics, poincare, qseries, traces};
    fn of(k: FailureKind) -> u8 {
        match k {
            FailureKind::InvalidInput => 1,
            FailureKind::Convergence | FailureKind::Internal => 2,
        }
    }
    for cause in e.chain() {
        if cause.is::<VerifyFailed>() {
            return 3;
        }
        if cause.is::<Invalid>() {
            return 1;
        }
        if cause.is::<Convergence>() {
            return 2;
        }
        macro_rules! classify {
            ($($t:ty),*) => {$(
                if let Some(x) = cause.downcast_ref::<$t>() {
                    return of(x.kind());
                }
            )*};
        }
        classify!(
            numerics::NumericsError,
            arithmetic::ArithmeticError,
            qseries::QSeriesError,
            kloosterman::KloostermanError,
            poincare::PoincareError,
            traces::TraceError,
            mockforms::MockError
        );
    }
    1
}

fn emit(v: &Value, cfg: &Config) -> Result<()> {
    let text = output::render(v, cfg.format)?;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.cfg;
    cfg.validate().map_err(|e| anyhow::Error::new(Invalid(e.to_string())))?;

    if let Cmd::Verify { suite } = &cli.cmd {
        return verify(suite, &cfg);
    }

    let kind = cli.cmd.name();
    let params = canonical_params(kind, &cli.cmd.args()?, &cfg);
    let cache = if cfg.no_cache {
        None
    } else {
        let dir = cfg.cache_dir();
        match Cache::open(&dir) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("warning: cache disabled: {e:#}");
                None
            }
        }
    };

    if let Some(c) = &cache {
        match c.load(&params) {
            Ok(Some(entry)) => {
                eprintln!("cache hit {}", entry.params_hash);
                return emit(&entry.payload, &cfg);
            }
            Ok(None) => {}
            Err(e) => eprintln!("warning: cache read failed: {e:#}"),
        }
    }

    let done = cli.cmd.compute(&cfg).map_err(|e| {
        if exit_code(&e) == 2 {
            eprintln!("diagnostics: c_max used = {}, coeff c_max = {}", cfg.c_max, cfg.coeff_c_max);
        }
        e.context(format!("{kind} failed"))
    })?;
    if let Some(err) = done.error {
        let allowed = cfg.tol * done.scale.max(1.0);
        if !(err <= allowed) {
            eprintln!("diagnostics: c_max used = {}, coeff c_max = {}, spread = {err:.3e}, allowed = {allowed:.3e}", cfg.c_max, cfg.coeff_c_max);
            return Err(anyhow::Error::new(Convergence {
                what: format!("{kind} did not reach --tol {:e}", cfg.tol),
                c_max: Some(cfg.c_max),
                spread: err,
            }));
        }
    }

    let mut payload = done.payload;
    let hash = params_hash(&params);
    if let Value::Object(m) = &mut payload {
        m.insert("params_hash".into(), Value::String(hash));
    }
    if let Some(c) = &cache {
        let error = done.error.map(output::f64s).unwrap_or(Value::Null);
        if let Err(e) = c.store(kind, &params, &payload, error) {
            eprintln!("warning: cache write failed: {e:#}");
        }
    }
    emit(&payload, &cfg)
}

fn verify(suite: &str, cfg: &Config) -> Result<()> {
    let suite: Suite = suite.parse().map_err(|e: String| anyhow::Error::new(Invalid(e)))?;
    let opts = VerifyOptions { c_max: cfg.c_max, h: cfg.h };
    let reports = run_suite(suite, &opts, |r| eprintln!("{}", r.line()));
    let failed = reports.iter().filter(|r| !r.passed).count();
    let v = match cfg.format {
        config::Format::Json => serde_json::to_value(&reports)?,
        _ => Value::Array(
            reports
                .iter()
                .map(|r| {
                    let w = r.worst();
                    json!({
                        "id": r.id,
                        "title": r.title,
                        "passed": r.passed,
                        "elapsed_s": format!("{:.2}", r.elapsed_s),
                        "worst": w.map(|w| w.label.clone()),
                        "worst_value": w.map(|w| format!("{:.3e}", w.value)),
                        "bound": w.map(|w| format!("{:.1e}", w.bound)),
                        "note": r.note,
                    })
                })
                .collect(),
        ),
    };
    emit(&v, cfg)?;
    eprintln!("{}/{} criteria passed", reports.len() - failed, reports.len());
    if failed > 0 {
        return Err(anyhow::Error::new(VerifyFailed(failed)));
    }
    Ok(())
}
