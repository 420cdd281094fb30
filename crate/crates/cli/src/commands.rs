use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use cyclotrace::kloosterman::{kloosterman_half, kloosterman_int, kloosterman_plus, salie, HalfWeight};
use cyclotrace::mockforms::{
    b_coeff_mock, f_weakly_holo, g_weakly_holo, inner_prod_reg, inner_prod_theta, kplus_series_with, zagier_eisenstein, Diagonal, InnerProduct,
};
use cyclotrace::poincare::{assemble_f32, bcoeff, bcoeff_ds, eisenstein_g0, niebur_g, JHat};
use cyclotrace::qseries::{faber, j_invariant, theta_series, Coeff, QSeries};
use cyclotrace::traces::{trace_cm, trace_cycle, trace_star_jhat, trace_star_salie, trace_star_series, TraceResult};
use cyclotrace::{arithmetic::hurwitz_class_number, ExtComplex};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::output::{ext, f64_exact, f64s};

/// A finished computation: the payload plus what the tolerance check needs.
pub struct Computed {
    pub payload: Value,
    /// absolute error estimate, if the value is not exact
    pub error: Option<f64>,
    /// magnitude the tolerance is relative to
    pub scale: f64,
}

impl Computed {
    fn exact(payload: Value) -> Self {
        Computed { payload, error: None, scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TraceKind {
    /// Tr_{d,D}(J) over CM points, d < 0
    Cm,
    /// twisted cycle integrals, d > 0
    Cycle,
    /// Tr*_{d,D} at s, Kloosterman route
    Star,
    /// Tr*_{d,D} at s, Salié route
    StarSalie,
    /// Tr*_{d,D}(Ĵ) = ∂_s Tr* at s = 1
    StarJhat,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct TraceArgs {
    #[arg(long, value_enum)]
    pub kind: TraceKind,
    #[arg(short = 'd')]
    pub d: i64,
    #[arg(short = 'D')]
    #[serde(rename = "D")]
    pub big_d: i64,
    /// spectral parameter (star, star-salie)
    #[arg(short = 's', default_value_t = 1.0)]
    pub s: f64,
}

fn trace_payload(r: &TraceResult, cfg: &Config) -> Value {
    json!({
        "d": r.d, "D": r.big_d,
        "value": ext(&r.value, cfg.digits()),
        "method": r.method,
        "error_estimate": f64s(r.error_estimate),
        "params": r.params,
    })
}

pub fn trace(a: &TraceArgs, cfg: &Config) -> Result<Computed> {
    let so = cfg.sums();
    let r = match a.kind {
        TraceKind::Cm => {
            let r = trace_cm(a.d, a.big_d)?;
            let (n, res) = r.rounded();
            if res > 1e-6 {
                bail!(Convergence { what: format!("Tr_{{{},{}}}(J) is {res:.3e} from an integer", a.d, a.big_d), c_max: None, spread: res });
            }
            let mut p = trace_payload(&r, cfg);
            p["approx"] = p["value"].take();
            p["value"] = Value::String(n.to_string());
            p["rounding_residual"] = f64s(res);
            return Ok(Computed::exact(p));
        }
        TraceKind::Cycle => trace_cycle(a.d, a.big_d)?,
        TraceKind::Star => trace_star_series(a.d, a.big_d, a.s, &so)?,
        TraceKind::StarSalie => trace_star_salie(a.d, a.big_d, a.s, &so)?,
        TraceKind::StarJhat => trace_star_jhat(a.d, a.big_d, cfg.h, &so)?,
    };
    Ok(Computed { payload: trace_payload(&r, cfg), error: Some(r.error_estimate), scale: r.value.abs().to_f64() })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HurwitzArgs {
    #[arg(short = 'n')]
    pub n: i64,
}

pub fn hurwitz(a: &HurwitzArgs, _cfg: &Config) -> Result<Computed> {
    let h = hurwitz_class_number(a.n)?;
    Ok(Computed::exact(json!({ "n": a.n, "value": h.to_string() })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KloostermanKind {
    /// integral weight K₀(m,n;c)
    Int,
    /// weight 1/2, 4 | c
    Half,
    /// weight 3/2, 4 | c
    ThreeHalves,
    /// plus-space normalization K⁺
    Plus,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct KloostermanArgs {
    #[arg(long, value_enum, default_value_t = KloostermanKind::Plus)]
    pub kind: KloostermanKind,
    #[arg(short = 'm')]
    pub m: i64,
    #[arg(short = 'n')]
    pub n: i64,
    #[arg(short = 'c')]
    pub c: i64,
}

fn complex(z: &ExtComplex, cfg: &Config) -> (Value, Value) {
    (ext(&z.re, cfg.digits()), ext(&z.im, cfg.digits()))
}

pub fn kloosterman(a: &KloostermanArgs, cfg: &Config) -> Result<Computed> {
    let p = cfg.precision_bits;
    let z = match a.kind {
        KloostermanKind::Int => kloosterman_int(a.m, a.n, a.c, p)?,
        KloostermanKind::Half => kloosterman_half(HalfWeight::OneHalf, a.m, a.n, a.c, p)?,
        KloostermanKind::ThreeHalves => kloosterman_half(HalfWeight::ThreeHalves, a.m, a.n, a.c, p)?,
        KloostermanKind::Plus => kloosterman_plus(a.m, a.n, a.c, p)?,
    };
    let (re, im) = complex(&z, cfg);
    Ok(Computed::exact(json!({ "kind": a.kind, "m": a.m, "n": a.n, "c": a.c, "re": re, "im": im })))
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SalieArgs {
    #[arg(short = 'm', default_value_t = -1)]
    pub m: i64,
    #[arg(short = 'd')]
    pub d: i64,
    #[arg(short = 'D')]
    #[serde(rename = "D")]
    pub big_d: i64,
    #[arg(short = 'c')]
    pub c: i64,
}

pub fn salie_cmd(a: &SalieArgs, cfg: &Config) -> Result<Computed> {
    let z = salie(a.m, a.d, a.big_d, a.c, cfg.precision_bits)?;
    let (re, im) = complex(&z, cfg);
    Ok(Computed::exact(json!({ "m": a.m, "d": a.d, "D": a.big_d, "c": a.c, "re": re, "im": im })))
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct BcoeffArgs {
    #[arg(short = 'm')]
    pub m: i64,
    #[arg(short = 'n')]
    pub n: i64,
    /// spectral parameter (ignored with --ds)
    #[arg(short = 's', default_value_t = 0.75)]
    pub s: f64,
    /// ∂_s b_m(n, s) at s = 3/4 instead of the value
    #[arg(long)]
    pub ds: bool,
}

pub fn bcoeff_cmd(a: &BcoeffArgs, cfg: &Config) -> Result<Computed> {
    let so = cfg.sums();
    if a.ds {
        let r = bcoeff_ds(a.m, a.n, cfg.h, &so)?;
        let payload = json!({
            "m": a.m, "n": a.n, "s": "0.75", "derivative": true,
            "value": f64_exact(r.value()),
            "difference_route": f64_exact(r.difference),
            "error_estimate": f64s(r.error_estimate()),
            "richardson_residual": f64s(r.richardson_residual),
            "c_max_used": r.termwise.c_max_used.to_string(),
        });
        return Ok(Computed { payload, error: Some(r.error_estimate()), scale: r.value().abs() });
    }
    let r = bcoeff(a.m, a.n, a.s, &so)?;
    let payload = json!({
        "m": a.m, "n": a.n, "s": f64_exact(a.s), "derivative": false,
        "value": f64_exact(r.value),
        "imag": f64_exact(r.imag),
        "error_estimate": f64s(r.abs_error_estimate),
        "c_max_used": r.c_max_used.to_string(),
    });
    Ok(Computed { payload, error: Some(r.abs_error_estimate), scale: r.value.abs() })
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct MockArgs {
    #[arg(short = 'D')]
    #[serde(rename = "D")]
    pub big_d: i64,
    #[arg(short = 'd')]
    pub d: i64,
}

pub fn mock_coeff(a: &MockArgs, cfg: &Config) -> Result<Computed> {
    let b = b_coeff_mock(a.big_d, a.d, cfg.h, &cfg.sums())?;
    let v = b.value();
    let dg = cfg.digits();
    let payload = json!({
        "D": a.big_d, "d": a.d,
        "value": ext(&v, dg),
        "components": {
            "class_number_term": ext(&b.class_term, dg),
            "trace_weight": ext(&b.trace_weight(), dg),
            "trace_star": ext(&b.trace_term, dg),
        },
        "method": "192π·H(|d|)H(|D|) − 8√(dD)·Tr*_{d,D}(Ĵ)",
        "error_estimate": f64s(b.error_estimate()),
    });
    Ok(Computed { payload, error: Some(b.error_estimate()), scale: v.abs().to_f64() })
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct InnerArgs {
    /// pair f_d with f_0 = θ instead of f_D
    #[arg(long)]
    pub theta: bool,
    #[arg(short = 'D', required_unless_present = "theta", conflicts_with = "theta")]
    #[serde(rename = "D")]
    pub big_d: Option<i64>,
    #[arg(short = 'd')]
    pub d: i64,
}

pub fn inner_prod(a: &InnerArgs, cfg: &Config) -> Result<Computed> {
    let ip: InnerProduct = match a.big_d {
        Some(big_d) if !a.theta => inner_prod_reg(big_d, a.d, cfg.h, &cfg.sums())?,
        _ => inner_prod_theta(a.d, cfg.precision_bits)?,
    };
    let dg = cfg.digits();
    let payload = json!({
        "D": if a.theta { Value::from(0) } else { Value::from(a.big_d) }, "d": a.d,
        "value": ext(&ip.value, dg),
        "components": { "class_number_term": ext(&ip.class_term, dg), "trace_term": ext(&ip.trace_term, dg) },
        "method": if a.theta { "(f_0, f_d)^reg = −24π·H(|d|)" } else { "(f_D, f_d)^reg = 288π·H(|D|)H(|d|) − 12√(dD)·Tr*_{d,D}(Ĵ)" },
        "reduction": ip.reduction,
        "error_estimate": f64s(ip.error_estimate),
    });
    Ok(Computed { payload, error: Some(ip.error_estimate), scale: ip.value.abs().to_f64() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    /// f_d, weight 1/2 (needs -d)
    F,
    /// g_D, weight 3/2 (needs -D)
    G,
    /// holomorphic part k_d⁺ (needs -d)
    Kplus,
    /// Zagier's weight 3/2 Eisenstein series
    Eisenstein,
    /// j(τ)
    J,
    /// Faber polynomial j_m (needs -m)
    Faber,
    /// θ(τ)
    Theta,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SeriesArgs {
    #[arg(long, value_enum)]
    pub kind: SeriesKind,
    #[arg(short = 'd')]
    pub d: Option<i64>,
    #[arg(short = 'D')]
    #[serde(rename = "D")]
    pub big_d: Option<i64>,
    #[arg(short = 'm')]
    pub m: Option<i64>,
    /// include the real part of the q^{|d|} coefficient of k_d⁺ (makes k_d⁺ + k_d⁻ modular)
    #[arg(long)]
    pub completed: bool,
}

fn need(v: Option<i64>, flag: &str, kind: SeriesKind) -> Result<i64> {
    v.ok_or_else(|| anyhow::Error::new(Invalid(format!("--kind {kind:?} needs {flag}").to_lowercase())))
}

fn rows<C: Coeff>(s: &QSeries<C>, mut extra: impl FnMut(i64, &mut Map<String, Value>)) -> Value {
    Value::Array(
        s.iter()
            .map(|(n, c)| {
                let mut m = Map::new();
                m.insert("n".into(), Value::from(n));
                m.insert("coeff".into(), Value::String(crate::output::plain(&c.to_decimal())));
                extra(n, &mut m);
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn series(a: &SeriesArgs, cfg: &Config) -> Result<Computed> {
    let n = cfg.n_terms;
    let out = match a.kind {
        SeriesKind::F => {
            let w = f_weakly_holo(need(a.d, "-d", a.kind)?, n)?;
            rows(&w.series, |k, m| {
                m.insert("provenance".into(), serde_json::to_value(w.provenance.get(&k)).unwrap_or(Value::Null));
            })
        }
        SeriesKind::G => rows(&g_weakly_holo(need(a.big_d, "-D", a.kind)?, n)?, |_, _| {}),
        SeriesKind::Kplus => {
            let diag = if a.completed { Diagonal::Completed } else { Diagonal::Literal };
            let k = kplus_series_with(need(a.d, "-d", a.kind)?, n, cfg.h, &cfg.sums(), diag)?;
            let dg = cfg.digits();
            // the coefficient whose error is largest against tol·max(1, |c_n|)
            let (worst, scale) = k
                .errors
                .iter()
                .map(|(i, &e)| (e, k.series.coeff_ref(*i).map(|c| c.abs().to_f64()).unwrap_or(0.0)))
                .max_by(|a, b| (a.0 / a.1.max(1.0)).total_cmp(&(b.0 / b.1.max(1.0))))
                .unwrap_or((0.0, 1.0));
            let v = Value::Array(
                k.series
                    .iter()
                    .filter(|(_, c)| !(c.re.is_zero() && c.im.is_zero()))
                    .map(|(i, c)| {
                        json!({ "n": i, "re": ext(&c.re, dg), "im": ext(&c.im, dg), "error_estimate": f64s(k.errors.get(&i).copied().unwrap_or(0.0)) })
                    })
                    .collect(),
            );
            return Ok(Computed { payload: v, error: Some(worst), scale });
        }
        SeriesKind::Eisenstein => rows(&zagier_eisenstein(n)?, |_, _| {}),
        SeriesKind::J => rows(&j_invariant(n), |_, _| {}),
        SeriesKind::Faber => {
            let m = need(a.m, "-m", a.kind)?;
            if m < 1 {
                bail!(Invalid(format!("faber needs m ≥ 1, got {m}")));
            }
            rows(&faber(m, n), |_, _| {})
        }
        SeriesKind::Theta => rows(&theta_series(n), |_, _| {}),
    };
    Ok(Computed::exact(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
pub enum Object {
    /// Eisenstein series G₀(τ, s)
    #[value(name = "G0")]
    G0,
    /// Niebur–Poincaré series G_m(τ, s)
    #[value(name = "Gm")]
    Gm,
    /// Ĵ_m(τ) = ∂_s G_{−m}(τ, s) at s = 1
    #[value(name = "Jhat")]
    Jhat,
    /// weight 3/2 Maass–Poincaré series F_m⁺(τ, s)
    #[value(name = "F32")]
    F32,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub object: Object,
    #[arg(short = 'm', default_value_t = -1)]
    pub m: i64,
    #[arg(short = 's', default_value_t = 1.2)]
    pub s: f64,
    /// point of the upper half-plane: "x+yi", "x-yi", "yi" or "x,y"
    #[arg(long, allow_hyphen_values = true)]
    pub tau: String,
}

/// Parses "x+yi", "x-yi", "yi", "x,y".
pub fn parse_tau(s: &str) -> Result<(f64, f64)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Invalid(format!("cannot parse τ = {s:?}; expected x+yi or x,y"));
    let (x, y) = if let Some((x, y)) = t.split_once(',') {
        (x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?)
    } else {
        let body = t.strip_suffix('i').ok_or_else(bad)?;
        let split = body.char_indices().rev().find(|&(i, c)| i > 0 && (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'));
        match split {
            Some((i, _)) => {
                let im = &body[i..];
                let im = if im == "+" || im == "-" { format!("{im}1") } else { im.to_string() };
                (body[..i].parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?)
            }
            None => (0.0, if body.is_empty() { 1.0 } else { body.parse().map_err(|_| bad())? }),
        }
    };
    if !(y > 0.0) {
        bail!(Invalid(format!("Im τ must be positive, got {y}")));
    }
    Ok((x, y))
}

pub fn eval(a: &EvalArgs, cfg: &Config) -> Result<Computed> {
    let (x, y) = parse_tau(&a.tau)?;
    let tau = ExtComplex::from_f64(x, y, cfg.precision_bits);
    let opts = cfg.eval();
    let (ev, params) = match a.object {
        Object::G0 => (eisenstein_g0(&tau, a.s, &opts)?, json!({ "s": f64_exact(a.s) })),
        Object::Gm => (niebur_g(a.m, &tau, a.s, &opts)?, json!({ "m": a.m, "s": f64_exact(a.s) })),
        Object::Jhat => (JHat::new(a.m, cfg.h, &opts)?.eval(&tau)?, json!({ "m": a.m, "h": f64_exact(cfg.h) })),
        Object::F32 => (assemble_f32(a.m, &tau, a.s, &opts, &cfg.sums())?, json!({ "m": a.m, "s": f64_exact(a.s), "c_max": cfg.c_max.to_string() })),
    };
    let mut params = params;
    params["object"] = serde_json::to_value(a.object)?;
    params["tau"] = json!({ "re": f64_exact(x), "im": f64_exact(y) });
    params["n_terms"] = Value::String(opts.n_max.to_string());
    params["coeff_c_max"] = Value::String(opts.c_max.to_string());
    params["precision_bits"] = Value::String(opts.prec.to_string());
    let (re, im) = complex(&ev.value, cfg);
    let payload = json!({ "re": re, "im": im, "error_estimate": f64s(ev.error_estimate), "params": params });
    Ok(Computed { payload, error: Some(ev.error_estimate), scale: ev.value.abs().to_f64() })
}

/// Invalid input detected by the command layer (exit 1).
#[derive(Debug)]
pub struct Invalid(pub String);

/// A result whose error estimate missed the tolerance (exit 2).
#[derive(Debug)]
pub struct Convergence {
    pub what: String,
    pub c_max: Option<u64>,
    pub spread: f64,
}

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}
impl std::error::Error for Invalid {}

impl std::fmt::Display for Convergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: spread {:.3e}", self.what, self.spread)?;
        if let Some(c) = self.c_max {
            write!(f, " at c_max = {c}")?;
        }
        Ok(())
    }
}
impl std::error::Error for Convergence {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_forms() {
        assert_eq!(parse_tau("0.2+1.3i").unwrap(), (0.2, 1.3));
        assert_eq!(parse_tau("-0.4 + 0.9i").unwrap(), (-0.4, 0.9));
        assert_eq!(parse_tau("1.1i").unwrap(), (0.0, 1.1));
        assert_eq!(parse_tau("0.5,2").unwrap(), (0.5, 2.0));
        assert_eq!(parse_tau("1e-1+2e0i").unwrap(), (0.1, 2.0));
        assert_eq!(parse_tau("0.3+i").unwrap(), (0.3, 1.0));
        assert!(parse_tau("0.3-0.5i").is_err());
        assert!(parse_tau("abc").is_err());
    }
}
