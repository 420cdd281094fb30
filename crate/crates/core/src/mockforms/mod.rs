//! The weakly holomorphic bases g_D (weight 3/2) and f_d (weight 1/2), the harmonic
//! form k_d = k_d⁺ + k_d⁻, mock coefficients b(D,d), Zagier's Eisenstein series,
//! even/odd splits and regularized inner products.

mod basis;

pub use basis::{f_weakly_holo, g_weakly_holo, zagier_basis, Provenance, WeakSeries};

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::Rational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::{hurwitz_class_number, ArithmeticError, Discriminant};
use crate::numerics::{inc_gamma_neg_arg, inc_gamma_upper, ExtComplex, ExtReal, NumericsError};
use crate::poincare::{bcoeff_ds, PoincareError, SumOptions};
use crate::qseries::{Coeff, QSeries, QSeriesError, Support};
use crate::traces::{trace_star_jhat, TraceError, TraceResult};

#[derive(Debug, Error)]
pub enum MockError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series carries no plus-space tag")]
    Untagged,
    #[error("coefficient q^{n} did not round to an integer (residual {residual:.3e})")]
    NotIntegral { n: i64, residual: f64 },
    #[error("constant-term check inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Poincare(#[from] PoincareError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Working precision for assembled quantities.
pub const MOCK_PREC: u32 = 128;

fn hurwitz(n: i64) -> Result<Rational, MockError> {
    if n > 0 && !matches!(n % 4, 0 | 3) {
        return Ok(Rational::new());
    }
    Ok(hurwitz_class_number(n)?)
}

fn hurwitz_ext(n: i64, prec: u32) -> Result<ExtReal, MockError> {
    Ok(ExtReal::from_rational(&hurwitz(n)?, prec))
}

/// Zagier's weight-3/2 Eisenstein series: Σ H(n) qⁿ with H(0) = −1/12.
pub fn zagier_eisenstein(n_max: i64) -> Result<QSeries<Rational>, MockError> {
    if n_max < 1 {
        return Err(MockError::Domain("zagier_eisenstein needs N ≥ 1".into()));
    }
    let coeffs = (0..=n_max).map(hurwitz).collect::<Result<Vec<_>, _>>()?;
    Ok(QSeries::new(0, coeffs).with_support(Support::PlusThreeHalves))
}

fn check_negative_pair(big_d: i64, d: i64) -> Result<(), MockError> {
    if big_d >= 0 || d >= 0 {
        return Err(MockError::Domain(format!("need D, d < 0, got ({big_d}, {d})")));
    }
    let dd = Discriminant::new(big_d)?;
    Discriminant::new(d)?;
    if !dd.is_fundamental() {
        return Err(MockError::Domain(format!("D = {big_d} must be fundamental")));
    }
    if Discriminant::new(d * big_d)?.is_square() {
        return Err(MockError::Domain(format!("dD = {} is a square", d * big_d)));
    }
    Ok(())
}

/// b(D,d) = 192π H(|d|)H(|D|) − 8√(dD)·Tr*_{d,D}(Ĵ).
#[derive(Debug, Clone, PartialEq)]
pub struct MockCoeff {
    pub big_d: i64,
    pub d: i64,
    /// 192π H(|d|) H(|D|)
    pub class_term: ExtReal,
    /// Tr*_{d,D}(Ĵ)
    pub trace_term: ExtReal,
    pub trace_error: f64,
    pub params: crate::traces::TraceParams,
}

impl MockCoeff {
    pub fn from_trace(big_d: i64, d: i64, tr: &TraceResult) -> Result<Self, MockError> {
        check_negative_pair(big_d, d)?;
        let p = MOCK_PREC;
        let class_term = ExtReal::pi(p) * 192.0 * hurwitz_ext(-d, p)? * hurwitz_ext(-big_d, p)?;
        Ok(MockCoeff { big_d, d, class_term, trace_term: tr.value.with_prec(p), trace_error: tr.error_estimate, params: tr.params.clone() })
    }
    /// 8√(dD)
    pub fn trace_weight(&self) -> ExtReal {
        ExtReal::from_i64(self.d * self.big_d, MOCK_PREC).sqrt() * 8.0
    }
    pub fn value(&self) -> ExtReal {
        &self.class_term - self.trace_weight() * &self.trace_term
    }
    pub fn error_estimate(&self) -> f64 {
        self.trace_weight().to_f64() * self.trace_error
    }
}

/// Mock coefficient b(D,d) for D < 0 fundamental, d < 0, dD non-square.
pub fn b_coeff_mock(big_d: i64, d: i64, h: f64, opts: &SumOptions) -> Result<MockCoeff, MockError> {
    check_negative_pair(big_d, d)?;
    let tr = trace_star_jhat(d, big_d, h, opts)?;
    MockCoeff::from_trace(big_d, d, &tr)
}

/// Which constant-term reduction an inner product was assembled from.
pub const INNER_PRODUCT_REDUCTION: &str = "(f_D, ξ_{3/2} k_d)^reg = 3/2 × coefficient of q^{|D|} in k_d⁺";

#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    pub value: ExtReal,
    /// 288π H(|D|)H(|d|) (or −24πH(|d|) for θ)
    pub class_term: ExtReal,
    /// −12√(dD)·Tr*, zero for θ
    pub trace_term: ExtReal,
    pub error_estimate: f64,
    pub reduction: &'static str,
}

impl InnerProduct {
    /// (f_D, f_d)^reg = −12√(Dd) Tr*_{d,D}(Ĵ) + 288π H(|D|) H(|d|).
    pub fn from_trace(big_d: i64, d: i64, tr: &TraceResult) -> Result<Self, MockError> {
        check_negative_pair(big_d, d)?;
        let p = MOCK_PREC;
        let class_term = ExtReal::pi(p) * 288.0 * hurwitz_ext(-big_d, p)? * hurwitz_ext(-d, p)?;
        let w = ExtReal::from_i64(d * big_d, p).sqrt() * 12.0;
        let trace_term = -(&w * &tr.value.with_prec(p));
        Ok(InnerProduct {
            value: &class_term + &trace_term,
            error_estimate: w.to_f64() * tr.error_estimate,
            class_term,
            trace_term,
            reduction: INNER_PRODUCT_REDUCTION,
        })
    }
}

pub fn inner_prod_reg(big_d: i64, d: i64, h: f64, opts: &SumOptions) -> Result<InnerProduct, MockError> {
    check_negative_pair(big_d, d)?;
    InnerProduct::from_trace(big_d, d, &trace_star_jhat(d, big_d, h, opts)?)
}

/// (f_0, f_d)^reg = −24π H(|d|), with f_0 = θ.
pub fn inner_prod_theta(d: i64, prec: u32) -> Result<InnerProduct, MockError> {
    if d >= 0 {
        return Err(MockError::Domain(format!("need d < 0, got {d}")));
    }
    Discriminant::new(d)?;
    let class_term = ExtReal::pi(prec) * -24.0 * hurwitz_ext(-d, prec)?;
    Ok(InnerProduct {
        value: class_term.clone(),
        class_term,
        trace_term: ExtReal::zero(prec),
        error_estimate: 0.0,
        reduction: "(f_0, ξ_{3/2} k_d)^reg from the constant term of θ·k_d⁺",
    })
}

/// Holomorphic part k_d⁺ with per-coefficient error estimates.
#[derive(Debug, Clone)]
pub struct KPlus {
    pub d: i64,
    pub series: QSeries<ExtComplex>,
    /// absolute error per index n ≥ 0
    pub errors: BTreeMap<i64, f64>,
}

/// k_d⁺ = −2√π i q^{|d|} − 8√(π/|d|)H(|d|)
///        + Σ_{0<n≡0,3(4), n≠|d|} (∂_s b_{|d|}(n,s)|_{3/4}·2√n/√π + 96√(π/|d|)H(|d|)H(n)) qⁿ.
pub fn kplus_series(d: i64, n_max: i64, h: f64, opts: &SumOptions) -> Result<KPlus, MockError> {
    kplus_series_with(d, n_max, h, opts, Diagonal::Literal)
}

/// Treatment of the q^{|d|} coefficient of k_d⁺.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Diagonal {
    /// −2√π i only, as in the closed form above.
    #[default]
    Literal,
    /// −2√π i plus the general real term at n = |d|; k⁺ + k⁻ is then modular.
    Completed,
}

pub fn kplus_series_with(d: i64, n_max: i64, h: f64, opts: &SumOptions, diagonal: Diagonal) -> Result<KPlus, MockError> {
    let dd = Discriminant::new(d)?;
    if d >= 0 || !dd.is_fundamental() {
        return Err(MockError::Domain(format!("kplus_series needs a fundamental d < 0, got {d}")));
    }
    if n_max < 1 {
        return Err(MockError::Domain("kplus_series needs N ≥ 1".into()));
    }
    let p = MOCK_PREC;
    let m = -d;
    let pi = ExtReal::pi(p);
    let root = (&pi / m as f64).sqrt();
    let hd = hurwitz_ext(m, p)?;
    let idx: Vec<i64> = (1..=n_max).filter(|n| matches!(n % 4, 0 | 3) && (*n != m || diagonal == Diagonal::Completed)).collect();
    let cols = idx
        .par_iter()
        .map(|&n| -> Result<(i64, ExtReal, f64), MockError> {
            let r = bcoeff_ds(m, n, h, opts)?;
            let w = 2.0 * (n as f64).sqrt() / std::f64::consts::PI.sqrt();
            let v = ExtReal::from_f64(r.value(), p) * w + &root * 96.0 * &hd * hurwitz_ext(n, p)?;
            Ok((n, v, w * r.error_estimate()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut coeffs = vec![ExtComplex::zero(p); n_max as usize + 1];
    let mut errors = BTreeMap::new();
    coeffs[0] = ExtComplex::from_real(-(&root * 8.0 * &hd));
    errors.insert(0, 0.0);
    for (n, v, e) in cols {
        coeffs[n as usize] = ExtComplex::from_real(v);
        errors.insert(n, e);
    }
    if m <= n_max {
        let re = std::mem::replace(&mut coeffs[m as usize], ExtComplex::zero(p)).re;
        coeffs[m as usize] = ExtComplex::new(re, pi.sqrt() * -2.0);
        errors.entry(m).or_insert(0.0);
    }
    Ok(KPlus { d, series: QSeries::new(0, coeffs).with_support(Support::PlusThreeHalves), errors })
}

impl KPlus {
    /// Value at τ with tail bound from the coefficient envelope (rate π√|d|) plus the
    /// propagated coefficient errors.
    pub fn evaluate(&self, tau: &ExtComplex) -> Result<(ExtComplex, f64), MockError> {
        let kappa = std::f64::consts::PI * (-self.d as f64).sqrt();
        let ev = self.series.evaluate_with(tau, &Rational::from(1), &self.series.growth_envelope_with(kappa), None)?;
        let y = tau.im.to_f64();
        let coeff_err: f64 = self.errors.iter().map(|(&n, e)| e * (-2.0 * std::f64::consts::PI * n as f64 * y).exp()).sum();
        Ok((ev.value, ev.tail_bound + coeff_err))
    }
}

/// Reading of the head term (−i)Γ(−½, 4πdy)q^{−d} of k_d⁻.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KminusHead {
    /// Literal: 4πdy < 0, Γ(−½, ·) continued along the principal branch.
    #[default]
    Continued,
    /// Radial argument replaced by 4π|d|y.
    Absolute,
}

/// Non-holomorphic part k_d⁻, assembled from the exact coefficients of f_d.
#[derive(Debug, Clone)]
pub struct KMinus {
    pub d: i64,
    pub head: KminusHead,
    /// b_{|d|}(−n, 3/4) for 0 < n ≡ 0,1 (4), from the shadow relation
    pub shadow: BTreeMap<i64, ExtReal>,
    /// 24H(|d|)/√|d|
    pub theta_weight: ExtReal,
    envelope: crate::qseries::Envelope,
    n_max: i64,
}

impl KMinus {
    /// ξ_{3/2}(2√(π|d|)k_d) = f_d forces b_{|d|}(−n, 3/4) = −(A_d(n) + 24H(|d|)·[n = □])/√|d|,
    /// A_d(n) the coefficient of qⁿ in f_d.
    pub fn new(d: i64, n_max: i64, head: KminusHead) -> Result<Self, MockError> {
        if d >= 0 {
            return Err(MockError::Domain(format!("need d < 0, got {d}")));
        }
        Discriminant::new(d)?;
        let p = MOCK_PREC;
        let f = f_weakly_holo(d, n_max)?;
        let sd = ExtReal::from_i64(-d, p).sqrt();
        let theta_weight = hurwitz_ext(-d, p)? * 24.0 / &sd;
        let h24 = hurwitz_ext(-d, p)? * 24.0;
        let mut shadow = BTreeMap::new();
        for n in (1..=n_max).filter(|n| matches!(n % 4, 0 | 1)) {
            let a = ExtReal::from_integer(&f.series.coeff(n)?, p);
            let sq = if is_square(n) { h24.clone() } else { ExtReal::zero(p) };
            shadow.insert(n, -(a + sq) / &sd);
        }
        let kappa = std::f64::consts::PI * (-d as f64).sqrt();
        Ok(KMinus { d, head, shadow, theta_weight, envelope: f.series.growth_envelope_with(kappa), n_max })
    }

    pub fn evaluate(&self, tau: &ExtComplex) -> Result<(ExtComplex, f64), MockError> {
        if !(tau.im.cmp_f64(0.0).is_gt()) {
            return Err(MockError::Domain("Im τ must be positive".into()));
        }
        let p = tau.prec().max(MOCK_PREC);
        let tau = tau.with_prec(p);
        let y = &tau.im;
        let pi = ExtReal::pi(p);
        let four_pi_y = &pi * 4.0 * y;
        let half = ExtReal::from_f64(-0.5, p);
        // qⁿ for integer n
        let qn = |n: i64| -> ExtComplex {
            let t = tau.scale_f64(n as f64);
            ExtComplex::e(&t.re).scale(&(&pi * -2.0 * &t.im).exp())
        };
        let m = -self.d;
        let x = &four_pi_y * m as f64;
        let g = match self.head {
            KminusHead::Continued => inc_gamma_neg_arg(&x)?,
            KminusHead::Absolute => ExtComplex::from_real(inc_gamma_upper(&half, &x)?),
        };
        let mut acc = (&g * &qn(m)).mul_i().scale_f64(-1.0);
        for (&n, b) in &self.shadow {
            let sq = if is_square(n) { self.theta_weight.with_prec(p) } else { ExtReal::zero(p) };
            let c = b.with_prec(p) + sq;
            if c.is_zero() {
                continue;
            }
            let r = ExtReal::from_i64(n, p).sqrt() * inc_gamma_upper(&half, &(&four_pi_y * n as f64))?;
            acc += qn(-n).scale(&(c * r));
        }
        // |A(n)|√nΓ(−½,4πny)e^{2πny}/√|d| ≤ A e^{κ√n}e^{−2πny}(4πy)^{−3/2}/(n√|d|)
        let yf = y.to_f64();
        let tail = self.envelope.tail_bound(self.n_max, yf) * (4.0 * std::f64::consts::PI * yf).powf(-1.5)
            / (self.n_max as f64 * (m as f64).sqrt());
        Ok((acc, tail))
    }
}

fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = (n as f64).sqrt().round() as i64;
        r * r == n
    }
}

/// Evaluate k_d⁻ at τ through shadow index N.
pub fn kminus_eval(d: i64, tau: &ExtComplex, n_max: i64) -> Result<(ExtComplex, f64), MockError> {
    KMinus::new(d, n_max, KminusHead::default())?.evaluate(tau)
}

/// f^e, f^o as formal series in q^{1/4}: index n carries a(n) (n even) or a(n)e(n/8) (n odd).
#[derive(Debug, Clone)]
pub struct EoSplit {
    pub even: QSeries<ExtComplex>,
    pub odd: QSeries<ExtComplex>,
}

pub fn eo_split<C: Coeff>(a: &QSeries<C>, prec: u32) -> Result<EoSplit, MockError> {
    if a.support() == Support::All {
        return Err(MockError::Untagged);
    }
    let z = ExtComplex::zero(prec);
    let one = ExtComplex::one(prec);
    let even = QSeries::from_fn(a.val(), a.n_max(), |n| if n % 2 == 0 { a.coeff_ref(n).unwrap().times(&one) } else { z.clone() });
    let odd = QSeries::from_fn(a.val(), a.n_max(), |n| {
        if n % 2 != 0 {
            a.coeff_ref(n).unwrap().times(&ExtComplex::e(&ExtReal::ratio(n, 8, prec)))
        } else {
            z.clone()
        }
    });
    Ok(EoSplit { even, odd })
}

/// Inverse substitution: a(n) = f^e[n] + f^o[n]·e(−n/8).
pub fn eo_recombine(s: &EoSplit) -> QSeries<ExtComplex> {
    let prec = s.even.coeff_ref(s.even.val()).map(|c| c.prec()).unwrap_or(MOCK_PREC);
    QSeries::from_fn(s.even.val(), s.even.n_max(), |n| {
        let o = s.odd.coeff_ref(n).unwrap().times(&ExtComplex::e(&ExtReal::ratio(-n, 8, prec)));
        s.even.coeff_ref(n).unwrap() + &o
    })
}

/// Σ_n a_n b_{−n} over the commonly known range.
fn constant_term(a: &QSeries<ExtComplex>, b: &QSeries<ExtComplex>, prec: u32) -> ExtComplex {
    let mut acc = ExtComplex::zero(prec);
    for (n, c) in a.iter() {
        if let Some(o) = b.coeff_ref(-n) {
            acc += c * o;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// f k⁺ + ½f^e(k⁺)^e + ½f^o(k⁺)^o
    Half,
    /// f k⁺ + f^e(k⁺)^e + f^o(k⁺)^o
    Unit,
}

#[derive(Debug, Clone)]
pub struct ConstantTermReport {
    pub big_d: i64,
    pub d: i64,
    pub n_max: i64,
    pub half: ExtComplex,
    pub unit: ExtComplex,
    /// (3/2)·coefficient of q^{|D|} in k_d⁺
    pub target: ExtComplex,
    pub rel_tol: f64,
    pub matches: Vec<Weighting>,
}

impl ConstantTermReport {
    /// The unique matching weighting, if exactly one matched.
    pub fn resolved(&self) -> Option<Weighting> {
        (self.matches.len() == 1).then(|| self.matches[0])
    }
}

/// Constant terms of f_D k_d⁺ + w(f_D^e (k_d⁺)^e + f_D^o (k_d⁺)^o) for w ∈ {½, 1}, compared
/// with (3/2)·[q^{|D|}]k_d⁺.
pub fn constant_term_check(big_d: i64, d: i64, n_max: i64, h: f64, opts: &SumOptions, rel_tol: f64) -> Result<ConstantTermReport, MockError> {
    if big_d >= 0 {
        return Err(MockError::Domain(format!("need D < 0, got {big_d}")));
    }
    if n_max < -big_d {
        return Err(MockError::Domain(format!("N = {n_max} leaves the q^{{{}}} pairing incomplete", -big_d)));
    }
    let p = MOCK_PREC;
    let f = f_weakly_holo(big_d, n_max)?.series;
    let k = kplus_series(d, n_max, h, opts)?.series;
    let one = ExtComplex::one(p);
    let fc = f.map(|c| c.times(&one));
    let full = constant_term(&fc, &k, p);
    let fs = eo_split(&f, p)?;
    let ks = eo_split(&k, p)?;
    let eo = &constant_term(&fs.even, &ks.even, p) + &constant_term(&fs.odd, &ks.odd, p);
    let half = &full + &eo.scale_f64(0.5);
    let unit = &full + &eo;
    let target = k.coeff(-big_d)?.scale_f64(1.5);
    let scale = target.abs().to_f64().max(f64::MIN_POSITIVE);
    let mut matches = Vec::new();
    for (w, v) in [(Weighting::Half, &half), (Weighting::Unit, &unit)] {
        if (v - &target).abs().to_f64() <= rel_tol * scale {
            matches.push(w);
        }
    }
    Ok(ConstantTermReport { big_d, d, n_max, half, unit, target, rel_tol, matches })
}

/// γ·τ for γ = [[a,b],[c,d]].
pub fn mobius(g: [[i64; 2]; 2], tau: &ExtComplex) -> ExtComplex {
    let p = tau.prec();
    let num = &tau.scale_f64(g[0][0] as f64) + &ExtComplex::from_f64(g[0][1] as f64, 0.0, p);
    let den = &tau.scale_f64(g[1][0] as f64) + &ExtComplex::from_f64(g[1][1] as f64, 0.0, p);
    &num * &den.recip()
}
