//! Acceptance checks. Each criterion measures its residuals, compares them with fixed
//! bounds and reports pass/fail together with the wall-clock time.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arithmetic::{hurwitz_class_number, kronecker, Discriminant};
use crate::kloosterman::{kloosterman_half, kloosterman_plus, salie, HalfWeight};
use crate::mockforms::{
    b_coeff_mock, constant_term_check, f_weakly_holo, g_weakly_holo, inner_prod_reg, inner_prod_theta, kplus_series, mobius, zagier_eisenstein, MOCK_PREC,
};
use crate::numerics::{bessel_i, kummer_m, whittaker_m, ExtComplex, ExtReal};
use crate::poincare::{bcoeff, eisenstein_g0_expansion, laplacian0, niebur_expansion, xi_op, EvalOptions, JHat, PoincareError, SumOptions};
use crate::qseries::faber;
use crate::traces::{trace_cm, trace_star_salie, trace_star_series};

/// Named groups of criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Arithmetic,
    Kloosterman,
    Poincare,
    Theorem1,
    Mockforms,
    Identities,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["arithmetic", "kloosterman", "poincare", "theorem1", "mockforms", "identities", "all"];

    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::Arithmetic => vec![1, 2],
            Suite::Kloosterman => vec![3],
            Suite::Poincare => vec![4, 5, 7, 8],
            Suite::Theorem1 => vec![6],
            Suite::Mockforms => vec![9, 10, 11, 12, 14],
            Suite::Identities => vec![13],
            Suite::All => (1..=CRITERIA).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "arithmetic" => Suite::Arithmetic,
            "kloosterman" => Suite::Kloosterman,
            "poincare" => Suite::Poincare,
            "theorem1" => Suite::Theorem1,
            "mockforms" => Suite::Mockforms,
            "identities" => Suite::Identities,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite {s:?}; expected one of {}", Suite::NAMES.join(", "))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = Suite::NAMES.iter().position(|n| n.parse::<Suite>().ok() == Some(*self)).unwrap_or(0);
        f.write_str(Suite::NAMES[i])
    }
}

pub const CRITERIA: u8 = 14;

/// One measured quantity and its bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Residual {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub residuals: Vec<Residual>,
    pub elapsed_s: f64,
    pub budget_s: Option<f64>,
    pub note: Option<String>,
}

impl CriterionReport {
    /// Largest residual/bound ratio, the headline number of the report.
    pub fn worst(&self) -> Option<&Residual> {
        self.residuals.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let worst = self.worst().map(|r| format!("; worst {} = {:.3e} (bound {:.1e})", r.label, r.value, r.bound)).unwrap_or_default();
        let budget = self.budget_s.map(|b| format!(" of {b:.0} s")).unwrap_or_default();
        let note = self.note.as_ref().map(|n| format!(" — {n}")).unwrap_or_default();
        format!("criterion {:>2} {verdict} {} ({:.1} s{budget}{worst}){note}", self.id, self.title, self.elapsed_s)
    }
}

fn ratio(r: &Residual) -> f64 {
    if r.passed {
        if r.bound > 0.0 {
            r.value / r.bound
        } else {
            0.0
        }
    } else {
        f64::INFINITY
    }
}

/// Knobs for the expensive criteria; the bounds themselves are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// c-sum cutoff for the weight-3/2 coefficients and traces
    pub c_max: u64,
    /// s-step of the Richardson derivatives
    pub h: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { c_max: 40000, h: 1e-3 }
    }
}

#[derive(Default)]
struct Checks {
    residuals: Vec<Residual>,
    note: Option<String>,
    forced_fail: bool,
}

impl Checks {
    fn below(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        let passed = value.is_finite() && value < bound;
        self.residuals.push(Residual { label: label.into(), value, bound, passed });
    }

    fn exact(&mut self, label: impl Into<String>, ok: bool) {
        self.residuals.push(Residual { label: label.into(), value: if ok { 0.0 } else { 1.0 }, bound: 0.0, passed: ok });
    }
}

type Outcome = Result<Checks, String>;

const TITLES: [(&str, Option<f64>); 14] = [
    ("CM traces", Some(10.0)),
    ("Hurwitz class numbers", Some(1.0)),
    ("Kloosterman identities", Some(5.0)),
    ("vanishing at s = 3/4 and s = 1", Some(120.0)),
    ("dual-route Tr*", Some(240.0)),
    ("Δ₀Ĵ_m = −j_m − 24σ(m)", Some(300.0)),
    ("eigen-equation of G_{−1}", Some(60.0)),
    ("Γ-invariance of Ĵ₁ and G₀", Some(60.0)),
    ("b(D,d) assembly and symmetry", None),
    ("inner products", None),
    ("duality f_d ↔ g_D", None),
    ("modularity of f_{−3} and plus-space support", None),
    ("Whittaker/Bessel identities", None),
    ("constant-term weighting", None),
];

pub fn run_criterion(id: u8, opts: &VerifyOptions) -> CriterionReport {
    let start = Instant::now();
    let outcome: Outcome = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(opts),
        5 => c5(opts),
        6 => c6(opts),
        7 => c7(),
        8 => c8(opts),
        9 => c9(opts),
        10 => c10(opts),
        11 => c11(),
        12 => c12(opts),
        13 => c13(),
        14 => c14(opts),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed_s = start.elapsed().as_secs_f64();
    let (title, budget_s) = TITLES.get((id as usize).wrapping_sub(1)).copied().unwrap_or(("unknown", None));
    let (residuals, note, mut passed) = match outcome {
        Ok(c) => {
            let ok = !c.forced_fail && !c.residuals.is_empty() && c.residuals.iter().all(|r| r.passed);
            (c.residuals, c.note, ok)
        }
        Err(e) => (vec![], Some(e), false),
    };
    let mut note = note;
    if let Some(b) = budget_s {
        if elapsed_s > b {
            passed = false;
            note = Some(format!("{}runtime {elapsed_s:.1} s exceeds {b:.0} s", note.map(|n| n + "; ").unwrap_or_default()));
        }
    }
    CriterionReport { id, title: title.to_string(), passed, residuals, elapsed_s, budget_s, note }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions, mut on_done: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    suite
        .criteria()
        .into_iter()
        .map(|id| {
            let r = run_criterion(id, opts);
            on_done(&r);
            r
        })
        .collect()
}

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn c1() -> Outcome {
    let mut c = Checks::default();
    for (d, want) in [(-3i64, -248i64), (-4, 492)] {
        let (r, res) = trace_cm(d, 1).map_err(err)?.rounded();
        c.exact(format!("Tr({d},1) = {want}"), r == want);
        c.below(format!("Tr({d},1) rounding"), res, 1e-10);
    }
    let mut worst = 0f64;
    for d in (-100i64..0).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
        worst = worst.max(trace_cm(d, 1).map_err(err)?.rounded().1);
    }
    c.below("max rounding residual, −100 ≤ d < 0", worst, 1e-10);
    Ok(c)
}

/// H(n) = Σ_{f² | n} h′(−n/f²) with h′(d₀g²) = h′(d₀)·g·Π_{p | g}(1 − (d₀/p)/p) and
/// h′(d₀) = −(1/|d₀|)Σ_{a ≤ |d₀|} (d₀/a)·a for fundamental d₀.
pub fn hurwitz_by_class_number_formula(n: i64) -> Rational {
    let weighted = |d: i64| -> Rational {
        let (d0, g) = (1..)
            .take_while(|g: &i64| g * g <= -d)
            .filter(|g| d % (g * g) == 0)
            .map(|g| (d / (g * g), g))
            .find(|&(d0, _)| Discriminant::new(d0).map(|x| x.is_fundamental()).unwrap_or(false))
            .expect("every negative discriminant has a fundamental part");
        let s: i64 = (1..=-d0).map(|a| kronecker(d0, a) as i64 * a).sum();
        let mut h = Rational::from((-s, -d0)) * g;
        let mut rest = g;
        let mut p = 2;
        while rest > 1 {
            if rest % p == 0 {
                h *= Rational::from((p - kronecker(d0, p) as i64, p));
                while rest % p == 0 {
                    rest /= p;
                }
            }
            p += 1;
        }
        h
    };
    let mut total = Rational::new();
    let mut f = 1;
    while f * f <= n {
        if n % (f * f) == 0 && matches!((n / (f * f)) % 4, 0 | 3) {
            total += weighted(-n / (f * f));
        }
        f += 1;
    }
    total
}

fn c2() -> Outcome {
    let mut c = Checks::default();
    let mut bad = vec![];
    for n in (1..=200i64).filter(|n| matches!(n % 4, 0 | 3)) {
        if hurwitz_class_number(n).map_err(err)? != hurwitz_by_class_number_formula(n) {
            bad.push(n);
        }
    }
    c.exact("H(n) vs class number formula, n ≤ 200", bad.is_empty());
    if !bad.is_empty() {
        c.note = Some(format!("mismatch at n = {bad:?}"));
    }
    for (n, num, den) in [(3, 1, 3), (4, 1, 2), (23, 3, 1)] {
        c.exact(format!("H({n}) = {num}/{den}"), hurwitz_class_number(n).map_err(err)? == Rational::from((num, den)));
    }
    Ok(c)
}

fn c3() -> Outcome {
    const P: u32 = 128;
    let mut c = Checks::default();
    let (mut w1, mut w2) = (0f64, 0f64);
    for m_c in (4..=64i64).step_by(4) {
        for m in -12..=12 {
            for n in -12..=12 {
                let a = kloosterman_half(HalfWeight::ThreeHalves, m, n, m_c, P).map_err(err)?;
                let b = kloosterman_half(HalfWeight::OneHalf, -m, -n, m_c, P).map_err(err)?.mul_i();
                w1 = w1.max((&a + &b).abs().to_f64());
            }
        }
        let root = ExtReal::from_i64(m_c, P).sqrt();
        for (d, big_d) in [(-4i64, -3i64), (-3, -8), (-7, -4)] {
            let k = kloosterman_plus(d, big_d, m_c, P).map_err(err)?;
            let s = salie(-1, d, big_d, m_c, P).map_err(err)?.scale(&root);
            w2 = w2.max((&k - &s).abs().to_f64());
        }
    }
    c.below("max |K_{3/2}(m,n;c) + i K_{1/2}(−m,−n;c)|", w1, 1e-12);
    c.below("max |K⁺(d,D;c) − √c S_{−1}(d,D;c)|", w2, 1e-12);
    Ok(c)
}

fn c4(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    let so = SumOptions::new(opts.c_max);
    c.below("|b_3(4, 3/4)|", bcoeff(3, 4, 0.75, &so).map_err(err)?.value.abs(), 1e-3);
    c.below("|Tr*(−4,−3; s = 1)|", trace_star_series(-4, -3, 1.0, &so).map_err(err)?.value.abs().to_f64(), 1e-3);
    Ok(c)
}

fn c5(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    let so = SumOptions::new(opts.c_max);
    for s in [0.9, 1.2] {
        let a = trace_star_series(-4, -3, s, &so).map_err(err)?.value.to_f64();
        let b = trace_star_salie(-4, -3, s, &so).map_err(err)?.value.to_f64();
        c.below(format!("series vs Salié, s = {s}"), (a - b).abs() / a.abs(), 1e-3);
    }
    Ok(c)
}

fn tau(x: f64, y: f64) -> ExtComplex {
    ExtComplex::from_f64(x, y, 192)
}

fn c6(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    let eval = EvalOptions { n_max: 24, c_max: 2000, ..EvalOptions::default() };
    for m in [1i64, 2] {
        let jh = JHat::new(m, opts.h, &eval).map_err(err)?;
        let f = |z: &ExtComplex| jh.eval(z).map(|v| v.value);
        let sigma = crate::arithmetic::sigma(1, m as u64).to_f64();
        for (x, y) in [(0.2, 1.3), (0.0, 1.1), (-0.4, 0.9)] {
            let t = tau(x, y);
            // the e^{4πmy} head makes h⁴f⁽⁶⁾ of the default stencil visible at m = 2
            let lap = laplacian0(&f, &t, Some(2.5e-4)).map_err(err)?;
            let jm = faber(m, 80).evaluate(&t, &Rational::from(1), Some(1e-20)).map_err(err)?.value;
            let res = (&(&lap + &jm) + &ExtComplex::from_f64(24.0 * sigma, 0.0, 192)).abs().to_f64();
            c.below(format!("m = {m}, τ = {x}+{y}i"), res, 1e-3);
        }
    }
    Ok(c)
}

fn c7() -> Outcome {
    let mut c = Checks::default();
    let s = 1.3;
    let e = niebur_expansion(-1, s, &EvalOptions { n_max: 24, c_max: 2000, ..EvalOptions::default() }).map_err(err)?;
    let f = |z: &ExtComplex| e.evaluate(z).map(|v| v.value);
    for (x, y) in [(0.13, 0.9), (0.2, 1.1)] {
        let t = tau(x, y);
        let lap = laplacian0(&f, &t, None).map_err(err)?;
        let g = f(&t).map_err(err)?;
        let res = (&lap - &g.scale_f64(s * (1.0 - s))).abs().to_f64() / g.abs().to_f64();
        c.below(format!("relative residual at {x}+{y}i"), res, 1e-3);
    }
    Ok(c)
}

fn c8(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    let jh = JHat::new(1, opts.h, &EvalOptions { n_max: 40, c_max: 4000, ..EvalOptions::default() }).map_err(err)?;
    let d = (&jh.eval(&tau(0.0, 2.0)).map_err(err)?.value - &jh.eval(&tau(0.0, 0.5)).map_err(err)?.value).abs().to_f64();
    c.below("|Ĵ₁(2i) − Ĵ₁(i/2)|", d, 1e-5);
    let g0 = eisenstein_g0_expansion(1.3, &EvalOptions { n_max: 30, ..EvalOptions::default() }).map_err(err)?;
    let d = (&g0.evaluate(&tau(0.0, 2.0)).map_err(err)?.value - &g0.evaluate(&tau(0.0, 0.5)).map_err(err)?.value).abs().to_f64();
    c.below("|G₀(2i,1.3) − G₀(i/2,1.3)|", d, 1e-10);
    Ok(c)
}

fn c9(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    let so = SumOptions::new(opts.c_max);
    let a = b_coeff_mock(-3, -4, opts.h, &so).map_err(err)?;
    let b = b_coeff_mock(-4, -3, opts.h, &so).map_err(err)?;
    let (va, vb) = (a.value().to_f64(), b.value().to_f64());
    c.below("|b(−3,−4) − b(−4,−3)| / |b(−3,−4)|", (va - vb).abs() / va.abs(), 1e-3);
    let pi = ExtReal::pi(MOCK_PREC);
    for m in [&a, &b] {
        let class = &pi * 32.0;
        c.below(format!("class term of ({},{}) − 32π", m.big_d, m.d), (&m.class_term - &class).abs().to_f64(), 1e-30);
        let rebuilt = &class - &(ExtReal::from_i64(12, MOCK_PREC).sqrt() * 8.0 * &m.trace_term);
        c.below(format!("b({},{}) − (32π − 8√12·Tr*)", m.big_d, m.d), (&m.value() - &rebuilt).abs().to_f64(), 1e-30);
    }
    Ok(c)
}

fn c10(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    let pi = ExtReal::pi(MOCK_PREC);
    for (d, k) in [(-3i64, 8.0), (-4, 12.0)] {
        let v = inner_prod_theta(d, MOCK_PREC).map_err(err)?.value;
        c.below(format!("(f_0, f_{d})^reg + {k}π"), (&v + &(&pi * k)).abs().to_f64(), 1e-12);
    }
    let so = SumOptions::new(opts.c_max);
    let ip = inner_prod_reg(-3, -4, opts.h, &so).map_err(err)?;
    let b = b_coeff_mock(-3, -4, opts.h, &so).map_err(err)?;
    c.below("(f_{−3}, f_{−4})^reg − (3/2)b(−3,−4)", (&ip.value - &(b.value() * 1.5)).abs().to_f64(), 1e-12);
    Ok(c)
}

fn c11() -> Outcome {
    let mut c = Checks::default();
    for d in [-3i64, -4, -7, -8] {
        let f = f_weakly_holo(d, 12).map_err(err)?.series;
        for big_d in [1i64, 5, 8, 12] {
            let g = g_weakly_holo(big_d, 8).map_err(err)?;
            let a: Integer = f.coeff(big_d).map_err(err)?;
            let b: Integer = g.coeff(-d).map_err(err)?;
            c.exact(format!("[q^{big_d}]f_{d} = −[q^{}]g_{big_d} ({a})", -d), a == -b);
        }
    }
    Ok(c)
}

/// max over τ of min(Im τ, Im γτ) for γ = [[1,0],[4,1]]: Im γτ = y/|4τ+1|² ≤ 1/(16y).
pub const MAX_MIN_IMAG: f64 = 0.25;

fn c12(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    c.below("max_τ min(Im τ, Im γτ) vs required 0.35", MAX_MIN_IMAG, 0.0);
    c.residuals.last_mut().expect("just pushed").passed = false;
    let f = f_weakly_holo(-3, 160).map_err(err)?.series;
    let env = f.growth_envelope_with(std::f64::consts::PI * 3f64.sqrt());
    let eval = |z: &ExtComplex| f.evaluate_with(z, &Rational::from(1), &env, Some(1e-12)).map(|e| e.value);
    let t = tau(-0.1875, 0.25);
    let g = mobius([[1, 0], [4, 1]], &t);
    let a = eval(&t).map_err(err)?.abs().to_f64() * t.im.to_f64().powf(0.25);
    let b = eval(&g).map_err(err)?.abs().to_f64() * g.im.to_f64().powf(0.25);
    c.below(format!("substitute pair τ = −3/16 + i/4 (Im γτ = {:.3})", g.im.to_f64()), (a - b).abs() / a, 1e-5);
    let mut supports = vec![f.check_support()];
    for d in [-3i64, -4, -7, -8] {
        supports.push(f_weakly_holo(d, 40).map_err(err)?.series.check_support());
    }
    for big_d in [1i64, 5, 8, 12] {
        supports.push(g_weakly_holo(big_d, 40).map_err(err)?.check_support());
    }
    supports.push(zagier_eisenstein(40).map_err(err)?.check_support());
    supports.push(kplus_series(-3, 8, opts.h, &SumOptions::new(opts.c_max.min(10000))).map_err(err)?.series.check_support());
    c.exact("plus-space support of f_d, g_D, E, k⁺", supports.iter().all(|&s| s));
    c.forced_fail = true;
    c.note = Some(
        "unattainable as stated: Im γτ = y/|4τ+1|² ≤ 1/(16y), so both images never reach Im ≥ 0.35; \
         pairs with |4τ+1| = 1 are mirror images (γτ = −τ̄) and test nothing"
            .into(),
    );
    Ok(c)
}

fn c13() -> Outcome {
    const P: u32 = 256;
    let mut c = Checks::default();
    let r = |v: f64| ExtReal::from_f64(v, P);
    let pi = ExtReal::pi(P);
    let a_of = |s: &ExtReal| ExtReal::from_i64(2, P).pow(&(1.0 - s * 2.0)) * pi.sqrt() / (s + 0.5).gamma();
    // 2π√m √y I_{s−½}(2πmy) = A(s) M_{0,s−½}(4πmy)
    let mut worst = 0f64;
    for (m, s, y) in [(1.0, 1.2, 0.8), (1.0, 1.3, 0.7), (2.0, 0.9, 1.5), (3.0, 1.1, 0.4)] {
        let (s, y) = (r(s), r(y));
        let lhs = &pi * 2.0 * f64::sqrt(m) * y.sqrt() * bessel_i(&(&s - 0.5), &(&pi * 2.0 * m * &y)).map_err(err)?;
        let rhs = a_of(&s) * whittaker_m(&r(0.0), &(&s - 0.5), &(&pi * 4.0 * m * &y)).map_err(err)?;
        worst = worst.max(((&lhs - &rhs) / &rhs).abs().to_f64());
    }
    c.below("I-to-Whittaker (relative, 4 samples)", worst, 1e-6);
    // ξ₀(φ_{−m,s}(y)e(−mx)) = conj(A(s))·4πs·(4πy)^{−1}M_{1,s−½}(4πmy)e(mx) at m = 1, s = 1.2
    let (m, s) = (1.0, r(1.2));
    let nu = &s - 0.5;
    let phi = |z: &ExtComplex| -> Result<ExtComplex, PoincareError> {
        let z = z.with_prec(P);
        let y = &z.im;
        let g = &pi * 2.0 * f64::sqrt(m) * y.sqrt() * bessel_i(&nu, &(&pi * 2.0 * m * y))?;
        Ok(ExtComplex::e(&(&z.re * -m)).scale(&g))
    };
    let t = ExtComplex::from_f64(0.3, 0.8, P);
    let lhs = xi_op(0.0, &phi, &t, None).map_err(err)?;
    let y = &t.im;
    let prof = a_of(&s) * &pi * 4.0 * &s / (&pi * 4.0 * y) * whittaker_m(&r(1.0), &nu, &(&pi * 4.0 * m * y)).map_err(err)?;
    let rhs = ExtComplex::e(&(&t.re * m)).scale(&prof);
    c.below("ξ₀ identity at m = 1, s = 1.2, τ = 0.3+0.8i", (&lhs - &rhs).abs().to_f64(), 1e-6);
    // M(α,γ,y) = M(α+1,γ,y) − (y/γ)M(α+1,γ+1,y)
    let mut worst = 0f64;
    for (al, ga, y) in [(0.7, 1.9, 2.3), (-0.3, 0.6, 0.5), (1.25, 2.5, 7.0)] {
        let (al, ga, y) = (r(al), r(ga), r(y));
        let lhs = kummer_m(&al, &ga, &y).map_err(err)?;
        let rhs = kummer_m(&(&al + 1.0), &ga, &y).map_err(err)? - &y / &ga * kummer_m(&(&al + 1.0), &(&ga + 1.0), &y).map_err(err)?;
        worst = worst.max((lhs - rhs).abs().to_f64());
    }
    c.below("Kummer contiguous recurrence (3 samples)", worst, 1e-28);
    Ok(c)
}

fn c14(opts: &VerifyOptions) -> Outcome {
    let mut c = Checks::default();
    let r = constant_term_check(-3, -4, 3, opts.h, &SumOptions::new(opts.c_max), 1e-6).map_err(err)?;
    let scale = r.target.abs().to_f64();
    c.below("½-weighted constant term vs (3/2)[q³]k⁺ (relative)", (&r.half - &r.target).abs().to_f64() / scale, 1e-6);
    c.exact(format!("exactly one weighting matches ({:?})", r.matches), r.resolved().is_some());
    c.note = r.resolved().map(|w| format!("resolved weighting: {w:?}"));
    Ok(c)
}
