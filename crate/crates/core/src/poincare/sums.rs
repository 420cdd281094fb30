//! Kloosterman–Bessel coefficient series c_m(n,s) and b_m(n,s), with acceleration.
//!
//! Terms are accumulated in double precision: the Kloosterman tables are f64 and the
//! sums are conditionally (or slowly) convergent, so the error is dominated by
//! truncation, which is what `abs_error_estimate` reports.

use serde::{Deserialize, Serialize};

use super::PoincareError;
use crate::kloosterman::{kloosterman_int_table, kloosterman_plus_table, KSum};
use crate::numerics::{bessel_i, bessel_j, bessel_j_dorder, ExtReal};

/// How partial sums over c are turned into a value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Acceleration {
    /// Smooth cutoff w(c/X), w(u) = 1 − g(u)/(g(u)+g(1−u)), g(t) = e^{−1/t};
    /// error = |S(X) − S(X/2)|.
    Smooth,
    /// Mean of the last W partial sums; error = their spread.
    Cesaro { window: usize },
    /// Partial sum at c_max; error = |S(X) − S(X/2)|.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumOptions {
    pub c_max: u64,
    pub acceleration: Acceleration,
    /// Fail when the error estimate exceeds this.
    pub tol: Option<f64>,
}

impl SumOptions {
    pub fn new(c_max: u64) -> Self {
        SumOptions { c_max, acceleration: Acceleration::Smooth, tol: None }
    }
}

/// A coefficient obtained from an accelerated c-sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffResult {
    pub value: f64,
    pub imag: f64,
    pub abs_error_estimate: f64,
    pub c_max_used: u64,
    pub window: usize,
}

pub(crate) fn smooth_weight(u: f64) -> f64 {
    if u <= 0.0 {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    // 1 − g(u)/(g(u)+g(1−u)) = 1/(1 + e^{1/(1−u) − 1/u})
    let e = 1.0 / (1.0 - u) - 1.0 / u;
    if e > 700.0 {
        0.0
    } else {
        1.0 / (1.0 + e.exp())
    }
}

/// Apply an acceleration to terms (c, re, im) listed in increasing c.
pub(crate) fn accelerate(terms: &[(u64, f64, f64)], opts: &SumOptions) -> Result<CoeffResult, PoincareError> {
    let x = opts.c_max as f64;
    let half = opts.c_max / 2;
    let (value, imag, err, window) = match opts.acceleration {
        Acceleration::Smooth => {
            let s = |xx: f64| {
                terms.iter().fold((0.0, 0.0), |(a, b), &(c, re, im)| {
                    let w = smooth_weight(c as f64 / xx);
                    (a + w * re, b + w * im)
                })
            };
            let (r1, i1) = s(x);
            let (r2, i2) = s(x / 2.0);
            (r1, i1, (r1 - r2).hypot(i1 - i2), 0)
        }
        Acceleration::Plain => {
            let (mut r, mut i) = (0.0, 0.0);
            let (mut rh, mut ih) = (0.0, 0.0);
            for &(c, re, im) in terms {
                r += re;
                i += im;
                if c <= half {
                    rh = r;
                    ih = i;
                }
            }
            (r, i, (r - rh).hypot(i - ih), 0)
        }
        Acceleration::Cesaro { window } => {
            let window = window.max(1).min(terms.len().max(1));
            let mut partial = Vec::with_capacity(terms.len());
            let (mut r, mut i) = (0.0, 0.0);
            for &(_, re, im) in terms {
                r += re;
                i += im;
                partial.push((r, i));
            }
            let last = &partial[partial.len().saturating_sub(window)..];
            let n = last.len().max(1) as f64;
            let mr = last.iter().map(|p| p.0).sum::<f64>() / n;
            let mi = last.iter().map(|p| p.1).sum::<f64>() / n;
            let lo = last.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let hi = last.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            (mr, mi, if last.is_empty() { 0.0 } else { hi - lo }, window)
        }
    };
    let res = CoeffResult { value, imag, abs_error_estimate: err, c_max_used: opts.c_max, window };
    if let Some(tol) = opts.tol {
        if !(err <= tol) {
            return Err(PoincareError::Convergence { what: "c-sum".into(), c_max: opts.c_max, spread: err, tol });
        }
    }
    Ok(res)
}

/// J_ν or I_ν at many small arguments, with ∂_ν J_ν; f64 power series for x ≤ 4,
/// MPFR above (where only a handful of c contribute).
pub(crate) struct BesselF64 {
    nu: f64,
    modified: bool,
    rgamma: f64,
    psi: f64,
}

const SERIES_LIMIT: f64 = 4.0;
const FALLBACK_PREC: u32 = 128;

impl BesselF64 {
    pub(crate) fn new(nu: f64, modified: bool) -> Self {
        let v = ExtReal::from_f64(nu + 1.0, FALLBACK_PREC);
        BesselF64 { nu, modified, rgamma: v.gamma().recip().to_f64(), psi: v.digamma().to_f64() }
    }

    pub(crate) fn value(&self, x: f64) -> Result<f64, PoincareError> {
        if x > SERIES_LIMIT {
            let nu = ExtReal::from_f64(self.nu, FALLBACK_PREC);
            let xx = ExtReal::from_f64(x, FALLBACK_PREC);
            let v = if self.modified { bessel_i(&nu, &xx)? } else { bessel_j(&nu, &xx)? };
            return Ok(v.to_f64());
        }
        let h = x / 2.0;
        let h2 = if self.modified { h * h } else { -h * h };
        let mut term = h.powf(self.nu) * self.rgamma;
        let mut acc = term;
        for k in 1..200 {
            term *= h2 / (k as f64 * (self.nu + k as f64));
            acc += term;
            if term.abs() < 1e-18 * acc.abs() {
                break;
            }
        }
        Ok(acc)
    }

    /// ∂_ν J_ν(x).
    pub(crate) fn dnu(&self, x: f64) -> Result<f64, PoincareError> {
        assert!(!self.modified, "order derivative is only needed for J");
        if x > SERIES_LIMIT {
            let nu = ExtReal::from_f64(self.nu, FALLBACK_PREC);
            let xx = ExtReal::from_f64(x, FALLBACK_PREC);
            return Ok(bessel_j_dorder(&nu, &xx, 1e-3)?.value.to_f64());
        }
        // Σ (−1)^k (x/2)^{2k+ν}/(k! Γ(ν+k+1)) · (ln(x/2) − ψ(ν+k+1))
        let h = x / 2.0;
        let lh = h.ln();
        let mut term = h.powf(self.nu) * self.rgamma;
        let mut psi = self.psi;
        let mut acc = term * (lh - psi);
        for k in 1..200 {
            let kf = k as f64;
            term *= -h * h / (kf * (self.nu + kf));
            psi += 1.0 / (self.nu + kf);
            let t = term * (lh - psi);
            acc += t;
            if t.abs() < 1e-18 * acc.abs().max(1e-300) && term.abs() < 1e-18 {
                break;
            }
        }
        Ok(acc)
    }
}

/// c_m(n,s) = Σ_{c≥1} c⁻¹ K₀(m,n;c) · {I if mn < 0, J if mn > 0}_{2s−1}(4π√|mn|/c).
pub fn coeff_c(m: i64, n: i64, s: f64, opts: &SumOptions) -> Result<CoeffResult, PoincareError> {
    if m == 0 || n == 0 {
        return Err(PoincareError::Domain("coeff_c needs m, n ≠ 0".into()));
    }
    if !(s > 0.75 && s <= 2.0) {
        return Err(PoincareError::Domain(format!("coeff_c needs s ∈ (3/4, 2], got {s}")));
    }
    let table = kloosterman_int_table(m, n, opts.c_max);
    let bes = BesselF64::new(2.0 * s - 1.0, m * n < 0);
    let a = 4.0 * std::f64::consts::PI * ((m * n).unsigned_abs() as f64).sqrt();
    let terms = table
        .iter()
        .map(|k| {
            let c = k.c as f64;
            bes.value(a / c).map(|b| (k.c, k.re / c * b, 0.0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    accelerate(&terms, opts)
}

fn check_plus(m: i64, n: i64) -> Result<(), PoincareError> {
    for v in [m, n] {
        if v <= 0 || !matches!(v % 4, 0 | 3) {
            return Err(PoincareError::Domain(format!("index {v} is not a positive plus-space index (≡ 0, 3 mod 4)")));
        }
    }
    Ok(())
}

fn bcoeff_terms(table: &[KSum], m: i64, n: i64, f: impl Fn(f64) -> Result<f64, PoincareError>) -> Result<Vec<(u64, f64, f64)>, PoincareError> {
    let mn = (m * n) as f64;
    let pref = -std::f64::consts::SQRT_2 * std::f64::consts::PI * mn.powf(-0.25);
    let a = 4.0 * std::f64::consts::PI * mn.sqrt();
    table
        .iter()
        .map(|k| {
            let c = k.c as f64;
            let b = f(a / c)?;
            Ok((k.c, pref * k.re / c * b, pref * k.im / c * b))
        })
        .collect()
}

/// b_m(n,s) = −√2π Σ_{0<c≡0(4)} K⁺(−m,−n;c)/c · |mn|^{−1/4} J_{2s−1}(4π√|mn|/c), m, n > 0.
pub fn bcoeff(m: i64, n: i64, s: f64, opts: &SumOptions) -> Result<CoeffResult, PoincareError> {
    check_plus(m, n)?;
    if !(0.6..=1.2).contains(&s) {
        return Err(PoincareError::Domain(format!("bcoeff needs s ∈ [0.6, 1.2], got {s}")));
    }
    let table = kloosterman_plus_table(-m, -n, opts.c_max);
    let bes = BesselF64::new(2.0 * s - 1.0, false);
    accelerate(&bcoeff_terms(&table, m, n, |x| bes.value(x))?, opts)
}

/// ∂_s b_m(n,s) at s = 3/4 by two routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeResult {
    /// Termwise route: Σ K⁺/c · 2∂_νJ_ν at ν = 1/2.
    pub termwise: CoeffResult,
    /// Difference-of-sums route: central differences at h and h/2 with Richardson.
    pub difference: f64,
    /// |Richardson − finer central difference|, the scheme's own residual.
    pub richardson_residual: f64,
    pub h: f64,
}

impl DerivativeResult {
    pub fn value(&self) -> f64 {
        self.termwise.value
    }
    pub fn route_gap(&self) -> f64 {
        (self.termwise.value - self.difference).abs()
    }
    pub fn error_estimate(&self) -> f64 {
        self.termwise.abs_error_estimate.max(self.route_gap())
    }
}

pub fn bcoeff_ds(m: i64, n: i64, h: f64, opts: &SumOptions) -> Result<DerivativeResult, PoincareError> {
    check_plus(m, n)?;
    if !(h > 0.0 && h <= 0.1) {
        return Err(PoincareError::Domain(format!("step h must be in (0, 0.1], got {h}")));
    }
    let inner = SumOptions { tol: None, ..*opts };
    let table = kloosterman_plus_table(-m, -n, opts.c_max);
    let bes = BesselF64::new(0.5, false);
    let termwise = accelerate(&bcoeff_terms(&table, m, n, |x| Ok(2.0 * bes.dnu(x)?))?, &inner)?;
    let at = |s: f64| -> Result<f64, PoincareError> {
        let b = BesselF64::new(2.0 * s - 1.0, false);
        Ok(accelerate(&bcoeff_terms(&table, m, n, |x| b.value(x))?, &inner)?.value)
    };
    let d1 = (at(0.75 + h)? - at(0.75 - h)?) / (2.0 * h);
    let d2 = (at(0.75 + h / 2.0)? - at(0.75 - h / 2.0)?) / h;
    let difference = (4.0 * d2 - d1) / 3.0;
    let res = DerivativeResult { termwise, difference, richardson_residual: (difference - d2).abs(), h };
    if let Some(tol) = opts.tol {
        if !(res.error_estimate() <= tol * res.value().abs().max(1.0)) {
            return Err(PoincareError::RouteDisagreement {
                termwise: res.termwise.value,
                difference: res.difference,
                spread: res.termwise.abs_error_estimate,
            });
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_weight_shape() {
        assert_eq!(smooth_weight(0.0), 1.0);
        assert_eq!(smooth_weight(1.0), 0.0);
        assert!((smooth_weight(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 1..100 {
            let w = smooth_weight(k as f64 / 100.0);
            assert!(w <= prev);
            prev = w;
        }
    }

    #[test]
    fn bessel_f64_matches_mpfr() {
        for &nu in &[0.2, 0.5, 1.0, 1.6, 2.8] {
            for modified in [false, true] {
                let b = BesselF64::new(nu, modified);
                for &x in &[1e-3, 0.3, 1.7, 3.9, 4.5, 12.0] {
                    let n = ExtReal::from_f64(nu, 128);
                    let xx = ExtReal::from_f64(x, 128);
                    let want = if modified { bessel_i(&n, &xx).unwrap() } else { bessel_j(&n, &xx).unwrap() }.to_f64();
                    let got = b.value(x).unwrap();
                    assert!((got - want).abs() <= 1e-14 * want.abs().max(1e-3), "ν={nu} x={x} {got} vs {want}");
                }
            }
        }
        let b = BesselF64::new(0.5, false);
        for &x in &[0.01, 0.5, 2.0, 3.99, 6.0] {
            // ∂_ν J_ν(x) at ν = 1/2 = √(2/(πx)) (Ci(2x) sin x − Si(2x) cos x)
            let want = bessel_j_dorder(&ExtReal::from_f64(0.5, 128), &ExtReal::from_f64(x, 128), 1e-3).unwrap().value.to_f64();
            assert!((b.dnu(x).unwrap() - want).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn accelerations_on_alternating_series() {
        // Σ (−1)^{k+1}/k = ln 2
        let terms: Vec<(u64, f64, f64)> = (1..=4000u64).map(|k| (k, if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64, 0.0)).collect();
        let ln2 = std::f64::consts::LN_2;
        for acc in [Acceleration::Smooth, Acceleration::Cesaro { window: 64 }, Acceleration::Plain] {
            let r = accelerate(&terms, &SumOptions { c_max: 4000, acceleration: acc, tol: None }).unwrap();
            assert!((r.value - ln2).abs() < 1e-3, "{acc:?}: {}", r.value);
            assert!(r.abs_error_estimate < 1e-2);
        }
        let r = accelerate(&terms, &SumOptions { c_max: 4000, acceleration: Acceleration::Cesaro { window: 2 }, tol: None }).unwrap();
        assert!((r.value - ln2).abs() < 1e-6);
        let err = accelerate(&terms, &SumOptions { c_max: 4000, acceleration: Acceleration::Plain, tol: Some(1e-9) });
        assert!(matches!(err, Err(PoincareError::Convergence { .. })));
    }

    #[test]
    fn coeff_c_symmetry() {
        let opts = SumOptions::new(600);
        for (m, n) in [(1, 2), (2, 3), (-1, -2), (1, 3)] {
            let a = coeff_c(m, n, 1.2, &opts).unwrap();
            let b = coeff_c(n, m, 1.2, &opts).unwrap();
            assert!((a.value - b.value).abs() < 1e-12);
        }
        assert!(coeff_c(0, 1, 1.0, &opts).is_err());
        assert!(coeff_c(1, 1, 0.7, &opts).is_err());
    }

    #[test]
    fn coeff_c_rademacher_gives_j_coefficients() {
        // (2π/√n) Σ K(−1,n;c)/c I₁(4π√n/c) = c(n) of J
        let opts = SumOptions::new(400);
        for (n, want) in [(1, 196884.0), (2, 21493760.0)] {
            let r = coeff_c(-1, n, 1.0, &opts).unwrap();
            let v = 2.0 * std::f64::consts::PI / (n as f64).sqrt() * r.value;
            assert!((v / want - 1.0).abs() < 1e-8, "n={n}: {v}");
        }
    }

    #[test]
    fn bcoeff_domain() {
        let opts = SumOptions::new(100);
        assert!(bcoeff(1, 4, 0.75, &opts).is_err());
        assert!(bcoeff(3, 4, 0.5, &opts).is_err());
        assert!(bcoeff_ds(3, 5, 1e-3, &opts).is_err());
    }

    #[test]
    fn coeff_c_self_convergence() {
        let a = coeff_c(-1, 1, 1.0, &SumOptions::new(2000)).unwrap();
        let b = coeff_c(-1, 1, 1.0, &SumOptions::new(4000)).unwrap();
        assert!((a.value - b.value).abs() < 1e-8 * b.value.abs(), "{} vs {}", a.value, b.value);
        let c = coeff_c(-1, 1, 1.0, &SumOptions { acceleration: Acceleration::Plain, ..SumOptions::new(4000) }).unwrap();
        assert!((c.value - b.value).abs() < 1e-6 * b.value.abs());
    }

    #[test]
    fn bcoeff_vanishes_at_three_quarters() {
        let opts = SumOptions::new(40000);
        for (m, n) in [(3, 4), (4, 3)] {
            let r = bcoeff(m, n, 0.75, &opts).unwrap();
            assert!(r.value.abs() < 1e-3, "b_{m}({n}) = {}", r.value);
            assert!(r.imag.abs() < 1e-10);
        }
        // the diagonal coefficient cancels the seed: b_m(m, 3/4) = −1/√m
        let r = bcoeff(3, 3, 0.75, &opts).unwrap();
        assert!((r.value + 1.0 / 3f64.sqrt()).abs() < 1e-2, "{}", r.value);
    }

    #[test]
    fn bcoeff_ds_routes_agree() {
        let r = bcoeff_ds(3, 4, 1e-3, &SumOptions::new(40000)).unwrap();
        assert!(r.route_gap() < 1e-3, "{} vs {}", r.termwise.value, r.difference);
        assert!(r.richardson_residual < 1e-4);
        let s = bcoeff_ds(4, 3, 1e-3, &SumOptions::new(40000)).unwrap();
        assert!((r.value() - s.value()).abs() < 1e-12);
    }
}
