//! Confluent hypergeometric, Whittaker and incomplete gamma functions.

use super::{domain, rgamma, ExtComplex, ExtReal, NumericsError};

/// Kummer's M(a, b; x) = Σ (a)_n/(b)_n xⁿ/n!.
pub fn kummer_m(a: &ExtReal, b: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    if b.is_nonpositive_integer() {
        return Err(domain("kummer_m", format!("b = {b:?} is a non-positive integer")));
    }
    let p = x.prec();
    if x.is_zero() {
        return Ok(ExtReal::one(p));
    }
    // Σ|terms| ≤ M(|a|, b; |x|) ≲ e^{|x|}: that many bits may cancel.
    let xf = x.to_f64().abs();
    let guard = (xf * std::f64::consts::LOG2_E).ceil() as u32 + 24;
    let wp = p + guard;
    let (aw, bw, xw) = (a.with_prec(wp), b.with_prec(wp), x.with_prec(wp));
    let mut term = ExtReal::one(wp);
    let mut sum = ExtReal::one(wp);
    let mut peak = 0.0f64;
    let mut n = 0i64;
    loop {
        term = term * (&aw + n) * &xw / ((&bw + n) * (n + 1));
        n += 1;
        if term.is_zero() {
            break; // a is a non-positive integer: polynomial
        }
        sum += &term;
        let tl = term.log2_abs();
        peak = peak.max(tl);
        let ratio_small = ((a.to_f64() + n as f64) * xf / ((b.to_f64() + n as f64) * (n as f64 + 1.0))).abs() < 0.5;
        if ratio_small && tl < sum.log2_abs().max(peak - guard as f64) - (p as f64) - 8.0 {
            break;
        }
        if n > 100_000 {
            return Err(NumericsError::Convergence { func: "kummer_m", msg: "series did not terminate".into() });
        }
    }
    Ok(sum.with_prec(p))
}

/// Whittaker M_{μ,ν}(y) = e^{−y/2} y^{ν+1/2} M(ν−μ+1/2, 1+2ν; y).
pub fn whittaker_m(mu: &ExtReal, nu: &ExtReal, y: &ExtReal) -> Result<ExtReal, NumericsError> {
    if !(y.cmp_f64(0.0).is_gt()) {
        return Err(domain("whittaker_m", "y must be positive"));
    }
    let a = nu - mu + 0.5;
    let b = nu * 2.0 + 1.0;
    let m = kummer_m(&a, &b, y)?;
    Ok((-(y / 2.0)).exp() * y.pow(&(nu + 0.5)) * m)
}

/// Value of W together with a flag telling whether the degenerate (2ν ∈ ℤ) limit was used.
#[derive(Debug, Clone)]
pub struct WhittakerValue {
    pub value: ExtReal,
    pub degenerate_limit: bool,
}

fn whittaker_w_generic(mu: &ExtReal, nu: &ExtReal, y: &ExtReal) -> Result<ExtReal, NumericsError> {
    let two_nu = nu * 2.0;
    let c1 = (-&two_nu).gamma() * rgamma(&(0.5 - nu - mu));
    let c2 = two_nu.gamma() * rgamma(&(0.5 + nu - mu));
    let mut out = ExtReal::zero(y.prec());
    if !c1.is_zero() {
        out += c1 * whittaker_m(mu, nu, y)?;
    }
    if !c2.is_zero() {
        out += c2 * whittaker_m(mu, &-nu, y)?;
    }
    Ok(out)
}

/// Whittaker W_{μ,ν}(y) via the connection formula
/// W = Γ(−2ν)/Γ(½−ν−μ)·M_{μ,ν} + Γ(2ν)/Γ(½+ν−μ)·M_{μ,−ν},
/// evaluated with enough guard bits to absorb the e^{y} cancellation. When 2ν is an
/// integer the formula degenerates; the value is then the symmetric average at ν ± δ
/// (W is even and analytic in ν), computed with extra precision.
pub fn whittaker_w(mu: &ExtReal, nu: &ExtReal, y: &ExtReal) -> Result<WhittakerValue, NumericsError> {
    if !(y.cmp_f64(0.0).is_gt()) {
        return Err(domain("whittaker_w", "y must be positive"));
    }
    let p = y.prec();
    let guard = (y.to_f64() * std::f64::consts::LOG2_E).ceil() as u32 + 32;
    let two_nu = nu.to_f64() * 2.0;
    let near_int = (two_nu - two_nu.round()).abs() < 1e-6;
    if !near_int {
        let wp = p + guard;
        let v = whittaker_w_generic(&mu.with_prec(wp), &nu.with_prec(wp), &y.with_prec(wp))?;
        return Ok(WhittakerValue { value: v.with_prec(p), degenerate_limit: false });
    }
    // W(ν+δ) + W(ν−δ) = 2W(ν) + O(δ²); the Γ(∓2ν) factors blow up like 1/δ.
    let delta_bits = p / 2 + 16;
    let wp = p + guard + 2 * delta_bits + 16;
    let delta = ExtReal::from_i64(1, wp) >> delta_bits;
    let (muw, nuw, yw) = (mu.with_prec(wp), nu.with_prec(wp), y.with_prec(wp));
    let a = whittaker_w_generic(&muw, &(&nuw + &delta), &yw)?;
    let b = whittaker_w_generic(&muw, &(&nuw - &delta), &yw)?;
    Ok(WhittakerValue { value: ((a + b) / 2.0).with_prec(p), degenerate_limit: true })
}

/// Upper incomplete gamma Γ(a, x) for real a and x > 0.
pub fn inc_gamma_upper(a: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    if !(x.cmp_f64(0.0).is_gt()) {
        return Err(domain("inc_gamma_upper", "x must be positive"));
    }
    let p = x.prec();
    let wp = p + 16;
    let v = a.with_prec(wp).into_inner().gamma_inc(x.with_prec(wp).inner());
    let v = ExtReal::from_float(v);
    if !v.is_finite() {
        return Err(NumericsError::Convergence { func: "inc_gamma_upper", msg: format!("non-finite result at a={a:?}, x={x:?}") });
    }
    Ok(v.with_prec(p))
}

/// Γ(−½, −x) for x > 0, continued along the principal branch (arg(−x) = π):
/// Γ(−½, −x) = −2√π + i·x^{−1/2} Σ_{k≥0} x^k / (k!(k − ½)).
pub fn inc_gamma_neg_arg(x: &ExtReal) -> Result<ExtComplex, NumericsError> {
    if !(x.cmp_f64(0.0).is_gt()) {
        return Err(domain("inc_gamma_neg_arg", "x must be positive"));
    }
    let p = x.prec();
    let wp = p + 16;
    let xw = x.with_prec(wp);
    let mut term = ExtReal::one(wp);
    let mut sum = ExtReal::from_i64(-2, wp);
    let mut k = 0i64;
    loop {
        k += 1;
        term = term * &xw / k;
        let t = &term / (k as f64 - 0.5);
        sum += &t;
        if (k as f64) > x.to_f64() && t.log2_abs() < sum.log2_abs() - wp as f64 {
            break;
        }
    }
    let re = ExtReal::pi(wp).sqrt() * -2.0;
    let im = sum / xw.sqrt();
    Ok(ExtComplex::new(re.with_prec(p), im.with_prec(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{bessel_i, gauss_legendre};

    const P: u32 = 256;
    fn r(v: f64) -> ExtReal {
        ExtReal::from_f64(v, P)
    }

    #[test]
    fn kummer_basics() {
        assert!((kummer_m(&r(0.3), &r(1.7), &r(0.0)).unwrap() - 1.0).abs() < 1e-70);
        let want = (r(1.0).exp() - 1.0) / 1.0;
        assert!((kummer_m(&r(1.0), &r(2.0), &r(1.0)).unwrap() - want).abs() < 1e-70);
        assert!(kummer_m(&r(1.0), &r(-2.0), &r(1.0)).is_err());
    }

    #[test]
    fn lebedev_recurrence() {
        let (al, ga, y) = (r(0.7), r(1.9), r(2.3));
        let lhs = kummer_m(&al, &ga, &y).unwrap();
        let rhs = kummer_m(&(&al + 1.0), &ga, &y).unwrap() - &y / &ga * kummer_m(&(&al + 1.0), &(&ga + 1.0), &y).unwrap();
        assert!((lhs - rhs).abs() < 1e-28);
    }

    #[test]
    fn whittaker_m_closed_form() {
        for &y in &[0.3, 2.0, 11.0] {
            let got = whittaker_m(&r(0.0), &r(0.5), &r(y)).unwrap();
            let want = (r(y) / 2.0).sinh() * 2.0;
            assert!((got - want).abs() < 1e-60);
        }
    }

    #[test]
    fn i_bessel_to_whittaker() {
        // 2π√m √y I_{s−½}(2πmy) = 2^{1−2s} Γ(s+½)^{−1} √π M_{0,s−½}(4πmy)
        let (m, s, y) = (1.0, r(1.3), r(0.7));
        let pi = ExtReal::pi(P);
        let lhs = &pi * 2.0 * m * y.sqrt() * bessel_i(&(&s - 0.5), &(&pi * 2.0 * m * &y)).unwrap();
        let a = ExtReal::from_i64(2, P).pow(&(1.0 - &s * 2.0)) * pi.sqrt() / (&s + 0.5).gamma();
        let rhs = a * whittaker_m(&r(0.0), &(&s - 0.5), &(&pi * 4.0 * m * &y)).unwrap();
        assert!((lhs - rhs).abs() < 1e-25);
    }

    #[test]
    fn whittaker_w_special_cases() {
        // W_{κ, κ−½}(z) = z^κ e^{−z/2}
        for &(k, z) in &[(0.75, 3.0), (0.75, 40.0), (-0.75, 5.0)] {
            let got = whittaker_w(&r(k), &r(k - 0.5), &r(z)).unwrap();
            let want = r(z).powf(k) * (-r(z) / 2.0).exp();
            assert!(((got.value - &want) / &want).abs() < 1e-50, "k={k} z={z}");
        }
        // W_{0,ν}(z) = √(z/π) K_ν(z/2)
        let z = r(6.0);
        let got = whittaker_w(&r(0.0), &r(0.3), &z).unwrap();
        let want = (&z / ExtReal::pi(P)).sqrt() * crate::numerics::bessel_k(&r(0.3), &(&z / 2.0)).unwrap();
        assert!(((got.value - &want) / &want).abs() < 1e-50);
    }

    #[test]
    fn whittaker_w_degenerate_limit() {
        // ν = ½: W_{0,½}(z) = √(z/π) K_{1/2}(z/2) = e^{−z/2}
        let z = r(3.0);
        let got = whittaker_w(&r(0.0), &r(0.5), &z).unwrap();
        assert!(got.degenerate_limit);
        assert!((got.value - (-&z / 2.0).exp()).abs() < 1e-60);
        // weight-3/2 case at s = 1: W_{3/4, 1/2}, compared with ν = ½ ± 1e-9 interpolation
        let y = r(2.5);
        let w = whittaker_w(&r(0.75), &r(0.5), &y).unwrap().value;
        let a = whittaker_w(&r(0.75), &r(0.5 + 1e-9), &y).unwrap().value;
        let b = whittaker_w(&r(0.75), &r(0.5 - 1e-9), &y).unwrap().value;
        assert!((w - (a + b) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn whittaker_w_vs_incomplete_gamma() {
        // Γ(a, z) = z^{(a−1)/2} e^{−z/2} W_{(a−1)/2, a/2}(z); at a = −½ this is the
        // negative-index weight-3/2 profile W_{−3/4, ∓1/4}.
        let a = r(-0.5);
        for &z in &[0.7, 3.0, 12.0] {
            let zz = r(z);
            let w = whittaker_w(&((&a - 1.0) / 2.0), &(&a / 2.0), &zz).unwrap().value;
            let lhs = inc_gamma_upper(&a, &zz).unwrap();
            let rhs = zz.pow(&((&a - 1.0) / 2.0)) * (-&zz / 2.0).exp() * w;
            assert!(((lhs - &rhs) / rhs).abs() < 1e-40, "z={z}");
        }
    }

    #[test]
    fn incomplete_gamma() {
        for &x in &[0.1, 1.0, 7.5] {
            let got = inc_gamma_upper(&r(1.0), &r(x)).unwrap();
            assert!((got - r(-x).exp()).abs() < 1e-70);
        }
        // Γ(−½, x) = 2(e^{−x}/√x − √π erfc(√x)) vs quadrature of ∫_x^∞ t^{−3/2} e^{−t} dt
        let x = r(1.0);
        let closed = ((-&x).exp() / x.sqrt() - ExtReal::pi(P).sqrt() * x.sqrt().erfc()) * 2.0;
        let got = inc_gamma_upper(&r(-0.5), &x).unwrap();
        assert!((&got - &closed).abs() < 1e-60);
        // substitute t = x + u/(1−u), u ∈ [0,1)
        let gl = gauss_legendre(64, P);
        let mut q = r(0.0);
        for piece in 0..8 {
            let (lo, hi) = (piece as f64 / 8.0, (piece + 1) as f64 / 8.0);
            q += gl.integrate(&r(lo), &r(hi), |u| {
                let one_minus = 1.0 - u;
                let t = &x + u / &one_minus;
                t.powf(-1.5) * (-&t).exp() / one_minus.sqr()
            });
        }
        assert!((q - &got).abs() < 1e-20);
        // monotone decreasing
        let mut last = inc_gamma_upper(&r(-0.5), &r(0.05)).unwrap();
        for k in 1..40 {
            let v = inc_gamma_upper(&r(-0.5), &r(0.05 + 0.25 * k as f64)).unwrap();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn incomplete_gamma_negative_argument() {
        // Γ(−½, −x) = −2√π + 2i(√π erfi(√x) − e^x/√x); check against that closed form,
        // with erfi computed from its own series.
        let x = r(2.2);
        let got = inc_gamma_neg_arg(&x).unwrap();
        let sx = x.sqrt();
        let mut erfi = r(0.0);
        let mut t = sx.clone();
        for k in 0..200i64 {
            erfi += &t / (2 * k + 1);
            t = t * &x / (k + 1);
        }
        let sqrt_pi = ExtReal::pi(P).sqrt();
        let erfi = erfi * 2.0 / &sqrt_pi;
        let im = (&sqrt_pi * erfi - x.exp() / &sx) * 2.0;
        assert!((got.re + sqrt_pi * 2.0).abs() < 1e-70);
        assert!((got.im - im).abs() < 1e-60);
    }
}
