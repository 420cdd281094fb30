//! Bessel functions of real order.
//!
//! * `I_ν`: ascending series (all terms positive, no cancellation).
//! * `J_ν`: ascending series evaluated with ≈ x·log₂e guard bits, Hankel's
//!   asymptotic expansion beyond [`hankel_seam`].
//! * `K_ν`: trapezoidal rule on ∫₀^∞ e^{−x cosh t} cosh(νt) dt (exponentially
//!   convergent), Hankel expansion beyond the seam.
//!
//! Hankel's series is divergent; its best truncation error is ≈ e^{−2x}, so the
//! seam is placed where that drops below 2^{−P−8}.

use super::{domain, ExtReal, NumericsError};

/// Smallest x for which Hankel's expansion is accurate to the working precision.
pub fn hankel_seam(prec: u32) -> f64 {
    ((prec as f64) + 8.0) * std::f64::consts::LN_2 / 2.0
}

fn check_x(func: &'static str, x: &ExtReal) -> Result<(), NumericsError> {
    if !(x.cmp_f64(0.0).is_gt()) || !x.is_finite() {
        return Err(domain(func, format!("argument must be positive, got {x:?}")));
    }
    Ok(())
}

/// I_ν(x).
pub fn bessel_i(nu: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    check_x("bessel_i", x)?;
    if *nu <= -1.0 {
        return Err(domain("bessel_i", "order must exceed −1"));
    }
    let p = x.prec();
    let wp = p + 16;
    let nu_w = nu.with_prec(wp);
    let xw = x.with_prec(wp);
    let half = &xw / 2.0;
    let q = half.sqr();
    let mut term = half.pow(&nu_w) / (&nu_w + 1.0).gamma();
    let mut sum = term.clone();
    let mut k = 0i64;
    loop {
        k += 1;
        term = term * &q / ((&nu_w + k) * k);
        sum += &term;
        if (k as f64) > x.to_f64() && term.log2_abs() < sum.log2_abs() - (wp as f64) {
            break;
        }
    }
    Ok(sum.with_prec(p))
}

/// Ascending series for J_ν(x) with cancellation guard bits.
pub fn bessel_j_series(nu: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    check_x("bessel_j", x)?;
    if *nu <= -1.0 {
        return Err(domain("bessel_j", "order must exceed −1"));
    }
    let p = x.prec();
    let xf = x.to_f64();
    let guard = (xf * std::f64::consts::LOG2_E).ceil() as u32 + 24;
    let wp = p + guard;
    let nu_w = nu.with_prec(wp);
    let xw = x.with_prec(wp);
    let half = &xw / 2.0;
    let q = half.sqr();
    let mut term = half.pow(&nu_w) / (&nu_w + 1.0).gamma();
    let lead = term.log2_abs();
    let mut sum = term.clone();
    let mut k = 0i64;
    loop {
        k += 1;
        term = -(term * &q / ((&nu_w + k) * k));
        sum += &term;
        if (k as f64) > xf / 2.0 + 2.0 {
            let tl = term.log2_abs();
            // the true value is at least ~ lead − guard (or the series is tiny at a zero;
            // then an absolute criterion relative to the leading term is used)
            if tl < sum.log2_abs() - (p as f64) - 8.0 || tl < lead - (wp as f64) {
                break;
            }
        }
    }
    Ok(sum.with_prec(p))
}

/// Hankel coefficients a_k(ν) = Π_{j=1..k}(4ν² − (2j−1)²) / (k! 8^k), multiplied by x^{−k}.
fn hankel_terms(nu: &ExtReal, x: &ExtReal) -> Vec<ExtReal> {
    let mu = nu.sqr() * 4.0;
    let mut out = vec![ExtReal::one(x.prec())];
    let mut t = ExtReal::one(x.prec());
    let mut k = 0i64;
    loop {
        k += 1;
        let odd = (2 * k - 1) as f64;
        t = t * (&mu - odd * odd) / (x * (8 * k));
        // stop at the smallest term of the divergent series
        if t.log2_abs() >= out.last().unwrap().log2_abs() && k > 1 || t.is_zero() {
            break;
        }
        out.push(t.clone());
        if k > 4000 {
            break;
        }
    }
    out
}

/// Hankel asymptotic expansion of J_ν(x) (accurate for x beyond the seam).
pub fn bessel_j_hankel(nu: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    check_x("bessel_j", x)?;
    let p = x.prec();
    let wp = p + 16;
    let (nu_w, xw) = (nu.with_prec(wp), x.with_prec(wp));
    let terms = hankel_terms(&nu_w, &xw);
    let mut pp = ExtReal::zero(wp);
    let mut qq = ExtReal::zero(wp);
    for (k, t) in terms.iter().enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pp += t * sign;
        } else {
            qq += t * sign;
        }
    }
    let pi = ExtReal::pi(wp);
    let omega = &xw - &nu_w * &pi / 2.0 - &pi / 4.0;
    let (s, c) = omega.sin_cos();
    let pref = (ExtReal::from_i64(2, wp) / (&pi * &xw)).sqrt();
    Ok((pref * (pp * c - qq * s)).with_prec(p))
}

/// J_ν(x).
pub fn bessel_j(nu: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    if x.to_f64() >= hankel_seam(x.prec()).max(2.0 * nu.to_f64().abs()) {
        bessel_j_hankel(nu, x)
    } else {
        bessel_j_series(nu, x)
    }
}

/// Hankel asymptotic expansion of K_ν(x).
pub fn bessel_k_hankel(nu: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    check_x("bessel_k", x)?;
    let p = x.prec();
    let wp = p + 16;
    let (nu_w, xw) = (nu.with_prec(wp), x.with_prec(wp));
    let mut sum = ExtReal::zero(wp);
    for t in hankel_terms(&nu_w, &xw) {
        sum += t;
    }
    let pi = ExtReal::pi(wp);
    let pref = (pi / (&xw * 2.0)).sqrt() * (-&xw).exp();
    Ok((pref * sum).with_prec(p))
}

/// K_ν(x) by the trapezoidal rule on its integral representation.
pub fn bessel_k_quad(nu: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    check_x("bessel_k", x)?;
    let p = x.prec();
    let wp = p + 24;
    let (nu_w, xw) = (nu.with_prec(wp).abs(), x.with_prec(wp));
    let xf = x.to_f64();
    let nuf = nu_w.to_f64();
    let target = (wp as f64) * std::f64::consts::LN_2;
    // strip half-width 1: error ≲ e^{x(1−cos 1)} e^{−2π/h}
    let h = 2.0 * std::f64::consts::PI / (target + 0.46 * xf + 10.0);
    // truncate where x(cosh T − 1) − νT exceeds the target
    let mut t_max = 1.0f64;
    while xf * (t_max.cosh() - 1.0) - nuf * t_max < target + 10.0 {
        t_max += 0.25;
    }
    let n = (t_max / h).ceil() as i64;
    let hw = ExtReal::from_f64(h, wp);
    let eh = hw.exp();
    let enh = (&hw * &nu_w).exp();
    let mut ek = ExtReal::one(wp);
    let mut enk = ExtReal::one(wp);
    let scale = (-&xw).exp(); // factor e^{-x} out for range
    let mut sum = ExtReal::one(wp) / 2.0; // t = 0 term (relative to e^{-x})
    for _ in 1..=n {
        ek *= &eh;
        enk *= &enh;
        let ch = (&ek + ek.recip()) / 2.0;
        let chn = (&enk + enk.recip()) / 2.0;
        let f = (-(&xw * (ch - 1.0))).exp() * chn;
        sum += f;
    }
    Ok((sum * hw * scale).with_prec(p))
}

/// K_ν(x).
pub fn bessel_k(nu: &ExtReal, x: &ExtReal) -> Result<ExtReal, NumericsError> {
    if x.to_f64() >= hankel_seam(x.prec()).max(2.0 * nu.to_f64().abs()) {
        bessel_k_hankel(nu, x)
    } else {
        bessel_k_quad(nu, x)
    }
}

/// ∂J_ν(x)/∂ν with an error estimate.
#[derive(Debug, Clone)]
pub struct DorderResult {
    pub value: ExtReal,
    pub error: f64,
}

/// ∂J_ν/∂ν by central differences in ν with Richardson extrapolation on (h, h/2);
/// the error estimate compares against the same scheme on (h/2, h/4).
pub fn bessel_j_dorder(nu: &ExtReal, x: &ExtReal, h: f64) -> Result<DorderResult, NumericsError> {
    if !(h > 0.0 && h <= 1e-2) {
        return Err(domain("bessel_j_dorder", format!("step must lie in (0, 1e-2], got {h}")));
    }
    let diff = |hh: f64| -> Result<ExtReal, NumericsError> {
        let a = bessel_j(&(nu + hh), x)?;
        let b = bessel_j(&(nu - hh), x)?;
        Ok((a - b) / (2.0 * hh))
    };
    let d1 = diff(h)?;
    let d2 = diff(h / 2.0)?;
    let d3 = diff(h / 4.0)?;
    let coarse = super::richardson(&d1, &d2, 2);
    let value = super::richardson(&d2, &d3, 2);
    let error = (&value - &coarse).abs().to_f64();
    Ok(DorderResult { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;
    fn r(v: f64) -> ExtReal {
        ExtReal::from_f64(v, P)
    }

    #[test]
    fn half_order_closed_forms() {
        let pi = ExtReal::pi(P);
        let i = bessel_i(&r(0.5), &r(1.0)).unwrap();
        let want = (ExtReal::from_i64(2, P) / &pi).sqrt() * r(1.0).sinh();
        assert!((i - want).abs() < 1e-70);
        let j = bessel_j(&r(0.5), &pi).unwrap();
        assert!(j.abs() < 1e-70);
        let k = bessel_k(&r(0.5), &r(2.0)).unwrap();
        let want = (&pi / 4.0).sqrt() * r(-2.0).exp();
        assert!((k - want).abs() < 1e-70);
    }

    #[test]
    fn k_half_order_many_points() {
        let pi = ExtReal::pi(P);
        for &x in &[0.01, 0.3, 1.0, 5.0, 30.0, 80.0, 100.0, 300.0] {
            let xx = r(x);
            let k = bessel_k(&r(0.5), &xx).unwrap();
            let want = (&pi / (&xx * 2.0)).sqrt() * (-&xx).exp();
            assert!(((k - &want) / &want).abs() < 1e-70, "x={x}");
        }
    }

    #[test]
    fn j_three_halves_closed_form() {
        // J_{3/2}(x) = √(2/(πx)) (sin x / x − cos x)
        let pi = ExtReal::pi(P);
        for &x in &[0.2, 3.0, 17.5, 60.0, 95.0, 140.0] {
            let xx = r(x);
            let (s, c) = xx.sin_cos();
            let want = (ExtReal::from_i64(2, P) / (&pi * &xx)).sqrt() * (s / &xx - c);
            let got = bessel_j(&r(1.5), &xx).unwrap();
            assert!((got - want).abs() < 1e-68, "x={x}");
        }
    }

    #[test]
    fn seam_agreement() {
        let seam = hankel_seam(P);
        for &nu in &[0.5, 0.8, 1.3, 2.0, 3.7] {
            for &dx in &[0.0, 1.5, 7.0] {
                let x = r(seam + dx);
                let a = bessel_j_series(&r(nu), &x).unwrap();
                let b = bessel_j_hankel(&r(nu), &x).unwrap();
                assert!((a - b).abs().log2_abs() < -(P as f64) + 24.0, "J nu={nu} x={}", seam + dx);
                let a = bessel_k_quad(&r(nu), &x).unwrap();
                let b = bessel_k_hankel(&r(nu), &x).unwrap();
                assert!(((&a - b) / &a).abs().log2_abs() < -(P as f64) + 24.0, "K nu={nu}");
            }
        }
    }

    #[test]
    fn wronskian() {
        // I_ν K_ν' − I_ν' K_ν = −1/x
        let h = 1e-12;
        for &nu in &[0.5, 1.5] {
            for &x in &[0.5, 2.0, 10.0] {
                let d = |f: &dyn Fn(&ExtReal) -> ExtReal| (f(&(r(x) + h)) - f(&(r(x) - h))) / (2.0 * h);
                let iv = bessel_i(&r(nu), &r(x)).unwrap();
                let kv = bessel_k(&r(nu), &r(x)).unwrap();
                let di = d(&|t| bessel_i(&r(nu), t).unwrap());
                let dk = d(&|t| bessel_k(&r(nu), t).unwrap());
                let w = iv * dk - di * kv;
                assert!((w + 1.0 / x).abs() < 1e-10, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn dorder_against_termwise_series() {
        // ∂_ν Σ (−1)^k (x/2)^{2k+ν}/(k!Γ(k+ν+1)) = Σ term·(ln(x/2) − ψ(k+ν+1))
        let (nu, x) = (r(0.5), r(1.0));
        let mut oracle = r(0.0);
        let lx = (&x / 2.0).ln();
        let mut fact = r(1.0);
        for k in 0..60i64 {
            if k > 0 {
                fact = fact * k;
            }
            let a = &nu + (k + 1);
            let t = (&x / 2.0).pow(&(&nu + (2 * k))) / (&fact * a.gamma());
            let t = if k % 2 == 0 { t } else { -t };
            oracle += t * (&lx - a.digamma());
        }
        let d = bessel_j_dorder(&nu, &x, 1e-3).unwrap();
        assert!((d.value - oracle).abs() < 1e-10);
    }

    #[test]
    fn dorder_symmetric_in_h_sign() {
        let d1 = bessel_j_dorder(&r(1.2), &r(3.0), 1e-3).unwrap();
        // the central difference is even in h, so −h gives the same scheme
        let a = bessel_j(&r(1.2 - 1e-3), &r(3.0)).unwrap();
        let b = bessel_j(&r(1.2 + 1e-3), &r(3.0)).unwrap();
        let neg = (a - b) / (-2e-3);
        let pos = (bessel_j(&r(1.2 + 1e-3), &r(3.0)).unwrap() - bessel_j(&r(1.2 - 1e-3), &r(3.0)).unwrap()) / 2e-3;
        assert!((neg - pos).abs() < 1e-60);
        assert!(d1.error < 1e-10);
    }

    #[test]
    fn dorder_small_x_leading_term() {
        let (nu, x) = (r(1.5), r(0.01));
        let j = bessel_j(&nu, &x).unwrap();
        let want = &j * ((&x / 2.0).ln() - (&nu + 1.0).digamma());
        let d = bessel_j_dorder(&nu, &x, 1e-3).unwrap();
        assert!(((d.value - &want) / want).abs() < 1e-4);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(&r(0.5), &r(0.0)).is_err());
        assert!(bessel_k(&r(0.5), &r(-1.0)).is_err());
        assert!(bessel_j_dorder(&r(0.5), &r(1.0), 0.1).is_err());
    }
}
