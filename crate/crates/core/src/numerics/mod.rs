//! Extended-precision scalars and the special functions used throughout the crate.
//!
//! Γ, ψ, ζ and erf/erfc come straight from MPFR (correctly rounded). Bessel functions
//! of real order, Kummer/Whittaker functions and the order-derivative of J are
//! implemented here.

mod bessel;
mod ext;
mod hypergeom;
mod quad;

pub use bessel::{bessel_i, bessel_j, bessel_j_dorder, bessel_j_hankel, bessel_j_series, bessel_k, bessel_k_hankel, bessel_k_quad, hankel_seam, DorderResult};
pub use ext::{ExtComplex, ExtReal, DEFAULT_PREC};
pub use hypergeom::{inc_gamma_neg_arg, inc_gamma_upper, kummer_m, whittaker_m, whittaker_w, WhittakerValue};
pub use quad::{gauss_legendre, richardson, GaussLegendre};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("precision mismatch: {0} vs {1} bits")]
    PrecisionMismatch(u32, u32),
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },
    #[error("{func} did not converge: {msg}")]
    Convergence { func: &'static str, msg: String },
    #[error("cannot parse number {0}")]
    Parse(String),
}

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> NumericsError {
    NumericsError::Domain { func, msg: msg.into() }
}

/// Γ(x). Errors at the poles.
pub fn gamma(x: &ExtReal) -> Result<ExtReal, NumericsError> {
    if x.is_nonpositive_integer() {
        return Err(domain("gamma", format!("pole at {x:?}")));
    }
    Ok(x.gamma())
}

/// 1/Γ(x), entire (zero at the poles of Γ).
pub fn rgamma(x: &ExtReal) -> ExtReal {
    if x.is_nonpositive_integer() {
        ExtReal::zero(x.prec())
    } else {
        x.gamma().recip()
    }
}

/// Riemann ζ(s) for real s ≠ 1.
pub fn zeta(s: &ExtReal) -> Result<ExtReal, NumericsError> {
    if *s == 1.0 {
        return Err(domain("zeta", "pole at s = 1"));
    }
    Ok(s.zeta())
}

/// ξ(s) = π^{−s/2}Γ(s/2)ζ(s).
pub fn xi_completed(s: &ExtReal) -> Result<ExtReal, NumericsError> {
    if s.is_zero() || *s == 1.0 {
        return Err(domain("xi_completed", "pole at s = 0 or 1"));
    }
    let half = s / 2.0;
    let pi = ExtReal::pi(s.prec());
    Ok(pi.pow(&(-&half)) * gamma(&half)? * zeta(s)?)
}

/// Real-exponent divisor sum σ_α(n) = Σ_{t|n} t^α.
pub fn sigma_real(alpha: &ExtReal, n: u64) -> ExtReal {
    let p = alpha.prec();
    let mut acc = ExtReal::zero(p);
    let mut t = 1u64;
    while t * t <= n {
        if n % t == 0 {
            acc += ExtReal::from_i64(t as i64, p).pow(alpha);
            let u = n / t;
            if u != t {
                acc += ExtReal::from_i64(u as i64, p).pow(alpha);
            }
        }
        t += 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn r(v: f64) -> ExtReal {
        ExtReal::from_f64(v, P)
    }

    #[test]
    fn gamma_closed_forms() {
        let sqrt_pi = ExtReal::pi(P).sqrt();
        assert!((gamma(&r(0.5)).unwrap() - &sqrt_pi).abs() < 1e-70);
        assert!((gamma(&r(5.0)).unwrap() - 24.0).abs() < 1e-70);
        assert!(gamma(&r(-2.0)).is_err());
        assert!(gamma(&r(0.0)).is_err());
    }

    #[test]
    fn gamma_limit_product_oracle() {
        // Γ(x) = lim n! n^x / (x(x+1)…(x+n)); convergence is O(1/n), so use
        // Richardson on n and 2n.
        let x = r(0.75);
        let prod = |n: u32| {
            let mut v = ExtReal::from_i64(n as i64, P).pow(&x) / &x;
            for k in 1..=n {
                v = v * (k as i64) / (&x + (k as i64));
            }
            v
        };
        let mut seq: Vec<ExtReal> = (0..14).map(|j| prod(64 << j)).collect();
        // repeated Richardson with ratios 2^j
        for level in 1..14 {
            let f = 2f64.powi(level);
            seq = seq.windows(2).map(|w| (&w[1] * f - &w[0]) / (f - 1.0)).collect();
        }
        let g = gamma(&x).unwrap();
        assert!((&seq[0] - &g).abs() < 1e-30, "{:?} vs {:?}", seq[0], g);
    }

    #[test]
    fn zeta_values() {
        let pi = ExtReal::pi(P);
        assert!((zeta(&r(2.0)).unwrap() - pi.powi(2) / 6.0).abs() < 1e-70);
        assert!((zeta(&r(4.0)).unwrap() - pi.powi(4) / 90.0).abs() < 1e-70);
        assert!(zeta(&r(1.0)).is_err());
    }

    #[test]
    fn zeta_brute_force_oracle() {
        // Σ_{n<N} n^{-3/2} + Euler–Maclaurin tail N^{1-s}/(s-1) + N^{-s}/2 + s N^{-s-1}/12 − …
        let p = 128;
        let s = ExtReal::from_f64(1.5, p);
        let n_terms = 1_000_000i64;
        let mut acc = ExtReal::zero(p);
        for n in 1..n_terms {
            acc += ExtReal::from_i64(n, p).pow(&-&s);
        }
        let nn = ExtReal::from_i64(n_terms, p);
        let tail = nn.pow(&(1.0 - &s)) / (&s - 1.0) + nn.pow(&-&s) / 2.0 + &s * nn.pow(&(-&s - 1.0)) / 12.0
            - &s * (&s + 1.0) * (&s + 2.0) * nn.pow(&(-&s - 3.0)) / 720.0;
        let z = zeta(&s).unwrap();
        assert!((acc + tail - z).abs() < 1e-20);
    }

    #[test]
    fn xi_values() {
        let pi = ExtReal::pi(P);
        assert!((xi_completed(&r(2.0)).unwrap() - &pi / 6.0).abs() < 1e-70);
        let a = xi_completed(&r(1.3)).unwrap();
        let b = xi_completed(&(1.0 - r(1.3))).unwrap();
        assert!((a - b).abs() < 1e-25);
        let x3 = pi.pow(&r(-1.5)) * r(1.5).gamma() * r(3.0).zeta();
        assert!((xi_completed(&r(3.0)).unwrap() - x3).abs() < 1e-70);
        assert!(xi_completed(&r(0.0)).is_err());
    }

    #[test]
    fn sigma_real_matches_integer() {
        let a = r(3.0);
        assert!((sigma_real(&a, 12) - (1 + 8 + 27 + 64 + 216 + 1728) as f64).abs() < 1e-60);
    }
}
