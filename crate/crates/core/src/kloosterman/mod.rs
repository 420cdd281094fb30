//! Exponential sums: integral-weight and half-integral-weight Kloosterman sums, the
//! plus-space sums K⁺ and Salié sums attached to genus characters.
//!
//! Each sum comes in two flavours: an extended-precision one that groups terms by
//! residue before evaluating e(r/c) (used for identities and small c), and an f64 one
//! tuned for long c-ranges, with memoized tables.

mod fast;

pub use fast::{kloosterman_int_table, kloosterman_plus_table, salie_table, KSum};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arithmetic::{genus_character, kronecker, salie_forms, ArithmeticError, Discriminant};
use crate::numerics::{ExtComplex, ExtReal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KloostermanError {
    #[error("modulus c = {0} must be a positive multiple of 4")]
    ModulusNotMultipleOf4(i64),
    #[error("modulus must be positive, got {0}")]
    NonPositiveModulus(i64),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// Weight of a half-integral Kloosterman sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfWeight {
    OneHalf,
    ThreeHalves,
}

/// Units v mod c together with their inverses, via one modular inversion and prefix products.
pub(crate) fn units_with_inverses(c: u64) -> Vec<(u64, u64)> {
    if c == 1 {
        return vec![(0, 0)];
    }
    let primes = prime_factors(c);
    let mut is_unit = vec![true; c as usize];
    is_unit[0] = false;
    for &p in &primes {
        for k in (0..c).step_by(p as usize) {
            is_unit[k as usize] = false;
        }
    }
    let units: Vec<u64> = (1..c).filter(|&v| is_unit[v as usize]).collect();
    let mut prefix = Vec::with_capacity(units.len());
    let mut acc = 1u64;
    for &v in &units {
        acc = acc * v % c;
        prefix.push(acc);
    }
    let mut inv_acc = mod_inverse(acc, c);
    let mut out = vec![(0, 0); units.len()];
    for i in (0..units.len()).rev() {
        let before = if i == 0 { 1 } else { prefix[i - 1] };
        out[i] = (units[i], inv_acc * before % c);
        inv_acc = inv_acc * units[i] % c;
    }
    out
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(m as i64) as u64
}

/// v ↦ (c/v) for odd v > 0 coprime to c, through Legendre tables and reciprocity.
pub(crate) struct JacobiTop {
    two_odd: bool,
    odd: Vec<(u64, Vec<i8>)>,
}

impl JacobiTop {
    pub(crate) fn new(c: u64) -> Self {
        let mut n = c;
        let mut e2 = 0;
        while n % 2 == 0 {
            n /= 2;
            e2 += 1;
        }
        let mut odd = vec![];
        let mut p = 3;
        while n > 1 {
            if p * p > n {
                p = n;
            }
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                if e % 2 == 1 {
                    let mut table = vec![-1i8; p as usize];
                    table[0] = 0;
                    for x in 1..p {
                        table[(x * x % p) as usize] = 1;
                    }
                    odd.push((p, table));
                }
            }
            p += 2;
        }
        JacobiTop { two_odd: e2 % 2 == 1, odd }
    }
    pub(crate) fn eval(&self, v: u64) -> i8 {
        let mut r = 1i8;
        if self.two_odd && matches!(v % 8, 3 | 5) {
            r = -r;
        }
        for (p, table) in &self.odd {
            r *= table[(v % p) as usize];
            if p % 4 == 3 && v % 4 == 3 {
                r = -r;
            }
        }
        r
    }
}

/// Exact accumulation Σ_r w_r e(r/c) with Gaussian-integer weights w_r.
fn evaluate_weighted(c: u64, weights: &BTreeMap<u64, (i64, i64)>, prec: u32) -> ExtComplex {
    let mut acc = ExtComplex::zero(prec);
    let cc = ExtReal::from_i64(c as i64, prec);
    for (&r, &(a, b)) in weights {
        if a == 0 && b == 0 {
            continue;
        }
        let e = ExtComplex::e(&(ExtReal::from_i64(r as i64, prec) / &cc));
        let w = ExtComplex::new(ExtReal::from_i64(a, prec), ExtReal::from_i64(b, prec));
        acc += &w * &e;
    }
    acc
}

/// Add i^k·sign at residue r.
fn push(weights: &mut BTreeMap<u64, (i64, i64)>, r: u64, ipow: u8) {
    let e = weights.entry(r).or_insert((0, 0));
    match ipow % 4 {
        0 => e.0 += 1,
        1 => e.1 += 1,
        2 => e.0 -= 1,
        _ => e.1 -= 1,
    }
}

pub(crate) fn residue(m: i64, n: i64, v: u64, vinv: u64, c: u64) -> u64 {
    let ci = c as i128;
    ((m as i128 * vinv as i128 + n as i128 * v as i128).rem_euclid(ci)) as u64
}

/// K₀(m, n; c) = Σ_{v mod c, (v,c)=1} e((m v̄ + n v)/c).
pub fn kloosterman_int(m: i64, n: i64, c: i64, prec: u32) -> Result<ExtComplex, KloostermanError> {
    if c <= 0 {
        return Err(KloostermanError::NonPositiveModulus(c));
    }
    let c = c as u64;
    let mut w = BTreeMap::new();
    for (v, vi) in units_with_inverses(c) {
        push(&mut w, residue(m, n, v, vi, c), 0);
    }
    Ok(evaluate_weighted(c, &w, prec))
}

/// Power of i carried by (c/v)^{2k} ε_v^{2k} for v odd.
pub(crate) fn half_weight_ipow(k: HalfWeight, chi: i8, v: u64) -> u8 {
    let sign = if chi < 0 { 2 } else { 0 };
    let eps = match (v % 4, k) {
        (1, _) => 0,
        (_, HalfWeight::OneHalf) => 1,
        (_, HalfWeight::ThreeHalves) => 3,
    };
    (sign + eps) % 4
}

/// K_k(m, n; c) = Σ_{v mod c} (c/v)^{2k} ε_v^{2k} e((m v̄ + n v)/c), 4 | c.
pub fn kloosterman_half(k: HalfWeight, m: i64, n: i64, c: i64, prec: u32) -> Result<ExtComplex, KloostermanError> {
    if c <= 0 || c % 4 != 0 {
        return Err(KloostermanError::ModulusNotMultipleOf4(c));
    }
    let cu = c as u64;
    let chi = JacobiTop::new(cu);
    let mut w = BTreeMap::new();
    for (v, vi) in units_with_inverses(cu) {
        push(&mut w, residue(m, n, v, vi, cu), half_weight_ipow(k, chi.eval(v), v));
    }
    Ok(evaluate_weighted(cu, &w, prec))
}

/// K⁺(m, n; c) = (1 − i)(1 + (4/(c/4))) K_{1/2}(m, n; c).
pub fn kloosterman_plus(m: i64, n: i64, c: i64, prec: u32) -> Result<ExtComplex, KloostermanError> {
    let k = kloosterman_half(HalfWeight::OneHalf, m, n, c, prec)?;
    let factor = 1 + kronecker(4, c / 4) as i64;
    let one_minus_i = ExtComplex::from_f64(factor as f64, -(factor as f64), prec);
    Ok(&one_minus_i * &k)
}

/// S_m(d, D; c) = Σ_{b mod c, b² ≡ Dd (c)} χ_D([c/4, b, (b² − Dd)/c]) e(2mb/c).
pub fn salie(m: i64, d: i64, dd: i64, c: i64, prec: u32) -> Result<ExtComplex, KloostermanError> {
    if c <= 0 || c % 4 != 0 {
        return Err(KloostermanError::ModulusNotMultipleOf4(c));
    }
    let d_fund = Discriminant::new(dd)?;
    if !d_fund.is_fundamental() {
        return Err(ArithmeticError::Domain(format!("D = {dd} is not fundamental")).into());
    }
    Discriminant::new(d)?;
    let disc = Discriminant::new(d * dd)?;
    let mut w = BTreeMap::new();
    for q in salie_forms(disc, c)? {
        let chi = genus_character(d_fund, &q)?;
        if chi != 0 {
            push(&mut w, (2 * m * q.b).rem_euclid(c) as u64, if chi > 0 { 0 } else { 2 });
        }
    }
    Ok(evaluate_weighted(c as u64, &w, prec))
}

/// Euler's totient.
pub fn totient(c: u64) -> u64 {
    prime_factors(c).iter().fold(c, |acc, &p| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{divisors, gcd};

    const P: u32 = 128;

    fn close(z: &ExtComplex, re: f64, im: f64, tol: f64) -> bool {
        (z.re.to_f64() - re).abs() < tol && (z.im.to_f64() - im).abs() < tol
    }

    #[test]
    fn units_and_inverses() {
        for c in 1..200u64 {
            let u = units_with_inverses(c);
            assert_eq!(u.len() as u64, totient(c));
            for (v, vi) in u {
                assert_eq!(v * vi % c, 1 % c);
                assert_eq!(gcd(v as i64, c as i64), 1);
            }
        }
    }

    #[test]
    fn jacobi_table_matches_kronecker() {
        for c in (4..=400u64).step_by(4) {
            let t = JacobiTop::new(c);
            for (v, _) in units_with_inverses(c) {
                assert_eq!(t.eval(v) as i32, kronecker(c as i64, v as i64), "c={c} v={v}");
            }
        }
    }

    #[test]
    fn integral_examples() {
        assert!(close(&kloosterman_int(0, 0, 12, P).unwrap(), 4.0, 0.0, 1e-30));
        assert!(close(&kloosterman_int(1, 1, 2, P).unwrap(), 1.0, 0.0, 1e-30));
        // Ramanujan sum c_q(n) = K(0, n; q): c_12(1) = 0, c_6(2) = 1... μ(3)·φ(6)/φ(3) = −1
        assert!(close(&kloosterman_int(0, 2, 6, P).unwrap(), -1.0, 0.0, 1e-30));
        assert!(kloosterman_int(1, 1, 0, P).is_err());
    }

    #[test]
    fn integral_symmetry_and_reality() {
        for c in 1..=50 {
            for m in -4..=4 {
                for n in -4..=4 {
                    let a = kloosterman_int(m, n, c, P).unwrap();
                    let b = kloosterman_int(n, m, c, P).unwrap();
                    assert!((&a - &b).abs() < 1e-30);
                    assert!(a.im.abs() < 1e-30);
                    // Weil bound
                    let g = gcd(gcd(m, n), c) as f64;
                    let tau = divisors(c as u64).len() as f64;
                    assert!(a.abs().to_f64() <= tau * g.sqrt() * (c as f64).sqrt() + 1e-20);
                }
            }
        }
    }

    #[test]
    fn half_examples() {
        let k = kloosterman_half(HalfWeight::OneHalf, 0, 0, 4, P).unwrap();
        assert!(close(&k, 1.0, 1.0, 1e-30));
        let k = kloosterman_half(HalfWeight::OneHalf, -4, -3, 4, P).unwrap();
        assert!(close(&k, 1.0, 1.0, 1e-30));
        assert!(kloosterman_half(HalfWeight::OneHalf, 1, 1, 6, P).is_err());
        assert!(close(&kloosterman_plus(-4, -3, 4, P).unwrap(), 4.0, 0.0, 1e-30));
        assert!(close(&kloosterman_plus(0, 0, 4, P).unwrap(), 4.0, 0.0, 1e-30));
    }

    #[test]
    fn three_halves_relation() {
        for c in (4..=64).step_by(4) {
            for m in -12..=12 {
                for n in -12..=12 {
                    let a = kloosterman_half(HalfWeight::ThreeHalves, m, n, c, P).unwrap();
                    let b = kloosterman_half(HalfWeight::OneHalf, -m, -n, c, P).unwrap().mul_i();
                    assert!((&a + &b).abs() < 1e-30, "m={m} n={n} c={c}");
                }
            }
        }
    }

    #[test]
    fn plus_sums_are_real() {
        let mut worst = 0f64;
        for c in (4..=64).step_by(4) {
            for m in -12..=12 {
                for n in -12..=12 {
                    let k = kloosterman_plus(m, n, c, P).unwrap();
                    worst = worst.max(k.im.abs().to_f64());
                    let s = kloosterman_plus(n, m, c, P).unwrap();
                    assert!((&k - &s).abs() < 1e-30);
                }
            }
        }
        assert!(worst < 1e-20, "max |Im K⁺| = {worst}");
    }

    #[test]
    fn salie_examples() {
        assert!(close(&salie(-1, -4, -3, 4, P).unwrap(), 2.0, 0.0, 1e-30));
        assert!(salie(-1, -4, -3, 6, P).is_err());
        assert!(salie(-1, -4, -12, 4, P).is_err());
        for c in (4..=32).step_by(4) {
            for (d, dd) in [(-4, -3), (-3, -4), (-7, -3), (-3, -7), (-20, -3), (-8, -7)] {
                for m in -3..=3 {
                    let s = salie(m, d, dd, c, P).unwrap();
                    assert!(s.im.abs() < 1e-30);
                    let roots = salie_forms(Discriminant::new(d * dd).unwrap(), c).unwrap().len() as f64;
                    assert!(s.abs().to_f64() <= roots + 1e-20);
                }
            }
        }
    }

    #[test]
    fn salie_kloosterman_factorization_m1() {
        // K⁺(d, D; c) = √c · S_{−1}(d, D; c)
        let fund = [-3i64, -4, -7, -8, -11, -15, -19, -20, -23, -24];
        let discs = [-3i64, -4, -7, -8, -11, -12, -15, -16, -19, -20, -23];
        for c in (4..=64).step_by(4) {
            for &dd in &fund {
                for &d in &discs {
                    let k = kloosterman_plus(d, dd, c, P).unwrap();
                    let s = salie(-1, d, dd, c, P).unwrap();
                    let rhs = s.scale(&ExtReal::from_i64(c, P).sqrt());
                    assert!((&k - &rhs).abs() < 1e-25, "d={d} D={dd} c={c}: {:?} vs {:?}", k, rhs);
                }
            }
        }
    }

    #[test]
    fn salie_kloosterman_factorization_general_m() {
        // S_{−m}(d, D; c) = Σ_{n | (m, c/4)} (D/n) √(n/c) K⁺(d, m²D/n²; c/n)
        for m in 1..=4i64 {
            for c in (4..=64).step_by(4) {
                for (d, dd) in [(-4i64, -3i64), (-3, -4), (-7, -3), (-3, -7), (-8, -3), (-4, -7), (-11, -4)] {
                    let lhs = salie(-m, d, dd, c, P).unwrap();
                    let mut rhs = ExtComplex::zero(P);
                    for n in divisors(gcd(m, c / 4) as u64) {
                        let n = n as i64;
                        let chi = kronecker(dd, n);
                        if chi == 0 {
                            continue;
                        }
                        let k = kloosterman_plus(d, m * m * dd / (n * n), c / n, P).unwrap();
                        let f = (ExtReal::from_i64(n, P) / ExtReal::from_i64(c, P)).sqrt() * (chi as f64);
                        rhs += k.scale(&f);
                    }
                    assert!((&lhs - &rhs).abs() < 1e-25, "m={m} d={d} D={dd} c={c}: {:?} vs {:?}", lhs, rhs);
                }
            }
        }
    }
}
