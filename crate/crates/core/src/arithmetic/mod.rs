//! Exact integer layer: discriminants, Kronecker symbols, divisor sums, binary
//! quadratic forms, class lists, genus characters and Pell automorphs.

mod forms;
mod indefinite;

pub use forms::{class_list_definite, cm_point, genus_character, hurwitz_class_number, reduce_definite, ClassList, QuadForm};
pub use indefinite::{automorph, class_list_indefinite, cycle, gamma_infty_reps, is_reduced_indefinite, pell_fundamental, reduce_indefinite, salie_forms, Matrix2};

use rug::ops::Pow;
use rug::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("{0} is not a discriminant (must be nonzero and ≡ 0, 1 mod 4)")]
    NotDiscriminant(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A nonzero integer ≡ 0, 1 (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Discriminant {
    value: i64,
    is_fundamental: bool,
    is_square: bool,
}

impl Discriminant {
    pub fn new(value: i64) -> Result<Self, ArithmeticError> {
        if value == 0 || !matches!(value.rem_euclid(4), 0 | 1) {
            return Err(ArithmeticError::NotDiscriminant(value));
        }
        Ok(Discriminant { value, is_fundamental: is_fundamental(value), is_square: is_square(value) })
    }
    pub fn value(&self) -> i64 {
        self.value
    }
    /// Fundamental discriminant of a quadratic field, or 1 (trivial character).
    pub fn is_fundamental(&self) -> bool {
        self.is_fundamental
    }
    pub fn is_square(&self) -> bool {
        self.is_square
    }
}

pub(crate) fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = isqrt(n as u64) as i64;
        r * r == n
    }
}

pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn is_squarefree(n: u64) -> bool {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Kronecker symbol (D/n).
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (d mod n / n) for odd n > 0
    let mut a = d.rem_euclid(n);
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// σ_k(m) = Σ_{t|m} t^k.
pub fn sigma(k: u32, m: u64) -> Integer {
    assert!(m >= 1, "sigma requires m ≥ 1");
    let mut acc = Integer::new();
    let mut t = 1u64;
    while t * t <= m {
        if m % t == 0 {
            acc += Integer::from(t).pow(k);
            let u = m / t;
            if u != t {
                acc += Integer::from(u).pow(k);
            }
        }
        t += 1;
    }
    acc
}

/// Positive divisors of n in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = vec![];
    let mut large = vec![];
    let mut t = 1u64;
    while t * t <= n {
        if n % t == 0 {
            small.push(t);
            if t != n / t {
                large.push(n / t);
            }
        }
        t += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(-4, 7), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(8, 2), 0);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(1, 0), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for &p in &[3i64, 5, 7, 11, 13, 101] {
            for d in -60i64..60 {
                let e = Integer::from(d.rem_euclid(p)).pow_mod(&Integer::from((p - 1) / 2), &Integer::from(p)).unwrap();
                let want = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(kronecker(d, p), want, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_completely_multiplicative() {
        for &d in &[-3i64, -4, -7, -8, 5, 8, 12, 13, -15, 21] {
            assert!(Discriminant::new(d).unwrap().is_fundamental() || d == 12 || d == 21);
            for n in 1..=1000i64 {
                for m in [2i64, 3, 7, 10] {
                    assert_eq!(kronecker(d, n * m), kronecker(d, n) * kronecker(d, m));
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(1, 1), 1);
        assert_eq!(sigma(1, 6), 12);
        assert_eq!(sigma(0, 12), 6);
        assert_eq!(sigma(3, 2), 9);
    }

    #[test]
    fn discriminant_flags() {
        assert!(Discriminant::new(2).is_err());
        assert!(Discriminant::new(0).is_err());
        let d = Discriminant::new(-3).unwrap();
        assert!(d.is_fundamental() && !d.is_square());
        assert!(!Discriminant::new(-12).unwrap().is_fundamental());
        assert!(Discriminant::new(-4).unwrap().is_fundamental());
        assert!(Discriminant::new(8).unwrap().is_fundamental());
        assert!(!Discriminant::new(4).unwrap().is_fundamental());
        assert!(Discriminant::new(9).unwrap().is_square());
        assert!(Discriminant::new(1).unwrap().is_fundamental());
        assert!(!Discriminant::new(-16).unwrap().is_fundamental());
    }

    proptest! {
        #[test]
        fn isqrt_is_floor_sqrt(n in 0u64..1u64 << 50) {
            let r = isqrt(n);
            prop_assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }

        #[test]
        fn divisor_count_matches_sigma0(n in 1u64..5000) {
            prop_assert_eq!(Integer::from(divisors(n).len()), sigma(0, n));
        }
    }
}
