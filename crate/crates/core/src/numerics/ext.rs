//! Fixed-precision real and complex scalars on top of MPFR.
//!
//! Every value carries its mantissa width. Binary operations between values of
//! different width are a programming error: the operators panic, the `try_*`
//! variants return [`NumericsError::PrecisionMismatch`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::{Constant, Special};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::NumericsError;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Extended-precision real number.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct ExtReal(Float);

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(24))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.prec() as f64) * 0.30103) as usize);
        write!(f, "{}", self.to_decimal(digits.max(1)))
    }
}

#[inline]
fn same_prec(a: &Float, b: &Float) {
    assert_eq!(
        a.prec(),
        b.prec(),
        "precision mismatch between ExtReal operands ({} vs {} bits)",
        a.prec(),
        b.prec()
    );
}

impl ExtReal {
    pub fn zero(prec: u32) -> Self {
        ExtReal(Float::new(prec))
    }
    pub fn one(prec: u32) -> Self {
        ExtReal(Float::with_val(prec, 1))
    }
    pub fn from_f64(v: f64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, v))
    }
    pub fn from_i64(v: i64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, v))
    }
    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, v))
    }
    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, v))
    }
    /// `num/den` rounded once.
    pub fn ratio(num: i64, den: i64, prec: u32) -> Self {
        Self::from_rational(&Rational::from((num, den)), prec)
    }
    /// Parse a decimal string (e.g. `"1.25e-3"`).
    pub fn parse(s: &str, prec: u32) -> Result<Self, NumericsError> {
        let p = Float::parse(s.trim()).map_err(|e| NumericsError::Parse(format!("{s:?}: {e}")))?;
        Ok(ExtReal(Float::with_val(prec, p)))
    }
    pub fn pi(prec: u32) -> Self {
        ExtReal(Float::with_val(prec, Constant::Pi))
    }
    pub fn nan(prec: u32) -> Self {
        ExtReal(Float::with_val(prec, Special::Nan))
    }
    pub fn inner(&self) -> &Float {
        &self.0
    }
    pub fn into_inner(self) -> Float {
        self.0
    }
    pub fn from_float(f: Float) -> Self {
        ExtReal(f)
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }
    /// Explicit precision change (the only sanctioned way to mix widths).
    pub fn with_prec(&self, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    /// Scientific decimal string with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".into();
        }
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        self.0.to_string_radix(10, Some(digits.max(1)))
    }
    /// Nearest integer.
    pub fn round_integer(&self) -> Option<Integer> {
        self.0.to_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }
    pub fn signum_f64(&self) -> f64 {
        if self.0.is_zero() {
            0.0
        } else if self.0.is_sign_negative() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, NumericsError> {
        self.check(o)?;
        Ok(ExtReal(Float::with_val(self.prec(), &self.0 + &o.0)))
    }
    pub fn try_mul(&self, o: &Self) -> Result<Self, NumericsError> {
        self.check(o)?;
        Ok(ExtReal(Float::with_val(self.prec(), &self.0 * &o.0)))
    }
    fn check(&self, o: &Self) -> Result<(), NumericsError> {
        if self.prec() != o.prec() {
            return Err(NumericsError::PrecisionMismatch(self.prec(), o.prec()));
        }
        Ok(())
    }

    pub fn abs(&self) -> Self {
        ExtReal(self.0.clone().abs())
    }
    pub fn sqr(&self) -> Self {
        ExtReal(self.0.clone().square())
    }
    pub fn sqrt(&self) -> Self {
        ExtReal(self.0.clone().sqrt())
    }
    pub fn recip(&self) -> Self {
        ExtReal(self.0.clone().recip())
    }
    pub fn exp(&self) -> Self {
        ExtReal(self.0.clone().exp())
    }
    pub fn ln(&self) -> Self {
        ExtReal(self.0.clone().ln())
    }
    pub fn sin(&self) -> Self {
        ExtReal(self.0.clone().sin())
    }
    pub fn cos(&self) -> Self {
        ExtReal(self.0.clone().cos())
    }
    pub fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.0.clone().sin_cos(Float::new(self.prec()));
        (ExtReal(s), ExtReal(c))
    }
    pub fn sinh(&self) -> Self {
        ExtReal(self.0.clone().sinh())
    }
    pub fn cosh(&self) -> Self {
        ExtReal(self.0.clone().cosh())
    }
    pub fn atan2(&self, x: &Self) -> Self {
        same_prec(&self.0, &x.0);
        ExtReal(self.0.clone().atan2(&x.0))
    }
    pub fn floor(&self) -> Self {
        ExtReal(self.0.clone().floor())
    }
    pub fn round(&self) -> Self {
        ExtReal(self.0.clone().round())
    }
    /// `self^e` for real `e`.
    pub fn pow(&self, e: &Self) -> Self {
        same_prec(&self.0, &e.0);
        ExtReal(self.0.clone().pow(&e.0))
    }
    pub fn powf(&self, e: f64) -> Self {
        self.pow(&ExtReal::from_f64(e, self.prec()))
    }
    pub fn powi(&self, e: i32) -> Self {
        ExtReal(self.0.clone().pow(e))
    }
    pub fn gamma(&self) -> Self {
        ExtReal(self.0.clone().gamma())
    }
    pub fn ln_gamma(&self) -> Self {
        ExtReal(self.0.clone().ln_gamma())
    }
    pub fn digamma(&self) -> Self {
        ExtReal(self.0.clone().digamma())
    }
    pub fn zeta(&self) -> Self {
        ExtReal(self.0.clone().zeta())
    }
    pub fn erf(&self) -> Self {
        ExtReal(self.0.clone().erf())
    }
    pub fn erfc(&self) -> Self {
        ExtReal(self.0.clone().erfc())
    }
    pub fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
    pub fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }
    pub fn cmp_f64(&self, v: f64) -> Ordering {
        self.0.partial_cmp(&v).unwrap_or(Ordering::Equal)
    }
    /// log2 of |self| as f64 (−inf for zero).
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self.0.get_exp() {
            Some(e) => {
                let m = self.0.clone().abs() >> e;
                e as f64 + m.to_f64().log2()
            }
            None => f64::NAN,
        }
    }
    /// True if `self` is a non-positive integer.
    pub fn is_nonpositive_integer(&self) -> bool {
        self.0.is_integer() && !self.0.is_sign_positive() || self.0.is_zero()
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, o: &ExtReal) -> ExtReal {
                same_prec(&self.0, &o.0);
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op &o.0))
            }
        }
        impl $tr<ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, o: ExtReal) -> ExtReal {
                same_prec(&self.0, &o.0);
                ExtReal(self.0 $op o.0)
            }
        }
        impl $tr<&ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, o: &ExtReal) -> ExtReal {
                same_prec(&self.0, &o.0);
                ExtReal(self.0 $op &o.0)
            }
        }
        impl $tr<ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, o: ExtReal) -> ExtReal {
                same_prec(&self.0, &o.0);
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op &o.0))
            }
        }
        impl $tr<f64> for ExtReal {
            type Output = ExtReal;
            fn $m(self, o: f64) -> ExtReal {
                ExtReal(self.0 $op o)
            }
        }
        impl $tr<f64> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, o: f64) -> ExtReal {
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op o))
            }
        }
        impl $tr<i64> for ExtReal {
            type Output = ExtReal;
            fn $m(self, o: i64) -> ExtReal {
                ExtReal(self.0 $op o)
            }
        }
        impl $tr<i64> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, o: i64) -> ExtReal {
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op o))
            }
        }
    };
}
real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}
impl Neg for &ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0.clone())
    }
}
impl AddAssign<&ExtReal> for ExtReal {
    fn add_assign(&mut self, o: &ExtReal) {
        same_prec(&self.0, &o.0);
        self.0 += &o.0;
    }
}
impl AddAssign<ExtReal> for ExtReal {
    fn add_assign(&mut self, o: ExtReal) {
        same_prec(&self.0, &o.0);
        self.0 += o.0;
    }
}
impl SubAssign<&ExtReal> for ExtReal {
    fn sub_assign(&mut self, o: &ExtReal) {
        same_prec(&self.0, &o.0);
        self.0 -= &o.0;
    }
}
impl SubAssign<ExtReal> for ExtReal {
    fn sub_assign(&mut self, o: ExtReal) {
        same_prec(&self.0, &o.0);
        self.0 -= o.0;
    }
}
impl MulAssign<&ExtReal> for ExtReal {
    fn mul_assign(&mut self, o: &ExtReal) {
        same_prec(&self.0, &o.0);
        self.0 *= &o.0;
    }
}
impl MulAssign<f64> for ExtReal {
    fn mul_assign(&mut self, o: f64) {
        self.0 *= o;
    }
}

impl std::ops::Shr<u32> for ExtReal {
    type Output = ExtReal;
    fn shr(self, k: u32) -> ExtReal {
        ExtReal(self.0 >> k)
    }
}

macro_rules! scalar_lhs {
    ($t:ty) => {
        impl Add<ExtReal> for $t {
            type Output = ExtReal;
            fn add(self, o: ExtReal) -> ExtReal {
                o + self
            }
        }
        impl Add<&ExtReal> for $t {
            type Output = ExtReal;
            fn add(self, o: &ExtReal) -> ExtReal {
                o + self
            }
        }
        impl Mul<ExtReal> for $t {
            type Output = ExtReal;
            fn mul(self, o: ExtReal) -> ExtReal {
                o * self
            }
        }
        impl Mul<&ExtReal> for $t {
            type Output = ExtReal;
            fn mul(self, o: &ExtReal) -> ExtReal {
                o * self
            }
        }
        impl Sub<ExtReal> for $t {
            type Output = ExtReal;
            fn sub(self, o: ExtReal) -> ExtReal {
                -(o - self)
            }
        }
        impl Sub<&ExtReal> for $t {
            type Output = ExtReal;
            fn sub(self, o: &ExtReal) -> ExtReal {
                -(o - self)
            }
        }
        impl Div<ExtReal> for $t {
            type Output = ExtReal;
            fn div(self, o: ExtReal) -> ExtReal {
                o.recip() * self
            }
        }
        impl Div<&ExtReal> for $t {
            type Output = ExtReal;
            fn div(self, o: &ExtReal) -> ExtReal {
                o.recip() * self
            }
        }
    };
}
scalar_lhs!(f64);
scalar_lhs!(i64);

impl PartialEq<f64> for ExtReal {
    fn eq(&self, o: &f64) -> bool {
        self.0 == *o
    }
}
impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, o: &f64) -> Option<Ordering> {
        self.0.partial_cmp(o)
    }
}

/// Extended-precision complex number as a pair of [`ExtReal`]s.
#[derive(Clone, PartialEq)]
pub struct ExtComplex {
    pub re: ExtReal,
    pub im: ExtReal,
}

impl fmt::Debug for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl ExtComplex {
    pub fn new(re: ExtReal, im: ExtReal) -> Self {
        same_prec(&re.0, &im.0);
        ExtComplex { re, im }
    }
    pub fn zero(prec: u32) -> Self {
        ExtComplex { re: ExtReal::zero(prec), im: ExtReal::zero(prec) }
    }
    pub fn one(prec: u32) -> Self {
        ExtComplex { re: ExtReal::one(prec), im: ExtReal::zero(prec) }
    }
    pub fn i(prec: u32) -> Self {
        ExtComplex { re: ExtReal::zero(prec), im: ExtReal::one(prec) }
    }
    pub fn from_real(re: ExtReal) -> Self {
        let p = re.prec();
        ExtComplex { re, im: ExtReal::zero(p) }
    }
    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ExtComplex { re: ExtReal::from_f64(re, prec), im: ExtReal::from_f64(im, prec) }
    }
    pub fn prec(&self) -> u32 {
        self.re.prec()
    }
    pub fn with_prec(&self, prec: u32) -> Self {
        ExtComplex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
    pub fn conj(&self) -> Self {
        ExtComplex { re: self.re.clone(), im: -&self.im }
    }
    pub fn norm_sqr(&self) -> ExtReal {
        self.re.sqr() + self.im.sqr()
    }
    pub fn abs(&self) -> ExtReal {
        ExtReal(self.re.0.clone().hypot(&self.im.0))
    }
    pub fn arg(&self) -> ExtReal {
        self.im.atan2(&self.re)
    }
    pub fn scale(&self, k: &ExtReal) -> Self {
        ExtComplex { re: &self.re * k, im: &self.im * k }
    }
    pub fn scale_f64(&self, k: f64) -> Self {
        ExtComplex { re: &self.re * k, im: &self.im * k }
    }
    /// Multiply by i.
    pub fn mul_i(&self) -> Self {
        ExtComplex { re: -&self.im, im: self.re.clone() }
    }
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        ExtComplex { re: &self.re / &n, im: -(&self.im / &n) }
    }
    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        let (s, c) = self.im.sin_cos();
        ExtComplex { re: &r * &c, im: r * s }
    }
    /// e^{iθ}.
    pub fn cis(theta: &ExtReal) -> Self {
        let (s, c) = theta.sin_cos();
        ExtComplex { re: c, im: s }
    }
    /// e(t) = e^{2πit}.
    pub fn e(t: &ExtReal) -> Self {
        let two_pi = ExtReal::pi(t.prec()) * 2.0;
        Self::cis(&(two_pi * t))
    }
    /// Principal-branch power with real exponent.
    pub fn powf(&self, e: &ExtReal) -> Self {
        let r = self.abs().pow(e);
        let th = self.arg() * e;
        Self::cis(&th).scale(&r)
    }
    /// Integer power by repeated squaring.
    pub fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = ExtComplex::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }
    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

macro_rules! cplx_binop_body {
    (add, $a:expr, $b:expr) => {
        ExtComplex { re: &$a.re + &$b.re, im: &$a.im + &$b.im }
    };
    (sub, $a:expr, $b:expr) => {
        ExtComplex { re: &$a.re - &$b.re, im: &$a.im - &$b.im }
    };
    (mul, $a:expr, $b:expr) => {
        ExtComplex {
            re: &$a.re * &$b.re - &$a.im * &$b.im,
            im: &$a.re * &$b.im + &$a.im * &$b.re,
        }
    };
    (div, $a:expr, $b:expr) => {{
        let n = $b.norm_sqr();
        ExtComplex {
            re: (&$a.re * &$b.re + &$a.im * &$b.im) / &n,
            im: (&$a.im * &$b.re - &$a.re * &$b.im) / &n,
        }
    }};
}

macro_rules! cplx_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&ExtComplex> for &ExtComplex {
            type Output = ExtComplex;
            fn $m(self, o: &ExtComplex) -> ExtComplex {
                cplx_binop_body!($m, self, o)
            }
        }
        impl $tr<ExtComplex> for ExtComplex {
            type Output = ExtComplex;
            fn $m(self, o: ExtComplex) -> ExtComplex {
                cplx_binop_body!($m, self, o)
            }
        }
        impl $tr<&ExtComplex> for ExtComplex {
            type Output = ExtComplex;
            fn $m(self, o: &ExtComplex) -> ExtComplex {
                cplx_binop_body!($m, self, o)
            }
        }
        impl $tr<ExtComplex> for &ExtComplex {
            type Output = ExtComplex;
            fn $m(self, o: ExtComplex) -> ExtComplex {
                cplx_binop_body!($m, self, o)
            }
        }
    };
}
cplx_binop!(Add, add);
cplx_binop!(Sub, sub);
cplx_binop!(Mul, mul);
cplx_binop!(Div, div);

impl Mul<&ExtReal> for &ExtComplex {
    type Output = ExtComplex;
    fn mul(self, k: &ExtReal) -> ExtComplex {
        self.scale(k)
    }
}
impl Mul<&ExtReal> for ExtComplex {
    type Output = ExtComplex;
    fn mul(self, k: &ExtReal) -> ExtComplex {
        self.scale(k)
    }
}
impl Mul<f64> for &ExtComplex {
    type Output = ExtComplex;
    fn mul(self, k: f64) -> ExtComplex {
        self.scale_f64(k)
    }
}
impl Mul<f64> for ExtComplex {
    type Output = ExtComplex;
    fn mul(self, k: f64) -> ExtComplex {
        self.scale_f64(k)
    }
}
impl Neg for ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex { re: -self.re, im: -self.im }
    }
}
impl Neg for &ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex { re: -&self.re, im: -&self.im }
    }
}
impl AddAssign<&ExtComplex> for ExtComplex {
    fn add_assign(&mut self, o: &ExtComplex) {
        self.re += &o.re;
        self.im += &o.im;
    }
}
impl AddAssign<ExtComplex> for ExtComplex {
    fn add_assign(&mut self, o: ExtComplex) {
        self.re += o.re;
        self.im += o.im;
    }
}
impl SubAssign<&ExtComplex> for ExtComplex {
    fn sub_assign(&mut self, o: &ExtComplex) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}
