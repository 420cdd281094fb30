//! Truncated Laurent q-series with exact (or extended-precision) coefficients,
//! the classical modular objects, and evaluation at points of ℍ with a tail bound.

mod classical;

pub use classical::{
    delta, eisenstein_e4, eisenstein_e6, euler_product, faber, j_invariant, theta1_series, theta_series,
};

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{ExtComplex, ExtReal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QSeriesError {
    #[error("division by a series with zero or non-invertible leading coefficient")]
    NotInvertible,
    #[error("coefficient q^{n} requested beyond the known range (known through q^{n_max})")]
    OutOfRange { n: i64, n_max: i64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tail bound {bound:e} exceeds tolerance {tol:e}; retry with N ≥ {suggested_n}")]
    Convergence { bound: f64, tol: f64, suggested_n: i64 },
}

/// Coefficient ring of a q-series.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Multiplicative inverse if it exists in the ring.
    fn inverse(&self) -> Option<Self>;
    fn to_ext(&self, prec: u32) -> ExtReal;
    fn to_decimal(&self) -> String;
    /// z·c, used by evaluation.
    fn times(&self, z: &ExtComplex) -> ExtComplex {
        z.scale(&self.to_ext(z.prec()))
    }
    /// |c| to a few dozen bits, used by growth envelopes.
    fn magnitude(&self) -> ExtReal {
        self.to_ext(64).abs()
    }
}

impl Coeff for Integer {
    fn zero_like(&self) -> Self {
        Integer::new()
    }
    fn one_like(&self) -> Self {
        Integer::from(1)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Self {
        Integer::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Integer::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Integer::from(self * o)
    }
    fn inverse(&self) -> Option<Self> {
        (*self == 1 || *self == -1).then(|| self.clone())
    }
    fn to_ext(&self, prec: u32) -> ExtReal {
        ExtReal::from_integer(self, prec)
    }
    fn to_decimal(&self) -> String {
        self.to_string()
    }
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn inverse(&self) -> Option<Self> {
        (*self != 0).then(|| Rational::from(self.recip_ref()))
    }
    fn to_ext(&self, prec: u32) -> ExtReal {
        ExtReal::from_rational(self, prec)
    }
    fn to_decimal(&self) -> String {
        self.to_string()
    }
}

impl Coeff for ExtReal {
    fn zero_like(&self) -> Self {
        ExtReal::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        ExtReal::one(self.prec())
    }
    fn is_zero(&self) -> bool {
        ExtReal::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inverse(&self) -> Option<Self> {
        (!ExtReal::is_zero(self)).then(|| self.recip())
    }
    fn to_ext(&self, prec: u32) -> ExtReal {
        self.with_prec(prec)
    }
    fn to_decimal(&self) -> String {
        ExtReal::to_decimal(self, (self.prec() as f64 * std::f64::consts::LOG10_2) as usize)
    }
}

impl Coeff for ExtComplex {
    fn zero_like(&self) -> Self {
        ExtComplex::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        ExtComplex::one(self.prec())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inverse(&self) -> Option<Self> {
        (!Coeff::is_zero(self)).then(|| self.recip())
    }
    /// Real part.
    fn to_ext(&self, prec: u32) -> ExtReal {
        self.re.with_prec(prec)
    }
    fn to_decimal(&self) -> String {
        let im = Coeff::to_decimal(&self.im);
        let sep = if im.starts_with('-') { "" } else { "+" };
        format!("{}{sep}{im}i", Coeff::to_decimal(&self.re))
    }
    fn times(&self, z: &ExtComplex) -> ExtComplex {
        if self.prec() == z.prec() {
            z * self
        } else {
            z * &self.with_prec(z.prec())
        }
    }
    fn magnitude(&self) -> ExtReal {
        self.with_prec(64).abs()
    }
}

/// Residue-class support tag for plus-space series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    All,
    /// weight 1/2: n ≡ 0, 1 (mod 4)
    PlusHalf,
    /// weight 3/2: n ≡ 0, 3 (mod 4)
    PlusThreeHalves,
}

impl Support {
    pub fn allows(self, n: i64) -> bool {
        match self {
            Support::All => true,
            Support::PlusHalf => matches!(n.rem_euclid(4), 0 | 1),
            Support::PlusThreeHalves => matches!(n.rem_euclid(4), 0 | 3),
        }
    }
}

/// Σ_{n=v}^{N} c_n qⁿ + O(q^{N+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<C> {
    val: i64,
    coeffs: Vec<C>,
    support: Support,
}

/// One exported coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub n: i64,
    pub coeff: String,
}

impl<C: Coeff> QSeries<C> {
    /// Coefficients c_v, c_{v+1}, …; the series is known through q^{v+len−1}.
    pub fn new(val: i64, coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series needs at least one known coefficient");
        QSeries { val, coeffs, support: Support::All }
    }

    /// Build from a closure c(n) for v ≤ n ≤ n_max.
    pub fn from_fn(val: i64, n_max: i64, f: impl FnMut(i64) -> C) -> Self {
        QSeries::new(val, (val..=n_max).map(f).collect())
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }
    pub fn support(&self) -> Support {
        self.support
    }
    /// Check that coefficients outside the tagged residue classes vanish.
    pub fn check_support(&self) -> bool {
        self.iter().all(|(n, c)| self.support.allows(n) || c.is_zero())
    }

    /// Nominal starting exponent (the coefficient there may be zero).
    pub fn val(&self) -> i64 {
        self.val
    }
    /// Largest exponent with a known coefficient.
    pub fn n_max(&self) -> i64 {
        self.val + self.coeffs.len() as i64 - 1
    }
    /// c_n; zero below the valuation, an error beyond n_max.
    pub fn coeff(&self, n: i64) -> Result<C, QSeriesError> {
        if n > self.n_max() {
            return Err(QSeriesError::OutOfRange { n, n_max: self.n_max() });
        }
        Ok(if n < self.val { self.coeffs[0].zero_like() } else { self.coeffs[(n - self.val) as usize].clone() })
    }
    pub fn coeff_ref(&self, n: i64) -> Option<&C> {
        if n < self.val || n > self.n_max() {
            None
        } else {
            Some(&self.coeffs[(n - self.val) as usize])
        }
    }
    pub fn iter(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.val + i as i64, c))
    }
    fn zero_c(&self) -> C {
        self.coeffs[0].zero_like()
    }

    /// Drop leading zero coefficients (keeps at least one coefficient).
    pub fn normalized(mut self) -> Self {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count().min(self.coeffs.len() - 1);
        self.coeffs.drain(..k);
        self.val += k as i64;
        self
    }

    /// Forget coefficients beyond q^{n_max}.
    pub fn truncate(mut self, n_max: i64) -> Self {
        assert!(n_max >= self.val, "truncation below the valuation");
        self.coeffs.truncate((n_max - self.val + 1) as usize);
        self
    }

    /// Same series stored from a lower nominal valuation.
    pub fn extend_down(mut self, val: i64) -> Self {
        if val < self.val {
            let z = self.zero_c();
            let mut pad = vec![z; (self.val - val) as usize];
            pad.append(&mut self.coeffs);
            self.coeffs = pad;
            self.val = val;
        }
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }
    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let val = self.val.min(o.val);
        let n_max = self.n_max().min(o.n_max());
        let z = self.zero_c();
        let coeffs = (val..=n_max.max(val))
            .map(|n| f(self.coeff_ref(n).unwrap_or(&z), o.coeff_ref(n).unwrap_or(&z)))
            .collect();
        QSeries { val, coeffs, support: if self.support == o.support { self.support } else { Support::All } }
    }

    pub fn scale(&self, k: &C) -> Self {
        QSeries { val: self.val, coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(), support: self.support }
    }
    pub fn neg(&self) -> Self {
        let z = self.zero_c();
        QSeries { val: self.val, coeffs: self.coeffs.iter().map(|c| z.sub(c)).collect(), support: self.support }
    }
    /// Multiply by q^k.
    pub fn shift(&self, k: i64) -> Self {
        QSeries { val: self.val + k, coeffs: self.coeffs.clone(), support: Support::All }
    }
    /// A(q^k), i.e. τ ↦ kτ.
    pub fn dilate(&self, k: i64) -> Self {
        assert!(k >= 1);
        let z = self.zero_c();
        let mut coeffs = vec![z; (k as usize) * (self.coeffs.len() - 1) + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        QSeries { val: self.val * k, coeffs, support: Support::All }
    }

    /// Cauchy product; known through min(N_A + v_B, N_B + v_A).
    pub fn mul(&self, o: &Self) -> Self {
        let val = self.val + o.val;
        let n_max = (self.n_max() + o.val).min(o.n_max() + self.val);
        let len = (n_max - val + 1) as usize;
        let z = self.zero_c();
        let mut coeffs = vec![z; len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        QSeries { val, coeffs, support: Support::All }
    }

    /// 1/A, requiring an invertible leading coefficient (after dropping leading zeros).
    pub fn inverse(&self) -> Result<Self, QSeriesError> {
        let a = self.clone().normalized();
        let inv0 = a.coeffs[0].inverse().ok_or(QSeriesError::NotInvertible)?;
        let len = a.coeffs.len();
        let mut b: Vec<C> = Vec::with_capacity(len);
        b.push(inv0.clone());
        for k in 1..len {
            let mut s = a.zero_c();
            for i in 1..=k {
                s = s.add(&a.coeffs[i].mul(&b[k - i]));
            }
            b.push(a.zero_c().sub(&s.mul(&inv0)));
        }
        Ok(QSeries { val: -a.val, coeffs: b, support: Support::All })
    }

    pub fn div(&self, o: &Self) -> Result<Self, QSeriesError> {
        Ok(self.mul(&o.inverse()?))
    }

    /// A^k for integer k (negative powers need an invertible leading coefficient).
    pub fn pow(&self, k: i64) -> Result<Self, QSeriesError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let one = {
            let mut c = vec![self.zero_c(); base.coeffs.len()];
            c[0] = base.coeffs[0].one_like();
            QSeries::new(0, c)
        };
        let mut acc = one;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        QSeries { val: self.val, coeffs: self.coeffs.iter().map(f).collect(), support: self.support }
    }

    /// Export as [{n, coeff}] with decimal-string coefficients.
    pub fn to_rows(&self) -> Vec<SeriesRow> {
        self.iter().map(|(n, c)| SeriesRow { n, coeff: c.to_decimal() }).collect()
    }

    /// A crude growth envelope |c_n| ≤ A·e^{κ√n}, fitted to the known coefficients.
    ///
    /// κ defaults to 4π√max(1, −v) (the weight-0 rate for a pole of order −v); A is
    /// twice the largest |c_n|e^{−κ√n} over the upper half of the known range.
    pub fn growth_envelope(&self) -> Envelope {
        self.growth_envelope_with(4.0 * std::f64::consts::PI * ((-self.val).max(1) as f64).sqrt())
    }

    /// Envelope with a prescribed exponential rate κ (e.g. π√|v| for plus-space forms
    /// on Γ₀(4) with a pole of order |v|).
    pub fn growth_envelope_with(&self, kappa: f64) -> Envelope {
        let lo = (self.n_max() / 2).max(1).max(self.val);
        let mut ln_a = f64::NEG_INFINITY;
        for n in lo..=self.n_max() {
            let c = self.coeff_ref(n).expect("in range");
            if c.is_zero() {
                continue;
            }
            let l = c.magnitude().ln().to_f64() - kappa * (n as f64).sqrt();
            ln_a = ln_a.max(l);
        }
        Envelope { ln_a: ln_a + std::f64::consts::LN_2, kappa }
    }

    /// Σ_{n ≤ N} c_n e(scale·n·τ), with a tail bound from the coefficient envelope.
    pub fn evaluate(&self, tau: &ExtComplex, scale: &Rational, tol: Option<f64>) -> Result<Evaluation, QSeriesError> {
        self.evaluate_with(tau, scale, &self.growth_envelope(), tol)
    }

    pub fn evaluate_with(
        &self,
        tau: &ExtComplex,
        scale: &Rational,
        env: &Envelope,
        tol: Option<f64>,
    ) -> Result<Evaluation, QSeriesError> {
        if tau.im <= 0.0 {
            return Err(QSeriesError::Domain("evaluate needs Im τ > 0".into()));
        }
        if *scale <= 0 {
            return Err(QSeriesError::Domain("scale must be positive".into()));
        }
        let p = tau.prec();
        let y = tau.im.to_f64() * scale.to_f64();
        let n_max = self.n_max();
        let tail = env.tail_bound(n_max, y);
        if let Some(tol) = tol {
            if !(tail <= tol) {
                return Err(QSeriesError::Convergence { bound: tail, tol, suggested_n: env.suggest_n(y, tol) });
            }
        } else if !tail.is_finite() {
            return Err(QSeriesError::Convergence { bound: tail, tol: f64::INFINITY, suggested_n: env.suggest_n(y, 1e-10) });
        }
        let st = tau.scale(&ExtReal::from_rational(scale, p));
        let q = ExtComplex::e(&st.re).scale(&(ExtReal::pi(p) * -2.0 * &st.im).exp());
        let mut qn = q.powi(self.val);
        let mut acc = ExtComplex::zero(p);
        for c in &self.coeffs {
            if !c.is_zero() {
                acc += c.times(&qn);
            }
            qn = &qn * &q;
        }
        Ok(Evaluation { value: acc, tail_bound: tail })
    }
}

/// Value of a truncated series and a bound on the omitted tail.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: ExtComplex,
    pub tail_bound: f64,
}

/// |c_n| ≤ e^{ln_a}·e^{κ√n} for n beyond the known range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub ln_a: f64,
    pub kappa: f64,
}

impl Envelope {
    /// Σ_{n>N} A e^{κ√n} e^{−2πny}, using √n ≤ √N + (n−N)/(2√N).
    pub fn tail_bound(&self, n: i64, y: f64) -> f64 {
        let nf = (n.max(1)) as f64;
        let two_pi_y = 2.0 * std::f64::consts::PI * y;
        let ln_r = self.kappa / (2.0 * nf.sqrt()) - two_pi_y;
        if ln_r >= 0.0 {
            return f64::INFINITY;
        }
        let ln_first = self.ln_a + self.kappa * nf.sqrt() - two_pi_y * nf + ln_r;
        (ln_first - (-ln_r.exp()).ln_1p()).exp()
    }
    pub fn suggest_n(&self, y: f64, tol: f64) -> i64 {
        let mut n = 8i64;
        while self.tail_bound(n, y) > tol && n < 1 << 40 {
            n *= 2;
        }
        n
    }
}

/// An integer-coefficient series viewed over ℚ.
pub fn to_rational(a: &QSeries<Integer>) -> QSeries<Rational> {
    a.map(|c| Rational::from(c.clone()))
}
