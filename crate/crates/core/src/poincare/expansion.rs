use serde::{Deserialize, Serialize};

use super::sums::{bcoeff, coeff_c, Acceleration, SumOptions};
use super::PoincareError;
use crate::arithmetic::sigma;
use crate::numerics::{bessel_i, bessel_k, rgamma, sigma_real, whittaker_m, whittaker_w, xi_completed, zeta, ExtComplex, ExtReal};

/// Radial factor of a Fourier term; arguments are `a·π·y` with `a` an exact small number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// y^{1/2} I_ν(aπy)
    SqrtYBesselI { nu: f64, a: f64 },
    /// y^{1/2} K_ν(aπy)
    SqrtYBesselK { nu: f64, a: f64 },
    /// y^e
    Power { exponent: f64 },
    /// (aπy)^p M_{κ,μ}(aπy)
    WhittakerM { kappa: f64, mu: f64, a: f64, p: f64 },
    /// (aπy)^p W_{κ,μ}(aπy)
    WhittakerW { kappa: f64, mu: f64, a: f64, p: f64 },
}

impl Profile {
    pub fn eval(&self, y: &ExtReal) -> Result<ExtReal, PoincareError> {
        let prec = y.prec();
        let f = |v: f64| ExtReal::from_f64(v, prec);
        let arg = |a: f64| y * &ExtReal::pi(prec) * a;
        Ok(match *self {
            Profile::SqrtYBesselI { nu, a } => y.sqrt() * bessel_i(&f(nu), &arg(a))?,
            Profile::SqrtYBesselK { nu, a } => y.sqrt() * bessel_k(&f(nu), &arg(a))?,
            Profile::Power { exponent } => {
                if exponent == 0.0 {
                    ExtReal::one(prec)
                } else {
                    y.pow(&f(exponent))
                }
            }
            Profile::WhittakerM { kappa, mu, a, p } => {
                let z = arg(a);
                z.pow(&f(p)) * whittaker_m(&f(kappa), &f(mu), &z)?
            }
            Profile::WhittakerW { kappa, mu, a, p } => {
                let z = arg(a);
                z.pow(&f(p)) * whittaker_w(&f(kappa), &f(mu), &z)?.value
            }
        })
    }
}

/// coefficient · profile(y) · e(nx)
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub n: i64,
    pub coeff: ExtComplex,
    /// Estimated absolute error of `coeff` (from c-sum truncation).
    pub coeff_error: f64,
    pub profile: Profile,
}

/// A truncated Fourier expansion with fixed coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub terms: Vec<Term>,
    pub n_max: i64,
    pub c_max: u64,
    pub prec: u32,
    pub y_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: ExtComplex,
    /// Coefficient errors propagated through |profile| plus the size of the outermost
    /// Fourier terms as a truncation proxy.
    pub error_estimate: f64,
}

impl Expansion {
    fn empty(n_max: i64, c_max: u64, prec: u32) -> Self {
        Expansion { terms: Vec::new(), n_max, c_max, prec, y_min: 0.0 }
    }

    fn push(&mut self, n: i64, coeff: ExtComplex, coeff_error: f64, profile: Profile) {
        self.terms.push(Term { n, coeff, coeff_error, profile });
    }

    /// Σ wᵢ·Eᵢ as one expansion (terms concatenated).
    pub fn combine(parts: &[(f64, &Expansion)]) -> Expansion {
        let first = parts.first().expect("at least one part").1;
        let mut out = Expansion::empty(first.n_max, first.c_max, first.prec);
        for (w, e) in parts {
            out.y_min = out.y_min.max(e.y_min);
            for t in &e.terms {
                out.push(t.n, t.coeff.scale_f64(*w), t.coeff_error * w.abs(), t.profile);
            }
        }
        out
    }

    pub fn evaluate(&self, tau: &ExtComplex) -> Result<Evaluation, PoincareError> {
        let prec = self.prec;
        let tau = tau.with_prec(prec);
        if !(tau.im.cmp_f64(self.y_min.max(0.0)).is_gt()) {
            return Err(PoincareError::Domain(format!("Im τ must exceed {}", self.y_min)));
        }
        let y = &tau.im;
        let ex = ExtComplex::e(&tau.re);
        let mut value = ExtComplex::zero(prec);
        let mut err = 0.0;
        let mut edge = 0.0f64;
        for t in &self.terms {
            let p = t.profile.eval(y)?;
            let contrib = (&t.coeff * &p) * &ex.powi(t.n);
            let pa = p.abs().to_f64();
            err += t.coeff_error * pa;
            if t.n.abs() >= self.n_max - 1 && t.n != 0 {
                edge = edge.max(contrib.abs().to_f64());
            }
            value += contrib;
        }
        Ok(Evaluation { value, error_estimate: err + 2.0 * edge })
    }
}

/// Truncation and precision shared by the weight-0 evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub n_max: i64,
    pub c_max: u64,
    pub prec: u32,
    pub acceleration: Acceleration,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { n_max: 40, c_max: 4000, prec: 192, acceleration: Acceleration::Smooth }
    }
}

impl EvalOptions {
    fn sums(&self) -> SumOptions {
        SumOptions { c_max: self.c_max, acceleration: self.acceleration, tol: None }
    }
}

fn real(v: ExtReal) -> ExtComplex {
    ExtComplex::from_real(v)
}

/// G₀(τ,s) = y^s + ξ(2s−1)/ξ(2s) y^{1−s} + Σ_{n≠0} 2|n|^{s−1/2}σ_{1−2s}(|n|)/ξ(2s) · y^{1/2}K_{s−1/2}(2π|n|y) e(nx).
pub fn eisenstein_g0_expansion(s: f64, opts: &EvalOptions) -> Result<Expansion, PoincareError> {
    if !(s > 0.5 && s <= 2.0) || (s - 1.0).abs() < 1e-8 {
        return Err(PoincareError::Domain(format!("G₀ needs s ∈ (1/2, 2], s ≠ 1; got {s}")));
    }
    let p = opts.prec;
    let sx = ExtReal::from_f64(s, p);
    let xi2s = xi_completed(&(&sx * 2.0))?;
    let mut e = Expansion::empty(opts.n_max, 0, p);
    e.push(0, ExtComplex::one(p), 0.0, Profile::Power { exponent: s });
    e.push(0, real(xi_completed(&(&sx * 2.0 - 1.0))? / &xi2s), 0.0, Profile::Power { exponent: 1.0 - s });
    let alpha = 1.0 - &sx * 2.0;
    for n in 1..=opts.n_max {
        let c = ExtReal::from_i64(n, p).pow(&(&sx - 0.5)) * sigma_real(&alpha, n as u64) * 2.0 / &xi2s;
        let prof = Profile::SqrtYBesselK { nu: s - 0.5, a: 2.0 * n as f64 };
        e.push(n, real(c.clone()), 0.0, prof);
        e.push(-n, real(c), 0.0, prof);
    }
    Ok(e)
}

pub fn eisenstein_g0(tau: &ExtComplex, s: f64, opts: &EvalOptions) -> Result<Evaluation, PoincareError> {
    eisenstein_g0_expansion(s, opts)?.evaluate(tau)
}

/// G_m(τ,s): I-Bessel head at n = m, y^{1−s} constant term, K-Bessel tail with c_m(n,s).
pub fn niebur_expansion(m: i64, s: f64, opts: &EvalOptions) -> Result<Expansion, PoincareError> {
    if m == 0 {
        return Err(PoincareError::Domain("niebur_g needs m ≠ 0 (use eisenstein_g0)".into()));
    }
    if !(s > 0.75 && s <= 2.0) {
        return Err(PoincareError::Domain(format!("niebur_g needs s ∈ (3/4, 2], got {s}")));
    }
    let p = opts.prec;
    let pi = ExtReal::pi(p);
    let sx = ExtReal::from_f64(s, p);
    let am = m.unsigned_abs();
    let sqrt_m = ExtReal::from_i64(am as i64, p).sqrt();
    let mut e = Expansion::empty(opts.n_max, opts.c_max, p);
    e.push(m, real(&pi * 2.0 * &sqrt_m), 0.0, Profile::SqrtYBesselI { nu: s - 0.5, a: 2.0 * am as f64 });
    let two_s_1 = &sx * 2.0 - 1.0;
    let constant = &pi * 4.0 * ExtReal::from_i64(am as i64, p).pow(&(1.0 - &sx)) * sigma_real(&two_s_1, am) / (&two_s_1 * xi_completed(&(&sx * 2.0))?);
    e.push(0, real(constant), 0.0, Profile::Power { exponent: 1.0 - s });
    let pref = &pi * 4.0 * &sqrt_m;
    let sums = opts.sums();
    for n in (-opts.n_max..=opts.n_max).filter(|&n| n != 0) {
        let c = coeff_c(m, n, s, &sums)?;
        let pf = pref.to_f64();
        e.push(n, real(&pref * c.value), c.abs_error_estimate * pf, Profile::SqrtYBesselK { nu: s - 0.5, a: 2.0 * n.unsigned_abs() as f64 });
    }
    Ok(e)
}

pub fn niebur_g(m: i64, tau: &ExtComplex, s: f64, opts: &EvalOptions) -> Result<Evaluation, PoincareError> {
    niebur_expansion(m, s, opts)?.evaluate(tau)
}

/// j_m(τ,s) = G_{−m}(τ,s) − 2m^{1−s}σ_{2s−1}(m)π^{s+1/2}/(Γ(s+1/2)ζ(2s−1)) G₀(τ,s);
/// at s = 1 this is the limit G_{−m}(τ,1) − 24σ(m).
pub fn jm_expansion(m: i64, s: f64, opts: &EvalOptions) -> Result<Expansion, PoincareError> {
    if m < 1 {
        return Err(PoincareError::Domain("j_m needs m ≥ 1".into()));
    }
    let g = niebur_expansion(-m, s, opts)?;
    let p = opts.prec;
    if s == 1.0 {
        let mut out = g;
        let c = ExtReal::from_integer(&(sigma(1, m as u64) * 24u32), p);
        out.push(0, real(-c), 0.0, Profile::Power { exponent: 0.0 });
        return Ok(out);
    }
    let sx = ExtReal::from_f64(s, p);
    let coef = ExtReal::from_i64(m, p).pow(&(1.0 - &sx)) * 2.0 * sigma_real(&(&sx * 2.0 - 1.0), m as u64) * ExtReal::pi(p).pow(&(&sx + 0.5))
        * rgamma(&(&sx + 0.5))
        / zeta(&(&sx * 2.0 - 1.0))?;
    let g0 = eisenstein_g0_expansion(s, opts)?;
    let mut out = g;
    for t in g0.terms {
        out.push(t.n, -(&t.coeff * &coef), 0.0, t.profile);
    }
    Ok(out)
}

pub fn j_m(m: i64, tau: &ExtComplex, s: f64, opts: &EvalOptions) -> Result<Evaluation, PoincareError> {
    jm_expansion(m, s, opts)?.evaluate(tau)
}

/// Ĵ_m = ∂_s G_{−m}(·,s) at s = 1, by central differences at h and h/2 with Richardson.
#[derive(Debug, Clone)]
pub struct JHat {
    pub m: i64,
    pub h: f64,
    /// Richardson combination.
    pub expansion: Expansion,
    /// The finer central difference alone, for the disagreement estimate.
    pub fine: Expansion,
}

impl JHat {
    pub fn new(m: i64, h: f64, opts: &EvalOptions) -> Result<Self, PoincareError> {
        if m < 1 {
            return Err(PoincareError::Domain("Ĵ_m needs m ≥ 1".into()));
        }
        if !(h > 0.0 && h <= 0.1) {
            return Err(PoincareError::Domain(format!("step h must be in (0, 0.1], got {h}")));
        }
        let g = |s: f64| niebur_expansion(-m, s, opts);
        let (a, b, c, d) = (g(1.0 + h)?, g(1.0 - h)?, g(1.0 + h / 2.0)?, g(1.0 - h / 2.0)?);
        let w = 4.0 / (3.0 * h);
        let v = 1.0 / (6.0 * h);
        let expansion = Expansion::combine(&[(w, &c), (-w, &d), (-v, &a), (v, &b)]);
        let fine = Expansion::combine(&[(1.0 / h, &c), (-1.0 / h, &d)]);
        Ok(JHat { m, h, expansion, fine })
    }

    /// Value with error = coefficient error estimate + |Richardson − fine difference|.
    pub fn eval(&self, tau: &ExtComplex) -> Result<Evaluation, PoincareError> {
        let r = self.expansion.evaluate(tau)?;
        let f = self.fine.evaluate(tau)?;
        let gap = (&r.value - &f.value).abs().to_f64();
        Ok(Evaluation { error_estimate: r.error_estimate + gap, value: r.value })
    }
}

/// F_m⁺(τ,s) = 𝓜_m(y,s)e(mx) + Σ_{0<n≡0,3(4)} b_m(n,s)𝓦_n(y,s)e(nx).
///
/// Only n > 0 terms are included: the Kloosterman–Bessel formula for b_m(n,s) is
/// available for positive n only.
pub fn f32_expansion(m: i64, s: f64, opts: &EvalOptions, sums: &SumOptions) -> Result<Expansion, PoincareError> {
    if m <= 0 || !matches!(m % 4, 0 | 3) {
        return Err(PoincareError::Domain(format!("F_m⁺ needs m > 0, m ≡ 0, 3 (mod 4); got {m}")));
    }
    if !(s >= 0.75 && s <= 1.2) {
        return Err(PoincareError::Domain(format!("F_m⁺ needs s ∈ [3/4, 1.2], got {s}")));
    }
    let p = opts.prec;
    let sx = ExtReal::from_f64(s, p);
    let mu = s - 0.5;
    let mut e = Expansion::empty(opts.n_max, sums.c_max, p);
    e.push(m, real(rgamma(&(&sx * 2.0))), 0.0, Profile::WhittakerM { kappa: 0.75, mu, a: 4.0 * m as f64, p: -0.75 });
    let rg = rgamma(&(&sx + 0.75));
    for n in (1..=opts.n_max).filter(|n| matches!(n % 4, 0 | 3)) {
        let b = bcoeff(m, n, s, sums)?;
        let k = ExtReal::from_i64(n, p).sqrt() * &rg;
        let kf = k.to_f64();
        e.push(n, real(&k * b.value), b.abs_error_estimate * kf, Profile::WhittakerW { kappa: 0.75, mu, a: 4.0 * n as f64, p: -0.75 });
    }
    Ok(e)
}

pub fn assemble_f32(m: i64, tau: &ExtComplex, s: f64, opts: &EvalOptions, sums: &SumOptions) -> Result<Evaluation, PoincareError> {
    f32_expansion(m, s, opts, sums)?.evaluate(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::{laplacian0, laplacian_k};
    use crate::qseries::{faber, j_invariant};
    use rug::Rational;

    fn tau(x: f64, y: f64) -> ExtComplex {
        ExtComplex::from_f64(x, y, 192)
    }

    fn small() -> EvalOptions {
        EvalOptions { n_max: 12, c_max: 1000, ..EvalOptions::default() }
    }

    /// Enough Fourier terms for Im τ = 1/2.
    fn wide() -> EvalOptions {
        EvalOptions { n_max: 40, c_max: 4000, ..EvalOptions::default() }
    }

    fn diff(a: &Evaluation, b: &Evaluation) -> f64 {
        (&a.value - &b.value).abs().to_f64()
    }

    #[test]
    fn g0_invariance_and_leading_behavior() {
        let opts = EvalOptions { n_max: 30, ..EvalOptions::default() };
        let e = eisenstein_g0_expansion(1.3, &opts).unwrap();
        let a = e.evaluate(&tau(0.0, 2.0)).unwrap();
        let b = e.evaluate(&tau(0.0, 0.5)).unwrap();
        assert!(diff(&a, &b) < 1e-10, "{}", diff(&a, &b));
        // T-invariance
        let c = e.evaluate(&tau(0.25, 0.7)).unwrap();
        let d = e.evaluate(&tau(1.25, 0.7)).unwrap();
        assert!(diff(&c, &d) < 1e-40);
        let y = 10.0f64;
        let v = e.evaluate(&tau(0.0, y)).unwrap().value.re.to_f64();
        let xi = |t: f64| xi_completed(&ExtReal::from_f64(t, 128)).unwrap().to_f64();
        let lead = y.powf(1.3) + xi(1.6) / xi(2.6) * y.powf(-0.3);
        assert!((v - lead).abs() < 1e-20);
        assert!(eisenstein_g0_expansion(1.0, &opts).is_err());
    }

    #[test]
    fn g0_eigen_equation() {
        let e = eisenstein_g0_expansion(1.3, &EvalOptions::default()).unwrap();
        let t = tau(0.2, 1.1);
        let f = |z: &ExtComplex| e.evaluate(z).map(|v| v.value);
        let lap = laplacian0(&f, &t, None).unwrap();
        let g = f(&t).unwrap();
        let res = (&lap - &g.scale_f64(1.3 - 1.69)).abs().to_f64();
        assert!(res < 1e-4, "{res}");
    }

    #[test]
    fn niebur_at_one_gives_j() {
        let opts = small();
        let g = niebur_g(-1, &tau(0.0, 1.5), 1.0, &opts).unwrap();
        let j = j_invariant(40).evaluate(&tau(0.0, 1.5), &Rational::from(1), None).unwrap();
        // J = j − 744; G_{−1}(τ,1) − 24 = J
        let want = j.value.re.to_f64() - 744.0;
        let got = g.value.re.to_f64() - 24.0;
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        let jm = j_m(2, &tau(0.1, 1.2), 1.0, &opts).unwrap();
        let f2 = faber(2, 40).evaluate(&tau(0.1, 1.2), &Rational::from(1), None).unwrap();
        assert!((&jm.value - &f2.value).abs().to_f64() < 1e-5);
    }

    #[test]
    fn jm_off_one_matches_limit() {
        // j_m(τ,s) is continuous at s = 1
        let opts = small();
        let t = tau(0.1, 1.1);
        let a = j_m(1, &t, 1.0, &opts).unwrap();
        let b = j_m(1, &t, 1.0 + 1e-5, &opts).unwrap();
        assert!(diff(&a, &b) < 1e-2, "{}", diff(&a, &b));
    }

    #[test]
    fn niebur_eigen_equation_and_invariance() {
        let opts = small();
        let e = niebur_expansion(-1, 1.3, &opts).unwrap();
        let f = |z: &ExtComplex| e.evaluate(z).map(|v| v.value);
        let t = tau(0.13, 0.9);
        let lap = laplacian0(&f, &t, None).unwrap();
        let g = f(&t).unwrap();
        let res = (&lap - &g.scale_f64(1.3 - 1.69)).abs().to_f64() / g.abs().to_f64();
        assert!(res < 1e-3, "{res}");
        let e = niebur_expansion(-1, 1.2, &wide()).unwrap();
        let a = e.evaluate(&tau(0.0, 2.0)).unwrap();
        let b = e.evaluate(&tau(0.0, 0.5)).unwrap();
        assert!(diff(&a, &b) < 1e-6, "{}", diff(&a, &b));
    }

    #[test]
    fn jhat_laplacian_and_invariance() {
        let opts = small();
        let wide = JHat::new(1, 1e-3, &wide()).unwrap();
        let a = wide.eval(&tau(0.0, 2.0)).unwrap();
        let b = wide.eval(&tau(0.0, 0.5)).unwrap();
        assert!(diff(&a, &b) < 1e-5, "{}", diff(&a, &b));
        let jh = JHat::new(1, 1e-3, &opts).unwrap();
        let t = tau(0.2, 1.3);
        let f = |z: &ExtComplex| jh.eval(z).map(|v| v.value);
        let lap = laplacian0(&f, &t, None).unwrap();
        let j = faber(1, 40).evaluate(&t, &Rational::from(1), None).unwrap().value;
        let res = (&(&lap + &j) + &ExtComplex::from_f64(24.0, 0.0, 192)).abs().to_f64();
        assert!(res < 1e-3, "{res}");
    }

    #[test]
    fn f32_vanishes_and_is_an_eigenfunction() {
        let opts = EvalOptions { n_max: 12, ..EvalOptions::default() };
        let sums = SumOptions::new(4000);
        let v = assemble_f32(3, &tau(0.0, 1.2), 0.75, &opts, &sums).unwrap();
        assert!(v.value.abs().to_f64() < 1e-2);
        let e = f32_expansion(3, 0.9, &opts, &sums).unwrap();
        let f = |z: &ExtComplex| e.evaluate(z).map(|v| v.value);
        let t = tau(0.125, 0.6);
        let a = f(&t).unwrap();
        let b = f(&tau(1.125, 0.6)).unwrap();
        assert!((&a - &b).abs().to_f64() < 1e-30);
        // Δ_k F = (s(1−s) + k/2(1−k/2))... in the normalization λ = (s − k/2)(1 − k/2 − s)
        let lap = laplacian_k(1.5, &f, &t, None).unwrap();
        let lambda = (0.9 - 0.75) * (1.0 - 0.75 - 0.9);
        let res = (&lap - &a.scale_f64(lambda)).abs().to_f64() / a.abs().to_f64();
        assert!(res < 1e-3, "{res}");
    }
}
