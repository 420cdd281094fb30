//! Finite-difference Δ_k and ξ_k, each with one Richardson step (h, h/2).

use super::PoincareError;
use crate::numerics::{ExtComplex, ExtReal};

/// Relative step (× Im τ) for second derivatives.
pub const DEFAULT_LAPLACIAN_STEP: f64 = 1e-3;
/// Relative step (× Im τ) for first derivatives.
pub const DEFAULT_XI_STEP: f64 = 1e-4;

struct Partials {
    f: ExtComplex,
    fx: ExtComplex,
    fy: ExtComplex,
    fxx: ExtComplex,
    fyy: ExtComplex,
}

fn partials_at<F>(f: &F, tau: &ExtComplex, h: &ExtReal, second: bool) -> Result<Partials, PoincareError>
where
    F: Fn(&ExtComplex) -> Result<ExtComplex, PoincareError>,
{
    let zero = ExtReal::zero(h.prec());
    let at = |dx: &ExtReal, dy: &ExtReal| f(&ExtComplex::new(&tau.re + dx, &tau.im + dy));
    let c = f(tau)?;
    let xp = at(h, &zero)?;
    let xm = at(&-h, &zero)?;
    let yp = at(&zero, h)?;
    let ym = at(&zero, &-h)?;
    let h2 = h * 2.0;
    let hh = h.sqr();
    let (fxx, fyy) = if second {
        let two_c = c.scale_f64(2.0);
        (((&xp + &xm) - &two_c).scale(&hh.recip()), ((&yp + &ym) - &two_c).scale(&hh.recip()))
    } else {
        (ExtComplex::zero(h.prec()), ExtComplex::zero(h.prec()))
    };
    Ok(Partials { fx: (&xp - &xm).scale(&h2.recip()), fy: (&yp - &ym).scale(&h2.recip()), fxx, fyy, f: c })
}

fn richardson(coarse: &ExtComplex, fine: &ExtComplex) -> ExtComplex {
    (fine.scale_f64(4.0) - coarse).scale_f64(1.0 / 3.0)
}

fn step(tau: &ExtComplex, rel: Option<f64>, default: f64) -> Result<ExtReal, PoincareError> {
    let rel = rel.unwrap_or(default);
    if !(rel > 0.0 && rel <= 1e-2) {
        return Err(PoincareError::Domain(format!("relative step must be in (0, 1e-2], got {rel}")));
    }
    if !(tau.im.cmp_f64(0.0).is_gt()) {
        return Err(PoincareError::Domain("Im τ must be positive".into()));
    }
    Ok(&tau.im * rel)
}

/// Δ_k f = −y²(f_xx + f_yy) + iky(f_x + i f_y).
pub fn laplacian_k<F>(k: f64, f: &F, tau: &ExtComplex, rel_step: Option<f64>) -> Result<ExtComplex, PoincareError>
where
    F: Fn(&ExtComplex) -> Result<ExtComplex, PoincareError>,
{
    let h = step(tau, rel_step, DEFAULT_LAPLACIAN_STEP)?;
    let y = &tau.im;
    let op = |p: &Partials| {
        let lap = (&p.fxx + &p.fyy).scale(&-y.sqr());
        if k == 0.0 {
            lap
        } else {
            let first = (&p.fx + &p.fy.mul_i()).mul_i().scale(&(y * k));
            lap + first
        }
    };
    let coarse = partials_at(f, tau, &h, true)?;
    let fine = partials_at(f, tau, &(&h / 2.0), true)?;
    let _ = &coarse.f;
    Ok(richardson(&op(&coarse), &op(&fine)))
}

/// Δ₀ f = −y²(f_xx + f_yy).
pub fn laplacian0<F>(f: &F, tau: &ExtComplex, rel_step: Option<f64>) -> Result<ExtComplex, PoincareError>
where
    F: Fn(&ExtComplex) -> Result<ExtComplex, PoincareError>,
{
    laplacian_k(0.0, f, tau, rel_step)
}

/// ξ_k f = 2i y^k conj(∂f/∂τ̄) = i y^k conj(f_x + i f_y).
pub fn xi_op<F>(k: f64, f: &F, tau: &ExtComplex, rel_step: Option<f64>) -> Result<ExtComplex, PoincareError>
where
    F: Fn(&ExtComplex) -> Result<ExtComplex, PoincareError>,
{
    let h = step(tau, rel_step, DEFAULT_XI_STEP)?;
    let y = &tau.im;
    let yk = y.powf(k);
    let op = |p: &Partials| (&p.fx + &p.fy.mul_i()).conj().mul_i().scale(&yk);
    let coarse = partials_at(f, tau, &h, false)?;
    let fine = partials_at(f, tau, &(&h / 2.0), false)?;
    Ok(richardson(&op(&coarse), &op(&fine)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(x: f64, y: f64) -> ExtComplex {
        ExtComplex::from_f64(x, y, 192)
    }

    fn ypow(s: f64) -> impl Fn(&ExtComplex) -> Result<ExtComplex, PoincareError> {
        move |z: &ExtComplex| Ok(ExtComplex::from_real(z.im.powf(s)))
    }

    #[test]
    fn power_cases() {
        let t = tau(0.3, 1.0);
        let l = laplacian0(&ypow(1.0), &t, None).unwrap();
        assert!(l.abs().to_f64() < 1e-20);
        let l = laplacian0(&ypow(1.3), &t, None).unwrap();
        assert!((l.re.to_f64() - (1.3 - 1.69)).abs() < 1e-12);
        let x = xi_op(0.0, &ypow(1.0), &tau(0.1, 0.7), None).unwrap();
        assert!((x.re.to_f64() - 1.0).abs() < 1e-20 && x.im.abs().to_f64() < 1e-20);
    }

    #[test]
    fn xi_factorization() {
        // Δ₀f = −ξ₂(ξ₀f) on f = y^s
        let t = tau(0.2, 0.9);
        let f = ypow(1.3);
        let inner = |z: &ExtComplex| xi_op(0.0, &f, z, None);
        let outer = xi_op(2.0, &inner, &t, Some(1e-3)).unwrap();
        let lap = laplacian0(&f, &t, None).unwrap();
        assert!((&lap + &outer).abs().to_f64() < 1e-5);
    }

    #[test]
    fn weight_k_on_holomorphic_exponential() {
        // Δ_k(e(nτ)) = 0 for holomorphic input, any k
        let f = |z: &ExtComplex| Ok(ExtComplex::e(&z.re).mul_i().scale_f64(0.0) + (z.mul_i().scale_f64(std::f64::consts::TAU)).exp());
        let l = laplacian_k(1.5, &f, &tau(0.1, 0.8), None).unwrap();
        assert!(l.abs().to_f64() < 1e-10);
        assert!(laplacian0(&f, &tau(0.0, -1.0), None).is_err());
    }
}
