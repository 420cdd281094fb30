//! E₄, E₆, Δ, j, the Faber basis j_m and theta functions, all with exact integer coefficients.

use rug::Integer;

use super::{QSeries, Support};
use crate::arithmetic::sigma;

fn eisenstein(k: u32, factor: i64, n_max: i64) -> QSeries<Integer> {
    QSeries::from_fn(0, n_max, |n| if n == 0 { Integer::from(1) } else { sigma(k, n as u64) * factor })
}

/// E₄ = 1 + 240 Σ σ₃(n) qⁿ through q^{n_max}.
pub fn eisenstein_e4(n_max: i64) -> QSeries<Integer> {
    eisenstein(3, 240, n_max)
}

/// E₆ = 1 − 504 Σ σ₅(n) qⁿ through q^{n_max}.
pub fn eisenstein_e6(n_max: i64) -> QSeries<Integer> {
    eisenstein(5, -504, n_max)
}

/// Δ = (E₄³ − E₆²)/1728 through q^{n_max}.
pub fn delta(n_max: i64) -> QSeries<Integer> {
    let e4 = eisenstein_e4(n_max);
    let e6 = eisenstein_e6(n_max);
    let num = e4.mul(&e4).mul(&e4).sub(&e6.mul(&e6));
    num.map(|c| {
        debug_assert!(c.is_divisible_u(1728));
        Integer::from(c / 1728u32)
    })
}

/// j = E₄³/Δ = q⁻¹ + 744 + 196884q + … through q^{n_max}.
pub fn j_invariant(n_max: i64) -> QSeries<Integer> {
    assert!(n_max >= 1, "j_invariant needs N ≥ 1");
    let m = n_max + 2;
    let e4 = eisenstein_e4(m);
    let d = delta(m);
    let j = e4.mul(&e4).mul(&e4).div(&d).expect("Δ has leading coefficient 1");
    j.truncate(n_max)
}

/// j_m = q^{−m} + O(q), the unique weakly holomorphic weight-0 form with that principal part.
pub fn faber(m: i64, n_max: i64) -> QSeries<Integer> {
    assert!(m >= 1, "faber needs m ≥ 1");
    let big_j = {
        let j = j_invariant(n_max + m);
        let mut c: Vec<Integer> = j.iter().map(|(_, c)| c.clone()).collect();
        c[1] -= 744; // constant term
        QSeries::new(-1, c)
    };
    // powers J^k, k = 1..m, each known through at least q^{n_max}
    let mut powers = vec![big_j.clone()];
    for _ in 1..m {
        let next = powers.last().unwrap().mul(&big_j);
        powers.push(next);
    }
    let mut f = powers[m as usize - 1].clone();
    for k in (1..m).rev() {
        let c = f.coeff(-k).expect("in range");
        if c != 0 {
            f = f.sub(&powers[k as usize - 1].scale(&c));
        }
    }
    let c0 = f.coeff(0).expect("in range");
    let f = f.extend_down(-m);
    let mut coeffs: Vec<Integer> = f.iter().map(|(_, c)| c.clone()).collect();
    coeffs[m as usize] -= c0;
    QSeries::new(-m, coeffs).truncate(n_max)
}

/// θ(τ) = Σ_{n∈ℤ} q^{n²}.
pub fn theta_series(n_max: i64) -> QSeries<Integer> {
    theta_signed(n_max, false).with_support(Support::PlusHalf)
}

/// θ₁(τ) = Σ_{n∈ℤ} (−1)ⁿ q^{n²} = θ(τ + 1/2).
pub fn theta1_series(n_max: i64) -> QSeries<Integer> {
    theta_signed(n_max, true)
}

fn theta_signed(n_max: i64, alternate: bool) -> QSeries<Integer> {
    let mut c = vec![Integer::new(); n_max as usize + 1];
    c[0] = Integer::from(1);
    let mut k = 1i64;
    while k * k <= n_max {
        c[(k * k) as usize] = Integer::from(if alternate && k % 2 == 1 { -2 } else { 2 });
        k += 1;
    }
    QSeries::new(0, c)
}

/// Π_{n≥1}(1 − qⁿ) from Euler's pentagonal number theorem.
pub fn euler_product(n_max: i64) -> QSeries<Integer> {
    let mut c = vec![Integer::new(); n_max as usize + 1];
    c[0] = Integer::from(1);
    for k in 1i64.. {
        let p1 = k * (3 * k - 1) / 2;
        if p1 > n_max {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        c[p1 as usize] += sign;
        let p2 = k * (3 * k + 1) / 2;
        if p2 <= n_max {
            c[p2 as usize] += sign;
        }
    }
    QSeries::new(0, c)
}
