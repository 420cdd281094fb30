//! Indefinite forms: Pell units, automorphs, reduction cycles and the form
//! enumerations used by Salié-type sums.

use rug::ops::DivRounding;
use rug::Integer;

use super::{isqrt, ArithmeticError, ClassList, Discriminant, QuadForm};

pub type Matrix2 = [[Integer; 2]; 2];

fn require_indefinite(delta: Discriminant) -> Result<(i64, i64), ArithmeticError> {
    let dv = delta.value();
    if dv <= 0 || delta.is_square() {
        return Err(ArithmeticError::Domain(format!("{dv} is not a positive non-square discriminant")));
    }
    Ok((dv, isqrt(dv as u64) as i64))
}

/// Smallest (t, u), t, u > 0, with t² − Δu² = 4, from the continued fraction of (P₀ + √Δ)/2.
pub fn pell_fundamental(delta: Discriminant) -> Result<(Integer, Integer), ArithmeticError> {
    let (dv, s) = require_indefinite(delta)?;
    let p0 = dv.rem_euclid(2);
    let dd = Integer::from(dv);
    let (mut p, mut q) = (Integer::from(p0), Integer::from(2));
    let (mut h1, mut h2) = (Integer::from(1), Integer::new());
    let (mut k1, mut k2) = (Integer::new(), Integer::from(1));
    let si = Integer::from(s);
    for _ in 0..100_000 {
        // a = floor((p + √Δ)/q)
        let a = if q > 0 {
            Integer::from(&p + &si).div_floor(q.clone())
        } else {
            let qa = Integer::from(-&q);
            -(Integer::from(&p + &si).div_floor(qa) + 1u32)
        };
        let h = Integer::from(&a * &h1) + &h2;
        let k = Integer::from(&a * &k1) + &k2;
        let t = Integer::from(Integer::from(&h * 2u32) - Integer::from(&k * p0)).abs();
        if Integer::from(&t * &t) - Integer::from(&dd * Integer::from(&k * &k)) == 4 {
            return Ok((t, k));
        }
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
        p = Integer::from(&a * &q) - &p;
        q = (Integer::from(&dd) - Integer::from(&p * &p)) / &q;
    }
    Err(ArithmeticError::Internal(format!("Pell equation for {dv} not solved")))
}

/// Generator of the stabilizer Γ_Q ⊂ SL₂(ℤ) (up to ±1), acting as Q∘M = Q.
/// Imprimitive forms use the Pell unit of their primitive part.
pub fn automorph(q: &QuadForm) -> Result<Matrix2, ArithmeticError> {
    let g = q.content();
    if g == 0 {
        return Err(ArithmeticError::Domain("zero form".into()));
    }
    let prim = QuadForm::new(q.a / g, q.b / g, q.c / g);
    let (t, u) = pell_fundamental(Discriminant::new(prim.disc())?)?;
    let (a, b, c) = (Integer::from(prim.a), Integer::from(prim.b), Integer::from(prim.c));
    let bu = Integer::from(&b * &u);
    Ok([
        [Integer::from(&t + &bu) / 2u32, Integer::from(&c * &u)],
        [-Integer::from(&a * &u), Integer::from(&t - &bu) / 2u32],
    ])
}

/// Gauss-reduced: 0 < b < √Δ and √Δ − b < 2|a| < √Δ + b.
pub fn is_reduced_indefinite(q: &QuadForm, isqrt_delta: i64) -> bool {
    let s = isqrt_delta;
    let a2 = 2 * q.a.abs();
    q.b > 0 && q.b <= s && a2 + q.b > s && a2 <= s + q.b
}

/// One reduction step ρ(a, b, c) = (c, b', ·), a proper equivalence.
fn rho(q: &QuadForm, delta: i64, s: i64) -> QuadForm {
    let c = q.c;
    let m = 2 * c.abs();
    let b = if c.abs() > s {
        // −|c| < b' ≤ |c|
        let lo = -c.abs() + 1;
        lo + (-q.b - lo).rem_euclid(m)
    } else {
        // √Δ − 2|c| < b' < √Δ
        let lo = s - m + 1;
        lo + (-q.b - lo).rem_euclid(m)
    };
    QuadForm::new(c, b, (b * b - delta) / (4 * c))
}

/// A reduced form properly equivalent to `q`.
pub fn reduce_indefinite(q: &QuadForm) -> Result<QuadForm, ArithmeticError> {
    let delta = q.disc();
    let (_, s) = require_indefinite(Discriminant::new(delta)?)?;
    let mut f = *q;
    if f.c == 0 {
        return Err(ArithmeticError::Domain(format!("{q} represents zero")));
    }
    for _ in 0..10_000 {
        if is_reduced_indefinite(&f, s) {
            return Ok(f);
        }
        f = rho(&f, delta, s);
    }
    Err(ArithmeticError::Internal(format!("reduction of {q} did not terminate")))
}

/// The ρ-cycle of a reduced form.
pub fn cycle(q: &QuadForm) -> Result<Vec<QuadForm>, ArithmeticError> {
    let delta = q.disc();
    let (_, s) = require_indefinite(Discriminant::new(delta)?)?;
    if !is_reduced_indefinite(q, s) {
        return Err(ArithmeticError::Domain(format!("{q} is not reduced")));
    }
    let mut out = vec![*q];
    let mut f = rho(q, delta, s);
    while f != *q {
        out.push(f);
        f = rho(&f, delta, s);
        if out.len() > 1_000_000 {
            return Err(ArithmeticError::Internal("cycle too long".into()));
        }
    }
    Ok(out)
}

/// Representatives of SL₂(ℤ)\Q_Δ for Δ > 0 non-square, imprimitive forms included.
/// Each representative is the smallest (a, b, c) in its reduction cycle.
pub fn class_list_indefinite(delta: Discriminant) -> Result<ClassList, ArithmeticError> {
    let (dv, s) = require_indefinite(delta)?;
    let mut reduced = vec![];
    for b in 1..=s {
        if (b - dv).rem_euclid(2) != 0 {
            continue;
        }
        let num = b * b - dv; // < 0
        for a in 1..=(s + b) / 2 {
            if 2 * a + b <= s || num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            reduced.push(QuadForm::new(a, b, c));
            reduced.push(QuadForm::new(-a, b, -c));
        }
    }
    let key = |q: &QuadForm| (q.a, q.b, q.c);
    reduced.sort_by_key(key);
    let mut seen = std::collections::HashSet::new();
    let mut forms = vec![];
    for q in &reduced {
        if seen.contains(q) {
            continue;
        }
        let cyc = cycle(q)?;
        let rep = *cyc.iter().min_by_key(|f| key(f)).expect("nonempty cycle");
        seen.extend(cyc);
        forms.push(rep);
    }
    forms.sort_by_key(key);
    let w = vec![1; forms.len()];
    Ok(ClassList { discriminant: dv, forms, w })
}

/// Forms [a, b, c] of discriminant Δ with 1 ≤ a ≤ a_max and 0 ≤ b < 2a (Γ_∞-classes).
pub fn gamma_infty_reps(delta: Discriminant, a_max: i64) -> Vec<QuadForm> {
    let dv = delta.value();
    let mut out = vec![];
    for a in 1..=a_max {
        for b in 0..2 * a {
            let num = b * b - dv;
            if num % (4 * a) == 0 {
                out.push(QuadForm::new(a, b, num / (4 * a)));
            }
        }
    }
    out
}

/// Forms [c/4, b, (b² − Δ)/c] for b mod c with b² ≡ Δ (mod c), c ≡ 0 (mod 4).
pub fn salie_forms(delta: Discriminant, c: i64) -> Result<Vec<QuadForm>, ArithmeticError> {
    if c <= 0 || c % 4 != 0 {
        return Err(ArithmeticError::Domain(format!("salie_forms needs c ≡ 0 (mod 4), c > 0; got {c}")));
    }
    let dv = delta.value();
    Ok((0..c)
        .filter(|b| (b * b - dv).rem_euclid(c) == 0)
        .map(|b| QuadForm::new(c / 4, b, (b * b - dv) / c))
        .collect())
}
