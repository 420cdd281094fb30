//! Binary quadratic forms, definite reduction, class lists and characters.

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::{gcd, isqrt, kronecker, ArithmeticError, Discriminant};
use crate::numerics::{ExtComplex, ExtReal};

/// [a, b, c] = aX² + bXY + cY².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }
    pub fn content(&self) -> i64 {
        gcd(gcd(self.a, self.b), self.c)
    }
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }
    pub fn neg(&self) -> Self {
        QuadForm::new(-self.a, -self.b, -self.c)
    }
    /// (Q∘γ)(x, y) = Q(αx + βy, γx + δy) for γ = [[α, β], [γ, δ]].
    pub fn act(&self, m: [[i64; 2]; 2]) -> Self {
        let [[al, be], [ga, de]] = m;
        let (a, b, c) = (self.a, self.b, self.c);
        QuadForm {
            a: a * al * al + b * al * ga + c * ga * ga,
            b: 2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de,
            c: a * be * be + b * be * de + c * de * de,
        }
    }
    /// Q(τ, 1) for complex τ.
    pub fn eval_complex(&self, tau: &ExtComplex) -> ExtComplex {
        let p = tau.prec();
        let t2 = tau * tau;
        &t2.scale(&ExtReal::from_i64(self.a, p)) + &tau.scale(&ExtReal::from_i64(self.b, p)) + ExtComplex::from_real(ExtReal::from_i64(self.c, p))
    }
}

impl std::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// The reduced representative (|b| ≤ a ≤ c, b ≥ 0 if |b| = a or a = c) of a
/// positive definite form.
pub fn reduce_definite(q: QuadForm) -> Result<QuadForm, ArithmeticError> {
    if q.disc() >= 0 {
        return Err(ArithmeticError::Domain(format!("{q} has non-negative discriminant")));
    }
    let mut q = if q.a < 0 { q.neg() } else { q };
    loop {
        // translate b into (−a, a]
        let two_a = 2 * q.a;
        let k = (q.a - q.b).div_euclid(two_a);
        if k != 0 {
            q = q.act([[1, k], [0, 1]]);
        }
        if q.c < q.a {
            q = QuadForm::new(q.c, -q.b, q.a);
            continue;
        }
        break;
    }
    if q.a == q.c && q.b < 0 {
        q.b = -q.b;
    }
    Ok(q)
}

/// Class representatives of a discriminant together with stabilizer orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassList {
    pub discriminant: i64,
    pub forms: Vec<QuadForm>,
    /// |Γ_Q| (1, 2 or 3 for definite forms; 1 for indefinite ones in PSL₂(ℤ)).
    pub w: Vec<u32>,
}

impl ClassList {
    pub fn len(&self) -> usize {
        self.forms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = (&QuadForm, u32)> {
        self.forms.iter().zip(self.w.iter().copied())
    }
}

/// All reduced positive definite forms of discriminant d < 0 (imprimitive ones included).
pub fn class_list_definite(d: Discriminant) -> Result<ClassList, ArithmeticError> {
    let dv = d.value();
    if dv >= 0 {
        return Err(ArithmeticError::Domain(format!("class_list_definite needs d < 0, got {dv}")));
    }
    let n = (-dv) as u64;
    let mut forms = vec![];
    let mut w = vec![];
    let a_max = isqrt(n / 3) as i64;
    for a in 1..=a_max {
        for b in -a + 1..=a {
            if (b - dv).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - dv;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            let q = QuadForm::new(a, b, c);
            w.push(stabilizer(&q));
            forms.push(q);
        }
    }
    Ok(ClassList { discriminant: dv, forms, w })
}

/// Stabilizer order of a reduced definite form: 3 for [k,k,k], 2 for [k,0,k].
fn stabilizer(q: &QuadForm) -> u32 {
    if q.a == q.b && q.b == q.c {
        3
    } else if q.b == 0 && q.a == q.c {
        2
    } else {
        1
    }
}

/// Hurwitz–Kronecker class number H(n), with H(0) = −1/12.
pub fn hurwitz_class_number(n: i64) -> Result<Rational, ArithmeticError> {
    if n < 0 || (n > 0 && !matches!(n % 4, 0 | 3)) {
        return Err(ArithmeticError::Domain(format!("H({n}) needs n = 0 or n ≡ 0, 3 (mod 4)")));
    }
    if n == 0 {
        return Ok(Rational::from((-1, 12)));
    }
    let cl = class_list_definite(Discriminant::new(-n)?)?;
    let mut h = Rational::new();
    for (_, w) in cl.iter() {
        h += Rational::from((1, w));
    }
    Ok(h)
}

/// Genus character χ_D(Q) = (D/r) for any r represented by Q with gcd(r, D) = 1;
/// zero when gcd(a, b, c, D) > 1.
pub fn genus_character(d_fund: Discriminant, q: &QuadForm) -> Result<i32, ArithmeticError> {
    let dd = d_fund.value();
    if !d_fund.is_fundamental() {
        return Err(ArithmeticError::Domain(format!("genus character needs a fundamental discriminant, got {dd}")));
    }
    let disc = q.disc();
    if disc % dd != 0 || Discriminant::new(disc / dd).is_err() {
        return Err(ArithmeticError::Domain(format!("disc({q}) = {disc} is not {dd}·(discriminant)")));
    }
    if dd == 1 {
        return Ok(1);
    }
    if gcd(q.content(), dd) > 1 {
        return Ok(0);
    }
    let bound = 2 * dd.abs() + 8;
    // scan by increasing max(|x|, |y|) so the smallest representations are found first
    for radius in 0..=bound {
        for x in -radius..=radius {
            for y in -radius..=radius {
                if x.abs().max(y.abs()) != radius || gcd(x, y) != 1 {
                    continue;
                }
                let r = q.eval(x, y);
                if r != 0 && gcd(r, dd) == 1 {
                    return Ok(kronecker(dd, r));
                }
            }
        }
    }
    Err(ArithmeticError::Internal(format!("no value of {q} coprime to {dd} with |x|,|y| ≤ {bound}")))
}

/// τ_Q = (−b + i√|disc|)/(2a), the root of Q(τ, 1) in the upper half-plane.
pub fn cm_point(q: &QuadForm, prec: u32) -> Result<ExtComplex, ArithmeticError> {
    let disc = q.disc();
    if disc >= 0 || q.a <= 0 {
        return Err(ArithmeticError::Domain(format!("{q} is not positive definite")));
    }
    let two_a = ExtReal::from_i64(2 * q.a, prec);
    let re = ExtReal::from_i64(-q.b, prec) / &two_a;
    let im = ExtReal::from_i64(-disc, prec).sqrt() / &two_a;
    Ok(ExtComplex::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{divisors, sigma};
    use proptest::prelude::*;

    fn disc(v: i64) -> Discriminant {
        Discriminant::new(v).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_definite(QuadForm::new(2, 2, 2)).unwrap(), QuadForm::new(2, 2, 2));
        assert_eq!(reduce_definite(QuadForm::new(1, 5, 7)).unwrap(), QuadForm::new(1, 1, 1));
        assert_eq!(reduce_definite(QuadForm::new(3, 2, 1)).unwrap(), QuadForm::new(1, 0, 2));
        assert!(reduce_definite(QuadForm::new(1, 3, 1)).is_err());
    }

    #[test]
    fn class_list_examples() {
        let cl = class_list_definite(disc(-3)).unwrap();
        assert_eq!(cl.forms, vec![QuadForm::new(1, 1, 1)]);
        assert_eq!(cl.w, vec![3]);
        let cl = class_list_definite(disc(-4)).unwrap();
        assert_eq!(cl.forms, vec![QuadForm::new(1, 0, 1)]);
        assert_eq!(cl.w, vec![2]);
        let cl = class_list_definite(disc(-20)).unwrap();
        assert_eq!(cl.forms, vec![QuadForm::new(1, 0, 5), QuadForm::new(2, 2, 3)]);
        assert_eq!(cl.w, vec![1, 1]);
        // imprimitive forms are kept: disc −12 has [1,0,3] and [2,2,2]
        let cl = class_list_definite(disc(-12)).unwrap();
        assert_eq!(cl.forms, vec![QuadForm::new(1, 0, 3), QuadForm::new(2, 2, 2)]);
        assert_eq!(cl.w, vec![1, 3]);
    }

    #[test]
    fn class_lists_are_reduced_and_inequivalent() {
        for n in 3..=200i64 {
            if !matches!(n % 4, 0 | 3) {
                continue;
            }
            let cl = class_list_definite(disc(-n)).unwrap();
            for q in &cl.forms {
                assert_eq!(q.disc(), -n);
                assert_eq!(reduce_definite(*q).unwrap(), *q);
            }
            let mut sorted = cl.forms.clone();
            sorted.sort_by_key(|q| (q.a, q.b, q.c));
            sorted.dedup();
            assert_eq!(sorted.len(), cl.forms.len());
        }
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz_class_number(3).unwrap(), Rational::from((1, 3)));
        assert_eq!(hurwitz_class_number(4).unwrap(), Rational::from((1, 2)));
        assert_eq!(hurwitz_class_number(23).unwrap(), Rational::from(3));
        assert_eq!(hurwitz_class_number(0).unwrap(), Rational::from((-1, 12)));
        assert!(hurwitz_class_number(5).is_err());
        assert!(hurwitz_class_number(-3).is_err());
    }

    #[test]
    fn kronecker_hurwitz_class_number_relation() {
        // Σ_{t² ≤ 4n} H(4n − t²) = 2σ(n) − Σ_{d|n} min(d, n/d)
        for n in 1..=50i64 {
            let mut lhs = Rational::new();
            let mut t = -((4 * n) as f64).sqrt().floor() as i64;
            while t * t <= 4 * n {
                lhs += hurwitz_class_number(4 * n - t * t).unwrap();
                t += 1;
            }
            let lam: u64 = divisors(n as u64).iter().map(|&d| d.min(n as u64 / d)).sum();
            let rhs = Rational::from(sigma(1, n as u64) * 2u32 - lam);
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn genus_character_examples() {
        assert_eq!(genus_character(disc(-3), &QuadForm::new(1, 2, -2)).unwrap(), 1);
        assert_eq!(genus_character(disc(5), &QuadForm::new(2, 1, 2)).unwrap(), -1);
        assert_eq!(genus_character(disc(5), &QuadForm::new(1, 1, 4)).unwrap(), 1);
        assert!(genus_character(disc(-12), &QuadForm::new(1, 0, 9)).is_err());
        assert!(genus_character(disc(5), &QuadForm::new(1, 1, 1)).is_err());
    }

    #[test]
    fn genus_character_is_class_invariant_exhaustive() {
        // all forms with |disc| ≤ 60 and |a|,|b|,|c| ≤ 12, against a few SL₂(ℤ) moves
        let moves = [[[1, 1], [0, 1]], [[0, -1], [1, 0]], [[2, 1], [1, 1]], [[1, -3], [1, -2]]];
        for &dd in &[-3i64, -4, -7, -8, 5, 8, 12, -15, 13] {
            let dfund = disc(dd);
            if !dfund.is_fundamental() {
                continue;
            }
            for a in -12i64..=12 {
                for b in -12i64..=12 {
                    for c in -12i64..=12 {
                        let q = QuadForm::new(a, b, c);
                        let dq = q.disc();
                        if dq == 0 || dq.abs() > 60 || dq % dd != 0 || Discriminant::new(dq / dd).is_err() {
                            continue;
                        }
                        if dq < 0 && a < 0 {
                            continue;
                        }
                        let chi = genus_character(dfund, &q).unwrap();
                        for m in moves {
                            assert_eq!(genus_character(dfund, &q.act(m)).unwrap(), chi, "{q} D={dd}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cm_points() {
        let t = cm_point(&QuadForm::new(1, 0, 1), 128).unwrap();
        assert!(t.re.is_zero() && (t.im - 1.0).abs() < 1e-35);
        let t = cm_point(&QuadForm::new(1, 1, 1), 128).unwrap();
        assert!((t.re + 0.5).abs() < 1e-35 && (t.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn cm_point_is_a_root(a in 1i64..40, b in -40i64..40, extra in 1i64..200) {
            // choose c so that the form is definite
            let c = (b * b) / (4 * a) + extra;
            let q = QuadForm::new(a, b, c);
            let tau = cm_point(&q, 192).unwrap();
            prop_assert!(q.eval_complex(&tau).abs() < 1e-50);
        }

        #[test]
        fn reduction_is_invariant(a in 1i64..30, b in -30i64..30, extra in 1i64..60, k in -5i64..5) {
            let c = (b * b) / (4 * a) + extra;
            let q = QuadForm::new(a, b, c);
            let r = reduce_definite(q).unwrap();
            let moved = q.act([[1, k], [0, 1]]).act([[0, -1], [1, 0]]);
            prop_assert_eq!(reduce_definite(moved).unwrap(), r);
        }
    }
}
