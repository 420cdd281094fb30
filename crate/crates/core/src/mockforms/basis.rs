//! Zagier's bases {g_D} of M^!_{3/2} and {f_d} of M^!_{1/2} (plus space, Γ₀(4)).

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Serialize};

use super::MockError;
use crate::arithmetic::{kronecker, Discriminant};
use crate::qseries::{eisenstein_e4, euler_product, faber, theta1_series, QSeries, Support};
use crate::traces::trace_cm;

/// g₁ = θ₁(τ)E₄(4τ)/η(4τ)⁶ = q⁻¹ − 2 + 248q³ − 492q⁴ + …, through q^{n_max}.
fn g1(n_max: i64) -> QSeries<Integer> {
    let m = n_max + 2;
    let num = theta1_series(m).mul(&eisenstein_e4(m / 4 + 1).dilate(4));
    let den = euler_product(m / 4 + 1).dilate(4).pow(6).expect("positive power");
    num.div(&den).expect("unit leading coefficient").shift(-1).truncate(n_max)
}

/// (T(4)g₁ − g₁)/2 restricted to the plus space, with T(4): a(n) ↦ a(4n) + ((−n)/2)a(n) + 2a(n/4).
fn g4(g1: &QSeries<Integer>) -> QSeries<Integer> {
    let top = g1.n_max() / 4;
    QSeries::from_fn(-4, top, |n| {
        if !matches!(n.rem_euclid(4), 0 | 3) {
            return Integer::new();
        }
        let a = |k: i64| g1.coeff(k).unwrap_or_default();
        let mut t = a(4 * n) + a(n) * kronecker(-n, 2);
        if n % 4 == 0 {
            t += a(n / 4) * 2;
        }
        let diff = t - a(n);
        debug_assert!(diff.is_even());
        diff / 2
    })
}

/// g_D for 0 < D ≤ d_max (D ≡ 0, 1 mod 4), each known through q^{n_max}, built from g₁, g₄
/// and powers of J(4τ) by eliminating principal parts.
pub fn zagier_basis(d_max: i64, n_max: i64) -> Result<BTreeMap<i64, QSeries<Integer>>, MockError> {
    if d_max < 1 || n_max < 1 {
        return Err(MockError::Domain("zagier_basis needs D_max, N ≥ 1".into()));
    }
    let reach = n_max + d_max + 8;
    let base1 = g1(4 * reach + 4);
    let base4 = g4(&base1);
    let j4 = faber(1, reach / 4 + 2).dilate(4);
    let mut out: BTreeMap<i64, QSeries<Integer>> = BTreeMap::new();
    let mut jk = QSeries::from_fn(0, base1.n_max() + 4, |n| Integer::from((n == 0) as i32));
    for k in 0..=(d_max / 4) {
        if k > 0 {
            jk = jk.mul(&j4);
        }
        for (big_d, seed) in [(4 * k + 1, &base1), (4 * k + 4, &base4)] {
            if big_d > d_max {
                continue;
            }
            let mut g = seed.mul(&jk);
            for e in (-big_d + 1)..0 {
                let c = g.coeff(e)?;
                if c == 0 {
                    continue;
                }
                let lower = out.get(&-e).ok_or_else(|| MockError::Domain(format!("q^{e} outside the plus space")))?;
                g = g.sub(&lower.scale(&c));
            }
            if g.n_max() < n_max {
                return Err(MockError::Domain(format!("g_{big_d} known only through q^{}", g.n_max())));
            }
            out.insert(big_d, g.truncate(n_max).with_support(Support::PlusThreeHalves));
        }
    }
    Ok(out)
}

fn rounded_trace(d: i64, big_d: i64) -> Result<Integer, MockError> {
    let t = trace_cm(d, big_d)?;
    let (r, res) = t.rounded();
    if res > 1e-6 {
        return Err(MockError::NotIntegral { n: -d, residual: res });
    }
    Ok(r)
}

/// g_D = q^{−D} − 2δ_{D,□} − Σ_{d<0} Tr_{d,D}(J) q^{|d|} through q^{n_max}, D = 1 or fundamental.
pub fn g_weakly_holo(big_d: i64, n_max: i64) -> Result<QSeries<Integer>, MockError> {
    let dd = Discriminant::new(big_d)?;
    if big_d <= 0 || (big_d != 1 && !dd.is_fundamental()) {
        return Err(MockError::Domain(format!("g_D needs D = 1 or a positive fundamental discriminant, got {big_d}")));
    }
    if n_max < 1 {
        return Err(MockError::Domain("g_D needs N ≥ 1".into()));
    }
    let idx: Vec<i64> = (1..=n_max).filter(|n| matches!(n % 4, 0 | 3)).collect();
    let traces = idx.par_iter().map(|&n| rounded_trace(-n, big_d).map(|t| (n, t))).collect::<Result<Vec<_>, _>>()?;
    let mut c = vec![Integer::new(); (n_max + big_d + 1) as usize];
    c[0] = Integer::from(1);
    if dd.is_square() {
        c[big_d as usize] = Integer::from(-2);
    }
    for (n, t) in traces {
        c[(n + big_d) as usize] = -t;
    }
    Ok(QSeries::new(-big_d, c).with_support(Support::PlusThreeHalves))
}

/// Source of a coefficient of f_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// the leading q^d
    Principal,
    /// Tr_{d,D}(J) from CM values (D = 1 or fundamental)
    CmTrace,
    /// −[q^{|d|}]g_D from the Zagier basis (non-fundamental D)
    ZagierBasis,
    /// outside the plus space: zero by support
    Support,
}

#[derive(Debug, Clone)]
pub struct WeakSeries {
    pub series: QSeries<Integer>,
    pub provenance: BTreeMap<i64, Provenance>,
}

/// f_d = q^d + Σ_{D>0} Tr_{d,D}(J) q^D through q^{n_max}.
pub fn f_weakly_holo(d: i64, n_max: i64) -> Result<WeakSeries, MockError> {
    Discriminant::new(d)?;
    if d >= 0 {
        return Err(MockError::Domain(format!("f_d needs d < 0, got {d}")));
    }
    if n_max < 1 {
        return Err(MockError::Domain("f_d needs N ≥ 1".into()));
    }
    let plus: Vec<i64> = (1..=n_max).filter(|n| matches!(n % 4, 0 | 1)).collect();
    let fundamental = |n: i64| n == 1 || Discriminant::new(n).map(|x| x.is_fundamental()).unwrap_or(false);
    let cm = plus
        .par_iter()
        .filter(|&&n| fundamental(n))
        .map(|&n| rounded_trace(d, n).map(|t| (n, t)))
        .collect::<Result<Vec<_>, _>>()?;
    let need_basis = plus.iter().any(|&n| !fundamental(n));
    let basis = if need_basis { Some(zagier_basis(n_max, -d)?) } else { None };
    let mut c = vec![Integer::new(); (n_max - d + 1) as usize];
    let mut provenance = BTreeMap::new();
    c[0] = Integer::from(1);
    provenance.insert(d, Provenance::Principal);
    for (n, t) in cm {
        c[(n - d) as usize] = t;
        provenance.insert(n, Provenance::CmTrace);
    }
    for &n in plus.iter().filter(|&&n| !fundamental(n)) {
        let g = &basis.as_ref().expect("built above")[&n];
        c[(n - d) as usize] = -g.coeff(-d)?;
        provenance.insert(n, Provenance::ZagierBasis);
    }
    for n in (d + 1)..=n_max {
        provenance.entry(n).or_insert(Provenance::Support);
    }
    Ok(WeakSeries { series: QSeries::new(d, c).with_support(Support::PlusHalf), provenance })
}
