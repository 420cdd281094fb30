//! f64 Kloosterman/Salié tables over long c-ranges, memoized per (kind, m, n).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rayon::prelude::*;

use super::{half_weight_ipow, residue, units_with_inverses, HalfWeight, JacobiTop, KloostermanError};
use crate::arithmetic::{genus_character, kronecker, salie_forms, ArithmeticError, Discriminant};

/// One term of a table: the sum at modulus c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSum {
    pub c: u64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Int,
    Plus,
    Salie(i64),
}

type Cache = Mutex<HashMap<(Kind, i64, i64), Arc<Vec<KSum>>>>;
static CACHE: Lazy<Cache> = Lazy::new(|| Mutex::new(HashMap::new()));

/// e(r/c) for r = 0..c, resynchronised with an exact sin/cos every 32 steps.
fn unit_roots(c: u64) -> Vec<(f64, f64)> {
    let step = std::f64::consts::TAU / c as f64;
    let (s1, c1) = step.sin_cos();
    let mut out = Vec::with_capacity(c as usize);
    let (mut x, mut y) = (1.0f64, 0.0f64);
    for r in 0..c {
        if r % 32 == 0 {
            let (s, co) = (step * r as f64).sin_cos();
            x = co;
            y = s;
        }
        out.push((x, y));
        (x, y) = (x * c1 - y * s1, x * s1 + y * c1);
    }
    out
}

fn int_f64(m: i64, n: i64, c: u64) -> (f64, f64) {
    let roots = unit_roots(c);
    let (mut re, mut im) = (0.0, 0.0);
    for (v, vi) in units_with_inverses(c) {
        let (x, y) = roots[residue(m, n, v, vi, c) as usize];
        re += x;
        im += y;
    }
    (re, im)
}

fn plus_f64(m: i64, n: i64, c: u64) -> (f64, f64) {
    let factor = (1 + kronecker(4, (c / 4) as i64)) as f64;
    if factor == 0.0 {
        return (0.0, 0.0);
    }
    let roots = unit_roots(c);
    let chi = JacobiTop::new(c);
    // accumulate the four i-power classes separately
    let mut acc = [(0.0f64, 0.0f64); 4];
    for (v, vi) in units_with_inverses(c) {
        let k = half_weight_ipow(HalfWeight::OneHalf, chi.eval(v), v) as usize;
        let (x, y) = roots[residue(m, n, v, vi, c) as usize];
        acc[k].0 += x;
        acc[k].1 += y;
    }
    let re = acc[0].0 - acc[1].1 - acc[2].0 + acc[3].1;
    let im = acc[0].1 + acc[1].0 - acc[2].1 - acc[3].0;
    // (1 − i)·factor·(re + i im)
    (factor * (re + im), factor * (im - re))
}

fn salie_f64(m: i64, d: i64, dd: i64, c: u64) -> Result<(f64, f64), ArithmeticError> {
    let disc = Discriminant::new(d * dd)?;
    let d_fund = Discriminant::new(dd)?;
    let (mut re, mut im) = (0.0, 0.0);
    for q in salie_forms(disc, c as i64)? {
        let chi = genus_character(d_fund, &q)? as f64;
        if chi != 0.0 {
            let r = (2 * m * q.b).rem_euclid(c as i64) as f64 / c as f64;
            let (s, co) = (std::f64::consts::TAU * r).sin_cos();
            re += chi * co;
            im += chi * s;
        }
    }
    Ok((re, im))
}

fn cached(kind: Kind, m: i64, n: i64, c_max: u64, moduli: impl Fn(u64) -> Vec<u64>, f: impl Fn(u64) -> Result<(f64, f64), KloostermanError> + Sync) -> Result<Arc<Vec<KSum>>, KloostermanError> {
    let key = (kind, m, n);
    let have = CACHE.lock().expect("cache poisoned").get(&key).cloned();
    let start = match &have {
        Some(t) if t.last().map_or(0, |k| k.c) >= c_max => {
            let len = t.partition_point(|k| k.c <= c_max);
            return Ok(Arc::new(t[..len].to_vec()));
        }
        Some(t) => t.last().map_or(0, |k| k.c) + 1,
        None => 1,
    };
    let new_cs: Vec<u64> = moduli(start).into_iter().filter(|&c| c <= c_max).collect();
    let fresh: Result<Vec<KSum>, KloostermanError> = new_cs
        .par_iter()
        .map(|&c| f(c).map(|(re, im)| KSum { c, re, im }))
        .collect();
    let mut table = have.map(|t| t.as_ref().clone()).unwrap_or_default();
    table.extend(fresh?);
    let table = Arc::new(table);
    CACHE.lock().expect("cache poisoned").insert(key, table.clone());
    Ok(table)
}

/// K₀(m, n; c) for c = 1..=c_max.
pub fn kloosterman_int_table(m: i64, n: i64, c_max: u64) -> Arc<Vec<KSum>> {
    cached(Kind::Int, m, n, c_max, |s| (s..=c_max).collect(), |c| Ok(int_f64(m, n, c))).expect("infallible")
}

/// K⁺(m, n; c) for c ≡ 0 (mod 4), c ≤ c_max.
pub fn kloosterman_plus_table(m: i64, n: i64, c_max: u64) -> Arc<Vec<KSum>> {
    cached(Kind::Plus, m, n, c_max, |s| (s.div_ceil(4) * 4..=c_max).step_by(4).filter(|&c| c > 0).collect(), |c| Ok(plus_f64(m, n, c)))
        .expect("infallible")
}

/// S_m(d, D; c) for c ≡ 0 (mod 4), c ≤ c_max.
pub fn salie_table(m: i64, d: i64, dd: i64, c_max: u64) -> Result<Arc<Vec<KSum>>, KloostermanError> {
    let d_fund = Discriminant::new(dd)?;
    if !d_fund.is_fundamental() {
        return Err(ArithmeticError::Domain(format!("D = {dd} is not fundamental")).into());
    }
    Discriminant::new(d)?;
    cached(Kind::Salie(m), d, dd, c_max, |s| (s.div_ceil(4) * 4..=c_max).step_by(4).filter(|&c| c > 0).collect(), |c| {
        Ok(salie_f64(m, d, dd, c)?)
    })
}
