//! Closed-form loads used for comparison: retrieval ratios, the uncoded
//! baseline, the heterogeneous-memory benchmark and the large-`K` limits.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial_column;
use crate::error::{Error, Result};
use crate::geometry::{Regime, UserClass};
use crate::scheme_a::load_a;

fn check_t(k: u64, t: u64) -> Result<()> {
    if k == 0 || t > k {
        return Err(Error::invalid(format!("need 0 <= t <= K with K > 0, got t = {t}, K = {k}")));
    }
    Ok(())
}

fn big(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

/// `lambda_s = 1 - C(K - s, t) / C(K, t)`: the fraction of each file a user
/// reaching `s` nodes reads from cache. `lambda_1 = t / K`.
pub fn lambda_ratios(k: u64, t: u64) -> Result<[BigRational; 4]> {
    check_t(k, t)?;
    let c = binomial_column(k as i64, t as i64, 5);
    let f = big(&c[0]);
    Ok(std::array::from_fn(|i| {
        BigRational::one() - BigRational::new(big(&c[i + 1]), f.clone())
    }))
}

/// `lambda_s` in floating point via `prod_{i<s} (K - t - i) / (K - i)`,
/// usable at any `K`.
pub fn lambda_ratios_f64(k: u64, t: u64) -> Result<[f64; 4]> {
    check_t(k, t)?;
    let mut out = [0.0; 4];
    let mut keep = 1.0;
    for (s, slot) in out.iter_mut().enumerate() {
        let s = s as u64;
        keep *= if k - t > s && k > s {
            (k - t - s) as f64 / (k - s) as f64
        } else {
            0.0
        };
        *slot = 1.0 - keep;
    }
    Ok(out)
}

/// Users per distinct retrieval ratio, in ascending ratio order:
/// `(access size, user count)`.
pub fn memory_profile(regime: Regime, k: u64) -> Vec<(usize, u64)> {
    let mut counts = [0u64; 5];
    for c in regime.classes() {
        counts[c.size()] += k;
    }
    (1..=4).filter(|&s| counts[s] > 0).map(|s| (s, counts[s])).collect()
}

/// Uncoded delivery: every user receives the part of its file it cannot
/// read, `sum_users (1 - lambda_|access|)`.
pub fn load_uncoded(regime: Regime, k: u64, t: u64) -> Result<BigRational> {
    let lambda = lambda_ratios(k, t)?;
    Ok(memory_profile(regime, k)
        .into_iter()
        .map(|(s, n)| (BigRational::one() - &lambda[s - 1]) * BigInt::from(n))
        .sum())
}

/// Benchmark `R_D = sum_i prod_{j <= i} (1 - M_j / N)` over all users sorted by
/// ascending cache ratio, summed group by group as geometric series.
pub fn load_benchmark_d(regime: Regime, k: u64, t: u64) -> Result<BigRational> {
    let lambda = lambda_ratios(k, t)?;
    let mut prefix = BigRational::one();
    let mut total = BigRational::zero();
    for (s, n) in memory_profile(regime, k) {
        let l = &lambda[s - 1];
        let q = BigRational::one() - l;
        let q_n: BigRational = Pow::pow(&q, n as u32);
        if l.is_zero() {
            total += &prefix * BigInt::from(n);
        } else {
            total += &prefix * (l.recip() - BigRational::one()) * (BigRational::one() - &q_n);
        }
        prefix *= q_n;
    }
    Ok(total)
}

/// `R_D` by the defining product-sum, one user at a time.
pub fn load_benchmark_d_literal(regime: Regime, k: u64, t: u64) -> Result<BigRational> {
    let lambda = lambda_ratios(k, t)?;
    let mut ratios: Vec<BigRational> = regime
        .classes()
        .iter()
        .flat_map(|c| std::iter::repeat_n(lambda[c.size() - 1].clone(), k as usize))
        .collect();
    ratios.sort();
    let mut prod = BigRational::one();
    let mut total = BigRational::zero();
    for m in ratios {
        prod *= BigRational::one() - m;
        total += &prod;
    }
    Ok(total)
}

/// Floating-point `R_D`, for grids too large for exact powers.
pub fn load_benchmark_d_f64(regime: Regime, k: u64, t: u64) -> Result<f64> {
    let lambda = lambda_ratios_f64(k, t)?;
    let mut prefix = 1.0f64;
    let mut total = 0.0f64;
    for (s, n) in memory_profile(regime, k) {
        let l = lambda[s - 1];
        let q_n = (1.0 - l).powf(n as f64);
        total += if l == 0.0 { prefix * n as f64 } else { prefix * (1.0 / l - 1.0) * (1.0 - q_n) };
        prefix *= q_n;
    }
    Ok(total)
}

/// Large-`K` limit of `R_D`: `1 / lambda - 1` for the smallest ratio present.
pub fn load_benchmark_d_asymptotic(regime: Regime, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::invalid(format!("memory ratio {m} outside (0, 1]")));
    }
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    let smallest = if regime.classes().contains(&UserClass::I) { 1 } else { 2 };
    let lambda = 1.0 - (1.0 - m).powi(smallest);
    Ok(1.0 / lambda - 1.0)
}

/// `R_B / R_A` in the large-`K` limit at memory ratio `m`.
pub fn ratio_b_over_a(regime: Regime, m: f64) -> Result<f64> {
    if m == 0.0 {
        return Err(Error::UndefinedRatio("both loads diverge at M/N = 0".into()));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::invalid(format!("memory ratio {m} outside (0, 1]")));
    }
    let q = 1.0 - m;
    let geo = |lo: i32, hi: i32| (lo..=hi).map(|i| q.powi(i)).sum::<f64>();
    Ok(match regime {
        Regime::Min => 1.0 + (2.0 * m / 3.0) * (q * q - 1.0),
        Regime::Mid => m / 8.0 * ((8.0 / m - 6.0) * q + 3.0 * q.powi(3) + 4.0 * q.powi(4) + geo(0, 6)),
        Regime::Max => m / 7.0 * ((7.0 / m - 6.0) * q + 3.0 * q.powi(3) + 4.0 * q.powi(4) + geo(1, 6)),
    })
}

/// Multiplicative gap constants claimed in the large-`K` limit.
pub fn gap_bound(regime: Regime) -> u32 {
    match regime {
        Regime::Min => 18,
        Regime::Mid => 48,
        Regime::Max => 42,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub regime: Regime,
    pub ratio_a_over_d: f64,
    pub six_times_ratio: f64,
    pub bound: u32,
    pub within_bound: bool,
}

/// `R_A / R_D` and `6 R_A / R_D` per regime next to the claimed constants.
/// Finite-`K` values are reported, not asserted.
pub fn gap_report(k: u64, t: u64) -> Result<Vec<GapRow>> {
    if t == 0 {
        return Err(Error::invalid("gap report needs t >= 1"));
    }
    Regime::ALL
        .into_iter()
        .map(|regime| {
            let ra = to_f64(&load_a(regime, k, t)?);
            let rd = load_benchmark_d_f64(regime, k, t)?;
            let ratio = if rd == 0.0 { f64::NAN } else { ra / rd };
            Ok(GapRow {
                regime,
                ratio_a_over_d: ratio,
                six_times_ratio: 6.0 * ratio,
                bound: gap_bound(regime),
                within_bound: 6.0 * ratio <= gap_bound(regime) as f64,
            })
        })
        .collect()
}

/// Nearest `f64` of a big rational, also when both parts overflow `f64`.
pub fn to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64().filter(|v| v.is_finite()) {
        return v;
    }
    let shift = x.numer().bits().max(x.denom().bits()) as i64 - 900;
    let scale = |v: &BigInt| -> f64 {
        if shift > 0 {
            (v >> shift as usize).to_f64().unwrap_or(f64::NAN)
        } else {
            v.to_f64().unwrap_or(f64::NAN)
        }
    };
    let v = scale(&x.numer().abs()) / scale(x.denom());
    if x.is_negative() {
        -v
    } else {
        v
    }
}
