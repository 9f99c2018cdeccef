//! Load rows for CSV/JSON output.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::analysis::{load_benchmark_d, load_benchmark_d_asymptotic, load_uncoded, to_f64};
use crate::error::{Error, Result};
use crate::geometry::Regime;
use crate::mn::mn_load;
use crate::scheme_a::{load_a, load_a_asymptotic};
use crate::scheme_b::{load_b_asymptotic, load_b_closed_form};

pub const CSV_HEADER: &str = "regime,K1,K2,t,scheme,load_num,load_den,load_float,asymptotic";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "B")]
    B,
    #[serde(rename = "uncoded")]
    Uncoded,
    #[serde(rename = "benchmark_D")]
    BenchmarkD,
    #[serde(rename = "MN")]
    Mn,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::A => "A",
            Scheme::B => "B",
            Scheme::Uncoded => "uncoded",
            Scheme::BenchmarkD => "benchmark_D",
            Scheme::Mn => "MN",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Scheme::A),
            "b" => Ok(Scheme::B),
            "uncoded" | "c" => Ok(Scheme::Uncoded),
            "benchmark_d" | "d" => Ok(Scheme::BenchmarkD),
            "mn" => Ok(Scheme::Mn),
            other => Err(Error::invalid(format!(
                "unknown scheme {other:?} (expected a, b, uncoded, d or mn)"
            ))),
        }
    }
}

/// One transmission load with the parameters it was computed for.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadReport {
    pub regime: Regime,
    pub k1: usize,
    pub k2: usize,
    pub t: usize,
    pub scheme: Scheme,
    pub load: BigRational,
    pub asymptotic: Option<f64>,
}

#[derive(Serialize)]
struct LoadRow<'a> {
    regime: Regime,
    #[serde(rename = "K1")]
    k1: usize,
    #[serde(rename = "K2")]
    k2: usize,
    t: usize,
    scheme: &'a str,
    load_num: String,
    load_den: String,
    load_float: f64,
    asymptotic: Option<f64>,
}

impl LoadReport {
    pub fn load_float(&self) -> f64 {
        to_f64(&self.load)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.regime,
            self.k1,
            self.k2,
            self.t,
            self.scheme,
            self.load.numer(),
            self.load.denom(),
            self.load_float(),
            self.asymptotic.filter(|a| a.is_finite()).map(|a| a.to_string()).unwrap_or_default()
        )
    }

    fn row(&self) -> LoadRow<'_> {
        LoadRow {
            regime: self.regime,
            k1: self.k1,
            k2: self.k2,
            t: self.t,
            scheme: self.scheme.as_str(),
            load_num: self.load.numer().to_string(),
            load_den: self.load.denom().to_string(),
            load_float: self.load_float(),
            asymptotic: self.asymptotic.filter(|a| a.is_finite()),
        }
    }
}

pub fn to_csv(reports: &[LoadReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn to_json(reports: &[LoadReport]) -> String {
    let rows: Vec<LoadRow<'_>> = reports.iter().map(LoadReport::row).collect();
    serde_json::to_string_pretty(&rows).expect("load rows serialize") + "\n"
}

/// Large-`K` limit of `scheme` at memory ratio `t / K`; none for the uncoded
/// baseline, which grows with `K`.
pub fn asymptotic(scheme: Scheme, regime: Regime, k: u64, t: u64) -> Option<f64> {
    let m = t as f64 / k as f64;
    match scheme {
        Scheme::A => load_a_asymptotic(regime, m).ok(),
        Scheme::B => load_b_asymptotic(regime, m).ok(),
        Scheme::BenchmarkD => load_benchmark_d_asymptotic(regime, m).ok(),
        Scheme::Mn => load_a_asymptotic(Regime::Min, m).ok().map(|x| x / 3.0),
        Scheme::Uncoded => None,
    }
}

/// Closed-form load of `scheme`.
pub fn closed_form(scheme: Scheme, regime: Regime, k: u64, t: u64) -> Result<BigRational> {
    match scheme {
        Scheme::A => load_a(regime, k, t),
        Scheme::B => load_b_closed_form(regime, k, t),
        Scheme::Uncoded => load_uncoded(regime, k, t),
        Scheme::BenchmarkD => load_benchmark_d(regime, k, t),
        Scheme::Mn => mn_load(k, t),
    }
}

pub fn closed_form_report(scheme: Scheme, regime: Regime, k1: usize, k2: usize, t: usize) -> Result<LoadReport> {
    let k = (k1 * k2) as u64;
    Ok(LoadReport {
        regime,
        k1,
        k2,
        t,
        scheme,
        load: closed_form(scheme, regime, k, t as u64)?,
        asymptotic: asymptotic(scheme, regime, k, t as u64),
    })
}
