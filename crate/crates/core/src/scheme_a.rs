//! One independent MN delivery per user sub-type.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinatorics::binomial;
use crate::demand::DemandMap;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_users, GridConfig, Regime, UserClass};
use crate::mn::{decode_user, mn_load, mn_signals, place, PlacementMap, Signal};

#[derive(Clone, Debug)]
pub struct SchemeATranscript {
    /// Signals per sub-type, in delivery order.
    pub deliveries: Vec<(UserClass, Vec<Signal>)>,
    pub total_signals: usize,
    /// Packets per file, `C(K1K2, t)`.
    pub subpacketization: usize,
    pub demands: DemandMap,
}

impl SchemeATranscript {
    /// Transmitted signals over `F`.
    pub fn load(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.total_signals),
            BigInt::from(self.subpacketization),
        )
    }

    pub fn signals(&self, class: UserClass) -> Option<&[Signal]> {
        self.deliveries
            .iter()
            .find(|(c, _)| *c == class)
            .map(|(_, s)| s.as_slice())
    }
}

/// Places the library, delivers to every sub-type and decodes every user.
pub fn run_scheme_a(config: &GridConfig, demands: &DemandMap) -> Result<SchemeATranscript> {
    let placement = place(config)?;
    run_scheme_a_with(config, &placement, demands)
}

pub fn run_scheme_a_with(config: &GridConfig, placement: &PlacementMap, demands: &DemandMap) -> Result<SchemeATranscript> {
    demands.check_covers(config)?;
    let grid = config.grid();
    let users = enumerate_users(config);
    let mut deliveries = Vec::new();
    for &class in config.regime().classes() {
        let signals = mn_signals(class, demands, placement)?;
        let d = demands.for_subtype(class)?;
        for user in users.iter().filter(|u| u.class == class) {
            let file = decode_user(user, user.anchor, &signals, placement, &grid, d)?;
            if file != placement.file(d[grid.index(user.anchor)]) {
                return Err(Error::DecodeFailure {
                    class,
                    anchor: user.anchor,
                    reason: "decoded bytes differ from the requested file".into(),
                });
            }
        }
        deliveries.push((class, signals));
    }
    let total_signals = deliveries.iter().map(|(_, s)| s.len()).sum();
    Ok(SchemeATranscript {
        deliveries,
        total_signals,
        subpacketization: placement.subpacketization(),
        demands: demands.clone(),
    })
}

/// `R_A = {3, 8, 7} (K - t) / (t + 1)`.
pub fn load_a(regime: Regime, k: u64, t: u64) -> Result<BigRational> {
    Ok(mn_load(k, t)? * BigInt::from(regime.subtype_count()))
}

/// `{3, 8, 7} (1 - m) / m` for memory ratio `m = M/N`; infinite at `m = 0`.
pub fn load_a_asymptotic(regime: Regime, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::invalid(format!("memory ratio {m} outside (0, 1]")));
    }
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(regime.subtype_count() as f64 * (1.0 - m) / m)
}

/// Transmitted signal count of Scheme A, `{3, 8, 7} C(K, t+1)`.
pub fn signal_count_a(regime: Regime, k: usize, t: usize) -> u64 {
    regime.subtype_count() * binomial(k, t + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn worked_example_loads() {
        assert_eq!(load_a(Regime::Mid, 9, 2).unwrap(), q(56, 3));
        assert_eq!(load_a(Regime::Max, 9, 2).unwrap(), q(49, 3));
        assert_eq!(load_a(Regime::Min, 9, 2).unwrap(), q(7, 1));
        assert_eq!(load_a(Regime::Min, 9, 9).unwrap(), q(0, 1));
    }

    #[test]
    fn asymptotic_examples() {
        assert!((load_a_asymptotic(Regime::Min, 1.0 / 3.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((load_a_asymptotic(Regime::Mid, 1.0 / 3.0).unwrap() - 16.0).abs() < 1e-12);
        assert_eq!(load_a_asymptotic(Regime::Mid, 1.0).unwrap(), 0.0);
        assert_eq!(load_a_asymptotic(Regime::Mid, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn worked_example_run() {
        let cfg = GridConfig::new(3, 3, Regime::Mid, 2).unwrap().with_packet_bytes(4).unwrap();
        let demands = DemandMap::worst_case(&cfg).unwrap();
        let tr = run_scheme_a(&cfg, &demands).unwrap();
        assert_eq!(tr.total_signals, 672);
        assert_eq!(tr.subpacketization, 36);
        assert_eq!(tr.load(), load_a(Regime::Mid, 9, 2).unwrap());
    }

    #[test]
    fn full_memory_sends_nothing() {
        let cfg = GridConfig::new(3, 3, Regime::Max, 9).unwrap().with_packet_bytes(2).unwrap();
        let demands = DemandMap::worst_case(&cfg).unwrap();
        let tr = run_scheme_a(&cfg, &demands).unwrap();
        assert_eq!(tr.total_signals, 0);
    }
}
