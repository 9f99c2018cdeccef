//! MN delivery with cache-aware term dropping and MDS compression.
//!
//! Within a sub-type, the term for role `p` of signal `S` is dropped when
//! its recipient already reaches `W_{d_p, S \ p}`, i.e. when `S \ p` meets
//! the recipient's access set. A user of the sub-type can then rebuild a
//! number of these modified signals from its own caches. Every user of a
//! class rebuilds at least `h` of them, so the `n = C(K, t+1)` signals of a
//! sub-type are sent as `n - h` symbols of an MDS code, and each user
//! recovers whatever it still needs from the code.
//!
//! The signals counted towards `h` form a fixed family per user: with the
//! access list ordered as in [`UserClass::offsets`], take the first accessed
//! node `a` that lies in `S`; `S` belongs to the family when the term for
//! `a` is dropped (its recipient, the same sub-type's user anchored at `a`,
//! reaches `S \ a`). Every other term of such an `S` is indexed by a set
//! containing `a`, so the user has it cached.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{binomial, binomial_column, k_subsets, NodeSet};
use crate::demand::DemandMap;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_users, Grid, GridConfig, Regime, UserClass, UserSpec, UserType};
use crate::mds::{mds_encode, MdsBlock};
use crate::mn::{coded_signals, decode_role, missing_error, place, term, wrap, xor_into, PlacementMap, Signal, SignalId};

/// Largest signal count `h_bruteforce` will enumerate.
pub const ORACLE_LIMIT: u64 = 10_000;

/// Access masks of a sub-type's users, indexed by MN role.
pub fn role_masks(grid: &Grid, class: UserClass) -> Vec<NodeSet> {
    grid.nodes()
        .map(|anchor| grid.mask(&class.ordered_access(grid, anchor)))
        .collect()
}

/// Whether the term for role `p` survives in the modified signal `S`.
#[inline]
pub fn term_kept(masks: &[NodeSet], s: NodeSet, p: usize) -> bool {
    !s.without(p).intersects(masks[p])
}

/// Modified signals of one sub-type, in colex order.
pub fn modified_signals(
    subtype: UserClass,
    demands: &DemandMap,
    placement: &PlacementMap,
    grid: &Grid,
) -> Result<Vec<Signal>> {
    let d = demands.for_subtype(subtype)?;
    let masks = role_masks(grid, subtype);
    let raw = coded_signals(placement, d, |s, p| term_kept(&masks, s, p));
    Ok(wrap(subtype, raw))
}

/// Each dropped term is readable by its recipient through its own caches.
pub fn check_dropped_terms(subtype: UserClass, grid: &Grid, placement: &PlacementMap, demands: &[usize]) -> bool {
    let masks = role_masks(grid, subtype);
    k_subsets(grid.len(), placement.t() + 1).all(|s| {
        s.iter()
            .filter(|&p| !term_kept(&masks, s, p))
            .all(|p| placement.view(masks[p]).get(term(s, p, demands)).is_some())
    })
}

/// The user's counted family of rebuildable signals (see the module docs).
pub fn reconstructible_signals(user: &UserSpec, grid: &Grid, t: usize) -> Vec<SignalId> {
    let order: Vec<usize> = user.ordered_access(grid).iter().map(|&n| grid.index(n)).collect();
    let masks = role_masks(grid, user.class);
    k_subsets(grid.len(), t + 1)
        .filter(|&s| {
            order
                .iter()
                .find(|&&a| s.contains(a))
                .is_some_and(|&a| s.without(a).intersects(masks[a]))
        })
        .map(|subset| SignalId {
            subtype: user.class,
            subset,
        })
        .collect()
}

/// Every modified signal whose kept terms the user can all read from cache.
/// A superset of [`reconstructible_signals`].
pub fn cache_computable_signals(user: &UserSpec, grid: &Grid, t: usize) -> Vec<SignalId> {
    let access = user.access_mask(grid);
    let masks = role_masks(grid, user.class);
    k_subsets(grid.len(), t + 1)
        .filter(|&s| {
            s.iter()
                .filter(|&p| term_kept(&masks, s, p))
                .all(|p| s.without(p).intersects(access))
        })
        .map(|subset| SignalId {
            subtype: user.class,
            subset,
        })
        .collect()
}

/// Rebuilds modified signal `S` from the user's caches alone.
fn rebuild_from_cache(
    view: &crate::mn::CacheView<'_>,
    masks: &[NodeSet],
    s: NodeSet,
    demands: &[usize],
    packet_bytes: usize,
) -> Option<Vec<u8>> {
    let mut payload = vec![0u8; packet_bytes];
    for p in s.iter().filter(|&p| term_kept(masks, s, p)) {
        xor_into(&mut payload, view.get(term(s, p, demands))?);
    }
    Some(payload)
}

/// Redundancy count of a user type with its parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundancyCount {
    pub class: UserType,
    pub parts: Vec<BigUint>,
    pub total: BigUint,
}

impl RedundancyCount {
    pub fn total_usize(&self) -> Result<usize> {
        self.total
            .to_usize()
            .ok_or_else(|| Error::invalid("redundancy count does not fit in memory"))
    }
}

/// Closed-form `h` for a user type (`0` for type I), with zero-clamped
/// binomials `c_i = C(K - i, t)`.
pub fn h_formula(class: UserType, k: u64, t: u64) -> Result<RedundancyCount> {
    if t > k {
        return Err(Error::invalid(format!("t = {t} exceeds K = {k}")));
    }
    let c = binomial_column(k as i64, t as i64, 8);
    let diff = |a: usize, b: usize| &c[a] - &c[b];
    let parts = match class {
        UserType::I => vec![],
        UserType::II => vec![diff(1, 2), diff(2, 3)],
        UserType::III => vec![diff(1, 3), diff(2, 4), diff(3, 5)],
        UserType::IV => vec![diff(1, 4), diff(2, 5), diff(3, 6), diff(4, 7)],
    };
    let total = parts.iter().sum();
    Ok(RedundancyCount { class, parts, total })
}

/// Total reduction `H`: `2 h_II` (min) or `2 h_II + 4 h_III + h_IV`.
pub fn total_reduction(regime: Regime, k: u64, t: u64) -> Result<BigUint> {
    Ok(regime
        .classes()
        .iter()
        .map(|c| h_formula(c.user_type(), k, t).map(|h| h.total))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum())
}

/// Minimum, over all users of `class` on `grid`, of the counted family size.
pub fn h_bruteforce(class: UserType, grid: &Grid, t: usize) -> Result<usize> {
    oracle_min(class, grid, t, reconstructible_signals)
}

/// Minimum, over all users of `class`, of the signals they can rebuild from
/// cache under the drop-all rule.
pub fn computable_min(class: UserType, grid: &Grid, t: usize) -> Result<usize> {
    oracle_min(class, grid, t, cache_computable_signals)
}

fn oracle_min(class: UserType, grid: &Grid, t: usize, count: fn(&UserSpec, &Grid, usize) -> Vec<SignalId>) -> Result<usize> {
    if t > grid.len() {
        return Err(Error::invalid("t exceeds K1*K2"));
    }
    let n = binomial(grid.len(), t + 1);
    if n > ORACLE_LIMIT {
        return Err(Error::OracleRefused(format!(
            "C({}, {}) = {n} signals exceeds the {ORACLE_LIMIT} limit; use a smaller grid or t",
            grid.len(),
            t + 1
        )));
    }
    Ok(UserClass::ALL
        .into_iter()
        .filter(|c| c.user_type() == class)
        .flat_map(|c| grid.nodes().map(move |a| UserSpec::new(grid, c, a)))
        .map(|u| count(&u, grid, t).len())
        .min()
        .unwrap_or(0))
}

/// `R_B = ({3, 8, 7} C(K, t+1) - H) / C(K, t)`.
pub fn load_b_closed_form(regime: Regime, k: u64, t: u64) -> Result<BigRational> {
    let (sent, f) = symbols_b(regime, k, t)?;
    Ok(BigRational::new(BigInt::from(sent), BigInt::from(f)))
}

/// Transmitted symbols and `F` for Scheme B.
pub fn symbols_b(regime: Regime, k: u64, t: u64) -> Result<(BigUint, BigUint)> {
    if t > k {
        return Err(Error::invalid(format!("t = {t} exceeds K = {k}")));
    }
    let f = crate::combinatorics::binomial_big(k, t);
    // C(K, t+1) = C(K, t) (K - t) / (t + 1)
    let n = &f * BigUint::from(k - t) / BigUint::from(t + 1);
    let sent = n * BigUint::from(regime.subtype_count()) - total_reduction(regime, k, t)?;
    Ok((sent, f))
}

/// Large-`K` limit of `R_B` at memory ratio `m`.
pub fn load_b_asymptotic(regime: Regime, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::invalid(format!("memory ratio {m} outside (0, 1]")));
    }
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    let q = 1.0 - m;
    let geo = |lo: i32, hi: i32| (lo..=hi).map(|i| q.powi(i)).sum::<f64>();
    Ok(match regime {
        Regime::Min => 3.0 * q * q / m + q + 2.0 * q.powi(3),
        Regime::Mid => (8.0 / m - 6.0) * q * q + 3.0 * q.powi(4) + 4.0 * q.powi(5) + geo(1, 7),
        Regime::Max => (7.0 / m - 6.0) * q * q + 3.0 * q.powi(4) + 4.0 * q.powi(5) + geo(2, 7),
    })
}

/// What a sub-type receives.
#[derive(Clone, Debug)]
pub enum Delivery {
    /// `h = 0`: the modified signals themselves.
    Plain(Vec<Signal>),
    Coded(MdsBlock),
}

impl Delivery {
    pub fn symbol_count(&self) -> usize {
        match self {
            Delivery::Plain(s) => s.len(),
            Delivery::Coded(b) => b.k,
        }
    }
}

/// Counting summary of one sub-type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtypeSummary {
    pub class: UserClass,
    /// `C(K, t+1)`.
    pub n: usize,
    /// Compression used, from the closed form.
    pub h: usize,
    /// Smallest counted family over the sub-type's users.
    pub family_min: usize,
    /// Smallest drop-all rebuildable set over the sub-type's users.
    pub computable_min: usize,
}

#[derive(Clone, Debug)]
pub struct SchemeBTranscript {
    pub deliveries: Vec<(UserClass, Delivery)>,
    pub summaries: Vec<SubtypeSummary>,
    pub total_symbols: usize,
    pub subpacketization: usize,
}

impl SchemeBTranscript {
    pub fn load(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.total_symbols),
            BigInt::from(self.subpacketization),
        )
    }
}

/// Test hook: damage one symbol of a sub-type before users decode.
#[derive(Clone, Copy, Debug, Default)]
pub struct SchemeBOptions {
    pub corrupt: Option<(UserClass, usize)>,
}

pub fn run_scheme_b(config: &GridConfig, demands: &DemandMap) -> Result<SchemeBTranscript> {
    let placement = place(config)?;
    run_scheme_b_with(config, &placement, demands, SchemeBOptions::default())
}

/// Encodes every sub-type and decodes every user byte-exactly.
pub fn run_scheme_b_with(
    config: &GridConfig,
    placement: &PlacementMap,
    demands: &DemandMap,
    options: SchemeBOptions,
) -> Result<SchemeBTranscript> {
    demands.check_covers(config)?;
    let grid = config.grid();
    let t = config.t;
    let users = enumerate_users(config);
    let mut deliveries = Vec::new();
    let mut summaries = Vec::new();
    for &class in config.regime().classes() {
        let d = demands.for_subtype(class)?;
        let masks = role_masks(&grid, class);
        let signals = modified_signals(class, demands, placement, &grid)?;
        let n = signals.len();
        let h = h_formula(class.user_type(), grid.len() as u64, t as u64)?.total_usize()?;
        let mut delivery = if h == 0 {
            Delivery::Plain(signals)
        } else {
            let payloads: Vec<Vec<u8>> = signals.into_iter().map(|s| s.payload).collect();
            Delivery::Coded(mds_encode(class, &payloads, h)?)
        };
        if let Some((c, i)) = options.corrupt {
            if c == class {
                corrupt(&mut delivery, i);
            }
        }
        let mut family_min = usize::MAX;
        let mut computable = usize::MAX;
        for user in users.iter().filter(|u| u.class == class) {
            let family = reconstructible_signals(user, &grid, t);
            family_min = family_min.min(family.len());
            computable = computable.min(cache_computable_signals(user, &grid, t).len());
            if family.len() < h {
                return Err(Error::CountingViolation {
                    class,
                    anchor: user.anchor,
                    found: family.len(),
                    required: h,
                });
            }
            let file = decode_b_user(user, &grid, placement, d, &masks, &delivery, &family)?;
            if file != placement.file(d[grid.index(user.anchor)]) {
                return Err(Error::DecodeFailure {
                    class,
                    anchor: user.anchor,
                    reason: "decoded bytes differ from the requested file".into(),
                });
            }
        }
        summaries.push(SubtypeSummary {
            class,
            n,
            h,
            family_min: if family_min == usize::MAX { 0 } else { family_min },
            computable_min: if computable == usize::MAX { 0 } else { computable },
        });
        deliveries.push((class, delivery));
    }
    let total_symbols = deliveries.iter().map(|(_, d)| d.symbol_count()).sum();
    Ok(SchemeBTranscript {
        deliveries,
        summaries,
        total_symbols,
        subpacketization: placement.subpacketization(),
    })
}

fn corrupt(delivery: &mut Delivery, i: usize) {
    match delivery {
        Delivery::Plain(s) => {
            if let Some(b) = s.get_mut(i).and_then(|s| s.payload.first_mut()) {
                *b ^= 0x5a;
            }
        }
        Delivery::Coded(block) => {
            if let Some(x) = block.symbols.get_mut(i).and_then(|s| s.first_mut()) {
                *x ^= 0x5a;
            }
        }
    }
}

fn decode_b_user(
    user: &UserSpec,
    grid: &Grid,
    placement: &PlacementMap,
    demands: &[usize],
    masks: &[NodeSet],
    delivery: &Delivery,
    family: &[SignalId],
) -> Result<Vec<u8>> {
    let view = placement.view(user.access_mask(grid));
    let role = grid.index(user.anchor);
    let kept = |s: NodeSet, p: usize| term_kept(masks, s, p);
    let available: Vec<Option<Vec<u8>>> = match delivery {
        Delivery::Plain(signals) => signals.iter().map(|s| Some(s.payload.clone())).collect(),
        Delivery::Coded(block) => {
            let mut slots: Vec<Option<Vec<u8>>> = vec![None; block.n];
            for id in family {
                let bytes = rebuild_from_cache(&view, masks, id.subset, demands, placement.packet_bytes()).ok_or_else(|| {
                    Error::DecodeFailure {
                        class: user.class,
                        anchor: user.anchor,
                        reason: format!("counted signal {:?} is not computable from cache", grid.nodes_of(id.subset)),
                    }
                })?;
                slots[id.subset.rank() as usize] = Some(bytes);
            }
            // signals T + role for every uncached T
            let mut wanted: Vec<usize> = k_subsets(grid.len(), placement.t())
                .filter(|s| !view.has(*s))
                .map(|s| s.with(role).rank() as usize)
                .filter(|&j| slots[j].is_none())
                .collect();
            wanted.sort_unstable();
            wanted.dedup();
            let known: Vec<Option<&[u8]>> = slots.iter().map(|s| s.as_deref()).collect();
            let recovered = block.recover(&known, &wanted)?;
            for (j, bytes) in wanted.into_iter().zip(recovered) {
                slots[j] = Some(bytes);
            }
            slots
        }
    };
    decode_role(role, &view, demands, |s| available.get(s.rank() as usize)?.as_deref(), kept)
        .map_err(|m| missing_error(grid, m))
}

/// `true` when the closed form yields zero for every part (no compression).
pub fn is_uncompressed(class: UserType, k: u64, t: u64) -> bool {
    h_formula(class, k, t).map(|h| h.total.is_zero()).unwrap_or(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial_clamped;
    use crate::geometry::NodeId;

    fn u(parts: &[u64]) -> Vec<BigUint> {
        parts.iter().map(|&p| BigUint::from(p)).collect()
    }

    #[test]
    fn worked_example_h_parts() {
        let h = h_formula(UserType::II, 9, 2).unwrap();
        assert_eq!(h.parts, u(&[7, 6]));
        assert_eq!(h.total, BigUint::from(13u32));
        assert_eq!(h_formula(UserType::III, 9, 2).unwrap().parts, u(&[13, 11, 9]));
        assert_eq!(h_formula(UserType::IV, 9, 2).unwrap().parts, u(&[18, 15, 12, 9]));
        assert_eq!(h_formula(UserType::IV, 9, 2).unwrap().total, BigUint::from(54u32));
    }

    #[test]
    fn worked_example_family_for_ii1() {
        let grid = Grid::new(3, 3).unwrap();
        let user = UserSpec::new(&grid, UserClass::II1, NodeId::new(0, 0));
        let fam = reconstructible_signals(&user, &grid, 2);
        assert_eq!(fam.len(), 13);
        let a = grid.index(NodeId::new(0, 0));
        let b = grid.index(NodeId::new(0, 1));
        let c = grid.index(NodeId::new(0, 2));
        // the 7 signals containing (0,0),(0,1) and the 6 containing (0,1),(0,2) but not (0,0)
        assert_eq!(fam.iter().filter(|s| s.subset.contains(a) && s.subset.contains(b)).count(), 7);
        assert_eq!(
            fam.iter()
                .filter(|s| !s.subset.contains(a) && s.subset.contains(b) && s.subset.contains(c))
                .count(),
            6
        );
    }

    #[test]
    fn modified_signal_drops_the_listed_term() {
        let grid = Grid::new(3, 3).unwrap();
        let masks = role_masks(&grid, UserClass::II1);
        let ids = [NodeId::new(0, 1), NodeId::new(0, 2), NodeId::new(1, 0)].map(|n| grid.index(n));
        let s = NodeSet::from_indices(ids);
        assert!(!term_kept(&masks, s, ids[0]));
        assert!(term_kept(&masks, s, ids[1]));
        assert!(term_kept(&masks, s, ids[2]));
    }

    #[test]
    fn zero_memory_drops_nothing() {
        let grid = Grid::new(3, 3).unwrap();
        for class in UserClass::ALL {
            let masks = role_masks(&grid, class);
            for s in k_subsets(9, 1) {
                assert!(s.iter().all(|p| term_kept(&masks, s, p)));
            }
        }
    }

    #[test]
    fn oracle_matches_formula_on_3_by_4() {
        let grid = Grid::new(3, 4).unwrap();
        assert_eq!(h_bruteforce(UserType::II, &grid, 2).unwrap(), 19);
        assert_eq!(
            h_formula(UserType::II, 12, 2).unwrap().total,
            binomial_clamped(11, 2) - binomial_clamped(9, 2)
        );
    }

    #[test]
    fn oracle_refuses_large_instances() {
        let grid = Grid::new(8, 8).unwrap();
        assert!(matches!(h_bruteforce(UserType::II, &grid, 3), Err(Error::OracleRefused(_))));
    }

    #[test]
    fn worked_example_closed_forms() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(load_b_closed_form(Regime::Min, 9, 2).unwrap(), q(226, 36));
        assert_eq!(load_b_closed_form(Regime::Mid, 9, 2).unwrap(), q(460, 36));
        assert_eq!(load_b_closed_form(Regime::Max, 9, 2).unwrap(), q(376, 36));
        for r in Regime::ALL {
            assert!(load_b_closed_form(r, 9, 9).unwrap().is_zero());
        }
    }

    #[test]
    fn worked_example_run_mid() {
        let cfg = GridConfig::new(3, 3, Regime::Mid, 2).unwrap().with_packet_bytes(3).unwrap();
        let demands = DemandMap::worst_case(&cfg).unwrap();
        let tr = run_scheme_b(&cfg, &demands).unwrap();
        assert_eq!(tr.total_symbols, 460);
        let iv = tr.summaries.iter().find(|s| s.class == UserClass::IV).unwrap();
        assert_eq!((iv.n, iv.h, iv.family_min), (84, 54, 54));
        assert!(iv.computable_min >= 54);
    }

    #[test]
    fn corrupted_symbol_breaks_decoding() {
        let cfg = GridConfig::new(3, 3, Regime::Min, 2).unwrap().with_packet_bytes(2).unwrap();
        let placement = place(&cfg).unwrap();
        let demands = DemandMap::worst_case(&cfg).unwrap();
        let opts = SchemeBOptions {
            corrupt: Some((UserClass::II1, 0)),
        };
        let err = run_scheme_b_with(&cfg, &placement, &demands, opts).unwrap_err();
        assert!(matches!(err, Error::DecodeFailure { .. }), "{err}");
    }
}
