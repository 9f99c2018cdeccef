//! The Maddah-Ali/Niesen scheme over a universe of `K` cache nodes.
//!
//! Every file is split into `F = C(K, t)` packets `W_{n,T}`, one per
//! `t`-subset `T`; node `k` caches `W_{n,T}` for every `T` containing `k`.
//! A user reaches every packet whose subset meets its access set. Delivery
//! sends one XOR per `(t+1)`-subset `S`, combining the packet
//! `W_{d_p, S \ {p}}` for each role `p` in `S`.
//!
//! Roles are flattened node indices; on a grid, the user of a sub-type
//! anchored at node `a` plays role `grid.index(a)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::combinatorics::{binomial, k_subsets, NodeSet, MAX_UNIVERSE};
use crate::demand::DemandMap;
use crate::error::{Error, Result};
use crate::geometry::{Grid, GridConfig, NodeId, UserClass, UserSpec};

/// Packet `W_{file, subset}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PacketId {
    pub file: usize,
    pub subset: NodeSet,
}

/// File library split into packets, with the uncoded node placement.
///
/// Payloads are stored file-major, packets in colex order of their subsets,
/// so a file's bytes are the concatenation of its packets.
#[derive(Clone, Debug)]
pub struct PlacementMap {
    universe: usize,
    t: usize,
    n_files: usize,
    packet_bytes: usize,
    packets_per_file: usize,
    payload: Vec<u8>,
}

impl PlacementMap {
    /// Seeded pseudo-random library for `universe` nodes.
    pub fn generate(universe: usize, t: usize, n_files: usize, packet_bytes: usize, seed: u64) -> Result<Self> {
        if universe == 0 || universe > MAX_UNIVERSE {
            return Err(Error::invalid(format!("universe must be in [1, {MAX_UNIVERSE}], got {universe}")));
        }
        if t > universe {
            return Err(Error::invalid(format!("t = {t} exceeds the {universe} nodes")));
        }
        if n_files == 0 || packet_bytes == 0 {
            return Err(Error::invalid("need at least one file and one byte per packet"));
        }
        let packets_per_file = usize::try_from(binomial(universe, t)).ok();
        let total = packets_per_file
            .and_then(|p| p.checked_mul(n_files))
            .and_then(|x| x.checked_mul(packet_bytes))
            .filter(|&x| x as u64 <= 1 << 32)
            .ok_or_else(|| Error::invalid("library too large to hold in memory"))?;
        let mut payload = vec![0u8; total];
        ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut payload);
        Ok(PlacementMap {
            universe,
            t,
            n_files,
            packet_bytes,
            packets_per_file: total / (n_files * packet_bytes),
            payload,
        })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n_files(&self) -> usize {
        self.n_files
    }

    pub fn packet_bytes(&self) -> usize {
        self.packet_bytes
    }

    /// `F = C(K, t)`.
    pub fn subpacketization(&self) -> usize {
        self.packets_per_file
    }

    pub fn file(&self, file: usize) -> &[u8] {
        let len = self.packets_per_file * self.packet_bytes;
        &self.payload[file * len..(file + 1) * len]
    }

    pub fn packet(&self, id: PacketId) -> &[u8] {
        debug_assert_eq!(id.subset.len(), self.t);
        debug_assert!(id.file < self.n_files);
        let start = (id.file * self.packets_per_file + id.subset.rank() as usize) * self.packet_bytes;
        &self.payload[start..start + self.packet_bytes]
    }

    /// Packets stored at `node`: `W_{n,T}` for every file and every `T` containing it.
    pub fn node_packets(&self, node: usize) -> Vec<PacketId> {
        let subsets: Vec<NodeSet> = k_subsets(self.universe, self.t).filter(|s| s.contains(node)).collect();
        (0..self.n_files)
            .flat_map(|file| subsets.iter().map(move |&subset| PacketId { file, subset }))
            .collect()
    }

    /// `N * C(K-1, t-1)`.
    pub fn cached_packet_count(&self, node: usize) -> usize {
        if node >= self.universe || self.t == 0 {
            0
        } else {
            self.n_files * binomial(self.universe - 1, self.t - 1) as usize
        }
    }

    /// Read access restricted to the packets cached at `access`.
    pub fn view(&self, access: NodeSet) -> CacheView<'_> {
        CacheView { placement: self, access }
    }
}

/// What a user can read from the cache nodes it reaches. Every cache read in
/// decoding goes through here, so a decoder cannot touch a packet the user
/// has no path to.
#[derive(Clone, Copy, Debug)]
pub struct CacheView<'a> {
    placement: &'a PlacementMap,
    access: NodeSet,
}

impl<'a> CacheView<'a> {
    pub fn access(&self) -> NodeSet {
        self.access
    }

    pub fn has(&self, subset: NodeSet) -> bool {
        subset.intersects(self.access)
    }

    pub fn get(&self, id: PacketId) -> Option<&'a [u8]> {
        self.has(id.subset).then(|| self.placement.packet(id))
    }
}

/// Uncoded placement for a grid configuration.
pub fn place(config: &GridConfig) -> Result<PlacementMap> {
    config.check_simulable()?;
    PlacementMap::generate(config.nodes(), config.t, config.n_files, config.packet_bytes, config.seed)
}

/// All packets (over every file) the user can read from its caches.
pub fn retrievable_packets(user: &UserSpec, placement: &PlacementMap, grid: &Grid) -> Vec<PacketId> {
    let access = user.access_mask(grid);
    let subsets = retrievable_subsets(access, placement.universe(), placement.t());
    (0..placement.n_files())
        .flat_map(|file| subsets.iter().map(move |&subset| PacketId { file, subset }))
        .collect()
}

/// `t`-subsets meeting `access`; there are `C(K,t) - C(K-|access|, t)`.
pub fn retrievable_subsets(access: NodeSet, universe: usize, t: usize) -> Vec<NodeSet> {
    k_subsets(universe, t).filter(|s| s.intersects(access)).collect()
}

/// Signal `X_S` of one sub-type's delivery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignalId {
    pub subtype: UserClass,
    pub subset: NodeSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signal {
    pub id: SignalId,
    pub payload: Vec<u8>,
}

#[inline]
pub fn xor_into(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// The packet carried for role `p` inside signal `S`.
#[inline]
pub fn term(subset: NodeSet, role: usize, demands: &[usize]) -> PacketId {
    PacketId {
        file: demands[role],
        subset: subset.without(role),
    }
}

/// XOR signals for every `(t+1)`-subset, in colex order, keeping the term
/// for role `p` of `S` only when `keep(S, p)` holds.
pub fn coded_signals<F>(placement: &PlacementMap, demands: &[usize], keep: F) -> Vec<(NodeSet, Vec<u8>)>
where
    F: Fn(NodeSet, usize) -> bool,
{
    assert_eq!(demands.len(), placement.universe(), "one demand per role");
    if placement.t() >= placement.universe() {
        return Vec::new();
    }
    k_subsets(placement.universe(), placement.t() + 1)
        .map(|s| {
            let mut payload = vec![0u8; placement.packet_bytes()];
            for p in s.iter().filter(|&p| keep(s, p)) {
                xor_into(&mut payload, placement.packet(term(s, p, demands)));
            }
            (s, payload)
        })
        .collect()
}

/// Plain MN delivery for `K` roles with one demand per role.
pub fn mn_signals_raw(placement: &PlacementMap, demands: &[usize]) -> Vec<(NodeSet, Vec<u8>)> {
    coded_signals(placement, demands, |_, _| true)
}

/// Plain MN delivery to the users of one sub-type.
pub fn mn_signals(subtype: UserClass, demands: &DemandMap, placement: &PlacementMap) -> Result<Vec<Signal>> {
    let d = demands.for_subtype(subtype)?;
    Ok(wrap(subtype, mn_signals_raw(placement, d)))
}

pub(crate) fn wrap(subtype: UserClass, raw: Vec<(NodeSet, Vec<u8>)>) -> Vec<Signal> {
    raw.into_iter()
        .map(|(subset, payload)| Signal {
            id: SignalId { subtype, subset },
            payload,
        })
        .collect()
}

/// Rebuilds the file demanded by `role` from its cache view and the signals.
///
/// A missing packet `W_{d,T}` (with `T` disjoint from the access set, hence
/// `role` not in `T`) is read off signal `S = T + role`: every other term of
/// `S` is indexed by a set containing `role`, so it is cached. `kept(S, p)`
/// says whether the term for `p` was included in `S`'s payload.
pub fn decode_role<'s, G, K>(
    role: usize,
    view: &CacheView<'_>,
    demands: &[usize],
    mut signal: G,
    kept: K,
) -> std::result::Result<Vec<u8>, Vec<PacketId>>
where
    G: FnMut(NodeSet) -> Option<&'s [u8]>,
    K: Fn(NodeSet, usize) -> bool,
{
    let placement = view.placement;
    let pb = placement.packet_bytes();
    let want = demands[role];
    let mut out = Vec::with_capacity(placement.subpacketization() * pb);
    let mut missing = Vec::new();
    for t_set in k_subsets(placement.universe(), placement.t()) {
        let id = PacketId { file: want, subset: t_set };
        if let Some(bytes) = view.get(id) {
            out.extend_from_slice(bytes);
            continue;
        }
        let s = t_set.with(role);
        let Some(payload) = signal(s) else {
            missing.push(id);
            out.extend(std::iter::repeat_n(0, pb));
            continue;
        };
        let mut packet = payload.to_vec();
        for p in s.iter().filter(|&p| p != role && kept(s, p)) {
            match view.get(term(s, p, demands)) {
                Some(bytes) => xor_into(&mut packet, bytes),
                None => missing.push(term(s, p, demands)),
            }
        }
        out.extend_from_slice(&packet);
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(missing)
    }
}

pub(crate) fn missing_error(grid: &Grid, missing: Vec<PacketId>) -> Error {
    let first = missing[0];
    Error::MissingPackets {
        missing: missing.len(),
        file: first.file,
        subset: grid.nodes_of(first.subset),
    }
}

/// MN decoding for a grid user playing MN role `role`, given its sub-type's
/// full signal list (colex order) and the sub-type's demands.
pub fn decode_user(
    user: &UserSpec,
    role: NodeId,
    signals: &[Signal],
    placement: &PlacementMap,
    grid: &Grid,
    demands: &[usize],
) -> Result<Vec<u8>> {
    let view = placement.view(user.access_mask(grid));
    let role = grid.index(role);
    if !view.access().contains(role) {
        return Err(Error::DecodeFailure {
            class: user.class,
            anchor: user.anchor,
            reason: "role node is not in the user's access set".into(),
        });
    }
    let lookup = |s: NodeSet| {
        signals
            .get(s.rank() as usize)
            .filter(|sig| sig.id.subset == s)
            .map(|sig| sig.payload.as_slice())
    };
    decode_role(role, &view, demands, lookup, |_, _| true).map_err(|m| missing_error(grid, m))
}

/// `R_MN = (K - t) / (t + 1)`.
pub fn mn_load(k: u64, t: u64) -> Result<BigRational> {
    if t > k {
        return Err(Error::invalid(format!("t = {t} exceeds K = {k}")));
    }
    Ok(BigRational::new(BigInt::from(k - t), BigInt::from(t + 1)))
}

/// Hex of the first 16 bytes of the SHA-256 of `bytes`.
pub fn payload_hash(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..16])
}

/// One line of a transcript dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub subtype: UserClass,
    pub subset: Vec<NodeId>,
    pub payload_hash: String,
}

pub fn signal_records(grid: &Grid, signals: &[Signal]) -> Vec<SignalRecord> {
    signals
        .iter()
        .map(|s| SignalRecord {
            subtype: s.id.subtype,
            subset: grid.nodes_of(s.id.subset),
            payload_hash: payload_hash(&s.payload),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDigest {
    pub node: NodeId,
    pub packet_count: usize,
    pub payload_hash: String,
}

/// Per-node hash over the cached packets in (file, colex) order.
pub fn placement_digest(grid: &Grid, placement: &PlacementMap) -> Vec<NodeDigest> {
    grid.nodes()
        .map(|node| {
            let idx = grid.index(node);
            let packets = placement.node_packets(idx);
            let mut h = Sha256::new();
            for p in &packets {
                h.update(placement.packet(*p));
            }
            NodeDigest {
                node,
                packet_count: packets.len(),
                payload_hash: hex::encode(&h.finalize()[..16]),
            }
        })
        .collect()
}

/// Serializes records as JSON lines.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enumerate_users, Regime};

    fn ns(items: &[usize]) -> NodeSet {
        NodeSet::from_indices(items.iter().copied())
    }

    #[test]
    fn example_one_three_users() {
        let pl = PlacementMap::generate(3, 1, 3, 8, 11).unwrap();
        for node in 0..3 {
            let cached = pl.node_packets(node);
            assert_eq!(cached.len(), 3);
            assert!(cached.iter().all(|p| p.subset == ns(&[node])));
        }
        let demands = [0, 1, 2];
        let sigs = mn_signals_raw(&pl, &demands);
        assert_eq!(sigs.len(), 3);
        let (s01, x01) = &sigs[0];
        assert_eq!(*s01, ns(&[0, 1]));
        let mut expect = pl.packet(PacketId { file: 0, subset: ns(&[1]) }).to_vec();
        xor_into(&mut expect, pl.packet(PacketId { file: 1, subset: ns(&[0]) }));
        assert_eq!(x01, &expect);
        for role in 0..3 {
            let view = pl.view(ns(&[role]));
            let got = decode_role(
                role,
                &view,
                &demands,
                |s| sigs.iter().find(|x| x.0 == s).map(|x| x.1.as_slice()),
                |_, _| true,
            )
            .unwrap();
            assert_eq!(got, pl.file(demands[role]));
        }
        assert_eq!(mn_load(3, 1).unwrap(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn zero_memory_caches_nothing() {
        let pl = PlacementMap::generate(9, 0, 4, 4, 0).unwrap();
        assert!(pl.node_packets(3).is_empty());
        assert_eq!(pl.cached_packet_count(3), 0);
        let sigs = mn_signals_raw(&pl, &[0, 1, 2, 3, 0, 1, 2, 3, 0]);
        assert_eq!(sigs.len(), 9);
        // each signal is a single whole file
        assert_eq!(sigs[4].1, pl.file(0));
    }

    #[test]
    fn worked_example_placement_and_counts() {
        let cfg = GridConfig::new(3, 3, Regime::Mid, 2).unwrap();
        let pl = place(&cfg).unwrap();
        assert_eq!(pl.subpacketization(), 36);
        assert_eq!(pl.cached_packet_count(0), 72 * 8);
        assert_eq!(pl.node_packets(0).len(), 72 * 8);
        let demands = DemandMap::worst_case(&cfg).unwrap();
        assert_eq!(mn_signals(UserClass::IV, &demands, &pl).unwrap().len(), 84);
        assert_eq!(mn_load(9, 2).unwrap(), BigRational::new(7.into(), 3.into()));
        assert_eq!(mn_load(5, 5).unwrap(), BigRational::from_integer(0.into()));
    }

    #[test]
    fn retrievable_counts_for_worked_example() {
        let cfg = GridConfig::new(3, 3, Regime::Mid, 2).unwrap().with_files(72).unwrap();
        let grid = cfg.grid();
        let pl = place(&cfg).unwrap();
        let users = enumerate_users(&cfg);
        let per_file = |class: UserClass| {
            let u = users.iter().find(|u| u.class == class).unwrap();
            retrievable_packets(u, &pl, &grid).len() / 72
        };
        assert_eq!(per_file(UserClass::I), 8);
        assert_eq!(per_file(UserClass::II1), 15);
        assert_eq!(per_file(UserClass::IV), 26);
        let u = users
            .iter()
            .find(|u| u.class == UserClass::II1 && u.anchor == NodeId::new(0, 0))
            .unwrap();
        let subsets = retrievable_subsets(u.access_mask(&grid), 9, 2);
        // every listed subset contains (0,0) or (0,1)
        assert!(subsets.iter().all(|s| s.contains(0) || s.contains(1)));
        assert_eq!(subsets.len(), 15);
    }

    #[test]
    fn every_mid_user_decodes_under_mn() {
        let cfg = GridConfig::new(3, 3, Regime::Mid, 2).unwrap().with_packet_bytes(4).unwrap();
        let grid = cfg.grid();
        let pl = place(&cfg).unwrap();
        let demands = DemandMap::random(&cfg, 3).unwrap();
        for class in Regime::Mid.classes() {
            let sigs = mn_signals(*class, &demands, &pl).unwrap();
            let d = demands.for_subtype(*class).unwrap();
            for u in enumerate_users(&cfg).iter().filter(|u| u.class == *class) {
                let got = decode_user(u, u.anchor, &sigs, &pl, &grid, d).unwrap();
                assert_eq!(got, pl.file(d[grid.index(u.anchor)]));
            }
        }
    }

    #[test]
    fn full_memory_needs_no_signals() {
        let cfg = GridConfig::new(3, 3, Regime::Min, 9).unwrap().with_packet_bytes(2).unwrap();
        let grid = cfg.grid();
        let pl = place(&cfg).unwrap();
        let demands = DemandMap::worst_case(&cfg).unwrap();
        let sigs = mn_signals(UserClass::I, &demands, &pl).unwrap();
        assert!(sigs.is_empty());
        let u = UserSpec::new(&grid, UserClass::I, NodeId::new(1, 2));
        let d = demands.for_subtype(UserClass::I).unwrap();
        assert_eq!(
            decode_user(&u, u.anchor, &sigs, &pl, &grid, d).unwrap(),
            pl.file(d[grid.index(u.anchor)])
        );
    }

    #[test]
    fn dropping_a_signal_is_detected() {
        let cfg = GridConfig::new(3, 3, Regime::Min, 1).unwrap().with_packet_bytes(2).unwrap();
        let grid = cfg.grid();
        let pl = place(&cfg).unwrap();
        let demands = DemandMap::worst_case(&cfg).unwrap();
        let mut sigs = mn_signals(UserClass::I, &demands, &pl).unwrap();
        sigs.remove(0);
        let u = UserSpec::new(&grid, UserClass::I, NodeId::new(0, 0));
        let d = demands.for_subtype(UserClass::I).unwrap();
        assert!(matches!(
            decode_user(&u, u.anchor, &sigs, &pl, &grid, d),
            Err(Error::MissingPackets { .. })
        ));
    }

    #[test]
    fn digests_are_deterministic() {
        let cfg = GridConfig::new(3, 3, Regime::Min, 1).unwrap().with_seed(9);
        let a = placement_digest(&cfg.grid(), &place(&cfg).unwrap());
        let b = placement_digest(&cfg.grid(), &place(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a[0].packet_count, 27);
    }
}
