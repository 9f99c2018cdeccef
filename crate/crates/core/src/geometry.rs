//! The cyclic `K1 x K2` cache-node grid, modular distances, and the eight
//! user families defined by which cache nodes a user can reach.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{NodeSet, MAX_UNIVERSE};
use crate::error::{Error, Result};

/// Smallest admissible radius, `sqrt(2)/2`.
pub const R_MIN: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Largest admissible radius.
pub const R_MAX: f64 = 1.0;
const RADIUS_EPS: f64 = 1e-12;

/// Cache node `C_{k1,k2}`: row `k1`, column `k2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub k1: usize,
    pub k2: usize,
}

impl NodeId {
    pub const fn new(k1: usize, k2: usize) -> Self {
        NodeId { k1, k2 }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

impl From<(usize, usize)> for NodeId {
    fn from((k1, k2): (usize, usize)) -> Self {
        NodeId { k1, k2 }
    }
}

/// Dimensions of the cyclic node grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    pub k1: usize,
    pub k2: usize,
}

impl Grid {
    pub fn new(k1: usize, k2: usize) -> Result<Self> {
        if k1 < 3 || k2 < 3 {
            return Err(Error::invalid(format!("grid must satisfy K1, K2 >= 3, got {k1}x{k2}")));
        }
        Ok(Grid { k1, k2 })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.k1 * self.k2
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major flattened index.
    #[inline]
    pub fn index(&self, node: NodeId) -> usize {
        node.k1 * self.k2 + node.k2
    }

    #[inline]
    pub fn node(&self, index: usize) -> NodeId {
        NodeId::new(index / self.k2, index % self.k2)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// `node + (d1, d2)` with cyclic wraparound.
    pub fn shift(&self, node: NodeId, d1: i64, d2: i64) -> NodeId {
        NodeId::new(
            (node.k1 as i64 + d1).rem_euclid(self.k1 as i64) as usize,
            (node.k2 as i64 + d2).rem_euclid(self.k2 as i64) as usize,
        )
    }

    pub fn mask(&self, nodes: &[NodeId]) -> NodeSet {
        NodeSet::from_indices(nodes.iter().map(|n| self.index(*n)))
    }

    pub fn nodes_of(&self, set: NodeSet) -> Vec<NodeId> {
        set.iter().map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.k1 < self.k1 && node.k2 < self.k2
    }
}

/// The three analytic radius cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `r = sqrt(2)/2`
    Min,
    /// `sqrt(2)/2 < r < 1`
    Mid,
    /// `r = 1`
    Max,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Min, Regime::Mid, Regime::Max];

    /// User sub-types present, in delivery order.
    pub fn classes(self) -> &'static [UserClass] {
        use UserClass::*;
        match self {
            Regime::Min => &[I, II1, II2],
            Regime::Mid => &[I, II1, II2, III1, III2, III3, III4, IV],
            Regime::Max => &[II1, II2, III1, III2, III3, III4, IV],
        }
    }

    /// Number of sub-types, i.e. users per cache node.
    pub fn subtype_count(self) -> u64 {
        self.classes().len() as u64
    }

    pub fn from_radius(r: f64) -> Result<Regime> {
        if !(R_MIN - RADIUS_EPS..=R_MAX + RADIUS_EPS).contains(&r) {
            return Err(Error::invalid(format!("radius {r} outside [sqrt(2)/2, 1]")));
        }
        Ok(if (r - R_MIN).abs() <= RADIUS_EPS {
            Regime::Min
        } else if (r - R_MAX).abs() <= RADIUS_EPS {
            Regime::Max
        } else {
            Regime::Mid
        })
    }

    /// A radius inside the regime, used when none is given.
    pub fn representative_radius(self) -> f64 {
        match self {
            Regime::Min => R_MIN,
            Regime::Mid => 0.85,
            Regime::Max => R_MAX,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Min => "min",
            Regime::Mid => "mid",
            Regime::Max => "max",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Regime::Min),
            "mid" => Ok(Regime::Mid),
            "max" => Ok(Regime::Max),
            other => Err(Error::invalid(format!("unknown regime {other:?} (expected min, mid or max)"))),
        }
    }
}

/// A regime plus, optionally, the concrete radius used for point geometry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusRegime {
    pub regime: Regime,
    pub radius: Option<f64>,
}

impl RadiusRegime {
    pub fn new(regime: Regime, radius: Option<f64>) -> Result<Self> {
        if let Some(r) = radius {
            let actual = Regime::from_radius(r)?;
            if actual != regime {
                return Err(Error::invalid(format!("radius {r} belongs to regime {actual}, not {regime}")));
            }
        }
        Ok(RadiusRegime { regime, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius.unwrap_or_else(|| self.regime.representative_radius())
    }
}

impl From<Regime> for RadiusRegime {
    fn from(regime: Regime) -> Self {
        RadiusRegime { regime, radius: None }
    }
}

/// Type I..IV grouping by access-set size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UserType {
    I,
    II,
    III,
    IV,
}

impl UserType {
    pub fn access_size(self) -> usize {
        match self {
            UserType::I => 1,
            UserType::II => 2,
            UserType::III => 3,
            UserType::IV => 4,
        }
    }
}

impl fmt::Display for UserType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One of the eight user sub-types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UserClass {
    I,
    II1,
    II2,
    III1,
    III2,
    III3,
    III4,
    IV,
}

impl UserClass {
    pub const ALL: [UserClass; 8] = [
        UserClass::I,
        UserClass::II1,
        UserClass::II2,
        UserClass::III1,
        UserClass::III2,
        UserClass::III3,
        UserClass::III4,
        UserClass::IV,
    ];

    pub fn user_type(self) -> UserType {
        match self {
            UserClass::I => UserType::I,
            UserClass::II1 | UserClass::II2 => UserType::II,
            UserClass::III1 | UserClass::III2 | UserClass::III3 | UserClass::III4 => UserType::III,
            UserClass::IV => UserType::IV,
        }
    }

    pub fn size(self) -> usize {
        self.user_type().access_size()
    }

    /// Access-set offsets `(d1, d2)` relative to the anchor. The anchor comes
    /// first; the rest follow the order used when counting the signals a user
    /// can rebuild from cache (see `scheme_b`).
    pub fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            UserClass::I => &[(0, 0)],
            UserClass::II1 => &[(0, 0), (0, 1)],
            UserClass::II2 => &[(0, 0), (1, 0)],
            UserClass::III1 => &[(0, 0), (0, 1), (1, 0)],
            UserClass::III2 => &[(0, 0), (1, 0), (1, 1)],
            UserClass::III3 => &[(0, 0), (0, 1), (1, 1)],
            UserClass::III4 => &[(0, 0), (0, -1), (-1, 0)],
            UserClass::IV => &[(0, 0), (0, 1), (1, 0), (1, 1)],
        }
    }

    /// Access set of the user of this class anchored at `anchor`, in
    /// [`offsets`](Self::offsets) order.
    pub fn ordered_access(self, grid: &Grid, anchor: NodeId) -> Vec<NodeId> {
        self.offsets().iter().map(|&(d1, d2)| grid.shift(anchor, d1, d2)).collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserClass::I => "I",
            UserClass::II1 => "II-1",
            UserClass::II2 => "II-2",
            UserClass::III1 => "III-1",
            UserClass::III2 => "III-2",
            UserClass::III3 => "III-3",
            UserClass::III4 => "III-4",
            UserClass::IV => "IV",
        }
    }

    /// Offsets translated so the bounding box starts at `(0, 0)`.
    pub fn normalized_shape(self) -> Vec<(i64, i64)> {
        normalize_offsets(self.offsets())
    }

    /// The class whose normalized shape equals `offsets` (after normalizing).
    pub fn from_shape(offsets: &[(i64, i64)]) -> Option<UserClass> {
        let shape = normalize_offsets(offsets);
        UserClass::ALL.into_iter().find(|c| c.normalized_shape() == shape)
    }
}

fn normalize_offsets(offsets: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let min1 = offsets.iter().map(|o| o.0).min().unwrap_or(0);
    let min2 = offsets.iter().map(|o| o.1).min().unwrap_or(0);
    let mut v: Vec<(i64, i64)> = offsets.iter().map(|&(a, b)| (a - min1, b - min2)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl fmt::Display for UserClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UserClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        UserClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown user class {s:?}")))
    }
}

impl Serialize for UserClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for UserClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A user: its sub-type, anchor node, and the (sorted) cache nodes it reaches.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserSpec {
    pub class: UserClass,
    pub anchor: NodeId,
    pub access: Vec<NodeId>,
}

impl UserSpec {
    pub fn new(grid: &Grid, class: UserClass, anchor: NodeId) -> Self {
        let mut access = class.ordered_access(grid, anchor);
        access.sort_unstable();
        UserSpec { class, anchor, access }
    }

    pub fn access_mask(&self, grid: &Grid) -> NodeSet {
        grid.mask(&self.access)
    }

    pub fn ordered_access(&self, grid: &Grid) -> Vec<NodeId> {
        self.class.ordered_access(grid, self.anchor)
    }
}

/// System parameters for one simulated or analysed configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub k1: usize,
    pub k2: usize,
    pub regime: RadiusRegime,
    /// Cache parameter `t = K1*K2*M/N`.
    pub t: usize,
    pub n_files: usize,
    pub packet_bytes: usize,
    pub seed: u64,
}

pub const DEFAULT_PACKET_BYTES: usize = 64;

impl GridConfig {
    /// Config with `N = U` files, 64-byte packets and seed 0.
    pub fn new(k1: usize, k2: usize, regime: Regime, t: usize) -> Result<Self> {
        let n_files = user_count(regime, k1, k2) as usize;
        GridConfig {
            k1,
            k2,
            regime: regime.into(),
            t,
            n_files,
            packet_bytes: DEFAULT_PACKET_BYTES,
            seed: 0,
        }
        .validated()
    }

    pub fn with_files(mut self, n_files: usize) -> Result<Self> {
        self.n_files = n_files;
        self.validated()
    }

    pub fn with_packet_bytes(mut self, packet_bytes: usize) -> Result<Self> {
        self.packet_bytes = packet_bytes;
        self.validated()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `t = K1*K2 * M / N`, which must come out integral.
    pub fn t_from_memory(k1: usize, k2: usize, memory: u64, files: u64) -> Result<usize> {
        if files == 0 || memory > files {
            return Err(Error::invalid(format!("memory ratio {memory}/{files} outside [0, 1]")));
        }
        let numer = (k1 * k2) as u64 * memory;
        if !numer.is_multiple_of(files) {
            return Err(Error::UnsupportedMemoryPoint { numer, denom: files });
        }
        Ok((numer / files) as usize)
    }

    pub fn validated(self) -> Result<Self> {
        Grid::new(self.k1, self.k2)?;
        if self.t > self.k1 * self.k2 {
            return Err(Error::invalid(format!("t = {} exceeds K1*K2 = {}", self.t, self.k1 * self.k2)));
        }
        if self.n_files == 0 {
            return Err(Error::invalid("at least one file is required"));
        }
        if self.packet_bytes == 0 {
            return Err(Error::invalid("packet_bytes must be positive"));
        }
        if let Some(r) = self.regime.radius {
            RadiusRegime::new(self.regime.regime, Some(r))?;
        }
        Ok(self)
    }

    pub fn grid(&self) -> Grid {
        Grid { k1: self.k1, k2: self.k2 }
    }

    pub fn nodes(&self) -> usize {
        self.k1 * self.k2
    }

    pub fn regime(&self) -> Regime {
        self.regime.regime
    }

    pub fn user_count(&self) -> u64 {
        user_count(self.regime(), self.k1, self.k2)
    }

    /// Simulation needs subsets to fit in a bitmask.
    pub fn check_simulable(&self) -> Result<()> {
        if self.nodes() > MAX_UNIVERSE {
            return Err(Error::invalid(format!(
                "simulation supports at most {MAX_UNIVERSE} cache nodes, got {}",
                self.nodes()
            )));
        }
        Ok(())
    }
}

/// Cyclic distance `min(|k - k'|, K - |k - k'|)` between two indices.
pub fn mod_dist_1d(k: usize, k_prime: usize, modulus: usize) -> Result<usize> {
    if modulus < 1 {
        return Err(Error::invalid("modulus must be at least 1"));
    }
    if k >= modulus || k_prime >= modulus {
        return Err(Error::invalid(format!("indices {k}, {k_prime} must lie in [0, {modulus})")));
    }
    let (lo, hi) = if k <= k_prime { (k, k_prime) } else { (k_prime, k) };
    Ok((hi - lo).min(lo + modulus - hi))
}

fn cyclic_gap(a: f64, b: f64, modulus: usize) -> f64 {
    let m = modulus as f64;
    let diff = (a - b).rem_euclid(m);
    diff.min(m - diff)
}

/// Modular Euclidean distance from a real point `(p1, p2)` to node `q`.
pub fn mod_dist_2d(p: (f64, f64), q: NodeId, k1: usize, k2: usize) -> Result<f64> {
    if k1 < 1 || k2 < 1 {
        return Err(Error::invalid("grid dimensions must be positive"));
    }
    if !p.0.is_finite() || !p.1.is_finite() {
        return Err(Error::invalid("point coordinates must be finite"));
    }
    let d1 = cyclic_gap(p.0, q.k1 as f64, k1);
    let d2 = cyclic_gap(p.1, q.k2 as f64, k2);
    Ok(d1.hypot(d2))
}

/// Result of classifying a point: the reachable nodes and, when the set has
/// one of the eight family shapes, which family and anchor it is.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessSet {
    pub nodes: Vec<NodeId>,
    pub family: Option<(UserClass, NodeId)>,
}

/// Cache nodes within modular Euclidean distance `<= r` of the user at
/// `anchor + (x, y)`.
pub fn classify_point(anchor: NodeId, x: f64, y: f64, r: f64, k1: usize, k2: usize) -> Result<AccessSet> {
    let grid = Grid::new(k1, k2)?;
    if !grid.contains(anchor) {
        return Err(Error::invalid(format!("anchor {anchor} outside the {k1}x{k2} grid")));
    }
    Regime::from_radius(r)?;
    if x.abs() >= 1.0 || y.abs() >= 1.0 {
        return Err(Error::invalid("offsets must satisfy |x|, |y| < 1"));
    }
    if x.hypot(y) > r + RADIUS_EPS {
        return Err(Error::invalid(format!("offset ({x}, {y}) is outside the anchor's radius {r}")));
    }
    let p = (anchor.k1 as f64 + x, anchor.k2 as f64 + y);
    let mut nodes = Vec::with_capacity(4);
    for d1 in -1..=1 {
        for d2 in -1..=1 {
            let q = grid.shift(anchor, d1, d2);
            if mod_dist_2d(p, q, k1, k2)? <= r {
                nodes.push(q);
            }
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    let family = identify_family(&grid, &nodes);
    Ok(AccessSet { nodes, family })
}

/// Finds the `(class, anchor)` whose access set is exactly `nodes`.
pub fn identify_family(grid: &Grid, nodes: &[NodeId]) -> Option<(UserClass, NodeId)> {
    let target = grid.mask(nodes);
    UserClass::ALL
        .into_iter()
        .filter(|c| c.size() == nodes.len())
        .find_map(|class| {
            nodes.iter().find_map(|&anchor| {
                let access = grid.mask(&class.ordered_access(grid, anchor));
                (access == target).then_some((class, anchor))
            })
        })
}

/// Number of users: `3K1K2`, `8K1K2` or `7K1K2`.
pub fn user_count(regime: Regime, k1: usize, k2: usize) -> u64 {
    regime.subtype_count() * (k1 * k2) as u64
}

/// Every user of the configuration's regime, grouped by sub-type in
/// delivery order and by anchor in row-major order.
pub fn enumerate_users(config: &GridConfig) -> Vec<UserSpec> {
    let grid = config.grid();
    config
        .regime()
        .classes()
        .iter()
        .flat_map(|&class| grid.nodes().map(move |anchor| UserSpec::new(&grid, class, anchor)))
        .collect()
}

/// A point inside the region of `class` users for radius `r`, relative to the
/// anchor. These are the witness coordinates that show each region is
/// non-empty.
pub fn witness_offset(class: UserClass, r: f64) -> (f64, f64) {
    let s = (r * r - 0.25).max(0.0).sqrt();
    match class {
        UserClass::I => ((1.0 - r) / 2.0, (1.0 - r) / 2.0),
        UserClass::II1 => (0.0, 0.5),
        UserClass::II2 => (0.5, 0.0),
        UserClass::III1 => (1.0 - s, 1.0 - s),
        UserClass::III2 => (s, 1.0 - s),
        UserClass::III3 => (1.0 - s, s),
        UserClass::III4 => (-(1.0 - s), -(1.0 - s)),
        UserClass::IV => (0.5, 0.5),
    }
}

/// Monte Carlo tally of one sampled shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeCount {
    /// Node offsets relative to the sampled cell, bounding box at `(0, 0)`.
    pub shape: Vec<(i64, i64)>,
    pub class: Option<UserClass>,
    pub count: u64,
    pub area_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub r: f64,
    pub samples: u64,
    pub shapes: Vec<ShapeCount>,
    /// Samples that reached no node at all.
    pub uncovered: u64,
}

impl CensusReport {
    pub fn classes(&self) -> Vec<UserClass> {
        self.shapes.iter().filter_map(|s| s.class).collect()
    }

    pub fn has_unknown_shape(&self) -> bool {
        self.shapes.iter().any(|s| s.class.is_none())
    }
}

/// Shape reached from a point offset `(x, y)` from its nearest node, using
/// strict `< r` comparisons.
pub fn strict_shape(x: f64, y: f64, r: f64) -> Vec<(i64, i64)> {
    let r2 = r * r;
    let mut offsets = Vec::with_capacity(4);
    for d1 in -1i64..=1 {
        for d2 in -1i64..=1 {
            let a = x - d1 as f64;
            let b = y - d2 as f64;
            if a * a + b * b < r2 {
                offsets.push((d1, d2));
            }
        }
    }
    normalize_offsets(&offsets)
}

/// Samples uniform points of one grid cell (the square of side 1 centred on a
/// node) and tallies which access-set shape each point sees.
pub fn region_census(r: f64, samples: u64, seed: u64) -> Result<CensusReport> {
    if samples < 1 {
        return Err(Error::invalid("census needs at least one sample"));
    }
    Regime::from_radius(r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally: BTreeMap<Vec<(i64, i64)>, u64> = BTreeMap::new();
    let mut uncovered = 0u64;
    for _ in 0..samples {
        let x: f64 = rng.gen_range(-0.5..0.5);
        let y: f64 = rng.gen_range(-0.5..0.5);
        let shape = strict_shape(x, y, r);
        if shape.is_empty() {
            uncovered += 1;
        } else {
            *tally.entry(shape).or_default() += 1;
        }
    }
    let shapes = tally
        .into_iter()
        .map(|(shape, count)| ShapeCount {
            class: UserClass::from_shape(&shape),
            shape,
            count,
            area_fraction: count as f64 / samples as f64,
        })
        .collect();
    Ok(CensusReport {
        r,
        samples,
        shapes,
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_dist_1d_examples() {
        assert_eq!(mod_dist_1d(0, 2, 3).unwrap(), 1);
        assert_eq!(mod_dist_1d(4, 4, 7).unwrap(), 0);
        // paths 1->6 of length 5 and 6->1 (wrapping) of length 3
        assert_eq!(mod_dist_1d(1, 6, 8).unwrap(), 3);
        assert_eq!(mod_dist_1d(6, 1, 8).unwrap(), 3);
        assert!(mod_dist_1d(0, 0, 0).is_err());
        assert!(mod_dist_1d(3, 0, 3).is_err());
    }

    #[test]
    fn mod_dist_2d_examples() {
        let e10 = mod_dist_2d((0.5, 0.0), NodeId::new(1, 0), 3, 3).unwrap();
        assert!((e10 - 0.5).abs() < 1e-15);
        assert_eq!(mod_dist_2d((2.0, 1.0), NodeId::new(2, 1), 3, 3).unwrap(), 0.0);
        let e11 = mod_dist_2d((0.5, 0.5), NodeId::new(1, 1), 3, 3).unwrap();
        assert!((e11 - 0.5f64.sqrt()).abs() < 1e-15);
        // wraparound: from (0 - 0.25, 0) to node (2, 0) on a 3-ring is 0.75
        let wrap = mod_dist_2d((-0.25, 0.0), NodeId::new(2, 0), 3, 3).unwrap();
        assert!((wrap - 0.75).abs() < 1e-15);
    }

    #[test]
    fn classify_point_witnesses() {
        let o = NodeId::new(0, 0);
        let r = 0.8;
        let a = classify_point(o, (1.0 - r) / 2.0, (1.0 - r) / 2.0, r, 3, 3).unwrap();
        assert_eq!(a.nodes, vec![o]);
        assert_eq!(a.family, Some((UserClass::I, o)));

        let a = classify_point(o, 0.0, 0.5, r, 3, 3).unwrap();
        assert_eq!(a.nodes, vec![o, NodeId::new(0, 1)]);
        assert_eq!(a.family, Some((UserClass::II1, o)));

        let a = classify_point(o, 0.5, 0.5, r, 3, 3).unwrap();
        assert_eq!(
            a.nodes,
            vec![o, NodeId::new(0, 1), NodeId::new(1, 0), NodeId::new(1, 1)]
        );
        assert_eq!(a.family, Some((UserClass::IV, o)));
    }

    #[test]
    fn classify_point_wraps_around_the_grid() {
        // anchor on the last row/column, IV region reaches row/col 0
        let a = classify_point(NodeId::new(2, 2), 0.5, 0.5, 0.8, 3, 3).unwrap();
        assert_eq!(a.family, Some((UserClass::IV, NodeId::new(2, 2))));
        assert!(a.nodes.contains(&NodeId::new(0, 0)));
    }

    #[test]
    fn classify_point_rejects_bad_input() {
        let o = NodeId::new(0, 0);
        assert!(classify_point(o, 0.9, 0.0, 0.8, 3, 3).is_err());
        assert!(classify_point(o, 0.0, 0.0, 0.5, 3, 3).is_err());
        assert!(classify_point(o, 0.0, 0.0, 0.8, 2, 3).is_err());
        assert!(classify_point(NodeId::new(3, 0), 0.0, 0.0, 0.8, 3, 3).is_err());
    }

    #[test]
    fn user_counts() {
        assert_eq!(user_count(Regime::Mid, 3, 3), 72);
        assert_eq!(user_count(Regime::Min, 3, 3), 27);
        assert_eq!(user_count(Regime::Max, 4, 5), 140);
    }

    #[test]
    fn enumerate_users_matches_listed_type_iv_sets() {
        let cfg = GridConfig::new(3, 3, Regime::Mid, 2).unwrap();
        let users = enumerate_users(&cfg);
        assert_eq!(users.len(), 72);
        let iv = users
            .iter()
            .find(|u| u.class == UserClass::IV && u.anchor == NodeId::new(2, 2))
            .unwrap();
        let mut expected = vec![
            NodeId::new(2, 2),
            NodeId::new(2, 0),
            NodeId::new(0, 2),
            NodeId::new(0, 0),
        ];
        expected.sort();
        assert_eq!(iv.access, expected);
        let cfg = GridConfig::new(3, 4, Regime::Max, 2).unwrap();
        assert_eq!(enumerate_users(&cfg).len(), 84);
    }

    #[test]
    fn shapes_round_trip_through_normalization() {
        for c in UserClass::ALL {
            assert_eq!(UserClass::from_shape(c.offsets()), Some(c));
        }
        // III-4 must not collapse onto III-1
        assert_ne!(UserClass::III4.normalized_shape(), UserClass::III1.normalized_shape());
    }

    #[test]
    fn regime_from_radius() {
        assert_eq!(Regime::from_radius(R_MIN).unwrap(), Regime::Min);
        assert_eq!(Regime::from_radius(0.9).unwrap(), Regime::Mid);
        assert_eq!(Regime::from_radius(1.0).unwrap(), Regime::Max);
        assert!(Regime::from_radius(1.01).is_err());
        assert!(RadiusRegime::new(Regime::Mid, Some(1.0)).is_err());
    }

    #[test]
    fn memory_point_must_be_integral() {
        assert_eq!(GridConfig::t_from_memory(3, 3, 16, 72).unwrap(), 2);
        assert_eq!(
            GridConfig::t_from_memory(3, 3, 1, 2),
            Err(Error::UnsupportedMemoryPoint { numer: 9, denom: 2 })
        );
    }

    #[test]
    fn census_rejects_zero_samples() {
        assert!(region_census(0.8, 0, 1).is_err());
    }

    #[test]
    fn class_names_parse() {
        for c in UserClass::ALL {
            assert_eq!(c.as_str().parse::<UserClass>().unwrap(), c);
        }
        let json = serde_json::to_string(&UserClass::III4).unwrap();
        assert_eq!(json, "\"III-4\"");
    }
}
