//! Which file each user requests.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_users, GridConfig, NodeId, UserClass};

/// One request as it appears in a demand file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandEntry {
    pub class: UserClass,
    pub anchor: [usize; 2],
    pub file: usize,
}

/// Requested file per user, stored per sub-type and indexed by the anchor's
/// flattened grid index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandMap {
    k1: usize,
    k2: usize,
    n_files: usize,
    by_class: BTreeMap<UserClass, Vec<usize>>,
}

impl DemandMap {
    /// Every user requests a different file, assigned in enumeration order.
    pub fn worst_case(config: &GridConfig) -> Result<Self> {
        let users = config.user_count() as usize;
        if config.n_files < users {
            return Err(Error::invalid(format!(
                "distinct demands need N >= U = {users}, got N = {}",
                config.n_files
            )));
        }
        let mut next = 0;
        Self::build(config, |_| {
            next += 1;
            next - 1
        })
    }

    /// Demands drawn uniformly with replacement.
    pub fn random(config: &GridConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = config.n_files;
        Self::build(config, |_| rng.gen_range(0..n))
    }

    fn build(config: &GridConfig, mut pick: impl FnMut(NodeId) -> usize) -> Result<Self> {
        let grid = config.grid();
        let mut by_class = BTreeMap::new();
        for &class in config.regime().classes() {
            let files: Vec<usize> = grid.nodes().map(&mut pick).collect();
            by_class.insert(class, files);
        }
        Ok(DemandMap {
            k1: config.k1,
            k2: config.k2,
            n_files: config.n_files,
            by_class,
        })
    }

    pub fn from_entries(config: &GridConfig, entries: &[DemandEntry]) -> Result<Self> {
        let grid = config.grid();
        let classes = config.regime().classes();
        let mut slots: BTreeMap<UserClass, Vec<Option<usize>>> =
            classes.iter().map(|&c| (c, vec![None; grid.len()])).collect();
        for e in entries {
            let anchor = NodeId::new(e.anchor[0], e.anchor[1]);
            if !grid.contains(anchor) {
                return Err(Error::invalid(format!("demand anchor {anchor} outside the grid")));
            }
            if e.file >= config.n_files {
                return Err(Error::invalid(format!(
                    "demanded file {} out of range for N = {}",
                    e.file, config.n_files
                )));
            }
            let slot = slots
                .get_mut(&e.class)
                .ok_or_else(|| Error::invalid(format!("class {} is not present in regime {}", e.class, config.regime())))?;
            let cell = &mut slot[grid.index(anchor)];
            if cell.is_some() {
                return Err(Error::invalid(format!("duplicate demand for {} user at {anchor}", e.class)));
            }
            *cell = Some(e.file);
        }
        let mut by_class = BTreeMap::new();
        for (class, files) in slots {
            let files = files
                .into_iter()
                .enumerate()
                .map(|(i, f)| f.ok_or(Error::IncompleteDemand { class, anchor: grid.node(i) }))
                .collect::<Result<Vec<_>>>()?;
            by_class.insert(class, files);
        }
        Ok(DemandMap {
            k1: config.k1,
            k2: config.k2,
            n_files: config.n_files,
            by_class,
        })
    }

    pub fn from_json(config: &GridConfig, json: &str) -> Result<Self> {
        let entries: Vec<DemandEntry> =
            serde_json::from_str(json).map_err(|e| Error::invalid(format!("malformed demand file: {e}")))?;
        Self::from_entries(config, &entries)
    }

    pub fn entries(&self) -> Vec<DemandEntry> {
        self.by_class
            .iter()
            .flat_map(|(&class, files)| {
                files.iter().enumerate().map(move |(i, &file)| DemandEntry {
                    class,
                    anchor: [i / self.k2, i % self.k2],
                    file,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries()).expect("demand entries serialize")
    }

    /// Files requested by the users of `class`, indexed by anchor.
    pub fn for_subtype(&self, class: UserClass) -> Result<&[usize]> {
        self.by_class
            .get(&class)
            .map(Vec::as_slice)
            .ok_or(Error::IncompleteDemand { class, anchor: NodeId::new(0, 0) })
    }

    pub fn get(&self, class: UserClass, anchor: NodeId) -> Result<usize> {
        self.for_subtype(class)?
            .get(anchor.k1 * self.k2 + anchor.k2)
            .copied()
            .ok_or(Error::IncompleteDemand { class, anchor })
    }

    pub fn n_files(&self) -> usize {
        self.n_files
    }

    pub fn classes(&self) -> impl Iterator<Item = UserClass> + '_ {
        self.by_class.keys().copied()
    }

    /// Checks that the map covers every user of `config`.
    pub fn check_covers(&self, config: &GridConfig) -> Result<()> {
        if (self.k1, self.k2) != (config.k1, config.k2) {
            return Err(Error::invalid("demand map was built for a different grid"));
        }
        for user in enumerate_users(config) {
            let file = self.get(user.class, user.anchor)?;
            if file >= config.n_files {
                return Err(Error::invalid(format!("demanded file {file} out of range for N = {}", config.n_files)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Regime;

    #[test]
    fn worst_case_demands_are_distinct() {
        let cfg = GridConfig::new(3, 3, Regime::Mid, 2).unwrap();
        let d = DemandMap::worst_case(&cfg).unwrap();
        let mut files: Vec<usize> = d.entries().iter().map(|e| e.file).collect();
        files.sort_unstable();
        assert_eq!(files, (0..72).collect::<Vec<_>>());
        assert!(DemandMap::worst_case(&cfg.clone().with_files(71).unwrap()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = GridConfig::new(3, 3, Regime::Min, 1).unwrap();
        let d = DemandMap::random(&cfg, 5).unwrap();
        let back = DemandMap::from_json(&cfg, &d.to_json()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn missing_entry_is_reported() {
        let cfg = GridConfig::new(3, 3, Regime::Min, 1).unwrap();
        let mut entries = DemandMap::random(&cfg, 5).unwrap().entries();
        let dropped = entries.remove(4);
        let err = DemandMap::from_entries(&cfg, &entries).unwrap_err();
        assert_eq!(
            err,
            Error::IncompleteDemand {
                class: dropped.class,
                anchor: NodeId::new(dropped.anchor[0], dropped.anchor[1])
            }
        );
    }
}
