//! Partitioned sequence triple: a sequence pair over task modules, nested by
//! reconfigurable region and time layer, plus the order in which layers are
//! configured.
//!
//! Two modules constrain each other spatially only when they sit in different
//! regions or in the same time layer; different layers of one region share
//! the region's area over time.

pub(crate) mod cost;
mod pack;
mod random;
pub(crate) mod schedule;
mod solution;

use std::collections::{BTreeMap, BTreeSet};

pub use cost::{comm_cost, evaluate, hetero_cost, total_cost, CostBreakdown, CostWeights, Evaluation, Normalizers};
pub use pack::{is_feasible, pack, ConstraintGraph, Placement};
pub use random::random_pst;
pub use schedule::{schedule, LayerTiming, ScheduleResult};
pub use solution::{Solution, SolutionFile};

use crate::error::{Error, Result};
use crate::graph::TaskGraph;

pub type RegionId = usize;
pub type LayerId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pst {
    pub ps: Vec<usize>,
    pub qs: Vec<usize>,
    /// Layer ids in configuration order.
    pub rs: Vec<LayerId>,
    /// Region of each module, indexed by module.
    pub region: Vec<RegionId>,
    /// Time layer of each module, indexed by module. Layer ids are global.
    pub layer: Vec<LayerId>,
}

/// Spatial relation of `a` to `b` implied by the sequence pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    LeftOf,
    RightOf,
    Below,
    Above,
}

impl Pst {
    /// Everything in one region and one layer, with `order` as both sequences.
    pub fn single_layer(order: Vec<usize>) -> Pst {
        let n = order.len();
        Pst { qs: order.clone(), ps: order, rs: vec![0], region: vec![0; n], layer: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.region.len()
    }

    pub fn is_empty(&self) -> bool {
        self.region.is_empty()
    }

    /// Whether two modules constrain each other's placement.
    pub fn constrains(&self, a: usize, b: usize) -> bool {
        self.region[a] != self.region[b] || self.layer[a] == self.layer[b]
    }

    /// Index of every present module in `seq`; absent modules map to `usize::MAX`.
    pub fn positions(seq: &[usize], n: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; n];
        for (i, &m) in seq.iter().enumerate() {
            pos[m] = i;
        }
        pos
    }

    pub fn relation(&self, a: usize, b: usize) -> Relation {
        let pp = Self::positions(&self.ps, self.len());
        let pq = Self::positions(&self.qs, self.len());
        relation_from(&pp, &pq, a, b)
    }

    /// Region of every layer present in `rs`.
    pub fn layer_regions(&self) -> BTreeMap<LayerId, RegionId> {
        let mut out = BTreeMap::new();
        for &m in &self.ps {
            out.insert(self.layer[m], self.region[m]);
        }
        out
    }

    /// Modules of each layer, in `ps` order.
    pub fn layer_members(&self) -> BTreeMap<LayerId, Vec<usize>> {
        let mut out: BTreeMap<LayerId, Vec<usize>> = BTreeMap::new();
        for &m in &self.ps {
            out.entry(self.layer[m]).or_default().push(m);
        }
        out
    }

    pub fn regions(&self) -> BTreeSet<RegionId> {
        self.ps.iter().map(|&m| self.region[m]).collect()
    }

    /// Checks every structural invariant and the dependency order of `rs`.
    /// An empty result means the triple is valid.
    pub fn validate(&self, g: &TaskGraph) -> Vec<String> {
        let mut v = Vec::new();
        let n = g.len();
        if self.region.len() != n || self.layer.len() != n {
            v.push(format!("partition covers {} modules, graph has {n}", self.region.len()));
            return v;
        }
        let is_perm = |s: &[usize]| {
            let mut seen = vec![false; n];
            s.len() == n && s.iter().all(|&m| m < n && !std::mem::replace(&mut seen[m], true))
        };
        if !is_perm(&self.ps) || !is_perm(&self.qs) {
            v.push("permutation mismatch: ps and qs must each list every module exactly once".into());
            return v;
        }

        let layer_region = {
            let mut map: BTreeMap<LayerId, RegionId> = BTreeMap::new();
            for m in 0..n {
                if let Some(&r) = map.get(&self.layer[m]) {
                    if r != self.region[m] {
                        v.push(format!("layer {} spans regions {r} and {}", self.layer[m], self.region[m]));
                    }
                } else {
                    map.insert(self.layer[m], self.region[m]);
                }
            }
            map
        };
        let mut rs_seen = BTreeSet::new();
        for &l in &self.rs {
            if !rs_seen.insert(l) {
                v.push(format!("layer {l} appears twice in rs"));
            }
            if !layer_region.contains_key(&l) {
                v.push(format!("layer {l} in rs has no modules"));
            }
        }
        for l in layer_region.keys() {
            if !rs_seen.contains(l) {
                v.push(format!("layer {l} missing from rs"));
            }
        }

        for (name, seq) in [("ps", &self.ps), ("qs", &self.qs)] {
            if let Some(r) = first_noncontiguous(seq.iter().map(|&m| self.region[m])) {
                v.push(format!("region {r} is not contiguous in {name}"));
            }
            if let Some(l) = first_noncontiguous(seq.iter().map(|&m| self.layer[m])) {
                v.push(format!("layer {l} is not contiguous in {name}"));
            }
        }

        let pp = Self::positions(&self.ps, n);
        let pq = Self::positions(&self.qs, n);
        let mut direction: BTreeMap<(RegionId, RegionId), Relation> = BTreeMap::new();
        'pairs: for a in 0..n {
            for b in 0..n {
                let (ra, rb) = (self.region[a], self.region[b]);
                if ra == rb {
                    continue;
                }
                let rel = relation_from(&pp, &pq, a, b);
                match direction.get(&(ra, rb)) {
                    Some(&d) if d != rel => {
                        v.push(format!("regions {ra} and {rb} are not coherent in the sequence pair"));
                        break 'pairs;
                    }
                    Some(_) => {}
                    None => {
                        direction.insert((ra, rb), rel);
                    }
                }
            }
        }

        let rs_index: BTreeMap<LayerId, usize> = self.rs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        for e in g.edges() {
            let (lu, lv) = (self.layer[e.src], self.layer[e.dst]);
            if let (Some(iu), Some(iv)) = (rs_index.get(&lu), rs_index.get(&lv)) {
                if iu > iv {
                    v.push(format!(
                        "dependency order: module {} (layer {lu}) feeds module {} (layer {lv}) configured earlier",
                        g.module(e.src).id,
                        g.module(e.dst).id
                    ));
                }
            }
        }
        v
    }

    pub fn check(&self, g: &TaskGraph) -> Result<()> {
        let v = self.validate(g);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidPst(v))
        }
    }
}

pub(crate) fn relation_from(pp: &[usize], pq: &[usize], a: usize, b: usize) -> Relation {
    match (pp[a] < pp[b], pq[a] < pq[b]) {
        (true, true) => Relation::LeftOf,
        (false, false) => Relation::RightOf,
        (false, true) => Relation::Below,
        (true, false) => Relation::Above,
    }
}

/// First key whose occurrences are not one contiguous run.
fn first_noncontiguous<I: Iterator<Item = usize>>(keys: I) -> Option<usize> {
    let mut closed = BTreeSet::new();
    let mut current = None;
    for k in keys {
        if current != Some(k) {
            if let Some(c) = current {
                closed.insert(c);
            }
            if closed.contains(&k) {
                return Some(k);
            }
            current = Some(k);
        }
    }
    None
}
