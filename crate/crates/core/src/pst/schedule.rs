use std::collections::BTreeMap;

use super::{LayerId, Pst, RegionId};
use crate::error::Result;
use crate::graph::TaskGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTiming {
    pub layer: LayerId,
    pub region: RegionId,
    pub config_start: f64,
    pub config_end: f64,
    /// Earliest execution start among the layer's modules.
    pub exec_start: f64,
    /// Latest execution end among the layer's modules.
    pub exec_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleResult {
    /// One entry per layer, in configuration order.
    pub layers: Vec<LayerTiming>,
    pub exec_start: Vec<f64>,
    pub exec_end: Vec<f64>,
    pub makespan: f64,
}

/// Timeline under a single configuration port that loads layers in `rs`
/// order. A layer cannot be loaded while the previous layer of its region
/// is still executing, and a module starts once its layer is loaded and all
/// of its predecessors have finished.
pub fn schedule(pst: &Pst, g: &TaskGraph) -> Result<ScheduleResult> {
    pst.check(g)?;
    Ok(timeline(pst, g))
}

/// The timeline recurrence without validation. The triple must already be
/// valid.
pub(crate) fn timeline(pst: &Pst, g: &TaskGraph) -> ScheduleResult {
    let n = g.len();
    let mut rank = vec![0usize; n];
    for (r, &m) in g.topo_order().iter().enumerate() {
        rank[m] = r;
    }
    let mut members: BTreeMap<LayerId, Vec<usize>> = BTreeMap::new();
    for &m in &pst.ps {
        members.entry(pst.layer[m]).or_default().push(m);
    }
    for v in members.values_mut() {
        v.sort_unstable_by_key(|&m| rank[m]);
    }

    let mut exec_start = vec![0.0; n];
    let mut exec_end = vec![f64::NAN; n];
    let mut region_free: BTreeMap<RegionId, f64> = BTreeMap::new();
    let mut port_free = 0.0f64;
    let mut layers = Vec::with_capacity(pst.rs.len());
    let mut makespan = 0.0f64;
    for &l in &pst.rs {
        let Some(mods) = members.get(&l) else { continue };
        let region = pst.region[mods[0]];
        let config_start = port_free.max(region_free.get(&region).copied().unwrap_or(0.0));
        let config_end = config_start + mods.iter().map(|&m| g.module(m).conf_time()).sum::<f64>();
        port_free = config_end;
        let (mut first, mut last) = (f64::INFINITY, 0.0f64);
        for &m in mods {
            let ready = g.preds(m).iter().map(|&p| exec_end[p]).fold(config_end, f64::max);
            debug_assert!(!ready.is_nan());
            exec_start[m] = ready;
            exec_end[m] = ready + g.module(m).exec;
            first = first.min(exec_start[m]);
            last = last.max(exec_end[m]);
        }
        region_free.insert(region, last);
        makespan = makespan.max(last);
        layers.push(LayerTiming { layer: l, region, config_start, config_end, exec_start: first, exec_end: last });
    }
    ScheduleResult { layers, exec_start, exec_end, makespan }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(mods: &[(f64, f64)], edges: &[(usize, usize)]) -> TaskGraph {
        let mut text = String::new();
        for (i, (conf, exec)) in mods.iter().enumerate() {
            text += &format!("module {} clb=1 bram=0 dsp=0 exec={exec} conf={conf}\n", i + 1);
        }
        for (a, b) in edges {
            text += &format!("edge {} {} weight=1\n", a + 1, b + 1);
        }
        TaskGraph::parse(&text).unwrap()
    }

    #[test]
    fn single_module() {
        let g = graph(&[(2.0, 40.0)], &[]);
        let s = schedule(&Pst::single_layer(vec![0]), &g).unwrap();
        assert_eq!(s.makespan, 42.0);
    }

    #[test]
    fn serialized_configuration() {
        let g = graph(&[(1.0, 10.0), (1.0, 10.0)], &[]);
        let pst = Pst { ps: vec![0, 1], qs: vec![0, 1], rs: vec![0, 1], region: vec![0, 1], layer: vec![0, 1] };
        let s = schedule(&pst, &g).unwrap();
        assert_eq!((s.layers[0].config_end, s.layers[1].config_end), (1.0, 2.0));
        assert_eq!((s.exec_start[1], s.exec_end[1]), (2.0, 12.0));
        assert_eq!(s.makespan, 12.0);
    }

    #[test]
    fn region_busy_until_previous_layer_finishes() {
        let g = graph(&[(1.0, 10.0), (1.0, 10.0)], &[(0, 1)]);
        let pst = Pst { ps: vec![0, 1], qs: vec![0, 1], rs: vec![0, 1], region: vec![0, 0], layer: vec![0, 1] };
        let s = schedule(&pst, &g).unwrap();
        assert_eq!(s.layers[1].config_start, 11.0);
        assert_eq!(s.makespan, 22.0);
    }

    #[test]
    fn same_layer_dependencies_run_in_topological_order() {
        let g = graph(&[(1.0, 5.0), (1.0, 7.0), (0.5, 3.0)], &[(2, 1), (1, 0)]);
        let s = schedule(&Pst::single_layer(vec![0, 1, 2]), &g).unwrap();
        assert_eq!(s.exec_start[2], 2.5);
        assert_eq!(s.exec_start[1], 5.5);
        assert_eq!(s.exec_start[0], 12.5);
        assert_eq!(s.makespan, 17.5);
    }

    #[test]
    fn invalid_triple_is_an_error() {
        let g = graph(&[(1.0, 10.0), (1.0, 10.0)], &[(0, 1)]);
        let pst = Pst { ps: vec![0, 1], qs: vec![0, 1], rs: vec![1, 0], region: vec![0, 0], layer: vec![0, 1] };
        assert!(schedule(&pst, &g).is_err());
    }
}
