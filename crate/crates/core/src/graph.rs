//! Task modules, their data dependencies, and benchmark generation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chip::ResourceVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TaskModule {
    /// External label used in files and reports.
    pub id: usize,
    pub demand: ResourceVector,
    /// Execution time in ms.
    pub exec: f64,
    /// Configuration time in ms. `None` until resolved from the module's
    /// smallest candidate region (see `shapes::fill_default_conf`).
    pub conf: Option<f64>,
}

impl TaskModule {
    pub fn conf_time(&self) -> f64 {
        self.conf.unwrap_or(0.0)
    }
}

/// A dependency between module indices (not labels).
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskGraph {
    modules: Vec<TaskModule>,
    edges: Vec<Edge>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    topo: Vec<usize>,
    index_of: BTreeMap<usize, usize>,
}

impl TaskGraph {
    /// Validates and builds a graph. Edges refer to module indices; parallel
    /// edges are merged by summing their weights.
    pub fn new(modules: Vec<TaskModule>, edges: Vec<Edge>) -> Result<TaskGraph> {
        let n = modules.len();
        let mut index_of = BTreeMap::new();
        for (i, m) in modules.iter().enumerate() {
            if index_of.insert(m.id, i).is_some() {
                return Err(Error::Config(format!("duplicate module id {}", m.id)));
            }
            if !(m.exec > 0.0) || !m.exec.is_finite() {
                return Err(Error::Config(format!("module {}: exec must be positive", m.id)));
            }
            if let Some(c) = m.conf {
                if !(c >= 0.0) || !c.is_finite() {
                    return Err(Error::Config(format!("module {}: conf must be nonnegative", m.id)));
                }
            }
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &edges {
            if e.src >= n {
                return Err(Error::UnknownModule(e.src));
            }
            if e.dst >= n {
                return Err(Error::UnknownModule(e.dst));
            }
            if e.src == e.dst {
                return Err(Error::SelfEdge(modules[e.src].id));
            }
            if !(e.weight >= 0.0) {
                return Err(Error::Config(format!("negative edge weight {}", e.weight)));
            }
            *merged.entry((e.src, e.dst)).or_insert(0.0) += e.weight;
        }
        let edges: Vec<Edge> = merged.into_iter().map(|((src, dst), weight)| Edge { src, dst, weight }).collect();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for e in &edges {
            preds[e.dst].push(e.src);
            succs[e.src].push(e.dst);
        }

        // Kahn, smallest index first so the order is deterministic
        let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &s in &succs[v] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        if topo.len() < n {
            let cycle = find_cycle(&succs, &indeg);
            return Err(Error::Cycle(cycle.into_iter().map(|i| modules[i].id).collect()));
        }
        Ok(TaskGraph { modules, edges, preds, succs, topo, index_of })
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn modules(&self) -> &[TaskModule] {
        &self.modules
    }

    pub fn module(&self, i: usize) -> &TaskModule {
        &self.modules[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn preds(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn succs(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }

    /// A topological order of module indices.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn index_of(&self, label: usize) -> Option<usize> {
        self.index_of.get(&label).copied()
    }

    pub fn set_conf(&mut self, i: usize, conf: f64) {
        self.modules[i].conf = Some(conf);
    }

    /// Longest path weighted by execution time.
    pub fn critical_path_time(&self) -> f64 {
        let mut finish = vec![0.0f64; self.len()];
        let mut best = 0.0f64;
        for &v in &self.topo {
            let start = self.preds[v].iter().map(|&p| finish[p]).fold(0.0, f64::max);
            finish[v] = start + self.modules[v].exec;
            best = best.max(finish[v]);
        }
        best
    }

    pub fn total_conf(&self) -> f64 {
        self.modules.iter().map(TaskModule::conf_time).sum()
    }

    pub fn parse(text: &str) -> Result<TaskGraph> {
        let mut modules = Vec::new();
        let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
        let mut raw_edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let syntax = |msg: String| Error::Syntax { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let kw = tokens.next().unwrap_or_default();
            let mut positional = Vec::new();
            let mut attrs = BTreeMap::new();
            for t in tokens {
                match t.split_once('=') {
                    Some((k, v)) => {
                        if attrs.insert(k, v).is_some() {
                            return Err(syntax(format!("repeated attribute `{k}`")));
                        }
                    }
                    None => positional.push(t),
                }
            }
            let id = |s: &str| s.parse::<usize>().map_err(|_| syntax(format!("bad module id `{s}`")));
            let float = |k: &str, v: &str| v.parse::<f64>().map_err(|_| syntax(format!("bad value for `{k}`: `{v}`")));
            let int = |k: &str, v: &str| v.parse::<u64>().map_err(|_| syntax(format!("bad value for `{k}`: `{v}`")));
            match kw {
                "module" => {
                    let [label] = positional[..] else {
                        return Err(syntax("expected `module <id> ...`".into()));
                    };
                    let label = id(label)?;
                    let mut demand = ResourceVector::ZERO;
                    let mut exec = None;
                    let mut conf = None;
                    for (&k, &v) in &attrs {
                        match k {
                            "clb" => demand.clb = int(k, v)?,
                            "bram" => demand.bram = int(k, v)?,
                            "dsp" => demand.dsp = int(k, v)?,
                            "exec" => exec = Some(float(k, v)?),
                            "conf" => conf = Some(float(k, v)?),
                            _ => return Err(syntax(format!("unknown module attribute `{k}`"))),
                        }
                    }
                    let exec = exec.ok_or_else(|| syntax("module without exec=".into()))?;
                    if !(exec > 0.0) {
                        return Err(syntax("exec must be positive".into()));
                    }
                    if conf.is_some_and(|c: f64| !(c >= 0.0)) {
                        return Err(syntax("conf must be nonnegative".into()));
                    }
                    if labels.insert(label, modules.len()).is_some() {
                        return Err(syntax(format!("duplicate module {label}")));
                    }
                    modules.push(TaskModule { id: label, demand, exec, conf });
                }
                "edge" => {
                    let [src, dst] = positional[..] else {
                        return Err(syntax("expected `edge <src> <dst> weight=<n>`".into()));
                    };
                    let mut weight = None;
                    for (&k, &v) in &attrs {
                        match k {
                            "weight" => weight = Some(float(k, v)?),
                            _ => return Err(syntax(format!("unknown edge attribute `{k}`"))),
                        }
                    }
                    let weight = weight.ok_or_else(|| syntax("edge without weight=".into()))?;
                    if !(weight >= 0.0) {
                        return Err(syntax("negative edge weight".into()));
                    }
                    raw_edges.push((id(src)?, id(dst)?, weight));
                }
                other => return Err(syntax(format!("unknown directive `{other}`"))),
            }
        }
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (s, d, weight) in raw_edges {
            let lookup = |l: usize| labels.get(&l).copied().ok_or(Error::UnknownModule(l));
            let (src, dst) = (lookup(s)?, lookup(d)?);
            if src == dst {
                return Err(Error::SelfEdge(s));
            }
            edges.push(Edge { src, dst, weight });
        }
        TaskGraph::new(modules, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.modules {
            let _ = write!(
                out,
                "module {} clb={} bram={} dsp={} exec={}",
                m.id, m.demand.clb, m.demand.bram, m.demand.dsp, m.exec
            );
            if let Some(c) = m.conf {
                let _ = write!(out, " conf={c}");
            }
            out.push('\n');
        }
        for e in &self.edges {
            let _ = writeln!(out, "edge {} {} weight={}", self.modules[e.src].id, self.modules[e.dst].id, e.weight);
        }
        out
    }
}

fn find_cycle(succs: &[Vec<usize>], indeg: &[usize]) -> Vec<usize> {
    // every node left with indegree > 0 has a predecessor also left, so
    // walking successors inside that set must revisit a node
    let left: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
    let Some(start) = left.iter().position(|&b| b) else { return Vec::new() };
    let mut seen = vec![usize::MAX; succs.len()];
    let mut path = Vec::new();
    let mut v = start;
    loop {
        if seen[v] != usize::MAX {
            let mut cycle = path[seen[v]..].to_vec();
            cycle.push(v);
            return cycle;
        }
        seen[v] = path.len();
        path.push(v);
        match succs[v].iter().find(|&&s| left[s]) {
            Some(&s) => v = s,
            None => return path,
        }
    }
}

/// Parameters of a random benchmark. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub module_count: usize,
    pub exec_range: (f64, f64),
    pub edge_weight_range: (f64, f64),
    pub clb_range: (u64, u64),
    pub bram_range: (u64, u64),
    pub dsp_range: (u64, u64),
    /// Target edge count divided by module count.
    pub edge_density: f64,
    pub seed: u64,
}

impl BenchSpec {
    /// Benchmark families `t10`, `t30`, `t50`, `t100`, `t200` with
    /// implementation index 1..=3.
    pub fn preset(name: &str, seed: u64) -> Result<BenchSpec> {
        let bad = || Error::InvalidBench(format!("unknown preset `{name}`"));
        let (family, imp) = name.split_once('-').ok_or_else(bad)?;
        let imp: usize = imp.parse().map_err(|_| bad())?;
        if !(1..=3).contains(&imp) {
            return Err(bad());
        }
        // (modules, edges, exec range, edge weight range) per implementation
        let rows: [(usize, usize, (f64, f64), (f64, f64)); 3] = match family {
            "t10" => [(10, 8, (40., 55.), (20., 30.)), (10, 10, (40., 55.), (20., 30.)), (10, 12, (40., 55.), (20., 30.))],
            "t30" => [(30, 71, (40., 60.), (20., 30.)), (30, 51, (30., 350.), (60., 610.)), (30, 72, (40., 60.), (20., 30.))],
            "t50" => [(50, 78, (40., 60.), (20., 30.)), (50, 33, (40., 60.), (20., 30.)), (50, 51, (20., 180.), (50., 350.))],
            "t100" => [
                (100, 110, (20., 180.), (50., 350.)),
                (100, 134, (20., 180.), (50., 350.)),
                (100, 147, (20., 180.), (50., 350.)),
            ],
            "t200" => [
                (200, 403, (10., 390.), (30., 770.)),
                (200, 312, (10., 390.), (30., 770.)),
                (200, 327, (40., 60.), (20., 30.)),
            ],
            _ => return Err(bad()),
        };
        let resources = [
            ((2000, 3000), (0, 80), (0, 80)),
            ((2500, 3500), (20, 100), (20, 100)),
            ((3000, 4000), (40, 120), (40, 120)),
        ];
        let (n, e, exec, weight) = rows[imp - 1];
        let (clb, bram, dsp) = resources[imp - 1];
        Ok(BenchSpec {
            module_count: n,
            exec_range: exec,
            edge_weight_range: weight,
            clb_range: clb,
            bram_range: bram,
            dsp_range: dsp,
            edge_density: e as f64 / n as f64,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidBench(m.to_string()));
        if self.module_count == 0 {
            return bad("module_count must be positive");
        }
        let (elo, ehi) = self.exec_range;
        if !(elo > 0.0 && elo <= ehi && ehi.is_finite()) {
            return bad("exec range must satisfy 0 < lo <= hi");
        }
        let (wlo, whi) = self.edge_weight_range;
        if !(wlo >= 0.0 && wlo <= whi && whi.is_finite()) {
            return bad("edge weight range must satisfy 0 <= lo <= hi");
        }
        for (lo, hi) in [self.clb_range, self.bram_range, self.dsp_range] {
            if lo > hi {
                return bad("resource range must satisfy lo <= hi");
            }
        }
        if !(self.edge_density >= 0.0 && self.edge_density.is_finite()) {
            return bad("edge density must be nonnegative");
        }
        Ok(())
    }
}

/// Draws a random DAG. Modules get labels `1..=n`; edges always point forward
/// in a random topological order.
pub fn generate(spec: &BenchSpec) -> Result<TaskGraph> {
    spec.validate()?;
    let n = spec.module_count;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let round1 = |v: f64| (v * 10.0).round() / 10.0;
    let modules: Vec<TaskModule> = (0..n)
        .map(|i| {
            let clb = rng.gen_range(spec.clb_range.0..=spec.clb_range.1);
            let bram = rng.gen_range(spec.bram_range.0..=spec.bram_range.1);
            let dsp = rng.gen_range(spec.dsp_range.0..=spec.dsp_range.1);
            let (lo, hi) = spec.exec_range;
            let exec = round1(rng.gen_range(lo..=hi)).clamp(lo, hi);
            TaskModule { id: i + 1, demand: ResourceVector::new(clb, bram, dsp), exec, conf: None }
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let max_edges = n * (n - 1) / 2;
    let target = ((spec.edge_density * n as f64).round() as usize).min(max_edges);
    let mut pairs = BTreeSet::new();
    while pairs.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let (lo, hi) = spec.edge_weight_range;
            let weight = rng.gen_range(lo..=hi).round().clamp(lo, hi);
            Edge { src: order[a], dst: order[b], weight }
        })
        .collect();
    TaskGraph::new(modules, edges)
}
