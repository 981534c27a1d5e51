//! Simulated-annealing exploration of partition, schedule and floorplan.
//!
//! Each move deletes one module from the triple and reinserts it elsewhere.
//! Every insertion point is scored by a rough evaluation that also picks the
//! moved module's best shape; the most promising few are then fully re-costed
//! and the cheapest becomes the proposal.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chip::ChipModel;
use crate::error::{Error, Result};
use crate::graph::TaskGraph;
use crate::pst::cost::area_term;
use crate::pst::schedule::timeline;
use crate::pst::{evaluate, ConstraintGraph, CostWeights, Evaluation, LayerId, Normalizers, Pst, RegionId, Solution};
use crate::shapes::{Shape, ShapeList};

#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    /// `None` probes 100 random moves and starts where the median uphill
    /// step is accepted with probability 0.8.
    pub initial_temperature: Option<f64>,
    pub cooling_rate: f64,
    /// `None` means ten times the module count.
    pub iterations_per_temperature: Option<usize>,
    /// `None` means `1e-4` times the initial temperature.
    pub min_temperature: Option<f64>,
    pub rough_keep_k: usize,
    /// Insertion points sampled per move when there are more than this many.
    pub max_candidates: usize,
    pub restarts: usize,
    pub seed: u64,
    pub weights: CostWeights,
    pub time_limit: Option<Duration>,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            initial_temperature: None,
            cooling_rate: 0.95,
            iterations_per_temperature: None,
            min_temperature: None,
            rough_keep_k: 5,
            max_candidates: 64,
            restarts: 1,
            seed: 1,
            weights: CostWeights::default(),
            time_limit: None,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return bad("cooling_rate must lie in (0, 1)");
        }
        if self.rough_keep_k == 0 || self.max_candidates == 0 {
            return bad("rough_keep_k and max_candidates must be at least 1");
        }
        if self.iterations_per_temperature == Some(0) {
            return bad("iterations_per_temperature must be at least 1");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.initial_temperature.is_some_and(|t| !(t > 0.0)) || self.min_temperature.is_some_and(|t| !(t > 0.0)) {
            return bad("temperatures must be positive");
        }
        self.weights.validate()
    }
}

/// Where a deleted module goes back in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Layer(LayerId),
    NewLayer(RegionId),
    NewRegion,
}

/// An insertion point. Positions index the sequences with the module removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Insertion {
    pub target: Target,
    pub ps_pos: usize,
    pub qs_pos: usize,
    /// Position of the new layer in `rs`; `None` for an existing layer.
    pub rs_pos: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub insertion: Insertion,
    pub shape: Shape,
    pub score: f64,
}

/// Removes `m` from the triple. Returns the partial triple and the insertion
/// that restores the original structure.
pub fn delete(pst: &Pst, m: usize) -> (Pst, Insertion) {
    let mut p = pst.clone();
    let ps_pos = p.ps.iter().position(|&x| x == m).expect("module present");
    let qs_pos = p.qs.iter().position(|&x| x == m).expect("module present");
    p.ps.remove(ps_pos);
    p.qs.remove(qs_pos);
    let (l, r) = (pst.layer[m], pst.region[m]);
    let layer_alive = p.ps.iter().any(|&x| p.layer[x] == l);
    let region_alive = p.ps.iter().any(|&x| p.region[x] == r);
    let target = if layer_alive {
        Target::Layer(l)
    } else if region_alive {
        Target::NewLayer(r)
    } else {
        Target::NewRegion
    };
    let rs_pos = if layer_alive {
        None
    } else {
        let at = p.rs.iter().position(|&x| x == l).expect("layer in rs");
        p.rs.remove(at);
        Some(at)
    };
    (p, Insertion { target, ps_pos, qs_pos, rs_pos })
}

fn fresh_ids(partial: &Pst) -> (LayerId, RegionId) {
    let layer = partial.rs.iter().max().map_or(0, |l| l + 1);
    let region = partial.ps.iter().map(|&x| partial.region[x]).max().map_or(0, |r| r + 1);
    (layer, region)
}

/// Reinserts `m` into a partial triple.
pub fn apply(partial: &Pst, m: usize, ins: &Insertion) -> Pst {
    let mut p = partial.clone();
    p.ps.insert(ins.ps_pos, m);
    p.qs.insert(ins.qs_pos, m);
    let (new_layer, new_region) = fresh_ids(partial);
    match ins.target {
        Target::Layer(l) => {
            let owner = partial.ps.iter().find(|&&x| partial.layer[x] == l).expect("layer has members");
            p.layer[m] = l;
            p.region[m] = partial.region[*owner];
        }
        Target::NewLayer(r) => {
            p.layer[m] = new_layer;
            p.region[m] = r;
        }
        Target::NewRegion => {
            p.layer[m] = new_layer;
            p.region[m] = new_region;
        }
    }
    if let Some(at) = ins.rs_pos {
        p.rs.insert(at, p.layer[m]);
    }
    p
}

/// One family of insertions: the cartesian product of its position choices.
struct Group {
    target: Target,
    ps: Vec<usize>,
    qs: Vec<usize>,
    rs: Vec<Option<usize>>,
}

impl Group {
    fn count(&self) -> usize {
        self.ps.len() * self.qs.len() * self.rs.len()
    }

    fn decode(&self, k: usize) -> Insertion {
        let r = k % self.rs.len();
        let k = k / self.rs.len();
        let q = k % self.qs.len();
        let p = k / self.qs.len();
        Insertion { target: self.target, ps_pos: self.ps[p], qs_pos: self.qs[q], rs_pos: self.rs[r] }
    }
}

/// Contiguous runs of `key` along `seq`, as `(key, start, end)` with `end` exclusive.
fn runs(seq: &[usize], key: impl Fn(usize) -> usize) -> Vec<(usize, usize, usize)> {
    let mut out: Vec<(usize, usize, usize)> = Vec::new();
    for (i, &m) in seq.iter().enumerate() {
        let k = key(m);
        match out.last_mut() {
            Some(last) if last.0 == k => last.2 = i + 1,
            _ => out.push((k, i, i + 1)),
        }
    }
    out
}

fn groups(partial: &Pst, m: usize, g: &TaskGraph) -> Vec<Group> {
    let rs_index: BTreeMap<LayerId, usize> = partial.rs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let lo = g.preds(m).iter().map(|&p| rs_index[&partial.layer[p]]).max();
    let hi = g.succs(m).iter().map(|&s| rs_index[&partial.layer[s]]).min();
    let layer_ok = |t: usize| lo.is_none_or(|lo| lo <= t) && hi.is_none_or(|hi| t <= hi);
    // a new layer at rs position p lands after index p-1 and before the old index p
    let new_rs: Vec<Option<usize>> = (0..=partial.rs.len())
        .filter(|&p| lo.is_none_or(|lo| p > lo) && hi.is_none_or(|hi| p <= hi))
        .map(Some)
        .collect();

    let ps_layers = runs(&partial.ps, |x| partial.layer[x]);
    let qs_layers = runs(&partial.qs, |x| partial.layer[x]);
    let ps_regions = runs(&partial.ps, |x| partial.region[x]);
    let qs_regions = runs(&partial.qs, |x| partial.region[x]);
    let span = |rs: &[(usize, usize, usize)], k: usize| rs.iter().find(|r| r.0 == k).map(|r| (r.1, r.2)).expect("run");
    // block boundaries of the layers inside one region
    let layer_bounds = |layer_runs: &[(usize, usize, usize)], (s, e): (usize, usize)| {
        let mut b: Vec<usize> = layer_runs.iter().filter(|r| r.1 >= s && r.2 <= e).map(|r| r.1).collect();
        b.push(e);
        b
    };

    let mut out = Vec::new();
    for (t, &l) in partial.rs.iter().enumerate() {
        if !layer_ok(t) {
            continue;
        }
        let (ps_s, ps_e) = span(&ps_layers, l);
        let (qs_s, qs_e) = span(&qs_layers, l);
        out.push(Group { target: Target::Layer(l), ps: (ps_s..=ps_e).collect(), qs: (qs_s..=qs_e).collect(), rs: vec![None] });
    }
    if !new_rs.is_empty() {
        for &(r, s, e) in &ps_regions {
            let q = span(&qs_regions, r);
            out.push(Group {
                target: Target::NewLayer(r),
                ps: layer_bounds(&ps_layers, (s, e)),
                qs: layer_bounds(&qs_layers, q),
                rs: new_rs.clone(),
            });
        }
        let bounds = |region_runs: &[(usize, usize, usize)]| {
            let mut b: Vec<usize> = region_runs.iter().map(|r| r.1).collect();
            b.push(partial.ps.len());
            b
        };
        out.push(Group { target: Target::NewRegion, ps: bounds(&ps_regions), qs: bounds(&qs_regions), rs: new_rs });
    }
    out
}

/// Every insertion point of `m` that keeps the triple valid.
pub fn enumerate_insertions(partial: &Pst, m: usize, g: &TaskGraph) -> Vec<Insertion> {
    groups(partial, m, g).iter().flat_map(|gr| (0..gr.count()).map(move |k| gr.decode(k))).collect()
}

/// Up to `limit` insertion points drawn uniformly without replacement, or all
/// of them when there are no more than `limit`.
pub fn sample_insertions<R: Rng>(partial: &Pst, m: usize, g: &TaskGraph, limit: usize, rng: &mut R) -> Vec<Insertion> {
    let gs = groups(partial, m, g);
    let total: usize = gs.iter().map(Group::count).sum();
    let decode = |mut k: usize| {
        for gr in &gs {
            if k < gr.count() {
                return gr.decode(k);
            }
            k -= gr.count();
        }
        unreachable!("index within total")
    };
    if total <= limit {
        return (0..total).map(decode).collect();
    }
    let mut picked = index::sample(rng, total, limit).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(decode).collect()
}

/// Longest-path data of a partial triple, reused across all insertion points
/// of one move.
pub struct RoughContext<'a> {
    partial: &'a Pst,
    module: usize,
    g: &'a TaskGraph,
    chip: &'a ChipModel,
    weights: &'a CostWeights,
    norm: &'a Normalizers,
    pp: Vec<usize>,
    pq: Vec<usize>,
    x_end: Vec<usize>,
    y_end: Vec<usize>,
    x_tail: Vec<usize>,
    y_tail: Vec<usize>,
    x_extent: usize,
    y_extent: usize,
    fresh_layer: LayerId,
    fresh_region: RegionId,
    layer_region: BTreeMap<LayerId, RegionId>,
}

/// Packed extents and estimated makespan of one insertion, for a shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughEstimate {
    pub x_max: usize,
    pub y_max: usize,
    pub makespan: f64,
}

impl<'a> RoughContext<'a> {
    pub fn new(
        partial: &'a Pst,
        module: usize,
        shapes: &[Shape],
        g: &'a TaskGraph,
        chip: &'a ChipModel,
        weights: &'a CostWeights,
        norm: &'a Normalizers,
    ) -> RoughContext<'a> {
        let n = partial.len();
        let widths: Vec<usize> = shapes.iter().map(|s| s.w).collect();
        let heights: Vec<usize> = shapes.iter().map(|s| s.h).collect();
        let cg = ConstraintGraph::new(partial);
        let (x0, y0) = cg.corners(&widths, &heights);
        let mut x_tail = widths.clone();
        for &j in cg.x_order.iter().rev() {
            for &i in &cg.x_preds[j] {
                x_tail[i] = x_tail[i].max(widths[i] + x_tail[j]);
            }
        }
        let mut y_tail = heights.clone();
        for &j in cg.y_order.iter().rev() {
            for &i in &cg.y_preds[j] {
                y_tail[i] = y_tail[i].max(heights[i] + y_tail[j]);
            }
        }
        let x_end: Vec<usize> = (0..n).map(|i| x0[i] + widths[i]).collect();
        let y_end: Vec<usize> = (0..n).map(|i| y0[i] + heights[i]).collect();
        let x_extent = partial.ps.iter().map(|&i| x_end[i]).max().unwrap_or(0);
        let y_extent = partial.ps.iter().map(|&i| y_end[i]).max().unwrap_or(0);
        let (fresh_layer, fresh_region) = fresh_ids(partial);
        RoughContext {
            partial,
            module,
            g,
            chip,
            weights,
            norm,
            pp: Pst::positions(&partial.ps, n),
            pq: Pst::positions(&partial.qs, n),
            x_end,
            y_end,
            x_tail,
            y_tail,
            x_extent,
            y_extent,
            fresh_layer,
            fresh_region,
            layer_region: partial.layer_regions(),
        }
    }

    /// Longest-path terms around the inserted module: the offset of its
    /// lower-left corner and the longest tail beyond it, per axis.
    fn around(&self, ins: &Insertion) -> (usize, usize, usize, usize) {
        let (layer, region) = match ins.target {
            Target::Layer(l) => (l, self.layer_region[&l]),
            Target::NewLayer(r) => (self.fresh_layer, r),
            Target::NewRegion => (self.fresh_layer, self.fresh_region),
        };
        let (mut x_in, mut x_out, mut y_in, mut y_out) = (0, 0, 0, 0);
        for &k in &self.partial.ps {
            if self.partial.region[k] == region && self.partial.layer[k] != layer {
                continue;
            }
            let before_ps = self.pp[k] < ins.ps_pos;
            let before_qs = self.pq[k] < ins.qs_pos;
            match (before_ps, before_qs) {
                (true, true) => x_in = x_in.max(self.x_end[k]),
                (false, false) => x_out = x_out.max(self.x_tail[k]),
                (false, true) => y_in = y_in.max(self.y_end[k]),
                (true, false) => y_out = y_out.max(self.y_tail[k]),
            }
        }
        (x_in, x_out, y_in, y_out)
    }

    /// Extents and makespan of the insertion with `shape`. Extents are exact.
    pub fn estimate(&self, ins: &Insertion, shape: Shape) -> RoughEstimate {
        let (x_in, x_out, y_in, y_out) = self.around(ins);
        let makespan = timeline(&apply(self.partial, self.module, ins), self.g).makespan;
        RoughEstimate {
            x_max: self.x_extent.max(x_in + shape.w + x_out),
            y_max: self.y_extent.max(y_in + shape.h + y_out),
            makespan,
        }
    }

    /// Picks the shape that minimizes the design's area term at this
    /// insertion point and scores the result on area and schedule.
    pub fn evaluate(&self, ins: &Insertion, list: &ShapeList) -> (Shape, f64) {
        let (x_in, x_out, y_in, y_out) = self.around(ins);
        let makespan = timeline(&apply(self.partial, self.module, ins), self.g).makespan;
        let penalty = self.weights.overflow_penalty;
        let area_of = |s: &Shape| {
            let xm = self.x_extent.max(x_in + s.w + x_out);
            let ym = self.y_extent.max(y_in + s.h + y_out);
            area_term(xm, ym, self.chip, penalty)
        };
        let mut best = list.shapes[0];
        let mut best_area = area_of(&best);
        for s in &list.shapes[1..] {
            let a = area_of(s);
            if a < best_area || (a == best_area && s.area() < best.area()) {
                best = *s;
                best_area = a;
            }
        }
        let area = best_area * self.chip.area() as f64 / self.norm.area;
        let score = self.weights.alpha * area + self.weights.beta * makespan / self.norm.schedule;
        (best, score)
    }
}

/// Fully evaluates each candidate and returns the cheapest.
pub fn accurate_evaluate(
    partial: &Pst,
    module: usize,
    candidates: &[Candidate],
    shapes: &[Shape],
    g: &TaskGraph,
    chip: &ChipModel,
    weights: &CostWeights,
    norm: &Normalizers,
) -> (Pst, Vec<Shape>, Evaluation) {
    assert!(!candidates.is_empty(), "accurate evaluation needs at least one candidate");
    let mut best: Option<(Pst, Vec<Shape>, Evaluation)> = None;
    for c in candidates {
        let pst = apply(partial, module, &c.insertion);
        let mut sh = shapes.to_vec();
        sh[module] = c.shape;
        let e = evaluate(&pst, &sh, g, chip, weights, norm);
        if best.as_ref().is_none_or(|b| e.cost.total < b.2.cost.total) {
            best = Some((pst, sh, e));
        }
    }
    best.expect("nonempty")
}

/// Greedy start: one region, modules in topological order filled into
/// layers left to right, a new layer whenever the row would overflow the
/// chip width. Every module takes its minimum-area shape.
pub fn initial_solution(g: &TaskGraph, lists: &[ShapeList], chip: &ChipModel) -> Result<(Pst, Vec<Shape>)> {
    let n = g.len();
    let shapes: Vec<Shape> = lists.iter().map(ShapeList::pick_initial).collect::<Result<_>>()?;
    if shapes.len() != n {
        return Err(Error::Config(format!("{} shape lists for {n} modules", shapes.len())));
    }
    for (m, s) in shapes.iter().enumerate() {
        if s.w > chip.width || s.h > chip.height {
            return Err(Error::InfeasibleModule(g.module(m).id));
        }
    }
    let mut layer = vec![0; n];
    let mut current = 0;
    let mut row = 0;
    for &m in g.topo_order() {
        if row > 0 && row + shapes[m].w > chip.width {
            current += 1;
            row = 0;
        }
        layer[m] = current;
        row += shapes[m].w;
    }
    let order: Vec<usize> = g.topo_order().to_vec();
    let pst = Pst { ps: order.clone(), qs: order, rs: (0..=current).collect(), region: vec![0; n], layer };
    Ok((pst, shapes))
}

pub fn accept<R: Rng>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    if delta <= 0.0 {
        return true;
    }
    if temperature <= 0.0 {
        return false;
    }
    rng.gen::<f64>() < (-delta / temperature).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub temperature: f64,
    pub current: f64,
    pub best: f64,
}

#[derive(Debug, Clone)]
pub struct AnnealResult {
    /// Cheapest boundary-feasible solution, or the least-violating one if no
    /// feasible solution was visited.
    pub best: Solution,
    pub initial: Solution,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    pub accepted: usize,
    pub elapsed: Duration,
    pub seed: u64,
}

fn overflow(e: &Evaluation, chip: &ChipModel) -> usize {
    e.cost.x_max.saturating_sub(chip.width) + e.cost.y_max.saturating_sub(chip.height)
}

struct Explorer<'a> {
    g: &'a TaskGraph,
    lists: &'a [ShapeList],
    chip: &'a ChipModel,
    cfg: &'a SaConfig,
    norm: Normalizers,
}

impl Explorer<'_> {
    /// One delete-and-reinsert proposal from `pst`.
    fn propose(&self, pst: &Pst, shapes: &[Shape], rng: &mut ChaCha8Rng) -> (Pst, Vec<Shape>, Evaluation) {
        let m = rng.gen_range(0..self.g.len());
        let (partial, original) = delete(pst, m);
        let mut points = sample_insertions(&partial, m, self.g, self.cfg.max_candidates, rng);
        if !points.contains(&original) {
            points.push(original);
        }
        let ctx = RoughContext::new(&partial, m, shapes, self.g, self.chip, &self.cfg.weights, &self.norm);
        let mut cands: Vec<Candidate> = points
            .into_iter()
            .map(|insertion| {
                let (shape, score) = ctx.evaluate(&insertion, &self.lists[m]);
                Candidate { insertion, shape, score }
            })
            .collect();
        cands.sort_by(|a, b| a.score.total_cmp(&b.score));
        cands.truncate(self.cfg.rough_keep_k);
        accurate_evaluate(&partial, m, &cands, shapes, self.g, self.chip, &self.cfg.weights, &self.norm)
    }

    fn initial_temperature(&self, pst: &Pst, shapes: &[Shape], cost: f64, rng: &mut ChaCha8Rng) -> f64 {
        if let Some(t) = self.cfg.initial_temperature {
            return t;
        }
        let mut deltas: Vec<f64> = (0..100)
            .map(|_| (self.propose(pst, shapes, rng).2.cost.total - cost).abs())
            .collect();
        deltas.sort_by(f64::total_cmp);
        let median = deltas[deltas.len() / 2];
        let scale = if median > 0.0 {
            median
        } else {
            deltas.iter().copied().find(|&d| d > 0.0).unwrap_or(1e-3)
        };
        scale / -(0.8f64).ln()
    }

    fn run(&self, seed: u64) -> Result<AnnealResult> {
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pst, shapes) = initial_solution(self.g, self.lists, self.chip)?;
        let eval = evaluate(&pst, &shapes, self.g, self.chip, &self.cfg.weights, &self.norm);
        let initial = Solution { pst: pst.clone(), shapes: shapes.clone(), eval: eval.clone() };
        let mut current = initial.clone();
        let mut best_cost = eval.cost.total;
        let mut best_feasible = eval.cost.feasible.then(|| initial.clone());
        let mut least_violating = initial.clone();
        let mut trace = Vec::new();
        let (mut iterations, mut accepted) = (0, 0);

        let n = self.g.len();
        if n > 1 {
            let t0 = self.initial_temperature(&pst, &shapes, eval.cost.total, &mut rng);
            let t_min = self.cfg.min_temperature.unwrap_or(t0 * 1e-4);
            let per_t = self.cfg.iterations_per_temperature.unwrap_or(10 * n);
            let mut t = t0;
            'outer: while t >= t_min {
                for _ in 0..per_t {
                    if self.cfg.time_limit.is_some_and(|lim| started.elapsed() >= lim) {
                        break 'outer;
                    }
                    let (p, sh, e) = self.propose(&current.pst, &current.shapes, &mut rng);
                    debug_assert!(p.validate(self.g).is_empty(), "{:?}", p.validate(self.g));
                    iterations += 1;
                    if accept(e.cost.total - current.eval.cost.total, t, &mut rng) {
                        accepted += 1;
                        current = Solution { pst: p, shapes: sh, eval: e };
                        let c = &current.eval.cost;
                        best_cost = best_cost.min(c.total);
                        if c.feasible && best_feasible.as_ref().is_none_or(|b| c.total < b.eval.cost.total) {
                            best_feasible = Some(current.clone());
                        }
                        let key = |s: &Solution| (overflow(&s.eval, self.chip), s.eval.cost.total);
                        if !c.feasible && key(&current) < key(&least_violating) {
                            least_violating = current.clone();
                        }
                    }
                    trace.push(TraceRow { iteration: iterations, temperature: t, current: current.eval.cost.total, best: best_cost });
                }
                t *= self.cfg.cooling_rate;
            }
        } else {
            trace.push(TraceRow { iteration: 0, temperature: 0.0, current: eval.cost.total, best: best_cost });
        }
        let mut best = best_feasible.unwrap_or(least_violating);
        best.pst = canonical(&best.pst);
        Ok(AnnealResult { best, initial, trace, iterations, accepted, elapsed: started.elapsed(), seed })
    }
}

/// Renumbers regions and layers by first appearance in `rs`.
pub fn canonical(p: &Pst) -> Pst {
    let regions = p.layer_regions();
    let mut layer_map = BTreeMap::new();
    let mut region_map = BTreeMap::new();
    for &l in &p.rs {
        let next = layer_map.len();
        layer_map.insert(l, next);
        let r = regions[&l];
        let next = region_map.len();
        region_map.entry(r).or_insert(next);
    }
    Pst {
        ps: p.ps.clone(),
        qs: p.qs.clone(),
        rs: p.rs.iter().map(|l| layer_map[l]).collect(),
        region: p.region.iter().map(|r| region_map.get(r).copied().unwrap_or(*r)).collect(),
        layer: p.layer.iter().map(|l| layer_map.get(l).copied().unwrap_or(*l)).collect(),
    }
}

/// Runs `cfg.restarts` independent chains (restart `r` uses `seed + (r << 32)`)
/// and returns them all, best first: feasible before infeasible, then by cost.
pub fn anneal_all(g: &TaskGraph, lists: &[ShapeList], chip: &ChipModel, cfg: &SaConfig) -> Result<Vec<AnnealResult>> {
    cfg.validate()?;
    if g.is_empty() {
        return Err(Error::Config("empty task graph".into()));
    }
    let ex = Explorer { g, lists, chip, cfg, norm: Normalizers::for_instance(g, chip) };
    let mut runs: Vec<AnnealResult> =
        (0..cfg.restarts as u64).into_par_iter().map(|r| ex.run(cfg.seed.wrapping_add(r << 32))).collect::<Result<_>>()?;
    runs.sort_by(|a, b| {
        (!a.best.feasible()).cmp(&!b.best.feasible()).then(a.best.eval.cost.total.total_cmp(&b.best.eval.cost.total))
    });
    Ok(runs)
}

pub fn anneal(g: &TaskGraph, lists: &[ShapeList], chip: &ChipModel, cfg: &SaConfig) -> Result<AnnealResult> {
    Ok(anneal_all(g, lists, chip, cfg)?.swap_remove(0))
}
