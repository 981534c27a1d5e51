//! Shape reselection for a fixed partition, schedule and sequence pair.
//!
//! Each module picks exactly one shape from its list; positions obey the
//! pairwise left-of and below relations of the triple; the objective is the
//! slack `(Width - Xmax) + (Height - Ymax)`. The bundled solver branches on
//! shape choices and bounds each node by longest paths over the smallest
//! remaining widths and heights.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::chip::ChipModel;
use crate::error::{Error, Result};
use crate::graph::TaskGraph;
use crate::pst::{CostWeights, Pst, Solution};
use crate::shapes::{Shape, ShapeList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Module index, shape index.
    Ms(usize, usize),
    W(usize),
    H(usize),
    X(usize),
    Y(usize),
    XMax,
    YMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(f64, Var)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    /// Module labels, used for variable names.
    pub labels: Vec<usize>,
    pub shapes: Vec<Vec<Shape>>,
    /// `(i, j)`: module `j` lies right of module `i`.
    pub x_pairs: Vec<(usize, usize)>,
    /// `(i, j)`: module `j` lies above module `i`.
    pub y_pairs: Vec<(usize, usize)>,
    /// Topological orders of the two relations.
    pub x_order: Vec<usize>,
    pub y_order: Vec<usize>,
    pub width: usize,
    pub height: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl IlpModel {
    pub fn var_name(&self, v: Var) -> String {
        match v {
            Var::Ms(i, j) => format!("ms_{}_{}", self.labels[i], j + 1),
            Var::W(i) => format!("w_{}", self.labels[i]),
            Var::H(i) => format!("h_{}", self.labels[i]),
            Var::X(i) => format!("x_{}", self.labels[i]),
            Var::Y(i) => format!("y_{}", self.labels[i]),
            Var::XMax => "Xmax".into(),
            Var::YMax => "Ymax".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// Packed extents of an assignment by longest paths.
    pub fn extents(&self, choice: &[usize]) -> (usize, usize) {
        let w: Vec<usize> = (0..self.len()).map(|i| self.shapes[i][choice[i]].w).collect();
        let h: Vec<usize> = (0..self.len()).map(|i| self.shapes[i][choice[i]].h).collect();
        let lp = LongestPaths::new(self);
        (lp.extent(&lp.x_preds, &self.x_order, &w), lp.extent(&lp.y_preds, &self.y_order, &h))
    }

    pub fn objective(&self, x_max: usize, y_max: usize) -> f64 {
        (self.width + self.height) as f64 - x_max as f64 - y_max as f64
    }
}

/// One shape index per module: the nonzero column of every row of the
/// selection matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeSelection {
    pub choice: Vec<usize>,
}

impl ShapeSelection {
    pub fn matrix(&self, model: &IlpModel) -> Vec<Vec<u8>> {
        self.choice
            .iter()
            .enumerate()
            .map(|(i, &c)| (0..model.shapes[i].len()).map(|j| u8::from(j == c)).collect())
            .collect()
    }

    pub fn shapes(&self, model: &IlpModel) -> Vec<Shape> {
        self.choice.iter().enumerate().map(|(i, &c)| model.shapes[i][c]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub assignment: Option<ShapeSelection>,
    pub objective: Option<f64>,
    pub nodes: u64,
    pub elapsed: Duration,
}

impl SolveResult {
    /// `optimal objective=... | infeasible | timeout`
    pub fn status_line(&self) -> String {
        match (self.status, self.objective) {
            (SolveStatus::Optimal, Some(o)) => format!("optimal objective={o}"),
            (SolveStatus::Infeasible, _) => "infeasible".into(),
            (SolveStatus::Timeout, Some(o)) => format!("timeout incumbent={o}"),
            _ => "timeout".into(),
        }
    }
}

pub fn build_model(pst: &Pst, lists: &[ShapeList], g: &TaskGraph, chip: &ChipModel) -> Result<IlpModel> {
    pst.check(g)?;
    let n = pst.len();
    if lists.len() != n {
        return Err(Error::Config(format!("{} shape lists for {n} modules", lists.len())));
    }
    if let Some(l) = lists.iter().find(|l| l.shapes.is_empty()) {
        return Err(Error::EmptyShapeList(g.module(l.module).id));
    }
    let pp = Pst::positions(&pst.ps, n);
    let pq = Pst::positions(&pst.qs, n);
    let mut x_pairs = Vec::new();
    let mut y_pairs = Vec::new();
    for (a, &i) in pst.ps.iter().enumerate() {
        for &j in &pst.ps[a + 1..] {
            if !pst.constrains(i, j) {
                continue;
            }
            if pq[i] < pq[j] {
                x_pairs.push((i, j));
            } else {
                y_pairs.push((j, i));
            }
        }
    }
    debug_assert!(pst.ps.iter().all(|&m| pp[m] < n));

    let mut cons = Vec::new();
    let c = |name: String, terms: Vec<(f64, Var)>, sense, rhs| LinearConstraint { name, terms, sense, rhs };
    let labels: Vec<usize> = (0..n).map(|i| g.module(i).id).collect();
    let shapes: Vec<Vec<Shape>> = lists.iter().map(|l| l.shapes.clone()).collect();
    for i in 0..n {
        let k = shapes[i].len();
        let l = labels[i];
        cons.push(c(format!("one_{l}"), (0..k).map(|j| (1.0, Var::Ms(i, j))).collect(), Sense::Eq, 1.0));
        let mut wt = vec![(1.0, Var::W(i))];
        wt.extend((0..k).map(|j| (-(shapes[i][j].w as f64), Var::Ms(i, j))));
        cons.push(c(format!("wdef_{l}"), wt, Sense::Eq, 0.0));
        let mut ht = vec![(1.0, Var::H(i))];
        ht.extend((0..k).map(|j| (-(shapes[i][j].h as f64), Var::Ms(i, j))));
        cons.push(c(format!("hdef_{l}"), ht, Sense::Eq, 0.0));
    }
    for &(i, j) in &x_pairs {
        let name = format!("left_{}_{}", labels[i], labels[j]);
        cons.push(c(name, vec![(1.0, Var::X(j)), (-1.0, Var::X(i)), (-1.0, Var::W(i))], Sense::Ge, 0.0));
    }
    for &(i, j) in &y_pairs {
        let name = format!("below_{}_{}", labels[i], labels[j]);
        cons.push(c(name, vec![(1.0, Var::Y(j)), (-1.0, Var::Y(i)), (-1.0, Var::H(i))], Sense::Ge, 0.0));
    }
    for i in 0..n {
        let l = labels[i];
        cons.push(c(format!("xext_{l}"), vec![(1.0, Var::XMax), (-1.0, Var::X(i)), (-1.0, Var::W(i))], Sense::Ge, 0.0));
        cons.push(c(format!("yext_{l}"), vec![(1.0, Var::YMax), (-1.0, Var::Y(i)), (-1.0, Var::H(i))], Sense::Ge, 0.0));
    }
    cons.push(c("xbound".into(), vec![(1.0, Var::XMax)], Sense::Le, chip.width as f64));
    cons.push(c("ybound".into(), vec![(1.0, Var::YMax)], Sense::Le, chip.height as f64));

    Ok(IlpModel {
        labels,
        shapes,
        x_pairs,
        y_pairs,
        x_order: pst.ps.clone(),
        y_order: pst.qs.clone(),
        width: chip.width,
        height: chip.height,
        constraints: cons,
    })
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// CPLEX-LP text of the model.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ shape reselection\nMaximize\n");
    let _ = writeln!(out, " obj: - Xmax - Ymax + {}", model.width + model.height);
    out.push_str("Subject To\n");
    for c in &model.constraints {
        let mut line = format!(" {}:", c.name);
        for (k, &(coef, v)) in c.terms.iter().enumerate() {
            let sign = if coef < 0.0 { "-" } else if k == 0 { "" } else { "+" };
            let mag = coef.abs();
            let coef = if mag == 1.0 { String::new() } else { format!("{} ", fmt_num(mag)) };
            let _ = write!(line, " {sign}{}{coef}{}", if sign.is_empty() { "" } else { " " }, model.var_name(v));
        }
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, "{line} {op} {}", fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for i in 0..model.len() {
        for v in [Var::W(i), Var::H(i), Var::X(i), Var::Y(i)] {
            let _ = writeln!(out, " {} >= 0", model.var_name(v));
        }
    }
    out.push_str(" Xmax >= 0\n Ymax >= 0\n");
    if model.shapes.iter().any(|s| !s.is_empty()) {
        out.push_str("Binary\n");
        for i in 0..model.len() {
            for j in 0..model.shapes[i].len() {
                let _ = writeln!(out, " {}", model.var_name(Var::Ms(i, j)));
            }
        }
    }
    out.push_str("End\n");
    out
}

struct LongestPaths {
    x_preds: Vec<Vec<usize>>,
    y_preds: Vec<Vec<usize>>,
}

impl LongestPaths {
    fn new(model: &IlpModel) -> LongestPaths {
        let mut x_preds = vec![Vec::new(); model.len()];
        let mut y_preds = vec![Vec::new(); model.len()];
        for &(i, j) in &model.x_pairs {
            x_preds[j].push(i);
        }
        for &(i, j) in &model.y_pairs {
            y_preds[j].push(i);
        }
        LongestPaths { x_preds, y_preds }
    }

    fn starts(preds: &[Vec<usize>], order: &[usize], size: &[usize]) -> Vec<usize> {
        let mut s = vec![0; size.len()];
        for &j in order {
            s[j] = preds[j].iter().map(|&i| s[i] + size[i]).max().unwrap_or(0);
        }
        s
    }

    fn extent(&self, preds: &[Vec<usize>], order: &[usize], size: &[usize]) -> usize {
        let s = Self::starts(preds, order, size);
        order.iter().map(|&m| s[m] + size[m]).max().unwrap_or(0)
    }

    /// Modules on one longest path, sink first.
    fn critical(preds: &[Vec<usize>], order: &[usize], size: &[usize]) -> Vec<usize> {
        let s = Self::starts(preds, order, size);
        let Some(mut cur) = order.iter().copied().max_by_key(|&m| (s[m] + size[m], std::cmp::Reverse(m))) else {
            return Vec::new();
        };
        let mut path = vec![cur];
        while let Some(&p) = preds[cur].iter().find(|&&i| s[i] + size[i] == s[cur]) {
            path.push(p);
            cur = p;
        }
        path
    }
}

/// Lexicographic search key: smaller extent sum first, then smaller total shape area.
type Key = (usize, usize);

struct Search<'a> {
    model: &'a IlpModel,
    lp: LongestPaths,
    min_w: Vec<usize>,
    min_h: Vec<usize>,
    min_area: Vec<usize>,
    order: Vec<usize>,
    w: Vec<usize>,
    h: Vec<usize>,
    choice: Vec<usize>,
    best: Option<(Key, Vec<usize>)>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Search<'_> {
    fn bound(&self) -> (usize, usize) {
        let m = self.model;
        (self.lp.extent(&self.lp.x_preds, &m.x_order, &self.w), self.lp.extent(&self.lp.y_preds, &m.y_order, &self.h))
    }

    fn dfs(&mut self, depth: usize, area: usize) {
        self.nodes += 1;
        if self.nodes % 512 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let (xb, yb) = self.bound();
        if xb > self.model.width || yb > self.model.height {
            return;
        }
        let rest: usize = self.order[depth..].iter().map(|&i| self.min_area[i]).sum();
        let key = (xb + yb, area + rest);
        if self.best.as_ref().is_some_and(|b| key >= b.0) {
            return;
        }
        if depth == self.order.len() {
            self.best = Some((key, self.choice.clone()));
            return;
        }
        let i = self.order[depth];
        let shapes = &self.model.shapes[i];
        let mut idx: Vec<usize> = (0..shapes.len()).collect();
        let x_binds = xb as f64 / self.model.width as f64 >= yb as f64 / self.model.height as f64;
        if x_binds {
            idx.sort_by_key(|&j| (shapes[j].w, shapes[j].h));
        } else {
            idx.sort_by_key(|&j| (shapes[j].h, shapes[j].w));
        }
        for j in idx {
            let s = shapes[j];
            self.w[i] = s.w;
            self.h[i] = s.h;
            self.choice[i] = j;
            self.dfs(depth + 1, area + s.area());
            if self.timed_out {
                break;
            }
        }
        self.w[i] = self.min_w[i];
        self.h[i] = self.min_h[i];
    }
}

/// Exact branch and bound over the shape choices.
pub fn solve(model: &IlpModel, time_limit: Option<Duration>) -> SolveResult {
    let started = Instant::now();
    let n = model.len();
    let lp = LongestPaths::new(model);
    let min_w: Vec<usize> = model.shapes.iter().map(|s| s.iter().map(|x| x.w).min().unwrap_or(0)).collect();
    let min_h: Vec<usize> = model.shapes.iter().map(|s| s.iter().map(|x| x.h).min().unwrap_or(0)).collect();
    let min_area: Vec<usize> = model.shapes.iter().map(|s| s.iter().map(Shape::area).min().unwrap_or(0)).collect();

    // critical modules of the binding dimension first, then the other one
    let xc = LongestPaths::critical(&lp.x_preds, &model.x_order, &min_w);
    let yc = LongestPaths::critical(&lp.y_preds, &model.y_order, &min_h);
    let x_ext: usize = xc.iter().map(|&m| min_w[m]).sum();
    let y_ext: usize = yc.iter().map(|&m| min_h[m]).sum();
    let (first, second) =
        if x_ext as f64 / model.width as f64 >= y_ext as f64 / model.height as f64 { (xc, yc) } else { (yc, xc) };
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for m in first.into_iter().rev().chain(second.into_iter().rev()).chain(0..n) {
        if !std::mem::replace(&mut seen[m], true) {
            order.push(m);
        }
    }
    // single-shape modules carry no decision
    order.sort_by_key(|&m| model.shapes[m].len() > 1);

    let mut s = Search {
        model,
        lp,
        w: min_w.clone(),
        h: min_h.clone(),
        min_w,
        min_h,
        min_area,
        order,
        choice: vec![0; n],
        best: None,
        nodes: 0,
        deadline: time_limit.map(|t| started + t),
        timed_out: false,
    };
    s.dfs(0, 0);
    let (nodes, timed_out) = (s.nodes, s.timed_out);
    let status = match (&s.best, timed_out) {
        (_, true) => SolveStatus::Timeout,
        (Some(_), false) => SolveStatus::Optimal,
        (None, false) => SolveStatus::Infeasible,
    };
    let (assignment, objective) = match s.best {
        Some(((sum, _), choice)) => {
            (Some(ShapeSelection { choice }), Some((model.width + model.height) as f64 - sum as f64))
        }
        None => (None, None),
    };
    SolveResult { status, assignment, objective, nodes, elapsed: started.elapsed() }
}

/// Re-packs and re-costs the triple with the selected shapes. The triple
/// itself is not touched.
pub fn apply(
    pst: &Pst,
    model: &IlpModel,
    sel: &ShapeSelection,
    g: &TaskGraph,
    chip: &ChipModel,
    w: &CostWeights,
) -> Result<Solution> {
    let sol = Solution::evaluate(pst.clone(), sel.shapes(model), g, chip, w)?;
    if !sol.feasible() {
        return Err(Error::Solver(format!(
            "selected shapes pack to {}x{} on a {}x{} chip",
            sol.eval.cost.x_max, sol.eval.cost.y_max, chip.width, chip.height
        )));
    }
    Ok(sol)
}

#[derive(Debug, Clone)]
pub struct PostOpt {
    pub result: SolveResult,
    /// The repaired solution, or the input when no feasible assignment was found.
    pub solution: Solution,
}

/// Builds, solves and applies the shape reselection for a solution.
pub fn postopt(
    sol: &Solution,
    lists: &[ShapeList],
    g: &TaskGraph,
    chip: &ChipModel,
    w: &CostWeights,
    time_limit: Option<Duration>,
) -> Result<PostOpt> {
    let model = build_model(&sol.pst, lists, g, chip)?;
    let result = solve(&model, time_limit);
    let solution = match &result.assignment {
        Some(a) => apply(&sol.pst, &model, a, g, chip, w)?,
        None => sol.clone(),
    };
    Ok(PostOpt { result, solution })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize) -> TaskGraph {
        let text: String = (1..=n).map(|i| format!("module {i} clb=1 bram=0 dsp=0 exec=5 conf=1\n")).collect();
        TaskGraph::parse(&text).unwrap()
    }

    fn lists(shapes: Vec<Vec<Shape>>) -> Vec<ShapeList> {
        shapes.into_iter().enumerate().map(|(module, shapes)| ShapeList { module, shapes, fallback: false }).collect()
    }

    #[test]
    fn one_module_counts_and_optimum() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = graph(1);
        let l = lists(vec![vec![Shape::new(8, 5), Shape::new(5, 10)]]);
        let m = build_model(&Pst::single_layer(vec![0]), &l, &g, &chip).unwrap();
        let count = |p: &str| m.constraints.iter().filter(|c| c.name.starts_with(p)).count();
        assert_eq!((count("one_"), count("wdef_") + count("hdef_")), (1, 2));
        assert_eq!((count("xext_") + count("yext_"), count("xbound") + count("ybound")), (2, 2));
        assert_eq!(m.constraints.len(), 7);
        let r = solve(&m, None);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.assignment.unwrap().choice, vec![0]);
        assert_eq!(r.objective, Some(483.0));
        let lp = export_lp(&m);
        assert_eq!(lp.matches("Binary").count(), 1);
        assert!(lp.contains("Binary\n ms_1_1\n ms_1_2\nEnd\n"));
        assert!(lp.contains(" obj: - Xmax - Ymax + 496\n"));
        assert!(lp.contains(" wdef_1: w_1 - 8 ms_1_1 - 5 ms_1_2 = 0\n"), "{lp}");
        assert_eq!(lp, export_lp(&m));
    }

    #[test]
    fn empty_model_exports_objective_only() {
        let g = TaskGraph::new(vec![], vec![]).unwrap();
        let chip = ChipModel::builtin_xc7vx485t();
        let m = build_model(&Pst { ps: vec![], qs: vec![], rs: vec![], region: vec![], layer: vec![] }, &[], &g, &chip).unwrap();
        let lp = export_lp(&m);
        assert!(lp.starts_with("\\ shape reselection\nMaximize\n obj: - Xmax - Ymax + 496\nSubject To\n"));
        assert!(lp.ends_with("End\n") && !lp.contains("Binary"));
        assert_eq!(solve(&m, None).objective, Some(496.0));
    }

    #[test]
    fn filter_drops_time_shared_pairs() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = graph(2);
        let l = lists(vec![vec![Shape::new(4, 5)], vec![Shape::new(6, 5)]]);
        let shared = Pst { ps: vec![0, 1], qs: vec![0, 1], rs: vec![0, 1], region: vec![0, 0], layer: vec![0, 1] };
        let m = build_model(&shared, &l, &g, &chip).unwrap();
        assert!(m.x_pairs.is_empty() && m.y_pairs.is_empty());
        let same = Pst::single_layer(vec![0, 1]);
        let m = build_model(&same, &l, &g, &chip).unwrap();
        assert_eq!(m.x_pairs, vec![(0, 1)]);
        let c = m.constraints.iter().find(|c| c.name == "left_1_2").unwrap();
        assert_eq!(c.terms, vec![(1.0, Var::X(1)), (-1.0, Var::X(0)), (-1.0, Var::W(0))]);
        assert!(export_lp(&m).contains(" left_1_2: x_2 - x_1 - w_1 >= 0\n"));
    }

    #[test]
    fn too_wide_is_infeasible() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = graph(1);
        let l = lists(vec![vec![Shape::new(147, 5), Shape::new(200, 5)]]);
        let m = build_model(&Pst::single_layer(vec![0]), &l, &g, &chip).unwrap();
        let r = solve(&m, None);
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.assignment.is_none());
        assert_eq!(r.status_line(), "infeasible");
    }

    #[test]
    fn empty_list_is_rejected() {
        let chip = ChipModel::builtin_xc7vx485t();
        let l = lists(vec![vec![]]);
        assert!(matches!(build_model(&Pst::single_layer(vec![0]), &l, &graph(1), &chip), Err(Error::EmptyShapeList(1))));
    }

    #[test]
    fn reselection_repairs_a_too_wide_row() {
        // three modules side by side overflow 12 columns; the middle one can
        // turn tall and narrow
        let chip = ChipModel::new(12, 20, vec![], vec![], 20, 5).unwrap();
        let g = graph(3);
        let l = lists(vec![
            vec![Shape::new(4, 5)],
            vec![Shape::new(6, 5), Shape::new(3, 10), Shape::new(2, 15)],
            vec![Shape::new(4, 5)],
        ]);
        let pst = Pst::single_layer(vec![0, 1, 2]);
        let w = CostWeights::default();
        let before = Solution::evaluate(pst.clone(), vec![l[0].shapes[0], l[1].shapes[0], l[2].shapes[0]], &g, &chip, &w).unwrap();
        assert!(!before.feasible());
        let out = postopt(&before, &l, &g, &chip, &w, None).unwrap();
        assert_eq!(out.result.status, SolveStatus::Optimal);
        assert!(out.solution.feasible());
        assert_eq!(out.solution.shapes[1], Shape::new(3, 10));
        assert_eq!(out.result.objective, Some((12 + 20 - 11 - 10) as f64));
        assert_eq!(out.solution.pst, pst);
        assert_eq!(out.solution.eval.schedule, before.eval.schedule);
    }

    #[test]
    fn apply_current_shapes_is_identity() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = graph(2);
        let l = lists(vec![vec![Shape::new(4, 5), Shape::new(2, 10)], vec![Shape::new(6, 5)]]);
        let pst = Pst::single_layer(vec![0, 1]);
        let w = CostWeights::default();
        let sol = Solution::evaluate(pst.clone(), vec![Shape::new(2, 10), Shape::new(6, 5)], &g, &chip, &w).unwrap();
        let m = build_model(&pst, &l, &g, &chip).unwrap();
        let again = apply(&pst, &m, &ShapeSelection { choice: vec![1, 0] }, &g, &chip, &w).unwrap();
        assert_eq!(again.eval.placement, sol.eval.placement);
    }

    #[test]
    fn ties_prefer_smaller_area() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = graph(2);
        // module 2 is time-shared away; its two shapes give the same extents
        // as long as they stay inside module 1
        let l = lists(vec![vec![Shape::new(10, 10)], vec![Shape::new(10, 5), Shape::new(5, 5)]]);
        let pst = Pst { ps: vec![0, 1], qs: vec![0, 1], rs: vec![0, 1], region: vec![0, 0], layer: vec![0, 1] };
        let m = build_model(&pst, &l, &g, &chip).unwrap();
        let r = solve(&m, None);
        assert_eq!(r.assignment.unwrap().choice, vec![0, 1]);
    }

    #[test]
    fn timeout_reports_incumbent_status() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = graph(1);
        let l = lists(vec![vec![Shape::new(8, 5)]]);
        let m = build_model(&Pst::single_layer(vec![0]), &l, &g, &chip).unwrap();
        let r = solve(&m, Some(Duration::ZERO));
        assert!(matches!(r.status, SolveStatus::Optimal | SolveStatus::Timeout));
    }
}
