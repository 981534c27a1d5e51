use super::pack::{is_feasible, pack, Placement};
use super::schedule::{timeline, ScheduleResult};
use super::Pst;
use crate::chip::{ChipModel, ColumnKind, ResourceVector};
use crate::error::Result;
use crate::graph::TaskGraph;
use crate::shapes::Shape;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_comm: f64,
    pub lambda: f64,
    /// Multiplier on the relative boundary overflow added to the area term.
    pub overflow_penalty: f64,
    /// Stand-in for `have / use` when a resource kind is not used at all.
    pub hetero_sentinel: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights { alpha: 1.0, beta: 1.0, gamma_comm: 1.0, lambda: 1.0, overflow_penalty: 2.0, hetero_sentinel: 1e3 }
    }
}

impl CostWeights {
    pub fn only(alpha: f64, beta: f64, gamma_comm: f64, lambda: f64) -> Self {
        CostWeights { alpha, beta, gamma_comm, lambda, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma_comm, self.lambda, self.overflow_penalty, self.hetero_sentinel];
        if all.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(crate::Error::Config("cost weights must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Per-instance scale of each cost term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizers {
    pub area: f64,
    pub schedule: f64,
    pub comm: f64,
    pub hetero: f64,
}

impl Normalizers {
    pub fn for_instance(g: &TaskGraph, chip: &ChipModel) -> Normalizers {
        let weight: f64 = g.edges().iter().map(|e| e.weight).sum();
        let positive = |v: f64| if v > 0.0 { v } else { 1.0 };
        Normalizers {
            area: chip.area() as f64,
            schedule: positive(g.critical_path_time() + g.total_conf()),
            comm: positive(weight * (chip.width + chip.height) as f64),
            hetero: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// Normalized terms, before weighting.
    pub area: f64,
    pub schedule: f64,
    pub comm: f64,
    pub hetero: f64,
    pub makespan: f64,
    pub comm_raw: f64,
    pub hetero_raw: f64,
    pub x_max: usize,
    pub y_max: usize,
    pub feasible: bool,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub placement: Placement,
    pub schedule: ScheduleResult,
    pub cost: CostBreakdown,
}

/// Normalized bounding area plus the weighted relative boundary overflow.
pub(crate) fn area_term(x_max: usize, y_max: usize, chip: &ChipModel, penalty: f64) -> f64 {
    let (w, h) = (chip.width as f64, chip.height as f64);
    let over = (x_max as f64 - w).max(0.0) / w + (y_max as f64 - h).max(0.0) / h;
    (x_max * y_max) as f64 / chip.area() as f64 + penalty * over
}

/// Sum over edges of weight times the Manhattan distance between module centers.
pub fn comm_cost(p: &Placement, g: &TaskGraph) -> f64 {
    g.edges()
        .iter()
        .map(|e| {
            let (ax, ay) = p.coords[e.src].center();
            let (bx, by) = p.coords[e.dst].center();
            e.weight * ((ax - bx).abs() + (ay - by).abs())
        })
        .sum()
}

/// `have/use` summed over the three resource kinds, where `use` counts the
/// on-chip part of every region box.
pub fn hetero_cost(p: &Placement, chip: &ChipModel, sentinel: f64) -> f64 {
    let used = p
        .region_boxes
        .values()
        .fold(ResourceVector::ZERO, |acc, r| acc + chip.resources_in_window_clipped(r));
    let have = chip.capacity();
    [ColumnKind::Clb, ColumnKind::Bram, ColumnKind::Dsp]
        .into_iter()
        .map(|k| match (have.get(k), used.get(k)) {
            (0, _) => 0.0,
            (_, 0) => sentinel,
            (h, u) => h as f64 / u as f64,
        })
        .sum()
}

/// Packs, schedules and costs a triple after validating it.
pub fn total_cost(pst: &Pst, shapes: &[Shape], g: &TaskGraph, chip: &ChipModel, w: &CostWeights) -> Result<Evaluation> {
    pst.check(g)?;
    Ok(evaluate(pst, shapes, g, chip, w, &Normalizers::for_instance(g, chip)))
}

/// `total_cost` without validation, with precomputed normalizers.
pub fn evaluate(pst: &Pst, shapes: &[Shape], g: &TaskGraph, chip: &ChipModel, w: &CostWeights, norm: &Normalizers) -> Evaluation {
    let placement = pack(pst, shapes, chip);
    let schedule = timeline(pst, g);
    let cost = breakdown(&placement, &schedule, g, chip, w, norm);
    Evaluation { placement, schedule, cost }
}

pub(crate) fn breakdown(
    placement: &Placement,
    schedule: &ScheduleResult,
    g: &TaskGraph,
    chip: &ChipModel,
    w: &CostWeights,
    norm: &Normalizers,
) -> CostBreakdown {
    let comm_raw = comm_cost(placement, g);
    let hetero_raw = hetero_cost(placement, chip, w.hetero_sentinel);
    let area = area_term(placement.x_max, placement.y_max, chip, w.overflow_penalty) * chip.area() as f64 / norm.area;
    let sched = schedule.makespan / norm.schedule;
    let comm = comm_raw / norm.comm;
    let hetero = hetero_raw / norm.hetero;
    CostBreakdown {
        area,
        schedule: sched,
        comm,
        hetero,
        makespan: schedule.makespan,
        comm_raw,
        hetero_raw,
        x_max: placement.x_max,
        y_max: placement.y_max,
        feasible: is_feasible(placement, chip),
        total: w.alpha * area + w.beta * sched + w.gamma_comm * comm + w.lambda * hetero,
    }
}
