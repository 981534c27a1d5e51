use std::collections::BTreeMap;

use super::{Pst, RegionId};
use crate::chip::{ChipModel, Rect};
use crate::shapes::Shape;

/// Horizontal and vertical constraint graphs of a triple, restricted to the
/// modules present in `ps`.
#[derive(Debug, Clone)]
pub struct ConstraintGraph {
    /// Topological order of the horizontal graph (`ps` order).
    pub x_order: Vec<usize>,
    /// Topological order of the vertical graph (`qs` order).
    pub y_order: Vec<usize>,
    /// `x_preds[j]`: modules that must lie entirely left of `j`.
    pub x_preds: Vec<Vec<usize>>,
    /// `y_preds[j]`: modules that must lie entirely below `j`.
    pub y_preds: Vec<Vec<usize>>,
}

impl ConstraintGraph {
    pub fn new(pst: &Pst) -> ConstraintGraph {
        let n = pst.len();
        let pp = Pst::positions(&pst.ps, n);
        let pq = Pst::positions(&pst.qs, n);
        let mut x_preds = vec![Vec::new(); n];
        let mut y_preds = vec![Vec::new(); n];
        for (a, &i) in pst.ps.iter().enumerate() {
            for &j in &pst.ps[a + 1..] {
                // i precedes j in ps
                if !pst.constrains(i, j) {
                    continue;
                }
                if pq[i] < pq[j] {
                    x_preds[j].push(i);
                } else {
                    y_preds[i].push(j);
                }
            }
        }
        debug_assert!(pst.ps.iter().all(|&m| pp[m] != usize::MAX));
        ConstraintGraph { x_order: pst.ps.clone(), y_order: pst.qs.clone(), x_preds, y_preds }
    }

    /// Zero-based lower-left corners from longest paths. Entries for modules
    /// absent from the triple are left at zero.
    pub fn corners(&self, widths: &[usize], heights: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let n = widths.len();
        let mut x = vec![0usize; n];
        let mut y = vec![0usize; n];
        for &j in &self.x_order {
            x[j] = self.x_preds[j].iter().map(|&i| x[i] + widths[i]).max().unwrap_or(0);
        }
        for &j in &self.y_order {
            y[j] = self.y_preds[j].iter().map(|&i| y[i] + heights[i]).max().unwrap_or(0);
        }
        (x, y)
    }

    /// Horizontal and vertical extents of the packing.
    pub fn extents(&self, widths: &[usize], heights: &[usize]) -> (usize, usize) {
        let (x, y) = self.corners(widths, heights);
        let xm = self.x_order.iter().map(|&m| x[m] + widths[m]).max().unwrap_or(0);
        let ym = self.y_order.iter().map(|&m| y[m] + heights[m]).max().unwrap_or(0);
        (xm, ym)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// Rectangle of every module, indexed by module.
    pub coords: Vec<Rect>,
    /// Bounding box of every region over all of its layers.
    pub region_boxes: BTreeMap<RegionId, Rect>,
    pub x_max: usize,
    pub y_max: usize,
}

impl Placement {
    pub fn empty() -> Placement {
        Placement { coords: Vec::new(), region_boxes: BTreeMap::new(), x_max: 0, y_max: 0 }
    }
}

/// Packs the triple to the lower-left corner of the chip. Coordinates are
/// 1-based; y stays quantum-aligned because every height is.
pub fn pack(pst: &Pst, shapes: &[Shape], _chip: &ChipModel) -> Placement {
    let widths: Vec<usize> = shapes.iter().map(|s| s.w).collect();
    let heights: Vec<usize> = shapes.iter().map(|s| s.h).collect();
    let cg = ConstraintGraph::new(pst);
    let (x, y) = cg.corners(&widths, &heights);
    let coords: Vec<Rect> = (0..pst.len()).map(|m| Rect::new(x[m] + 1, y[m] + 1, widths[m], heights[m])).collect();
    let mut region_boxes: BTreeMap<RegionId, Rect> = BTreeMap::new();
    let (mut x_max, mut y_max) = (0, 0);
    for &m in &pst.ps {
        let r = coords[m];
        region_boxes.entry(pst.region[m]).and_modify(|b| *b = b.union(&r)).or_insert(r);
        x_max = x_max.max(r.right());
        y_max = y_max.max(r.top());
    }
    Placement { coords, region_boxes, x_max, y_max }
}

pub fn is_feasible(p: &Placement, chip: &ChipModel) -> bool {
    p.x_max <= chip.width && p.y_max <= chip.height
}
