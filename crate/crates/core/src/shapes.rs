//! Candidate rectangle generation for task modules.
//!
//! A candidate must satisfy the module's demand wherever it is placed
//! horizontally, since the explorer is free to move it along the x axis.
//! For every width the smallest such height is found; same-height entries
//! keep only the narrowest, ill-proportioned shapes are dropped, and the
//! `n` smallest by area survive.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chip::{ChipModel, ColumnKind, ResourceVector};
use crate::error::{Error, Result};
use crate::graph::{TaskGraph, TaskModule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub w: usize,
    pub h: usize,
}

impl Shape {
    pub fn new(w: usize, h: usize) -> Self {
        Shape { w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    /// Long side over short side, with rows rescaled so that the full chip
    /// counts as square.
    pub fn aspect_ratio(&self, chip: &ChipModel) -> f64 {
        let w = self.w as f64;
        let h = self.h as f64 * chip.width as f64 / chip.height as f64;
        w.max(h) / w.min(h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeList {
    /// Module index in its graph.
    pub module: usize,
    pub shapes: Vec<Shape>,
    /// Set when no shape met the aspect bound and the minimum-area shape was
    /// kept anyway.
    pub fallback: bool,
}

impl ShapeList {
    /// The minimum-area candidate.
    pub fn pick_initial(&self) -> Result<Shape> {
        self.shapes.first().copied().ok_or(Error::EmptyShapeList(self.module))
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeGenConfig {
    pub n: usize,
    pub gamma_ar: f64,
    pub keep_fallback: bool,
}

impl Default for ShapeGenConfig {
    fn default() -> Self {
        ShapeGenConfig { n: 10, gamma_ar: 1.5, keep_fallback: true }
    }
}

impl ShapeGenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("shape list length n must be at least 1".into()));
        }
        if !(self.gamma_ar >= 1.0) {
            return Err(Error::Config("aspect bound gamma_ar must be at least 1".into()));
        }
        Ok(())
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Narrowest width whose full-height columns could hold the demand if every
/// column were of the right kind.
pub fn initial_width(module: &TaskModule, chip: &ChipModel) -> Result<usize> {
    if !chip.capacity().covers(&module.demand) {
        return Err(Error::InfeasibleModule(module.id));
    }
    let w = [ColumnKind::Clb, ColumnKind::Bram, ColumnKind::Dsp]
        .into_iter()
        .map(|k| ceil_div(module.demand.get(k), chip.column_capacity(k)))
        .max()
        .unwrap_or(0);
    Ok((w as usize).max(1))
}

/// Smallest quantum-aligned height at which a `w`-wide window meets the
/// demand at every horizontal position, or `None` if the full chip height
/// does not suffice.
pub fn min_height_for_width(demand: &ResourceVector, chip: &ChipModel, w: usize) -> Option<usize> {
    if w == 0 || w > chip.width {
        return None;
    }
    let q = chip.quantum;
    let [clb_cols, bram_cols, dsp_cols] = chip.min_columns(w);
    let per_quantum = [
        (demand.clb, (clb_cols * q) as u64),
        (demand.bram, bram_cols as u64 * chip.macro_tiles(q)),
        (demand.dsp, dsp_cols as u64 * chip.macro_tiles(q)),
    ];
    let mut quanta = 1u64;
    for (need, per) in per_quantum {
        if need == 0 {
            continue;
        }
        if per == 0 {
            return None;
        }
        quanta = quanta.max(ceil_div(need, per));
    }
    let h = quanta as usize * q;
    (h <= chip.height).then_some(h)
}

/// Candidate list for one module. `index` is the module's index in its graph.
pub fn generate(index: usize, module: &TaskModule, chip: &ChipModel, cfg: &ShapeGenConfig) -> Result<ShapeList> {
    cfg.validate()?;
    let start = initial_width(module, chip)?;
    if module.demand == ResourceVector::ZERO {
        return Ok(ShapeList { module: index, shapes: vec![Shape::new(1, chip.quantum)], fallback: true });
    }
    let raw: Vec<Shape> = (start..=chip.width)
        .filter_map(|w| min_height_for_width(&module.demand, chip, w).map(|h| Shape::new(w, h)))
        .collect();
    if raw.is_empty() {
        return Err(Error::InfeasibleModule(module.id));
    }
    Ok(select(index, raw, chip, cfg))
}

/// Aspect filtering, same-height pruning, area ordering and truncation.
/// `raw` holds one minimum-height shape per width, in ascending width.
fn select(index: usize, raw: Vec<Shape>, chip: &ChipModel, cfg: &ShapeGenConfig) -> ShapeList {
    let by_area = |a: &Shape, b: &Shape| a.area().cmp(&b.area()).then(a.w.cmp(&b.w));
    let mut kept: Vec<Shape> = Vec::new();
    for s in raw.iter().filter(|s| s.aspect_ratio(chip) <= cfg.gamma_ar + 1e-9) {
        // ascending width, so the first shape of each height is the narrowest
        if !kept.iter().any(|k| k.h == s.h) {
            kept.push(*s);
        }
    }
    let mut fallback = false;
    if kept.is_empty() && cfg.keep_fallback {
        kept.push(*raw.iter().min_by(|a, b| by_area(a, b)).expect("nonempty"));
        fallback = true;
    }
    kept.sort_by(by_area);
    kept.truncate(cfg.n);
    ShapeList { module: index, shapes: kept, fallback }
}

pub fn generate_all(g: &TaskGraph, chip: &ChipModel, cfg: &ShapeGenConfig) -> Result<Vec<ShapeList>> {
    g.modules().par_iter().enumerate().map(|(i, m)| generate(i, m, chip, cfg)).collect()
}

/// Sets `conf = rate * area(minimum-area shape)` on every module without an
/// explicit configuration time.
pub fn fill_default_conf(g: &mut TaskGraph, lists: &[ShapeList], rate: f64) -> Result<()> {
    for list in lists {
        if g.module(list.module).conf.is_none() {
            let s = list.pick_initial()?;
            g.set_conf(list.module, rate * s.area() as f64);
        }
    }
    Ok(())
}

pub fn format_shape_lists(g: &TaskGraph, lists: &[ShapeList]) -> String {
    let mut out = String::new();
    for l in lists {
        let _ = write!(out, "module {}:", g.module(l.module).id);
        for s in &l.shapes {
            let _ = write!(out, " ({},{})", s.w, s.h);
        }
        out.push('\n');
    }
    out
}

/// Reads the `module <id>: (w,h) ...` format back, in graph order.
pub fn parse_shape_lists(text: &str, g: &TaskGraph) -> Result<Vec<ShapeList>> {
    let mut lists: Vec<Option<ShapeList>> = vec![None; g.len()];
    for (i, raw) in text.lines().enumerate() {
        let syntax = |msg: String| Error::Syntax { line: i + 1, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rest = line.strip_prefix("module").ok_or_else(|| syntax("expected `module <id>:`".into()))?;
        let (label, shapes) = rest.split_once(':').ok_or_else(|| syntax("missing `:`".into()))?;
        let label: usize = label.trim().parse().map_err(|_| syntax(format!("bad module id `{}`", label.trim())))?;
        let index = g.index_of(label).ok_or(Error::UnknownModule(label))?;
        let mut parsed = Vec::new();
        for tok in shapes.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| syntax(format!("bad shape `{tok}`")))?;
            let (w, h) = inner.split_once(',').ok_or_else(|| syntax(format!("bad shape `{tok}`")))?;
            let num = |v: &str| v.trim().parse::<usize>().map_err(|_| syntax(format!("bad shape `{tok}`")));
            parsed.push(Shape::new(num(w)?, num(h)?));
        }
        if parsed.is_empty() {
            return Err(Error::EmptyShapeList(label));
        }
        lists[index] = Some(ShapeList { module: index, shapes: parsed, fallback: false });
    }
    lists
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or(Error::EmptyShapeList(g.module(i).id)))
        .collect()
}
