//! Solution files.
//!
//! ```text
//! ps 3 1 2
//! qs 1 3 2
//! rs 0 1
//! place 1 region=0 layer=0 x=1 y=1 w=8 h=5
//! ...
//! metrics
//! makespan 123.4
//! ...
//! end
//! ```
//!
//! Module ids are the graph's labels. `ps`/`qs` carry the sequence pair so
//! that post-optimization and rendering can rebuild the exact triple.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::cost::{total_cost, CostWeights, Evaluation};
use super::Pst;
use crate::chip::{ChipModel, Rect};
use crate::error::{Error, Result};
use crate::graph::TaskGraph;
use crate::shapes::Shape;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub pst: Pst,
    /// Chosen shape of every module.
    pub shapes: Vec<Shape>,
    pub eval: Evaluation,
}

impl Solution {
    pub fn evaluate(pst: Pst, shapes: Vec<Shape>, g: &TaskGraph, chip: &ChipModel, w: &CostWeights) -> Result<Solution> {
        let eval = total_cost(&pst, &shapes, g, chip, w)?;
        Ok(Solution { pst, shapes, eval })
    }

    pub fn feasible(&self) -> bool {
        self.eval.cost.feasible
    }

    pub fn to_text(&self, g: &TaskGraph) -> String {
        let label = |m: usize| g.module(m).id.to_string();
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "ps {}", join(&mut self.pst.ps.iter().map(|&m| label(m))));
        let _ = writeln!(out, "qs {}", join(&mut self.pst.qs.iter().map(|&m| label(m))));
        let _ = writeln!(out, "rs {}", join(&mut self.pst.rs.iter().map(|l| l.to_string())));
        for m in 0..self.pst.len() {
            let r = self.eval.placement.coords[m];
            let _ = writeln!(
                out,
                "place {} region={} layer={} x={} y={} w={} h={}",
                label(m),
                self.pst.region[m],
                self.pst.layer[m],
                r.x,
                r.y,
                r.w,
                r.h
            );
        }
        let c = &self.eval.cost;
        out.push_str("metrics\n");
        let _ = writeln!(out, "makespan {}", c.makespan);
        let _ = writeln!(out, "cost_total {}", c.total);
        let _ = writeln!(out, "cost_area {}", c.area);
        let _ = writeln!(out, "cost_schedule {}", c.schedule);
        let _ = writeln!(out, "cost_comm {}", c.comm);
        let _ = writeln!(out, "cost_hetero {}", c.hetero);
        let _ = writeln!(out, "comm_raw {}", c.comm_raw);
        let _ = writeln!(out, "x_max {}", c.x_max);
        let _ = writeln!(out, "y_max {}", c.y_max);
        let _ = writeln!(out, "feasible {}", c.feasible);
        out.push_str("end\n");
        out
    }
}

/// A parsed solution file, before re-evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub pst: Pst,
    pub shapes: Vec<Shape>,
    /// Module rectangles as written in the file.
    pub coords: Vec<Rect>,
    pub metrics: BTreeMap<String, String>,
}

impl SolutionFile {
    pub fn parse(text: &str, g: &TaskGraph) -> Result<SolutionFile> {
        let n = g.len();
        let mut ps = None;
        let mut qs = None;
        let mut rs = None;
        let mut region = vec![None; n];
        let mut layer = vec![0; n];
        let mut shapes = vec![Shape::new(0, 0); n];
        let mut coords = vec![Rect::new(0, 0, 0, 0); n];
        let mut metrics = BTreeMap::new();
        let mut in_metrics = false;
        for (i, raw) in text.lines().enumerate() {
            let syntax = |msg: String| Error::Syntax { line: i + 1, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let kw = tok.next().unwrap_or_default();
            if in_metrics {
                if kw == "end" {
                    in_metrics = false;
                } else {
                    metrics.insert(kw.to_string(), tok.collect::<Vec<_>>().join(" "));
                }
                continue;
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(format!("bad number `{s}`")));
            let module = |s: &str| -> Result<usize> {
                let l = num(s)?;
                g.index_of(l).ok_or(Error::UnknownModule(l))
            };
            match kw {
                "ps" => ps = Some(tok.map(module).collect::<Result<Vec<_>>>()?),
                "qs" => qs = Some(tok.map(module).collect::<Result<Vec<_>>>()?),
                "rs" => rs = Some(tok.map(num).collect::<Result<Vec<_>>>()?),
                "place" => {
                    let m = module(tok.next().ok_or_else(|| syntax("missing module id".into()))?)?;
                    let mut attrs = BTreeMap::new();
                    for t in tok {
                        let (k, v) = t.split_once('=').ok_or_else(|| syntax(format!("expected key=value, got `{t}`")))?;
                        attrs.insert(k, num(v)?);
                    }
                    let get = |k: &str| attrs.get(k).copied().ok_or_else(|| syntax(format!("missing `{k}=`")));
                    region[m] = Some(get("region")?);
                    layer[m] = get("layer")?;
                    shapes[m] = Shape::new(get("w")?, get("h")?);
                    coords[m] = Rect::new(get("x")?, get("y")?, shapes[m].w, shapes[m].h);
                }
                "metrics" => in_metrics = true,
                other => return Err(syntax(format!("unknown directive `{other}`"))),
            }
        }
        let missing = |what: &str| Error::Config(format!("solution file lacks `{what}`"));
        let region = region
            .into_iter()
            .enumerate()
            .map(|(m, r)| r.ok_or_else(|| Error::Config(format!("module {} has no place line", g.module(m).id))))
            .collect::<Result<Vec<_>>>()?;
        let pst = Pst {
            ps: ps.ok_or_else(|| missing("ps"))?,
            qs: qs.ok_or_else(|| missing("qs"))?,
            rs: rs.ok_or_else(|| missing("rs"))?,
            region,
            layer,
        };
        pst.check(g)?;
        Ok(SolutionFile { pst, shapes, coords, metrics })
    }

    pub fn evaluate(self, g: &TaskGraph, chip: &ChipModel, w: &CostWeights) -> Result<Solution> {
        Solution::evaluate(self.pst, self.shapes, g, chip, w)
    }
}
