//! End-to-end runs, resource reuse, floorplan drawings and batch reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::anneal::{anneal, SaConfig};
use crate::chip::{ChipModel, ColumnKind, Rect};
use crate::error::{Error, Result};
use crate::graph::TaskGraph;
use crate::ilp::postopt;
use crate::pst::Solution;
use crate::shapes::{fill_default_conf, generate_all, ShapeGenConfig, ShapeList};

/// Resource reuse rate per kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rrt {
    pub clb: f64,
    pub bram: f64,
    pub dsp: f64,
}

/// Region resources weighted by how long each region is busy configuring or
/// executing, relative to the whole chip over the whole schedule.
pub fn compute_rrt(sol: &Solution, chip: &ChipModel) -> Result<Rrt> {
    let makespan = sol.eval.schedule.makespan;
    if !(makespan > 0.0) {
        return Err(Error::Undefined("resource reuse is undefined for a zero makespan".into()));
    }
    let mut busy: BTreeMap<usize, f64> = BTreeMap::new();
    for t in &sol.eval.schedule.layers {
        *busy.entry(t.region).or_default() += (t.config_end - t.config_start) + (t.exec_end - t.exec_start);
    }
    let have = chip.capacity();
    let mut num = [0.0f64; 3];
    for (r, bx) in &sol.eval.placement.region_boxes {
        let res = chip.resources_in_window_clipped(bx);
        let b = busy.get(r).copied().unwrap_or(0.0);
        for (k, kind) in [ColumnKind::Clb, ColumnKind::Bram, ColumnKind::Dsp].into_iter().enumerate() {
            num[k] += res.get(kind) as f64 * b;
        }
    }
    let rate = |k: usize, kind| match have.get(kind) {
        0 => 0.0,
        h => num[k] / (makespan * h as f64),
    };
    Ok(Rrt { clb: rate(0, ColumnKind::Clb), bram: rate(1, ColumnKind::Bram), dsp: rate(2, ColumnKind::Dsp) })
}

const SX: usize = 6;
const SY: usize = 2;
const MARGIN: usize = 10;

fn svg_rect(chip: &ChipModel, r: &Rect) -> (usize, usize, usize, usize) {
    let x = MARGIN + (r.x - 1) * SX;
    let y = MARGIN + (chip.height + 1 - (r.y + r.h)) * SY;
    (x, y, r.w * SX, r.h * SY)
}

fn svg_open(chip: &ChipModel, title: &str) -> String {
    let (w, h) = (chip.width * SX + 2 * MARGIN, chip.height * SY + 2 * MARGIN);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<title>{title}</title>\n"
    );
    for x in 1..=chip.width {
        let fill = match chip.column_kind(x) {
            Ok(ColumnKind::Bram) => "#cfe3f7",
            Ok(ColumnKind::Dsp) => "#f7dcc2",
            _ => continue,
        };
        let (px, py, pw, ph) = svg_rect(chip, &Rect::new(x, 1, 1, chip.height));
        let _ = writeln!(s, "<rect x=\"{px}\" y=\"{py}\" width=\"{pw}\" height=\"{ph}\" fill=\"{fill}\"/>");
    }
    let (px, py, pw, ph) = svg_rect(chip, &Rect::new(1, 1, chip.width, chip.height));
    let _ = writeln!(s, "<rect x=\"{px}\" y=\"{py}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#000\"/>");
    s
}

fn svg_regions(s: &mut String, sol: &Solution, chip: &ChipModel) {
    for (r, b) in &sol.eval.placement.region_boxes {
        let (px, py, pw, ph) = svg_rect(chip, b);
        let _ = writeln!(
            s,
            "<rect x=\"{px}\" y=\"{py}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#c00\" stroke-dasharray=\"4 2\"/>"
        );
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"#c00\">R{r}</text>", px + 2, py + 10);
    }
}

/// One drawing per time layer in configuration order plus a region
/// overview, as `(file name, svg text)`.
pub fn render_svg(sol: &Solution, g: &TaskGraph, chip: &ChipModel) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let members = sol.pst.layer_members();
    for (k, l) in sol.pst.rs.iter().enumerate() {
        let region = sol.pst.layer_regions()[l];
        let mut s = svg_open(chip, &format!("layer {l} (region {region})"));
        svg_regions(&mut s, sol, chip);
        for &m in members.get(l).map(Vec::as_slice).unwrap_or_default() {
            let r = sol.eval.placement.coords[m];
            let (px, py, pw, ph) = svg_rect(chip, &r);
            let _ = writeln!(
                s,
                "<rect x=\"{px}\" y=\"{py}\" width=\"{pw}\" height=\"{ph}\" fill=\"#9c9\" fill-opacity=\"0.7\" stroke=\"#060\"/>"
            );
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" font-size=\"9\">{} ({}×{})</text>",
                px + 2,
                py + 10,
                g.module(m).id,
                r.w,
                r.h
            );
        }
        s.push_str("</svg>\n");
        files.push((format!("layer_{k:03}.svg"), s));
    }
    let mut s = svg_open(chip, "regions");
    svg_regions(&mut s, sol, chip);
    s.push_str("</svg>\n");
    files.push(("overview.svg".to_string(), s));
    files
}

/// Shape lists for every module, filling in default configuration times.
pub fn prepare(g: &mut TaskGraph, chip: &ChipModel, cfg: &ShapeGenConfig, conf_rate: f64) -> Result<Vec<ShapeList>> {
    let lists = generate_all(g, chip, cfg)?;
    fill_default_conf(g, &lists, conf_rate)?;
    Ok(lists)
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub runs: usize,
    /// Run `r` anneals with seed `seed + r`.
    pub seed: u64,
    pub sa: SaConfig,
    pub postopt_time_limit: Option<Duration>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { runs: 10, seed: 1, sa: SaConfig::default(), postopt_time_limit: Some(Duration::from_secs(60)) }
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    pub feasible_before: bool,
    pub feasible_after: bool,
    /// Status line of post-optimization, when it ran.
    pub postopt: Option<String>,
    pub solution: Option<Solution>,
    pub rrt: Option<Rrt>,
    pub error: Option<String>,
    pub runtime: Duration,
}

impl RunRecord {
    fn metric(&self, f: impl Fn(&Solution) -> f64) -> Option<f64> {
        self.solution.as_ref().map(f)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<RunRecord>,
    /// Best and mean makespan, mean communication cost and mean reuse, over
    /// runs that end feasible.
    pub sch_best: Option<f64>,
    pub sch_avg: Option<f64>,
    pub comm_avg: Option<f64>,
    pub rrt_avg: Option<Rrt>,
    pub success_before: f64,
    pub success_after: f64,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl RunReport {
    pub fn from_records(records: Vec<RunRecord>) -> RunReport {
        let ok: Vec<&RunRecord> = records.iter().filter(|r| r.feasible_after).collect();
        let makespans: Vec<f64> = ok.iter().filter_map(|r| r.metric(|s| s.eval.cost.makespan)).collect();
        let comms: Vec<f64> = ok.iter().filter_map(|r| r.metric(|s| s.eval.cost.comm_raw)).collect();
        let rrts: Vec<Rrt> = ok.iter().filter_map(|r| r.rrt).collect();
        let n = records.len().max(1) as f64;
        let rrt_avg = (!rrts.is_empty()).then(|| {
            let k = rrts.len() as f64;
            Rrt {
                clb: rrts.iter().map(|r| r.clb).sum::<f64>() / k,
                bram: rrts.iter().map(|r| r.bram).sum::<f64>() / k,
                dsp: rrts.iter().map(|r| r.dsp).sum::<f64>() / k,
            }
        });
        RunReport {
            sch_best: makespans.iter().copied().reduce(f64::min),
            sch_avg: mean(&makespans),
            comm_avg: mean(&comms),
            rrt_avg,
            success_before: records.iter().filter(|r| r.feasible_before).count() as f64 / n,
            success_after: ok.len() as f64 / n,
            records,
        }
    }

    /// Per-seed table. Wall-clock times are left out so the table is
    /// reproducible.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("seed,feasible_before,feasible_after,makespan,comm,cost,x_max,y_max,rrt_clb,rrt_bram,rrt_dsp,postopt\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let c = r.solution.as_ref().map(|s| s.eval.cost);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.seed,
                r.feasible_before,
                r.feasible_after,
                opt(c.map(|c| c.makespan)),
                opt(c.map(|c| c.comm_raw)),
                opt(c.map(|c| c.total)),
                c.map(|c| c.x_max.to_string()).unwrap_or_default(),
                c.map(|c| c.y_max.to_string()).unwrap_or_default(),
                opt(r.rrt.map(|x| x.clb)),
                opt(r.rrt.map(|x| x.bram)),
                opt(r.rrt.map(|x| x.dsp)),
                r.postopt.as_deref().or(r.error.as_deref()).unwrap_or("").replace(',', ";"),
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
        let mut s = String::new();
        let _ = writeln!(s, "runs            {}", self.records.len());
        let _ = writeln!(s, "success_before  {:.1}%", 100.0 * self.success_before);
        let _ = writeln!(s, "success_after   {:.1}%", 100.0 * self.success_after);
        let _ = writeln!(s, "SchB            {}", opt(self.sch_best));
        let _ = writeln!(s, "SchA            {}", opt(self.sch_avg));
        let _ = writeln!(s, "CC              {}", opt(self.comm_avg));
        match self.rrt_avg {
            Some(r) => {
                let _ = writeln!(s, "RRT             {:.1}% {:.1}% {:.1}%", 100.0 * r.clb, 100.0 * r.bram, 100.0 * r.dsp);
            }
            None => s.push_str("RRT             n/a\n"),
        }
        let rt: Vec<f64> = self.records.iter().map(|r| r.runtime.as_secs_f64()).collect();
        let _ = writeln!(s, "RT              {}s", opt(mean(&rt)));
        s
    }
}

/// Anneals, then repairs boundary violations by shape reselection.
pub fn run_once(g: &TaskGraph, lists: &[ShapeList], chip: &ChipModel, cfg: &PipelineConfig, seed: u64) -> RunRecord {
    let started = Instant::now();
    let failed = |e: Error| RunRecord {
        seed,
        feasible_before: false,
        feasible_after: false,
        postopt: None,
        solution: None,
        rrt: None,
        error: Some(e.to_string()),
        runtime: started.elapsed(),
    };
    let sa = SaConfig { seed, ..cfg.sa.clone() };
    let explored = match anneal(g, lists, chip, &sa) {
        Ok(r) => r.best,
        Err(e) => return failed(e),
    };
    let feasible_before = explored.feasible();
    let (solution, status) = if feasible_before {
        (explored, None)
    } else {
        match postopt(&explored, lists, g, chip, &sa.weights, cfg.postopt_time_limit) {
            Ok(p) => (p.solution, Some(p.result.status_line())),
            Err(e) => return failed(e),
        }
    };
    let feasible_after = solution.feasible();
    let rrt = if feasible_after { compute_rrt(&solution, chip).ok() } else { None };
    RunRecord {
        seed,
        feasible_before,
        feasible_after,
        postopt: status,
        solution: Some(solution),
        rrt,
        error: None,
        runtime: started.elapsed(),
    }
}

/// Independent runs with seeds `seed, seed + 1, ...`, executed concurrently.
pub fn run_pipeline(g: &TaskGraph, lists: &[ShapeList], chip: &ChipModel, cfg: &PipelineConfig) -> Result<RunReport> {
    cfg.sa.validate()?;
    if cfg.runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    let records: Vec<RunRecord> =
        (0..cfg.runs as u64).into_par_iter().map(|r| run_once(g, lists, chip, cfg, cfg.seed.wrapping_add(r))).collect();
    Ok(RunReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pst::{CostWeights, Pst};
    use crate::shapes::Shape;

    fn one(exec: f64, conf: f64) -> TaskGraph {
        TaskGraph::parse(&format!("module 1 clb=1 bram=0 dsp=0 exec={exec} conf={conf}\n")).unwrap()
    }

    #[test]
    fn whole_chip_busy_is_full_reuse() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = one(40.0, 2.0);
        let sol = Solution::evaluate(Pst::single_layer(vec![0]), vec![Shape::new(146, 350)], &g, &chip, &CostWeights::default()).unwrap();
        let r = compute_rrt(&sol, &chip).unwrap();
        assert_eq!((r.clb, r.bram, r.dsp), (1.0, 1.0, 1.0));
    }

    #[test]
    fn half_clb_half_time() {
        // a two-module chain: the second module's region covers a CLB-only
        // strip holding half the chip's CLB and is busy for half the makespan
        let chip = ChipModel::new(4, 10, vec![], vec![], 10, 5).unwrap();
        let g = TaskGraph::parse(
            "module 1 clb=1 bram=0 dsp=0 exec=10 conf=0\nmodule 2 clb=1 bram=0 dsp=0 exec=10 conf=0\nedge 1 2 weight=1\n",
        )
        .unwrap();
        let pst = Pst { ps: vec![0, 1], qs: vec![0, 1], rs: vec![0, 1], region: vec![0, 1], layer: vec![0, 1] };
        let sol = Solution::evaluate(pst, vec![Shape::new(1, 5), Shape::new(2, 10)], &g, &chip, &CostWeights::default()).unwrap();
        let r = compute_rrt(&sol, &chip).unwrap();
        // region 0: 5 of 40 CLB busy 10 of 20; region 1: 20 of 40 CLB busy 10 of 20
        assert_eq!(r.clb, (5.0 * 10.0 + 20.0 * 10.0) / (20.0 * 40.0));
        assert_eq!((r.bram, r.dsp), (0.0, 0.0));
    }

    #[test]
    fn zero_makespan_is_undefined() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = TaskGraph::new(vec![], vec![]).unwrap();
        let sol = Solution::evaluate(Pst { ps: vec![], qs: vec![], rs: vec![], region: vec![], layer: vec![] }, vec![], &g, &chip, &CostWeights::default()).unwrap();
        assert!(matches!(compute_rrt(&sol, &chip), Err(Error::Undefined(_))));
        let files = render_svg(&sol, &g, &chip);
        assert_eq!(files.len(), 1);
        assert!(!files[0].1.contains("fill-opacity"));
    }

    #[test]
    fn drawings_per_layer() {
        let chip = ChipModel::builtin_xc7vx485t();
        let g = one(40.0, 2.0);
        let sol = Solution::evaluate(Pst::single_layer(vec![0]), vec![Shape::new(8, 5)], &g, &chip, &CostWeights::default()).unwrap();
        let a = render_svg(&sol, &g, &chip);
        assert_eq!(a, render_svg(&sol, &g, &chip));
        assert_eq!(a.len(), 2);
        // (1,1) is the bottom-left tile
        let expect = format!("<rect x=\"10\" y=\"{}\" width=\"48\" height=\"10\"", 10 + 345 * 2);
        assert!(a[0].1.contains(&expect), "{}", a[0].1);
        assert!(a[0].1.contains(">1 (8×5)</text>"));

        let g = TaskGraph::parse("module 1 clb=1 bram=0 dsp=0 exec=5 conf=1\nmodule 2 clb=1 bram=0 dsp=0 exec=5 conf=1\n").unwrap();
        let pst = Pst { ps: vec![0, 1], qs: vec![0, 1], rs: vec![0, 1], region: vec![0, 0], layer: vec![0, 1] };
        let sol = Solution::evaluate(pst, vec![Shape::new(8, 5); 2], &g, &chip, &CostWeights::default()).unwrap();
        assert_eq!(render_svg(&sol, &g, &chip).len(), 3);
    }

    #[test]
    fn small_batch_always_succeeds() {
        let chip = ChipModel::builtin_xc7vx485t();
        let mut g = TaskGraph::parse(
            "module 1 clb=200 bram=2 dsp=0 exec=5\nmodule 2 clb=300 bram=0 dsp=4 exec=7\nedge 1 2 weight=3\n",
        )
        .unwrap();
        let lists = prepare(&mut g, &chip, &ShapeGenConfig::default(), 0.001).unwrap();
        let cfg = PipelineConfig { runs: 10, ..Default::default() };
        let rep = run_pipeline(&g, &lists, &chip, &cfg).unwrap();
        assert_eq!((rep.success_before, rep.success_after), (1.0, 1.0));
        assert!(rep.sch_best.unwrap() <= rep.sch_avg.unwrap());
        assert_eq!(rep.to_csv(), run_pipeline(&g, &lists, &chip, &cfg).unwrap().to_csv());
        assert_eq!(rep.to_csv().lines().count(), 11);
    }
}
