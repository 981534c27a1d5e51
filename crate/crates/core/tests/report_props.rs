mod common;

use std::collections::BTreeMap;

use common::random_graph;
use pdrs::pst::random_pst;
use pdrs::report::{compute_rrt, prepare, run_pipeline, PipelineConfig};
use pdrs::{ChipModel, ColumnKind, CostWeights, SaConfig, Shape, ShapeGenConfig, Solution};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reuse rates recomputed from per-module times and per-column counts.
fn rrt_oracle(sol: &Solution, g: &pdrs::TaskGraph, chip: &ChipModel) -> [f64; 3] {
    let s = &sol.eval.schedule;
    let mut busy: BTreeMap<usize, f64> = BTreeMap::new();
    for mods in sol.pst.layer_members().values() {
        let conf: f64 = mods.iter().map(|&m| g.module(m).conf_time()).sum();
        let start = mods.iter().map(|&m| s.exec_start[m]).fold(f64::INFINITY, f64::min);
        let end = mods.iter().map(|&m| s.exec_end[m]).fold(0.0, f64::max);
        *busy.entry(sol.pst.region[mods[0]]).or_default() += conf + (end - start);
    }
    let mut used = [0.0; 3];
    for (r, b) in &sol.eval.placement.region_boxes {
        for x in b.x..b.x + b.w {
            if x > chip.width {
                continue;
            }
            let rows = (b.y + b.h - 1).min(chip.height) + 1 - b.y;
            let (k, per) = match chip.column_kind(x).unwrap() {
                ColumnKind::Clb => (0, rows as f64),
                ColumnKind::Bram => (1, (rows * chip.macro_rows_per_col / chip.height) as f64),
                ColumnKind::Dsp => (2, (rows * chip.macro_rows_per_col / chip.height) as f64),
            };
            used[k] += per * busy[r];
        }
    }
    let cap = chip.capacity();
    let have = [cap.clb, cap.bram, cap.dsp];
    let mk = s.makespan;
    [0, 1, 2].map(|k| if have[k] == 0 { 0.0 } else { used[k] / (mk * have[k] as f64) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reuse_matches_oracle_and_stays_in_unit_range(seed in any::<u64>()) {
        let chip = ChipModel::builtin_xc7vx485t();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=12);
        let g = random_graph(n, &mut rng);
        let pst = random_pst(&g, 4, &mut rng);
        let shapes: Vec<Shape> = (0..n).map(|_| Shape::new(rng.gen_range(1..=30), 5 * rng.gen_range(1..=20))).collect();
        let sol = Solution::evaluate(pst, shapes, &g, &chip, &CostWeights::default()).unwrap();
        prop_assume!(sol.feasible() && sol.eval.schedule.makespan > 0.0);
        let r = compute_rrt(&sol, &chip).unwrap();
        let o = rrt_oracle(&sol, &g, &chip);
        for (got, want) in [r.clb, r.bram, r.dsp].into_iter().zip(o) {
            prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{got} vs {want}");
        }
        // disjoint regions each busy at most the makespan
        let boxes: Vec<_> = sol.eval.placement.region_boxes.values().collect();
        let disjoint = boxes.iter().enumerate().all(|(i, a)| boxes[i + 1..].iter().all(|b| !a.overlaps(b)));
        if disjoint {
            for v in [r.clb, r.bram, r.dsp] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{v}");
            }
        }
    }
}

#[test]
fn report_aggregates_match_the_csv() {
    let chip = ChipModel::builtin_xc7vx485t();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut g = random_graph(6, &mut rng);
    let lists = prepare(&mut g, &chip, &ShapeGenConfig::default(), 0.001).unwrap();
    let cfg = PipelineConfig { runs: 6, seed: 11, sa: SaConfig { cooling_rate: 0.8, ..Default::default() }, ..Default::default() };
    let rep = run_pipeline(&g, &lists, &chip, &cfg).unwrap();
    let csv = rep.to_csv();
    assert_eq!(csv, run_pipeline(&g, &lists, &chip, &cfg).unwrap().to_csv());

    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 6);
    let ok: Vec<&Vec<String>> = rows.iter().filter(|r| r[col("feasible_after")] == "true").collect();
    let before = rows.iter().filter(|r| r[col("feasible_before")] == "true").count();
    let ms: Vec<f64> = ok.iter().map(|r| r[col("makespan")].parse().unwrap()).collect();
    let cc: Vec<f64> = ok.iter().map(|r| r[col("comm")].parse().unwrap()).collect();
    assert_eq!(rep.success_after, ok.len() as f64 / 6.0);
    assert_eq!(rep.success_before, before as f64 / 6.0);
    assert!(rep.success_after >= rep.success_before);
    if !ms.is_empty() {
        let best = ms.iter().copied().fold(f64::INFINITY, f64::min);
        let avg = ms.iter().sum::<f64>() / ms.len() as f64;
        assert_eq!(rep.sch_best, Some(best));
        assert!((rep.sch_avg.unwrap() - avg).abs() < 1e-9 * avg);
        assert!((rep.comm_avg.unwrap() - cc.iter().sum::<f64>() / cc.len() as f64).abs() < 1e-6);
        assert!(rep.sch_best.unwrap() <= rep.sch_avg.unwrap());
    }
    let seeds: Vec<u64> = rows.iter().map(|r| r[col("seed")].parse().unwrap()).collect();
    assert_eq!(seeds, (11..17).collect::<Vec<_>>());
}
