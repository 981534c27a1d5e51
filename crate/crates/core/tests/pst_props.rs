use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pdrs::graph::{generate, BenchSpec};
use pdrs::pst::{self, comm_cost, pack, random_pst, schedule, Pst, Relation};
use pdrs::shapes::Shape;
use pdrs::{ChipModel, TaskGraph};

fn instance(seed: u64, n: usize) -> (TaskGraph, Pst, Vec<Shape>) {
    let spec = BenchSpec { module_count: n, edge_density: 1.2, seed, ..BenchSpec::preset("t30-1", 0).unwrap() };
    let mut g = generate(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for i in 0..n {
        g.set_conf(i, (i % 7) as f64 * 0.5 + 0.25);
    }
    let pst = random_pst(&g, 4, &mut rng);
    let shapes = (0..n).map(|i| Shape::new(1 + (seed as usize + 3 * i) % 17, 5 * (1 + (i * 7 + seed as usize) % 9))).collect();
    (g, pst, shapes)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn random_triples_are_valid(seed in any::<u64>(), n in 1usize..30) {
        let (g, p, _) = instance(seed, n);
        prop_assert!(p.validate(&g).is_empty(), "{:?}", p.validate(&g));
    }

    #[test]
    fn packing_respects_every_pairwise_constraint(seed in any::<u64>(), n in 2usize..20) {
        let chip = ChipModel::builtin_xc7vx485t();
        let (_, p, shapes) = instance(seed, n);
        let pl = pack(&p, &shapes, &chip);
        for a in 0..n {
            for b in 0..n {
                if a == b || !p.constrains(a, b) {
                    continue;
                }
                let (ra, rb) = (pl.coords[a], pl.coords[b]);
                match p.relation(a, b) {
                    Relation::LeftOf => prop_assert!(ra.right() < rb.x),
                    Relation::Below => prop_assert!(ra.top() < rb.y),
                    _ => {}
                }
                if p.layer[a] == p.layer[b] {
                    prop_assert!(!ra.overlaps(&rb));
                }
            }
            let bx = pl.region_boxes[&p.region[a]];
            prop_assert!(bx.contains(&pl.coords[a]));
            prop_assert_eq!((pl.coords[a].y - 1) % chip.quantum, 0);
        }
        let boxes: Vec<_> = pl.region_boxes.values().collect();
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                prop_assert!(!boxes[i].overlaps(boxes[j]));
            }
        }
        prop_assert_eq!(pl.x_max, pl.coords.iter().map(|r| r.right()).max().unwrap());
        prop_assert_eq!(pl.y_max, pl.coords.iter().map(|r| r.top()).max().unwrap());
    }

    #[test]
    fn makespan_lower_bounds(seed in any::<u64>(), n in 1usize..30) {
        let (g, p, _) = instance(seed, n);
        let s = schedule(&p, &g).unwrap();
        prop_assert!(s.makespan + 1e-9 >= g.critical_path_time());
        prop_assert!(s.makespan + 1e-9 >= g.total_conf());
        for m in 0..n {
            prop_assert!((s.exec_end[m] - s.exec_start[m] - g.module(m).exec).abs() < 1e-9);
            for &q in g.preds(m) {
                prop_assert!(s.exec_start[m] + 1e-9 >= s.exec_end[q]);
            }
        }
    }

    #[test]
    fn schedule_is_monotone_in_times(seed in any::<u64>(), n in 1usize..20, pick in any::<prop::sample::Index>(), bump in 0.1f64..50.0, conf in any::<bool>()) {
        let (g, p, _) = instance(seed, n);
        let base = schedule(&p, &g).unwrap();
        let m = pick.index(n);
        let mut mods = g.modules().to_vec();
        if conf {
            mods[m].conf = Some(mods[m].conf_time() + bump);
        } else {
            mods[m].exec += bump;
        }
        let g2 = TaskGraph::new(mods, g.edges().to_vec()).unwrap();
        let s = schedule(&p, &g2).unwrap();
        for i in 0..n {
            prop_assert!(s.exec_start[i] + 1e-9 >= base.exec_start[i]);
            prop_assert!(s.exec_end[i] + 1e-9 >= base.exec_end[i]);
        }
        prop_assert!(s.makespan + 1e-9 >= base.makespan);
    }

    #[test]
    fn comm_scales_linearly(seed in any::<u64>(), n in 2usize..20, c in 0.01f64..100.0) {
        let chip = ChipModel::builtin_xc7vx485t();
        let (g, p, shapes) = instance(seed, n);
        let pl = pack(&p, &shapes, &chip);
        let scaled: Vec<_> = g.edges().iter().map(|e| pdrs::Edge { weight: e.weight * c, ..e.clone() }).collect();
        let g2 = TaskGraph::new(g.modules().to_vec(), scaled).unwrap();
        let (a, b) = (comm_cost(&pl, &g), comm_cost(&pl, &g2));
        prop_assert!((b - c * a).abs() <= 1e-9 * b.abs().max(1.0));
        // independent recomputation from coordinates
        let mut brute = 0.0;
        for e in g.edges() {
            let (ra, rb) = (pl.coords[e.src], pl.coords[e.dst]);
            let cx = |r: pdrs::Rect| (2 * r.x + r.w) as f64 / 2.0;
            let cy = |r: pdrs::Rect| (2 * r.y + r.h) as f64 / 2.0;
            brute += e.weight * ((cx(ra) - cx(rb)).abs() + (cy(ra) - cy(rb)).abs());
        }
        prop_assert!((brute - a).abs() <= 1e-9 * a.max(1.0));
    }
}

#[test]
fn evaluation_matches_components() {
    let chip = ChipModel::builtin_xc7vx485t();
    let (g, p, shapes) = instance(11, 12);
    let w = pst::CostWeights::default();
    let e = pst::total_cost(&p, &shapes, &g, &chip, &w).unwrap();
    let norm = pst::Normalizers::for_instance(&g, &chip);
    assert_eq!(e.cost.schedule, e.schedule.makespan / norm.schedule);
    assert_eq!(e.cost.comm, comm_cost(&e.placement, &g) / norm.comm);
    let sum = e.cost.area + e.cost.schedule + e.cost.comm + e.cost.hetero;
    assert!((sum - e.cost.total).abs() < 1e-12);
}
