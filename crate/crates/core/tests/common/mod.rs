#![allow(dead_code)]

use pdrs::pst::{pack, random_pst};
use pdrs::{ChipModel, Pst, Shape, ShapeList, TaskGraph};
use rand::Rng;

/// Random DAG over `n` modules with explicit configuration times.
pub fn random_graph<R: Rng>(n: usize, rng: &mut R) -> TaskGraph {
    let mut text = String::new();
    for i in 1..=n {
        text += &format!(
            "module {i} clb={} bram={} dsp={} exec={} conf={}\n",
            rng.gen_range(0..2000),
            rng.gen_range(0..40),
            rng.gen_range(0..40),
            rng.gen_range(5..50),
            rng.gen_range(0..5)
        );
    }
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.gen_bool(0.3) {
                text += &format!("edge {a} {b} weight={}\n", rng.gen_range(1..10));
            }
        }
    }
    TaskGraph::parse(&text).unwrap()
}

/// Up to `k` random quantum-aligned shapes per module.
pub fn random_lists<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<ShapeList> {
    (0..n)
        .map(|module| {
            let count = rng.gen_range(1..=k);
            let shapes = (0..count).map(|_| Shape::new(rng.gen_range(5..=60), 5 * rng.gen_range(4..=40))).collect();
            ShapeList { module, shapes, fallback: false }
        })
        .collect()
}

pub struct Instance {
    pub g: TaskGraph,
    pub pst: Pst,
    pub lists: Vec<ShapeList>,
}

pub fn random_instance<R: Rng>(max_modules: usize, max_shapes: usize, rng: &mut R) -> Instance {
    let n = rng.gen_range(1..=max_modules);
    let g = random_graph(n, rng);
    let pst = random_pst(&g, 3, rng);
    let lists = random_lists(n, max_shapes, rng);
    Instance { g, pst, lists }
}

/// Best `(objective, total shape area, choice)` over every assignment that
/// packs inside the chip, or `None` when none does.
pub fn brute_force(pst: &Pst, lists: &[ShapeList], chip: &ChipModel) -> Option<(f64, usize, Vec<usize>)> {
    let n = lists.len();
    let mut choice = vec![0usize; n];
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    loop {
        let shapes: Vec<Shape> = (0..n).map(|i| lists[i].shapes[choice[i]]).collect();
        let p = pack(pst, &shapes, chip);
        if p.x_max <= chip.width && p.y_max <= chip.height {
            let obj = (chip.width + chip.height) as f64 - (p.x_max + p.y_max) as f64;
            let area: usize = shapes.iter().map(Shape::area).sum();
            if best.as_ref().is_none_or(|b| obj > b.0 || (obj == b.0 && area < b.1)) {
                best = Some((obj, area, choice.clone()));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            choice[i] += 1;
            if choice[i] < lists[i].shapes.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
