use rand::seq::SliceRandom;
use rand::Rng;

use super::{LayerId, Pst, RegionId};
use crate::graph::TaskGraph;

/// Draws a random valid triple with at most `max_regions` regions.
///
/// Modules are visited in topological order and dropped into a layer no
/// earlier in `rs` than any of their predecessors' layers, so dependency
/// order always holds.
pub fn random_pst<R: Rng>(g: &TaskGraph, max_regions: usize, rng: &mut R) -> Pst {
    let n = g.len();
    let max_regions = max_regions.max(1);
    let mut rs: Vec<LayerId> = Vec::new();
    let mut layer_region: Vec<RegionId> = Vec::new();
    let mut layer = vec![0; n];
    let mut region = vec![0; n];
    let mut regions_used = 0usize;
    for &m in g.topo_order() {
        let index_of = |rs: &[LayerId], l: LayerId| rs.iter().position(|&x| x == l).expect("layer in rs");
        let lo = g.preds(m).iter().map(|&p| index_of(&rs, layer[p])).max().unwrap_or(0);
        let open = rs.len() > lo && rng.gen_bool(0.6);
        let l = if open {
            rs[rng.gen_range(lo..rs.len())]
        } else {
            let id = layer_region.len();
            let r = if regions_used < max_regions && (regions_used == 0 || rng.gen_bool(0.5)) {
                regions_used += 1;
                regions_used - 1
            } else {
                rng.gen_range(0..regions_used)
            };
            layer_region.push(r);
            // strictly after the latest predecessor layer
            let min_pos = if g.preds(m).is_empty() { 0 } else { lo + 1 };
            let pos = rng.gen_range(min_pos..=rs.len());
            rs.insert(pos, id);
            id
        };
        layer[m] = l;
        region[m] = layer_region[l];
    }
    let ps = nested_order(&layer, &region, &layer_region, regions_used, rng);
    let qs = nested_order(&layer, &region, &layer_region, regions_used, rng);
    Pst { ps, qs, rs, region, layer }
}

/// A random sequence in which regions, and layers inside regions, are contiguous.
fn nested_order<R: Rng>(
    layer: &[LayerId],
    region: &[RegionId],
    layer_region: &[RegionId],
    regions: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut region_order: Vec<RegionId> = (0..regions).collect();
    region_order.shuffle(rng);
    let mut out = Vec::with_capacity(layer.len());
    for r in region_order {
        let mut layers: Vec<LayerId> = (0..layer_region.len()).filter(|&l| layer_region[l] == r).collect();
        layers.shuffle(rng);
        for l in layers {
            let mut mods: Vec<usize> = (0..layer.len()).filter(|&m| layer[m] == l && region[m] == r).collect();
            mods.shuffle(rng);
            out.extend(mods);
        }
    }
    out
}
