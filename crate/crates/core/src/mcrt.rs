//! Mated-CRT maps from discretized Brownian pairs.
//!
//! Cell `x` is the unit interval `[x-1, x]`. Cells `x1 < x2` are joined by
//! an upper edge when the larger of the two cell minima of `L` is at most
//! the minimum of `L` over `[x1, x2-1]`; likewise for `R` below. Adjacent
//! cells always qualify. Infima are taken over sample points, so the cell
//! minimum sequence decides everything: `x1` and `x2` are joined iff every
//! cell strictly between has a minimum no smaller than both of theirs.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{bfs_distance, MapKind, PlanarMap, INF};

/// Discretized two-sided Brownian pair on `[-halfwidth, halfwidth]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrtInput {
    /// Samples per unit time.
    pub resolution: usize,
    pub halfwidth: usize,
    /// `2 * halfwidth * resolution + 1` samples; index `halfwidth * resolution` is time 0.
    pub l: Vec<f64>,
    pub r: Vec<f64>,
}

impl CrtInput {
    pub fn sample<R: Rng + ?Sized>(halfwidth: usize, resolution: usize, rng: &mut R) -> Self {
        let steps = halfwidth * resolution;
        let normal = Normal::new(0.0, (1.0 / resolution as f64).sqrt()).expect("positive sd");
        let side = |rng: &mut R| -> Vec<f64> {
            let mut fwd = vec![0.0; steps + 1];
            for i in 1..=steps {
                fwd[i] = fwd[i - 1] + normal.sample(rng);
            }
            let mut back = vec![0.0; steps + 1];
            for i in 1..=steps {
                back[i] = back[i - 1] + normal.sample(rng);
            }
            back.reverse();
            back.pop();
            back.extend(fwd);
            back
        };
        let l = side(rng);
        let r = side(rng);
        CrtInput { resolution, halfwidth, l, r }
    }

    /// Every second sample: the same paths at half the resolution.
    pub fn coarsen(&self) -> Result<CrtInput> {
        if self.resolution % 2 != 0 {
            return Err(Error::Domain("resolution must be even to coarsen".into()));
        }
        let pick = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<_>>();
        Ok(CrtInput { resolution: self.resolution / 2, halfwidth: self.halfwidth, l: pick(&self.l), r: pick(&self.r) })
    }

    /// Number of cells; cell `i` is `[i - halfwidth, i - halfwidth + 1]`.
    pub fn n_cells(&self) -> usize {
        2 * self.halfwidth
    }

    fn check(&self) -> Result<()> {
        let want = 2 * self.halfwidth * self.resolution + 1;
        if self.l.len() != want || self.r.len() != want {
            return Err(Error::Domain(format!("expected {want} samples per path")));
        }
        if self.resolution == 0 {
            return Err(Error::Domain("resolution must be positive".into()));
        }
        Ok(())
    }
}

/// Cell minima of one two-sided path, drawn in the same order as
/// [`CrtInput::sample`] without storing the path.
fn sample_side_minima<R: Rng + ?Sized>(halfwidth: usize, resolution: usize, normal: &Normal<f64>, rng: &mut R) -> Vec<f64> {
    let mut minima = vec![0.0; 2 * halfwidth];
    // Forward: cells halfwidth..2*halfwidth cover times [0, halfwidth].
    let mut v = 0.0;
    for c in 0..halfwidth {
        let mut m = v;
        for _ in 0..resolution {
            v += normal.sample(rng);
            m = f64::min(m, v);
        }
        minima[halfwidth + c] = m;
    }
    // Backward from time 0: cells halfwidth-1 down to 0.
    let mut v = 0.0;
    for c in (0..halfwidth).rev() {
        let mut m = v;
        for _ in 0..resolution {
            v += normal.sample(rng);
            m = f64::min(m, v);
        }
        minima[c] = m;
    }
    minima
}

/// Same map as `build_mated_crt(&CrtInput::sample(..))` with the same RNG,
/// in memory proportional to the number of cells.
pub fn sample_mated_crt<R: Rng + ?Sized>(halfwidth: usize, resolution: usize, rng: &mut R) -> PlanarMap {
    let normal = Normal::new(0.0, (1.0 / resolution as f64).sqrt()).expect("positive sd");
    let ml = sample_side_minima(halfwidth, resolution, &normal, rng);
    let mr = sample_side_minima(halfwidth, resolution, &normal, rng);
    map_from_minima(&ml, &mr, halfwidth)
}

fn map_from_minima(ml: &[f64], mr: &[f64], halfwidth: usize) -> PlanarMap {
    let mut edges = visibility_pairs(ml);
    edges.extend(visibility_pairs(mr));
    edges.sort_unstable();
    edges.dedup();
    PlanarMap::from_edges(MapKind::Mcrt, ml.len(), 1 - halfwidth as i64, false, &edges)
}

/// Per-cell sample minima, endpoints included.
pub fn cell_minima(path: &[f64], resolution: usize) -> Vec<f64> {
    path.windows(resolution + 1)
        .step_by(resolution)
        .map(|w| w.iter().copied().fold(f64::INFINITY, f64::min))
        .collect()
}

/// Pairs `i < j` such that every entry strictly between is at least
/// `max(m[i], m[j])`, adjacent pairs included.
pub fn visibility_pairs(m: &[f64]) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(2 * m.len());
    // Suffix-minimum positions of the prefix seen so far, values
    // non-decreasing from bottom to top.
    let mut stack: Vec<u32> = Vec::new();
    for (j, &mj) in m.iter().enumerate() {
        // The minimum strictly between stack[k] and j is m[stack[k+1]].
        let mut k = stack.len();
        while k > 0 {
            let i = stack[k - 1];
            out.push((i, j as u32));
            if m[i as usize] < mj {
                break;
            }
            k -= 1;
        }
        while let Some(&t) = stack.last() {
            if m[t as usize] > mj {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(j as u32);
    }
    out
}

/// The mated-CRT map of an input with multi-edges collapsed. Vertex `i`
/// sits at position `i - halfwidth + 1` (the cell's right end).
pub fn build_mated_crt(input: &CrtInput) -> Result<PlanarMap> {
    input.check()?;
    let ml = cell_minima(&input.l, input.resolution);
    let mr = cell_minima(&input.r, input.resolution);
    Ok(map_from_minima(&ml, &mr, input.halfwidth))
}

/// The map given by an integer-valued walk pair read at resolution 1.
pub fn mated_crt_of_walks(l: &[i64], r: &[i64], halfwidth: usize) -> Result<PlanarMap> {
    let input = CrtInput {
        resolution: 1,
        halfwidth,
        l: l.iter().map(|&v| v as f64).collect(),
        r: r.iter().map(|&v| v as f64).collect(),
    };
    build_mated_crt(&input)
}

/// Jaccard index of the collapsed edge sets of two maps on the same cells.
pub fn edge_jaccard(a: &PlanarMap, b: &PlanarMap) -> f64 {
    let ea = a.simple().edges();
    let eb = b.simple().edges();
    let (mut i, mut j, mut both) = (0, 0, 0usize);
    while i < ea.len() && j < eb.len() {
        match ea[i].cmp(&eb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                both += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = ea.len() + eb.len() - both;
    if union == 0 { 1.0 } else { both as f64 / union as f64 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub pairs: usize,
    pub mean_log_ratio: f64,
    pub max_abs_log_ratio: f64,
    /// `3 * ln ln n`: the log of the polylog envelope, for comparison.
    pub log_envelope: f64,
}

/// Distribution of `ln(dist_a / dist_b)` over vertex pairs present and
/// connected in both maps (same vertex numbering).
pub fn compare_with_meander_map(a: &PlanarMap, b: &PlanarMap, pairs: &[(u32, u32)]) -> RatioStats {
    let mut logs = Vec::new();
    let mut cache: Option<(u32, Vec<u32>, Vec<u32>)> = None;
    for &(x, y) in pairs {
        if x as usize >= a.n_vertices().min(b.n_vertices()) || y as usize >= a.n_vertices().min(b.n_vertices()) || x == y {
            continue;
        }
        if cache.as_ref().map(|c| c.0) != Some(x) {
            cache = Some((x, bfs_distance(a, &[x]), bfs_distance(b, &[x])));
        }
        let (_, da, db) = cache.as_ref().unwrap();
        let (p, q) = (da[y as usize], db[y as usize]);
        if p != INF && q != INF {
            logs.push((p as f64 / q as f64).ln());
        }
    }
    let n = a.n_vertices().max(3) as f64;
    let k = logs.len();
    RatioStats {
        pairs: k,
        mean_log_ratio: if k == 0 { 0.0 } else { logs.iter().sum::<f64>() / k as f64 },
        max_abs_log_ratio: logs.iter().fold(0.0, |m, v| m.max(v.abs())),
        log_envelope: 3.0 * n.ln().ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infinite::build_uims_window;
    use crate::map::map_diameter_estimate;
    use crate::rng::trial_rng;
    use crate::sample::sample_two_sided;

    fn brute_pairs(m: &[f64]) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for j in 0..m.len() {
            for i in 0..j {
                let hi = m[i].max(m[j]);
                if m[i + 1..j].iter().all(|&v| v >= hi) {
                    out.push((i as u32, j as u32));
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn stack_matches_brute_force() {
        let mut rng = trial_rng(20, 0, 0);
        for len in 1..40 {
            for _ in 0..20 {
                // Small integer values to exercise ties.
                let m: Vec<f64> = (0..len).map(|_| rng.random_range(0..4) as f64).collect();
                let mut got = visibility_pairs(&m);
                got.sort_unstable();
                assert_eq!(got, brute_pairs(&m), "{m:?}");
            }
        }
    }

    #[test]
    fn streaming_sampler_matches_stored_paths() {
        for (hw, res) in [(1, 8), (7, 8), (40, 3)] {
            let a = sample_mated_crt(hw, res, &mut trial_rng(26, 0, hw as u64));
            let b = build_mated_crt(&CrtInput::sample(hw, res, &mut trial_rng(26, 0, hw as u64))).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn consecutive_cells_adjacent() {
        let mut rng = trial_rng(21, 0, 0);
        let input = CrtInput::sample(50, 8, &mut rng);
        let map = build_mated_crt(&input).unwrap();
        for i in 1..map.n_vertices() {
            assert!(map.neighbors(i).contains(&((i - 1) as u32)));
        }
        assert_eq!(map.n_vertices(), 100);
    }

    #[test]
    fn infima_pattern_decides_upper_edges() {
        // Cells 1 and 3 dip to 0 with the path above 0 in between: joined.
        let m = cell_minima(&[1.0, 0.0, 2.0, 2.0, 0.0], 1);
        assert_eq!(m, vec![0.0, 0.0, 2.0, 0.0]);
        assert!(visibility_pairs(&m).contains(&(1, 3)));
        // A strictly decreasing path only joins neighbours.
        let m = cell_minima(&[5.0, 4.0, 3.0, 2.0], 1);
        assert_eq!(visibility_pairs(&m), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn resolution_one_contains_meander_arcs() {
        for t in 0..50 {
            let w = 30;
            let (l, r) = sample_two_sided(w, 0.0, &mut trial_rng(22, 0, t));
            let sys = build_uims_window(&l, &r).unwrap();
            let mcrt = mated_crt_of_walks(&l.values, &r.values, w).unwrap();
            assert_eq!(mcrt.n_vertices(), sys.n_points());
            let crt_edges = mcrt.edges();
            let meander = crate::map::PlanarMap::build(&sys).simple();
            for e in meander.edges() {
                assert!(crt_edges.binary_search(&e).is_ok(), "{e:?}");
            }
        }
    }

    #[test]
    fn identical_maps_ratio_one() {
        let mut rng = trial_rng(23, 0, 0);
        let map = build_mated_crt(&CrtInput::sample(40, 8, &mut rng)).unwrap();
        let pairs: Vec<(u32, u32)> = (0..30).map(|i| (i, 79 - i)).collect();
        let s = compare_with_meander_map(&map, &map, &pairs);
        assert_eq!(s.pairs, 30);
        assert_eq!(s.max_abs_log_ratio, 0.0);
    }

    #[test]
    fn coarsening_keeps_most_edges() {
        // Sample minima converge like 1/sqrt(resolution); 99% agreement
        // needs a few thousand samples per unit.
        let jaccard = |res: usize, trials: u64| {
            let mut total = 0.0;
            for t in 0..trials {
                let fine = CrtInput::sample(256, res, &mut trial_rng(24, res as u64, t));
                let coarse = fine.coarsen().unwrap();
                total += edge_jaccard(&build_mated_crt(&fine).unwrap(), &build_mated_crt(&coarse).unwrap());
            }
            total / trials as f64
        };
        let low = jaccard(16, 20);
        let high = jaccard(4096, 100);
        assert!(low < high, "{low} {high}");
        assert!(high >= 0.99, "mean Jaccard {high}");
    }

    #[test]
    fn diameter_grows() {
        let small = build_mated_crt(&CrtInput::sample(64, 8, &mut trial_rng(25, 0, 0))).unwrap();
        let big = build_mated_crt(&CrtInput::sample(4096, 8, &mut trial_rng(25, 0, 1))).unwrap();
        assert!(map_diameter_estimate(&big, 4).lower_bound > map_diameter_estimate(&small, 4).lower_bound);
    }
}
