//! Finite windows of the infinite-volume systems.
//!
//! All constructions take two walks on a common time range `[lo-1, hi]`
//! containing time 0 with value 0 there; points are `lo ..= hi`. Anything
//! that depends on data outside the window is reported as an exit stub or a
//! truncated record, never guessed.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arcs::{is_sentinel, walk_to_arcs, ArcDiagram, Side, EXIT_LEFT, EXIT_RIGHT, UNMATCHED};
use crate::error::{Error, Result};
use crate::loops::{Terminal, TerminalKind};
use crate::system::{MeandricSystem, Variant};
use crate::walk::{reflect, Walk};

fn check_window(upper: &Walk, lower: &Walk) -> Result<()> {
    if upper.start_index != lower.start_index || upper.values.len() != lower.values.len() {
        return Err(Error::Window("walks cover different time ranges".into()));
    }
    if upper.start_index > -1 || upper.end_index() < 1 {
        return Err(Error::Window("window must contain the points 0 and 1".into()));
    }
    if upper.at(0) != 0 || lower.at(0) != 0 {
        return Err(Error::Window("walks must vanish at time 0".into()));
    }
    Ok(())
}

/// Window of the whole-plane system: arcs of both walks.
pub fn build_uims_window(upper: &Walk, lower: &Walk) -> Result<MeandricSystem> {
    check_window(upper, lower)?;
    MeandricSystem::new(walk_to_arcs(upper, Side::Upper)?, walk_to_arcs(lower, Side::Lower)?, Variant::UimsWindow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Reflection,
    Cutting,
    Pointed,
}

/// A half-plane window with its boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneWindow {
    pub system: MeandricSystem,
    pub upper_walk: Walk,
    pub lower_walk: Walk,
    pub construction: Construction,
    /// Boundary positions `J_k`, increasing.
    pub boundary: Vec<i64>,
    /// Index of `J_0 = 0` in `boundary`.
    pub j0: usize,
    /// Excursion coins `(k, xi_k)`; empty until [`good_boundary_points`].
    pub coins: Vec<(i64, bool)>,
    /// Good positions `H_m`, increasing.
    pub good: Vec<i64>,
    /// Index of `H_0` (largest good point <= 0) in `good`; -1 when every
    /// good point in the window is positive.
    pub h0: i64,
    /// The system with the lower arcs at good points removed.
    pub cut: Option<MeandricSystem>,
}

impl HalfPlaneWindow {
    /// Position of `J_k`, if inside the window.
    pub fn j(&self, k: i64) -> Option<i64> {
        let i = self.j0 as i64 + k;
        (0 <= i && (i as usize) < self.boundary.len()).then(|| self.boundary[i as usize])
    }

    /// Range of `k` with `J_k` inside the window.
    pub fn j_range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.j0 as i64)..=(self.boundary.len() - 1 - self.j0) as i64
    }

    /// `k` with `J_k = pos`.
    pub fn j_index(&self, pos: i64) -> Option<i64> {
        self.boundary.binary_search(&pos).ok().map(|i| i as i64 - self.j0 as i64)
    }

    /// Position of `H_m`.
    pub fn h(&self, m: i64) -> Option<i64> {
        let i = self.h0 + m;
        (0 <= i && (i as usize) < self.good.len()).then(|| self.good[i as usize])
    }

    /// `m` with `H_m = pos`.
    pub fn h_index(&self, pos: i64) -> Option<i64> {
        self.good.binary_search(&pos).ok().map(|i| i as i64 - self.h0)
    }

    /// Range of `m` with `H_m` inside the window (empty without good points).
    pub fn m_range(&self) -> std::ops::RangeInclusive<i64> {
        -self.h0..=(self.good.len() as i64 - 1 - self.h0)
    }
}

/// Points not strictly enclosed by any arc of the diagram. Exit stubs count
/// as arcs reaching past the window.
pub fn unenclosed_points(d: &ArcDiagram) -> Vec<i64> {
    let mut depth = d.partner.iter().filter(|&&p| p == EXIT_LEFT).count();
    let mut out = Vec::new();
    for (i, &p) in d.partner.iter().enumerate() {
        let closing = p == EXIT_LEFT || (!is_sentinel(p) && (p as usize) < i);
        let opening = p == EXIT_RIGHT || (!is_sentinel(p) && (p as usize) > i);
        if depth - closing as usize == 0 {
            out.push(d.position(i));
        }
        if closing {
            depth -= 1;
        }
        if opening {
            depth += 1;
        }
    }
    out
}

/// Points where `|R|` crosses height 1/2.
pub fn crossing_points(lower: &Walk) -> Vec<i64> {
    let v = &lower.values;
    (1..v.len())
        .filter(|&i| {
            let (a, b) = (v[i - 1].abs(), v[i].abs());
            a.min(b) == 0 && a.max(b) == 1
        })
        .map(|i| lower.start_index + i as i64)
        .collect()
}

fn half_plane(system: MeandricSystem, upper: &Walk, lower: &Walk, construction: Construction) -> Result<HalfPlaneWindow> {
    let boundary = unenclosed_points(&system.lower);
    let j0 = boundary
        .binary_search(&0)
        .map_err(|_| Error::Domain("0 is not a boundary point".into()))?;
    if boundary.get(j0 + 1) != Some(&1) {
        return Err(Error::Domain("1 is not a boundary point".into()));
    }
    Ok(HalfPlaneWindow {
        system,
        upper_walk: upper.clone(),
        lower_walk: lower.clone(),
        construction,
        boundary,
        j0,
        coins: Vec::new(),
        good: Vec::new(),
        h0: -1,
        cut: None,
    })
}

/// Half-plane window whose lower diagram is the arc diagram of `|R|`.
pub fn build_uihpms_by_reflection(upper: &Walk, lower: &Walk) -> Result<HalfPlaneWindow> {
    check_window(upper, lower)?;
    let mut system = build_uims_window(upper, lower)?;
    system.lower = walk_to_arcs(&reflect(lower), Side::Lower)?;
    system.variant = Variant::UihpmsWindow;
    half_plane(system, upper, lower, Construction::Reflection)
}

/// Cut the lower arcs that straddle 1/2 and relink their ends: right ends
/// `e_1 < e_2 < ...` as `(e_1, e_2), (e_3, e_4), ...`, left ends
/// `f_1 > f_2 > ...` as `(f_2, f_1), (f_4, f_3), ...`. An unpaired last end
/// becomes a stub pointing out of the window.
pub fn cut_lower(d: &ArcDiagram) -> ArcDiagram {
    let mut out = d.clone();
    let first_pos = d.slot(1).unwrap_or(d.n_points());
    let mut rights = Vec::new();
    let mut lefts = Vec::new();
    for (i, &p) in d.partner.iter().enumerate() {
        if i >= first_pos && (p == EXIT_LEFT || (!is_sentinel(p) && (p as usize) < first_pos)) {
            rights.push(i);
        }
        if i < first_pos && (p == EXIT_RIGHT || (!is_sentinel(p) && (p as usize) >= first_pos)) {
            lefts.push(i);
        }
    }
    lefts.reverse();
    for (ends, stub) in [(rights, EXIT_RIGHT), (lefts, EXIT_LEFT)] {
        for pair in ends.chunks(2) {
            match *pair {
                [a, b] => {
                    out.partner[a] = b as u32;
                    out.partner[b] = a as u32;
                }
                [a] => out.partner[a] = stub,
                _ => unreachable!(),
            }
        }
    }
    out
}

/// Half-plane window obtained by cutting a whole-plane window along the
/// downward ray at 1/2.
pub fn build_uihpms_by_cutting(upper: &Walk, lower: &Walk) -> Result<HalfPlaneWindow> {
    let mut system = build_uims_window(upper, lower)?;
    system.lower = cut_lower(&system.lower);
    system.variant = Variant::UihpmsWindow;
    half_plane(system, upper, lower, Construction::Cutting)
}

/// `R~ = R - M + 1{M odd}` with `M` the running minimum from time 0: the
/// walk whose arcs are the cut arcs on the non-negative side.
pub fn cut_walk(lower: &Walk) -> Walk {
    let mut m = i64::MAX;
    let values = lower
        .values
        .iter()
        .map(|&r| {
            m = m.min(r);
            r - m + (m.rem_euclid(2) == 1) as i64
        })
        .collect();
    Walk::new(lower.start_index, values, crate::walk::WalkKind::Reflected)
}

/// Pointed half-plane window: lower boundary arcs at non-positive indices
/// are rewired so that `J_0 = 0` has no lower arc. For `k <= 0` the arc
/// `(J_{2k-1}, J_{2k})` is replaced by `(J_{2k-2}, J_{2k-1})`.
pub fn build_pihpms(upper: &Walk, lower: &Walk) -> Result<HalfPlaneWindow> {
    let mut w = build_uihpms_by_reflection(upper, lower)?;
    let lo_k = *w.j_range().start();
    let slot = |pos: i64| w.system.slot(pos).unwrap();
    let mut partner = w.system.lower.partner.clone();
    for k in lo_k..=0 {
        partner[slot(w.j(k).unwrap())] = UNMATCHED;
    }
    for k in lo_k..=0 {
        if k.rem_euclid(2) == 1 {
            let a = slot(w.j(k).unwrap());
            match w.j(k - 1) {
                Some(pos) => {
                    let b = slot(pos);
                    partner[a] = b as u32;
                    partner[b] = a as u32;
                }
                None => partner[a] = EXIT_LEFT,
            }
        }
    }
    w.system.lower.partner = partner;
    w.system.variant = Variant::PihpmsWindow;
    w.construction = Construction::Pointed;
    Ok(w)
}

/// Draw one fair coin per excursion `(J_{2k-1}, J_{2k})` meeting the window
/// (in increasing `k`), mark the endpoints of excursions with coin 1 as good
/// and remove their lower arcs.
pub fn good_boundary_points<R: Rng + ?Sized>(w: &mut HalfPlaneWindow, rng: &mut R) {
    let ks = w.j_range();
    let (lo, hi) = (*ks.start(), *ks.end());
    // Excursion k has endpoints J_{2k-1}, J_{2k}.
    let k_min = (lo + 1).div_euclid(2);
    let k_max = (hi + 1).div_euclid(2);
    let coins: Vec<(i64, bool)> = (k_min..=k_max).map(|k| (k, rng.random::<bool>())).collect();
    apply_coins(w, coins);
}

/// [`good_boundary_points`] with prescribed coins.
pub fn apply_coins(w: &mut HalfPlaneWindow, coins: Vec<(i64, bool)>) {
    let mut cut = w.system.clone();
    let mut good = Vec::new();
    for &(k, xi) in &coins {
        if !xi {
            continue;
        }
        for idx in [2 * k - 1, 2 * k] {
            if let Some(pos) = w.j(idx) {
                let s = cut.slot(pos).unwrap();
                cut.lower.partner[s] = UNMATCHED;
                good.push(pos);
            }
        }
    }
    good.sort_unstable();
    w.h0 = good.partition_point(|&p| p <= 0) as i64 - 1;
    w.good = good;
    w.coins = coins;
    w.cut = Some(cut);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathEnd {
    /// Reached the good point `H_m`.
    Good { m: i64 },
    /// Left the window or hit a point without an arc that is not good.
    Truncated { terminal: Terminal },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub start: i64,
    /// Positions in traversal order.
    pub vertices: Vec<i64>,
    pub end: PathEnd,
}

/// Alternate arcs from `start_pos`. Returns the positions, the terminal that
/// stopped the walk, and whether it came back to the start.
fn follow(sys: &MeandricSystem, start_pos: i64, first: Side) -> (Vec<i64>, Terminal, bool) {
    let start = sys.slot(start_pos).expect("start inside window");
    let mut cur = start;
    let mut leave = first;
    let mut out = Vec::new();
    loop {
        out.push(sys.position(cur));
        let p = sys.partner(cur, leave);
        if is_sentinel(p) {
            let kind = match p {
                UNMATCHED => TerminalKind::Unmatched,
                EXIT_LEFT => TerminalKind::ExitLeft,
                _ => TerminalKind::ExitRight,
            };
            return (out, Terminal { kind, side: leave }, false);
        }
        cur = p as usize;
        if cur == start {
            return (out, Terminal { kind: TerminalKind::Unmatched, side: leave }, true);
        }
        leave = leave.other();
    }
}

/// Boundary path from `H_m`: follow the upper arc, then alternate, until the
/// next good point or the window edge.
pub fn boundary_path(w: &HalfPlaneWindow, m: i64) -> Result<PathRecord> {
    let cut = w.cut.as_ref().ok_or_else(|| Error::Domain("good points not drawn".into()))?;
    let start = w.h(m).ok_or_else(|| Error::Window(format!("H_{m} outside window")))?;
    let (vertices, term, returned) = follow(cut, start, Side::Upper);
    let last = *vertices.last().unwrap();
    let end = match (term.kind, w.h_index(last)) {
        (TerminalKind::Unmatched, Some(m2)) if !returned && m2 != m => PathEnd::Good { m: m2 },
        _ => PathEnd::Truncated { terminal: term },
    };
    Ok(PathRecord { start: m, vertices, end })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryMatching {
    pub phi: BTreeMap<i64, i64>,
    pub truncated: Vec<i64>,
}

impl BoundaryMatching {
    pub fn is_involution(&self) -> bool {
        self.phi.iter().all(|(&m, &m2)| m != m2 && self.phi.get(&m2) == Some(&m))
    }

    pub fn is_noncrossing(&self) -> bool {
        let mut stack: Vec<i64> = Vec::new();
        for (&m, &m2) in &self.phi {
            if m2 > m {
                stack.push(m);
            } else if stack.pop() != Some(m2) {
                return false;
            }
        }
        stack.is_empty()
    }

    /// Number of `m > 0` matched to some `m' <= 0`.
    pub fn shields(&self) -> usize {
        self.phi.iter().filter(|(&m, &m2)| m > 0 && m2 <= 0).count()
    }

    /// Integers `j` in `(min m, max m]` that no certain pair `(a, b)` with
    /// `a < j <= b` straddles.
    pub fn exposed(&self) -> Vec<i64> {
        let (Some(&lo), Some(&hi)) = (self.phi.keys().next(), self.phi.keys().next_back()) else {
            return Vec::new();
        };
        let mut open = 0i64;
        let mut out = Vec::new();
        for j in lo + 1..=hi {
            if let Some(&m2) = self.phi.get(&(j - 1)) {
                open += if m2 > j - 1 { 1 } else { -1 };
            }
            if open == 0 {
                out.push(j);
            }
        }
        out
    }
}

pub fn boundary_matching(w: &HalfPlaneWindow) -> Result<(BoundaryMatching, Vec<PathRecord>)> {
    let mut bm = BoundaryMatching::default();
    let mut paths = Vec::new();
    for m in w.m_range() {
        let rec = boundary_path(w, m)?;
        match rec.end {
            PathEnd::Good { m: m2 } => {
                bm.phi.insert(m, m2);
            }
            PathEnd::Truncated { .. } => bm.truncated.push(m),
        }
        paths.push(rec);
    }
    Ok((bm, paths))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaCirc {
    pub vertices: Vec<i64>,
    pub terminal: Terminal,
    pub closed: bool,
    /// Boundary indices `k` with `J_k` on the path, split by sign.
    pub negative_hits: usize,
    pub positive_hits: usize,
}

/// The path from 0 in a pointed window, upper arc first.
pub fn trace_gamma_circ(w: &HalfPlaneWindow) -> Result<GammaCirc> {
    if w.construction != Construction::Pointed {
        return Err(Error::Domain("gamma-circ needs a pointed window".into()));
    }
    let (vertices, terminal, closed) = follow(&w.system, 0, Side::Upper);
    let mut negative_hits = 0;
    let mut positive_hits = 0;
    for &v in &vertices {
        match w.j_index(v) {
            Some(k) if k < 0 => negative_hits += 1,
            Some(k) if k > 0 => positive_hits += 1,
            _ => {}
        }
    }
    Ok(GammaCirc { vertices, terminal, closed, negative_hits, positive_hits })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocks {
    /// Positive `x` where `L` on `[0, x]` has its unique minimum at `x`.
    pub upper_blocks: Vec<i64>,
    /// Even upper blocks with `|R|_x = 0`.
    pub blocks: Vec<i64>,
}

impl Blocks {
    /// Number of upper blocks in `[1, x]`.
    pub fn upper_blocks_up_to(&self, x: i64) -> usize {
        self.upper_blocks.partition_point(|&b| b <= x)
    }
}

pub fn find_blocks(upper: &Walk, lower: &Walk) -> Result<Blocks> {
    check_window(upper, lower)?;
    let mut running = 0i64;
    let mut upper_blocks = Vec::new();
    let mut blocks = Vec::new();
    for x in 1..=upper.end_index() {
        let l = upper.at(x);
        if l < running {
            running = l;
            upper_blocks.push(x);
            if x % 2 == 0 && lower.at(x) == 0 {
                blocks.push(x);
            }
        }
    }
    Ok(Blocks { upper_blocks, blocks })
}

/// Run-length encoded steps of a walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLength {
    pub start_index: i64,
    pub start_value: i64,
    /// `(step, count)` runs.
    pub runs: Vec<(i64, u64)>,
}

impl RunLength {
    pub fn encode(w: &Walk) -> Self {
        let mut runs: Vec<(i64, u64)> = Vec::new();
        for s in w.values.windows(2).map(|p| p[1] - p[0]) {
            match runs.last_mut() {
                Some((t, c)) if *t == s => *c += 1,
                _ => runs.push((s, 1)),
            }
        }
        RunLength { start_index: w.start_index, start_value: w.values[0], runs }
    }

    pub fn decode(&self, kind: crate::walk::WalkKind) -> Walk {
        let mut values = vec![self.start_value];
        for &(s, c) in &self.runs {
            for _ in 0..c {
                let v = *values.last().unwrap() + s;
                values.push(v);
            }
        }
        Walk::new(self.start_index, values, kind)
    }
}

/// JSON dump of a half-plane window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowDump {
    pub construction: Construction,
    pub upper_walk: RunLength,
    pub lower_walk: RunLength,
    pub boundary: Vec<i64>,
    pub j0_index: usize,
    pub good: Vec<i64>,
    pub h0_index: i64,
    pub matching: Option<BoundaryMatching>,
    pub paths: Vec<PathRecord>,
    pub gamma_circ: Option<GammaCirc>,
}

impl WindowDump {
    pub fn new(
        w: &HalfPlaneWindow,
        matching: Option<BoundaryMatching>,
        paths: Vec<PathRecord>,
        gamma_circ: Option<GammaCirc>,
    ) -> Self {
        WindowDump {
            construction: w.construction,
            upper_walk: RunLength::encode(&w.upper_walk),
            lower_walk: RunLength::encode(&w.lower_walk),
            boundary: w.boundary.clone(),
            j0_index: w.j0,
            good: w.good.clone(),
            h0_index: w.h0,
            matching,
            paths,
            gamma_circ,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use crate::sample::{sample_free, sample_two_sided};
    use crate::walk::{all_step_sequences, WalkKind};

    fn window(seed: u64, w: usize) -> (Walk, Walk) {
        sample_two_sided(w, 0.0, &mut trial_rng(seed, 0, 0))
    }

    #[test]
    fn nested_upper_arcs_from_peak_walk() {
        // L rises across the window then falls: all upper arcs nest.
        let l = Walk::new(-3, vec![-3, -2, -1, 0, -1, -2, -3], WalkKind::Free);
        let r = Walk::new(-3, vec![1, 0, 1, 0, 1, 0, 1], WalkKind::Free);
        let s = build_uims_window(&l, &r).unwrap();
        assert_eq!(s.upper.arcs(), vec![(-2, 3), (-1, 2), (0, 1)]);
    }

    #[test]
    fn finite_system_reproduced_by_excursion_window() {
        for w in crate::walk::enumerate_excursions(4).unwrap() {
            let mut ext = vec![1];
            ext.extend(w.values.iter().copied());
            let l = Walk::new(-1, ext.clone(), WalkKind::Free);
            let s = build_uims_window(&l, &l).unwrap();
            let finite = crate::arcs::walk_to_arcs(&w, Side::Upper).unwrap();
            // Point 0 is a left stub; the rest is the finite diagram.
            assert_eq!(s.upper.partner[0], EXIT_LEFT);
            assert_eq!(s.upper.arcs(), finite.arcs());
        }
    }

    #[test]
    fn reflection_boundary_points() {
        for seed in 0..50 {
            let (l, r) = window(seed, 200);
            let w = build_uihpms_by_reflection(&l, &r).unwrap();
            assert_eq!(w.j(0), Some(0));
            assert_eq!(w.j(1), Some(1));
            assert_eq!(w.boundary, crossing_points(&r));
            assert!(w.system.lower.check_noncrossing());
            // No lower arc straddles a boundary point.
            for (a, b) in w.system.lower.arcs() {
                assert!(!w.boundary.iter().any(|&j| a < j && j < b));
            }
            // Consecutive boundary points (J_{2k-1}, J_{2k}) are joined.
            for k in w.j_range() {
                if k.rem_euclid(2) == 1 {
                    if let (Some(a), Some(b)) = (w.j(k), w.j(k + 1)) {
                        let s = w.system.slot(a).unwrap();
                        assert_eq!(w.system.lower.mate(s), w.system.slot(b));
                    }
                }
            }
        }
    }

    #[test]
    fn cutting_matches_cut_walk_exhaustively() {
        for len in 1..=12 {
            for steps in all_step_sequences(len) {
                let r = Walk::from_steps(&steps, WalkKind::Free);
                let d = crate::arcs::walk_to_arcs(&r, Side::Lower).unwrap();
                let cut = cut_lower(&d);
                let tilde = crate::arcs::walk_to_arcs(&cut_walk(&r), Side::Lower).unwrap();
                assert_eq!(cut, tilde, "steps {steps:?}");
                assert_eq!(unenclosed_points(&cut), crossing_points(&cut_walk(&r)));
            }
        }
    }

    #[test]
    fn cutting_leaves_clean_window_alone() {
        // Lower walk never below its value at 0 on the right and never
        // below it on the left: nothing straddles 1/2.
        let l = Walk::new(-2, vec![0, 1, 0, 1, 0], WalkKind::Free);
        let r = Walk::new(-2, vec![0, 1, 0, 1, 0], WalkKind::Free);
        let s = build_uims_window(&l, &r).unwrap();
        assert_eq!(cut_lower(&s.lower), s.lower);
    }

    #[test]
    fn both_constructions_have_j0_j1() {
        for seed in 0..50 {
            let (l, r) = window(seed, 100);
            let w = build_uihpms_by_cutting(&l, &r).unwrap();
            assert_eq!((w.j(0), w.j(1)), (Some(0), Some(1)));
            assert!(w.system.lower.check_noncrossing());
        }
    }

    #[test]
    fn pihpms_zero_unmatched_and_path_open() {
        for seed in 0..100 {
            let (l, r) = window(seed, 300);
            let uih = build_uihpms_by_reflection(&l, &r).unwrap();
            let w = build_pihpms(&l, &r).unwrap();
            let z = w.system.slot(0).unwrap();
            assert_eq!(w.system.lower.partner[z], UNMATCHED);
            assert!(w.system.lower.check_noncrossing());
            let g = trace_gamma_circ(&w).unwrap();
            assert!(!g.closed);
            assert_eq!(g.vertices[0], 0);
            assert_ne!(g.terminal.kind, TerminalKind::Unmatched);
            let mut seen = g.vertices.clone();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), g.vertices.len());
            // Away from the rewired arcs the diagrams agree.
            let rewired: std::collections::HashSet<i64> =
                w.j_range().filter(|&k| k <= 0).filter_map(|k| w.j(k)).collect();
            for i in 0..w.system.n_points() {
                if !rewired.contains(&w.system.position(i)) {
                    assert_eq!(w.system.lower.partner[i], uih.system.lower.partner[i]);
                }
            }
        }
    }

    #[test]
    fn coins_all_zero_change_nothing() {
        let (l, r) = window(3, 100);
        let mut w = build_uihpms_by_reflection(&l, &r).unwrap();
        let ks = w.j_range();
        let coins = ((*ks.start() - 1) / 2..=*ks.end() / 2 + 1).map(|k| (k, false)).collect();
        apply_coins(&mut w, coins);
        assert!(w.good.is_empty());
        assert_eq!(w.cut.as_ref().unwrap(), &w.system);
    }

    #[test]
    fn boundary_matching_involution_noncrossing() {
        for seed in 0..100 {
            let (l, r) = window(seed, 500);
            let mut w = build_uihpms_by_reflection(&l, &r).unwrap();
            good_boundary_points(&mut w, &mut trial_rng(seed, 1, 0));
            assert!(w.good.iter().all(|g| w.boundary.binary_search(g).is_ok()));
            if let (Some(a), Some(b)) = (w.h(0), w.h(1)) {
                assert!(a <= 0 && 0 < b);
            }
            let (bm, paths) = boundary_matching(&w).unwrap();
            assert!(bm.is_involution(), "seed {seed}");
            assert!(bm.is_noncrossing(), "seed {seed}");
            for p in &paths {
                if let PathEnd::Good { m: m2 } = p.end {
                    let back = paths.iter().find(|q| q.start == m2).unwrap();
                    let mut rev = back.vertices.clone();
                    rev.reverse();
                    assert_eq!(rev, p.vertices);
                }
            }
        }
    }

    #[test]
    fn direct_upper_arc_between_good_points() {
        // Upper arc (1, 2); |R| = 1,0,1,0,1 on times -1..3.
        let l = Walk::new(-1, vec![1, 0, 1, 0, 1], WalkKind::Free);
        let r = Walk::new(-1, vec![1, 0, 1, 0, -1], WalkKind::Free);
        let mut w = build_uihpms_by_reflection(&l, &r).unwrap();
        assert_eq!(w.boundary, vec![0, 1, 2, 3]);
        apply_coins(&mut w, vec![(0, false), (1, true), (2, false)]);
        assert_eq!(w.good, vec![1, 2]);
        assert_eq!(w.h0, -1);
        let p = boundary_path(&w, 1).unwrap();
        assert_eq!(p.vertices, vec![1, 2]);
        assert_eq!(p.end, PathEnd::Good { m: 2 });
    }

    #[test]
    fn exposed_scan() {
        let mut bm = BoundaryMatching::default();
        for (a, b) in [(0, 3), (1, 2), (4, 5)] {
            bm.phi.insert(a, b);
            bm.phi.insert(b, a);
        }
        assert!(bm.is_involution() && bm.is_noncrossing());
        assert_eq!(bm.exposed(), vec![4]);
        bm.phi.insert(6, 8);
        assert!(!bm.is_involution());
    }

    #[test]
    fn blocks_by_definition() {
        let l = Walk::new(-1, vec![1, 0, -1, -2, -3, -4], WalkKind::Free);
        let r = Walk::new(-1, vec![1, 0, 1, 0, 1, 0], WalkKind::Free);
        let b = find_blocks(&l, &r).unwrap();
        assert_eq!(b.upper_blocks, vec![1, 2, 3, 4]);
        assert_eq!(b.blocks, vec![2, 4]);
        let l = Walk::new(-1, vec![1, 0, -1, 0, -1], WalkKind::Free);
        let r = Walk::new(-1, vec![1, 0, 1, 0, 1], WalkKind::Free);
        let b = find_blocks(&l, &r).unwrap();
        assert_eq!(b.upper_blocks, vec![1]);
        assert_eq!(b.upper_blocks_up_to(3), 1);
    }

    #[test]
    fn run_length_round_trip() {
        let w = sample_free(100, &mut trial_rng(1, 0, 0));
        assert_eq!(RunLength::encode(&w).decode(WalkKind::Free), w);
    }
}
