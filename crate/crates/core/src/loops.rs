//! Loop decomposition and per-system observables.

use serde::{Deserialize, Serialize};

use crate::arcs::{is_sentinel, Side, EXIT_LEFT, EXIT_RIGHT, UNMATCHED};
use crate::error::{Error, Result};
use crate::system::MeandricSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalKind {
    Unmatched,
    ExitLeft,
    ExitRight,
}

impl TerminalKind {
    fn from_sentinel(p: u32) -> TerminalKind {
        match p {
            UNMATCHED => TerminalKind::Unmatched,
            EXIT_LEFT => TerminalKind::ExitLeft,
            EXIT_RIGHT => TerminalKind::ExitRight,
            _ => unreachable!("not a sentinel"),
        }
    }
}

/// Where an open path stops: the missing arc's kind and side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminal {
    pub kind: TerminalKind,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenPath {
    /// Slots in traversal order.
    pub vertices: Vec<u32>,
    pub start: Terminal,
    pub end: Terminal,
}

impl OpenPath {
    pub fn exits_window(&self) -> bool {
        self.start.kind != TerminalKind::Unmatched || self.end.kind != TerminalKind::Unmatched
    }
}

const OPEN_FLAG: u32 = 1 << 31;

/// Loops and open paths of a system. Vertices are slots (position minus
/// the system offset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopDecomposition {
    /// Per slot: loop index, or `OPEN_FLAG | path index`.
    owner: Vec<u32>,
    loop_vertices: Vec<u32>,
    loop_starts: Vec<usize>,
    pub open_paths: Vec<OpenPath>,
    /// Loop indices by size descending, ties by smallest vertex.
    pub ranked: Vec<usize>,
}

/// Follow arcs from `start`, leaving first through `leave`, until a missing
/// arc is hit or `start` is reached again. Returns the last side tried.
fn trace(sys: &MeandricSystem, start: usize, mut leave: Side, out: &mut Vec<u32>) -> (Side, u32) {
    let mut cur = start;
    loop {
        out.push(cur as u32);
        let p = sys.partner(cur, leave);
        if is_sentinel(p) || p as usize == start {
            return (leave, p);
        }
        cur = p as usize;
        leave = leave.other();
    }
}

pub fn decompose(sys: &MeandricSystem) -> LoopDecomposition {
    let n = sys.n_points();
    let mut owner = vec![u32::MAX; n];
    let mut open_paths = Vec::new();
    let mut buf = Vec::new();
    for v in 0..n {
        if owner[v] != u32::MAX {
            continue;
        }
        let up = sys.partner(v, Side::Upper);
        let low = sys.partner(v, Side::Lower);
        if !is_sentinel(up) && !is_sentinel(low) {
            continue;
        }
        let (start_side, leave) = if is_sentinel(low) { (Side::Lower, Side::Upper) } else { (Side::Upper, Side::Lower) };
        buf.clear();
        let (end_side, p) = trace(sys, v, leave, &mut buf);
        let id = OPEN_FLAG | open_paths.len() as u32;
        for &u in &buf {
            owner[u as usize] = id;
        }
        open_paths.push(OpenPath {
            vertices: buf.clone(),
            start: Terminal { kind: TerminalKind::from_sentinel(sys.partner(v, start_side)), side: start_side },
            end: Terminal { kind: TerminalKind::from_sentinel(p), side: end_side },
        });
    }
    let mut loop_vertices = Vec::new();
    let mut loop_starts = vec![0];
    for v in 0..n {
        if owner[v] != u32::MAX {
            continue;
        }
        let id = (loop_starts.len() - 1) as u32;
        let before = loop_vertices.len();
        trace(sys, v, Side::Upper, &mut loop_vertices);
        for &u in &loop_vertices[before..] {
            owner[u as usize] = id;
        }
        loop_starts.push(loop_vertices.len());
    }
    let n_loops = loop_starts.len() - 1;
    let mut ranked: Vec<usize> = (0..n_loops).collect();
    // Loops are discovered in order of their smallest vertex, so a stable
    // sort by size gives the tie-break for free.
    ranked.sort_by_key(|&i| std::cmp::Reverse(loop_starts[i + 1] - loop_starts[i]));
    LoopDecomposition { owner, loop_vertices, loop_starts, open_paths, ranked }
}

impl LoopDecomposition {
    pub fn n_loops(&self) -> usize {
        self.loop_starts.len() - 1
    }

    /// Slots of loop `i` in traversal order, starting at its smallest slot
    /// and leaving through the upper arc.
    pub fn loop_slots(&self, i: usize) -> &[u32] {
        &self.loop_vertices[self.loop_starts[i]..self.loop_starts[i + 1]]
    }

    pub fn loop_len(&self, i: usize) -> usize {
        self.loop_starts[i + 1] - self.loop_starts[i]
    }

    /// Loop index of a slot, `None` for slots on open paths.
    pub fn loop_of(&self, slot: usize) -> Option<usize> {
        let o = self.owner[slot];
        (o & OPEN_FLAG == 0).then_some(o as usize)
    }

    pub fn path_of(&self, slot: usize) -> Option<usize> {
        let o = self.owner[slot];
        (o & OPEN_FLAG != 0).then_some((o & !OPEN_FLAG) as usize)
    }

    /// Loop index with rank `k` (1-based).
    pub fn ranked_loop(&self, k: usize) -> Option<usize> {
        k.checked_sub(1).and_then(|i| self.ranked.get(i)).copied()
    }

    /// Rank (1-based) of every loop.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.n_loops()];
        for (k, &i) in self.ranked.iter().enumerate() {
            r[i] = k + 1;
        }
        r
    }

    /// Vertex count of the rank-`k` loop, 0 if there are fewer than `k`.
    pub fn kth_largest_loop_size(&self, k: usize) -> usize {
        self.ranked_loop(k).map_or(0, |i| self.loop_len(i))
    }

    pub fn n_points(&self) -> usize {
        self.owner.len()
    }
}

/// Number of arcs `(a, b)` of the largest loop with `a < x < b`, counting
/// both sides; `x` is a position.
pub fn crossing_count(sys: &MeandricSystem, decomp: &LoopDecomposition, x: i64) -> usize {
    let Some(l) = decomp.ranked_loop(1) else { return 0 };
    loop_crossings(sys, decomp.loop_slots(l), x)
}

/// Arcs of a vertex set strictly straddling position `x`.
pub fn loop_crossings(sys: &MeandricSystem, slots: &[u32], x: i64) -> usize {
    let mut count = 0;
    for &v in slots {
        let a = sys.position(v as usize);
        if a >= x {
            continue;
        }
        for side in [Side::Upper, Side::Lower] {
            let p = sys.partner(v as usize, side);
            if !is_sentinel(p) && sys.position(p as usize) > x {
                count += 1;
            }
        }
    }
    count
}

/// Whether the vertex set separates the half-integers `x - 1/2` and
/// `y - 1/2`: it meets an odd number of integers in `[min, max - 1]`.
pub fn separates(sys: &MeandricSystem, slots: &[u32], x: i64, y: i64) -> bool {
    let (lo, hi) = (x.min(y), x.max(y) - 1);
    slots
        .iter()
        .filter(|&&v| (lo..=hi).contains(&sys.position(v as usize)))
        .count()
        % 2
        == 1
}

/// A loop separating `x - 1/2` from `y - 1/2` for even `x` and odd `y`.
pub fn parity_separation_witness(
    sys: &MeandricSystem,
    decomp: &LoopDecomposition,
    x: i64,
    y: i64,
) -> Result<usize> {
    if x.rem_euclid(2) != 0 || y.rem_euclid(2) != 1 {
        return Err(Error::Domain(format!("need even x and odd y, got ({x}, {y})")));
    }
    if sys.slot(x).is_none() || sys.slot(y).is_none() {
        return Err(Error::Domain(format!("({x}, {y}) outside the system")));
    }
    (0..decomp.n_loops())
        .find(|&i| separates(sys, decomp.loop_slots(i), x, y))
        .ok_or_else(|| Error::Falsified(format!("no loop separates {x}-1/2 from {y}-1/2")))
}

/// Whether some closed loop lies in `[outer_lo, outer_hi]`, avoids
/// `[lo, hi]` and surrounds it (odd number of vertices right of `hi`).
pub fn disconnects_interval(
    sys: &MeandricSystem,
    decomp: &LoopDecomposition,
    lo: i64,
    hi: i64,
    outer_lo: i64,
    outer_hi: i64,
) -> Result<bool> {
    if !(outer_lo < lo && lo <= hi && hi < outer_hi) {
        return Err(Error::Domain("need outer_lo < lo <= hi < outer_hi".into()));
    }
    let first = sys.position(0);
    let last = sys.position(sys.n_points() - 1);
    if first > outer_lo || last < outer_hi {
        return Err(Error::Window(format!("window [{first}, {last}] does not cover [{outer_lo}, {outer_hi}]")));
    }
    Ok((0..decomp.n_loops()).any(|i| {
        let mut right = 0usize;
        for &v in decomp.loop_slots(i) {
            let p = sys.position(v as usize);
            if p < outer_lo || p > outer_hi || (lo..=hi).contains(&p) {
                return false;
            }
            right += (p > hi) as usize;
        }
        right % 2 == 1
    }))
}

/// [`disconnects_interval`] for `[-n, n]` inside `[-outer, outer]`.
pub fn has_disconnecting_loop(
    sys: &MeandricSystem,
    decomp: &LoopDecomposition,
    n: i64,
    outer: i64,
) -> Result<bool> {
    disconnects_interval(sys, decomp, -n, n, -outer, outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::ArcDiagram;
    use crate::system::{enumerate_systems, Variant};

    fn sys(n: usize, up: &[(i64, i64)], low: &[(i64, i64)]) -> MeandricSystem {
        MeandricSystem::new(
            ArcDiagram::from_pairs(2 * n, 1, Side::Upper, up).unwrap(),
            ArcDiagram::from_pairs(2 * n, 1, Side::Lower, low).unwrap(),
            Variant::Finite,
        )
        .unwrap()
    }

    #[test]
    fn size_one() {
        let s = sys(1, &[(1, 2)], &[(1, 2)]);
        let d = decompose(&s);
        assert_eq!(d.n_loops(), 1);
        assert_eq!(d.kth_largest_loop_size(1), 2);
        assert_eq!(d.kth_largest_loop_size(2), 0);
        assert_eq!(crossing_count(&s, &d, 1), 0);
    }

    #[test]
    fn single_loop_trace() {
        let s = sys(2, &[(1, 2), (3, 4)], &[(1, 4), (2, 3)]);
        let d = decompose(&s);
        assert_eq!(d.n_loops(), 1);
        let pos: Vec<i64> = d.loop_slots(0).iter().map(|&v| s.position(v as usize)).collect();
        assert_eq!(pos, vec![1, 2, 3, 4]);
    }

    #[test]
    fn nested_loops_cross_and_witness() {
        let s = sys(2, &[(1, 4), (2, 3)], &[(1, 4), (2, 3)]);
        let d = decompose(&s);
        assert_eq!(d.n_loops(), 2);
        // Equal sizes: the loop through 1 ranks first.
        let l1 = d.ranked_loop(1).unwrap();
        assert_eq!(s.position(d.loop_slots(l1)[0] as usize), 1);
        assert_eq!(crossing_count(&s, &d, 2), 2);
        let w = parity_separation_witness(&s, &d, 2, 3).unwrap();
        let pos: Vec<i64> = d.loop_slots(w).iter().map(|&v| s.position(v as usize)).collect();
        assert_eq!(pos, vec![2, 3]);
        assert!(parity_separation_witness(&s, &d, 2, 4).is_err());
    }

    #[test]
    fn loop_count_distribution_size_two() {
        let mut hist = [0usize; 3];
        for s in enumerate_systems(2).unwrap() {
            hist[decompose(&s).n_loops()] += 1;
        }
        assert_eq!(hist, [0, 2, 2]);
    }

    #[test]
    fn open_paths_carry_terminals() {
        // Upper: (1,2) and a stub at 3; lower: 1 unmatched, (2,3).
        let mut up = ArcDiagram::from_pairs(3, 1, Side::Upper, &[(1, 2)]).unwrap();
        up.partner[2] = EXIT_RIGHT;
        let low = ArcDiagram::from_pairs(3, 1, Side::Lower, &[(2, 3)]).unwrap();
        let s = MeandricSystem::new(up, low, Variant::UimsWindow).unwrap();
        let d = decompose(&s);
        assert_eq!(d.n_loops(), 0);
        assert_eq!(d.open_paths.len(), 1);
        let p = &d.open_paths[0];
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.start, Terminal { kind: TerminalKind::Unmatched, side: Side::Lower });
        assert_eq!(p.end, Terminal { kind: TerminalKind::ExitRight, side: Side::Upper });
        assert!(p.exits_window());
    }

    #[test]
    fn disconnection_examples() {
        // Window [-3, 3]: the loop through -2 and 2 surrounds [-1, 1].
        let pairs = [(-2, 2), (-1, 0), (1, 3)];
        let up = ArcDiagram::from_pairs(7, -3, Side::Upper, &pairs).unwrap();
        let low = ArcDiagram::from_pairs(7, -3, Side::Lower, &pairs).unwrap();
        let s = MeandricSystem::new(up, low, Variant::UimsWindow).unwrap();
        let d = decompose(&s);
        assert_eq!(has_disconnecting_loop(&s, &d, 1, 2), Ok(true));
        assert!(matches!(has_disconnecting_loop(&s, &d, 1, 5), Err(Error::Window(_))));
        // Side-by-side loops {1,2}, {3,4} never surround {2,3}.
        let s = sys(2, &[(1, 2), (3, 4)], &[(1, 2), (3, 4)]);
        let d = decompose(&s);
        assert_eq!(disconnects_interval(&s, &d, 2, 3, 1, 4), Ok(false));
    }
}
