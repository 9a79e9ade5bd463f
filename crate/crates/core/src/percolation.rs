//! Percolation view of a meandric system.
//!
//! A perfect matching of `{1..2n}` determines two non-crossing partitions:
//! one of the orange half-integers `2k - 1/2` (`k = 1..n`) and one of the
//! green half-integers `2k + 1/2` (`k = 0..n`). Two points share a block iff
//! no arc separates them; in walk terms, iff the walk takes the same value
//! at their times and never goes below it in between. Arcs of the system
//! become orange and green edges; boxes and their crossings live here too.

use serde::{Deserialize, Serialize};

use crate::arcs::{arcs_to_walk, walk_to_arcs_unchecked, ArcDiagram, Side, EXIT_LEFT, EXIT_RIGHT, UNMATCHED};
use crate::error::{Error, Result};
use crate::system::MeandricSystem;
use crate::walk::{Walk, WalkKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    /// Orange points `2k - 1/2`, `k = 1..=n`, at walk times `2k - 1`.
    MinusHalf,
    /// Green points `2k + 1/2`, `k = 0..=n`, at walk times `2k`.
    PlusHalf,
}

impl Grid {
    fn len(self, n: usize) -> usize {
        match self {
            Grid::MinusHalf => n,
            Grid::PlusHalf => n + 1,
        }
    }

    /// Walk time of point `k`.
    fn time(self, k: usize) -> usize {
        match self {
            Grid::MinusHalf => 2 * k + 1,
            Grid::PlusHalf => 2 * k,
        }
    }

    /// Half-integer coordinate of point `k` (0-based).
    pub fn coordinate(self, k: usize) -> f64 {
        self.time(k) as f64 + 0.5
    }
}

/// Partition of the points of a grid; blocks are numbered by first element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NonCrossingPartition {
    pub grid: Grid,
    /// Matching size.
    pub n: usize,
    pub block_id: Vec<u32>,
}

impl NonCrossingPartition {
    /// From arbitrary labels; relabels blocks by first appearance.
    pub fn from_labels(grid: Grid, n: usize, labels: &[u32]) -> Result<Self> {
        if labels.len() != grid.len(n) {
            return Err(Error::Domain(format!("expected {} labels, got {}", grid.len(n), labels.len())));
        }
        let mut map = std::collections::HashMap::new();
        let block_id = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Ok(NonCrossingPartition { grid, n, block_id })
    }

    pub fn n_blocks(&self) -> usize {
        self.block_id.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_blocks()];
        for (k, &b) in self.block_id.iter().enumerate() {
            out[b as usize].push(k);
        }
        out
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let mut last = vec![0usize; self.n_blocks()];
        for (k, &b) in self.block_id.iter().enumerate() {
            last[b as usize] = k;
        }
        let mut seen = vec![false; self.n_blocks()];
        let mut stack: Vec<u32> = Vec::new();
        for (k, &b) in self.block_id.iter().enumerate() {
            if seen[b as usize] {
                if stack.last() != Some(&b) {
                    return false;
                }
            } else {
                seen[b as usize] = true;
                stack.push(b);
            }
            if last[b as usize] == k {
                stack.pop();
            }
        }
        true
    }
}

/// Equivalence classes of "not separated by an arc" on the chosen grid.
pub fn matching_to_partition(m: &ArcDiagram, grid: Grid) -> Result<NonCrossingPartition> {
    let walk = arcs_to_walk(m)?;
    if walk.kind != WalkKind::Excursion {
        return Err(Error::Domain("matching of 1..2n expected".into()));
    }
    let n = m.n_points() / 2;
    let want = grid.len(n);
    // open[h]: block of the latest grid point at height h not yet cut off
    // by a lower value.
    let mut open: Vec<Option<u32>> = Vec::new();
    let mut block_id = Vec::with_capacity(want);
    let mut n_blocks = 0u32;
    let mut k = 0;
    for (t, &v) in walk.values.iter().enumerate() {
        let h = v as usize;
        open.truncate(h + 1);
        if open.len() <= h {
            open.resize(h + 1, None);
        }
        if k < want && grid.time(k) == t {
            let b = *open[h].get_or_insert_with(|| {
                n_blocks += 1;
                n_blocks - 1
            });
            block_id.push(b);
            k += 1;
        }
    }
    Ok(NonCrossingPartition { grid, n, block_id })
}

/// The unique matching whose non-separation classes are `pi`.
///
/// Walk reconstruction: the step arriving at a grid point is up iff the
/// point opens its block, and the step leaving it is down iff the point
/// closes its block.
pub fn partition_to_matching(pi: &NonCrossingPartition) -> Result<ArcDiagram> {
    if pi.block_id.len() != pi.grid.len(pi.n) {
        return Err(Error::Domain("partition size does not match its grid".into()));
    }
    if !pi.is_noncrossing() {
        return Err(Error::Domain("partition is crossing".into()));
    }
    let nb = pi.n_blocks();
    let mut first = vec![usize::MAX; nb];
    let mut last = vec![0usize; nb];
    for (k, &b) in pi.block_id.iter().enumerate() {
        first[b as usize] = first[b as usize].min(k);
        last[b as usize] = k;
    }
    let len = 2 * pi.n;
    let mut steps = vec![0i8; len];
    for (k, &b) in pi.block_id.iter().enumerate() {
        let t = pi.grid.time(k);
        if t >= 1 {
            steps[t - 1] = if first[b as usize] == k { 1 } else { -1 };
        }
        if t < len {
            steps[t] = if last[b as usize] == k { -1 } else { 1 };
        }
    }
    let walk = Walk::from_steps(&steps, WalkKind::Excursion);
    if walk.validate().is_err() {
        return Err(Error::Domain("partition does not come from a matching".into()));
    }
    let m = walk_to_arcs_unchecked(&walk, Side::Upper);
    if matching_to_partition(&m, pi.grid)?.block_id != pi.block_id {
        return Err(Error::Domain("partition does not come from a matching".into()));
    }
    Ok(m)
}

/// Coordinates are doubled so that integers and half-integers are both
/// integral: position `p` maps to `2p`, half-integer `h` to `2h`.
const NEG_INF: i64 = i64::MIN;
const POS_INF: i64 = i64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Edge {
    u: i64,
    v: i64,
    top: bool,
    orange: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Line {
    at: i64,
    top: bool,
}

fn touches(e: &Edge, l: Line) -> bool {
    e.u == l.at || e.v == l.at || (e.top == l.top && e.u <= l.at && l.at <= e.v)
}

/// Path of edges from one that touches `start` to one that touches `end`,
/// consecutive edges sharing a vertex in `[lo, hi]`, all but the first and
/// last with both ends in `[lo, hi]`.
fn crossing(edges: &[Edge], lo: i64, hi: i64, start: Line, end: Line) -> bool {
    let inside = |p: i64| lo <= p && p <= hi;
    let mut by_vertex: std::collections::HashMap<i64, Vec<usize>> = std::collections::HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        for p in [e.u, e.v] {
            if inside(p) {
                by_vertex.entry(p).or_default().push(i);
            }
        }
    }
    let mut seen = vec![false; edges.len()];
    let mut queue: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for (i, e) in edges.iter().enumerate() {
        if touches(e, start) {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let e = edges[i];
        if touches(&e, end) {
            return true;
        }
        for p in [e.u, e.v] {
            let Some(incident) = by_vertex.get(&p) else { continue };
            for &f in incident {
                if seen[f] {
                    continue;
                }
                let fe = edges[f];
                if touches(&fe, end) {
                    return true;
                }
                if inside(fe.u) && inside(fe.v) {
                    seen[f] = true;
                    queue.push_back(f);
                }
            }
        }
    }
    false
}

/// Box of size `n` rooted at `j0 - 1/2`: vertices in `[j0 - 1/2, j0 + 2n - 3/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub j0: i64,
    pub n: usize,
}

impl BoxSpec {
    pub fn root(&self) -> f64 {
        self.j0 as f64 - 0.5
    }

    /// Doubled coordinates of the left and right box lines.
    fn lines(&self) -> (i64, i64) {
        let left = 2 * self.j0 - 1;
        (left, left + 2 * (2 * self.n as i64 - 1))
    }

    /// Orange and green vertex counts.
    pub fn color_counts(&self) -> (usize, usize) {
        let (lo, hi) = self.lines();
        let mut counts = (0, 0);
        for c in (lo..=hi).step_by(2) {
            // Half-integer c/2 is orange iff c/2 + 1/2 is even.
            if ((c + 1) / 2).rem_euclid(2) == 0 {
                counts.0 += 1;
            } else {
                counts.1 += 1;
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxOutcome {
    OrangeTopToBottom,
    GreenBottomToTop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCrossing {
    pub orange_top_to_bottom: bool,
    pub green_bottom_to_top: bool,
}

impl BoxCrossing {
    /// The event that occurred; an error if both or neither did.
    pub fn outcome(&self) -> Result<BoxOutcome> {
        match (self.orange_top_to_bottom, self.green_bottom_to_top) {
            (true, false) => Ok(BoxOutcome::OrangeTopToBottom),
            (false, true) => Ok(BoxOutcome::GreenBottomToTop),
            (o, g) => Err(Error::Falsified(format!("orange={o} green={g}"))),
        }
    }
}

/// Arcs with an endpoint among positions `[lo, hi]`, each once, in doubled
/// coordinates of their points: `(2a, 2b, top)` with infinite ends for stubs.
fn arcs_near(sys: &MeandricSystem, lo: i64, hi: i64) -> Result<Vec<(i64, i64, bool)>> {
    if sys.slot(lo).is_none() || sys.slot(hi).is_none() {
        return Err(Error::Window(format!("positions [{lo}, {hi}] not inside the window")));
    }
    let mut out = Vec::new();
    for pos in lo..=hi {
        let s = sys.slot(pos).unwrap();
        for side in [Side::Upper, Side::Lower] {
            let top = side == Side::Upper;
            match sys.partner(s, side) {
                UNMATCHED => {}
                EXIT_RIGHT => out.push((2 * pos, POS_INF, top)),
                EXIT_LEFT => out.push((NEG_INF, 2 * pos, top)),
                q => {
                    let qp = sys.position(q as usize);
                    if qp > pos || qp < lo {
                        out.push((2 * pos.min(qp), 2 * pos.max(qp), top));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Orange/green edge of an arc: it joins the half-integers just outside the
/// arc's feet; orange iff the left foot is even.
fn colored(a2: i64, b2: i64, top: bool) -> Edge {
    let u = if a2 == NEG_INF { NEG_INF } else { a2 - 1 };
    let v = if b2 == POS_INF { POS_INF } else { b2 + 1 };
    let orange = if a2 != NEG_INF { (a2 / 2).rem_euclid(2) == 0 } else { (b2 / 2).rem_euclid(2) == 1 };
    Edge { u, v, top, orange }
}

/// Orange top-to-bottom and green bottom-to-top crossings of a box. Exactly
/// one of them occurs.
pub fn box_crossing(sys: &MeandricSystem, b: BoxSpec) -> Result<BoxCrossing> {
    let (lo, hi) = b.lines();
    let arcs = arcs_near(sys, b.j0 - 1, b.j0 + 2 * b.n as i64 - 1)?;
    let in_box = |p: i64| lo <= p && p <= hi;
    let mut orange = Vec::new();
    let mut green = Vec::new();
    for (a2, b2, top) in arcs {
        let e = colored(a2, b2, top);
        if in_box(e.u) || in_box(e.v) {
            if e.orange { orange.push(e) } else { green.push(e) }
        }
    }
    let tl = Line { at: lo, top: true };
    let bl = Line { at: lo, top: false };
    let tr = Line { at: hi, top: true };
    let br = Line { at: hi, top: false };
    Ok(BoxCrossing {
        orange_top_to_bottom: crossing(&orange, lo, hi, tl, br),
        green_bottom_to_top: crossing(&green, lo, hi, bl, tr),
    })
}

/// Top-to-bottom crossing of the box by arcs of the system (loop strands).
pub fn loop_box_crossing(sys: &MeandricSystem, b: BoxSpec) -> Result<bool> {
    let (lo, hi) = b.lines();
    let arcs = arcs_near(sys, b.j0, b.j0 + 2 * b.n as i64 - 2)?;
    let edges: Vec<Edge> = arcs
        .into_iter()
        .map(|(u, v, top)| Edge { u, v, top, orange: false })
        .filter(|e| (lo <= e.u && e.u <= hi) || (lo <= e.v && e.v <= hi))
        .collect();
    Ok(crossing(&edges, lo, hi, Line { at: lo, top: true }, Line { at: hi, top: false }))
}

/// Swap the upper and lower diagrams and shift every point right by one.
/// Orange edges become green ones, so a box at `j0` maps to one at `j0 + 1`
/// with the two events exchanged.
pub fn color_swap(sys: &MeandricSystem) -> MeandricSystem {
    let mut s = sys.clone();
    std::mem::swap(&mut s.upper, &mut s.lower);
    s.upper.side = Side::Upper;
    s.lower.side = Side::Lower;
    s.upper.offset += 1;
    s.lower.offset += 1;
    s
}

/// A matching together with its orange and green partitions; any one of
/// the three determines the other two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub matching: ArcDiagram,
    pub orange: NonCrossingPartition,
    pub green: NonCrossingPartition,
}

impl Triple {
    pub fn from_matching(m: &ArcDiagram) -> Result<Self> {
        Ok(Triple {
            matching: m.clone(),
            orange: matching_to_partition(m, Grid::MinusHalf)?,
            green: matching_to_partition(m, Grid::PlusHalf)?,
        })
    }

    /// From either partition; the grid says which one it is.
    pub fn from_partition(pi: &NonCrossingPartition) -> Result<Self> {
        Triple::from_matching(&partition_to_matching(pi)?)
    }
}
