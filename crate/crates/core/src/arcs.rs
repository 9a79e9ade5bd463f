//! Non-crossing arc diagrams and their walk encoding.
//!
//! A diagram covers consecutive integer positions `offset .. offset + len`.
//! `partner[i]` is the slot of the point matched to slot `i`, or one of the
//! sentinels below.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::{Walk, WalkKind};

/// Point with no arc on this side (boundary point).
pub const UNMATCHED: u32 = u32::MAX;
/// Arc whose other end lies left of the window.
pub const EXIT_LEFT: u32 = u32::MAX - 1;
/// Arc whose other end lies right of the window.
pub const EXIT_RIGHT: u32 = u32::MAX - 2;

pub fn is_sentinel(p: u32) -> bool {
    p >= EXIT_RIGHT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDiagram {
    /// Position of slot 0.
    pub offset: i64,
    pub partner: Vec<u32>,
    pub side: Side,
}

impl ArcDiagram {
    /// Diagram over `n_points` positions starting at `offset` with no arcs.
    pub fn empty(n_points: usize, offset: i64, side: Side) -> Self {
        ArcDiagram { offset, partner: vec![UNMATCHED; n_points], side }
    }

    /// Build from position pairs; positions not mentioned stay unmatched.
    pub fn from_pairs(n_points: usize, offset: i64, side: Side, pairs: &[(i64, i64)]) -> Result<Self> {
        let mut d = ArcDiagram::empty(n_points, offset, side);
        for &(a, b) in pairs {
            let (i, j) = match (d.slot(a), d.slot(b)) {
                (Some(i), Some(j)) if i != j => (i, j),
                _ => return Err(Error::Domain(format!("bad pair ({a},{b})"))),
            };
            if d.partner[i] != UNMATCHED || d.partner[j] != UNMATCHED {
                return Err(Error::Domain(format!("point reused in ({a},{b})")));
            }
            d.partner[i] = j as u32;
            d.partner[j] = i as u32;
        }
        Ok(d)
    }

    pub fn n_points(&self) -> usize {
        self.partner.len()
    }

    pub fn position(&self, slot: usize) -> i64 {
        self.offset + slot as i64
    }

    pub fn slot(&self, pos: i64) -> Option<usize> {
        let i = pos - self.offset;
        (i >= 0 && (i as usize) < self.partner.len()).then_some(i as usize)
    }

    /// Matched partner slot, if the partner is inside the diagram.
    pub fn mate(&self, slot: usize) -> Option<usize> {
        let p = self.partner[slot];
        (!is_sentinel(p)).then_some(p as usize)
    }

    pub fn is_fully_matched(&self) -> bool {
        self.partner.iter().all(|&p| !is_sentinel(p))
    }

    /// Arcs with both ends inside, as position pairs `(a, b)` with `a < b`.
    pub fn arcs(&self) -> Vec<(i64, i64)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(i, &p)| !is_sentinel(p) && (p as usize) > i)
            .map(|(i, &p)| (self.position(i), self.position(p as usize)))
            .collect()
    }

    pub fn unmatched_positions(&self) -> Vec<i64> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p == UNMATCHED)
            .map(|(i, _)| self.position(i))
            .collect()
    }

    /// Stack check of symmetry and planarity. Exit stubs are treated as arcs
    /// reaching past the window edge.
    pub fn check_noncrossing(&self) -> bool {
        const OPEN_RIGHT: usize = usize::MAX;
        let mut stack: Vec<usize> = Vec::new();
        for (i, &p) in self.partner.iter().enumerate() {
            match p {
                UNMATCHED => {}
                EXIT_LEFT => {
                    if !stack.is_empty() {
                        return false;
                    }
                }
                EXIT_RIGHT => stack.push(OPEN_RIGHT),
                _ => {
                    let j = p as usize;
                    if j >= self.partner.len() || j == i || self.partner[j] != i as u32 {
                        return false;
                    }
                    if j > i {
                        stack.push(i);
                    } else if stack.pop() != Some(j) {
                        return false;
                    }
                }
            }
        }
        stack.iter().all(|&s| s == OPEN_RIGHT)
    }

    /// Write `index,partner,side` rows. Unmatched points are written as `-1`
    /// when every position is positive and as `none` otherwise; exit stubs as
    /// `exit_left` / `exit_right`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let positive = self.offset >= 1;
        writeln!(w, "index,partner,side")?;
        for (i, &p) in self.partner.iter().enumerate() {
            let partner = match p {
                UNMATCHED if positive => "-1".to_string(),
                UNMATCHED => "none".to_string(),
                EXIT_LEFT => "exit_left".to_string(),
                EXIT_RIGHT => "exit_right".to_string(),
                _ => self.position(p as usize).to_string(),
            };
            writeln!(w, "{},{},{}", self.position(i), partner, self.side.as_str())?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows: Vec<(i64, String, Side)> = Vec::new();
        for (k, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Domain(e.to_string()))?;
            if k == 0 || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 3 {
                return Err(Error::Domain(format!("row {k}: expected 3 fields")));
            }
            let pos = f[0].parse().map_err(|_| Error::Domain(format!("row {k}: bad index")))?;
            let side = match f[2] {
                "upper" => Side::Upper,
                "lower" => Side::Lower,
                s => return Err(Error::Domain(format!("row {k}: bad side {s}"))),
            };
            rows.push((pos, f[1].to_string(), side));
        }
        let Some(&(offset, _, side)) = rows.first() else {
            return Err(Error::Domain("empty diagram".into()));
        };
        let mut d = ArcDiagram::empty(rows.len(), offset, side);
        for (i, (pos, partner, _)) in rows.iter().enumerate() {
            if *pos != offset + i as i64 {
                return Err(Error::Domain(format!("positions not consecutive at {pos}")));
            }
            d.partner[i] = match partner.as_str() {
                "-1" if offset >= 1 => UNMATCHED,
                "none" => UNMATCHED,
                "exit_left" => EXIT_LEFT,
                "exit_right" => EXIT_RIGHT,
                s => {
                    let q: i64 = s.parse().map_err(|_| Error::Domain(format!("bad partner {s}")))?;
                    d.slot(q).ok_or_else(|| Error::Domain(format!("partner {q} outside")))? as u32
                }
            };
        }
        Ok(d)
    }
}

/// Arc diagram of a walk: points are the times `start+1 ..= end`; the step
/// into point `x` decides its role. Up-steps open arcs, down-steps close the
/// most recent open one; a flat step (only at height 0) leaves the point
/// unmatched. Unclosed ends become exit stubs.
pub fn walk_to_arcs(walk: &Walk, side: Side) -> Result<ArcDiagram> {
    walk.validate()?;
    Ok(walk_to_arcs_unchecked(walk, side))
}

pub(crate) fn walk_to_arcs_unchecked(walk: &Walk, side: Side) -> ArcDiagram {
    let n = walk.len_steps();
    let mut partner = vec![UNMATCHED; n];
    let mut stack: Vec<u32> = Vec::new();
    for i in 0..n {
        let d = walk.values[i + 1] - walk.values[i];
        if d > 0 {
            stack.push(i as u32);
        } else if d < 0 {
            match stack.pop() {
                Some(j) => {
                    partner[i] = j;
                    partner[j as usize] = i as u32;
                }
                None => partner[i] = EXIT_LEFT,
            }
        }
    }
    for j in stack {
        partner[j as usize] = EXIT_RIGHT;
    }
    ArcDiagram { offset: walk.start_index + 1, partner, side }
}

/// Inverse of [`walk_to_arcs`]: the walk starting at 0 whose step into each
/// point is up iff its arc goes right.
pub fn arcs_to_walk(d: &ArcDiagram) -> Result<Walk> {
    let mut values = Vec::with_capacity(d.n_points() + 1);
    let mut h = 0i64;
    values.push(0);
    for (i, &p) in d.partner.iter().enumerate() {
        h += match p {
            UNMATCHED => {
                return Err(Error::Domain(format!("point {} is unmatched", d.position(i))))
            }
            EXIT_RIGHT => 1,
            EXIT_LEFT => -1,
            _ if (p as usize) > i => 1,
            _ => -1,
        };
        values.push(h);
    }
    let excursion = h == 0 && values.iter().all(|&v| v >= 0);
    let kind = if excursion { WalkKind::Excursion } else { WalkKind::Free };
    Ok(Walk::new(d.offset - 1, values, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::enumerate_excursions;

    fn excursion(v: &[i64]) -> Walk {
        Walk::new(0, v.to_vec(), WalkKind::Excursion)
    }

    /// Direct evaluation of the arc rule: x1 < x2 joined iff
    /// X[x1-1] = X[x2] < min X[x1..x2-1].
    fn quadratic_arcs(w: &Walk) -> Vec<(i64, i64)> {
        let x = &w.values;
        let n = x.len() - 1;
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                let m = x[a..b].iter().min().unwrap();
                if x[a - 1] == x[b] && x[b] < *m {
                    out.push((a as i64, b as i64));
                }
            }
        }
        out
    }

    #[test]
    fn hand_examples() {
        let d = walk_to_arcs(&excursion(&[0, 1, 2, 1, 0]), Side::Upper).unwrap();
        assert_eq!(d.arcs(), vec![(1, 4), (2, 3)]);
        let d = walk_to_arcs(&excursion(&[0, 1, 0, 1, 0]), Side::Upper).unwrap();
        assert_eq!(d.arcs(), vec![(1, 2), (3, 4)]);
        let d = ArcDiagram::from_pairs(2, 1, Side::Upper, &[(1, 2)]).unwrap();
        assert_eq!(arcs_to_walk(&d).unwrap().values, vec![0, 1, 0]);
        let d = ArcDiagram::from_pairs(4, 1, Side::Upper, &[(1, 4), (2, 3)]).unwrap();
        assert_eq!(arcs_to_walk(&d).unwrap().values, vec![0, 1, 2, 1, 0]);
    }

    #[test]
    fn stack_pass_matches_quadratic_rule() {
        for n in 1..=7 {
            for w in enumerate_excursions(n).unwrap() {
                let d = walk_to_arcs(&w, Side::Upper).unwrap();
                assert!(d.is_fully_matched());
                assert_eq!(d.arcs(), quadratic_arcs(&w));
                assert_eq!(arcs_to_walk(&d).unwrap(), w);
            }
        }
    }

    #[test]
    fn noncrossing_checks() {
        let crossing = ArcDiagram::from_pairs(4, 1, Side::Upper, &[(1, 3), (2, 4)]).unwrap();
        assert!(!crossing.check_noncrossing());
        let nested = ArcDiagram::from_pairs(4, 1, Side::Upper, &[(1, 4), (2, 3)]).unwrap();
        assert!(nested.check_noncrossing());
    }

    #[test]
    fn flats_are_unmatched_and_stubs_keep_direction() {
        let y = Walk::new(0, vec![0, 0, 1, 0, 0, 1], WalkKind::ModifiedY);
        let d = walk_to_arcs(&y, Side::Lower).unwrap();
        assert_eq!(d.partner[0], UNMATCHED);
        assert_eq!(d.arcs(), vec![(2, 3)]);
        assert_eq!(d.partner[3], UNMATCHED);
        assert_eq!(d.partner[4], EXIT_RIGHT);
        let w = Walk::new(-2, vec![0, -1, -2, -1], WalkKind::Free);
        let d = walk_to_arcs(&w, Side::Upper).unwrap();
        assert_eq!(d.offset, -1);
        assert_eq!(d.partner, vec![EXIT_LEFT, EXIT_LEFT, EXIT_RIGHT]);
        assert!(d.check_noncrossing());
        assert_eq!(arcs_to_walk(&d).unwrap().steps(), w.steps());
    }

    #[test]
    fn rejects_malformed_walk() {
        let w = Walk::new(0, vec![0, 2, 1], WalkKind::Free);
        assert!(walk_to_arcs(&w, Side::Upper).is_err());
        let d = ArcDiagram::empty(2, 1, Side::Upper);
        assert!(arcs_to_walk(&d).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = ArcDiagram::from_pairs(6, 1, Side::Lower, &[(1, 4), (2, 3)]).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("5,-1,lower"));
        assert_eq!(ArcDiagram::read_csv(&buf[..]).unwrap(), d);
        let w = Walk::new(-3, vec![0, 1, 0, -1, -2, -1, 0], WalkKind::Free);
        let mut d = walk_to_arcs(&w, Side::Upper).unwrap();
        d.partner[2] = UNMATCHED;
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(ArcDiagram::read_csv(&buf[..]).unwrap(), d);
    }
}
