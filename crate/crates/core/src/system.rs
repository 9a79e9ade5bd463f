//! Meandric systems as pairs of arc diagrams over a common point set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arcs::{walk_to_arcs, walk_to_arcs_unchecked, ArcDiagram, Side};
use crate::error::{Error, Result};
use crate::sample::{sample_bridge_to, sample_excursion, sample_two_sided};
use crate::walk::{enumerate_excursions, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Finite,
    WithBoundary,
    UimsWindow,
    UihpmsWindow,
    PihpmsWindow,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Finite => "finite",
            Variant::WithBoundary => "with_boundary",
            Variant::UimsWindow => "uims_window",
            Variant::UihpmsWindow => "uihpms_window",
            Variant::PihpmsWindow => "pihpms_window",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeandricSystem {
    pub upper: ArcDiagram,
    pub lower: ArcDiagram,
    pub variant: Variant,
    /// Two marked boundary positions left unlinked.
    pub marked_points: Option<(i64, i64)>,
}

impl MeandricSystem {
    pub fn new(upper: ArcDiagram, lower: ArcDiagram, variant: Variant) -> Result<Self> {
        if upper.n_points() != lower.n_points() || upper.offset != lower.offset {
            return Err(Error::Domain("upper and lower diagrams cover different points".into()));
        }
        if variant == Variant::Finite
            && (!upper.is_fully_matched() || !lower.is_fully_matched() || upper.n_points() % 2 != 0)
        {
            return Err(Error::Domain("finite system must be fully matched".into()));
        }
        Ok(MeandricSystem { upper, lower, variant, marked_points: None })
    }

    /// System of two walks on the same time range.
    pub fn from_walks(upper: &Walk, lower: &Walk, variant: Variant) -> Result<Self> {
        MeandricSystem::new(walk_to_arcs(upper, Side::Upper)?, walk_to_arcs(lower, Side::Lower)?, variant)
    }

    pub(crate) fn from_walks_unchecked(upper: &Walk, lower: &Walk, variant: Variant) -> Self {
        MeandricSystem {
            upper: walk_to_arcs_unchecked(upper, Side::Upper),
            lower: walk_to_arcs_unchecked(lower, Side::Lower),
            variant,
            marked_points: None,
        }
    }

    pub fn n_points(&self) -> usize {
        self.upper.n_points()
    }

    pub fn offset(&self) -> i64 {
        self.upper.offset
    }

    pub fn diagram(&self, side: Side) -> &ArcDiagram {
        match side {
            Side::Upper => &self.upper,
            Side::Lower => &self.lower,
        }
    }

    pub fn diagram_mut(&mut self, side: Side) -> &mut ArcDiagram {
        match side {
            Side::Upper => &mut self.upper,
            Side::Lower => &mut self.lower,
        }
    }

    /// Partner slot (or sentinel) of `slot` on `side`.
    pub fn partner(&self, slot: usize, side: Side) -> u32 {
        self.diagram(side).partner[slot]
    }

    pub fn position(&self, slot: usize) -> i64 {
        self.upper.position(slot)
    }

    pub fn slot(&self, pos: i64) -> Option<usize> {
        self.upper.slot(pos)
    }

    /// Uniform system of size `n`: two independent uniform excursions.
    pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let up = sample_excursion(n, rng);
        let low = sample_excursion(n, rng);
        MeandricSystem::from_walks_unchecked(&up, &low, Variant::Finite)
    }

    /// Uniform system with boundary: the lower walk is a non-negative bridge
    /// to `target`, leaving `target` unmatched lower points.
    pub fn sample_with_boundary<R: Rng + ?Sized>(n: usize, target: u64, rng: &mut R) -> Result<Self> {
        let up = sample_excursion(n, rng);
        let low = sample_bridge_to(n, target, rng)?;
        let mut sys = MeandricSystem::from_walks_unchecked(&up, &low, Variant::WithBoundary);
        // Bridge ends are open to the right in the walk encoding; in the
        // finite system they are boundary points.
        for p in sys.lower.partner.iter_mut() {
            if *p == crate::arcs::EXIT_RIGHT {
                *p = crate::arcs::UNMATCHED;
            }
        }
        Ok(sys)
    }

    /// System of size `n` from a correlated pair of free walks on `[-n, n]`
    /// (a window of the correlated infinite system).
    pub fn sample_correlated_window<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Self {
        let (l, r) = sample_two_sided(n, rho, rng);
        MeandricSystem::from_walks_unchecked(&l, &r, Variant::UimsWindow)
    }

    /// Unmatched lower points, left to right.
    pub fn boundary_positions(&self) -> Vec<i64> {
        self.lower.unmatched_positions()
    }

    /// Join successive boundary points by lower arcs so that every path
    /// becomes a loop. With `marked = Some((a, b))` the boundary points of
    /// ranks `a` (even) and `b` (odd) stay free and the others are paired
    /// successively, leaving a single path from one marked point to the
    /// other. Boundary points are never enclosed, so the new arcs cannot
    /// cross old ones.
    pub fn link_boundary(&mut self, marked: Option<(usize, usize)>) -> Result<()> {
        let boundary = self.boundary_positions();
        let k = boundary.len();
        if let Some((a, b)) = marked {
            if a % 2 != 0 || b % 2 != 1 || a >= b || b >= k {
                return Err(Error::Domain(format!(
                    "marked ranks must be even < odd below {k}, got ({a}, {b})"
                )));
            }
        } else if k % 2 != 0 {
            return Err(Error::Domain(format!("odd number of boundary points: {k}")));
        }
        let free: Vec<i64> = boundary
            .iter()
            .enumerate()
            .filter(|(r, _)| marked.is_none_or(|(a, b)| *r != a && *r != b))
            .map(|(_, &p)| p)
            .collect();
        for pair in free.chunks(2) {
            let (x, y) = (self.slot(pair[0]).unwrap(), self.slot(pair[1]).unwrap());
            self.lower.partner[x] = y as u32;
            self.lower.partner[y] = x as u32;
        }
        self.marked_points = marked.map(|(a, b)| (boundary[a], boundary[b]));
        Ok(())
    }
}

/// Default marked ranks: the first boundary point and the odd-rank one
/// closest to position `n`.
pub fn default_marked_ranks(boundary: &[i64], n: usize) -> Option<(usize, usize)> {
    (1..boundary.len())
        .step_by(2)
        .min_by_key(|&r| (boundary[r] - n as i64).abs())
        .map(|b| (0, b))
}

pub const SYSTEM_ENUMERATION_LIMIT: usize = 6;

/// Every finite system of size `n`, upper walk major order.
pub fn enumerate_systems(n: usize) -> Result<impl Iterator<Item = MeandricSystem>> {
    if n > SYSTEM_ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: SYSTEM_ENUMERATION_LIMIT });
    }
    let diagrams: Vec<(ArcDiagram, ArcDiagram)> = enumerate_excursions(n)?
        .iter()
        .map(|w| (walk_to_arcs_unchecked(w, Side::Upper), walk_to_arcs_unchecked(w, Side::Lower)))
        .collect();
    let k = diagrams.len();
    Ok((0..k * k).map(move |idx| {
        let (u, l) = (idx / k, idx % k);
        MeandricSystem {
            upper: diagrams[u].0.clone(),
            lower: diagrams[l].1.clone(),
            variant: Variant::Finite,
            marked_points: None,
        }
    }))
}
