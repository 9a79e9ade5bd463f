//! Lattice walks and their exhaustive enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    Excursion,
    NonnegBridge,
    TwoSidedWindow,
    Reflected,
    ModifiedY,
    CorrelatedPairComponent,
    /// Unconstrained one-sided walk from 0.
    Free,
}

/// A walk with values `values[i]` at time `start_index + i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Walk {
    pub start_index: i64,
    pub values: Vec<i64>,
    pub kind: WalkKind,
}

impl Walk {
    pub fn new(start_index: i64, values: Vec<i64>, kind: WalkKind) -> Self {
        Walk { start_index, values, kind }
    }

    /// Walk from 0 with the given ±1 steps.
    pub fn from_steps(steps: &[i8], kind: WalkKind) -> Self {
        let mut values = Vec::with_capacity(steps.len() + 1);
        let mut h = 0i64;
        values.push(0);
        for &s in steps {
            h += s as i64;
            values.push(h);
        }
        Walk::new(0, values, kind)
    }

    pub fn len_steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn end_index(&self) -> i64 {
        self.start_index + self.len_steps() as i64
    }

    /// Value at absolute time `t`; panics outside the walk.
    pub fn at(&self, t: i64) -> i64 {
        self.values[(t - self.start_index) as usize]
    }

    pub fn steps(&self) -> Vec<i8> {
        self.values.windows(2).map(|w| (w[1] - w[0]) as i8).collect()
    }

    /// Check the invariants attached to `kind`.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Walk("no values".into()));
        }
        for (i, w) in self.values.windows(2).enumerate() {
            let d = (w[1] - w[0]).abs();
            let ok = match self.kind {
                WalkKind::ModifiedY => d == 1 || (d == 0 && w[0] == 0),
                _ => d == 1,
            };
            if !ok {
                return Err(Error::Walk(format!(
                    "bad step {} -> {} at offset {i}",
                    w[0], w[1]
                )));
            }
        }
        let first = self.values[0];
        let last = *self.values.last().unwrap();
        let nonneg = self.values.iter().all(|&v| v >= 0);
        match self.kind {
            WalkKind::Excursion if !(first == 0 && last == 0 && nonneg) => {
                Err(Error::Walk("excursion must start and end at 0 and stay >= 0".into()))
            }
            WalkKind::NonnegBridge if !(first == 0 && nonneg) => {
                Err(Error::Walk("bridge must start at 0 and stay >= 0".into()))
            }
            WalkKind::Reflected | WalkKind::ModifiedY if !nonneg => {
                Err(Error::Walk("reflected walk went negative".into()))
            }
            _ => Ok(()),
        }
    }
}

pub const ENUMERATION_LIMIT: usize = 8;

/// All `2n`-step non-negative excursions in lexicographic order of their
/// step sequences (down before up).
pub fn enumerate_excursions(n: usize) -> Result<Vec<Walk>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: ENUMERATION_LIMIT });
    }
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(2 * n);
    fn rec(n: usize, h: usize, steps: &mut Vec<i8>, out: &mut Vec<Walk>) {
        let m = 2 * n - steps.len();
        if m == 0 {
            out.push(Walk::from_steps(steps, WalkKind::Excursion));
            return;
        }
        if h > 0 {
            steps.push(-1);
            rec(n, h - 1, steps, out);
            steps.pop();
        }
        if h < m - 1 {
            steps.push(1);
            rec(n, h + 1, steps, out);
            steps.pop();
        }
    }
    rec(n, 0, &mut steps, &mut out);
    Ok(out)
}

/// Every ±1 step sequence of length `len` (bit i set = step i+1 is up).
pub fn all_step_sequences(len: usize) -> impl Iterator<Item = Vec<i8>> {
    assert!(len < 31, "length {len} too large to enumerate");
    (0u32..(1u32 << len)).map(move |bits| {
        (0..len)
            .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
            .collect()
    })
}

/// The two sides of the discrete Lévy identity for a one-sided walk from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevyPair {
    /// `|X| - 1{X > 0}`.
    pub folded: Walk,
    /// Number of crossings of height 1/2 up to each time.
    pub crossings: Vec<i64>,
    /// `X - M` with `M` the running minimum.
    pub drawdown: Walk,
    /// `-M`.
    pub neg_min: Vec<i64>,
}

pub fn reflect_and_levy(walk: &Walk) -> LevyPair {
    let x = &walk.values;
    let mut folded = Vec::with_capacity(x.len());
    let mut crossings = Vec::with_capacity(x.len());
    let mut drawdown = Vec::with_capacity(x.len());
    let mut neg_min = Vec::with_capacity(x.len());
    let mut m = i64::MAX;
    let mut ell = 0;
    for (i, &v) in x.iter().enumerate() {
        if i > 0 && (x[i - 1] > 0) != (v > 0) {
            ell += 1;
        }
        m = m.min(v);
        folded.push(v.abs() - (v > 0) as i64);
        crossings.push(ell);
        drawdown.push(v - m);
        neg_min.push(-m);
    }
    LevyPair {
        folded: Walk::new(walk.start_index, folded, WalkKind::ModifiedY),
        crossings,
        drawdown: Walk::new(walk.start_index, drawdown, WalkKind::ModifiedY),
        neg_min,
    }
}

/// `|X|` for a walk: the reflected walk driving the half-plane lower diagram.
pub fn reflect(walk: &Walk) -> Walk {
    Walk::new(
        walk.start_index,
        walk.values.iter().map(|v| v.abs()).collect(),
        WalkKind::Reflected,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excursion_counts_are_catalan() {
        let cat = [1usize, 1, 2, 5, 14, 42, 132, 429, 1430];
        for n in 0..=8 {
            assert_eq!(enumerate_excursions(n).unwrap().len(), cat[n], "n={n}");
        }
        assert_eq!(enumerate_excursions(1).unwrap()[0].values, vec![0, 1, 0]);
        assert!(matches!(enumerate_excursions(9), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let ex = enumerate_excursions(6).unwrap();
        for w in &ex {
            w.validate().unwrap();
        }
        for pair in ex.windows(2) {
            assert!(pair[0].steps() < pair[1].steps());
        }
    }

    #[test]
    fn levy_hand_cases() {
        let p = reflect_and_levy(&Walk::new(0, vec![0, -1, 0], WalkKind::Free));
        assert_eq!(p.drawdown.values, vec![0, 0, 1]);
        assert_eq!(p.neg_min, vec![0, 1, 1]);
        let p = reflect_and_levy(&Walk::new(0, vec![0, 1, 0], WalkKind::Free));
        assert_eq!(p.folded.values, vec![0, 0, 0]);
        assert_eq!(p.crossings, vec![0, 1, 2]);
        p.folded.validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_steps() {
        assert!(Walk::new(0, vec![0, 2], WalkKind::Free).validate().is_err());
        assert!(Walk::new(0, vec![0, 1, 1], WalkKind::ModifiedY).validate().is_err());
        assert!(Walk::new(0, vec![0, 0, 1], WalkKind::ModifiedY).validate().is_ok());
        assert!(Walk::new(0, vec![0, 1, 2], WalkKind::Excursion).validate().is_err());
    }
}
