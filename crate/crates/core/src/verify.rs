//! Exhaustive small-size checks, bundled as named suites.
//!
//! Each suite enumerates every object up to a fixed size and returns a
//! report with one summary line per size plus any falsifications found.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arcs::{walk_to_arcs_unchecked, ArcDiagram, Side, UNMATCHED};
use crate::error::{Error, Result};
use crate::infinite::{boundary_matching, build_pihpms, build_uihpms_by_reflection, good_boundary_points, trace_gamma_circ};
use crate::loops::{decompose, parity_separation_witness};
use crate::percolation::{matching_to_partition, partition_to_matching, Grid, NonCrossingPartition, Triple};
use crate::rng::trial_rng;
use crate::system::enumerate_systems;
use crate::walk::{all_step_sequences, enumerate_excursions, reflect_and_levy, Walk, WalkKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Catalan,
    Parity,
    Levy,
    Bijection,
    Bounds,
    Matching,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Catalan, Suite::Parity, Suite::Levy, Suite::Bijection, Suite::Bounds, Suite::Matching];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Catalan => "catalan",
            Suite::Parity => "parity",
            Suite::Levy => "levy",
            Suite::Bijection => "bijection",
            Suite::Bounds => "bounds",
            Suite::Matching => "matching",
        }
    }

    pub fn run(self) -> Result<SuiteReport> {
        match self {
            Suite::Catalan => catalan_suite(6),
            Suite::Parity => parity_suite(6),
            Suite::Levy => levy_suite(12),
            Suite::Bijection => bijection_suite(6),
            Suite::Bounds => bounds_suite(7),
            Suite::Matching => matching_suite(4),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    /// Individual assertions evaluated.
    pub checks: u64,
    /// One line per size.
    pub summary: Vec<String>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, checks: 0, summary: Vec::new(), failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{} {}: {} checks, {} failures", status, self.suite, self.checks, self.failures.len())?;
        for s in &self.summary {
            writeln!(f, "  {s}")?;
        }
        for s in &self.failures {
            writeln!(f, "  - {s}")?;
        }
        Ok(())
    }
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn catalan(n: u64) -> u128 {
    binom(2 * n, n) / (n as u128 + 1)
}

/// Number of finite systems of size `n` against `Cat_n^2`.
pub fn catalan_suite(max_n: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Catalan);
    for n in 1..=max_n {
        let got = enumerate_systems(n)?.count() as u128;
        let want = catalan(n as u64).pow(2);
        rep.summary.push(format!("n={n} systems={got} expected={want}"));
        rep.check(got == want, || format!("n={n}: enumerated {got}, expected {want}"));
    }
    Ok(rep)
}

/// Every (even, odd) pair of every system of size `<= max_n` is separated
/// by some loop.
pub fn parity_suite(max_n: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Parity);
    for n in 1..=max_n {
        let (mut systems, mut pairs, before) = (0u64, 0u64, rep.failures.len());
        for sys in enumerate_systems(n)? {
            systems += 1;
            let d = decompose(&sys);
            for x in (2..=2 * n as i64).step_by(2) {
                for y in (1..=2 * n as i64).step_by(2) {
                    pairs += 1;
                    let r = parity_separation_witness(&sys, &d, x, y);
                    rep.check(r.is_ok(), || {
                        format!("n={n} upper={:?} lower={:?} x={x} y={y}: {}", sys.upper.arcs(), sys.lower.arcs(), r.unwrap_err())
                    });
                }
            }
        }
        rep.summary
            .push(format!("n={n} systems={systems} pairs={pairs} falsifications={}", rep.failures.len() - before));
    }
    Ok(rep)
}

/// `(X - M, -M)` and `(|X| - 1{X > 0}, crossings of 1/2)` have the same
/// law as paths, for every length up to `max_len`.
pub fn levy_suite(max_len: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Levy);
    for len in 1..=max_len {
        let mut left = Vec::with_capacity(1 << len);
        let mut right = Vec::with_capacity(1 << len);
        for steps in all_step_sequences(len) {
            let p = reflect_and_levy(&Walk::from_steps(&steps, WalkKind::Free));
            left.push((p.drawdown.values, p.neg_min));
            right.push((p.folded.values, p.crossings));
        }
        left.sort_unstable();
        right.sort_unstable();
        let diff = left.iter().zip(&right).filter(|(a, b)| a != b).count();
        rep.summary.push(format!("len={len} walks={} mismatched={diff}", left.len()));
        rep.check(diff == 0, || {
            let (a, b) = left.iter().zip(&right).find(|(a, b)| a != b).unwrap();
            format!("len={len}: first difference {a:?} vs {b:?}")
        });
    }
    Ok(rep)
}

/// For bridges of length `2n` from 0, the count with at least `2k`
/// crossings of height 1/2 lies between `2^(2k-1) C(2n-2k, n)` and
/// `2^k C(2n-k, n)`.
pub fn bounds_suite(max_n: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Bounds);
    for n in 1..=max_n {
        let mut hist = vec![0u128; 2 * n + 1];
        let mut bridges = 0u128;
        for steps in all_step_sequences(2 * n) {
            if steps.iter().map(|&s| s as i64).sum::<i64>() != 0 {
                continue;
            }
            bridges += 1;
            let p = reflect_and_levy(&Walk::from_steps(&steps, WalkKind::Free));
            hist[*p.crossings.last().unwrap() as usize] += 1;
        }
        rep.check(bridges == binom(2 * n as u64, n as u64), || format!("n={n}: {bridges} bridges"));
        for k in 1..=n {
            let tail: u128 = hist[2 * k..].iter().sum();
            let lo = (1u128 << (2 * k - 1)) * binom((2 * n - 2 * k) as u64, n as u64);
            let hi = (1u128 << k) * binom((2 * n - k) as u64, n as u64);
            rep.check(lo <= tail && tail <= hi, || format!("n={n} k={k}: {lo} <= {tail} <= {hi} fails"));
        }
        rep.summary.push(format!("n={n} bridges={bridges} tail={:?}", (1..=n).map(|k| hist[2 * k..].iter().sum::<u128>()).collect::<Vec<_>>()));
    }
    Ok(rep)
}

fn all_matchings(n: usize) -> Result<Vec<ArcDiagram>> {
    Ok(enumerate_excursions(n)?.iter().map(|w| walk_to_arcs_unchecked(w, Side::Upper)).collect())
}

/// Matching-partition bijection on both grids: the image has `Cat_n`
/// distinct non-crossing partitions, both compositions are identities, and
/// each of the three objects of a triple rebuilds the other two.
pub fn bijection_suite(max_n: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Bijection);
    for n in 1..=max_n {
        let ms = all_matchings(n)?;
        for grid in [Grid::MinusHalf, Grid::PlusHalf] {
            let mut seen: HashSet<NonCrossingPartition> = HashSet::new();
            for m in &ms {
                let pi = matching_to_partition(m, grid)?;
                rep.check(pi.is_noncrossing(), || format!("n={n} {grid:?} {:?}: crossing image", m.arcs()));
                let back = partition_to_matching(&pi);
                rep.check(back.as_ref() == Ok(m), || format!("n={n} {grid:?} {:?}: inverse gives {back:?}", m.arcs()));
                if let Ok(b) = &back {
                    let again = matching_to_partition(b, grid)?;
                    rep.check(again == pi, || format!("n={n} {grid:?} {:?}: partition not restored", pi.block_id));
                }
                seen.insert(pi);
            }
            let want = catalan(n as u64) as usize;
            rep.check(seen.len() == want, || format!("n={n} {grid:?}: {} distinct images, expected {want}", seen.len()));
        }
        for m in &ms {
            let t = Triple::from_matching(m)?;
            let from_orange = Triple::from_partition(&t.orange);
            let from_green = Triple::from_partition(&t.green);
            rep.check(from_orange.as_ref() == Ok(&t), || format!("n={n} {:?}: orange does not rebuild triple", m.arcs()));
            rep.check(from_green.as_ref() == Ok(&t), || format!("n={n} {:?}: green does not rebuild triple", m.arcs()));
        }
        rep.summary.push(format!("n={n} matchings={}", ms.len()));
    }
    Ok(rep)
}

/// Two-sided walk on `[-w, w]` from `2w` steps; the first `w` precede 0.
fn two_sided(steps: &[i8]) -> Walk {
    let w = steps.len() / 2;
    let mut v = vec![0i64; 2 * w + 1];
    for i in 1..=w {
        v[w + i] = v[w + i - 1] + steps[w + i - 1] as i64;
        v[w - i] = v[w - i + 1] - steps[w - i] as i64;
    }
    Walk::new(-(w as i64), v, WalkKind::TwoSidedWindow)
}

/// Over every pair of two-sided walks of half-width `w`: the boundary
/// matching is an involution and non-crossing where certain, and the
/// pointed system leaves 0 unmatched below with an open path from it.
/// Coin flips for good points come from a fixed stream per pair.
pub fn matching_suite(w: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Matching);
    let walks: Vec<Walk> = all_step_sequences(2 * w).map(|s| two_sided(&s)).collect();
    let (mut windows, mut skipped, mut certain) = (0u64, 0u64, 0usize);
    for (i, l) in walks.iter().enumerate() {
        for (j, r) in walks.iter().enumerate() {
            let mut win = build_uihpms_by_reflection(l, r)?;
            let mut rng = trial_rng(0, (i * walks.len() + j) as u64, 0);
            good_boundary_points(&mut win, &mut rng);
            let (bm, _) = match boundary_matching(&win) {
                Ok(x) => x,
                Err(Error::Window(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            windows += 1;
            certain += bm.phi.len();
            rep.check(bm.is_involution(), || format!("pair ({i},{j}): not an involution"));
            rep.check(bm.is_noncrossing(), || format!("pair ({i},{j}): crossing pairs"));
            let p = build_pihpms(l, r)?;
            let zero = p.system.slot(0).expect("0 lies in every window");
            rep.check(p.system.lower.partner[zero] == UNMATCHED, || format!("pair ({i},{j}): 0 matched below"));
            let g = trace_gamma_circ(&p)?;
            rep.check(!g.closed, || format!("pair ({i},{j}): path from 0 closes"));
        }
    }
    rep.summary.push(format!("halfwidth={w} windows={windows} undecidable={skipped} certain_points={certain}"));
    Ok(rep)
}

pub fn run_suites(suites: &[Suite]) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|s| s.run()).collect()
}
