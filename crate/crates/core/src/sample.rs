//! Samplers for conditioned and two-sided simple walks.
//!
//! Conditioned walks are grown one step at a time. The up-probability at
//! height `h` with `m` steps left is the ratio of reflection-formula path
//! counts, evaluated in log space so that sizes of order 10^7 stay accurate.

use rand::Rng;

use crate::error::{Error, Result};
use crate::walk::{Walk, WalkKind};

const STIRLING_MIN: f64 = 10.0;
const PRODUCT_MAX: u64 = 64;

/// `ln Γ(x + s) - ln Γ(x)` minus the large term `s ln(x' + s) - s`, where
/// `x'` is `x` shifted above the Stirling threshold. Returns `(rest, x')`;
/// callers cancel the large term against a twin.
fn lgamma_diff_parts(mut x: f64, s: f64) -> (f64, f64) {
    let mut acc = 0.0;
    while x < STIRLING_MIN {
        acc += x.ln() - (x + s).ln();
        x += 1.0;
    }
    let series = |y: f64| {
        let y2 = y * y;
        1.0 / (12.0 * y) - 1.0 / (360.0 * y * y2) + 1.0 / (1260.0 * y * y2 * y2)
    };
    acc += (x - 0.5) * (s / x).ln_1p() + series(x + s) - series(x);
    (acc, x)
}

/// `ln [C(m, p + s) / C(m, p)]`, `-inf` when `p + s > m`.
pub fn ln_binom_ratio(m: u64, p: u64, s: u64) -> f64 {
    if s == 0 {
        return 0.0;
    }
    if p + s > m {
        return f64::NEG_INFINITY;
    }
    let q = m - p;
    if s <= PRODUCT_MAX {
        // prod_{i<s} (q - i) / (p + 1 + i)
        let mut acc = 0.0;
        for i in 0..s {
            let num = (q - i) as f64;
            let den = (p + 1 + i) as f64;
            acc += ((num - den) / den).ln_1p();
        }
        return acc;
    }
    let sf = s as f64;
    let (a1, x1) = lgamma_diff_parts((q - s + 1) as f64, sf);
    let (a2, x2) = lgamma_diff_parts((p + 1) as f64, sf);
    // s ln(x1 + s) - s ln(x2 + s)
    let t = sf * ((x1 - x2) / (x2 + sf)).ln_1p();
    a1 - a2 + t
}

/// Probability that a uniform non-negative walk currently at height `h`,
/// with `m` steps left and ending at `target`, steps up next.
pub fn up_probability(m: u64, h: u64, target: u64) -> f64 {
    debug_assert!(m >= 1);
    debug_assert!((m + target + h) % 2 == 0 && h.abs_diff(target) <= m);
    if target == 0 {
        return up_probability_excursion(m, h);
    }
    let p = (m + target - h) / 2;
    if p == 0 {
        return 0.0;
    }
    if p == m {
        return 1.0;
    }
    let rho0 = ln_binom_ratio(m, p, h + 1);
    let rho1 = ln_binom_ratio(m - 1, p - 1, h + 2);
    let ratio = (-rho1.exp_m1()) / (-rho0.exp_m1());
    (p as f64 / m as f64 * ratio).clamp(0.0, 1.0)
}

/// Closed form of [`up_probability`] for target 0:
/// `(h + 2)(m - h) / (2m(h + 1))`.
pub fn up_probability_excursion(m: u64, h: u64) -> f64 {
    let (m, h) = (m as f64, h as f64);
    (h + 2.0) * (m - h) / (2.0 * m * (h + 1.0))
}

fn sample_conditioned<R: Rng + ?Sized>(len: usize, target: u64, kind: WalkKind, rng: &mut R) -> Walk {
    let mut values = Vec::with_capacity(len + 1);
    let mut h = 0u64;
    values.push(0);
    for i in 0..len {
        let m = (len - i) as u64;
        let p = up_probability(m, h, target);
        if rng.random::<f64>() < p {
            h += 1;
        } else {
            h -= 1;
        }
        values.push(h as i64);
    }
    Walk::new(0, values, kind)
}

/// Uniform non-negative excursion with `2n` steps.
pub fn sample_excursion<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Walk {
    sample_conditioned(2 * n, 0, WalkKind::Excursion, rng)
}

/// Uniform non-negative `2n`-step walk from 0 to `target`.
pub fn sample_bridge_to<R: Rng + ?Sized>(n: usize, target: u64, rng: &mut R) -> Result<Walk> {
    let len = 2 * n;
    if target % 2 != 0 || target as usize > len {
        return Err(Error::Parity { steps: len, target: target as i64 });
    }
    Ok(sample_conditioned(len, target, WalkKind::NonnegBridge, rng))
}

/// Default endpoint of the lower walk in a system with boundary.
pub fn default_boundary_target(n: usize) -> u64 {
    2 * (n as f64).sqrt().floor() as u64
}

/// A pair of ±1 steps with the given correlation.
pub fn correlated_steps<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> (i64, i64) {
    let a: i64 = if rng.random::<bool>() { 1 } else { -1 };
    let same = rng.random::<f64>() < (1.0 + rho) / 2.0;
    (a, if same { a } else { -a })
}

/// Two walks on times `[-w, w]`, both 0 at time 0. The forward halves are
/// generated first, then the backward halves outward from 0.
pub fn sample_two_sided<R: Rng + ?Sized>(w: usize, rho: f64, rng: &mut R) -> (Walk, Walk) {
    let mut fwd = vec![(0i64, 0i64); w + 1];
    for i in 1..=w {
        let (a, b) = correlated_steps(rho, rng);
        fwd[i] = (fwd[i - 1].0 + a, fwd[i - 1].1 + b);
    }
    // back[k] = value at time -k; the step at point -k+1 is X_{-k+1} - X_{-k}.
    let mut back = vec![(0i64, 0i64); w + 1];
    for k in 1..=w {
        let (a, b) = correlated_steps(rho, rng);
        back[k] = (back[k - 1].0 - a, back[k - 1].1 - b);
    }
    let kind = if rho == 0.0 { WalkKind::TwoSidedWindow } else { WalkKind::CorrelatedPairComponent };
    let mut l = Vec::with_capacity(2 * w + 1);
    let mut r = Vec::with_capacity(2 * w + 1);
    for k in (1..=w).rev() {
        l.push(back[k].0);
        r.push(back[k].1);
    }
    for v in &fwd {
        l.push(v.0);
        r.push(v.1);
    }
    (Walk::new(-(w as i64), l, kind), Walk::new(-(w as i64), r, kind))
}

/// Unconstrained simple walk from 0.
pub fn sample_free<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Walk {
    let steps: Vec<i8> = (0..len).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    Walk::from_steps(&steps, WalkKind::Free)
}

/// Correlation of the encoding walks for LQG parameter `gamma`:
/// `-cos(pi gamma^2 / 4)`, so `gamma = sqrt 2` gives independent walks.
pub fn correlation_for_gamma(gamma: f64) -> f64 {
    -(std::f64::consts::PI * gamma * gamma / 4.0).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use crate::walk::enumerate_excursions;
    use std::collections::HashMap;

    /// Path counts from `a` to `b` staying >= 0, by dynamic programming.
    fn dp_count(m: usize, a: usize, b: usize) -> f64 {
        let top = a + m + 1;
        let mut cur = vec![0f64; top + 1];
        cur[a] = 1.0;
        for _ in 0..m {
            let mut next = vec![0f64; top + 1];
            for h in 0..top {
                if cur[h] == 0.0 {
                    continue;
                }
                next[h + 1] += cur[h];
                if h > 0 {
                    next[h - 1] += cur[h];
                }
            }
            cur = next;
        }
        cur[b]
    }

    #[test]
    fn small_count_by_hand() {
        assert_eq!(dp_count(2, 0, 0), 1.0);
    }

    #[test]
    fn conditional_matches_dp_counts() {
        for m in 1..=60usize {
            for h in 0..=m {
                for b in (0..=m + h).filter(|b| (m + h + b) % 2 == 0 && b.abs_diff(h) <= m) {
                    let total = dp_count(m, h, b);
                    if total == 0.0 {
                        continue;
                    }
                    let up = dp_count(m - 1, h + 1, b);
                    let want = up / total;
                    let got = up_probability(m as u64, h as u64, b as u64);
                    assert!((got - want).abs() < 1e-11, "m={m} h={h} b={b}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn excursion_closed_form_agrees_with_general_ratio() {
        for m in (2..400u64).step_by(2) {
            for h in (0..m).step_by(2) {
                let p = (m - h) / 2;
                let r0 = ln_binom_ratio(m, p, h + 1);
                let r1 = ln_binom_ratio(m - 1, p - 1, h + 2);
                let general = p as f64 / m as f64 * (-r1.exp_m1()) / (-r0.exp_m1());
                let closed = up_probability_excursion(m, h);
                assert!((general - closed).abs() < 1e-10, "m={m} h={h}");
            }
        }
    }

    #[test]
    fn log_ratio_large_arguments() {
        // Compare both evaluation paths on a case both can handle.
        let exact: f64 = (0..100u64)
            .map(|i| ((1_000_000 - 400_000 - i) as f64 / (400_000 + 1 + i) as f64).ln())
            .sum();
        let got = ln_binom_ratio(1_000_000, 400_000, 100);
        assert!((got - exact).abs() < 1e-8 * exact.abs().max(1.0));
        let near_one = ln_binom_ratio(10_000_000, 5_000_000, 100);
        let prod: f64 = (0..100u64)
            .map(|i| {
                let num = (5_000_000 - i) as f64;
                let den = (5_000_001 + i) as f64;
                ((num - den) / den).ln_1p()
            })
            .sum();
        assert!((near_one - prod).abs() < 1e-10 * prod.abs(), "{near_one} {prod}");
    }

    #[test]
    fn forced_bridges() {
        let mut rng = trial_rng(1, 0, 0);
        assert_eq!(sample_bridge_to(1, 2, &mut rng).unwrap().values, vec![0, 1, 2]);
        assert_eq!(sample_bridge_to(2, 4, &mut rng).unwrap().values, vec![0, 1, 2, 3, 4]);
        assert_eq!(sample_excursion(1, &mut rng).values, vec![0, 1, 0]);
        assert!(sample_bridge_to(2, 3, &mut rng).is_err());
        assert!(sample_bridge_to(2, 6, &mut rng).is_err());
        assert!(sample_excursion(0, &mut rng).values == vec![0]);
    }

    fn chi_square_ok(counts: &[u64], total: u64) -> bool {
        let k = counts.len() as f64;
        let e = total as f64 / k;
        let chi: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        let df = k - 1.0;
        chi <= df + 3.0 * (2.0 * df).sqrt()
    }

    #[test]
    fn excursions_uniform_n3() {
        let all = enumerate_excursions(3).unwrap();
        let index: HashMap<Vec<i64>, usize> =
            all.iter().enumerate().map(|(i, w)| (w.values.clone(), i)).collect();
        let mut counts = vec![0u64; all.len()];
        let mut rng = trial_rng(42, 3, 0);
        let total = 100_000;
        for _ in 0..total {
            let w = sample_excursion(3, &mut rng);
            counts[index[&w.values]] += 1;
        }
        assert!(chi_square_ok(&counts, total), "{counts:?}");
    }

    /// Cycle-lemma sampler: an independent exact method for non-negative
    /// bridges from 0 to `b` of length `m`.
    fn cycle_lemma_bridge<R: Rng>(m: usize, b: usize, rng: &mut R) -> Vec<i64> {
        use rand::seq::SliceRandom;
        let ups = (m + 1 + b + 1) / 2;
        let mut steps: Vec<i64> = (0..m + 1).map(|i| if i < ups { 1 } else { -1 }).collect();
        steps.shuffle(rng);
        let good: Vec<usize> = (0..=m)
            .filter(|&r| {
                let mut s = 0;
                (0..=m).all(|i| {
                    s += steps[(r + i) % (m + 1)];
                    s > 0
                })
            })
            .collect();
        let r = good[rng.random_range(0..good.len())];
        let mut v = vec![0i64];
        for i in 1..=m {
            v.push(v[i - 1] + steps[(r + i) % (m + 1)]);
        }
        v
    }

    #[test]
    fn bridge_matches_cycle_lemma_oracle() {
        let (n, b) = (3usize, 2u64);
        let mut rng = trial_rng(9, 1, 0);
        let mut hist_a: HashMap<Vec<i64>, u64> = HashMap::new();
        let mut hist_b: HashMap<Vec<i64>, u64> = HashMap::new();
        let total = 60_000u64;
        for _ in 0..total {
            *hist_a.entry(sample_bridge_to(n, b, &mut rng).unwrap().values).or_default() += 1;
            *hist_b.entry(cycle_lemma_bridge(2 * n, b as usize, &mut rng)).or_default() += 1;
        }
        // 9 non-negative 6-step bridges to height 2.
        assert_eq!(hist_a.len(), 9);
        assert_eq!(hist_b.len(), 9);
        let ca: Vec<u64> = hist_a.values().copied().collect();
        let cb: Vec<u64> = hist_b.values().copied().collect();
        assert!(chi_square_ok(&ca, total), "{ca:?}");
        assert!(chi_square_ok(&cb, total), "{cb:?}");
    }

    #[test]
    fn n2_target0_is_fair_coin() {
        let mut rng = trial_rng(5, 0, 0);
        let mut uudd = 0;
        let total = 40_000;
        for _ in 0..total {
            if sample_bridge_to(2, 0, &mut rng).unwrap().values == vec![0, 1, 2, 1, 0] {
                uudd += 1;
            }
        }
        let p = uudd as f64 / total as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / total as f64).sqrt());
    }

    #[test]
    fn two_sided_marginals_and_correlation() {
        for &(rho, seed) in &[(0.0, 1u64), (-std::f64::consts::FRAC_1_SQRT_2, 2)] {
            let mut rng = trial_rng(seed, 0, 0);
            let (l, r) = sample_two_sided(50_000, rho, &mut rng);
            assert_eq!(l.at(0), 0);
            assert_eq!(r.at(0), 0);
            l.validate().unwrap();
            let sl = l.steps();
            let sr = r.steps();
            let n = sl.len() as f64;
            let cov: f64 = sl.iter().zip(&sr).map(|(&a, &b)| (a * b) as f64).sum::<f64>() / n;
            let sigma = ((1.0 - rho * rho) / n).sqrt();
            assert!((cov - rho).abs() < 3.0 * sigma, "rho={rho} cov={cov}");
            let ups = sl.iter().filter(|&&s| s == 1).count() as f64 / n;
            assert!((ups - 0.5).abs() < 3.0 * (0.25 / n).sqrt());
        }
    }

    #[test]
    fn gamma_correlation_values() {
        assert!(correlation_for_gamma(2f64.sqrt()).abs() < 1e-15);
        assert!((correlation_for_gamma(1.0) + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
