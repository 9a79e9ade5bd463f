//! Monte Carlo drivers: per-trial observables, median exponent fits, box
//! crossings and the half-plane structural checks.
//!
//! Every trial draws from `trial_rng(seed, label, trial)`, where the label
//! names the experiment and size, so results do not depend on scheduling.
//! Workers fan out over trials and results are gathered by trial index.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcs::UNMATCHED;
use crate::error::{Error, Result};
use crate::infinite::{
    boundary_matching, build_pihpms, build_uihpms_by_reflection, build_uims_window, good_boundary_points,
    trace_gamma_circ, GammaCirc, WindowDump,
};
use crate::loops::{crossing_count, decompose, LoopDecomposition};
use crate::map::{loop_graph_diameter, map_diameter_estimate, DiameterMethod, MapKind, PlanarMap};
use crate::mcrt::sample_mated_crt;
use crate::percolation::{box_crossing, BoxOutcome, BoxSpec};
use crate::rng::{trial_rng, TrialRng};
use crate::sample::{default_boundary_target, sample_two_sided};
use crate::stats::{fit_loglog, lower_median, RegressionResult};
use crate::system::{default_marked_ranks, MeandricSystem};
use crate::tutte::{tutte_embed, Embedding};
use crate::walk::Walk;

/// Experiment labels mixed into the per-trial RNG key.
pub mod label {
    pub const FINITE: u64 = 0;
    pub const MCRT: u64 = 1 << 56;
    pub const CORRELATED: u64 = 2 << 56;
    pub const BOXES: u64 = 3 << 56;
    pub const HALF_PLANE: u64 = 4 << 56;
    pub const BOUNDARY: u64 = 5 << 56;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Statistic {
    /// Vertex count of the k-th largest loop.
    LoopK(usize),
    /// Arcs of the largest loop straddling the middle of the line.
    Cross,
    Diameter,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::LoopK(k) => write!(f, "loop_k={k}"),
            Statistic::Cross => write!(f, "cross"),
            Statistic::Diameter => write!(f, "diameter"),
        }
    }
}

impl From<Statistic> for String {
    fn from(s: Statistic) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Statistic {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cross" => Ok(Statistic::Cross),
            "diameter" => Ok(Statistic::Diameter),
            _ => s
                .strip_prefix("loop_k=")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(Statistic::LoopK)
                .ok_or_else(|| Error::Domain(format!("unknown statistic {s:?}; expected loop_k=K, cross or diameter"))),
        }
    }
}

/// Run `f(size_index, trial)` for every size and trial on `jobs` workers;
/// `out[i][t]` is the result for size `i`, trial `t`.
pub fn run_grid<T, F>(n_sizes: usize, trials: usize, jobs: usize, f: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(usize, usize) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Domain(e.to_string()))?;
    let flat: Vec<Result<T>> =
        pool.install(|| (0..n_sizes * trials).into_par_iter().map(|i| f(i / trials, i % trials)).collect());
    let mut out: Vec<Vec<T>> = (0..n_sizes).map(|_| Vec::with_capacity(trials)).collect();
    for (i, r) in flat.into_iter().enumerate() {
        out[i / trials].push(r?);
    }
    Ok(out)
}

/// Loop system used by the loop and crossing statistics: a uniform finite
/// system of size `n`, or a correlated window with `2n` points.
pub fn loop_sample(n: usize, seed: u64, trial: usize, correlation: Option<f64>) -> (MeandricSystem, i64) {
    match correlation {
        None => {
            let mut rng = trial_rng(seed, label::FINITE ^ n as u64, trial as u64);
            (MeandricSystem::sample_uniform(n, &mut rng), n as i64)
        }
        Some(rho) => {
            let mut rng = trial_rng(seed, label::CORRELATED ^ n as u64, trial as u64);
            (MeandricSystem::sample_correlated_window(n, rho, &mut rng), 0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterRecord {
    pub seed: u64,
    pub trial: usize,
    pub n: usize,
    pub diameter_lb: u32,
    pub method: DiameterMethod,
    pub loop_rank: Option<usize>,
    pub loop_diameter_lb: Option<u32>,
    pub map_kind: MapKind,
}

/// BFS sources spent on the largest loop's diameter.
pub const LOOP_DIAMETER_BUDGET: usize = 4;
pub const DIAMETER_SWEEPS: usize = 4;

/// One diameter trial: a finite uniform map of size `n`, or a mated-CRT
/// window with `2n` cells.
pub fn diameter_trial(n: usize, seed: u64, trial: usize, kind: MapKind, resolution: usize, with_loop: bool) -> DiameterRecord {
    let (map, decomp): (PlanarMap, Option<LoopDecomposition>) = match kind {
        MapKind::Meander => {
            let mut rng = trial_rng(seed, label::FINITE ^ n as u64, trial as u64);
            let sys = MeandricSystem::sample_uniform(n, &mut rng);
            let d = with_loop.then(|| decompose(&sys));
            (PlanarMap::build(&sys), d)
        }
        MapKind::Mcrt => {
            let mut rng = trial_rng(seed, label::MCRT ^ n as u64, trial as u64);
            (sample_mated_crt(n, resolution, &mut rng), None)
        }
    };
    let est = map_diameter_estimate(&map, DIAMETER_SWEEPS);
    let loop_diameter_lb = decomp
        .as_ref()
        .and_then(|d| d.ranked_loop(1).map(|l| loop_graph_diameter(&map, d.loop_slots(l), LOOP_DIAMETER_BUDGET)));
    DiameterRecord {
        seed,
        trial,
        n,
        diameter_lb: est.lower_bound,
        method: est.method,
        loop_rank: loop_diameter_lb.map(|_| 1),
        loop_diameter_lb,
        map_kind: kind,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    pub statistic: Statistic,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub map_kind: MapKind,
    pub correlation: Option<f64>,
    /// Samples per unit time for mated-CRT maps.
    pub resolution: usize,
    pub jobs: usize,
}

impl ExponentConfig {
    pub fn new(statistic: Statistic, sizes: Vec<usize>, trials: usize, seed: u64) -> Self {
        ExponentConfig {
            statistic,
            sizes,
            trials,
            seed,
            map_kind: MapKind::Meander,
            correlation: None,
            resolution: 8,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub statistic: String,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub medians: Vec<f64>,
    pub slope: f64,
    pub ci: [f64; 2],
    pub seed: u64,
    pub fit: RegressionResult,
    /// Raw per-trial values, `values[i][t]`.
    #[serde(skip)]
    pub values: Vec<Vec<f64>>,
    #[serde(skip)]
    pub diameters: Vec<DiameterRecord>,
}

/// Value of a statistic on one trial.
fn loop_statistic(stat: Statistic, n: usize, seed: u64, trial: usize, correlation: Option<f64>) -> f64 {
    let (sys, mid) = loop_sample(n, seed, trial, correlation);
    let d = decompose(&sys);
    match stat {
        Statistic::LoopK(k) => d.kth_largest_loop_size(k) as f64,
        Statistic::Cross => crossing_count(&sys, &d, mid) as f64,
        Statistic::Diameter => unreachable!(),
    }
}

/// Per-size lower medians of a statistic and the log-log fit of median
/// against `2n`.
pub fn median_pipeline(cfg: &ExponentConfig) -> Result<ExponentResult> {
    if cfg.trials == 0 || cfg.sizes.is_empty() {
        return Err(Error::Domain("need at least one size and one trial".into()));
    }
    let mut diameters = Vec::new();
    let values: Vec<Vec<f64>> = match cfg.statistic {
        Statistic::Diameter => {
            let recs = run_grid(cfg.sizes.len(), cfg.trials, cfg.jobs, |i, t| {
                Ok(diameter_trial(cfg.sizes[i], cfg.seed, t, cfg.map_kind, cfg.resolution, true))
            })?;
            let v = recs.iter().map(|r| r.iter().map(|d| d.diameter_lb as f64).collect()).collect();
            diameters = recs.into_iter().flatten().collect();
            v
        }
        stat => run_grid(cfg.sizes.len(), cfg.trials, cfg.jobs, |i, t| {
            Ok(loop_statistic(stat, cfg.sizes[i], cfg.seed, t, cfg.correlation))
        })?,
    };
    let medians: Vec<f64> = values.iter().map(|v| lower_median(v).unwrap()).collect();
    let points: Vec<(f64, f64)> = cfg.sizes.iter().zip(&medians).map(|(&n, &m)| (2.0 * n as f64, m)).collect();
    let fit = fit_loglog(&points)?;
    if !fit.slope.is_finite() || !fit.ci_95_halfwidth.is_finite() {
        return Err(Error::NoConvergence { iters: 0, residual: f64::NAN });
    }
    Ok(ExponentResult {
        statistic: cfg.statistic.to_string(),
        sizes: cfg.sizes.clone(),
        trials: cfg.trials,
        medians,
        slope: fit.slope,
        ci: [fit.ci().0, fit.ci().1],
        seed: cfg.seed,
        fit,
        values,
        diameters,
    })
}

/// Per-trial observable row: one per rank `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRow {
    pub seed: u64,
    pub trial: usize,
    pub n: usize,
    pub variant: String,
    pub k: usize,
    pub loop_size: usize,
    pub cross_n: usize,
    pub n_loops: usize,
}

/// Rows `k = 1..=top_k` for one system; `mid` is the crossing line.
pub fn observables(sys: &MeandricSystem, seed: u64, trial: usize, n: usize, variant: &str, mid: i64, top_k: usize) -> Vec<ObservableRow> {
    let d = decompose(sys);
    let cross_n = crossing_count(sys, &d, mid);
    (1..=top_k)
        .map(|k| ObservableRow {
            seed,
            trial,
            n,
            variant: variant.to_string(),
            k,
            loop_size: d.kth_largest_loop_size(k),
            cross_n,
            n_loops: d.n_loops(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub root: f64,
    pub size: usize,
    pub outcome: Option<BoxOutcome>,
    pub decidable: bool,
}

/// Box of the given size centred on the origin of a fresh window of
/// half-width `halfwidth`; undecidable when the window is too small.
pub fn box_trial(size: usize, halfwidth: usize, seed: u64, trial: usize) -> Result<BoxRecord> {
    let mut rng = trial_rng(seed, label::BOXES ^ ((size as u64) << 24) ^ halfwidth as u64, trial as u64);
    let (l, r) = sample_two_sided(halfwidth, 0.0, &mut rng);
    let sys = build_uims_window(&l, &r)?;
    let b = BoxSpec { j0: 1 - size as i64, n: size };
    match box_crossing(&sys, b) {
        Ok(c) => Ok(BoxRecord { root: b.root(), size, outcome: Some(c.outcome()?), decidable: true }),
        Err(Error::Window(_)) => Ok(BoxRecord { root: b.root(), size, outcome: None, decidable: false }),
        Err(e) => Err(e),
    }
}

/// Smallest half-width whose window decides a centred box of this size.
pub fn box_halfwidth(size: usize) -> usize {
    size + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSummary {
    pub size: usize,
    pub decidable: usize,
    pub orange: usize,
    pub fraction: f64,
    /// Binomial standard error under probability 1/2.
    pub sigma: f64,
    /// `(fraction - 1/2) / sigma`.
    pub z: f64,
}

/// `trials` centred boxes per size, in size-major trial order.
pub fn box_pipeline(sizes: &[usize], trials: usize, seed: u64, jobs: usize) -> Result<(Vec<BoxRecord>, Vec<CrossingSummary>)> {
    if sizes.is_empty() || trials == 0 || sizes.contains(&0) {
        return Err(Error::Domain("need positive sizes and trials".into()));
    }
    let recs = run_grid(sizes.len(), trials, jobs, |i, t| box_trial(sizes[i], box_halfwidth(sizes[i]), seed, t))?;
    let summaries = sizes
        .iter()
        .zip(&recs)
        .map(|(&size, rs)| {
            let decidable = rs.iter().filter(|r| r.decidable).count();
            let orange = rs.iter().filter(|r| r.outcome == Some(BoxOutcome::OrangeTopToBottom)).count();
            let fraction = orange as f64 / decidable as f64;
            let sigma = 0.5 / (decidable as f64).sqrt();
            CrossingSummary { size, decidable, orange, fraction, sigma, z: (fraction - 0.5) / sigma }
        })
        .collect();
    Ok((recs.into_iter().flatten().collect(), summaries))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub trial: usize,
    pub involution: bool,
    pub noncrossing: bool,
    pub j0_unmatched_below: bool,
    pub gamma_open: bool,
    pub certain_pairs: usize,
    pub truncated: usize,
    pub shields: usize,
    pub gamma_negative_hits: usize,
    pub gamma_positive_hits: usize,
}

impl StructuralReport {
    pub fn ok(&self) -> bool {
        self.involution && self.noncrossing && self.j0_unmatched_below && self.gamma_open
    }
}

/// Half-plane checks on one window: the boundary matching of the cut
/// system is an involution and non-crossing where certain, and in the
/// pointed system 0 has no lower arc and its path stays open.
pub fn structural_trial(halfwidth: usize, seed: u64, trial: usize) -> Result<StructuralReport> {
    let mut rng = trial_rng(seed, label::HALF_PLANE ^ halfwidth as u64, trial as u64);
    let (l, r) = sample_two_sided(halfwidth, 0.0, &mut rng);
    let mut w = build_uihpms_by_reflection(&l, &r)?;
    good_boundary_points(&mut w, &mut rng);
    let (bm, _) = boundary_matching(&w)?;
    let p = build_pihpms(&l, &r)?;
    let zero = p.system.slot(0).ok_or_else(|| Error::Window("0 outside window".into()))?;
    let g = trace_gamma_circ(&p)?;
    Ok(StructuralReport {
        trial,
        involution: bm.is_involution(),
        noncrossing: bm.is_noncrossing(),
        j0_unmatched_below: p.system.lower.partner[zero] == UNMATCHED,
        gamma_open: !g.closed,
        certain_pairs: bm.phi.len(),
        truncated: bm.truncated.len(),
        shields: bm.shields(),
        gamma_negative_hits: g.negative_hits,
        gamma_positive_hits: g.positive_hits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleVariant {
    /// Finite system of size `n`.
    Uniform,
    /// Finite system whose lower walk is a bridge to the boundary target.
    Boundary,
    /// Window `[-n, n]` of the whole-plane system.
    Uims,
    /// Window of the half-plane system built from the reflected lower walk.
    Uihpms,
    /// Window of the pointed half-plane system.
    Pihpms,
}

impl SampleVariant {
    pub const ALL: [SampleVariant; 5] =
        [SampleVariant::Uniform, SampleVariant::Boundary, SampleVariant::Uims, SampleVariant::Uihpms, SampleVariant::Pihpms];

    pub fn as_str(self) -> &'static str {
        match self {
            SampleVariant::Uniform => "uniform",
            SampleVariant::Boundary => "boundary",
            SampleVariant::Uims => "uims",
            SampleVariant::Uihpms => "uihpms",
            SampleVariant::Pihpms => "pihpms",
        }
    }

    fn is_window(self) -> bool {
        matches!(self, SampleVariant::Uims | SampleVariant::Uihpms | SampleVariant::Pihpms)
    }
}

impl fmt::Display for SampleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SampleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SampleVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown variant {s:?}")))
    }
}

/// Parse `"A,B"` into a pair of boundary ranks.
pub fn parse_marked(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Domain(format!("expected marked ranks as A,B, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub variant: SampleVariant,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Step correlation of the two walks; whole-plane windows only.
    pub correlation: Option<f64>,
    /// Number of boundary points; defaults to `2 floor(sqrt n)`.
    pub boundary_target: Option<u64>,
    /// Boundary ranks left free when linking; with-boundary systems only.
    pub marked: Option<(usize, usize)>,
    pub top_k: usize,
    pub dump: bool,
}

impl SampleConfig {
    pub fn new(variant: SampleVariant, n: usize, trials: usize, seed: u64) -> Self {
        SampleConfig { variant, n, trials, seed, correlation: None, boundary_target: None, marked: None, top_k: 5, dump: false }
    }

    /// Reject flag combinations that do not apply to the variant.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Domain(m));
        if self.n == 0 || self.trials == 0 {
            return fail("n and trials must be positive".into());
        }
        if let Some(rho) = self.correlation {
            if self.variant != SampleVariant::Uims {
                return fail(format!("--correlation applies to the uims variant, not {}", self.variant));
            }
            if !(-1.0..=1.0).contains(&rho) {
                return fail(format!("correlation must lie in [-1, 1], got {rho}"));
            }
        }
        if self.variant != SampleVariant::Boundary && (self.boundary_target.is_some() || self.marked.is_some()) {
            return fail(format!("--boundary-target and --marked apply to the boundary variant, not {}", self.variant));
        }
        if let Some(t) = self.boundary_target {
            if t % 2 != 0 || t > 2 * self.n as u64 {
                return fail(format!("boundary target must be even and at most 2n, got {t}"));
            }
        }
        if self.dump && !matches!(self.variant, SampleVariant::Uihpms | SampleVariant::Pihpms) {
            return fail("window dumps exist for the uihpms and pihpms variants only".into());
        }
        Ok(())
    }
}

/// Everything one sampled trial contributes to the outputs.
#[derive(Debug, Clone)]
pub struct SampleOutput {
    pub rows: Vec<ObservableRow>,
    pub gamma: Option<GammaCirc>,
    pub dump: Option<WindowDump>,
}

fn half_plane_walks(n: usize, seed: u64, trial: usize) -> (TrialRng, (Walk, Walk)) {
    let mut rng = trial_rng(seed, label::HALF_PLANE ^ n as u64, trial as u64);
    let walks = sample_two_sided(n, 0.0, &mut rng);
    (rng, walks)
}

/// One trial of `sample`. Loop statistics count closed loops only; the
/// crossing line sits at `n` for finite systems and at 0 for windows.
pub fn sample_trial(cfg: &SampleConfig, trial: usize) -> Result<SampleOutput> {
    let (n, seed) = (cfg.n, cfg.seed);
    let variant = cfg.variant.as_str();
    let mid = if cfg.variant.is_window() { 0 } else { n as i64 };
    let obs = |sys: &MeandricSystem| observables(sys, seed, trial, n, variant, mid, cfg.top_k);
    match cfg.variant {
        SampleVariant::Uniform => {
            let (sys, _) = loop_sample(n, seed, trial, None);
            Ok(SampleOutput { rows: obs(&sys), gamma: None, dump: None })
        }
        SampleVariant::Uims => {
            let (sys, _) = loop_sample(n, seed, trial, Some(cfg.correlation.unwrap_or(0.0)));
            Ok(SampleOutput { rows: obs(&sys), gamma: None, dump: None })
        }
        SampleVariant::Boundary => {
            let sys = boundary_system(n, seed, trial, cfg.boundary_target, cfg.marked.map(Some))?;
            Ok(SampleOutput { rows: obs(&sys), gamma: None, dump: None })
        }
        SampleVariant::Uihpms => {
            let (mut rng, (l, r)) = half_plane_walks(n, seed, trial);
            let mut w = build_uihpms_by_reflection(&l, &r)?;
            good_boundary_points(&mut w, &mut rng);
            let rows = obs(&w.system);
            let dump = if cfg.dump {
                let (bm, paths) = boundary_matching(&w)?;
                Some(WindowDump::new(&w, Some(bm), paths, None))
            } else {
                None
            };
            Ok(SampleOutput { rows, gamma: None, dump })
        }
        SampleVariant::Pihpms => {
            let (_, (l, r)) = half_plane_walks(n, seed, trial);
            let p = build_pihpms(&l, &r)?;
            let g = trace_gamma_circ(&p)?;
            let dump = cfg.dump.then(|| WindowDump::new(&p, None, Vec::new(), Some(g.clone())));
            Ok(SampleOutput { rows: obs(&p.system), gamma: Some(g), dump })
        }
    }
}

/// All trials of `sample`, in trial order.
pub fn sample_pipeline(cfg: &SampleConfig, jobs: usize) -> Result<Vec<SampleOutput>> {
    cfg.validate()?;
    Ok(run_grid(1, cfg.trials, jobs, |_, t| sample_trial(cfg, t))?.remove(0))
}

/// With-boundary system of size `n`. `link = Some(marks)` joins the
/// boundary points in consecutive pairs, leaving the two marked ranks free
/// when `marks` is given; `None` leaves every boundary point open.
pub fn boundary_system(
    n: usize,
    seed: u64,
    trial: usize,
    target: Option<u64>,
    link: Option<Option<(usize, usize)>>,
) -> Result<MeandricSystem> {
    let mut rng = trial_rng(seed, label::BOUNDARY ^ n as u64, trial as u64);
    let target = target.unwrap_or_else(|| default_boundary_target(n));
    let mut sys = MeandricSystem::sample_with_boundary(n, target, &mut rng)?;
    if let Some(marks) = link {
        sys.link_boundary(marks)?;
    }
    Ok(sys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedVariant {
    /// Every boundary point linked: only closed loops.
    Boundary,
    /// Two marked boundary points left free: one open chordal path.
    PihpmsFinite,
}

impl EmbedVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbedVariant::Boundary => "boundary",
            EmbedVariant::PihpmsFinite => "pihpms-finite",
        }
    }
}

impl fmt::Display for EmbedVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbedVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boundary" => Ok(EmbedVariant::Boundary),
            "pihpms-finite" => Ok(EmbedVariant::PihpmsFinite),
            _ => Err(Error::Domain(format!("unknown embed variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Picture {
    pub system: MeandricSystem,
    pub decomposition: LoopDecomposition,
    pub embedding: Embedding,
    /// Boundary ranks left free, if any.
    pub marked_ranks: Option<(usize, usize)>,
}

/// Sample a with-boundary system, link its boundary and embed the map with
/// the boundary points on the unit circle.
pub fn boundary_picture(
    variant: EmbedVariant,
    n: usize,
    seed: u64,
    marked: Option<(usize, usize)>,
    tol: f64,
    max_iters: usize,
) -> Result<Picture> {
    if variant == EmbedVariant::Boundary && marked.is_some() {
        return Err(Error::Domain("--marked applies to the pihpms-finite variant".into()));
    }
    let sys = boundary_system(n, seed, 0, None, None)?;
    let boundary = sys.boundary_positions();
    let marked_ranks = match variant {
        EmbedVariant::Boundary => None,
        EmbedVariant::PihpmsFinite => Some(match marked {
            Some(m) => m,
            None => default_marked_ranks(&boundary, n)
                .ok_or_else(|| Error::Domain("need at least two boundary points to mark".into()))?,
        }),
    };
    let map = PlanarMap::build(&sys);
    let pinned: Vec<u32> = boundary.iter().map(|&p| sys.slot(p).unwrap() as u32).collect();
    let mut linked = sys;
    linked.link_boundary(marked_ranks)?;
    let embedding = tutte_embed(&map, &pinned, tol, max_iters)?;
    Ok(Picture { decomposition: decompose(&linked), system: linked, embedding, marked_ranks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_names_round_trip() {
        for s in ["loop_k=1", "loop_k=5", "cross", "diameter"] {
            assert_eq!(s.parse::<Statistic>().unwrap().to_string(), s);
        }
        assert!("loop_k=0".parse::<Statistic>().is_err());
        assert!("size".parse::<Statistic>().is_err());
    }

    #[test]
    fn grid_is_ordered_and_job_independent() {
        let f = |i: usize, t: usize| Ok(loop_statistic(Statistic::LoopK(1), 10 + i, 5, t, None));
        let a = run_grid(3, 7, 1, f).unwrap();
        let b = run_grid(3, 7, 4, f).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[1][3], loop_statistic(Statistic::LoopK(1), 11, 5, 3, None));
    }

    #[test]
    fn single_trial_median_is_raw_value() {
        let cfg = ExponentConfig::new(Statistic::LoopK(1), vec![8, 16, 32, 64], 1, 9);
        let r = median_pipeline(&cfg).unwrap();
        for (i, &n) in cfg.sizes.iter().enumerate() {
            assert_eq!(r.medians[i], loop_statistic(Statistic::LoopK(1), n, 9, 0, None));
        }
        assert!(r.slope.is_finite());
    }

    #[test]
    fn diameter_pipeline_records() {
        let mut cfg = ExponentConfig::new(Statistic::Diameter, vec![16, 32, 64], 3, 2);
        let r = median_pipeline(&cfg).unwrap();
        assert_eq!(r.diameters.len(), 9);
        assert!(r.diameters.iter().all(|d| d.loop_diameter_lb.unwrap() <= d.diameter_lb));
        cfg.map_kind = MapKind::Mcrt;
        let r = median_pipeline(&cfg).unwrap();
        assert!(r.diameters.iter().all(|d| d.map_kind == MapKind::Mcrt && d.loop_rank.is_none()));
    }

    #[test]
    fn box_window_sizes() {
        for size in [1, 3, 6] {
            let r = box_trial(size, box_halfwidth(size), 1, 0).unwrap();
            assert!(r.decidable);
            assert_eq!(r.root, 0.5 - size as f64);
            let r = box_trial(size, box_halfwidth(size) - 1, 1, 0).unwrap();
            assert!(!r.decidable && r.outcome.is_none());
        }
    }

    #[test]
    fn sample_flags_checked() {
        let mut c = SampleConfig::new(SampleVariant::Uniform, 10, 2, 1);
        assert!(c.validate().is_ok());
        c.correlation = Some(0.5);
        assert!(c.validate().is_err());
        c.variant = SampleVariant::Uims;
        assert!(c.validate().is_ok());
        c.marked = Some((0, 1));
        assert!(c.validate().is_err());
        let mut c = SampleConfig::new(SampleVariant::Boundary, 10, 2, 1);
        c.boundary_target = Some(3);
        assert!(c.validate().is_err());
        c.boundary_target = Some(4);
        c.marked = Some((0, 3));
        assert!(c.validate().is_ok());
        c.dump = true;
        assert!(c.validate().is_err());
        assert_eq!(parse_marked("0, 3").unwrap(), (0, 3));
        assert!(parse_marked("0").is_err());
    }

    #[test]
    fn sample_variants_run() {
        for v in SampleVariant::ALL {
            let mut c = SampleConfig::new(v, 50, 3, 4);
            c.dump = matches!(v, SampleVariant::Uihpms | SampleVariant::Pihpms);
            let out = sample_pipeline(&c, 2).unwrap();
            assert_eq!(out.len(), 3);
            for (t, o) in out.iter().enumerate() {
                assert_eq!(o.rows.len(), 5);
                assert!(o.rows.iter().all(|r| r.trial == t && r.variant == v.as_str()));
                assert_eq!(o.gamma.is_some(), v == SampleVariant::Pihpms);
                assert_eq!(o.dump.is_some(), c.dump);
            }
        }
    }

    #[test]
    fn marked_picture_has_one_open_path() {
        let p = boundary_picture(EmbedVariant::PihpmsFinite, 200, 3, None, 1e-9, 2000).unwrap();
        assert_eq!(p.decomposition.open_paths.len(), 1);
        let p = boundary_picture(EmbedVariant::Boundary, 200, 3, None, 1e-9, 2000).unwrap();
        assert!(p.decomposition.open_paths.is_empty());
        assert_eq!(p.embedding.coords.len(), 400);
        assert!(boundary_picture(EmbedVariant::Boundary, 200, 3, Some((0, 1)), 1e-9, 2000).is_err());
    }

    #[test]
    fn box_summary_counts() {
        let (recs, sum) = box_pipeline(&[1, 2], 400, 8, 2).unwrap();
        assert_eq!(recs.len(), 800);
        assert_eq!(sum[1].decidable, 400);
        let orange = recs[400..].iter().filter(|r| r.outcome == Some(BoxOutcome::OrangeTopToBottom)).count();
        assert_eq!(sum[1].orange, orange);
        assert!(sum.iter().all(|s| s.z.abs() < 5.0));
    }

    #[test]
    fn structural_trial_passes() {
        for t in 0..20 {
            assert!(structural_trial(200, 3, t).unwrap().ok());
        }
    }
}
