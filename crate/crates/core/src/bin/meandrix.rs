use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use meandrix::map::MapKind;
use meandrix::output::{
    io_err, write_boxes, write_exponent, write_gamma, write_json, write_observables, OutDir, RunManifest, MANIFEST_HEADER,
};
use meandrix::pipeline::{
    box_pipeline, boundary_picture, median_pipeline, parse_marked, sample_pipeline, EmbedVariant, ExponentConfig,
    SampleConfig, SampleVariant, Statistic,
};
use meandrix::tutte::{write_embedding_csv, write_svg};
use meandrix::verify::{run_suites, Suite};
use meandrix::Error;

#[derive(Parser)]
#[command(name = "meandrix", version, about = "Random meandric systems: sampling, exponents and exact checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    out: PathBuf,
    /// Worker threads for trial fan-out.
    #[arg(long, env = "MEANDRIX_JOBS", default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Per-trial loop observables for one variant.
    Sample(SampleArgs),
    /// Median log-log exponent of a statistic over a size grid.
    Exponent(ExponentArgs),
    /// Exhaustive small-size suites.
    Verify(VerifyArgs),
    /// Tutte-embedded loop picture of a with-boundary system.
    Embed(EmbedArgs),
    /// Box-crossing frequencies in whole-plane windows.
    Crossing(CrossingArgs),
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    variant: SampleVariant,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_hyphen_values = true)]
    correlation: Option<f64>,
    #[arg(long)]
    boundary_target: Option<u64>,
    #[arg(long, value_parser = parse_marked)]
    marked: Option<(usize, usize)>,
    /// Largest loops reported per trial.
    #[arg(long, default_value_t = 5)]
    top_k: usize,
    /// Write one JSON window dump per trial (half-plane variants).
    #[arg(long)]
    dump: bool,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MapArg {
    Meander,
    Mcrt,
}

#[derive(Args, Serialize)]
struct ExponentArgs {
    /// loop_k=K, cross or diameter.
    #[arg(long)]
    statistic: Statistic,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "meander")]
    map_kind: MapArg,
    #[arg(long, allow_hyphen_values = true)]
    correlation: Option<f64>,
    /// Brownian samples per unit time for mated-CRT maps.
    #[arg(long, default_value_t = 8)]
    resolution: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// catalan, parity, levy, bijection, bounds, matching or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Also write report.json and a manifest here.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct EmbedArgs {
    #[arg(long)]
    variant: EmbedVariant,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long, value_parser = parse_marked)]
    marked: Option<(usize, usize)>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Defaults to 10 n.
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct CrossingArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
    sizes: Vec<usize>,
    /// Boxes per size.
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

fn finish(mut manifest: RunManifest, out: OutDir, start: Instant) -> Result<(), Error> {
    manifest.outputs = out.written;
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(&out.root)
}

fn sample(a: SampleArgs, start: Instant) -> Result<(), Error> {
    let cfg = SampleConfig {
        variant: a.variant,
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        correlation: a.correlation,
        boundary_target: a.boundary_target,
        marked: a.marked,
        top_k: a.top_k,
        dump: a.dump,
    };
    cfg.validate()?;
    let outputs = sample_pipeline(&cfg, a.common.jobs)?;
    let mut out = OutDir::create(&a.common.out)?;
    write_observables(&out.file("observables.csv")?, outputs.iter().flat_map(|o| &o.rows))?;
    if a.variant == SampleVariant::Pihpms {
        write_gamma(&out.file("gamma_circ.csv")?, &outputs)?;
    }
    for (t, o) in outputs.iter().enumerate() {
        if let Some(d) = &o.dump {
            write_json(&out.file(&format!("dumps/trial_{t:05}.json"))?, d)?;
        }
    }
    println!("{} trials of {} at n={} -> {}", a.trials, a.variant, a.n, out.root.display());
    finish(RunManifest::new("sample", &a, Some(a.seed))?, out, start)
}

fn exponent(a: ExponentArgs, start: Instant) -> Result<(), Error> {
    let map_kind = match a.map_kind {
        MapArg::Meander => MapKind::Meander,
        MapArg::Mcrt => MapKind::Mcrt,
    };
    if map_kind == MapKind::Mcrt && a.statistic != Statistic::Diameter {
        return Err(Error::Domain("--map-kind mcrt needs --statistic diameter".into()));
    }
    if a.correlation.is_some() && a.statistic == Statistic::Diameter {
        return Err(Error::Domain("--correlation applies to loop statistics".into()));
    }
    if a.sizes.contains(&0) || a.resolution == 0 {
        return Err(Error::Domain("sizes and resolution must be positive".into()));
    }
    let cfg = ExponentConfig {
        statistic: a.statistic,
        sizes: a.sizes.clone(),
        trials: a.trials,
        seed: a.seed,
        map_kind,
        correlation: a.correlation,
        resolution: a.resolution,
        jobs: a.common.jobs,
    };
    let r = median_pipeline(&cfg)?;
    let mut out = OutDir::create(&a.common.out)?;
    write_exponent(&mut out, &r)?;
    println!("{}: slope {:.4}, 95% CI [{:.4}, {:.4}]", r.statistic, r.slope, r.ci[0], r.ci[1]);
    finish(RunManifest::new("exponent", &a, Some(a.seed))?, out, start)
}

/// Returns whether every suite passed.
fn verify(a: VerifyArgs, start: Instant) -> Result<bool, Error> {
    let suites: Vec<Suite> = match a.suite.as_str() {
        "all" => Suite::ALL.to_vec(),
        s => vec![s.parse()?],
    };
    let reports = run_suites(&suites)?;
    for r in &reports {
        print!("{r}");
    }
    if let Some(dir) = &a.out {
        let mut out = OutDir::create(dir)?;
        write_json(&out.file("report.json")?, &reports)?;
        finish(RunManifest::new("verify", &a, None)?, out, start)?;
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn embed(a: EmbedArgs, start: Instant) -> Result<(), Error> {
    if a.n == 0 || !(a.tol > 0.0) {
        return Err(Error::Domain("n and tol must be positive".into()));
    }
    let max_iters = a.max_iters.unwrap_or(10 * a.n);
    let p = boundary_picture(a.variant, a.n, a.seed, a.marked, a.tol, max_iters)?;
    let mut out = OutDir::create(&a.out)?;
    let csv = fs::File::create(out.file("embedding.csv")?).map_err(io_err)?;
    write_embedding_csv(&p.embedding, &p.decomposition, Some(MANIFEST_HEADER), csv)?;
    let svg = fs::File::create(out.file("embedding.svg")?).map_err(io_err)?;
    write_svg(&p.embedding, &p.decomposition, a.top_k, svg)?;
    println!(
        "{} vertices, {} loops, residual {:.2e} after {} iterations -> {}",
        p.embedding.coords.len(),
        p.decomposition.n_loops(),
        p.embedding.residual,
        p.embedding.iterations,
        out.root.display()
    );
    let mut m = RunManifest::new("embed", &a, Some(a.seed))?;
    if let serde_json::Value::Object(o) = &mut m.config {
        o.insert("max_iters".into(), max_iters.into());
        o.insert("marked_ranks".into(), serde_json::to_value(p.marked_ranks).map_err(io_err)?);
    }
    finish(m, out, start)
}

fn crossing(a: CrossingArgs, start: Instant) -> Result<(), Error> {
    let (recs, summary) = box_pipeline(&a.sizes, a.trials, a.seed, a.common.jobs)?;
    let mut out = OutDir::create(&a.common.out)?;
    write_boxes(&out.file("crossing.csv")?, &recs)?;
    write_json(&out.file("crossing_summary.json")?, &summary)?;
    for s in &summary {
        println!("size {}: {} / {} orange, fraction {:.4}, z {:+.2}", s.size, s.orange, s.decidable, s.fraction, s.z);
    }
    finish(RunManifest::new("crossing", &a, Some(a.seed))?, out, start)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Falsified(_) => 1,
        Error::NoConvergence { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Sample(a) => sample(a, start),
        Command::Exponent(a) => exponent(a, start),
        Command::Embed(a) => embed(a, start),
        Command::Crossing(a) => crossing(a, start),
        Command::Verify(a) => match verify(a, start) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
