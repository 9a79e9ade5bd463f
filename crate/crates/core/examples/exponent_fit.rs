// Median largest-loop size over a small size grid and its log-log slope.

use meandrix::pipeline::{median_pipeline, ExponentConfig, Statistic};
use meandrix::stats::largest_loop_exponent;

pub fn run_example() -> meandrix::Result<()> {
    let sizes = vec![256, 512, 1024, 2048, 4096];
    let mut cfg = ExponentConfig::new(Statistic::LoopK(1), sizes, 25, 1);
    cfg.jobs = 2;
    let r = median_pipeline(&cfg)?;
    for (n, m) in r.sizes.iter().zip(&r.medians) {
        println!("2n={:>6}  median |l1|={m}", 2 * n);
    }
    println!(
        "slope {:.3} in [{:.3}, {:.3}], prediction {:.4}",
        r.slope,
        r.ci[0],
        r.ci[1],
        largest_loop_exponent()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> meandrix::Result<()> {
    run_example()
}
