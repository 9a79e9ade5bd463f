// Sample a uniform meandric system and report its largest loops.

use meandrix::loops::{crossing_count, decompose};
use meandrix::rng::trial_rng;
use meandrix::system::MeandricSystem;

pub fn run_example() -> meandrix::Result<()> {
    let n = 10_000;
    let mut rng = trial_rng(42, 0, 0);
    let sys = MeandricSystem::sample_uniform(n, &mut rng);
    let d = decompose(&sys);
    println!("n={n}: {} loops", d.n_loops());
    for k in 1..=3 {
        println!("  loop {k}: {} vertices", d.kth_largest_loop_size(k));
    }
    println!("  largest loop crosses x=n {} times", crossing_count(&sys, &d, n as i64));
    assert_eq!(sys.n_points(), 2 * n);
    Ok(())
}

#[allow(dead_code)]
fn main() -> meandrix::Result<()> {
    run_example()
}
