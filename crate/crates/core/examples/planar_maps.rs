// Graph diameters of the meandric map and a mated-CRT window.

use meandrix::map::{map_diameter_estimate, PlanarMap};
use meandrix::mcrt::sample_mated_crt;
use meandrix::rng::trial_rng;
use meandrix::system::MeandricSystem;

pub fn run_example() -> meandrix::Result<()> {
    for n in [1 << 10, 1 << 13, 1 << 16] {
        let sys = MeandricSystem::sample_uniform(n, &mut trial_rng(9, 0, n as u64));
        let meander = map_diameter_estimate(&PlanarMap::build(&sys), 4);
        let crt = sample_mated_crt(n, 8, &mut trial_rng(9, 1, n as u64));
        let mated = map_diameter_estimate(&crt, 4);
        println!(
            "2n={:>7}: meander diameter >= {} ({}), mated-CRT >= {} ({})",
            2 * n,
            meander.lower_bound,
            meander.method.as_str(),
            mated.lower_bound,
            mated.method.as_str()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> meandrix::Result<()> {
    run_example()
}
