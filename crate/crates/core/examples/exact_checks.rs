// Run the exhaustive small-size suites.

use meandrix::verify::{run_suites, Suite};

pub fn run_example() -> meandrix::Result<()> {
    let reports = run_suites(&Suite::ALL)?;
    for r in &reports {
        print!("{r}");
    }
    assert!(reports.iter().all(|r| r.passed()));
    Ok(())
}

#[allow(dead_code)]
fn main() -> meandrix::Result<()> {
    run_example()
}
