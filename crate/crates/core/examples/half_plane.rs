// Half-plane windows: boundary matching and the path from the origin.

use meandrix::infinite::{boundary_matching, build_pihpms, build_uihpms_by_reflection, good_boundary_points, trace_gamma_circ};
use meandrix::rng::trial_rng;
use meandrix::sample::sample_two_sided;

pub fn run_example() -> meandrix::Result<()> {
    let mut rng = trial_rng(5, 0, 0);
    let (l, r) = sample_two_sided(2000, 0.0, &mut rng);

    let mut w = build_uihpms_by_reflection(&l, &r)?;
    good_boundary_points(&mut w, &mut rng);
    let (phi, paths) = boundary_matching(&w)?;
    println!(
        "{} boundary points, {} good, {} matched with certainty, {} truncated paths",
        w.boundary.len(),
        w.good.len(),
        phi.phi.len(),
        phi.truncated.len()
    );
    assert!(phi.is_involution() && phi.is_noncrossing());
    assert_eq!(paths.len(), w.good.len());

    let p = build_pihpms(&l, &r)?;
    let g = trace_gamma_circ(&p)?;
    println!("path from 0: {} vertices, leaves the window ({:?})", g.vertices.len(), g.terminal.kind);
    assert!(!g.closed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> meandrix::Result<()> {
    run_example()
}
