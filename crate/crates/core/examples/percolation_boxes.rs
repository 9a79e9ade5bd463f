// Matching-partition bijection and box crossings.

use meandrix::arcs::{ArcDiagram, Side};
use meandrix::percolation::{matching_to_partition, partition_to_matching, Grid};
use meandrix::pipeline::box_pipeline;

pub fn run_example() -> meandrix::Result<()> {
    let m = ArcDiagram::from_pairs(6, 1, Side::Upper, &[(1, 6), (2, 3), (4, 5)])?;
    let orange = matching_to_partition(&m, Grid::MinusHalf)?;
    let green = matching_to_partition(&m, Grid::PlusHalf)?;
    println!("orange blocks {:?}, green blocks {:?}", orange.blocks(), green.blocks());
    assert_eq!(partition_to_matching(&orange)?, m);
    assert_eq!(partition_to_matching(&green)?, m);

    let (_, summary) = box_pipeline(&[1, 4, 16], 5000, 3, 2)?;
    for s in summary {
        println!("box size {:>2}: orange crosses in {:.3} of {} boxes (z {:+.2})", s.size, s.fraction, s.decidable, s.z);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> meandrix::Result<()> {
    run_example()
}
