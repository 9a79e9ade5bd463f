// Tutte embedding of a with-boundary system with two marked points.

use std::fs::File;

use meandrix::output::io_err;
use meandrix::pipeline::{boundary_picture, EmbedVariant};
use meandrix::tutte::{write_embedding_csv, write_svg};

pub fn run_example() -> meandrix::Result<()> {
    let n = 3000;
    let p = boundary_picture(EmbedVariant::PihpmsFinite, n, 11, None, 1e-9, 10 * n)?;
    let dir = std::env::temp_dir().join("meandrix-tutte-example");
    std::fs::create_dir_all(&dir).map_err(io_err)?;
    write_svg(&p.embedding, &p.decomposition, 8, File::create(dir.join("loops.svg")).map_err(io_err)?)?;
    write_embedding_csv(&p.embedding, &p.decomposition, None, File::create(dir.join("loops.csv")).map_err(io_err)?)?;
    println!(
        "marked ranks {:?}, {} loops, residual {:.1e} in {} iterations, written to {}",
        p.marked_ranks,
        p.decomposition.n_loops(),
        p.embedding.residual,
        p.embedding.iterations,
        dir.display()
    );
    assert_eq!(p.decomposition.open_paths.len(), 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> meandrix::Result<()> {
    run_example()
}
