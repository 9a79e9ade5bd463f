//! Harmonic (Tutte) embedding in the unit disk and picture output.
//!
//! Boundary vertices are pinned at equal angles on the unit circle; every
//! other vertex sits at the average of its neighbours. The Laplacian uses
//! the map with multi-edges collapsed. The interior system is solved by
//! conjugate gradients with a Jacobi preconditioner, one solve per axis.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loops::LoopDecomposition;
use crate::map::PlanarMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub coords: Vec<(f64, f64)>,
    pub boundary_order: Vec<u32>,
    /// Largest `|coord - mean(neighbours)|` over interior vertices.
    pub residual: f64,
    pub iterations: usize,
}

/// Largest deviation from the mean-value property over non-pinned vertices.
pub fn mean_value_residual(map: &PlanarMap, pinned: &[bool], xs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for v in 0..map.n_vertices() {
        if pinned[v] || map.degree(v) == 0 {
            continue;
        }
        let nb = map.neighbors(v);
        let mean = nb.iter().map(|&w| xs[w as usize]).sum::<f64>() / nb.len() as f64;
        worst = worst.max((xs[v] - mean).abs());
    }
    worst
}

/// `y = D x - A x` restricted to free vertices, pinned entries zero.
fn apply(map: &PlanarMap, pinned: &[bool], x: &[f64], y: &mut [f64]) {
    for v in 0..map.n_vertices() {
        if pinned[v] {
            y[v] = 0.0;
            continue;
        }
        let nb = map.neighbors(v);
        let mut s = nb.len() as f64 * x[v];
        for &w in nb {
            if !pinned[w as usize] {
                s -= x[w as usize];
            }
        }
        y[v] = s;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve one axis in place; `x` holds pinned values on entry.
fn solve_axis(map: &PlanarMap, pinned: &[bool], x: &mut [f64], tol: f64, max_iters: usize) -> Result<usize> {
    let n = map.n_vertices();
    let deg: Vec<f64> = (0..n).map(|v| map.degree(v) as f64).collect();
    // Right-hand side: pinned neighbour sums.
    let mut b = vec![0.0; n];
    for v in 0..n {
        if !pinned[v] {
            b[v] = map.neighbors(v).iter().filter(|&&w| pinned[w as usize]).map(|&w| x[w as usize]).sum();
        }
    }
    let mut ax = vec![0.0; n];
    apply(map, pinned, x, &mut ax);
    let mut r: Vec<f64> = (0..n).map(|v| if pinned[v] { 0.0 } else { b[v] - ax[v] }).collect();
    let mut z: Vec<f64> = (0..n).map(|v| if pinned[v] { 0.0 } else { r[v] / deg[v] }).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    // Residual of the mean-value identity is exactly |r_v| / deg_v = |z_v|.
    let mv = |z: &[f64]| z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut it = 0;
    while mv(&z) > tol {
        if it >= max_iters {
            return Err(Error::NoConvergence { iters: it, residual: mv(&z) });
        }
        apply(map, pinned, &p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for v in 0..n {
            x[v] += alpha * p[v];
            r[v] -= alpha * ap[v];
        }
        for v in 0..n {
            z[v] = if pinned[v] { 0.0 } else { r[v] / deg[v] };
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for v in 0..n {
            p[v] = z[v] + beta * p[v];
        }
        it += 1;
    }
    Ok(it)
}

/// Tutte embedding with `boundary` pinned in cyclic order at equal angles.
pub fn tutte_embed(map: &PlanarMap, boundary: &[u32], tol: f64, max_iters: usize) -> Result<Embedding> {
    if boundary.is_empty() {
        return Err(Error::Domain("boundary must be nonempty".into()));
    }
    let simple = map.simple();
    let n = simple.n_vertices();
    let mut pinned = vec![false; n];
    let mut xs = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let k = boundary.len() as f64;
    for (i, &v) in boundary.iter().enumerate() {
        if pinned[v as usize] {
            return Err(Error::Domain(format!("vertex {v} repeated on the boundary")));
        }
        let theta = std::f64::consts::TAU * i as f64 / k;
        pinned[v as usize] = true;
        xs[v as usize] = theta.cos();
        ys[v as usize] = theta.sin();
    }
    let ix = solve_axis(&simple, &pinned, &mut xs, tol, max_iters)?;
    let iy = solve_axis(&simple, &pinned, &mut ys, tol, max_iters)?;
    let residual = mean_value_residual(&simple, &pinned, &xs).max(mean_value_residual(&simple, &pinned, &ys));
    Ok(Embedding {
        coords: xs.into_iter().zip(ys).collect(),
        boundary_order: boundary.to_vec(),
        residual,
        iterations: ix.max(iy),
    })
}

/// Per-vertex loop rank (1 = largest); 0 for vertices on open paths.
pub fn vertex_ranks(decomp: &LoopDecomposition) -> Vec<usize> {
    let ranks = decomp.ranks();
    (0..decomp.n_points()).map(|v| decomp.loop_of(v).map_or(0, |l| ranks[l])).collect()
}

/// CSV `vertex,x,y,loop_rank`.
pub fn write_embedding_csv<W: Write>(emb: &Embedding, decomp: &LoopDecomposition, header: Option<&str>, w: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(w);
    let io = |e: std::io::Error| Error::Domain(e.to_string());
    if let Some(h) = header {
        writeln!(w, "{h}").map_err(io)?;
    }
    let mut csv = csv::Writer::from_writer(w);
    let to = |e: csv::Error| Error::Domain(e.to_string());
    csv.write_record(["vertex", "x", "y", "loop_rank"]).map_err(to)?;
    for (v, (&(x, y), r)) in emb.coords.iter().zip(vertex_ranks(decomp)).enumerate() {
        csv.write_record([v.to_string(), format!("{x:.9}"), format!("{y:.9}"), r.to_string()]).map_err(to)?;
    }
    csv.flush().map_err(io)?;
    Ok(())
}

/// Rank colour: hue sweeps from red (rank 1) to violet (rank `top_k`).
fn rank_color(rank: usize, top_k: usize) -> String {
    let t = if top_k <= 1 { 0.0 } else { (rank - 1) as f64 / (top_k - 1) as f64 };
    let h = 280.0 * t;
    format!("hsl({h:.1},85%,45%)")
}

/// SVG 1.1 picture: top-`k` loops coloured by rank, other loops gray, open
/// paths (the marked-to-marked path) red and thick.
pub fn write_svg<W: Write>(emb: &Embedding, decomp: &LoopDecomposition, top_k: usize, w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Domain(e.to_string());
    let mut w = std::io::BufWriter::new(w);
    let size = 1000.0;
    let pt = |v: u32| {
        let (x, y) = emb.coords[v as usize];
        (size / 2.0 * (1.0 + 0.95 * x), size / 2.0 * (1.0 - 0.95 * y))
    };
    let points = |vs: &[u32], closed: bool| {
        let mut s = String::with_capacity(vs.len() * 16);
        for &v in vs.iter().chain(if closed { vs.first() } else { None }) {
            let (x, y) = pt(v);
            s.push_str(&format!("{x:.2},{y:.2} "));
        }
        s.pop();
        s
    };
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#).map_err(io)?;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .map_err(io)?;
    writeln!(w, r#"<rect width="{size}" height="{size}" fill="white"/>"#).map_err(io)?;
    writeln!(w, r#"<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="black" stroke-width="1"/>"#, c = size / 2.0, r = size / 2.0 * 0.95).map_err(io)?;
    let ranks = decomp.ranks();
    let mut colored = Vec::new();
    writeln!(w, r##"<g fill="none" stroke="#b0b0b0" stroke-width="0.3">"##).map_err(io)?;
    for l in 0..decomp.n_loops() {
        if ranks[l] <= top_k {
            colored.push(l);
        } else {
            writeln!(w, r#"<polyline points="{}"/>"#, points(decomp.loop_slots(l), true)).map_err(io)?;
        }
    }
    writeln!(w, "</g>").map_err(io)?;
    // Largest loops drawn last so they stay on top.
    colored.sort_by_key(|&l| std::cmp::Reverse(ranks[l]));
    writeln!(w, r#"<g fill="none" stroke-width="0.8">"#).map_err(io)?;
    for l in colored {
        writeln!(w, r#"<polyline stroke="{}" points="{}"/>"#, rank_color(ranks[l], top_k), points(decomp.loop_slots(l), true)).map_err(io)?;
    }
    writeln!(w, "</g>").map_err(io)?;
    for p in &decomp.open_paths {
        writeln!(w, r##"<polyline fill="none" stroke="#e00000" stroke-width="2" points="{}"/>"##, points(&p.vertices, false)).map_err(io)?;
    }
    writeln!(w, "</svg>").map_err(io)?;
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::decompose;
    use crate::map::MapKind;
    use crate::rng::trial_rng;
    use crate::system::MeandricSystem;
    use nalgebra::{DMatrix, DVector};

    fn boundary_map(n: usize, seed: u64) -> (MeandricSystem, PlanarMap, Vec<u32>) {
        let mut rng = trial_rng(seed, 0, 0);
        let t = crate::sample::default_boundary_target(n);
        let s = MeandricSystem::sample_with_boundary(n, t, &mut rng).unwrap();
        let map = PlanarMap::build(&s);
        let b: Vec<u32> = s.boundary_positions().iter().map(|&p| s.slot(p).unwrap() as u32).collect();
        (s, map, b)
    }

    fn dense_solve(map: &PlanarMap, boundary: &[u32]) -> Vec<(f64, f64)> {
        let m = map.simple();
        let n = m.n_vertices();
        let k = boundary.len() as f64;
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut bx = DVector::<f64>::zeros(n);
        let mut by = DVector::<f64>::zeros(n);
        let mut pinned = vec![None; n];
        for (i, &v) in boundary.iter().enumerate() {
            let th = std::f64::consts::TAU * i as f64 / k;
            pinned[v as usize] = Some((th.cos(), th.sin()));
        }
        for v in 0..n {
            if let Some((x, y)) = pinned[v] {
                a[(v, v)] = 1.0;
                bx[v] = x;
                by[v] = y;
            } else {
                a[(v, v)] = m.degree(v) as f64;
                for &w in m.neighbors(v) {
                    a[(v, w as usize)] -= 1.0;
                }
            }
        }
        let lu = a.lu();
        let x = lu.solve(&bx).unwrap();
        let y = lu.solve(&by).unwrap();
        (0..n).map(|v| (x[v], y[v])).collect()
    }

    #[test]
    fn star_centre_at_origin() {
        let map = PlanarMap::from_edges(MapKind::Meander, 5, 0, false, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let e = tutte_embed(&map, &[1, 2, 3, 4], 1e-12, 100).unwrap();
        assert!(e.coords[0].0.abs() < 1e-12 && e.coords[0].1.abs() < 1e-12);
    }

    #[test]
    fn matches_dense_solve() {
        for (n, seed) in [(20, 1), (100, 2), (250, 3)] {
            let (_, map, b) = boundary_map(n, seed);
            let e = tutte_embed(&map, &b, 1e-12, 100 * n).unwrap();
            let d = dense_solve(&map, &b);
            for (p, q) in e.coords.iter().zip(&d) {
                assert!((p.0 - q.0).abs() < 1e-8 && (p.1 - q.1).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn mean_value_and_hull() {
        let (_, map, b) = boundary_map(2000, 4);
        let e = tutte_embed(&map, &b, 1e-9, 20_000).unwrap();
        assert!(e.residual <= 1e-9);
        // Inside the closed boundary polygon.
        let poly: Vec<(f64, f64)> = b.iter().map(|&v| e.coords[v as usize]).collect();
        for (v, &(x, y)) in e.coords.iter().enumerate() {
            if b.contains(&(v as u32)) {
                continue;
            }
            for i in 0..poly.len() {
                let (ax, ay) = poly[i];
                let (bx, by) = poly[(i + 1) % poly.len()];
                let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
                assert!(cross >= -1e-9, "vertex {v} outside edge {i}");
            }
        }
    }

    #[test]
    fn non_convergence_reported() {
        let (_, map, b) = boundary_map(500, 5);
        match tutte_embed(&map, &b, 1e-14, 3) {
            Err(Error::NoConvergence { iters, residual }) => {
                assert_eq!(iters, 3);
                assert!(residual > 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn picture_outputs() {
        let (mut s, map, b) = boundary_map(300, 6);
        let ranks = crate::system::default_marked_ranks(&s.boundary_positions(), 300).unwrap();
        s.link_boundary(Some(ranks)).unwrap();
        let dec = decompose(&s);
        let e = tutte_embed(&map, &b, 1e-9, 3000).unwrap();
        let mut csv = Vec::new();
        write_embedding_csv(&e, &dec, None, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 1 + map.n_vertices());
        assert!(text.starts_with("vertex,x,y,loop_rank\n"));
        for k in [0, 10] {
            let mut svg = Vec::new();
            write_svg(&e, &dec, k, &mut svg).unwrap();
            let svg = String::from_utf8(svg).unwrap();
            assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
            assert_eq!(svg.contains("hsl("), k > 0);
            assert!(svg.contains("#e00000"));
        }
    }
}
