//! Reconstruction-only accuracy: 1D tables on uniform, quasi-uniform and
//! random grids, the jump profile, and the 2D uniform quadtree table.

use cweno_amr::harness::grids::{GridKind, PointRole};
use cweno_amr::harness::recon::{recon_table_1d, recon_table_2d_uniform, write_table, Profile1d};
use cweno_amr::reconstruction::CwenoConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = CwenoConfig::default();
    let ns: Vec<usize> = (0..7).map(|k| 20 << k).collect();
    let out = std::io::stdout();
    for (name, grid) in [
        ("uniform", GridKind::Uniform),
        ("quasi-uniform", GridKind::QuasiUniform),
        ("random", GridKind::Random { seed: 7 }),
    ] {
        println!("# smooth profile, {name} grid");
        write_table(&recon_table_1d(Profile1d::Smooth, grid, PointRole::Interfaces, &ns, &cfg)?, out.lock())?;
    }
    println!("# jump at x = 1/640");
    write_table(
        &recon_table_1d(Profile1d::Jump { at: 1.0 / 640.0 }, GridKind::Uniform, PointRole::Interfaces, &ns, &cfg)?,
        out.lock(),
    )?;
    println!("# 2D smooth profile, uniform quadtree");
    write_table(&recon_table_2d_uniform(8, 4, &cfg)?, out.lock())?;
    Ok(())
}
