//! Build a small quadtree, refine a corner, and print what a boundary cell
//! sees: face neighbors across a level jump and the ghosts outside the domain.

use cweno_amr::mesh::{Domain, NeighborRef, Side, TreeMesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut mesh = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 4, 2)?;
    let corner = mesh.locate([0.1, 0.1])?;
    mesh.refine(corner)?;
    let fine = mesh.locate([0.2, 0.05])?;
    println!("{} leaves, h0 = {}, finest h = {}", mesh.leaf_count(), mesh.h0(), mesh.min_leaf_size());

    let coarse = mesh.locate([0.375, 0.125])?;
    for side in Side::sides(2) {
        let nb = mesh.face_neighbors(coarse, *side)?;
        println!("cell at {:?} side {side:?}: {} neighbor(s)", mesh.center(coarse), nb.len());
    }

    println!("vertex neighbors of the fine cell at {:?}:", mesh.center(fine));
    for n in mesh.neighbors(fine)? {
        let kind = match n.target {
            NeighborRef::Cell(_) => "leaf",
            NeighborRef::Ghost { .. } => "ghost",
            NeighborRef::Corner { .. } => "corner ghost",
        };
        println!("  {kind:>12} offset {:?} size {}", n.offset, n.h);
    }

    // a family can merge back once its siblings are all leaves
    let parent = mesh.parent(fine).unwrap();
    mesh.can_coarsen(parent)?;
    mesh.coarsen(parent)?;
    println!("after coarsening: {} leaves, {} ghost faces", mesh.leaf_count(), mesh.ghost_layer().len());
    Ok(())
}
