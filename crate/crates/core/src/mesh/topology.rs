use std::collections::HashMap;

use super::tree::{is_across, CellId, NeighborRef, Side, TreeMesh};

/// Source of a neighbor value: a leaf slot or an entry of `Topology::ghosts`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Src {
    Cell(CellId),
    Ghost(u32),
}

/// Neighbor of a leaf as seen by the reconstruction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NbrEntry {
    pub src: Src,
    pub offset: [f64; 2],
    pub h: f64,
    /// Bit `1 << side as usize` set when the neighbor shares a face across `side`.
    pub face_sides: u8,
    pub(crate) half_flags: u8,
}

/// Ghost cell: the boundary condition applied to the owner's state, mirrored
/// across the owner's boundary face. A corner ghost applies the conditions of
/// both `side` and `corner`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhostSpec {
    pub owner: CellId,
    pub side: Side,
    pub corner: Option<Side>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceSide {
    Cell(CellId),
    Wall(Side),
}

impl FaceSide {
    pub fn cell(self) -> Option<CellId> {
        match self {
            FaceSide::Cell(id) => Some(id),
            FaceSide::Wall(_) => None,
        }
    }
}

/// A face segment between two leaves (or a leaf and the boundary). The finer
/// cell owns the segment when levels differ, so every segment is a full face
/// of at least one of its cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Face {
    pub axis: usize,
    pub minus: FaceSide,
    pub plus: FaceSide,
    /// Segment length (1 in 1D).
    pub len: f64,
    /// Segment midpoint relative to the minus/plus cell centers.
    pub minus_offset: [f64; 2],
    pub plus_offset: [f64; 2],
}

impl Face {
    /// Quadrature offsets along the tangent and weights (summing to `len`).
    pub fn tangent_rule(&self, dim: usize, order: usize) -> &'static [(f64, f64)] {
        const MID: [(f64, f64); 1] = [(0.0, 1.0)];
        const G2: [(f64, f64); 2] = [
            (-crate::quadrature::GAUSS2_HALF, 0.5),
            (crate::quadrature::GAUSS2_HALF, 0.5),
        ];
        if dim == 1 || order <= 2 {
            &MID
        } else {
            &G2
        }
    }

    /// Absolute offsets of the quadrature nodes from the minus and plus cell
    /// centers, with weights including the segment length.
    pub fn nodes(&self, dim: usize, order: usize) -> Vec<([f64; 2], [f64; 2], f64)> {
        let t = 1 - self.axis;
        self.tangent_rule(dim, order)
            .iter()
            .map(|&(s, w)| {
                let mut a = self.minus_offset;
                let mut b = self.plus_offset;
                if dim == 2 {
                    a[t] += s * self.len;
                    b[t] += s * self.len;
                }
                (a, b, w * self.len)
            })
            .collect()
    }
}

/// Flattened per-epoch view of a mesh: leaves, neighbor lists, ghosts and
/// faces. Per-cell arrays are indexed by `CellId::index`.
#[derive(Clone, Debug)]
pub struct Topology {
    pub epoch: u64,
    pub dim: usize,
    pub capacity: usize,
    pub leaves: Vec<CellId>,
    pub is_leaf: Vec<bool>,
    pub h: Vec<f64>,
    pub center: Vec<[f64; 2]>,
    pub level: Vec<u8>,
    pub ghosts: Vec<GhostSpec>,
    pub faces: Vec<Face>,
    nbr_start: Vec<u32>,
    nbr_len: Vec<u16>,
    nbrs: Vec<NbrEntry>,
    face_start: Vec<u32>,
    face_len: Vec<u8>,
    cell_faces: Vec<u32>,
}

fn ghost_slot(
    index: &mut HashMap<(CellId, Side, Option<Side>), u32>,
    ghosts: &mut Vec<GhostSpec>,
    owner: CellId,
    side: Side,
    corner: Option<Side>,
) -> u32 {
    let next = ghosts.len() as u32;
    *index.entry((owner, side, corner)).or_insert_with(|| {
        ghosts.push(GhostSpec { owner, side, corner });
        next
    })
}

impl Topology {
    pub fn build(mesh: &TreeMesh) -> Self {
        let dim = mesh.dim();
        let cap = mesh.capacity();
        let leaves = mesh.leaves();
        let mut is_leaf = vec![false; cap];
        let mut h = vec![0.0; cap];
        let mut center = vec![[0.0; 2]; cap];
        let mut level = vec![0u8; cap];
        for &id in &leaves {
            is_leaf[id.index()] = true;
            h[id.index()] = mesh.size(id);
            center[id.index()] = mesh.center(id);
            level[id.index()] = mesh.level(id);
        }
        let mut ghost_index: HashMap<(CellId, Side, Option<Side>), u32> = HashMap::new();
        let mut ghosts = Vec::new();
        let mut nbr_start = vec![0u32; cap];
        let mut nbr_len = vec![0u16; cap];
        let mut nbrs = Vec::with_capacity(leaves.len() * (if dim == 1 { 2 } else { 9 }));
        let mut faces = Vec::with_capacity(leaves.len() * dim + 8);
        let mut per_cell_faces: Vec<Vec<u32>> = vec![Vec::new(); cap];

        for &j in &leaves {
            let list = mesh.neighbors(j).expect("leaf");
            let half = mesh.lattice_half(j);
            nbr_start[j.index()] = nbrs.len() as u32;
            nbr_len[j.index()] = list.len() as u16;
            let hj = mesh.size(j);
            for n in &list {
                let mut face_sides = 0u8;
                for &side in Side::sides(dim) {
                    if is_across(n, half, side, dim) {
                        face_sides |= 1 << side as u8;
                    }
                }
                let src = match n.target {
                    NeighborRef::Cell(k) => Src::Cell(k),
                    NeighborRef::Ghost { owner, side } => Src::Ghost(ghost_slot(&mut ghost_index, &mut ghosts, owner, side, None)),
                    NeighborRef::Corner { owner, sides } => {
                        Src::Ghost(ghost_slot(&mut ghost_index, &mut ghosts, owner, sides[0], Some(sides[1])))
                    }
                };
                nbrs.push(NbrEntry {
                    src,
                    offset: n.offset,
                    h: n.h,
                    face_sides,
                    half_flags: super::tree::half_set_flags(n),
                });

                for &side in Side::sides(dim) {
                    if face_sides & (1 << side as u8) == 0 {
                        continue;
                    }
                    let a = side.axis();
                    let mut own = [0.0; 2];
                    own[a] = side.sign() as f64 * 0.5 * hj;
                    let len = if dim == 1 { 1.0 } else { hj };
                    match n.target {
                        NeighborRef::Corner { .. } => {}
                        NeighborRef::Ghost { owner, .. } => {
                            if owner != j {
                                continue;
                            }
                            let face = if side.is_upper() {
                                Face {
                                    axis: a,
                                    minus: FaceSide::Cell(j),
                                    plus: FaceSide::Wall(side),
                                    len,
                                    minus_offset: own,
                                    plus_offset: own,
                                }
                            } else {
                                Face {
                                    axis: a,
                                    minus: FaceSide::Wall(side),
                                    plus: FaceSide::Cell(j),
                                    len,
                                    minus_offset: own,
                                    plus_offset: own,
                                }
                            };
                            let f = faces.len() as u32;
                            faces.push(face);
                            per_cell_faces[j.index()].push(f);
                        }
                        NeighborRef::Cell(k) => {
                            let lk = mesh.level(k);
                            let lj = mesh.level(j);
                            let owns = lj > lk || (lj == lk && side.is_upper());
                            if !owns {
                                continue;
                            }
                            let mut other = own;
                            for b in 0..2 {
                                other[b] -= n.offset[b];
                            }
                            let face = if side.is_upper() {
                                Face {
                                    axis: a,
                                    minus: FaceSide::Cell(j),
                                    plus: FaceSide::Cell(k),
                                    len,
                                    minus_offset: own,
                                    plus_offset: other,
                                }
                            } else {
                                Face {
                                    axis: a,
                                    minus: FaceSide::Cell(k),
                                    plus: FaceSide::Cell(j),
                                    len,
                                    minus_offset: other,
                                    plus_offset: own,
                                }
                            };
                            let f = faces.len() as u32;
                            faces.push(face);
                            per_cell_faces[j.index()].push(f);
                            per_cell_faces[k.index()].push(f);
                        }
                    }
                }
            }
        }

        let mut face_start = vec![0u32; cap];
        let mut face_len = vec![0u8; cap];
        let mut cell_faces = Vec::with_capacity(faces.len() * 2);
        for &j in &leaves {
            let list = &mut per_cell_faces[j.index()];
            list.sort_unstable();
            face_start[j.index()] = cell_faces.len() as u32;
            face_len[j.index()] = list.len() as u8;
            cell_faces.extend_from_slice(list);
        }

        Topology {
            epoch: mesh.epoch(),
            dim,
            capacity: cap,
            leaves,
            is_leaf,
            h,
            center,
            level,
            ghosts,
            faces,
            nbr_start,
            nbr_len,
            nbrs,
            face_start,
            face_len,
            cell_faces,
        }
    }

    pub fn neighbors(&self, id: CellId) -> &[NbrEntry] {
        let s = self.nbr_start[id.index()] as usize;
        &self.nbrs[s..s + self.nbr_len[id.index()] as usize]
    }

    /// Indices into `faces` of the faces bounding `id`, ascending.
    pub fn faces_of(&self, id: CellId) -> &[u32] {
        let s = self.face_start[id.index()] as usize;
        &self.cell_faces[s..s + self.face_len[id.index()] as usize]
    }

    pub fn volume(&self, id: CellId) -> f64 {
        self.h[id.index()].powi(self.dim as i32)
    }

    pub fn min_h(&self) -> f64 {
        self.leaves
            .iter()
            .map(|id| self.h[id.index()])
            .fold(f64::INFINITY, f64::min)
    }

    /// Adds one ring of vertex neighbors (leaves only) to a slot-indexed set.
    pub fn expand(&self, set: &[bool]) -> Vec<bool> {
        let mut out = set.to_vec();
        for &id in &self.leaves {
            if !set[id.index()] {
                continue;
            }
            for n in self.neighbors(id) {
                if let Src::Cell(k) = n.src {
                    out[k.index()] = true;
                }
            }
        }
        out
    }
}
