use std::collections::HashMap;
use std::io::{self, Write};

use crate::error::MeshError;

/// Handle of a cell in the tree arena. Stable while the cell is alive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub(crate) u32);

impl CellId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One face of the (1D or 2D) domain box, also used for the faces of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    XLo,
    XHi,
    YLo,
    YHi,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::XLo, Side::XHi, Side::YLo, Side::YHi];

    pub fn sides(dim: usize) -> &'static [Side] {
        if dim == 1 {
            &Self::ALL[..2]
        } else {
            &Self::ALL
        }
    }

    pub fn axis(self) -> usize {
        match self {
            Side::XLo | Side::XHi => 0,
            Side::YLo | Side::YHi => 1,
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Side::XHi | Side::YHi)
    }

    pub fn sign(self) -> i64 {
        if self.is_upper() {
            1
        } else {
            -1
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::XLo => Side::XHi,
            Side::XHi => Side::XLo,
            Side::YLo => Side::YHi,
            Side::YHi => Side::YLo,
        }
    }
}

/// Axis-aligned computational domain. In 1D only the x entries are used.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub dim: usize,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub periodic: [bool; 2],
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Self {
        Domain {
            dim: 1,
            lo: [a, 0.0],
            hi: [b, 0.0],
            periodic: [false; 2],
        }
    }

    pub fn rectangle(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Domain {
            dim: 2,
            lo,
            hi,
            periodic: [false; 2],
        }
    }

    pub fn with_periodic(mut self, axis: usize) -> Self {
        self.periodic[axis] = true;
        self
    }

    pub fn with_all_periodic(mut self) -> Self {
        for a in 0..self.dim {
            self.periodic[a] = true;
        }
        self
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|a| self.extent(a)).product()
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..self.dim).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a])
    }
}

/// Read-only view of a tree cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub id: CellId,
    pub level: u8,
    pub center: [f64; 2],
    pub h: f64,
    pub parent: Option<CellId>,
    pub children: Option<Vec<CellId>>,
}

impl Cell {
    pub fn volume(&self, dim: usize) -> f64 {
        self.h.powi(dim as i32)
    }
}

/// A neighbor reference: a live tree cell, the ghost cell attached to a
/// boundary face of a leaf, or the corner ghost diagonal to a leaf that
/// touches two non-periodic walls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NeighborRef {
    Cell(CellId),
    Ghost { owner: CellId, side: Side },
    Corner { owner: CellId, sides: [Side; 2] },
}

/// A neighbor together with its geometry relative to the querying cell.
///
/// `offset` is the vector from the querying cell's center to the neighbor's
/// (apparent, i.e. periodically shifted) center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub target: NeighborRef,
    pub offset: [f64; 2],
    pub h: f64,
    pub(crate) lat_offset: [i64; 2],
    pub(crate) lat_half: i64,
}

impl Neighbor {
    pub fn is_ghost(&self) -> bool {
        !matches!(self.target, NeighborRef::Cell(_))
    }

    pub fn cell(&self) -> Option<CellId> {
        match self.target {
            NeighborRef::Cell(id) => Some(id),
            NeighborRef::Ghost { .. } | NeighborRef::Corner { .. } => None,
        }
    }
}

/// Ghost cell of the one-deep boundary layer. Periodic faces produce aliases of
/// the cell on the opposite end instead of independent ghosts.
#[derive(Clone, Debug, PartialEq)]
pub struct GhostCell {
    pub owner: CellId,
    pub side: Side,
    pub center: [f64; 2],
    pub h: f64,
    pub alias: Option<CellId>,
}

/// Result of a (balanced) refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub children: Vec<CellId>,
    /// Cells that had to be refined first to keep the 2:1 balance.
    pub cascaded: Vec<CellId>,
}

#[derive(Clone, Debug)]
struct Node {
    level: u8,
    index: [i64; 2],
    parent: Option<CellId>,
    children: Option<[CellId; 4]>,
    alive: bool,
}

const MAX_SUPPORTED_LEVEL: u8 = 28;

/// Binary tree (1D) or quad-tree (2D) forest over a uniform level-0 grid.
///
/// Geometry is tracked on an integer lattice whose unit is `H / 2^(L+1)`, so
/// relative offsets between cells are exact and mirror-symmetric.
#[derive(Clone, Debug)]
pub struct TreeMesh {
    domain: Domain,
    n0: [usize; 2],
    h0: f64,
    max_level: u8,
    nodes: Vec<Node>,
    free: Vec<u32>,
    lookup: HashMap<(u8, [i64; 2]), CellId>,
    roots: Vec<CellId>,
    n_leaves: usize,
    epoch: u64,
}

impl TreeMesh {
    /// Uniform level-0 mesh with `n0` cells along x. In 2D the y count follows
    /// from the requirement that cells are squares.
    pub fn build_uniform(domain: &Domain, n0: usize, max_level: u8) -> Result<Self, MeshError> {
        if domain.dim != 1 && domain.dim != 2 {
            return Err(MeshError::Config(format!("unsupported dimension {}", domain.dim)));
        }
        if n0 == 0 {
            return Err(MeshError::Config("N0 must be positive".into()));
        }
        if max_level > MAX_SUPPORTED_LEVEL {
            return Err(MeshError::Config(format!("max level {max_level} too deep")));
        }
        for a in 0..domain.dim {
            let e = domain.extent(a);
            if !(e.is_finite() && e > 0.0) {
                return Err(MeshError::Config(format!("degenerate domain extent {e} on axis {a}")));
            }
        }
        let h0 = domain.extent(0) / n0 as f64;
        let mut counts = [n0, 1];
        if domain.dim == 2 {
            let ny = domain.extent(1) / h0;
            let rounded = ny.round();
            if rounded < 1.0 || (ny - rounded).abs() > 1e-9 * ny.max(1.0) {
                return Err(MeshError::Config(format!(
                    "domain aspect ratio incompatible with square cells ({ny} cells along y)"
                )));
            }
            counts[1] = rounded as usize;
        }
        let mut mesh = TreeMesh {
            domain: domain.clone(),
            n0: counts,
            h0,
            max_level,
            nodes: Vec::with_capacity(counts[0] * counts[1]),
            free: Vec::new(),
            lookup: HashMap::new(),
            roots: Vec::new(),
            n_leaves: 0,
            epoch: 0,
        };
        for iy in 0..counts[1] as i64 {
            for ix in 0..counts[0] as i64 {
                let id = mesh.alloc(Node {
                    level: 0,
                    index: [ix, iy],
                    parent: None,
                    children: None,
                    alive: true,
                });
                mesh.roots.push(id);
            }
        }
        mesh.n_leaves = mesh.roots.len();
        Ok(mesh)
    }

    fn alloc(&mut self, node: Node) -> CellId {
        let key = (node.level, node.index);
        let id = if let Some(slot) = self.free.pop() {
            self.nodes[slot as usize] = node;
            CellId(slot)
        } else {
            self.nodes.push(node);
            CellId((self.nodes.len() - 1) as u32)
        };
        self.lookup.insert(key, id);
        id
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Level-0 cell size H.
    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn n0(&self) -> [usize; 2] {
        self.n0
    }

    pub fn max_level(&self) -> u8 {
        self.max_level
    }

    /// Topology version; bumped by every refine/coarsen.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn leaf_count(&self) -> usize {
        self.n_leaves
    }

    /// Size of the cell arena; per-cell storage indexed by `CellId::index`
    /// must be at least this long.
    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    fn node(&self, id: CellId) -> Result<&Node, MeshError> {
        match self.nodes.get(id.index()) {
            Some(n) if n.alive => Ok(n),
            _ => Err(MeshError::NoSuchCell(id)),
        }
    }

    pub fn is_alive(&self, id: CellId) -> bool {
        self.nodes.get(id.index()).is_some_and(|n| n.alive)
    }

    pub fn is_leaf(&self, id: CellId) -> bool {
        self.nodes
            .get(id.index())
            .is_some_and(|n| n.alive && n.children.is_none())
    }

    pub fn level(&self, id: CellId) -> u8 {
        self.nodes[id.index()].level
    }

    pub fn parent(&self, id: CellId) -> Option<CellId> {
        self.nodes[id.index()].parent
    }

    fn n_children(&self) -> usize {
        1 << self.dim()
    }

    pub fn children(&self, id: CellId) -> Option<&[CellId]> {
        let nc = self.n_children();
        self.nodes[id.index()].children.as_ref().map(|c| &c[..nc])
    }

    pub fn size(&self, id: CellId) -> f64 {
        level_size(self.h0, self.nodes[id.index()].level)
    }

    pub fn size_at_level(&self, level: u8) -> f64 {
        level_size(self.h0, level)
    }

    pub fn volume(&self, id: CellId) -> f64 {
        self.size(id).powi(self.dim() as i32)
    }

    pub fn center(&self, id: CellId) -> [f64; 2] {
        let n = &self.nodes[id.index()];
        let h = level_size(self.h0, n.level);
        let mut c = [0.0; 2];
        for a in 0..self.dim() {
            c[a] = self.domain.lo[a] + (n.index[a] as f64 + 0.5) * h;
        }
        c
    }

    /// Bounding box `(lo, hi)` of a cell.
    pub fn cell_box(&self, id: CellId) -> ([f64; 2], [f64; 2]) {
        let n = &self.nodes[id.index()];
        let h = level_size(self.h0, n.level);
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for a in 0..self.dim() {
            lo[a] = self.domain.lo[a] + n.index[a] as f64 * h;
            hi[a] = self.domain.lo[a] + (n.index[a] + 1) as f64 * h;
        }
        (lo, hi)
    }

    pub fn cell(&self, id: CellId) -> Result<Cell, MeshError> {
        let n = self.node(id)?;
        Ok(Cell {
            id,
            level: n.level,
            center: self.center(id),
            h: self.size(id),
            parent: n.parent,
            children: self.children(id).map(|c| c.to_vec()),
        })
    }

    pub(crate) fn lattice_unit(&self) -> f64 {
        self.h0 / (1u64 << (self.max_level as u32 + 1)) as f64
    }

    pub(crate) fn lattice_half(&self, id: CellId) -> i64 {
        1i64 << (self.max_level - self.nodes[id.index()].level)
    }

    pub(crate) fn lattice_center(&self, id: CellId) -> [i64; 2] {
        let n = &self.nodes[id.index()];
        let s = 1i64 << (self.max_level - n.level);
        [(2 * n.index[0] + 1) * s, (2 * n.index[1] + 1) * s]
    }

    fn lattice_extent(&self, axis: usize) -> i64 {
        (self.n0[axis] as i64) << (self.max_level as u32 + 1)
    }

    /// Leaves in depth-first order over the row-major level-0 grid. In 1D this
    /// is left-to-right order.
    pub fn leaves(&self) -> Vec<CellId> {
        let mut out = Vec::with_capacity(self.n_leaves);
        let mut stack = Vec::new();
        for &r in &self.roots {
            stack.push(r);
            while let Some(id) = stack.pop() {
                match self.children(id) {
                    None => out.push(id),
                    Some(ch) => stack.extend(ch.iter().rev()),
                }
            }
        }
        out
    }

    /// Leaf containing `p`; points on interfaces go to the upper cell except at
    /// the upper domain boundary.
    pub fn locate(&self, p: [f64; 2]) -> Result<CellId, MeshError> {
        if !self.domain.contains(p) {
            return Err(MeshError::OutsideDomain(p));
        }
        let mut idx = [0i64; 2];
        for a in 0..self.dim() {
            let t = ((p[a] - self.domain.lo[a]) / self.h0).floor() as i64;
            idx[a] = t.clamp(0, self.n0[a] as i64 - 1);
        }
        let mut id = self.roots[(idx[1] as usize) * self.n0[0] + idx[0] as usize];
        while let Some(ch) = self.children(id) {
            let c = self.center(id);
            let mut k = 0;
            for a in 0..self.dim() {
                if p[a] >= c[a] {
                    k |= 1 << a;
                }
            }
            id = ch[k];
        }
        Ok(id)
    }

    /// Wraps a same-level index. Returns the in-range index and the lattice
    /// shift to apply to the wrapped cell's position, or `None` outside a
    /// non-periodic boundary.
    fn wrap(&self, level: u8, t: [i64; 2]) -> Option<([i64; 2], [i64; 2])> {
        let mut out = t;
        let mut shift = [0i64; 2];
        for a in 0..self.dim() {
            let n = (self.n0[a] as i64) << level;
            if t[a] < 0 || t[a] >= n {
                if !self.domain.periodic[a] {
                    return None;
                }
                let w = t[a].rem_euclid(n);
                let periods = (t[a] - w) / n;
                out[a] = w;
                shift[a] = periods * self.lattice_extent(a);
            }
        }
        Some((out, shift))
    }

    /// Leaf covering the same-level slot `t` when the slot is not refined:
    /// either the slot itself or its deepest existing ancestor.
    fn covering(&self, level: u8, t: [i64; 2]) -> Option<CellId> {
        if let Some(&id) = self.lookup.get(&(level, t)) {
            return Some(id);
        }
        for up in 1..=level {
            let key = (level - up, [t[0] >> up, t[1] >> up]);
            if let Some(&id) = self.lookup.get(&key) {
                return Some(id);
            }
        }
        None
    }

    fn touches(&self, id: CellId, shift: [i64; 2], c: [i64; 2], s: i64) -> bool {
        let ck = self.lattice_center(id);
        let sk = self.lattice_half(id);
        (0..self.dim()).all(|a| (ck[a] + shift[a] - c[a]).abs() <= sk + s)
    }

    fn collect_leaves_touching(
        &self,
        id: CellId,
        shift: [i64; 2],
        c: [i64; 2],
        s: i64,
        out: &mut Vec<(CellId, [i64; 2])>,
    ) {
        match self.children(id) {
            None => out.push((id, shift)),
            Some(ch) => {
                for &k in ch {
                    if self.touches(k, shift, c, s) {
                        self.collect_leaves_touching(k, shift, c, s, out);
                    }
                }
            }
        }
    }

    /// Leaf cells (with periodic lattice shift) whose closed box meets the
    /// closed box of `id`, excluding `id` itself.
    fn cell_neighbors(&self, id: CellId) -> Vec<(CellId, [i64; 2])> {
        let n = &self.nodes[id.index()];
        let c = self.lattice_center(id);
        let s = self.lattice_half(id);
        let mut out: Vec<(CellId, [i64; 2])> = Vec::with_capacity(12);
        let yr = if self.dim() == 2 { -1..=1 } else { 0..=0 };
        for dy in yr {
            for dx in -1..=1i64 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let t = [n.index[0] + dx, n.index[1] + dy];
                let Some((tw, shift)) = self.wrap(n.level, t) else {
                    continue;
                };
                match self.lookup.get(&(n.level, tw)) {
                    Some(&k) => self.collect_leaves_touching(k, shift, c, s, &mut out),
                    None => {
                        if let Some(k) = self.covering(n.level, tw) {
                            out.push((k, shift));
                        }
                    }
                }
            }
        }
        let mut seen = Vec::with_capacity(out.len());
        out.retain(|e| {
            if e.0 == id && e.1 == [0, 0] || seen.contains(e) {
                false
            } else {
                seen.push(*e);
                true
            }
        });
        out
    }

    fn touches_side(&self, c: [i64; 2], s: i64, side: Side) -> bool {
        let a = side.axis();
        if side.is_upper() {
            c[a] + s == self.lattice_extent(a)
        } else {
            c[a] - s == 0
        }
    }

    fn make_neighbor(&self, target: NeighborRef, lat_center: [i64; 2], lat_half: i64, from: [i64; 2]) -> Neighbor {
        let unit = self.lattice_unit();
        let mut lat_offset = [0i64; 2];
        let mut offset = [0.0; 2];
        for a in 0..self.dim() {
            lat_offset[a] = lat_center[a] - from[a];
            offset[a] = lat_offset[a] as f64 * unit;
        }
        Neighbor {
            target,
            offset,
            h: 2.0 * lat_half as f64 * unit,
            lat_offset,
            lat_half,
        }
    }

    fn ghost_center(&self, c: [i64; 2], side: Side) -> [i64; 2] {
        let a = side.axis();
        let wall = if side.is_upper() { self.lattice_extent(a) } else { 0 };
        let mut g = c;
        g[a] = 2 * wall - c[a];
        g
    }

    /// All leaves and ghost cells whose closed boundary meets the closed
    /// boundary of `id`.
    pub fn neighbors(&self, id: CellId) -> Result<Vec<Neighbor>, MeshError> {
        if !self.is_leaf(id) {
            return Err(MeshError::NotLeaf(id));
        }
        let c = self.lattice_center(id);
        let s = self.lattice_half(id);
        let cells = self.cell_neighbors(id);
        let mut out = Vec::with_capacity(cells.len() + 4);
        for &(k, shift) in &cells {
            let mut ck = self.lattice_center(k);
            for a in 0..2 {
                ck[a] += shift[a];
            }
            out.push(self.make_neighbor(NeighborRef::Cell(k), ck, self.lattice_half(k), c));
        }
        for &side in Side::sides(self.dim()) {
            if self.domain.periodic[side.axis()] || !self.touches_side(c, s, side) {
                continue;
            }
            out.push(self.make_neighbor(
                NeighborRef::Ghost { owner: id, side },
                self.ghost_center(c, side),
                s,
                c,
            ));
            for &(k, shift) in &cells {
                let mut ck = self.lattice_center(k);
                for a in 0..2 {
                    ck[a] += shift[a];
                }
                let sk = self.lattice_half(k);
                if self.touches_side(ck, sk, side) {
                    out.push(self.make_neighbor(
                        NeighborRef::Ghost { owner: k, side },
                        self.ghost_center(ck, side),
                        sk,
                        c,
                    ));
                }
            }
        }
        if self.dim() == 2 && !self.domain.periodic[0] && !self.domain.periodic[1] {
            for sx in [Side::XLo, Side::XHi] {
                for sy in [Side::YLo, Side::YHi] {
                    if self.touches_side(c, s, sx) && self.touches_side(c, s, sy) {
                        out.push(self.make_neighbor(
                            NeighborRef::Corner { owner: id, sides: [sx, sy] },
                            self.ghost_center(self.ghost_center(c, sx), sy),
                            s,
                            c,
                        ));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Neighbors sharing a face segment of positive length across `side`.
    pub fn face_neighbors(&self, id: CellId, side: Side) -> Result<Vec<Neighbor>, MeshError> {
        let s = self.lattice_half(id);
        Ok(self
            .neighbors(id)?
            .into_iter()
            .filter(|n| is_across(n, s, side, self.dim()))
            .collect())
    }

    /// The four sector stencils `[NE, NW, SE, SW]` built from the half-sets
    /// `E = {x_k + h_k/2 >= x_j}`, `W = {x_k - h_k/2 <= x_j}` (and likewise in y).
    pub fn directional_stencils(&self, id: CellId) -> Result<[Vec<Neighbor>; 4], MeshError> {
        if self.dim() != 2 {
            return Err(MeshError::Config("directional stencils are defined in 2D".into()));
        }
        let nb = self.neighbors(id)?;
        let mut out: [Vec<Neighbor>; 4] = Default::default();
        for n in nb {
            let flags = half_set_flags(&n);
            for (q, set) in out.iter_mut().enumerate() {
                if sector_contains(q, flags) {
                    set.push(n);
                }
            }
        }
        Ok(out)
    }

    fn split(&mut self, id: CellId) -> Vec<CellId> {
        let (level, index) = {
            let n = &self.nodes[id.index()];
            (n.level, n.index)
        };
        let nc = self.n_children();
        let mut ch = [id; 4];
        for (k, slot) in ch.iter_mut().enumerate().take(nc) {
            let cx = (k & 1) as i64;
            let cy = ((k >> 1) & 1) as i64;
            *slot = self.alloc(Node {
                level: level + 1,
                index: [2 * index[0] + cx, 2 * index[1] + cy],
                parent: Some(id),
                children: None,
                alive: true,
            });
        }
        self.nodes[id.index()].children = Some(ch);
        self.n_leaves += nc - 1;
        self.epoch += 1;
        ch[..nc].to_vec()
    }

    /// Splits a leaf without enforcing the 2:1 balance.
    #[cfg(test)]
    pub(crate) fn split_unbalanced(&mut self, id: CellId) -> Vec<CellId> {
        self.split(id)
    }

    /// Face neighbors one level coarser than `id` (the only kind that would
    /// break the 2:1 balance when `id` is split).
    fn coarser_face_neighbors(&self, id: CellId) -> Vec<CellId> {
        let n = &self.nodes[id.index()];
        let mut out = Vec::new();
        for &side in Side::sides(self.dim()) {
            let mut t = n.index;
            t[side.axis()] += side.sign();
            let Some((tw, _)) = self.wrap(n.level, t) else {
                continue;
            };
            if self.lookup.contains_key(&(n.level, tw)) {
                continue;
            }
            if let Some(k) = self.covering(n.level, tw) {
                if !out.contains(&k) {
                    out.push(k);
                }
            }
        }
        out
    }

    fn refine_balanced(&mut self, id: CellId, cascaded: &mut Vec<CellId>) -> Result<Vec<CellId>, MeshError> {
        if self.level(id) >= self.max_level {
            return Err(MeshError::MaxLevelReached(id));
        }
        loop {
            let coarse = self.coarser_face_neighbors(id);
            if coarse.is_empty() {
                break;
            }
            for k in coarse {
                if self.is_leaf(k) && self.level(k) < self.level(id) {
                    self.refine_balanced(k, cascaded)?;
                    cascaded.push(k);
                }
            }
        }
        Ok(self.split(id))
    }

    /// Splits a leaf into 2^d children, refining coarser face neighbors first
    /// so that adjacent leaves never differ by more than one level.
    pub fn refine(&mut self, id: CellId) -> Result<Refinement, MeshError> {
        if !self.is_leaf(id) {
            return Err(match self.node(id) {
                Err(e) => e,
                Ok(_) => MeshError::NotLeaf(id),
            });
        }
        let mut cascaded = Vec::new();
        let children = self.refine_balanced(id, &mut cascaded)?;
        Ok(Refinement { children, cascaded })
    }

    /// Whether `coarsen(parent)` would succeed.
    pub fn can_coarsen(&self, parent: CellId) -> Result<(), MeshError> {
        let n = self.node(parent)?;
        let Some(ch) = self.children(parent) else {
            return Err(MeshError::CannotCoarsen(parent, "cell has no children"));
        };
        if ch.iter().any(|&c| !self.is_leaf(c)) {
            return Err(MeshError::CannotCoarsen(parent, "children are not all leaves"));
        }
        let c = self.lattice_center(parent);
        let s = self.lattice_half(parent);
        for &side in Side::sides(self.dim()) {
            let mut t = n.index;
            t[side.axis()] += side.sign();
            let Some((tw, shift)) = self.wrap(n.level, t) else {
                continue;
            };
            if let Some(&k) = self.lookup.get(&(n.level, tw)) {
                if let Some(kch) = self.children(k) {
                    if kch
                        .iter()
                        .any(|&g| self.children(g).is_some() && self.touches(g, shift, c, s))
                    {
                        return Err(MeshError::CannotCoarsen(parent, "would break 2:1 balance"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Replaces the 2^d leaf children of `parent` by `parent`.
    pub fn coarsen(&mut self, parent: CellId) -> Result<CellId, MeshError> {
        self.can_coarsen(parent)?;
        let nc = self.n_children();
        let ch = self.nodes[parent.index()].children.take().expect("checked");
        for &c in &ch[..nc] {
            let key = (self.nodes[c.index()].level, self.nodes[c.index()].index);
            self.lookup.remove(&key);
            self.nodes[c.index()].alive = false;
            self.free.push(c.0);
        }
        self.n_leaves -= nc - 1;
        self.epoch += 1;
        Ok(parent)
    }

    /// One ghost per boundary face of every boundary leaf.
    pub fn ghost_layer(&self) -> Vec<GhostCell> {
        let unit = self.lattice_unit();
        let mut out = Vec::new();
        for id in self.leaves() {
            let c = self.lattice_center(id);
            let s = self.lattice_half(id);
            for &side in Side::sides(self.dim()) {
                if !self.touches_side(c, s, side) {
                    continue;
                }
                let g = self.ghost_center(c, side);
                let mut center = [0.0; 2];
                for a in 0..self.dim() {
                    center[a] = self.domain.lo[a] + g[a] as f64 * unit;
                }
                let alias = if self.domain.periodic[side.axis()] {
                    let n = &self.nodes[id.index()];
                    let mut t = n.index;
                    t[side.axis()] += side.sign();
                    self.wrap(n.level, t).and_then(|(tw, _)| {
                        let k = self.lookup.get(&(n.level, tw)).copied().or_else(|| self.covering(n.level, tw))?;
                        let mut leaf = k;
                        // descend towards the face shared with `id`
                        while let Some(ch) = self.children(leaf) {
                            let k2 = if side.is_upper() { 0 } else { 1 << side.axis() };
                            leaf = ch[k2];
                        }
                        Some(leaf)
                    })
                } else {
                    None
                };
                out.push(GhostCell {
                    owner: id,
                    side,
                    center,
                    h: self.size(id),
                    alias,
                });
            }
        }
        out
    }

    /// Smallest leaf size.
    pub fn min_leaf_size(&self) -> f64 {
        self.leaves()
            .into_iter()
            .map(|id| self.size(id))
            .fold(f64::INFINITY, f64::min)
    }

    /// Writes one line `id level x [y] h` per leaf.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for id in self.leaves() {
            let c = self.center(id);
            if self.dim() == 1 {
                writeln!(w, "{} {} {:.17e} {:.17e}", id.0, self.level(id), c[0], self.size(id))?;
            } else {
                writeln!(
                    w,
                    "{} {} {:.17e} {:.17e} {:.17e}",
                    id.0,
                    self.level(id),
                    c[0],
                    c[1],
                    self.size(id)
                )?;
            }
        }
        Ok(())
    }
}

fn level_size(h0: f64, level: u8) -> f64 {
    h0 / (1u64 << level) as f64
}

pub(crate) fn is_across(n: &Neighbor, half: i64, side: Side, dim: usize) -> bool {
    let a = side.axis();
    let edge = n.lat_offset[a] * side.sign() - n.lat_half;
    if edge != half {
        return false;
    }
    (0..dim)
        .filter(|&b| b != a)
        .all(|b| n.lat_offset[b].abs() < n.lat_half + half)
}

/// Bit flags `E, W, N, S` of the modified half-sets.
pub(crate) fn half_set_flags(n: &Neighbor) -> u8 {
    let mut f = 0;
    if n.lat_offset[0] + n.lat_half >= 0 {
        f |= 1;
    }
    if n.lat_offset[0] - n.lat_half <= 0 {
        f |= 2;
    }
    if n.lat_offset[1] + n.lat_half >= 0 {
        f |= 4;
    }
    if n.lat_offset[1] - n.lat_half <= 0 {
        f |= 8;
    }
    f
}

/// Sector order: 0 = NE, 1 = NW, 2 = SE, 3 = SW.
pub(crate) fn sector_contains(sector: usize, flags: u8) -> bool {
    let (ew, ns) = match sector {
        0 => (1, 4),
        1 => (2, 4),
        2 => (1, 8),
        _ => (2, 8),
    };
    flags & ew != 0 && flags & ns != 0
}
