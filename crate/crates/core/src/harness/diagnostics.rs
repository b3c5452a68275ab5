//! Solution diagnostics: profiles, peak counts, positivity, refinement
//! placement and mirror symmetry.

use crate::mesh::{Src, Topology, TreeMesh};
use crate::physics::Euler;
use crate::reconstruction::Vars;

/// `(x, u[comp])` at the leaf centers, sorted by `x` (1D meshes).
pub fn profile_1d(mesh: &TreeMesh, u: &[Vars], comp: usize) -> Vec<(f64, f64)> {
    let mut p: Vec<(f64, f64)> = mesh
        .leaves()
        .into_iter()
        .map(|id| (mesh.center(id)[0], u[id.index()][comp]))
        .collect();
    p.sort_by(|a, b| a.0.total_cmp(&b.0));
    p
}

/// Topographic prominence of every strict local maximum of `v`, as
/// `(index, prominence)`: the height above the higher of the two lowest
/// points reached before meeting a higher value or the end of `v`.
pub fn prominences(v: &[f64]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let n = v.len();
    for i in 0..n {
        let left_ok = i == 0 || v[i - 1] < v[i];
        let right_ok = i + 1 == n || v[i + 1] <= v[i];
        if !left_ok || !right_ok || n < 2 {
            continue;
        }
        // plateau: skip to its right end
        let mut j = i + 1;
        while j < n && v[j] == v[i] {
            j += 1;
        }
        if j < n && v[j] > v[i] {
            continue;
        }
        let mut left = v[i];
        for &x in v[..i].iter().rev() {
            if x > v[i] {
                break;
            }
            left = left.min(x);
        }
        let mut right = v[i];
        for &x in &v[j..] {
            if x > v[i] {
                break;
            }
            right = right.min(x);
        }
        let prom = v[i] - left.max(right);
        out.push((i, prom));
    }
    out
}

/// Local maxima with `x` in `[lo, hi]` and prominence at least `min_prom`.
pub fn count_peaks(profile: &[(f64, f64)], lo: f64, hi: f64, min_prom: f64) -> usize {
    let v: Vec<f64> = profile.iter().map(|p| p.1).collect();
    prominences(&v)
        .into_iter()
        .filter(|&(i, p)| p >= min_prom && (lo..=hi).contains(&profile[i].0))
        .count()
}

/// Smallest density and pressure over the leaves.
pub fn min_density_pressure(law: &Euler, mesh: &TreeMesh, u: &[Vars]) -> (f64, f64) {
    mesh.leaves().into_iter().fold((f64::INFINITY, f64::INFINITY), |(r, p), id| {
        let v = &u[id.index()];
        (r.min(v[0]), p.min(law.pressure(v)))
    })
}

/// Largest difference quotient `|u_k − u_j| / |x_k − x_j|` of one component
/// over the vertex neighbors of every leaf, slot-indexed.
pub fn gradient_indicator(topo: &Topology, u: &[Vars], comp: usize) -> Vec<f64> {
    let mut g = vec![0.0; topo.capacity];
    for &id in &topo.leaves {
        let uj = u[id.index()][comp];
        g[id.index()] = topo
            .neighbors(id)
            .iter()
            .filter_map(|n| match n.src {
                Src::Cell(k) => Some((u[k.index()][comp] - uj).abs() / n.offset[0].hypot(n.offset[1])),
                _ => None,
            })
            .fold(0.0, f64::max);
    }
    g
}

/// Volume-weighted median of a slot-indexed leaf field, so that refined
/// regions do not dominate.
pub fn volume_median(topo: &Topology, g: &[f64]) -> f64 {
    let mut vals: Vec<(f64, f64)> = topo.leaves.iter().map(|id| (g[id.index()], topo.volume(*id))).collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = 0.5 * vals.iter().map(|v| v.1).sum::<f64>();
    let mut acc = 0.0;
    for (v, w) in &vals {
        acc += w;
        if acc >= half {
            return *v;
        }
    }
    vals.last().map_or(0.0, |v| v.0)
}

/// Fraction of the finest-level leaves lying within `rings` cells of a leaf
/// whose gradient indicator exceeds `factor` times its volume-weighted median.
/// `None` when no leaf is at the finest level.
pub fn finest_near_jumps(mesh: &TreeMesh, u: &[Vars], comp: usize, factor: f64, rings: usize) -> Option<f64> {
    let topo = Topology::build(mesh);
    let g = gradient_indicator(&topo, u, comp);
    let median = volume_median(&topo, &g);
    let mut set = vec![false; topo.capacity];
    for &id in &topo.leaves {
        set[id.index()] = g[id.index()] > factor * median;
    }
    for _ in 0..rings {
        set = topo.expand(&set);
    }
    let top = mesh.max_level();
    let finest: Vec<_> = topo.leaves.iter().filter(|id| topo.level[id.index()] == top).collect();
    if finest.is_empty() {
        return None;
    }
    let near = finest.iter().filter(|id| set[id.index()]).count();
    Some(near as f64 / finest.len() as f64)
}

/// Largest difference between a 2D solution and its mirror image across
/// `y = about`, with component `flip` changing sign. `None` when the mesh is
/// not mirror symmetric.
pub fn mirror_defect(mesh: &TreeMesh, u: &[Vars], about: f64, flip: usize, comps: usize) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for id in mesh.leaves() {
        let c = mesh.center(id);
        let m = mesh.locate([c[0], 2.0 * about - c[1]]).ok()?;
        if mesh.size(m) != mesh.size(id) {
            return None;
        }
        for k in 0..comps {
            let s = if k == flip { -1.0 } else { 1.0 };
            worst = worst.max((u[id.index()][k] - s * u[m.index()][k]).abs());
        }
    }
    Some(worst)
}

/// Largest difference between `a` and the leaves of `b` at the same
/// positions. `None` when some leaf of `a` has no equal-size leaf in `b`.
pub fn overlap_defect(a: &TreeMesh, ua: &[Vars], b: &TreeMesh, ub: &[Vars], comps: usize) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for id in a.leaves() {
        let m = b.locate(a.center(id)).ok()?;
        if b.size(m) != a.size(id) {
            return None;
        }
        for k in 0..comps {
            worst = worst.max((ua[id.index()][k] - ub[m.index()][k]).abs());
        }
    }
    Some(worst)
}
