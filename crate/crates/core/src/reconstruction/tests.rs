use super::*;
use crate::mesh::{Domain, Neighbor, TreeMesh};
use proptest::prelude::*;

/// Dense Gaussian elimination with partial pivoting (independent of the
/// factorization used by the library).
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn normal_equations(rows: &[Vec<f64>], r: &[f64]) -> Vec<f64> {
    let p = rows[0].len();
    let mut ata = vec![vec![0.0; p]; p];
    let mut atb = vec![0.0; p];
    for (row, &rk) in rows.iter().zip(r) {
        for i in 0..p {
            atb[i] += row[i] * rk;
            for j in 0..p {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    gauss_solve(ata, atb)
}

fn quad_rows(hj: f64, s: &[Sample]) -> Vec<Vec<f64>> {
    s.iter()
        .map(|k| {
            let (x, y) = (k.offset[0], k.offset[1]);
            let d = (k.h * k.h - hj * hj) / 12.0;
            vec![x, y, 0.5 * (x * x + d), x * y, 0.5 * (y * y + d)]
        })
        .collect()
}

fn box_mean_q(c: [f64; 2], h: f64) -> f64 {
    // q(x, y) = x² + xy − y
    c[0] * c[0] + h * h / 12.0 + c[0] * c[1] - c[1]
}

fn samples_of(nb: &[Neighbor], cj: [f64; 2], f: impl Fn([f64; 2], f64) -> f64) -> Vec<Sample> {
    nb.iter()
        .map(|n| {
            let c = [cj[0] + n.offset[0], cj[1] + n.offset[1]];
            Sample {
                offset: n.offset,
                h: n.h,
                u: f(c, n.h),
            }
        })
        .collect()
}

fn adaptive_square() -> TreeMesh {
    let mut m = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 4, 4).unwrap();
    for p in [[0.3, 0.3], [0.3, 0.3], [0.6, 0.45], [0.1, 0.9]] {
        let id = m.locate(p).unwrap();
        m.refine(id).unwrap();
    }
    m
}

#[test]
fn constant_data_gives_constant_polynomial() {
    let cfg = CwenoConfig::default();
    let r = reconstruct_1d([2.5; 3], [0.1, 0.05, 0.2], &cfg).unwrap();
    assert_eq!(r.poly, Quadratic::constant(2.5));
    assert_eq!(r.beta, [0.0; 3]);
    for (w, a) in r.weights.iter().zip([0.5, 0.25, 0.25]) {
        assert!((w - a).abs() < 1e-15);
    }
}

#[test]
fn linear_data_is_reproduced_on_uniform_grid() {
    let h = 0.1;
    let r = reconstruct_1d([-h, 0.0, h], [h; 3], &CwenoConfig::default()).unwrap();
    assert!((r.optimal.px - 1.0).abs() < 1e-14);
    assert!(r.optimal.pxx.abs() < 1e-12);
    assert!((r.poly.px - 1.0).abs() < 1e-14);
}

#[test]
fn zero_size_is_a_geometry_error() {
    assert!(reconstruct_1d([1.0; 3], [0.1, 0.0, 0.1], &CwenoConfig::default()).is_err());
}

#[test]
fn weights_collapse_on_a_jump() {
    let cfg = CwenoConfig::default();
    // jump between j and j+1: right linear candidate and P_0 are penalized
    let r = reconstruct_1d([0.0, 0.0, 1.0], [0.01; 3], &cfg).unwrap();
    assert!(r.weights[1] > 0.99);
}

#[test]
fn beta_scales_like_h_squared_on_smooth_data() {
    let avg = |a: f64, b: f64| ((2.0 * a).cos() - (2.0 * b).cos()) / (2.0 * (b - a));
    let beta_at = |h: f64| {
        let x = 0.3;
        let u = [avg(x - 1.5 * h, x - 0.5 * h), avg(x - 0.5 * h, x + 0.5 * h), avg(x + 0.5 * h, x + 1.5 * h)];
        reconstruct_1d(u, [h; 3], &CwenoConfig::default()).unwrap().beta
    };
    let b1 = beta_at(0.02);
    let b2 = beta_at(0.01);
    for g in 0..3 {
        let ratio = b2[g] / b1[g];
        assert!(ratio > 0.25 / 1.5 && ratio < 0.25 * 1.5, "gamma {g}: {ratio}");
    }
}

#[test]
fn quadratic_recovered_from_normal_equations_on_adaptive_mesh() {
    let m = adaptive_square();
    for j in m.leaves() {
        let nb = m.neighbors(j).unwrap();
        let cj = m.center(j);
        let hj = m.size(j);
        let s = samples_of(&nb, cj, box_mean_q);
        let fit = optimal_poly_2d(hj, box_mean_q(cj, hj), &s).unwrap();
        assert!(!fit.rank_deficient);
        let p = fit.poly;
        assert!((p.px - (2.0 * cj[0] + cj[1])).abs() < 1e-9, "{p:?}");
        assert!((p.py - (cj[0] - 1.0)).abs() < 1e-9);
        assert!((p.pxx - 2.0).abs() < 1e-8);
        assert!((p.pxy - 1.0).abs() < 1e-8);
        assert!(p.pyy.abs() < 1e-8);
    }
}

#[test]
fn least_squares_matches_normal_equations_oracle() {
    let mut m = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 4, 3).unwrap();
    let root = m.locate([0.1, 0.1]).unwrap();
    m.split_unbalanced(root);
    let p = m.locate([0.05, 0.2]).unwrap();
    m.split_unbalanced(p);
    let j = m.locate([0.1, 0.23]).unwrap();
    let nb = m.neighbors(j).unwrap();
    let hj = m.size(j);
    let vals = [0.3, -1.2, 0.7, 2.1, -0.4];
    let s: Vec<Sample> = nb
        .iter()
        .zip(vals)
        .map(|(n, u)| Sample { offset: n.offset, h: n.h, u })
        .collect();
    let uj = 0.25;
    let fit = optimal_poly_2d(hj, uj, &s).unwrap();
    let r: Vec<f64> = s.iter().map(|k| k.u - uj).collect();
    let c = normal_equations(&quad_rows(hj, &s), &r);
    let got = [fit.poly.px, fit.poly.py, fit.poly.pxx, fit.poly.pxy, fit.poly.pyy];
    for i in 0..5 {
        let scale = c[i].abs().max(1.0);
        assert!((got[i] - c[i]).abs() < 1e-10 * scale, "{i}: {} vs {}", got[i], c[i]);
    }
    // NE stencil has two members: a square system solved exactly
    let st = m.directional_stencils(j).unwrap();
    let ne: Vec<Sample> = st[0]
        .iter()
        .map(|n| s[nb.iter().position(|k| k == n).unwrap()])
        .collect();
    assert_eq!(ne.len(), 2);
    let plane = linear_fit_2d(hj, uj, &ne).unwrap().poly;
    for k in &ne {
        let res = plane.px * k.offset[0] + plane.py * k.offset[1] - (k.u - uj);
        assert!(res.abs() < 1e-12);
    }
}

#[test]
fn sector_plane_matches_oracle_for_parabola() {
    let m = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 8, 2).unwrap();
    let j = m.locate([0.45, 0.55]).unwrap();
    let cj = m.center(j);
    let hj = m.size(j);
    let f = |c: [f64; 2], h: f64| c[0] * c[0] + h * h / 12.0;
    let st = m.directional_stencils(j).unwrap();
    let ne = samples_of(&st[0], cj, f);
    let uj = f(cj, hj);
    let plane = linear_fit_2d(hj, uj, &ne).unwrap().poly;
    let rows: Vec<Vec<f64>> = ne.iter().map(|k| vec![k.offset[0], k.offset[1]]).collect();
    let r: Vec<f64> = ne.iter().map(|k| k.u - uj).collect();
    let c = normal_equations(&rows, &r);
    assert!((plane.px - c[0]).abs() < 1e-12);
    assert!((plane.py - c[1]).abs() < 1e-12);
}

#[test]
fn affine_data_reproduced_by_every_candidate() {
    let m = adaptive_square();
    let f = |c: [f64; 2], _h: f64| 1.5 - 2.0 * c[0] + 0.75 * c[1];
    for j in m.leaves() {
        let cj = m.center(j);
        let hj = m.size(j);
        let uj = f(cj, hj);
        let nb = m.neighbors(j).unwrap();
        let s = samples_of(&nb, cj, f);
        let opt = optimal_poly_2d(hj, uj, &s).unwrap().poly;
        let st = m.directional_stencils(j).unwrap();
        let secs: Vec<Vec<Sample>> = st.iter().map(|q| samples_of(q, cj, f)).collect();
        let planes = sector_planes_2d(hj, uj, [&secs[0], &secs[1], &secs[2], &secs[3]]).unwrap();
        let planes = [planes[0].poly, planes[1].poly, planes[2].poly, planes[3].poly];
        let b = blend_2d(&opt, &planes, &CwenoConfig::default(), hj);
        assert!((b.poly.px + 2.0).abs() < 1e-10);
        assert!((b.poly.py - 0.75).abs() < 1e-10);
        assert!(b.poly.pxx.abs() < 1e-8 && b.poly.pxy.abs() < 1e-8 && b.poly.pyy.abs() < 1e-8);
    }
}

#[test]
fn equal_indicators_give_linear_weights() {
    let opt = Quadratic {
        u: 1.0,
        px: 0.3,
        py: -0.2,
        pxx: 0.5,
        pxy: 0.1,
        pyy: -0.4,
    };
    let cands = [opt; 5];
    let (p, w, _) = nonlinear_blend(&cands, &[0.5, 0.125, 0.125, 0.125, 0.125], 0.1, 0.1);
    for (g, a) in w.iter().zip([0.5, 0.125, 0.125, 0.125, 0.125]) {
        assert!((g - a).abs() < 1e-15);
    }
    assert!((p.px - opt.px).abs() < 1e-15);
    let planes = [Quadratic::constant(2.0); 4];
    let b = blend_2d(&Quadratic::constant(2.0), &planes, &CwenoConfig::default(), 0.1);
    assert_eq!(b.poly.u, 2.0);
    assert_eq!(b.poly.px, 0.0);
}

#[test]
fn jump_in_ne_sector_suppresses_its_weight() {
    let weights_at = |n0: usize| {
        let m = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), n0, 1).unwrap();
        let j = m.locate([0.5 - 0.25 / n0 as f64, 0.5 - 0.25 / n0 as f64]).unwrap();
        let cj = m.center(j);
        let hj = m.size(j);
        // smooth background plus a step across the NE quadrant
        let f = |c: [f64; 2], _h: f64| {
            let base = (c[0] + c[1]).sin();
            if c[0] > 0.5 && c[1] > 0.5 {
                base + 1.0
            } else {
                base
            }
        };
        let nb = m.neighbors(j).unwrap();
        let s = samples_of(&nb, cj, f);
        let uj = f(cj, hj);
        let opt = optimal_poly_2d(hj, uj, &s).unwrap().poly;
        let st = m.directional_stencils(j).unwrap();
        let secs: Vec<Vec<Sample>> = st.iter().map(|q| samples_of(q, cj, f)).collect();
        let planes = sector_planes_2d(hj, uj, [&secs[0], &secs[1], &secs[2], &secs[3]]).unwrap();
        let planes = [planes[0].poly, planes[1].poly, planes[2].poly, planes[3].poly];
        blend_2d(&opt, &planes, &CwenoConfig::default(), hj).weights
    };
    let w1 = weights_at(40);
    let w2 = weights_at(80);
    assert!(w1[1] < w1[4]);
    assert!(w2[1] < w2[4]);
    assert!(w2[1] / w2[4] < w1[1] / w1[4]);
}

#[test]
fn evaluation_and_averages() {
    let p = ReconPolynomial {
        dim: 2,
        h: 0.2,
        m: 1,
        comps: [
            Quadratic {
                u: 1.0,
                px: 0.5,
                py: -1.0,
                pxx: 3.0,
                pxy: 2.0,
                pyy: -1.5,
            },
            Quadratic::default(),
            Quadratic::default(),
            Quadratic::default(),
        ],
    };
    let full = p.average_over([-0.1, -0.1], [0.1, 0.1]).unwrap()[0];
    assert!((full - 1.0).abs() < 1e-15);
    let kids = p.child_averages();
    let mean: f64 = kids.iter().map(|k| k[0]).sum::<f64>() / 4.0;
    assert!((mean - 1.0).abs() < 1e-15);
    // children against dense midpoint sampling
    let n = 400;
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            let x = 0.1 * (a as f64 + 0.5) / n as f64;
            let y = -0.1 + 0.1 * (b as f64 + 0.5) / n as f64;
            acc += p.eval([x, y])[0];
        }
    }
    assert!((acc / (n * n) as f64 - kids[1][0]).abs() < 1e-6);
    // direct evaluation at a face node
    let g = 0.1 * crate::quadrature::GAUSS2_HALF * 2.0;
    let d = [0.1, g];
    let q = &p.comps[0];
    let direct = q.u + q.px * d[0] + q.py * d[1] + 0.5 * q.pxx * (d[0] * d[0] - 0.04 / 12.0)
        + q.pxy * d[0] * d[1]
        + 0.5 * q.pyy * (d[1] * d[1] - 0.04 / 12.0);
    assert!((p.evaluate(d).unwrap()[0] - direct).abs() < 1e-14);
    assert!(p.evaluate([0.11, 0.0]).is_err());
}

#[test]
fn minmod_examples() {
    let p = reconstruct_minmod_1d([0.0, 0.1, 0.2], [0.1; 3]);
    assert!((p.px - 1.0).abs() < 1e-14);
    assert_eq!(reconstruct_minmod_1d([1.0, 2.0, 1.0], [0.1; 3]).px, 0.0);
    assert_eq!(minmod(0.5, 2.0), 0.5);
    assert_eq!(minmod(-2.0, -0.5), -0.5);
    let s = |dx: f64, dy: f64, u: f64| Sample { offset: [dx, dy], h: 0.1, u };
    let w = [s(-0.1, 0.0, -0.1)];
    let e = [s(0.1, 0.0, 0.1)];
    let so = [s(0.0, -0.1, 0.2)];
    let n = [s(0.0, 0.1, -0.2)];
    let q = reconstruct_minmod_2d(0.0, [&w, &e, &so, &n]);
    assert!((q.px - 1.0).abs() < 1e-14);
    assert!((q.py + 2.0).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn one_d_reconstruction_is_conservative_and_normalized(
        u in proptest::array::uniform3(-5.0f64..5.0),
        h in proptest::array::uniform3(0.01f64..1.0),
    ) {
        let r = reconstruct_1d(u, h, &CwenoConfig::default()).unwrap();
        let s: f64 = r.weights.iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-14);
        prop_assert!(r.weights.iter().all(|&w| w >= 0.0));
        let avg = r.poly.mean_over(h[1], [-0.5 * h[1], 0.0], [0.5 * h[1], 0.0]);
        prop_assert!((avg - u[1]).abs() <= 1e-13 * u[1].abs().max(1.0));
        for c in &r.candidates {
            let a = c.mean_over(h[1], [-0.5 * h[1], 0.0], [0.5 * h[1], 0.0]);
            prop_assert!((a - u[1]).abs() <= 1e-13 * u[1].abs().max(1.0));
        }
        let mm = reconstruct_minmod_1d(u, h);
        prop_assert_eq!(mm.u, u[1]);
    }

    #[test]
    fn one_d_optimal_is_exact_on_quadratics(
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0,
        h in proptest::array::uniform3(0.01f64..0.5),
        x0 in -1.0f64..1.0,
    ) {
        let prim = |x: f64| a * x + 0.5 * b * x * x + c * x * x * x / 3.0;
        let edges = [x0, x0 + h[0], x0 + h[0] + h[1], x0 + h[0] + h[1] + h[2]];
        let u: Vec<f64> = (0..3).map(|k| (prim(edges[k + 1]) - prim(edges[k])) / h[k]).collect();
        let p = optimal_1d([u[0], u[1], u[2]], h).unwrap();
        let xj = 0.5 * (edges[1] + edges[2]);
        prop_assert!((p.px - (b + 2.0 * c * xj)).abs() < 1e-8);
        prop_assert!((p.pxx - 2.0 * c).abs() < 1e-7);
    }

    #[test]
    fn one_d_affine_exactness_through_weights(
        a in -3.0f64..3.0, b in -3.0f64..3.0,
        h in proptest::array::uniform3(0.01f64..0.5),
    ) {
        let xs = [-0.5 * (h[0] + h[1]), 0.0, 0.5 * (h[1] + h[2])];
        let u = [a + b * xs[0], a, a + b * xs[2]];
        let r = reconstruct_1d(u, h, &CwenoConfig::default()).unwrap();
        prop_assert!((r.poly.px - b).abs() < 1e-10);
        prop_assert!(r.poly.pxx.abs() < 1e-8);
    }

    #[test]
    fn two_d_blend_normalized_and_conservative(
        vals in proptest::collection::vec(-3.0f64..3.0, 12),
        uj in -3.0f64..3.0,
    ) {
        let m = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 4, 2).unwrap();
        let j = m.locate([0.3, 0.6]).unwrap();
        let hj = m.size(j);
        let nb = m.neighbors(j).unwrap();
        let s: Vec<Sample> = nb.iter().enumerate().map(|(k, n)| Sample { offset: n.offset, h: n.h, u: vals[k] }).collect();
        let opt = optimal_poly_2d(hj, uj, &s).unwrap().poly;
        let st = m.directional_stencils(j).unwrap();
        let secs: Vec<Vec<Sample>> = st.iter().map(|q| q.iter().map(|n| s[nb.iter().position(|k| k == n).unwrap()]).collect()).collect();
        let planes = sector_planes_2d(hj, uj, [&secs[0], &secs[1], &secs[2], &secs[3]]).unwrap();
        let planes = [planes[0].poly, planes[1].poly, planes[2].poly, planes[3].poly];
        let b = blend_2d(&opt, &planes, &CwenoConfig::default(), hj);
        let sum: f64 = b.weights.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-14);
        prop_assert!(b.weights.iter().all(|&w| w >= 0.0));
        let hh = 0.5 * hj;
        for p in [opt, b.central, b.poly, planes[0]] {
            let avg = p.mean_over(hj, [-hh, -hh], [hh, hh]);
            prop_assert!((avg - uj).abs() <= 1e-13 * uj.abs().max(1.0));
        }
    }
}
