use super::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn s(v: f64) -> Vars {
    [v, 0.0, 0.0, 0.0]
}

#[test]
fn llf_upwinds_linear_advection() {
    let law = Advection::new([1.0, 0.0]);
    let f = llf_flux(&law, 0, 1.0, [0.0; 2], &s(2.0), &s(5.0)).unwrap();
    assert_eq!(f[0], 2.0);
    // seen from the other cell the normal flips
    let g = llf_flux(&law, 0, -1.0, [0.0; 2], &s(5.0), &s(2.0)).unwrap();
    assert_eq!(g[0], -2.0);
}

#[test]
fn llf_is_consistent_for_burgers() {
    let f = llf_flux(&Burgers, 0, 1.0, [0.0; 2], &s(0.7), &s(0.7)).unwrap();
    assert!((f[0] - 0.245).abs() < 1e-15);
    let p = llf_entropy_flux(&Burgers, 0, 1.0, [0.0; 2], &s(0.5), &s(0.5)).unwrap();
    assert!((p - 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn advection_entropy_flux_uses_the_dissipative_sign() {
    let law = Advection::new([1.0, 0.0]);
    // ½[(1 + 9) − 1·(9 − 1)] = 1, the upwind value ψ(u_in)
    let p = llf_entropy_flux(&law, 0, 1.0, [0.0; 2], &s(1.0), &s(3.0)).unwrap();
    assert!((p - 1.0).abs() < 1e-15);
}

fn jacobian_spectral_radius(law: &Euler, u: &Vars, axis: usize) -> f64 {
    let m = law.components();
    let mut j = DMatrix::zeros(m, m);
    for c in 0..m {
        let eps = 1e-6 * u[c].abs().max(1.0);
        let mut up = *u;
        let mut dn = *u;
        up[c] += eps;
        dn[c] -= eps;
        let fu = law.flux(&up, [0.0; 2], axis);
        let fd = law.flux(&dn, [0.0; 2], axis);
        for r in 0..m {
            j[(r, c)] = (fu[r] - fd[r]) / (2.0 * eps);
        }
    }
    j.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn euler_wave_speed_matches_jacobian_eigenvalues() {
    let law = Euler::new(1);
    let left = law.from_primitive(&[1.0, 0.0, 1.0]);
    let right = law.from_primitive(&[0.125, 0.0, 0.1]);
    let alpha = llf_axis(&law, 0, [0.0; 2], &left, &right).alpha;
    let oracle = jacobian_spectral_radius(&law, &left, 0).max(jacobian_spectral_radius(&law, &right, 0));
    assert!((alpha - oracle).abs() < 1e-6 * oracle, "{alpha} vs {oracle}");
    let law2 = Euler::new(2);
    let u = law2.from_primitive(&[0.8, 0.3, -0.7, 1.3]);
    for axis in 0..2 {
        let oracle = jacobian_spectral_radius(&law2, &u, axis);
        assert!((law2.max_speed(&u, [0.0; 2], axis) - oracle).abs() < 1e-6 * oracle);
    }
}

#[test]
fn inadmissible_state_is_flagged() {
    let law = Euler::new(1);
    let bad = [1.0, 0.0, -1.0, 0.0];
    let good = law.from_primitive(&[1.0, 0.0, 1.0]);
    assert!(matches!(
        llf_flux(&law, 0, 1.0, [0.5, 0.0], &good, &bad),
        Err(PhysicsError::Positivity { .. })
    ));
}

#[test]
fn boundary_states() {
    let law = Euler::new(2);
    let inner = law.from_primitive(&[1.0, 0.3, -0.2, 1.0]);
    let bcs = Boundaries::uniform(BoundaryCondition::Reflecting);
    let g = law.to_primitive(&bcs.outer_state(&law, Side::YLo, &inner));
    let want = [1.0, 0.3, 0.2, 1.0];
    for c in 0..4 {
        assert!((g[c] - want[c]).abs() < 1e-14);
    }
    let ff = Boundaries::uniform(BoundaryCondition::FreeFlow);
    assert_eq!(ff.outer_state(&law, Side::XHi, &inner), inner);
    let left = law.from_primitive(&[3.6666666666666666, 2.7136021011998722, 0.0, 10.0]);
    let d = Boundaries::uniform(BoundaryCondition::FreeFlow).with(Side::XLo, BoundaryCondition::Dirichlet(left));
    let w = law.to_primitive(&d.outer_state(&law, Side::XLo, &inner));
    let want = [3.6666666666666666, 2.7136021011998722, 0.0, 10.0];
    for c in 0..4 {
        assert!((w[c] - want[c]).abs() < 1e-13);
    }
}

#[test]
fn corner_ghost_reflects_before_the_inflow_state() {
    let law = Euler::new(2);
    let shocked = law.from_primitive(&[2.0, 1.0, 0.5, 3.0]);
    let bcs = Boundaries::uniform(BoundaryCondition::Reflecting).with(Side::XLo, BoundaryCondition::Dirichlet(shocked));
    let mesh = crate::mesh::TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 4, 0).unwrap();
    let topo = Topology::build(&mesh);
    let corner = mesh.locate([0.1, 0.1]).unwrap();
    let u: Vec<Vars> = (0..topo.capacity).map(|_| law.from_primitive(&[1.0, 0.3, -0.2, 1.0])).collect();
    let mut g = Vec::new();
    apply_bc(&topo, &u, &law, &bcs, &mut g);
    let (i, spec) = topo
        .ghosts
        .iter()
        .enumerate()
        .find(|(_, s)| s.owner == corner && s.corner.is_some())
        .unwrap();
    assert_eq!((spec.side, spec.corner), (Side::XLo, Some(Side::YLo)));
    // mirror image of the XLo ghost of the cell below the wall
    assert_eq!(g[i], shocked);
    assert_eq!(topo.ghosts.iter().filter(|s| s.corner.is_some()).count(), 4);
}

#[test]
fn boundary_configuration_is_validated() {
    let dom = Domain::interval(0.0, 1.0);
    let refl = Boundaries::uniform(BoundaryCondition::Reflecting);
    assert!(refl.validate(&Burgers, &dom).is_err());
    assert!(refl.validate(&Euler::new(1), &dom).is_ok());
    assert!(Boundaries::periodic().validate(&Burgers, &dom).is_err());
    assert!(Boundaries::periodic().validate(&Burgers, &dom.clone().with_all_periodic()).is_ok());
}

#[test]
fn swirl_velocity_is_regular_at_origin() {
    let v0 = Swirl::velocity([0.0, 0.0]);
    assert_eq!(v0, [0.0, 0.0]);
    let v = Swirl::velocity([1e-9, 0.0]);
    assert!((v[1] - 1e-9 / 0.385).abs() < 1e-20);
    let r: f64 = 1.3;
    let f = r.tanh() / r.cosh().powi(2);
    let v = Swirl::velocity([0.0, r]);
    assert!((v[0] + f / 0.385).abs() < 1e-14);
}

fn euler_state(d: usize) -> impl Strategy<Value = Vars> {
    (0.1f64..5.0, -2.0f64..2.0, -2.0f64..2.0, 0.1f64..10.0).prop_map(move |(r, u, v, p)| {
        let law = Euler::new(d);
        if d == 1 {
            law.from_primitive(&[r, u, p])
        } else {
            law.from_primitive(&[r, u, v, p])
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn fluxes_are_consistent(a in -3.0f64..3.0, x in -4.0f64..4.0, y in -4.0f64..4.0,
                             u1 in euler_state(1), u2 in euler_state(2)) {
        let scalar: [Model; 3] = [
            Model::Advection(Advection::new([1.5, -0.5])),
            Model::Swirl(Swirl),
            Model::Burgers(Burgers),
        ];
        for law in &scalar {
            for axis in 0..2 {
                let f = llf_axis(law, axis, [x, y], &s(a), &s(a));
                let exact = law.flux(&s(a), [x, y], axis)[0];
                prop_assert!((f.flux[0] - exact).abs() <= 1e-13 * exact.abs().max(1.0));
                let e = law.entropy_flux(&s(a), [x, y], axis);
                prop_assert!((f.entropy_flux - e).abs() <= 1e-13 * e.abs().max(1.0));
            }
        }
        for (law, u) in [(Euler::new(1), u1), (Euler::new(2), u2)] {
            for axis in 0..law.dim {
                let f = llf_axis(&law, axis, [0.0; 2], &u, &u);
                let exact = law.flux(&u, [0.0; 2], axis);
                for c in 0..law.components() {
                    prop_assert!((f.flux[c] - exact[c]).abs() <= 1e-13 * exact[c].abs().max(1.0));
                }
                let v = u[1 + axis] / u[0];
                let e = v * law.entropy(&u);
                prop_assert!((f.entropy_flux - e).abs() <= 1e-13 * e.abs().max(1.0));
            }
        }
    }

    #[test]
    fn alpha_bounds_the_scalar_lipschitz_ratio(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let f = llf_axis(&Burgers, 0, [0.0; 2], &s(a), &s(b));
        let ratio = (Burgers.flux(&s(a), [0.0; 2], 0)[0] - Burgers.flux(&s(b), [0.0; 2], 0)[0]).abs() / (a - b).abs();
        prop_assert!(f.alpha >= ratio - 1e-12);
    }

    #[test]
    fn euler_entropy_is_convex_along_segments(u in euler_state(2), w in euler_state(2), t in 0.05f64..0.95) {
        let law = Euler::new(2);
        let at = |s: f64| {
            let mut z = [0.0; 4];
            for c in 0..4 {
                z[c] = (1.0 - s) * u[c] + s * w[c];
            }
            z
        };
        let d = 1e-3;
        prop_assume!(law.admissible(&at(t - d)) && law.admissible(&at(t + d)));
        let second = law.entropy(&at(t - d)) - 2.0 * law.entropy(&at(t)) + law.entropy(&at(t + d));
        prop_assert!(second >= -1e-9);
    }
}
