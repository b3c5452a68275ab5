use super::*;
use crate::integrator::RkScheme;
use crate::mesh::Domain;
use crate::physics::{BoundaryCondition, Burgers, Euler};
use std::f64::consts::PI;

fn line(n: usize, periodic: bool, l: u8) -> TreeMesh {
    let mut d = Domain::interval(-1.0, 1.0);
    if periodic {
        d = d.with_all_periodic();
    }
    TreeMesh::build_uniform(&d, n, l).unwrap()
}

fn count(set: &[bool]) -> usize {
    set.iter().filter(|&&b| b).count()
}

#[test]
fn dependence_cone_in_one_dimension() {
    let mesh = line(20, false, 2);
    let topo = Topology::build(&mesh);
    let mut seed = vec![false; topo.capacity];
    seed[mesh.locate([0.05, 0.0]).unwrap().index()] = true;
    assert_eq!(count(&domain_of_dependence(&topo, &seed, 3)), 7);
    assert_eq!(count(&domain_of_dependence(&topo, &seed, 1)), 3);
    let mut edge = vec![false; topo.capacity];
    edge[mesh.locate([-0.99, 0.0]).unwrap().index()] = true;
    assert_eq!(count(&domain_of_dependence(&topo, &edge, 3)), 4);
}

#[test]
fn thresholds() {
    let c = AdaptConfig::new(0.1, 3, 4);
    assert!((c.s_coa - 0.1 / 16.0).abs() < 1e-17);
    assert_eq!(c.max_iters, 6);
    assert!(c.validate().is_ok());
    assert!(AdaptConfig::new(0.1, 2, 4).s_coa == 0.1 / 8.0);
    let bad = AdaptConfig { s_coa: 0.2, ..c };
    assert!(bad.validate().is_err());
    assert!(AdaptConfig::new(-1.0, 3, 4).validate().is_err());
    assert!(AdaptConfig::new(f64::INFINITY, 3, 4).validate().is_ok());
}

fn burgers_init(x: [f64; 2]) -> Vars {
    [0.3 - (PI * x[0]).sin() + 0.5 * (-80.0 * (x[0] - 0.4).powi(2)).exp(), 0.0, 0.0, 0.0]
}

#[test]
fn infinite_threshold_reproduces_uniform_scheme() {
    let mesh = line(32, true, 4);
    let scheme = SchemeConfig::default();
    let mut ctl = Controller::new(mesh.clone(), &Burgers, Boundaries::periodic(), scheme, AdaptConfig::new(f64::INFINITY, 3, 4), burgers_init).unwrap();
    let disc = Discretization::new(&mesh, &Burgers, Boundaries::periodic(), scheme).unwrap();
    let mut st = ctl.state.clone();
    let rk = RkScheme::ssp3();
    for _ in 0..25 {
        let stats = ctl.step(f64::INFINITY).unwrap();
        let dt = disc.cfl_dt(&st, f64::INFINITY).unwrap();
        st = disc.ssp_rk_step(&rk, &st, dt).unwrap().0;
        assert_eq!(stats.dt, dt);
        assert_eq!(stats.n_refined + stats.n_coarsened, 0);
        for &id in &disc.topo.leaves {
            assert_eq!(st.u[id.index()], ctl.state.u[id.index()]);
        }
    }
}

#[test]
fn adaptation_conserves_mass_and_respects_level_cap() {
    let mesh = line(32, true, 3);
    let mut ctl = Controller::new(mesh, &Burgers, Boundaries::periodic(), SchemeConfig::default(), AdaptConfig::new(2e-2, 3, 3), burgers_init).unwrap();
    let mut mass = ctl.state.total(&ctl.disc.topo)[0];
    let (mut refined, mut coarsened) = (0, 0);
    let stats = ctl
        .run_until(0.4, |c, s| {
            refined += s.n_refined;
            coarsened += s.n_coarsened;
            let m = c.state.total(&c.disc.topo)[0];
            assert!((m - mass).abs() <= 1e-12 * mass.abs(), "step {}: {m} vs {mass}", s.step);
            mass = m;
            for &id in &c.disc.topo.leaves {
                assert!(c.mesh.level(id) <= 3);
            }
        })
        .unwrap();
    assert!(refined > 0 && coarsened > 0, "{refined} {coarsened}");
    assert!(stats.iter().any(|s| s.restarts == 0 && s.n_refined > 0), "local recomputation never exercised");
}

#[test]
fn mass_is_conserved_in_a_reflecting_box() {
    let law = Euler::new(2);
    let mesh = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 16, 2).unwrap();
    let init = move |x: [f64; 2]| {
        let r2 = (x[0] - 0.4).powi(2) + (x[1] - 0.55).powi(2);
        let p = if r2 < 0.03 { 3.0 } else { 1.0 };
        law.from_primitive(&[1.0, 0.0, 0.0, p])
    };
    let mut ctl = Controller::new(
        mesh,
        &law,
        Boundaries::uniform(BoundaryCondition::Reflecting),
        SchemeConfig::default(),
        AdaptConfig::new(0.5, 3, 2),
        init,
    )
    .unwrap();
    let m0 = ctl.state.total(&ctl.disc.topo);
    let mut changes = 0;
    ctl.run_until(0.05, |c, s| {
        changes += s.n_refined + s.n_coarsened;
        let m = c.state.total(&c.disc.topo);
        for k in [0, 3] {
            assert!((m[k] - m0[k]).abs() <= 1e-12 * m0[k].abs(), "component {k}");
        }
    })
    .unwrap();
    assert!(changes > 0);
}

#[test]
fn local_recomputation_matches_full_recomputation() {
    for order in [2, 3] {
        let run = |local: bool| {
            let cfg = AdaptConfig {
                local_recompute: local,
                ..AdaptConfig::new(5e-2, order, 3)
            };
            let mut ctl = Controller::new(line(24, true, 3), &Burgers, Boundaries::periodic(), SchemeConfig::with_order(order), cfg, burgers_init).unwrap();
            let stats = ctl.run_until(0.3, |_, _| {}).unwrap();
            (ctl, stats)
        };
        let (a, sa) = run(true);
        let (b, sb) = run(false);
        assert_eq!(sa.len(), sb.len());
        for (x, y) in sa.iter().zip(&sb) {
            assert_eq!((x.dt, x.n_leaves, x.max_s), (y.dt, y.n_leaves, y.max_s));
        }
        assert_eq!(a.disc.topo.leaves, b.disc.topo.leaves);
        for &id in &a.disc.topo.leaves {
            assert_eq!(a.state.u[id.index()], b.state.u[id.index()]);
        }
    }
}

#[test]
fn quiet_state_keeps_the_mesh() {
    let mesh = line(16, true, 3);
    let smooth = |x: [f64; 2]| [1.0 + 0.01 * (PI * x[0]).sin(), 0.0, 0.0, 0.0];
    let mut ctl = Controller::new(mesh.clone(), &Burgers, Boundaries::periodic(), SchemeConfig::default(), AdaptConfig::new(1.0, 3, 3), smooth).unwrap();
    let disc = Discretization::new(&mesh, &Burgers, Boundaries::periodic(), SchemeConfig::default()).unwrap();
    let st0 = ctl.state.clone();
    let s = ctl.step(f64::INFINITY).unwrap();
    assert_eq!((s.n_refined, s.n_coarsened), (0, 0));
    let plain = disc.ssp_rk_step(&RkScheme::ssp3(), &st0, s.dt).unwrap().0;
    assert_eq!(plain.u, ctl.state.u);
}

#[test]
fn stats_row() {
    let s = StepStats {
        step: 3,
        t: 0.5,
        dt: 0.25,
        n_leaves: 40,
        n_refined: 2,
        n_coarsened: 1,
        max_s: 0.125,
        iterations: 1,
        restarts: 0,
    };
    let mut buf = Vec::new();
    s.write_csv_row(&mut buf).unwrap();
    let line = String::from_utf8(buf).unwrap();
    let f: Vec<&str> = line.trim().split(',').collect();
    assert_eq!(f.len(), StepStats::CSV_HEADER.split(',').count());
    assert_eq!(f[0], "3");
    assert_eq!(f[1].parse::<f64>().unwrap(), 0.5);
    assert_eq!(f[6].parse::<f64>().unwrap(), 0.125);
}
