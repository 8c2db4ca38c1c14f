//! Randomized invariants of the material laws, the reduction, the solvers and the configuration.

use std::f64::consts::PI;

use nalgebra::{Matrix6, Rotation3, SymmetricEigen, Vector3};
use proptest::prelude::*;

use vonkarman::config::parse_config;
use vonkarman::elasto3d::{internal_force, Grid3, SlabState, Vec3};
use vonkarman::fields::FieldExpr;
use vonkarman::forcing::Forcing2;
use vonkarman::harness::fit_slope;
use vonkarman::material::dist_squared;
use vonkarman::plate2d::{Grid2, MembraneSolver, PlateSolver, Regime};
use vonkarman::reduction::q3_of_embedding;
use vonkarman::tensor::embed;
use vonkarman::{q2, reduce, reduce_bruteforce, ElasticTensor3, Mat2, Mat3, MaterialModel, ReducedTensor2};

fn mat3(scale: f64) -> impl Strategy<Value = Mat3> {
    prop::array::uniform9(-scale..scale).prop_map(|a| Mat3::from_column_slice(&a))
}

fn mat2() -> impl Strategy<Value = Mat2> {
    prop::array::uniform4(-1.0..1.0f64).prop_map(|a| Mat2::from_column_slice(&a))
}

fn rotation() -> impl Strategy<Value = Mat3> {
    (prop::array::uniform3(-1.0..1.0f64), 0.0..PI).prop_map(|(a, angle)| {
        let axis = Vector3::from(a);
        let n = axis.norm();
        if n < 1e-6 {
            Mat3::identity()
        } else {
            *Rotation3::from_scaled_axis(axis * (angle / n)).matrix()
        }
    })
}

fn spd6() -> impl Strategy<Value = ElasticTensor3> {
    prop::collection::vec(-1.0..1.0f64, 36).prop_map(|v| {
        let a = Matrix6::from_column_slice(&v);
        ElasticTensor3(a * a.transpose() + Matrix6::identity() * 0.1)
    })
}

fn psd6() -> impl Strategy<Value = Matrix6<f64>> {
    prop::collection::vec(-1.0..1.0f64, 36).prop_map(|v| {
        let a = Matrix6::from_column_slice(&v);
        a * a.transpose()
    })
}

fn model() -> impl Strategy<Value = MaterialModel> {
    prop_oneof![
        (0.1..10.0f64).prop_map(|k| MaterialModel::dist_so3(k).unwrap()),
        (0.1..10.0f64, 0.0..10.0f64).prop_map(|(mu, l)| MaterialModel::svk(mu, l).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn energy_is_frame_indifferent(m in model(), f in mat3(1.5), r in rotation()) {
        let f = f + Mat3::identity();
        let w = m.energy_density(&f).unwrap();
        prop_assert!((m.energy_density(&(r * f)).unwrap() - w).abs() <= 1e-12 * (1.0 + w));
    }

    #[test]
    fn dist_model_energy_is_its_coercivity_bound(kappa in 0.1..10.0f64, f in mat3(1.7)) {
        prop_assume!(f.norm() <= 3.0);
        let m = MaterialModel::dist_so3(kappa).unwrap();
        let w = m.energy_density(&f).unwrap();
        let bound = kappa * dist_squared(&f);
        prop_assert!(w >= bound - 1e-12 * (1.0 + bound));
    }

    #[test]
    fn stress_is_energy_gradient(m in model(), f in mat3(0.5)) {
        let f = f + Mat3::identity();
        prop_assume!(f.determinant() > 0.2);
        let p = m.stress(&f).unwrap();
        let eps = 1e-6;
        for i in 0..3 {
            for j in 0..3 {
                let (mut a, mut b) = (f, f);
                a[(i, j)] += eps;
                b[(i, j)] -= eps;
                let fd = (m.energy_density(&a).unwrap() - m.energy_density(&b).unwrap()) / (2.0 * eps);
                prop_assert!((fd - p[(i, j)]).abs() <= 1e-6 * (1.0 + p.norm()), "{} vs {}", fd, p[(i, j)]);
            }
        }
    }

    #[test]
    fn dist_model_stress_grows_linearly(kappa in 0.1..10.0f64, f in mat3(3.0)) {
        let m = MaterialModel::dist_so3(kappa).unwrap();
        prop_assume!(f.determinant().abs() > 1e-3);
        let p = m.stress(&f).unwrap();
        prop_assert!(p.norm() <= 2.0 * kappa * (f.norm() + 3f64.sqrt()) + 1e-10);
    }

    #[test]
    fn tangent_is_symmetric_and_positive_on_strains(m in model()) {
        let c = *m.tangent_at_identity().matrix();
        prop_assert!((c - c.transpose()).abs().max() <= 1e-14 * c.abs().max());
        let eig = SymmetricEigen::new(c).eigenvalues;
        prop_assert!(eig.min() > 0.0, "{eig}");
    }

    #[test]
    fn schur_reduction_matches_bruteforce(l in spd6(), g in mat2()) {
        let schur = q2(&reduce(&l).unwrap(), &g);
        let brute = reduce_bruteforce(&l, &g).unwrap();
        prop_assert!((schur - brute).abs() <= 1e-10 * (1.0 + q3_of_embedding(&l, &g)));
    }

    #[test]
    fn reduction_never_exceeds_plain_embedding(l in spd6(), g in mat2()) {
        let q3 = l.quadratic(&embed(&g));
        prop_assert!(q2(&reduce(&l).unwrap(), &g) <= q3 * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn isotropic_reduction_has_closed_form(mu in 0.01..100.0f64, lambda in 0.0..100.0f64) {
        let l2 = reduce(&ElasticTensor3::isotropic(mu, lambda)).unwrap();
        let expect = ReducedTensor2::isotropic(mu, 2.0 * mu * lambda / (lambda + 2.0 * mu));
        prop_assert!((l2.0 - expect.0).abs().max() <= 1e-12 * (1.0 + mu + lambda));
    }

    #[test]
    fn reduction_is_monotone_in_the_tensor(l in spd6(), extra in psd6(), g in mat2()) {
        let bigger = ElasticTensor3(l.0 + extra);
        let (hi, lo) = (q2(&reduce(&bigger).unwrap(), &g), q2(&reduce(&l).unwrap(), &g));
        prop_assert!(hi >= lo - 1e-10 * (1.0 + hi.abs()));
    }

    #[test]
    fn fitted_slope_recovers_power_laws(c in 1e-3..1e3f64, p in 0.5..8.0f64) {
        let pts: Vec<(f64, f64)> = [0.2f64, 0.1, 0.05].iter().map(|h| (*h, c * h.powf(p))).collect();
        prop_assert!((fit_slope(&pts).unwrap().slope - p).abs() < 1e-9);
    }

    #[test]
    fn material_configs_round_trip(mu in 0.01..10.0f64, lambda in 0.0..10.0f64, n in 8usize..40) {
        let text = format!(
            r#"{{"material": {{"model": "svk", "mu": {mu}, "lambda": {lambda}}},
                "bc": "clamped", "grid2": {{"half_width": 1.5, "n1": {n}, "n2": 9}}, "time": {{"T": 2.0}}}}"#
        );
        let cfg = parse_config(&text).unwrap();
        let canonical = cfg.to_canonical_json().unwrap();
        let again = parse_config(&canonical).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_canonical_json().unwrap(), canonical);
    }
}

fn perturbed_slab(seed: &[f64], amp: f64) -> SlabState {
    let grid = Grid3::new(1.0, 8, 8, 3).unwrap();
    let mut s = SlabState::reference(grid, 0.25, 3.0).unwrap();
    for (n, d) in s.d.iter_mut().enumerate() {
        let x = n as f64;
        *d = Vec3::new((seed[0] * x).sin(), (seed[1] * x).cos(), (seed[2] * x).sin()) * amp;
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn slab_forces_rotate_and_balance(
        seed in prop::array::uniform3(0.1..3.0f64),
        amp in 0.001..0.05f64,
        r in rotation(),
        m in model(),
    ) {
        let s = perturbed_slab(&seed, amp);
        let mut rs = s.clone();
        rs.base = r * s.base;
        rs.d.iter_mut().for_each(|d| *d = r * *d);
        let n = s.grid.len();
        let (mut f, mut rf) = (vec![Vec3::zeros(); n], vec![Vec3::zeros(); n]);
        internal_force(&s, &m, &mut f).unwrap();
        internal_force(&rs, &m, &mut rf).unwrap();
        let total: Vec3 = f.iter().sum();
        let scale = f.iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!(total.norm() <= 1e-12 * scale * n as f64);
        for (a, b) in f.iter().zip(&rf) {
            prop_assert!((r * a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn clamped_plate_keeps_boundary_values(amp in 0.01..0.8f64, force in -5.0..5.0f64) {
        let grid = Grid2::clamped(1.0, 10, 10).unwrap();
        let solver = PlateSolver::new(grid, ReducedTensor2::isotropic(1.0, 0.5), Regime::VonKarman);
        let v0 = FieldExpr::Bump { amplitude: amp }.sample(&grid).unwrap();
        let mut s = solver.initial_state(&v0, &vec![0.0; grid.len()]).unwrap();
        let g = Forcing2::Constant { value: force };
        for _ in 0..20 {
            solver.step(&mut s, &g, 5e-3).unwrap();
            for j in 0..grid.n2 {
                for i in 0..grid.n1 {
                    if grid.is_boundary(i, j) {
                        let q = grid.index(i, j);
                        prop_assert!(s.v[q] == 0.0 && s.p[q] == 0.0 && s.u1[q] == 0.0 && s.u2[q] == 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn periodic_membrane_solution_is_gauge_fixed(shift in -3.0..3.0f64, amp in 0.05..1.0f64) {
        let grid = Grid2::periodic(PI, 12, 12).unwrap();
        let solver = MembraneSolver::new(grid, ReducedTensor2::isotropic(1.0, 0.5));
        let v = FieldExpr::cos_product(amp, 1.0, 2.0).sample(&grid).unwrap();
        let (mut a1, mut a2) = (vec![0.0; grid.len()], vec![0.0; grid.len()]);
        let (mut b1, mut b2) = (vec![shift; grid.len()], vec![-shift; grid.len()]);
        solver.solve(&v, &mut a1, &mut a2).unwrap();
        solver.solve(&v, &mut b1, &mut b2).unwrap();
        let mean = |f: &[f64]| f.iter().sum::<f64>() / f.len() as f64;
        prop_assert!(mean(&b1).abs() < 1e-12 && mean(&b2).abs() < 1e-12);
        for (x, y) in a1.iter().chain(&a2).zip(b1.iter().chain(&b2)) {
            prop_assert!((x - y).abs() < 1e-9, "{} {}", x, y);
        }
    }
}
