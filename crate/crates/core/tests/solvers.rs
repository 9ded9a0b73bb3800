use spectral_adapt::solvers::chebyshev::gauss_legendre;
use spectral_adapt::solvers::references::transport_exact;
use spectral_adapt::solvers::transport::{inflow, Interior};
use spectral_adapt::solvers::*;
use spectral_adapt::{AdaptConfig, Expansion, Mode, ScaledBasis};

use proptest::prelude::*;

fn order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}

// ---------- parabolic ----------

#[test]
fn stiffness_matches_quadrature_of_derivatives() {
    let (n, beta) = (8, 1.3);
    let s = assemble_stiffness(n, beta).unwrap();
    let basis = ScaledBasis::hermite(beta, n).unwrap();
    let derivs: Vec<Expansion> = (0..=n)
        .map(|l| {
            let mut c = vec![0.0; n + 1];
            c[l] = 1.0;
            Expansion::new(basis, c).unwrap().derivative().unwrap()
        })
        .collect();
    for i in 0..=n {
        for j in 0..=n {
            let q = gauss_legendre(
                |x| derivs[i].evaluate(x).unwrap() * derivs[j].evaluate(x).unwrap(),
                -12.0,
                12.0,
                200,
            );
            assert!(
                (s[i * (n + 1) + j] - q).abs() < 1e-10,
                "S[{i},{j}] = {} vs {q}",
                s[i * (n + 1) + j]
            );
        }
    }
}

#[test]
fn stiffness_is_symmetric_pentadiagonal() {
    let n = 12;
    let s = assemble_stiffness(n, 0.7).unwrap();
    for i in 0..=n {
        for j in 0..=n {
            let v = s[i * (n + 1) + j];
            assert_eq!(v, s[j * (n + 1) + i]);
            if i.abs_diff(j) != 0 && i.abs_diff(j) != 2 {
                assert!(v.abs() < 1e-14, "S[{i},{j}] = {v}");
            }
        }
    }
}

#[test]
fn stiffness_spectrum_bounded_by_beta_squared() {
    // Gershgorin for the Hermite-function derivative gives λ_max ≤ β²(2N+2)
    let (n, beta) = (20, 0.85);
    let s = assemble_stiffness(n, beta).unwrap();
    let size = n + 1;
    let mut v = vec![1.0; size];
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w: Vec<f64> = (0..size)
            .map(|i| (0..size).map(|j| s[i * size + j] * v[j]).sum())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        lambda = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    assert!(
        lambda > 0.0 && lambda <= beta * beta * (2.0 * n as f64 + 2.0),
        "{lambda}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn stiffness_is_positive_definite(u in proptest::collection::vec(-1.0f64..1.0, 16), beta in 0.2f64..3.0) {
        let n = 15;
        let s = assemble_stiffness(n, beta).unwrap();
        let norm2: f64 = u.iter().map(|x| x * x).sum();
        prop_assume!(norm2 > 1e-6);
        let q: f64 = (0..=n).map(|i| u[i] * (0..=n).map(|j| s[i * (n + 1) + j] * u[j]).sum::<f64>()).sum();
        prop_assert!(q > 1e-14 * norm2, "uᵀSu = {}", q);
    }
}

fn parabolic(n: usize, dt: f64, strategy: ScalingStrategy) -> ParabolicRun {
    solve_parabolic(&ParabolicConfig {
        n,
        dt,
        t_end: 1.0,
        strategy,
    })
    .unwrap()
}

fn frequency(beta0: f64) -> ScalingStrategy {
    ScalingStrategy::FrequencyDependent {
        beta0,
        adapt: AdaptConfig::default(),
    }
}

#[test]
fn crank_nicolson_is_second_order_in_time() {
    let errs: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&dt| parabolic(25, dt, frequency(0.85)).last().e_n)
        .collect();
    for w in errs.windows(2) {
        let p = order(w[0], w[1], 10.0);
        assert!((p - 2.0).abs() <= 0.1, "order {p} from {errs:?}");
    }
}

#[test]
fn time_dependent_beta_follows_closed_form() {
    let run = parabolic(
        20,
        1.0 / 4000.0,
        ScalingStrategy::TimeDependent {
            delta0: 1.0,
            delta: 1.0,
        },
    );
    assert!((run.history[0].beta - 0.5).abs() < 1e-15);
    assert!((run.last().beta - 0.35355).abs() < 1e-5);
}

#[test]
fn strategies_are_ordered_frequency_time_fixed() {
    let dt = 1.0 / 4000.0;
    let fd = parabolic(20, dt, frequency(0.85)).last().e_n;
    let td = parabolic(
        20,
        dt,
        ScalingStrategy::TimeDependent {
            delta0: 1.0,
            delta: 1.0,
        },
    )
    .last()
    .e_n;
    let fixed = parabolic(20, dt, ScalingStrategy::Fixed(0.85)).last().e_n;
    assert!(fd <= 1e-8, "{fd}");
    assert!(fd < td && td < fixed, "{fd} {td} {fixed}");
}

#[test]
fn frequency_scaling_tracks_spreading() {
    let run = parabolic(20, 1.0 / 4000.0, frequency(0.85));
    let q: f64 = 0.95;
    let beta = run.last().beta;
    assert!(beta >= 0.5357 * q * q && beta <= 0.5357 / (q * q), "{beta}");
    assert!(run.rescales > 0);
}

#[test]
fn invalid_strategy_is_rejected() {
    let cfg = ParabolicConfig {
        n: 10,
        dt: 0.01,
        t_end: 0.1,
        strategy: ScalingStrategy::TimeDependent {
            delta0: 0.0,
            delta: 1.0,
        },
    };
    assert!(solve_parabolic(&cfg).is_err());
}

// ---------- transport ----------

fn uniform_interior(h: f64, len: f64) -> Interior {
    let cells = (len / h).round() as usize;
    let mesh: Vec<f64> = (0..=cells).map(|j| j as f64 * h).collect();
    let values = mesh.iter().map(|&x| transport_exact(x, 0.0)).collect();
    Interior {
        mesh,
        values,
        uniform: true,
    }
}

fn interior_error(h: f64, dt: f64, t_end: f64) -> (Interior, f64) {
    let mut interior = uniform_interior(h, 4.0);
    let steps = (t_end / dt).round() as usize;
    for k in 0..steps {
        interior.step(k as f64 * dt, dt, 10.0);
    }
    let err = interior
        .mesh
        .iter()
        .zip(&interior.values)
        .map(|(x, v)| (v - transport_exact(*x, t_end)).abs())
        .fold(0.0, f64::max);
    (interior, err)
}

#[test]
fn interior_scheme_is_first_order_in_space() {
    let errs: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| interior_error(h, 1e-4, 1.0).1)
        .collect();
    for w in errs.windows(2) {
        let p = order(w[0], w[1], 2.0);
        assert!((p - 1.0).abs() <= 0.3, "order {p} from {errs:?}");
    }
}

#[test]
fn interior_scheme_is_second_order_in_time() {
    // the spatial error is fixed by the mesh, so compare successive solutions
    let runs: Vec<Interior> = [0.004, 0.002, 0.001, 0.0005]
        .iter()
        .map(|&dt| interior_error(0.02, dt, 1.0).0)
        .collect();
    let diff = |a: &Interior, b: &Interior| {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let d: Vec<f64> = runs.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    for w in d.windows(2) {
        let p = order(w[0], w[1], 2.0);
        assert!((p - 2.0).abs() <= 0.3, "order {p} from {d:?}");
    }
}

#[test]
fn interior_holds_dirichlet_datum() {
    let mut interior = uniform_interior(0.02, 1.0);
    interior.step(0.0, 0.001, 0.9);
    assert_eq!(interior.values[0], inflow(0.001));
}

#[test]
fn transport_initial_interpolation_is_accurate() {
    let run = solve_transport(&TransportConfig {
        t_end: 0.001,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(run.history[0].t, 0.0);
    assert!(
        run.history[0].exterior_error < 1e-8,
        "{}",
        run.history[0].exterior_error
    );
}

#[test]
fn transport_moving_scaling_run() {
    let run = solve_transport(&TransportConfig::default()).unwrap();
    assert_eq!(run.history.len(), 5001);
    let max_f = run
        .history
        .iter()
        .filter_map(|h| h.freq)
        .fold(0.0, f64::max);
    assert!(max_f <= 1e-8, "{max_f}");
    // x_L only advances, the interior mesh ends there, and β only shrinks
    for w in run.history.windows(2) {
        assert!(w[1].x_l >= w[0].x_l);
        assert!(w[1].beta <= w[0].beta);
    }
    assert_eq!(run.interior.right_end(), run.exterior.basis.x_l);
    assert!(run.moves > 0 && run.rescales > 0);
    let worst = run
        .history
        .iter()
        .map(|h| h.whole_error)
        .fold(0.0, f64::max);
    assert!(worst <= 5e-4, "{worst}");
    let last = run.last();
    assert!(last.exterior_error < 1e-5, "{}", last.exterior_error);
    // the indicator settles into a band once the front starts moving
    for h in run.history.iter().filter(|h| h.t >= 0.5) {
        let e = h.ext.unwrap();
        assert!((0.1..=0.3).contains(&e), "E = {e} at t = {}", h.t);
    }
    assert!(last.x_l > 5.0, "{}", last.x_l);
}

#[test]
fn transport_without_adaptivity_degrades() {
    let cfg = TransportConfig {
        mode: Mode::None,
        t_end: 2.0,
        ..Default::default()
    };
    let fixed = solve_transport(&cfg).unwrap().last().whole_error;
    let adaptive = solve_transport(&TransportConfig {
        t_end: 2.0,
        ..Default::default()
    })
    .unwrap()
    .last()
    .whole_error;
    assert!(fixed > 10.0 * adaptive, "{fixed} vs {adaptive}");
}

#[test]
fn transport_inflow_coupling_is_stable() {
    let cfg = TransportConfig {
        coupling: Coupling::Inflow,
        ..Default::default()
    };
    let run = solve_transport(&cfg).unwrap();
    let worst = run
        .history
        .iter()
        .map(|h| h.whole_error)
        .fold(0.0, f64::max);
    assert!(worst <= 5e-4, "{worst}");
}

#[test]
fn transport_tables_have_one_row_per_record() {
    let run = solve_transport(&TransportConfig {
        t_end: 0.01,
        ..Default::default()
    })
    .unwrap();
    let csv = run.table().to_csv();
    assert!(csv.starts_with("t,error,beta,freq,ext,xL,whole_error\n"));
    assert_eq!(csv.lines().count(), run.history.len() + 1);
}

// ---------- cell population ----------

fn zero(_a: f64, _x: f64, _t: f64) -> f64 {
    0.0
}
fn zero_kernel(_a: f64, _y: f64, _x: f64, _t: f64) -> f64 {
    0.0
}
// a polynomial times the basis weights, vanishing to eighth order at both
// inflow edges so the advected profile stays smooth
fn vanishing_at_edges(a: f64, x: f64, _t: f64) -> f64 {
    (a * x / 4.0).powi(8) * (-0.5 * a - 0.45 * x).exp()
}

#[test]
fn cell_mass_conserved_under_pure_advection() {
    let cfg = CellModelConfig {
        sigma: zero,
        death: zero,
        division: zero_kernel,
        boundary: vanishing_at_edges,
        exact: None,
        scale_x: false,
        ..CellModelConfig::example()
    };
    let model = CellModel::new(cfg).unwrap();
    let mut n = model.sample(vanishing_at_edges, 0.0);
    let (m0, _) = model.moments(&n).unwrap();
    for k in 0..100 {
        n = model.step(&n, k as f64 * cfg.dt, cfg.dt).unwrap();
    }
    let (m1, _) = model.moments(&n).unwrap();
    assert!(((m1 - m0) / m0).abs() < 1e-6, "{m0} → {m1}");
}

#[test]
fn cell_model_short_run_tracks_exact_solution() {
    let cfg = CellModelConfig {
        t_end: 0.2,
        ..CellModelConfig::example()
    };
    let run = solve_cell_model(&cfg).unwrap();
    let last = run.last();
    assert!(last.error.unwrap() < 1e-4, "{:?}", last.error);
    // ⟨x⟩ = 5 + t for the exact density
    assert!((last.mean_size - 5.2).abs() < 1e-3, "{}", last.mean_size);
}
