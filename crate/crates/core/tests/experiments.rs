use spectral_adapt::experiments::{
    convergence_sweep, parse_mode, run_experiment, whole_line_error, Experiment, ExperimentSpec,
    StrategyKind, OSCILLATE_INTERIOR_DEGREE,
};
use spectral_adapt::solvers::references::fermi_dirac_diffusive;
use spectral_adapt::{Expansion, Mode, SpectralError};

fn defaults(e: Experiment) -> ExperimentSpec {
    ExperimentSpec::defaults(e)
}

#[test]
fn defaults_match_the_worked_examples() {
    // (experiment, mode, N, β, Δt, T, μ, δ, d_max)
    let table = [
        (
            Experiment::FdDiffuse,
            Mode::ScaleOnly,
            40,
            2.5,
            0.01,
            10.0,
            1.005,
            0.004,
            0.04,
        ),
        (
            Experiment::FdMove,
            Mode::MoveOnly,
            40,
            2.5,
            0.001,
            10.0,
            1.005,
            0.004,
            0.04,
        ),
        (
            Experiment::Oscillate,
            Mode::MoveOnly,
            30,
            5.0,
            0.0008,
            10.0,
            1.001,
            0.008,
            0.08,
        ),
        (
            Experiment::TwoDim,
            Mode::MoveScale,
            40,
            2.5,
            0.01,
            4.0,
            1.003,
            0.005,
            0.1,
        ),
        (
            Experiment::Transport,
            Mode::MoveScale,
            40,
            2.5,
            0.001,
            5.0,
            1.004,
            0.02,
            0.2,
        ),
        (
            Experiment::Parabolic,
            Mode::ScaleOnly,
            20,
            0.85,
            1.0 / 4000.0,
            1.0,
            1.005,
            0.004,
            0.04,
        ),
        (
            Experiment::Cellpop,
            Mode::ScaleOnly,
            20,
            0.9,
            0.002,
            10.0,
            1.005,
            0.004,
            0.04,
        ),
    ];
    assert_eq!(table.len(), Experiment::ALL.len());
    for (e, mode, n, beta, dt, t_end, mu, delta, d_max) in table {
        let s = defaults(e);
        assert_eq!((s.experiment, s.mode, s.n), (e, mode, n), "{}", e.name());
        assert_eq!((s.beta, s.dt, s.t_end), (beta, dt, t_end), "{}", e.name());
        assert_eq!((s.mu, s.delta, s.d_max), (mu, delta, d_max), "{}", e.name());
        assert_eq!((s.q, s.nu), (0.95, 1.0 / 0.95), "{}", e.name());
        assert_eq!(s.strategy, StrategyKind::FrequencyDependent);
        assert!(s.validate().is_ok());
        assert_eq!(Experiment::from_name(e.name()).unwrap(), e);
    }
}

#[test]
fn names_round_trip_and_unknowns_are_rejected() {
    for m in ["none", "scale", "move", "move-scale"] {
        assert_eq!(
            spectral_adapt::experiments::mode_name(parse_mode(m).unwrap()),
            m
        );
    }
    for k in [
        StrategyKind::Fixed,
        StrategyKind::TimeDependent,
        StrategyKind::FrequencyDependent,
    ] {
        assert_eq!(StrategyKind::from_name(k.name()).unwrap(), k);
    }
    assert!(parse_mode("sideways").is_err());
    assert!(Experiment::from_name("fd").is_err());
    assert!(StrategyKind::from_name("adaptive").is_err());
}

#[test]
fn invalid_overrides_are_rejected() {
    let base = defaults(Experiment::FdDiffuse);
    for s in [
        ExperimentSpec { n: 1, ..base },
        ExperimentSpec { beta: -1.0, ..base },
        ExperimentSpec { dt: 0.0, ..base },
        ExperimentSpec {
            t_end: f64::NAN,
            ..base
        },
        ExperimentSpec { q: 1.2, ..base },
        ExperimentSpec {
            delta: 0.1,
            d_max: 0.05,
            ..base
        },
    ] {
        assert!(matches!(
            run_experiment(&s, &[]),
            Err(SpectralError::InvalidParameter(_))
        ));
    }
}

#[test]
fn diffusive_run_meets_its_targets() {
    let o = run_experiment(&defaults(Experiment::FdDiffuse), &[]).unwrap();
    assert!(o.final_error.unwrap() < 1e-9);
    let worst = o
        .history
        .column("error")
        .unwrap()
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst:e}");
    let q2 = 0.95f64.powi(2);
    assert!(
        o.final_beta >= 0.3945 * q2 && o.final_beta <= 0.3945 / q2,
        "{}",
        o.final_beta
    );
    assert_eq!(o.history.rows.len(), 1001);
}

#[test]
fn diffusive_sweep_converges() {
    let c = convergence_sweep(&defaults(Experiment::FdDiffuse), &[25, 30, 35, 40, 45]).unwrap();
    assert!(c
        .rows
        .windows(2)
        .all(|w| w[1].error_final < w[0].error_final));
    let q2 = 0.95f64.powi(2);
    let b25 = c.rows[0].beta_final;
    assert!(b25 >= 0.3213 * q2 && b25 <= 0.3213 / q2, "{b25}");
    // orders follow from the table
    let orders = c.orders();
    assert_eq!(orders.len(), 4);
    for (p, w) in orders.iter().zip(c.rows.windows(2)) {
        let want =
            (w[0].error_final / w[1].error_final).ln() / (w[1].n as f64 / w[0].n as f64).ln();
        assert_eq!(*p, want);
        assert!(*p > 0.0);
    }
    assert!(c
        .table()
        .to_csv()
        .starts_with("N,error_final,F_final,beta_final\n"));
    assert_eq!(c.orders_table().rows.len(), 4);
    // each sweep entry is the plain run at that N
    let single = run_experiment(
        &ExperimentSpec {
            n: 35,
            ..defaults(Experiment::FdDiffuse)
        },
        &[],
    )
    .unwrap();
    assert_eq!(single.history.to_csv(), c.outcomes[2].history.to_csv());
}

#[test]
fn sweep_needs_two_orders() {
    assert!(convergence_sweep(&defaults(Experiment::FdDiffuse), &[40]).is_err());
}

#[test]
fn unmoved_translation_converges_far_slower_than_moved() {
    let ns = [25, 45];
    let none = convergence_sweep(
        &ExperimentSpec {
            mode: Mode::None,
            ..defaults(Experiment::FdMove)
        },
        &ns,
    )
    .unwrap();
    let moved = convergence_sweep(&defaults(Experiment::FdMove), &ns).unwrap();
    let gain = |c: &spectral_adapt::experiments::Convergence| {
        c.rows[0].error_final / c.rows[1].error_final
    };
    assert!(none.rows.iter().all(|r| r.error_final >= 1e-3));
    assert!(
        gain(&moved) >= 100.0 * gain(&none),
        "{} vs {}",
        gain(&moved),
        gain(&none)
    );
}

#[test]
fn moving_run_follows_the_front() {
    let o = run_experiment(&defaults(Experiment::FdMove), &[]).unwrap();
    let worst = o
        .history
        .column("error")
        .unwrap()
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    assert!(worst <= 1e-10, "{worst:e}");
    let x_l = o.summary_value("x_L").unwrap();
    assert!((49.0..=51.0).contains(&x_l), "{x_l}");
    let scaled = run_experiment(
        &ExperimentSpec {
            mode: Mode::ScaleOnly,
            ..defaults(Experiment::FdMove)
        },
        &[],
    )
    .unwrap();
    let none = run_experiment(
        &ExperimentSpec {
            mode: Mode::None,
            ..defaults(Experiment::FdMove)
        },
        &[],
    )
    .unwrap();
    assert!(scaled.final_error.unwrap() > none.final_error.unwrap());
}

#[test]
fn oscillating_front_is_split_cleanly() {
    let times = [2.5, 5.0, 7.5, 10.0];
    let o = run_experiment(&defaults(Experiment::Oscillate), &times).unwrap();
    let worst = o
        .history
        .column("error")
        .unwrap()
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst:e}");
    assert!(o.summary_value("max_front_lag").unwrap() <= 0.5);
    assert_eq!(o.snapshots.len(), 4);
    for ((t, text), want) in o.snapshots.iter().zip(times) {
        assert_eq!(*t, want);
        let e = Expansion::from_text(text).unwrap();
        let whole = whole_line_error(&e, OSCILLATE_INTERIOR_DEGREE, *t).unwrap();
        assert!(whole <= 1e-4, "t = {t}: {whole:e}");
    }
    // the whole-line column is filled on the last row only
    let col = o.history.column("whole_error").unwrap();
    assert!(col[..col.len() - 1].iter().all(Option::is_none));
    assert_eq!(
        col.last().unwrap().unwrap(),
        o.summary_value("whole_error").unwrap()
    );
    let (l2, max) = (
        o.summary_value("unsplit_error").unwrap(),
        o.summary_value("unsplit_max_error").unwrap(),
    );
    assert!(l2 > 0.0 && max >= l2);
}

#[test]
fn snapshots_round_trip_the_state() {
    let o = run_experiment(&defaults(Experiment::FdDiffuse), &[0.0, 5.0, 10.0]).unwrap();
    let ts: Vec<f64> = o.snapshots.iter().map(|(t, _)| *t).collect();
    assert_eq!(ts, vec![0.0, 5.0, 10.0]);
    let (t, text) = &o.snapshots[1];
    let e = Expansion::from_text(text).unwrap();
    assert!(e.relative_error(|x| fermi_dirac_diffusive(x, *t)).unwrap() < 1e-9);
    let row = o.history.rows.iter().find(|r| r[0] == Some(5.0)).unwrap();
    assert_eq!(Some(e.basis.beta), row[2]);
    let o2 = run_experiment(&defaults(Experiment::TwoDim), &[1.0]).unwrap();
    assert_eq!(o2.snapshots.len(), 1);
    assert!(spectral_adapt::Expansion2D::from_text(&o2.snapshots[0].1).is_ok());
}

#[test]
fn snapshots_outside_the_run_or_for_pde_solvers_are_rejected() {
    assert!(run_experiment(&defaults(Experiment::FdDiffuse), &[11.0]).is_err());
    assert!(run_experiment(&defaults(Experiment::FdDiffuse), &[-1.0]).is_err());
    for e in [
        Experiment::Transport,
        Experiment::Parabolic,
        Experiment::Cellpop,
    ] {
        let s = ExperimentSpec {
            t_end: 0.01,
            ..defaults(e)
        };
        assert!(
            matches!(
                run_experiment(&s, &[0.0]),
                Err(SpectralError::InvalidParameter(_))
            ),
            "{}",
            e.name()
        );
    }
}

#[test]
fn two_dim_combined_beats_either_mechanism() {
    let both = run_experiment(&defaults(Experiment::TwoDim), &[]).unwrap();
    let worst = both
        .history
        .column("error")
        .unwrap()
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst:e}");
    let fin = both.final_error.unwrap();
    for mode in [Mode::MoveOnly, Mode::ScaleOnly] {
        let e = run_experiment(
            &ExperimentSpec {
                mode,
                ..defaults(Experiment::TwoDim)
            },
            &[],
        )
        .unwrap();
        assert!(e.final_error.unwrap() >= 100.0 * fin, "{mode:?}");
    }
}

#[test]
fn transport_experiment_reports_its_diagnostics() {
    let o = run_experiment(&defaults(Experiment::Transport), &[]).unwrap();
    assert!(o.summary_value("max_whole_error").unwrap() <= 5e-4);
    assert!(o.summary_value("max_freq").unwrap() <= 1e-8);
    for key in ["moves", "rescales", "x_L", "exterior_error"] {
        assert!(o.summary_value(key).unwrap() > 0.0, "{key}");
    }
}

#[test]
fn parabolic_time_dependent_beta_is_closed_form() {
    let s = ExperimentSpec {
        strategy: StrategyKind::TimeDependent,
        dt: 0.004,
        ..defaults(Experiment::Parabolic)
    };
    let o = run_experiment(&s, &[]).unwrap();
    assert!(
        (o.final_beta - 0.5f64.powf(1.5)).abs() <= 1e-5,
        "{}",
        o.final_beta
    );
}

#[test]
fn cell_population_run_meets_its_targets() {
    let o = run_experiment(&defaults(Experiment::Cellpop), &[]).unwrap();
    let mean = o.summary_value("mean_size").unwrap();
    assert!((14.9..=15.1).contains(&mean), "{mean}");
    assert!(o.final_error.unwrap() <= 1e-4);
    assert_eq!(o.summary_value("rescales_a"), Some(0.0));
    assert!(o.summary_value("rescales_x").unwrap() > 0.0);
    let unscaled = run_experiment(
        &ExperimentSpec {
            mode: Mode::None,
            ..defaults(Experiment::Cellpop)
        },
        &[],
    )
    .unwrap();
    assert!(unscaled.final_error.unwrap() >= 1e-3);
}

#[test]
fn identical_specs_give_identical_bytes() {
    for e in [Experiment::FdMove, Experiment::Parabolic] {
        let s = ExperimentSpec {
            t_end: 0.5,
            ..defaults(e)
        };
        let a = run_experiment(&s, &[]).unwrap().history.to_csv();
        let b = run_experiment(&s, &[]).unwrap().history.to_csv();
        assert_eq!(a, b);
    }
}
