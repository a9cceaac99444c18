//! Observable behavior along evolutions: decay laws, purity flow, and the
//! phase-space picture of Kerr-generated cat states.

use kerrsim::channel::{evolve_kerr_unitary, evolve_kraus, ChannelParams};
use kerrsim::fock::{make_state, StateSpec, Truncation};
use kerrsim::observables::{
    fidelity_pure, husimi_q, mean_photon_number, photon_distribution, purity, trace_distance,
    QGridBounds,
};
use kerrsim::solvers::{rk4_evolve, IntegratorConfig};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn trunc(n: usize) -> Truncation {
    Truncation::new(n).unwrap()
}

fn params(chi: f64, gamma: f64, t: f64) -> ChannelParams {
    ChannelParams::new(chi, gamma, t).unwrap()
}

#[test]
fn mean_photon_number_follows_exponential_decay() {
    // under pure damping <n>(t) = <n>(0) e^{-2γt}
    let rho = make_state(StateSpec::Coherent { alpha: C64::new(1.3, -0.2) }, trunc(20))
        .unwrap()
        .rho;
    let n0 = mean_photon_number(&rho);
    let gamma = 0.35;
    for t in [0.3, 1.0, 2.5] {
        let analytic = evolve_kraus(&rho, params(0.0, gamma, t));
        let integrated = rk4_evolve(
            &rho,
            params(0.0, gamma, t),
            IntegratorConfig::for_duration(t, 10_000),
        )
        .unwrap();
        let expect = n0 * (-2.0 * gamma * t).exp();
        assert!(
            (mean_photon_number(&analytic) - expect).abs() <= 1e-8,
            "analytic at t={t}"
        );
        assert!(
            (mean_photon_number(&integrated) - expect).abs() <= 1e-8,
            "rk4 at t={t}"
        );
    }
}

#[test]
fn photon_distribution_stays_normalized_along_evolution() {
    let rho = make_state(StateSpec::Coherent { alpha: C64::new(1.0, 0.8) }, trunc(16))
        .unwrap()
        .rho;
    for t in [0.2, 1.0, 4.0] {
        let out = evolve_kraus(&rho, params(0.4, 0.25, t));
        let dist = photon_distribution(&out);
        let sum: f64 = dist.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-10, "t={t}: sum {sum}");
        assert!(dist.iter().all(|&p| p >= -1e-12));
    }
}

#[test]
fn purity_is_constant_under_kerr_and_monotone_under_damping() {
    let rho = make_state(StateSpec::Coherent { alpha: C64::new(2.0, 0.0) }, trunc(24))
        .unwrap()
        .rho;
    let p0 = purity(&rho);
    for step in 1..=6 {
        let t = 0.4 * step as f64;
        let kerr_only = evolve_kerr_unitary(&rho, 0.8, t);
        assert!((purity(&kerr_only) - p0).abs() <= 1e-10, "kerr at t={t}");
    }
    let mut last = p0;
    for step in 1..=6 {
        let t = 0.4 * step as f64;
        let damped = evolve_kraus(&rho, params(0.0, 0.3, t));
        let current = purity(&damped);
        assert!(current <= last + 1e-10, "t={t}: purity rose {last} -> {current}");
        last = current;
    }
}

#[test]
fn vacuum_limit_reaches_unit_fidelity() {
    for spec in [
        StateSpec::Coherent { alpha: C64::new(1.0, 0.0) },
        StateSpec::Fock { n: 3 },
        StateSpec::Thermal { mean_occupation: 0.8 },
    ] {
        let rho = make_state(spec, trunc(16)).unwrap().rho;
        let out = evolve_kraus(&rho, params(0.3, 0.5, 20.0));
        let fid = fidelity_pure(&out, StateSpec::Fock { n: 0 }).unwrap();
        assert!(fid >= 1.0 - 1e-6, "{spec:?}: fidelity {fid}");
    }
}

#[test]
fn cross_solver_trace_distance_is_negligible() {
    let rho = make_state(StateSpec::Coherent { alpha: C64::new(1.5, 0.0) }, trunc(16))
        .unwrap()
        .rho;
    let p = params(0.3, 0.2, 2.0);
    let analytic = evolve_kraus(&rho, p);
    let integrated = rk4_evolve(&rho, p, IntegratorConfig::for_duration(2.0, 10_000)).unwrap();
    assert!(trace_distance(&analytic, &integrated).unwrap() <= 1e-6);
}

#[test]
fn quarter_period_kerr_turns_coherent_state_into_two_lobes() {
    // at χt = π/2 a coherent state becomes an equal superposition of |±α>;
    // the Husimi function then shows two antipodal lobes 2|α| apart
    let alpha = 2.0;
    let rho = make_state(StateSpec::Coherent { alpha: C64::new(alpha, 0.0) }, trunc(24))
        .unwrap()
        .rho;
    let evolved = evolve_kerr_unitary(&rho, 1.0, PI / 2.0);
    let res = 81usize;
    let grid = husimi_q(
        &evolved,
        QGridBounds {
            re_min: -4.0,
            re_max: 4.0,
            im_min: -4.0,
            im_max: 4.0,
            resolution: res,
        },
    )
    .unwrap();
    assert!(grid.values.iter().all(|&v| v >= -1e-12));

    // collect strict local maxima over the 8-neighborhood
    let mut maxima: Vec<(usize, usize, f64)> = Vec::new();
    for iy in 1..res - 1 {
        for ix in 1..res - 1 {
            let v = grid.value_at(ix, iy);
            let mut is_peak = true;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let w = grid.value_at((ix as i64 + dx) as usize, (iy as i64 + dy) as usize);
                    if w >= v {
                        is_peak = false;
                    }
                }
            }
            if is_peak {
                maxima.push((ix, iy, v));
            }
        }
    }
    maxima.sort_by(|a, b| b.2.total_cmp(&a.2));
    assert!(maxima.len() >= 2, "expected two lobes, found {maxima:?}");
    let a = grid.point_at(maxima[0].0, maxima[0].1);
    let b = grid.point_at(maxima[1].0, maxima[1].1);
    let separation = (a - b).norm();
    assert!(
        (separation - 2.0 * alpha).abs() <= 0.3,
        "lobes at {a} and {b}: separation {separation}"
    );
    // the two lobes sit antipodally around the origin
    assert!((a + b).norm() <= 0.3, "midpoint offset {}", (a + b).norm());
}
