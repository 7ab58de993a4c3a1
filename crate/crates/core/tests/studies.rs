use std::sync::Arc;

use kdv_core::harness::{
    compare_schemes, convergence_study, dyadic_taus, rough_data, DataDescriptor, DirectReference, RoughDataSpec,
    Study,
};
use kdv_core::oracles::twisted_rk4;
use kdv_core::schemes::{evolve_with, smooth_profile};
use kdv_core::{evolve, Dealias, Field, Scheme, SchemeConfig, SobolevIndex, SpectralGrid};

fn smooth_study(grid: &Arc<SpectralGrid>, taus: Vec<f64>) -> Study {
    Study {
        u0: smooth_profile(grid),
        data: DataDescriptor::Named("smooth".into()),
        gamma: SobolevIndex::L2,
        t_final: 1.0,
        taus,
        tau_ref: 2f64.powi(-13),
        dealias: Dealias::Off,
    }
}

#[test]
fn nonzero_mean_evolution_matches_direct_integration() {
    let grid = SpectralGrid::new(32).unwrap();
    let u0 = smooth_profile(&grid).add_constant(0.7);
    let cfg = SchemeConfig::new(Scheme::Lri2, 1e-3).unwrap();
    let lri2 = evolve(&u0, 1.0, &cfg).unwrap().u;

    // RK4 on the twisted form of the unreduced equation, then undo the twist
    let v = twisted_rk4(&u0, 0.0, 1.0, 20_000);
    let direct = v.free_flow(1.0);

    let err = lri2.sub(&direct).unwrap().sobolev_norm(SobolevIndex::L2);
    assert!(err < 1e-5, "{err:e}");
    assert!((lri2.mean() - 0.7).abs() < 1e-14);
}

#[test]
fn lri2_beats_lri1_by_one_order_on_smooth_data() {
    let grid = SpectralGrid::new(64).unwrap();
    let study = smooth_study(&grid, dyadic_taus(6, 9));
    let reports = compare_schemes(&[Scheme::Lri2, Scheme::Lri1], &study, &DirectReference).unwrap();
    let (lri2, lri1) = (&reports[0], &reports[1]);
    for (a, b) in lri2.rel_errors.iter().zip(&lri1.rel_errors) {
        assert!(a < b);
    }
    let gap = lri2.mean_order() - lri1.mean_order();
    assert!((gap - 1.0).abs() < 0.25, "{gap}");
    assert!((lri1.mean_order() - 1.0).abs() < 0.15);
}

#[test]
fn smooth_errors_decrease_monotonically() {
    let grid = SpectralGrid::new(64).unwrap();
    let study = smooth_study(&grid, dyadic_taus(4, 9));
    for scheme in Scheme::ALL {
        let report = convergence_study(scheme, &study, &DirectReference).unwrap();
        for w in report.rel_errors.windows(2) {
            assert!(w[1] < w[0] || w[1] < 1e-11, "{scheme}: {:?}", report.rel_errors);
        }
    }
}

#[test]
fn studies_are_bit_reproducible() {
    let spec = RoughDataSpec::new(128, 3.0, 9).unwrap();
    let study = Study {
        u0: rough_data(&spec).unwrap(),
        data: DataDescriptor::Rough(spec),
        gamma: SobolevIndex::new(1.0).unwrap(),
        t_final: 0.5,
        taus: dyadic_taus(3, 6),
        tau_ref: 2f64.powi(-10),
        dealias: Dealias::ThreeHalves,
    };
    let a = convergence_study(Scheme::Lri2, &study, &DirectReference).unwrap();
    let b = convergence_study(Scheme::Lri2, &study, &DirectReference).unwrap();
    assert_eq!(a.rel_errors, b.rel_errors);
    assert_eq!(a.observed_orders, b.observed_orders);
}

#[test]
fn mass_is_conserved_by_every_scheme() {
    let u0 = rough_data(&RoughDataSpec::new(128, 5.0, 4).unwrap()).unwrap().add_constant(-0.4);
    let initial = u0.mass();
    let reduced = u0.without_mean().mass();
    for scheme in Scheme::ALL {
        let cfg = SchemeConfig::new(scheme, 2f64.powi(-8)).unwrap();
        let mut drift = 0.0f64;
        let state = evolve_with(&u0, 1.0, &cfg, |_, _, u: &Field| {
            drift = drift.max((u.mass() - reduced).abs());
        })
        .unwrap();
        drift = drift.max((state.u.mass() - initial).abs());
        assert!(drift <= 1e-11 * (1.0 + initial.abs()), "{scheme}: {drift:e}");
    }
}

#[test]
fn strang_order_is_unstable_on_theta_four_data() {
    let spec = RoughDataSpec::new(1024, 4.0, 1).unwrap();
    let study = Study {
        u0: rough_data(&spec).unwrap(),
        data: DataDescriptor::Rough(spec),
        gamma: SobolevIndex::L2,
        t_final: 1.0,
        taus: dyadic_taus(4, 9),
        tau_ref: 2f64.powi(-13),
        dealias: Dealias::Off,
    };
    let report = convergence_study(Scheme::Strang, &study, &DirectReference).unwrap();
    assert!(report.order_spread() > 0.3, "{:?}", report.observed_orders);
}
