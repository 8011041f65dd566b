use std::f64::consts::PI;

use ere_stability::curves::{circular_degenerate_point, convex_boundaries, find_degenerate};
use ere_stability::index::{
    circular_index, crossing_test_curve, index_via_splitting, kernel_fourier_solution, omega_index,
    quadratic_form,
};
use ere_stability::numerics::C64;
use ere_stability::quadrature::integrate;
use ere_stability::systems::{monodromy, EssentialSystem, Family};
use proptest::prelude::*;

fn plus_one() -> C64 {
    C64::new(1.0, 0.0)
}

fn minus_one() -> C64 {
    C64::new(-1.0, 0.0)
}

fn generic_omega() -> C64 {
    C64::from_polar(1.0, 1.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hill_index_matches_frequency_count_on_circular_orbits(
        p in -1.7f64..3.0,
        convex in any::<bool>(),
        which in 0usize..3,
    ) {
        let sys = if convex {
            Family::Convex.system(p.abs() * 2.0, 0.0).unwrap()
        } else {
            Family::NonConvex.system(p, 0.0).unwrap()
        };
        let omega = [plus_one(), minus_one(), generic_omega()][which];
        let (neg, zero) = circular_index(sys.lambda3, sys.lambda4, omega);
        prop_assume!(zero == 0);
        let hill = omega_index(&sys, omega).unwrap();
        prop_assert_eq!(hill.i_omega, neg);
        prop_assert_eq!(hill.nu_omega, 0);
    }

    #[test]
    fn splitting_numbers_reproduce_hill_indices(
        p in -1.0f64..3.0,
        e in 0.05f64..0.7,
        theta in 0.2f64..3.0,
    ) {
        let sys = Family::NonConvex.system(p, e).unwrap();
        let m = monodromy(&sys).unwrap();
        let i1 = omega_index(&sys, plus_one()).unwrap();
        prop_assume!(i1.stabilized && i1.nu_omega == 0);
        let omega = C64::from_polar(1.0, theta);
        let hill = omega_index(&sys, omega).unwrap();
        prop_assume!(hill.stabilized && hill.nu_omega == 0);
        // Points too close to a collision of multipliers have no splitting table.
        if let Ok(split) = index_via_splitting(&m.gamma2pi, i1.i_omega, &[omega]) {
            prop_assert_eq!(split[0], hill.i_omega as i64);
        }
    }
}

#[test]
fn nonconvex_indices_grow_with_the_parameter() {
    for omega in [plus_one(), minus_one()] {
        let mut last = 0;
        for k in 0..=24 {
            let p = -1.5 + 0.2 * k as f64 + 0.0137;
            let sys = Family::NonConvex.system(p, 0.3).unwrap();
            let idx = omega_index(&sys, omega).unwrap().i_omega;
            assert!(idx >= last, "ω={omega} β̃={p}: {idx} < {last}");
            last = idx;
        }
        assert!(last >= 3, "top index {last}");
    }
}

#[test]
fn convex_minus_one_index_falls_with_the_parameter() {
    let mut last = usize::MAX;
    let mut seen = Vec::new();
    for k in 0..=30 {
        let beta = 0.0123 + 0.02 * k as f64;
        let sys = Family::Convex.system(beta, 0.3).unwrap();
        let idx = omega_index(&sys, minus_one()).unwrap().i_omega;
        assert!(idx <= last, "β={beta}: {idx} > {last}");
        last = idx;
        seen.push(idx);
    }
    assert_eq!(seen.first(), Some(&2));
    assert_eq!(seen.last(), Some(&0));
}

#[test]
fn convex_generic_nullities_sum_to_two_before_hyperbolicity() {
    let e = 0.3;
    let b = convex_boundaries(&[e], false).unwrap();
    let beta_r = b.beta_r[0];
    let omega = generic_omega();
    let roots = find_degenerate(Family::Convex, omega, e, (1e-6, beta_r - 1e-6)).unwrap();
    let total: usize = roots.iter().map(|r| r.nu).sum();
    assert_eq!(total, 2, "roots {roots:?}");
    let below = omega_index(&Family::Convex.system(1e-3, e).unwrap(), omega).unwrap();
    let above = omega_index(&Family::Convex.system(beta_r - 1e-3, e).unwrap(), omega).unwrap();
    assert_eq!(below.i_omega - above.i_omega, 2);
}

#[test]
fn kernel_is_two_dimensional_on_the_double_one_curve() {
    let e = 0.3;
    let start = circular_degenerate_point(1.0);
    assert!((start - 1.0 / 3.0).abs() < 1e-15);
    let roots = find_degenerate(Family::NonConvex, plus_one(), e, (0.05, 1.0)).unwrap();
    let double = roots.iter().find(|r| r.nu == 2).expect("a point with ν₁ = 2");
    let sys = Family::NonConvex.system(double.beta, e).unwrap();
    let k = kernel_fourier_solution(sys.lambda3, sys.lambda4, e, 60).unwrap();
    assert!(k.gram_determinant > 1e-6, "Gram {}", k.gram_determinant);
    assert!(k.ode_residual.iter().all(|&r| r < 1e-8), "{:?}", k.ode_residual);
}

fn displayed_crossing_value(e: f64) -> f64 {
    let q = PI / 4.0;
    let tail = integrate(
        |t| {
            let u = (0.5 * t).cos() - q * t.sin();
            u * u / (1.0 + e * t.cos())
        },
        0.0,
        2.0 * PI,
        1e-12,
    )
    .value;
    -1.5 * PI + 4.5 * tail
}

#[test]
fn crossing_form_differs_from_displayed_value_by_kinetic_term() {
    let x = crossing_test_curve();
    let gap = 3.0 * PI - PI.powi(3) / 8.0;
    for e in [0.0, 0.2, 0.5, 0.9] {
        let full = quadratic_form(4.5, 0.0, e, &x);
        let shown = displayed_crossing_value(e);
        assert!((full - shown - gap).abs() < 1e-8, "e={e}: {full} − {shown}");
    }
}

#[test]
fn displayed_crossing_value_tends_to_its_limit() {
    let limit = -6.0 * PI + 9.0 * PI.powi(3) / 16.0;
    assert!((limit + 1.4085).abs() < 1e-4);
    let near = displayed_crossing_value(1.0 - 1e-8);
    assert!((near - limit).abs() < 1e-3, "{near} vs {limit}");
}

#[test]
fn minus_one_index_at_zero_parameter_steps_between_eccentricities() {
    let at = |e: f64| {
        let sys = EssentialSystem::nonconvex_tilde(0.0, e).unwrap();
        omega_index(&sys, minus_one()).unwrap()
    };
    let low = at(0.3);
    let high = at(0.45);
    assert!(low.stabilized && high.stabilized);
    assert_eq!(low.i_omega, 0);
    assert_eq!(high.i_omega, 1);
}
