use ere_stability::numerics::{
    diamond, j4, phi_embed, psi_embed, reflection_2t, rotation, symplectic_defect, Mat2, C64,
};
use ere_stability::reduction::reduce;
use ere_stability::systems::{monodromy, EssentialSystem};
use proptest::prelude::*;

fn close(a: &Mat2, b: &Mat2) -> bool {
    (a - b).amax() <= 1e-12 * (1.0 + a.amax())
}

fn complex() -> impl Strategy<Value = C64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y)| C64::new(x, y))
}

/// Equilateral triangle of equal masses around a central mass, which is a
/// central configuration for every choice of masses.
fn centred_triangle(m0: f64, m: f64, scale: f64, angle: f64, shift: C64) -> ([f64; 4], [C64; 4]) {
    let mut z = [shift; 4];
    for (k, zk) in z.iter_mut().enumerate().skip(1) {
        let a = angle + 2.0 * std::f64::consts::PI * (k - 1) as f64 / 3.0;
        *zk = shift + C64::from_polar(scale, a);
    }
    ([m0, m, m, m], z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embeddings_compose_like_complex_multiplication(z in complex(), w in complex()) {
        prop_assert!(close(&(phi_embed(z) * phi_embed(w)), &phi_embed(z * w)));
        prop_assert!(close(&(psi_embed(z) * psi_embed(w)), &phi_embed(z * w.conj())));
        prop_assert!(close(&(phi_embed(z) * psi_embed(w)), &psi_embed(z * w)));
        prop_assert!(close(&(psi_embed(z) * phi_embed(w)), &psi_embed(z * w.conj())));
    }

    #[test]
    fn rotations_and_reflections_are_unit_embeddings(t in -7.0f64..7.0) {
        prop_assert!(close(&rotation(t), &phi_embed(C64::from_polar(1.0, t))));
        prop_assert!(close(&reflection_2t(t), &psi_embed(C64::from_polar(1.0, 2.0 * t))));
        prop_assert!(close(&(reflection_2t(t) * reflection_2t(t)), &Mat2::identity()));
    }

    #[test]
    fn diamond_of_unimodular_blocks_is_symplectic(a in -2.0f64..2.0, b in 0.3f64..2.0, c in -2.0f64..2.0, t in -3.0f64..3.0) {
        let upper = Mat2::new(b, a, 0.0, 1.0 / b);
        let lower = Mat2::new(1.0, 0.0, c, 1.0) * rotation(t);
        let d = diamond(&upper, &lower);
        prop_assert!(symplectic_defect(&d) < 1e-12);
        prop_assert!((d.transpose() * j4() * d - j4()).amax() < 1e-12);
    }

    #[test]
    fn monodromies_are_symplectic_relative_to_their_size(l3 in -1.0f64..8.0, l4 in -3.0f64..4.0, e in 0.0f64..0.8) {
        let sys = EssentialSystem::custom(l3, l4, e).unwrap();
        let m = monodromy(&sys).unwrap().gamma2pi.m;
        let scale = m.norm_squared().max(1.0);
        prop_assert!(symplectic_defect(&m) / scale < 1e-11, "{}", symplectic_defect(&m));
        prop_assert!((m.determinant() - 1.0).abs() < 1e-8 * scale * scale);
    }

    #[test]
    fn reduction_is_invariant_under_similarities(
        m0 in 0.1f64..3.0,
        m in 0.1f64..3.0,
        scale in 0.2f64..5.0,
        angle in -3.0f64..3.0,
        shift in complex(),
    ) {
        let (masses, z) = centred_triangle(m0, m, 1.0, 0.0, C64::new(0.0, 0.0));
        let (cc_ref, p_ref) = reduce(masses, z).unwrap();
        let (masses, z) = centred_triangle(m0, m, scale, angle, shift);
        let (cc, p) = reduce(masses, z).unwrap();
        prop_assert!(cc_ref.unitarity_defect() < 1e-10);
        prop_assert!(cc.unitarity_defect() < 1e-10);
        prop_assert!(p.beta1.abs() < 1e-15);
        prop_assert!((p.beta2 - p_ref.beta2).abs() < 1e-9);
        for (x, y) in [(p.beta11, p_ref.beta11), (p.beta12, p_ref.beta12), (p.beta22, p_ref.beta22)] {
            prop_assert!((x.norm() - y.norm()).abs() < 1e-9, "{x} vs {y}");
        }
    }
}
