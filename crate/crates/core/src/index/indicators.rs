//! Half-period indicators for ±1 degeneracy.
//!
//! The potential V(t) = −I + R K Rᵀ satisfies V(−t) = P V(t) P with
//! P = diag(1, −1), so solutions of z'' = V z split into an even class
//! (x even, y odd) and an odd class (x odd, y even). A symmetric solution is
//! ±1-periodic exactly when it satisfies two boundary conditions at t = π.
//! Each class therefore contributes a 2×2 determinant built from the
//! fundamental matrix Φ(π) of the state (x, y, x', y'); these determinants
//! change sign at simple degeneracies, and a double root of D_{±1} at e = 0
//! splits into one simple root per class.

use serde::{Deserialize, Serialize};

use crate::numerics::Mat4;
use crate::systems::{half_period_fundamental, EssentialSystem};
use crate::Result;

/// Symmetry class of a solution under t ↦ −t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    /// x even, y odd: initial data (x(0), y'(0)).
    Even,
    /// x odd, y even: initial data (y(0), x'(0)).
    Odd,
}

/// The four class indicators at ω = 1 and ω = −1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPeriodIndicators {
    pub plus_even: f64,
    pub plus_odd: f64,
    pub minus_even: f64,
    pub minus_odd: f64,
}

fn det2(phi: &Mat4, rows: [usize; 2], cols: [usize; 2]) -> f64 {
    phi[(rows[0], cols[0])] * phi[(rows[1], cols[1])]
        - phi[(rows[0], cols[1])] * phi[(rows[1], cols[0])]
}

/// Indicators from the half-period fundamental matrix.
pub fn indicators_from_fundamental(phi: &Mat4) -> HalfPeriodIndicators {
    HalfPeriodIndicators {
        // Periodic even and antiperiodic odd solutions: y(π) = 0, x'(π) = 0.
        plus_even: det2(phi, [1, 2], [0, 3]),
        minus_odd: det2(phi, [1, 2], [1, 2]),
        // Periodic odd and antiperiodic even solutions: x(π) = 0, y'(π) = 0.
        plus_odd: det2(phi, [0, 3], [1, 2]),
        minus_even: det2(phi, [0, 3], [0, 3]),
    }
}

/// All four indicators of a system.
pub fn half_period_indicators(sys: &EssentialSystem, tol: f64) -> Result<HalfPeriodIndicators> {
    Ok(indicators_from_fundamental(&half_period_fundamental(sys, tol)?))
}

impl HalfPeriodIndicators {
    /// Indicator of one class at ω = +1 (`plus = true`) or ω = −1.
    pub fn get(&self, plus: bool, class: SymmetryClass) -> f64 {
        match (plus, class) {
            (true, SymmetryClass::Even) => self.plus_even,
            (true, SymmetryClass::Odd) => self.plus_odd,
            (false, SymmetryClass::Even) => self.minus_even,
            (false, SymmetryClass::Odd) => self.minus_odd,
        }
    }
}

/// One class indicator of a system.
pub fn class_indicator(
    sys: &EssentialSystem,
    plus: bool,
    class: SymmetryClass,
    tol: f64,
) -> Result<f64> {
    Ok(half_period_indicators(sys, tol)?.get(plus, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::DEFAULT_TOL;

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let mut fa = f(a);
        assert!(fa * f(b) < 0.0);
        while b - a > 1e-12 {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm * fa <= 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn circular_minus_one_roots_in_both_classes() {
        let exact = (-35.0 + 1297f64.sqrt()) / 24.0;
        for class in [SymmetryClass::Even, SymmetryClass::Odd] {
            let f = |b: f64| {
                class_indicator(
                    &EssentialSystem::nonconvex_tilde(b, 0.0).unwrap(),
                    false,
                    class,
                    DEFAULT_TOL,
                )
                .unwrap()
            };
            let root = bisect(f, 0.0, 0.1);
            assert!((root - exact).abs() < 1e-8, "{class:?}: {root}");
        }
    }

    #[test]
    fn first_one_degenerate_curve_is_odd() {
        for e in [0.0, 0.4, 0.8] {
            let v = class_indicator(
                &EssentialSystem::nonconvex_tilde(0.0, e).unwrap(),
                true,
                SymmetryClass::Odd,
                DEFAULT_TOL,
            )
            .unwrap();
            assert!(v.abs() < 1e-9, "e={e}: {v}");
        }
    }

    #[test]
    fn circular_one_root_at_one_third() {
        for class in [SymmetryClass::Even, SymmetryClass::Odd] {
            let f = |b: f64| {
                class_indicator(
                    &EssentialSystem::nonconvex_tilde(b, 0.0).unwrap(),
                    true,
                    class,
                    DEFAULT_TOL,
                )
                .unwrap()
            };
            let root = bisect(f, 0.2, 0.5);
            assert!((root - 1.0 / 3.0).abs() < 1e-8, "{class:?}: {root}");
        }
    }
}
