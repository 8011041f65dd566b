//! Quadratic forms ⟨A x, x⟩ of the second-order operator on explicit
//! trigonometric curves, their parameter derivatives, and the tangent
//! slopes of the −1-degenerate curves at e = 0 obtained from them.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::numerics::{j2, rotation, Mat2};
use crate::quadrature::integrate;
use crate::systems::Family;
use crate::{Error, Result};

/// Absolute tolerance of the adaptive quadratures.
pub const FORM_TOL: f64 = 1e-12;

/// One harmonic: cos(ft)·c + sin(ft)·s with vector coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: f64,
    pub cos: [f64; 2],
    pub sin: [f64; 2],
}

/// A trigonometric polynomial p(t) with values in ℝ², optionally composed
/// with the rotation so that x(t) = R(t) p(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigCurve {
    pub terms: Vec<TrigTerm>,
    pub rotated: bool,
}

impl TrigCurve {
    pub fn new(terms: Vec<TrigTerm>, rotated: bool) -> Self {
        Self { terms, rotated }
    }

    fn poly(&self, t: f64) -> (Vector2<f64>, Vector2<f64>) {
        let mut p = Vector2::zeros();
        let mut dp = Vector2::zeros();
        for term in self.terms.iter() {
            let (s, c) = (term.freq * t).sin_cos();
            let cv = Vector2::new(term.cos[0], term.cos[1]);
            let sv = Vector2::new(term.sin[0], term.sin[1]);
            p += cv * c + sv * s;
            dp += (sv * c - cv * s) * term.freq;
        }
        (p, dp)
    }

    /// x(t) and x'(t).
    pub fn eval(&self, t: f64) -> (Vector2<f64>, Vector2<f64>) {
        let (p, dp) = self.poly(t);
        if self.rotated {
            let r = rotation(t);
            // (R p)' = R (J p + p').
            (r * p, r * (j2() * p + dp))
        } else {
            (p, dp)
        }
    }
}

fn r_factor(e: f64, t: f64) -> f64 {
    1.0 / (1.0 + e * t.cos())
}

/// ⟨A x, x⟩ = ∫₀^{2π} |x'|² − |x|² + xᵀ R K Rᵀ x dt by adaptive quadrature.
pub fn quadratic_form(lambda3: f64, lambda4: f64, e: f64, x: &TrigCurve) -> f64 {
    integrate(
        |t| {
            let (v, dv) = x.eval(t);
            let rot = rotation(t);
            let k = Mat2::new(lambda3, 0.0, 0.0, lambda4) * r_factor(e, t);
            let pot = (rot * k * rot.transpose() * v).dot(&v);
            dv.norm_squared() - v.norm_squared() + pot
        },
        0.0,
        2.0 * PI,
        FORM_TOL,
    )
    .value
}

/// ∫₀^{2π} w(t) (Rᵀx)ᵀ diag(d₃, d₄) (Rᵀx) dt.
pub fn potential_form(d3: f64, d4: f64, weight: impl Fn(f64) -> f64, x: &TrigCurve) -> f64 {
    integrate(
        |t| {
            let (v, _) = x.eval(t);
            let u = rotation(t).transpose() * v;
            weight(t) * (d3 * u[0] * u[0] + d4 * u[1] * u[1])
        },
        0.0,
        2.0 * PI,
        FORM_TOL,
    )
    .value
}

/// (λ₃, λ₄) of a family at parameter p (β̃ for non-convex, β otherwise).
pub fn family_lambdas(family: Family, p: f64) -> (f64, f64) {
    match family {
        Family::NonConvex => ((9.0 + 3.0 * p) / 2.0, -p),
        Family::Convex => {
            let s = (9.0 - p).sqrt();
            ((9.0 - 3.0 * s) / 2.0, s)
        }
        Family::Lagrange => {
            let s = (9.0 - p).sqrt();
            ((3.0 + s) / 2.0, (3.0 - s) / 2.0)
        }
    }
}

/// (dλ₃/dp, dλ₄/dp).
pub fn family_lambda_derivatives(family: Family, p: f64) -> (f64, f64) {
    match family {
        Family::NonConvex => (1.5, -1.0),
        Family::Convex => {
            let s = (9.0 - p).sqrt();
            (0.75 / s, -0.5 / s)
        }
        Family::Lagrange => {
            let s = (9.0 - p).sqrt();
            (-0.25 / s, 0.25 / s)
        }
    }
}

/// ⟨∂_p A x, x⟩ for the family parameter p at eccentricity e.
pub fn parameter_derivative_form(family: Family, p: f64, e: f64, x: &TrigCurve) -> f64 {
    let (d3, d4) = family_lambda_derivatives(family, p);
    potential_form(d3, d4, |t| r_factor(e, t), x)
}

/// ⟨∂_e A x, x⟩ with ∂_e (1 + e cos t)⁻¹ = −cos t (1 + e cos t)⁻².
pub fn eccentricity_derivative_form(lambda3: f64, lambda4: f64, e: f64, x: &TrigCurve) -> f64 {
    potential_form(
        lambda3,
        lambda4,
        |t| -t.cos() * r_factor(e, t).powi(2),
        x,
    )
}

/// Tangent data of a −1-degenerate curve leaving e = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentOracle {
    pub family: Family,
    /// Parameter of the degenerate point at e = 0.
    pub start: f64,
    /// Coefficient a₀ of the kernel element R(t)(a₀ sin t/2, cos t/2).
    pub a0: f64,
    /// ⟨∂_p A x₀, x₀⟩.
    pub d_param: f64,
    /// ⟨∂_e A x₀, x₀⟩.
    pub d_ecc: f64,
    /// dp/de = −⟨∂_e A x₀, x₀⟩ / ⟨∂_p A x₀, x₀⟩.
    pub slope: f64,
}

/// Kernel element x₀ = R(t)(a₀ sin t/2, cos t/2) of the circular operator
/// at ω = −1; it solves the circular equations when a₀ = λ₄ + 1/4.
pub fn half_frequency_kernel(lambda4: f64) -> (f64, TrigCurve) {
    let a0 = lambda4 + 0.25;
    (
        a0,
        TrigCurve::new(
            vec![TrigTerm {
                freq: 0.5,
                cos: [0.0, 1.0],
                sin: [a0, 0.0],
            }],
            true,
        ),
    )
}

/// Differentiating ⟨A(p(e), e) x_e, x_e⟩ = 0 at e = 0 gives
/// p'(0)⟨∂_p A x₀, x₀⟩ + ⟨∂_e A x₀, x₀⟩ = 0; this evaluates both forms by
/// quadrature at the circular degenerate point `start`.
pub fn tangent_oracle(family: Family, start: f64) -> Result<TangentOracle> {
    let (l3, l4) = family_lambdas(family, start);
    let (a0, x0) = half_frequency_kernel(l4);
    let residual = (l3 + 0.25) * (l4 + 0.25) - 1.0;
    if residual.abs() > 1e-8 {
        return Err(Error::NotDegenerate(residual.abs()));
    }
    let d_param = parameter_derivative_form(family, start, 0.0, &x0);
    let d_ecc = eccentricity_derivative_form(l3, l4, 0.0, &x0);
    Ok(TangentOracle {
        family,
        start,
        a0,
        d_param,
        d_ecc,
        slope: -d_ecc / d_param,
    })
}

/// The test curve x₀ = (cos t/2, sin t/2) + (π/4)(−sin t, cos t − 1) used
/// to show that the first −1-curve crosses β̃ = 0.
pub fn crossing_test_curve() -> TrigCurve {
    let q = PI / 4.0;
    TrigCurve::new(
        vec![
            TrigTerm {
                freq: 0.5,
                cos: [1.0, 0.0],
                sin: [0.0, 1.0],
            },
            TrigTerm {
                freq: 1.0,
                cos: [0.0, q],
                sin: [-q, 0.0],
            },
            TrigTerm {
                freq: 0.0,
                cos: [0.0, -q],
                sin: [0.0, 0.0],
            },
        ],
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rotation_energy() {
        // x = (cos t, sin t), K = 0: ∫ |x'|² − |x|² = 0.
        let x = TrigCurve::new(
            vec![TrigTerm {
                freq: 1.0,
                cos: [1.0, 0.0],
                sin: [0.0, 1.0],
            }],
            false,
        );
        assert!(quadratic_form(0.0, 0.0, 0.3, &x).abs() < 1e-12);
    }

    #[test]
    fn half_frequency_kernel_is_null_at_circular_degeneracy() {
        let bt = (-35.0 + 1297f64.sqrt()) / 24.0;
        let (l3, l4) = family_lambdas(Family::NonConvex, bt);
        let (_, x0) = half_frequency_kernel(l4);
        assert!(quadratic_form(l3, l4, 0.0, &x0).abs() < 1e-10);
    }

    #[test]
    fn rotated_derivative_matches_finite_difference() {
        let (_, x0) = half_frequency_kernel(0.7);
        let t = 0.9;
        let h = 1e-6;
        let fd = (x0.eval(t + h).0 - x0.eval(t - h).0) / (2.0 * h);
        assert!((fd - x0.eval(t).1).norm() < 1e-8);
    }
}
