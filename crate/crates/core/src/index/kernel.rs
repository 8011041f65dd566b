//! Fourier construction of the 1-kernel of the non-convex operator.
//!
//! In the non-rotating frame u = Rᵀ(t) z a kernel element solves
//! (1 + e cos t)(x'' − 2y') = λ₃ x and (1 + e cos t)(y'' + 2x') = λ₄ y.
//! Writing x = a₀ + Σ aₙ cos nt + Σ bₙ sin nt and y = c₀ + Σ cₙ cos nt + Σ dₙ sin nt,
//! the pairs vₙ = (aₙ, dₙ) obey the three-term recurrence
//! B_n vₙ = e (A_{n−1} v_{n−1} + A_{n+1} v_{n+1}), with
//! A_n = −(n/2)[[n, 2], [2, n]] and B_n = [[n² + λ₃, 2n], [2n, n² + λ₄]],
//! while λ₃ a₀ = −e(d₁ + a₁/2). The pairs (bₙ, −cₙ) obey the same recurrence,
//! which yields a second, independent kernel element.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::numerics::rotation;
use crate::{Error, Result};

/// Two kernel elements reconstructed from the recurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSolution {
    pub lambda3: f64,
    pub lambda4: f64,
    pub e: f64,
    /// Constant term of x in the first solution.
    pub a0: f64,
    /// aₙ, n = 1..=N.
    pub a: Vec<f64>,
    /// dₙ, n = 1..=N.
    pub d: Vec<f64>,
    /// Constant term of y in the second solution, −(e/β̃)(a₁ + d₁/2) with β̃ = −λ₄.
    pub c0_tilde: f64,
    /// Smallest singular value of the row-scaled truncated recurrence.
    pub smallest_singular_value: f64,
    /// Largest scaled residual of the recurrence equations.
    pub recurrence_residual: f64,
    /// Relative residuals of the differential equations for both solutions.
    pub ode_residual: [f64; 2],
    /// Determinant of the normalized L² Gram matrix of the two solutions.
    pub gram_determinant: f64,
}

fn a_mat(n: usize) -> [[f64; 2]; 2] {
    let n = n as f64;
    [[-0.5 * n * n, -n], [-n, -0.5 * n * n]]
}

fn b_mat(n: usize, l3: f64, l4: f64) -> [[f64; 2]; 2] {
    let nf = n as f64;
    [[nf * nf + l3, 2.0 * nf], [2.0 * nf, nf * nf + l4]]
}

/// Value and first two derivatives of a component in the non-rotating frame.
#[derive(Debug, Clone, Copy, Default)]
struct Jet {
    v: f64,
    d1: f64,
    d2: f64,
}

impl KernelSolution {
    fn first_jet(&self, t: f64) -> [Jet; 2] {
        let mut x = Jet {
            v: self.a0,
            ..Jet::default()
        };
        let mut y = Jet::default();
        for (i, (&a, &d)) in self.a.iter().zip(self.d.iter()).enumerate() {
            let n = (i + 1) as f64;
            let (s, c) = (n * t).sin_cos();
            x.v += a * c;
            x.d1 -= a * n * s;
            x.d2 -= a * n * n * c;
            y.v += d * s;
            y.d1 += d * n * c;
            y.d2 -= d * n * n * s;
        }
        [x, y]
    }

    fn second_jet(&self, t: f64) -> [Jet; 2] {
        let mut x = Jet::default();
        let mut y = Jet {
            v: self.c0_tilde,
            ..Jet::default()
        };
        for (i, (&a, &d)) in self.a.iter().zip(self.d.iter()).enumerate() {
            let n = (i + 1) as f64;
            let (s, c) = (n * t).sin_cos();
            x.v += a * s;
            x.d1 += a * n * c;
            x.d2 -= a * n * n * s;
            y.v -= d * c;
            y.d1 += d * n * s;
            y.d2 += d * n * n * c;
        }
        [x, y]
    }

    /// First solution u₁(t) = (a₀ + Σ aₙ cos nt, Σ dₙ sin nt) in the non-rotating frame.
    pub fn first(&self, t: f64) -> [f64; 2] {
        let j = self.first_jet(t);
        [j[0].v, j[1].v]
    }

    /// Second solution u₂(t) = (Σ aₙ sin nt, c̃₀ − Σ dₙ cos nt).
    pub fn second(&self, t: f64) -> [f64; 2] {
        let j = self.second_jet(t);
        [j[0].v, j[1].v]
    }

    /// Kernel element R(t) u(t) of the rotated operator (`which` ∈ {0, 1}).
    pub fn rotated(&self, which: usize, t: f64) -> [f64; 2] {
        let u = if which == 0 { self.first(t) } else { self.second(t) };
        let w = rotation(t) * nalgebra::Vector2::new(u[0], u[1]);
        [w[0], w[1]]
    }

    fn ode_residual_of(&self, jet: impl Fn(f64) -> [Jet; 2]) -> f64 {
        let samples = 1024;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 0..samples {
            let t = 2.0 * PI * j as f64 / samples as f64;
            let [x, y] = jet(t);
            let g = 1.0 + self.e * t.cos();
            let rx = g * (x.d2 - 2.0 * y.d1) - self.lambda3 * x.v;
            let ry = g * (y.d2 + 2.0 * x.d1) - self.lambda4 * y.v;
            worst = worst.max(rx.abs()).max(ry.abs());
            scale = scale
                .max(x.d2.abs() + 2.0 * y.d1.abs() + (self.lambda3 * x.v).abs())
                .max(y.d2.abs() + 2.0 * x.d1.abs() + (self.lambda4 * y.v).abs());
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }

    fn gram(&self) -> f64 {
        let samples = 1024;
        let (mut g11, mut g12, mut g22) = (0.0, 0.0, 0.0);
        for j in 0..samples {
            let t = 2.0 * PI * j as f64 / samples as f64;
            let u = self.first(t);
            let v = self.second(t);
            g11 += u[0] * u[0] + u[1] * u[1];
            g12 += u[0] * v[0] + u[1] * v[1];
            g22 += v[0] * v[0] + v[1] * v[1];
        }
        1.0 - g12 * g12 / (g11 * g22)
    }
}

/// Builds both kernel elements at a 1-degenerate point of a system with
/// λ₄ = −β̃ < 0, truncating the recurrence after `n_terms` harmonics and
/// taking the null vector of the truncated system.
pub fn kernel_fourier_solution(
    lambda3: f64,
    lambda4: f64,
    e: f64,
    n_terms: usize,
) -> Result<KernelSolution> {
    if lambda4 >= 0.0 {
        return Err(Error::ConstructionUnavailable(format!(
            "the doubling construction needs β̃ = −λ₄ > 0 (got λ₄ = {lambda4})"
        )));
    }
    if lambda3 == 0.0 {
        return Err(Error::ConstructionUnavailable("λ₃ = 0".into()));
    }
    if !(0.0..1.0).contains(&e) {
        return Err(Error::OutOfRange(format!("eccentricity {e} not in [0, 1)")));
    }
    let n = n_terms.max(2);
    let dim = 2 * n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for k in 1..=n {
        let row = 2 * (k - 1);
        let scale = 1.0 / ((k * k) as f64 + lambda3.abs().max(lambda4.abs()));
        let b = b_mat(k, lambda3, lambda4);
        for i in 0..2 {
            for j in 0..2 {
                m[(row + i, row + j)] += b[i][j] * scale;
            }
        }
        if k >= 2 {
            let a = a_mat(k - 1);
            for i in 0..2 {
                for j in 0..2 {
                    m[(row + i, row - 2 + j)] -= e * a[i][j] * scale;
                }
            }
        }
        if k < n {
            let a = a_mat(k + 1);
            for i in 0..2 {
                for j in 0..2 {
                    m[(row + i, row + 2 + j)] -= e * a[i][j] * scale;
                }
            }
        }
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let (idx, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let mut v: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    for x in v.iter_mut() {
        *x /= pivot;
    }
    let recurrence_residual = (&m * nalgebra::DVector::from_vec(v.clone())).amax();
    let a: Vec<f64> = (0..n).map(|k| v[2 * k]).collect();
    let d: Vec<f64> = (0..n).map(|k| v[2 * k + 1]).collect();
    let a0 = -e * (d[0] + 0.5 * a[0]) / lambda3;
    let beta_tilde = -lambda4;
    let c0_tilde = -(e / beta_tilde) * (a[0] + 0.5 * d[0]);
    let mut sol = KernelSolution {
        lambda3,
        lambda4,
        e,
        a0,
        a,
        d,
        c0_tilde,
        smallest_singular_value: smin,
        recurrence_residual,
        ode_residual: [0.0, 0.0],
        gram_determinant: 0.0,
    };
    sol.ode_residual = [
        sol.ode_residual_of(|t| sol.first_jet(t)),
        sol.ode_residual_of(|t| sol.second_jet(t)),
    ];
    sol.gram_determinant = sol.gram();
    Ok(sol)
}
