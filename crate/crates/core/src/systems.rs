//! The essential 4×4 linearized systems ż = J B(t) z and their fundamental
//! solutions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numerics::{j4, rotation, Mat2, Mat4, SymplecticMatrix};
use crate::ode::{integrate, OdeOptions};
use crate::{Error, Result};

/// Largest eccentricity accepted by the integrators.
pub const MAX_ECCENTRICITY: f64 = 0.99;
/// Largest physical mass parameter β = 27m(1−m).
pub const BETA_MAX: f64 = 6.75;
/// Smallest β̃ of the analytically extended non-convex family.
pub const BETA_TILDE_MIN: f64 = -1.8;
/// Default local error tolerance of the monodromy integration.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Which family an essential system belongs to, with its native parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum Case {
    /// Non-convex two-small-mass system, parametrised by β̃ = √(9−β)
    /// (extended to β̃ ≥ −9/5).
    NonConvex { beta_tilde: f64 },
    /// Convex two-small-mass system, parametrised by β ∈ [0, 27/4].
    Convex { beta: f64 },
    /// Essential part of the Lagrangian triangle, parametrised by β.
    Lagrange { beta: f64 },
    /// Raw (λ₃, λ₄) pair.
    Custom,
}

/// Case family without a parameter value, used to rebuild systems along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    NonConvex,
    Convex,
    Lagrange,
}

impl Family {
    /// Builds the system of this family at parameter `p` (β̃ for the
    /// non-convex family, β otherwise) and eccentricity `e`.
    pub fn system(self, p: f64, e: f64) -> Result<EssentialSystem> {
        match self {
            Family::NonConvex => EssentialSystem::nonconvex_tilde(p, e),
            Family::Convex => EssentialSystem::convex(p, e),
            Family::Lagrange => EssentialSystem::lagrange(p, e),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::NonConvex => "nonconvex",
            Family::Convex => "convex",
            Family::Lagrange => "lagrange",
        }
    }

    /// Name of the sweep parameter.
    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::NonConvex => "beta_tilde",
            _ => "beta",
        }
    }
}

/// ż = J B(t) z with
/// B(t) = [[1,0,0,1],[0,1,−1,0],[0,−1,1−λ₃/(1+e cos t),0],[1,0,0,1−λ₄/(1+e cos t)]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialSystem {
    pub lambda3: f64,
    pub lambda4: f64,
    pub e: f64,
    pub case: Case,
}

fn check_e(e: f64) -> Result<()> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::OutOfRange(format!("eccentricity {e} not in [0, 1)")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=BETA_MAX).contains(&beta) {
        return Err(Error::OutOfRange(format!("beta {beta} not in [0, 27/4]")));
    }
    Ok(())
}

impl EssentialSystem {
    /// Non-convex system at physical β ∈ [0, 27/4].
    pub fn nonconvex(beta: f64, e: f64) -> Result<Self> {
        check_beta(beta)?;
        Self::nonconvex_tilde((9.0 - beta).sqrt(), e)
    }

    /// Non-convex system at β̃ ∈ [−9/5, ∞): λ₃ = (9+3β̃)/2, λ₄ = −β̃.
    pub fn nonconvex_tilde(beta_tilde: f64, e: f64) -> Result<Self> {
        check_e(e)?;
        if !(beta_tilde >= BETA_TILDE_MIN) || !beta_tilde.is_finite() {
            return Err(Error::OutOfRange(format!(
                "beta_tilde {beta_tilde} below -9/5"
            )));
        }
        Ok(Self {
            lambda3: (9.0 + 3.0 * beta_tilde) / 2.0,
            lambda4: -beta_tilde,
            e,
            case: Case::NonConvex { beta_tilde },
        })
    }

    /// Convex system: λ₃ = (9−3√(9−β))/2, λ₄ = √(9−β).
    pub fn convex(beta: f64, e: f64) -> Result<Self> {
        check_e(e)?;
        check_beta(beta)?;
        let s = (9.0 - beta).sqrt();
        Ok(Self {
            lambda3: (9.0 - 3.0 * s) / 2.0,
            lambda4: s,
            e,
            case: Case::Convex { beta },
        })
    }

    /// Essential part of the Lagrangian equilateral triangle:
    /// λ₃ = (3+√(9−β))/2, λ₄ = (3−√(9−β))/2.
    pub fn lagrange(beta: f64, e: f64) -> Result<Self> {
        check_e(e)?;
        check_beta(beta)?;
        let s = (9.0 - beta).sqrt();
        Ok(Self {
            lambda3: (3.0 + s) / 2.0,
            lambda4: (3.0 - s) / 2.0,
            e,
            case: Case::Lagrange { beta },
        })
    }

    /// Raw constructor.
    pub fn custom(lambda3: f64, lambda4: f64, e: f64) -> Result<Self> {
        check_e(e)?;
        if !lambda3.is_finite() || !lambda4.is_finite() {
            return Err(Error::OutOfRange("non-finite lambda".into()));
        }
        Ok(Self {
            lambda3,
            lambda4,
            e,
            case: Case::Custom,
        })
    }

    /// Family and parameter of a tagged system.
    pub fn family(&self) -> Option<(Family, f64)> {
        match self.case {
            Case::NonConvex { beta_tilde } => Some((Family::NonConvex, beta_tilde)),
            Case::Convex { beta } => Some((Family::Convex, beta)),
            Case::Lagrange { beta } => Some((Family::Lagrange, beta)),
            Case::Custom => None,
        }
    }

    /// 1 / (1 + e cos t).
    pub fn radial_factor(&self, t: f64) -> f64 {
        1.0 / (1.0 + self.e * t.cos())
    }

    /// K(t) = diag(λ₃, λ₄) / (1 + e cos t).
    pub fn k_matrix(&self, t: f64) -> Mat2 {
        let r = self.radial_factor(t);
        Mat2::new(self.lambda3 * r, 0.0, 0.0, self.lambda4 * r)
    }

    /// R(t) K(t) R(t)ᵀ, the potential of the second-order operator.
    pub fn rotated_potential(&self, t: f64) -> Mat2 {
        let r = rotation(t);
        r * self.k_matrix(t) * r.transpose()
    }

    /// B(t).
    pub fn b_matrix(&self, t: f64) -> Mat4 {
        let r = self.radial_factor(t);
        Mat4::new(
            1.0, 0.0, 0.0, 1.0, //
            0.0, 1.0, -1.0, 0.0, //
            0.0, -1.0, 1.0 - self.lambda3 * r, 0.0, //
            1.0, 0.0, 0.0, 1.0 - self.lambda4 * r,
        )
    }

    /// J B(t).
    pub fn jb_matrix(&self, t: f64) -> Mat4 {
        j4() * self.b_matrix(t)
    }
}

/// Alias matching the operation name used elsewhere.
pub fn build_b(sys: &EssentialSystem, t: f64) -> Mat4 {
    sys.b_matrix(t)
}

/// Fundamental solution at 2π with integration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub gamma2pi: SymplecticMatrix,
    pub steps: usize,
    pub defect: f64,
    pub tol_used: f64,
}

fn mat_from_row_major(y: &[f64; 16]) -> Mat4 {
    Mat4::from_row_slice(y)
}

fn row_major(m: &Mat4) -> [f64; 16] {
    let mut out = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[4 * i + j] = m[(i, j)];
        }
    }
    out
}

fn check_integrable(sys: &EssentialSystem) -> Result<()> {
    if sys.e > MAX_ECCENTRICITY {
        return Err(Error::OutOfRange(format!(
            "eccentricity {} above the integration cap {MAX_ECCENTRICITY}",
            sys.e
        )));
    }
    Ok(())
}

/// Propagates γ' = J B(t) γ from `t0` to `t1` starting at `start`.
pub fn propagate(
    sys: &EssentialSystem,
    start: &Mat4,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<(Mat4, usize)> {
    check_integrable(sys)?;
    let mut y = row_major(start);
    let rhs = |t: f64, y: &[f64; 16], dy: &mut [f64; 16]| {
        let r = sys.radial_factor(t);
        let b22 = 1.0 - sys.lambda3 * r;
        let b33 = 1.0 - sys.lambda4 * r;
        for c in 0..4 {
            let z0 = y[c];
            let z1 = y[4 + c];
            let z2 = y[8 + c];
            let z3 = y[12 + c];
            // B z
            let w0 = z0 + z3;
            let w1 = z1 - z2;
            let w2 = -z1 + b22 * z2;
            let w3 = z0 + b33 * z3;
            // J w = (−w2, −w3, w0, w1)
            dy[c] = -w2;
            dy[4 + c] = -w3;
            dy[8 + c] = w0;
            dy[12 + c] = w1;
        }
    };
    let stats = integrate(rhs, t0, t1, &mut y, &OdeOptions::with_tol(tol))?;
    Ok((mat_from_row_major(&y), stats.accepted))
}

/// γ(2π) for γ' = J B(t) γ, γ(0) = I₄.
pub fn integrate_monodromy(sys: &EssentialSystem, tol: f64) -> Result<Monodromy> {
    let (m, steps) = propagate(sys, &Mat4::identity(), 0.0, 2.0 * PI, tol)?;
    let gamma2pi = SymplecticMatrix::new(m);
    Ok(Monodromy {
        defect: gamma2pi.defect,
        gamma2pi,
        steps,
        tol_used: tol,
    })
}

/// Monodromy at the default tolerance.
pub fn monodromy(sys: &EssentialSystem) -> Result<Monodromy> {
    integrate_monodromy(sys, DEFAULT_TOL)
}

/// R₄(t) = diag(R(t), R(t)).
pub fn rotation4(t: f64) -> Mat4 {
    let r = rotation(t);
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&r);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&r);
    m
}

/// Samples of γ(t) and of the rotated path ξ(t) = R₄(t) γ(t).
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedPath {
    pub times: Vec<f64>,
    pub gamma: Vec<Mat4>,
    pub xi: Vec<Mat4>,
}

/// ξ(t) = R₄(t) γ(t) at `samples + 1` equally spaced times in [0, 2π].
pub fn rotated_path(sys: &EssentialSystem, tol: f64, samples: usize) -> Result<RotatedPath> {
    let samples = samples.max(1);
    let mut times = Vec::with_capacity(samples + 1);
    let mut gamma = Vec::with_capacity(samples + 1);
    let mut xi = Vec::with_capacity(samples + 1);
    let mut g = Mat4::identity();
    let mut t_prev = 0.0;
    for k in 0..=samples {
        let t = 2.0 * PI * k as f64 / samples as f64;
        if k > 0 {
            g = propagate(sys, &g, t_prev, t, tol)?.0;
        }
        times.push(t);
        gamma.push(g);
        xi.push(rotation4(t) * g);
        t_prev = t;
    }
    Ok(RotatedPath { times, gamma, xi })
}

/// Right-hand side matrix of the rotated system: ξ' = J diag(I₂, I₂ − R K Rᵀ) ξ.
pub fn rotated_generator(sys: &EssentialSystem, t: f64) -> Mat4 {
    let mut d = Mat4::identity();
    let p = Mat2::identity() - sys.rotated_potential(t);
    d.fixed_view_mut::<2, 2>(2, 2).copy_from(&p);
    j4() * d
}

/// Fundamental matrix at t = π of the second-order system
/// z'' = −z + R(t) K(t) R(t)ᵀ z, in the state (x, y, x', y').
pub fn half_period_fundamental(sys: &EssentialSystem, tol: f64) -> Result<Mat4> {
    check_integrable(sys)?;
    let mut y = row_major(&Mat4::identity());
    let rhs = |t: f64, y: &[f64; 16], dy: &mut [f64; 16]| {
        let v = sys.rotated_potential(t) - Mat2::identity();
        for c in 0..4 {
            let x = y[c];
            let yy = y[4 + c];
            dy[c] = y[8 + c];
            dy[4 + c] = y[12 + c];
            dy[8 + c] = v[(0, 0)] * x + v[(0, 1)] * yy;
            dy[12 + c] = v[(1, 0)] * x + v[(1, 1)] * yy;
        }
    };
    integrate(rhs, 0.0, PI, &mut y, &OdeOptions::with_tol(tol))?;
    Ok(mat_from_row_major(&y))
}
