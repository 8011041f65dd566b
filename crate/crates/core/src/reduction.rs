//! Symplectic reduction of a planar four-body central configuration: the
//! unitary eigenbasis v₁..v₄ of D, the essential parameters β₂, β₁₁, β₁₂,
//! β₂₂, and the 12×12 linearized Hamiltonian at the elliptic relative
//! equilibrium.

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::numerics::{j2, psi_embed, CVec4, Mat2, Mat4, C64};
use crate::{Error, Result};

/// Residual below which a configuration is accepted as central.
pub const CC_TOL: f64 = 1e-8;

/// Masses and complex positions of four bodies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodySystem {
    pub masses: [f64; 4],
    pub positions: [C64; 4],
}

/// Translates and scales positions so that Σmᵢ = 1, Σmᵢzᵢ = 0 and Σmᵢ|zᵢ|² = 1.
pub fn normalize(masses: [f64; 4], positions: [C64; 4]) -> Result<BodySystem> {
    if masses.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(Error::OutOfRange(format!("masses must be positive: {masses:?}")));
    }
    if positions.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::OutOfRange("non-finite position".into()));
    }
    let total: f64 = masses.iter().sum();
    let m = masses.map(|x| x / total);
    let scale = positions.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for i in 0..4 {
        for j in i + 1..4 {
            if (positions[i] - positions[j]).norm() <= 1e-14 * scale {
                return Err(Error::CoincidentBodies(i + 1, j + 1));
            }
        }
    }
    let center: C64 = (0..4).map(|i| positions[i] * m[i]).sum();
    let shifted = positions.map(|z| z - center);
    let inertia: f64 = (0..4).map(|i| m[i] * shifted[i].norm_sqr()).sum();
    let s = inertia.sqrt();
    Ok(BodySystem {
        masses: m,
        positions: shifted.map(|z| z / s),
    })
}

impl BodySystem {
    /// μ = Σ_{i<j} mᵢmⱼ / |zᵢ − zⱼ|.
    pub fn mu(&self) -> f64 {
        let (m, z) = (&self.masses, &self.positions);
        pairs().map(|(i, j)| m[i] * m[j] / (z[i] - z[j]).norm()).sum()
    }

    /// Σ mᵢ z̄ᵢ².
    pub fn conj_square_moment(&self) -> C64 {
        (0..4)
            .map(|i| self.positions[i].conj().powi(2) * self.masses[i])
            .sum()
    }
}

fn pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j)))
}

/// max over i of |Σⱼ mⱼ(zⱼ − zᵢ)/|zᵢ − zⱼ|³ + μ zᵢ| on a normalized system.
///
/// The gravitational pull on each body points towards the center of mass,
/// so the acceleration equals −μ zᵢ at a central configuration.
pub fn cc_residual(sys: &BodySystem) -> f64 {
    let mu = sys.mu();
    let (m, z) = (&sys.masses, &sys.positions);
    (0..4)
        .map(|i| {
            let pull: C64 = (0..4)
                .filter(|&j| j != i)
                .map(|j| (z[j] - z[i]) * (m[j] / (z[i] - z[j]).norm().powi(3)))
                .sum();
            (pull + z[i] * mu).norm()
        })
        .fold(0.0, f64::max)
}

/// Signed area of the triangle zᵢ zⱼ zₖ (positive when counter-clockwise).
pub fn signed_area(z: &[C64; 4], i: usize, j: usize, k: usize) -> f64 {
    0.5 * ((z[j] - z[i]).conj() * (z[k] - z[i])).im
}

/// Everything the reduction derives from a central configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CCData {
    pub system: BodySystem,
    pub mu: f64,
    pub d: Mat4,
    pub v1: CVec4,
    pub v2: CVec4,
    pub v3: CVec4,
    pub v4: CVec4,
    pub k: f64,
    pub l: C64,
    pub c: [f64; 4],
    pub rho: f64,
    /// Eigenvalue of D on v₄, tr(D) − μ.
    pub lambda4: f64,
}

impl CCData {
    /// Basis vectors as columns.
    pub fn basis(&self) -> [CVec4; 4] {
        [self.v1, self.v2, self.v3, self.v4]
    }

    /// Largest entry of |V̄ᵀ M̃ V − I|.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.system.masses;
        let basis = self.basis();
        let mut worst: f64 = 0.0;
        for (a, va) in basis.iter().enumerate() {
            for (b, vb) in basis.iter().enumerate() {
                let g: C64 = (0..4).map(|i| va[i].conj() * vb[i] * m[i]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// D = μI + M̃⁻¹B with Bᵢⱼ = mᵢmⱼ/rᵢⱼ³ off the diagonal and row sums zero.
fn d_matrix(sys: &BodySystem, mu: f64) -> Mat4 {
    let (m, z) = (&sys.masses, &sys.positions);
    let mut d = Mat4::zeros();
    for i in 0..4 {
        let mut diag = mu;
        for j in 0..4 {
            if j != i {
                let w = m[j] / (z[i] - z[j]).norm().powi(3);
                d[(i, j)] = w;
                diag -= w;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// tr(D) = 4μ − Σ_{i<j} (mᵢ + mⱼ)/rᵢⱼ³, summed pairwise.
fn trace_d(sys: &BodySystem, mu: f64) -> f64 {
    let (m, z) = (&sys.masses, &sys.positions);
    let off: f64 = pairs()
        .map(|(i, j)| (m[i] + m[j]) / (z[i] - z[j]).norm().powi(3))
        .sum();
    4.0 * mu - off
}

/// Builds the reduction data of a normalized central configuration with the
/// default residual tolerance.
pub fn build_ccdata(sys: &BodySystem) -> Result<CCData> {
    build_ccdata_with_tol(sys, CC_TOL)
}

/// Builds the reduction data, rejecting configurations whose CC residual
/// exceeds `tol`.
pub fn build_ccdata_with_tol(sys: &BodySystem, tol: f64) -> Result<CCData> {
    let residual = cc_residual(sys);
    if !(residual <= tol) {
        return Err(Error::DegenerateConfiguration(format!(
            "not a central configuration (residual {residual:e})"
        )));
    }
    let z = sys.positions;
    let m = sys.masses;
    let scale: f64 = z.iter().map(|w| w.norm_sqr()).sum();
    let max_area = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]
        .iter()
        .map(|&(i, j, k)| signed_area(&z, i, j, k).abs())
        .fold(0.0, f64::max);
    if max_area <= 1e-12 * scale {
        return Err(Error::Collinear);
    }
    let s = sys.conj_square_moment();
    let gap = 1.0 - s.norm_sqr();
    if !(gap > 1e-14) {
        return Err(Error::DegenerateConfiguration(format!(
            "|Σ m z̄²| = {} is not below 1",
            s.norm()
        )));
    }
    let (k, l) = if s.norm() == 0.0 {
        (1.0, C64::new(0.0, 0.0))
    } else {
        let root = gap.sqrt();
        (1.0 / root, -s / root)
    };
    let mu = sys.mu();
    let rho = (m[0] * m[1] * m[2] * m[3]).sqrt();
    let area = |i, j, kk| signed_area(&z, i, j, kk);
    let c = [
        4.0 * k * rho / m[0] * area(1, 2, 3),
        -4.0 * k * rho / m[1] * area(0, 2, 3),
        4.0 * k * rho / m[2] * area(0, 1, 3),
        -4.0 * k * rho / m[3] * area(0, 1, 2),
    ];
    let one = C64::new(1.0, 0.0);
    let v1 = CVec4::from_element(one);
    let v2 = CVec4::from_iterator(z.iter().copied());
    let v3 = CVec4::from_iterator(z.iter().map(|w| w.conj() * k + l * w));
    let v4 = CVec4::from_iterator(c.iter().map(|&x| C64::new(x, 0.0)));
    Ok(CCData {
        system: *sys,
        mu,
        d: d_matrix(sys, mu),
        v1,
        v2,
        v3,
        v4,
        k,
        l,
        c,
        rho,
        lambda4: trace_d(sys, mu) - mu,
    })
}

/// Essential parameters of the reduced linearized system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialParameters {
    pub beta1: f64,
    pub beta2: f64,
    pub beta11: C64,
    pub beta12: C64,
    pub beta22: C64,
}

/// (3/2μ) Σ_{i<j} mᵢmⱼ (aᵢ−aⱼ)² conj(xᵢ−xⱼ) conj(yᵢ−yⱼ) / |aᵢ−aⱼ|⁵.
fn pair_form(cc: &CCData, x: &CVec4, y: &CVec4) -> C64 {
    let (m, a) = (&cc.system.masses, &cc.system.positions);
    let sum: C64 = pairs()
        .map(|(i, j)| {
            let d = a[i] - a[j];
            d * d * (x[i] - x[j]).conj() * (y[i] - y[j]).conj() * (m[i] * m[j] / d.norm().powi(5))
        })
        .sum();
    sum * (1.5 / cc.mu)
}

/// β₁ = 0, β₂ = 1 − tr(D)/μ and the three pair sums β₁₁, β₁₂, β₂₂.
pub fn essential_parameters(cc: &CCData) -> EssentialParameters {
    EssentialParameters {
        beta1: 0.0,
        beta2: 1.0 - trace_d(&cc.system, cc.mu) / cc.mu,
        beta11: pair_form(cc, &cc.v3, &cc.v3),
        beta12: pair_form(cc, &cc.v3, &cc.v4),
        beta22: pair_form(cc, &cc.v4, &cc.v4),
    }
}

pub type Mat12 = SMatrix<f64, 12, 12>;

/// The linearized Hamiltonian at true anomaly θ.
///
/// `full` acts on (Z, W₁, W₂, z, w₁, w₂). Each 4×4 block acts on one
/// (momentum, position) pair: `z_block` on (Z, z), `w1_block` on (W₁, w₁),
/// `w2_block` on (W₂, w₂). `coupling` is the w₁–w₂ Hessian entry.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    pub full: Mat12,
    pub z_block: Mat4,
    pub w1_block: Mat4,
    pub w2_block: Mat4,
    pub coupling: Mat2,
}

/// I₂ − (r/p)[(3+β)/2 · I₂ + Ψ(βᵢᵢ)].
pub fn w_hessian(beta: f64, beta_ii: C64, r_over_p: f64) -> Mat2 {
    Mat2::identity() - (Mat2::identity() * ((3.0 + beta) / 2.0) + psi_embed(beta_ii)) * r_over_p
}

fn pair_block(h: &Mat2) -> Mat4 {
    let mut b = Mat4::zeros();
    let j = j2();
    b.fixed_view_mut::<2, 2>(0, 0).copy_from(&Mat2::identity());
    b.fixed_view_mut::<2, 2>(0, 2).copy_from(&(-j));
    b.fixed_view_mut::<2, 2>(2, 0).copy_from(&j);
    b.fixed_view_mut::<2, 2>(2, 2).copy_from(h);
    b
}

/// Assembles B(θ) for eccentricity `e`.
pub fn assemble_linearized(params: &EssentialParameters, e: f64, theta: f64) -> Result<LinearizedSystem> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::OutOfRange(format!("eccentricity {e} not in [0, 1)")));
    }
    let rp = 1.0 / (1.0 + e * theta.cos());
    let hzz = Mat2::new(-(2.0 - e * theta.cos()) * rp, 0.0, 0.0, 1.0);
    let h11 = w_hessian(params.beta1, params.beta11, rp);
    let h22 = w_hessian(params.beta2, params.beta22, rp);
    let h12 = -psi_embed(params.beta12) * rp;
    let j = j2();
    let mut full = Mat12::zeros();
    for blk in 0..3 {
        let (p, q) = (2 * blk, 6 + 2 * blk);
        full.fixed_view_mut::<2, 2>(p, p).copy_from(&Mat2::identity());
        full.fixed_view_mut::<2, 2>(p, q).copy_from(&(-j));
        full.fixed_view_mut::<2, 2>(q, p).copy_from(&j);
    }
    full.fixed_view_mut::<2, 2>(6, 6).copy_from(&hzz);
    full.fixed_view_mut::<2, 2>(8, 8).copy_from(&h11);
    full.fixed_view_mut::<2, 2>(10, 10).copy_from(&h22);
    full.fixed_view_mut::<2, 2>(8, 10).copy_from(&h12);
    full.fixed_view_mut::<2, 2>(10, 8).copy_from(&h12.transpose());
    Ok(LinearizedSystem {
        full,
        z_block: pair_block(&hzz),
        w1_block: pair_block(&h11),
        w2_block: pair_block(&h22),
        coupling: h12,
    })
}

/// Reduces a raw body system in one call: normalize, build the CC data and
/// evaluate the essential parameters.
pub fn reduce(masses: [f64; 4], positions: [C64; 4]) -> Result<(CCData, EssentialParameters)> {
    let sys = normalize(masses, positions)?;
    let cc = build_ccdata(&sys)?;
    let params = essential_parameters(&cc);
    Ok((cc, params))
}
