//! The four-body family with two small masses near the Lagrangian point L4
//! of the primaries m₁ = m and m₂ = 1 − m − (1+τ)ε, with m₃ = ε, m₄ = τε.
//!
//! Positions use the frame q₁ = 0, q₂ = 1, in which L4 = 1/2 + i√3/2.

use std::f64::consts::PI;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::numerics::{Mat2, C64};
use crate::reduction::{build_ccdata, cc_residual, essential_parameters, normalize, BodySystem, EssentialParameters};
use crate::{Error, Result};

/// Largest ε accepted by the Newton solver.
pub const MAX_NEWTON_EPS: f64 = 1e-2;
/// Default ε ladder.
pub const DEFAULT_LADDER: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

/// Which limit family of central configurations the small pair follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    NonConvex,
    Convex,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::NonConvex => "nonconvex",
            Branch::Convex => "convex",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nonconvex" | "non-convex" => Ok(Branch::NonConvex),
            "convex" => Ok(Branch::Convex),
            other => Err(Error::OutOfRange(format!("unknown branch '{other}'"))),
        }
    }
}

/// One member of the two-small-mass family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallMassFamily {
    pub m: f64,
    pub tau: f64,
    pub eps: f64,
    pub branch: Branch,
}

impl SmallMassFamily {
    pub fn new(m: f64, tau: f64, eps: f64, branch: Branch) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::OutOfRange(format!("m = {m} not in (0, 1)")));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::OutOfRange(format!("tau = {tau} not in (0, 1]")));
        }
        if !(eps > 0.0 && (1.0 + tau) * eps < 1.0 - m) {
            return Err(Error::OutOfRange(format!(
                "eps = {eps} must satisfy 0 < (1+tau) eps < 1 - m"
            )));
        }
        Ok(Self { m, tau, eps, branch })
    }

    /// (m₁, m₂, m₃, m₄).
    pub fn masses(&self) -> [f64; 4] {
        let e = self.eps;
        [self.m, 1.0 - self.m - (1.0 + self.tau) * e, e, self.tau * e]
    }

    /// Same family at another ε.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.m, self.tau, eps, self.branch)
    }
}

/// L4 of the primaries in the frame q₁ = 0, q₂ = 1.
pub fn l4() -> C64 {
    C64::new(0.5, 3f64.sqrt() / 2.0)
}

/// Closed-form ε → 0 limits of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitData {
    pub branch: Branch,
    pub alpha0: f64,
    pub mu0: f64,
    pub beta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    /// Limit of β₂: λ₁ on the non-convex branch, λ₂ on the convex one.
    pub beta2_0: f64,
    pub beta11_0: C64,
    pub beta22_0: C64,
    /// Angle of the line through the small pair, in (−π/2, π/2].
    pub theta34: f64,
    pub hessian_eigs: [f64; 4],
}

/// D²V₂ at L4 with its eigen-decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianV2 {
    pub matrix: Mat2,
    /// δ₁ ≥ δ₂.
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors as complex directions, matching `eigenvalues`.
    pub directions: [C64; 2],
}

/// Unit eigenvector of the symmetric 2×2 matrix for eigenvalue `lam`.
fn sym_eigvec(a: &Mat2, lam: f64) -> C64 {
    let (p, b, c) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
    let u = C64::new(b, lam - p);
    let v = C64::new(lam - c, b);
    let w = if u.norm() >= v.norm() { u } else { v };
    if w.norm() == 0.0 {
        // Multiple of the identity: any direction is an eigenvector.
        C64::new(1.0, 0.0)
    } else {
        w / w.norm()
    }
}

/// D²V₂ = α₀⁻³ [[3/4, −3√3(1−2m)/4], [−3√3(1−2m)/4, 9/4]] and its eigenpairs.
pub fn hessian_v2(m: f64) -> Result<HessianV2> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::OutOfRange(format!("m = {m} not in (0, 1)")));
    }
    let scale = (m * (1.0 - m)).powf(1.5);
    let off = -3.0 * 3f64.sqrt() * (1.0 - 2.0 * m) / 4.0;
    let unit = Mat2::new(0.75, off, off, 2.25);
    let bt = (9.0 - 27.0 * m * (1.0 - m)).sqrt();
    let lam = [(3.0 + bt) / 2.0, (3.0 - bt) / 2.0];
    Ok(HessianV2 {
        matrix: unit * scale,
        eigenvalues: lam.map(|l| l * scale),
        directions: lam.map(|l| sym_eigvec(&unit, l)),
    })
}

/// Folds an angle into (−π/2, π/2].
fn line_angle(d: C64) -> f64 {
    let mut a = d.arg();
    if a > PI / 2.0 {
        a -= PI;
    } else if a <= -PI / 2.0 {
        a += PI;
    }
    a
}

/// Branch of a small-pair line angle: non-convex when |θ₃₄| ≥ π/3.
pub fn branch_of_angle(theta: f64) -> Branch {
    if theta.abs() >= PI / 3.0 - 1e-12 {
        Branch::NonConvex
    } else {
        Branch::Convex
    }
}

/// Closed-form limits.
pub fn limit_parameters(fam: &SmallMassFamily) -> LimitData {
    let m = fam.m;
    let alpha0 = (m * (1.0 - m)).powf(-0.5);
    let mu0 = alpha0.powi(-3);
    let beta = 27.0 * m * (1.0 - m);
    let bt = (9.0 - beta).max(0.0).sqrt();
    let lambda1 = (3.0 + bt) / 2.0;
    let lambda2 = (3.0 - bt) / 2.0;
    let f = C64::new(1.0, 3f64.sqrt() * (1.0 - 2.0 * m)) * 0.75;
    let h = hessian_v2(m).expect("m validated by the family");
    let (beta2_0, lambda3, lambda4, beta22_0, dir) = match fam.branch {
        Branch::NonConvex => (
            lambda1,
            (9.0 + 3.0 * bt) / 2.0,
            -bt,
            -f * ((9.0 + 5.0 * bt) / (2.0 * bt)),
            h.directions[0],
        ),
        Branch::Convex => (
            lambda2,
            (9.0 - 3.0 * bt) / 2.0,
            bt,
            f * ((9.0 - 5.0 * bt) / (2.0 * bt)),
            h.directions[1],
        ),
    };
    LimitData {
        branch: fam.branch,
        alpha0,
        mu0,
        beta,
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        beta2_0,
        beta11_0: f,
        beta22_0,
        theta34: line_angle(dir),
        hessian_eigs: [lambda1 * mu0, lambda2 * mu0, lambda3 * mu0, lambda4 * mu0],
    }
}

/// Leading-order positions (q₃, q₄) of the small pair.
pub fn asymptotic_positions(fam: &SmallMassFamily) -> (C64, C64) {
    let lim = limit_parameters(fam);
    let h = hessian_v2(fam.m).expect("m validated by the family");
    let (lam, u) = match fam.branch {
        Branch::NonConvex => (lim.lambda1, h.directions[0]),
        Branch::Convex => (lim.lambda2, h.directions[1]),
    };
    let tau = fam.tau;
    let s = ((1.0 + tau) * fam.eps / lam).cbrt();
    let q3 = l4() - u * (tau / (1.0 + tau) * s);
    let q4 = l4() + u * (s / (1.0 + tau));
    (q3, q4)
}

/// A central configuration of the family solved at finite ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvedCC {
    pub family: SmallMassFamily,
    /// Positions in the frame q₁ = 0, q₂ = 1.
    pub raw_positions: [C64; 4],
    /// Angular velocity squared in that frame.
    pub lambda: f64,
    pub system: BodySystem,
    pub residual: f64,
    pub iterations: usize,
    pub theta34: f64,
}

type Jac = SMatrix<f64, 8, 5>;
type Res = SVector<f64, 8>;

fn residual_and_jacobian(mass: &[f64; 4], q: &[C64; 4], lambda: f64) -> (Res, Jac) {
    let mut r = Res::zeros();
    let mut jac = Jac::zeros();
    let qc: C64 = (0..4).map(|k| q[k] * mass[k]).sum();
    // Column of the unknowns carried by q₃ and q₄.
    let col = |k: usize| if k >= 2 { Some(2 * (k - 2)) } else { None };
    for i in 0..4 {
        let mut acc = (q[i] - qc) * lambda;
        for j in 0..4 {
            if j == i {
                continue;
            }
            let d = q[j] - q[i];
            let n = d.norm();
            let n3 = n * n * n;
            acc += d * (mass[j] / n3);
            let n5 = n3 * n * n;
            let g = Mat2::new(
                1.0 / n3 - 3.0 * d.re * d.re / n5,
                -3.0 * d.re * d.im / n5,
                -3.0 * d.re * d.im / n5,
                1.0 / n3 - 3.0 * d.im * d.im / n5,
            ) * mass[j];
            if let Some(cj) = col(j) {
                let mut blk = jac.fixed_view_mut::<2, 2>(2 * i, cj);
                blk += g;
            }
            if let Some(ci) = col(i) {
                let mut blk = jac.fixed_view_mut::<2, 2>(2 * i, ci);
                blk -= g;
            }
        }
        r[2 * i] = acc.re;
        r[2 * i + 1] = acc.im;
        jac[(2 * i, 4)] = (q[i] - qc).re;
        jac[(2 * i + 1, 4)] = (q[i] - qc).im;
        for k in 2..4 {
            let c = col(k).unwrap();
            let w = lambda * ((if i == k { 1.0 } else { 0.0 }) - mass[k]);
            jac[(2 * i, c)] += w;
            jac[(2 * i + 1, c + 1)] += w;
        }
    }
    (r, jac)
}

fn solve_from(fam: &SmallMassFamily, q3: C64, q4: C64, lambda: f64) -> Result<SolvedCC> {
    if !(fam.eps <= MAX_NEWTON_EPS) {
        return Err(Error::OutOfRange(format!(
            "eps = {} above the Newton basin guard {MAX_NEWTON_EPS}",
            fam.eps
        )));
    }
    let mass = fam.masses();
    let mut q = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), q3, q4];
    let mut lam = lambda;
    let max_iter = 60;
    let mut iterations = 0;
    let mut last = f64::INFINITY;
    for it in 0..max_iter {
        iterations = it + 1;
        let (r, jac) = residual_and_jacobian(&mass, &q, lam);
        last = r.amax();
        let svd = jac.svd(true, true);
        let step = svd
            .solve(&(-r), 1e-14 * svd.singular_values.max())
            .map_err(|_| Error::NewtonDivergence { iterations, residual: last })?;
        q[2] += C64::new(step[0], step[1]);
        q[3] += C64::new(step[2], step[3]);
        lam += step[4];
        let sep = (q[2] - q[3]).norm();
        if !sep.is_finite() || sep == 0.0 || !lam.is_finite() {
            return Err(Error::NewtonDivergence { iterations, residual: last });
        }
        if step.amax() <= 1e-15 || last <= 1e-16 {
            break;
        }
    }
    let system = normalize(mass, q)?;
    let residual = cc_residual(&system);
    if !(residual <= 1e-10) {
        return Err(Error::NewtonDivergence {
            iterations,
            residual: residual.max(last),
        });
    }
    let theta34 = line_angle(q[3] - q[2]);
    if branch_of_angle(theta34) != fam.branch {
        return Err(Error::BranchFlip {
            expected: fam.branch.name().into(),
            angle: theta34,
        });
    }
    Ok(SolvedCC {
        family: *fam,
        raw_positions: q,
        lambda: lam,
        system,
        residual,
        iterations,
        theta34,
    })
}

/// Solves the central-configuration equations by Gauss–Newton from the
/// asymptotic positions.
pub fn solve_cc_newton(fam: &SmallMassFamily) -> Result<SolvedCC> {
    let (q3, q4) = asymptotic_positions(fam);
    solve_from(fam, q3, q4, 1.0)
}

/// One rung of an ε ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub eps: f64,
    pub params: EssentialParameters,
    pub err_beta2: f64,
    pub abs_beta12: f64,
    pub err_beta22: f64,
    pub cc_residual: f64,
    pub theta34: f64,
}

/// Full limit report over an ε ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub m: f64,
    pub tau: f64,
    pub branch: Branch,
    pub limit: LimitData,
    pub rows: Vec<LadderRow>,
}

impl LadderReport {
    /// Whether each error column strictly decreases down the ladder.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[1].err_beta2 < w[0].err_beta2
                && w[1].abs_beta12 < w[0].abs_beta12
                && w[1].err_beta22 < w[0].err_beta22
        })
    }
}

/// Solves the family along a decreasing ε ladder, seeding each solve with
/// the previous solution rescaled by the ε^{1/3} law.
pub fn eps_ladder(m: f64, tau: f64, branch: Branch, ladder: &[f64]) -> Result<LadderReport> {
    let mut eps_sorted = ladder.to_vec();
    eps_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let first = SmallMassFamily::new(m, tau, *eps_sorted.first().unwrap_or(&1e-3), branch)?;
    let limit = limit_parameters(&first);
    let mut rows = Vec::with_capacity(eps_sorted.len());
    let mut prev: Option<SolvedCC> = None;
    for &eps in &eps_sorted {
        let fam = first.with_eps(eps)?;
        let solved = match prev {
            Some(p) => {
                let k = (eps / p.family.eps).cbrt();
                let q3 = l4() + (p.raw_positions[2] - l4()) * k;
                let q4 = l4() + (p.raw_positions[3] - l4()) * k;
                solve_from(&fam, q3, q4, p.lambda).or_else(|_| solve_cc_newton(&fam))?
            }
            None => solve_cc_newton(&fam)?,
        };
        let cc = build_ccdata(&solved.system)?;
        let params = essential_parameters(&cc);
        rows.push(LadderRow {
            eps,
            params,
            err_beta2: (params.beta2 - limit.beta2_0).abs(),
            abs_beta12: params.beta12.norm(),
            err_beta22: (params.beta22 - limit.beta22_0).norm(),
            cc_residual: solved.residual,
            theta34: solved.theta34,
        });
        prev = Some(solved);
    }
    Ok(LadderReport {
        m,
        tau,
        branch,
        limit,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_mass_limits() {
        let fam = SmallMassFamily::new(0.5, 1.0, 1e-6, Branch::NonConvex).unwrap();
        let l = limit_parameters(&fam);
        assert!((l.alpha0 - 2.0).abs() < 1e-15);
        assert!((l.mu0 - 0.125).abs() < 1e-15);
        assert!((l.beta - 6.75).abs() < 1e-15);
        assert!((l.lambda3 - 6.75).abs() < 1e-15);
        assert!((l.lambda4 + 1.5).abs() < 1e-15);
        let c = limit_parameters(&SmallMassFamily { branch: Branch::Convex, ..fam });
        let want = [2.25, 0.75, 2.25, 1.5].map(|x| x * 0.125);
        for (a, b) in c.hessian_eigs.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn lambda3_lambda4_match_d2_eigenvalues() {
        for &m in &[0.1, 0.3, 0.5, 0.8] {
            for br in [Branch::NonConvex, Branch::Convex] {
                let l = limit_parameters(&SmallMassFamily::new(m, 1.0, 1e-6, br).unwrap());
                let center = (3.0 + l.beta2_0) / 2.0;
                let r = l.beta22_0.norm();
                let mut got = [l.lambda3, l.lambda4];
                got.sort_by(|a, b| a.partial_cmp(b).unwrap());
                assert!((got[0] - (center - r)).abs() < 1e-12);
                assert!((got[1] - (center + r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn angle_criterion_matches_branch() {
        for &m in &[0.05, 0.3, 0.5, 0.7, 0.95] {
            let n = limit_parameters(&SmallMassFamily::new(m, 1.0, 1e-6, Branch::NonConvex).unwrap());
            let c = limit_parameters(&SmallMassFamily::new(m, 1.0, 1e-6, Branch::Convex).unwrap());
            assert_eq!(branch_of_angle(n.theta34), Branch::NonConvex, "m={m}");
            assert_eq!(branch_of_angle(c.theta34), Branch::Convex, "m={m}");
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mass = [0.4, 0.5, 0.06, 0.04];
        let q = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.45, 0.8), C64::new(0.6, 0.9)];
        let lam = 1.1;
        let (_, jac) = residual_and_jacobian(&mass, &q, lam);
        let h = 1e-7;
        for c in 0..5 {
            let mut qp = q;
            let mut qm = q;
            let (mut lp, mut lm) = (lam, lam);
            match c {
                0 => { qp[2].re += h; qm[2].re -= h; }
                1 => { qp[2].im += h; qm[2].im -= h; }
                2 => { qp[3].re += h; qm[3].re -= h; }
                3 => { qp[3].im += h; qm[3].im -= h; }
                _ => { lp += h; lm -= h; }
            }
            let (rp, _) = residual_and_jacobian(&mass, &qp, lp);
            let (rm, _) = residual_and_jacobian(&mass, &qm, lm);
            let fd = (rp - rm) / (2.0 * h);
            for r in 0..8 {
                assert!((fd[r] - jac[(r, c)]).abs() < 1e-6, "({r},{c}) {} vs {}", fd[r], jac[(r, c)]);
            }
        }
    }
}
