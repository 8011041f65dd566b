//! Fourier–Galerkin (Hill) discretization of A = −d²/dt² − I + R K Rᵀ on
//! ω-twisted periodic functions, and its Morse index.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::numerics::{rotation, Mat2, C64};
use crate::systems::EssentialSystem;
use crate::{Error, Result};

/// Default truncation order; stabilization is checked at twice this value.
pub const DEFAULT_HILL_N: usize = 64;
/// Relative kernel threshold ε_ker.
pub const KERNEL_EPS: f64 = 1e-6;
/// Smallest low-mode cutoff used by the Schur-complement inertia count.
const MIN_LOW_CUTOFF: usize = 8;

/// Galerkin matrix of the ω-twisted operator on the basis
/// e^{i(k+φ)t} ⊗ ℝ², |k| ≤ N, with φ = arg(ω)/2π ∈ [0, 1).
#[derive(Debug, Clone)]
pub struct HillOperator {
    pub lambda3: f64,
    pub lambda4: f64,
    pub e: f64,
    pub omega: C64,
    pub n: usize,
    /// φ = arg(ω)/2π in [0, 1).
    pub phase: f64,
    /// Hermitian matrix of dimension 2(2N+1), indexed by 2(k+N)+a.
    pub matrix: DMatrix<C64>,
}

/// Phase φ ∈ [0, 1) with ω = e^{2πiφ}.
pub fn omega_phase(omega: C64) -> f64 {
    let mut phi = omega.arg() / (2.0 * PI);
    if phi < 0.0 {
        phi += 1.0;
    }
    if phi >= 1.0 - 1e-15 {
        phi = 0.0;
    }
    phi
}

/// V(t) = −I + R(t) diag(λ₃, λ₄) Rᵀ(t) / (1 + e cos t).
pub fn hill_potential(lambda3: f64, lambda4: f64, e: f64, t: f64) -> Mat2 {
    let r = 1.0 / (1.0 + e * t.cos());
    let rot = rotation(t);
    rot * Mat2::new(lambda3 * r, 0.0, 0.0, lambda4 * r) * rot.transpose() - Mat2::identity()
}

/// Fourier coefficients V̂_m, m = −max_m..=max_m, of the potential by a
/// discrete transform on `nodes` equispaced points. Entry m + max_m holds
/// the 2×2 coefficient as [v00, v01, v10, v11].
pub fn potential_coefficients(
    lambda3: f64,
    lambda4: f64,
    e: f64,
    nodes: usize,
    max_m: usize,
) -> Vec<[C64; 4]> {
    let samples: Vec<(f64, Mat2)> = (0..nodes)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / nodes as f64;
            (t, hill_potential(lambda3, lambda4, e, t))
        })
        .collect();
    let scale = 1.0 / nodes as f64;
    (0..=2 * max_m)
        .map(|idx| {
            let m = idx as f64 - max_m as f64;
            let mut acc = [C64::new(0.0, 0.0); 4];
            for (t, v) in samples.iter() {
                let w = C64::from_polar(scale, -m * t);
                acc[0] += w * v[(0, 0)];
                acc[1] += w * v[(0, 1)];
                acc[2] += w * v[(1, 0)];
                acc[3] += w * v[(1, 1)];
            }
            acc
        })
        .collect()
}

/// Assembles the Hill matrix with Fourier data from an 8N-node transform.
pub fn hill_matrix(lambda3: f64, lambda4: f64, e: f64, omega: C64, n: usize) -> Result<HillOperator> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::OutOfRange(format!("eccentricity {e} not in [0, 1)")));
    }
    if n < 8 {
        return Err(Error::OutOfRange(format!("truncation N = {n} below 8")));
    }
    if ((omega.norm()) - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange(format!("ω = {omega} is not on the unit circle")));
    }
    let phase = omega_phase(omega);
    let coeffs = potential_coefficients(lambda3, lambda4, e, 8 * n, 2 * n);
    let dim = 2 * (2 * n + 1);
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..=2 * n {
        for l in 0..=2 * n {
            let c = &coeffs[k + 2 * n - l];
            for a in 0..2 {
                for b in 0..2 {
                    h[(2 * k + a, 2 * l + b)] = c[2 * a + b];
                }
            }
        }
        let nu = k as f64 - n as f64 + phase;
        for a in 0..2 {
            h[(2 * k + a, 2 * k + a)] += C64::new(nu * nu, 0.0);
        }
    }
    Ok(HillOperator {
        lambda3,
        lambda4,
        e,
        omega,
        n,
        phase,
        matrix: h,
    })
}

/// Hill matrix of an essential system.
pub fn hill_of(sys: &EssentialSystem, omega: C64, n: usize) -> Result<HillOperator> {
    hill_matrix(sys.lambda3, sys.lambda4, sys.e, omega, n)
}

/// Inertia of a Hermitian matrix up to a kernel threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    /// Smallest |eigenvalue| among the resolved low modes.
    pub smallest_abs: f64,
    /// Kernel threshold used.
    pub threshold: f64,
}

impl HillOperator {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// max |H − H*|.
    pub fn hermiticity_defect(&self) -> f64 {
        let h = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Upper bound of sup_t ‖V(t)‖.
    pub fn potential_bound(&self) -> f64 {
        1.0 + self.lambda3.abs().max(self.lambda4.abs()) / (1.0 - self.e)
    }

    /// Kernel threshold ε_ker(1 + ‖K‖).
    pub fn kernel_threshold(&self) -> f64 {
        KERNEL_EPS * (1.0 + self.lambda3.abs().max(self.lambda4.abs()) / (1.0 - self.e))
    }

    /// All eigenvalues, ascending (dense Hermitian eigensolver).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Inertia via a Schur complement: the modes with |k+φ| above a cutoff
    /// K₀ form a positive definite block once (K₀+1)² exceeds sup‖V‖, so
    /// Sylvester's law reduces the count to the eigenvalues of the small
    /// complement S = H_LL − H_LH H_HH⁻¹ H_HL.
    pub fn inertia(&self) -> Inertia {
        let threshold = self.kernel_threshold();
        let n = self.n as i64;
        let bound = self.potential_bound();
        let mut cutoff = (bound.sqrt().ceil() as usize).max(MIN_LOW_CUTOFF);
        loop {
            if cutoff as i64 >= n {
                let eigs = self.eigenvalues();
                return count(&eigs, threshold);
            }
            let (low, high): (Vec<usize>, Vec<usize>) = (0..self.dimension()).partition(|&i| {
                let k = (i / 2) as i64 - n;
                (k as f64 + self.phase).abs() <= cutoff as f64
            });
            let h_hh = self.matrix.select_rows(&high).select_columns(&high);
            match h_hh.cholesky() {
                Some(chol) => {
                    let h_hl = self.matrix.select_rows(&high).select_columns(&low);
                    let h_ll = self.matrix.select_rows(&low).select_columns(&low);
                    let s = &h_ll - h_hl.adjoint() * chol.solve(&h_hl);
                    let s = (&s + s.adjoint()) * C64::new(0.5, 0.0);
                    let eigs: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
                    return count(&eigs, threshold);
                }
                None => cutoff += 4,
            }
        }
    }
}

fn count(eigs: &[f64], threshold: f64) -> Inertia {
    Inertia {
        negative: eigs.iter().filter(|&&x| x < -threshold).count(),
        zero: eigs.iter().filter(|&&x| x.abs() <= threshold).count(),
        smallest_abs: eigs.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min),
        threshold,
    }
}

/// ω-index and nullity read off the Hill operator, with the doubling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaIndex {
    pub omega: C64,
    pub i_omega: usize,
    pub nu_omega: usize,
    pub truncation_n: usize,
    /// Index and nullity unchanged at truncation 2N.
    pub stabilized: bool,
    /// Index found at 2N.
    pub i_omega_doubled: usize,
    /// Smallest |eigenvalue| of the reduced problem at N.
    pub smallest_abs_eigenvalue: f64,
}

/// Morse index (negative count) and nullity of the Hill operator, with
/// stabilization checked by reassembling at 2N.
pub fn morse_index(hill: &HillOperator) -> Result<OmegaIndex> {
    let base = hill.inertia();
    let doubled = hill_matrix(hill.lambda3, hill.lambda4, hill.e, hill.omega, 2 * hill.n)?.inertia();
    Ok(OmegaIndex {
        omega: hill.omega,
        i_omega: base.negative,
        nu_omega: base.zero,
        truncation_n: hill.n,
        stabilized: base.negative == doubled.negative && base.zero == doubled.zero,
        i_omega_doubled: doubled.negative,
        smallest_abs_eigenvalue: base.smallest_abs,
    })
}

/// Morse index of an essential system at ω with the default truncation.
pub fn omega_index(sys: &EssentialSystem, omega: C64) -> Result<OmegaIndex> {
    morse_index(&hill_of(sys, omega, DEFAULT_HILL_N)?)
}

/// Morse index of the circular (e = 0) operator counted frequency by
/// frequency: in the non-rotating frame the operator has constant
/// coefficients and acts on e^{iνt} ⊗ ℂ² as [[ν²+λ₃, 2iν], [−2iν, ν²+λ₄]].
pub fn circular_index(lambda3: f64, lambda4: f64, omega: C64) -> (usize, usize) {
    let phase = omega_phase(omega);
    let bound = (lambda3.abs() + lambda4.abs() + 4.0).sqrt() as i64 + 3;
    let mut neg = 0;
    let mut zero = 0;
    for k in -bound..=bound {
        let nu = k as f64 + phase;
        let a = nu * nu + lambda3;
        let d = nu * nu + lambda4;
        let tr = a + d;
        let disc = ((a - d) * (a - d) + 16.0 * nu * nu).sqrt();
        let e1 = 0.5 * (tr - disc);
        let e2 = 0.5 * (tr + disc);
        let tol = 1e-12 * (1.0 + tr.abs());
        for ev in [e1, e2] {
            if ev < -tol {
                neg += 1;
            } else if ev.abs() <= tol {
                zero += 1;
            }
        }
    }
    (neg, zero)
}
