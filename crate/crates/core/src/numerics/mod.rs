//! Small dense linear algebra shared by the rest of the crate: the complex
//! embeddings Φ and Ψ, the standard symplectic forms, 4×4 eigenvalues and
//! quartic roots.

mod eig;

pub use eig::{eig4, hessenberg_eigenvalues, quartic_roots};

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;
/// Real 2×2 matrix.
pub type Mat2 = Matrix2<f64>;
/// Real 4×4 matrix.
pub type Mat4 = Matrix4<f64>;
/// Complex 4×4 matrix.
pub type CMat4 = Matrix4<C64>;
/// Complex 4-vector.
pub type CVec4 = Vector4<C64>;

/// Default tolerance for deciding that a multiplier lies on the unit circle.
pub const UNIT_CIRCLE_TOL: f64 = 1e-7;
/// Default bound on the symplectic defect of a monodromy matrix.
pub const SYMPLECTIC_DEFECT_TOL: f64 = 1e-8;

/// Φ(z) = [[x, −y], [y, x]] for z = x + iy: multiplication by z as a real map.
pub fn phi_embed(z: C64) -> Mat2 {
    Mat2::new(z.re, -z.im, z.im, z.re)
}

/// Ψ(z) = [[x, y], [y, −x]] for z = x + iy: multiplication by z composed with conjugation.
pub fn psi_embed(z: C64) -> Mat2 {
    Mat2::new(z.re, z.im, z.im, -z.re)
}

/// J₂ = [[0, −1], [1, 0]].
pub fn j2() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

/// J₄ = [[0, −I₂], [I₂, 0]].
pub fn j4() -> Mat4 {
    let mut j = Mat4::zeros();
    j[(0, 2)] = -1.0;
    j[(1, 3)] = -1.0;
    j[(2, 0)] = 1.0;
    j[(3, 1)] = 1.0;
    j
}

/// Rotation R(t) = [[cos t, −sin t], [sin t, cos t]].
pub fn rotation(t: f64) -> Mat2 {
    let (s, c) = t.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// S(t) = [[cos 2t, sin 2t], [sin 2t, −cos 2t]].
pub fn reflection_2t(t: f64) -> Mat2 {
    let (s, c) = (2.0 * t).sin_cos();
    Mat2::new(c, s, s, -c)
}

/// Symplectic sum A ⋄ B of two 2×2 matrices, acting on (x₁, x₂, y₁, y₂).
pub fn diamond(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = a[(0, 0)];
    m[(0, 2)] = a[(0, 1)];
    m[(2, 0)] = a[(1, 0)];
    m[(2, 2)] = a[(1, 1)];
    m[(1, 1)] = b[(0, 0)];
    m[(1, 3)] = b[(0, 1)];
    m[(3, 1)] = b[(1, 0)];
    m[(3, 3)] = b[(1, 1)];
    m
}

/// ‖MᵀJM − J‖_F.
pub fn symplectic_defect(m: &Mat4) -> f64 {
    let j = j4();
    (m.transpose() * j * m - j).norm()
}

/// Embeds a real matrix into complex arithmetic.
pub fn to_complex(m: &Mat4) -> CMat4 {
    m.map(|x| C64::new(x, 0.0))
}

/// A 4×4 matrix together with its measured symplectic defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    pub m: Mat4,
    pub defect: f64,
}

impl SymplecticMatrix {
    pub fn new(m: Mat4) -> Self {
        Self {
            defect: symplectic_defect(&m),
            m,
        }
    }

    /// True when the defect is within `tol`.
    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.defect <= tol
    }

    /// The two values x = λ + 1/λ attached to the reciprocal eigenvalue
    /// pairs, from the palindromic characteristic polynomial
    /// λ⁴ − aλ³ + bλ² − aλ + 1 via x² − a x + (b − 2) = 0.
    pub fn pair_sums(&self) -> [C64; 2] {
        let a = self.m.trace();
        let tr2 = (self.m * self.m).trace();
        let disc = 2.0 * tr2 - a * a + 8.0;
        let root = C64::new(disc, 0.0).sqrt();
        [(C64::new(a, 0.0) + root) * 0.5, (C64::new(a, 0.0) - root) * 0.5]
    }

    /// Discriminant 2 tr(M²) − tr(M)² + 8 of the pair-sum quadratic; negative
    /// exactly when the spectrum is a complex quadruplet off the unit circle.
    pub fn pair_discriminant(&self) -> f64 {
        let a = self.m.trace();
        2.0 * (self.m * self.m).trace() - a * a + 8.0
    }

    /// Eigenvalues with unit-circle flags at the given tolerance.
    pub fn spectrum(&self, unit_tol: f64) -> crate::Result<Spectrum4> {
        let mut s = eig4(&self.m)?;
        s.set_unit_tol(unit_tol);
        Ok(s)
    }
}

/// Four eigenvalues of a real 4×4 matrix, sorted by argument then modulus,
/// with per-eigenvalue unit-circle flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum4 {
    pub eigenvalues: [C64; 4],
    pub unit_flags: [bool; 4],
    pub unit_tol: f64,
}

impl Spectrum4 {
    pub fn new(mut eigenvalues: [C64; 4], unit_tol: f64) -> Self {
        eigenvalues.sort_by(|a, b| {
            a.arg()
                .partial_cmp(&b.arg())
                .unwrap()
                .then(a.norm().partial_cmp(&b.norm()).unwrap())
        });
        let mut s = Self {
            eigenvalues,
            unit_flags: [false; 4],
            unit_tol,
        };
        s.set_unit_tol(unit_tol);
        s
    }

    pub fn set_unit_tol(&mut self, tol: f64) {
        self.unit_tol = tol;
        for (flag, l) in self.unit_flags.iter_mut().zip(self.eigenvalues.iter()) {
            *flag = (l.norm() - 1.0).abs() <= tol;
        }
    }

    /// Largest modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    /// max | |λ| − 1 | over all eigenvalues.
    pub fn unit_margin(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| (l.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// True when every eigenvalue is flagged as lying on the unit circle.
    pub fn all_on_unit_circle(&self) -> bool {
        self.unit_flags.iter().all(|&f| f)
    }

    /// True when no eigenvalue lies on the unit circle.
    pub fn none_on_unit_circle(&self) -> bool {
        self.unit_flags.iter().all(|&f| !f)
    }

    /// Largest distance between the spectrum and its image under λ ↦ 1/λ̄,
    /// matching each eigenvalue to the closest image.
    pub fn reciprocal_pairing_defect(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| {
                let image = l.inv().conj();
                self.eigenvalues
                    .iter()
                    .map(|m| (m - image).norm() / (1.0 + image.norm()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

/// Matches two multisets of four complex numbers, returning the largest
/// relative distance |a − b| / max(1, |b|) under the best pairing.
pub fn multiset_distance(a: &[C64; 4], b: &[C64; 4]) -> f64 {
    let mut best = f64::INFINITY;
    let perms = permutations4();
    for p in perms.iter() {
        let d = (0..4)
            .map(|i| (a[i] - b[p[i]]).norm() / b[p[i]].norm().max(1.0))
            .fold(0.0, f64::max);
        best = best.min(d);
    }
    best
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    let mut ok = true;
                    for &x in p.iter() {
                        if seen[x] {
                            ok = false;
                        }
                        seen[x] = true;
                    }
                    if ok {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Singular values of a complex 4×4 matrix, descending.
pub fn singular_values(m: &CMat4) -> [f64; 4] {
    let sv = m.singular_values();
    let mut out = [sv[0], sv[1], sv[2], sv[3]];
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    out
}

/// Unit vector spanning the (approximate) kernel of a complex 4×4 matrix:
/// the right singular vector of the smallest singular value.
pub fn null_vector(m: &CMat4) -> (CVec4, f64) {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (idx, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let v = v_t.row(idx).adjoint();
    (CVec4::from_iterator(v.iter().copied()), smin)
}

/// Orthonormal basis (as columns) of the right singular vectors belonging to
/// the `k` smallest singular values of a real 4×4 matrix.
pub fn smallest_right_singular_vectors(m: &Mat4, k: usize) -> Vec<nalgebra::Vector4<f64>> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap()
    });
    idx.iter()
        .take(k)
        .map(|&i| v_t.row(i).transpose())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn phi_of_one_and_i() {
        assert_eq!(phi_embed(c(1.0, 0.0)), Mat2::identity());
        assert_eq!(phi_embed(c(0.0, 1.0)), j2());
    }

    #[test]
    fn psi_of_one_and_i() {
        assert_eq!(psi_embed(c(1.0, 0.0)), Mat2::new(1.0, 0.0, 0.0, -1.0));
        assert_eq!(psi_embed(c(0.0, 1.0)), Mat2::new(0.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn phi_product_matches_hand_multiplication() {
        let lhs = phi_embed(c(2.0, 3.0)) * phi_embed(c(1.0, -1.0));
        // (2+3i)(1−i) = 2 − 2i + 3i + 3 = 5 + i
        let expected = Mat2::new(5.0, -1.0, 1.0, 5.0);
        assert!((lhs - expected).norm() < 1e-15);
    }

    #[test]
    fn phi_psi_product_matches_hand_multiplication() {
        let z = c(1.0, 1.0);
        let w = c(2.0, -1.0);
        // Ψ(w) = [[2, −1], [−1, −2]], Φ(z) = [[1, −1], [1, 1]]
        let by_hand = Mat2::new(1.0, -1.0, 1.0, 1.0) * Mat2::new(2.0, -1.0, -1.0, -2.0);
        assert!((phi_embed(z) * psi_embed(w) - by_hand).norm() < 1e-15);
        assert!((by_hand - psi_embed(z * w)).norm() < 1e-14);
    }

    #[test]
    fn diamond_of_j2_is_j4() {
        assert_eq!(diamond(&j2(), &j2()), j4());
    }

    #[test]
    fn pair_sums_of_rotation_diamond() {
        let m = SymplecticMatrix::new(diamond(&rotation(0.7), &Mat2::new(2.0, 0.0, 0.0, 0.5)));
        let x = m.pair_sums();
        let mut re = [x[0].re, x[1].re];
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] - 2.0 * 0.7f64.cos()).abs() < 1e-14);
        assert!((re[1] - 2.5).abs() < 1e-14);
    }

    #[test]
    fn null_vector_of_rank_three_matrix() {
        let mut m = Mat4::identity();
        m[(2, 2)] = 0.0;
        let (v, s) = null_vector(&to_complex(&m));
        assert!(s < 1e-15);
        assert!((v[2].norm() - 1.0).abs() < 1e-14);
    }
}
