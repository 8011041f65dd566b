//! Nullities, Krein signatures and normal-form classification of 4×4
//! symplectic matrices.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, Vector4};
use serde::{Deserialize, Serialize};

use crate::numerics::{
    eig4, j4, smallest_right_singular_vectors, to_complex, CMat4, CVec4, Mat4, Spectrum4,
    SymplecticMatrix, C64, UNIT_CIRCLE_TOL,
};
use crate::{Error, Result};

/// Relative singular-value threshold used by [`nu_omega`].
pub const NU_TOL: f64 = 1e-9;
/// Distance |x ∓ 2| of a pair sum x = λ + 1/λ below which the pair is
/// treated as sitting at ±1.
pub const PM_TOL: f64 = 1e-8;
/// Eigenvalues closer than this are treated as one cluster.
pub const CLUSTER_TOL: f64 = 1e-5;
/// Relative threshold on σ₂(M ∓ I) separating ±I₂ from N₁ blocks.
const CLUSTER_SV_TOL: f64 = 1e-9;
/// Smallest accepted |v*(−iJ)v| before a Krein sign is declared unreliable.
const KREIN_FLOOR: f64 = 1e-8;

/// ν_ω(M) = dim ker(M − ωI), counting singular values σ ≤ 1e−9‖M‖.
pub fn nu_omega(m: &Mat4, omega: C64) -> usize {
    nu_omega_with_tol(m, omega, NU_TOL)
}

/// [`nu_omega`] with an explicit relative threshold.
pub fn nu_omega_with_tol(m: &Mat4, omega: C64, rel_tol: f64) -> usize {
    let shifted = to_complex(m) - CMat4::identity() * omega;
    let scale = m.norm().max(1.0);
    crate::numerics::singular_values(&shifted)
        .iter()
        .filter(|&&s| s <= rel_tol * scale)
        .count()
}

/// D_ω(M) = −ω̄² det(M − ωI); real for symplectic M and |ω| = 1.
pub fn d_omega(m: &Mat4, omega: C64) -> f64 {
    let shifted = to_complex(m) - CMat4::identity() * omega;
    let det = shifted.determinant();
    (-(omega.conj() * omega.conj()) * det).re
}

/// Numbers of positive and negative directions of the Krein form
/// v*(−iJ)v on an eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KreinSignature {
    pub positive: usize,
    pub negative: usize,
}

fn complex_singular_vectors(m: &CMat4, k: usize) -> (Vec<CVec4>, Vec<f64>) {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap()
    });
    let vecs = idx
        .iter()
        .take(k)
        .map(|&i| CVec4::from_iterator(v_t.row(i).adjoint().iter().copied()))
        .collect();
    let svals = idx.iter().map(|&i| svd.singular_values[i]).collect();
    (vecs, svals)
}

fn krein_gram(vs: &[CVec4]) -> nalgebra::DMatrix<C64> {
    let j = to_complex(&j4());
    let minus_i = C64::new(0.0, -1.0);
    let k = vs.len();
    nalgebra::DMatrix::from_fn(k, k, |a, b| (vs[a].adjoint() * (j * vs[b]))[(0, 0)] * minus_i)
}

/// Krein signature of the eigenspace of the unit, non-real eigenvalue
/// closest to `lambda`. Eigenvalues within [`CLUSTER_TOL`] of it are
/// treated together; a defective cluster is reported as an N₂-suspect error.
pub fn krein_signature(m: &Mat4, lambda: C64) -> Result<KreinSignature> {
    if (lambda.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Unsupported(format!(
            "eigenvalue {lambda} is not on the unit circle"
        )));
    }
    if lambda.im.abs() <= 1e-9 {
        return Err(Error::Unsupported(format!(
            "eigenvalue {lambda} is real; Krein signature needs a non-real eigenvalue"
        )));
    }
    let spectrum = eig4(m)?;
    let near: Vec<C64> = spectrum
        .eigenvalues
        .iter()
        .copied()
        .filter(|l| (l - lambda).norm() <= CLUSTER_TOL.max(1e-9))
        .collect();
    let k = near.len().max(1);
    let centre = if near.is_empty() {
        lambda
    } else {
        near.iter().sum::<C64>() / near.len() as f64
    };
    let shifted = to_complex(m) - CMat4::identity() * centre;
    let (vs, svals) = complex_singular_vectors(&shifted, k);
    let scale = m.norm().max(1.0);
    if svals[k - 1] > 1e-4 * scale {
        return Err(Error::Unsupported(format!(
            "N2-suspect: eigenvalue {centre} is defective (σ = {:e})",
            svals[k - 1]
        )));
    }
    let gram = krein_gram(&vs);
    let herm = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let eigs = herm.symmetric_eigenvalues();
    let mut sig = KreinSignature {
        positive: 0,
        negative: 0,
    };
    for &ev in eigs.iter() {
        if ev.abs() < KREIN_FLOOR {
            return Err(Error::Unsupported(format!(
                "N2-suspect: Krein form degenerate at {centre}"
            )));
        }
        if ev > 0.0 {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
    }
    Ok(sig)
}

/// Sign of the nilpotent part of an N₁(±1, b) block: the dominant
/// eigenvalue of the symmetric form wᵀ J (M ∓ I) w on the generalized
/// eigenspace. The form is invariant under symplectic conjugation.
fn n1_sign(m: &Mat4, at: f64) -> i8 {
    let shifted = m - Mat4::identity() * at;
    let sq = shifted * shifted;
    let w: Vec<Vector4<f64>> = smallest_right_singular_vectors(&sq, 2);
    let j = j4();
    let mut f = Matrix2::<f64>::zeros();
    for a in 0..2 {
        for b in 0..2 {
            f[(a, b)] = (w[a].transpose() * j * shifted * w[b])[(0, 0)];
        }
    }
    let sym = (f + f.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let dominant = if eig[0].abs() >= eig[1].abs() {
        eig[0]
    } else {
        eig[1]
    };
    let scale = m.norm().max(1.0);
    if dominant.abs() <= 1e-9 * scale {
        0
    } else if dominant > 0.0 {
        1
    } else {
        -1
    }
}

/// One reciprocal eigenvalue pair of a 4×4 symplectic matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairKind {
    /// e^{±iα}, α ∈ (0, π), with the Krein sign of e^{iα}.
    Unit { alpha: f64, krein: i8 },
    /// Real pair (λ, 1/λ) with λ > 1.
    PositiveReal { lambda: f64 },
    /// Real pair (λ, 1/λ) with λ < −1.
    NegativeReal { lambda: f64 },
    /// Double eigenvalue 1: semisimple (b = 0 reported as identity) or N₁(1, b).
    AtOne { semisimple: bool, b: i8 },
    /// Double eigenvalue −1: semisimple or N₁(−1, a).
    AtMinusOne { semisimple: bool, a: i8 },
}

impl PairKind {
    /// R(θ) angle of a unit pair: α for Krein-positive e^{iα}, 2π − α otherwise.
    pub fn rotation_angle(&self) -> Option<f64> {
        match *self {
            PairKind::Unit { alpha, krein } => Some(if krein > 0 { alpha } else { 2.0 * PI - alpha }),
            _ => None,
        }
    }
}

/// Basic normal-form product a 4×4 symplectic matrix is conjugate to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum NormalFormTag {
    IdentityD2,
    N1PlusD2 { b: i8 },
    RotationD2 { theta: f64 },
    MinusIdentityD2,
    N1MinusD2 { a: i8 },
    DMinus2D2,
    RotationRotation { theta1: f64, theta2: f64 },
    RotationDMinus2 { theta: f64 },
    Hyperbolic,
    ComplexSaddle,
    N2Suspect { reason: String },
    Composite { label: String },
}

impl NormalFormTag {
    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            NormalFormTag::IdentityD2 => "I2⋄D(2)".into(),
            NormalFormTag::N1PlusD2 { b } => format!("N1(1,{b})⋄D(2)"),
            NormalFormTag::RotationD2 { theta } => format!("R({theta:.6})⋄D(2)"),
            NormalFormTag::MinusIdentityD2 => "−I2⋄D(2)".into(),
            NormalFormTag::N1MinusD2 { a } => format!("N1(−1,{a})⋄D(2)"),
            NormalFormTag::DMinus2D2 => "D(−2)⋄D(2)".into(),
            NormalFormTag::RotationRotation { theta1, theta2 } => {
                format!("R({theta1:.6})⋄R({theta2:.6})")
            }
            NormalFormTag::RotationDMinus2 { theta } => format!("R({theta:.6})⋄D(−2)"),
            NormalFormTag::Hyperbolic => "hyperbolic".into(),
            NormalFormTag::ComplexSaddle => "complex-saddle".into(),
            NormalFormTag::N2Suspect { reason } => format!("N2-suspect ({reason})"),
            NormalFormTag::Composite { label } => label.clone(),
        }
    }

    /// True when the spectrum avoids the unit circle.
    pub fn is_hyperbolic(&self) -> bool {
        matches!(
            self,
            NormalFormTag::Hyperbolic | NormalFormTag::ComplexSaddle | NormalFormTag::DMinus2D2
        )
    }
}

impl fmt::Display for NormalFormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Linear stability verdict attached to a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    StronglyStable,
    Unstable,
    Hyperbolic,
    Boundary,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::StronglyStable => "strongly-stable",
            Verdict::Unstable => "unstable",
            Verdict::Hyperbolic => "hyperbolic",
            Verdict::Boundary => "boundary",
        }
    }
}

/// Result of [`classify_normal_form`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub tag: NormalFormTag,
    pub verdict: Verdict,
    /// Pair decomposition; empty for complex saddles and unresolved clusters.
    pub pairs: Vec<PairKind>,
    pub spectrum: Spectrum4,
    pub nu_plus_one: usize,
    pub nu_minus_one: usize,
}

fn classify_pair(m: &Mat4, x: f64, whole_cluster_sig: Option<KreinSignature>) -> Result<PairKind> {
    if (x - 2.0).abs() <= PM_TOL {
        let (semisimple, b) = cluster_at(m, 1.0);
        return Ok(PairKind::AtOne { semisimple, b });
    }
    if (x + 2.0).abs() <= PM_TOL {
        let (semisimple, a) = cluster_at(m, -1.0);
        return Ok(PairKind::AtMinusOne { semisimple, a });
    }
    if x > 2.0 {
        let lambda = 0.5 * (x + (x * x - 4.0).sqrt());
        return Ok(PairKind::PositiveReal { lambda });
    }
    if x < -2.0 {
        let lambda = 0.5 * (x - (x * x - 4.0).sqrt());
        return Ok(PairKind::NegativeReal { lambda });
    }
    let alpha = (0.5 * x).clamp(-1.0, 1.0).acos();
    let krein = match whole_cluster_sig {
        Some(sig) => {
            if sig.negative == 0 {
                1
            } else if sig.positive == 0 {
                -1
            } else {
                return Err(Error::Unsupported(
                    "Krein collision of mixed signature".into(),
                ));
            }
        }
        None => {
            let sig = krein_signature(m, C64::from_polar(1.0, alpha))?;
            if sig.positive > 0 {
                1
            } else {
                -1
            }
        }
    };
    Ok(PairKind::Unit { alpha, krein })
}

/// (semisimple, sign of the nilpotent part) of the double eigenvalue `at` = ±1.
fn cluster_at(m: &Mat4, at: f64) -> (bool, i8) {
    let shifted = m - Mat4::identity() * at;
    let sv = shifted.singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = m.norm().max(1.0);
    if s[1] <= CLUSTER_SV_TOL * scale {
        (true, 0)
    } else {
        let sign = n1_sign(m, at);
        (sign == 0, sign)
    }
}

fn tag_from_pairs(p: &PairKind, q: &PairKind) -> NormalFormTag {
    use PairKind::*;
    let (a, b) = order_pairs(p, q);
    match (a, b) {
        (AtOne { semisimple: true, .. }, PositiveReal { .. }) => NormalFormTag::IdentityD2,
        (AtOne { b, .. }, PositiveReal { .. }) => NormalFormTag::N1PlusD2 { b: *b },
        (Unit { .. }, PositiveReal { .. }) => NormalFormTag::RotationD2 {
            theta: a.rotation_angle().unwrap(),
        },
        (AtMinusOne { semisimple: true, .. }, PositiveReal { .. }) => {
            NormalFormTag::MinusIdentityD2
        }
        (AtMinusOne { a, .. }, PositiveReal { .. }) => NormalFormTag::N1MinusD2 { a: *a },
        (NegativeReal { .. }, PositiveReal { .. }) => NormalFormTag::DMinus2D2,
        (PositiveReal { .. }, PositiveReal { .. }) | (NegativeReal { .. }, NegativeReal { .. }) => {
            NormalFormTag::Hyperbolic
        }
        (Unit { .. }, Unit { .. }) => {
            let t1 = a.rotation_angle().unwrap();
            let t2 = b.rotation_angle().unwrap();
            NormalFormTag::RotationRotation {
                theta1: t1.min(t2),
                theta2: t1.max(t2),
            }
        }
        (Unit { .. }, NegativeReal { .. }) => NormalFormTag::RotationDMinus2 {
            theta: a.rotation_angle().unwrap(),
        },
        _ => NormalFormTag::Composite {
            label: format!("{}⋄{}", pair_label(a), pair_label(b)),
        },
    }
}

fn rank(p: &PairKind) -> u8 {
    match p {
        PairKind::AtOne { .. } => 0,
        PairKind::AtMinusOne { .. } => 1,
        PairKind::Unit { .. } => 2,
        PairKind::NegativeReal { .. } => 3,
        PairKind::PositiveReal { .. } => 4,
    }
}

fn order_pairs<'a>(p: &'a PairKind, q: &'a PairKind) -> (&'a PairKind, &'a PairKind) {
    if rank(p) <= rank(q) {
        (p, q)
    } else {
        (q, p)
    }
}

fn pair_label(p: &PairKind) -> String {
    match *p {
        PairKind::AtOne { semisimple: true, .. } => "I2".into(),
        PairKind::AtOne { b, .. } => format!("N1(1,{b})"),
        PairKind::AtMinusOne { semisimple: true, .. } => "−I2".into(),
        PairKind::AtMinusOne { a, .. } => format!("N1(−1,{a})"),
        PairKind::Unit { .. } => format!("R({:.6})", p.rotation_angle().unwrap()),
        PairKind::NegativeReal { lambda } => format!("D({lambda:.6})"),
        PairKind::PositiveReal { lambda } => format!("D({lambda:.6})"),
    }
}

fn verdict_from_pairs(pairs: &[PairKind]) -> Verdict {
    let off_circle = pairs
        .iter()
        .filter(|p| matches!(p, PairKind::PositiveReal { .. } | PairKind::NegativeReal { .. }))
        .count();
    if off_circle == pairs.len() {
        return Verdict::Hyperbolic;
    }
    if off_circle > 0 {
        return Verdict::Unstable;
    }
    if pairs.iter().all(|p| matches!(p, PairKind::Unit { .. })) {
        if let [PairKind::Unit { alpha: a1, krein: k1 }, PairKind::Unit { alpha: a2, krein: k2 }] =
            pairs
        {
            if (a1 - a2).abs() <= CLUSTER_TOL && k1 != k2 {
                return Verdict::Boundary;
            }
        }
        return Verdict::StronglyStable;
    }
    Verdict::Boundary
}

/// Classifies a symplectic 4×4 matrix into a product of basic normal forms
/// together with a stability verdict.
///
/// The reciprocal pairs are read from the pair sums x = λ + 1/λ. Pairs with
/// x within [`PM_TOL`] of ±2 are resolved into ±I₂ or N₁ blocks by the rank
/// of M ∓ I and the sign of the nilpotent part; unit pairs carry the Krein
/// sign of their upper-half eigenvalue. Colliding unit pairs of mixed Krein
/// type and defective clusters are reported as N₂-suspect, never guessed.
pub fn classify_normal_form(sm: &SymplecticMatrix) -> Result<NormalForm> {
    let m = sm.m;
    let spectrum = sm.spectrum(UNIT_CIRCLE_TOL)?;
    let nu_plus_one = nu_omega(&m, C64::new(1.0, 0.0));
    let nu_minus_one = nu_omega(&m, C64::new(-1.0, 0.0));
    let make = |tag: NormalFormTag, verdict: Verdict, pairs: Vec<PairKind>| NormalForm {
        tag,
        verdict,
        pairs,
        spectrum,
        nu_plus_one,
        nu_minus_one,
    };
    let disc = sm.pair_discriminant();
    let xs = sm.pair_sums();
    let collision_scale = 1e-9 * (1.0 + xs[0].norm().powi(2));
    if disc < -collision_scale {
        return Ok(make(NormalFormTag::ComplexSaddle, Verdict::Hyperbolic, vec![]));
    }
    let x1 = xs[0].re;
    let x2 = xs[1].re;
    if disc.abs() <= collision_scale {
        let x = 0.5 * (x1 + x2);
        if (x - 2.0).abs() <= 1e-6 || (x + 2.0).abs() <= 1e-6 {
            let at = if x > 0.0 { 1.0 } else { -1.0 };
            let nu = if at > 0.0 { nu_plus_one } else { nu_minus_one };
            let label = format!(
                "four-fold eigenvalue {at} with ν = {nu}",
            );
            return Ok(make(
                NormalFormTag::Composite { label },
                Verdict::Boundary,
                vec![],
            ));
        }
        if x.abs() < 2.0 {
            let alpha = (0.5 * x).acos();
            return match krein_signature(&m, C64::from_polar(1.0, alpha)) {
                Ok(sig) if sig.positive + sig.negative == 2 => {
                    let p = classify_pair(&m, x, Some(sig));
                    match p {
                        Ok(p) => {
                            let pairs = vec![p, p];
                            let tag = tag_from_pairs(&p, &p);
                            let verdict = verdict_from_pairs(&pairs);
                            Ok(make(tag, verdict, pairs))
                        }
                        Err(e) => Ok(make(
                            NormalFormTag::N2Suspect {
                                reason: e.to_string(),
                            },
                            Verdict::Boundary,
                            vec![],
                        )),
                    }
                }
                Ok(_) | Err(_) => Ok(make(
                    NormalFormTag::N2Suspect {
                        reason: format!("defective unit eigenvalue at angle {alpha:.9}"),
                    },
                    Verdict::Boundary,
                    vec![],
                )),
            };
        }
    }
    let mut pairs = Vec::with_capacity(2);
    for x in [x1, x2] {
        match classify_pair(&m, x, None) {
            Ok(p) => pairs.push(p),
            Err(e) => {
                return Ok(make(
                    NormalFormTag::N2Suspect {
                        reason: e.to_string(),
                    },
                    Verdict::Boundary,
                    vec![],
                ))
            }
        }
    }
    let tag = tag_from_pairs(&pairs[0], &pairs[1]);
    let verdict = verdict_from_pairs(&pairs);
    Ok(make(tag, verdict, pairs))
}

/// Splitting numbers (S⁺, S⁻) at a unit ω carried by one pair.
fn pair_splitting(p: &PairKind, psi: f64) -> (i64, i64) {
    match *p {
        PairKind::AtOne { semisimple, b } if psi == 0.0 => {
            if semisimple || b >= 0 {
                (1, 1)
            } else {
                (0, 0)
            }
        }
        PairKind::AtMinusOne { semisimple, a } if (psi - PI).abs() < 1e-12 => {
            if semisimple || a <= 0 {
                (1, 1)
            } else {
                (0, 0)
            }
        }
        PairKind::Unit { alpha, krein } if (alpha - psi).abs() <= 1e-9 => {
            if krein > 0 {
                (0, 1)
            } else {
                (1, 0)
            }
        }
        _ => (0, 0),
    }
}

/// ω-indices from i₁ and the splitting numbers of the normal form:
/// i_ω = i₁ + S⁺(1) + Σ_{0<arg λ<arg ω} (S⁺(λ) − S⁻(λ)) − S⁻(ω),
/// with arg ω folded into [0, π] (i_ω = i_ω̄).
pub fn index_via_splitting(m: &SymplecticMatrix, i1: usize, omegas: &[C64]) -> Result<Vec<i64>> {
    let nf = classify_normal_form(m)?;
    if nf.pairs.is_empty() && !matches!(nf.tag, NormalFormTag::ComplexSaddle) {
        return Err(Error::Unsupported(format!(
            "no splitting table for {}",
            nf.tag.label()
        )));
    }
    let pairs = nf.pairs;
    let s_plus_one: i64 = pairs.iter().map(|p| pair_splitting(p, 0.0).0).sum();
    Ok(omegas
        .iter()
        .map(|w| {
            let psi = w.arg().abs();
            if psi == 0.0 {
                return i1 as i64;
            }
            let mut total = i1 as i64 + s_plus_one;
            for p in pairs.iter() {
                if let PairKind::Unit { alpha, krein } = *p {
                    if alpha < psi - 1e-9 {
                        total += if krein > 0 { -1 } else { 1 };
                    }
                }
            }
            let s_minus_omega: i64 = pairs
                .iter()
                .map(|p| {
                    if (psi - PI).abs() < 1e-12 {
                        pair_splitting(p, PI).1
                    } else {
                        pair_splitting(p, psi).1
                    }
                })
                .sum();
            total - s_minus_omega
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diamond, rotation};
    use nalgebra::Matrix2;

    fn d(l: f64) -> Matrix2<f64> {
        Matrix2::new(l, 0.0, 0.0, 1.0 / l)
    }

    fn n1(l: f64, b: f64) -> Matrix2<f64> {
        Matrix2::new(l, b, 0.0, l)
    }

    fn sm(a: Matrix2<f64>, b: Matrix2<f64>) -> SymplecticMatrix {
        SymplecticMatrix::new(diamond(&a, &b))
    }

    /// A fixed symplectic change of basis to make the tests basis-independent.
    fn conjugator() -> Mat4 {
        // (I, 0; S, I) with S symmetric composed with diag(A, A^{-T}).
        let mut lower = Mat4::identity();
        lower[(2, 0)] = 0.2;
        lower[(2, 1)] = 0.5;
        lower[(3, 0)] = 0.5;
        lower[(3, 1)] = -0.4;
        let a = Matrix2::new(1.0, 0.3, 0.0, 1.0);
        let a_inv_t = a.try_inverse().unwrap().transpose();
        let mut block = Mat4::zeros();
        block.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        block.fixed_view_mut::<2, 2>(2, 2).copy_from(&a_inv_t);
        lower * block
    }

    fn conj(m: &SymplecticMatrix) -> SymplecticMatrix {
        let p = conjugator();
        assert!(crate::numerics::symplectic_defect(&p) < 1e-12);
        SymplecticMatrix::new(p * m.m * p.try_inverse().unwrap())
    }

    #[test]
    fn nullity_and_determinant_of_identity() {
        let i = Mat4::identity();
        assert_eq!(nu_omega(&i, C64::new(1.0, 0.0)), 4);
        assert_eq!(nu_omega(&i, C64::new(-1.0, 0.0)), 0);
        assert!((d_omega(&i, C64::new(-1.0, 0.0)) + 16.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_krein_positive() {
        let theta = 1.1;
        let m = diamond(&rotation(theta), &d(2.0));
        let sig = krein_signature(&m, C64::from_polar(1.0, theta)).unwrap();
        assert_eq!(sig, KreinSignature { positive: 1, negative: 0 });
        let sig = krein_signature(&m, C64::from_polar(1.0, -theta)).unwrap();
        assert_eq!(sig, KreinSignature { positive: 0, negative: 1 });
        let h = diamond(&d(2.0), &d(3.0));
        assert!(krein_signature(&h, C64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn classifies_basic_products() {
        let cases: Vec<(SymplecticMatrix, &str)> = vec![
            (sm(Matrix2::identity(), d(2.0)), "I2⋄D(2)"),
            (sm(-Matrix2::identity(), d(2.0)), "−I2⋄D(2)"),
            (sm(n1(1.0, 1.0), d(2.0)), "N1(1,1)⋄D(2)"),
            (sm(n1(1.0, -1.0), d(2.0)), "N1(1,-1)⋄D(2)"),
            (sm(n1(-1.0, 1.0), d(2.0)), "N1(−1,1)⋄D(2)"),
            (sm(n1(-1.0, -1.0), d(2.0)), "N1(−1,-1)⋄D(2)"),
            (sm(d(-2.0), d(2.0)), "D(−2)⋄D(2)"),
            (sm(d(3.0), d(2.0)), "hyperbolic"),
        ];
        for (m, label) in cases {
            assert_eq!(classify_normal_form(&m).unwrap().tag.label(), label);
            assert_eq!(classify_normal_form(&conj(&m)).unwrap().tag.label(), label);
        }
    }

    #[test]
    fn rotation_angles_follow_krein_type() {
        for theta in [0.7, 2.5, 3.9, 5.6] {
            let m = sm(rotation(theta), d(2.0));
            for mm in [m, conj(&m)] {
                match classify_normal_form(&mm).unwrap().tag {
                    NormalFormTag::RotationD2 { theta: t } => assert!((t - theta).abs() < 1e-9),
                    other => panic!("unexpected {other:?}"),
                }
            }
        }
        let m = sm(rotation(4.0), rotation(5.0));
        let nf = classify_normal_form(&conj(&m)).unwrap();
        assert_eq!(nf.verdict, Verdict::StronglyStable);
        match nf.tag {
            NormalFormTag::RotationRotation { theta1, theta2 } => {
                assert!((theta1 - 4.0).abs() < 1e-9 && (theta2 - 5.0).abs() < 1e-9)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_saddle_and_krein_collisions() {
        // R(θ)⋄R(2π−θ) has a double eigenvalue of mixed Krein type.
        let m = sm(rotation(1.0), rotation(2.0 * PI - 1.0));
        let nf = classify_normal_form(&m).unwrap();
        assert!(matches!(nf.tag, NormalFormTag::N2Suspect { .. }), "{:?}", nf.tag);
        // Same-type collision stays strongly stable.
        let m = sm(rotation(1.0), rotation(1.0));
        let nf = classify_normal_form(&m).unwrap();
        assert_eq!(nf.verdict, Verdict::StronglyStable);
        // Complex quadruplet: D(2) twisted by a rotation inside Sp(4).
        let r = rotation(0.8) * 2.0;
        let mut m = Mat4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&r);
        m.fixed_view_mut::<2, 2>(2, 2)
            .copy_from(&r.try_inverse().unwrap().transpose());
        let nf = classify_normal_form(&SymplecticMatrix::new(m)).unwrap();
        assert_eq!(nf.tag, NormalFormTag::ComplexSaddle);
        assert!(nf.tag.is_hyperbolic());
    }

    #[test]
    fn splitting_indices_of_rotation() {
        // R(θ)⋄D(2) with θ ∈ (0, π): i₋₁ = i₁ − 1.
        let m = sm(rotation(1.2), d(2.0));
        let w = [C64::new(-1.0, 0.0), C64::from_polar(1.0, 0.5), C64::from_polar(1.0, 2.0)];
        let idx = index_via_splitting(&m, 3, &w).unwrap();
        assert_eq!(idx, vec![2, 3, 2]);
        // θ ∈ (π, 2π): i₋₁ = i₁ + 1.
        let m = sm(rotation(5.0), d(2.0));
        let idx = index_via_splitting(&m, 0, &w).unwrap();
        assert_eq!(idx, vec![1, 0, 1]);
        // Hyperbolic: constant in ω.
        let m = sm(d(3.0), d(2.0));
        let idx = index_via_splitting(&m, 2, &w).unwrap();
        assert_eq!(idx, vec![2, 2, 2]);
    }
}
