use super::{Mat4, Spectrum4, C64, UNIT_CIRCLE_TOL};
use crate::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a real 4×4 matrix by balancing, Householder reduction to
/// Hessenberg form and shifted complex QR iteration.
pub fn eig4(m: &Mat4) -> Result<Spectrum4> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutOfRange("matrix has non-finite entries".into()));
    }
    let mut a = [[0.0f64; 4]; 4];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m[(i, j)];
        }
    }
    let vals = hessenberg_eigenvalues(&mut a)?;
    Ok(Spectrum4::new(vals, UNIT_CIRCLE_TOL))
}

/// Eigenvalues of a real square array; the array is overwritten.
pub fn hessenberg_eigenvalues<const N: usize>(a: &mut [[f64; N]; N]) -> Result<[C64; N]> {
    balance(a);
    reduce_to_hessenberg(a);
    let mut h = [[C64::new(0.0, 0.0); N]; N];
    for i in 0..N {
        for j in 0..N {
            h[i][j] = C64::new(a[i][j], 0.0);
        }
    }
    complex_qr(&mut h)
}

/// Parlett–Reinsch balancing with powers of two.
fn balance<const N: usize>(a: &mut [[f64; N]; N]) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..N {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..N {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..N {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Householder similarity reduction to upper Hessenberg form.
fn reduce_to_hessenberg<const N: usize>(a: &mut [[f64; N]; N]) {
    for k in 0..N.saturating_sub(2) {
        let alpha: f64 = (k + 1..N).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let sign = if a[k + 1][k] >= 0.0 { 1.0 } else { -1.0 };
        let mut v = [0.0; N];
        v[k + 1] = a[k + 1][k] + sign * alpha;
        for i in k + 2..N {
            v[i] = a[i][k];
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A ← (I − 2vvᵀ/vᵀv) A (I − 2vvᵀ/vᵀv)
        for j in 0..N {
            let s: f64 = (k + 1..N).map(|i| v[i] * a[i][j]).sum::<f64>() * 2.0 / vnorm2;
            for i in k + 1..N {
                a[i][j] -= s * v[i];
            }
        }
        for row in a.iter_mut() {
            let s: f64 = (k + 1..N).map(|j| row[j] * v[j]).sum::<f64>() * 2.0 / vnorm2;
            for j in k + 1..N {
                row[j] -= s * v[j];
            }
        }
        for i in k + 2..N {
            a[i][k] = 0.0;
        }
    }
}

/// Givens rotation (c, s) with real c such that
/// [[c, s], [−s̄, c]] · (x, y)ᵀ = (r, 0)ᵀ.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    let phase = x / ax;
    (ax / r, phase * y.conj() / r)
}

/// Shifted QR iteration on a complex upper Hessenberg matrix.
fn complex_qr<const N: usize>(h: &mut [[C64; N]; N]) -> Result<[C64; N]> {
    let zero = C64::new(0.0, 0.0);
    let mut out = [zero; N];
    if N == 0 {
        return Ok(out);
    }
    let mut hi = N - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let cap = MAX_SWEEPS_PER_EIGENVALUE * N;
    loop {
        if hi == 0 {
            out[0] = h[0][0];
            break;
        }
        // Find the start of the active unreduced block.
        let mut l = hi;
        while l > 0 {
            let s = h[l][l].norm() + h[l - 1][l - 1].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[l][l - 1].norm() <= f64::EPSILON * s {
                h[l][l - 1] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h[hi][hi];
            hi -= 1;
            iter = 0;
            continue;
        }
        if total >= cap {
            return Err(Error::NoConvergence(cap));
        }
        iter += 1;
        total += 1;
        let shift = if iter % 11 == 10 {
            h[hi][hi] + C64::new(h[hi][hi - 1].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        for i in l..=hi {
            h[i][i] -= shift;
        }
        let mut rots = [(1.0, zero); N];
        for k in l..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            rots[k] = (c, s);
            for j in k..N {
                let x = h[k][j];
                let y = h[k + 1][j];
                h[k][j] = x * c + s * y;
                h[k + 1][j] = -s.conj() * x + y * c;
            }
        }
        for k in l..hi {
            let (c, s) = rots[k];
            let top = (k + 2).min(hi);
            for row in h.iter_mut().take(top + 1) {
                let u = row[k];
                let v = row[k + 1];
                row[k] = u * c + v * s.conj();
                row[k + 1] = -u * s + v * c;
            }
        }
        for i in l..=hi {
            h[i][i] += shift;
        }
    }
    Ok(out)
}

/// Eigenvalue of [[a, b], [c, d]] closest to d.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = d - (b * c) / (half + disc);
    let mu2 = d - (b * c) / (half - disc);
    let pick = |m: C64| (m - d).norm();
    let candidates = [mu1, mu2];
    let best = candidates
        .iter()
        .filter(|m| m.re.is_finite() && m.im.is_finite())
        .min_by(|x, y| pick(**x).partial_cmp(&pick(**y)).unwrap());
    *best.unwrap_or(&d)
}

/// Roots of c₀ + c₁λ + c₂λ² + c₃λ³ + c₄λ⁴. Biquadratic polynomials
/// (c₁ = c₃ = 0) are solved in closed form through α = λ²; other quartics
/// through the eigenvalues of the companion matrix.
pub fn quartic_roots(c: [f64; 5]) -> Result<[C64; 4]> {
    let [c0, c1, c2, c3, c4] = c;
    if c4 == 0.0 || !c4.is_finite() {
        return Err(Error::DegenerateLeading);
    }
    if c1 == 0.0 && c3 == 0.0 {
        let (a, b, cc) = (c4, c2, c0);
        let disc = C64::new(b * b - 4.0 * a * cc, 0.0).sqrt();
        let q = if b >= 0.0 {
            -(C64::new(b, 0.0) + disc) * 0.5
        } else {
            -(C64::new(b, 0.0) - disc) * 0.5
        };
        let (alpha1, alpha2) = if q.norm() == 0.0 {
            (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        } else {
            (q / a, C64::new(cc, 0.0) / q)
        };
        let r1 = alpha1.sqrt();
        let r2 = alpha2.sqrt();
        return Ok([r1, -r1, r2, -r2]);
    }
    let mut comp = [[0.0f64; 4]; 4];
    let coeffs = [c0 / c4, c1 / c4, c2 / c4, c3 / c4];
    for (j, &k) in coeffs.iter().enumerate() {
        comp[0][3 - j] = -k;
    }
    for i in 1..4 {
        comp[i][i - 1] = 1.0;
    }
    hessenberg_eigenvalues(&mut comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{multiset_distance, Mat4};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn poly(coeffs: [f64; 5], x: C64) -> C64 {
        coeffs
            .iter()
            .rev()
            .fold(c(0.0, 0.0), |acc, &k| acc * x + k)
    }

    #[test]
    fn identity_spectrum() {
        let s = eig4(&Mat4::identity()).unwrap();
        for l in s.eigenvalues {
            assert!((l - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn diagonal_spectrum() {
        let m = Mat4::from_diagonal(&nalgebra::Vector4::new(2.0, 0.5, -3.0, -1.0 / 3.0));
        let s = eig4(&m).unwrap();
        let want = [c(2.0, 0.0), c(0.5, 0.0), c(-3.0, 0.0), c(-1.0 / 3.0, 0.0)];
        assert!(multiset_distance(&s.eigenvalues, &want) < 1e-14);
    }

    #[test]
    fn companion_of_nonconvex_polynomial() {
        // λ⁴ − (β̃+1)/2 λ² − 3β̃(β̃+3)/2 at β̃ = 1: λ⁴ − λ² − 6 = (λ² − 3)(λ² + 2).
        let coeffs = [-6.0, 0.0, -1.0, 0.0, 1.0];
        let mut comp = [[0.0; 4]; 4];
        comp[0] = [0.0, 1.0, 0.0, 6.0];
        comp[1][0] = 1.0;
        comp[2][1] = 1.0;
        comp[3][2] = 1.0;
        let vals = hessenberg_eigenvalues(&mut comp).unwrap();
        let s3 = 3f64.sqrt();
        let s2 = 2f64.sqrt();
        let want = [c(s3, 0.0), c(-s3, 0.0), c(0.0, s2), c(0.0, -s2)];
        assert!(multiset_distance(&vals, &want) < 1e-13);
        for v in vals {
            assert!(poly(coeffs, v).norm() < 1e-12);
        }
    }

    #[test]
    fn quartic_roots_of_lambda4_minus_one() {
        let r = quartic_roots([-1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let want = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        assert!(multiset_distance(&r, &want) < 1e-15);
    }

    #[test]
    fn quartic_roots_general_path() {
        // (λ−1)(λ−2)(λ+3)(λ−0.5)
        let coeffs = [-3.0, 9.5, -7.0, -0.5, 1.0];
        let r = quartic_roots(coeffs).unwrap();
        let want = [c(1.0, 0.0), c(2.0, 0.0), c(-3.0, 0.0), c(0.5, 0.0)];
        assert!(multiset_distance(&r, &want) < 1e-12);
    }

    #[test]
    fn quartic_roots_rejects_zero_leading() {
        assert_eq!(
            quartic_roots([1.0, 0.0, 0.0, 0.0, 0.0]),
            Err(Error::DegenerateLeading)
        );
    }

    #[test]
    fn rotation_blocks_give_unit_eigenvalues() {
        let m = crate::numerics::diamond(
            &crate::numerics::rotation(1.1),
            &crate::numerics::rotation(-2.3),
        );
        let s = eig4(&m).unwrap();
        assert!(s.all_on_unit_circle());
        let want = [
            C64::from_polar(1.0, 1.1),
            C64::from_polar(1.0, -1.1),
            C64::from_polar(1.0, 2.3),
            C64::from_polar(1.0, -2.3),
        ];
        assert!(multiset_distance(&s.eigenvalues, &want) < 1e-14);
    }
}
