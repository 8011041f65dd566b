//! Degenerate curves in the (β, e) rectangle, the convex boundaries
//! β_l ≤ β_m ≤ β_r, region maps and ordering checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::index::normal_form::PM_TOL;
use crate::index::{
    class_indicator, classify_normal_form, d_omega, nu_omega, NormalFormTag, SymmetryClass, Verdict,
};
use crate::numerics::{SymplecticMatrix, C64};
use crate::systems::{monodromy, Family, BETA_MAX};
use crate::{Error, Result};

/// Integration tolerance used inside root finding.
pub const CURVE_TOL: f64 = 1e-12;
/// Width at which bisection stops.
pub const ROOT_WIDTH: f64 = 1e-10;
/// Default e grid: 0 to 0.95 in steps of 0.05.
pub fn default_e_grid() -> Vec<f64> {
    (0..=19).map(|k| k as f64 * 0.05).collect()
}

/// β̂_θ = (θ² − 9 + √(25θ⁴ − 6θ² + 81)) / 6: the circular non-convex
/// parameter at which e^{2πiθ} is a multiplier (θ = n for ω = 1,
/// θ = n + 1/2 for ω = −1).
pub fn circular_degenerate_point(theta: f64) -> f64 {
    let t2 = theta * theta;
    (t2 - 9.0 + (25.0 * t2 * t2 - 6.0 * t2 + 81.0).sqrt()) / 6.0
}

/// Circular convex −1-degenerate point β* = (1331 − 35√1297)/288.
pub fn convex_minus_one_point() -> f64 {
    (1331.0 - 35.0 * 1297f64.sqrt()) / 288.0
}

/// Circular convex hyperbolic onset β** = 16(182 − 37√21)/625.
pub fn convex_hyperbolic_onset() -> f64 {
    16.0 * (182.0 - 37.0 * 21f64.sqrt()) / 625.0
}

pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn indicator(family: Family, p: f64, e: f64, plus: bool, class: SymmetryClass) -> Result<f64> {
    class_indicator(&family.system(p, e)?, plus, class, CURVE_TOL)
}

/// Bisection on a sign change of `f` in [a, b]; returns (root, final width).
fn bisect<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    width: f64,
) -> Result<(f64, f64)> {
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok((m, 0.0));
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b), b - a))
}

/// Sign changes of `f` on a uniform grid of `pieces` cells over [lo, hi],
/// each refined by bisection.
fn scan_roots<F: Fn(f64) -> Result<f64>>(
    f: &F,
    lo: f64,
    hi: f64,
    pieces: usize,
) -> Result<Vec<(f64, f64)>> {
    let xs: Vec<f64> = (0..=pieces)
        .map(|k| lo + (hi - lo) * k as f64 / pieces as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for k in 0..pieces {
        if vals[k] == 0.0 {
            roots.push((xs[k], 0.0));
        } else if (vals[k] < 0.0) != (vals[k + 1] < 0.0) && vals[k + 1] != 0.0 {
            roots.push(bisect(f, xs[k], xs[k + 1], vals[k], ROOT_WIDTH)?);
        }
    }
    if vals[pieces] == 0.0 {
        roots.push((xs[pieces], 0.0));
    }
    Ok(roots)
}

/// A certified degenerate parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateRoot {
    pub beta: f64,
    /// Final bracket width of the bisection.
    pub bracket: f64,
    /// ν_ω of the monodromy at the root.
    pub nu: usize,
    /// Symmetry classes whose indicators vanish here (empty for generic ω).
    pub classes: Vec<SymmetryClass>,
}

/// Finds the ω-degenerate parameters of a family in `bracket` at
/// eccentricity `e`. For ω = ±1 each symmetry-class indicator is scanned
/// for sign changes and bisected, and roots of the two classes closer than
/// 1e−7 are merged; for other ω the real function D_ω is bisected. Each root
/// carries ν_ω of the monodromy as certificate.
pub fn find_degenerate(
    family: Family,
    omega: C64,
    e: f64,
    bracket: (f64, f64),
) -> Result<Vec<DegenerateRoot>> {
    let (lo, hi) = bracket;
    let pieces = (((hi - lo) / 0.01).ceil() as usize).clamp(16, 2000);
    let mut found: Vec<DegenerateRoot> = Vec::new();
    let plus = (omega - C64::new(1.0, 0.0)).norm() < 1e-14;
    let minus = (omega + C64::new(1.0, 0.0)).norm() < 1e-14;
    if plus || minus {
        for class in [SymmetryClass::Even, SymmetryClass::Odd] {
            let f = |p: f64| indicator(family, p, e, plus, class);
            for (beta, width) in scan_roots(&f, lo, hi, pieces)? {
                if let Some(r) = found.iter_mut().find(|r| (r.beta - beta).abs() < 1e-7) {
                    r.classes.push(class);
                } else {
                    found.push(DegenerateRoot {
                        beta,
                        bracket: width,
                        nu: 0,
                        classes: vec![class],
                    });
                }
            }
        }
    } else {
        let f = |p: f64| -> Result<f64> {
            let m = monodromy(&family.system(p, e)?)?;
            Ok(d_omega(&m.gamma2pi.m, omega))
        };
        for (beta, width) in scan_roots(&f, lo, hi, pieces)? {
            found.push(DegenerateRoot {
                beta,
                bracket: width,
                nu: 0,
                classes: vec![],
            });
        }
    }
    for r in found.iter_mut() {
        let m = monodromy(&family.system(r.beta, e)?)?;
        r.nu = nu_omega(&m.gamma2pi.m, omega);
    }
    found.sort_by(|a, b| a.beta.partial_cmp(&b.beta).unwrap());
    Ok(found)
}

/// One traced point of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub e: f64,
    pub beta: f64,
    /// Bisection bracket width.
    pub bracket: f64,
    /// ν_ω of the monodromy at the sample (0 for the hyperbolic boundary).
    pub nu: usize,
}

/// A branch of (e, β) samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateCurve {
    pub family: Family,
    /// +1 or −1 for degenerate curves; `None` for the hyperbolic boundary.
    pub omega: Option<f64>,
    pub label: String,
    pub class: Option<SymmetryClass>,
    pub samples: Vec<CurveSample>,
    /// (β, e) at which tracing started.
    pub start_point: (f64, f64),
    /// Reason the curve stops before the end of the grid, if it does.
    pub truncated: Option<String>,
    /// True when every step stayed within ten times the secant prediction.
    pub continuous: bool,
}

impl DegenerateCurve {
    /// β at a grid eccentricity, if sampled.
    pub fn beta_at(&self, e: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| (s.e - e).abs() < 1e-12)
            .map(|s| s.beta)
    }
}

/// Searches outward from `pred` for the sign change closest to it.
fn locate<F: Fn(f64) -> Result<f64>>(
    f: &F,
    pred: f64,
    mut half_width: f64,
    window: (f64, f64),
) -> Result<Option<(f64, f64)>> {
    let max_half = 0.5 * (window.1 - window.0);
    loop {
        let lo = (pred - half_width).max(window.0);
        let hi = (pred + half_width).min(window.1);
        let k = 8;
        let xs: Vec<f64> = (0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect::<Result<_>>()?;
        let mut best: Option<(f64, usize)> = None;
        for i in 0..k {
            let change = (vals[i] < 0.0) != (vals[i + 1] < 0.0) || vals[i] == 0.0;
            if change {
                let mid = 0.5 * (xs[i] + xs[i + 1]);
                let dist = (mid - pred).abs();
                if best.map_or(true, |(d, _)| dist < d) {
                    best = Some((dist, i));
                }
            }
        }
        if let Some((_, i)) = best {
            if vals[i] == 0.0 {
                return Ok(Some((xs[i], 0.0)));
            }
            return bisect(f, xs[i], xs[i + 1], vals[i], ROOT_WIDTH).map(Some);
        }
        if half_width >= max_half {
            return Ok(None);
        }
        half_width *= 2.0;
    }
}

/// Continues the root of one class indicator from `start` at `e_grid[0]`
/// across the grid. Steps whose change in β exceeds 0.05 are subdivided
/// down to a quarter of the grid spacing.
pub fn trace_curve(
    family: Family,
    plus: bool,
    class: SymmetryClass,
    start: f64,
    e_grid: &[f64],
    window: (f64, f64),
    label: &str,
) -> Result<DegenerateCurve> {
    let omega = if plus { 1.0 } else { -1.0 };
    let omega_c = C64::new(omega, 0.0);
    let mut curve = DegenerateCurve {
        family,
        omega: Some(omega),
        label: label.to_string(),
        class: Some(class),
        samples: Vec::new(),
        start_point: (start, e_grid.first().copied().unwrap_or(0.0)),
        truncated: None,
        continuous: true,
    };
    if e_grid.is_empty() {
        return Ok(curve);
    }
    let sample_at = |e: f64, beta: f64, bracket: f64| -> Result<CurveSample> {
        let m = monodromy(&family.system(beta, e)?)?;
        Ok(CurveSample {
            e,
            beta,
            bracket,
            nu: nu_omega(&m.gamma2pi.m, omega_c),
        })
    };
    let e0 = e_grid[0];
    let f0 = |p: f64| indicator(family, p, e0, plus, class);
    let Some((b0, w0)) = locate(&f0, start, 1e-3, window)? else {
        curve.truncated = Some(format!("no sign change near {start} at e = {e0}"));
        return Ok(curve);
    };
    curve.samples.push(sample_at(e0, b0, w0)?);
    let mut slope = 0.0;
    for pair in e_grid.windows(2) {
        let (ea, eb) = (pair[0], pair[1]);
        let min_step = (eb - ea) / 4.0;
        let mut e_cur = ea;
        while e_cur < eb - 1e-14 {
            let last = *curve.samples.last().unwrap();
            let mut step = eb - e_cur;
            let accepted = loop {
                let e_next = e_cur + step;
                let pred = last.beta + slope * step;
                if pred < window.0 || pred > window.1 {
                    break None;
                }
                let f = |p: f64| indicator(family, p, e_next, plus, class);
                let half = (2.0 * (slope * step).abs()).max(0.01);
                match locate(&f, pred, half, window)? {
                    Some((b, w)) => {
                        let jump = (b - last.beta).abs();
                        if jump > 0.05 && step > min_step * 1.000001 {
                            step *= 0.5;
                            continue;
                        }
                        if (b - pred).abs() > 10.0 * (pred - last.beta).abs() + 1e-3 {
                            curve.continuous = false;
                        }
                        break Some((e_next, b, w));
                    }
                    None => break None,
                }
            };
            match accepted {
                Some((e_next, b, w)) => {
                    slope = (b - last.beta) / (e_next - last.e);
                    curve.samples.push(sample_at(e_next, b, w)?);
                    e_cur = e_next;
                }
                None => {
                    curve.truncated = Some(format!(
                        "bracket lost after e = {:.6} (curve leaves β ∈ [{}, {}])",
                        last.e, window.0, window.1
                    ));
                    return Ok(curve);
                }
            }
        }
    }
    Ok(curve)
}

/// Non-convex β̃ window of Figure 1.
pub const FIGURE_ONE_WINDOW: (f64, f64) = (-1.0, 3.0);

/// Traced curves of one figure plus their checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub figure: u8,
    pub family: Family,
    pub curves: Vec<DegenerateCurve>,
    pub ordering: Option<OrderingReport>,
    pub boundaries: Option<ConvexBoundaries>,
}

struct Job {
    plus: bool,
    class: SymmetryClass,
    start: f64,
    label: &'static str,
}

/// Traces the ±1-degenerate curves of the non-convex family with start
/// points in β̃ ∈ (−1, 3]: Γ₁ from 0, Ξ₁/Ξ₂ from β̂_{1/2}, Γ₂/Γ₃ from β̂₁,
/// Ξ₃/Ξ₄ from β̂_{3/2} and Γ₄/Γ₅ from β̂₂. The two −1-branches leaving one
/// start point are labelled by their order at the first positive e.
pub fn figure_one(e_grid: &[f64]) -> Result<FigureData> {
    use SymmetryClass::*;
    let jobs = vec![
        Job { plus: true, class: Odd, start: 0.0, label: "Γ1" },
        Job { plus: false, class: Even, start: circular_degenerate_point(0.5), label: "Ξa1" },
        Job { plus: false, class: Odd, start: circular_degenerate_point(0.5), label: "Ξb1" },
        Job { plus: true, class: Even, start: circular_degenerate_point(1.0), label: "Γ2" },
        Job { plus: true, class: Odd, start: circular_degenerate_point(1.0), label: "Γ3" },
        Job { plus: false, class: Even, start: circular_degenerate_point(1.5), label: "Ξa3" },
        Job { plus: false, class: Odd, start: circular_degenerate_point(1.5), label: "Ξb3" },
        Job { plus: true, class: Even, start: circular_degenerate_point(2.0), label: "Γ4" },
        Job { plus: true, class: Odd, start: circular_degenerate_point(2.0), label: "Γ5" },
    ];
    let traced: Vec<Result<DegenerateCurve>> = par_map(&jobs, |j| {
        trace_curve(
            Family::NonConvex,
            j.plus,
            j.class,
            j.start,
            e_grid,
            FIGURE_ONE_WINDOW,
            j.label,
        )
    });
    let mut curves: Vec<DegenerateCurve> = traced.into_iter().collect::<Result<_>>()?;
    for (a, b, lo, hi) in [("Ξa1", "Ξb1", "Ξ1", "Ξ2"), ("Ξa3", "Ξb3", "Ξ3", "Ξ4")] {
        let ia = curves.iter().position(|c| c.label == a).unwrap();
        let ib = curves.iter().position(|c| c.label == b).unwrap();
        let a_first = first_positive_beta(&curves[ia]);
        let b_first = first_positive_beta(&curves[ib]);
        let a_lower = match (a_first, b_first) {
            (Some(x), Some(y)) => x <= y,
            _ => true,
        };
        curves[ia].label = if a_lower { lo } else { hi }.to_string();
        curves[ib].label = if a_lower { hi } else { lo }.to_string();
    }
    curves.sort_by_key(|c| label_rank(&c.label));
    let ordering = verify_ordering(&curves);
    Ok(FigureData {
        figure: 1,
        family: Family::NonConvex,
        curves,
        ordering: Some(ordering),
        boundaries: None,
    })
}

fn first_positive_beta(c: &DegenerateCurve) -> Option<f64> {
    c.samples.iter().find(|s| s.e > 0.0).map(|s| s.beta)
}

fn label_rank(label: &str) -> (usize, usize) {
    let n: usize = label
        .chars()
        .filter(|c| c.is_ascii_digit())
        .collect::<String>()
        .parse()
        .unwrap_or(0);
    let family = if label.starts_with('Γ') { 1 } else { 0 };
    (n, family)
}

/// β_l ≤ β_m ≤ β_r of the convex family sampled over e.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexBoundaries {
    pub e: Vec<f64>,
    /// Smaller −1-degenerate value (Γ_l); `None` once Γ_l has left through β = 0.
    pub beta_l: Vec<Option<f64>>,
    /// Larger −1-degenerate value (Γ_m).
    pub beta_m: Vec<f64>,
    /// Onset of hyperbolicity (Γ_r).
    pub beta_r: Vec<f64>,
    /// The two traced −1 class curves, labelled Γl and Γm.
    pub minus_one_curves: Vec<DegenerateCurve>,
}

/// True when no multiplier lies on the unit circle, read from the pair
/// sums x = λ + 1/λ: a complex quadruplet or two real pairs with
/// |x| > 2. Pairs within [`PM_TOL`] of ±2, and discriminants within
/// rounding of zero, count as lying on the circle.
pub fn is_hyperbolic(m: &SymplecticMatrix) -> bool {
    let trace = m.m.trace();
    if m.pair_discriminant() < -1e-9 * (1.0 + trace * trace) {
        return true;
    }
    m.pair_sums().iter().all(|x| x.re.abs() > 2.0 + PM_TOL)
}

fn hyperbolic_at(family: Family, p: f64, e: f64) -> Result<bool> {
    Ok(is_hyperbolic(&monodromy(&family.system(p, e)?)?.gamma2pi))
}

/// Offset below a −1-degenerate value at which the monodromy is sampled
/// when that value is itself the hyperbolic onset.
const ONSET_BACKOFF: f64 = 1e-4;

/// β_r(e) = sup{β′ : the spectrum meets the unit circle for all β ≤ β′},
/// by bisection on the hyperbolicity predicate above `lo`, a parameter at
/// which the spectrum is known to meet the circle (β_m, possibly up to
/// rounding). The hyperbolic region is connected, so the predicate switches
/// once; with `paranoid` set, a uniform scan of [0, 27/4] checks that
/// assumption and fails loudly.
pub fn hyperbolic_onset(e: f64, lo: f64, paranoid: bool) -> Result<f64> {
    let family = Family::Convex;
    let mut a = lo;
    if hyperbolic_at(family, a, e)? {
        a = (lo - ONSET_BACKOFF).max(0.0);
        if hyperbolic_at(family, a, e)? {
            return Err(Error::DegenerateConfiguration(format!(
                "convex monodromy already hyperbolic at β = {a}, e = {e}"
            )));
        }
    }
    if !hyperbolic_at(family, BETA_MAX, e)? {
        return Err(Error::DegenerateConfiguration(format!(
            "convex monodromy not hyperbolic at β = 27/4, e = {e}"
        )));
    }
    let mut b = BETA_MAX;
    while b - a > ROOT_WIDTH {
        let m = 0.5 * (a + b);
        if hyperbolic_at(family, m, e)? {
            b = m;
        } else {
            a = m;
        }
    }
    let onset = 0.5 * (a + b);
    if paranoid {
        let k = 270;
        for i in 0..=k {
            let beta = BETA_MAX * i as f64 / k as f64;
            if (beta - onset).abs() < 1e-6 {
                continue;
            }
            let h = hyperbolic_at(family, beta, e)?;
            if h != (beta > onset) {
                return Err(Error::DegenerateConfiguration(format!(
                    "hyperbolic region not connected at e = {e}: β = {beta} is {} but the onset is {onset}",
                    if h { "hyperbolic" } else { "not hyperbolic" }
                )));
            }
        }
    }
    Ok(onset)
}

/// Traces the two −1-degenerate branches leaving β* and the hyperbolic
/// onset over `e_grid`. The branches are labelled Γl and Γm by their order
/// at the first positive e; where both are present the pointwise minimum
/// and maximum are reported.
pub fn convex_boundaries(e_grid: &[f64], paranoid: bool) -> Result<ConvexBoundaries> {
    let start = convex_minus_one_point();
    let window = (0.0, BETA_MAX);
    let classes = [SymmetryClass::Even, SymmetryClass::Odd];
    let traced: Vec<Result<DegenerateCurve>> = par_map(&classes, |&class| {
        trace_curve(Family::Convex, false, class, start, e_grid, window, "Γ-1")
    });
    let mut curves: Vec<DegenerateCurve> = traced.into_iter().collect::<Result<_>>()?;
    let a_lower = match (first_positive_beta(&curves[0]), first_positive_beta(&curves[1])) {
        (Some(x), Some(y)) => x <= y,
        _ => true,
    };
    if !a_lower {
        curves.swap(0, 1);
    }
    curves[0].label = "Γl".into();
    curves[1].label = "Γm".into();
    let mut es = Vec::new();
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    for &e in e_grid {
        match (curves[0].beta_at(e), curves[1].beta_at(e)) {
            (Some(a), Some(b)) => {
                es.push(e);
                lows.push(Some(a.min(b)));
                highs.push(a.max(b));
            }
            (None, Some(b)) => {
                es.push(e);
                lows.push(None);
                highs.push(b);
            }
            _ => {}
        }
    }
    let onsets: Vec<Result<f64>> = par_map(
        &es.iter().copied().zip(highs.iter().copied()).collect::<Vec<_>>(),
        |&(e, hi)| hyperbolic_onset(e, hi, paranoid),
    );
    let beta_r: Vec<f64> = onsets.into_iter().collect::<Result<_>>()?;
    Ok(ConvexBoundaries {
        e: es,
        beta_l: lows,
        beta_m: highs,
        beta_r,
        minus_one_curves: curves,
    })
}

impl ConvexBoundaries {
    /// Γ_r as a curve.
    pub fn onset_curve(&self) -> DegenerateCurve {
        DegenerateCurve {
            family: Family::Convex,
            omega: None,
            label: "Γr".into(),
            class: None,
            samples: self
                .e
                .iter()
                .zip(self.beta_r.iter())
                .map(|(&e, &beta)| CurveSample {
                    e,
                    beta,
                    bracket: ROOT_WIDTH,
                    nu: 0,
                })
                .collect(),
            start_point: (self.beta_r.first().copied().unwrap_or(f64::NAN), 0.0),
            truncated: None,
            continuous: true,
        }
    }

    /// Index of an eccentricity in the sample list.
    pub fn position(&self, e: f64) -> Option<usize> {
        self.e.iter().position(|&x| (x - e).abs() < 1e-12)
    }
}

/// Traces Γ_l, Γ_m and Γ_r of the convex family.
pub fn figure_two(e_grid: &[f64], paranoid: bool) -> Result<FigureData> {
    let b = convex_boundaries(e_grid, paranoid)?;
    let mut curves = b.minus_one_curves.clone();
    curves.push(b.onset_curve());
    Ok(FigureData {
        figure: 2,
        family: Family::Convex,
        curves,
        ordering: None,
        boundaries: Some(b),
    })
}

/// Regions I–IV of the convex rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConvexRegion {
    I,
    II,
    III,
    IV,
}

impl ConvexRegion {
    pub fn name(self) -> &'static str {
        match self {
            ConvexRegion::I => "I",
            ConvexRegion::II => "II",
            ConvexRegion::III => "III",
            ConvexRegion::IV => "IV",
        }
    }
}

/// Region whose normal form matches the tag: I is R(θ₁)⋄R(θ₂) with both
/// θ ∈ (π, 2π), II is R(θ)⋄D(−2), III is R(θ₁)⋄R(θ₂) with θ₁ ∈ (0, π) and
/// θ₂ ∈ (π, 2π), IV is hyperbolic.
pub fn convex_region_of(tag: &NormalFormTag) -> Option<ConvexRegion> {
    match *tag {
        NormalFormTag::RotationRotation { theta1, theta2 } => {
            if theta1 > PI && theta2 > PI {
                Some(ConvexRegion::I)
            } else if theta1 < PI && theta2 > PI {
                Some(ConvexRegion::III)
            } else {
                None
            }
        }
        NormalFormTag::RotationDMinus2 { .. } => Some(ConvexRegion::II),
        NormalFormTag::Hyperbolic | NormalFormTag::ComplexSaddle | NormalFormTag::DMinus2D2 => {
            Some(ConvexRegion::IV)
        }
        _ => None,
    }
}

/// Classification of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub beta: f64,
    pub e: f64,
    pub tag: NormalFormTag,
    pub verdict: Verdict,
    pub spectral_radius: f64,
    pub region: Option<ConvexRegion>,
}

/// Normal form and verdict over a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub family: Family,
    pub cells: Vec<RegionCell>,
}

/// Classifies every (β, e) cell of the grid (β̃ for the non-convex family).
pub fn region_classify(family: Family, betas: &[f64], es: &[f64]) -> Result<RegionMap> {
    let points: Vec<(f64, f64)> = es
        .iter()
        .flat_map(|&e| betas.iter().map(move |&b| (b, e)))
        .collect();
    let cells: Vec<Result<RegionCell>> = par_map(&points, |&(beta, e)| {
        let m = monodromy(&family.system(beta, e)?)?;
        let nf = classify_normal_form(&m.gamma2pi)?;
        let region = if family == Family::Convex {
            convex_region_of(&nf.tag)
        } else {
            None
        };
        Ok(RegionCell {
            beta,
            e,
            spectral_radius: nf.spectrum.spectral_radius(),
            tag: nf.tag,
            verdict: nf.verdict,
            region,
        })
    });
    Ok(RegionMap {
        family,
        cells: cells.into_iter().collect::<Result<_>>()?,
    })
}

/// Outcome of [`verify_ordering`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    /// Eccentricities at which the full chain was checked.
    pub checked_e: Vec<f64>,
    pub violations: Vec<String>,
    /// (label, traced start, circular value) for every curve.
    pub start_points: Vec<(String, f64, f64)>,
    /// Largest start-point deviation from the circular values.
    pub start_point_error: f64,
    /// Bracketing eccentricities at which Ξ₁ crosses Γ₁ (β̃ = 0).
    pub xi1_gamma1_crossing: Option<(f64, f64)>,
}

impl OrderingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
            && self.start_point_error <= 1e-6
            && self.xi1_gamma1_crossing.is_some()
            && !self.checked_e.is_empty()
    }
}

fn circular_value(label: &str) -> Option<f64> {
    Some(match label {
        "Γ1" => circular_degenerate_point(0.0),
        "Ξ1" | "Ξ2" => circular_degenerate_point(0.5),
        "Γ2" | "Γ3" => circular_degenerate_point(1.0),
        "Ξ3" | "Ξ4" => circular_degenerate_point(1.5),
        "Γ4" | "Γ5" => circular_degenerate_point(2.0),
        _ => return None,
    })
}

/// Checks the chain Ξ₁ ≤ Ξ₂ < Γ₂ = Γ₃ < Ξ₃ ≤ Ξ₄ < Γ₄ = Γ₅ at every
/// eccentricity sampled by all eight curves, the start points against the
/// circular values, and that Ξ₁ crosses Γ₁.
pub fn verify_ordering(curves: &[DegenerateCurve]) -> OrderingReport {
    let find = |l: &str| curves.iter().find(|c| c.label == l);
    let chain = ["Ξ1", "Ξ2", "Γ2", "Γ3", "Ξ3", "Ξ4", "Γ4", "Γ5"];
    // Relation between consecutive chain members: 0 for ≤, 1 for <, 2 for =.
    let relation = [0u8, 1, 2, 1, 0, 1, 2];
    let mut violations = Vec::new();
    let mut checked_e = Vec::new();
    let members: Vec<Option<&DegenerateCurve>> = chain.iter().map(|l| find(l)).collect();
    for (l, m) in chain.iter().zip(members.iter()) {
        if m.is_none() {
            violations.push(format!("curve {l} missing"));
        }
    }
    if let Some(Some(base)) = members.first() {
        for s in base.samples.iter() {
            let vals: Vec<Option<f64>> = members
                .iter()
                .map(|m| m.and_then(|c| c.beta_at(s.e)))
                .collect();
            if vals.iter().any(|v| v.is_none()) {
                continue;
            }
            let vals: Vec<f64> = vals.into_iter().map(|v| v.unwrap()).collect();
            checked_e.push(s.e);
            for i in 0..relation.len() {
                let (a, b) = (vals[i], vals[i + 1]);
                let ok = match relation[i] {
                    0 => a <= b + 1e-8,
                    1 => b - a > 1e-8,
                    _ => (a - b).abs() <= 1e-6,
                };
                if !ok {
                    let rel = ["≤", "<", "="][relation[i] as usize];
                    violations.push(format!(
                        "e = {:.4}: {} = {a:.10} {rel} {} = {b:.10} fails",
                        s.e, chain[i], chain[i + 1]
                    ));
                }
            }
        }
    }
    let mut start_points = Vec::new();
    let mut start_point_error: f64 = 0.0;
    for c in curves {
        if let (Some(v), Some(first)) = (circular_value(&c.label), c.samples.first()) {
            if first.e == 0.0 {
                start_point_error = start_point_error.max((first.beta - v).abs());
                start_points.push((c.label.clone(), first.beta, v));
            }
        }
    }
    let xi1_gamma1_crossing = match (find("Ξ1"), find("Γ1")) {
        (Some(xi), Some(gamma)) => xi.samples.windows(2).find_map(|w| {
            let g0 = gamma.beta_at(w[0].e).unwrap_or(0.0);
            let g1 = gamma.beta_at(w[1].e).unwrap_or(0.0);
            let d0 = w[0].beta - g0;
            let d1 = w[1].beta - g1;
            (d0 > 0.0 && d1 <= 0.0).then_some((w[0].e, w[1].e))
        }),
        _ => None,
    };
    OrderingReport {
        checked_e,
        violations,
        start_points,
        start_point_error,
        xi1_gamma1_crossing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_constants() {
        assert!((circular_degenerate_point(1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!(circular_degenerate_point(0.0).abs() < 1e-15);
        assert!((circular_degenerate_point(0.5) - (-35.0 + 1297f64.sqrt()) / 24.0).abs() < 1e-15);
    }

    #[test]
    fn finds_circular_roots_with_nullity() {
        let r = find_degenerate(Family::NonConvex, C64::new(-1.0, 0.0), 0.0, (0.0, 0.1)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].beta - circular_degenerate_point(0.5)).abs() < 1e-9);
        assert_eq!(r[0].nu, 2);
        assert_eq!(r[0].classes.len(), 2);
        let r = find_degenerate(Family::NonConvex, C64::new(1.0, 0.0), 0.0, (0.2, 0.5)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].beta - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(r[0].nu, 2);
    }

    #[test]
    fn gamma_one_is_vertical() {
        let c = trace_curve(
            Family::NonConvex,
            true,
            SymmetryClass::Odd,
            0.0,
            &[0.0, 0.2, 0.4, 0.6],
            FIGURE_ONE_WINDOW,
            "Γ1",
        )
        .unwrap();
        assert_eq!(c.samples.len(), 4);
        for s in c.samples.iter() {
            assert!(s.beta.abs() < 1e-9, "{s:?}");
            assert_eq!(s.nu, 1);
        }
    }
}
