//! Browser bindings: point analysis, a stability slice along the mass
//! parameter, and the small-mass limit table. Each operation has a plain
//! Rust form returning JSON text and a `wasm_bindgen` wrapper around it.

use ere_stability::index::classify_normal_form;
use ere_stability::numerics::UNIT_CIRCLE_TOL;
use ere_stability::report::{analyze_point, round15};
use ere_stability::smallmass::{eps_ladder, Branch, DEFAULT_LADDER};
use ere_stability::systems::{monodromy, EssentialSystem};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest number of samples a slice may request.
pub const MAX_SLICE_POINTS: usize = 400;

fn system(case: &str, beta: f64, e: f64) -> Result<EssentialSystem, String> {
    let sys = match case {
        "nonconvex" => EssentialSystem::nonconvex(beta, e),
        "convex" => EssentialSystem::convex(beta, e),
        "lagrange" => EssentialSystem::lagrange(beta, e),
        other => return Err(format!("unknown case '{other}'")),
    };
    sys.map_err(|e| e.to_string())
}

/// Point report of the given case at physical β and eccentricity `e`.
pub fn analyze_json(case: &str, beta: f64, e: f64) -> Result<String, String> {
    let sys = system(case, beta, e)?;
    let report = analyze_point(&sys, None).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// One sample of a stability slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceSample {
    pub beta: f64,
    pub verdict: String,
    pub normal_form: String,
    pub spectral_radius: f64,
}

/// Verdicts at `n` evenly spaced β in [lo, hi] at fixed eccentricity.
pub fn slice(case: &str, e: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<SliceSample>, String> {
    if !(2..=MAX_SLICE_POINTS).contains(&n) {
        return Err(format!("sample count must lie in 2..={MAX_SLICE_POINTS}"));
    }
    if !(lo < hi) {
        return Err("the slice needs lo < hi".into());
    }
    (0..n)
        .map(|k| {
            let beta = round15(lo + (hi - lo) * k as f64 / (n - 1) as f64);
            let sys = system(case, beta, e)?;
            let m = monodromy(&sys).map_err(|e| e.to_string())?.gamma2pi;
            let (verdict, normal_form) = match classify_normal_form(&m) {
                Ok(nf) => (nf.verdict.name().to_string(), nf.tag.label()),
                Err(err) => ("boundary".to_string(), format!("N2-suspect: {err}")),
            };
            let radius = m
                .spectrum(UNIT_CIRCLE_TOL)
                .map_err(|e| e.to_string())?
                .spectral_radius();
            Ok(SliceSample {
                beta,
                verdict,
                normal_form,
                spectral_radius: round15(radius),
            })
        })
        .collect()
}

pub fn slice_json(case: &str, e: f64, lo: f64, hi: f64, n: usize) -> Result<String, String> {
    serde_json::to_string(&slice(case, e, lo, hi, n)?).map_err(|e| e.to_string())
}

/// Finite-ε parameters against their ε → 0 limits on the default ladder.
pub fn cc_limit_json(m: f64, tau: f64, branch: &str) -> Result<String, String> {
    let branch: Branch = branch.parse().map_err(|e: ere_stability::Error| e.to_string())?;
    let rep = eps_ladder(m, tau, branch, &DEFAULT_LADDER).map_err(|e| e.to_string())?;
    serde_json::to_string(&rep).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn analyze(case: &str, beta: f64, e: f64) -> Result<String, JsError> {
    analyze_json(case, beta, e).map_err(|m| JsError::new(&m))
}

#[wasm_bindgen]
pub fn stability_slice(case: &str, e: f64, lo: f64, hi: f64, n: usize) -> Result<String, JsError> {
    slice_json(case, e, lo, hi, n).map_err(|m| JsError::new(&m))
}

#[wasm_bindgen]
pub fn cc_limit(m: f64, tau: f64, branch: &str) -> Result<String, JsError> {
    cc_limit_json(m, tau, branch).map_err(|m| JsError::new(&m))
}
