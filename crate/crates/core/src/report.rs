//! Output helpers: 15-significant-digit number formatting, point reports,
//! curve CSV tables and a minimal SVG writer for the bifurcation figures.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curves::{DegenerateCurve, FigureData, RegionMap};
use crate::index::{classify_normal_form, nu_omega, omega_index};
use crate::numerics::C64;
use crate::systems::{monodromy, Case, EssentialSystem, Family, BETA_MAX};
use crate::Result;

/// Version tag carried by every JSON and CSV artifact.
pub const SCHEMA_VERSION: &str = "1";

/// Formats `x` with 15 significant digits, trimming trailing zeros.
pub fn fmt15(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&mag) {
        let s = format!("{x:.14e}");
        let (mant, exp) = s.split_once('e').unwrap();
        let mant = trim_zeros(mant);
        return format!("{mant}e{exp}");
    }
    let decimals = (14 - mag).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}"))
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.into()
        }
    } else {
        s.into()
    }
}

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    fmt15(x).parse().unwrap_or(x)
}

/// ω-index entry of a point report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub omega: [f64; 2],
    pub i_omega: usize,
    pub nu_omega_hill: usize,
    pub nu_omega_monodromy: usize,
    pub stabilized: bool,
}

/// Everything reported for one (case, parameter, e) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub schema: String,
    pub case: String,
    /// β, β̃ or `null` for a custom (λ₃, λ₄) pair.
    pub parameter: Option<f64>,
    pub parameter_name: Option<String>,
    pub lambda3: f64,
    pub lambda4: f64,
    pub e: f64,
    /// Floquet multipliers as (re, im).
    pub multipliers: Vec<[f64; 2]>,
    pub moduli: Vec<f64>,
    pub verdict: String,
    pub normal_form: String,
    pub nu_plus_one: usize,
    pub nu_minus_one: usize,
    pub i_plus_one: OmegaEntry,
    pub i_minus_one: OmegaEntry,
    pub omega: Option<OmegaEntry>,
    pub symplectic_defect: f64,
    /// True when every Hill index was unchanged under doubling.
    pub stabilized: bool,
}

fn omega_entry(sys: &EssentialSystem, m: &crate::numerics::Mat4, omega: C64) -> Result<OmegaEntry> {
    let idx = omega_index(sys, omega)?;
    Ok(OmegaEntry {
        omega: [round15(omega.re), round15(omega.im)],
        i_omega: idx.i_omega,
        nu_omega_hill: idx.nu_omega,
        nu_omega_monodromy: nu_omega(m, omega),
        stabilized: idx.stabilized,
    })
}

/// Monodromy spectrum, normal form, verdict, and the Hill indices at ω = ±1
/// (and at `omega` if given).
pub fn analyze_point(sys: &EssentialSystem, omega: Option<C64>) -> Result<PointReport> {
    let mono = monodromy(sys)?;
    let m = &mono.gamma2pi;
    let (case, parameter, parameter_name) = match sys.case {
        Case::NonConvex { beta_tilde } => ("nonconvex", Some(beta_tilde), Some("beta_tilde")),
        Case::Convex { beta } => ("convex", Some(beta), Some("beta")),
        Case::Lagrange { beta } => ("lagrange", Some(beta), Some("beta")),
        Case::Custom => ("custom", None, None),
    };
    let spectrum = m.spectrum(crate::numerics::UNIT_CIRCLE_TOL)?;
    let (normal_form, verdict) = match classify_normal_form(m) {
        Ok(nf) => (nf.tag.label(), nf.verdict.name().to_string()),
        Err(err) => (format!("N2-suspect: {err}"), "boundary".to_string()),
    };
    let plus = omega_entry(sys, &m.m, C64::new(1.0, 0.0))?;
    let minus = omega_entry(sys, &m.m, C64::new(-1.0, 0.0))?;
    let extra = match omega {
        Some(w) => Some(omega_entry(sys, &m.m, w)?),
        None => None,
    };
    let stabilized =
        plus.stabilized && minus.stabilized && extra.as_ref().map_or(true, |x| x.stabilized);
    Ok(PointReport {
        schema: SCHEMA_VERSION.into(),
        case: case.into(),
        parameter: parameter.map(round15),
        parameter_name: parameter_name.map(String::from),
        lambda3: round15(sys.lambda3),
        lambda4: round15(sys.lambda4),
        e: round15(sys.e),
        multipliers: spectrum
            .eigenvalues
            .iter()
            .map(|l| [round15(l.re), round15(l.im)])
            .collect(),
        moduli: spectrum.eigenvalues.iter().map(|l| round15(l.norm())).collect(),
        verdict,
        normal_form,
        nu_plus_one: nu_omega(&m.m, C64::new(1.0, 0.0)),
        nu_minus_one: nu_omega(&m.m, C64::new(-1.0, 0.0)),
        i_plus_one: plus,
        i_minus_one: minus,
        omega: extra,
        symplectic_defect: round15(mono.defect),
        stabilized,
    })
}

/// Header of the curve CSV table.
pub const CURVE_CSV_HEADER: &str = "case,omega,label,e,beta,nu,bracket";

/// One row per sample of every curve; ω is "none" for the hyperbolic boundary.
pub fn curves_csv(curves: &[DegenerateCurve]) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for c in curves {
        let omega = c.omega.map_or("none".to_string(), fmt15);
        for s in c.samples.iter() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.family.name(),
                omega,
                c.label,
                fmt15(s.e),
                fmt15(s.beta),
                s.nu,
                fmt15(s.bracket)
            );
        }
    }
    out
}

/// Header of the region-map CSV table.
pub const REGION_CSV_HEADER: &str = "case,beta,e,normal_form,verdict,spectral_radius,region";

/// One row per classified cell.
pub fn region_csv(map: &RegionMap) -> String {
    let mut out = String::from(REGION_CSV_HEADER);
    out.push('\n');
    for c in map.cells.iter() {
        let _ = writeln!(
            out,
            "{},{},{},\"{}\",{},{},{}",
            map.family.name(),
            fmt15(c.beta),
            fmt15(c.e),
            c.tag.label(),
            c.verdict.name(),
            fmt15(c.spectral_radius),
            c.region.map_or("", |r| r.name())
        );
    }
    out
}

/// One polyline of an SVG plot.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: String,
    pub dashed: bool,
}

/// A line plot with axes and a legend.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let pow = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * pow)
        .find(|s| span / s <= 8.0)
        .unwrap_or(10.0 * pow);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

impl SvgPlot {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN
            - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    }

    /// The SVG document.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let (x0, y0) = self.map(self.x_range.0, self.y_range.0);
        let (x1, y1) = self.map(self.x_range.1, self.y_range.1);
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        for t in ticks(self.x_range.0, self.x_range.1) {
            let (px, _) = self.map(t, self.y_range.0);
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y0 + 5.0,
                y0 + 18.0,
                fmt15(round_tick(t))
            );
        }
        for t in ticks(self.y_range.0, self.y_range.1) {
            let (_, py) = self.map(self.x_range.0, t);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                fmt15(round_tick(t))
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (k, series) in self.series.iter().enumerate() {
            let pts: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = self.map(x, y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}><title>{}</title></polyline>"#,
                pts.join(" "),
                series.color,
                escape(&series.label)
            );
            let ly = MARGIN + 16.0 * k as f64 + 10.0;
            let lx = WIDTH - MARGIN - 70.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 20.0,
                series.color,
                lx + 25.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn round_tick(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#7f7f7f",
];

/// SVG of a traced figure: β̃ ∈ (−1, 3] × e for figure 1 and
/// β ∈ [0, 27/4] × e for figure 2.
pub fn figure_svg(fig: &FigureData) -> String {
    let (title, x_label, x_range) = match fig.family {
        Family::NonConvex => (
            "Degenerate curves, non-convex case",
            "β̃",
            (-1.0, 3.0),
        ),
        _ => ("Bifurcation curves, convex case", "β", (0.0, BETA_MAX)),
    };
    let series = fig
        .curves
        .iter()
        .enumerate()
        .map(|(k, c)| Series {
            label: c.label.clone(),
            points: c.samples.iter().map(|s| (s.beta, s.e)).collect(),
            color: PALETTE[k % PALETTE.len()].into(),
            dashed: c.omega == Some(-1.0),
        })
        .collect();
    SvgPlot {
        title: title.into(),
        x_label: x_label.into(),
        y_label: "e".into(),
        x_range,
        y_range: (0.0, 1.0),
        series,
    }
    .render()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(fmt15(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt15(2.5), "2.5");
        assert_eq!(fmt15(-1234.5678901234567), "-1234.56789012346");
        assert_eq!(fmt15(0.0), "0");
        assert_eq!(fmt15(1e-10), "1e-10");
        assert_eq!(round15(0.1 + 0.2), 0.3);
    }

    #[test]
    fn svg_is_well_formed() {
        let plot = SvgPlot {
            title: "t<1>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            series: vec![Series {
                label: "a".into(),
                points: vec![(0.0, 0.0), (1.0, 1.0)],
                color: "red".into(),
                dashed: false,
            }],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("t&lt;1&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
