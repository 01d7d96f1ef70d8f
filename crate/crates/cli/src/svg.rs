//! Minimal standalone SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveStyle {
    /// Markers joined by a solid line, with error bars when present.
    Data,
    /// Dashed line.
    Prediction,
    /// Dotted line.
    Fit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub style: CurveStyle,
    pub points: Vec<(f64, f64)>,
    /// Half-widths of the error bars, one per point.
    pub errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub curves: Vec<Curve>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil().max(lo + 1.0);
        } else if hi - lo < 1e-12 * hi.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log }
    }

    fn frac(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            (self.lo as i32..=self.hi as i32).map(|e| (10f64.powi(e), format!("1e{e}"))).collect()
        } else {
            (0..=5)
                .map(|i| {
                    let v = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                    (v, format_tick(v))
                })
                .collect()
        }
    }
}

fn format_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> Result<String, CliError> {
        if self.curves.is_empty() {
            return Err(CliError::Config { path: "plot".into(), message: "nothing to plot".into() });
        }
        let xs = self.curves.iter().flat_map(|c| c.points.iter().map(|p| p.0));
        let ys = self.curves.iter().flat_map(|c| {
            c.points.iter().enumerate().flat_map(move |(i, p)| {
                let e = c.errors.as_ref().map_or(0.0, |e| e[i]);
                [p.1 - e, p.1 + e]
            })
        });
        let ax = Axis::new(xs, self.log_x);
        let ay = Axis::new(ys, self.log_y);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let px = |x: f64| ax.frac(x).map(|f| LEFT + f * pw);
        let py = |y: f64| ay.frac(y).map(|f| TOP + (1.0 - f) * ph);

        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(&self.title)).unwrap();
        writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        for (v, label) in ax.ticks() {
            if let Some(x) = px(v) {
                let y0 = TOP + ph;
                writeln!(s, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0).unwrap();
                writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, y0 + 20.0).unwrap();
            }
        }
        for (v, label) in ay.ticks() {
            if let Some(y) = py(v) {
                writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0).unwrap();
                writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 8.0, y + 4.0).unwrap();
            }
        }
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        )
        .unwrap();

        for (k, curve) in self.curves.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let dash = match curve.style {
                CurveStyle::Data => "",
                CurveStyle::Prediction => r#" stroke-dasharray="8 4""#,
                CurveStyle::Fit => r#" stroke-dasharray="2 3""#,
            };
            let coords: Vec<String> = curve
                .points
                .iter()
                .filter_map(|&(x, y)| Some(format!("{:.2},{:.2}", px(x)?, py(y)?)))
                .collect();
            writeln!(
                s,
                r#"<polyline class="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                style_class(curve.style),
                coords.join(" ")
            )
            .unwrap();
            if curve.style == CurveStyle::Data {
                for (i, &(x, y)) in curve.points.iter().enumerate() {
                    let (Some(cx), Some(cy)) = (px(x), py(y)) else { continue };
                    writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="{color}"/>"#).unwrap();
                    let e = curve.errors.as_ref().map_or(0.0, |e| e[i]);
                    if e > 0.0 {
                        if let (Some(y1), Some(y2)) = (py(y - e).or(Some(TOP + ph)), py(y + e)) {
                            writeln!(
                                s,
                                r#"<line class="error-bar" x1="{cx:.2}" y1="{y1:.2}" x2="{cx:.2}" y2="{y2:.2}" stroke="{color}"/>"#
                            )
                            .unwrap();
                        }
                    }
                }
            }
            let ly = TOP + 10.0 + 20.0 * k as f64;
            let lx = WIDTH - RIGHT + 15.0;
            writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                lx + 30.0
            )
            .unwrap();
            writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 36.0, ly + 4.0, escape(&curve.label)).unwrap();
        }
        s.push_str("</svg>\n");
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let svg = self.render()?;
        std::fs::write(path, svg).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }
}

fn style_class(style: CurveStyle) -> &'static str {
    match style {
        CurveStyle::Data => "data",
        CurveStyle::Prediction => "prediction",
        CurveStyle::Fit => "fit",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(curves: Vec<Curve>) -> Plot {
        Plot { title: "t".into(), x_label: "x".into(), y_label: "y".into(), log_x: false, log_y: false, curves }
    }

    #[test]
    fn single_curve_has_two_coordinates() {
        let svg = plot(vec![Curve {
            label: "a".into(),
            style: CurveStyle::Data,
            points: vec![(1.0, 2.0), (2.0, 4.0)],
            errors: None,
        }])
        .render()
        .unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let line = svg.lines().find(|l| l.contains("<polyline")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(pts.split(' ').count(), 2);
    }

    #[test]
    fn error_bars_and_distinct_styles() {
        let svg = plot(vec![
            Curve { label: "data".into(), style: CurveStyle::Data, points: vec![(1.0, 2.0), (2.0, 4.0)], errors: Some(vec![0.1, 0.2]) },
            Curve { label: "pred".into(), style: CurveStyle::Prediction, points: vec![(1.0, 2.0), (2.0, 4.0)], errors: None },
        ])
        .render()
        .unwrap();
        assert_eq!(svg.matches("class=\"error-bar\"").count(), 2);
        let polys: Vec<&str> = svg.lines().filter(|l| l.contains("<polyline")).collect();
        assert_eq!(polys.len(), 2);
        assert!(!polys[0].contains("stroke-dasharray") && polys[1].contains("stroke-dasharray"));
    }

    #[test]
    fn log_axes_and_empty_plots() {
        let mut p = plot(vec![Curve {
            label: "a".into(),
            style: CurveStyle::Fit,
            points: vec![(1.0, 1.0), (10.0, 100.0), (0.0, -1.0)],
            errors: None,
        }]);
        p.log_x = true;
        p.log_y = true;
        let svg = p.render().unwrap();
        assert!(svg.contains("1e2"));
        assert!(plot(vec![]).render().is_err());
    }
}
