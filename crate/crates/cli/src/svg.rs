//! Self-contained SVG line and scatter charts.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Line,
    Scatter,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn line(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            kind: SeriesKind::Line,
            points,
        }
    }

    pub fn scatter(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            kind: SeriesKind::Scatter,
            points,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisFormat {
    Number,
    Percent,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_format: AxisFormat,
    pub y_format: AxisFormat,
    /// Points outside this x window are dropped.
    pub x_window: Option<(f64, f64)>,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let residual = raw / magnitude;
    let nice = if residual < 1.5 {
        1.0
    } else if residual < 3.0 {
        2.0
    } else if residual < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

fn tick_label(v: f64, step: f64, format: AxisFormat) -> String {
    let (v, step) = match format {
        AxisFormat::Percent => (v * 100.0, step * 100.0),
        AxisFormat::Number => (v, step),
    };
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10()).ceil() as usize
    };
    let v = if v.abs() < step * 1e-9 { 0.0 } else { v };
    let suffix = if format == AxisFormat::Percent {
        "%"
    } else {
        ""
    };
    format!("{v:.decimals$}{suffix}")
}

impl Chart {
    fn visible(&self, series: &Series) -> Vec<(f64, f64)> {
        series
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .filter(|(x, _)| self.x_window.is_none_or(|(lo, hi)| *x >= lo && *x <= hi))
            .collect()
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let points: Vec<(f64, f64)> = self.series.iter().flat_map(|s| self.visible(s)).collect();
        let fold = |f: fn(&(f64, f64)) -> f64| {
            points
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                })
        };
        let mut x = self.x_window.unwrap_or_else(|| fold(|p| p.0));
        let mut y = fold(|p| p.1);
        for r in [&mut x, &mut y] {
            if !r.0.is_finite() {
                *r = (0.0, 1.0);
            } else if r.1 - r.0 <= 0.0 {
                *r = (r.0 - 0.5, r.1 + 0.5);
            }
        }
        (x, y)
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds();
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            svg,
            r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );

        // axes and grid
        let _ = writeln!(svg, r##"<g stroke="#999" stroke-width="1">"##);
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            TOP + plot_h,
            LEFT + plot_w,
            TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}"/>"#,
            TOP + plot_h
        );
        let _ = writeln!(svg, "</g>");
        let mut labels = String::new();
        let x_step = nice_step(x1 - x0);
        let mut t = (x0 / x_step).ceil() * x_step;
        while t <= x1 + x_step * 1e-9 {
            let x = sx(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#eee"/>"##,
                TOP + plot_h
            );
            let _ = writeln!(
                labels,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + plot_h + 18.0,
                tick_label(t, x_step, self.x_format)
            );
            t += x_step;
        }
        let y_step = nice_step(y1 - y0);
        let mut t = (y0 / y_step).ceil() * y_step;
        while t <= y1 + y_step * 1e-9 {
            let y = sy(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#eee"/>"##,
                LEFT + plot_w
            );
            let _ = writeln!(
                labels,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                tick_label(t, y_step, self.y_format)
            );
            t += y_step;
        }
        svg.push_str(&labels);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (i, series) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let points = self.visible(series);
            match series.kind {
                SeriesKind::Line => {
                    let coords: Vec<String> = points
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let _ = writeln!(
                        svg,
                        r#"<polyline fill="none" stroke="{colour}" stroke-width="1.8" points="{}"><title>{}</title></polyline>"#,
                        coords.join(" "),
                        escape(&series.name)
                    );
                }
                SeriesKind::Scatter => {
                    let r = 2.5;
                    let d: String = points
                        .iter()
                        .map(|&(x, y)| {
                            format!(
                                "M{:.2} {:.2}m-{r} 0a{r} {r} 0 1 0 {d} 0a{r} {r} 0 1 0 -{d} 0",
                                sx(x),
                                sy(y),
                                d = 2.0 * r
                            )
                        })
                        .collect();
                    let _ = writeln!(
                        svg,
                        r#"<path fill="{colour}" fill-opacity="0.6" d="{d}"><title>{}</title></path>"#,
                        escape(&series.name)
                    );
                }
            }
            let ly = TOP + 10.0 + i as f64 * 18.0;
            let lx = WIDTH - RIGHT + 16.0;
            let _ = writeln!(
                svg,
                r#"<rect x="{lx:.2}" y="{:.2}" width="14" height="4" fill="{colour}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                ly - 2.0,
                lx + 20.0,
                ly + 4.0,
                escape(&series.name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}
