//! Self-contained SVG rendering of aggregate gap curves.
//!
//! The renderer is deliberately hand-rolled and fully deterministic: fixed
//! canvas, fixed palette, fixed decimal formatting, no timestamps and no
//! external assets, so re-rendering the same records yields byte-identical
//! files. Gap means are drawn on a log₁₀ y-axis against the linear pass axis;
//! values at or below 10⁻¹² are clamped to the bottom decade.

use super::AggregateRecord;

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;
const GAP_FLOOR: f64 = 1e-12;

const PALETTE: [&str; 8] = [
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#e67300", "#555555",
];

/// Plot titles and axis labels.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            title: "optimality gap vs effective passes".into(),
            x_label: "effective passes".into(),
            y_label: "mean optimality gap".into(),
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Largest of 1/2/5 × 10^m no smaller than range/5.
fn nice_step(range: f64) -> f64 {
    let raw = (range / 5.0).max(1.0);
    let base = 10f64.powf(raw.log10().floor());
    for multiple in [1.0, 2.0, 5.0, 10.0] {
        if base * multiple >= raw {
            return base * multiple;
        }
    }
    base * 10.0
}

fn decade_label(k: i32) -> String {
    match k {
        0 => "1".into(),
        1 => "10".into(),
        _ => format!("1e{k}"),
    }
}

/// Render aggregate mean-gap curves to an SVG document. With no records the
/// output is a valid plot with empty axes.
pub fn render_gap_plot(records: &[AggregateRecord], spec: &PlotSpec) -> String {
    // Series in first-appearance order.
    let mut methods: Vec<&str> = Vec::new();
    for r in records {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }

    let mut series: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    let mut max_pass = 0f64;
    let (mut lo_exp, mut hi_exp) = (i32::MAX, i32::MIN);
    for &method in &methods {
        let mut points: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.method == method && r.gap_mean.is_finite())
            .map(|r| (r.passes as f64, r.gap_mean.max(GAP_FLOOR)))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(x, y) in &points {
            max_pass = max_pass.max(x);
            lo_exp = lo_exp.min(y.log10().floor() as i32);
            hi_exp = hi_exp.max(y.log10().ceil() as i32);
        }
        series.push((method, points));
    }
    if lo_exp > hi_exp {
        // No data: draw an empty frame over a default range.
        lo_exp = -2;
        hi_exp = 0;
        max_pass = 1.0;
    }
    if lo_exp == hi_exp {
        lo_exp -= 1;
    }
    if max_pass < 1.0 {
        max_pass = 1.0;
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |pass: f64| MARGIN_LEFT + pass / max_pass * plot_w;
    let y_of = |gap: f64| {
        let t = (gap.log10() - lo_exp as f64) / (hi_exp - lo_exp) as f64;
        MARGIN_TOP + (1.0 - t) * plot_h
    };

    let mut svg = String::with_capacity(8192);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"Helvetica, Arial, sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!("  <title>{}</title>\n", escape(&spec.title)));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        escape(&spec.title)
    ));

    // Horizontal decade grid plus labels.
    for k in lo_exp..=hi_exp {
        let y = y_of(10f64.powi(k));
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 8.0,
            y + 4.0,
            decade_label(k)
        ));
    }

    // X ticks.
    let step = nice_step(max_pass);
    let mut tick = 0.0;
    while tick <= max_pass + 1e-9 {
        let x = x_of(tick.min(max_pass));
        svg.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#999999\"/>\n",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_TOP + plot_h + 20.0,
            tick as u64
        ));
        tick += step;
    }

    // Axes frame.
    svg.push_str(&format!(
        "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" \
         fill=\"none\" stroke=\"#333333\"/>\n",
        MARGIN_LEFT, MARGIN_TOP
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(&spec.x_label)
    ));
    svg.push_str(&format!(
        "  <text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 20 {:.2})\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&spec.y_label)
    ));

    // Curves.
    for (i, (_, points)) in series.iter().enumerate() {
        if points.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> =
            points.iter().map(|&(x, y)| format!("{:.2},{:.2}", x_of(x), y_of(y))).collect();
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            coords.join(" ")
        ));
    }

    // Legend.
    let legend_x = MARGIN_LEFT + plot_w + 14.0;
    for (i, (method, _)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = MARGIN_TOP + 12.0 + i as f64 * 20.0;
        svg.push_str(&format!(
            "  <line x1=\"{legend_x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"{color}\" stroke-width=\"3\"/>\n",
            legend_x + 22.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
            legend_x + 28.0,
            y + 4.0,
            escape(method)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
