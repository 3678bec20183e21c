//! Self-contained SVG figures: line charts and heatmaps.
//!
//! Charts are written directly as SVG strings with no plotting
//! dependency, so every figure is reproducible byte-for-byte from the
//! data that produced it.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// One named polyline of a chart.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
        Series {
            label: label.into(),
            points,
        }
    }
}

/// A line chart with optional logarithmic x axis.
#[derive(Clone, Debug)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> LineChart {
        LineChart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            series: Vec::new(),
        }
    }

    pub fn with_log_x(mut self) -> LineChart {
        self.log_x = true;
        self
    }

    pub fn push(&mut self, series: Series) {
        self.series.push(series);
    }

    /// Renders the chart to an SVG document string.
    ///
    /// Points with non-finite coordinates are skipped, as are points
    /// with non-positive x under a logarithmic axis.
    pub fn render(&self) -> String {
        let usable: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .copied()
                    .filter(|&(x, y)| {
                        x.is_finite() && y.is_finite() && (!self.log_x || x > 0.0)
                    })
                    .map(|(x, y)| (if self.log_x { x.log10() } else { x }, y))
                    .collect()
            })
            .collect();
        let all: Vec<(f64, f64)> = usable.iter().flatten().copied().collect();
        let (x_min, x_max) = padded_range(all.iter().map(|p| p.0));
        let (y_min, y_max) = padded_range(all.iter().map(|p| p.1));

        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let to_px = |x: f64, y: f64| -> (f64, f64) {
            (
                MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w,
                MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h,
            )
        };

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        ));

        // Axes frame.
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"#333333\"/>\n"
        ));

        // Ticks and grid lines.
        for tick in if self.log_x {
            log_ticks(x_min, x_max)
        } else {
            linear_ticks(x_min, x_max)
        } {
            let (px, _) = to_px(tick, y_min);
            let label = if self.log_x {
                fmt_tick(10f64.powf(tick))
            } else {
                fmt_tick(tick)
            };
            svg.push_str(&format!(
                "<line x1=\"{px:.1}\" y1=\"{MARGIN_TOP}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n",
                MARGIN_TOP + plot_h
            ));
            svg.push_str(&format!(
                "<text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n",
                MARGIN_TOP + plot_h + 16.0
            ));
        }
        for tick in linear_ticks(y_min, y_max) {
            let (_, py) = to_px(x_min, tick);
            svg.push_str(&format!(
                "<line x1=\"{MARGIN_LEFT}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#dddddd\"/>\n",
                MARGIN_LEFT + plot_w
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                MARGIN_LEFT - 6.0,
                py + 4.0,
                fmt_tick(tick)
            ));
        }

        // Axis labels.
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        ));

        // Series polylines and legend.
        for (index, (series, points)) in self.series.iter().zip(&usable).enumerate() {
            let color = PALETTE[index % PALETTE.len()];
            if !points.is_empty() {
                let path: Vec<String> = points
                    .iter()
                    .map(|&(x, y)| {
                        let (px, py) = to_px(x, y);
                        format!("{px:.2},{py:.2}")
                    })
                    .collect();
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                    path.join(" ")
                ));
            }
            let legend_y = MARGIN_TOP + 14.0 + 18.0 * index as f64;
            let legend_x = WIDTH - MARGIN_RIGHT + 12.0;
            svg.push_str(&format!(
                "<line x1=\"{legend_x:.1}\" y1=\"{legend_y:.1}\" x2=\"{:.1}\" y2=\"{legend_y:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                legend_x + 20.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                legend_x + 26.0,
                legend_y + 4.0,
                escape(&series.label)
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// A square heatmap of values in [0,1]; 0 renders white, 1 renders
/// dark blue.
#[derive(Clone, Debug)]
pub struct Heatmap {
    pub title: String,
    pub values: Array2<f64>,
}

impl Heatmap {
    pub fn new(title: impl Into<String>, values: Array2<f64>) -> Heatmap {
        Heatmap {
            title: title.into(),
            values,
        }
    }

    /// Renders the heatmap to an SVG document string. Row 0 is drawn at
    /// the top, matching matrix orientation.
    pub fn render(&self) -> String {
        let rows = self.values.nrows();
        let cols = self.values.ncols();
        let side = 560.0;
        let cell_w = side / cols.max(1) as f64;
        let cell_h = side / rows.max(1) as f64;
        let left = 40.0;
        let top = 48.0;
        let width = side + 2.0 * left;
        let height = side + top + 40.0;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            width / 2.0,
            escape(&self.title)
        ));
        for i in 0..rows {
            for j in 0..cols {
                let v = self.values[[i, j]].clamp(0.0, 1.0);
                let r = (255.0 * (1.0 - 0.85 * v)).round() as u8;
                let g = (255.0 * (1.0 - 0.75 * v)).round() as u8;
                let b = (255.0 * (1.0 - 0.35 * v)).round() as u8;
                svg.push_str(&format!(
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>\n",
                    left + j as f64 * cell_w,
                    top + i as f64 * cell_h,
                    cell_w + 0.05,
                    cell_h + 0.05,
                ));
            }
        }
        svg.push_str(&format!(
            "<rect x=\"{left}\" y=\"{top}\" width=\"{side}\" height=\"{side}\" fill=\"none\" stroke=\"#333333\"/>\n"
        ));
        svg.push_str("</svg>\n");
        svg
    }
}

/// Writes an SVG document to disk.
pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    fs::write(path, svg)?;
    Ok(())
}

/// Extends a min/max range so degenerate or empty data still renders.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Tick positions at 1-2-5 multiples covering the range.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw_step = span / 5.0;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| span / s <= 6.0)
        .unwrap_or(magnitude);
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + 1e-9 * step {
        ticks.push(t);
        t += step;
    }
    ticks
}

/// Tick positions at integer powers of ten, in log10 coordinates.
fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.ceil() as i64;
    let last = hi.floor() as i64;
    (first..=last).map(|e| e as f64).collect()
}

/// Compact tick label, falling back to scientific notation for
/// extreme magnitudes.
fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs();
    if magnitude >= 1e4 || magnitude < 1e-3 {
        format!("{v:.0e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        let text = format!("{v:.3}");
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Escapes the XML special characters that can appear in labels.
fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn sample_chart() -> LineChart {
        let mut chart = LineChart::new("gaps", "n", "gap").with_log_x();
        chart.push(Series::new(
            "i=+1",
            vec![(125.0, 0.05), (250.0, 0.04), (500.0, 0.02), (1000.0, 0.015)],
        ));
        chart.push(Series::new(
            "standard",
            vec![(125.0, 8.9), (250.0, 8.7), (500.0, 8.5), (1000.0, 8.2)],
        ));
        chart
    }

    #[test]
    fn chart_renders_every_series_and_is_deterministic() {
        let chart = sample_chart();
        let svg = chart.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("i=+1"));
        assert!(svg.contains("standard"));
        assert!(!svg.contains("NaN"));
        assert_eq!(svg, chart.render());
    }

    #[test]
    fn log_axis_drops_nonpositive_points() {
        let mut chart = LineChart::new("t", "n", "v").with_log_x();
        chart.push(Series::new("s", vec![(0.0, 1.0), (10.0, 2.0), (100.0, 3.0)]));
        let svg = chart.render();
        let polyline = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let points = polyline.split('"').nth(1).unwrap();
        // Only the two positive-x points survive the filter.
        assert_eq!(points.split(' ').count(), 2);
    }

    #[test]
    fn empty_chart_still_renders_axes() {
        let chart = LineChart::new("empty", "x", "y");
        let svg = chart.render();
        assert!(svg.contains("<rect"));
        assert!(!svg.contains("polyline"));
    }

    #[test]
    fn log_ticks_cover_powers_of_ten() {
        let ticks = log_ticks(2.0f64.log10().min(2.0), 4.0);
        assert!(ticks.contains(&2.0) && ticks.contains(&3.0) && ticks.contains(&4.0));
        assert_eq!(fmt_tick(1e5), "1e5");
        assert_eq!(fmt_tick(100.0), "100");
        assert_eq!(fmt_tick(0.25), "0.25");
    }

    #[test]
    fn heatmap_draws_one_cell_per_entry() {
        let map = Heatmap::new("surface", arr2(&[[0.0, 0.5], [0.5, 1.0]]));
        let svg = map.render();
        // Four cells plus the background and frame rectangles.
        assert_eq!(svg.matches("<rect").count(), 6);
        assert!(svg.contains("rgb(255,255,255)"));
        assert_eq!(svg, map.render());
    }

    #[test]
    fn labels_are_xml_escaped() {
        let chart = LineChart::new("a < b & c", "x", "y");
        let svg = chart.render();
        assert!(svg.contains("a &lt; b &amp; c"));
    }
}
