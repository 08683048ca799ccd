//! Self-contained SVG charts from a results table: solid mean lines per
//! estimator, optional dashed confidence bands, one file per panel. Output
//! is a pure function of the input rows, with fixed colors and formatting,
//! so rendered bytes never change across runs.

use crate::errors::{validation, CliResult};
use crate::io::ResultsTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YColumn {
    MeanL2Scaled,
    MeanLinf,
    SignRate,
}

impl YColumn {
    pub fn parse(name: &str) -> CliResult<Self> {
        match name {
            "mean_l2_scaled" => Ok(YColumn::MeanL2Scaled),
            "mean_linf" => Ok(YColumn::MeanLinf),
            "sign_rate" => Ok(YColumn::SignRate),
            other => Err(validation(format!(
                "unknown y column `{other}` (expected mean_l2_scaled, mean_linf or sign_rate)"
            ))),
        }
    }

    pub fn column(&self) -> &'static str {
        match self {
            YColumn::MeanL2Scaled => "mean_l2_scaled",
            YColumn::MeanLinf => "mean_linf",
            YColumn::SignRate => "sign_rate",
        }
    }

    fn axis_label(&self) -> &'static str {
        match self {
            YColumn::MeanL2Scaled => "scaled l2 error",
            YColumn::MeanLinf => "linf error",
            YColumn::SignRate => "sign recovery rate",
        }
    }

    /// Rates live on a fixed unit axis.
    fn unit_range(&self) -> bool {
        matches!(self, YColumn::SignRate)
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    /// (n, value) sorted by n.
    pub points: Vec<(f64, f64)>,
    /// Lower and upper band curves when requested.
    pub band: Option<(Vec<(f64, f64)>, Vec<(f64, f64)>)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    /// Filename suffix, e.g. `_rho0.9` or `_rho0.9_p128`.
    pub suffix: String,
    pub series: Vec<Series>,
}

fn estimator_rank(name: &str) -> (usize, String) {
    let fixed = ["lasso", "gls", "fgls"];
    match fixed.iter().position(|k| *k == name) {
        Some(i) => (i, String::new()),
        None => (fixed.len(), name.to_string()),
    }
}

/// Group rows into per-(rho, p) panels with one series per estimator.
pub fn build_panels(table: &ResultsTable, y: YColumn, bands: bool) -> CliResult<Vec<Panel>> {
    let mut needed = vec!["estimator", "n", "p", "rho", y.column()];
    if bands {
        if y != YColumn::MeanL2Scaled {
            return Err(validation(
                "confidence bands are only available for mean_l2_scaled",
            ));
        }
        needed.push("ci_lo_l2");
        needed.push("ci_hi_l2");
    }
    let indices = table
        .require_columns(&needed)
        .map_err(|missing| validation(format!("missing columns: {}", missing.join(", "))))?;
    let (est_i, n_i, p_i, rho_i, y_i) = (indices[0], indices[1], indices[2], indices[3], indices[4]);
    let band_i = if bands {
        Some((indices[5], indices[6]))
    } else {
        None
    };

    let mut p_labels: Vec<String> = table.rows.iter().map(|r| r[p_i].clone()).collect();
    p_labels.sort();
    p_labels.dedup();
    let multi_p = p_labels.len() > 1;

    // panel keys in numeric order, labels kept verbatim
    let mut keys: Vec<(f64, f64, String, String)> = Vec::new();
    for row in &table.rows {
        let rho_label = row[rho_i].clone();
        let p_label = row[p_i].clone();
        let rho: f64 = rho_label
            .parse()
            .map_err(|_| validation(format!("cannot parse rho `{rho_label}`")))?;
        let p: f64 = p_label
            .parse()
            .map_err(|_| validation(format!("cannot parse p `{p_label}`")))?;
        if !keys.iter().any(|(_, _, r, q)| *r == rho_label && *q == p_label) {
            keys.push((rho, p, rho_label, p_label));
        }
    }
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut panels = Vec::new();
    for (_, _, rho_label, p_label) in keys {
        let mut series_map: Vec<Series> = Vec::new();
        for row in &table.rows {
            if row[rho_i] != rho_label || row[p_i] != p_label {
                continue;
            }
            if row[y_i].is_empty() {
                continue; // cell with no completed replications
            }
            let n: f64 = row[n_i]
                .parse()
                .map_err(|_| validation(format!("cannot parse n `{}`", row[n_i])))?;
            let value: f64 = row[y_i]
                .parse()
                .map_err(|_| validation(format!("cannot parse value `{}`", row[y_i])))?;
            let name = row[est_i].clone();
            let entry = match series_map.iter_mut().find(|s| s.name == name) {
                Some(s) => s,
                None => {
                    series_map.push(Series {
                        name,
                        points: Vec::new(),
                        band: band_i.map(|_| (Vec::new(), Vec::new())),
                    });
                    series_map.last_mut().unwrap()
                }
            };
            entry.points.push((n, value));
            if let (Some((lo_i, hi_i)), Some((lo, hi))) = (band_i, entry.band.as_mut()) {
                if !row[lo_i].is_empty() && !row[hi_i].is_empty() {
                    lo.push((
                        n,
                        row[lo_i]
                            .parse()
                            .map_err(|_| validation("cannot parse ci_lo_l2"))?,
                    ));
                    hi.push((
                        n,
                        row[hi_i]
                            .parse()
                            .map_err(|_| validation("cannot parse ci_hi_l2"))?,
                    ));
                }
            }
        }
        for s in series_map.iter_mut() {
            s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some((lo, hi)) = s.band.as_mut() {
                lo.sort_by(|a, b| a.0.total_cmp(&b.0));
                hi.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
        }
        series_map.sort_by_key(|s| estimator_rank(&s.name));
        let title = if multi_p {
            format!("rho = {rho_label}, p = {p_label}")
        } else {
            format!("rho = {rho_label} (p = {p_label})")
        };
        let suffix = if multi_p {
            format!("_rho{rho_label}_p{p_label}")
        } else {
            format!("_rho{rho_label}")
        };
        panels.push(Panel {
            title,
            suffix,
            series: series_map,
        });
    }
    if panels.is_empty() {
        return Err(validation("results table has no data rows"));
    }
    Ok(panels)
}

fn series_color(name: &str) -> &'static str {
    match name {
        "lasso" => "#1f77b4",
        "gls" => "#2ca02c",
        "fgls" => "#d62728",
        _ => "#7f7f7f",
    }
}

fn nice_ticks(min: f64, max: f64) -> Vec<f64> {
    if !(max > min) {
        return vec![min];
    }
    let span = max - min;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let mut step = 10.0 * mag;
    for m in [1.0, 2.0, 2.5, 5.0] {
        if span / (m * mag) <= 6.0 {
            step = m * mag;
            break;
        }
    }
    let first = (min / step).ceil() as i64;
    let last = (max / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(value: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        let d = (-step.log10().floor()) as usize;
        if (step * 10f64.powi(d as i32)).fract().abs() > 1e-9 {
            d + 1
        } else {
            d
        }
    };
    let text = format!("{value:.decimals$}");
    if text == "-0" {
        "0".to_string()
    } else {
        text
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 620.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 392.0;

/// Render one panel as a standalone SVG document.
pub fn render_svg(panel: &Panel, y: YColumn) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in &panel.series {
        for (x, v) in &s.points {
            x_min = x_min.min(*x);
            x_max = x_max.max(*x);
            y_max = y_max.max(*v);
        }
        if let Some((lo, hi)) = &s.band {
            for (_, v) in lo.iter().chain(hi) {
                y_max = y_max.max(*v);
            }
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
    }
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    let (y_lo, y_hi) = if y.unit_range() {
        (0.0, 1.0)
    } else {
        let top = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
        (0.0, top)
    };

    let sx = |v: f64| LEFT + (v - x_min) / (x_max - x_min) * (RIGHT - LEFT);
    let sy = |v: f64| BOTTOM - (v - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        (LEFT + RIGHT) / 2.0,
        panel.title
    ));

    // axes
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\" stroke-width=\"1\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\" stroke-width=\"1\"/>\n"
    ));

    let x_ticks = nice_ticks(x_min, x_max);
    let x_step = if x_ticks.len() > 1 {
        x_ticks[1] - x_ticks[0]
    } else {
        1.0
    };
    for t in &x_ticks {
        let px = sx(*t);
        svg.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{BOTTOM}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            BOTTOM + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            BOTTOM + 20.0,
            tick_label(*t, x_step)
        ));
    }
    let y_ticks = nice_ticks(y_lo, y_hi);
    let y_step = if y_ticks.len() > 1 {
        y_ticks[1] - y_ticks[0]
    } else {
        1.0
    };
    for t in &y_ticks {
        let py = sy(*t);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT}\" y2=\"{py:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            LEFT - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            LEFT - 9.0,
            py + 4.0,
            tick_label(*t, y_step)
        ));
    }

    // axis labels
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">n</text>\n",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        y.axis_label()
    ));

    let points_attr = |pts: &[(f64, f64)]| -> String {
        pts.iter()
            .map(|(x, v)| format!("{:.2},{:.2}", sx(*x), sy(v.clamp(y_lo, y_hi))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    for s in &panel.series {
        let color = series_color(&s.name);
        if let Some((lo, hi)) = &s.band {
            for curve in [lo, hi] {
                if curve.len() > 1 {
                    svg.push_str(&format!(
                        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" stroke-dasharray=\"6 4\" opacity=\"0.8\" points=\"{}\"/>\n",
                        points_attr(curve)
                    ));
                }
            }
        }
        if s.points.len() > 1 {
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
                points_attr(&s.points)
            ));
        }
        for (x, v) in &s.points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                sx(*x),
                sy(v.clamp(y_lo, y_hi))
            ));
        }
    }

    // legend
    for (i, s) in panel.series.iter().enumerate() {
        let ly = TOP + 14.0 + i as f64 * 16.0;
        let color = series_color(&s.name);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            RIGHT - 108.0,
            RIGHT - 84.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            RIGHT - 78.0,
            ly + 4.0,
            s.name
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
