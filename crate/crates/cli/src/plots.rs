//! SVG plots of diagnostics, comparison and regime-map CSVs.

use std::collections::BTreeMap;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use ksns_core::diagnostics::{read_csv, HEADER};
use plotters::prelude::*;

use crate::error::{CliError, Result};
use crate::run::{read_regime_map, COMPARISON_HEADER, REGIME_HEADER};

/// What `emit_plots` produced.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct PlotReport {
    pub files: Vec<PathBuf>,
    /// Cells drawn across all heatmaps.
    pub heatmap_cells: usize,
}

fn plot_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Plot(e.to_string())
}

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn span(values: impl Iterator<Item = f64>) -> Range<f64> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        0.0..1.0
    } else if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        lo - pad..hi + pad
    } else {
        let pad = 0.05 * (hi - lo);
        lo - pad..hi + pad
    }
}

fn line_plot(path: &Path, title: &str, y_desc: &str, series: &[Series]) -> Result<()> {
    let root = SVGBackend::new(path, (900, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let xs = span(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let ys = span(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(80)
        .build_cartesian_2d(xs, ys)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("t")
        .y_desc(y_desc)
        .y_label_formatter(&|v| format!("{v:.3e}"))
        .draw()
        .map_err(plot_err)?;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts = s.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite());
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(plot_err)?
            .label(s.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    if series.len() > 1 {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
    }
    root.present().map_err(plot_err)?;
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "plot".into(), |s| s.to_string_lossy().into_owned())
}

/// `E2`, `mix_sq`, `u_l2_sq` and residual plots of one diagnostics file.
fn plot_diagnostics(csv: &Path, out: &Path, report: &mut PlotReport) -> Result<()> {
    let recs = read_csv(csv)?;
    let name = stem(csv);
    let column = |col: &str| -> Vec<(f64, f64)> { recs.iter().map(|r| (r.t, r.get(col).unwrap())).collect() };
    for (col, title) in [("E2", "||rho - rho_m||^2"), ("mix_sq", "mixing norm"), ("u_l2_sq", "||u||^2")] {
        let path = out.join(format!("{name}_{col}.svg"));
        line_plot(&path, title, col, &[Series { label: col.into(), points: column(col) }])?;
        report.files.push(path);
    }
    let residuals: Vec<Series> = ["res_ks_energy", "res_ns_energy", "res_static_identity", "res_lemA3"]
        .iter()
        .map(|col| Series { label: col.to_string(), points: column(col).into_iter().map(|(t, v)| (t, v.abs())).collect() })
        .collect();
    let path = out.join(format!("{name}_residuals.svg"));
    line_plot(&path, "identity residuals (absolute)", "|residual|", &residuals)?;
    report.files.push(path);
    Ok(())
}

fn read_table(path: &Path, header: &str) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(CliError::Plot(format!("{}: unexpected header", path.display())));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| CliError::Plot(format!("{}: malformed row {l:?}", path.display())))
        })
        .collect()
}

/// One overlay of `||r||^2` against `t`, one line per comparison file.
fn plot_comparison(csvs: &[&PathBuf], out: &Path, report: &mut PlotReport) -> Result<()> {
    let mut series = Vec::new();
    for csv in csvs {
        let rows = read_table(csv, COMPARISON_HEADER)?;
        let s = stem(csv);
        let label = s.strip_prefix("compare_B").map_or(s.clone(), |b| format!("B = {b}"));
        series.push(Series { label, points: rows.iter().map(|r| (r[0], r[1])).collect() });
    }
    let path = out.join("comparison_r_sq.svg");
    line_plot(&path, "||rho_NS - rho_static||^2", "r_sq", &series)?;
    report.files.push(path);
    Ok(())
}

fn outcome_color(kind: &str) -> RGBColor {
    match kind {
        "CompletedHorizon" => RGBColor(44, 160, 44),
        "BlowupDetected" => RGBColor(214, 39, 40),
        "ResolutionLoss" => RGBColor(255, 127, 14),
        _ => RGBColor(150, 150, 150),
    }
}

/// Outcome heatmap over the `(g, B)` axes of a regime map.
fn plot_regime(csv: &Path, out: &Path, report: &mut PlotReport) -> Result<()> {
    let rows = read_regime_map(csv)?;
    let index = |vals: Vec<f64>| -> BTreeMap<u64, usize> {
        let mut v = vals;
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.iter().enumerate().map(|(i, x)| (x.to_bits(), i)).collect()
    };
    let gs = index(rows.iter().map(|r| r.g).collect());
    let bs = index(rows.iter().map(|r| r.b).collect());
    let g_of: Vec<f64> = {
        let mut v: Vec<(usize, f64)> = gs.iter().map(|(k, i)| (*i, f64::from_bits(*k))).collect();
        v.sort_by_key(|p| p.0);
        v.into_iter().map(|p| p.1).collect()
    };
    let b_of: Vec<f64> = {
        let mut v: Vec<(usize, f64)> = bs.iter().map(|(k, i)| (*i, f64::from_bits(*k))).collect();
        v.sort_by_key(|p| p.0);
        v.into_iter().map(|p| p.1).collect()
    };

    let path = out.join(format!("{}_heatmap.svg", stem(csv)));
    let root = SVGBackend::new(&path, (700, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("outcome by (g, B): green completed, red blowup, orange resolution loss", ("sans-serif", 16))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(0.0..gs.len().max(1) as f64, 0.0..bs.len().max(1) as f64)
        .map_err(plot_err)?;
    let label = |axis: &[f64], v: f64| {
        let i = v.floor();
        if (v - i - 0.5).abs() < 1e-9 && (i as usize) < axis.len() {
            format!("{}", axis[i as usize])
        } else {
            String::new()
        }
    };
    chart
        .configure_mesh()
        .disable_mesh()
        .x_desc("g")
        .y_desc("B")
        .x_labels(4 * gs.len().max(1) + 1)
        .y_labels(4 * bs.len().max(1) + 1)
        .x_label_formatter(&|v| label(&g_of, *v))
        .y_label_formatter(&|v| label(&b_of, *v))
        .draw()
        .map_err(plot_err)?;
    let cells: Vec<Rectangle<(f64, f64)>> = rows
        .iter()
        .map(|r| {
            let (i, j) = (gs[&r.g.to_bits()] as f64, bs[&r.b.to_bits()] as f64);
            Rectangle::new([(i, j), (i + 1.0, j + 1.0)], outcome_color(&r.outcome).filled())
        })
        .collect();
    report.heatmap_cells += cells.len();
    chart.draw_series(cells).map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    drop(chart);
    drop(root);
    report.files.push(path);
    Ok(())
}

fn first_line(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path)?;
    Ok(text.lines().next().unwrap_or("").to_string())
}

/// Plot every CSV by its header: diagnostics files get line plots,
/// comparison files share one overlay, regime maps get a heatmap.
pub fn emit_plots(csvs: &[PathBuf], out: &Path) -> Result<PlotReport> {
    fs::create_dir_all(out)?;
    let mut report = PlotReport::default();
    let mut comparisons = Vec::new();
    let diag_header = HEADER.join(",");
    for csv in csvs {
        let header = first_line(csv)?;
        if header == diag_header {
            plot_diagnostics(csv, out, &mut report)?;
        } else if header == COMPARISON_HEADER {
            comparisons.push(csv);
        } else if header == REGIME_HEADER {
            plot_regime(csv, out, &mut report)?;
        } else {
            return Err(CliError::Plot(format!("{}: missing or unknown columns", csv.display())));
        }
    }
    if !comparisons.is_empty() {
        plot_comparison(&comparisons, out, &mut report)?;
    }
    Ok(report)
}
