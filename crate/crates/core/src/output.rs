//! Trajectory serialization: CSV tables, simple SVG line plots, and
//! wave-metric summaries. All writers are deterministic for a given
//! input.

use std::io::Write;

use crate::dynamics::{RunMetadata, Trajectory, WaveMetrics};
use crate::error::Result;
use crate::system::Model;

/// Format with 12 significant digits, trimmed to the shortest decimal
/// form that round-trips the rounded value.
pub fn fmt_sig12(x: f64) -> String {
    debug_assert!(x.is_finite());
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("round-trip");
    format!("{rounded}")
}

fn write_metadata_block<W: Write>(mut sink: W, meta: &RunMetadata) -> Result<()> {
    let sys = &meta.system;
    let model = &meta.model;
    writeln!(sink, "# n_spins={}", sys.n())?;
    writeln!(sink, "# geometry={}", sys.geometry().label())?;
    writeln!(sink, "# model={}", model.model.tag())?;
    writeln!(sink, "# m_neighbors={}", model.m_neighbors)?;
    writeln!(sink, "# omega1={}", fmt_sig12(model.omega1))?;
    writeln!(sink, "# d1={}", fmt_sig12(model.d1))?;
    if let Some(omega0) = model.omega0 {
        writeln!(sink, "# omega0={}", fmt_sig12(omega0))?;
    }
    if let Some(j) = model.j_coupling {
        writeln!(sink, "# j_coupling={}", fmt_sig12(j))?;
    }
    writeln!(sink, "# variant={}", model.variant.tag())?;
    let species: String = sys.species().iter().collect();
    writeln!(sink, "# species={species}")?;
    let gammas: Vec<String> = sys
        .gammas()
        .iter()
        .map(|(label, value)| format!("{label}:{}", fmt_sig12(*value)))
        .collect();
    writeln!(sink, "# gammas={}", gammas.join(","))?;
    match meta.flipped_site {
        Some(site) => writeln!(sink, "# flipped_site={site}")?,
        None => writeln!(sink, "# flipped_site=none")?,
    }
    if let Some(dt) = meta.dt {
        writeln!(sink, "# dt={}", fmt_sig12(dt))?;
    }
    if model.model == Model::AlternatingHetero {
        writeln!(
            sink,
            "# alternating_defect={}",
            sys.has_adjacent_like_pair()
        )?;
    }
    Ok(())
}

/// Write `t,P1,...,PN,Ptotal` rows at 12 significant digits, preceded by
/// a `# key=value` comment block recording the generating config.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut sink: W) -> Result<()> {
    if let Some(meta) = traj.metadata() {
        write_metadata_block(&mut sink, meta)?;
    }
    writeln!(sink, "# t_max={}", fmt_sig12(*traj.times().last().unwrap()))?;
    writeln!(sink, "# n_samples={}", traj.n_samples())?;
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=traj.n_sites()).map(|k| format!("P{k}")))
        .chain(std::iter::once("Ptotal".to_string()))
        .collect();
    writeln!(sink, "{}", header.join(","))?;
    for (i, &t) in traj.times().iter().enumerate() {
        let mut row = Vec::with_capacity(traj.n_sites() + 2);
        row.push(fmt_sig12(t));
        for k in 1..=traj.n_sites() {
            row.push(fmt_sig12(traj.polarization(i, k)));
        }
        row.push(fmt_sig12(traj.total()[i]));
        writeln!(sink, "{}", row.join(","))?;
    }
    Ok(())
}

/// Combined total-polarization table for a bundle of runs sharing a time
/// grid: `t,<curve>,<curve>,...`.
pub fn write_totals_csv<W: Write>(
    curves: &[(&str, &Trajectory)],
    mut sink: W,
) -> Result<()> {
    assert!(!curves.is_empty());
    let times = curves[0].1.times();
    for (_, traj) in curves {
        assert_eq!(traj.times(), times, "bundle curves must share a time grid");
    }
    let labels: Vec<&str> = curves.iter().map(|(label, _)| *label).collect();
    writeln!(sink, "# total polarization P(t) per curve")?;
    writeln!(sink, "# curves={}", labels.join(","))?;
    writeln!(sink, "# n_samples={}", times.len())?;
    writeln!(sink, "t,{}", labels.join(","))?;
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![fmt_sig12(t)];
        for (_, traj) in curves {
            row.push(fmt_sig12(traj.total()[i]));
        }
        writeln!(sink, "{}", row.join(","))?;
    }
    Ok(())
}

/// Wavefront summary as a small TOML document.
pub fn write_metrics<W: Write>(metrics: &WaveMetrics, mut sink: W) -> Result<()> {
    writeln!(sink, "min_total = {}", fmt_sig12(metrics.min_total))?;
    writeln!(
        sink,
        "amplification = {}",
        fmt_sig12(metrics.amplification)
    )?;
    writeln!(sink)?;
    writeln!(sink, "# first zero crossing per site; sites that never cross are omitted")?;
    writeln!(sink, "[arrival_times]")?;
    for (i, arrival) in metrics.arrival_times.iter().enumerate() {
        if let Some(t) = arrival {
            writeln!(sink, "s{} = {}", i + 1, fmt_sig12(*t))?;
        }
    }
    Ok(())
}

const SVG_WIDTH: f64 = 840.0;
const SVG_HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn fmt_tick(v: f64) -> String {
    let rounded = (v * 1000.0).round() / 1000.0;
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded}")
}

fn fmt_coord(v: f64) -> String {
    format!("{:.2}", v)
}

/// Render per-spin polarizations plus the total as a self-contained SVG
/// line plot: one polyline per series, axis ticks, and a legend of site
/// indices. A single-sample trajectory renders markers instead of lines.
pub fn render_svg<W: Write>(traj: &Trajectory, mut sink: W) -> Result<()> {
    let times = traj.times();
    let n_sites = traj.n_sites();

    // series: each spin, then the total
    let mut series: Vec<(String, Vec<f64>, &str)> = Vec::with_capacity(n_sites + 1);
    for k in 1..=n_sites {
        series.push((
            format!("spin {k}"),
            traj.site_series(k),
            PALETTE[(k - 1) % PALETTE.len()],
        ));
    }
    series.push(("total".to_string(), traj.total().to_vec(), "#000000"));

    let (t0, t1) = (times[0], *times.last().unwrap());
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, values, _) in &series {
        for &v in values {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    let pad = 0.05 * (y_max - y_min).max(1e-9);
    let (y_min, y_max) = (y_min - pad, y_max + pad);

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |t: f64| {
        if t1 > t0 {
            MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w
        } else {
            MARGIN_LEFT + plot_w / 2.0
        }
    };
    let y_of = |p: f64| MARGIN_TOP + (y_max - p) / (y_max - y_min) * plot_h;

    writeln!(sink, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        sink,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    )?;
    writeln!(
        sink,
        r#"<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    )?;

    // axes
    let x_axis_y = MARGIN_TOP + plot_h;
    writeln!(
        sink,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        fmt_coord(MARGIN_LEFT),
        fmt_coord(x_axis_y),
        fmt_coord(MARGIN_LEFT + plot_w),
        fmt_coord(x_axis_y)
    )?;
    writeln!(
        sink,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        fmt_coord(MARGIN_LEFT),
        fmt_coord(MARGIN_TOP),
        fmt_coord(MARGIN_LEFT),
        fmt_coord(x_axis_y)
    )?;

    // ticks
    let n_ticks = 6;
    for i in 0..n_ticks {
        let f = i as f64 / (n_ticks - 1) as f64;
        let t = t0 + f * (t1 - t0);
        let x = x_of(t);
        writeln!(
            sink,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>"#,
            fmt_coord(x),
            fmt_coord(x_axis_y),
            fmt_coord(x_axis_y + 5.0)
        )?;
        writeln!(
            sink,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            fmt_coord(x),
            fmt_coord(x_axis_y + 20.0),
            fmt_tick(t)
        )?;
        let p = y_min + f * (y_max - y_min);
        let y = y_of(p);
        writeln!(
            sink,
            r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="black"/>"#,
            fmt_coord(y),
            fmt_coord(MARGIN_LEFT - 5.0),
            fmt_coord(MARGIN_LEFT)
        )?;
        writeln!(
            sink,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
            fmt_coord(MARGIN_LEFT - 8.0),
            fmt_coord(y + 4.0),
            fmt_tick(p)
        )?;
    }
    writeln!(
        sink,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">t</text>"#,
        fmt_coord(MARGIN_LEFT + plot_w / 2.0),
        fmt_coord(SVG_HEIGHT - 8.0)
    )?;
    writeln!(
        sink,
        r#"<text x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {0})">polarization</text>"#,
        fmt_coord(MARGIN_TOP + plot_h / 2.0)
    )?;

    // data
    for (_, values, color) in &series {
        if times.len() == 1 {
            writeln!(
                sink,
                r#"<circle cx="{}" cy="{}" r="3" fill="{}"/>"#,
                fmt_coord(x_of(times[0])),
                fmt_coord(y_of(values[0])),
                color
            )?;
        } else {
            let points: Vec<String> = times
                .iter()
                .zip(values)
                .map(|(&t, &p)| format!("{},{}", fmt_coord(x_of(t)), fmt_coord(y_of(p))))
                .collect();
            writeln!(
                sink,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                color,
                points.join(" ")
            )?;
        }
    }

    // legend
    let legend_x = MARGIN_LEFT + plot_w + 16.0;
    for (i, (label, _, color)) in series.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        writeln!(
            sink,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>"#,
            fmt_coord(legend_x),
            fmt_coord(y),
            fmt_coord(legend_x + 22.0),
            fmt_coord(y),
            color
        )?;
        writeln!(
            sink,
            r#"<text x="{}" y="{}" font-size="12">{}</text>"#,
            fmt_coord(legend_x + 28.0),
            fmt_coord(y + 4.0),
            label
        )?;
    }
    writeln!(sink, "</svg>")?;
    Ok(())
}
