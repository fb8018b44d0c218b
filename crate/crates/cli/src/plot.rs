use std::path::Path;

use plotters::prelude::*;

use crate::error::{CliError, Result};

/// Reads `(msgs_per_node_cum, rel_error)` pairs from a trace CSV, skipping
/// rows without a relative error.
pub fn read_trace(path: &Path) -> Result<Vec<(u64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read overlay {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Config(format!("overlay {} has no `{name}` column", path.display())))
    };
    let (mi, ei) = (col("msgs_per_node_cum")?, col("rel_error")?);
    let mut out = Vec::new();
    for (no, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        let bad = || CliError::Config(format!("overlay {} line {}: malformed row", path.display(), no + 2));
        let rel = fields.get(ei).ok_or_else(bad)?.trim();
        if rel.is_empty() {
            continue;
        }
        let msgs = fields.get(mi).ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        out.push((msgs, rel.parse().map_err(|_| bad())?));
    }
    Ok(out)
}

/// Relative error against cumulative messages per node, log-scaled y axis.
pub fn convergence_svg(ours: &[(u64, f64)], overlay: Option<&[(u64, f64)]>) -> Result<String> {
    let floor = 1e-12;
    let all = ours.iter().chain(overlay.unwrap_or_default());
    let x_max = all.clone().map(|p| p.0).max().unwrap_or(1).max(1) as f64;
    let y_max = all.clone().map(|p| p.1).fold(floor, f64::max) * 2.0;
    let y_min = all.map(|p| p.1).filter(|&v| v > 0.0).fold(y_max, f64::min).max(floor) / 2.0;

    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (800, 500)).into_drawing_area();
        let draw = |e: &dyn std::fmt::Display| CliError::Config(format!("plot: {e}"));
        root.fill(&WHITE).map_err(|e| draw(&e))?;
        let mut chart = ChartBuilder::on(&root)
            .margin(15)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(0f64..x_max, (y_min..y_max).log_scale())
            .map_err(|e| draw(&e))?;
        chart
            .configure_mesh()
            .x_desc("messages per node")
            .y_desc("relative error")
            .draw()
            .map_err(|e| draw(&e))?;
        let clip = |p: &(u64, f64)| (p.0 as f64, p.1.max(y_min));
        chart
            .draw_series(LineSeries::new(ours.iter().map(clip), &BLUE))
            .map_err(|e| draw(&e))?
            .label("this run")
            .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLUE));
        if let Some(other) = overlay {
            chart
                .draw_series(LineSeries::new(other.iter().map(clip), &RED))
                .map_err(|e| draw(&e))?
                .label("overlay")
                .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], RED));
        }
        chart
            .configure_series_labels()
            .border_style(BLACK)
            .draw()
            .map_err(|e| draw(&e))?;
        root.present().map_err(|e| draw(&e))?;
    }
    Ok(svg)
}
