use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::{summarize, Method, SweepResult, SweepRow};
use crate::error::{Error, Result};

type Metric = (&'static str, &'static str, fn(&SweepRow) -> f64);

/// (file stem, axis label, column) of every plotted metric.
pub const PLOT_METRICS: [Metric; 6] = [
    ("jam_gain_db", "residual jamming gain [dB]", |r| r.jam_gain_db),
    ("malicious_sinr_db", "malicious detection SINR [dB]", |r| r.malicious_sinr_db),
    ("comm_gain_db", "communication gain [dB]", |r| r.comm_gain_db),
    ("sum_rate", "sum rate [bit/s/Hz]", |r| r.sum_rate),
    ("p_det_malicious", "malicious detection probability", |r| r.p_det_malicious),
    ("p_det_isac", "ISAC detection probability", |r| r.p_det_isac),
];

fn color(m: Method) -> RGBColor {
    match m {
        Method::SafeIsac => RGBColor(0x1f, 0x77, 0xb4),
        Method::RandomPhaseStar => RGBColor(0xd6, 0x27, 0x28),
        Method::ReflectOnlyRis => RGBColor(0x2c, 0xa0, 0x2c),
    }
}

fn plot_err<E: std::fmt::Debug>(e: E) -> Error {
    Error::Plot(format!("{e:?}"))
}

/// One SVG per metric: trial mean against the sweep value, one series per
/// method, error bars of one standard error. Returns the written paths.
pub fn emit_plots(result: &SweepResult, out_dir: &Path, x_label: &str) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        log::warn!("empty sweep result, no plots written");
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (stem, label, column) in PLOT_METRICS {
        let stats = summarize(result, column);
        let finite: Vec<_> = stats.iter().filter(|s| s.2.is_finite()).collect();
        if finite.is_empty() {
            continue;
        }
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &finite {
            x0 = x0.min(s.1);
            x1 = x1.max(s.1);
            y0 = y0.min(s.2 - s.3);
            y1 = y1.max(s.2 + s.3);
        }
        let xpad = if x1 > x0 { 0.05 * (x1 - x0) } else { 1.0 };
        let ypad = if y1 > y0 { 0.1 * (y1 - y0) } else { 1.0 };
        let path = out_dir.join(format!("{stem}.svg"));
        {
            let root = SVGBackend::new(&path, (800, 560)).into_drawing_area();
            root.fill(&WHITE).map_err(plot_err)?;
            let mut chart = ChartBuilder::on(&root)
                .caption(label, ("sans-serif", 20))
                .margin(12)
                .x_label_area_size(44)
                .y_label_area_size(70)
                .build_cartesian_2d((x0 - xpad)..(x1 + xpad), (y0 - ypad)..(y1 + ypad))
                .map_err(plot_err)?;
            chart.configure_mesh().x_desc(x_label).y_desc(label).draw().map_err(plot_err)?;
            for m in Method::ALL {
                let pts: Vec<_> = finite.iter().filter(|s| s.0 == m).map(|s| (s.1, s.2, s.3)).collect();
                if pts.is_empty() {
                    continue;
                }
                let c = color(m);
                chart
                    .draw_series(LineSeries::new(pts.iter().map(|p| (p.0, p.1)), c.stroke_width(2)))
                    .map_err(plot_err)?
                    .label(m.as_str())
                    .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], c.stroke_width(2)));
                chart
                    .draw_series(pts.iter().map(|p| ErrorBar::new_vertical(p.0, p.1 - p.2, p.1, p.1 + p.2, c.filled(), 8)))
                    .map_err(plot_err)?;
            }
            chart
                .configure_series_labels()
                .background_style(WHITE.mix(0.8))
                .border_style(BLACK)
                .draw()
                .map_err(plot_err)?;
            root.present().map_err(plot_err)?;
        }
        written.push(path);
    }
    Ok(written)
}
