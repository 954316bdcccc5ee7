use std::fmt::Write as _;
use std::path::Path;

use super::sweep::{SweepReport, WallClock};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "h,k,reE_num,imE_num,reE_thm1,imE_thm1,reE_thm2,imE_thm2,reE_red,imE_red,abs_gap_re,abs_gap_im,ratio_im";

fn num(v: Option<f64>) -> String {
    match v {
        // no signed zeros in the table
        Some(0.0) => format!("{:.16e}", 0.0),
        Some(x) => format!("{x:.16e}"),
        None => "nan".into(),
    }
}

/// One row per `(h, k)` in sweep order; absent values are written as `nan`.
pub fn to_csv(report: &SweepReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in &report.records {
        let cols = [
            num(Some(r.h)),
            r.k.to_string(),
            num(r.e_num.map(|e| e.re)),
            num(r.e_num.map(|e| e.im)),
            num(r.e_thm1.map(|e| e.re)),
            num(r.e_thm1.map(|e| e.im)),
            num(r.e_thm2.map(|e| e.re)),
            num(r.e_thm2.map(|e| e.im)),
            num(r.e_red.map(|e| e.re)),
            num(r.e_red.map(|e| e.im)),
            num(r.abs_gap_re),
            num(r.abs_gap_im),
            num(r.ratio_im),
        ];
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}

pub fn to_json(report: &SweepReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io {
        path: "report.json".into(),
        message: e.to_string(),
    })?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<SweepReport> {
    serde_json::from_str(text).map_err(|e| Error::Io {
        path: "report.json".into(),
        message: e.to_string(),
    })
}

fn write(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// A polyline series for [`svg_plot`].
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Minimal line chart: one `<polyline>` per non-empty series, axes scaled to
/// the data, optionally logarithmic.
pub fn svg_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log: bool) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let tx = |v: f64| if log { v.log10() } else { v };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(x, y)| (tx(x), tx(y))))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(
        s,
        "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        w - 2.0 * m,
        h - 2.0 * m
    );
    let scale = if log { " (log10)" } else { "" };
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}{scale}</text>",
        w / 2.0,
        h - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">{}{scale}</text>",
        h / 2.0,
        h / 2.0,
        escape(ylabel)
    );
    let _ = writeln!(s, "<text x=\"{m}\" y=\"{}\">{:.3e}</text>", h - m + 15.0, x0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3e}</text>", w - m, h - m + 15.0, x1);
    let _ = writeln!(s, "<text x=\"5\" y=\"{}\">{:.3e}</text>", h - m, y0);
    let _ = writeln!(s, "<text x=\"5\" y=\"{}\">{:.3e}</text>", m, y1);
    for (i, ser) in series.iter().enumerate() {
        let coords: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| (tx(x), tx(y)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if coords.is_empty() {
            continue;
        }
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"><title>{}</title></polyline>",
            coords.join(" "),
            escape(&ser.name)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>",
            m + 10.0,
            m + 18.0 * (i + 1) as f64,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn ratio_plot(report: &SweepReport) -> String {
    let central: Vec<_> = report.records.iter().filter(|r| r.central).collect();
    let band = report.config.tolerances.ratio_band;
    let series = vec![
        Series {
            name: "ImE_num / ImE_ref (central k)".into(),
            points: central.iter().filter_map(|r| Some((r.h, r.ratio_im?))).collect(),
        },
        Series {
            name: format!("1 + {band} h^(1/3)"),
            points: central.iter().map(|r| (r.h, 1.0 + band * r.h.cbrt())).collect(),
        },
        Series {
            name: format!("1 - {band} h^(1/3)"),
            points: central.iter().map(|r| (r.h, 1.0 - band * r.h.cbrt())).collect(),
        },
    ];
    svg_plot("Width ratio against h", "h", "ratio", &series, false)
}

fn error_plot(report: &SweepReport) -> String {
    let mut series = Vec::new();
    for f in &report.slopes {
        let label = match f.slope {
            Some(s) => format!("{} (slope {s:.3})", f.name),
            None => f.name.clone(),
        };
        series.push(Series {
            name: label,
            points: f.points.clone(),
        });
    }
    svg_plot("Errors against h", "h", "error", &series, true)
}

/// Writes `resonances.csv`, `report.json`, `width_ratio.svg` and `errors.svg`.
pub fn emit(report: &SweepReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    write(dir, "resonances.csv", &to_csv(report))?;
    write(dir, "report.json", &to_json(report)?)?;
    write(dir, "width_ratio.svg", &ratio_plot(report))?;
    write(dir, "errors.svg", &error_plot(report))?;
    Ok(())
}

/// Wall-clock times go to their own file so that `report.json` is reproducible.
pub fn write_wall_clock(wall: &WallClock, dir: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(wall).map_err(|e| Error::Io {
        path: "timings.json".into(),
        message: e.to_string(),
    })?;
    write(dir, "timings.json", &(text + "\n"))
}
