//! Minimal line charts: linear axes, one polyline per series and a legend.
//! Output depends only on the input values, so identical data gives
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{bail, Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

/// Named points of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    /// Sorted by `x`.
    pub points: Vec<(f64, f64)>,
}

/// Which columns to plot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    /// Column splitting rows into series; one series when absent.
    pub series: Option<String>,
}

/// Groups CSV rows into series (first appearance order). Rows sharing a
/// series and an `x` value are averaged, so raw per-trial tables plot as
/// mean curves.
pub fn series_from_csv(text: &str, spec: &PlotSpec) -> Result<Vec<Series>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(Error::csv("<plot input>"))?.clone();
    let col = |name: &str| -> Result<usize> {
        match header.iter().position(|h| h == name) {
            Some(i) => Ok(i),
            None => bail!("column `{name}` not found (have {})", header.iter().collect::<Vec<_>>().join(", ")),
        }
    };
    let (xi, yi) = (col(&spec.x)?, col(&spec.y)?);
    let si = spec.series.as_deref().map(col).transpose()?;

    // Per series: (x, sum of y, count).
    type Sums = Vec<(f64, f64, usize)>;
    let mut acc: Vec<(String, Sums)> = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(Error::csv("<plot input>"))?;
        let num = |j: usize, what: &str| -> Result<f64> {
            let raw = row.get(j).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => bail!("line {}: `{what}` value `{raw}` is not a finite number", i + 2),
            }
        };
        let (x, y) = (num(xi, &spec.x)?, num(yi, &spec.y)?);
        let name = si.map_or_else(|| spec.y.clone(), |j| row.get(j).unwrap_or("").to_string());
        let slot = match acc.iter().position(|(n, _)| *n == name) {
            Some(p) => p,
            None => {
                acc.push((name, Vec::new()));
                acc.len() - 1
            }
        };
        let pts = &mut acc[slot].1;
        match pts.iter_mut().find(|p| p.0 == x) {
            Some(p) => {
                p.1 += y;
                p.2 += 1;
            }
            None => pts.push((x, y, 1)),
        }
    }
    if acc.is_empty() {
        bail!("no data rows to plot");
    }
    Ok(acc
        .into_iter()
        .map(|(name, pts)| {
            let mut points: Vec<(f64, f64)> = pts.into_iter().map(|(x, s, c)| (x, s / c as f64)).collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { name, points }
        })
        .collect())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick label with at most four significant digits and no trailing zeros.
fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let digits = (3 - v.abs().log10().floor() as i32).clamp(0, 10) as usize;
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

pub fn line_chart(series: &[Series], x_label: &str, y_label: &str) -> Result<String> {
    if series.iter().all(|s| s.points.is_empty()) {
        bail!("no data rows to plot");
    }
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = range(all().map(|p| p.0));
    let (y0, y1) = range(all().map(|p| p.1));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (bx, by) = (LEFT, TOP + ph);
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{bx:.2}" y1="{by:.2}" x2="{:.2}" y2="{by:.2}"/><line x1="{bx:.2}" y1="{TOP:.2}" x2="{bx:.2}" y2="{by:.2}"/></g>"#,
        LEFT + pw
    );
    s.push_str("<g class=\"ticks\">\n");
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{by:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            by + 5.0,
            by + 19.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{bx:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            bx - 5.0,
            bx - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-name="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            escape(&ser.name),
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn plot_csv_text(text: &str, spec: &PlotSpec) -> Result<String> {
    line_chart(&series_from_csv(text, spec)?, &spec.x, &spec.y)
}

pub fn plot_csv_file(csv_path: &Path, spec: &PlotSpec, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(csv_path).map_err(Error::io(csv_path))?;
    let svg = plot_csv_text(&text, spec)?;
    std::fs::write(out, svg).map_err(Error::io(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(series: Option<&str>) -> PlotSpec {
        PlotSpec { x: "rho".into(), y: "rate".into(), series: series.map(Into::into) }
    }

    fn polylines(svg: &str) -> Vec<&str> {
        svg.lines().filter(|l| l.starts_with("<polyline")).collect()
    }

    #[test]
    fn two_points_make_one_segment() {
        let svg = plot_csv_text("rho,rate\n0.1,0.5\n0.2,0.25\n", &spec(None)).unwrap();
        let lines = polylines(&svg);
        assert_eq!(lines.len(), 1);
        let pts = lines[0].split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(pts.split(' ').count(), 2);
    }

    #[test]
    fn series_and_averaging() {
        let text = "rho,method,rate\n0.1,a,0.2\n0.1,a,0.4\n0.2,a,0.1\n0.1,b,0.9\n0.2,b,0.8\n";
        let s = series_from_csv(text, &spec(Some("method"))).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].name, "a");
        assert!((s[0].points[0].1 - 0.3).abs() < 1e-15);
        let svg = plot_csv_text(text, &spec(Some("method"))).unwrap();
        assert_eq!(polylines(&svg).len(), 2);
        assert_eq!(svg, plot_csv_text(text, &spec(Some("method"))).unwrap());
    }

    #[test]
    fn errors() {
        assert!(plot_csv_text("rho,rate\n", &spec(None)).is_err());
        assert!(plot_csv_text("", &spec(None)).is_err());
        let e = plot_csv_text("rho,value\n0.1,1\n", &spec(None)).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(plot_csv_text("rho,rate\n0.1,abc\n", &spec(None)).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(tick_label(0.025), "0.025");
        assert_eq!(tick_label(0.2), "0.2");
        assert_eq!(tick_label(1500.0), "1500");
        assert_eq!(tick_label(0.0), "0");
        assert_eq!(tick_label(1.0 / 3.0), "0.3333");
    }

    #[test]
    fn escapes_names() {
        let svg = plot_csv_text("rho,method,rate\n0.1,<a&b>,1\n", &spec(Some("method"))).unwrap();
        assert!(svg.contains("&lt;a&amp;b&gt;"));
    }
}
