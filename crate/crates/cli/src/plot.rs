//! Minimal deterministic SVG line/scatter plots of CSV columns.

use std::fmt::Write as _;

use dimerlab::numerics::power_law_fit;

use crate::table::fmt_g_prec;
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct PlotSpec {
    pub x: String,
    /// One series per column.
    pub ys: Vec<String>,
    /// Error columns, one per series or a single one shared by all.
    pub errs: Vec<String>,
    pub logx: bool,
    pub logy: bool,
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Series {
    name: String,
    pts: Vec<(f64, f64, f64)>,
}

fn mismatch(msg: String) -> CliError {
    CliError::Validation(format!("schema mismatch: {msg}"))
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn read(text: &str, spec: &PlotSpec) -> Result<Vec<Series>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers: Vec<String> =
        rdr.headers().map_err(|e| mismatch(format!("unreadable header: {e}")))?.iter().map(String::from).collect();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| mismatch(format!("no column {name:?} (columns: {})", headers.join(", "))))
    };
    if spec.ys.is_empty() {
        return Err(CliError::Validation("no y column given".into()));
    }
    if !(spec.errs.is_empty() || spec.errs.len() == 1 || spec.errs.len() == spec.ys.len()) {
        return Err(CliError::Validation("give one error column, or one per y column".into()));
    }
    let xi = col(&spec.x)?;
    let yi: Vec<usize> = spec.ys.iter().map(|y| col(y)).collect::<Result<_, _>>()?;
    let ei: Vec<usize> = spec.errs.iter().map(|e| col(e)).collect::<Result<_, _>>()?;
    let records: Vec<csv::StringRecord> =
        rdr.records().collect::<Result<_, _>>().map_err(|e| mismatch(format!("bad row: {e}")))?;
    if records.is_empty() {
        return Err(CliError::Validation("CSV has no data rows".into()));
    }
    let num = |r: &csv::StringRecord, i: usize, line: usize| -> Result<f64, CliError> {
        let s = r.get(i).unwrap_or("");
        s.trim()
            .parse::<f64>()
            .map_err(|_| mismatch(format!("row {line}: {:?} in column {:?} is not a number", s, headers[i])))
    };
    let mut out = Vec::new();
    for (k, &y) in yi.iter().enumerate() {
        let mut pts = Vec::new();
        for (line, r) in records.iter().enumerate() {
            let (xv, yv) = (num(r, xi, line + 2)?, num(r, y, line + 2)?);
            let ev = match ei.len() {
                0 => 0.0,
                1 => num(r, ei[0], line + 2)?,
                _ => num(r, ei[k], line + 2)?,
            };
            let ok = xv.is_finite() && yv.is_finite() && (!spec.logx || xv > 0.0) && (!spec.logy || yv > 0.0);
            if ok {
                pts.push((xv, yv, if ev.is_finite() { ev.abs() } else { 0.0 }));
            }
        }
        if pts.is_empty() {
            return Err(CliError::Validation(format!("series {:?} has no plottable points", spec.ys[k])));
        }
        out.push(Series { name: spec.ys[k].clone(), pts });
    }
    Ok(out)
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(vals: impl Iterator<Item = f64>, log: bool) -> Axis {
        let t: Vec<f64> = vals.map(|v| if log { v.log10() } else { v }).collect();
        let (mut lo, mut hi) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if hi - lo < 1e-12 * hi.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Axis { lo: lo - pad, hi: hi + pad, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let mut t: Vec<f64> = (self.lo.ceil() as i32..=self.hi.floor() as i32).map(|e| 10f64.powi(e)).collect();
            if t.len() < 2 {
                t = vec![10f64.powf(self.lo), 10f64.powf(0.5 * (self.lo + self.hi)), 10f64.powf(self.hi)];
            }
            return t;
        }
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

pub fn render(text: &str, spec: &PlotSpec) -> Result<String, CliError> {
    let series = read(text, spec)?;
    let all = || series.iter().flat_map(|s| s.pts.iter());
    let ax = Axis::new(all().map(|p| p.0), spec.logx);
    let ylo = all().map(|p| if spec.logy && p.1 - p.2 <= 0.0 { p.1 } else { p.1 - p.2 });
    let ay = Axis::new(ylo.chain(all().map(|p| p.1 + p.2)), spec.logy);
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let px = |v: f64| LEFT + ax.frac(v) * pw;
    let py = |v: f64| TOP + (1.0 - ay.frac(v)) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for t in ax.ticks() {
        let x = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##,
            TOP + ph,
            TOP + ph + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            fmt_g_prec(t, 4)
        );
    }
    for t in ay.ticks() {
        let y = py(t);
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#333"/>"##, LEFT - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            fmt_g_prec(t, 4)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 15.0,
        esc(&spec.x)
    );
    let ylabel = esc(&spec.ys.join(", "));
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">{ylabel}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (k, ser) in series.iter().enumerate() {
        let c = COLORS[k % COLORS.len()];
        let mut pts = ser.pts.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for p in &pts {
            if p.2 > 0.0 {
                let lo = if spec.logy && p.1 - p.2 <= 0.0 { p.1 } else { p.1 - p.2 };
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{c}"/>"#,
                    py(lo),
                    py(p.1 + p.2),
                    x = px(p.0)
                );
            }
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, px(p.0), py(p.1));
        }
    }
    // legend, with the fitted log-log slope where it applies
    for (k, ser) in series.iter().enumerate() {
        let c = COLORS[k % COLORS.len()];
        let y = TOP + 18.0 + 18.0 * k as f64;
        let mut label = esc(&ser.name);
        if spec.logx && spec.logy && ser.pts.len() >= 2 {
            let x: Vec<f64> = ser.pts.iter().map(|p| p.0).collect();
            let v: Vec<f64> = ser.pts.iter().map(|p| p.1).collect();
            if let Ok(f) = power_law_fit(&x, &v, None) {
                let err = if f.exponent_err.is_finite() {
                    format!(" ± {}", fmt_g_prec(f.exponent_err, 2))
                } else {
                    String::new()
                };
                let _ = write!(label, " (slope {}{err})", fmt_g_prec(f.exponent, 4));
            }
        }
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{c}" stroke-width="2"/>"#,
            LEFT + 10.0,
            LEFT + 30.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, LEFT + 36.0, y + 4.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(ys: &[&str]) -> PlotSpec {
        PlotSpec { x: "R".into(), ys: ys.iter().map(|s| s.to_string()).collect(), errs: vec![], logx: true, logy: true }
    }

    #[test]
    fn slope_annotation_and_determinism() {
        let mut csv = String::from("R,y\n");
        for r in [2.0f64, 4.0, 8.0, 16.0, 32.0] {
            csv.push_str(&format!("{r},{}\n", 3.0 * r.powi(-2)));
        }
        let a = render(&csv, &spec(&["y"])).unwrap();
        assert!(a.contains("slope -2"), "{a}");
        assert_eq!(a, render(&csv, &spec(&["y"])).unwrap());
    }

    #[test]
    fn legend_lists_each_series() {
        let csv = "R,a,b\n1,1,2\n2,0.5,1\n4,0.25,0.5\n";
        let out = render(csv, &spec(&["a", "b"])).unwrap();
        assert_eq!(out.matches("<polyline").count(), 2);
        assert!(out.contains(">a (slope") && out.contains(">b (slope"));
    }

    #[test]
    fn errors() {
        assert!(render("R,y\n", &spec(&["y"])).is_err());
        assert!(render("", &spec(&["y"])).is_err());
        assert!(render("R,y\n1,2\n", &spec(&["z"])).is_err());
        assert!(render("R,y\n1,abc\n", &spec(&["y"])).is_err());
        // nothing positive on a log axis
        assert!(render("R,y\n1,-2\n", &spec(&["y"])).is_err());
    }

    #[test]
    fn linear_ticks() {
        let a = Axis { lo: 0.0, hi: 1.0, log: false };
        assert_eq!(a.ticks(), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
    }
}
