//! Static report charts. Every chart carries the exact numbers it plots
//! as CSV next to the SVG.

use ixdrl_core::analyzers::{InterestingnessRecord, SeriesKey};
use ixdrl_core::attribution::{GlobalImportance, LocalExplanation};

use crate::svg::{color, scale, Svg};
use crate::tables::{csv_bytes, interestingness_columns};

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub svg: String,
    pub csv: Vec<u8>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChartError {
    #[error("no records for trace {0}")]
    UnknownTrace(String),
    #[error("nothing to plot")]
    Empty,
}

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One polygon per profile over `axes`, each spanning `[-1, 1]`. Missing
/// values are drawn at 0 and left empty in the CSV. Fewer than three axes
/// cannot form a polygon, so a grouped bar chart is drawn instead.
pub fn radar(title: &str, axes: &[String], profiles: &[(String, Vec<Option<f64>>)]) -> Chart {
    let csv = csv_bytes(
        &["profile", "axis", "value"],
        profiles.iter().flat_map(|(label, vals)| {
            axes.iter()
                .zip(vals)
                .map(move |(a, v)| vec![label.clone(), a.clone(), opt(*v)])
        }),
    );
    if axes.len() < 3 {
        return Chart {
            svg: bars(title, axes, profiles),
            csv,
        };
    }
    let (w, h) = (560.0, 520.0);
    let (cx, cy, r) = (w / 2.0 - 60.0, h / 2.0 + 10.0, 180.0);
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 24.0, 16.0, "middle", title);
    let n = axes.len();
    let angle = |i: usize| -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
    let at = |i: usize, v: f64| {
        let rad = (v.clamp(-1.0, 1.0) + 1.0) / 2.0 * r;
        (cx + rad * angle(i).cos(), cy + rad * angle(i).sin())
    };
    for ring in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let pts: Vec<(f64, f64)> = (0..n).map(|i| at(i, ring)).collect();
        let stroke = if ring == 0.0 { "#999999" } else { "#dddddd" };
        svg.polygon(&pts, stroke, "none", 0.0);
    }
    for (i, a) in axes.iter().enumerate() {
        let (x, y) = at(i, 1.0);
        svg.line(cx, cy, x, y, "#cccccc", 1.0);
        let (lx, ly) = (cx + (r + 18.0) * angle(i).cos(), cy + (r + 18.0) * angle(i).sin());
        svg.text(lx, ly + 4.0, 11.0, "middle", a);
    }
    for (p, (label, vals)) in profiles.iter().enumerate() {
        let pts: Vec<(f64, f64)> = vals.iter().enumerate().map(|(i, v)| at(i, v.unwrap_or(0.0))).collect();
        svg.polygon(&pts, color(p), color(p), 0.15);
        svg.rect(w - 130.0, 50.0 + 18.0 * p as f64, 10.0, 10.0, color(p), None);
        svg.text(w - 114.0, 59.0 + 18.0 * p as f64, 11.0, "start", label);
    }
    Chart { svg: svg.finish(), csv }
}

fn bars(title: &str, axes: &[String], profiles: &[(String, Vec<Option<f64>>)]) -> String {
    let (w, h) = (560.0, 360.0);
    let (left, right, top, bottom) = (50.0, w - 140.0, 40.0, h - 40.0);
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 24.0, 16.0, "middle", title);
    let y = |v: f64| scale(v.clamp(-1.0, 1.0), -1.0, 1.0, bottom, top);
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        svg.line(left, y(t), right, y(t), if t == 0.0 { "#999999" } else { "#eeeeee" }, 1.0);
        svg.text(left - 6.0, y(t) + 4.0, 10.0, "end", &format!("{t}"));
    }
    let groups = axes.len().max(1) as f64;
    let gw = (right - left) / groups;
    let bw = gw * 0.8 / profiles.len().max(1) as f64;
    for (a, name) in axes.iter().enumerate() {
        let gx = left + gw * a as f64 + gw * 0.1;
        for (p, (_, vals)) in profiles.iter().enumerate() {
            let v = vals.get(a).copied().flatten().unwrap_or(0.0);
            let (y0, y1) = (y(0.0), y(v));
            svg.rect(gx + bw * p as f64, y0.min(y1), bw * 0.9, (y1 - y0).abs(), color(p), None);
        }
        svg.text(gx + gw * 0.4, bottom + 16.0, 11.0, "middle", name);
    }
    for (p, (label, _)) in profiles.iter().enumerate() {
        svg.rect(w - 130.0, 50.0 + 18.0 * p as f64, 10.0, 10.0, color(p), None);
        svg.text(w - 114.0, 59.0 + 18.0 * p as f64, 11.0, "start", label);
    }
    svg.finish()
}

/// Interestingness over the steps of one trace. `keys` defaults to every
/// series with at least one value in the trace, per-factor ones included.
pub fn timeseries(
    records: &[InterestingnessRecord],
    trace_id: &str,
    keys: Option<&[SeriesKey]>,
) -> Result<Chart, ChartError> {
    let mut rows: Vec<&InterestingnessRecord> = records.iter().filter(|r| r.trace_id == trace_id).collect();
    if rows.is_empty() {
        return Err(ChartError::UnknownTrace(trace_id.to_string()));
    }
    rows.sort_by_key(|r| r.step);
    let keys: Vec<SeriesKey> = match keys {
        Some(k) => k.to_vec(),
        None => {
            let owned: Vec<InterestingnessRecord> = rows.iter().map(|r| (*r).clone()).collect();
            interestingness_columns(&owned)
                .into_iter()
                .filter(|k| rows.iter().any(|r| r.get(*k).is_some()))
                .collect()
        }
    };
    if keys.is_empty() {
        return Err(ChartError::Empty);
    }
    let mut header = vec!["step".to_string()];
    header.extend(keys.iter().map(|k| k.column_name()));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv = csv_bytes(
        &header_refs,
        rows.iter().map(|r| {
            let mut cells = vec![r.step.to_string()];
            cells.extend(keys.iter().map(|k| opt(r.get(*k))));
            cells
        }),
    );

    let (w, h) = (720.0, 360.0);
    let (left, right, top, bottom) = (50.0, w - 170.0, 40.0, h - 40.0);
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 24.0, 16.0, "middle", &format!("trace {trace_id}"));
    let last = rows.last().map_or(0, |r| r.step) as f64;
    let x = |s: usize| scale(s as f64, 0.0, last, left, right);
    let y = |v: f64| scale(v.clamp(-1.0, 1.0), -1.0, 1.0, bottom, top);
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        svg.line(left, y(t), right, y(t), if t == 0.0 { "#999999" } else { "#eeeeee" }, 1.0);
        svg.text(left - 6.0, y(t) + 4.0, 10.0, "end", &format!("{t}"));
    }
    svg.text((left + right) / 2.0, h - 10.0, 11.0, "middle", "step");
    for (i, k) in keys.iter().enumerate() {
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let flush = |seg: &mut Vec<(f64, f64)>, svg: &mut Svg| {
            match seg.len() {
                0 => {}
                1 => svg.circle(seg[0].0, seg[0].1, 2.0, color(i)),
                _ => svg.polyline(seg, color(i), 1.5),
            }
            seg.clear();
        };
        for r in &rows {
            match r.get(*k) {
                Some(v) => segment.push((x(r.step), y(v))),
                None => flush(&mut segment, &mut svg),
            }
        }
        flush(&mut segment, &mut svg);
        svg.line(right + 14.0, 50.0 + 16.0 * i as f64, right + 30.0, 50.0 + 16.0 * i as f64, color(i), 2.0);
        svg.text(right + 36.0, 54.0 + 16.0 * i as f64, 11.0, "start", &k.column_name());
    }
    Ok(Chart { svg: svg.finish(), csv })
}

fn heat(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (30.0 + 200.0 * t) as u8;
    let b = (230.0 - 200.0 * t) as u8;
    format!("#{r:02x}40{b:02x}")
}

/// Per-row attributions of the top features: one row per feature, x is
/// the attribution, colour the feature value (blue low, red high).
pub fn beeswarm(title: &str, gi: &GlobalImportance) -> Result<Chart, ChartError> {
    if gi.beeswarm.is_empty() {
        return Err(ChartError::Empty);
    }
    let csv = csv_bytes(
        &["rank", "feature", "phi", "value"],
        gi.beeswarm.iter().enumerate().flat_map(|(rank, (name, pts))| {
            pts.iter()
                .map(move |p| vec![(rank + 1).to_string(), name.clone(), num(p.phi), num(p.value)])
        }),
    );
    let lim = gi
        .beeswarm
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.phi.abs()))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let row_h = 34.0;
    let (left, right, top) = (150.0, 680.0, 44.0);
    let h = top + row_h * gi.beeswarm.len() as f64 + 40.0;
    let mut svg = Svg::new(720.0, h);
    svg.text(360.0, 24.0, 16.0, "middle", title);
    let x = |phi: f64| scale(phi, -lim, lim, left, right);
    svg.line(x(0.0), top - 6.0, x(0.0), h - 34.0, "#999999", 1.0);
    for (row, (name, pts)) in gi.beeswarm.iter().enumerate() {
        let cy = top + row_h * (row as f64 + 0.5);
        svg.text(left - 8.0, cy + 4.0, 11.0, "end", name);
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.value), b.max(p.value)));
        // Stack points that land in the same pixel column.
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| pts[a].phi.total_cmp(&pts[b].phi).then(a.cmp(&b)));
        let mut column = i64::MIN;
        let mut depth = 0usize;
        for i in order {
            let px = x(pts[i].phi);
            let col = (px / 3.0).floor() as i64;
            depth = if col == column { depth + 1 } else { 0 };
            column = col;
            let off = ((depth + 1) / 2) as f64 * 2.5 * if depth % 2 == 0 { 1.0 } else { -1.0 };
            let t = if hi > lo { (pts[i].value - lo) / (hi - lo) } else { 0.5 };
            svg.circle(px, cy + off.clamp(-row_h / 2.0 + 2.0, row_h / 2.0 - 2.0), 2.0, &heat(t));
        }
    }
    svg.text((left + right) / 2.0, h - 10.0, 11.0, "middle", "Shapley value (impact on model output)");
    Ok(Chart { svg: svg.finish(), csv })
}

/// Cumulative contributions from the base value to the prediction.
pub fn waterfall(title: &str, le: &LocalExplanation) -> Chart {
    let mut steps: Vec<(String, String, f64)> = le
        .bars
        .iter()
        .map(|b| (b.name.clone(), num(b.value), b.phi))
        .collect();
    if le.remainder_count > 0 {
        steps.push((format!("{} other features", le.remainder_count), String::new(), le.remainder));
    }
    let mut rows = vec![vec!["base".into(), String::new(), String::new(), String::new(), num(le.base)]];
    let mut acc = le.base;
    let mut spans = Vec::new();
    for (name, value, phi) in &steps {
        let start = acc;
        acc += phi;
        spans.push((start, acc));
        rows.push(vec![name.clone(), value.clone(), num(*phi), num(start), num(acc)]);
    }
    rows.push(vec!["prediction".into(), String::new(), String::new(), String::new(), num(le.prediction)]);
    let csv = csv_bytes(&["label", "feature_value", "phi", "start", "end"], rows);

    let (lo, hi) = spans
        .iter()
        .flat_map(|(a, b)| [*a, *b])
        .chain([le.base, le.prediction])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = ((hi - lo) * 0.05).max(1e-9);
    let row_h = 26.0;
    let (left, right, top) = (230.0, 690.0, 50.0);
    let h = top + row_h * steps.len() as f64 + 60.0;
    let mut svg = Svg::new(720.0, h);
    svg.text(360.0, 24.0, 16.0, "middle", title);
    let x = |v: f64| scale(v, lo - pad, hi + pad, left, right);
    svg.dashed(x(le.base), top - 10.0, x(le.base), h - 40.0, "#999999");
    svg.text(x(le.base), top - 14.0, 10.0, "middle", &format!("base {:.3}", le.base));
    for (i, ((name, value, phi), (start, end))) in steps.iter().zip(&spans).enumerate() {
        let y = top + row_h * i as f64;
        let fill = if *phi >= 0.0 { "#d62728" } else { "#1f77b4" };
        svg.rect(x(start.min(*end)), y + 4.0, (x(*end) - x(*start)).abs().max(1.0), row_h - 8.0, fill, None);
        let label = if value.is_empty() { name.clone() } else { format!("{name} = {value}") };
        svg.text(left - 8.0, y + row_h / 2.0 + 4.0, 11.0, "end", &label);
        svg.text(x(start.max(*end)) + 4.0, y + row_h / 2.0 + 4.0, 10.0, "start", &format!("{phi:+.3}"));
    }
    let yb = top + row_h * steps.len() as f64 + 16.0;
    svg.dashed(x(le.prediction), top - 10.0, x(le.prediction), yb, "#333333");
    svg.text(
        x(le.prediction),
        yb + 14.0,
        10.0,
        "middle",
        &format!("prediction {:.3} (actual {:.3})", le.prediction, le.actual),
    );
    Chart { svg: svg.finish(), csv }
}

/// Simple x/y line chart, used for silhouette-vs-k and learning curves.
pub fn line_chart(title: &str, x_name: &str, y_name: &str, pts: &[(f64, f64)]) -> Chart {
    let csv = csv_bytes(&[x_name, y_name], pts.iter().map(|(a, b)| vec![num(*a), num(*b)]));
    let (w, h) = (560.0, 320.0);
    let (left, right, top, bottom) = (60.0, w - 20.0, 40.0, h - 40.0);
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 24.0, 16.0, "middle", title);
    let (xl, xh) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (yl, yh) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let sx = |v: f64| scale(v, xl, xh, left, right);
    let sy = |v: f64| scale(v, yl, yh, bottom, top);
    svg.line(left, bottom, right, bottom, "#999999", 1.0);
    svg.line(left, top, left, bottom, "#999999", 1.0);
    if !pts.is_empty() {
        svg.text(left - 6.0, sy(yh) + 4.0, 10.0, "end", &format!("{yh:.3}"));
        svg.text(left - 6.0, sy(yl) + 4.0, 10.0, "end", &format!("{yl:.3}"));
        svg.text(sx(xl), bottom + 14.0, 10.0, "middle", &format!("{xl}"));
        svg.text(sx(xh), bottom + 14.0, 10.0, "middle", &format!("{xh}"));
    }
    let mapped: Vec<(f64, f64)> = pts.iter().map(|(a, b)| (sx(*a), sy(*b))).collect();
    svg.polyline(&mapped, color(0), 1.5);
    for (a, b) in &mapped {
        svg.circle(*a, *b, 2.5, color(0));
    }
    svg.text((left + right) / 2.0, h - 8.0, 11.0, "middle", x_name);
    Chart { svg: svg.finish(), csv }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ixdrl_core::analyzers::Dimension;

    #[test]
    fn zero_profile_is_regular_midline_polygon() {
        let axes: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let c = radar("p", &axes, &[("all".into(), vec![Some(0.0); 4])]);
        // Midline radius is half of 180 around (220, 270).
        assert!(c.svg.contains(r##"<polygon points="220.00,180.00 310.00,270.00 220.00,360.00 130.00,270.00" stroke="#1f77b4""##), "{}", c.svg);
    }

    #[test]
    fn two_axes_fall_back_to_bars() {
        let axes = vec!["value".to_string(), "confidence".to_string()];
        let c = radar("p", &axes, &[("x".into(), vec![Some(0.5), Some(-0.5)])]);
        assert!(!c.svg.contains("<polygon"));
        assert!(c.svg.contains("<rect"));
    }

    #[test]
    fn timeseries_has_one_row_per_step() {
        let recs: Vec<InterestingnessRecord> = (0..5)
            .map(|s| {
                let mut r = InterestingnessRecord::new("a", s);
                r.values.insert(Dimension::Value, 0.25);
                r.per_factor.insert((Dimension::Confidence, 0), 0.1);
                r.per_factor.insert((Dimension::Confidence, 1), 0.2);
                r.per_factor.insert((Dimension::Confidence, 2), 0.3);
                r
            })
            .collect();
        let c = timeseries(&recs, "a", None).unwrap();
        let text = String::from_utf8(c.csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "step,value,confidence[0],confidence[1],confidence[2]");
        assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("0.25")));
        assert_eq!(timeseries(&recs, "zz", None), Err(ChartError::UnknownTrace("zz".into())));
    }
}
