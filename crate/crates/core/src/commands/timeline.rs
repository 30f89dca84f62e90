//! Deterministic SVG timelines: one horizontal band per labelled series.

use std::fmt::Write as _;

use crate::trial_io::{ContextFrame, FrameBasis, GestureTranscript, StateVariable};

/// Labelled intervals, in seconds, drawn as one row.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub name: String,
    pub intervals: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub start_s: f64,
    pub end_s: f64,
    pub label: String,
}

const PALETTE: [&str; 16] = [
    "#9e9e9e", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173",
];

/// Colour keyed by the number in the label, so `G3` and value `3` match.
fn color(label: &str) -> &'static str {
    let digits: String = label.chars().filter(char::is_ascii_digit).collect();
    let n = digits
        .parse::<usize>()
        .unwrap_or_else(|_| label.bytes().map(usize::from).sum());
    PALETTE[n % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Band for a gesture transcript; `rate_hz` converts its frame basis to seconds.
pub fn gesture_band(name: &str, t: &GestureTranscript, rate_hz: f64) -> Band {
    Band {
        name: name.to_string(),
        intervals: t
            .segments
            .iter()
            .map(|s| Interval {
                start_s: s.start as f64 / rate_hz,
                end_s: (s.end + 1) as f64 / rate_hz,
                label: s.gesture.to_string(),
            })
            .collect(),
    }
}

/// One band per state variable of a context transcript.
pub fn context_bands(name: &str, frames: &[ContextFrame], rate_hz: f64) -> Vec<Band> {
    StateVariable::ALL
        .iter()
        .map(|&var| {
            let labels: Vec<u8> = frames.iter().map(|f| f.get(var)).collect();
            Band {
                name: format!("{name} {}", var.column()),
                intervals: crate::metrics::segments(&labels)
                    .iter()
                    .map(|s| Interval {
                        start_s: s.start as f64 / rate_hz,
                        end_s: s.end as f64 / rate_hz,
                        label: s.label.to_string(),
                    })
                    .collect(),
            }
        })
        .collect()
}

/// Seconds per unit of a transcript's frame basis.
pub fn basis_rate(t: &GestureTranscript, output_rate_hz: f64, frame_rate_hz: f64) -> f64 {
    match t.basis {
        FrameBasis::Output => output_rate_hz,
        FrameBasis::Native => frame_rate_hz,
    }
}

const LABEL_W: f64 = 160.0;
const PLOT_W: f64 = 800.0;
const ROW_H: f64 = 24.0;
const ROW_GAP: f64 = 8.0;
const TOP: f64 = 10.0;
const AXIS_H: f64 = 30.0;

fn nice_step(span: f64) -> f64 {
    let raw = span / 10.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

/// SVG 1.1 document with the bands stacked top to bottom and a shared
/// time axis in seconds.
pub fn render_svg(bands: &[Band]) -> String {
    let end = bands
        .iter()
        .flat_map(|b| b.intervals.iter().map(|i| i.end_s))
        .fold(0.0f64, f64::max);
    let span = if end > 0.0 { end } else { 1.0 };
    let x = |t: f64| LABEL_W + t / span * PLOT_W;
    let height = TOP + bands.len() as f64 * (ROW_H + ROW_GAP) + AXIS_H;
    let width = LABEL_W + PLOT_W + 20.0;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    for (row, band) in bands.iter().enumerate() {
        let y = TOP + row as f64 * (ROW_H + ROW_GAP);
        let _ = writeln!(
            s,
            r#"  <text x="4" y="{:.2}" dominant-baseline="middle">{}</text>"#,
            y + ROW_H / 2.0,
            escape(&band.name)
        );
        for iv in &band.intervals {
            let (x0, x1) = (x(iv.start_s), x(iv.end_s));
            let _ = writeln!(
                s,
                r#"  <rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{ROW_H}" fill="{}"><title>{} {:.2}-{:.2} s</title></rect>"#,
                (x1 - x0).max(0.0),
                color(&iv.label),
                escape(&iv.label),
                iv.start_s,
                iv.end_s
            );
        }
    }
    let axis_y = TOP + bands.len() as f64 * (ROW_H + ROW_GAP);
    let _ = writeln!(
        s,
        r#"  <line x1="{LABEL_W}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="black"/>"#,
        LABEL_W + PLOT_W
    );
    let step = nice_step(span);
    let ticks = (span / step).floor() as usize;
    for i in 0..=ticks {
        let t = i as f64 * step;
        let _ = writeln!(
            s,
            r#"  <line x1="{0:.2}" y1="{axis_y:.2}" x2="{0:.2}" y2="{1:.2}" stroke="black"/><text x="{0:.2}" y="{2:.2}" text-anchor="middle">{3}</text>"#,
            x(t),
            axis_y + 4.0,
            axis_y + 16.0,
            format_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="end">time (s)</text>"#,
        LABEL_W + PLOT_W,
        axis_y + 28.0
    );
    s.push_str("</svg>\n");
    s
}

fn format_tick(t: f64) -> String {
    let r = (t * 100.0).round() / 100.0;
    if r.fract() == 0.0 {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}
