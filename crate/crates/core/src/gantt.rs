//! Text and SVG Gantt charts of a schedule.

use std::fmt::Write;

use num_integer::Integer;

use crate::scheduler::{Marker, ScheduleMapping};
use crate::time::{format_rat, Rat, TimeStamp};

/// Widest label kept in a text cell; longer block names are cut.
const MAX_CELL: usize = 6;

/// Tick length: 1 for integer schedules, else the inverse of the common
/// denominator of every date shown.
pub fn default_tick(mapping: &ScheduleMapping, markers: &[Marker]) -> Rat {
    let mut den = 1i64;
    let dates = mapping
        .segments
        .iter()
        .flat_map(|s| [s.start, s.end])
        .chain(markers.iter().map(|m| m.time))
        .chain(mapping.horizon.finite());
    for d in dates {
        den = den.lcm(d.denom());
    }
    Rat::new(1, den)
}

/// Last date shown: the horizon when finite, else the latest date seen.
fn span_end(mapping: &ScheduleMapping, markers: &[Marker]) -> Rat {
    match mapping.horizon {
        TimeStamp::Finite(h) => h,
        TimeStamp::Infinite => mapping
            .segments
            .iter()
            .map(|s| s.end)
            .chain(markers.iter().map(|m| m.time))
            .max()
            .unwrap_or_default(),
    }
}

fn marker_char(kind: &str) -> char {
    match kind {
        "after" => '>',
        "before" => '<',
        _ => '*',
    }
}

/// Writes `text` into `row` at `col` unless it would overwrite something.
fn place(row: &mut [char], col: usize, text: &str) {
    let chars: Vec<char> = text.chars().collect();
    if col + chars.len() > row.len() || row[col..col + chars.len()].iter().any(|&c| c != ' ') {
        return;
    }
    row[col..col + chars.len()].copy_from_slice(&chars);
}

/// One lane per task with one cell per tick (`.` when idle), followed by
/// a line of constraint markers: `>` after, `<` before, `*` sync, placed
/// at the tick boundary where the date falls.
pub fn render_text(mapping: &ScheduleMapping, markers: &[Marker], tick: Rat) -> String {
    let end = span_end(mapping, markers);
    let ticks = (end / tick).ceil().to_integer().max(0) as usize;
    // Wide enough for block names and for every tick label but the last,
    // which may run past the end.
    let label_w = (0..ticks)
        .map(|k| format_rat(tick * Rat::from_integer(k as i64)).len())
        .max()
        .unwrap_or(1);
    let width = mapping
        .segments
        .iter()
        .map(|s| s.block.chars().count().min(MAX_CELL))
        .max()
        .unwrap_or(1)
        .max(label_w)
        + 1;
    let name_w = mapping.tasks.iter().map(|t| t.chars().count()).max().unwrap_or(0).max(4) + 2;
    let cols = ticks * width + 1;
    let col_of = |t: Rat| ((t / tick).to_integer().max(0) as usize) * width;

    let mut out = String::new();
    let mut header = vec![' '; cols + width];
    for k in 0..=ticks {
        let label = format_rat(tick * Rat::from_integer(k as i64));
        place(&mut header, k * width, &format!("{label} "));
    }
    let header: String = header.into_iter().collect();
    let _ = writeln!(out, "{:name_w$}{}", "time", header.trim_end());

    for (ti, name) in mapping.tasks.iter().enumerate() {
        let mut lane: Vec<char> = (0..ticks)
            .flat_map(|_| std::iter::once('.').chain(std::iter::repeat_n(' ', width - 1)))
            .collect();
        for s in mapping.segments.iter().filter(|s| s.task == ti) {
            let label: String = s.block.chars().take(MAX_CELL).collect();
            let mut k = (s.start / tick).to_integer().max(0) as usize;
            let last = (s.end / tick).ceil().to_integer() as usize;
            while k < last.min(ticks) {
                for (j, c) in label.chars().chain(std::iter::repeat(' ')).take(width).enumerate() {
                    lane[k * width + j] = c;
                }
                k += 1;
            }
        }
        let lane: String = lane.into_iter().collect();
        let _ = writeln!(out, "{name:name_w$}{}", lane.trim_end());

        let mut marks = vec![' '; cols];
        for m in markers.iter().filter(|m| m.task == ti && m.time <= end) {
            let c = col_of(m.time);
            if c < cols {
                // A sync drawn over a before/after at the same date wins.
                if marks[c] == ' ' || m.kind == "sync" {
                    marks[c] = marker_char(&m.kind);
                }
            }
        }
        let marks: String = marks.into_iter().collect();
        if !marks.trim().is_empty() {
            let _ = writeln!(out, "{:name_w$}{}", "", marks.trim_end());
        }
    }
    out
}

const LANE_H: i64 = 28;
const TOP: i64 = 24;
const LEFT: i64 = 80;

fn num(v: Rat) -> String {
    if v.is_integer() {
        v.to_integer().to_string()
    } else {
        format!("{:.2}", *v.numer() as f64 / *v.denom() as f64)
    }
}

/// Length in pixels of a duration.
fn len(d: Rat, tick: Rat, px_per_tick: u32) -> Rat {
    d / tick * Rat::from_integer(px_per_tick as i64)
}

fn px(t: Rat, tick: Rat, px_per_tick: u32) -> Rat {
    len(t, tick, px_per_tick) + Rat::from_integer(LEFT)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG chart: one lane per task, segments as labeled boxes, after dates
/// as up-triangles, before dates as down-triangles and syncs as diamonds.
pub fn render_svg(mapping: &ScheduleMapping, markers: &[Marker], tick: Rat, px_per_tick: u32) -> String {
    let end = span_end(mapping, markers);
    let ticks = (end / tick).ceil().to_integer().max(0);
    let width = LEFT + ticks * px_per_tick as i64 + 20;
    let height = TOP + LANE_H * mapping.tasks.len() as i64 + 20;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="11">"#
    );
    let axis_y = TOP + LANE_H * mapping.tasks.len() as i64;
    for k in 0..=ticks {
        let t = tick * Rat::from_integer(k);
        let x = num(px(t, tick, px_per_tick));
        let _ = writeln!(
            s,
            r##"<line x1="{x}" y1="{TOP}" x2="{x}" y2="{axis_y}" stroke="#ddd"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"##,
            axis_y + 14,
            format_rat(t)
        );
    }
    for (ti, name) in mapping.tasks.iter().enumerate() {
        let y = TOP + LANE_H * ti as i64;
        let _ = writeln!(s, r#"<text x="4" y="{}">{}</text>"#, y + 18, escape(name));
        for seg in mapping.segments.iter().filter(|g| g.task == ti) {
            let x0 = num(px(seg.start, tick, px_per_tick));
            let w = num(len(seg.end - seg.start, tick, px_per_tick));
            let _ = writeln!(
                s,
                r##"<rect x="{x0}" y="{}" width="{w}" height="16" fill="#8ab4f8" stroke="#333"><title>{} [{}, {})</title></rect><text x="{x0}" y="{}" dx="2">{}</text>"##,
                y + 6,
                escape(&seg.block),
                format_rat(seg.start),
                format_rat(seg.end),
                y + 18,
                escape(&seg.block)
            );
        }
        for m in markers.iter().filter(|m| m.task == ti && m.time <= end) {
            let x = px(m.time, tick, px_per_tick);
            let x = *x.numer() as f64 / *x.denom() as f64;
            let (top, mid, bot) = (y as f64 + 2.0, y as f64 + 8.0, y as f64 + 14.0);
            let points = match m.kind.as_str() {
                "after" => format!("{},{bot} {},{top} {},{bot}", x - 5.0, x, x + 5.0),
                "before" => format!("{},{top} {},{bot} {},{top}", x - 5.0, x, x + 5.0),
                _ => format!("{x},{top} {},{mid} {x},{bot} {},{mid}", x + 5.0, x - 5.0),
            };
            let _ = writeln!(
                s,
                r##"<polygon class="{}" points="{points}" fill="#c0392b"><title>{} {}</title></polygon>"##,
                m.kind,
                m.kind,
                format_rat(m.time)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::f1;
    use crate::model::ExecTimeMap;
    use crate::scheduler::{simulate, FirstBranch, SimOptions};
    use crate::time::{rat, ratio};

    fn f1_run() -> crate::scheduler::ScheduleRun {
        simulate(&[f1()], &ExecTimeMap::from_graphs(&[f1()]), &mut FirstBranch, &SimOptions::new(rat(10))).unwrap()
    }

    #[test]
    fn f1_text_chart() {
        let run = f1_run();
        let text = render_text(&run.mapping, &run.markers, default_tick(&run.mapping, &run.markers));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "time  0 1 2 3 4 5 6 7 8 9 10");
        assert_eq!(lines[1], "f1    . a b b c . . d d .");
        assert_eq!(lines[2], "        > >     <   *     <");
    }

    #[test]
    fn fractional_ticks() {
        let mut run = f1_run();
        run.mapping.segments[0].end = ratio(3, 2);
        assert_eq!(default_tick(&run.mapping, &run.markers), ratio(1, 2));
        let text = render_text(&run.mapping, &run.markers, ratio(1, 2));
        let header = text.lines().next().unwrap();
        let labels: Vec<&str> = header.split_whitespace().skip(1).collect();
        assert_eq!(labels.len(), 21, "{header}");
        assert_eq!(&labels[..4], ["0", "1/2", "1", "3/2"]);
    }

    #[test]
    fn svg_has_shapes_per_marker_kind() {
        let run = f1_run();
        let svg = render_svg(&run.mapping, &run.markers, rat(1), 20);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<rect").count(), run.mapping.segments.len());
        assert!(svg.contains(r#"class="after""#));
        assert!(svg.contains(r#"class="before""#));
        assert!(svg.contains(r#"class="sync""#));
    }
}
