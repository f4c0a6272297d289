use std::fmt::Write;

use super::{CriticalPoint, FlowLine};

/// One row per sample: `flow,t,x1,..,xn` in unwrapped coordinates.
pub fn trajectories_csv(flows: &[FlowLine]) -> String {
    let n = flows.first().and_then(|f| f.samples.first()).map_or(0, |s| s.1.len());
    let mut out = String::from("flow,t");
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for fl in flows {
        for (t, x) in &fl.samples {
            let _ = write!(out, "{},{t}", fl.id);
            for c in x {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
    }
    out
}

const SIZE: f64 = 600.0;

fn to_px(x: f64, y: f64) -> (f64, f64) {
    (x * SIZE, (1.0 - y) * SIZE)
}

/// Flows on the unit square, cut where they leave the fundamental domain.
/// Returns `None` unless the points live on `T²`.
pub fn trajectories_svg(critical: &[CriticalPoint], flows: &[FlowLine]) -> Option<String> {
    if critical.iter().any(|c| c.dim() != 2) {
        return None;
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>"#);
    for fl in flows {
        let color = if fl.sign > 0 { "#1f5fbf" } else { "#bf3f1f" };
        let mut pieces: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        let mut cell: Option<(f64, f64)> = None;
        for (_, x) in &fl.samples {
            let fl_cell = (x[0].floor(), x[1].floor());
            if cell.is_some_and(|c| c != fl_cell) {
                pieces.push(Vec::new());
            }
            cell = Some(fl_cell);
            pieces.last_mut().expect("nonempty").push(to_px(x[0] - fl_cell.0, x[1] - fl_cell.1));
        }
        for p in pieces.iter().filter(|p| p.len() > 1) {
            let pts: Vec<String> = p.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline data-flow="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                fl.id,
                pts.join(" ")
            );
        }
    }
    for c in critical {
        let (x, y) = to_px(c.position[0], c.position[1]);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{} ({})</text>"#,
            x + 6.0,
            y - 6.0,
            c.id,
            c.index
        );
    }
    out.push_str("</svg>\n");
    Some(out)
}
