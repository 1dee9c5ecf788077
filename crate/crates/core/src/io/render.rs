//! SVG drawing of an allocation: one horizontal band per layer, top layer
//! first, each interval shaded by owner and labelled `P_il`.

use std::fmt::Write;

use crate::model::MultiAllocation;
use crate::rational::{format, to_f64, Rational};

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 48.0;
const BAND: f64 = 44.0;
const GAP: f64 = 26.0;
const PALETTE: [&str; 8] = [
    "#8dd3c7", "#fdb462", "#bebada", "#fb8072", "#80b1d3", "#b3de69", "#fccde5", "#d9d9d9",
];

fn x_of(t: &Rational) -> f64 {
    MARGIN + to_f64(t) * (WIDTH - 2.0 * MARGIN)
}

pub fn render_svg(a: &MultiAllocation) -> String {
    let m = a.cake().m();
    let height = 2.0 * MARGIN + m as f64 * BAND + m.saturating_sub(1) as f64 * GAP;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" font-family="serif" font-size="13">"#
    );
    for (l, layer) in a.cake().layers().iter().enumerate() {
        let top = MARGIN + l as f64 * (BAND + GAP);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">L{}</text>"#,
            MARGIN - 8.0,
            top + BAND / 2.0 + 4.0,
            l + 1
        );
        let mut ticks: Vec<Rational> = vec![layer.lo().clone(), layer.hi().clone()];
        for (i, piece) in a.pieces().iter().enumerate() {
            for iv in piece.layer(l).intervals() {
                let (x0, x1) = (x_of(iv.lo()), x_of(iv.hi()));
                let _ = writeln!(
                    s,
                    r#"<rect x="{x0:.2}" y="{top:.2}" width="{:.2}" height="{BAND}" fill="{}" stroke="black" stroke-width="0.5"/>"#,
                    x1 - x0,
                    PALETTE[i % PALETTE.len()]
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">P<tspan baseline-shift="sub" font-size="9">{}{}</tspan></text>"#,
                    (x0 + x1) / 2.0,
                    top + BAND / 2.0 + 4.0,
                    i + 1,
                    l + 1
                );
                ticks.push(iv.lo().clone());
                ticks.push(iv.hi().clone());
            }
        }
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{BAND}" fill="none" stroke="black"/>"#,
            x_of(layer.lo()),
            x_of(layer.hi()) - x_of(layer.lo())
        );
        ticks.sort();
        ticks.dedup();
        for t in &ticks {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
                x_of(t),
                top + BAND + 13.0,
                format(t)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
