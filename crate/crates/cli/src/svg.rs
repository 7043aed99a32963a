//! Static SVG rendering: generator graphs as sampled polylines over the
//! unit square, orbit points as markers along the bottom axis, designated
//! points marked distinctly. Output bytes are deterministic: coordinates
//! are produced by exact rational scaling, never floating point.

use orbitkit::action::GeneratorSystem;
use orbitkit::homeo::DomainKind;
use orbitkit::rational::{rat, rat_i, Rational};
use std::fmt::Write;

const SIZE: i64 = 512;
const SAMPLES: i64 = 512;
const PALETTE: &[&str] = &["#1b6ca8", "#c23b22", "#2e8540", "#8443ad", "#b8860b", "#0f7f7f"];

/// `v` in `[0, 1]` scaled to SVG x-coordinates with 3 decimals, exactly.
fn sx(v: &Rational) -> String {
    fixed3(&(v * rat_i(SIZE)))
}

/// `v` in `[0, 1]` scaled and flipped to SVG y-coordinates.
fn sy(v: &Rational) -> String {
    fixed3(&((Rational::from_integer(1.into()) - v) * rat_i(SIZE)))
}

/// Exact rendering of a rational with three decimal places (round half up).
fn fixed3(v: &Rational) -> String {
    use num_traits::Signed;
    let scaled = (v * rat_i(1000) + rat(1, 2)).floor().to_integer();
    let neg = scaled.is_negative();
    let mag = if neg { -scaled } else { scaled };
    let whole = &mag / 1000;
    let frac = &mag % 1000;
    format!("{}{}.{:03}", if neg { "-" } else { "" }, whole, frac)
}

pub fn render_svg(
    system: &GeneratorSystem,
    orbit_points: &[(Rational, String)],
    out: &mut String,
) -> Result<(), String> {
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" \
         width=\"{SIZE}\" height=\"{SIZE}\">"
    )
    .unwrap();
    writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>"
    )
    .unwrap();
    // Diagonal and frame.
    writeln!(
        out,
        "  <line x1=\"0\" y1=\"{SIZE}\" x2=\"{SIZE}\" y2=\"0\" stroke=\"#cccccc\" stroke-width=\"1\"/>"
    )
    .unwrap();
    writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>"
    )
    .unwrap();

    let prec = rat(1, 1_000_000);
    for (gi, g) in system.generators().iter().enumerate() {
        let color = PALETTE[gi % PALETTE.len()];
        let mut points = String::new();
        for i in 0..=SAMPLES {
            let x = rat(i, SAMPLES);
            let x = match system.domain_kind() {
                DomainKind::Circle if i == SAMPLES => rat(SAMPLES - 1, SAMPLES),
                _ => x,
            };
            let y = match g.eval(&x, &prec) {
                Ok(e) => e.mid(),
                Err(_) => continue,
            };
            // Circle values may wrap past 1; clamp for display.
            let y = if y > rat_i(1) { y - rat_i(1) } else { y };
            write!(points, "{},{} ", sx(&x), sy(&y)).unwrap();
        }
        writeln!(
            out,
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.trim_end()
        )
        .unwrap();
        writeln!(
            out,
            "  <text x=\"8\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>",
            16 + 14 * gi as i64,
            g.name()
        )
        .unwrap();
    }

    for (p, label) in orbit_points {
        writeln!(
            out,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"#202020\"><title>{}</title></circle>",
            sx(p),
            SIZE - 6,
            label
        )
        .unwrap();
    }
    for (name, p) in system.designated() {
        let x = sx(p);
        writeln!(
            out,
            "  <line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{SIZE}\" stroke=\"#c23b22\" stroke-width=\"1\"/>",
            SIZE - 14
        )
        .unwrap();
        writeln!(
            out,
            "  <text x=\"{x}\" y=\"{}\" font-size=\"10\" fill=\"#c23b22\">{name}</text>",
            SIZE - 16
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(())
}
