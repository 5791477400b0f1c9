//! CSV and SVG serialization of polylines.

use std::fmt::Write;

use fractalab::geometry::{Point, Polyline};

/// Shortest round-trip decimal; `-0` is written as `0`.
pub fn number(v: f64) -> String {
    format!("{}", v + 0.0)
}

pub fn to_csv(line: &Polyline) -> String {
    let mut out = String::from("x,y\n");
    for p in line.points() {
        let _ = writeln!(out, "{},{}", number(p.x), number(p.y));
    }
    out
}

/// Standalone SVG with one stroked path. The y axis is flipped so the
/// picture has the usual mathematical orientation.
pub fn to_svg(line: &Polyline) -> String {
    let (lo, hi) = line.bounds();
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let pad = if extent > 0.0 { 0.05 * extent } else { 1.0 };
    let (min_x, min_y) = (lo.x - pad, -hi.y - pad);
    let (width, height) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);

    let mut d = String::new();
    for (i, Point { x, y }) in line.points().iter().enumerate() {
        if i > 0 {
            d.push(' ');
        }
        let _ = write!(d, "{}{} {}", if i == 0 { 'M' } else { 'L' }, number(*x), number(-y));
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n\
         <path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>\n\
         </svg>\n",
        number(min_x),
        number(min_y),
        number(width),
        number(height),
        number(pad / 10.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polyline {
        Polyline::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn csv_layout() {
        assert_eq!(to_csv(&square()), "x,y\n0,0\n1,0\n1,1\n");
        assert_eq!(number(-0.0), "0");
        assert_eq!(number(0.1), "0.1");
        let v = 1.0 / 3.0;
        assert_eq!(number(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn svg_has_single_path_and_padded_box() {
        let svg = to_svg(&square());
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("viewBox=\"-0.05 -1.05 1.1 1.1\""));
        assert!(svg.contains("d=\"M0 0 L1 0 L1 -1\""));
    }

    #[test]
    fn flat_line_gets_height() {
        let flat = Polyline::new(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0)]).unwrap();
        assert!(to_svg(&flat).contains("viewBox=\"-0.1 -0.1 2.2 0.2\""));
    }
}
