//! Koch construction, self-similarity dimension, the `u_{n,q}` basis of
//! entire functions and the q-derivative.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::QDeformation;
use crate::geometry::{Point, Polyline};
use crate::quadrature::gauss_legendre;

pub const MAX_KOCH_DEPTH: u32 = 12;

/// Radial cutoff for the Gaussian-measure quadrature; `e^{-36}` is below
/// double-precision resolution of the integrands tested.
pub const BARGMANN_RADIUS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilaritySpec {
    pieces: u32,
    scale: f64,
    dimension: f64,
}

impl SimilaritySpec {
    pub fn new(pieces: u32, scale: f64) -> Result<Self> {
        let dimension = similarity_dimension(pieces, scale)?;
        Ok(Self {
            pieces,
            scale,
            dimension,
        })
    }

    pub fn koch() -> Self {
        Self::new(4, 3.0).expect("koch parameters are valid")
    }

    pub fn pieces(&self) -> u32 {
        self.pieces
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    /// The deformation `q = scale^{-d}` at which `q * pieces = 1`.
    pub fn self_similar_deformation(&self) -> QDeformation {
        QDeformation::new(self.scale.powf(-self.dimension)).expect("positive by construction")
    }
}

/// `ln(pieces) / ln(scale)`.
pub fn similarity_dimension(pieces: u32, scale: f64) -> Result<f64> {
    if pieces < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 pieces, got {pieces}"
        )));
    }
    if !(scale > 1.0) || !scale.is_finite() {
        return Err(Error::ParameterRange {
            name: "scale",
            value: scale,
            reason: "shrink factor must exceed 1",
        });
    }
    Ok((pieces as f64).ln() / scale.ln())
}

/// Koch curve from (0,0) to (1,0) after `depth` generator substitutions.
///
/// Each segment is split in thirds and the middle third replaced by the two
/// sides of an equilateral bump raised on the left of the travel direction.
pub fn koch_iterate(depth: u32) -> Result<Polyline> {
    if depth > MAX_KOCH_DEPTH {
        return Err(Error::ParameterRange {
            name: "depth",
            value: depth as f64,
            reason: "koch depth is limited to 12",
        });
    }
    let (sin60, cos60) = (3f64.sqrt() / 2.0, 0.5);
    let mut points = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(4 * (points.len() - 1) + 1);
        for w in points.windows(2) {
            let (p, q) = (w[0], w[1]);
            let dx = (q.x - p.x) / 3.0;
            let dy = (q.y - p.y) / 3.0;
            let a = Point::new(p.x + dx, p.y + dy);
            let b = Point::new(p.x + 2.0 * dx, p.y + 2.0 * dy);
            let apex = Point::new(
                a.x + dx * cos60 - dy * sin60,
                a.y + dx * sin60 + dy * cos60,
            );
            next.extend_from_slice(&[p, a, apex, b]);
        }
        next.push(*points.last().expect("non-empty"));
        points = next;
    }
    Polyline::new(points)
}

/// Max pointwise distance between stage `depth - 1` shrunk by 1/3 and the
/// first quarter of stage `depth`. This is the finite-stage form of
/// self-similarity; the exact statement only holds in the limit.
pub fn koch_self_similarity_deviation(depth: u32) -> Result<f64> {
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "self-similarity needs depth >= 1".into(),
        ));
    }
    let coarse = koch_iterate(depth - 1)?;
    let fine = koch_iterate(depth)?;
    Ok(coarse
        .points()
        .iter()
        .zip(fine.points())
        .map(|(c, f)| Point::new(c.x / 3.0, c.y / 3.0).distance(f))
        .fold(0.0, f64::max))
}

/// `(q alpha)^n`, or `(q alpha)^n / sqrt(n!)` when `normalized`.
pub fn u_n(q: QDeformation, alpha: Complex64, n: u32, normalized: bool) -> Complex64 {
    let base = (alpha * q.q()).powu(n);
    if normalized {
        let log_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        base / (0.5 * log_fact).exp()
    } else {
        base
    }
}

/// `(f(q alpha) - f(alpha)) / ((q - 1) alpha)`.
pub fn q_derivative<F>(f: F, q: f64, alpha: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularInput(
            "q-derivative at alpha = 0 is a removable limit; evaluate the limit instead",
        ));
    }
    if q == 1.0 {
        return Err(Error::SingularInput(
            "q = 1 is the ordinary-derivative limit; use the derivative instead",
        ));
    }
    Ok((f(alpha * q) - f(alpha)) / ((q - 1.0) * alpha))
}

/// Gram matrix `<u_m, u_n>` of the normalized basis under the measure
/// `e^{-|alpha|^2} d^2alpha / pi`, by tensor Gauss-Legendre quadrature in
/// polar coordinates with the radius truncated at [`BARGMANN_RADIUS`].
pub fn bargmann_gram(q: QDeformation, max_n: u32, radial: usize, angular: usize) -> Vec<Vec<Complex64>> {
    let (r_nodes, r_weights) = gauss_legendre(radial, 0.0, BARGMANN_RADIUS);
    let (t_nodes, t_weights) = gauss_legendre(angular, 0.0, 2.0 * std::f64::consts::PI);
    let size = max_n as usize + 1;
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for (r, wr) in r_nodes.iter().zip(&r_weights) {
        let radial_weight = wr * r * (-r * r).exp() / std::f64::consts::PI;
        for (t, wt) in t_nodes.iter().zip(&t_weights) {
            let alpha = Complex64::from_polar(*r, *t);
            let values: Vec<Complex64> = (0..=max_n).map(|n| u_n(q, alpha, n, true)).collect();
            let w = radial_weight * wt;
            for m in 0..size {
                for n in 0..size {
                    gram[m][n] += values[m].conj() * values[n] * w;
                }
            }
        }
    }
    gram
}

/// Max-abs deviation of the Gram matrix from the identity.
pub fn bargmann_orthonormality_deviation(max_n: u32) -> f64 {
    let q = QDeformation::new(1.0).expect("q = 1");
    let gram = bargmann_gram(q, max_n, 64, 64);
    let mut worst = 0.0f64;
    for (m, row) in gram.iter().enumerate() {
        for (n, v) in row.iter().enumerate() {
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn koch_depth_zero_is_initiator() {
        let k = koch_iterate(0).unwrap();
        assert_eq!(k.segment_count(), 1);
        assert_eq!(k.length(), 1.0);
    }

    #[test]
    fn koch_depth_one_bump_height() {
        let k = koch_iterate(1).unwrap();
        assert_eq!(k.segment_count(), 4);
        for len in k.segment_lengths() {
            assert!((len - 1.0 / 3.0).abs() < 1e-15);
        }
        // trigonometric oracle: apex at (1/2, (1/3) sin 60deg)
        let apex = k.points()[2];
        let expected = (std::f64::consts::PI / 3.0).sin() / 3.0;
        assert!((apex.x - 0.5).abs() < 1e-15);
        assert!((apex.y - expected).abs() < 1e-15);
        assert!((apex.y - 0.28868).abs() < 1e-5);
    }

    #[test]
    fn koch_depth_three_total_length() {
        let k = koch_iterate(3).unwrap();
        assert_eq!(k.segment_count(), 64);
        assert!((k.length() - 64.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn koch_census_and_endpoints() {
        for depth in 0..=7u32 {
            let k = koch_iterate(depth).unwrap();
            assert_eq!(k.segment_count(), 4usize.pow(depth));
            let target = 3f64.powi(-(depth as i32));
            for len in k.segment_lengths() {
                assert!((len - target).abs() <= 1e-10 * target);
            }
            assert_eq!(k.first(), Point::new(0.0, 0.0));
            let end = k.last();
            assert!((end.x - 1.0).abs() < 1e-12 && end.y.abs() < 1e-12);
        }
    }

    #[test]
    fn koch_depth_guard() {
        assert!(matches!(
            koch_iterate(13),
            Err(Error::ParameterRange { name: "depth", .. })
        ));
    }

    #[test]
    fn koch_finite_self_similarity() {
        for depth in 1..=6 {
            assert!(koch_self_similarity_deviation(depth).unwrap() < 1e-10);
        }
        assert!(koch_self_similarity_deviation(0).is_err());
    }

    #[test]
    fn dimension_values() {
        assert!((similarity_dimension(4, 3.0).unwrap() - 1.2619).abs() < 1e-4);
        assert_eq!(similarity_dimension(2, 2.0).unwrap(), 1.0);
        assert_eq!(similarity_dimension(3, 3.0).unwrap(), 1.0);
        assert!((similarity_dimension(9, 3.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_domain_errors() {
        assert!(similarity_dimension(1, 3.0).is_err());
        assert!(similarity_dimension(4, 1.0).is_err());
        assert!(similarity_dimension(4, 0.5).is_err());
        assert!(similarity_dimension(4, f64::NAN).is_err());
    }

    #[test]
    fn u_n_at_self_similar_point() {
        let spec = SimilaritySpec::koch();
        let q = spec.self_similar_deformation();
        let v = u_n(q, cx(4.0, 0.0), 7, false);
        assert!((v - cx(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(u_n(q, cx(0.3, 2.0), 0, false), cx(1.0, 0.0));
        assert_eq!(u_n(q, cx(0.3, 2.0), 0, true), cx(1.0, 0.0));
    }

    #[test]
    fn u_n_normalized_divides_by_root_factorial() {
        let q = QDeformation::new(0.5).unwrap();
        let v = u_n(q, cx(2.0, 0.0), 4, true);
        assert!((v.re - 1.0 / 24f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_measure_orthonormality() {
        assert!(bargmann_orthonormality_deviation(4) < 1e-6);
    }

    #[test]
    fn q_derivative_examples() {
        let sq = |z: Complex64| z * z;
        let v = q_derivative(sq, 2.0, cx(1.0, 0.0)).unwrap();
        assert!((v - cx(3.0, 0.0)).norm() < 1e-15);
        let konst = |_: Complex64| cx(5.0, -1.0);
        assert_eq!(q_derivative(konst, 0.7, cx(0.2, 0.1)).unwrap(), cx(0.0, 0.0));
        let cube = |z: Complex64| z * z * z;
        let v = q_derivative(cube, 1.0 + 1e-6, cx(2.0, 0.0)).unwrap();
        assert!((v - cx(12.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn q_derivative_singular_inputs() {
        let f = |z: Complex64| z;
        assert!(matches!(
            q_derivative(f, 1.0, cx(1.0, 0.0)),
            Err(Error::SingularInput(_))
        ));
        assert!(matches!(
            q_derivative(f, 2.0, cx(0.0, 0.0)),
            Err(Error::SingularInput(_))
        ));
    }

    proptest! {
        #[test]
        fn q_derivative_is_linear(
            a in -3.0f64..3.0, b in -3.0f64..3.0,
            q in 0.2f64..3.0, re in 0.1f64..2.0, im in -2.0f64..2.0,
        ) {
            prop_assume!((q - 1.0).abs() > 1e-3);
            let alpha = cx(re, im);
            let f = |z: Complex64| z * z * z - z * 2.0 + cx(1.0, 0.5);
            let g = |z: Complex64| z * z * cx(0.0, 1.0) + z;
            let combo = |z: Complex64| f(z) * a + g(z) * b;
            let lhs = q_derivative(combo, q, alpha).unwrap();
            let rhs = q_derivative(f, q, alpha).unwrap() * a + q_derivative(g, q, alpha).unwrap() * b;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }

        #[test]
        fn q_derivative_of_power_is_q_number(n in 1u32..8, q in 0.2f64..3.0, re in 0.1f64..2.0) {
            prop_assume!((q - 1.0).abs() > 1e-3);
            // D_q z^n = [n]_q z^{n-1} with [n]_q = (q^n - 1)/(q - 1)
            let alpha = cx(re, 0.3);
            let v = q_derivative(|z: Complex64| z.powu(n), q, alpha).unwrap();
            let qn = (q.powi(n as i32) - 1.0) / (q - 1.0);
            let expected = alpha.powu(n - 1) * qn;
            prop_assert!((v - expected).norm() <= 1e-10 * (1.0 + expected.norm()));
        }
    }
}
