//! Dense complex matrix helpers shared by the quantum modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant (nalgebra). Purely real inputs go through the real
/// routine, which is several times faster for large generators.
pub fn expm(m: &CMatrix) -> CMatrix {
    if m.iter().all(|z| z.im == 0.0) {
        let real = m.map(|z| z.re);
        real.exp().map(c)
    } else {
        m.exp()
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Sub-matrix over the listed basis indices (rows and columns).
pub fn restrict(m: &CMatrix, indices: &[usize]) -> CMatrix {
    CMatrix::from_fn(indices.len(), indices.len(), |r, col| {
        m[(indices[r], indices[col])]
    })
}

/// Tensor-basis indices `na * cutoff + nb` with both occupation numbers
/// below `cutoff - margin`.
pub fn two_mode_interior(cutoff: usize, margin: usize) -> Vec<usize> {
    let keep = cutoff.saturating_sub(margin);
    (0..keep)
        .flat_map(|na| (0..keep).map(move |nb| na * cutoff + nb))
        .collect()
}

/// Max-abs entry on the leading `keep x keep` block.
pub fn leading_block_max_abs(m: &CMatrix, keep: usize) -> f64 {
    let keep = keep.min(m.nrows()).min(m.ncols());
    let mut worst = 0.0f64;
    for r in 0..keep {
        for col in 0..keep {
            worst = worst.max(m[(r, col)].norm());
        }
    }
    worst
}

pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_expm(m: &CMatrix) -> CMatrix {
        let n = m.nrows();
        let mut sum = CMatrix::identity(n, n);
        let mut term = CMatrix::identity(n, n);
        for k in 1..200 {
            term = &term * m / c(k as f64);
            sum += &term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    }

    #[test]
    fn expm_matches_series_on_small_complex_matrix() {
        let m = CMatrix::from_fn(5, 5, |r, col| {
            Complex64::new(0.1 * (r as f64 - col as f64), 0.05 * (r + col) as f64)
        });
        let diff = (expm(&m) - taylor_expm(&m)).norm();
        assert!(diff < 1e-12, "diff {diff}");
    }

    #[test]
    fn expm_real_path_matches_series() {
        let m = CMatrix::from_fn(6, 6, |r, col| c(0.3 * (r as f64) - 0.2 * (col as f64)));
        let diff = (expm(&m) - taylor_expm(&m)).norm();
        assert!(diff < 1e-11 * taylor_expm(&m).norm(), "diff {diff}");
    }

    #[test]
    fn interior_indices_skip_margin() {
        let idx = two_mode_interior(4, 2);
        assert_eq!(idx, vec![0, 1, 4, 5]);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-3.0), c(2.0)]));
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
    }
}
