//! Small dense complex-matrix helpers shared across the crate.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Dense complex double-precision matrix; all operators and states are
/// exactly `N x N` under a given truncation.
pub type ComplexMatrix = Array2<Complex64>;

/// Dense complex vector (vectorized density matrices, pure-state amplitudes).
pub type ComplexVector = Array1<Complex64>;

/// `N x N` identity.
pub fn identity(dim: usize) -> ComplexMatrix {
    Array2::eye(dim)
}

/// Conjugate transpose.
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diag().sum()
}

/// Largest elementwise modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim(), "max_abs_diff requires equal shapes");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute column sum (the induced 1-norm).
pub fn one_norm(m: &ComplexMatrix) -> f64 {
    let mut max = 0.0f64;
    for col in m.columns() {
        max = max.max(col.iter().map(|z| z.norm()).sum());
    }
    max
}

/// Largest `|m[i][j] - conj(m[j][i])|`; zero for an exactly Hermitian matrix.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            defect = defect.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    defect
}

/// `exp(z) - 1` without cancellation for small `|z|`.
///
/// Splits into real/imaginary parts: `e^{x+iy} - 1 = expm1(x)cos(y)
/// - 2sin²(y/2) + i e^x sin(y)`, each term stable near zero.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half_sin = (0.5 * y).sin();
    Complex64::new(
        x.exp_m1() * y.cos() - 2.0 * half_sin * half_sin,
        x.exp() * y.sin(),
    )
}

const LN_FACTORIAL_LEN: usize = 257;

/// `ln(n!)` from a lazily built accumulation table.
///
/// Supports arguments up to 256, which covers every factorial ratio arising
/// from truncations of dimension 64 and below (indices reach `2N - 1`).
pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_LEN);
        t.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..LN_FACTORIAL_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    });
    table[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn expm1_complex_small_argument_keeps_precision() {
        let z = C64::new(1e-9, -2e-9);
        let got = expm1_complex(z);
        // exp(z) - 1 = z + z^2/2 + O(z^3)
        let expect = z + z * z / 2.0;
        assert!((got - expect).norm() < 1e-24);
    }

    #[test]
    fn expm1_complex_matches_direct_for_large_argument() {
        let z = C64::new(1.3, -0.7);
        let got = expm1_complex(z);
        let expect = z.exp() - C64::new(1.0, 0.0);
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn ln_factorial_matches_direct_products() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        let direct: f64 = (2..=20u64).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(20) - direct).abs() < 1e-12);
        // 10! = 3628800
        assert!((ln_factorial(10).exp() - 3_628_800.0).abs() / 3_628_800.0 < 1e-12);
    }

    #[test]
    fn hermiticity_defect_detects_asymmetry() {
        let mut m = identity(3);
        assert_eq!(hermiticity_defect(&m), 0.0);
        m[[0, 1]] = C64::new(0.0, 1.0);
        m[[1, 0]] = C64::new(0.0, 1.0); // conj would be -i
        assert!((hermiticity_defect(&m) - 2.0).abs() < 1e-15);
    }
}
