//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair with a phased plane rotation;
//! sweeps repeat until the off-diagonal Frobenius mass drops below 1e-14
//! relative to the total. O(N³) per sweep, which is ample at N ≤ 64.

use crate::linalg::{hermiticity_defect, identity, ComplexMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

/// Input must be Hermitian within this elementwise tolerance.
pub const HERMITICITY_INPUT_TOL: f64 = 1e-10;

/// Stop once off-diagonal Frobenius mass is below this fraction of the total.
const OFF_DIAGONAL_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(diagonalize(m, false)?.values)
}

/// Full eigendecomposition `m = V diag(λ) V†` of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    diagonalize(m, true)
}

fn diagonalize(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    let defect = hermiticity_defect(m);
    if defect > HERMITICITY_INPUT_TOL {
        return Err(Error::NotHermitian { defect });
    }

    // Work on the Hermitian part so rotations preserve symmetry exactly.
    let mut a = ComplexMatrix::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = 0.5 * (m[[i, j]] + m[[j, i]].conj());
        }
    }
    let mut v = if want_vectors {
        identity(n)
    } else {
        ComplexMatrix::zeros((0, 0))
    };

    let total_fro: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let stop = OFF_DIAGONAL_TOL * total_fro.max(f64::MIN_POSITIVE);

    let mut converged = total_fro == 0.0 || off_diagonal_mass(&a) <= stop;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, want_vectors);
            }
        }
        converged = off_diagonal_mass(&a) <= stop;
    }
    if !converged {
        return Err(Error::EigenNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = if want_vectors {
        let mut sorted = ComplexMatrix::zeros((n, n));
        for (dst, &src) in order.iter().enumerate() {
            for row in 0..n {
                sorted[[row, dst]] = v[[row, src]];
            }
        }
        sorted
    } else {
        v
    };
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[[i, j]].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilate `a[p][q]` with the unitary plane rotation
/// `U_pp = c, U_pq = -s e^{iφ}, U_qp = s e^{-iφ}, U_qq = c`
/// where `a[p][q] = β e^{iφ}` and `tan 2θ = 2β / (a_pp - a_qq)`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, with_vectors: bool) {
    let apq = a[[p, q]];
    let beta = apq.norm();
    if beta == 0.0 {
        return;
    }
    let phase = apq / beta; // e^{iφ}
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;

    // tan θ from tan 2θ = 2β/(app - aqq), picking the smaller rotation.
    let t = if app == aqq {
        1.0
    } else {
        let tau = (app - aqq) / (2.0 * beta);
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.nrows();
    // Columns: a <- a U.
    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = c * akp + s * phase.conj() * akq;
        a[[k, q]] = -s * phase * akp + c * akq;
    }
    // Rows: a <- U† a.
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = c * apk + s * phase * aqk;
        a[[q, k]] = -s * phase.conj() * apk + c * aqk;
    }
    // The rotation is exact on the (p,q) pair; pin the rounding residue.
    a[[p, q]] = Complex64::new(0.0, 0.0);
    a[[q, p]] = Complex64::new(0.0, 0.0);
    a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
    a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);

    if with_vectors {
        for k in 0..n {
            let vkp = v[[k, p]];
            let vkq = v[[k, q]];
            v[[k, p]] = c * vkp + s * phase.conj() * vkq;
            v[[k, q]] = -s * phase * vkp + c * vkq;
        }
    }
}
