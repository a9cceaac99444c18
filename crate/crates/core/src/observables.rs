//! Scalar and grid diagnostics extracted from density matrices.

use crate::eigen::hermitian_eigenvalues;
use crate::fock::{coherent_amplitudes, pure_state_vector, DensityMatrix, StateSpec};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `Tr ρ²`, real part. 1 for pure states, `1/N` for the maximally mixed
/// state.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let dim = rho.dim();
    let mut acc = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            // Tr ρ² = Σ_{ij} ρ_ij ρ_ji; real part only, the imaginary part
            // cancels for Hermitian input.
            acc += (m[[i, j]] * m[[j, i]]).re;
        }
    }
    acc
}

/// `<ψ|ρ|ψ>` against a pure reference state prepared under the same
/// truncation. Errors for mixed (thermal) references.
pub fn fidelity_pure(rho: &DensityMatrix, psi_spec: StateSpec) -> Result<f64> {
    let (psi, _) = pure_state_vector(psi_spec, rho.trunc())?;
    let image = rho.matrix().dot(&psi);
    let overlap: Complex64 = psi
        .iter()
        .zip(image.iter())
        .map(|(p, q)| p.conj() * q)
        .sum();
    Ok(overlap.re)
}

/// `(1/2) Σ |eig(ρ - σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let eigs = hermitian_eigenvalues(&diff)?;
    Ok(0.5 * eigs.iter().map(|e| e.abs()).sum::<f64>())
}

/// `Tr(n̂ ρ)`.
pub fn mean_photon_number(rho: &DensityMatrix) -> f64 {
    (0..rho.dim())
        .map(|n| n as f64 * rho.element(n, n).re)
        .sum()
}

/// Diagonal photon-number populations.
pub fn photon_distribution(rho: &DensityMatrix) -> Vec<f64> {
    (0..rho.dim()).map(|n| rho.element(n, n).re).collect()
}

/// Phase-space window and sampling density for a Husimi-Q evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QGridBounds {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Points per axis.
    pub resolution: usize,
}

/// Husimi-Q values on a rectangular grid; `values[iy * resolution + ix]`
/// holds `Q(re_min + ix·Δre + i(im_min + iy·Δim))`.
#[derive(Debug, Clone, Serialize)]
pub struct QGrid {
    #[serde(flatten)]
    pub bounds: QGridBounds,
    pub values: Vec<f64>,
}

impl QGrid {
    pub fn value_at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.bounds.resolution + ix]
    }

    pub fn point_at(&self, ix: usize, iy: usize) -> Complex64 {
        let b = &self.bounds;
        let n = b.resolution as f64 - 1.0;
        Complex64::new(
            b.re_min + (b.re_max - b.re_min) * ix as f64 / n,
            b.im_min + (b.im_max - b.im_min) * iy as f64 / n,
        )
    }

    /// Riemann sum `Σ Q · ΔreΔim`; at most 1 up to grid truncation slack.
    pub fn cell_sum_times_area(&self) -> f64 {
        let b = &self.bounds;
        let n = b.resolution as f64 - 1.0;
        let cell = (b.re_max - b.re_min) / n * ((b.im_max - b.im_min) / n);
        self.values.iter().sum::<f64>() * cell
    }
}

/// `Q(α) = <α|ρ|α>/π` sampled over the grid.
///
/// The coherent vectors are truncated without renormalization, so the grid
/// reflects the true truncated overlap rather than an inflated one.
pub fn husimi_q(rho: &DensityMatrix, bounds: QGridBounds) -> Result<QGrid> {
    let res = bounds.resolution;
    if res < 2 {
        return Err(Error::InvalidParams(format!(
            "husimi grid resolution must be >= 2, got {res}"
        )));
    }
    let finite = [bounds.re_min, bounds.re_max, bounds.im_min, bounds.im_max]
        .iter()
        .all(|v| v.is_finite());
    if !finite || bounds.re_min >= bounds.re_max || bounds.im_min >= bounds.im_max {
        return Err(Error::InvalidParams(
            "husimi grid bounds must satisfy min < max on both axes".into(),
        ));
    }
    let dim = rho.dim();
    let m = rho.matrix();
    let mut values = vec![0.0f64; res * res];
    for iy in 0..res {
        let im = bounds.im_min + (bounds.im_max - bounds.im_min) * iy as f64 / (res as f64 - 1.0);
        for ix in 0..res {
            let re =
                bounds.re_min + (bounds.re_max - bounds.re_min) * ix as f64 / (res as f64 - 1.0);
            let alpha = coherent_amplitudes(Complex64::new(re, im), dim);
            let mut overlap = Complex64::new(0.0, 0.0);
            for row in 0..dim {
                let mut inner = Complex64::new(0.0, 0.0);
                for col in 0..dim {
                    inner += m[[row, col]] * alpha[col];
                }
                overlap += alpha[row].conj() * inner;
            }
            values[iy * res + ix] = overlap.re / PI;
        }
    }
    Ok(QGrid { bounds, values })
}

/// Per-time-point row of derived scalars.
#[derive(Debug, Clone, Serialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub trace_re: f64,
    pub trace_im: f64,
    /// Clamped into [0, 1] for reporting; the state itself is untouched.
    pub purity: f64,
    pub mean_n: f64,
    pub fidelity_vs_ref: f64,
    pub min_eig: f64,
    pub photon_dist: Vec<f64>,
}

impl ObservableRecord {
    pub fn compute(t: f64, rho: &DensityMatrix, reference: StateSpec) -> Result<Self> {
        let trace = rho.trace();
        Ok(Self {
            t,
            trace_re: trace.re,
            trace_im: trace.im,
            purity: purity(rho).clamp(0.0, 1.0),
            mean_n: mean_photon_number(rho),
            fidelity_vs_ref: fidelity_pure(rho, reference)?,
            min_eig: rho.min_eigenvalue()?,
            photon_dist: photon_distribution(rho),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_state, mixture, DensityMatrix, Truncation};
    use crate::linalg::ComplexMatrix;
    use num_complex::Complex64 as C64;

    fn trunc(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    #[test]
    fn purity_of_pure_and_maximally_mixed() {
        let pure = make_state(StateSpec::Coherent { alpha: C64::new(1.1, -0.2) }, trunc(20))
            .unwrap()
            .rho;
        assert!((purity(&pure) - 1.0).abs() <= 1e-10);

        let n = 8;
        let mut m = ComplexMatrix::zeros((n, n));
        for k in 0..n {
            m[[k, k]] = C64::new(1.0 / n as f64, 0.0);
        }
        let mixed = DensityMatrix::new(trunc(n), m).unwrap();
        assert!((purity(&mixed) - 1.0 / n as f64).abs() <= 1e-12);
    }

    #[test]
    fn fidelity_against_vacuum() {
        let t = trunc(5);
        let vac = make_state(StateSpec::Fock { n: 0 }, t).unwrap().rho;
        let one = make_state(StateSpec::Fock { n: 1 }, t).unwrap().rho;
        assert_eq!(fidelity_pure(&vac, StateSpec::Fock { n: 0 }).unwrap(), 1.0);
        assert_eq!(fidelity_pure(&one, StateSpec::Fock { n: 0 }).unwrap(), 0.0);
    }

    #[test]
    fn fidelity_rejects_mixed_reference() {
        let rho = make_state(StateSpec::Fock { n: 0 }, trunc(4)).unwrap().rho;
        assert!(fidelity_pure(&rho, StateSpec::Thermal { mean_occupation: 0.5 }).is_err());
    }

    #[test]
    fn trace_distance_basics() {
        let t = trunc(6);
        let vac = make_state(StateSpec::Fock { n: 0 }, t).unwrap().rho;
        let one = make_state(StateSpec::Fock { n: 1 }, t).unwrap().rho;
        assert_eq!(trace_distance(&vac, &vac).unwrap(), 0.0);
        assert!((trace_distance(&vac, &one).unwrap() - 1.0).abs() <= 1e-12);

        let other = make_state(StateSpec::Fock { n: 0 }, trunc(5)).unwrap().rho;
        assert!(trace_distance(&vac, &other).is_err());
    }

    #[test]
    fn fidelity_lower_bounds_trace_distance_for_pure_reference() {
        let t = trunc(12);
        let reference = StateSpec::Coherent { alpha: C64::new(0.8, 0.1) };
        let psi = make_state(reference, t).unwrap().rho;
        let states = [
            make_state(StateSpec::Fock { n: 2 }, t).unwrap().rho,
            make_state(StateSpec::Thermal { mean_occupation: 0.9 }, t).unwrap().rho,
            mixture(
                &[
                    (0.5, StateSpec::Coherent { alpha: C64::new(0.8, 0.1) }),
                    (0.5, StateSpec::Fock { n: 1 }),
                ],
                t,
            )
            .unwrap(),
        ];
        for rho in &states {
            let f = fidelity_pure(rho, reference).unwrap();
            let d = trace_distance(rho, &psi).unwrap();
            assert!(1.0 - f <= d + 1e-9, "1-F = {} > D = {d}", 1.0 - f);
        }
    }

    #[test]
    fn mean_photon_number_on_standard_states() {
        let t = trunc(32);
        for n in [0usize, 1, 3] {
            let rho = make_state(StateSpec::Fock { n }, t).unwrap().rho;
            assert!((mean_photon_number(&rho) - n as f64).abs() <= 1e-12);
        }
        let alpha = C64::new(1.2, -0.3);
        let rho = make_state(StateSpec::Coherent { alpha }, t).unwrap().rho;
        assert!((mean_photon_number(&rho) - alpha.norm_sqr()).abs() <= 1e-10);
    }

    #[test]
    fn husimi_vacuum_peaks_at_origin() {
        let rho = make_state(StateSpec::Fock { n: 0 }, trunc(8)).unwrap().rho;
        let grid = husimi_q(
            &rho,
            QGridBounds {
                re_min: -2.0,
                re_max: 2.0,
                im_min: -2.0,
                im_max: 2.0,
                resolution: 41,
            },
        )
        .unwrap();
        // center point is α = 0
        let center = grid.value_at(20, 20);
        assert!((center - 1.0 / PI).abs() <= 1e-10);
        assert!(grid.values.iter().all(|&v| v >= -1e-12));
        let max = grid.values.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, center);
    }

    #[test]
    fn husimi_mass_is_bounded_by_one() {
        let rho = make_state(StateSpec::Fock { n: 0 }, trunc(10)).unwrap().rho;
        let grid = husimi_q(
            &rho,
            QGridBounds {
                re_min: -4.0,
                re_max: 4.0,
                im_min: -4.0,
                im_max: 4.0,
                resolution: 81,
            },
        )
        .unwrap();
        let mass = grid.cell_sum_times_area();
        assert!(mass <= 1.0 + 0.02, "mass {mass}");
        assert!(mass >= 0.95, "mass {mass}");
    }

    #[test]
    fn husimi_rejects_degenerate_grids() {
        let rho = make_state(StateSpec::Fock { n: 0 }, trunc(4)).unwrap().rho;
        let bad_res = QGridBounds {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
            resolution: 1,
        };
        assert!(husimi_q(&rho, bad_res).is_err());
        let bad_bounds = QGridBounds {
            re_min: 1.0,
            re_max: -1.0,
            im_min: -1.0,
            im_max: 1.0,
            resolution: 11,
        };
        assert!(husimi_q(&rho, bad_bounds).is_err());
    }

    #[test]
    fn observable_record_is_self_consistent() {
        let rho = mixture(
            &[
                (0.6, StateSpec::Coherent { alpha: C64::new(1.0, 0.4) }),
                (0.4, StateSpec::Thermal { mean_occupation: 0.5 }),
            ],
            trunc(16),
        )
        .unwrap();
        let record = ObservableRecord::compute(0.7, &rho, StateSpec::Fock { n: 0 }).unwrap();
        assert_eq!(record.t, 0.7);
        let dist_sum: f64 = record.photon_dist.iter().sum();
        assert!((dist_sum - record.trace_re).abs() <= 1e-10);
        assert!(record.photon_dist.iter().all(|&p| p >= -1e-12));
        assert!(record.purity <= 1.0 + 1e-10);
        assert!(record.purity > 0.0);
        assert!(record.min_eig >= -1e-10);
    }
}
