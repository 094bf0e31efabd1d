//! Spectral diagnostics of the iteration map.
//!
//! The eigenvalues of `R = I - Omega G` govern convergence. `Omega G` is a
//! product of a symmetric PSD matrix and a symmetric matrix, so its spectrum
//! is real and equals that of the symmetric matrix
//! `Omega^{1/2} G Omega^{1/2}`, which is what we actually diagonalize
//! (`X Y` and `Y X` share nonzero spectra, and the symmetric form needs no
//! invertibility assumptions). One eigenvalue of `Omega G` is always 0
//! (since `Omega 1 = 0`), giving `R` its structural eigenvalue 1 along the
//! weight-sum direction; the rate that matters is the second-largest
//! eigenvalue `eta2`.
//!
//! `W` eliminates that structural direction: with `A = Omega G`,
//! `W[i][j] = A[i][j] - A[i][n-1]` over the leading (n-1) rows and columns.
//! Its determinant is the product of the nonzero eigenvalues of `A`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::recurrence::System;

/// eta2 at or above `1 - KAPPA_EPS` makes `kappa = 1/ln(1/eta2)` meaningless.
const KAPPA_EPS: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct Diagnostics {
    /// Eigenvalues of `R`, descending. The first is the structural 1.
    pub eta: Vec<f64>,
    /// Smallest eigenvalue of `R`: the overall contraction factor `1 - rho(Omega G)`.
    pub eta_min: f64,
    /// Second-largest eigenvalue of `R`; `None` for n = 1.
    pub eta2: Option<f64>,
    /// `1 / ln(1/eta2)`; `None` for n = 1 or when `kappa_undefined`.
    pub kappa: Option<f64>,
    /// True when eta2 is so close to 1 that kappa has no meaning.
    pub kappa_undefined: bool,
    /// Determinant of the reduced matrix `W` (1.0 for n = 1, the empty product).
    pub det_w: f64,
}

pub fn diagnose(sys: &System) -> Result<Diagnostics> {
    let eta = eta_spectrum(sys.omega(), sys.gram())?;
    let n = eta.len();
    let eta_min = eta[n - 1];
    let eta2 = (n >= 2).then(|| eta[1]);
    let (kappa, kappa_undefined) = match eta2 {
        None => (None, false),
        Some(e2) if e2 >= 1.0 - KAPPA_EPS => (None, true),
        Some(e2) => {
            // clamp: round-off can push a mathematically tiny eta2 below zero
            let e2 = e2.max(f64::MIN_POSITIVE);
            (Some(1.0 / (1.0 / e2).ln()), false)
        }
    };
    let det_w = if n == 1 {
        1.0
    } else {
        reduced_matrix(sys.omega(), sys.gram()).determinant()
    };
    Ok(Diagnostics {
        eta,
        eta_min,
        eta2,
        kappa,
        kappa_undefined,
        det_w,
    })
}

/// Eigenvalues of `R = I - Omega G` in descending order, computed through
/// the symmetric form of `Omega G`.
pub fn eta_spectrum(omega: &DMatrix<f64>, gram: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = omega.nrows();
    let half = sqrt_psd(omega)?;
    let mut sym = &half * gram * &half;
    // enforce exact symmetry before the symmetric eigensolver
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (sym[(i, j)] + sym[(j, i)]);
            sym[(i, j)] = avg;
            sym[(j, i)] = avg;
        }
    }
    let nu = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("eigensolver failed to converge".into()))?
        .eigenvalues;
    let mut eta: Vec<f64> = nu.iter().map(|v| 1.0 - v).collect();
    eta.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(eta)
}

/// `W[i][j] = A[i][j] - A[i][n-1]` for `A = Omega G`, size (n-1) x (n-1).
pub fn reduced_matrix(omega: &DMatrix<f64>, gram: &DMatrix<f64>) -> DMatrix<f64> {
    let a = omega * gram;
    let n = a.nrows();
    DMatrix::from_fn(n - 1, n - 1, |i, j| a[(i, j)] - a[(i, n - 1)])
}

fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("eigensolver failed to converge".into()))?;
    let vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let mut scaled = eig.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= vals[j];
    }
    Ok(&scaled * eig.eigenvectors.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointSet;
    use approx::assert_relative_eq;

    fn diag_of(rows: &[Vec<f64>]) -> Diagnostics {
        let ps = PointSet::from_rows(rows).unwrap();
        let sys = System::build(&ps).unwrap();
        diagnose(&sys).unwrap()
    }

    #[test]
    fn acute_triangle_spectrum() {
        let d = diag_of(&[vec![1.0, 0.0], vec![3.0, 0.0], vec![2.0, 2.0]]);
        assert!((d.eta[0] - 1.0).abs() < 1e-10);
        assert!((d.eta[1] - 0.906483968322).abs() < 1e-9);
        assert!((d.eta[2] - 0.786399926809).abs() < 1e-9);
        assert_eq!(d.eta2, Some(d.eta[1]));
        assert_relative_eq!(d.eta_min, 0.786399926809, max_relative = 1e-8);
    }

    #[test]
    fn obtuse_triangle_spectrum_and_kappa() {
        let d = diag_of(&[vec![1.0, 0.0], vec![5.0, 0.0], vec![3.0, 1.0]]);
        let eta2 = d.eta2.unwrap();
        assert!((eta2 - 0.980486568594).abs() < 1e-9);
        assert!((d.eta[2] - 0.680332144857).abs() < 1e-9);
        let kappa = d.kappa.unwrap();
        assert_relative_eq!(kappa, 1.0 / (1.0 / eta2).ln(), max_relative = 1e-12);
        // ~50.7; the loose target 49.5 comes from evaluating at the
        // 3-digit-rounded eta2 = 0.980
        assert!((kappa - 49.5).abs() < 2.0, "kappa = {}", kappa);
    }

    #[test]
    fn identity_five_points() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let d = diag_of(&rows);
        // eta2 = 1 - 1/n for the standard simplex
        assert!((d.eta2.unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn reduced_matrix_known_instance() {
        // two unit points at angle +-theta plus one at (-1, 0), p = cos(theta) = 0.6
        let p = 0.6;
        let q = (1.0f64 - p * p).sqrt();
        let ps = PointSet::from_rows(&[vec![-1.0, 0.0], vec![p, q], vec![p, -q]]).unwrap();
        let sys = System::build(&ps).unwrap();
        let w = reduced_matrix(sys.omega(), sys.gram());
        assert!((w[(0, 0)] - 128.0 / 225.0).abs() < 1e-12);
        assert!(w[(0, 1)].abs() < 1e-12);
        assert!((w[(1, 0)] + 16.0 / 225.0).abs() < 1e-12);
        assert!((w[(1, 1)] - 96.0 / 225.0).abs() < 1e-12);
        let det = w.determinant();
        let formula = (4.0 / 27.0) * (1.0 - p) * (1.0 + p).powi(3);
        assert!((det - formula).abs() < 1e-12);
    }

    #[test]
    fn single_point_conventions() {
        let d = diag_of(&[vec![2.0, 1.0]]);
        assert_eq!(d.eta.len(), 1);
        assert_eq!(d.eta2, None);
        assert_eq!(d.kappa, None);
        assert!(!d.kappa_undefined);
        assert_eq!(d.det_w, 1.0);
    }

    #[test]
    fn duplicate_points_make_kappa_undefined() {
        let d = diag_of(&[vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert!(d.eta2.unwrap() >= 1.0 - 1e-14);
        assert!(d.kappa_undefined);
        assert_eq!(d.kappa, None);
    }

    #[test]
    fn antipodal_pair_has_zero_eta2() {
        // the iteration hits the fixed point in one step; eta2 only reaches
        // eigensolver noise (~2e-16), which still pins kappa = 1/ln(1/eta2)
        // below 0.05 steps per digit
        let d = diag_of(&[vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert!(d.eta2.unwrap().abs() < 1e-12);
        let k = d.kappa.unwrap();
        assert!(k >= 0.0 && k < 0.05, "kappa = {}", k);
    }

    #[test]
    fn det_w_equals_product_of_nonzero_eigenvalues() {
        let ps = PointSet::from_rows(&[vec![1.0, 0.5], vec![3.0, -0.25], vec![2.5, 2.0]]).unwrap();
        let sys = System::build(&ps).unwrap();
        let d = diagnose(&sys).unwrap();
        let prod: f64 = d.eta.iter().skip(1).map(|e| 1.0 - e).product();
        assert_relative_eq!(d.det_w, prod, max_relative = 1e-9);
    }
}
