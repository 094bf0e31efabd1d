//! Point sets, barycentric weight vectors, and balls.
//!
//! A `PointSet` stores n points in d dimensions as the columns of a d x n
//! matrix `phi`. A weight vector `lambda` with coordinates summing to 1
//! selects the affine combination `phi * lambda`; the objective
//! `j_value = <u, lambda> - ||phi lambda||^2` (with `u_i = ||P_i||^2`) is the
//! weighted squared spread about that combination, and its maximum over the
//! simplex equals the squared radius of the smallest enclosing ball.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative singular-value threshold for the affine-independence test.
pub const DEFAULT_TOL_RANK: f64 = 1e-10;

/// Tolerance on |sum(lambda) - 1| accepted by [`Barycentric::new`].
pub const SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct PointSet {
    /// d x n, column i is point i.
    phi: DMatrix<f64>,
}

impl PointSet {
    pub fn from_matrix(phi: DMatrix<f64>) -> Result<Self> {
        if phi.ncols() == 0 {
            return Err(Error::Invalid("point set must contain at least one point".into()));
        }
        if phi.nrows() == 0 {
            return Err(Error::Invalid("points must have at least one coordinate".into()));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("point coordinates must be finite".into()));
        }
        Ok(Self { phi })
    }

    /// Each row of `rows` is one point.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Invalid("point set must contain at least one point".into()));
        }
        let d = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Invalid(format!(
                    "point {} has {} coordinates, expected {}",
                    i,
                    r.len(),
                    d
                )));
            }
        }
        let phi = DMatrix::from_fn(d, n, |r, c| rows[c][r]);
        Self::from_matrix(phi)
    }

    pub fn n(&self) -> usize {
        self.phi.ncols()
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.phi.column(i).into_owned()
    }

    /// Squared Euclidean norms of the points (the vector `u`).
    pub fn squared_norms(&self) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.phi.column_iter().map(|c| c.norm_squared()))
    }

    pub fn min_norm(&self) -> f64 {
        self.phi
            .column_iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// The points at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.n() {
                return Err(Error::Invalid(format!("point index {} out of range", i)));
            }
        }
        if indices.is_empty() {
            return Err(Error::Invalid("subset must contain at least one point".into()));
        }
        let phi = DMatrix::from_fn(self.dim(), indices.len(), |r, c| self.phi[(r, indices[c])]);
        Ok(Self { phi })
    }

    /// Prepends a constant coordinate 1 to every point. Weight vectors are
    /// unchanged by this embedding, and squared distances between points and
    /// affine combinations are preserved.
    pub fn lifted(&self) -> Self {
        let d = self.dim();
        let phi = DMatrix::from_fn(d + 1, self.n(), |r, c| {
            if r == 0 {
                1.0
            } else {
                self.phi[(r - 1, c)]
            }
        });
        Self { phi }
    }

    /// `phi * lambda`.
    pub fn combine(&self, lambda: &DVector<f64>) -> DVector<f64> {
        &self.phi * lambda
    }

    /// `<u, lambda> - ||phi lambda||^2`.
    pub fn j_value(&self, lambda: &DVector<f64>) -> f64 {
        let q = self.combine(lambda);
        self.squared_norms().dot(lambda) - q.norm_squared()
    }

    pub fn max_sq_dist(&self, q: &DVector<f64>) -> f64 {
        self.phi
            .column_iter()
            .map(|c| (c - q).norm_squared())
            .fold(0.0, f64::max)
    }

    /// Radius of the smallest ball centered at `q` containing every point.
    pub fn enclosing_radius(&self, q: &DVector<f64>) -> f64 {
        self.max_sq_dist(q).sqrt()
    }

    /// Number of linearly independent columns of the ones-augmented matrix,
    /// i.e. one more than the dimension of the affine span.
    pub fn affine_rank(&self, tol_rank: f64) -> usize {
        let lifted = self.lifted();
        let sv = lifted.phi.svd(false, false).singular_values;
        let largest = sv.max();
        sv.iter().filter(|&&s| s > tol_rank * largest).count()
    }

    /// True iff the points are affinely independent: no point lies in the
    /// affine span of the others. Implies n <= d + 1.
    pub fn affinely_independent(&self, tol_rank: f64) -> bool {
        self.n() <= self.dim() + 1 && self.affine_rank(tol_rank) == self.n()
    }
}

/// A weight vector whose coordinates sum to 1. Coordinates may be negative;
/// the simplex constraint (all nonnegative) is checked by callers that need it.
#[derive(Clone, Debug)]
pub struct Barycentric {
    w: DVector<f64>,
}

impl Barycentric {
    pub fn new(w: DVector<f64>) -> Result<Self> {
        Self::with_sum_tol(w, SUM_TOL)
    }

    /// Long fixed-point runs accumulate round-off in the sum; internal callers
    /// relax the check rather than renormalizing and masking a defect.
    pub(crate) fn with_sum_tol(w: DVector<f64>, tol: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Invalid("weight vector must be non-empty".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("weights must be finite".into()));
        }
        let sum: f64 = w.sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::Invalid(format!(
                "weights must sum to 1 (got {:e}, off by {:e})",
                sum,
                sum - 1.0
            )));
        }
        Ok(Self { w })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            w: DVector::from_element(n, 1.0 / n as f64),
        }
    }

    /// 0.9 on the first coordinate, the remaining 0.1 spread evenly.
    pub fn concentrated(n: usize) -> Self {
        if n == 1 {
            return Self::uniform(1);
        }
        let mut w = DVector::from_element(n, 0.1 / (n - 1) as f64);
        w[0] = 0.9;
        Self { w }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.w
    }

    pub fn min_entry(&self) -> (usize, f64) {
        let mut idx = 0;
        let mut val = self.w[0];
        for (i, &v) in self.w.iter().enumerate() {
            if v < val {
                idx = i;
                val = v;
            }
        }
        (idx, val)
    }

    /// True iff every coordinate is >= -tol.
    pub fn in_simplex(&self, tol: f64) -> bool {
        self.min_entry().1 >= -tol
    }
}

#[derive(Clone, Debug)]
pub struct Ball {
    pub center: DVector<f64>,
    pub radius: f64,
}

impl Ball {
    /// True iff `p` is within `radius * (1 + rel_tol)` of the center.
    pub fn contains(&self, p: &DVector<f64>, rel_tol: f64) -> bool {
        (p - &self.center).norm() <= self.radius * (1.0 + rel_tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn acute_triangle() -> PointSet {
        PointSet::from_rows(&[vec![1.0, 0.0], vec![3.0, 0.0], vec![2.0, 2.0]]).unwrap()
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(PointSet::from_rows(&[]).is_err());
        assert!(PointSet::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(PointSet::from_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn squared_norms_and_combine() {
        let ps = acute_triangle();
        let u = ps.squared_norms();
        assert_eq!(u.as_slice(), &[1.0, 9.0, 8.0]);
        let lam = DVector::from_vec(vec![0.5, 0.5, 0.0]);
        let q = ps.combine(&lam);
        assert_eq!(q.as_slice(), &[2.0, 0.0]);
        // spread about (2,0): 0.5*1 + 0.5*1 = 1
        assert_relative_eq!(ps.j_value(&lam), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn enclosing_radius_is_max_distance() {
        let ps = acute_triangle();
        let q = DVector::from_vec(vec![2.0, 0.75]);
        assert_relative_eq!(ps.enclosing_radius(&q), 1.25, max_relative = 1e-15);
    }

    #[test]
    fn lift_prepends_ones() {
        let ps = PointSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let lifted = ps.lifted();
        assert_eq!(lifted.dim(), 3);
        assert_eq!(lifted.point(0).as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(lifted.point(1).as_slice(), &[1.0, 1.0, 0.0]);
    }

    #[test]
    fn subset_preserves_order() {
        let ps = acute_triangle();
        let sub = ps.subset(&[2, 0]).unwrap();
        assert_eq!(sub.point(0).as_slice(), &[2.0, 2.0]);
        assert_eq!(sub.point(1).as_slice(), &[1.0, 0.0]);
        assert!(ps.subset(&[3]).is_err());
        assert!(ps.subset(&[]).is_err());
    }

    #[test]
    fn affine_independence() {
        assert!(acute_triangle().affinely_independent(DEFAULT_TOL_RANK));
        let collinear =
            PointSet::from_rows(&[vec![1.0, 0.0], vec![5.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(!collinear.affinely_independent(DEFAULT_TOL_RANK));
        assert_eq!(collinear.affine_rank(DEFAULT_TOL_RANK), 2);
        // four points in the plane can never be affinely independent
        let four = PointSet::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        assert!(!four.affinely_independent(DEFAULT_TOL_RANK));
        let single = PointSet::from_rows(&[vec![5.0, 5.0]]).unwrap();
        assert!(single.affinely_independent(DEFAULT_TOL_RANK));
    }

    #[test]
    fn barycentric_validation() {
        assert!(Barycentric::new(DVector::from_vec(vec![0.5, 0.5])).is_ok());
        assert!(Barycentric::new(DVector::from_vec(vec![1.5, -0.5])).is_ok());
        assert!(Barycentric::new(DVector::from_vec(vec![0.5, 0.4])).is_err());
        assert!(Barycentric::new(DVector::from_vec(vec![])).is_err());
        let u = Barycentric::uniform(4);
        assert_eq!(u.vector().as_slice(), &[0.25; 4]);
        let c = Barycentric::concentrated(3);
        assert_relative_eq!(c.vector()[0], 0.9);
        assert_relative_eq!(c.vector()[1], 0.05);
        assert_relative_eq!(c.vector()[2], 0.05);
        assert_eq!(Barycentric::concentrated(1).vector().as_slice(), &[1.0]);
    }

    #[test]
    fn min_entry_and_simplex_test() {
        let b = Barycentric::new(DVector::from_vec(vec![0.6, -0.1, 0.5])).unwrap();
        assert_eq!(b.min_entry(), (1, -0.1));
        assert!(!b.in_simplex(1e-9));
        assert!(b.in_simplex(0.2));
    }

    #[test]
    fn ball_contains() {
        let b = Ball {
            center: DVector::from_vec(vec![0.0, 0.0]),
            radius: 1.0,
        };
        assert!(b.contains(&DVector::from_vec(vec![1.0, 0.0]), 1e-12));
        assert!(!b.contains(&DVector::from_vec(vec![1.1, 0.0]), 1e-12));
    }

    proptest! {
        // Splitting the squared spread about any q into the spread about the
        // weighted combination plus the offset of q from it:
        //   sum_i w_i ||P_i - q||^2 = j_value(w) + ||phi w - q||^2
        #[test]
        fn spread_identity(
            coords in proptest::collection::vec(-10.0f64..10.0, 2..24),
            qraw in proptest::collection::vec(-10.0f64..10.0, 1..4),
            wraw in proptest::collection::vec(0.01f64..1.0, 2..6),
        ) {
            let d = qraw.len();
            let n = wraw.len();
            prop_assume!(coords.len() >= d * n);
            let rows: Vec<Vec<f64>> = (0..n).map(|i| coords[i*d..(i+1)*d].to_vec()).collect();
            let ps = PointSet::from_rows(&rows).unwrap();
            let total: f64 = wraw.iter().sum();
            let w = DVector::from_iterator(n, wraw.iter().map(|v| v / total));
            let q = DVector::from_vec(qraw);
            let lhs: f64 = (0..n).map(|i| w[i] * (ps.point(i) - &q).norm_squared()).sum();
            let rhs = ps.j_value(&w) + (ps.combine(&w) - &q).norm_squared();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }
    }
}
