//! Direct solve for the equidistant weight vector.
//!
//! The point at equal squared distance r^2 from all points satisfies
//! `2 <P_i, Q> = u_i + tau'` for a shared offset tau'. Writing `Q = phi
//! lambda` and absorbing the sum constraint by augmenting each point with a
//! constant coordinate 1 gives the symmetric positive definite system
//!
//! ```text
//! M lambda = u + tau 1,   M = 2 phi+^T phi+,   sum(lambda) = 1
//! ```
//!
//! solved with one Cholesky factorization and two right-hand sides:
//! `x = M^-1 u`, `y = M^-1 1`, `tau = (1 - 1^T x) / (1^T y)`,
//! `lambda = x + tau y`. M is positive definite exactly when the points are
//! affinely independent. No division by point norms occurs, so points at or
//! near the origin need no special handling, and n = 1 works (its unique
//! "equidistant" point is the point itself, radius 0).

use nalgebra::{Cholesky, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Ball, Barycentric, PointSet, DEFAULT_TOL_RANK};

/// Relative spread of squared point-to-center distances accepted as
/// "equidistant" in the a-posteriori check.
const EQUIDISTANCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Solution {
    pub weights: Barycentric,
    pub tau: f64,
    pub ball: Ball,
    /// Largest relative spread of squared distances observed in the check.
    pub distance_spread: f64,
}

pub fn solve(points: &PointSet) -> Result<Solution> {
    solve_with_tol(points, DEFAULT_TOL_RANK)
}

pub fn solve_with_tol(points: &PointSet, tol_rank: f64) -> Result<Solution> {
    let (lambda, tau, ball, spread) = circumball(points, tol_rank)?;
    Ok(Solution {
        // the defect correction in circumball leaves the sum at roundoff;
        // the relaxed bound only guards against structural breakage
        weights: Barycentric::with_sum_tol(lambda, 1e-9)?,
        tau,
        ball,
        distance_spread: spread,
    })
}

/// Core kernel, also used on support subsets by the exact solver. Returns
/// the raw weight vector, tau, the ball, and the observed distance spread.
pub(crate) fn circumball(
    points: &PointSet,
    tol_rank: f64,
) -> Result<(DVector<f64>, f64, Ball, f64)> {
    let n = points.n();
    if !points.affinely_independent(tol_rank) {
        return Err(Error::RankCondition {
            n,
            rank: points.affine_rank(tol_rank).saturating_sub(1),
        });
    }
    let lifted = points.lifted();
    let m = lifted.phi().transpose() * lifted.phi() * 2.0;
    let chol = Cholesky::new(m).ok_or(Error::RankCondition {
        n,
        rank: points.affine_rank(tol_rank).saturating_sub(1),
    })?;
    let u = points.squared_norms();
    let ones = DVector::from_element(n, 1.0);
    let x = chol.solve(&u);
    let y = chol.solve(&ones);
    let denom = y.sum();
    if !(denom > 0.0) {
        // 1^T M^-1 1 > 0 whenever M is positive definite
        return Err(Error::Numerical("normalization direction collapsed".into()));
    }
    let mut tau = (1.0 - x.sum()) / denom;
    let mut lambda = &x + &y * tau;
    // When x.sum() is large the normalization suffers cancellation and the
    // computed weights can miss sum 1 by ~1e-12. The constraint is linear in
    // tau, so one defect-correction pass restores it to roundoff.
    let defect = 1.0 - lambda.sum();
    if defect != 0.0 {
        tau += defect / denom;
        lambda += &y * (defect / denom);
    }
    let center = points.combine(&lambda);

    let mut dmax = 0.0f64;
    let mut dmin = f64::INFINITY;
    for i in 0..n {
        let d2 = (points.point(i) - &center).norm_squared();
        dmax = dmax.max(d2);
        dmin = dmin.min(d2);
    }
    let spread = if dmax > 0.0 { (dmax - dmin) / dmax } else { 0.0 };
    if spread > EQUIDISTANCE_TOL {
        return Err(Error::Numerical(format!(
            "distances from the solved center differ by a relative {:e}",
            spread
        )));
    }
    let ball = Ball {
        center,
        radius: dmax.sqrt(),
    };
    Ok((lambda, tau, ball, spread))
}
