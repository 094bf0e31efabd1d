//! Exact smallest enclosing ball by randomized incremental recursion.
//!
//! `mb(P, Q)` returns the smallest ball containing P with the points of Q on
//! its surface: with Q fixed, points of P are inspected in a random order;
//! any point outside the ball of the rest is provably on the surface and is
//! moved into Q. Recursion bottoms out when |Q| = d+1 (the ball is the
//! unique circumball) or P is exhausted. Points found on the surface are
//! moved to the front of the inspection order, which keeps the recursion
//! shallow (depth <= d+2) and collapses the otherwise explosive node count
//! at d in the tens; results are identical to the unreordered recursion.
//!
//! This module is independent of the fixed-point iteration machinery. The
//! circumball of a support set S solves the lifted normal equations
//! `2 (1 + P_i . P_j) x = (||P_i||^2)` directly from a table of pairwise dot
//! products, so the recursion touches no per-node matrix assembly beyond the
//! |S| x |S| system itself.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Barycentric, PointSet};

/// A point farther out than `radius * (1 + OUTSIDE_TOL)` counts as outside;
/// the slack stops co-spherical round-off from re-adding surface points
/// forever.
const OUTSIDE_TOL: f64 = 1e-12;
/// Final enclosure is verified to `radius * (1 + ENCLOSURE_TOL)`.
const ENCLOSURE_TOL: f64 = 1e-9;
/// Degenerate supports trigger a re-run with a fresh shuffle this many times.
const MAX_RETRIES: usize = 3;
/// Cache the full n x n dot-product table below this point count (32 MB of
/// f64 at the cap); above it, pairwise dots are recomputed on demand.
const GRAM_CACHE_MAX: usize = 2048;

#[derive(Clone, Debug)]
pub struct Solution {
    pub ball: Ball,
    /// Original indices of the support points, ascending.
    pub support: Vec<usize>,
    /// Weights over all n points; zero off the support.
    pub weights: Barycentric,
}

pub fn solve(points: &PointSet, seed: u64) -> Result<Solution> {
    let n = points.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gram = if n <= GRAM_CACHE_MAX {
        Some(points.phi().transpose() * points.phi())
    } else {
        None
    };
    let mut last_err: Option<Error> = None;
    // retries continue the same random stream, so each attempt sees a fresh order
    for _attempt in 0..=MAX_RETRIES {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut ctx = Context {
            points,
            gram: gram.as_ref(),
            order,
            support: Vec::with_capacity(points.dim() + 1),
        };
        match ctx.mb(n) {
            Ok(node) => {
                let enclosed = (0..n).all(|i| {
                    ctx.dist2_to(i, &node.ball.center).sqrt()
                        <= node.ball.radius * (1.0 + ENCLOSURE_TOL)
                });
                if !enclosed {
                    last_err = Some(Error::Numerical(
                        "solved ball failed the enclosure check".into(),
                    ));
                    continue;
                }
                let mut pairs: Vec<(usize, f64)> = node
                    .support
                    .iter()
                    .copied()
                    .zip(node.lambda.iter().copied())
                    .collect();
                pairs.sort_by_key(|&(i, _)| i);
                let mut full = DVector::zeros(n);
                for &(i, l) in &pairs {
                    full[i] = l;
                }
                let weights = if pairs.is_empty() {
                    // n == 0 is rejected by PointSet; a lone point always
                    // enters the support, so this cannot happen
                    return Err(Error::Numerical("empty support".into()));
                } else {
                    Barycentric::new(full)?
                };
                return Ok(Solution {
                    ball: node.ball,
                    support: pairs.iter().map(|&(i, _)| i).collect(),
                    weights,
                });
            }
            Err(Degenerate(e)) => {
                last_err = Some(e);
                continue;
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Numerical("unreachable: no attempts ran".into())))
}

/// Ball plus the support snapshot and subset weights it was solved from.
struct Node {
    ball: Ball,
    support: Vec<usize>,
    lambda: Vec<f64>,
}

/// Signal that some encountered support subset was numerically affinely
/// dependent; the caller reshuffles and retries.
struct Degenerate(Error);

struct Context<'a> {
    points: &'a PointSet,
    gram: Option<&'a DMatrix<f64>>,
    order: Vec<usize>,
    support: Vec<usize>,
}

impl Context<'_> {
    fn gdot(&self, i: usize, j: usize) -> f64 {
        match self.gram {
            Some(g) => g[(i, j)],
            None => {
                let phi = self.points.phi();
                let mut s = 0.0;
                for r in 0..self.points.dim() {
                    s += phi[(r, i)] * phi[(r, j)];
                }
                s
            }
        }
    }

    fn dist2_to(&self, idx: usize, center: &DVector<f64>) -> f64 {
        let phi = self.points.phi();
        let mut s = 0.0;
        for r in 0..self.points.dim() {
            let t = phi[(r, idx)] - center[r];
            s += t * t;
        }
        s
    }

    /// Smallest ball of the first `end` points of `order` with the current
    /// support on its surface.
    fn mb(&mut self, end: usize) -> std::result::Result<Node, Degenerate> {
        let mut node = self.circumball_of_support()?;
        if self.support.len() == self.points.dim() + 1 {
            return Ok(node);
        }
        let mut i = 0;
        while i < end {
            let idx = self.order[i];
            let dist = self.dist2_to(idx, &node.ball.center).sqrt();
            if dist > node.ball.radius * (1.0 + OUTSIDE_TOL) {
                self.support.push(idx);
                node = self.mb(i)?;
                self.support.pop();
                // surface points examined early keep later balls large and
                // prune the recursion
                self.order[..=i].rotate_right(1);
            }
            i += 1;
        }
        Ok(node)
    }

    fn circumball_of_support(&self) -> std::result::Result<Node, Degenerate> {
        let k = self.support.len();
        if k == 0 {
            // sentinel ball that every point is outside of
            return Ok(Node {
                ball: Ball {
                    center: DVector::zeros(self.points.dim()),
                    radius: -1.0,
                },
                support: Vec::new(),
                lambda: Vec::new(),
            });
        }
        let mut m = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..=a {
                let v = 2.0 * (1.0 + self.gdot(self.support[a], self.support[b]));
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        // Cholesky failure doubles as the affine-dependence test here; the
        // reshuffle-and-retry loop above absorbs the rare false accept that a
        // nearly dependent support slips through (the final enclosure check
        // rejects its ball).
        let chol = Cholesky::new(m).ok_or_else(|| {
            Degenerate(Error::Numerical("support set is affinely dependent".into()))
        })?;
        let mut x = DVector::from_fn(k, |a, _| self.gdot(self.support[a], self.support[a]));
        chol.solve_mut(&mut x);
        let mut y = DVector::from_element(k, 1.0);
        chol.solve_mut(&mut y);
        let tau = (1.0 - x.sum()) / y.sum();
        let lambda: Vec<f64> = (0..k).map(|a| x[a] + tau * y[a]).collect();
        if !tau.is_finite() || lambda.iter().any(|l| !l.is_finite()) {
            return Err(Degenerate(Error::Numerical(
                "support solve produced non-finite weights".into(),
            )));
        }
        let phi = self.points.phi();
        let d = self.points.dim();
        let mut center = DVector::zeros(d);
        for r in 0..d {
            let mut s = 0.0;
            for (a, &l) in lambda.iter().enumerate() {
                s += l * phi[(r, self.support[a])];
            }
            center[r] = s;
        }
        let mut dmax = 0.0f64;
        for &si in &self.support {
            dmax = dmax.max(self.dist2_to(si, &center));
        }
        Ok(Node {
            ball: Ball {
                center,
                radius: dmax.sqrt(),
            },
            support: self.support.clone(),
            lambda,
        })
    }
}
