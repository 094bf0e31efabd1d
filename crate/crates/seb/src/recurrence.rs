//! The affine fixed-point iteration `lambda <- R lambda + c`.
//!
//! For points P_1..P_n with squared norms u_i, let D = diag(1/u_i),
//! s = sum_i 1/u_i and G = phi^T phi. The system is
//!
//! ```text
//! Omega = (s D - (D1)(D1)^T) / (n s)
//! R     = I - Omega G
//! c     = 1/(2n) * 1 - 1/(2s) * D1
//! ```
//!
//! `Omega` is symmetric positive semidefinite with `Omega 1 = 0`, so column
//! sums of `R` are 1 and `sum(c) = 0`: the iteration preserves the weight
//! sum. Its fixed points are the equidistant weight vectors.
//!
//! Points with squared norm below a threshold would blow up D, so such sets
//! are embedded with a prepended constant coordinate 1 (see
//! [`crate::geometry::PointSet::lifted`]) before building the system. The
//! embedding leaves weight vectors, distances to affine combinations, and
//! the objective unchanged; reported centers always live in the original
//! coordinates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Barycentric, PointSet};

pub const DEFAULT_TOL_STEP: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Points with norm at or below this trigger the constant-coordinate embedding.
pub const DEFAULT_TOL_NORM: f64 = 1e-9;
/// A weight this far below zero counts as leaving the simplex.
pub const DEFAULT_SIMPLEX_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct System {
    original: PointSet,
    augmented: bool,
    r: DMatrix<f64>,
    /// `R - I` with column sums forced to exactly zero. Steps are evaluated
    /// as `lambda + (B lambda + c)` so the update is the residual itself: it
    /// carries no systematic weight-sum drift and goes stationary once it
    /// falls below the resolution of `lambda`.
    b: DMatrix<f64>,
    c: DVector<f64>,
    omega: DMatrix<f64>,
    gram: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct IterSettings {
    pub tol_step: f64,
    pub max_iter: usize,
    /// `Some(tol)` stops the iteration as soon as a weight drops below `-tol`.
    pub watch_negative: Option<f64>,
    /// Trace sampling stride; 0 picks 1 for n <= 64 and 10 otherwise.
    pub trace_every: usize,
    /// Added to iteration numbers in trace rows, for traces spanning restarts.
    pub iter_offset: usize,
    /// Emit a trace row for the initial vector (iteration `iter_offset`).
    pub emit_initial: bool,
}

impl Default for IterSettings {
    fn default() -> Self {
        Self {
            tol_step: DEFAULT_TOL_STEP,
            max_iter: DEFAULT_MAX_ITER,
            watch_negative: None,
            trace_every: 0,
            iter_offset: 0,
            emit_initial: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StopReason {
    /// `||lambda_new - lambda_old||_inf < tol_step`.
    Converged,
    /// The iteration budget ran out first.
    MaxIter,
    /// With `watch_negative`: the most negative weight and its index
    /// (relative to the system's own point order).
    NegativeCoordinate { index: usize, value: f64 },
}

#[derive(Clone, Debug)]
pub struct Iterate {
    pub weights: Barycentric,
    /// Steps actually performed.
    pub iterations: usize,
    pub stop: StopReason,
    /// Last step's `||lambda_new - lambda_old||_inf`.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub iter: usize,
    pub residual_inf: f64,
    pub j_value: f64,
    pub radius: f64,
    pub lambda_min: f64,
}

pub trait TraceSink {
    fn record(&mut self, row: &TraceRow);
}

impl TraceSink for Vec<TraceRow> {
    fn record(&mut self, row: &TraceRow) {
        self.push(*row);
    }
}

impl System {
    pub fn build(points: &PointSet) -> Result<Self> {
        Self::build_with_tol(points, DEFAULT_TOL_NORM)
    }

    pub fn build_with_tol(points: &PointSet, tol_norm: f64) -> Result<Self> {
        let augmented = points.min_norm() <= tol_norm;
        let iter_points = if augmented {
            points.lifted()
        } else {
            points.clone()
        };
        let n = iter_points.n();
        let nf = n as f64;
        let u = iter_points.squared_norms();
        let dvec = u.map(|ui| 1.0 / ui);
        let s: f64 = dvec.sum();
        if !s.is_finite() {
            return Err(Error::Numerical("point norms too small to invert".into()));
        }
        let gram = iter_points.phi().transpose() * iter_points.phi();
        let mut omega = DMatrix::from_fn(n, n, |i, j| -dvec[i] * dvec[j]);
        for i in 0..n {
            omega[(i, i)] += s * dvec[i];
        }
        omega /= nf * s;
        let mut r = DMatrix::identity(n, n) - &omega * &gram;
        let mut c = DVector::from_fn(n, |i, _| 0.5 / nf - 0.5 * dvec[i] / s);
        // R has unit column sums and c sums to zero; the construction above
        // misses both by a few ulps, and that bias compounds linearly over
        // long runs. Absorb each defect into one entry so the per-step drift
        // of sum(lambda) is unbiased rounding noise instead.
        for j in 0..n {
            let defect = r.column(j).sum() - 1.0;
            r[(j, j)] -= defect;
        }
        c[0] -= c.sum();
        let mut b = r.clone();
        for i in 0..n {
            b[(i, i)] -= 1.0;
        }
        for j in 0..n {
            let defect = b.column(j).sum();
            b[(j, j)] -= defect;
        }
        Ok(Self {
            original: points.clone(),
            augmented,
            r,
            b,
            c,
            omega,
            gram,
        })
    }

    pub fn n(&self) -> usize {
        self.original.n()
    }

    pub fn original(&self) -> &PointSet {
        &self.original
    }

    pub fn augmented(&self) -> bool {
        self.augmented
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `out = B lambda + c`: the step increment. Its exact value sums to
    /// zero, so the computed sum is pure evaluation rounding and gets
    /// projected out.
    fn delta_into(&self, lambda: &DVector<f64>, out: &mut DVector<f64>) {
        out.copy_from(&self.c);
        out.gemv(1.0, &self.b, lambda, 1.0);
        out.add_scalar_mut(-out.sum() / out.len() as f64);
    }

    /// `out = R lambda + c`, no allocation. Evaluated in increment form
    /// `lambda + (B lambda + c)`, which keeps the weight sum at rounding
    /// accuracy instead of letting matrix-vector round-off drift it.
    pub fn step_into(&self, lambda: &DVector<f64>, out: &mut DVector<f64>) {
        self.delta_into(lambda, out);
        *out += lambda;
    }

    /// `||R w + c - w||_inf`: how far `w` is from being a fixed point.
    pub fn fixed_point_residual(&self, w: &Barycentric) -> f64 {
        let mut next = DVector::zeros(self.n());
        self.step_into(w.vector(), &mut next);
        (&next - w.vector()).amax()
    }

    /// Affine combination in the original coordinates.
    pub fn center(&self, w: &Barycentric) -> DVector<f64> {
        self.original.combine(w.vector())
    }

    pub fn iterate<'s, 't>(
        &self,
        init: &Barycentric,
        settings: &IterSettings,
        mut sink: Option<&'s mut (dyn TraceSink + 't)>,
    ) -> Result<Iterate> {
        if init.len() != self.n() {
            return Err(Error::Invalid(format!(
                "initial weights have length {}, expected {}",
                init.len(),
                self.n()
            )));
        }
        if settings.max_iter == 0 {
            return Err(Error::Invalid("max_iter must be at least 1".into()));
        }
        if !(settings.tol_step > 0.0) {
            return Err(Error::Invalid("tol_step must be positive".into()));
        }
        let every = match settings.trace_every {
            0 => {
                if self.n() <= 64 {
                    1
                } else {
                    10
                }
            }
            e => e,
        };

        let mut lambda = init.vector().clone();
        let mut delta = DVector::zeros(self.n());
        let mut comp = DVector::zeros(self.n());
        if settings.emit_initial {
            if let Some(sink) = sink.as_deref_mut() {
                sink.record(&self.trace_row(settings.iter_offset, 0.0, &lambda));
            }
        }

        let mut iterations = 0;
        let mut residual;
        let stop = loop {
            self.delta_into(&lambda, &mut delta);
            residual = delta.amax();
            // compensated update lambda += delta: each entry's addition
            // rounding is carried into the next step, so the weight sum
            // cannot drift even over millions of steps
            for i in 0..lambda.len() {
                let y: f64 = delta[i] - comp[i];
                let t: f64 = lambda[i] + y;
                comp[i] = (t - lambda[i]) - y;
                lambda[i] = t;
            }
            iterations += 1;

            let converged = residual < settings.tol_step;
            let negative = if converged {
                None
            } else {
                settings.watch_negative.and_then(|tol| {
                    let (idx, val) = min_entry(&lambda);
                    (val < -tol).then_some((idx, val))
                })
            };
            let exhausted = iterations == settings.max_iter;
            let stopping = converged || negative.is_some() || exhausted;

            let global = settings.iter_offset + iterations;
            if stopping || global % every == 0 {
                if let Some(sink) = sink.as_deref_mut() {
                    sink.record(&self.trace_row(global, residual, &lambda));
                }
            }

            if converged {
                break StopReason::Converged;
            }
            if let Some((index, value)) = negative {
                break StopReason::NegativeCoordinate { index, value };
            }
            if exhausted {
                break StopReason::MaxIter;
            }
        };

        // The compensated update pins the weight sum near machine precision
        // for any run length; this bound only trips if something is
        // genuinely broken.
        let weights = Barycentric::with_sum_tol(lambda, 1e-9)?;
        Ok(Iterate {
            weights,
            iterations,
            stop,
            residual,
        })
    }

    fn trace_row(&self, iter: usize, residual_inf: f64, lambda: &DVector<f64>) -> TraceRow {
        let q = self.original.combine(lambda);
        TraceRow {
            iter,
            residual_inf,
            j_value: self.original.j_value(lambda),
            radius: self.original.enclosing_radius(&q),
            lambda_min: min_entry(lambda).1,
        }
    }
}

fn min_entry(v: &DVector<f64>) -> (usize, f64) {
    let mut idx = 0;
    let mut val = v[0];
    for (i, &x) in v.iter().enumerate() {
        if x < val {
            idx = i;
            val = x;
        }
    }
    (idx, val)
}
