//! Drop-and-restart solve: iterate toward the equidistant weights, and every
//! time a weight falls below the simplex tolerance, remove the offending
//! point(s), renormalize the surviving weights, rebuild the system on the
//! reduced set, and continue. Dropped points are never re-admitted, so the
//! final ball is evaluated against the full original set and flagged when it
//! had to be inflated to cover a dropped point (under-coverage is reported,
//! not hidden).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{Barycentric, PointSet};
use crate::recurrence::{
    IterSettings, StopReason, System, TraceSink, DEFAULT_MAX_ITER, DEFAULT_SIMPLEX_TOL,
    DEFAULT_TOL_STEP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropPolicy {
    /// Remove every weight below `-simplex_tol` at once.
    AllNegative,
    /// Remove only the most negative weight.
    MostNegative,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub tol_step: f64,
    /// Global step budget across all restarts.
    pub max_iter: usize,
    /// Restart budget; `None` means n - 1 (each restart removes a point).
    pub max_restarts: Option<usize>,
    pub simplex_tol: f64,
    pub drop_policy: DropPolicy,
    pub concentrated_init: bool,
    /// Trace sampling stride; 0 picks the iteration default.
    pub trace_every: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol_step: DEFAULT_TOL_STEP,
            max_iter: DEFAULT_MAX_ITER,
            max_restarts: None,
            simplex_tol: DEFAULT_SIMPLEX_TOL,
            drop_policy: DropPolicy::AllNegative,
            concentrated_init: false,
            trace_every: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DropEvent {
    /// Global iteration at which the weight was seen below tolerance.
    pub iteration: usize,
    /// Original point index.
    pub index: usize,
    pub value: f64,
}

#[derive(Debug)]
pub struct Outcome {
    /// Weights over the original points; zero at dropped indices.
    pub weights: Barycentric,
    /// Surviving original indices, ascending.
    pub active: Vec<usize>,
    pub center: DVector<f64>,
    /// Enclosing radius over the surviving points only.
    pub survivor_radius: f64,
    /// Enclosing radius over all original points; this is the reported ball.
    pub full_radius: f64,
    /// True when covering a dropped point forced a larger ball than the
    /// survivors needed.
    pub under_covered: bool,
    pub dropped: Vec<DropEvent>,
    /// Total steps across restarts.
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
    /// The system the final weights were iterated on (diagnostics target).
    pub final_system: System,
    /// True if any stage ran on constant-coordinate-embedded points.
    pub augmented: bool,
}

pub fn solve(
    points: &PointSet,
    opts: &Options,
    mut sink: Option<&mut dyn TraceSink>,
) -> Result<Outcome> {
    let n = points.n();
    let max_restarts = opts.max_restarts.unwrap_or(n.saturating_sub(1));
    let mut active: Vec<usize> = (0..n).collect();
    let mut lambda = if opts.concentrated_init {
        Barycentric::concentrated(n)
    } else {
        Barycentric::uniform(n)
    };
    let mut global_iter = 0usize;
    let mut dropped: Vec<DropEvent> = Vec::new();
    let mut restarts = 0usize;
    let mut augmented = false;

    loop {
        let stage_points = points.subset(&active)?;
        let sys = System::build(&stage_points)?;
        augmented |= sys.augmented();

        let remaining = opts.max_iter - global_iter;
        if remaining == 0 {
            return finish(points, sys, lambda, active, dropped, global_iter, false, restarts, augmented);
        }
        let settings = IterSettings {
            tol_step: opts.tol_step,
            max_iter: remaining,
            watch_negative: Some(opts.simplex_tol),
            trace_every: opts.trace_every,
            iter_offset: global_iter,
            emit_initial: global_iter == 0,
        };
        let out = sys.iterate(&lambda, &settings, sink.as_deref_mut())?;
        global_iter += out.iterations;

        match out.stop {
            StopReason::Converged => {
                return finish(points, sys, out.weights, active, dropped, global_iter, true, restarts, augmented);
            }
            StopReason::MaxIter => {
                return finish(points, sys, out.weights, active, dropped, global_iter, false, restarts, augmented);
            }
            StopReason::NegativeCoordinate { index, value } => {
                let w = out.weights.vector();
                let drop_local: Vec<usize> = match opts.drop_policy {
                    DropPolicy::AllNegative => (0..w.len())
                        .filter(|&i| w[i] < -opts.simplex_tol)
                        .collect(),
                    DropPolicy::MostNegative => vec![index],
                };
                debug_assert!(drop_local.contains(&index));
                debug_assert!(value < -opts.simplex_tol);
                if drop_local.len() >= active.len() {
                    return Err(Error::DegenerateReduction(
                        "every surviving weight went negative at once".into(),
                    ));
                }
                if restarts == max_restarts {
                    return Err(Error::DegenerateReduction(format!(
                        "restart budget {} exhausted with weights still leaving the simplex",
                        max_restarts
                    )));
                }
                for &i in &drop_local {
                    dropped.push(DropEvent {
                        iteration: global_iter,
                        index: active[i],
                        value: w[i],
                    });
                }
                let keep: Vec<usize> = (0..w.len()).filter(|i| !drop_local.contains(i)).collect();
                let survivor_sum: f64 = keep.iter().map(|&i| w[i]).sum();
                if !(survivor_sum > 0.0) {
                    return Err(Error::DegenerateReduction(format!(
                        "surviving weights sum to {:e}, cannot renormalize",
                        survivor_sum
                    )));
                }
                lambda = Barycentric::new(DVector::from_iterator(
                    keep.len(),
                    keep.iter().map(|&i| w[i] / survivor_sum),
                ))?;
                active = keep.iter().map(|&i| active[i]).collect();
                restarts += 1;
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    points: &PointSet,
    final_system: System,
    stage_weights: Barycentric,
    active: Vec<usize>,
    dropped: Vec<DropEvent>,
    iterations: usize,
    converged: bool,
    restarts: usize,
    augmented: bool,
) -> Result<Outcome> {
    let n = points.n();
    let mut full = DVector::zeros(n);
    for (local, &orig) in active.iter().enumerate() {
        full[orig] = stage_weights.vector()[local];
    }
    let weights = Barycentric::with_sum_tol(full, 1e-9)?;
    let center = points.combine(weights.vector());
    let survivor_radius = active
        .iter()
        .map(|&i| (points.point(i) - &center).norm())
        .fold(0.0f64, f64::max);
    let full_radius = points.enclosing_radius(&center);
    let under_covered = full_radius > survivor_radius * (1.0 + 1e-9);
    Ok(Outcome {
        weights,
        active,
        center,
        survivor_radius,
        full_radius,
        under_covered,
        dropped,
        iterations,
        converged,
        restarts,
        final_system,
        augmented,
    })
}
