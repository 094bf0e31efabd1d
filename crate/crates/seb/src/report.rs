//! JSON report shapes shared by the CLI and by callers embedding the
//! library. Every float serializes at 17 significant digits (see
//! [`crate::io::to_json`]); optional fields are `null` when a method has
//! nothing to put there.

use nalgebra::DVector;
use serde::Serialize;

use crate::geometry::PointSet;
use crate::recurrence::{Iterate, StopReason, System};
use crate::{equidistant, heuristic, spectral, welzl};

#[derive(Clone, Debug, Serialize)]
pub struct DroppedEntry {
    pub iteration: usize,
    pub index: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub method: String,
    /// Barycentric weights over the input points, in input order.
    pub lambda: Vec<f64>,
    pub center: Vec<f64>,
    /// Radius of the reported ball over ALL input points, dropped ones
    /// included.
    pub radius: f64,
    pub iterations: usize,
    /// One of `converged`, `max_iter`, `negative_coordinate`, `exact`.
    pub stop_reason: String,
    /// Second-largest contraction factor of the iteration map, when one ran.
    pub eta2: Option<f64>,
    pub kappa: Option<f64>,
    /// Drop events for the restart heuristic (`null` for other methods,
    /// empty when nothing was dropped).
    pub dropped: Option<Vec<DroppedEntry>>,
    /// Indices of the support points (exact solver only).
    pub support: Option<Vec<usize>>,
    /// Whether a zero-norm input forced the shifted embedding.
    pub augmented: bool,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    /// Contraction factors, descending; the leading entry is the structural
    /// eigenvalue 1 of the simplex constraint.
    pub eta: Vec<f64>,
    pub eta2: Option<f64>,
    pub kappa: Option<f64>,
    pub det_w: f64,
    /// Whether the points admit the direct equidistant solve.
    pub rank_condition: bool,
    pub augmented: bool,
    pub n: usize,
    pub dim: usize,
}

fn stop_name(stop: &StopReason) -> &'static str {
    match stop {
        StopReason::Converged => "converged",
        StopReason::MaxIter => "max_iter",
        StopReason::NegativeCoordinate { .. } => "negative_coordinate",
    }
}

fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn diagnostics_of(sys: &System) -> (Option<f64>, Option<f64>) {
    match spectral::diagnose(sys) {
        Ok(d) => (d.eta2, d.kappa),
        Err(_) => (None, None),
    }
}

pub fn from_recurrence(
    points: &PointSet,
    sys: &System,
    out: &Iterate,
    wall_time_s: f64,
) -> SolveReport {
    let center = sys.center(&out.weights);
    let radius = points.enclosing_radius(&center);
    let (eta2, kappa) = diagnostics_of(sys);
    SolveReport {
        method: "recurrence".into(),
        lambda: out.weights.vector().iter().copied().collect(),
        center: vec_of(&center),
        radius,
        iterations: out.iterations,
        stop_reason: stop_name(&out.stop).into(),
        eta2,
        kappa,
        dropped: None,
        support: None,
        augmented: sys.augmented(),
        wall_time_s,
    }
}

pub fn from_heuristic(out: &heuristic::Outcome, wall_time_s: f64) -> SolveReport {
    // rate of the system the final stage actually iterated
    let (eta2, kappa) = diagnostics_of(&out.final_system);
    SolveReport {
        method: "heuristic".into(),
        lambda: out.weights.vector().iter().copied().collect(),
        center: vec_of(&out.center),
        radius: out.full_radius,
        iterations: out.iterations,
        stop_reason: if out.converged { "converged" } else { "max_iter" }.into(),
        eta2,
        kappa,
        dropped: Some(
            out.dropped
                .iter()
                .map(|d| DroppedEntry {
                    iteration: d.iteration,
                    index: d.index,
                    value: d.value,
                })
                .collect(),
        ),
        support: None,
        augmented: out.augmented,
        wall_time_s,
    }
}

pub fn from_welzl(sol: &welzl::Solution, wall_time_s: f64) -> SolveReport {
    SolveReport {
        method: "welzl".into(),
        lambda: sol.weights.vector().iter().copied().collect(),
        center: vec_of(&sol.ball.center),
        radius: sol.ball.radius,
        iterations: 0,
        stop_reason: "exact".into(),
        eta2: None,
        kappa: None,
        dropped: None,
        support: Some(sol.support.clone()),
        augmented: false,
        wall_time_s,
    }
}

pub fn from_equidistant(sol: &equidistant::Solution, wall_time_s: f64) -> SolveReport {
    SolveReport {
        method: "equidistant".into(),
        lambda: sol.weights.vector().iter().copied().collect(),
        center: vec_of(&sol.ball.center),
        radius: sol.ball.radius,
        iterations: 0,
        stop_reason: "exact".into(),
        eta2: None,
        kappa: None,
        dropped: None,
        support: None,
        augmented: false,
        wall_time_s,
    }
}

pub fn analyze(points: &PointSet) -> crate::error::Result<AnalyzeReport> {
    let sys = System::build(points)?;
    let d = spectral::diagnose(&sys)?;
    Ok(AnalyzeReport {
        eta: d.eta,
        eta2: d.eta2,
        kappa: d.kappa,
        det_w: d.det_w,
        rank_condition: points.affinely_independent(crate::geometry::DEFAULT_TOL_RANK),
        augmented: sys.augmented(),
        n: points.n(),
        dim: points.dim(),
    })
}
