//! Random-instance benchmark harness.
//!
//! Cases are lines of `d,n,instances,seed`. Instance k of a case draws
//! points from the unit hypercube with stream seed `seed + k`; the exact
//! solver (same seed) supplies the reference ball, every requested method is
//! timed (median of 3 runs around the solve call only) and scored by
//! relative radius error and absolute center error. Instances run in
//! parallel, methods within an instance sequentially; `SEB_THREADS` caps the
//! worker count.

use std::io::Write;
use std::time::Instant;

use nalgebra::DVector;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{PointSet, DEFAULT_TOL_RANK};
use crate::io::fmt_f64;
use crate::recurrence::{IterSettings, System};
use crate::{equidistant, heuristic, welzl};

#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub id: String,
    pub d: usize,
    pub n: usize,
    pub instances: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Welzl,
    Recurrence,
    Heuristic,
    Equidistant,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "welzl" => Ok(Self::Welzl),
            "recurrence" => Ok(Self::Recurrence),
            "heuristic" => Ok(Self::Heuristic),
            "equidistant" => Ok(Self::Equidistant),
            other => Err(Error::Invalid(format!(
                "unknown method {:?} (expected welzl, recurrence, heuristic, or equidistant)",
                other
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Welzl => "welzl",
            Self::Recurrence => "recurrence",
            Self::Heuristic => "heuristic",
            Self::Equidistant => "equidistant",
        }
    }
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let m = Method::parse(part)?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(Error::Invalid("no methods requested".into()));
    }
    Ok(methods)
}

/// Lines of `d,n,instances,seed`; blank lines and `#` comments are skipped.
/// Case ids are the 1-based position in the file.
pub fn parse_cases(text: &str) -> Result<Vec<CaseSpec>> {
    let mut cases = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Input(format!(
                "case line {}: expected d,n,instances,seed, got {:?}",
                lineno + 1,
                line
            )));
        }
        let parse = |s: &str, what: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| {
                Error::Input(format!(
                    "case line {}: cannot parse {} value {:?}",
                    lineno + 1,
                    what,
                    s
                ))
            })
        };
        let d = parse(fields[0], "dimension")? as usize;
        let n = parse(fields[1], "count")? as usize;
        let instances = parse(fields[2], "instances")? as usize;
        let seed = parse(fields[3], "seed")?;
        if d == 0 || n == 0 || instances == 0 {
            return Err(Error::Input(format!(
                "case line {}: dimension, count, and instances must be positive",
                lineno + 1
            )));
        }
        cases.push(CaseSpec {
            id: (cases.len() + 1).to_string(),
            d,
            n,
            instances,
            seed,
        });
    }
    if cases.is_empty() {
        return Err(Error::Input("no cases in case file".into()));
    }
    Ok(cases)
}

/// Uniform draws from [0, 1)^d: point-major (all coordinates of point i
/// before point i+1, coordinates in ascending index order), each coordinate
/// from the top 53 bits of one `next_u64` of a ChaCha8 stream seeded with
/// `seed`. Same (d, n, seed) always yields the same points; a longer draw
/// extends a shorter one.
pub fn gen_uniform_hypercube(d: usize, n: usize, seed: u64) -> Result<PointSet> {
    if d == 0 || n == 0 {
        return Err(Error::Invalid("dimension and count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| (rng.next_u64() >> 11) as f64 * (2f64).powi(-53))
                .collect()
        })
        .collect();
    PointSet::from_rows(&rows)
}

#[derive(Clone, Debug)]
pub struct InstanceRecord {
    pub case_id: String,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub method: Method,
    /// Method not applicable to the instance (e.g. the direct equidistant
    /// solve on affinely dependent points).
    pub skipped: bool,
    pub time_s: f64,
    pub rel_radius_err: f64,
    pub center_err: f64,
    pub iterations: usize,
    pub drops: usize,
}

#[derive(Clone, Debug)]
pub struct AggregateRecord {
    pub case_id: String,
    pub d: usize,
    pub n: usize,
    pub method: Method,
    pub instances: usize,
    pub skipped: usize,
    /// Arithmetic means over the non-skipped instances.
    pub mean_time_s: f64,
    pub mean_rel_radius_err: f64,
    pub mean_center_err: f64,
    pub mean_iterations: f64,
    pub mean_drops: f64,
}

struct MethodRun {
    center: DVector<f64>,
    radius: f64,
    iterations: usize,
    drops: usize,
}

fn run_method(points: &PointSet, method: Method, seed: u64) -> Result<MethodRun> {
    match method {
        Method::Welzl => {
            let sol = welzl::solve(points, seed)?;
            Ok(MethodRun {
                center: sol.ball.center,
                radius: sol.ball.radius,
                iterations: 0,
                drops: 0,
            })
        }
        Method::Equidistant => {
            let sol = equidistant::solve(points)?;
            Ok(MethodRun {
                center: sol.ball.center,
                radius: sol.ball.radius,
                iterations: 0,
                drops: 0,
            })
        }
        Method::Recurrence => {
            let sys = System::build(points)?;
            let out = sys.iterate(
                &crate::geometry::Barycentric::uniform(points.n()),
                &IterSettings::default(),
                None,
            )?;
            let center = sys.center(&out.weights);
            let radius = points.enclosing_radius(&center);
            Ok(MethodRun {
                center,
                radius,
                iterations: out.iterations,
                drops: 0,
            })
        }
        Method::Heuristic => {
            let out = heuristic::solve(points, &heuristic::Options::default(), None)?;
            Ok(MethodRun {
                center: out.center,
                radius: out.full_radius,
                iterations: out.iterations,
                drops: out.dropped.len(),
            })
        }
    }
}

fn run_instance(case: &CaseSpec, k: usize, methods: &[Method]) -> Result<Vec<InstanceRecord>> {
    let seed = case.seed + k as u64;
    let points = gen_uniform_hypercube(case.d, case.n, seed)?;
    let truth = welzl::solve(&points, seed)?;
    let mut records = Vec::with_capacity(methods.len());
    for &method in methods {
        if method == Method::Equidistant && !points.affinely_independent(DEFAULT_TOL_RANK) {
            records.push(InstanceRecord {
                case_id: case.id.clone(),
                d: case.d,
                n: case.n,
                seed,
                method,
                skipped: true,
                time_s: 0.0,
                rel_radius_err: 0.0,
                center_err: 0.0,
                iterations: 0,
                drops: 0,
            });
            continue;
        }
        // timing wraps the solve call only; 3 runs, median
        let mut times = [0.0f64; 3];
        let mut run = None;
        for t in times.iter_mut() {
            let t0 = Instant::now();
            let r = run_method(&points, method, seed)?;
            *t = t0.elapsed().as_secs_f64();
            run = Some(r);
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let run = run.unwrap();
        let rel_radius_err = if truth.ball.radius > 0.0 {
            (run.radius - truth.ball.radius).abs() / truth.ball.radius
        } else {
            run.radius.abs()
        };
        let center_err = (&run.center - &truth.ball.center).norm();
        records.push(InstanceRecord {
            case_id: case.id.clone(),
            d: case.d,
            n: case.n,
            seed,
            method,
            skipped: false,
            time_s: times[1],
            rel_radius_err,
            center_err,
            iterations: run.iterations,
            drops: run.drops,
        });
    }
    Ok(records)
}

/// Runs every case; returns per-instance records (case order, then instance
/// order, then method order) and one aggregate per (case, method).
pub fn run(cases: &[CaseSpec], methods: &[Method], threads: Option<usize>) -> Result<(Vec<InstanceRecord>, Vec<AggregateRecord>)> {
    let body = || -> Result<Vec<InstanceRecord>> {
        let mut all = Vec::new();
        for case in cases {
            let per_case: Vec<Vec<InstanceRecord>> = (0..case.instances)
                .into_par_iter()
                .map(|k| run_instance(case, k, methods))
                .collect::<Result<_>>()?;
            all.extend(per_case.into_iter().flatten());
        }
        Ok(all)
    };
    let instances = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Invalid(format!("cannot build thread pool: {}", e)))?
            .install(body),
        None => body(),
    }?;
    let aggregates = aggregate(cases, methods, &instances);
    Ok((instances, aggregates))
}

fn aggregate(cases: &[CaseSpec], methods: &[Method], records: &[InstanceRecord]) -> Vec<AggregateRecord> {
    let mut out = Vec::new();
    for case in cases {
        for &method in methods {
            let rows: Vec<&InstanceRecord> = records
                .iter()
                .filter(|r| r.case_id == case.id && r.method == method)
                .collect();
            let done: Vec<&&InstanceRecord> = rows.iter().filter(|r| !r.skipped).collect();
            let count = done.len();
            let mean = |f: &dyn Fn(&InstanceRecord) -> f64| -> f64 {
                if count == 0 {
                    0.0
                } else {
                    done.iter().map(|r| f(r)).sum::<f64>() / count as f64
                }
            };
            out.push(AggregateRecord {
                case_id: case.id.clone(),
                d: case.d,
                n: case.n,
                method,
                instances: rows.len(),
                skipped: rows.len() - count,
                mean_time_s: mean(&|r| r.time_s),
                mean_rel_radius_err: mean(&|r| r.rel_radius_err),
                mean_center_err: mean(&|r| r.center_err),
                mean_iterations: mean(&|r| r.iterations as f64),
                mean_drops: mean(&|r| r.drops as f64),
            });
        }
    }
    out
}

pub fn write_instances_csv<W: Write>(mut w: W, records: &[InstanceRecord]) -> Result<()> {
    writeln!(
        w,
        "case_id,d,n,seed,method,time_s,rel_radius_err,center_err,iterations,drops"
    )?;
    for r in records {
        if r.skipped {
            writeln!(w, "{},{},{},{},{},,,,,", r.case_id, r.d, r.n, r.seed, r.method.name())?;
        } else {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.case_id,
                r.d,
                r.n,
                r.seed,
                r.method.name(),
                fmt_f64(r.time_s),
                fmt_f64(r.rel_radius_err),
                fmt_f64(r.center_err),
                r.iterations,
                r.drops
            )?;
        }
    }
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(mut w: W, records: &[AggregateRecord]) -> Result<()> {
    writeln!(
        w,
        "case_id,d,n,method,instances,skipped,mean_time_s,mean_rel_radius_err,mean_center_err,mean_iterations,mean_drops"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.case_id,
            r.d,
            r.n,
            r.method.name(),
            r.instances,
            r.skipped,
            fmt_f64(r.mean_time_s),
            fmt_f64(r.mean_rel_radius_err),
            fmt_f64(r.mean_center_err),
            fmt_f64(r.mean_iterations),
            fmt_f64(r.mean_drops)
        )?;
    }
    Ok(())
}

/// Worker cap from the `SEB_THREADS` environment variable, when set and positive.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("SEB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}
