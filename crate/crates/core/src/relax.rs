//! Gradient-descent relaxation with pinned boundary vertices.
//!
//! Each interior vertex moves along the sum `s(v)` of its incident unit
//! vectors, which is the negative gradient of total edge length with respect
//! to its position. Convergence is judged on the maximum imbalance norm;
//! the total loss (sum of norms) is tracked alongside.

use thiserror::Error;

use crate::geom::Point;
use crate::net::{force_at, EmbeddedNet, NetError};
use crate::scalar::{lit, Scalar};

pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;
pub const DEFAULT_TOL_BALANCE: f64 = 1e-10;
pub const DEFAULT_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelaxError {
    #[error("edge at `{vertex}` shrank to {length:e}, below the guard")]
    Degenerated { vertex: String, length: f64 },
    #[error("no trace snapshots were recorded")]
    NoTrace,
    #[error("invalid relaxation config: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    /// In-place cyclic updates in ascending id order.
    #[default]
    Sequential,
    /// All forces evaluated on a snapshot, then applied together.
    Synchronous,
}

/// How the step length along `s(v)` is chosen for each vertex update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// Displacement `step · s(v)`.
    Fixed,
    /// Displacement `min(step, w(v)) · s(v)` where `w(v) = 1 / Σ 1/|vw|` is
    /// the Weiszfeld step of the vertex.
    #[default]
    Capped,
    /// Displacement `step · w(v) · s(v)`; `step = 1` is an exact Weiszfeld update.
    Weiszfeld,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxConfig<T> {
    pub step: T,
    pub rule: StepRule,
    pub max_iters: usize,
    pub tol_balance: T,
    pub guard: T,
    /// Snapshot cadence in sweeps; 0 disables tracing.
    pub trace_every: usize,
    pub mode: UpdateMode,
}

impl<T: Scalar> Default for RelaxConfig<T> {
    fn default() -> Self {
        RelaxConfig {
            step: lit(DEFAULT_STEP),
            rule: StepRule::default(),
            max_iters: DEFAULT_MAX_ITERS,
            tol_balance: lit(DEFAULT_TOL_BALANCE),
            guard: lit(DEFAULT_GUARD),
            trace_every: 0,
            mode: UpdateMode::Sequential,
        }
    }
}

impl<T: Scalar> RelaxConfig<T> {
    pub fn validate(&self) -> Result<(), RelaxError> {
        if !(self.step > T::zero()) {
            return Err(RelaxError::InvalidConfig("step must be positive"));
        }
        if !(self.tol_balance > T::zero()) {
            return Err(RelaxError::InvalidConfig("tol_balance must be positive"));
        }
        if !(self.guard >= lit(crate::geom::EPS_DEG)) {
            return Err(RelaxError::InvalidConfig("guard below degeneracy threshold"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxStatus {
    Converged,
    MaxItersReached,
    Degenerated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint<T> {
    pub iter: usize,
    pub total_loss: T,
    pub max_norm: T,
}

#[derive(Debug, Clone)]
pub struct RelaxOutcome<T> {
    pub net: EmbeddedNet<T>,
    pub status: RelaxStatus,
    pub iterations: usize,
    pub final_loss: T,
    pub final_max_norm: T,
    pub trace: Vec<TracePoint<T>>,
    /// Position snapshots aligned with `trace`.
    pub snapshots: Vec<Vec<Point<T>>>,
    /// Vertex that triggered the guard, for degenerated runs.
    pub degenerate_vertex: Option<String>,
}

/// Step length for vertex `v` under the configured rule.
fn step_length<T: Scalar>(net: &EmbeddedNet<T>, v: usize, cfg: &RelaxConfig<T>) -> T {
    let weiszfeld = || {
        let here = net.positions()[v];
        let inv: T = net
            .topology()
            .neighbors(v)
            .iter()
            .map(|&(w, _)| T::one() / here.distance(net.positions()[w]))
            .fold(T::zero(), |a, b| a + b);
        T::one() / inv
    };
    match cfg.rule {
        StepRule::Fixed => cfg.step,
        StepRule::Capped => cfg.step.min(weiszfeld()),
        StepRule::Weiszfeld => cfg.step * weiszfeld(),
    }
}

/// Smallest incident edge length at `v`.
fn shortest_incident<T: Scalar>(net: &EmbeddedNet<T>, v: usize) -> T {
    let here = net.positions()[v];
    net.topology()
        .neighbors(v)
        .iter()
        .map(|&(w, _)| here.distance(net.positions()[w]))
        .fold(T::infinity(), T::min)
}

fn degenerated<T: Scalar>(net: &EmbeddedNet<T>, v: usize, length: T) -> RelaxError {
    RelaxError::Degenerated {
        vertex: net.topology().id(v).to_string(),
        length: length.to_f64_lossy(),
    }
}

/// One pass over all interior vertices.
pub fn relax_sweep<T: Scalar>(net: &EmbeddedNet<T>, cfg: &RelaxConfig<T>) -> Result<EmbeddedNet<T>, RelaxError> {
    let mut out = net.clone();
    sweep_in_place(&mut out, cfg)?;
    Ok(out)
}

fn sweep_in_place<T: Scalar>(net: &mut EmbeddedNet<T>, cfg: &RelaxConfig<T>) -> Result<(), RelaxError> {
    let topo = net.shared_topology().clone();
    match cfg.mode {
        UpdateMode::Sequential => {
            for &v in topo.interior_order() {
                let len = shortest_incident(net, v);
                if !(len >= cfg.guard) {
                    return Err(degenerated(net, v, len));
                }
                let s = force_at(&topo, net.positions(), v).map_err(|_| degenerated(net, v, len))?;
                let moved = net.positions()[v] + s * step_length(net, v, cfg);
                net.positions_mut()[v] = moved;
                let len = shortest_incident(net, v);
                if !(len >= cfg.guard) || !moved.is_finite() {
                    return Err(degenerated(net, v, len));
                }
            }
        }
        UpdateMode::Synchronous => {
            let mut forces = Vec::with_capacity(topo.interior_count());
            for &v in topo.interior_order() {
                let len = shortest_incident(net, v);
                if !(len >= cfg.guard) {
                    return Err(degenerated(net, v, len));
                }
                let s = force_at(&topo, net.positions(), v).map_err(|_| degenerated(net, v, len))?;
                forces.push(s * step_length(net, v, cfg));
            }
            for (&v, s) in topo.interior_order().iter().zip(forces) {
                let moved = net.positions()[v] + s;
                net.positions_mut()[v] = moved;
            }
            for &v in topo.interior_order() {
                let len = shortest_incident(net, v);
                if !(len >= cfg.guard) || !net.positions()[v].is_finite() {
                    return Err(degenerated(net, v, len));
                }
            }
        }
    }
    Ok(())
}

/// `(total_loss, max_norm)` over interior vertices.
fn loss<T: Scalar>(net: &EmbeddedNet<T>) -> Option<(T, T)> {
    let topo = net.topology();
    let mut total = T::zero();
    let mut max = T::zero();
    for &v in topo.interior_order() {
        let n = force_at(topo, net.positions(), v).ok()?.norm();
        total = total + n;
        max = max.max(n);
    }
    Some((total, max))
}

/// Repeats sweeps until the maximum imbalance drops to `tol_balance`, the
/// iteration budget runs out, or an edge collapses below the guard.
///
/// With `trace_every = k > 0`, the state after sweeps `0, k, 2k, …` is
/// recorded, plus the final state if it falls between multiples.
pub fn relax<T: Scalar>(net: &EmbeddedNet<T>, cfg: &RelaxConfig<T>) -> Result<RelaxOutcome<T>, RelaxError> {
    cfg.validate()?;
    let mut current = net.clone();
    let mut trace = Vec::new();
    let mut snapshots = Vec::new();
    let record = |net: &EmbeddedNet<T>, iter: usize, l: (T, T), trace: &mut Vec<TracePoint<T>>, snaps: &mut Vec<Vec<Point<T>>>| {
        trace.push(TracePoint {
            iter,
            total_loss: l.0,
            max_norm: l.1,
        });
        snaps.push(net.positions().to_vec());
    };

    let mut iter = 0;
    let mut degenerate_vertex = None;
    let mut l = match loss(&current) {
        Some(l) => l,
        None => (T::infinity(), T::infinity()),
    };
    if cfg.trace_every > 0 {
        record(&current, 0, l, &mut trace, &mut snapshots);
    }
    let status = loop {
        if l.1 <= cfg.tol_balance {
            break RelaxStatus::Converged;
        }
        if iter >= cfg.max_iters {
            break RelaxStatus::MaxItersReached;
        }
        let mut next = current.clone();
        match sweep_in_place(&mut next, cfg) {
            Ok(()) => current = next,
            Err(RelaxError::Degenerated { vertex, .. }) => {
                degenerate_vertex = Some(vertex);
                break RelaxStatus::Degenerated;
            }
            Err(e) => return Err(e),
        }
        iter += 1;
        l = match loss(&current) {
            Some(l) => l,
            None => break RelaxStatus::Degenerated,
        };
        if cfg.trace_every > 0 && iter % cfg.trace_every == 0 {
            record(&current, iter, l, &mut trace, &mut snapshots);
        }
    };
    if cfg.trace_every > 0 && trace.last().map(|t| t.iter) != Some(iter) {
        record(&current, iter, l, &mut trace, &mut snapshots);
    }

    Ok(RelaxOutcome {
        net: current,
        status,
        iterations: iter,
        final_loss: l.0,
        final_max_norm: l.1,
        trace,
        snapshots,
        degenerate_vertex,
    })
}

/// Snapshots recorded during [`relax`], as nets sharing the input topology.
pub fn export_trace_frames<T: Scalar>(outcome: &RelaxOutcome<T>) -> Result<Vec<EmbeddedNet<T>>, RelaxError> {
    if outcome.snapshots.is_empty() {
        return Err(RelaxError::NoTrace);
    }
    let topo = outcome.net.shared_topology();
    Ok(outcome
        .snapshots
        .iter()
        .map(|p| EmbeddedNet::from_parts_unchecked(topo.clone(), p.clone()))
        .collect())
}
