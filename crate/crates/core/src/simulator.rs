//! Double-precision time evolution on the internal graph with tails cut
//! off at a finite depth.
//!
//! Tail `j` hangs off boundary vertex `v_j` as a path `v_j, t₁, …, t_L`.
//! Inbound arc `k` points from `t_{k+1}` to `t_k` and outbound arc `k` from
//! `t_k` to `t_{k+1}` (with `t₀ = v_j`). Free propagation on a tail is a shift,
//! so both are kept as deques.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::algebra::to_f64;
use crate::error::{Error, Result};
use crate::graph::Arc;
use crate::instance::WalkInstance;
use crate::stationary::ArcField;

/// Residual below which a run is declared converged.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedState {
    /// Aligned with [`crate::graph::Graph::arcs`].
    internal: Vec<f64>,
    inbound: Vec<VecDeque<f64>>,
    outbound: Vec<VecDeque<f64>>,
    horizon: usize,
}

impl TruncatedState {
    /// Initial state: `α_j` on every inbound arc of tail `j`, zero elsewhere.
    pub fn initial(inst: &WalkInstance, horizon: usize) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::OutOfRange {
                what: "tail depth",
                value: horizon,
                range: "1..",
            });
        }
        let alpha: Vec<f64> = inst.inflow().iter().map(to_f64).collect();
        Ok(TruncatedState {
            internal: vec![0.0; inst.graph().arcs().len()],
            inbound: alpha.iter().map(|&a| VecDeque::from(vec![a; horizon])).collect(),
            outbound: vec![VecDeque::from(vec![0.0; horizon]); inst.r()],
            horizon,
        })
    }

    /// Arbitrary state on internal arcs with the first inbound tail arcs set
    /// to `first_inbound` and every other tail arc zero.
    pub fn from_parts(internal: Vec<f64>, first_inbound: &[f64], horizon: usize) -> Self {
        let inbound = first_inbound
            .iter()
            .map(|&x| {
                let mut d = VecDeque::from(vec![0.0; horizon]);
                d[0] = x;
                d
            })
            .collect();
        TruncatedState {
            internal,
            inbound,
            outbound: vec![VecDeque::from(vec![0.0; horizon]); first_inbound.len()],
            horizon,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn internal(&self) -> &[f64] {
        &self.internal
    }

    pub fn inbound(&self, tail: usize, depth: usize) -> f64 {
        self.inbound[tail][depth]
    }

    pub fn outbound(&self, tail: usize, depth: usize) -> f64 {
        self.outbound[tail][depth]
    }
}

/// Precomputed adjacency for the internal update.
struct Stepper {
    eps: f64,
    /// Per vertex (index 0 unused): coin weight, incoming arc indices,
    /// outgoing arc indices, tail index.
    coin: Vec<f64>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    tail: Vec<Option<usize>>,
    reverse: Vec<usize>,
    alpha: Vec<f64>,
}

impl Stepper {
    fn new(inst: &WalkInstance) -> Self {
        let g = inst.graph();
        let n = g.n();
        let mut incoming = vec![vec![]; n + 1];
        let mut outgoing = vec![vec![]; n + 1];
        let mut reverse = vec![0; g.arcs().len()];
        for (i, a) in g.arcs().iter().enumerate() {
            outgoing[a.origin].push(i);
            incoming[a.terminus].push(i);
            reverse[i] = g.arc_index(a.reverse()).expect("symmetric arcs");
        }
        Stepper {
            eps: inst.phase().sign() as f64,
            coin: (0..=n)
                .map(|v| if v == 0 { 0.0 } else { 2.0 / inst.tilde_degree(v) as f64 })
                .collect(),
            incoming,
            outgoing,
            tail: (0..=n).map(|v| if v == 0 { None } else { inst.tail_index(v) }).collect(),
            reverse,
            alpha: inst.inflow().iter().map(to_f64).collect(),
        }
    }

    /// Advances `s` by one step; `scratch` receives the previous internal
    /// amplitudes.
    fn advance(&self, s: &mut TruncatedState, scratch: &mut Vec<f64>) {
        std::mem::swap(&mut s.internal, scratch);
        s.internal.clear();
        s.internal.resize(scratch.len(), 0.0);
        let old = &*scratch;
        for u in 1..self.coin.len() {
            let tail_in = self.tail[u].map(|j| s.inbound[j][0]);
            let total: f64 = self.incoming[u].iter().map(|&b| old[b]).sum::<f64>() + tail_in.unwrap_or(0.0);
            let mean = self.coin[u] * total;
            for &a in &self.outgoing[u] {
                s.internal[a] = self.eps * (mean - old[self.reverse[a]]);
            }
            if let (Some(j), Some(x)) = (self.tail[u], tail_in) {
                s.outbound[j].pop_back();
                s.outbound[j].push_front(self.eps * (mean - x));
            }
        }
        for (j, d) in s.inbound.iter_mut().enumerate() {
            d.pop_front();
            d.push_back(self.alpha[j]);
        }
    }
}

/// One application of the time evolution. The deepest inbound tail arc is
/// refreshed to `α_j`.
pub fn step(s: &TruncatedState, inst: &WalkInstance) -> TruncatedState {
    let mut next = s.clone();
    Stepper::new(inst).advance(&mut next, &mut vec![]);
    next
}

#[derive(Clone, Debug)]
pub struct SimulationTrace {
    pub arcs: Vec<Arc>,
    /// Internal amplitudes after each step.
    pub snapshots: Vec<Vec<f64>>,
    /// Sup-norm change on internal arcs at each step.
    pub residuals: Vec<f64>,
    /// Amplitude on the first outbound arc of each tail after each step.
    pub outflows: Vec<Vec<f64>>,
    pub boundary: Vec<usize>,
    pub final_state: TruncatedState,
    pub converged: bool,
    pub tolerance: f64,
}

impl SimulationTrace {
    pub fn steps(&self) -> usize {
        self.snapshots.len()
    }

    pub fn final_internal(&self) -> &[f64] {
        self.final_state.internal()
    }

    /// Sup-norm distance from the final internal state to an exact one.
    pub fn distance_to(&self, exact: &ArcField) -> f64 {
        self.final_internal()
            .iter()
            .zip(exact.values())
            .map(|(x, y)| (x - to_f64(y)).abs())
            .fold(0.0, f64::max)
    }

    /// Half the squared mass of the final internal state.
    pub fn comfortability(&self) -> f64 {
        self.final_internal().iter().map(|x| x * x).sum::<f64>() / 2.0
    }

    /// One row per internal arc and step, followed by the first outbound
    /// arc of each tail, whose terminus is written `t<j>` for tail `j`
    /// (1-based, in boundary order).
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "step,arc_origin,arc_terminus,amplitude,residual")?;
        for (t, snap) in self.snapshots.iter().enumerate() {
            let res = self.residuals[t] + 0.0;
            for (a, x) in self.arcs.iter().zip(snap) {
                writeln!(out, "{},{},{},{},{}", t + 1, a.origin, a.terminus, x + 0.0, res)?;
            }
            for (j, (v, x)) in self.boundary.iter().zip(&self.outflows[t]).enumerate() {
                writeln!(out, "{},{},t{},{},{}", t + 1, v, j + 1, x + 0.0, res)?;
            }
        }
        Ok(())
    }
}

/// `steps` iterations from the initial state with tail depth `steps + 2`,
/// stopping early once the residual drops below `DEFAULT_TOLERANCE`.
pub fn simulate(inst: &WalkInstance, steps: usize) -> Result<SimulationTrace> {
    simulate_with(inst, steps, DEFAULT_TOLERANCE)
}

/// As [`simulate`], with an explicit convergence threshold. A non-positive
/// tolerance disables early stopping.
pub fn simulate_with(inst: &WalkInstance, steps: usize, tolerance: f64) -> Result<SimulationTrace> {
    simulate_truncated(inst, steps, steps + 2, tolerance)
}

pub fn simulate_truncated(
    inst: &WalkInstance,
    steps: usize,
    horizon: usize,
    tolerance: f64,
) -> Result<SimulationTrace> {
    if steps < 1 {
        return Err(Error::OutOfRange {
            what: "step count",
            value: steps,
            range: "1..",
        });
    }
    let stepper = Stepper::new(inst);
    let mut state = TruncatedState::initial(inst, horizon)?;
    let mut snapshots = Vec::with_capacity(steps);
    let mut residuals = Vec::with_capacity(steps);
    let mut outflows = Vec::with_capacity(steps);
    let mut converged = false;
    let mut previous = vec![];
    for _ in 0..steps {
        stepper.advance(&mut state, &mut previous);
        let residual = state
            .internal
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        snapshots.push(state.internal.clone());
        residuals.push(residual);
        outflows.push(state.outbound.iter().map(|d| d[0]).collect());
        if residual < tolerance {
            converged = true;
            break;
        }
    }
    Ok(SimulationTrace {
        arcs: inst.graph().arcs().to_vec(),
        snapshots,
        residuals,
        outflows,
        boundary: inst.boundary().to_vec(),
        final_state: state,
        converged,
        tolerance,
    })
}
