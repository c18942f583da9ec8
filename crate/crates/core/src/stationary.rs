//! Exact stationary state of the walk on the internal arcs, surface outflow,
//! scattering matrix, and directly evaluated comfortability.
//!
//! With coin sign `ε = z` the internal dynamics read `ψ ← ε·E·ψ + ε·ρ₀`,
//! where `E` is the Grover operator restricted to internal arcs and `ρ₀` the
//! first-step contribution of the inbound tail arcs. The stationary state is
//! the fixed point of this map. `I − εE` is singular whenever the internal
//! graph carries eigenvectors of the coin that never reach the tails (even
//! cycles for `z = −1`, any cycle for `z = +1`); the walk started from zero
//! never excites them, so the fixed point taken is the one orthogonal to that
//! kernel.

use num_traits::Zero;

use crate::algebra::{rat, ratio, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::graph::{bipartition, Arc, Graph, Side, Vertex};
use crate::instance::{Phase, WalkInstance};

/// Rational amplitude on every internal arc, aligned with [`Graph::arcs`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcField {
    arcs: Vec<Arc>,
    values: Vec<Rational>,
}

impl ArcField {
    pub fn new(graph: &Graph, values: Vec<Rational>) -> Result<Self> {
        if values.len() != graph.arcs().len() {
            return Err(Error::Dimension(format!(
                "{} values for {} arcs",
                values.len(),
                graph.arcs().len()
            )));
        }
        Ok(ArcField {
            arcs: graph.arcs().to_vec(),
            values,
        })
    }

    pub fn zeros(graph: &Graph) -> Self {
        ArcField {
            arcs: graph.arcs().to_vec(),
            values: vec![Rational::zero(); graph.arcs().len()],
        }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Amplitude on `arc`. Panics if the arc is not internal.
    pub fn get(&self, arc: Arc) -> &Rational {
        let i = self.arcs.binary_search(&arc).expect("internal arc");
        &self.values[i]
    }

    pub fn set(&mut self, arc: Arc, value: Rational) {
        let i = self.arcs.binary_search(&arc).expect("internal arc");
        self.values[i] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Arc, &Rational)> {
        self.arcs.iter().copied().zip(&self.values)
    }

    /// Sum of amplitudes on internal arcs ending at `u`.
    pub fn inflow_sum(&self, u: Vertex) -> Rational {
        self.iter()
            .filter(|(a, _)| a.terminus == u)
            .map(|(_, x)| x.clone())
            .sum()
    }
}

fn coin(inst: &WalkInstance, v: Vertex) -> Rational {
    ratio(2, inst.tilde_degree(v) as i64)
}

/// Signed internal operator: entry `(a, b)` is `ε(2/deg̃(o(a)) − δ_{a,b̄})`
/// when `o(a) = t(b)`.
pub fn internal_operator(inst: &WalkInstance) -> RatMatrix {
    let g = inst.graph();
    let arcs = g.arcs();
    let eps = inst.coin_sign();
    let mut e = RatMatrix::zeros(arcs.len(), arcs.len());
    for (i, a) in arcs.iter().enumerate() {
        let w = &eps * coin(inst, a.origin);
        for &t in g.neighbors(a.origin) {
            let b = Arc::new(t, a.origin);
            let j = g.arc_index(b).expect("arc exists");
            e[(i, j)] = if b == a.reverse() {
                &w - &eps
            } else {
                w.clone()
            };
        }
    }
    e
}

/// Contribution of the inbound tail arcs after one step:
/// `ρ(a) = ε·(2/deg̃(v_j))·α_j` on internal arcs leaving boundary vertex `v_j`.
pub fn source_vector(inst: &WalkInstance) -> Vec<Rational> {
    let eps = inst.coin_sign();
    inst.graph()
        .arcs()
        .iter()
        .map(|a| match inst.tail_index(a.origin) {
            Some(j) => &eps * coin(inst, a.origin) * &inst.inflow()[j],
            None => Rational::zero(),
        })
        .collect()
}

/// Fixed points for several inflow vectors over the same graph, boundary and
/// phase, sharing one elimination.
fn stationary_many(inst: &WalkInstance, inflows: &[Vec<Rational>]) -> Result<Vec<ArcField>> {
    let e = internal_operator(inst);
    let k = e.rows();
    let system = RatMatrix::identity(k).sub(&e)?;
    let sources = inflows
        .iter()
        .map(|alpha| Ok(source_vector(&inst.with_inflow(alpha.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    let solutions = system.solve_orthogonal_to_kernel_many(&sources)?;
    solutions
        .into_iter()
        .zip(&sources)
        .map(|(psi, rho)| {
            let next: Vec<Rational> = e
                .mul_vec(&psi)?
                .into_iter()
                .zip(rho)
                .map(|(x, r)| x + r)
                .collect();
            if next != psi {
                return Err(Error::Residual("stationary fixed point"));
            }
            ArcField::new(inst.graph(), psi)
        })
        .collect()
}

/// Exact stationary state on the internal arcs.
pub fn stationary_state(inst: &WalkInstance) -> Result<ArcField> {
    let mut out = stationary_many(inst, &[inst.inflow().to_vec()])?;
    Ok(out.pop().expect("one solution"))
}

/// Outflow on each outbound tail arc: one coin application at `v_j`
/// including the inbound tail amplitude `α_j`.
pub fn outflow(inst: &WalkInstance, psi: &ArcField) -> Vec<Rational> {
    let eps = inst.coin_sign();
    inst.boundary()
        .iter()
        .zip(inst.inflow())
        .map(|(&v, alpha)| {
            let incoming = alpha + psi.inflow_sum(v);
            &eps * (coin(inst, v) * incoming - alpha)
        })
        .collect()
}

/// The Grover matrix `(2/k)J − I`.
pub fn grover_matrix(k: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(k, k);
    let w = ratio(2, k as i64);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = if i == j { &w - rat(1) } else { w.clone() };
        }
    }
    m
}

/// Scattering matrix predicted for the alternating walk, in the instance's
/// boundary order: the identity for non-bipartite graphs, otherwise
/// `τ = −S·Gr(r)·S` with `S = diag(±1)` marking the side of each tail.
pub fn predicted_scattering(inst: &WalkInstance) -> Result<RatMatrix> {
    if inst.phase() != Phase::Minus {
        return Err(Error::Precondition(
            "scattering prediction holds for the alternating walk (z = -1)".into(),
        ));
    }
    let r = inst.r();
    let Some(parts) = bipartition(inst.graph()).bipartition().cloned() else {
        return Ok(RatMatrix::identity(r));
    };
    let sign = |v: Vertex| if parts.in_x(v) { 1 } else { -1 };
    let gr = grover_matrix(r);
    let mut tau = RatMatrix::zeros(r, r);
    for (i, &vi) in inst.boundary().iter().enumerate() {
        for (j, &vj) in inst.boundary().iter().enumerate() {
            tau[(i, j)] = -(&gr[(i, j)] * rat(sign(vi) * sign(vj)));
        }
    }
    Ok(tau)
}

/// How the surface scatters the instance's own inflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScatteringClass {
    /// Non-bipartite internal graph: every inflow is reflected (`σ = I`).
    PerfectReflection,
    /// Bipartite internal graph, inflow transmitted through `τ`.
    BipartiteTau,
    /// Bipartite internal graph, but equal inflow to both sides: `β = α`.
    DegenerateIdentity,
    /// Constant inflow (`z = +1`); the surface acts as one Grover coin.
    Grover,
}

impl ScatteringClass {
    pub fn name(self) -> &'static str {
        match self {
            ScatteringClass::PerfectReflection => "perfect-reflection",
            ScatteringClass::BipartiteTau => "bipartite-tau",
            ScatteringClass::DegenerateIdentity => "degenerate-identity",
            ScatteringClass::Grover => "grover",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScatteringReport {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub sigma: RatMatrix,
    /// Closed-form matrix the computed one is compared against: `I` or `τ`
    /// for `z = −1`, `Gr(r)` for `z = +1`.
    pub predicted: RatMatrix,
    pub classification: ScatteringClass,
    /// Number of boundary vertices on the side of vertex 1 (bipartite only).
    pub x_side_tails: Option<usize>,
}

impl ScatteringReport {
    pub fn matches_prediction(&self) -> bool {
        self.sigma == self.predicted
    }

    pub fn is_orthogonal(&self) -> bool {
        self.sigma
            .transpose()
            .mul(&self.sigma)
            .map(|m| m.is_identity())
            .unwrap_or(false)
    }

    /// `R` when the instance's inflow comes back unchanged, else `T`.
    pub fn label(&self) -> char {
        if self.beta == self.alpha {
            'R'
        } else {
            'T'
        }
    }
}

/// Assembles `σ` column by column from the basis inflows and classifies the
/// instance's own inflow against the closed-form prediction.
pub fn scattering(inst: &WalkInstance) -> Result<ScatteringReport> {
    let r = inst.r();
    let mut inflows: Vec<Vec<Rational>> = (0..r)
        .map(|i| (0..r).map(|j| rat(i64::from(i == j))).collect())
        .collect();
    inflows.push(inst.inflow().to_vec());
    let states = stationary_many(inst, &inflows)?;
    let mut sigma = RatMatrix::zeros(r, r);
    for (col, psi) in states[..r].iter().enumerate() {
        let basis = inst.with_inflow(inflows[col].clone())?;
        for (row, b) in outflow(&basis, psi).into_iter().enumerate() {
            sigma[(row, col)] = b;
        }
    }
    let alpha = inst.inflow().to_vec();
    let beta = outflow(inst, &states[r]);
    if sigma.mul_vec(&alpha)? != beta {
        return Err(Error::Residual("scattering assembly"));
    }
    let coloring = bipartition(inst.graph());
    let x_side_tails = coloring.bipartition().map(|b| {
        inst.boundary().iter().filter(|&&v| b.side(v) == Side::X).count()
    });
    let (predicted, classification) = match inst.phase() {
        Phase::Plus => (grover_matrix(r), ScatteringClass::Grover),
        Phase::Minus => {
            let class = if !coloring.is_bipartite() {
                ScatteringClass::PerfectReflection
            } else if beta == alpha {
                ScatteringClass::DegenerateIdentity
            } else {
                ScatteringClass::BipartiteTau
            };
            (predicted_scattering(inst)?, class)
        }
    };
    Ok(ScatteringReport {
        alpha,
        beta,
        sigma,
        predicted,
        classification,
        x_side_tails,
    })
}

/// Half the squared amplitude mass on the internal arcs.
pub fn comfortability_direct(psi: &ArcField) -> Rational {
    psi.values().iter().map(|x| x * x).sum::<Rational>() / rat(2)
}

/// Per-vertex constants of the stationary state. For `z = −1` the
/// difference `ψ(a) − ψ(ā)` is the same for every arc leaving `u` (tail arc
/// included, where it reads `β_j − α_j`); for `z = +1` the sum `ψ(a) + ψ(ā)`
/// is. Returns the constant per vertex (index 0 unused), or the first vertex
/// where it fails.
pub fn vertex_constants(inst: &WalkInstance, psi: &ArcField) -> Result<Vec<Rational>> {
    let g = inst.graph();
    let sign = inst.coin_sign();
    let beta = outflow(inst, psi);
    let mut out = vec![Rational::zero(); g.n() + 1];
    for u in g.vertices() {
        let mut values: Vec<Rational> = g
            .neighbors(u)
            .iter()
            .map(|&w| {
                let a = Arc::new(u, w);
                psi.get(a) + &sign * psi.get(a.reverse())
            })
            .collect();
        if let Some(j) = inst.tail_index(u) {
            values.push(&beta[j] + &sign * &inst.inflow()[j]);
        }
        if values.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Audit {
                law: "per-vertex constancy of the stationary state",
                location: format!("vertex {u}"),
            });
        }
        out[u] = values.swap_remove(0);
    }
    Ok(out)
}

/// True when `σᵀσ = I`.
pub fn is_orthogonal(m: &RatMatrix) -> bool {
    m.transpose().mul(m).map(|p| p.is_identity()).unwrap_or(false)
}
