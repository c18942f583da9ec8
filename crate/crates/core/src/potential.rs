//! Laplacian and signless-Laplacian potentials behind the stationary state,
//! incidence matrices, and exact audits of the (pseudo-)Kirchhoff laws.
//!
//! Sign conventions: `L = D − M`, `Q = D + M`, internal degrees only. The
//! bipartition is oriented so that `u1` lies in `X`, and an arc `a` carries
//! `f(a) = 0` when its terminus is in `X`. For `z = +1` the same current
//! picture applies to every graph with `f ≡ 0`.

use std::collections::VecDeque;

use num_traits::{One, Zero};

use crate::algebra::{rat, ratio, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::graph::{bipartition, Arc, Bipartition, Graph, Vertex};
use crate::instance::{Phase, WalkInstance};
use crate::stationary::{outflow, ArcField};

/// Rational value per vertex, 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexField {
    values: Vec<Rational>,
}

impl VertexField {
    pub fn zeros(n: usize) -> Self {
        VertexField {
            values: vec![Rational::zero(); n],
        }
    }

    pub fn from_values(values: Vec<Rational>) -> Self {
        VertexField { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, v: Vertex) -> &Rational {
        &self.values[v - 1]
    }

    pub fn set(&mut self, v: Vertex, x: Rational) {
        self.values[v - 1] = x;
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn sum(&self) -> Rational {
        self.values.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurrentDecomposition {
    pub rho: Rational,
    /// `j(a) = φ(o(a)) − φ(t(a))`.
    pub current: ArcField,
    pub potential: VertexField,
    /// Net inbound tail current per vertex.
    pub charge: VertexField,
    pub ground: Vertex,
}

pub fn laplacian(g: &Graph) -> RatMatrix {
    degree_matrix_plus(g, -1)
}

pub fn signless_laplacian(g: &Graph) -> RatMatrix {
    degree_matrix_plus(g, 1)
}

fn degree_matrix_plus(g: &Graph, sign: i64) -> RatMatrix {
    let n = g.n();
    let mut m = RatMatrix::zeros(n, n);
    for v in g.vertices() {
        m[(v - 1, v - 1)] = rat(g.degree(v) as i64);
    }
    for &(u, v) in g.edges() {
        m[(u - 1, v - 1)] = rat(sign);
        m[(v - 1, u - 1)] = rat(sign);
    }
    m
}

/// `n × |E|`, edge `{u, v}` with `u < v` oriented `u → v`: `−1` at the
/// origin row, `+1` at the terminus row. `B·Bᵀ = L`.
pub fn incidence_oriented(g: &Graph) -> RatMatrix {
    edge_incidence(g, -1)
}

/// `n × |E|` with `+1` at both endpoints. `B̃·B̃ᵀ = Q`.
pub fn incidence_nonoriented(g: &Graph) -> RatMatrix {
    edge_incidence(g, 1)
}

fn edge_incidence(g: &Graph, origin_sign: i64) -> RatMatrix {
    let mut b = RatMatrix::zeros(g.n(), g.edge_count());
    for (k, &(u, v)) in g.edges().iter().enumerate() {
        b[(u - 1, k)] = rat(origin_sign);
        b[(v - 1, k)] = Rational::one();
    }
    b
}

/// `n × 2|E|`, one column per symmetric arc, aligned with [`Graph::arcs`].
/// The oriented version satisfies `C·Cᵀ = 2L`, the non-oriented one
/// `C̃·C̃ᵀ = 2Q`.
pub fn arc_incidence(g: &Graph, oriented: bool) -> RatMatrix {
    let mut c = RatMatrix::zeros(g.n(), g.arcs().len());
    for (k, a) in g.arcs().iter().enumerate() {
        c[(a.origin - 1, k)] = if oriented { rat(-1) } else { Rational::one() };
        c[(a.terminus - 1, k)] = Rational::one();
    }
    c
}

/// Arc parity with respect to the bipartition: `0` when the terminus lies in
/// `X`. Constant `0` when no bipartition is in play.
fn parity_sign(coloring: Option<&Bipartition>, terminus: Vertex) -> Rational {
    match coloring {
        Some(b) if !b.in_x(terminus) => rat(-1),
        _ => Rational::one(),
    }
}

fn bipartition_from(inst: &WalkInstance, u1: Vertex) -> Result<Option<Bipartition>> {
    match inst.phase() {
        Phase::Plus => Ok(None),
        Phase::Minus => {
            let coloring = bipartition(inst.graph());
            let b = coloring
                .bipartition()
                .ok_or_else(|| Error::Precondition("graph is not bipartite".into()))?
                .clone();
            Ok(Some(if b.in_x(u1) { b } else { b.swapped() }))
        }
    }
}

fn check_standard(inst: &WalkInstance) -> Result<(Vertex, Vertex)> {
    if inst.r() != 2 {
        return Err(Error::Precondition(format!("expected 2 tails, found {}", inst.r())));
    }
    if !inst.is_standard() {
        return Err(Error::Precondition("expected inflow (1, 0)".into()));
    }
    Ok((inst.boundary()[0], inst.boundary()[1]))
}

/// Stationary state from a grounded Laplacian potential, for the standard
/// two-tail setting. With `z = −1` the graph must be bipartite; with `z = +1`
/// any graph is accepted. Returns the decomposition, the reconstructed
/// state and `E_QW = E_EC + |E|/4`.
pub fn bipartite_route(inst: &WalkInstance) -> Result<(CurrentDecomposition, ArcField, Rational)> {
    let (u1, un) = check_standard(inst)?;
    let coloring = bipartition_from(inst, u1)?;
    let g = inst.graph();
    let rho = ratio(1, 2);
    let mut q = VertexField::zeros(g.n());
    q.set(u1, ratio(1, 2));
    q.set(un, ratio(-1, 2));
    let (phi, energy_ec) = grounded_potential(g, &q, un)?;

    let mut current = ArcField::zeros(g);
    let mut psi = ArcField::zeros(g);
    for &a in g.arcs() {
        let j = phi.get(a.origin) - phi.get(a.terminus);
        psi.set(a, parity_sign(coloring.as_ref(), a.terminus) * (&j + &rho));
        current.set(a, j);
    }
    let e_qw = energy_ec + ratio(g.edge_count() as i64, 4);
    Ok((
        CurrentDecomposition {
            rho,
            current,
            potential: phi,
            charge: q,
            ground: un,
        },
        psi,
        e_qw,
    ))
}

/// Solves `L⁽ᵍ⁾φ = q` with `φ(ground) = 0`; returns `φ` and `⟨φ, q⟩`.
fn grounded_potential(g: &Graph, q: &VertexField, ground: Vertex) -> Result<(VertexField, Rational)> {
    let keep: Vec<usize> = (0..g.n()).filter(|&i| i + 1 != ground).collect();
    let reduced = laplacian(g).select(&keep, &keep);
    let rhs: Vec<Rational> = keep.iter().map(|&i| q.values()[i].clone()).collect();
    let sol = reduced.solve(&rhs)?;
    let mut phi = VertexField::zeros(g.n());
    for (&i, x) in keep.iter().zip(sol) {
        phi.set(i + 1, x);
    }
    let energy = phi.values().iter().zip(q.values()).map(|(a, b)| a * b).sum();
    Ok((phi, energy))
}

/// Stationary state from the signless-Laplacian potential, standard two-tail
/// setting, `z = −1`, non-bipartite graph. Returns `φ` with `Qφ = −q`, the
/// reconstructed state `ψ(a) = φ(o) + φ(t)` and `E_QW = ⟨Q⁻¹q, q⟩`.
pub fn nonbipartite_route(inst: &WalkInstance) -> Result<(VertexField, ArcField, Rational)> {
    let (u1, _) = check_standard(inst)?;
    if inst.phase() != Phase::Minus {
        return Err(Error::Precondition("signless route needs z = -1".into()));
    }
    let g = inst.graph();
    if bipartition(g).is_bipartite() {
        return Err(Error::Precondition("graph is bipartite".into()));
    }
    let mut q = vec![Rational::zero(); g.n()];
    q[u1 - 1] = Rational::one();
    let neg_q: Vec<Rational> = q.iter().map(|x| -x).collect();
    let phi = VertexField::from_values(signless_laplacian(g).solve(&neg_q)?);
    let mut psi = ArcField::zeros(g);
    for &a in g.arcs() {
        psi.set(a, phi.get(a.origin) + phi.get(a.terminus));
    }
    let e_qw = -phi.get(u1).clone();
    Ok((phi, psi, e_qw))
}

/// Current picture of an arbitrary stationary state: `ρ` from the inflow,
/// `j(a) = (−1)^{f(a)}ψ(a) − ρ`, charges from the inbound tail currents, and
/// a potential grounded at the last boundary vertex reproducing `j`.
/// Requires `z = +1` or a bipartite graph.
pub fn current_decomposition(inst: &WalkInstance, psi: &ArcField) -> Result<CurrentDecomposition> {
    let g = inst.graph();
    let first = inst.boundary()[0];
    let coloring = bipartition_from(inst, first)?;
    let rho = signed_inflow_mean(inst, coloring.as_ref());
    let mut current = ArcField::zeros(g);
    for (a, x) in psi.iter() {
        current.set(a, parity_sign(coloring.as_ref(), a.terminus) * x - &rho);
    }
    let mut charge = VertexField::zeros(g.n());
    for (j, &v) in inst.boundary().iter().enumerate() {
        charge.set(v, parity_sign(coloring.as_ref(), v) * &inst.inflow()[j] - &rho);
    }
    let ground = *inst.boundary().last().unwrap();
    let (potential, _) = grounded_potential(g, &charge, ground)?;
    for &a in g.arcs() {
        if potential.get(a.origin) - potential.get(a.terminus) != *current.get(a) {
            return Err(Error::Audit {
                law: "potential reproduces the current",
                location: format!("arc {a}"),
            });
        }
    }
    Ok(CurrentDecomposition {
        rho,
        current,
        potential,
        charge,
        ground,
    })
}

/// `(Σ_{X} α − Σ_{Y} α) / r`.
fn signed_inflow_mean(inst: &WalkInstance, coloring: Option<&Bipartition>) -> Rational {
    let total: Rational = inst
        .boundary()
        .iter()
        .zip(inst.inflow())
        .map(|(&v, a)| parity_sign(coloring, v) * a)
        .sum();
    total / rat(inst.r() as i64)
}

/// Which family of laws the audit ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawFamily {
    Kirchhoff,
    PseudoKirchhoff,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub family: LawFamily,
    /// Law name and number of individual identities checked.
    pub checks: Vec<(&'static str, usize)>,
}

impl AuditReport {
    pub fn total(&self) -> usize {
        self.checks.iter().map(|c| c.1).sum()
    }
}

fn fail(law: &'static str, location: String) -> Error {
    Error::Audit { law, location }
}

/// Exact audit of the conservation laws of a stationary state. Bipartite
/// graphs (and every graph at `z = +1`) get the Kirchhoff laws of the current
/// `j`; non-bipartite graphs at `z = −1` get the pseudo-laws of `ψ` itself.
pub fn kirchhoff_audit(inst: &WalkInstance, psi: &ArcField) -> Result<AuditReport> {
    let g = inst.graph();
    let non_bipartite = inst.phase() == Phase::Minus && !bipartition(g).is_bipartite();
    if non_bipartite {
        pseudo_audit(inst, psi)
    } else {
        current_audit(inst, psi)
    }
}

fn current_audit(inst: &WalkInstance, psi: &ArcField) -> Result<AuditReport> {
    let g = inst.graph();
    let first = inst.boundary()[0];
    let coloring = bipartition_from(inst, first)?;
    let rho = signed_inflow_mean(inst, coloring.as_ref());
    let beta = outflow(inst, psi);
    let j = |a: Arc| parity_sign(coloring.as_ref(), a.terminus) * psi.get(a) - &rho;
    let mut checks = vec![];

    for &a in g.arcs() {
        if j(a) + j(a.reverse()) != Rational::zero() {
            return Err(fail("current antisymmetry", format!("arc {a}")));
        }
    }
    checks.push(("current antisymmetry", g.arcs().len()));

    // Tail arcs: the inbound one ends at v, the outbound one at the tail,
    // which sits on the opposite side.
    let mut charge_total = Rational::zero();
    for v in g.vertices() {
        let mut sum: Rational = g.neighbors(v).iter().map(|&w| j(Arc::new(w, v))).sum();
        if let Some(k) = inst.tail_index(v) {
            let s = parity_sign(coloring.as_ref(), v);
            let inbound = &s * &inst.inflow()[k] - &rho;
            let tail_side = if coloring.is_some() { -&s } else { s.clone() };
            let outbound = tail_side * &beta[k] - &rho;
            if &inbound + &outbound != Rational::zero() {
                return Err(fail("current antisymmetry", format!("tail at {v}")));
            }
            charge_total += &inbound;
            sum += inbound;
        }
        if !sum.is_zero() {
            return Err(fail("current law", format!("vertex {v}")));
        }
    }
    checks.push(("current law", g.n()));
    if !charge_total.is_zero() {
        return Err(fail("charge balance", "tails".into()));
    }
    checks.push(("charge balance", 1));

    let cycles = fundamental_cycles(g, first);
    for cycle in &cycles {
        let sum: Rational = cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&u, &v)| j(Arc::new(u, v)))
            .sum();
        if !sum.is_zero() {
            return Err(fail("voltage law", format!("cycle {cycle:?}")));
        }
    }
    checks.push(("voltage law", cycles.len()));

    current_decomposition(inst, psi)?;
    checks.push(("potential existence", 1));

    Ok(AuditReport {
        family: LawFamily::Kirchhoff,
        checks,
    })
}

fn pseudo_audit(inst: &WalkInstance, psi: &ArcField) -> Result<AuditReport> {
    let g = inst.graph();
    let mut checks = vec![];
    for &a in g.arcs() {
        if psi.get(a) != psi.get(a.reverse()) {
            return Err(fail("arc symmetry", format!("arc {a}")));
        }
    }
    checks.push(("arc symmetry", g.arcs().len()));

    for v in g.vertices() {
        if psi.inflow_sum(v) + inst.inflow_at(v) != Rational::zero() {
            return Err(fail("pseudo-current law", format!("vertex {v}")));
        }
    }
    checks.push(("pseudo-current law", g.n()));

    // ψ(a) = φ(o) + φ(t) over all arcs
    let arcs = g.arcs();
    let mut system = RatMatrix::zeros(arcs.len(), g.n());
    for (k, a) in arcs.iter().enumerate() {
        system[(k, a.origin - 1)] += Rational::one();
        system[(k, a.terminus - 1)] += Rational::one();
    }
    match system.solve_consistent(psi.values()) {
        Ok(_) => {}
        Err(Error::Inconsistent) => return Err(fail("pseudo-voltage law", "no vertex potential".into())),
        Err(e) => return Err(e),
    }
    checks.push(("pseudo-voltage law", 1));

    Ok(AuditReport {
        family: LawFamily::PseudoKirchhoff,
        checks,
    })
}

/// Closed vertex sequences, one per non-tree edge of a breadth-first
/// spanning tree rooted at `root`.
pub fn fundamental_cycles(g: &Graph, root: Vertex) -> Vec<Vec<Vertex>> {
    let n = g.n();
    let mut parent = vec![0; n + 1];
    let mut depth = vec![usize::MAX; n + 1];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut cycles = vec![];
    for &(u, v) in g.edges() {
        if parent[u] == v || parent[v] == u {
            continue;
        }
        let (mut a, mut b) = (u, v);
        let (mut up, mut down) = (vec![a], vec![b]);
        while a != b {
            if depth[a] >= depth[b] {
                a = parent[a];
                up.push(a);
            } else {
                b = parent[b];
                down.push(b);
            }
        }
        // up: u .. lca, down: v .. lca; cycle u .. lca .. v then back to u
        down.pop();
        up.extend(down.into_iter().rev());
        cycles.push(up);
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::stationary::{comfortability_direct, stationary_state};

    fn complete(n: usize) -> Graph {
        let mut e = vec![];
        for u in 1..=n {
            for v in u + 1..=n {
                e.push((u, v));
            }
        }
        Graph::new(n, &e).unwrap()
    }

    fn c4() -> Graph {
        Graph::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap()
    }

    #[test]
    fn single_edge_matrices() {
        let g = Graph::new(2, &[(1, 2)]).unwrap();
        assert_eq!(laplacian(&g), RatMatrix::from_i64(&[&[1, -1], &[-1, 1]]));
        assert_eq!(signless_laplacian(&g), RatMatrix::from_i64(&[&[1, 1], &[1, 1]]));
        assert_eq!(incidence_oriented(&g), RatMatrix::from_i64(&[&[-1], &[1]]));
        assert_eq!(incidence_nonoriented(&g), RatMatrix::from_i64(&[&[1], &[1]]));
    }

    #[test]
    fn k4_signless_determinant() {
        assert_eq!(signless_laplacian(&complete(4)).det().unwrap(), rat(48));
    }

    #[test]
    fn incidence_products() {
        for g in [complete(4), c4(), complete(3)] {
            let b = incidence_oriented(&g);
            assert_eq!(b.mul(&b.transpose()).unwrap(), laplacian(&g));
            let bt = incidence_nonoriented(&g);
            assert_eq!(bt.mul(&bt.transpose()).unwrap(), signless_laplacian(&g));
            let c = arc_incidence(&g, true);
            assert_eq!(c.mul(&c.transpose()).unwrap(), laplacian(&g).scale(&rat(2)));
            let ct = arc_incidence(&g, false);
            assert_eq!(ct.mul(&ct.transpose()).unwrap(), signless_laplacian(&g).scale(&rat(2)));
        }
    }

    #[test]
    fn c4_bipartite_route() {
        let inst = WalkInstance::standard(c4(), 1, 2, Phase::Minus).unwrap();
        let (dec, psi, e) = bipartite_route(&inst).unwrap();
        assert_eq!(e, ratio(19, 16));
        let e_ec: Rational = dec.current.values().iter().map(|x| x * x).sum::<Rational>() / rat(2);
        assert_eq!(e_ec, ratio(3, 16));
        assert_eq!(psi, stationary_state(&inst).unwrap());
        assert!(dec.potential.get(2).is_zero());
        assert_eq!(dec.charge.sum(), Rational::zero());
    }

    #[test]
    fn path_route() {
        let g = Graph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let inst = WalkInstance::standard(g, 1, 4, Phase::Minus).unwrap();
        let (_, psi, e) = bipartite_route(&inst).unwrap();
        assert_eq!(e, ratio(3, 2));
        assert_eq!(psi, stationary_state(&inst).unwrap());
    }

    #[test]
    fn plus_phase_route_on_k4() {
        let inst = WalkInstance::standard(complete(4), 1, 4, Phase::Plus).unwrap();
        let (_, psi, e) = bipartite_route(&inst).unwrap();
        assert_eq!(e, ratio(13, 8));
        assert_eq!(psi, stationary_state(&inst).unwrap());
    }

    #[test]
    fn k4_signless_route() {
        let inst = WalkInstance::standard(complete(4), 1, 4, Phase::Minus).unwrap();
        let (_, psi, e) = nonbipartite_route(&inst).unwrap();
        assert_eq!(e, ratio(5, 12));
        let exact = stationary_state(&inst).unwrap();
        assert_eq!(psi, exact);
        assert_eq!(comfortability_direct(&exact), e);
        assert!(bipartite_route(&inst).is_err());
    }

    #[test]
    fn paw_signless_route() {
        // triangle 2-3-4 with pendant 1 attached to 2
        let g = Graph::new(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
        let inst = WalkInstance::standard(g, 1, 3, Phase::Minus).unwrap();
        let (_, psi, e) = nonbipartite_route(&inst).unwrap();
        assert_eq!(e, ratio(7, 4));
        assert_eq!(psi, stationary_state(&inst).unwrap());
    }

    #[test]
    fn route_preconditions() {
        let inst = WalkInstance::standard(c4(), 1, 3, Phase::Minus).unwrap();
        assert!(nonbipartite_route(&inst).is_err());
        let skew = inst.with_inflow(vec![rat(1), rat(1)]).unwrap();
        assert!(bipartite_route(&skew).is_err());
    }

    #[test]
    fn audits_pass_on_exact_states() {
        let inst = WalkInstance::standard(c4(), 1, 2, Phase::Minus).unwrap();
        let psi = stationary_state(&inst).unwrap();
        let report = kirchhoff_audit(&inst, &psi).unwrap();
        assert_eq!(report.family, LawFamily::Kirchhoff);
        assert_eq!(report.checks.iter().find(|c| c.0 == "voltage law").unwrap().1, 1);

        let inst = WalkInstance::standard(complete(4), 1, 4, Phase::Minus).unwrap();
        let psi = stationary_state(&inst).unwrap();
        let report = kirchhoff_audit(&inst, &psi).unwrap();
        assert_eq!(report.family, LawFamily::PseudoKirchhoff);

        let inst = inst.with_phase(Phase::Plus);
        let psi = stationary_state(&inst).unwrap();
        assert_eq!(kirchhoff_audit(&inst, &psi).unwrap().family, LawFamily::Kirchhoff);
    }

    #[test]
    fn audit_catches_perturbation() {
        let inst = WalkInstance::standard(c4(), 1, 3, Phase::Minus).unwrap();
        let mut psi = stationary_state(&inst).unwrap();
        let a = Arc::new(1, 2);
        psi.set(a, psi.get(a) + ratio(1, 7));
        assert!(matches!(kirchhoff_audit(&inst, &psi), Err(Error::Audit { .. })));

        let inst = WalkInstance::standard(complete(4), 1, 4, Phase::Minus).unwrap();
        let mut psi = stationary_state(&inst).unwrap();
        psi.set(a, psi.get(a) + ratio(1, 7));
        assert!(matches!(kirchhoff_audit(&inst, &psi), Err(Error::Audit { .. })));
    }

    #[test]
    fn general_inflow_decomposition() {
        let tree = Graph::new(5, &[(1, 2), (2, 3), (2, 4), (4, 5)]).unwrap();
        let inst = WalkInstance::new(tree, vec![1, 3, 5], vec![rat(2), ratio(-1, 3), rat(5)], Phase::Minus).unwrap();
        let psi = stationary_state(&inst).unwrap();
        let dec = current_decomposition(&inst, &psi).unwrap();
        assert_eq!(dec.charge.sum(), Rational::zero());
        kirchhoff_audit(&inst, &psi).unwrap();
    }

    #[test]
    fn fundamental_cycle_shapes() {
        let cycles = fundamental_cycles(&complete(4), 1);
        assert_eq!(cycles.len(), 3);
        for c in &cycles {
            assert_eq!(c.len(), 3);
        }
        assert_eq!(fundamental_cycles(&c4(), 1), vec![vec![3, 2, 1, 4]]);
        let tree = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        assert!(fundamental_cycles(&tree, 2).is_empty());
    }

    #[test]
    fn grounding_does_not_change_tree_count() {
        for g in crate::graph::enumerate_connected(4).unwrap() {
            let l = laplacian(&g);
            let d1 = l.minor(&[0], &[0]).det().unwrap();
            for i in 1..4 {
                assert_eq!(l.minor(&[i], &[i]).det().unwrap(), d1);
            }
        }
    }
}
