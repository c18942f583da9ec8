//! Registry of self-check suites run over the catalog of small connected
//! graphs. Each suite counts the identities it checked and collects a
//! message per failure.

use crate::algebra::{rat, Rational};
use crate::catalog::rank;
use crate::error::{Error, Result};
use crate::factors::{closed_form_comfort, cycle_incidence_check, enumerate_factors, factor_counts_with, is_plus_minus_two, Mode};
use crate::graph::{bipartition, enumerate_connected, Graph, Vertex};
use crate::instance::{Phase, WalkInstance};
use crate::potential::{
    arc_incidence, bipartite_route, incidence_nonoriented, incidence_oriented, kirchhoff_audit, laplacian,
    nonbipartite_route, signless_laplacian,
};
use crate::simulator::{simulate, step, TruncatedState};
use crate::stationary::{comfortability_direct, grover_matrix, scattering, stationary_state, vertex_constants, ArcField};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome {
            name,
            cases: 0,
            failures: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn record<T>(&mut self, result: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        self.cases += 1;
        match result {
            Ok(x) => Some(x),
            Err(e) => {
                self.failures.push(format!("{}: {e}", what()));
                None
            }
        }
    }
}

/// Graphs and solved standard instances shared by the suites.
pub struct Catalog {
    pub max_n: usize,
    pub graphs: Vec<Graph>,
    /// Standard two-tail instances, both phases, with exact states.
    pub states: Vec<(WalkInstance, ArcField)>,
}

impl Catalog {
    pub fn build(max_n: usize) -> Result<Self> {
        let mut graphs = vec![];
        for n in 2..=max_n {
            graphs.extend(enumerate_connected(n)?);
        }
        let mut states = vec![];
        for g in &graphs {
            for (u1, un) in ordered_pairs(g.n()) {
                for phase in [Phase::Minus, Phase::Plus] {
                    let inst = WalkInstance::standard(g.clone(), u1, un, phase)?;
                    let psi = stationary_state(&inst)?;
                    states.push((inst, psi));
                }
            }
        }
        Ok(Catalog { max_n, graphs, states })
    }
}

pub fn ordered_pairs(n: usize) -> impl Iterator<Item = (Vertex, Vertex)> {
    (1..=n).flat_map(move |u| (1..=n).filter(move |&v| v != u).map(move |v| (u, v)))
}

/// Increasing `r`-subsets of `1..=n`.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<Vertex>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            go(v + 1, n, r, cur, out);
            cur.pop();
        }
    }
    go(1, n, r, &mut cur, &mut out);
    out
}

pub struct Suite {
    pub name: &'static str,
    pub run: fn(&Catalog) -> SuiteOutcome,
}

pub fn registry() -> Vec<Suite> {
    vec![
        Suite {
            name: "comfortability routes",
            run: routes_suite,
        },
        Suite {
            name: "scattering",
            run: scattering_suite,
        },
        Suite {
            name: "kirchhoff audits",
            run: kirchhoff_suite,
        },
        Suite {
            name: "factor oracles",
            run: factors_suite,
        },
        Suite {
            name: "incidence identities",
            run: incidence_suite,
        },
        Suite {
            name: "signless mutation",
            run: mutation_suite,
        },
        Suite {
            name: "simulator convergence",
            run: simulator_suite,
        },
        Suite {
            name: "ranking structure",
            run: ranking_suite,
        },
    ]
}

/// Builds the catalog up to `max_n` vertices and runs every suite.
pub fn run_all(max_n: usize) -> Result<Vec<SuiteOutcome>> {
    let catalog = Catalog::build(max_n)?;
    Ok(registry().iter().map(|s| (s.run)(&catalog)).collect())
}

fn describe(inst: &WalkInstance) -> String {
    format!(
        "{:?} tails {:?} z={}",
        inst.graph().edges(),
        inst.boundary(),
        inst.phase()
    )
}

fn routes_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("comfortability routes");
    for (inst, psi) in &cat.states {
        let g = inst.graph();
        let (u1, un) = (inst.boundary()[0], inst.boundary()[1]);
        let direct = comfortability_direct(psi);
        let route = match (inst.phase(), bipartition(g).is_bipartite()) {
            (Phase::Minus, false) => nonbipartite_route(inst).map(|(_, p, e)| (p, e)),
            _ => bipartite_route(inst).map(|(_, p, e)| (p, e)),
        };
        if let Some((p, e)) = out.record(route, || describe(inst)) {
            out.check(p == *psi && e == direct, || format!("potential route differs: {}", describe(inst)));
        }
        if let Some(c) = out.record(closed_form_comfort(g, u1, un, inst.phase()), || describe(inst)) {
            out.check(c == direct, || format!("closed form {c} vs {direct}: {}", describe(inst)));
        }
    }
    out
}

/// Inflow whose `X`-side and `Y`-side totals agree.
fn balanced_inflow(g: &Graph, boundary: &[Vertex]) -> Option<Vec<Rational>> {
    let colors = bipartition(g);
    let b = colors.bipartition()?;
    let side = |v: Vertex| if b.in_x(v) { rat(1) } else { rat(-1) };
    let mut alpha: Vec<Rational> = (0..boundary.len()).map(|i| rat(i as i64 + 2)).collect();
    let last = boundary.len() - 1;
    let signed: Rational = boundary[..last].iter().zip(&alpha).map(|(&v, a)| side(v) * a).sum();
    alpha[last] = -signed * side(boundary[last]);
    Some(alpha)
}

fn scattering_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("scattering");
    for g in &cat.graphs {
        for r in [1, 2, 3] {
            for boundary in subsets(g.n(), r) {
                let mut alpha = vec![rat(0); r];
                alpha[0] = rat(1);
                for phase in [Phase::Minus, Phase::Plus] {
                    let Some(inst) =
                        out.record(WalkInstance::new(g.clone(), boundary.clone(), alpha.clone(), phase), || {
                            format!("{:?} {boundary:?}", g.edges())
                        })
                    else {
                        continue;
                    };
                    let Some(rep) = out.record(scattering(&inst), || describe(&inst)) else {
                        continue;
                    };
                    out.check(rep.is_orthogonal(), || format!("not orthogonal: {}", describe(&inst)));
                    match phase {
                        Phase::Minus => out.check(rep.matches_prediction(), || format!("prediction: {}", describe(&inst))),
                        Phase::Plus => out.check(rep.sigma == grover_matrix(r), || format!("not Grover: {}", describe(&inst))),
                    }
                    if phase == Phase::Minus {
                        if let Some(balanced) = balanced_inflow(g, &boundary) {
                            let check = inst.with_inflow(balanced).and_then(|i| scattering(&i));
                            if let Some(rep) = out.record(check, || describe(&inst)) {
                                out.check(rep.beta == rep.alpha, || format!("balanced inflow moved: {}", describe(&inst)));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn kirchhoff_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("kirchhoff audits");
    for (inst, psi) in &cat.states {
        out.record(kirchhoff_audit(inst, psi), || describe(inst));
        out.record(vertex_constants(inst, psi), || describe(inst));
    }
    out
}

fn factors_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("factor oracles");
    for g in &cat.graphs {
        let Some(e) = out.record(enumerate_factors(g), || format!("{:?}", g.edges())) else {
            continue;
        };
        let l = laplacian(g);
        let q = signless_laplacian(g);
        let det = |m: &crate::algebra::RatMatrix, drop: &[usize]| m.minor(drop, drop).det().ok();
        let n = g.n();
        out.check(det(&l, &[n - 1]) == Some(rat(e.chi1 as i64)), || format!("chi1 {:?}", g.edges()));
        out.check(q.det().ok() == Some(rat(e.iota1 as i64)), || format!("iota1 {:?}", g.edges()));
        for u in 1..=n {
            out.check(det(&q, &[u - 1]) == Some(rat(e.iota2[u] as i64)), || format!("iota2 {:?} at {u}", g.edges()));
        }
        for (u, v) in ordered_pairs(n) {
            out.check(det(&l, &[u - 1, v - 1]) == Some(rat(e.chi2[u][v] as i64)), || {
                format!("chi2 {:?} at {u},{v}", g.edges())
            });
        }
    }
    for len in 3..=9 {
        if let Some(d) = out.record(cycle_incidence_check(len), || format!("cycle {len}")) {
            let ok = if len % 2 == 1 { is_plus_minus_two(&d) } else { d == rat(0) };
            out.check(ok, || format!("cycle {len}: {d}"));
        }
    }
    out
}

fn incidence_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("incidence identities");
    let two = rat(2);
    for g in &cat.graphs {
        let l = laplacian(g);
        let q = signless_laplacian(g);
        let gram = |b: crate::algebra::RatMatrix| b.mul(&b.transpose()).ok();
        out.check(gram(incidence_oriented(g)) == Some(l.clone()), || format!("B {:?}", g.edges()));
        out.check(gram(incidence_nonoriented(g)) == Some(q.clone()), || format!("B~ {:?}", g.edges()));
        out.check(gram(arc_incidence(g, true)) == Some(l.scale(&two)), || format!("C {:?}", g.edges()));
        out.check(gram(arc_incidence(g, false)) == Some(q.scale(&two)), || format!("C~ {:?}", g.edges()));
        let grounded: Vec<_> = (0..g.n()).map(|i| l.minor(&[i], &[i]).det().ok()).collect();
        out.check(grounded.windows(2).all(|w| w[0] == w[1]), || format!("grounding {:?}", g.edges()));
        let singular = q.det().map(|d| d == rat(0)).unwrap_or(false);
        out.check(singular == bipartition(g).is_bipartite(), || format!("Q singularity {:?}", g.edges()));
    }
    out
}

/// Replaces `Q` by `L` inside the factor cross-check; every non-bipartite
/// graph must then report an `ι₁` disagreement.
fn mutation_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("signless mutation");
    for g in cat.graphs.iter().filter(|g| !bipartition(g).is_bipartite()) {
        let caught = matches!(
            factor_counts_with(g, 1, 2, Mode::CrossChecked, &laplacian(g)),
            Err(Error::OracleMismatch { quantity: "iota1", .. })
        );
        out.check(caught, || format!("mutation survived on {:?}", g.edges()));
    }
    out
}

/// Steps used for the float convergence check.
pub const SIMULATION_STEPS: usize = 2000;
/// Sup-norm distance accepted between simulated and exact states.
pub const SIMULATION_TOLERANCE: f64 = 1e-6;

fn simulator_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("simulator convergence");
    for (inst, psi) in cat.states.iter().filter(|(i, _)| i.graph().n() <= 4) {
        if let Some(trace) = out.record(simulate(inst, SIMULATION_STEPS), || describe(inst)) {
            let d = trace.distance_to(psi);
            out.check(d <= SIMULATION_TOLERANCE, || format!("distance {d:e}: {}", describe(inst)));
            let res = &trace.residuals;
            out.check(res[res.len() - 1] <= res[res.len() / 2], || {
                format!("residual not decreasing: {}", describe(inst))
            });
        }
    }
    let triangle = Graph::new(3, &[(1, 2), (1, 3), (2, 3)]).and_then(|g| {
        WalkInstance::new(g, vec![1, 3], vec![rat(9), rat(9)], Phase::Plus)
    });
    if let Some(inst) = out.record(triangle, || "triangle".into()) {
        if let Some(s) = out.record(TruncatedState::initial(&inst, 3), || "triangle".into()) {
            let s1 = step(&s, &inst);
            let g = inst.graph();
            let arc = |u, v| s1.internal()[g.arc_index(crate::graph::Arc::new(u, v)).unwrap()];
            out.check(arc(1, 2) == 6.0 && arc(1, 3) == 6.0 && s1.outbound(0, 0) == -3.0, || {
                "triangle first step".into()
            });
        }
    }
    out
}

fn ranking_suite(cat: &Catalog) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("ranking structure");
    for n in 2..=cat.max_n {
        for phase in [Phase::Minus, Phase::Plus] {
            let Some(r) = out.record(rank(n, phase), || format!("n={n}")) else {
                continue;
            };
            let total: usize = r.rows.iter().map(|x| x.multiplicity).sum();
            out.check(total == r.configurations, || format!("n={n} multiplicities"));
            if phase == Phase::Minus {
                for vc in &r.value_classes {
                    let expected = if vc.bipartite { 'T' } else { 'R' };
                    out.check(vc.label() == expected, || format!("n={n} label of {}", vc.comf));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_catalog_passes() {
        let results = run_all(3).unwrap();
        assert_eq!(results.len(), registry().len());
        for r in &results {
            assert!(r.passed(), "{}: {:?}", r.name, r.failures);
            assert!(r.cases > 0, "{}", r.name);
        }
        let audits = results.iter().find(|r| r.name == "kirchhoff audits").unwrap();
        let cat = Catalog::build(3).unwrap();
        assert_eq!(audits.cases, 2 * cat.states.len());
    }

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(5, 3).len(), 10);
        assert_eq!(subsets(4, 2), vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        assert_eq!(ordered_pairs(4).count(), 12);
    }

    #[test]
    fn balanced_inflows_balance() {
        let g = Graph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(balanced_inflow(&g, &[1, 3]).unwrap(), vec![rat(2), rat(-2)]);
        assert_eq!(balanced_inflow(&g, &[1, 2]).unwrap(), vec![rat(2), rat(2)]);
        let k3 = Graph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(balanced_inflow(&k3, &[1, 2]).is_none());
    }
}
