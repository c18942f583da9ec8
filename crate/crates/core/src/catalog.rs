//! Catalog sweeps over small connected graphs, comfortability rankings, and
//! single-instance analysis reports.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::factors::{comfort_from_counts, factor_counts, FactorCounts, Mode};
use crate::graph::{bipartition, canonical_form, enumerate_connected, rooted_canonical_form, Coloring, Graph, Vertex};
use crate::instance::{Phase, WalkInstance};
use crate::potential::{bipartite_route, kirchhoff_audit, nonbipartite_route, AuditReport};
use crate::simulator::{simulate_with, SimulationTrace};
use crate::stationary::{comfortability_direct, outflow, scattering, stationary_state, vertex_constants, ArcField, ScatteringReport};

/// Largest vertex count accepted by [`rank`].
pub const MAX_RANK_N: usize = 5;

/// One boundary-pair orbit of one isomorphism class.
#[derive(Clone, Debug)]
pub struct CatalogRow {
    /// Index into [`Ranking::classes`].
    pub class: usize,
    pub representative: Graph,
    pub pair: (Vertex, Vertex),
    pub comf: Rational,
    /// `'R'` when the outflow equals the inflow, `'T'` otherwise.
    pub label: char,
    pub bipartite: bool,
    pub edge_count: usize,
    pub distance: usize,
    /// Labeled (graph, ordered pair) configurations in the orbit.
    pub multiplicity: usize,
}

/// Configurations sharing bipartiteness, edge count and comfortability.
#[derive(Clone, Debug)]
pub struct ValueClass {
    pub bipartite: bool,
    pub edge_count: usize,
    pub comf: Rational,
    pub labels: BTreeSet<char>,
    /// Indices into [`Ranking::rows`].
    pub rows: Vec<usize>,
    pub name: Option<String>,
}

impl ValueClass {
    /// Scattering label, or `'?'` when the members disagree.
    pub fn label(&self) -> char {
        match self.labels.len() {
            1 => *self.labels.first().unwrap(),
            _ => '?',
        }
    }
}

/// Maximum comfortability over boundary pairs of one isomorphism class.
#[derive(Clone, Debug)]
pub struct ClassMaximum {
    pub canonical: u64,
    pub representative: Graph,
    pub degree_sequence: Vec<usize>,
    pub max_comf: Rational,
    pub argmax: (Vertex, Vertex),
    pub name: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Ranking {
    pub n: usize,
    pub phase: Phase,
    /// Sorted by comfortability, largest first.
    pub rows: Vec<CatalogRow>,
    pub classes: Vec<ClassMaximum>,
    /// Sorted by comfortability, largest first.
    pub value_classes: Vec<ValueClass>,
    pub configurations: usize,
}

impl Ranking {
    /// Value classes grouped by equal comfortability, largest first.
    pub fn tie_groups(&self) -> Vec<(Rational, Vec<usize>)> {
        let mut groups: Vec<(Rational, Vec<usize>)> = vec![];
        for (i, vc) in self.value_classes.iter().enumerate() {
            match groups.last_mut() {
                Some((c, members)) if *c == vc.comf => members.push(i),
                _ => groups.push((vc.comf.clone(), vec![i])),
            }
        }
        groups
    }

    pub fn value_class(&self, name: &str) -> Option<&ValueClass> {
        self.value_classes.iter().find(|v| v.name.as_deref() == Some(name))
    }

    pub fn class_maximum(&self, name: &str) -> Option<&ClassMaximum> {
        self.classes.iter().find(|c| c.name.as_deref() == Some(name))
    }
}

/// Comfortability and reflection label of the standard two-tail instance.
fn evaluate(g: &Graph, u1: Vertex, un: Vertex, phase: Phase) -> Result<(Rational, char)> {
    let inst = WalkInstance::standard(g.clone(), u1, un, phase)?;
    let psi = stationary_state(&inst)?;
    let beta = outflow(&inst, &psi);
    let label = if beta == inst.inflow() { 'R' } else { 'T' };
    Ok((comfortability_direct(&psi), label))
}

/// Every labeled connected graph on `n` vertices with every ordered boundary
/// pair, grouped into orbits under relabeling. The exact solve runs once per
/// orbit.
pub fn rank(n: usize, phase: Phase) -> Result<Ranking> {
    if !(2..=MAX_RANK_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            range: "2..=5",
        });
    }
    let mut orbits: BTreeMap<(u64, Vec<Vertex>), CatalogRow> = BTreeMap::new();
    let mut class_index: BTreeMap<u64, usize> = BTreeMap::new();
    let mut configurations = 0;
    for g in enumerate_connected(n)? {
        let canonical = canonical_form(&g)?;
        let next = class_index.len();
        let class = *class_index.entry(canonical).or_insert(next);
        let bipartite = bipartition(&g).is_bipartite();
        for u1 in 1..=n {
            for un in (1..=n).filter(|&v| v != u1) {
                configurations += 1;
                let key = rooted_canonical_form(&g, &[u1, un])?;
                if let Some(row) = orbits.get_mut(&key) {
                    row.multiplicity += 1;
                    continue;
                }
                let (comf, label) = evaluate(&g, u1, un, phase)?;
                orbits.insert(
                    key,
                    CatalogRow {
                        class,
                        representative: g.clone(),
                        pair: (u1, un),
                        comf,
                        label,
                        bipartite,
                        edge_count: g.edge_count(),
                        distance: g.distance(u1, un),
                        multiplicity: 1,
                    },
                );
            }
        }
    }

    let mut rows: Vec<CatalogRow> = orbits.into_values().collect();
    rows.sort_by(|a, b| b.comf.cmp(&a.comf).then(a.class.cmp(&b.class)).then(a.pair.cmp(&b.pair)));

    let mut classes: Vec<Option<ClassMaximum>> = vec![None; class_index.len()];
    for row in &rows {
        let slot = &mut classes[row.class];
        if slot.is_none() {
            // rows are sorted, so the first one seen is a maximum
            slot.replace(ClassMaximum {
                canonical: canonical_form(&row.representative)?,
                representative: row.representative.clone(),
                degree_sequence: row.representative.degree_sequence(),
                max_comf: row.comf.clone(),
                argmax: row.pair,
                name: None,
            });
        }
    }
    let mut classes: Vec<ClassMaximum> = classes.into_iter().map(|c| c.expect("every class has rows")).collect();

    let mut grouped: BTreeMap<(bool, usize, Rational), ValueClass> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        let vc = grouped
            .entry((row.bipartite, row.edge_count, row.comf.clone()))
            .or_insert_with(|| ValueClass {
                bipartite: row.bipartite,
                edge_count: row.edge_count,
                comf: row.comf.clone(),
                labels: BTreeSet::new(),
                rows: vec![],
                name: None,
            });
        vc.labels.insert(row.label);
        vc.rows.push(i);
    }
    let mut value_classes: Vec<ValueClass> = grouped.into_values().collect();
    value_classes.sort_by(|a, b| {
        b.comf
            .cmp(&a.comf)
            .then(b.edge_count.cmp(&a.edge_count))
            .then(a.bipartite.cmp(&b.bipartite))
    });

    if n == 4 && phase == Phase::Minus {
        for vc in &mut value_classes {
            let row = &rows[vc.rows[0]];
            vc.name = Some(configuration_name(&row.representative, row.pair.0, row.pair.1).to_string());
        }
    }
    if n == 4 {
        for c in &mut classes {
            c.name = four_vertex_class_name(&c.degree_sequence).map(str::to_string);
        }
    }
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (&classes[a], &classes[b]);
        a.name.cmp(&b.name).then(a.canonical.cmp(&b.canonical))
    });
    let mut position = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    for row in &mut rows {
        row.class = position[row.class];
    }
    let mut slots: Vec<Option<ClassMaximum>> = classes.into_iter().map(Some).collect();
    let classes: Vec<ClassMaximum> = order.iter().map(|&i| slots[i].take().expect("permutation")).collect();

    Ok(Ranking {
        n,
        phase,
        rows,
        classes,
        value_classes,
        configurations,
    })
}

/// Name of a four-vertex isomorphism class from its degree sequence.
pub fn four_vertex_class_name(degrees: &[usize]) -> Option<&'static str> {
    Some(match degrees {
        [3, 1, 1, 1] => "Γ1",
        [2, 2, 1, 1] => "Γ2",
        [2, 2, 2, 2] => "Γ3",
        [3, 2, 2, 1] => "Γ4",
        [3, 3, 2, 2] => "Γ5",
        [3, 3, 3, 3] => "Γ6",
        _ => return None,
    })
}

/// Name of a four-vertex boundary configuration, from edge count,
/// bipartiteness, the degree of `u1` and the boundary distance.
pub fn configuration_name(g: &Graph, u1: Vertex, un: Vertex) -> &'static str {
    let bipartite = bipartition(g).is_bipartite();
    match (g.edge_count(), bipartite) {
        (6, _) => "𝒢1",
        (5, _) if g.degree(u1) == 2 => "𝒢2",
        (5, _) => "𝒢3",
        (4, true) if g.distance(u1, un) == 1 => "𝒢4",
        (4, true) => "𝒢5",
        (4, false) if g.degree(u1) == 1 => "𝒢6",
        (4, false) => "𝒢7",
        _ => match g.distance(u1, un) {
            1 => "𝒢8",
            2 => "𝒢9",
            _ => "𝒢10",
        },
    }
}

/// One comfortability route and its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteValue {
    pub route: &'static str,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub struct SimulationSummary {
    pub steps: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub distance_to_exact: f64,
    pub comfortability: f64,
}

impl SimulationSummary {
    pub fn new(trace: &SimulationTrace, exact: &ArcField) -> Self {
        SimulationSummary {
            steps: trace.steps(),
            converged: trace.converged,
            final_residual: trace.residuals.last().copied().unwrap_or(0.0),
            distance_to_exact: trace.distance_to(exact),
            comfortability: trace.comfortability(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub instance: WalkInstance,
    pub coloring: Coloring,
    pub psi: ArcField,
    pub routes: Vec<RouteValue>,
    pub scattering: ScatteringReport,
    /// Present for two tails.
    pub factors: Option<FactorCounts>,
    pub audit: AuditReport,
    pub simulation: Option<SimulationSummary>,
}

impl AnalysisReport {
    pub fn routes_agree(&self) -> bool {
        self.routes.windows(2).all(|w| w[0].value == w[1].value)
    }

    pub fn comfortability(&self) -> &Rational {
        &self.routes[0].value
    }
}

/// Edge count up to which analysis cross-checks factor counts by enumeration.
const ENUMERATION_EDGE_LIMIT: usize = 16;

/// Full analysis of one instance: exact state, every applicable
/// comfortability route, scattering, factor counts and conservation audits.
/// Disagreements between routes are reported, not resolved.
pub fn analyze(inst: &WalkInstance, simulate_steps: Option<usize>, tolerance: f64) -> Result<AnalysisReport> {
    let g = inst.graph();
    let coloring = bipartition(g);
    let psi = stationary_state(inst)?;
    let mut routes = vec![RouteValue {
        route: "direct",
        value: comfortability_direct(&psi),
    }];

    let factors = if inst.r() == 2 {
        let mode = if g.edge_count() <= ENUMERATION_EDGE_LIMIT {
            Mode::CrossChecked
        } else {
            Mode::DeterminantOnly
        };
        Some(factor_counts(g, inst.boundary()[0], inst.boundary()[1], mode)?)
    } else {
        None
    };

    if inst.r() == 2 && inst.is_standard() {
        let potential = match (inst.phase(), coloring.is_bipartite()) {
            (Phase::Minus, false) => {
                let (_, psi_q, e) = nonbipartite_route(inst)?;
                if psi_q != psi {
                    return Err(Error::Residual("signless route state"));
                }
                e
            }
            _ => {
                let (_, psi_l, e) = bipartite_route(inst)?;
                if psi_l != psi {
                    return Err(Error::Residual("Laplacian route state"));
                }
                e
            }
        };
        routes.push(RouteValue {
            route: "potential",
            value: potential,
        });
        let counts = factors.as_ref().expect("two tails");
        routes.push(RouteValue {
            route: "closed-form",
            value: comfort_from_counts(counts, coloring.is_bipartite(), inst.phase()),
        });
    }

    let scattering = scattering(inst)?;
    let audit = kirchhoff_audit(inst, &psi)?;
    vertex_constants(inst, &psi)?;

    let simulation = match simulate_steps {
        Some(t) => Some(SimulationSummary::new(&simulate_with(inst, t, tolerance)?, &psi)),
        None => None,
    };

    Ok(AnalysisReport {
        instance: inst.clone(),
        coloring,
        psi,
        routes,
        scattering,
        factors,
        audit,
        simulation,
    })
}
