//! Acceptance gate: eight criteria, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use tailwalk::algebra::{rat, ratio, Rational};
use tailwalk::catalog::rank;
use tailwalk::factors::{
    closed_form_comfort, cycle_incidence_check, enumerate_factors, odd_unicyclic_sums, spanning_tree_count,
    two_forest_count,
};
use tailwalk::graph::{bipartition, canonical_form, enumerate_connected, Arc, Graph, Vertex};
use tailwalk::potential::{bipartite_route, kirchhoff_audit, laplacian, nonbipartite_route, signless_laplacian};
use tailwalk::simulator::{simulate_with, step, TruncatedState};
use tailwalk::stationary::{comfortability_direct, scattering, stationary_state, vertex_constants};
use tailwalk::{Phase, WalkInstance};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(s: &str) -> Rational {
    tailwalk::algebra::parse_rational(s).unwrap()
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:.1?}, limit {limit:?}"))
    }
}

fn graphs_up_to(max_n: usize) -> Vec<Graph> {
    (2..=max_n).flat_map(|n| enumerate_connected(n).unwrap()).collect()
}

fn ordered_pairs(n: usize) -> Vec<(Vertex, Vertex)> {
    let mut out = vec![];
    for u in 1..=n {
        for v in 1..=n {
            if u != v {
                out.push((u, v));
            }
        }
    }
    out
}

fn subsets(n: usize, r: usize) -> Vec<Vec<Vertex>> {
    let mut out = vec![];
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize == r {
            out.push((1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect());
        }
    }
    out
}

fn complete(n: usize) -> Graph {
    let mut e = vec![];
    for u in 1..=n {
        for v in u + 1..=n {
            e.push((u, v));
        }
    }
    Graph::new(n, &e).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = rank(4, Phase::Minus).map_err(|e| e.to_string())?;
    let expected = [
        ("5/12", 'R'),
        ("3/4", 'R'),
        ("1/2", 'R'),
        ("19/16", 'T'),
        ("5/4", 'T'),
        ("7/4", 'R'),
        ("3/4", 'R'),
        ("1", 'T'),
        ("5/4", 'T'),
        ("3/2", 'T'),
    ];
    if r.value_classes.len() != 10 {
        return Err(format!("{} value classes", r.value_classes.len()));
    }
    for (i, (comf, label)) in expected.iter().enumerate() {
        let name = format!("𝒢{}", i + 1);
        let vc = r.value_class(&name).ok_or(format!("{name} missing"))?;
        if vc.comf != q(comf) || vc.label() != *label {
            return Err(format!("{name}: {} {} expected {comf} {label}", vc.comf, vc.label()));
        }
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("ten classes and labels exact ({t:.2?})"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let expected = [
        (Phase::Minus, ["5/4", "3/2", "5/4", "7/4", "3/4", "5/12"]),
        (Phase::Plus, ["5/4", "3/2", "5/4", "17/12", "3/2", "13/8"]),
    ];
    for (phase, values) in expected {
        let r = rank(4, phase).map_err(|e| e.to_string())?;
        for (j, v) in values.iter().enumerate() {
            let name = format!("Γ{}", j + 1);
            let c = r.class_maximum(&name).ok_or(format!("{name} missing"))?;
            if c.max_comf != q(v) {
                return Err(format!("z={phase} {name}: {} expected {v}", c.max_comf));
            }
        }
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("class maxima exact for z=-1 and z=+1 ({t:.2?})"))
}

/// Non-isomorphic trees on `n` vertices, grown leaf by leaf.
fn trees(n: usize) -> Vec<Graph> {
    let mut level = vec![Graph::new(2, &[(1, 2)]).unwrap()];
    for k in 3..=n {
        let mut seen = std::collections::BTreeSet::new();
        let mut next = vec![];
        for t in &level {
            for v in 1..k {
                let mut edges = t.edges().to_vec();
                edges.push((v, k));
                let g = Graph::new(k, &edges).unwrap();
                if seen.insert(canonical_form(&g).unwrap()) {
                    next.push(g);
                }
            }
        }
        level = next;
    }
    level
}

fn criterion_3() -> Outcome {
    let err = |e: tailwalk::Error| e.to_string();
    let k4 = complete(4);
    let (iota1, iota2) = odd_unicyclic_sums(&k4, 1).map_err(err)?;
    let e_k4 = comfortability_direct(&stationary_state(&WalkInstance::standard(k4, 1, 4, Phase::Minus).map_err(err)?).map_err(err)?);
    let c4 = Graph::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
    let chi1 = spanning_tree_count(&c4).map_err(err)?;
    let chi2 = two_forest_count(&c4, 1, 4).map_err(err)?;
    let e_c4 = comfortability_direct(&stationary_state(&WalkInstance::standard(c4, 1, 4, Phase::Minus).map_err(err)?).map_err(err)?);
    let worked = [
        ("iota1(K4)", rat(iota1 as i64), rat(48)),
        ("iota2(K4)", rat(iota2 as i64), rat(20)),
        ("E(K4)", e_k4, ratio(5, 12)),
        ("chi1(C4)", rat(chi1 as i64), rat(4)),
        ("chi2(C4)", rat(chi2 as i64), rat(3)),
        ("E(C4)", e_c4, ratio(19, 16)),
    ];
    for (what, got, want) in worked {
        if got != want {
            return Err(format!("{what} = {got}, expected {want}"));
        }
    }
    let mut checked = 0;
    for n in 2..=8 {
        for t in trees(n) {
            for (u1, un) in ordered_pairs(n) {
                for phase in [Phase::Minus, Phase::Plus] {
                    let inst = WalkInstance::standard(t.clone(), u1, un, phase).map_err(err)?;
                    let got = comfortability_direct(&stationary_state(&inst).map_err(err)?);
                    let want = ratio((t.distance(u1, un) + n - 1) as i64, 4);
                    if got != want {
                        return Err(format!("tree {:?} pair {u1},{un}: {got} vs {want}", t.edges()));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("worked values exact; tree formula on {checked} rooted trees n<=8"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for g in graphs_up_to(5) {
        let bipartite = bipartition(&g).is_bipartite();
        for (u1, un) in ordered_pairs(g.n()) {
            for phase in [Phase::Minus, Phase::Plus] {
                let inst = WalkInstance::standard(g.clone(), u1, un, phase).unwrap();
                let where_ = || format!("{:?} pair {u1},{un} z={phase}", g.edges());
                let direct = comfortability_direct(&stationary_state(&inst).map_err(|e| format!("{}: {e}", where_()))?);
                let potential = if phase == Phase::Minus && !bipartite {
                    nonbipartite_route(&inst).map(|r| r.2)
                } else {
                    bipartite_route(&inst).map(|r| r.2)
                }
                .map_err(|e| format!("{}: {e}", where_()))?;
                let closed = closed_form_comfort(&g, u1, un, phase).map_err(|e| format!("{}: {e}", where_()))?;
                if direct != potential || direct != closed {
                    return Err(format!("{}: {direct} {potential} {closed}", where_()));
                }
                checked += 1;
            }
        }
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("{checked} instances agree on all three routes ({t:.1?})"))
}

fn balanced(g: &Graph, boundary: &[Vertex]) -> Option<Vec<Rational>> {
    let colors = bipartition(g);
    let b = colors.bipartition()?;
    let sign = |v: Vertex| if b.in_x(v) { rat(1) } else { rat(-1) };
    let mut alpha: Vec<Rational> = (0..boundary.len()).map(|i| ratio(2 * i as i64 + 1, 3)).collect();
    let last = boundary.len() - 1;
    let s: Rational = boundary[..last].iter().zip(&alpha).map(|(&v, a)| sign(v) * a).sum();
    alpha[last] = -s * sign(boundary[last]);
    Some(alpha)
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let mut balanced_checked = 0;
    for g in graphs_up_to(5) {
        for r in [2, 3] {
            for boundary in subsets(g.n(), r) {
                let mut alpha = vec![rat(0); r];
                alpha[0] = rat(1);
                let inst = WalkInstance::new(g.clone(), boundary.clone(), alpha, Phase::Minus).unwrap();
                let where_ = || format!("{:?} tails {boundary:?}", g.edges());
                let rep = scattering(&inst).map_err(|e| format!("{}: {e}", where_()))?;
                if !rep.is_orthogonal() || !rep.matches_prediction() {
                    return Err(format!("{}: sigma {}", where_(), rep.sigma));
                }
                checked += 1;
                if let Some(a) = balanced(&g, &boundary) {
                    let rep = scattering(&inst.with_inflow(a).unwrap()).map_err(|e| format!("{}: {e}", where_()))?;
                    if rep.beta != rep.alpha {
                        return Err(format!("{}: balanced inflow changed", where_()));
                    }
                    balanced_checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} boundaries orthogonal and predicted; {balanced_checked} balanced inflows reflected"
    ))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for g in graphs_up_to(5) {
        for (u1, un) in ordered_pairs(g.n()) {
            for phase in [Phase::Minus, Phase::Plus] {
                let inst = WalkInstance::standard(g.clone(), u1, un, phase).unwrap();
                let psi = stationary_state(&inst).map_err(|e| e.to_string())?;
                let where_ = || format!("{:?} pair {u1},{un} z={phase}", g.edges());
                kirchhoff_audit(&inst, &psi).map_err(|e| format!("{}: {e}", where_()))?;
                vertex_constants(&inst, &psi).map_err(|e| format!("{}: {e}", where_()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} stationary states pass every conservation law"))
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    for g in graphs_up_to(5) {
        let e = enumerate_factors(&g).map_err(|e| e.to_string())?;
        let (l, sq) = (laplacian(&g), signless_laplacian(&g));
        let det = |m: &tailwalk::RatMatrix, drop: &[usize]| m.minor(drop, drop).det().unwrap();
        let n = g.n();
        let mut pairs = vec![(det(&l, &[n - 1]), e.chi1), (sq.det().unwrap(), e.iota1)];
        for u in 1..=n {
            pairs.push((det(&sq, &[u - 1]), e.iota2[u]));
        }
        for (u, v) in ordered_pairs(n) {
            pairs.push((det(&l, &[u - 1, v - 1]), e.chi2[u][v]));
        }
        for (d, count) in pairs {
            if d != rat(count as i64) {
                return Err(format!("{:?}: determinant {d} vs enumeration {count}", g.edges()));
            }
            checked += 1;
        }
    }
    for len in 3..=9 {
        let d = cycle_incidence_check(len).map_err(|e| e.to_string())?;
        let ok = if len % 2 == 1 {
            d == rat(2) || d == rat(-2)
        } else {
            d == rat(0)
        };
        if !ok {
            return Err(format!("cycle {len}: det {d}"));
        }
    }
    Ok(format!("{checked} determinant/enumeration pairs equal; cycle incidence 3..9 correct"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for g in graphs_up_to(4) {
        for (u1, un) in ordered_pairs(g.n()) {
            for phase in [Phase::Minus, Phase::Plus] {
                let inst = WalkInstance::standard(g.clone(), u1, un, phase).unwrap();
                let exact = stationary_state(&inst).map_err(|e| e.to_string())?;
                let trace = simulate_with(&inst, 2000, 0.0).map_err(|e| e.to_string())?;
                if trace.steps() != 2000 || trace.final_state.horizon() != 2002 {
                    return Err("trace length or truncation depth wrong".into());
                }
                let d = trace.distance_to(&exact);
                if d > 1e-6 {
                    return Err(format!("{:?} pair {u1},{un} z={phase}: distance {d:e}", g.edges()));
                }
                worst = worst.max(d);
                checked += 1;
            }
        }
    }
    let k3 = complete(3);
    for (phase, sign) in [(Phase::Plus, 1.0), (Phase::Minus, -1.0)] {
        let inst = WalkInstance::new(k3.clone(), vec![1, 3], vec![rat(9), rat(9)], phase).unwrap();
        let s1 = step(&TruncatedState::initial(&inst, 3).unwrap(), &inst);
        let at = |u, v| s1.internal()[k3.arc_index(Arc::new(u, v)).unwrap()];
        let expect = [
            (at(1, 2), 6.0),
            (at(1, 3), 6.0),
            (at(3, 1), 6.0),
            (at(3, 2), 6.0),
            (s1.outbound(0, 0), -3.0),
            (s1.outbound(1, 0), -3.0),
        ];
        if expect.iter().any(|&(got, want)| got != sign * want) {
            return Err(format!("triangle first step at z={phase}: {:?}", expect));
        }
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("{checked} traces within {worst:.1e} of exact; triangle first step exact ({t:.1?})"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("1 four-vertex comfortability classes", criterion_1),
        ("2 class maxima for both phases", criterion_2),
        ("3 worked values and tree formula", criterion_3),
        ("4 three-route agreement", criterion_4),
        ("5 scattering matrices", criterion_5),
        ("6 conservation-law audits", criterion_6),
        ("7 determinant and enumeration oracles", criterion_7),
        ("8 simulator convergence", criterion_8),
    ];
    let mut failed = vec![];
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                println!("FAIL criterion {name}: {msg}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
