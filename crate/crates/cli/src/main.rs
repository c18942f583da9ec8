use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tailwalk::algebra::{format_rational, to_f64};
use tailwalk::catalog::{analyze, rank, AnalysisReport, Ranking};
use tailwalk::graph::Coloring;
use tailwalk::selftest::run_all;
use tailwalk::simulator::{simulate_with, DEFAULT_TOLERANCE};
use tailwalk::stationary::{comfortability_direct, stationary_state};
use tailwalk::{parse_instance, Error, Phase, RatMatrix, Rational, WalkInstance};

#[derive(Parser)]
#[command(name = "tailwalk", version, about = "Exact stationary states of Grover walks on graphs with tails")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and cross-check every applicable route.
    Analyze {
        file: PathBuf,
        /// Also run the float simulator for this many steps.
        #[arg(long)]
        simulate: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        json: bool,
    },
    /// Rank every boundary pair of every connected graph on n vertices.
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: Phase,
        #[arg(long)]
        json: bool,
    },
    /// Simulate an instance and write the trace as CSV.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        steps: usize,
        /// CSV destination, `-` for standard output.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Run every self-check suite over the small-graph catalog.
    Selftest {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            file,
            simulate,
            tolerance,
            json,
        } => cmd_analyze(&file, simulate, tolerance, json),
        Command::Rank { n, z, json } => cmd_rank(n, z, json),
        Command::Simulate {
            file,
            steps,
            out,
            tolerance,
        } => cmd_simulate(&file, steps, &out, tolerance),
        Command::Selftest { max_n } => cmd_selftest(max_n),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<WalkInstance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(parse_instance(&text)?)
}

fn exact(x: &Rational) -> Value {
    json!({ "exact": format_rational(x), "approx": to_f64(x) })
}

fn fraction(x: &Rational) -> String {
    format!("{} ({:.6})", format_rational(x), to_f64(x))
}

fn matrix_json(m: &RatMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(format_rational(x))).collect()))
            .collect(),
    )
}

fn cmd_analyze(path: &Path, steps: Option<usize>, tolerance: f64, as_json: bool) -> Result<bool, Failure> {
    let inst = load(path)?;
    let report = analyze(&inst, steps, tolerance)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&analysis_json(&report)).expect("serializable"));
    } else {
        print_analysis(&report);
    }
    Ok(report.routes_agree())
}

fn analysis_json(r: &AnalysisReport) -> Value {
    let inst = &r.instance;
    let coloring = match &r.coloring {
        Coloring::Bipartite(b) => json!({ "bipartite": true, "x": b.x(), "y": b.y() }),
        Coloring::OddCycle(c) => json!({ "bipartite": false, "odd_cycle": c }),
    };
    let s = &r.scattering;
    let mut out = json!({
        "instance": {
            "n": inst.graph().n(),
            "edges": inst.graph().edges(),
            "boundary": inst.boundary(),
            "inflow": inst.inflow().iter().map(format_rational).collect::<Vec<_>>(),
            "z": inst.phase().sign(),
        },
        "coloring": coloring,
        "psi": r.psi.iter().map(|(a, x)| json!({
            "origin": a.origin, "terminus": a.terminus, "value": exact(x),
        })).collect::<Vec<_>>(),
        "comfortability": r.routes.iter().map(|rv| json!({
            "route": rv.route, "value": exact(&rv.value),
        })).collect::<Vec<_>>(),
        "routes_agree": r.routes_agree(),
        "scattering": {
            "alpha": s.alpha.iter().map(format_rational).collect::<Vec<_>>(),
            "beta": s.beta.iter().map(format_rational).collect::<Vec<_>>(),
            "sigma": matrix_json(&s.sigma),
            "classification": s.classification.name(),
            "label": s.label().to_string(),
            "orthogonal": s.is_orthogonal(),
        },
        "audit": {
            "family": format!("{:?}", r.audit.family),
            "checks": r.audit.checks.iter().map(|(law, k)| json!({ "law": law, "count": k })).collect::<Vec<_>>(),
        },
    });
    if let Some(f) = &r.factors {
        out["factors"] = json!({
            "chi1": f.chi1, "chi2": f.chi2, "iota1": f.iota1, "iota2": f.iota2,
            "edges": f.edge_count, "enumerated": f.odd_unicyclic_omegas.is_some(),
        });
    }
    if let Some(sim) = &r.simulation {
        out["simulation"] = json!({
            "steps": sim.steps,
            "converged": sim.converged,
            "final_residual": sim.final_residual,
            "distance_to_exact": sim.distance_to_exact,
            "comfortability": sim.comfortability,
        });
    }
    out
}

fn print_analysis(r: &AnalysisReport) {
    let inst = &r.instance;
    let g = inst.graph();
    println!("graph: n={} |E|={} edges {:?}", g.n(), g.edge_count(), g.edges());
    let tails: Vec<String> = inst
        .boundary()
        .iter()
        .zip(inst.inflow())
        .map(|(v, a)| format!("{v}:{}", format_rational(a)))
        .collect();
    println!("tails: {}  z={}", tails.join(" "), inst.phase());
    match &r.coloring {
        Coloring::Bipartite(b) => println!("bipartite: X={:?} Y={:?}", b.x(), b.y()),
        Coloring::OddCycle(c) => println!("non-bipartite: odd cycle {c:?}"),
    }
    println!();
    println!("stationary state");
    for (a, x) in r.psi.iter() {
        println!("  {:<8} {}", a.to_string(), fraction(x));
    }
    println!();
    println!("comfortability");
    for rv in &r.routes {
        println!("  {:<12} {}", rv.route, fraction(&rv.value));
    }
    println!("  routes agree: {}", if r.routes_agree() { "yes" } else { "NO" });
    println!();
    let s = &r.scattering;
    let list = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(", ");
    println!("scattering: {} ({})", s.classification.name(), s.label());
    println!("  alpha = ({})", list(&s.alpha));
    println!("  beta  = ({})", list(&s.beta));
    println!("  sigma = {}", s.sigma);
    if let Some(f) = &r.factors {
        println!();
        println!(
            "factors: chi1={} chi2={} iota1={} iota2={}{}",
            f.chi1,
            f.chi2,
            f.iota1,
            f.iota2,
            if f.odd_unicyclic_omegas.is_some() { " (enumeration agrees)" } else { "" }
        );
    }
    println!();
    let total = r.audit.total();
    println!("audit: {:?} laws hold ({total} identities)", r.audit.family);
    if let Some(sim) = &r.simulation {
        println!();
        println!(
            "simulation: {} steps, converged={}, final residual {:.3e}, distance to exact {:.3e}, comfortability {:.9}",
            sim.steps, sim.converged, sim.final_residual, sim.distance_to_exact, sim.comfortability
        );
    }
}

fn cmd_rank(n: usize, phase: Phase, as_json: bool) -> Result<bool, Failure> {
    let ranking = rank(n, phase)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&ranking_json(&ranking)).expect("serializable"));
    } else {
        print_ranking(&ranking);
    }
    Ok(true)
}

fn ranking_json(r: &Ranking) -> Value {
    json!({
        "n": r.n,
        "z": r.phase.sign(),
        "configurations": r.configurations,
        "rows": r.rows.iter().map(|row| json!({
            "class": row.class,
            "edges": row.representative.edges(),
            "pair": [row.pair.0, row.pair.1],
            "comf": exact(&row.comf),
            "label": row.label.to_string(),
            "bipartite": row.bipartite,
            "edge_count": row.edge_count,
            "distance": row.distance,
            "multiplicity": row.multiplicity,
        })).collect::<Vec<_>>(),
        "value_classes": r.value_classes.iter().map(|vc| json!({
            "name": vc.name,
            "comf": exact(&vc.comf),
            "label": vc.label().to_string(),
            "bipartite": vc.bipartite,
            "edge_count": vc.edge_count,
            "orbits": vc.rows.len(),
        })).collect::<Vec<_>>(),
        "class_maxima": r.classes.iter().map(|c| json!({
            "name": c.name,
            "edges": c.representative.edges(),
            "degree_sequence": c.degree_sequence,
            "max_comf": exact(&c.max_comf),
            "argmax": [c.argmax.0, c.argmax.1],
        })).collect::<Vec<_>>(),
        "tie_groups": r.tie_groups().iter().map(|(c, members)| json!({
            "comf": exact(c),
            "members": members.iter().map(|&i| r.value_classes[i].name.clone().unwrap_or_else(|| format!("#{i}"))).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn print_ranking(r: &Ranking) {
    println!(
        "n={} z={}: {} configurations, {} orbits, {} isomorphism classes",
        r.n,
        r.phase,
        r.configurations,
        r.rows.len(),
        r.classes.len()
    );
    println!();
    println!("{:<24} {:<6} {:<22} {:<5} {:<5} {:<5} mult", "edges", "pair", "comf", "label", "bip", "|E|");
    for row in &r.rows {
        println!(
            "{:<24} {:<6} {:<22} {:<5} {:<5} {:<5} {}",
            edge_list(row.representative.edges()),
            format!("{},{}", row.pair.0, row.pair.1),
            fraction(&row.comf),
            row.label,
            if row.bipartite { "yes" } else { "no" },
            row.edge_count,
            row.multiplicity
        );
    }
    println!();
    println!("value classes");
    for (i, vc) in r.value_classes.iter().enumerate() {
        println!(
            "  {:<5} {:<22} {} bipartite={} |E|={} orbits={}",
            vc.name.clone().unwrap_or_else(|| format!("#{i}")),
            fraction(&vc.comf),
            vc.label(),
            vc.bipartite,
            vc.edge_count,
            vc.rows.len()
        );
    }
    println!();
    println!("class maxima");
    for c in &r.classes {
        println!(
            "  {:<5} {:<24} degrees {:?} max {} at {},{}",
            c.name.clone().unwrap_or_default(),
            edge_list(c.representative.edges()),
            c.degree_sequence,
            fraction(&c.max_comf),
            c.argmax.0,
            c.argmax.1
        );
    }
    println!();
    println!("ordering (ties grouped)");
    let groups: Vec<String> = r
        .tie_groups()
        .iter()
        .map(|(_, members)| {
            members
                .iter()
                .map(|&i| r.value_classes[i].name.clone().unwrap_or_else(|| format!("#{i}")))
                .collect::<Vec<_>>()
                .join(" = ")
        })
        .collect();
    println!("  {}", groups.join(" > "));
}

fn edge_list(edges: &[(usize, usize)]) -> String {
    edges.iter().map(|(u, v)| format!("{u}{v}")).collect::<Vec<_>>().join(" ")
}

fn cmd_simulate(path: &Path, steps: usize, out: &Path, tolerance: f64) -> Result<bool, Failure> {
    let inst = load(path)?;
    let trace = simulate_with(&inst, steps, tolerance)?;
    let psi = stationary_state(&inst)?;
    if out == Path::new("-") {
        trace.write_csv(&mut io::stdout().lock())?;
    } else {
        let mut file = io::BufWriter::new(fs::File::create(out)?);
        trace.write_csv(&mut file)?;
        file.flush()?;
    }
    let summary = format!(
        "steps {} converged {} final residual {:.3e} distance to exact {:.3e} comfortability {:.9} (exact {})",
        trace.steps(),
        trace.converged,
        trace.residuals.last().copied().unwrap_or(0.0),
        trace.distance_to(&psi),
        trace.comfortability(),
        format_rational(&comfortability_direct(&psi))
    );
    if out == Path::new("-") {
        eprintln!("{summary}");
    } else {
        println!("{summary}");
    }
    Ok(true)
}

fn cmd_selftest(max_n: usize) -> Result<bool, Failure> {
    let results = run_all(max_n)?;
    let mut ok = true;
    for r in &results {
        println!("{} {:<24} {} checks", if r.passed() { "PASS" } else { "FAIL" }, r.name, r.cases);
        for f in r.failures.iter().take(5) {
            println!("    {f}");
        }
        ok &= r.passed();
    }
    println!("{} suites, {}", results.len(), if ok { "all passed" } else { "FAILURES" });
    Ok(ok)
}
