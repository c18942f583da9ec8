//! Walk instances: an internal graph with tails, inflow amplitudes and phase,
//! plus the line-oriented instance file format.
//!
//! ```text
//! # K3 with two tails
//! n 3
//! e 1 2
//! e 2 3
//! e 1 3
//! tail 1 9
//! tail 3 9
//! z -1
//! ```

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{parse_rational, rat, Rational};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Phase of the inflow. `Minus` is the alternating inflow realized by the
/// signed Grover coin; `Plus` is the constant inflow of the plain Grover walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    /// Overall coin sign at internal vertices.
    pub fn sign(self) -> i64 {
        match self {
            Phase::Plus => 1,
            Phase::Minus => -1,
        }
    }

    pub fn from_sign(z: i64) -> Result<Phase> {
        match z {
            1 => Ok(Phase::Plus),
            -1 => Ok(Phase::Minus),
            other => Err(Error::BadPhase(other.to_string())),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Plus => "+1",
            Phase::Minus => "-1",
        })
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Phase> {
        match s.trim() {
            "+1" | "1" => Ok(Phase::Plus),
            "-1" => Ok(Phase::Minus),
            other => Err(Error::BadPhase(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkInstance {
    graph: Graph,
    boundary: Vec<Vertex>,
    inflow: Vec<Rational>,
    phase: Phase,
    tail_at: Vec<Option<usize>>,
}

impl WalkInstance {
    pub fn new(graph: Graph, boundary: Vec<Vertex>, inflow: Vec<Rational>, phase: Phase) -> Result<Self> {
        if boundary.is_empty() {
            return Err(Error::NoBoundary);
        }
        if boundary.len() != inflow.len() {
            return Err(Error::InflowMismatch {
                boundary: boundary.len(),
                inflow: inflow.len(),
            });
        }
        let mut tail_at = vec![None; graph.n() + 1];
        for (j, &v) in boundary.iter().enumerate() {
            if v == 0 || v > graph.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: graph.n() });
            }
            if tail_at[v].replace(j).is_some() {
                return Err(Error::DuplicateBoundary(v));
            }
        }
        Ok(WalkInstance {
            graph,
            boundary,
            inflow,
            phase,
            tail_at,
        })
    }

    /// Two tails at `u1` and `un` with inflow `(1, 0)`.
    pub fn standard(graph: Graph, u1: Vertex, un: Vertex, phase: Phase) -> Result<Self> {
        Self::new(graph, vec![u1, un], vec![rat(1), rat(0)], phase)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn boundary(&self) -> &[Vertex] {
        &self.boundary
    }

    pub fn inflow(&self) -> &[Rational] {
        &self.inflow
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Number of tails.
    pub fn r(&self) -> usize {
        self.boundary.len()
    }

    /// Coin sign at internal vertices as a rational.
    pub fn coin_sign(&self) -> Rational {
        rat(self.phase.sign())
    }

    /// Position of `v` in the boundary list, if a tail is attached there.
    pub fn tail_index(&self, v: Vertex) -> Option<usize> {
        self.tail_at[v]
    }

    /// Degree in the tailed graph: internal degree plus one at boundary vertices.
    pub fn tilde_degree(&self, v: Vertex) -> usize {
        self.graph.degree(v) + usize::from(self.tail_at[v].is_some())
    }

    /// Inflow entering at `v` (zero off the boundary).
    pub fn inflow_at(&self, v: Vertex) -> Rational {
        self.tail_at[v].map_or_else(Rational::zero, |j| self.inflow[j].clone())
    }

    /// Same graph, boundary and phase with a different inflow vector.
    pub fn with_inflow(&self, inflow: Vec<Rational>) -> Result<Self> {
        Self::new(self.graph.clone(), self.boundary.clone(), inflow, self.phase)
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        WalkInstance { phase, ..self.clone() }
    }

    /// True for two tails with inflow `(1, 0)`.
    pub fn is_standard(&self) -> bool {
        self.r() == 2 && self.inflow[0].is_one() && self.inflow[1].is_zero()
    }

    /// Renders the instance in the file format accepted by [`parse_instance`].
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.graph.n());
        for &(u, v) in self.graph.edges() {
            s.push_str(&format!("e {u} {v}\n"));
        }
        for (v, a) in self.boundary.iter().zip(&self.inflow) {
            s.push_str(&format!("tail {v} {a}\n"));
        }
        s.push_str(&format!("z {}\n", self.phase));
        s
    }
}

/// Parses an instance document. Unknown keywords and malformed lines are
/// reported with their 1-based line number.
pub fn parse_instance(text: &str) -> Result<WalkInstance> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut boundary = Vec::new();
    let mut inflow = Vec::new();
    let mut phase = Phase::Minus;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::Syntax { line, message };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let int = |tok: &str| -> Result<usize> {
            tok.parse()
                .map_err(|_| syntax(format!("expected a non-negative integer, got {tok:?}")))
        };
        match tokens.as_slice() {
            ["n", k] => {
                if n.is_some() {
                    return Err(syntax("vertex count given twice".into()));
                }
                n = Some(int(k)?);
            }
            ["e", u, v] => edges.push((int(u)?, int(v)?)),
            ["tail", v, a] => {
                boundary.push(int(v)?);
                inflow.push(parse_rational(a).map_err(|_| syntax(format!("bad inflow {a:?}")))?);
            }
            ["z", z] => phase = z.parse()?,
            [kw, ..] if ["n", "e", "tail", "z"].contains(kw) => {
                return Err(syntax(format!("wrong number of fields for '{kw}'")));
            }
            [kw, ..] => return Err(syntax(format!("unknown keyword {kw:?}"))),
            [] => unreachable!(),
        }
    }
    let n = n.ok_or(Error::Syntax {
        line: last_line,
        message: "missing 'n' line".into(),
    })?;
    let graph = Graph::new(n, &edges)?;
    WalkInstance::new(graph, boundary, inflow, phase)
}
