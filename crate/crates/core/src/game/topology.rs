use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GameError, PositionId};

/// Number of network neighbours of a position; determines its risk tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Degree(u8);

impl Degree {
    pub const ALL: [Degree; 3] = [Degree(1), Degree(2), Degree(3)];

    pub fn new(d: u32) -> Result<Self, GameError> {
        match d {
            1..=3 => Ok(Degree(d as u8)),
            _ => Err(GameError::DegreeOutOfRange(d)),
        }
    }

    pub fn get(self) -> u32 {
        self.0 as u32
    }

    /// Zero-based tier index used by the per-degree parameter tables.
    pub fn tier(self) -> usize {
        self.0 as usize - 1
    }
}

impl TryFrom<u32> for Degree {
    type Error = GameError;

    fn try_from(d: u32) -> Result<Self, Self::Error> {
        Degree::new(d)
    }
}

impl From<Degree> for u32 {
    fn from(d: Degree) -> u32 {
        d.get()
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected edge, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(PositionId, PositionId);

impl Edge {
    pub fn new(a: PositionId, b: PositionId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn endpoints(self) -> (PositionId, PositionId) {
        (self.0, self.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl FromStr for Edge {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(['-', '–']).ok_or_else(|| GameError::Parse {
            what: "edge",
            input: s.into(),
        })?;
        Ok(Edge::new(a.parse()?, b.parse()?))
    }
}

/// Degree sequence every admissible network must have, over positions A..F.
pub const REQUIRED_DEGREES: [u32; 6] = [1, 3, 2, 3, 2, 1];

/// The fixed six-member network.
///
/// Any simple connected graph with six edges whose degree sequence over A..F
/// is (1, 3, 2, 3, 2, 1) is accepted; the default is
/// A–B, B–C, B–D, C–D, D–E, E–F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    edges: BTreeSet<Edge>,
    adjacent: [[bool; 6]; 6],
}

impl Topology {
    pub fn new(edges: impl IntoIterator<Item = Edge>) -> Result<Self, GameError> {
        let mut set = BTreeSet::new();
        for e in edges {
            let (a, b) = e.endpoints();
            if a == b {
                return Err(GameError::InvalidTopology(format!("self-loop at {a}")));
            }
            if !set.insert(e) {
                return Err(GameError::InvalidTopology(format!("duplicate edge {e}")));
            }
        }
        if set.len() != 6 {
            return Err(GameError::InvalidTopology(format!(
                "expected 6 edges, found {}",
                set.len()
            )));
        }
        let mut adjacent = [[false; 6]; 6];
        for e in &set {
            let (a, b) = e.endpoints();
            adjacent[a.index()][b.index()] = true;
            adjacent[b.index()][a.index()] = true;
        }
        let topology = Topology { edges: set, adjacent };
        for p in PositionId::ALL {
            let d = topology.neighbours(p).count() as u32;
            if d != REQUIRED_DEGREES[p.index()] {
                return Err(GameError::InvalidTopology(format!(
                    "position {p} has degree {d}, expected {}",
                    REQUIRED_DEGREES[p.index()]
                )));
            }
        }
        if !topology.is_connected() {
            return Err(GameError::InvalidTopology("graph is not connected".into()));
        }
        Ok(topology)
    }

    pub fn parse_edges<S: AsRef<str>>(edges: &[S]) -> Result<Self, GameError> {
        let parsed = edges
            .iter()
            .map(|s| s.as_ref().parse::<Edge>())
            .collect::<Result<Vec<_>, _>>()?;
        Topology::new(parsed)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_neighbour(&self, a: PositionId, b: PositionId) -> bool {
        self.adjacent[a.index()][b.index()]
    }

    /// Neighbours of `p` in A→F order.
    pub fn neighbours(&self, p: PositionId) -> impl Iterator<Item = PositionId> + '_ {
        PositionId::ALL
            .into_iter()
            .filter(move |&q| self.adjacent[p.index()][q.index()])
    }

    pub fn degree(&self, p: PositionId) -> Degree {
        Degree::new(self.neighbours(p).count() as u32).expect("validated topologies only have degrees 1..=3")
    }

    fn is_connected(&self) -> bool {
        let mut seen = [false; 6];
        let mut stack = vec![PositionId::A];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for q in self.neighbours(p) {
                if !seen[q.index()] {
                    seen[q.index()] = true;
                    stack.push(q);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Every admissible topology on the six labelled positions.
    pub fn enumerate_admissible() -> Vec<Topology> {
        let mut all_pairs = Vec::new();
        for (i, &a) in PositionId::ALL.iter().enumerate() {
            for &b in &PositionId::ALL[i + 1..] {
                all_pairs.push(Edge::new(a, b));
            }
        }
        let mut out = Vec::new();
        for mask in 0u32..(1 << all_pairs.len()) {
            if mask.count_ones() != 6 {
                continue;
            }
            let edges = all_pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| *e);
            if let Ok(t) = Topology::new(edges) {
                out.push(t);
            }
        }
        out
    }
}

impl Default for Topology {
    fn default() -> Self {
        use PositionId::*;
        Topology::new([
            Edge::new(A, B),
            Edge::new(B, C),
            Edge::new(B, D),
            Edge::new(C, D),
            Edge::new(D, E),
            Edge::new(E, F),
        ])
        .expect("default topology is admissible")
    }
}

impl Serialize for Topology {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let edges: Vec<String> = self.edges.iter().map(ToString::to_string).collect();
        edges.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let edges = Vec::<String>::deserialize(d)?;
        Topology::parse_edges(&edges).map_err(serde::de::Error::custom)
    }
}
